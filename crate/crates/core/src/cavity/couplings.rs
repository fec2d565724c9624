//! Coupling rates: vacuum Rabi, laser Rabi and the two-photon rate.

use serde::{Deserialize, Serialize};

use super::mode::{vacuum_field, CavityMode, LaserDrive};
use crate::error::{Error, Result};
use crate::spline::CubicSpline;
use crate::stark::{OperatingPoint, OperatingPoints, StarkMap};
use crate::units::{dipole_energy_mev, mev_to_rad_per_ns};

/// Detunings closer to zero than this (meV) are treated as zero.
pub const HAZARD_DETUNING_MEV: f64 = 1e-9;

/// Laser Rabi rate convention: q z E / (2ħ) or q z E / ħ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RabiConvention {
    #[default]
    HalfAmplitude,
    FullAmplitude,
}

impl RabiConvention {
    pub fn factor(self) -> f64 {
        match self {
            RabiConvention::HalfAmplitude => 0.5,
            RabiConvention::FullAmplitude => 1.0,
        }
    }
}

/// Perturbative two-photon rate from its ingredients (all rad/ns).
///
/// `detuning_l` is ω21 − ω_l and `detuning_c` is ω21 − ω_c.
pub fn two_photon_rate(g01: f64, ol12: f64, g12: f64, ol01: f64, detuning_l: f64, detuning_c: f64) -> Result<f64> {
    let hazard = mev_to_rad_per_ns(HAZARD_DETUNING_MEV);
    if detuning_l.abs() < hazard {
        return Err(Error::DivisionHazard { which: "ω21 − ω_l", detuning: detuning_l * crate::units::HBAR_MEV_NS });
    }
    if detuning_c.abs() < hazard {
        return Err(Error::DivisionHazard { which: "ω21 − ω_c", detuning: detuning_c * crate::units::HBAR_MEV_NS });
    }
    Ok(g01 * ol12 / detuning_l + g12 * ol01 / detuning_c)
}

/// Rates at one operating field, rad/ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Couplings {
    pub evaluated_at: f64,
    pub g01: f64,
    pub g12: f64,
    pub ol01: f64,
    pub ol12: f64,
    pub otilde: f64,
    /// ω21 − ω_l, rad/ns.
    pub detuning_21_l: f64,
    /// ω21 − ω_c, rad/ns.
    pub detuning_21_c: f64,
}

impl Couplings {
    #[allow(clippy::too_many_arguments)]
    fn from_levels(
        field: f64,
        e10: f64,
        e20: f64,
        z01: f64,
        z12: f64,
        e_vac: f64,
        cavity: &CavityMode,
        laser: &LaserDrive,
        convention: RabiConvention,
    ) -> Result<Self> {
        let laser_field = laser.field_amplitude_kv_per_m * 1e3;
        let rate = |z: f64, f: f64| mev_to_rad_per_ns(dipole_energy_mev(z, f));
        let g01 = rate(z01, e_vac);
        let g12 = rate(z12, e_vac);
        let ol01 = convention.factor() * rate(z01, laser_field);
        let ol12 = convention.factor() * rate(z12, laser_field);
        let w21 = mev_to_rad_per_ns(e20 - e10);
        let detuning_21_l = w21 - mev_to_rad_per_ns(laser.photon_energy_mev);
        let detuning_21_c = w21 - mev_to_rad_per_ns(cavity.photon_energy_mev);
        let otilde = two_photon_rate(g01, ol12, g12, ol01, detuning_21_l, detuning_21_c)?;
        Ok(Self { evaluated_at: field, g01, g12, ol01, ol12, otilde, detuning_21_l, detuning_21_c })
    }

    pub fn at_point(
        point: &OperatingPoint,
        cavity: &CavityMode,
        laser: &LaserDrive,
        convention: RabiConvention,
    ) -> Result<Self> {
        Self::from_levels(
            point.field,
            point.e10,
            point.e20,
            point.z01,
            point.z12,
            vacuum_field(cavity),
            cavity,
            laser,
            convention,
        )
    }

    /// Duration of a vacuum-Rabi π pulse, π/(2 g01), ns.
    pub fn cavity_pi_time(&self) -> f64 {
        std::f64::consts::PI / (2.0 * self.g01)
    }

    /// Duration of a two-photon 2π pulse, π/Ω̃, ns.
    pub fn two_photon_time(&self) -> f64 {
        std::f64::consts::PI / self.otilde
    }

    /// Duration of a laser rotation by `angle`, angle/(2 Ω_l,01), ns.
    pub fn laser_rotation_time(&self, angle: f64) -> f64 {
        angle / (2.0 * self.ol01)
    }
}

/// Couplings at e_c, e_l and e_lc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatingCouplings {
    pub e_vac_v_per_m: f64,
    pub e_c: Couplings,
    pub e_l: Couplings,
    pub e_lc: Couplings,
}

pub fn couplings(
    points: &OperatingPoints,
    cavity: &CavityMode,
    laser: &LaserDrive,
    convention: RabiConvention,
) -> Result<OperatingCouplings> {
    cavity.validate()?;
    laser.validate()?;
    Ok(OperatingCouplings {
        e_vac_v_per_m: vacuum_field(cavity),
        e_c: Couplings::at_point(&points.e_c, cavity, laser, convention)?,
        e_l: Couplings::at_point(&points.e_l, cavity, laser, convention)?,
        e_lc: Couplings::at_point(&points.e_lc, cavity, laser, convention)?,
    })
}

/// Level energies and dipoles at one field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Levels {
    pub field: f64,
    pub e10: f64,
    pub e20: f64,
    pub z01: f64,
    pub z12: f64,
    pub z02: f64,
}

/// Cubic-spline interpolants of a Stark map.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTable {
    lo: f64,
    hi: f64,
    e10: CubicSpline,
    e20: CubicSpline,
    z01: CubicSpline,
    z12: CubicSpline,
    z02: CubicSpline,
}

impl LevelTable {
    pub fn from_map(map: &StarkMap) -> Self {
        let x = map.fields();
        let col =
            |f: fn(&crate::stark::StarkPoint) -> f64| CubicSpline::new(x.clone(), map.points.iter().map(f).collect());
        let (lo, hi) = map.range();
        Self {
            lo,
            hi,
            e10: col(|p| p.e10),
            e20: col(|p| p.e20),
            z01: col(|p| p.z01),
            z12: col(|p| p.z12),
            z02: col(|p| p.z02),
        }
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn at(&self, field: f64) -> Result<Levels> {
        let slack = 1e-12 * (self.hi - self.lo);
        if !(field >= self.lo - slack && field <= self.hi + slack) {
            return Err(Error::Extrapolation { field, lo: self.lo, hi: self.hi });
        }
        Ok(Levels {
            field,
            e10: self.e10.eval(field),
            e20: self.e20.eval(field),
            z01: self.z01.eval(field),
            z12: self.z12.eval(field),
            z02: self.z02.eval(field),
        })
    }

    /// Field derivatives (dE10/de, dE20/de) in meV per MV/m.
    pub fn slopes(&self, field: f64) -> (f64, f64) {
        (self.e10.derivative(field), self.e20.derivative(field))
    }
}

/// Everything the propagator needs at a given field, angular rates in rad/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCouplings {
    pub levels: Levels,
    /// E10/ħ − ω_c.
    pub delta1: f64,
    /// E20/ħ − (ω_l + ω_c).
    pub delta2: f64,
    pub g01: f64,
    pub g12: f64,
    pub ol01: f64,
    pub ol12: f64,
}

/// Field-dependent couplings for one cavity and laser, backed by a
/// [`LevelTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingModel {
    pub levels: LevelTable,
    pub cavity: CavityMode,
    pub laser: LaserDrive,
    pub convention: RabiConvention,
    pub e_vac: f64,
}

impl CouplingModel {
    pub fn new(map: &StarkMap, cavity: CavityMode, laser: LaserDrive, convention: RabiConvention) -> Result<Self> {
        cavity.validate()?;
        laser.validate()?;
        Ok(Self { levels: LevelTable::from_map(map), e_vac: vacuum_field(&cavity), cavity, laser, convention })
    }

    pub fn omega_c(&self) -> f64 {
        mev_to_rad_per_ns(self.cavity.photon_energy_mev)
    }

    pub fn omega_l(&self) -> f64 {
        mev_to_rad_per_ns(self.laser.photon_energy_mev)
    }

    /// Residual oscillation frequency ω_l − ω_c.
    pub fn nu(&self) -> f64 {
        self.omega_l() - self.omega_c()
    }

    pub fn local(&self, field: f64) -> Result<LocalCouplings> {
        let levels = self.levels.at(field)?;
        let laser_field = self.laser.field_amplitude_kv_per_m * 1e3;
        let rate = |z: f64, f: f64| mev_to_rad_per_ns(dipole_energy_mev(z, f));
        let k = self.convention.factor();
        Ok(LocalCouplings {
            levels,
            delta1: mev_to_rad_per_ns(levels.e10) - self.omega_c(),
            delta2: mev_to_rad_per_ns(levels.e20) - self.omega_c() - self.omega_l(),
            g01: rate(levels.z01, self.e_vac),
            g12: rate(levels.z12, self.e_vac),
            ol01: k * rate(levels.z01, laser_field),
            ol12: k * rate(levels.z12, laser_field),
        })
    }

    /// Rates at `field` from the interpolated levels.
    pub fn couplings_at(&self, field: f64) -> Result<Couplings> {
        let l = self.levels.at(field)?;
        Couplings::from_levels(
            field,
            l.e10,
            l.e20,
            l.z01,
            l.z12,
            self.e_vac,
            &self.cavity,
            &self.laser,
            self.convention,
        )
    }
}
