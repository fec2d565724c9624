//! Cavity mode and laser drive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{mev_to_joule, si, HC_MEV_UM};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityMode {
    /// ħω_c, meV.
    pub photon_energy_mev: f64,
    pub refractive_index: f64,
    pub volume_um3: f64,
    pub fock_cutoff: usize,
}

impl CavityMode {
    /// Mode of the smallest allowed volume, (λ/2)³.
    pub fn minimal(photon_energy_mev: f64, refractive_index: f64, fock_cutoff: usize) -> Self {
        let mut mode = Self { photon_energy_mev, refractive_index, volume_um3: 0.0, fock_cutoff };
        mode.volume_um3 = mode.minimal_volume_um3();
        mode
    }

    /// 11.5 meV photons in a GaAs-like dielectric (n = 3.6), minimal volume.
    pub fn reference() -> Self {
        Self::minimal(11.5, 3.6, 2)
    }

    /// Wavelength inside the dielectric, µm.
    pub fn wavelength_um(&self) -> f64 {
        HC_MEV_UM / self.photon_energy_mev / self.refractive_index
    }

    pub fn minimal_volume_um3(&self) -> f64 {
        (0.5 * self.wavelength_um()).powi(3)
    }

    pub fn with_volume(mut self, volume_um3: f64) -> Self {
        self.volume_um3 = volume_um3;
        self
    }

    pub fn with_fock_cutoff(mut self, fock_cutoff: usize) -> Self {
        self.fock_cutoff = fock_cutoff;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.photon_energy_mev) || !positive(self.refractive_index) || !positive(self.volume_um3) {
            return Err(Error::config("cavity photon energy, index and volume must be positive"));
        }
        if self.volume_um3 < self.minimal_volume_um3() * (1.0 - 1e-12) {
            return Err(Error::config(format!(
                "cavity volume {} µm³ below the (λ/2)³ limit {} µm³",
                self.volume_um3,
                self.minimal_volume_um3()
            )));
        }
        if self.fock_cutoff < 2 {
            return Err(Error::config("fock_cutoff must be at least 2"));
        }
        Ok(())
    }
}

/// Vacuum field amplitude sqrt(ħω / (2 ε₀ n² V)) in V/m.
pub fn vacuum_field(cavity: &CavityMode) -> f64 {
    let energy = mev_to_joule(cavity.photon_energy_mev);
    let eps = cavity.refractive_index * cavity.refractive_index;
    let volume = cavity.volume_um3 * 1e-18;
    (energy / (2.0 * si::EPS0 * eps * volume)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LaserDrive {
    /// ħω_l, meV.
    pub photon_energy_mev: f64,
    /// Peak field at the dot, kV/m.
    pub field_amplitude_kv_per_m: f64,
}

impl Default for LaserDrive {
    fn default() -> Self {
        Self::reference()
    }
}

impl LaserDrive {
    pub fn reference() -> Self {
        Self { photon_energy_mev: 15.0, field_amplitude_kv_per_m: 30.7 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.photon_energy_mev.is_finite() && self.photon_energy_mev > 0.0) {
            return Err(Error::config("laser photon energy must be positive"));
        }
        if !(self.field_amplitude_kv_per_m.is_finite() && self.field_amplitude_kv_per_m >= 0.0) {
            return Err(Error::config("laser amplitude must be non-negative"));
        }
        Ok(())
    }
}
