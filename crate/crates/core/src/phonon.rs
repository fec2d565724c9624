//! Zero-temperature LA-phonon emission time between the two lowest dot states.
//!
//! Deformation-potential golden rule with approximate wavefunctions: an
//! infinite square well of height h along the axis and J₀(x₀₁ r/a) radially.
//! In the bulk limit
//!
//! τ⁻¹ = D²K³/(4πħρc_s²) ∫₀¹ dq' q'/√(1−q'²) |R(αq')|² |A(β√(1−q'²))|²
//!
//! with K = E₁₀/ħc_s, α = Ka/x₀₁, β = Kh/π, the radial overlap
//! R(αq') = N ∫₀^{x₀₁} J₀(αq'r) J₀²(r) r dr and the axial overlap
//! A(κ) = (2/π) ∫_{−π/2}^{π/2} cos z sin 2z e^{iκz} dz.
//! The outer integral is taken in θ with q' = sin θ, which removes the
//! endpoint singularity.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadSettings};
use crate::report::{csv, fmt_g6};
use crate::units::si;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhononEnvironment {
    /// ρ, kg/m³.
    pub mass_density: f64,
    /// c_s, m/s.
    pub sound_speed: f64,
    /// D, eV.
    pub deformation_potential: f64,
}

impl Default for PhononEnvironment {
    fn default() -> Self {
        Self::gaas()
    }
}

impl PhononEnvironment {
    pub fn gaas() -> Self {
        Self { mass_density: 5300.0, sound_speed: 3700.0, deformation_potential: 8.6 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("phonon.mass_density", self.mass_density),
            ("phonon.sound_speed", self.sound_speed),
            ("phonon.deformation_potential", self.deformation_potential),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// Square-well × J₀ approximation of the dot used for the phonon overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApproxDotShape {
    pub radius_nm: f64,
    pub height_nm: f64,
}

impl Default for ApproxDotShape {
    fn default() -> Self {
        Self::reference()
    }
}

impl ApproxDotShape {
    pub fn reference() -> Self {
        Self { radius_nm: 13.0, height_nm: 40.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("phonon_shape.radius_nm", self.radius_nm), ("phonon_shape.height_nm", self.height_nm)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// First zero of J₀.
    pub fn x01() -> f64 {
        static X01: OnceLock<f64> = OnceLock::new();
        *X01.get_or_init(|| bessel::zeros(0, 1)[0])
    }

    /// N⁻¹ = ∫₀^{x₀₁} r J₀²(r) dr.
    pub fn normalization_inverse() -> f64 {
        static NINV: OnceLock<f64> = OnceLock::new();
        *NINV.get_or_init(|| {
            integrate(|r| r * bessel::j0(r).powi(2), 0.0, Self::x01(), QuadSettings::default().with_rel_tol(1e-13))
                .expect("smooth integrand")
                .value
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionlessParams {
    pub k10_per_nm: f64,
    pub alpha: f64,
    pub beta: f64,
}

pub fn dimensionless_params(
    e10_mev: f64,
    env: &PhononEnvironment,
    shape: &ApproxDotShape,
) -> Result<DimensionlessParams> {
    if !(e10_mev.is_finite() && e10_mev > 0.0) {
        return Err(Error::config(format!("E10 must be positive, got {e10_mev} meV")));
    }
    env.validate()?;
    shape.validate()?;
    let k_per_m = e10_mev * 1e-3 * si::Q / (si::HBAR * env.sound_speed);
    let k10 = k_per_m * 1e-9;
    Ok(DimensionlessParams {
        k10_per_nm: k10,
        alpha: k10 * shape.radius_nm / ApproxDotShape::x01(),
        beta: k10 * shape.height_nm / PI,
    })
}

/// ∫_{−π/2}^{π/2} sin(a z) sin(κ z) dz.
fn sine_pair(a: f64, kappa: f64) -> f64 {
    let d = a - kappa;
    let first = if d.abs() < 1e-8 {
        // sin(dπ/2)/d → π/2, with the next Taylor term.
        PI / 2.0 * (1.0 - (d * PI / 2.0).powi(2) / 6.0)
    } else {
        (d * PI / 2.0).sin() / d
    };
    let s = a + kappa;
    first - (s * PI / 2.0).sin() / s
}

/// Axial overlap A(κ) at κ = β√(1 − qp²); purely imaginary because
/// cos z sin 2z is odd.
pub fn axial_overlap(beta: f64, qp: f64) -> Complex64 {
    let kappa = beta * (1.0 - qp * qp).max(0.0).sqrt();
    // cos z sin 2z = (sin z + sin 3z)/2
    Complex64::new(0.0, (sine_pair(1.0, kappa) + sine_pair(3.0, kappa)) / PI)
}

/// Axial overlap by direct adaptive quadrature.
pub fn axial_overlap_quadrature(beta: f64, qp: f64) -> Result<Complex64> {
    let kappa = beta * (1.0 - qp * qp).max(0.0).sqrt();
    let settings = QuadSettings::default()
        .with_rel_tol(1e-13)
        .with_abs_tol(1e-14)
        .with_initial_intervals(1 + (kappa / 2.0).ceil() as usize);
    let shape = |z: f64| z.cos() * (2.0 * z).sin();
    let re = integrate(|z| shape(z) * (kappa * z).cos(), -PI / 2.0, PI / 2.0, settings)?.value;
    let im = integrate(|z| shape(z) * (kappa * z).sin(), -PI / 2.0, PI / 2.0, settings)?.value;
    Ok(Complex64::new(re, im) * (2.0 / PI))
}

/// Radial overlap R = N ∫₀^{x₀₁} J₀(α qp r) J₀²(r) r dr.
pub fn radial_overlap(alpha: f64, qp: f64, rel_tol: f64) -> Result<f64> {
    let x01 = ApproxDotShape::x01();
    let w = alpha * qp;
    let settings = QuadSettings::default().with_rel_tol(rel_tol).with_initial_intervals(1 + w.ceil() as usize);
    let r = integrate(|r| bessel::j0(w * r) * bessel::j0(r).powi(2) * r, 0.0, x01, settings)?;
    Ok(r.value / ApproxDotShape::normalization_inverse())
}

/// Integrand of the outer integral in θ (q' = sin θ).
pub fn outer_integrand(theta: f64, alpha: f64, beta: f64, radial_rel_tol: f64) -> Result<f64> {
    let s = theta.sin();
    let r = radial_overlap(alpha, s, radial_rel_tol)?;
    let a = axial_overlap(beta, s).norm_sqr();
    Ok(s * r * r * a)
}

/// D²K³/(4πħρc_s²) in s⁻¹.
pub fn golden_rule_prefactor(e10_mev: f64, env: &PhononEnvironment) -> f64 {
    let k = e10_mev * 1e-3 * si::Q / (si::HBAR * env.sound_speed);
    let d = env.deformation_potential * si::Q;
    d * d * k.powi(3) / (4.0 * PI * si::HBAR * env.mass_density * env.sound_speed.powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhononTolerances {
    /// Relative target of the outer θ integral.
    pub outer_rel_tol: f64,
    /// Relative target of each radial overlap.
    pub radial_rel_tol: f64,
}

impl Default for PhononTolerances {
    fn default() -> Self {
        Self { outer_rel_tol: 1e-2, radial_rel_tol: 1e-8 }
    }
}

impl PhononTolerances {
    /// Every knob divided by `factor`.
    pub fn tightened(self, factor: f64) -> Self {
        Self { outer_rel_tol: self.outer_rel_tol / factor, radial_rel_tol: self.radial_rel_tol / factor }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("outer_rel_tol", self.outer_rel_tol), ("radial_rel_tol", self.radial_rel_tol)] {
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                return Err(Error::config(format!("phonon tolerance {name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Relaxation {
    pub e10_mev: f64,
    pub k10_per_nm: f64,
    pub alpha: f64,
    pub beta: f64,
    pub n_inverse: f64,
    pub prefactor_per_s: f64,
    /// Dimensionless q' integral.
    pub integral: f64,
    pub rate_per_s: f64,
    pub tau_s: f64,
}

pub fn relaxation_rate(e10_mev: f64, env: &PhononEnvironment, shape: &ApproxDotShape) -> Result<Relaxation> {
    relaxation_rate_with(e10_mev, env, shape, &PhononTolerances::default())
}

pub fn relaxation_rate_with(
    e10_mev: f64,
    env: &PhononEnvironment,
    shape: &ApproxDotShape,
    tol: &PhononTolerances,
) -> Result<Relaxation> {
    tol.validate()?;
    let p = dimensionless_params(e10_mev, env, shape)?;
    // One piece per axial and radial oscillation keeps the 1% estimate honest.
    let pieces = 4 + (p.beta / 2.0).ceil() as usize + (p.alpha / PI).ceil() as usize;
    let settings = QuadSettings::default().with_rel_tol(tol.outer_rel_tol).with_initial_intervals(pieces);
    let failure = std::cell::Cell::new(None);
    let integral = integrate(
        |theta| match outer_integrand(theta, p.alpha, p.beta, tol.radial_rel_tol) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        },
        0.0,
        PI / 2.0,
        settings,
    )?
    .value;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let prefactor = golden_rule_prefactor(e10_mev, env);
    let rate = prefactor * integral;
    if !(rate > 0.0) {
        return Err(Error::Numeric(format!("non-positive phonon rate {rate} s⁻¹ at E10 = {e10_mev} meV")));
    }
    Ok(Relaxation {
        e10_mev,
        k10_per_nm: p.k10_per_nm,
        alpha: p.alpha,
        beta: p.beta,
        n_inverse: ApproxDotShape::normalization_inverse(),
        prefactor_per_s: prefactor,
        integral,
        rate_per_s: rate,
        tau_s: 1.0 / rate,
    })
}

/// τ over a list of E₁₀ values, evaluated in parallel, in input order.
pub fn tau_sweep(
    e10_mev: &[f64],
    env: &PhononEnvironment,
    shape: &ApproxDotShape,
    tol: &PhononTolerances,
) -> Result<Vec<Relaxation>> {
    e10_mev.par_iter().map(|&e| relaxation_rate_with(e, env, shape, tol)).collect()
}

pub fn sweep_csv(rows: &[Relaxation]) -> String {
    csv(
        &["E10_meV", "K10_per_nm", "alpha", "beta", "tau_s"],
        rows.iter().map(|r| vec![r.e10_mev, r.k10_per_nm, r.alpha, r.beta, r.tau_s]),
    )
}

/// One-line summary with 6 significant digits.
pub fn summary(r: &Relaxation) -> String {
    format!(
        "E10 {} meV  K10 {} nm^-1  alpha {}  beta {}  prefactor {} s^-1  integral {}  tau {} s",
        fmt_g6(r.e10_mev),
        fmt_g6(r.k10_per_nm),
        fmt_g6(r.alpha),
        fmt_g6(r.beta),
        fmt_g6(r.prefactor_per_s),
        fmt_g6(r.integral),
        fmt_g6(r.tau_s)
    )
}
