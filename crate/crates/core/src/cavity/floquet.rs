//! Laser-dressed calibration of the two-photon pulse.
//!
//! With the field static the single-dot-plus-cavity generator is periodic,
//! H(t) = H0 + V e^{iνt} + V† e^{−iνt}, and its Floquet matrix
//! ε φ_m = (H0 + mν) φ_m + V φ_{m−1} + V† φ_{m+1} is Hermitian. The pair of
//! quasi-energy states carrying |0, 1 photon⟩ and |2, 0 photons⟩ form an
//! effective two-level system; from their splitting S and the |0, 1⟩ share p
//! of the upper state, the dressed detuning is S(2p − 1) and the dressed
//! two-photon rate S √(p(1 − p)).

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::couplings::CouplingModel;
use super::hamiltonian::{Model, System, C64};
use super::pulse::DotControl;
use crate::error::{Error, Result};

pub const DEFAULT_HARMONICS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DressedResonance {
    pub field: f64,
    /// Dressed |0,1⟩ minus dressed |2,0⟩ quasi-energy, rad/ns.
    pub detuning: f64,
    /// Effective |0,1⟩ ↔ |2,0⟩ rate Ω̃, rad/ns.
    pub rate: f64,
    pub splitting: f64,
    pub share: f64,
}

/// Dressed two-photon detuning and rate at a static field with the laser on.
pub fn dressed_two_photon(
    model: &CouplingModel,
    field: f64,
    fock_cutoff: usize,
    harmonics: usize,
) -> Result<DressedResonance> {
    let system = System::new(model.clone(), Model::Full, 1, fock_cutoff)?;
    let controls = [DotControl { field, laser: 1.0, ..DotControl::default() }];
    let (h0, v) = system.harmonic_parts(&controls)?;
    let d = system.dim();
    let blocks = 2 * harmonics + 1;
    let nu = model.nu();
    let mut f = DMatrix::<C64>::zeros(d * blocks, d * blocks);
    for b in 0..blocks {
        let m = b as f64 - harmonics as f64;
        let o = b * d;
        f.view_mut((o, o), (d, d)).copy_from(&h0);
        for i in 0..d {
            f[(o + i, o + i)] += C64::new(m * nu, 0.0);
        }
        if b > 0 {
            // Block (m, m−1) = V, block (m−1, m) = V†.
            f.view_mut((o, o - d), (d, d)).copy_from(&v);
            f.view_mut((o - d, o), (d, d)).copy_from(&v.adjoint());
        }
    }
    let eig = SymmetricEigen::new(f);
    let a = harmonics * d + system.basis.index(&[0], 1);
    let b = harmonics * d + system.basis.index(&[2], 0);
    // The pair carrying |0,1⟩ and |2,0⟩: mixed near resonance, one each away from it.
    let mut ranked: Vec<(f64, f64, f64)> = (0..d * blocks)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(a, k)].norm_sqr(), eig.eigenvectors[(b, k)].norm_sqr()))
        .collect();
    ranked.sort_by(|x, y| (y.1 + y.2).total_cmp(&(x.1 + x.2)));
    let (hi, lo) = if ranked[0].0 >= ranked[1].0 { (ranked[0], ranked[1]) } else { (ranked[1], ranked[0]) };
    let splitting = hi.0 - lo.0;
    let total = hi.1 + lo.1;
    if total < 0.5 {
        return Err(Error::Numeric(format!("dressed |0,1⟩ state is not resolved at {field} MV/m")));
    }
    let share = hi.1 / total;
    Ok(DressedResonance {
        field,
        detuning: splitting * (2.0 * share - 1.0),
        rate: splitting * (share * (1.0 - share)).sqrt(),
        splitting,
        share,
    })
}

/// Field near `bare_field` where the dressed two-photon detuning vanishes.
pub fn calibrate_two_photon(
    model: &CouplingModel,
    bare_field: f64,
    fock_cutoff: usize,
    harmonics: usize,
) -> Result<DressedResonance> {
    let eval = |e: f64| dressed_two_photon(model, e, fock_cutoff, harmonics);
    let start = eval(bare_field)?;
    if start.detuning == 0.0 {
        return Ok(start);
    }
    let step = 2e-4;
    let (lo_lim, hi_lim) = model.levels.range();
    let mut bracket = None;
    'scan: for k in 1..=200 {
        for dir in [1.0, -1.0] {
            let a = bare_field + dir * step * (k - 1) as f64;
            let b = bare_field + dir * step * k as f64;
            if b < lo_lim || b > hi_lim {
                continue;
            }
            let (ra, rb) = (eval(a)?, eval(b)?);
            if ra.detuning.signum() != rb.detuning.signum() {
                bracket = Some((ra, rb));
                break 'scan;
            }
        }
    }
    let (mut a, mut b) = bracket.ok_or_else(|| {
        Error::Numeric(format!("no dressed two-photon resonance within ±0.04 MV/m of {bare_field} MV/m"))
    })?;
    for _ in 0..200 {
        let m = 0.5 * (a.field + b.field);
        let r = eval(m)?;
        if r.detuning == 0.0 || (b.field - a.field).abs() < 1e-13 {
            return Ok(r);
        }
        if r.detuning.signum() == a.detuning.signum() {
            a = r;
        } else {
            b = r;
        }
        if r.detuning.abs() < 1e-9 * r.rate {
            return Ok(r);
        }
    }
    Ok(if a.detuning.abs() < b.detuning.abs() { a } else { b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::testing::coarse;
    use crate::cavity::{CavityMode, LaserDrive, RabiConvention};

    fn with_laser(kv_per_m: f64) -> CouplingModel {
        let laser = LaserDrive { field_amplitude_kv_per_m: kv_per_m, ..LaserDrive::reference() };
        CouplingModel::new(&coarse().map, CavityMode::reference(), laser, RabiConvention::HalfAmplitude).unwrap()
    }

    #[test]
    fn weak_laser_reproduces_the_perturbative_rate() {
        let m = with_laser(3.07);
        let bare = coarse().points.e_lc.field;
        let r = calibrate_two_photon(&m, bare, 2, DEFAULT_HARMONICS).unwrap();
        let otilde = m.couplings_at(r.field).unwrap().otilde;
        assert!((r.rate / otilde - 1.0).abs() < 2e-3, "{} vs {otilde}", r.rate);
        assert!((r.field - bare).abs() < 1e-4);
        assert!(r.detuning.abs() < 1e-6 * r.rate);
        assert!((r.share - 0.5).abs() < 1e-3);
    }

    #[test]
    fn detuning_changes_sign_across_the_resonance() {
        let m = &coarse().model;
        let r = calibrate_two_photon(m, coarse().points.e_lc.field, 2, DEFAULT_HARMONICS).unwrap();
        let lo = dressed_two_photon(m, r.field - 5e-3, 2, DEFAULT_HARMONICS).unwrap();
        let hi = dressed_two_photon(m, r.field + 5e-3, 2, DEFAULT_HARMONICS).unwrap();
        assert!(lo.detuning * hi.detuning < 0.0);
        // Avoided crossing: the splitting is smallest on resonance.
        assert!(r.splitting < lo.splitting && r.splitting < hi.splitting);
        assert!((r.splitting - 2.0 * r.rate).abs() < 1e-9 * r.splitting);
    }

    #[test]
    fn harmonics_are_converged() {
        let m = &coarse().model;
        let e = coarse().points.e_lc.field;
        let a = dressed_two_photon(m, e, 2, DEFAULT_HARMONICS).unwrap();
        let b = dressed_two_photon(m, e, 2, DEFAULT_HARMONICS + 2).unwrap();
        assert!((a.detuning - b.detuning).abs() < 1e-6 * a.splitting);
        assert!((a.rate - b.rate).abs() < 1e-6 * a.rate);
    }
}
