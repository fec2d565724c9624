//! Rotating-frame generator of the dots-plus-cavity system.
//!
//! The frame removes ω_c from the photon number and from each dot's |1⟩, and
//! ω_l + ω_c from each dot's |2⟩. What remains per dot:
//!
//! * diagonal detunings Δ1(e) = E10/ħ − ω_c and Δ2(e) = E20/ħ − (ω_l + ω_c);
//! * static g01 (a†σ01 + h.c.) and Ω_l,12 (σ21 + h.c.);
//! * Ω_l,01 σ01 and g12 σ21 a, both carrying e^{+iνt} with ν = ω_l − ω_c;
//! * optionally the non-adiabatic coupling −i ė ⟨m|∂_e n⟩ of the field-dependent
//!   eigenbasis, carrying the frame phase of |m⟩⟨n|.
//!
//! The effective model keeps the diagonal and only the term of the process a
//! dot is pulsed for, with the two-photon process as Ω̃ (a†σ02 + h.c.).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::couplings::{CouplingModel, LocalCouplings};
use super::pulse::{DotControl, PulseKind};
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Levels kept per dot.
pub const LEVELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Every coupling term, field dependent.
    #[default]
    Full,
    /// Diagonal plus the active process only, at plateau strength.
    Effective,
}

/// Product basis |dot 0 level⟩ ⊗ … ⊗ |photon number⟩, photon index fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Basis {
    pub dots: usize,
    pub fock_cutoff: usize,
}

impl Basis {
    pub fn new(dots: usize, fock_cutoff: usize) -> Result<Self> {
        if !(1..=2).contains(&dots) {
            return Err(Error::config(format!("one or two dots supported, got {dots}")));
        }
        if fock_cutoff < 1 {
            return Err(Error::config("fock_cutoff must be at least 1"));
        }
        Ok(Self { dots, fock_cutoff })
    }

    pub fn dim(&self) -> usize {
        LEVELS.pow(self.dots as u32) * (self.fock_cutoff + 1)
    }

    pub fn index(&self, levels: &[usize], photons: usize) -> usize {
        debug_assert_eq!(levels.len(), self.dots);
        let dot = levels.iter().fold(0, |acc, &l| acc * LEVELS + l);
        dot * (self.fock_cutoff + 1) + photons
    }

    /// Inverse of [`Basis::index`]; unused trailing dot slots are zero.
    pub fn decode(&self, index: usize) -> ([usize; 2], usize) {
        let photons = index % (self.fock_cutoff + 1);
        let mut dot = index / (self.fock_cutoff + 1);
        let mut levels = [0; 2];
        for d in (0..self.dots).rev() {
            levels[d] = dot % LEVELS;
            dot /= LEVELS;
        }
        (levels, photons)
    }
}

/// Operator families, one stencil each per dot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    /// a† σ01
    Cav01,
    /// σ21
    Las12,
    /// σ01
    Las01,
    /// σ21 a
    Cav12,
    /// a† σ02
    TwoPhoton,
    /// |m⟩⟨n| for (m, n) = (0, 1), (0, 2), (1, 2)
    Trans01,
    Trans02,
    Trans12,
}

const OPS: [Op; 8] = [Op::Cav01, Op::Las12, Op::Las01, Op::Cav12, Op::TwoPhoton, Op::Trans01, Op::Trans02, Op::Trans12];

/// Dot level of the row, dot level of the column, photon change, for `|row⟩⟨col|`.
fn op_shape(op: Op) -> (usize, usize, i32) {
    match op {
        Op::Cav01 => (0, 1, 1),
        Op::Las12 => (2, 1, 0),
        Op::Las01 => (0, 1, 0),
        Op::Cav12 => (2, 1, -1),
        Op::TwoPhoton => (0, 2, 1),
        Op::Trans01 => (0, 1, 0),
        Op::Trans02 => (0, 2, 0),
        Op::Trans12 => (1, 2, 0),
    }
}

/// Instantaneous generator in sparse form: H = diag + Σ c·S + h.c.
#[derive(Debug, Clone, PartialEq)]
pub struct Terms {
    pub diag: Vec<f64>,
    coefs: Vec<(usize, C64)>,
    /// Largest coupling magnitude or residual oscillation frequency, rad/ns.
    pub max_rate: f64,
}

/// Generator of one system: coupling model, model kind and basis.
#[derive(Debug, Clone)]
pub struct System {
    pub model: CouplingModel,
    pub kind: Model,
    pub basis: Basis,
    /// Include the ė-driven coupling between instantaneous eigenstates.
    pub nonadiabatic: bool,
    stencils: Vec<Vec<(usize, usize, f64)>>,
}

impl System {
    pub fn new(model: CouplingModel, kind: Model, dots: usize, fock_cutoff: usize) -> Result<Self> {
        let basis = Basis::new(dots, fock_cutoff)?;
        let mut stencils = Vec::with_capacity(dots * OPS.len());
        for d in 0..dots {
            for op in OPS {
                stencils.push(stencil(&basis, d, op));
            }
        }
        Ok(Self { model, kind, basis, nonadiabatic: kind == Model::Full, stencils })
    }

    pub fn with_nonadiabatic(mut self, on: bool) -> Self {
        self.nonadiabatic = on;
        self
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn sid(&self, dot: usize, op: Op) -> usize {
        dot * OPS.len() + OPS.iter().position(|&o| o == op).expect("known op")
    }

    /// Evaluate the generator at time `t` for the given controls.
    pub fn terms(&self, t: f64, controls: &[DotControl]) -> Result<Terms> {
        debug_assert_eq!(controls.len(), self.basis.dots);
        let nu = self.model.nu();
        let osc = C64::from_polar(1.0, nu * t);
        let mut coefs = Vec::with_capacity(8);
        let mut max_rate: f64 = 0.0;
        let mut energies = [[0.0; LEVELS]; 2];
        for (d, c) in controls.iter().enumerate() {
            let lc = self.model.local(c.field)?;
            energies[d] = [0.0, lc.delta1, lc.delta2];
            let mut push = |op: Op, coef: C64, freq: f64| {
                if coef != C64::new(0.0, 0.0) {
                    max_rate = max_rate.max(coef.norm()).max(freq);
                    coefs.push((self.sid(d, op), coef));
                }
            };
            match self.kind {
                Model::Full => {
                    let laser = c.laser;
                    let phase = C64::from_polar(1.0, c.laser_phase);
                    push(Op::Cav01, C64::new(lc.g01, 0.0), 0.0);
                    push(Op::Cav12, lc.g12 * osc, nu.abs());
                    push(Op::Las01, lc.ol01 * laser * phase * osc, nu.abs());
                    push(Op::Las12, lc.ol12 * laser * phase.conj(), 0.0);
                    if self.nonadiabatic && c.field_rate != 0.0 {
                        for (op, coef, freq) in self.nonadiabatic_terms(t, c.field_rate, &lc) {
                            push(op, coef, freq);
                        }
                    }
                }
                Model::Effective => {
                    if let Some(a) = c.active {
                        let amp = a.rate * a.strength;
                        match a.kind {
                            PulseKind::Cavity => push(Op::Cav01, C64::new(amp, 0.0), 0.0),
                            PulseKind::TwoPhoton => push(Op::TwoPhoton, C64::new(amp, 0.0), 0.0),
                            PulseKind::Laser => {
                                push(Op::Las01, amp * C64::from_polar(1.0, c.laser_phase) * osc, nu.abs())
                            }
                        }
                    }
                }
            }
        }
        let dim = self.dim();
        let mut diag = Vec::with_capacity(dim);
        for i in 0..dim {
            let (levels, _) = self.basis.decode(i);
            diag.push((0..self.basis.dots).map(|d| energies[d][levels[d]]).sum());
        }
        Ok(Terms { diag, coefs, max_rate })
    }

    /// −i ė ⟨m|∂_e n⟩ |m⟩⟨n| with ⟨m|∂_e n⟩ = −z_mn / (E_n − E_m).
    fn nonadiabatic_terms(&self, t: f64, rate: f64, lc: &LocalCouplings) -> [(Op, C64, f64); 3] {
        let l = &lc.levels;
        let theta = [0.0, self.model.omega_c(), self.model.omega_c() + self.model.omega_l()];
        let term = |op: Op, m: usize, n: usize, z: f64, gap: f64| {
            let amp = -C64::i() * rate * (-z / gap);
            let freq = theta[m] - theta[n];
            (op, amp * C64::from_polar(1.0, freq * t), freq.abs())
        };
        [
            term(Op::Trans01, 0, 1, l.z01, l.e10),
            term(Op::Trans02, 0, 2, l.z02, l.e20),
            term(Op::Trans12, 1, 2, l.z12, l.e20 - l.e10),
        ]
    }

    /// out = (H_offdiag + diag − shift) · y, shift optional.
    pub fn apply(&self, terms: &Terms, shift: Option<&[f64]>, y: &[C64], out: &mut [C64]) {
        match shift {
            Some(s) => {
                for i in 0..y.len() {
                    out[i] = y[i] * (terms.diag[i] - s[i]);
                }
            }
            None => {
                for i in 0..y.len() {
                    out[i] = y[i] * terms.diag[i];
                }
            }
        }
        for &(sid, c) in &terms.coefs {
            let cc = c.conj();
            for &(r, col, f) in &self.stencils[sid] {
                out[r] += c * f * y[col];
                out[col] += cc * f * y[r];
            }
        }
    }

    /// Dense generator H/ħ (rad/ns); Hermitian by construction.
    pub fn dense(&self, terms: &Terms) -> DMatrix<C64> {
        let n = self.dim();
        let mut h =
            DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, terms.diag.iter().map(|&d| C64::new(d, 0.0))));
        for &(sid, c) in &terms.coefs {
            for &(r, col, f) in &self.stencils[sid] {
                h[(r, col)] += c * f;
                h[(col, r)] += (c * f).conj();
            }
        }
        h
    }

    /// Static part H0 and the e^{+iνt} part V of a field-static generator,
    /// H(t) = H0 + V e^{iνt} + V† e^{−iνt}. Requires zero field rates.
    pub fn harmonic_parts(&self, controls: &[DotControl]) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
        if controls.iter().any(|c| c.field_rate != 0.0) {
            return Err(Error::Numeric("harmonic decomposition needs static fields".into()));
        }
        let nu = self.model.nu();
        let quarter = std::f64::consts::FRAC_PI_2 / nu;
        let h0 = self.dense(&self.terms(0.0, controls)?);
        let h1 = self.dense(&self.terms(quarter, controls)?);
        let h2 = self.dense(&self.terms(2.0 * quarter, controls)?);
        let stat = (&h0 + &h2) * C64::new(0.5, 0.0);
        let a = (&h0 - &h2) * C64::new(0.5, 0.0);
        let b = &h1 - &stat;
        let v = (a - b * C64::i()) * C64::new(0.5, 0.0);
        Ok((stat, v))
    }
}

fn stencil(basis: &Basis, dot: usize, op: Op) -> Vec<(usize, usize, f64)> {
    let (row_level, col_level, dn) = op_shape(op);
    let mut out = Vec::new();
    for col in 0..basis.dim() {
        let (levels, n) = basis.decode(col);
        if levels[dot] != col_level {
            continue;
        }
        let m = n as i32 + dn;
        if m < 0 || m > basis.fock_cutoff as i32 {
            continue;
        }
        let factor = match dn {
            1 => (n as f64 + 1.0).sqrt(),
            -1 => (n as f64).sqrt(),
            _ => 1.0,
        };
        let mut new_levels = levels;
        new_levels[dot] = row_level;
        let row = basis.index(&new_levels[..basis.dots], m as usize);
        out.push((row, col, factor));
    }
    out
}

/// Dense rotating-frame generator H/ħ at time `t` (rad/ns).
pub fn assemble_hamiltonian(system: &System, t: f64, controls: &[DotControl]) -> Result<DMatrix<C64>> {
    Ok(system.dense(&system.terms(t, controls)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::pulse::ActiveDrive;
    use crate::cavity::testing::coarse;
    use proptest::prelude::*;

    fn control(field: f64, field_rate: f64, laser: f64, laser_phase: f64, kind: Option<PulseKind>) -> DotControl {
        DotControl {
            field,
            field_rate,
            laser,
            laser_phase,
            active: kind.map(|kind| ActiveDrive { kind, rate: 0.3, strength: 0.7 }),
        }
    }

    #[test]
    fn basis_round_trip() {
        for dots in 1..=2 {
            let b = Basis::new(dots, 3).unwrap();
            for i in 0..b.dim() {
                let (levels, n) = b.decode(i);
                assert_eq!(b.index(&levels[..dots], n), i);
            }
        }
        assert!(Basis::new(3, 2).is_err());
        assert_eq!(Basis::new(2, 2).unwrap().dim(), 27);
    }

    #[test]
    fn ladder_factors() {
        let sys = System::new(coarse().model.clone(), Model::Full, 1, 3).unwrap();
        let h = sys.dense(&sys.terms(0.0, &[control(1.0, 0.0, 0.0, 0.0, None)]).unwrap());
        let g = sys.model.local(1.0).unwrap().g01;
        for n in 0..3 {
            let v = h[(sys.basis.index(&[0], n + 1), sys.basis.index(&[1], n))];
            assert!((v.re - g * ((n + 1) as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn effective_model_keeps_only_the_active_process() {
        let sys = System::new(coarse().model.clone(), Model::Effective, 2, 2).unwrap();
        let idle = [control(0.4, 3.0, 1.0, 0.2, None), control(0.0, 0.0, 0.0, 0.0, None)];
        let h = sys.dense(&sys.terms(1.3, &idle).unwrap());
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                if i != j {
                    assert_eq!(h[(i, j)], C64::new(0.0, 0.0));
                }
            }
        }
        let active = [control(0.74, 0.0, 1.0, 0.0, Some(PulseKind::TwoPhoton)), control(0.0, 0.0, 0.0, 0.0, None)];
        let h = sys.dense(&sys.terms(1.3, &active).unwrap());
        let (a, b) = (sys.basis.index(&[0, 0], 1), sys.basis.index(&[2, 0], 0));
        assert!((h[(a, b)].re - 0.21).abs() < 1e-15);
        let off = (0..h.nrows())
            .flat_map(|i| (0..h.ncols()).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && h[(i, j)].norm() > 0.0)
            .count();
        // |0,n⟩⟨2,n−1| for n = 1, 2 times the three target levels, plus conjugates.
        assert_eq!(off, 12);
    }

    #[test]
    fn harmonic_parts_rebuild_the_generator() {
        let sys = System::new(coarse().model.clone(), Model::Full, 1, 2).unwrap();
        let c = [control(0.74, 0.0, 0.8, 0.3, Some(PulseKind::TwoPhoton))];
        let (h0, v) = sys.harmonic_parts(&c).unwrap();
        let nu = sys.model.nu();
        for t in [0.0, 0.37, 2.9e-3, 11.0] {
            let h = assemble_hamiltonian(&sys, t, &c).unwrap();
            let rebuilt = &h0 + &v * C64::from_polar(1.0, nu * t) + v.adjoint() * C64::from_polar(1.0, -nu * t);
            assert!((h - rebuilt).norm() < 1e-9, "t = {t}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn generator_is_exactly_hermitian(
            t in 0.0f64..60.0,
            f0 in 0.0f64..2.5,
            f1 in 0.0f64..2.5,
            rate in -200.0f64..200.0,
            laser in 0.0f64..=1.0,
            phase in 0.0f64..6.3,
            effective in any::<bool>(),
        ) {
            let kind = if effective { Model::Effective } else { Model::Full };
            let sys = System::new(coarse().model.clone(), kind, 2, 2).unwrap();
            let c = [
                control(f0, rate, laser, phase, Some(PulseKind::Laser)),
                control(f1, 0.0, laser, -phase, Some(PulseKind::TwoPhoton)),
            ];
            let h = assemble_hamiltonian(&sys, t, &c).unwrap();
            prop_assert_eq!(h.clone(), h.adjoint());
        }
    }
}
