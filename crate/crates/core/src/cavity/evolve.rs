//! Time propagation of the composite state.
//!
//! Integrating-factor (Lawson) RK4: the diagonal is propagated exactly over
//! each step with its midpoint value, the remainder by classical RK4. Between
//! control breakpoints the step is the largest that fits `dt_max` and
//! 2π/(`steps_per_period`·f_max), with f_max the largest coupling or residual oscillation
//! frequency on that piece, and small enough that the diagonal sweep over a
//! step, |dD/dt|·h², stays below 1e-4. The norm is never renormalised.

use num_complex::Complex64;
use serde::Serialize;

use super::hamiltonian::{Basis, System, C64};
use super::pulse::PulseSequence;
use crate::error::{Error, Result};

/// Norm drift beyond which propagation fails.
pub const NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Lab,
    Rotating,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositeState {
    pub basis: Basis,
    pub frame: Frame,
    #[serde(skip)]
    pub amplitudes: Vec<C64>,
}

impl CompositeState {
    /// Basis state with the given dot levels and photon number.
    pub fn basis_state(basis: Basis, levels: &[usize], photons: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); basis.dim()];
        amplitudes[basis.index(levels, photons)] = C64::new(1.0, 0.0);
        Self { basis, frame: Frame::Rotating, amplitudes }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn amplitude(&self, levels: &[usize], photons: usize) -> C64 {
        self.amplitudes[self.basis.index(levels, photons)]
    }

    pub fn probability(&self, levels: &[usize], photons: usize) -> f64 {
        self.amplitude(levels, photons).norm_sqr()
    }

    /// Probability of `n` photons in the cavity.
    pub fn photon_probability(&self, n: usize) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.basis.decode(*i).1 == n)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn inner(&self, other: &CompositeState) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub dt_max: f64,
    /// Record a sample roughly every this many ns.
    pub sample_interval: Option<f64>,
    pub norm_tolerance: f64,
    /// Steps per period of the fastest coupling or residual oscillation.
    pub steps_per_period: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { dt_max: 1e-3, sample_interval: None, norm_tolerance: NORM_TOLERANCE, steps_per_period: 100.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub state: CompositeState,
    pub samples: Vec<Sample>,
    pub steps: usize,
    /// Largest |‖ψ‖² − ‖ψ₀‖²| seen.
    pub norm_drift: f64,
    pub smallest_step: f64,
}

/// Propagate through the whole sequence.
pub fn evolve(
    system: &System,
    state: &CompositeState,
    sequence: &PulseSequence,
    options: &EvolveOptions,
) -> Result<Evolution> {
    evolve_span(system, state, sequence, 0.0, sequence.duration(), options)
}

/// Propagate from `t0` to `t1` on the sequence clock.
pub fn evolve_span(
    system: &System,
    state: &CompositeState,
    sequence: &PulseSequence,
    t0: f64,
    t1: f64,
    options: &EvolveOptions,
) -> Result<Evolution> {
    if state.basis != system.basis || sequence.dots != system.basis.dots {
        return Err(Error::config("state, sequence and system disagree on the basis"));
    }
    if !(options.dt_max > 0.0) || !(options.steps_per_period >= 1.0) {
        return Err(Error::config("dt_max must be positive and steps_per_period at least 1"));
    }
    let n0 = state.norm_sqr();
    let mut y = state.amplitudes.clone();
    let mut samples = Vec::new();
    let mut next_sample = t0;
    let record = |t: f64, y: &[C64], samples: &mut Vec<Sample>, next: &mut f64| {
        if let Some(dt) = options.sample_interval {
            if t >= *next - 1e-12 {
                samples.push(Sample { t, probabilities: y.iter().map(|a| a.norm_sqr()).collect() });
                *next = t + dt;
            }
        }
    };
    record(t0, &y, &mut samples, &mut next_sample);

    let mut cuts: Vec<f64> = sequence.breakpoints().into_iter().filter(|&b| b > t0 && b < t1).collect();
    cuts.insert(0, t0);
    cuts.push(t1);
    let mut steps = 0usize;
    let mut drift: f64 = 0.0;
    let mut smallest = f64::INFINITY;
    let dim = y.len();
    let mut ws = Workspace::new(dim);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let hint = 0.5 * (a + b);
        let controls_at = |t: f64| sequence.controls_at(t, hint);
        let f_max = [a, hint, b]
            .iter()
            .map(|&t| system.terms(t, &controls_at(t)).map(|x| x.max_rate))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let h_rule =
            if f_max > 0.0 { 2.0 * std::f64::consts::PI / (options.steps_per_period * f_max) } else { f64::INFINITY };
        let sweep = diagonal_sweep_rate(system, a, b, &controls_at)?;
        let h_sweep = if sweep > 0.0 { (DIAGONAL_SWEEP_BOUND / sweep).sqrt() } else { f64::INFINITY };
        let h_cap = options.dt_max.min(h_rule).min(h_sweep);
        let n = ((b - a) / h_cap).ceil().max(1.0) as usize;
        let h = (b - a) / n as f64;
        smallest = smallest.min(h);
        let mut terms_t = system.terms(a, &controls_at(a))?;
        for k in 0..n {
            let t = a + h * k as f64;
            let t_next = if k + 1 == n { b } else { a + h * (k + 1) as f64 };
            let terms_mid = system.terms(t + 0.5 * h, &controls_at(t + 0.5 * h))?;
            let terms_end = system.terms(t_next, &controls_at(t_next))?;
            ws.step(system, &terms_t, &terms_mid, &terms_end, h, &mut y);
            terms_t = terms_end;
            steps += 1;
            let nrm: f64 = y.iter().map(|v| v.norm_sqr()).sum();
            drift = drift.max((nrm - n0).abs());
            if drift > options.norm_tolerance {
                return Err(Error::NormDrift { drift, limit: options.norm_tolerance, dt: h, steps });
            }
            record(t_next, &y, &mut samples, &mut next_sample);
        }
    }
    Ok(Evolution {
        state: CompositeState { basis: state.basis, frame: state.frame, amplitudes: y },
        samples,
        steps,
        norm_drift: drift,
        smallest_step: if smallest.is_finite() { smallest } else { 0.0 },
    })
}

/// Bound on |dD/dt|·h² for the diagonal left to RK4 around its midpoint value.
const DIAGONAL_SWEEP_BOUND: f64 = 1e-4;

/// Largest |dD_i/dt| over a piece, from 16 sub-intervals.
fn diagonal_sweep_rate<F: Fn(f64) -> Vec<super::pulse::DotControl>>(
    system: &System,
    a: f64,
    b: f64,
    controls_at: &F,
) -> Result<f64> {
    const SUB: usize = 16;
    let dt = (b - a) / SUB as f64;
    let mut prev = system.terms(a, &controls_at(a))?.diag;
    let mut rate: f64 = 0.0;
    for k in 1..=SUB {
        let t = if k == SUB { b } else { a + dt * k as f64 };
        let d = system.terms(t, &controls_at(t))?.diag;
        for (x, y) in d.iter().zip(&prev) {
            rate = rate.max((x - y).abs() / dt);
        }
        prev = d;
    }
    Ok(rate)
}

struct Workspace {
    e: Vec<C64>,
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Self { e: z.clone(), k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }

    /// One Lawson RK4 step with integrating factor exp(−i D_mid h/2).
    fn step(
        &mut self,
        system: &System,
        t0: &super::hamiltonian::Terms,
        tm: &super::hamiltonian::Terms,
        t1: &super::hamiltonian::Terms,
        h: f64,
        y: &mut [C64],
    ) {
        let d = &tm.diag;
        let n = y.len();
        for i in 0..n {
            self.e[i] = Complex64::from_polar(1.0, -0.5 * h * d[i]);
        }
        let mi = -C64::i();
        // k1 = N(t, y)
        system.apply(t0, Some(d), y, &mut self.k1);
        self.k1.iter_mut().for_each(|v| *v *= mi);
        // k2 = N(t + h/2, E (y + h/2 k1))
        for i in 0..n {
            self.tmp[i] = self.e[i] * (y[i] + 0.5 * h * self.k1[i]);
        }
        system.apply(tm, Some(d), &self.tmp, &mut self.k2);
        self.k2.iter_mut().for_each(|v| *v *= mi);
        // k3 = N(t + h/2, E y + h/2 k2)
        for i in 0..n {
            self.tmp[i] = self.e[i] * y[i] + 0.5 * h * self.k2[i];
        }
        system.apply(tm, Some(d), &self.tmp, &mut self.k3);
        self.k3.iter_mut().for_each(|v| *v *= mi);
        // k4 = N(t + h, E² y + h E k3)
        for i in 0..n {
            self.tmp[i] = self.e[i] * (self.e[i] * y[i] + h * self.k3[i]);
        }
        system.apply(t1, Some(d), &self.tmp, &mut self.k4);
        self.k4.iter_mut().for_each(|v| *v *= mi);
        for i in 0..n {
            let e = self.e[i];
            let e2 = e * e;
            y[i] = e2 * y[i] + h / 6.0 * (e2 * self.k1[i] + 2.0 * e * (self.k2[i] + self.k3[i]) + self.k4[i]);
        }
    }
}
