//! Gate simulation and scoring on the computational subspace.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evolve::{evolve, evolve_span, CompositeState, EvolveOptions};
use super::hamiltonian::{Model, System, C64};
use super::plan::{plan_cnot, GateMode, PlanOptions, CONTROL_DOT, TARGET_DOT};
use super::pulse::{PulseKind, PulseSequence};
use crate::error::{Error, Result};
use crate::report::csv;
use crate::stark::OperatingPoints;

pub type Block = [[C64; 4]; 4];

/// Computational inputs in the order |c t⟩ = 00, 01, 10, 11.
pub const INPUTS: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// diag(1, 1, 1, −1).
pub fn ideal_kernel() -> Block {
    let mut m = [[c(0.0); 4]; 4];
    for k in 0..4 {
        m[k][k] = c(if k == 3 { -1.0 } else { 1.0 });
    }
    m
}

/// Target flip conditioned on the control.
pub fn ideal_cnot() -> Block {
    let mut m = [[c(0.0); 4]; 4];
    m[0][0] = c(1.0);
    m[1][1] = c(1.0);
    m[3][2] = c(1.0);
    m[2][3] = c(1.0);
    m
}

pub fn ideal_for(mode: GateMode) -> Block {
    match mode {
        GateMode::Kernel => ideal_kernel(),
        GateMode::Full => ideal_cnot(),
    }
}

fn trace_overlap(m: &Block, ideal: &Block) -> C64 {
    let mut s = c(0.0);
    for j in 0..4 {
        for k in 0..4 {
            s += ideal[j][k].conj() * m[j][k];
        }
    }
    s
}

/// |Tr(I†M)|² / 16.
pub fn fidelity(m: &Block, ideal: &Block) -> f64 {
    trace_overlap(m, ideal).norm_sqr() / 16.0
}

/// Single-qubit Z phases (rad) applied before and after the gate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ZPhases {
    pub pre_control: f64,
    pub pre_target: f64,
    pub post_control: f64,
    pub post_target: f64,
}

impl ZPhases {
    fn from_array(p: [f64; 4]) -> Self {
        Self { pre_control: p[0], pre_target: p[1], post_control: p[2], post_target: p[3] }
    }

    pub fn apply(&self, m: &Block) -> Block {
        let phase = |c: f64, t: f64, k: usize| C64::from_polar(1.0, c * INPUTS[k].0 as f64 + t * INPUTS[k].1 as f64);
        let mut out = *m;
        for j in 0..4 {
            for k in 0..4 {
                out[j][k] = m[j][k]
                    * phase(self.post_control, self.post_target, j)
                    * phase(self.pre_control, self.pre_target, k);
            }
        }
        out
    }
}

/// Maximise |Tr(I† Z_post M Z_pre)| by coordinate ascent from a grid of
/// starting phases. Each coordinate has a closed-form optimum.
pub fn optimize_phases(m: &Block, ideal: &Block) -> (f64, ZPhases) {
    let mut best = (fidelity(m, ideal), ZPhases::default());
    let grid = [0.0, 0.5 * PI, PI, 1.5 * PI];
    for s in 0..256usize {
        let mut p = [grid[s & 3], grid[(s >> 2) & 3], grid[(s >> 4) & 3], grid[(s >> 6) & 3]];
        let mut last = -1.0;
        for _ in 0..100 {
            for x in 0..4 {
                // Split the trace into the part independent of p[x] (A) and
                // the part proportional to e^{i p[x]} (B).
                let mut q = p;
                q[x] = 0.0;
                let mm = ZPhases::from_array(q).apply(m);
                let (mut a, mut b) = (c(0.0), c(0.0));
                for j in 0..4 {
                    for k in 0..4 {
                        let term = ideal[j][k].conj() * mm[j][k];
                        let involved = match x {
                            0 => INPUTS[k].0 == 1,
                            1 => INPUTS[k].1 == 1,
                            2 => INPUTS[j].0 == 1,
                            _ => INPUTS[j].1 == 1,
                        };
                        if involved {
                            b += term;
                        } else {
                            a += term;
                        }
                    }
                }
                if b.norm() > 0.0 {
                    p[x] = if a.norm() > 0.0 { a.arg() - b.arg() } else { 0.0 };
                }
            }
            let f = fidelity(&ZPhases::from_array(p).apply(m), ideal);
            if (f - last).abs() < 1e-15 {
                break;
            }
            last = f;
        }
        let z = ZPhases::from_array(p.map(|v| v.rem_euclid(2.0 * PI)));
        let f = fidelity(&z.apply(m), ideal);
        if f > best.0 + 1e-15 {
            best = (f, z);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateOptions {
    pub dt_max_ns: f64,
    /// Calibrate the laser phase of the closing rotation (full mode).
    pub calibrate_rotation: bool,
}

impl Default for GateOptions {
    fn default() -> Self {
        Self { dt_max_ns: 1e-3, calibrate_rotation: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub label: String,
    pub dot: usize,
    pub kind: PulseKind,
    pub target_field: f64,
    pub start_ns: f64,
    pub rise_ns: f64,
    pub plateau_ns: f64,
    pub post_delay_ns: f64,
    pub laser_on: bool,
    pub laser_phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateReport {
    pub mode: GateMode,
    pub model: Model,
    pub fock_cutoff: usize,
    /// Rows: outputs, columns: inputs, as (re, im); order 00, 01, 10, 11.
    pub truth_table: Vec<Vec<[f64; 2]>>,
    pub raw_fidelity: f64,
    pub fidelity: f64,
    pub phases: ZPhases,
    /// Phase of each column's ideal entry after the optimal Z phases, rad.
    pub phase_errors: [f64; 4],
    /// ‖column − ideal column‖ after the optimal phases.
    pub column_errors: [f64; 4],
    /// Phases of the raw amplitudes at the ideal entries, rad.
    pub raw_phases: [f64; 4],
    pub leakage: f64,
    pub column_leakage: [f64; 4],
    /// Largest |⟨ψ_j|ψ_k⟩ − δ_jk| among the propagated columns.
    pub orthonormality_defect: f64,
    pub norm_drift: f64,
    pub steps: usize,
    pub smallest_step_ns: f64,
    pub duration_ns: f64,
    pub timing: Vec<TimingRow>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub block: Block,
}

impl GateReport {
    pub fn amplitude(&self, output: usize, input: usize) -> C64 {
        self.block[output][input]
    }
}

fn initial(system: &System, (ctl, tgt): (usize, usize)) -> CompositeState {
    let mut levels = [0usize; 2];
    levels[CONTROL_DOT] = ctl;
    levels[TARGET_DOT] = tgt;
    CompositeState::basis_state(system.basis, &levels, 0)
}

fn block_of(system: &System, states: &[CompositeState]) -> Block {
    let mut m = [[c(0.0); 4]; 4];
    for (k, s) in states.iter().enumerate() {
        for (j, &(ctl, tgt)) in INPUTS.iter().enumerate() {
            let mut levels = [0usize; 2];
            levels[CONTROL_DOT] = ctl;
            levels[TARGET_DOT] = tgt;
            m[j][k] = s.amplitudes[system.basis.index(&levels, 0)];
        }
    }
    m
}

fn timing(sequence: &PulseSequence) -> Vec<TimingRow> {
    sequence
        .segments
        .iter()
        .zip(sequence.starts())
        .map(|(s, t0)| TimingRow {
            label: s.label.clone(),
            dot: s.dot,
            kind: s.kind,
            target_field: s.target_field,
            start_ns: t0,
            rise_ns: s.rise_time,
            plateau_ns: s.plateau_duration,
            post_delay_ns: s.post_delay,
            laser_on: s.laser_on,
            laser_phase: s.laser_phase,
        })
        .collect()
}

/// Propagate the four computational inputs (cavity empty) and score the result.
pub fn simulate_gate(
    system: &System,
    sequence: &PulseSequence,
    mode: GateMode,
    options: &GateOptions,
) -> Result<GateReport> {
    if system.basis.dots != 2 {
        return Err(Error::config("gate simulation needs two dots"));
    }
    let evo = EvolveOptions { dt_max: options.dt_max_ns, ..EvolveOptions::default() };
    let ideal = ideal_for(mode);
    let mut sequence = sequence.clone();

    let last = sequence.segments.len().checked_sub(1);
    let calibrate = mode == GateMode::Full
        && options.calibrate_rotation
        && last.is_some_and(|i| sequence.segments[i].kind == PulseKind::Laser);
    let (finals, steps, drift, smallest) = if calibrate {
        let i = last.expect("non-empty");
        let split = sequence.starts()[i] + sequence.segments[i].rise_time;
        let heads = INPUTS
            .par_iter()
            .map(|&inp| evolve_span(system, &initial(system, inp), &sequence, 0.0, split, &evo))
            .collect::<Result<Vec<_>>>()?;
        let end = sequence.duration();
        let tail = |seq: &PulseSequence| -> Result<Vec<_>> {
            heads.par_iter().map(|h| evolve_span(system, &h.state, seq, split, end, &evo)).collect()
        };
        let score = |phase: f64| -> Result<f64> {
            let mut seq = sequence.clone();
            seq.segments[i].laser_phase = phase;
            let states: Vec<_> = tail(&seq)?.into_iter().map(|e| e.state).collect();
            Ok(optimize_phases(&block_of(system, &states), &ideal).0)
        };
        let n = 24;
        let scan = (0..n).map(|k| score(2.0 * PI * k as f64 / n as f64)).collect::<Result<Vec<_>>>()?;
        let k_best = (0..n).max_by(|&a, &b| scan[a].total_cmp(&scan[b])).expect("non-empty");
        // Golden-section refinement around the best grid point.
        let width = 2.0 * PI / n as f64;
        let (mut a, mut b) = (width * (k_best as f64 - 1.0), width * (k_best as f64 + 1.0));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let (mut f1, mut f2) = (score(x1)?, score(x2)?);
        for _ in 0..40 {
            if f1 > f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = score(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = score(x2)?;
            }
        }
        sequence.segments[i].laser_phase = (0.5 * (a + b)).rem_euclid(2.0 * PI);
        let tails = tail(&sequence)?;
        let steps = heads.iter().chain(&tails).map(|e| e.steps).sum();
        let drift = heads.iter().zip(&tails).map(|(h, t)| h.norm_drift + t.norm_drift).fold(0.0, f64::max);
        let smallest = heads.iter().chain(&tails).map(|e| e.smallest_step).fold(f64::INFINITY, f64::min);
        (tails.into_iter().map(|e| e.state).collect::<Vec<_>>(), steps, drift, smallest)
    } else {
        let runs = INPUTS
            .par_iter()
            .map(|&inp| evolve(system, &initial(system, inp), &sequence, &evo))
            .collect::<Result<Vec<_>>>()?;
        let steps = runs.iter().map(|e| e.steps).sum();
        let drift = runs.iter().map(|e| e.norm_drift).fold(0.0, f64::max);
        let smallest = runs.iter().map(|e| e.smallest_step).fold(f64::INFINITY, f64::min);
        (runs.into_iter().map(|e| e.state).collect(), steps, drift, smallest)
    };
    score_gate(system, &sequence, mode, &ideal, &finals, steps, drift, smallest)
}

#[allow(clippy::too_many_arguments)]
fn score_gate(
    system: &System,
    sequence: &PulseSequence,
    mode: GateMode,
    ideal: &Block,
    finals: &[CompositeState],
    steps: usize,
    norm_drift: f64,
    smallest: f64,
) -> Result<GateReport> {
    let m = block_of(system, finals);
    let raw_fidelity = fidelity(&m, ideal);
    let (fid, phases) = optimize_phases(&m, ideal);
    let adjusted = phases.apply(&m);
    let global = C64::from_polar(1.0, -trace_overlap(&adjusted, ideal).arg());
    let mut phase_errors = [0.0; 4];
    let mut column_errors = [0.0; 4];
    let mut raw_phases = [0.0; 4];
    let mut column_leakage = [0.0; 4];
    for k in 0..4 {
        let j = (0..4).max_by(|&a, &b| ideal[a][k].norm().total_cmp(&ideal[b][k].norm())).expect("4 rows");
        phase_errors[k] = (adjusted[j][k] * global * ideal[j][k].conj()).arg();
        raw_phases[k] = m[j][k].arg();
        column_errors[k] = (0..4).map(|r| (adjusted[r][k] * global - ideal[r][k]).norm_sqr()).sum::<f64>().sqrt();
        column_leakage[k] = 1.0 - (0..4).map(|r| m[r][k].norm_sqr()).sum::<f64>();
    }
    let mut defect: f64 = 0.0;
    for a in 0..finals.len() {
        for b in 0..finals.len() {
            let expect = if a == b { 1.0 } else { 0.0 };
            defect = defect.max((finals[a].inner(&finals[b]) - c(expect)).norm());
        }
    }
    Ok(GateReport {
        mode,
        model: system.kind,
        fock_cutoff: system.basis.fock_cutoff,
        truth_table: m.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect(),
        raw_fidelity,
        fidelity: fid,
        phases,
        phase_errors,
        column_errors,
        raw_phases,
        leakage: column_leakage.iter().sum::<f64>() / 4.0,
        column_leakage,
        orthonormality_defect: defect,
        norm_drift,
        steps,
        smallest_step_ns: if smallest.is_finite() { smallest } else { 0.0 },
        duration_ns: sequence.duration(),
        timing: timing(sequence),
        warnings: sequence.warnings.clone(),
        block: m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub rise_time_ns: f64,
    pub error: f64,
    pub leakage: f64,
}

/// Kernel gate error 1 − F (phase optimised) against the rise time δt.
pub fn adiabaticity_scan(
    system: &System,
    points: &OperatingPoints,
    plan: &PlanOptions,
    rise_times: &[f64],
    options: &GateOptions,
) -> Result<Vec<ScanPoint>> {
    rise_times
        .iter()
        .map(|&dt| {
            let opts = PlanOptions { rise_time_ns: dt, mode: GateMode::Kernel, ..*plan };
            let seq = plan_cnot(&system.model, points, &opts)?;
            let r = simulate_gate(system, &seq, GateMode::Kernel, options)?;
            Ok(ScanPoint { rise_time_ns: dt, error: 1.0 - r.fidelity, leakage: r.leakage })
        })
        .collect()
}

/// Trajectory of one computational input: CSV with columns
/// `t_ns, p00, p01, p10, p11, p_photon` (p_ct with the cavity empty).
pub fn trajectory_csv(
    system: &System,
    sequence: &PulseSequence,
    input: (usize, usize),
    sample_interval_ns: f64,
    dt_max_ns: f64,
) -> Result<String> {
    let evo =
        EvolveOptions { dt_max: dt_max_ns, sample_interval: Some(sample_interval_ns), ..EvolveOptions::default() };
    let run = evolve(system, &initial(system, input), sequence, &evo)?;
    let rows = run.samples.iter().map(|s| {
        let mut row = vec![s.t];
        for &(ctl, tgt) in &INPUTS {
            let mut levels = [0usize; 2];
            levels[CONTROL_DOT] = ctl;
            levels[TARGET_DOT] = tgt;
            row.push(s.probabilities[system.basis.index(&levels, 0)]);
        }
        let photon: f64 =
            s.probabilities.iter().enumerate().filter(|(i, _)| system.basis.decode(*i).1 > 0).map(|(_, p)| p).sum();
        row.push(photon);
        row
    });
    Ok(csv(&["t_ns", "p00", "p01", "p10", "p11", "p_photon"], rows))
}
