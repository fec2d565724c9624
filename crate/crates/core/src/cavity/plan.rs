//! CNOT pulse program.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::couplings::CouplingModel;
use super::floquet::{calibrate_two_photon, DEFAULT_HARMONICS};
use super::pulse::{PulseKind, PulseSegment, PulseSequence};
use crate::error::{Error, Result};
use crate::stark::OperatingPoints;
use crate::units::HBAR_MEV_NS;

pub const CONTROL_DOT: usize = 0;
pub const TARGET_DOT: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateMode {
    /// Controlled-phase kernel: control π, target 2π, control π.
    #[default]
    Kernel,
    /// Kernel wrapped in target π/2 and 3π/2 laser rotations.
    Full,
}

/// How the two-photon plateau is tuned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Calibration {
    /// Bare resonance E20 = ħω_l + ħω_c and the perturbative two-photon rate.
    Bare,
    /// Laser-dressed resonance and rate from the Floquet spectrum.
    #[default]
    Dressed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlanOptions {
    pub mode: GateMode,
    /// Field rise and fall time δt, ns.
    pub rise_time_ns: f64,
    pub calibration: Calibration,
    /// Laser switching ramp of the two-photon pulse, ns; `None` uses δt.
    pub laser_ramp_ns: Option<f64>,
    pub floquet_harmonics: usize,
    pub min_delay_ns: f64,
    /// Longest delay the phase rule may insert after a segment, ns.
    pub delay_budget_ns: f64,
    /// Photon cutoff used by the dressed calibration.
    pub fock_cutoff: usize,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            mode: GateMode::Kernel,
            rise_time_ns: 0.01,
            calibration: Calibration::Dressed,
            laser_ramp_ns: None,
            floquet_harmonics: DEFAULT_HARMONICS,
            min_delay_ns: 0.0,
            delay_budget_ns: 1.0,
            fock_cutoff: 2,
        }
    }
}

/// Newton refinement of a resonance on the interpolated levels.
fn reroot(f: impl Fn(f64) -> Result<(f64, f64)>, mut e: f64) -> Result<f64> {
    for _ in 0..50 {
        let (v, dv) = f(e)?;
        if dv == 0.0 {
            break;
        }
        let next = e - v / dv;
        if (next - e).abs() < 1e-14 {
            return Ok(next);
        }
        e = next;
    }
    Ok(e)
}

/// Plan the CNOT (or its kernel) on dots 0 (control) and 1 (target).
pub fn plan_cnot(model: &CouplingModel, points: &OperatingPoints, options: &PlanOptions) -> Result<PulseSequence> {
    let dt = options.rise_time_ns;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::config("rise time must be positive"));
    }
    let wc = model.cavity.photon_energy_mev;
    let wl = model.laser.photon_energy_mev;
    let levels = &model.levels;
    let e10 = |e: f64| -> Result<(f64, f64)> { Ok((levels.at(e)?.e10, levels.slopes(e).0)) };
    let e_c = reroot(|e| e10(e).map(|(v, d)| (v - wc, d)), points.e_c.field)?;
    let e_l = reroot(|e| e10(e).map(|(v, d)| (v - wl, d)), points.e_l.field)?;
    let e_lc_bare = reroot(|e| Ok((levels.at(e)?.e20 - wc - wl, levels.slopes(e).1)), points.e_lc.field)?;

    let c = model.couplings_at(e_c)?;
    let l = model.couplings_at(e_l)?;
    let (e_lc, otilde) = match options.calibration {
        Calibration::Bare => (e_lc_bare, model.couplings_at(e_lc_bare)?.otilde),
        Calibration::Dressed => {
            let r = calibrate_two_photon(model, e_lc_bare, options.fock_cutoff, options.floquet_harmonics)?;
            (r.field, r.rate)
        }
    };
    let laser_ramp = options.laser_ramp_ns.unwrap_or(dt);

    let seg = |label: &str, dot, kind, field, plateau: f64, laser_on, ramp, rate| PulseSegment {
        label: label.to_string(),
        dot,
        kind,
        target_field: field,
        plateau_duration: plateau,
        rise_time: dt,
        laser_on,
        laser_ramp: ramp,
        laser_phase: 0.0,
        rate,
        post_delay: 0.0,
    };
    let rotation = |label: &str, angle: f64| {
        seg(label, TARGET_DOT, PulseKind::Laser, e_l, l.laser_rotation_time(angle), true, 0.0, l.ol01)
    };
    let mut segments = Vec::new();
    if options.mode == GateMode::Full {
        segments.push(rotation("target pi/2", PI / 2.0));
    }
    let control_pi = seg("control pi", CONTROL_DOT, PulseKind::Cavity, e_c, c.cavity_pi_time(), false, 0.0, c.g01);
    segments.push(control_pi.clone());
    // The sin² laser ramps carry half their length in area.
    segments.push(seg(
        "target 2pi",
        TARGET_DOT,
        PulseKind::TwoPhoton,
        e_lc,
        PI / otilde + laser_ramp,
        true,
        laser_ramp,
        otilde,
    ));
    segments.push(PulseSegment { label: "control pi (return)".into(), ..control_pi });
    if options.mode == GateMode::Full {
        segments.push(rotation("target 3pi/2", 3.0 * PI / 2.0));
    }

    // Phase rule: each segment ends on a multiple of the idle |1⟩ period at e = 0.
    let idle = model.local(0.0)?.delta1;
    let mut warnings = Vec::new();
    let mut t = 0.0;
    for s in segments.iter_mut() {
        t += s.duration();
        let mut delay = options.min_delay_ns;
        if idle != 0.0 {
            let period = 2.0 * PI / idle.abs();
            let extra = (period - (t + delay).rem_euclid(period)) % period;
            if extra <= options.delay_budget_ns {
                delay += extra;
            } else {
                let residual = (idle * (t + delay)).rem_euclid(2.0 * PI);
                warnings.push(format!("{}: idle phase residual {residual:.4} rad exceeds the delay budget", s.label));
            }
        }
        s.post_delay = delay;
        t += delay;
    }

    let hbar_over_e10 = HBAR_MEV_NS / levels.at(0.0)?.e10;
    if dt < 10.0 * hbar_over_e10 {
        warnings.push(format!("rise time {dt:.3e} ns is not long against ħ/E10 = {hbar_over_e10:.3e} ns"));
    }
    let fastest =
        [c.g01, otilde, if options.mode == GateMode::Full { l.ol01 } else { 0.0 }].into_iter().fold(0.0, f64::max);
    let shortest_period = 2.0 * PI / fastest;
    if dt > 0.1 * shortest_period {
        warnings.push(format!("rise time {dt:.3e} ns is not short against the Rabi period {shortest_period:.3e} ns"));
    }
    let mut seq = PulseSequence::new(2, segments)?;
    seq.warnings = warnings;
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::testing::coarse;

    fn bare(mode: GateMode) -> PlanOptions {
        PlanOptions { mode, calibration: Calibration::Bare, ..PlanOptions::default() }
    }

    #[test]
    fn kernel_and_full_layouts() {
        let c = coarse();
        let k = plan_cnot(&c.model, &c.points, &bare(GateMode::Kernel)).unwrap();
        let kinds: Vec<_> = k.segments.iter().map(|s| (s.dot, s.kind)).collect();
        assert_eq!(
            kinds,
            vec![
                (CONTROL_DOT, PulseKind::Cavity),
                (TARGET_DOT, PulseKind::TwoPhoton),
                (CONTROL_DOT, PulseKind::Cavity)
            ]
        );
        let f = plan_cnot(&c.model, &c.points, &bare(GateMode::Full)).unwrap();
        assert_eq!(f.segments.len(), 5);
        assert_eq!(f.segments[0].kind, PulseKind::Laser);
        assert_eq!(f.segments[4].kind, PulseKind::Laser);
        let (a, b) = (&f.segments[0], &f.segments[4]);
        assert!((b.plateau_duration / a.plateau_duration - 3.0).abs() < 1e-12);
    }

    #[test]
    fn plateaus_match_the_couplings() {
        let c = coarse();
        let q = plan_cnot(&c.model, &c.points, &bare(GateMode::Kernel)).unwrap();
        let cav = c.model.couplings_at(q.segments[0].target_field).unwrap();
        assert!((q.segments[0].plateau_duration - cav.cavity_pi_time()).abs() < 1e-12);
        assert!((c.model.levels.at(q.segments[0].target_field).unwrap().e10 - 11.5).abs() < 1e-9);
        let tp = &q.segments[1];
        let otilde = c.model.couplings_at(tp.target_field).unwrap().otilde;
        assert!((tp.plateau_duration - PI / otilde - tp.laser_ramp).abs() < 1e-9);
        assert_eq!(q.segments[2].target_field, q.segments[0].target_field);
    }

    #[test]
    fn segments_end_on_idle_periods() {
        let c = coarse();
        let q = plan_cnot(&c.model, &c.points, &bare(GateMode::Full)).unwrap();
        let period = 2.0 * PI / c.model.local(0.0).unwrap().delta1.abs();
        for (s, t0) in q.segments.iter().zip(q.starts()) {
            let end = (t0 + s.duration()) / period;
            assert!((end - end.round()).abs() < 1e-9, "{}: {end}", s.label);
            assert!(s.post_delay <= 1.0);
        }
    }

    #[test]
    fn rise_time_warnings_and_errors() {
        let c = coarse();
        let fast =
            plan_cnot(&c.model, &c.points, &PlanOptions { rise_time_ns: 1e-5, ..bare(GateMode::Kernel) }).unwrap();
        assert!(fast.warnings.iter().any(|w| w.contains("ħ/E10")));
        let slow =
            plan_cnot(&c.model, &c.points, &PlanOptions { rise_time_ns: 2.0, ..bare(GateMode::Kernel) }).unwrap();
        assert!(slow.warnings.iter().any(|w| w.contains("Rabi period")));
        let ok = plan_cnot(&c.model, &c.points, &bare(GateMode::Kernel)).unwrap();
        assert!(ok.warnings.is_empty(), "{:?}", ok.warnings);
        for dt in [0.0, -1.0, f64::NAN] {
            let r = plan_cnot(&c.model, &c.points, &PlanOptions { rise_time_ns: dt, ..bare(GateMode::Kernel) });
            assert!(matches!(r, Err(Error::Config(_))));
        }
    }
}
