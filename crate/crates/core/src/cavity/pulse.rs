//! Trapezoidal field pulses and the sequence container.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    /// Vacuum Rabi exchange with the cavity at e_c.
    Cavity,
    /// Laser rotation of |0⟩ ↔ |1⟩ at e_l.
    Laser,
    /// Laser plus cavity two-photon |0⟩ ↔ |2⟩ at e_lc.
    TwoPhoton,
}

/// One field pulse on one dot.
///
/// Time layout relative to the segment start: linear ramp 0 → `target_field`
/// over `rise_time`, plateau of `plateau_duration`, linear ramp back to 0,
/// then `post_delay` at zero field. When `laser_on`, the laser illuminates
/// the dot during the plateau only, switched with smooth sin² ramps of
/// `laser_ramp` (0 gives a square envelope).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSegment {
    pub label: String,
    pub dot: usize,
    pub kind: PulseKind,
    pub target_field: f64,
    pub plateau_duration: f64,
    pub rise_time: f64,
    pub laser_on: bool,
    pub laser_ramp: f64,
    /// Phase of the laser field during this segment, rad.
    pub laser_phase: f64,
    /// Plateau rate of the segment's resonant process (rad/ns), used by the
    /// effective model.
    pub rate: f64,
    pub post_delay: f64,
}

impl PulseSegment {
    pub fn duration(&self) -> f64 {
        2.0 * self.rise_time + self.plateau_duration + self.post_delay
    }

    fn validate(&self, dots: usize) -> Result<()> {
        if self.dot >= dots {
            return Err(Error::config(format!("segment '{}' addresses dot {} of {dots}", self.label, self.dot)));
        }
        if !(self.rise_time > 0.0 && self.rise_time.is_finite()) {
            return Err(Error::config(format!("segment '{}' needs a positive rise time", self.label)));
        }
        if !(self.plateau_duration >= 0.0 && self.post_delay >= 0.0 && self.target_field.is_finite()) {
            return Err(Error::config(format!("segment '{}' has a negative duration", self.label)));
        }
        if self.laser_on && !(self.laser_ramp >= 0.0 && 2.0 * self.laser_ramp <= self.plateau_duration) {
            return Err(Error::config(format!("segment '{}' laser ramps exceed the plateau", self.label)));
        }
        Ok(())
    }

    /// Field, field rate, laser envelope and process strength at local time τ.
    fn local(&self, tau: f64, hint: f64) -> (f64, f64, f64, f64) {
        let d = self.rise_time;
        let p = self.plateau_duration;
        let (field, rate) = if hint < d {
            (self.target_field * tau / d, self.target_field / d)
        } else if hint < d + p {
            (self.target_field, 0.0)
        } else if hint < 2.0 * d + p {
            (self.target_field * (2.0 * d + p - tau) / d, -self.target_field / d)
        } else {
            (0.0, 0.0)
        };
        let field = field.clamp(self.target_field.min(0.0), self.target_field.max(0.0));
        let laser = if self.laser_on && hint >= d && hint < d + p {
            let u = (tau - d).clamp(0.0, p);
            let lr = self.laser_ramp;
            if lr > 0.0 {
                let s = (u / lr).min((p - u) / lr).clamp(0.0, 1.0);
                (0.5 * std::f64::consts::PI * s).sin().powi(2)
            } else {
                1.0
            }
        } else {
            0.0
        };
        let strength = match self.kind {
            PulseKind::Cavity => {
                if self.target_field != 0.0 {
                    field / self.target_field
                } else if hint >= d && hint < d + p {
                    1.0
                } else {
                    0.0
                }
            }
            PulseKind::Laser | PulseKind::TwoPhoton => laser,
        };
        (field, rate, laser, strength)
    }

    fn breakpoints(&self, start: f64) -> Vec<f64> {
        let d = self.rise_time;
        let p = self.plateau_duration;
        let mut b = vec![start, start + d, start + d + p, start + 2.0 * d + p, start + self.duration()];
        if self.laser_on && self.laser_ramp > 0.0 {
            b.push(start + d + self.laser_ramp);
            b.push(start + d + p - self.laser_ramp);
        }
        b
    }
}

/// The process a dot is currently undergoing, for the effective model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveDrive {
    pub kind: PulseKind,
    pub rate: f64,
    /// Envelope in [0, 1]: field fraction for cavity pulses, laser envelope otherwise.
    pub strength: f64,
}

/// Instantaneous control values for one dot.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DotControl {
    pub field: f64,
    /// de/dt in MV/m per ns.
    pub field_rate: f64,
    /// Laser envelope in [0, 1].
    pub laser: f64,
    pub laser_phase: f64,
    pub active: Option<ActiveDrive>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseSequence {
    pub dots: usize,
    pub segments: Vec<PulseSegment>,
    pub warnings: Vec<String>,
}

impl PulseSequence {
    pub fn new(dots: usize, segments: Vec<PulseSegment>) -> Result<Self> {
        for s in &segments {
            s.validate(dots)?;
        }
        Ok(Self { dots, segments, warnings: Vec::new() })
    }

    pub fn empty(dots: usize) -> Self {
        Self { dots, segments: Vec::new(), warnings: Vec::new() }
    }

    pub fn starts(&self) -> Vec<f64> {
        let mut t = 0.0;
        self.segments
            .iter()
            .map(|s| {
                let start = t;
                t += s.duration();
                start
            })
            .collect()
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(PulseSegment::duration).sum()
    }

    /// Sorted times where some control has a kink or jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.segments.iter().zip(self.starts()).flat_map(|(s, t0)| s.breakpoints(t0)).collect();
        b.push(0.0);
        b.sort_by(f64::total_cmp);
        b.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1.0));
        b
    }

    /// Controls at `t`; `hint` selects the side of a discontinuity (use a
    /// time strictly inside the smooth piece containing `t`).
    pub fn controls_at(&self, t: f64, hint: f64) -> Vec<DotControl> {
        let mut controls = vec![DotControl::default(); self.dots];
        let mut start = 0.0;
        for s in &self.segments {
            let end = start + s.duration();
            if hint >= start && hint < end {
                let (field, field_rate, laser, strength) = s.local(t - start, hint - start);
                controls[s.dot] = DotControl {
                    field,
                    field_rate,
                    laser,
                    laser_phase: s.laser_phase,
                    active: Some(ActiveDrive { kind: s.kind, rate: s.rate, strength }),
                };
                break;
            }
            start = end;
        }
        controls
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(kind: PulseKind, laser_on: bool) -> PulseSegment {
        PulseSegment {
            label: "s".into(),
            dot: 1,
            kind,
            target_field: 1.0,
            plateau_duration: 2.0,
            rise_time: 0.5,
            laser_on,
            laser_ramp: if laser_on { 0.25 } else { 0.0 },
            laser_phase: 0.0,
            rate: 1.0,
            post_delay: 0.1,
        }
    }

    #[test]
    fn trapezoid_shape() {
        let q = PulseSequence::new(2, vec![seg(PulseKind::Cavity, false)]).unwrap();
        assert!((q.duration() - 3.1).abs() < 1e-15);
        let at = |t: f64| q.controls_at(t, t)[1];
        assert_eq!(at(0.25).field, 0.5);
        assert_eq!(at(0.25).field_rate, 2.0);
        assert_eq!(at(1.0).field, 1.0);
        assert!((at(2.75).field - 0.5).abs() < 1e-15);
        assert_eq!(at(3.05).field, 0.0);
        assert_eq!(at(1.0).laser, 0.0);
        assert_eq!(q.controls_at(1.0, 1.0)[0], DotControl::default());
        assert_eq!(q.breakpoints(), vec![0.0, 0.5, 2.5, 3.0, 3.1]);
    }

    #[test]
    fn laser_envelope_is_smooth_inside_plateau() {
        let q = PulseSequence::new(2, vec![seg(PulseKind::TwoPhoton, true)]).unwrap();
        let at = |t: f64| q.controls_at(t, t)[1];
        assert_eq!(at(0.4).laser, 0.0);
        assert!((at(0.625).laser - 0.5).abs() < 1e-12);
        assert_eq!(at(1.5).laser, 1.0);
        assert_eq!(at(1.5).active.unwrap().strength, 1.0);
        assert_eq!(q.breakpoints().len(), 7);
    }

    #[test]
    fn malformed_segments_are_rejected() {
        let mut s = seg(PulseKind::Cavity, false);
        s.rise_time = 0.0;
        assert!(PulseSequence::new(2, vec![s]).is_err());
        let mut s = seg(PulseKind::TwoPhoton, true);
        s.laser_ramp = 1.5;
        assert!(PulseSequence::new(2, vec![s]).is_err());
        assert!(PulseSequence::new(1, vec![seg(PulseKind::Cavity, false)]).is_err());
    }
}
