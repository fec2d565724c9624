//! Run configuration.
//!
//! A single JSON document; every section and key is optional and defaults to
//! the reference device, unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cavity::{CavityMode, GateOptions, LaserDrive, Model, PlanOptions, RabiConvention};
use crate::electronic::{AxialGrid, QdGeometry};
use crate::error::{Error, Result};
use crate::phonon::{ApproxDotShape, PhononEnvironment, PhononTolerances};
use crate::report::content_hash;
use crate::stark::RootChoice;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub field_min_mv_per_m: f64,
    pub field_max_mv_per_m: f64,
    pub n_points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { field_min_mv_per_m: 0.0, field_max_mv_per_m: 2.5, n_points: 251 }
    }
}

/// Cavity section; a missing volume means the (λ/2)³ minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CavityConfig {
    pub photon_energy_mev: f64,
    pub refractive_index: f64,
    pub volume_um3: Option<f64>,
    pub fock_cutoff: usize,
}

impl Default for CavityConfig {
    fn default() -> Self {
        Self { photon_energy_mev: 11.5, refractive_index: 3.6, volume_um3: None, fock_cutoff: 2 }
    }
}

impl CavityConfig {
    pub fn mode(&self) -> CavityMode {
        let m = CavityMode::minimal(self.photon_energy_mev, self.refractive_index, self.fock_cutoff);
        match self.volume_um3 {
            Some(v) => m.with_volume(v),
            None => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhononSweep {
    pub e10_min_mev: f64,
    pub e10_max_mev: f64,
    pub n_points: usize,
}

impl Default for PhononSweep {
    fn default() -> Self {
        Self { e10_min_mev: 5.0, e10_max_mev: 25.0, n_points: 81 }
    }
}

impl PhononSweep {
    pub fn energies(&self) -> Vec<f64> {
        let n = self.n_points;
        (0..n).map(|i| self.e10_min_mev + (self.e10_max_mev - self.e10_min_mev) * i as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhononConfig {
    pub environment: PhononEnvironment,
    pub shape: ApproxDotShape,
    pub tolerances: PhononTolerances,
    /// E₁₀ used for τ; `null` takes E₁₀(e = 0) from the axial solver.
    pub e10_mev: Option<f64>,
    /// Optional τ(E₁₀) sweep written as CSV.
    pub sweep: Option<PhononSweep>,
}

impl Default for PhononConfig {
    fn default() -> Self {
        Self {
            environment: PhononEnvironment::gaas(),
            shape: ApproxDotShape::reference(),
            tolerances: PhononTolerances::default(),
            e10_mev: Some(12.25),
            sweep: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetConfig {
    /// E₁₀ for the initialisation budget; `null` takes E₁₀(e = 0) from the solver.
    pub e10_mev: Option<f64>,
    pub temperature_k: f64,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self { e10_mev: Some(10.0), temperature_k: 4.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateConfig {
    pub model: Model,
    pub plan: PlanOptions,
    pub simulation: GateOptions,
    /// Sample interval of the optional trajectory CSV, ns.
    pub trajectory_interval_ns: Option<f64>,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            model: Model::Full,
            plan: PlanOptions::default(),
            simulation: GateOptions::default(),
            trajectory_interval_ns: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub geometry: QdGeometry,
    pub grid: AxialGrid,
    pub sweep: SweepConfig,
    pub cavity: CavityConfig,
    pub laser: LaserDrive,
    pub rabi_convention: RabiConvention,
    pub root_choice: RootChoice,
    pub phonon: PhononConfig,
    pub gate: GateConfig,
    pub budgets: BudgetConfig,
    pub output_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: QdGeometry::reference(),
            grid: AxialGrid::default(),
            sweep: SweepConfig::default(),
            cavity: CavityConfig::default(),
            laser: LaserDrive::reference(),
            rabi_convention: RabiConvention::default(),
            root_choice: RootChoice::default(),
            phonon: PhononConfig::default(),
            gate: GateConfig::default(),
            budgets: BudgetConfig::default(),
            output_dir: "out".to_string(),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.grid.validate()?;
        let s = &self.sweep;
        if !(s.field_min_mv_per_m.is_finite() && s.field_max_mv_per_m.is_finite()) {
            return Err(Error::Config("sweep bounds must be finite".into()));
        }
        if s.field_max_mv_per_m <= s.field_min_mv_per_m {
            return Err(Error::Config(format!(
                "empty sweep range [{}, {}] MV/m",
                s.field_min_mv_per_m, s.field_max_mv_per_m
            )));
        }
        if s.n_points < 50 {
            return Err(Error::Config(format!("sweep needs at least 50 points, got {}", s.n_points)));
        }
        self.cavity.mode().validate()?;
        self.laser.validate()?;
        let p = &self.phonon;
        p.environment.validate()?;
        p.shape.validate()?;
        p.tolerances.validate()?;
        if let Some(e) = p.e10_mev {
            positive("phonon.e10_mev", e)?;
        }
        if let Some(w) = &p.sweep {
            positive("phonon.sweep.e10_min_mev", w.e10_min_mev)?;
            if !(w.e10_max_mev > w.e10_min_mev && w.e10_max_mev.is_finite()) || w.n_points < 2 {
                return Err(Error::Config("phonon sweep needs e10_max_mev > e10_min_mev and at least 2 points".into()));
            }
        }
        let g = &self.gate;
        positive("gate.plan.rise_time_ns", g.plan.rise_time_ns)?;
        if let Some(r) = g.plan.laser_ramp_ns {
            positive("gate.plan.laser_ramp_ns", r)?;
        }
        if !(g.plan.min_delay_ns >= 0.0 && g.plan.delay_budget_ns >= 0.0) {
            return Err(Error::Config("gate delays must be non-negative".into()));
        }
        if g.plan.fock_cutoff < 2 || g.plan.floquet_harmonics == 0 {
            return Err(Error::Config("gate.plan needs fock_cutoff ≥ 2 and floquet_harmonics ≥ 1".into()));
        }
        positive("gate.simulation.dt_max_ns", g.simulation.dt_max_ns)?;
        if let Some(t) = g.trajectory_interval_ns {
            positive("gate.trajectory_interval_ns", t)?;
        }
        if let Some(e) = self.budgets.e10_mev {
            positive("budgets.e10_mev", e)?;
        }
        if !(self.budgets.temperature_k >= 0.0 && self.budgets.temperature_k.is_finite()) {
            return Err(Error::Config("budgets.temperature_k must be non-negative".into()));
        }
        if self.output_dir.is_empty() {
            return Err(Error::Config("output_dir must not be empty".into()));
        }
        Ok(())
    }

    /// SHA-256 of the resolved configuration.
    pub fn hash(&self) -> String {
        content_hash(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_reference_device() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.cavity.mode(), CavityMode::reference());
        assert_eq!(c.phonon.e10_mev, Some(12.25));
    }

    #[test]
    fn round_trip_preserves_hash() {
        let c = RunConfig::default();
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back = RunConfig::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        let other = RunConfig { output_dir: "elsewhere".into(), ..c.clone() };
        assert_ne!(other.hash(), c.hash());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for text in [r#"{"bogus": 1}"#, r#"{"cavity": {"volume": 3}}"#, r#"{"gate": {"plan": {"rise": 1}}}"#] {
            assert!(matches!(RunConfig::from_json(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn range_checks() {
        for text in [
            r#"{"sweep": {"field_min_mv_per_m": 1.0, "field_max_mv_per_m": 1.0}}"#,
            r#"{"cavity": {"refractive_index": -3.6}}"#,
            r#"{"cavity": {"volume_um3": 1e-6}}"#,
            r#"{"phonon": {"environment": {"mass_density": 0, "sound_speed": 3700, "deformation_potential": 8.6}}}"#,
            r#"{"gate": {"plan": {"rise_time_ns": 0}}}"#,
            r#"{"budgets": {"temperature_k": -1}}"#,
            r#"{"grid": {"z_min_nm": 1, "z_max_nm": 0, "n_points": 100, "boundary_potential_mev": 300}}"#,
        ] {
            assert!(matches!(RunConfig::from_json(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn partial_sections_fill_in_defaults() {
        let c = RunConfig::from_json(r#"{"cavity": {"volume_um3": 5000.0}, "phonon": {"e10_mev": null}}"#).unwrap();
        assert_eq!(c.cavity.mode().volume_um3, 5000.0);
        assert_eq!(c.cavity.photon_energy_mev, 11.5);
        assert_eq!(c.phonon.e10_mev, None);
        let c = RunConfig::from_json(r#"{"laser": {"photon_energy_mev": 14}, "geometry": {"radius_nm": 12}}"#).unwrap();
        assert_eq!(c.laser.field_amplitude_kv_per_m, 30.7);
        assert_eq!(c.geometry.layers, QdGeometry::reference().layers);
    }

    #[test]
    fn phonon_sweep_grid() {
        let e = PhononSweep { e10_min_mev: 5.0, e10_max_mev: 25.0, n_points: 5 }.energies();
        assert_eq!(e, vec![5.0, 10.0, 15.0, 20.0, 25.0]);
    }
}
