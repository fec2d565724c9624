//! `qdthz`: command-line front end.
//!
//! Exit codes: 0 success, 2 configuration, 3 numerical failure, 4 I/O.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use qdthz::cavity::{trajectory_csv, Calibration, CouplingModel, OperatingCouplings};
use qdthz::config::PhononSweep;
use qdthz::electronic::axial_levels;
use qdthz::phonon::{relaxation_rate_with, summary, sweep_csv, tau_sweep};
use qdthz::report::{fmt_g6, to_json, write_file};
use qdthz::{
    budgets, couplings, operating_points, plan_cnot, radial_spectrum, simulate_gate, stark_map, ErrorClass, GateMode,
    Model, OperatingPoints, Result, RunConfig, StarkMap, System,
};

#[derive(Parser)]
#[command(name = "qdthz", version, about = "Quantum-dot qubit in a terahertz cavity")]
struct Cli {
    /// JSON run configuration; omitted keys take the reference values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV and report files (overrides `output_dir`).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Kernel,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Levels and dipoles against the applied field.
    StarkMap {
        #[arg(long)]
        field_min: Option<f64>,
        #[arg(long)]
        field_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Resonance fields e_c, e_l, e_lc and the couplings there.
    OperatingPoints,
    /// LA-phonon relaxation time.
    Phonon {
        /// E10 in meV.
        #[arg(long)]
        e10: Option<f64>,
        /// Also write the tau(E10) sweep CSV.
        #[arg(long)]
        sweep: bool,
    },
    /// Plan and simulate the CNOT or its controlled-phase kernel.
    Cnot {
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Diagonal plus active-process generator instead of the full one.
        #[arg(long)]
        effective_model: bool,
        /// Field rise time in ns.
        #[arg(long)]
        delta_t: Option<f64>,
        #[arg(long)]
        fock_cutoff: Option<usize>,
    },
    /// Initialisation and readout budgets.
    Budgets {
        #[arg(long)]
        temperature: Option<f64>,
        /// E10 in meV.
        #[arg(long)]
        e10: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Config => 2,
                ErrorClass::Numeric => 3,
                ErrorClass::Io => 4,
            })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.display().to_string();
    }
    match cli.command {
        Command::StarkMap { field_min, field_max, points } => {
            if let Some(v) = field_min {
                cfg.sweep.field_min_mv_per_m = v;
            }
            if let Some(v) = field_max {
                cfg.sweep.field_max_mv_per_m = v;
            }
            if let Some(v) = points {
                cfg.sweep.n_points = v;
            }
            cfg.validate()?;
            cmd_stark_map(&cfg)
        }
        Command::OperatingPoints => {
            cfg.validate()?;
            cmd_operating_points(&cfg)
        }
        Command::Phonon { e10, sweep } => {
            if e10.is_some() {
                cfg.phonon.e10_mev = e10;
            }
            if sweep && cfg.phonon.sweep.is_none() {
                cfg.phonon.sweep = Some(PhononSweep::default());
            }
            cfg.validate()?;
            cmd_phonon(&cfg)
        }
        Command::Cnot { mode, effective_model, delta_t, fock_cutoff } => {
            if let Some(m) = mode {
                cfg.gate.plan.mode = match m {
                    ModeArg::Kernel => GateMode::Kernel,
                    ModeArg::Full => GateMode::Full,
                };
            }
            if effective_model {
                cfg.gate.model = Model::Effective;
            }
            if cfg.gate.model == Model::Effective {
                // No laser dressing in the effective generator.
                cfg.gate.plan.calibration = Calibration::Bare;
            }
            if let Some(v) = delta_t {
                cfg.gate.plan.rise_time_ns = v;
            }
            if let Some(v) = fock_cutoff {
                cfg.cavity.fock_cutoff = v;
                cfg.gate.plan.fock_cutoff = v;
            }
            cfg.validate()?;
            cmd_cnot(&cfg)
        }
        Command::Budgets { temperature, e10 } => {
            if let Some(t) = temperature {
                cfg.budgets.temperature_k = t;
            }
            if e10.is_some() {
                cfg.budgets.e10_mev = e10;
            }
            cfg.validate()?;
            cmd_budgets(&cfg)
        }
    }
}

fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    Path::new(&cfg.output_dir).join(name)
}

/// Report file: command, resolved config, its hash and the result.
fn write_report(cfg: &RunConfig, command: &str, result: serde_json::Value) -> Result<PathBuf> {
    let doc = json!({
        "command": command,
        "config_hash": cfg.hash(),
        "config": cfg,
        "result": result,
    });
    let path = out_path(cfg, &format!("{}.json", command.replace('-', "_")));
    write_file(&path, &to_json(&doc))?;
    Ok(path)
}

fn map_of(cfg: &RunConfig) -> Result<StarkMap> {
    let s = &cfg.sweep;
    stark_map(&cfg.geometry, &cfg.grid, s.field_min_mv_per_m, s.field_max_mv_per_m, s.n_points)
}

fn points_of(cfg: &RunConfig, map: &StarkMap) -> Result<OperatingPoints> {
    operating_points(map, cfg.cavity.photon_energy_mev, cfg.laser.photon_energy_mev, cfg.root_choice)
}

fn table_of(cfg: &RunConfig, points: &OperatingPoints) -> Result<OperatingCouplings> {
    couplings(points, &cfg.cavity.mode(), &cfg.laser, cfg.rabi_convention)
}

/// E10 at zero field from the axial solver.
fn solver_e10(cfg: &RunConfig) -> Result<f64> {
    Ok(axial_levels(&cfg.geometry, &cfg.grid, 0.0, 2)?.transition(1, 0))
}

fn cmd_stark_map(cfg: &RunConfig) -> Result<()> {
    let map = map_of(cfg)?;
    let csv_path = out_path(cfg, "stark_map.csv");
    write_file(&csv_path, &map.to_csv())?;
    let radial = radial_spectrum(&cfg.geometry, 6);
    let p0 = map.points[0];
    println!(
        "e = {} MV/m: E10 {} meV  E20 {} meV  z01 {} nm  z12 {} nm",
        fmt_g6(p0.field),
        fmt_g6(p0.e10),
        fmt_g6(p0.e20),
        fmt_g6(p0.z01),
        fmt_g6(p0.z12)
    );
    println!("radial dE_r {} meV", fmt_g6(radial.delta_e_r_mev));
    for (a, b) in &map.flagged {
        println!("warning: level tracking weak on [{}, {}] MV/m", fmt_g6(*a), fmt_g6(*b));
    }
    let report = write_report(
        cfg,
        "stark-map",
        json!({
            "csv": csv_path.display().to_string(),
            "provenance": map.provenance,
            "anchor": p0,
            "radial": radial,
            "flagged": map.flagged,
        }),
    )?;
    println!("wrote {} and {}", csv_path.display(), report.display());
    Ok(())
}

fn cmd_operating_points(cfg: &RunConfig) -> Result<()> {
    let map = map_of(cfg)?;
    let points = points_of(cfg, &map)?;
    let table = table_of(cfg, &points)?;
    for (name, p, c) in
        [("e_c", &points.e_c, &table.e_c), ("e_l", &points.e_l, &table.e_l), ("e_lc", &points.e_lc, &table.e_lc)]
    {
        println!(
            "{name:<5} {} MV/m  E10 {} meV  E20 {} meV  z01 {} nm  z12 {} nm  g01 {} rad/ns  Omega01 {} rad/ns  Otilde {} rad/ns",
            fmt_g6(p.field),
            fmt_g6(p.e10),
            fmt_g6(p.e20),
            fmt_g6(p.z01),
            fmt_g6(p.z12),
            fmt_g6(c.g01),
            fmt_g6(c.ol01),
            fmt_g6(c.otilde)
        );
    }
    println!(
        "detunings at e_lc: E21 - hw_l {} meV, E21 - hw_c {} meV (ratio {})",
        fmt_g6(points.detuning_21_l_mev),
        fmt_g6(points.detuning_21_c_mev),
        fmt_g6(points.hierarchy_ratio)
    );
    if !points.hierarchy_holds() {
        println!("warning: |w21 - w_l| is not small against |w21 - w_c|");
    }
    println!("e_vac {} V/m", fmt_g6(table.e_vac_v_per_m));
    let report = write_report(cfg, "operating-points", json!({ "points": points, "couplings": table }))?;
    println!("wrote {}", report.display());
    Ok(())
}

fn cmd_phonon(cfg: &RunConfig) -> Result<()> {
    let p = &cfg.phonon;
    let e10 = match p.e10_mev {
        Some(e) => e,
        None => solver_e10(cfg)?,
    };
    let r = relaxation_rate_with(e10, &p.environment, &p.shape, &p.tolerances)?;
    println!("{}", summary(&r));
    let mut result = json!({ "relaxation": r });
    if let Some(sweep) = &p.sweep {
        let rows = tau_sweep(&sweep.energies(), &p.environment, &p.shape, &p.tolerances)?;
        let path = out_path(cfg, "phonon_sweep.csv");
        write_file(&path, &sweep_csv(&rows))?;
        result["sweep_csv"] = json!(path.display().to_string());
        println!("wrote {}", path.display());
    }
    let report = write_report(cfg, "phonon", result)?;
    println!("wrote {}", report.display());
    Ok(())
}

fn cmd_cnot(cfg: &RunConfig) -> Result<()> {
    let map = map_of(cfg)?;
    let points = points_of(cfg, &map)?;
    let model = CouplingModel::new(&map, cfg.cavity.mode(), cfg.laser, cfg.rabi_convention)?;
    let g = &cfg.gate;
    let seq = plan_cnot(&model, &points, &g.plan)?;
    for w in &seq.warnings {
        println!("warning: {w}");
    }
    let system = System::new(model, g.model, 2, cfg.cavity.fock_cutoff)?;
    let r = simulate_gate(&system, &seq, g.plan.mode, &g.simulation)?;
    println!("input   amplitude on ideal output   phase error (rad)");
    for (k, label) in ["|0,0>", "|0,1>", "|1,0>", "|1,1>"].iter().enumerate() {
        let j = match (g.plan.mode, k) {
            (GateMode::Full, 2) => 3,
            (GateMode::Full, 3) => 2,
            _ => k,
        };
        let a = r.amplitude(j, k);
        println!("{label}   {} {:+} i   {}", fmt_g6(a.re), fmt_g6(a.im), fmt_g6(r.phase_errors[k]));
    }
    println!(
        "fidelity {} (raw {})  leakage {}  norm drift {}  duration {} ns",
        fmt_g6(r.fidelity),
        fmt_g6(r.raw_fidelity),
        fmt_g6(r.leakage),
        fmt_g6(r.norm_drift),
        fmt_g6(r.duration_ns)
    );
    let mut result = json!({ "gate": r });
    if let Some(dt) = g.trajectory_interval_ns {
        // Sampled with the phases the simulation settled on.
        let mut traced = seq.clone();
        for (s, row) in traced.segments.iter_mut().zip(&r.timing) {
            s.laser_phase = row.laser_phase;
        }
        let path = out_path(cfg, "cnot_trajectory.csv");
        write_file(&path, &trajectory_csv(&system, &traced, (1, 1), dt, g.simulation.dt_max_ns)?)?;
        result["trajectory_csv"] = json!(path.display().to_string());
        println!("wrote {}", path.display());
    }
    let report = write_report(cfg, "cnot", result)?;
    println!("wrote {}", report.display());
    Ok(())
}

fn cmd_budgets(cfg: &RunConfig) -> Result<()> {
    let map = map_of(cfg)?;
    let points = points_of(cfg, &map)?;
    let table = table_of(cfg, &points)?;
    let e10 = match cfg.budgets.e10_mev {
        Some(e) => e,
        None => solver_e10(cfg)?,
    };
    let b = budgets(e10, table.e_c.g01, cfg.budgets.temperature_k)?;
    println!(
        "E10 {} meV: threshold {} K, occupation at {} K {}",
        fmt_g6(b.e10_mev),
        fmt_g6(b.threshold_temperature_k),
        fmt_g6(b.temperature_k),
        fmt_g6(b.thermal_occupation)
    );
    println!(
        "readout {} s^-1, bandwidth {} Hz, NEP {} W/Hz^1/2",
        fmt_g6(b.readout_rate_per_s),
        fmt_g6(b.required_bandwidth_hz),
        fmt_g6(b.nep_w_per_root_hz)
    );
    if b.thermal_occupation >= 1e-3 {
        println!("warning: thermal occupation is not negligible");
    }
    let report = write_report(cfg, "budgets", json!({ "budgets": b }))?;
    println!("wrote {}", report.display());
    Ok(())
}
