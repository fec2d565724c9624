//! Cavity QED of two dots sharing one terahertz mode: couplings, the
//! rotating-frame generator, pulse programs, propagation and gate scoring.

pub mod budgets;
pub mod couplings;
pub mod evolve;
pub mod floquet;
pub mod gate;
pub mod hamiltonian;
pub mod mode;
pub mod plan;
pub mod pulse;
#[cfg(test)]
pub(crate) mod testing;

pub use budgets::{budgets, Budgets};
pub use couplings::{
    couplings, two_photon_rate, CouplingModel, Couplings, LevelTable, OperatingCouplings, RabiConvention,
};
pub use evolve::{evolve, evolve_span, CompositeState, Evolution, EvolveOptions, Frame};
pub use floquet::{calibrate_two_photon, dressed_two_photon, DressedResonance};
pub use gate::{adiabaticity_scan, optimize_phases, simulate_gate, trajectory_csv, GateOptions, GateReport, ScanPoint};
pub use hamiltonian::{assemble_hamiltonian, Basis, Model, System};
pub use mode::{vacuum_field, CavityMode, LaserDrive};
pub use plan::{plan_cnot, Calibration, GateMode, PlanOptions};
pub use pulse::{DotControl, PulseKind, PulseSegment, PulseSequence};
