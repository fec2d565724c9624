//! Numerical model of a gated triple-well quantum-dot qubit coupled to a
//! terahertz cavity.
//!
//! The crate is organised bottom-up:
//!
//! * [`electronic`] solves the axial and radial single-electron problems of one
//!   dot under an applied field and evaluates dipole matrix elements.
//! * [`stark`] sweeps the field, tracks level character and locates the
//!   operating fields where the dot resonates with the cavity, the laser and
//!   their sum.
//! * [`cavity`] turns those numbers into coupling rates, plans the CNOT pulse
//!   program, propagates the two-dot plus cavity state and scores the gate.
//! * [`phonon`] evaluates the zero-temperature LA-phonon emission time.
//! * [`config`] and [`report`] hold the run configuration and the deterministic
//!   CSV/JSON writers used by the command-line front end.
//!
//! Internal units: meV, nm, MV/m, ns. Angular rates are rad/ns.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod cavity;
pub mod config;
pub mod electronic;
pub mod error;
pub mod phonon;
pub mod quadrature;
pub mod report;
pub mod spline;
pub mod stark;
pub mod tridiag;
pub mod units;

pub use cavity::{
    budgets, couplings, plan_cnot, simulate_gate, vacuum_field, Budgets, CavityMode, CompositeState, CouplingModel,
    Couplings, GateMode, GateOptions, GateReport, LaserDrive, Model, PlanOptions, PulseKind, PulseSegment,
    PulseSequence, System,
};
pub use config::RunConfig;
pub use electronic::{
    build_potential, dipole_z, radial_spectrum, solve_axial, AxialGrid, AxialSpectrum, Layer, Potential, QdGeometry,
    RadialSpectrum,
};
pub use error::{Error, ErrorClass, Result};
pub use phonon::{relaxation_rate, ApproxDotShape, PhononEnvironment, PhononTolerances, Relaxation};
pub use stark::{find_resonance_field, operating_points, stark_map, OperatingPoints, RootChoice, StarkMap, Transition};
