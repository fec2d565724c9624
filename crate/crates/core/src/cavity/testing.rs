//! Fixtures shared by the cavity tests.

use std::sync::OnceLock;

use super::{CavityMode, CouplingModel, LaserDrive, RabiConvention};
use crate::electronic::{AxialGrid, QdGeometry};
use crate::stark::{operating_points, stark_map, OperatingPoints, RootChoice, StarkMap, StarkPoint};

pub struct Coarse {
    pub map: StarkMap,
    pub points: OperatingPoints,
    pub model: CouplingModel,
}

/// Reference device on a 1024-point grid and 51 fields.
pub fn coarse() -> &'static Coarse {
    static C: OnceLock<Coarse> = OnceLock::new();
    C.get_or_init(|| {
        let map = stark_map(&QdGeometry::reference(), &AxialGrid::default().with_points(1024), 0.0, 2.5, 51).unwrap();
        let points = operating_points(&map, 11.5, 15.0, RootChoice::Highest).unwrap();
        let model =
            CouplingModel::new(&map, CavityMode::reference(), LaserDrive::reference(), RabiConvention::HalfAmplitude)
                .unwrap();
        Coarse { map, points, model }
    })
}

/// Field-independent levels on [0, 2] MV/m.
pub fn flat_map(e10: f64, e20: f64, z01: f64, z12: f64, z02: f64) -> StarkMap {
    let points = (0..5)
        .map(|i| StarkPoint {
            field: 0.5 * i as f64,
            e10,
            e20,
            z01,
            z12,
            z02,
            z_diag: [0.0; 3],
            order: [0, 1, 2],
            overlap: 1.0,
        })
        .collect();
    StarkMap {
        geometry: QdGeometry::reference(),
        grid: AxialGrid::default(),
        points,
        flagged: Vec::new(),
        provenance: String::new(),
    }
}

pub fn flat_model(e10: f64, e20: f64, z01: f64, z12: f64, z02: f64, laser_kv_per_m: f64) -> CouplingModel {
    let laser = LaserDrive { field_amplitude_kv_per_m: laser_kv_per_m, ..LaserDrive::reference() };
    CouplingModel::new(
        &flat_map(e10, e20, z01, z12, z02),
        CavityMode::reference(),
        laser,
        RabiConvention::HalfAmplitude,
    )
    .unwrap()
}
