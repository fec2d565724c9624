//! Shared fixtures for the benchmarks.

use qdthz::{AxialGrid, QdGeometry};

/// Reference dot on a grid of `n_points`.
pub fn reference_setup(n_points: usize) -> (QdGeometry, AxialGrid) {
    (QdGeometry::reference(), AxialGrid::default().with_points(n_points))
}
