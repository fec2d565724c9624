//! Single-electron structure of one triple-well dot.
//!
//! The axial problem is discretised with second-order central differences on
//! a uniform grid (hard walls at the grid ends) and solved as a symmetric
//! tridiagonal eigenproblem. The radial problem uses the analytic Bessel-zero
//! spectrum of an infinitely deep cylinder.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bessel;
use crate::error::{Error, Result};
use crate::report::fmt_g6;
use crate::tridiag::SymTridiag;
use crate::units::HBAR2_OVER_2ME;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub thickness_nm: f64,
    pub potential_mev: f64,
}

impl Layer {
    pub const fn new(thickness_nm: f64, potential_mev: f64) -> Self {
        Self { thickness_nm, potential_mev }
    }
}

/// Axial layer stack plus radial size and effective mass of one dot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QdGeometry {
    pub layers: Vec<Layer>,
    pub radius_nm: f64,
    pub effective_mass_ratio: f64,
}

impl Default for QdGeometry {
    fn default() -> Self {
        Self::reference()
    }
}

impl QdGeometry {
    /// 10 / 2 / 17 / 2 / 10 nm stack with 65 meV barriers, a = 13 nm, m* = m_e/15.
    pub fn reference() -> Self {
        Self {
            layers: vec![
                Layer::new(10.0, 0.0),
                Layer::new(2.0, 65.0),
                Layer::new(17.0, 0.0),
                Layer::new(2.0, 65.0),
                Layer::new(10.0, 0.0),
            ],
            radius_nm: 13.0,
            effective_mass_ratio: 1.0 / 15.0,
        }
    }

    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness_nm).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::config("geometry needs at least one layer"));
        }
        for (i, l) in self.layers.iter().enumerate() {
            if !(l.thickness_nm.is_finite() && l.thickness_nm > 0.0) {
                return Err(Error::config(format!("layer {i}: thickness must be positive and finite")));
            }
            if !l.potential_mev.is_finite() {
                return Err(Error::config(format!("layer {i}: potential must be finite")));
            }
        }
        if !(self.radius_nm.is_finite() && self.radius_nm > 0.0) {
            return Err(Error::config("radius_nm must be positive and finite"));
        }
        let m = self.effective_mass_ratio;
        if !(m.is_finite() && m > 0.0 && m <= 1.0) {
            return Err(Error::config("effective_mass_ratio must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn is_mirror_symmetric(&self) -> bool {
        let n = self.layers.len();
        (0..n / 2).all(|i| self.layers[i] == self.layers[n - 1 - i])
    }

    /// ħ²/(2m*) in meV·nm².
    pub fn kinetic_scale(&self) -> f64 {
        HBAR2_OVER_2ME / self.effective_mass_ratio
    }

    /// Mean of the stack potential over `[lo, hi]`, with `outside` beyond the stack.
    fn mean_potential(&self, lo: f64, hi: f64, outside: f64) -> f64 {
        let half = 0.5 * self.total_thickness();
        let overlap = |a: f64, b: f64| (hi.min(b) - lo.max(a)).max(0.0);
        let mut acc = outside * (overlap(f64::NEG_INFINITY, -half) + overlap(half, f64::INFINITY));
        let mut start = -half;
        for l in &self.layers {
            let end = start + l.thickness_nm;
            acc += l.potential_mev * overlap(start, end);
            start = end;
        }
        acc / (hi - lo)
    }
}

/// Uniform axial grid; the wavefunction vanishes at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AxialGrid {
    pub z_min_nm: f64,
    pub z_max_nm: f64,
    pub n_points: usize,
    /// Potential between the stack and the hard walls.
    pub boundary_potential_mev: f64,
}

impl Default for AxialGrid {
    fn default() -> Self {
        Self::around(&QdGeometry::reference(), 20.0, 4096, 300.0)
    }
}

impl AxialGrid {
    /// Symmetric grid with `padding_nm` of outer barrier on each side of the stack.
    pub fn around(geometry: &QdGeometry, padding_nm: f64, n_points: usize, boundary_potential_mev: f64) -> Self {
        let half = 0.5 * geometry.total_thickness() + padding_nm;
        Self { z_min_nm: -half, z_max_nm: half, n_points, boundary_potential_mev }
    }

    pub fn with_points(mut self, n_points: usize) -> Self {
        self.n_points = n_points;
        self
    }

    pub fn spacing(&self) -> f64 {
        (self.z_max_nm - self.z_min_nm) / (self.n_points - 1) as f64
    }

    /// Grid abscissae; on a symmetric grid `z[i] == -z[n-1-i]` exactly.
    pub fn points(&self) -> Vec<f64> {
        let n = self.n_points;
        let h = self.spacing();
        let center = 0.5 * (self.z_min_nm + self.z_max_nm);
        (0..n).map(|i| center + (2.0 * i as f64 - (n - 1) as f64) * (0.5 * h)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 16 {
            return Err(Error::config("grid needs at least 16 points"));
        }
        if !(self.z_min_nm.is_finite() && self.z_max_nm.is_finite() && self.z_max_nm > self.z_min_nm) {
            return Err(Error::config("grid bounds must be finite with z_max > z_min"));
        }
        if !self.boundary_potential_mev.is_finite() {
            return Err(Error::config("boundary potential must be finite"));
        }
        Ok(())
    }
}

/// Sampled axial potential V(z) in meV.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub field_mv_per_m: f64,
    pub z_nm: Vec<f64>,
    pub v_mev: Vec<f64>,
    pub spacing_nm: f64,
}

/// Sample the stack potential plus the Stark term on `grid`.
///
/// Each sample is the cell average of the stack profile, so layer interfaces
/// need not fall on grid points. A positive field lowers the potential at
/// positive z: `V(z) = V_stack(z) - field·z` (1 MV/m·nm = 1 meV).
pub fn build_potential(geometry: &QdGeometry, field_mv_per_m: f64, grid: &AxialGrid) -> Result<Potential> {
    geometry.validate()?;
    grid.validate()?;
    if !field_mv_per_m.is_finite() {
        return Err(Error::config("field must be finite"));
    }
    let half = 0.5 * geometry.total_thickness();
    if grid.z_min_nm > -half || grid.z_max_nm < half {
        return Err(Error::config(format!(
            "grid [{}, {}] nm narrower than the {} nm stack",
            grid.z_min_nm,
            grid.z_max_nm,
            2.0 * half
        )));
    }
    let h = grid.spacing();
    let z = grid.points();
    let v = z
        .iter()
        .map(|&zi| {
            geometry.mean_potential(zi - 0.5 * h, zi + 0.5 * h, grid.boundary_potential_mev) - field_mv_per_m * zi
        })
        .collect();
    Ok(Potential { field_mv_per_m, z_nm: z, v_mev: v, spacing_nm: h })
}

/// Lowest axial levels of one dot at one field.
#[derive(Debug, Clone, PartialEq)]
pub struct AxialSpectrum {
    pub field_mv_per_m: f64,
    /// Ascending, meV.
    pub energies: Vec<f64>,
    /// Real samples on `z_nm`, unit norm under the trapezoid rule. The sign of
    /// each function is fixed so that its leftmost significant lobe is positive.
    pub wavefunctions: Vec<Vec<f64>>,
    pub z_nm: Vec<f64>,
    pub spacing_nm: f64,
}

impl AxialSpectrum {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn transition(&self, upper: usize, lower: usize) -> f64 {
        self.energies[upper] - self.energies[lower]
    }

    fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        // Trapezoid rule; the end samples are the hard walls and vanish.
        let n = self.z_nm.len();
        let mut s = 0.5 * (f(0) + f(n - 1));
        for i in 1..n - 1 {
            s += f(i);
        }
        s * self.spacing_nm
    }

    pub fn overlap(&self, i: usize, other: &AxialSpectrum, j: usize) -> f64 {
        let a = &self.wavefunctions[i];
        let b = &other.wavefunctions[j];
        self.integrate(|k| a[k] * b[k])
    }

    pub fn norm_squared(&self, i: usize) -> f64 {
        let psi = &self.wavefunctions[i];
        self.integrate(|k| psi[k] * psi[k])
    }

    /// ⟨i|z²|i⟩ in nm².
    pub fn z2(&self, i: usize) -> f64 {
        let psi = &self.wavefunctions[i];
        self.integrate(|k| psi[k] * psi[k] * self.z_nm[k] * self.z_nm[k])
    }

    /// Sign changes of level `i`, ignoring samples in the far tails.
    pub fn node_count(&self, i: usize) -> usize {
        let psi = &self.wavefunctions[i];
        let peak = psi.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut last = 0.0_f64;
        let mut nodes = 0;
        for &v in psi {
            if v.abs() < 1e-6 * peak {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                nodes += 1;
            }
            last = v;
        }
        nodes
    }

    /// `1 - |⟨ψ_i(z)|ψ_i(-z)⟩|` and the parity sign; only meaningful on a grid
    /// symmetric about z = 0.
    pub fn parity_defect(&self, i: usize) -> (f64, f64) {
        let psi = &self.wavefunctions[i];
        let n = psi.len();
        let o = self.integrate(|k| psi[k] * psi[n - 1 - k]);
        (1.0 - o.abs(), o.signum())
    }

    /// CSV with columns `z_nm, V_meV, psi0 …` (first four levels at most).
    pub fn to_csv(&self, potential: &Potential) -> String {
        let k = self.len().min(4);
        let mut out = String::from("z_nm,V_meV");
        for i in 0..k {
            let _ = write!(out, ",psi{i}");
        }
        out.push('\n');
        for (idx, z) in self.z_nm.iter().enumerate() {
            let _ = write!(out, "{},{}", fmt_g6(*z), fmt_g6(potential.v_mev[idx]));
            for i in 0..k {
                let _ = write!(out, ",{}", fmt_g6(self.wavefunctions[i][idx]));
            }
            out.push('\n');
        }
        out
    }
}

/// Lowest `k` eigenpairs of `-(ħ²/2m*) d²/dz² + V(z)` with hard walls.
pub fn solve_axial(potential: &Potential, effective_mass_ratio: f64, k: usize) -> Result<AxialSpectrum> {
    if k < 3 {
        return Err(Error::config("at least three axial levels are required"));
    }
    if !(effective_mass_ratio > 0.0 && effective_mass_ratio <= 1.0) {
        return Err(Error::config("effective_mass_ratio must lie in (0, 1]"));
    }
    let n = potential.z_nm.len();
    let h = potential.spacing_nm;
    let t = HBAR2_OVER_2ME / effective_mass_ratio / (h * h);
    let interior = n - 2;
    let diag: Vec<f64> = potential.v_mev[1..n - 1].iter().map(|v| 2.0 * t + v).collect();
    let off = vec![-t; interior - 1];
    let (energies, vectors) = SymTridiag::new(diag, off).lowest(k)?;
    let scale = 1.0 / h.sqrt();
    let wavefunctions = vectors
        .into_iter()
        .map(|x| {
            let mut psi = Vec::with_capacity(n);
            psi.push(0.0);
            psi.extend(x.iter().map(|v| v * scale));
            psi.push(0.0);
            let peak = psi.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let lead = psi.iter().find(|v| v.abs() > 1e-3 * peak).copied().unwrap_or(1.0);
            if lead < 0.0 {
                psi.iter_mut().for_each(|v| *v = -*v);
            }
            psi
        })
        .collect();
    Ok(AxialSpectrum {
        field_mv_per_m: potential.field_mv_per_m,
        energies,
        wavefunctions,
        z_nm: potential.z_nm.clone(),
        spacing_nm: h,
    })
}

/// z_ij = ∫ ψ_i z ψ_j dz in nm.
pub fn dipole_z(spectrum: &AxialSpectrum, i: usize, j: usize) -> Result<f64> {
    let k = spectrum.len();
    if i >= k || j >= k {
        return Err(Error::config(format!("level index ({i}, {j}) out of range for {k} levels")));
    }
    let a = &spectrum.wavefunctions[i];
    let b = &spectrum.wavefunctions[j];
    Ok(spectrum.integrate(|n| a[n] * spectrum.z_nm[n] * b[n]))
}

/// Convenience: potential + solve in one call.
pub fn axial_levels(geometry: &QdGeometry, grid: &AxialGrid, field: f64, k: usize) -> Result<AxialSpectrum> {
    let pot = build_potential(geometry, field, grid)?;
    solve_axial(&pot, geometry.effective_mass_ratio, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialLevel {
    /// Radial quantum number (1-based zero index).
    pub l: u32,
    /// |azimuthal| quantum number.
    pub m: u32,
    pub degeneracy: u32,
    pub bessel_zero: f64,
    pub energy_mev: f64,
}

/// Levels of an infinite cylindrical wall of radius a.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSpectrum {
    pub levels: Vec<RadialLevel>,
    /// First excited minus ground level.
    pub delta_e_r_mev: f64,
}

impl RadialSpectrum {
    /// Whether ΔE_r exceeds `ceiling_mev` (e.g. ħω_l + ħω_c).
    pub fn clears(&self, ceiling_mev: f64) -> bool {
        self.delta_e_r_mev > ceiling_mev
    }
}

/// E = ħ² x_{m,l}² / (2 m* a²), sorted ascending.
pub fn radial_spectrum(geometry: &QdGeometry, n_levels: usize) -> RadialSpectrum {
    let n_levels = n_levels.max(2);
    let scale = geometry.kinetic_scale() / (geometry.radius_nm * geometry.radius_nm);
    let mut levels = Vec::new();
    // Enough (m, l) pairs that the lowest n_levels are certainly present.
    for m in 0..n_levels as u32 {
        for (idx, x) in bessel::zeros(m, n_levels).into_iter().enumerate() {
            levels.push(RadialLevel {
                l: idx as u32 + 1,
                m,
                degeneracy: if m == 0 { 1 } else { 2 },
                bessel_zero: x,
                energy_mev: scale * x * x,
            });
        }
    }
    levels.sort_by(|a, b| a.energy_mev.total_cmp(&b.energy_mev));
    levels.truncate(n_levels);
    let delta_e_r_mev = levels[1].energy_mev - levels[0].energy_mev;
    RadialSpectrum { levels, delta_e_r_mev }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> (QdGeometry, AxialGrid) {
        (QdGeometry::reference(), AxialGrid::default())
    }

    #[test]
    fn reference_geometry_invariants() {
        let g = QdGeometry::reference();
        assert_eq!(g.total_thickness(), 41.0);
        assert!(g.is_mirror_symmetric());
        g.validate().unwrap();
    }

    #[test]
    fn potential_values_and_symmetry() {
        let (g, grid) = reference();
        let p = build_potential(&g, 0.0, &grid).unwrap();
        let n = p.z_nm.len();
        for (z, v) in p.z_nm.iter().zip(&p.v_mev) {
            if z.abs() < 8.0 {
                assert_eq!(*v, 0.0);
            }
            if (z.abs() - 9.5).abs() < 0.8 {
                assert!((v - 65.0).abs() < 1e-12);
            }
            if (z.abs() - 15.5).abs() < 4.5 {
                assert_eq!(*v, 0.0);
            }
            if z.abs() > 21.0 {
                assert!((v - 300.0).abs() < 1e-12);
            }
        }
        for i in 0..n {
            assert_eq!(p.v_mev[i], p.v_mev[n - 1 - i]);
        }
    }

    #[test]
    fn stark_term_is_linear() {
        let (g, grid) = reference();
        let p0 = build_potential(&g, 0.0, &grid).unwrap();
        let p1 = build_potential(&g, 1.0, &grid).unwrap();
        let (i, j) = (1000, 2500);
        let d = (p1.v_mev[j] - p1.v_mev[i]) - (p0.v_mev[j] - p0.v_mev[i]);
        let dz = p0.z_nm[j] - p0.z_nm[i];
        // 1 meV per nm, lowering the potential at positive z.
        assert!((d + dz).abs() < 1e-10);
    }

    #[test]
    fn narrow_grid_is_a_config_error() {
        let g = QdGeometry::reference();
        let grid = AxialGrid { z_min_nm: -10.0, z_max_nm: 10.0, n_points: 500, boundary_potential_mev: 300.0 };
        assert!(matches!(build_potential(&g, 0.0, &grid), Err(Error::Config(_))));
    }

    #[test]
    fn square_well_ratio() {
        let g = QdGeometry { layers: vec![Layer::new(40.0, 0.0)], radius_nm: 13.0, effective_mass_ratio: 1.0 / 15.0 };
        // Hard walls at the stack edges: no padding.
        let grid = AxialGrid::around(&g, 0.0, 4001, 0.0);
        let s = axial_levels(&g, &grid, 0.0, 3).unwrap();
        assert!((s.energies[1] / s.energies[0] - 4.0).abs() < 4e-3);
        let exact = g.kinetic_scale() * (std::f64::consts::PI / 40.0).powi(2);
        assert!((s.energies[0] / exact - 1.0).abs() < 1e-4);
    }

    #[test]
    fn reference_e10_matches_reported_value() {
        let (g, grid) = reference();
        let s = axial_levels(&g, &grid, 0.0, 4).unwrap();
        let e10 = s.transition(1, 0);
        assert!((e10 / 12.25 - 1.0).abs() < 0.05, "E10 = {e10}");
    }

    #[test]
    fn wavefunction_invariants() {
        let (g, grid) = reference();
        for field in [0.0, 0.8, 1.7] {
            let s = axial_levels(&g, &grid, field, 4).unwrap();
            assert!(s.energies.windows(2).all(|w| w[1] > w[0]));
            for n in 0..4 {
                assert!((s.norm_squared(n) - 1.0).abs() < 1e-8);
                assert_eq!(s.node_count(n), n, "field {field}, level {n}");
            }
        }
        let s = axial_levels(&g, &grid, 0.0, 4).unwrap();
        for n in 0..4 {
            let (defect, sign) = s.parity_defect(n);
            assert!(defect < 1e-6, "level {n}: {defect}");
            assert_eq!(sign, if n % 2 == 0 { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn parity_selection_rules() {
        let (g, grid) = reference();
        let s = axial_levels(&g, &grid, 0.0, 4).unwrap();
        assert!(dipole_z(&s, 0, 0).unwrap().abs() < 1e-3);
        assert!(dipole_z(&s, 0, 2).unwrap().abs() < 1e-3);
        assert!(dipole_z(&s, 0, 1).unwrap().abs() > 1.0);
        assert!(dipole_z(&s, 1, 2).unwrap().abs() > 1.0);
        let z01 = dipole_z(&s, 0, 1).unwrap();
        assert_eq!(z01, dipole_z(&s, 1, 0).unwrap());
        assert!(dipole_z(&s, 0, 9).is_err());
    }

    #[test]
    fn radial_levels() {
        let g = QdGeometry::reference();
        let r = radial_spectrum(&g, 6);
        assert_eq!((r.levels[0].m, r.levels[0].l), (0, 1));
        assert_eq!((r.levels[1].m, r.levels[1].l), (1, 1));
        assert!((r.delta_e_r_mev / 30.0 - 1.0).abs() < 0.03, "{}", r.delta_e_r_mev);
        assert!(r.clears(26.5));
        let closed = g.kinetic_scale() * 2.404_825_557_695_773_f64.powi(2) / 169.0;
        assert!((r.levels[0].energy_mev - closed).abs() < 1e-10);

        let mut half = g.clone();
        half.radius_nm /= 2.0;
        let rh = radial_spectrum(&half, 6);
        for (a, b) in r.levels.iter().zip(&rh.levels) {
            assert!((b.energy_mev / a.energy_mev - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_dump_has_expected_columns() {
        let (g, grid) = reference();
        let grid = grid.with_points(200);
        let p = build_potential(&g, 0.0, &grid).unwrap();
        let s = solve_axial(&p, g.effective_mass_ratio, 4).unwrap();
        let csv = s.to_csv(&p);
        assert!(csv.starts_with("z_nm,V_meV,psi0,psi1,psi2,psi3\n"));
        assert_eq!(csv.lines().count(), 201);
    }

    /// Eigenvalue `n` by RK4 shooting from the left wall with node-count
    /// bisection, on the exact step potential.
    fn shooting_level(g: &QdGeometry, grid: &AxialGrid, field: f64, n: usize) -> f64 {
        let half = 0.5 * g.total_thickness();
        let v = |z: f64| {
            let base = if z < -half || z > half {
                grid.boundary_potential_mev
            } else {
                let mut start = -half;
                let mut out = 0.0;
                for l in &g.layers {
                    if z >= start && z < start + l.thickness_nm {
                        out = l.potential_mev;
                    }
                    start += l.thickness_nm;
                }
                out
            };
            base - field * z
        };
        let scale = g.kinetic_scale();
        let steps = 40_000;
        let h = (grid.z_max_nm - grid.z_min_nm) / steps as f64;
        let nodes = |e: f64| {
            let f = |z: f64, y: [f64; 2]| [y[1], (v(z) - e) / scale * y[0]];
            let (mut y, mut z, mut count) = ([0.0, 1.0], grid.z_min_nm, 0);
            for _ in 0..steps {
                let k1 = f(z, y);
                let k2 = f(z + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
                let k3 = f(z + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
                let k4 = f(z + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
                let next = [
                    y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                    y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
                ];
                if next[0] * y[0] < 0.0 {
                    count += 1;
                }
                y = next;
                z += h;
            }
            count
        };
        let (mut lo, mut hi) = (-200.0, 300.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if nodes(mid) > n {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn finite_differences_agree_with_shooting() {
        let (g, grid) = reference();
        for field in [0.0, 1.2] {
            let s = axial_levels(&g, &grid, field, 3).unwrap();
            let shoot: Vec<f64> = (0..3).map(|n| shooting_level(&g, &grid, field, n)).collect();
            for n in 0..3 {
                assert!(
                    (s.energies[n] - shoot[n]).abs() < 0.02,
                    "e = {field}, level {n}: {} vs {}",
                    s.energies[n],
                    shoot[n]
                );
            }
            let e20 = shoot[2] - shoot[0];
            assert!((s.transition(2, 0) / e20 - 1.0).abs() < 2e-3, "E20 {} vs {e20}", s.transition(2, 0));
        }
    }
}
