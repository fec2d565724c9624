//! Field sweeps, level tracking and resonance-field search.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::electronic::{axial_levels, dipole_z, AxialGrid, AxialSpectrum, QdGeometry};
use crate::error::{Error, Result};
use crate::report::{content_hash, csv};

/// Levels solved per field; tracking chooses the three branches among these.
pub const LEVELS_PER_FIELD: usize = 6;

/// Overlap below which a tracking step is flagged.
pub const MIN_TRACKING_OVERLAP: f64 = 0.9;

/// Residual bound for returned resonance fields (meV).
pub const ROOT_RESIDUAL_MEV: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transition {
    /// |0⟩ → |1⟩
    E10,
    /// |0⟩ → |2⟩
    E20,
}

/// Tabulated quantities of the three tracked levels at one field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StarkPoint {
    pub field: f64,
    pub e10: f64,
    pub e20: f64,
    pub z01: f64,
    pub z12: f64,
    pub z02: f64,
    /// Diagonal moments ⟨n|z|n⟩, nm.
    pub z_diag: [f64; 3],
    /// Energy-order index of each tracked branch.
    pub order: [usize; 3],
    /// Smallest tracking overlap into this field (1 at the first field).
    pub overlap: f64,
}

impl StarkPoint {
    pub fn energy(&self, t: Transition) -> f64 {
        match t {
            Transition::E10 => self.e10,
            Transition::E20 => self.e20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarkMap {
    pub geometry: QdGeometry,
    pub grid: AxialGrid,
    pub points: Vec<StarkPoint>,
    /// Field intervals where tracking was ambiguous or weak.
    pub flagged: Vec<(f64, f64)>,
    /// Hash of geometry and grid settings.
    pub provenance: String,
}

/// Quantities of the tracked branches derived from one spectrum whose
/// wavefunctions are already branch-ordered and sign-aligned.
fn point_from(field: f64, spectrum: &AxialSpectrum, order: [usize; 3], overlap: f64) -> Result<StarkPoint> {
    let e = |b: usize| spectrum.energies[b];
    Ok(StarkPoint {
        field,
        e10: e(1) - e(0),
        e20: e(2) - e(0),
        z01: dipole_z(spectrum, 0, 1)?,
        z12: dipole_z(spectrum, 1, 2)?,
        z02: dipole_z(spectrum, 0, 2)?,
        z_diag: [dipole_z(spectrum, 0, 0)?, dipole_z(spectrum, 1, 1)?, dipole_z(spectrum, 2, 2)?],
        order,
        overlap,
    })
}

/// Keep the branches in `order` (energy-order indices), in that sequence.
fn select(spectrum: &AxialSpectrum, order: [usize; 3]) -> AxialSpectrum {
    AxialSpectrum {
        field_mv_per_m: spectrum.field_mv_per_m,
        energies: order.iter().map(|&i| spectrum.energies[i]).collect(),
        wavefunctions: order.iter().map(|&i| spectrum.wavefunctions[i].clone()).collect(),
        z_nm: spectrum.z_nm.clone(),
        spacing_nm: spectrum.spacing_nm,
    }
}

fn flip(spectrum: &mut AxialSpectrum, level: usize) {
    spectrum.wavefunctions[level].iter_mut().for_each(|v| *v = -*v);
}

/// Sweep `n_points` equally spaced fields over `[field_lo, field_hi]`.
///
/// Levels are followed by maximal wavefunction overlap with the previous
/// field, not by energy order; wavefunction signs are carried continuously,
/// starting from the gauge z01 > 0, z12 > 0 at the first field.
pub fn stark_map(
    geometry: &QdGeometry,
    grid: &AxialGrid,
    field_lo: f64,
    field_hi: f64,
    n_points: usize,
) -> Result<StarkMap> {
    if !(field_lo.is_finite() && field_hi.is_finite() && field_lo < field_hi) {
        return Err(Error::config(format!("empty sweep range [{field_lo}, {field_hi}]")));
    }
    if n_points < 50 {
        return Err(Error::config(format!("sweep needs at least 50 fields, got {n_points}")));
    }
    geometry.validate()?;
    grid.validate()?;
    let step = (field_hi - field_lo) / (n_points - 1) as f64;
    let fields: Vec<f64> =
        (0..n_points).map(|i| if i + 1 == n_points { field_hi } else { field_lo + step * i as f64 }).collect();

    let mut points = Vec::with_capacity(n_points);
    let mut flagged = Vec::new();
    let mut previous: Option<AxialSpectrum> = None;
    for chunk in fields.chunks(32) {
        let spectra =
            chunk.par_iter().map(|&f| axial_levels(geometry, grid, f, LEVELS_PER_FIELD)).collect::<Result<Vec<_>>>()?;
        for spectrum in spectra {
            let field = spectrum.field_mv_per_m;
            let (tracked, order, overlap, ambiguous) = match &previous {
                None => {
                    let mut s = select(&spectrum, [0, 1, 2]);
                    if dipole_z(&s, 0, 1)? < 0.0 {
                        flip(&mut s, 1);
                    }
                    if dipole_z(&s, 1, 2)? < 0.0 {
                        flip(&mut s, 2);
                    }
                    (s, [0, 1, 2], 1.0, false)
                }
                Some(prev) => track(prev, &spectrum),
            };
            if ambiguous || overlap < MIN_TRACKING_OVERLAP {
                let lo = points.last().map(|p: &StarkPoint| p.field).unwrap_or(field);
                flagged.push((lo, field));
            }
            points.push(point_from(field, &tracked, order, overlap)?);
            previous = Some(tracked);
        }
    }
    let provenance = content_hash(&(geometry, grid));
    Ok(StarkMap { geometry: geometry.clone(), grid: *grid, points, flagged, provenance })
}

/// Match each previous branch to the new level of largest |overlap|.
fn track(prev: &AxialSpectrum, next: &AxialSpectrum) -> (AxialSpectrum, [usize; 3], f64, bool) {
    let mut order = [0usize; 3];
    let mut signs = [1.0; 3];
    let mut min_overlap: f64 = 1.0;
    let mut ambiguous = false;
    for b in 0..3 {
        let mut ov: Vec<(usize, f64)> = (0..next.len()).map(|j| (j, prev.overlap(b, next, j))).collect();
        ov.sort_by(|x, y| y.1.abs().total_cmp(&x.1.abs()));
        let (best, o) = ov[0];
        if ov.len() > 1 && ov[1].1.abs() >= 0.95 * o.abs() {
            ambiguous = true;
        }
        order[b] = best;
        signs[b] = o.signum();
        min_overlap = min_overlap.min(o.abs());
    }
    if order[0] == order[1] || order[1] == order[2] || order[0] == order[2] {
        // Collision: fall back to energy order and flag.
        ambiguous = true;
        order = [0, 1, 2];
        for b in 0..3 {
            signs[b] = prev.overlap(b, next, b).signum();
        }
    }
    let mut s = select(next, order);
    for (b, sign) in signs.iter().enumerate() {
        if *sign < 0.0 {
            flip(&mut s, b);
        }
    }
    (s, order, min_overlap, ambiguous)
}

impl StarkMap {
    pub fn fields(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.field).collect()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.points[0].field, self.points[self.points.len() - 1].field)
    }

    /// Point at exactly `field`, if tabulated.
    pub fn at(&self, field: f64) -> Option<&StarkPoint> {
        self.points.iter().find(|p| p.field == field)
    }

    /// Fresh electronic-structure solve at `field`, restricted to the branches
    /// the map follows near that field and sign-aligned with the map.
    pub fn resolve(&self, field: f64) -> Result<StarkPoint> {
        let near = self.nearest(field);
        let spectrum = axial_levels(&self.geometry, &self.grid, field, LEVELS_PER_FIELD)?;
        let mut s = select(&spectrum, near.order);
        if dipole_z(&s, 0, 1)?.signum() != near.z01.signum() {
            flip(&mut s, 1);
        }
        if dipole_z(&s, 1, 2)?.signum() != near.z12.signum() {
            flip(&mut s, 2);
        }
        point_from(field, &s, near.order, 1.0)
    }

    fn nearest(&self, field: f64) -> &StarkPoint {
        self.points
            .iter()
            .min_by(|a, b| (a.field - field).abs().total_cmp(&(b.field - field).abs()))
            .expect("non-empty map")
    }

    /// CSV columns `e_MVpm, E10_meV, E20_meV, z01_nm, z12_nm, z02_nm`.
    pub fn to_csv(&self) -> String {
        csv(
            &["e_MVpm", "E10_meV", "E20_meV", "z01_nm", "z12_nm", "z02_nm"],
            self.points.iter().map(|p| vec![p.field, p.e10, p.e20, p.z01, p.z12, p.z02]),
        )
    }
}

/// All fields where the tracked `transition` equals `target_mev`, ascending.
///
/// Brackets come from the tabulated map; each is refined with fresh solves
/// (Illinois false position) until the residual is far below
/// [`ROOT_RESIDUAL_MEV`].
pub fn find_resonance_field(map: &StarkMap, transition: Transition, target_mev: f64) -> Result<Vec<f64>> {
    let values: Vec<f64> = map.points.iter().map(|p| p.energy(transition) - target_mev).collect();
    let mut roots = Vec::new();
    for i in 0..values.len() {
        if values[i] == 0.0 {
            roots.push(map.points[i].field);
            continue;
        }
        if i + 1 < values.len() && values[i + 1] != 0.0 && values[i].signum() != values[i + 1].signum() {
            let (a, b) = (map.points[i].field, map.points[i + 1].field);
            roots.push(refine_root(map, transition, target_mev, a, values[i], b, values[i + 1])?);
        }
    }
    if roots.is_empty() {
        let (min, max) = map
            .points
            .iter()
            .map(|p| p.energy(transition))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        return Err(Error::ResonanceUnreachable { target: target_mev, min, max });
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn refine_root(
    map: &StarkMap,
    t: Transition,
    target: f64,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    mut fb: f64,
) -> Result<f64> {
    let eval = |e: f64| -> Result<f64> { Ok(map.resolve(e)?.energy(t) - target) };
    // The tabulated values came from the same solver, so the bracket holds.
    let mut side = 0i8;
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for _ in 0..100 {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c.is_finite() && c > a.min(b) && c < a.max(b) { c } else { 0.5 * (a + b) };
        let fc = eval(c)?;
        if fc.abs() < best.1.abs() {
            best = (c, fc);
        }
        if fc.abs() < 1e-10 || (b - a).abs() < 1e-13 {
            break;
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    if best.1.abs() >= ROOT_RESIDUAL_MEV {
        return Err(Error::Numeric(format!("resonance refinement stalled at residual {:.3e} meV", best.1)));
    }
    Ok(best.0)
}

/// Which candidate to use when a target energy is reached more than once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootChoice {
    Lowest,
    #[default]
    Highest,
}

impl RootChoice {
    fn pick(self, roots: &[f64]) -> f64 {
        match self {
            RootChoice::Lowest => roots[0],
            RootChoice::Highest => roots[roots.len() - 1],
        }
    }
}

/// Levels and dipoles at one operating field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatingPoint {
    pub field: f64,
    pub e10: f64,
    pub e20: f64,
    pub z01: f64,
    pub z12: f64,
    pub z02: f64,
}

impl From<StarkPoint> for OperatingPoint {
    fn from(p: StarkPoint) -> Self {
        Self { field: p.field, e10: p.e10, e20: p.e20, z01: p.z01, z12: p.z12, z02: p.z02 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatingPoints {
    pub cavity_mev: f64,
    pub laser_mev: f64,
    pub root_choice: RootChoice,
    /// E10 = ħω_c.
    pub e_c: OperatingPoint,
    /// E10 = ħω_l.
    pub e_l: OperatingPoint,
    /// E20 = ħω_l + ħω_c.
    pub e_lc: OperatingPoint,
    pub candidates_c: Vec<f64>,
    pub candidates_l: Vec<f64>,
    pub candidates_lc: Vec<f64>,
    /// ħ(ω21 − ω_l) at e_lc, meV.
    pub detuning_21_l_mev: f64,
    /// ħ(ω21 − ω_c) at e_lc, meV.
    pub detuning_21_c_mev: f64,
    /// |ω21 − ω_l| / |ω21 − ω_c| at e_lc; the scheme wants this ≪ 1.
    pub hierarchy_ratio: f64,
}

impl OperatingPoints {
    pub fn hierarchy_holds(&self) -> bool {
        self.hierarchy_ratio < 1.0
    }
}

/// Locate e_c, e_l and e_lc for the given photon energies.
pub fn operating_points(
    map: &StarkMap,
    cavity_mev: f64,
    laser_mev: f64,
    choice: RootChoice,
) -> Result<OperatingPoints> {
    let candidates_c = find_resonance_field(map, Transition::E10, cavity_mev)?;
    let candidates_l = find_resonance_field(map, Transition::E10, laser_mev)?;
    let candidates_lc = find_resonance_field(map, Transition::E20, cavity_mev + laser_mev)?;
    let e_c: OperatingPoint = map.resolve(choice.pick(&candidates_c))?.into();
    let e_l: OperatingPoint = map.resolve(choice.pick(&candidates_l))?.into();
    let e_lc: OperatingPoint = map.resolve(choice.pick(&candidates_lc))?.into();
    let e21 = e_lc.e20 - e_lc.e10;
    let detuning_21_l_mev = e21 - laser_mev;
    let detuning_21_c_mev = e21 - cavity_mev;
    Ok(OperatingPoints {
        cavity_mev,
        laser_mev,
        root_choice: choice,
        e_c,
        e_l,
        e_lc,
        candidates_c,
        candidates_l,
        candidates_lc,
        detuning_21_l_mev,
        detuning_21_c_mev,
        hierarchy_ratio: detuning_21_l_mev.abs() / detuning_21_c_mev.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coarse_map() -> StarkMap {
        let g = QdGeometry::reference();
        let grid = AxialGrid::default().with_points(1024);
        stark_map(&g, &grid, 0.0, 2.5, 51).unwrap()
    }

    #[test]
    fn sweep_validation() {
        let g = QdGeometry::reference();
        let grid = AxialGrid::default();
        assert!(matches!(stark_map(&g, &grid, 1.0, 1.0, 100), Err(Error::Config(_))));
        assert!(matches!(stark_map(&g, &grid, 0.0, 1.0, 10), Err(Error::Config(_))));
    }

    #[test]
    fn tracked_map_is_regular() {
        let map = coarse_map();
        assert!(map.flagged.is_empty(), "{:?}", map.flagged);
        for p in &map.points {
            assert!(p.e10 > 0.0 && p.e20 > p.e10);
            assert!(p.overlap > MIN_TRACKING_OVERLAP);
            assert!(p.z01 > 0.0 && p.z12 > 0.0);
        }
    }

    #[test]
    fn unreachable_target_reports_range() {
        let map = coarse_map();
        match find_resonance_field(&map, Transition::E10, 1.0) {
            Err(Error::ResonanceUnreachable { min, max, .. }) => assert!(min > 1.0 && max > min),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn roots_have_small_residual() {
        let map = coarse_map();
        let roots = find_resonance_field(&map, Transition::E10, 11.5).unwrap();
        assert_eq!(roots.len(), 2);
        for r in roots {
            assert!((map.resolve(r).unwrap().e10 - 11.5).abs() < ROOT_RESIDUAL_MEV);
        }
    }

    #[test]
    fn degenerate_photons_share_a_root() {
        let map = coarse_map();
        let op = operating_points(&map, 12.0, 12.0, RootChoice::Highest).unwrap();
        assert_eq!(op.e_c.field, op.e_l.field);
    }

    #[test]
    fn hellmann_feynman_slopes() {
        let map = coarse_map();
        let h = 1e-3;
        for e in [0.3, 0.9, 1.6, 2.2] {
            let p = map.resolve(e).unwrap();
            let (a, b) = (map.resolve(e - h).unwrap(), map.resolve(e + h).unwrap());
            // V = … − e z, so dE_n/de = −⟨n|z|n⟩.
            let d10 = (b.e10 - a.e10) / (2.0 * h);
            let d20 = (b.e20 - a.e20) / (2.0 * h);
            let hf10 = -(p.z_diag[1] - p.z_diag[0]);
            let hf20 = -(p.z_diag[2] - p.z_diag[0]);
            assert!((d10 - hf10).abs() < 1e-4 * (1.0 + hf10.abs()), "e = {e}: {d10} vs {hf10}");
            assert!((d20 - hf20).abs() < 1e-4 * (1.0 + hf20.abs()), "e = {e}: {d20} vs {hf20}");
        }
    }

    #[test]
    fn resolve_reproduces_tabulated_points() {
        let map = coarse_map();
        for p in map.points.iter().step_by(7) {
            let q = map.resolve(p.field).unwrap();
            for (x, y) in [(p.e10, q.e10), (p.e20, q.e20), (p.z01, q.z01), (p.z12, q.z12), (p.z02, q.z02)] {
                assert!((x - y).abs() < 1e-9, "field {}: {x} vs {y}", p.field);
            }
        }
    }

    #[test]
    fn root_choice_selects_branch() {
        let map = coarse_map();
        let hi = operating_points(&map, 11.5, 15.0, RootChoice::Highest).unwrap();
        let lo = operating_points(&map, 11.5, 15.0, RootChoice::Lowest).unwrap();
        assert_eq!(hi.candidates_c.len(), 2);
        assert!(lo.e_c.field < hi.e_c.field);
        assert_eq!(lo.e_c.field, hi.candidates_c[0]);
        assert_eq!(hi.e_c.field, hi.candidates_c[1]);
        assert!(hi.hierarchy_holds());
        assert!((hi.e_c.field / 1.177 - 1.0).abs() < 0.1);
        assert!((hi.e_l.field / 1.682 - 1.0).abs() < 0.1);
        assert!((hi.e_lc.field / 0.7668 - 1.0).abs() < 0.1);
    }
}
