//! Resampling of snapshot grids onto an observation lattice, and extraction
//! of the vertical profiles that become network nodes.

use crate::grid::Grid;
use crate::solver::GridGeometry;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("region x [{x_min}, {x_max}] y [{y_min}, {y_max}] is empty or outside the domain")]
    RegionOutOfBounds { x_min: f64, x_max: f64, y_min: f64, y_max: f64 },
    #[error("lattice needs at least 2 points per direction, got {x}x{y}")]
    LatticeTooSmall { x: usize, y: usize },
    #[error("a profile set needs N >= 2 nodes and L >= 3 samples, got N = {n}, L = {l}")]
    TooFewProfiles { n: usize, l: usize },
    #[error("profile {node} contains a non-finite value")]
    NonFinite { node: usize },
    #[error("grid is {gx}x{gy} but geometry is {nx}x{ny}")]
    ShapeMismatch { gx: usize, gy: usize, nx: usize, ny: usize },
}

/// Axis-aligned rectangle in domain coordinates, cm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Region {
    pub fn whole(geom: &GridGeometry) -> Self {
        Self { x_min: 0.0, x_max: geom.width(), y_min: 0.0, y_max: geom.column_height }
    }

    /// The part of the column above the air-impermeable disk.
    pub fn above_disk(geom: &GridGeometry) -> Self {
        Self { y_min: geom.disk_thickness, ..Self::whole(geom) }
    }

    fn check(&self, geom: &GridGeometry) -> Result<(), ProfileError> {
        let tol = 1e-9 * geom.width().max(geom.column_height);
        let ok = self.x_min < self.x_max
            && self.y_min < self.y_max
            && self.x_min >= -tol
            && self.y_min >= -tol
            && self.x_max <= geom.width() + tol
            && self.y_max <= geom.column_height + tol;
        if ok {
            Ok(())
        } else {
            Err(ProfileError::RegionOutOfBounds {
                x_min: self.x_min,
                x_max: self.x_max,
                y_min: self.y_min,
                y_max: self.y_max,
            })
        }
    }
}

/// Values sampled at `xs.len() x ys.len()` lattice points.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// `values.get(i, j)` is the sample at `(xs[i], ys[j])`.
    pub values: Grid,
}

impl Lattice {
    /// Swaps the roles of x and y.
    pub fn transpose(&self) -> Self {
        let v = &self.values;
        Lattice {
            xs: self.ys.clone(),
            ys: self.xs.clone(),
            values: Grid::from_fn(v.ny, v.nx, |i, j| v.get(j, i)),
        }
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|k| if k + 1 == n { b } else { a + step * k as f64 }).collect()
}

/// Base index and weight for linear interpolation between cell centres
/// spaced `h` apart, extrapolating linearly past the outer centres.
fn bracket(pos: f64, h: f64, cells: usize) -> (usize, f64) {
    if cells == 1 {
        return (0, 0.0);
    }
    let mut f = pos / h - 0.5;
    let r = f.round();
    if (f - r).abs() < 1e-9 {
        f = r;
    }
    let i0 = (f.floor().max(0.0) as usize).min(cells - 2);
    (i0, f - i0 as f64)
}

#[inline]
fn lerp(a: f64, b: f64, w: f64) -> f64 {
    if w == 0.0 {
        a
    } else if w == 1.0 {
        b
    } else {
        a + w * (b - a)
    }
}

/// Bilinear interpolation of a cell-centred grid onto an `x_points x y_points`
/// lattice spanning `region` exactly.
pub fn resample(
    grid: &Grid,
    geom: &GridGeometry,
    x_points: usize,
    y_points: usize,
    region: &Region,
) -> Result<Lattice, ProfileError> {
    if grid.nx != geom.nx || grid.ny != geom.ny {
        return Err(ProfileError::ShapeMismatch { gx: grid.nx, gy: grid.ny, nx: geom.nx, ny: geom.ny });
    }
    if x_points < 2 || y_points < 2 {
        return Err(ProfileError::LatticeTooSmall { x: x_points, y: y_points });
    }
    region.check(geom)?;
    let xs = linspace(region.x_min, region.x_max, x_points);
    let ys = linspace(region.y_min, region.y_max, y_points);
    let bx: Vec<_> = xs.iter().map(|&x| bracket(x, geom.dx, geom.nx)).collect();
    let by: Vec<_> = ys.iter().map(|&y| bracket(y, geom.dy, geom.ny)).collect();
    let sample = |i0: usize, j0: usize| grid.get(i0.min(grid.nx - 1), j0.min(grid.ny - 1));
    let values = Grid::from_fn(x_points, y_points, |a, b| {
        let (i0, wx) = bx[a];
        let (j0, wy) = by[b];
        let lo = lerp(sample(i0, j0), sample(i0 + 1, j0), wx);
        let hi = lerp(sample(i0, j0 + 1), sample(i0 + 1, j0 + 1), wx);
        lerp(lo, hi, wy)
    });
    Ok(Lattice { xs, ys, values })
}

/// `N` vertical profiles of `L` samples of one field at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSet {
    pub field_name: String,
    pub t: f64,
    /// `values[i]` is profile `i`, bottom to top.
    pub values: Vec<Vec<f64>>,
    pub x_positions: Vec<f64>,
}

impl ProfileSet {
    pub fn new(field_name: &str, t: f64, values: Vec<Vec<f64>>, x_positions: Vec<f64>) -> Result<Self, ProfileError> {
        let n = values.len();
        let l = values.first().map_or(0, Vec::len);
        if n < 2 || l < 3 || values.iter().any(|v| v.len() != l) || x_positions.len() != n {
            return Err(ProfileError::TooFewProfiles { n, l });
        }
        if let Some(node) = values.iter().position(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(ProfileError::NonFinite { node });
        }
        Ok(Self { field_name: field_name.to_string(), t, values, x_positions })
    }

    pub fn nodes(&self) -> usize {
        self.values.len()
    }

    pub fn samples(&self) -> usize {
        self.values[0].len()
    }

    /// Header line then one row per node.
    pub fn to_csv(&self) -> String {
        let mut s = format!("# field={} t={} N={} L={}\n", self.field_name, self.t, self.nodes(), self.samples());
        for (x, row) in self.x_positions.iter().zip(&self.values) {
            let _ = write!(s, "{x:.16e}");
            for v in row {
                let _ = write!(s, ",{v:.16e}");
            }
            s.push('\n');
        }
        s
    }
}

/// Profile `i` is lattice column `i`: `N = X`, `L = Y`.
pub fn extract_profiles(lattice: &Lattice, field_name: &str, t: f64) -> Result<ProfileSet, ProfileError> {
    let v = &lattice.values;
    let values = (0..v.nx).map(|i| (0..v.ny).map(|j| v.get(i, j)).collect()).collect();
    ProfileSet::new(field_name, t, values, lattice.xs.clone())
}

/// Affine map of the finite values onto `[0, 1]`. A degenerate range maps
/// everything to 0; non-finite entries pass through unchanged.
pub fn normalize_unit_interval(values: &[f64]) -> Vec<f64> {
    let (lo, hi) = values
        .iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    values
        .iter()
        .map(|&v| {
            if !v.is_finite() {
                v
            } else if range > 0.0 {
                (v - lo) / range
            } else {
                0.0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn geom(nx: usize, ny: usize) -> GridGeometry {
        GridGeometry::new(nx, ny, 12.0, 8.34, 0.74).unwrap()
    }

    fn centres(g: &GridGeometry) -> Region {
        Region { x_min: g.x_center(0), x_max: g.x_center(g.nx - 1), y_min: g.y_center(0), y_max: g.y_center(g.ny - 1) }
    }

    #[test]
    fn cell_centre_lattice_copies_values() {
        let g = geom(7, 5);
        let grid = Grid::from_fn(7, 5, |i, j| ((i * 31 + j * 17) as f64).sin());
        let lat = resample(&grid, &g, 7, 5, &centres(&g)).unwrap();
        assert_eq!(lat.values, grid);
    }

    #[test]
    fn constant_field_stays_constant() {
        let g = geom(9, 9);
        let grid = Grid::filled(9, 9, 0.37);
        let lat = resample(&grid, &g, 13, 11, &Region::above_disk(&g)).unwrap();
        assert!(lat.values.data.iter().all(|&v| v == 0.37));
    }

    #[test]
    fn linear_field_is_reproduced() {
        let g = geom(10, 12);
        let plane = |x: f64, y: f64| 0.3 - 0.02 * x + 0.11 * y;
        let grid = Grid::from_fn(10, 12, |i, j| plane(g.x_center(i), g.y_center(j)));
        let lat = resample(&grid, &g, 17, 23, &Region::whole(&g)).unwrap();
        for (a, &x) in lat.xs.iter().enumerate() {
            for (b, &y) in lat.ys.iter().enumerate() {
                let e = plane(x, y);
                assert!((lat.values.get(a, b) - e).abs() < 1e-14, "{} vs {e}", lat.values.get(a, b));
            }
        }
    }

    #[test]
    fn lattice_spans_region_exactly() {
        let g = geom(8, 8);
        let r = Region::above_disk(&g);
        let lat = resample(&Grid::filled(8, 8, 1.0), &g, 5, 6, &r).unwrap();
        assert_eq!((lat.xs[0], *lat.xs.last().unwrap()), (r.x_min, r.x_max));
        assert_eq!((lat.ys[0], *lat.ys.last().unwrap()), (r.y_min, r.y_max));
    }

    #[test]
    fn region_outside_domain_rejected() {
        let g = geom(4, 4);
        let r = Region { y_max: 9.0, ..Region::whole(&g) };
        assert!(matches!(
            resample(&Grid::filled(4, 4, 0.0), &g, 3, 3, &r),
            Err(ProfileError::RegionOutOfBounds { .. })
        ));
    }

    #[test]
    fn profiles_are_lattice_columns() {
        let lat = Lattice {
            xs: vec![0.0, 1.0, 2.0],
            ys: vec![0.0, 1.0, 2.0, 3.0],
            values: Grid::from_fn(3, 4, |i, j| (10 * i + j) as f64),
        };
        let p = extract_profiles(&lat, "S_nw", 0.2).unwrap();
        assert_eq!((p.nodes(), p.samples()), (3, 4));
        assert_eq!(p.values[1], vec![10.0, 11.0, 12.0, 13.0]);
        let q = extract_profiles(&lat.transpose(), "S_nw", 0.2).unwrap();
        assert_eq!((q.nodes(), q.samples()), (4, 3));
        assert_eq!(q.values[2], vec![2.0, 12.0, 22.0]);
    }

    #[test]
    fn aligned_round_trip_reproduces_solver_columns() {
        let g = geom(6, 9);
        let grid = Grid::from_fn(6, 9, |i, j| (i as f64 * 1.3 - j as f64 * 0.4).cos());
        let p = extract_profiles(&resample(&grid, &g, 6, 9, &centres(&g)).unwrap(), "h_nw", 0.0).unwrap();
        for i in 0..6 {
            let col: Vec<f64> = (0..9).map(|j| grid.get(i, j)).collect();
            assert_eq!(p.values[i], col);
        }
    }

    #[test]
    fn undersized_profile_sets_rejected() {
        assert!(ProfileSet::new("x", 0.0, vec![vec![1.0, 2.0, 3.0]], vec![0.0]).is_err());
        assert!(ProfileSet::new("x", 0.0, vec![vec![1.0, 2.0], vec![1.0, 2.0]], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_unit_interval(&[2.0, 4.0, 6.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!(normalize_unit_interval(&[3.0, 3.0]), vec![0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn normalized_range_is_exact(v in prop::collection::vec(-1e6f64..1e6, 2..200)) {
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assume!(hi > lo);
            let n = normalize_unit_interval(&v);
            let nlo = n.iter().cloned().fold(f64::INFINITY, f64::min);
            let nhi = n.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(nlo, 0.0);
            prop_assert_eq!(nhi, 1.0);
        }

        #[test]
        fn resampling_is_deterministic(seed in 0u64..1000) {
            let g = geom(8, 8);
            let grid = Grid::from_fn(8, 8, |i, j| ((seed + 7 * i as u64 + 13 * j as u64) as f64).sin());
            let a = extract_profiles(&resample(&grid, &g, 11, 9, &Region::above_disk(&g)).unwrap(), "S_nw", 1.0).unwrap();
            let b = extract_profiles(&resample(&grid, &g, 11, 9, &Region::above_disk(&g)).unwrap(), "S_nw", 1.0).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
