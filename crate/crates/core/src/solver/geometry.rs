use super::SolverError;
use serde::{Deserialize, Serialize};

/// Vertical cross-section of the column, discretized into `nx x ny` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub nx: usize,
    pub ny: usize,
    /// Horizontal extent, cm (the column diameter).
    pub width: f64,
    pub column_height: f64,
    pub disk_thickness: f64,
    /// Intrinsic permeability of the air-impermeable outlet disk, cm².
    pub disk_permeability: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            nx: 64,
            ny: 64,
            width: 12.0,
            column_height: 8.34,
            disk_thickness: 0.74,
            disk_permeability: 1.0e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub column_height: f64,
    pub disk_thickness: f64,
}

impl GridGeometry {
    pub fn new(nx: usize, ny: usize, width: f64, column_height: f64, disk_thickness: f64) -> Result<Self, SolverError> {
        if nx == 0 || ny == 0 {
            return Err(SolverError::InvalidGeometry(format!("need at least one cell per direction, got {nx}x{ny}")));
        }
        if !(width > 0.0 && column_height > 0.0) {
            return Err(SolverError::InvalidGeometry("width and column_height must be positive".into()));
        }
        if !(0.0..column_height).contains(&disk_thickness) {
            return Err(SolverError::InvalidGeometry(format!(
                "disk_thickness {disk_thickness} must lie in [0, column_height)"
            )));
        }
        Ok(Self {
            nx,
            ny,
            dx: width / nx as f64,
            dy: column_height / ny as f64,
            column_height,
            disk_thickness,
        })
    }

    pub fn from_config(c: &GeometryConfig) -> Result<Self, SolverError> {
        Self::new(c.nx, c.ny, c.width, c.column_height, c.disk_thickness)
    }

    pub fn width(&self) -> f64 {
        self.dx * self.nx as f64
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    #[inline]
    pub fn x_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx
    }

    #[inline]
    pub fn y_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dy
    }

    /// Rows whose centre lies inside the bottom disk.
    #[inline]
    pub fn is_disk_row(&self, j: usize) -> bool {
        self.y_center(j) < self.disk_thickness
    }

    pub fn disk_rows(&self) -> usize {
        (0..self.ny).take_while(|&j| self.is_disk_row(j)).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_column_dimensions() {
        let g = GridGeometry::from_config(&GeometryConfig::default()).unwrap();
        assert!((g.dy * g.ny as f64 - 8.34).abs() < 1e-12);
        // 0.74 cm of 8.34 cm over 64 rows: centres 0.065, 0.195, ..., 0.716 are inside
        assert_eq!(g.disk_rows(), 6);
        assert!(g.is_disk_row(5) && !g.is_disk_row(6));
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(GridGeometry::new(0, 4, 1.0, 1.0, 0.1).is_err());
        assert!(GridGeometry::new(4, 4, 1.0, 1.0, 2.0).is_err());
        assert!(GridGeometry::new(4, 4, -1.0, 1.0, 0.1).is_err());
    }
}
