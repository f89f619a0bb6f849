use super::{GeometryConfig, GridGeometry, SolverError};
use crate::constitutive::VanGenuchtenParams;
use crate::hetfield::ParameterField;
use serde::{Deserialize, Serialize};

/// Soil constants shared by every cell (the random parameters come from the field).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoilConfig {
    /// 1/cm.
    pub alpha: f64,
    pub theta_r: f64,
    pub eta: f64,
}

impl Default for SoilConfig {
    fn default() -> Self {
        // Lincoln sand
        Self { alpha: 0.0189, theta_r: 0.0210, eta: 0.5 }
    }
}

/// Per-cell material description: retention parameters, intrinsic
/// permeability and the air-impermeable disk mask.
#[derive(Debug, Clone)]
pub struct Medium {
    pub geom: GridGeometry,
    pub params: Vec<VanGenuchtenParams>,
    pub k_intrinsic: Vec<f64>,
    pub disk: Vec<bool>,
}

impl Medium {
    pub fn new(
        geom: GridGeometry,
        field: &ParameterField,
        soil: &SoilConfig,
        disk_permeability: f64,
    ) -> Result<Self, SolverError> {
        if field.nx != geom.nx || field.ny != geom.ny {
            return Err(SolverError::InvalidConfig(format!(
                "field is {}x{} but grid is {}x{}",
                field.nx, field.ny, geom.nx, geom.ny
            )));
        }
        if !(disk_permeability > 0.0) {
            return Err(SolverError::InvalidConfig("disk_permeability must be positive".into()));
        }
        let n = geom.cell_count();
        let mut params = Vec::with_capacity(n);
        let mut k_intrinsic = Vec::with_capacity(n);
        let mut disk = Vec::with_capacity(n);
        for j in 0..geom.ny {
            let in_disk = geom.is_disk_row(j);
            for i in 0..geom.nx {
                let p = VanGenuchtenParams::new(
                    soil.alpha,
                    field.n_vg.get(i, j),
                    soil.eta,
                    soil.theta_r,
                    field.theta_s.get(i, j),
                )?;
                params.push(p);
                k_intrinsic.push(if in_disk { disk_permeability } else { field.k_intrinsic.get(i, j) });
                disk.push(in_disk);
            }
        }
        Ok(Self { geom, params, k_intrinsic, disk })
    }

    pub fn from_config(
        geometry: &GeometryConfig,
        field: &ParameterField,
        soil: &SoilConfig,
    ) -> Result<Self, SolverError> {
        let geom = GridGeometry::from_config(geometry)?;
        Self::new(geom, field, soil, geometry.disk_permeability)
    }

    pub fn cell_count(&self) -> usize {
        self.params.len()
    }
}
