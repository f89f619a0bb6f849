use super::Medium;
use crate::constitutive::{
    capillary_capacity, effective_saturation, rel_perm_nonwetting, rel_perm_wetting, FluidProps,
};
use crate::grid::Grid;

/// Primary unknowns: water and air pressure heads (cm of water) at time `t` (h).
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub h_w: Grid,
    pub h_nw: Grid,
    pub t: f64,
}

impl State {
    pub fn uniform(nx: usize, ny: usize, h_w: f64, h_nw: f64) -> Self {
        Self { h_w: Grid::filled(nx, ny, h_w), h_nw: Grid::filled(nx, ny, h_nw), t: 0.0 }
    }
}

/// Full-grid output at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    /// Effective non-wetting saturation `1 - S_ew`.
    pub s_nw: Grid,
    /// Magnitude of the cell-centre air flux density, cm/h.
    pub v_nw_abs: Grid,
    pub h_nw: Grid,
    pub h_w: Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotField {
    SNw,
    VNwAbs,
    HNw,
    HW,
}

impl SnapshotField {
    pub const ALL: [SnapshotField; 4] = [SnapshotField::SNw, SnapshotField::VNwAbs, SnapshotField::HNw, SnapshotField::HW];

    pub fn name(self) -> &'static str {
        match self {
            SnapshotField::SNw => "S_nw",
            SnapshotField::VNwAbs => "v_nw_abs",
            SnapshotField::HNw => "h_nw",
            SnapshotField::HW => "h_w",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

impl Snapshot {
    pub fn field(&self, which: SnapshotField) -> &Grid {
        match which {
            SnapshotField::SNw => &self.s_nw,
            SnapshotField::VNwAbs => &self.v_nw_abs,
            SnapshotField::HNw => &self.h_nw,
            SnapshotField::HW => &self.h_w,
        }
    }
}

/// Constitutive quantities of one cell at given heads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CellProps {
    pub s_ew: f64,
    pub theta_w: f64,
    pub theta_nw: f64,
    /// d(theta_w)/d(h_c), <= 0.
    pub c_w: f64,
    pub k_rw: f64,
    pub k_rnw: f64,
    pub rho_nw: f64,
}

pub(crate) fn cell_props(medium: &Medium, fluids: &FluidProps, h_w: &Grid, h_nw: &Grid) -> Vec<CellProps> {
    medium
        .params
        .iter()
        .enumerate()
        .map(|(c, p)| {
            let h_c = h_nw.data[c] - h_w.data[c];
            let s_ew = effective_saturation(h_c, p);
            let theta_w = p.theta_r + (p.theta_s - p.theta_r) * s_ew;
            CellProps {
                s_ew,
                theta_w,
                theta_nw: p.theta_s - theta_w,
                c_w: capillary_capacity(h_c, p),
                k_rw: rel_perm_wetting(s_ew, p),
                k_rnw: if medium.disk[c] { 0.0 } else { rel_perm_nonwetting(s_ew, p) },
                rho_nw: fluids.rho_0_nw + fluids.compressibility * h_nw.data[c],
            }
        })
        .collect()
}

/// Water volume and air mass per unit depth (cm², g/cm).
pub fn phase_totals(state: &State, medium: &Medium, fluids: &FluidProps) -> (f64, f64) {
    let area = medium.geom.cell_area();
    let props = cell_props(medium, fluids, &state.h_w, &state.h_nw);
    let water: f64 = props.iter().map(|p| p.theta_w).sum::<f64>() * area;
    let air: f64 = props.iter().map(|p| p.rho_nw * p.theta_nw).sum::<f64>() * area;
    (water, air)
}
