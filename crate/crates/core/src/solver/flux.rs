//! Two-point face fluxes on the structured grid.
//!
//! Interface permeability is the harmonic mean of the two cells' intrinsic
//! permeabilities, multiplied by the relative permeability of the upstream
//! cell. Air faces touching the disk carry no flux. Boundary faces use the
//! adjacent cell's relative permeability.

use super::state::CellProps;
use super::{BoundaryConditions, Medium};
use crate::constitutive::FluidProps;
use crate::grid::Grid;

#[inline]
fn harmonic(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

/// Face transmissibilities (cm²/h per cm of head, per unit depth) frozen at
/// one set of heads, plus the air density assigned to every face.
#[derive(Debug, Clone)]
pub(crate) struct FaceCoeffs {
    /// Face between (i, j) and (i+1, j) at `j * (nx - 1) + i`.
    pub x_w: Vec<f64>,
    pub x_a: Vec<f64>,
    pub x_rho: Vec<f64>,
    /// Face between (i, j) and (i, j+1) at `j * nx + i`.
    pub y_w: Vec<f64>,
    pub y_a: Vec<f64>,
    pub y_rho: Vec<f64>,
    /// Top boundary air faces, per column.
    pub top_a: Vec<f64>,
    pub top_rho: Vec<f64>,
    /// Bottom boundary water faces, per column.
    pub bottom_w: Vec<f64>,
    /// Gravity head drop across one vertical cell spacing, for water (0 or dy).
    pub grav_dy: f64,
    /// Boundary heads these coefficients were built for.
    pub inlet_air_head: f64,
    pub outlet_water_head: f64,
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn face_coeffs(
    medium: &Medium,
    fluids: &FluidProps,
    bc: &BoundaryConditions,
    gravity: bool,
    t: f64,
    h_w: &Grid,
    h_nw: &Grid,
    props: &[CellProps],
) -> FaceCoeffs {
    let g = &medium.geom;
    let (nx, ny) = (g.nx, g.ny);
    let grav_dy = if gravity { g.dy } else { 0.0 };
    let kw_sat = |k: f64| fluids.water_conductivity(k);
    let ka_sat = |k: f64| fluids.air_conductivity(k);

    let mut x_w = vec![0.0; nx.saturating_sub(1) * ny];
    let mut x_a = vec![0.0; x_w.len()];
    let mut x_rho = vec![0.0; x_w.len()];
    for j in 0..ny {
        for i in 0..nx.saturating_sub(1) {
            let (c1, c2) = (j * nx + i, j * nx + i + 1);
            let f = j * (nx - 1) + i;
            let k = harmonic(medium.k_intrinsic[c1], medium.k_intrinsic[c2]);
            let geo = g.dy / g.dx;
            let kr_w = if h_w.data[c1] >= h_w.data[c2] { props[c1].k_rw } else { props[c2].k_rw };
            x_w[f] = kw_sat(k) * geo * kr_w;
            x_rho[f] = 0.5 * (props[c1].rho_nw + props[c2].rho_nw);
            if !(medium.disk[c1] || medium.disk[c2]) {
                let kr_a = if h_nw.data[c1] >= h_nw.data[c2] { props[c1].k_rnw } else { props[c2].k_rnw };
                x_a[f] = ka_sat(k) * geo * kr_a;
            }
        }
    }

    let mut y_w = vec![0.0; nx * ny.saturating_sub(1)];
    let mut y_a = vec![0.0; y_w.len()];
    let mut y_rho = vec![0.0; y_w.len()];
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx {
            let (c1, c2) = (j * nx + i, (j + 1) * nx + i);
            let f = j * nx + i;
            let k = harmonic(medium.k_intrinsic[c1], medium.k_intrinsic[c2]);
            let geo = g.dx / g.dy;
            // c2 sits one cell above c1
            let dphi_w = h_w.data[c1] - h_w.data[c2] - grav_dy;
            let kr_w = if dphi_w >= 0.0 { props[c1].k_rw } else { props[c2].k_rw };
            y_w[f] = kw_sat(k) * geo * kr_w;
            let rho_f = 0.5 * (props[c1].rho_nw + props[c2].rho_nw);
            y_rho[f] = rho_f;
            if !(medium.disk[c1] || medium.disk[c2]) {
                let dphi_a = h_nw.data[c1] - h_nw.data[c2] - grav_dy * rho_f / fluids.rho_w;
                let kr_a = if dphi_a >= 0.0 { props[c1].k_rnw } else { props[c2].k_rnw };
                y_a[f] = ka_sat(k) * geo * kr_a;
            }
        }
    }

    let (inlet, outlet) = bc.heads_at(t).unwrap_or((0.0, 0.0));
    let open = bc.is_open();
    let mut top_a = vec![0.0; nx];
    let mut top_rho = vec![0.0; nx];
    let mut bottom_w = vec![0.0; nx];
    if open {
        let rho_in = fluids.rho_0_nw + fluids.compressibility * inlet;
        let geo = g.dx / (0.5 * g.dy);
        for i in 0..nx {
            let top = (ny - 1) * nx + i;
            if !medium.disk[top] {
                top_a[i] = ka_sat(medium.k_intrinsic[top]) * geo * props[top].k_rnw;
            }
            top_rho[i] = 0.5 * (props[top].rho_nw + rho_in);
            bottom_w[i] = kw_sat(medium.k_intrinsic[i]) * geo * props[i].k_rw;
        }
    }

    FaceCoeffs {
        x_w,
        x_a,
        x_rho,
        y_w,
        y_a,
        y_rho,
        top_a,
        top_rho,
        bottom_w,
        grav_dy,
        inlet_air_head: inlet,
        outlet_water_head: outlet,
    }
}

/// Volumetric face fluxes per unit depth (cm²/h), positive in +x / +y.
///
/// `water_x`/`air_x` have `(nx + 1) * ny` entries (face `i` is the west face of
/// cell `i`); `water_y`/`air_y` have `nx * (ny + 1)` entries (face `j` is the
/// south face of row `j`). Outer faces hold the boundary fluxes.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceFluxes {
    pub nx: usize,
    pub ny: usize,
    pub water_x: Vec<f64>,
    pub water_y: Vec<f64>,
    pub air_x: Vec<f64>,
    pub air_y: Vec<f64>,
}

pub(crate) fn evaluate_fluxes(
    medium: &Medium,
    fluids: &FluidProps,
    coeffs: &FaceCoeffs,
    h_w: &Grid,
    h_nw: &Grid,
) -> FaceFluxes {
    let g = &medium.geom;
    let (nx, ny) = (g.nx, g.ny);
    let mut water_x = vec![0.0; (nx + 1) * ny];
    let mut air_x = vec![0.0; (nx + 1) * ny];
    for j in 0..ny {
        for i in 0..nx.saturating_sub(1) {
            let (c1, c2) = (j * nx + i, j * nx + i + 1);
            let f = j * (nx - 1) + i;
            let out = j * (nx + 1) + i + 1;
            water_x[out] = coeffs.x_w[f] * (h_w.data[c1] - h_w.data[c2]);
            air_x[out] = coeffs.x_a[f] * (h_nw.data[c1] - h_nw.data[c2]);
        }
    }
    let mut water_y = vec![0.0; nx * (ny + 1)];
    let mut air_y = vec![0.0; nx * (ny + 1)];
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx {
            let (c1, c2) = (j * nx + i, (j + 1) * nx + i);
            let f = j * nx + i;
            let out = (j + 1) * nx + i;
            water_y[out] = coeffs.y_w[f] * (h_w.data[c1] - h_w.data[c2] - coeffs.grav_dy);
            let rho_f = coeffs.y_rho[f];
            air_y[out] =
                coeffs.y_a[f] * (h_nw.data[c1] - h_nw.data[c2] - coeffs.grav_dy * rho_f / fluids.rho_w);
        }
    }
    for i in 0..nx {
        // bottom face: water enters upward when the outlet potential is higher
        let c = i;
        water_y[i] = coeffs.bottom_w[i] * (coeffs.outlet_water_head - h_w.data[c] - 0.5 * coeffs.grav_dy);
        let top = (ny - 1) * nx + i;
        let rho_f = coeffs.top_rho[i];
        // top face: positive +y flux leaves the domain
        air_y[ny * nx + i] =
            -coeffs.top_a[i] * (coeffs.inlet_air_head - h_nw.data[top] + 0.5 * coeffs.grav_dy * rho_f / fluids.rho_w);
    }
    FaceFluxes { nx, ny, water_x, water_y, air_x, air_y }
}

/// Cell-centre Darcy flux densities (cm/h).
#[derive(Debug, Clone, PartialEq)]
pub struct Velocities {
    pub v_w: Vec<[f64; 2]>,
    pub v_nw: Vec<[f64; 2]>,
    pub v_nw_abs: Grid,
}

pub(crate) fn cell_velocities(medium: &Medium, fluxes: &FaceFluxes) -> Velocities {
    let g = &medium.geom;
    let (nx, ny) = (g.nx, g.ny);
    let mut v_w = Vec::with_capacity(nx * ny);
    let mut v_nw = Vec::with_capacity(nx * ny);
    let mut abs = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let xw = j * (nx + 1) + i;
            let ys = j * nx + i;
            let yn = (j + 1) * nx + i;
            let w = [
                0.5 * (fluxes.water_x[xw] + fluxes.water_x[xw + 1]) / g.dy,
                0.5 * (fluxes.water_y[ys] + fluxes.water_y[yn]) / g.dx,
            ];
            let a = [
                0.5 * (fluxes.air_x[xw] + fluxes.air_x[xw + 1]) / g.dy,
                0.5 * (fluxes.air_y[ys] + fluxes.air_y[yn]) / g.dx,
            ];
            v_w.push(w);
            v_nw.push(a);
            abs.push(a[0].hypot(a[1]));
        }
    }
    Velocities { v_w, v_nw, v_nw_abs: Grid { nx, ny, data: abs } }
}
