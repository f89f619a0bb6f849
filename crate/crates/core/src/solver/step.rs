//! Backward-Euler step of the coupled water/air head equations.
//!
//! Each Picard iteration freezes conductivities, upstream directions and face
//! densities at the latest iterate and linearizes the storage terms around
//! it (the mass-conservative "modified Picard" form). The linear system is
//! solved for head increments; iteration stops once the largest increment,
//! relative to the largest head magnitude (at least 1 cm), drops below the
//! tolerance.

use super::flux::{cell_velocities, evaluate_fluxes, face_coeffs, FaceCoeffs, FaceFluxes, Velocities};
use super::linsolve::{bicgstab, BlockSystem};
use super::state::{cell_props, CellProps};
use super::{BoundaryConditions, Medium, Snapshot, SolverError, State};
use crate::constitutive::FluidProps;
use crate::grid::Grid;

/// Regularization added to degenerate air rows (fully saturated cells),
/// in water-content units. It vanishes from the converged equations.
const AIR_ROW_FLOOR: f64 = 1e-14;
const LINEAR_REL_TOL: f64 = 1e-11;
const LINEAR_MAX_ITER: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { tolerance: 1e-6, max_iterations: 50 }
    }
}

/// Net boundary inflow during one step: water volume (cm² per unit depth)
/// and air mass (g per unit depth).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundaryFluxes {
    pub water_in: f64,
    pub air_mass_in: f64,
}

impl std::ops::AddAssign for BoundaryFluxes {
    fn add_assign(&mut self, o: Self) {
        self.water_in += o.water_in;
        self.air_mass_in += o.air_mass_in;
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: State,
    pub boundary: BoundaryFluxes,
    pub iterations: usize,
    /// Final relative head update.
    pub update: f64,
}

/// The discretized column: medium, fluids, boundary conditions and solver
/// switches. Stateless; `advance` maps a state to the next one.
#[derive(Debug, Clone)]
pub struct ColumnModel {
    pub medium: Medium,
    pub fluids: FluidProps,
    pub boundary: BoundaryConditions,
    pub gravity: bool,
    pub picard: PicardOptions,
}

impl ColumnModel {
    fn coeffs(&self, t: f64, h_w: &Grid, h_nw: &Grid, props: &[CellProps]) -> FaceCoeffs {
        face_coeffs(&self.medium, &self.fluids, &self.boundary, self.gravity, t, h_w, h_nw, props)
    }

    /// Face fluxes evaluated with coefficients taken from the state itself.
    pub fn face_fluxes(&self, state: &State) -> FaceFluxes {
        let props = cell_props(&self.medium, &self.fluids, &state.h_w, &state.h_nw);
        let coeffs = self.coeffs(state.t, &state.h_w, &state.h_nw, &props);
        evaluate_fluxes(&self.medium, &self.fluids, &coeffs, &state.h_w, &state.h_nw)
    }

    pub fn darcy_velocity(&self, state: &State) -> Velocities {
        cell_velocities(&self.medium, &self.face_fluxes(state))
    }

    pub fn snapshot(&self, state: &State) -> Snapshot {
        let props = cell_props(&self.medium, &self.fluids, &state.h_w, &state.h_nw);
        let g = &self.medium.geom;
        let s_nw = Grid { nx: g.nx, ny: g.ny, data: props.iter().map(|p| 1.0 - p.s_ew).collect() };
        Snapshot {
            t: state.t,
            s_nw,
            v_nw_abs: self.darcy_velocity(state).v_nw_abs,
            h_nw: state.h_nw.clone(),
            h_w: state.h_w.clone(),
        }
    }

    /// Advances `state` by `dt` hours.
    pub fn advance(&self, state: &State, dt: f64) -> Result<StepOutcome, SolverError> {
        if !(dt > 0.0) {
            return Err(SolverError::InvalidConfig(format!("time step must be positive, got {dt}")));
        }
        let medium = &self.medium;
        let fluids = &self.fluids;
        let g = &medium.geom;
        let (nx, ny) = (g.nx, g.ny);
        let n = nx * ny;
        let t_new = state.t + dt;
        let area = g.cell_area();
        let sw = dt / area;
        let sa = dt / (area * fluids.rho_0_nw);
        let lambda = fluids.compressibility;

        let old = cell_props(medium, fluids, &state.h_w, &state.h_nw);
        let mut h_w = state.h_w.clone();
        let mut h_nw = state.h_nw.clone();
        let mut last_update = f64::INFINITY;

        for iteration in 1..=self.picard.max_iterations {
            let props = cell_props(medium, fluids, &h_w, &h_nw);
            let coeffs = self.coeffs(t_new, &h_w, &h_nw, &props);
            let fluxes = evaluate_fluxes(medium, fluids, &coeffs, &h_w, &h_nw);

            let mut sys = BlockSystem::new(nx, ny);
            let mut rhs = vec![0.0; 2 * n];

            // storage
            for c in 0..n {
                let p = &props[c];
                let o = &old[c];
                rhs[2 * c] = -(p.theta_w - o.theta_w);
                rhs[2 * c + 1] = -(p.rho_nw * p.theta_nw - o.rho_nw * o.theta_nw) / fluids.rho_0_nw;
                // d(theta_w)/d(h_w) = -C, d(theta_w)/d(h_nw) = C
                let d_air_dnw = (lambda * p.theta_nw - p.rho_nw * p.c_w) / fluids.rho_0_nw;
                let d_air_dw = p.rho_nw * p.c_w / fluids.rho_0_nw;
                sys.diag[c] = [-p.c_w, p.c_w, d_air_dw, d_air_dnw];
            }

            // interior x faces
            for j in 0..ny {
                for i in 0..nx.saturating_sub(1) {
                    let (c1, c2) = (j * nx + i, j * nx + i + 1);
                    let f = j * (nx - 1) + i;
                    let out = j * (nx + 1) + i + 1;
                    let tw = sw * coeffs.x_w[f];
                    let ta = sa * coeffs.x_rho[f] * coeffs.x_a[f];
                    couple(&mut sys, c1, c2, tw, ta, true);
                    let fw = sw * fluxes.water_x[out];
                    let fa = sa * coeffs.x_rho[f] * fluxes.air_x[out];
                    rhs[2 * c1] -= fw;
                    rhs[2 * c2] += fw;
                    rhs[2 * c1 + 1] -= fa;
                    rhs[2 * c2 + 1] += fa;
                }
            }
            // interior y faces
            for j in 0..ny.saturating_sub(1) {
                for i in 0..nx {
                    let (c1, c2) = (j * nx + i, (j + 1) * nx + i);
                    let f = j * nx + i;
                    let out = (j + 1) * nx + i;
                    let tw = sw * coeffs.y_w[f];
                    let ta = sa * coeffs.y_rho[f] * coeffs.y_a[f];
                    couple(&mut sys, c1, c2, tw, ta, false);
                    let fw = sw * fluxes.water_y[out];
                    let fa = sa * coeffs.y_rho[f] * fluxes.air_y[out];
                    rhs[2 * c1] -= fw;
                    rhs[2 * c2] += fw;
                    rhs[2 * c1 + 1] -= fa;
                    rhs[2 * c2 + 1] += fa;
                }
            }
            // Dirichlet boundary faces
            for i in 0..nx {
                let bottom = i;
                sys.diag[bottom][0] += sw * coeffs.bottom_w[i];
                rhs[2 * bottom] += sw * fluxes.water_y[i];
                let top = (ny - 1) * nx + i;
                sys.diag[top][3] += sa * coeffs.top_rho[i] * coeffs.top_a[i];
                rhs[2 * top + 1] -= sa * coeffs.top_rho[i] * fluxes.air_y[ny * nx + i];
            }
            for d in sys.diag.iter_mut() {
                if d[3].abs() < AIR_ROW_FLOOR {
                    d[3] += AIR_ROW_FLOOR;
                }
            }

            let (delta, _) = bicgstab(&sys, &rhs, LINEAR_REL_TOL, LINEAR_MAX_ITER)
                .map_err(|e| SolverError::LinearSolver { iteration, message: e })?;
            if delta.iter().any(|v| !v.is_finite()) {
                return Err(SolverError::NonConvergence { iterations: iteration, residual: f64::NAN });
            }

            let mut max_delta = 0.0f64;
            for c in 0..n {
                h_w.data[c] += delta[2 * c];
                h_nw.data[c] += delta[2 * c + 1];
                max_delta = max_delta.max(delta[2 * c].abs()).max(delta[2 * c + 1].abs());
            }
            let scale = h_w
                .data
                .iter()
                .chain(&h_nw.data)
                .fold(1.0f64, |m, v| m.max(v.abs()));
            last_update = max_delta / scale;

            if last_update < self.picard.tolerance {
                let min_rho = h_nw.data.iter().fold(f64::INFINITY, |m, &h| m.min(fluids.rho_0_nw + lambda * h));
                if !(min_rho > 0.0) {
                    return Err(SolverError::NonPositiveDensity { t: t_new });
                }
                // boundary inflow with the coefficients of the final linear solve
                let final_fluxes = evaluate_fluxes(medium, fluids, &coeffs, &h_w, &h_nw);
                let mut water_in = 0.0;
                let mut air_mass_in = 0.0;
                for i in 0..nx {
                    water_in += final_fluxes.water_y[i];
                    air_mass_in -= coeffs.top_rho[i] * final_fluxes.air_y[ny * nx + i];
                }
                return Ok(StepOutcome {
                    state: State { h_w, h_nw, t: t_new },
                    boundary: BoundaryFluxes { water_in: water_in * dt, air_mass_in: air_mass_in * dt },
                    iterations: iteration,
                    update: last_update,
                });
            }
        }
        Err(SolverError::NonConvergence { iterations: self.picard.max_iterations, residual: last_update })
    }
}

impl ColumnModel {
    /// Forward-Euler step with storage linearized at the current state.
    /// Only stable for very small `dt`; kept as a reference scheme for the
    /// implicit integrator.
    pub fn explicit_step(&self, state: &State, dt: f64) -> Result<State, SolverError> {
        let medium = &self.medium;
        let fluids = &self.fluids;
        let g = &medium.geom;
        let (nx, ny) = (g.nx, g.ny);
        let n = nx * ny;
        let props = cell_props(medium, fluids, &state.h_w, &state.h_nw);
        let coeffs = self.coeffs(state.t, &state.h_w, &state.h_nw, &props);
        let fluxes = evaluate_fluxes(medium, fluids, &coeffs, &state.h_w, &state.h_nw);
        let rho0 = fluids.rho_0_nw;

        // net inflow per cell: water volume rate and air mass rate / rho0
        let mut rw = vec![0.0; n];
        let mut ra = vec![0.0; n];
        for j in 0..ny {
            for i in 0..nx.saturating_sub(1) {
                let (c1, c2) = (j * nx + i, j * nx + i + 1);
                let fw = fluxes.water_x[j * (nx + 1) + i + 1];
                let fa = coeffs.x_rho[j * (nx - 1) + i] * fluxes.air_x[j * (nx + 1) + i + 1] / rho0;
                rw[c1] -= fw;
                rw[c2] += fw;
                ra[c1] -= fa;
                ra[c2] += fa;
            }
        }
        for j in 0..ny.saturating_sub(1) {
            for i in 0..nx {
                let (c1, c2) = (j * nx + i, (j + 1) * nx + i);
                let fw = fluxes.water_y[(j + 1) * nx + i];
                let fa = coeffs.y_rho[j * nx + i] * fluxes.air_y[(j + 1) * nx + i] / rho0;
                rw[c1] -= fw;
                rw[c2] += fw;
                ra[c1] -= fa;
                ra[c2] += fa;
            }
        }
        for i in 0..nx {
            rw[i] += fluxes.water_y[i];
            ra[(ny - 1) * nx + i] -= coeffs.top_rho[i] * fluxes.air_y[ny * nx + i] / rho0;
        }

        let scale = dt / g.cell_area();
        let mut h_w = state.h_w.clone();
        let mut h_nw = state.h_nw.clone();
        for c in 0..n {
            let p = &props[c];
            let (a, b) = (-p.c_w, p.c_w);
            let (cc, d) = (p.rho_nw * p.c_w / rho0, (fluids.compressibility * p.theta_nw - p.rho_nw * p.c_w) / rho0);
            let det = a * d - b * cc;
            if det == 0.0 || !det.is_finite() {
                return Err(SolverError::NonConvergence { iterations: 0, residual: f64::NAN });
            }
            let (x, y) = (scale * rw[c], scale * ra[c]);
            h_w.data[c] += (d * x - b * y) / det;
            h_nw.data[c] += (a * y - cc * x) / det;
        }
        Ok(State { h_w, h_nw, t: state.t + dt })
    }
}

#[inline]
fn couple(sys: &mut BlockSystem, c1: usize, c2: usize, tw: f64, ta: f64, east: bool) {
    sys.diag[c1][0] += tw;
    sys.diag[c2][0] += tw;
    sys.diag[c1][3] += ta;
    sys.diag[c2][3] += ta;
    if east {
        sys.east[c1] = [-tw, -ta];
    } else {
        sys.north[c1] = [-tw, -ta];
    }
}
