//! Coupled water/air flow in the heterogeneous column.
//!
//! Cell-centred finite volumes on a structured vertical cross-section, with
//! backward-Euler time stepping and Picard iteration. `y` points upward;
//! row 0 sits on the outlet disk.

mod balance;
mod flux;
mod geometry;
mod linsolve;
mod medium;
mod run;
mod schedule;
mod state;
mod step;

pub use balance::{mass_balance, MassResiduals};
pub use flux::{FaceFluxes, Velocities};
pub use geometry::{GeometryConfig, GridGeometry};
pub use medium::{Medium, SoilConfig};
pub use run::{
    build_model, initial_state, run_simulation, BoundaryMode, DtSummary, SimulationConfig, SimulationControl,
    SimulationRun,
};
pub use schedule::{BoundarySchedule, PiecewiseLinear, ScheduleConfig, ScheduleKind};
pub use state::{phase_totals, Snapshot, SnapshotField, State};
pub use step::{BoundaryFluxes, ColumnModel, PicardOptions, StepOutcome};

use crate::constitutive::ConstitutiveError;
use crate::hetfield::FieldError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("Picard iteration did not converge after {iterations} iterations (relative head update {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("linear solve failed in Picard iteration {iteration}: {message}")]
    LinearSolver { iteration: usize, message: String },
    #[error("air density became non-positive at t = {t} h")]
    NonPositiveDensity { t: f64 },
    #[error("time step {dt:e} h fell below the floor {floor:e} h at t = {t} h: {cause}")]
    TimeStepUnderflow { t: f64, dt: f64, floor: f64, cause: String },
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Constitutive(#[from] ConstitutiveError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl SolverError {
    /// Errors after which a smaller time step may succeed.
    pub fn is_recoverable(&self) -> bool {
        matches!(
            self,
            SolverError::NonConvergence { .. }
                | SolverError::LinearSolver { .. }
                | SolverError::NonPositiveDensity { .. }
        )
    }
}

/// Boundary treatment of the column.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConditions {
    pub mode: BoundaryMode,
    pub schedule: BoundarySchedule,
}

impl BoundaryConditions {
    pub fn closed() -> Self {
        Self { mode: BoundaryMode::Closed, schedule: BoundarySchedule::constant(0.0, 0.0) }
    }

    pub fn column(schedule: BoundarySchedule) -> Self {
        Self { mode: BoundaryMode::Column, schedule }
    }

    pub fn is_open(&self) -> bool {
        self.mode == BoundaryMode::Column
    }

    /// `(inlet air head, outlet water head)` at time `t`, or `None` when closed.
    pub fn heads_at(&self, t: f64) -> Option<(f64, f64)> {
        self.is_open()
            .then(|| (self.schedule.inlet_air_head.value(t), self.schedule.outlet_water_head.value(t)))
    }
}
