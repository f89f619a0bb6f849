use super::{
    mass_balance, BoundaryConditions, BoundaryFluxes, BoundarySchedule, ColumnModel, GeometryConfig, Medium,
    PicardOptions, ScheduleConfig, Snapshot, SoilConfig, SolverError, State,
};
use crate::constitutive::FluidProps;
use crate::hetfield::{sample_field, FieldSpecs, ParameterField};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    /// Air inlet on top, water outlet below the disk, impervious walls.
    Column,
    /// No flux through any boundary.
    Closed,
}

/// Time integration settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationControl {
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    /// Uniform initial air head, cm of water.
    pub initial_air_head: f64,
    pub boundary: BoundaryMode,
    pub gravity: bool,
    pub dt_initial: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub picard_tolerance: f64,
    pub picard_max_iterations: usize,
}

impl Default for SimulationControl {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            snapshot_times: vec![0.005, 0.01, 0.02, 0.04, 0.08, 0.2, 0.4, 0.6, 0.8, 1.0],
            initial_air_head: 20.0,
            boundary: BoundaryMode::Column,
            gravity: true,
            dt_initial: 1e-4,
            dt_min: 1e-7,
            dt_max: 1e-2,
            picard_tolerance: 1e-6,
            picard_max_iterations: 50,
        }
    }
}

impl SimulationControl {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::InvalidConfig(m));
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be finite and >= 0, got {}", self.t_end));
        }
        if self.snapshot_times.is_empty() {
            return bad("snapshot_times must not be empty".into());
        }
        if self.snapshot_times.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("snapshot_times must be strictly increasing".into());
        }
        if self.snapshot_times.iter().any(|&t| !(0.0..=self.t_end).contains(&t)) {
            return bad(format!("snapshot_times must lie within [0, t_end = {}]", self.t_end));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_initial && self.dt_initial <= self.dt_max) {
            return bad("need 0 < dt_min <= dt_initial <= dt_max".into());
        }
        if !(self.picard_tolerance > 0.0) || self.picard_max_iterations == 0 {
            return bad("picard_tolerance must be positive and picard_max_iterations at least 1".into());
        }
        Ok(())
    }
}

/// Everything needed to reproduce one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub geometry: GeometryConfig,
    pub soil: SoilConfig,
    pub fluids: FluidProps,
    pub field: FieldSpecs,
    pub seed: u64,
    pub schedule: ScheduleConfig,
    pub control: SimulationControl,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            geometry: GeometryConfig::default(),
            soil: SoilConfig::default(),
            fluids: FluidProps::default(),
            field: FieldSpecs::default(),
            seed: 20_090_405,
            schedule: ScheduleConfig::default(),
            control: SimulationControl::default(),
        }
    }
}

/// Step-size history of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtSummary {
    pub accepted: usize,
    pub rejected: usize,
    pub smallest: f64,
    pub largest: f64,
    pub picard_iterations: usize,
}

/// Per-step conservation record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    pub iterations: usize,
    pub inflow: BoundaryFluxes,
    pub water_residual: f64,
    pub air_residual: f64,
}

#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub field: ParameterField,
    pub snapshots: Vec<Snapshot>,
    pub dt: DtSummary,
    pub steps: Vec<StepRecord>,
    pub final_state: State,
}

pub fn build_model(config: &SimulationConfig, field: &ParameterField) -> Result<ColumnModel, SolverError> {
    config.fluids.validate()?;
    let medium = Medium::from_config(&config.geometry, field, &config.soil)?;
    let boundary = match config.control.boundary {
        BoundaryMode::Column => {
            BoundaryConditions::column(BoundarySchedule::from_config(&config.schedule, config.control.t_end)?)
        }
        BoundaryMode::Closed => BoundaryConditions::closed(),
    };
    Ok(ColumnModel {
        medium,
        fluids: config.fluids,
        boundary,
        gravity: config.control.gravity,
        picard: PicardOptions {
            tolerance: config.control.picard_tolerance,
            max_iterations: config.control.picard_max_iterations,
        },
    })
}

/// Uniform air head; water head hydrostatic about the outlet head at t = 0
/// (uniform when gravity is off).
pub fn initial_state(model: &ColumnModel, air_head: f64) -> State {
    let g = &model.medium.geom;
    let outlet = model.boundary.heads_at(0.0).map_or(0.0, |(_, o)| o);
    let mut s = State::uniform(g.nx, g.ny, outlet, air_head);
    if model.gravity {
        for j in 0..g.ny {
            for i in 0..g.nx {
                s.h_w.set(i, j, outlet - g.y_center(j));
            }
        }
    }
    s
}

const GROWTH_AFTER: usize = 5;
const GROWTH_FACTOR: f64 = 1.2;

/// Integrates from the initial condition to `t_end`, emitting snapshots at
/// the configured times. The step is halved on failure and grown by 1.2
/// after five consecutive successes.
pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationRun, SolverError> {
    config.control.validate()?;
    let field = sample_field(config.geometry.nx, config.geometry.ny, &config.field, config.seed)?;
    let model = build_model(config, &field)?;
    let ctl = &config.control;
    let mut state = initial_state(&model, ctl.initial_air_head);
    let time_eps = 1e-12 * ctl.t_end.max(1.0);

    let mut snapshots = Vec::with_capacity(ctl.snapshot_times.len());
    let mut pending = ctl.snapshot_times.iter().copied().peekable();
    while let Some(&ts) = pending.peek() {
        if ts <= time_eps {
            snapshots.push(model.snapshot(&state));
            pending.next();
        } else {
            break;
        }
    }

    let mut dt = ctl.dt_initial;
    let mut streak = 0usize;
    let mut summary = DtSummary { accepted: 0, rejected: 0, smallest: f64::INFINITY, largest: 0.0, picard_iterations: 0 };
    let mut steps = Vec::new();

    while state.t < ctl.t_end - time_eps {
        let target = pending.peek().copied().unwrap_or(ctl.t_end);
        let step = dt.min(target - state.t).min(ctl.t_end - state.t);
        match model.advance(&state, step) {
            Ok(out) => {
                let res = mass_balance(&state, &out.state, &out.boundary, &model.medium, &model.fluids);
                steps.push(StepRecord {
                    t: out.state.t,
                    dt: step,
                    iterations: out.iterations,
                    inflow: out.boundary,
                    water_residual: res.water,
                    air_residual: res.air_mass,
                });
                summary.accepted += 1;
                summary.picard_iterations += out.iterations;
                summary.smallest = summary.smallest.min(step);
                summary.largest = summary.largest.max(step);
                state = out.state;
                if (state.t - target).abs() <= time_eps {
                    state.t = target;
                    if pending.peek().is_some() {
                        snapshots.push(model.snapshot(&state));
                        pending.next();
                    }
                }
                streak += 1;
                if streak >= GROWTH_AFTER {
                    dt = (dt * GROWTH_FACTOR).min(ctl.dt_max);
                    streak = 0;
                }
            }
            Err(e) if e.is_recoverable() => {
                summary.rejected += 1;
                streak = 0;
                dt = step * 0.5;
                if dt < ctl.dt_min {
                    return Err(SolverError::TimeStepUnderflow {
                        t: state.t,
                        dt,
                        floor: ctl.dt_min,
                        cause: e.to_string(),
                    });
                }
            }
            Err(e) => return Err(e),
        }
    }
    if summary.accepted == 0 {
        summary.smallest = 0.0;
    }

    Ok(SimulationRun { field, snapshots, dt: summary, steps, final_state: state })
}
