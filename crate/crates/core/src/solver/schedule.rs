//! Time-dependent boundary heads.

use super::SolverError;
use serde::{Deserialize, Serialize};

/// Piecewise-linear function of time, held constant outside its breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    points: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, SolverError> {
        if points.is_empty() {
            return Err(SolverError::InvalidConfig("piecewise-linear schedule needs at least one point".into()));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(SolverError::InvalidConfig("schedule breakpoints must be strictly increasing in time".into()));
        }
        Ok(Self { points })
    }

    pub fn constant(v: f64) -> Self {
        Self { points: vec![(0.0, v)] }
    }

    pub fn value(&self, t: f64) -> f64 {
        let pts = &self.points;
        if t <= pts[0].0 {
            return pts[0].1;
        }
        let last = pts[pts.len() - 1];
        if t >= last.0 {
            return last.1;
        }
        let k = pts.partition_point(|p| p.0 <= t);
        let (t0, v0) = pts[k - 1];
        let (t1, v1) = pts[k];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].1 >= w[0].1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Ramp,
    Steps,
}

/// Inlet air head (top) and outlet water head (bottom) as functions of time.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySchedule {
    pub inlet_air_head: PiecewiseLinear,
    pub outlet_water_head: PiecewiseLinear,
    pub kind: ScheduleKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub kind: ScheduleKind,
    /// Inlet air head at t = 0, cm of water.
    pub inlet_start: f64,
    pub inlet_end: f64,
    pub outlet_start: f64,
    pub outlet_end: f64,
    /// Number of equal increments for the step schedule.
    pub steps: usize,
    /// Duration of each increment's linear rise, hours.
    pub step_rise: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            kind: ScheduleKind::Steps,
            inlet_start: 20.0,
            inlet_end: 40.0,
            outlet_start: 0.0,
            outlet_end: 10.0,
            steps: 4,
            step_rise: 0.005,
        }
    }
}

impl BoundarySchedule {
    /// Builds the schedule over `[0, t_end]`. The outlet always ramps linearly;
    /// the inlet ramps or rises in `steps` equal increments.
    pub fn from_config(c: &ScheduleConfig, t_end: f64) -> Result<Self, SolverError> {
        let horizon = if t_end > 0.0 { t_end } else { 1.0 };
        let outlet = PiecewiseLinear::new(vec![(0.0, c.outlet_start), (horizon, c.outlet_end)])?;
        let inlet = match c.kind {
            ScheduleKind::Ramp => PiecewiseLinear::new(vec![(0.0, c.inlet_start), (horizon, c.inlet_end)])?,
            ScheduleKind::Steps => {
                if c.steps == 0 {
                    return Err(SolverError::InvalidConfig("schedule.steps must be at least 1".into()));
                }
                let period = horizon / c.steps as f64;
                if !(c.step_rise > 0.0 && c.step_rise < period) {
                    return Err(SolverError::InvalidConfig(format!(
                        "schedule.step_rise must lie in (0, {period})"
                    )));
                }
                let inc = (c.inlet_end - c.inlet_start) / c.steps as f64;
                let mut pts = vec![(0.0, c.inlet_start)];
                for s in 0..c.steps {
                    let t0 = s as f64 * period;
                    let level = c.inlet_start + inc * s as f64;
                    if s > 0 {
                        pts.push((t0, level));
                    }
                    pts.push((t0 + c.step_rise, level + inc));
                }
                PiecewiseLinear::new(pts)?
            }
        };
        Ok(Self { inlet_air_head: inlet, outlet_water_head: outlet, kind: c.kind })
    }

    pub fn constant(inlet_air_head: f64, outlet_water_head: f64) -> Self {
        Self {
            inlet_air_head: PiecewiseLinear::constant(inlet_air_head),
            outlet_water_head: PiecewiseLinear::constant(outlet_water_head),
            kind: ScheduleKind::Ramp,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_interpolates() {
        let c = ScheduleConfig { kind: ScheduleKind::Ramp, inlet_end: 30.0, ..ScheduleConfig::default() };
        let s = BoundarySchedule::from_config(&c, 1.0).unwrap();
        assert_eq!(s.inlet_air_head.value(0.0), 20.0);
        assert!((s.inlet_air_head.value(0.5) - 25.0).abs() < 1e-12);
        assert_eq!(s.inlet_air_head.value(2.0), 30.0);
        assert!((s.outlet_water_head.value(0.25) - 2.5).abs() < 1e-12);
        assert!(s.inlet_air_head.is_non_decreasing());
    }

    #[test]
    fn steps_are_monotone_and_reach_end() {
        let c = ScheduleConfig { kind: ScheduleKind::Steps, inlet_end: 30.0, ..ScheduleConfig::default() };
        let s = BoundarySchedule::from_config(&c, 1.0).unwrap();
        assert!(s.inlet_air_head.is_non_decreasing());
        assert_eq!(s.inlet_air_head.value(0.0), 20.0);
        assert!((s.inlet_air_head.value(0.1) - 22.5).abs() < 1e-12);
        assert!((s.inlet_air_head.value(0.3) - 25.0).abs() < 1e-12);
        assert!((s.inlet_air_head.value(1.0) - 30.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unordered_points() {
        assert!(PiecewiseLinear::new(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
    }
}
