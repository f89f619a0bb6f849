use super::{phase_totals, BoundaryFluxes, Medium, State};
use crate::constitutive::FluidProps;

/// Conservation residuals: change in storage minus net boundary inflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassResiduals {
    /// cm² per unit depth.
    pub water: f64,
    /// g per unit depth.
    pub air_mass: f64,
}

pub fn mass_balance(
    before: &State,
    after: &State,
    inflow: &BoundaryFluxes,
    medium: &Medium,
    fluids: &FluidProps,
) -> MassResiduals {
    let (w0, a0) = phase_totals(before, medium, fluids);
    let (w1, a1) = phase_totals(after, medium, fluids);
    MassResiduals { water: (w1 - w0) - inflow.water_in, air_mass: (a1 - a0) - inflow.air_mass_in }
}
