//! Runs the default 64x64 column for one hour and reports the evolution of
//! the mean air saturation and the step-size history.

use soilnet::solver::{run_simulation, SimulationConfig};
use std::time::Instant;

fn main() {
    let config = SimulationConfig::default();
    let start = Instant::now();
    let run = run_simulation(&config).expect("simulation failed");
    println!("{:>8}  {:>10}  {:>10}  {:>12}", "t [h]", "mean S_nw", "max S_nw", "max |v_nw|");
    for s in &run.snapshots {
        println!("{:>8}  {:>10.5}  {:>10.5}  {:>12.5e}", s.t, s.s_nw.mean(), s.s_nw.max(), s.v_nw_abs.max());
    }
    let worst_water = run.steps.iter().map(|r| r.water_residual.abs()).fold(0.0, f64::max);
    let worst_air = run.steps.iter().map(|r| r.air_residual.abs()).fold(0.0, f64::max);
    println!(
        "\n{} steps accepted, {} rejected, dt in [{:.2e}, {:.2e}] h, {} Picard iterations",
        run.dt.accepted, run.dt.rejected, run.dt.smallest, run.dt.largest, run.dt.picard_iterations
    );
    println!("largest step residuals: water {worst_water:.2e} cm^2, air {worst_air:.2e} g/cm");
    println!("wall time {:.1} s", start.elapsed().as_secs_f64());
}
