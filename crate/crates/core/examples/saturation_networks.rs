//! Simulates a 32x32 column, cuts the air saturation into vertical profiles
//! above the disk and builds the correlation and Euclidean networks at each
//! snapshot.

use soilnet::graphmetrics::summarize;
use soilnet::netbuilder::{build_correlation_network, build_euclidean_network};
use soilnet::profiler::{extract_profiles, resample, Region};
use soilnet::solver::{run_simulation, GridGeometry, SimulationConfig};

fn main() {
    let mut config = SimulationConfig::default();
    config.geometry.nx = 32;
    config.geometry.ny = 32;
    config.control.snapshot_times = vec![0.01, 0.1, 0.4, 1.0];
    let run = run_simulation(&config).expect("simulation failed");
    let geom = GridGeometry::from_config(&config.geometry).unwrap();
    let region = Region::above_disk(&geom);

    println!("{:>6}  {:>12}  {:>8}  {:>8}  {:>12}  {:>8}  {:>8}", "t [h]", "corr edges", "C", "L", "eucl edges", "C", "L");
    for snap in &run.snapshots {
        let lattice = resample(&snap.s_nw, &geom, 48, 48, &region).unwrap();
        let profiles = extract_profiles(&lattice, "S_nw", snap.t).unwrap();
        let corr = summarize(&build_correlation_network(&profiles, 0.05).unwrap().graph);
        let eucl = summarize(&build_euclidean_network(&profiles, 0.7, None).unwrap().graph);
        let path = |s: &soilnet::graphmetrics::GraphSummary| s.path.as_ref().map_or(f64::NAN, |p| p.mean);
        println!(
            "{:>6}  {:>12}  {:>8.4}  {:>8.4}  {:>12}  {:>8.4}  {:>8.4}",
            snap.t,
            corr.edges,
            corr.mean_clustering,
            path(&corr),
            eucl.edges,
            eucl.mean_clustering,
            path(&eucl)
        );
    }
}
