//! Runs all four stages on a reduced 24x24 setup into a run directory
//! (first argument, default `pipeline_example` under the system temp dir)
//! and prints the metrics summary and the fits.

use soilnet::config::{RunConfig, DEFAULT_CONFIG_TEXT};
use soilnet::pipeline::{cmd_pipeline, RunContext, FITS_FILE, SUMMARY_FILE};
use std::path::PathBuf;

fn main() {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("pipeline_example"));
    let mut config = RunConfig::from_toml_str(DEFAULT_CONFIG_TEXT).unwrap();
    config.geometry.nx = 24;
    config.geometry.ny = 24;
    config.network.lattice_x = 32;
    config.network.lattice_y = 32;
    config.network.velocity_lattice_x = 31;
    config.output.dir = out.clone();

    let mut ctx = RunContext::new(config);
    ctx.force = true;
    ctx.verbose = true;
    if let Err(e) = cmd_pipeline(&ctx) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
    for file in [SUMMARY_FILE, FITS_FILE] {
        println!("\n{}:", out.join(file).display());
        print!("{}", std::fs::read_to_string(out.join(file)).unwrap());
    }
}
