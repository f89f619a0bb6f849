//! File-based pipeline stages: simulate -> networks -> metrics -> fit.
//!
//! Each stage reads only what earlier stages wrote into the run directory,
//! so running the stages one by one and running `cmd_pipeline` produce the
//! same files. Outputs carry a `# soilnet <version> config=<hash>` header
//! and contain no timings, which keeps reruns byte-identical.

use crate::config::{DMaxMode, KcNetwork, RegionChoice, RunConfig};
use crate::fitlab::{
    failed_fit_row, fit_kc_power_law, fit_sigmoid_inverse_clustering, fit_truncated_power_law,
    inverse_mean_clustering_series, PowerLawFit, SigmoidFit, TruncatedPowerLawFit, FITS_CSV_HEADER,
};
use crate::graph::UndirectedGraph;
use crate::graphmetrics::{degree_distribution_csv, kc_csv, small_world_indices, summarize};
use crate::grid::Grid;
use crate::netbuilder::{
    block_header, build_correlation_network, build_euclidean_network, max_distance, temporal_blocks, uniform_tail,
    BlockRule, Metric, SimilarityGraph,
};
use crate::profiler::{extract_profiles, normalize_unit_interval, resample, ProfileSet, Region};
use crate::solver::{run_simulation, GridGeometry, SnapshotField};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Simulate,
    Networks,
    Metrics,
    Fit,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Simulate => "simulate",
            Stage::Networks => "networks",
            Stage::Metrics => "metrics",
            Stage::Fit => "fit",
        }
    }

    /// Files and directories the stage owns inside the run directory.
    fn outputs(self) -> &'static [&'static str] {
        match self {
            Stage::Simulate => &["fields", "snapshots", "simulation.csv", "run_meta.txt", "config.toml"],
            Stage::Networks => &["profiles", "networks", "blocks"],
            Stage::Metrics => &["metrics"],
            Stage::Fit => &["fits"],
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("stage {stage}: missing input {}", path.display())]
    MissingInput { stage: &'static str, path: PathBuf },
    #[error("stage {stage}: input {} was produced by a different config (expected {expected})", path.display())]
    StaleInput { stage: &'static str, path: PathBuf, expected: String },
    #[error("stage {stage}: output {} already exists; pass --force to overwrite", path.display())]
    OutputExists { stage: &'static str, path: PathBuf },
    #[error("run directory {} is locked by another process (remove .lock if stale)", .0.display())]
    Locked(PathBuf),
    #[error("stage {stage}: I/O error on {}: {source}", path.display())]
    Io { stage: &'static str, path: PathBuf, source: std::io::Error },
    #[error("stage {stage}: {message}")]
    Failed { stage: &'static str, message: String },
}

impl PipelineError {
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            PipelineError::MissingInput { stage, .. }
            | PipelineError::StaleInput { stage, .. }
            | PipelineError::OutputExists { stage, .. }
            | PipelineError::Io { stage, .. }
            | PipelineError::Failed { stage, .. } => Some(stage),
            PipelineError::Locked(_) => None,
        }
    }
}

fn failed(stage: Stage, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Failed { stage: stage.name(), message: e.to_string() }
}

/// Advisory lock on a run directory, released on drop.
#[derive(Debug)]
pub struct RunLock {
    path: PathBuf,
}

impl RunLock {
    pub fn acquire(dir: &Path) -> Result<Self, PipelineError> {
        fs::create_dir_all(dir).map_err(|source| PipelineError::Io { stage: "lock", path: dir.to_path_buf(), source })?;
        let path = dir.join(".lock");
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                use std::io::Write;
                let _ = writeln!(f, "{}", std::process::id());
                Ok(Self { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(PipelineError::Locked(dir.to_path_buf())),
            Err(source) => Err(PipelineError::Io { stage: "lock", path, source }),
        }
    }
}

impl Drop for RunLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Everything a stage needs: the validated config, the run directory and
/// the overwrite policy.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: RunConfig,
    pub out: PathBuf,
    pub force: bool,
    /// Print progress lines to standard output.
    pub verbose: bool,
}

impl RunContext {
    /// Uses `config.output.dir` as the run directory.
    pub fn new(config: RunConfig) -> Self {
        let out = config.output.dir.clone();
        Self { config, out, force: false, verbose: false }
    }

    fn log(&self, msg: &str) {
        if self.verbose {
            println!("{msg}");
        }
    }

    fn header(&self) -> String {
        self.config.header_line()
    }

    fn prepare(&self, stage: Stage) -> Result<(), PipelineError> {
        for name in stage.outputs() {
            let path = self.out.join(name);
            if !path.exists() {
                continue;
            }
            if !self.force {
                return Err(PipelineError::OutputExists { stage: stage.name(), path });
            }
            let res = if path.is_dir() { fs::remove_dir_all(&path) } else { fs::remove_file(&path) };
            res.map_err(|source| PipelineError::Io { stage: stage.name(), path: path.clone(), source })?;
        }
        Ok(())
    }

    fn write(&self, stage: Stage, rel: &str, body: &str) -> Result<(), PipelineError> {
        let path = self.out.join(rel);
        let io = |source| PipelineError::Io { stage: stage.name(), path: path.clone(), source };
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io)?;
        }
        let mut text = self.header();
        text.push('\n');
        text.push_str(body);
        fs::write(&path, text).map_err(io)
    }

    fn read(&self, stage: Stage, rel: &str) -> Result<String, PipelineError> {
        let path = self.out.join(rel);
        if !path.exists() {
            return Err(PipelineError::MissingInput { stage: stage.name(), path });
        }
        let text =
            fs::read_to_string(&path).map_err(|source| PipelineError::Io { stage: stage.name(), path: path.clone(), source })?;
        let expected = self.header();
        if text.lines().next() != Some(expected.as_str()) {
            return Err(PipelineError::StaleInput { stage: stage.name(), path, expected });
        }
        Ok(text)
    }

    fn times(&self) -> &[f64] {
        &self.config.simulation.snapshot_times
    }
}

pub fn snapshot_file(t: f64, field: SnapshotField) -> String {
    format!("snapshots/snap_t{t}_{}.csv", field.name())
}

pub fn profile_file(t: f64, field: &str) -> String {
    format!("profiles/profiles_t{t}_{field}.csv")
}

pub fn network_file(net: &str, t: f64) -> String {
    format!("networks/{net}_t{t}.csv")
}

pub fn network_matrix_file(net: &str, t: f64) -> String {
    format!("networks/{net}_t{t}_matrix.csv")
}

pub fn degree_file(net: &str, t: f64) -> String {
    format!("metrics/degree_{net}_t{t}.csv")
}

pub fn kc_file(net: &str, t: f64) -> String {
    format!("metrics/kc_{net}_t{t}.csv")
}

pub const SUMMARY_FILE: &str = "metrics/summary.csv";
pub const FITS_FILE: &str = "fits/fits.csv";
pub const INVERSE_CLUSTERING_FILE: &str = "fits/inverse_clustering.csv";

pub const SATURATION_CORRELATION: &str = "saturation_correlation";
pub const SATURATION_EUCLIDEAN: &str = "saturation_euclidean";

/// Name of the velocity network series for the configured metric.
pub fn velocity_network(config: &RunConfig) -> &'static str {
    match config.network.velocity_metric {
        Metric::CorrelationPvalue => "velocity_correlation",
        Metric::Euclidean => "velocity_euclidean",
    }
}

/// The network series analyzed by the metrics stage, in output order.
pub fn network_names(config: &RunConfig) -> [&'static str; 3] {
    [SATURATION_CORRELATION, SATURATION_EUCLIDEAN, velocity_network(config)]
}

fn geometry(ctx: &RunContext, stage: Stage) -> Result<GridGeometry, PipelineError> {
    GridGeometry::from_config(&ctx.config.geometry).map_err(|e| failed(stage, e))
}

fn region(ctx: &RunContext, geom: &GridGeometry) -> Region {
    match ctx.config.network.region {
        RegionChoice::AboveDisk => Region::above_disk(geom),
        RegionChoice::Whole => Region::whole(geom),
    }
}

fn simulate(ctx: &RunContext) -> Result<(), PipelineError> {
    let stage = Stage::Simulate;
    ctx.prepare(stage)?;
    let sim = ctx.config.simulation();
    ctx.log(&format!(
        "[simulate] {}x{} grid, t_end = {} h, seed {}",
        sim.geometry.nx, sim.geometry.ny, sim.control.t_end, sim.seed
    ));
    let run = run_simulation(&sim).map_err(|e| failed(stage, e))?;

    for (name, grid) in [("theta_s", &run.field.theta_s), ("k_intrinsic", &run.field.k_intrinsic), ("n_vg", &run.field.n_vg)] {
        ctx.write(stage, &format!("fields/{name}.csv"), &format!("# field={name} seed={}\n{}", run.field.seed, grid.to_csv_rows()))?;
    }
    let mut table = String::from("t,mean_S_nw,min_S_nw,max_S_nw,mean_v_nw_abs,max_v_nw_abs,mean_h_nw,mean_h_w\n");
    for snap in &run.snapshots {
        for field in SnapshotField::ALL {
            let g = snap.field(field);
            let body = format!("# t={} field={} nx={} ny={}\n{}", snap.t, field.name(), g.nx, g.ny, g.to_csv_rows());
            ctx.write(stage, &snapshot_file(snap.t, field), &body)?;
        }
        let _ = writeln!(
            table,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            snap.t,
            snap.s_nw.mean(),
            snap.s_nw.min(),
            snap.s_nw.max(),
            snap.v_nw_abs.mean(),
            snap.v_nw_abs.max(),
            snap.h_nw.mean(),
            snap.h_w.mean()
        );
        ctx.log(&format!("[simulate] t = {:<6} mean S_nw = {:.6}  max |v_nw| = {:.4e} cm/h", snap.t, snap.s_nw.mean(), snap.v_nw_abs.max()));
    }
    ctx.write(stage, "simulation.csv", &table)?;
    let worst_w = run.steps.iter().fold(0.0f64, |m, s| m.max(s.water_residual.abs()));
    let worst_a = run.steps.iter().fold(0.0f64, |m, s| m.max(s.air_residual.abs()));
    let meta = format!(
        "version={}\nconfig_hash={}\nseed={}\ngrid={}x{}\nsnapshots={}\naccepted_steps={}\nrejected_steps={}\n\
         dt_min_used={:e}\ndt_max_used={:e}\npicard_iterations={}\nmax_step_water_residual={:e}\nmax_step_air_residual={:e}\n",
        env!("CARGO_PKG_VERSION"),
        ctx.config.hash(),
        sim.seed,
        sim.geometry.nx,
        sim.geometry.ny,
        run.snapshots.len(),
        run.dt.accepted,
        run.dt.rejected,
        run.dt.smallest,
        run.dt.largest,
        run.dt.picard_iterations,
        worst_w,
        worst_a
    );
    ctx.write(stage, "run_meta.txt", &meta)?;
    // relative to the run directory, so the tree does not depend on its location
    let mut saved = ctx.config.clone();
    saved.output.dir = PathBuf::from(".");
    ctx.write(stage, "config.toml", &saved.to_toml_string())?;
    ctx.log(&format!("[simulate] {} accepted / {} rejected steps", run.dt.accepted, run.dt.rejected));
    Ok(())
}

fn read_grid(ctx: &RunContext, stage: Stage, rel: &str) -> Result<Grid, PipelineError> {
    let text = ctx.read(stage, rel)?;
    Grid::from_csv_rows(&text).map_err(|e| failed(stage, format!("{rel}: {e}")))
}

fn profiles_at(
    ctx: &RunContext,
    geom: &GridGeometry,
    t: f64,
    field: SnapshotField,
    x_points: usize,
) -> Result<ProfileSet, PipelineError> {
    let stage = Stage::Networks;
    let grid = read_grid(ctx, stage, &snapshot_file(t, field))?;
    if grid.nx != geom.nx || grid.ny != geom.ny {
        return Err(failed(stage, format!("snapshot grid {}x{} does not match the geometry", grid.nx, grid.ny)));
    }
    let lattice = resample(&grid, geom, x_points, ctx.config.network.lattice_y, &region(ctx, geom))
        .map_err(|e| failed(stage, e))?;
    extract_profiles(&lattice, field.name(), t).map_err(|e| failed(stage, e))
}

fn write_graph(ctx: &RunContext, net: &str, g: &SimilarityGraph) -> Result<(), PipelineError> {
    let stage = Stage::Networks;
    let header = g.header();
    ctx.write(stage, &network_file(net, g.t), &format!("{header}{}", g.graph.edge_list_csv()))?;
    ctx.write(stage, &network_matrix_file(net, g.t), &format!("{header}{}", g.graph.matrix_csv()))
}

fn networks(ctx: &RunContext) -> Result<(), PipelineError> {
    let stage = Stage::Networks;
    ctx.prepare(stage)?;
    let geom = geometry(ctx, stage)?;
    let nc = &ctx.config.network;
    let times = ctx.times().to_vec();

    let mut saturation = Vec::with_capacity(times.len());
    let mut velocity = Vec::with_capacity(times.len());
    for &t in &times {
        let s = profiles_at(ctx, &geom, t, SnapshotField::SNw, nc.lattice_x)?;
        let v = profiles_at(ctx, &geom, t, SnapshotField::VNwAbs, nc.velocity_lattice_x)?;
        ctx.write(stage, &profile_file(t, s.field_name.as_str()), &s.to_csv())?;
        ctx.write(stage, &profile_file(t, v.field_name.as_str()), &v.to_csv())?;
        saturation.push(s);
        velocity.push(v);
    }
    let global = |sets: &[ProfileSet]| match nc.d_max_mode {
        DMaxMode::PerSet => None,
        DMaxMode::Global => Some(sets.iter().map(max_distance).fold(0.0, f64::max)),
    };
    let sat_dmax = global(&saturation);
    let vel_dmax = global(&velocity);
    let vel_net = velocity_network(&ctx.config);

    for (s, v) in saturation.iter().zip(&velocity) {
        let corr = build_correlation_network(s, nc.xi).map_err(|e| failed(stage, e))?;
        let eucl = build_euclidean_network(s, nc.fraction, sat_dmax).map_err(|e| failed(stage, e))?;
        let vel = match nc.velocity_metric {
            Metric::CorrelationPvalue => build_correlation_network(v, nc.xi),
            Metric::Euclidean => build_euclidean_network(v, nc.fraction, vel_dmax),
        }
        .map_err(|e| failed(stage, e))?;
        write_graph(ctx, SATURATION_CORRELATION, &corr)?;
        write_graph(ctx, SATURATION_EUCLIDEAN, &eucl)?;
        write_graph(ctx, vel_net, &vel)?;
        ctx.log(&format!(
            "[networks] t = {:<6} edges: correlation {:>5}  euclidean {:>5}  velocity {:>5}",
            s.t,
            corr.graph.edge_count(),
            eucl.graph.edge_count(),
            vel.graph.edge_count()
        ));
    }

    let tail = uniform_tail(&times);
    if tail.len() >= 2 {
        let sets = &saturation[times.len() - tail.len()..];
        let rule = match nc.block_metric {
            Metric::CorrelationPvalue => BlockRule::Correlation { xi: nc.xi },
            Metric::Euclidean => BlockRule::Euclidean { fraction: nc.fraction },
        };
        let b = temporal_blocks(sets, rule).map_err(|e| failed(stage, e))?;
        for (k, r, block) in b.iter() {
            let body = format!("{}{}", block_header(&b, k, r, "S_nw"), block.to_csv());
            ctx.write(stage, &format!("blocks/B_k{k}_t{}.csv", b.times[r]), &body)?;
        }
        ctx.log(&format!("[networks] temporal blocks: granulation {} at dt = {} h", b.granulation(), b.delta_t));
    } else {
        ctx.log("[networks] fewer than two uniformly spaced snapshot times; no temporal blocks");
    }
    Ok(())
}

fn header_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .filter(|l| l.starts_with('#'))
        .flat_map(|l| l.split_whitespace())
        .find_map(|tok| tok.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
}

fn read_graph(ctx: &RunContext, stage: Stage, rel: &str) -> Result<UndirectedGraph, PipelineError> {
    let text = ctx.read(stage, rel)?;
    let n: usize = header_value(&text, "N")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| failed(stage, format!("{rel}: header lacks N=")))?;
    UndirectedGraph::from_edge_list_csv(n, &text).map_err(|e| failed(stage, format!("{rel}: {e}")))
}

fn opt(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.16e}"),
        _ => "NA".into(),
    }
}

pub const SUMMARY_HEADER: &str = "network,t,N,E,mean_degree,C,L_path,connected_fraction,components,C_rand,L_rand,C_ratio,L_ratio,sigma";

fn metrics(ctx: &RunContext) -> Result<(), PipelineError> {
    let stage = Stage::Metrics;
    ctx.prepare(stage)?;
    let times = ctx.times().to_vec();
    let mut summary = format!("{SUMMARY_HEADER}\n");
    for (ni, net) in network_names(&ctx.config).into_iter().enumerate() {
        for (ti, &t) in times.iter().enumerate() {
            let g = read_graph(ctx, stage, &network_file(net, t))?;
            let s = summarize(&g);
            let seed = ctx.config.field.seed ^ (((ni as u64) << 32) | ti as u64);
            let sw = small_world_indices(&g, ctx.config.network.random_replicates, seed).ok();
            let _ = writeln!(
                summary,
                "{net},{t},{},{},{:.16e},{:.16e},{},{},{},{},{},{},{},{}",
                s.nodes,
                s.edges,
                s.mean_degree,
                s.mean_clustering,
                opt(s.path.map(|p| p.mean)),
                opt(s.path.map(|p| p.connected_fraction())),
                s.components,
                opt(sw.map(|w| w.clustering_random)),
                opt(sw.map(|w| w.path_length_random)),
                opt(sw.map(|w| w.clustering_ratio)),
                opt(sw.map(|w| w.path_ratio)),
                opt(sw.map(|w| w.sigma)),
            );
            ctx.write(stage, &degree_file(net, t), &degree_distribution_csv(&s))?;
            ctx.write(stage, &kc_file(net, t), &kc_csv(&s, t))?;
        }
        ctx.log(&format!("[metrics] {net}: {} graphs summarized", times.len()));
    }
    ctx.write(stage, SUMMARY_FILE, &summary)
}

/// `(k, c)` per node from a k-c file.
fn read_kc(ctx: &RunContext, stage: Stage, rel: &str) -> Result<Vec<(f64, f64)>, PipelineError> {
    let text = ctx.read(stage, rel)?;
    let mut out = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("node")) {
        let cols: Vec<&str> = line.split(',').collect();
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| failed(stage, format!("{rel}: {e}")));
        if cols.len() != 4 {
            return Err(failed(stage, format!("{rel}: expected 4 columns")));
        }
        out.push((parse(cols[2])?, parse(cols[3])?));
    }
    Ok(out)
}

fn fit(ctx: &RunContext) -> Result<(), PipelineError> {
    let stage = Stage::Fit;
    ctx.prepare(stage)?;
    let geom = geometry(ctx, stage)?;
    let times = ctx.times().to_vec();

    // air speeds of every non-disk cell over all snapshots, normalized jointly
    let mut speeds = Vec::new();
    for &t in &times {
        let g = read_grid(ctx, stage, &snapshot_file(t, SnapshotField::VNwAbs))?;
        for j in (0..g.ny).filter(|&j| !geom.is_disk_row(j)) {
            speeds.extend((0..g.nx).map(|i| g.get(i, j)));
        }
    }
    let normalized = normalize_unit_interval(&speeds);
    let tpl_row = match fit_truncated_power_law(&normalized) {
        Ok(f) => f.csv_row(),
        Err(e) => failed_fit_row(TruncatedPowerLawFit::FAMILY, &e),
    };

    let kc_net = match ctx.config.fit.kc_network {
        KcNetwork::SaturationCorrelation => SATURATION_CORRELATION,
        KcNetwork::SaturationEuclidean => SATURATION_EUCLIDEAN,
    };
    let mut pairs = Vec::new();
    for &t in &times {
        pairs.extend(read_kc(ctx, stage, &kc_file(kc_net, t))?);
    }
    let kc_row = match fit_kc_power_law(&pairs) {
        Ok(f) => f.csv_row(),
        Err(e) => failed_fit_row(PowerLawFit::FAMILY, &e),
    };

    let vel_net = velocity_network(&ctx.config);
    let mut clustering = Vec::new();
    for &t in &times {
        let c = read_kc(ctx, stage, &kc_file(vel_net, t))?.into_iter().map(|p| p.1).collect();
        clustering.push((t, c));
    }
    let mut series_csv = String::from("t,inverse_clustering\n");
    let sig_row = match inverse_mean_clustering_series(&clustering, ctx.config.fit.inverse_clustering) {
        Ok(series) => {
            for (t, v) in &series.points {
                let _ = writeln!(series_csv, "{t},{v:.16e}");
            }
            for t in &series.dropped {
                let _ = writeln!(series_csv, "{t},NA");
            }
            match fit_sigmoid_inverse_clustering(&series.points) {
                Ok(f) => f.csv_row(series.points.len()),
                Err(e) => failed_fit_row(SigmoidFit::FAMILY, &e),
            }
        }
        Err(e) => failed_fit_row(SigmoidFit::FAMILY, &e),
    };
    ctx.write(stage, INVERSE_CLUSTERING_FILE, &series_csv)?;
    let body = format!("{FITS_CSV_HEADER}\n{tpl_row}\n{kc_row}\n{sig_row}\n");
    ctx.write(stage, FITS_FILE, &body)?;
    for row in [&tpl_row, &kc_row, &sig_row] {
        ctx.log(&format!("[fit] {row}"));
    }
    Ok(())
}

fn locked(ctx: &RunContext, f: impl FnOnce(&RunContext) -> Result<(), PipelineError>) -> Result<(), PipelineError> {
    let _lock = RunLock::acquire(&ctx.out)?;
    f(ctx)
}

pub fn cmd_simulate(ctx: &RunContext) -> Result<(), PipelineError> {
    locked(ctx, simulate)
}

pub fn cmd_networks(ctx: &RunContext) -> Result<(), PipelineError> {
    locked(ctx, networks)
}

pub fn cmd_metrics(ctx: &RunContext) -> Result<(), PipelineError> {
    locked(ctx, metrics)
}

pub fn cmd_fit(ctx: &RunContext) -> Result<(), PipelineError> {
    locked(ctx, fit)
}

/// All four stages in order under one lock.
pub fn cmd_pipeline(ctx: &RunContext) -> Result<(), PipelineError> {
    locked(ctx, |ctx| {
        simulate(ctx)?;
        networks(ctx)?;
        metrics(ctx)?;
        fit(ctx)
    })
}
