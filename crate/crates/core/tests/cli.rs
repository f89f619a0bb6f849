use soilnet::config::{RunConfig, DEFAULT_CONFIG_TEXT};
use soilnet::pipeline::{network_file, network_names, FITS_FILE, SATURATION_CORRELATION, SATURATION_EUCLIDEAN};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn small_config() -> RunConfig {
    let mut c = RunConfig::from_toml_str(DEFAULT_CONFIG_TEXT).unwrap();
    c.geometry.nx = 16;
    c.geometry.ny = 16;
    c.simulation.t_end = 0.2;
    c.simulation.snapshot_times = vec![0.002, 0.005, 0.01, 0.02, 0.04, 0.06, 0.08, 0.12, 0.16, 0.2];
    c.network.lattice_x = 24;
    c.network.lattice_y = 24;
    c.network.velocity_lattice_x = 21;
    c.network.random_replicates = 4;
    c
}

fn write_config(dir: &Path, c: &RunConfig) -> PathBuf {
    let path = dir.join("small.cfg");
    std::fs::write(&path, c.to_toml_string()).unwrap();
    path
}

fn soilnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soilnet")).args(args).output().unwrap()
}

fn run_ok(args: &[&str]) {
    let o = soilnet(args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn staged_and_pipelined_runs_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config();
    let cfg_path = write_config(tmp.path(), &cfg);
    let cfg_arg = cfg_path.to_str().unwrap();
    let staged = tmp.path().join("staged");
    let piped = tmp.path().join("piped");
    let staged_arg = staged.to_str().unwrap();
    for cmd in ["simulate", "networks", "metrics", "fit"] {
        run_ok(&[cmd, "--config", cfg_arg, "--out", staged_arg]);
    }
    run_ok(&["pipeline", "--config", cfg_arg, "--out", piped.to_str().unwrap()]);

    let (a, b) = (tree(&staged), tree(&piped));
    assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
    for (name, bytes) in &a {
        assert!(bytes == &b[name], "{name} differs");
    }

    let header = cfg.header_line();
    for (name, bytes) in &a {
        let first = String::from_utf8_lossy(bytes).lines().next().unwrap_or("").to_string();
        assert_eq!(first, header, "{name}");
    }

    let times = &cfg.simulation.snapshot_times;
    let snapshot_sets = times
        .iter()
        .filter(|t| a.keys().any(|k| k.starts_with(&format!("snapshots/snap_t{t}_"))))
        .count();
    assert_eq!(snapshot_sets, 10);
    let count = |net: &str| times.iter().filter(|&&t| a.contains_key(&network_file(net, t))).count();
    assert_eq!(count(SATURATION_CORRELATION) + count(SATURATION_EUCLIDEAN), 20);
    assert_eq!(count(network_names(&cfg)[2]), 10);

    let fits = String::from_utf8_lossy(&a[FITS_FILE]).into_owned();
    assert_eq!(fits.lines().skip(2).filter(|l| !l.is_empty()).count(), 3, "{fits}");
}

#[test]
fn rerun_requires_force_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = write_config(tmp.path(), &small_config());
    let out = tmp.path().join("run");
    let args = ["simulate", "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap()];
    run_ok(&args);
    let before = tree(&out);

    let o = soilnet(&args);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("--force") && err.contains("simulate"), "{err}");

    let mut forced = args.to_vec();
    forced.push("--force");
    run_ok(&forced);
    assert_eq!(before, tree(&out));
}

#[test]
fn missing_input_names_stage_and_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = write_config(tmp.path(), &small_config());
    let out = tmp.path().join("empty");
    let o = soilnet(&["metrics", "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("stage metrics") && err.contains("missing input"), "{err}");
}

#[test]
fn output_from_another_config_is_stale() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config();
    let cfg_path = write_config(tmp.path(), &cfg);
    let out = tmp.path().join("run");
    let out_arg = out.to_str().unwrap();
    run_ok(&["simulate", "--config", cfg_path.to_str().unwrap(), "--out", out_arg]);
    let o = soilnet(&["networks", "--config", cfg_path.to_str().unwrap(), "--out", out_arg, "--seed", "3"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("different config"));
}

#[test]
fn bad_config_is_rejected_with_field_name() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.cfg");
    std::fs::write(&path, DEFAULT_CONFIG_TEXT.replace("xi = 0.05", "xi = 2.0")).unwrap();
    let o = soilnet(&["simulate", "--config", path.to_str().unwrap(), "--out", tmp.path().join("r").to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("network.xi"));

    std::fs::write(&path, DEFAULT_CONFIG_TEXT.replace("snapshot_times =", "# snapshot_times =")).unwrap();
    let o = soilnet(&["simulate", "--config", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("snapshot_times"));
}

#[test]
fn written_config_round_trips() {
    let cfg = small_config();
    let back = RunConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.hash(), cfg.hash());
}
