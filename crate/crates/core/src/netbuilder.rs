//! Similarity networks over vertical profiles.
//!
//! Two edge rules are supported. Under the correlation rule two profiles are
//! linked when their Pearson correlation is significant (two-tailed p-value
//! at most `xi`, Student t with `L - 2` degrees of freedom). Under the
//! Euclidean rule they are linked when they are *dissimilar*: distance at
//! least `fraction * d_max`.

use crate::graph::UndirectedGraph;
use crate::profiler::ProfileSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("profile has zero variance, correlation undefined")]
    ZeroVariance,
    #[error("profiles have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 samples per profile, got {0}")]
    TooShort(usize),
    #[error("invalid threshold: {0}")]
    InvalidThreshold(String),
    #[error("temporal blocks need at least 2 profile sets with matching shapes")]
    TooFewTimes,
    #[error("snapshot times are not uniformly spaced (step {first} vs {found} h)")]
    NonUniformTimes { first: f64, found: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    CorrelationPvalue,
    Euclidean,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::CorrelationPvalue => "correlation_pvalue",
            Metric::Euclidean => "euclidean",
        }
    }
}

/// Edge rule with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// Edge iff `p <= xi`.
    PValue { xi: f64 },
    /// Edge iff `d >= fraction * d_max`.
    Distance { fraction: f64, d_max: f64 },
}

impl Threshold {
    pub fn metric(&self) -> Metric {
        match self {
            Threshold::PValue { .. } => Metric::CorrelationPvalue,
            Threshold::Distance { .. } => Metric::Euclidean,
        }
    }

    fn describe(&self) -> String {
        match self {
            Threshold::PValue { xi } => format!("p<={xi}"),
            Threshold::Distance { fraction, d_max } => format!("d>={fraction}*{d_max:.16e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    pub graph: UndirectedGraph,
    pub threshold: Threshold,
    pub t: f64,
    pub field_name: String,
    pub samples: usize,
    /// Set when the edge rule could not be applied meaningfully (all
    /// distances zero); the graph is then empty.
    pub degenerate: bool,
}

impl SimilarityGraph {
    pub fn metric(&self) -> Metric {
        self.threshold.metric()
    }

    pub fn header(&self) -> String {
        format!(
            "# metric={} threshold={} t={} field={} N={} L={}{}\n",
            self.metric().name(),
            self.threshold.describe(),
            self.t,
            self.field_name,
            self.graph.node_count(),
            self.samples,
            if self.degenerate { " degenerate=true" } else { "" }
        )
    }
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<(), NetError> {
    if a.len() != b.len() {
        return Err(NetError::LengthMismatch(a.len(), b.len()));
    }
    Ok(())
}

/// Centred copy and its sum of squares.
fn centred(v: &[f64]) -> (Vec<f64>, f64) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let c: Vec<f64> = v.iter().map(|x| x - mean).collect();
    let ss = c.iter().map(|x| x * x).sum();
    (c, ss)
}

fn corr_centred(a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)) -> f64 {
    let cov: f64 = a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum();
    (cov / (a.1 * b.1).sqrt()).clamp(-1.0, 1.0)
}

/// Pearson correlation coefficient.
pub fn correlation(a: &[f64], b: &[f64]) -> Result<f64, NetError> {
    check_lengths(a, b)?;
    if a.len() < 3 {
        return Err(NetError::TooShort(a.len()));
    }
    let (ca, cb) = (centred(a), centred(b));
    if ca.1 == 0.0 || cb.1 == 0.0 {
        return Err(NetError::ZeroVariance);
    }
    Ok(corr_centred(&ca, &cb))
}

/// Two-tailed p-value of a sample correlation `c` over `l` pairs, from the
/// Student t distribution with `l - 2` degrees of freedom.
pub fn p_value(c: f64, l: usize) -> f64 {
    assert!(l >= 3, "p_value needs at least 3 samples");
    let r2 = c * c;
    if r2 >= 1.0 {
        return 0.0;
    }
    // P(|T| >= t) = I_{df/(df+t^2)}(df/2, 1/2) and df/(df+t^2) = 1 - r^2
    let df = (l - 2) as f64;
    beta_reg(0.5 * df, 0.5, 1.0 - r2).clamp(0.0, 1.0)
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn check_xi(xi: f64) -> Result<(), NetError> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(NetError::InvalidThreshold(format!("xi must lie in (0, 1), got {xi}")));
    }
    Ok(())
}

fn check_fraction(fraction: f64) -> Result<(), NetError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(NetError::InvalidThreshold(format!("fraction must lie in (0, 1], got {fraction}")));
    }
    Ok(())
}

/// Upper-triangle pair predicate evaluated in parallel, row by row.
fn parallel_graph(n: usize, edge: impl Fn(usize, usize) -> bool + Sync) -> UndirectedGraph {
    let rows: Vec<Vec<usize>> =
        (0..n).into_par_iter().map(|i| (i + 1..n).filter(|&j| edge(i, j)).collect()).collect();
    UndirectedGraph::from_edges(n, rows.into_iter().enumerate().flat_map(|(i, r)| r.into_iter().map(move |j| (i, j))))
}

/// Correlation rule; zero-variance profiles stay isolated.
pub fn build_correlation_network(profiles: &ProfileSet, xi: f64) -> Result<SimilarityGraph, NetError> {
    check_xi(xi)?;
    let l = profiles.samples();
    let cent: Vec<_> = profiles.values.iter().map(|v| centred(v)).collect();
    let graph = parallel_graph(profiles.nodes(), |i, j| {
        cent[i].1 > 0.0 && cent[j].1 > 0.0 && p_value(corr_centred(&cent[i], &cent[j]), l) <= xi
    });
    Ok(SimilarityGraph {
        graph,
        threshold: Threshold::PValue { xi },
        t: profiles.t,
        field_name: profiles.field_name.clone(),
        samples: l,
        degenerate: false,
    })
}

fn distance_matrix(a: &ProfileSet, b: &ProfileSet) -> Vec<f64> {
    let n = b.nodes();
    (0..a.nodes())
        .into_par_iter()
        .flat_map_iter(|i| (0..n).map(move |j| euclidean(&a.values[i], &b.values[j])))
        .collect()
}

/// Largest pairwise distance within one profile set.
pub fn max_distance(profiles: &ProfileSet) -> f64 {
    distance_matrix(profiles, profiles).into_iter().fold(0.0, f64::max)
}

/// Euclidean (dissimilarity) rule. `d_max` defaults to the largest pairwise
/// distance of this set; pass a value to share one scale across times.
pub fn build_euclidean_network(
    profiles: &ProfileSet,
    fraction: f64,
    d_max: Option<f64>,
) -> Result<SimilarityGraph, NetError> {
    check_fraction(fraction)?;
    let n = profiles.nodes();
    let dist = distance_matrix(profiles, profiles);
    let d_max = d_max.unwrap_or_else(|| dist.iter().cloned().fold(0.0, f64::max));
    let degenerate = !(d_max > 0.0);
    let cut = fraction * d_max;
    let graph = if degenerate {
        UndirectedGraph::empty(n)
    } else {
        UndirectedGraph::from_fn(n, |i, j| dist[i * n + j] >= cut)
    };
    Ok(SimilarityGraph {
        graph,
        threshold: Threshold::Distance { fraction, d_max },
        t: profiles.t,
        field_name: profiles.field_name.clone(),
        samples: profiles.samples(),
        degenerate,
    })
}

/// Edge rule used for cross-time blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockRule {
    Correlation { xi: f64 },
    /// `d_max` is taken per block.
    Euclidean { fraction: f64 },
}

/// Dense `N x N` 0/1 matrix; entry `(i, j)` relates profile `i` at the
/// reference time to profile `j` at the later time. The diagonal is kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockAdjacency {
    pub n: usize,
    pub entries: Vec<bool>,
}

impl BlockAdjacency {
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.n + j]
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.n * self.n * 2);
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    s.push(',');
                }
                s.push(if self.get(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }
}

/// Spatio-temporal adjacency `B`: `blocks[k][r]` is the block between
/// reference time `times[r]` and `times[r + k]`, present when `r + k < n`.
/// Row `k = 0` holds the purely spatial relations.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalBlockMatrix {
    pub times: Vec<f64>,
    pub delta_t: f64,
    pub rule: BlockRule,
    pub blocks: Vec<Vec<Option<BlockAdjacency>>>,
}

impl TemporalBlockMatrix {
    /// Time granulation `n = 1 + (t_f - t_0) / dt`.
    pub fn granulation(&self) -> usize {
        self.times.len()
    }

    /// `(lag k, reference index r, block)` for every present block.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BlockAdjacency)> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(k, row)| row.iter().enumerate().filter_map(move |(r, b)| b.as_ref().map(|b| (k, r, b))))
    }
}

fn block(a: &ProfileSet, b: &ProfileSet, rule: BlockRule) -> BlockAdjacency {
    let n = a.nodes();
    let entries = match rule {
        BlockRule::Correlation { xi } => {
            let l = a.samples();
            let ca: Vec<_> = a.values.iter().map(|v| centred(v)).collect();
            let cb: Vec<_> = b.values.iter().map(|v| centred(v)).collect();
            (0..n)
                .into_par_iter()
                .flat_map_iter(|i| {
                    let (ca, cb) = (&ca, &cb);
                    (0..n).map(move |j| {
                        ca[i].1 > 0.0 && cb[j].1 > 0.0 && p_value(corr_centred(&ca[i], &cb[j]), l) <= xi
                    })
                })
                .collect()
        }
        BlockRule::Euclidean { fraction } => {
            let d = distance_matrix(a, b);
            let d_max = d.iter().cloned().fold(0.0, f64::max);
            if d_max > 0.0 {
                d.iter().map(|&x| x >= fraction * d_max).collect()
            } else {
                vec![false; n * n]
            }
        }
    };
    BlockAdjacency { n, entries }
}

/// Builds every block of `B` from profile sets at uniformly spaced times.
pub fn temporal_blocks(sets: &[ProfileSet], rule: BlockRule) -> Result<TemporalBlockMatrix, NetError> {
    if sets.len() < 2 {
        return Err(NetError::TooFewTimes);
    }
    let (n, l) = (sets[0].nodes(), sets[0].samples());
    if sets.iter().any(|s| s.nodes() != n || s.samples() != l) {
        return Err(NetError::TooFewTimes);
    }
    match rule {
        BlockRule::Correlation { xi } => check_xi(xi)?,
        BlockRule::Euclidean { fraction } => check_fraction(fraction)?,
    }
    let times: Vec<f64> = sets.iter().map(|s| s.t).collect();
    let delta_t = times[1] - times[0];
    if !(delta_t > 0.0) {
        return Err(NetError::NonUniformTimes { first: delta_t, found: delta_t });
    }
    for w in times.windows(2) {
        let d = w[1] - w[0];
        if (d - delta_t).abs() > 1e-9 * delta_t.abs().max(1.0) {
            return Err(NetError::NonUniformTimes { first: delta_t, found: d });
        }
    }
    let g = times.len();
    let blocks = (0..g)
        .map(|k| (0..g).map(|r| (r + k < g).then(|| block(&sets[r], &sets[r + k], rule))).collect())
        .collect();
    Ok(TemporalBlockMatrix { times, delta_t, rule, blocks })
}

/// Longest run of uniformly spaced values at the end of `times`.
pub fn uniform_tail(times: &[f64]) -> &[f64] {
    if times.len() < 2 {
        return times;
    }
    let last = times.len() - 1;
    let step = times[last] - times[last - 1];
    let mut start = last - 1;
    while start > 0 {
        let d = times[start] - times[start - 1];
        if (d - step).abs() > 1e-9 * step.abs().max(1.0) {
            break;
        }
        start -= 1;
    }
    &times[start..]
}

/// Edge list with metadata header.
pub fn edge_list_csv(g: &SimilarityGraph) -> String {
    let mut s = g.header();
    s.push_str(&g.graph.edge_list_csv());
    s
}

pub fn matrix_csv(g: &SimilarityGraph) -> String {
    let mut s = g.header();
    s.push_str(&g.graph.matrix_csv());
    s
}

pub fn block_header(b: &TemporalBlockMatrix, k: usize, r: usize, field: &str) -> String {
    let mut s = String::new();
    let rule = match b.rule {
        BlockRule::Correlation { xi } => format!("correlation_pvalue p<={xi}"),
        BlockRule::Euclidean { fraction } => format!("euclidean d>={fraction}*d_max(block)"),
    };
    let _ = writeln!(
        s,
        "# block k={k} t_ref={} t={} dt={} n={} rule={rule} field={field}",
        b.times[r],
        b.times[r + k],
        b.delta_t,
        b.granulation()
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(values: Vec<Vec<f64>>) -> ProfileSet {
        let n = values.len();
        ProfileSet::new("S_nw", 0.5, values, (0..n).map(|i| i as f64).collect()).unwrap()
    }

    fn random_set(n: usize, l: usize, seed: u64) -> ProfileSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        set((0..n).map(|_| (0..l).map(|_| rng.random::<f64>()).collect()).collect())
    }

    fn two_pass_pearson(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let mut sab = 0.0;
        let mut saa = 0.0;
        let mut sbb = 0.0;
        for k in 0..a.len() {
            sab += (a[k] - ma) * (b[k] - mb);
            saa += (a[k] - ma).powi(2);
            sbb += (b[k] - mb).powi(2);
        }
        sab / (saa.sqrt() * sbb.sqrt())
    }

    /// Two-tailed tail of Student t by composite Simpson on the density.
    fn t_tail_oracle(t: f64, df: f64) -> f64 {
        let ln_c = statrs::function::gamma::ln_gamma((df + 1.0) / 2.0)
            - statrs::function::gamma::ln_gamma(df / 2.0)
            - 0.5 * (df * std::f64::consts::PI).ln();
        let pdf = |x: f64| (ln_c - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
        let m = 200_000;
        let h = t / m as f64;
        let mut s = pdf(0.0) + pdf(t);
        for k in 1..m {
            s += pdf(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        1.0 - 2.0 * s * h / 3.0
    }

    #[test]
    fn correlation_extremes() {
        let a = [1.0, 3.0, 2.0, 5.0];
        assert!((correlation(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        let b: Vec<f64> = a.iter().map(|x| 7.0 - x).collect();
        assert!((correlation(&a, &b).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(correlation(&a, &[2.0; 4]), Err(NetError::ZeroVariance));
    }

    #[test]
    fn correlation_matches_two_pass() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [1.0, 2.0, 3.0, 100.0];
        assert!((correlation(&a, &b).unwrap() - two_pass_pearson(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn p_value_examples() {
        assert!((p_value(0.0, 20) - 1.0).abs() < 1e-15);
        assert_eq!(p_value(1.0, 20), 0.0);
        assert_eq!(p_value(-1.0, 20), 0.0);
        let c: f64 = 0.5;
        let t = c * (18.0 / (1.0 - c * c)).sqrt();
        let oracle = t_tail_oracle(t, 18.0);
        assert!((p_value(c, 20) - oracle).abs() < 1e-9, "{} vs {oracle}", p_value(c, 20));
        assert!((p_value(0.5, 20) - 0.024_769_558_804_109_7).abs() < 1e-10);
    }

    #[test]
    fn euclidean_examples() {
        assert_eq!(euclidean(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(euclidean(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a: Vec<f64> = (0..50).map(|_| rng.random::<f64>() * 10.0 - 5.0).collect();
            let b: Vec<f64> = (0..50).map(|_| rng.random::<f64>() * 10.0 - 5.0).collect();
            // Kahan-compensated sum of squares
            let (mut sum, mut comp) = (0.0f64, 0.0f64);
            for k in 0..50 {
                let y = (a[k] - b[k]).powi(2) - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            let e = sum.sqrt();
            assert!((euclidean(&a, &b) - e).abs() <= 1e-12 * e);
        }
    }

    #[test]
    fn affine_copies_form_complete_graph() {
        let base = [0.1, 0.4, 0.2, 0.9, 0.5];
        let s = set((0..6).map(|k| base.iter().map(|x| (k as f64 + 1.0) * x + k as f64).collect()).collect());
        let g = build_correlation_network(&s, 0.05).unwrap();
        assert_eq!(g.graph.edge_count(), 15);
    }

    #[test]
    fn white_noise_density_matches_xi() {
        let mut total = 0.0;
        for seed in 0..20 {
            let g = build_correlation_network(&random_set(50, 100, seed), 0.05).unwrap();
            total += g.graph.edge_count() as f64 / (50.0 * 49.0 / 2.0);
        }
        let density = total / 20.0;
        assert!((density - 0.05).abs() < 0.02, "density {density}");
    }

    #[test]
    fn correlation_network_matches_brute_force() {
        let s = set(vec![
            vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            vec![2.0, 4.1, 5.9, 8.2, 9.9, 12.1],
            vec![6.0, 5.0, 4.0, 3.0, 2.0, 1.0],
            vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0],
            vec![0.3, 0.1, 0.4, 0.1, 0.5, 0.9],
        ]);
        let g = build_correlation_network(&s, 0.05).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let e = i != j && p_value(two_pass_pearson(&s.values[i], &s.values[j]), 6) <= 0.05;
                assert_eq!(g.graph.has_edge(i, j), e, "({i},{j})");
            }
        }
    }

    #[test]
    fn zero_variance_nodes_are_isolated() {
        let s = set(vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![5.0, 5.0, 5.0]]);
        let g = build_correlation_network(&s, 0.5).unwrap();
        assert_eq!(g.graph.degree(2), 0);
    }

    #[test]
    fn identical_profiles_give_flagged_empty_graph() {
        let s = set(vec![vec![1.0, 2.0, 3.0]; 4]);
        let g = build_euclidean_network(&s, 0.7, None).unwrap();
        assert!(g.degenerate);
        assert_eq!(g.graph.edge_count(), 0);
    }

    #[test]
    fn two_clusters_give_complete_bipartite_graph() {
        let a = vec![0.0, 0.0, 1.0];
        let b = vec![1.0, 2.0, 0.0];
        let s = set(vec![a.clone(), b.clone(), a.clone(), b.clone(), b]);
        let g = build_euclidean_network(&s, 0.7, None).unwrap();
        let cluster = [0, 1, 0, 1, 1];
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(g.graph.has_edge(i, j), cluster[i] != cluster[j]);
            }
        }
    }

    #[test]
    fn euclidean_network_matches_brute_force() {
        let s = random_set(30, 12, 77);
        let g = build_euclidean_network(&s, 0.7, None).unwrap();
        let mut d_max = 0.0f64;
        for i in 0..30 {
            for j in 0..30 {
                d_max = d_max.max(euclidean(&s.values[i], &s.values[j]));
            }
        }
        for i in 0..30 {
            for j in 0..30 {
                let e = i != j && euclidean(&s.values[i], &s.values[j]) >= 0.7 * d_max;
                assert_eq!(g.graph.has_edge(i, j), e);
            }
        }
    }

    #[test]
    fn thresholds_are_monotone() {
        let s = random_set(25, 15, 5);
        let c1 = build_correlation_network(&s, 0.05).unwrap().graph;
        let c2 = build_correlation_network(&s, 0.2).unwrap().graph;
        assert!(c1.edges().all(|(i, j)| c2.has_edge(i, j)));
        let e1 = build_euclidean_network(&s, 0.8, None).unwrap().graph;
        let e2 = build_euclidean_network(&s, 0.6, None).unwrap().graph;
        assert!(e1.edges().all(|(i, j)| e2.has_edge(i, j)));
    }

    #[test]
    fn invariances() {
        let s = random_set(20, 10, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let affine = set(
            s.values
                .iter()
                .map(|v| {
                    let (a, b) = (0.5 + rng.random::<f64>() * 3.0, rng.random::<f64>() * 10.0 - 5.0);
                    v.iter().map(|x| a * x + b).collect()
                })
                .collect(),
        );
        assert_eq!(
            build_correlation_network(&s, 0.05).unwrap().graph,
            build_correlation_network(&affine, 0.05).unwrap().graph
        );
        // dyadic values make the shift exact, so distances are bit-identical
        let dyadic = set(s.values.iter().map(|v| v.iter().map(|x| (x * 1024.0).round() / 1024.0).collect()).collect());
        let shifted = set(dyadic.values.iter().map(|v| v.iter().map(|x| x + 0.25).collect()).collect());
        assert_eq!(
            build_euclidean_network(&dyadic, 0.7, None).unwrap().graph,
            build_euclidean_network(&shifted, 0.7, None).unwrap().graph
        );
    }

    fn timed(mut s: ProfileSet, t: f64) -> ProfileSet {
        s.t = t;
        s
    }

    #[test]
    fn zero_lag_blocks_match_spatial_graphs() {
        let sets: Vec<_> = (0..3).map(|k| timed(random_set(12, 8, 40 + k), 0.2 * (k + 1) as f64)).collect();
        for rule in [BlockRule::Correlation { xi: 0.05 }, BlockRule::Euclidean { fraction: 0.7 }] {
            let b = temporal_blocks(&sets, rule).unwrap();
            assert_eq!(b.granulation(), 3);
            for (r, s) in sets.iter().enumerate() {
                let g = match rule {
                    BlockRule::Correlation { xi } => build_correlation_network(s, xi).unwrap(),
                    BlockRule::Euclidean { fraction } => build_euclidean_network(s, fraction, None).unwrap(),
                };
                let blk = b.blocks[0][r].as_ref().unwrap();
                for i in 0..12 {
                    for j in 0..12 {
                        if i != j {
                            assert_eq!(blk.get(i, j), g.graph.has_edge(i, j));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn blocks_match_direct_pair_loop() {
        let sets: Vec<_> = (0..3).map(|k| timed(random_set(10, 7, 90 + k), 1.0 + 0.5 * k as f64)).collect();
        let b = temporal_blocks(&sets, BlockRule::Correlation { xi: 0.1 }).unwrap();
        let mut present = 0;
        for k in 0..3 {
            for r in 0..3 {
                let blk = &b.blocks[k][r];
                assert_eq!(blk.is_some(), r + k < 3);
                if let Some(blk) = blk {
                    present += 1;
                    for i in 0..10 {
                        for j in 0..10 {
                            let c = two_pass_pearson(&sets[r].values[i], &sets[r + k].values[j]);
                            assert_eq!(blk.get(i, j), p_value(c, 7) <= 0.1);
                        }
                    }
                }
            }
        }
        assert_eq!(present, 6);
    }

    #[test]
    fn constant_in_time_profiles_give_identical_blocks() {
        let base = random_set(8, 6, 3);
        let sets: Vec<_> = (0..4).map(|k| timed(base.clone(), k as f64 * 0.25)).collect();
        let b = temporal_blocks(&sets, BlockRule::Euclidean { fraction: 0.7 }).unwrap();
        let first = b.blocks[0][0].clone().unwrap();
        assert!(b.iter().all(|(_, _, blk)| *blk == first));
    }

    #[test]
    fn nonuniform_times_rejected() {
        let sets = vec![
            timed(random_set(4, 5, 1), 0.0),
            timed(random_set(4, 5, 2), 0.1),
            timed(random_set(4, 5, 3), 0.3),
        ];
        assert!(matches!(
            temporal_blocks(&sets, BlockRule::Euclidean { fraction: 0.7 }),
            Err(NetError::NonUniformTimes { .. })
        ));
    }

    #[test]
    fn uniform_tail_of_default_times() {
        let t = [0.005, 0.01, 0.02, 0.04, 0.08, 0.2, 0.4, 0.6, 0.8, 1.0];
        assert_eq!(uniform_tail(&t), &[0.2, 0.4, 0.6, 0.8, 1.0]);
    }
}
