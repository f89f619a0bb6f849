//! Degree, clustering, geodesic and small-world statistics of undirected graphs.

use crate::graph::UndirectedGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("no pair of distinct nodes is connected")]
    NoConnectedPairs,
    #[error("graph has no edges")]
    NoEdges,
    #[error("graph needs at least {0} nodes")]
    TooFewNodes(usize),
}

/// Edges among the neighbours of `i` over `k_i (k_i - 1) / 2`; zero when `k_i <= 1`.
pub fn node_clustering(g: &UndirectedGraph, i: usize) -> f64 {
    let nb = g.neighbors(i);
    let k = nb.len();
    if k <= 1 {
        return 0.0;
    }
    let mut links = 0usize;
    for (a, &u) in nb.iter().enumerate() {
        for &v in &nb[a + 1..] {
            if g.has_edge(u, v) {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (k * (k - 1)) as f64
}

/// Mean of `c_i` over all nodes, isolated ones included.
pub fn mean_clustering(g: &UndirectedGraph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    (0..n).map(|i| node_clustering(g, i)).sum::<f64>() / n as f64
}

/// `P(k)` indexed by degree, up to the largest degree present.
pub fn degree_distribution(g: &UndirectedGraph) -> Vec<f64> {
    let n = g.node_count();
    let k_max = (0..n).map(|i| g.degree(i)).max().unwrap_or(0);
    let mut counts = vec![0usize; k_max + 1];
    for i in 0..n {
        counts[g.degree(i)] += 1;
    }
    counts.into_iter().map(|c| c as f64 / n.max(1) as f64).collect()
}

/// Dijkstra with unit weights; `None` marks unreachable nodes.
pub fn shortest_paths(g: &UndirectedGraph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(0);
    heap.push(Reverse((0usize, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some_and(|best| d > best) {
            continue;
        }
        for &v in g.neighbors(u) {
            let nd = d + 1;
            if dist[v].is_none_or(|cur| nd < cur) {
                dist[v] = Some(nd);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathStats {
    /// Mean geodesic distance over connected pairs.
    pub mean: f64,
    pub connected_pairs: usize,
    pub total_pairs: usize,
}

impl PathStats {
    pub fn connected_fraction(&self) -> f64 {
        self.connected_pairs as f64 / self.total_pairs as f64
    }
}

/// Mean shortest-path length over the pairs that are connected.
pub fn avg_path_length(g: &UndirectedGraph) -> Result<PathStats, MetricsError> {
    let n = g.node_count();
    if n < 2 {
        return Err(MetricsError::TooFewNodes(2));
    }
    let per_source: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .map(|s| {
            shortest_paths(g, s)
                .into_iter()
                .skip(s + 1)
                .flatten()
                .fold((0, 0), |(sum, cnt), d| (sum + d, cnt + 1))
        })
        .collect();
    let (sum, pairs) = per_source.into_iter().fold((0usize, 0usize), |(a, b), (c, d)| (a + c, b + d));
    if pairs == 0 {
        return Err(MetricsError::NoConnectedPairs);
    }
    Ok(PathStats { mean: sum as f64 / pairs as f64, connected_pairs: pairs, total_pairs: n * (n - 1) / 2 })
}

pub fn component_count(g: &UndirectedGraph) -> usize {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &v in g.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    count
}

/// G(n, p) sample.
pub fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> UndirectedGraph {
    UndirectedGraph::from_fn(n, |_, _| rng.random::<f64>() < p)
}

pub const RANDOM_REPLICATES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallWorld {
    pub clustering: f64,
    pub path_length: f64,
    pub clustering_random: f64,
    pub path_length_random: f64,
    pub clustering_ratio: f64,
    pub path_ratio: f64,
    pub sigma: f64,
}

/// Compares `g` with `replicates` Erdős–Rényi graphs of matched density.
/// Replicate `r` draws from ChaCha20 stream `r` of `seed`. Random graphs
/// without any connected pair do not enter the path-length average.
pub fn small_world_indices(g: &UndirectedGraph, replicates: usize, seed: u64) -> Result<SmallWorld, MetricsError> {
    let n = g.node_count();
    let e = g.edge_count();
    if e == 0 {
        return Err(MetricsError::NoEdges);
    }
    let path = avg_path_length(g)?;
    let clustering = mean_clustering(g);
    let p = 2.0 * e as f64 / (n * (n - 1)) as f64;
    let samples: Vec<(f64, Option<f64>)> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let er = erdos_renyi(n, p, &mut rng);
            (mean_clustering(&er), avg_path_length(&er).ok().map(|s| s.mean))
        })
        .collect();
    let clustering_random = samples.iter().map(|s| s.0).sum::<f64>() / replicates as f64;
    let lens: Vec<f64> = samples.iter().filter_map(|s| s.1).collect();
    if lens.is_empty() {
        return Err(MetricsError::NoConnectedPairs);
    }
    let path_length_random = lens.iter().sum::<f64>() / lens.len() as f64;
    let clustering_ratio = clustering / clustering_random;
    let path_ratio = path.mean / path_length_random;
    Ok(SmallWorld {
        clustering,
        path_length: path.mean,
        clustering_random,
        path_length_random,
        clustering_ratio,
        path_ratio,
        sigma: clustering_ratio / path_ratio,
    })
}

/// `(k_i, c_i)` in node order.
pub fn kc_state_space(g: &UndirectedGraph) -> Vec<(usize, f64)> {
    (0..g.node_count()).map(|i| (g.degree(i), node_clustering(g, i))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeMetrics {
    pub degree: usize,
    pub clustering: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    pub mean_degree: f64,
    pub mean_clustering: f64,
    /// `None` when no pair is connected.
    pub path: Option<PathStats>,
    pub degree_histogram: Vec<f64>,
    pub components: usize,
    pub node_metrics: Vec<NodeMetrics>,
}

pub fn summarize(g: &UndirectedGraph) -> GraphSummary {
    let n = g.node_count();
    let node_metrics: Vec<NodeMetrics> = kc_state_space(g)
        .into_iter()
        .map(|(degree, clustering)| NodeMetrics { degree, clustering })
        .collect();
    GraphSummary {
        nodes: n,
        edges: g.edge_count(),
        mean_degree: if n == 0 { 0.0 } else { 2.0 * g.edge_count() as f64 / n as f64 },
        mean_clustering: mean_clustering(g),
        path: avg_path_length(g).ok(),
        degree_histogram: degree_distribution(g),
        components: component_count(g),
        node_metrics,
    }
}

pub fn degree_distribution_csv(summary: &GraphSummary) -> String {
    let mut s = String::from("k,P\n");
    for (k, p) in summary.degree_histogram.iter().enumerate() {
        if *p > 0.0 {
            let _ = writeln!(s, "{k},{p:.16e}");
        }
    }
    s
}

pub fn kc_csv(summary: &GraphSummary, t: f64) -> String {
    let mut s = String::from("node,t,k,c\n");
    for (i, m) in summary.node_metrics.iter().enumerate() {
        let _ = writeln!(s, "{i},{t},{},{:.16e}", m.degree, m.clustering);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::VecDeque;

    fn complete(n: usize) -> UndirectedGraph {
        UndirectedGraph::from_fn(n, |_, _| true)
    }

    fn star(leaves: usize) -> UndirectedGraph {
        UndirectedGraph::from_edges(leaves + 1, (1..=leaves).map(|j| (0, j)))
    }

    fn ring(n: usize, k: usize) -> UndirectedGraph {
        UndirectedGraph::from_fn(n, |i, j| {
            let d = j - i;
            d.min(n - d) <= k / 2
        })
    }

    fn random(n: usize, p: f64, seed: u64) -> UndirectedGraph {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        erdos_renyi(n, p, &mut rng)
    }

    fn triangle_oracle(g: &UndirectedGraph, i: usize) -> f64 {
        let n = g.node_count();
        let k = g.degree(i);
        if k <= 1 {
            return 0.0;
        }
        let mut t = 0;
        for a in 0..n {
            for b in 0..n {
                if a < b && g.has_edge(i, a) && g.has_edge(i, b) && g.has_edge(a, b) {
                    t += 1;
                }
            }
        }
        2.0 * t as f64 / (k * (k - 1)) as f64
    }

    fn floyd_warshall(g: &UndirectedGraph) -> Vec<Vec<Option<usize>>> {
        let n = g.node_count();
        let mut d = vec![vec![None; n]; n];
        for i in 0..n {
            d[i][i] = Some(0);
            for &j in g.neighbors(i) {
                d[i][j] = Some(1);
            }
        }
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(a), Some(b)) = (d[i][m], d[m][j]) {
                        if d[i][j].is_none_or(|c| a + b < c) {
                            d[i][j] = Some(a + b);
                        }
                    }
                }
            }
        }
        d
    }

    fn bfs(g: &UndirectedGraph, s: usize) -> Vec<Option<usize>> {
        let mut d = vec![None; g.node_count()];
        d[s] = Some(0);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in g.neighbors(u) {
                if d[v].is_none() {
                    d[v] = Some(d[u].unwrap() + 1);
                    q.push_back(v);
                }
            }
        }
        d
    }

    #[test]
    fn clustering_examples() {
        let tri = complete(3);
        assert!((0..3).all(|i| node_clustering(&tri, i) == 1.0));
        assert_eq!(node_clustering(&star(4), 0), 0.0);
        assert_eq!(mean_clustering(&complete(5)), 1.0);
        assert_eq!(mean_clustering(&UndirectedGraph::empty(6)), 0.0);
        assert_eq!(mean_clustering(&ring(20, 4)), 0.5);
    }

    #[test]
    fn clustering_matches_triangle_counter() {
        let g = random(25, 0.3, 1);
        for i in 0..25 {
            assert_eq!(node_clustering(&g, i), triangle_oracle(&g, i));
        }
    }

    #[test]
    fn degree_distribution_examples() {
        assert_eq!(degree_distribution(&complete(4)), vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(degree_distribution(&UndirectedGraph::empty(3)), vec![1.0]);
        for seed in 0..10 {
            let g = random(30, 0.2, seed);
            let p = degree_distribution(&g);
            let total: f64 = p.iter().sum();
            let mean: f64 = p.iter().enumerate().map(|(k, pk)| k as f64 * pk).sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!((mean - 2.0 * g.edge_count() as f64 / 30.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shortest_path_examples() {
        let p3 = UndirectedGraph::from_edges(3, [(0, 1), (1, 2)]);
        assert_eq!(shortest_paths(&p3, 0), vec![Some(0), Some(1), Some(2)]);
        assert_eq!(shortest_paths(&UndirectedGraph::empty(2), 0), vec![Some(0), None]);
    }

    #[test]
    fn dijkstra_matches_floyd_warshall() {
        for seed in 0..20 {
            let g = random(30, 0.08, seed);
            let fw = floyd_warshall(&g);
            for s in 0..30 {
                assert_eq!(shortest_paths(&g, s), fw[s]);
            }
        }
    }

    #[test]
    fn path_length_examples() {
        assert_eq!(avg_path_length(&complete(7)).unwrap().mean, 1.0);
        let p3 = UndirectedGraph::from_edges(3, [(0, 1), (1, 2)]);
        assert!((avg_path_length(&p3).unwrap().mean - 4.0 / 3.0).abs() < 1e-15);
        let two_k2 = UndirectedGraph::from_edges(4, [(0, 1), (2, 3)]);
        let s = avg_path_length(&two_k2).unwrap();
        assert_eq!(s.mean, 1.0);
        assert!((s.connected_fraction() - 2.0 / 6.0).abs() < 1e-15);
        assert_eq!(avg_path_length(&UndirectedGraph::empty(5)), Err(MetricsError::NoConnectedPairs));
    }

    #[test]
    fn random_graph_is_its_own_baseline() {
        let g = random(100, 0.08, 99);
        let sw = small_world_indices(&g, 20, 7).unwrap();
        assert!((sw.clustering_ratio - 1.0).abs() < 0.25, "{sw:?}");
        assert!((sw.path_ratio - 1.0).abs() < 0.25, "{sw:?}");
    }

    #[test]
    fn ring_lattice_is_highly_clustered() {
        let g = ring(100, 6);
        assert!((mean_clustering(&g) - 0.6).abs() < 1e-12);
        let sw = small_world_indices(&g, 20, 3).unwrap();
        assert!(sw.clustering_ratio > 5.0, "{sw:?}");
    }

    #[test]
    fn star_has_zero_clustering_ratio() {
        let sw = small_world_indices(&star(9), 20, 1).unwrap();
        assert_eq!(sw.clustering_ratio, 0.0);
        assert_eq!(small_world_indices(&UndirectedGraph::empty(4), 20, 1), Err(MetricsError::NoEdges));
    }

    #[test]
    fn kc_examples() {
        assert_eq!(kc_state_space(&complete(4)), vec![(3, 1.0); 4]);
        let s = kc_state_space(&star(5));
        assert_eq!(s[0], (5, 0.0));
        assert!(s[1..].iter().all(|&p| p == (1, 0.0)));
        let g = random(20, 0.3, 4);
        for (i, (k, c)) in kc_state_space(&g).into_iter().enumerate() {
            assert_eq!(k, g.degree(i));
            assert_eq!(c, node_clustering(&g, i));
        }
    }

    #[test]
    fn summary_satisfies_handshake() {
        let g = random(40, 0.15, 12);
        let s = summarize(&g);
        let twice_e: f64 = s.degree_histogram.iter().enumerate().map(|(k, p)| k as f64 * p * 40.0).sum();
        assert!((twice_e - 2.0 * s.edges as f64).abs() < 1e-9);
        let c: f64 = s.node_metrics.iter().map(|m| m.clustering).sum::<f64>() / 40.0;
        assert_eq!(c, s.mean_clustering);
    }

    #[test]
    fn components_counted() {
        assert_eq!(component_count(&UndirectedGraph::from_edges(5, [(0, 1), (2, 3)])), 3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn dijkstra_equals_bfs(seed in any::<u64>(), n in 2usize..40, p in 0.0f64..0.3) {
            let g = random(n, p, seed);
            for s in 0..n {
                prop_assert_eq!(shortest_paths(&g, s), bfs(&g, s));
            }
        }

        #[test]
        fn clustering_in_unit_interval(seed in any::<u64>(), n in 1usize..30, p in 0.0f64..1.0) {
            let g = random(n, p, seed);
            let c = mean_clustering(&g);
            prop_assert!((0.0..=1.0).contains(&c));
            if let Ok(s) = avg_path_length(&g) {
                prop_assert!(s.mean >= 1.0);
            }
        }
    }
}
