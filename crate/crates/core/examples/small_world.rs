//! Small-world indices of a ring lattice, a rewired ring and an
//! Erdos-Renyi graph of the same size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use soilnet::graph::UndirectedGraph;
use soilnet::graphmetrics::{erdos_renyi, small_world_indices};

fn ring(n: usize, k: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (1..=k / 2).map(move |d| (i, (i + d) % n))).collect()
}

fn main() {
    let (n, k) = (100, 6);
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let lattice = UndirectedGraph::from_edges(n, ring(n, k));
    let rewired = UndirectedGraph::from_edges(
        n,
        ring(n, k).into_iter().map(|(i, j)| if rng.random::<f64>() < 0.05 { (i, rng.random_range(0..n)) } else { (i, j) }),
    );
    let p = lattice.edge_count() as f64 / (n * (n - 1) / 2) as f64;
    let random = erdos_renyi(n, p, &mut rng);

    println!("{:>10}  {:>6}  {:>7}  {:>7}  {:>7}  {:>7}  {:>7}", "graph", "edges", "C", "L", "C/Cr", "L/Lr", "sigma");
    for (name, g) in [("lattice", &lattice), ("rewired", &rewired), ("random", &random)] {
        match small_world_indices(g, 20, 7) {
            Ok(s) => println!(
                "{name:>10}  {:>6}  {:>7.4}  {:>7.3}  {:>7.2}  {:>7.2}  {:>7.2}",
                g.edge_count(),
                s.clustering,
                s.path_length,
                s.clustering_ratio,
                s.path_ratio,
                s.sigma
            ),
            Err(e) => println!("{name:>10}  {e}"),
        }
    }
}
