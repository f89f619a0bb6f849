//! Spatio-temporal block matrix for synthetic profiles that drift over
//! time; prints the edge density of every block.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use soilnet::netbuilder::{temporal_blocks, BlockRule};
use soilnet::profiler::ProfileSet;

fn main() {
    let (n, l) = (30, 40);
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let base: Vec<Vec<f64>> = (0..n).map(|_| (0..l).map(|_| rng.random::<f64>()).collect()).collect();
    let times = [0.2, 0.4, 0.6, 0.8, 1.0];
    let sets: Vec<ProfileSet> = times
        .iter()
        .map(|&t| {
            let values = base
                .iter()
                .map(|p| p.iter().enumerate().map(|(y, v)| v + t * (y as f64 / l as f64) + 0.1 * rng.random::<f64>()).collect())
                .collect();
            ProfileSet::new("synthetic", t, values, (0..n).map(|i| i as f64).collect()).unwrap()
        })
        .collect();

    for rule in [BlockRule::Correlation { xi: 0.05 }, BlockRule::Euclidean { fraction: 0.7 }] {
        let b = temporal_blocks(&sets, rule).unwrap();
        println!("{rule:?}: granulation {} at dt = {}", b.granulation(), b.delta_t);
        for (k, r, block) in b.iter() {
            let density = block.entries.iter().filter(|&&e| e).count() as f64 / (n * n) as f64;
            println!("  lag {k}  t_ref {:<4}  density {density:.3}", b.times[r]);
        }
    }
}
