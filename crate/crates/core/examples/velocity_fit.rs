//! Draws velocities from a truncated power law, recovers its parameters from
//! a log-binned histogram, then fits a k-c power law and the inverse
//! clustering sigmoid on synthetic data.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use soilnet::fitlab::{
    fit_kc_power_law, fit_sigmoid_inverse_clustering, fit_truncated_power_law, sample_truncated_power_law,
    sigmoid_model,
};

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let (v0, beta, kappa) = (0.05, 1.5, 0.85);
    let v = sample_truncated_power_law(50_000, v0, beta, kappa, &mut rng);
    let f = fit_truncated_power_law(&v).unwrap();
    println!("truncated power law, {} samples in {} bins", f.samples_used, f.bins_used);
    println!("  true   v0 = {v0:.4}  beta = {beta:.4}  kappa = {kappa:.4}");
    println!("  fitted v0 = {:.4}  beta = {:.4}  kappa = {:.4}  (residual {:.3e})", f.v0, f.beta, f.kappa, f.residual_norm);

    let pairs: Vec<(f64, f64)> = (2..40).map(|k| (k as f64, 2.61 * (k as f64).powf(-0.32) * (1.0 + 0.02 * ((k % 5) as f64 - 2.0)))).collect();
    let kc = fit_kc_power_law(&pairs).unwrap();
    println!("k-c power law on {} points: c = {:.4} k^{:.4}", kc.points, kc.amplitude, kc.exponent);

    let series: Vec<(f64, f64)> = (1..=10).map(|i| 0.1 * i as f64).map(|t| (t, sigmoid_model(t, 1.2, 1.8, 0.3))).collect();
    let s = fit_sigmoid_inverse_clustering(&series).unwrap();
    println!(
        "inverse clustering sigmoid: scale {:.4}  beta {:.4}  delta {:.4}  (residual {:.2e}, constant model {:.2e})",
        s.scale, s.beta, s.delta, s.residual_norm, s.constant_residual_norm
    );
}
