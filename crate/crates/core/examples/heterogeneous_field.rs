//! Samples the clamped-normal parameter field and prints summary statistics
//! and a coarse text picture of the intrinsic permeability.

use soilnet::hetfield::{sample_field, FieldParam, FieldSpecs};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20090405);
    let field = sample_field(64, 64, &FieldSpecs::default(), seed).unwrap();
    println!("seed {seed}");
    for which in [FieldParam::ThetaS, FieldParam::KIntrinsic, FieldParam::NVg] {
        let g = field.param(which);
        let mean = g.mean();
        let sd = (g.data.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / g.len() as f64).sqrt();
        println!("{:>12}: mean {mean:.4e}  sd {sd:.3e}  range [{:.4e}, {:.4e}]", which.name(), g.min(), g.max());
    }

    let k = field.param(FieldParam::KIntrinsic);
    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    let (lo, hi) = (k.min(), k.max());
    println!("\nk_intrinsic, 4x4 block means (top row first):");
    for bj in (0..16).rev() {
        let line: String = (0..16)
            .map(|bi| {
                let mut s = 0.0;
                for j in 0..4 {
                    for i in 0..4 {
                        s += k.get(4 * bi + i, 4 * bj + j);
                    }
                }
                let level = ((s / 16.0 - lo) / (hi - lo) * 9.0).round() as usize;
                shades[level.min(9)]
            })
            .collect();
        println!("  {line}");
    }
}
