//! Fixtures shared by the benchmarks.

use nbdf_core::rng::stream;
use nbdf_core::sampling::FieldSampler;
use nbdf_core::{Field, FormInstance};
use rand::Rng;

/// Sorted breakpoints for an `F_k`, drawn from `[-10, 10]`.
pub fn breakpoints(k: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, "bench/breakpoints");
    let mut xs: Vec<f64> = (0..k).map(|_| rng.gen_range(-10.0..10.0)).collect();
    xs.sort_by(f64::total_cmp);
    xs
}

/// Dyadic samples of `|y| - 1` clipped into a contraction, step `2^-n` on `[-r, r]`.
pub fn dyadic_samples(n: i32, r: f64) -> Vec<(f64, f64)> {
    let step = 2f64.powi(-n);
    let m = (r / step) as i64;
    (-m..=m)
        .map(|j| {
            let y = j as f64 * step;
            (y, (y.abs() - 1.0).min(0.5 * y.abs()).max(-y.abs()))
        })
        .collect()
}

pub fn field(e: &FormInstance, seed: u64) -> Field {
    FieldSampler::default().sample(e.space(), &mut stream(seed, "bench/field"))
}
