//! Random fields, band parameters and contractions for property checks.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::contraction::{compose, envelope, make_phi, PlFunction};
use crate::measure::{Field, MeasureSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldShape {
    /// i.i.d. uniform values in `[-A, A]`.
    Uniform,
    /// `a + b * i / (n - 1)`, monotone in the point index.
    Ramp,
    /// Two levels with a single jump.
    Step,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSampler {
    pub amplitude: f64,
    pub shapes: Vec<FieldShape>,
}

impl Default for FieldSampler {
    fn default() -> Self {
        Self {
            amplitude: 2.0,
            shapes: vec![FieldShape::Uniform, FieldShape::Ramp, FieldShape::Step],
        }
    }
}

impl FieldSampler {
    pub fn sample<R: Rng + ?Sized>(&self, space: &MeasureSpace, rng: &mut R) -> Field {
        let a = self.amplitude;
        let n = space.len();
        let shape = *self.shapes.choose(rng).unwrap_or(&FieldShape::Uniform);
        let values: Vec<f64> = match shape {
            FieldShape::Uniform => (0..n).map(|_| rng.gen_range(-a..=a)).collect(),
            FieldShape::Ramp => {
                let (lo, hi) = (rng.gen_range(-a..=a), rng.gen_range(-a..=a));
                let denom = (n.max(2) - 1) as f64;
                (0..n).map(|i| lo + (hi - lo) * i as f64 / denom).collect()
            }
            FieldShape::Step => {
                let (lo, hi) = (rng.gen_range(-a..=a), rng.gen_range(-a..=a));
                let jump = rng.gen_range(0..=n);
                (0..n).map(|i| if i < jump { lo } else { hi }).collect()
            }
        };
        Field::new(space, values).expect("sampled values are finite")
    }
}

/// `0` with probability 1/8, otherwise log-uniform on `[1e-3, 10]`.
pub fn sample_alpha<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.125) {
        0.0
    } else {
        10f64.powf(rng.gen_range(-3.0..=1.0))
    }
}

/// Sorted, strictly increasing breakpoints uniform in `[lo, hi]`.
pub fn sample_breakpoints<R: Rng + ?Sized>(rng: &mut R, k: usize, lo: f64, hi: f64) -> Vec<f64> {
    loop {
        let mut xs: Vec<f64> = (0..k).map(|_| rng.gen_range(lo..=hi)).collect();
        xs.sort_by(f64::total_cmp);
        if xs.windows(2).all(|w| w[0] < w[1]) {
            return xs;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContractionSampler {
    /// Largest `k` for random members of `F_k`.
    pub max_k: usize,
    /// Largest number of factors in random compositions of unit-slope pieces.
    pub max_depth: usize,
    /// Number of random sample points feeding envelope approximants.
    pub envelope_points: usize,
    /// Breakpoints and sample points are drawn from `[-spread, spread]`.
    pub spread: f64,
}

impl Default for ContractionSampler {
    fn default() -> Self {
        Self {
            max_k: 8,
            max_depth: 3,
            envelope_points: 8,
            spread: 3.0,
        }
    }
}

impl ContractionSampler {
    pub fn random_fk<R: Rng + ?Sized>(&self, rng: &mut R) -> PlFunction {
        let k = rng.gen_range(0..=self.max_k);
        make_phi(&sample_breakpoints(rng, k, -self.spread, self.spread)).unwrap()
    }

    /// Random element of `G`: `±id` composed with a member of `F_0 ∪ F_1 ∪ F_2`.
    pub fn random_g<R: Rng + ?Sized>(&self, rng: &mut R) -> PlFunction {
        let k = rng.gen_range(0..=2);
        let phi = make_phi(&sample_breakpoints(rng, k, -self.spread, self.spread)).unwrap();
        if rng.gen_bool(0.5) {
            phi.negated()
        } else {
            phi
        }
    }

    pub fn random_g_chain<R: Rng + ?Sized>(&self, rng: &mut R) -> PlFunction {
        let depth = rng.gen_range(1..=self.max_depth.max(1));
        (0..depth).fold(PlFunction::identity(), |acc, _| {
            compose(&self.random_g(rng), &acc)
        })
    }

    /// Envelope of random 1-Lipschitz data through the origin.
    pub fn random_envelope<R: Rng + ?Sized>(&self, rng: &mut R) -> PlFunction {
        let mut ys = sample_breakpoints(rng, self.envelope_points, -self.spread, self.spread);
        ys.retain(|&y| y != 0.0);
        // random walk with steps bounded by the gaps, outward from 0
        let mut samples = vec![(0.0, 0.0)];
        let (neg, pos): (Vec<f64>, Vec<f64>) = ys.iter().partition(|&&y| y < 0.0);
        for side in [pos, neg.into_iter().rev().collect::<Vec<_>>()] {
            let (mut y0, mut v0) = (0.0f64, 0.0f64);
            for y in side {
                let gap = (y - y0).abs();
                let v = v0 + rng.gen_range(-1.0..=1.0) * gap;
                samples.push((y, v));
                y0 = y;
                v0 = v;
            }
        }
        envelope(&samples, self.spread).expect("walk is 1-Lipschitz by construction")
    }

    /// One draw, mixing the three families evenly.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PlFunction {
        match rng.gen_range(0..3) {
            0 => self.random_fk(rng),
            1 => self.random_g_chain(rng),
            _ => self.random_envelope(rng),
        }
    }
}
