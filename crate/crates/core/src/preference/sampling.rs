//! Deterministic seeded sampling for the axiom falsifiers.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::market::Bundle;

/// Fixed default seed; reports are reproducible unless the caller overrides.
pub const DEFAULT_SEED: u64 = 42;

/// Sampling protocol for the axiom checkers and redundancy search.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingConfig {
    /// Number of samples drawn per check.
    pub sample_count: usize,
    /// Samples are uniform on `[0, box_upper]^n`.
    pub box_upper: f64,
    /// RNG seed; identical configs replay identical reports.
    pub seed: u64,
    /// Neighborhood radius for the local-nonsatiation search.
    pub epsilon: f64,
    /// Acceptance tolerance for bisection-generated indifferent pairs.
    pub indifference_tol: f64,
}

impl SamplingConfig {
    pub fn new(
        sample_count: usize,
        box_upper: f64,
        seed: u64,
        epsilon: f64,
        indifference_tol: f64,
    ) -> Result<Self, &'static str> {
        if sample_count < 1 {
            return Err("sample_count must be at least 1");
        }
        if box_upper <= 0.0 || !box_upper.is_finite() {
            return Err("box_upper must be a finite value > 0");
        }
        if epsilon <= 0.0 || !epsilon.is_finite() {
            return Err("epsilon must be a finite value > 0");
        }
        if indifference_tol < 0.0 || !indifference_tol.is_finite() {
            return Err("indifference_tol must be a finite value >= 0");
        }
        Ok(Self {
            sample_count,
            box_upper,
            seed,
            epsilon,
            indifference_tol,
        })
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub(crate) fn sample_bundle(&self, n: usize, rng: &mut ChaCha8Rng) -> Bundle {
        Bundle::from_raw((0..n).map(|_| rng.gen_range(0.0..self.box_upper)).collect())
    }
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            sample_count: 256,
            box_upper: 10.0,
            seed: DEFAULT_SEED,
            epsilon: 0.1,
            indifference_tol: 1e-9,
        }
    }
}

/// Draws a bundle dominated by `x`: a random nonempty subset of the positive
/// coordinates is strictly shrunk, the rest stay equal. Returns `None` when
/// `x` has no positive coordinate to shrink.
pub(crate) fn dominated_variant(x: &Bundle, rng: &mut ChaCha8Rng) -> Option<Bundle> {
    let coords = x.coords();
    let positive: Vec<usize> = (0..coords.len()).filter(|&i| coords[i] > 0.0).collect();
    if positive.is_empty() {
        return None;
    }
    let mut out = coords.to_vec();
    let mut shrunk = false;
    for &i in &positive {
        // Each positive coordinate joins the shrunk subset with probability
        // one half; ties in the remaining coordinates stay exact.
        if rng.gen_bool(0.5) {
            out[i] = coords[i] * rng.gen_range(0.0..1.0);
            shrunk = out[i] < coords[i] || shrunk;
        }
    }
    if !shrunk {
        let i = positive[rng.gen_range(0..positive.len())];
        out[i] = x.coords()[i] * rng.gen_range(0.0..1.0);
        if out[i] >= coords[i] {
            out[i] = 0.0;
        }
    }
    Some(Bundle::from_raw(out))
}
