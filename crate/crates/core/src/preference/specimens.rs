//! Built-in pathological preference specimens for exercising the axiom
//! falsifiers. Each one is engineered to break a specific axiom.

use std::sync::Arc;

use crate::market::Bundle;

use super::{PreferenceError, PreferenceRelation};

pub const SPECIMEN_NAMES: [&str; 5] = [
    "threshold",
    "constant",
    "leontief_min",
    "satiated_quadratic",
    "cyclic3",
];

/// `w(x) = 1` if `x_1 > 1` else `0`: the upper contour set of any bundle in
/// the high class is open, breaking continuity.
#[derive(Clone)]
pub struct Threshold {
    dimension: usize,
}

impl Threshold {
    pub fn new(dimension: usize) -> Self {
        Self { dimension }
    }

    fn level(x: &Bundle) -> f64 {
        if x.coords()[0] > 1.0 {
            1.0
        } else {
            0.0
        }
    }
}

impl PreferenceRelation for Threshold {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn weak_prefers(&self, x: &Bundle, y: &Bundle) -> bool {
        Self::level(x) >= Self::level(y)
    }
}

/// Total indifference: breaks strong monotonicity and local nonsatiation.
#[derive(Clone)]
pub struct Constant {
    dimension: usize,
}

impl Constant {
    pub fn new(dimension: usize) -> Self {
        Self { dimension }
    }
}

impl PreferenceRelation for Constant {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn weak_prefers(&self, _x: &Bundle, _y: &Bundle) -> bool {
        true
    }
}

/// `w(x) = min_i x_i`: monotone but not strongly so, and every off-diagonal
/// bundle is redundant.
#[derive(Clone)]
pub struct LeontiefMin {
    dimension: usize,
}

impl LeontiefMin {
    pub fn new(dimension: usize) -> Self {
        Self { dimension }
    }

    fn level(x: &Bundle) -> f64 {
        x.coords().iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

impl PreferenceRelation for LeontiefMin {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn weak_prefers(&self, x: &Bundle, y: &Bundle) -> bool {
        Self::level(x) >= Self::level(y)
    }
}

/// `w(x) = -|x - 1|^2`: a bliss point at the all-ones bundle where no
/// neighborhood contains anything better.
#[derive(Clone)]
pub struct SatiatedQuadratic {
    dimension: usize,
}

impl SatiatedQuadratic {
    pub fn new(dimension: usize) -> Self {
        Self { dimension }
    }

    pub fn bliss_point(&self) -> Bundle {
        Bundle::ones(self.dimension)
    }

    fn level(x: &Bundle) -> f64 {
        -x.coords()
            .iter()
            .map(|c| (c - 1.0) * (c - 1.0))
            .sum::<f64>()
    }
}

impl PreferenceRelation for SatiatedQuadratic {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn weak_prefers(&self, x: &Bundle, y: &Bundle) -> bool {
        Self::level(x) >= Self::level(y)
    }
}

/// A Condorcet-style cycle: bundles are banded by `floor(mean(x)) mod 3` and
/// the bands beat each other cyclically, breaking transitivity.
#[derive(Clone)]
pub struct Cyclic3 {
    dimension: usize,
}

impl Cyclic3 {
    pub fn new(dimension: usize) -> Self {
        Self { dimension }
    }

    fn class(x: &Bundle) -> u8 {
        let mean = x.coords().iter().sum::<f64>() / x.dimension() as f64;
        (mean.floor() as i64).rem_euclid(3) as u8
    }

    fn beats(a: u8, b: u8) -> bool {
        matches!((a, b), (0, 1) | (1, 2) | (2, 0))
    }
}

impl PreferenceRelation for Cyclic3 {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn weak_prefers(&self, x: &Bundle, y: &Bundle) -> bool {
        let cx = Self::class(x);
        let cy = Self::class(y);
        cx == cy || Self::beats(cx, cy)
    }
}

/// Looks up a built-in specimen by its registered name.
pub fn specimen_by_name(
    name: &str,
    dimension: usize,
) -> Result<Arc<dyn PreferenceRelation>, PreferenceError> {
    if dimension == 0 {
        return Err(PreferenceError::DimensionMismatch { left: 0, right: 1 });
    }
    match name {
        "threshold" => Ok(Arc::new(Threshold::new(dimension))),
        "constant" => Ok(Arc::new(Constant::new(dimension))),
        "leontief_min" => Ok(Arc::new(LeontiefMin::new(dimension))),
        "satiated_quadratic" => Ok(Arc::new(SatiatedQuadratic::new(dimension))),
        "cyclic3" => Ok(Arc::new(Cyclic3::new(dimension))),
        other => Err(PreferenceError::UnknownSpecimen(other.to_string())),
    }
}
