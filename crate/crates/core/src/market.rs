//! Market primitives: consumption bundles, price systems, and budget sets.
//!
//! All values are immutable after construction and safe to share across
//! threads. Dimension mismatches are hard errors, never silent broadcasting.

use thiserror::Error;

/// Absolute tolerance for the normalized-weight sum invariant.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum MarketError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("bundle must have at least one coordinate")]
    EmptyDimension,
    #[error("coordinate {index} is {value}, expected a finite value >= 0")]
    InvalidCoordinate { index: usize, value: f64 },
    #[error("price {index} is {value}, expected a finite value > 0")]
    InvalidPrice { index: usize, value: f64 },
    #[error("income is {0}, expected a finite value >= 0")]
    InvalidIncome(f64),
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
}

/// A consumption basket: a point of the nonnegative orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    coords: Vec<f64>,
}

impl Bundle {
    /// Builds a bundle, rejecting empty, negative, or non-finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self, MarketError> {
        if coords.is_empty() {
            return Err(MarketError::EmptyDimension);
        }
        for (index, &value) in coords.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(MarketError::InvalidCoordinate { index, value });
            }
        }
        Ok(Self { coords })
    }

    /// The all-ones bundle of dimension `n` (the ray generator).
    pub fn ones(n: usize) -> Self {
        Self {
            coords: vec![1.0; n],
        }
    }

    /// The zero bundle of dimension `n`.
    pub fn zeros(n: usize) -> Self {
        Self {
            coords: vec![0.0; n],
        }
    }

    /// The scaled ray point `t * 1`.
    ///
    /// `t` must be finite and nonnegative.
    pub fn ray(t: f64, n: usize) -> Self {
        debug_assert!(t.is_finite() && t >= 0.0);
        Self { coords: vec![t; n] }
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    /// True when every coordinate is strictly positive.
    pub fn is_interior(&self) -> bool {
        self.coords.iter().all(|&c| c > 0.0)
    }

    /// Componentwise `x >= y` together with `x != y`.
    pub fn dominates(&self, other: &Bundle) -> Result<bool, MarketError> {
        check_dims(self.dimension(), other.dimension())?;
        let geq = self.coords.iter().zip(&other.coords).all(|(a, b)| a >= b);
        Ok(geq && self.coords != other.coords)
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Euclidean distance to `other`. Panics on dimension mismatch.
    pub fn distance(&self, other: &Bundle) -> f64 {
        assert_eq!(self.dimension(), other.dimension());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// The convex combination `(1 - t) * self + t * other`, clamped at zero
    /// against rounding. Panics on dimension mismatch.
    pub fn convex_combination(&self, other: &Bundle, t: f64) -> Bundle {
        assert_eq!(self.dimension(), other.dimension());
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| ((1.0 - t) * a + t * b).max(0.0))
            .collect();
        Bundle { coords }
    }

    /// `self + s * dir`, clamped into the nonnegative orthant.
    pub(crate) fn step(&self, dir: &[f64], s: f64) -> Bundle {
        debug_assert_eq!(self.coords.len(), dir.len());
        let coords = self
            .coords
            .iter()
            .zip(dir)
            .map(|(a, d)| (a + s * d).max(0.0))
            .collect();
        Bundle { coords }
    }

    /// Internal constructor for coordinates already known to be valid.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Bundle {
        debug_assert!(coords.iter().all(|c| c.is_finite() && *c >= 0.0));
        Bundle { coords }
    }
}

/// Strictly positive prices with their total and normalized weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSystem {
    prices: Vec<f64>,
    total: f64,
    weights: Vec<f64>,
}

impl PriceSystem {
    pub fn new(prices: Vec<f64>) -> Result<Self, MarketError> {
        if prices.is_empty() {
            return Err(MarketError::EmptyDimension);
        }
        for (index, &value) in prices.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(MarketError::InvalidPrice { index, value });
            }
        }
        let total: f64 = prices.iter().sum();
        let weights = prices.iter().map(|p| p / total).collect();
        Ok(Self {
            prices,
            total,
            weights,
        })
    }

    pub fn dimension(&self) -> usize {
        self.prices.len()
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    /// The total `P = sum p_i`.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Normalized weights `alpha_i = p_i / P`; they sum to one.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The expenditure `<p, x>`.
    pub fn inner_product(&self, x: &Bundle) -> Result<f64, MarketError> {
        check_dims(self.dimension(), x.dimension())?;
        Ok(self.prices.iter().zip(x.coords()).map(|(p, x)| p * x).sum())
    }

    /// The normalized expenditure `<p, x> / P`.
    pub fn normalized_expenditure(&self, x: &Bundle) -> Result<f64, MarketError> {
        Ok(self.inner_product(x)? / self.total)
    }
}

/// The feasible set `{ x >= 0 : <p, x> <= r }`.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetSet {
    prices: PriceSystem,
    income: f64,
}

impl BudgetSet {
    pub fn new(prices: PriceSystem, income: f64) -> Result<Self, MarketError> {
        if !income.is_finite() || income < 0.0 {
            return Err(MarketError::InvalidIncome(income));
        }
        Ok(Self { prices, income })
    }

    pub fn prices(&self) -> &PriceSystem {
        &self.prices
    }

    pub fn income(&self) -> f64 {
        self.income
    }

    pub fn dimension(&self) -> usize {
        self.prices.dimension()
    }

    /// Scales `x` onto the budget line `{ <p, x> = r }`.
    ///
    /// Requires `x != 0` and positive income; the scaled point satisfies the
    /// budget equality to 1e-12 relative.
    pub fn project_to_budget_line(&self, x: &Bundle) -> Result<Bundle, MarketError> {
        check_dims(self.dimension(), x.dimension())?;
        if x.is_zero() {
            return Err(MarketError::DegenerateInput(
                "cannot project the zero bundle onto the budget line",
            ));
        }
        if self.income == 0.0 {
            return Err(MarketError::DegenerateInput(
                "budget line degenerates to the origin when income is zero",
            ));
        }
        let spend = self.prices.inner_product(x)?;
        let scale = self.income / spend;
        Ok(Bundle::from_raw(
            x.coords().iter().map(|c| c * scale).collect(),
        ))
    }
}

fn check_dims(left: usize, right: usize) -> Result<(), MarketError> {
    if left == right {
        Ok(())
    } else {
        Err(MarketError::DimensionMismatch { left, right })
    }
}
