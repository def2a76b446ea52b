//! Utility functions: the evaluable scalar fields that induce preferences,
//! the budget-share families solving the first-order demand PDE, and the
//! numerical machinery around them (residuals, combinations, gradient
//! verification).

mod families;
mod spec;

pub use families::{
    gradient_mismatch, CobbDouglasUtility, ExponentialUtility, LinearUtility, LogUtility,
    OuterFunction, WeightedAverageUtility,
};
pub use spec::{make_utility, OuterSpec, UtilitySpec};

use std::sync::Arc;

use thiserror::Error;

use crate::market::{Bundle, PriceSystem};

#[derive(Debug, Error, PartialEq)]
pub enum UtilityError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("bundle has a zero coordinate at index {0}; this operation needs an interior point")]
    BoundaryBundle(usize),
    #[error("unknown utility family `{0}`")]
    UnknownFamily(String),
    #[error("unknown outer function `{0}`")]
    UnknownOuterFunction(String),
    #[error("parameter {name} is {value}, expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error(
        "finite-difference step {step} does not fit inside the point (min coordinate {min_coord})"
    )]
    StepTooLarge { step: f64, min_coord: f64 },
    #[error(transparent)]
    Market(#[from] crate::market::MarketError),
}

/// An evaluable, differentiable scalar field on the nonnegative orthant.
///
/// `evaluate` must be deterministic; `gradient` must match central finite
/// differences of `evaluate` at interior points. Implementations are
/// immutable and safe for concurrent evaluation.
pub trait Utility: Send + Sync {
    fn dimension(&self) -> usize;
    fn evaluate(&self, x: &Bundle) -> f64;
    fn gradient(&self, x: &Bundle) -> Vec<f64>;
}

impl<U: Utility + ?Sized> Utility for &U {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn evaluate(&self, x: &Bundle) -> f64 {
        (**self).evaluate(x)
    }
    fn gradient(&self, x: &Bundle) -> Vec<f64> {
        (**self).gradient(x)
    }
}

impl Utility for Arc<dyn Utility> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn evaluate(&self, x: &Bundle) -> f64 {
        (**self).evaluate(x)
    }
    fn gradient(&self, x: &Bundle) -> Vec<f64> {
        (**self).gradient(x)
    }
}

/// Residual of the first-order demand PDE at an interior point:
///
/// `(x_1 - r/p_1) du/dx_1 + sum_{i>=2} x_i du/dx_i` with `r = <p, x>`.
///
/// Every budget-share utility `F(<p,x>/P)` over the same prices annihilates
/// this expression; generic utilities do not.
pub fn pde_residual(
    u: &dyn Utility,
    prices: &PriceSystem,
    x: &Bundle,
) -> Result<f64, UtilityError> {
    check_dims(u.dimension(), prices.dimension())?;
    check_dims(prices.dimension(), x.dimension())?;
    require_interior(x)?;
    let r = prices.inner_product(x)?;
    let grad = u.gradient(x);
    let coords = x.coords();
    let mut residual = (coords[0] - r / prices.prices()[0]) * grad[0];
    for i in 1..coords.len() {
        residual += coords[i] * grad[i];
    }
    Ok(residual)
}

/// A linear combination `a1 * u1 + a2 * u2` of two utilities.
#[derive(Clone)]
pub struct LinearCombination {
    left: Arc<dyn Utility>,
    right: Arc<dyn Utility>,
    a1: f64,
    a2: f64,
}

impl Utility for LinearCombination {
    fn dimension(&self) -> usize {
        self.left.dimension()
    }

    fn evaluate(&self, x: &Bundle) -> f64 {
        self.a1 * self.left.evaluate(x) + self.a2 * self.right.evaluate(x)
    }

    fn gradient(&self, x: &Bundle) -> Vec<f64> {
        let g1 = self.left.gradient(x);
        let g2 = self.right.gradient(x);
        g1.iter()
            .zip(&g2)
            .map(|(a, b)| self.a1 * a + self.a2 * b)
            .collect()
    }
}

/// Combines two utilities linearly; the PDE residual of the result is the
/// same combination of the residuals.
pub fn linear_combine(
    u1: Arc<dyn Utility>,
    u2: Arc<dyn Utility>,
    a1: f64,
    a2: f64,
) -> Result<LinearCombination, UtilityError> {
    check_dims(u1.dimension(), u2.dimension())?;
    Ok(LinearCombination {
        left: u1,
        right: u2,
        a1,
        a2,
    })
}

/// Evaluates both sides of the base-exponential reparametrization identity:
/// `alpha^(sum alpha_i x_i)` against `prod (alpha^(x_i))^(alpha_i)`.
///
/// The two agree to 1e-12 relative; the right side is the product-power
/// (Cobb-Douglas) form of the left.
pub fn reparam_equivalence(
    alpha: f64,
    prices: &PriceSystem,
    x: &Bundle,
) -> Result<(f64, f64), UtilityError> {
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(UtilityError::InvalidParameter {
            name: "alpha",
            value: alpha,
            expected: "a finite value > 0",
        });
    }
    check_dims(prices.dimension(), x.dimension())?;
    let s = prices.normalized_expenditure(x)?;
    let lhs = alpha.powf(s);
    let mut rhs = 1.0;
    for (&xi, &wi) in x.coords().iter().zip(prices.weights()) {
        rhs *= alpha.powf(xi).powf(wi);
    }
    Ok((lhs, rhs))
}

/// Central-difference gradient, the oracle used to validate analytic
/// gradients. Requires an interior point and a step that stays inside the
/// orthant.
pub fn finite_difference_gradient(
    u: &dyn Utility,
    x: &Bundle,
    h: f64,
) -> Result<Vec<f64>, UtilityError> {
    check_dims(u.dimension(), x.dimension())?;
    require_interior(x)?;
    if h <= 0.0 || !h.is_finite() {
        return Err(UtilityError::InvalidParameter {
            name: "h",
            value: h,
            expected: "a finite value > 0",
        });
    }
    let min_coord = x.coords().iter().cloned().fold(f64::INFINITY, f64::min);
    if h >= min_coord {
        return Err(UtilityError::StepTooLarge { step: h, min_coord });
    }
    let mut probe = x.coords().to_vec();
    let mut grad = Vec::with_capacity(probe.len());
    for i in 0..probe.len() {
        let base = probe[i];
        probe[i] = base + h;
        let plus = u.evaluate(&Bundle::from_raw(probe.clone()));
        probe[i] = base - h;
        let minus = u.evaluate(&Bundle::from_raw(probe.clone()));
        probe[i] = base;
        grad.push((plus - minus) / (2.0 * h));
    }
    Ok(grad)
}

pub(crate) fn check_dims(left: usize, right: usize) -> Result<(), UtilityError> {
    if left == right {
        Ok(())
    } else {
        Err(UtilityError::DimensionMismatch { left, right })
    }
}

pub(crate) fn require_interior(x: &Bundle) -> Result<(), UtilityError> {
    match x.coords().iter().position(|&c| c == 0.0) {
        None => Ok(()),
        Some(i) => Err(UtilityError::BoundaryBundle(i)),
    }
}
