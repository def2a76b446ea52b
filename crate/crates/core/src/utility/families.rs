//! The concrete utility families.
//!
//! Four of the five are budget-share utilities `u(x) = F(s(x))` with
//! `s(x) = <p, x> / P`: they are constant on every budget line of their own
//! price system and solve the demand PDE exactly. Cobb-Douglas is the
//! generic product-power family used as the demand-solver oracle.

use crate::market::{Bundle, PriceSystem};

use super::{check_dims, Utility, UtilityError};

/// The catalog of outer functions `F` available for the budget-share family.
///
/// A small closed catalog keeps specifications serializable and derivatives
/// exact.
#[derive(Debug, Clone, PartialEq)]
pub enum OuterFunction {
    /// `F(s) = s`
    Identity,
    /// `F(s) = a * s + b`
    Affine { a: f64, b: f64 },
    /// `F(s) = s^k`
    Power { k: f64 },
    /// `F(s) = base^s`
    ExpBase { base: f64 },
    /// `F(s) = ln s`
    Log,
}

impl OuterFunction {
    pub fn value(&self, s: f64) -> f64 {
        match self {
            OuterFunction::Identity => s,
            OuterFunction::Affine { a, b } => a * s + b,
            OuterFunction::Power { k } => s.powf(*k),
            OuterFunction::ExpBase { base } => base.powf(s),
            OuterFunction::Log => s.ln(),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            OuterFunction::Identity => 1.0,
            OuterFunction::Affine { a, .. } => *a,
            OuterFunction::Power { k } => k * s.powf(k - 1.0),
            OuterFunction::ExpBase { base } => base.powf(s) * base.ln(),
            OuterFunction::Log => 1.0 / s,
        }
    }
}

/// The general budget-share utility `u(x) = F(<p, x> / P)`.
#[derive(Clone)]
pub struct WeightedAverageUtility {
    prices: PriceSystem,
    outer: OuterFunction,
}

impl WeightedAverageUtility {
    pub fn new(prices: PriceSystem, outer: OuterFunction) -> Result<Self, UtilityError> {
        if let OuterFunction::ExpBase { base } = outer {
            validate_exp_base(base)?;
        }
        Ok(Self { prices, outer })
    }

    pub fn prices(&self) -> &PriceSystem {
        &self.prices
    }

    pub fn outer(&self) -> &OuterFunction {
        &self.outer
    }

    /// The normalized expenditure `s(x)`; linear in `x`.
    pub fn share(&self, x: &Bundle) -> f64 {
        self.prices
            .normalized_expenditure(x)
            .expect("dimension checked at evaluation sites")
    }
}

impl Utility for WeightedAverageUtility {
    fn dimension(&self) -> usize {
        self.prices.dimension()
    }

    fn evaluate(&self, x: &Bundle) -> f64 {
        self.outer.value(self.share(x))
    }

    fn gradient(&self, x: &Bundle) -> Vec<f64> {
        let fp = self.outer.derivative(self.share(x));
        self.prices.weights().iter().map(|w| fp * w).collect()
    }
}

/// `u(x) = alpha^(s(x))`; the unit bundle has utility `alpha`.
///
/// Strictly increasing in each coordinate iff `alpha > 1`; a base below one
/// is legal but yields a strictly decreasing (non-monotone-axiom) utility.
#[derive(Clone)]
pub struct ExponentialUtility {
    base: f64,
    inner: WeightedAverageUtility,
}

impl ExponentialUtility {
    pub fn new(base: f64, prices: PriceSystem) -> Result<Self, UtilityError> {
        validate_exp_base(base)?;
        Ok(Self {
            base,
            inner: WeightedAverageUtility {
                prices,
                outer: OuterFunction::ExpBase { base },
            },
        })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn prices(&self) -> &PriceSystem {
        &self.inner.prices
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.base > 1.0
    }
}

impl Utility for ExponentialUtility {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }
    fn evaluate(&self, x: &Bundle) -> f64 {
        self.inner.evaluate(x)
    }
    fn gradient(&self, x: &Bundle) -> Vec<f64> {
        self.inner.gradient(x)
    }
}

/// `u(x) = beta * s(x)`, a weighted sum of quantities with the normalized
/// prices as weights; the unit bundle has utility `beta`.
#[derive(Clone)]
pub struct LinearUtility {
    scale: f64,
    inner: WeightedAverageUtility,
}

impl LinearUtility {
    pub fn new(scale: f64, prices: PriceSystem) -> Result<Self, UtilityError> {
        if !scale.is_finite() {
            return Err(UtilityError::InvalidParameter {
                name: "beta",
                value: scale,
                expected: "a finite value",
            });
        }
        Ok(Self {
            scale,
            inner: WeightedAverageUtility {
                prices,
                outer: OuterFunction::Affine { a: scale, b: 0.0 },
            },
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn prices(&self) -> &PriceSystem {
        &self.inner.prices
    }
}

impl Utility for LinearUtility {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }
    fn evaluate(&self, x: &Bundle) -> f64 {
        self.inner.evaluate(x)
    }
    fn gradient(&self, x: &Bundle) -> Vec<f64> {
        self.inner.gradient(x)
    }
}

/// `u(x) = gamma * ln s(x)`; zero at the unit bundle, `gamma` at `e * 1`.
///
/// Undefined at `s = 0` (the zero bundle): evaluation there follows IEEE
/// semantics and returns negative infinity.
#[derive(Clone)]
pub struct LogUtility {
    scale: f64,
    inner: WeightedAverageUtility,
}

impl LogUtility {
    pub fn new(scale: f64, prices: PriceSystem) -> Result<Self, UtilityError> {
        if !scale.is_finite() {
            return Err(UtilityError::InvalidParameter {
                name: "gamma",
                value: scale,
                expected: "a finite value",
            });
        }
        Ok(Self {
            scale,
            inner: WeightedAverageUtility {
                prices,
                outer: OuterFunction::Log,
            },
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn prices(&self) -> &PriceSystem {
        &self.inner.prices
    }
}

impl Utility for LogUtility {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }
    fn evaluate(&self, x: &Bundle) -> f64 {
        self.scale * self.inner.evaluate(x)
    }
    fn gradient(&self, x: &Bundle) -> Vec<f64> {
        self.inner
            .gradient(x)
            .into_iter()
            .map(|g| self.scale * g)
            .collect()
    }
}

/// The product-power utility `u(x) = prod x_i^(a_i)` with `a_i > 0`.
#[derive(Clone, Debug)]
pub struct CobbDouglasUtility {
    exponents: Vec<f64>,
}

impl CobbDouglasUtility {
    pub fn new(exponents: Vec<f64>) -> Result<Self, UtilityError> {
        if exponents.is_empty() {
            return Err(UtilityError::Market(
                crate::market::MarketError::EmptyDimension,
            ));
        }
        for &a in &exponents {
            if a <= 0.0 || !a.is_finite() {
                return Err(UtilityError::InvalidParameter {
                    name: "a",
                    value: a,
                    expected: "a finite value > 0",
                });
            }
        }
        Ok(Self { exponents })
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }
}

impl Utility for CobbDouglasUtility {
    fn dimension(&self) -> usize {
        self.exponents.len()
    }

    fn evaluate(&self, x: &Bundle) -> f64 {
        x.coords()
            .iter()
            .zip(&self.exponents)
            .map(|(xi, a)| xi.powf(*a))
            .product()
    }

    fn gradient(&self, x: &Bundle) -> Vec<f64> {
        let coords = x.coords();
        (0..coords.len())
            .map(|i| {
                let mut g = self.exponents[i] * coords[i].powf(self.exponents[i] - 1.0);
                for (j, (&xj, &aj)) in coords.iter().zip(&self.exponents).enumerate() {
                    if j != i {
                        g *= xj.powf(aj);
                    }
                }
                g
            })
            .collect()
    }
}

fn validate_exp_base(base: f64) -> Result<(), UtilityError> {
    if base <= 0.0 || !base.is_finite() {
        return Err(UtilityError::InvalidParameter {
            name: "alpha",
            value: base,
            expected: "a finite value > 0",
        });
    }
    if base == 1.0 {
        return Err(UtilityError::InvalidParameter {
            name: "alpha",
            value: base,
            expected: "a base != 1 (base 1 degenerates to a constant)",
        });
    }
    Ok(())
}

/// Worst relative disagreement between the analytic gradient and central
/// finite differences at a point (absolute near zero).
pub fn gradient_mismatch(u: &dyn Utility, x: &Bundle, h: f64) -> Result<f64, UtilityError> {
    check_dims(u.dimension(), x.dimension())?;
    let analytic = u.gradient(x);
    let numeric = super::finite_difference_gradient(u, x, h)?;
    let mut worst: f64 = 0.0;
    for (a, n) in analytic.iter().zip(&numeric) {
        let scale = a.abs().max(n.abs());
        let err = if scale > 1e-8 {
            (a - n).abs() / scale
        } else {
            (a - n).abs()
        };
        worst = worst.max(err);
    }
    Ok(worst)
}
