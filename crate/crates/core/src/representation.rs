//! Constructive utility extraction from a preference relation.
//!
//! The scale of a bundle `x` is the unique `t` with `t * 1 ~ x` (under
//! completeness, transitivity, continuity, and strong monotonicity). The
//! ray `{t * 1}` splits into the bracket predicates "at least as good as
//! `x`" and "at most as good as `x`"; the value is pinned by doubling the
//! upper end until it strictly beats `x`, then bisecting.

use thiserror::Error;

use crate::market::Bundle;
use crate::preference::{PreferenceRelation, SamplingConfig};
use crate::utility::Utility;

#[derive(Debug, Error, PartialEq)]
pub enum ExtractError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error(
        "no bracket: the ray never strictly beat the bundle up to {last_tried} \
         (last bracket low {bracket_low}); the relation likely violates monotonicity \
         or the bundle sits above max_bracket"
    )]
    NoBracket { bracket_low: f64, last_tried: f64 },
    #[error(
        "iteration limit before reaching tolerance; last bracket [{bracket_low}, {bracket_high}]"
    )]
    IterationLimit { bracket_low: f64, bracket_high: f64 },
    #[error("the bundle is strictly below the zero ray point; monotonicity does not hold")]
    ZeroNotDominated,
}

/// Controls for the bracket expansion and bisection.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionConfig {
    /// Absolute tolerance on the extracted scale.
    pub tolerance: f64,
    /// Largest ray coordinate tried during bracket expansion.
    pub max_bracket: f64,
    /// Bisection budget; each iteration gains one bit.
    pub max_iterations: usize,
}

impl ExtractionConfig {
    pub fn new(
        tolerance: f64,
        max_bracket: f64,
        max_iterations: usize,
    ) -> Result<Self, &'static str> {
        if tolerance <= 0.0 || !tolerance.is_finite() {
            return Err("tolerance must be a finite value > 0");
        }
        if max_bracket <= 0.0 || !max_bracket.is_finite() {
            return Err("max_bracket must be a finite value > 0");
        }
        if max_iterations < 1 {
            return Err("max_iterations must be at least 1");
        }
        Ok(Self {
            tolerance,
            max_bracket,
            max_iterations,
        })
    }
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        // 200 halvings from any desk-scale bracket reach machine precision
        // long before a 1e-9 tolerance does.
        Self {
            tolerance: 1e-9,
            max_bracket: 1e6,
            max_iterations: 200,
        }
    }
}

/// The extracted scale together with its terminal bracket.
#[derive(Debug, Clone, PartialEq)]
pub struct RayValue {
    pub value: f64,
    pub bracket_low: f64,
    pub bracket_high: f64,
}

/// Extracts the ray scale of `x`: the `t` with `t * 1` indifferent to `x`,
/// to within `cfg.tolerance`.
///
/// The caller is responsible for the relation plausibly satisfying the four
/// order axioms (the checkers in `preference` advise); on relations that
/// never strictly prefer any ray point to `x` the expansion fails loudly
/// with `NoBracket` instead of fabricating a scale.
pub fn extract_value(
    rel: &dyn PreferenceRelation,
    x: &Bundle,
    cfg: &ExtractionConfig,
) -> Result<RayValue, ExtractError> {
    let n = rel.dimension();
    if n != x.dimension() {
        return Err(ExtractError::DimensionMismatch {
            left: n,
            right: x.dimension(),
        });
    }
    let ray = |t: f64| Bundle::ray(t, n);

    // Anchor the lower end: x must weakly beat the origin of the ray.
    if !rel.weak_prefers(x, &ray(0.0)) {
        return Err(ExtractError::ZeroNotDominated);
    }

    // Bracket expansion: double until a ray point strictly beats x. Ties
    // stay on the lower side; a relation whose ray never climbs strictly
    // above x's class (total indifference, say) must fail here rather than
    // fabricate a scale.
    let mut lo = 0.0_f64;
    let mut hi = None;
    let mut last_tried = 0.0_f64;
    let mut t = 1.0_f64;
    while t <= cfg.max_bracket {
        last_tried = t;
        let point = ray(t);
        if rel.weak_prefers(&point, x) && !rel.weak_prefers(x, &point) {
            hi = Some(t);
            break;
        }
        lo = t;
        t *= 2.0;
    }
    let Some(mut hi) = hi else {
        return Err(ExtractError::NoBracket {
            bracket_low: lo,
            last_tried,
        });
    };

    // Bisection: lo stays weakly below x's class, hi stays weakly above.
    for _ in 0..cfg.max_iterations {
        if hi - lo <= 2.0 * cfg.tolerance {
            return Ok(RayValue {
                value: 0.5 * (lo + hi),
                bracket_low: lo,
                bracket_high: hi,
            });
        }
        let mid = 0.5 * (lo + hi);
        let point = ray(mid);
        let above = rel.weak_prefers(&point, x);
        if above && rel.weak_prefers(x, &point) {
            return Ok(RayValue {
                value: mid,
                bracket_low: mid,
                bracket_high: mid,
            });
        }
        if above {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi - lo <= 2.0 * cfg.tolerance {
        return Ok(RayValue {
            value: 0.5 * (lo + hi),
            bracket_low: lo,
            bracket_high: hi,
        });
    }
    Err(ExtractError::IterationLimit {
        bracket_low: lo,
        bracket_high: hi,
    })
}

/// A utility whose value at `x` is the extracted ray scale of `x`.
///
/// `evaluate` returns NaN when extraction fails (callers that need the
/// failure itself use [`ExtractedUtility::try_evaluate`]); the gradient is
/// the central finite difference of the extracted values with step
/// `max(1e-5, 1e-5 * |x|)`.
#[derive(Clone)]
pub struct ExtractedUtility<R> {
    rel: R,
    cfg: ExtractionConfig,
}

impl<R: PreferenceRelation> ExtractedUtility<R> {
    pub fn try_evaluate(&self, x: &Bundle) -> Result<RayValue, ExtractError> {
        extract_value(&self.rel, x, &self.cfg)
    }

    pub fn relation(&self) -> &R {
        &self.rel
    }
}

impl<R: PreferenceRelation> Utility for ExtractedUtility<R> {
    fn dimension(&self) -> usize {
        self.rel.dimension()
    }

    fn evaluate(&self, x: &Bundle) -> f64 {
        match self.try_evaluate(x) {
            Ok(ray) => ray.value,
            Err(_) => f64::NAN,
        }
    }

    fn gradient(&self, x: &Bundle) -> Vec<f64> {
        let h = (1e-5_f64).max(1e-5 * x.norm());
        let coords = x.coords();
        let mut probe = coords.to_vec();
        let mut grad = Vec::with_capacity(coords.len());
        for i in 0..coords.len() {
            let base = probe[i];
            probe[i] = base + h;
            let plus = self.evaluate(&Bundle::from_raw(probe.clone()));
            // One-sided fallback keeps the probe inside the orthant near the
            // boundary.
            let lower = (base - h).max(0.0);
            probe[i] = lower;
            let minus = self.evaluate(&Bundle::from_raw(probe.clone()));
            probe[i] = base;
            grad.push((plus - minus) / (base + h - lower));
        }
        grad
    }
}

/// Wraps a relation as the utility extracted pointwise from it.
pub fn extract_function<R: PreferenceRelation>(
    rel: R,
    cfg: ExtractionConfig,
) -> ExtractedUtility<R> {
    ExtractedUtility { rel, cfg }
}

/// Outcome of comparing a utility against a relation on sampled pairs.
#[derive(Debug, Clone)]
pub struct OrdinalReport {
    pub pairs_checked: usize,
    pub violations: usize,
    pub slack: f64,
    pub first_violation: Option<(Bundle, Bundle)>,
}

impl OrdinalReport {
    pub fn is_equivalent(&self) -> bool {
        self.violations == 0
    }
}

/// Checks ordinal equivalence between `u` and the relation on sampled pairs:
/// `u(x) >= u(y) - slack` exactly when `x` is weakly preferred to `y`, with
/// `slack` twice the extraction tolerance.
pub fn ordinal_equivalence_check(
    rel: &dyn PreferenceRelation,
    u: &dyn Utility,
    slack: f64,
    cfg: &SamplingConfig,
) -> OrdinalReport {
    let n = rel.dimension();
    let mut rng = cfg.rng();
    let mut violations = 0usize;
    let mut first_violation = None;
    for _ in 0..cfg.sample_count {
        let x = cfg.sample_bundle(n, &mut rng);
        let y = cfg.sample_bundle(n, &mut rng);
        let numeric = u.evaluate(&x) >= u.evaluate(&y) - slack;
        let relational = rel.weak_prefers(&x, &y);
        if numeric != relational {
            violations += 1;
            if first_violation.is_none() {
                first_violation = Some((x, y));
            }
        }
    }
    OrdinalReport {
        pairs_checked: cfg.sample_count,
        violations,
        slack,
        first_violation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::PriceSystem;
    use crate::preference::{Constant, UtilityInduced};
    use crate::utility::{CobbDouglasUtility, LinearUtility};

    fn sum_relation(n: usize) -> UtilityInduced<LinearUtility> {
        let prices = PriceSystem::new(vec![1.0; n]).unwrap();
        UtilityInduced::new(LinearUtility::new(n as f64, prices).unwrap())
    }

    fn product_relation() -> UtilityInduced<CobbDouglasUtility> {
        UtilityInduced::new(CobbDouglasUtility::new(vec![1.0, 1.0]).unwrap())
    }

    fn cfg() -> ExtractionConfig {
        ExtractionConfig::default()
    }

    #[test]
    fn extracts_the_sum_scale() {
        // t * 2 = 2 + 4 pins t = 3.
        let rel = sum_relation(2);
        let x = Bundle::new(vec![2.0, 4.0]).unwrap();
        let ray = extract_value(&rel, &x, &cfg()).unwrap();
        assert!((ray.value - 3.0).abs() <= cfg().tolerance);
        assert!(ray.bracket_low <= ray.value && ray.value <= ray.bracket_high);
        assert!(ray.bracket_high - ray.bracket_low <= 2.0 * cfg().tolerance);
    }

    #[test]
    fn ray_points_extract_to_their_own_scale() {
        let rel = product_relation();
        for c in [0.25, 1.0, 2.0, 7.5] {
            let ray = extract_value(&rel, &Bundle::ray(c, 2), &cfg()).unwrap();
            assert!((ray.value - c).abs() <= cfg().tolerance, "c = {c}");
        }
    }

    #[test]
    fn extracts_the_product_scale() {
        // t^2 = 1 * 4 pins t = 2.
        let rel = product_relation();
        let x = Bundle::new(vec![1.0, 4.0]).unwrap();
        let ray = extract_value(&rel, &x, &cfg()).unwrap();
        assert!((ray.value - 2.0).abs() <= cfg().tolerance);
    }

    #[test]
    fn origin_extracts_to_zero() {
        let rel = sum_relation(2);
        let ray = extract_value(&rel, &Bundle::zeros(2), &cfg()).unwrap();
        assert!(ray.value.abs() <= cfg().tolerance);
    }

    #[test]
    fn constant_relation_fails_loudly() {
        // Total indifference never enters the strict upper bracket, so the
        // expansion runs off the end of max_bracket instead of inventing a
        // scale.
        let rel = Constant::new(2);
        let x = Bundle::new(vec![1.0, 2.0]).unwrap();
        match extract_value(&rel, &x, &cfg()) {
            Err(ExtractError::NoBracket { last_tried, .. }) => {
                assert!(last_tried <= cfg().max_bracket);
                assert!(2.0 * last_tried > cfg().max_bracket);
            }
            other => panic!("expected NoBracket, got {other:?}"),
        }
    }

    #[test]
    fn decreasing_relation_has_no_bracket() {
        struct Reversed(UtilityInduced<LinearUtility>);
        impl PreferenceRelation for Reversed {
            fn dimension(&self) -> usize {
                self.0.dimension()
            }
            fn weak_prefers(&self, x: &Bundle, y: &Bundle) -> bool {
                self.0.weak_prefers(y, x)
            }
        }
        let rel = Reversed(sum_relation(2));
        let x = Bundle::new(vec![1.0, 2.0]).unwrap();
        match extract_value(&rel, &x, &cfg()) {
            Err(ExtractError::ZeroNotDominated) => {}
            other => panic!("expected ZeroNotDominated, got {other:?}"),
        }
    }

    #[test]
    fn bundle_above_max_bracket_reports_no_bracket() {
        let rel = sum_relation(2);
        let small = ExtractionConfig::new(1e-9, 4.0, 200).unwrap();
        let x = Bundle::new(vec![10.0, 10.0]).unwrap();
        match extract_value(&rel, &x, &small) {
            Err(ExtractError::NoBracket {
                bracket_low,
                last_tried,
            }) => {
                assert!(bracket_low < 10.0);
                assert!(last_tried <= 4.0);
            }
            other => panic!("expected NoBracket, got {other:?}"),
        }
    }

    #[test]
    fn iteration_limit_carries_the_bracket() {
        let rel = sum_relation(2);
        let starved = ExtractionConfig::new(1e-12, 1e6, 3).unwrap();
        // The scale 3.05 is not hit by any dyadic probe, so three halvings
        // cannot reach the tolerance.
        let x = Bundle::new(vec![2.0, 4.1]).unwrap();
        match extract_value(&rel, &x, &starved) {
            Err(ExtractError::IterationLimit {
                bracket_low,
                bracket_high,
            }) => {
                assert!(bracket_low <= 3.05 && 3.05 <= bracket_high);
            }
            other => panic!("expected IterationLimit, got {other:?}"),
        }
    }

    #[test]
    fn extracted_function_matches_the_mean_for_sum_preferences() {
        // t * n = sum(x) makes the extracted utility the coordinate mean.
        let rel = sum_relation(2);
        let u = extract_function(&rel, cfg());
        for coords in [[2.0, 4.0], [1.0, 0.0], [3.5, 3.5]] {
            let x = Bundle::new(coords.to_vec()).unwrap();
            let expected = (coords[0] + coords[1]) / 2.0;
            assert!((u.evaluate(&x) - expected).abs() <= cfg().tolerance);
        }
        assert!(u.evaluate(&Bundle::zeros(2)).abs() <= cfg().tolerance);
    }

    #[test]
    fn bisection_bracket_halves_each_iteration() {
        // Starving the iteration budget exposes the bracket: each extra
        // iteration must halve its width, and both ends must stay on their
        // own side of the indifference point.
        let rel = sum_relation(2);
        let x = Bundle::new(vec![2.0, 4.1]).unwrap();
        let mut previous_width = None;
        for iterations in 1..=8 {
            let cfg = ExtractionConfig::new(1e-13, 1e6, iterations).unwrap();
            match extract_value(&rel, &x, &cfg) {
                Err(ExtractError::IterationLimit {
                    bracket_low,
                    bracket_high,
                }) => {
                    assert!(bracket_low <= 3.05 && 3.05 <= bracket_high);
                    let width = bracket_high - bracket_low;
                    if let Some(prev) = previous_width {
                        let prev: f64 = prev;
                        assert!((width - prev / 2.0).abs() <= 1e-12 * prev);
                    }
                    previous_width = Some(width);
                }
                other => panic!("expected IterationLimit, got {other:?}"),
            }
        }
    }

    #[test]
    fn extracted_gradient_matches_the_mean_slope() {
        // The extracted utility of the sum relation is the coordinate mean,
        // so its finite-difference gradient is (1/2, 1/2).
        let rel = sum_relation(2);
        let u = extract_function(&rel, cfg());
        let g = u.gradient(&Bundle::new(vec![2.0, 4.0]).unwrap());
        assert!((g[0] - 0.5).abs() < 1e-4, "{g:?}");
        assert!((g[1] - 0.5).abs() < 1e-4, "{g:?}");
    }

    #[test]
    fn extracted_function_matches_sqrt_product() {
        let rel = product_relation();
        let u = extract_function(&rel, cfg());
        for coords in [[1.0, 4.0], [2.0, 2.0], [0.5, 8.0]] {
            let x = Bundle::new(coords.to_vec()).unwrap();
            let expected = (coords[0] * coords[1]).sqrt();
            assert!(
                (u.evaluate(&x) - expected).abs() <= cfg().tolerance,
                "{coords:?}"
            );
        }
    }

    #[test]
    fn monotonicity_transfers_through_extraction() {
        let rel = product_relation();
        let u = extract_function(&rel, cfg());
        let sampling = SamplingConfig::default();
        let mut rng = sampling.rng();
        for _ in 0..50 {
            let x = sampling.sample_bundle(2, &mut rng);
            let y = sampling.sample_bundle(2, &mut rng);
            if x.dominates(&y).unwrap() {
                assert!(u.evaluate(&x) >= u.evaluate(&y) - 2.0 * cfg().tolerance);
            }
        }
    }

    #[test]
    fn ordinal_equivalence_holds_for_the_inducing_utility() {
        let rel = sum_relation(2);
        let report = ordinal_equivalence_check(
            &rel,
            rel.base(),
            2.0 * cfg().tolerance,
            &SamplingConfig::default(),
        );
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn order_reversal_breaks_ordinal_equivalence() {
        let rel = sum_relation(2);
        let prices = PriceSystem::new(vec![1.0, 1.0]).unwrap();
        let negated = LinearUtility::new(-2.0, prices).unwrap();
        let report = ordinal_equivalence_check(
            &rel,
            &negated,
            2.0 * cfg().tolerance,
            &SamplingConfig::default(),
        );
        assert!(report.violations > 0);
        assert!(report.first_violation.is_some());
    }
}
