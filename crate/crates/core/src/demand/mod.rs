//! The consumer's problem: maximize utility over a budget set.
//!
//! The solver runs projected gradient ascent on the budget face (monotone
//! preferences spend the whole income, so the equality form is adopted; a
//! zero income short-circuits to the origin). Families that are constant on
//! the face are detected up front and answered with the canonical ray point
//! instead of an arbitrary stationary iterate.

mod projection;

pub use projection::project_to_budget_face;

use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::market::{BudgetSet, Bundle, MarketError, PriceSystem};
use crate::utility::{make_utility, Utility, UtilityError, UtilitySpec};

/// Relative threshold for the budget-exhaustion (Walras) acceptance check.
pub const WALRAS_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DemandError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("utility evaluated to a non-finite value {value} at {coords:?}")]
    NonFiniteUtility { coords: Vec<f64>, value: f64 },
    #[error("demand is not single-valued here (status {0:?}); the probe needs a converged interior solution")]
    NotSingleValued(SolveStatus),
    #[error("invalid solver config: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Utility(#[from] UtilityError),
}

/// A utility paired with a budget set.
#[derive(Clone)]
pub struct ConsumerProblem {
    utility: Arc<dyn Utility>,
    budget: BudgetSet,
}

impl ConsumerProblem {
    pub fn new(utility: Arc<dyn Utility>, budget: BudgetSet) -> Result<Self, DemandError> {
        if utility.dimension() != budget.dimension() {
            return Err(DemandError::DimensionMismatch {
                left: utility.dimension(),
                right: budget.dimension(),
            });
        }
        Ok(Self { utility, budget })
    }

    pub fn utility(&self) -> &Arc<dyn Utility> {
        &self.utility
    }

    pub fn budget(&self) -> &BudgetSet {
        &self.budget
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    /// The utility is constant on the whole budget face; the canonical ray
    /// point is returned.
    DegenerateFace,
    IterationLimit,
}

impl SolveStatus {
    pub fn name(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::DegenerateFace => "degenerate_face",
            SolveStatus::IterationLimit => "iteration_limit",
        }
    }
}

/// Solver output: the demanded bundle with its diagnostics.
#[derive(Debug, Clone)]
pub struct DemandSolution {
    pub bundle: Bundle,
    /// Least-squares multiplier `<grad u, p> / <p, p>`; the marginal utility
    /// of income at interior optima.
    pub multiplier: f64,
    pub indirect_value: f64,
    /// Relative KKT residual: `|grad u - lambda p|` over the active
    /// coordinates divided by `|grad u|`; `Converged` means this fell below
    /// the solver tolerance.
    pub foc_residual_norm: f64,
    /// `<p, x> - r` at the returned bundle.
    pub budget_gap: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

/// Backtracking line-search parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRule {
    pub initial_step: f64,
    pub shrink: f64,
    pub sufficient_increase: f64,
}

impl Default for StepRule {
    fn default() -> Self {
        Self {
            initial_step: 1.0,
            shrink: 0.5,
            sufficient_increase: 1e-4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Tolerance on the relative projected-gradient norm.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Starting iterate; defaults to the equal-expenditure point
    /// `x_i = r / (n p_i)`.
    pub initial_point: Option<Bundle>,
    pub step: StepRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 10_000,
            initial_point: None,
            step: StepRule::default(),
        }
    }
}

/// Maximizes the utility over `{ x >= 0 : <p, x> = r }`.
///
/// Iteration exhaustion is a status on the best iterate, not an error;
/// non-finite utility values abort with a diagnostic.
pub fn solve_demand(
    prob: &ConsumerProblem,
    cfg: &SolverConfig,
) -> Result<DemandSolution, DemandError> {
    validate_config(cfg)?;
    let u = prob.utility.as_ref();
    let prices = prob.budget.prices();
    let r = prob.budget.income();
    let n = prices.dimension();

    if r == 0.0 {
        // The budget set is the origin alone.
        let origin = Bundle::zeros(n);
        let value = finite_utility(u, &origin)?;
        return Ok(DemandSolution {
            bundle: origin,
            multiplier: 0.0,
            indirect_value: value,
            foc_residual_norm: 0.0,
            budget_gap: 0.0,
            iterations: 0,
            status: SolveStatus::Converged,
        });
    }

    if face_constant(u, prices, r, cfg.tolerance)? {
        let canonical = Bundle::ray(r / prices.total(), n);
        let value = finite_utility(u, &canonical)?;
        let grad = finite_gradient(u, &canonical)?;
        let multiplier = least_squares_multiplier(&grad, prices);
        let gap = prices.inner_product(&canonical)? - r;
        return Ok(DemandSolution {
            bundle: canonical,
            multiplier,
            indirect_value: value,
            foc_residual_norm: 0.0,
            budget_gap: gap,
            iterations: 0,
            status: SolveStatus::DegenerateFace,
        });
    }

    let mut x = match &cfg.initial_point {
        Some(point) => {
            if point.dimension() != n {
                return Err(DemandError::DimensionMismatch {
                    left: point.dimension(),
                    right: n,
                });
            }
            Bundle::from_raw(project_to_budget_face(prices, r, point.coords()))
        }
        None => equal_expenditure_point(prices, r),
    };
    let mut value = finite_utility(u, &x)?;
    let mut step = cfg.step.initial_step;

    for iteration in 0..cfg.max_iterations {
        let grad = finite_gradient(u, &x)?;
        let stationarity = reduced_gradient(&grad, x.coords(), prices);
        if stationarity <= cfg.tolerance {
            return Ok(finish(
                u,
                prices,
                r,
                x,
                value,
                stationarity,
                iteration,
                SolveStatus::Converged,
            ));
        }

        // Backtracking on the projection arc, restarting from twice the
        // last accepted step so huge early gradients do not force a long
        // shrink on every iteration.
        let mut alpha = (step * 2.0).min(1e30);
        let mut moved = false;
        while alpha > 1e-30 {
            let candidate = project_to_budget_face(prices, r, &offset(x.coords(), &grad, alpha));
            let gain: f64 = grad
                .iter()
                .zip(candidate.iter().zip(x.coords()))
                .map(|(g, (c, xc))| g * (c - xc))
                .sum();
            let candidate_value = u.evaluate(&Bundle::from_raw(candidate.clone()));
            if candidate_value.is_finite()
                && gain > 0.0
                && candidate_value >= value + cfg.step.sufficient_increase * gain
            {
                x = Bundle::from_raw(candidate);
                value = candidate_value;
                step = alpha;
                moved = true;
                break;
            }
            alpha *= cfg.step.shrink;
        }
        if !moved {
            // No representable utility increase along the arc: the iterate
            // sits on the f64 argmax plateau, where value comparisons go
            // blind around the square root of machine epsilon. Gradient
            // comparisons do not, so polish the KKT residual directly while
            // staying on the plateau.
            let polished = polish_on_value_plateau(u, prices, r, &mut x, &mut value, cfg)?;
            return Ok(finish(
                u,
                prices,
                r,
                x,
                value,
                polished,
                iteration,
                if polished <= cfg.tolerance {
                    SolveStatus::Converged
                } else {
                    SolveStatus::IterationLimit
                },
            ));
        }
    }

    let grad = finite_gradient(u, &x)?;
    let stationarity = reduced_gradient(&grad, x.coords(), prices);
    let status = if stationarity <= cfg.tolerance {
        SolveStatus::Converged
    } else {
        SolveStatus::IterationLimit
    };
    Ok(finish(
        u,
        prices,
        r,
        x,
        value,
        stationarity,
        cfg.max_iterations,
        status,
    ))
}

/// Endgame refinement once the line search stalls at the utility's f64
/// resolution: scan a step ladder along the projection arc and move to
/// whichever candidate most reduces the KKT residual without leaving the
/// value plateau (a slack of a few ulps of the utility). Each round must
/// shrink the residual by a real factor or the scan stops.
fn polish_on_value_plateau(
    u: &dyn Utility,
    prices: &PriceSystem,
    income: f64,
    x: &mut Bundle,
    value: &mut f64,
    cfg: &SolverConfig,
) -> Result<f64, DemandError> {
    let mut stationarity = reduced_gradient(&finite_gradient(u, x)?, x.coords(), prices);
    for _ in 0..64 {
        if stationarity <= cfg.tolerance {
            break;
        }
        let grad = finite_gradient(u, x)?;
        let plateau_slack = 8.0 * f64::EPSILON * value.abs();
        let mut best: Option<(f64, f64, Vec<f64>)> = None;
        // The productive step is unknown once value comparisons go blind,
        // so scan the whole plausible ladder: from steps that overshoot the
        // face many times over down to sub-ulp nudges.
        let mut alpha = 1e6 * (1.0 + x.norm()) / (1.0 + norm(&grad));
        for _ in 0..140 {
            let candidate =
                project_to_budget_face(prices, income, &offset(x.coords(), &grad, alpha));
            alpha *= 0.5;
            let candidate_value = u.evaluate(&Bundle::from_raw(candidate.clone()));
            if !candidate_value.is_finite() || candidate_value < *value - plateau_slack {
                continue;
            }
            let candidate_grad = u.gradient(&Bundle::from_raw(candidate.clone()));
            if candidate_grad.iter().any(|g| !g.is_finite()) {
                continue;
            }
            let candidate_res = reduced_gradient(&candidate_grad, &candidate, prices);
            if best.as_ref().is_none_or(|(res, _, _)| candidate_res < *res) {
                best = Some((candidate_res, candidate_value, candidate));
            }
        }
        match best {
            Some((res, val, coords)) if res < stationarity * 0.999 => {
                *x = Bundle::from_raw(coords);
                *value = val;
                stationarity = res;
            }
            _ => break,
        }
    }
    Ok(stationarity)
}

/// Relative KKT residual on the budget face: the gradient component
/// tangential to the face over the active (positive) coordinates, plus any
/// improving reduced cost on the clipped ones, divided by the gradient
/// magnitude. Zero exactly at a constrained maximizer; invariant under
/// rescaling the utility, so desk-scale and astronomically-scaled problems
/// converge by the same yardstick.
fn reduced_gradient(grad: &[f64], x: &[f64], prices: &PriceSystem) -> f64 {
    let grad_norm = norm(grad);
    if grad_norm == 0.0 {
        return 0.0;
    }
    let p = prices.prices();
    let mut gp = 0.0;
    let mut pp = 0.0;
    for i in 0..grad.len() {
        if x[i] > 0.0 {
            gp += grad[i] * p[i];
            pp += p[i] * p[i];
        }
    }
    if pp == 0.0 {
        return 0.0;
    }
    let lambda = gp / pp;
    let mut sq = 0.0;
    for i in 0..grad.len() {
        let reduced = grad[i] - lambda * p[i];
        if x[i] > 0.0 {
            sq += reduced * reduced;
        } else {
            // A clipped coordinate only matters when raising it would help.
            let improving = reduced.max(0.0);
            sq += improving * improving;
        }
    }
    sq.sqrt() / grad_norm
}

/// The demanded bundle `x(p, r)`.
pub fn marshallian_demand(
    utility: Arc<dyn Utility>,
    prices: &PriceSystem,
    income: f64,
    cfg: &SolverConfig,
) -> Result<Bundle, DemandError> {
    let budget = BudgetSet::new(prices.clone(), income)?;
    let prob = ConsumerProblem::new(utility, budget)?;
    Ok(solve_demand(&prob, cfg)?.bundle)
}

/// The maximal attainable utility `v(p, r)`.
pub fn indirect_utility(
    utility: Arc<dyn Utility>,
    prices: &PriceSystem,
    income: f64,
    cfg: &SolverConfig,
) -> Result<f64, DemandError> {
    let budget = BudgetSet::new(prices.clone(), income)?;
    let prob = ConsumerProblem::new(utility, budget)?;
    Ok(solve_demand(&prob, cfg)?.indirect_value)
}

/// First-order-condition residuals at an interior point: the `n` gradient
/// equations `du/dx_i - lambda p_i` followed by the budget equality
/// `<p, x> - r`.
///
/// Boundary points are rejected; the stationarity analysis behind these
/// residuals divides by quantities and does not cover corners.
pub fn foc_residuals(
    utility: &dyn Utility,
    budget: &BudgetSet,
    x: &Bundle,
    lambda: f64,
) -> Result<Vec<f64>, DemandError> {
    if utility.dimension() != x.dimension() {
        return Err(DemandError::DimensionMismatch {
            left: utility.dimension(),
            right: x.dimension(),
        });
    }
    if let Some(i) = x.coords().iter().position(|&c| c == 0.0) {
        return Err(DemandError::Utility(UtilityError::BoundaryBundle(i)));
    }
    let prices = budget.prices();
    let grad = finite_gradient(utility, x)?;
    let mut residuals: Vec<f64> = grad
        .iter()
        .zip(prices.prices())
        .map(|(g, p)| g - lambda * p)
        .collect();
    residuals.push(prices.inner_product(x)? - budget.income());
    Ok(residuals)
}

/// `|<p, x> - r|`: how far the bundle is from exhausting the income. The
/// acceptance threshold is `WALRAS_REL_TOL * (1 + r)`.
pub fn walras_check(prices: &PriceSystem, income: f64, x: &Bundle) -> Result<f64, MarketError> {
    Ok((prices.inner_product(x)? - income).abs())
}

/// The closed-form demanded bundle for a product-power utility:
/// `x_i = a_i r / (p_i sum_j a_j)`. Serves as the independent oracle for the
/// solver.
pub fn cobb_douglas_closed_form(
    exponents: &[f64],
    prices: &PriceSystem,
    income: f64,
) -> Result<Bundle, DemandError> {
    if exponents.len() != prices.dimension() {
        return Err(DemandError::DimensionMismatch {
            left: exponents.len(),
            right: prices.dimension(),
        });
    }
    let total: f64 = exponents.iter().sum();
    let coords = exponents
        .iter()
        .zip(prices.prices())
        .map(|(a, p)| a * income / (p * total))
        .collect();
    Ok(Bundle::from_raw(coords))
}

/// Demand sensitivity probe around a base problem.
#[derive(Debug, Clone)]
pub struct ContinuityReport {
    pub base: DemandSolution,
    /// Worst `(|dx| / |x|) / delta` over the `2n + 1` perturbations.
    pub max_ratio: f64,
    pub delta: f64,
    pub bound: f64,
    pub flagged: bool,
}

/// Re-solves the problem at `2n + 1` perturbed points (each price up and
/// down by `delta` relative, income up by `delta` relative) and reports the
/// worst demand movement per unit of relative perturbation. Ratios above
/// `bound` flag a discontinuity suspect.
///
/// The base problem must converge to a single-valued demand; face-constant
/// problems are rejected.
pub fn continuity_probe(
    utility: Arc<dyn Utility>,
    prices: &PriceSystem,
    income: f64,
    delta: f64,
    bound: f64,
    cfg: &SolverConfig,
) -> Result<ContinuityReport, DemandError> {
    let solve_at = |p: &PriceSystem, r: f64| -> Result<DemandSolution, DemandError> {
        let budget = BudgetSet::new(p.clone(), r)?;
        let prob = ConsumerProblem::new(utility.clone(), budget)?;
        let solution = solve_demand(&prob, cfg)?;
        if solution.status != SolveStatus::Converged {
            return Err(DemandError::NotSingleValued(solution.status));
        }
        Ok(solution)
    };

    let base = solve_at(prices, income)?;
    if delta == 0.0 {
        return Ok(ContinuityReport {
            base,
            max_ratio: 0.0,
            delta,
            bound,
            flagged: false,
        });
    }

    let base_norm = base.bundle.norm().max(f64::MIN_POSITIVE);
    let mut max_ratio: f64 = 0.0;
    let n = prices.dimension();
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut perturbed = prices.prices().to_vec();
            perturbed[i] *= 1.0 + sign * delta;
            let p = PriceSystem::new(perturbed)?;
            let moved = solve_at(&p, income)?;
            let ratio = moved.bundle.distance(&base.bundle) / base_norm / delta;
            max_ratio = max_ratio.max(ratio);
        }
    }
    let moved = solve_at(prices, income * (1.0 + delta))?;
    let ratio = moved.bundle.distance(&base.bundle) / base_norm / delta;
    max_ratio = max_ratio.max(ratio);

    Ok(ContinuityReport {
        base,
        max_ratio,
        delta,
        bound,
        flagged: max_ratio > bound,
    })
}

/// A problem file: a utility specification paired with budget prices and
/// income.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub utility: UtilitySpec,
    pub p: Vec<f64>,
    pub r: f64,
}

impl ProblemSpec {
    pub fn build(&self) -> Result<ConsumerProblem, DemandError> {
        let utility = make_utility(&self.utility)?;
        let prices = PriceSystem::new(self.p.clone())?;
        let budget = BudgetSet::new(prices, self.r)?;
        ConsumerProblem::new(utility, budget)
    }
}

fn validate_config(cfg: &SolverConfig) -> Result<(), DemandError> {
    if cfg.tolerance <= 0.0 || !cfg.tolerance.is_finite() {
        return Err(DemandError::InvalidConfig(
            "tolerance must be a finite value > 0",
        ));
    }
    if cfg.max_iterations < 1 {
        return Err(DemandError::InvalidConfig(
            "max_iterations must be at least 1",
        ));
    }
    if cfg.step.initial_step <= 0.0 || !cfg.step.initial_step.is_finite() {
        return Err(DemandError::InvalidConfig(
            "initial_step must be a finite value > 0",
        ));
    }
    if !(cfg.step.shrink > 0.0 && cfg.step.shrink < 1.0) {
        return Err(DemandError::InvalidConfig(
            "shrink factor must lie strictly between 0 and 1",
        ));
    }
    if cfg.step.sufficient_increase < 0.0 || !cfg.step.sufficient_increase.is_finite() {
        return Err(DemandError::InvalidConfig(
            "sufficient_increase must be a finite value >= 0",
        ));
    }
    Ok(())
}

fn equal_expenditure_point(prices: &PriceSystem, income: f64) -> Bundle {
    let n = prices.dimension() as f64;
    Bundle::from_raw(prices.prices().iter().map(|p| income / (n * p)).collect())
}

/// True when the gradient is parallel to the prices at three spread-out
/// probe points of the face, which pins the budget-share families: their
/// utility is constant on the whole face. A single probe point would
/// misfire on symmetric utilities whose gradient happens to align with the
/// prices at that one point.
fn face_constant(
    u: &dyn Utility,
    prices: &PriceSystem,
    income: f64,
    tolerance: f64,
) -> Result<bool, DemandError> {
    let n = prices.dimension();
    let mut shares = vec![vec![1.0; n]];
    if n > 1 {
        let mut front = vec![1.0; n];
        front[0] = 2.0;
        let mut back = vec![1.0; n];
        back[n - 1] = 2.0;
        shares.push(front);
        shares.push(back);
    }
    for share in shares {
        let weight: f64 = share.iter().sum();
        let point = Bundle::from_raw(
            share
                .iter()
                .zip(prices.prices())
                .map(|(s, p)| s / weight * income / p)
                .collect(),
        );
        let grad = finite_gradient(u, &point)?;
        let lambda = least_squares_multiplier(&grad, prices);
        let residual: f64 = grad
            .iter()
            .zip(prices.prices())
            .map(|(g, p)| (g - lambda * p) * (g - lambda * p))
            .sum::<f64>()
            .sqrt();
        if residual > tolerance * norm(&grad) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    u: &dyn Utility,
    prices: &PriceSystem,
    income: f64,
    x: Bundle,
    value: f64,
    relative_pg: f64,
    iterations: usize,
    status: SolveStatus,
) -> DemandSolution {
    let grad = u.gradient(&x);
    let multiplier = least_squares_multiplier(&grad, prices);
    let gap = prices
        .inner_product(&x)
        .expect("solver iterates share the problem dimension")
        - income;
    DemandSolution {
        bundle: x,
        multiplier,
        indirect_value: value,
        foc_residual_norm: relative_pg,
        budget_gap: gap,
        iterations,
        status,
    }
}

fn least_squares_multiplier(grad: &[f64], prices: &PriceSystem) -> f64 {
    let gp: f64 = grad.iter().zip(prices.prices()).map(|(g, p)| g * p).sum();
    let pp: f64 = prices.prices().iter().map(|p| p * p).sum();
    gp / pp
}

fn finite_utility(u: &dyn Utility, x: &Bundle) -> Result<f64, DemandError> {
    let value = u.evaluate(x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(DemandError::NonFiniteUtility {
            coords: x.coords().to_vec(),
            value,
        })
    }
}

fn finite_gradient(u: &dyn Utility, x: &Bundle) -> Result<Vec<f64>, DemandError> {
    let grad = u.gradient(x);
    if let Some(bad) = grad.iter().find(|g| !g.is_finite()) {
        return Err(DemandError::NonFiniteUtility {
            coords: x.coords().to_vec(),
            value: *bad,
        });
    }
    Ok(grad)
}

fn offset(x: &[f64], dir: &[f64], alpha: f64) -> Vec<f64> {
    x.iter().zip(dir).map(|(xi, d)| xi + alpha * d).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}
