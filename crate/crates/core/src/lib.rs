//! Numerical consumer theory: preference relations with sampling-based
//! axiom falsifiers, constructive utility extraction along the unit ray,
//! budget-constrained demand, and the budget-share utility families that
//! solve the first-order demand PDE.
//!
//! The crate is organized around five modules:
//!
//! - [`market`]: bundles, price systems, budget sets.
//! - [`preference`]: the comparison contract, derived relations, axiom
//!   checkers, and pathological specimens.
//! - [`representation`]: extraction of a numerical scale from a relation by
//!   bracket expansion and bisection on the unit ray.
//! - [`utility`]: the concrete families, PDE residuals, and gradient
//!   verification.
//! - [`demand`]: projected-gradient maximization over the budget face,
//!   Marshallian demand, indirect utility, and diagnostics.
//!
//! Everything is deterministic: sampling is seeded, solvers are
//! fixed-procedure, and identical inputs replay identical outputs.

#![forbid(unsafe_code)]

pub mod demand;
pub mod market;
pub mod preference;
pub mod representation;
pub mod utility;

pub use demand::{
    cobb_douglas_closed_form, continuity_probe, foc_residuals, indirect_utility,
    marshallian_demand, solve_demand, walras_check, ConsumerProblem, ContinuityReport, DemandError,
    DemandSolution, ProblemSpec, SolveStatus, SolverConfig, StepRule, WALRAS_REL_TOL,
};
pub use market::{BudgetSet, Bundle, MarketError, PriceSystem};
pub use preference::{
    check_completeness, check_continuity, check_local_nonsatiation, check_strict_convexity,
    check_strong_monotonicity, check_transitivity, indifferent, is_redundant, specimen_by_name,
    strictly_prefers, Axiom, AxiomReport, PreferenceError, PreferenceRelation, PreferenceSpec,
    SamplingConfig, UtilityInduced, Verdict,
};
pub use representation::{
    extract_function, extract_value, ordinal_equivalence_check, ExtractError, ExtractedUtility,
    ExtractionConfig, OrdinalReport, RayValue,
};
pub use utility::{
    finite_difference_gradient, gradient_mismatch, linear_combine, make_utility, pde_residual,
    reparam_equivalence, CobbDouglasUtility, ExponentialUtility, LinearCombination, LinearUtility,
    LogUtility, OuterFunction, OuterSpec, Utility, UtilityError, UtilitySpec,
    WeightedAverageUtility,
};
