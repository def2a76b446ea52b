//! Sampling-based falsifiers for the preference axioms.
//!
//! Every checker is a falsifier: a `Violated` verdict comes with a
//! re-checkable counterexample, while `NoViolationFound` is evidence, not
//! proof: the axioms quantify over continua and finite sampling can only
//! refute. Reports are deterministic given the relation and the sampling
//! config; the counterexample is always the first violation in sample-index
//! order.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::market::Bundle;

use super::sampling::dominated_variant;
use super::{indifferent, is_redundant, strictly_prefers, PreferenceRelation, SamplingConfig};

/// Candidates examined per point by the local-nonsatiation search.
pub const NONSATIATION_CANDIDATES: usize = 32;

/// Parameter-space resolution of the continuity switch-point probe: the
/// bisection bracket is collapsed below this width before the indifference
/// pattern is examined.
const SWITCH_BISECTION_ITERS: usize = 80;

/// Robustness offset for the continuity pattern: observed indifference and
/// strictness must persist at this parameter distance from the switch, so a
/// hairline floating-point tie cannot masquerade as a plateau.
const SWITCH_ROBUSTNESS: f64 = 1e-6;

/// Pairs closer than this (relative to the base point) are discarded by the
/// strict-convexity pair generator; on shorter chords the curvature margin
/// drowns in the indifference-bisection error.
const MIN_CHORD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    Completeness,
    Transitivity,
    Continuity,
    StrongMonotonicity,
    StrictConvexity,
    LocalNonsatiation,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::Completeness,
        Axiom::Transitivity,
        Axiom::Continuity,
        Axiom::StrongMonotonicity,
        Axiom::StrictConvexity,
        Axiom::LocalNonsatiation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Axiom::Completeness => "completeness",
            Axiom::Transitivity => "transitivity",
            Axiom::Continuity => "continuity",
            Axiom::StrongMonotonicity => "strong_monotonicity",
            Axiom::StrictConvexity => "strict_convexity",
            Axiom::LocalNonsatiation => "local_nonsatiation",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NoViolationFound,
    Violated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NoViolationFound => "no-violation-found",
            Verdict::Violated => "violated",
        })
    }
}

/// Outcome of one axiom check.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub verdict: Verdict,
    /// Present exactly when the verdict is `Violated`; feeding these bundles
    /// back to the matching `*_violation` helper reproduces the violation.
    pub counterexample: Option<Vec<Bundle>>,
    /// Informative samples examined (constructed pairs, informative
    /// segments, probed points; per checker).
    pub samples_used: usize,
    pub seed: u64,
    /// Set when the premise of the axiom was never satisfiable in the
    /// sample, so the pass is vacuous.
    pub vacuous: bool,
    /// Search effort per point for the nonsatiation protocol.
    pub candidates_per_point: Option<usize>,
}

impl AxiomReport {
    fn pass(axiom: Axiom, samples_used: usize, seed: u64) -> Self {
        Self {
            axiom,
            verdict: Verdict::NoViolationFound,
            counterexample: None,
            samples_used,
            seed,
            vacuous: false,
            candidates_per_point: None,
        }
    }

    fn violated(axiom: Axiom, counterexample: Vec<Bundle>, samples_used: usize, seed: u64) -> Self {
        Self {
            axiom,
            verdict: Verdict::Violated,
            counterexample: Some(counterexample),
            samples_used,
            seed,
            vacuous: false,
            candidates_per_point: None,
        }
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }
}

/// Axiom i): any two bundles are comparable.
pub fn check_completeness(rel: &dyn PreferenceRelation, cfg: &SamplingConfig) -> AxiomReport {
    let n = rel.dimension();
    let mut rng = cfg.rng();
    for _ in 0..cfg.sample_count {
        let x = cfg.sample_bundle(n, &mut rng);
        let y = cfg.sample_bundle(n, &mut rng);
        if completeness_violation(rel, &x, &y) {
            return AxiomReport::violated(
                Axiom::Completeness,
                vec![x, y],
                cfg.sample_count,
                cfg.seed,
            );
        }
    }
    AxiomReport::pass(Axiom::Completeness, cfg.sample_count, cfg.seed)
}

/// Re-checks a completeness counterexample: neither order holds.
pub fn completeness_violation(rel: &dyn PreferenceRelation, x: &Bundle, y: &Bundle) -> bool {
    !rel.weak_prefers(x, y) && !rel.weak_prefers(y, x)
}

/// Axiom ii): `x >= y` and `y >= z` imply `x >= z`.
pub fn check_transitivity(rel: &dyn PreferenceRelation, cfg: &SamplingConfig) -> AxiomReport {
    let n = rel.dimension();
    let mut rng = cfg.rng();
    for _ in 0..cfg.sample_count {
        let x = cfg.sample_bundle(n, &mut rng);
        let y = cfg.sample_bundle(n, &mut rng);
        let z = cfg.sample_bundle(n, &mut rng);
        if transitivity_violation(rel, &x, &y, &z) {
            return AxiomReport::violated(
                Axiom::Transitivity,
                vec![x, y, z],
                cfg.sample_count,
                cfg.seed,
            );
        }
    }
    AxiomReport::pass(Axiom::Transitivity, cfg.sample_count, cfg.seed)
}

/// Re-checks a transitivity counterexample: premises hold, conclusion fails.
pub fn transitivity_violation(
    rel: &dyn PreferenceRelation,
    x: &Bundle,
    y: &Bundle,
    z: &Bundle,
) -> bool {
    rel.weak_prefers(x, y) && rel.weak_prefers(y, z) && !rel.weak_prefers(x, z)
}

/// Axiom iv): componentwise-larger, distinct bundles are strictly preferred.
///
/// Dominated partners are constructed by shrinking a random subset of
/// coordinates and holding the rest exactly equal; uniform independent pairs
/// would almost never produce the coordinate ties that expose relations like
/// the Leontief minimum.
pub fn check_strong_monotonicity(
    rel: &dyn PreferenceRelation,
    cfg: &SamplingConfig,
) -> AxiomReport {
    let n = rel.dimension();
    let mut rng = cfg.rng();
    let mut pairs = 0usize;
    for _ in 0..cfg.sample_count {
        let x = cfg.sample_bundle(n, &mut rng);
        let Some(y) = dominated_variant(&x, &mut rng) else {
            continue;
        };
        pairs += 1;
        if monotonicity_violation(rel, &x, &y) {
            return AxiomReport::violated(Axiom::StrongMonotonicity, vec![x, y], pairs, cfg.seed);
        }
    }
    AxiomReport::pass(Axiom::StrongMonotonicity, pairs, cfg.seed)
}

/// Re-checks a monotonicity counterexample: `x` dominates `y` without being
/// strictly preferred.
pub fn monotonicity_violation(rel: &dyn PreferenceRelation, x: &Bundle, y: &Bundle) -> bool {
    x.dominates(y).unwrap_or(false) && !(rel.weak_prefers(x, y) && !rel.weak_prefers(y, x))
}

/// Axiom v): the convex combination of two distinct, non-redundant,
/// indifferent bundles is strictly preferred to either endpoint.
///
/// Indifferent pairs are produced by the segment switch-point machinery:
/// bisecting the comparator across a random segment that straddles `x`'s
/// indifference class. Exact indifference is measure-zero, so the pair is
/// accepted once the bisection bracket has collapsed (the residual
/// preference gap is far below the curvature scale enforced by the minimum
/// chord length). Combination weights are sampled from the open interval,
/// staying away from the endpoints where the strict margin vanishes.
pub fn check_strict_convexity(rel: &dyn PreferenceRelation, cfg: &SamplingConfig) -> AxiomReport {
    let n = rel.dimension();
    let mut rng = cfg.rng();
    let mut pairs = 0usize;
    for _ in 0..cfg.sample_count {
        let x = cfg.sample_bundle(n, &mut rng);
        let Some(y) = indifferent_partner(rel, &x, cfg, &mut rng) else {
            continue;
        };
        // Def 2.3 exclusion: the axiom only constrains non-redundant pairs.
        let x_redundant = is_redundant(rel, &x, cfg).unwrap_or(None).is_some();
        if x_redundant {
            continue;
        }
        let y_redundant = is_redundant(rel, &y, cfg).unwrap_or(None).is_some();
        if y_redundant {
            continue;
        }
        pairs += 1;
        for _ in 0..3 {
            let t = rng.gen_range(0.1..0.9);
            let z = x.convex_combination(&y, t);
            if convexity_violation(rel, &x, &y, &z) {
                return AxiomReport::violated(
                    Axiom::StrictConvexity,
                    vec![x, y, z],
                    pairs,
                    cfg.seed,
                );
            }
        }
    }
    let mut report = AxiomReport::pass(Axiom::StrictConvexity, pairs, cfg.seed);
    report.vacuous = pairs == 0;
    report
}

/// Re-checks a strict-convexity counterexample: `z` lies strictly between
/// the indifferent endpoints yet fails to strictly beat both of them. The
/// bisection-generated partner sits a hair on the weakly-better side, so
/// only the two-endpoint form of the assertion is observable: on a flat
/// level set the combination never strictly beats the better endpoint,
/// while genuine strict convexity clears both by the curvature margin.
pub fn convexity_violation(
    rel: &dyn PreferenceRelation,
    x: &Bundle,
    y: &Bundle,
    z: &Bundle,
) -> bool {
    let beats_x = rel.weak_prefers(z, x) && !rel.weak_prefers(x, z);
    let beats_y = rel.weak_prefers(z, y) && !rel.weak_prefers(y, z);
    !(beats_x && beats_y)
}

/// Finds a bundle (approximately) indifferent to `x` by the segment
/// switch-point machinery: a random segment running from a point weakly
/// above `x`'s class to one strictly below crosses the indifference surface,
/// and bisecting the comparator pins the crossing. Walking a ray out of `x`
/// itself cannot work here: for relations monotone along lines the only
/// crossing on such a ray is `x`.
fn indifferent_partner(
    rel: &dyn PreferenceRelation,
    x: &Bundle,
    cfg: &SamplingConfig,
    rng: &mut ChaCha8Rng,
) -> Option<Bundle> {
    let n = x.dimension();
    for _ in 0..8 {
        let a = cfg.sample_bundle(n, rng);
        let b = cfg.sample_bundle(n, rng);
        let (top, bottom) = if rel.weak_prefers(&a, x) && !rel.weak_prefers(&b, x) {
            (a, b)
        } else if rel.weak_prefers(&b, x) && !rel.weak_prefers(&a, x) {
            (b, a)
        } else {
            continue;
        };
        let predicate = |t: f64| rel.weak_prefers(&top.convex_combination(&bottom, t), x);
        let (t_true, t_false) = bisect_last_true(&predicate, 0.0, 1.0, SWITCH_BISECTION_ITERS);
        let y = top.convex_combination(&bottom, t_true);
        // The pair is accepted as indifferent when the collapsed bracket
        // pins the crossing within the configured tolerance (floored at
        // what f64 bisection can resolve at all).
        let spatial_width = (t_false - t_true) * top.distance(&bottom);
        let resolution_floor = 8.0 * f64::EPSILON * (1.0 + x.norm());
        if spatial_width <= cfg.indifference_tol.max(resolution_floor)
            && y.distance(x) >= MIN_CHORD * (1.0 + x.norm())
        {
            return Some(y);
        }
    }
    None
}

/// Axiom vi): every neighborhood of every bundle contains a strictly better
/// bundle.
///
/// For each sampled point the search tries the inward ray bump plus random
/// perturbations inside the epsilon ball intersected with the orthant. A
/// violation is one-sided: "no improving point among the recorded number of
/// candidates".
pub fn check_local_nonsatiation(rel: &dyn PreferenceRelation, cfg: &SamplingConfig) -> AxiomReport {
    let n = rel.dimension();
    let mut rng = cfg.rng();
    for _ in 0..cfg.sample_count {
        let x = cfg.sample_bundle(n, &mut rng);
        if nonsatiation_witness(rel, &x, cfg.epsilon, NONSATIATION_CANDIDATES, &mut rng).is_none() {
            let mut report = AxiomReport::violated(
                Axiom::LocalNonsatiation,
                vec![x],
                cfg.sample_count,
                cfg.seed,
            );
            report.candidates_per_point = Some(NONSATIATION_CANDIDATES);
            return report;
        }
    }
    let mut report = AxiomReport::pass(Axiom::LocalNonsatiation, cfg.sample_count, cfg.seed);
    report.candidates_per_point = Some(NONSATIATION_CANDIDATES);
    report
}

/// Searches the epsilon ball around `x` for a strictly preferred bundle.
/// Returns the first improving candidate, or `None` when all `candidates`
/// probes fail (the one-sided violation signal).
pub fn nonsatiation_witness(
    rel: &dyn PreferenceRelation,
    x: &Bundle,
    epsilon: f64,
    candidates: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Bundle> {
    let n = x.dimension();
    let ray_bump = epsilon / (2.0 * n as f64);
    let ones = vec![1.0; n];
    let first = x.step(&ones, ray_bump);
    if strictly_prefers(rel, &first, x).unwrap_or(false) {
        return Some(first);
    }
    // Random perturbations in the inscribed cube of the epsilon ball.
    let half_width = epsilon / (2.0 * (n as f64).sqrt());
    for _ in 1..candidates {
        let delta: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(-half_width..half_width))
            .collect();
        let y = x.step(&delta, 1.0);
        if strictly_prefers(rel, &y, x).unwrap_or(false) {
            return Some(y);
        }
    }
    None
}

/// Axiom iii): upper and lower contour sets are closed.
///
/// Closedness is not decidable from finitely many comparisons; this probe
/// tests the observable switch-point consequence. For an informative segment
/// (weakly-preferred start, strictly-dispreferred end against a sampled
/// reference) the comparator switch is bisected to machine resolution. A
/// violation is the jump pattern: a robust plateau of exact indifference on
/// one side of the switch, strict dispreference immediately on the other:
/// a sequence of indifference-class points whose limit escapes the class.
/// Smooth relations never show the plateau; the robustness offset keeps a
/// single floating-point tie from faking one.
pub fn check_continuity(rel: &dyn PreferenceRelation, cfg: &SamplingConfig) -> AxiomReport {
    let n = rel.dimension();
    let mut rng = cfg.rng();
    let mut informative = 0usize;
    for _ in 0..cfg.sample_count {
        let y = cfg.sample_bundle(n, &mut rng);
        let a = cfg.sample_bundle(n, &mut rng);
        let b = cfg.sample_bundle(n, &mut rng);
        if !rel.weak_prefers(&a, &y) || rel.weak_prefers(&b, &y) {
            continue;
        }
        informative += 1;
        let on_segment = |t: f64| a.convex_combination(&b, t);
        let predicate = |t: f64| rel.weak_prefers(&on_segment(t), &y);
        let (t_in, t_out) = bisect_last_true(&predicate, 0.0, 1.0, SWITCH_BISECTION_ITERS);
        let points = vec![
            y.clone(),
            on_segment((t_in - SWITCH_ROBUSTNESS).max(0.0)),
            on_segment(t_in),
            on_segment(t_out),
            on_segment((t_out + SWITCH_ROBUSTNESS).min(1.0)),
        ];
        if continuity_violation(rel, &points) {
            return AxiomReport::violated(Axiom::Continuity, points, informative, cfg.seed);
        }
    }
    AxiomReport::pass(Axiom::Continuity, informative, cfg.seed)
}

/// Re-checks a continuity counterexample `[y, u_back, u, v, v_fwd]`: the
/// points before the switch are exactly indifferent to the reference while
/// the points after it are strictly dispreferred.
pub fn continuity_violation(rel: &dyn PreferenceRelation, points: &[Bundle]) -> bool {
    let [y, u_back, u, v, v_fwd] = points else {
        return false;
    };
    indifferent(rel, u_back, y).unwrap_or(false)
        && indifferent(rel, u, y).unwrap_or(false)
        && !rel.weak_prefers(v, y)
        && !rel.weak_prefers(v_fwd, y)
}

/// Bisects a predicate that is true at `lo` and false at `hi`, collapsing
/// the bracket; returns the final `(last_true, first_false)` parameters.
fn bisect_last_true(predicate: &dyn Fn(f64) -> bool, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    debug_assert!(lo < hi);
    let mut t_true = lo;
    let mut t_false = hi;
    for _ in 0..iters {
        let mid = 0.5 * (t_true + t_false);
        if mid <= t_true || mid >= t_false {
            break;
        }
        if predicate(mid) {
            t_true = mid;
        } else {
            t_false = mid;
        }
    }
    (t_true, t_false)
}
