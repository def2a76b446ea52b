//! Preference relations over bundles: the abstract comparison contract,
//! relations induced by utility functions, derived relations (strict
//! preference, indifference, redundancy), and sampling-based falsifiers for
//! the order axioms.

mod axioms;
mod sampling;
mod specimens;

pub use axioms::{
    check_completeness, check_continuity, check_local_nonsatiation, check_strict_convexity,
    check_strong_monotonicity, check_transitivity, completeness_violation, continuity_violation,
    convexity_violation, monotonicity_violation, nonsatiation_witness, transitivity_violation,
    Axiom, AxiomReport, Verdict, NONSATIATION_CANDIDATES,
};
pub use sampling::SamplingConfig;
pub use specimens::{
    specimen_by_name, Constant, Cyclic3, LeontiefMin, SatiatedQuadratic, Threshold, SPECIMEN_NAMES,
};

use serde::Deserialize;
use thiserror::Error;

use crate::market::Bundle;
use crate::utility::{make_utility, Utility, UtilitySpec};

use std::sync::Arc;

#[derive(Debug, Error, PartialEq)]
pub enum PreferenceError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("unknown specimen `{0}`")]
    UnknownSpecimen(String),
    #[error(transparent)]
    Utility(#[from] crate::utility::UtilityError),
}

/// A binary comparator `x >= y` ("x is at least as good as y") on bundles of
/// a fixed dimension.
///
/// `weak_prefers` must be deterministic and safe for concurrent read-only
/// evaluation. Callers guarantee matching dimensions.
pub trait PreferenceRelation: Send + Sync {
    fn dimension(&self) -> usize;
    fn weak_prefers(&self, x: &Bundle, y: &Bundle) -> bool;
}

impl<R: PreferenceRelation + ?Sized> PreferenceRelation for &R {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn weak_prefers(&self, x: &Bundle, y: &Bundle) -> bool {
        (**self).weak_prefers(x, y)
    }
}

impl PreferenceRelation for Arc<dyn PreferenceRelation> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn weak_prefers(&self, x: &Bundle, y: &Bundle) -> bool {
        (**self).weak_prefers(x, y)
    }
}

/// The relation induced by a utility function: `x >= y` iff `w(x) >= w(y)`.
///
/// Complete and transitive by construction, since `>=` on reals is.
#[derive(Clone)]
pub struct UtilityInduced<U> {
    base: U,
}

impl<U: Utility> UtilityInduced<U> {
    pub fn new(base: U) -> Self {
        Self { base }
    }

    pub fn base(&self) -> &U {
        &self.base
    }
}

impl<U: Utility> PreferenceRelation for UtilityInduced<U> {
    fn dimension(&self) -> usize {
        self.base.dimension()
    }

    fn weak_prefers(&self, x: &Bundle, y: &Bundle) -> bool {
        self.base.evaluate(x) >= self.base.evaluate(y)
    }
}

/// `x > y`: weakly preferred one way but not the other.
pub fn strictly_prefers(
    rel: &dyn PreferenceRelation,
    x: &Bundle,
    y: &Bundle,
) -> Result<bool, PreferenceError> {
    check_dims(x.dimension(), y.dimension())?;
    check_dims(rel.dimension(), x.dimension())?;
    Ok(rel.weak_prefers(x, y) && !rel.weak_prefers(y, x))
}

/// `x ~ y`: weakly preferred both ways.
pub fn indifferent(
    rel: &dyn PreferenceRelation,
    x: &Bundle,
    y: &Bundle,
) -> Result<bool, PreferenceError> {
    check_dims(x.dimension(), y.dimension())?;
    check_dims(rel.dimension(), x.dimension())?;
    Ok(rel.weak_prefers(x, y) && rel.weak_prefers(y, x))
}

/// Searches for a witness that `x` is redundant: a distinct bundle dominated
/// by `x` yet indifferent to it.
///
/// The search is one-sided: `Some(y)` proves redundancy, `None` only means
/// no witness was found in the sample. Candidates shrink a random nonempty
/// subset of the positive coordinates and keep the rest equal, so witnesses
/// that require exact ties in some coordinates are reachable.
pub fn is_redundant(
    rel: &dyn PreferenceRelation,
    x: &Bundle,
    cfg: &SamplingConfig,
) -> Result<Option<Bundle>, PreferenceError> {
    check_dims(rel.dimension(), x.dimension())?;
    if x.is_zero() {
        return Ok(None);
    }
    let mut rng = cfg.rng();
    for _ in 0..cfg.sample_count {
        if let Some(y) = sampling::dominated_variant(x, &mut rng) {
            if indifferent(rel, x, &y)? {
                return Ok(Some(y));
            }
        }
    }
    Ok(None)
}

fn check_dims(left: usize, right: usize) -> Result<(), PreferenceError> {
    if left == right {
        Ok(())
    } else {
        Err(PreferenceError::DimensionMismatch { left, right })
    }
}

/// A preference described in a file: either a utility specification (the
/// relation is the induced one) or a named built-in specimen.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PreferenceSpec {
    Induced {
        utility: UtilitySpec,
    },
    Specimen {
        specimen: String,
        #[serde(default = "default_dimension")]
        dimension: usize,
    },
}

fn default_dimension() -> usize {
    2
}

impl PreferenceSpec {
    pub fn build(&self) -> Result<Arc<dyn PreferenceRelation>, PreferenceError> {
        match self {
            PreferenceSpec::Induced { utility } => {
                let u = make_utility(utility)?;
                Ok(Arc::new(UtilityInduced::new(u)))
            }
            PreferenceSpec::Specimen {
                specimen,
                dimension,
            } => specimen_by_name(specimen, *dimension),
        }
    }
}
