//! Serializable utility specifications, the textual format consumed from
//! files and the command line.
//!
//! A specification is a record with a `family` tag and the family's numeric
//! parameters:
//!
//! ```json
//! { "family": "cobb_douglas", "a": [1.0, 1.0] }
//! { "family": "linear", "beta": 1.0, "p": [1.0, 2.0] }
//! { "family": "log", "gamma": 5.0, "p": [1.0, 1.0] }
//! { "family": "exponential", "alpha": 2.0, "p": [1.0, 2.0] }
//! { "family": "weighted_average", "p": [1.0, 1.0], "F": { "name": "power", "k": 2.0 } }
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::market::PriceSystem;

use super::families::{
    CobbDouglasUtility, ExponentialUtility, LinearUtility, LogUtility, OuterFunction,
    WeightedAverageUtility,
};
use super::{Utility, UtilityError};

/// Named outer function for the `weighted_average` family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum OuterSpec {
    Identity,
    Affine { a: f64, b: f64 },
    Power { k: f64 },
    ExpBase { base: f64 },
    Log,
}

impl From<OuterSpec> for OuterFunction {
    fn from(spec: OuterSpec) -> Self {
        match spec {
            OuterSpec::Identity => OuterFunction::Identity,
            OuterSpec::Affine { a, b } => OuterFunction::Affine { a, b },
            OuterSpec::Power { k } => OuterFunction::Power { k },
            OuterSpec::ExpBase { base } => OuterFunction::ExpBase { base },
            OuterSpec::Log => OuterFunction::Log,
        }
    }
}

/// A utility family plus its parameters, as read from problem and
/// preference files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum UtilitySpec {
    WeightedAverage {
        p: Vec<f64>,
        #[serde(rename = "F")]
        outer: OuterSpec,
    },
    Exponential {
        alpha: f64,
        p: Vec<f64>,
    },
    Linear {
        beta: f64,
        p: Vec<f64>,
    },
    Log {
        gamma: f64,
        p: Vec<f64>,
    },
    CobbDouglas {
        a: Vec<f64>,
    },
}

impl UtilitySpec {
    pub fn dimension(&self) -> usize {
        match self {
            UtilitySpec::WeightedAverage { p, .. }
            | UtilitySpec::Exponential { p, .. }
            | UtilitySpec::Linear { p, .. }
            | UtilitySpec::Log { p, .. } => p.len(),
            UtilitySpec::CobbDouglas { a } => a.len(),
        }
    }

    /// The family's own price system, when it has one.
    pub fn family_prices(&self) -> Option<&[f64]> {
        match self {
            UtilitySpec::WeightedAverage { p, .. }
            | UtilitySpec::Exponential { p, .. }
            | UtilitySpec::Linear { p, .. }
            | UtilitySpec::Log { p, .. } => Some(p),
            UtilitySpec::CobbDouglas { .. } => None,
        }
    }
}

/// Builds the utility described by a specification.
pub fn make_utility(spec: &UtilitySpec) -> Result<Arc<dyn Utility>, UtilityError> {
    match spec {
        UtilitySpec::WeightedAverage { p, outer } => {
            let prices = PriceSystem::new(p.clone())?;
            Ok(Arc::new(WeightedAverageUtility::new(
                prices,
                outer.clone().into(),
            )?))
        }
        UtilitySpec::Exponential { alpha, p } => {
            let prices = PriceSystem::new(p.clone())?;
            Ok(Arc::new(ExponentialUtility::new(*alpha, prices)?))
        }
        UtilitySpec::Linear { beta, p } => {
            let prices = PriceSystem::new(p.clone())?;
            Ok(Arc::new(LinearUtility::new(*beta, prices)?))
        }
        UtilitySpec::Log { gamma, p } => {
            let prices = PriceSystem::new(p.clone())?;
            Ok(Arc::new(LogUtility::new(*gamma, prices)?))
        }
        UtilitySpec::CobbDouglas { a } => Ok(Arc::new(CobbDouglasUtility::new(a.clone())?)),
    }
}
