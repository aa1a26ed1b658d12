//! Adaptive release controllers behind the lower-bound constructions. Each
//! watches the server and decides where and when the remaining requests
//! appear; [`play`] runs one against a policy and scores the result against
//! the offline optimum of what was actually released.

mod ring;
mod semiline;
mod star;

use thiserror::Error;

pub use ring::{RingClosedCount, RingOpen};
pub use semiline::{SemiLineCount, SemiLineOpenLoc};
pub use star::StarCount;

use crate::engine::{run, Adversary, Outcome, Policy, Scenario, SimConfig, SimError};
use crate::instance::Instance;
use crate::oracle::{opt_makespan, OracleError};

/// Result of playing an adversary against a policy.
#[derive(Clone, Debug)]
pub struct AdversaryRun {
    /// The requests as they were released.
    pub materialized: Instance,
    pub forced_completion: f64,
    pub opt_completion: f64,
    pub forced_ratio: f64,
    pub outcome: Outcome,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdversaryError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Plays `adv` against `policy` and evaluates the realized instance.
pub fn play(adv: &mut dyn Adversary, policy: &mut dyn Policy) -> Result<AdversaryRun, AdversaryError> {
    let r = run(Scenario::Adaptive(adv), policy, SimConfig::default())?;
    let opt = opt_makespan(&r.instance)?.makespan;
    let forced = r.outcome.completion;
    Ok(AdversaryRun {
        materialized: r.instance,
        forced_completion: forced,
        opt_completion: opt,
        forced_ratio: forced / opt,
        outcome: r.outcome,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdversaryNameError {
    #[error("unknown adversary: {0} (expected ring-open, ring-closed-count:EPS, star-count:EPS, semiline-open-loc, semiline-closed-count or semiline-open-count)")]
    Unknown(String),
    #[error("bad epsilon in {0}: expected a number in (0, 1]")]
    Epsilon(String),
}

/// Epsilon used by the parameterized constructions when none is given.
pub const DEFAULT_EPSILON: f64 = 0.5;

/// Resolves an adversary name. A `:EPS` suffix wins over `epsilon`.
pub fn adversary_by_name(name: &str, epsilon: Option<f64>) -> Result<Box<dyn Adversary + Send>, AdversaryNameError> {
    let (base, suffix) = match name.split_once(':') {
        Some((b, s)) => (b, Some(s)),
        None => (name, None),
    };
    let eps = match suffix {
        Some(s) => s.parse::<f64>().map_err(|_| AdversaryNameError::Epsilon(name.into()))?,
        None => epsilon.unwrap_or(DEFAULT_EPSILON),
    };
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(AdversaryNameError::Epsilon(name.into()));
    }
    let fixed = |a: Box<dyn Adversary + Send>| {
        if suffix.is_some() {
            Err(AdversaryNameError::Unknown(name.into()))
        } else {
            Ok(a)
        }
    };
    match base {
        "ring-open" => fixed(Box::new(RingOpen::new())),
        "ring-closed-count" => Ok(Box::new(RingClosedCount::new(eps))),
        "star-count" => Ok(Box::new(StarCount::new(eps, crate::instance::Variant::Closed))),
        "semiline-open-loc" => fixed(Box::new(SemiLineOpenLoc::new())),
        "semiline-closed-count" => fixed(Box::new(SemiLineCount::closed())),
        "semiline-open-count" => fixed(Box::new(SemiLineCount::open())),
        _ => Err(AdversaryNameError::Unknown(name.into())),
    }
}
