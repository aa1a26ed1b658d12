//! Seeded instance streams and parallel ratio experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::algorithms::{is_line_like, policy_by_name, PolicyNameError};
use crate::engine::{simulate, verify_outcome, Outcome, OutcomeViolation, Scenario, SimError};
use crate::instance::{generate_random, GenError, GenParams, Instance, SpaceParams, Variant};
use crate::metric::SpaceKind;
use crate::oracle::{opt_makespan, OracleError};
use crate::report::{ratio, RatioReport, RatioRow};

/// How a batch draws its instances. Instance `i` is drawn from seed
/// `seed + i` alone, so any row can be replayed on its own.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteParams {
    pub kind: SpaceKind,
    pub variant: Variant,
    /// General spaces only.
    pub asymmetric: bool,
    pub seed: u64,
    pub count: usize,
    /// Sizes are uniform in `1..=max_n`.
    pub max_n: usize,
    /// Star ray counts are uniform in `1..=max_rays`.
    pub max_rays: usize,
    /// Fixed release horizon; by default a uniform factor in `[0, 3]` of
    /// the space diameter, drawn per instance.
    pub horizon: Option<f64>,
    /// Redraw ring instances with an empty arc over half the ring.
    pub non_line_like: bool,
}

impl SuiteParams {
    pub fn new(kind: SpaceKind, variant: Variant, seed: u64, count: usize) -> Self {
        Self {
            kind,
            variant,
            asymmetric: false,
            seed,
            count,
            max_n: 8,
            max_rays: 8,
            horizon: None,
            non_line_like: false,
        }
    }

    /// Key/value pairs describing the suite, for report headers.
    pub fn describe(&self) -> Vec<(String, String)> {
        let mut v = vec![
            ("kind".to_string(), self.kind.name().to_string()),
            ("variant".to_string(), self.variant.name().to_string()),
        ];
        if self.kind == SpaceKind::General {
            v.push(("asymmetric".into(), self.asymmetric.to_string()));
        }
        v.push(("seed".into(), self.seed.to_string()));
        v.push(("count".into(), self.count.to_string()));
        v.push(("max_n".into(), self.max_n.to_string()));
        if self.kind == SpaceKind::Star {
            v.push(("max_rays".into(), self.max_rays.to_string()));
        }
        v.push(("horizon".into(), self.horizon.map_or("random".to_string(), crate::numfmt::g17)));
        if self.kind == SpaceKind::Ring {
            v.push(("non_line_like".into(), self.non_line_like.to_string()));
        }
        v
    }

    /// Seed of instance `index`.
    pub fn instance_seed(&self, index: usize) -> u64 {
        self.seed.wrapping_add(index as u64)
    }

    /// Instance drawn from `seed` under these parameters.
    pub fn instance_from_seed(&self, seed: u64) -> Result<Instance, GenError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let n = rng.random_range(1..=self.max_n.max(1));
            let space = match self.kind {
                SpaceKind::Star => SpaceParams::Star { rays: rng.random_range(1..=self.max_rays.max(1)) },
                SpaceKind::General => SpaceParams::General { asymmetric: self.asymmetric },
                k => SpaceParams::default_for(k),
            };
            let horizon = match self.horizon {
                Some(h) => h,
                None => rng.random_range(0.0..=3.0) * space.diameter(),
            };
            let params = GenParams { n, seed: rng.random(), horizon, variant: self.variant, space };
            let inst = generate_random(&params)?;
            if self.non_line_like && is_line_like(&inst) {
                continue;
            }
            return Ok(inst);
        }
    }

    pub fn instance(&self, index: usize) -> Result<Instance, GenError> {
        self.instance_from_seed(self.instance_seed(index))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BatchError {
    #[error(transparent)]
    Policy(#[from] PolicyNameError),
    #[error("instance seed {seed}: {source}")]
    Generate { seed: u64, source: GenError },
    #[error("instance seed {seed}: {source}")]
    Simulate { seed: u64, source: SimError },
    #[error("instance seed {seed}: {source}")]
    Oracle { seed: u64, source: OracleError },
}

/// One policy run scored against the oracle.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub outcome: Outcome,
    pub opt: f64,
    pub ratio: f64,
    pub violations: Vec<OutcomeViolation>,
}

/// Runs the named policy on `inst` and scores it.
pub fn evaluate(inst: &Instance, policy: &str) -> Result<Evaluation, EvalError> {
    let mut p = policy_by_name(policy)?;
    let outcome = simulate(Scenario::Fixed(inst), p.as_mut())?;
    let opt = opt_makespan(inst)?.makespan;
    let violations = verify_outcome(inst, &outcome);
    Ok(Evaluation { ratio: ratio(outcome.completion, opt), opt, outcome, violations })
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error(transparent)]
    Policy(#[from] PolicyNameError),
    #[error(transparent)]
    Simulate(#[from] SimError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Runs `policy` over the suite in parallel; rows keep the instance order.
pub fn run_batch(suite: &SuiteParams, policy: &str, bound: Option<f64>) -> Result<RatioReport, BatchError> {
    policy_by_name(policy)?;
    let rows: Result<Vec<RatioRow>, BatchError> = (0..suite.count)
        .into_par_iter()
        .map(|i| {
            let seed = suite.instance_seed(i);
            let inst = suite.instance(i).map_err(|source| BatchError::Generate { seed, source })?;
            let e = evaluate(&inst, policy).map_err(|e| match e {
                EvalError::Policy(p) => BatchError::Policy(p),
                EvalError::Simulate(source) => BatchError::Simulate { seed, source },
                EvalError::Oracle(source) => BatchError::Oracle { seed, source },
            })?;
            Ok(RatioRow::new(seed, policy, e.outcome.completion, e.opt))
        })
        .collect();
    let mut params = suite.describe();
    params.push(("policy".into(), policy.into()));
    Ok(RatioReport { params, rows: rows?, bound })
}
