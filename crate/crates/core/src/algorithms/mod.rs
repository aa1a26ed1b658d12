//! Online policies: the tour-based algorithm for general spaces, the ring,
//! star and semi-line algorithms, and two baselines.

mod baseline;
mod general;
pub mod knapsack;
mod plan;
mod ring;
mod semiline;
mod star;

use thiserror::Error;

pub use baseline::{Greedy, WaitAll};
pub use general::{Alg1, Alg1Choice, ALG1_CAP};
pub use knapsack::{knapsack_select, KnapsackItem, KnapsackMode};
pub use ring::{is_line_like, Alg2Ring, RingBranch};
pub use semiline::{Alg4SemiLine, Alg5SemiLine};
pub use star::{ray_summaries, Alg3Star, RaySummary};

use crate::engine::Policy;
use crate::instance::{Instance, Variant};
use crate::metric::{MetricSpace, Point};

/// Per-order quantities of the tour-based algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct TourStats {
    /// Request ids in visiting order.
    pub order: Vec<usize>,
    /// Tour length (closed) or path length (open).
    pub length: f64,
    /// `prefix[j]`: distance travelled on reaching `order[j]`.
    pub prefix: Vec<f64>,
}

/// Builds [`TourStats`] for `order` over `points` (indexed by `id - 1`).
pub fn tour_stats(space: &MetricSpace, variant: Variant, points: &[Point], order: &[usize]) -> TourStats {
    let mut at = space.origin();
    let mut acc = 0.0;
    let mut prefix = Vec::with_capacity(order.len());
    for &id in order {
        let p = points[id - 1];
        acc += space.d(&at, &p);
        prefix.push(acc);
        at = p;
    }
    let length = match variant {
        Variant::Open => acc,
        Variant::Closed => acc + space.d(&at, &space.origin()),
    };
    TourStats { order: order.to_vec(), length, prefix }
}

/// [`tour_stats`] for an instance.
pub fn tour_length(inst: &Instance, order: &[usize]) -> TourStats {
    tour_stats(&inst.space, inst.variant, &inst.points(), order)
}

/// Fraction of the tour that is released: `D_k / length` for the first
/// unreleased request `order[k]`, or 1 when everything is released.
/// `released` is indexed by `id - 1`.
pub fn alpha(stats: &TourStats, released: &[bool]) -> f64 {
    if stats.length <= 0.0 {
        return 1.0;
    }
    stats
        .order
        .iter()
        .position(|&id| !released[id - 1])
        .map_or(1.0, |k| stats.prefix[k] / stats.length)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolicyNameError {
    #[error("unknown policy: {0} (expected alg1, alg2-ring, alg3-star[:exact|:fptas=EPS], alg4-semiline, alg5-semiline, wait-all or greedy)")]
    Unknown(String),
    #[error("bad FPTAS epsilon in {0}: expected a number in (0, 1]")]
    Epsilon(String),
}

/// Builds a fresh policy from its CLI name.
pub fn policy_by_name(name: &str) -> Result<Box<dyn Policy>, PolicyNameError> {
    let (base, arg) = match name.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (name, None),
    };
    let p: Box<dyn Policy> = match (base, arg) {
        ("alg1", None) => Box::new(Alg1::new()),
        ("alg2-ring", None) => Box::new(Alg2Ring::new()),
        ("alg3-star", None) | ("alg3-star", Some("exact")) => Box::new(Alg3Star::new(KnapsackMode::Exact)),
        ("alg3-star", Some(a)) => {
            let eps: f64 = a
                .strip_prefix("fptas=")
                .and_then(|e| e.parse().ok())
                .filter(|e: &f64| *e > 0.0 && *e <= 1.0)
                .ok_or_else(|| PolicyNameError::Epsilon(name.to_string()))?;
            Box::new(Alg3Star::new(KnapsackMode::Fptas(eps)))
        }
        ("alg4-semiline", None) => Box::new(Alg4SemiLine::new()),
        ("alg5-semiline", None) => Box::new(Alg5SemiLine::new()),
        ("wait-all", None) => Box::new(WaitAll::new()),
        ("greedy", None) => Box::new(Greedy::new()),
        _ => return Err(PolicyNameError::Unknown(name.to_string())),
    };
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example1;

    #[test]
    fn example1_tour_lengths() {
        let inst = example1();
        assert_eq!(tour_length(&inst, &[1, 2, 3]).length, 12.0);
        assert_eq!(tour_length(&inst, &[2, 1, 3]).length, 9.0);
        assert_eq!(tour_length(&inst.with_variant(Variant::Open), &[1, 2, 3]).length, 9.0);
    }

    #[test]
    fn example1_alpha_steps() {
        let s = tour_length(&example1(), &[1, 2, 3]);
        assert_eq!(alpha(&s, &[false, false, false]), 0.25);
        assert_eq!(alpha(&s, &[true, false, false]), 0.5);
        assert_eq!(alpha(&s, &[true, true, false]), 0.75);
        assert_eq!(alpha(&s, &[true, true, true]), 1.0);
    }

    #[test]
    fn names_resolve() {
        for n in ["alg1", "alg2-ring", "alg3-star", "alg3-star:exact", "alg3-star:fptas=0.1", "alg4-semiline", "alg5-semiline", "wait-all", "greedy"] {
            assert!(policy_by_name(n).is_ok(), "{n}");
        }
        assert!(matches!(policy_by_name("alg9"), Err(PolicyNameError::Unknown(_))));
        assert!(matches!(policy_by_name("alg3-star:fptas=2"), Err(PolicyNameError::Epsilon(_))));
    }
}
