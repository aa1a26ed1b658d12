//! Tour-based algorithm for arbitrary spaces: wait at the origin until some
//! tour is long enough and half released, then follow the tour minimizing
//! the unreleased remainder.

use super::plan::{Leg, Plan};
use crate::engine::{Action, Observation, Policy, PolicyContext};
use crate::instance::Variant;
use crate::metric::{MetricSpace, Point};

/// Largest instance handled (all orders are enumerated).
pub const ALG1_CAP: usize = 9;

/// The decision taken when the server leaves the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Alg1Choice {
    pub start: f64,
    pub order: Vec<usize>,
    pub length: f64,
    /// `(1 - beta) * length` of the chosen order.
    pub objective: f64,
}

#[derive(Debug, Default)]
pub struct Alg1 {
    space: Option<MetricSpace>,
    variant: Option<Variant>,
    n: usize,
    /// Distances, index 0 = origin, i = request i.
    dist: Vec<f64>,
    /// Smallest `length / 2` over orders whose early part (prefix distance
    /// below half the length) is exactly the given id set.
    halfmin: Vec<f64>,
    choice: Option<Alg1Choice>,
    plan: Plan,
}

impl Alg1 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn choice(&self) -> Option<&Alg1Choice> {
        self.choice.as_ref()
    }

    fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * (self.n + 1) + j]
    }

    /// Visits every order in lexicographic id order.
    fn for_each_order(&self, mut f: impl FnMut(&[usize], &[f64], f64)) {
        let n = self.n;
        let closed = self.variant == Some(Variant::Closed);
        let mut order = Vec::with_capacity(n);
        let mut prefix = Vec::with_capacity(n);
        let mut used = vec![false; n + 1];
        fn rec(
            a: &Alg1,
            closed: bool,
            order: &mut Vec<usize>,
            prefix: &mut Vec<f64>,
            used: &mut [bool],
            f: &mut dyn FnMut(&[usize], &[f64], f64),
        ) {
            let at = order.last().copied().unwrap_or(0);
            let acc = prefix.last().copied().unwrap_or(0.0);
            if order.len() == a.n {
                let len = if closed { acc + a.d(at, 0) } else { acc };
                f(order, prefix, len);
                return;
            }
            for j in 1..=a.n {
                if used[j] {
                    continue;
                }
                used[j] = true;
                order.push(j);
                prefix.push(acc + a.d(at, j));
                rec(a, closed, order, prefix, used, f);
                prefix.pop();
                order.pop();
                used[j] = false;
            }
        }
        rec(self, closed, &mut order, &mut prefix, &mut used, &mut f);
    }

    fn start(&mut self, obs: &Observation<'_>) {
        let released: Vec<bool> = obs.requests.iter().map(|s| s.is_released()).collect();
        let mut best: Option<(f64, Vec<usize>, f64)> = None;
        self.for_each_order(|order, prefix, len| {
            let alpha = if len <= 0.0 {
                1.0
            } else {
                order.iter().position(|&id| !released[id - 1]).map_or(1.0, |k| prefix[k] / len)
            };
            let beta = alpha.min(0.5);
            let obj = (1.0 - beta) * len;
            // Relative slack so rounding noise cannot break a lexicographic tie.
            let better = match &best {
                None => true,
                Some((b, _, _)) => obj < b - 1e-12 * b.abs(),
            };
            if better {
                best = Some((obj, order.to_vec(), len));
            }
        });
        let (objective, order, length) = best.expect("at least one order");
        for &id in &order {
            self.plan.push(Leg::Visit(id));
        }
        if self.variant == Some(Variant::Closed) {
            let origin = self.space.as_ref().expect("initialized").origin();
            self.plan.push(Leg::Go { target: origin, wait: false });
        }
        self.choice = Some(Alg1Choice { start: obs.now, order, length, objective });
    }
}

impl Policy for Alg1 {
    fn name(&self) -> String {
        "alg1".into()
    }

    fn needs_locations(&self) -> bool {
        true
    }

    fn init(&mut self, ctx: &PolicyContext) -> Result<(), String> {
        let points = ctx.locations.as_ref().ok_or("alg1 needs the request locations")?;
        if ctx.count > ALG1_CAP {
            return Err(format!("alg1 enumerates all orders and accepts at most {ALG1_CAP} requests, got {}", ctx.count));
        }
        let n = ctx.count;
        let stops: Vec<Point> = std::iter::once(ctx.space.origin()).chain(points.iter().copied()).collect();
        self.dist = stops.iter().flat_map(|a| stops.iter().map(|b| ctx.space.d(a, b))).collect();
        self.n = n;
        self.space = Some(ctx.space.clone());
        self.variant = Some(ctx.variant);
        let mut halfmin = vec![f64::INFINITY; 1 << n];
        self.for_each_order(|order, prefix, len| {
            let half = len / 2.0;
            let mask = order
                .iter()
                .zip(prefix)
                .filter(|(_, &d)| d < half)
                .fold(0usize, |m, (&id, _)| m | 1 << (id - 1));
            if half < halfmin[mask] {
                halfmin[mask] = half;
            }
        });
        self.halfmin = halfmin;
        Ok(())
    }

    fn decide(&mut self, obs: &Observation<'_>) -> Action {
        if self.choice.is_none() {
            let released = obs
                .requests
                .iter()
                .filter(|s| s.is_released())
                .fold(0usize, |m, s| m | 1 << (s.id - 1));
            // Earliest time some order is half released and at least half its
            // length has elapsed, using only what is released now.
            let mut candidate = f64::INFINITY;
            let mut sub = released;
            loop {
                let half = self.halfmin[sub];
                if half.is_finite() {
                    let latest = obs
                        .requests
                        .iter()
                        .filter(|s| sub & (1 << (s.id - 1)) != 0)
                        .filter_map(|s| s.release)
                        .fold(0.0, f64::max);
                    candidate = candidate.min(half.max(latest));
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & released;
            }
            if candidate > obs.now {
                return Action::WaitUntil(candidate);
            }
            self.start(obs);
        }
        let space = self.space.as_ref().expect("initialized");
        self.plan.next(space, obs).unwrap_or(Action::WaitUntil(f64::INFINITY))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{simulate, verify_outcome, Scenario};
    use crate::fixtures::example1;
    use crate::instance::Instance;
    use crate::oracle::opt_makespan;

    #[test]
    fn example1_choice_and_completion() {
        let inst = example1();
        let mut p = Alg1::new();
        let out = simulate(Scenario::Fixed(&inst), &mut p).unwrap();
        let c = p.choice().unwrap();
        assert_eq!(c.start, 6.0);
        assert_eq!(c.order, vec![2, 1, 3]);
        assert_eq!(c.objective, 4.5);
        assert_eq!(out.completion, 15.0);
        // The matrix puts q2 at distance 2 from the origin.
        assert_eq!(out.service_times, vec![11.0, 8.0, 12.0]);
        assert!(verify_outcome(&inst, &out).is_empty());
    }

    #[test]
    fn all_released_at_zero() {
        let inst = example1();
        let mut zero = inst.clone();
        for r in &mut zero.requests {
            r.release = 0.0;
        }
        let mut p = Alg1::new();
        let out = simulate(Scenario::Fixed(&zero), &mut p).unwrap();
        assert_eq!(p.choice().unwrap().start, 4.5);
        assert_eq!(out.completion, 13.5);
    }

    #[test]
    fn single_open_request() {
        let inst = Instance::from_pairs(MetricSpace::SemiLine, Variant::Open, [(Point::Coord(2.0), 0.0)]);
        let mut p = Alg1::new();
        let out = simulate(Scenario::Fixed(&inst), &mut p).unwrap();
        assert_eq!(p.choice().unwrap().start, 1.0);
        assert_eq!(out.completion, 3.0);
    }

    #[test]
    fn within_three_halves_on_example() {
        let inst = example1();
        let out = simulate(Scenario::Fixed(&inst), &mut Alg1::new()).unwrap();
        let opt = opt_makespan(&inst).unwrap().makespan;
        assert!(out.completion <= 1.5 * opt + 1e-9);
    }
}
