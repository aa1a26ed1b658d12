//! Reference policies that need no location knowledge.

use super::plan::{Leg, Plan};
use crate::engine::{Action, Observation, Policy, PolicyContext};
use crate::instance::Variant;
use crate::metric::{MetricSpace, Point, EPS};
use crate::oracle::{opt_makespan_with, DP_CAP};

/// Waits at the origin until every request is out, then runs an optimal
/// tour (or path) over the revealed locations.
#[derive(Debug, Default)]
pub struct WaitAll {
    space: Option<MetricSpace>,
    variant: Option<Variant>,
    plan: Option<Plan>,
}

impl WaitAll {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Policy for WaitAll {
    fn name(&self) -> String {
        "wait-all".into()
    }

    fn needs_locations(&self) -> bool {
        false
    }

    fn init(&mut self, ctx: &PolicyContext) -> Result<(), String> {
        if ctx.count > DP_CAP {
            return Err(format!("wait-all solves the offline tour exactly and accepts at most {DP_CAP} requests"));
        }
        self.space = Some(ctx.space.clone());
        self.variant = Some(ctx.variant);
        Ok(())
    }

    fn decide(&mut self, obs: &Observation<'_>) -> Action {
        let space = self.space.as_ref().expect("initialized");
        if self.plan.is_none() {
            if !obs.all_released() {
                return Action::WaitUntil(f64::INFINITY);
            }
            let points: Vec<Point> = obs.requests.iter().map(|s| s.point.expect("released")).collect();
            let zeros = vec![0.0; points.len()];
            let variant = self.variant.expect("initialized");
            let best = opt_makespan_with(space, variant, &points, &zeros).expect("within cap");
            let mut plan = Plan::default();
            for id in best.order {
                plan.push(Leg::Visit(id));
            }
            if variant == Variant::Closed {
                plan.push(Leg::Go { target: space.origin(), wait: false });
            }
            self.plan = Some(plan);
        }
        let plan = self.plan.as_mut().expect("built above");
        plan.next(space, obs).unwrap_or(Action::WaitUntil(f64::INFINITY))
    }
}

/// Heads for the nearest released, unserved request (lowest id on ties);
/// otherwise returns to the origin and waits.
#[derive(Debug, Default)]
pub struct Greedy {
    space: Option<MetricSpace>,
}

impl Greedy {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Policy for Greedy {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn needs_locations(&self) -> bool {
        false
    }

    fn init(&mut self, ctx: &PolicyContext) -> Result<(), String> {
        self.space = Some(ctx.space.clone());
        Ok(())
    }

    fn decide(&mut self, obs: &Observation<'_>) -> Action {
        let space = self.space.as_ref().expect("initialized");
        let mut best: Option<(f64, Point)> = None;
        for s in obs.requests.iter().filter(|s| s.is_pending()) {
            let p = s.point.expect("released");
            let d = space.d(&obs.position, &p);
            if best.is_none_or(|(b, _)| d < b - EPS) {
                best = Some((d, p));
            }
        }
        match best {
            Some((_, p)) => Action::MoveTo(p),
            None if space.coincide(&obs.position, &space.origin()) => Action::WaitUntil(f64::INFINITY),
            None => Action::MoveTo(space.origin()),
        }
    }
}
