//! Closed star: either commit to one long ray right away, or wait until the
//! total ray length has elapsed and sweep the rays whose released outer
//! parts are worth the most within half the total length.

use super::knapsack::{knapsack_select, KnapsackItem, KnapsackMode};
use super::plan::{Leg, Plan};
use crate::engine::{Action, Observation, Policy, PolicyContext, RequestStatus};
use crate::instance::Variant;
use crate::metric::{MetricSpace, Point};

/// Ray length and the released part measured from its outer end.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RaySummary {
    pub index: usize,
    /// Depth of the deepest request on the ray.
    pub length: f64,
    /// `length` minus the depth of the deepest unreleased request, or
    /// `length` when everything on the ray is released.
    pub released_prefix: f64,
}

/// Summaries for every ray of a `rays`-ray star given the current statuses.
pub fn ray_summaries(rays: usize, requests: &[RequestStatus]) -> Vec<RaySummary> {
    let mut length = vec![0.0f64; rays];
    let mut blocked = vec![0.0f64; rays];
    for s in requests {
        let Some(Point::Ray { ray, depth }) = s.point else { continue };
        if depth <= 0.0 {
            continue;
        }
        length[ray] = length[ray].max(depth);
        if !s.is_released() {
            blocked[ray] = blocked[ray].max(depth);
        }
    }
    (0..rays)
        .map(|j| RaySummary { index: j, length: length[j], released_prefix: length[j] - blocked[j] })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Start,
    /// Plan running; afterwards clean up.
    Sweeping,
    Cleanup,
}

#[derive(Debug)]
pub struct Alg3Star {
    mode: KnapsackMode,
    space: Option<MetricSpace>,
    rays: usize,
    lengths: Vec<f64>,
    phase: Phase,
    plan: Plan,
    selected: Option<Vec<usize>>,
    committed: Option<usize>,
}

impl Alg3Star {
    pub fn new(mode: KnapsackMode) -> Self {
        Self {
            mode,
            space: None,
            rays: 0,
            lengths: vec![],
            phase: Phase::Start,
            plan: Plan::default(),
            selected: None,
            committed: None,
        }
    }

    /// Rays picked by the knapsack step (0-based), if that branch ran.
    pub fn selected(&self) -> Option<&[usize]> {
        self.selected.as_deref()
    }

    /// The long ray served first, if that branch ran.
    pub fn committed_ray(&self) -> Option<usize> {
        self.committed
    }

    fn total(&self) -> f64 {
        self.lengths.iter().sum()
    }

    fn extremity(&self, ray: usize) -> Point {
        Point::Ray { ray, depth: self.lengths[ray] }
    }

    fn origin() -> Point {
        Point::Ray { ray: 0, depth: 0.0 }
    }

    fn cleanup(&mut self, obs: &Observation<'_>) -> Action {
        if !obs.all_released() {
            return Action::WaitUntil(f64::INFINITY);
        }
        let space = self.space.as_ref().expect("initialized");
        let mut deepest: Option<(usize, f64)> = None;
        for s in obs.requests.iter().filter(|s| !s.is_served()) {
            let Some(Point::Ray { ray, depth }) = s.point else { continue };
            deepest = match deepest {
                Some((r, d)) if r < ray || (r == ray && d >= depth) => Some((r, d)),
                _ => Some((ray, depth)),
            };
        }
        let Some((ray, depth)) = deepest else {
            return Action::MoveTo(Self::origin());
        };
        self.plan.push(Leg::Go { target: Point::Ray { ray, depth }, wait: false });
        self.plan.push(Leg::Go { target: Self::origin(), wait: false });
        self.plan.next(space, obs).unwrap_or(Action::WaitUntil(f64::INFINITY))
    }
}

impl Policy for Alg3Star {
    fn name(&self) -> String {
        match self.mode {
            KnapsackMode::Exact => "alg3-star:exact".into(),
            KnapsackMode::Fptas(e) => format!("alg3-star:fptas={e}"),
        }
    }

    fn needs_locations(&self) -> bool {
        true
    }

    fn init(&mut self, ctx: &PolicyContext) -> Result<(), String> {
        let MetricSpace::Star { rays } = ctx.space else {
            return Err("alg3-star needs a star".into());
        };
        if ctx.variant != Variant::Closed {
            return Err("alg3-star solves the closed variant only".into());
        }
        let points = ctx.locations.as_ref().ok_or("alg3-star needs the request locations")?;
        let mut lengths = vec![0.0f64; rays];
        for p in points {
            if let Point::Ray { ray, depth } = *p {
                if depth > 0.0 {
                    lengths[ray] = lengths[ray].max(depth);
                }
            }
        }
        self.space = Some(ctx.space.clone());
        self.rays = rays;
        self.lengths = lengths;
        Ok(())
    }

    fn decide(&mut self, obs: &Observation<'_>) -> Action {
        let total = self.total();
        if self.phase == Phase::Start {
            // Longest ray, lowest index on ties.
            let (long, r) = self
                .lengths
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |b, (j, r)| if r > b.1 { (j, r) } else { b });
            if r >= total / 4.0 {
                self.committed = Some(long);
                self.plan.push(Leg::Go { target: self.extremity(long), wait: false });
                self.plan.push(Leg::Go { target: Self::origin(), wait: true });
            } else {
                if obs.now < total {
                    return Action::WaitUntil(total);
                }
                let items: Vec<KnapsackItem> = ray_summaries(self.rays, obs.requests)
                    .into_iter()
                    .filter(|s| s.length > 0.0)
                    .map(|s| KnapsackItem { index: s.index, weight: s.length, value: s.released_prefix })
                    .collect();
                let chosen = knapsack_select(&items, total / 2.0, self.mode).expect("valid ray items");
                for &j in &chosen {
                    self.plan.push(Leg::Go { target: self.extremity(j), wait: false });
                    self.plan.push(Leg::Go { target: Self::origin(), wait: false });
                }
                self.selected = Some(chosen);
            }
            self.phase = Phase::Sweeping;
        }
        let space = self.space.as_ref().expect("initialized");
        if let Some(a) = self.plan.next(space, obs) {
            return a;
        }
        self.phase = Phase::Cleanup;
        self.cleanup(obs)
    }
}
