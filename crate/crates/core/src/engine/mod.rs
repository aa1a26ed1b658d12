//! Event-driven simulation of a unit-speed server driven by a [`Policy`]
//! against a fixed release schedule or an adaptive [`Adversary`].
//!
//! At every event time the engine
//! 1. lets the adversary emit requests,
//! 2. releases everything due,
//! 3. serves released requests under the server,
//! 4. repeats 1–3 until nothing changes,
//! 5. stops if the run is complete,
//! 6. asks the policy for an action and advances to the next event.

mod trajectory;

use thiserror::Error;

pub use trajectory::{position_at, verify_outcome, Outcome, OutcomeViolation, PositionError, Tag, Trajectory, Waypoint};

use crate::instance::{Instance, Knowledge, Request, Variant};
use crate::metric::{MetricSpace, Point, EPS};

/// What a policy learns before the run starts.
#[derive(Clone, Debug)]
pub struct PolicyContext {
    pub space: MetricSpace,
    pub variant: Variant,
    pub count: usize,
    /// Request locations by `id - 1`, present only when they are public.
    pub locations: Option<Vec<Point>>,
}

/// A request as the policy currently sees it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RequestStatus {
    pub id: usize,
    pub point: Option<Point>,
    /// Set once the request is released.
    pub release: Option<f64>,
    pub served: Option<f64>,
}

impl RequestStatus {
    pub fn is_released(&self) -> bool {
        self.release.is_some()
    }

    pub fn is_served(&self) -> bool {
        self.served.is_some()
    }

    pub fn is_pending(&self) -> bool {
        self.is_released() && !self.is_served()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Observation<'a> {
    pub now: f64,
    pub position: Point,
    pub requests: &'a [RequestStatus],
}

impl Observation<'_> {
    pub fn status(&self, id: usize) -> &RequestStatus {
        &self.requests[id - 1]
    }

    pub fn all_released(&self) -> bool {
        self.requests.iter().all(RequestStatus::is_released)
    }

    pub fn all_served(&self) -> bool {
        self.requests.iter().all(RequestStatus::is_served)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Action {
    /// Head for `target` along a shortest path. Interruptible: the policy is
    /// consulted again at every event on the way.
    MoveTo(Point),
    /// Stand still until `t`; `f64::INFINITY` waits for the next event.
    WaitUntil(f64),
    /// Stand still until request `id` is released.
    WaitForRelease(usize),
    /// Declare the run over. Only valid once it is complete.
    Finish,
}

/// An online algorithm.
pub trait Policy {
    fn name(&self) -> String;

    /// Whether the policy relies on knowing all locations up front.
    fn needs_locations(&self) -> bool;

    /// Called once before the run. Rejects unsuitable spaces or variants.
    fn init(&mut self, ctx: &PolicyContext) -> Result<(), String>;

    fn decide(&mut self, obs: &Observation<'_>) -> Action;
}

/// A request handed to the engine by an adversary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Emission {
    pub id: usize,
    pub point: Point,
    /// Must not precede the emission time.
    pub release: f64,
}

/// The motion the server is about to perform.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub start_time: f64,
    pub start: Point,
    /// `None` while standing still.
    pub target: Option<Point>,
}

#[derive(Clone, Copy, Debug)]
pub struct AdversaryView<'a> {
    pub now: f64,
    pub position: Point,
    /// Service times by `id - 1`.
    pub served: &'a [Option<f64>],
    /// Set when asked for a wake time.
    pub segment: Option<Segment>,
}

/// Adaptive release controller.
pub trait Adversary {
    fn name(&self) -> String;
    fn space(&self) -> MetricSpace;
    fn variant(&self) -> Variant;
    /// Total number of requests that will be emitted.
    fn count(&self) -> usize;
    /// Locations announced at time 0, if the construction makes them public.
    fn announced(&self) -> Option<Vec<Point>>;
    /// Called at every event time; returns new requests.
    fn on_event(&mut self, view: &AdversaryView<'_>) -> Vec<Emission>;
    /// Next time the adversary wants to look, given the planned segment.
    fn next_wake(&mut self, view: &AdversaryView<'_>) -> Option<f64>;
}

pub enum Scenario<'a> {
    Fixed(&'a Instance),
    Adaptive(&'a mut dyn Adversary),
}

#[derive(Clone, Copy, Debug)]
pub struct SimConfig {
    pub step_budget: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { step_budget: 1_000_000 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("incompatible pairing: {0}")]
    Incompatible(String),
    #[error("invalid action {action} at t={time}: {reason}")]
    InvalidAction { time: f64, action: String, reason: String },
    #[error("causality violation: request {id} emitted at t={time} with release {release}")]
    Causality { time: f64, id: usize, release: f64 },
    #[error("bad emission at t={time}: {reason}")]
    BadEmission { time: f64, reason: String },
    #[error("run stalled at t={time} at {position:?}: no further event can happen")]
    Stall { time: f64, position: Point },
    #[error("step budget of {steps} events exceeded at t={time}; last waypoints: {tail:?}")]
    StepBudget { steps: usize, time: f64, tail: Vec<Waypoint> },
}

/// Result of a run: the outcome and the instance it was played on (for
/// adaptive runs, the requests the adversary actually emitted).
#[derive(Clone, Debug)]
pub struct Run {
    pub outcome: Outcome,
    pub instance: Instance,
}

/// Plays `policy` on `scenario` with the default configuration.
pub fn simulate(scenario: Scenario<'_>, policy: &mut dyn Policy) -> Result<Outcome, SimError> {
    run(scenario, policy, SimConfig::default()).map(|r| r.outcome)
}

/// Plays `policy` on `scenario` and also returns the realized instance.
pub fn run(scenario: Scenario<'_>, policy: &mut dyn Policy, config: SimConfig) -> Result<Run, SimError> {
    match scenario {
        Scenario::Fixed(inst) => {
            let mut schedule = FixedSchedule { inst, emitted: false };
            let mut r = Engine::play(&mut schedule, policy, config, Some(inst.knowledge))?;
            r.instance = inst.clone();
            Ok(r)
        }
        Scenario::Adaptive(adv) => Engine::play(adv, policy, config, None),
    }
}

/// A fixed instance seen as an adversary that emits everything at time 0.
struct FixedSchedule<'a> {
    inst: &'a Instance,
    emitted: bool,
}

impl Adversary for FixedSchedule<'_> {
    fn name(&self) -> String {
        "fixed".into()
    }
    fn space(&self) -> MetricSpace {
        self.inst.space.clone()
    }
    fn variant(&self) -> Variant {
        self.inst.variant
    }
    fn count(&self) -> usize {
        self.inst.len()
    }
    fn announced(&self) -> Option<Vec<Point>> {
        match self.inst.knowledge {
            Knowledge::LocationsKnown => Some(self.inst.points()),
            Knowledge::CountKnown => None,
        }
    }
    fn on_event(&mut self, _view: &AdversaryView<'_>) -> Vec<Emission> {
        if std::mem::replace(&mut self.emitted, true) {
            return vec![];
        }
        self.inst
            .requests
            .iter()
            .map(|r| Emission { id: r.id, point: r.point, release: r.release })
            .collect()
    }
    fn next_wake(&mut self, _view: &AdversaryView<'_>) -> Option<f64> {
        None
    }
}

/// Consecutive zero-duration decisions tolerated before declaring a stall.
const IDLE_LIMIT: usize = 10_000;

struct Engine {
    space: MetricSpace,
    variant: Variant,
    now: f64,
    pos: Point,
    status: Vec<RequestStatus>,
    /// Emitted requests, by `id - 1`.
    emitted: Vec<Option<Emission>>,
    announced: Option<Vec<Point>>,
    served: Vec<Option<f64>>,
    waypoints: Vec<Waypoint>,
}

impl Engine {
    fn play(
        adv: &mut dyn Adversary,
        policy: &mut dyn Policy,
        config: SimConfig,
        knowledge: Option<Knowledge>,
    ) -> Result<Run, SimError> {
        let space = adv.space();
        let variant = adv.variant();
        let n = adv.count();
        let announced = adv.announced();
        let knowledge = knowledge.unwrap_or(if announced.is_some() {
            Knowledge::LocationsKnown
        } else {
            Knowledge::CountKnown
        });
        if policy.needs_locations() && announced.is_none() {
            return Err(SimError::Incompatible(format!(
                "policy {} needs the request locations, but {} only reveals the count",
                policy.name(),
                adv.name()
            )));
        }
        let ctx = PolicyContext { space: space.clone(), variant, count: n, locations: announced.clone() };
        policy.init(&ctx).map_err(SimError::Incompatible)?;

        let origin = space.origin();
        let mut e = Engine {
            space,
            variant,
            now: 0.0,
            pos: origin,
            status: (1..=n)
                .map(|id| RequestStatus {
                    id,
                    point: announced.as_ref().map(|a| a[id - 1]),
                    release: None,
                    served: None,
                })
                .collect(),
            emitted: vec![None; n],
            announced,
            served: vec![None; n],
            waypoints: vec![Waypoint { time: 0.0, point: origin, tag: Tag::Wait }],
        };

        let mut steps = 0usize;
        let mut idle = 0usize;
        loop {
            steps += 1;
            if steps > config.step_budget {
                let tail = e.waypoints.iter().rev().take(5).rev().copied().collect();
                return Err(SimError::StepBudget { steps: config.step_budget, time: e.now, tail });
            }
            e.settle(adv)?;
            if let Some(completion) = e.completion() {
                let outcome = Outcome {
                    completion,
                    service_times: e.served.iter().map(|s| s.unwrap_or(f64::NAN)).collect(),
                    trajectory: Trajectory { waypoints: e.waypoints },
                };
                let requests = e
                    .emitted
                    .iter()
                    .map(|x| {
                        let x = x.expect("complete runs emitted everything");
                        Request { id: x.id, point: x.point, release: x.release }
                    })
                    .collect();
                let instance = Instance { space: e.space, variant, knowledge, requests };
                return Ok(Run { outcome, instance });
            }

            let obs = Observation { now: e.now, position: e.pos, requests: &e.status };
            let action = policy.decide(&obs);
            let (end, target) = e.check_action(action)?;
            if end <= e.now {
                // Zero-length step: snap and ask again.
                if let Some(t) = target {
                    if t != e.pos {
                        e.pos = t;
                        e.waypoints.push(Waypoint { time: e.now, point: t, tag: Tag::Move });
                    }
                }
                idle += 1;
                if idle > IDLE_LIMIT {
                    return Err(SimError::Stall { time: e.now, position: e.pos });
                }
                continue;
            }
            idle = 0;

            let mut next = end;
            if let Some(r) = e.next_release() {
                next = next.min(r);
            }
            let view = AdversaryView {
                now: e.now,
                position: e.pos,
                served: &e.served,
                segment: Some(Segment { start_time: e.now, start: e.pos, target }),
            };
            if let Some(w) = adv.next_wake(&view) {
                if w > e.now {
                    next = next.min(w);
                }
            }
            if let Some(t) = target {
                if let Some(s) = e.pass_through(&t) {
                    next = next.min(s);
                }
            }
            if !next.is_finite() {
                return Err(SimError::Stall { time: e.now, position: e.pos });
            }
            e.advance(next, end, target);
        }
    }

    /// Adversary emissions, releases and serves until a fixed point.
    fn settle(&mut self, adv: &mut dyn Adversary) -> Result<(), SimError> {
        loop {
            let view = AdversaryView { now: self.now, position: self.pos, served: &self.served, segment: None };
            let emissions = adv.on_event(&view);
            let mut changed = !emissions.is_empty();
            for em in emissions {
                self.accept(em)?;
            }
            for i in 0..self.status.len() {
                if let Some(em) = self.emitted[i] {
                    if self.status[i].release.is_none() && em.release <= self.now {
                        self.status[i].release = Some(em.release);
                        self.status[i].point = Some(em.point);
                    }
                }
                let s = &mut self.status[i];
                if s.is_pending() && self.space.coincide(&self.pos, &s.point.expect("released")) {
                    s.served = Some(self.now);
                    self.served[i] = Some(self.now);
                    self.waypoints.push(Waypoint { time: self.now, point: self.pos, tag: Tag::Serve(i + 1) });
                    changed = true;
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    fn accept(&mut self, mut em: Emission) -> Result<(), SimError> {
        let n = self.status.len();
        let time = self.now;
        if em.id == 0 || em.id > n {
            return Err(SimError::BadEmission { time, reason: format!("id {} outside 1..={n}", em.id) });
        }
        if self.emitted[em.id - 1].is_some() {
            return Err(SimError::BadEmission { time, reason: format!("request {} emitted twice", em.id) });
        }
        if !self.space.contains(&em.point) {
            return Err(SimError::BadEmission { time, reason: format!("request {} lies outside the space", em.id) });
        }
        if let Some(a) = &self.announced {
            if !self.space.coincide(&a[em.id - 1], &em.point) {
                return Err(SimError::BadEmission {
                    time,
                    reason: format!("request {} differs from its announced location", em.id),
                });
            }
        }
        if !(em.release >= time - EPS) {
            return Err(SimError::Causality { time, id: em.id, release: em.release });
        }
        em.release = em.release.max(time);
        self.emitted[em.id - 1] = Some(em);
        Ok(())
    }

    fn completion(&self) -> Option<f64> {
        if !self.served.iter().all(Option::is_some) {
            return None;
        }
        match self.variant {
            Variant::Open => Some(self.served.iter().flatten().fold(0.0, |a: f64, &b| a.max(b))),
            Variant::Closed => self.space.coincide(&self.pos, &self.space.origin()).then_some(self.now),
        }
    }

    /// Returns the time the action ends and, for moves, the target.
    fn check_action(&self, action: Action) -> Result<(f64, Option<Point>), SimError> {
        let bad = |reason: &str| SimError::InvalidAction {
            time: self.now,
            action: format!("{action:?}"),
            reason: reason.to_string(),
        };
        match action {
            Action::MoveTo(t) => {
                if !self.space.contains(&t) {
                    return Err(bad("target outside the space"));
                }
                let d = self.space.d(&self.pos, &t);
                if d <= EPS {
                    return Ok((self.now, Some(t)));
                }
                Ok((self.now + d, Some(t)))
            }
            Action::WaitUntil(t) => {
                if t.is_nan() || t < self.now - EPS {
                    return Err(bad("wait target lies in the past"));
                }
                Ok((t, None))
            }
            Action::WaitForRelease(id) => {
                if id == 0 || id > self.status.len() {
                    return Err(bad("unknown request id"));
                }
                if self.status[id - 1].is_released() {
                    return Err(bad("request already released"));
                }
                Ok((self.emitted[id - 1].map_or(f64::INFINITY, |e| e.release), None))
            }
            Action::Finish => Err(bad("run is not complete")),
        }
    }

    fn next_release(&self) -> Option<f64> {
        self.emitted
            .iter()
            .zip(&self.status)
            .filter(|(_, s)| !s.is_released())
            .filter_map(|(e, _)| e.map(|e| e.release))
            .reduce(f64::min)
    }

    /// Earliest time the current move passes over a released, unserved
    /// request before reaching its target.
    fn pass_through(&self, target: &Point) -> Option<f64> {
        let total = self.space.d(&self.pos, target);
        self.status
            .iter()
            .filter(|s| s.is_pending())
            .filter_map(|s| {
                let p = s.point.expect("released");
                let e = self.space.d(&self.pos, &p);
                if e <= EPS || e >= total - EPS {
                    return None;
                }
                let there = self.space.travel_unchecked(&self.pos, target, e);
                self.space.coincide(&there, &p).then_some(self.now + e)
            })
            .reduce(f64::min)
    }

    fn advance(&mut self, next: f64, end: f64, target: Option<Point>) {
        let dt = next - self.now;
        match target {
            Some(t) => {
                self.pos = if next >= end { t } else { self.space.travel_unchecked(&self.pos, &t, dt) };
                self.waypoints.push(Waypoint { time: next, point: self.pos, tag: Tag::Move });
            }
            None => self.waypoints.push(Waypoint { time: next, point: self.pos, tag: Tag::Wait }),
        }
        self.now = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Walks to each request in id order, waiting where needed, then home.
    struct InOrder;

    impl Policy for InOrder {
        fn name(&self) -> String {
            "in-order".into()
        }
        fn needs_locations(&self) -> bool {
            true
        }
        fn init(&mut self, _ctx: &PolicyContext) -> Result<(), String> {
            Ok(())
        }
        fn decide(&mut self, obs: &Observation<'_>) -> Action {
            match obs.requests.iter().find(|s| !s.is_served()) {
                Some(s) => {
                    let p = s.point.unwrap();
                    if obs.position == p {
                        Action::WaitForRelease(s.id)
                    } else {
                        Action::MoveTo(p)
                    }
                }
                None => Action::MoveTo(Point::Coord(0.0)),
            }
        }
    }

    #[test]
    fn empty_closed_completes_at_zero() {
        let inst = Instance::new(MetricSpace::SemiLine, Variant::Closed, vec![]);
        let out = simulate(Scenario::Fixed(&inst), &mut InOrder).unwrap();
        assert_eq!(out.completion, 0.0);
    }

    #[test]
    fn wait_then_return() {
        let inst = Instance::from_pairs(MetricSpace::SemiLine, Variant::Closed, [(Point::Coord(1.0), 5.0)]);
        let out = simulate(Scenario::Fixed(&inst), &mut InOrder).unwrap();
        assert_eq!(out.completion, 6.0);
        assert_eq!(out.service_times, vec![5.0]);
        assert!(verify_outcome(&inst, &out).is_empty());
    }

    #[test]
    fn serves_while_passing() {
        let inst = Instance::from_pairs(
            MetricSpace::SemiLine,
            Variant::Open,
            [(Point::Coord(1.0), 0.0), (Point::Coord(0.5), 0.0)],
        );
        let out = simulate(Scenario::Fixed(&inst), &mut InOrder).unwrap();
        assert_eq!(out.service_times, vec![1.0, 0.5]);
        assert_eq!(out.completion, 1.0);
        assert!(verify_outcome(&inst, &out).is_empty());
    }

    struct Lazy;

    impl Policy for Lazy {
        fn name(&self) -> String {
            "lazy".into()
        }
        fn needs_locations(&self) -> bool {
            false
        }
        fn init(&mut self, _ctx: &PolicyContext) -> Result<(), String> {
            Ok(())
        }
        fn decide(&mut self, _obs: &Observation<'_>) -> Action {
            Action::WaitUntil(f64::INFINITY)
        }
    }

    #[test]
    fn stalls_are_reported() {
        let inst = Instance::from_pairs(MetricSpace::SemiLine, Variant::Open, [(Point::Coord(1.0), 1.0)]);
        let err = simulate(Scenario::Fixed(&inst), &mut Lazy).unwrap_err();
        assert!(matches!(err, SimError::Stall { time, .. } if time == 1.0), "{err}");
    }

    #[test]
    fn finish_too_early_is_invalid() {
        struct Quitter;
        impl Policy for Quitter {
            fn name(&self) -> String {
                "quitter".into()
            }
            fn needs_locations(&self) -> bool {
                false
            }
            fn init(&mut self, _ctx: &PolicyContext) -> Result<(), String> {
                Ok(())
            }
            fn decide(&mut self, _obs: &Observation<'_>) -> Action {
                Action::Finish
            }
        }
        let inst = Instance::from_pairs(MetricSpace::SemiLine, Variant::Open, [(Point::Coord(1.0), 0.0)]);
        let err = simulate(Scenario::Fixed(&inst), &mut Quitter).unwrap_err();
        assert!(matches!(err, SimError::InvalidAction { .. }));
    }

    #[test]
    fn count_instances_hide_locations() {
        let mut inst = Instance::from_pairs(MetricSpace::SemiLine, Variant::Open, [(Point::Coord(1.0), 0.0)]);
        inst.knowledge = Knowledge::CountKnown;
        let err = simulate(Scenario::Fixed(&inst), &mut InOrder).unwrap_err();
        assert!(matches!(err, SimError::Incompatible(_)));
    }

    #[test]
    fn step_budget_is_enforced() {
        struct Pacer(bool);
        impl Policy for Pacer {
            fn name(&self) -> String {
                "pacer".into()
            }
            fn needs_locations(&self) -> bool {
                false
            }
            fn init(&mut self, _ctx: &PolicyContext) -> Result<(), String> {
                Ok(())
            }
            fn decide(&mut self, _obs: &Observation<'_>) -> Action {
                self.0 = !self.0;
                Action::MoveTo(Point::Coord(if self.0 { 0.5 } else { 0.0 }))
            }
        }
        let inst = Instance::from_pairs(MetricSpace::SemiLine, Variant::Open, [(Point::Coord(1.0), 0.0)]);
        let r = run(Scenario::Fixed(&inst), &mut Pacer(false), SimConfig { step_budget: 100 });
        assert!(matches!(r, Err(SimError::StepBudget { steps: 100, .. })));
    }
}
