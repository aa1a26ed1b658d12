//! Semi-line policies: the open-variant algorithm that parks at the middle,
//! and the optimal closed-variant sweep.

use super::plan::{Leg, Plan};
use crate::engine::{Action, Observation, Policy, PolicyContext};
use crate::instance::Variant;
use crate::metric::{MetricSpace, Point, EPS};

fn coord(p: &Point) -> f64 {
    match *p {
        Point::Coord(x) => x,
        _ => panic!("semi-line point expected"),
    }
}

fn check(ctx: &PolicyContext, name: &str, variant: Variant) -> Result<Vec<f64>, String> {
    if ctx.space != MetricSpace::SemiLine {
        return Err(format!("{name} needs a semi-line"));
    }
    if ctx.variant != variant {
        return Err(format!("{name} solves the {variant} variant only"));
    }
    let points = ctx.locations.as_ref().ok_or_else(|| format!("{name} needs the request locations"))?;
    Ok(points.iter().map(coord).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Stage {
    /// Sweep outwards without leaving unreleased requests behind.
    Sweep,
    /// Heading for (or parked at) the middle; `left` is where the sweep
    /// stopped.
    Middle { left: f64 },
    /// Final pass, fully planned.
    Finish,
}

/// Open semi-line algorithm.
#[derive(Debug)]
pub struct Alg4SemiLine {
    positions: Vec<f64>,
    far: f64,
    stage: Stage,
    plan: Plan,
}

impl Default for Alg4SemiLine {
    fn default() -> Self {
        Self::new()
    }
}

impl Alg4SemiLine {
    pub fn new() -> Self {
        Self { positions: vec![], far: 0.0, stage: Stage::Sweep, plan: Plan::default() }
    }

    /// Lowest position of an unreleased request.
    fn lowest_unreleased(&self, obs: &Observation<'_>) -> f64 {
        obs.requests
            .iter()
            .filter(|s| !s.is_released())
            .map(|s| self.positions[s.id - 1])
            .fold(f64::INFINITY, f64::min)
    }

    fn released_where(&self, obs: &Observation<'_>, keep: impl Fn(f64) -> bool) -> bool {
        obs.requests.iter().all(|s| s.is_released() || !keep(self.positions[s.id - 1]))
    }

    fn sweep_action(&self, obs: &Observation<'_>) -> Option<Action> {
        let mut p = Plan::default();
        p.push(Leg::Go { target: Point::Coord(self.far), wait: true });
        p.next(&MetricSpace::SemiLine, obs)
    }
}

impl Policy for Alg4SemiLine {
    fn name(&self) -> String {
        "alg4-semiline".into()
    }

    fn needs_locations(&self) -> bool {
        true
    }

    fn init(&mut self, ctx: &PolicyContext) -> Result<(), String> {
        self.positions = check(ctx, "alg4-semiline", Variant::Open)?;
        self.far = self.positions.iter().copied().fold(0.0, f64::max);
        Ok(())
    }

    fn decide(&mut self, obs: &Observation<'_>) -> Action {
        let l = self.far;
        let pos = coord(&obs.position);
        if self.stage == Stage::Sweep {
            let x = self.lowest_unreleased(obs);
            let stop = (l / 2.0 + x).min(0.75 * l);
            if obs.now < stop - EPS {
                // Keep sweeping, but be standing still at time `stop`.
                let budget = stop - obs.now;
                return match self.sweep_action(obs) {
                    Some(Action::MoveTo(Point::Coord(y))) if y > pos + budget => Action::MoveTo(Point::Coord(pos + budget)),
                    Some(Action::MoveTo(t)) => Action::MoveTo(t),
                    _ => Action::WaitUntil(stop),
                };
            }
            if x >= l / 4.0 {
                self.plan.push(Leg::Go { target: Point::Coord(l), wait: true });
                self.stage = Stage::Finish;
            } else {
                self.stage = Stage::Middle { left: pos.min(x) };
            }
        }
        if let Stage::Middle { left } = self.stage {
            let mid = l / 2.0;
            if self.released_where(obs, |p| p <= l / 4.0) {
                self.plan.push(Leg::Go { target: Point::Coord(left), wait: false });
                self.plan.push(Leg::Go { target: Point::Coord(l), wait: true });
                self.stage = Stage::Finish;
            } else if (pos - mid).abs() > EPS {
                return Action::MoveTo(Point::Coord(mid));
            } else if obs.now >= l && self.released_where(obs, |p| p >= 0.75 * l) {
                self.plan.push(Leg::Go { target: Point::Coord(l), wait: false });
                self.plan.push(Leg::Go { target: Point::Coord(0.0), wait: true });
                self.stage = Stage::Finish;
            } else if obs.now < l {
                return Action::WaitUntil(l);
            } else {
                return Action::WaitUntil(f64::INFINITY);
            }
        }
        self.plan.next(&MetricSpace::SemiLine, obs).unwrap_or(Action::WaitUntil(f64::INFINITY))
    }
}

/// Closed semi-line: go to the far end, then sweep home waiting as needed.
#[derive(Debug, Default)]
pub struct Alg5SemiLine {
    plan: Plan,
}

impl Alg5SemiLine {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Policy for Alg5SemiLine {
    fn name(&self) -> String {
        "alg5-semiline".into()
    }

    fn needs_locations(&self) -> bool {
        true
    }

    fn init(&mut self, ctx: &PolicyContext) -> Result<(), String> {
        let positions = check(ctx, "alg5-semiline", Variant::Closed)?;
        let far = positions.iter().copied().fold(0.0, f64::max);
        self.plan.clear();
        self.plan.push(Leg::Go { target: Point::Coord(far), wait: false });
        self.plan.push(Leg::Go { target: Point::Coord(0.0), wait: true });
        Ok(())
    }

    fn decide(&mut self, obs: &Observation<'_>) -> Action {
        self.plan.next(&MetricSpace::SemiLine, obs).unwrap_or(Action::WaitUntil(f64::INFINITY))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{simulate, verify_outcome, Scenario};
    use crate::instance::Instance;
    use crate::oracle::opt_makespan;

    fn semiline(variant: Variant, pairs: &[(f64, f64)]) -> Instance {
        Instance::from_pairs(MetricSpace::SemiLine, variant, pairs.iter().map(|&(x, r)| (Point::Coord(x), r)))
    }

    #[test]
    fn alg4_all_released() {
        let inst = semiline(Variant::Open, &[(0.2, 0.0), (0.6, 0.0), (1.0, 0.0)]);
        let out = simulate(Scenario::Fixed(&inst), &mut Alg4SemiLine::new()).unwrap();
        assert_eq!(out.completion, 1.0);
    }

    #[test]
    fn alg4_right_branch() {
        let inst = semiline(Variant::Open, &[(0.2, 10.0), (1.0, 0.0)]);
        let out = simulate(Scenario::Fixed(&inst), &mut Alg4SemiLine::new()).unwrap();
        assert!(verify_outcome(&inst, &out).is_empty());
        assert_eq!(out.completion, 10.0);
        assert_eq!(opt_makespan(&inst).unwrap().makespan, 10.0);
    }

    #[test]
    fn alg5_single() {
        let inst = semiline(Variant::Closed, &[(1.0, 5.0)]);
        let out = simulate(Scenario::Fixed(&inst), &mut Alg5SemiLine::new()).unwrap();
        assert_eq!(out.completion, 6.0);
    }

    #[test]
    fn alg5_waits_on_the_way_back() {
        let inst = semiline(Variant::Closed, &[(0.5, 3.0), (1.0, 0.0)]);
        let out = simulate(Scenario::Fixed(&inst), &mut Alg5SemiLine::new()).unwrap();
        assert_eq!(out.completion, 3.5);
        assert_eq!(opt_makespan(&inst).unwrap().makespan, 3.5);
    }

    #[test]
    fn wrong_variant_is_rejected() {
        let inst = semiline(Variant::Closed, &[(1.0, 0.0)]);
        assert!(simulate(Scenario::Fixed(&inst), &mut Alg4SemiLine::new()).is_err());
    }
}
