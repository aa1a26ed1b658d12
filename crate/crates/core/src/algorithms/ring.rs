//! Closed ring. Instances with a gap larger than half the ring behave like
//! line instances and go to the tour-based algorithm. Otherwise the server
//! either crosses a wide empty gap first or waits until a third of one half
//! of the ring is fully released.

use super::general::Alg1;
use super::plan::{directed, Dir, Leg, Plan};
use crate::engine::{Action, Observation, Policy, PolicyContext};
use crate::instance::{Instance, Variant};
use crate::metric::{MetricSpace, Point, EPS};

/// Which branch the ring algorithm took.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RingBranch {
    /// Delegated to the tour-based algorithm.
    LineLike,
    /// Crossed the empty gap between requests `i` and `i + 1` (ids).
    Gap { i: usize },
    /// Waited until `start`, then swept a released window whose far end
    /// sits at arc position `far`.
    Window { start: f64, far: f64, clockwise: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Waiting,
    Loop,
    Tail,
}

#[derive(Debug)]
pub struct Alg2Ring {
    c: f64,
    space: Option<MetricSpace>,
    /// Arc positions by `id - 1`.
    positions: Vec<f64>,
    inner: Option<Alg1>,
    branch: Option<RingBranch>,
    phase: Phase,
    dir: Dir,
    plan: Plan,
}

impl Default for Alg2Ring {
    fn default() -> Self {
        Self::new()
    }
}

fn arc(p: &Point) -> f64 {
    match *p {
        Point::Arc(x) => x,
        _ => panic!("ring point expected"),
    }
}

/// Largest empty arc between consecutive points of `{0} ∪ positions`.
pub(crate) fn largest_gap(c: f64, positions: &[f64]) -> f64 {
    let mut xs: Vec<f64> = positions.to_vec();
    xs.push(0.0);
    xs.sort_by(f64::total_cmp);
    let wrap = c - xs[xs.len() - 1] + xs[0];
    xs.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max)
}

/// Whether a ring instance has an empty arc longer than half the ring
/// (counting the origin as a point), so that it behaves like a line.
pub fn is_line_like(inst: &Instance) -> bool {
    let MetricSpace::Ring { circumference } = inst.space else {
        return false;
    };
    let xs: Vec<f64> = inst.requests.iter().map(|r| arc(&r.point)).collect();
    largest_gap(circumference, &xs) > circumference / 2.0 + EPS
}

/// Nearest far end of a window of length `c / 3` inside `(0, c / 2]` that
/// contains no position in `blocked`. Windows start at 0 or just after a
/// blocked position.
fn window_far_end(c: f64, blocked: &[f64]) -> Option<f64> {
    let third = c / 3.0;
    let mut xs: Vec<f64> = blocked.iter().copied().filter(|&x| x > 0.0 && x <= c / 2.0).collect();
    xs.sort_by(f64::total_cmp);
    let mut anchor = 0.0;
    for x in xs.into_iter().chain(std::iter::once(f64::INFINITY)) {
        let limit = x.min(c / 2.0);
        if limit - anchor >= third - EPS {
            return Some(anchor + third);
        }
        anchor = x;
    }
    None
}

impl Alg2Ring {
    pub fn new() -> Self {
        Self {
            c: 1.0,
            space: None,
            positions: vec![],
            inner: None,
            branch: None,
            phase: Phase::Waiting,
            dir: Dir::Cw,
            plan: Plan::default(),
        }
    }

    pub fn branch(&self) -> Option<RingBranch> {
        self.branch
    }

    /// Ends of a gap of at least a third between consecutive requests. The
    /// gap with the end nearest the origin wins, lowest id on ties.
    fn wide_gap(&self) -> Option<(usize, usize)> {
        let mut ids: Vec<usize> = (1..=self.positions.len()).collect();
        ids.sort_by(|&a, &b| self.positions[a - 1].total_cmp(&self.positions[b - 1]).then(a.cmp(&b)));
        let near = |x: f64| x.min(self.c - x);
        let mut best: Option<(f64, usize, usize)> = None;
        for w in ids.windows(2) {
            let (a, b) = (self.positions[w[0] - 1], self.positions[w[1] - 1]);
            if b - a < self.c / 3.0 - EPS {
                continue;
            }
            let x = near(a).min(near(b));
            if best.is_none_or(|(bx, _, _)| x < bx - EPS) {
                best = Some((x, w[0], w[1]));
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    /// Checks for a fully released window; on success plans the loop.
    fn try_window(&mut self, obs: &Observation<'_>) -> bool {
        let c = self.c;
        let blocked: Vec<f64> =
            obs.requests.iter().filter(|s| !s.is_released()).map(|s| self.positions[s.id - 1]).collect();
        let left = window_far_end(c, &blocked);
        let mirrored: Vec<f64> = blocked.iter().map(|&x| if x == 0.0 { 0.0 } else { c - x }).collect();
        let right = window_far_end(c, &mirrored);
        let (far, dir) = match (left, right) {
            (Some(l), Some(r)) if r < l - EPS => (c - r, Dir::Ccw),
            (Some(l), _) => (l, Dir::Cw),
            (None, Some(r)) => (c - r, Dir::Ccw),
            (None, None) => return false,
        };
        self.dir = dir;
        self.plan.push(Leg::Arc { dir, target: far, wait: false });
        self.plan.push(Leg::Arc { dir, target: 0.0, wait: true });
        self.branch = Some(RingBranch::Window { start: obs.now, far, clockwise: dir == Dir::Cw });
        true
    }

    /// After the loop: out to the farthest unserved request in the same
    /// direction and back.
    fn plan_tail(&mut self, obs: &Observation<'_>) {
        let c = self.c;
        let far = obs
            .requests
            .iter()
            .filter(|s| !s.is_served())
            .map(|s| self.positions[s.id - 1])
            .map(|x| (directed(c, 0.0, x, self.dir), x))
            .fold(None, |b: Option<(f64, f64)>, (d, x)| match b {
                Some((bd, _)) if bd >= d => b,
                _ => Some((d, x)),
            });
        if let Some((_, x)) = far {
            self.plan.push(Leg::Arc { dir: self.dir, target: x, wait: false });
            self.plan.push(Leg::Arc { dir: self.dir.flip(), target: 0.0, wait: true });
        }
    }
}

impl Policy for Alg2Ring {
    fn name(&self) -> String {
        "alg2-ring".into()
    }

    fn needs_locations(&self) -> bool {
        true
    }

    fn init(&mut self, ctx: &PolicyContext) -> Result<(), String> {
        let MetricSpace::Ring { circumference } = ctx.space else {
            return Err("alg2-ring needs a ring".into());
        };
        if ctx.variant != Variant::Closed {
            return Err("alg2-ring solves the closed variant only".into());
        }
        let points = ctx.locations.as_ref().ok_or("alg2-ring needs the request locations")?;
        self.c = circumference;
        self.space = Some(ctx.space.clone());
        self.positions = points.iter().map(arc).collect();
        if largest_gap(self.c, &self.positions) > self.c / 2.0 + EPS {
            let mut inner = Alg1::new();
            inner.init(ctx)?;
            self.inner = Some(inner);
            self.branch = Some(RingBranch::LineLike);
            return Ok(());
        }
        if let Some((i, j)) = self.wide_gap() {
            let (a, b) = (self.positions[i - 1], self.positions[j - 1]);
            let near = |x: f64| x.min(self.c - x);
            // Cross the gap first, entering it from the far end.
            let (dir, far, close) = if near(b) >= near(a) { (Dir::Cw, b, a) } else { (Dir::Ccw, a, b) };
            self.plan.push(Leg::Arc { dir, target: far, wait: false });
            self.plan.push(Leg::Arc { dir, target: 0.0, wait: true });
            self.plan.push(Leg::Arc { dir, target: close, wait: false });
            self.plan.push(Leg::Arc { dir: dir.flip(), target: 0.0, wait: true });
            self.branch = Some(RingBranch::Gap { i });
            self.phase = Phase::Tail;
        }
        Ok(())
    }

    fn decide(&mut self, obs: &Observation<'_>) -> Action {
        if let Some(inner) = self.inner.as_mut() {
            return inner.decide(obs);
        }
        if self.phase == Phase::Waiting {
            if !self.try_window(obs) {
                return Action::WaitUntil(f64::INFINITY);
            }
            self.phase = Phase::Loop;
        }
        let space = self.space.clone().expect("initialized");
        if let Some(a) = self.plan.next(&space, obs) {
            return a;
        }
        if self.phase == Phase::Loop {
            self.phase = Phase::Tail;
            self.plan_tail(obs);
            if let Some(a) = self.plan.next(&space, obs) {
                return a;
            }
        }
        Action::WaitUntil(f64::INFINITY)
    }
}
