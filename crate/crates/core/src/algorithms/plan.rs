//! Leg-by-leg execution of a route. Each policy builds a queue of legs and
//! asks it for the next action; finished legs are dropped on the way.

use std::collections::VecDeque;

use crate::engine::{Action, Observation};
use crate::metric::{wrap, MetricSpace, Point, EPS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Dir {
    Cw,
    Ccw,
}

impl Dir {
    pub(crate) fn flip(self) -> Self {
        match self {
            Dir::Cw => Dir::Ccw,
            Dir::Ccw => Dir::Cw,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Leg {
    /// Shortest path to `target`. With `wait`, stops at every unserved
    /// request on the way until it is released.
    Go { target: Point, wait: bool },
    /// Ring travel in a fixed direction up to arc position `target`.
    Arc { dir: Dir, target: f64, wait: bool },
    /// Go to request `id` and wait there for it, unless already served.
    Visit(usize),
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Plan {
    legs: VecDeque<Leg>,
}

impl Plan {
    pub(crate) fn push(&mut self, leg: Leg) {
        self.legs.push_back(leg);
    }

    pub(crate) fn clear(&mut self) {
        self.legs.clear();
    }

    /// Next action, or `None` once every leg is done.
    pub(crate) fn next(&mut self, space: &MetricSpace, obs: &Observation<'_>) -> Option<Action> {
        while let Some(leg) = self.legs.front().copied() {
            if let Some(a) = step(space, obs, leg) {
                return Some(a);
            }
            self.legs.pop_front();
        }
        None
    }
}

/// Closest unreleased, unserved request on the shortest path from the
/// current position to `target`, with its distance.
fn first_blocker(space: &MetricSpace, obs: &Observation<'_>, target: &Point) -> Option<(f64, usize, Point)> {
    let total = space.d(&obs.position, target);
    let mut best: Option<(f64, usize, Point)> = None;
    for s in obs.requests.iter().filter(|s| !s.is_released() && !s.is_served()) {
        let Some(p) = s.point else { continue };
        let e = space.d(&obs.position, &p);
        if e > total + EPS {
            continue;
        }
        let there = space.travel_unchecked(&obs.position, target, e.min(total));
        if !space.coincide(&there, &p) {
            continue;
        }
        if best.is_none_or(|(b, _, _)| e < b - EPS) {
            best = Some((e, s.id, p));
        }
    }
    best
}

fn step(space: &MetricSpace, obs: &Observation<'_>, leg: Leg) -> Option<Action> {
    match leg {
        Leg::Go { target, wait } => {
            if wait {
                if let Some((e, id, p)) = first_blocker(space, obs, &target) {
                    return Some(if e <= EPS { Action::WaitForRelease(id) } else { Action::MoveTo(p) });
                }
            }
            if space.coincide(&obs.position, &target) {
                None
            } else {
                Some(Action::MoveTo(target))
            }
        }
        Leg::Arc { dir, target, wait } => arc_step(space, obs, dir, target, wait),
        Leg::Visit(id) => {
            let s = obs.status(id);
            if s.is_served() {
                return None;
            }
            let p = s.point.expect("visit needs a known location");
            if space.coincide(&obs.position, &p) {
                Some(Action::WaitForRelease(id))
            } else {
                Some(Action::MoveTo(p))
            }
        }
    }
}

/// Directed arc length from `from` to `to`.
pub(crate) fn directed(c: f64, from: f64, to: f64, dir: Dir) -> f64 {
    match dir {
        Dir::Cw => (to - from).rem_euclid(c),
        Dir::Ccw => (from - to).rem_euclid(c),
    }
}

fn arc_pos(p: &Point) -> f64 {
    match *p {
        Point::Arc(x) => x,
        _ => panic!("ring leg outside a ring"),
    }
}

fn arc_step(space: &MetricSpace, obs: &Observation<'_>, dir: Dir, target: f64, wait: bool) -> Option<Action> {
    let MetricSpace::Ring { circumference: c } = *space else {
        panic!("ring leg outside a ring")
    };
    let pos = arc_pos(&obs.position);
    let mut remaining = directed(c, pos, target, dir);
    if remaining >= c - EPS {
        remaining = 0.0;
    }
    let mut stop = (remaining, Point::Arc(target), None);
    if wait {
        for s in obs.requests.iter().filter(|s| !s.is_released() && !s.is_served()) {
            let Some(p) = s.point else { continue };
            let mut o = directed(c, pos, arc_pos(&p), dir);
            if o >= c - EPS {
                o = 0.0;
            }
            if o <= remaining + EPS && (o < stop.0 - EPS || (stop.2.is_none() && o <= stop.0 + EPS)) {
                stop = (o, p, Some(s.id));
            }
        }
    }
    let (dist, point, blocker) = stop;
    if dist <= EPS {
        return blocker.map(Action::WaitForRelease);
    }
    // Short hops keep the engine's shortest path pointing the right way.
    let hop = c / 4.0;
    if dist <= hop {
        return Some(Action::MoveTo(point));
    }
    let x = match dir {
        Dir::Cw => wrap(pos + hop, c),
        Dir::Ccw => wrap(pos - hop, c),
    };
    Some(Action::MoveTo(Point::Arc(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::RequestStatus;

    fn status(id: usize, x: f64, released: bool) -> RequestStatus {
        RequestStatus { id, point: Some(Point::Coord(x)), release: released.then_some(0.0), served: None }
    }

    #[test]
    fn waiting_sweep_stops_at_first_unreleased() {
        let reqs = [status(1, 0.8, false), status(2, 0.3, false), status(3, 0.1, true)];
        let obs = Observation { now: 0.0, position: Point::Coord(0.0), requests: &reqs };
        let mut plan = Plan::default();
        plan.push(Leg::Go { target: Point::Coord(1.0), wait: true });
        assert_eq!(plan.next(&MetricSpace::SemiLine, &obs), Some(Action::MoveTo(Point::Coord(0.3))));
        let obs = Observation { position: Point::Coord(0.3), ..obs };
        assert_eq!(plan.next(&MetricSpace::SemiLine, &obs), Some(Action::WaitForRelease(2)));
    }

    #[test]
    fn ring_arc_hops() {
        let ring = MetricSpace::Ring { circumference: 1.0 };
        let reqs: [RequestStatus; 0] = [];
        let obs = Observation { now: 0.0, position: Point::Arc(0.0), requests: &reqs };
        let mut plan = Plan::default();
        plan.push(Leg::Arc { dir: Dir::Ccw, target: 0.1, wait: false });
        assert_eq!(plan.next(&ring, &obs), Some(Action::MoveTo(Point::Arc(0.75))));
        let obs = Observation { position: Point::Arc(0.2), ..obs };
        assert_eq!(plan.next(&ring, &obs), Some(Action::MoveTo(Point::Arc(0.1))));
        let obs = Observation { position: Point::Arc(0.1), ..obs };
        assert_eq!(plan.next(&ring, &obs), None);
    }
}
