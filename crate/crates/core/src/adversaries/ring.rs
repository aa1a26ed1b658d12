//! Ring constructions: two announced requests for the open variant, and a
//! count-only construction for the closed variant that drops the last
//! requests onto ground the server has already covered.

use crate::engine::{Adversary, AdversaryView, Emission, Segment};
use crate::instance::Variant;
use crate::metric::{wrap, MetricSpace, Point, EPS};

const RING: MetricSpace = MetricSpace::Ring { circumference: 1.0 };

fn arc(p: &Point) -> f64 {
    match *p {
        Point::Arc(x) => x,
        _ => panic!("ring point expected"),
    }
}

/// Two requests a third of the ring apart from the origin and from each
/// other; the one on the far side of the server comes first.
#[derive(Debug, Default)]
pub struct RingOpen {
    fired: bool,
}

impl RingOpen {
    /// Request 1 sits at 1/3, request 2 at 2/3.
    pub fn new() -> Self {
        Self::default()
    }
}

const THIRD: f64 = 1.0 / 3.0;

impl Adversary for RingOpen {
    fn name(&self) -> String {
        "ring-open".into()
    }

    fn space(&self) -> MetricSpace {
        RING
    }

    fn variant(&self) -> Variant {
        Variant::Open
    }

    fn count(&self) -> usize {
        2
    }

    fn announced(&self) -> Option<Vec<Point>> {
        Some(vec![Point::Arc(THIRD), Point::Arc(2.0 * THIRD)])
    }

    fn on_event(&mut self, view: &AdversaryView<'_>) -> Vec<Emission> {
        if self.fired || view.now < THIRD {
            return vec![];
        }
        self.fired = true;
        let (b, a) = (Point::Arc(THIRD), Point::Arc(2.0 * THIRD));
        let near_a = RING.d(&view.position, &a) <= RING.d(&view.position, &b);
        let (first, second) = if near_a { (1, 2) } else { (2, 1) };
        let at = |id: usize| if id == 1 { b } else { a };
        vec![
            Emission { id: first, point: at(first), release: THIRD },
            Emission { id: second, point: at(second), release: 2.0 * THIRD },
        ]
    }

    fn next_wake(&mut self, view: &AdversaryView<'_>) -> Option<f64> {
        (!self.fired && view.now < THIRD).then_some(THIRD)
    }
}

/// Closed ring with only the count known: requests evenly spread at time 0,
/// the rest released behind the server once its distance from the origin
/// meets the time left until 1.
#[derive(Debug)]
pub struct RingClosedCount {
    eps: f64,
    n: usize,
    started: bool,
    fired: Option<f64>,
    late_spacing: f64,
}

impl RingClosedCount {
    pub fn new(eps: f64) -> Self {
        let n = 6 * (1.0 / eps).ceil() as usize + 1;
        Self { eps, n, started: false, fired: None, late_spacing: 0.0 }
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    /// Requests placed at time 0.
    pub fn initial(&self) -> usize {
        4 * (self.n - 1) / 6
    }

    /// Time at which the remaining requests were released.
    pub fn fired_at(&self) -> Option<f64> {
        self.fired
    }

    /// Largest gap between neighbouring requests of either batch.
    pub fn spacing(&self) -> f64 {
        (1.0 / self.initial() as f64).max(self.late_spacing)
    }

    /// `dist(O, pos) + t - 1`, nondecreasing along any trajectory.
    fn slack(t: f64, p: &Point) -> f64 {
        RING.norm(p) + t - 1.0
    }

    /// First time at or after `from` where the slack reaches zero, assuming
    /// the server completes `seg` and then stands still.
    fn crossing(seg: &Segment, from: f64) -> f64 {
        let Some(target) = seg.target else {
            return from.max(1.0 - RING.norm(&seg.start));
        };
        let d = RING.d(&seg.start, &target);
        let e0 = (from - seg.start_time).max(0.0);
        if e0 < d {
            let ahead = RING.travel_unchecked(&seg.start, &target, (EPS).min(d));
            let cw = wrap(arc(&ahead) - arc(&seg.start), 1.0) < 0.5;
            let a = arc(&seg.start);
            let mut cuts = vec![e0, d];
            for y in [0.0, 0.5] {
                let e = if cw { wrap(y - a, 1.0) } else { wrap(a - y, 1.0) };
                if e > e0 && e < d {
                    cuts.push(e);
                }
            }
            cuts.sort_by(f64::total_cmp);
            let h = |e: f64| Self::slack(seg.start_time + e, &RING.travel_unchecked(&seg.start, &target, e));
            let mut prev = (e0, h(e0));
            if prev.1 >= 0.0 {
                return seg.start_time + e0;
            }
            for &e in &cuts[1..] {
                let he = h(e);
                if he >= 0.0 {
                    let x = prev.0 + (-prev.1) * (e - prev.0) / (he - prev.1);
                    return seg.start_time + x;
                }
                prev = (e, he);
            }
        }
        let arrive = seg.start_time + d;
        from.max(arrive).max(1.0 - RING.norm(&target))
    }
}

impl Adversary for RingClosedCount {
    fn name(&self) -> String {
        format!("ring-closed-count:{}", self.eps)
    }

    fn space(&self) -> MetricSpace {
        RING
    }

    fn variant(&self) -> Variant {
        Variant::Closed
    }

    fn count(&self) -> usize {
        self.n
    }

    fn announced(&self) -> Option<Vec<Point>> {
        None
    }

    fn on_event(&mut self, view: &AdversaryView<'_>) -> Vec<Emission> {
        let m = self.initial();
        if !self.started {
            self.started = true;
            return (1..=m).map(|i| Emission { id: i, point: Point::Arc((i - 1) as f64 / m as f64), release: 0.0 }).collect();
        }
        if self.fired.is_some() || view.now < 0.5 || Self::slack(view.now, &view.position) < -EPS {
            return vec![];
        }
        let now = view.now;
        self.fired = Some(now);
        let alpha = (now - 0.5).clamp(0.0, 0.5);
        let span = 0.5 - alpha;
        let k = (self.n - 1) / 3;
        self.late_spacing = span / k as f64;
        // Mirror onto the counter-clockwise half when the server is there.
        let mirror = arc(&view.position) > 0.5 + EPS;
        (0..=k)
            .map(|j| {
                let x = span * j as f64 / k as f64;
                let x = if mirror { wrap(1.0 - x, 1.0) } else { x };
                Emission { id: m + 1 + j, point: Point::Arc(x), release: now }
            })
            .collect()
    }

    fn next_wake(&mut self, view: &AdversaryView<'_>) -> Option<f64> {
        if self.fired.is_some() {
            return None;
        }
        let seg = view.segment?;
        Some(Self::crossing(&seg, view.now.max(0.5)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::play;
    use crate::algorithms::{Alg1, Greedy, WaitAll};

    #[test]
    fn ring_open_against_alg1() {
        let r = play(&mut RingOpen::new(), &mut Alg1::new()).unwrap();
        assert!((r.opt_completion - 2.0 / 3.0).abs() < 1e-12);
        assert!(r.forced_ratio >= 1.5 - 1e-6, "{}", r.forced_ratio);
    }

    #[test]
    fn ring_open_against_greedy() {
        let r = play(&mut RingOpen::new(), &mut Greedy::new()).unwrap();
        assert!(r.forced_ratio >= 1.5 - 1e-6, "{}", r.forced_ratio);
    }

    #[test]
    fn closed_count_sizes() {
        let a = RingClosedCount::new(0.5);
        assert_eq!(a.count(), 13);
        assert_eq!(a.initial(), 8);
    }

    #[test]
    fn closed_count_against_wait_all() {
        let mut adv = RingClosedCount::new(0.5);
        let r = play(&mut adv, &mut WaitAll::new()).unwrap();
        assert_eq!(adv.fired_at(), Some(1.0));
        assert!((r.opt_completion - 1.0).abs() < 1e-9);
        assert!((r.forced_completion - 2.0).abs() < 1e-9);
        assert!(adv.spacing() <= 0.5 / 4.0 + 1e-12);
    }

    #[test]
    fn closed_count_against_greedy() {
        let mut adv = RingClosedCount::new(0.5);
        let r = play(&mut adv, &mut Greedy::new()).unwrap();
        assert!((r.opt_completion - 1.0).abs() < 1e-9);
        assert!(r.forced_ratio >= 1.5, "{}", r.forced_ratio);
    }

    #[test]
    fn crossing_while_moving_out() {
        let seg = Segment { start_time: 0.25, start: Point::Arc(0.0), target: Some(Point::Arc(0.5)) };
        // dist = t - 0.25, slack = 2t - 1.25 -> t = 0.625.
        assert!((RingClosedCount::crossing(&seg, 0.5) - 0.625).abs() < 1e-12);
        let still = Segment { start_time: 0.0, start: Point::Arc(0.9), target: None };
        assert!((RingClosedCount::crossing(&still, 0.5) - 0.9).abs() < 1e-12);
    }
}
