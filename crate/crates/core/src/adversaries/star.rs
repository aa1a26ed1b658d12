//! Star with only the count known: every ray end gets a request at time 1,
//! and each service at a ray end is answered by a fresh request there two
//! time units later, until the budget or the deadline runs out.

use crate::engine::{Adversary, AdversaryView, Emission};
use crate::instance::Variant;
use crate::metric::{MetricSpace, Point};

#[derive(Debug)]
pub struct StarCount {
    eps: f64,
    variant: Variant,
    n: usize,
    k: usize,
    /// Locations of the requests emitted so far, by `id - 1`.
    points: Vec<Point>,
    seen: Vec<bool>,
    tail: bool,
}

impl StarCount {
    pub fn new(eps: f64, variant: Variant) -> Self {
        let n = (7.0 / eps).ceil() as usize;
        Self { eps, variant, n, k: n / 2, points: vec![], seen: vec![false; n], tail: false }
    }

    pub fn rays(&self) -> usize {
        self.k
    }

    /// Deadline for answering services with new requests.
    pub fn deadline(&self) -> f64 {
        2.0 * self.k as f64 - 1.0
    }

    fn emit(&mut self, point: Point, release: f64) -> Emission {
        self.points.push(point);
        Emission { id: self.points.len(), point, release }
    }
}

impl Adversary for StarCount {
    fn name(&self) -> String {
        format!("star-count:{}", self.eps)
    }

    fn space(&self) -> MetricSpace {
        MetricSpace::Star { rays: self.k }
    }

    fn variant(&self) -> Variant {
        self.variant
    }

    fn count(&self) -> usize {
        self.n
    }

    fn announced(&self) -> Option<Vec<Point>> {
        None
    }

    fn on_event(&mut self, view: &AdversaryView<'_>) -> Vec<Emission> {
        let mut out = vec![];
        if self.points.is_empty() {
            for ray in 0..self.k {
                out.push(self.emit(Point::Ray { ray, depth: 1.0 }, 1.0));
            }
            return out;
        }
        let deadline = self.deadline();
        for i in 0..self.points.len() {
            let Some(t) = view.served[i] else { continue };
            if std::mem::replace(&mut self.seen[i], true) {
                continue;
            }
            if t < deadline && self.points.len() < self.n {
                let p = self.points[i];
                out.push(self.emit(p, t + 2.0));
            }
        }
        if !self.tail && view.now >= deadline {
            self.tail = true;
            while self.points.len() < self.n {
                out.push(self.emit(Point::Ray { ray: 0, depth: 0.0 }, view.now));
            }
        }
        out
    }

    fn next_wake(&mut self, view: &AdversaryView<'_>) -> Option<f64> {
        let deadline = self.deadline();
        (!self.tail && view.now < deadline).then_some(deadline)
    }
}
