//! Semi-line constructions on `[0, 1]`.

use crate::engine::{Adversary, AdversaryView, Emission};
use crate::instance::Variant;
use crate::metric::{MetricSpace, Point};

fn coord(p: &Point) -> f64 {
    match *p {
        Point::Coord(x) => x,
        _ => panic!("semi-line point expected"),
    }
}

const POSITIONS: [f64; 4] = [0.0, 1.0 / 6.0, 5.0 / 6.0, 1.0];

/// Four announced requests at 0, 1/6, 5/6 and 1, released in an order that
/// depends on where the server stands at times 1 and 7/6.
#[derive(Debug, Default)]
pub struct SemiLineOpenLoc {
    stage: u8,
}

impl SemiLineOpenLoc {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Adversary for SemiLineOpenLoc {
    fn name(&self) -> String {
        "semiline-open-loc".into()
    }

    fn space(&self) -> MetricSpace {
        MetricSpace::SemiLine
    }

    fn variant(&self) -> Variant {
        Variant::Open
    }

    fn count(&self) -> usize {
        4
    }

    fn announced(&self) -> Option<Vec<Point>> {
        Some(POSITIONS.iter().map(|&x| Point::Coord(x)).collect())
    }

    fn on_event(&mut self, view: &AdversaryView<'_>) -> Vec<Emission> {
        let s = coord(&view.position);
        let at = |id: usize, release: f64| Emission { id, point: Point::Coord(POSITIONS[id - 1]), release };
        match self.stage {
            0 if view.now >= 1.0 => {
                if s < 1.0 / 6.0 {
                    self.stage = 2;
                    vec![at(4, 1.0), at(3, 7.0 / 6.0), at(2, 11.0 / 6.0), at(1, 2.0)]
                } else if s > 5.0 / 6.0 {
                    self.stage = 2;
                    vec![at(1, 1.0), at(2, 7.0 / 6.0), at(3, 11.0 / 6.0), at(4, 2.0)]
                } else {
                    self.stage = 1;
                    vec![at(1, 1.0), at(4, 1.0)]
                }
            }
            1 if view.now >= 7.0 / 6.0 => {
                self.stage = 2;
                // The inner request farther from the server goes first.
                let (first, last) = if s <= 0.5 { (3, 2) } else { (2, 3) };
                vec![at(first, 7.0 / 6.0), at(last, 11.0 / 6.0)]
            }
            _ => vec![],
        }
    }

    fn next_wake(&mut self, view: &AdversaryView<'_>) -> Option<f64> {
        let t = match self.stage {
            0 => 1.0,
            1 => 7.0 / 6.0,
            _ => return None,
        };
        (view.now < t).then_some(t)
    }
}

/// A single request placed at time 1 either at the origin or at 1,
/// whichever is worse for a server at distance `s`.
#[derive(Debug)]
pub struct SemiLineCount {
    variant: Variant,
    threshold: f64,
    fired: bool,
}

impl SemiLineCount {
    /// Closed variant: the request lands at the origin when `s >= 1/3`.
    pub fn closed() -> Self {
        Self { variant: Variant::Closed, threshold: 1.0 / 3.0, fired: false }
    }

    /// Open variant: the request lands at the origin when `s >= 1/2`.
    pub fn open() -> Self {
        Self { variant: Variant::Open, threshold: 0.5, fired: false }
    }
}

impl Adversary for SemiLineCount {
    fn name(&self) -> String {
        match self.variant {
            Variant::Closed => "semiline-closed-count".into(),
            Variant::Open => "semiline-open-count".into(),
        }
    }

    fn space(&self) -> MetricSpace {
        MetricSpace::SemiLine
    }

    fn variant(&self) -> Variant {
        self.variant
    }

    fn count(&self) -> usize {
        1
    }

    fn announced(&self) -> Option<Vec<Point>> {
        None
    }

    fn on_event(&mut self, view: &AdversaryView<'_>) -> Vec<Emission> {
        if self.fired || view.now < 1.0 {
            return vec![];
        }
        self.fired = true;
        let x = if coord(&view.position) >= self.threshold { 0.0 } else { 1.0 };
        vec![Emission { id: 1, point: Point::Coord(x), release: 1.0 }]
    }

    fn next_wake(&mut self, view: &AdversaryView<'_>) -> Option<f64> {
        (!self.fired && view.now < 1.0).then_some(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::play;
    use crate::algorithms::{Alg4SemiLine, Greedy, WaitAll};

    #[test]
    fn open_loc_against_alg4() {
        let r = play(&mut SemiLineOpenLoc::new(), &mut Alg4SemiLine::new()).unwrap();
        assert!((r.opt_completion - 2.0).abs() < 1e-12);
        assert!(r.forced_ratio >= 4.0 / 3.0 - 1e-9, "{}", r.forced_ratio);
        assert!(r.forced_ratio <= 13.0 / 9.0 + 1e-9, "{}", r.forced_ratio);
    }

    #[test]
    fn open_loc_against_greedy() {
        let r = play(&mut SemiLineOpenLoc::new(), &mut Greedy::new()).unwrap();
        assert!((r.opt_completion - 2.0).abs() < 1e-12);
        assert!(r.forced_ratio >= 4.0 / 3.0 - 1e-9, "{}", r.forced_ratio);
    }

    #[test]
    fn count_constructions() {
        let r = play(&mut SemiLineCount::closed(), &mut Greedy::new()).unwrap();
        assert!(r.forced_ratio >= 4.0 / 3.0 - 1e-9);
        let r = play(&mut SemiLineCount::open(), &mut Greedy::new()).unwrap();
        assert!(r.forced_ratio >= 1.5 - 1e-9);
        let r = play(&mut SemiLineCount::open(), &mut WaitAll::new()).unwrap();
        assert_eq!(r.materialized.requests[0].point, Point::Coord(1.0));
        assert!((r.forced_ratio - 2.0).abs() < 1e-12);
    }
}
