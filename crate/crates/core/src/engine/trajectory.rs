use std::fmt::{self, Write};

use thiserror::Error;

use crate::instance::{encode_point, Instance, Variant};
use crate::metric::{MetricSpace, Point, EPS};
use crate::numfmt::g17;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tag {
    /// Reached this waypoint by moving at unit speed from the previous one.
    Move,
    /// Stood still since the previous waypoint.
    Wait,
    /// Zero-duration marker: request `id` was served here.
    Serve(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Waypoint {
    pub time: f64,
    pub point: Point,
    pub tag: Tag,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub waypoints: Vec<Waypoint>,
}

impl Trajectory {
    pub fn end_time(&self) -> f64 {
        self.waypoints.last().map_or(0.0, |w| w.time)
    }

    pub fn end_point(&self) -> Option<Point> {
        self.waypoints.last().map(|w| w.point)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub completion: f64,
    /// Service time per request, indexed by `id - 1`.
    pub service_times: Vec<f64>,
    pub trajectory: Trajectory,
}

impl Outcome {
    pub fn service_time(&self, id: usize) -> f64 {
        self.service_times[id - 1]
    }

    /// Export text: completion, services by id, and waypoint triples.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{{\n  \"completion\": {},\n  \"services\": {{", g17(self.completion));
        for (i, t) in self.service_times.iter().enumerate() {
            let _ = write!(s, "{}\"{}\": {}", if i == 0 { "" } else { ", " }, i + 1, g17(*t));
        }
        s.push_str("},\n  \"trajectory\": [");
        for (i, w) in self.trajectory.waypoints.iter().enumerate() {
            let tag = match w.tag {
                Tag::Move => "move".to_string(),
                Tag::Wait => "wait".to_string(),
                Tag::Serve(id) => format!("serve:{id}"),
            };
            let _ = write!(
                s,
                "{}\n    [{}, {}, \"{}\"]",
                if i == 0 { "" } else { "," },
                g17(w.time),
                encode_point(&w.point),
                tag
            );
        }
        if !self.trajectory.waypoints.is_empty() {
            s.push_str("\n  ");
        }
        s.push_str("]\n}\n");
        s
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PositionError {
    #[error("time {t} outside the trajectory span [0, {end}]")]
    OutOfRange { t: f64, end: f64 },
}

/// Server position at time `t`.
pub fn position_at(space: &MetricSpace, traj: &Trajectory, t: f64) -> Result<Point, PositionError> {
    let w = &traj.waypoints;
    let end = traj.end_time();
    if w.is_empty() || !(t >= 0.0 && t <= end) {
        return Err(PositionError::OutOfRange { t, end });
    }
    // First waypoint with time >= t.
    let k = w.partition_point(|p| p.time < t);
    if k == 0 {
        return Ok(w[0].point);
    }
    let (a, b) = (&w[k - 1], &w[k]);
    match b.tag {
        Tag::Move => {
            let span = space.d(&a.point, &b.point);
            let e = (t - a.time).clamp(0.0, span);
            Ok(space.travel_unchecked(&a.point, &b.point, e))
        }
        Tag::Wait | Tag::Serve(_) => Ok(a.point),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OutcomeViolation {
    NotAtOriginAtStart,
    TimeWentBackwards { index: usize },
    /// A move whose length does not match its duration.
    SpeedMismatch { index: usize, distance: f64, duration: f64 },
    /// A wait or serve step whose position changed.
    Teleport { index: usize },
    UnknownRequest { id: usize },
    ServedTwice { id: usize },
    WrongPlace { id: usize },
    PrematureService { id: usize, time: f64, release: f64 },
    NotServed { id: usize },
    ServiceTimeMismatch { id: usize },
    NotBackAtOrigin,
    CompletionMismatch { expected: f64, reported: f64 },
}

impl fmt::Display for OutcomeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use OutcomeViolation::*;
        match self {
            NotAtOriginAtStart => write!(f, "trajectory does not start at the origin at time 0"),
            TimeWentBackwards { index } => write!(f, "time decreases at waypoint {index}"),
            SpeedMismatch { index, distance, duration } => write!(
                f,
                "unit speed broken at waypoint {index}: distance {distance} in time {duration}"
            ),
            Teleport { index } => write!(f, "position jumps at waypoint {index}"),
            UnknownRequest { id } => write!(f, "serve of unknown request {id}"),
            ServedTwice { id } => write!(f, "request {id} served twice"),
            WrongPlace { id } => write!(f, "request {id} served away from its location"),
            PrematureService { id, time, release } => {
                write!(f, "premature service: request {id} at {time} before release {release}")
            }
            NotServed { id } => write!(f, "request {id} never served"),
            ServiceTimeMismatch { id } => write!(f, "reported service time of request {id} disagrees with the trajectory"),
            NotBackAtOrigin => write!(f, "closed run does not end at the origin"),
            CompletionMismatch { expected, reported } => {
                write!(f, "completion should be {expected}, reported {reported}")
            }
        }
    }
}

fn tol(t: f64) -> f64 {
    EPS * (1.0 + t.abs())
}

/// Independent feasibility check of an outcome against an instance.
pub fn verify_outcome(inst: &Instance, out: &Outcome) -> Vec<OutcomeViolation> {
    use OutcomeViolation::*;
    let space = &inst.space;
    let w = &out.trajectory.waypoints;
    let mut v = Vec::new();
    match w.first() {
        Some(first) if first.time == 0.0 && space.coincide(&first.point, &space.origin()) => {}
        _ => v.push(NotAtOriginAtStart),
    }
    let mut served: Vec<Option<f64>> = vec![None; inst.len()];
    for (index, pair) in w.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        let index = index + 1;
        let dt = b.time - a.time;
        if dt < -tol(b.time) {
            v.push(TimeWentBackwards { index });
        }
        let dist = space.d(&a.point, &b.point);
        match b.tag {
            Tag::Move => {
                if (dist - dt).abs() > tol(b.time) {
                    v.push(SpeedMismatch { index, distance: dist, duration: dt });
                }
            }
            Tag::Wait | Tag::Serve(_) => {
                if dist > tol(b.time) {
                    v.push(Teleport { index });
                }
            }
        }
        if let Tag::Serve(id) = b.tag {
            if id == 0 || id > inst.len() {
                v.push(UnknownRequest { id });
                continue;
            }
            let r = inst.request(id);
            if served[id - 1].is_some() {
                v.push(ServedTwice { id });
            }
            served[id - 1] = Some(b.time);
            if !space.coincide(&b.point, &r.point) {
                v.push(WrongPlace { id });
            }
            if b.time < r.release - tol(r.release) {
                v.push(PrematureService { id, time: b.time, release: r.release });
            }
        }
    }
    let mut last_service: f64 = 0.0;
    for (i, s) in served.iter().enumerate() {
        let id = i + 1;
        match s {
            None => v.push(NotServed { id }),
            Some(t) => {
                last_service = last_service.max(*t);
                if out.service_times.get(i).is_none_or(|reported| (reported - t).abs() > tol(*t)) {
                    v.push(ServiceTimeMismatch { id });
                }
            }
        }
    }
    let expected = match inst.variant {
        Variant::Open => last_service,
        Variant::Closed => {
            let end = out.trajectory.end_point().unwrap_or(space.origin());
            if !space.coincide(&end, &space.origin()) {
                v.push(NotBackAtOrigin);
            }
            out.trajectory.end_time()
        }
    };
    if (expected - out.completion).abs() > tol(expected) {
        v.push(CompletionMismatch { expected, reported: out.completion });
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;

    fn wp(time: f64, x: f64, tag: Tag) -> Waypoint {
        Waypoint { time, point: Point::Coord(x), tag }
    }

    #[test]
    fn interpolates_moves() {
        let traj = Trajectory { waypoints: vec![wp(0.0, 0.0, Tag::Wait), wp(1.0, 1.0, Tag::Move)] };
        assert_eq!(position_at(&MetricSpace::SemiLine, &traj, 0.5).unwrap(), Point::Coord(0.5));
    }

    #[test]
    fn constant_on_waits() {
        let traj = Trajectory {
            waypoints: vec![wp(0.0, 0.0, Tag::Wait), wp(1.0, 1.0, Tag::Move), wp(3.0, 1.0, Tag::Wait)],
        };
        assert_eq!(position_at(&MetricSpace::SemiLine, &traj, 2.0).unwrap(), Point::Coord(1.0));
        assert!(position_at(&MetricSpace::SemiLine, &traj, 3.5).is_err());
    }

    #[test]
    fn ring_counter_clockwise() {
        let ring = MetricSpace::Ring { circumference: 1.0 };
        let traj = Trajectory {
            waypoints: vec![
                Waypoint { time: 0.0, point: Point::Arc(0.0), tag: Tag::Wait },
                Waypoint { time: 0.1, point: Point::Arc(0.9), tag: Tag::Move },
            ],
        };
        let Point::Arc(x) = position_at(&ring, &traj, 0.05).unwrap() else { panic!() };
        assert!((x - 0.95).abs() < 1e-12);
    }

    fn one_request(variant: Variant) -> Instance {
        Instance::from_pairs(MetricSpace::SemiLine, variant, [(Point::Coord(1.0), 2.0)])
    }

    #[test]
    fn premature_service_is_caught() {
        let out = Outcome {
            completion: 1.0,
            service_times: vec![1.0],
            trajectory: Trajectory {
                waypoints: vec![wp(0.0, 0.0, Tag::Wait), wp(1.0, 1.0, Tag::Move), wp(1.0, 1.0, Tag::Serve(1))],
            },
        };
        let v = verify_outcome(&one_request(Variant::Open), &out);
        assert_eq!(v, vec![OutcomeViolation::PrematureService { id: 1, time: 1.0, release: 2.0 }]);
        assert!(v[0].to_string().starts_with("premature service"));
    }

    #[test]
    fn closed_must_return() {
        let out = Outcome {
            completion: 2.0,
            service_times: vec![2.0],
            trajectory: Trajectory {
                waypoints: vec![
                    wp(0.0, 0.0, Tag::Wait),
                    wp(1.0, 1.0, Tag::Move),
                    wp(2.0, 1.0, Tag::Wait),
                    wp(2.0, 1.0, Tag::Serve(1)),
                ],
            },
        };
        assert!(verify_outcome(&one_request(Variant::Open), &out).is_empty());
        assert!(verify_outcome(&one_request(Variant::Closed), &out).contains(&OutcomeViolation::NotBackAtOrigin));
    }

    #[test]
    fn speed_is_checked() {
        let out = Outcome {
            completion: 2.0,
            service_times: vec![2.0],
            trajectory: Trajectory {
                waypoints: vec![wp(0.0, 0.0, Tag::Wait), wp(0.5, 1.0, Tag::Move), wp(2.0, 1.0, Tag::Wait), wp(2.0, 1.0, Tag::Serve(1))],
            },
        };
        let v = verify_outcome(&one_request(Variant::Open), &out);
        assert!(matches!(v[0], OutcomeViolation::SpeedMismatch { index: 1, .. }), "{v:?}");
    }
}
