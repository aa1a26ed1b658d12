//! Requests, instances, validation, the canonical text format and seeded
//! generators.

mod codec;
mod generate;

use std::fmt;

pub use codec::{decode, encode, encode_point, DecodeError};
pub use generate::{diameter, generate_random, GenError, GenParams, SpaceParams};

use crate::metric::{MetricSpace, Point, SpaceViolation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// The server may stop anywhere after the last service.
    Open,
    /// The server must end at the origin.
    Closed,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Open => "open",
            Variant::Closed => "closed",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "open" => Some(Variant::Open),
            "closed" => Some(Variant::Closed),
            _ => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a policy is told at time 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Knowledge {
    LocationsKnown,
    CountKnown,
}

impl Knowledge {
    pub fn name(self) -> &'static str {
        match self {
            Knowledge::LocationsKnown => "locations",
            Knowledge::CountKnown => "count",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "locations" => Some(Knowledge::LocationsKnown),
            "count" => Some(Knowledge::CountKnown),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Request {
    /// 1-based.
    pub id: usize,
    pub point: Point,
    pub release: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub space: MetricSpace,
    pub variant: Variant,
    pub knowledge: Knowledge,
    pub requests: Vec<Request>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceViolation {
    Space(SpaceViolation),
    /// The request at list position `index` carries the wrong id.
    IdOutOfSequence { index: usize, id: usize },
    BadRelease { id: usize, release: f64 },
    PointOutside { id: usize },
    /// Ring or semi-line requests not sorted by position.
    Unsorted { first: usize, second: usize },
}

impl fmt::Display for InstanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceViolation::Space(v) => write!(f, "space: {v}"),
            InstanceViolation::IdOutOfSequence { index, id } => {
                write!(f, "request #{index} has id {id}, expected {}", index + 1)
            }
            InstanceViolation::BadRelease { id, release } => {
                write!(f, "request {id} has release {release}, expected a finite time >= 0")
            }
            InstanceViolation::PointOutside { id } => write!(f, "request {id} lies outside the space"),
            InstanceViolation::Unsorted { first, second } => {
                write!(f, "requests {first} and {second} are not sorted by position")
            }
        }
    }
}

impl Instance {
    pub fn new(space: MetricSpace, variant: Variant, requests: Vec<Request>) -> Self {
        Self { space, variant, knowledge: Knowledge::LocationsKnown, requests }
    }

    /// Builds an instance from `(point, release)` pairs, numbering them from 1.
    pub fn from_pairs(
        space: MetricSpace,
        variant: Variant,
        pairs: impl IntoIterator<Item = (Point, f64)>,
    ) -> Self {
        let requests = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (point, release))| Request { id: i + 1, point, release })
            .collect();
        Self::new(space, variant, requests)
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn points(&self) -> Vec<Point> {
        self.requests.iter().map(|r| r.point).collect()
    }

    pub fn releases(&self) -> Vec<f64> {
        self.requests.iter().map(|r| r.release).collect()
    }

    pub fn request(&self, id: usize) -> &Request {
        &self.requests[id - 1]
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        Self { variant, ..self.clone() }
    }

    /// Multiplies every length and release by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            space: self.space.scaled(factor),
            variant: self.variant,
            knowledge: self.knowledge,
            requests: self
                .requests
                .iter()
                .map(|r| Request {
                    id: r.id,
                    point: crate::metric::scale_point(&r.point, factor),
                    release: r.release * factor,
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Vec<InstanceViolation> {
        validate_instance(self)
    }
}

pub fn validate_instance(inst: &Instance) -> Vec<InstanceViolation> {
    let mut out: Vec<InstanceViolation> =
        inst.space.validate().into_iter().map(InstanceViolation::Space).collect();
    for (index, r) in inst.requests.iter().enumerate() {
        if r.id != index + 1 {
            out.push(InstanceViolation::IdOutOfSequence { index, id: r.id });
        }
        if !(r.release.is_finite() && r.release >= 0.0) {
            out.push(InstanceViolation::BadRelease { id: r.id, release: r.release });
        }
        if !inst.space.contains(&r.point) || matches!(r.point, Point::Edge { .. }) {
            out.push(InstanceViolation::PointOutside { id: r.id });
        }
    }
    // Adaptive adversaries hand out ids in emission order, so the ordering
    // rule only binds instances whose locations are public.
    if inst.knowledge == Knowledge::LocationsKnown {
        for pair in inst.requests.windows(2) {
            let key = |p: &Point| match *p {
                Point::Coord(x) | Point::Arc(x) => Some(x),
                _ => None,
            };
            let sorted_kind = matches!(inst.space, MetricSpace::Ring { .. } | MetricSpace::SemiLine);
            if let (true, Some(a), Some(b)) = (sorted_kind, key(&pair[0].point), key(&pair[1].point)) {
                if b < a {
                    out.push(InstanceViolation::Unsorted { first: pair[0].id, second: pair[1].id });
                }
            }
        }
    }
    out
}
