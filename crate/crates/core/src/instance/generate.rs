use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{Instance, Variant};
use crate::metric::{DistanceMatrix, MetricSpace, Point, SpaceKind};

/// Kind-specific sizes for the generators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpaceParams {
    /// Positions uniform in `[0, length]`.
    SemiLine { length: f64 },
    /// Positions uniform in `[-half_width, half_width]`.
    Line { half_width: f64 },
    Ring { circumference: f64 },
    /// Uniform ray, depth uniform in `(0, 1]`.
    Star { rays: usize },
    /// Random points in the unit square. With `asymmetric`, each point also
    /// gets a height and climbing costs extra.
    General { asymmetric: bool },
}

impl SpaceParams {
    pub fn default_for(kind: SpaceKind) -> Self {
        match kind {
            SpaceKind::SemiLine => SpaceParams::SemiLine { length: 1.0 },
            SpaceKind::Line => SpaceParams::Line { half_width: 1.0 },
            SpaceKind::Ring => SpaceParams::Ring { circumference: 1.0 },
            SpaceKind::Star => SpaceParams::Star { rays: 3 },
            SpaceKind::General => SpaceParams::General { asymmetric: false },
        }
    }

    pub fn kind(&self) -> SpaceKind {
        match self {
            SpaceParams::SemiLine { .. } => SpaceKind::SemiLine,
            SpaceParams::Line { .. } => SpaceKind::Line,
            SpaceParams::Ring { .. } => SpaceKind::Ring,
            SpaceParams::Star { .. } => SpaceKind::Star,
            SpaceParams::General { .. } => SpaceKind::General,
        }
    }

    /// Largest distance between two points the generator can produce.
    pub fn diameter(&self) -> f64 {
        match *self {
            SpaceParams::SemiLine { length } => length,
            SpaceParams::Line { half_width } => 2.0 * half_width,
            SpaceParams::Ring { circumference } => circumference / 2.0,
            SpaceParams::Star { .. } => 2.0,
            SpaceParams::General { asymmetric } => {
                std::f64::consts::SQRT_2 + if asymmetric { HEIGHT_RANGE } else { 0.0 }
            }
        }
    }
}

const HEIGHT_RANGE: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    pub n: usize,
    pub seed: u64,
    /// Releases are uniform in `[0, horizon]`.
    pub horizon: f64,
    pub variant: Variant,
    pub space: SpaceParams,
}

impl GenParams {
    pub fn new(kind: SpaceKind, n: usize, seed: u64) -> Self {
        Self { n, seed, horizon: 1.0, variant: Variant::Closed, space: SpaceParams::default_for(kind) }
    }

    pub fn horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn space(mut self, space: SpaceParams) -> Self {
        self.space = space;
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("horizon must be a finite time >= 0, got {0}")]
    Horizon(f64),
    #[error("space size must be positive and finite, got {0}")]
    Size(f64),
    #[error("a star needs at least one ray")]
    NoRays,
}

/// Diameter of the region the generator samples from for `params`.
pub fn diameter(params: &SpaceParams) -> f64 {
    params.diameter()
}

/// Deterministic random instance: the same parameters always give the same
/// instance.
pub fn generate_random(params: &GenParams) -> Result<Instance, GenError> {
    if !(params.horizon.is_finite() && params.horizon >= 0.0) {
        return Err(GenError::Horizon(params.horizon));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n;
    let horizon = params.horizon;
    let release = |rng: &mut ChaCha8Rng| if horizon > 0.0 { rng.random_range(0.0..=horizon) } else { 0.0 };

    let (space, mut pairs): (MetricSpace, Vec<(Point, f64)>) = match params.space {
        SpaceParams::SemiLine { length } => {
            check_size(length)?;
            let pairs = (0..n)
                .map(|_| {
                    let x = rng.random_range(0.0..=length);
                    (Point::Coord(x), release(&mut rng))
                })
                .collect();
            (MetricSpace::SemiLine, pairs)
        }
        SpaceParams::Line { half_width } => {
            check_size(half_width)?;
            let pairs = (0..n)
                .map(|_| {
                    let x = rng.random_range(-half_width..=half_width);
                    (Point::Coord(x), release(&mut rng))
                })
                .collect();
            (MetricSpace::Line, pairs)
        }
        SpaceParams::Ring { circumference } => {
            check_size(circumference)?;
            let pairs = (0..n)
                .map(|_| {
                    let x = rng.random_range(0.0..circumference);
                    (Point::Arc(x), release(&mut rng))
                })
                .collect();
            (MetricSpace::Ring { circumference }, pairs)
        }
        SpaceParams::Star { rays } => {
            if rays == 0 {
                return Err(GenError::NoRays);
            }
            let pairs = (0..n)
                .map(|_| {
                    let ray = rng.random_range(0..rays);
                    let depth = 1.0 - rng.random_range(0.0..1.0);
                    (Point::Ray { ray, depth }, release(&mut rng))
                })
                .collect();
            (MetricSpace::Star { rays }, pairs)
        }
        SpaceParams::General { asymmetric } => {
            let sites: Vec<(f64, f64, f64)> = (0..=n)
                .map(|_| {
                    let x = rng.random_range(0.0..=1.0);
                    let y = rng.random_range(0.0..=1.0);
                    let h = if asymmetric { rng.random_range(0.0..=HEIGHT_RANGE) } else { 0.0 };
                    (x, y, h)
                })
                .collect();
            let rows = sites
                .iter()
                .map(|a| {
                    sites
                        .iter()
                        .map(|b| {
                            let flat = (a.0 - b.0).hypot(a.1 - b.1);
                            // Climbing costs the height difference; descending is free.
                            flat + (b.2 - a.2).max(0.0)
                        })
                        .collect()
                })
                .collect();
            let matrix = DistanceMatrix::from_rows(rows, !asymmetric).expect("square by construction");
            let pairs = (1..=n).map(|v| (Point::Node(v), release(&mut rng))).collect();
            (MetricSpace::General(matrix), pairs)
        }
    };
    if matches!(space, MetricSpace::SemiLine | MetricSpace::Ring { .. }) {
        pairs.sort_by(|a, b| coord(&a.0).total_cmp(&coord(&b.0)));
    }
    Ok(Instance::from_pairs(space, params.variant, pairs))
}

fn check_size(x: f64) -> Result<(), GenError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(GenError::Size(x))
    }
}

fn coord(p: &Point) -> f64 {
    match *p {
        Point::Coord(x) | Point::Arc(x) => x,
        _ => 0.0,
    }
}
