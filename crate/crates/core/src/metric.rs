//! Metric spaces the server moves in, and the geometry every other module
//! relies on: distances, unit-speed interpolation along shortest paths, and
//! structural validation.

use std::fmt;

use thiserror::Error;

/// Global comparison tolerance for lengths and times.
pub const EPS: f64 = 1e-9;

/// Square matrix of travel lengths. Index 0 is the origin; the remaining
/// indices are the locations requests may sit on.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    data: Vec<f64>,
    symmetric: bool,
}

impl DistanceMatrix {
    /// Builds a matrix from rows. Fails if the rows are not square.
    pub fn from_rows(rows: Vec<Vec<f64>>, symmetric: bool) -> Result<Self, MetricError> {
        let size = rows.len();
        if size == 0 {
            return Err(MetricError::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(size * size);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(MetricError::NotSquare { row: i, len: row.len(), size });
            }
            data.extend(row);
        }
        Ok(Self { size, data, symmetric })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.data[from * self.size + to]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.size)
    }

    /// Multiplies every entry by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            size: self.size,
            data: self.data.iter().map(|d| d * factor).collect(),
            symmetric: self.symmetric,
        }
    }
}

/// The five kinds of space a scenario can live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    SemiLine,
    Line,
    Ring,
    Star,
    General,
}

impl SpaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::SemiLine => "semiline",
            SpaceKind::Line => "line",
            SpaceKind::Ring => "ring",
            SpaceKind::Star => "star",
            SpaceKind::General => "general",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "semiline" => Some(SpaceKind::SemiLine),
            "line" => Some(SpaceKind::Line),
            "ring" => Some(SpaceKind::Ring),
            "star" => Some(SpaceKind::Star),
            "general" => Some(SpaceKind::General),
            _ => None,
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MetricSpace {
    /// Non-negative half line starting at the origin.
    SemiLine,
    /// Real line, origin at 0.
    Line,
    /// Circle; points are clockwise arc positions in `[0, circumference)`.
    Ring { circumference: f64 },
    /// `rays` half lines glued at the origin.
    Star { rays: usize },
    /// Complete directed distance matrix; travel happens along direct edges.
    General(DistanceMatrix),
}

/// A position in a [`MetricSpace`]. Which variants are legal depends on the
/// space: `Coord` for lines, `Arc` for rings, `Ray` for stars, `Node`/`Edge`
/// for general matrices (`Edge` only appears mid-travel).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Coord(f64),
    Arc(f64),
    Ray { ray: usize, depth: f64 },
    Node(usize),
    Edge { from: usize, to: usize, traveled: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("point {point:?} is outside the {kind} space")]
    OutsideSpace { point: Point, kind: SpaceKind },
    #[error("elapsed {elapsed} outside [0, {distance}]")]
    BadElapsed { elapsed: f64, distance: f64 },
    #[error("distance matrix must not be empty")]
    EmptyMatrix,
    #[error("matrix row {row} has {len} entries, expected {size}")]
    NotSquare { row: usize, len: usize, size: usize },
}

/// One broken structural rule, naming the indices involved.
#[derive(Clone, Debug, PartialEq)]
pub enum SpaceViolation {
    NonPositiveCircumference(f64),
    NoRays,
    NonZeroDiagonal { index: usize, value: f64 },
    NegativeLength { from: usize, to: usize, value: f64 },
    NotFinite { from: usize, to: usize },
    Asymmetric { a: usize, b: usize },
    Triangle { a: usize, via: usize, c: usize },
}

impl fmt::Display for SpaceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceViolation::NonPositiveCircumference(c) => {
                write!(f, "ring circumference must be positive, got {c}")
            }
            SpaceViolation::NoRays => write!(f, "star needs at least one ray"),
            SpaceViolation::NonZeroDiagonal { index, value } => {
                write!(f, "d({index},{index}) = {value}, expected 0")
            }
            SpaceViolation::NegativeLength { from, to, value } => {
                write!(f, "d({from},{to}) = {value} is negative")
            }
            SpaceViolation::NotFinite { from, to } => write!(f, "d({from},{to}) is not finite"),
            SpaceViolation::Asymmetric { a, b } => {
                write!(f, "d({a},{b}) != d({b},{a}) in a matrix flagged symmetric")
            }
            SpaceViolation::Triangle { a, via, c } => {
                write!(f, "triangle inequality violated: d({a},{c}) > d({a},{via}) + d({via},{c})")
            }
        }
    }
}

/// Reaching an edge endpoint from a point on (or at) it.
#[derive(Clone, Copy, Debug)]
struct Anchor {
    node: usize,
    /// Cost from the point to `node`.
    out: f64,
    /// Cost from `node` back to the point.
    back: f64,
}

impl MetricSpace {
    pub fn kind(&self) -> SpaceKind {
        match self {
            MetricSpace::SemiLine => SpaceKind::SemiLine,
            MetricSpace::Line => SpaceKind::Line,
            MetricSpace::Ring { .. } => SpaceKind::Ring,
            MetricSpace::Star { .. } => SpaceKind::Star,
            MetricSpace::General(_) => SpaceKind::General,
        }
    }

    pub fn origin(&self) -> Point {
        match self {
            MetricSpace::SemiLine | MetricSpace::Line => Point::Coord(0.0),
            MetricSpace::Ring { .. } => Point::Arc(0.0),
            MetricSpace::Star { .. } => Point::Ray { ray: 0, depth: 0.0 },
            MetricSpace::General(_) => Point::Node(0),
        }
    }

    /// Whether `p` is a legal point of this space.
    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (MetricSpace::SemiLine, Point::Coord(x)) => x.is_finite() && *x >= 0.0,
            (MetricSpace::Line, Point::Coord(x)) => x.is_finite(),
            (MetricSpace::Ring { circumference }, Point::Arc(x)) => {
                x.is_finite() && *x >= 0.0 && *x < *circumference
            }
            (MetricSpace::Star { rays }, Point::Ray { ray, depth }) => {
                depth.is_finite() && *depth >= 0.0 && (*ray < *rays || *depth == 0.0)
            }
            (MetricSpace::General(m), Point::Node(v)) => *v < m.size(),
            (MetricSpace::General(m), Point::Edge { from, to, traveled }) => {
                *from < m.size()
                    && *to < m.size()
                    && traveled.is_finite()
                    && *traveled >= 0.0
                    && *traveled <= m.get(*from, *to) + EPS
            }
            _ => false,
        }
    }

    fn check(&self, p: &Point) -> Result<(), MetricError> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(MetricError::OutsideSpace { point: *p, kind: self.kind() })
        }
    }

    /// Checked distance from `a` to `b`.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64, MetricError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.d(a, b))
    }

    /// Distance without validating the points. Callers must pass points that
    /// belong to this space.
    pub fn d(&self, a: &Point, b: &Point) -> f64 {
        match (self, a, b) {
            (MetricSpace::SemiLine | MetricSpace::Line, Point::Coord(x), Point::Coord(y)) => {
                (x - y).abs()
            }
            (MetricSpace::Ring { circumference }, Point::Arc(x), Point::Arc(y)) => {
                let cw = (y - x).rem_euclid(*circumference);
                cw.min(circumference - cw)
            }
            (
                MetricSpace::Star { .. },
                Point::Ray { ray: r1, depth: x },
                Point::Ray { ray: r2, depth: y },
            ) => {
                if r1 == r2 || *x == 0.0 || *y == 0.0 {
                    (x - y).abs()
                } else {
                    x + y
                }
            }
            (MetricSpace::General(m), _, _) => general_distance(m, a, b),
            _ => f64::NAN,
        }
    }

    /// Distance from the origin to `p`.
    pub fn norm(&self, p: &Point) -> f64 {
        self.d(&self.origin(), p)
    }

    /// Whether two points coincide within [`EPS`].
    pub fn coincide(&self, a: &Point, b: &Point) -> bool {
        self.d(a, b) <= EPS
    }

    /// Position after moving `elapsed` along a shortest path from `a` to `b`.
    ///
    /// On a ring with antipodal endpoints the clockwise arc is taken. On a
    /// general matrix motion follows the direct edge.
    pub fn travel(&self, a: &Point, b: &Point, elapsed: f64) -> Result<Point, MetricError> {
        self.check(a)?;
        self.check(b)?;
        let distance = self.d(a, b);
        if !(elapsed >= -EPS && elapsed <= distance + EPS) {
            return Err(MetricError::BadElapsed { elapsed, distance });
        }
        Ok(self.travel_unchecked(a, b, elapsed.clamp(0.0, distance)))
    }

    /// [`Self::travel`] without validation; `elapsed` must lie in
    /// `[0, d(a, b)]`.
    pub fn travel_unchecked(&self, a: &Point, b: &Point, elapsed: f64) -> Point {
        if elapsed <= 0.0 {
            return *a;
        }
        match (self, a, b) {
            (MetricSpace::SemiLine | MetricSpace::Line, Point::Coord(x), Point::Coord(y)) => {
                if elapsed >= (y - x).abs() {
                    *b
                } else if y >= x {
                    Point::Coord(x + elapsed)
                } else {
                    Point::Coord(x - elapsed)
                }
            }
            (MetricSpace::Ring { circumference: c }, Point::Arc(x), Point::Arc(y)) => {
                let cw = (y - x).rem_euclid(*c);
                let ccw = c - cw;
                if elapsed >= cw.min(ccw) {
                    *b
                } else if cw <= ccw {
                    Point::Arc(wrap(x + elapsed, *c))
                } else {
                    Point::Arc(wrap(x - elapsed, *c))
                }
            }
            (
                MetricSpace::Star { .. },
                Point::Ray { ray: r1, depth: x },
                Point::Ray { ray: r2, depth: y },
            ) => {
                if r1 == r2 || *x == 0.0 || *y == 0.0 {
                    let ray = if *x == 0.0 { *r2 } else { *r1 };
                    if elapsed >= (x - y).abs() {
                        *b
                    } else if y >= x {
                        Point::Ray { ray, depth: x + elapsed }
                    } else {
                        Point::Ray { ray, depth: x - elapsed }
                    }
                } else if elapsed <= *x {
                    Point::Ray { ray: *r1, depth: x - elapsed }
                } else if elapsed >= x + y {
                    *b
                } else {
                    Point::Ray { ray: *r2, depth: elapsed - x }
                }
            }
            (MetricSpace::General(m), _, _) => general_travel(m, a, b, elapsed),
            _ => *a,
        }
    }

    /// Structural checks; an empty list means the space is well formed.
    pub fn validate(&self) -> Vec<SpaceViolation> {
        let mut out = Vec::new();
        match self {
            MetricSpace::SemiLine | MetricSpace::Line => {}
            MetricSpace::Ring { circumference } => {
                if !(circumference.is_finite() && *circumference > 0.0) {
                    out.push(SpaceViolation::NonPositiveCircumference(*circumference));
                }
            }
            MetricSpace::Star { rays } => {
                if *rays == 0 {
                    out.push(SpaceViolation::NoRays);
                }
            }
            MetricSpace::General(m) => validate_matrix(m, &mut out),
        }
        out
    }

    /// Same space with every length multiplied by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            MetricSpace::Ring { circumference } => {
                MetricSpace::Ring { circumference: circumference * factor }
            }
            MetricSpace::General(m) => MetricSpace::General(m.scaled(factor)),
            other => other.clone(),
        }
    }
}

/// Scales a point's coordinates by `factor`, for spaces scaled by the same.
pub fn scale_point(p: &Point, factor: f64) -> Point {
    match *p {
        Point::Coord(x) => Point::Coord(x * factor),
        Point::Arc(x) => Point::Arc(x * factor),
        Point::Ray { ray, depth } => Point::Ray { ray, depth: depth * factor },
        Point::Node(v) => Point::Node(v),
        Point::Edge { from, to, traveled } => Point::Edge { from, to, traveled: traveled * factor },
    }
}

/// Free-function form of [`MetricSpace::validate`].
pub fn validate_space(space: &MetricSpace) -> Vec<SpaceViolation> {
    space.validate()
}

pub(crate) fn wrap(x: f64, c: f64) -> f64 {
    let w = x.rem_euclid(c);
    if w >= c {
        0.0
    } else {
        w
    }
}

fn validate_matrix(m: &DistanceMatrix, out: &mut Vec<SpaceViolation>) {
    let n = m.size();
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            if !v.is_finite() {
                out.push(SpaceViolation::NotFinite { from: i, to: j });
            } else if v < 0.0 {
                out.push(SpaceViolation::NegativeLength { from: i, to: j, value: v });
            }
        }
        if m.get(i, i) != 0.0 {
            out.push(SpaceViolation::NonZeroDiagonal { index: i, value: m.get(i, i) });
        }
    }
    if m.is_symmetric() {
        for i in 0..n {
            for j in i + 1..n {
                if m.get(i, j) != m.get(j, i) {
                    out.push(SpaceViolation::Asymmetric { a: i, b: j });
                }
            }
        }
    }
    for a in 0..n {
        for c in 0..n {
            for b in 0..n {
                if a == c || b == a || b == c {
                    continue;
                }
                if m.get(a, c) > m.get(a, b) + m.get(b, c) + EPS {
                    out.push(SpaceViolation::Triangle { a, via: b, c });
                }
            }
        }
    }
}

fn anchors(m: &DistanceMatrix, p: &Point) -> [Option<Anchor>; 2] {
    match *p {
        Point::Node(v) => [Some(Anchor { node: v, out: 0.0, back: 0.0 }), None],
        Point::Edge { from, to, traveled } => {
            let rest = (m.get(from, to) - traveled).max(0.0);
            [
                Some(Anchor { node: from, out: traveled, back: traveled }),
                Some(Anchor { node: to, out: rest, back: rest }),
            ]
        }
        _ => [None, None],
    }
}

/// Best route between two general-space points: (length, exit anchor of `a`,
/// entry anchor of `b`), or `None` when the direct along-edge route wins.
fn general_route(m: &DistanceMatrix, a: &Point, b: &Point) -> (f64, Option<(Anchor, Anchor)>) {
    let mut best = f64::INFINITY;
    let mut via = None;
    if let (
        Point::Edge { from: f1, to: t1, traveled: s1 },
        Point::Edge { from: f2, to: t2, traveled: s2 },
    ) = (a, b)
    {
        if f1 == f2 && t1 == t2 {
            best = (s1 - s2).abs();
        }
    }
    for x in anchors(m, a).into_iter().flatten() {
        for y in anchors(m, b).into_iter().flatten() {
            let len = x.out + m.get(x.node, y.node) + y.back;
            if len < best {
                best = len;
                via = Some((x, y));
            }
        }
    }
    (best, via)
}

fn general_distance(m: &DistanceMatrix, a: &Point, b: &Point) -> f64 {
    general_route(m, a, b).0
}

fn normalize_edge(m: &DistanceMatrix, from: usize, to: usize, traveled: f64) -> Point {
    let len = m.get(from, to);
    if from == to || traveled <= 0.0 {
        Point::Node(from)
    } else if traveled >= len {
        Point::Node(to)
    } else {
        Point::Edge { from, to, traveled }
    }
}

/// Moves `delta` along the edge that `p` sits on, towards `node`.
fn slide_towards(m: &DistanceMatrix, p: &Point, node: usize, delta: f64) -> Point {
    match *p {
        Point::Edge { from, to, traveled } => {
            if node == to {
                normalize_edge(m, from, to, traveled + delta)
            } else {
                normalize_edge(m, from, to, traveled - delta)
            }
        }
        other => other,
    }
}

fn general_travel(m: &DistanceMatrix, a: &Point, b: &Point, elapsed: f64) -> Point {
    let (total, via) = general_route(m, a, b);
    if elapsed >= total {
        return *b;
    }
    match via {
        None => match (*a, *b) {
            (Point::Edge { from, to, traveled: s1 }, Point::Edge { traveled: s2, .. }) => {
                let s = if s2 >= s1 { s1 + elapsed } else { s1 - elapsed };
                normalize_edge(m, from, to, s)
            }
            _ => *a,
        },
        Some((x, y)) => {
            if elapsed < x.out {
                return slide_towards(m, a, x.node, elapsed);
            }
            let mid = m.get(x.node, y.node);
            let e = elapsed - x.out;
            if e < mid {
                return normalize_edge(m, x.node, y.node, e);
            }
            let e = e - mid;
            match *b {
                Point::Edge { from, to, .. } => {
                    if y.node == from {
                        normalize_edge(m, from, to, e)
                    } else {
                        normalize_edge(m, from, to, m.get(from, to) - e)
                    }
                }
                _ => *b,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> MetricSpace {
        MetricSpace::Ring { circumference: 1.0 }
    }

    fn example_matrix() -> MetricSpace {
        // O, q1, q2, q3
        let rows = vec![
            vec![0.0, 3.0, 2.0, 3.0],
            vec![3.0, 0.0, 3.0, 1.0],
            vec![2.0, 3.0, 0.0, 3.0],
            vec![3.0, 1.0, 3.0, 0.0],
        ];
        MetricSpace::General(DistanceMatrix::from_rows(rows, true).unwrap())
    }

    #[test]
    fn ring_wraps_around() {
        let d = ring().distance(&Point::Arc(0.1), &Point::Arc(0.9)).unwrap();
        assert!((d - 0.2).abs() < 1e-12);
    }

    #[test]
    fn star_goes_through_origin() {
        let s = MetricSpace::Star { rays: 3 };
        let a = Point::Ray { ray: 1, depth: 0.5 };
        let b = Point::Ray { ray: 2, depth: 0.3 };
        assert!((s.distance(&a, &b).unwrap() - 0.8).abs() < 1e-12);
        let p = s.travel(&a, &b, 0.6).unwrap();
        match p {
            Point::Ray { ray, depth } => {
                assert_eq!(ray, 2);
                assert!((depth - 0.1).abs() < 1e-12);
            }
            _ => panic!("{p:?}"),
        }
    }

    #[test]
    fn star_origin_is_ray_agnostic() {
        let s = MetricSpace::Star { rays: 3 };
        let o1 = Point::Ray { ray: 1, depth: 0.0 };
        let o2 = Point::Ray { ray: 2, depth: 0.0 };
        assert_eq!(s.d(&o1, &o2), 0.0);
        assert!(s.coincide(&o1, &s.origin()));
    }

    #[test]
    fn general_example_distances() {
        let g = example_matrix();
        assert_eq!(g.distance(&Point::Node(1), &Point::Node(3)).unwrap(), 1.0);
        assert_eq!(g.distance(&Point::Node(0), &Point::Node(2)).unwrap(), 2.0);
    }

    #[test]
    fn travel_examples() {
        assert_eq!(
            MetricSpace::SemiLine.travel(&Point::Coord(0.0), &Point::Coord(1.0), 0.5).unwrap(),
            Point::Coord(0.5)
        );
        match ring().travel(&Point::Arc(0.0), &Point::Arc(0.9), 0.05).unwrap() {
            Point::Arc(x) => assert!((x - 0.95).abs() < 1e-12),
            p => panic!("{p:?}"),
        }
    }

    #[test]
    fn travel_endpoints() {
        let g = example_matrix();
        let a = Point::Node(1);
        let b = Point::Node(2);
        assert_eq!(g.travel(&a, &b, 0.0).unwrap(), a);
        assert_eq!(g.travel(&a, &b, 3.0).unwrap(), b);
        assert_eq!(
            g.travel(&a, &b, 1.0).unwrap(),
            Point::Edge { from: 1, to: 2, traveled: 1.0 }
        );
    }

    #[test]
    fn travel_rejects_bad_elapsed() {
        let r = MetricSpace::Line.travel(&Point::Coord(0.0), &Point::Coord(1.0), 1.5);
        assert!(matches!(r, Err(MetricError::BadElapsed { .. })));
        let r = MetricSpace::Line.travel(&Point::Coord(0.0), &Point::Coord(1.0), -0.5);
        assert!(matches!(r, Err(MetricError::BadElapsed { .. })));
    }

    #[test]
    fn outside_points_are_rejected() {
        let r = MetricSpace::SemiLine.distance(&Point::Coord(-1.0), &Point::Coord(0.0));
        assert!(matches!(r, Err(MetricError::OutsideSpace { .. })));
        let r = ring().distance(&Point::Arc(1.5), &Point::Arc(0.0));
        assert!(r.is_err());
        let r = MetricSpace::Star { rays: 2 }.distance(&Point::Ray { ray: 5, depth: 1.0 }, &Point::Coord(0.0));
        assert!(r.is_err());
    }

    #[test]
    fn edge_point_distances() {
        let g = example_matrix();
        let mid = Point::Edge { from: 1, to: 2, traveled: 1.0 };
        // back to q1 (1) then q1->q3 (1) = 2; forward to q2 (2) then q2->q3 (3) = 5
        assert_eq!(g.d(&mid, &Point::Node(3)), 2.0);
        assert_eq!(g.d(&mid, &Point::Node(2)), 2.0);
        let p = g.travel(&mid, &Point::Node(3), 1.5).unwrap();
        assert_eq!(p, Point::Edge { from: 1, to: 3, traveled: 0.5 });
    }

    #[test]
    fn validate_examples() {
        let rows = vec![vec![0.0, 5.0, 1.0], vec![5.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        let bad = MetricSpace::General(DistanceMatrix::from_rows(rows, true).unwrap());
        let v = bad.validate();
        assert!(v.contains(&SpaceViolation::Triangle { a: 0, via: 2, c: 1 }), "{v:?}");
        assert!(ring().validate().is_empty());
        let rows = vec![vec![0.0, 2.0], vec![3.0, 0.0]];
        let asym = MetricSpace::General(DistanceMatrix::from_rows(rows.clone(), false).unwrap());
        assert!(asym.validate().is_empty());
        let flagged = MetricSpace::General(DistanceMatrix::from_rows(rows, true).unwrap());
        assert_eq!(flagged.validate(), vec![SpaceViolation::Asymmetric { a: 0, b: 1 }]);
        assert_eq!(
            MetricSpace::Ring { circumference: 0.0 }.validate(),
            vec![SpaceViolation::NonPositiveCircumference(0.0)]
        );
        assert_eq!(MetricSpace::Star { rays: 0 }.validate(), vec![SpaceViolation::NoRays]);
    }

    #[test]
    fn non_square_matrix_is_an_error() {
        let r = DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0]], true);
        assert!(matches!(r, Err(MetricError::NotSquare { row: 1, .. })));
    }
}
