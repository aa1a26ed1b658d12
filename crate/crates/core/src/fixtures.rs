//! Small hand-built instances used by tests, docs and the CLI.

use crate::instance::{Instance, Variant};
use crate::metric::{DistanceMatrix, MetricSpace, Point};

/// Three requests on a four-point matrix (origin, q1, q2, q3), released at
/// 2, 6 and 8, closed variant.
pub fn example1() -> Instance {
    let rows = vec![
        vec![0.0, 3.0, 2.0, 3.0],
        vec![3.0, 0.0, 3.0, 1.0],
        vec![2.0, 3.0, 0.0, 3.0],
        vec![3.0, 1.0, 3.0, 0.0],
    ];
    let space = MetricSpace::General(DistanceMatrix::from_rows(rows, true).expect("square"));
    Instance::from_pairs(
        space,
        Variant::Closed,
        [(Point::Node(1), 2.0), (Point::Node(2), 6.0), (Point::Node(3), 8.0)],
    )
}
