//! Exact offline optimum. The optimum never needs to wait anywhere except at
//! request locations, so it is the best service order under the waiting fold
//! `t_j = max(t_{j-1} + d(prev, next), release_j)`.

use thiserror::Error;

use crate::instance::{Instance, Variant};
use crate::metric::{MetricSpace, Point};

/// Largest instance the subset DP accepts.
pub const DP_CAP: usize = 18;
/// Largest instance the permutation enumeration accepts.
pub const BRUTE_CAP: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct OptResult {
    pub makespan: f64,
    /// Request ids in service order.
    pub order: Vec<usize>,
    /// Service time of `order[j]`.
    pub per_step_times: Vec<f64>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{n} requests exceed the oracle cap of {cap}")]
    TooLarge { n: usize, cap: usize },
}

struct Table {
    n: usize,
    /// `from[i][j]`: i = 0 is the origin, i >= 1 is request i.
    dist: Vec<f64>,
    release: Vec<f64>,
    back: Vec<f64>,
}

impl Table {
    fn new(space: &MetricSpace, points: &[Point], release: &[f64]) -> Self {
        let n = points.len();
        let origin = space.origin();
        let stops: Vec<Point> = std::iter::once(origin).chain(points.iter().copied()).collect();
        let mut dist = vec![0.0; (n + 1) * (n + 1)];
        for (i, a) in stops.iter().enumerate() {
            for (j, b) in stops.iter().enumerate() {
                dist[i * (n + 1) + j] = space.d(a, b);
            }
        }
        let back = points.iter().map(|p| space.d(p, &origin)).collect();
        Self { n, dist, release: release.to_vec(), back }
    }

    /// Travel from stop `i` (0 = origin) to request index `j` (0-based).
    #[inline]
    fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * (self.n + 1) + j + 1]
    }
}

/// Service times of `order` (0-based request indices) under the waiting fold.
fn fold(t: &Table, order: &[usize]) -> Vec<f64> {
    let mut now = 0.0;
    let mut at = 0;
    order
        .iter()
        .map(|&j| {
            now = f64::max(now + t.d(at, j), t.release[j]);
            at = j + 1;
            now
        })
        .collect()
}

fn finish(t: &Table, variant: Variant, order: &[usize], last_time: f64) -> f64 {
    match (variant, order.last()) {
        (_, None) => 0.0,
        (Variant::Open, Some(_)) => last_time,
        (Variant::Closed, Some(&j)) => last_time + t.back[j],
    }
}

/// Subset DP over (visited set, last request).
pub fn opt_makespan(inst: &Instance) -> Result<OptResult, OracleError> {
    opt_makespan_with(&inst.space, inst.variant, &inst.points(), &inst.releases())
}

/// [`opt_makespan`] on raw data, for callers that have no [`Instance`].
pub fn opt_makespan_with(
    space: &MetricSpace,
    variant: Variant,
    points: &[Point],
    release: &[f64],
) -> Result<OptResult, OracleError> {
    let n = points.len();
    if n > DP_CAP {
        return Err(OracleError::TooLarge { n, cap: DP_CAP });
    }
    if n == 0 {
        return Ok(OptResult { makespan: 0.0, order: vec![], per_step_times: vec![] });
    }
    let t = Table::new(space, points, release);
    let full = (1usize << n) - 1;
    let mut f = vec![f64::INFINITY; (full + 1) * n];
    let mut parent = vec![u8::MAX; (full + 1) * n];
    for j in 0..n {
        f[(1 << j) * n + j] = f64::max(t.d(0, j), t.release[j]);
    }
    for set in 1..=full {
        if set.count_ones() < 2 {
            continue;
        }
        let mut rest = set;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = set & !(1 << j);
            let mut best = f64::INFINITY;
            let mut arg = u8::MAX;
            let mut cand = prev;
            while cand != 0 {
                let i = cand.trailing_zeros() as usize;
                cand &= cand - 1;
                let v = f64::max(f[prev * n + i] + t.d(i + 1, j), t.release[j]);
                if v < best {
                    best = v;
                    arg = i as u8;
                }
            }
            f[set * n + j] = best;
            parent[set * n + j] = arg;
        }
    }
    let mut best = f64::INFINITY;
    let mut last = 0;
    for j in 0..n {
        let v = match variant {
            Variant::Open => f[full * n + j],
            Variant::Closed => f[full * n + j] + t.back[j],
        };
        if v < best {
            best = v;
            last = j;
        }
    }
    let mut rev = Vec::with_capacity(n);
    let mut set = full;
    let mut j = last;
    loop {
        rev.push(j);
        let p = parent[set * n + j];
        set &= !(1 << j);
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    rev.reverse();
    let times = fold(&t, &rev);
    Ok(OptResult {
        makespan: best,
        order: rev.iter().map(|j| j + 1).collect(),
        per_step_times: times,
    })
}

/// Explicit enumeration of all service orders, lexicographically smallest
/// optimal order on ties.
pub fn opt_bruteforce(inst: &Instance) -> Result<OptResult, OracleError> {
    let n = inst.len();
    if n > BRUTE_CAP {
        return Err(OracleError::TooLarge { n, cap: BRUTE_CAP });
    }
    if n == 0 {
        return Ok(OptResult { makespan: 0.0, order: vec![], per_step_times: vec![] });
    }
    let t = Table::new(&inst.space, &inst.points(), &inst.releases());
    let mut search = Brute {
        t: &t,
        variant: inst.variant,
        order: Vec::with_capacity(n),
        used: vec![false; n],
        best: f64::INFINITY,
        best_order: vec![],
    };
    search.dfs(0, 0.0);
    let order = search.best_order;
    let times = fold(&t, &order);
    Ok(OptResult {
        makespan: search.best,
        order: order.iter().map(|j| j + 1).collect(),
        per_step_times: times,
    })
}

struct Brute<'a> {
    t: &'a Table,
    variant: Variant,
    order: Vec<usize>,
    used: Vec<bool>,
    best: f64,
    best_order: Vec<usize>,
}

impl Brute<'_> {
    fn dfs(&mut self, at: usize, now: f64) {
        let n = self.t.n;
        if self.order.len() == n {
            let total = finish(self.t, self.variant, &self.order, now);
            if total < self.best {
                self.best = total;
                self.best_order = self.order.clone();
            }
            return;
        }
        for j in 0..n {
            if self.used[j] {
                continue;
            }
            let next = f64::max(now + self.t.d(at, j), self.t.release[j]);
            self.used[j] = true;
            self.order.push(j);
            self.dfs(j + 1, next);
            self.order.pop();
            self.used[j] = false;
        }
    }
}

/// Makespan of a fixed service order (1-based ids) under the waiting fold.
pub fn fold_makespan(inst: &Instance, order: &[usize]) -> f64 {
    let t = Table::new(&inst.space, &inst.points(), &inst.releases());
    let zero: Vec<usize> = order.iter().map(|id| id - 1).collect();
    let times = fold(&t, &zero);
    finish(&t, inst.variant, &zero, times.last().copied().unwrap_or(0.0))
}
