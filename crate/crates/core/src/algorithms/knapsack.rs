//! 0/1 knapsack used by the star algorithm to pick rays.

use thiserror::Error;

use crate::metric::EPS;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KnapsackItem {
    /// Caller's label, returned in the selection.
    pub index: usize,
    pub weight: f64,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KnapsackMode {
    Exact,
    /// Value-rounding scheme; the selection is worth at least `(1 - eps)`
    /// of the optimum.
    Fptas(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KnapsackError {
    #[error("item {index} has a negative or non-finite weight or value")]
    BadItem { index: usize },
    #[error("capacity must be finite and >= 0, got {0}")]
    BadCapacity(f64),
    #[error("FPTAS epsilon must be in (0, 1], got {0}")]
    BadEpsilon(f64),
}

/// Items up to which the exact solver enumerates every subset.
const ENUMERATION_CAP: usize = 20;

/// Selects items with total weight at most `capacity` (within [`EPS`]),
/// returning their `index` labels in ascending order.
pub fn knapsack_select(items: &[KnapsackItem], capacity: f64, mode: KnapsackMode) -> Result<Vec<usize>, KnapsackError> {
    for it in items {
        if !(it.weight.is_finite() && it.weight >= 0.0 && it.value.is_finite() && it.value >= 0.0) {
            return Err(KnapsackError::BadItem { index: it.index });
        }
    }
    if !(capacity.is_finite() && capacity >= 0.0) {
        return Err(KnapsackError::BadCapacity(capacity));
    }
    let cap = capacity + EPS;
    let mut picked = match mode {
        KnapsackMode::Exact if items.len() <= ENUMERATION_CAP => enumerate(items, cap),
        KnapsackMode::Exact => branch_and_bound(items, cap),
        KnapsackMode::Fptas(eps) => {
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(KnapsackError::BadEpsilon(eps));
            }
            fptas(items, cap, eps)
        }
    };
    picked.sort_unstable();
    Ok(picked)
}

/// Total value of the items labelled by `picked`.
pub fn selection_value(items: &[KnapsackItem], picked: &[usize]) -> f64 {
    items.iter().filter(|it| picked.contains(&it.index)).map(|it| it.value).sum()
}

fn enumerate(items: &[KnapsackItem], cap: f64) -> Vec<usize> {
    fn rec(items: &[KnapsackItem], i: usize, w: f64, v: f64, cap: f64, cur: &mut Vec<usize>, best: &mut (f64, Vec<usize>)) {
        if i == items.len() {
            if v > best.0 {
                *best = (v, cur.clone());
            }
            return;
        }
        let it = &items[i];
        if w + it.weight <= cap {
            cur.push(it.index);
            rec(items, i + 1, w + it.weight, v + it.value, cap, cur, best);
            cur.pop();
        }
        rec(items, i + 1, w, v, cap, cur, best);
    }
    let mut best = (-1.0, vec![]);
    rec(items, 0, 0.0, 0.0, cap, &mut vec![], &mut best);
    best.1
}

/// Depth-first branch and bound with the fractional relaxation as bound.
fn branch_and_bound(items: &[KnapsackItem], cap: f64) -> Vec<usize> {
    let mut sorted: Vec<&KnapsackItem> = items.iter().collect();
    // Best value density first; zero weights lead.
    sorted.sort_by(|a, b| {
        let da = if a.weight > 0.0 { a.value / a.weight } else { f64::INFINITY };
        let db = if b.weight > 0.0 { b.value / b.weight } else { f64::INFINITY };
        db.total_cmp(&da).then(a.index.cmp(&b.index))
    });
    fn bound(items: &[&KnapsackItem], i: usize, mut w: f64, mut v: f64, cap: f64) -> f64 {
        for it in &items[i..] {
            if w + it.weight <= cap {
                w += it.weight;
                v += it.value;
            } else {
                let room = cap - w;
                if it.weight > 0.0 && room > 0.0 {
                    v += it.value * room / it.weight;
                }
                break;
            }
        }
        v
    }
    fn rec(items: &[&KnapsackItem], i: usize, w: f64, v: f64, cap: f64, cur: &mut Vec<usize>, best: &mut (f64, Vec<usize>)) {
        if v > best.0 {
            *best = (v, cur.clone());
        }
        if i == items.len() || bound(items, i, w, v, cap) <= best.0 {
            return;
        }
        let it = items[i];
        if w + it.weight <= cap {
            cur.push(it.index);
            rec(items, i + 1, w + it.weight, v + it.value, cap, cur, best);
            cur.pop();
        }
        rec(items, i + 1, w, v, cap, cur, best);
    }
    let mut best = (-1.0, vec![]);
    rec(&sorted, 0, 0.0, 0.0, cap, &mut vec![], &mut best);
    best.1
}

fn fptas(items: &[KnapsackItem], cap: f64, eps: f64) -> Vec<usize> {
    let fit: Vec<&KnapsackItem> = items.iter().filter(|it| it.weight <= cap).collect();
    let vmax = fit.iter().map(|it| it.value).fold(0.0, f64::max);
    if fit.is_empty() || vmax <= 0.0 {
        return vec![];
    }
    let scale = eps * vmax / fit.len() as f64;
    let profit: Vec<usize> = fit.iter().map(|it| (it.value / scale).floor() as usize).collect();
    let total: usize = profit.iter().sum();
    // min_w[p]: lightest subset of the items seen so far with scaled profit p.
    let mut min_w = vec![f64::INFINITY; total + 1];
    min_w[0] = 0.0;
    let mut take = vec![vec![false; total + 1]; fit.len()];
    for (i, it) in fit.iter().enumerate() {
        for p in (profit[i]..=total).rev() {
            let w = min_w[p - profit[i]] + it.weight;
            if w < min_w[p] {
                min_w[p] = w;
                take[i][p] = true;
            }
        }
    }
    let mut p = (0..=total).rev().find(|&p| min_w[p] <= cap).unwrap_or(0);
    let mut picked = vec![];
    for i in (0..fit.len()).rev() {
        if take[i][p] {
            picked.push(fit[i].index);
            p -= profit[i];
        }
    }
    picked
}
