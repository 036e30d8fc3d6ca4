//! Pivot-selection scores of the AESA family.
//!
//! All of these read only revealed query distances, except
//! [`oracle_power`], which peeks at the true ones without paying for them.

use std::cmp::Ordering;

use crate::elimination::eliminates;
use crate::metric::{DistanceMatrix, QueryDistances};

fn pivot_distance(qd: &QueryDistances, p: usize) -> f64 {
    debug_assert!(qd.is_revealed(p), "pivot {p} not revealed");
    qd.all()[p]
}

/// Sum of per-pivot lower bounds; AESA picks the candidate minimising it.
pub fn aesa_score(x: usize, pivots: &[usize], qd: &QueryDistances, dm: &DistanceMatrix) -> f64 {
    pivots
        .iter()
        .map(|&p| (pivot_distance(qd, p) - dm.get(p, x)).abs())
        .sum()
}

/// The AESA score divided by the summed distance from `x` to the other
/// remaining objects. A zero denominator leaves the AESA score as is.
pub fn gaesa_score(
    x: usize,
    pivots: &[usize],
    remaining: &[usize],
    qd: &QueryDistances,
    dm: &DistanceMatrix,
) -> f64 {
    let num = aesa_score(x, pivots, qd, dm);
    if num == 0.0 {
        return 0.0;
    }
    let den: f64 = remaining
        .iter()
        .filter(|&&u| u != x)
        .map(|&u| dm.get(x, u))
        .sum();
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// Spearman footrule between two orderings of the pivots: by distance to
/// `x`, and by (revealed) distance to the query. Ties order by pivot index.
pub fn footrule(x: usize, pivots: &[usize], qd: &QueryDistances, dm: &DistanceMatrix) -> usize {
    let query_rank = ranks(pivots, |p| pivot_distance(qd, p));
    let object_rank = ranks(pivots, |p| dm.get(p, x));
    query_rank
        .iter()
        .zip(&object_rank)
        .map(|(a, b)| a.abs_diff(*b))
        .sum()
}

/// Rank of each entry of `pivots` when sorted by `key`, ties by index.
pub(crate) fn ranks(pivots: &[usize], key: impl Fn(usize) -> f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pivots.len()).collect();
    order.sort_by(|&a, &b| {
        key(pivots[a])
            .total_cmp(&key(pivots[b]))
            .then(pivots[a].cmp(&pivots[b]))
    });
    let mut rank = vec![0; pivots.len()];
    for (r, i) in order.into_iter().enumerate() {
        rank[i] = r;
    }
    rank
}

/// iAESA2-style candidate order (a reimplementation): by footrule between
/// pivot permutations, then AESA score, then index. Index order when there
/// are no pivots.
pub fn iaesa2_order(
    remaining: &[usize],
    pivots: &[usize],
    qd: &QueryDistances,
    dm: &DistanceMatrix,
) -> Vec<usize> {
    let mut keyed: Vec<(usize, f64, usize)> = remaining
        .iter()
        .map(|&x| {
            if pivots.is_empty() {
                (0, 0.0, x)
            } else {
                (
                    footrule(x, pivots, qd, dm),
                    aesa_score(x, pivots, qd, dm),
                    x,
                )
            }
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    keyed.into_iter().map(|(_, _, x)| x).collect()
}

/// How many remaining objects `p` would resolve on its own, itself included.
/// Reads the true `δ(q, p)` without counting it.
pub fn oracle_power(
    p: usize,
    remaining: &[usize],
    qd: &QueryDistances,
    dm: &DistanceMatrix,
    r: f64,
    use_upper: bool,
) -> usize {
    1 + remaining
        .iter()
        .filter(|&&x| x != p && eliminates(p, x, qd, dm, r, use_upper))
        .count()
}

/// Index of the smallest score, lowest index on ties.
pub(crate) fn argmin_by(
    items: impl Iterator<Item = usize>,
    mut score: impl FnMut(usize) -> f64,
) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for x in items {
        let s = score(x);
        match best {
            Some((b, _)) if s.total_cmp(&b) != Ordering::Less => {}
            _ => best = Some((s, x)),
        }
    }
    best.map(|(_, x)| x)
}
