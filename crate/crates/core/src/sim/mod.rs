//! Online pivot-selection searches that count distance computations.
//!
//! Each run starts from a hidden copy of the query distances and pays for
//! every `δ(q, p)` it reveals. The loop follows AESA: pick a candidate by the
//! strategy's score, reveal it, tighten every object's bounds, and drop the
//! objects those bounds resolve.

mod heuristics;

pub use heuristics::{aesa_score, footrule, gaesa_score, iaesa2_order, oracle_power};

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::elimination::{eliminates_by, knn_radius, QueryMode, QuerySpec};
use crate::error::{Error, Result};
use crate::metric::{Bounds, DistanceMatrix, QueryDistances};
use crate::rng::{rng_from_seed, Rng};
use heuristics::{argmin_by, ranks};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Random {
        seed: u64,
    },
    Aesa,
    Iaesa2,
    Gaesa,
    /// Picks by true elimination power among remaining objects.
    Oracle,
}

impl Strategy {
    /// Token used on the command line and in TSV output.
    pub fn token(&self) -> &'static str {
        match self {
            Strategy::Random { .. } => "random",
            Strategy::Aesa => "aesa",
            Strategy::Iaesa2 => "iaesa2",
            Strategy::Gaesa => "gaesa",
            Strategy::Oracle => "oracle",
        }
    }

    /// Human-readable name.
    pub fn label(&self) -> &'static str {
        match self {
            Strategy::Random { .. } => "Random",
            Strategy::Aesa => "AESA",
            Strategy::Iaesa2 => "iAESA2 (reimplementation)",
            Strategy::Gaesa => "gAESA",
            Strategy::Oracle => "Oracle AESA",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    /// `random` parses with seed 0; callers reseed per run.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "random" => Ok(Strategy::Random { seed: 0 }),
            "aesa" => Ok(Strategy::Aesa),
            "iaesa2" => Ok(Strategy::Iaesa2),
            "gaesa" => Ok(Strategy::Gaesa),
            "oracle" => Ok(Strategy::Oracle),
            other => Err(Error::InvalidSpec(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Extra knobs for a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SimOptions {
    /// Draw the first pivot uniformly at random (seeded) instead of taking
    /// the lowest index when every score is tied.
    pub first_pivot_seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub pivot: usize,
    /// Resolved as outside the result (lower bound above the radius, or pruned
    /// in kNN mode).
    pub excluded: Vec<usize>,
    /// Resolved as inside the result without computing their distance.
    pub included: Vec<usize>,
}

/// Full record of one search run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub strategy: String,
    pub mode: QuerySpec,
    pub pivots: Vec<usize>,
    pub computations: usize,
    /// Ascending object indices.
    pub result: Vec<usize>,
    pub steps: Vec<Step>,
}

/// Range search with radius `r`.
pub fn run_range_search(
    strategy: Strategy,
    dm: &DistanceMatrix,
    qd: &QueryDistances,
    r: f64,
    use_upper: bool,
) -> SimTrace {
    run_range_search_with(strategy, dm, qd, r, use_upper, SimOptions::default())
}

pub fn run_range_search_with(
    strategy: Strategy,
    dm: &DistanceMatrix,
    qd: &QueryDistances,
    r: f64,
    use_upper: bool,
    opts: SimOptions,
) -> SimTrace {
    let n = dm.n();
    let tol = dm.tolerance();
    let mut qd = qd.hidden();
    let mut bounds = Bounds::new(n);
    let mut pool = Pool::full(n);
    let mut sel = Selector::new(strategy, dm, &qd, r, use_upper, opts);
    let mut pivots = Vec::new();
    let mut result = Vec::new();
    let mut steps = Vec::new();

    while !pool.is_empty() {
        let p = sel.select(&pool, &pivots, &qd, dm);
        let dqp = qd.reveal(p);
        pivots.push(p);
        if dqp <= r + tol {
            result.push(p);
        }
        pool.remove(p);
        bounds.add_pivot(p, dqp, dm);
        sel.on_pivot(p, dqp, dm);

        let mut step = Step {
            pivot: p,
            excluded: Vec::new(),
            included: Vec::new(),
        };
        for x in pool.members() {
            if bounds.lo(x) > r + tol {
                step.excluded.push(x);
            } else if use_upper && bounds.hi(x) <= r + tol {
                step.included.push(x);
            }
        }
        for &x in step.excluded.iter().chain(&step.included) {
            pool.remove(x);
        }
        result.extend_from_slice(&step.included);
        steps.push(step);
    }
    result.sort_unstable();
    SimTrace {
        strategy: strategy.label().to_string(),
        mode: QuerySpec {
            mode: QueryMode::Range(r),
            use_upper,
        },
        computations: qd.computations(),
        pivots,
        result,
        steps,
    }
}

/// k-nearest-neighbour search.
///
/// Stops as soon as some `k`-set `S` of revealed or upper-bounded objects
/// satisfies `max_{S} u <= min_{not S} ℓ` (revealed objects have
/// `ℓ = u = δ`). Unrevealed objects leave the
/// candidate pool once their lower bound exceeds the k-th smallest upper bound
/// (excluded), or, with `use_upper`, once fewer than `k` other objects can be
/// closer (included). Without `use_upper` every result member is revealed.
pub fn run_knn_search(
    strategy: Strategy,
    dm: &DistanceMatrix,
    qd: &QueryDistances,
    k: usize,
    use_upper: bool,
) -> Result<SimTrace> {
    run_knn_search_with(strategy, dm, qd, k, use_upper, SimOptions::default())
}

pub fn run_knn_search_with(
    strategy: Strategy,
    dm: &DistanceMatrix,
    qd: &QueryDistances,
    k: usize,
    use_upper: bool,
    opts: SimOptions,
) -> Result<SimTrace> {
    let n = dm.n();
    // the oracle scores with the true kNN radius
    let (true_radius, _) = knn_radius(qd, k)?;
    let mut qd = qd.hidden();
    let mut bounds = Bounds::new(n);
    let mut pool = Pool::full(n);
    let mut sel = Selector::new(strategy, dm, &qd, true_radius, use_upper, opts);
    let mut pivots = Vec::new();
    let mut steps: Vec<Step> = Vec::new();

    let result = loop {
        let view = KnnView::new(&bounds, &qd, use_upper);
        if let Some(set) = view.resolved_set(k) {
            break set;
        }
        let (excluded, included) = view.settle(&pool, k);
        for &x in excluded.iter().chain(&included) {
            pool.remove(x);
        }
        if let Some(last) = steps.last_mut() {
            last.excluded.extend(excluded);
            last.included.extend(included);
        }
        if pool.is_empty() {
            // cannot happen with consistent bounds; reopen to guarantee progress
            for x in (0..n).filter(|&x| !qd.is_revealed(x)) {
                pool.insert(x);
            }
        }
        let p = sel.select(&pool, &pivots, &qd, dm);
        let dqp = qd.reveal(p);
        pivots.push(p);
        pool.remove(p);
        bounds.add_pivot(p, dqp, dm);
        sel.on_pivot(p, dqp, dm);
        steps.push(Step {
            pivot: p,
            excluded: Vec::new(),
            included: Vec::new(),
        });
    };
    Ok(SimTrace {
        strategy: strategy.label().to_string(),
        mode: QuerySpec {
            mode: QueryMode::Knn(k),
            use_upper,
        },
        computations: qd.computations(),
        pivots,
        result,
        steps,
    })
}

/// Bounds as the kNN termination test sees them.
struct KnnView<'a> {
    bounds: &'a Bounds,
    qd: &'a QueryDistances,
    use_upper: bool,
}

impl<'a> KnnView<'a> {
    fn new(bounds: &'a Bounds, qd: &'a QueryDistances, use_upper: bool) -> Self {
        Self {
            bounds,
            qd,
            use_upper,
        }
    }

    fn lo(&self, x: usize) -> f64 {
        self.qd.revealed(x).unwrap_or_else(|| self.bounds.lo(x))
    }

    fn hi(&self, x: usize) -> f64 {
        match self.qd.revealed(x) {
            Some(d) => d,
            None if self.use_upper => self.bounds.hi(x),
            None => f64::INFINITY,
        }
    }

    /// Objects sorted by `(u, ℓ, index)`; the first `k` form the only
    /// candidate result worth testing.
    fn resolved_set(&self, k: usize) -> Option<Vec<usize>> {
        let n = self.bounds.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            self.hi(a)
                .total_cmp(&self.hi(b))
                .then(self.lo(a).total_cmp(&self.lo(b)))
                .then(a.cmp(&b))
        });
        let worst_in = order[..k]
            .iter()
            .map(|&x| self.hi(x))
            .fold(f64::NEG_INFINITY, f64::max);
        let best_out = order[k..]
            .iter()
            .map(|&x| self.lo(x))
            .fold(f64::INFINITY, f64::min);
        if worst_in.is_finite() && worst_in <= best_out {
            let mut set = order[..k].to_vec();
            set.sort_unstable();
            Some(set)
        } else {
            None
        }
    }

    /// Pool members resolved without computing them: `(excluded, included)`.
    fn settle(&self, pool: &Pool, k: usize) -> (Vec<usize>, Vec<usize>) {
        let n = self.bounds.len();
        let mut his: Vec<f64> = (0..n).map(|x| self.hi(x)).collect();
        his.sort_by(f64::total_cmp);
        let kth_hi = his[k - 1];
        let mut los: Vec<f64> = (0..n).map(|x| self.lo(x)).collect();
        los.sort_by(f64::total_cmp);

        let mut excluded = Vec::new();
        let mut included = Vec::new();
        for x in pool.members() {
            let (lo, hi) = (self.lo(x), self.hi(x));
            if lo > kth_hi {
                excluded.push(x);
            } else if self.use_upper && hi.is_finite() {
                // objects other than x that could be strictly closer
                let closer = los.partition_point(|&l| l < hi) - usize::from(lo < hi);
                if closer < k {
                    included.push(x);
                }
            }
        }
        (excluded, included)
    }
}

/// Candidate set: membership flags plus a bitset for oracle popcounts.
struct Pool {
    flags: FixedBitSet,
}

impl Pool {
    fn full(n: usize) -> Self {
        let mut flags = FixedBitSet::with_capacity(n);
        flags.insert_range(..);
        Self { flags }
    }

    fn is_empty(&self) -> bool {
        self.flags.is_clear()
    }

    fn remove(&mut self, x: usize) {
        self.flags.set(x, false);
    }

    fn insert(&mut self, x: usize) {
        self.flags.insert(x);
    }

    fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.flags.ones()
    }

    fn to_vec(&self) -> Vec<usize> {
        self.flags.ones().collect()
    }
}

/// Per-strategy selection state.
struct Selector {
    strategy: Strategy,
    rng: Option<Rng>,
    first: Option<Rng>,
    /// Running `Σ_p |δ(q,p) - δ(p,x)|` for every object.
    score: Vec<f64>,
    /// Closed elimination neighbourhoods, oracle only.
    power: Vec<FixedBitSet>,
}

impl Selector {
    fn new(
        strategy: Strategy,
        dm: &DistanceMatrix,
        qd: &QueryDistances,
        r: f64,
        use_upper: bool,
        opts: SimOptions,
    ) -> Self {
        let n = dm.n();
        let power = if strategy == Strategy::Oracle {
            let truth = qd.all();
            let tol = dm.tolerance();
            (0..n)
                .map(|p| {
                    let row = dm.row(p);
                    let mut s = FixedBitSet::with_capacity(n);
                    s.insert(p);
                    for x in (0..n).filter(|&x| x != p) {
                        if eliminates_by(truth[p], row[x], r, use_upper, tol) {
                            s.insert(x);
                        }
                    }
                    s
                })
                .collect()
        } else {
            Vec::new()
        };
        Self {
            strategy,
            rng: match strategy {
                Strategy::Random { seed } => Some(rng_from_seed(seed)),
                _ => None,
            },
            first: opts.first_pivot_seed.map(rng_from_seed),
            score: vec![0.0; n],
            power,
        }
    }

    fn on_pivot(&mut self, p: usize, dqp: f64, dm: &DistanceMatrix) {
        for (s, &dpx) in self.score.iter_mut().zip(dm.row(p)) {
            *s += (dqp - dpx).abs();
        }
    }

    fn select(
        &mut self,
        pool: &Pool,
        pivots: &[usize],
        qd: &QueryDistances,
        dm: &DistanceMatrix,
    ) -> usize {
        if pivots.is_empty() && self.strategy != Strategy::Oracle {
            if let Some(rng) = self.first.as_mut() {
                let members = pool.to_vec();
                return members[rng.gen_range(0..members.len())];
            }
        }
        let pick = match self.strategy {
            Strategy::Random { .. } => {
                let members = pool.to_vec();
                let rng = self.rng.as_mut().expect("random strategy has a stream");
                Some(members[rng.gen_range(0..members.len())])
            }
            Strategy::Aesa => argmin_by(pool.members(), |x| self.score[x]),
            Strategy::Gaesa => {
                let members = pool.to_vec();
                argmin_by(members.iter().copied(), |x| {
                    let num = self.score[x];
                    if num == 0.0 {
                        return 0.0;
                    }
                    let den: f64 = members.iter().map(|&u| dm.get(x, u)).sum();
                    if den > 0.0 {
                        num / den
                    } else {
                        num
                    }
                })
            }
            Strategy::Iaesa2 => {
                if pivots.is_empty() {
                    pool.members().next()
                } else {
                    let query_rank = ranks(pivots, |p| qd.revealed(p).expect("pivot revealed"));
                    pool.members()
                        .map(|x| {
                            let rank = ranks(pivots, |p| dm.get(p, x));
                            let foot: usize = rank
                                .iter()
                                .zip(&query_rank)
                                .map(|(a, b)| a.abs_diff(*b))
                                .sum();
                            (foot, self.score[x], x)
                        })
                        .min_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)))
                        .map(|t| t.2)
                }
            }
            Strategy::Oracle => {
                let mut best: Option<(usize, usize)> = None;
                for x in pool.members() {
                    let c = self.power[x].intersection_count(&pool.flags);
                    if best.is_none_or(|(b, _)| c > b) {
                        best = Some((c, x));
                    }
                }
                best.map(|b| b.1)
            }
        };
        pick.expect("selection from a non-empty pool")
    }
}
