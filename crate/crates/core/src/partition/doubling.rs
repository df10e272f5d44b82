//! Label-driven partitions of doubling graphs at scale `R`.
//!
//! 1. Centers: `x` is a center iff no center `y` with `d(x, y) ≤ 2R` has
//!    a smaller key. Keys are label prefixes, distinct within `4R`, so this
//!    is a maximal set with pairwise distances above `2R`.
//! 2. Each center `c` picks `r(c) ∈ [R, 2R − 1]` minimizing
//!    `|B_{r+1}(c) ∖ B_r(c)| / |B_r(c)|`, ties to the smaller radius.
//! 3. A vertex joins the covering center (`d ≤ r(c)`) with least
//!    `(distance, key)`, or else the nearest center within `2R`.
//!
//! Tiles therefore have diameter at most `K = 4R`.

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;

use super::{partition_quality, Partition, PartitionQuality};
use crate::error::{Error, Result};
use crate::graph::{BallScratch, Graph};
use crate::labeling::Labeling;
use crate::local::{Oracle, QLabeling};
use crate::Rational;

fn key_mask(t: usize) -> u128 {
    if t >= 128 {
        u128::MAX
    } else {
        (1u128 << t) - 1
    }
}

fn checked_bits(t: usize) -> Result<usize> {
    if t > 128 {
        return Err(Error::Precondition(format!(
            "partition keys use at most 128 bits, certificate needs {t}"
        )));
    }
    Ok(t)
}

/// Distance within which a smaller-key center blocks a candidate; also the
/// farthest a vertex sits from its center.
fn separation(scale: usize) -> usize {
    2 * scale
}

/// Radius within which two centers' tile keys must differ for the gap
/// property: `3K - 1` plus twice the assignment reach.
fn tile_key_radius(scale: usize) -> usize {
    12 * scale - 1 + 2 * separation(scale)
}

/// Annulus-minimizing cut radius from the sphere sizes around `c`.
fn cut_radius(g: &Graph, c: usize, scale: usize, scratch: &mut BallScratch) -> usize {
    let mut sphere = vec![0usize; 2 * scale + 1];
    for (_, d) in scratch.explore_dists(g, c, Some(2 * scale)) {
        sphere[d] += 1;
    }
    let mut ball = 0;
    let mut best: Option<(usize, usize, usize)> = None;
    for (r, &s) in sphere.iter().enumerate().take(2 * scale) {
        ball += s;
        if r < scale {
            continue;
        }
        let ring = sphere[r + 1];
        let better = match best {
            None => true,
            Some((_, bring, bball)) => ring * bball < bring * ball,
        };
        if better {
            best = Some((r, ring, ball));
        }
    }
    best.map_or(scale, |b| b.0)
}

/// Lazy evaluation of the center rule on any graph with keys. Used both on
/// whole graphs and inside canonical balls.
struct CenterRule<'a> {
    g: &'a Graph,
    keys: &'a [u128],
    scale: usize,
    cands: Vec<Option<Vec<usize>>>,
    status: Vec<Option<bool>>,
    touched: Vec<usize>,
    radius: Vec<Option<usize>>,
    measured: Vec<usize>,
    scratch: BallScratch,
}

impl<'a> CenterRule<'a> {
    fn new(g: &'a Graph, keys: &'a [u128], scale: usize) -> Self {
        CenterRule {
            g,
            keys,
            scale,
            cands: vec![None; g.n()],
            status: vec![None; g.n()],
            touched: Vec::new(),
            radius: vec![None; g.n()],
            measured: Vec::new(),
            scratch: BallScratch::new(g.n()),
        }
    }

    fn reach(&self) -> usize {
        separation(self.scale)
    }

    /// Forgets center statuses (not the cached candidate lists).
    fn reset(&mut self) {
        for v in self.touched.drain(..) {
            self.status[v] = None;
        }
        self.measured.clear();
    }

    fn candidates(&mut self, v: usize) -> &[usize] {
        if self.cands[v].is_none() {
            let key = self.keys[v];
            let mut c: Vec<usize> = self
                .scratch
                .explore(self.g, v, Some(separation(self.scale)))
                .iter()
                .copied()
                .filter(|&y| self.keys[y] < key)
                .collect();
            c.sort_by_key(|&y| (self.keys[y], y));
            self.cands[v] = Some(c);
        }
        self.cands[v].as_deref().expect("filled above")
    }

    fn set(&mut self, v: usize, s: bool) {
        self.status[v] = Some(s);
        self.touched.push(v);
    }

    /// Candidates are scanned by ascending key and the scan stops at the
    /// first center, so only the vertices the answer depends on are visited.
    fn is_center(&mut self, x: usize) -> bool {
        if let Some(s) = self.status[x] {
            return s;
        }
        let mut stack: Vec<(usize, usize)> = vec![(x, 0)];
        while let Some(&(v, i)) = stack.last() {
            let next = self.candidates(v).get(i).copied();
            match next {
                None => {
                    self.set(v, true);
                    stack.pop();
                }
                Some(y) => match self.status[y] {
                    Some(true) => {
                        self.set(v, false);
                        stack.pop();
                    }
                    Some(false) => stack.last_mut().expect("nonempty").1 += 1,
                    None => stack.push((y, 0)),
                },
            }
        }
        self.status[x].expect("resolved")
    }

    fn cut(&mut self, c: usize) -> usize {
        if let Some(r) = self.radius[c] {
            return r;
        }
        let r = cut_radius(self.g, c, self.scale, &mut self.scratch);
        self.radius[c] = Some(r);
        r
    }

    /// The center `x` joins.
    fn assign(&mut self, x: usize) -> usize {
        let reach = self.reach();
        let near: Vec<(usize, usize)> =
            self.scratch.explore_dists(self.g, x, Some(reach)).collect();
        let mut best_cover: Option<(usize, u128, usize)> = None;
        let mut best_any: Option<(usize, u128, usize)> = None;
        for (y, d) in near {
            if !self.is_center(y) {
                continue;
            }
            self.measured.push(y);
            let cand = (d, self.keys[y], y);
            if best_any.is_none_or(|b| (cand.0, cand.1) < (b.0, b.1)) {
                best_any = Some(cand);
            }
            if d <= self.cut(y) && best_cover.is_none_or(|b| (cand.0, cand.1) < (b.0, b.1)) {
                best_cover = Some(cand);
            }
        }
        best_cover
            .or(best_any)
            .expect("every vertex has a center within 2R")
            .2
    }
}

/// A doubling partition with the data that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoublingPartition {
    pub partition: Partition,
    pub scale: usize,
    pub key_bits: usize,
    /// Centers in ascending vertex order.
    pub centers: Vec<usize>,
    pub center_of: Vec<usize>,
    pub cut_radius: HashMap<usize, usize>,
}

fn rotated_keys(lab: &Labeling, t: usize, offset: u128) -> Vec<u128> {
    let mask = key_mask(t);
    (0..lab.n())
        .map(|v| lab.prefix_value(v, t).wrapping_add(offset) & mask)
        .collect()
}

pub fn doubling_partition(g: &Graph, lab: &Labeling, scale: usize) -> Result<DoublingPartition> {
    partition_with_offset(g, lab, scale, 0)
}

/// Partition with keys shifted by `offset` modulo `2^t`. Rotation keeps
/// keys distinct, so every offset gives a valid center order.
pub(super) fn partition_with_offset(
    g: &Graph,
    lab: &Labeling,
    scale: usize,
    offset: u128,
) -> Result<DoublingPartition> {
    if scale == 0 {
        return Err(Error::Precondition("scale R must be at least 1".into()));
    }
    lab.check_graph(g)?;
    let t = checked_bits(lab.require_distinct(4 * scale)?)?;
    let keys = rotated_keys(lab, t, offset);

    // Greedy in key order realizes the same fixed point as the lazy rule.
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (keys[v], v));
    let mut is_center = vec![false; g.n()];
    let mut scratch = BallScratch::new(g.n());
    for &x in &order {
        let blocked = scratch
            .explore(g, x, Some(separation(scale)))
            .iter()
            .any(|&y| is_center[y]);
        is_center[x] = !blocked;
    }
    let centers: Vec<usize> = (0..g.n()).filter(|&v| is_center[v]).collect();
    let cut: HashMap<usize, usize> = centers
        .par_iter()
        .map_init(
            || BallScratch::new(g.n()),
            |s, &c| (c, cut_radius(g, c, scale, s)),
        )
        .collect();
    let center_of: Vec<usize> = (0..g.n())
        .into_par_iter()
        .map_init(
            || BallScratch::new(g.n()),
            |s, x| {
                let mut cover: Option<(usize, u128, usize)> = None;
                let mut any: Option<(usize, u128, usize)> = None;
                for (y, d) in s.explore_dists(g, x, Some(separation(scale))) {
                    if !is_center[y] {
                        continue;
                    }
                    let cand = (d, keys[y], y);
                    if any.is_none_or(|b| (cand.0, cand.1) < (b.0, b.1)) {
                        any = Some(cand);
                    }
                    if d <= cut[&y] && cover.is_none_or(|b| (cand.0, cand.1) < (b.0, b.1)) {
                        cover = Some(cand);
                    }
                }
                cover.or(any).expect("centers dominate within 2R").2
            },
        )
        .collect();
    Ok(DoublingPartition {
        partition: Partition::from_assignment(g, &center_of)?,
        scale,
        key_bits: t,
        centers,
        center_of,
        cut_radius: cut,
    })
}

/// Tile key per vertex: the first `tk` bits of the assigned center's label,
/// with `tk` from the distinct certificate at radius `16R − 1`.
pub fn partition_keys(g: &Graph, lab: &Labeling, scale: usize) -> Result<QLabeling<u128>> {
    let dp = doubling_partition(g, lab, scale)?;
    let tk = checked_bits(lab.require_distinct(tile_key_radius(scale))?)?;
    Ok(QLabeling(
        dp.center_of
            .iter()
            .map(|&c| lab.prefix_value(c, tk))
            .collect(),
    ))
}

/// The partition rule compiled into one oracle.
#[derive(Debug, Clone)]
pub struct PartitionOracle {
    pub oracle: Oracle<u128>,
    /// `K = 4R`.
    pub k: usize,
    pub scale: usize,
    /// Oracle radius `m`.
    pub radius: usize,
    /// Bits of the center order key.
    pub key_bits: usize,
    /// Bits of the emitted tile key.
    pub tile_key_bits: usize,
}

impl PartitionOracle {
    /// Zero-pads a labeling to the `m` bits the oracle reads.
    pub fn prepare(&self, lab: &Labeling) -> Labeling {
        lab.extended_to(self.radius)
    }
}

/// Distance from `x` at which the rule stops reading, measured by running
/// the lazy rule from `x` alone.
fn needed_radius(rule: &mut CenterRule<'_>, dist: &mut BallScratch, x: usize) -> usize {
    rule.reset();
    rule.assign(x);
    let g = rule.g;
    dist.explore(g, x, None);
    let reach = rule.reach();
    let read = rule
        .touched
        .iter()
        .map(|&u| dist.dist(u).expect("same component") + reach)
        .max()
        .unwrap_or(0);
    let cut = rule
        .measured
        .iter()
        .map(|&c| dist.dist(c).expect("same component") + 2 * rule.scale)
        .max()
        .unwrap_or(0);
    read.max(cut)
}

/// Compiles the partition rule at scale `R` into an oracle whose radius
/// covers every dependency chain occurring in `family`.
pub fn compile_partition_oracle(
    family: &[(&Graph, &Labeling)],
    scale: usize,
) -> Result<PartitionOracle> {
    if scale == 0 {
        return Err(Error::Precondition("scale R must be at least 1".into()));
    }
    let mut t = 1;
    let mut tk = 1;
    let mut m = 0;
    for &(g, lab) in family {
        lab.check_graph(g)?;
        t = t.max(checked_bits(lab.require_distinct(4 * scale)?)?);
        tk = tk.max(checked_bits(lab.require_distinct(tile_key_radius(scale))?)?);
    }
    for &(g, lab) in family {
        let keys = rotated_keys(lab, t, 0);
        let mut rule = CenterRule::new(g, &keys, scale);
        let mut dist = BallScratch::new(g.n());
        for x in 0..g.n() {
            m = m.max(needed_radius(&mut rule, &mut dist, x));
        }
    }
    let radius = m.max(t).max(tk);
    let oracle = Oracle::procedure(radius, move |canon| {
        let ball = &canon.ball;
        let bits_value = |v: usize, w: usize| {
            ball.label(v)[..w]
                .iter()
                .fold(0u128, |acc, &b| (acc << 1) | u128::from(b))
        };
        let keys: Vec<u128> = (0..ball.len()).map(|v| bits_value(v, t)).collect();
        let mut rule = CenterRule::new(ball.graph(), &keys, scale);
        let c = rule.assign(0);
        bits_value(c, tk)
    });
    Ok(PartitionOracle {
        oracle,
        k: 4 * scale,
        scale,
        radius,
        key_bits: t,
        tile_key_bits: tk,
    })
}

/// Pair with equal keys at distance strictly between `K` and `3K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapViolation {
    pub x: usize,
    pub y: usize,
    pub distance: usize,
}

/// Exhaustive check that equal keys force `d ≤ K` or `d ≥ 3K`; returns the
/// least violating pair.
pub fn gap_audit<Q: Eq + Sync>(g: &Graph, keys: &QLabeling<Q>, k: usize) -> Option<GapViolation> {
    (0..g.n())
        .into_par_iter()
        .map_init(
            || BallScratch::new(g.n()),
            |s, x| {
                s.explore_dists(g, x, Some((3 * k).saturating_sub(1)))
                    .filter(|&(y, d)| y > x && d > k && keys[y] == keys[x])
                    .min()
                    .map(|(y, d)| GapViolation { x, y, distance: d })
            },
        )
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .next()
}

/// Classes of `x ≡ y iff d(x, y) ≤ K and keys agree`, closed transitively.
pub fn oracle_partition<Q: Eq>(g: &Graph, keys: &QLabeling<Q>, k: usize) -> Result<Partition> {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut s = BallScratch::new(g.n());
    for x in 0..g.n() {
        let ys: Vec<usize> = s
            .explore(g, x, Some(k))
            .iter()
            .copied()
            .filter(|&y| y > x && keys[y] == keys[x])
            .collect();
        for y in ys {
            let (a, b) = (find(&mut parent, x), find(&mut parent, y));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let assign: Vec<usize> = (0..g.n()).map(|v| find(&mut parent, v)).collect();
    Partition::from_assignment(g, &assign)
}

/// One scale tried by [`epsilon_scale_search`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScaleAttempt {
    Ran {
        scale: usize,
        quality: PartitionQuality,
        tiles: usize,
        /// Every tile is a whole connected component.
        collapsed: bool,
    },
    /// The labeling could not be certified at `4R`.
    Uncertified { scale: usize, x: usize, y: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScaleSearch {
    Success {
        scale: usize,
        partition: DoublingPartition,
        quality: PartitionQuality,
        attempts: Vec<ScaleAttempt>,
    },
    Failure {
        /// Lowest `ε_achieved` over all attempts, with its scale.
        best: Option<(usize, Rational)>,
        attempts: Vec<ScaleAttempt>,
    },
}

impl ScaleSearch {
    pub fn succeeded(&self) -> bool {
        matches!(self, ScaleSearch::Success { .. })
    }
}

/// No cut edges and one tile per component.
fn collapsed(g: &Graph, p: &Partition) -> bool {
    p.len() == g.components().1 && g.edges().all(|(u, v)| p.tile_of(u) == p.tile_of(v))
}

/// Tries `R = 1, 2, 4, …` up to the diameter and returns the first scale
/// whose partition reaches `ε_achieved ≤ eps`. Missing certificates at `4R`
/// are computed and recorded on `lab`. Once `2R` reaches the diameter the
/// tiles are whole components and the search succeeds trivially; such
/// attempts are flagged as collapsed.
pub fn epsilon_scale_search(g: &Graph, lab: &mut Labeling, eps: Rational) -> Result<ScaleSearch> {
    if eps <= Rational::from(0) {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    let top = g.diameter().max(1);
    let mut attempts = Vec::new();
    let mut best: Option<(usize, Rational)> = None;
    let mut scale = 1;
    while scale <= top {
        if lab.distinct_bits(4 * scale).is_none() {
            if let crate::labeling::Certificate::Witness(x, y) =
                lab.certify_distinct(g, 4 * scale)?
            {
                attempts.push(ScaleAttempt::Uncertified { scale, x, y });
                scale *= 2;
                continue;
            }
        }
        let dp = doubling_partition(g, lab, scale)?;
        let quality = partition_quality(g, &dp.partition)?;
        attempts.push(ScaleAttempt::Ran {
            scale,
            quality: quality.clone(),
            tiles: dp.partition.len(),
            collapsed: collapsed(g, &dp.partition),
        });
        if quality.eps <= eps {
            return Ok(ScaleSearch::Success {
                scale,
                partition: dp,
                quality,
                attempts,
            });
        }
        if best.is_none_or(|b| quality.eps.cmp(&b.1) == Ordering::Less) {
            best = Some((scale, quality.eps));
        }
        scale *= 2;
    }
    Ok(ScaleSearch::Failure { best, attempts })
}
