//! Families of `Q` partitions in which every vertex is interior often.

use super::doubling::partition_with_offset;
use super::{partition_quality, Partition};
use crate::error::{Error, Result};
use crate::graph::{BallScratch, Distance, Graph};
use crate::labeling::Labeling;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FractionalStrategy {
    /// `Q` doubling partitions at scale `R`, run `n` rotating the center
    /// keys by `n · ⌊2^t / Q⌋`.
    Rotation { scale: usize },
    /// Forests only: level slabs of thickness `K` below a root per
    /// component, run `n` shifting slab boundaries up by `⌊nK/Q⌋` levels.
    Slabs { k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPartition {
    pub partitions: Vec<Partition>,
    /// Largest tile diameter over all members.
    pub k: Distance,
    /// Per vertex, the number of members in which it is interior.
    pub interior_counts: Vec<usize>,
    /// `min_x interior_counts[x] / Q`.
    pub p_achieved: Rational,
}

impl MultiPartition {
    pub fn q(&self) -> usize {
        self.partitions.len()
    }
}

pub fn fractional_partitions(
    g: &Graph,
    lab: &Labeling,
    q: usize,
    strategy: FractionalStrategy,
) -> Result<MultiPartition> {
    if q == 0 {
        return Err(Error::Precondition("Q must be at least 1".into()));
    }
    let partitions = match strategy {
        FractionalStrategy::Rotation { scale } => {
            let t = lab.require_distinct(4 * scale)?.min(128);
            let step = if t >= 128 {
                u128::MAX / q as u128
            } else {
                (1u128 << t) / q as u128
            };
            (0..q)
                .map(|n| Ok(partition_with_offset(g, lab, scale, step * n as u128)?.partition))
                .collect::<Result<Vec<_>>>()?
        }
        FractionalStrategy::Slabs { k } => {
            if k == 0 {
                return Err(Error::Precondition(
                    "slab thickness K must be at least 1".into(),
                ));
            }
            if !g.is_forest() {
                return Err(Error::Precondition("slab strategy needs a forest".into()));
            }
            let depth = forest_depths(g);
            (0..q)
                .map(|n| slab_partition(g, &depth, k, n * k / q))
                .collect::<Result<Vec<_>>>()?
        }
    };
    let mut k = Distance::Finite(0);
    let mut interior_counts = vec![0usize; g.n()];
    for p in &partitions {
        k = k.max(partition_quality(g, p)?.k);
        for (v, c) in interior_counts.iter_mut().enumerate() {
            *c += usize::from(p.is_interior(g, v));
        }
    }
    let least = interior_counts.iter().copied().min().unwrap_or(q);
    Ok(MultiPartition {
        partitions,
        k,
        interior_counts,
        p_achieved: Rational::new(least as i64, q as i64),
    })
}

/// Depth below the least vertex of each component.
fn forest_depths(g: &Graph) -> Vec<usize> {
    let mut depth = vec![usize::MAX; g.n()];
    let mut s = BallScratch::new(g.n());
    for root in 0..g.n() {
        if depth[root] != usize::MAX {
            continue;
        }
        for (v, d) in s.explore_dists(g, root, None) {
            depth[v] = d;
        }
    }
    depth
}

/// Components of the slabs `⌊(depth + shift) / K⌋`.
fn slab_partition(g: &Graph, depth: &[usize], k: usize, shift: usize) -> Result<Partition> {
    let slab: Vec<usize> = depth.iter().map(|&d| (d + shift) / k).collect();
    let inside = Graph::new(g.n(), g.edges().filter(|&(u, v)| slab[u] == slab[v]))?;
    Partition::from_assignment(g, &inside.components().0)
}
