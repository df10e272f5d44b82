//! Exact maximum independent sets for small graphs and the tile-local
//! approximation built on a partition.

use rayon::prelude::*;

use super::Partition;
use crate::error::{Error, Result};
use crate::graph::{generate, Family, Graph, VertexSet};
use crate::local::{independence_verifier, QLabeling, Verifier};

pub const DEFAULT_MIS_CAP: usize = 40;

/// Bitset width of the branch-and-bound solver.
const WORD: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MisSolution {
    pub size: usize,
    /// Sorted witness set.
    pub set: Vec<usize>,
}

pub fn exact_mis(g: &Graph) -> Result<MisSolution> {
    exact_mis_with(g, DEFAULT_MIS_CAP)
}

/// Exact solver. Generated grids use a column DP; components that are
/// paths or cycles are solved in closed form; every other component must
/// have at most `cap` vertices.
pub fn exact_mis_with(g: &Graph, cap: usize) -> Result<MisSolution> {
    if let Some((w, h)) = as_grid(g) {
        if w.min(h) <= 20 {
            return grid_mis(w, h);
        }
    }
    let (comp, count) = g.components();
    let mut members = vec![Vec::new(); count];
    for v in 0..g.n() {
        members[comp[v]].push(v);
    }
    let mut set = Vec::new();
    for vs in &members {
        let sub = g.induced(vs);
        let local = if let Some(order) = path_or_cycle(&sub) {
            alternate(&sub, &order)
        } else if vs.len() <= cap.min(WORD) {
            branch_and_bound(&sub)
        } else {
            return Err(Error::CapExceeded {
                size: vs.len(),
                cap: cap.min(WORD),
            });
        };
        set.extend(local.into_iter().map(|i| vs[i]));
    }
    set.sort_unstable();
    Ok(MisSolution {
        size: set.len(),
        set,
    })
}

/// `(width, height)` if `g` is exactly a generated grid.
fn as_grid(g: &Graph) -> Option<(usize, usize)> {
    let n = g.n();
    (2..=n).filter(|&w| n.is_multiple_of(w)).find_map(|w| {
        let h = n / w;
        let edges = (w - 1) * h + w * (h - 1);
        (h >= 2 && g.edge_count() == edges && *g == generate(&Family::Grid(w, h)).ok()?)
            .then_some((w, h))
    })
}

/// Vertex order along a connected path or cycle, starting at an endpoint.
fn path_or_cycle(g: &Graph) -> Option<Vec<usize>> {
    let n = g.n();
    if n == 0 || (0..n).any(|v| g.degree(v) > 2) {
        return None;
    }
    if g.edge_count() + 1 != n && !(g.edge_count() == n && n >= 3) {
        return None;
    }
    let start = (0..n).find(|&v| g.degree(v) < 2).unwrap_or(0);
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while let Some(&next) = g.neighbors(cur).iter().find(|&&w| w != prev && w != start) {
        if order.len() == n {
            break;
        }
        order.push(next);
        prev = cur;
        cur = next;
    }
    (order.len() == n).then_some(order)
}

/// Every other vertex along `order`, dropping the last one if it closes a
/// cycle onto the first.
fn alternate(g: &Graph, order: &[usize]) -> Vec<usize> {
    let mut pick: Vec<usize> = order.iter().step_by(2).copied().collect();
    if pick.len() > 1 && g.has_edge(pick[0], *pick.last().expect("nonempty")) {
        pick.pop();
    }
    pick
}

fn bit(v: usize) -> u128 {
    1u128 << v
}

fn branch_and_bound(g: &Graph) -> Vec<usize> {
    let n = g.n();
    assert!(n <= WORD);
    let adj: Vec<u128> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u128, |m, &w| m | bit(w)))
        .collect();
    let mut s = Bnb {
        adj: &adj,
        best: 0,
        best_size: 0,
    };
    let all = if n == WORD { u128::MAX } else { bit(n) - 1 };
    s.search(all, 0, 0);
    (0..n).filter(|&v| s.best & bit(v) != 0).collect()
}

struct Bnb<'a> {
    adj: &'a [u128],
    best: u128,
    best_size: u32,
}

impl Bnb<'_> {
    fn search(&mut self, mut cand: u128, mut chosen: u128, mut size: u32) {
        // vertices of degree 0 or 1 belong to some maximum set
        loop {
            let mut changed = false;
            let mut c = cand;
            while c != 0 {
                let v = c.trailing_zeros() as usize;
                c &= c - 1;
                if cand & bit(v) != 0 && (self.adj[v] & cand).count_ones() <= 1 {
                    chosen |= bit(v);
                    size += 1;
                    cand &= !(self.adj[v] | bit(v));
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if cand == 0 {
            if size > self.best_size || self.best_size == 0 && size == 0 {
                self.best = chosen;
                self.best_size = size;
            }
            return;
        }
        if size + self.matching_bound(cand) <= self.best_size {
            return;
        }
        let mut v = 0;
        let mut deg = 0;
        let mut c = cand;
        while c != 0 {
            let u = c.trailing_zeros() as usize;
            c &= c - 1;
            let du = (self.adj[u] & cand).count_ones();
            if du > deg {
                deg = du;
                v = u;
            }
        }
        self.search(cand & !(self.adj[v] | bit(v)), chosen | bit(v), size + 1);
        self.search(cand & !bit(v), chosen, size);
    }

    /// An independent set takes at most one end of each matched edge.
    fn matching_bound(&self, cand: u128) -> u32 {
        let mut c = cand;
        let mut matched = 0;
        while c != 0 {
            let v = c.trailing_zeros() as usize;
            c &= !bit(v);
            let free = self.adj[v] & c;
            if free != 0 {
                c &= !bit(free.trailing_zeros() as usize);
                matched += 1;
            }
        }
        cand.count_ones() - matched
    }
}

/// Column DP over a `width × height` grid with vertex `r * width + c`.
pub fn grid_mis(width: usize, height: usize) -> Result<MisSolution> {
    if width == 0 || height == 0 {
        return Ok(MisSolution {
            size: 0,
            set: Vec::new(),
        });
    }
    // scan along the longer side; states are independent subsets of a line
    let transpose = height > width;
    let (lines, len) = if transpose {
        (height, width)
    } else {
        (width, height)
    };
    if len > 20 {
        return Err(Error::CapExceeded { size: len, cap: 20 });
    }
    let masks: Vec<u32> = (0..1u32 << len).filter(|m| m & (m >> 1) == 0).collect();
    let mut score: Vec<u32> = masks.iter().map(|m| m.count_ones()).collect();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(lines);
    back.push(vec![usize::MAX; masks.len()]);
    for _ in 1..lines {
        let mut next = vec![0u32; masks.len()];
        let mut from = vec![0usize; masks.len()];
        for (j, &b) in masks.iter().enumerate() {
            let (i, s) = masks
                .iter()
                .enumerate()
                .filter(|(_, &a)| a & b == 0)
                .map(|(i, _)| (i, score[i]))
                .max_by_key(|&(i, s)| (s, std::cmp::Reverse(i)))
                .expect("empty mask is compatible");
            next[j] = s + b.count_ones();
            from[j] = i;
        }
        score = next;
        back.push(from);
    }
    let (mut j, &best) = score
        .iter()
        .enumerate()
        .max_by_key(|&(j, s)| (*s, std::cmp::Reverse(j)))
        .expect("at least the empty mask");
    let mut set = Vec::new();
    for line in (0..lines).rev() {
        for k in 0..len {
            if masks[j] & (1 << k) != 0 {
                // line is a column of length `height` unless transposed
                let (r, c) = if transpose { (line, k) } else { (k, line) };
                set.push(r * width + c);
            }
        }
        j = back[line][j];
    }
    set.sort_unstable();
    debug_assert_eq!(set.len(), best as usize);
    Ok(MisSolution {
        size: set.len(),
        set,
    })
}

/// Output of [`approx_mis`].
#[derive(Debug, Clone)]
pub struct MisRun {
    pub set: VertexSet,
    /// `0` for members, `1` otherwise.
    pub labels: QLabeling<u8>,
    pub verifier: Verifier<u8>,
    /// `Σ_tiles I(interior)`, equal to the set size.
    pub certificate: usize,
    pub per_tile: Vec<usize>,
}

/// Union over tiles of an exact maximum independent set of the tile
/// interior `L ∖ ∂(L)`.
pub fn approx_mis(g: &Graph, p: &Partition) -> Result<MisRun> {
    if p.n() != g.n() {
        return Err(Error::InvalidPartition(
            "partition is for another graph".into(),
        ));
    }
    let solved: Vec<Vec<usize>> = p
        .tiles()
        .par_iter()
        .map(|tile| {
            let interior: Vec<usize> = tile
                .vertices
                .iter()
                .copied()
                .filter(|&v| p.is_interior(g, v))
                .collect();
            let sol = exact_mis_with(&g.induced(&interior), WORD)?;
            Ok(sol.set.into_iter().map(|i| interior[i]).collect())
        })
        .collect::<Result<_>>()?;
    let per_tile: Vec<usize> = solved.iter().map(Vec::len).collect();
    let set = VertexSet::from_vertices(g.n(), solved.into_iter().flatten());
    if let Some(v) = set
        .iter()
        .find(|&v| g.neighbors(v).iter().any(|&w| set.contains(w)))
    {
        return Err(Error::InvalidPartition(format!(
            "interiors of different tiles touch at vertex {v}"
        )));
    }
    let labels = QLabeling((0..g.n()).map(|v| u8::from(!set.contains(v))).collect());
    Ok(MisRun {
        certificate: set.len(),
        set,
        labels,
        verifier: independence_verifier(),
        per_tile,
    })
}
