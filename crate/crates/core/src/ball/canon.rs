//! Canonical forms of rooted, optionally labeled balls.
//!
//! Colour refinement seeded with (root distance, label, degree) followed by
//! an individualization search. The canonical code is the least leaf code
//! over the whole search tree; automorphisms discovered from equal leaves
//! prune sibling orbits and abandon subtrees that are images of explored
//! ones, so highly symmetric balls (tree balls, tori) stay cheap.

use std::cmp::Ordering;

use super::{CanonicalBall, CanonicalCode, LabelKind, RootedBall};
use crate::error::{Error, Result};

/// Limits for exact canonicalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonConfig {
    pub max_vertices: usize,
}

impl Default for CanonConfig {
    fn default() -> Self {
        CanonConfig { max_vertices: 200 }
    }
}

impl CanonConfig {
    pub fn with_cap(max_vertices: usize) -> Self {
        CanonConfig { max_vertices }
    }
}

pub fn canonicalize(ball: &RootedBall, cfg: &CanonConfig) -> Result<CanonicalCode> {
    Ok(canonical_form(ball, cfg)?.code)
}

/// Canonical code together with the ball relabeled into canonical order.
pub fn canonical_form(ball: &RootedBall, cfg: &CanonConfig) -> Result<CanonicalBall> {
    let n = ball.len();
    if n > cfg.max_vertices {
        return Err(Error::BallTooLarge {
            size: n,
            cap: cfg.max_vertices,
        });
    }
    let mut search = Search::new(ball);
    let start = search.initial_ranks();
    search.visit(start);
    let best = search.best.take().expect("search visits at least one leaf");
    let ball = ball.permuted(&best.pos);
    Ok(CanonicalBall {
        code: CanonicalCode {
            bytes: best.code,
            radius: ball.radius(),
            labeled: ball.kind() != LabelKind::Unlabeled,
        },
        ball,
    })
}

struct Leaf {
    code: Vec<u8>,
    /// `pos[v]` = canonical position of local vertex `v`.
    pos: Vec<usize>,
    path: Vec<usize>,
}

struct Search<'a> {
    ball: &'a RootedBall,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Vec<usize>>,
    path: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(ball: &'a RootedBall) -> Self {
        Search {
            ball,
            first: None,
            best: None,
            generators: Vec::new(),
            path: Vec::new(),
        }
    }

    fn adj(&self, v: usize) -> &[usize] {
        self.ball.graph().neighbors(v)
    }

    fn initial_ranks(&self) -> Vec<u32> {
        let n = self.ball.len();
        let dist = self.ball.root_distances();
        let mut idx: Vec<usize> = (0..n).collect();
        let key = |v: usize| (dist[v], self.ball.label(v), self.ball.graph().degree(v));
        idx.sort_by(|&a, &b| key(a).cmp(&key(b)));
        let mut ranks = vec![0u32; n];
        dense_ranks(&idx, &mut ranks, |a, b| key(a) == key(b));
        self.refine(&mut ranks);
        ranks
    }

    /// Equitable refinement: split cells by the multiset of neighbor cells
    /// until the number of cells is stable. Cell order is preserved, so a
    /// vertex never leaves the position interval of its cell.
    fn refine(&self, ranks: &mut [u32]) {
        let n = ranks.len();
        let mut cells = count_cells(ranks);
        let mut sig: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut idx: Vec<usize> = (0..n).collect();
        while cells < n {
            for (v, s) in sig.iter_mut().enumerate() {
                s.clear();
                s.extend(self.adj(v).iter().map(|&w| ranks[w]));
                s.sort_unstable();
            }
            idx.sort_by(|&a, &b| ranks[a].cmp(&ranks[b]).then_with(|| sig[a].cmp(&sig[b])));
            let old = ranks.to_vec();
            dense_ranks(&idx, ranks, |a, b| old[a] == old[b] && sig[a] == sig[b]);
            let now = count_cells(ranks);
            if now == cells {
                break;
            }
            cells = now;
        }
    }

    fn individualize(&self, ranks: &[u32], v: usize) -> Vec<u32> {
        let n = ranks.len();
        let cell = ranks[v];
        let key = |u: usize| (ranks[u], u32::from(ranks[u] == cell && u != v));
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by_key(|&u| key(u));
        let mut out = vec![0u32; n];
        dense_ranks(&idx, &mut out, |a, b| key(a) == key(b));
        self.refine(&mut out);
        out
    }

    /// Returns `Some(level)` to abandon the search back to the node at
    /// `level`, which then continues with its next child.
    fn visit(&mut self, ranks: Vec<u32>) -> Option<usize> {
        let level = self.path.len();
        let n = ranks.len();
        if count_cells(&ranks) == n {
            return self.leaf(&ranks);
        }
        let target = target_cell(&ranks);
        let cell: Vec<usize> = (0..n).filter(|&v| ranks[v] == target).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.same_orbit_as_any(v, &explored) {
                continue;
            }
            explored.push(v);
            let child = self.individualize(&ranks, v);
            self.path.push(v);
            let jump = self.visit(child);
            self.path.pop();
            if let Some(j) = jump {
                if j < level {
                    return Some(j);
                }
            }
        }
        None
    }

    fn leaf(&mut self, ranks: &[u32]) -> Option<usize> {
        let pos: Vec<usize> = ranks.iter().map(|&r| r as usize).collect();
        let code = leaf_code(self.ball, &pos);
        let leaf = Leaf {
            code,
            pos,
            path: self.path.clone(),
        };
        let Some(first) = &self.first else {
            self.best = Some(Leaf {
                code: leaf.code.clone(),
                pos: leaf.pos.clone(),
                path: leaf.path.clone(),
            });
            self.first = Some(leaf);
            return None;
        };
        if first.code == leaf.code {
            let gamma = automorphism(&first.pos, &leaf.pos);
            let j = common_prefix(&first.path, &leaf.path);
            self.generators.push(gamma);
            return Some(j);
        }
        let best = self.best.as_ref().expect("best is set with first");
        match leaf.code.cmp(&best.code) {
            Ordering::Equal => {
                let gamma = automorphism(&best.pos, &leaf.pos);
                let j = common_prefix(&best.path, &leaf.path);
                self.generators.push(gamma);
                Some(j)
            }
            Ordering::Less => {
                self.best = Some(leaf);
                None
            }
            Ordering::Greater => None,
        }
    }

    /// Orbit test under the group generated by known automorphisms that fix
    /// the current path pointwise.
    fn same_orbit_as_any(&self, v: usize, explored: &[usize]) -> bool {
        let stab: Vec<&Vec<usize>> = self
            .generators
            .iter()
            .filter(|g| self.path.iter().all(|&p| g[p] == p))
            .collect();
        if stab.is_empty() {
            return false;
        }
        let n = self.ball.len();
        let mut uf = UnionFind::new(n);
        for g in &stab {
            for (x, &y) in g.iter().enumerate() {
                uf.union(x, y);
            }
        }
        let rv = uf.find(v);
        explored.iter().any(|&w| uf.find(w) == rv)
    }
}

/// Ranks are cell start positions, so cells = distinct rank values.
fn count_cells(ranks: &[u32]) -> usize {
    let mut seen = vec![false; ranks.len()];
    let mut cells = 0;
    for &r in ranks {
        if !std::mem::replace(&mut seen[r as usize], true) {
            cells += 1;
        }
    }
    cells
}

/// Lowest-ranked cell with more than one vertex.
fn target_cell(ranks: &[u32]) -> u32 {
    let mut counts = vec![0u32; ranks.len()];
    for &r in ranks {
        counts[r as usize] += 1;
    }
    counts
        .iter()
        .position(|&c| c > 1)
        .expect("non-discrete partition has a non-singleton cell") as u32
}

/// Assigns ranks so that each cell occupies the position interval of its
/// members in `sorted`: rank = index of the first member.
fn dense_ranks(sorted: &[usize], ranks: &mut [u32], same: impl Fn(usize, usize) -> bool) {
    let mut start = 0;
    for i in 0..sorted.len() {
        if i > 0 && !same(sorted[i - 1], sorted[i]) {
            start = i;
        }
        ranks[sorted[i]] = start as u32;
    }
}

fn automorphism(from: &[usize], to: &[usize]) -> Vec<usize> {
    let n = from.len();
    let mut at = vec![0usize; n];
    for (v, &p) in to.iter().enumerate() {
        at[p] = v;
    }
    (0..n).map(|v| at[from[v]]).collect()
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

const CODE_VERSION: u8 = 1;

/// Serializes the ball under the vertex order `pos`.
fn leaf_code(ball: &RootedBall, pos: &[usize]) -> Vec<u8> {
    let n = ball.len();
    let g = ball.graph();
    let mut at = vec![0usize; n];
    for (v, &p) in pos.iter().enumerate() {
        at[p] = v;
    }
    let mut out = Vec::with_capacity(8 + n * 4 + g.edge_count() * 8);
    out.push(CODE_VERSION);
    out.push(ball.kind() as u8);
    out.extend_from_slice(&(ball.radius() as u32).to_be_bytes());
    out.extend_from_slice(&(n as u32).to_be_bytes());
    if ball.kind() != LabelKind::Unlabeled {
        for &v in &at {
            let l = ball.label(v);
            out.extend_from_slice(&(l.len() as u16).to_be_bytes());
            out.extend_from_slice(l);
        }
    }
    let mut row: Vec<u32> = Vec::new();
    for &v in &at {
        row.clear();
        row.extend(g.neighbors(v).iter().map(|&w| pos[w] as u32));
        row.sort_unstable();
        out.extend_from_slice(&(row.len() as u16).to_be_bytes());
        for &w in &row {
            out.extend_from_slice(&w.to_be_bytes());
        }
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
