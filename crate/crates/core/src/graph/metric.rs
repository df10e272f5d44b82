use std::fmt;

use super::{Graph, VertexSet};
use crate::error::{Error, Result};
use crate::Rational;

/// Shortest-path distance; `Infinite` between different components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// Reusable BFS buffers. Stamping avoids clearing `O(n)` state between
/// calls, which matters when every vertex explores a small ball.
#[derive(Debug, Clone)]
pub struct BallScratch {
    dist: Vec<usize>,
    stamp: Vec<u32>,
    current: u32,
    order: Vec<usize>,
}

impl BallScratch {
    pub fn new(n: usize) -> Self {
        BallScratch {
            dist: vec![0; n],
            stamp: vec![0; n],
            current: 0,
            order: Vec::new(),
        }
    }

    fn next_stamp(&mut self, n: usize) {
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
            self.dist.resize(n, 0);
        }
        self.current = self.current.wrapping_add(1);
        if self.current == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.current = 1;
        }
    }

    /// Runs BFS from `x` up to radius `r` (`None` = unbounded) and returns the
    /// reached vertices in BFS order. Distances are available through
    /// [`BallScratch::dist`] until the next call.
    pub fn explore(&mut self, g: &Graph, x: usize, r: Option<usize>) -> &[usize] {
        self.next_stamp(g.n());
        self.order.clear();
        self.stamp[x] = self.current;
        self.dist[x] = 0;
        self.order.push(x);
        let mut head = 0;
        while head < self.order.len() {
            let v = self.order[head];
            head += 1;
            let dv = self.dist[v];
            if r.is_some_and(|r| dv >= r) {
                continue;
            }
            for &w in g.neighbors(v) {
                if self.stamp[w] != self.current {
                    self.stamp[w] = self.current;
                    self.dist[w] = dv + 1;
                    self.order.push(w);
                }
            }
        }
        &self.order
    }

    /// Like [`BallScratch::explore`], yielding `(vertex, distance)` pairs.
    pub fn explore_dists(
        &mut self,
        g: &Graph,
        x: usize,
        r: Option<usize>,
    ) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.explore(g, x, r);
        let this = &*self;
        this.order.iter().map(move |&v| (v, this.dist[v]))
    }

    /// Distance of `v` from the last explored root, if reached.
    #[inline]
    pub fn dist(&self, v: usize) -> Option<usize> {
        (self.stamp.get(v) == Some(&self.current)).then(|| self.dist[v])
    }

    pub fn eccentricity(&mut self, g: &Graph, x: usize) -> usize {
        self.explore(g, x, None);
        self.order.iter().map(|&v| self.dist[v]).max().unwrap_or(0)
    }
}

/// The ball `B_r(g, x)` with all induced edges. Local vertex 0 is the root;
/// local vertices are listed in BFS order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub vertices: Vec<usize>,
    pub dist: Vec<usize>,
    pub graph: Graph,
    pub radius: usize,
}

impl Ball {
    pub fn root(&self) -> usize {
        self.vertices[0]
    }

    pub fn vertex_set(&self, n: usize) -> VertexSet {
        VertexSet::from_vertices(n, self.vertices.iter().copied())
    }
}

pub fn ball(g: &Graph, x: usize, r: usize) -> Ball {
    let mut scratch = BallScratch::new(g.n());
    let vertices = scratch.explore(g, x, Some(r)).to_vec();
    let dist = vertices.iter().map(|&v| scratch.dist[v]).collect();
    let graph = g.induced(&vertices);
    Ball {
        vertices,
        dist,
        graph,
        radius: r,
    }
}

pub fn distance(g: &Graph, x: usize, y: usize) -> Distance {
    if x == y {
        return Distance::Finite(0);
    }
    let mut scratch = BallScratch::new(g.n());
    scratch.explore(g, x, None);
    scratch.dist(y).map_or(Distance::Infinite, Distance::Finite)
}

pub fn eccentricity(g: &Graph, x: usize) -> usize {
    BallScratch::new(g.n()).eccentricity(g, x)
}

/// Inner vertex boundary: members of `h` with a neighbor outside `h`.
pub fn boundary(g: &Graph, h: &VertexSet) -> VertexSet {
    let mut out = VertexSet::empty(g.n());
    for x in h.iter() {
        if g.neighbors(x).iter().any(|&y| !h.contains(y)) {
            out.insert(x);
        }
    }
    out
}

/// `|∂(H)| / |H|`, exact.
pub fn iso_constant(g: &Graph, h: &VertexSet) -> Result<Rational> {
    if h.is_empty() {
        return Err(Error::EmptySet);
    }
    let b = boundary(g, h).len();
    Ok(Rational::new(b as i64, h.len() as i64))
}

/// Ball sizes `|B_s(g, x)|` for `s = 0..=s_max` at every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthProfile {
    s_max: usize,
    sizes: Vec<Vec<usize>>,
}

impl GrowthProfile {
    pub fn compute(g: &Graph, s_max: usize) -> Self {
        let mut scratch = BallScratch::new(g.n());
        let sizes = (0..g.n())
            .map(|x| {
                let mut counts = vec![0usize; s_max + 1];
                let reached = scratch.explore(g, x, Some(s_max)).to_vec();
                for v in reached {
                    counts[scratch.dist[v]] += 1;
                }
                for s in 1..=s_max {
                    counts[s] += counts[s - 1];
                }
                counts
            })
            .collect();
        GrowthProfile { s_max, sizes }
    }

    pub fn s_max(&self) -> usize {
        self.s_max
    }

    pub fn size(&self, x: usize, s: usize) -> usize {
        self.sizes[x][s]
    }

    pub fn sizes(&self, x: usize) -> &[usize] {
        &self.sizes[x]
    }
}

/// Smallest integer `D` with `|B_{2s}(x)| <= D |B_s(x)|` for every vertex and
/// every `1 <= s <= s_max`. Returns 1 for the empty graph.
pub fn doubling_constant(g: &Graph, s_max: usize) -> usize {
    let s_max = s_max.max(1);
    let profile = GrowthProfile::compute(g, 2 * s_max);
    let mut d = 1;
    for x in 0..g.n() {
        for s in 1..=s_max {
            let big = profile.size(x, 2 * s);
            let small = profile.size(x, s);
            d = d.max(big.div_ceil(small));
        }
    }
    d
}

/// [`doubling_constant`] with `s_max = ⌈diameter / 2⌉` (at least 1).
pub fn doubling_constant_default(g: &Graph) -> usize {
    doubling_constant(g, g.diameter().div_ceil(2).max(1))
}
