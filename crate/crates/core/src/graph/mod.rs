//! Finite simple graphs of bounded degree.
//!
//! Vertices are `0..n`; neighbor lists are sorted and symmetric. Graphs are
//! immutable once built, so every query here is a pure function and may be
//! shared across threads.

mod generate;
mod io;
mod metric;

pub use generate::{generate, Family};
pub use io::{parse_edge_list, write_edge_list};
pub use metric::{
    ball, boundary, distance, doubling_constant, doubling_constant_default, eccentricity,
    iso_constant, Ball, BallScratch, Distance, GrowthProfile,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    degree_bound: usize,
}

impl Graph {
    /// Builds a graph without a global degree cap.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::with_degree_cap(n, edges, usize::MAX)
    }

    /// Builds a graph, rejecting loops, duplicate edges and any vertex whose
    /// degree exceeds `cap`.
    pub fn with_degree_cap(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        cap: usize,
    ) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut degree_bound = 0;
        for (x, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge(x.min(w[0]), x.max(w[0])));
            }
            if list.len() > cap {
                return Err(Error::DegreeOverflow {
                    vertex: x,
                    degree: list.len(),
                    bound: cap,
                });
            }
            degree_bound = degree_bound.max(list.len());
        }
        Ok(Graph { adj, degree_bound })
    }

    pub fn edgeless(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            degree_bound: 0,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    #[inline]
    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adj[x]
    }

    #[inline]
    pub fn degree(&self, x: usize) -> usize {
        self.adj[x].len()
    }

    /// Maximum vertex degree.
    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Subgraph induced on `vertices`; local vertex `i` is `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut local = std::collections::HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            local.insert(v, i);
        }
        let mut degree_bound = 0;
        let adj: Vec<Vec<usize>> = vertices
            .iter()
            .map(|&v| {
                let mut list: Vec<usize> = self.adj[v]
                    .iter()
                    .filter_map(|w| local.get(w).copied())
                    .collect();
                list.sort_unstable();
                degree_bound = degree_bound.max(list.len());
                list
            })
            .collect();
        Graph { adj, degree_bound }
    }

    /// Renames vertex `x` to `perm[x]`.
    pub fn relabeled(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n());
        let mut adj = vec![Vec::new(); self.n()];
        for (x, list) in self.adj.iter().enumerate() {
            let mut mapped: Vec<usize> = list.iter().map(|&y| perm[y]).collect();
            mapped.sort_unstable();
            adj[perm[x]] = mapped;
        }
        Graph {
            adj,
            degree_bound: self.degree_bound,
        }
    }

    /// Vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n();
        let mut adj = self.adj.clone();
        adj.extend(
            other
                .adj
                .iter()
                .map(|list| list.iter().map(|&v| v + shift).collect()),
        );
        Graph {
            adj,
            degree_bound: self.degree_bound.max(other.degree_bound),
        }
    }

    /// Connected component id per vertex (ids in order of least vertex) and
    /// the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &y in &self.adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_forest(&self) -> bool {
        let (_, c) = self.components();
        self.edge_count() + c == self.n()
    }

    /// Largest finite distance in the graph (0 for the empty graph).
    pub fn diameter(&self) -> usize {
        let mut scratch = BallScratch::new(self.n());
        (0..self.n())
            .map(|x| scratch.eccentricity(self, x))
            .max()
            .unwrap_or(0)
    }
}

/// Membership bitmap over `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    bits: Vec<bool>,
    len: usize,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet {
            bits: vec![false; n],
            len: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        VertexSet {
            bits: vec![true; n],
            len: n,
        }
    }

    pub fn from_vertices(n: usize, vertices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(n);
        for v in vertices {
            set.insert(v);
        }
        set
    }

    pub fn insert(&mut self, v: usize) -> bool {
        if self.bits[v] {
            false
        } else {
            self.bits[v] = true;
            self.len += 1;
            true
        }
    }

    pub fn remove(&mut self, v: usize) -> bool {
        if self.bits[v] {
            self.bits[v] = false;
            self.len -= 1;
            true
        } else {
            false
        }
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.bits.get(v).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Size of the ambient vertex range.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(v, &b)| b.then_some(v))
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }
}
