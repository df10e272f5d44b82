//! Vertex partitions with bounded-diameter tiles, their quality, and the
//! constructions built on them.

mod doubling;
mod fractional;
mod mis;

pub use doubling::{
    compile_partition_oracle, doubling_partition, epsilon_scale_search, gap_audit,
    oracle_partition, partition_keys, DoublingPartition, GapViolation, PartitionOracle,
    ScaleAttempt, ScaleSearch,
};
pub use fractional::{fractional_partitions, FractionalStrategy, MultiPartition};
pub use mis::{
    approx_mis, exact_mis, exact_mis_with, grid_mis, MisRun, MisSolution, DEFAULT_MIS_CAP,
};

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{BallScratch, Distance, Graph};
use crate::{ratio_string, Rational};

/// One tile with its cached statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tile {
    pub vertices: Vec<usize>,
    /// Largest distance in `G` between two members.
    pub diameter: Distance,
    /// Size of the inner boundary `∂(L)`.
    pub boundary: usize,
    pub iso: Rational,
}

/// Tiles are numbered in order of their least vertex, so two partitions
/// with the same tiles compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    tile_of: Vec<usize>,
    tiles: Vec<Tile>,
}

impl Partition {
    /// Builds a partition from any per-vertex tile id.
    pub fn from_assignment(g: &Graph, assign: &[usize]) -> Result<Partition> {
        if assign.len() != g.n() {
            return Err(Error::InvalidPartition(format!(
                "assignment covers {} vertices, graph has {}",
                assign.len(),
                g.n()
            )));
        }
        let mut renumber = HashMap::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        let tile_of: Vec<usize> = assign
            .iter()
            .enumerate()
            .map(|(v, a)| {
                let id = *renumber.entry(*a).or_insert_with(|| {
                    members.push(Vec::new());
                    members.len() - 1
                });
                members[id].push(v);
                id
            })
            .collect();
        let tiles = members
            .into_par_iter()
            .map_init(
                || BallScratch::new(g.n()),
                |s, vs| tile_stats(g, &tile_of, vs, s),
            )
            .collect();
        Ok(Partition { tile_of, tiles })
    }

    pub fn from_tiles(g: &Graph, tiles: &[Vec<usize>]) -> Result<Partition> {
        let mut assign = vec![usize::MAX; g.n()];
        for (i, t) in tiles.iter().enumerate() {
            for &v in t {
                if v >= g.n() {
                    return Err(Error::VertexOutOfRange {
                        vertex: v,
                        n: g.n(),
                    });
                }
                if assign[v] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("vertex {v} in two tiles")));
                }
                assign[v] = i;
            }
        }
        if let Some(v) = assign.iter().position(|&a| a == usize::MAX) {
            return Err(Error::InvalidPartition(format!("vertex {v} in no tile")));
        }
        Partition::from_assignment(g, &assign)
    }

    /// The whole vertex set as one tile.
    pub fn trivial(g: &Graph) -> Partition {
        Partition::from_assignment(g, &vec![0; g.n()]).expect("sizes match")
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn n(&self) -> usize {
        self.tile_of.len()
    }

    pub fn tile_of(&self, v: usize) -> usize {
        self.tile_of[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.tile_of
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn max_tile_size(&self) -> usize {
        self.tiles
            .iter()
            .map(|t| t.vertices.len())
            .max()
            .unwrap_or(0)
    }

    /// Whether `v` has no neighbor outside its tile.
    pub fn is_interior(&self, g: &Graph, v: usize) -> bool {
        let t = self.tile_of[v];
        g.neighbors(v).iter().all(|&w| self.tile_of[w] == t)
    }

    /// One `vertex_id tile_id` line per vertex.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, t) in self.tile_of.iter().enumerate() {
            let _ = writeln!(out, "{v} {t}");
        }
        out
    }
}

fn tile_stats(
    g: &Graph,
    tile_of: &[usize],
    vertices: Vec<usize>,
    scratch: &mut BallScratch,
) -> Tile {
    let id = tile_of[vertices[0]];
    let boundary = vertices
        .iter()
        .filter(|&&v| g.neighbors(v).iter().any(|&w| tile_of[w] != id))
        .count();
    let mut diameter = Distance::Finite(0);
    for &u in &vertices {
        scratch.explore(g, u, None);
        for &w in &vertices {
            let d = scratch.dist(w).map_or(Distance::Infinite, Distance::Finite);
            diameter = diameter.max(d);
        }
        if diameter == Distance::Infinite {
            break;
        }
    }
    let iso = Rational::new(boundary as i64, vertices.len() as i64);
    Tile {
        vertices,
        diameter,
        boundary,
        iso,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionQuality {
    /// Largest tile diameter.
    pub k: Distance,
    /// Largest tile isoperimetric constant.
    pub eps: Rational,
    /// `|∪ ∂(L_i)| / n`.
    pub boundary_fraction: Rational,
}

impl PartitionQuality {
    pub fn to_json(&self, cut_size: Option<usize>) -> Value {
        let k = match self.k {
            Distance::Finite(k) => json!(k),
            Distance::Infinite => json!("inf"),
        };
        let mut out = json!({
            "K": k,
            "eps_achieved": ratio_string(&self.eps),
            "boundary_fraction": ratio_string(&self.boundary_fraction),
        });
        if let Some(c) = cut_size {
            out["cut_size"] = json!(c);
        }
        out
    }
}

/// Recomputes every tile statistic from scratch and checks the cache.
pub fn partition_quality(g: &Graph, p: &Partition) -> Result<PartitionQuality> {
    if p.n() != g.n() {
        return Err(Error::InvalidPartition(
            "partition is for another graph".into(),
        ));
    }
    let fresh = Partition::from_assignment(g, &p.tile_of)?;
    if fresh != *p {
        return Err(Error::InvalidPartition(
            "cached tile statistics are stale".into(),
        ));
    }
    let k = fresh
        .tiles
        .iter()
        .map(|t| t.diameter)
        .max()
        .unwrap_or(Distance::Finite(0));
    let eps = fresh
        .tiles
        .iter()
        .map(|t| t.iso)
        .max()
        .unwrap_or(Rational::from(0));
    let boundary: usize = fresh.tiles.iter().map(|t| t.boundary).sum();
    Ok(PartitionQuality {
        k,
        eps,
        boundary_fraction: Rational::new(boundary as i64, g.n().max(1) as i64),
    })
}

/// Cross-tile edges and the bounds they satisfy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub edges: Vec<(usize, usize)>,
    /// `(d/2) · Σ|∂(L_i)|`.
    pub boundary_bound: Rational,
    /// `(d/2) · ε_achieved · n`.
    pub eps_bound: Rational,
}

pub fn hyperfinite_cut(g: &Graph, p: &Partition) -> Result<Cut> {
    let q = partition_quality(g, p)?;
    let edges: Vec<(usize, usize)> = g
        .edges()
        .filter(|&(u, v)| p.tile_of[u] != p.tile_of[v])
        .collect();
    let half_d = Rational::new(g.degree_bound() as i64, 2);
    let boundary: usize = p.tiles.iter().map(|t| t.boundary).sum();
    Ok(Cut {
        edges,
        boundary_bound: half_d * Rational::from(boundary as i64),
        eps_bound: half_d * q.eps * Rational::from(g.n() as i64),
    })
}

/// `g` with the given edges removed.
pub fn delete_edges(g: &Graph, cut: &[(usize, usize)]) -> Graph {
    let removed: std::collections::HashSet<(usize, usize)> = cut.iter().copied().collect();
    Graph::new(g.n(), g.edges().filter(|e| !removed.contains(e)))
        .expect("subgraph of a simple graph")
}
