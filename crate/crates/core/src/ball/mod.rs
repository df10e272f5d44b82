//! Rooted balls, their canonical codes, and the ball statistics built on
//! them: profiles, ball sets, the topological metrics and the
//! Benjamini–Schramm distance.

mod canon;
mod space;

pub use canon::{canonical_form, canonicalize, CanonConfig};
pub use space::{
    ball_profile, ball_profile_with, ball_set, ball_set_with, bs_distance, bs_metric, d_cgr, d_gr,
    BallProfile, BallSet, TopDistance,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{BallScratch, Graph};
use crate::labeling::Labeling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum LabelKind {
    Unlabeled = 0,
    /// Bit-string prefixes, one byte (0 or 1) per bit.
    Bits = 1,
    /// Encoded symbols of a finite output alphabet.
    Symbols = 2,
}

/// A rooted ball of radius `k`: local vertex 0 is the root and every vertex
/// lies within distance `k` of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedBall {
    graph: Graph,
    radius: usize,
    kind: LabelKind,
    labels: Vec<Vec<u8>>,
}

impl RootedBall {
    /// Unlabeled `B_k(g, x)`.
    pub fn extract(g: &Graph, x: usize, k: usize) -> RootedBall {
        Self::extract_with(g, x, k, LabelKind::Unlabeled, |_| Vec::new())
    }

    /// `B_k(g, x)` with vertex `v` of `g` carrying `label(v)`.
    pub fn extract_with(
        g: &Graph,
        x: usize,
        k: usize,
        kind: LabelKind,
        label: impl Fn(usize) -> Vec<u8>,
    ) -> RootedBall {
        let mut scratch = BallScratch::new(g.n());
        Self::extract_in(&mut scratch, g, x, k, kind, label)
    }

    pub(crate) fn extract_in(
        scratch: &mut BallScratch,
        g: &Graph,
        x: usize,
        k: usize,
        kind: LabelKind,
        label: impl Fn(usize) -> Vec<u8>,
    ) -> RootedBall {
        let vertices = scratch.explore(g, x, Some(k)).to_vec();
        let labels = if kind == LabelKind::Unlabeled {
            Vec::new()
        } else {
            vertices.iter().map(|&v| label(v)).collect()
        };
        RootedBall {
            graph: g.induced(&vertices),
            radius: k,
            kind,
            labels,
        }
    }

    /// `B_k(g, x)` labeled by the first `width` bits of `lab`.
    pub fn extract_labeled(
        g: &Graph,
        x: usize,
        k: usize,
        lab: &Labeling,
        width: usize,
    ) -> Result<RootedBall> {
        lab.check_width(width)?;
        Ok(Self::extract_with(g, x, k, LabelKind::Bits, |v| {
            lab.prefix_bytes(v, width)
        }))
    }

    /// Assembles a ball from parts, checking the distance invariant.
    pub fn from_parts(
        graph: Graph,
        radius: usize,
        kind: LabelKind,
        labels: Vec<Vec<u8>>,
    ) -> Result<RootedBall> {
        let n = graph.n();
        if n == 0 {
            return Err(Error::Precondition("a rooted ball needs a root".into()));
        }
        let expected = if kind == LabelKind::Unlabeled { 0 } else { n };
        if labels.len() != expected {
            return Err(Error::LabelingSizeMismatch {
                labels: labels.len(),
                n,
            });
        }
        let ball = RootedBall {
            graph,
            radius,
            kind,
            labels,
        };
        let dist = ball.root_distances();
        if dist.iter().any(|&d| d > radius) {
            return Err(Error::Precondition(format!(
                "fragment has vertices beyond radius {radius}"
            )));
        }
        Ok(ball)
    }

    pub fn len(&self) -> usize {
        self.graph.n()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.n() == 0
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    /// Empty for unlabeled balls.
    pub fn label(&self, v: usize) -> &[u8] {
        self.labels.get(v).map_or(&[], Vec::as_slice)
    }

    /// Distances from the root within the fragment; unreachable vertices
    /// get `usize::MAX`.
    pub fn root_distances(&self) -> Vec<usize> {
        let mut scratch = BallScratch::new(self.len());
        scratch.explore(&self.graph, 0, None);
        (0..self.len())
            .map(|v| scratch.dist(v).unwrap_or(usize::MAX))
            .collect()
    }

    /// Renames local vertex `v` to `pos[v]`. `pos[0]` must be 0.
    pub fn permuted(&self, pos: &[usize]) -> RootedBall {
        debug_assert_eq!(pos[0], 0, "root must stay at position 0");
        let labels = if self.kind == LabelKind::Unlabeled {
            Vec::new()
        } else {
            let mut out = vec![Vec::new(); self.len()];
            for (v, &p) in pos.iter().enumerate() {
                out[p] = self.labels[v].clone();
            }
            out
        };
        RootedBall {
            graph: self.graph.relabeled(pos),
            radius: self.radius,
            kind: self.kind,
            labels,
        }
    }
}

/// Byte string equal for two balls iff they are rooted(-labeled) isomorphic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode {
    bytes: Vec<u8>,
    radius: usize,
    labeled: bool,
}

impl CanonicalCode {
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn is_labeled(&self) -> bool {
        self.labeled
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    /// Big-endian `u32` length followed by the code bytes.
    pub fn to_length_prefixed(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + self.bytes.len());
        out.extend_from_slice(&(self.bytes.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.bytes);
        out
    }

    /// Parses one length-prefixed code, returning it and the rest of `data`.
    pub fn from_length_prefixed(data: &[u8]) -> Result<(CanonicalCode, &[u8])> {
        let bad = |msg: &str| Error::Parse {
            line: 0,
            msg: msg.into(),
        };
        if data.len() < 4 {
            return Err(bad("truncated length prefix"));
        }
        let len = u32::from_be_bytes([data[0], data[1], data[2], data[3]]) as usize;
        let body = data.get(4..4 + len).ok_or_else(|| bad("truncated code"))?;
        if body.len() < 10 {
            return Err(bad("code header too short"));
        }
        let radius = u32::from_be_bytes([body[2], body[3], body[4], body[5]]) as usize;
        let code = CanonicalCode {
            bytes: body.to_vec(),
            radius,
            labeled: body[1] != LabelKind::Unlabeled as u8,
        };
        Ok((code, &data[4 + len..]))
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// A ball in canonical vertex order with its code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalBall {
    pub code: CanonicalCode,
    pub ball: RootedBall,
}
