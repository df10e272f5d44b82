//! Finite-depth bit labelings and their properness certificates.
//!
//! Two certificate kinds are tracked. A *distinct* certificate `(r, t)`
//! records that any two vertices within distance `r` already differ on their
//! first `t` bits. A *proper* certificate `(r, s)` records the weaker ball
//! condition: the `s`-balls labeled by `s`-bit prefixes are non-isomorphic for
//! every such pair. Distinct at `t` implies proper at `t`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::ball::{canonicalize, CanonConfig, CanonicalCode, RootedBall};
use crate::error::{Error, Result};
use crate::graph::{BallScratch, Graph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    labels: Vec<Vec<bool>>,
    depth: usize,
    proper: BTreeMap<usize, usize>,
    distinct: BTreeMap<usize, usize>,
}

/// Outcome of a certification attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// Least number of bits that works.
    Certified(usize),
    /// The least failing pair `(x, y)`, `x < y`.
    Witness(usize, usize),
}

impl Certificate {
    pub fn bits(self) -> Option<usize> {
        match self {
            Certificate::Certified(s) => Some(s),
            Certificate::Witness(..) => None,
        }
    }
}

impl Labeling {
    /// Effective depth is the shortest label length.
    pub fn from_bits(labels: Vec<Vec<bool>>) -> Labeling {
        let depth = labels.iter().map(Vec::len).min().unwrap_or(0);
        Labeling {
            labels,
            depth,
            proper: BTreeMap::new(),
            distinct: BTreeMap::new(),
        }
    }

    pub fn from_fn(n: usize, depth: usize, mut bit: impl FnMut(usize, usize) -> bool) -> Labeling {
        Labeling::from_bits(
            (0..n)
                .map(|v| (0..depth).map(|i| bit(v, i)).collect())
                .collect(),
        )
    }

    pub fn constant(n: usize, depth: usize) -> Labeling {
        Labeling::from_fn(n, depth, |_, _| false)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn bits(&self, v: usize) -> &[bool] {
        &self.labels[v][..self.depth]
    }

    /// First `t` bits; `t` must not exceed the depth.
    pub fn prefix(&self, v: usize, t: usize) -> &[bool] {
        assert!(
            t <= self.depth,
            "prefix of {t} bits beyond depth {}",
            self.depth
        );
        &self.labels[v][..t]
    }

    pub fn prefix_bytes(&self, v: usize, t: usize) -> Vec<u8> {
        self.prefix(v, t).iter().map(|&b| u8::from(b)).collect()
    }

    /// The first `t ≤ 128` bits read as a big-endian integer.
    pub fn prefix_value(&self, v: usize, t: usize) -> u128 {
        assert!(t <= 128, "prefix value needs t <= 128");
        self.prefix(v, t)
            .iter()
            .fold(0u128, |acc, &b| (acc << 1) | u128::from(b))
    }

    pub fn check_width(&self, t: usize) -> Result<()> {
        if t > self.depth {
            return Err(Error::LabelingTooShallow {
                requested: t,
                available: self.depth,
            });
        }
        Ok(())
    }

    pub fn check_graph(&self, g: &Graph) -> Result<()> {
        if self.n() != g.n() {
            return Err(Error::LabelingSizeMismatch {
                labels: self.n(),
                n: g.n(),
            });
        }
        Ok(())
    }

    /// Pads every label with zero bits up to `depth`. Existing
    /// certificates stay valid because prefixes are unchanged.
    pub fn extended_to(&self, depth: usize) -> Labeling {
        let mut out = self.clone();
        if depth > self.depth {
            for l in &mut out.labels {
                l.truncate(self.depth);
                l.resize(depth, false);
            }
            out.depth = depth;
        }
        out
    }

    /// Least `t` from a distinct certificate covering radius `r`.
    pub fn distinct_bits(&self, r: usize) -> Option<usize> {
        self.distinct.range(r..).map(|(_, &t)| t).min()
    }

    /// Least `s` from a proper certificate covering radius `r`; distinct
    /// certificates count as proper ones.
    pub fn proper_bits(&self, r: usize) -> Option<usize> {
        let weak = self.proper.range(r..).map(|(_, &s)| s).min();
        match (weak, self.distinct_bits(r)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn require_distinct(&self, r: usize) -> Result<usize> {
        self.distinct_bits(r)
            .ok_or(Error::NotCertified { radius: r })
    }

    pub fn distinct_certificates(&self) -> &BTreeMap<usize, usize> {
        &self.distinct
    }

    pub fn proper_certificates(&self) -> &BTreeMap<usize, usize> {
        &self.proper
    }

    fn record(map: &mut BTreeMap<usize, usize>, r: usize, s: usize) {
        let e = map.entry(r).or_insert(s);
        *e = (*e).min(s);
    }

    /// Least `t` such that labels of vertices within distance `r` differ on
    /// their first `t` bits.
    pub fn check_distinct(&self, g: &Graph, r: usize) -> Result<Certificate> {
        self.check_graph(g)?;
        let per_root: Vec<(usize, Option<usize>)> = (0..g.n())
            .into_par_iter()
            .map_init(
                || BallScratch::new(g.n()),
                |scratch, x| {
                    let mut need = 0;
                    let mut clash = None;
                    for &y in scratch.explore(g, x, Some(r)) {
                        if y <= x {
                            continue;
                        }
                        let l = common_prefix(self.bits(x), self.bits(y));
                        if l == self.depth {
                            clash = Some(clash.map_or(y, |c: usize| c.min(y)));
                        } else {
                            need = need.max(l + 1);
                        }
                    }
                    (need, clash)
                },
            )
            .collect();
        if let Some((x, (_, Some(y)))) = per_root.iter().enumerate().find(|(_, p)| p.1.is_some()) {
            return Ok(Certificate::Witness(x, *y));
        }
        let t = per_root.iter().map(|p| p.0).max().unwrap_or(0);
        Ok(Certificate::Certified(t.max(1).min(self.depth)))
    }

    /// Runs [`Labeling::check_distinct`] and records the certificate on
    /// success.
    pub fn certify_distinct(&mut self, g: &Graph, r: usize) -> Result<Certificate> {
        let c = self.check_distinct(g, r)?;
        if let Certificate::Certified(t) = c {
            Self::record(&mut self.distinct, r, t);
        }
        Ok(c)
    }

    /// Least `s ≤ depth` for which every pair `x ≠ y` with `d(x, y) ≤ r` has
    /// non-isomorphic `s`-balls labeled by `s`-bit prefixes. On failure the
    /// least pair failing at full depth is returned.
    pub fn verify_proper(&self, g: &Graph, r: usize) -> Result<Certificate> {
        self.verify_proper_with(g, r, &CanonConfig::with_cap(4096))
    }

    pub fn verify_proper_with(
        &self,
        g: &Graph,
        r: usize,
        cfg: &CanonConfig,
    ) -> Result<Certificate> {
        self.check_graph(g)?;
        if self.depth == 0 {
            return Ok(match first_pair(g, r) {
                Some((x, y)) => Certificate::Witness(x, y),
                None => Certificate::Certified(0),
            });
        }
        let mut witness = None;
        for s in 1..=self.depth {
            match self.failing_pair(g, r, s, cfg)? {
                None => return Ok(Certificate::Certified(s)),
                Some(p) => witness = Some(p),
            }
        }
        let (x, y) = witness.expect("depth >= 1 runs at least one level");
        Ok(Certificate::Witness(x, y))
    }

    pub fn certify_proper(&mut self, g: &Graph, r: usize) -> Result<Certificate> {
        let c = self.verify_proper(g, r)?;
        if let Certificate::Certified(s) = c {
            Self::record(&mut self.proper, r, s);
        }
        Ok(c)
    }

    /// Least pair at distance `≤ r` whose labeled `s`-balls are isomorphic.
    /// Pairs with different `s`-bit root labels are skipped: an isomorphism
    /// would have to map root label to root label.
    fn failing_pair(
        &self,
        g: &Graph,
        r: usize,
        s: usize,
        cfg: &CanonConfig,
    ) -> Result<Option<(usize, usize)>> {
        let pairs: Vec<Vec<usize>> = (0..g.n())
            .into_par_iter()
            .map_init(
                || BallScratch::new(g.n()),
                |scratch, x| {
                    let mut ys: Vec<usize> = scratch
                        .explore(g, x, Some(r))
                        .iter()
                        .copied()
                        .filter(|&y| y > x && self.prefix(x, s) == self.prefix(y, s))
                        .collect();
                    ys.sort_unstable();
                    ys
                },
            )
            .collect();
        let involved: BTreeSet<usize> = pairs
            .iter()
            .enumerate()
            .filter(|(_, ys)| !ys.is_empty())
            .flat_map(|(x, ys)| std::iter::once(x).chain(ys.iter().copied()))
            .collect();
        let involved: Vec<usize> = involved.into_iter().collect();
        let codes: Vec<CanonicalCode> = involved
            .par_iter()
            .map(|&v| canonicalize(&RootedBall::extract_labeled(g, v, s, self, s)?, cfg))
            .collect::<Result<_>>()?;
        let code_of = |v: usize| &codes[involved.binary_search(&v).expect("involved vertex")];
        for (x, ys) in pairs.iter().enumerate() {
            if let Some(&y) = ys.iter().find(|&&y| code_of(x) == code_of(y)) {
                return Ok(Some((x, y)));
            }
        }
        Ok(None)
    }

    /// One `vertex_id bitstring` line per vertex.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, l) in self.labels.iter().enumerate() {
            let bits: String = l[..self.depth]
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect();
            let _ = writeln!(out, "{v} {bits}");
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Labeling> {
        let mut labels = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.into(),
            };
            let (id, bits) = line
                .split_once(' ')
                .ok_or_else(|| bad("expected `id bits`"))?;
            let id: usize = id.parse().map_err(|_| bad("bad vertex id"))?;
            if id != labels.len() {
                return Err(bad("vertex ids must be listed in order"));
            }
            let bits = bits
                .trim()
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(bad("labels are strings over 0/1")),
                })
                .collect::<Result<Vec<bool>>>()?;
            labels.push(bits);
        }
        Ok(Labeling::from_bits(labels))
    }

    /// Certificate sidecar: `{"proper": {r: s}, "distinct": {r: t}}`.
    pub fn certificates_json(&self) -> Value {
        let obj = |m: &BTreeMap<usize, usize>| -> Value {
            Value::Object(m.iter().map(|(r, s)| (r.to_string(), json!(s))).collect())
        };
        json!({ "depth": self.depth, "proper": obj(&self.proper), "distinct": obj(&self.distinct) })
    }
}

fn common_prefix(a: &[bool], b: &[bool]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn first_pair(g: &Graph, r: usize) -> Option<(usize, usize)> {
    let mut scratch = BallScratch::new(g.n());
    (0..g.n()).find_map(|x| {
        let y = scratch
            .explore(g, x, Some(r))
            .iter()
            .copied()
            .filter(|&y| y > x)
            .min()?;
        Some((x, y))
    })
}

fn bits_for(colors: usize) -> usize {
    let mut l = 1;
    while (1usize << l) < colors {
        l += 1;
    }
    l
}

/// Greedy coloring of the `r`-th distance power in ascending vertex order;
/// colors start at 1.
pub fn power_coloring(g: &Graph, r: usize) -> Vec<usize> {
    let mut color = vec![0usize; g.n()];
    let mut scratch = BallScratch::new(g.n());
    let mut used = Vec::new();
    for x in 0..g.n() {
        used.clear();
        used.extend(
            scratch
                .explore(g, x, Some(r))
                .iter()
                .map(|&y| color[y])
                .filter(|&c| c > 0),
        );
        used.sort_unstable();
        used.dedup();
        color[x] = used
            .iter()
            .enumerate()
            .find(|&(i, &c)| c != i + 1)
            .map_or(used.len() + 1, |(i, _)| i + 1);
    }
    color
}

/// Labels encode `color - 1` of [`power_coloring`] in `⌈log2 colors⌉` bits
/// (at least one), most significant bit first. Certified distinct and proper
/// at radius `r`.
pub fn power_greedy_labeling(g: &Graph, r: usize) -> Labeling {
    assert!(r >= 1, "power labeling needs r >= 1");
    let color = power_coloring(g, r);
    let colors = color.iter().copied().max().unwrap_or(1);
    let l = bits_for(colors);
    let mut lab = Labeling::from_fn(g.n(), l, |v, i| ((color[v] - 1) >> (l - 1 - i)) & 1 == 1);
    Labeling::record(&mut lab.distinct, r, l);
    Labeling::record(&mut lab.proper, r, l);
    lab
}

/// `bits` pseudo-random bits per vertex, drawn in vertex order from a
/// ChaCha8 stream. No certificate is attached.
pub fn random_labeling(g: &Graph, bits: usize, seed: u64) -> Labeling {
    assert!(bits >= 1, "random labeling needs at least one bit");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = (0..g.n())
        .map(|_| {
            let mut out = Vec::with_capacity(bits);
            while out.len() < bits {
                let w = rng.next_u64();
                let take = (bits - out.len()).min(64);
                out.extend((0..take).map(|i| (w >> (63 - i)) & 1 == 1));
            }
            out
        })
        .collect();
    Labeling::from_bits(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    fn fam(f: Family) -> Graph {
        generate(&f).unwrap()
    }

    fn strings(lab: &Labeling) -> Vec<String> {
        (0..lab.n())
            .map(|v| {
                lab.bits(v)
                    .iter()
                    .map(|&b| if b { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn power_greedy_examples() {
        let lab = power_greedy_labeling(&fam(Family::Path(3)), 1);
        assert_eq!(strings(&lab), ["0", "1", "0"]);
        let lab = power_greedy_labeling(&Graph::edgeless(1), 1);
        assert_eq!(strings(&lab), ["0"]);
        let lab = power_greedy_labeling(&fam(Family::Cycle(4)), 2);
        assert_eq!(strings(&lab), ["00", "01", "10", "11"]);
        assert_eq!(lab.distinct_bits(2), Some(2));
        assert_eq!(lab.distinct_bits(1), Some(2));
        assert_eq!(lab.distinct_bits(3), None);
    }

    #[test]
    fn random_is_deterministic() {
        let g = fam(Family::Cycle(10));
        assert_eq!(random_labeling(&g, 70, 5), random_labeling(&g, 70, 5));
        assert_ne!(random_labeling(&g, 70, 5), random_labeling(&g, 70, 6));
        assert_eq!(random_labeling(&g, 70, 5).depth(), 70);
    }

    #[test]
    fn one_random_bit_on_p3_fails() {
        // three vertices within distance 2 cannot carry distinct 1-bit labels
        let g = fam(Family::Path(3));
        for seed in 0..16 {
            let mut lab = random_labeling(&g, 1, seed);
            assert!(matches!(
                lab.certify_distinct(&g, 2).unwrap(),
                Certificate::Witness(..)
            ));
            assert_eq!(lab.distinct_bits(2), None);
        }
        // at radius 1 only some seeds collide; 0,1,0 passes
        let alternating = Labeling::from_fn(3, 1, |v, _| v == 1);
        assert_eq!(
            alternating.check_distinct(&g, 1).unwrap(),
            Certificate::Certified(1)
        );
    }

    #[test]
    fn constant_labeling_has_witness() {
        let g = fam(Family::Cycle(4));
        let lab = Labeling::constant(4, 3);
        assert_eq!(
            lab.verify_proper(&g, 1).unwrap(),
            Certificate::Witness(0, 1)
        );
    }

    #[test]
    fn distinct_labels_certify_proper_quickly() {
        let g = fam(Family::Grid(4, 4));
        let lab = Labeling::from_fn(16, 6, |v, i| (v >> (5 - i)) & 1 == 1);
        // ids below 16 share the leading two zero bits
        assert_eq!(
            lab.check_distinct(&g, 16).unwrap(),
            Certificate::Certified(6)
        );
        let s = lab.verify_proper(&g, 3).unwrap().bits().unwrap();
        assert!(s <= 6);
    }

    #[test]
    fn extension_pads_and_keeps_certificates() {
        let g = fam(Family::Cycle(4));
        let lab = power_greedy_labeling(&g, 2).extended_to(5);
        assert_eq!(lab.depth(), 5);
        assert_eq!(lab.prefix_value(3, 2), 3);
        assert_eq!(lab.prefix_value(3, 5), 0b11000);
        assert_eq!(lab.distinct_bits(2), Some(2));
        assert!(lab.check_width(6).is_err());
    }

    #[test]
    fn text_round_trip() {
        let lab = power_greedy_labeling(&fam(Family::Cycle(5)), 1);
        let back = Labeling::parse_text(&lab.to_text()).unwrap();
        assert_eq!(strings(&back), strings(&lab));
        assert!(Labeling::parse_text("0 012\n").is_err());
    }
}
