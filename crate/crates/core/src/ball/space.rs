//! Ball statistics over a whole graph and the metrics comparing them.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde_json::{json, Value};

use super::{canonicalize, CanonConfig, CanonicalCode, LabelKind, RootedBall};
use crate::error::Result;
use crate::graph::{BallScratch, Graph};
use crate::labeling::Labeling;
use crate::{ratio_string, Rational};

/// Canonical codes of every rooted `k`-ball of `g`, indexed by root.
/// Labeled balls carry the first `k` bits of `lab`.
fn codes(
    g: &Graph,
    k: usize,
    lab: Option<&Labeling>,
    cfg: &CanonConfig,
) -> Result<Vec<CanonicalCode>> {
    if let Some(lab) = lab {
        lab.check_graph(g)?;
        lab.check_width(k)?;
    }
    (0..g.n())
        .into_par_iter()
        .map_init(
            || BallScratch::new(g.n()),
            |scratch, x| {
                let ball = match lab {
                    None => RootedBall::extract_in(scratch, g, x, k, LabelKind::Unlabeled, |_| {
                        Vec::new()
                    }),
                    Some(lab) => RootedBall::extract_in(scratch, g, x, k, LabelKind::Bits, |v| {
                        lab.prefix_bytes(v, k)
                    }),
                };
                canonicalize(&ball, cfg)
            },
        )
        .collect()
}

/// Frequencies `Prob^k_G(B)` of canonical `k`-balls over all roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallProfile {
    radius: usize,
    roots: usize,
    counts: BTreeMap<CanonicalCode, usize>,
}

impl BallProfile {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, code: &CanonicalCode) -> usize {
        self.counts.get(code).copied().unwrap_or(0)
    }

    pub fn freq(&self, code: &CanonicalCode) -> Rational {
        Rational::new(self.count(code) as i64, self.roots.max(1) as i64)
    }

    /// Atoms in code order.
    pub fn atoms(&self) -> impl Iterator<Item = (&CanonicalCode, Rational)> + '_ {
        self.counts
            .iter()
            .map(|(c, &k)| (c, Rational::new(k as i64, self.roots as i64)))
    }

    pub fn total(&self) -> Rational {
        self.atoms().map(|(_, f)| f).sum()
    }

    pub fn support(&self) -> BallSet {
        BallSet {
            radius: self.radius,
            codes: self.counts.keys().cloned().collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        let atoms: Vec<Value> = self
            .atoms()
            .map(|(c, f)| json!({ "code": c.to_hex(), "freq": ratio_string(&f) }))
            .collect();
        json!({ "radius": self.radius, "atoms": atoms })
    }
}

/// The set `ℬ(G)` (or `𝒞ℬ(G)` when labeled) of `k`-ball types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallSet {
    radius: usize,
    codes: BTreeSet<CanonicalCode>,
}

impl BallSet {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn contains(&self, code: &CanonicalCode) -> bool {
        self.codes.contains(code)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CanonicalCode> + '_ {
        self.codes.iter()
    }

    /// Concatenated length-prefixed codes in sorted order.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.codes
            .iter()
            .flat_map(CanonicalCode::to_length_prefixed)
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let codes: Vec<String> = self.codes.iter().map(CanonicalCode::to_hex).collect();
        json!({ "radius": self.radius, "codes": codes })
    }
}

pub fn ball_profile(g: &Graph, k: usize) -> Result<BallProfile> {
    ball_profile_with(g, k, None, &CanonConfig::default())
}

pub fn ball_profile_with(
    g: &Graph,
    k: usize,
    lab: Option<&Labeling>,
    cfg: &CanonConfig,
) -> Result<BallProfile> {
    let mut counts = BTreeMap::new();
    for c in codes(g, k, lab, cfg)? {
        *counts.entry(c).or_insert(0) += 1;
    }
    Ok(BallProfile {
        radius: k,
        roots: g.n(),
        counts,
    })
}

pub fn ball_set(g: &Graph, k: usize, lab: Option<&Labeling>) -> Result<BallSet> {
    ball_set_with(g, k, lab, &CanonConfig::default())
}

pub fn ball_set_with(
    g: &Graph,
    k: usize,
    lab: Option<&Labeling>,
    cfg: &CanonConfig,
) -> Result<BallSet> {
    Ok(BallSet {
        radius: k,
        codes: codes(g, k, lab, cfg)?.into_iter().collect(),
    })
}

/// Result of a truncated topological distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopDistance {
    /// Ball sets first differ at this radius; the distance is
    /// `2^{-(radius - 1)}`.
    DifferAt(usize),
    /// Ball sets agree at every radius up to the horizon. Reported as 0,
    /// which is only an upper bound on the true distance.
    AgreeToHorizon(usize),
}

impl TopDistance {
    pub fn value(self) -> Rational {
        match self {
            TopDistance::DifferAt(i) => Rational::new(1, 1i64 << (i - 1)),
            TopDistance::AgreeToHorizon(_) => Rational::from(0),
        }
    }

    /// Largest radius `n` with agreement at every `1..=n`.
    pub fn agreement(self) -> usize {
        match self {
            TopDistance::DifferAt(i) => i - 1,
            TopDistance::AgreeToHorizon(k) => k,
        }
    }
}

fn first_difference(
    k_max: usize,
    mut level: impl FnMut(usize) -> Result<bool>,
) -> Result<TopDistance> {
    assert!(k_max >= 1, "horizon must be at least 1");
    for i in 1..=k_max {
        if !level(i)? {
            return Ok(TopDistance::DifferAt(i));
        }
    }
    Ok(TopDistance::AgreeToHorizon(k_max))
}

pub fn d_gr(g: &Graph, h: &Graph, k_max: usize) -> Result<TopDistance> {
    first_difference(
        k_max,
        |i| Ok(ball_set(g, i, None)? == ball_set(h, i, None)?),
    )
}

/// Labeled variant; level `i` compares balls labeled by `i`-bit prefixes.
pub fn d_cgr(
    g: &Graph,
    lg: &Labeling,
    h: &Graph,
    lh: &Labeling,
    k_max: usize,
) -> Result<TopDistance> {
    first_difference(k_max, |i| {
        Ok(ball_set(g, i, Some(lg))? == ball_set(h, i, Some(lh))?)
    })
}

fn total_variation(a: &BallProfile, b: &BallProfile) -> Rational {
    let keys: BTreeSet<&CanonicalCode> = a.counts.keys().chain(b.counts.keys()).collect();
    let sum: Rational = keys
        .into_iter()
        .map(|c| {
            let d = a.freq(c) - b.freq(c);
            if d < Rational::from(0) {
                -d
            } else {
                d
            }
        })
        .sum();
    sum / 2
}

/// Total variation between the radius-`k` profiles.
pub fn bs_distance(g: &Graph, h: &Graph, k: usize) -> Result<Rational> {
    Ok(total_variation(&ball_profile(g, k)?, &ball_profile(h, k)?))
}

/// `Σ_{k=1..k_max} 2^{-k} · TV_k`.
pub fn bs_metric(g: &Graph, h: &Graph, k_max: usize) -> Result<Rational> {
    let mut total = Rational::from(0);
    for k in 1..=k_max {
        total += bs_distance(g, h, k)? / (1i64 << k);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    fn fam(f: Family) -> Graph {
        generate(&f).unwrap()
    }

    fn sorted_freqs(p: &BallProfile) -> Vec<Rational> {
        let mut v: Vec<Rational> = p.atoms().map(|(_, f)| f).collect();
        v.sort();
        v
    }

    #[test]
    fn profile_examples() {
        let p = ball_profile(&fam(Family::Cycle(5)), 1).unwrap();
        assert_eq!(sorted_freqs(&p), vec![Rational::from(1)]);
        let p = ball_profile(&fam(Family::Path(4)), 1).unwrap();
        assert_eq!(sorted_freqs(&p), vec![Rational::new(1, 2); 2]);
        let p = ball_profile(&fam(Family::Grid(3, 3)), 1).unwrap();
        assert_eq!(
            sorted_freqs(&p),
            vec![
                Rational::new(1, 9),
                Rational::new(4, 9),
                Rational::new(4, 9)
            ]
        );
        assert_eq!(p.total(), Rational::from(1));
    }

    #[test]
    fn ball_set_examples() {
        assert_eq!(ball_set(&fam(Family::Cycle(6)), 1, None).unwrap().len(), 1);
        assert_eq!(ball_set(&fam(Family::Cycle(3)), 1, None).unwrap().len(), 1);
        // cycle interior and the single-edge ball; both ends of P_2 look alike
        let g = fam(Family::Cycle(6)).disjoint_union(&fam(Family::Path(2)));
        assert_eq!(ball_set(&g, 1, None).unwrap().len(), 2);
        // with a three-vertex path the middle ball is the cycle ball again
        let g = fam(Family::Cycle(6)).disjoint_union(&fam(Family::Path(3)));
        assert_eq!(ball_set(&g, 1, None).unwrap().len(), 2);
    }

    #[test]
    fn d_gr_examples() {
        let (c3, c4) = (fam(Family::Cycle(3)), fam(Family::Cycle(4)));
        assert_eq!(d_gr(&c3, &c4, 4).unwrap().value(), Rational::from(1));
        let (c6, c7) = (fam(Family::Cycle(6)), fam(Family::Cycle(7)));
        assert_eq!(d_gr(&c6, &c7, 3).unwrap(), TopDistance::DifferAt(3));
        assert_eq!(d_gr(&c6, &c7, 5).unwrap().value(), Rational::new(1, 4));
        assert_eq!(d_gr(&c6, &c6, 5).unwrap(), TopDistance::AgreeToHorizon(5));
        assert_eq!(d_gr(&c6, &c7, 2).unwrap().value(), Rational::from(0));
    }

    #[test]
    fn bs_examples() {
        let (c5, c6) = (fam(Family::Cycle(5)), fam(Family::Cycle(6)));
        assert_eq!(bs_distance(&c5, &c6, 1).unwrap(), Rational::from(0));
        assert_eq!(bs_distance(&c5, &c5, 3).unwrap(), Rational::from(0));
        let (c4, p4) = (fam(Family::Cycle(4)), fam(Family::Path(4)));
        assert_eq!(bs_distance(&c4, &p4, 1).unwrap(), Rational::new(1, 2));
        assert_eq!(bs_metric(&c4, &c4, 3).unwrap(), Rational::from(0));
        assert!(bs_metric(&c4, &p4, 2).unwrap() >= Rational::new(1, 4));
    }

    #[test]
    fn json_uses_ratio_strings() {
        let p = ball_profile(&fam(Family::Cycle(5)), 1).unwrap();
        let j = p.to_json();
        assert_eq!(j["atoms"][0]["freq"], "1/1");
        assert_eq!(j["radius"], 1);
        let s = ball_set(&fam(Family::Path(4)), 1, None).unwrap();
        assert_eq!(s.to_json()["codes"].as_array().unwrap().len(), 2);
    }
}
