//! Local oracles, local verifiers and the color-reduction algorithm.
//!
//! Every oracle and verifier sees only the canonical representative of the
//! ball around a vertex, never the vertex ids of the host graph, so two
//! isomorphic labeled balls receive the same answer wherever they occur.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::ball::{
    canonical_form, CanonConfig, CanonicalBall, CanonicalCode, LabelKind, RootedBall,
};
use crate::error::{Error, Result};
use crate::graph::{BallScratch, Graph};
use crate::labeling::Labeling;

/// Finite output alphabets that can label a ball.
pub trait Symbol: Clone + Eq + Hash + fmt::Debug + Send + Sync {
    fn encode(&self) -> Vec<u8>;
    fn decode(bytes: &[u8]) -> Option<Self>;
}

macro_rules! int_symbol {
    ($($t:ty),*) => {$(
        impl Symbol for $t {
            fn encode(&self) -> Vec<u8> {
                self.to_be_bytes().to_vec()
            }
            fn decode(bytes: &[u8]) -> Option<Self> {
                Some(<$t>::from_be_bytes(bytes.try_into().ok()?))
            }
        }
    )*};
}

int_symbol!(u8, u16, u32, u64, u128);

/// Per-vertex output of an oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QLabeling<Q>(pub Vec<Q>);

impl<Q> QLabeling<Q> {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Q] {
        &self.0
    }
}

impl<Q: fmt::Display> QLabeling<Q> {
    /// One `vertex_id value` line per vertex.
    pub fn to_text(&self) -> String {
        self.0
            .iter()
            .enumerate()
            .map(|(v, q)| format!("{v} {q}\n"))
            .collect()
    }
}

impl<Q> std::ops::Index<usize> for QLabeling<Q> {
    type Output = Q;
    fn index(&self, v: usize) -> &Q {
        &self.0[v]
    }
}

type Procedure<Q> = Arc<dyn Fn(&CanonicalBall) -> Q + Send + Sync>;

enum Rule<Q> {
    Table(HashMap<CanonicalCode, Q>),
    Procedure(Procedure<Q>),
}

impl<Q: Clone> Clone for Rule<Q> {
    fn clone(&self) -> Self {
        match self {
            Rule::Table(t) => Rule::Table(t.clone()),
            Rule::Procedure(p) => Rule::Procedure(Arc::clone(p)),
        }
    }
}

/// `Θ`: a map from labeled radius-`m` balls (labels cut to `m` bits) to `Q`.
#[derive(Clone)]
pub struct Oracle<Q> {
    radius: usize,
    rule: Rule<Q>,
    cfg: CanonConfig,
}

impl<Q> fmt::Debug for Oracle<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.rule {
            Rule::Table(ref t) => format!("table({})", t.len()),
            Rule::Procedure(_) => "procedure".into(),
        };
        f.debug_struct("Oracle")
            .field("radius", &self.radius)
            .field("rule", &kind)
            .finish()
    }
}

impl<Q: Clone + Send + Sync> Oracle<Q> {
    /// The procedure receives the ball in canonical vertex order, root 0.
    pub fn procedure(
        radius: usize,
        f: impl Fn(&CanonicalBall) -> Q + Send + Sync + 'static,
    ) -> Oracle<Q> {
        Oracle {
            radius,
            rule: Rule::Procedure(Arc::new(f)),
            cfg: CanonConfig::with_cap(8192),
        }
    }

    pub fn table(radius: usize, table: HashMap<CanonicalCode, Q>) -> Oracle<Q> {
        Oracle {
            radius,
            rule: Rule::Table(table),
            cfg: CanonConfig::with_cap(8192),
        }
    }

    pub fn constant(radius: usize, q: Q) -> Oracle<Q>
    where
        Q: 'static,
    {
        Oracle::procedure(radius, move |_| q.clone())
    }

    pub fn with_config(mut self, cfg: CanonConfig) -> Self {
        self.cfg = cfg;
        self
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// The labeled ball an oracle of radius `m` reads at `x`.
    pub fn input_ball(&self, g: &Graph, lab: &Labeling, x: usize) -> Result<RootedBall> {
        RootedBall::extract_labeled(g, x, self.radius, lab, self.radius)
    }

    pub fn evaluate(&self, ball: &RootedBall) -> Result<Q> {
        let canon = canonical_form(ball, &self.cfg)?;
        match &self.rule {
            Rule::Procedure(f) => Ok(f(&canon)),
            Rule::Table(t) => t.get(&canon.code).cloned().ok_or_else(|| {
                Error::Precondition(format!("oracle table has no entry for ball {}", canon.code))
            }),
        }
    }

    /// Tabulates the oracle on the balls occurring in `graphs`.
    pub fn tabulate<'a>(
        &self,
        graphs: impl IntoIterator<Item = (&'a Graph, &'a Labeling)>,
    ) -> Result<Oracle<Q>> {
        let mut table = HashMap::new();
        for (g, lab) in graphs {
            for x in 0..g.n() {
                let canon = canonical_form(&self.input_ball(g, lab, x)?, &self.cfg)?;
                if let Entry::Vacant(slot) = table.entry(canon.code) {
                    slot.insert(self.evaluate(&canon.ball)?);
                }
            }
        }
        Ok(Oracle {
            radius: self.radius,
            rule: Rule::Table(table),
            cfg: self.cfg,
        })
    }
}

/// `λ^Θ(x) = Θ(B_m(G, x, (λ)_m))` at every vertex.
pub fn run_oracle<Q: Clone + Send + Sync>(
    g: &Graph,
    lab: &Labeling,
    oracle: &Oracle<Q>,
) -> Result<QLabeling<Q>> {
    lab.check_graph(g)?;
    lab.check_width(oracle.radius)?;
    let m = oracle.radius;
    let out = (0..g.n())
        .into_par_iter()
        .map_init(
            || BallScratch::new(g.n()),
            |scratch, x| {
                let ball = RootedBall::extract_in(scratch, g, x, m, LabelKind::Bits, |v| {
                    lab.prefix_bytes(v, m)
                });
                oracle.evaluate(&ball)
            },
        )
        .collect::<Result<Vec<Q>>>()?;
    Ok(QLabeling(out))
}

type Decision<Q> = Arc<dyn Fn(&RootedBall, &[Q]) -> bool + Send + Sync>;

/// `Ω`: accepts or rejects each `Q`-labeled radius-`l` ball.
#[derive(Clone)]
pub struct Verifier<Q> {
    radius: usize,
    rule: Decision<Q>,
}

impl<Q> fmt::Debug for Verifier<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Verifier")
            .field("radius", &self.radius)
            .finish()
    }
}

impl<Q: Symbol + 'static> Verifier<Q> {
    /// The rule sees the canonical ball and its decoded labels, root 0.
    pub fn new(
        radius: usize,
        rule: impl Fn(&RootedBall, &[Q]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Verifier {
            radius,
            rule: Arc::new(rule),
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn accepts_at(&self, g: &Graph, q: &QLabeling<Q>, x: usize) -> Result<bool> {
        let mut scratch = BallScratch::new(g.n());
        self.accepts_in(&mut scratch, g, q, x)
    }

    fn accepts_in(
        &self,
        scratch: &mut BallScratch,
        g: &Graph,
        q: &QLabeling<Q>,
        x: usize,
    ) -> Result<bool> {
        let ball = RootedBall::extract_in(scratch, g, x, self.radius, LabelKind::Symbols, |v| {
            q[v].encode()
        });
        let canon = canonical_form(&ball, &CanonConfig::with_cap(8192))?;
        let labels = (0..canon.ball.len())
            .map(|v| {
                Q::decode(canon.ball.label(v))
                    .ok_or_else(|| Error::Precondition("undecodable verifier label".into()))
            })
            .collect::<Result<Vec<Q>>>()?;
        Ok((self.rule)(&canon.ball, &labels))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    /// Least vertex whose ball is rejected.
    Reject(usize),
}

impl Verdict {
    pub fn accepted(self) -> bool {
        self == Verdict::Accept
    }

    pub fn to_json(self) -> Value {
        match self {
            Verdict::Accept => json!({ "accepted": true }),
            Verdict::Reject(w) => json!({ "accepted": false, "witness": w }),
        }
    }
}

pub fn run_verifier<Q: Symbol + 'static>(
    g: &Graph,
    q: &QLabeling<Q>,
    verifier: &Verifier<Q>,
) -> Result<Verdict> {
    if q.len() != g.n() {
        return Err(Error::LabelingSizeMismatch {
            labels: q.len(),
            n: g.n(),
        });
    }
    let ok = (0..g.n())
        .into_par_iter()
        .map_init(
            || BallScratch::new(g.n()),
            |scratch, x| verifier.accepts_in(scratch, g, q, x),
        )
        .collect::<Result<Vec<bool>>>()?;
    Ok(ok
        .iter()
        .position(|&a| !a)
        .map_or(Verdict::Accept, Verdict::Reject))
}

/// Radius-1 check: root color in `1..=d+1` and different from every
/// neighbor's color.
pub fn coloring_verifier(d: usize) -> Verifier<u32> {
    Verifier::new(1, move |ball, colors| {
        let c = colors[0];
        (1..=d as u32 + 1).contains(&c) && ball.graph().neighbors(0).iter().all(|&w| colors[w] != c)
    })
}

/// Radius-1 independence check for `0 = in the set`: the root is outside the
/// set or every neighbor is.
pub fn independence_verifier() -> Verifier<u8> {
    Verifier::new(1, |ball, q| {
        q[0] != 0 || ball.graph().neighbors(0).iter().all(|&w| q[w] != 0)
    })
}

/// Largest label prefix usable as an initial color.
const MAX_COLOR_BITS: usize = 16;

/// Colors `1..=C` from `t`-bit prefixes, reduced to `1..=d+1` by one
/// synchronous round per color `C, C-1, ..., d+2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColorReduction {
    pub bits: usize,
    pub degree: usize,
}

impl ColorReduction {
    pub fn initial_colors(&self) -> u32 {
        1 << self.bits
    }

    pub fn rounds(&self) -> usize {
        (self.initial_colors() as usize).saturating_sub(self.degree + 1)
    }

    /// Oracle radius: enough for every round and for reading `bits` bits.
    pub fn radius(&self) -> usize {
        self.rounds().max(self.bits)
    }

    /// Runs the schedule on adjacency `adj` from `colors`. Each round reads
    /// only the previous round's colors.
    pub fn reduce(&self, adj: impl Fn(usize) -> Vec<usize>, colors: &mut Vec<u32>) {
        let n = colors.len();
        let top = self.degree as u32 + 1;
        let mut next = colors.clone();
        for c in (top + 1..=self.initial_colors()).rev() {
            for v in 0..n {
                next[v] = colors[v];
                if colors[v] == c {
                    let taken: Vec<u32> = adj(v).iter().map(|&w| colors[w]).collect();
                    next[v] = (1..=top).find(|k| !taken.contains(k)).unwrap_or(c);
                }
            }
            std::mem::swap(colors, &mut next);
        }
    }

    /// The whole schedule as one oracle of radius [`ColorReduction::radius`].
    pub fn oracle(self) -> Oracle<u32> {
        Oracle::procedure(self.radius(), move |canon| {
            let ball = &canon.ball;
            let mut colors: Vec<u32> = (0..ball.len())
                .map(|v| prefix_color(&ball.label(v)[..self.bits]))
                .collect();
            self.reduce(|v| ball.graph().neighbors(v).to_vec(), &mut colors);
            colors[0]
        })
    }
}

fn prefix_color(bits: &[u8]) -> u32 {
    bits.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b)) + 1
}

/// Result of [`local_proper_coloring`].
#[derive(Debug, Clone)]
pub struct ColoringRun {
    pub colors: QLabeling<u32>,
    pub schedule: ColorReduction,
    /// The oracle radius `m`.
    pub radius: usize,
    /// The input labeling padded to `m` bits, as read by the oracle.
    pub labeling: Labeling,
}

impl ColoringRun {
    pub fn oracle(&self) -> Oracle<u32> {
        self.schedule.oracle()
    }
}

/// A proper coloring with at most `d + 1` colors from a labeling whose
/// labels are distinct within distance 2.
pub fn local_proper_coloring(g: &Graph, lab: &Labeling) -> Result<ColoringRun> {
    lab.check_graph(g)?;
    let t = lab.require_distinct(2)?;
    if t > MAX_COLOR_BITS {
        return Err(Error::Precondition(format!(
            "{t}-bit initial colors need {} reduction rounds",
            1u64 << t
        )));
    }
    let schedule = ColorReduction {
        bits: t,
        degree: g.degree_bound(),
    };
    let m = schedule.radius();
    let labeling = lab.extended_to(m);
    let mut colors: Vec<u32> = (0..g.n())
        .map(|v| labeling.prefix_value(v, t) as u32 + 1)
        .collect();
    schedule.reduce(|v| g.neighbors(v).to_vec(), &mut colors);
    Ok(ColoringRun {
        colors: QLabeling(colors),
        schedule,
        radius: m,
        labeling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};
    use crate::labeling::power_greedy_labeling;

    fn fam(f: Family) -> Graph {
        generate(&f).unwrap()
    }

    #[test]
    fn constant_and_root_bit_oracles() {
        let g = fam(Family::Grid(3, 4));
        let lab = power_greedy_labeling(&g, 2);
        let q = run_oracle(&g, &lab, &Oracle::constant(1, 7u32)).unwrap();
        assert!(q.values().iter().all(|&c| c == 7));
        let first_bit = Oracle::procedure(1, |c| c.ball.label(0)[0]);
        let q = run_oracle(&g, &lab, &first_bit).unwrap();
        for v in 0..g.n() {
            assert_eq!(q[v], u8::from(lab.bits(v)[0]));
        }
    }

    #[test]
    fn shallow_labeling_is_rejected() {
        let g = fam(Family::Cycle(5));
        let lab = Labeling::constant(5, 1);
        assert!(matches!(
            run_oracle(&g, &lab, &Oracle::constant(2, 0u8)),
            Err(Error::LabelingTooShallow { .. })
        ));
    }

    #[test]
    fn tabulated_oracle_agrees_with_procedure() {
        let g = fam(Family::Cycle(8));
        let lab = power_greedy_labeling(&g, 2).extended_to(3);
        let degree_sum = Oracle::procedure(2, |c| c.ball.graph().edge_count() as u32);
        let table = degree_sum.tabulate([(&g, &lab)]).unwrap();
        assert_eq!(
            run_oracle(&g, &lab, &degree_sum).unwrap(),
            run_oracle(&g, &lab, &table).unwrap()
        );
    }

    #[test]
    fn coloring_verifier_cases() {
        let v = coloring_verifier(2);
        let p3 = fam(Family::Path(3));
        assert!(v.accepts_at(&p3, &QLabeling(vec![2, 1, 3]), 1).unwrap());
        assert!(!v.accepts_at(&p3, &QLabeling(vec![2, 2, 1]), 1).unwrap());
        assert!(!v.accepts_at(&p3, &QLabeling(vec![1, 4, 1]), 1).unwrap());
        let p4 = fam(Family::Path(4));
        assert_eq!(
            run_verifier(&p4, &QLabeling(vec![1, 2, 1, 2]), &v).unwrap(),
            Verdict::Accept
        );
        let c3 = fam(Family::Cycle(3));
        assert_eq!(
            run_verifier(&c3, &QLabeling(vec![1, 1, 1]), &coloring_verifier(2)).unwrap(),
            Verdict::Reject(0)
        );
        let yes = Verifier::new(0, |_, _: &[u8]| true);
        assert!(run_verifier(&c3, &QLabeling(vec![0, 0, 0]), &yes)
            .unwrap()
            .accepted());
    }

    #[test]
    fn coloring_small_cases() {
        let p2 = fam(Family::Path(2));
        let run = local_proper_coloring(&p2, &power_greedy_labeling(&p2, 2)).unwrap();
        let mut cs = run.colors.values().to_vec();
        cs.sort();
        assert_eq!(cs, vec![1, 2]);

        let c4 = fam(Family::Cycle(4));
        let lab = power_greedy_labeling(&c4, 2);
        assert_eq!(lab.depth(), 2);
        let run = local_proper_coloring(&c4, &lab).unwrap();
        assert_eq!(run.radius, 2);
        assert!(run_verifier(&c4, &run.colors, &coloring_verifier(2))
            .unwrap()
            .accepted());
        assert_eq!(
            run_oracle(&c4, &run.labeling, &run.oracle()).unwrap(),
            run.colors
        );
    }

    #[test]
    fn uncertified_labeling_is_refused() {
        let g = fam(Family::Cycle(6));
        assert!(matches!(
            local_proper_coloring(&g, &power_greedy_labeling(&g, 1)),
            Err(Error::NotCertified { radius: 2 })
        ));
    }

    #[test]
    fn grid_coloring_compiles() {
        let g = fam(Family::Grid(8, 8));
        let run = local_proper_coloring(&g, &power_greedy_labeling(&g, 2)).unwrap();
        assert!(run.colors.values().iter().all(|&c| (1..=5).contains(&c)));
        assert!(run_verifier(&g, &run.colors, &coloring_verifier(4))
            .unwrap()
            .accepted());
        assert_eq!(
            run_oracle(&g, &run.labeling, &run.oracle()).unwrap(),
            run.colors
        );
    }
}
