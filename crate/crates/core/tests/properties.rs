//! Cross-checks of the core algorithms against independent brute-force
//! oracles written here.

use cantor_core::ball::{
    ball_profile, ball_set, canonicalize, d_gr, CanonConfig, LabelKind, RootedBall, TopDistance,
};
use cantor_core::graph::{distance, generate, Distance, Family, Graph};
use cantor_core::labeling::{power_greedy_labeling, random_labeling, Certificate, Labeling};
use cantor_core::local::{run_oracle, ColorReduction, Oracle};
use cantor_core::Rational;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut ChaCha8Rng, n: usize, edges: usize, max_deg: usize) -> Graph {
    let mut deg = vec![0; n];
    let mut list = Vec::new();
    for _ in 0..edges * 4 {
        if list.len() == edges {
            break;
        }
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (u, v) = (u.min(v), u.max(v));
        if u == v || deg[u] == max_deg || deg[v] == max_deg || list.contains(&(u, v)) {
            continue;
        }
        deg[u] += 1;
        deg[v] += 1;
        list.push((u, v));
    }
    Graph::new(n, list).unwrap()
}

/// Root-preserving, label-preserving isomorphism by backtracking.
fn brute_isomorphic(a: &RootedBall, b: &RootedBall) -> bool {
    let n = a.len();
    if n != b.len() || a.graph().edge_count() != b.graph().edge_count() {
        return false;
    }
    fn extend(a: &RootedBall, b: &RootedBall, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let v = map.len();
        if v == a.len() {
            return true;
        }
        for w in 0..b.len() {
            if used[w] || (v == 0) != (w == 0) {
                continue;
            }
            if a.graph().degree(v) != b.graph().degree(w) || a.label(v) != b.label(w) {
                continue;
            }
            let consistent =
                (0..v).all(|u| a.graph().has_edge(u, v) == b.graph().has_edge(map[u], w));
            if consistent {
                map.push(w);
                used[w] = true;
                if extend(a, b, map, used) {
                    return true;
                }
                map.pop();
                used[w] = false;
            }
        }
        false
    }
    extend(a, b, &mut Vec::new(), &mut vec![false; n])
}

fn code(b: &RootedBall) -> Vec<u8> {
    canonicalize(b, &CanonConfig::default())
        .unwrap()
        .bytes()
        .to_vec()
}

#[test]
fn canonical_codes_agree_with_brute_force_isomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut balls = Vec::new();
    for _ in 0..120 {
        let n = rng.gen_range(4..=12);
        let e = rng.gen_range(n - 1..=n + 3);
        let g = random_graph(&mut rng, n, e, 4);
        let labeled = rng.gen_bool(0.5);
        let k = rng.gen_range(1..=3);
        let ball = if labeled {
            let bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            RootedBall::extract_with(&g, 0, k, LabelKind::Bits, |v| vec![bits[v]])
        } else {
            RootedBall::extract(&g, 0, k)
        };
        balls.push(ball);
    }
    let codes: Vec<Vec<u8>> = balls.iter().map(code).collect();
    let mut iso_pairs = 0;
    for i in 0..balls.len() {
        // a shuffled copy is always isomorphic
        let mut pos: Vec<usize> = (1..balls[i].len()).collect();
        pos.shuffle(&mut rng);
        pos.insert(0, 0);
        let shuffled = balls[i].permuted(&pos);
        assert_eq!(code(&shuffled), codes[i]);
        for j in i + 1..balls.len() {
            if balls[i].kind() != balls[j].kind() || balls[i].radius() != balls[j].radius() {
                continue;
            }
            let iso = brute_isomorphic(&balls[i], &balls[j]);
            iso_pairs += usize::from(iso);
            assert_eq!(codes[i] == codes[j], iso, "balls {i} and {j}");
        }
    }
    assert!(iso_pairs > 0, "corpus should contain isomorphic pairs");
}

#[test]
fn small_regular_balls_are_pairwise_distinguished() {
    // all rooted 1-balls with up to 4 leaves and any edges among them
    let mut balls = Vec::new();
    for leaves in 0..=4usize {
        let pairs: Vec<(usize, usize)> = (1..=leaves)
            .flat_map(|u| (u + 1..=leaves).map(move |v| (u, v)))
            .collect();
        for mask in 0u32..1 << pairs.len() {
            let mut edges: Vec<(usize, usize)> = (1..=leaves).map(|v| (0, v)).collect();
            edges.extend(
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e),
            );
            let g = Graph::new(leaves + 1, edges).unwrap();
            balls.push(RootedBall::from_parts(g, 1, LabelKind::Unlabeled, Vec::new()).unwrap());
        }
    }
    let codes: Vec<Vec<u8>> = balls.iter().map(code).collect();
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            assert_eq!(codes[i] == codes[j], brute_isomorphic(&balls[i], &balls[j]));
        }
    }
    let distinct: std::collections::BTreeSet<_> = codes.iter().collect();
    // graphs on ≤ 4 vertices: 1 + 1 + 2 + 4 + 11
    assert_eq!(distinct.len(), 19);
}

fn arb_graph() -> impl Strategy<Value = (Graph, Vec<usize>)> {
    (3usize..14, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = rng.gen_range(n - 1..=2 * n);
        let g = random_graph(&mut rng, n, e, 3);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        (g, perm)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn profiles_are_relabeling_invariant((g, perm) in arb_graph(), k in 0usize..4) {
        let h = g.relabeled(&perm);
        prop_assert_eq!(ball_profile(&g, k).unwrap(), ball_profile(&h, k).unwrap());
        for (x, &px) in perm.iter().enumerate() {
            let a = canonicalize(&RootedBall::extract(&g, x, k), &CanonConfig::default()).unwrap();
            let b = canonicalize(&RootedBall::extract(&h, px, k), &CanonConfig::default()).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn profile_weights_sum_to_one((g, _) in arb_graph(), k in 0usize..4) {
        prop_assert_eq!(ball_profile(&g, k).unwrap().total(), Rational::from(1));
    }

    #[test]
    fn distinct_certificate_matches_pairwise_scan((g, _) in arb_graph(), bits in 1usize..8, seed in any::<u64>(), r in 1usize..4) {
        let lab = random_labeling(&g, bits, seed);
        let within: Vec<(usize, usize)> = (0..g.n())
            .flat_map(|x| (x + 1..g.n()).map(move |y| (x, y)))
            .filter(|&(x, y)| distance(&g, x, y) <= Distance::Finite(r))
            .collect();
        let separated = |t: usize| within.iter().all(|&(x, y)| lab.prefix(x, t) != lab.prefix(y, t));
        match lab.check_distinct(&g, r).unwrap() {
            Certificate::Certified(t) => {
                prop_assert!(separated(t));
                prop_assert!(t == 1 || !separated(t - 1));
            }
            Certificate::Witness(x, y) => {
                prop_assert!(!separated(bits));
                prop_assert_eq!(lab.bits(x), lab.bits(y));
                prop_assert!(distance(&g, x, y) <= Distance::Finite(r));
            }
        }
    }
}

#[test]
fn topological_distance_is_an_ultrametric() {
    let corpus: Vec<Graph> = [
        Family::Cycle(5),
        Family::Cycle(6),
        Family::Cycle(9),
        Family::Cycle(12),
        Family::Path(7),
        Family::Path(12),
        Family::Grid(3, 4),
        Family::Torus(4),
        Family::Torus(5),
        Family::Complete(4),
    ]
    .iter()
    .map(|f| generate(f).unwrap())
    .collect();
    let h = 8;
    let m = corpus.len();
    let mut d = vec![vec![Rational::from(0); m]; m];
    for i in 0..m {
        assert_eq!(
            d_gr(&corpus[i], &corpus[i], h).unwrap(),
            TopDistance::AgreeToHorizon(h)
        );
        for j in i + 1..m {
            d[i][j] = d_gr(&corpus[i], &corpus[j], h).unwrap().value();
            d[j][i] = d_gr(&corpus[j], &corpus[i], h).unwrap().value();
            assert_eq!(d[i][j], d[j][i]);
        }
    }
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                assert!(d[i][k] <= d[i][j].max(d[j][k]), "{i} {j} {k}");
            }
        }
    }
}

#[test]
fn cycle_distances_follow_the_girth() {
    for n in 4..=12usize {
        for m in n + 1..=14 {
            let a = generate(&Family::Cycle(n)).unwrap();
            let b = generate(&Family::Cycle(m)).unwrap();
            let expect = Rational::new(1, 1 << (n / 2 - 1));
            assert_eq!(d_gr(&a, &b, 10).unwrap().value(), expect, "C{n} C{m}");
        }
    }
}

/// Graft `B_{m+1}(g, x)` onto a fresh random graph through the outer sphere.
/// The labeled `m`-ball at the graft root is unchanged.
fn transplant(
    g: &Graph,
    lab: &Labeling,
    x: usize,
    m: usize,
    rng: &mut ChaCha8Rng,
) -> (Graph, Labeling, usize) {
    let ball = cantor_core::graph::ball(g, x, m + 1);
    let inner = ball.vertices.len();
    let extra = rng.gen_range(3..12);
    let filler = random_graph(rng, extra, extra + 2, 3);
    let mut host = ball.graph.disjoint_union(&filler);
    let outer: Vec<usize> = ball
        .vertices
        .iter()
        .enumerate()
        .filter(|&(_, &v)| distance(g, x, v) == Distance::Finite(m + 1))
        .map(|(i, _)| i)
        .collect();
    let mut edges: Vec<(usize, usize)> = host.edges().collect();
    for &o in &outer {
        edges.push((o, inner + rng.gen_range(0..extra)));
    }
    edges.sort();
    edges.dedup();
    host = Graph::new(inner + extra, edges).unwrap();
    let depth = lab.depth();
    let fresh = random_labeling(&host, depth, rng.gen());
    let labels = Labeling::from_fn(host.n(), depth, |v, i| {
        if v < inner {
            lab.bits(ball.vertices[v])[i]
        } else {
            fresh.bits(v)[i]
        }
    });
    let root = ball.vertices.iter().position(|&v| v == x).unwrap();
    (host, labels, root)
}

#[test]
fn oracle_outputs_depend_only_on_the_labeled_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = generate(&Family::RandomRegular {
        degree: 3,
        n: 60,
        seed: 2,
    })
    .unwrap();
    let schedule = ColorReduction { bits: 3, degree: 3 };
    let m = schedule.radius();
    let lab = random_labeling(&g, m, 8);
    let oracle = schedule.oracle();
    let code_oracle = Oracle::procedure(m, |c| c.code.clone());
    let base = run_oracle(&g, &lab, &oracle).unwrap();
    let base_codes = run_oracle(&g, &lab, &code_oracle).unwrap();
    for trial in 0..30 {
        let x = trial * 2;
        let (h, hl, root) = transplant(&g, &lab, x, m, &mut rng);
        let codes = run_oracle(&h, &hl, &code_oracle).unwrap();
        assert_eq!(codes[root], base_codes[x]);
        assert_eq!(run_oracle(&h, &hl, &oracle).unwrap()[root], base[x]);
    }
}

/// Pairs within `r` whose `s`-balls labeled by `s`-bit prefixes are
/// isomorphic, by brute force.
fn clashing_pairs(g: &Graph, lab: &Labeling, r: usize, s: usize) -> usize {
    let mut clashes = 0;
    for x in 0..g.n() {
        for y in x + 1..g.n() {
            if distance(g, x, y) > Distance::Finite(r) {
                continue;
            }
            let a = RootedBall::extract_labeled(g, x, s, lab, s).unwrap();
            let b = RootedBall::extract_labeled(g, y, s, lab, s).unwrap();
            clashes += usize::from(brute_isomorphic(&a, &b));
        }
    }
    clashes
}

#[test]
fn proper_certificates_are_sound_minimal_and_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut certified = 0;
    for _ in 0..40 {
        let n = rng.gen_range(4..=10);
        let e = rng.gen_range(n - 1..=n + 2);
        let g = random_graph(&mut rng, n, e, 3);
        let lab = random_labeling(&g, rng.gen_range(1..=4), rng.gen());
        let r = rng.gen_range(1..=2);
        match lab.verify_proper(&g, r).unwrap() {
            Certificate::Certified(s) => {
                certified += 1;
                assert_eq!(clashing_pairs(&g, &lab, r, s), 0);
                if s > 1 {
                    assert!(
                        clashing_pairs(&g, &lab, r, s - 1) > 0,
                        "s = {s} is not least"
                    );
                }
                // deepening keeps the certificate
                for s2 in s + 1..=lab.depth() {
                    assert_eq!(clashing_pairs(&g, &lab, r, s2), 0);
                }
            }
            Certificate::Witness(x, y) => {
                assert!(distance(&g, x, y) <= Distance::Finite(r));
                let d = lab.depth();
                let a = RootedBall::extract_labeled(&g, x, d, &lab, d).unwrap();
                let b = RootedBall::extract_labeled(&g, y, d, &lab, d).unwrap();
                assert!(brute_isomorphic(&a, &b));
            }
        }
    }
    assert!(certified > 5);
}

#[test]
fn power_greedy_bits_do_not_grow_with_n() {
    for r in 1..=2usize {
        let (d, r32) = (4u32, r as u32);
        let bound = (d * (d - 1).pow(r32 - 1) * r32 + 1)
            .next_power_of_two()
            .trailing_zeros() as usize;
        for n in [8usize, 16, 32, 64] {
            let g = generate(&Family::Grid(n, n)).unwrap();
            let lab = power_greedy_labeling(&g, r);
            assert!(
                lab.depth() <= bound,
                "grid {n}, r = {r}: {} bits > {bound}",
                lab.depth()
            );
            assert!(lab.distinct_bits(r).is_some());
        }
    }
}

#[test]
fn equal_ball_sets_stay_equal_at_smaller_radii() {
    let corpus: Vec<Graph> = [
        Family::Cycle(7),
        Family::Cycle(8),
        Family::Cycle(15),
        Family::Path(9),
        Family::Grid(5, 6),
        Family::Grid(6, 6),
        Family::Torus(5),
        Family::Torus(7),
        Family::TreeBall {
            degree: 3,
            depth: 4,
        },
    ]
    .iter()
    .map(|f| generate(f).unwrap())
    .collect();
    let sets: Vec<Vec<_>> = corpus
        .iter()
        .map(|g| (0..=4).map(|k| ball_set(g, k, None).unwrap()).collect())
        .collect();
    let mut checked = 0;
    for a in &sets {
        for b in &sets {
            for k in 0..=4 {
                if a[k] == b[k] {
                    assert!((0..k).all(|j| a[j] == b[j]));
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 9 * 5);
}
