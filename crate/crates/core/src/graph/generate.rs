use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// Deterministic graph families used by the experiments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Family {
    Cycle(usize),
    Path(usize),
    /// `width × height` grid, vertex `(r, c)` has id `r * width + c`.
    Grid(usize, usize),
    /// `n × n` torus.
    Torus(usize),
    /// Depth-`depth` ball of the `degree`-regular tree, root 0, BFS ids.
    TreeBall {
        degree: usize,
        depth: usize,
    },
    RandomRegular {
        degree: usize,
        n: usize,
        seed: u64,
    },
    Edgeless(usize),
    Complete(usize),
}

impl Family {
    /// Parses whitespace/colon separated words such as `["torus", "8"]`.
    /// `seed` is only consumed by random families.
    pub fn from_words(words: &[&str], seed: u64) -> Result<Family> {
        let bad = |msg: &str| Error::InfeasibleFamily(format!("{}: {msg}", words.join(" ")));
        let num = |i: usize| -> Result<usize> {
            words
                .get(i)
                .ok_or_else(|| bad("missing parameter"))?
                .parse::<usize>()
                .map_err(|_| bad("parameters must be non-negative integers"))
        };
        let name = *words.first().ok_or_else(|| bad("empty family"))?;
        let fam = match name {
            "cycle" => Family::Cycle(num(1)?),
            "path" => Family::Path(num(1)?),
            "grid" => {
                if let Some((w, h)) = words.get(1).and_then(|s| s.split_once('x')) {
                    let w = w.parse().map_err(|_| bad("bad width"))?;
                    let h = h.parse().map_err(|_| bad("bad height"))?;
                    Family::Grid(w, h)
                } else if words.len() > 2 {
                    Family::Grid(num(1)?, num(2)?)
                } else {
                    let n = num(1)?;
                    Family::Grid(n, n)
                }
            }
            "torus" => Family::Torus(num(1)?),
            "tree-ball" => Family::TreeBall {
                degree: num(1)?,
                depth: num(2)?,
            },
            "random-regular" => Family::RandomRegular {
                degree: num(1)?,
                n: num(2)?,
                seed: match words.get(3) {
                    Some(s) => s.parse().map_err(|_| bad("bad seed"))?,
                    None => seed,
                },
            },
            "edgeless" => Family::Edgeless(num(1)?),
            "complete" => Family::Complete(num(1)?),
            _ => return Err(bad("unknown family")),
        };
        Ok(fam)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let words: Vec<&str> = s.split([':', ' ']).filter(|w| !w.is_empty()).collect();
        Family::from_words(&words, 0)
    }
}

impl From<Family> for String {
    fn from(f: Family) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for Family {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Cycle(n) => write!(f, "cycle:{n}"),
            Family::Path(n) => write!(f, "path:{n}"),
            Family::Grid(w, h) => write!(f, "grid:{w}x{h}"),
            Family::Torus(n) => write!(f, "torus:{n}"),
            Family::TreeBall { degree, depth } => write!(f, "tree-ball:{degree}:{depth}"),
            Family::RandomRegular { degree, n, seed } => {
                write!(f, "random-regular:{degree}:{n}:{seed}")
            }
            Family::Edgeless(n) => write!(f, "edgeless:{n}"),
            Family::Complete(n) => write!(f, "complete:{n}"),
        }
    }
}

pub fn generate(family: &Family) -> Result<Graph> {
    let infeasible = |msg: &str| Err(Error::InfeasibleFamily(format!("{family}: {msg}")));
    match *family {
        Family::Cycle(n) => {
            if n < 3 {
                return infeasible("a simple cycle needs at least 3 vertices");
            }
            Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
        }
        Family::Path(n) => Graph::new(n, (1..n).map(|i| (i - 1, i))),
        Family::Grid(w, h) => {
            let id = |r: usize, c: usize| r * w + c;
            let mut edges = Vec::new();
            for r in 0..h {
                for c in 0..w {
                    if c + 1 < w {
                        edges.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < h {
                        edges.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            Graph::new(w * h, edges)
        }
        Family::Torus(n) => {
            if n < 3 {
                return infeasible("a simple torus needs side at least 3");
            }
            let id = |r: usize, c: usize| (r % n) * n + (c % n);
            let mut edges = Vec::with_capacity(2 * n * n);
            for r in 0..n {
                for c in 0..n {
                    edges.push((id(r, c), id(r, c + 1)));
                    edges.push((id(r, c), id(r + 1, c)));
                }
            }
            Graph::new(n * n, edges)
        }
        Family::TreeBall { degree, depth } => {
            if degree == 0 && depth > 0 {
                return infeasible("degree 0 admits no children");
            }
            let mut edges = Vec::new();
            let mut frontier = vec![0usize];
            let mut next_id = 1;
            for level in 0..depth {
                let children = if level == 0 { degree } else { degree - 1 };
                let mut next = Vec::with_capacity(frontier.len() * children);
                for &p in &frontier {
                    for _ in 0..children {
                        edges.push((p, next_id));
                        next.push(next_id);
                        next_id += 1;
                    }
                }
                frontier = next;
            }
            Graph::new(next_id, edges)
        }
        Family::RandomRegular { degree, n, seed } => random_regular(degree, n, seed)
            .map_err(|msg| Error::InfeasibleFamily(format!("{family}: {msg}"))),
        Family::Edgeless(n) => Ok(Graph::edgeless(n)),
        Family::Complete(n) => Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))),
    }
}

/// Uniform-ish random `degree`-regular simple graph by incremental pairing
/// of half-edges, restarting whenever the pairing gets stuck.
fn random_regular(degree: usize, n: usize, seed: u64) -> std::result::Result<Graph, String> {
    if (n * degree) % 2 == 1 {
        return Err("n·d must be even".into());
    }
    if degree > 0 && degree >= n {
        return Err("degree must be smaller than n".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const MAX_RESTARTS: usize = 10_000;
    for _ in 0..MAX_RESTARTS {
        if let Some(edges) = try_pairing(degree, n, &mut rng) {
            return Graph::new(n, edges).map_err(|e| e.to_string());
        }
    }
    Err("pairing did not converge".into())
}

fn try_pairing(degree: usize, n: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(usize, usize)>> {
    let mut points: Vec<usize> = (0..n)
        .flat_map(|v| std::iter::repeat_n(v, degree))
        .collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(degree); n];
    let mut edges = Vec::with_capacity(n * degree / 2);
    let suitable = |adj: &Vec<Vec<usize>>, u: usize, v: usize| u != v && !adj[u].contains(&v);
    while !points.is_empty() {
        let mut paired = false;
        for _ in 0..64 {
            let i = rng.gen_range(0..points.len());
            let j = rng.gen_range(0..points.len());
            if i != j && suitable(&adj, points[i], points[j]) {
                let (u, v) = (points[i], points[j]);
                let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                points.swap_remove(hi);
                points.swap_remove(lo);
                adj[u].push(v);
                adj[v].push(u);
                edges.push((u.min(v), u.max(v)));
                paired = true;
                break;
            }
        }
        if !paired {
            let any = (0..points.len())
                .any(|i| (i + 1..points.len()).any(|j| suitable(&adj, points[i], points[j])));
            if !any {
                return None;
            }
        }
    }
    Some(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_five() {
        let g = generate(&Family::Cycle(5)).unwrap();
        assert_eq!((g.n(), g.edge_count()), (5, 5));
    }

    #[test]
    fn torus_four_is_four_regular() {
        let g = generate(&Family::Torus(4)).unwrap();
        assert_eq!((g.n(), g.edge_count()), (16, 32));
        assert!((0..16).all(|x| g.degree(x) == 4));
    }

    #[test]
    fn tree_ball_counts() {
        let g = generate(&Family::TreeBall {
            degree: 3,
            depth: 2,
        })
        .unwrap();
        assert_eq!(g.n(), 10);
        assert!(g.is_forest());
        let g = generate(&Family::TreeBall {
            degree: 3,
            depth: 8,
        })
        .unwrap();
        assert_eq!(g.n(), 1 + 3 * 255);
    }

    #[test]
    fn random_regular_parity_and_reproducibility() {
        // n·d = 404 is even, so this one exists
        assert!(generate(&Family::RandomRegular {
            degree: 4,
            n: 101,
            seed: 0
        })
        .is_ok());
        assert!(generate(&Family::RandomRegular {
            degree: 3,
            n: 101,
            seed: 0
        })
        .is_err());
        let a = generate(&Family::RandomRegular {
            degree: 4,
            n: 128,
            seed: 7,
        })
        .unwrap();
        let b = generate(&Family::RandomRegular {
            degree: 4,
            n: 128,
            seed: 7,
        })
        .unwrap();
        assert_eq!(a, b);
        assert!((0..128).all(|x| a.degree(x) == 4));
        let c = generate(&Family::RandomRegular {
            degree: 4,
            n: 128,
            seed: 8,
        })
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn family_parsing_round_trips() {
        for fam in [
            Family::Cycle(16),
            Family::Grid(6, 8),
            Family::Torus(32),
            Family::TreeBall {
                degree: 3,
                depth: 8,
            },
            Family::RandomRegular {
                degree: 4,
                n: 128,
                seed: 3,
            },
        ] {
            assert_eq!(fam.to_string().parse::<Family>().unwrap(), fam);
        }
        assert_eq!(
            Family::from_words(&["grid", "6"], 0).unwrap(),
            Family::Grid(6, 6)
        );
        assert!("moebius:3".parse::<Family>().is_err());
    }
}
