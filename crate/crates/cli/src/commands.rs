use std::collections::BTreeSet;
use std::fs;

use cantor_core::ball::{ball_profile_with, bs_distance, d_gr, CanonConfig};
use cantor_core::graph::{write_edge_list, Family, Graph};
use cantor_core::labeling::{power_greedy_labeling, random_labeling, Certificate, Labeling};
use cantor_core::local::{coloring_verifier, local_proper_coloring, run_verifier};
use cantor_core::partition::{
    approx_mis, doubling_partition, epsilon_scale_search, exact_mis_with, fractional_partitions,
    hyperfinite_cut, partition_quality, DoublingPartition, FractionalStrategy, PartitionQuality,
    ScaleAttempt, ScaleSearch, DEFAULT_MIS_CAP,
};
use cantor_core::spectral::{
    convergence_curve_with, curve_csv, hausdorff_distance, laplacian_spectrum_with, limit_spectrum,
    IntervalSpec, LimitFamily, DEFAULT_SPECTRUM_CAP,
};
use cantor_core::{ratio_string, Error, Rational};
use serde_json::{json, Value};

use crate::spec::{
    emit, family, load_graph, parse_ratio, precondition, report, ExperimentSpec, Failure, Outcome,
};

/// Bits of the seeded labeling used by partition-based commands.
const LABEL_BITS: usize = 64;

pub fn gen(spec: &ExperimentSpec) -> Outcome {
    let fam = family(&spec.graphs[0], spec.seed)?;
    let text = write_edge_list(&cantor_core::graph::generate(&fam)?);
    match &spec.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn balls(spec: &ExperimentSpec) -> Outcome {
    let g = load_graph(&spec.graphs[0], spec.seed)?;
    let Some(k) = spec.radius else {
        return precondition("balls needs --radius");
    };
    let cfg = spec
        .cap
        .map_or_else(CanonConfig::default, CanonConfig::with_cap);
    let profile = ball_profile_with(&g, k, None, &cfg)?;
    let mut result = profile.to_json();
    result["types"] = json!(profile.len());
    result["total"] = json!(ratio_string(&profile.total()));
    emit(spec, &report(spec, result), &[])
}

pub fn converge(spec: &ExperimentSpec) -> Outcome {
    if spec.graphs.len() < 2 {
        return precondition("converge needs at least two graphs");
    }
    let k_max = spec.k_max.unwrap_or(4);
    if k_max == 0 {
        return precondition("--k-max must be at least 1");
    }
    let graphs = spec
        .graphs
        .iter()
        .map(|s| load_graph(s, spec.seed))
        .collect::<Outcome<Vec<Graph>>>()?;
    let m = graphs.len();
    let mut dist = vec![vec![json!("0/1"); m]; m];
    let mut agreement = vec![vec![json!(k_max); m]; m];
    let mut curves = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let d = d_gr(&graphs[i], &graphs[j], k_max)?;
            dist[i][j] = json!(ratio_string(&d.value()));
            dist[j][i] = dist[i][j].clone();
            agreement[i][j] = json!(d.agreement());
            agreement[j][i] = agreement[i][j].clone();
            let bs = (1..=k_max)
                .map(|k| {
                    Ok(json!(ratio_string(&bs_distance(
                        &graphs[i], &graphs[j], k
                    )?)))
                })
                .collect::<Result<Vec<Value>, Error>>()?;
            curves.push(json!({ "i": i, "j": j, "bs_distance": bs }));
        }
    }
    let result = json!({
        "k_max": k_max,
        "d_gr": dist,
        "agreement": agreement,
        "bs": curves,
    });
    emit(spec, &report(spec, result), &[])
}

pub fn color(spec: &ExperimentSpec) -> Outcome {
    let g = load_graph(&spec.graphs[0], spec.seed)?;
    let lab = power_greedy_labeling(&g, 2);
    let run = local_proper_coloring(&g, &lab)?;
    let d = g.degree_bound();
    let verdict = run_verifier(&g, &run.colors, &coloring_verifier(d))?;
    let used: BTreeSet<u32> = run.colors.values().iter().copied().collect();
    let result = json!({
        "degree_bound": d,
        "colors_used": used.len(),
        "max_color": used.last().copied().unwrap_or(0),
        "initial_bits": run.schedule.bits,
        "initial_colors": run.schedule.initial_colors(),
        "rounds": run.schedule.rounds(),
        "oracle_radius": run.radius,
        "verdict": verdict.to_json(),
    });
    emit(
        spec,
        &report(spec, result),
        &[("colors.txt".into(), run.colors.to_text())],
    )?;
    if verdict.accepted() {
        Ok(())
    } else {
        Err(Failure::Unreached)
    }
}

fn attempts_json(attempts: &[ScaleAttempt]) -> Value {
    attempts
        .iter()
        .map(|a| match a {
            ScaleAttempt::Ran {
                scale,
                quality,
                tiles,
                collapsed,
            } => {
                let mut v = quality.to_json(None);
                v["R"] = json!(scale);
                v["tiles"] = json!(tiles);
                v["collapsed"] = json!(collapsed);
                v
            }
            ScaleAttempt::Uncertified { scale, x, y } => {
                json!({ "R": scale, "uncertified": [x, y] })
            }
        })
        .collect()
}

/// The partition picked by `--radius` or `--eps`. On an unreachable `eps`
/// the failure report is returned instead.
enum Chosen {
    Found {
        dp: Box<DoublingPartition>,
        quality: PartitionQuality,
        search: Value,
    },
    Missed(Value),
}

fn choose_partition(spec: &ExperimentSpec, g: &Graph, lab: &mut Labeling) -> Outcome<Chosen> {
    let eps = spec.eps.as_deref().map(parse_ratio).transpose()?;
    if let Some(r) = spec.radius {
        if r == 0 {
            return precondition("--radius must be at least 1");
        }
        if let Certificate::Witness(x, y) = lab.certify_distinct(g, 4 * r)? {
            return precondition(format!(
                "seeded labels of {x} and {y} collide within {}; try another --seed",
                4 * r
            ));
        }
        let dp = doubling_partition(g, lab, r)?;
        let quality = partition_quality(g, &dp.partition)?;
        if let Some(eps) = eps {
            if quality.eps > eps {
                let mut v = quality.to_json(None);
                v["R"] = json!(r);
                return Ok(Chosen::Missed(
                    json!({ "status": "unreached", "attempt": v }),
                ));
            }
        }
        return Ok(Chosen::Found {
            dp: Box::new(dp),
            quality,
            search: Value::Null,
        });
    }
    let Some(eps) = eps else {
        return precondition("give --radius or --eps");
    };
    Ok(match epsilon_scale_search(g, lab, eps)? {
        ScaleSearch::Success {
            partition,
            quality,
            attempts,
            ..
        } => Chosen::Found {
            dp: Box::new(partition),
            quality,
            search: attempts_json(&attempts),
        },
        ScaleSearch::Failure { best, attempts } => Chosen::Missed(json!({
            "status": "unreached",
            "best": best.map(|(r, e)| json!({ "R": r, "eps_achieved": ratio_string(&e) })),
            "attempts": attempts_json(&attempts),
        })),
    })
}

pub fn partition(spec: &ExperimentSpec) -> Outcome {
    let g = load_graph(&spec.graphs[0], spec.seed)?;
    let mut lab = random_labeling(&g, LABEL_BITS, spec.seed);
    let (dp, quality, search) = match choose_partition(spec, &g, &mut lab)? {
        Chosen::Found {
            dp,
            quality,
            search,
        } => (dp, quality, search),
        Chosen::Missed(result) => {
            emit(spec, &report(spec, result), &[])?;
            return Err(Failure::Unreached);
        }
    };
    let cut = hyperfinite_cut(&g, &dp.partition)?;
    let mut result = json!({
        "status": "ok",
        "R": dp.scale,
        "tiles": dp.partition.len(),
        "max_tile_size": dp.partition.max_tile_size(),
        "quality": quality.to_json(Some(cut.edges.len())),
        "cut_bound": ratio_string(&cut.eps_bound),
        "attempts": search,
    });
    if let Some(q) = spec.q {
        let mp = fractional_partitions(
            &g,
            &lab,
            q,
            FractionalStrategy::Rotation { scale: dp.scale },
        )?;
        result["fractional"] = json!({
            "Q": q,
            "K": match mp.k.finite() { Some(k) => json!(k), None => json!("inf") },
            "p_achieved": ratio_string(&mp.p_achieved),
        });
    }
    emit(
        spec,
        &report(spec, result),
        &[("partition.txt".into(), dp.partition.to_text())],
    )
}

pub fn mis(spec: &ExperimentSpec) -> Outcome {
    let g = load_graph(&spec.graphs[0], spec.seed)?;
    let mut lab = random_labeling(&g, LABEL_BITS, spec.seed);
    let (dp, quality) = match choose_partition(spec, &g, &mut lab)? {
        Chosen::Found { dp, quality, .. } => (dp, quality),
        Chosen::Missed(result) => {
            emit(spec, &report(spec, result), &[])?;
            return Err(Failure::Unreached);
        }
    };
    let run = approx_mis(&g, &dp.partition)?;
    let verdict = run_verifier(&g, &run.labels, &run.verifier)?;
    let exact = match exact_mis_with(&g, spec.cap.unwrap_or(DEFAULT_MIS_CAP)) {
        Ok(sol) => Some(sol.size),
        Err(Error::CapExceeded { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let d = g.degree_bound() as i64;
    let bound = Rational::from(1) - Rational::from(d) * quality.eps;
    let ratio = exact.map(|e| {
        if e == 0 {
            Rational::from(1)
        } else {
            Rational::new(run.set.len() as i64, e as i64)
        }
    });
    let result = json!({
        "R": dp.scale,
        "quality": quality.to_json(None),
        "size": run.set.len(),
        "exact": exact,
        "ratio": ratio.map(|r| ratio_string(&r)),
        "bound": ratio_string(&bound),
        "meets_bound": ratio.map(|r| r >= bound),
        "verdict": verdict.to_json(),
    });
    let set: String = run.set.iter().map(|v| format!("{v}\n")).collect();
    emit(spec, &report(spec, result), &[("mis.txt".into(), set)])?;
    if verdict.accepted() {
        Ok(())
    } else {
        Err(Failure::Unreached)
    }
}

fn target_set(spec: &ExperimentSpec, target: &str, cap: usize) -> Outcome<IntervalSpec<f64>> {
    if let Ok(limit) = target.parse::<LimitFamily>() {
        return Ok(limit_spectrum(limit)?);
    }
    let g = load_graph(target, spec.seed)?;
    Ok(IntervalSpec::points(
        laplacian_spectrum_with::<f64>(&g, cap)?.values(),
    )?)
}

fn sized_family(template: &str, n: usize, seed: u64) -> Result<Family, Error> {
    let mut words: Vec<&str> = template
        .split([':', ' '])
        .filter(|w| !w.is_empty())
        .collect();
    let n = n.to_string();
    words.push(&n);
    Family::from_words(&words, seed)
}

pub fn spectrum(spec: &ExperimentSpec) -> Outcome {
    let template = &spec.graphs[0];
    let ns = spec.ns.as_deref().unwrap_or_default();
    let cap = spec.cap.unwrap_or(DEFAULT_SPECTRUM_CAP);
    let target = target_set(spec, spec.target.as_deref().unwrap_or("line"), cap)?;
    let make = |n| cantor_core::graph::generate(&sized_family(template, n, spec.seed)?);
    let curve = convergence_curve_with(make, &target, ns, cap)?;
    let mut artifacts = vec![("curve.csv".to_string(), curve_csv(&curve))];
    if spec.out.is_some() {
        for &n in ns {
            let s = laplacian_spectrum_with::<f64>(&make(n)?, cap)?;
            debug_assert_eq!(
                hausdorff_distance(&s, &target)?,
                curve.iter().find(|c| c.0 == n).expect("n in curve").1
            );
            artifacts.push((format!("spectrum-{n}.csv"), s.to_csv()));
        }
    }
    let result = json!({
        "target": target.to_string(),
        "curve": curve.iter().map(|&(n, h)| json!({ "n": n, "hausdorff": h })).collect::<Vec<_>>(),
    });
    emit(spec, &report(spec, result), &artifacts)
}
