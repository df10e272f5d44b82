use std::fs;
use std::path::{Path, PathBuf};

use cantor_core::graph::{generate, parse_edge_list, Family, Graph};
use cantor_core::{Error, Rational};
use serde::Serialize;
use serde_json::{json, Value};

/// Everything needed to rerun an invocation. Embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSpec {
    pub command: String,
    /// Family strings or edge-list paths, as given.
    pub graphs: Vec<String>,
    pub seed: u64,
    pub radius: Option<usize>,
    pub eps: Option<String>,
    pub k_max: Option<usize>,
    pub q: Option<usize>,
    pub cap: Option<usize>,
    pub ns: Option<Vec<usize>>,
    pub target: Option<String>,
    pub out: Option<PathBuf>,
}

/// Why a command did not exit 0.
#[derive(Debug)]
pub enum Failure {
    /// Bad input or violated precondition; exit code 2.
    Precondition(String),
    /// The experiment ran but missed its goal; the report is still
    /// emitted. Exit code 3.
    Unreached,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Precondition(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Precondition(e.to_string())
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;

pub fn precondition<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Precondition(msg.into()))
}

/// An existing file is read as an edge list, anything else is parsed as a
/// family string such as `torus:8` or `random-regular 4 128`.
pub fn load_graph(arg: &str, seed: u64) -> Outcome<Graph> {
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(parse_edge_list(&fs::read_to_string(path)?)?);
    }
    Ok(generate(&family(arg, seed)?)?)
}

pub fn family(arg: &str, seed: u64) -> Outcome<Family> {
    let words: Vec<&str> = arg.split([':', ' ']).filter(|w| !w.is_empty()).collect();
    Ok(Family::from_words(&words, seed)?)
}

/// Accepts `p/q`, integers and plain decimals such as `0.25`.
pub fn parse_ratio(s: &str) -> Outcome<Rational> {
    let bad = || Failure::Precondition(format!("cannot read {s:?} as a rational"));
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let denom = 10i64.pow(frac.len() as u32);
        let negative = int.starts_with('-');
        let whole: i64 = match int.trim_start_matches('-') {
            "" => 0,
            w => w.parse().map_err(|_| bad())?,
        };
        let frac: i64 = frac.parse().map_err(|_| bad())?;
        let v = Rational::new(whole * denom + frac, denom);
        return Ok(if negative { -v } else { v });
    }
    s.parse().map_err(|_| bad())
}

/// Full report: version, spec and the command's result.
pub fn report(spec: &ExperimentSpec, result: Value) -> String {
    let doc = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "spec": spec,
        "result": result,
    });
    serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
}

/// Writes named artifacts under `--out`, or prints the report when no
/// directory was given.
pub fn emit(spec: &ExperimentSpec, report_text: &str, artifacts: &[(String, String)]) -> Outcome {
    match &spec.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("report.json"), report_text)?;
            for (name, body) in artifacts {
                fs::write(dir.join(name), body)?;
            }
        }
        None => print!("{report_text}"),
    }
    Ok(())
}
