//! Laplacian spectra, spectral measures and Hausdorff distances between
//! compact subsets of the real line.
//!
//! Everything is generic over a [`Float`]; the crate root exports `f64` and
//! `f32` aliases. Measure weights are exact rationals.

use std::fmt::{self, Debug, Write as _};
use std::str::FromStr;

use nalgebra::{DMatrix, RealField};
use num_traits::Float;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::Rational;

pub const DEFAULT_SPECTRUM_CAP: usize = 4096;
pub const DEFAULT_CLUSTER_TOLERANCE: f64 = 1e-7;

/// Scalar bound used throughout the module: a num-traits float that the
/// dense eigensolver also accepts.
pub trait Real: Float + RealField + Copy + Debug + Send + Sync + 'static {}
impl<T: Float + RealField + Copy + Debug + Send + Sync + 'static> Real for T {}

fn lit<T: Real>(x: f64) -> T {
    T::from(x).expect("literal fits the scalar type")
}

/// Eigenvalues in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    values: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    /// Sorts the given values.
    pub fn from_values(mut values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("eigenvalues must be finite".into()));
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        Ok(Spectrum { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> Option<T> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<T> {
        self.values.last().copied()
    }

    pub fn trace(&self) -> T {
        self.values.iter().fold(T::zero(), |s, &v| s + v)
    }

    /// Number of eigenvalues with `|λ| < tol`.
    pub fn zero_multiplicity(&self, tol: T) -> usize {
        self.values.iter().filter(|&&v| Float::abs(v) < tol).count()
    }

    /// Chains of eigenvalues with consecutive gaps at most `tau` become one
    /// atom, placed at the chain mean.
    pub fn measure(&self, tau: T) -> SpectralMeasure<T> {
        let n = self.values.len() as i64;
        let mut atoms = Vec::new();
        let mut i = 0;
        while i < self.values.len() {
            let mut j = i + 1;
            while j < self.values.len() && self.values[j] - self.values[j - 1] <= tau {
                j += 1;
            }
            let sum = self.values[i..j].iter().fold(T::zero(), |s, &v| s + v);
            let mean = sum / T::from(j - i).expect("count fits");
            atoms.push((mean, Rational::new((j - i) as i64, n)));
            i = j;
        }
        SpectralMeasure { atoms }
    }

    /// `index,eigenvalue` rows, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{i},{}", sig_digits(v.to_f64().expect("finite"), 12));
        }
        out
    }
}

/// Atoms `(value, multiplicity / n)`, ascending by value.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure<T> {
    pub atoms: Vec<(T, Rational)>,
}

impl<T: Real> SpectralMeasure<T> {
    pub fn total(&self) -> Rational {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Weight of the atom within `tol` of `x`, zero if none.
    pub fn weight_near(&self, x: T, tol: T) -> Rational {
        self.atoms
            .iter()
            .filter(|a| Float::abs(a.0 - x) <= tol)
            .map(|a| a.1)
            .sum()
    }
}

/// Finite union of disjoint closed intervals, sorted. Points are
/// degenerate intervals, so finite spectra live here too.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSpec<T> {
    intervals: Vec<(T, T)>,
}

impl<T: Real> IntervalSpec<T> {
    /// Requires `a ≤ b` for each piece and sorted, pairwise disjoint pieces.
    pub fn new(intervals: Vec<(T, T)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(Error::Precondition(
                    "interval endpoints must satisfy a <= b".into(),
                ));
            }
        }
        if intervals.windows(2).any(|w| w[0].1 >= w[1].0) {
            return Err(Error::Precondition(
                "intervals must be sorted and disjoint".into(),
            ));
        }
        Ok(IntervalSpec { intervals })
    }

    pub fn interval(a: T, b: T) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    /// The set of the given points; duplicates merge.
    pub fn points(values: &[T]) -> Result<Self> {
        let mut v = values.to_vec();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Precondition("points must be finite".into()));
        }
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        v.dedup();
        Ok(IntervalSpec {
            intervals: v.into_iter().map(|x| (x, x)).collect(),
        })
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: T) -> bool {
        self.distance_to(x) == T::zero()
    }

    /// `inf_{y ∈ self} |x − y|`; infinite for the empty set.
    pub fn distance_to(&self, x: T) -> T {
        let iv = &self.intervals;
        // first piece starting strictly after x
        let k = iv.partition_point(|p| p.0 <= x);
        let mut best = T::infinity();
        if k > 0 {
            let (a, b) = iv[k - 1];
            debug_assert!(a <= x);
            best = if x <= b { T::zero() } else { x - b };
        }
        if k < iv.len() {
            best = Float::min(best, iv[k].0 - x);
        }
        best
    }

    /// `sup_{x ∈ self} dist(x, other)`. On each piece the distance to
    /// `other` is piecewise linear, so its maximum sits at an endpoint or
    /// at the midpoint of a gap of `other`.
    pub fn directed_distance(&self, other: &Self) -> T {
        let two = lit::<T>(2.0);
        let gaps: Vec<T> = other
            .intervals
            .windows(2)
            .map(|w| (w[0].1 + w[1].0) / two)
            .collect();
        let mut worst = T::zero();
        for &(a, b) in &self.intervals {
            worst = Float::max(
                worst,
                Float::max(other.distance_to(a), other.distance_to(b)),
            );
            let lo = gaps.partition_point(|&m| m < a);
            for &m in gaps[lo..].iter().take_while(|&&m| m <= b) {
                worst = Float::max(worst, other.distance_to(m));
            }
        }
        worst
    }
}

impl<T: Real> fmt::Display for IntervalSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (
                    a.to_f64().unwrap_or(f64::NAN),
                    b.to_f64().unwrap_or(f64::NAN),
                );
                if a == b {
                    format!("{{{}}}", sig_digits(a, 12))
                } else {
                    format!("[{},{}]", sig_digits(a, 12), sig_digits(b, 12))
                }
            })
            .collect();
        f.write_str(&parts.join(" u "))
    }
}

/// Anything usable as an argument of [`hausdorff_distance`].
pub trait CompactSet<T> {
    fn to_intervals(&self) -> Result<IntervalSpec<T>>;
}

impl<T: Real> CompactSet<T> for Spectrum<T> {
    fn to_intervals(&self) -> Result<IntervalSpec<T>> {
        IntervalSpec::points(&self.values)
    }
}

impl<T: Real> CompactSet<T> for IntervalSpec<T> {
    fn to_intervals(&self) -> Result<IntervalSpec<T>> {
        Ok(self.clone())
    }
}

impl<T: Real> CompactSet<T> for [T] {
    fn to_intervals(&self) -> Result<IntervalSpec<T>> {
        IntervalSpec::points(self)
    }
}

/// Symmetric Hausdorff distance; exact for any mix of points and intervals.
pub fn hausdorff_distance<T: Real>(
    a: &(impl CompactSet<T> + ?Sized),
    b: &(impl CompactSet<T> + ?Sized),
) -> Result<T> {
    let (a, b) = (a.to_intervals()?, b.to_intervals()?);
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(Float::max(a.directed_distance(&b), b.directed_distance(&a)))
}

/// Spectrum of the symmetric operator whose matrix has entry
/// `kernel(g, x, y)` for `y = x` or `y` adjacent to `x`, zero elsewhere.
pub fn kernel_spectrum<T: Real>(
    g: &Graph,
    cap: usize,
    kernel: impl Fn(&Graph, usize, usize) -> T,
) -> Result<Spectrum<T>> {
    let n = g.n();
    if n > cap {
        return Err(Error::CapExceeded { size: n, cap });
    }
    let mut m = DMatrix::<T>::zeros(n, n);
    for x in 0..n {
        m[(x, x)] = kernel(g, x, x);
        for &y in g.neighbors(x) {
            if y > x {
                let v = kernel(g, x, y);
                if v != kernel(g, y, x) {
                    return Err(Error::Precondition(format!(
                        "kernel is not symmetric at ({x}, {y})"
                    )));
                }
                m[(x, y)] = v;
                m[(y, x)] = v;
            }
        }
    }
    Spectrum::from_values(m.symmetric_eigenvalues().iter().copied().collect())
}

/// Spectrum of `D − A` with the default size cap.
pub fn laplacian_spectrum<T: Real>(g: &Graph) -> Result<Spectrum<T>> {
    laplacian_spectrum_with(g, DEFAULT_SPECTRUM_CAP)
}

pub fn laplacian_spectrum_with<T: Real>(g: &Graph, cap: usize) -> Result<Spectrum<T>> {
    kernel_spectrum(g, cap, |g, x, y| {
        if x == y {
            T::from(g.degree(x)).expect("degree fits")
        } else {
            -T::one()
        }
    })
}

pub fn spectral_measure<T: Real>(g: &Graph, tau: T) -> Result<SpectralMeasure<T>> {
    Ok(laplacian_spectrum::<T>(g)?.measure(tau))
}

/// Infinite graphs with a known Laplacian spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitFamily {
    /// `Z`, degree 2.
    Line,
    /// `Z²`, degree 4.
    Plane,
    /// The `d`-regular tree.
    RegularTree(usize),
}

impl FromStr for LimitFamily {
    type Err = Error;

    /// `line`, `plane`, or `tree:d` (also `tree d`).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split([':', ' ']).filter(|p| !p.is_empty()).collect();
        match parts.as_slice() {
            ["line"] | ["Z"] => Ok(LimitFamily::Line),
            ["plane"] | ["Z2"] => Ok(LimitFamily::Plane),
            ["tree", d] | ["regular-tree", d] => d
                .parse()
                .map(LimitFamily::RegularTree)
                .map_err(|_| Error::Precondition(format!("bad tree degree {d:?}"))),
            _ => Err(Error::Precondition(format!("unknown limit family {s:?}"))),
        }
    }
}

impl fmt::Display for LimitFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitFamily::Line => f.write_str("line"),
            LimitFamily::Plane => f.write_str("plane"),
            LimitFamily::RegularTree(d) => write!(f, "tree:{d}"),
        }
    }
}

pub fn limit_spectrum<T: Real>(family: LimitFamily) -> Result<IntervalSpec<T>> {
    match family {
        LimitFamily::Line => IntervalSpec::interval(T::zero(), lit(4.0)),
        LimitFamily::Plane => IntervalSpec::interval(T::zero(), lit(8.0)),
        LimitFamily::RegularTree(d) if d >= 2 => {
            let d = T::from(d).expect("degree fits");
            let spread = lit::<T>(2.0) * Float::sqrt(d - T::one());
            IntervalSpec::interval(d - spread, d + spread)
        }
        LimitFamily::RegularTree(d) => Err(Error::Precondition(format!(
            "regular tree needs degree at least 2, got {d}"
        ))),
    }
}

/// Hausdorff distance from each generated graph's spectrum to `target`.
pub fn convergence_curve<T: Real>(
    generate: impl Fn(usize) -> Result<Graph> + Sync,
    target: &IntervalSpec<T>,
    ns: &[usize],
) -> Result<Vec<(usize, T)>> {
    convergence_curve_with(generate, target, ns, DEFAULT_SPECTRUM_CAP)
}

pub fn convergence_curve_with<T: Real>(
    generate: impl Fn(usize) -> Result<Graph> + Sync,
    target: &IntervalSpec<T>,
    ns: &[usize],
    cap: usize,
) -> Result<Vec<(usize, T)>> {
    ns.par_iter()
        .map(|&n| {
            let spec = laplacian_spectrum_with::<T>(&generate(n)?, cap)?;
            Ok((n, hausdorff_distance(&spec, target)?))
        })
        .collect()
}

/// `n,hausdorff` rows, 12 significant digits.
pub fn curve_csv<T: Real>(curve: &[(usize, T)]) -> String {
    let mut out = String::from("n,hausdorff\n");
    for (n, h) in curve {
        let _ = writeln!(out, "{n},{}", sig_digits(h.to_f64().expect("finite"), 12));
    }
    out
}

/// Shortest rendering of `v` rounded to `digits` significant digits, in
/// positional notation unless the exponent is below -5 or at least `digits`.
pub fn sig_digits(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};
    use std::f64::consts::PI;

    fn fam(f: Family) -> Graph {
        generate(&f).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn small_spectra() {
        let k2 = fam(Family::Complete(2));
        assert!(close(
            laplacian_spectrum::<f64>(&k2).unwrap().values(),
            &[0.0, 2.0],
            1e-12
        ));
        let c4 = fam(Family::Cycle(4));
        let s = laplacian_spectrum::<f64>(&c4).unwrap();
        assert!(close(s.values(), &[0.0, 2.0, 2.0, 4.0], 1e-12));
        let e3 = Graph::edgeless(3);
        assert_eq!(
            laplacian_spectrum::<f64>(&e3).unwrap().values(),
            &[0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn cap_is_enforced() {
        let g = fam(Family::Cycle(10));
        assert!(matches!(
            laplacian_spectrum_with::<f64>(&g, 9),
            Err(Error::CapExceeded { size: 10, cap: 9 })
        ));
    }

    #[test]
    fn cycle_closed_form() {
        for n in [3usize, 7, 16, 33] {
            let s = laplacian_spectrum::<f64>(&fam(Family::Cycle(n))).unwrap();
            let mut expect: Vec<f64> = (0..n)
                .map(|k| 2.0 - 2.0 * (2.0 * PI * k as f64 / n as f64).cos())
                .collect();
            expect.sort_by(f64::total_cmp);
            assert!(close(s.values(), &expect, 1e-9), "C_{n}");
        }
    }

    #[test]
    fn measures() {
        let k2 = fam(Family::Complete(2));
        let m = spectral_measure::<f64>(&k2, DEFAULT_CLUSTER_TOLERANCE).unwrap();
        assert_eq!(m.atoms.len(), 2);
        assert_eq!(m.atoms[0].1, Rational::new(1, 2));
        let c4 = fam(Family::Cycle(4));
        let m = spectral_measure::<f64>(&c4, 1e-9).unwrap();
        let w: Vec<Rational> = m.atoms.iter().map(|a| a.1).collect();
        assert_eq!(
            w,
            vec![
                Rational::new(1, 4),
                Rational::new(1, 2),
                Rational::new(1, 4)
            ]
        );
        assert!((m.atoms[1].0 - 2.0).abs() < 1e-12);
        let e = spectral_measure::<f64>(&Graph::edgeless(5), 1e-7).unwrap();
        assert_eq!(e.atoms, vec![(0.0, Rational::from(1))]);
        assert_eq!(m.total(), Rational::from(1));
    }

    #[test]
    fn hausdorff_examples() {
        let pts = IntervalSpec::points(&[0.0, 2.0, 4.0]).unwrap();
        assert_eq!(hausdorff_distance(&pts, &pts).unwrap(), 0.0);
        let line = IntervalSpec::interval(0.0, 4.0).unwrap();
        assert_eq!(hausdorff_distance(&pts, &line).unwrap(), 1.0);
        assert_eq!(hausdorff_distance(&line, &pts).unwrap(), 1.0);
        assert_eq!(hausdorff_distance(&[0.0][..], &[3.0][..]).unwrap(), 3.0);
        let a = IntervalSpec::new(vec![(0.0, 1.0), (5.0, 6.0)]).unwrap();
        let b = IntervalSpec::interval(0.0, 6.0).unwrap();
        assert_eq!(hausdorff_distance(&a, &b).unwrap(), 2.0);
        let empty = IntervalSpec::<f64>::points(&[]).unwrap();
        assert!(matches!(
            hausdorff_distance(&empty, &b),
            Err(Error::EmptySet)
        ));
    }

    #[test]
    fn hausdorff_matches_dense_sampling() {
        let a = IntervalSpec::new(vec![(-1.0, 0.5), (2.0, 2.0), (3.0, 7.5)]).unwrap();
        let b = IntervalSpec::new(vec![(0.0, 0.0), (1.0, 1.25), (4.0, 4.0), (9.0, 10.0)]).unwrap();
        let sample = |s: &IntervalSpec<f64>| -> Vec<f64> {
            s.intervals()
                .iter()
                .flat_map(|&(x, y)| (0..=2000).map(move |i| x + (y - x) * i as f64 / 2000.0))
                .collect()
        };
        let brute = |p: &[f64], q: &IntervalSpec<f64>| {
            p.iter().map(|&x| q.distance_to(x)).fold(0.0, f64::max)
        };
        let h = brute(&sample(&a), &b).max(brute(&sample(&b), &a));
        let exact = hausdorff_distance(&a, &b).unwrap();
        assert!(exact >= h - 1e-12 && exact - h < 1e-2, "{exact} vs {h}");
    }

    #[test]
    fn interval_validation() {
        assert!(IntervalSpec::new(vec![(1.0, 0.0)]).is_err());
        assert!(IntervalSpec::new(vec![(0.0, 2.0), (1.0, 3.0)]).is_err());
        assert!(IntervalSpec::new(vec![(0.0, 1.0), (1.0, 3.0)]).is_err());
        assert_eq!(
            IntervalSpec::points(&[2.0, 1.0, 2.0])
                .unwrap()
                .intervals()
                .len(),
            2
        );
    }

    #[test]
    fn limits() {
        assert_eq!(
            limit_spectrum::<f64>(LimitFamily::Line)
                .unwrap()
                .intervals(),
            &[(0.0, 4.0)]
        );
        assert_eq!(
            limit_spectrum::<f64>(LimitFamily::Plane)
                .unwrap()
                .intervals(),
            &[(0.0, 8.0)]
        );
        let t = limit_spectrum::<f64>(LimitFamily::RegularTree(4)).unwrap();
        let (a, b) = t.intervals()[0];
        assert!((a - 0.5358983848622456).abs() < 1e-12 && (b - 7.464101615137754).abs() < 1e-12);
        assert!(limit_spectrum::<f64>(LimitFamily::RegularTree(1)).is_err());
        assert_eq!(
            "tree:4".parse::<LimitFamily>().unwrap(),
            LimitFamily::RegularTree(4)
        );
        assert_eq!("plane".parse::<LimitFamily>().unwrap(), LimitFamily::Plane);
        assert!("moebius".parse::<LimitFamily>().is_err());
    }

    #[test]
    fn cycle_curve_decreases() {
        let target = limit_spectrum::<f64>(LimitFamily::Line).unwrap();
        let curve =
            convergence_curve(|n| generate(&Family::Cycle(n)), &target, &[8, 16, 32, 64]).unwrap();
        assert!(curve.iter().all(|c| c.1 > 0.0));
        assert!(curve.windows(2).all(|w| w[1].1 < w[0].1));
        assert!(curve_csv(&curve).starts_with("n,hausdorff\n8,"));
    }

    #[test]
    fn kernel_hook() {
        let c4 = fam(Family::Cycle(4));
        // adjacency operator: eigenvalues -2, 0, 0, 2
        let s = kernel_spectrum::<f64>(&c4, 16, |_, x, y| if x == y { 0.0 } else { 1.0 }).unwrap();
        assert!(close(s.values(), &[-2.0, 0.0, 0.0, 2.0], 1e-12));
        let lopsided = kernel_spectrum::<f64>(&c4, 16, |_, x, y| (x * 10 + y) as f64);
        assert!(lopsided.is_err());
    }

    #[test]
    fn single_precision_spectrum() {
        let s = laplacian_spectrum::<f32>(&fam(Family::Cycle(4))).unwrap();
        assert!((s.values()[3] - 4.0).abs() < 1e-5);
    }

    #[test]
    fn csv_formatting() {
        assert_eq!(sig_digits(0.0, 12), "0");
        assert_eq!(sig_digits(2.0, 12), "2");
        assert_eq!(sig_digits(0.5358983848622456, 12), "0.535898384862");
        assert_eq!(sig_digits(7.464101615137754, 12), "7.46410161514");
        assert_eq!(sig_digits(-3.2e-16, 12), "-3.2e-16");
        assert_eq!(sig_digits(1234.5, 12), "1234.5");
        let s = Spectrum::from_values(vec![2.0, 0.0]).unwrap();
        assert_eq!(s.to_csv(), "index,eigenvalue\n0,0\n1,2\n");
    }
}
