//! Finite-scale combinatorics of bounded-degree graphs: rooted-ball
//! statistics, proper labelings, local oracles, almost-finite partitions and
//! Laplacian spectra.

pub mod ball;
pub mod error;
pub mod graph;
pub mod labeling;
pub mod local;
pub mod partition;
pub mod spectral;

pub use error::{Error, Result};

/// Exact rational used for frequencies, isoperimetric constants and
/// distances that must compare without rounding.
pub type Rational = num_rational::Ratio<i64>;

/// `p/q` rendering that keeps the denominator even when it is 1.
pub fn ratio_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub type Spectrum64 = spectral::Spectrum<f64>;
pub type Spectrum32 = spectral::Spectrum<f32>;
pub type SpectralMeasure64 = spectral::SpectralMeasure<f64>;
pub type IntervalSpec64 = spectral::IntervalSpec<f64>;
pub type IntervalSpec32 = spectral::IntervalSpec<f32>;
