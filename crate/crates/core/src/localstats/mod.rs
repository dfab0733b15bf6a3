//! Spatial-side local statistics: k-level correlation sums, gap
//! distributions, simplex correlations and the gap sandwich.
//!
//! Conventions used throughout:
//!
//! * tuples are ordered and made of distinct *indices* (coincident values
//!   still occupy distinct slots);
//! * the lattice sum over `m ∈ ℤ^{k−1}` collapses to the nearest translate,
//!   which is valid because every window used has `2·support_radius < N`;
//! * sorting ties are broken by original index.

mod correlation;
mod gaps;
mod window;

pub use correlation::{k_level_correlation, k_level_correlation_brute, pair_correlation, pair_correlation_brute};
pub use gaps::{
    circular_gap_distribution, gap_distribution, gap_sandwich, simplex_correlation, simplex_correlation_brute,
    simplex_counts, GapDistribution, GapKind, GapSandwich,
};
pub use window::{bump_profile_integral, parse_window, Window};

use std::io::Write;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::seqgen::PointSet;

/// How a correlation value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    DirectWindow,
    BruteForce,
    Fourier,
}

/// A finite-N correlation sum with the inputs that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub value: f64,
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// `None` for external point sets.
    #[serde(serialize_with = "alpha_or_external")]
    pub alpha: Option<f64>,
    /// Window descriptor in CLI syntax.
    pub window: String,
    pub algorithm: Algorithm,
}

fn alpha_or_external<S: Serializer>(alpha: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match alpha {
        Some(a) => s.serialize_f64(*a),
        None => s.serialize_str("external"),
    }
}

impl CorrelationEstimate {
    pub(crate) fn new(value: f64, k: usize, points: &PointSet, window: &Window, algorithm: Algorithm) -> Self {
        Self {
            value,
            k,
            n: points.len(),
            alpha: points.spec().map(|s| s.alpha),
            window: window.to_string(),
            algorithm,
        }
    }
}

/// `C_k(N) = (1 − 1/N)(1 − 2/N)…(1 − (k−1)/N) = #𝒳_k / N^k`.
pub fn c_factor(k: usize, n: usize) -> Result<f64> {
    if k < 2 || k > n {
        return Err(Error::Domain(format!("c_factor needs 2 <= k <= N, got k={k}, N={n}")));
    }
    let nf = n as f64;
    Ok((1..k).map(|j| 1.0 - j as f64 / nf).product())
}

/// `∫ f`, the Poissonian limit of `R_k(f)`.
pub fn poisson_reference(window: &Window) -> f64 {
    window.integral()
}

/// `Σ_{k=1}^{M} (−1)^{k+1} x^k / k!`, the Taylor truncations of `1 − e^{−x}`.
pub fn poisson_gap_partial_sum(x: f64, m: usize) -> f64 {
    let mut term = 1.0;
    let mut acc = 0.0;
    for k in 1..=m {
        term *= x / k as f64;
        if k % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Formats with 17 significant digits (round-trips every `f64`).
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with columns `x, g`.
pub fn write_gap_csv<W: Write>(dist: &GapDistribution, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "g"]).map_err(csv_err)?;
    for (x, g) in dist.xs.iter().zip(&dist.g_values) {
        w.write_record([fmt17(*x), fmt17(*g)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// CSV with columns `param, value, reference`.
pub fn write_grid_csv<W: Write>(rows: &[(f64, f64, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["param", "value", "reference"]).map_err(csv_err)?;
    for (p, v, r) in rows {
        w.write_record([fmt17(*p), fmt17(*v), fmt17(*r)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}
