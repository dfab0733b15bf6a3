//! Ensemble experiments over `α ∈ 𝒥 = [A, A+1]`: Monte-Carlo expectation
//! and variance of `R_k(f, α, N)`, power-law decay fits and the
//! `N_m = ⌊m^{2/ρ}⌋` schedule.
//!
//! Draw `i` of a plan is `A + U_i` where `U_i` is the first output of a
//! ChaCha8 stream with key `seed` and stream index `i`. The same `α_i` is
//! used for every `N` in the grid, and prefixes of the sample sequence are
//! stable when `samples` grows.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localstats::{c_factor, csv_err, fmt17, k_level_correlation, poisson_reference, Window};
use crate::oscint::AlphaInterval;
use crate::seqgen::{frac_parts, PointSet, PrecisionPolicy, SequenceSpec, DEFAULT_TARGET};

/// How `α` is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Sampling {
    #[default]
    Uniform,
    /// Every draw is this `α` (a zero-variance stream, for testing).
    PointMass { alpha: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub k: usize,
    #[serde(rename = "J")]
    pub interval: AlphaInterval,
    #[serde(rename = "N_grid")]
    pub n_grid: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub window: Window,
    pub beta: f64,
    #[serde(default)]
    pub sampling: Sampling,
}

impl ExperimentPlan {
    pub fn new(k: usize, a: f64, n_grid: Vec<usize>, samples: usize, seed: u64, window: Window) -> Result<Self> {
        let plan = Self {
            k,
            interval: AlphaInterval::new(a)?,
            n_grid,
            samples,
            seed,
            window,
            beta: 1.0,
            sampling: Sampling::Uniform,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Domain(format!("k must be at least 2, got {}", self.k)));
        }
        self.interval.validate()?;
        if self.samples < 2 {
            return Err(Error::Domain(format!("samples must be at least 2, got {}", self.samples)));
        }
        if self.n_grid.is_empty() || !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain("N_grid must be nonempty and strictly increasing".into()));
        }
        if !(self.beta.is_finite() && self.beta != 0.0) {
            return Err(Error::Domain(format!("beta must be finite and nonzero, got {}", self.beta)));
        }
        self.window.validate()?;
        if self.window.dimension() != self.k - 1 {
            return Err(Error::Domain(format!(
                "window {} has dimension {} but k = {} needs {}",
                self.window,
                self.window.dimension(),
                self.k,
                self.k - 1
            )));
        }
        if !self.window.is_smooth() {
            return Err(Error::Domain(format!(
                "expectation and variance runs need a smooth (gaussian or bump) window, got {}",
                self.window
            )));
        }
        if let Sampling::PointMass { alpha } = self.sampling {
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(Error::Domain(format!("point-mass alpha must be positive, got {alpha}")));
            }
        }
        Ok(())
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if self.n_grid.contains(&n) {
            Ok(())
        } else {
            Err(Error::Domain(format!("N = {n} is not in the plan's grid {:?}", self.n_grid)))
        }
    }

    /// `C_k(N)·∫f`.
    pub fn reference(&self, n: usize) -> Result<f64> {
        Ok(c_factor(self.k, n)? * poisson_reference(&self.window))
    }
}

/// `A + U` with `U` the first uniform of stream `i` under key `seed`.
pub fn alpha_stream(seed: u64, interval: &AlphaInterval, i: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    interval.a + rng.random::<f64>()
}

/// `α_i` for draw `i` (independent of `N` and of `samples`).
pub fn alpha_draw(plan: &ExperimentPlan, i: u64) -> f64 {
    match plan.sampling {
        Sampling::PointMass { alpha } => alpha,
        Sampling::Uniform => alpha_stream(plan.seed, &plan.interval, i),
    }
}

pub fn alpha_draws(plan: &ExperimentPlan) -> Vec<f64> {
    (0..plan.samples as u64).map(|i| alpha_draw(plan, i)).collect()
}

/// `R_k(f, α_i, N)` for every draw, using `points(α)` to build the point set.
pub fn evaluate_with<F>(plan: &ExperimentPlan, n: usize, points: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<PointSet> + Sync,
{
    plan.validate()?;
    plan.check_n(n)?;
    alpha_draws(plan)
        .par_iter()
        .map(|&alpha| Ok(k_level_correlation(&points(alpha)?, &plan.window, plan.k)?.value))
        .collect()
}

/// `R_k(f, α_i, N)` on `{β·n^{α_i}}`.
pub fn evaluate(plan: &ExperimentPlan, n: usize) -> Result<Vec<f64>> {
    let policy = PrecisionPolicy::auto(DEFAULT_TARGET);
    evaluate_with(plan, n, |alpha| frac_parts(&SequenceSpec::new(alpha, plan.beta, n)?, &policy))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub mean: f64,
    pub stderr: f64,
    /// `C_k(N)·∫f`.
    pub reference: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceEstimate {
    pub var: f64,
    /// Jackknife standard error.
    pub stderr: f64,
}

/// Mean about the first value, so a constant sample returns that value exactly.
fn shifted_mean(values: &[f64]) -> f64 {
    let x0 = values[0];
    x0 + values.iter().map(|v| v - x0).sum::<f64>() / values.len() as f64
}

pub fn expectation_from(values: &[f64], reference: f64) -> Result<Expectation> {
    if values.len() < 2 {
        return Err(Error::Domain("need at least two evaluations".into()));
    }
    let n = values.len() as f64;
    let mean = shifted_mean(values);
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    Ok(Expectation {
        mean,
        stderr: (ss / (n - 1.0) / n).sqrt(),
        reference,
    })
}

/// Mean of `(R_i − reference)²`, centred at the fixed reference.
pub fn variance_from(values: &[f64], reference: f64) -> Result<VarianceEstimate> {
    if values.len() < 2 {
        return Err(Error::Domain("need at least two evaluations".into()));
    }
    let d: Vec<f64> = values.iter().map(|v| (v - reference).powi(2)).collect();
    let n = d.len() as f64;
    let total: f64 = d.iter().sum();
    let leave_one_out: Vec<f64> = d.iter().map(|di| (total - di) / (n - 1.0)).collect();
    let jack_mean = shifted_mean(&leave_one_out);
    let ss: f64 = leave_one_out.iter().map(|t| (t - jack_mean).powi(2)).sum();
    Ok(VarianceEstimate {
        var: shifted_mean(&d),
        stderr: ((n - 1.0) / n * ss).sqrt(),
    })
}

pub fn expectation_estimate(plan: &ExperimentPlan, n: usize) -> Result<Expectation> {
    expectation_from(&evaluate(plan, n)?, plan.reference(n)?)
}

pub fn variance_estimate(plan: &ExperimentPlan, n: usize) -> Result<VarianceEstimate> {
    variance_from(&evaluate(plan, n)?, plan.reference(n)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rho_hat: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    #[serde(rename = "N_grid")]
    pub n_grid: Vec<f64>,
}

/// Least squares `log y = intercept + slope·log x`; returns `(slope, intercept, residuals)`.
pub fn log_log_fit(points: &[(f64, f64)]) -> Result<(f64, f64, Vec<f64>)> {
    if points.len() < 2 {
        return Err(Error::Domain(format!("need at least 2 points, got {}", points.len())));
    }
    if let Some((x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::Degenerate(format!("log-log fit needs positive values, got ({x}, {y})")));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all abscissae coincide".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = lx.iter().zip(&ly).map(|(x, y)| y - (intercept + slope * x)).collect();
    Ok((slope, intercept, residuals))
}

/// `ρ̂ = −slope` of `log var` against `log N`.
pub fn decay_fit(pairs: &[(f64, f64)]) -> Result<DecayFit> {
    if pairs.len() < 3 {
        return Err(Error::Domain(format!("decay fit needs at least 3 pairs, got {}", pairs.len())));
    }
    let (slope, intercept, residuals) = log_log_fit(pairs)?;
    Ok(DecayFit {
        rho_hat: -slope,
        intercept,
        residuals,
        n_grid: pairs.iter().map(|p| p.0).collect(),
    })
}

/// `⌊m^{2/ρ}⌋` for `m = 1..=m_max`, deduplicated.
pub fn nm_schedule(rho: f64, m_max: usize) -> Result<Vec<u64>> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    let e = 2.0 / rho;
    let mut out: Vec<u64> = (1..=m_max)
        .map(|m| {
            let v = (m as f64).powf(e);
            // Exact integer powers must not be floored one below by rounding.
            let r = v.round();
            if (v - r).abs() <= 1e-9 * r.max(1.0) {
                r as u64
            } else {
                v.floor() as u64
            }
        })
        .collect();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub expectation: Expectation,
    pub variance: VarianceEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub plan: ExperimentPlan,
    pub alphas: Vec<f64>,
    pub rows: Vec<GridRow>,
    /// Absent when fewer than three grid points or a variance is zero.
    pub fit: Option<DecayFit>,
    pub library_version: String,
    pub wall_clock_seconds: f64,
}

/// Expectation and variance at every `N` in the grid, plus the decay fit.
pub fn run_plan(plan: &ExperimentPlan) -> Result<ExperimentManifest> {
    let start = Instant::now();
    plan.validate()?;
    let mut rows = Vec::with_capacity(plan.n_grid.len());
    for &n in &plan.n_grid {
        let values = evaluate(plan, n)?;
        let reference = plan.reference(n)?;
        rows.push(GridRow {
            n,
            expectation: expectation_from(&values, reference)?,
            variance: variance_from(&values, reference)?,
        });
    }
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.variance.var)).collect();
    let fit = decay_fit(&pairs).ok();
    Ok(ExperimentManifest {
        plan: plan.clone(),
        alphas: alpha_draws(plan),
        rows,
        fit,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn write_manifest_json<W: Write>(manifest: &ExperimentManifest, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, manifest)?;
    Ok(())
}

/// CSV `N, variance, stderr`.
pub fn write_variance_csv<W: Write>(rows: &[GridRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["N", "variance", "stderr"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([r.n.to_string(), fmt17(r.variance.var), fmt17(r.variance.stderr)])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
