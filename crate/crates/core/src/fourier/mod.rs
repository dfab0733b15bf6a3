//! Frequency side of the correlation sums.
//!
//! Convention: `f̂(ξ) = ∫ f(x) e(−ξx) dx`, `e(z) = e^{2πiz}`, so Poisson
//! summation reads `Σ_m f(m) = Σ_n f̂(n)`. Phases `n·{β x^α}` at integer
//! frequencies are formed by wrapping multiplication of the 128-bit
//! fixed-point fractions from [`seqgen`](crate::seqgen), which is exact; the
//! only phase error is `|n|` times the fraction's certificate.

mod transform;

pub use transform::{bump_transform, gaussian_truncation_term, spherical_jn_over_zn, FourierWindow};

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localstats::{csv_err, fmt17, k_level_correlation, pair_correlation, Algorithm, CorrelationEstimate, Window};
use crate::seqgen::{frac_parts, scaled_frac, PointSet, PrecisionPolicy, SequenceSpec};

/// `2^-40`: required absolute phase accuracy after frequency multiplication.
pub const PHASE_TARGET: f64 = 9.094947017729282e-13;

/// Allowance for floating-point summation on both sides of a cross-check.
pub const ROUNDING_ALLOWANCE: f64 = 1e-10;

const TWO_POW_64: f64 = 18446744073709551616.0;

/// Fixed-point phases of a point set and their certificate.
struct Phases {
    fixed: Vec<u128>,
    err: f64,
}

impl Phases {
    fn of(points: &PointSet) -> Self {
        match points.fixed() {
            Some(f) => Self {
                fixed: f.to_vec(),
                err: points.fixed_err_bound(),
            },
            None => Self {
                // v < 1 has at most 53 significant bits, so v·2^64 truncates by < 2^-64.
                fixed: points.values().iter().map(|&v| ((v * TWO_POW_64) as u64 as u128) << 64).collect(),
                err: points.err_bound() + 1.0 / TWO_POW_64,
            },
        }
    }

    fn check(&self, freq: i64) -> Result<()> {
        let achieved = self.err * freq.unsigned_abs() as f64;
        if achieved > PHASE_TARGET {
            return Err(Error::PrecisionInfeasible {
                bits: 0,
                achieved,
                target: PHASE_TARGET,
            });
        }
        Ok(())
    }

    fn sum(&self, freq: i64) -> Complex64 {
        let m = freq as i128 as u128;
        let terms: Vec<Complex64> = self.fixed.iter().map(|f| unit(f.wrapping_mul(m))).collect();
        tree_sum(&terms)
    }
}

/// `e(phase / 2^128)`, reducing to `[−1/2, 1/2)` first.
fn unit(phase: u128) -> Complex64 {
    let t = (phase >> 64) as u64 as i64;
    let (s, c) = (2.0 * PI * (t as f64 / TWO_POW_64)).sin_cos();
    Complex64::new(c, s)
}

/// Pairwise summation whose split points depend only on the length.
pub(crate) fn tree_sum<T>(v: &[T]) -> T
where
    T: Copy + Send + Sync + Default + std::ops::Add<Output = T>,
{
    if v.len() <= 32 {
        return v.iter().fold(T::default(), |a, b| a + *b);
    }
    let (l, r) = v.split_at(v.len() / 2);
    if v.len() >= 1 << 14 {
        let (a, b) = rayon::join(|| tree_sum(l), || tree_sum(r));
        a + b
    } else {
        tree_sum(l) + tree_sum(r)
    }
}

/// `⌊N^{1+ε}⌋`, the frequency cutoff.
pub fn max_frequency(n: usize, epsilon: f64) -> i64 {
    ((n as f64).powf(1.0 + epsilon)).floor().max(1.0) as i64
}

/// `S(n) = Σ_{x ≤ N} e(n·ϑ_x)` at an integer frequency, from precomputed points.
pub fn exp_sum_points(freq: i64, points: &PointSet) -> Result<Complex64> {
    let phases = Phases::of(points);
    phases.check(freq)?;
    Ok(phases.sum(freq))
}

/// `S(ν) = Σ_{x=1}^{N} e(ν·β·x^α)`.
///
/// Integer `ν` reuse the fixed-point fractions (generated at a target of
/// `2^-40/|ν|`); other real `ν` reduce `ν·β·x^α` modulo one per term in
/// multi-precision. Terms are added in ascending `x` by pairwise summation.
pub fn exp_sum(nu: f64, spec: &SequenceSpec, policy: &PrecisionPolicy) -> Result<Complex64> {
    spec.validate()?;
    if nu.fract() == 0.0 && nu.abs() < 2f64.powi(62) {
        let freq = nu as i64;
        let target = policy.target_abs_err.min(PHASE_TARGET / (freq.unsigned_abs().max(1) as f64));
        let points = frac_parts(spec, &policy.with_target(target))?;
        return exp_sum_points(freq, &points);
    }
    let scaled = policy.with_target(PHASE_TARGET);
    let terms: Vec<Complex64> = (1..=spec.n as u64)
        .into_par_iter()
        .map(|x| {
            let (f, _) = scaled_frac(nu, x, spec, &scaled)?;
            let (s, c) = (2.0 * PI * f).sin_cos();
            Ok(Complex64::new(c, s))
        })
        .collect::<Result<_>>()?;
    Ok(tree_sum(&terms))
}

/// `(n, S(n))` for `n = 0..=n_max`.
pub fn spectrum(points: &PointSet, n_max: i64) -> Result<Vec<(i64, Complex64)>> {
    let phases = Phases::of(points);
    phases.check(n_max)?;
    Ok((0..=n_max).into_par_iter().map(|m| (m, phases.sum(m))).collect())
}

/// CSV with columns `n, re, im, abs2`.
pub fn write_spectrum_csv<W: Write>(rows: &[(i64, Complex64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "re", "im", "abs2"]).map_err(csv_err)?;
    for (n, s) in rows {
        w.write_record([n.to_string(), fmt17(s.re), fmt17(s.im), fmt17(s.norm_sqr())])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `(1/N²)·Σ_{|n| ≤ T} f̂(n/N)·(|S(n)|² − N)` for an even, real `f̂`.
pub fn r2_fourier_custom<F>(fhat: F, points: &PointSet, epsilon: f64) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let n = points.len();
    let nf = n as f64;
    let t = max_frequency(n, epsilon);
    let phases = Phases::of(points);
    phases.check(t)?;
    let terms: Vec<f64> = (1..=t)
        .into_par_iter()
        .map(|m| {
            let w = fhat(m as f64 / nf);
            if w == 0.0 {
                0.0
            } else {
                w * (phases.sum(m).norm_sqr() - nf)
            }
        })
        .collect();
    let zero = fhat(0.0) * (nf * nf - nf);
    Ok((zero + 2.0 * tree_sum(&terms)) / (nf * nf))
}

/// Truncated Fourier representation of `R_2(f)` from precomputed points.
pub fn r2_fourier_points(window: &FourierWindow, points: &PointSet, epsilon: f64) -> Result<CorrelationEstimate> {
    let value = r2_fourier_custom(|xi| window.transform_even(xi), points, epsilon)?;
    Ok(CorrelationEstimate::new(value, 2, points, window.base(), Algorithm::Fourier))
}

/// Points for `spec` whose fixed-point fractions support frequencies up to `t`.
pub fn points_for_frequencies(spec: &SequenceSpec, policy: &PrecisionPolicy, t: i64) -> Result<PointSet> {
    let target = policy.target_abs_err.min(PHASE_TARGET / t.max(1) as f64);
    frac_parts(spec, &policy.with_target(target))
}

/// `R_2(f, α, N)` via the truncated Poisson expansion with cutoff `N^{1+ε}`.
pub fn r2_fourier(
    window: &FourierWindow,
    spec: &SequenceSpec,
    epsilon: f64,
    policy: &PrecisionPolicy,
) -> Result<CorrelationEstimate> {
    let points = points_for_frequencies(spec, policy, max_frequency(spec.n, epsilon))?;
    r2_fourier_points(window, &points, epsilon)
}

/// `1 + ε − εs`: the exponent of `N` in the normalized tail.
pub fn tail_exponent(epsilon: f64, s: f64) -> f64 {
    1.0 + epsilon - epsilon * s
}

/// Smallest decay order with `tail_exponent(ε, s) ≤ −t`: `s = (1 + ε + t)/ε`.
pub fn decay_order_for(t: f64, epsilon: f64) -> f64 {
    (1.0 + epsilon + t) / epsilon
}

/// The order `2t/ε + 2` used for Gaussian windows, which decay faster than any power.
pub fn gaussian_decay_order(t: f64, epsilon: f64) -> f64 {
    2.0 * t / epsilon + 2.0
}

fn tail_at(window: &FourierWindow, n: f64, t: f64, s: f64) -> Result<f64> {
    let c = window.decay_constant(s)?;
    // 2·c_s·N^s·(T^{−s} + T^{1−s}/(s−1)), in logs.
    let ln = c.ln() + s * n.ln();
    let a = (ln - s * t.ln()).exp();
    let b = (ln + (1.0 - s) * t.ln()).exp() / (s - 1.0);
    Ok(2.0 * (a + b))
}

/// Bound on the omitted part `(1/N²)·Σ_{|n| > T} f̂(n/N)(|S(n)|² − N)`, `T = ⌊N^{1+ε}⌋`.
///
/// With `|f̂(ξ)| ≤ c_s|ξ|^{−s}` and `||S|² − N| < N²` the tail is at most
/// `2c_s N^s (T^{−s} + T^{1−s}/(s−1))`, which is `O(N^{1+ε−εs})`. Every
/// admissible order gives a valid bound, so the minimum over `s` and a grid
/// of orders (up to `s = 2t/ε + 2` territory for Gaussians, up to the
/// certified `p + 5/6` for bumps) is returned.
pub fn truncation_error_bound(window: &FourierWindow, n: usize, epsilon: f64, s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::Domain(format!("decay order must exceed 1, got {s}")));
    }
    if !(epsilon > 0.0) || n == 0 {
        return Err(Error::Domain(format!("need epsilon > 0 and N >= 1 (got {epsilon}, {n})")));
    }
    let s_max = match window.base() {
        Window::Gaussian { .. } => 1000.0,
        Window::Bump { order, .. } => *order as f64 + 5.0 / 6.0,
        _ => {
            return Err(Error::DecayUnknown(format!(
                "no certified Fourier decay for window {}",
                window.base()
            )))
        }
    };
    let nf = n as f64;
    let t = max_frequency(n, epsilon) as f64;
    let mut best = tail_at(window, nf, t, s)?;
    let mut order = 1.05;
    while order <= s_max {
        best = best.min(tail_at(window, nf, t, order)?);
        order += if order < 4.0 { 0.05 } else { 0.5 };
    }
    Ok(best)
}

/// Lipschitz constant of the one-dimensional profile.
fn lipschitz(window: &Window) -> f64 {
    match window {
        Window::Gaussian { sigma, .. } => 1.0 / (sigma * sigma * (2.0 * PI * std::f64::consts::E).sqrt()),
        Window::Bump { radius, order, .. } if *order >= 1 => {
            let p = *order as f64;
            let t = 1.0 / (2.0 * p - 1.0).sqrt();
            2.0 * p / radius * t * (1.0 - t * t).powf(p - 1.0)
        }
        _ => f64::INFINITY,
    }
}

/// Direct against Fourier-side `R_2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub epsilon: f64,
    pub window: String,
    pub direct: f64,
    pub fourier: f64,
    pub difference: f64,
    /// Sum of the four terms below plus [`ROUNDING_ALLOWANCE`].
    pub bound: f64,
    pub truncation: f64,
    pub window_truncation: f64,
    pub phase_error: f64,
    pub direct_error: f64,
    pub pass: bool,
}

/// Computes `R_2` both ways and checks they agree within the error budget.
pub fn cross_validate(
    window: &FourierWindow,
    spec: &SequenceSpec,
    epsilon: f64,
    policy: &PrecisionPolicy,
) -> Result<CrossValidation> {
    let n = spec.n;
    let nf = n as f64;
    let t = max_frequency(n, epsilon);
    let points = points_for_frequencies(spec, policy, t)?;
    let direct = k_level_correlation(&points, window.base(), 2)?.value;
    let fourier = r2_fourier_points(window, &points, epsilon)?.value;

    let truncation = truncation_error_bound(window, n, epsilon, gaussian_decay_order(8.0, epsilon).min(50.0))
        .or_else(|_| truncation_error_bound(window, n, epsilon, 1.05))?;
    let window_truncation = gaussian_truncation_term(window.base(), n);
    let err = Phases::of(&points).err;
    let weighted: f64 = (1..=t).map(|m| m as f64 * window.transform_even(m as f64 / nf).abs()).sum();
    let phase_error = 8.0 * PI * err * weighted * 1.01;
    let r = window.base().support_radius();
    let near_pairs = if 2.0 * (r + 1.0) < nf {
        pair_correlation(&points, -(r + 1.0), r + 1.0)?.value
    } else {
        nf
    };
    let direct_error = near_pairs * lipschitz(window.base()) * 2.0 * nf * points.err_bound();
    let bound = truncation + window_truncation + phase_error + direct_error + ROUNDING_ALLOWANCE;
    let difference = (direct - fourier).abs();
    Ok(CrossValidation {
        alpha: spec.alpha,
        beta: spec.beta,
        n,
        epsilon,
        window: window.base().to_string(),
        direct,
        fourier,
        difference,
        bound,
        truncation,
        window_truncation,
        phase_error,
        direct_error,
        pass: difference <= bound,
    })
}

/// `u(n) = (n_1, n_2 − n_1, …, n_{k−1} − n_{k−2}, −n_{k−1})`.
pub fn u_of_n(n: &[i64]) -> Vec<i64> {
    let mut u = Vec::with_capacity(n.len() + 1);
    let mut prev = 0;
    for &v in n {
        u.push(v - prev);
        prev = v;
    }
    u.push(-prev);
    u
}

/// Set partitions of `0..k` as block-label vectors (restricted growth strings).
fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn grow(labels: &mut Vec<usize>, max: usize, k: usize, out: &mut Vec<Vec<usize>>) {
        if labels.len() == k {
            out.push(labels.clone());
            return;
        }
        for b in 0..=max + 1 {
            labels.push(b);
            grow(labels, max.max(b), k, out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let mut labels = vec![0];
    grow(&mut labels, 0, k, &mut out);
    out
}

/// `Σ_{x ∈ 𝒳_k} e(⟨Δ(x), n⟩)` from precomputed points.
///
/// `⟨Δ(x), n⟩ = Σ_j u_j ϑ_{x_j}` with `u = u(n)`, so the unrestricted sum
/// over all k-tuples is `Π_j S(u_j)`. Distinct-index tuples are recovered by
/// Möbius inversion on the partition lattice:
/// `Σ_π Π_{B ∈ π} (−1)^{|B|−1}(|B|−1)!·S(Σ_{j∈B} u_j)`.
pub fn rk_fourier_term_points(n: &[i64], points: &PointSet) -> Result<Complex64> {
    if n.is_empty() || n.iter().all(|&v| v == 0) {
        return Err(Error::Precondition("rk_fourier_term needs a nonzero frequency tuple".into()));
    }
    let u = u_of_n(n);
    let k = u.len();
    let phases = Phases::of(points);
    phases.check(u.iter().map(|v| v.abs()).sum())?;
    let mut cache: HashMap<i64, Complex64> = HashMap::new();
    let mut total = Complex64::new(0.0, 0.0);
    for labels in set_partitions(k) {
        let blocks = labels.iter().max().map_or(0, |m| m + 1);
        let mut term = Complex64::new(1.0, 0.0);
        for b in 0..blocks {
            let members: Vec<usize> = (0..k).filter(|&j| labels[j] == b).collect();
            let freq: i64 = members.iter().map(|&j| u[j]).sum();
            let size = members.len();
            let mu = (1..size).fold(1.0, |acc, i| acc * i as f64) * if size % 2 == 0 { -1.0 } else { 1.0 };
            let s = *cache.entry(freq).or_insert_with(|| phases.sum(freq));
            term *= s * mu;
        }
        total += term;
    }
    Ok(total)
}

/// [`rk_fourier_term_points`] for a generated sequence.
pub fn rk_fourier_term(n: &[i64], spec: &SequenceSpec, policy: &PrecisionPolicy) -> Result<Complex64> {
    let reach: i64 = u_of_n(n).iter().map(|v| v.abs()).sum();
    let points = points_for_frequencies(spec, policy, reach)?;
    rk_fourier_term_points(n, &points)
}

/// Direct summation over all distinct k-tuples; refuses more than `budget` tuples.
pub fn rk_fourier_term_brute(n: &[i64], points: &PointSet, budget: u64) -> Result<Complex64> {
    if n.is_empty() || n.iter().all(|&v| v == 0) {
        return Err(Error::Precondition("rk_fourier_term needs a nonzero frequency tuple".into()));
    }
    let u = u_of_n(n);
    let k = u.len();
    let len = points.len() as u64;
    let tuples = (0..k as u64).fold(1u64, |acc, j| acc.saturating_mul(len.saturating_sub(j)));
    if tuples > budget {
        return Err(Error::Budget(format!("{tuples} tuples exceed the budget of {budget}")));
    }
    let phases = Phases::of(points);
    phases.check(u.iter().map(|v| v.abs()).sum())?;
    fn walk(ph: &[u128], u: &[i64], tuple: &mut Vec<usize>, acc: u128, out: &mut Vec<Complex64>) {
        let d = tuple.len();
        if d == u.len() {
            out.push(unit(acc));
            return;
        }
        for x in 0..ph.len() {
            if tuple.contains(&x) {
                continue;
            }
            tuple.push(x);
            walk(ph, u, tuple, acc.wrapping_add(ph[x].wrapping_mul(u[d] as i128 as u128)), out);
            tuple.pop();
        }
    }
    let mut terms = Vec::with_capacity(tuples as usize);
    walk(&phases.fixed, &u, &mut Vec::with_capacity(k), 0, &mut terms);
    Ok(tree_sum(&terms))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainKind {
    /// `(k−1)`-tuples with `‖n‖_∞ ≤ N^{1+ε}`.
    NBox,
    /// `k`-tuples with `1 ≤ ‖u‖_∞ ≤ 2N^{1+ε}` and `Σ u_i = 0`.
    USet,
}

/// The frequency sets of the truncated k-level expansion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyDomain {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub epsilon: f64,
    pub kind: DomainKind,
}

impl FrequencyDomain {
    pub fn bound(&self) -> i64 {
        let t = max_frequency(self.n, self.epsilon);
        match self.kind {
            DomainKind::NBox => t,
            DomainKind::USet => 2 * t,
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let sup = v.iter().map(|x| x.abs()).max().unwrap_or(0);
        match self.kind {
            DomainKind::NBox => v.len() + 1 == self.k && sup <= self.bound(),
            DomainKind::USet => v.len() == self.k && sup >= 1 && sup <= self.bound() && v.iter().sum::<i64>() == 0,
        }
    }

    /// Lexicographic enumeration of the N-box (`(2T+1)^{k−1}` tuples).
    pub fn iter_nbox(&self) -> impl Iterator<Item = Vec<i64>> {
        let t = max_frequency(self.n, self.epsilon);
        let dim = self.k.saturating_sub(1);
        let side = (2 * t + 1) as u64;
        let count = side.pow(dim as u32);
        (0..count).map(move |mut idx| {
            let mut v = vec![0i64; dim];
            for slot in v.iter_mut().rev() {
                *slot = (idx % side) as i64 - t;
                idx /= side;
            }
            v
        })
    }
}
