//! Exponential-polynomial phases `φ(α) = Σ u_i x_i^α` on unit intervals
//! `𝒥 = [A, A+1]`: derivatives, the maximum function `M_dφ`, Vandermonde
//! inversion, the repulsion bound `λ`, zero counting, canonical forms,
//! oscillatory integrals `I(φ, 𝒥)` and van der Corput checks.

mod integral;
mod zeros;

pub use integral::{
    gauss_legendre, oscillatory_integral, oscillatory_integral_with, IntegralOptions, OscillatoryIntegral,
};
pub use zeros::ISOLATION_WIDTH;

use std::io::Write;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localstats::{csv_err, fmt17};
use integral::{derivative_zeros_between, neumaier};

/// `φ(α) = Σ u_i x_i^α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpec {
    pub u: Vec<f64>,
    pub x: Vec<f64>,
    /// Bases strictly increasing, none equal to 1, every coefficient nonzero.
    pub canonical: bool,
}

impl PhaseSpec {
    pub fn new(u: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        if u.len() != x.len() {
            return Err(Error::Domain(format!(
                "{} coefficients but {} bases",
                u.len(),
                x.len()
            )));
        }
        if let Some(b) = x.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return Err(Error::Domain(format!("bases must be positive and finite, got {b}")));
        }
        if let Some(c) = u.iter().find(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("coefficients must be finite, got {c}")));
        }
        let canonical = is_canonical(&u, &x);
        Ok(Self { u, x, canonical })
    }

    /// Number of terms.
    pub fn d(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    fn require_canonical(&self) -> Result<()> {
        if self.canonical {
            Ok(())
        } else {
            Err(Error::Precondition("phase is not in canonical form; call canonicalize first".into()))
        }
    }
}

fn is_canonical(u: &[f64], x: &[f64]) -> bool {
    u.iter().all(|c| *c != 0.0) && x.iter().all(|b| *b != 1.0) && x.windows(2).all(|w| w[0] < w[1])
}

/// Merge equal bases, drop base-1 constants and vanishing coefficients.
/// Returns the canonical phase and its degeneracy `K − d`.
pub fn canonicalize(u: &[f64], x: &[f64]) -> (PhaseSpec, usize) {
    let mut terms: Vec<(f64, f64)> = x.iter().copied().zip(u.iter().copied()).collect();
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (b, c) in terms {
        match merged.last_mut() {
            Some(last) if last.0 == b => last.1 += c,
            _ => merged.push((b, c)),
        }
    }
    merged.retain(|(b, c)| *b != 1.0 && *c != 0.0);
    let phase = PhaseSpec {
        u: merged.iter().map(|t| t.1).collect(),
        x: merged.iter().map(|t| t.0).collect(),
        canonical: true,
    };
    let degeneracy = u.len() - phase.d();
    (phase, degeneracy)
}

/// `𝒥 = [A, A+1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaInterval {
    #[serde(rename = "A")]
    pub a: f64,
}

impl AlphaInterval {
    /// `A = 0` is accepted so that `[0, 1]` can serve as a test interval.
    pub fn new(a: f64) -> Result<Self> {
        let j = Self { a };
        j.validate()?;
        Ok(j)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a >= 0.0) {
            return Err(Error::Domain(format!("A must be finite and nonnegative, got {}", self.a)));
        }
        Ok(())
    }

    pub fn b(&self) -> f64 {
        self.a + 1.0
    }
}

/// Above this many bits in `x^α` the evaluation switches to multi-precision.
const NATIVE_EXPONENT_BITS: f64 = 900.0;

/// `φ^{(order)}(α) = Σ u_i (ln x_i)^order x_i^α`.
pub fn phase_eval(phase: &PhaseSpec, alpha: f64, order: u32) -> f64 {
    let xmax = phase.x.iter().fold(0.0f64, |m, b| m.max(*b));
    if alpha * xmax.log2().abs() > NATIVE_EXPONENT_BITS {
        let bits = 128;
        let mut acc = Float::with_val(bits, 0);
        for (u, x) in phase.u.iter().zip(&phase.x) {
            let l = Float::with_val(bits, *x).ln();
            let mut t = Float::with_val(bits, &l * alpha).exp();
            t *= Float::with_val(bits, l.pow(order));
            t *= *u;
            acc += t;
        }
        return acc.to_f64();
    }
    neumaier(phase.u.iter().zip(&phase.x).map(|(u, x)| {
        let l = x.ln();
        u * l.powi(order as i32) * (alpha * l).exp()
    }))
}

/// `M_dφ(α) = max_{1≤i≤d} |φ^{(i)}(α)|`.
pub fn m_function(phase: &PhaseSpec, alpha: f64, d: u32) -> Result<f64> {
    if d < 1 {
        return Err(Error::Domain("M_d needs d >= 1".into()));
    }
    phase.require_canonical()?;
    Ok((1..=d).map(|i| phase_eval(phase, alpha, i).abs()).fold(0.0, f64::max))
}

fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (n, v) in values.iter().enumerate() {
        for k in (1..=n + 1).rev() {
            e[k] += e[k - 1] * v;
        }
    }
    e
}

/// Entry `(i, j)` (1-based) of the inverse of `V_{ij} = L_j^i`.
pub fn vandermonde_inverse_entry(l: &[f64], i: usize, j: usize) -> Result<f64> {
    let d = l.len();
    if i < 1 || i > d || j < 1 || j > d {
        return Err(Error::Domain(format!("indices ({i}, {j}) outside 1..={d}")));
    }
    let li = l[i - 1];
    if li == 0.0 {
        return Err(Error::Singular(format!("L_{i} = 0")));
    }
    let others: Vec<f64> = l.iter().enumerate().filter(|(m, _)| *m != i - 1).map(|(_, v)| *v).collect();
    let mut denom = li;
    for (m, lm) in others.iter().enumerate() {
        if *lm == li {
            return Err(Error::Singular(format!("L_{i} repeats at position {}", if m + 1 < i { m + 1 } else { m + 2 })));
        }
        denom *= lm - li;
    }
    let e = elementary_symmetric(&others);
    let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * e[d - j] / denom)
}

/// `V_{ij} = L_j^i`, `i, j = 1..d`.
pub fn vandermonde_matrix(l: &[f64]) -> Vec<Vec<f64>> {
    (1..=l.len())
        .map(|i| l.iter().map(|v| v.powi(i as i32)).collect())
        .collect()
}

pub fn vandermonde_inverse(l: &[f64]) -> Result<Vec<Vec<f64>>> {
    (1..=l.len())
        .map(|i| (1..=l.len()).map(|j| vandermonde_inverse_entry(l, i, j)).collect())
        .collect()
}

fn check_admissible(phase: &PhaseSpec, n: f64) -> Result<()> {
    phase.require_canonical()?;
    if phase.d() < 2 {
        return Err(Error::Precondition(format!("need at least two terms, got {}", phase.d())));
    }
    if let Some(b) = phase.x.iter().find(|b| **b < 2.0 || **b > n) {
        return Err(Error::Precondition(format!("base {b} outside [2, {n}]")));
    }
    Ok(())
}

/// `λ = N^{−ε}·|u_d|·x_d^{A+1−d}·Π_{m<d}(x_{m+1} − x_m)`.
pub fn repulsion_lambda(phase: &PhaseSpec, j: &AlphaInterval, n: f64, epsilon: f64) -> Result<f64> {
    check_admissible(phase, n)?;
    let d = phase.d();
    let xd = phase.x[d - 1];
    // Accumulate in logs; the product easily leaves the f64 range for large A.
    let log_gaps: f64 = phase.x.windows(2).map(|w| (w[1] - w[0]).ln()).sum();
    let log = -epsilon * n.ln() + phase.u[d - 1].abs().ln() + (j.b() - d as f64) * xd.ln() + log_gaps;
    let direct = n.powf(-epsilon)
        * phase.u[d - 1].abs()
        * xd.powf(j.b() - d as f64)
        * phase.x.windows(2).map(|w| w[1] - w[0]).product::<f64>();
    Ok(if direct.is_finite() && direct > 0.0 { direct } else { log.exp() })
}

/// Zeros of `φ^{(order)}` in `𝒥`, ascending.
pub fn derivative_zeros(phase: &PhaseSpec, order: u32, j: &AlphaInterval) -> Result<Vec<f64>> {
    phase.require_canonical()?;
    j.validate()?;
    if phase.is_empty() {
        return Err(Error::Precondition("zero counting needs d >= 1".into()));
    }
    derivative_zeros_between(phase, order, j.a, j.b())
}

/// Number of zeros of `φ^{(order)}` in `𝒥` (at most `d − 1`).
pub fn count_zeros(phase: &PhaseSpec, order: u32, j: &AlphaInterval) -> Result<usize> {
    derivative_zeros(phase, order, j).map(|z| z.len())
}

/// `|I| > ANOMALY_FACTOR·λ^{−1/d}` is flagged.
pub const ANOMALY_FACTOR: f64 = 100.0;

/// One van der Corput check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepulsionReport {
    pub u: Vec<f64>,
    pub x: Vec<f64>,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub d: usize,
    #[serde(rename = "min_M_d")]
    pub min_m_d: f64,
    pub integral_re: f64,
    pub integral_im: f64,
    pub integral_abs: f64,
    pub integral_error: f64,
    /// `λ^{−1/d}`.
    pub vdc_bound_value: f64,
    /// `|I|·λ^{1/d}`.
    pub fitted_constant: f64,
    pub vdc_ratio: f64,
    /// `min M_dφ / λ`.
    pub repulsion_ratio: f64,
    pub consistent: bool,
    pub anomaly: bool,
    /// Zeros of `φ', φ'', …, φ^{(d)}` in `𝒥`.
    pub derivative_zeros: Vec<Vec<f64>>,
}

/// Integration tolerance used by [`vdc_check`]: a thousandth of the bound,
/// clamped to `[1e-13, 1e-4]`.
pub fn vdc_tolerance(lambda: f64, d: usize) -> f64 {
    (1e-3 * lambda.powf(-1.0 / d as f64)).clamp(1e-13, 1e-4)
}

/// `λ`, the grid minimum of `M_dφ` and `|I(φ, 𝒥)|`, with their ratios.
pub fn vdc_check(phase: &PhaseSpec, j: &AlphaInterval, n: f64, epsilon: f64, grid_size: usize) -> Result<RepulsionReport> {
    let lambda = repulsion_lambda(phase, j, n, epsilon)?;
    let d = phase.d();
    if grid_size < 2 {
        return Err(Error::Domain(format!("grid_size must be at least 2, got {grid_size}")));
    }
    let mut min_m = f64::INFINITY;
    for g in 0..grid_size {
        let alpha = j.a + g as f64 / (grid_size - 1) as f64;
        min_m = min_m.min(m_function(phase, alpha, d as u32)?);
    }
    let integral = oscillatory_integral(phase, j, vdc_tolerance(lambda, d))?;
    let bound = lambda.powf(-1.0 / d as f64);
    let abs = integral.value.norm();
    let ratio = abs / bound;
    let zeros = (1..=d as u32)
        .map(|o| derivative_zeros(phase, o, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(RepulsionReport {
        u: phase.u.clone(),
        x: phase.x.clone(),
        a: j.a,
        n,
        epsilon,
        lambda,
        d,
        min_m_d: min_m,
        integral_re: integral.value.re,
        integral_im: integral.value.im,
        integral_abs: abs,
        integral_error: integral.error_estimate,
        vdc_bound_value: bound,
        fitted_constant: ratio,
        vdc_ratio: ratio,
        repulsion_ratio: min_m / lambda,
        consistent: min_m > 0.0 && ratio.is_finite(),
        anomaly: abs > ANOMALY_FACTOR * bound,
        derivative_zeros: zeros,
    })
}

/// One ensemble member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseCase {
    pub phase: PhaseSpec,
    pub interval: AlphaInterval,
}

/// [`vdc_check`] over many phases in parallel; results keep input order.
pub fn vdc_ensemble(cases: &[PhaseCase], n: f64, epsilon: f64, grid_size: usize) -> Vec<Result<RepulsionReport>> {
    cases
        .par_iter()
        .map(|c| vdc_check(&c.phase, &c.interval, n, epsilon, grid_size))
        .collect()
}

pub fn write_reports_json<W: Write>(reports: &[RepulsionReport], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, reports)?;
    Ok(())
}

/// The four-term phase from a pair `(n, m)` applied to bases `x = (x1, x2)`
/// and `y = (y1, y2)`: `n·x1^α − n·x2^α − m·y1^α + m·y2^α`, canonicalized.
pub fn pair_phase(n: f64, m: f64, x: (f64, f64), y: (f64, f64)) -> PhaseSpec {
    canonicalize(&[n, -n, -m, m], &[x.0, x.1, y.0, y.1]).0
}

/// The `(n, m) = (5135, 10000)`, `x = (10000, 1000)`, `y = (9500, 7890)` phase
/// on `[7.5, 8.5]`, where `φ''`, `φ'''` and `φ''''` each change sign twice
/// and `φ'` nearly vanishes without crossing.
pub fn reference_pair_phase() -> (PhaseSpec, AlphaInterval) {
    (
        pair_phase(5135.0, 10000.0, (10000.0, 1000.0), (9500.0, 7890.0)),
        AlphaInterval { a: 7.5 },
    )
}

/// CSV `alpha, d1, d2, d3, d4` on `samples` equispaced points of `𝒥`.
pub fn write_derivative_csv<W: Write>(phase: &PhaseSpec, j: &AlphaInterval, samples: usize, out: W) -> Result<()> {
    if samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {samples}")));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "d1", "d2", "d3", "d4"]).map_err(csv_err)?;
    for s in 0..samples {
        let alpha = j.a + s as f64 / (samples - 1) as f64;
        let mut row = vec![fmt17(alpha)];
        row.extend((1..=4).map(|o| fmt17(phase_eval(phase, alpha, o))));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn phase_eval_examples() {
        let p = PhaseSpec::new(vec![1.0], vec![2.0]).unwrap();
        assert!((phase_eval(&p, 1.0, 1) - 2.0 * 2f64.ln()).abs() < 1e-15);
        let q = PhaseSpec::new(vec![1.5, -2.0, 4.0], vec![3.0, 7.0, 11.0]).unwrap();
        assert_eq!(phase_eval(&q, 0.0, 0), 3.5);
        let (z, deg) = canonicalize(&[1.0, -1.0], &[3.0, 3.0]);
        assert!(z.is_empty() && deg == 2);
        assert_eq!(phase_eval(&z, 4.2, 3), 0.0);
    }

    #[test]
    fn extended_precision_matches_native_where_both_work() {
        let p = PhaseSpec::new(vec![1.0, -0.5], vec![2.0, 3.0]).unwrap();
        // 1000·log2(3) > 900 takes the multi-precision route.
        let hi = phase_eval(&p, 600.0, 2);
        let expect = -0.5 * 3f64.ln().powi(2) * (600.0 * 3f64.ln()).exp() + 2f64.ln().powi(2) * 2f64.powi(600);
        assert!(((hi - expect) / expect).abs() < 1e-12);
    }

    #[test]
    fn canonicalize_examples() {
        let (p, deg) = canonicalize(&[5.0, -5.0, 3.0, -3.0], &[7.0, 7.0, 4.0, 4.0]);
        assert!(p.is_empty());
        assert_eq!(deg, 4);
        let (p, deg) = canonicalize(&[2.0, -1.0, -1.0], &[5.0, 5.0, 1.0]);
        assert_eq!((p.u.clone(), p.x.clone(), deg), (vec![1.0], vec![5.0], 2));
        let c = PhaseSpec::new(vec![3.0, -2.0], vec![2.0, 9.0]).unwrap();
        assert!(c.canonical);
        let (p, deg) = canonicalize(&c.u, &c.x);
        assert_eq!((p, deg), (c, 0));
    }

    #[test]
    fn m_function_examples() {
        let p = PhaseSpec::new(vec![1.0], vec![2.0]).unwrap();
        assert!((m_function(&p, 1.0, 2).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-15);
        let empty = canonicalize(&[], &[]).0;
        assert_eq!(m_function(&empty, 3.0, 4).unwrap(), 0.0);
        let q = PhaseSpec::new(vec![1.0, -3.0], vec![2.0, 5.0]).unwrap();
        assert_eq!(m_function(&q, 1.3, 1).unwrap(), phase_eval(&q, 1.3, 1).abs());
        let raw = PhaseSpec::new(vec![1.0, 1.0], vec![5.0, 2.0]).unwrap();
        assert!(matches!(m_function(&raw, 1.0, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn vandermonde_examples() {
        let inv = vandermonde_inverse(&[1.0, 2.0]).unwrap();
        assert_eq!(inv, vec![vec![2.0, -1.0], vec![-0.5, 0.5]]);
        assert_eq!(vandermonde_inverse_entry(&[4.0], 1, 1).unwrap(), 0.25);
        assert!(matches!(vandermonde_inverse_entry(&[1.0, 1.0], 1, 1), Err(Error::Singular(_))));
        assert!(matches!(vandermonde_inverse_entry(&[0.0, 1.0], 1, 2), Err(Error::Singular(_))));
    }

    #[test]
    fn vandermonde_residual_d6() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let l: Vec<f64> = loop {
                let mut l: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
                l.sort_by(f64::total_cmp);
                if l.windows(2).all(|w| w[1] - w[0] >= 0.1) && l.iter().all(|v| v.abs() >= 0.1) {
                    break l;
                }
            };
            let v = vandermonde_matrix(&l);
            let a = vandermonde_inverse(&l).unwrap();
            for i in 0..6 {
                for j in 0..6 {
                    let e = if i == j { 1.0 } else { 0.0 };
                    let left: f64 = (0..6).map(|k| a[i][k] * v[k][j]).sum();
                    let right: f64 = (0..6).map(|k| v[i][k] * a[k][j]).sum();
                    assert!((left - e).abs() <= 1e-10 && (right - e).abs() <= 1e-10, "{left} {right}");
                }
            }
        }
    }

    #[test]
    fn derivatives_are_vandermonde_image() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = PhaseSpec::new(vec![2.0, -3.0, 1.0], vec![2.0, 5.0, 13.0]).unwrap();
        let l: Vec<f64> = p.x.iter().map(|x| x.ln()).collect();
        let v = vandermonde_matrix(&l);
        for _ in 0..20 {
            let alpha = rng.random_range(0.0..4.0);
            let w: Vec<f64> = p.u.iter().zip(&p.x).map(|(u, x)| u * x.powf(alpha)).collect();
            for i in 0..3 {
                let vw: f64 = (0..3).map(|j| v[i][j] * w[j]).sum();
                let direct = phase_eval(&p, alpha, i as u32 + 1);
                assert!((vw - direct).abs() <= 1e-12 * vw.abs().max(1.0));
            }
        }
    }

    #[test]
    fn repulsion_lambda_examples() {
        let j7 = AlphaInterval::new(7.0).unwrap();
        let p = PhaseSpec::new(vec![3.0, -7.0], vec![10.0, 100.0]).unwrap();
        let l = repulsion_lambda(&p, &j7, 100.0, 0.0).unwrap();
        assert!((l / 6.3e14 - 1.0).abs() < 1e-12);
        let l1 = repulsion_lambda(&p, &j7, 100.0, 1.0).unwrap();
        assert!((l1 * 100.0 / l - 1.0).abs() < 1e-14);
        let q = PhaseSpec::new(vec![1.0, 1.0], vec![2.0, 3.0]).unwrap();
        assert_eq!(repulsion_lambda(&q, &AlphaInterval::new(1.0).unwrap(), 3.0, 0.0).unwrap(), 1.0);
        let bad = PhaseSpec::new(vec![1.0, 1.0], vec![3.0, 2.0]).unwrap();
        assert!(matches!(repulsion_lambda(&bad, &j7, 10.0, 0.0), Err(Error::Precondition(_))));
        let out = PhaseSpec::new(vec![1.0, 1.0], vec![2.0, 30.0]).unwrap();
        assert!(matches!(repulsion_lambda(&out, &j7, 10.0, 0.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn count_zeros_examples() {
        let j = AlphaInterval::new(7.0).unwrap();
        let p = PhaseSpec::new(vec![1.0, -1.0], vec![2.0, 3.0]).unwrap();
        assert_eq!(count_zeros(&p, 0, &j).unwrap(), 0);
        let single = PhaseSpec::new(vec![-4.0], vec![6.0]).unwrap();
        for o in 0..5 {
            assert_eq!(count_zeros(&single, o, &j).unwrap(), 0);
        }
        let empty = canonicalize(&[], &[]).0;
        assert!(matches!(count_zeros(&empty, 0, &j), Err(Error::Precondition(_))));
    }

    #[test]
    fn zero_count_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..500 {
            let d = rng.random_range(1..=5);
            let (p, _) = canonicalize(
                &(0..d).map(|_| rng.random_range(-10i32..=10) as f64).collect::<Vec<_>>(),
                &(0..d).map(|_| rng.random_range(2u32..=50) as f64).collect::<Vec<_>>(),
            );
            if p.is_empty() {
                continue;
            }
            let j = AlphaInterval::new(rng.random_range(1.0..10.0)).unwrap();
            for o in 0..=4 {
                if let Ok(c) = count_zeros(&p, o, &j) {
                    assert!(c < p.d().max(1));
                }
            }
        }
    }

    #[test]
    fn reference_pair_phase_sign_pattern() {
        // Independent high-precision sampling: φ' stays positive (it dips to
        // ≈3.4·10^{4α}), φ'', φ''' and φ'''' each change sign twice.
        let (p, j) = reference_pair_phase();
        assert_eq!(p.d(), 4);
        let expect: [&[f64]; 4] = [&[], &[8.004, 8.037], &[7.8, 8.022], &[7.645, 7.957]];
        for (o, e) in (1..=4).zip(expect) {
            let z = derivative_zeros(&p, o, &j).unwrap();
            assert_eq!(z.len(), e.len(), "order {o}: {z:?}");
            for (a, b) in z.iter().zip(e) {
                assert!((a - b).abs() < 1e-3, "order {o}: {z:?}");
            }
        }
        let mut out = Vec::new();
        write_derivative_csv(&p, &j, 11, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 12);
    }

    #[test]
    fn vdc_check_large_lambda() {
        let p = PhaseSpec::new(vec![3.0, -7.0], vec![10.0, 100.0]).unwrap();
        let r = vdc_check(&p, &AlphaInterval::new(7.0).unwrap(), 100.0, 0.0, 200).unwrap();
        // λ = 6.3e14, so λ^{-1/2} = 3.984e-8.
        assert!((r.vdc_bound_value - 6.3e14f64.powf(-0.5)).abs() < 1e-20);
        assert!((r.vdc_bound_value - 3.984e-8).abs() < 1e-11);
        assert!(r.integral_abs <= 1.0);
        assert!(r.consistent && !r.anomaly, "{r:?}");
        let empty = canonicalize(&[], &[]).0;
        assert!(matches!(
            vdc_check(&empty, &AlphaInterval::new(7.0).unwrap(), 100.0, 0.0, 10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn report_json_fields() {
        let p = PhaseSpec::new(vec![1.0, -1.0], vec![2.0, 3.0]).unwrap();
        let r = vdc_check(&p, &AlphaInterval::new(2.0).unwrap(), 10.0, 0.0, 50).unwrap();
        let mut out = Vec::new();
        write_reports_json(&[r], &mut out).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        for k in ["u", "x", "A", "N", "epsilon", "lambda", "min_M_d", "integral_re", "integral_im", "integral_abs", "vdc_ratio"] {
            assert!(v[0].get(k).is_some(), "{k}");
        }
    }
}
