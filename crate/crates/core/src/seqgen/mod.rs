//! Fractional parts `{β·n^α}` to a certified absolute accuracy.
//!
//! Every term is evaluated as `β·exp(α·ln n)` in MPFR at a working precision
//! chosen by [`PrecisionPolicy`]; the fraction is then stored as a 128-bit
//! fixed-point number (`fixed / 2^128`) together with its `f64` rounding.
//! Downstream modules use the `f64` view for spatial statistics and the
//! fixed-point view for frequency multiplication, where `n·{x}` mod 1 is
//! an exact wrapping integer product.

mod io;
mod precision;

pub use io::{read_binary, read_text, write_binary, write_text, MAGIC};
pub use precision::{
    certified_error, certified_error_scaled, required_bits, PrecisionMode, PrecisionPolicy,
    DEFAULT_TARGET, GUARD_BITS,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::float::Round;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `2^-128`: truncation error of the fixed-point fraction.
pub const FIXED_ULP: f64 = 2.938735877055719e-39;
/// Half an ulp of an `f64` in `[0.5, 1)`.
pub const F64_HALF_ULP: f64 = 5.551115123125783e-17;
const TWO_128: f64 = 3.402823669209385e38;
/// Extra attempts auto mode makes (32 more bits each) before giving up.
const AUTO_RETRIES: u32 = 8;

/// Parameters of `θ_n = β·n^α`, `1 ≤ n ≤ N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

impl SequenceSpec {
    pub fn new(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        let spec = Self { alpha, beta, n };
        spec.validate()?;
        Ok(spec)
    }

    /// `β = 1`.
    pub fn power(alpha: f64, n: usize) -> Result<Self> {
        Self::new(alpha, 1.0, n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::Domain(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.beta == 0.0 || !self.beta.is_finite() {
            return Err(Error::Domain(format!("beta must be finite and nonzero, got {}", self.beta)));
        }
        if self.n == 0 {
            return Err(Error::Domain("N must be at least 1".into()));
        }
        Ok(())
    }

    /// Integer `α` and integer `β`: every fractional part is zero.
    pub fn is_integer_collapse(&self) -> bool {
        self.alpha.fract() == 0.0 && self.beta.fract() == 0.0
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..*self }
    }
}

/// One certified fractional part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FracPart {
    /// `f64` rounding of the fraction, in `[0, 1)`.
    pub value: f64,
    /// The fraction as `fixed / 2^128`.
    pub fixed: u128,
    /// Certified circular distance between `fixed / 2^128` and the true fraction.
    pub err_bound: f64,
    /// Working precision that produced the certificate.
    pub bits: u32,
}

impl FracPart {
    /// Error bound of [`FracPart::value`] (adds the `f64` rounding).
    pub fn value_err(&self) -> f64 {
        self.err_bound + F64_HALF_ULP
    }
}

/// Where the values of a [`PointSet`] came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PointSource {
    Generated { spec: SequenceSpec, bits: u32 },
    External,
}

/// Points on the circle `[0, 1)` with a uniform error certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    values: Vec<f64>,
    fixed: Option<Vec<u128>>,
    err_bound: f64,
    fixed_err_bound: f64,
    source: PointSource,
}

impl PointSet {
    /// Wraps caller-supplied values; `err_bound` is taken on trust.
    pub fn external(values: Vec<f64>, err_bound: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Degenerate("a point set needs at least one value".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(**v >= 0.0 && **v < 1.0)) {
            return Err(Error::Domain(format!("point {bad} is outside [0, 1)")));
        }
        if !(err_bound >= 0.0) {
            return Err(Error::Domain(format!("err_bound must be nonnegative, got {err_bound}")));
        }
        Ok(Self {
            values,
            fixed: None,
            err_bound,
            fixed_err_bound: err_bound,
            source: PointSource::External,
        })
    }

    /// `n` i.i.d. uniform points from a ChaCha stream; exact (err_bound 0).
    pub fn uniform(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..n).map(|_| rng.random::<f64>()).collect();
        Self::external(values, 0.0)
    }

    /// Kronecker points `{kγ}`, `k = 1..=n`, reduced in `f64`.
    pub fn kronecker(gamma: f64, n: usize) -> Result<Self> {
        let values = (1..=n)
            .map(|k| {
                let v = (k as f64 * gamma).rem_euclid(1.0);
                if v >= 1.0 { 0.0 } else { v }
            })
            .collect();
        // k·γ carries one rounding of relative size 2^-53.
        let err = n as f64 * gamma.abs() * f64::EPSILON;
        Self::external(values, err)
    }

    pub(crate) fn from_parts(
        values: Vec<f64>,
        fixed: Option<Vec<u128>>,
        err_bound: f64,
        fixed_err_bound: f64,
        source: PointSource,
    ) -> Self {
        Self {
            values,
            fixed,
            err_bound,
            fixed_err_bound,
            source,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn fixed(&self) -> Option<&[u128]> {
        self.fixed.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn err_bound(&self) -> f64 {
        self.err_bound
    }

    pub fn fixed_err_bound(&self) -> f64 {
        self.fixed_err_bound
    }

    pub fn source(&self) -> &PointSource {
        &self.source
    }

    pub fn spec(&self) -> Option<&SequenceSpec> {
        match &self.source {
            PointSource::Generated { spec, .. } => Some(spec),
            PointSource::External => None,
        }
    }

    pub fn bits(&self) -> Option<u32> {
        match &self.source {
            PointSource::Generated { bits, .. } => Some(*bits),
            PointSource::External => None,
        }
    }

    /// The first `n` points (same certificate).
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::Domain(format!("prefix length {n} outside 1..={}", self.len())));
        }
        let source = match &self.source {
            PointSource::Generated { spec, bits } => PointSource::Generated {
                spec: spec.with_n(n),
                bits: *bits,
            },
            PointSource::External => PointSource::External,
        };
        Ok(Self {
            values: self.values[..n].to_vec(),
            fixed: self.fixed.as_ref().map(|f| f[..n].to_vec()),
            err_bound: self.err_bound,
            fixed_err_bound: self.fixed_err_bound,
            source,
        })
    }

    /// Every point shifted by `c` modulo one (an external set).
    pub fn shifted(&self, c: f64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .map(|v| {
                let s = (v + c).rem_euclid(1.0);
                if s >= 1.0 { 0.0 } else { s }
            })
            .collect();
        Self::external(values, self.err_bound + F64_HALF_ULP)
    }
}

fn fixed_to_f64(fixed: u128) -> f64 {
    let v = fixed as f64 / TWO_128;
    // Rounding can reach 1.0, which is 0 on the circle.
    if v >= 1.0 { 0.0 } else { v }
}

/// Circular distance of `fixed / 2^128` from 0.
fn fixed_dist_to_zero(fixed: u128) -> f64 {
    let d = fixed.min(fixed.wrapping_neg());
    d as f64 / TWO_128
}

/// `β·n^α` at `bits` of precision, as an MPFR float.
fn power_term(alpha: f64, beta: f64, n: u64, bits: u32) -> Float {
    let mut v = Float::with_val(bits, n);
    v.ln_mut();
    v *= alpha;
    v.exp_mut();
    v *= beta;
    v
}

/// `floor(v·2^128) mod 2^128`, i.e. the fraction of `v` in fixed point.
fn fixed_fraction(mut v: Float) -> u128 {
    v <<= 128u32;
    v.floor_mut();
    let mut i: Integer = v.to_integer_round(Round::Down).map(|(i, _)| i).unwrap_or_default();
    i.keep_bits_mut(128);
    i.to_u128().unwrap_or(0)
}

fn frac_at_bits(n: u64, spec: &SequenceSpec, bits: u32) -> (u128, f64) {
    let v = power_term(spec.alpha, spec.beta, n, bits);
    let cert = certified_error(spec.alpha, spec.beta, n, bits) + FIXED_ULP;
    let mut fixed = fixed_fraction(v);
    let mut err = cert;
    let dist = fixed_dist_to_zero(fixed);
    if dist <= cert {
        // The certified interval contains an integer: report it as exactly 0.
        fixed = 0;
        err = cert + dist;
    }
    (fixed, err)
}

/// `{β·n^α}` with a certified error bound.
pub fn frac_part_one(n: u64, spec: &SequenceSpec, policy: &PrecisionPolicy) -> Result<FracPart> {
    spec.validate()?;
    if n == 0 || n > spec.n as u64 {
        return Err(Error::Domain(format!("index {n} outside 1..={}", spec.n)));
    }
    let bits = policy.working_bits(spec.alpha, spec.beta, spec.n)?;
    frac_part_at(n, spec, policy, bits)
}

fn frac_part_at(n: u64, spec: &SequenceSpec, policy: &PrecisionPolicy, bits: u32) -> Result<FracPart> {
    let target = policy.target_abs_err;
    let attempts = match policy.mode {
        PrecisionMode::Auto => AUTO_RETRIES,
        PrecisionMode::Fixed => 0,
    };
    let mut b = bits;
    for attempt in 0..=attempts {
        let (fixed, err) = frac_at_bits(n, spec, b);
        if err <= target {
            return Ok(FracPart {
                value: fixed_to_f64(fixed),
                fixed,
                err_bound: err,
                bits: b,
            });
        }
        if attempt == attempts {
            return Err(Error::PrecisionInfeasible {
                bits: b,
                achieved: err,
                target,
            });
        }
        b += GUARD_BITS;
    }
    unreachable!()
}

/// All fractional parts `{β·n^α}`, `n = 1..=N`.
///
/// Entries are evaluated in parallel into their own slots; the result does
/// not depend on the schedule.
pub fn frac_parts(spec: &SequenceSpec, policy: &PrecisionPolicy) -> Result<PointSet> {
    spec.validate()?;
    let bits = policy.working_bits(spec.alpha, spec.beta, spec.n)?;
    let parts: Vec<FracPart> = (1..=spec.n as u64)
        .into_par_iter()
        .map(|n| frac_part_at(n, spec, policy, bits))
        .collect::<Result<_>>()?;
    let fixed_err = parts.iter().map(|p| p.err_bound).fold(0.0, f64::max);
    let used_bits = parts.iter().map(|p| p.bits).max().unwrap_or(bits);
    let values = parts.iter().map(|p| p.value).collect();
    let fixed = parts.iter().map(|p| p.fixed).collect();
    Ok(PointSet::from_parts(
        values,
        Some(fixed),
        fixed_err + F64_HALF_ULP,
        fixed_err,
        PointSource::Generated {
            spec: *spec,
            bits: used_bits,
        },
    ))
}

/// `{ν·β·n^α}` for a real multiplier `ν`, returned as `(fraction, error)`.
///
/// Precision is raised by `log2|ν|` over the policy's working precision so
/// the product keeps the target accuracy.
pub fn scaled_frac(nu: f64, n: u64, spec: &SequenceSpec, policy: &PrecisionPolicy) -> Result<(f64, f64)> {
    spec.validate()?;
    if nu == 0.0 {
        return Ok((0.0, 0.0));
    }
    let base = policy.working_bits(spec.alpha, spec.beta, spec.n)?;
    let extra = nu.abs().log2().ceil().max(0.0) as u32;
    let mut bits = match policy.mode {
        PrecisionMode::Auto => base + extra,
        PrecisionMode::Fixed => base,
    };
    let attempts = if policy.mode == PrecisionMode::Auto { AUTO_RETRIES } else { 0 };
    for attempt in 0..=attempts {
        let mut v = power_term(spec.alpha, spec.beta, n, bits);
        v *= nu;
        let err = certified_error_scaled(spec.alpha, spec.beta, nu, n, bits) + FIXED_ULP;
        if err <= policy.target_abs_err {
            let fixed = fixed_fraction(v);
            return Ok((fixed_to_f64(fixed), err));
        }
        if attempt == attempts {
            return Err(Error::PrecisionInfeasible {
                bits,
                achieved: err,
                target: policy.target_abs_err,
            });
        }
        bits += GUARD_BITS;
    }
    unreachable!()
}
