//! Working-precision selection and the rounding-error budget for `β·exp(α·ln n)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guard bits added on top of the magnitude and target terms.
pub const GUARD_BITS: u32 = 32;

/// Default target for the high-precision fraction: 2^-64.
pub const DEFAULT_TARGET: f64 = 5.421010862427522e-20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionMode {
    Auto,
    Fixed,
}

/// How many bits to carry when reducing `β·n^α` modulo one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub mode: PrecisionMode,
    /// Working bits in fixed mode; ignored in auto mode.
    pub bits: u32,
    /// Absolute error the high-precision fraction must be certified to.
    pub target_abs_err: f64,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self::auto(DEFAULT_TARGET)
    }
}

impl PrecisionPolicy {
    pub fn auto(target_abs_err: f64) -> Self {
        Self {
            mode: PrecisionMode::Auto,
            bits: 0,
            target_abs_err,
        }
    }

    pub fn fixed(bits: u32, target_abs_err: f64) -> Self {
        Self {
            mode: PrecisionMode::Fixed,
            bits,
            target_abs_err,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_abs_err > 0.0 && self.target_abs_err < 1.0) {
            return Err(Error::Domain(format!(
                "target_abs_err must lie in (0, 1), got {}",
                self.target_abs_err
            )));
        }
        if self.mode == PrecisionMode::Fixed && self.bits < 2 {
            return Err(Error::Domain(format!(
                "fixed precision needs at least 2 bits, got {}",
                self.bits
            )));
        }
        Ok(())
    }

    /// Same policy with a tighter target (used to provision frequency multiplication).
    pub fn with_target(&self, target_abs_err: f64) -> Self {
        Self {
            target_abs_err,
            ..*self
        }
    }

    /// Starting working precision for a sequence with exponent `alpha`,
    /// dilation `beta` and `n` terms.
    pub fn working_bits(&self, alpha: f64, beta: f64, n: usize) -> Result<u32> {
        self.validate()?;
        match self.mode {
            PrecisionMode::Fixed => Ok(self.bits),
            PrecisionMode::Auto => {
                let base = required_bits(alpha, n.max(2) as u64, self.target_abs_err)?;
                let dilation = beta.abs().log2().ceil().max(0.0) as u32;
                Ok(base + dilation)
            }
        }
    }
}

/// Auto-mode bit count: `⌈(α+1)·log2 N⌉ + ⌈log2(1/err)⌉ + 32`.
pub fn required_bits(alpha: f64, n: u64, target_abs_err: f64) -> Result<u32> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    if !(target_abs_err > 0.0 && target_abs_err < 1.0) {
        return Err(Error::Domain(format!(
            "target_abs_err must lie in (0, 1), got {target_abs_err}"
        )));
    }
    let magnitude = ((alpha + 1.0) * (n as f64).log2()).ceil();
    let target = (1.0 / target_abs_err).log2().ceil();
    Ok(magnitude as u32 + target as u32 + GUARD_BITS)
}

/// Certified absolute error of `RN(β·RN(exp(RN(α·RN(ln n)))))` at `bits` of
/// precision, before the fraction is extracted.
///
/// Every MPFR operation is correctly rounded (relative error `u = 2^-bits`).
/// The argument `t = α ln n` picks up relative error `≈ 2u`, which `exp`
/// turns into a relative error `≈ 2u|t|`; the final two roundings add `2u`.
/// The bound is evaluated in the log domain so huge `|β n^α|` do not overflow.
pub fn certified_error(alpha: f64, beta: f64, n: u64, bits: u32) -> f64 {
    let ln_n = (n as f64).ln();
    let t = alpha * ln_n;
    let rel = 2.02 * t.abs() + 3.0;
    let log2_value = beta.abs().log2() + alpha * (n as f64).log2();
    let log2_err = log2_value + rel.log2() - bits as f64;
    log2_err.exp2()
}

/// Certified error for `frac(ν·β·n^α)` with a real multiplier `ν` (one more rounding).
pub fn certified_error_scaled(alpha: f64, beta: f64, nu: f64, n: u64, bits: u32) -> f64 {
    let ln_n = (n as f64).ln();
    let t = alpha * ln_n;
    let rel = 2.02 * t.abs() + 4.0;
    let log2_value = (beta * nu).abs().log2() + alpha * (n as f64).log2();
    (log2_value + rel.log2() - bits as f64).exp2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn required_bits_examples() {
        assert_eq!(required_bits(8.0, 1_000_000, 2f64.powi(-60)).unwrap(), 272);
        assert_eq!(required_bits(1.0, 2, 0.5).unwrap(), 35);
        assert_eq!(required_bits(8.0, 1_000_000, 2f64.powi(-120)).unwrap(), 332);
    }

    #[test]
    fn required_bits_rejects_bad_input() {
        assert!(required_bits(0.0, 10, 0.1).is_err());
        assert!(required_bits(-1.0, 10, 0.1).is_err());
        assert!(required_bits(1.0, 0, 0.1).is_err());
        assert!(required_bits(1.0, 10, 0.0).is_err());
        assert!(required_bits(1.0, 10, 1.0).is_err());
    }

    #[test]
    fn required_bits_is_monotone() {
        let mut last = 0;
        for a in [0.5, 1.0, 2.5, 8.0, 30.0] {
            let b = required_bits(a, 1000, 1e-10).unwrap();
            assert!(b >= last);
            last = b;
        }
        let mut last = 0;
        for n in [2u64, 10, 1000, 1 << 30] {
            let b = required_bits(3.0, n, 1e-10).unwrap();
            assert!(b >= last);
            last = b;
        }
        let mut last = 0;
        for e in [0.1, 1e-5, 1e-12, 1e-30] {
            let b = required_bits(3.0, 1000, e).unwrap();
            assert!(b >= last);
            last = b;
        }
    }

    #[test]
    fn auto_bits_cover_the_formula() {
        let p = PrecisionPolicy::auto(1e-20);
        let b = p.working_bits(8.0, 1.0, 1000).unwrap();
        assert_eq!(b, required_bits(8.0, 1000, 1e-20).unwrap());
        let b2 = p.working_bits(8.0, 1000.0, 1000).unwrap();
        assert_eq!(b2, b + 10);
    }
}
