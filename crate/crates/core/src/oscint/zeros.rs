//! Root isolation for exponential polynomials `Σ c_i e^{α l_i}`.
//!
//! Dividing by the term with the smallest rate leaves the zero set unchanged,
//! and the derivative of the quotient has one term fewer. Its zeros cut the
//! interval into monotone pieces, each holding at most one zero, so a
//! `d`-term polynomial has at most `d − 1` zeros and the recursion bottoms
//! out at a single never-vanishing term.

use crate::error::{Error, Result};

/// Bisection stops once the bracket is this narrow.
pub const ISOLATION_WIDTH: f64 = 1e-12;

/// `Σ c_i e^{α l_i}` with nonzero `c_i` and strictly increasing `l_i`.
#[derive(Clone, Debug)]
pub(crate) struct ExpPoly {
    pub c: Vec<f64>,
    pub l: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Sign {
    Neg,
    Pos,
}

impl ExpPoly {
    /// Value and rounding noise, both scaled by the largest term so the
    /// sign survives magnitudes beyond the `f64` range.
    fn scaled(&self, alpha: f64) -> (f64, f64) {
        let m = self
            .c
            .iter()
            .zip(&self.l)
            .map(|(c, l)| c.abs().ln() + alpha * l)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut val = 0.0;
        let mut abs = 0.0;
        for (c, l) in self.c.iter().zip(&self.l) {
            let t = c.signum() * (c.abs().ln() + alpha * l - m).exp();
            val += t;
            abs += t.abs();
        }
        // Each term carries ~(|α·l| + 3) ulps from the exponent; the sum adds d more.
        let spread = self.l.iter().map(|l| (alpha * l).abs()).fold(0.0, f64::max) + m.abs();
        let noise = abs * (spread + 3.0 + self.c.len() as f64) * f64::EPSILON * 4.0;
        (val, noise)
    }

    fn sign(&self, alpha: f64) -> Option<Sign> {
        let (v, noise) = self.scaled(alpha);
        if v.abs() <= noise {
            None
        } else if v > 0.0 {
            Some(Sign::Pos)
        } else {
            Some(Sign::Neg)
        }
    }

    /// Derivative of `self / e^{α l_0}`, rescaled by `e^{α l_0}` (same zeros).
    fn reduced_derivative(&self) -> ExpPoly {
        let l0 = self.l[0];
        let mut c = Vec::with_capacity(self.c.len() - 1);
        let mut l = Vec::with_capacity(self.c.len() - 1);
        for i in 1..self.c.len() {
            c.push(self.c[i] * (self.l[i] - l0));
            l.push(self.l[i]);
        }
        ExpPoly { c, l }
    }
}

/// All zeros in `[a, b]`, ascending.
pub(crate) fn zeros(p: &ExpPoly, a: f64, b: f64) -> Result<Vec<f64>> {
    if p.c.is_empty() {
        return Err(Error::Degenerate("the zero function has no isolated zeros".into()));
    }
    if p.c.len() == 1 {
        return Ok(Vec::new());
    }
    let crit = zeros(&p.reduced_derivative(), a, b)?;
    for &c in &crit {
        if c > a && c < b && p.sign(c).is_none() {
            return Err(Error::Tolerance(format!(
                "cannot decide whether the function touches zero at the critical point {c}"
            )));
        }
    }
    let mut knots = Vec::with_capacity(crit.len() + 2);
    knots.push(a);
    knots.extend(crit.iter().copied().filter(|&c| c > a && c < b));
    knots.push(b);

    let mut out = Vec::new();
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        match (p.sign(lo), p.sign(hi)) {
            (None, _) => {
                if out.last() != Some(&lo) {
                    out.push(lo);
                }
            }
            (Some(_), None) => {
                if hi == b {
                    out.push(hi);
                }
                // An interior knot never has ambiguous sign (checked above).
            }
            (Some(s), Some(t)) if s != t => out.push(bisect(p, lo, hi, s)?),
            _ => {}
        }
    }
    Ok(out)
}

fn bisect(p: &ExpPoly, mut lo: f64, mut hi: f64, s_lo: Sign) -> Result<f64> {
    while hi - lo > ISOLATION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Tolerance(format!(
                "zero bracket [{lo}, {hi}] cannot be narrowed to {ISOLATION_WIDTH}"
            )));
        }
        match p.sign(mid) {
            None => return Ok(mid),
            Some(s) if s == s_lo => lo = mid,
            Some(_) => hi = mid,
        }
    }
    Ok(0.5 * (lo + hi))
}
