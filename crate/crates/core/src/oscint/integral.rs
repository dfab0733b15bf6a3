//! `I(φ, 𝒥) = ∫_𝒥 e(φ(α)) dα` for exponential-polynomial phases.
//!
//! The interval is cut at the zeros of `φ'` and `φ''`, so `φ'` is monotone
//! and of one sign on every piece. A panel is then resolved in one of two
//! ways:
//!
//! * **quadrature** — if `max|φ'|·width ≤ 1/8` (at most an eighth of an
//!   oscillation), 15-point Gauss–Legendre;
//! * **endpoint expansion** — otherwise, repeated integration by parts,
//!   `∫ g_j e(φ) = [g_j e(φ)/(2πiφ')] + ∫ g_{j+1} e(φ)` with
//!   `g_{j+1} = −(g_j/(2πiφ'))'`, evaluated at the panel ends from Taylor
//!   jets of `φ'`. The remainder `∫ g_K e(φ)` is estimated by
//!   `width · max|g_K|` over five sample points.
//!
//! Panels that qualify for neither are bisected. Phases are reduced modulo
//! one in multi-precision whenever `f64` rounding of `φ` would exceed the
//! phase budget, so `e(φ)` stays accurate when `φ` itself is astronomically
//! large.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rug::Float;
use serde::{Deserialize, Serialize};

use super::zeros::{zeros, ExpPoly};
use super::{canonicalize, AlphaInterval, PhaseSpec};
use crate::error::{Error, Result};

/// Largest number of integration-by-parts steps tried on one panel.
const MAX_ORDER: usize = 10;
/// Panels narrower than this (relative to `|α|`) are not split further.
const MIN_RELATIVE_WIDTH: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralOptions {
    /// Target absolute error.
    pub tol: f64,
    /// Budget on resolved panels.
    pub max_panels: usize,
    /// Allow the endpoint expansion; without it every panel is quadrature.
    pub asymptotic: bool,
}

impl IntegralOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            max_panels: 1_000_000,
            asymptotic: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatoryIntegral {
    pub value: Complex64,
    /// Sum of per-panel error estimates (not a rigorous enclosure).
    pub error_estimate: f64,
    pub quadrature_panels: usize,
    pub expansion_panels: usize,
    /// Panels at the `f64` resolution limit, counted at their full width in the estimate.
    pub unresolved_panels: usize,
}

fn gauss_legendre_15() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(15))
}

/// Nodes and weights on `[−1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Compensated (Neumaier) sum.
pub(crate) fn neumaier<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for v in it {
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}

/// A canonical phase prepared for repeated evaluation.
pub(crate) struct Evaluator {
    w: Vec<f64>,
    z: Vec<f64>,
    lz: Vec<f64>,
    /// Largest tolerated absolute error in `φ mod 1`.
    phase_tol: f64,
}

impl Evaluator {
    pub(crate) fn new(phase: &PhaseSpec, phase_tol: f64) -> Self {
        Self {
            w: phase.u.clone(),
            z: phase.x.clone(),
            lz: phase.x.iter().map(|z| z.ln()).collect(),
            phase_tol,
        }
    }

    fn terms(&self, alpha: f64) -> impl Iterator<Item = f64> + '_ {
        self.w.iter().zip(&self.lz).map(move |(w, l)| w * (alpha * l).exp())
    }

    /// `φ^{(m)}(α)` for `m = 0..=upto`.
    pub(crate) fn derivatives(&self, alpha: f64, upto: usize) -> Vec<f64> {
        let t: Vec<f64> = self.terms(alpha).collect();
        (0..=upto)
            .map(|m| neumaier(t.iter().zip(&self.lz).map(|(t, l)| t * l.powi(m as i32))))
            .collect()
    }

    fn d1(&self, alpha: f64) -> f64 {
        neumaier(self.terms(alpha).zip(&self.lz).map(|(t, l)| t * l))
    }

    /// `(φ(α) mod 1 ∈ [−1/2, 1/2), error)`.
    pub(crate) fn frac(&self, alpha: f64) -> (f64, f64) {
        let t: Vec<f64> = self.terms(alpha).collect();
        let err: f64 = t
            .iter()
            .zip(&self.lz)
            .map(|(t, l)| t.abs() * ((alpha * l).abs() + 3.0))
            .sum::<f64>()
            * f64::EPSILON;
        if err <= self.phase_tol {
            let phi = neumaier(t.iter().copied());
            return (phi - phi.round(), err + f64::EPSILON);
        }
        let scale: f64 = t.iter().map(|v| v.abs()).sum();
        let bits = (scale.log2().max(0.0) + 80.0).ceil() as u32;
        let mut acc = Float::with_val(bits, 0);
        for (w, z) in self.w.iter().zip(&self.z) {
            let mut v = Float::with_val(bits, *z);
            v.ln_mut();
            v *= alpha;
            v.exp_mut();
            v *= *w;
            acc += v;
        }
        let r = Float::with_val(bits, acc.round_ref());
        acc -= r;
        (acc.to_f64(), 2f64.powi(-60))
    }

    fn unit(&self, alpha: f64) -> (Complex64, f64) {
        let (f, err) = self.frac(alpha);
        (Complex64::from_polar(1.0, 2.0 * PI * f), 2.0 * PI * err)
    }
}

type Jet = Vec<Complex64>;

fn jet_mul(a: &[Complex64], b: &[Complex64]) -> Jet {
    let n = a.len().min(b.len());
    (0..n).map(|m| (0..=m).map(|i| a[i] * b[m - i]).sum()).collect()
}

fn jet_recip(a: &[Complex64]) -> Jet {
    let mut r = vec![Complex64::new(0.0, 0.0); a.len()];
    r[0] = a[0].inv();
    for m in 1..a.len() {
        let s: Complex64 = (1..=m).map(|i| a[i] * r[m - i]).sum();
        r[m] = -s * r[0];
    }
    r
}

fn jet_deriv(a: &[Complex64]) -> Jet {
    (1..a.len()).map(|m| a[m] * m as f64).collect()
}

/// `(h_j(α0))_{j<K}` and `(g_j(α0))_{j≤K}` with `h_j = g_j/(2πiφ')`, `g_0 = 1`.
fn expansion_at(ev: &Evaluator, alpha: f64, k: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let d = ev.derivatives(alpha, k + 1);
    let mut fact = 1.0;
    let p: Jet = (0..=k)
        .map(|m| {
            if m > 0 {
                fact *= m as f64;
            }
            Complex64::new(0.0, 2.0 * PI * d[m + 1] / fact)
        })
        .collect();
    let r = jet_recip(&p);
    let mut g: Jet = vec![Complex64::new(0.0, 0.0); k + 1];
    g[0] = Complex64::new(1.0, 0.0);
    let mut hs = Vec::with_capacity(k);
    let mut gs = vec![g[0]];
    for _ in 0..k {
        let h = jet_mul(&g, &r);
        hs.push(h[0]);
        g = jet_deriv(&h).into_iter().map(|v| -v).collect();
        gs.push(g[0]);
    }
    (hs, gs)
}

enum Panel {
    Done { value: Complex64, err: f64 },
    Split,
}

struct Integrator<'a> {
    ev: &'a Evaluator,
    opts: IntegralOptions,
    total_width: f64,
    quadrature: usize,
    expansion: usize,
    unresolved: usize,
}

impl Integrator<'_> {
    fn quadrature(&self, a: f64, b: f64) -> (Complex64, f64) {
        let (nodes, weights) = gauss_legendre_15();
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut err = 0.0f64;
        for (x, w) in nodes.iter().zip(weights) {
            let (e, de) = self.ev.unit(mid + half * x);
            acc += e * (w * half);
            err = err.max(de);
        }
        (acc, (err + 1e-15) * (b - a))
    }

    fn expansion(&self, a: f64, b: f64, budget: f64) -> Option<(Complex64, f64)> {
        let w = b - a;
        let (ha, ga) = expansion_at(self.ev, a, MAX_ORDER);
        let (hb, gb) = expansion_at(self.ev, b, MAX_ORDER);
        let inner: Vec<Vec<Complex64>> = [0.25, 0.5, 0.75]
            .iter()
            .map(|t| expansion_at(self.ev, a + t * w, MAX_ORDER).1)
            .collect();
        let order = (1..=MAX_ORDER).find(|&k| {
            let sup = [ga[k].norm(), gb[k].norm()]
                .into_iter()
                .chain(inner.iter().map(|g| g[k].norm()))
                .fold(0.0, f64::max);
            sup.is_finite() && 2.0 * w * sup <= budget
        })?;
        let sup = [ga[order].norm(), gb[order].norm()]
            .into_iter()
            .chain(inner.iter().map(|g| g[order].norm()))
            .fold(0.0, f64::max);
        let (ea, da) = self.ev.unit(a);
        let (eb, db) = self.ev.unit(b);
        let mut value = Complex64::new(0.0, 0.0);
        let mut bnd = 0.0;
        for j in 0..order {
            value += eb * hb[j] - ea * ha[j];
            bnd += hb[j].norm() * db + ha[j].norm() * da;
        }
        Some((value, 2.0 * w * sup + bnd))
    }

    fn panel(&mut self, a: f64, b: f64) -> Panel {
        let w = b - a;
        let budget = self.opts.tol * w / self.total_width;
        let slope = self.ev.d1(a).abs().max(self.ev.d1(b).abs());
        if slope * w <= 0.125 {
            self.quadrature += 1;
            let (value, err) = self.quadrature(a, b);
            return Panel::Done { value, err };
        }
        if self.opts.asymptotic {
            if let Some((value, err)) = self.expansion(a, b, budget) {
                self.expansion += 1;
                return Panel::Done { value, err };
            }
        }
        if w <= MIN_RELATIVE_WIDTH * a.abs().max(1.0) {
            // Quadrature cannot see the oscillation here; the true contribution
            // is at most the width, which is what the estimate records.
            self.unresolved += 1;
            return Panel::Done {
                value: Complex64::new(0.0, 0.0),
                err: w,
            };
        }
        Panel::Split
    }
}

/// Zeros of `φ^{(order)}` in `[lo, hi]`.
pub(crate) fn derivative_zeros_between(phase: &PhaseSpec, order: u32, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let mut c = Vec::new();
    let mut l = Vec::new();
    for (u, x) in phase.u.iter().zip(&phase.x) {
        let lx = x.ln();
        let v = u * lx.powi(order as i32);
        if v != 0.0 {
            c.push(v);
            l.push(lx);
        }
    }
    if c.is_empty() {
        return Err(Error::Degenerate("the derivative vanishes identically".into()));
    }
    zeros(&ExpPoly { c, l }, lo, hi)
}

/// `I(φ, 𝒥)` with explicit options.
pub fn oscillatory_integral_with(
    phase: &PhaseSpec,
    interval: &AlphaInterval,
    opts: &IntegralOptions,
) -> Result<OscillatoryIntegral> {
    if !(opts.tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {}", opts.tol)));
    }
    interval.validate()?;
    let constant: f64 = phase.u.iter().zip(&phase.x).filter(|(_, x)| **x == 1.0).map(|(u, _)| *u).sum();
    let rotation = Complex64::from_polar(1.0, 2.0 * PI * (constant - constant.round()));
    let (canon, _) = canonicalize(&phase.u, &phase.x);
    let (lo, hi) = (interval.a, interval.b());
    if canon.is_empty() {
        return Ok(OscillatoryIntegral {
            value: rotation * (hi - lo),
            error_estimate: 0.0,
            quadrature_panels: 0,
            expansion_panels: 0,
            unresolved_panels: 0,
        });
    }
    let top = canon
        .u
        .iter()
        .zip(&canon.x)
        .map(|(u, x)| u.abs().ln() + hi.max(lo.abs()) * x.ln().abs() + x.ln().abs().ln().max(0.0) * (MAX_ORDER as f64 + 2.0))
        .fold(f64::NEG_INFINITY, f64::max);
    if top > 700.0 {
        return Err(Error::Domain(format!(
            "phase derivatives overflow double precision on [{lo}, {hi}]"
        )));
    }

    let mut cuts = vec![lo, hi];
    for order in [1, 2] {
        cuts.extend(derivative_zeros_between(&canon, order, lo, hi)?);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let ev = Evaluator::new(&canon, 0.05 * opts.tol / (2.0 * PI));
    let mut it = Integrator {
        ev: &ev,
        opts: *opts,
        total_width: hi - lo,
        quadrature: 0,
        expansion: 0,
        unresolved: 0,
    };
    let mut values = Vec::new();
    let mut err = 0.0;
    for piece in cuts.windows(2) {
        // Depth-first, left to right, so the summation order is fixed.
        let mut stack = vec![(piece[0], piece[1])];
        while let Some((a, b)) = stack.pop() {
            if b <= a {
                continue;
            }
            match it.panel(a, b) {
                Panel::Done { value, err: e } => {
                    values.push(value);
                    err += e;
                }
                Panel::Split => {
                    let m = 0.5 * (a + b);
                    stack.push((m, b));
                    stack.push((a, m));
                }
            }
            if it.quadrature + it.expansion + it.unresolved > opts.max_panels {
                return Err(Error::Budget(format!(
                    "oscillatory integral needs more than {} panels",
                    opts.max_panels
                )));
            }
        }
    }
    let value = rotation * crate::fourier::tree_sum(&values);
    Ok(OscillatoryIntegral {
        value,
        error_estimate: err,
        quadrature_panels: it.quadrature,
        expansion_panels: it.expansion,
        unresolved_panels: it.unresolved,
    })
}

/// `I(φ, 𝒥)` to absolute tolerance `tol`.
pub fn oscillatory_integral(phase: &PhaseSpec, interval: &AlphaInterval, tol: f64) -> Result<OscillatoryIntegral> {
    oscillatory_integral_with(phase, interval, &IntegralOptions::new(tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phase(u: &[f64], x: &[f64]) -> PhaseSpec {
        PhaseSpec::new(u.to_vec(), x.to_vec()).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m28: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(28)).sum();
        assert!((m28 - 2.0 / 29.0).abs() < 1e-14);
    }

    #[test]
    fn empty_and_constant_phases() {
        let j = AlphaInterval::new(3.0).unwrap();
        let empty = phase(&[], &[]);
        let i = oscillatory_integral(&empty, &j, 1e-10).unwrap();
        assert_eq!(i.value, Complex64::new(1.0, 0.0));
        let c = phase(&[0.3, 0.2], &[1.0, 1.0]);
        let i = oscillatory_integral(&c, &j, 1e-10).unwrap();
        let expect = Complex64::from_polar(1.0, 2.0 * PI * 0.5);
        assert!((i.value - expect).norm() < 1e-14);
        assert!((i.value.norm() - 1.0).abs() < 1e-14);
    }

    fn reference(ev: &Evaluator, a: f64, b: f64, panels: usize) -> Complex64 {
        let (nodes, weights) = gauss_legendre(20);
        let h = (b - a) / panels as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in nodes.iter().zip(&weights) {
                acc += ev.unit(mid + 0.5 * h * x).0 * (w * 0.5 * h);
            }
        }
        acc
    }

    #[test]
    fn two_to_the_alpha_on_unit_interval() {
        let p = phase(&[1.0], &[2.0]);
        let j = AlphaInterval::new(0.0).unwrap();
        let tol = 1e-12;
        let i = oscillatory_integral(&p, &j, tol).unwrap();
        let ev = Evaluator::new(&p, 1e-16);
        // Ten times the resolution of the adaptive rule.
        let panels = 10 * (i.quadrature_panels + i.expansion_panels).max(16);
        let r = reference(&ev, 0.0, 1.0, panels);
        assert!((i.value - r).norm() <= tol, "{} vs {}", i.value, r);
    }

    #[test]
    fn expansion_agrees_with_pure_quadrature() {
        let p = phase(&[1.0, -1.0], &[2.0, 3.0]);
        let j = AlphaInterval::new(5.0).unwrap();
        let mixed = oscillatory_integral(&p, &j, 1e-11).unwrap();
        let mut opts = IntegralOptions::new(1e-11);
        opts.asymptotic = false;
        let quad = oscillatory_integral_with(&p, &j, &opts).unwrap();
        assert!(mixed.expansion_panels > 0);
        assert!((mixed.value - quad.value).norm() < 1e-10, "{} vs {}", mixed.value, quad.value);
    }

    #[test]
    fn stationary_point_is_handled() {
        // φ(α) = 3^α − 40·2^α has φ' = 0 near α ≈ 7.5.
        let p = phase(&[-40.0, 1.0], &[2.0, 3.0]);
        let j = AlphaInterval::new(7.0).unwrap();
        let mixed = oscillatory_integral(&p, &j, 1e-11).unwrap();
        let mut opts = IntegralOptions::new(1e-11);
        opts.asymptotic = false;
        let quad = oscillatory_integral_with(&p, &j, &opts).unwrap();
        assert!((mixed.value - quad.value).norm() < 1e-10, "{} vs {}", mixed.value, quad.value);
    }

    #[test]
    fn huge_phase_matches_leading_term() {
        let p = phase(&[3.0, -7.0], &[10.0, 100.0]);
        let j = AlphaInterval::new(7.0).unwrap();
        let i = oscillatory_integral(&p, &j, 1e-20).unwrap();
        let ev = Evaluator::new(&p, 1e-25);
        let lead = |a: f64| ev.unit(a).0 / Complex64::new(0.0, 2.0 * PI * ev.d1(a));
        let approx = lead(8.0) - lead(7.0);
        assert!((i.value - approx).norm() <= 1e-3 * approx.norm(), "{} vs {}", i.value, approx);
        assert!(i.value.norm() < 1e-15);
    }

    #[test]
    fn budget_is_enforced() {
        let p = phase(&[1.0], &[50.0]);
        let j = AlphaInterval::new(2.0).unwrap();
        let opts = IntegralOptions {
            tol: 1e-10,
            max_panels: 10,
            asymptotic: false,
        };
        assert!(matches!(oscillatory_integral_with(&p, &j, &opts), Err(Error::Budget(_))));
    }
}
