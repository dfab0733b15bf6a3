//! Fourier transforms of windows, `f̂(ξ) = ∫ f(x) e(−ξx) dx`, and their
//! certified decay constants.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::localstats::{bump_profile_integral, Window};

/// Landau's uniform bound `|J_ν(x)| ≤ b·x^{−1/3}` (all `ν > 0`, `x > 0`).
const LANDAU_B: f64 = 0.7858;

/// A window used on the frequency side. Only one-dimensional profiles are
/// transformed; product windows use their per-coordinate profile.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierWindow {
    base: Window,
}

impl FourierWindow {
    /// Gaussian, bump and box windows are accepted; box windows carry a
    /// slow-decay warning (see [`FourierWindow::warning`]).
    pub fn new(base: Window) -> Result<Self> {
        base.validate()?;
        match &base {
            Window::Simplex { .. } => Err(Error::Domain(
                "simplex windows have no Fourier-side representation here".into(),
            )),
            Window::Box { intervals } if intervals.len() != 1 => Err(Error::Domain(
                "Fourier-side box windows must be one-dimensional".into(),
            )),
            _ => Ok(Self { base }),
        }
    }

    pub fn base(&self) -> &Window {
        &self.base
    }

    /// Set for windows whose transform decays too slowly for truncation.
    pub fn warning(&self) -> Option<String> {
        match &self.base {
            Window::Box { .. } => Some(format!(
                "window {} has a 1/ξ Fourier tail; the truncated expansion converges slowly and no truncation bound is certified",
                self.base
            )),
            _ => None,
        }
    }

    /// `f̂(ξ)` of the one-dimensional profile.
    ///
    /// Gaussian windows use the transform of the untruncated density,
    /// `exp(−2π²σ²ξ²)`; the truncation is accounted for separately by
    /// [`gaussian_truncation_term`].
    pub fn transform(&self, xi: f64) -> Complex64 {
        match &self.base {
            Window::Gaussian { sigma, .. } => Complex64::new((-2.0 * PI * PI * sigma * sigma * xi * xi).exp(), 0.0),
            Window::Bump { radius, order, .. } => Complex64::new(bump_transform(*radius, *order, xi), 0.0),
            Window::Box { intervals } => {
                let (a, b) = intervals[0];
                if xi == 0.0 {
                    return Complex64::new(b - a, 0.0);
                }
                // (e(−ξa) − e(−ξb)) / (2πiξ)
                let ea = Complex64::from_polar(1.0, -2.0 * PI * xi * a);
                let eb = Complex64::from_polar(1.0, -2.0 * PI * xi * b);
                (ea - eb) / Complex64::new(0.0, 2.0 * PI * xi)
            }
            Window::Simplex { .. } => unreachable!("rejected by FourierWindow::new"),
        }
    }

    /// Real part of `f̂`, which is all that survives when summed against
    /// an even sequence such as `|S(n)|²`.
    pub fn transform_even(&self, xi: f64) -> f64 {
        self.transform(xi).re
    }

    /// `(c_s, s)` with `|f̂(ξ)| ≤ c_s·|ξ|^{−s}` for all `ξ ≠ 0`.
    pub fn decay_constant(&self, s: f64) -> Result<f64> {
        if !(s > 1.0) {
            return Err(Error::Domain(format!("decay order must exceed 1, got {s}")));
        }
        match &self.base {
            Window::Gaussian { sigma, .. } => {
                // max_ξ ξ^s·exp(−2π²σ²ξ²) is attained at ξ² = s/(4π²σ²).
                Ok((s / (4.0 * PI * PI * sigma * sigma * std::f64::consts::E)).powf(s / 2.0))
            }
            Window::Bump { radius, order, .. } => {
                let s0 = *order as f64 + 5.0 / 6.0;
                if s > s0 {
                    return Err(Error::DecayUnknown(format!(
                        "bump of order {order} has certified decay only up to |ξ|^-{s0}"
                    )));
                }
                let c0 = bump_decay_constant(*radius, *order);
                // Interpolate min(f̂(0), c0·ξ^{−s0}) ≤ f̂(0)^{1−θ}·(c0 ξ^{−s0})^θ, θ = s/s0.
                let theta = s / s0;
                let a = bump_profile_integral(*radius, *order);
                Ok(a.powf(1.0 - theta) * c0.powf(theta))
            }
            _ => Err(Error::DecayUnknown(format!("no certified Fourier decay for window {}", self.base))),
        }
    }
}

/// `c` in `|f̂(ξ)| ≤ c·|ξ|^{−(p+5/6)}` for the bump `(1 − (x/r)²)^p`.
///
/// `f̂(ξ) = r·p!·2^{p+1}·j_p(z)/z^p` with `z = 2πrξ`, and
/// `|j_p(z)| = √(π/2z)·|J_{p+1/2}(z)| ≤ √(π/2)·b·z^{−5/6}`.
fn bump_decay_constant(radius: f64, order: u32) -> f64 {
    let p = order as f64;
    let fact: f64 = (1..=order).map(|i| i as f64).product();
    radius * fact * 2f64.powf(p + 1.0) * (PI / 2.0).sqrt() * LANDAU_B * (2.0 * PI * radius).powf(-(p + 5.0 / 6.0))
}

/// `f̂(ξ)` for `(1 − (x/r)²)^p` on `|x| < r`.
pub fn bump_transform(radius: f64, order: u32, xi: f64) -> f64 {
    let fact: f64 = (1..=order).map(|i| i as f64).product();
    let z = 2.0 * PI * radius * xi.abs();
    radius * fact * 2f64.powi(order as i32 + 1) * spherical_jn_over_zn(order, z)
}

/// `j_p(z)/z^p`, regular at 0 (where it equals `1/(2p+1)!!`).
pub fn spherical_jn_over_zn(p: u32, z: f64) -> f64 {
    let pf = p as f64;
    if z <= pf.max(1.0) {
        let mut term = 1.0 / (1..=p).fold(1.0, |acc, j| acc * (2 * j + 1) as f64);
        let mut acc = term;
        let q = -0.5 * z * z;
        for k in 0..200 {
            let kf = k as f64;
            term *= q / ((kf + 1.0) * (2.0 * pf + 2.0 * kf + 3.0));
            acc += term;
            if term.abs() <= 1e-17 * acc.abs() {
                break;
            }
        }
        acc
    } else {
        // Upward recurrence is stable for p < z.
        let (s, c) = z.sin_cos();
        let mut jm = s / z;
        if p == 0 {
            return jm;
        }
        let mut j = s / (z * z) - c / z;
        for l in 1..p {
            let next = (2 * l + 1) as f64 / z * j - jm;
            jm = j;
            j = next;
        }
        j / z.powi(p as i32)
    }
}

/// `|R_2(φ_σ) − R_2(φ_σ·1[|x| ≤ r])| ≤ 2.02·(N−1)·φ_σ(r)`: the gap between the
/// truncated Gaussian used on the direct side and the full Gaussian whose
/// transform the frequency side uses (each pair has at most two translates
/// beyond the cutoff of non-negligible size, bounded by the density at `r`).
pub fn gaussian_truncation_term(window: &Window, n: usize) -> f64 {
    match window {
        Window::Gaussian { sigma, radius, .. } => {
            let density = (-0.5 * (radius / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt());
            2.02 * (n.saturating_sub(1)) as f64 * density
        }
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
        // Composite Simpson.
        let h = (b - a) / m as f64;
        let mut acc = f(a) + f(b);
        for i in 1..m {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn bump_transform_matches_quadrature() {
        for order in [0u32, 1, 2, 3, 6] {
            for xi in [0.0, 0.1, 0.37, 1.0, 2.5, 7.3] {
                let r = 1.3;
                let f = |x: f64| (1.0 - (x / r).powi(2)).powi(order as i32) * (2.0 * PI * xi * x).cos();
                let q = quad(f, -r, r, 200_000);
                let t = bump_transform(r, order, xi);
                assert!((q - t).abs() < 1e-9, "p={order} ξ={xi}: {q} vs {t}");
            }
        }
    }

    #[test]
    fn transform_at_zero_is_integral() {
        for w in [Window::bump(2.0, 3, 1), Window::interval(-0.3, 0.9)] {
            let fw = FourierWindow::new(w.clone()).unwrap();
            assert!((fw.transform(0.0).re - w.integral()).abs() < 1e-14);
        }
        let g = FourierWindow::new(Window::gaussian(1.0, 8.0, 1)).unwrap();
        assert_eq!(g.transform(0.0).re, 1.0);
    }

    #[test]
    fn box_transform_matches_quadrature() {
        let fw = FourierWindow::new(Window::interval(-0.3, 0.9)).unwrap();
        for xi in [0.2, 1.7] {
            let re = quad(|x| (2.0 * PI * xi * x).cos(), -0.3, 0.9, 10_000);
            let im = quad(|x| -(2.0 * PI * xi * x).sin(), -0.3, 0.9, 10_000);
            let t = fw.transform(xi);
            assert!((t.re - re).abs() < 1e-12 && (t.im - im).abs() < 1e-12);
        }
        assert!(fw.warning().is_some());
    }

    #[test]
    fn decay_constants_dominate() {
        let g = FourierWindow::new(Window::gaussian(0.8, 8.0, 1)).unwrap();
        let b = FourierWindow::new(Window::bump(1.5, 3, 1)).unwrap();
        for s in [1.5, 2.0, 3.5] {
            let cg = g.decay_constant(s).unwrap();
            let cb = b.decay_constant(s).unwrap();
            for i in 1..4000 {
                let xi = i as f64 * 0.01;
                assert!(g.transform(xi).re.abs() <= cg * xi.powf(-s) * (1.0 + 1e-12));
                assert!(b.transform(xi).re.abs() <= cb * xi.powf(-s) * (1.0 + 1e-12), "s={s} ξ={xi}");
            }
        }
        assert!(b.decay_constant(4.0).is_err());
        let bx = FourierWindow::new(Window::unit_box()).unwrap();
        assert!(matches!(bx.decay_constant(2.0), Err(Error::DecayUnknown(_))));
    }
}
