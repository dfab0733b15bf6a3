//! Test functions `f: ℝ^{k−1} → ℝ` for correlation sums.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};

/// A compactly supported window. Gaussian and bump windows are products of
/// one-dimensional profiles; box windows are products of closed intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Window {
    /// `Π 1[a_i ≤ y_i ≤ b_i]`.
    Box { intervals: Vec<(f64, f64)> },
    /// Indicator of the open simplex `x·Δ_{dimension}`:
    /// `y_i > 0` for all `i` and `Σ y_i < x`.
    Simplex { x: f64, dimension: usize },
    /// `Π φ_σ(y_i)·1[|y_i| ≤ radius]`, `φ_σ` the centred normal density.
    Gaussian {
        sigma: f64,
        radius: f64,
        dimension: usize,
    },
    /// `Π (1 − (y_i/radius)²)^order` on `|y_i| < radius`.
    Bump {
        radius: f64,
        order: u32,
        dimension: usize,
    },
}

impl Window {
    pub fn unit_box() -> Self {
        Self::Box {
            intervals: vec![(-0.5, 0.5)],
        }
    }

    pub fn interval(a: f64, b: f64) -> Self {
        Self::Box {
            intervals: vec![(a, b)],
        }
    }

    /// The same interval on every coordinate.
    pub fn cube(a: f64, b: f64, dimension: usize) -> Self {
        Self::Box {
            intervals: vec![(a, b); dimension],
        }
    }

    /// Window of `R_k(1_{xΔ_{k−1}})`.
    pub fn simplex(x: f64, k: usize) -> Self {
        Self::Simplex {
            x,
            dimension: k.saturating_sub(1),
        }
    }

    pub fn gaussian(sigma: f64, radius: f64, dimension: usize) -> Self {
        Self::Gaussian {
            sigma,
            radius,
            dimension,
        }
    }

    pub fn bump(radius: f64, order: u32, dimension: usize) -> Self {
        Self::Bump {
            radius,
            order,
            dimension,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Domain(msg));
        match self {
            Self::Box { intervals } => {
                if intervals.is_empty() {
                    return bad("box window needs at least one interval".into());
                }
                for &(a, b) in intervals {
                    if !(a.is_finite() && b.is_finite() && a <= b) {
                        return bad(format!("box interval [{a}, {b}] is not a finite interval"));
                    }
                }
            }
            Self::Simplex { x, dimension } => {
                if *dimension == 0 {
                    return bad("simplex window needs dimension >= 1".into());
                }
                if !(*x >= 0.0 && x.is_finite()) {
                    return bad(format!("simplex dilation must be nonnegative, got {x}"));
                }
            }
            Self::Gaussian {
                sigma,
                radius,
                dimension,
            } => {
                if *dimension == 0 || !(*sigma > 0.0) || !(*radius > 0.0) || !radius.is_finite() {
                    return bad(format!(
                        "gaussian window needs sigma > 0, finite radius > 0, dimension >= 1 (got {sigma}, {radius}, {dimension})"
                    ));
                }
            }
            Self::Bump {
                radius, dimension, ..
            } => {
                if *dimension == 0 || !(*radius > 0.0) || !radius.is_finite() {
                    return bad(format!(
                        "bump window needs finite radius > 0 and dimension >= 1 (got {radius}, {dimension})"
                    ));
                }
            }
        }
        Ok(())
    }

    /// `k − 1`.
    pub fn dimension(&self) -> usize {
        match self {
            Self::Box { intervals } => intervals.len(),
            Self::Simplex { dimension, .. }
            | Self::Gaussian { dimension, .. }
            | Self::Bump { dimension, .. } => *dimension,
        }
    }

    /// Smallest `r` with `supp f ⊆ [−r, r]^{k−1}`.
    pub fn support_radius(&self) -> f64 {
        match self {
            Self::Box { intervals } => intervals.iter().map(|(a, b)| a.abs().max(b.abs())).fold(0.0, f64::max),
            Self::Simplex { x, .. } => *x,
            Self::Gaussian { radius, .. } | Self::Bump { radius, .. } => *radius,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        true
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self, Self::Gaussian { .. } | Self::Bump { .. })
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.dimension());
        match self {
            Self::Box { intervals } => {
                if intervals.iter().zip(y).all(|(&(a, b), &v)| a <= v && v <= b) {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Simplex { x, .. } => {
                if y.iter().all(|&v| v > 0.0) && y.iter().sum::<f64>() < *x {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Gaussian { sigma, radius, .. } => {
                let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
                let mut acc = 1.0;
                for &v in y {
                    if v.abs() > *radius {
                        return 0.0;
                    }
                    acc *= norm * (-0.5 * (v / sigma).powi(2)).exp();
                }
                acc
            }
            Self::Bump { radius, order, .. } => {
                let mut acc = 1.0;
                for &v in y {
                    let t = v / radius;
                    if t.abs() >= 1.0 {
                        return 0.0;
                    }
                    acc *= (1.0 - t * t).powi(*order as i32);
                }
                acc
            }
        }
    }

    /// `∫ f` in closed form.
    pub fn integral(&self) -> f64 {
        match self {
            Self::Box { intervals } => intervals.iter().map(|(a, b)| b - a).product(),
            Self::Simplex { x, dimension } => x.powi(*dimension as i32) / factorial(*dimension),
            Self::Gaussian {
                sigma,
                radius,
                dimension,
            } => erf(radius / (sigma * std::f64::consts::SQRT_2)).powi(*dimension as i32),
            Self::Bump {
                radius,
                order,
                dimension,
            } => bump_profile_integral(*radius, *order).powi(*dimension as i32),
        }
    }
}

/// `∫_{−r}^{r} (1 − (y/r)²)^p dy = 2r·Π_{j=1}^{p} 2j/(2j+1)`.
pub fn bump_profile_integral(radius: f64, order: u32) -> f64 {
    (1..=order).fold(2.0 * radius, |acc, j| acc * (2 * j) as f64 / (2 * j + 1) as f64)
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

impl fmt::Display for Window {
    /// The CLI window syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Box { intervals } => {
                let (a, b) = intervals[0];
                if intervals.iter().all(|iv| *iv == (a, b)) {
                    write!(f, "box:{a}:{b}")
                } else {
                    let parts: Vec<String> = intervals.iter().map(|(a, b)| format!("{a}:{b}")).collect();
                    write!(f, "box:{}", parts.join(":"))
                }
            }
            Self::Simplex { x, .. } => write!(f, "simplex:{x}"),
            Self::Gaussian { sigma, radius, .. } => write!(f, "gauss:{sigma}:{radius}"),
            Self::Bump { radius, order, .. } => write!(f, "bump:{radius}:{order}"),
        }
    }
}

/// Parses `box:a:b` (repeated on every coordinate, or one `a:b` pair per
/// coordinate), `gauss:sigma:radius`, `bump:radius:order` or `simplex:x`.
pub fn parse_window(spec: &str, dimension: usize) -> Result<Window> {
    let mut parts = spec.split(':');
    let kind = parts.next().unwrap_or_default();
    let nums: Vec<&str> = parts.collect();
    let num = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| Error::Domain(format!("bad number {s:?} in window {spec:?}")))
    };
    let arity = |n: usize| -> Result<()> {
        if nums.len() == n {
            Ok(())
        } else {
            Err(Error::Domain(format!("window {spec:?} expects {n} parameters")))
        }
    };
    let w = match kind {
        "box" => {
            if nums.len() == 2 {
                Window::cube(num(nums[0])?, num(nums[1])?, dimension)
            } else if nums.len() == 2 * dimension {
                let intervals = nums
                    .chunks(2)
                    .map(|c| Ok((num(c[0])?, num(c[1])?)))
                    .collect::<Result<Vec<_>>>()?;
                Window::Box { intervals }
            } else {
                return Err(Error::Domain(format!("window {spec:?} expects 2 or {} parameters", 2 * dimension)));
            }
        }
        "gauss" | "gaussian" => {
            arity(2)?;
            Window::gaussian(num(nums[0])?, num(nums[1])?, dimension)
        }
        "bump" => {
            arity(2)?;
            let order = nums[1]
                .parse::<u32>()
                .map_err(|_| Error::Domain(format!("bump order must be a nonnegative integer in {spec:?}")))?;
            Window::bump(num(nums[0])?, order, dimension)
        }
        "simplex" => {
            arity(1)?;
            Window::Simplex {
                x: num(nums[0])?,
                dimension,
            }
        }
        other => return Err(Error::Domain(format!("unknown window kind {other:?}"))),
    };
    w.validate()?;
    Ok(w)
}
