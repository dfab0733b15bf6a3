//! Pair and k-level correlation sums on the circle.

use rayon::prelude::*;

use super::{Algorithm, CorrelationEstimate, Window};
use crate::error::{Error, Result};
use crate::seqgen::PointSet;

/// Absolute slack when selecting candidates; membership is then decided on
/// the exact scaled offsets, so slack only has to exceed rounding.
const SLACK: f64 = 1e-12;

/// `N·((a − b) − m)`: the one expression every code path uses for a scaled
/// circular offset, so direct and brute-force routes agree bit for bit.
#[inline]
pub(crate) fn scaled_offset(a: f64, b: f64, m: f64, n: f64) -> f64 {
    n * ((a - b) - m)
}

/// Scaled offset of `a − b` at the nearest translate.
#[inline]
fn nearest_offset(a: f64, b: f64, n: f64) -> f64 {
    scaled_offset(a, b, (a - b).round(), n)
}

/// Points sorted on the circle, ties broken by index.
pub(crate) struct Circle<'a> {
    values: &'a [f64],
    order: Vec<usize>,
    sorted: Vec<f64>,
}

impl<'a> Circle<'a> {
    pub(crate) fn new(values: &'a [f64]) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let sorted = order.iter().map(|&i| values[i]).collect();
        Self { values, order, sorted }
    }

    /// Indices whose value lies in the arc `[start, start + len]` (mod 1),
    /// widened by [`SLACK`] on both ends, in circular order from `start`.
    pub(crate) fn arc(&self, start: f64, len: f64) -> impl Iterator<Item = usize> + '_ {
        let n = self.sorted.len();
        let t = (start - SLACK).rem_euclid(1.0);
        let p0 = self.sorted.partition_point(|&v| v < t);
        let reach = len + 2.0 * SLACK;
        (0..n)
            .map(move |s| (p0 + s) % n)
            .take_while(move |&q| {
                let mut d = self.sorted[q] - t;
                if d < 0.0 {
                    d += 1.0;
                }
                d <= reach
            })
            .map(move |q| self.order[q])
    }

    /// Indices `j ≠ i` within circular distance `radius` of point `i`,
    /// ascending by index.
    fn neighbours(&self, i: usize, radius: f64) -> Vec<usize> {
        let mut out: Vec<usize> = self.arc(self.values[i] - radius, 2.0 * radius).filter(|&j| j != i).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn check_width(window: &Window, k: usize, n: usize) -> Result<()> {
    window.validate()?;
    if k < 2 || k > n {
        return Err(Error::Domain(format!("need 2 <= k <= N, got k={k}, N={n}")));
    }
    if window.dimension() != k - 1 {
        return Err(Error::Domain(format!(
            "window has dimension {} but k={k} needs {}",
            window.dimension(),
            k - 1
        )));
    }
    let r = window.support_radius();
    if 2.0 * r >= n as f64 {
        return Err(Error::Width(format!("2·support_radius = {} must be below N = {n}", 2.0 * r)));
    }
    Ok(())
}

/// `R_2` for the closed interval `[a, b]`: `(1/N)·#{m ≠ n : ϑ_n − ϑ_m ∈ [a,b]/N + ℤ}`.
///
/// Sorts once and sweeps each point's arc `[ϑ_m + a/N, ϑ_m + b/N]`;
/// `O(N log N + matches)`.
pub fn pair_correlation(points: &PointSet, a: f64, b: f64) -> Result<CorrelationEstimate> {
    let window = Window::interval(a, b);
    window.validate()?;
    let n = points.len();
    let nf = n as f64;
    if b - a >= nf {
        return Err(Error::Width(format!("interval width {} must be below N = {n}", b - a)));
    }
    let values = points.values();
    let circle = Circle::new(values);
    let len = (b - a) / nf;
    let counts: Vec<u64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let vi = values[i];
            let mut c = 0u64;
            for j in circle.arc(vi + a / nf, len) {
                if j == i {
                    continue;
                }
                let base = ((values[j] - vi) - b / nf).ceil();
                for m in [base - 1.0, base, base + 1.0] {
                    let y = scaled_offset(values[j], vi, m, nf);
                    if a <= y && y <= b {
                        c += 1;
                    }
                }
            }
            c
        })
        .collect();
    let total: u64 = counts.iter().sum();
    Ok(CorrelationEstimate::new(
        total as f64 / nf,
        2,
        points,
        &window,
        Algorithm::DirectWindow,
    ))
}

/// Double loop over ordered pairs and every translate that can land in `[a, b]`.
pub fn pair_correlation_brute(points: &PointSet, a: f64, b: f64) -> Result<CorrelationEstimate> {
    let window = Window::interval(a, b);
    window.validate()?;
    let n = points.len();
    let nf = n as f64;
    let values = points.values();
    let m_lo = (-1.0 - b / nf).floor() as i64;
    let m_hi = (1.0 - a / nf).ceil() as i64;
    let mut count = 0u64;
    for (i, &vi) in values.iter().enumerate() {
        for (j, &vj) in values.iter().enumerate() {
            if i == j {
                continue;
            }
            for m in m_lo..=m_hi {
                let y = scaled_offset(vj, vi, m as f64, nf);
                if a <= y && y <= b {
                    count += 1;
                }
            }
        }
    }
    Ok(CorrelationEstimate::new(count as f64 / nf, 2, points, &window, Algorithm::BruteForce))
}

/// `R_k(f) = (1/N) Σ_{x ∈ 𝒳_k} f(N·(Δ(x) − m))` at the nearest translate `m`.
///
/// Enumerates chains `x_1 → x_2 → … → x_k` of distinct indices whose
/// consecutive points lie within `support_radius/N` on the circle. Each
/// starting index contributes a partial sum accumulated in lexicographic
/// tuple order; partials are added in index order. The result is therefore
/// independent of the thread schedule and identical to
/// [`k_level_correlation_brute`].
pub fn k_level_correlation(points: &PointSet, window: &Window, k: usize) -> Result<CorrelationEstimate> {
    let n = points.len();
    check_width(window, k, n)?;
    let nf = n as f64;
    let values = points.values();
    let circle = Circle::new(values);
    let radius = window.support_radius() / nf;
    let neighbours: Vec<Vec<usize>> = (0..n).into_par_iter().map(|i| circle.neighbours(i, radius)).collect();

    let partials: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|x1| {
            let mut chain = Vec::with_capacity(k);
            let mut y = vec![0.0; k - 1];
            let mut acc = 0.0;
            chain.push(x1);
            extend_chain(values, nf, window, &neighbours, k, &mut chain, &mut y, &mut acc);
            acc
        })
        .collect();
    let total = partials.iter().fold(0.0, |s, p| s + p);
    Ok(CorrelationEstimate::new(total / nf, k, points, window, Algorithm::DirectWindow))
}

#[allow(clippy::too_many_arguments)]
fn extend_chain(
    values: &[f64],
    nf: f64,
    window: &Window,
    neighbours: &[Vec<usize>],
    k: usize,
    chain: &mut Vec<usize>,
    y: &mut [f64],
    acc: &mut f64,
) {
    let depth = chain.len();
    if depth == k {
        *acc += window.eval(y);
        return;
    }
    let last = chain[depth - 1];
    for &next in &neighbours[last] {
        if chain.contains(&next) {
            continue;
        }
        y[depth - 1] = nearest_offset(values[last], values[next], nf);
        chain.push(next);
        extend_chain(values, nf, window, neighbours, k, chain, y, acc);
        chain.pop();
    }
}

/// `O(N^k)` enumeration of every tuple in `𝒳_k`, in lexicographic order.
pub fn k_level_correlation_brute(points: &PointSet, window: &Window, k: usize) -> Result<CorrelationEstimate> {
    let n = points.len();
    check_width(window, k, n)?;
    let nf = n as f64;
    let values = points.values();
    let mut total = 0.0;
    let mut tuple = vec![0usize; k];
    let mut y = vec![0.0; k - 1];
    for x1 in 0..n {
        tuple[0] = x1;
        let mut acc = 0.0;
        brute_level(values, nf, window, 1, &mut tuple, &mut y, &mut acc);
        total += acc;
    }
    Ok(CorrelationEstimate::new(total / nf, k, points, window, Algorithm::BruteForce))
}

fn brute_level(values: &[f64], nf: f64, window: &Window, depth: usize, tuple: &mut [usize], y: &mut [f64], acc: &mut f64) {
    if depth == tuple.len() {
        *acc += window.eval(y);
        return;
    }
    for next in 0..values.len() {
        if tuple[..depth].contains(&next) {
            continue;
        }
        tuple[depth] = next;
        y[depth - 1] = nearest_offset(values[tuple[depth - 1]], values[next], nf);
        brute_level(values, nf, window, depth + 1, tuple, y, acc);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(v: &[f64]) -> PointSet {
        PointSet::external(v.to_vec(), 0.0).unwrap()
    }

    #[test]
    fn four_equispaced_points() {
        let ps = ext(&[0.0, 0.25, 0.5, 0.75]);
        assert_eq!(pair_correlation(&ps, -1.1, 1.1).unwrap().value, 2.0);
        assert_eq!(pair_correlation_brute(&ps, -1.1, 1.1).unwrap().value, 2.0);
        let w = Window::interval(-1.1, 1.1);
        assert_eq!(k_level_correlation(&ps, &w, 2).unwrap().value, 2.0);
    }

    #[test]
    fn three_close_points_k3() {
        let ps = ext(&[0.0, 0.1, 0.2]);
        let w = Window::cube(-0.5, 0.5, 2);
        let direct = k_level_correlation(&ps, &w, 3).unwrap().value;
        let brute = k_level_correlation_brute(&ps, &w, 3).unwrap().value;
        assert_eq!(direct, 2.0 / 3.0);
        assert_eq!(brute, direct);
    }

    #[test]
    fn single_point_has_no_pairs() {
        let ps = ext(&[0.3]);
        assert_eq!(pair_correlation(&ps, -0.4, 0.4).unwrap().value, 0.0);
    }

    #[test]
    fn pair_matches_brute_on_uniform() {
        let ps = PointSet::uniform(200, 7).unwrap();
        for (a, b) in [(-0.5, 0.5), (0.0, 3.0), (-7.0, -2.5), (-60.0, 60.0), (-150.0, -51.0)] {
            let d = pair_correlation(&ps, a, b).unwrap().value;
            let o = pair_correlation_brute(&ps, a, b).unwrap().value;
            assert_eq!(d, o, "[{a}, {b}]");
            let w = Window::interval(a, b);
            if 2.0 * w.support_radius() < 200.0 {
                assert_eq!(k_level_correlation(&ps, &w, 2).unwrap().value, d, "[{a}, {b}]");
            }
        }
    }

    #[test]
    fn width_errors() {
        let ps = PointSet::uniform(10, 1).unwrap();
        assert!(matches!(pair_correlation(&ps, -5.0, 5.0), Err(Error::Width(_))));
        assert!(matches!(
            k_level_correlation(&ps, &Window::interval(-5.0, 5.0), 2),
            Err(Error::Width(_))
        ));
        assert!(k_level_correlation(&ps, &Window::unit_box(), 3).is_err());
    }

    #[test]
    fn coincident_points_are_distinct_slots() {
        let ps = ext(&[0.0, 0.0, 0.0]);
        // Every ordered pair of distinct indices sits at offset 0.
        assert_eq!(pair_correlation(&ps, -0.1, 0.1).unwrap().value, 2.0);
        let w = Window::cube(-0.1, 0.1, 2);
        assert_eq!(k_level_correlation(&ps, &w, 3).unwrap().value, 2.0);
    }

    #[test]
    fn gaussian_k3_matches_brute() {
        let ps = PointSet::uniform(60, 3).unwrap();
        let w = Window::gaussian(1.0, 4.0, 2);
        let d = k_level_correlation(&ps, &w, 3).unwrap().value;
        let b = k_level_correlation_brute(&ps, &w, 3).unwrap().value;
        assert_eq!(d, b);
        assert!(d > 0.0);
    }
}
