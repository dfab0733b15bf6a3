//! Gap distributions, simplex correlations and the gap sandwich.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::correlation::Circle;
use super::{Algorithm, CorrelationEstimate, Window};
use crate::error::{Error, Result};
use crate::seqgen::PointSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapKind {
    /// `N = L − 1` gaps between consecutive order statistics, no wraparound.
    Linear,
    /// `N = L` nearest strictly-positive forward neighbours on the circle.
    Circular,
}

/// Empirical CDF of scaled nearest-neighbour gaps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapDistribution {
    pub xs: Vec<f64>,
    pub g_values: Vec<f64>,
    #[serde(rename = "N")]
    pub n: usize,
    pub kind: GapKind,
}

fn check_grid(xs: &[f64]) -> Result<()> {
    match xs.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        Some(bad) => Err(Error::Domain(format!("gap grid values must be finite and nonnegative, got {bad}"))),
        None => Ok(()),
    }
}

/// Forward circular difference `a − b` taken in `[0, 1]`.
#[inline]
fn circ_diff(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d < 0.0 { d + 1.0 } else { d }
}

/// `g(x) = (1/N)·#{n ≤ N : N·(ϑ_(n+1) − ϑ_(n)) ≤ x}` with `N = len − 1`.
///
/// Uses the `N` gaps between consecutive order statistics, without a
/// wraparound gap. Comparisons are widened by `N·(2·err_bound + 4ε)`: the
/// certificate of both endpoints plus the rounding of decimal inputs and of
/// the subtraction, so points that coincide to within that slack count as
/// coincident at `x = 0`.
pub fn gap_distribution(points: &PointSet, xs: &[f64]) -> Result<GapDistribution> {
    if points.len() < 2 {
        return Err(Error::Degenerate("a gap distribution needs at least 2 points".into()));
    }
    check_grid(xs)?;
    let mut sorted = points.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() - 1;
    let nf = n as f64;
    let mut gaps: Vec<f64> = sorted.windows(2).map(|w| nf * (w[1] - w[0])).collect();
    gaps.sort_by(f64::total_cmp);
    let tol = nf * (2.0 * points.err_bound() + 4.0 * f64::EPSILON);
    let g_values = xs
        .iter()
        .map(|&x| gaps.partition_point(|&g| g <= x + tol) as f64 / nf)
        .collect();
    Ok(GapDistribution {
        xs: xs.to_vec(),
        g_values,
        n,
        kind: GapKind::Linear,
    })
}

/// `G(x) = (1/N)·#{i : N·d_i < x}`, `d_i` the distance from `ϑ_i` to the
/// next strictly larger point on the circle (`N = len`).
///
/// This is the statistic the simplex alternating sums bracket exactly:
/// `N·d_i < x` holds precisely when the open window `(ϑ_i, ϑ_i + x/N)`
/// contains a point.
pub fn circular_gap_distribution(points: &PointSet, xs: &[f64]) -> Result<GapDistribution> {
    check_grid(xs)?;
    let values = points.values();
    let n = values.len();
    let nf = n as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut scaled: Vec<f64> = (0..n)
        .map(|p| {
            // First distinct value after position p, cyclically.
            (1..n)
                .map(|s| sorted[(p + s) % n])
                .find(|&v| v != sorted[p])
                .map_or(f64::INFINITY, |v| nf * circ_diff(v, sorted[p]))
        })
        .collect();
    scaled.sort_by(f64::total_cmp);
    let g_values = xs.iter().map(|&x| scaled.partition_point(|&d| d < x) as f64 / nf).collect();
    Ok(GapDistribution {
        xs: xs.to_vec(),
        g_values,
        n,
        kind: GapKind::Circular,
    })
}

fn check_simplex(n: usize, x: f64, k: usize) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::Domain(format!("need 2 <= k <= N, got k={k}, N={n}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("simplex dilation must be nonnegative, got {x}")));
    }
    if x >= n as f64 {
        return Err(Error::Width(format!("simplex dilation {x} must be below N = {n}")));
    }
    Ok(())
}

/// `S_k = N·R_k(1_{xΔ_{k−1}})` for `k = 2..=k_max`, as exact integers
/// (index `k` of the returned vector; entries 0 and 1 are unused).
///
/// A chain of `k` distinct indices with strictly positive consecutive
/// forward differences summing below `x/N` is a base point followed by
/// `k − 1` points of its open forward window taken in strictly decreasing
/// value order, so the count at base `i` is the elementary symmetric
/// polynomial `e_{k−1}` of the window's value multiplicities.
pub fn simplex_counts(points: &PointSet, x: f64, k_max: usize) -> Result<Vec<u128>> {
    let values = points.values();
    let n = values.len();
    check_simplex(n, x, k_max)?;
    let nf = n as f64;
    let circle = Circle::new(values);
    let per_base: Vec<Vec<u128>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let vi = values[i];
            let mut inside: Vec<f64> = circle
                .arc(vi, x / nf)
                .map(|j| values[j])
                .filter(|&v| {
                    let d = circ_diff(v, vi);
                    d > 0.0 && nf * d < x
                })
                .collect();
            inside.sort_by(f64::total_cmp);
            // e_r of the multiplicities via Π (1 + m_g t), truncated at degree k_max − 1.
            let mut e = vec![0u128; k_max];
            e[0] = 1;
            let mut idx = 0;
            while idx < inside.len() {
                let mut end = idx + 1;
                while end < inside.len() && inside[end] == inside[idx] {
                    end += 1;
                }
                let m = (end - idx) as u128;
                for r in (1..k_max).rev() {
                    e[r] += m * e[r - 1];
                }
                idx = end;
            }
            e
        })
        .collect();
    let mut s = vec![0u128; k_max + 1];
    for e in &per_base {
        for k in 2..=k_max {
            s[k] += e[k - 1];
        }
    }
    Ok(s)
}

/// `R_k(1_{xΔ_{k−1}})`: ordered chains of distinct indices with strictly
/// positive consecutive circular differences summing below `x/N`.
pub fn simplex_correlation(points: &PointSet, x: f64, k: usize) -> Result<CorrelationEstimate> {
    let s = simplex_counts(points, x, k)?;
    let n = points.len();
    Ok(CorrelationEstimate::new(
        s[k] as f64 / n as f64,
        k,
        points,
        &Window::simplex(x, k),
        Algorithm::DirectWindow,
    ))
}

/// `O(N^k)` chain enumeration of [`simplex_correlation`].
pub fn simplex_correlation_brute(points: &PointSet, x: f64, k: usize) -> Result<CorrelationEstimate> {
    let values = points.values();
    let n = values.len();
    check_simplex(n, x, k)?;
    let nf = n as f64;
    fn walk(values: &[f64], nf: f64, x: f64, k: usize, chain: &mut Vec<usize>, sum: f64) -> u128 {
        if chain.len() == k {
            return 1;
        }
        let last = chain[chain.len() - 1];
        let mut c = 0;
        for next in 0..values.len() {
            if chain.contains(&next) {
                continue;
            }
            let d = circ_diff(values[last], values[next]);
            let s = sum + nf * d;
            if d > 0.0 && s < x {
                chain.push(next);
                c += walk(values, nf, x, k, chain, s);
                chain.pop();
            }
        }
        c
    }
    let mut count = 0u128;
    for x1 in 0..n {
        count += walk(values, nf, x, k, &mut vec![x1], 0.0);
    }
    Ok(CorrelationEstimate::new(
        count as f64 / nf,
        k,
        points,
        &Window::simplex(x, k),
        Algorithm::BruteForce,
    ))
}

/// Alternating simplex sums bracketing the gap CDF at one `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSandwich {
    pub x: f64,
    #[serde(rename = "K")]
    pub k_terms: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// `Σ_{k=2}^{2K+1} (−1)^k R_k(1_{xΔ_{k−1}})`.
    pub lower: f64,
    /// `Σ_{k=2}^{2K} (−1)^k R_k(1_{xΔ_{k−1}})`.
    pub upper: f64,
}

impl GapSandwich {
    pub fn brackets(&self, g: f64) -> bool {
        self.lower <= g && g <= self.upper
    }
}

/// Lower and upper alternating sums of simplex correlations.
///
/// The sums are formed on the integer counts and divided by `N` once, so
/// `lower ≤ G(x) ≤ upper` (with `G` from [`circular_gap_distribution`])
/// holds exactly in floating point whenever the points are pairwise
/// distinct: at each base point these are the Bonferroni truncations of
/// `1[j ≥ 1] = Σ_{r ≥ 1} (−1)^{r+1} C(j, r)`.
pub fn gap_sandwich(points: &PointSet, x: f64, k_terms: usize) -> Result<GapSandwich> {
    if k_terms < 1 {
        return Err(Error::Domain("gap sandwich needs K >= 1".into()));
    }
    let n = points.len();
    let top = 2 * k_terms + 1;
    if top > n {
        return Err(Error::Domain(format!("K={k_terms} needs at least {top} points")));
    }
    let s = simplex_counts(points, x, top)?;
    let signed = |k: usize| if k % 2 == 0 { s[k] as i128 } else { -(s[k] as i128) };
    let upper: i128 = (2..=2 * k_terms).map(signed).sum();
    let lower = upper + signed(top);
    let nf = n as f64;
    Ok(GapSandwich {
        x,
        k_terms,
        n,
        lower: lower as f64 / nf,
        upper: upper as f64 / nf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localstats::k_level_correlation;

    fn ext(v: &[f64]) -> PointSet {
        PointSet::external(v.to_vec(), 0.0).unwrap()
    }

    #[test]
    fn equal_spacing_gaps() {
        let ps = ext(&[0.0, 0.2, 0.4, 0.6, 0.8]);
        let g = gap_distribution(&ps, &[0.79, 0.8]).unwrap();
        assert_eq!(g.n, 4);
        assert_eq!(g.g_values, vec![0.0, 1.0]);
    }

    #[test]
    fn hand_counted_gaps() {
        let ps = ext(&[0.8, 0.1, 0.4, 0.2]);
        let g = gap_distribution(&ps, &[0.0, 0.29, 1.0, 1.2]).unwrap();
        assert_eq!(g.g_values, vec![0.0, 0.0, 2.0 / 3.0, 1.0]);
        assert!(gap_distribution(&ext(&[0.5]), &[1.0]).is_err());
    }

    #[test]
    fn kronecker_three_distances() {
        let gamma = (5f64.sqrt() - 1.0) / 2.0;
        let ps = PointSet::kronecker(gamma, 101).unwrap();
        let mut s = ps.values().to_vec();
        s.sort_by(f64::total_cmp);
        let mut gaps: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.sort_by(f64::total_cmp);
        let mut distinct = vec![gaps[0]];
        for g in gaps {
            if g - distinct.last().unwrap() > 1e-12 {
                distinct.push(g);
            }
        }
        assert!(distinct.len() <= 3, "{distinct:?}");
    }

    #[test]
    fn simplex_k2_is_one_sided_pair_count() {
        let ps = ext(&[0.0, 0.2, 0.4, 0.6, 0.8]);
        // Each point has exactly one forward neighbour at distance 0.2 < 1.5/5.
        assert_eq!(simplex_correlation(&ps, 1.5, 2).unwrap().value, 1.0);
        assert_eq!(simplex_correlation_brute(&ps, 1.5, 2).unwrap().value, 1.0);
        assert_eq!(simplex_correlation(&ps, 1e-9, 2).unwrap().value, 0.0);
    }

    #[test]
    fn simplex_matches_brute_and_window() {
        let ps = PointSet::uniform(80, 11).unwrap();
        for k in 2..=4 {
            for x in [0.5, 1.0, 2.5, 10.0] {
                let fast = simplex_correlation(&ps, x, k).unwrap().value;
                let brute = simplex_correlation_brute(&ps, x, k).unwrap().value;
                assert_eq!(fast, brute, "k={k} x={x}");
                let via_window = k_level_correlation(&ps, &Window::simplex(x, k), k).unwrap().value;
                assert_eq!(fast, via_window, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn coincident_values_are_not_chained() {
        let ps = ext(&[0.1, 0.1, 0.3]);
        // Bases at 0.1 each see the single point 0.3 (two pairs); 0.3 sees both 0.1s after wrapping.
        let s = simplex_counts(&ps, 2.9, 3).unwrap();
        assert_eq!(s[2], 4);
        assert_eq!(s[3], 0);
    }

    #[test]
    fn sandwich_brackets_circular_gaps() {
        let ps = PointSet::uniform(300, 5).unwrap();
        let g = circular_gap_distribution(&ps, &[1.0]).unwrap().g_values[0];
        let s = gap_sandwich(&ps, 1.0, 1).unwrap();
        assert!(s.brackets(g), "{s:?} vs {g}");
        let s0 = gap_sandwich(&ps, 0.0, 1).unwrap();
        assert_eq!((s0.lower, s0.upper), (0.0, 0.0));
        assert_eq!(circular_gap_distribution(&ps, &[0.0]).unwrap().g_values[0], 0.0);
    }

    #[test]
    fn sandwich_k1_reads_off_r2_minus_r3() {
        let ps = PointSet::uniform(50, 9).unwrap();
        let s = gap_sandwich(&ps, 2.0, 1).unwrap();
        let r2 = simplex_correlation(&ps, 2.0, 2).unwrap().value;
        let r3 = simplex_correlation(&ps, 2.0, 3).unwrap().value;
        assert_eq!(s.upper, r2);
        assert!((s.lower - (r2 - r3)).abs() < 1e-15);
    }
}
