//! Tail exponents, growth exponents and distances between distributions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Checkpoint;
use crate::theory::DegreeSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMethod {
    /// Least squares on `(ln d, ln value)` over nonzero entries.
    LoglogLs,
    /// Hill estimator, `1 + 1 / mean(ln(d / d_min))` over `d >= d_min`.
    Hill,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub exponent: f64,
    pub stderr: f64,
    pub d_min: usize,
    pub d_max: usize,
    pub method: TailMethod,
    /// NaN for the Hill estimator.
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub alpha_hat: f64,
    pub stderr: f64,
    pub checkpoints: usize,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Line {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `ys` on `xs`.
pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> Line {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse = (syy - slope * sxy).max(0.0);
    let slope_stderr = if xs.len() > 2 && sxx > 0.0 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Line {
        slope,
        intercept,
        slope_stderr,
        r_squared,
    }
}

/// Tail exponent of a sequence or histogram given as `(d, value)` pairs.
/// For the Hill method values are treated as multiplicities.
pub fn tail_exponent_fit(
    points: &[(usize, f64)],
    d_min: usize,
    d_max: usize,
    method: TailMethod,
) -> Result<TailFit> {
    if d_min == 0 || d_min >= d_max {
        return Err(Error::estimation(format!("invalid fit window [{d_min}, {d_max}]")));
    }
    match method {
        TailMethod::LoglogLs => {
            let window: Vec<(f64, f64)> = points
                .iter()
                .filter(|&&(d, v)| d >= d_min && d <= d_max && v > 0.0)
                .map(|&(d, v)| ((d as f64).ln(), v.ln()))
                .collect();
            if window.len() < 5 {
                return Err(Error::estimation(format!(
                    "{} nonzero entries in [{d_min}, {d_max}], need 5",
                    window.len()
                )));
            }
            let (xs, ys): (Vec<f64>, Vec<f64>) = window.into_iter().unzip();
            let line = least_squares(&xs, &ys);
            Ok(TailFit {
                exponent: -line.slope,
                stderr: line.slope_stderr,
                d_min,
                d_max,
                method,
                r_squared: line.r_squared,
            })
        }
        TailMethod::Hill => {
            let tail: Vec<(usize, f64)> =
                points.iter().copied().filter(|&(d, v)| d >= d_min && v > 0.0).collect();
            if tail.len() < 5 {
                return Err(Error::estimation(format!(
                    "{} nonzero entries at or above {d_min}, need 5",
                    tail.len()
                )));
            }
            let weight: f64 = tail.iter().map(|&(_, v)| v).sum();
            let log_sum: f64 = tail
                .iter()
                .map(|&(d, v)| v * (d as f64 / d_min as f64).ln())
                .sum();
            let tail_index = weight / log_sum;
            Ok(TailFit {
                exponent: 1.0 + tail_index,
                stderr: tail_index / weight.sqrt(),
                d_min,
                d_max: tail.last().map(|&(d, _)| d).unwrap_or(d_min),
                method,
                r_squared: f64::NAN,
            })
        }
    }
}

/// Slope of `ln |S_n|` against `ln n`.
pub fn growth_exponent_fit(checkpoints: &[(u64, f64)]) -> Result<GrowthFit> {
    if checkpoints.len() < 3 {
        return Err(Error::estimation(format!(
            "{} checkpoints, need at least 3",
            checkpoints.len()
        )));
    }
    if let Some(&(n, s)) = checkpoints.iter().find(|&&(n, s)| !(s > 0.0) || n == 0) {
        return Err(Error::estimation(format!("non-positive point (n = {n}, |S_n| = {s})")));
    }
    let xs: Vec<f64> = checkpoints.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = checkpoints.iter().map(|&(_, s)| s.ln()).collect();
    let line = least_squares(&xs, &ys);
    Ok(GrowthFit {
        alpha_hat: line.slope,
        stderr: line.slope_stderr,
        checkpoints: checkpoints.len(),
        r_squared: line.r_squared,
    })
}

/// `1/2 sum_d |p_d - q_d|` over the union of supports; tail bounds ignored.
pub fn tv_distance(p: &DegreeSequence, q: &DegreeSequence) -> f64 {
    tv_distance_upto(p, q, p.d_max().max(q.d_max()))
}

/// Total variation restricted to `d <= d_max`.
pub fn tv_distance_upto(p: &DegreeSequence, q: &DegreeSequence, d_max: usize) -> f64 {
    let lo = p.m.min(q.m);
    0.5 * (lo..=d_max).map(|d| (p.get(d) - q.get(d)).abs()).sum::<f64>()
}

/// `X*[n, d] / |S_n|` over observed degrees.
pub fn empirical_x(checkpoint: &Checkpoint) -> Result<DegreeSequence> {
    if checkpoint.s_size == 0 {
        return Err(Error::estimation(format!("empty selection at n = {}", checkpoint.n)));
    }
    Ok(normalized(&checkpoint.restricted, checkpoint.s_size as f64))
}

/// Counts divided by `total`, as a sequence starting at degree 0.
pub fn normalized(counts: &[u64], total: f64) -> DegreeSequence {
    DegreeSequence::new(0, counts.iter().map(|&c| c as f64 / total).collect(), 0.0)
}

/// Default empirical fit window: from `d_lo` to the largest degree whose
/// count is at least `min_count`.
pub fn empirical_window(counts: &[u64], d_lo: usize, min_count: u64) -> Option<(usize, usize)> {
    let hi = counts.iter().rposition(|&c| c >= min_count)?;
    (hi > d_lo).then_some((d_lo, hi))
}

pub fn histogram_points(counts: &[u64]) -> Vec<(usize, f64)> {
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(d, &c)| (d, c as f64))
        .collect()
}

pub fn sequence_points(seq: &DegreeSequence) -> Vec<(usize, f64)> {
    seq.iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq_from(f: impl Fn(f64) -> f64, lo: usize, hi: usize) -> Vec<(usize, f64)> {
        (lo..=hi).map(|d| (d, f(d as f64))).collect()
    }

    #[test]
    fn exact_power_law() {
        let pts = seq_from(|d| d.powf(-2.5), 1, 2000);
        let fit = tail_exponent_fit(&pts, 10, 1000, TailMethod::LoglogLs).unwrap();
        assert!((fit.exponent - 2.5).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        let scaled = seq_from(|d| 37.0 * d.powf(-2.5), 1, 2000);
        let fit2 = tail_exponent_fit(&scaled, 10, 1000, TailMethod::LoglogLs).unwrap();
        assert!((fit.exponent - fit2.exponent).abs() < 1e-9);
    }

    #[test]
    fn closed_form_tails() {
        let x = seq_from(|d| 1.0 / (d * (d + 1.0)), 1, 10_000);
        let fit = tail_exponent_fit(&x, 100, 10_000, TailMethod::LoglogLs).unwrap();
        assert!((fit.exponent - 2.0).abs() < 0.05, "{}", fit.exponent);
        let c = seq_from(|d| 4.0 / (d * (d + 1.0) * (d + 2.0)), 1, 10_000);
        let fit = tail_exponent_fit(&c, 100, 10_000, TailMethod::LoglogLs).unwrap();
        assert!((fit.exponent - 3.0).abs() < 0.05, "{}", fit.exponent);
    }

    #[test]
    fn hill_on_weighted_power_law() {
        // pmf ~ d^-3 far into the tail: Hill with large d_min approaches 3
        let pts = seq_from(|d| d.powi(-3), 1, 2_000_000);
        let fit = tail_exponent_fit(&pts, 1000, 2_000_000, TailMethod::Hill).unwrap();
        assert!((fit.exponent - 3.0).abs() < 0.01, "{}", fit.exponent);
        assert!(fit.r_squared.is_nan());
    }

    #[test]
    fn fit_errors() {
        let pts = seq_from(|d| d.powf(-2.0), 1, 8);
        assert!(tail_exponent_fit(&pts, 5, 8, TailMethod::LoglogLs).is_err());
        assert!(tail_exponent_fit(&pts, 0, 8, TailMethod::LoglogLs).is_err());
        assert!(tail_exponent_fit(&pts, 5, 8, TailMethod::Hill).is_err());
    }

    #[test]
    fn growth_fits() {
        let pure: Vec<(u64, f64)> = (10..=20).map(|k| (1u64 << k, ((1u64 << k) as f64).sqrt())).collect();
        let fit = growth_exponent_fit(&pure).unwrap();
        assert!((fit.alpha_hat - 0.5).abs() < 1e-9);
        let scaled: Vec<(u64, f64)> = pure.iter().map(|&(n, s)| (n, 13.0 * s)).collect();
        assert!((growth_exponent_fit(&scaled).unwrap().alpha_hat - 0.5).abs() < 1e-9);
        let logged: Vec<(u64, f64)> =
            pure.iter().map(|&(n, s)| (n, s * (n as f64).ln())).collect();
        let fit = growth_exponent_fit(&logged).unwrap();
        assert!((fit.alpha_hat - 0.5).abs() < 0.1, "{}", fit.alpha_hat);
        let flat: Vec<(u64, f64)> = pure.iter().map(|&(n, _)| (n, 4.0)).collect();
        assert_eq!(growth_exponent_fit(&flat).unwrap().alpha_hat, 0.0);
        assert!(growth_exponent_fit(&pure[..2]).is_err());
        assert!(growth_exponent_fit(&[(1, 1.0), (2, 0.0), (4, 1.0)]).is_err());
    }

    #[test]
    fn tv_examples() {
        let a = DegreeSequence::new(0, vec![0.5, 0.5], 0.0);
        assert_eq!(tv_distance(&a, &a), 0.0);
        let p = DegreeSequence::new(1, vec![1.0], 0.0);
        let q = DegreeSequence::new(3, vec![1.0], 0.0);
        assert_eq!(tv_distance(&p, &q), 1.0);
        let b = DegreeSequence::new(0, vec![1.0, 0.0], 0.0);
        assert_eq!(tv_distance(&a, &b), 0.5);
        assert_eq!(tv_distance_upto(&a, &b, 0), 0.25);
    }

    #[test]
    fn empirical_x_examples() {
        let cp = Checkpoint { n: 5, histogram: vec![0, 4, 2], restricted: vec![0, 3, 1], s_size: 4 };
        let x = empirical_x(&cp).unwrap();
        assert_eq!(x.get(1), 0.75);
        assert_eq!(x.get(2), 0.25);
        assert_eq!(x.sum(), 1.0);
        let empty = Checkpoint { restricted: vec![], s_size: 0, ..cp };
        assert!(empirical_x(&empty).is_err());
    }

    #[test]
    fn window_rule() {
        let counts = [0, 100, 60, 30, 26, 10, 25, 3];
        assert_eq!(empirical_window(&counts, 1, 25), Some((1, 6)));
        assert_eq!(empirical_window(&counts, 6, 25), None);
    }
}
