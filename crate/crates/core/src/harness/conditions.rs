//! Finite-n empirical proxies for the modelling assumptions. These are
//! diagnostics: a passing check says the run looks consistent, nothing more.

use serde::{Deserialize, Serialize};

use super::run::RunData;
use super::theory_file::{add_into, TheoryFile};
use crate::estimators::{
    empirical_window, growth_exponent_fit, histogram_points, least_squares, tail_exponent_fit,
    tv_distance_upto, GrowthFit, TailFit, TailMethod,
};
use crate::theory::DegreeSequence;

pub const LABEL: &str = "diagnostic, not proof";

/// Smallest checkpoint used by growth fits.
pub const GROWTH_MIN_N: u64 = 1024;
/// Minimum pooled count for a degree to enter a fit window.
pub const WINDOW_MIN_COUNT: u64 = 25;
/// Lower end of the tail fit windows.
pub const WINDOW_D_LO: usize = 5;

/// Final-checkpoint counts summed over replicas.
#[derive(Debug, Clone, Default)]
pub struct Pooled {
    pub steps: u64,
    pub counts: Vec<u64>,
    pub restricted: Vec<u64>,
    pub s_size: u64,
    pub born_all: Vec<u64>,
    pub born_selected: Vec<u64>,
    pub overflow: (u64, u64),
}

impl Pooled {
    pub fn final_of(run: &RunData) -> Self {
        let mut p = Pooled::default();
        for r in &run.replicas {
            let cp = r.final_checkpoint();
            p.steps += cp.n;
            p.s_size += cp.s_size;
            add_into(&mut p.counts, &cp.histogram);
            add_into(&mut p.restricted, &cp.restricted);
            let over = r.overflow.last().copied().unwrap_or((0, 0));
            p.overflow.0 += over.0;
            p.overflow.1 += over.1;
            if let Some(b) = r.births.iter().find(|b| b.n == cp.n) {
                add_into(&mut p.born_all, &b.all);
                add_into(&mut p.born_selected, &b.selected);
            }
        }
        p
    }

    /// `X[n, d] / n` from degree 0.
    pub fn c_hat(&self) -> DegreeSequence {
        per(&self.counts, self.steps as f64, self.overflow.0)
    }

    /// `X*[n, d] / |S_n|` from degree 0.
    pub fn x_hat(&self) -> DegreeSequence {
        per(&self.restricted, self.s_size as f64, self.overflow.1)
    }

    /// Degree-at-birth frequencies from degree 0.
    pub fn p_hat(&self) -> DegreeSequence {
        per(&self.born_all, self.steps as f64, 0)
    }

    /// Degree-at-birth frequencies of new selected vertices.
    pub fn q_hat(&self) -> Option<DegreeSequence> {
        let total: u64 = self.born_selected.iter().sum();
        (total > 0).then(|| per(&self.born_selected, total as f64, 0))
    }
}

fn per(counts: &[u64], total: f64, overflow: u64) -> DegreeSequence {
    DegreeSequence::new(
        0,
        counts.iter().map(|&c| c as f64 / total).collect(),
        overflow as f64 / total,
    )
}

/// Mean `|S_n|` across replicas at every checkpoint with `n >= min_n`.
pub fn mean_growth(run: &RunData, min_n: u64) -> Vec<(u64, f64)> {
    let Some(first) = run.replicas.first() else { return Vec::new() };
    first
        .checkpoints
        .iter()
        .map(|cp| cp.n)
        .filter(|&n| n >= min_n)
        .filter_map(|n| {
            let sizes: Vec<f64> = run
                .replicas
                .iter()
                .filter_map(|r| r.checkpoints.iter().find(|c| c.n == n))
                .map(|c| c.s_size as f64)
                .collect();
            (sizes.len() == run.replicas.len()).then(|| (n, sizes.iter().sum::<f64>() / sizes.len() as f64))
        })
        .collect()
}

/// Growth fit over checkpoints `n >= GROWTH_MIN_N`, falling back to every
/// checkpoint with a nonempty selection for short runs.
pub fn growth_fit(run: &RunData) -> Option<GrowthFit> {
    let mut points = mean_growth(run, GROWTH_MIN_N);
    if points.len() < 3 {
        points = mean_growth(run, 1);
    }
    points.retain(|&(_, s)| s > 0.0);
    growth_exponent_fit(&points).ok()
}

/// Log-log least squares fit over `[WINDOW_D_LO, max d with count >= 25]`.
pub fn tail_fit(counts: &[u64], d_lo: usize) -> Option<TailFit> {
    let (lo, hi) = empirical_window(counts, d_lo.max(WINDOW_D_LO), WINDOW_MIN_COUNT)?;
    tail_exponent_fit(&histogram_points(counts), lo, hi, TailMethod::LoglogLs).ok()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub n: u64,
    pub n_half: u64,
    pub max_abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDegrees {
    /// Pooled frequencies from degree 0.
    pub frequencies: Vec<f64>,
    /// Total variation against the theory's `p` over `d >= m`.
    pub tv_vs_theory: f64,
    /// Ratio `p_{d+1} / p_d` of a geometric fit past the mode, if enough
    /// degrees are observed.
    pub geometric_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Positivity {
    /// Verdict of the theory file.
    pub theory_ok: bool,
    pub theory_first_violation: Option<usize>,
    /// Sign check of `n * k_d` computed from pooled counts, an exact integer,
    /// over `d` from `m` to the top of the fit window.
    pub empirical_ok: bool,
    pub empirical_first_violation: Option<usize>,
    pub empirical_checked_up_to: usize,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedDegrees {
    pub frequencies: Vec<f64>,
    pub tv_vs_theory: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub label: String,
    /// Largest change of `X[n, d] / n` for `d <= 20` between the final
    /// checkpoint and the one nearest `n / 2`.
    pub c1: Option<Convergence>,
    /// Log-log fit of the pooled degree counts.
    pub c2: Option<TailFit>,
    pub c4: Option<InitialDegrees>,
    pub c6: Positivity,
    pub c9: Option<GrowthFit>,
    pub c10: Option<SelectedDegrees>,
}

fn convergence(run: &RunData) -> Option<Convergence> {
    let first = run.replicas.first()?;
    if first.checkpoints.len() < 2 {
        return None;
    }
    let n = first.final_checkpoint().n;
    let n_half = first.checkpoints[..first.checkpoints.len() - 1]
        .iter()
        .map(|c| c.n)
        .min_by_key(|&m| m.abs_diff(n / 2))?;
    let (mut at_n, mut at_half) = (Vec::new(), Vec::new());
    let (mut steps_n, mut steps_half) = (0u64, 0u64);
    for r in &run.replicas {
        let a = r.checkpoints.iter().find(|c| c.n == n)?;
        let b = r.checkpoints.iter().find(|c| c.n == n_half)?;
        add_into(&mut at_n, &a.histogram);
        add_into(&mut at_half, &b.histogram);
        steps_n += a.n;
        steps_half += b.n;
    }
    let get = |h: &[u64], d: usize| h.get(d).copied().unwrap_or(0) as f64;
    let max_abs_diff = (0..=20)
        .map(|d| (get(&at_n, d) / steps_n as f64 - get(&at_half, d) / steps_half as f64).abs())
        .fold(0.0, f64::max);
    Some(Convergence { n, n_half, max_abs_diff })
}

fn geometric_ratio(freq: &DegreeSequence) -> Option<f64> {
    let mode = freq.iter().max_by(|a, b| a.1.total_cmp(&b.1))?.0;
    let (xs, ys): (Vec<f64>, Vec<f64>) = freq
        .iter()
        .filter(|&(d, v)| d >= mode && v > 0.0)
        .map(|(d, v)| (d as f64, v.ln()))
        .unzip();
    (xs.len() >= 3).then(|| least_squares(&xs, &ys).slope.exp())
}

fn positivity(pooled: &Pooled, theory: &TheoryFile) -> Positivity {
    let m = theory.m;
    let hi = empirical_window(&pooled.counts, m, WINDOW_MIN_COUNT)
        .map(|(_, hi)| hi)
        .unwrap_or(m);
    let get = |h: &[u64], d: usize| h.get(d).copied().unwrap_or(0) as i128;
    let mut running: i128 = 0;
    let mut violation = None;
    for d in m..=hi {
        running += get(&pooled.born_all, d) - get(&pooled.counts, d);
        if running <= 0 {
            violation = Some(d);
            break;
        }
    }
    Positivity {
        theory_ok: theory.condition6_ok,
        theory_first_violation: theory.first_violation,
        empirical_ok: violation.is_none(),
        empirical_first_violation: violation,
        empirical_checked_up_to: hi,
        ok: theory.condition6_ok && violation.is_none(),
    }
}

pub fn check_conditions(run: &RunData, theory: &TheoryFile) -> Diagnostics {
    let pooled = Pooled::final_of(run);
    let m = theory.m;
    let born_total: u64 = pooled.born_all.iter().sum();
    let c4 = (born_total > 0).then(|| {
        let p_hat = pooled.p_hat();
        let p = theory.p_seq();
        InitialDegrees {
            tv_vs_theory: tv_distance_upto(&p_hat.restrict(m, p_hat.d_max()), &p, p.d_max().max(p_hat.d_max())),
            geometric_ratio: geometric_ratio(&p_hat),
            frequencies: p_hat.values,
        }
    });
    let c10 = pooled.q_hat().map(|q_hat| {
        let q = theory.q_seq();
        SelectedDegrees {
            tv_vs_theory: tv_distance_upto(&q_hat, &q, q.d_max().max(q_hat.d_max())),
            frequencies: q_hat.values,
        }
    });
    Diagnostics {
        label: LABEL.to_string(),
        c1: convergence(run),
        c2: tail_fit(&pooled.counts, m.max(1)),
        c4,
        c6: positivity(&pooled, theory),
        c9: growth_fit(run),
        c10,
    }
}
