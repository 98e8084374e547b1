//! Empirical restricted distribution against the theoretical limit.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::conditions::{check_conditions, growth_fit, tail_fit, Diagnostics, Pooled, WINDOW_MIN_COUNT};
use super::json;
use super::run::RunData;
use super::theory_file::{SelectedLaw, TheoryFile};
use crate::error::{Error, Result};
use crate::estimators::{
    empirical_window, histogram_points, tail_exponent_fit, tv_distance_upto, GrowthFit, TailFit,
    TailMethod,
};
use crate::theory::DegreeSequence;

/// Degree bound of the short-range total variation.
pub const TV_SHORT: usize = 20;
/// Lower end of the Hill fit on the restricted histogram.
pub const HILL_D_MIN: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeRow {
    pub d: usize,
    /// Mean of `X*[n, d] / |S_n|` over replicas.
    pub mean: f64,
    /// Standard error of that mean.
    pub stderr: f64,
    /// `sum X*[n, d] / sum |S_n|`.
    pub pooled: f64,
    pub theory: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClampCount {
    pub replica: usize,
    pub clamp_events: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub model: String,
    pub rule: String,
    pub replicas: usize,
    pub n: u64,
    pub m: usize,
    pub table: Vec<DegreeRow>,
    /// Total variation between pooled `x_hat` and `x` over all degrees.
    pub tv: Option<f64>,
    /// The same restricted to `d <= 20`.
    pub tv_short: Option<f64>,
    /// Tail exponent of the pooled degree counts.
    pub gamma_hat: Option<TailFit>,
    pub gamma: Option<f64>,
    /// Log-log and Hill fits of the pooled restricted counts.
    pub gamma_star_hat: Option<TailFit>,
    pub gamma_star_hill: Option<TailFit>,
    pub gamma_star: Option<f64>,
    pub alpha_hat: Option<GrowthFit>,
    pub alpha_theory: f64,
    pub conditions: Diagnostics,
    pub clamp_events: Vec<ClampCount>,
}

fn check_match(run: &RunData, theory: &TheoryFile, pooled: &Pooled) -> Result<()> {
    let cfg = &run.manifest.config;
    if cfg.model.name() != theory.model {
        return Err(Error::config(format!(
            "run model {} does not match theory model {}",
            cfg.model.name(),
            theory.model
        )));
    }
    let run_law = SelectedLaw::from_rule_name(cfg.rule.name())?;
    if SelectedLaw::from_rule_name(&theory.rule)? != run_law {
        return Err(Error::config(format!(
            "run rule {} does not match theory rule {}",
            cfg.rule.name(),
            theory.rule
        )));
    }
    if let Some(d) = pooled.born_selected.iter().position(|&c| c > 0) {
        if d < theory.m {
            return Err(Error::config(format!(
                "selected vertices born with degree {d} below the theory's m = {}",
                theory.m
            )));
        }
    }
    Ok(())
}

pub fn compare_report(run: &RunData, theory: &TheoryFile) -> Result<Report> {
    let pooled = Pooled::final_of(run);
    check_match(run, theory, &pooled)?;
    let m = theory.m;
    let x = theory.x_seq();

    let per_replica: Vec<DegreeSequence> = run
        .replicas
        .iter()
        .map(|r| r.final_checkpoint())
        .filter(|cp| cp.s_size > 0)
        .map(|cp| crate::estimators::normalized(&cp.restricted, cp.s_size as f64))
        .collect();
    let x_hat = pooled.x_hat();
    let top = x_hat.d_max().max(m);
    let table_max = match &x {
        Some(x) => top.min(x.d_max()),
        None => top,
    };
    let table = (m..=table_max)
        .map(|d| {
            let vals: Vec<f64> = per_replica.iter().map(|s| s.get(d)).collect();
            let k = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / k;
            let var = if vals.len() > 1 {
                vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0)
            } else {
                f64::NAN
            };
            let theory_d = x.as_ref().map(|x| x.get(d)).unwrap_or(f64::NAN);
            DegreeRow {
                d,
                mean,
                stderr: (var / k).sqrt(),
                pooled: x_hat.get(d),
                theory: theory_d,
                abs_error: (x_hat.get(d) - theory_d).abs(),
            }
        })
        .filter(|row| row.pooled > 0.0 || row.theory > 0.0)
        .collect();

    let (tv, tv_short) = match &x {
        Some(x) if pooled.s_size > 0 => {
            let hi = x.d_max().max(x_hat.d_max());
            (
                Some(tv_distance_upto(&x_hat, x, hi)),
                Some(tv_distance_upto(&x_hat, x, TV_SHORT)),
            )
        }
        _ => (None, None),
    };

    let gamma_star_hill = empirical_window(&pooled.restricted, HILL_D_MIN, WINDOW_MIN_COUNT)
        .and_then(|_| {
            tail_exponent_fit(
                &histogram_points(&pooled.restricted),
                HILL_D_MIN,
                HILL_D_MIN + 1,
                TailMethod::Hill,
            )
            .ok()
        });

    Ok(Report {
        model: theory.model.clone(),
        rule: run.manifest.config.rule.name().to_string(),
        replicas: run.replicas.len(),
        n: run.replicas.first().map(|r| r.final_checkpoint().n).unwrap_or(0),
        m,
        table,
        tv,
        tv_short,
        gamma_hat: tail_fit(&pooled.counts, m.max(1)),
        gamma: theory.gamma,
        gamma_star_hat: tail_fit(&pooled.restricted, m.max(1)),
        gamma_star_hill,
        gamma_star: theory.gamma_star,
        alpha_hat: growth_fit(run),
        alpha_theory: theory.alpha,
        conditions: check_conditions(run, theory),
        clamp_events: run
            .manifest
            .replicas
            .iter()
            .map(|r| ClampCount { replica: r.index, clamp_events: r.clamp_events })
            .collect(),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into())
}

fn fit(f: &Option<TailFit>) -> String {
    match f {
        Some(f) => format!("{:.4} +/- {:.4} on [{}, {}]", f.exponent, f.stderr, f.d_min, f.d_max),
        None => "-".into(),
    }
}

impl Report {
    /// Human-readable summary, at most `rows` table rows.
    pub fn to_text(&self, rows: usize) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "model {}  rule {}  replicas {}  n {}", self.model, self.rule, self.replicas, self.n);
        let _ = writeln!(s, "{:>8} {:>12} {:>12} {:>12} {:>12} {:>12}", "d", "mean", "stderr", "pooled", "theory", "abs_err");
        for r in self.table.iter().take(rows) {
            let _ = writeln!(
                s,
                "{:>8} {:>12.6e} {:>12.3e} {:>12.6e} {:>12.6e} {:>12.3e}",
                r.d, r.mean, r.stderr, r.pooled, r.theory, r.abs_error
            );
        }
        if self.table.len() > rows {
            let _ = writeln!(s, "... {} more rows", self.table.len() - rows);
        }
        let _ = writeln!(s, "tv {}  tv(d<={TV_SHORT}) {}", opt(self.tv), opt(self.tv_short));
        let _ = writeln!(s, "gamma_hat {}  gamma {}", fit(&self.gamma_hat), opt(self.gamma));
        let _ = writeln!(
            s,
            "gamma*_hat {}  hill {}  gamma* {}",
            fit(&self.gamma_star_hat),
            fit(&self.gamma_star_hill),
            opt(self.gamma_star)
        );
        let _ = writeln!(
            s,
            "alpha_hat {}  alpha {:.6}",
            opt(self.alpha_hat.as_ref().map(|g| g.alpha_hat)),
            self.alpha_theory
        );
        let c6 = &self.conditions.c6;
        let _ = writeln!(
            s,
            "positivity of k: theory {} empirical {} ({})",
            c6.theory_ok, c6.empirical_ok, self.conditions.label
        );
        let clamps: u64 = self.clamp_events.iter().map(|c| c.clamp_events).sum();
        let _ = writeln!(s, "clamp events {clamps}");
        s
    }

    /// Writes the JSON report to `path` and the text table next to it.
    pub fn write(&self, path: &Path) -> Result<()> {
        json::write(path, self)?;
        let txt = path.with_extension("txt");
        std::fs::write(&txt, self.to_text(60)).map_err(|e| Error::io(&txt, e))
    }
}
