//! Building theory inputs for a model/rule pair and the theory JSON file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::json;
use super::run::{births_csv_name, read_births_csv, read_replica_csv};
use crate::error::{Error, Result};
use crate::estimators::empirical_window;
use crate::models::ModelParams;
use crate::theory::{indep_cd, poisson, port_cd, solve, DegreeSequence, LimitResult, TheoryInputs};

/// Initial-degree law of new selected vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectedLaw {
    /// Same degree as every new vertex (trees, multitrees, degree-one rule).
    Fixed,
    /// Poisson(lambda) shifted by one: the edge to the fixed vertex plus
    /// independent others (neighbours of a fixed vertex).
    ShiftedPoisson,
    /// `q = p` (all vertices selected).
    SameAsNew,
}

impl SelectedLaw {
    pub fn from_rule_name(name: &str) -> Result<Self> {
        match name {
            "level_j" | "level" | "connected_to_all" | "connected" | "degree_one" => Ok(SelectedLaw::Fixed),
            "neighbors_of" | "neighbors" => Ok(SelectedLaw::ShiftedPoisson),
            "all" => Ok(SelectedLaw::SameAsNew),
            other => Err(Error::config(format!("unknown rule {other}"))),
        }
    }
}

/// Pooled final-checkpoint statistics of a run, used in plug-in mode.
#[derive(Debug, Clone)]
pub struct Empirical {
    /// `sum_r X_r[n_r, d]` over replicas.
    pub counts: Vec<u64>,
    /// `sum_r sum_i I_r[i, d]`, when the births file is present.
    pub born: Option<Vec<u64>>,
    /// `sum_r n_r`.
    pub steps: u64,
}

impl Empirical {
    /// Reads every replica found in `csv` (final checkpoint of each) and the
    /// matching births file next to it.
    pub fn from_replica_csv(csv: &Path) -> Result<Self> {
        let rows = read_replica_csv(csv)?;
        let mut finals: Vec<(usize, &crate::graph::Checkpoint)> = Vec::new();
        for (r, cp, _) in &rows {
            match finals.iter_mut().find(|(i, _)| i == r) {
                Some(slot) if slot.1.n < cp.n => slot.1 = cp,
                Some(_) => {}
                None => finals.push((*r, cp)),
            }
        }
        if finals.is_empty() {
            return Err(Error::config(format!("{}: no checkpoints", csv.display())));
        }
        let mut counts = Vec::new();
        let mut steps = 0;
        for (_, cp) in &finals {
            add_into(&mut counts, &cp.histogram);
            steps += cp.n;
        }
        let dir = csv.parent().unwrap_or(Path::new("."));
        let mut born: Option<Vec<u64>> = Some(Vec::new());
        for (r, cp) in &finals {
            let path = dir.join(births_csv_name(*r));
            let record = path
                .exists()
                .then(|| read_births_csv(&path))
                .transpose()?
                .and_then(|b| b.into_iter().find(|b| b.n == cp.n));
            match (record, born.as_mut()) {
                (Some(rec), Some(acc)) => add_into(acc, &rec.all),
                _ => born = None,
            }
        }
        Ok(Empirical { counts, born, steps })
    }
}

pub(crate) fn add_into(acc: &mut Vec<u64>, h: &[u64]) {
    if acc.len() < h.len() {
        acc.resize(h.len(), 0);
    }
    for (a, &b) in acc.iter_mut().zip(h) {
        *a += b;
    }
}

/// Counts divided by the number of steps, restricted to `[m, d_max]`, with
/// the observed mass beyond `d_max` as tail.
fn per_step(counts: &[u64], steps: u64, m: usize, d_max: usize) -> DegreeSequence {
    let s = steps as f64;
    let values = (m..=d_max).map(|d| counts.get(d).copied().unwrap_or(0) as f64 / s).collect();
    let tail = counts.iter().skip(d_max + 1).sum::<u64>() as f64 / s;
    DegreeSequence::new(m, values, tail)
}

/// Theory inputs for a model, the law of new selected vertices and `alpha`.
/// Returns the inputs and the tail exponent `gamma` of `c` when known.
///
/// The independent-edges variants use `m = 1` unless every vertex is
/// selected: degree-0 vertices never gain edges, so `p_0 = c_0`, which makes
/// `k_0 = 0` while leaving `k_d` for `d >= 1` unchanged.
pub fn theory_inputs(
    model: &ModelParams,
    law: SelectedLaw,
    alpha: f64,
    d_max: usize,
    empirical: Option<&Empirical>,
) -> Result<(TheoryInputs, Option<f64>)> {
    model.validate()?;
    let (m, c, p, gamma) = match *model {
        ModelParams::Port { beta } => {
            let (c, p) = port_cd(beta, d_max)?;
            (1, c, p, Some(3.0 + beta))
        }
        ModelParams::Indep { lambda } => {
            let (c, p) = indep_cd(lambda, d_max)?;
            let m = if law == SelectedLaw::SameAsNew { 0 } else { 1 };
            (m, c.restrict(m, d_max), p.restrict(m, d_max), Some(3.0))
        }
        ModelParams::Multitree { m } => {
            let emp = empirical.ok_or_else(|| {
                Error::config("multitree has no closed-form c_d; pass --empirical-c")
            })?;
            let d_hi = plug_in_limit(&emp.counts, m, d_max)?;
            let c = per_step(&emp.counts, emp.steps, m, d_hi);
            (m, c, DegreeSequence::point_mass(m, m, d_hi), Some(2.0 + 1.0 / (m as f64 - 1.0)))
        }
        ModelParams::DegreeOneFrozen { .. } => {
            let emp = empirical.ok_or_else(|| {
                Error::config("the frozen model has no closed-form c_d; pass --empirical-c")
            })?;
            let born = emp.born.as_ref().ok_or_else(|| {
                Error::config("the frozen model needs the births file next to --empirical-c")
            })?;
            let m = if law == SelectedLaw::SameAsNew { 0 } else { 1 };
            let d_hi = plug_in_limit(&emp.counts, m, d_max)?;
            let c = per_step(&emp.counts, emp.steps, m, d_hi);
            let p = per_step(born, emp.steps, m, d_hi);
            (m, c, p, None)
        }
    };
    let d_max = c.d_max();
    let q = match law {
        SelectedLaw::Fixed => {
            let at = match *model {
                ModelParams::Multitree { m } => m,
                _ => 1,
            };
            DegreeSequence::point_mass(at, m, d_max)
        }
        SelectedLaw::ShiftedPoisson => match *model {
            ModelParams::Indep { lambda } | ModelParams::DegreeOneFrozen { lambda } => {
                poisson(lambda, 1, d_max).restrict(m, d_max)
            }
            _ => return Err(Error::config("shifted Poisson law needs an independent-edges model")),
        },
        SelectedLaw::SameAsNew => {
            let total = p.total();
            DegreeSequence::new(
                p.m,
                p.values.iter().map(|v| v / total).collect(),
                p.tail_bound / total,
            )
        }
    };
    Ok((TheoryInputs { m, d_max, alpha, c, p, q }, gamma))
}

/// Largest `D <= d_max` such that the pooled counts on `[m, D]` are all
/// positive and `D` is within the default empirical window.
fn plug_in_limit(counts: &[u64], m: usize, d_max: usize) -> Result<usize> {
    let window_hi = empirical_window(counts, m, 25).map(|(_, hi)| hi).unwrap_or(m);
    let mut hi = m;
    while hi < window_hi.min(d_max) && counts.get(hi + 1).copied().unwrap_or(0) > 0 {
        hi += 1;
    }
    if counts.get(m).copied().unwrap_or(0) == 0 {
        return Err(Error::config(format!("no vertices of degree m = {m} in the run")));
    }
    Ok(hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailBounds {
    pub c: f64,
    pub p: f64,
    pub q: f64,
    pub x: Option<f64>,
}

/// Theory results as persisted. Arrays are indexed from `d = m`; `z` runs to
/// `D + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryFile {
    pub schema_version: u32,
    pub model: String,
    pub rule: String,
    pub m: usize,
    pub alpha: f64,
    pub gamma: Option<f64>,
    pub gamma_star: Option<f64>,
    #[serde(rename = "D")]
    pub d_max: usize,
    pub c: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub k: Vec<f64>,
    pub x: Option<Vec<f64>>,
    pub z: Option<Vec<f64>>,
    pub condition6_ok: bool,
    pub first_violation: Option<usize>,
    pub tail_bounds: TailBounds,
}

impl TheoryFile {
    pub fn from_result(model: &str, rule: &str, res: &LimitResult) -> Self {
        let i = &res.inputs;
        TheoryFile {
            schema_version: super::config::SCHEMA_VERSION,
            model: model.to_string(),
            rule: rule.to_string(),
            m: i.m,
            alpha: i.alpha,
            gamma: res.gamma,
            gamma_star: res.gamma_star,
            d_max: i.d_max,
            c: i.c.values.clone(),
            p: i.p.values.clone(),
            q: i.q.values.clone(),
            k: res.k.values.clone(),
            x: res.solution.as_ref().map(|s| s.x.values.clone()),
            z: res.solution.as_ref().map(|s| s.z.clone()),
            condition6_ok: res.k.condition6_ok,
            first_violation: res.k.first_violation,
            tail_bounds: TailBounds {
                c: i.c.tail_bound,
                p: i.p.tail_bound,
                q: i.q.tail_bound,
                x: res.solution.as_ref().map(|s| s.x.tail_bound),
            },
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        json::read(path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        json::write(path, self)
    }

    fn seq(&self, values: &[f64], tail: f64) -> DegreeSequence {
        DegreeSequence::new(self.m, values.to_vec(), tail)
    }

    pub fn c_seq(&self) -> DegreeSequence {
        self.seq(&self.c, self.tail_bounds.c)
    }

    pub fn p_seq(&self) -> DegreeSequence {
        self.seq(&self.p, self.tail_bounds.p)
    }

    pub fn q_seq(&self) -> DegreeSequence {
        self.seq(&self.q, self.tail_bounds.q)
    }

    pub fn x_seq(&self) -> Option<DegreeSequence> {
        let x = self.x.as_ref()?;
        Some(self.seq(x, self.tail_bounds.x.unwrap_or(0.0)))
    }
}

/// Builds and solves the theory for a model/rule pair.
pub fn build_theory(
    model: &ModelParams,
    rule_name: &str,
    alpha: f64,
    d_max: usize,
    empirical: Option<&Empirical>,
) -> Result<TheoryFile> {
    let law = SelectedLaw::from_rule_name(rule_name)?;
    let (inputs, gamma) = theory_inputs(model, law, alpha, d_max, empirical)?;
    let res = solve(inputs, gamma)?;
    Ok(TheoryFile::from_result(model.name(), rule_name, &res))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn port_theory_file() {
        let tf = build_theory(&ModelParams::Port { beta: 0.0 }, "level_j", 0.5, 200, None).unwrap();
        assert_eq!(tf.m, 1);
        assert_eq!(tf.gamma, Some(3.0));
        assert_eq!(tf.gamma_star, Some(2.0));
        assert!(tf.condition6_ok);
        let x = tf.x.as_ref().unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15);
        assert_eq!(tf.z.as_ref().unwrap().len(), 201);
        let sum: f64 = x.iter().sum::<f64>() + tf.tail_bounds.x.unwrap();
        assert!((sum - 1.0).abs() < 1e-12);
        let text = json::to_string(&tf);
        let back: TheoryFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, tf);
    }

    #[test]
    fn indep_neighbors_theory() {
        let tf = build_theory(&ModelParams::Indep { lambda: 1.0 }, "neighbors_of", 0.5, 2000, None).unwrap();
        assert_eq!(tf.m, 1);
        assert!(tf.condition6_ok);
        assert_eq!(tf.gamma_star, Some(2.0));
        // q_1 = P(no other neighbour) = e^-1
        assert!((tf.q[0] - (-1.0f64).exp()).abs() < 1e-15);
        // with every vertex selected the degree-0 class makes k_0 = 0
        let all = build_theory(&ModelParams::Indep { lambda: 1.0 }, "all", 1.0, 200, None).unwrap();
        assert_eq!(all.m, 0);
        assert!(!all.condition6_ok);
        assert_eq!(all.first_violation, Some(0));
    }

    #[test]
    fn plug_in_models_need_data() {
        assert!(build_theory(&ModelParams::Multitree { m: 3 }, "level_j", 2.0 / 3.0, 100, None).is_err());
        assert!(build_theory(&ModelParams::DegreeOneFrozen { lambda: 1.0 }, "degree_one", 1.0, 100, None).is_err());
        assert!(SelectedLaw::from_rule_name("bogus").is_err());
    }

    #[test]
    fn plug_in_limit_stops_at_gaps() {
        let counts = [0, 0, 0, 500, 200, 100, 50, 30, 0, 26, 3];
        assert_eq!(plug_in_limit(&counts, 3, 100).unwrap(), 7);
        assert_eq!(plug_in_limit(&counts, 3, 5).unwrap(), 5);
    }
}
