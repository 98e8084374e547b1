//! Limiting quantities of the restricted degree distribution.
//!
//! Given the asymptotic degree distribution `c`, the initial-degree
//! distribution `p` of new vertices, the initial-degree distribution `q` of
//! new selected vertices and the growth exponent `alpha` of `|S_n|`, this
//! module computes
//!
//! * `k_d = sum_{j=m}^{d} (p_j - c_j)`, which must be positive,
//! * `t_d = k_d / c_d` and `a_d = prod_{i=m}^{d-1} (t_i + alpha) / t_i`,
//! * the limit `x_d` of `X*[n, d] / |S_n|`, both by its recursion and in
//!   closed form `x_d = sum_{i<=d} alpha q_i a_i / (a_d (t_d + alpha))`,
//! * the limit `z_d` of the selected fraction with degree at least `d`,
//! * the exponent `gamma* = alpha (gamma - 1) + 1`.
//!
//! Sequences are truncated at a maximal degree `D` and carry the mass beyond
//! `D` as an explicit tail bound. `k_d` is evaluated from suffix sums (small
//! terms first) so it stays accurate when it is many orders of magnitude below
//! the prefix sums it is defined by.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values over `d in [m, m + values.len())` plus the mass beyond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeSequence {
    pub m: usize,
    pub values: Vec<f64>,
    pub tail_bound: f64,
}

impl DegreeSequence {
    pub fn new(m: usize, values: Vec<f64>, tail_bound: f64) -> Self {
        DegreeSequence {
            m,
            values,
            tail_bound,
        }
    }

    /// `1` at `at`, zero elsewhere on `[m, d_max]`.
    pub fn point_mass(at: usize, m: usize, d_max: usize) -> Self {
        let values = (m..=d_max).map(|d| if d == at { 1.0 } else { 0.0 }).collect();
        DegreeSequence::new(m, values, if at > d_max { 1.0 } else { 0.0 })
    }

    #[inline]
    pub fn get(&self, d: usize) -> f64 {
        if d < self.m {
            return 0.0;
        }
        self.values.get(d - self.m).copied().unwrap_or(0.0)
    }

    /// Largest degree carried explicitly.
    pub fn d_max(&self) -> usize {
        (self.m + self.values.len()).saturating_sub(1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.m + i, v))
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Explicit mass plus tail bound.
    pub fn total(&self) -> f64 {
        self.sum() + self.tail_bound
    }

    /// Restriction to `[m, d_max]`; mass beyond `d_max` moves into the tail,
    /// mass below `m` is dropped.
    pub fn restrict(&self, m: usize, d_max: usize) -> Self {
        let values: Vec<f64> = (m..=d_max).map(|d| self.get(d)).collect();
        let beyond: f64 = self.iter().filter(|&(d, _)| d > d_max).map(|(_, v)| v).sum();
        DegreeSequence::new(m, values, beyond + self.tail_bound)
    }
}

fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Poisson(`lambda`) probabilities shifted right by `shift`, on `[shift, d_max]`.
pub fn poisson(lambda: f64, shift: usize, d_max: usize) -> DegreeSequence {
    let ln_l = lambda.ln();
    let pk = |k: usize| (k as f64 * ln_l - lambda - ln_gamma(k as f64 + 1.0)).exp();
    let values: Vec<f64> = (shift..=d_max).map(|d| pk(d - shift)).collect();
    // geometric bound: p_{k+1} / p_k = lambda / (k + 1) is decreasing
    let next = d_max + 1 - shift;
    let ratio = lambda / (next as f64 + 1.0);
    let tail = if ratio < 1.0 {
        pk(next) / (1.0 - ratio)
    } else {
        1.0 - values.iter().sum::<f64>()
    };
    DegreeSequence::new(shift, values, tail)
}

/// Asymptotic degree distribution of the plane-oriented recursive tree,
/// `c_d = (2+b) G(d+b) G(3+2b) / (G(1+b) G(d+3+2b))`, and its initial-degree
/// distribution (point mass at 1). Returns `(c, p)` on `[1, d_max]`.
pub fn port_cd(beta: f64, d_max: usize) -> Result<(DegreeSequence, DegreeSequence)> {
    if !(beta > -1.0) || !beta.is_finite() {
        return Err(Error::config(format!("PORT requires beta > -1, got {beta}")));
    }
    if d_max < 1 {
        return Err(Error::config("d_max must be at least 1"));
    }
    let ln_front = (2.0 + beta).ln() + ln_gamma(3.0 + 2.0 * beta) - ln_gamma(1.0 + beta);
    let values: Vec<f64> = (1..=d_max)
        .map(|d| {
            let d = d as f64;
            (ln_front + ln_gamma(d + beta) - ln_gamma(d + 3.0 + 2.0 * beta)).exp()
        })
        .collect();
    // sum_{j >= d} G(j+b)/G(j+3+2b) = G(d+b) / ((2+b) G(d+2+2b))
    let d = (d_max + 1) as f64;
    let tail = (ln_gamma(3.0 + 2.0 * beta) - ln_gamma(1.0 + beta) + ln_gamma(d + beta)
        - ln_gamma(d + 2.0 + 2.0 * beta))
    .exp();
    Ok((
        DegreeSequence::new(1, values, tail),
        DegreeSequence::point_mass(1, 1, d_max),
    ))
}

/// Asymptotic degree distribution of the independent-edges model with
/// Poisson(`lambda`) initial degrees: `c_0 = p_0`,
/// `c_d = 2 / (d (d+1) (d+2)) sum_{k=1}^{d} k (k+1) p_k`. Returns `(c, p)` on
/// `[0, d_max]`.
pub fn indep_cd(lambda: f64, d_max: usize) -> Result<(DegreeSequence, DegreeSequence)> {
    if !(lambda > 0.0 && lambda < 2.0) {
        return Err(Error::config(format!("independent edges require 0 < lambda < 2, got {lambda}")));
    }
    if d_max < 1 {
        return Err(Error::config("d_max must be at least 1"));
    }
    let p = poisson(lambda, 0, d_max);
    let mut values = Vec::with_capacity(d_max + 1);
    values.push(p.get(0));
    let mut acc = 0.0;
    for d in 1..=d_max {
        let df = d as f64;
        acc += df * (df + 1.0) * p.get(d);
        values.push(2.0 * acc / (df * (df + 1.0) * (df + 2.0)));
    }
    // sum_{d > D} 2 S / (d (d+1) (d+2)) = S / ((D+1)(D+2)), S = E[K (K+1)]
    let s_inf = lambda * lambda + 2.0 * lambda;
    let tail = s_inf / ((d_max as f64 + 1.0) * (d_max as f64 + 2.0));
    Ok((DegreeSequence::new(0, values, tail), p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSequence {
    pub m: usize,
    pub values: Vec<f64>,
    pub condition6_ok: bool,
    pub first_violation: Option<usize>,
}

impl KSequence {
    pub fn get(&self, d: usize) -> f64 {
        self.values[d - self.m]
    }
}

/// Suffix sums `S_{>d} = tail + sum_{j=d+1}^{D} v_j` for `d in [m, D]`.
fn suffix_beyond(seq: &DegreeSequence, m: usize, d_max: usize) -> (Vec<f64>, f64) {
    let len = d_max + 1 - m;
    let mut out = vec![0.0; len];
    let beyond_d_max: f64 =
        seq.tail_bound + seq.iter().filter(|&(d, _)| d > d_max).map(|(_, v)| v).sum::<f64>();
    let mut acc = beyond_d_max;
    for i in (0..len).rev() {
        out[i] = acc;
        acc += seq.get(m + i);
    }
    (out, acc)
}

/// `k_d = sum_{j=m}^{d} (p_j - c_j)` for `d in [m, d_max]`, with the positivity
/// verdict. Violations are reported, not raised.
pub fn k_sequence(c: &DegreeSequence, p: &DegreeSequence, m: usize, d_max: usize) -> KSequence {
    assert!(d_max >= m, "empty degree range");
    let (c_beyond, c_total) = suffix_beyond(c, m, d_max);
    let (p_beyond, p_total) = suffix_beyond(p, m, d_max);
    let offset = p_total - c_total;
    let values: Vec<f64> = c_beyond
        .iter()
        .zip(&p_beyond)
        .map(|(cb, pb)| offset + (cb - pb))
        .collect();
    let first_violation = values.iter().position(|&k| !(k > 0.0)).map(|i| m + i);
    KSequence {
        m,
        values,
        condition6_ok: first_violation.is_none(),
        first_violation,
    }
}

/// For each `d in [m, d_max]`, whether `sum_{j=m}^{d} p_j >= sum_{j=m}^{d} c_j`.
pub fn dominance_check(c: &DegreeSequence, p: &DegreeSequence, m: usize, d_max: usize) -> Vec<bool> {
    let mut pc = 0.0;
    let mut cc = 0.0;
    (m..=d_max)
        .map(|d| {
            pc += p.get(d);
            cc += c.get(d);
            pc >= cc
        })
        .collect()
}

/// `gamma* = alpha (gamma - 1) + 1`.
pub fn gamma_star(alpha: f64, gamma: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::config(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if !(gamma > 1.0) || !gamma.is_finite() {
        return Err(Error::config(format!("gamma must exceed 1, got {gamma}")));
    }
    Ok(alpha * (gamma - 1.0) + 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryInputs {
    pub m: usize,
    pub d_max: usize,
    pub alpha: f64,
    pub c: DegreeSequence,
    pub p: DegreeSequence,
    pub q: DegreeSequence,
}

impl TheoryInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::config(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if self.d_max < self.m {
            return Err(Error::config(format!("d_max {} below m {}", self.d_max, self.m)));
        }
        for d in self.m..=self.d_max {
            if !(self.c.get(d) > 0.0) {
                return Err(Error::config(format!("c_{d} must be positive")));
            }
        }
        for (name, s) in [("c", &self.c), ("p", &self.p), ("q", &self.q)] {
            if s.values.iter().any(|v| !(*v >= 0.0)) || !(s.tail_bound >= 0.0) {
                return Err(Error::config(format!("{name} has negative or NaN entries")));
            }
        }
        let q_total = self.q.total();
        if (q_total - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!("q sums to {q_total}, not 1")));
        }
        Ok(())
    }

    pub fn k(&self) -> KSequence {
        k_sequence(&self.c, &self.p, self.m, self.d_max)
    }

    fn checked_t(&self, k: &KSequence) -> Result<Vec<f64>> {
        if let Some(d) = k.first_violation {
            return Err(Error::NonPositiveK { d, value: k.get(d) });
        }
        Ok((self.m..=self.d_max).map(|d| k.get(d) / self.c.get(d)).collect())
    }
}

/// `t_d = k_d / c_d` on `[m, D]`.
pub fn t_sequence(inputs: &TheoryInputs, k: &KSequence) -> Result<Vec<f64>> {
    inputs.checked_t(k)
}

/// `ln a_d = sum_{i=m}^{d-1} ln(1 + alpha / t_i)` on `[m, D]`.
pub fn log_a_sequence(alpha: f64, t: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    for &ti in t {
        out.push(acc);
        acc += (alpha / ti).ln_1p();
    }
    out
}

/// `x_d` from the recursion
/// `x_m = alpha q_m / (alpha + t_m)`,
/// `x_d = (x_{d-1} t_{d-1} + alpha q_d) / (alpha + t_d)`.
pub fn x_recursion(inputs: &TheoryInputs, k: &KSequence) -> Result<DegreeSequence> {
    inputs.validate()?;
    let t = inputs.checked_t(k)?;
    let a = inputs.alpha;
    let m = inputs.m;
    let mut x = Vec::with_capacity(t.len());
    let mut prev = 0.0;
    for (i, &ti) in t.iter().enumerate() {
        let carry = if i == 0 { 0.0 } else { prev * t[i - 1] };
        let v = (carry + a * inputs.q.get(m + i)) / (a + ti);
        x.push(v);
        prev = v;
    }
    let tail = (inputs.q.total() - x.iter().sum::<f64>()).max(0.0);
    Ok(DegreeSequence::new(m, x, tail))
}

/// `x_d = (a_d (t_d + alpha))^{-1} sum_{i=m}^{d} a_i q_i alpha`, with the
/// ratios `a_i / a_d` taken in log space.
pub fn x_closed_form(inputs: &TheoryInputs) -> Result<DegreeSequence> {
    inputs.validate()?;
    let k = inputs.k();
    let t = inputs.checked_t(&k)?;
    let a = inputs.alpha;
    let m = inputs.m;
    let log_a = log_a_sequence(a, &t);
    let support: Vec<(usize, f64)> = (m..=inputs.d_max)
        .map(|d| (d - m, inputs.q.get(d)))
        .filter(|&(_, q)| q > 0.0)
        .collect();
    let x: Vec<f64> = (0..t.len())
        .map(|i| {
            let s: f64 = support
                .iter()
                .take_while(|&&(j, _)| j <= i)
                .map(|&(j, q)| a * q * (log_a[j] - log_a[i]).exp())
                .sum();
            s / (t[i] + a)
        })
        .collect();
    let tail = (inputs.q.total() - x.iter().sum::<f64>()).max(0.0);
    Ok(DegreeSequence::new(m, x, tail))
}

/// `z_d` on `[m, D + 1]`: `z_m = 1`,
/// `z_d = (z_{d-1} t_{d-1} + alpha sum_{j>=d} q_j) / (alpha + t_{d-1})`.
pub fn z_recursion(inputs: &TheoryInputs, k: &KSequence) -> Result<Vec<f64>> {
    inputs.validate()?;
    let t = inputs.checked_t(k)?;
    let a = inputs.alpha;
    let m = inputs.m;
    // q_at_least[i] = sum_{j >= m + i} q_j, for i in 0..=len
    let len = t.len();
    let mut q_at_least = vec![0.0; len + 1];
    let mut acc = inputs.q.tail_bound
        + inputs.q.iter().filter(|&(d, _)| d > inputs.d_max).map(|(_, v)| v).sum::<f64>();
    q_at_least[len] = acc;
    for i in (0..len).rev() {
        acc += inputs.q.get(m + i);
        q_at_least[i] = acc;
    }
    let mut z = Vec::with_capacity(len + 1);
    z.push(1.0);
    for i in 1..=len {
        let prev = z[i - 1];
        z.push((prev * t[i - 1] + a * q_at_least[i]) / (a + t[i - 1]));
    }
    Ok(z)
}

/// Everything derived from one set of inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitResult {
    pub inputs: TheoryInputs,
    pub gamma: Option<f64>,
    pub gamma_star: Option<f64>,
    pub k: KSequence,
    /// Present when every `k_d > 0` on `[m, D]`.
    pub solution: Option<Solution>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub t: Vec<f64>,
    pub log_a: Vec<f64>,
    /// From the recursion; `tail_bound` is `z_{D+1}`.
    pub x: DegreeSequence,
    pub z: Vec<f64>,
}

/// Computes `k`, and when every `k_d > 0` also `t`, `a`, `x` and `z`.
/// `gamma` is the tail exponent of `c` when known.
pub fn solve(inputs: TheoryInputs, gamma: Option<f64>) -> Result<LimitResult> {
    inputs.validate()?;
    let k = inputs.k();
    let gamma_star = match gamma {
        Some(g) => Some(gamma_star(inputs.alpha, g)?),
        None => None,
    };
    let solution = if k.condition6_ok {
        let t = inputs.checked_t(&k)?;
        let log_a = log_a_sequence(inputs.alpha, &t);
        let mut x = x_recursion(&inputs, &k)?;
        let z = z_recursion(&inputs, &k)?;
        x.tail_bound = *z.last().expect("z is never empty");
        Some(Solution { t, log_a, x, z })
    } else {
        None
    };
    Ok(LimitResult {
        inputs,
        gamma,
        gamma_star,
        k,
        solution,
    })
}
