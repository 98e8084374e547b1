//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use seldeg::estimators::{tail_exponent_fit, tv_distance_upto, TailMethod};
use seldeg::harness::conditions::Pooled;
use seldeg::harness::run::replica_csv_name;
use seldeg::harness::{
    build_theory, check_conditions, compare_report, run_experiment, Empirical, ExperimentConfig,
    RunData,
};
use seldeg::theory::{
    gamma_star, indep_cd, poisson, port_cd, solve, x_closed_form, x_recursion, z_recursion,
    TheoryInputs,
};
use seldeg::{ModelParams, SelectionRule, VertexId};

#[derive(Default)]
struct Criterion {
    ok: bool,
    detail: String,
}

impl Criterion {
    fn new() -> Self {
        Criterion { ok: true, detail: String::new() }
    }

    fn check(&mut self, ok: bool, what: std::fmt::Arguments) {
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        let _ = write!(self.detail, "{what}{}", if ok { "" } else { " [!]" });
        self.ok &= ok;
    }
}

macro_rules! check {
    ($c:expr, $ok:expr, $($fmt:tt)*) => { $c.check($ok, format_args!($($fmt)*)) };
}

struct Run {
    _dir: tempfile::TempDir,
    data: RunData,
    per_replica_seconds: f64,
}

fn simulate(model: ModelParams, rule: SelectionRule, n: u64, replicas: usize, seed: u64) -> Run {
    let dir = tempfile::tempdir().expect("temp dir");
    let cfg = ExperimentConfig::new(model, rule, n, replicas, seed, dir.path());
    let manifest = run_experiment(&cfg).expect("run");
    let threads = rayon::current_num_threads().min(replicas) as f64;
    let data = RunData::load(dir.path()).expect("load run");
    Run {
        per_replica_seconds: manifest.wall_time_seconds * threads / replicas as f64,
        _dir: dir,
        data,
    }
}

fn ab_level(beta: f64, alpha: f64, d_max: usize) -> TheoryInputs {
    let (c, p) = port_cd(beta, d_max).unwrap();
    TheoryInputs { m: 1, d_max, alpha, q: p.clone(), c, p }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn theory_identities() -> Criterion {
    let mut c = Criterion::new();
    let cases = [
        ab_level(0.0, 0.5, 10_000),
        ab_level(1.0, 1.0 / 3.0, 10_000),
        ab_level(-0.5, 0.8, 10_000),
        {
            let (cc, p) = indep_cd(1.0, 10_000).unwrap();
            TheoryInputs {
                m: 1,
                d_max: 10_000,
                alpha: 0.5,
                c: cc.restrict(1, 10_000),
                p: p.restrict(1, 10_000),
                q: poisson(1.0, 1, 10_000),
            }
        },
    ];
    let (mut rec_vs_closed, mut x_vs_z, mut sum_err) = (0.0f64, 0.0f64, 0.0f64);
    let mut slowest = 0.0f64;
    for inputs in &cases {
        let started = Instant::now();
        let k = inputs.k();
        let rec = x_recursion(inputs, &k).unwrap();
        let closed = x_closed_form(inputs).unwrap();
        let z = z_recursion(inputs, &k).unwrap();
        slowest = slowest.max(started.elapsed().as_secs_f64());
        rec_vs_closed = rec_vs_closed.max(max_abs_diff(&rec.values, &closed.values));
        let diffs: Vec<f64> = z.windows(2).map(|w| w[0] - w[1]).collect();
        x_vs_z = x_vs_z.max(max_abs_diff(&rec.values, &diffs));
        sum_err = sum_err.max((rec.sum() + z.last().unwrap() - 1.0).abs());
    }
    let mut x_vs_c = 0.0f64;
    for beta in [0.0, 0.5, 2.0] {
        let inputs = ab_level(beta, 1.0, 10_000);
        let inputs = TheoryInputs { q: inputs.p.clone(), ..inputs };
        // here p = delta_1, so q = p; alpha = 1 makes x = c
        let x = solve(inputs.clone(), None).unwrap().solution.unwrap().x;
        x_vs_c = x_vs_c.max(max_abs_diff(&x.values, &inputs.c.values));
    }
    check!(c, rec_vs_closed <= 1e-10, "recursion vs closed form {rec_vs_closed:.1e}");
    check!(c, x_vs_z <= 1e-12, "x vs z differences {x_vs_z:.1e}");
    check!(c, sum_err <= 1e-10, "sum x + z_(D+1) - 1 = {sum_err:.1e}");
    check!(c, x_vs_c <= 1e-12, "alpha = 1, q = p: x vs c {x_vs_c:.1e}");
    check!(c, slowest < 1.0, "D = 10^4 in {slowest:.3} s");
    c
}

fn ab_closed_form() -> Criterion {
    let mut c = Criterion::new();
    let res = solve(ab_level(0.0, 0.5, 20_000), Some(3.0)).unwrap();
    let x = res.solution.unwrap().x;
    let err = (1..=1000)
        .map(|d| (x.get(d) - 1.0 / (d as f64 * (d as f64 + 1.0))).abs())
        .fold(0.0, f64::max);
    let pts: Vec<(usize, f64)> = x.iter().collect();
    let fit = tail_exponent_fit(&pts, 100, 10_000, TailMethod::LoglogLs).unwrap();
    check!(c, err <= 1e-10, "max |x_d - 1/(d(d+1))| = {err:.1e} for d <= 1000");
    check!(c, (fit.exponent - 2.0).abs() <= 0.05, "exponent over [100, 10^4] = {:.4}", fit.exponent);
    check!(c, res.gamma_star == Some(2.0), "gamma* = {:?}", res.gamma_star);
    c
}

fn gamma_star_table() -> Criterion {
    let mut c = Criterion::new();
    let g = gamma_star(0.5, 3.0).unwrap();
    check!(c, g == 2.0, "(1/2, 3) -> {g}");
    let mut worst = 0.0f64;
    let mut worst_conn = 0.0f64;
    for m in 2..=12u32 {
        let mf = m as f64;
        let gamma = 2.0 + 1.0 / (mf - 1.0);
        worst = worst.max((gamma_star((mf - 1.0) / mf, gamma).unwrap() - 2.0).abs());
        for k in 1..m {
            let kf = k as f64;
            let got = gamma_star(1.0 - kf / mf, gamma).unwrap();
            worst_conn = worst_conn.max((got - (2.0 - (kf - 1.0) / (mf - 1.0))).abs());
        }
    }
    // exact up to the rounding of the inputs themselves
    check!(c, worst <= 4.0 * f64::EPSILON, "level sets M = 2..12: max error {worst:.1e}");
    check!(c, worst_conn <= 4.0 * f64::EPSILON, "connected-to-all: max error {worst_conn:.1e}");
    c
}

fn ab_base(run: &Run) -> Criterion {
    let mut c = Criterion::new();
    let ratios: Vec<f64> = run
        .data
        .replicas
        .iter()
        .map(|r| {
            let cp = r.final_checkpoint();
            cp.histogram[1] as f64 / cp.n as f64
        })
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let (theory, _) = port_cd(0.0, 50).unwrap();
    let c_hat = Pooled::final_of(&run.data).c_hat();
    let tv = tv_distance_upto(&c_hat, &theory, 50);
    check!(c, (mean - 2.0 / 3.0).abs() <= 0.01, "mean X[n,1]/n = {mean:.5}");
    check!(c, tv < 0.02, "TV(c_hat, c; d <= 50) = {tv:.5}");
    check!(c, run.per_replica_seconds < 10.0, "{:.2} s per replica", run.per_replica_seconds);
    c
}

fn ab_level_selection() -> Criterion {
    let mut c = Criterion::new();
    let run = simulate(ModelParams::Port { beta: 0.0 }, SelectionRule::LevelJ { j: 1 }, 1_000_000, 20, 51);
    let theory = build_theory(&ModelParams::Port { beta: 0.0 }, "level_j", 0.5, 100_000, None).unwrap();
    let report = compare_report(&run.data, &theory).unwrap();
    let x1 = report.table.iter().find(|r| r.d == 1).map(|r| r.pooled).unwrap_or(f64::NAN);
    let tv = report.tv_short.unwrap_or(f64::NAN);
    let alpha = report.alpha_hat.as_ref().map(|g| g.alpha_hat).unwrap_or(f64::NAN);
    check!(c, (x1 - 0.5).abs() <= 0.05, "pooled x_1 = {x1:.4}");
    check!(c, tv < 0.05, "TV(x_hat, x; d <= 20) = {tv:.4}");
    check!(c, (alpha - 0.5).abs() <= 0.1, "alpha_hat = {alpha:.4}");
    check!(c, run.per_replica_seconds < 60.0, "{:.2} s per replica", run.per_replica_seconds);
    c
}

fn independent_edges() -> Criterion {
    let mut c = Criterion::new();
    let run = simulate(ModelParams::Indep { lambda: 1.0 }, SelectionRule::All, 100_000, 20, 61);
    let pooled = Pooled::final_of(&run.data);
    let d_max = 200;
    let tv_p = tv_distance_upto(&pooled.p_hat(), &poisson(1.0, 0, d_max), d_max);
    let (theory_c, _) = indep_cd(1.0, 100_000).unwrap();
    let tv_c = tv_distance_upto(&pooled.c_hat(), &theory_c, 100_000);
    check!(c, tv_p < 0.02, "TV(initial degrees, Poisson(1)) = {tv_p:.5}");
    check!(c, tv_c < 0.03, "TV(c_hat, c) = {tv_c:.5}");

    let rule = SelectionRule::NeighborsOf { target: VertexId(0) };
    let run = simulate(ModelParams::Indep { lambda: 1.0 }, rule, 1_000_000, 20, 62);
    let theory = build_theory(&ModelParams::Indep { lambda: 1.0 }, "neighbors_of", 0.5, 10_000, None).unwrap();
    let report = compare_report(&run.data, &theory).unwrap();
    let alpha = report.alpha_hat.as_ref().map(|g| g.alpha_hat).unwrap_or(f64::NAN);
    let hill = report.gamma_star_hill.as_ref().map(|f| f.exponent).unwrap_or(f64::NAN);
    let clamps: u64 = report.clamp_events.iter().map(|c| c.clamp_events).sum();
    check!(c, (0.4..=0.6).contains(&alpha), "neighbours: alpha_hat = {alpha:.4}");
    check!(c, (1.7..=2.4).contains(&hill), "Hill gamma*_hat = {hill:.4} (gamma* = 2)");
    check!(c, clamps == 0, "{clamps} clamp events");
    c
}

fn multitree() -> Criterion {
    let mut c = Criterion::new();
    let model = ModelParams::Multitree { m: 3 };
    let run = simulate(model, SelectionRule::LevelJ { j: 1 }, 200_000, 10, 71);
    let emp = Empirical::from_replica_csv(&run.data.dir.join(replica_csv_name(0))).unwrap();
    let theory = build_theory(&model, "level_j", 2.0 / 3.0, 100_000, Some(&emp)).unwrap();
    let report = compare_report(&run.data, &theory).unwrap();
    let gamma = report.gamma_hat.as_ref().map(|f| f.exponent).unwrap_or(f64::NAN);
    let alpha = report.alpha_hat.as_ref().map(|g| g.alpha_hat).unwrap_or(f64::NAN);
    let total = theory.x_seq().map(|x| x.total()).unwrap_or(f64::NAN);
    check!(c, (gamma - 2.5).abs() <= 0.3, "gamma_hat = {gamma:.4}");
    check!(c, (alpha - 2.0 / 3.0).abs() <= 0.1, "level alpha_hat = {alpha:.4}");
    check!(c, (total - 1.0).abs() <= 0.02, "plug-in sum x + tail = {total:.6} (D = {})", theory.d_max);
    c
}

fn frozen_counterexample() -> Criterion {
    let mut c = Criterion::new();
    let model = ModelParams::DegreeOneFrozen { lambda: 1.0 };
    let run = simulate(model, SelectionRule::DegreeOne, 100_000, 4, 81);
    let all_at_one = run.data.replicas.iter().all(|r| {
        r.checkpoints
            .iter()
            .all(|cp| cp.restricted.get(1).copied().unwrap_or(0) == cp.s_size)
    });
    let selected: u64 = run.data.replicas.iter().map(|r| r.final_checkpoint().s_size).sum();
    let emp = Empirical::from_replica_csv(&run.data.dir.join(replica_csv_name(0))).unwrap();
    let theory = build_theory(&model, "degree_one", 1.0, 100_000, Some(&emp)).unwrap();
    let diag = check_conditions(&run.data, &theory);
    check!(c, all_at_one && selected > 0, "every selected vertex has degree 1 ({selected} selected)");
    check!(
        c,
        !diag.c6.ok && !diag.c6.empirical_ok,
        "positivity flagged at d = {:?}",
        diag.c6.empirical_first_violation
    );
    c
}

fn determinism() -> Criterion {
    let mut c = Criterion::new();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let cfg = ExperimentConfig::new(ModelParams::Port { beta: 0.0 }, SelectionRule::All, 200_000, 1, 41, d.path());
        run_experiment(&cfg).unwrap();
    }
    let read = |p: &Path, name: String| fs::read(p.join(name)).unwrap();
    let same = read(dirs[0].path(), replica_csv_name(0)) == read(dirs[1].path(), replica_csv_name(0))
        && read(dirs[0].path(), "replica_000_births.csv".into())
            == read(dirs[1].path(), "replica_000_births.csv".into());
    check!(c, same, "two runs of the same config are byte-identical");
    c
}

fn main() {
    let started = Instant::now();
    let ab = simulate(ModelParams::Port { beta: 0.0 }, SelectionRule::All, 200_000, 20, 41);
    let criteria: Vec<(&str, Box<dyn Fn() -> Criterion>)> = vec![
        ("theory identities", Box::new(theory_identities)),
        ("AB level closed form", Box::new(ab_closed_form)),
        ("gamma* table", Box::new(gamma_star_table)),
        ("AB base distribution", Box::new(|| ab_base(&ab))),
        ("AB level selection", Box::new(ab_level_selection)),
        ("independent edges", Box::new(independent_edges)),
        ("multitree", Box::new(multitree)),
        ("positivity counterexample", Box::new(frozen_counterexample)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let c = run();
        let verdict = if c.ok { "PASS" } else { "FAIL" };
        println!("{verdict} {} {name}: {} ({:.1} s)", i + 1, c.detail, t.elapsed().as_secs_f64());
        failed += usize::from(!c.ok);
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        criteria.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
