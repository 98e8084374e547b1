//! Multi-replica execution and the on-disk run layout.
//!
//! A run directory holds, per replica `r`:
//!
//! * `replica_{r:03}.csv`: `replica,n,d,count_all,count_selected` rows per
//!   checkpoint. Row `d = -1` carries `|V_n|` and `|S_n|`; row `d = -2`, when
//!   present, carries the counts of vertices with degree above `d_max`.
//! * `replica_{r:03}_births.csv`: `replica,n,d,born_all,born_selected`, the
//!   cumulative degree-at-birth counts of all new vertices and of new
//!   selected vertices.
//!
//! and a `manifest.json` describing the run.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SCHEMA_VERSION};
use super::json;
use crate::error::{Error, Result};
use crate::graph::Checkpoint;
use crate::rng::replica_seed;
use crate::sim::Simulation;

pub const MANIFEST: &str = "manifest.json";
const SIZE_ROW: i64 = -1;
const OVERFLOW_ROW: i64 = -2;

pub fn replica_csv_name(index: usize) -> String {
    format!("replica_{index:03}.csv")
}

pub fn births_csv_name(index: usize) -> String {
    format!("replica_{index:03}_births.csv")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaEntry {
    pub index: usize,
    pub seed: u64,
    pub csv: String,
    pub births_csv: String,
    pub clamp_events: u64,
    pub final_s_size: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub crate_version: String,
    pub config: ExperimentConfig,
    pub checkpoint_steps: Vec<u64>,
    pub replicas: Vec<ReplicaEntry>,
    pub wall_time_seconds: f64,
}

impl Manifest {
    pub fn load(run_dir: &Path) -> Result<Self> {
        json::read(&run_dir.join(MANIFEST))
    }
}

/// Degree-at-birth counts at one checkpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BirthRecord {
    pub n: u64,
    pub all: Vec<u64>,
    pub selected: Vec<u64>,
}

/// Everything one replica produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaOutput {
    pub index: usize,
    pub seed: u64,
    pub checkpoints: Vec<Checkpoint>,
    pub births: Vec<BirthRecord>,
    pub clamp_events: u64,
}

/// Runs one replica through the checkpoint schedule, verifying the degree
/// bookkeeping by full recount at every checkpoint.
pub fn run_replica(config: &ExperimentConfig, index: usize) -> Result<ReplicaOutput> {
    let seed = replica_seed(config.master_seed, index as u64);
    let mut sim = Simulation::new(config.model, config.rule.clone(), seed)?;
    let mut checkpoints = Vec::new();
    let mut births = Vec::new();
    for n in config.checkpoint_steps() {
        sim.run_until(n)?;
        sim.graph().check_invariants()?;
        let cp = sim.checkpoint();
        cp.check()?;
        if !crate::graph::same_histogram(&sim.selection().recount(sim.graph()), &cp.restricted) {
            return Err(Error::invariant(format!(
                "replica {index}: restricted histogram disagrees with recount at n = {n}"
            )));
        }
        checkpoints.push(cp);
        births.push(BirthRecord {
            n,
            all: sim.born().to_vec(),
            selected: sim.selection().born_selected().to_vec(),
        });
    }
    Ok(ReplicaOutput {
        index,
        seed,
        checkpoints,
        births,
        clamp_events: sim.clamp_events(),
    })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file)))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Rows `(d, a, b)` for two aligned histograms truncated at `d_max`, with the
/// overflow row first when needed.
fn histogram_rows(a: &[u64], b: &[u64], d_max: usize) -> Vec<(i64, u64, u64)> {
    let len = a.len().max(b.len());
    let at = |h: &[u64], d: usize| h.get(d).copied().unwrap_or(0);
    let mut rows = Vec::new();
    let (mut over_a, mut over_b) = (0, 0);
    for d in d_max + 1..len {
        over_a += at(a, d);
        over_b += at(b, d);
    }
    if over_a + over_b > 0 {
        rows.push((OVERFLOW_ROW, over_a, over_b));
    }
    for d in 0..len.min(d_max + 1) {
        let (x, y) = (at(a, d), at(b, d));
        if x + y > 0 {
            rows.push((d as i64, x, y));
        }
    }
    rows
}

pub fn write_replica(dir: &Path, out: &ReplicaOutput, d_max: usize) -> Result<()> {
    let path = dir.join(replica_csv_name(out.index));
    let mut w = csv_writer(&path)?;
    let err = csv_err(&path);
    w.write_record(["replica", "n", "d", "count_all", "count_selected"]).map_err(&err)?;
    for cp in &out.checkpoints {
        let vertices: u64 = cp.histogram.iter().sum();
        w.serialize((out.index, cp.n, SIZE_ROW, vertices, cp.s_size)).map_err(&err)?;
        for row in histogram_rows(&cp.histogram, &cp.restricted, d_max) {
            w.serialize((out.index, cp.n, row.0, row.1, row.2)).map_err(&err)?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = dir.join(births_csv_name(out.index));
    let mut w = csv_writer(&path)?;
    let err = csv_err(&path);
    w.write_record(["replica", "n", "d", "born_all", "born_selected"]).map_err(&err)?;
    for b in &out.births {
        for row in histogram_rows(&b.all, &b.selected, d_max) {
            w.serialize((out.index, b.n, row.0, row.1, row.2)).map_err(&err)?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))
}

/// Runs all replicas in parallel, then writes their files and the manifest.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Manifest> {
    config.validate()?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let started = Instant::now();
    let results: Vec<Result<ReplicaOutput>> = (0..config.replicas)
        .into_par_iter()
        .map(|i| {
            let out = run_replica(config, i)?;
            write_replica(dir, &out, config.d_max)?;
            Ok(out)
        })
        .collect();
    let mut replicas = Vec::with_capacity(results.len());
    for r in results {
        let out = r?;
        replicas.push(ReplicaEntry {
            index: out.index,
            seed: out.seed,
            csv: replica_csv_name(out.index),
            births_csv: births_csv_name(out.index),
            clamp_events: out.clamp_events,
            final_s_size: out.checkpoints.last().map(|c| c.s_size).unwrap_or(0),
        });
    }
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        checkpoint_steps: config.checkpoint_steps(),
        replicas,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    json::write(&dir.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

/// A replica read back from disk. Degrees above the persisted `d_max` only
/// survive as overflow counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaRecord {
    pub index: usize,
    pub checkpoints: Vec<Checkpoint>,
    /// `(overflow_all, overflow_selected)` per checkpoint.
    pub overflow: Vec<(u64, u64)>,
    pub births: Vec<BirthRecord>,
}

impl ReplicaRecord {
    pub fn final_checkpoint(&self) -> &Checkpoint {
        self.checkpoints.last().expect("replica files hold at least one checkpoint")
    }

    pub fn final_births(&self) -> Option<&BirthRecord> {
        self.births.last()
    }
}

#[derive(Debug, Deserialize)]
struct Row(usize, u64, i64, u64, u64);

fn read_rows(path: &Path) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<std::result::Result<Vec<Row>, _>>().map_err(csv_err(path))
}

fn put(h: &mut Vec<u64>, d: usize, v: u64) {
    if d >= h.len() {
        h.resize(d + 1, 0);
    }
    h[d] = v;
}

/// `(replica, checkpoint, (overflow_all, overflow_selected))`.
pub type ReplicaRow = (usize, Checkpoint, (u64, u64));

/// Reads a replica CSV into checkpoints (grouped by `n`, in file order).
pub fn read_replica_csv(path: &Path) -> Result<Vec<ReplicaRow>> {
    let mut out: Vec<ReplicaRow> = Vec::new();
    for Row(replica, n, d, all, selected) in read_rows(path)? {
        let fresh = match out.last() {
            Some((r, cp, _)) => *r != replica || cp.n != n,
            None => true,
        };
        if fresh {
            out.push((
                replica,
                Checkpoint { n, histogram: Vec::new(), restricted: Vec::new(), s_size: 0 },
                (0, 0),
            ));
        }
        let (_, cp, overflow) = out.last_mut().unwrap();
        match d {
            SIZE_ROW => cp.s_size = selected,
            OVERFLOW_ROW => *overflow = (all, selected),
            d if d >= 0 => {
                put(&mut cp.histogram, d as usize, all);
                put(&mut cp.restricted, d as usize, selected);
            }
            d => {
                return Err(Error::config(format!("{}: unknown sentinel row d = {d}", path.display())))
            }
        }
    }
    Ok(out)
}

pub fn read_births_csv(path: &Path) -> Result<Vec<BirthRecord>> {
    let mut out: Vec<BirthRecord> = Vec::new();
    for Row(_, n, d, all, selected) in read_rows(path)? {
        if out.last().map(|b| b.n) != Some(n) {
            out.push(BirthRecord { n, all: Vec::new(), selected: Vec::new() });
        }
        if d >= 0 {
            let b = out.last_mut().unwrap();
            put(&mut b.all, d as usize, all);
            put(&mut b.selected, d as usize, selected);
        }
    }
    Ok(out)
}

/// A completed run directory.
#[derive(Debug, Clone)]
pub struct RunData {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub replicas: Vec<ReplicaRecord>,
}

impl RunData {
    pub fn load(dir: &Path) -> Result<Self> {
        let manifest = Manifest::load(dir)?;
        let mut replicas = Vec::new();
        for entry in &manifest.replicas {
            let rows = read_replica_csv(&dir.join(&entry.csv))?;
            let births = read_births_csv(&dir.join(&entry.births_csv))?;
            let (checkpoints, overflow) = rows.into_iter().map(|(_, c, o)| (c, o)).unzip();
            replicas.push(ReplicaRecord {
                index: entry.index,
                checkpoints,
                overflow,
                births,
            });
        }
        if replicas.iter().any(|r| r.checkpoints.is_empty()) {
            return Err(Error::config(format!("{}: replica without checkpoints", dir.display())));
        }
        Ok(RunData {
            dir: dir.to_path_buf(),
            manifest,
            replicas,
        })
    }
}
