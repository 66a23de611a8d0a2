//! Seeded Monte Carlo grids over tester configurations.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::generators::{gen_instance, DistSpec, Family, Instance, Label, MAX_TABLE_FAMILY_DIM};
use super::stats::{wilson_interval, Z95};
use crate::boolfn::{Decision, DistributionSpec, FunctionOracle, MAX_CLASS_DIM};
use crate::rng::{stream_rng, trial_seed};
use crate::tester::{run_tester, Stage, TestMode, TesterConfig};
use crate::{Error, Result};

/// Stream of a trial seed that drives instance and distribution generation.
/// Tester stages use streams 1 to 4 of the same seed.
pub const GEN_STREAM: u64 = 0x0067_656e;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: Vec<usize>,
    pub k_list: Vec<usize>,
    pub epsilon_list: Vec<f64>,
    pub modes: Vec<TestMode>,
    pub families: Vec<Family>,
    pub dists: Vec<DistSpec>,
    pub trials: usize,
    pub seed: u64,
    pub threads: usize,
    pub early_exit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub id: usize,
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub mode: TestMode,
    pub family: Family,
    pub dist: DistSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub cell_id: usize,
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub mode: TestMode,
    pub family: Family,
    pub dist: String,
    pub label: Label,
    pub trial: usize,
    pub verdict: Decision,
    pub stage: Stage,
    pub f_queries: u64,
    pub d_samples: u64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub cell_id: usize,
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub mode: TestMode,
    pub family: Family,
    pub dist: String,
    /// `member`, `far`, or `mixed`.
    pub label: String,
    pub trials: u64,
    pub accepts: u64,
    pub accept_rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub min_delta: Option<f64>,
    pub mean_f_queries: f64,
    pub max_f_queries: u64,
    pub mean_d_samples: f64,
    pub rejects_by_stage: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<CellSummary>,
}

fn parse_list<T>(value: &str, sep: char, what: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr,
{
    let items: Vec<T> = value
        .split(sep)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::parse(format!("bad {what} entry {s:?}")))
        })
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::parse(format!("{what} list is empty")));
    }
    Ok(items)
}

/// Far cells whose distance can only be certified by enumerating the cube.
fn needs_exact_certification(cell: &GridCell) -> bool {
    let far = match cell.family {
        Family::Member | Family::MemberStar => false,
        Family::WrongWeightMinus => cell.mode == TestMode::Exact,
        Family::WrongWeightPlus | Family::RandomTable | Family::CorruptedParity => true,
    };
    let by_construction = matches!(
        cell.family,
        Family::WrongWeightMinus | Family::WrongWeightPlus
    ) && cell.dist == DistSpec::Uniform;
    let enumerated = matches!(cell.dist, DistSpec::Uniform | DistSpec::Product(_));
    far && !by_construction && enumerated
}

impl ExperimentConfig {
    /// Flat `key=value` lines; `#` starts a comment. Lists are comma
    /// separated, except `dist` which is separated by `;`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("line {}: expected key=value", lineno + 1)))?;
            if map
                .insert(key.trim().to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(Error::parse(format!(
                    "line {}: duplicate key {:?}",
                    lineno + 1,
                    key.trim()
                )));
            }
        }
        let take = |key: &str| {
            map.get(key)
                .cloned()
                .ok_or_else(|| Error::parse(format!("missing key {key:?}")))
        };
        let known = [
            "n",
            "k_list",
            "epsilon_list",
            "mode",
            "family",
            "dist",
            "trials",
            "seed",
            "threads",
            "early_exit",
        ];
        if let Some(bad) = map.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::parse(format!("unknown key {bad:?}")));
        }
        let modes: Vec<TestMode> = parse_list(&take("mode")?, ',', "mode")?;
        let cfg = ExperimentConfig {
            n: parse_list(&take("n")?, ',', "n")?,
            k_list: parse_list(&take("k_list")?, ',', "k_list")?,
            epsilon_list: parse_list(&take("epsilon_list")?, ',', "epsilon_list")?,
            modes,
            families: parse_list(&take("family")?, ',', "family")?,
            dists: parse_list(&take("dist")?, ';', "dist")?,
            trials: take("trials")?
                .parse()
                .map_err(|_| Error::parse("bad trials"))?,
            seed: take("seed")?
                .parse()
                .map_err(|_| Error::parse("bad seed"))?,
            threads: match map.get("threads") {
                Some(t) => t.parse().map_err(|_| Error::parse("bad threads"))?,
                None => 1,
            },
            early_exit: match map.get("early_exit").map(String::as_str) {
                None | Some("true") => true,
                Some("false") => false,
                Some(other) => {
                    return Err(Error::parse(format!(
                        "early_exit must be true or false, got {other:?}"
                    )))
                }
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("trials must be at least 1"));
        }
        if self.threads == 0 {
            return Err(Error::param("threads must be at least 1"));
        }
        for cell in self.cells() {
            TesterConfig::new(cell.n, cell.k, cell.epsilon, cell.mode, 0)?;
            if cell.family == Family::MemberStar && cell.mode == TestMode::Exact {
                return Err(Error::param(format!(
                    "cell {}: member-star needs star mode",
                    cell.id
                )));
            }
            if needs_exact_certification(&cell) && cell.n > MAX_CLASS_DIM {
                return Err(Error::param(format!(
                    "cell {}: certifying {} under {} needs n <= {MAX_CLASS_DIM}, got {}",
                    cell.id, cell.family, cell.dist, cell.n
                )));
            }
            if cell.family == Family::RandomTable && cell.n > MAX_TABLE_FAMILY_DIM {
                return Err(Error::param(format!(
                    "cell {}: random-table needs n <= {MAX_TABLE_FAMILY_DIM}, got {}",
                    cell.id, cell.n
                )));
            }
        }
        Ok(())
    }

    /// Grid cells in `n, k, epsilon, mode, family, dist` order.
    pub fn cells(&self) -> Vec<GridCell> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &k in &self.k_list {
                for &epsilon in &self.epsilon_list {
                    for &mode in &self.modes {
                        for &family in &self.families {
                            for dist in &self.dists {
                                out.push(GridCell {
                                    id: out.len(),
                                    n,
                                    k,
                                    epsilon,
                                    mode,
                                    family,
                                    dist: dist.clone(),
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

impl GridCell {
    pub fn tester_config(&self, seed: u64, early_exit: bool) -> Result<TesterConfig> {
        Ok(
            TesterConfig::new(self.n, self.k, self.epsilon, self.mode, seed)?
                .with_early_exit(early_exit),
        )
    }

    /// The distribution and instance of one trial, reproducible from its seed.
    pub fn generate(&self, seed: u64) -> Result<(DistributionSpec, Instance)> {
        let mut rng = stream_rng(seed, GEN_STREAM);
        let d = self.dist.realize(self.n, &mut rng)?;
        let inst = gen_instance(
            self.n,
            self.k,
            self.epsilon,
            self.mode,
            &d,
            self.family,
            &mut rng,
        )?;
        Ok((d, inst))
    }
}

pub fn run_trial(
    cell: &GridCell,
    trial: usize,
    master_seed: u64,
    early_exit: bool,
) -> Result<TrialRecord> {
    let started = Instant::now();
    let seed = trial_seed(master_seed, cell.id as u32, trial as u32);
    let (d, inst) = cell.generate(seed)?;
    let cfg = cell.tester_config(seed, early_exit)?;
    let verdict = run_tester(&FunctionOracle::planned(inst.function), &d, &cfg)?;
    Ok(TrialRecord {
        cell_id: cell.id,
        n: cell.n,
        k: cell.k,
        epsilon: cell.epsilon,
        mode: cell.mode,
        family: cell.family,
        dist: cell.dist.to_string(),
        label: inst.label,
        trial,
        verdict: verdict.decision,
        stage: verdict.rejecting_stage,
        f_queries: verdict.stats.f_queries(),
        d_samples: verdict.stats.d_samples(),
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let cells = cfg.cells();
    let jobs: Vec<(&GridCell, usize)> = cells
        .iter()
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::param(format!("thread pool: {e}")))?;
    let records: Vec<TrialRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(cell, t)| run_trial(cell, t, cfg.seed, cfg.early_exit))
            .collect::<Result<Vec<_>>>()
    })?;
    let summary = summarize(&cells, &records);
    Ok(ExperimentOutput { records, summary })
}

pub fn summarize(cells: &[GridCell], records: &[TrialRecord]) -> Vec<CellSummary> {
    cells
        .iter()
        .map(|cell| {
            let rs: Vec<&TrialRecord> = records.iter().filter(|r| r.cell_id == cell.id).collect();
            let trials = rs.len() as u64;
            let accepts = rs.iter().filter(|r| r.verdict == Decision::Accept).count() as u64;
            let (wilson_lo, wilson_hi) = wilson_interval(accepts, trials, Z95);
            let members = rs.iter().filter(|r| r.label == Label::Member).count();
            let label = match members {
                0 => "far",
                m if m == rs.len() => "member",
                _ => "mixed",
            };
            let min_delta = rs.iter().filter_map(|r| r.label.delta()).reduce(f64::min);
            let mut rejects_by_stage = BTreeMap::new();
            for r in rs.iter().filter(|r| r.verdict == Decision::Reject) {
                *rejects_by_stage.entry(r.stage.to_string()).or_insert(0) += 1;
            }
            let denom = trials.max(1) as f64;
            CellSummary {
                cell_id: cell.id,
                n: cell.n,
                k: cell.k,
                epsilon: cell.epsilon,
                mode: cell.mode,
                family: cell.family,
                dist: cell.dist.to_string(),
                label: label.to_string(),
                trials,
                accepts,
                accept_rate: accepts as f64 / denom,
                wilson_lo,
                wilson_hi,
                min_delta,
                mean_f_queries: rs.iter().map(|r| r.f_queries as f64).sum::<f64>() / denom,
                max_f_queries: rs.iter().map(|r| r.f_queries).max().unwrap_or(0),
                mean_d_samples: rs.iter().map(|r| r.d_samples as f64).sum::<f64>() / denom,
                rejects_by_stage,
            }
        })
        .collect()
}

pub const RECORD_HEADER: [&str; 14] = [
    "cell_id",
    "n",
    "k",
    "epsilon",
    "mode",
    "family",
    "dist",
    "label",
    "delta",
    "trial",
    "verdict",
    "stage",
    "f_queries",
    "d_samples",
];

pub const SUMMARY_HEADER: [&str; 21] = [
    "cell_id",
    "n",
    "k",
    "epsilon",
    "mode",
    "family",
    "dist",
    "label",
    "trials",
    "accepts",
    "accept_rate",
    "wilson_lo",
    "wilson_hi",
    "min_delta",
    "mean_f_queries",
    "max_f_queries",
    "mean_d_samples",
    "rejects_blr",
    "rejects_binning",
    "rejects_learner",
    "rejects_consistency",
];

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::parse(format!("csv: {other:?}")),
    }
}

/// Trial records as CSV; wall time is left out so output is reproducible.
pub fn write_records_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.cell_id.to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.epsilon.to_string(),
            r.mode.to_string(),
            r.family.to_string(),
            r.dist.clone(),
            r.label.as_str().to_string(),
            r.label.delta().map(|d| d.to_string()).unwrap_or_default(),
            r.trial.to_string(),
            r.verdict.as_str().to_string(),
            r.stage.to_string(),
            r.f_queries.to_string(),
            r.d_samples.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(summary: &[CellSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER).map_err(csv_err)?;
    for s in summary {
        let stage = |name: &str| s.rejects_by_stage.get(name).copied().unwrap_or(0);
        w.write_record([
            s.cell_id.to_string(),
            s.n.to_string(),
            s.k.to_string(),
            s.epsilon.to_string(),
            s.mode.to_string(),
            s.family.to_string(),
            s.dist.clone(),
            s.label.clone(),
            s.trials.to_string(),
            s.accepts.to_string(),
            format!("{:.6}", s.accept_rate),
            format!("{:.6}", s.wilson_lo),
            format!("{:.6}", s.wilson_hi),
            s.min_delta.map(|d| format!("{d:.6}")).unwrap_or_default(),
            format!("{:.2}", s.mean_f_queries),
            s.max_f_queries.to_string(),
            format!("{:.2}", s.mean_d_samples),
            stage("blr").to_string(),
            stage("binning").to_string(),
            stage("learner").to_string(),
            stage("consistency").to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `runs.csv` becomes `runs.summary.csv`.
pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.summary.csv"))
}

/// Runs the grid and writes both CSV files.
pub fn run_bench(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentOutput> {
    let output = run_experiment(cfg)?;
    write_records_csv(&output.records, std::fs::File::create(out)?)?;
    write_summary_csv(&output.summary, std::fs::File::create(summary_path(out))?)?;
    Ok(output)
}
