//! Seeded experiments E1–E11 and their JSON reports.
//!
//! Each experiment is a list of arms; every arm runs `trials` times. A
//! trial's generator is seeded from `(seed, experiment, arm, trial index)`
//! alone, so any record can be regenerated from the seed it carries and
//! reports do not depend on thread scheduling.

mod experiments;
mod gen;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::frames::{CircleGrid, MIN_GRID_SIZE};
use crate::operators::tail_epsilon;

pub use gen::{pseudo_hyperbolic, separated, COPRIME_SEPARATION, MAX_TRIES};

use gen::ArmError;

pub const SCHEMA_VERSION: &str = "1";

/// Environment variable capping trial parallelism; `0` runs sequentially.
pub const THREADS_ENV: &str = "MSLAB_THREADS";

/// Named tolerances and their defaults.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("angle_exact", 1e-6),
    ("angle_window", 1e-3),
    ("assembly", 1e-10),
    ("b_pi", 1e-8),
    ("c_symmetry", 1e-9),
    ("certificate", 1e-8),
    ("coanalytic", 1e-8),
    ("constant_b", 1e-10),
    ("eps_tail_max", 1e-6),
    ("extremal", 1e-6),
    ("identity", 1e-6),
    ("non_pi_floor", 1e-3),
    ("norm_gap", 1e-3),
    ("pi", 1e-8),
    ("sedlock", 1e-8),
    ("strict_residual", 1e-2),
    ("vanish", 1e-8),
    ("zero_tto", 1e-9),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub trials: usize,
    pub seed: u64,
    /// Largest degree of `θ`; the factors `u, v` go up to one less.
    pub max_degree: usize,
    pub radius_cap: f64,
    /// Base window per side; the dual frame of `θ` uses `window + deg θ`.
    pub window: usize,
    pub grid_size: usize,
    pub tolerances: BTreeMap<String, f64>,
    /// Record wall-clock time in the summary. Off by default so that
    /// reports are byte-reproducible.
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(experiment_id: impl Into<String>) -> Self {
        Self {
            experiment_id: experiment_id.into(),
            trials: 100,
            seed: 0,
            max_degree: 4,
            radius_cap: 0.8,
            window: 104,
            grid_size: 1024,
            tolerances: DEFAULT_TOLERANCES.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            timing: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    /// Overrides one named tolerance.
    pub fn set_tolerance(&mut self, name: &str, value: f64) -> Result<()> {
        if !DEFAULT_TOLERANCES.iter().any(|&(k, _)| k == name) {
            let known: Vec<&str> = DEFAULT_TOLERANCES.iter().map(|&(k, _)| k).collect();
            return Err(LabError::InvalidConfig(format!("unknown tolerance `{name}` (known: {})", known.join(", "))));
        }
        if !(value.is_finite() && value > 0.0) {
            return Err(LabError::InvalidConfig(format!("tolerance {name} must be positive, got {value}")));
        }
        self.tolerances.insert(name.to_string(), value);
        Ok(())
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances
            .get(name)
            .copied()
            .or_else(|| DEFAULT_TOLERANCES.iter().find(|&&(k, _)| k == name).map(|&(_, v)| v))
            .unwrap_or_else(|| panic!("tolerance `{name}` is not registered"))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::InvalidConfig(m));
        if self.trials < 1 {
            return bad("trials must be at least 1".into());
        }
        if self.max_degree < 1 {
            return bad("max_degree must be at least 1".into());
        }
        if !(self.radius_cap > 0.0 && self.radius_cap <= crate::blaschke::MAX_RADIUS_CAP) {
            return bad(format!("radius_cap must lie in (0, {}]", crate::blaschke::MAX_RADIUS_CAP));
        }
        if self.grid_size < MIN_GRID_SIZE || !self.grid_size.is_power_of_two() {
            return bad(format!("grid_size must be a power of two ≥ {MIN_GRID_SIZE}"));
        }
        if self.window < 4 {
            return bad("window must be at least 4".into());
        }
        if 4 * (self.window + self.max_degree) > self.grid_size {
            return bad(format!(
                "grid_size {} cannot resolve a window of {} + {}: need at least four samples per window slot pair",
                self.grid_size, self.window, self.max_degree
            ));
        }
        for (k, v) in &self.tolerances {
            if !DEFAULT_TOLERANCES.iter().any(|&(n, _)| n == k) {
                return bad(format!("unknown tolerance `{k}`"));
            }
            if !(v.is_finite() && *v > 0.0) {
                return bad(format!("tolerance {k} must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub arm: String,
    pub index: usize,
    /// Seed of the trial's generator; `replay` rebuilds the record from it.
    pub seed: u64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    pub inputs: BTreeMap<String, String>,
    pub metrics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub min_margin: Option<f64>,
    pub max_defect: Option<f64>,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub experiment: String,
    pub config: ExperimentConfig,
    pub trials: Vec<TrialRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are finite")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Report = serde_json::from_str(text).map_err(|e| LabError::Parse(format!("report: {e}")))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(LabError::Parse(format!("unsupported schema_version `{}`", r.schema_version)));
        }
        Ok(r)
    }

    /// Records of one arm, in trial order.
    pub fn arm(&self, name: &str) -> impl Iterator<Item = &TrialRecord> {
        let name = name.to_string();
        self.trials.iter().filter(move |t| t.arm == name)
    }

    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0
    }
}

/// Registry entry.
#[derive(Debug, Clone, Copy)]
pub struct ExperimentInfo {
    pub id: &'static str,
    pub name: &'static str,
    pub description: &'static str,
    pub arms: &'static [&'static str],
}

pub fn experiments() -> &'static [ExperimentInfo] {
    experiments::REGISTRY
}

/// Looks up an experiment by id (`E2`) or name (`du_characterization`).
pub fn find_experiment(key: &str) -> Result<&'static ExperimentInfo> {
    experiments()
        .iter()
        .find(|e| e.id.eq_ignore_ascii_case(key) || e.name.eq_ignore_ascii_case(key))
        .ok_or_else(|| LabError::UnknownExperiment(key.to_string()))
}

/// Seed of trial `index` of `arm`.
pub fn trial_seed(seed: u64, experiment: &str, arm: &str, index: usize) -> u64 {
    let mut h = fnv1a(experiment.as_bytes());
    h = fnv1a_continue(h, b"/");
    h = fnv1a_continue(h, arm.as_bytes());
    splitmix(splitmix(seed ^ h).wrapping_add(index as u64))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    fnv1a_continue(0xcbf2_9ce4_8422_2325, bytes)
}

fn fnv1a_continue(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Value of `MSLAB_THREADS`, if set.
pub fn thread_limit() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            v.trim().parse().map(Some).map_err(|_| {
                LabError::InvalidConfig(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`"))
            })
        }
        Err(_) => Ok(None),
    }
}

/// Shared state of one run.
pub(crate) struct Ctx {
    pub cfg: ExperimentConfig,
    pub grid: CircleGrid,
}

impl Ctx {
    fn new(cfg: ExperimentConfig) -> Result<Self> {
        let grid = CircleGrid::new(cfg.grid_size)?;
        Ok(Self { cfg, grid })
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.cfg.tolerance(name)
    }

    pub fn max_uv(&self) -> usize {
        self.cfg.max_degree.saturating_sub(1).max(1)
    }

    pub fn base_side(&self, theta_degree: usize) -> usize {
        self.cfg.window + theta_degree
    }

    /// Window side for finite-section verdicts: the base side, enlarged
    /// until `ε_tail ≤ eps_tail_max` or the grid limit `size/4` is reached.
    pub fn tail_side(&self, theta_degree: usize, radius: f64, max_degree: usize) -> (usize, f64) {
        let cap = self.cfg.grid_size / 4;
        let target = self.tol("eps_tail_max");
        let mut side = self.base_side(theta_degree).min(cap);
        while side < cap && tail_epsilon(radius, side, max_degree) > target {
            side += 2;
        }
        let side = side.min(cap);
        (side, tail_epsilon(radius, side, max_degree))
    }
}

fn record_from(
    arm: &str,
    index: usize,
    seed: u64,
    outcome: std::result::Result<experiments::Trial, ArmError>,
) -> TrialRecord {
    match outcome {
        Ok(t) => TrialRecord {
            arm: arm.to_string(),
            index,
            seed,
            verdict: if t.pass { Verdict::Pass } else { Verdict::Fail },
            skip_reason: None,
            margin: t.margin,
            inputs: t.inputs,
            metrics: t.metrics,
            note: t.note,
        },
        Err(ArmError::Skip(reason)) => TrialRecord {
            arm: arm.to_string(),
            index,
            seed,
            verdict: Verdict::Skipped,
            skip_reason: Some(reason),
            margin: None,
            inputs: BTreeMap::new(),
            metrics: BTreeMap::new(),
            note: None,
        },
        Err(ArmError::Lab(e)) => TrialRecord {
            arm: arm.to_string(),
            index,
            seed,
            verdict: Verdict::Fail,
            skip_reason: None,
            margin: None,
            inputs: BTreeMap::new(),
            metrics: BTreeMap::new(),
            note: Some(e.to_string()),
        },
    }
}

fn run_arm(ctx: &Ctx, exp: &ExperimentInfo, arm: &str, index: usize, seed: u64) -> TrialRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcome = experiments::run_arm(ctx, exp.id, arm, &mut rng);
    record_from(arm, index, seed, outcome)
}

/// Runs every arm of the configured experiment `trials` times.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    let exp = find_experiment(&cfg.experiment_id)?;
    cfg.validate()?;
    let threads = thread_limit()?;
    let start = Instant::now();
    let ctx = Ctx::new(cfg.clone())?;
    let jobs: Vec<(usize, &str)> = (0..cfg.trials).flat_map(|i| exp.arms.iter().map(move |&a| (i, a))).collect();
    let job = |&(i, arm): &(usize, &str)| run_arm(&ctx, exp, arm, i, trial_seed(cfg.seed, exp.id, arm, i));
    let mut records: Vec<TrialRecord> = match threads {
        Some(0) => jobs.iter().map(job).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| LabError::InvalidConfig(format!("thread pool: {e}")))?
            .install(|| jobs.par_iter().map(job).collect()),
        None => jobs.par_iter().map(job).collect(),
    };
    for (name, outcome) in experiments::pinned(&ctx, exp.id) {
        records.push(record_from(&name, 0, 0, outcome));
    }
    let wall_ms = if cfg.timing { start.elapsed().as_millis() as u64 } else { 0 };
    Ok(Report {
        schema_version: SCHEMA_VERSION.to_string(),
        experiment: format!("{} {}", exp.id, exp.name),
        config: cfg.clone(),
        summary: summarize(&records, wall_ms),
        trials: records,
    })
}

/// Rebuilds one trial from the seed stored in its record.
pub fn replay(cfg: &ExperimentConfig, arm: &str, index: usize, seed: u64) -> Result<TrialRecord> {
    let exp = find_experiment(&cfg.experiment_id)?;
    cfg.validate()?;
    if !exp.arms.contains(&arm) {
        return Err(LabError::InvalidConfig(format!("experiment {} has no arm `{arm}`", exp.id)));
    }
    let ctx = Ctx::new(cfg.clone())?;
    Ok(run_arm(&ctx, exp, arm, index, seed))
}

fn summarize(records: &[TrialRecord], wall_ms: u64) -> Summary {
    let count = |v: Verdict| records.iter().filter(|r| r.verdict == v).count();
    let min_margin = records.iter().filter_map(|r| r.margin).reduce(f64::min);
    let max_defect = records.iter().filter_map(|r| r.metrics.get("defect").copied()).reduce(f64::max);
    Summary {
        pass: count(Verdict::Pass),
        fail: count(Verdict::Fail),
        skip: count(Verdict::Skipped),
        min_margin,
        max_defect,
        wall_ms,
    }
}
