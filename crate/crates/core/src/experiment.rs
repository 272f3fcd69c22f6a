//! Run orchestration: single recorded simulations and sweeps over the drive frequency.

use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{gaussian_packet, SpatialGrid, WaveField};
use crate::observables::{Meter, ObservableSample, TunnelingMetrics};
use crate::potential::DrivePotential;
use crate::propagator::{check_cadence, Propagator, StepScheme, MAX_DTAU};

pub const DEFAULT_DTAU: f64 = 0.002;
pub const DEFAULT_X_MAX: f64 = 16.0;
pub const DEFAULT_N_POINTS: usize = 2048;
pub const DEFAULT_RECORD_STRIDE: f64 = 0.5;

fn default_dtau() -> f64 {
    DEFAULT_DTAU
}

fn default_stride() -> f64 {
    DEFAULT_RECORD_STRIDE
}

fn default_x_max() -> f64 {
    DEFAULT_X_MAX
}

fn default_n_points() -> usize {
    DEFAULT_N_POINTS
}

fn default_width() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_x_max")]
    pub x_max: f64,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            x_max: DEFAULT_X_MAX,
            n_points: DEFAULT_N_POINTS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Well {
    #[default]
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    #[serde(default)]
    pub well: Well,
    #[serde(default = "default_width")]
    pub width: f64,
}

impl Default for InitialState {
    fn default() -> Self {
        Self {
            well: Well::Left,
            width: 1.0,
        }
    }
}

/// Everything needed to reproduce one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub tau_max: f64,
    #[serde(default = "default_dtau")]
    pub dtau: f64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub scheme: StepScheme,
    #[serde(default = "default_stride")]
    pub record_stride_tau: f64,
    /// `None` means the quarter points of `[0, tau_max]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_taus: Option<Vec<f64>>,
    #[serde(default)]
    pub initial: InitialState,
}

impl RunConfig {
    /// alpha = 0.0005, beta = 0.0001, tau in [0, 2500], default numerics.
    pub fn production(epsilon: f64) -> Self {
        Self {
            alpha: 0.0005,
            beta: 0.0001,
            epsilon,
            tau_max: 2500.0,
            dtau: DEFAULT_DTAU,
            grid: GridConfig::default(),
            scheme: StepScheme::SplitStepFourier,
            record_stride_tau: DEFAULT_RECORD_STRIDE,
            snapshot_taus: None,
            initial: InitialState::default(),
        }
    }

    pub fn potential(&self) -> Result<DrivePotential> {
        DrivePotential::new(self.alpha, self.beta, self.epsilon)
    }

    pub fn spatial_grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.grid.x_max, self.grid.n_points)
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        match &self.snapshot_taus {
            Some(t) => t.clone(),
            None => (0..=4).map(|q| self.tau_max * q as f64 / 4.0).collect(),
        }
    }

    /// Center of the initial packet: the chosen well's minimum at `tau = 0`.
    pub fn initial_center(&self) -> Result<f64> {
        let (left, right) = self.potential()?.well_minima(0.0);
        Ok(match self.initial.well {
            Well::Left => left,
            Well::Right => right,
        })
    }

    /// Checks every field, naming the offending key on failure.
    pub fn validate(&self) -> Result<()> {
        self.potential()?;
        if !(self.tau_max.is_finite() && self.tau_max > 0.0) {
            return Err(Error::config("tau_max", format!("must be positive, got {}", self.tau_max)));
        }
        if !(self.dtau.is_finite() && self.dtau > 0.0 && self.dtau < MAX_DTAU) {
            return Err(Error::config(
                "dtau",
                format!("must lie in (0, {MAX_DTAU}), got {}", self.dtau),
            ));
        }
        if !(self.record_stride_tau >= self.dtau) {
            return Err(Error::config(
                "record_stride_tau",
                format!("must be at least dtau = {}, got {}", self.dtau, self.record_stride_tau),
            ));
        }
        check_cadence(self.record_stride_tau, self.dtau)?;
        let grid = self.spatial_grid()?;
        if let Some(bad) = self
            .snapshot_times()
            .into_iter()
            .find(|t| !(0.0..=self.tau_max).contains(t))
        {
            return Err(Error::config(
                "snapshot_taus",
                format!("{bad} lies outside [0, {}]", self.tau_max),
            ));
        }
        if !(self.initial.width.is_finite() && self.initial.width > 0.0) {
            return Err(Error::config(
                "initial.width",
                format!("must be positive, got {}", self.initial.width),
            ));
        }
        let center = self.initial_center()?;
        if center.abs() + 4.0 * self.initial.width >= grid.x_max() {
            return Err(Error::config(
                "initial.width",
                format!(
                    "packet at {center:.4} with width {} does not fit inside x_max = {}",
                    self.initial.width,
                    grid.x_max()
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub tau: f64,
    pub field: WaveField,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: RunConfig,
    pub samples: Vec<ObservableSample>,
    pub snapshots: Vec<Snapshot>,
    pub metrics: TunnelingMetrics,
    pub wall_time: Duration,
}

impl RunRecord {
    pub fn barrier_height(&self) -> f64 {
        1.0 / (8.0 * self.config.alpha.sqrt())
    }

    /// Largest `|norm - 1|` over the recorded samples.
    pub fn norm_drift(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.norm - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|E(tau) - E(0)| / |E(0)|` over the recorded samples.
    pub fn relative_energy_drift(&self) -> f64 {
        let Some(first) = self.samples.first() else {
            return 0.0;
        };
        let e0 = first.energy_total;
        self.samples
            .iter()
            .map(|s| ((s.energy_total - e0) / e0).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_prob_left(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.prob_left)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn last(&self) -> Option<&ObservableSample> {
        self.samples.last()
    }
}

/// Recording times `0, stride, 2 stride, ...` up to and including `tau_max`.
fn record_times(tau_max: f64, stride: f64) -> Vec<f64> {
    let mut times = Vec::new();
    let mut i = 0u64;
    loop {
        let t = i as f64 * stride;
        if t >= tau_max * (1.0 - 1e-12) {
            break;
        }
        times.push(t);
        i += 1;
    }
    times.push(tau_max);
    times
}

/// Wall clock for `RunRecord::wall_time`.
#[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
struct Stopwatch(std::time::Instant);

#[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
impl Stopwatch {
    fn start() -> Self {
        Self(std::time::Instant::now())
    }

    fn elapsed(&self) -> Duration {
        self.0.elapsed()
    }
}

// std has no clock on bare wasm; the browser demo reports zero wall time.
#[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
struct Stopwatch;

#[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
impl Stopwatch {
    fn start() -> Self {
        Self
    }

    fn elapsed(&self) -> Duration {
        Duration::ZERO
    }
}

/// Runs one simulation: Gaussian in the selected well, propagated to `tau_max` with
/// observables every `record_stride_tau`.
///
/// Snapshots are taken on a side branch, so requesting them never changes the recorded
/// trajectory.
pub fn run_simulation(config: &RunConfig) -> Result<RunRecord> {
    config.validate()?;
    let start = Stopwatch::start();
    let grid = config.spatial_grid()?;
    let pot = config.potential()?;
    let mut field = gaussian_packet(&grid, config.initial_center()?, config.initial.width)?;

    let mut snap_times = config.snapshot_times();
    snap_times.sort_by(f64::total_cmp);
    snap_times.dedup();
    let mut pending = snap_times.into_iter().peekable();

    let mut prop = Propagator::new(&grid, config.scheme);
    let mut branch = Propagator::new(&grid, config.scheme);
    let mut meter = Meter::new(&grid);
    let times = record_times(config.tau_max, config.record_stride_tau);
    let mut samples = Vec::with_capacity(times.len());
    let mut snapshots = Vec::new();

    for &t in &times {
        // snapshots strictly before this record time branch off the previous state
        while let Some(&s) = pending.peek() {
            if s >= t {
                break;
            }
            let mut fork = field.clone();
            branch.advance_to(&mut fork, &pot, s, config.dtau)?;
            snapshots.push(Snapshot { tau: s, field: fork });
            pending.next();
        }
        prop.advance_to(&mut field, &pot, t, config.dtau)?;
        samples.push(meter.measure(&field, &pot)?);
        if pending.peek() == Some(&t) {
            snapshots.push(Snapshot {
                tau: t,
                field: field.clone(),
            });
            pending.next();
        }
    }

    let metrics = TunnelingMetrics::from_samples(&samples)?;
    Ok(RunRecord {
        config: config.clone(),
        samples,
        snapshots,
        metrics,
        wall_time: start.elapsed(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub metrics: TunnelingMetrics,
    pub final_energy: f64,
}

/// Outcome for one drive frequency; failures carry the error text.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub epsilon: f64,
    pub outcome: std::result::Result<ScanPoint, String>,
}

impl ScanRecord {
    pub fn status(&self) -> &'static str {
        if self.outcome.is_ok() {
            "ok"
        } else {
            "failed"
        }
    }
}

/// `n` evenly spaced values from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..n)
            .map(|i| from + (to - from) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Runs `base` once per drive frequency on at most `jobs` worker threads, keeping the
/// input order. Individual failures are recorded, not propagated.
pub fn scan_epsilon(base: &RunConfig, epsilons: &[f64], jobs: usize) -> Result<Vec<ScanRecord>> {
    if epsilons.is_empty() {
        return Err(Error::config("epsilons", "scan needs at least one value"));
    }
    if let Some(bad) = epsilons.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
        return Err(Error::config("epsilons", format!("must be non-negative, got {bad}")));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::config("jobs", e.to_string()))?;

    let records = pool.install(|| {
        epsilons
            .par_iter()
            .map(|&epsilon| {
                let config = RunConfig {
                    epsilon,
                    snapshot_taus: Some(Vec::new()),
                    ..base.clone()
                };
                let outcome = run_simulation(&config)
                    .map(|r| ScanPoint {
                        metrics: r.metrics,
                        final_energy: r.last().map_or(f64::NAN, |s| s.energy_total),
                    })
                    .map_err(|e| e.to_string());
                ScanRecord { epsilon, outcome }
            })
            .collect()
    });
    Ok(records)
}
