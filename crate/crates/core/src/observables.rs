//! Well occupations, mean coordinate, energies and tunneling metrics.
//!
//! Energies are in units of the zero-point energy. The left and right wells are the
//! half-lines `x < 0` and `x > 0`; the barrier top sits at `x = 0` for every `tau`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{norm, SpatialGrid, WaveField};
use crate::propagator::PotentialProvider;

/// Occupation threshold that counts as "in the right well".
pub const UP_THRESHOLD: f64 = 0.5;
/// Occupation the right well must drop below before another transfer is counted.
pub const REARM_THRESHOLD: f64 = 0.4;

fn split_weights(field: &WaveField, grid: &SpatialGrid) -> (f64, f64) {
    let mut left = 0.0;
    let mut right = 0.0;
    for (c, &x) in field.amplitudes.iter().zip(grid.nodes()) {
        let p = c.norm_sqr();
        if x < 0.0 {
            left += p;
        } else if x > 0.0 {
            right += p;
        } else {
            left += 0.5 * p;
            right += 0.5 * p;
        }
    }
    (left * grid.dx(), right * grid.dx())
}

/// Probability on `x < 0`; a node exactly at the origin contributes half.
pub fn prob_left(field: &WaveField, grid: &SpatialGrid) -> f64 {
    split_weights(field, grid).0
}

/// Probability on `x > 0`; a node exactly at the origin contributes half.
pub fn prob_right(field: &WaveField, grid: &SpatialGrid) -> f64 {
    split_weights(field, grid).1
}

/// `<x>` normalized by the field's own norm.
pub fn mean_position(field: &WaveField, grid: &SpatialGrid) -> Result<f64> {
    let n = norm(field, grid);
    if !(n > 0.0) {
        return Err(Error::Domain("mean position of a zero field".into()));
    }
    let first: f64 = field
        .amplitudes
        .iter()
        .zip(grid.nodes())
        .map(|(c, x)| x * c.norm_sqr())
        .sum::<f64>()
        * grid.dx();
    Ok(first / n)
}

/// Spectral `d/dx` on the periodic grid.
pub struct SpectralDerivative {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    ik: Vec<Complex64>,
}

impl SpectralDerivative {
    pub fn new(grid: &SpatialGrid) -> Self {
        let n = grid.n_points();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        let scale = 1.0 / n as f64;
        let mut ik: Vec<Complex64> = grid
            .wavenumbers()
            .into_iter()
            .map(|k| Complex64::new(0.0, k * scale))
            .collect();
        // the Nyquist mode has no odd partner; drop it so real fields stay real
        ik[n / 2] = Complex64::default();
        Self {
            forward,
            inverse,
            scratch: vec![Complex64::default(); len],
            ik,
        }
    }

    /// Writes `d psi / dx` into `out`.
    pub fn apply(&mut self, psi: &[Complex64], out: &mut Vec<Complex64>) {
        out.clear();
        out.extend_from_slice(psi);
        self.forward.process_with_scratch(out, &mut self.scratch);
        for (c, m) in out.iter_mut().zip(&self.ik) {
            *c *= m;
        }
        self.inverse.process_with_scratch(out, &mut self.scratch);
    }
}

/// One row of a run's time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableSample {
    pub tau: f64,
    pub norm: f64,
    pub prob_left: f64,
    pub prob_right: f64,
    pub mean_x: f64,
    pub energy_total: f64,
    pub energy_potential: f64,
}

/// Reusable measurement workspace for one grid.
pub struct Meter {
    grid: SpatialGrid,
    deriv: SpectralDerivative,
    dpsi: Vec<Complex64>,
    u: Vec<f64>,
}

impl Meter {
    pub fn new(grid: &SpatialGrid) -> Self {
        Self {
            grid: grid.clone(),
            deriv: SpectralDerivative::new(grid),
            dpsi: Vec::with_capacity(grid.n_points()),
            u: vec![0.0; grid.n_points()],
        }
    }

    /// `w_j = |dpsi/dx|^2 + u_j |psi_j|^2`.
    pub fn energy_density<P: PotentialProvider + ?Sized>(
        &mut self,
        field: &WaveField,
        pot: &P,
        tau: f64,
    ) -> Vec<f64> {
        self.deriv.apply(&field.amplitudes, &mut self.dpsi);
        pot.sample_into(&self.grid, tau, &mut self.u);
        self.dpsi
            .iter()
            .zip(&field.amplitudes)
            .zip(&self.u)
            .map(|((d, c), u)| d.norm_sqr() + u * c.norm_sqr())
            .collect()
    }

    /// Returns `(total, potential)` energy.
    pub fn energies<P: PotentialProvider + ?Sized>(
        &mut self,
        field: &WaveField,
        pot: &P,
        tau: f64,
    ) -> (f64, f64) {
        let w = self.energy_density(field, pot, tau);
        let dx = self.grid.dx();
        let total = w.iter().sum::<f64>() * dx;
        let potential = field
            .amplitudes
            .iter()
            .zip(&self.u)
            .map(|(c, u)| u * c.norm_sqr())
            .sum::<f64>()
            * dx;
        (total, potential)
    }

    /// All observables at `field.tau`.
    pub fn measure<P: PotentialProvider + ?Sized>(
        &mut self,
        field: &WaveField,
        pot: &P,
    ) -> Result<ObservableSample> {
        let (energy_total, energy_potential) = self.energies(field, pot, field.tau);
        let (prob_left, prob_right) = split_weights(field, &self.grid);
        Ok(ObservableSample {
            tau: field.tau,
            norm: norm(field, &self.grid),
            prob_left,
            prob_right,
            mean_x: mean_position(field, &self.grid)?,
            energy_total,
            energy_potential,
        })
    }
}

pub fn energy_density<P: PotentialProvider + ?Sized>(
    field: &WaveField,
    grid: &SpatialGrid,
    pot: &P,
    tau: f64,
) -> Vec<f64> {
    Meter::new(grid).energy_density(field, pot, tau)
}

/// Rectangle-rule integral of [`energy_density`].
pub fn total_energy<P: PotentialProvider + ?Sized>(
    field: &WaveField,
    grid: &SpatialGrid,
    pot: &P,
    tau: f64,
) -> f64 {
    energy_density(field, grid, pot, tau).iter().sum::<f64>() * grid.dx()
}

/// `sum_j u_j |psi_j|^2 dx`.
pub fn potential_energy<P: PotentialProvider + ?Sized>(
    field: &WaveField,
    grid: &SpatialGrid,
    pot: &P,
    tau: f64,
) -> f64 {
    let u = pot.sample(grid, tau);
    field
        .amplitudes
        .iter()
        .zip(&u)
        .map(|(c, u)| u * c.norm_sqr())
        .sum::<f64>()
        * grid.dx()
}

fn check_sorted(series: &[(f64, f64)]) -> Result<()> {
    match series.windows(2).position(|w| !(w[0].0 <= w[1].0)) {
        Some(i) => Err(Error::Domain(format!(
            "series not sorted by tau at index {}: {} then {}",
            i + 1,
            series[i].0,
            series[i + 1].0
        ))),
        None => Ok(()),
    }
}

/// Counts rises of the right-well occupation through `up`, re-armed only after it
/// drops below `rearm`.
pub fn count_transfer_cycles(series: &[(f64, f64)], up: f64, rearm: f64) -> Result<u32> {
    if !(0.0 < rearm && rearm < up && up < 1.0) {
        return Err(Error::Domain(format!(
            "thresholds must satisfy 0 < rearm < up < 1, got rearm = {rearm}, up = {up}"
        )));
    }
    check_sorted(series)?;
    let mut armed = true;
    let mut cycles = 0;
    for &(_, p) in series {
        if armed && p >= up {
            cycles += 1;
            armed = false;
        } else if !armed && p < rearm {
            armed = true;
        }
    }
    Ok(cycles)
}

/// Earliest `tau` with occupation at or above `threshold`.
pub fn first_passage_time(series: &[(f64, f64)], threshold: f64) -> Option<f64> {
    series.iter().find(|(_, p)| *p >= threshold).map(|(t, _)| *t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunnelingMetrics {
    pub max_prob_right: f64,
    pub first_passage_tau: Option<f64>,
    pub transfer_cycles: u32,
}

impl TunnelingMetrics {
    /// Metrics of a `(tau, prob_right)` series with the default thresholds.
    pub fn from_series(series: &[(f64, f64)]) -> Result<Self> {
        let transfer_cycles = count_transfer_cycles(series, UP_THRESHOLD, REARM_THRESHOLD)?;
        let max_prob_right = series.iter().map(|s| s.1).fold(0.0, f64::max);
        Ok(Self {
            max_prob_right,
            first_passage_tau: first_passage_time(series, UP_THRESHOLD),
            transfer_cycles,
        })
    }

    pub fn from_samples(samples: &[ObservableSample]) -> Result<Self> {
        let series: Vec<_> = samples.iter().map(|s| (s.tau, s.prob_right)).collect();
        Self::from_series(&series)
    }
}
