//! Unitary time stepping for `i dpsi/dtau = -d^2 psi/dx^2 + u(x, tau) psi`.
//!
//! Two independent schemes are provided:
//!
//! * [`StepScheme::SplitStepFourier`]: Strang splitting with the kinetic factor applied
//!   exactly in Fourier space on the periodic grid.
//! * [`StepScheme::CrankNicolson`]: Cayley form of the three-point finite-difference
//!   Hamiltonian with Dirichlet ends, solved by a tridiagonal sweep.
//!
//! Both preserve the discrete norm up to round-off, so agreement between them is a
//! useful check on the time step and grid.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{SpatialGrid, WaveField};
use crate::potential::DrivePotential;

/// Steps at or above this size are rejected by [`propagate`].
pub const MAX_DTAU: f64 = 0.1;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Source of potential samples `u(x_j, tau)`.
pub trait PotentialProvider: Sync {
    /// Writes `u(x_j, tau)` for every node into `out`.
    fn sample_into(&self, grid: &SpatialGrid, tau: f64, out: &mut [f64]);

    /// True when the samples do not depend on `tau`; lets steppers reuse phase factors.
    fn is_static(&self) -> bool {
        false
    }

    fn sample(&self, grid: &SpatialGrid, tau: f64) -> Vec<f64> {
        let mut out = vec![0.0; grid.n_points()];
        self.sample_into(grid, tau, &mut out);
        out
    }
}

impl PotentialProvider for DrivePotential {
    fn sample_into(&self, grid: &SpatialGrid, tau: f64, out: &mut [f64]) {
        let (a, b, offset) = self.coefficients(tau);
        for (u, &x) in out.iter_mut().zip(grid.nodes()) {
            let x2 = x * x;
            *u = (a * x2 - b) * x2 + offset;
        }
    }

    fn is_static(&self) -> bool {
        self.period().is_none()
    }
}

/// `u = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeSpace;

impl PotentialProvider for FreeSpace {
    fn sample_into(&self, _grid: &SpatialGrid, _tau: f64, out: &mut [f64]) {
        out.fill(0.0);
    }

    fn is_static(&self) -> bool {
        true
    }
}

/// `u = stiffness * x^2`. With unit stiffness the ground state is `pi^(-1/4) exp(-x^2/2)`
/// with eigenvalue 1.
#[derive(Debug, Clone, Copy)]
pub struct Harmonic {
    pub stiffness: f64,
}

impl Default for Harmonic {
    fn default() -> Self {
        Self { stiffness: 1.0 }
    }
}

impl PotentialProvider for Harmonic {
    fn sample_into(&self, grid: &SpatialGrid, _tau: f64, out: &mut [f64]) {
        for (u, &x) in out.iter_mut().zip(grid.nodes()) {
            *u = self.stiffness * x * x;
        }
    }

    fn is_static(&self) -> bool {
        true
    }
}

impl<P: PotentialProvider + ?Sized> PotentialProvider for &P {
    fn sample_into(&self, grid: &SpatialGrid, tau: f64, out: &mut [f64]) {
        (**self).sample_into(grid, tau, out)
    }

    fn is_static(&self) -> bool {
        (**self).is_static()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum StepScheme {
    #[default]
    #[serde(rename = "split-step")]
    SplitStepFourier,
    #[serde(rename = "crank-nicolson")]
    CrankNicolson,
}

impl fmt::Display for StepScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepScheme::SplitStepFourier => "split-step",
            StepScheme::CrankNicolson => "crank-nicolson",
        })
    }
}

impl FromStr for StepScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "split-step" => Ok(StepScheme::SplitStepFourier),
            "crank-nicolson" => Ok(StepScheme::CrankNicolson),
            other => Err(Error::config(
                "scheme",
                format!("expected \"split-step\" or \"crank-nicolson\", got {other:?}"),
            )),
        }
    }
}

/// Key for cached phase factors: `(tau, dtau)` bit patterns.
type PhaseKey = (u64, u64);

fn phase_key(tau: f64, dtau: f64) -> PhaseKey {
    (tau.to_bits(), dtau.to_bits())
}

/// Strang split-step stepper with reusable FFT plans and scratch buffers.
pub struct SplitStepper {
    grid: SpatialGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    fft_scratch: Vec<Complex64>,
    k_squared: Vec<f64>,
    kinetic: Vec<Complex64>,
    kinetic_dtau: f64,
    u: Vec<f64>,
    phase_start: Vec<Complex64>,
    phase_end: Vec<Complex64>,
    end_key: Option<PhaseKey>,
}

impl SplitStepper {
    pub fn new(grid: &SpatialGrid) -> Self {
        let n = grid.n_points();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            grid: grid.clone(),
            forward,
            inverse,
            fft_scratch: vec![Complex64::default(); scratch_len],
            k_squared: grid.wavenumbers().iter().map(|k| k * k).collect(),
            kinetic: vec![Complex64::default(); n],
            kinetic_dtau: f64::NAN,
            u: vec![0.0; n],
            phase_start: vec![Complex64::default(); n],
            phase_end: vec![Complex64::default(); n],
            end_key: None,
        }
    }

    fn ensure_kinetic(&mut self, dtau: f64) {
        if self.kinetic_dtau.to_bits() == dtau.to_bits() {
            return;
        }
        // inverse transform is unnormalized; fold 1/n in here
        let scale = 1.0 / self.grid.n_points() as f64;
        for (p, &k2) in self.kinetic.iter_mut().zip(&self.k_squared) {
            *p = Complex64::from_polar(scale, -k2 * dtau);
        }
        self.kinetic_dtau = dtau;
    }

    fn fill_phase<P: PotentialProvider + ?Sized>(
        grid: &SpatialGrid,
        pot: &P,
        tau: f64,
        half_dtau: f64,
        u: &mut [f64],
        out: &mut [Complex64],
    ) {
        pot.sample_into(grid, tau, u);
        for (p, &v) in out.iter_mut().zip(u.iter()) {
            *p = Complex64::from_polar(1.0, -v * half_dtau);
        }
    }

    /// Advances `field` from `field.tau` to `tau_next` using step length `dtau` in every
    /// phase factor.
    pub fn advance<P: PotentialProvider + ?Sized>(
        &mut self,
        field: &mut WaveField,
        pot: &P,
        tau_next: f64,
        dtau: f64,
    ) -> Result<()> {
        let tau = field.tau;
        let half = 0.5 * dtau;
        let (start_key, end_key) = if pot.is_static() {
            (phase_key(0.0, dtau), phase_key(0.0, dtau))
        } else {
            (phase_key(tau, dtau), phase_key(tau_next, dtau))
        };

        if self.end_key == Some(start_key) {
            std::mem::swap(&mut self.phase_start, &mut self.phase_end);
        } else {
            Self::fill_phase(&self.grid, pot, tau, half, &mut self.u, &mut self.phase_start);
        }
        if start_key == end_key {
            self.phase_end.copy_from_slice(&self.phase_start);
        } else {
            Self::fill_phase(&self.grid, pot, tau_next, half, &mut self.u, &mut self.phase_end);
        }
        self.end_key = Some(end_key);
        self.ensure_kinetic(dtau);

        let psi = &mut field.amplitudes;
        for (c, p) in psi.iter_mut().zip(&self.phase_start) {
            *c *= p;
        }
        self.forward.process_with_scratch(psi, &mut self.fft_scratch);
        for (c, p) in psi.iter_mut().zip(&self.kinetic) {
            *c *= p;
        }
        self.inverse.process_with_scratch(psi, &mut self.fft_scratch);
        for (c, p) in psi.iter_mut().zip(&self.phase_end) {
            *c *= p;
        }
        field.tau = tau_next;

        if !field.all_finite() {
            return Err(Error::Numerical {
                tau: tau_next,
                reason: "split-step produced non-finite amplitudes".into(),
            });
        }
        Ok(())
    }
}

/// Crank-Nicolson stepper on the three-point Laplacian with `psi = 0` beyond the ends.
pub struct CrankNicolsonStepper {
    grid: SpatialGrid,
    u: Vec<f64>,
    rhs: Vec<Complex64>,
    c_prime: Vec<Complex64>,
}

impl CrankNicolsonStepper {
    pub fn new(grid: &SpatialGrid) -> Self {
        let n = grid.n_points();
        Self {
            grid: grid.clone(),
            u: vec![0.0; n],
            rhs: vec![Complex64::default(); n],
            c_prime: vec![Complex64::default(); n],
        }
    }

    /// Solves `(1 + i H dtau/2) psi' = (1 - i H dtau/2) psi` with `u` taken at the step
    /// midpoint.
    pub fn advance<P: PotentialProvider + ?Sized>(
        &mut self,
        field: &mut WaveField,
        pot: &P,
        tau_next: f64,
        dtau: f64,
    ) -> Result<()> {
        let n = self.grid.n_points();
        let dx = self.grid.dx();
        pot.sample_into(&self.grid, field.tau + 0.5 * dtau, &mut self.u);

        let r = dtau / (2.0 * dx * dx);
        let half = 0.5 * dtau;
        let psi = &mut field.amplitudes;

        // right-hand side (1 - i H dtau/2) psi
        for j in 0..n {
            let left = if j > 0 { psi[j - 1] } else { Complex64::default() };
            let right = if j + 1 < n { psi[j + 1] } else { Complex64::default() };
            let diag = 2.0 * r + half * self.u[j];
            self.rhs[j] = psi[j] * Complex64::new(1.0, -diag) + I * r * (left + right);
        }

        // Thomas sweep; off-diagonals are all -i r
        let off = Complex64::new(0.0, -r);
        let mut prev_c = Complex64::default();
        let mut prev_d = Complex64::default();
        for j in 0..n {
            let diag = Complex64::new(1.0, 2.0 * r + half * self.u[j]);
            let pivot = diag - off * prev_c;
            if !(pivot.norm_sqr() > 0.0 && pivot.re.is_finite() && pivot.im.is_finite()) {
                return Err(Error::Numerical {
                    tau: field.tau,
                    reason: format!("tridiagonal pivot {pivot} at row {j}"),
                });
            }
            let inv = pivot.inv();
            prev_c = off * inv;
            prev_d = (self.rhs[j] - off * prev_d) * inv;
            self.c_prime[j] = prev_c;
            self.rhs[j] = prev_d;
        }
        psi[n - 1] = self.rhs[n - 1];
        for j in (0..n - 1).rev() {
            psi[j] = self.rhs[j] - self.c_prime[j] * psi[j + 1];
        }
        field.tau = tau_next;

        if !field.all_finite() {
            return Err(Error::Numerical {
                tau: tau_next,
                reason: "Crank-Nicolson produced non-finite amplitudes".into(),
            });
        }
        Ok(())
    }
}

enum Stepper {
    Split(Box<SplitStepper>),
    CrankNicolson(CrankNicolsonStepper),
}

/// A stepper bound to one grid and scheme, reused across calls.
pub struct Propagator {
    scheme: StepScheme,
    stepper: Stepper,
}

impl Propagator {
    pub fn new(grid: &SpatialGrid, scheme: StepScheme) -> Self {
        let stepper = match scheme {
            StepScheme::SplitStepFourier => Stepper::Split(Box::new(SplitStepper::new(grid))),
            StepScheme::CrankNicolson => Stepper::CrankNicolson(CrankNicolsonStepper::new(grid)),
        };
        Self { scheme, stepper }
    }

    pub fn scheme(&self) -> StepScheme {
        self.scheme
    }

    fn advance<P: PotentialProvider + ?Sized>(
        &mut self,
        field: &mut WaveField,
        pot: &P,
        tau_next: f64,
        dtau: f64,
    ) -> Result<()> {
        match &mut self.stepper {
            Stepper::Split(s) => s.advance(field, pot, tau_next, dtau),
            Stepper::CrankNicolson(s) => s.advance(field, pot, tau_next, dtau),
        }
    }

    /// One step of length `dtau` from `field.tau`.
    pub fn step<P: PotentialProvider + ?Sized>(
        &mut self,
        field: &mut WaveField,
        pot: &P,
        dtau: f64,
    ) -> Result<()> {
        check_dtau(dtau, f64::INFINITY)?;
        let next = field.tau + dtau;
        self.advance(field, pot, next, dtau)
    }

    /// Steps from `field.tau` to exactly `tau_end`. Step times are `tau0 + k dtau`; the
    /// last step is shortened so the field lands on `tau_end`.
    pub fn advance_to<P: PotentialProvider + ?Sized>(
        &mut self,
        field: &mut WaveField,
        pot: &P,
        tau_end: f64,
        dtau: f64,
    ) -> Result<()> {
        check_dtau(dtau, f64::INFINITY)?;
        let tau0 = field.tau;
        if tau_end < tau0 {
            return Err(Error::Domain(format!(
                "cannot propagate backwards from {tau0} to {tau_end}"
            )));
        }
        let span = tau_end - tau0;
        if span == 0.0 {
            return Ok(());
        }
        let steps = (span / dtau - 1e-9).ceil().max(1.0) as u64;
        for k in 1..steps {
            self.advance(field, pot, tau0 + k as f64 * dtau, dtau)?;
        }
        let remaining = tau_end - field.tau;
        let last = if (remaining - dtau).abs() <= 1e-9 * dtau {
            dtau
        } else {
            remaining
        };
        self.advance(field, pot, tau_end, last)
    }
}

fn check_dtau(dtau: f64, max: f64) -> Result<()> {
    if !(dtau.is_finite() && dtau > 0.0) {
        return Err(Error::config("dtau", format!("must be positive, got {dtau}")));
    }
    if dtau >= max {
        return Err(Error::config("dtau", format!("must be below {max}, got {dtau}")));
    }
    Ok(())
}

/// One Strang split-step of length `dtau` starting at `field.tau`.
pub fn split_step<P: PotentialProvider + ?Sized>(
    field: &WaveField,
    grid: &SpatialGrid,
    pot: &P,
    dtau: f64,
) -> Result<WaveField> {
    let mut out = field.clone();
    Propagator::new(grid, StepScheme::SplitStepFourier).step(&mut out, pot, dtau)?;
    Ok(out)
}

/// One Crank-Nicolson step of length `dtau` starting at `field.tau`.
pub fn crank_nicolson_step<P: PotentialProvider + ?Sized>(
    field: &WaveField,
    grid: &SpatialGrid,
    pot: &P,
    dtau: f64,
) -> Result<WaveField> {
    let mut out = field.clone();
    Propagator::new(grid, StepScheme::CrankNicolson).step(&mut out, pot, dtau)?;
    Ok(out)
}

/// Integrates `field` to `tau_end`.
///
/// With `cadence = Some(c)` the observer sees the field at `tau0`, `tau0 + c`, ... and at
/// `tau_end`; `c` must be a whole number of steps. With `None` it sees only the start and
/// end states.
#[allow(clippy::too_many_arguments)]
pub fn propagate<P, F>(
    mut field: WaveField,
    grid: &SpatialGrid,
    pot: &P,
    scheme: StepScheme,
    tau_end: f64,
    dtau: f64,
    cadence: Option<f64>,
    mut observer: F,
) -> Result<WaveField>
where
    P: PotentialProvider + ?Sized,
    F: FnMut(&WaveField),
{
    check_dtau(dtau, MAX_DTAU)?;
    if field.len() != grid.n_points() {
        return Err(Error::Domain(format!(
            "field has {} amplitudes, grid has {} nodes",
            field.len(),
            grid.n_points()
        )));
    }
    if tau_end < field.tau {
        return Err(Error::Domain(format!(
            "tau_end {tau_end} precedes field time {}",
            field.tau
        )));
    }
    if let Some(c) = cadence {
        check_cadence(c, dtau)?;
    }

    observer(&field);
    if tau_end == field.tau {
        return Ok(field);
    }

    let mut prop = Propagator::new(grid, scheme);
    let tau0 = field.tau;
    match cadence {
        Some(c) => {
            let mut i = 1u64;
            loop {
                let target = (tau0 + i as f64 * c).min(tau_end);
                prop.advance_to(&mut field, pot, target, dtau)?;
                observer(&field);
                if target >= tau_end {
                    break;
                }
                i += 1;
            }
        }
        None => {
            prop.advance_to(&mut field, pot, tau_end, dtau)?;
            observer(&field);
        }
    }
    Ok(field)
}

/// Checks that `cadence` is a positive whole multiple of `dtau`.
pub fn check_cadence(cadence: f64, dtau: f64) -> Result<()> {
    if !(cadence.is_finite() && cadence >= dtau) {
        return Err(Error::config(
            "record_stride_tau",
            format!("must be at least dtau = {dtau}, got {cadence}"),
        ));
    }
    let ratio = cadence / dtau;
    if (ratio - ratio.round()).abs() > 1e-9 * ratio {
        return Err(Error::config(
            "record_stride_tau",
            format!("must be a whole number of steps of {dtau}, got {cadence}"),
        ));
    }
    Ok(())
}
