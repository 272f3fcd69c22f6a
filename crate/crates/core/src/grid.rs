//! Uniform periodic grid in dimensionless coordinates and the wave fields that live on it.
//!
//! Lengths are measured in units of the oscillator length `xi = sqrt(hbar / (m omega0))`.
//! The domain is `[-x_max, x_max)`; the node at `+x_max` is the periodic image of node 0.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest accepted node count.
pub const MIN_POINTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    x_max: f64,
    dx: f64,
    nodes: Vec<f64>,
}

impl SpatialGrid {
    /// Builds the grid `x_j = -x_max + j dx`, `dx = 2 x_max / n_points`.
    ///
    /// `n_points` must be a power of two so the kinetic step can use a radix-2 transform.
    pub fn new(x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(Error::config("grid.x_max", format!("must be positive, got {x_max}")));
        }
        if n_points < MIN_POINTS || !n_points.is_power_of_two() {
            return Err(Error::config(
                "grid.n_points",
                format!("must be a power of two >= {MIN_POINTS}, got {n_points}"),
            ));
        }
        let dx = 2.0 * x_max / n_points as f64;
        let nodes = (0..n_points).map(|j| -x_max + j as f64 * dx).collect();
        Ok(Self { x_max, dx, nodes })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.nodes.len()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Index of the node closest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        let j = ((x + self.x_max) / self.dx).round();
        (j.max(0.0) as usize).min(self.n_points() - 1)
    }

    /// Angular wavenumbers in discrete-Fourier order: `0, 1, .., n/2-1, -n/2, .., -1`
    /// times `pi / x_max`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points() as i64;
        let dk = PI / self.x_max;
        (0..n)
            .map(|m| if m < n / 2 { m } else { m - n })
            .map(|m| m as f64 * dk)
            .collect()
    }
}

/// Samples of `psi(x, tau)` on a [`SpatialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub amplitudes: Vec<Complex64>,
    pub tau: f64,
}

impl WaveField {
    pub fn new(amplitudes: Vec<Complex64>, tau: f64) -> Self {
        Self { amplitudes, tau }
    }

    pub fn zeros(grid: &SpatialGrid) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); grid.n_points()], 0.0)
    }

    /// Evaluates `f` at every node.
    pub fn from_fn(grid: &SpatialGrid, tau: f64, f: impl Fn(f64) -> Complex64) -> Self {
        Self::new(grid.nodes().iter().map(|&x| f(x)).collect(), tau)
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.amplitudes.iter().map(|c| c * factor).collect(), self.tau)
    }

    /// Complex conjugate, the time-reversed state.
    pub fn conj(&self) -> Self {
        Self::new(self.amplitudes.iter().map(|c| c.conj()).collect(), self.tau)
    }

    /// `<self|other>` with rectangle-rule weights.
    pub fn inner(&self, other: &WaveField, grid: &SpatialGrid) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * grid.dx()
    }

    /// `|psi_j|^2` per node.
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.amplitudes.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// `sum_j |psi_j|^2 dx`.
pub fn norm(field: &WaveField, grid: &SpatialGrid) -> f64 {
    field.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.dx()
}

/// Rescales `field` to unit norm, keeping relative phases.
pub fn normalize(field: &WaveField, grid: &SpatialGrid) -> Result<WaveField> {
    let n = norm(field, grid);
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::Domain(format!("cannot normalize a field with norm {n}")));
    }
    Ok(field.scaled(n.sqrt().recip()))
}

/// Gaussian packet `pi^(-1/4) width^(-1/2) exp(-(x - center)^2 / (2 width^2))`,
/// renormalized on the grid and stamped `tau = 0`.
///
/// With `width = 1` and `center` at a well minimum this is the initial state of the
/// tunneling runs.
pub fn gaussian_packet(grid: &SpatialGrid, center: f64, width: f64) -> Result<WaveField> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::Domain(format!("packet width must be positive, got {width}")));
    }
    if !(center.abs() + 4.0 * width < grid.x_max()) {
        return Err(Error::Domain(format!(
            "packet at {center} with width {width} does not fit inside [-{x}, {x})",
            x = grid.x_max()
        )));
    }
    let prefactor = PI.powf(-0.25) / width.sqrt();
    let field = WaveField::from_fn(grid, 0.0, |x| {
        let z = (x - center) / width;
        Complex64::new(prefactor * (-0.5 * z * z).exp(), 0.0)
    });
    normalize(&field, grid)
}

/// Unit system of the dimensional equation. Lengths scale by `xi`, times by `2 / omega0`
/// and energies by the zero-point energy `hbar omega0 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalScales {
    pub hbar: f64,
    pub mass: f64,
    pub omega0: f64,
    pub xi: f64,
    pub period: f64,
    pub zero_point_energy: f64,
}

impl PhysicalScales {
    pub fn new(hbar: f64, mass: f64, omega0: f64) -> Result<Self> {
        for (key, v) in [("hbar", hbar), ("mass", mass), ("omega0", omega0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        Ok(Self {
            hbar,
            mass,
            omega0,
            xi: (hbar / (mass * omega0)).sqrt(),
            period: 2.0 * PI / omega0,
            zero_point_energy: 0.5 * hbar * omega0,
        })
    }

    /// `hbar = m = omega0 = 1`.
    pub fn natural() -> Self {
        Self::new(1.0, 1.0, 1.0).expect("unit scales are valid")
    }

    /// Ground-state position spread of the harmonic oscillator, `xi / sqrt(2)`.
    pub fn zero_point_spread(&self) -> f64 {
        self.xi / std::f64::consts::SQRT_2
    }

    /// `x = x_tilde * xi`.
    pub fn physical_length(&self, x_tilde: f64) -> f64 {
        x_tilde * self.xi
    }

    /// `t = 2 tau / omega0`.
    pub fn physical_time(&self, tau: f64) -> f64 {
        2.0 * tau / self.omega0
    }

    pub fn physical_energy(&self, e_tilde: f64) -> f64 {
        e_tilde * self.zero_point_energy
    }
}
