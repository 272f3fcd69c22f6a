//! Biquadratic double well whose minima breathe in time at constant barrier height.
//!
//! ```text
//! c(tau) = alpha - beta cos(epsilon tau)
//! a(tau) = c / (2 sqrt(alpha)),  b(tau) = sqrt(c) / (2 sqrt(alpha))
//! u(x, tau) = a x^4 - b x^2 + b^2 / (4 a)
//! ```
//!
//! The offset `b^2 / 4a = 1 / (8 sqrt(alpha))` puts both well bottoms at zero and the
//! barrier top at the same height for all `tau`.

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;

/// Parameters of the driven double well, in units of the zero-point energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivePotential {
    alpha: f64,
    beta: f64,
    epsilon: f64,
}

impl DrivePotential {
    /// Requires `alpha > 0`, `0 <= beta < alpha`, `epsilon >= 0`.
    pub fn new(alpha: f64, beta: f64, epsilon: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::config("alpha", format!("must be positive, got {alpha}")));
        }
        if !(beta.is_finite() && beta >= 0.0 && beta < alpha) {
            return Err(Error::config(
                "beta",
                format!("must satisfy 0 <= beta < alpha = {alpha}, got {beta}"),
            ));
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::config("epsilon", format!("must be non-negative, got {epsilon}")));
        }
        Ok(Self {
            alpha,
            beta,
            epsilon,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn drive(&self, tau: f64) -> f64 {
        self.alpha - self.beta * (self.epsilon * tau).cos()
    }

    pub fn coeff_a(&self, tau: f64) -> f64 {
        self.drive(tau) / (2.0 * self.alpha.sqrt())
    }

    pub fn coeff_b(&self, tau: f64) -> f64 {
        self.drive(tau).sqrt() / (2.0 * self.alpha.sqrt())
    }

    /// `(a, b, offset)` at `tau`, with the offset in its closed form.
    pub fn coefficients(&self, tau: f64) -> (f64, f64, f64) {
        (self.coeff_a(tau), self.coeff_b(tau), self.barrier_height())
    }

    pub fn value(&self, x: f64, tau: f64) -> f64 {
        let (a, b, offset) = self.coefficients(tau);
        let x2 = x * x;
        (a * x2 - b) * x2 + offset
    }

    /// `1 / (8 sqrt(alpha))`, independent of `tau`.
    pub fn barrier_height(&self) -> f64 {
        1.0 / (8.0 * self.alpha.sqrt())
    }

    /// Positions `(-x_m, +x_m)` of the two minima, `x_m = sqrt(b / 2a)`.
    pub fn well_minima(&self, tau: f64) -> (f64, f64) {
        let xm = (self.coeff_b(tau) / (2.0 * self.coeff_a(tau))).sqrt();
        (-xm, xm)
    }

    /// Second derivative at a well bottom, `4 b(tau)`.
    pub fn well_curvature(&self, tau: f64) -> f64 {
        4.0 * self.coeff_b(tau)
    }

    /// Drive period `2 pi / epsilon`, or `None` for the static well.
    pub fn period(&self) -> Option<f64> {
        (self.epsilon > 0.0 && self.beta > 0.0).then(|| 2.0 * std::f64::consts::PI / self.epsilon)
    }

    pub fn sample(&self, grid: &SpatialGrid, tau: f64) -> Vec<f64> {
        grid.nodes().iter().map(|&x| self.value(x, tau)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn paper() -> DrivePotential {
        DrivePotential::new(0.0005, 0.0001, 2.0).unwrap()
    }

    #[test]
    fn coefficient_values() {
        let p = paper();
        assert_relative_eq!(p.coeff_a(0.0), 0.00894427190999916, max_relative = 1e-12);
        assert_relative_eq!(p.coeff_b(0.0), 0.4472135954999579, max_relative = 1e-12);
        // cos(2 tau) = -1
        let t = PI / 2.0;
        assert_relative_eq!(p.coeff_a(t), 0.01341640786499874, max_relative = 1e-12);
        assert_relative_eq!(p.coeff_b(t), 0.5477225575051661, max_relative = 1e-12);

        let s = DrivePotential::new(0.0005, 0.0, 2.0).unwrap();
        for tau in [0.0, 1.3, 77.0] {
            assert_relative_eq!(s.coeff_a(tau), 0.0005_f64.sqrt() / 2.0, max_relative = 1e-14);
            assert_relative_eq!(s.coeff_b(tau), 0.5, max_relative = 1e-14);
        }
    }

    #[test]
    fn potential_values() {
        let p = paper();
        assert_relative_eq!(p.value(0.0, 0.0), 5.590169943749474, max_relative = 1e-12);
        assert!(p.value(5.0, 0.0).abs() < 1e-12);
        assert_relative_eq!(p.value(10.0, 0.0), 50.31152949374527, max_relative = 1e-10);
    }

    #[test]
    fn barrier() {
        assert_relative_eq!(paper().barrier_height(), 5.590169943749474, max_relative = 1e-12);
        assert!((paper().barrier_height() - 5.590).abs() < 1e-3);
        assert_relative_eq!(DrivePotential::new(1.0 / 64.0, 0.0, 0.0).unwrap().barrier_height(), 1.0);
        let s = DrivePotential::new(0.0005, 0.0, 1.7).unwrap();
        assert_eq!(s.barrier_height(), paper().barrier_height());
    }

    #[test]
    fn minima() {
        let (l, r) = paper().well_minima(0.0);
        assert_relative_eq!(r, 5.0, max_relative = 1e-12);
        assert_eq!(l, -r);
        let s = DrivePotential::new(0.0005, 0.0, 0.0).unwrap();
        assert_relative_eq!(s.well_minima(3.0).1, 0.002_f64.powf(-0.25), max_relative = 1e-12);
        assert!((s.well_minima(3.0).1 - 4.72871).abs() < 1e-5);
        let (_, r) = paper().well_minima(PI / 2.0);
        assert_relative_eq!(r, 0.0006_f64.powf(-0.25) / 2.0_f64.sqrt(), max_relative = 1e-12);
        assert!((r - 4.51801).abs() < 1e-5);
    }

    #[test]
    fn rejects_invalid() {
        assert!(matches!(DrivePotential::new(0.0, 0.0, 0.0), Err(Error::Config { key, .. }) if key == "alpha"));
        assert!(matches!(DrivePotential::new(1e-3, 1e-3, 0.0), Err(Error::Config { key, .. }) if key == "beta"));
        assert!(DrivePotential::new(1e-3, -1e-4, 0.0).is_err());
        assert!(DrivePotential::new(1e-3, 1e-4, -1.0).is_err());
    }

    #[test]
    fn sampled_on_grid() {
        let p = paper();
        let g = SpatialGrid::new(16.0, 2048).unwrap();
        let u = p.sample(&g, 0.0);
        assert_eq!(u.len(), 2048);
        let curv = 2.0 * p.coeff_b(0.0);
        let dx = g.dx();
        let mid = u[g.nearest_index(0.0)];
        assert!((mid - 5.59017).abs() <= curv * dx * dx / 2.0 + 1e-5);
        let min = u.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min >= 0.0 && min <= p.well_curvature(0.0) * dx * dx);
        // node j pairs with node n - j about x = 0
        for j in 1..2048 {
            assert_relative_eq!(u[j], u[2048 - j], max_relative = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn barrier_is_constant(alpha in 1e-5..1.0f64, frac in 0.0..0.99f64, eps in 0.0..5.0f64, tau in -1e3..1e3f64) {
            let p = DrivePotential::new(alpha, frac * alpha, eps).unwrap();
            let h = p.barrier_height();
            let (a, b, _) = p.coefficients(tau);
            prop_assert!((b * b / (4.0 * a) - h).abs() <= 1e-12 * h);
            prop_assert!((p.value(0.0, tau) - h).abs() <= 1e-12 * h);
            let (l, r) = p.well_minima(tau);
            prop_assert!(p.value(l, tau).abs() < 1e-10 * h.max(1.0));
            prop_assert!(p.value(r, tau).abs() < 1e-10 * h.max(1.0));
        }

        #[test]
        fn even_and_periodic(frac in 0.0..0.9f64, eps in 0.1..5.0f64, tau in 0.0..100.0f64, x in -10.0..10.0f64) {
            let p = DrivePotential::new(0.0005, frac * 0.0005, eps).unwrap();
            let u = p.value(x, tau);
            prop_assert!((u - p.value(-x, tau)).abs() <= 1e-12 * u.abs().max(1.0));
            let shifted = p.value(x, tau + 2.0 * PI / eps);
            prop_assert!((u - shifted).abs() <= 1e-12 * u.abs().max(1.0));
            prop_assert!(u >= -1e-12);
        }

        #[test]
        fn static_well_is_time_independent(eps in 0.0..5.0f64, tau in 0.0..1e3f64, x in -10.0..10.0f64) {
            let p = DrivePotential::new(0.0005, 0.0, eps).unwrap();
            prop_assert_eq!(p.value(x, tau), p.value(x, 0.0));
            prop_assert!((p.well_minima(tau).1 - 0.002f64.powf(-0.25)).abs() < 1e-12);
        }
    }
}
