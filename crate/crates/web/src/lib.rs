//! WebAssembly bindings for the single-page demo in `www/`.
//!
//! Three interactive pieces are exposed: the potential shape at any drive phase, a live
//! simulation that the page advances frame by frame, and a coarse sweep over the drive
//! frequency. Charts come back as SVG strings built by the core crate.

use tunnelsim::experiment::{run_simulation, GridConfig, RunConfig};
use tunnelsim::grid::{gaussian_packet, SpatialGrid, WaveField};
use tunnelsim::io::svg::LineChart;
use tunnelsim::observables::{Meter, TunnelingMetrics};
use tunnelsim::{DrivePotential, Propagator, StepScheme};
use wasm_bindgen::prelude::*;

fn js_err(e: tunnelsim::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Potential and the initial probability density at drive phase `tau`.
#[wasm_bindgen]
pub fn potential_svg(alpha: f64, beta: f64, epsilon: f64, tau: f64, x_max: f64) -> Result<String, JsError> {
    potential_chart(alpha, beta, epsilon, tau, x_max).map_err(js_err)
}

fn potential_chart(alpha: f64, beta: f64, epsilon: f64, tau: f64, x_max: f64) -> tunnelsim::Result<String> {
    let pot = DrivePotential::new(alpha, beta, epsilon)?;
    let grid = SpatialGrid::new(x_max, 512)?;
    let (left, _) = pot.well_minima(0.0);
    let psi = gaussian_packet(&grid, left, 1.0)?;
    // scale the density so it is visible against the barrier
    let scale = pot.barrier_height();
    let density = psi.density().iter().map(|p| p * scale).collect();
    let barrier = vec![pot.barrier_height(); grid.n_points()];
    Ok(LineChart::new("x", grid.nodes().to_vec())
        .title(format!("u(x, tau = {tau:.2})"))
        .series("u", pot.sample(&grid, tau))
        .series("barrier height", barrier)
        .series("|psi(x, 0)|^2 (scaled)", density)
        .to_svg())
}

/// Closed-form numbers shown next to the potential plot: `[a, b, barrier, x_min]`.
#[wasm_bindgen]
pub fn potential_summary(alpha: f64, beta: f64, epsilon: f64, tau: f64) -> Result<Vec<f64>, JsError> {
    let p = DrivePotential::new(alpha, beta, epsilon).map_err(js_err)?;
    Ok(vec![p.coeff_a(tau), p.coeff_b(tau), p.barrier_height(), p.well_minima(tau).1])
}

/// A simulation the page steps forward in small chunks.
#[wasm_bindgen]
pub struct Simulation {
    grid: SpatialGrid,
    pot: DrivePotential,
    field: WaveField,
    prop: Propagator,
    meter: Meter,
    dtau: f64,
    history: Vec<(f64, f64, f64)>,
}

#[wasm_bindgen]
impl Simulation {
    #[wasm_bindgen(constructor)]
    pub fn new(alpha: f64, beta: f64, epsilon: f64, n_points: usize, dtau: f64) -> Result<Simulation, JsError> {
        Self::build(alpha, beta, epsilon, n_points, dtau).map_err(js_err)
    }

    fn build(alpha: f64, beta: f64, epsilon: f64, n_points: usize, dtau: f64) -> tunnelsim::Result<Self> {
        let pot = DrivePotential::new(alpha, beta, epsilon)?;
        let grid = SpatialGrid::new(16.0, n_points)?;
        if !(dtau > 0.0 && dtau < tunnelsim::propagator::MAX_DTAU) {
            return Err(tunnelsim::Error::Domain(format!("dtau must lie in (0, 0.1), got {dtau}")));
        }
        let field = gaussian_packet(&grid, pot.well_minima(0.0).0, 1.0)?;
        let mut sim = Self {
            prop: Propagator::new(&grid, StepScheme::SplitStepFourier),
            meter: Meter::new(&grid),
            grid,
            pot,
            field,
            dtau,
            history: Vec::new(),
        };
        sim.record()?;
        Ok(sim)
    }

    fn record(&mut self) -> tunnelsim::Result<()> {
        let s = self.meter.measure(&self.field, &self.pot)?;
        self.history.push((s.tau, s.prob_right, s.energy_total));
        Ok(())
    }

    /// Propagates by `span` and records one history point.
    pub fn advance(&mut self, span: f64) -> Result<(), JsError> {
        let target = self.field.tau + span;
        self.prop
            .advance_to(&mut self.field, &self.pot, target, self.dtau)
            .and_then(|_| self.record())
            .map_err(js_err)
    }

    pub fn tau(&self) -> f64 {
        self.field.tau
    }

    pub fn prob_right(&self) -> f64 {
        self.history.last().map_or(0.0, |h| h.1)
    }

    pub fn energy(&self) -> f64 {
        self.history.last().map_or(0.0, |h| h.2)
    }

    pub fn transfer_cycles(&self) -> u32 {
        let series: Vec<(f64, f64)> = self.history.iter().map(|h| (h.0, h.1)).collect();
        TunnelingMetrics::from_series(&series).map_or(0, |m| m.transfer_cycles)
    }

    pub fn nodes(&self) -> Vec<f64> {
        self.grid.nodes().to_vec()
    }

    pub fn density(&self) -> Vec<f64> {
        self.field.density()
    }

    pub fn potential(&self) -> Vec<f64> {
        self.pot.sample(&self.grid, self.field.tau)
    }

    /// Current density over the instantaneous potential.
    pub fn field_svg(&self) -> String {
        let scale = self.pot.barrier_height() / 0.6;
        let density = self.field.density().iter().map(|p| p * scale).collect();
        let u = self
            .potential()
            .into_iter()
            .map(|v| v.min(2.0 * self.pot.barrier_height()))
            .collect();
        LineChart::new("x", self.nodes())
            .title(format!("tau = {:.1}", self.field.tau))
            .series("u(x, tau)", u)
            .series("|psi|^2 (scaled)", density)
            .to_svg()
    }

    /// Right-well occupation recorded so far.
    pub fn history_svg(&self) -> String {
        let tau = self.history.iter().map(|h| h.0).collect();
        let right: Vec<f64> = self.history.iter().map(|h| h.1).collect();
        let left = right.iter().map(|p| 1.0 - p).collect();
        LineChart::new("tau", tau)
            .title("well occupation")
            .series("prob_left", left)
            .series("prob_right", right)
            .to_svg()
    }
}

/// Coarse sweep over the drive frequency on a reduced grid: transfer cycles and peak
/// right-well occupation per epsilon.
#[wasm_bindgen]
pub fn scan_svg(alpha: f64, beta: f64, eps_from: f64, eps_to: f64, steps: usize, tau_max: f64) -> Result<String, JsError> {
    scan_chart(alpha, beta, eps_from, eps_to, steps, tau_max).map_err(js_err)
}

fn scan_chart(alpha: f64, beta: f64, eps_from: f64, eps_to: f64, steps: usize, tau_max: f64) -> tunnelsim::Result<String> {
    let epsilons = tunnelsim::experiment::linspace(eps_from, eps_to, steps);
    let mut cycles = Vec::with_capacity(epsilons.len());
    let mut peak = Vec::with_capacity(epsilons.len());
    for &epsilon in &epsilons {
        let config = RunConfig {
            alpha,
            beta,
            epsilon,
            tau_max,
            dtau: 0.005,
            grid: GridConfig {
                x_max: 16.0,
                n_points: 512,
            },
            snapshot_taus: Some(Vec::new()),
            ..RunConfig::production(epsilon)
        };
        let record = run_simulation(&config)?;
        cycles.push(record.metrics.transfer_cycles as f64);
        peak.push(record.metrics.max_prob_right);
    }
    Ok(LineChart::new("epsilon", epsilons)
        .title(format!("drive-frequency sweep, tau <= {tau_max}"))
        .series("transfer cycles", cycles)
        .series("max prob_right", peak)
        .to_svg())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_plot_has_three_curves() {
        let svg = potential_chart(0.0005, 0.0001, 2.0, 0.0, 16.0).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(potential_chart(0.0005, 0.0005, 2.0, 0.0, 16.0).is_err());
    }

    #[test]
    fn live_simulation_advances() {
        let mut sim = Simulation::build(0.0005, 0.0001, 2.0, 256, 0.005).unwrap();
        sim.advance(1.0).unwrap();
        sim.advance(1.0).unwrap();
        assert!((sim.tau() - 2.0).abs() < 1e-12);
        assert_eq!(sim.history.len(), 3);
        assert_eq!(sim.density().len(), 256);
        assert!(sim.prob_right() < 0.5);
        assert_eq!(sim.transfer_cycles(), 0);
        assert!(sim.field_svg().contains("<polyline"));
        assert_eq!(sim.history_svg().matches("<polyline").count(), 2);
        assert!(Simulation::build(0.0005, 0.0001, 2.0, 256, 0.5).is_err());
    }

    #[test]
    fn small_scan() {
        let svg = scan_chart(0.0005, 0.0001, 1.5, 2.0, 2, 5.0).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
    }
}
