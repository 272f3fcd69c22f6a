//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line straight to stdout so the
//! verdicts show up even when libtest captures output.
//!
//! The long runs (tau up to 2500 on the 2048-point grid) are computed once and shared.

use std::io::Write;
use std::sync::OnceLock;

use tunnelsim::experiment::{run_simulation, RunConfig, RunRecord};
use tunnelsim::grid::{gaussian_packet, SpatialGrid, WaveField};
use tunnelsim::observables::{prob_left, TunnelingMetrics};
use tunnelsim::propagator::{propagate, FreeSpace, Harmonic};
use tunnelsim::{DrivePotential, StepScheme};

fn report(id: u32, name: &str, verdict: &str, detail: &str) {
    let line = format!("[acceptance] AC{id:02} {verdict} {name}: {detail}\n");
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn check(id: u32, name: &str, pass: bool, detail: String) {
    report(id, name, if pass { "PASS" } else { "FAIL" }, &detail);
    assert!(pass, "AC{id:02} {name}: {detail}");
}

struct Production {
    stationary: RunRecord,
    eps20: RunRecord,
    eps17: RunRecord,
    eps20_fine: RunRecord,
    eps17_fine: RunRecord,
}

fn production() -> &'static Production {
    static RUNS: OnceLock<Production> = OnceLock::new();
    RUNS.get_or_init(|| {
        let fine = |eps: f64| RunConfig {
            dtau: 0.001,
            snapshot_taus: Some(vec![]),
            ..RunConfig::production(eps)
        };
        let coarse = |eps: f64| RunConfig {
            snapshot_taus: Some(vec![]),
            ..RunConfig::production(eps)
        };
        let configs = [coarse(0.0), coarse(2.0), coarse(1.7), fine(2.0), fine(1.7)];
        let mut runs: Vec<RunRecord> = std::thread::scope(|s| {
            let handles: Vec<_> = configs
                .iter()
                .map(|c| s.spawn(move || run_simulation(c).expect("production run")))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let eps17_fine = runs.pop().unwrap();
        let eps20_fine = runs.pop().unwrap();
        let eps17 = runs.pop().unwrap();
        let eps20 = runs.pop().unwrap();
        let stationary = runs.pop().unwrap();
        Production {
            stationary,
            eps20,
            eps17,
            eps20_fine,
            eps17_fine,
        }
    })
}

fn paper_potential() -> DrivePotential {
    DrivePotential::new(0.0005, 0.0001, 2.0).unwrap()
}

#[test]
fn ac01_barrier_height() {
    let h = paper_potential().barrier_height();
    check(1, "barrier height", (h - 5.590).abs() <= 1e-3, format!("h_b = {h:.6} (target 5.590 +- 0.001)"));
}

#[test]
fn ac02_well_geometry() {
    let (l, r) = paper_potential().well_minima(0.0);
    let (_, r0) = DrivePotential::new(0.0005, 0.0, 0.0).unwrap().well_minima(0.0);
    let pass = (r - 5.0).abs() <= 1e-4 && (l + 5.0).abs() <= 1e-4 && (r0 - 4.7287).abs() <= 1e-4;
    check(
        2,
        "well geometry",
        pass,
        format!("minima at tau=0: ({l:.6}, {r:.6}); beta=0: +-{r0:.6} (targets +-5.0000, +-4.7287, tol 1e-4)"),
    );
}

#[test]
fn ac03_stationary_regime() {
    let r = &production().stationary;
    let min_left = r.min_prob_left();
    let drift = r.norm_drift();
    let de = r.relative_energy_drift();
    let pass = min_left >= 0.95 && drift <= 1e-6 && de <= 1e-3;
    check(
        3,
        "stationary regime, epsilon = 0",
        pass,
        format!(
            "min prob_left = {min_left:.6} (>= 0.95), norm drift = {drift:.2e} (<= 1e-6), rel. energy drift = {de:.2e} (<= 1e-3), wall {:.0} s",
            r.wall_time.as_secs_f64()
        ),
    );
}

#[test]
fn ac04_driven_regime_eps_2_0() {
    let r = &production().eps20;
    let m = r.metrics;
    let first = m.first_passage_tau;
    let returned = first.is_some_and(|t0| {
        r.samples.iter().any(|s| s.tau > t0 && s.prob_left > 0.5)
    });
    let pass = m.max_prob_right >= 0.5 && returned;
    check(
        4,
        "driven regime, epsilon = 2.0",
        pass,
        format!(
            "max prob_right = {:.4}, first passage tau = {first:?}, returns to left well = {returned}, cycles = {}",
            m.max_prob_right, m.transfer_cycles
        ),
    );
}

#[test]
fn ac05_faster_transfer_at_eps_1_7() {
    let p = production();
    let c17 = p.eps17.metrics.transfer_cycles;
    let c20 = p.eps20.metrics.transfer_cycles;
    let soft = (4..=10).contains(&c17);
    report(
        5,
        "soft target, reported only",
        if soft { "MET " } else { "MISS" },
        &format!("transfer_cycles(1.7) = {c17}, target range [4, 10]"),
    );
    check(
        5,
        "epsilon = 1.7 transfers more than epsilon = 2.0",
        c17 > c20,
        format!("transfer_cycles(1.7) = {c17} > transfer_cycles(2.0) = {c20}"),
    );
}

#[test]
fn ac06_initial_state_energies() {
    let s = production().eps20.samples[0];
    // closed-form Gaussian moments: <x^2> = 25.5, <x^4> = 700.75, kinetic 1/2
    let (a, b, h) = paper_potential().coefficients(0.0);
    let oracle = a * 700.75 - b * 25.5 + h;
    let pass = (s.energy_potential - 0.4539).abs() <= 2e-3
        && (s.energy_total - 0.954).abs() <= 2e-3
        && (s.energy_potential - oracle).abs() <= 1e-6;
    check(
        6,
        "initial-state energies",
        pass,
        format!(
            "energy_potential = {:.6} (0.4539 +- 0.002, moments {oracle:.6}), energy_total = {:.6} (0.954 +- 0.002)",
            s.energy_potential, s.energy_total
        ),
    );
}

fn variance(field: &WaveField, grid: &SpatialGrid) -> f64 {
    let rho = field.density();
    let w: f64 = rho.iter().sum();
    let mean = rho.iter().zip(grid.nodes()).map(|(p, x)| p * x).sum::<f64>() / w;
    rho.iter()
        .zip(grid.nodes())
        .map(|(p, x)| p * (x - mean).powi(2))
        .sum::<f64>()
        / w
}

#[test]
fn ac07_analytic_propagator_oracles() {
    let g = SpatialGrid::new(16.0, 2048).unwrap();
    let psi0 = gaussian_packet(&g, 0.0, 1.0).unwrap();
    // free spreading of |psi|^2: (s^4 + 4 tau^2) / (2 s^2) with s = 1, tau = 0.5
    let expect = 1.0;
    let var_ss = variance(
        &propagate(psi0.clone(), &g, &FreeSpace, StepScheme::SplitStepFourier, 0.5, 0.002, None, |_| {}).unwrap(),
        &g,
    );
    let var_cn = variance(
        &propagate(psi0.clone(), &g, &FreeSpace, StepScheme::CrankNicolson, 0.5, 0.002, None, |_| {}).unwrap(),
        &g,
    );
    let rel_ss = (var_ss - expect).abs() / expect;
    let rel_cn = (var_cn - expect).abs() / expect;

    let out = propagate(psi0.clone(), &g, &Harmonic::default(), StepScheme::SplitStepFourier, 10.0, 0.002, None, |_| {}).unwrap();
    let overlap = psi0.inner(&out, &g);
    let phase_err = (overlap * num_complex::Complex64::from_polar(1.0, 10.0)).arg().abs();

    let pass = rel_ss <= 1e-3 && rel_cn <= 1e-2 && overlap.norm() >= 1.0 - 1e-6 && phase_err <= 1e-4;
    check(
        7,
        "analytic propagator oracles",
        pass,
        format!(
            "free variance rel. err split-step {rel_ss:.2e} (<= 1e-3), CN {rel_cn:.2e} (<= 1e-2); harmonic |overlap| = {:.10} (>= 1 - 1e-6), phase err vs e^(-i tau) {phase_err:.2e}",
            overlap.norm()
        ),
    );
}

#[test]
fn ac08_cross_method_agreement() {
    let base = RunConfig {
        tau_max: 50.0,
        snapshot_taus: Some(vec![]),
        ..RunConfig::production(2.0)
    };
    let ss = run_simulation(&base).unwrap();
    let cn = run_simulation(&RunConfig {
        scheme: StepScheme::CrankNicolson,
        ..base
    })
    .unwrap();
    let max_diff = ss
        .samples
        .iter()
        .zip(&cn.samples)
        .map(|(a, b)| (a.prob_left - b.prob_left).abs())
        .fold(0.0, f64::max);
    check(
        8,
        "split-step vs Crank-Nicolson, epsilon = 2.0, tau <= 50",
        max_diff <= 5e-3 && ss.samples.len() == cn.samples.len(),
        format!("max |d prob_left| = {max_diff:.2e} (<= 5e-3)"),
    );
}

#[test]
fn ac09_time_step_convergence() {
    let p = production();
    let mut pass = true;
    let mut parts = Vec::new();
    for (eps, coarse, fine) in [(2.0, &p.eps20, &p.eps20_fine), (1.7, &p.eps17, &p.eps17_fine)] {
        let dp = (coarse.last().unwrap().prob_left - fine.last().unwrap().prob_left).abs();
        let (cc, cf) = (coarse.metrics.transfer_cycles, fine.metrics.transfer_cycles);
        pass &= dp <= 5e-3 && cc == cf;
        parts.push(format!("eps {eps}: |d prob_left(2500)| = {dp:.2e} (<= 5e-3), cycles {cc} vs {cf}"));
    }
    check(9, "halving dtau", pass, parts.join("; "));
}

#[test]
fn ac10_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        tau_max: 250.0,
        snapshot_taus: Some(vec![]),
        ..RunConfig::production(2.0)
    };
    let cfg_path = dir.path().join("c.json");
    std::fs::write(&cfg_path, tunnelsim::io::to_json(&config)).unwrap();
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let code = tunnelsim::cli::main([
            "tunnelsim",
            "run",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        outputs.push(std::fs::read(out.join("timeseries.csv")).unwrap());
    }
    check(
        10,
        "determinism",
        outputs[0] == outputs[1] && !outputs[0].is_empty(),
        format!("two CLI runs, {} bytes each, byte-identical = {}", outputs[0].len(), outputs[0] == outputs[1]),
    );
}

#[test]
fn production_metrics_are_consistent() {
    // the stationary run never crosses
    let p = production();
    let series: Vec<(f64, f64)> = p.stationary.samples.iter().map(|s| (s.tau, s.prob_right)).collect();
    assert_eq!(TunnelingMetrics::from_series(&series).unwrap(), p.stationary.metrics);
    assert_eq!(p.stationary.metrics.transfer_cycles, 0);
    assert!(p.stationary.metrics.first_passage_tau.is_none());
    let g = SpatialGrid::new(16.0, 2048).unwrap();
    let psi = gaussian_packet(&g, -5.0, 1.0).unwrap();
    assert!((prob_left(&psi, &g) - p.eps20.samples[0].prob_left).abs() < 1e-15);
}
