//! File formats: JSON configuration, CSV results and SVG line charts.

mod config;
pub mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub use config::{parse_config, to_json};

use crate::error::{Error, Result};
use crate::experiment::{RunRecord, ScanRecord};
use crate::grid::{SpatialGrid, WaveField};
use crate::propagator::PotentialProvider;

pub const TIMESERIES_HEADER: &str =
    "tau,norm,prob_left,prob_right,mean_x,energy_total,energy_potential,barrier_height";
pub const SCAN_HEADER: &str =
    "epsilon,max_prob_right,first_passage_tau,transfer_cycles,final_energy,status";
pub const SNAPSHOT_HEADER: &str = "x,re_psi,im_psi,prob_density,potential";

/// Formats `v` with 12 significant digits; scientific notation below `1e-4` or at and
/// above `1e6` in magnitude.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_owned();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let a = v.abs();
    if !(1e-4..1e6).contains(&a) {
        return format!("{v:.11e}");
    }
    let exponent = a.log10().floor() as i32;
    let decimals = (11 - exponent).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Domain(format!("{} has no file name", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn push_row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format_number(*v));
    }
    out.push('\n');
}

pub fn timeseries_csv(record: &RunRecord) -> String {
    let h = record.barrier_height();
    let mut out = String::with_capacity(128 * (record.samples.len() + 1));
    out.push_str(TIMESERIES_HEADER);
    out.push('\n');
    for s in &record.samples {
        push_row(
            &mut out,
            &[
                s.tau,
                s.norm,
                s.prob_left,
                s.prob_right,
                s.mean_x,
                s.energy_total,
                s.energy_potential,
                h,
            ],
        );
    }
    out
}

pub fn write_timeseries(record: &RunRecord, path: &Path) -> Result<()> {
    write_atomic(path, timeseries_csv(record).as_bytes())
}

pub fn scan_csv(records: &[ScanRecord]) -> String {
    let mut out = String::new();
    out.push_str(SCAN_HEADER);
    out.push('\n');
    for r in records {
        let eps = format_number(r.epsilon);
        match &r.outcome {
            Ok(p) => {
                let fp = p.metrics.first_passage_tau.map(format_number).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{eps},{},{fp},{},{},ok",
                    format_number(p.metrics.max_prob_right),
                    p.metrics.transfer_cycles,
                    format_number(p.final_energy)
                );
            }
            Err(_) => {
                let _ = writeln!(out, "{eps},,,,,failed");
            }
        }
    }
    out
}

pub fn write_scan(records: &[ScanRecord], path: &Path) -> Result<()> {
    write_atomic(path, scan_csv(records).as_bytes())
}

pub fn snapshot_csv<P: PotentialProvider + ?Sized>(
    field: &WaveField,
    grid: &SpatialGrid,
    pot: &P,
    tau: f64,
) -> String {
    let u = pot.sample(grid, tau);
    let mut out = String::with_capacity(96 * (grid.n_points() + 1));
    out.push_str(SNAPSHOT_HEADER);
    out.push('\n');
    for ((c, &x), u) in field.amplitudes.iter().zip(grid.nodes()).zip(u) {
        push_row(&mut out, &[x, c.re, c.im, c.norm_sqr(), u]);
    }
    out
}

pub fn write_snapshot<P: PotentialProvider + ?Sized>(
    field: &WaveField,
    grid: &SpatialGrid,
    pot: &P,
    tau: f64,
    path: &Path,
) -> Result<()> {
    write_atomic(path, snapshot_csv(field, grid, pot, tau).as_bytes())
}

/// File name used for a snapshot taken at `tau`.
pub fn snapshot_file_name(tau: f64) -> String {
    format!("snapshot_tau_{tau:010.3}.csv")
}

/// A CSV file loaded as named numeric columns. Empty cells read as NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn parse(text: &str) -> std::result::Result<Self, csv::Error> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        let mut columns = vec![Vec::new(); headers.len()];
        for row in reader.records() {
            let row = row?;
            for (col, cell) in columns.iter_mut().zip(row.iter()) {
                col.push(cell.trim().parse().unwrap_or(f64::NAN));
            }
        }
        Ok(Self { headers, columns })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|source| Error::Csv {
            path: path.to_owned(),
            source,
        })
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.headers
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| Error::MissingColumn(name.to_owned()))
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

/// Paths written by a `run` or `scan` invocation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputBundle {
    pub dir: PathBuf,
    pub timeseries_path: Option<PathBuf>,
    pub scan_path: Option<PathBuf>,
    pub snapshot_paths: Vec<PathBuf>,
    pub plot_paths: Vec<PathBuf>,
}

impl OutputBundle {
    /// Prepares `dir`. A non-empty existing directory is only reused with `force`.
    pub fn create(dir: &Path, force: bool) -> Result<Self> {
        if dir.exists() {
            let mut entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
            if entries.next().is_some() && !force {
                return Err(Error::config(
                    "out",
                    format!("{} is not empty; pass --force to overwrite", dir.display()),
                ));
            }
        } else {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        Ok(Self {
            dir: dir.to_owned(),
            ..Self::default()
        })
    }

    /// A path inside the bundle directory. Only bare file names are accepted.
    pub fn path(&self, file_name: &str) -> PathBuf {
        debug_assert!(!file_name.contains(['/', '\\']));
        self.dir.join(file_name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{run_simulation, GridConfig, RunConfig, ScanPoint};
    use crate::grid::gaussian_packet;
    use crate::observables::TunnelingMetrics;
    use crate::potential::DrivePotential;
    use proptest::prelude::*;

    fn tiny_record(tau_max: f64) -> RunRecord {
        run_simulation(&RunConfig {
            tau_max,
            dtau: 0.005,
            grid: GridConfig {
                x_max: 16.0,
                n_points: 128,
            },
            snapshot_taus: Some(vec![]),
            ..RunConfig::production(2.0)
        })
        .unwrap()
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(5.590169943749474), "5.59016994375");
        assert_eq!(format_number(-2500.0), "-2500");
        assert_eq!(format_number(7.687298972140174e-13), "7.68729897214e-13");
        assert_eq!(format_number(1.5e6), "1.50000000000e6");
        assert_eq!(format_number(0.0001), "0.0001");
    }

    #[test]
    fn timeseries_rows() {
        let mut r = tiny_record(1.0);
        assert_eq!(r.samples.len(), 3);
        let text = timeseries_csv(&r);
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().next().unwrap(), TIMESERIES_HEADER);
        let t = Table::parse(&text).unwrap();
        for (s, back) in r.samples.iter().zip(t.column("prob_left").unwrap()) {
            assert!((s.prob_left - back).abs() <= 1e-12 * s.prob_left.abs().max(1e-300));
        }
        assert_eq!(t.column("barrier_height").unwrap()[0], 5.59016994375);

        r.samples.clear();
        assert_eq!(timeseries_csv(&r), format!("{TIMESERIES_HEADER}\n"));
    }

    #[test]
    fn scan_rows() {
        let ok = ScanRecord {
            epsilon: 1.7,
            outcome: Ok(ScanPoint {
                metrics: TunnelingMetrics {
                    max_prob_right: 0.98,
                    first_passage_tau: None,
                    transfer_cycles: 0,
                },
                final_energy: 0.95,
            }),
        };
        let failed = ScanRecord {
            epsilon: 2.0,
            outcome: Err("boom".into()),
        };
        let text = scan_csv(&[ok, failed]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SCAN_HEADER);
        assert_eq!(lines[1], "1.7,0.98,,0,0.95,ok");
        assert_eq!(lines[2], "2,,,,,failed");
    }

    #[test]
    fn snapshot_rows() {
        let g = SpatialGrid::new(16.0, 2048).unwrap();
        let pot = DrivePotential::new(0.0005, 0.0001, 2.0).unwrap();
        let psi = gaussian_packet(&g, -5.0, 1.0).unwrap();
        let t = Table::parse(&snapshot_csv(&psi, &g, &pot, 0.0)).unwrap();
        assert_eq!(t.headers.join(","), SNAPSHOT_HEADER);
        assert_eq!(t.n_rows(), 2048);
        let rho = t.column("prob_density").unwrap();
        let peak = rho.iter().cloned().fold(0.0, f64::max);
        assert!((peak - std::f64::consts::PI.powf(-0.5)).abs() < 1e-9);
        assert!((t.column("potential").unwrap()[1024] - 5.59017).abs() < 1e-5);
    }

    #[test]
    fn atomic_write_and_bundle_guard() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        let bundle = OutputBundle::create(&out, false).unwrap();
        write_atomic(&bundle.path("a.csv"), b"x\n1\n").unwrap();
        assert_eq!(fs::read_to_string(out.join("a.csv")).unwrap(), "x\n1\n");
        assert_eq!(fs::read_dir(&out).unwrap().count(), 1);
        assert!(matches!(OutputBundle::create(&out, false), Err(Error::Config { .. })));
        assert!(OutputBundle::create(&out, true).is_ok());
        let missing = Table::read(&out.join("nope.csv"));
        assert!(matches!(missing, Err(Error::Io { .. })));
    }

    #[test]
    fn snapshot_names() {
        assert_eq!(snapshot_file_name(0.0), "snapshot_tau_000000.000.csv");
        assert_eq!(snapshot_file_name(1875.0), "snapshot_tau_001875.000.csv");
    }

    proptest! {
        #[test]
        fn twelve_digit_round_trip(v in prop_oneof![-1e9..1e9f64, -1e-3..1e-3f64, -1e-12..1e-12f64]) {
            let back: f64 = format_number(v).parse().unwrap();
            if v != 0.0 {
                prop_assert!(((back - v) / v).abs() <= 5e-12, "{} -> {}", v, back);
            }
        }
    }
}
