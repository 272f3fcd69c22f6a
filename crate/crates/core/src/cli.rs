//! Command-line front end: `run`, `scan`, `plot` and `validate`.
//!
//! Exit status is 0 on success, 1 on usage or validation errors and 2 when the time
//! stepper fails numerically.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiment::{linspace, run_simulation, scan_epsilon, RunConfig, RunRecord};
use crate::io::svg::{chart_from_table, render_plot, LineChart};
use crate::io::{self, OutputBundle, Table};

#[derive(Debug, Parser)]
#[command(name = "tunnelsim", version, about = "Wave-packet tunneling in a driven double well")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one simulation and write time series, snapshots and plots.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overwrite a non-empty output directory.
        #[arg(long)]
        force: bool,
    },
    /// Sweep the drive frequency and write scan.csv.
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        eps_from: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        eps_to: Option<f64>,
        #[arg(long)]
        eps_steps: Option<usize>,
        /// Explicit comma-separated list, instead of a range.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["eps_from", "eps_to", "eps_steps"])]
        eps: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        force: bool,
    },
    /// Draw columns of a CSV file against its first column as SVG.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        columns: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse and check a configuration file.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    io::parse_config(&text)
}

fn write_run(record: &RunRecord, bundle: &mut OutputBundle) -> Result<()> {
    let grid = record.config.spatial_grid()?;
    let pot = record.config.potential()?;

    let ts = bundle.path("timeseries.csv");
    io::write_timeseries(record, &ts)?;
    bundle.timeseries_path = Some(ts.clone());

    for snap in &record.snapshots {
        let path = bundle.path(&io::snapshot_file_name(snap.tau));
        io::write_snapshot(&snap.field, &grid, &pot, snap.tau, &path)?;
        bundle.snapshot_paths.push(path);
    }

    let table = Table::read(&ts)?;
    let plots: [(&str, &[&str]); 3] = [
        ("occupation.svg", &["prob_left", "prob_right"]),
        ("mean_x.svg", &["mean_x"]),
        ("energy.svg", &["energy_total", "energy_potential", "barrier_height"]),
    ];
    for (name, columns) in plots {
        let path = bundle.path(name);
        let svg = chart_from_table(&table, columns)?.title(name.trim_end_matches(".svg")).to_svg();
        io::write_atomic(&path, svg.as_bytes())?;
        bundle.plot_paths.push(path);
    }
    io::write_atomic(&bundle.path("config.json"), io::to_json(&record.config).as_bytes())?;
    Ok(())
}

fn run(config: &Path, out: &Path, force: bool) -> Result<()> {
    let config = load_config(config)?;
    let mut bundle = OutputBundle::create(out, force)?;
    let record = run_simulation(&config)?;
    write_run(&record, &mut bundle)?;

    let m = &record.metrics;
    println!("epsilon            {}", config.epsilon);
    println!("samples            {}", record.samples.len());
    println!("max prob_right     {:.6}", m.max_prob_right);
    match m.first_passage_tau {
        Some(t) => println!("first passage tau  {t}"),
        None => println!("first passage tau  -"),
    }
    println!("transfer cycles    {}", m.transfer_cycles);
    println!("min prob_left      {:.6}", record.min_prob_left());
    println!("max |norm - 1|     {:.3e}", record.norm_drift());
    println!("max rel. dE        {:.3e}", record.relative_energy_drift());
    println!("wall time          {:.1} s", record.wall_time.as_secs_f64());
    println!("output             {}", bundle.dir.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn scan(
    config: &Path,
    eps_from: Option<f64>,
    eps_to: Option<f64>,
    eps_steps: Option<usize>,
    eps: Vec<f64>,
    out: &Path,
    jobs: usize,
    force: bool,
) -> Result<()> {
    let base = load_config(config)?;
    let epsilons = if eps.is_empty() {
        match (eps_from, eps_to, eps_steps) {
            (Some(a), Some(b), Some(n)) => linspace(a, b, n),
            _ => {
                return Err(Error::config(
                    "eps",
                    "give --eps-from, --eps-to and --eps-steps, or --eps",
                ))
            }
        }
    } else {
        eps
    };
    let mut bundle = OutputBundle::create(out, force)?;
    let records = scan_epsilon(&base, &epsilons, jobs)?;
    let path = bundle.path("scan.csv");
    io::write_scan(&records, &path)?;
    bundle.scan_path = Some(path.clone());

    let table = Table::read(&path)?;
    let chart = LineChart::new("epsilon", table.column("epsilon")?.to_vec())
        .title("transfer cycles vs drive frequency")
        .series("transfer_cycles", table.column("transfer_cycles")?.to_vec());
    let plot = bundle.path("scan.svg");
    io::write_atomic(&plot, chart.to_svg().as_bytes())?;
    bundle.plot_paths.push(plot);

    for r in &records {
        match &r.outcome {
            Ok(p) => println!(
                "epsilon {:<8} cycles {:<3} max prob_right {:.4}",
                r.epsilon, p.metrics.transfer_cycles, p.metrics.max_prob_right
            ),
            Err(e) => println!("epsilon {:<8} failed: {e}", r.epsilon),
        }
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run { config, out, force } => run(&config, &out, force),
        Command::Scan {
            config,
            eps_from,
            eps_to,
            eps_steps,
            eps,
            out,
            jobs,
            force,
        } => scan(&config, eps_from, eps_to, eps_steps, eps, &out, jobs, force),
        Command::Plot { csv, columns, out } => {
            let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
            render_plot(&csv, &cols, &out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Validate { config } => {
            let c = load_config(&config)?;
            println!(
                "ok: alpha {} beta {} epsilon {} tau_max {} dtau {} grid {}x{} scheme {}",
                c.alpha, c.beta, c.epsilon, c.tau_max, c.dtau, c.grid.n_points, c.grid.x_max, c.scheme
            );
            Ok(())
        }
    }
}

/// Parses `argv` (program name first) and runs the command. Returns the exit status.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
