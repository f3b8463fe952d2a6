//! Command-line driver for the verification pipeline.
//!
//! Exit codes: 0 all checks pass, 1 check failure, 2 usage/config error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wcl::config::RunConfig;
use wcl::pipeline;
use wcl::verifier::VerificationReport;
use wcl::WclError;

#[derive(Parser)]
#[command(
    name = "wcl",
    version,
    about = "Wrinkled-front contact isotopies: trace and certify exact Lagrangian cobordisms"
)]
struct Cli {
    /// Flat key = value configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides config and WCL_OUT).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Seed for probe directions and noise.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Override a named tolerance, e.g. --tol-override ends=1e-3.
    #[arg(long = "tol-override", global = true, value_name = "KEY=VAL")]
    tol_override: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and certify every condition.
    Verify,
    /// Trace the cobordism mesh and export it as text.
    Trace,
    /// Emit SVG figures (front slices, region diagrams).
    Render,
    /// Sweep one parameter and report the consolidated table.
    Sweep {
        /// One of: g_cap | eps | delta | mesh.
        #[arg(long)]
        parameter: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Parse a report file, validate it, and exit by its pass flag.
    Report { path: PathBuf },
}

fn load_config(cli: &Cli) -> Result<RunConfig, WclError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let body = std::fs::read_to_string(path)?;
        cfg.apply_file(&body)?;
    }
    if let Ok(dir) = std::env::var("WCL_OUT") {
        if !dir.is_empty() {
            cfg.out_dir = PathBuf::from(dir);
        }
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        cfg.jobs = jobs;
    }
    for spec in &cli.tol_override {
        let (key, value) = spec.split_once('=').ok_or_else(|| {
            WclError::Config(format!("--tol-override expects KEY=VAL, got {spec}"))
        })?;
        cfg.override_tolerance(key.trim(), value.trim())?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_report(report: &VerificationReport) {
    for e in &report.entries {
        println!(
            "[{}] {} residual={} tol={}",
            if e.pass { "PASS" } else { "FAIL" },
            e.name,
            wcl::util::fmt_f64(e.residual),
            wcl::util::fmt_f64(e.tolerance)
        );
    }
    println!(
        "summary: {} ({} checks, {} failures)",
        if report.all_pass() { "PASS" } else { "FAIL" },
        report.entries.len(),
        report.failures()
    );
}

fn cmd_verify(cfg: &RunConfig) -> Result<bool, WclError> {
    let report = pipeline::run_verify(cfg)?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join("report.txt");
    std::fs::write(&path, report.serialize())?;
    print_report(&report);
    println!("report written to {}", path.display());
    Ok(report.all_pass())
}

fn cmd_trace(cfg: &RunConfig) -> Result<(), WclError> {
    let (mesh, text) = pipeline::run_trace(cfg)?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join("mesh.txt");
    std::fs::write(&path, text)?;
    println!(
        "traced {}x{}x{} mesh ({} truncated nodes) to {}",
        mesh.nu(),
        mesh.nx(),
        mesh.nv(),
        mesh.truncated_count(),
        path.display()
    );
    Ok(())
}

fn cmd_render(cfg: &RunConfig) -> Result<(), WclError> {
    let figures = pipeline::run_render(cfg)?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    for (name, svg) in &figures {
        let path = cfg.out_dir.join(name);
        std::fs::write(&path, svg)?;
        println!("wrote {}", path.display());
    }
    println!("{} figures", figures.len());
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, parameter: &str, values: &[f64]) -> Result<(), WclError> {
    let table = pipeline::run_sweep(cfg, parameter, values)?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join(format!("sweep_{parameter}.txt"));
    std::fs::write(&path, &table)?;
    print!("{table}");
    println!("table written to {}", path.display());
    Ok(())
}

fn cmd_report(path: &PathBuf) -> Result<bool, WclError> {
    let body = std::fs::read_to_string(path)?;
    let report = VerificationReport::parse(&body)?;
    // Round-trip integrity.
    let again = VerificationReport::parse(&report.serialize())?;
    if again.serialize() != report.serialize() {
        return Err(WclError::Config("report does not round-trip".into()));
    }
    print_report(&report);
    Ok(report.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<bool, WclError> = (|| match &cli.command {
        Command::Verify => {
            let cfg = load_config(&cli)?;
            cmd_verify(&cfg)
        }
        Command::Trace => {
            let cfg = load_config(&cli)?;
            cmd_trace(&cfg)?;
            Ok(true)
        }
        Command::Render => {
            let cfg = load_config(&cli)?;
            cmd_render(&cfg)?;
            Ok(true)
        }
        Command::Sweep { parameter, values } => {
            let cfg = load_config(&cli)?;
            cmd_sweep(&cfg, parameter, values)?;
            Ok(true)
        }
        Command::Report { path } => cmd_report(path),
    })();
    match result {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
