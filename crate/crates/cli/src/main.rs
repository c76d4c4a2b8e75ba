use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use lamehardy_core::geometry::{ShapeDescriptor, SurfaceMesh};
use lamehardy_core::harness::{converge, decompose_file, run_suite, RunConfig, Suite, SuiteReport};
use lamehardy_core::poly::{make_test_solution, SolutionKind};
use lamehardy_core::LipschitzJet;

const THREADS_VAR: &str = "LAMEHARDY_THREADS";

#[derive(Parser)]
#[command(
    name = "lamehardy",
    version,
    about = "Verification harness for Lamé–Navier boundary operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one check suite, or `all`, and write a JSON report.
    Verify {
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a jet file into its interior and exterior Hardy parts.
    Decompose {
        #[arg(long)]
        jet: PathBuf,
        #[arg(long)]
        out_prefix: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Refinement study of one suite over several mesh levels.
    Converge {
        #[arg(long)]
        suite: String,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<u32>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a catalogued field on the unit sphere and save it as a jet file.
    MakeJet {
        /// constant, coordinate, monogenic_linear, universal_quadratic,
        /// translated_cauchy_kernel or random_poly:<degree>:<seed>
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        level: u32,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    lambda: f64,
    #[arg(long, default_value_t = 3)]
    level: u32,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Volume grid resolution for the Borel–Pompeiu checks.
    #[arg(long)]
    resolution: Option<usize>,
    /// Record wall-clock seconds per check. Reports are then no longer reproducible byte for byte.
    #[arg(long)]
    timings: bool,
}

impl RunArgs {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let mut config = RunConfig::new(
            self.m,
            self.mu,
            self.lambda,
            self.level,
            self.alpha,
            self.seed,
        )?;
        if let Some(r) = self.resolution {
            config.resolution = r;
        }
        config.timings = self.timings;
        Ok(config)
    }
}

/// Exit status: 0 when every check passes, 1 when any fails.
fn status(reports: &[SuiteReport]) -> u8 {
    u8::from(!reports.iter().all(|r| r.pass))
}

fn summarize(report: &SuiteReport) {
    let mut out = std::io::stdout().lock();
    for c in &report.checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{verdict} {}/{}: {:.3e} (tolerance {:.1e})",
            report.suite, c.name, c.residual, c.tolerance
        );
    }
}

fn parse_suites(name: &str) -> anyhow::Result<Vec<Suite>> {
    if name == "all" {
        Ok(Suite::ALL.to_vec())
    } else {
        Ok(vec![name.parse()?])
    }
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn verify(suite: &str, run: &RunArgs, out: Option<&Path>) -> anyhow::Result<u8> {
    let config = run.config()?;
    let suites = parse_suites(suite)?;
    for &s in &suites {
        config.validate_for(s)?;
    }
    let reports = suites
        .iter()
        .map(|&s| run_suite(&config, s))
        .collect::<Result<Vec<_>, _>>()?;
    reports.iter().for_each(summarize);
    if let Some(path) = out {
        let json = if let [single] = reports.as_slice() {
            single.to_json()?
        } else {
            let mut s = serde_json::to_string_pretty(&reports)?;
            s.push('\n');
            s
        };
        write_file(path, &json)?;
    }
    Ok(status(&reports))
}

fn decompose(jet: &Path, prefix: &str, run: &RunArgs) -> anyhow::Result<u8> {
    let config = run.config()?;
    let parts = decompose_file(&config, jet)?;
    parts.plus.save(Path::new(&format!("{prefix}_plus.json")))?;
    parts
        .minus
        .save(Path::new(&format!("{prefix}_minus.json")))?;
    parts
        .report
        .write_json(Path::new(&format!("{prefix}_report.json")))?;
    summarize(&parts.report);
    Ok(status(std::slice::from_ref(&parts.report)))
}

fn convergence(
    suite: &str,
    levels: &[u32],
    run: &RunArgs,
    csv: Option<&Path>,
    out: Option<&Path>,
) -> anyhow::Result<u8> {
    let config = run.config()?;
    let report = converge(&config, suite.parse()?, levels)?;
    let table = report.convergence_csv();
    match csv {
        Some(path) => write_file(path, &table)?,
        None => print!("{table}"),
    }
    if let Some(path) = out {
        report.write_json(path)?;
    }
    summarize(&report);
    Ok(status(std::slice::from_ref(&report)))
}

fn make_jet(kind: &str, m: usize, level: u32, alpha: f64, out: &Path) -> anyhow::Result<u8> {
    let kind: SolutionKind = kind.parse()?;
    let solution = make_test_solution(&kind, m)?;
    let mesh = Arc::new(SurfaceMesh::from_descriptor(
        &ShapeDescriptor::unit_sphere(m, level),
    )?);
    LipschitzJet::from_solution(mesh, &solution, alpha)?.save(out)?;
    Ok(0)
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .with_context(|| format!("{THREADS_VAR}={value} is not a count"))?;
    if n == 0 {
        bail!("{THREADS_VAR} must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    log::debug!("worker threads capped at {n}");
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    configure_threads()?;
    match cli.command {
        Command::Verify { suite, run, out } => verify(&suite, &run, out.as_deref()),
        Command::Decompose {
            jet,
            out_prefix,
            run,
        } => decompose(&jet, &out_prefix, &run),
        Command::Converge {
            suite,
            levels,
            run,
            csv,
            out,
        } => convergence(&suite, &levels, &run, csv.as_deref(), out.as_deref()),
        Command::MakeJet {
            kind,
            m,
            level,
            alpha,
            out,
        } => make_jet(&kind, m, level, alpha, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
