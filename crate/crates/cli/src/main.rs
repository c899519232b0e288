//! `swiss-cheese`: generate Swiss cheese sets, run the derivation checks on
//! them and write reproducible JSON reports.

use std::f64::consts::TAU;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use cheese_core::derivation::Checker;
use cheese_core::render::render_svg;
use cheese_core::verify::{pair_test, run_verification, RunConfig, VerificationReport};
use cheese_core::{Error, RationalFunction, SwissCheese};

const EXIT_CHECK_FAILURE: u8 = 1;
const EXIT_CONSTRUCTION: u8 = 2;
const EXIT_IO: u8 = 3;
const DEMO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "swiss-cheese",
    version,
    about = "Swiss cheese sets and the derivation D(f)(g) = ∫_T f'g dz"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a cheese from the run config and write it as JSON.
    Generate {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run every check against a cheese file and write the report.
    Verify {
        cheese: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Include wall-clock timings in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Draw a cheese as SVG.
    Render {
        cheese: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print ‖(z^n)'‖ in L¹(T) against |z^n|_X for n = 1..=n_max.
    DemoUnbounded {
        #[arg(long, default_value_t = 8)]
        n_max: u32,
        /// Cheese to take |z^n|_X over; the closed unit disc when omitted.
        #[arg(long)]
        cheese: Option<PathBuf>,
    },
    /// Check a single pair f, g given inline as rational-function JSON.
    PairTest {
        cheese: PathBuf,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON run config; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "c")]
    c: Option<f64>,
    #[arg(long)]
    annuli: Option<u32>,
    #[arg(long)]
    discs_per_annulus: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    triples: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?,
            None => RunConfig::default(),
        };
        if let Some(c) = self.c {
            config.c = c;
        }
        if let Some(n) = self.annuli {
            config.annuli = n;
        }
        if let Some(k) = self.discs_per_annulus {
            config.discs_per_annulus = k;
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if let Some(p) = self.pairs {
            config.sweep_pairs = p;
        }
        if let Some(t) = self.triples {
            config.sweep_triples = t;
        }
        if let Some(r) = self.rho {
            config.rho = r;
        }
        config.validate()?;
        Ok(config)
    }

    fn init_pool(&self) -> Result<()> {
        if let Some(jobs) = self.jobs {
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build_global()
                .context("starting the worker pool")?;
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing to stdout"),
    }
}

fn load_cheese(path: &Path) -> Result<SwissCheese> {
    SwissCheese::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn finish(report: &VerificationReport, out: Option<&Path>) -> Result<u8> {
    emit(out, &report.to_json()?)?;
    let records: usize = report.summary.values().map(|s| s.records).sum();
    let failures: usize = report.summary.values().map(|s| s.failures).sum();
    eprintln!(
        "{records} records, {failures} failures, {} violations: {}",
        report.violations.len(),
        if report.pass { "PASS" } else { "FAIL" }
    );
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    Ok(if report.pass { 0 } else { EXIT_CHECK_FAILURE })
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Generate { run } => {
            let config = run.config()?;
            let cheese = config.generate()?;
            emit(run.out.as_deref(), &cheese.to_json()?)?;
            let bound = cheese.certified_bound();
            eprintln!(
                "{} discs, certified bound 4πΣr/s² = {bound:.6e} ({} C = {})",
                cheese.disc_count(),
                if bound <= config.c { "<=" } else { ">" },
                config.c
            );
            Ok(0)
        }
        Command::Verify { cheese, run, timings } => {
            run.init_pool()?;
            let mut config = run.config()?;
            let cheese = load_cheese(&cheese)?;
            config.c = cheese.c;
            config.seed = cheese.seed;
            config.annuli = cheese.annuli.len() as u32;
            let report = run_verification(&cheese, &config, timings)?;
            finish(&report, run.out.as_deref())
        }
        Command::Render { cheese, out } => {
            let cheese = load_cheese(&cheese)?;
            emit(out.as_deref(), &render_svg(&cheese))?;
            Ok(0)
        }
        Command::DemoUnbounded { n_max, cheese } => {
            let cheese = match cheese {
                Some(path) => load_cheese(&path)?,
                None => SwissCheese::empty(1.0, 0),
            };
            let rows = Checker::default().l1_unboundedness_demo(n_max, &cheese)?;
            println!(
                "{:>4}  {:>22}  {:>22}  {:>22}",
                "n", "|z^n|_X", "L1 norm of (z^n)'", "2πn"
            );
            let mut ok = true;
            for row in &rows {
                let expected = TAU * row.n as f64;
                ok &= (row.l1_norm_derivative - expected).abs() <= DEMO_TOLERANCE;
                println!(
                    "{:>4}  {:>22.16}  {:>22.16}  {:>22.16}",
                    row.n, row.sup_norm_x, row.l1_norm_derivative, expected
                );
            }
            ok &= rows
                .windows(2)
                .all(|w| w[1].l1_norm_derivative > w[0].l1_norm_derivative);
            Ok(if ok { 0 } else { EXIT_CHECK_FAILURE })
        }
        Command::PairTest { cheese, f, g, run } => {
            let config = run.config()?;
            let cheese = load_cheese(&cheese)?;
            let f = RationalFunction::from_json(&f).context("parsing --f")?;
            let g = RationalFunction::from_json(&g).context("parsing --g")?;
            let report = pair_test(&cheese, &f, &g, &config)?;
            finish(&report, run.out.as_deref())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::ConstructionFailure { .. }) => EXIT_CONSTRUCTION,
        _ => EXIT_IO,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_IO } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
