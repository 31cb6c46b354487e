use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qheis_cli::commands::{self, exit_code};
use qheis_cli::config::{parse_level, ClassCaps, RunConfig};
use qheis_cli::report::Report;
use qheis_cli::suites::{Session, Suite};
use qheis_cli::CliResult;

#[derive(Parser)]
#[command(name = "qheis", version, about = "Exact checks for the Yang R-matrix deformed Heisenberg vertex algebra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normalizing series G to order K.
    Gseries(Common),
    /// Run one or more verification suites.
    Verify {
        #[arg(required = true, value_name = "SUITE")]
        suites: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Reduce a word such as "y1(1) y1(-1)" to PBW normal form.
    PbwReduce {
        word: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Rank N >= 2.
    #[arg(long = "N", default_value_t = 2)]
    n: usize,
    /// Central parameter as "p/q".
    #[arg(long = "c", allow_hyphen_values = true)]
    c: Option<String>,
    /// Keep the central parameter formal.
    #[arg(long = "formal-C")]
    formal: bool,
    /// Truncation order in h.
    #[arg(long = "K", default_value_t = 4)]
    k: usize,
    /// Per-class caps, e.g. "degree=3,z=2,window=2,scan=12".
    #[arg(long)]
    caps: Option<String>,
    /// Sample count; each suite has its own default.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Bundle cache directory; falls back to QHEIS_CACHE_DIR.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Write the JSON report here ("-" for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Add wall-clock timing and cache counters to the report.
    #[arg(long)]
    timing: bool,
}

impl Common {
    fn config(&self) -> CliResult<RunConfig> {
        let cfg = RunConfig {
            n: self.n,
            c: self.c.as_deref().map(parse_level).transpose()?,
            formal: self.formal,
            k: self.k,
            caps: self.caps.as_deref().map(ClassCaps::parse).transpose()?.unwrap_or_default(),
            samples: self.samples,
            seed: self.seed,
            jobs: self.jobs,
            cache_dir: self.cache_dir.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(report: &Report, json: Option<&PathBuf>) -> CliResult<()> {
    match json {
        Some(p) if p.as_os_str() == "-" => print!("{}", report.to_json()),
        Some(p) => {
            print!("{}", report.summary());
            std::fs::write(p, report.to_json())?;
        }
        None => print!("{}", report.summary()),
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<i32> {
    let (common, report) = match &cli.command {
        Command::Gseries(common) => {
            let s = Session::new(common.config()?)?;
            let r = commands::gseries(&s, common.timing)?;
            if common.json.is_none() {
                for c in r.coefficients.iter().flatten() {
                    println!("(h/u)^{}: {}", c.h, c.text);
                }
            }
            (common, r)
        }
        Command::Verify { suites, common } => {
            let suites = suites.iter().map(|s| Suite::parse(s)).collect::<CliResult<Vec<_>>>()?;
            let s = Session::new(common.config()?)?;
            (common, commands::verify(&s, &suites, common.timing)?)
        }
        Command::PbwReduce { word, common } => {
            let s = Session::new(common.config()?)?;
            let r = commands::pbw_reduce(&s, word, common.timing)?;
            if common.json.is_none() {
                if let Some(nf) = &r.normal_form {
                    println!("{}", nf.text);
                }
            }
            (common, r)
        }
    };
    emit(&report, common.json.as_ref())?;
    Ok(exit_code(&report))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            // bad flags, unparseable words and orders the kernel cannot
            // reach are all configuration errors
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
