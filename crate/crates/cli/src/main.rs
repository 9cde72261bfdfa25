use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use log::{info, warn, LevelFilter};
use preq_cli::{run, write_outputs, CliError, Scenario, Task};

#[derive(Parser)]
#[command(name = "preq", version, about = "Holonomy of Hamiltonian loops on the quantizable sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for generated base points and random axes
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON config
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the verification suite for the given orbit sizes
    Verify {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        n: Vec<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// Reference SU(2) computations for one orbit size
    Su2Demo {
        #[arg(long, default_value_t = 1)]
        n: i64,
        #[command(flatten)]
        common: Common,
    },
}

fn init_logging() {
    let level = match std::env::var("PREQ_LOG").as_deref() {
        Err(_) | Ok("info") => LevelFilter::Info,
        Ok("quiet") => LevelFilter::Off,
        Ok("debug") => LevelFilter::Debug,
        Ok(other) => {
            eprintln!("unknown PREQ_LOG value {other:?}, using info");
            LevelFilter::Info
        }
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let (mut scenario, common) = match cli.command {
        Command::Run { config, common } => (Scenario::load(&config)?, common),
        Command::Verify { n, common } => {
            let mut sc = Scenario::minimal(*n.first().unwrap_or(&1), Task::Verify);
            sc.n_values = Some(n);
            (sc, common)
        }
        Command::Su2Demo { n, common } => (Scenario::minimal(n, Task::Su2Demo), common),
    };
    if let Some(seed) = common.seed {
        scenario.seed = seed;
    }
    if let Some(t) = common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            warn!("thread pool: {e}");
        }
    }
    let out = common
        .out
        .or_else(|| scenario.output.path.clone())
        .unwrap_or_else(|| PathBuf::from("preq-out"));

    let started = Instant::now();
    let rec = run(&scenario)?;
    info!("{} finished in {:.2?}", scenario.task.name(), started.elapsed());
    for e in rec.suite.iter().filter(|e| !e.pass) {
        warn!("check {} (n = {:?}) failed: residual {:?} > {}", e.name, e.n, e.residual, e.threshold);
    }
    let files = write_outputs(Path::new(&out), &rec, scenario.output.format)?;
    for f in files {
        info!("wrote {}", f.display());
    }
    let passed = rec.suite.iter().filter(|e| e.pass).count();
    println!("{}: {}/{} checks passed", scenario.task.name(), passed, rec.suite.len());
    Ok(rec.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            let code = e.exit_code();
            eprintln!("{}", serde_json::to_string(&e.record()).expect("error record serializes"));
            ExitCode::from(code as u8)
        }
    }
}
