mod config;
mod error;
mod presets;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{CoinKind, Emit, ExperimentConfig, InputChoice, Measure, MemoryFnKind, ModeKind, Record};
use error::CliError;
use run::Plan;

/// Quantum walks with a memory of past coin values.
#[derive(Parser, Debug)]
#[command(name = "memwalk", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Named figure preset (see list-presets).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// JSON config document; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_name = "T")]
    steps: Option<usize>,
    /// Number of coin registers N.
    #[arg(long, value_name = "N")]
    memory: Option<usize>,
    /// trivial|linear|abs|negabs|random|random-coin
    #[arg(long = "memory-fn", value_name = "FN")]
    memory_fn: Option<MemoryFnKind>,
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    phi: Option<f64>,
    /// direct|physical
    #[arg(long)]
    mode: Option<ModeKind>,
    /// sym|product:+1|product:-1
    #[arg(long)]
    input: Option<InputChoice>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    dims: Option<u8>,
    /// balanced|sep2d|ent2d
    #[arg(long)]
    coin: Option<CoinKind>,
    /// Periodic lattice with D sites per axis.
    #[arg(long, value_name = "D")]
    cyclic: Option<u32>,
    /// e.g. "last:k=4,outcomes=+1,+1,+1,+1" or "last:k=4,all-branches".
    #[arg(long)]
    measure: Option<Measure>,
    /// all|final|comma-separated times.
    #[arg(long)]
    record: Option<Record>,
    #[arg(long, value_name = "R")]
    realizations: Option<usize>,
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// dist|variance|ensemble|entanglement|circuit
    #[arg(long)]
    emit: Option<Emit>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the preset catalog.
    ListPresets,
}

impl Cli {
    fn overrides(&self) -> ExperimentConfig {
        ExperimentConfig {
            format: None,
            preset: self.preset.clone(),
            dims: self.dims,
            memory: self.memory,
            steps: self.steps,
            memory_fn: self.memory_fn,
            phi: self.phi,
            mode: self.mode,
            input: self.input,
            coin: self.coin,
            cyclic: self.cyclic,
            measure: self.measure.clone(),
            record: self.record.clone(),
            realizations: self.realizations,
            seed: self.seed,
            out: self.out.clone(),
            emit: self.emit,
        }
    }
}

fn run(cli: &Cli) -> Result<(String, run::Report), CliError> {
    let file = cli.config.as_deref().map(ExperimentConfig::load).transpose()?;
    let plan = Plan::resolve(file, &cli.overrides())?;
    for s in &plan.series {
        eprintln!("{}: N={} T={} {:?}", s.label, s.spec.memory_len, s.spec.steps, s.spec.coin.family);
    }
    let report = plan.execute()?;
    Ok((plan.name, report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(Command::ListPresets) = cli.command {
        for p in presets::CATALOG {
            println!("{}\t{}\t{}", p.name, p.figure, p.summary);
        }
        return ExitCode::SUCCESS;
    }
    let start = Instant::now();
    let label = cli.preset.clone().unwrap_or_else(|| "-".into());
    match run(&cli) {
        Ok((name, report)) => {
            eprintln!("wrote {} ({} rows)", report.out.display(), report.rows);
            let note = report.note.map(|n| format!(" {n}")).unwrap_or_default();
            println!(
                "status=ok preset={name} out={} rows={}{note} wall_ms={}",
                report.out.display(),
                report.rows,
                start.elapsed().as_millis()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("memwalk: {e}");
            let code = e.exit_code();
            println!("status=error preset={label} code={code} wall_ms={}", start.elapsed().as_millis());
            ExitCode::from(code)
        }
    }
}
