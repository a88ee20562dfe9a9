use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ptower::commands::{self, RandomKind, EXIT_USAGE};
use ptower::schema::{self, InstanceFile, ObservedFile, ObservedLevel};
use ptower::{CliError, Format, Outcome};
use ptower_core::descent::{DeltaPreset, DEFAULT_BUDGET};
use ptower_core::tower::StabilizationDepth;

#[derive(Parser)]
#[command(name = "ptower", version, about = "Class-group layers of potential cyclic p-towers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Tower,
    Descent,
}

#[derive(Subcommand)]
enum Command {
    /// Print omega_n = ((1+T)^{p^n} - 1)/T, coefficients low to high.
    Omega {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 8)]
        precision: u32,
        #[arg(long)]
        n: u32,
    },
    /// Layers A_n for n = 0..=n_max of a tower, elementary or descent file.
    Layers {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        n_max: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Check that A_1 ≅ A_0 (mod p^k) forces A_n ≅ A_0 (mod p^k).
    Fukuda {
        file: Option<PathBuf>,
        /// A positive integer or `full`; batches check 1, 2 and full when omitted.
        #[arg(long, value_parser = parse_depth)]
        k: Option<StabilizationDepth>,
        #[arg(long, default_value_t = 8)]
        n_max: u32,
        /// Run COUNT seeded random instances instead of a file.
        #[arg(long, value_name = "COUNT")]
        random: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Predict all layers from observed A_0 and A_1.
    Infer {
        /// An `observed` file; otherwise use --p, --a0, --a1.
        file: Option<PathBuf>,
        #[arg(long)]
        p: Option<u64>,
        /// Exponent list of A_0, e.g. `2,1`; empty for the trivial group.
        #[arg(long, value_parser = parse_type)]
        a0: Option<TypeArg>,
        #[arg(long, value_parser = parse_type)]
        a1: Option<TypeArg>,
        /// Assert the ramification hypothesis for the tower.
        #[arg(long)]
        ramhyp: bool,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        n_target: Option<u32>,
    },
    /// Brute-force descent quotient against the closed form.
    Oracle {
        file: Option<PathBuf>,
        #[arg(long, value_name = "COUNT")]
        random: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long, value_parser = parse_preset)]
        delta: Option<DeltaPreset>,
        #[arg(long, value_name = "ELEMS")]
        budget: Option<u64>,
    },
    /// Check that I_{G_n} is generated by h^{p^n} - 1 and I_Δ.
    LemmaAug {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u32,
        #[arg(long, value_parser = parse_preset, default_value = "trivial")]
        delta: DeltaPreset,
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, default_value_t = 4)]
        precision: u32,
        #[arg(long, value_name = "ELEMS", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Emit a seeded random instance file.
    RandomInstance {
        #[arg(long, value_enum, default_value = "tower")]
        kind: KindArg,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long, value_parser = parse_preset)]
        delta: Option<DeltaPreset>,
    },
}

fn parse_depth(s: &str) -> Result<StabilizationDepth, String> {
    if s == "full" {
        return Ok(StabilizationDepth::Full);
    }
    match s.parse::<u32>() {
        Ok(k) if k >= 1 => Ok(StabilizationDepth::Mod(k)),
        _ => Err(format!("expected a positive integer or `full`, got {s:?}")),
    }
}

/// An abelian type given as a comma-separated exponent list.
#[derive(Clone, Debug)]
struct TypeArg(Vec<u32>);

fn parse_type(s: &str) -> Result<TypeArg, String> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    if s.trim().is_empty() {
        return Ok(TypeArg(Vec::new()));
    }
    s.split(',').map(|t| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"))).collect::<Result<_, _>>().map(TypeArg)
}

fn parse_preset(s: &str) -> Result<DeltaPreset, String> {
    DeltaPreset::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = DeltaPreset::ALL.iter().map(|p| p.name()).collect();
        format!("unknown preset {s:?}; expected one of {}", names.join(", "))
    })
}

fn load(path: &PathBuf) -> Result<InstanceFile, CliError> {
    Ok(schema::read(path)?)
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Omega { p, precision, n } => commands::omega_cmd(p, precision, n),
        Command::Layers { file, n_max, format, budget } => {
            let format = match format {
                FormatArg::Text => Format::Text,
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
            commands::layers_cmd(&load(&file)?, n_max, format, budget)
        }
        Command::Fukuda { file, k, n_max, random, seed, p, budget } => match (file, random) {
            (Some(file), None) => commands::fukuda_cmd(&load(&file)?, k.unwrap_or(StabilizationDepth::Mod(1)), n_max, budget),
            (None, Some(count)) => {
                let depths = match k {
                    Some(k) => vec![k],
                    None => vec![StabilizationDepth::Mod(1), StabilizationDepth::Mod(2), StabilizationDepth::Full],
                };
                commands::fukuda_batch(p, count, seed, n_max, &depths)
            }
            _ => Err(CliError::Usage("give either an instance file or --random COUNT".into())),
        },
        Command::Infer { file, p, a0, a1, ramhyp, k, n_target } => {
            let obs = match file {
                Some(file) => match load(&file)? {
                    InstanceFile::Observed(mut o) => {
                        o.ramhyp |= ramhyp;
                        o
                    }
                    _ => return Err(CliError::Usage("infer needs an observed file".into())),
                },
                None => {
                    let p = p.ok_or_else(|| CliError::Usage("--p is required without a file".into()))?;
                    let levels = [a0, a1]
                        .into_iter()
                        .enumerate()
                        .filter_map(|(n, t)| t.map(|t| ObservedLevel { n: n as u32, group: Some(t.0), e: None }))
                        .collect();
                    ObservedFile { p, levels, ramhyp }
                }
            };
            commands::infer_cmd(&obs, k, n_target)
        }
        Command::Oracle { file, random, seed, p, d, delta, budget } => match (file, random) {
            (Some(file), None) => commands::oracle_cmd(&load(&file)?, budget),
            (None, Some(count)) => commands::oracle_batch(count, seed, p, d, delta, budget.unwrap_or(DEFAULT_BUDGET)),
            _ => Err(CliError::Usage("give either an instance file or --random COUNT".into())),
        },
        Command::LemmaAug { p, d, delta, n, precision, budget } => {
            commands::lemma_aug_cmd(p, d, delta, n, precision, budget)
        }
        Command::RandomInstance { kind, p, seed, d, delta } => {
            let kind = match kind {
                KindArg::Tower => RandomKind::Tower,
                KindArg::Descent => RandomKind::Descent,
            };
            commands::random_instance_cmd(kind, p, seed, d, delta)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
