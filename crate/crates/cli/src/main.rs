use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tetcut_cli::commands::{cmd_compare, cmd_cut, cmd_npac, cmd_shell, cmd_validate, compare_csv, npac_csv, shell_csv};
use tetcut_cli::{CliError, JobSpec};
use tetcut_core::cutcell::npac::SymmetryGroup;
use tetcut_core::diagnostics::{ShellPreset, ShellStudy};
use tetcut_core::rules::DeciderVariant;
use tetcut_core::{Rule, RuleConfig};

/// Cut-cell tetrahedral decomposition of level set fields on hexahedral lattices.
///
/// Exit codes: 0 success, 2 invalid input, 3 numerical degeneracy or failed
/// self-check, 4 I/O failure.
#[derive(Parser)]
#[command(name = "tetcut", version)]
struct Cli {
    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true, env = "TETCUT_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose and resolve a job, writing the mesh and a JSON report.
    ///
    /// Example: tetcut cut job.json --rule G1_solid --out sphere.vtk
    Cut(CutArgs),
    /// Sign-pattern classes under the four cube symmetry groups.
    ///
    /// Example: tetcut npac --group rot24_complement --format json
    Npac(NpacArgs),
    /// Spherical shell sweep, one CSV row per outer radius.
    ///
    /// Example: tetcut shell --preset octant --rule G1_void --out shell.csv
    Shell(ShellArgs),
    /// Resolve one job under several rules and report the differences.
    ///
    /// Example: tetcut compare job.json --rules G1_solid,G1_void,L3
    Compare(CompareArgs),
    /// Randomized self-check of every rule on random fields.
    ///
    /// Example: tetcut validate --seed 42 --fields 20 --size 6
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Mesh,
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Seed for random field presets without their own seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RuleArgs {
    /// L1_solid, L1_void, L2, L3, L4_max, L4_min, G1_solid, G1_void, G2_max or G2_min.
    #[arg(long, value_parser = parse_rule)]
    rule: Option<Rule>,
    /// Saddle value used by the asymptotic decider.
    #[arg(long, value_parser = parse_decider)]
    decider: Option<DeciderVariant>,
}

#[derive(Args)]
struct CutArgs {
    job: PathBuf,
    #[command(flatten)]
    rule: RuleArgs,
    /// Where to write the JSON report when the mesh goes to a file.
    /// Defaults to the mesh path with `.report.json` appended.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct NpacArgs {
    /// Groups to tabulate; all four when absent.
    #[arg(long = "group", value_parser = parse_group)]
    groups: Vec<SymmetryGroup>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ShellArgs {
    /// octant or full.
    #[arg(long, default_value = "octant", value_parser = parse_preset)]
    preset: ShellPreset,
    #[arg(long)]
    inner: Option<f64>,
    /// Comma-separated outer radii.
    #[arg(long, value_delimiter = ',')]
    outer: Vec<f64>,
    #[command(flatten)]
    rule: RuleArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CompareArgs {
    job: PathBuf,
    /// Comma-separated rules; all ten when absent.
    #[arg(long, value_delimiter = ',', value_parser = parse_rule)]
    rules: Vec<Rule>,
    #[arg(long, value_parser = parse_decider)]
    decider: Option<DeciderVariant>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 10)]
    fields: usize,
    /// Cells per lattice side.
    #[arg(long, default_value_t = 6)]
    size: usize,
    #[command(flatten)]
    common: Common,
}

fn parse_rule(s: &str) -> Result<Rule, String> {
    s.parse()
}

fn parse_decider(s: &str) -> Result<DeciderVariant, String> {
    s.parse()
}

fn parse_group(s: &str) -> Result<SymmetryGroup, String> {
    s.parse()
}

fn parse_preset(s: &str) -> Result<ShellPreset, String> {
    s.parse()
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numeric(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn read_job(path: &Path) -> Result<JobSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    JobSpec::parse(&text)
}

fn reject_format(command: &str, format: Format) -> CliError {
    let name = format.to_possible_value().expect("no skipped variants").get_name().to_string();
    CliError::Validation(format!("{command} does not support --format {name}"))
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Validation("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    match cli.command {
        Command::Cut(args) => {
            let job = read_job(&args.job)?;
            let config = job.rule_config(args.rule.rule, args.rule.decider)?;
            let output = cmd_cut(&job, config, args.common.seed)?;
            let out = args.common.out.or_else(|| job.output.mesh.clone());
            match args.common.format.unwrap_or(Format::Mesh) {
                Format::Mesh => {
                    emit(out.as_deref(), &output.mesh)?;
                    let report_path = args
                        .report
                        .or_else(|| job.output.report.clone())
                        .or_else(|| out.as_ref().map(|p| PathBuf::from(format!("{}.report.json", p.display()))));
                    if let Some(path) = report_path {
                        emit(Some(&path), &to_json(&output.report)?)?;
                    }
                }
                Format::Json => emit(out.as_deref(), &to_json(&output.report)?)?,
                f => return Err(reject_format("cut", f)),
            }
        }
        Command::Npac(args) => {
            let groups = if args.groups.is_empty() { SymmetryGroup::ALL.to_vec() } else { args.groups };
            let report = cmd_npac(&groups)?;
            let text = match args.common.format.unwrap_or(Format::Csv) {
                Format::Csv => npac_csv(&report)?,
                Format::Json => to_json(&report)?,
                f => return Err(reject_format("npac", f)),
            };
            emit(args.common.out.as_deref(), &text)?;
        }
        Command::Shell(args) => {
            let rule = RuleConfig {
                rule: args.rule.rule.unwrap_or(Rule::G1Void),
                decider: args.rule.decider.unwrap_or_default(),
            };
            let mut study = ShellStudy::with_defaults(args.preset, rule);
            if let Some(r) = args.inner {
                study.inner_radius = r;
            }
            if !args.outer.is_empty() {
                study.outer_radii = args.outer;
            }
            let rows = cmd_shell(&study)?;
            let text = match args.common.format.unwrap_or(Format::Csv) {
                Format::Csv => shell_csv(&rows)?,
                Format::Json => to_json(&rows)?,
                f => return Err(reject_format("shell", f)),
            };
            emit(args.common.out.as_deref(), &text)?;
        }
        Command::Compare(args) => {
            let job = read_job(&args.job)?;
            let rules = if args.rules.is_empty() { Rule::ALL.to_vec() } else { args.rules };
            let report = cmd_compare(&job, &rules, args.decider, args.common.seed)?;
            let text = match args.common.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&report)?,
                Format::Csv => compare_csv(&report)?,
                f => return Err(reject_format("compare", f)),
            };
            emit(args.common.out.as_deref(), &text)?;
        }
        Command::Validate(args) => {
            let report = cmd_validate(args.common.seed, args.fields, args.size)?;
            match args.common.format.unwrap_or(Format::Json) {
                Format::Json => emit(args.common.out.as_deref(), &to_json(&report)?)?,
                f => return Err(reject_format("validate", f)),
            }
            if !report.failures.is_empty() {
                return Err(CliError::Numeric(format!("{} self-check failures", report.failures.len())));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
