//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain or precondition error, 2 I/O or parse
//! error (including bad arguments), 3 verification failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::SeriesError;
use crate::fast::{self, PlanChoice, PlanOverrides, PowExponent};
use crate::fft::C64;
use crate::ledger::{report, CostLedger};
use crate::oracle;
use crate::sample;
use crate::series::TruncatedSeries;
use crate::textio::{parse_series, write_series};

/// Relative tolerance used by `verify`.
pub const VERIFY_TOLERANCE: f64 = 1e-8;

/// Exponents used by `verify` and `bench` when none is given.
pub const DEFAULT_POWERS: [(f64, f64); 4] = [(2.0, 0.0), (0.5, 0.0), (-1.0, 0.0), (0.3, 0.7)];

#[derive(Parser, Debug)]
#[command(name = "fastseries", version, about = "Power series exp, log, inverse and powers")]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Subcommand, Debug)]
enum CommandArgs {
    /// e^h for h with zero constant term.
    Exp(OpArgs),
    /// ln f for f with constant term 1.
    Log(OpArgs),
    /// 1/f for f with nonzero constant term.
    Inv(OpArgs),
    /// h^C for h with constant term 1.
    Pow(PowArgs),
    /// Compare the fast routines with the quadratic ones on random inputs.
    Verify(SweepArgs),
    /// Budget reports across a ladder of sizes.
    Bench(SweepArgs),
}

#[derive(Args, Debug, Default)]
struct PlanArgs {
    /// Block size k.
    #[arg(long)]
    block_size: Option<usize>,
    /// Bootstrap order and extension step n.
    #[arg(long)]
    bootstrap_order: Option<usize>,
    /// Frontier m; the computation runs to order 2m.
    #[arg(long)]
    frontier: Option<usize>,
}

#[derive(Args, Debug)]
struct OpArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Result order; defaults to the order of the input.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t = Algorithm::Fast)]
    algorithm: Algorithm,
    /// Write a DFT budget report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    report_format: ReportFormat,
    #[command(flatten)]
    plan: PlanArgs,
}

#[derive(Args, Debug)]
struct PowArgs {
    #[command(flatten)]
    op: OpArgs,
    #[arg(long, allow_negative_numbers = true)]
    power_re: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    power_im: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma separated result orders.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long)]
    seed: u64,
    /// Random inputs per size and operation.
    #[arg(long, default_value_t = 3)]
    trials: usize,
    /// Single exponent to use instead of the default set.
    #[arg(long, allow_negative_numbers = true)]
    power_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    power_im: Option<f64>,
    /// Also write the report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    report_format: ReportFormat,
    #[command(flatten)]
    plan: PlanArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Oracle,
    Fast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    /// Tab separated table.
    Text,
    /// `key=value` lines.
    Kv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Exp,
    Log,
    Inv,
    Pow,
    Verify,
    Bench,
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub n: Option<usize>,
    pub power: Option<C64>,
    pub overrides: PlanOverrides,
    pub seed: Option<u64>,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub report: Option<PathBuf>,
    pub report_format: ReportFormat,
    pub algorithm: Algorithm,
}

impl RunConfig {
    fn new(command: Command) -> Self {
        RunConfig {
            command,
            input: None,
            output: None,
            n: None,
            power: None,
            overrides: PlanOverrides::default(),
            seed: None,
            sizes: Vec::new(),
            trials: 1,
            report: None,
            report_format: ReportFormat::Text,
            algorithm: Algorithm::Fast,
        }
    }

    fn from_cli(cli: Cli) -> Self {
        let overrides = |p: &PlanArgs| PlanOverrides { k: p.block_size, n: p.bootstrap_order, m: p.frontier };
        let op = |command, a: OpArgs, power| RunConfig {
            input: Some(a.input),
            output: a.output,
            n: a.n,
            power,
            overrides: overrides(&a.plan),
            report: a.report,
            report_format: a.report_format,
            algorithm: a.algorithm,
            ..RunConfig::new(command)
        };
        let sweep = |command, a: SweepArgs| {
            let power = match (a.power_re, a.power_im) {
                (None, None) => None,
                (re, im) => Some(C64::new(re.unwrap_or(0.0), im.unwrap_or(0.0))),
            };
            RunConfig {
                power,
                overrides: overrides(&a.plan),
                seed: Some(a.seed),
                sizes: a.sizes,
                trials: a.trials,
                report: a.report,
                report_format: a.report_format,
                ..RunConfig::new(command)
            }
        };
        match cli.command {
            CommandArgs::Exp(a) => op(Command::Exp, a, None),
            CommandArgs::Log(a) => op(Command::Log, a, None),
            CommandArgs::Inv(a) => op(Command::Inv, a, None),
            CommandArgs::Pow(a) => op(Command::Pow, a.op, Some(C64::new(a.power_re, a.power_im))),
            CommandArgs::Verify(a) => sweep(Command::Verify, a),
            CommandArgs::Bench(a) => sweep(Command::Bench, a),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Domain(SeriesError),
    Io(String),
    Usage(String),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Io(_) | CliError::Usage(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(m) | CliError::Usage(m) | CliError::Verification(m) => f.write_str(m),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::Parse { .. } => CliError::Io(e.to_string()),
            other => CliError::Domain(other),
        }
    }
}

fn io_err(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn read_input(config: &RunConfig) -> Result<TruncatedSeries, CliError> {
    let path = config.input.as_ref().ok_or_else(|| CliError::Usage("--input is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_series(&text).map_err(|e| match e {
        SeriesError::Parse { .. } => CliError::Io(format!("{}: {e}", path.display())),
        other => other.into(),
    })
}

fn emit(path: Option<&PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e)),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn format_report(ledger: &CostLedger, choice: Option<PlanChoice>, format: ReportFormat) -> String {
    if let Some(PlanChoice::Blocked(plan)) = choice {
        let r = report(ledger, &plan);
        return match format {
            ReportFormat::Text => r.to_text(),
            ReportFormat::Kv => r.to_key_values(),
        };
    }
    // No block plan: list the DFT events by order.
    let heading = if choice == Some(PlanChoice::OracleFallback) { "# quadratic path" } else { "# no block plan" };
    let mut orders: Vec<usize> = ledger.events().iter().map(|e| e.order).collect();
    orders.sort_unstable();
    orders.dedup();
    let mut out = String::new();
    match format {
        ReportFormat::Text => {
            let _ = writeln!(out, "{heading}");
            let _ = writeln!(out, "order\tcount");
            for o in orders {
                let _ = writeln!(out, "{o}\t{}", ledger.order_count(o));
            }
        }
        ReportFormat::Kv => {
            for o in orders {
                let _ = writeln!(out, "dft.order.{o}={}", ledger.order_count(o));
            }
        }
    }
    out
}

fn run_op(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let input = read_input(config)?;
    let order = config.n.unwrap_or(input.order());
    if input.order() < order {
        return Err(SeriesError::OrderTooLarge { requested: order, available: input.order() }.into());
    }
    let mut ledger = CostLedger::new();
    let fast = config.algorithm == Algorithm::Fast;
    let (out, choice) = match config.command {
        Command::Exp if fast => {
            let (f, c) = fast::fast_exp_metered(&input, order, config.overrides, &mut ledger)?;
            (f, Some(c))
        }
        Command::Exp => (oracle::oracle_exp(&input.truncate(order)?, order)?, None),
        Command::Log if fast => (fast::fast_log_metered(&input, order, &mut ledger)?, None),
        Command::Log => (oracle::oracle_log(&input.truncate(order)?, order)?, None),
        Command::Inv if fast => (fast::fast_inverse_metered(&input, order, &mut ledger)?, None),
        Command::Inv => (oracle::oracle_inverse(&input.truncate(order)?, order)?, None),
        Command::Pow => {
            let c = config.power.ok_or_else(|| CliError::Usage("pow needs --power-re".into()))?;
            if fast {
                let (f, ch) = fast::fast_pow_metered(&input, PowExponent(c), order, config.overrides, &mut ledger)?;
                (f, Some(ch))
            } else {
                (oracle::oracle_pow(&input.truncate(order)?, c, order)?, None)
            }
        }
        Command::Verify | Command::Bench => unreachable!("sweep commands are dispatched separately"),
    };
    emit(config.output.as_ref(), &write_series(&out), stdout)?;
    if let Some(path) = &config.report {
        std::fs::write(path, format_report(&ledger, choice, config.report_format)).map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

fn sweep_rng(seed: u64, size: usize, salt: u64) -> rand_chacha::ChaCha8Rng {
    sample::rng(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((size as u64) << 20) ^ salt)
}

fn powers(config: &RunConfig) -> Vec<C64> {
    match config.power {
        Some(c) => vec![c],
        None => DEFAULT_POWERS.iter().map(|&(re, im)| C64::new(re, im)).collect(),
    }
}

fn relative_error(got: &TruncatedSeries, want: &TruncatedSeries) -> f64 {
    got.max_abs_diff(want) / (1.0 + want.max_abs())
}

fn run_verify(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let seed = config.seed.ok_or_else(|| CliError::Usage("verify needs --seed".into()))?;
    let mut out = String::new();
    let _ = writeln!(out, "# tolerance {VERIFY_TOLERANCE:e} relative to 1 + max|oracle coefficient|");
    let _ = writeln!(out, "size\toperation\tmax_rel_err\tstatus");
    let mut failures = 0;
    for &size in &config.sizes {
        let mut rows: Vec<(String, f64)> = Vec::new();
        let (mut e_exp, mut e_inv) = (0.0f64, 0.0f64);
        let pw = powers(config);
        let mut e_pow = vec![0.0f64; pw.len()];
        for t in 0..config.trials as u64 {
            let mut rng = sweep_rng(seed, size, t);
            let h = sample::exp_input(&mut rng, size);
            let (f, _) = fast::fast_exp_metered(&h, size, config.overrides, &mut CostLedger::new())?;
            e_exp = e_exp.max(relative_error(&f, &oracle::oracle_exp(&h, size)?));
            let g = sample::damped_series(&mut rng, size);
            let r = fast::fast_inverse(&g, size)?;
            e_inv = e_inv.max(relative_error(&r, &oracle::oracle_inverse(&g, size)?));
            for (slot, &c) in e_pow.iter_mut().zip(&pw) {
                let (f, _) = fast::fast_pow_metered(&g, PowExponent(c), size, config.overrides, &mut CostLedger::new())?;
                *slot = slot.max(relative_error(&f, &oracle::oracle_pow(&g, c, size)?));
            }
        }
        rows.push(("exp".into(), e_exp));
        rows.push(("inv".into(), e_inv));
        for (c, e) in pw.iter().zip(e_pow) {
            rows.push((format!("pow({}{:+}i)", c.re, c.im), e));
        }
        for (name, err) in rows {
            let ok = err <= VERIFY_TOLERANCE;
            failures += usize::from(!ok);
            let _ = writeln!(out, "{size}\t{name}\t{err:.3e}\t{}", if ok { "ok" } else { "FAIL" });
        }
    }
    stdout.write_all(out.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(path) = &config.report {
        std::fs::write(path, &out).map_err(|e| io_err(path, e))?;
    }
    if failures > 0 {
        return Err(CliError::Verification(format!("{failures} comparisons exceeded the tolerance")));
    }
    Ok(())
}

fn run_bench(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let seed = config.seed.ok_or_else(|| CliError::Usage("bench needs --seed".into()))?;
    let c = config.power.unwrap_or(C64::new(0.5, 0.0));
    let mut out = String::new();
    for &size in &config.sizes {
        let mut rng = sweep_rng(seed, size, 0);
        let h = sample::exp_input(&mut rng, size);
        let mut ledger = CostLedger::new();
        let (_, choice) = fast::fast_exp_metered(&h, size, config.overrides, &mut ledger)?;
        let _ = writeln!(out, "## exp order={size}");
        out.push_str(&format_report(&ledger, Some(choice), config.report_format));
        let g = sample::damped_series(&mut rng, size);
        let mut ledger = CostLedger::new();
        let (_, choice) = fast::fast_pow_metered(&g, PowExponent(c), size, config.overrides, &mut ledger)?;
        let _ = writeln!(out, "## pow order={size} C={}{:+}i", c.re, c.im);
        out.push_str(&format_report(&ledger, Some(choice), config.report_format));
    }
    emit(config.report.as_ref(), &out, stdout)
}

/// Executes one configuration, writing results to `stdout` unless files are
/// named.
pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    if config.command == Command::Pow && config.power.is_none() {
        return Err(CliError::Usage("pow needs an exponent".into()));
    }
    if matches!(config.command, Command::Verify | Command::Bench) && config.sizes.is_empty() {
        return Err(CliError::Usage("a size list is required".into()));
    }
    match config.command {
        Command::Verify => run_verify(config, stdout),
        Command::Bench => run_bench(config, stdout),
        _ => run_op(config, stdout),
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    let config = RunConfig::from_cli(cli);
    match run(&config, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::from_cli(Cli::try_parse_from(args).unwrap())
    }

    #[test]
    fn parses_pow_with_overrides() {
        let c = parse(&[
            "fastseries", "pow", "--input", "h.txt", "--power-re", "-1", "--power-im", "0.5", "--n", "64",
            "--block-size", "4", "--bootstrap-order", "8", "--frontier", "32", "--algorithm", "oracle",
        ]);
        assert_eq!(c.command, Command::Pow);
        assert_eq!(c.power, Some(C64::new(-1.0, 0.5)));
        assert_eq!(c.overrides, PlanOverrides { k: Some(4), n: Some(8), m: Some(32) });
        assert_eq!(c.algorithm, Algorithm::Oracle);
        assert_eq!(c.n, Some(64));
    }

    #[test]
    fn parses_sweeps() {
        let c = parse(&["fastseries", "verify", "--sizes", "64,256", "--seed", "1"]);
        assert_eq!(c.sizes, vec![64, 256]);
        assert_eq!(c.seed, Some(1));
        assert!(Cli::try_parse_from(["fastseries", "bench", "--sizes", "64"]).is_err());
        assert!(Cli::try_parse_from(["fastseries", "pow", "--input", "x"]).is_err());
    }

    #[test]
    fn error_classes() {
        assert_eq!(CliError::from(SeriesError::NotInvertible).exit_code(), 1);
        let parse = SeriesError::Parse { line: 1, column: 1, message: String::new() };
        assert_eq!(CliError::from(parse).exit_code(), 2);
        assert_eq!(CliError::Verification(String::new()).exit_code(), 3);
    }
}
