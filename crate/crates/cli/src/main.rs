//! Command-line front end. Exit status contract: 0 when every requested
//! check passes, 1 on a mathematical finding (a nonzero coefficient table or
//! a failed residual), 2 on operational errors (bad flags, unreadable
//! configs, quadrature non-convergence). User input never panics the
//! process.

use bpz_core::bsa::{compositions, verify_bpz, VerificationReport};
use bpz_core::evalconfig::PointConfig;
use bpz_core::oracle_coulomb::{verify_coulomb_bpz, CoulombConfig, CoulombStatus};
use bpz_core::oracle_jet::verify_integrand_bpz;
use bpz_core::ratfunc::ChiMode;
use clap::builder::PossibleValue;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bpz",
    version,
    about = "Exact verification of Benoit-Saint-Aubin operator identities, with jet and quadrature oracles"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ChiArg {
    GammaHalf,
    TwoOverGamma,
    Both,
}

impl ValueEnum for ChiArg {
    fn value_variants<'a>() -> &'a [Self] {
        &[ChiArg::GammaHalf, ChiArg::TwoOverGamma, ChiArg::Both]
    }

    fn to_possible_value(&self) -> Option<PossibleValue> {
        Some(match self {
            ChiArg::GammaHalf => PossibleValue::new("gamma/2"),
            ChiArg::TwoOverGamma => PossibleValue::new("2/gamma"),
            ChiArg::Both => PossibleValue::new("both"),
        })
    }
}

impl ChiArg {
    fn modes(self) -> Vec<ChiMode> {
        match self {
            ChiArg::GammaHalf => vec![ChiMode::GammaHalf],
            ChiArg::TwoOverGamma => vec![ChiMode::TwoOverGamma],
            ChiArg::Both => vec![ChiMode::GammaHalf, ChiMode::TwoOverGamma],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Expand the order-r operator on Q_0 and verify the table is zero.
    Verify(VerifyArgs),
    /// Emit the coefficient table for audit (exit 0 even when nonzero).
    Table(TableArgs),
    /// Exact jet verification of the integrand identity at random points.
    OracleJet(JetArgs),
    /// Quadrature verification on screened integrals from a config file.
    OracleCoulomb(CoulombArgs),
    /// Evaluate power sums of a point configuration.
    Render(RenderArgs),
    /// Time the expansion across orders.
    Bench(BenchArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Order of the identity (>= 2).
    #[arg(long = "r")]
    r: u32,
    #[arg(long = "chi", default_value = "both")]
    chi: ChiArg,
    /// Validate the run plan without computing.
    #[arg(long)]
    dry_run: bool,
    #[arg(long = "out")]
    out: Option<PathBuf>,
    #[arg(long = "format", default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long = "r")]
    r: u32,
    #[arg(long = "chi", default_value = "gamma/2")]
    chi: ChiArg,
    #[arg(long = "out")]
    out: Option<PathBuf>,
    #[arg(long = "format", default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct JetArgs {
    #[arg(long = "r")]
    r: u32,
    #[arg(long = "chi", default_value = "both")]
    chi: ChiArg,
    /// Number of insertions (must be >= r).
    #[arg(long = "n")]
    n: usize,
    #[arg(long = "trials", default_value_t = 10)]
    trials: u32,
    #[arg(long = "seed", default_value_t = 0)]
    seed: u64,
    #[arg(long = "out")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoulombArgs {
    /// JSON file with the run configuration.
    #[arg(long = "config")]
    config: PathBuf,
    /// Override the branch from the config file.
    #[arg(long = "chi")]
    chi: Option<ChiArg>,
    /// Override the residual tolerance from the config file.
    #[arg(long = "tol")]
    tol: Option<f64>,
    /// Override the number of screening charges from the config file.
    #[arg(long = "l")]
    l: Option<usize>,
    #[arg(long = "out")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    /// JSON file with the point configuration.
    #[arg(long = "config")]
    config: PathBuf,
    /// Evaluate power sums for indices 1..=n.
    #[arg(long = "n", default_value_t = 4)]
    n: u32,
    #[arg(long = "out")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Largest order to time.
    #[arg(long = "r", default_value_t = 8)]
    r: u32,
    #[arg(long = "chi", default_value = "gamma/2")]
    chi: ChiArg,
}

enum Outcome {
    Pass,
    Finding,
}

type CliResult = Result<Outcome, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Finding) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.cmd {
        Command::Verify(args) => cmd_verify(args),
        Command::Table(args) => cmd_table(args),
        Command::OracleJet(args) => cmd_oracle_jet(args),
        Command::OracleCoulomb(args) => cmd_oracle_coulomb(args),
        Command::Render(args) => cmd_render(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn write_artifact(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("writing {}: {e}", path.display()))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))
}

fn render_reports(reports: &[VerificationReport], format: Format) -> Result<String, String> {
    match format {
        Format::Json => {
            if reports.len() == 1 {
                serde_json::to_string_pretty(&reports[0])
            } else {
                serde_json::to_string_pretty(reports)
            }
            .map_err(|e| e.to_string())
        }
        Format::Csv => {
            let mut text = String::new();
            for report in reports {
                text.push_str(&report.lambda_csv());
            }
            Ok(text)
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> CliResult {
    let comps = compositions(args.r.max(1)).map_err(|e| e.to_string())?;
    if args.r < 2 || comps.is_empty() {
        return Err(format!(
            "verification needs r >= 2 and a nonempty composition list (r = {}, {} compositions)",
            args.r,
            comps.len()
        ));
    }
    if args.dry_run {
        eprintln!(
            "dry run: r = {}, {} compositions, modes {:?}",
            args.r,
            comps.len(),
            args.chi.modes().iter().map(|m| m.label()).collect::<Vec<_>>()
        );
        return Ok(Outcome::Pass);
    }
    let mut reports = Vec::new();
    let mut all_zero = true;
    for mode in args.chi.modes() {
        let report = verify_bpz(args.r, mode).map_err(|e| e.to_string())?;
        all_zero &= report.all_zero;
        eprintln!(
            "r = {}, chi = {}: all_zero = {} ({} compositions, {} ms)",
            report.r, report.chi_mode, report.all_zero, report.n_compositions, report.elapsed_ms
        );
        reports.push(report);
    }
    write_artifact(&args.out, &render_reports(&reports, args.format)?)?;
    Ok(if all_zero { Outcome::Pass } else { Outcome::Finding })
}

fn cmd_table(args: TableArgs) -> CliResult {
    if args.r < 2 {
        return Err(format!("table needs r >= 2, got {}", args.r));
    }
    let mut reports = Vec::new();
    for mode in args.chi.modes() {
        reports.push(verify_bpz(args.r, mode).map_err(|e| e.to_string())?);
    }
    write_artifact(&args.out, &render_reports(&reports, args.format)?)?;
    Ok(Outcome::Pass)
}

fn cmd_oracle_jet(args: JetArgs) -> CliResult {
    let mut reports = Vec::new();
    let mut all_zero = true;
    for mode in args.chi.modes() {
        let report = verify_integrand_bpz(args.r, mode, args.n, args.trials, args.seed)
            .map_err(|e| e.to_string())?;
        all_zero &= report.all_zero;
        eprintln!(
            "jet oracle r = {}, chi = {}, N = {}: all_zero = {} over {} trials",
            report.r,
            report.mode,
            report.n,
            report.all_zero,
            report.trials.len()
        );
        reports.push(report);
    }
    let text = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(&reports)
    }
    .map_err(|e| e.to_string())?;
    write_artifact(&args.out, &text)?;
    Ok(if all_zero { Outcome::Pass } else { Outcome::Finding })
}

fn cmd_oracle_coulomb(args: CoulombArgs) -> CliResult {
    let text = read_file(&args.config)?;
    let base: CoulombConfig = CoulombConfig::from_json(&text).map_err(|e| e.to_string())?;
    let modes = match args.chi {
        Some(chi) => chi.modes(),
        None => vec![base.chi_mode],
    };
    let mut reports = Vec::new();
    let mut pass = true;
    for mode in modes {
        let mut cfg = base.clone();
        cfg.chi_mode = mode;
        if let Some(tol) = args.tol {
            cfg.bpz_tol = tol;
        }
        if let Some(l) = args.l {
            cfg.l = l;
        }
        cfg.validate().map_err(|e| e.to_string())?;
        let report = verify_coulomb_bpz(&cfg).map_err(|e| e.to_string())?;
        eprintln!(
            "coulomb oracle r = {}, chi = {}, l = {}: {:?} (normalized residual {:.3e}, tol {:.1e})",
            report.r, report.chi_mode, report.l, report.status, report.normalized_residual,
            report.tolerance
        );
        match report.status {
            CoulombStatus::Pass => {}
            CoulombStatus::Fail => pass = false,
            CoulombStatus::Inconclusive => {
                return Err(format!(
                    "quadrature did not converge (normalized residual estimate {:.3e})",
                    report.normalized_residual
                ));
            }
        }
        reports.push(report);
    }
    let text = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(&reports)
    }
    .map_err(|e| e.to_string())?;
    write_artifact(&args.out, &text)?;
    Ok(if pass { Outcome::Pass } else { Outcome::Finding })
}

fn cmd_render(args: RenderArgs) -> CliResult {
    let text = read_file(&args.config)?;
    let cfg = PointConfig::from_json(&text).map_err(|e| e.to_string())?;
    let mut values = Vec::new();
    for n in 1..=args.n.max(1) {
        let v = cfg.evaluate_p(n).map_err(|e| e.to_string())?;
        values.push([v.re, v.im]);
    }
    let payload = serde_json::json!({
        "degenerate": [cfg.degenerate().re, cfg.degenerate().im],
        "p_values": values,
    });
    let text = serde_json::to_string_pretty(&payload).map_err(|e| e.to_string())?;
    write_artifact(&args.out, &text)?;
    Ok(Outcome::Pass)
}

fn cmd_bench(args: BenchArgs) -> CliResult {
    if args.r < 2 {
        return Err(format!("bench needs r >= 2, got {}", args.r));
    }
    let modes = args.chi.modes();
    println!("{:>3} {:>10} {:>14} {:>10}", "r", "chi", "compositions", "ms");
    for r in 2..=args.r {
        for &mode in &modes {
            let report = verify_bpz(r, mode).map_err(|e| e.to_string())?;
            if !report.all_zero {
                return Ok(Outcome::Finding);
            }
            println!(
                "{:>3} {:>10} {:>14} {:>10}",
                r, report.chi_mode.label(), report.n_compositions, report.elapsed_ms
            );
        }
    }
    Ok(Outcome::Pass)
}
