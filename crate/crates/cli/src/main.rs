use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use symcenter::config::{AnalysisConfig, ModeChoice};
use symcenter::pipeline::{analyze, export_families, run_families, Analysis};
use symcenter::presets::{preset, PRESETS};
use symcenter::validate::{validate, Expectations};

/// Environment variable holding the log filter.
const LOG_ENV: &str = "SYMCENTER_LOG";

#[derive(Parser)]
#[command(name = "symcenter", version, about = "Bifurcation of periodic orbits from symmetric central configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectra, hypotheses, resonance window and certificates.
    Analyze(Input),
    /// Continue and verify the periodic families.
    Orbits {
        #[command(flatten)]
        input: Input,
        /// Frequency index; every certified index when omitted.
        #[arg(long)]
        j0: Option<usize>,
    },
    /// Check the built-in presets against their reference values.
    Validate {
        /// Presets to run (all when omitted).
        #[arg(long = "preset", value_name = "NAME")]
        presets: Vec<String>,
    },
    /// Evaluate an Euler ring expression such as `S[0;(2,1)] * X(3)`.
    Euler { expression: String },
}

#[derive(Args)]
struct Input {
    #[arg(long, value_name = "PATH", conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Output directory; defaults to the config file's directory, or `.` for presets.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ambient,
    Com,
}

impl Input {
    fn load(&self) -> anyhow::Result<(AnalysisConfig, PathBuf)> {
        let (mut config, base) = match (&self.config, &self.preset) {
            (Some(path), _) => {
                let config = AnalysisConfig::from_file(path)?;
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (config, base)
            }
            (None, Some(name)) => (preset(name)?, PathBuf::from(".")),
            (None, None) => bail!("one of --config or --preset is required (presets: {})", PRESETS.join(", ")),
        };
        if let Some(m) = self.mode {
            config.options.mode = match m {
                Mode::Ambient => ModeChoice::Ambient,
                Mode::Com => ModeChoice::ComReduced,
            };
        }
        Ok((config, self.out.clone().unwrap_or(base)))
    }
}

fn write_report(analysis: &Analysis, base: &Path) -> anyhow::Result<PathBuf> {
    let (report, _) = analysis.config.outputs.resolve(base);
    analysis
        .report
        .write(&report)
        .with_context(|| format!("writing {}", report.display()))?;
    Ok(report)
}

fn print_summary(analysis: &Analysis) {
    for o in &analysis.report.orbits {
        let betas: Vec<String> = o
            .spectra
            .iter()
            .find(|s| s.mode == analysis.config.options.mode.spectral_mode())
            .map(|s| s.betas.iter().map(|(b, m)| format!("{b:.9} (x{m})")).collect())
            .unwrap_or_default();
        let status = if o.hypotheses.all_hold() {
            "hypotheses hold".to_string()
        } else {
            format!("hypotheses fail: {}", o.failures.join(", "))
        };
        let tag = if o.control { " [control]" } else { "" };
        println!("{}{tag}: U = {:.12}, betas [{}], {status}", o.label, o.value, betas.join(", "));
        for c in &o.certificates {
            println!(
                "  j0 = {}: chi- = {}, chi+ = {}, changed = {}",
                c.j0, c.chi_minus, c.chi_plus, c.changed
            );
        }
    }
}

fn cmd_analyze(input: &Input) -> anyhow::Result<u8> {
    let (config, base) = input.load()?;
    let analysis = analyze(&config)?;
    let path = write_report(&analysis, &base)?;
    print_summary(&analysis);
    println!("report written to {}", path.display());
    Ok(analysis.exit_code() as u8)
}

fn cmd_orbits(input: &Input, j0: Option<usize>) -> anyhow::Result<u8> {
    let (config, base) = input.load()?;
    let mut analysis = analyze(&config)?;
    if !analysis.hypotheses_hold() {
        write_report(&analysis, &base)?;
        print_summary(&analysis);
        eprintln!("hypotheses fail; families are not continued");
        return Ok(2);
    }
    let families = match run_families(&mut analysis, j0) {
        Ok(f) => f,
        Err(e) => {
            write_report(&analysis, &base)?;
            return Err(e.into());
        }
    };
    let (_, traj_dir) = config.outputs.resolve(&base);
    let written = export_families(&analysis.model, &families, &traj_dir, config.options.csv_rows)?;
    let report = write_report(&analysis, &base)?;
    println!(
        "{:<8} {:>3} {:>6} {:>12} {:>14} {:>14} {:>10} {:>10}",
        "orbit", "j0", "branch", "amplitude", "period", "limit", "residual", "closure"
    );
    for (label, fam) in &families {
        for s in &fam.samples {
            let closure = s.closure_error.map(|c| format!("{c:.2e}")).unwrap_or_else(|| "-".into());
            println!(
                "{label:<8} {:>3} {:>6} {:>12.4e} {:>14.9} {:>14.9} {:>10.2e} {closure:>10}",
                fam.j0, fam.branch, s.amplitude, s.period, fam.limit_period, s.residual
            );
        }
        if let Some(t) = &fam.truncated {
            println!("{label} j0 = {} branch {}: truncated ({t})", fam.j0, fam.branch);
        }
    }
    println!("{} CSV files in {}", written.len(), traj_dir.display());
    println!("report written to {}", report.display());
    Ok(0)
}

fn cmd_validate(presets: &[String]) -> anyhow::Result<u8> {
    let table = validate(presets, &Expectations::default())?;
    println!("{table}");
    Ok(if table.all_pass() { 0 } else { 2 })
}

fn cmd_euler(expression: &str) -> anyhow::Result<u8> {
    println!("{}", symcenter::expr::evaluate(expression)?);
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(input) => cmd_analyze(input),
        Command::Orbits { input, j0 } => cmd_orbits(input, *j0),
        Command::Validate { presets } => cmd_validate(presets),
        Command::Euler { expression } => cmd_euler(expression),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
