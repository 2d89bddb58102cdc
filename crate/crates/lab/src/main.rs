use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fgl_lab::config::{default_prec, parse_policy, Experiment, ExperimentConfig, Format, LabError};
use fgl_lab::experiments::{run, Output};
use fgl_lab::report::ExperimentReport;

#[derive(Parser)]
#[command(name = "fgl-lab", version, about = "Experiments on reduced Honda formal group laws")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Build the reduced Honda law and write it as a law file.
    Construct(Common),
    /// Validate a law file.
    VerifyLaw {
        law: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    Trichotomy(Common),
    Height(Common),
    Centralizer(Common),
    Normalizer(Common),
    Ramification(Common),
    Bench(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 2)]
    p: u64,
    #[arg(long, default_value_t = 2)]
    h: u32,
    /// Working field degree over F_p.
    #[arg(long)]
    field_deg: Option<u32>,
    /// Truncation degree N.
    #[arg(long)]
    prec: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Free choices for the endomorphism solver, as `degree=code,...`.
    #[arg(long, default_value = "")]
    policy: String,
    /// Where `construct` writes its report; stderr summary only when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl Common {
    fn config(&self, experiment: Experiment) -> Result<ExperimentConfig, LabError> {
        let mut c = ExperimentConfig::new(experiment, self.p, self.h);
        if let Some(n) = self.field_deg {
            c.field_deg = n;
        }
        c.prec = self.prec.unwrap_or_else(|| default_prec(experiment, self.p, self.h));
        c.seed = self.seed;
        c.format = match self.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        };
        c.out = self.out.clone();
        c.policy = parse_policy(&self.policy)?;
        Ok(c)
    }
}

fn render(report: &ExperimentReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), LabError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn summary(report: &ExperimentReport) {
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    eprintln!(
        "{}: {} checks, {} failed{}",
        report.config.experiment,
        report.checks.len(),
        failed,
        if report.precision_short { ", precision short" } else { "" }
    );
}

fn execute(cli: Cli) -> Result<i32, LabError> {
    let (experiment, common, law) = match &cli.verb {
        Verb::Construct(c) => (Experiment::Construct, c, None),
        Verb::VerifyLaw { law, common } => (Experiment::VerifyLaw, common, Some(law.clone())),
        Verb::Trichotomy(c) => (Experiment::Trichotomy, c, None),
        Verb::Height(c) => (Experiment::Height, c, None),
        Verb::Centralizer(c) => (Experiment::Centralizer, c, None),
        Verb::Normalizer(c) => (Experiment::Normalizer, c, None),
        Verb::Ramification(c) => (Experiment::Ramification, c, None),
        Verb::Bench(c) => (Experiment::Bench, c, None),
    };
    let mut config = common.config(experiment)?;
    config.law = law;
    let output = run(&config)?;
    let report = output.report();
    match &output {
        Output::Law(file, report) => {
            emit(config.out.as_ref(), &file.to_json())?;
            if let Some(path) = &common.report {
                std::fs::write(path, render(report, config.format))?;
            }
        }
        Output::Report(report) => emit(config.out.as_ref(), &render(report, config.format))?,
    }
    summary(report);
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let code = match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
