use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use robmon::cli::{
    run_bench, run_case_study, run_monitor, run_sweep, CaseStudyParams, RunConfig, RunError,
    TemplateKind, Variant, SWEEP_HORIZONS,
};
use robmon::traceio::{write_output, PredictorMode};

#[derive(Parser)]
#[command(name = "robmon", version, about = "On-line MTL robustness monitor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Predictor {
    Hold,
    Perfect,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum Units {
    Samples,
    Seconds,
}

#[derive(Subcommand)]
enum Command {
    /// Monitor a trace file and write per-step robustness as CSV.
    Monitor {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        predicates: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, value_enum)]
        predictor: Predictor,
        #[arg(long, value_enum, default_value = "samples")]
        time_units: Units,
        /// Exit with status 2 if any step has negative robustness.
        #[arg(long)]
        fail_on_violation: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure per-step monitor overhead on a generated template formula.
    Bench {
        #[arg(long, value_parser = parse_kind)]
        template: TemplateKind,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        horizon: usize,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Run H in {500, 1000, 2000, 4000} and report the log-log slope.
        #[arg(long)]
        sweep: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monitor the synthetic air-to-fuel ratio scenario.
    CaseStudy {
        #[arg(long, value_parser = parse_variant)]
        variant: Variant,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long)]
        excursion_start: f64,
        #[arg(long)]
        excursion_len: f64,
        #[arg(long)]
        total: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_kind(s: &str) -> Result<TemplateKind, String> {
    s.parse()
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<u8, RunError> {
    match cli.command {
        Command::Monitor {
            formula,
            predicates,
            trace,
            predictor,
            time_units,
            fail_on_violation,
            out,
        } => {
            let config = RunConfig {
                formula,
                predicates,
                trace,
                predictor: match predictor {
                    Predictor::Hold => PredictorMode::Hold,
                    Predictor::Perfect => PredictorMode::Perfect,
                    Predictor::None => PredictorMode::None,
                },
                seconds: matches!(time_units, Units::Seconds),
                out: Some(out),
            };
            let outcome = run_monitor(&config)?;
            Ok(if fail_on_violation && outcome.violated() {
                2
            } else {
                0
            })
        }
        Command::Bench {
            template,
            n,
            horizon,
            steps,
            sweep,
            seed,
        } => {
            let usage = |e: robmon::cli::TemplateError| RunError::Usage(e.to_string());
            let stdout = io::stdout();
            let mut w = stdout.lock();
            let reports = if sweep {
                let s = run_sweep(template, n, &SWEEP_HORIZONS, steps, seed).map_err(usage)?;
                let slope = s.slope;
                print_reports(&mut w, &s.reports);
                let _ = writeln!(w, "# log-log slope of mean step time vs H: {slope:.3}");
                return Ok(0);
            } else {
                vec![run_bench(template, n, horizon, steps, seed).map_err(usage)?]
            };
            print_reports(&mut w, &reports);
            Ok(0)
        }
        Command::CaseStudy {
            variant,
            dt,
            excursion_start,
            excursion_len,
            total,
            out,
        } => {
            let params = CaseStudyParams {
                delta_t: dt,
                excursion_start,
                excursion_len,
                total,
            };
            let rows = run_case_study(variant, &params)?;
            let file = File::create(&out)
                .map_err(|e| RunError::Usage(format!("{}: {e}", out.display())))?;
            write_output(BufWriter::new(file), &rows)?;
            Ok(0)
        }
    }
}

fn print_reports(w: &mut impl Write, reports: &[robmon::cli::BenchReport]) {
    let _ = writeln!(w, "template,n,horizon,steps,mean_ms,variance_ms2");
    for r in reports {
        let _ = writeln!(
            w,
            "{},{},{},{},{:.6},{:.6}",
            r.kind, r.n, r.horizon, r.steps, r.mean_ms, r.variance_ms2
        );
    }
}
