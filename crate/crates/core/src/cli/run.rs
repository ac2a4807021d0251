use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;

use thiserror::Error;

use crate::formula::{Formula, FormulaError, TimeUnits};
use crate::monitor::{Monitor, MonitorError};
use crate::semantics::{parse_predicates, Rho, SemanticsError};
use crate::traceio::{load_trace, predict, write_output, OutputRow, PredictorMode};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("formula: {0}")]
    Formula(#[from] FormulaError),
}

impl RunError {
    /// Process exit code: 1 usage, 3 input data, 4 formula.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 1,
            RunError::Input(_) => 3,
            RunError::Formula(_) => 4,
        }
    }
}

impl From<SemanticsError> for RunError {
    fn from(e: SemanticsError) -> Self {
        RunError::Input(e.to_string())
    }
}

impl From<MonitorError> for RunError {
    fn from(e: MonitorError) -> Self {
        match e {
            MonitorError::UnboundAtoms(_) => RunError::Usage(e.to_string()),
            MonitorError::PredictionLength { .. } => RunError::Usage(e.to_string()),
            MonitorError::Semantics(s) => s.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub formula: PathBuf,
    pub predicates: PathBuf,
    pub trace: PathBuf,
    pub predictor: PredictorMode,
    pub seconds: bool,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub rows: Vec<OutputRow>,
}

impl RunOutcome {
    pub fn violated(&self) -> bool {
        self.rows.iter().any(|r| r.robustness < Rho::ZERO)
    }
}

/// Streams a trace file through the monitor.
///
/// With the perfect predictor, rows are emitted only for steps whose future
/// samples exist in the trace; otherwise every step is emitted.
pub fn run_monitor(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let read = |p: &PathBuf| {
        fs::read_to_string(p).map_err(|e| RunError::Usage(format!("{}: {e}", p.display())))
    };
    let formula_text = read(&config.formula)?;
    let predicates = parse_predicates(&read(&config.predicates)?)?;
    let trace = load_trace(&config.trace)?;

    let units = if config.seconds {
        let delta_t = trace.delta_t.ok_or_else(|| {
            RunError::Usage("seconds mode needs at least two samples to infer the period".into())
        })?;
        TimeUnits::Seconds { delta_t }
    } else {
        TimeUnits::Samples
    };
    let formula = Formula::parse_with_units(formula_text.trim(), units)?;
    let hrz = formula.horizon();
    if config.predictor == PredictorMode::None && hrz > 0 {
        return Err(RunError::Usage(format!(
            "predictor `none` requires a formula with zero horizon (horizon is {hrz})"
        )));
    }
    let mut monitor = Monitor::new(formula, &predicates)?;

    let last = match config.predictor {
        PredictorMode::Perfect => trace.len().checked_sub(hrz + 1),
        _ => Some(trace.len() - 1),
    };
    let mut rows = Vec::new();
    if let Some(last) = last {
        for i in 0..=last {
            let predictions = predict(config.predictor, &trace, i, hrz)?;
            let robustness = monitor.step(&trace.samples[i], &predictions)?;
            rows.push(OutputRow {
                step: i,
                time: trace.samples[i].time,
                robustness,
            });
        }
    }

    if let Some(out) = &config.out {
        let file = fs::File::create(out)
            .map_err(|e| RunError::Usage(format!("{}: {e}", out.display())))?;
        write_output(BufWriter::new(file), &rows)?;
    }
    Ok(RunOutcome { rows })
}
