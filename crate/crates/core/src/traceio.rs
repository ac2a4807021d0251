//! Trace files, predictors and synthetic scenario traces.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::semantics::{Rho, StateSample};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("cannot read trace: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column at row {row}")]
    MissingColumn { row: usize },
    #[error("header must start with `time`")]
    BadHeader,
    #[error("non-numeric value `{value}` at row {row}")]
    NonNumeric { row: usize, value: String },
    #[error("non-uniform sampling at row {row}")]
    NonUniform { row: usize },
    #[error("trace is empty")]
    Empty,
    #[error("trace exhausted: step {step} needs {needed} samples, trace has {len}")]
    Exhausted {
        step: usize,
        needed: usize,
        len: usize,
    },
    #[error("predictor `none` requires a formula with zero horizon (horizon is {horizon})")]
    NoPredictor { horizon: usize },
    #[error("invalid scenario: {0}")]
    Geometry(String),
}

/// A uniformly sampled trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub samples: Vec<StateSample>,
    /// Sampling period; `None` for traces with fewer than two samples.
    pub delta_t: Option<f64>,
    /// Variable names in column order.
    pub variables: Vec<String>,
}

impl Trace {
    /// Builds a trace from samples, inferring the period from the first two
    /// time stamps without validating uniformity.
    pub fn new(samples: Vec<StateSample>) -> Self {
        let delta_t = match samples.as_slice() {
            [a, b, ..] => Some(b.time - a.time),
            _ => None,
        };
        let mut variables: Vec<String> = samples
            .first()
            .map(|s| s.values.keys().cloned().collect())
            .unwrap_or_default();
        variables.sort();
        Trace {
            samples,
            delta_t,
            variables,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Returns samples `0..=end` as a new trace.
    pub fn prefix(&self, end: usize) -> Trace {
        Trace {
            samples: self.samples[..=end].to_vec(),
            delta_t: self.delta_t,
            variables: self.variables.clone(),
        }
    }
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<Trace, TraceError> {
    parse_trace(File::open(path)?)
}

/// Parses a trace CSV: header `time,var1,...`, one row per sample, `#` comments.
pub fn parse_trace<R: Read>(reader: R) -> Result<Trace, TraceError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.get(0) != Some("time") {
        return Err(TraceError::BadHeader);
    }
    let variables: Vec<String> = header.iter().skip(1).map(str::to_string).collect();

    let mut samples = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(TraceError::MissingColumn { row });
        }
        let num = |s: &str| -> Result<f64, TraceError> {
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(TraceError::NonNumeric {
                    row,
                    value: s.to_string(),
                }),
            }
        };
        let mut sample = StateSample::new(num(&rec[0])?);
        for (name, cell) in variables.iter().zip(rec.iter().skip(1)) {
            if cell.is_empty() {
                return Err(TraceError::MissingColumn { row });
            }
            sample.values.insert(name.clone(), num(cell)?);
        }
        samples.push(sample);
    }
    if samples.is_empty() {
        return Err(TraceError::Empty);
    }

    let delta_t = if samples.len() >= 2 {
        let dt = samples[1].time - samples[0].time;
        if dt.is_nan() || dt <= 0.0 {
            return Err(TraceError::NonUniform { row: 1 });
        }
        for k in 1..samples.len() {
            let step = samples[k].time - samples[k - 1].time;
            if (step - dt).abs() > 1e-6 * dt {
                return Err(TraceError::NonUniform { row: k });
            }
        }
        Some(dt)
    } else {
        None
    };

    Ok(Trace {
        samples,
        delta_t,
        variables,
    })
}

/// Source of the `Hrz` future samples supplied to the monitor at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictorMode {
    /// Zero-order hold: repeat the current sample.
    Hold,
    /// Read the actual future samples from the trace.
    Perfect,
    /// No predictions; only valid for formulas with zero horizon.
    None,
}

impl FromStr for PredictorMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hold" => Ok(PredictorMode::Hold),
            "perfect" => Ok(PredictorMode::Perfect),
            "none" => Ok(PredictorMode::None),
            other => Err(format!("unknown predictor `{other}`")),
        }
    }
}

pub fn predict(
    mode: PredictorMode,
    trace: &Trace,
    i: usize,
    horizon: usize,
) -> Result<Vec<StateSample>, TraceError> {
    match mode {
        PredictorMode::Hold => Ok(vec![trace.samples[i].clone(); horizon]),
        PredictorMode::Perfect => {
            if i + horizon >= trace.len() {
                return Err(TraceError::Exhausted {
                    step: i,
                    needed: i + horizon + 1,
                    len: trace.len(),
                });
            }
            Ok(trace.samples[i + 1..=i + horizon].to_vec())
        }
        PredictorMode::None => {
            if horizon > 0 {
                Err(TraceError::NoPredictor { horizon })
            } else {
                Ok(Vec::new())
            }
        }
    }
}

/// Normalized air-to-fuel ratio `lambda`: 1.0 everywhere except a rectangular
/// excursion to 1.2 over `[excursion_start, excursion_start + excursion_len)`.
pub fn gen_case_study_trace(
    excursion_start: f64,
    excursion_len: f64,
    total: f64,
    delta_t: f64,
) -> Result<Trace, TraceError> {
    if delta_t.is_nan() || delta_t <= 0.0 || total.is_nan() || total <= 0.0 {
        return Err(TraceError::Geometry(
            "period and duration must be positive".into(),
        ));
    }
    if excursion_start < 0.0
        || excursion_len < 0.0
        || excursion_start + excursion_len > total + 1e-9
    {
        return Err(TraceError::Geometry(
            "excursion must lie within [0, total]".into(),
        ));
    }
    let n = (total / delta_t).round() as usize;
    let first = (excursion_start / delta_t).round() as usize;
    let end = ((excursion_start + excursion_len) / delta_t).round() as usize;
    let samples = (0..=n)
        .map(|k| {
            let lambda = if k >= first && k < end { 1.2 } else { 1.0 };
            StateSample::new(k as f64 * delta_t).with("lambda", lambda)
        })
        .collect();
    Ok(Trace {
        samples,
        delta_t: Some(delta_t),
        variables: vec!["lambda".into()],
    })
}

/// One row of monitor output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputRow {
    pub step: usize,
    pub time: f64,
    pub robustness: Rho,
}

pub fn write_output<W: Write>(out: W, rows: &[OutputRow]) -> Result<(), TraceError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "time", "robustness"])?;
    for r in rows {
        w.write_record([
            r.step.to_string(),
            r.time.to_string(),
            r.robustness.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
