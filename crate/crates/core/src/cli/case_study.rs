use std::fmt;
use std::str::FromStr;

use crate::formula::{seconds_to_samples, Formula, FormulaError};
use crate::monitor::Monitor;
use crate::semantics::{parse_predicates, PredicateMap};
use crate::traceio::{gen_case_study_trace, predict, OutputRow, PredictorMode, TraceError};

use super::run::RunError;

/// Formulation of the air-to-fuel settling requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Past only: when out of bounds, lambda settled for 1 s within the last 2 s.
    Pt,
    /// Future only: when out of bounds, lambda settles within 1 s and stays for 1 s.
    Ft,
    /// The future requirement must have held throughout the last 2 s.
    Ptft,
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pt" => Ok(Variant::Pt),
            "ft" => Ok(Variant::Ft),
            "ptft" => Ok(Variant::Ptft),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Pt => "pt",
            Variant::Ft => "ft",
            Variant::Ptft => "ptft",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseStudyParams {
    pub delta_t: f64,
    pub excursion_start: f64,
    pub excursion_len: f64,
    pub total: f64,
}

/// `inb` holds while lambda is within ±10% of stoichiometric; "out of bounds"
/// is `not inb`.
pub fn case_study_predicates() -> PredicateMap {
    parse_predicates("inb: 0.9 <= lambda <= 1.1").expect("static predicate")
}

/// Formula text for `variant` with second bounds converted to samples.
pub fn case_study_formula(variant: Variant, delta_t: f64) -> Result<String, FormulaError> {
    let one = seconds_to_samples(1.0, delta_t)?;
    let two = seconds_to_samples(2.0, delta_t)?;
    let out = "(not inb)";
    let settled = format!("(not {out})");
    Ok(match variant {
        Variant::Pt => format!("{out} -> once[0,{one}] historically[0,{one}] {settled}"),
        Variant::Ft => format!("{out} -> eventually[0,{one}] always[0,{one}] {settled}"),
        Variant::Ptft => {
            format!(
                "historically[0,{two}] ({out} -> eventually[0,{one}] always[0,{one}] {settled})"
            )
        }
    })
}

/// Monitors the synthetic lambda trace. The past-only variant runs without a
/// predictor; the others use a zero-order hold.
pub fn run_case_study(
    variant: Variant,
    params: &CaseStudyParams,
) -> Result<Vec<OutputRow>, RunError> {
    let text = case_study_formula(variant, params.delta_t)?;
    let formula = Formula::parse(&text)?;
    let trace = gen_case_study_trace(
        params.excursion_start,
        params.excursion_len,
        params.total,
        params.delta_t,
    )?;
    let mode = if formula.horizon() == 0 {
        PredictorMode::None
    } else {
        PredictorMode::Hold
    };
    let mut monitor = Monitor::new(formula, &case_study_predicates())?;
    let hrz = monitor.horizon();
    let mut rows = Vec::with_capacity(trace.len());
    for (i, sample) in trace.samples.iter().enumerate() {
        let predictions = predict(mode, &trace, i, hrz)?;
        let robustness = monitor.step(sample, &predictions)?;
        rows.push(OutputRow {
            step: i,
            time: sample.time,
            robustness,
        });
    }
    Ok(rows)
}

impl From<TraceError> for RunError {
    fn from(e: TraceError) -> Self {
        RunError::Input(e.to_string())
    }
}
