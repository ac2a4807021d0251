//! Drivers behind the `robmon` command line: trace monitoring, benchmark
//! formula templates and overhead measurement, and the settling-time scenario.

mod bench;
mod case_study;
mod run;
mod templates;

pub use bench::{run_bench, run_sweep, BenchReport, SweepReport, SWEEP_HORIZONS};
pub use case_study::{
    case_study_formula, case_study_predicates, run_case_study, CaseStudyParams, Variant,
};
pub use run::{run_monitor, RunConfig, RunError, RunOutcome};
pub use templates::{gen_template, Template, TemplateError, TemplateKind};
