//! On-line robustness monitoring for metric temporal logic with bounded
//! future and bounded or unbounded past operators over uniformly sampled
//! real-valued traces.
//!
//! ```
//! use robmon::{formula::Formula, monitor::Monitor, semantics::{parse_predicates, StateSample}};
//!
//! let formula = Formula::parse("once[0,inf) q").unwrap();
//! let preds = parse_predicates("q: y >= 4").unwrap();
//! let mut monitor = Monitor::new(formula, &preds).unwrap();
//! let rho = monitor.step(&StateSample::new(0.0).with("y", 7.0), &[]).unwrap();
//! assert_eq!(rho.value(), 3.0);
//! ```

pub mod cli;
pub mod formula;
pub mod monitor;
pub mod oracle;
pub mod semantics;
pub mod traceio;

pub use formula::{Expr, Formula, FormulaError, Interval, NodeKind};
pub use monitor::{Monitor, MonitorError};
pub use semantics::{emax, emin, Observation, Predicate, PredicateMap, Rho, SetSpec, StateSample};
pub use traceio::{PredictorMode, Trace};
