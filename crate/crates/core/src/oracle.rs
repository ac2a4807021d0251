//! Reference semantics evaluated directly from the recursive definitions on a
//! finite trace. Nothing here is incremental; it exists to check the monitor.
//!
//! On a finite trace `s_0 .. s_last`, an Until window `[i+l, i+u]` is cut at
//! `last` and a Since window `[i-u', i-l']` at 0; an empty window yields `-inf`.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::formula::{Formula, NodeKind};
use crate::semantics::{emax, emin, Observation, Rho, SemanticsError, StateSample};
use crate::traceio::Trace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("index {index} out of range for trace of length {len}")]
    OutOfRange { index: usize, len: usize },
    #[error("unbound atom `{0}`")]
    UnboundAtom(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Memoizing evaluator of the robust semantics over a fixed sample sequence.
pub struct Evaluator<'a, O> {
    formula: &'a Formula,
    bindings: &'a BTreeMap<String, O>,
    samples: &'a [StateSample],
    memo: HashMap<(usize, usize), Rho>,
    truth: HashMap<(usize, usize), bool>,
}

impl<'a, O: Observation> Evaluator<'a, O> {
    pub fn new(
        formula: &'a Formula,
        bindings: &'a BTreeMap<String, O>,
        samples: &'a [StateSample],
    ) -> Self {
        Evaluator {
            formula,
            bindings,
            samples,
            memo: HashMap::new(),
            truth: HashMap::new(),
        }
    }

    /// Robustness of the root at time `i`.
    pub fn robustness(&mut self, i: usize) -> Result<Rho, OracleError> {
        self.node(0, i)
    }

    /// Robustness of subformula `k` at time `i`.
    pub fn node(&mut self, k: usize, i: usize) -> Result<Rho, OracleError> {
        if i >= self.samples.len() {
            return Err(OracleError::OutOfRange {
                index: i,
                len: self.samples.len(),
            });
        }
        if let Some(v) = self.memo.get(&(k, i)) {
            return Ok(*v);
        }
        let last = self.samples.len() - 1;
        let v = match self.formula.node(k).kind.clone() {
            NodeKind::True => Rho::TOP,
            NodeKind::Atom(name) => {
                let obs = self
                    .bindings
                    .get(&name)
                    .ok_or_else(|| OracleError::UnboundAtom(name.clone()))?;
                obs.distance(&self.samples[i])?
            }
            NodeKind::Not(m) => -self.node(m, i)?,
            NodeKind::Or(m, n) => emax([self.node(m, i)?, self.node(n, i)?]),
            NodeKind::Until(m, n, iv) => {
                let hi = (i + iv.upper.expect("bounded")).min(last);
                let mut terms = Vec::new();
                for j in i + iv.lower..=hi {
                    let mut parts = vec![self.node(n, j)?];
                    for r in i..j {
                        parts.push(self.node(m, r)?);
                    }
                    terms.push(emin(parts));
                }
                emax(terms)
            }
            NodeKind::Since(m, n, iv) => {
                let mut terms = Vec::new();
                if i >= iv.lower {
                    let lo = match iv.upper {
                        Some(u) => i.saturating_sub(u),
                        None => 0,
                    };
                    for j in lo..=i - iv.lower {
                        let mut parts = vec![self.node(n, j)?];
                        for r in j + 1..=i {
                            parts.push(self.node(m, r)?);
                        }
                        terms.push(emin(parts));
                    }
                }
                emax(terms)
            }
        };
        self.memo.insert((k, i), v);
        Ok(v)
    }

    /// Classical finite-trace truth value of subformula `k` at time `i`; an atom
    /// holds when its signed distance is non-negative.
    pub fn holds(&mut self, k: usize, i: usize) -> Result<bool, OracleError> {
        if i >= self.samples.len() {
            return Err(OracleError::OutOfRange {
                index: i,
                len: self.samples.len(),
            });
        }
        if let Some(v) = self.truth.get(&(k, i)) {
            return Ok(*v);
        }
        let last = self.samples.len() - 1;
        let v = match self.formula.node(k).kind.clone() {
            NodeKind::True => true,
            NodeKind::Atom(name) => {
                let obs = self
                    .bindings
                    .get(&name)
                    .ok_or_else(|| OracleError::UnboundAtom(name.clone()))?;
                obs.distance(&self.samples[i])? >= Rho::ZERO
            }
            NodeKind::Not(m) => !self.holds(m, i)?,
            NodeKind::Or(m, n) => self.holds(m, i)? || self.holds(n, i)?,
            NodeKind::Until(m, n, iv) => {
                let hi = (i + iv.upper.expect("bounded")).min(last);
                let mut found = false;
                for j in i + iv.lower..=hi {
                    if self.holds(n, j)?
                        && (i..j).try_fold(true, |acc, r| {
                            Ok::<_, OracleError>(acc && self.holds(m, r)?)
                        })?
                    {
                        found = true;
                        break;
                    }
                }
                found
            }
            NodeKind::Since(m, n, iv) => {
                let mut found = false;
                if i >= iv.lower {
                    let lo = iv.upper.map_or(0, |u| i.saturating_sub(u));
                    for j in lo..=i - iv.lower {
                        if self.holds(n, j)?
                            && (j + 1..=i).try_fold(true, |acc, r| {
                                Ok::<_, OracleError>(acc && self.holds(m, r)?)
                            })?
                        {
                            found = true;
                            break;
                        }
                    }
                }
                found
            }
        };
        self.truth.insert((k, i), v);
        Ok(v)
    }
}

/// Robustness of `formula` at index `i` of `trace`.
pub fn offline_robustness<O: Observation>(
    formula: &Formula,
    bindings: &BTreeMap<String, O>,
    trace: &Trace,
    i: usize,
) -> Result<Rho, OracleError> {
    Evaluator::new(formula, bindings, &trace.samples).robustness(i)
}

/// Boolean satisfaction of `formula` at index `i` of `trace`.
pub fn boolean_eval<O: Observation>(
    formula: &Formula,
    bindings: &BTreeMap<String, O>,
    trace: &Trace,
    i: usize,
) -> Result<bool, OracleError> {
    Evaluator::new(formula, bindings, &trace.samples).holds(0, i)
}
