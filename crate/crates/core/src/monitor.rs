//! On-line robustness monitor.
//!
//! The state is a fixed `|φ| × (Hst + 1 + Hrz)` table of robustness values plus
//! one carry value per unbounded-Since row. Column `j` of the table refers to
//! absolute time `i + j`, where `i` is the current step. Each step:
//!
//! 1. saves the carry of every unbounded-Since row from column `-Hst + hst(φ_k)`;
//! 2. shifts every atom row one column left;
//! 3. recomputes every other row over `[-Hst + hst(φ_k), Hrz]`, bottom row
//!    first, Since rows left to right and all others right to left.
//!
//! Cells whose absolute time is negative (warm-up) are never computed. Reads of
//! such cells by a Since row return `-inf` for the trigger operand and the
//! row's own previous value, and `+inf` for the left operand.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::formula::{Formula, NodeKind};
use crate::semantics::{Observation, Rho, SemanticsError, StateSample};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonitorError {
    #[error("unbound atom(s): {}", .0.join(", "))]
    UnboundAtoms(Vec<String>),
    #[error("prediction length mismatch: expected {expected}, got {got}")]
    PredictionLength { expected: usize, got: usize },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Debug, Clone)]
enum Op {
    True,
    Atom(usize),
    Not(usize),
    Or(usize, usize),
    Until {
        m: usize,
        n: usize,
        lower: isize,
        upper: isize,
    },
    Since {
        m: usize,
        n: usize,
        lower: isize,
        upper: isize,
    },
    SinceUnbounded {
        m: usize,
        n: usize,
        lower: isize,
    },
}

#[derive(Debug, Clone)]
struct Row {
    op: Op,
    /// `-Hst + hst(φ_k)`: leftmost column recomputed each step.
    lo: isize,
}

/// Bounded-memory monitor for one formula.
#[derive(Debug, Clone)]
pub struct Monitor<O> {
    formula: Formula,
    observations: Vec<O>,
    rows: Vec<Row>,
    atom_rows: Vec<usize>,
    table: Vec<Rho>,
    pre: Vec<Rho>,
    /// Atom values for columns `0..=Hrz`, filled before the table is touched.
    scratch: Vec<Rho>,
    hrz: isize,
    hst: isize,
    width: usize,
    steps: usize,
}

impl<O: Observation + Clone> Monitor<O> {
    /// Allocates the table for `formula`; every atom must have a binding.
    pub fn new(formula: Formula, bindings: &BTreeMap<String, O>) -> Result<Self, MonitorError> {
        let missing: Vec<String> = formula
            .atoms()
            .iter()
            .filter(|a| !bindings.contains_key(*a))
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(MonitorError::UnboundAtoms(missing));
        }

        let hrz = formula.horizon() as isize;
        let hst = formula.history() as isize;
        let width = formula.width();
        let mut observations = Vec::new();
        let mut atom_rows = Vec::new();
        let rows: Vec<Row> = formula
            .nodes()
            .iter()
            .enumerate()
            .map(|(k, node)| {
                let op = match &node.kind {
                    NodeKind::True => Op::True,
                    NodeKind::Atom(a) => {
                        atom_rows.push(k);
                        observations.push(bindings[a].clone());
                        Op::Atom(observations.len() - 1)
                    }
                    NodeKind::Not(m) => Op::Not(*m),
                    NodeKind::Or(m, n) => Op::Or(*m, *n),
                    NodeKind::Until(m, n, iv) => Op::Until {
                        m: *m,
                        n: *n,
                        lower: iv.lower as isize,
                        upper: iv.upper.expect("future intervals are bounded") as isize,
                    },
                    NodeKind::Since(m, n, iv) => match iv.upper {
                        Some(u) => Op::Since {
                            m: *m,
                            n: *n,
                            lower: iv.lower as isize,
                            upper: u as isize,
                        },
                        None => Op::SinceUnbounded {
                            m: *m,
                            n: *n,
                            lower: iv.lower as isize,
                        },
                    },
                };
                Row {
                    op,
                    lo: -hst + node.hst as isize,
                }
            })
            .collect();

        let height = rows.len();
        let scratch = vec![Rho::BOTTOM; atom_rows.len() * (hrz as usize + 1)];
        Ok(Monitor {
            formula,
            observations,
            rows,
            atom_rows,
            table: vec![Rho::BOTTOM; height * width],
            pre: vec![Rho::BOTTOM; height],
            scratch,
            hrz,
            hst,
            width,
            steps: 0,
        })
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    /// `Hrz`: the number of predicted samples each step requires.
    pub fn horizon(&self) -> usize {
        self.hrz as usize
    }

    pub fn history(&self) -> usize {
        self.hst as usize
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    /// Number of completed steps.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Total number of stored robustness values (table cells plus carries).
    pub fn storage_len(&self) -> usize {
        self.table.len() + self.pre.len()
    }

    pub fn pre(&self) -> &[Rho] {
        &self.pre
    }

    /// Leftmost column recomputed for row `k`.
    pub fn lowest_column(&self, k: usize) -> isize {
        self.rows[k].lo
    }

    /// Value of row `k` at column `j` after the last step, or `None` when the
    /// cell is undefined (negative absolute time, outside the table, or left of
    /// the row's recomputation window).
    pub fn cell(&self, k: usize, j: isize) -> Option<Rho> {
        let row = self.rows.get(k)?;
        if self.steps == 0 || j < -self.hst || j > self.hrz || self.steps as isize - 1 + j < 0 {
            return None;
        }
        if !matches!(row.op, Op::Atom(_)) && j < row.lo {
            return None;
        }
        Some(self.at(k, j))
    }

    /// Processes sample `s_i` together with `Hrz` predicted samples and returns
    /// the robustness of the formula at step `i`.
    pub fn step(
        &mut self,
        current: &StateSample,
        predictions: &[StateSample],
    ) -> Result<Rho, MonitorError> {
        let hrz = self.hrz as usize;
        if predictions.len() != hrz {
            return Err(MonitorError::PredictionLength {
                expected: hrz,
                got: predictions.len(),
            });
        }
        // Atoms first; a failing sample leaves the state untouched.
        for (a, obs) in self.observations.iter().enumerate() {
            let base = a * (hrz + 1);
            self.scratch[base] = obs.distance(current)?;
            for (j, s) in predictions.iter().enumerate() {
                self.scratch[base + j + 1] = obs.distance(s)?;
            }
        }

        let now = self.steps as isize;

        for k in 0..self.rows.len() {
            if let Op::SinceUnbounded { .. } = self.rows[k].op {
                let lo = self.rows[k].lo;
                if now - 1 + lo >= 0 {
                    self.pre[k] = self.at(k, lo);
                }
            }
        }

        for &k in &self.atom_rows {
            let start = k * self.width;
            self.table.copy_within(start + 1..start + self.width, start);
        }

        for k in (0..self.rows.len()).rev() {
            let first = self.rows[k].lo.max(-now);
            match self.rows[k].op {
                Op::Atom(a) => {
                    let base = a * (hrz + 1);
                    for j in 0..=self.hrz {
                        let v = self.scratch[base + j as usize];
                        self.set(k, j, v);
                    }
                }
                Op::Since { .. } | Op::SinceUnbounded { .. } => {
                    for j in first..=self.hrz {
                        let v = self.cr(k, j, now);
                        self.set(k, j, v);
                    }
                }
                _ => {
                    for j in (first..=self.hrz).rev() {
                        let v = self.cr(k, j, now);
                        self.set(k, j, v);
                    }
                }
            }
        }

        self.steps += 1;
        Ok(self.at(0, 0))
    }

    #[inline]
    fn idx(&self, k: usize, j: isize) -> usize {
        k * self.width + (j + self.hst) as usize
    }

    #[inline]
    fn at(&self, k: usize, j: isize) -> Rho {
        self.table[self.idx(k, j)]
    }

    #[inline]
    fn set(&mut self, k: usize, j: isize, v: Rho) {
        let i = self.idx(k, j);
        self.table[i] = v;
    }

    /// Reads a cell, substituting `undefined` when its absolute time is negative.
    #[inline]
    fn read(&self, k: usize, j: isize, now: isize, undefined: Rho) -> Rho {
        if now + j < 0 {
            undefined
        } else {
            self.at(k, j)
        }
    }

    /// Robustness of row `k` at column `j` from already computed cells.
    fn cr(&self, k: usize, j: isize, now: isize) -> Rho {
        match self.rows[k].op {
            Op::True => Rho::TOP,
            Op::Atom(_) => self.at(k, j),
            Op::Not(m) => -self.at(m, j),
            Op::Or(m, n) => self.at(m, j).max(self.at(n, j)),
            Op::Until { m, n, lower, upper } => {
                if j + lower > self.hrz {
                    return Rho::BOTTOM;
                }
                let mut tmp_min = Rho::TOP;
                for jj in j..j + lower {
                    tmp_min = tmp_min.min(self.at(m, jj));
                }
                let mut acc = Rho::BOTTOM;
                let last = self.hrz.min(j + upper);
                for jj in j + lower..=last {
                    acc = acc.max(tmp_min.min(self.at(n, jj)));
                    tmp_min = tmp_min.min(self.at(m, jj));
                }
                acc
            }
            Op::Since { m, n, lower, upper } => {
                let mut tmp_min = Rho::TOP;
                for jj in j - lower + 1..=j {
                    tmp_min = tmp_min.min(self.read(m, jj, now, Rho::TOP));
                }
                let mut acc = Rho::BOTTOM;
                let mut jj = j - lower;
                while jj >= j - upper && now + jj >= 0 {
                    acc = acc.max(tmp_min.min(self.at(n, jj)));
                    if jj > j - upper {
                        tmp_min = tmp_min.min(self.at(m, jj));
                    }
                    jj -= 1;
                }
                acc
            }
            Op::SinceUnbounded { m, n, lower } => {
                let mut tmp_min = Rho::TOP;
                for jj in j - lower + 1..=j {
                    tmp_min = tmp_min.min(self.read(m, jj, now, Rho::TOP));
                }
                let chain = if j == self.rows[k].lo {
                    self.pre[k]
                } else {
                    self.read(k, j - 1, now, Rho::BOTTOM)
                };
                let carried = chain.min(self.at(m, j));
                let fresh = self.read(n, j - lower, now, Rho::BOTTOM).min(tmp_min);
                fresh.max(carried)
            }
        }
    }
}
