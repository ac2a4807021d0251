use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::semantics::{Predicate, PredicateMap, SetSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("nesting depth must be in 1..=9, got {0}")]
    Nesting(usize),
    #[error("steps >= 30 required, got {0}")]
    TooFewSteps(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateKind {
    /// Nested eventually operators.
    E,
    /// Nested until operators.
    U,
}

impl FromStr for TemplateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "E" | "e" => Ok(TemplateKind::E),
            "U" | "u" => Ok(TemplateKind::U),
            other => Err(format!("unknown template `{other}`")),
        }
    }
}

impl fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TemplateKind::E => "E",
            TemplateKind::U => "U",
        })
    }
}

/// A generated benchmark formula with predicates for every atom it uses.
#[derive(Debug, Clone)]
pub struct Template {
    pub text: String,
    pub predicates: PredicateMap,
}

/// Generates `p0 -> psi_n(H / n)`.
///
/// * `E`: `psi_1(h) = eventually[0,h] a`, `psi_n(h) = eventually[0,h] (b and psi_{n-1}(h))`.
/// * `U`: `psi_1(h) = a U[0,h] b`, `psi_n(h) = a U[0,h] (b and psi_{n-1}(h))`.
///
/// Every level of nesting adds its window length to the horizon. When `n` does
/// not divide `H`, the first `H mod n` levels (outermost first) get a window one
/// sample longer, so the horizon is always exactly `H`.
/// Each atom `pK` is fresh and bound to `-5 <= xK <= 5`.
pub fn gen_template(
    kind: TemplateKind,
    n: usize,
    horizon: usize,
) -> Result<Template, TemplateError> {
    if !(1..=9).contains(&n) {
        return Err(TemplateError::Nesting(n));
    }
    let width = |level: usize| horizon / n + usize::from(level < horizon % n);
    let mut next_atom = 0usize;
    let mut fresh = || {
        let name = format!("p{next_atom}");
        next_atom += 1;
        name
    };

    let antecedent = fresh();
    let mut outer = Vec::with_capacity(n);
    for level in 0..n - 1 {
        let h = width(level);
        match kind {
            TemplateKind::E => outer.push(format!("eventually[0,{h}] ({} and ", fresh())),
            TemplateKind::U => {
                let a = fresh();
                let b = fresh();
                outer.push(format!("({a} U[0,{h}] ({b} and "));
            }
        }
    }
    let h = width(n - 1);
    let innermost = match kind {
        TemplateKind::E => format!("eventually[0,{h}] {}", fresh()),
        TemplateKind::U => {
            let a = fresh();
            let b = fresh();
            format!("({a} U[0,{h}] {b})")
        }
    };
    let closing = match kind {
        TemplateKind::E => ")",
        TemplateKind::U => "))",
    };
    let mut body = outer.concat();
    body.push_str(&innermost);
    body.push_str(&closing.repeat(n - 1));
    let text = format!("{antecedent} -> {body}");

    let predicates = (0..next_atom)
        .map(|k| {
            let name = format!("p{k}");
            let pred = Predicate::new(name.clone(), format!("x{k}"), SetSpec::Between(-5.0, 5.0));
            (name, pred)
        })
        .collect();
    Ok(Template { text, predicates })
}
