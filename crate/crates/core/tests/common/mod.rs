#![allow(dead_code)]

pub mod props;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::Rng;

use robmon::formula::{Expr, Formula, Interval, NodeKind};
use robmon::monitor::Monitor;
use robmon::oracle::Evaluator;
use robmon::semantics::{parse_predicates, Observation, PredicateMap, Rho, StateSample};
use robmon::traceio::Trace;

pub const MAX_BOUND: usize = 8;
pub const MAX_LEN: usize = 60;

pub fn predicates() -> PredicateMap {
    parse_predicates("p: x >= 0\nq: y <= 1\nr: -2 <= z <= 3").unwrap()
}

pub fn sample(t: usize, x: f64, y: f64, z: f64) -> StateSample {
    StateSample::new(t as f64)
        .with("x", x)
        .with("y", y)
        .with("z", z)
}

fn atom(i: usize) -> Expr {
    Expr::Atom(["p", "q", "r"][i].to_string())
}

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

/// Random core-syntax formula with at most `depth` levels (a leaf is one level).
pub fn random_expr<R: Rng>(rng: &mut R, depth: usize, future: bool) -> Expr {
    if depth <= 1 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.1) {
            Expr::True
        } else {
            atom(rng.gen_range(0..3))
        };
    }
    let d = depth - 1;
    let bounded = |rng: &mut R| {
        let l = rng.gen_range(0..=MAX_BOUND);
        Interval::bounded(l, rng.gen_range(l..=MAX_BOUND))
    };
    match rng.gen_range(0..6) {
        0 => Expr::Not(b(random_expr(rng, d, future))),
        1 => Expr::Or(
            b(random_expr(rng, d, future)),
            b(random_expr(rng, d, future)),
        ),
        2 | 3 if future => {
            let iv = bounded(rng);
            Expr::Until(
                b(random_expr(rng, d, future)),
                b(random_expr(rng, d, future)),
                iv,
            )
        }
        2 | 4 => {
            let iv = bounded(rng);
            Expr::Since(
                b(random_expr(rng, d, future)),
                b(random_expr(rng, d, future)),
                iv,
            )
        }
        _ => {
            let iv = Interval::unbounded(rng.gen_range(0..=MAX_BOUND));
            Expr::Since(
                b(random_expr(rng, d, future)),
                b(random_expr(rng, d, future)),
                iv,
            )
        }
    }
}

/// Number of node levels on the longest root-to-leaf path of the core DAG.
pub fn core_depth(f: &Formula) -> usize {
    let mut depth = vec![1usize; f.len()];
    for k in (0..f.len()).rev() {
        depth[k] = 1 + f
            .node(k)
            .kind
            .operands()
            .map(|m| depth[m])
            .max()
            .unwrap_or(0);
    }
    depth[0]
}

pub fn has_unbounded_since(f: &Formula) -> bool {
    f.nodes()
        .iter()
        .any(|n| matches!(n.kind, NodeKind::Since(_, _, iv) if iv.upper.is_none()))
}

pub fn has_until(f: &Formula) -> bool {
    f.nodes()
        .iter()
        .any(|n| matches!(n.kind, NodeKind::Until(..)))
}

fn random_value<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.5) {
        rng.gen_range(-10..=10) as f64
    } else {
        (rng.gen_range(-10.0f64..=10.0) * 10.0).round() / 10.0
    }
}

pub fn random_trace<R: Rng>(rng: &mut R, len: usize) -> Trace {
    Trace::new(
        (0..len)
            .map(|t| sample(t, random_value(rng), random_value(rng), random_value(rng)))
            .collect(),
    )
}

/// Random formula of core depth at most 4 and a trace long enough for at least
/// one perfect-prediction step.
pub fn random_case<R: Rng>(rng: &mut R, want_unbounded: bool) -> (Formula, Trace) {
    loop {
        let expr = random_expr(rng, 4, true);
        let f = Formula::from_expr(&expr);
        if f.horizon() >= MAX_LEN || (want_unbounded && !has_unbounded_since(&f)) {
            continue;
        }
        let len = rng.gen_range(f.horizon() + 1..=MAX_LEN);
        return (f, random_trace(rng, len));
    }
}

/// Monitor outputs at every step whose future samples are all in the trace.
pub fn run_perfect<O: Observation + Clone>(
    f: &Formula,
    bindings: &BTreeMap<String, O>,
    trace: &Trace,
) -> Vec<Rho> {
    let mut m = Monitor::new(f.clone(), bindings).unwrap();
    let hrz = f.horizon();
    let s = &trace.samples;
    (0..s.len().saturating_sub(hrz))
        .map(|i| m.step(&s[i], &s[i + 1..=i + hrz]).unwrap())
        .collect()
}

/// Compares the monitor against the oracle on `s_0 .. s_{i+Hrz}` at every
/// emitted step. With `cells`, every defined table cell is checked as well.
pub fn check_equivalence(f: &Formula, trace: &Trace, cells: bool) -> Result<(), String> {
    let preds = predicates();
    let mut m = Monitor::new(f.clone(), &preds).unwrap();
    let hrz = f.horizon() as isize;
    let s = &trace.samples;
    for i in 0..s.len().saturating_sub(f.horizon()) {
        let got = m.step(&s[i], &s[i + 1..=i + f.horizon()]).unwrap();
        let prefix = &s[..=i + f.horizon()];
        let mut oracle = Evaluator::new(f, &preds, prefix);
        let want = oracle.robustness(i).unwrap();
        if got != want {
            return Err(format!("{f}: step {i}: monitor {got}, oracle {want}"));
        }
        if !cells {
            continue;
        }
        for k in 0..f.len() {
            for j in m.lowest_column(k)..=hrz {
                let t = i as isize + j;
                let cell = m.cell(k, j);
                if t < 0 {
                    if cell.is_some() {
                        return Err(format!(
                            "{f}: step {i}: row {k} column {j} should be undefined"
                        ));
                    }
                    continue;
                }
                let want = oracle.node(k, t as usize).unwrap();
                if cell != Some(want) {
                    return Err(format!(
                        "{f}: step {i}: row {k} column {j}: monitor {cell:?}, oracle {want}"
                    ));
                }
            }
        }
    }
    Ok(())
}

// proptest strategies

pub fn interval_strategy(unbounded: bool) -> impl Strategy<Value = Interval> + Clone {
    (0..=MAX_BOUND, 0..=MAX_BOUND, any::<bool>()).prop_map(move |(a, b, inf)| {
        let (l, u) = (a.min(b), a.max(b));
        if unbounded && inf {
            Interval::unbounded(l)
        } else {
            Interval::bounded(l, u)
        }
    })
}

fn leaf_strategy() -> impl Strategy<Value = Expr> {
    prop_oneof![
        1 => Just(Expr::True),
        3 => Just(atom(0)),
        3 => Just(atom(1)),
        3 => Just(atom(2)),
    ]
}

/// Core-syntax formulas; Until only when `future` is set.
pub fn core_expr(future: bool) -> BoxedStrategy<Expr> {
    leaf_strategy()
        .prop_recursive(3, 16, 2, move |inner| {
            let not = inner.clone().prop_map(|e| Expr::Not(b(e)));
            let or = (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Or(b(x), b(y)));
            let since = (inner.clone(), inner.clone(), interval_strategy(true))
                .prop_map(|(x, y, iv)| Expr::Since(b(x), b(y), iv));
            if future {
                let until = (inner.clone(), inner, interval_strategy(false))
                    .prop_map(|(x, y, iv)| Expr::Until(b(x), b(y), iv));
                prop_oneof![not, or, since, until].boxed()
            } else {
                prop_oneof![not, or, since].boxed()
            }
        })
        .boxed()
}

/// Surface-syntax formulas using every operator.
pub fn surface_expr() -> BoxedStrategy<Expr> {
    prop_oneof![leaf_strategy(), Just(Expr::False),]
        .prop_recursive(4, 24, 2, |inner| {
            let fut = interval_strategy(false);
            let past = interval_strategy(true);
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Not(b(e))),
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::And(b(x), b(y))),
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Or(b(x), b(y))),
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Implies(b(x), b(y))),
                (inner.clone(), inner.clone(), fut.clone()).prop_map(|(x, y, iv)| Expr::Until(
                    b(x),
                    b(y),
                    iv
                )),
                (inner.clone(), inner.clone(), past.clone()).prop_map(|(x, y, iv)| Expr::Since(
                    b(x),
                    b(y),
                    iv
                )),
                (fut.clone(), inner.clone()).prop_map(|(iv, e)| Expr::Eventually(iv, b(e))),
                (fut, inner.clone()).prop_map(|(iv, e)| Expr::Always(iv, b(e))),
                (past.clone(), inner.clone()).prop_map(|(iv, e)| Expr::Once(iv, b(e))),
                (past, inner.clone()).prop_map(|(iv, e)| Expr::Historically(iv, b(e))),
                inner.clone().prop_map(|e| Expr::Next(b(e))),
                inner.prop_map(|e| Expr::Prev(b(e))),
            ]
        })
        .boxed()
}

fn value_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![
        (-10i32..=10).prop_map(f64::from),
        (-100i32..=100).prop_map(|v| f64::from(v) / 10.0)
    ]
}

pub fn trace_strategy(min: usize, max: usize) -> BoxedStrategy<Trace> {
    prop::collection::vec(
        (value_strategy(), value_strategy(), value_strategy()),
        min..=max,
    )
    .prop_map(|rows| {
        Trace::new(
            rows.into_iter()
                .enumerate()
                .map(|(t, (x, y, z))| sample(t, x, y, z))
                .collect(),
        )
    })
    .boxed()
}
