use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use robmon::formula::{Expr, Formula, Interval};
use robmon::monitor::Monitor;
use robmon::oracle::Evaluator;
use robmon::semantics::{emax, emin, Predicate, Rho, Scaled};
use robmon::traceio::Trace;

use super::{core_expr, interval_strategy, predicates, run_perfect, trace_strategy};

pub const CASES: u32 = 256;
pub const FACTORS: [f64; 3] = [0.5, 2.0, 10.0];

/// Deterministic runner with `cases` cases.
pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn negation_input() -> impl Strategy<Value = (Expr, Trace)> {
    (core_expr(true), trace_strategy(30, 60))
}

pub fn negation_duality((e, trace): (Expr, Trace)) -> Result<(), TestCaseError> {
    let preds = predicates();
    let f = Formula::from_expr(&e);
    let g = Formula::from_expr(&Expr::Not(Box::new(e)));
    let a = run_perfect(&f, &preds, &trace);
    let b = run_perfect(&g, &preds, &trace);
    prop_assert_eq!(a.len(), b.len());
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        prop_assert_eq!(-*x, *y, "step {} of {}", i, f);
    }
    Ok(())
}

pub fn duality_input() -> impl Strategy<Value = (Interval, Expr, Trace)> {
    (
        interval_strategy(false),
        core_expr(true),
        trace_strategy(40, 60),
    )
}

pub fn eventually_always_duality(
    (iv, e, trace): (Interval, Expr, Trace),
) -> Result<(), TestCaseError> {
    let preds = predicates();
    let always = Formula::from_expr(&Expr::Always(iv, Box::new(e.clone())));
    let eventually = Formula::from_expr(&Expr::Eventually(iv, Box::new(Expr::Not(Box::new(e)))));
    prop_assert_eq!(always.horizon(), eventually.horizon());
    let a = run_perfect(&always, &preds, &trace);
    let b = run_perfect(&eventually, &preds, &trace);
    prop_assert_eq!(a.len(), b.len());
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        prop_assert_eq!(*x, -*y, "step {} of {}", i, always);
    }
    Ok(())
}

pub fn purity_input() -> impl Strategy<Value = (Expr, Trace, Trace, usize)> {
    (
        core_expr(false),
        trace_strategy(2, 60),
        trace_strategy(1, 60),
        any::<prop::sample::Index>(),
    )
        .prop_map(|(e, a, b, cut)| {
            let cut = cut.index(a.len());
            (e, a, b, cut)
        })
}

/// Outputs up to step `cut` do not depend on samples after `cut`.
pub fn past_only_purity(
    (e, a, other, cut): (Expr, Trace, Trace, usize),
) -> Result<(), TestCaseError> {
    let preds = predicates();
    let f = Formula::from_expr(&e);
    prop_assert_eq!(f.horizon(), 0);
    let mut spliced = a.samples[..=cut].to_vec();
    for (t, s) in other.samples.iter().enumerate() {
        let mut s = s.clone();
        s.time = (cut + 1 + t) as f64;
        spliced.push(s);
    }
    let spliced = Trace::new(spliced);
    let mut m1 = Monitor::new(f.clone(), &preds).unwrap();
    let mut m2 = Monitor::new(f.clone(), &preds).unwrap();
    let mut o1 = Evaluator::new(&f, &preds, &a.samples);
    let mut o2 = Evaluator::new(&f, &preds, &spliced.samples);
    for (i, (s1, s2)) in a
        .samples
        .iter()
        .zip(&spliced.samples)
        .take(cut + 1)
        .enumerate()
    {
        let x = m1.step(s1, &[]).unwrap();
        let y = m2.step(s2, &[]).unwrap();
        prop_assert_eq!(x, y, "step {} of {}", i, f);
        prop_assert_eq!(
            o1.robustness(i).unwrap(),
            x,
            "oracle on first trace, step {}",
            i
        );
        prop_assert_eq!(
            o2.robustness(i).unwrap(),
            y,
            "oracle on spliced trace, step {}",
            i
        );
    }
    Ok(())
}

pub fn homogeneity_input() -> impl Strategy<Value = (Expr, Trace, usize)> {
    (core_expr(true), trace_strategy(30, 60), 0..FACTORS.len())
}

pub fn positive_homogeneity((e, trace, c): (Expr, Trace, usize)) -> Result<(), TestCaseError> {
    let c = FACTORS[c];
    let preds = predicates();
    let scaled: BTreeMap<String, Scaled<Predicate>> = preds
        .iter()
        .map(|(k, p)| {
            (
                k.clone(),
                Scaled {
                    inner: p.clone(),
                    factor: c,
                },
            )
        })
        .collect();
    let f = Formula::from_expr(&e);
    let a = run_perfect(&f, &preds, &trace);
    let b = run_perfect(&f, &scaled, &trace);
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        prop_assert_eq!(x.scale(c), *y, "step {} of {} with c = {}", i, f, c);
    }
    let mut plain = Evaluator::new(&f, &preds, &trace.samples);
    let mut scaled = Evaluator::new(&f, &scaled, &trace.samples);
    for i in 0..trace.len() {
        prop_assert_eq!(
            plain.robustness(i).unwrap().scale(c),
            scaled.robustness(i).unwrap()
        );
    }
    Ok(())
}

pub fn soundness_input() -> impl Strategy<Value = (Expr, Trace)> {
    (core_expr(true), trace_strategy(1, 60))
}

pub fn sign_soundness((e, trace): (Expr, Trace)) -> Result<(), TestCaseError> {
    let preds = predicates();
    let f = Formula::from_expr(&e);
    let mut ev = Evaluator::new(&f, &preds, &trace.samples);
    for i in 0..trace.len() {
        let rho = ev.robustness(i).unwrap();
        let truth = ev.holds(0, i).unwrap();
        if rho > Rho::ZERO {
            prop_assert!(truth, "{} at {}: robustness {} but false", f, i, rho);
        } else if rho < Rho::ZERO {
            prop_assert!(!truth, "{} at {}: robustness {} but true", f, i, rho);
        }
    }
    Ok(())
}

fn rho_strategy() -> impl Strategy<Value = Rho> {
    prop_oneof![
        1 => Just(Rho::TOP),
        1 => Just(Rho::BOTTOM),
        6 => (-1e6f64..1e6).prop_map(|v| Rho::new(v).unwrap()),
    ]
}

pub fn de_morgan_input() -> impl Strategy<Value = Vec<Rho>> {
    prop::collection::vec(rho_strategy(), 0..12)
}

pub fn de_morgan(values: Vec<Rho>) -> Result<(), TestCaseError> {
    let neg: Vec<Rho> = values.iter().map(|v| -*v).collect();
    prop_assert_eq!(emin(values.iter().copied()), -emax(neg.iter().copied()));
    prop_assert_eq!(emax(values.iter().copied()), -emin(neg));
    prop_assert_eq!(emax(std::iter::empty()), Rho::BOTTOM);
    prop_assert_eq!(emin(std::iter::empty()), Rho::TOP);
    let with_bottom = values.iter().copied().chain([Rho::BOTTOM]);
    prop_assert_eq!(emax(with_bottom), emax(values.iter().copied()));
    let with_top = values.iter().copied().chain([Rho::TOP]);
    prop_assert_eq!(emin(with_top), emin(values.iter().copied()));
    Ok(())
}
