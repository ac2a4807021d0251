use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::templates::{gen_template, TemplateError, TemplateKind};
use crate::formula::Formula;
use crate::monitor::Monitor;
use crate::semantics::StateSample;

const WARM_UP_STEPS: usize = 10;

pub const SWEEP_HORIZONS: [usize; 4] = [500, 1000, 2000, 4000];

/// Per-step overhead of the monitor on one template formula.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub kind: TemplateKind,
    pub n: usize,
    pub horizon: usize,
    pub steps: usize,
    pub mean_ms: f64,
    pub variance_ms2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub reports: Vec<BenchReport>,
    /// Least-squares slope of `ln(mean)` against `ln(H)`.
    pub slope: f64,
}

/// Runs `steps` timed monitor steps (after a few untimed ones) on a random-walk
/// trace with a zero-order-hold predictor. Only the `step` call is timed.
pub fn run_bench(
    kind: TemplateKind,
    n: usize,
    horizon: usize,
    steps: usize,
    seed: u64,
) -> Result<BenchReport, TemplateError> {
    if steps < 30 {
        return Err(TemplateError::TooFewSteps(steps));
    }
    let template = gen_template(kind, n, horizon)?;
    let formula = Formula::parse(&template.text).expect("generated templates parse");
    let hrz = formula.horizon();
    let mut monitor =
        Monitor::new(formula, &template.predicates).expect("templates bind every atom");

    let variables: Vec<String> = template
        .predicates
        .values()
        .map(|p| p.variable.clone())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = StateSample::new(0.0);
    for v in &variables {
        sample.values.insert(v.clone(), 0.0);
    }

    let mut durations = Vec::with_capacity(steps);
    for i in 0..WARM_UP_STEPS + steps {
        sample.time = i as f64;
        for v in sample.values.values_mut() {
            *v += rng.gen_range(-1.0..1.0);
        }
        let predictions = vec![sample.clone(); hrz];
        let start = Instant::now();
        let out = monitor.step(&sample, &predictions);
        let elapsed = start.elapsed();
        out.expect("template variables are present");
        if i >= WARM_UP_STEPS {
            durations.push(elapsed.as_secs_f64() * 1e3);
        }
    }

    let mean = durations.iter().sum::<f64>() / steps as f64;
    let variance = durations.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (steps as f64 - 1.0);
    Ok(BenchReport {
        kind,
        n,
        horizon,
        steps,
        mean_ms: mean,
        variance_ms2: variance,
    })
}

/// Benchmarks the template at every horizon in `horizons` and fits the
/// log-log growth rate of the mean step time.
pub fn run_sweep(
    kind: TemplateKind,
    n: usize,
    horizons: &[usize],
    steps: usize,
    seed: u64,
) -> Result<SweepReport, TemplateError> {
    let reports = horizons
        .iter()
        .map(|&h| run_bench(kind, n, h, steps, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let points: Vec<(f64, f64)> = reports
        .iter()
        .map(|r| ((r.horizon as f64).ln(), r.mean_ms.ln()))
        .collect();
    Ok(SweepReport {
        slope: least_squares_slope(&points),
        reports,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
