//! Verification suites shared by the command line and the acceptance run.

use std::collections::BTreeSet;

use num_rational::BigRational;
use rand::Rng;
use serde::Serialize;

use super::enumerate::enumerate_conditional_benefit;
use super::mc::{compare, mc_conditional_benefit_auto, Comparison, McEstimate};
use crate::benefit::{expected_benefit, expected_benefit_discrete, BenefitReport};
use crate::density::{ContinuousDensity, Density, DiscreteDensity};
use crate::dyadic::Dyadic;
use crate::error::Result;
use crate::host::Process;
use crate::rng::host_rng;

/// Plays per Monte-Carlo case before any escalation.
pub const MC_SUITE_PLAYS: u64 = 4_000_000;

const DISCRETE_TOL: f64 = 1e-12;
const K_SIGMA: f64 = 4.0;

/// A proper table on up to 12 points `m·2^k` (`m ∈ {1, 3, 5}`,
/// `-6 ≤ k ≤ 10`) with random integer weights normalised exactly.
pub fn random_dyadic_table<R: Rng + ?Sized>(rng: &mut R) -> DiscreteDensity {
    let size = rng.random_range(1..=12);
    let mut points = BTreeSet::new();
    while points.len() < size {
        let m = [1, 3, 5][rng.random_range(0..3)];
        let k = rng.random_range(-6..=10);
        points.insert(Dyadic::new(m, k));
    }
    let weights: Vec<i64> = (0..size).map(|_| rng.random_range(1..=1000)).collect();
    let total: i64 = weights.iter().sum();
    let entries = points
        .into_iter()
        .zip(weights)
        .map(|(x, w)| (x, BigRational::new(w.into(), total.into())));
    DiscreteDensity::table(entries, true).expect("generated table is valid")
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscreteSuiteReport {
    pub densities: usize,
    pub probes: usize,
    pub attainable_probes: usize,
    pub max_abs_diff: f64,
    pub failures: Vec<String>,
    pub pass: bool,
}

/// Enumeration against closed forms for `count` random tables, every process,
/// at `x/2, x, 2x` for each support point `x`.
pub fn discrete_suite(count: usize, seed: u64) -> DiscreteSuiteReport {
    let mut rng = host_rng(seed);
    let mut probes = 0;
    let mut attainable_probes = 0;
    let mut max_abs_diff: f64 = 0.0;
    let mut failures = Vec::new();
    for i in 0..count {
        let density = random_dyadic_table(&mut rng);
        let ys: BTreeSet<Dyadic> = density
            .enumerate(usize::MAX)
            .into_iter()
            .flat_map(|(x, _)| [x.half(), x, x.double()])
            .collect();
        for process in Process::ALL {
            for &y in &ys {
                probes += 1;
                let closed = expected_benefit_discrete(&density, process, y);
                let oracle = enumerate_conditional_benefit(&density, process, y);
                if closed.attainable {
                    attainable_probes += 1;
                }
                let diff = (closed.expected_benefit - oracle.expected_benefit).abs();
                max_abs_diff = max_abs_diff.max(diff);
                if closed.attainable != oracle.attainable
                    || closed.decision != oracle.decision
                    || diff.is_nan()
                    || diff > DISCRETE_TOL
                {
                    failures.push(format!(
                        "table #{i}, {process}, y={y}: closed {} vs enumerated {}",
                        closed.expected_benefit, oracle.expected_benefit
                    ));
                }
            }
        }
    }
    DiscreteSuiteReport {
        densities: count,
        probes,
        attainable_probes,
        max_abs_diff,
        pass: failures.is_empty(),
        failures,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct McCase {
    pub density: String,
    pub process: Process,
    pub analytic: BenefitReport,
    pub estimate: McEstimate,
    pub comparison: Comparison,
}

#[derive(Clone, Debug, Serialize)]
pub struct McSuiteReport {
    pub cases: Vec<McCase>,
    pub pass: bool,
}

/// Interior probe points, away from support edges and pdf kinks.
fn mc_probes() -> Vec<(Density, [f64; 3])> {
    vec![
        (ContinuousDensity::uniform01().into(), [0.15, 0.3, 0.4]),
        (ContinuousDensity::rayleigh_half().into(), [0.3, 0.6, 0.9]),
        (ContinuousDensity::broome_continuous().into(), [0.5, 1.0, 3.0]),
    ]
}

/// Simulation against closed forms: three proper continuous priors, three
/// points each, every process, `k = 4` comparisons.
pub fn mc_suite(n: u64, seed: u64) -> Result<McSuiteReport> {
    let mut cases = Vec::new();
    for (density, ys) in mc_probes() {
        for process in Process::ALL {
            for y in ys {
                let analytic = expected_benefit(&density, process, y);
                let estimate = mc_conditional_benefit_auto(&density, process, y, None, n, seed)?;
                let comparison = compare(&analytic, &estimate, K_SIGMA);
                cases.push(McCase {
                    density: density.name().to_string(),
                    process,
                    analytic,
                    estimate,
                    comparison,
                });
            }
        }
    }
    let pass = cases.iter().all(|c| c.comparison.pass);
    Ok(McSuiteReport { cases, pass })
}
