//! Conditional expected benefit of switching, `E(B | Y = y)`.
//!
//! Observing `y` is only possible if the host drew `x₁ ∈ {y/2, y, 2y}` (the
//! subset depends on the process). Each closed form below is the
//! probability-weighted mean benefit over those induced events, with masses
//! for discrete priors and pdf values (the `ε → 0` limit of the interval
//! probabilities) for continuous ones. The numerator is the exchange
//! condition `e(y)`: its sign is the switching decision.

mod roots;
mod strategy;

pub use roots::{find_exchange_roots, scan_roots, Root, RootScan, DEFAULT_ROOT_TOL, DEFAULT_SCAN_CELLS};
pub use strategy::{strategy, Bounds, Region, StrategyOutcome};

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::density::{ContinuousDensity, Density, DiscreteDensity};
use crate::dyadic::Dyadic;
use crate::host::Process;

/// Expected benefits within this distance of zero are treated as ties.
pub const INDIFFERENCE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Switch,
    Stay,
    Indifferent,
}

impl Decision {
    pub fn from_value(value: f64) -> Self {
        if value > INDIFFERENCE_TOL {
            Decision::Switch
        } else if value < -INDIFFERENCE_TOL {
            Decision::Stay
        } else {
            Decision::Indifferent
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Switch => "switch",
            Decision::Stay => "stay",
            Decision::Indifferent => "indifferent",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `E(B | Y = y)` with its numerator (the exchange condition) and denominator.
///
/// For continuous priors both parts are divided by the largest pdf value the
/// formula uses, so rescaling an improper pdf leaves every field unchanged.
/// An unattainable observation (zero denominator) reports `expected_benefit
/// = 0` and `Indifferent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenefitReport {
    pub y: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub expected_benefit: f64,
    pub decision: Decision,
    pub attainable: bool,
}

impl BenefitReport {
    pub fn from_parts(y: f64, numerator: f64, denominator: f64) -> Self {
        if denominator > 0.0 && numerator.is_finite() && denominator.is_finite() {
            let expected_benefit = numerator / denominator;
            BenefitReport {
                y,
                numerator,
                denominator,
                expected_benefit,
                decision: Decision::from_value(expected_benefit),
                attainable: true,
            }
        } else {
            Self::unattainable(y)
        }
    }

    pub fn unattainable(y: f64) -> Self {
        BenefitReport {
            y,
            numerator: 0.0,
            denominator: 0.0,
            expected_benefit: 0.0,
            decision: Decision::Indifferent,
            attainable: false,
        }
    }
}

/// Exact numerator and denominator for a discrete prior.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactBenefit {
    pub numerator: BigRational,
    pub denominator: BigRational,
}

impl ExactBenefit {
    pub fn is_attainable(&self) -> bool {
        self.denominator.is_positive()
    }

    pub fn expected_benefit(&self) -> Option<BigRational> {
        self.is_attainable()
            .then(|| &self.numerator / &self.denominator)
    }

    /// Round once to floats. The expected benefit is the correctly rounded
    /// exact quotient, not a quotient of rounded parts.
    pub fn to_report(&self, y: f64) -> BenefitReport {
        let Some(e) = self.expected_benefit() else {
            return BenefitReport::unattainable(y);
        };
        let expected_benefit = e.to_f64().unwrap_or(f64::NAN);
        let decision = if e.is_zero() {
            Decision::Indifferent
        } else {
            Decision::from_value(expected_benefit)
        };
        BenefitReport {
            y,
            numerator: self.numerator.to_f64().unwrap_or(f64::NAN),
            denominator: self.denominator.to_f64().unwrap_or(f64::NAN),
            expected_benefit,
            decision,
            attainable: true,
        }
    }
}

/// Closed-form numerator and denominator over the masses at `y/2, y, 2y`.
pub fn exact_benefit_discrete(density: &DiscreteDensity, process: Process, y: Dyadic) -> ExactBenefit {
    if !y.is_positive() {
        return ExactBenefit {
            numerator: BigRational::zero(),
            denominator: BigRational::zero(),
        };
    }
    let yq = y.to_ratio();
    let half = y.half().to_ratio();
    let mass = |x: Dyadic| density.mass(&x);
    let two = BigRational::from_integer(2.into());

    let (numerator, denominator) = match process {
        Process::DoubleOnly => {
            let (ph, p) = (mass(y.half()), mass(y));
            (-&half * &ph + &yq * &p, ph + p)
        }
        Process::HalveOnly => {
            let (p, pd) = (mass(y), mass(y.double()));
            (-&half * &p + &yq * &pd, p + pd)
        }
        Process::HalveOrDouble => {
            let (ph, p, pd) = (mass(y.half()), mass(y), mass(y.double()));
            (
                -&half * &ph + &half * &p + &yq * &pd,
                ph + &two * &p + pd,
            )
        }
        Process::AllocateFirstThenPrime => (yq / BigRational::from_integer(4.into()), BigRational::one()),
        Process::PrimeSecondThenAllocate => {
            let (ph, pd) = (mass(y.half()), mass(y.double()));
            (-&half * &ph + &yq * &pd, ph + pd)
        }
    };
    ExactBenefit {
        numerator,
        denominator,
    }
}

pub fn expected_benefit_discrete(density: &DiscreteDensity, process: Process, y: Dyadic) -> BenefitReport {
    exact_benefit_discrete(density, process, y).to_report(y.to_f64())
}

pub fn expected_benefit_continuous(density: &ContinuousDensity, process: Process, y: f64) -> BenefitReport {
    if !(y > 0.0 && y.is_finite()) {
        return BenefitReport::unattainable(y);
    }
    if process == Process::AllocateFirstThenPrime {
        return BenefitReport::from_parts(y, y / 4.0, 1.0);
    }
    let (fh, f, fd) = (density.pdf(y / 2.0), density.pdf(y), density.pdf(2.0 * y));
    let used = match process {
        Process::DoubleOnly => [fh, f, 0.0],
        Process::HalveOnly => [0.0, f, fd],
        Process::PrimeSecondThenAllocate => [fh, 0.0, fd],
        _ => [fh, f, fd],
    };
    let reference = used.into_iter().fold(0.0, f64::max);
    if reference <= 0.0 {
        return BenefitReport::unattainable(y);
    }
    let (fh, f, fd) = (fh / reference, f / reference, fd / reference);

    let (numerator, denominator) = match process {
        Process::DoubleOnly => (-(y / 2.0) * fh + 2.0 * y * f, fh + 2.0 * f),
        Process::HalveOnly => (-y * f + 4.0 * y * fd, 2.0 * f + 4.0 * fd),
        Process::HalveOrDouble => (
            -(y / 2.0) * fh + y * f + 4.0 * y * fd,
            fh + 4.0 * f + 4.0 * fd,
        ),
        Process::PrimeSecondThenAllocate => (-(y / 2.0) * fh + 4.0 * y * fd, fh + 4.0 * fd),
        Process::AllocateFirstThenPrime => unreachable!(),
    };
    BenefitReport::from_parts(y, numerator, denominator)
}

/// `E(B | Y = y)` for either kind of prior. Discrete priors take `y` exactly
/// as the dyadic value of the float.
pub fn expected_benefit(density: &Density, process: Process, y: f64) -> BenefitReport {
    match density {
        Density::Discrete(d) => match Dyadic::from_f64(y) {
            Some(yd) => expected_benefit_discrete(d, process, yd),
            None => BenefitReport::unattainable(y),
        },
        Density::Continuous(d) => expected_benefit_continuous(d, process, y),
    }
}

/// The exchange condition `e(y)`: numerator of `E(B | Y = y)`.
pub fn exchange_condition(density: &Density, process: Process, y: f64) -> f64 {
    expected_benefit(density, process, y).numerator
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{catalog_lookup, CATALOG_NAMES};
    use std::collections::BTreeMap;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn broome_doubling_is_a_tenth() {
        let d = DiscreteDensity::broome();
        for n in 1..=30 {
            let y = Dyadic::pow2(n);
            let exact = exact_benefit_discrete(&d, Process::DoubleOnly, y);
            assert_eq!(exact.expected_benefit().unwrap(), y.to_ratio() / BigRational::from_integer(10.into()));
            let r = expected_benefit_discrete(&d, Process::DoubleOnly, y);
            assert_eq!(r.expected_benefit, y.to_f64() / 10.0);
            assert_eq!(r.decision, Decision::Switch);
        }
    }

    #[test]
    fn broome_support_edge() {
        let d = DiscreteDensity::broome();
        let exact = exact_benefit_discrete(&d, Process::DoubleOnly, Dyadic::from_int(1));
        assert_eq!(exact.numerator, q(1, 3));
        assert_eq!(exact.denominator, q(1, 3));
        let r = exact.to_report(1.0);
        assert_eq!(r.expected_benefit, 1.0);
    }

    #[test]
    fn off_support_is_unattainable() {
        let d = DiscreteDensity::broome();
        let r = expected_benefit_discrete(&d, Process::DoubleOnly, Dyadic::from_int(3));
        assert!(!r.attainable);
        assert_eq!(r.decision, Decision::Indifferent);
        let r = expected_benefit_discrete(&d, Process::AllocateFirstThenPrime, Dyadic::from_int(3));
        assert!(r.attainable);
        assert_eq!(r.expected_benefit, 0.75);
    }

    #[test]
    fn allocate_first_is_quarter_everywhere() {
        for name in CATALOG_NAMES {
            let mut p = BTreeMap::new();
            if name == "power_law" {
                p.insert("n".to_string(), 3.0);
            }
            let d = catalog_lookup(name, &p).unwrap();
            let r = expected_benefit(&d, Process::AllocateFirstThenPrime, 12.0);
            assert_eq!(r.expected_benefit, 3.0, "{name}");
            assert_eq!(exchange_condition(&d, Process::AllocateFirstThenPrime, 4.0), 1.0);
        }
    }

    #[test]
    fn recurrence_closed_form() {
        let d = DiscreteDensity::recurrence(64);
        for k in 0..=20 {
            let pk = d.mass(&Dyadic::pow2(k));
            let closed = Dyadic::pow2(-(k + 1)).to_ratio()
                / (BigRational::from_integer(3.into()) * pk + Dyadic::pow2(-2 * (k + 1)).to_ratio());
            let e = exact_benefit_discrete(&d, Process::DoubleOnly, Dyadic::pow2(k + 1));
            assert_eq!(e.expected_benefit().unwrap(), closed);
        }
    }

    #[test]
    fn continuous_examples() {
        let uniform = ContinuousDensity::uniform01();
        let r = expected_benefit_continuous(&uniform, Process::HalveOrDouble, 0.3);
        assert!((r.expected_benefit - 0.15).abs() < 1e-12);
        assert_eq!(r.decision, Decision::Switch);

        let broome = ContinuousDensity::broome_continuous();
        let r = expected_benefit_continuous(&broome, Process::DoubleOnly, 1.0);
        assert!((r.expected_benefit - 5.0 / 17.0).abs() < 1e-15);

        let jeffreys = ContinuousDensity::power_law(2).unwrap();
        for y in [0.01, 0.7, 5.0, 1234.5, 1e9] {
            let r = expected_benefit_continuous(&jeffreys, Process::DoubleOnly, y);
            assert_eq!(r.expected_benefit, 0.0);
            assert_eq!(r.decision, Decision::Indifferent);
        }

        let extreme = ContinuousDensity::extreme_values();
        let r = expected_benefit_continuous(&extreme, Process::HalveOnly, 75.0);
        assert!((r.expected_benefit + 24.0 / 51.0 * 75.0).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_exchange_condition_sign() {
        // e(y) ∝ y²·e^{-y²}(8e^{-3y²} - 1)
        let d: Density = ContinuousDensity::rayleigh_half().into();
        for y in [0.1, 0.5, 0.8, 0.85, 1.0, 1.7] {
            let e = exchange_condition(&d, Process::DoubleOnly, y);
            let expected = 8.0 * (-3.0 * y * y).exp() - 1.0;
            assert_eq!(e.signum(), expected.signum(), "y = {y}");
        }
    }

    #[test]
    fn improper_exp_root_is_exact() {
        let d: Density = ContinuousDensity::improper_exp().into();
        let y = (2.0f64 / 3.0).sqrt();
        assert!(exchange_condition(&d, Process::DoubleOnly, y).abs() < 1e-12);
    }

    #[test]
    fn scaling_leaves_reports_unchanged() {
        let base = ContinuousDensity::rayleigh_half();
        for c in [0.5, 3.0, 100.0] {
            let scaled = base.scaled(c).unwrap();
            for p in Process::ALL {
                for y in [0.05, 0.4, 0.9, 1.3] {
                    let a = expected_benefit_continuous(&base, p, y);
                    let b = expected_benefit_continuous(&scaled, p, y);
                    assert_eq!(a.decision, b.decision);
                    assert!((a.expected_benefit - b.expected_benefit).abs() <= 1e-12 * a.expected_benefit.abs().max(1.0));
                    assert!((a.numerator - b.numerator).abs() <= 1e-12 * a.numerator.abs().max(1.0));
                    assert!((a.denominator - b.denominator).abs() <= 1e-12 * a.denominator.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn nonpositive_observations_are_unattainable() {
        let d: Density = ContinuousDensity::uniform01().into();
        for y in [0.0, -1.0, f64::NAN] {
            assert!(!expected_benefit(&d, Process::HalveOrDouble, y).attainable);
            assert!(!expected_benefit(&d, Process::AllocateFirstThenPrime, y).attainable);
        }
        let b: Density = DiscreteDensity::broome().into();
        assert!(!expected_benefit(&b, Process::AllocateFirstThenPrime, -4.0).attainable);
    }
}
