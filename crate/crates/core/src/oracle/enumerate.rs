//! Exact conditional benefit by listing induced events.

use num_rational::BigRational;
use num_traits::Zero;

use crate::benefit::{BenefitReport, ExactBenefit};
use crate::density::DiscreteDensity;
use crate::dyadic::Dyadic;
use crate::host::{allocate, event_probability, Allocation, HostEvent, Prime, Process};

/// A host event consistent with an observation, its benefit and its weight.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedEvent {
    pub event: HostEvent,
    pub b: Dyadic,
    pub probability: BigRational,
}

/// Every `{x₁; ω₂; ω₃}` the process admits whose allocated content is `y`.
///
/// Initial amounts are searched over `{y/2, y, 2y}` with every coin pair; the
/// allocation itself decides which survive.
pub fn induced_events(process: Process, y: Dyadic) -> Vec<HostEvent> {
    if !y.is_positive() {
        return Vec::new();
    }
    let target = y.to_f64();
    let mut events = Vec::new();
    for x1 in [y.half(), y, y.double()] {
        for prime in Prime::BOTH {
            for allocation in Allocation::BOTH {
                if !process.admits(prime, allocation) {
                    continue;
                }
                let Ok(play) = allocate(x1.to_f64(), prime, allocation) else {
                    continue;
                };
                if play.y == target {
                    events.push(play.event);
                }
            }
        }
    }
    events
}

fn weigh(density: &DiscreteDensity, process: Process, y: Dyadic) -> Vec<WeightedEvent> {
    induced_events(process, y)
        .into_iter()
        .map(|event| {
            let play = allocate(event.x1, event.prime, event.allocation).expect("induced events are positive");
            let b = Dyadic::from_f64(play.b).expect("benefit of a dyadic play is dyadic");
            let probability = event_probability(density, &event, process).expect("induced events are admissible");
            WeightedEvent { event, b, probability }
        })
        .collect()
}

/// `Σ P({c})·b({c})` over the induced events, and `Σ P({c})`.
pub fn enumerate_exact(density: &DiscreteDensity, process: Process, y: Dyadic) -> (ExactBenefit, Vec<WeightedEvent>) {
    let events = weigh(density, process, y);
    let mut numerator = BigRational::zero();
    let mut denominator = BigRational::zero();
    for e in &events {
        numerator += &e.probability * e.b.to_ratio();
        denominator += &e.probability;
    }
    (ExactBenefit { numerator, denominator }, events)
}

/// The allocate-first process is a lottery on the held amount whatever the
/// prior, so its mass cancels and the single induced event is weighed alone.
pub fn enumerate_conditional_benefit(density: &DiscreteDensity, process: Process, y: Dyadic) -> BenefitReport {
    let (mut exact, events) = enumerate_exact(density, process, y);
    if process == Process::AllocateFirstThenPrime && y.is_positive() {
        let coin = BigRational::new(1.into(), 2.into());
        exact.numerator = BigRational::zero();
        exact.denominator = BigRational::zero();
        for e in &events {
            exact.numerator += &coin * e.b.to_ratio();
            exact.denominator += &coin;
        }
    }
    exact.to_report(y.to_f64())
}
