//! Prior densities for the host's initial amount.
//!
//! Densities are either discrete (masses on dyadic amounts, exact rationals)
//! or continuous (a pdf on the positive reals). Either kind may be improper;
//! improper densities evaluate normally but refuse to be sampled.

mod catalog;
mod continuous;
mod discrete;
mod spec;

pub use catalog::{catalog_entries, catalog_lookup, CatalogEntry, CATALOG_NAMES};
pub use continuous::{ContinuousDensity, Support};
pub use discrete::{DiscreteDensity, DEFAULT_RECURRENCE_MAX_INDEX};
pub use spec::{DensityKind, DensitySpec};

use rand::Rng;

use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub enum Density {
    Discrete(DiscreteDensity),
    Continuous(ContinuousDensity),
}

impl Density {
    pub fn name(&self) -> &'static str {
        match self {
            Density::Discrete(d) => d.name(),
            Density::Continuous(d) => d.name(),
        }
    }

    pub fn kind(&self) -> DensityKind {
        match self {
            Density::Discrete(_) => DensityKind::Discrete,
            Density::Continuous(_) => DensityKind::Continuous,
        }
    }

    pub fn is_proper(&self) -> bool {
        match self {
            Density::Discrete(d) => d.is_proper(),
            Density::Continuous(d) => d.is_proper(),
        }
    }

    pub fn can_sample(&self) -> bool {
        match self {
            Density::Discrete(d) => d.can_sample(),
            Density::Continuous(d) => d.can_sample(),
        }
    }

    /// Draw an initial amount. Deterministic for a given generator state.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match self {
            Density::Discrete(d) => d.sample(rng),
            Density::Continuous(d) => d.sample(rng),
        }
    }

    /// Mass (discrete) or pdf value (continuous) at `x`, as a float.
    pub fn weight_at(&self, x: f64) -> f64 {
        match self {
            Density::Discrete(d) => crate::dyadic::Dyadic::from_f64(x)
                .map(|p| d.mass_f64(&p))
                .unwrap_or(0.0),
            Density::Continuous(d) => d.pdf(x),
        }
    }

    pub fn as_discrete(&self) -> Option<&DiscreteDensity> {
        match self {
            Density::Discrete(d) => Some(d),
            Density::Continuous(_) => None,
        }
    }

    pub fn as_continuous(&self) -> Option<&ContinuousDensity> {
        match self {
            Density::Continuous(d) => Some(d),
            Density::Discrete(_) => None,
        }
    }
}

impl From<DiscreteDensity> for Density {
    fn from(d: DiscreteDensity) -> Self {
        Density::Discrete(d)
    }
}

impl From<ContinuousDensity> for Density {
    fn from(d: ContinuousDensity) -> Self {
        Density::Continuous(d)
    }
}
