use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Default number of materialised recurrence masses (`p_0 ..= p_64`).
pub const DEFAULT_RECURRENCE_MAX_INDEX: u32 = 64;

/// A probability mass function on dyadic amounts. Masses are exact
/// rationals; the mass of any point outside the support is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDensity {
    family: DiscreteFamily,
}

#[derive(Clone, Debug, PartialEq)]
enum DiscreteFamily {
    /// `P(2^n) = 2^n / 3^(n+1)` for `n ≥ 0`.
    Broome,
    /// `p_0 = 1/12`, `p_n = p_{n-1}/2 + 2^-(2n+1)`, materialised up to an index.
    Recurrence { masses: Vec<BigRational> },
    /// Finite table of points.
    Table {
        masses: BTreeMap<Dyadic, BigRational>,
        proper: bool,
    },
}

impl DiscreteDensity {
    pub fn broome() -> Self {
        DiscreteDensity {
            family: DiscreteFamily::Broome,
        }
    }

    pub fn recurrence(max_index: u32) -> Self {
        let mut masses = Vec::with_capacity(max_index as usize + 1);
        let mut p = BigRational::new(BigInt::one(), BigInt::from(12));
        masses.push(p.clone());
        for n in 1..=max_index {
            p = p / BigInt::from(2) + pow2_ratio(-(2 * n as i32 + 1));
            masses.push(p.clone());
        }
        DiscreteDensity {
            family: DiscreteFamily::Recurrence { masses },
        }
    }

    /// A finite table of `(point, mass)` pairs. Points must be positive and
    /// distinct, masses nonnegative. A table declared proper must sum to 1
    /// within 1e-9.
    pub fn table<I>(entries: I, proper: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (Dyadic, BigRational)>,
    {
        let invalid = |reason: String| Error::InvalidParameter {
            density: "table".into(),
            reason,
        };
        let mut masses = BTreeMap::new();
        for (point, mass) in entries {
            if !point.is_positive() {
                return Err(invalid(format!("point {point} is not positive")));
            }
            if mass < BigRational::zero() {
                return Err(invalid(format!("negative mass at {point}")));
            }
            if masses.insert(point, mass).is_some() {
                return Err(invalid(format!("duplicate point {point}")));
            }
        }
        if masses.is_empty() {
            return Err(invalid("table is empty".into()));
        }
        if proper {
            let total: BigRational = masses.values().cloned().sum();
            let total = total.to_f64().unwrap_or(f64::NAN);
            if (total - 1.0).abs() > 1e-9 {
                return Err(invalid(format!("proper table sums to {total}, not 1")));
            }
        }
        Ok(DiscreteDensity {
            family: DiscreteFamily::Table { masses, proper },
        })
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            DiscreteFamily::Broome => "broome_discrete",
            DiscreteFamily::Recurrence { .. } => "recurrence",
            DiscreteFamily::Table { .. } => "table",
        }
    }

    /// Recurrence masses sum to 1/2, so only Broome and normalised tables are
    /// proper.
    pub fn is_proper(&self) -> bool {
        match &self.family {
            DiscreteFamily::Broome => true,
            DiscreteFamily::Recurrence { .. } => false,
            DiscreteFamily::Table { proper, .. } => *proper,
        }
    }

    pub fn can_sample(&self) -> bool {
        self.is_proper()
    }

    pub fn in_support(&self, x: &Dyadic) -> bool {
        match &self.family {
            DiscreteFamily::Broome => matches!(x.log2_exact(), Some(k) if k >= 0),
            DiscreteFamily::Recurrence { masses } => {
                matches!(x.log2_exact(), Some(k) if k >= 0 && (k as usize) < masses.len())
            }
            DiscreteFamily::Table { masses, .. } => masses.contains_key(x),
        }
    }

    /// `P(X₁ = x)`, exact.
    pub fn mass(&self, x: &Dyadic) -> BigRational {
        if !self.in_support(x) {
            return BigRational::zero();
        }
        match &self.family {
            DiscreteFamily::Broome => {
                let n = x.exponent() as u32;
                BigRational::new(BigInt::from(2).pow(n), BigInt::from(3).pow(n + 1))
            }
            DiscreteFamily::Recurrence { masses } => masses[x.exponent() as usize].clone(),
            DiscreteFamily::Table { masses, .. } => masses[x].clone(),
        }
    }

    pub fn mass_f64(&self, x: &Dyadic) -> f64 {
        self.mass(x).to_f64().unwrap_or(0.0)
    }

    /// Support points in increasing order with their masses, at most `limit`
    /// of them (Broome's support is infinite).
    pub fn enumerate(&self, limit: usize) -> Vec<(Dyadic, BigRational)> {
        match &self.family {
            DiscreteFamily::Broome => (0..limit as i32)
                .map(|k| {
                    let x = Dyadic::pow2(k);
                    let m = self.mass(&x);
                    (x, m)
                })
                .collect(),
            DiscreteFamily::Recurrence { masses } => masses
                .iter()
                .take(limit)
                .enumerate()
                .map(|(k, m)| (Dyadic::pow2(k as i32), m.clone()))
                .collect(),
            DiscreteFamily::Table { masses, .. } => masses
                .iter()
                .take(limit)
                .map(|(x, m)| (*x, m.clone()))
                .collect(),
        }
    }

    /// Largest materialised index of the recurrence density.
    pub fn recurrence_max_index(&self) -> Option<u32> {
        match &self.family {
            DiscreteFamily::Recurrence { masses } => Some(masses.len() as u32 - 1),
            _ => None,
        }
    }

    pub(crate) fn table_entries(&self) -> Option<&BTreeMap<Dyadic, BigRational>> {
        match &self.family {
            DiscreteFamily::Table { masses, .. } => Some(masses),
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match &self.family {
            DiscreteFamily::Broome => {
                // P(n) = (1/3)(2/3)^n
                let mut n = 0i32;
                while rng.random_bool(2.0 / 3.0) {
                    n += 1;
                }
                Ok(Dyadic::pow2(n).to_f64())
            }
            DiscreteFamily::Table {
                masses,
                proper: true,
            } => {
                let weights: Vec<f64> = masses.values().map(|m| m.to_f64().unwrap_or(0.0)).collect();
                let index = WeightedIndex::new(&weights)
                    .map_err(|_| Error::ImproperDensityUnsampleable(self.name().into()))?;
                let i = index.sample(rng);
                Ok(masses.keys().nth(i).map(Dyadic::to_f64).unwrap_or(f64::NAN))
            }
            _ => Err(Error::ImproperDensityUnsampleable(self.name().into())),
        }
    }
}

fn pow2_ratio(k: i32) -> BigRational {
    Dyadic::pow2(k).to_ratio()
}
