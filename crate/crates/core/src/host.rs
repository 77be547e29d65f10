//! The host's three experiments and the allocation algebra.
//!
//! Experiment 1 draws the initial amount `x₁` from the prior, experiment 2
//! tosses a coin `ω₂` to halve (0) or double (1) it for the second envelope,
//! and experiment 3 tosses `ω₃` to hand the agent the first (0) or second (1)
//! envelope. With contents `[x₁, g(ω₂)x₁]` and allocation matrix
//! `A = [[1-ω₃, ω₃], [ω₃, 1-ω₃]]`, the agent holds `Y` and the complement is
//! `Z`, and the benefit of switching is `B = Z - Y = ½(2ω₃-1)(1-3ω₂)x₁`.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::density::{Density, DiscreteDensity};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Outcome of experiment 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prime {
    Halve,
    Double,
}

/// Outcome of experiment 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Allocation {
    First,
    Second,
}

impl Prime {
    pub const BOTH: [Prime; 2] = [Prime::Halve, Prime::Double];

    pub fn from_bit(bit: u8) -> Result<Self> {
        match bit {
            0 => Ok(Prime::Halve),
            1 => Ok(Prime::Double),
            other => Err(Error::InvalidCoin(other)),
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Prime::Halve => 0,
            Prime::Double => 1,
        }
    }
}

impl Allocation {
    pub const BOTH: [Allocation; 2] = [Allocation::First, Allocation::Second];

    pub fn from_bit(bit: u8) -> Result<Self> {
        match bit {
            0 => Ok(Allocation::First),
            1 => Ok(Allocation::Second),
            other => Err(Error::InvalidCoin(other)),
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Allocation::First => 0,
            Allocation::Second => 1,
        }
    }
}

/// The five content-and-allocation processes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Process {
    HalveOrDouble,
    DoubleOnly,
    HalveOnly,
    /// Allocate the first envelope, then prime the second with a fair
    /// halve-or-double coin.
    #[serde(rename = "allocate-first", alias = "allocate-first-then-prime")]
    AllocateFirstThenPrime,
    /// Keep the first envelope as the complement, prime the second with a fair
    /// halve-or-double coin and allocate it.
    #[serde(rename = "allocate-second", alias = "prime-second-then-allocate")]
    PrimeSecondThenAllocate,
}

impl Process {
    pub const ALL: [Process; 5] = [
        Process::HalveOrDouble,
        Process::DoubleOnly,
        Process::HalveOnly,
        Process::AllocateFirstThenPrime,
        Process::PrimeSecondThenAllocate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Process::HalveOrDouble => "halve-or-double",
            Process::DoubleOnly => "double-only",
            Process::HalveOnly => "halve-only",
            Process::AllocateFirstThenPrime => "allocate-first",
            Process::PrimeSecondThenAllocate => "allocate-second",
        }
    }

    pub fn fixed_prime(self) -> Option<Prime> {
        match self {
            Process::DoubleOnly => Some(Prime::Double),
            Process::HalveOnly => Some(Prime::Halve),
            _ => None,
        }
    }

    pub fn fixed_allocation(self) -> Option<Allocation> {
        match self {
            Process::AllocateFirstThenPrime => Some(Allocation::First),
            Process::PrimeSecondThenAllocate => Some(Allocation::Second),
            _ => None,
        }
    }

    /// Whether `(ω₂, ω₃)` can be realised under this process.
    pub fn admits(self, prime: Prime, allocation: Allocation) -> bool {
        self.fixed_prime().is_none_or(|p| p == prime)
            && self.fixed_allocation().is_none_or(|a| a == allocation)
    }

    /// Probability of the coin outcomes `(ω₂, ω₃)`: ¼ when both coins are
    /// tossed, ½ when one is fixed, 0 when inadmissible.
    fn coin_probability(self, prime: Prime, allocation: Allocation) -> BigRational {
        if !self.admits(prime, allocation) {
            return BigRational::zero();
        }
        match self {
            Process::HalveOrDouble => BigRational::new(1.into(), 4.into()),
            _ => BigRational::new(1.into(), 2.into()),
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Process {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.trim().to_ascii_lowercase().replace('_', "-");
        let p = match normalized.as_str() {
            "halve-or-double" | "halving-or-doubling" | "hod" => Process::HalveOrDouble,
            "double-only" | "doubling-only" => Process::DoubleOnly,
            "halve-only" | "halving-only" => Process::HalveOnly,
            "allocate-first" | "allocate-first-then-prime" => Process::AllocateFirstThenPrime,
            "allocate-second" | "prime-second-then-allocate" => Process::PrimeSecondThenAllocate,
            _ => return Err(Error::InvalidArgument(format!("unknown process `{s}`"))),
        };
        Ok(p)
    }
}

/// One realised outcome `{x₁; ω₂; ω₃}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HostEvent {
    pub x1: f64,
    pub prime: Prime,
    pub allocation: Allocation,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Play {
    pub event: HostEvent,
    /// Content of the allocated envelope.
    pub y: f64,
    /// Content of the complementary envelope.
    pub z: f64,
    /// `z - y`.
    pub b: f64,
}

/// `g(ω₂) = ½(1 - ω₂) + 2ω₂`.
pub fn g_factor(prime: Prime) -> f64 {
    let w = prime.bit() as f64;
    0.5 * (1.0 - w) + 2.0 * w
}

/// `½(2ω₃ - 1)(1 - 3ω₂)x₁`.
pub fn benefit_identity(x1: f64, prime: Prime, allocation: Allocation) -> f64 {
    let w2 = prime.bit() as f64;
    let w3 = allocation.bit() as f64;
    0.5 * (2.0 * w3 - 1.0) * (1.0 - 3.0 * w2) * x1
}

/// Prime both envelopes and hand one over.
pub fn allocate(x1: f64, prime: Prime, allocation: Allocation) -> Result<Play> {
    if !(x1.is_finite() && x1 > 0.0) {
        return Err(Error::NonpositiveInitialAmount(x1));
    }
    let contents = [x1, g_factor(prime) * x1];
    let w3 = allocation.bit() as f64;
    let a = [[1.0 - w3, w3], [w3, 1.0 - w3]];
    // C = [x₁, x₁'] · A
    let y = contents[0] * a[0][0] + contents[1] * a[1][0];
    let z = contents[0] * a[0][1] + contents[1] * a[1][1];
    Ok(Play {
        event: HostEvent {
            x1,
            prime,
            allocation,
        },
        y,
        z,
        b: z - y,
    })
}

/// `P({c}) = P(X₁ = x₁)·P(ω₂)·P(ω₃)` for a discrete prior, exact.
pub fn event_probability(
    density: &DiscreteDensity,
    event: &HostEvent,
    process: Process,
) -> Result<BigRational> {
    if !process.admits(event.prime, event.allocation) {
        return Err(Error::EventInconsistentWithProcess {
            x1: event.x1,
            omega2: event.prime.bit(),
            omega3: event.allocation.bit(),
            process: process.as_str(),
        });
    }
    let mass = Dyadic::from_f64(event.x1)
        .map(|x| density.mass(&x))
        .unwrap_or_else(BigRational::zero);
    Ok(mass * process.coin_probability(event.prime, event.allocation))
}

/// Run the three experiments once.
pub fn run_play<R: Rng + ?Sized>(density: &Density, process: Process, rng: &mut R) -> Result<Play> {
    let x1 = density.sample(rng)?;
    let prime = match process.fixed_prime() {
        Some(p) => p,
        None => {
            if rng.random::<bool>() {
                Prime::Double
            } else {
                Prime::Halve
            }
        }
    };
    let allocation = match process.fixed_allocation() {
        Some(a) => a,
        None => {
            if rng.random::<bool>() {
                Allocation::Second
            } else {
                Allocation::First
            }
        }
    };
    allocate(x1, prime, allocation)
}

/// Initial amounts that can produce the observation `y`, ascending.
pub fn candidate_initials(y: f64, process: Process) -> Vec<f64> {
    match process {
        Process::DoubleOnly => vec![y / 2.0, y],
        Process::HalveOnly => vec![y, 2.0 * y],
        Process::HalveOrDouble => vec![y / 2.0, y, 2.0 * y],
        Process::AllocateFirstThenPrime => vec![y],
        Process::PrimeSecondThenAllocate => vec![y / 2.0, 2.0 * y],
    }
}
