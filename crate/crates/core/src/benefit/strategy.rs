//! The bounded indicator strategy `s(y)`.
//!
//! With content bounds `x_l < x_u`, an observation below `2x_l` cannot be the
//! larger of a halve/double pair, so switching gains `y`; one above `x_u/2`
//! cannot be the smaller, so switching loses `y/2`. In between (boundaries
//! included) the expected-benefit formula decides.

use serde::{Deserialize, Serialize};

use super::{expected_benefit, BenefitReport, Decision};
use crate::density::Density;
use crate::error::{Error, Result};
use crate::host::Process;

/// Caller-supplied bounds on observable envelope contents.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x_l: Option<f64>,
    pub x_u: Option<f64>,
}

impl Bounds {
    pub fn new(x_l: Option<f64>, x_u: Option<f64>) -> Result<Self> {
        if let Some(l) = x_l {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::InvalidBounds(format!("x_l must be finite and nonnegative, got {l}")));
            }
        }
        if let Some(u) = x_u {
            if u.is_nan() || u <= 0.0 {
                return Err(Error::InvalidBounds(format!("x_u must be positive, got {u}")));
            }
        }
        if let (Some(l), Some(u)) = (x_l, x_u) {
            if l >= u {
                return Err(Error::InvalidBounds(format!("need x_l < x_u, got {l} >= {u}")));
            }
        }
        Ok(Bounds { x_l, x_u })
    }

    pub fn none() -> Self {
        Bounds::default()
    }

    pub fn contains(&self, y: f64) -> bool {
        y > 0.0
            && self.x_l.is_none_or(|l| y >= l)
            && self.x_u.is_none_or(|u| y <= u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// `y < 2x_l`.
    Lower,
    Formula,
    /// `y > x_u/2`.
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    pub decision: Decision,
    pub value: f64,
    pub region: Region,
    /// Present when the formula decided.
    pub report: Option<BenefitReport>,
}

pub fn strategy(density: &Density, process: Process, bounds: &Bounds, y: f64) -> Result<StrategyOutcome> {
    if !bounds.contains(y) || !y.is_finite() {
        return Err(Error::ObservationOutsideBounds {
            y,
            lower: bounds.x_l.unwrap_or(0.0),
            upper: bounds.x_u.unwrap_or(f64::INFINITY),
        });
    }
    if let Some(l) = bounds.x_l {
        if y < 2.0 * l {
            return Ok(StrategyOutcome {
                decision: Decision::Switch,
                value: y,
                region: Region::Lower,
                report: None,
            });
        }
    }
    if let Some(u) = bounds.x_u {
        if y > u / 2.0 {
            return Ok(StrategyOutcome {
                decision: Decision::Stay,
                value: -y / 2.0,
                region: Region::Upper,
                report: None,
            });
        }
    }
    let report = expected_benefit(density, process, y);
    Ok(StrategyOutcome {
        decision: report.decision,
        value: report.expected_benefit,
        region: Region::Formula,
        report: Some(report),
    })
}
