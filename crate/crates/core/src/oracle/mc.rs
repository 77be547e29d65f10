//! Seeded Monte-Carlo estimates of the benefit of switching.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benefit::BenefitReport;
use crate::density::Density;
use crate::error::{Error, Result};
use crate::host::{run_play, Process};
use crate::rng::{shard_rng, HostRng};

/// Plays per shard. Shard `i` always covers plays `[i·SHARD_PLAYS, (i+1)·SHARD_PLAYS)`
/// so estimates depend only on the seed and the play count.
const SHARD_PLAYS: u64 = 1 << 16;

/// Window bias allowance per unit of `ε`.
pub const BIAS_ALLOWANCE_C: f64 = 2.0;
/// Conditioned samples the automatic estimator aims for.
pub const MIN_CONDITIONED: u64 = 10_000;
/// Play budget of the automatic estimator.
pub const AUTO_MAX_PLAYS: u64 = 100_000_000;

/// Count, sum and sum of squares of benefits; merges associatively.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sumsq: f64,
}

impl Moments {
    pub fn push(&mut self, b: f64) {
        self.count += 1;
        self.sum += b;
        self.sumsq += b * b;
    }

    pub fn merge(self, other: Moments) -> Moments {
        Moments {
            count: self.count + other.count,
            sum: self.sum + other.sum,
            sumsq: self.sumsq + other.sumsq,
        }
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Standard error of the mean, from the unbiased sample variance.
    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let var = ((self.sumsq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub y_center: f64,
    /// Half-width of the window; 0 for discrete priors, which condition on
    /// `Y = y` exactly.
    pub epsilon: f64,
    pub n_total: u64,
    pub n_conditioned: u64,
    pub mean_benefit: f64,
    pub std_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnconditionalEstimate {
    pub n: u64,
    pub mean_benefit: f64,
    pub std_error: f64,
}

fn sharded<F>(n: u64, seed: u64, per_shard: F) -> Result<Moments>
where
    F: Fn(&mut HostRng, u64) -> Result<Moments> + Sync,
{
    let shards = n.div_ceil(SHARD_PLAYS);
    let parts: Vec<Moments> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let plays = SHARD_PLAYS.min(n - s * SHARD_PLAYS);
            per_shard(&mut shard_rng(seed, s), plays)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(Moments::default(), Moments::merge))
}

fn check_sampleable(density: &Density) -> Result<()> {
    if density.is_proper() && density.can_sample() {
        Ok(())
    } else {
        Err(Error::ImproperDensityUnsampleable(density.name().to_string()))
    }
}

/// Mean benefit over the plays whose allocated content lies in
/// `(y - ε, y + ε]` (continuous) or equals `y` (discrete).
pub fn mc_conditional_benefit(
    density: &Density,
    process: Process,
    y: f64,
    epsilon: f64,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_sampleable(density)?;
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::InvalidArgument(format!("observation must be positive, got {y}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one play".into()));
    }
    let discrete = matches!(density, Density::Discrete(_));
    if !discrete && !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("window half-width must be positive, got {epsilon}")));
    }
    let (lo, hi) = (y - epsilon, y + epsilon);
    let moments = sharded(n, seed, |rng, plays| {
        let mut m = Moments::default();
        for _ in 0..plays {
            let play = run_play(density, process, rng)?;
            let hit = if discrete {
                play.y == y
            } else {
                lo < play.y && play.y <= hi
            };
            if hit {
                m.push(play.b);
            }
        }
        Ok(m)
    })?;
    if moments.count == 0 {
        return Err(Error::ZeroConditionedSamples { y });
    }
    Ok(McEstimate {
        y_center: y,
        epsilon: if discrete { 0.0 } else { epsilon },
        n_total: n,
        n_conditioned: moments.count,
        mean_benefit: moments.mean(),
        std_error: moments.std_error(),
    })
}

/// Run with `ε = y/128` (unless given), growing the play count from `n_start`
/// until at least [`MIN_CONDITIONED`] plays land in the window or the budget
/// [`AUTO_MAX_PLAYS`] is spent.
pub fn mc_conditional_benefit_auto(
    density: &Density,
    process: Process,
    y: f64,
    epsilon: Option<f64>,
    n_start: u64,
    seed: u64,
) -> Result<McEstimate> {
    let epsilon = epsilon.unwrap_or(y / 128.0);
    let mut n = n_start.clamp(1, AUTO_MAX_PLAYS);
    loop {
        let estimate = match mc_conditional_benefit(density, process, y, epsilon, n, seed) {
            Err(Error::ZeroConditionedSamples { .. }) if n < AUTO_MAX_PLAYS => None,
            other => Some(other?),
        };
        if let Some(e) = estimate {
            if e.n_conditioned >= MIN_CONDITIONED || n >= AUTO_MAX_PLAYS {
                return Ok(e);
            }
            let wanted = (n as f64 * 1.25 * MIN_CONDITIONED as f64 / e.n_conditioned as f64).ceil() as u64;
            n = wanted.clamp(2 * n, AUTO_MAX_PLAYS);
        } else {
            n = (8 * n).min(AUTO_MAX_PLAYS);
        }
    }
}

/// Outcome of comparing an analytic value with an estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub analytic: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub k_sigma: f64,
    pub bias_allowance: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Pass iff `|analytic - estimate| ≤ k·se + 2ε`.
pub fn compare(analytic: &BenefitReport, estimate: &McEstimate, k_sigma: f64) -> Comparison {
    let bias_allowance = BIAS_ALLOWANCE_C * estimate.epsilon;
    let tolerance = k_sigma * estimate.std_error + bias_allowance;
    let deviation = (analytic.expected_benefit - estimate.mean_benefit).abs();
    Comparison {
        analytic: analytic.expected_benefit,
        estimate: estimate.mean_benefit,
        std_error: estimate.std_error,
        k_sigma,
        bias_allowance,
        deviation,
        tolerance,
        pass: analytic.attainable && estimate.n_conditioned > 0 && deviation <= tolerance,
    }
}

/// Mean of `b` over `n` plays regardless of the observed content: the
/// per-play gain of always switching over never switching when the agent
/// cannot see inside the envelope.
pub fn blind_switch_advantage(density: &Density, process: Process, n: u64, seed: u64) -> Result<UnconditionalEstimate> {
    check_sampleable(density)?;
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one play".into()));
    }
    let moments = sharded(n, seed, |rng, plays| {
        let mut m = Moments::default();
        for _ in 0..plays {
            m.push(run_play(density, process, rng)?.b);
        }
        Ok(m)
    })?;
    Ok(UnconditionalEstimate {
        n,
        mean_benefit: moments.mean(),
        std_error: moments.std_error(),
    })
}
