use rand::distr::{Open01, OpenClosed01, StandardUniform};
use rand::Rng;

use crate::error::{Error, Result};

/// Interval on which a pdf may be nonzero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Support {
    pub lower: f64,
    pub upper: f64,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl Support {
    /// `(lower, upper]`
    pub fn left_open(lower: f64, upper: f64) -> Self {
        Support {
            lower,
            upper,
            lower_closed: false,
            upper_closed: upper.is_finite(),
        }
    }

    /// `[lower, upper)`
    pub fn left_closed(lower: f64, upper: f64) -> Self {
        Support {
            lower,
            upper,
            lower_closed: true,
            upper_closed: false,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lower_closed {
            x >= self.lower
        } else {
            x > self.lower
        };
        let below = if self.upper_closed {
            x <= self.upper
        } else {
            x < self.upper
        };
        above && below
    }
}

/// A (possibly unnormalised) density for the initial amount.
///
/// The pdf is `scale · base(x)`; the scale never changes a switching
/// decision, which is what makes improper priors usable here.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousDensity {
    family: ContinuousFamily,
    scale: f64,
}

#[derive(Clone, Debug, PartialEq)]
enum ContinuousFamily {
    /// `1` on `(0, 1]`.
    Uniform01,
    /// Weibull with λ = 1/2, k = 2: `8x·exp(-4x²)`.
    RayleighHalf,
    /// `1/(x+1)²`.
    BroomeContinuous,
    /// `10^(-2k-1)` on `[10^k, 10^(k+1))`, `k ≥ 0`.
    ExtremeValues,
    /// `2^(-4x²)`, not normalised.
    ImproperExp,
    /// `x^(-n)`, not normalisable.
    PowerLaw { n: u32 },
    /// `values[i]` on `(breakpoints[i], breakpoints[i+1]]`.
    Piecewise {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        proper: bool,
    },
}

impl ContinuousDensity {
    fn of(family: ContinuousFamily) -> Self {
        ContinuousDensity { family, scale: 1.0 }
    }

    pub fn uniform01() -> Self {
        Self::of(ContinuousFamily::Uniform01)
    }

    pub fn rayleigh_half() -> Self {
        Self::of(ContinuousFamily::RayleighHalf)
    }

    pub fn broome_continuous() -> Self {
        Self::of(ContinuousFamily::BroomeContinuous)
    }

    pub fn extreme_values() -> Self {
        Self::of(ContinuousFamily::ExtremeValues)
    }

    pub fn improper_exp() -> Self {
        Self::of(ContinuousFamily::ImproperExp)
    }

    pub fn power_law(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                density: "power_law".into(),
                reason: "n must be an integer >= 1".into(),
            });
        }
        Ok(Self::of(ContinuousFamily::PowerLaw { n }))
    }

    /// Piecewise-constant pdf: `values[i]` on `(breakpoints[i], breakpoints[i+1]]`.
    pub fn piecewise(breakpoints: Vec<f64>, values: Vec<f64>, proper: bool) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidParameter {
            density: "piecewise".into(),
            reason: reason.into(),
        };
        if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
            return Err(invalid("need k+1 breakpoints for k values, k >= 1"));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints[0] < 0.0 {
            return Err(invalid("breakpoints must be finite and nonnegative"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid("values must be finite and nonnegative"));
        }
        let mass: f64 = piece_masses(&breakpoints, &values).sum();
        if mass <= 0.0 {
            return Err(invalid("density has zero mass"));
        }
        if proper && (mass - 1.0).abs() > 1e-9 {
            return Err(invalid("proper piecewise density must integrate to 1"));
        }
        Ok(Self::of(ContinuousFamily::Piecewise {
            breakpoints,
            values,
            proper,
        }))
    }

    /// Same density multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter {
                density: self.name().into(),
                reason: format!("scale must be positive and finite, got {c}"),
            });
        }
        Ok(ContinuousDensity {
            family: self.family.clone(),
            scale: self.scale * c,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            ContinuousFamily::Uniform01 => "uniform01",
            ContinuousFamily::RayleighHalf => "rayleigh_half",
            ContinuousFamily::BroomeContinuous => "broome_continuous",
            ContinuousFamily::ExtremeValues => "extreme_values",
            ContinuousFamily::ImproperExp => "improper_exp",
            ContinuousFamily::PowerLaw { .. } => "power_law",
            ContinuousFamily::Piecewise { .. } => "piecewise",
        }
    }

    pub fn power_law_exponent(&self) -> Option<u32> {
        match self.family {
            ContinuousFamily::PowerLaw { n } => Some(n),
            _ => None,
        }
    }

    /// Breakpoints, values and declared properness of a piecewise density.
    pub(crate) fn pieces(&self) -> Option<(&[f64], &[f64], bool)> {
        match &self.family {
            ContinuousFamily::Piecewise {
                breakpoints,
                values,
                proper,
            } => Some((breakpoints, values, *proper)),
            _ => None,
        }
    }

    /// Normalised (integrates to 1) and unscaled.
    pub fn is_proper(&self) -> bool {
        let family_proper = match &self.family {
            ContinuousFamily::ImproperExp | ContinuousFamily::PowerLaw { .. } => false,
            ContinuousFamily::Piecewise { proper, .. } => *proper,
            _ => true,
        };
        family_proper && self.scale == 1.0
    }

    pub fn can_sample(&self) -> bool {
        self.is_proper()
    }

    pub fn support(&self) -> Support {
        match &self.family {
            ContinuousFamily::Uniform01 => Support::left_open(0.0, 1.0),
            ContinuousFamily::ExtremeValues => Support::left_closed(1.0, f64::INFINITY),
            ContinuousFamily::Piecewise { breakpoints, .. } => {
                Support::left_open(breakpoints[0], *breakpoints.last().unwrap())
            }
            _ => Support::left_open(0.0, f64::INFINITY),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !self.support().contains(x) {
            return 0.0;
        }
        let base = match &self.family {
            ContinuousFamily::Uniform01 => 1.0,
            ContinuousFamily::RayleighHalf => 8.0 * x * (-4.0 * x * x).exp(),
            ContinuousFamily::BroomeContinuous => 1.0 / ((x + 1.0) * (x + 1.0)),
            ContinuousFamily::ExtremeValues => {
                let k = decade(x);
                1.0 / 10f64.powi(2 * k + 1)
            }
            ContinuousFamily::ImproperExp => (-4.0 * x * x).exp2(),
            ContinuousFamily::PowerLaw { n } => x.powi(*n as i32).recip(),
            ContinuousFamily::Piecewise {
                breakpoints,
                values,
                ..
            } => {
                // first breakpoint >= x closes the piece containing x
                let i = breakpoints.partition_point(|b| *b < x);
                values[i - 1]
            }
        };
        self.scale * base
    }

    /// Inverse-transform sampling; only proper densities can be sampled.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        if !self.can_sample() {
            return Err(Error::ImproperDensityUnsampleable(self.name().into()));
        }
        let x = match &self.family {
            ContinuousFamily::Uniform01 => rng.sample::<f64, _>(OpenClosed01),
            ContinuousFamily::RayleighHalf => {
                let u: f64 = rng.sample(Open01);
                0.5 * (-u.ln()).sqrt()
            }
            ContinuousFamily::BroomeContinuous => {
                // F(x) = x/(x+1)
                let u: f64 = rng.sample(Open01);
                u / (1.0 - u)
            }
            ContinuousFamily::ExtremeValues => {
                // decade k carries mass 0.9·10^-k
                let mut k = 0;
                while rng.random_bool(0.1) {
                    k += 1;
                }
                let low = 10f64.powi(k);
                let u: f64 = rng.sample(StandardUniform);
                low + 9.0 * low * u
            }
            ContinuousFamily::Piecewise {
                breakpoints,
                values,
                ..
            } => {
                let masses: Vec<f64> = piece_masses(breakpoints, values).collect();
                let total: f64 = masses.iter().sum();
                let mut target = rng.sample::<f64, _>(StandardUniform) * total;
                let mut i = 0;
                while i + 1 < masses.len() && (target >= masses[i] || masses[i] == 0.0) {
                    target -= masses[i];
                    i += 1;
                }
                let u: f64 = rng.sample(OpenClosed01);
                breakpoints[i] + u * (breakpoints[i + 1] - breakpoints[i])
            }
            ContinuousFamily::ImproperExp | ContinuousFamily::PowerLaw { .. } => unreachable!(),
        };
        Ok(x)
    }
}

fn piece_masses<'a>(breakpoints: &'a [f64], values: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
    breakpoints
        .windows(2)
        .zip(values)
        .map(|(w, v)| v * (w[1] - w[0]))
}

/// `k` with `10^k <= x < 10^(k+1)`, for `x >= 1`.
fn decade(x: f64) -> i32 {
    let mut k = 0;
    let mut next = 10.0;
    while x >= next {
        k += 1;
        next *= 10.0;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_pdf() {
        let d = ContinuousDensity::uniform01();
        assert_eq!(d.pdf(0.3), 1.0);
        assert_eq!(d.pdf(1.0), 1.0);
        assert_eq!(d.pdf(1.5), 0.0);
        assert_eq!(d.pdf(0.0), 0.0);
    }

    #[test]
    fn extreme_values_decades() {
        let d = ContinuousDensity::extreme_values();
        assert_eq!(d.pdf(0.999), 0.0);
        assert_eq!(d.pdf(1.0), 0.1);
        assert_eq!(d.pdf(9.99), 0.1);
        assert_eq!(d.pdf(10.0), 1e-3);
        assert_eq!(d.pdf(100.0), 1e-5);
        assert_eq!(d.pdf(999.0), 1e-5);
    }

    #[test]
    fn extreme_values_is_normalised() {
        // sum_k 10^(-2k-1) · 9·10^k
        let total: f64 = (0..40).map(|k| 9.0 * 10f64.powi(-k - 1)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(ContinuousDensity::extreme_values().is_proper());
    }

    #[test]
    fn power_law_rejects_zero() {
        assert!(matches!(
            ContinuousDensity::power_law(0),
            Err(Error::InvalidParameter { .. })
        ));
        let d = ContinuousDensity::power_law(2).unwrap();
        assert_eq!(d.pdf(2.0), 0.25);
        assert!(!d.is_proper());
    }

    #[test]
    fn piecewise_intervals_are_left_open() {
        let d = ContinuousDensity::piecewise(vec![0.0, 1.0, 3.0], vec![0.5, 0.25], true).unwrap();
        assert_eq!(d.pdf(0.0), 0.0);
        assert_eq!(d.pdf(1.0), 0.5);
        assert_eq!(d.pdf(1.0 + 1e-12), 0.25);
        assert_eq!(d.pdf(3.0), 0.25);
        assert_eq!(d.pdf(3.5), 0.0);
        assert!(ContinuousDensity::piecewise(vec![0.0, 1.0], vec![2.0], true).is_err());
        assert!(ContinuousDensity::piecewise(vec![1.0, 0.5], vec![2.0], false).is_err());
    }

    #[test]
    fn scaling_multiplies_pdf_and_drops_properness() {
        let d = ContinuousDensity::rayleigh_half().scaled(3.0).unwrap();
        let base = ContinuousDensity::rayleigh_half();
        assert_eq!(d.pdf(0.4), 3.0 * base.pdf(0.4));
        assert!(!d.is_proper());
        assert!(base.scaled(0.0).is_err());
    }

    #[test]
    fn samplers_respect_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for d in [
            ContinuousDensity::uniform01(),
            ContinuousDensity::rayleigh_half(),
            ContinuousDensity::broome_continuous(),
            ContinuousDensity::extreme_values(),
            ContinuousDensity::piecewise(vec![0.5, 1.0, 2.0], vec![1.0, 0.5], true).unwrap(),
        ] {
            for _ in 0..10_000 {
                let x = d.sample(&mut rng).unwrap();
                assert!(d.pdf(x) > 0.0, "{} sampled {x} outside support", d.name());
            }
        }
    }

    #[test]
    fn improper_densities_refuse_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [
            ContinuousDensity::improper_exp(),
            ContinuousDensity::power_law(1).unwrap(),
            ContinuousDensity::uniform01().scaled(2.0).unwrap(),
        ] {
            assert!(matches!(
                d.sample(&mut rng),
                Err(Error::ImproperDensityUnsampleable(_))
            ));
        }
    }

    #[test]
    fn rayleigh_sample_mean() {
        // mean of Weibull(λ=1/2, k=2) is λ·Γ(3/2) = √π/4; variance λ²(1 - π/4)
        let d = ContinuousDensity::rayleigh_half();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 100_000;
        let mean = (0..n).map(|_| d.sample(&mut rng).unwrap()).sum::<f64>() / n as f64;
        let expected = std::f64::consts::PI.sqrt() / 4.0;
        let se = (0.25 * (1.0 - std::f64::consts::PI / 4.0) / n as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * se, "mean {mean}");
    }
}
