use std::collections::BTreeMap;

use serde::Serialize;

use super::{ContinuousDensity, Density, DensityKind, DiscreteDensity, DEFAULT_RECURRENCE_MAX_INDEX};
use crate::error::{Error, Result};

pub const CATALOG_NAMES: [&str; 8] = [
    "uniform01",
    "rayleigh_half",
    "broome_discrete",
    "broome_continuous",
    "extreme_values",
    "recurrence",
    "improper_exp",
    "power_law",
];

/// Recurrence tables beyond this index only add masses below 2^-4000.
const MAX_RECURRENCE_INDEX: f64 = 4096.0;

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: DensityKind,
    pub proper: bool,
    pub formula: &'static str,
    pub params: &'static str,
}

pub fn catalog_entries() -> Vec<CatalogEntry> {
    use DensityKind::*;
    let entry = |name, kind, proper, formula, params| CatalogEntry {
        name,
        kind,
        proper,
        formula,
        params,
    };
    vec![
        entry("uniform01", Continuous, true, "f(x) = 1 on (0, 1]", "scale"),
        entry(
            "rayleigh_half",
            Continuous,
            true,
            "f(x) = 8x exp(-4x^2), x > 0 (Weibull, lambda = 1/2, k = 2)",
            "scale",
        ),
        entry(
            "broome_discrete",
            Discrete,
            true,
            "P(2^n) = 2^n / 3^(n+1), n >= 0",
            "",
        ),
        entry(
            "broome_continuous",
            Continuous,
            true,
            "f(x) = 1/(x+1)^2, x > 0",
            "scale",
        ),
        entry(
            "extreme_values",
            Continuous,
            true,
            "f(x) = 10^(-2k-1) on [10^k, 10^(k+1)), k >= 0",
            "scale",
        ),
        entry(
            "recurrence",
            Discrete,
            false,
            "p_0 = 1/12, p_n = p_(n-1)/2 + 2^-(2n+1) at 2^n (total mass 1/2)",
            "max_index (default 64)",
        ),
        entry(
            "improper_exp",
            Continuous,
            false,
            "f(x) = 2^(-4x^2), x > 0, unnormalised",
            "scale",
        ),
        entry(
            "power_law",
            Continuous,
            false,
            "f(x) = x^(-n), x > 0, improper",
            "n (integer >= 1), scale",
        ),
    ]
}

/// Build a catalog density by name.
pub fn catalog_lookup(name: &str, params: &BTreeMap<String, f64>) -> Result<Density> {
    if !CATALOG_NAMES.contains(&name) {
        return Err(Error::UnknownDensity(name.to_string()));
    }
    let allowed: &[&str] = match name {
        "broome_discrete" => &[],
        "recurrence" => &["max_index"],
        "power_law" => &["n", "scale"],
        _ => &["scale"],
    };
    if let Some(key) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(invalid(name, format!("unknown parameter `{key}`")));
    }

    let density: Density = match name {
        "broome_discrete" => DiscreteDensity::broome().into(),
        "recurrence" => {
            let max_index = match params.get("max_index") {
                Some(&v) => integer_param(name, "max_index", v, 0.0, MAX_RECURRENCE_INDEX)? as u32,
                None => DEFAULT_RECURRENCE_MAX_INDEX,
            };
            DiscreteDensity::recurrence(max_index).into()
        }
        _ => {
            let base = match name {
                "uniform01" => ContinuousDensity::uniform01(),
                "rayleigh_half" => ContinuousDensity::rayleigh_half(),
                "broome_continuous" => ContinuousDensity::broome_continuous(),
                "extreme_values" => ContinuousDensity::extreme_values(),
                "improper_exp" => ContinuousDensity::improper_exp(),
                "power_law" => {
                    let n = params
                        .get("n")
                        .ok_or_else(|| invalid(name, "missing parameter `n`".into()))?;
                    let n = integer_param(name, "n", *n, 1.0, 64.0)?;
                    ContinuousDensity::power_law(n as u32)?
                }
                _ => unreachable!(),
            };
            match params.get("scale") {
                Some(&c) if c != 1.0 => base.scaled(c)?.into(),
                _ => base.into(),
            }
        }
    };
    Ok(density)
}

fn integer_param(density: &str, key: &str, v: f64, min: f64, max: f64) -> Result<u64> {
    if v.fract() != 0.0 || v < min || v > max {
        return Err(invalid(
            density,
            format!("`{key}` must be an integer in [{min}, {max}], got {v}"),
        ));
    }
    Ok(v as u64)
}

fn invalid(density: &str, reason: String) -> Error {
    Error::InvalidParameter {
        density: density.to_string(),
        reason,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;
    use num_rational::BigRational;

    fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn every_name_resolves() {
        for name in CATALOG_NAMES {
            let p = if name == "power_law" {
                params(&[("n", 2.0)])
            } else {
                BTreeMap::new()
            };
            let d = catalog_lookup(name, &p).unwrap();
            assert_eq!(d.name(), name);
        }
        assert_eq!(catalog_entries().len(), 8);
    }

    #[test]
    fn uniform_example() {
        let d = catalog_lookup("uniform01", &BTreeMap::new()).unwrap();
        assert_eq!(d.weight_at(0.3), 1.0);
        assert_eq!(d.weight_at(1.5), 0.0);
    }

    #[test]
    fn broome_discrete_example() {
        let d = catalog_lookup("broome_discrete", &BTreeMap::new()).unwrap();
        let d = d.as_discrete().unwrap();
        assert_eq!(
            d.mass(&Dyadic::pow2(0)),
            BigRational::new(1.into(), 3.into())
        );
        assert_eq!(
            d.mass(&Dyadic::pow2(1)),
            BigRational::new(2.into(), 9.into())
        );
    }

    #[test]
    fn recurrence_example() {
        let d = catalog_lookup("recurrence", &BTreeMap::new()).unwrap();
        let d = d.as_discrete().unwrap();
        assert_eq!(d.mass(&Dyadic::pow2(0)), BigRational::new(1.into(), 12.into()));
        assert_eq!(d.mass(&Dyadic::pow2(1)), BigRational::new(1.into(), 6.into()));
        let short = catalog_lookup("recurrence", &params(&[("max_index", 3.0)])).unwrap();
        assert_eq!(short.as_discrete().unwrap().recurrence_max_index(), Some(3));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            catalog_lookup("cauchy", &BTreeMap::new()),
            Err(Error::UnknownDensity(_))
        ));
        for p in [
            params(&[("n", 0.0)]),
            params(&[("n", 1.5)]),
            BTreeMap::new(),
            params(&[("n", 2.0), ("lambda", 1.0)]),
        ] {
            assert!(matches!(
                catalog_lookup("power_law", &p),
                Err(Error::InvalidParameter { .. })
            ));
        }
        assert!(catalog_lookup("uniform01", &params(&[("scale", -1.0)])).is_err());
    }

    #[test]
    fn scale_param() {
        let d = catalog_lookup("improper_exp", &params(&[("scale", 100.0)])).unwrap();
        assert_eq!(d.weight_at(0.5), 100.0 * 0.5);
    }
}
