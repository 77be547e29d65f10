//! Serialized density descriptions.
//!
//! ```json
//! {"name": "power_law", "kind": "continuous", "params": {"n": 2}}
//! {"name": "piecewise", "kind": "continuous", "breakpoints": [0, 1, 2], "values": [0.5, 0.5]}
//! {"name": "table", "kind": "discrete", "points": [1, 2, 4], "masses": [0.5, 0.25, 0.25]}
//! ```

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{catalog_lookup, ContinuousDensity, Density, DiscreteDensity, DEFAULT_RECURRENCE_MAX_INDEX};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityKind {
    Discrete,
    Continuous,
}

impl fmt::Display for DensityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DensityKind::Discrete => "discrete",
            DensityKind::Continuous => "continuous",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    pub name: String,
    pub kind: DensityKind,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    /// Defaults to true for custom densities; catalog entries carry their own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proper: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<f64>>,
}

impl DensitySpec {
    pub fn catalog(name: &str, kind: DensityKind) -> Self {
        DensitySpec {
            name: name.to_string(),
            kind,
            params: BTreeMap::new(),
            proper: None,
            breakpoints: None,
            values: None,
            points: None,
            masses: None,
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedSpec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("density spec serializes")
    }

    pub fn build(&self) -> Result<Density> {
        let density = match self.name.as_str() {
            "piecewise" => {
                self.expect_kind(DensityKind::Continuous)?;
                let (Some(b), Some(v)) = (&self.breakpoints, &self.values) else {
                    return Err(Error::MalformedSpec(
                        "piecewise needs `breakpoints` and `values`".into(),
                    ));
                };
                let d = ContinuousDensity::piecewise(b.clone(), v.clone(), self.proper.unwrap_or(true))?;
                match self.params.get("scale") {
                    Some(&c) if c != 1.0 => d.scaled(c)?.into(),
                    _ => d.into(),
                }
            }
            "table" => {
                self.expect_kind(DensityKind::Discrete)?;
                let (Some(p), Some(m)) = (&self.points, &self.masses) else {
                    return Err(Error::MalformedSpec("table needs `points` and `masses`".into()));
                };
                if p.len() != m.len() {
                    return Err(Error::MalformedSpec(
                        "`points` and `masses` differ in length".into(),
                    ));
                }
                let entries = p
                    .iter()
                    .zip(m)
                    .map(|(&x, &w)| {
                        let point = Dyadic::from_f64(x)
                            .ok_or_else(|| Error::MalformedSpec(format!("bad point {x}")))?;
                        let mass = BigRational::from_float(w)
                            .ok_or_else(|| Error::MalformedSpec(format!("bad mass {w}")))?;
                        Ok((point, mass))
                    })
                    .collect::<Result<Vec<_>>>()?;
                DiscreteDensity::table(entries, self.proper.unwrap_or(true))?.into()
            }
            name => {
                if self.breakpoints.is_some()
                    || self.values.is_some()
                    || self.points.is_some()
                    || self.masses.is_some()
                {
                    return Err(Error::MalformedSpec(format!(
                        "catalog density `{name}` takes only `params`"
                    )));
                }
                let d = catalog_lookup(name, &self.params)?;
                self.expect_kind(d.kind())?;
                if let Some(p) = self.proper {
                    if p != d.is_proper() {
                        return Err(Error::InvalidParameter {
                            density: name.to_string(),
                            reason: format!("catalog density has proper = {}", d.is_proper()),
                        });
                    }
                }
                d
            }
        };
        Ok(density)
    }

    fn expect_kind(&self, kind: DensityKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::MalformedSpec(format!(
                "`{}` is {kind}, not {}",
                self.name, self.kind
            )));
        }
        Ok(())
    }
}

impl Density {
    pub fn from_spec(spec: &DensitySpec) -> Result<Self> {
        spec.build()
    }

    /// Canonical serialized form.
    pub fn to_spec(&self) -> DensitySpec {
        let mut spec = DensitySpec::catalog(self.name(), self.kind());
        match self {
            Density::Discrete(d) => {
                if let Some(max) = d.recurrence_max_index() {
                    if max != DEFAULT_RECURRENCE_MAX_INDEX {
                        spec.params.insert("max_index".into(), max as f64);
                    }
                }
                if let Some(entries) = d.table_entries() {
                    spec.points = Some(entries.keys().map(Dyadic::to_f64).collect());
                    spec.masses = Some(
                        entries
                            .values()
                            .map(|m| m.to_f64().unwrap_or(f64::NAN))
                            .collect(),
                    );
                    spec.proper = Some(d.is_proper());
                }
            }
            Density::Continuous(d) => {
                if let Some(n) = d.power_law_exponent() {
                    spec.params.insert("n".into(), n as f64);
                }
                if d.scale() != 1.0 {
                    spec.params.insert("scale".into(), d.scale());
                }
                if let Some((b, v, proper)) = d.pieces() {
                    spec.breakpoints = Some(b.to_vec());
                    spec.values = Some(v.to_vec());
                    spec.proper = Some(proper);
                }
            }
        }
        spec
    }
}
