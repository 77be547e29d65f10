//! Requests and responses shared by the command line and the JSON service.

use std::collections::BTreeMap;
use std::path::Path;

use envlab_core::benefit::{
    expected_benefit, find_exchange_roots, strategy, BenefitReport, Bounds, Decision, Root, RootScan,
    StrategyOutcome, DEFAULT_ROOT_TOL, DEFAULT_SCAN_CELLS,
};
use envlab_core::density::{catalog_lookup, Density, DensitySpec};
use envlab_core::host::Process;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

/// A catalog name or a full density description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DensityArg {
    Name(String),
    Spec(DensitySpec),
}

impl DensityArg {
    /// Command-line form: a path to a JSON file, inline JSON, or a catalog name.
    pub fn parse_cli(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.starts_with('{') {
            return Ok(DensityArg::Spec(DensitySpec::from_json(trimmed)?));
        }
        let path = Path::new(trimmed);
        if path.is_file() {
            let contents = std::fs::read_to_string(path)?;
            return Ok(DensityArg::Spec(DensitySpec::from_json(&contents)?));
        }
        if trimmed.ends_with(".json") {
            return Err(AppError::Usage(format!("density file `{trimmed}` not found")));
        }
        Ok(DensityArg::Name(trimmed.to_string()))
    }

    pub fn resolve(&self, params: &BTreeMap<String, f64>) -> Result<Density> {
        let density = match self {
            DensityArg::Name(name) => catalog_lookup(name, params)?,
            DensityArg::Spec(spec) => {
                let mut spec = spec.clone();
                spec.params.extend(params.iter().map(|(k, v)| (k.clone(), *v)));
                spec.build()?
            }
        };
        Ok(density)
    }
}

fn bounds(x_l: Option<f64>, x_u: Option<f64>) -> Result<Option<Bounds>> {
    if x_l.is_none() && x_u.is_none() {
        return Ok(None);
    }
    Ok(Some(Bounds::new(x_l, x_u)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRequest {
    pub density: DensityArg,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub process: Process,
    pub y: f64,
    #[serde(default)]
    pub x_l: Option<f64>,
    #[serde(default)]
    pub x_u: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalOutput {
    pub density: String,
    pub process: Process,
    #[serde(flatten)]
    pub report: BenefitReport,
    /// The bounded strategy, when bounds were given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyOutcome>,
}

pub fn evaluate(req: &EvalRequest) -> Result<EvalOutput> {
    let density = req.density.resolve(&req.params)?;
    let report = expected_benefit(&density, req.process, req.y);
    let strategy = match bounds(req.x_l, req.x_u)? {
        Some(b) => Some(strategy(&density, req.process, &b, req.y)?),
        None => None,
    };
    Ok(EvalOutput {
        density: density.name().to_string(),
        process: req.process,
        report,
        strategy,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRequest {
    pub density: DensityArg,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub process: Process,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: GridScale,
}

/// One CSV row; field order is the column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub density: String,
    pub process: Process,
    pub y: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub expected_benefit: f64,
    pub decision: Decision,
    pub attainable: bool,
}

pub const TABLE_HEADER: &str = "density,process,y,numerator,denominator,expected_benefit,decision,attainable";

pub fn grid(start: f64, stop: f64, count: usize, scale: GridScale) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(AppError::EmptyGrid("count is 0".into()));
    }
    if !(start.is_finite() && stop.is_finite()) || start > stop {
        return Err(AppError::EmptyGrid(format!("no points between {start} and {stop}")));
    }
    if count > 1 && start == stop {
        return Err(AppError::EmptyGrid(format!("{count} points requested on a single value")));
    }
    if scale == GridScale::Log && start <= 0.0 {
        return Err(AppError::EmptyGrid("a log grid needs a positive start".into()));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let last = (count - 1) as f64;
    let points = (0..count)
        .map(|i| {
            let t = i as f64 / last;
            if i + 1 == count {
                stop
            } else {
                match scale {
                    GridScale::Linear => start + (stop - start) * t,
                    GridScale::Log => (start.ln() + (stop.ln() - start.ln()) * t).exp(),
                }
            }
        })
        .collect();
    Ok(points)
}

pub fn table_rows(req: &TableRequest) -> Result<Vec<TableRow>> {
    let ys = grid(req.start, req.stop, req.count, req.scale)?;
    let density = req.density.resolve(&req.params)?;
    Ok(ys
        .into_iter()
        .map(|y| {
            let r = expected_benefit(&density, req.process, y);
            TableRow {
                density: density.name().to_string(),
                process: req.process,
                y,
                numerator: r.numerator,
                denominator: r.denominator,
                expected_benefit: r.expected_benefit,
                decision: r.decision,
                attainable: r.attainable,
            }
        })
        .collect())
}

pub fn write_csv<W: std::io::Write>(rows: &[TableRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(TABLE_HEADER.split(','))?;
    for row in rows {
        writer.write_record([
            row.density.clone(),
            row.process.to_string(),
            row.y.to_string(),
            row.numerator.to_string(),
            row.denominator.to_string(),
            row.expected_benefit.to_string(),
            row.decision.to_string(),
            row.attainable.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

impl From<csv::Error> for AppError {
    fn from(e: csv::Error) -> Self {
        AppError::Io(std::io::Error::other(e))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootsRequest {
    pub density: DensityArg,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub process: Process,
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub cells: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootsOutput {
    pub density: String,
    pub process: Process,
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub cells: usize,
    pub roots: Vec<Root>,
}

pub fn roots(req: &RootsRequest) -> Result<RootsOutput> {
    let density = req.density.resolve(&req.params)?;
    let scan = RootScan {
        cells: req.cells.unwrap_or(DEFAULT_SCAN_CELLS),
        tol: req.tol.unwrap_or(DEFAULT_ROOT_TOL),
    };
    let roots = find_exchange_roots(&density, req.process, req.lo, req.hi, scan)?;
    Ok(RootsOutput {
        density: density.name().to_string(),
        process: req.process,
        lo: req.lo,
        hi: req.hi,
        tol: scan.tol,
        cells: scan.cells,
        roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(grid(1.0, 2.0, 3, GridScale::Linear).unwrap(), vec![1.0, 1.5, 2.0]);
        let g = grid(0.01, 100.0, 5, GridScale::Log).unwrap();
        assert!((g[2] - 1.0).abs() < 1e-12);
        assert_eq!(g[4], 100.0);
        assert_eq!(grid(3.0, 3.0, 1, GridScale::Log).unwrap(), vec![3.0]);
        for (a, b, n, s) in [
            (1.0, 2.0, 0, GridScale::Linear),
            (2.0, 1.0, 3, GridScale::Linear),
            (0.0, 1.0, 3, GridScale::Log),
            (1.0, 1.0, 2, GridScale::Linear),
        ] {
            assert!(matches!(grid(a, b, n, s), Err(AppError::EmptyGrid(_))));
        }
    }

    #[test]
    fn density_args() {
        assert_eq!(DensityArg::parse_cli("uniform01").unwrap(), DensityArg::Name("uniform01".into()));
        let inline = DensityArg::parse_cli(r#"{"name":"power_law","kind":"continuous","params":{"n":2}}"#).unwrap();
        assert!(matches!(inline, DensityArg::Spec(_)));
        assert!(DensityArg::parse_cli("{nope").is_err());
        assert!(DensityArg::parse_cli("missing.json").is_err());
        let parsed: DensityArg = serde_json::from_str("\"rayleigh_half\"").unwrap();
        assert_eq!(parsed, DensityArg::Name("rayleigh_half".into()));
    }

    #[test]
    fn csv_header_is_exact() {
        let req = TableRequest {
            density: DensityArg::Name("uniform01".into()),
            params: BTreeMap::new(),
            process: Process::HalveOrDouble,
            start: 0.1,
            stop: 0.2,
            count: 2,
            scale: GridScale::Linear,
        };
        let mut out = Vec::new();
        write_csv(&table_rows(&req).unwrap(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(TABLE_HEADER));
        assert_eq!(lines.next(), Some("uniform01,halve-or-double,0.1,0.45,9,0.05,switch,true"));
    }
}
