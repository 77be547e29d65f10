//! Roots of the exchange condition by bracketing scan and bisection.

use serde::{Deserialize, Serialize};

use super::exchange_condition;
use crate::density::Density;
use crate::error::{Error, Result};
use crate::host::Process;

pub const DEFAULT_SCAN_CELLS: usize = 4096;
pub const DEFAULT_ROOT_TOL: f64 = 1e-9;

const MAX_BISECTIONS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub y: f64,
    /// `|e(y)|` at the returned point.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootScan {
    pub cells: usize,
    pub tol: f64,
}

impl Default for RootScan {
    fn default() -> Self {
        RootScan {
            cells: DEFAULT_SCAN_CELLS,
            tol: DEFAULT_ROOT_TOL,
        }
    }
}

impl RootScan {
    pub fn with_tol(tol: f64) -> Self {
        RootScan {
            tol,
            ..Self::default()
        }
    }
}

/// Sign-change roots of `f` on `[lo, hi]`.
///
/// The interval is cut into `cells` equal cells; every cell whose endpoints
/// have opposite signs is bisected until its width is at most `tol`. A grid
/// point where `f` is exactly zero counts as a root when its neighbours have
/// opposite signs. Functions that vanish on a whole cell have no isolated
/// root there and contribute nothing.
pub fn scan_roots<F>(f: F, lo: f64, hi: f64, scan: RootScan) -> Result<Vec<Root>>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    if !(scan.tol.is_finite() && scan.tol > 0.0) || scan.cells == 0 {
        return Err(Error::InvalidArgument(
            "root scan needs a positive tolerance and at least one cell".into(),
        ));
    }

    let n = scan.cells;
    let grid: Vec<f64> = (0..=n)
        .map(|i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();

    let mut roots = Vec::new();
    for i in 0..n {
        let (a, b) = (grid[i], grid[i + 1]);
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            let left = if i == 0 { None } else { Some(values[i - 1]) };
            if let Some(fl) = left {
                if fl * fb < 0.0 {
                    roots.push(Root { y: a, residual: 0.0 });
                }
            }
            continue;
        }
        if fb == 0.0 || fa * fb > 0.0 || fa.is_nan() || fb.is_nan() {
            continue;
        }
        let y = bisect(&f, a, b, fa, scan.tol);
        roots.push(Root {
            y,
            residual: f(y).abs(),
        });
    }
    Ok(roots)
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    for _ in 0..MAX_BISECTIONS {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Roots of `e(y)` on `[lo, hi]`.
pub fn find_exchange_roots(
    density: &Density,
    process: Process,
    lo: f64,
    hi: f64,
    scan: RootScan,
) -> Result<Vec<Root>> {
    scan_roots(|y| exchange_condition(density, process, y), lo, hi, scan)
}
