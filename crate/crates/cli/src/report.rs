use serde::{Deserialize, Serialize};

use qadic_core::l2grid::SymbolFunction;
use qadic_core::numbers::{DyadicRational, PowerOfTwo};

/// Largest accepted residual of the eta identity, independent of the case.
pub const INTERTWINING_TOLERANCE: f64 = 1e-4;

/// One entry of a case file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityCase {
    pub f: SymbolFunction,
    pub d: DyadicRational,
    pub c: PowerOfTwo,
    pub xi: SymbolFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl DualityCase {
    /// `1e-3` for `c = 1`, where both sides are a single quadrature, and
    /// `5e-3` once a dilation enters.
    pub fn default_tolerance(&self) -> f64 {
        if self.c == PowerOfTwo::ONE {
            1e-3
        } else {
            5e-3
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseEcho {
    pub f: SymbolFunction,
    pub d: DyadicRational,
    pub c: PowerOfTwo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub theorem: f64,
    pub intertwining: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub g: i32,
    pub window: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case: CaseEcho,
    pub residual: f64,
    pub intertwining: f64,
    pub tolerances: Tolerances,
    pub grid: GridInfo,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    /// Seconds since the Unix epoch; the only field that varies between runs.
    pub timestamp: u64,
    pub results: Vec<CaseResult>,
}

impl DualityReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }
}
