//! Reproducible experiments shared by the command-line tool, the examples
//! and the acceptance harness. Each returns a [`Report`] whose rows carry an
//! estimate, its standard error or tolerance, an oracle and a verdict.

pub mod constants;
pub mod fclt;
pub mod lift;
pub mod moment;
pub mod pvar;
pub mod rde_demo;
pub mod simulate;
pub mod third_order;
pub mod young_check;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::fmt_g17;

/// One line of a result table. `pass` is `None` for informational rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub tol: Option<f64>,
    pub oracle: Option<f64>,
    pub pass: Option<bool>,
}

impl Row {
    /// Monte Carlo estimate with standard error.
    pub fn mc(name: impl Into<String>, estimate: f64, stderr: f64, oracle: Option<f64>, pass: bool) -> Self {
        Self {
            name: name.into(),
            estimate,
            stderr: Some(stderr),
            tol: None,
            oracle,
            pass: Some(pass),
        }
    }

    /// Deterministic value compared within `tol`.
    pub fn exact(name: impl Into<String>, estimate: f64, tol: f64, oracle: Option<f64>, pass: bool) -> Self {
        Self {
            name: name.into(),
            estimate,
            stderr: None,
            tol: Some(tol),
            oracle,
            pass: Some(pass),
        }
    }

    /// Marks the row as informational.
    pub fn info(mut self) -> Self {
        self.pass = None;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub params: serde_json::Value,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new<P: Serialize>(experiment: &str, params: &P) -> Result<Self> {
        Ok(Self {
            experiment: experiment.to_string(),
            params: serde_json::to_value(params)?,
            rows: Vec::new(),
        })
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    /// True when no row fails.
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass != Some(false))
    }

    pub fn failures(&self) -> Vec<&Row> {
        self.rows.iter().filter(|r| r.pass == Some(false)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Rows as CSV with columns `name,estimate,stderr,tol,oracle,pass`.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_g17).unwrap_or_default();
        let mut out = String::from("name,estimate,stderr,tol,oracle,pass\n");
        for r in &self.rows {
            let pass = match r.pass {
                Some(true) => "true",
                Some(false) => "false",
                None => "",
            };
            let name = if r.name.contains([',', '"']) {
                format!("\"{}\"", r.name.replace('"', "\"\""))
            } else {
                r.name.clone()
            };
            out.push_str(&format!(
                "{name},{},{},{},{},{pass}\n",
                fmt_g17(r.estimate),
                opt(r.stderr),
                opt(r.tol),
                opt(r.oracle)
            ));
        }
        out
    }

    /// Human-readable summary, one line per row.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let verdict = match r.pass {
                Some(true) => "ok  ",
                Some(false) => "FAIL",
                None => "info",
            };
            let err = match (r.stderr, r.tol) {
                (Some(se), _) => format!(" se={se:.3e}"),
                (None, Some(t)) => format!(" tol={t:.3e}"),
                _ => String::new(),
            };
            let oracle = r.oracle.map(|o| format!(" oracle={o:.6e}")).unwrap_or_default();
            out.push_str(&format!("[{verdict}] {}: {:.6e}{err}{oracle}\n", r.name, r.estimate));
        }
        out
    }
}

/// `2^{-k m H}`.
pub(crate) fn dyadic_scale(m: u32, k: f64, h: f64) -> f64 {
    (-(k * h * m as f64) * std::f64::consts::LN_2).exp()
}
