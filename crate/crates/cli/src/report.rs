//! Run reports: exact rationals as the source of truth, rendered either as
//! text lines or as a JSON document with a fixed field order.

use std::fmt;
use std::str::FromStr;

use cpi_core::rational::to_decimal;
use cpi_core::{ProbabilityInterval, Rational};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::Options;

/// A rational serialised as `{"num": int, "den": int}` with unbounded integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exact(pub Rational);

fn big(n: &num_bigint::BigInt) -> serde_json::Number {
    serde_json::Number::from_str(&n.to_string()).expect("integer literal")
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Rational", 2)?;
        st.serialize_field("num", &big(self.0.numer()))?;
        st.serialize_field("den", &big(self.0.denom()))?;
        st.end()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Bounds {
    pub lower: Exact,
    pub upper: Exact,
}

impl Bounds {
    pub fn of(iv: &ProbabilityInterval) -> Self {
        Bounds { lower: Exact(iv.lower().clone()), upper: Exact(iv.upper().clone()) }
    }

    fn interval(&self) -> ProbabilityInterval {
        ProbabilityInterval::new(self.lower.0.clone(), self.upper.0.clone()).expect("valid bounds")
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Attained {
    pub lower: bool,
    pub upper: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct QueryLine {
    pub query: String,
    pub lower: Option<Exact>,
    pub upper: Option<Exact>,
    pub status: &'static str,
    pub method: &'static str,
    pub attained: Attained,
    /// `exact`, `converged` or `outer`.
    pub bound: &'static str,
    pub nodes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maxent: Option<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub propagated: Option<Option<Bounds>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Option<Bounds>>,
}

impl QueryLine {
    pub fn new(query: String, status: &'static str, method: &'static str) -> Self {
        QueryLine {
            query,
            lower: None,
            upper: None,
            status,
            method,
            attained: Attained { lower: false, upper: false },
            bound: "exact",
            nodes: 0,
            maxent: None,
            precision: None,
            propagated: None,
            verdict: None,
            grid: None,
        }
    }

    pub fn with_interval(mut self, iv: &ProbabilityInterval) -> Self {
        self.lower = Some(Exact(iv.lower().clone()));
        self.upper = Some(Exact(iv.upper().clone()));
        self
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Stats {
    pub worlds: usize,
    pub lp_pivots: usize,
    pub bnb_nodes: usize,
    pub sweeps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct WorldMass {
    pub world: String,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxentSummary {
    pub entropy: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub distribution: Vec<WorldMass>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropagationSummary {
    pub rules: String,
    pub sweeps: usize,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FocalMass {
    pub set: Vec<String>,
    pub mass: Exact,
}

#[derive(Debug, Clone, Serialize)]
pub struct SetBounds {
    pub set: Vec<String>,
    pub lower: Exact,
    pub upper: Exact,
}

#[derive(Debug, Clone, Serialize)]
pub struct Conflict {
    pub source: String,
    pub kappa: Exact,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct DsSummary {
    pub frame: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combined: Option<Vec<FocalMass>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conflicts: Vec<Conflict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_conflict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope: Option<Vec<SetBounds>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<FocalMass>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<FocalMass>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub queries: Vec<QueryLine>,
    pub feasible: bool,
    pub diagnosis: Option<Vec<usize>>,
    pub stats: Stats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maxent: Option<MaxentSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub propagation: Option<PropagationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ds: Option<DsSummary>,
    /// Text-only lines printed before the query lines.
    #[serde(skip)]
    pub head: Vec<String>,
    /// Text-only lines printed after the query lines.
    #[serde(skip)]
    pub tail: Vec<String>,
}

/// A finished command: its report and process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub code: u8,
}

impl Outcome {
    pub fn ok(report: Report) -> Self {
        Outcome { report, code: 0 }
    }

    pub fn render(&self, opts: &Options) -> String {
        if opts.json {
            let mut s = serde_json::to_string_pretty(&self.report).expect("report serialises");
            s.push('\n');
            s
        } else {
            self.report.text(opts.precision)
        }
    }
}

/// `[0.3, 0.3] (exact 3/10, 3/10)`.
pub fn interval_text(iv: &ProbabilityInterval, places: u32) -> String {
    format!(
        "[{}, {}] (exact {}, {})",
        to_decimal(iv.lower(), places),
        to_decimal(iv.upper(), places),
        iv.lower(),
        iv.upper()
    )
}

pub fn float_text(x: f64, places: u32) -> String {
    let s = format!("{x:.*}", places as usize);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl Report {
    fn text(&self, places: u32) -> String {
        let mut out = String::new();
        for l in &self.head {
            out.push_str(l);
            out.push('\n');
        }
        for q in &self.queries {
            out.push_str(&q.text(places));
        }
        for l in &self.tail {
            out.push_str(l);
            out.push('\n');
        }
        let s = &self.stats;
        out.push_str(&format!(
            "worlds: {}, lp pivots: {}, b&b nodes: {}, sweeps: {}\n",
            s.worlds, s.lp_pivots, s.bnb_nodes, s.sweeps
        ));
        out
    }
}

impl QueryLine {
    fn text(&self, places: u32) -> String {
        let mut out = match (&self.lower, &self.upper) {
            (Some(lo), Some(hi)) => {
                let iv = ProbabilityInterval::new(lo.0.clone(), hi.0.clone()).expect("valid bounds");
                format!("{}: {}\n", self.query, interval_text(&iv, places))
            }
            _ => format!("{}: {}\n", self.query, self.status.replace('_', " ")),
        };
        let mut detail = vec![format!("method: {}", self.method)];
        if self.status == "vacuous_by_zero_antecedent" {
            detail.push("vacuous: the antecedent has probability zero".into());
        }
        match self.bound {
            "converged" => detail.push(format!("converged, {} nodes", self.nodes)),
            "outer" => detail.push(format!("outer bound, node cap reached after {} nodes", self.nodes)),
            _ => {}
        }
        out.push_str(&format!("  {}\n", detail.join(", ")));
        if let Some(m) = &self.maxent {
            let value = m.map_or_else(|| "undefined (antecedent has zero mass)".to_string(), |v| float_text(v, places));
            match self.precision {
                Some(p) => out.push_str(&format!("  maxent: {value} ({p})\n")),
                None => out.push_str(&format!("  maxent: {value}\n")),
            }
        }
        if let Some(p) = &self.propagated {
            match p {
                Some(b) => out.push_str(&format!("  propagated: {}\n", interval_text(&b.interval(), places))),
                None => out.push_str("  propagated: not tracked\n"),
            }
        }
        if let Some(v) = self.verdict {
            out.push_str(&format!("  verdict: {v}\n"));
        }
        if let Some(g) = &self.grid {
            match g {
                Some(b) => out.push_str(&format!("  grid: {}\n", interval_text(&b.interval(), places))),
                None => out.push_str("  grid: no feasible grid point\n"),
            }
        }
        out
    }
}

/// Failures that end a command before a report exists (exit code 1).
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        1
    }

    pub fn to_json(&self) -> String {
        let kind = match self {
            CliError::Input(_) => "input",
            CliError::Usage(_) => "usage",
        };
        serde_json::json!({ "error": { "kind": kind, "message": self.to_string() } }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Usage(m) => f.write_str(m),
        }
    }
}
