//! Deterministic plain-text output: a minimal ordered JSON writer and CSV
//! tables.
//!
//! Identical inputs must serialize to byte-identical text on every run and
//! platform, so this module avoids hash-map key ordering and
//! locale/platform-dependent float formatting entirely:
//!
//! - JSON objects are ordered pairs, rendered in insertion order;
//! - JSON floats print as `{:.16e}` (17 significant digits, exact f64
//!   round-trip);
//! - CSV floats print with `{}` (shortest representation that round-trips).

use crate::functional::EnergyBreakdown;
use crate::grid::RadialField;
use crate::mountain_pass::SolveResult;
use crate::params::{AdmissibilityReport, ModelParams, PotentialSpec};
use crate::spectrum::SpectrumResult;
use crate::verify::CheckResult;

/// JSON value with insertion-ordered objects.
#[derive(Debug, Clone)]
pub enum JsonValue {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Array(Vec<JsonValue>),
    Object(Vec<(String, JsonValue)>),
}

impl From<bool> for JsonValue {
    fn from(b: bool) -> Self {
        JsonValue::Bool(b)
    }
}
impl From<i64> for JsonValue {
    fn from(i: i64) -> Self {
        JsonValue::Int(i)
    }
}
impl From<usize> for JsonValue {
    fn from(i: usize) -> Self {
        JsonValue::Int(i as i64)
    }
}
impl From<f64> for JsonValue {
    fn from(x: f64) -> Self {
        JsonValue::Float(x)
    }
}
impl From<&str> for JsonValue {
    fn from(s: &str) -> Self {
        JsonValue::Str(s.to_owned())
    }
}
impl From<String> for JsonValue {
    fn from(s: String) -> Self {
        JsonValue::Str(s)
    }
}
impl From<Vec<f64>> for JsonValue {
    fn from(v: Vec<f64>) -> Self {
        JsonValue::Array(v.into_iter().map(JsonValue::Float).collect())
    }
}

/// Ordered-object constructor: `obj([("key", value.into()), …])`.
pub fn obj<const N: usize>(pairs: [(&str, JsonValue); N]) -> JsonValue {
    JsonValue::Object(
        pairs
            .into_iter()
            .map(|(k, v)| (k.to_owned(), v))
            .collect(),
    )
}

fn escape_into(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

/// `{:.16e}` carries 17 significant digits: enough to reproduce any f64
/// exactly on parse. Non-finite values are not valid JSON numbers and render
/// as tagged strings.
fn float_into(out: &mut String, x: f64) {
    if x.is_finite() {
        out.push_str(&format!("{x:.16e}"));
    } else if x.is_nan() {
        out.push_str("\"NaN\"");
    } else if x > 0.0 {
        out.push_str("\"Infinity\"");
    } else {
        out.push_str("\"-Infinity\"");
    }
}

impl JsonValue {
    /// Render with 2-space indentation and a trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out.push('\n');
        out
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        match self {
            JsonValue::Null => out.push_str("null"),
            JsonValue::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            JsonValue::Int(i) => out.push_str(&i.to_string()),
            JsonValue::Float(x) => float_into(out, *x),
            JsonValue::Str(s) => escape_into(out, s),
            JsonValue::Array(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                    item.render_into(out, indent + 1);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push(']');
            }
            JsonValue::Object(pairs) => {
                if pairs.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (k, v)) in pairs.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                    escape_into(out, k);
                    out.push_str(": ");
                    v.render_into(out, indent + 1);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push('}');
            }
        }
    }
}

/// CSV table with `{}`-formatted floats (shortest round-trip form).
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Two-column CSV of a radial field: node radius and field value, one row
/// per interior grid node.
pub fn field_csv(field: &RadialField, value_name: &str) -> String {
    let nodes = &field.grid().nodes;
    let values = field.values_vec();
    let rows: Vec<Vec<f64>> = nodes
        .iter()
        .zip(&values)
        .map(|(&r, &v)| vec![r, v])
        .collect();
    csv_table(&["r", value_name], &rows)
}

fn potential_json(spec: &PotentialSpec) -> JsonValue {
    match spec {
        PotentialSpec::Constant { m } => obj([
            ("kind", "constant".into()),
            ("m", (*m).into()),
            ("value", (m * m).into()),
        ]),
        PotentialSpec::Coercive { expr } => obj([
            ("kind", "coercive".into()),
            ("expr", expr.source().into()),
        ]),
    }
}

fn params_json(params: &ModelParams) -> JsonValue {
    obj([
        ("s", params.s.into()),
        ("alpha", params.alpha.into()),
        ("p", params.p.into()),
        ("omega", params.omega.into()),
        ("potential", potential_json(&params.potential)),
    ])
}

fn energy_json(e: &EnergyBreakdown) -> JsonValue {
    obj([
        ("quadratic", e.quadratic.into()),
        ("coupling", e.coupling.into()),
        ("nonlinear", e.nonlinear.into()),
        ("total", e.total.into()),
    ])
}

/// Report for the `admissible` subcommand.
pub fn admissible_report(params: &ModelParams, report: &AdmissibilityReport) -> JsonValue {
    obj([
        ("params", params_json(params)),
        ("omega_gap", report.omega_gap.into()),
        (
            "alpha0",
            report
                .alpha0
                .map(JsonValue::Float)
                .unwrap_or(JsonValue::Null),
        ),
        ("admissible", report.admissible.into()),
        (
            "violated_conditions",
            JsonValue::Array(
                report
                    .violated_conditions
                    .iter()
                    .map(|s| JsonValue::Str(s.clone()))
                    .collect(),
            ),
        ),
    ])
}

/// Report for the `solve` subcommand. Wall-clock timing is deliberately
/// excluded: the report must be byte-identical across runs.
pub fn solve_report(result: &SolveResult, radius: f64, n: usize) -> JsonValue {
    obj([
        ("params", params_json(&result.params)),
        (
            "grid",
            obj([("radius", radius.into()), ("n", n.into())]),
        ),
        ("converged", result.converged.into()),
        ("iterations", result.iterations.into()),
        ("grad_norm", result.grad_norm.into()),
        ("residual_u", result.residual_u.into()),
        ("residual_phi", result.residual_phi.into()),
        ("energy", energy_json(&result.energy)),
        ("u_origin", result.u.eval_origin().into()),
        ("phi_origin", result.phi.eval_origin().into()),
        (
            "path",
            obj([
                ("argmax", result.path.argmax.into()),
                ("energies", result.path.energies.clone().into()),
            ]),
        ),
    ])
}

/// Report for the `spectrum` subcommand.
pub fn spectrum_report(
    params: &ModelParams,
    result: &SpectrumResult,
    radius: f64,
    n: usize,
) -> JsonValue {
    obj([
        ("params", params_json(params)),
        (
            "grid",
            obj([("radius", radius.into()), ("n", n.into())]),
        ),
        ("k", result.lambdas.len().into()),
        ("lambdas", result.lambdas.clone().into()),
        ("gamma", result.gamma.into()),
        ("k0", result.k0.into()),
        ("c0", result.c0.into()),
    ])
}

/// Report for the `verify` subcommand.
pub fn verify_report(checks: &[CheckResult]) -> JsonValue {
    let failed: Vec<&CheckResult> = checks.iter().filter(|c| !c.passed).collect();
    obj([
        ("total", checks.len().into()),
        ("passed", (checks.len() - failed.len()).into()),
        ("failed", failed.len().into()),
        (
            "checks",
            JsonValue::Array(
                checks
                    .iter()
                    .map(|c| {
                        obj([
                            ("name", c.name.clone().into()),
                            ("passed", c.passed.into()),
                            ("value", c.value.into()),
                            ("bound", c.bound.into()),
                            ("detail", c.detail.clone().into()),
                        ])
                    })
                    .collect(),
            ),
        ),
    ])
}

/// Threshold table: α₀(s, Ω) over an s-grid for several gap values Ω.
/// Columns: `s, alpha0_gap<Ω1>, alpha0_gap<Ω2>, …`.
pub fn threshold_csv(s_points: &[f64], gaps: &[f64], table: &[Vec<f64>]) -> String {
    let labels: Vec<String> = gaps.iter().map(|g| format!("alpha0_gap{g}")).collect();
    let mut header = vec!["s"];
    header.extend(labels.iter().map(|s| s.as_str()));
    let rows: Vec<Vec<f64>> = s_points
        .iter()
        .zip(table)
        .map(|(&s, row)| {
            let mut r = vec![s];
            r.extend_from_slice(row);
            r
        })
        .collect();
    csv_table(&header, &rows)
}
