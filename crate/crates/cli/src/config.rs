//! Flat `key = value` configuration files with dotted section prefixes.
//!
//! ```text
//! # model parameters
//! s = 0.5
//! alpha = -0.3
//! p = 4.0
//! omega = 0.3
//! potential.kind = constant   # or: coercive
//! potential.m = 1.0           # with constant: V = m^2
//! #potential.expr = r^2       # with coercive: radial expression V(r)
//!
//! grid.radius = 20.0
//! grid.n = 511
//!
//! solver.tol = 1e-6
//! solver.max_iters = 2000
//! solver.path_points = 40
//! solver.path_iters = 60
//! solver.seed_amplitude = 1.0
//! solver.seed_width = 1.0
//! solver.phi_tol = 1e-12
//!
//! spectrum.k = 8
//!
//! threshold.points = 10000
//! threshold.gaps = 0.1, 1, 10
//! ```
//!
//! Unknown keys, duplicate keys, and malformed values are hard errors: a
//! config that cannot be fully understood must not be half-applied.

use std::fmt;
use std::path::Path;

/// Which potential family the config selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Constant,
    Coercive,
}

/// Parsed configuration; every field optional, defaults applied downstream.
#[derive(Debug, Clone, Default)]
pub struct Config {
    pub s: Option<f64>,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub omega: Option<f64>,
    pub potential_kind: Option<PotentialKind>,
    pub potential_m: Option<f64>,
    pub potential_expr: Option<String>,
    pub radius: Option<f64>,
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub path_points: Option<usize>,
    pub path_iters: Option<usize>,
    pub seed_amplitude: Option<f64>,
    pub seed_width: Option<f64>,
    pub phi_tol: Option<f64>,
    pub spectrum_k: Option<usize>,
    pub threshold_points: Option<usize>,
    pub threshold_gaps: Option<Vec<f64>>,
}

/// Config-file rejection with line information.
#[derive(Debug)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn fail(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, key: &str, raw: &str) -> Result<f64, ConfigError> {
    raw.parse::<f64>()
        .map_err(|_| fail(line, format!("{key}: expected a number, got '{raw}'")))
        .and_then(|x| {
            if x.is_finite() {
                Ok(x)
            } else {
                Err(fail(line, format!("{key}: value must be finite")))
            }
        })
}

fn parse_usize(line: usize, key: &str, raw: &str) -> Result<usize, ConfigError> {
    raw.parse::<usize>()
        .map_err(|_| fail(line, format!("{key}: expected a non-negative integer, got '{raw}'")))
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| fail(0, format!("cannot read {}: {e}", path.display())))?;
        Config::from_str_checked(&text)
    }

    pub fn from_str_checked(text: &str) -> Result<Config, ConfigError> {
        let mut cfg = Config::default();
        let mut seen: Vec<String> = Vec::new();
        for (i, raw_line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| fail(lineno, format!("expected 'key = value', got '{line}'")))?;
            let key = key.trim();
            let value = value.trim();
            if value.is_empty() {
                return Err(fail(lineno, format!("{key}: empty value")));
            }
            if seen.iter().any(|k| k == key) {
                return Err(fail(lineno, format!("duplicate key '{key}'")));
            }
            seen.push(key.to_owned());
            match key {
                "s" => cfg.s = Some(parse_f64(lineno, key, value)?),
                "alpha" => cfg.alpha = Some(parse_f64(lineno, key, value)?),
                "p" => cfg.p = Some(parse_f64(lineno, key, value)?),
                "omega" => cfg.omega = Some(parse_f64(lineno, key, value)?),
                "potential.kind" => {
                    cfg.potential_kind = Some(match value {
                        "constant" => PotentialKind::Constant,
                        "coercive" => PotentialKind::Coercive,
                        other => {
                            return Err(fail(
                                lineno,
                                format!(
                                    "potential.kind: expected 'constant' or 'coercive', got '{other}'"
                                ),
                            ))
                        }
                    })
                }
                "potential.m" => cfg.potential_m = Some(parse_f64(lineno, key, value)?),
                "potential.expr" => cfg.potential_expr = Some(value.to_owned()),
                "grid.radius" => cfg.radius = Some(parse_f64(lineno, key, value)?),
                "grid.n" => cfg.n = Some(parse_usize(lineno, key, value)?),
                "solver.tol" => cfg.tol = Some(parse_f64(lineno, key, value)?),
                "solver.max_iters" => cfg.max_iters = Some(parse_usize(lineno, key, value)?),
                "solver.path_points" => cfg.path_points = Some(parse_usize(lineno, key, value)?),
                "solver.path_iters" => cfg.path_iters = Some(parse_usize(lineno, key, value)?),
                "solver.seed_amplitude" => {
                    cfg.seed_amplitude = Some(parse_f64(lineno, key, value)?)
                }
                "solver.seed_width" => cfg.seed_width = Some(parse_f64(lineno, key, value)?),
                "solver.phi_tol" => cfg.phi_tol = Some(parse_f64(lineno, key, value)?),
                "spectrum.k" => cfg.spectrum_k = Some(parse_usize(lineno, key, value)?),
                "threshold.points" => {
                    cfg.threshold_points = Some(parse_usize(lineno, key, value)?)
                }
                "threshold.gaps" => {
                    let gaps: Result<Vec<f64>, ConfigError> = value
                        .split(',')
                        .map(|g| parse_f64(lineno, key, g.trim()))
                        .collect();
                    let gaps = gaps?;
                    if gaps.is_empty() {
                        return Err(fail(lineno, "threshold.gaps: empty list"));
                    }
                    cfg.threshold_gaps = Some(gaps);
                }
                _ => return Err(fail(lineno, format!("unknown key '{key}'"))),
            }
        }
        match (
            cfg.potential_kind,
            cfg.potential_m.is_some(),
            cfg.potential_expr.is_some(),
        ) {
            (None, false, false) => {}
            (None, _, _) => {
                return Err(fail(
                    0,
                    "potential.m / potential.expr require potential.kind to be set",
                ))
            }
            (Some(PotentialKind::Constant), true, false) => {}
            (Some(PotentialKind::Constant), _, _) => {
                return Err(fail(
                    0,
                    "potential.kind = constant requires potential.m and forbids potential.expr",
                ))
            }
            (Some(PotentialKind::Coercive), false, true) => {}
            (Some(PotentialKind::Coercive), _, _) => {
                return Err(fail(
                    0,
                    "potential.kind = coercive requires potential.expr and forbids potential.m",
                ))
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_example() {
        let cfg = Config::from_str_checked(
            "# comment\n\
             s = 0.5\n\
             alpha = -0.3   # inline comment\n\
             p = 4.0\n\
             omega = 0.3\n\
             potential.kind = constant\n\
             potential.m = 1.0\n\
             grid.radius = 20\n\
             grid.n = 511\n\
             solver.tol = 1e-6\n\
             threshold.gaps = 0.1, 1, 10\n",
        )
        .unwrap();
        assert_eq!(cfg.s, Some(0.5));
        assert_eq!(cfg.alpha, Some(-0.3));
        assert_eq!(cfg.n, Some(511));
        assert_eq!(cfg.potential_kind, Some(PotentialKind::Constant));
        assert_eq!(cfg.potential_m, Some(1.0));
        assert_eq!(cfg.threshold_gaps, Some(vec![0.1, 1.0, 10.0]));
        assert!(cfg.potential_expr.is_none());
    }

    #[test]
    fn rejects_unknown_key() {
        let err = Config::from_str_checked("sigma = 3\n").unwrap_err();
        assert!(err.message.contains("unknown key"), "{err}");
        assert_eq!(err.line, 1);
    }

    #[test]
    fn rejects_duplicate_key() {
        let err = Config::from_str_checked("s = 0.5\ns = 0.6\n").unwrap_err();
        assert!(err.message.contains("duplicate"), "{err}");
        assert_eq!(err.line, 2);
    }

    #[test]
    fn rejects_malformed_number() {
        let err = Config::from_str_checked("s = half\n").unwrap_err();
        assert!(err.message.contains("expected a number"), "{err}");
    }

    #[test]
    fn rejects_missing_equals_and_empty_value() {
        assert!(Config::from_str_checked("s 0.5\n").is_err());
        assert!(Config::from_str_checked("s =\n").is_err());
    }

    #[test]
    fn rejects_inconsistent_potential_sections() {
        // m and expr together, regardless of kind
        assert!(Config::from_str_checked(
            "potential.kind = constant\npotential.m = 1.0\npotential.expr = r^2\n"
        )
        .is_err());
        // kind without its required companion
        assert!(Config::from_str_checked("potential.kind = constant\n").is_err());
        assert!(Config::from_str_checked(
            "potential.kind = coercive\npotential.m = 1.0\n"
        )
        .is_err());
        // companion without kind
        assert!(Config::from_str_checked("potential.m = 1.0\n").is_err());
        // unknown kind value
        let err = Config::from_str_checked("potential.kind = quadratic\n").unwrap_err();
        assert!(err.message.contains("constant"), "{err}");
    }

    #[test]
    fn potential_expression_is_kept_verbatim() {
        let cfg = Config::from_str_checked(
            "potential.kind = coercive\npotential.expr = r^2/1600 + 0.5\n",
        )
        .unwrap();
        assert_eq!(cfg.potential_expr.as_deref(), Some("r^2/1600 + 0.5"));
    }
}
