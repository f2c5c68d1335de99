//! Curve selection from `--curve name:key=value,...` or a CSV file with a JSON sidecar.

use crate::config::RunConfig;
use crate::error::{validation, CliError, CliResult};
use bikegeo::curves::{build_curve, curve_from_csv, embed, Curve, CurveMeta, CurveSpec};
use std::collections::BTreeMap;
use std::path::Path;

/// Names accepted by `--curve`.
pub const CURVE_NAMES: &[&str] = &["circle", "ellipse", "line", "helix", "gamma", "wegner-linear", "wegner-circular"];

/// Parsed `name:key=value,...` text.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveArg {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

impl CurveArg {
    pub fn parse(text: &str) -> CliResult<CurveArg> {
        let (name, rest) = match text.split_once(':') {
            Some((n, r)) => (n.trim(), r),
            None => (text.trim(), ""),
        };
        if !CURVE_NAMES.contains(&name) {
            return validation(format!("unknown curve '{name}'; expected one of {}", CURVE_NAMES.join(", ")));
        }
        let mut params = BTreeMap::new();
        for kv in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Validation(format!("expected key=value, got '{kv}'")))?;
            let x: f64 = v.trim().parse().map_err(|_| CliError::Validation(format!("'{v}' is not a number")))?;
            if !x.is_finite() {
                return validation(format!("curve parameter {k} must be finite"));
            }
            params.insert(k.trim().to_string(), x);
        }
        Ok(CurveArg { name: name.to_string(), params })
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    fn check_keys(&self, allowed: &[&str]) -> CliResult<()> {
        for k in self.params.keys() {
            if !allowed.contains(&k.as_str()) && k != "dim" {
                return validation(format!("curve '{}' has no parameter '{k}'", self.name));
            }
        }
        Ok(())
    }

    /// Builds the `CurveSpec`, taking folds, k and n from the run configuration.
    pub fn spec(&self, cfg: &RunConfig) -> CliResult<CurveSpec> {
        Ok(match self.name.as_str() {
            "circle" => {
                self.check_keys(&["radius"])?;
                CurveSpec::CircleMulti { folds: cfg.folds, radius: self.get("radius", 1.0) }
            }
            "ellipse" => {
                self.check_keys(&["a", "b"])?;
                CurveSpec::Ellipse { a: self.get("a", 1.5), b: self.get("b", 1.0) }
            }
            "line" => {
                self.check_keys(&["length"])?;
                CurveSpec::Line { length: self.get("length", 10.0) }
            }
            "helix" => {
                self.check_keys(&["radius", "pitch", "turns"])?;
                CurveSpec::Helix { radius: self.get("radius", 1.0), pitch: self.get("pitch", 0.5), turns: self.get("turns", 2.0) }
            }
            "gamma" => {
                self.check_keys(&[])?;
                let (k, n) = match (cfg.k, cfg.n) {
                    (Some(k), Some(n)) => (k, n),
                    _ => return validation("curve 'gamma' needs --k and --n"),
                };
                CurveSpec::GammaKn { k, n }
            }
            "wegner-linear" => {
                self.check_keys(&["a", "b", "length"])?;
                CurveSpec::WegnerLinear { a: self.get("a", 1.0), b: self.get("b", -0.5), length: self.get("length", 12.0) }
            }
            "wegner-circular" => {
                self.check_keys(&["a", "b", "c", "r0", "length"])?;
                CurveSpec::WegnerCircular {
                    a: self.get("a", 0.05),
                    b: self.get("b", 0.2),
                    c: self.get("c", 0.1),
                    r0: self.get("r0", 1.0),
                    length: self.get("length", 15.0),
                }
            }
            _ => unreachable!("names are checked at parse time"),
        })
    }

    /// Builds the curve with `samples` per period (per fold for multiple circles and Γ_{k,n}).
    pub fn build(&self, cfg: &RunConfig) -> CliResult<Curve> {
        let spec = self.spec(cfg)?;
        let samples = match &spec {
            CurveSpec::CircleMulti { folds, .. } => cfg.samples * *folds as usize,
            CurveSpec::GammaKn { n, .. } => cfg.samples * *n as usize,
            _ => cfg.samples,
        };
        let c = build_curve(&spec, samples)?;
        match self.params.get("dim") {
            Some(d) if *d >= 1.0 && d.fract() == 0.0 => Ok(embed(&c, *d as usize)?),
            Some(d) => validation(format!("dim must be a positive integer, got {d}")),
            None => Ok(c),
        }
    }
}

/// Reads a curve CSV; a sidecar `<file>.json` with [`CurveMeta`] decides closure.
pub fn read_curve_file(path: &Path) -> CliResult<Curve> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let mut side = path.as_os_str().to_owned();
    side.push(".json");
    let meta: Option<CurveMeta> = match std::fs::read_to_string(&side) {
        Ok(s) => Some(serde_json::from_str(&s).map_err(|e| CliError::Validation(format!("malformed sidecar: {e}")))?),
        Err(_) => None,
    };
    Ok(curve_from_csv(&text, meta.as_ref())?)
}

/// The curve selected by `--curve` or `--curve-file`, or the given default.
pub fn curve_from_config(cfg: &RunConfig, default: &str) -> CliResult<Curve> {
    if let Some(p) = &cfg.curve_file {
        return read_curve_file(p);
    }
    CurveArg::parse(cfg.curve.as_deref().unwrap_or(default))?.build(cfg)
}
