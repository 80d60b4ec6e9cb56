//! Batch commands behind the `anisolog` binary.
//!
//! Each command reads a JSON run configuration and returns a [`CommandOutput`]: an exit code
//! and a JSON report. Exit codes: 0 success, 1 quantitative failure, 2 configuration error,
//! 3 IO error, 4 input outside the convexity range.
//!
//! Kernels with `log_strength = L > 1` are handled through `W = L(-log|x| + κ/L)`: the
//! shape is solved for `κ/L` and dilated by `√L`, and Euler-Lagrange reports refer to the
//! normalised kernel `-log|x| + κ/L` and the undilated shape.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::anisotropy::{classify_psi, make_preset, series_from_samples, AnisotropySeries, KernelSpec, Preset};
use crate::ellipse::{solve_detailed, EllipseShape, MinimizerPrediction, SolveOptions};
use crate::error::Error;
use crate::particles::{
    minimize, second_moments, write_log_csv, write_positions_csv, Confinement, DescentOptions,
    ParticleConfig,
};
use crate::potential::{el_scan, ProbeCounts};
use crate::verify::{parseval_gap, GaussianBlobPair, QuadOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_OUT_OF_THEORY: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub solver: f64,
    pub el_scan: f64,
    pub parseval: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            solver: 1e-8,
            el_scan: 1e-6,
            parseval: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnisotropySource {
    Preset(Preset),
    Coefficients { cos: Vec<f64>, sin: Vec<f64> },
    Samples(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub anisotropy: AnisotropySource,
    pub confinement: Confinement,
    pub log_strength: f64,
    pub tolerances: Tolerances,
    pub quad_nodes: usize,
    pub n: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub blobs: GaussianBlobPair,
}

/// A configuration problem, reported with the dotted path of the offending key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub reason: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.reason)
    }
}

fn cfg_err(key: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.into(),
        reason: reason.into(),
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, ConfigError> {
    v.as_object()
        .ok_or_else(|| cfg_err(path, "expected a JSON object"))
}

fn check_keys(map: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<(), ConfigError> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(cfg_err(join(path, k), "unknown key")),
        None => Ok(()),
    }
}

fn number(map: &Map<String, Value>, key: &str, path: &str) -> Result<Option<f64>, ConfigError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .filter(|x| x.is_finite())
            .map(Some)
            .ok_or_else(|| cfg_err(join(path, key), "expected a finite number")),
    }
}

fn required(map: &Map<String, Value>, key: &str, path: &str) -> Result<f64, ConfigError> {
    number(map, key, path)?.ok_or_else(|| cfg_err(join(path, key), "missing required key"))
}

fn count(map: &Map<String, Value>, key: &str, path: &str) -> Result<Option<u64>, ConfigError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(Some)
            .ok_or_else(|| cfg_err(join(path, key), "expected a non-negative integer")),
    }
}

fn number_list(v: &Value, path: &str) -> Result<Vec<f64>, ConfigError> {
    let arr = v
        .as_array()
        .ok_or_else(|| cfg_err(path, "expected an array of numbers"))?;
    arr.iter()
        .map(|x| {
            x.as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| cfg_err(path, "expected an array of finite numbers"))
        })
        .collect()
}

fn point(map: &Map<String, Value>, key: &str, path: &str) -> Result<Option<[f64; 2]>, ConfigError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => {
            let p = number_list(v, &join(path, key))?;
            if p.len() != 2 {
                return Err(cfg_err(join(path, key), "expected two coordinates"));
            }
            Ok(Some([p[0], p[1]]))
        }
    }
}

fn parse_anisotropy(v: &Value) -> Result<AnisotropySource, ConfigError> {
    let path = "anisotropy";
    let map = as_object(v, path)?;
    if let Some(name) = map.get("preset") {
        let name = name
            .as_str()
            .ok_or_else(|| cfg_err("anisotropy.preset", "expected a string"))?;
        let preset = match name {
            "coulomb" => {
                check_keys(map, &["preset"], path)?;
                Preset::Coulomb
            }
            "dislocation" => {
                check_keys(map, &["preset", "alpha"], path)?;
                Preset::Dislocation {
                    alpha: required(map, "alpha", path)?,
                }
            }
            "elastic" => {
                check_keys(map, &["preset", "a", "b"], path)?;
                Preset::Elastic {
                    a: required(map, "a", path)?,
                    b: required(map, "b", path)?,
                }
            }
            other => {
                return Err(cfg_err(
                    "anisotropy.preset",
                    format!("unknown preset `{other}` (expected coulomb, dislocation or elastic)"),
                ))
            }
        };
        return Ok(AnisotropySource::Preset(preset));
    }
    if let Some(samples) = map.get("samples") {
        check_keys(map, &["samples"], path)?;
        return Ok(AnisotropySource::Samples(number_list(samples, "anisotropy.samples")?));
    }
    if map.contains_key("cos") || map.contains_key("sin") {
        check_keys(map, &["cos", "sin"], path)?;
        let list = |key: &str| match map.get(key) {
            Some(v) => number_list(v, &join(path, key)),
            None => Ok(Vec::new()),
        };
        return Ok(AnisotropySource::Coefficients {
            cos: list("cos")?,
            sin: list("sin")?,
        });
    }
    match map.keys().next() {
        Some(k) => Err(cfg_err(join(path, k), "unknown key")),
        None => Err(cfg_err(path, "expected one of `preset`, `cos`/`sin` or `samples`")),
    }
}

fn parse_confinement(v: &Value) -> Result<Confinement, ConfigError> {
    let path = "confinement";
    let map = as_object(v, path)?;
    let kind = map
        .get("kind")
        .ok_or_else(|| cfg_err("confinement.kind", "missing required key"))?
        .as_str()
        .ok_or_else(|| cfg_err("confinement.kind", "expected a string"))?;
    match kind {
        "quadratic" => {
            check_keys(map, &["kind"], path)?;
            Ok(Confinement::Quadratic)
        }
        "power" => {
            check_keys(map, &["kind", "p"], path)?;
            let p = required(map, "p", path)?;
            if p <= 0.0 {
                return Err(cfg_err("confinement.p", "must be positive"));
            }
            Ok(Confinement::Power { p })
        }
        "elliptical_well" => {
            check_keys(map, &["kind", "phi", "a1", "a2"], path)?;
            let phi = number(map, "phi", path)?.unwrap_or(0.0);
            let a1 = required(map, "a1", path)?;
            let a2 = required(map, "a2", path)?;
            if a1 <= 0.0 {
                return Err(cfg_err("confinement.a1", "must be positive"));
            }
            if a2 <= 0.0 {
                return Err(cfg_err("confinement.a2", "must be positive"));
            }
            Ok(Confinement::EllipticalWell(EllipseShape::new(phi, a1, a2)))
        }
        other => Err(cfg_err(
            "confinement.kind",
            format!("unknown kind `{other}` (expected quadratic, power or elliptical_well)"),
        )),
    }
}

fn parse_tolerances(v: &Value) -> Result<Tolerances, ConfigError> {
    let path = "tolerances";
    let map = as_object(v, path)?;
    check_keys(map, &["solver", "el_scan", "parseval"], path)?;
    let mut t = Tolerances::default();
    for (key, slot) in [
        ("solver", &mut t.solver),
        ("el_scan", &mut t.el_scan),
        ("parseval", &mut t.parseval),
    ] {
        if let Some(v) = number(map, key, path)? {
            if v <= 0.0 {
                return Err(cfg_err(join(path, key), "must be positive"));
            }
            *slot = v;
        }
    }
    Ok(t)
}

fn parse_blobs(v: &Value) -> Result<GaussianBlobPair, ConfigError> {
    let path = "blobs";
    let map = as_object(v, path)?;
    check_keys(map, &["p", "q", "sigma"], path)?;
    let mut b = GaussianBlobPair::default();
    if let Some(p) = point(map, "p", path)? {
        b.p = p;
    }
    if let Some(q) = point(map, "q", path)? {
        b.q = q;
    }
    if let Some(s) = number(map, "sigma", path)? {
        if s <= 0.0 {
            return Err(cfg_err("blobs.sigma", "must be positive"));
        }
        b.sigma = s;
    }
    Ok(b)
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let root: Value =
            serde_json::from_str(text).map_err(|e| cfg_err("<root>", format!("invalid JSON: {e}")))?;
        let map = as_object(&root, "<root>")?;
        check_keys(
            map,
            &[
                "anisotropy",
                "confinement",
                "log_strength",
                "tolerances",
                "quad_nodes",
                "n",
                "seed",
                "max_iters",
                "blobs",
            ],
            "",
        )?;
        let anisotropy = parse_anisotropy(
            map.get("anisotropy")
                .ok_or_else(|| cfg_err("anisotropy", "missing required key"))?,
        )?;
        let confinement = match map.get("confinement") {
            Some(v) => parse_confinement(v)?,
            None => Confinement::Quadratic,
        };
        let log_strength = number(map, "log_strength", "")?.unwrap_or(1.0);
        if log_strength < 1.0 {
            return Err(cfg_err("log_strength", "must be at least 1"));
        }
        let tolerances = match map.get("tolerances") {
            Some(v) => parse_tolerances(v)?,
            None => Tolerances::default(),
        };
        let quad_nodes = count(map, "quad_nodes", "")?.unwrap_or(512) as usize;
        if quad_nodes < 64 || !quad_nodes.is_multiple_of(2) {
            return Err(cfg_err("quad_nodes", "must be even and at least 64"));
        }
        let n = count(map, "n", "")?.unwrap_or(400) as usize;
        if n == 0 {
            return Err(cfg_err("n", "must be at least 1"));
        }
        let seed = count(map, "seed", "")?.unwrap_or(42);
        let max_iters = count(map, "max_iters", "")?.unwrap_or(20_000) as usize;
        if max_iters == 0 {
            return Err(cfg_err("max_iters", "must be positive"));
        }
        let blobs = match map.get("blobs") {
            Some(v) => parse_blobs(v)?,
            None => GaussianBlobPair::default(),
        };
        Ok(Self {
            anisotropy,
            confinement,
            log_strength,
            tolerances,
            quad_nodes,
            n,
            seed,
            max_iters,
            blobs,
        })
    }

    pub fn kernel(&self) -> Result<KernelSpec, ConfigError> {
        let series = match &self.anisotropy {
            AnisotropySource::Preset(p) => make_preset(*p)
                .map_err(|e| cfg_err("anisotropy", e.to_string()))?
                .series,
            AnisotropySource::Coefficients { cos, sin } => {
                AnisotropySeries::new(cos.clone(), sin.clone())
                    .map_err(|e| cfg_err("anisotropy", e.to_string()))?
            }
            AnisotropySource::Samples(v) => {
                series_from_samples(v).map_err(|e| cfg_err("anisotropy.samples", e.to_string()))?
            }
        };
        KernelSpec::new(self.log_strength, series).map_err(|e| cfg_err("log_strength", e.to_string()))
    }
}

/// Exit code, JSON report (if any) and a diagnostic message for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub code: i32,
    pub report: Option<Value>,
    pub message: Option<String>,
}

impl CommandOutput {
    fn ok(report: Value) -> Self {
        Self {
            code: EXIT_OK,
            report: Some(report),
            message: None,
        }
    }

    fn fail(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            report: None,
            message: Some(message.into()),
        }
    }
}

fn load(path: &Path) -> Result<(RunConfig, KernelSpec), CommandOutput> {
    let text = fs::read_to_string(path)
        .map_err(|e| CommandOutput::fail(EXIT_IO, format!("cannot read {}: {e}", path.display())))?;
    let cfg = RunConfig::from_json_str(&text).map_err(|e| CommandOutput::fail(EXIT_CONFIG, e.to_string()))?;
    let kernel = cfg
        .kernel()
        .map_err(|e| CommandOutput::fail(EXIT_CONFIG, e.to_string()))?;
    Ok((cfg, kernel))
}

fn error_output(err: Error) -> CommandOutput {
    let code = match err {
        Error::OutsideConvexity(_) => EXIT_OUT_OF_THEORY,
        Error::NonConvergence { .. } => EXIT_FAILURE,
        _ => EXIT_CONFIG,
    };
    CommandOutput::fail(code, err.to_string())
}

macro_rules! try_out {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(out) => return out,
        }
    };
}

/// Classifies the angular profile of the configured kernel.
pub fn cmd_analyze(config: &Path) -> CommandOutput {
    let (_, kernel) = try_out!(load(config));
    let c = classify_psi(&kernel.normalized_series(), 1024);
    CommandOutput::ok(json!({
        "psi_min": c.min_value * kernel.log_strength,
        "argmin": c.argmin_angle,
        "label": c.label.as_str(),
    }))
}

/// Predicts the minimiser and scans its Euler-Lagrange residuals.
pub fn cmd_solve(config: &Path) -> CommandOutput {
    let (cfg, kernel) = try_out!(load(config));
    if cfg.confinement != Confinement::Quadratic {
        return CommandOutput::fail(
            EXIT_OUT_OF_THEORY,
            "solve supports the quadratic confinement only",
        );
    }
    let series = kernel.normalized_series();
    let opts = SolveOptions {
        quad_nodes: cfg.quad_nodes,
        residual_tol: cfg.tolerances.solver,
        ..Default::default()
    };
    let report = match solve_detailed(&series, &opts) {
        Ok(r) => r,
        Err(e) => return error_output(e),
    };
    let el = match el_scan(&series, &report.prediction, &ProbeCounts::default()) {
        Ok(r) => r,
        Err(e) => return error_output(e),
    };
    let prediction = report.prediction.dilated(kernel.log_strength.sqrt());
    let out = json!({
        "prediction": prediction,
        "el_report": el,
        "label": report.classification.label.as_str(),
        "system_residual": report.residual,
    });
    let code = if el.passes(cfg.tolerances.el_scan) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    };
    CommandOutput {
        code,
        report: Some(out),
        message: (code != EXIT_OK).then(|| "Euler-Lagrange residuals exceed tolerance".into()),
    }
}

/// Command-line overrides for [`cmd_simulate`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimulateArgs {
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Minimises the discrete energy and writes `particles.csv`, `iterations.csv` and
/// `moments.json` into the output directory.
pub fn cmd_simulate(config: &Path, args: &SimulateArgs) -> CommandOutput {
    let (cfg, kernel) = try_out!(load(config));
    let n = args.n.unwrap_or(cfg.n);
    let seed = args.seed.unwrap_or(cfg.seed);
    if n == 0 {
        return CommandOutput::fail(EXIT_CONFIG, "config key `n`: must be at least 1");
    }
    let out_dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let start = match ParticleConfig::random(n, seed, &cfg.confinement) {
        Ok(s) => s,
        Err(e) => return error_output(e),
    };
    let opts = DescentOptions {
        max_iters: cfg.max_iters,
        seed,
        ..Default::default()
    };
    let outcome = match minimize(&start, &kernel, &cfg.confinement, &opts) {
        Ok(o) => o,
        Err(e) => return error_output(e),
    };
    let m = second_moments(&outcome.config);
    let summary = json!({
        "n": n,
        "seed": seed,
        "iterations": outcome.log.len() - 1,
        "final_energy": outcome.final_energy(),
        "converged": outcome.converged,
        "stalled": outcome.stalled,
        "second_moments": m,
    });
    let write = || -> std::io::Result<()> {
        fs::create_dir_all(&out_dir)?;
        write_positions_csv(
            &outcome.config,
            std::io::BufWriter::new(fs::File::create(out_dir.join("particles.csv"))?),
        )?;
        write_log_csv(
            &outcome.log,
            std::io::BufWriter::new(fs::File::create(out_dir.join("iterations.csv"))?),
        )?;
        let mut text = serde_json::to_string_pretty(&summary).map_err(std::io::Error::other)?;
        text.push('\n');
        fs::write(out_dir.join("moments.json"), text)
    };
    if let Err(e) = write() {
        return CommandOutput::fail(EXIT_IO, format!("cannot write to {}: {e}", out_dir.display()));
    }
    if outcome.stalled {
        return CommandOutput {
            code: EXIT_FAILURE,
            report: Some(summary),
            message: Some("descent stalled: no admissible step above 1e-14".into()),
        };
    }
    CommandOutput::ok(summary)
}

fn parse_prediction(text: &str) -> Result<MinimizerPrediction, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    let v = match v.get("prediction") {
        Some(inner) => inner.clone(),
        None => v,
    };
    let kind = v.get("kind").and_then(Value::as_str);
    let allowed: &[&str] = match kind {
        Some("ellipse") => &["kind", "phi", "a1", "a2"],
        Some("segment") => &["kind", "direction", "half_length"],
        _ => return Err("prediction `kind` must be \"ellipse\" or \"segment\"".into()),
    };
    if let Some(map) = v.as_object() {
        if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(format!("prediction key `{k}` does not belong to kind {}", kind.unwrap_or("")));
        }
    }
    let p: MinimizerPrediction =
        serde_json::from_value(v).map_err(|e| format!("malformed prediction: {e}"))?;
    match p {
        MinimizerPrediction::Ellipse(s) if s.is_degenerate() => {
            Err("ellipse semi-axes must be positive".into())
        }
        MinimizerPrediction::Segment { half_length, .. } if !(half_length > 0.0) => {
            Err("segment half_length must be positive".into())
        }
        _ => Ok(p),
    }
}

/// Euler-Lagrange scan of a stored prediction.
pub fn cmd_verify(config: &Path, prediction: &Path) -> CommandOutput {
    let (cfg, kernel) = try_out!(load(config));
    let text = match fs::read_to_string(prediction) {
        Ok(t) => t,
        Err(e) => {
            return CommandOutput::fail(EXIT_IO, format!("cannot read {}: {e}", prediction.display()))
        }
    };
    let p = match parse_prediction(&text) {
        Ok(p) => p,
        Err(msg) => return CommandOutput::fail(EXIT_CONFIG, msg),
    };
    let series = kernel.normalized_series();
    let p = p.dilated(1.0 / kernel.log_strength.sqrt());
    let el = match el_scan(&series, &p, &ProbeCounts::default()) {
        Ok(r) => r,
        Err(e) => return error_output(e),
    };
    let report = serde_json::to_value(el).expect("report serialises");
    if el.passes(cfg.tolerances.el_scan) {
        CommandOutput::ok(report)
    } else {
        CommandOutput {
            code: EXIT_FAILURE,
            report: Some(report),
            message: Some("Euler-Lagrange residuals exceed tolerance".into()),
        }
    }
}

/// Energy identity check on the configured Gaussian blob pair.
pub fn cmd_parseval(config: &Path) -> CommandOutput {
    let (cfg, kernel) = try_out!(load(config));
    let r = match parseval_gap(&kernel, &cfg.blobs, &QuadOptions::default()) {
        Ok(r) => r,
        Err(e) => return error_output(e),
    };
    let report = serde_json::to_value(r).expect("report serialises");
    if r.rel_gap <= cfg.tolerances.parseval {
        CommandOutput::ok(report)
    } else {
        CommandOutput {
            code: EXIT_FAILURE,
            report: Some(report),
            message: Some(format!("relative gap {:.3e} exceeds tolerance", r.rel_gap)),
        }
    }
}
