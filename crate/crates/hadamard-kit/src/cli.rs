//! Run-configuration parsing and the command implementations behind the
//! `hadamard` binary.
//!
//! Configurations are JSON documents holding named functions and sets plus
//! one section per command. Outputs are CSV value tables, JSON reports, and
//! cycle dumps, together with a JSON manifest recording every tolerance and
//! margin actually used, the cycle hash, and timings.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cycles::{
    certify, hadamard_winding_spec, pohlen_winding_spec, synthesize_cycle, CycleRecord,
    TableChoice,
};
use crate::error::{Error, Result};
use crate::functions::{series_hadamard, taylor_coeffs, FunctionDef};
use crate::hadamard::{
    hadamard_grid_with, hadamard_point, pohlen_at_with, GridResult, ProductOptions,
};
use crate::sets::{preset, star_eligible, strongly_convolvable, StarSet, StarSetRecord};
use crate::verify::run_suite;

/// Exit code for numeric failures (domain errors exit 2, usage errors 64).
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum SetSource {
    Named(String),
    Record(StarSetRecord),
}

#[derive(Debug, Deserialize)]
struct FunctionRecord {
    expr: String,
    singular: SetSource,
    #[serde(default)]
    vanishes_at_inf: bool,
}

#[derive(Debug, Deserialize)]
struct GridSpec {
    center: [f64; 2],
    radii: Vec<f64>,
    #[serde(default)]
    angles: Option<Vec<f64>>,
    #[serde(default)]
    count: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct EvalSection {
    pair: [String; 2],
    #[serde(default)]
    points: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    grid: Option<GridSpec>,
    /// "pointwise" (default), "shared" (one cycle over `k`), or "pohlen".
    #[serde(default)]
    mode: Option<String>,
    #[serde(default)]
    k: Option<String>,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    margin: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct StarSection {
    pair: [String; 2],
}

#[derive(Debug, Deserialize)]
struct CycleSection {
    s1: String,
    s2: String,
    z: [f64; 2],
    #[serde(default)]
    kind: Option<String>,
    #[serde(default)]
    eps: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct OracleSection {
    function: String,
    r: f64,
    n: usize,
    #[serde(default)]
    series_with: Option<String>,
}

#[derive(Debug, Deserialize)]
struct ConfigFile {
    #[serde(default)]
    functions: BTreeMap<String, FunctionRecord>,
    #[serde(default)]
    sets: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    eval: Option<EvalSection>,
    #[serde(default)]
    star: Option<StarSection>,
    #[serde(default)]
    cycle: Option<CycleSection>,
    #[serde(default)]
    oracle: Option<OracleSection>,
}

/// Resolved run configuration: named functions and sets plus the raw file.
pub struct RunConfig {
    functions: BTreeMap<String, FunctionDef>,
    sets: BTreeMap<String, StarSet>,
    file: ConfigFile,
    raw: String,
}

fn parse_set_value(v: &serde_json::Value) -> Result<StarSet> {
    match v {
        serde_json::Value::String(s) => {
            let spec = s.strip_prefix("preset:").unwrap_or(s);
            preset(spec)
        }
        other => {
            let rec: StarSetRecord = serde_json::from_value(other.clone())?;
            rec.into_set()
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let raw = std::fs::read_to_string(path)?;
        RunConfig::from_str(&raw)
    }

    pub fn from_str(raw: &str) -> Result<RunConfig> {
        let file: ConfigFile = serde_json::from_str(raw)?;
        let mut sets = BTreeMap::new();
        for (name, v) in &file.sets {
            sets.insert(name.clone(), parse_set_value(v)?);
        }
        let mut functions = BTreeMap::new();
        for (name, rec) in &file.functions {
            let singular = match &rec.singular {
                SetSource::Named(s) if s.starts_with("preset:") => {
                    preset(s.strip_prefix("preset:").unwrap())?
                }
                SetSource::Named(s) => sets
                    .get(s)
                    .cloned()
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown set `{s}`")))?,
                SetSource::Record(r) => {
                    let json = serde_json::to_value(StarSetRecordOwned(r)).unwrap();
                    parse_set_value(&json)?
                }
            };
            functions.insert(
                name.clone(),
                FunctionDef::from_text(&rec.expr, singular, rec.vanishes_at_inf)?,
            );
        }
        Ok(RunConfig {
            functions,
            sets,
            file,
            raw: raw.to_string(),
        })
    }

    fn function(&self, name: &str) -> Result<&FunctionDef> {
        self.functions
            .get(name)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown function `{name}`")))
    }

    fn set(&self, name: &str) -> Result<&StarSet> {
        self.sets
            .get(name)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown set `{name}`")))
    }
}

// serde helper: re-serialize a borrowed StarSetRecord
struct StarSetRecordOwned<'a>(&'a StarSetRecord);

impl Serialize for StarSetRecordOwned<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Common command-line knobs.
#[derive(Debug, Clone)]
pub struct CommonOpts {
    pub out: Option<PathBuf>,
    pub dump_cycle: Option<PathBuf>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub threads: usize,
}

impl Default for CommonOpts {
    fn default() -> Self {
        CommonOpts {
            out: None,
            dump_cycle: None,
            tol: None,
            seed: 0,
            threads: default_threads(),
        }
    }
}

/// Thread default: HADAMARD_KIT_THREADS, else 1.
pub fn default_threads() -> usize {
    std::env::var("HADAMARD_KIT_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

#[derive(Serialize)]
struct Manifest {
    command: String,
    seed: u64,
    threads: usize,
    tolerances: BTreeMap<String, f64>,
    cycle_sha256: Option<String>,
    timings_ms: BTreeMap<String, u128>,
    config_sha256: String,
    outputs: BTreeMap<String, String>,
}

fn sha_hex(data: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(data);
    h.finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn cycle_hash(c: &crate::cycles::Cycle) -> Result<String> {
    let json = serde_json::to_string(&CycleRecord::from_cycle(c))?;
    Ok(sha_hex(json.as_bytes()))
}

fn write_out(path: &Path, data: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(data.as_bytes())?;
    Ok(())
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn eval_points(section: &EvalSection) -> Result<Vec<Complex64>> {
    let mut pts = Vec::new();
    if let Some(list) = &section.points {
        pts.extend(list.iter().map(|[re, im]| Complex64::new(*re, *im)));
    }
    if let Some(grid) = &section.grid {
        let center = Complex64::new(grid.center[0], grid.center[1]);
        let angles: Vec<f64> = match (&grid.angles, grid.count) {
            (Some(a), _) => a.clone(),
            (None, Some(n)) if n > 0 => (0..n)
                .map(|k| std::f64::consts::TAU * k as f64 / n as f64)
                .collect(),
            _ => {
                return Err(Error::InvalidConfig(
                    "grid needs `angles` or a positive `count`".into(),
                ))
            }
        };
        for &r in &grid.radii {
            for &t in &angles {
                pts.push(center + Complex64::from_polar(r, t));
            }
        }
    }
    if pts.is_empty() {
        return Err(Error::InvalidConfig(
            "eval needs `points` and/or `grid`".into(),
        ));
    }
    for z in &pts {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidConfig(format!("non-finite point {z}")));
        }
    }
    Ok(pts)
}

fn product_options(section: &EvalSection, common: &CommonOpts) -> Result<ProductOptions> {
    let mut opts = ProductOptions::default();
    if let Some(t) = common.tol.or(section.tol) {
        if !(t > 0.0 && t <= 1e-2) {
            return Err(Error::InvalidConfig(format!(
                "tolerance {t} outside (0, 1e-2]"
            )));
        }
        opts.quad_tol = t;
    }
    if let Some(m) = section.margin {
        if !(m > 0.0) {
            return Err(Error::InvalidConfig("margin must be positive".into()));
        }
        opts.margin = Some(m);
    }
    opts.threads = common.threads;
    Ok(opts)
}

/// `eval`: pointwise, shared-cycle, or table-mode products over a point list.
pub fn cmd_eval(config: &RunConfig, common: &CommonOpts) -> Result<()> {
    let section = config
        .file
        .eval
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("config has no `eval` section".into()))?;
    let f1 = config.function(&section.pair[0])?;
    let f2 = config.function(&section.pair[1])?;
    let points = eval_points(section)?;
    let opts = product_options(section, common)?;
    let mode = section.mode.as_deref().unwrap_or("pointwise");

    let t0 = Instant::now();
    let (result, cycle_for_dump) = match mode {
        "shared" => {
            let k_name = section.k.as_ref().ok_or_else(|| {
                Error::InvalidConfig("shared mode needs `k`, the compact set name".into())
            })?;
            let k = config.set(k_name)?;
            let grid = hadamard_grid_with(f1, f2, k, &points, &opts)?;
            let c = grid.cycle_used.clone();
            (grid, Some(c))
        }
        "pointwise" => {
            let mut values = Vec::with_capacity(points.len());
            let mut tolerances = Vec::with_capacity(points.len());
            let mut first_cycle = None;
            for &z in &points {
                let r = hadamard_point(f1, f2, z, &opts)?;
                values.push(r.value);
                tolerances.push(r.error_estimate);
                if first_cycle.is_none() {
                    first_cycle = Some(r.cycle);
                }
            }
            (
                GridResult {
                    points: points.clone(),
                    values,
                    cycle_used: first_cycle.clone().unwrap_or_default(),
                    tolerances,
                },
                first_cycle,
            )
        }
        "pohlen" => {
            let mut values = Vec::with_capacity(points.len());
            for &z in &points {
                values.push(pohlen_at_with(f1, f2, z, TableChoice::Default, &opts)?);
            }
            (
                GridResult {
                    points: points.clone(),
                    tolerances: vec![opts.quad_tol; values.len()],
                    values,
                    cycle_used: Default::default(),
                },
                None,
            )
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown eval mode `{other}`"
            )))
        }
    };
    let elapsed = t0.elapsed().as_millis();

    let csv = result.to_csv();
    let out = common
        .out
        .clone()
        .ok_or_else(|| Error::InvalidConfig("eval needs --out".into()))?;
    write_out(&out, &csv)?;

    let mut outputs = BTreeMap::new();
    outputs.insert("csv".to_string(), out.display().to_string());
    if let (Some(dump), Some(cycle)) = (&common.dump_cycle, &cycle_for_dump) {
        let json = serde_json::to_string_pretty(&CycleRecord::from_cycle(cycle))?;
        write_out(dump, &json)?;
        outputs.insert("cycle".to_string(), dump.display().to_string());
    }

    let mut tolerances = BTreeMap::new();
    tolerances.insert("quad_tol".to_string(), opts.quad_tol);
    tolerances.insert("margin".to_string(), opts.margin.unwrap_or(1e-3));
    tolerances.insert("max_arc_step".to_string(), opts.synthesis.max_arc_step);
    // dilation defaults to this fraction of each prescription's margin
    tolerances.insert("eps_margin_fraction".to_string(), 0.8);
    tolerances.insert(
        "certify_ring_probes".to_string(),
        opts.synthesis.certify_ring as f64,
    );
    let mut timings = BTreeMap::new();
    timings.insert("eval".to_string(), elapsed);
    let manifest = Manifest {
        command: format!("eval:{mode}"),
        seed: common.seed,
        threads: common.threads,
        tolerances,
        cycle_sha256: cycle_for_dump.as_ref().map(cycle_hash).transpose()?,
        timings_ms: timings,
        config_sha256: sha_hex(config.raw.as_bytes()),
        outputs,
    };
    write_out(
        &manifest_path(&out),
        &serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}

#[derive(Serialize)]
struct StarReport {
    set_product: StarSetRecord,
    star_eligible: bool,
    convolvable: bool,
    strongly_convolvable: bool,
}

/// `star`: set products and the eligibility verdicts.
pub fn cmd_star(config: &RunConfig, common: &CommonOpts) -> Result<String> {
    let section = config
        .file
        .star
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("config has no `star` section".into()))?;
    let a = config.set(&section.pair[0])?;
    let b = config.set(&section.pair[1])?;
    let report = StarReport {
        set_product: StarSetRecord::from_set(&a.product(b)?),
        star_eligible: star_eligible(a, b),
        convolvable: crate::sets::convolvable(a, b),
        strongly_convolvable: strongly_convolvable(a, b),
    };
    let json = serde_json::to_string_pretty(&report)?;
    if let Some(out) = &common.out {
        write_out(out, &json)?;
    }
    Ok(json)
}

#[derive(Serialize)]
struct CycleReport {
    certified: bool,
    probes_checked: usize,
    violations: usize,
    margin: f64,
    eps: f64,
}

/// `cycle`: synthesize, certify, and dump a cycle for external plotting.
pub fn cmd_cycle(config: &RunConfig, common: &CommonOpts) -> Result<String> {
    let section = config
        .file
        .cycle
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("config has no `cycle` section".into()))?;
    let s1 = config.set(&section.s1)?;
    let s2 = config.set(&section.s2)?;
    let z = Complex64::new(section.z[0], section.z[1]);
    let kind = section.kind.as_deref().unwrap_or("hadamard");
    let spec = match kind {
        "hadamard" => hadamard_winding_spec(s1, s2, z)?,
        "pohlen" => pohlen_winding_spec(s1, s2, z, TableChoice::Default)?,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown cycle kind `{other}`"
            )))
        }
    };
    let mut around = s1.clone();
    around
        .boxes
        .extend(s2.inverse().scale(z).boxes.iter().copied());
    let eps = section.eps.unwrap_or(spec.margin * 0.8);
    let cycle = synthesize_cycle(&spec, &around, eps)?;
    let cert = certify(&cycle, &spec);
    if let Some(out) = &common.out {
        write_out(
            out,
            &serde_json::to_string_pretty(&CycleRecord::from_cycle(&cycle))?,
        )?;
    }
    if let Some(dump) = &common.dump_cycle {
        write_out(
            dump,
            &serde_json::to_string_pretty(&CycleRecord::from_cycle(&cycle))?,
        )?;
    }
    let report = CycleReport {
        certified: cert.ok,
        probes_checked: cert.probes_checked,
        violations: cert.violations.len(),
        margin: spec.margin,
        eps,
    };
    Ok(serde_json::to_string_pretty(&report)?)
}

/// `verify`: run a named suite; numeric failures exit 3.
pub fn cmd_verify(suite: &str, common: &CommonOpts) -> Result<(String, bool)> {
    let report = run_suite(suite, common.seed)?;
    let json = serde_json::to_string_pretty(&report)?;
    if let Some(out) = &common.out {
        write_out(out, &json)?;
    }
    Ok((json, report.pass))
}

/// `oracle`: Cauchy coefficients and optional termwise products.
pub fn cmd_oracle(config: &RunConfig, common: &CommonOpts) -> Result<String> {
    let section = config
        .file
        .oracle
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("config has no `oracle` section".into()))?;
    let f = config.function(&section.function)?;
    let coeffs = taylor_coeffs(f, section.r, section.n)?;
    let mut csv = String::from("n,re,im\n");
    let final_coeffs = if let Some(other) = &section.series_with {
        let g = config.function(other)?;
        let gc = taylor_coeffs(g, section.r, section.n)?;
        series_hadamard(&coeffs, &gc)
    } else {
        coeffs
    };
    for (n, c) in final_coeffs.iter().enumerate() {
        csv.push_str(&format!("{n},{},{}\n", c.re, c.im));
    }
    if let Some(out) = &common.out {
        write_out(out, &csv)?;
    }
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DILOG_CONFIG: &str = r#"{
        "functions": {
            "f": { "expr": "log1p(z)", "singular": "preset:ray(3.141592653589793, 1.0)" }
        },
        "eval": {
            "pair": ["f", "f"],
            "points": [[0.5, 0.0]],
            "tol": 1e-10
        }
    }"#;

    #[test]
    fn config_parses_and_resolves() {
        let cfg = RunConfig::from_str(DILOG_CONFIG).unwrap();
        assert!(cfg.function("f").is_ok());
        assert!(cfg.function("g").is_err());
    }

    #[test]
    fn eval_writes_csv_and_manifest() {
        let dir = std::env::temp_dir().join("hadamard-kit-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let out = dir.join("vals.csv");
        let cfg = RunConfig::from_str(DILOG_CONFIG).unwrap();
        let common = CommonOpts {
            out: Some(out.clone()),
            ..CommonOpts::default()
        };
        cmd_eval(&cfg, &common).unwrap();
        let csv = std::fs::read_to_string(&out).unwrap();
        assert!(csv.starts_with("re_z,im_z,re_val,im_val,err_est\n"));
        assert!(csv.contains("0.58224052646"));
        let manifest = std::fs::read_to_string(manifest_path(&out)).unwrap();
        assert!(manifest.contains("quad_tol"));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn star_reports_verdicts() {
        let cfg = RunConfig::from_str(
            r#"{
            "sets": {
                "a": "preset:ray(3.141592653589793, 1.0)",
                "b": "preset:ray(3.141592653589793, 1.0)"
            },
            "star": { "pair": ["a", "b"] }
        }"#,
        )
        .unwrap();
        let json = cmd_star(&cfg, &CommonOpts::default()).unwrap();
        assert!(json.contains("\"strongly_convolvable\": true"));
    }

    #[test]
    fn factorial_requests_are_guided() {
        let r = RunConfig::from_str(
            r#"{ "sets": { "s": "preset:factorial(2)" } }"#,
        );
        assert!(matches!(r, Err(Error::UnrepresentableSet(_))));
    }

    #[test]
    fn eval_mode_validation() {
        let cfg = RunConfig::from_str(
            r#"{
            "functions": {
                "f": { "expr": "1/(1-z/2)", "singular": "preset:point(2.0, 0.0)", "vanishes_at_inf": true }
            },
            "eval": { "pair": ["f", "f"], "points": [[0.5, 0.0]], "mode": "nonsense" }
        }"#,
        )
        .unwrap();
        let common = CommonOpts {
            out: Some(std::env::temp_dir().join("never-written.csv")),
            ..CommonOpts::default()
        };
        assert!(matches!(
            cmd_eval(&cfg, &common),
            Err(Error::InvalidConfig(_))
        ));
    }
}
