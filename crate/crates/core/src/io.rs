//! Config files, signal CSVs and run artifacts.
//!
//! CSV files have a header row, time in the first column, `.` as decimal
//! separator and UTF-8 encoding. Floats are written in the shortest form
//! that parses back to the identical `f64`, so every file round-trips
//! bit-exactly.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{error_norms, BoundsReport, PeSweepResult};
use crate::error::{Error, Result};
use crate::filters::FilterParams;
use crate::identify::GainMatrix;
use crate::integrate::IntegratorConfig;
use crate::model::{theta_from_original, Adjacency, CouplingConfig, FhnParams, Theta};
use crate::simulate::{InputHold, ReplaySetup, RunRecord, SignalSet, SimulationSetup, THETA_DIM};

// ---------------------------------------------------------------------------
// Config

/// Default plot/record spacing in time units.
pub const DEFAULT_RECORD_EVERY: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    fhn: Option<FhnParams>,
    #[serde(default)]
    coupling: Option<RawCoupling>,
    #[serde(default)]
    filter: Option<RawFilter>,
    gain: RawGain,
    integrator: RawIntegrator,
    init: RawInit,
    #[serde(default)]
    data: Option<RawData>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoupling {
    #[serde(default)]
    topology: Option<String>,
    #[serde(default)]
    nodes: Option<usize>,
    #[serde(default)]
    edges: Option<Vec<[usize; 2]>>,
    sigma: f64,
    /// Rotational scheme angle; excludes explicit `b_*` values.
    #[serde(default)]
    phi: Option<f64>,
    #[serde(default)]
    b_uu: Option<f64>,
    #[serde(default)]
    b_uv: Option<f64>,
    #[serde(default)]
    b_vu: Option<f64>,
    #[serde(default)]
    b_vv: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilter {
    tau1: f64,
    tau2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGain {
    #[serde(default)]
    scalar: Option<f64>,
    #[serde(default)]
    diag: Option<Vec<f64>>,
    #[serde(default)]
    matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    dt: f64,
    t_end: f64,
    #[serde(default)]
    record_every: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInit {
    #[serde(default)]
    theta0: Option<Vec<f64>>,
    #[serde(default)]
    theta0_original: Option<RawOriginal>,
    #[serde(default)]
    y0: Option<Vec<f64>>,
    #[serde(default)]
    v0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOriginal {
    a: f64,
    b: f64,
    eps: f64,
    c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    signals: PathBuf,
    channels: usize,
    i_ext: f64,
    #[serde(default)]
    hold: InputHold,
}

/// Recorded potentials that replace the plant.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSource {
    /// Resolved against the config file's directory.
    pub signals: PathBuf,
    pub channels: usize,
    pub i_ext: f64,
    pub hold: InputHold,
}

/// A fully validated experiment. Exactly one of `fhn` (simulation mode,
/// with `coupling`, `y0`, `v0`) or `data` is present.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: Option<String>,
    pub fhn: Option<FhnParams>,
    pub coupling: Option<CouplingConfig>,
    pub filter: FilterParams,
    pub gain: GainMatrix,
    pub integrator: IntegratorConfig,
    pub theta0: Theta,
    pub y0: Vec<f64>,
    pub v0: Vec<f64>,
    pub data: Option<DataSource>,
    /// SHA-256 over a canonical serialization; insensitive to formatting,
    /// comments and key order.
    pub hash: String,
    raw: RawConfig,
    base_dir: PathBuf,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

fn as_validation(e: Error) -> Error {
    match e {
        Error::InvalidParams(m) => Error::Validation(m),
        other => other,
    }
}

/// Reads and validates a TOML experiment config.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    ExperimentConfig::from_toml_str(&text, path, &base)
}

impl ExperimentConfig {
    /// Parses config text; `origin` names the source in errors and relative
    /// signal paths resolve against `base_dir`.
    pub fn from_toml_str(text: &str, origin: &Path, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            msg: e.to_string().trim_end().to_string(),
        })?;
        Self::from_raw(raw, base_dir.to_path_buf())
    }

    fn from_raw(raw: RawConfig, base_dir: PathBuf) -> Result<Self> {
        let simulation = raw.fhn.is_some() || raw.init.y0.is_some() || raw.init.v0.is_some();
        match (simulation, raw.data.is_some()) {
            (true, true) => {
                return Err(invalid(
                    "exactly one of [fhn] + initial state or [data] may be given",
                ))
            }
            (false, false) => return Err(invalid("either [fhn] + initial state or [data] is required")),
            _ => {}
        }

        let fhn = match raw.fhn {
            Some(p) => {
                p.validate().map_err(as_validation)?;
                Some(p)
            }
            None => None,
        };
        let data = raw.data.as_ref().map(|d| DataSource {
            signals: if d.signals.is_absolute() {
                d.signals.clone()
            } else {
                base_dir.join(&d.signals)
            },
            channels: d.channels,
            i_ext: d.i_ext,
            hold: d.hold,
        });
        if let Some(d) = &data {
            if d.channels == 0 {
                return Err(invalid("data.channels >= 1"));
            }
            if !d.i_ext.is_finite() {
                return Err(invalid("data.i_ext must be finite"));
            }
        }

        let coupling = match (&raw.coupling, fhn.is_some()) {
            (Some(c), _) => Some(build_coupling(c)?),
            (None, true) => return Err(invalid("[coupling] is required in simulation mode")),
            (None, false) => None,
        };
        let n = match (&coupling, &data) {
            (_, Some(d)) => d.channels,
            (Some(c), None) => c.n(),
            (None, None) => unreachable!(),
        };
        if n == 0 {
            return Err(invalid("network needs at least one node"));
        }
        if let (Some(c), Some(d)) = (&coupling, &data) {
            if c.n() != d.channels {
                return Err(invalid(format!(
                    "coupling has {} nodes but data.channels = {}",
                    c.n(),
                    d.channels
                )));
            }
        }

        let filter = match raw.filter {
            Some(f) => FilterParams::new(f.tau1, f.tau2).map_err(as_validation)?,
            None => FilterParams::default(),
        };
        let gain = build_gain(&raw.gain)?;

        let ri = raw.integrator;
        let every = ri.record_every.unwrap_or(DEFAULT_RECORD_EVERY);
        if !(every > 0.0) || !every.is_finite() {
            return Err(invalid("record_every > 0"));
        }
        if !(ri.dt > 0.0) || !ri.dt.is_finite() {
            return Err(invalid("dt > 0"));
        }
        let stride = ((every / ri.dt).round() as usize).max(1);
        let integrator = IntegratorConfig::new(ri.dt, ri.t_end, stride)?;

        let i_ext = fhn.map(|p| p.i_ext).or(data.as_ref().map(|d| d.i_ext)).unwrap_or(0.0);
        let theta0 = match (&raw.init.theta0, &raw.init.theta0_original) {
            (Some(_), Some(_)) => return Err(invalid("give either init.theta0 or init.theta0_original, not both")),
            (None, None) => return Err(invalid("init.theta0 or init.theta0_original is required")),
            (Some(v), None) => {
                if v.len() != THETA_DIM {
                    return Err(invalid(format!("init.theta0 needs {THETA_DIM} entries, got {}", v.len())));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(invalid("init.theta0 must be finite"));
                }
                Theta::from_slice(v)?
            }
            (None, Some(o)) => {
                let p = FhnParams::new(o.a, o.b, o.eps, o.c, i_ext).map_err(as_validation)?;
                theta_from_original(&p, n)?
            }
        };

        let (y0, v0) = if fhn.is_some() {
            let y0 = raw.init.y0.clone().ok_or_else(|| invalid("init.y0 is required in simulation mode"))?;
            let v0 = raw.init.v0.clone().ok_or_else(|| invalid("init.v0 is required in simulation mode"))?;
            for (name, s) in [("init.y0", &y0), ("init.v0", &v0)] {
                if s.len() != n {
                    return Err(invalid(format!("{name} needs {n} entries, got {}", s.len())));
                }
                if s.iter().any(|x| !x.is_finite()) {
                    return Err(invalid(format!("{name} must be finite")));
                }
            }
            (y0, v0)
        } else {
            (Vec::new(), Vec::new())
        };

        let canonical = serde_json::to_vec(&raw).expect("config serializes");
        let hash = hex::encode(Sha256::digest(&canonical));

        Ok(ExperimentConfig {
            name: raw.name.clone(),
            fhn,
            coupling,
            filter,
            gain,
            integrator,
            theta0,
            y0,
            v0,
            data,
            hash,
            raw,
            base_dir,
        })
    }

    pub fn is_data_driven(&self) -> bool {
        self.data.is_some()
    }

    pub fn n(&self) -> usize {
        match (&self.data, &self.coupling) {
            (Some(d), _) => d.channels,
            (None, Some(c)) => c.n(),
            (None, None) => 0,
        }
    }

    pub fn i_ext(&self) -> f64 {
        self.fhn
            .map(|p| p.i_ext)
            .or(self.data.as_ref().map(|d| d.i_ext))
            .unwrap_or(0.0)
    }

    /// θ* of the simulated plant; `None` in data-driven mode.
    pub fn theta_true(&self) -> Option<Theta> {
        self.fhn.map(|p| theta_from_original(&p, self.n()).expect("validated at load"))
    }

    pub fn simulation_setup(&self) -> Result<SimulationSetup> {
        let (Some(theta_true), Some(coupling)) = (self.theta_true(), self.coupling.clone()) else {
            return Err(invalid("config is in data-driven mode; no plant to simulate"));
        };
        Ok(SimulationSetup {
            theta_true,
            coupling,
            i_ext: self.i_ext(),
            filter: self.filter,
            gain: self.gain.clone(),
            integrator: self.integrator,
            theta0: self.theta0,
            y0: self.y0.clone(),
            v0: self.v0.clone(),
        })
    }

    pub fn replay_setup(&self) -> ReplaySetup {
        ReplaySetup {
            i_ext: self.i_ext(),
            filter: self.filter,
            gain: self.gain.clone(),
            dt: self.integrator.dt,
            record_stride: self.integrator.record_stride,
            theta0: self.theta0,
            hold: self.data.as_ref().map(|d| d.hold).unwrap_or_default(),
        }
    }

    /// Re-validates with a different step and/or horizon. The record
    /// spacing in time units is preserved and the hash is recomputed.
    pub fn with_integration(&self, dt: Option<f64>, t_end: Option<f64>) -> Result<Self> {
        let mut raw = self.raw.clone();
        if let Some(dt) = dt {
            raw.integrator.dt = dt;
        }
        if let Some(t) = t_end {
            raw.integrator.t_end = t;
        }
        Self::from_raw(raw, self.base_dir.clone())
    }

    /// Re-validates with `Γ = g·I`.
    pub fn with_scalar_gain(&self, g: f64) -> Result<Self> {
        let mut raw = self.raw.clone();
        raw.gain = RawGain {
            scalar: Some(g),
            diag: None,
            matrix: None,
        };
        Self::from_raw(raw, self.base_dir.clone())
    }

    /// Switches to data-driven mode on the given signal file, keeping
    /// filter, gain, step and θ(0).
    pub fn with_signals(&self, signals: &Path, channels: usize) -> Result<Self> {
        let mut raw = self.raw.clone();
        let i_ext = self.i_ext();
        if raw.init.theta0_original.is_some() {
            raw.init.theta0 = Some(self.theta0.0.to_vec());
            raw.init.theta0_original = None;
        }
        raw.fhn = None;
        raw.init.y0 = None;
        raw.init.v0 = None;
        raw.data = Some(RawData {
            signals: signals.to_path_buf(),
            channels,
            i_ext,
            hold: InputHold::default(),
        });
        if raw.coupling.as_ref().is_some_and(|c| coupling_nodes(c).ok() != Some(channels)) {
            raw.coupling = None;
        }
        Self::from_raw(raw, PathBuf::new())
    }
}

fn coupling_nodes(c: &RawCoupling) -> Result<usize> {
    Ok(build_adjacency(c)?.n())
}

fn build_adjacency(c: &RawCoupling) -> Result<Adjacency> {
    match (&c.topology, &c.edges) {
        (Some(_), Some(_)) => Err(invalid("coupling: give either topology or edges, not both")),
        (None, None) => Err(invalid("coupling: topology or edges is required")),
        (None, Some(edges)) => {
            let n = c.nodes.ok_or_else(|| invalid("coupling.nodes is required with explicit edges"))?;
            let e: Vec<(usize, usize)> = edges.iter().map(|[i, j]| (*i, *j)).collect();
            Adjacency::from_edges(n, &e).map_err(as_validation)
        }
        (Some(name), None) => {
            if name == "reconstructed" {
                if c.nodes.is_some_and(|n| n != 5) {
                    return Err(invalid("the reconstructed topology has exactly 5 nodes"));
                }
                return Ok(Adjacency::reconstructed_five());
            }
            let n = c.nodes.ok_or_else(|| invalid(format!("coupling.nodes is required for topology '{name}'")))?;
            if n == 0 {
                return Err(invalid("coupling.nodes >= 1"));
            }
            match name.as_str() {
                "ring" => Ok(Adjacency::ring(n)),
                "path" => Ok(Adjacency::path(n)),
                "star" => Ok(Adjacency::star(n)),
                "complete" => Ok(Adjacency::complete(n)),
                other => Err(invalid(format!(
                    "unknown topology '{other}' (ring, path, star, complete, reconstructed)"
                ))),
            }
        }
    }
}

fn build_coupling(c: &RawCoupling) -> Result<CouplingConfig> {
    let adjacency = build_adjacency(c)?;
    let explicit = [c.b_uu, c.b_uv, c.b_vu, c.b_vv];
    let cfg = match c.phi {
        Some(phi) => {
            if explicit.iter().any(Option::is_some) {
                return Err(invalid("coupling: phi excludes explicit b_uu/b_uv/b_vu/b_vv"));
            }
            CouplingConfig::rotational(adjacency, c.sigma, phi)
        }
        None => CouplingConfig {
            adjacency,
            sigma: c.sigma,
            b_uu: c.b_uu.unwrap_or(0.0),
            b_uv: c.b_uv.unwrap_or(0.0),
            b_vu: c.b_vu.unwrap_or(0.0),
            b_vv: c.b_vv.unwrap_or(0.0),
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

fn build_gain(g: &RawGain) -> Result<GainMatrix> {
    let given = [g.scalar.is_some(), g.diag.is_some(), g.matrix.is_some()];
    if given.iter().filter(|x| **x).count() != 1 {
        return Err(invalid("gain: exactly one of scalar, diag, matrix"));
    }
    let gain = if let Some(s) = g.scalar {
        GainMatrix::scalar(THETA_DIM, s)
    } else if let Some(d) = &g.diag {
        if d.len() != THETA_DIM {
            return Err(invalid(format!("gain.diag needs {THETA_DIM} entries")));
        }
        GainMatrix::diagonal(d)
    } else {
        let rows = g.matrix.as_ref().expect("checked above");
        if rows.len() != THETA_DIM || rows.iter().any(|r| r.len() != THETA_DIM) {
            return Err(invalid(format!("gain.matrix must be {THETA_DIM}x{THETA_DIM}")));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        GainMatrix::new(nalgebra::DMatrix::from_row_slice(THETA_DIM, THETA_DIM, &flat))
    };
    gain.map_err(|e| match e {
        Error::NotPositiveDefinite { .. } | Error::NotSymmetric { .. } => invalid(format!("gain symmetric positive definite: {e}")),
        other => other,
    })
}

// ---------------------------------------------------------------------------
// CSV helpers

fn fmt(x: f64) -> String {
    // `Display` for f64 is the shortest string that round-trips exactly.
    format!("{x}")
}

struct CsvOut {
    path: PathBuf,
    w: csv::Writer<fs::File>,
}

impl CsvOut {
    fn create(path: PathBuf, header: &[String]) -> Result<Self> {
        let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut out = CsvOut {
            w: csv::Writer::from_writer(file),
            path,
        };
        out.row(header)?;
        Ok(out)
    }

    fn row<S: AsRef<[u8]>>(&mut self, fields: &[S]) -> Result<()> {
        self.w.write_record(fields).map_err(|e| csv_io(&self.path, e))
    }

    fn nums(&mut self, fields: &[f64]) -> Result<()> {
        let s: Vec<String> = fields.iter().map(|x| fmt(*x)).collect();
        self.row(&s)
    }

    fn finish(mut self) -> Result<()> {
        self.w.flush().map_err(|e| Error::io(&self.path, e))
    }
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e))
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

// ---------------------------------------------------------------------------
// Signals

/// Reads a signal CSV: header row, then `t, y_1, …, y_N` per row.
/// `expected_n` of `None` accepts any channel count.
pub fn load_signals(path: impl AsRef<Path>, expected_n: Option<usize>) -> Result<SignalSet> {
    let path = path.as_ref();
    let parse_err = |msg: String| Error::Parse {
        path: path.to_path_buf(),
        msg,
    };
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = rdr.headers().map_err(|e| parse_err(format!("header: {e}")))?.clone();
    if headers.len() < 2 {
        return Err(parse_err("need a time column and at least one channel".into()));
    }
    let found = headers.len() - 1;
    if let Some(n) = expected_n {
        if n != found {
            return Err(Error::ChannelCountMismatch { expected: n, found });
        }
    }

    let mut times = Vec::new();
    let mut channels: Vec<Vec<f64>> = vec![Vec::new(); found];
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| parse_err(format!("row {row}: {e}")))?;
        if rec.len() != headers.len() {
            return Err(Error::ChannelCountMismatch {
                expected: found,
                found: rec.len().saturating_sub(1),
            });
        }
        for (col, field) in rec.iter().enumerate() {
            let x: f64 = field
                .parse()
                .map_err(|_| parse_err(format!("row {row}, column {}: '{field}' is not a number", col + 1)))?;
            if !x.is_finite() {
                return Err(parse_err(format!("row {row}, column {}: non-finite sample '{field}'", col + 1)));
            }
            if col == 0 {
                times.push(x);
            } else {
                channels[col - 1].push(x);
            }
        }
    }

    let (t0, dt) = match times.len() {
        0 => (0.0, 1.0),
        1 => (times[0], 1.0),
        len => {
            let t0 = times[0];
            let nominal = (times[len - 1] - t0) / (len - 1) as f64;
            if !(nominal > 0.0) {
                return Err(Error::NonUniformSampling {
                    row: 2,
                    step: times[1] - t0,
                    nominal,
                });
            }
            for (i, &t) in times.iter().enumerate().skip(1) {
                let expected = t0 + i as f64 * nominal;
                let step = t - times[i - 1];
                if !(step > 0.0) || (t - expected).abs() > 1e-9 * t.abs().max(nominal) {
                    return Err(Error::NonUniformSampling {
                        row: i + 1,
                        step,
                        nominal,
                    });
                }
            }
            (t0, nominal)
        }
    };
    SignalSet::new(t0, dt, channels)
}

/// Writes `signals` in the format read by [`load_signals`].
pub fn write_signals(path: impl AsRef<Path>, signals: &SignalSet) -> Result<()> {
    let path = path.as_ref().to_path_buf();
    let mut names = vec!["t".to_string()];
    names.extend((1..=signals.n_channels()).map(|k| format!("y{k}")));
    let mut out = CsvOut::create(path, &names)?;
    let mut row = vec![0.0; signals.n_channels() + 1];
    for i in 0..signals.len() {
        row[0] = signals.t0 + i as f64 * signals.dt;
        for (k, ch) in signals.channels.iter().enumerate() {
            row[k + 1] = ch[i];
        }
        out.nums(&row)?;
    }
    out.finish()
}

// ---------------------------------------------------------------------------
// Run artifacts

pub const THETA_FILE: &str = "theta.csv";
pub const ERRORS_FILE: &str = "errors.csv";
pub const RESIDUAL_FILE: &str = "residual.csv";
pub const STATES_FILE: &str = "states.csv";
pub const PE_FILE: &str = "pe_sweep.csv";
pub const BOUNDS_FILE: &str = "bounds.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Optional extras stored alongside a run.
#[derive(Debug, Clone, Default)]
pub struct RunExtras<'a> {
    pub config_hash: Option<String>,
    pub pe: Option<&'a PeSweepResult>,
    pub bounds: Option<&'a BoundsReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub samples: usize,
    pub final_time: Option<f64>,
    pub final_theta: Option<[f64; THETA_DIM]>,
    /// `(a, b, c, ε)` recovered from the final θ.
    pub final_params: Option<[f64; 4]>,
    pub final_physical: Option<bool>,
    pub initial_theta_error: Option<f64>,
    pub final_theta_error: Option<f64>,
    pub initial_param_error: Option<f64>,
    pub final_param_error: Option<f64>,
    /// Initial over final `(a, b, c, ε)` error.
    pub reduction_factor: Option<f64>,
    pub diverged_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<String>,
    pub config_hash: Option<String>,
    pub summary: Summary,
}

/// Summary scalars of a run.
pub fn summarize(record: &RunRecord) -> Summary {
    let final_theta = record.final_theta();
    let recovered = final_theta.and_then(|t| crate::model::original_from_theta(&t, record.i_ext, record.n).ok());
    let norms = record
        .theta_true
        .and_then(|truth| error_norms(&record.theta, &truth, record.i_ext, record.n).ok());
    let first = norms.as_ref().and_then(|v| v.first().copied());
    let last = norms.as_ref().and_then(|v| v.last().copied());
    let initial_param_error = first.and_then(|e| e.original);
    let final_param_error = last.and_then(|e| e.original);
    let reduction_factor = match (initial_param_error, final_param_error) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    };
    Summary {
        samples: record.len(),
        final_time: record.times.last().copied(),
        final_theta: final_theta.map(|t| t.0),
        final_params: recovered.map(|r| r.params.abce()),
        final_physical: recovered.map(|r| r.physical),
        initial_theta_error: first.map(|e| e.theta),
        final_theta_error: last.map(|e| e.theta),
        initial_param_error,
        final_param_error,
        reduction_factor,
        diverged_at: record.diverged_at,
    }
}

/// [`write_run_with`] without extras.
pub fn write_run(record: &RunRecord, dir: impl AsRef<Path>) -> Result<Manifest> {
    write_run_with(record, dir, &RunExtras::default())
}

/// Writes the run's CSV files and `manifest.json` into `dir` (created if
/// missing). Output depends only on the inputs.
pub fn write_run_with(record: &RunRecord, dir: impl AsRef<Path>, extras: &RunExtras) -> Result<Manifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();

    let mut out = CsvOut::create(
        dir.join(THETA_FILE),
        &header(&["t", "theta1", "theta2", "theta3", "theta4", "theta5", "q"]),
    )?;
    for (i, th) in record.theta.iter().enumerate() {
        let mut row = vec![record.times[i]];
        row.extend_from_slice(&th.0);
        row.push(record.q.get(i).copied().unwrap_or(f64::NAN));
        out.nums(&row)?;
    }
    out.finish()?;
    files.push(THETA_FILE.to_string());

    let mut out = CsvOut::create(
        dir.join(ERRORS_FILE),
        &header(&["t", "theta_error", "param_error", "physical", "lyapunov"]),
    )?;
    if let Some(truth) = record.theta_true {
        let norms = error_norms(&record.theta, &truth, record.i_ext, record.n)?;
        for (i, e) in norms.iter().enumerate() {
            out.row(&[
                fmt(record.times[i]),
                fmt(e.theta),
                e.original.map(fmt).unwrap_or_default(),
                e.physical.to_string(),
                record.lyapunov.get(i).map(|v| fmt(*v)).unwrap_or_default(),
            ])?;
        }
    }
    out.finish()?;
    files.push(ERRORS_FILE.to_string());

    let mut out = CsvOut::create(
        dir.join(RESIDUAL_FILE),
        &header(&["t", "delta", "y_star", "z1", "z2", "z3", "z4"]),
    )?;
    for i in 0..record.residual.len() {
        let z = record.z[i];
        out.nums(&[record.times[i], record.residual[i], record.y_star[i], z[0], z[1], z[2], z[3]])?;
    }
    out.finish()?;
    files.push(RESIDUAL_FILE.to_string());

    if !record.y.is_empty() {
        let n = record.n;
        let mut names = vec!["t".to_string()];
        names.extend((1..=n).map(|k| format!("y{k}")));
        names.extend((1..=n).map(|k| format!("v{k}")));
        names.push("h".into());
        let mut out = CsvOut::create(dir.join(STATES_FILE), &names)?;
        for i in 0..record.y.len() {
            let mut row = vec![record.times[i]];
            row.extend_from_slice(&record.y[i]);
            row.extend_from_slice(&record.v[i]);
            row.push(record.h.get(i).copied().unwrap_or(f64::NAN));
            out.nums(&row)?;
        }
        out.finish()?;
        files.push(STATES_FILE.to_string());
    }

    if let Some(pe) = extras.pe {
        write_pe_sweep(dir.join(PE_FILE), pe)?;
        files.push(PE_FILE.to_string());
    }

    if let Some(b) = extras.bounds {
        write_bounds(dir.join(BOUNDS_FILE), b)?;
        files.push(BOUNDS_FILE.to_string());
    }

    let manifest = Manifest {
        files,
        config_hash: extras.config_hash.clone(),
        summary: summarize(record),
    };
    write_manifest(dir, &manifest)?;
    Ok(manifest)
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<()> {
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

pub fn read_manifest(dir: impl AsRef<Path>) -> Result<Manifest> {
    let path = dir.as_ref().join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path,
        msg: e.to_string(),
    })
}

/// `L, min_eig, max_eig, positive`.
pub fn write_pe_sweep(path: impl AsRef<Path>, pe: &PeSweepResult) -> Result<()> {
    let mut out = CsvOut::create(
        path.as_ref().to_path_buf(),
        &header(&["L", "min_eig", "max_eig", "positive"]),
    )?;
    for i in 0..pe.l_values.len() {
        out.row(&[
            fmt(pe.l_values[i]),
            fmt(pe.min_eigs[i]),
            fmt(pe.max_eigs[i]),
            pe.is_positive(i).to_string(),
        ])?;
    }
    out.finish()
}

pub fn write_bounds(path: impl AsRef<Path>, b: &BoundsReport) -> Result<()> {
    let mut out = CsvOut::create(path.as_ref().to_path_buf(), &header(&["r", "sigma_max", "sigma", "ok"]))?;
    out.row(&[fmt(b.r), fmt(b.sigma_max), fmt(b.sigma), b.ok.to_string()])?;
    out.finish()
}

/// Reads a theta trajectory written by [`write_run`].
pub fn load_theta_csv(path: impl AsRef<Path>) -> Result<(Vec<f64>, Vec<Theta>)> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let mut times = Vec::new();
    let mut thetas = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            msg: format!("row {}: {e}", i + 1),
        })?;
        let vals: std::result::Result<Vec<f64>, _> = rec.iter().take(1 + THETA_DIM).map(str::parse).collect();
        let vals = vals.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            msg: format!("row {}: {e}", i + 1),
        })?;
        if vals.len() != 1 + THETA_DIM {
            return Err(Error::DimensionMismatch {
                expected: 1 + THETA_DIM,
                got: vals.len(),
            });
        }
        times.push(vals[0]);
        thetas.push(Theta::from_slice(&vals[1..])?);
    }
    Ok((times, thetas))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIM: &str = r#"
[fhn]
a = -0.7
b = 0.8
eps = 0.08
c = 1.0
i_ext = 1.0

[coupling]
topology = "ring"
nodes = 3
sigma = 0.05
b_uu = 1.0

[gain]
scalar = 1.0

[integrator]
dt = 0.001
t_end = 1.0

[init]
theta0 = [1.0, -0.3, 0.0, 0.0, 0.1]
y0 = [0.1, 0.2, 0.3]
v0 = [0.0, 0.0, 0.0]
"#;

    fn parse(s: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::from_toml_str(s, Path::new("test.toml"), Path::new(""))
    }

    #[test]
    fn loads_simulation_config() {
        let cfg = parse(SIM).unwrap();
        assert_eq!(cfg.n(), 3);
        assert_eq!(cfg.integrator.record_stride, 100);
        assert!(!cfg.is_data_driven());
        assert_eq!(cfg.filter, FilterParams::default());
        assert_eq!(cfg.coupling.as_ref().unwrap().b_uu, 1.0);
    }

    #[test]
    fn negative_b_names_invariant() {
        let err = parse(&SIM.replace("b = 0.8", "b = -1.0")).unwrap_err();
        match err {
            Error::Validation(m) => assert_eq!(m, "b > 0"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn simulation_and_data_are_exclusive() {
        let both = format!("{SIM}\n[data]\nsignals = \"x.csv\"\nchannels = 3\ni_ext = 1.0\n");
        assert!(matches!(parse(&both), Err(Error::Validation(m)) if m.contains("exactly one")));
    }

    #[test]
    fn parse_error_mentions_location() {
        let err = parse(&SIM.replace("sigma = 0.05", "sigma = \"lots\"")).unwrap_err();
        match err {
            Error::Parse { msg, .. } => assert!(msg.contains("sigma") && msg.contains("line"), "{msg}"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn hash_ignores_formatting_and_key_order() {
        let a = parse(SIM).unwrap();
        let reordered = SIM.replace("a = -0.7\nb = 0.8", "b = 0.8\n# comment\na   =   -7e-1");
        let b = parse(&reordered).unwrap();
        assert_eq!(a.hash, b.hash);
        let c = parse(&SIM.replace("sigma = 0.05", "sigma = 0.06")).unwrap();
        assert_ne!(a.hash, c.hash);
    }

    #[test]
    fn rejects_indefinite_gain() {
        let cfg = SIM.replace("scalar = 1.0", "diag = [1.0, 1.0, -1.0, 1.0, 1.0]");
        assert!(matches!(parse(&cfg), Err(Error::Validation(_))));
    }

    #[test]
    fn theta0_from_original_parameters() {
        let cfg = SIM.replace(
            "theta0 = [1.0, -0.3, 0.0, 0.0, 0.1]",
            "theta0_original = { a = -0.7, b = 0.8, eps = 0.08, c = 1.0 }",
        );
        let cfg = parse(&cfg).unwrap();
        assert_eq!(cfg.theta0, cfg.theta_true().unwrap());
    }

    #[test]
    fn overrides_recompute_stride_and_hash() {
        let cfg = parse(SIM).unwrap();
        let fine = cfg.with_integration(Some(1e-4), None).unwrap();
        assert_eq!(fine.integrator.record_stride, 1000);
        assert_ne!(fine.hash, cfg.hash);
    }
}
