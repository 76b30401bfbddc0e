//! Line-based run configuration: `key = value`, `#` comments, repeated keys form lists.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use wavext_core::presets::{self, Preset, Profile};
use wavext_core::solver::{BoundaryMode, MethodVariant};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Experiment {
    ConvergeH,
    ConvergeTau,
    ConvergePq,
    Estimate,
    Solve,
    Energy,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::ConvergeH => "converge-h",
            Experiment::ConvergeTau => "converge-tau",
            Experiment::ConvergePq => "converge-pq",
            Experiment::Estimate => "estimate",
            Experiment::Solve => "solve",
            Experiment::Energy => "energy",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        [
            Experiment::ConvergeH,
            Experiment::ConvergeTau,
            Experiment::ConvergePq,
            Experiment::Estimate,
            Experiment::Solve,
            Experiment::Energy,
        ]
        .into_iter()
        .find(|e| e.name() == s)
        .ok_or_else(|| CliError::Config(format!("unknown experiment '{s}'")))
    }
}

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "preset",
    "psi",
    "p",
    "q",
    "mesh",
    "tau",
    "method",
    "bc_mode",
    "samples_per_slab",
    "final_time",
    "out",
    "check_tol",
];

/// Raw `key -> values` map in file order per key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, Vec<String>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(CliError::Config(format!(
                    "line {}: empty key or value",
                    lineno + 1
                )));
            }
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::Config(format!(
                    "line {}: unknown key '{key}'",
                    lineno + 1
                )));
            }
            entries
                .entry(key.to_string())
                .or_default()
                .push(value.to_string());
        }
        Ok(Self { entries })
    }

    pub fn values(&self, key: &str) -> &[String] {
        self.entries.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    fn single(&self, key: &str) -> Result<Option<&str>, CliError> {
        match self.values(key) {
            [] => Ok(None),
            [v] => Ok(Some(v.as_str())),
            _ => Err(CliError::Config(format!(
                "key '{key}' may appear only once"
            ))),
        }
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, CliError> {
        self.values(key)
            .iter()
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| CliError::Config(format!("cannot parse '{v}' for key '{key}'")))
            })
            .collect()
    }
}

/// Parses `cos4t` or `t^α`.
pub fn parse_profile(s: &str) -> Result<Profile, CliError> {
    if s == "cos4t" {
        return Ok(Profile::Cos4);
    }
    s.strip_prefix("t^")
        .and_then(|a| a.parse::<f64>().ok())
        .filter(|a| *a > 0.0)
        .map(Profile::Power)
        .ok_or_else(|| CliError::Config(format!("unknown profile '{s}' (use cos4t or t^<alpha>)")))
}

fn parse_method(s: &str) -> Result<MethodVariant, CliError> {
    match s {
        "gradient" => Ok(MethodVariant::GradientCoupling),
        "mass" => Ok(MethodVariant::MassCoupling),
        _ => Err(CliError::Config(format!(
            "unknown method '{s}' (use gradient or mass)"
        ))),
    }
}

fn parse_bc(s: &str) -> Result<BoundaryMode, CliError> {
    match s {
        "ptau" => Ok(BoundaryMode::PtauLifting),
        "lagrange" => Ok(BoundaryMode::NaiveLagrangeInTime),
        _ => Err(CliError::Config(format!(
            "unknown bc_mode '{s}' (use ptau or lagrange)"
        ))),
    }
}

/// Validated run matrix.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub preset_name: String,
    pub psi: Option<Profile>,
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    /// Cells per side of the structured grid.
    pub mesh: Vec<usize>,
    pub tau: Vec<f64>,
    pub methods: Vec<MethodVariant>,
    pub bc_modes: Vec<BoundaryMode>,
    pub samples_per_slab: usize,
    pub final_time: Option<f64>,
    pub out: Option<PathBuf>,
    /// Rate tolerance used by `--check`.
    pub check_tol: Option<f64>,
}

/// One `(method, bc_mode, p, q, mesh, τ)` combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub method: MethodVariant,
    pub bc_mode: BoundaryMode,
    pub p: usize,
    pub q: usize,
    pub mesh: usize,
    pub tau: f64,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path, experiment: Experiment) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, experiment)
    }

    pub fn parse(text: &str, experiment: Experiment) -> Result<Self, CliError> {
        let raw = RawConfig::parse(text)?;
        if let Some(e) = raw.single("experiment")? {
            let named: Experiment = e.parse()?;
            if named != experiment {
                return Err(CliError::Config(format!(
                    "config is for '{named}' but '{experiment}' was requested"
                )));
            }
        }
        let preset_name = raw
            .single("preset")?
            .ok_or_else(|| CliError::Config("missing key 'preset'".into()))?
            .to_string();
        let psi = raw.single("psi")?.map(parse_profile).transpose()?;
        let pq_defaults = experiment == Experiment::ConvergePq;
        let or_default = |v: Vec<usize>, d: &[usize]| {
            if v.is_empty() && pq_defaults {
                d.to_vec()
            } else {
                v
            }
        };
        let p = or_default(raw.list("p")?, &[1, 2, 3, 4, 5, 6]);
        let q = or_default(raw.list("q")?, &[1, 2, 3, 4, 5, 6]);
        let mesh = or_default(raw.list("mesh")?, &[8]);
        let mut tau: Vec<f64> = raw.list("tau")?;
        if tau.is_empty() && pq_defaults {
            tau.push(0.25);
        }
        let methods = raw
            .values("method")
            .iter()
            .map(|s| parse_method(s))
            .collect::<Result<Vec<_>, _>>()?;
        let bc_modes = raw
            .values("bc_mode")
            .iter()
            .map(|s| parse_bc(s))
            .collect::<Result<Vec<_>, _>>()?;
        let samples_per_slab = raw
            .single("samples_per_slab")?
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|_| CliError::Config(format!("bad samples_per_slab '{s}'")))
            })
            .transpose()?
            .unwrap_or(wavext_core::postprocess::DEFAULT_SAMPLES_PER_SLAB);
        let parse_f64 = |key: &str| -> Result<Option<f64>, CliError> {
            raw.single(key)?
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| CliError::Config(format!("bad {key} '{s}'")))
                })
                .transpose()
        };
        let cfg = Self {
            experiment,
            preset_name,
            psi,
            p,
            q,
            mesh,
            tau,
            methods: if methods.is_empty() {
                vec![MethodVariant::GradientCoupling]
            } else {
                methods
            },
            bc_modes: if bc_modes.is_empty() {
                vec![BoundaryMode::PtauLifting]
            } else {
                bc_modes
            },
            samples_per_slab,
            final_time: parse_f64("final_time")?,
            out: raw.single("out")?.map(PathBuf::from),
            check_tol: parse_f64("check_tol")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        for (key, empty) in [
            ("p", self.p.is_empty()),
            ("q", self.q.is_empty()),
            ("mesh", self.mesh.is_empty()),
            ("tau", self.tau.is_empty()),
        ] {
            if empty {
                return Err(CliError::Config(format!(
                    "key '{key}' needs at least one value"
                )));
            }
        }
        if self
            .p
            .iter()
            .any(|&p| p == 0 || p > wavext_core::fem::MAX_DEGREE)
        {
            return Err(CliError::Config(format!(
                "p must lie in 1..={}",
                wavext_core::fem::MAX_DEGREE
            )));
        }
        if self.q.contains(&0) {
            return Err(CliError::Config("q must be at least 1".into()));
        }
        if self.mesh.contains(&0) {
            return Err(CliError::Config("mesh resolution must be positive".into()));
        }
        if self.tau.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(CliError::Config("tau values must be positive".into()));
        }
        if self.samples_per_slab < 3 {
            return Err(CliError::Config(
                "samples_per_slab must be at least 3".into(),
            ));
        }
        if self.experiment == Experiment::ConvergePq && self.p.len() != self.q.len() {
            return Err(CliError::Config(
                "converge-pq pairs p and q entrywise; give equally many".into(),
            ));
        }
        if let Some(t) = self.final_time {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Config("final_time must be positive".into()));
            }
        }
        let preset = self.preset()?;
        let t_end = preset.final_time;
        for &tau in &self.tau {
            wavext_core::time::TimePartition::with_step(t_end, tau)
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// Resolves the preset (with `final_time` override applied).
    pub fn preset(&self) -> Result<Preset, CliError> {
        let mut preset = presets::by_name(&self.preset_name, self.psi)
            .ok_or_else(|| CliError::Config(format!("unknown preset '{}'", self.preset_name)))?;
        if let Some(t) = self.final_time {
            preset.final_time = t;
        }
        Ok(preset)
    }

    /// Run matrix in deterministic order: method, bc_mode, then `(p, q)`, mesh, τ.
    pub fn cells(&self) -> Vec<Cell> {
        let pq: Vec<(usize, usize)> = if self.experiment == Experiment::ConvergePq {
            self.p.iter().copied().zip(self.q.iter().copied()).collect()
        } else {
            self.p
                .iter()
                .flat_map(|&p| self.q.iter().map(move |&q| (p, q)))
                .collect()
        };
        let mut out = Vec::new();
        for &method in &self.methods {
            for &bc_mode in &self.bc_modes {
                for &(p, q) in &pq {
                    for &mesh in &self.mesh {
                        for &tau in &self.tau {
                            out.push(Cell {
                                method,
                                bc_mode,
                                p,
                                q,
                                mesh,
                                tau,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}
