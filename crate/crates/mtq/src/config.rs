//! Flat `key=value` run configuration.
//!
//! Values come from an optional config file and are then overridden by
//! command-line flags. Every key is parsed and range-checked before any
//! subcommand runs, so a bad value never leaves partial output behind.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use mtq_core::decohere::{DEFAULT_DYN_TIMESCALE, ION_TAU, MICROTUBULE_TAU};
use mtq_core::engram::{DEFAULT_NUM_FLIES, DEFAULT_RECALL_THRESHOLD};
use mtq_core::lattice::{
    LatticeGeometry, MapRole, PartitionOptions, DEFAULT_MAX_DOMAIN_SIZE, DEFAULT_PROTOFILAMENTS,
    DEFAULT_SEAM_SHIFT,
};
use mtq_core::qstate::{TubulinParams, DEFAULT_TUNNELING, MAX_QUBITS};

use crate::error::{CliError, CliResult};

/// Every accepted key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("seed", "master seed for every random stream (u64)"),
    ("out", "report path; stdout when unset"),
    ("format", "json or csv"),
    ("pf", "protofilament count"),
    ("rows", "dimer rows per protofilament"),
    ("seam", "row shift across the seam"),
    ("diagonals", "enable diagonal contacts (true/false)"),
    ("map_role", "barrier or coupling"),
    ("max_domain_size", "qubits per coherent domain"),
    ("epsilon", "conformational bias in s^-1"),
    ("delta", "tunneling amplitude in s^-1"),
    ("coupling", "dipole coupling in s^-1; defaults to delta/10"),
    ("tau_bare", "bare decoherence time in seconds"),
    ("protection_factor", "multiplier on tau_bare"),
    ("dyn_timescale", "neural dynamical timescale in seconds"),
    ("mode", "decohere mode: scan or trajectory"),
    (
        "scan_taus",
        "comma-separated effective times added to the scan",
    ),
    ("trajectories", "trajectory count for decohere trajectory"),
    ("dt", "time step in seconds"),
    ("steps", "number of time steps"),
    ("state_file", "input state file"),
    (
        "preset",
        "named input state: psi, x, bell, zeta, pion, ghz, ground, uniform",
    ),
    (
        "qubits",
        "qubit count for the ground, uniform and ghz presets",
    ),
    ("apply", "gates applied in order, e.g. A@0,H@1,X@2"),
    (
        "measure",
        "qubits measured in order: comma list, all, or none",
    ),
    ("state_out", "path for the final state file"),
    (
        "split",
        "left-side qubits of one bipartition; all when unset",
    ),
    ("pattern_file", "MAP binding pattern file"),
    ("num_flies", "flies per conditioning cohort"),
    ("p_avoid_trained", "avoidance probability of trained flies"),
    ("runs", "conditioning runs"),
    ("trials", "demo-epr measurement trials"),
    ("neurons", "neurons in the recall network"),
    ("key", "key neuron id for recall"),
    ("shared", "neurons sharing the key engram"),
    ("density", "MAP binding density of random engrams"),
    ("threshold", "engram distance threshold for co-activation"),
    (
        "prepare",
        "recall domain preparation: ground or uniform (dense, 2^max_domain_size amplitudes)",
    ),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecohereMode {
    Scan,
    Trajectory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    /// The worked-example operator, given in the (|1>, |0>) ordering.
    A,
    H,
    X,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MeasureSpec {
    None,
    All,
    Qubits(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preparation {
    Ground,
    Uniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub geometry: LatticeGeometry,
    pub partition: PartitionOptions,
    pub tubulin: TubulinParams,
    pub tau_bare: f64,
    pub protection_factor: f64,
    pub dyn_timescale: f64,
    pub mode: DecohereMode,
    pub scan_taus: Vec<f64>,
    pub trajectories: usize,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub state_file: Option<PathBuf>,
    pub preset: Option<String>,
    pub qubits: usize,
    pub apply: Vec<(Gate, usize)>,
    pub measure: MeasureSpec,
    pub state_out: Option<PathBuf>,
    pub split: Option<Vec<usize>>,
    pub pattern_file: Option<PathBuf>,
    pub num_flies: usize,
    pub p_avoid_trained: f64,
    pub runs: usize,
    pub trials: usize,
    pub neurons: usize,
    pub key: u64,
    pub shared: usize,
    pub density: f64,
    pub threshold: f64,
    pub prepare: Preparation,
}

const MAX_SEAM: usize = 1 << 30;

pub const PRESETS: &[&str] = &[
    "psi", "x", "bell", "zeta", "pion", "ghz", "ground", "uniform",
];

/// Raw key/value pairs, kept sorted for reproducible diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    /// Parses a config file body. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut raw = RawConfig::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(line, "expected key=value"))?;
            let key = key.trim();
            if raw.values.contains_key(key) {
                return Err(CliError::config(key, "set twice in config file"));
            }
            raw.set(key, value.trim())?;
        }
        Ok(raw)
    }

    /// Sets a key, rejecting names outside [`KEYS`].
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(CliError::config(key, "unknown key"));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Parses a `key=value` flag argument and sets it.
    pub fn set_pair(&mut self, pair: &str) -> CliResult<()> {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::config(pair, "expected key=value"))?;
        self.set(key.trim(), value.trim())
    }

    /// Layers `other` on top of `self`.
    pub fn merge(&mut self, other: RawConfig) {
        self.values.extend(other.values);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| CliError::config(key, format!("cannot parse `{v}`")))
            })
            .transpose()
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    fn positive(&self, key: &str, default: f64) -> CliResult<f64> {
        let v = self.or(key, default)?;
        if !(v > 0.0) || !v.is_finite() {
            return Err(CliError::config(key, "must be positive and finite"));
        }
        Ok(v)
    }

    fn finite(&self, key: &str, default: f64) -> CliResult<f64> {
        let v = self.or(key, default)?;
        if !v.is_finite() {
            return Err(CliError::config(key, "must be finite"));
        }
        Ok(v)
    }

    fn unit_interval(&self, key: &str, default: f64) -> CliResult<f64> {
        let v = self.or(key, default)?;
        if !(0.0..=1.0).contains(&v) {
            return Err(CliError::config(key, "must lie in [0, 1]"));
        }
        Ok(v)
    }

    fn at_least(&self, key: &str, default: usize, min: usize) -> CliResult<usize> {
        let v = self.or(key, default)?;
        if v < min {
            return Err(CliError::config(key, format!("must be at least {min}")));
        }
        Ok(v)
    }

    fn path(&self, key: &str) -> CliResult<Option<PathBuf>> {
        match self.get(key) {
            Some("") => Err(CliError::config(key, "must not be empty")),
            other => Ok(other.map(PathBuf::from)),
        }
    }

    fn usize_list(&self, key: &str, value: &str) -> CliResult<Vec<usize>> {
        value
            .split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| CliError::config(key, format!("cannot parse `{t}`")))
            })
            .collect()
    }

    /// Parses and validates every key.
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let seed = self.or("seed", 0u64)?;
        let format = match self.get("format") {
            None => None,
            Some("json") => Some(Format::Json),
            Some("csv") => Some(Format::Csv),
            Some(v) => {
                return Err(CliError::config(
                    "format",
                    format!("`{v}` is not json or csv"),
                ))
            }
        };

        let pf = self.at_least("pf", DEFAULT_PROTOFILAMENTS, 3)?;
        let rows = self.at_least("rows", 10, 1)?;
        let seam = self.or("seam", DEFAULT_SEAM_SHIFT)?;
        if seam > MAX_SEAM {
            return Err(CliError::config(
                "seam",
                format!("must be at most {MAX_SEAM}"),
            ));
        }
        let diagonals = self.or("diagonals", false)?;
        let geometry = LatticeGeometry::with_params(pf, rows, seam)
            .map_err(|e| CliError::config("pf", e.to_string()))?
            .with_diagonals(diagonals);
        let map_role = match self.get("map_role") {
            None | Some("barrier") => MapRole::Barrier,
            Some("coupling") => MapRole::Coupling,
            Some(v) => {
                return Err(CliError::config(
                    "map_role",
                    format!("`{v}` is not barrier or coupling"),
                ))
            }
        };
        let max_domain_size = self.at_least("max_domain_size", DEFAULT_MAX_DOMAIN_SIZE, 1)?;
        if max_domain_size > MAX_QUBITS {
            return Err(CliError::config(
                "max_domain_size",
                format!("must be at most {MAX_QUBITS}"),
            ));
        }

        let delta = self.finite("delta", DEFAULT_TUNNELING)?;
        let tubulin = TubulinParams {
            bias: self.finite("epsilon", 0.0)?,
            tunneling: delta,
            coupling: self.finite("coupling", 0.1 * delta)?,
        };

        let tau_bare = self.positive("tau_bare", MICROTUBULE_TAU)?;
        let protection_factor: f64 = self.or("protection_factor", 1.0)?;
        if !(protection_factor >= 1.0) || !protection_factor.is_finite() {
            return Err(CliError::config(
                "protection_factor",
                "must be finite and at least 1",
            ));
        }
        let dyn_timescale = self.positive("dyn_timescale", DEFAULT_DYN_TIMESCALE)?;
        let mode = match self.get("mode") {
            None | Some("scan") => DecohereMode::Scan,
            Some("trajectory") => DecohereMode::Trajectory,
            Some(v) => {
                return Err(CliError::config(
                    "mode",
                    format!("`{v}` is not scan or trajectory"),
                ))
            }
        };
        let scan_taus = match self.get("scan_taus") {
            None => vec![ION_TAU, MICROTUBULE_TAU],
            Some(v) => v
                .split(',')
                .map(|t| match t.trim().parse::<f64>() {
                    Ok(x) if x > 0.0 => Ok(x),
                    _ => Err(CliError::config(
                        "scan_taus",
                        format!("`{t}` is not a positive time"),
                    )),
                })
                .collect::<CliResult<_>>()?,
        };
        let trajectories = self.at_least("trajectories", 1000, 1)?;
        let dt = match self.get("dt") {
            None => None,
            Some(_) => Some(self.positive("dt", 0.0)?),
        };
        let steps = self.parsed::<usize>("steps")?;

        let state_file = self.path("state_file")?;
        let preset = self.get("preset").map(str::to_string);
        if let Some(p) = &preset {
            if !PRESETS.contains(&p.as_str()) {
                return Err(CliError::config(
                    "preset",
                    format!("`{p}` is not one of {}", PRESETS.join(", ")),
                ));
            }
            if state_file.is_some() {
                return Err(CliError::config("preset", "conflicts with state_file"));
            }
        }
        let qubits = self.at_least("qubits", 2, 1)?;
        if qubits > MAX_QUBITS {
            return Err(CliError::config(
                "qubits",
                format!("must be at most {MAX_QUBITS}"),
            ));
        }
        let apply = match self.get("apply") {
            None | Some("") => Vec::new(),
            Some(v) => v
                .split(',')
                .map(|t| {
                    let bad = || CliError::config("apply", format!("`{t}` is not gate@qubit"));
                    let (g, q) = t.trim().split_once('@').ok_or_else(bad)?;
                    let gate = match g {
                        "A" => Gate::A,
                        "H" => Gate::H,
                        "X" => Gate::X,
                        _ => return Err(bad()),
                    };
                    Ok((gate, q.parse().map_err(|_| bad())?))
                })
                .collect::<CliResult<_>>()?,
        };
        let measure = match self.get("measure") {
            None | Some("none") | Some("") => MeasureSpec::None,
            Some("all") => MeasureSpec::All,
            Some(v) => MeasureSpec::Qubits(self.usize_list("measure", v)?),
        };
        let split = match self.get("split") {
            None | Some("all") => None,
            Some(v) => Some(self.usize_list("split", v)?),
        };

        let num_flies = self.at_least("num_flies", DEFAULT_NUM_FLIES, 1)?;
        let p_avoid_trained = self.unit_interval("p_avoid_trained", 0.9)?;
        let runs = self.at_least("runs", 100, 1)?;
        let trials = self.at_least("trials", 1000, 1)?;
        let neurons = self.at_least("neurons", 8, 1)?;
        let key = self.or("key", 0u64)?;
        if key >= neurons as u64 {
            return Err(CliError::config("key", "must name one of the neurons"));
        }
        let shared = self.or("shared", 3usize)?;
        if shared > neurons {
            return Err(CliError::config("shared", "exceeds neurons"));
        }
        let density = self.unit_interval("density", 0.3)?;
        let threshold = self.unit_interval("threshold", DEFAULT_RECALL_THRESHOLD)?;
        let prepare = match self.get("prepare") {
            None | Some("ground") => Preparation::Ground,
            Some("uniform") => Preparation::Uniform,
            Some(v) => {
                return Err(CliError::config(
                    "prepare",
                    format!("`{v}` is not ground or uniform"),
                ))
            }
        };

        Ok(RunConfig {
            seed,
            out: self.path("out")?,
            format,
            geometry,
            partition: PartitionOptions {
                max_domain_size,
                map_role,
            },
            tubulin,
            tau_bare,
            protection_factor,
            dyn_timescale,
            mode,
            scan_taus,
            trajectories,
            dt,
            steps,
            state_file,
            preset,
            qubits,
            apply,
            measure,
            state_out: self.path("state_out")?,
            split,
            pattern_file: self.path("pattern_file")?,
            num_flies,
            p_avoid_trained,
            runs,
            trials,
            neurons,
            key,
            shared,
            density,
            threshold,
            prepare,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(e: CliError) -> String {
        match e {
            CliError::Config { key, .. } => key,
            other => panic!("{other}"),
        }
    }

    #[test]
    fn defaults_resolve() {
        let c = RawConfig::default().resolve().unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.geometry.num_protofilaments(), 13);
        assert_eq!(c.tubulin.coupling, 0.1 * DEFAULT_TUNNELING);
        assert_eq!(c.partition.max_domain_size, 20);
        assert_eq!(c.num_flies, 55);
    }

    #[test]
    fn file_then_flags() {
        let mut raw = RawConfig::parse("# comment\nseed = 4\nrows=3\n\n").unwrap();
        let mut flags = RawConfig::default();
        flags.set_pair("seed=9").unwrap();
        raw.merge(flags);
        let c = raw.resolve().unwrap();
        assert_eq!((c.seed, c.geometry.num_rows()), (9, 3));
    }

    #[test]
    fn errors_name_the_key() {
        assert_eq!(key_of(RawConfig::parse("sed=1").unwrap_err()), "sed");
        assert_eq!(
            key_of(RawConfig::parse("seed=1\nseed=2").unwrap_err()),
            "seed"
        );
        assert_eq!(key_of(RawConfig::parse("rows").unwrap_err()), "rows");
        for (k, v) in [
            ("seed", "-1"),
            ("rows", "0"),
            ("pf", "2"),
            ("tau_bare", "0"),
            ("protection_factor", "0.5"),
            ("p_avoid_trained", "1.5"),
            ("max_domain_size", "27"),
            ("format", "xml"),
            ("apply", "Q@0"),
            ("preset", "cat"),
            ("scan_taus", "1e-3,-1"),
            ("dt", "nan"),
            ("key", "8"),
        ] {
            let raw = RawConfig::parse(&format!("{k}={v}")).unwrap();
            assert_eq!(key_of(raw.resolve().unwrap_err()), k, "{k}={v}");
        }
    }
}
