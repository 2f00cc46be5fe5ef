//! Run configuration: JSON schema, defaults, and builders.
//!
//! A run config names a thermodynamic model, a process, the four family
//! constants and a density window. Every consumer works from the *resolved*
//! config, in which all defaults have been made explicit; its hash is
//! stamped into every CSV the tools emit so outputs stay traceable.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::SolutionFamily;
use crate::interval::Interval;
use crate::process::{ProcessCurve, DEFAULT_RHO_DOMAIN};
use crate::thermo::PotentialModel;

/// Model block: `{"model": "ideal", "n": 3, "R": 0.6}` or
/// `{"model": "custom", "name": "vdw", ...}` with a registry of named
/// built-ins.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelConfig {
    Ideal {
        n: f64,
        #[serde(rename = "R")]
        r: f64,
    },
    Custom {
        name: String,
        n: f64,
        #[serde(rename = "R")]
        r: f64,
        #[serde(default)]
        a: f64,
        #[serde(default)]
        b: f64,
    },
}

/// Process block: `{"process": "adiabatic", "s0": 0.0, ...}` or
/// `{"process": "table", "file": "p_of_rho.csv"}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "process", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProcessConfig {
    Adiabatic {
        #[serde(default)]
        s0: f64,
        rho_min: Option<f64>,
        rho_max: Option<f64>,
    },
    Table {
        file: String,
    },
}

/// Raw run configuration as parsed from disk.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub process: ProcessConfig,
    pub alpha: [f64; 4],
    /// Density window for branch extraction; defaults to the process domain
    /// clipped to [1e-2, 1e2].
    pub rho_window: Option<[f64; 2]>,
    /// Directory for file outputs; default "out". The EULERFLOW_OUT_DIR
    /// environment variable overrides it.
    pub output_dir: Option<String>,
}

/// Config with every default made explicit.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ResolvedConfig {
    pub model: ModelConfig,
    pub process: ProcessConfig,
    pub alpha: [f64; 4],
    pub rho_window: [f64; 2],
    pub output_dir: String,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config schema: {e}")))
    }

    /// Fill in defaults. The process domain must be known first, so the
    /// model/process pair is validated here as well.
    pub fn resolve(self) -> Result<ResolvedConfig> {
        let (rho_min, rho_max) = match &self.process {
            ProcessConfig::Adiabatic {
                rho_min, rho_max, ..
            } => (
                rho_min.unwrap_or(DEFAULT_RHO_DOMAIN.0),
                rho_max.unwrap_or(DEFAULT_RHO_DOMAIN.1),
            ),
            ProcessConfig::Table { file } => {
                let points = read_pressure_table(Path::new(file))?;
                (points[0].0, points[points.len() - 1].0)
            }
        };
        if !(rho_min > 0.0 && rho_min < rho_max) {
            return Err(Error::Config(format!(
                "process domain must satisfy 0 < rho_min < rho_max, got [{rho_min}, {rho_max}]"
            )));
        }
        let process = match self.process {
            ProcessConfig::Adiabatic { s0, .. } => ProcessConfig::Adiabatic {
                s0,
                rho_min: Some(rho_min),
                rho_max: Some(rho_max),
            },
            table => table,
        };
        let rho_window = self.rho_window.unwrap_or([
            rho_min.max(1e-2),
            rho_max.min(1e2),
        ]);
        if !(rho_window[0] > 0.0 && rho_window[0] < rho_window[1]) {
            return Err(Error::Config(format!(
                "rho_window must satisfy 0 < lo < hi, got {rho_window:?}"
            )));
        }
        let output_dir = std::env::var("EULERFLOW_OUT_DIR")
            .ok()
            .or(self.output_dir)
            .unwrap_or_else(|| "out".to_string());
        Ok(ResolvedConfig {
            model: self.model,
            process,
            alpha: self.alpha,
            rho_window,
            output_dir,
        })
    }
}

impl ResolvedConfig {
    /// Canonical JSON of the resolved config.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("resolved config serializes")
    }

    /// FNV-1a 64-bit hash of the canonical JSON, as stamped into outputs.
    pub fn hash(&self) -> String {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        for byte in self.canonical_json().bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(PRIME);
        }
        format!("{h:016x}")
    }

    pub fn build_model(&self) -> Result<PotentialModel> {
        match &self.model {
            ModelConfig::Ideal { n, r } => PotentialModel::ideal_gas(*n, *r),
            ModelConfig::Custom { name, n, r, a, b } => match name.as_str() {
                "vdw" | "van_der_waals" => PotentialModel::van_der_waals(*n, *r, *a, *b),
                other => Err(Error::Config(format!(
                    "unknown custom model {other:?}; registry: vdw"
                ))),
            },
        }
    }

    pub fn build_curve(&self) -> Result<ProcessCurve> {
        match &self.process {
            ProcessConfig::Adiabatic {
                s0,
                rho_min,
                rho_max,
            } => {
                let model = self.build_model()?;
                let domain = Interval::positive(
                    rho_min.expect("resolved"),
                    rho_max.expect("resolved"),
                )?;
                ProcessCurve::adiabatic(&model, *s0, domain)
            }
            ProcessConfig::Table { file } => {
                let points = read_pressure_table(Path::new(file))?;
                ProcessCurve::from_table(&points)
            }
        }
    }

    pub fn build_family(&self) -> Result<SolutionFamily> {
        SolutionFamily::new(self.alpha, self.build_curve()?)
    }

    pub fn rho_window(&self) -> (f64, f64) {
        (self.rho_window[0], self.rho_window[1])
    }
}

/// Read a CSV pressure table with columns rho,p. A header row and comment
/// lines starting with # are allowed; rho must be strictly increasing.
pub fn read_pressure_table(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read table {}: {e}", path.display())))?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
            return Err(Error::Config(format!(
                "table line {} needs two columns rho,p",
                lineno + 1
            )));
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(rho), Ok(p)) => points.push((rho, p)),
            _ if points.is_empty() => continue, // header row
            _ => {
                return Err(Error::Config(format!(
                    "table line {}: cannot parse {line:?}",
                    lineno + 1
                )));
            }
        }
    }
    if points.len() < 4 {
        return Err(Error::Config(
            "pressure table needs at least 4 data rows".to_string(),
        ));
    }
    Ok(points)
}

/// The bundled demo configuration: ideal gas n = 3 with R chosen so that
/// A(rho) = rho^(-2/3) exactly, adiabatic with s0 = 0, family constants
/// (0, 0, 1, 1).
pub fn reference_config() -> RunConfig {
    RunConfig {
        model: ModelConfig::Ideal { n: 3.0, r: 0.6 },
        process: ProcessConfig::Adiabatic {
            s0: 0.0,
            rho_min: Some(1e-3),
            rho_max: Some(1e3),
        },
        alpha: [0.0, 0.0, 1.0, 1.0],
        rho_window: Some([0.02, 50.0]),
        output_dir: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_config_round_trips_and_builds() {
        let cfg = reference_config();
        let text = serde_json::to_string(&cfg).unwrap();
        let parsed = RunConfig::from_json(&text).unwrap();
        assert_eq!(parsed, cfg);
        let resolved = parsed.resolve().unwrap();
        let fam = resolved.build_family().unwrap();
        assert!((fam.g(1.0, 0.0).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn schema_violations_are_config_errors() {
        assert!(matches!(
            RunConfig::from_json("{\"model\": {\"model\": \"nope\"}}"),
            Err(Error::Config(_))
        ));
        // unknown field
        let bad = r#"{
            "model": {"model": "ideal", "n": 3, "R": 1.0, "zz": 1},
            "process": {"process": "adiabatic", "s0": 0.0},
            "alpha": [0, 0, 1, 1]
        }"#;
        assert!(matches!(RunConfig::from_json(bad), Err(Error::Config(_))));
    }

    #[test]
    fn defaults_become_explicit_on_resolve() {
        let text = r#"{
            "model": {"model": "ideal", "n": 3, "R": 0.6},
            "process": {"process": "adiabatic"},
            "alpha": [0, 0, 1, 1]
        }"#;
        let resolved = RunConfig::from_json(text).unwrap().resolve().unwrap();
        match resolved.process {
            ProcessConfig::Adiabatic {
                rho_min, rho_max, ..
            } => {
                assert_eq!(rho_min, Some(1e-3));
                assert_eq!(rho_max, Some(1e3));
            }
            _ => panic!("wrong process"),
        }
        assert_eq!(resolved.rho_window, [1e-2, 1e2]);
        assert_eq!(resolved.output_dir, "out");
        // hash is stable
        assert_eq!(resolved.hash(), resolved.clone().hash());
    }

    #[test]
    fn vdw_registry_builds() {
        let text = r#"{
            "model": {"model": "custom", "name": "vdw", "n": 3, "R": 1.0, "a": 2.0, "b": 0.005},
            "process": {"process": "adiabatic", "s0": 1.5, "rho_min": 0.2, "rho_max": 3.0},
            "alpha": [0, 0, 1, 1]
        }"#;
        let resolved = RunConfig::from_json(text).unwrap().resolve().unwrap();
        let model = resolved.build_model().unwrap();
        assert!(model.dof().is_some());
        // the adiabat exists on this window
        let curve = resolved.build_curve().unwrap();
        assert!(curve.pressure(1.0).unwrap().is_finite());
    }

    #[test]
    fn table_process_reads_csv() {
        let dir = std::env::temp_dir().join("eulerflow_cfg_test");
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("p_of_rho.csv");
        let mut body = String::from("rho,p\n");
        for i in 0..32 {
            let r = 0.5 + 2.0 * i as f64 / 31.0;
            body.push_str(&format!("{},{}\n", r, r * r * r));
        }
        std::fs::write(&file, body).unwrap();
        let text = format!(
            r#"{{
                "model": {{"model": "ideal", "n": 3, "R": 1.0}},
                "process": {{"process": "table", "file": "{}"}},
                "alpha": [0, 0, 1, 1]
            }}"#,
            file.display()
        );
        let resolved = RunConfig::from_json(&text).unwrap().resolve().unwrap();
        let curve = resolved.build_curve().unwrap();
        let p = curve.pressure(1.2).unwrap();
        assert!((p - 1.2_f64.powi(3)).abs() < 1e-3);
    }
}
