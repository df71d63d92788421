use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{build_line_array, build_square_array, AtomArray, ArrayFile};
use crate::master::DetectionKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    Square { n_side: usize, spacing: f64 },
    Line { count: usize, spacing: f64 },
    /// JSON array file, relative paths resolved against the config file.
    File { path: PathBuf },
    Inline(ArrayFile),
}

impl Default for GeometrySpec {
    fn default() -> Self {
        GeometrySpec::Square { n_side: 5, spacing: 0.4 }
    }
}

impl GeometrySpec {
    pub fn build(&self) -> Result<AtomArray> {
        match self {
            GeometrySpec::Square { n_side, spacing } => build_square_array(*n_side, *spacing),
            GeometrySpec::Line { count, spacing } => build_line_array(*count, *spacing),
            GeometrySpec::File { path } => AtomArray::load(path),
            GeometrySpec::Inline(file) => file.clone().into_array(),
        }
    }

    /// Same lattice with a different spacing; only lattices have one.
    pub fn with_spacing(&self, d: f64) -> Result<Self> {
        match self {
            GeometrySpec::Square { n_side, .. } => Ok(GeometrySpec::Square { n_side: *n_side, spacing: d }),
            GeometrySpec::Line { count, .. } => Ok(GeometrySpec::Line { count: *count, spacing: d }),
            _ => Err(Error::Config("a spacing sweep needs a square or line geometry".into())),
        }
    }

    pub fn atoms(&self) -> Result<usize> {
        Ok(match self {
            GeometrySpec::Square { n_side, .. } => n_side * n_side,
            GeometrySpec::Line { count, .. } => *count,
            _ => self.build()?.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriveSpec {
    PlaneWave {
        omega0: f64,
        #[serde(default = "default_direction")]
        direction: [f64; 3],
        #[serde(default)]
        detuning: f64,
    },
    /// Mode indices count from the most subradiant; negative values count back from
    /// the most superradiant (`-1` is the brightest mode).
    Eigenmode { omega0: f64, mode: i64 },
    TwoMode {
        omega0: f64,
        #[serde(default = "brightest")]
        mode: i64,
        #[serde(default)]
        partner: i64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        phase: f64,
    },
}

fn default_direction() -> [f64; 3] {
    [0.0, 1.0, 0.0]
}

fn brightest() -> i64 {
    -1
}

fn one() -> f64 {
    1.0
}

impl Default for DriveSpec {
    fn default() -> Self {
        DriveSpec::PlaneWave { omega0: 1e-3, direction: default_direction(), detuning: 0.0 }
    }
}

/// Resolves a possibly negative mode index against `n` modes.
pub fn resolve_mode(index: i64, n: usize) -> Result<usize> {
    let resolved = if index < 0 { n as i64 + index } else { index };
    if resolved < 0 || resolved >= n as i64 {
        return Err(Error::Config(format!("mode index {index} out of range for {n} modes")));
    }
    Ok(resolved as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Analytic,
    Master,
    Both,
}

impl Method {
    pub fn analytic(self) -> bool {
        matches!(self, Method::Analytic | Method::Both)
    }

    pub fn master(self) -> bool {
        matches!(self, Method::Master | Method::Both)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Method::Analytic),
            "master" => Ok(Method::Master),
            "both" => Ok(Method::Both),
            other => Err(Error::Config(format!("unknown method '{other}' (expected analytic, master or both)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    /// Lattice spacings for the spacing sweeps (units of λ).
    pub spacings: Vec<f64>,
    /// Restrict per-mode output to these single modes; all when absent.
    pub modes: Option<Vec<i64>>,
    pub phi_steps: usize,
    pub amplitude_max: f64,
    pub amplitude_steps: usize,
    /// Amplitudes for the g²(0)-versus-φ curves.
    pub fixed_amplitudes: Vec<f64>,
    /// Delays for g²(τ) (units of 1/Γ).
    pub taus: Vec<f64>,
    /// Drive strength per mode in the eigenmode sweeps, as a fraction of that mode's decay rate.
    pub relative_drive: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            spacings: (3..=10).map(|k| k as f64 / 10.0).collect(),
            modes: None,
            phi_steps: 128,
            amplitude_max: 3.0,
            amplitude_steps: 61,
            fixed_amplitudes: vec![0.5, 1.0, 2.0],
            taus: (0..=50).map(|k| k as f64 * 0.2).collect(),
            relative_drive: 1e-3,
        }
    }
}

impl SweepSpec {
    pub fn phi_grid(&self) -> Vec<f64> {
        (0..=self.phi_steps).map(|k| std::f64::consts::TAU * k as f64 / self.phi_steps as f64).collect()
    }

    pub fn amplitude_grid(&self) -> Vec<f64> {
        if self.amplitude_steps < 2 {
            return vec![0.0];
        }
        (0..self.amplitude_steps).map(|k| self.amplitude_max * k as f64 / (self.amplitude_steps - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSpec {
    /// Step for transient evolution; defaults to `0.01 / max γ⁽²⁾`.
    pub dt: Option<f64>,
    pub tol: f64,
    pub max_time: f64,
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        Self { dt: None, tol: 1e-10, max_time: 1e6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometrySpec,
    pub drive: DriveSpec,
    /// First detector; the drive's mode (adjoint) when absent.
    pub detector: Option<DetectionKind>,
    /// Second detector for g²(τ); the first one when absent.
    pub second_detector: Option<DetectionKind>,
    pub method: Method,
    pub sweep: SweepSpec,
    pub integrator: IntegratorSpec,
    pub output: OutputSpec,
    /// Worker threads; all cores when absent.
    pub jobs: Option<usize>,
    /// Largest atom number for which master-equation runs are accepted.
    pub max_master_atoms: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: GeometrySpec::default(),
            drive: DriveSpec::default(),
            detector: None,
            second_detector: None,
            method: Method::default(),
            sweep: SweepSpec::default(),
            integrator: IntegratorSpec::default(),
            output: OutputSpec::default(),
            jobs: None,
            max_master_atoms: 25,
        }
    }
}

impl RunConfig {
    /// Reads a JSON config; a relative geometry file is taken relative to the config.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let GeometrySpec::File { path: file } = &mut cfg.geometry {
            if file.is_relative() {
                if let Some(parent) = path.parent() {
                    *file = parent.join(&*file);
                }
            }
        }
        Ok(cfg)
    }

    /// Physics-level checks that serde cannot express.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.sweep.spacings.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return bad("spacings must be positive".into());
        }
        if self.sweep.phi_steps == 0 {
            return bad("phi_steps must be at least 1".into());
        }
        if !(self.sweep.amplitude_max >= 0.0) || self.sweep.fixed_amplitudes.iter().any(|a| !(*a >= 0.0)) {
            return bad("amplitudes must be non-negative".into());
        }
        if self.sweep.taus.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return bad("delays must be finite and non-negative".into());
        }
        if !(self.sweep.relative_drive > 0.0) {
            return bad("relative_drive must be positive".into());
        }
        if !(self.integrator.tol > 0.0) || !(self.integrator.max_time > 0.0) || self.integrator.dt.is_some_and(|dt| !(dt > 0.0)) {
            return bad("integrator settings must be positive".into());
        }
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1".into());
        }
        if self.method.master() {
            let n = self.geometry.atoms()?;
            if n > self.max_master_atoms {
                return bad(format!("master-equation runs are limited to {} atoms, geometry has {n}", self.max_master_atoms));
            }
        }
        Ok(())
    }

    /// SHA-256 over the physics content: output location and thread count are excluded.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = OutputSpec::default();
        canonical.jobs = None;
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(cfg.sweep.phi_grid().len(), 129);
        assert_eq!(cfg.sweep.amplitude_grid().len(), 61);
        assert_eq!(*cfg.sweep.amplitude_grid().last().unwrap(), 3.0);
    }

    #[test]
    fn partial_config_uses_defaults() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"geometry": {"kind": "line", "count": 3, "spacing": 0.5},
                "drive": {"kind": "eigenmode", "omega0": 1e-4, "mode": -1},
                "method": "both"}"#,
        )
        .unwrap();
        assert_eq!(cfg.geometry.atoms().unwrap(), 3);
        assert_eq!(cfg.method, Method::Both);
        cfg.validate().unwrap();
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn hash_ignores_output_location() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.output.dir = PathBuf::from("/elsewhere");
        b.jobs = Some(3);
        assert_eq!(a.hash(), b.hash());
        b.sweep.phi_steps = 64;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn mode_indices() {
        assert_eq!(resolve_mode(-1, 25).unwrap(), 24);
        assert_eq!(resolve_mode(3, 25).unwrap(), 3);
        assert!(resolve_mode(25, 25).is_err());
        assert!(resolve_mode(-26, 25).is_err());
    }

    #[test]
    fn master_size_limit() {
        let cfg = RunConfig { method: Method::Master, max_master_atoms: 9, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }
}
