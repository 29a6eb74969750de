//! Run configuration: one TOML file, schema-checked on load, unknown keys
//! rejected. Tabulated curve files are two-column text (r, value) with `#`
//! comments, resolved relative to the config file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::atom_cavity::{CavitySpec, EnsembleSpec, RotationSpec};
use crate::error::{Result, RotcavError};
use crate::hermitian::Channel;
use crate::molecule::{CubicSpline, DiatomicModel, PotentialCurve, TransitionDipole};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub system: SystemSection,
    pub cavity: Option<CavitySection>,
    pub rotation: Option<RotationSection>,
    pub ensemble: Option<EnsembleSection>,
    pub molecule: Option<MoleculeSection>,
    pub darkstates: Option<DarkstatesSection>,
    pub scan: Option<ScanSection>,
    pub lici: Option<LiciSection>,
    pub propagation: Option<PropagationSection>,
    pub bench: Option<BenchSection>,
    #[serde(skip)]
    base_dir: PathBuf,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub kind: SystemKind,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Atom,
    Ensemble,
    Diatomic,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    pub omega_c: f64,
    pub g: f64,
    #[serde(default)]
    pub detuning: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationSection {
    pub axis: AxisSpec,
    pub omega: f64,
}

/// Rotation axis: "x" | "y" | "z", an explicit 3-vector, or an in-plane
/// azimuth { xy_angle = alpha }.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    Named(String),
    Vector([f64; 3]),
    InPlane(InPlaneAxis),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InPlaneAxis {
    pub xy_angle: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub n_atoms: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeSection {
    pub g0: f64,
    pub reduced_mass: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub v_sigma: CurveSection,
    pub v_pi: CurveSection,
    pub dipole: DipoleSection,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum CurveSection {
    Harmonic {
        k: f64,
        r0: f64,
        #[serde(default)]
        offset: f64,
    },
    Morse {
        d: f64,
        a: f64,
        r0: f64,
        #[serde(default)]
        offset: f64,
    },
    Tabulated {
        file: String,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum DipoleSection {
    Constant { value: f64 },
    Tabulated { file: String },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DarkstatesSection {
    /// Self-test hook: perturb the predicted census so the oracle
    /// comparison fails and the command exits nonzero.
    #[serde(default)]
    pub inject_mismatch: bool,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridRange {
    pub fn points(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(RotcavError::InvalidInput("grid count must be >= 1".into()));
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        if !(self.stop > self.start) {
            return Err(RotcavError::InvalidInput(format!(
                "grid stop {} must exceed start {}",
                self.stop, self.start
            )));
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.start + i as f64 * step).collect())
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub r: GridRange,
    pub theta: GridRange,
    pub phi: GridRange,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiciSection {
    pub r_window: [f64; 2],
    #[serde(default = "default_phi_grid")]
    pub phi_grid: usize,
    pub expected_r_values: Option<usize>,
    #[serde(default = "default_gap_tol")]
    pub gap_tol: f64,
    #[serde(default = "default_scan_samples")]
    pub scan_samples: usize,
}

fn default_phi_grid() -> usize {
    64
}

fn default_gap_tol() -> f64 {
    1e-10
}

fn default_scan_samples() -> usize {
    512
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationSection {
    pub n_points: usize,
    pub n_steps: usize,
    pub dt: Option<f64>,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub include_centrifugal: bool,
    pub initial: InitialState,
}

fn default_theta() -> f64 {
    std::f64::consts::FRAC_PI_2
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    Gaussian {
        channel: ChannelName,
        center: f64,
        width: f64,
        #[serde(default)]
        momentum: f64,
    },
    SineMode {
        channel: ChannelName,
        index: usize,
    },
    Eigenstate {
        index: usize,
    },
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelName {
    Sigma,
    PiPlus,
    PiMinus,
}

impl ChannelName {
    pub fn channel(self) -> Channel {
        match self {
            ChannelName::Sigma => Channel::Sigma,
            ChannelName::PiPlus => Channel::PiPlus,
            ChannelName::PiMinus => Channel::PiMinus,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSection {
    pub sizes: Vec<usize>,
    #[serde(default = "default_dense_cap")]
    pub dense_cap: usize,
    /// When false, the timing columns are left empty so repeated runs are
    /// byte-identical; the correctness column is always written.
    #[serde(default = "default_true")]
    pub emit_timings: bool,
    #[serde(default = "default_min_time")]
    pub min_time_s: f64,
}

fn default_dense_cap() -> usize {
    2000
}

fn default_true() -> bool {
    true
}

fn default_min_time() -> f64 {
    0.02
}

impl RunConfig {
    /// Parse and schema-check a config file. Syntax and unknown-key errors
    /// carry the TOML line/column diagnostics.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            RotcavError::InvalidInput(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| {
            RotcavError::InvalidInput(format!("config {}: {e}", path.display()))
        })?;
        cfg.base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Ok(cfg)
    }

    pub fn from_str_for_tests(text: &str, base_dir: &Path) -> Result<RunConfig> {
        let mut cfg: RunConfig =
            toml::from_str(text).map_err(|e| RotcavError::InvalidInput(format!("config: {e}")))?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn cavity(&self) -> Result<CavitySpec> {
        let section = self
            .cavity
            .as_ref()
            .ok_or_else(|| RotcavError::InvalidInput("missing [cavity] section".into()))?;
        Ok(CavitySpec::new(section.omega_c, section.g)?.with_detuning(section.detuning))
    }

    pub fn rotation(&self) -> Result<RotationSpec> {
        let section = self
            .rotation
            .as_ref()
            .ok_or_else(|| RotcavError::InvalidInput("missing [rotation] section".into()))?;
        rotation_from(section)
    }

    pub fn ensemble(&self) -> Result<EnsembleSpec> {
        match self.system.kind {
            SystemKind::Atom => EnsembleSpec::new(1),
            SystemKind::Ensemble => {
                let section = self.ensemble.as_ref().ok_or_else(|| {
                    RotcavError::InvalidInput("missing [ensemble] section".into())
                })?;
                EnsembleSpec::new(section.n_atoms)
            }
            SystemKind::Diatomic => Err(RotcavError::InvalidInput(
                "this command needs system.kind = \"atom\" or \"ensemble\"".into(),
            )),
        }
    }

    pub fn molecule(&self) -> Result<DiatomicModel> {
        if self.system.kind != SystemKind::Diatomic {
            return Err(RotcavError::InvalidInput(
                "this command needs system.kind = \"diatomic\"".into(),
            ));
        }
        let section = self
            .molecule
            .as_ref()
            .ok_or_else(|| RotcavError::InvalidInput("missing [molecule] section".into()))?;
        let cavity_section = self
            .cavity
            .as_ref()
            .ok_or_else(|| RotcavError::InvalidInput("missing [cavity] section".into()))?;
        // the molecular coupling comes from g0 * d(r); the atomic g is unused
        let cavity = CavitySpec::new(cavity_section.omega_c, 0.0)?;
        DiatomicModel::new(
            self.curve(&section.v_sigma)?,
            self.curve(&section.v_pi)?,
            self.dipole(&section.dipole)?,
            section.g0,
            cavity,
            section.reduced_mass,
            section.r_min,
            section.r_max,
        )
    }

    fn curve(&self, section: &CurveSection) -> Result<PotentialCurve> {
        Ok(match section {
            CurveSection::Harmonic { k, r0, offset } => {
                PotentialCurve::Harmonic { k: *k, r0: *r0, offset: *offset }
            }
            CurveSection::Morse { d, a, r0, offset } => {
                PotentialCurve::Morse { d: *d, a: *a, r0: *r0, offset: *offset }
            }
            CurveSection::Tabulated { file } => {
                let (xs, ys) = self.read_curve_file(file)?;
                PotentialCurve::Tabulated(CubicSpline::new(xs, ys)?)
            }
        })
    }

    fn dipole(&self, section: &DipoleSection) -> Result<TransitionDipole> {
        Ok(match section {
            DipoleSection::Constant { value } => TransitionDipole::Constant(*value),
            DipoleSection::Tabulated { file } => {
                let (xs, ys) = self.read_curve_file(file)?;
                TransitionDipole::Tabulated(CubicSpline::new(xs, ys)?)
            }
        })
    }

    fn read_curve_file(&self, file: &str) -> Result<(Vec<f64>, Vec<f64>)> {
        let path = self.base_dir.join(file);
        let text = std::fs::read_to_string(&path).map_err(|e| {
            RotcavError::InvalidInput(format!("cannot read curve file {}: {e}", path.display()))
        })?;
        parse_curve_text(&text).map_err(|e| {
            RotcavError::InvalidInput(format!("curve file {}: {e}", path.display()))
        })
    }
}

/// Two-column (r, value) text; blank lines and `#` comments are skipped.
pub fn parse_curve_text(text: &str) -> std::result::Result<(Vec<f64>, Vec<f64>), String> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let x: f64 = parts
            .next()
            .ok_or_else(|| format!("line {}: missing r column", lineno + 1))?
            .parse()
            .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        let y: f64 = parts
            .next()
            .ok_or_else(|| format!("line {}: missing value column", lineno + 1))?
            .parse()
            .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        if parts.next().is_some() {
            return Err(format!("line {}: expected exactly two columns", lineno + 1));
        }
        xs.push(x);
        ys.push(y);
    }
    Ok((xs, ys))
}

fn rotation_from(section: &RotationSection) -> Result<RotationSpec> {
    match &section.axis {
        AxisSpec::Named(name) => {
            let axis = match name.to_ascii_lowercase().as_str() {
                "x" => [1.0, 0.0, 0.0],
                "y" => [0.0, 1.0, 0.0],
                "z" => [0.0, 0.0, 1.0],
                other => {
                    return Err(RotcavError::InvalidInput(format!(
                        "rotation.axis must be \"x\", \"y\", \"z\", a 3-vector or {{ xy_angle = a }}; got \"{other}\""
                    )))
                }
            };
            RotationSpec::new(axis, section.omega)
        }
        AxisSpec::Vector(v) => RotationSpec::new(*v, section.omega),
        AxisSpec::InPlane(p) => RotationSpec::in_plane(p.xy_angle, section.omega),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
seed = 7
[system]
kind = "ensemble"
[cavity]
omega_c = 1.0
g = 0.05
[rotation]
axis = "y"
omega = 0.3
[ensemble]
n_atoms = 4
"#;

    #[test]
    fn minimal_config_parses_and_builds() {
        let cfg = RunConfig::from_str_for_tests(MINIMAL, Path::new(".")).unwrap();
        assert_eq!(cfg.seed, 7);
        let cavity = cfg.cavity().unwrap();
        assert_eq!(cavity.omega_c, 1.0);
        let rot = cfg.rotation().unwrap();
        assert_eq!(rot.axis(), [0.0, 1.0, 0.0]);
        assert_eq!(cfg.ensemble().unwrap().n_atoms, 4);
    }

    #[test]
    fn unknown_keys_are_rejected_with_diagnostics() {
        let text = format!("{MINIMAL}\n[cavity2]\nx = 1\n");
        let err = RunConfig::from_str_for_tests(&text, Path::new(".")).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("cavity2"), "{msg}");
        let text = MINIMAL.replace("g = 0.05", "g = 0.05\ncoupling_typo = 1.0");
        let err = RunConfig::from_str_for_tests(&text, Path::new(".")).unwrap_err();
        assert!(format!("{err}").contains("coupling_typo"));
    }

    #[test]
    fn axis_forms_all_parse() {
        for (axis, expect) in [
            ("axis = [0.0, 0.0, 2.0]", [0.0, 0.0, 1.0]),
            ("axis = { xy_angle = 0.0 }", [1.0, 0.0, 0.0]),
            ("axis = \"z\"", [0.0, 0.0, 1.0]),
        ] {
            let text = MINIMAL.replace("axis = \"y\"", axis);
            let cfg = RunConfig::from_str_for_tests(&text, Path::new(".")).unwrap();
            let got = cfg.rotation().unwrap().axis();
            for k in 0..3 {
                assert!((got[k] - expect[k]).abs() < 1e-15, "{axis}");
            }
        }
    }

    #[test]
    fn grid_ranges_validate() {
        let g = GridRange { start: 0.0, stop: 1.0, count: 5 };
        let pts = g.points().unwrap();
        assert_eq!(pts.len(), 5);
        assert!((pts[4] - 1.0).abs() < 1e-15);
        assert!(GridRange { start: 1.0, stop: 0.0, count: 5 }.points().is_err());
        assert!(GridRange { start: 0.0, stop: 1.0, count: 0 }.points().is_err());
    }

    #[test]
    fn curve_text_parses_with_comments() {
        let (xs, ys) = parse_curve_text("# header\n1.0 2.0\n\n1.5 2.5 # inline\n").unwrap();
        assert_eq!(xs, vec![1.0, 1.5]);
        assert_eq!(ys, vec![2.0, 2.5]);
        assert!(parse_curve_text("1.0 2.0 3.0\n").is_err());
        assert!(parse_curve_text("1.0\n").is_err());
    }

    #[test]
    fn molecule_requires_the_diatomic_kind() {
        let cfg = RunConfig::from_str_for_tests(MINIMAL, Path::new(".")).unwrap();
        assert!(cfg.molecule().is_err());
    }
}
