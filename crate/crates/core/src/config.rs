//! JSON configuration: a flat, typo-safe mirror of the parameter structs.
//!
//! The file schema keeps quantities that can be specified two ways as
//! exclusive key pairs (`coupling_j` vs `coupling_j_ratio`, `detuning` vs
//! `detuning_ratio`, `theta` vs `phase_cw`/`phase_ccw`); exactly one form
//! must be present. Unknown keys are rejected. The same dotted-path override
//! machinery backs the CLI `--set` flag and sweep axes, so every swept
//! parameter name is by construction a valid config path.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::params::{
    derive_constants, CouplingJ, DerivedParams, Detuning, DriveConfig, FrequencyConvention,
    SystemParams,
};
use crate::{Error, Result};

/// Top-level configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Resonator and bath parameters.
    pub system: SystemSection,
    /// Pump powers, phases, detuning.
    pub drive: DriveSection,
    /// Interpretation of frequency-like inputs; defaults to angular (rad/s).
    #[serde(default)]
    pub frequency_convention: FrequencyConvention,
}

/// `system` table. SI units throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    /// Mechanical angular frequency ω_m (rad/s).
    pub omega_m: f64,
    /// Mechanical damping γ_m (rad/s).
    pub gamma_m: f64,
    /// Bath temperature (K).
    pub temperature: f64,
    /// Effective mass (kg).
    pub mass: f64,
    /// Drive wavelength (m).
    pub wavelength: f64,
    /// Optical quality factor Q_c.
    pub quality_c: f64,
    /// Resonator radius (m).
    pub radius: f64,
    /// External coupling κ_ex (rad/s); omit for critical coupling κ_ex = κ₀.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_ex: Option<f64>,
    /// Backscattering J (rad/s). Exclusive with `coupling_j_ratio`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_j: Option<f64>,
    /// Backscattering as J/Γ. Exclusive with `coupling_j`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_j_ratio: Option<f64>,
}

/// `drive` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    /// cw pump power (W).
    pub power_cw: f64,
    /// ccw pump power (W); 0 for single-pump operation.
    pub power_ccw: f64,
    /// Pump phase difference θ = θ_cw − θ_ccw (rad), realized symmetrically
    /// as θ_cw = θ/2, θ_ccw = −θ/2. Exclusive with the explicit phases.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Explicit θ_cw (rad); requires `phase_ccw` and excludes `theta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_cw: Option<f64>,
    /// Explicit θ_ccw (rad); requires `phase_cw` and excludes `theta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_ccw: Option<f64>,
    /// Detuning Δ_c (rad/s). Exclusive with `detuning_ratio`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning: Option<f64>,
    /// Detuning as Δ_c/ω_m. Exclusive with `detuning`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_ratio: Option<f64>,
}

/// A fully validated configuration with its derived quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub params: SystemParams,
    pub drive: DriveConfig,
    pub convention: FrequencyConvention,
    pub derived: DerivedParams,
}

impl Config {
    /// Reference operating point: the baseline resonator with both pumps at
    /// 28 mW, θ = π/5, Δ_c/ω_m = 0.4, J = Γ, critical coupling.
    pub fn baseline() -> Self {
        Config {
            system: SystemSection {
                omega_m: 63.0e6,
                gamma_m: 500.0,
                temperature: 0.13,
                mass: 1.0e-11,
                wavelength: 1.55e-6,
                quality_c: 6.4e7,
                radius: 1.1e-3,
                kappa_ex: None,
                coupling_j: None,
                coupling_j_ratio: Some(1.0),
            },
            drive: DriveSection {
                power_cw: 0.028,
                power_ccw: 0.028,
                theta: Some(std::f64::consts::PI / 5.0),
                phase_cw: None,
                phase_ccw: None,
                detuning: None,
                detuning_ratio: Some(0.4),
            },
            frequency_convention: FrequencyConvention::Angular,
        }
    }

    /// Parse a JSON document; unknown keys and type mismatches are errors.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))
    }

    /// Load from a file path.
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The document as a JSON value (for override application).
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes infallibly")
    }

    /// Re-validate a JSON value as a config document.
    pub fn from_value(value: Value) -> Result<Self> {
        serde_json::from_value(value).map_err(|e| Error::Config(format!("config parse: {e}")))
    }

    /// Validate exclusive key pairs and produce the typed parameter structs
    /// plus derived constants.
    pub fn resolve(&self) -> Result<Resolved> {
        let coupling_j = match (self.system.coupling_j, self.system.coupling_j_ratio) {
            (Some(j), None) => CouplingJ::Absolute(j),
            (None, Some(r)) => CouplingJ::RatioOfGamma(r),
            (None, None) => {
                return Err(Error::Config(
                    "system: one of `coupling_j` or `coupling_j_ratio` is required".into(),
                ))
            }
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "system: `coupling_j` and `coupling_j_ratio` are mutually exclusive".into(),
                ))
            }
        };
        let detuning = match (self.drive.detuning, self.drive.detuning_ratio) {
            (Some(d), None) => Detuning::Absolute(d),
            (None, Some(r)) => Detuning::RatioOfOmegaM(r),
            (None, None) => {
                return Err(Error::Config(
                    "drive: one of `detuning` or `detuning_ratio` is required".into(),
                ))
            }
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "drive: `detuning` and `detuning_ratio` are mutually exclusive".into(),
                ))
            }
        };
        let (phase_cw, phase_ccw) =
            match (self.drive.theta, self.drive.phase_cw, self.drive.phase_ccw) {
                (Some(theta), None, None) => (theta / 2.0, -theta / 2.0),
                (None, Some(cw), Some(ccw)) => (cw, ccw),
                (None, None, None) => (0.0, 0.0),
                _ => {
                    return Err(Error::Config(
                        "drive: give either `theta` or both `phase_cw` and `phase_ccw`".into(),
                    ))
                }
            };

        let params = SystemParams {
            omega_m: self.system.omega_m,
            gamma_m: self.system.gamma_m,
            temperature: self.system.temperature,
            mass: self.system.mass,
            wavelength: self.system.wavelength,
            quality_c: self.system.quality_c,
            radius: self.system.radius,
            kappa_ex: self.system.kappa_ex,
            coupling_j,
        };
        let drive = DriveConfig {
            power_cw: self.drive.power_cw,
            power_ccw: self.drive.power_ccw,
            phase_cw,
            phase_ccw,
            detuning,
        };
        let derived = derive_constants(&params, &drive, self.frequency_convention)?;
        Ok(Resolved {
            params,
            drive,
            convention: self.frequency_convention,
            derived,
        })
    }
}

/// Keys displaced by setting `leaf`, so overriding one member of an
/// exclusive pair does not trip the pair validation.
fn displaced_siblings(leaf: &str) -> &'static [&'static str] {
    match leaf {
        "coupling_j" => &["coupling_j_ratio"],
        "coupling_j_ratio" => &["coupling_j"],
        "detuning" => &["detuning_ratio"],
        "detuning_ratio" => &["detuning"],
        "theta" => &["phase_cw", "phase_ccw"],
        "phase_cw" | "phase_ccw" => &["theta"],
        _ => &[],
    }
}

/// Apply one `key.path=value` override to a config JSON value.
///
/// The raw value is parsed as JSON when possible (numbers, booleans, null),
/// falling back to a bare string; intermediate path segments must name
/// existing tables. Setting one member of an exclusive key pair removes the
/// competing keys.
pub fn apply_override(doc: &mut Value, path: &str, raw: &str) -> Result<()> {
    let parsed =
        serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    set_path(doc, path, parsed)
}

/// Insert an already-typed value at a dotted path, displacing exclusive
/// siblings. Backs both `apply_override` and sweep-axis substitution.
pub fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<()> {
    let segments: Vec<&str> = path.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(Error::Config(format!("malformed override path `{path}`")));
    }
    let (leaf, tables) = segments.split_last().expect("split yields at least one");

    let mut cursor = &mut *doc;
    for (depth, seg) in tables.iter().enumerate() {
        cursor = cursor
            .as_object_mut()
            .and_then(|m| m.get_mut(*seg))
            .ok_or_else(|| {
                Error::Config(format!(
                    "override path `{path}`: no table `{}`",
                    segments[..=depth].join(".")
                ))
            })?;
    }
    let table: &mut Map<String, Value> = cursor.as_object_mut().ok_or_else(|| {
        Error::Config(format!(
            "override path `{path}`: `{}` is not a table",
            tables.join(".")
        ))
    })?;

    for sibling in displaced_siblings(leaf) {
        table.remove(*sibling);
    }
    table.insert((*leaf).to_string(), value);
    Ok(())
}
