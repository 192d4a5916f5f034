//! Raw experimental parameters and the derived quantities every downstream
//! equation consumes.
//!
//! Unit conventions: every rate and frequency is angular (rad/s) once inside
//! the library. Quoted input values such as "ω_m = 63 MHz" are taken as
//! angular by default; setting [`FrequencyConvention::Ordinary`] multiplies
//! the frequency-like raw inputs by 2π on derivation instead.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// CODATA physical constants, hard-coded to full double precision.
pub mod constants {
    /// Reduced Planck constant ħ (J·s), from the exact SI h.
    pub const HBAR: f64 = 6.626_070_15e-34 / (2.0 * std::f64::consts::PI);
    /// Boltzmann constant k_B (J/K), exact SI value.
    pub const KB: f64 = 1.380_649e-23;
    /// Speed of light in vacuum c (m/s), exact SI value.
    pub const C: f64 = 2.997_924_58e8;
}

/// Interpretation of quoted frequency-like inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyConvention {
    /// Inputs are already angular frequencies in rad/s (default).
    #[default]
    Angular,
    /// Inputs are ordinary frequencies in Hz; multiplied by 2π on derivation.
    Ordinary,
}

impl FrequencyConvention {
    /// Factor applied to frequency-like raw inputs (ω_m, γ_m, absolute J,
    /// κ_ex, absolute Δ_c). Dimensionless ratios are unaffected.
    pub fn scale(self) -> f64 {
        match self {
            FrequencyConvention::Angular => 1.0,
            FrequencyConvention::Ordinary => 2.0 * std::f64::consts::PI,
        }
    }
}

/// Backscattering coupling, supplied either absolutely or relative to the
/// total optical decay Γ. Stored absolute after derivation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CouplingJ {
    /// J in rad/s.
    Absolute(f64),
    /// J/Γ.
    RatioOfGamma(f64),
}

/// Optical detuning Δ_c = ω_c − ω_l, supplied absolutely or as Δ_c/ω_m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Detuning {
    /// Δ_c in rad/s.
    Absolute(f64),
    /// Δ_c/ω_m.
    RatioOfOmegaM(f64),
}

/// Raw resonator and bath parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Mechanical angular frequency ω_m (rad/s).
    pub omega_m: f64,
    /// Mechanical damping rate γ_m (rad/s).
    pub gamma_m: f64,
    /// Bath temperature T (K).
    pub temperature: f64,
    /// Effective mass m (kg).
    pub mass: f64,
    /// Drive wavelength λ (m).
    pub wavelength: f64,
    /// Optical quality factor Q_c = ω_c/κ₀ (dimensionless).
    pub quality_c: f64,
    /// Resonator radius R (m).
    pub radius: f64,
    /// External (fiber) coupling rate κ_ex (rad/s). `None` selects critical
    /// coupling κ_ex = κ₀, the standard WGM operating point.
    pub kappa_ex: Option<f64>,
    /// Backscattering coupling J.
    pub coupling_j: CouplingJ,
}

impl SystemParams {
    /// Experimentally motivated baseline used by the scenario presets:
    /// ω_m = 63 MHz, γ_m = 500 Hz, T = 130 mK, m = 10 ng, λ = 1550 nm,
    /// Q_c = 6.4×10⁷, R = 1.1 mm, critical coupling, J = Γ.
    pub fn baseline() -> Self {
        SystemParams {
            omega_m: 63.0e6,
            gamma_m: 500.0,
            temperature: 0.13,
            mass: 1.0e-11,
            wavelength: 1.55e-6,
            quality_c: 6.4e7,
            radius: 1.1e-3,
            kappa_ex: None,
            coupling_j: CouplingJ::RatioOfGamma(1.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let positive: [(&'static str, f64); 6] = [
            ("omega_m", self.omega_m),
            ("gamma_m", self.gamma_m),
            ("mass", self.mass),
            ("wavelength", self.wavelength),
            ("quality_c", self.quality_c),
            ("radius", self.radius),
        ];
        for (field, value) in positive {
            if value <= 0.0 || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be strictly positive and finite, got {value}"),
                });
            }
        }
        if self.temperature < 0.0 || !self.temperature.is_finite() {
            return Err(Error::InvalidParameter {
                field: "temperature",
                reason: format!("must be ≥ 0 and finite, got {}", self.temperature),
            });
        }
        if let Some(kex) = self.kappa_ex {
            if kex <= 0.0 || !kex.is_finite() {
                return Err(Error::InvalidParameter {
                    field: "kappa_ex",
                    reason: format!("must be strictly positive and finite, got {kex}"),
                });
            }
        }
        let j = match self.coupling_j {
            CouplingJ::Absolute(j) => j,
            CouplingJ::RatioOfGamma(r) => r,
        };
        if j < 0.0 || !j.is_finite() {
            return Err(Error::InvalidParameter {
                field: "coupling_j",
                reason: format!("must be ≥ 0 and finite, got {j}"),
            });
        }
        Ok(())
    }
}

/// Drive lasers: powers, phases, and common detuning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    /// Input power on the cw pump P_cw (W).
    pub power_cw: f64,
    /// Input power on the ccw pump P_ccw (W).
    pub power_ccw: f64,
    /// Drive phase θ_cw (rad).
    pub phase_cw: f64,
    /// Drive phase θ_ccw (rad).
    pub phase_ccw: f64,
    /// Detuning Δ_c = ω_c − ω_l.
    pub detuning: Detuning,
}

impl DriveConfig {
    /// Phase difference θ = θ_cw − θ_ccw, reduced to [0, 2π).
    pub fn theta(&self) -> f64 {
        (self.phase_cw - self.phase_ccw).rem_euclid(2.0 * std::f64::consts::PI)
    }

    /// Double pump at 28 mW each with phase difference `theta` realized
    /// symmetrically (θ_cw = θ/2, θ_ccw = −θ/2), at Δ_c/ω_m = `detuning_ratio`.
    ///
    /// The symmetric split fixes the lab-frame quadrature gauge so that the
    /// cross-quadrature squeezing verdicts depend only on θ; E_N, photon
    /// numbers, and q_s do not depend on the split at all.
    pub fn double_pump(theta: f64, detuning_ratio: f64) -> Self {
        DriveConfig {
            power_cw: 0.028,
            power_ccw: 0.028,
            phase_cw: theta / 2.0,
            phase_ccw: -theta / 2.0,
            detuning: Detuning::RatioOfOmegaM(detuning_ratio),
        }
    }

    /// Single pump (cw only) at 28 mW, Δ_c/ω_m = `detuning_ratio`.
    pub fn single_pump(detuning_ratio: f64) -> Self {
        DriveConfig {
            power_cw: 0.028,
            power_ccw: 0.0,
            phase_cw: 0.0,
            phase_ccw: 0.0,
            detuning: Detuning::RatioOfOmegaM(detuning_ratio),
        }
    }

    fn validate(&self) -> Result<()> {
        for (field, value) in [("power_cw", self.power_cw), ("power_ccw", self.power_ccw)] {
            if value < 0.0 || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be ≥ 0 and finite, got {value}"),
                });
            }
        }
        for (field, value) in [("phase_cw", self.phase_cw), ("phase_ccw", self.phase_ccw)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be finite, got {value}"),
                });
            }
        }
        let d = match self.detuning {
            Detuning::Absolute(d) => d,
            Detuning::RatioOfOmegaM(r) => r,
        };
        if !d.is_finite() {
            return Err(Error::InvalidParameter {
                field: "detuning",
                reason: format!("must be finite, got {d}"),
            });
        }
        Ok(())
    }
}

/// Everything downstream equations consume, all in rad/s where dimensional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Cavity angular frequency ω_c = 2πc/λ.
    pub omega_c: f64,
    /// Intrinsic decay κ₀ = ω_c/Q_c.
    pub kappa_0: f64,
    /// External coupling κ_ex actually in effect.
    pub kappa_ex: f64,
    /// Total optical decay Γ = κ₀ + κ_ex.
    pub gamma: f64,
    /// Single-photon optomechanical coupling G₀ = (ω_c/R)√(ħ/(m ω_m)).
    pub g0: f64,
    /// Backscattering coupling J, absolute.
    pub j: f64,
    /// Detuning Δ_c, absolute.
    pub delta_c: f64,
    /// Laser frequency ω_l = ω_c − Δ_c.
    pub omega_l: f64,
    /// Drive amplitude |ε_cw| = √(2κ_ex P_cw/(ħω_l)).
    pub eps_cw: f64,
    /// Drive amplitude |ε_ccw|.
    pub eps_ccw: f64,
    /// Mean thermal phonon occupation n_m.
    pub n_m: f64,
    /// Effective mechanical frequency input after convention scaling.
    pub omega_m: f64,
    /// Effective mechanical damping after convention scaling.
    pub gamma_m: f64,
    /// Mechanical quality factor Q_m = ω_m/γ_m.
    pub q_m: f64,
    /// Non-fatal advisories (e.g. low mechanical Q).
    pub warnings: Vec<String>,
}

/// Bose occupation 1/(e^{ħω/k_BT} − 1); exactly 0 at T = 0.
fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return 0.0;
    }
    1.0 / f64::exp_m1(constants::HBAR * omega / (constants::KB * temperature))
}

/// Convert raw parameters into derived rates.
///
/// Deterministic and pure: identical inputs give bit-identical outputs.
pub fn derive_constants(
    params: &SystemParams,
    drive: &DriveConfig,
    convention: FrequencyConvention,
) -> Result<DerivedParams> {
    params.validate()?;
    drive.validate()?;
    let s = convention.scale();

    let omega_m = s * params.omega_m;
    let gamma_m = s * params.gamma_m;
    let omega_c = 2.0 * std::f64::consts::PI * constants::C / params.wavelength;
    let kappa_0 = omega_c / params.quality_c;
    let kappa_ex = params.kappa_ex.map_or(kappa_0, |k| s * k);
    let gamma = kappa_0 + kappa_ex;
    let g0 = (omega_c / params.radius) * (constants::HBAR / (params.mass * omega_m)).sqrt();
    let j = match params.coupling_j {
        CouplingJ::Absolute(j) => s * j,
        CouplingJ::RatioOfGamma(r) => r * gamma,
    };
    let delta_c = match drive.detuning {
        Detuning::Absolute(d) => s * d,
        Detuning::RatioOfOmegaM(r) => r * omega_m,
    };
    let omega_l = omega_c - delta_c;
    if omega_l <= 0.0 {
        return Err(Error::InvalidParameter {
            field: "detuning",
            reason: format!("laser frequency ω_c − Δ_c must stay positive, got {omega_l}"),
        });
    }
    let eps = |power: f64| (2.0 * kappa_ex * power / (constants::HBAR * omega_l)).sqrt();
    let n_m = thermal_occupation(omega_m, params.temperature);
    let q_m = omega_m / gamma_m;

    let mut warnings = Vec::new();
    if q_m < 100.0 {
        warnings.push(format!(
            "mechanical quality factor Q_m = {q_m:.3} < 100; the delta-correlated \
             noise model assumes Q_m >> 1"
        ));
    }

    Ok(DerivedParams {
        omega_c,
        kappa_0,
        kappa_ex,
        gamma,
        g0,
        j,
        delta_c,
        omega_l,
        eps_cw: eps(drive.power_cw),
        eps_ccw: eps(drive.power_ccw),
        n_m,
        omega_m,
        gamma_m,
        q_m,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn baseline_derived() -> DerivedParams {
        derive_constants(
            &SystemParams::baseline(),
            &DriveConfig::double_pump(0.0, 0.4),
            FrequencyConvention::Angular,
        )
        .unwrap()
    }

    #[test]
    fn zero_temperature_gives_zero_occupation() {
        let mut params = SystemParams::baseline();
        params.temperature = 0.0;
        let d = derive_constants(
            &params,
            &DriveConfig::double_pump(0.0, 0.4),
            FrequencyConvention::Angular,
        )
        .unwrap();
        assert_eq!(d.n_m, 0.0);
    }

    #[test]
    fn cavity_frequency_for_1550nm() {
        let d = baseline_derived();
        assert_relative_eq!(d.omega_c, 1.215259075683e15, max_relative = 1e-11);
    }

    #[test]
    fn baseline_derived_values() {
        // Frozen from independent evaluation of the closed forms.
        let d = baseline_derived();
        assert_relative_eq!(d.kappa_0, 1.898842305755e7, max_relative = 1e-11);
        assert_relative_eq!(d.gamma, 3.797684611510e7, max_relative = 1e-11);
        assert_relative_eq!(d.g0, 4.520057856237e2, max_relative = 1e-11);
        assert_relative_eq!(d.n_m, 2.696533892052e2, max_relative = 1e-11);
        assert_relative_eq!(d.eps_cw, 2.880487205181e12, max_relative = 1e-11);
        assert_relative_eq!(d.eps_ccw, 2.880487205181e12, max_relative = 1e-11);
        assert_relative_eq!(d.j, d.gamma, max_relative = 1e-14);
        assert_relative_eq!(d.delta_c, 0.4 * 63.0e6, max_relative = 1e-14);
        assert_eq!(d.q_m, 126_000.0);
        assert!(d.warnings.is_empty());
    }

    #[test]
    fn occupation_monotone_in_frequency_and_temperature() {
        let n = |omega, t| thermal_occupation(omega, t);
        let omegas = [1.0e6, 1.0e7, 6.3e7, 1.0e9];
        for w in omegas.windows(2) {
            assert!(n(w[1], 0.13) < n(w[0], 0.13));
        }
        let temps = [0.01, 0.13, 1.0, 10.0];
        for t in temps.windows(2) {
            assert!(n(63.0e6, t[1]) > n(63.0e6, t[0]));
        }
    }

    #[test]
    fn drive_amplitude_scales_as_sqrt_power() {
        // Scaling by a power of two commutes with rounding at every step,
        // so "ε scales by √s exactly" is bitwise testable at s = 4.
        let params = SystemParams::baseline();
        let mut drive = DriveConfig::double_pump(0.0, 0.4);
        let d1 = derive_constants(&params, &drive, FrequencyConvention::Angular).unwrap();
        drive.power_cw *= 4.0;
        let d2 = derive_constants(&params, &drive, FrequencyConvention::Angular).unwrap();
        assert_eq!(d2.eps_cw, 2.0 * d1.eps_cw);
        assert_eq!(d2.eps_ccw, d1.eps_ccw);
    }

    #[test]
    fn ordinary_convention_scales_frequency_inputs() {
        let params = SystemParams::baseline();
        let drive = DriveConfig::double_pump(0.1, 0.4);
        let a = derive_constants(&params, &drive, FrequencyConvention::Angular).unwrap();
        let o = derive_constants(&params, &drive, FrequencyConvention::Ordinary).unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        assert_relative_eq!(o.omega_m, tau * a.omega_m, max_relative = 1e-14);
        assert_relative_eq!(o.gamma_m, tau * a.gamma_m, max_relative = 1e-14);
        // Ratio-specified J and Δ_c stay tied to their references.
        assert_relative_eq!(o.j / o.gamma, a.j / a.gamma, max_relative = 1e-14);
        assert_relative_eq!(
            o.delta_c / o.omega_m,
            a.delta_c / a.omega_m,
            max_relative = 1e-14
        );
        // ω_c comes from λ, not from the convention.
        assert_eq!(o.omega_c, a.omega_c);
    }

    #[test]
    fn invalid_inputs_name_the_field() {
        let mut params = SystemParams::baseline();
        params.mass = -1.0;
        let err = derive_constants(
            &params,
            &DriveConfig::double_pump(0.0, 0.4),
            FrequencyConvention::Angular,
        )
        .unwrap_err();
        match err {
            Error::InvalidParameter { field, .. } => assert_eq!(field, "mass"),
            other => panic!("expected InvalidParameter, got {other:?}"),
        }
    }

    #[test]
    fn determinism_bitwise() {
        let params = SystemParams::baseline();
        let drive = DriveConfig::double_pump(1.234, 0.7);
        let a = derive_constants(&params, &drive, FrequencyConvention::Angular).unwrap();
        let b = derive_constants(&params, &drive, FrequencyConvention::Angular).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn theta_reduced_to_unit_circle() {
        let drive = DriveConfig {
            phase_cw: -0.5,
            phase_ccw: 2.0,
            ..DriveConfig::double_pump(0.0, 0.4)
        };
        let theta = drive.theta();
        assert!((0.0..2.0 * std::f64::consts::PI).contains(&theta));
        assert_relative_eq!(
            theta,
            2.0 * std::f64::consts::PI - 2.5,
            max_relative = 1e-12
        );
    }
}
