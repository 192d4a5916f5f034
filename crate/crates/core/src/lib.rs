//! Steady-state quantum optomechanics of a double-pumped whispering-gallery
//! resonator with optical backscattering.
//!
//! The crate models two counter-propagating optical modes (cw, ccw) coupled
//! to one mechanical breathing mode. A backscattering coupling `J` mixes the
//! optical modes and the two drive phases act as a synthetic gauge flux
//! through the resulting three-mode loop. The pipeline is:
//!
//! 1. [`params`] — raw inputs to derived rates (cavity frequency, decay,
//!    single-photon coupling, drive amplitudes, thermal occupation),
//! 2. [`steady`] — self-consistent classical steady state (α_cw, α_ccw, q_s),
//! 3. [`linear`] — linearized drift/diffusion matrices, characteristic
//!    polynomial, Routh-Hurwitz and eigenvalue stability certification,
//! 4. [`gaussian`] — Lyapunov solve for the 6×6 covariance matrix,
//!    logarithmic negativity and two-mode squeezing ellipses,
//! 5. [`oracle`] — independent brute-force recomputations of the covariance
//!    matrix (moment ODE, matrix-exponential quadrature) used for
//!    verification,
//! 6. [`sweep`] — parameter grids, scenario presets, and deterministic
//!    parallel execution.
//!
//! Quadrature ordering is `(δX_cw, δY_cw, δX_ccw, δY_ccw, δq, δp)` throughout
//! and the vacuum variance is 1/2 per quadrature.

pub mod config;
pub mod gaussian;
pub mod linear;
pub mod oracle;
pub mod params;
pub mod steady;
pub mod sweep;

pub use config::{apply_override, set_path, Config, Resolved};
pub use gaussian::{
    log_negativity, reduce_cm, solve_lyapunov, wigner_ellipse, Bipartition, CovarianceMatrix,
    EntanglementResult, QuadPair, ReducedCM, SqueezingEllipse,
};
pub use linear::{
    build_linear_model, characteristic_coefficients, eigen_stability, routh_hurwitz, LinearModel,
    StabilityReport,
};
pub use oracle::{expm, integral_form_cm, integrate_moments, MomentTrajectory};
pub use params::{
    derive_constants, CouplingJ, DerivedParams, Detuning, DriveConfig, FrequencyConvention,
    SystemParams,
};
pub use steady::{intracavity_photons, solve_steady_state, SteadyState};
pub use sweep::{
    evaluate_point, extract, run_sweep, scenario, Axis, OutputKind, PointEval, Row, Scale, Status,
    SweepResult, SweepSpec,
};

/// Errors produced anywhere in the pipeline.
///
/// The CLI maps [`Error::InvalidParameter`] and [`Error::Config`] to exit
/// code 1 (validation) and everything else to exit code 2 (numerical).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A raw input failed validation; names the offending field.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// The steady-state iteration exhausted its budget. Carries the residual
    /// history so callers can distinguish stall from oscillation.
    #[error(
        "steady state did not converge after {iterations} iterations (last residual {last:e})"
    )]
    NoConvergence {
        iterations: usize,
        last: f64,
        residual_history: Vec<f64>,
    },

    /// An operation that requires a dynamically stable model was called on an
    /// unstable one (no stationary covariance exists).
    #[error("model is dynamically unstable (max Re eigenvalue = {max_real_part:e} rad/s)")]
    Unstable { max_real_part: f64 },

    /// Linear-algebra or integration failure.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A covariance matrix (or a derived block) violates the symplectic
    /// physicality bound beyond tolerance.
    #[error("unphysical covariance data: {0}")]
    Physicality(String),

    /// Configuration file / override parsing problem.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
