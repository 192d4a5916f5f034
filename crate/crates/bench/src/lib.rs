//! Shared fixtures for the pipeline benchmarks: the baseline operating
//! point, resolved once, plus its steady state and linear model.

use wgmsim::{
    build_linear_model, solve_steady_state, Config, CovarianceMatrix, LinearModel, Resolved,
    SteadyState,
};

/// Baseline double-pump configuration (θ = π/5, Δ_c/ω_m = 0.4, J = Γ).
pub fn baseline_config() -> Config {
    Config::baseline()
}

/// Resolved constants, steady state, and drift/diffusion at the baseline.
pub fn baseline_point() -> (Resolved, SteadyState, LinearModel) {
    let resolved = baseline_config().resolve().expect("baseline resolves");
    let steady =
        solve_steady_state(&resolved.derived, &resolved.drive).expect("baseline converges");
    let model = build_linear_model(&steady, &resolved.derived);
    (resolved, steady, model)
}

/// Stationary covariance at the baseline.
pub fn baseline_cm() -> CovarianceMatrix {
    let (_, _, model) = baseline_point();
    wgmsim::solve_lyapunov(&model).expect("baseline is stable")
}
