//! Self-consistent classical steady state (α_cw, α_ccw, q_s).
//!
//! The mean values obey closed forms at fixed effective detuning
//! Δ = Δ_c − G₀ q_s, while q_s itself is set by the circulating power, so the
//! solution is a fixed point of the scalar map
//! q ↦ G₀(|α_cw(q)|² + |α_ccw(q)|²)/ω_m.

use num_complex::Complex64;
use serde::Serialize;

use crate::params::{DerivedParams, DriveConfig};
use crate::{Error, Result};

/// Relative step tolerance for the damped iteration.
const STEP_TOL: f64 = 1e-13;
/// Residual acceptance threshold, mixed absolute/relative.
const RESIDUAL_TOL: f64 = 1e-10;
/// Iteration budget before falling back to bisection.
const MAX_ITER: usize = 10_000;
/// Sample count for the bisection bracket scan.
const SCAN_SAMPLES: usize = 4097;

/// Classical steady state of the driven three-mode system.
#[derive(Debug, Clone, Serialize)]
pub struct SteadyState {
    /// Intracavity amplitude of the cw mode (√photons).
    pub alpha_cw: Complex64,
    /// Intracavity amplitude of the ccw mode (√photons).
    pub alpha_ccw: Complex64,
    /// Dimensionless mechanical displacement.
    pub q_s: f64,
    /// Dimensionless mechanical momentum; identically 0 in steady state.
    pub p_s: f64,
    /// Effective detuning Δ = Δ_c − G₀ q_s (rad/s).
    pub delta_eff: f64,
    /// Intracavity photon number |α_cw|².
    pub photons_cw: f64,
    /// Intracavity photon number |α_ccw|².
    pub photons_ccw: f64,
    /// Final self-consistency residual |q_s − G₀(…)/ω_m|.
    pub residual: f64,
    /// Iterations consumed by the damped fixed point (0 if bisection solved).
    pub iterations: usize,
    /// All fixed-point roots found when the bracket scan detects more than
    /// one; the returned state uses the smallest (adiabatic turn-on branch).
    pub multistable_roots: Option<Vec<f64>>,
}

/// Closed-form intracavity amplitudes at a given mechanical displacement.
///
/// Both carry the global factor e^{−iθ_ccw}; it cancels in every observable
/// but is kept so the returned phases honor the configured drive phases
/// literally.
pub(crate) fn amplitudes_at(
    derived: &DerivedParams,
    (theta_cw, theta_ccw): (f64, f64),
    q: f64,
) -> (Complex64, Complex64) {
    let delta = derived.delta_c - derived.g0 * q;
    let theta = theta_cw - theta_ccw;
    let i = Complex64::I;
    let line = i * delta + derived.gamma;
    let den = line * line + derived.j * derived.j;
    let e_cw = derived.eps_cw * (-i * theta).exp();
    let gauge = (-i * theta_ccw).exp();
    let alpha_cw = gauge * (e_cw * line - i * derived.j * derived.eps_ccw) / den;
    let alpha_ccw = gauge * (derived.eps_ccw * line - i * derived.j * e_cw) / den;
    (alpha_cw, alpha_ccw)
}

fn radiation_pressure_q(derived: &DerivedParams, phases: (f64, f64), q: f64) -> f64 {
    let (a, b) = amplitudes_at(derived, phases, q);
    derived.g0 * (a.norm_sqr() + b.norm_sqr()) / derived.omega_m
}

/// Solve the coupled system {α_j(Δ), q_s(α), Δ(q_s)}.
///
/// Damped fixed-point iteration (β = 1/2) from q_s = 0 selects the branch
/// reached by adiabatic turn-on; if the iteration stalls, a bracket scan plus
/// bisection takes over, returning the smallest root and attaching all roots
/// as a multistability warning when more than one exists.
pub fn solve_steady_state(derived: &DerivedParams, drive: &DriveConfig) -> Result<SteadyState> {
    let phases = (drive.phase_cw, drive.phase_ccw);
    let mut q = 0.0_f64;
    let mut converged = false;
    let mut iterations = 0;
    let mut residual_history = Vec::new();
    for k in 1..=MAX_ITER {
        let target = radiation_pressure_q(derived, phases, q);
        residual_history.push((q - target).abs());
        let next = 0.5 * q + 0.5 * target;
        let done = (next - q).abs() <= STEP_TOL * next.abs().max(1.0);
        q = next;
        if done {
            converged = true;
            iterations = k;
            break;
        }
    }

    let residual_at = |q: f64| q - radiation_pressure_q(derived, phases, q);
    let mut multistable_roots = None;
    let mut residual = residual_at(q).abs();

    if !converged || residual > RESIDUAL_TOL * q.abs().max(1.0) {
        // Bracket scan over the physically reachable range: |α_j|² is bounded
        // by (ε_cw² + ε_ccw²)/Γ² up to O(1) interference factors.
        let hi = 8.0 * derived.g0 * (derived.eps_cw.powi(2) + derived.eps_ccw.powi(2))
            / (derived.gamma * derived.gamma)
            / derived.omega_m
            + 1.0;
        let mut roots = Vec::new();
        let mut prev_q = 0.0;
        let mut prev_f = residual_at(0.0);
        if prev_f == 0.0 {
            roots.push(0.0);
        }
        for k in 1..SCAN_SAMPLES {
            let qk = hi * k as f64 / (SCAN_SAMPLES - 1) as f64;
            let fk = residual_at(qk);
            if prev_f.signum() != fk.signum() {
                roots.push(bisect(&residual_at, prev_q, qk));
            }
            prev_q = qk;
            prev_f = fk;
        }
        match roots.len() {
            0 => {
                let last = residual_history.last().copied().unwrap_or(f64::NAN);
                return Err(Error::NoConvergence {
                    iterations: MAX_ITER,
                    last,
                    residual_history,
                });
            }
            1 => {}
            _ => multistable_roots = Some(roots.clone()),
        }
        q = roots[0];
        iterations = 0;
        residual = residual_at(q).abs();
        if residual > RESIDUAL_TOL * q.abs().max(1.0) {
            return Err(Error::NoConvergence {
                iterations: MAX_ITER,
                last: residual,
                residual_history,
            });
        }
    }

    let (alpha_cw, alpha_ccw) = amplitudes_at(derived, phases, q);
    Ok(SteadyState {
        alpha_cw,
        alpha_ccw,
        q_s: q,
        p_s: 0.0,
        delta_eff: derived.delta_c - derived.g0 * q,
        photons_cw: alpha_cw.norm_sqr(),
        photons_ccw: alpha_ccw.norm_sqr(),
        residual,
        iterations,
        multistable_roots,
    })
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Intracavity photon numbers (𝒩_cw, 𝒩_ccw) = (|α_cw|², |α_ccw|²).
pub fn intracavity_photons(state: &SteadyState) -> (f64, f64) {
    (state.photons_cw, state.photons_ccw)
}
