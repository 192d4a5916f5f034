//! Linearized fluctuation dynamics: drift/diffusion matrices and stability
//! certification by eigenvalues and by Routh-Hurwitz determinants.
//!
//! Fluctuation ordering is u = (δX_cw, δY_cw, δX_ccw, δY_ccw, δq, δp) with
//! u̇ = A u + noise and noise correlations D (both real 6×6).

use nalgebra::{DMatrix, Matrix6, SMatrix};
use num_complex::Complex64;
use serde::Serialize;

use crate::params::DerivedParams;
use crate::steady::SteadyState;
use crate::{Error, Result};

/// Neutral-stability classification margin, relative to ω_m.
const STABILITY_MARGIN: f64 = 1e-6;

/// Drift and diffusion matrices plus the effective couplings they contain.
#[derive(Debug, Clone, Serialize)]
pub struct LinearModel {
    /// Drift matrix A.
    pub drift: Matrix6<f64>,
    /// Diffusion matrix D = Diag[Γ, Γ, Γ, Γ, 0, γ_m(2n_m+1)].
    pub diffusion: Matrix6<f64>,
    /// Effective coupling G_cw = √2·G₀·α_cw = G_cw^x + iG_cw^y (rad/s).
    pub g_cw: Complex64,
    /// Effective coupling G_ccw = √2·G₀·α_ccw (rad/s).
    pub g_ccw: Complex64,
    /// Effective detuning Δ (rad/s).
    pub delta_eff: f64,
    /// Total optical decay Γ (rad/s).
    pub gamma: f64,
    /// Backscattering coupling J (rad/s).
    pub j: f64,
    /// Mechanical frequency ω_m (rad/s).
    pub omega_m: f64,
    /// Mechanical damping γ_m (rad/s).
    pub gamma_m: f64,
}

/// Stability certification by two independent routes.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    /// Eigenvalues of A.
    pub eigenvalues: [Complex64; 6],
    /// Largest real part among the eigenvalues (rad/s).
    pub max_real_part: f64,
    /// Monic characteristic coefficients a₀…a₆ of det(ηI − A).
    pub char_coeffs: [f64; 7],
    /// Leading Hurwitz determinants Λ₁…Λ₆.
    pub hurwitz: [f64; 6],
    /// max Re η < −10⁻⁶·ω_m.
    pub stable_by_eigen: bool,
    /// All Λ_n > 0.
    pub stable_by_rh: bool,
}

/// Assemble A and D from the solved steady state.
pub fn build_linear_model(state: &SteadyState, derived: &DerivedParams) -> LinearModel {
    let g_cw = std::f64::consts::SQRT_2 * derived.g0 * state.alpha_cw;
    let g_ccw = std::f64::consts::SQRT_2 * derived.g0 * state.alpha_ccw;
    let (gcx, gcy) = (g_cw.re, g_cw.im);
    let (glx, gly) = (g_ccw.re, g_ccw.im);
    let (gamma, j, delta) = (derived.gamma, derived.j, state.delta_eff);
    let (wm, gm) = (derived.omega_m, derived.gamma_m);
    #[rustfmt::skip]
    let drift = Matrix6::new(
        -gamma,  delta,    0.0,      j,   -gcy,  0.0,
        -delta, -gamma,     -j,    0.0,    gcx,  0.0,
           0.0,      j, -gamma,  delta,   -gly,  0.0,
            -j,    0.0, -delta, -gamma,    glx,  0.0,
           0.0,    0.0,    0.0,    0.0,    0.0,   wm,
           gcx,    gcy,    glx,    gly,    -wm,  -gm,
    );
    let diffusion = Matrix6::from_diagonal(
        &[
            gamma,
            gamma,
            gamma,
            gamma,
            0.0,
            gm * (2.0 * derived.n_m + 1.0),
        ]
        .into(),
    );
    LinearModel {
        drift,
        diffusion,
        g_cw,
        g_ccw,
        delta_eff: delta,
        gamma,
        j,
        omega_m: wm,
        gamma_m: gm,
    }
}

/// Closed-form monic characteristic coefficients a₀…a₆ of det(ηI − A).
///
/// Implemented verbatim from the model's published coefficient list (not
/// re-derived); the test suite cross-checks them against a numerically
/// expanded characteristic polynomial on random parameter draws.
pub fn characteristic_coefficients(model: &LinearModel) -> [f64; 7] {
    let g = model.gamma;
    let gm = model.gamma_m;
    let j = model.j;
    let d = model.delta_eff;
    let wm = model.omega_m;
    let (gcx, gcy) = (model.g_cw.re, model.g_cw.im);
    let (glx, gly) = (model.g_ccw.re, model.g_ccw.im);

    let j2 = j * j;
    let j3 = j2 * j;
    let j4 = j2 * j2;
    let d2 = d * d;
    let d3 = d2 * d;
    let d4 = d2 * d2;
    let g2 = g * g;
    let g3 = g2 * g;
    let g4 = g2 * g2;
    let wm2 = wm * wm;
    let gcx2 = gcx * gcx;
    let gcy2 = gcy * gcy;
    let glx2 = glx * glx;
    let gly2 = gly * gly;

    let a0 = 1.0;
    let a1 = 4.0 * g + gm;
    let a2 = 2.0 * j2 + 2.0 * d2 + 4.0 * gm * g + 6.0 * g2 + wm2;
    let a3 = 2.0 * j2 * gm
        + 2.0 * gm * d2
        + 4.0 * j2 * g
        + 4.0 * d2 * g
        + 6.0 * gm * g2
        + 4.0 * g3
        + 4.0 * g * wm2;
    let a4 = j4 - 2.0 * j2 * d2
        + d4
        + 4.0 * j2 * gm * g
        + 4.0 * gm * d2 * g
        + 2.0 * j2 * g2
        + 2.0 * d2 * g2
        + 4.0 * gm * g3
        - 2.0 * gcx * glx * j * wm
        - 2.0 * gcy * gly * j * wm
        - glx2 * d * wm
        - gcx2 * d * wm
        - gly2 * d * wm
        - gcy2 * d * wm
        + g4
        + 6.0 * g2 * wm2
        + 2.0 * d2 * wm2
        + 2.0 * j2 * wm2;
    let a5 = j4 * gm - 2.0 * j2 * gm * d2 + gm * d4 + 2.0 * j2 * gm * g2
        - 4.0 * gcy * gly * j * g * wm
        + 2.0 * gm * d2 * g2
        + gm * g4
        - 4.0 * gcx * glx * j * g * wm
        + 4.0 * j2 * g * wm2
        - 2.0 * glx2 * d * g * wm
        - 2.0 * gcx2 * d * g * wm
        + 4.0 * d2 * g * wm2
        - 2.0 * gly2 * d * g * wm
        - 2.0 * gcy2 * d * g * wm
        + 4.0 * g3 * wm2;
    let a6 = -2.0 * gcy * gly * j * g2 * wm
        - glx2 * g2 * d * wm
        - 2.0 * j2 * d2 * wm2
        - gcy2 * d3 * wm
        - 2.0 * gcx * glx * j * g2 * wm
        + d4 * wm2
        + 2.0 * j2 * wm2 * g2
        + 2.0 * gcx * glx * j * d2 * wm
        + 2.0 * gcy * gly * j * d2 * wm
        - gly2 * d3 * wm
        - 2.0 * gcx * glx * j3 * wm
        - 2.0 * gcy * gly * j3 * wm
        + gcy2 * j2 * d * wm
        + glx2 * j2 * d * wm
        + gcx2 * j2 * d * wm
        + gly2 * j2 * d * wm
        + 2.0 * d2 * g2 * wm2
        - glx2 * d3 * wm
        - gcx2 * d3 * wm
        + wm2 * g4
        + j4 * wm2
        - gcx2 * g2 * d * wm
        - gly2 * g2 * d * wm
        - gcy2 * g2 * d * wm;

    [a0, a1, a2, a3, a4, a5, a6]
}

/// Hurwitz matrix entry H[i][j] = a_{2i−j} (1-indexed), zero outside 0…6.
fn hurwitz_matrix(coeffs: &[f64; 7]) -> Matrix6<f64> {
    Matrix6::from_fn(|i, j| {
        let k = 2 * (i as i64 + 1) - (j as i64 + 1);
        if (0..=6).contains(&k) {
            coeffs[k as usize]
        } else {
            0.0
        }
    })
}

/// Leading Hurwitz determinants Λ₁…Λ₆ and the all-positive verdict.
pub fn routh_hurwitz(coeffs: &[f64; 7]) -> ([f64; 6], bool) {
    let h = hurwitz_matrix(coeffs);
    let mut lambdas = [0.0_f64; 6];
    for n in 1..=6 {
        let minor = DMatrix::from_fn(n, n, |i, j| h[(i, j)]);
        lambdas[n - 1] = if n == 1 {
            h[(0, 0)]
        } else {
            minor.lu().determinant()
        };
    }
    let stable = lambdas.iter().all(|&l| l > 0.0);
    (lambdas, stable)
}

/// Full stability report: eigenvalues plus Routh-Hurwitz, with a neutral
/// margin of 10⁻⁶·ω_m on the eigenvalue classification.
pub fn eigen_stability(model: &LinearModel) -> Result<StabilityReport> {
    let eigs = model.drift.complex_eigenvalues();
    let mut eigenvalues = [Complex64::ZERO; 6];
    for (slot, e) in eigenvalues.iter_mut().zip(eigs.iter()) {
        *slot = Complex64::new(e.re, e.im);
    }
    let max_real_part = eigenvalues
        .iter()
        .map(|e| e.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if !max_real_part.is_finite() {
        return Err(Error::Numerical(
            "eigenvalue computation returned non-finite values".into(),
        ));
    }
    let char_coeffs = characteristic_coefficients(model);
    let (hurwitz, stable_by_rh) = routh_hurwitz(&char_coeffs);
    Ok(StabilityReport {
        eigenvalues,
        max_real_part,
        char_coeffs,
        hurwitz,
        stable_by_eigen: max_real_part < -STABILITY_MARGIN * model.omega_m,
        stable_by_rh,
    })
}

/// Numerically expanded monic characteristic coefficients of `m`, via the
/// Faddeev–LeVerrier recursion. Used as the independent oracle for
/// [`characteristic_coefficients`].
pub fn faddeev_leverrier(m: &Matrix6<f64>) -> [f64; 7] {
    // c_k from M_k = A·M_{k-1} + c_{k-1}·I, c_k = -tr(A·M_{k-1} + c_{k-1}I)/k
    let mut coeffs = [0.0_f64; 7];
    coeffs[0] = 1.0;
    let mut mk: SMatrix<f64, 6, 6> = SMatrix::zeros();
    for k in 1..=6 {
        mk = m * mk + SMatrix::identity() * coeffs[k - 1];
        coeffs[k] = -(m * mk).trace() / k as f64;
    }
    coeffs
}
