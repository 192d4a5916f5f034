//! Steady-state covariance matrix and Gaussian diagnostics: logarithmic
//! negativity and two-mode squeezing ellipses.
//!
//! The stationary second moments solve the Lyapunov equation
//! AV + VAᵀ = −D. Vacuum variance is 1/2 per quadrature, so the two-mode
//! entanglement threshold is ν⁻ < 1/2 and the vacuum Wigner 1/e contour is
//! the unit circle.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, Matrix6, SMatrix};
use serde::Serialize;

use crate::linear::{eigen_stability, LinearModel};
use crate::{Error, Result};

/// Relative Frobenius residual bound for the Lyapunov solution.
const LYAPUNOV_RESIDUAL_TOL: f64 = 1e-10;
/// Symmetry defect bound on V (absolute).
const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalue floor for the physicality test of V + (i/2)Ω.
const PHYSICALITY_TOL: f64 = -1e-8;
/// Margin below the vacuum variance 1/2 that counts as squeezed.
const SQUEEZING_MARGIN: f64 = 1e-8;

/// 6×6 covariance matrix over (δX_cw, δY_cw, δX_ccw, δY_ccw, δq, δp).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceMatrix {
    /// Second moments, symmetric.
    pub v: Matrix6<f64>,
}

/// Bipartition selecting one optical mode against the mechanical mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bipartition {
    /// cw optical mode × mechanics: rows/columns {1, 2, 5, 6} (1-based).
    CwMech,
    /// ccw optical mode × mechanics: rows/columns {3, 4, 5, 6} (1-based).
    CcwMech,
}

impl Bipartition {
    /// 0-based row/column indices into the 6×6 covariance matrix.
    pub fn indices(self) -> [usize; 4] {
        match self {
            Bipartition::CwMech => [0, 1, 4, 5],
            Bipartition::CcwMech => [2, 3, 4, 5],
        }
    }

    /// Stable label for output columns.
    pub fn label(self) -> &'static str {
        match self {
            Bipartition::CwMech => "cw",
            Bipartition::CcwMech => "ccw",
        }
    }
}

/// Reduced 4×4 covariance matrix of one optical–mechanical bipartition, in
/// block form [[𝒜, 𝒞], [𝒞ᵀ, ℬ]].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedCM {
    /// The principal 4×4 submatrix.
    pub vp: Matrix4<f64>,
    /// Which bipartition the rows/columns were selected from.
    pub bipartition: Bipartition,
}

impl ReducedCM {
    /// Optical-mode block 𝒜.
    pub fn block_a(&self) -> Matrix2<f64> {
        self.vp.fixed_view::<2, 2>(0, 0).into_owned()
    }

    /// Mechanical block ℬ.
    pub fn block_b(&self) -> Matrix2<f64> {
        self.vp.fixed_view::<2, 2>(2, 2).into_owned()
    }

    /// Cross-correlation block 𝒞.
    pub fn block_c(&self) -> Matrix2<f64> {
        self.vp.fixed_view::<2, 2>(0, 2).into_owned()
    }
}

/// Logarithmic negativity and the partial-transpose symplectic eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementResult {
    /// E_N = max(0, −ln 2ν⁻).
    pub e_n: f64,
    /// Smallest symplectic eigenvalue ν⁻ of the partially transposed CM.
    pub nu_minus: f64,
    /// Σ(V′) = det𝒜 + detℬ − 2det𝒞.
    pub sigma: f64,
}

/// Quadrature pair for a Wigner-marginal squeezing ellipse, relative to the
/// bipartition of the reduced CM (mode j = cw or ccw).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadPair {
    /// (δq, δX_j) — the cross pair plotted in the squeezing figures.
    QX,
    /// (δq, δY_j).
    QY,
    /// (δq, δp) — the mechanical phase plane.
    QP,
    /// (δX_j, δY_j) — the optical phase plane.
    XY,
}

impl QuadPair {
    /// Index pair into the reduced CM ordering (X_j, Y_j, q, p).
    fn indices(self) -> (usize, usize) {
        match self {
            QuadPair::QX => (2, 0),
            QuadPair::QY => (2, 1),
            QuadPair::QP => (2, 3),
            QuadPair::XY => (0, 1),
        }
    }

    /// Stable label for output columns.
    pub fn label(self) -> &'static str {
        match self {
            QuadPair::QX => "q_x",
            QuadPair::QY => "q_y",
            QuadPair::QP => "q_p",
            QuadPair::XY => "x_y",
        }
    }
}

/// 1/e Wigner contour of a two-quadrature marginal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezingEllipse {
    /// The 2×2 marginal covariance.
    pub sub_cm: Matrix2<f64>,
    /// (major, minor) semi-axes; the vacuum reference circle has radius 1.
    pub semi_axes: (f64, f64),
    /// Orientation of the major axis (rad).
    pub angle: f64,
    /// Minor semi-axis below the vacuum radius: min eigenvalue < 1/2 − 10⁻⁸.
    pub squeezed: bool,
}

impl SqueezingEllipse {
    /// Gaussian Wigner density of the marginal at displacement (u, v) from
    /// the mean. Only used for plot-data export; the analysis is closed-form.
    pub fn wigner_at(&self, u: f64, v: f64) -> f64 {
        let det = self.sub_cm.determinant();
        let inv = self.sub_cm.try_inverse().unwrap_or_else(Matrix2::zeros);
        let quad = inv[(0, 0)] * u * u + 2.0 * inv[(0, 1)] * u * v + inv[(1, 1)] * v * v;
        (-0.5 * quad).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
    }
}

impl CovarianceMatrix {
    /// The vacuum state: variance 1/2 per quadrature, no correlations.
    pub fn vacuum() -> Self {
        CovarianceMatrix {
            v: Matrix6::identity() * 0.5,
        }
    }

    /// Largest |V − Vᵀ| entry; the constructor symmetrizes, so this is only
    /// nonzero for externally supplied matrices.
    pub fn symmetry_defect(&self) -> f64 {
        (self.v - self.v.transpose()).abs().max()
    }

    /// Smallest eigenvalue of V + (i/2)Ω, computed through the real
    /// symmetric 12×12 embedding [[V, −Ω/2], [Ω/2, V]].
    pub fn physicality_margin(&self) -> f64 {
        let omega = symplectic_form();
        let mut embed = SMatrix::<f64, 12, 12>::zeros();
        embed.view_mut((0, 0), (6, 6)).copy_from(&self.v);
        embed.view_mut((6, 6), (6, 6)).copy_from(&self.v);
        embed.view_mut((0, 6), (6, 6)).copy_from(&(-0.5 * omega));
        embed.view_mut((6, 0), (6, 6)).copy_from(&(0.5 * omega));
        embed.symmetric_eigenvalues().min()
    }

    /// Physicality: V + (i/2)Ω ⪰ 0 within tolerance.
    pub fn is_physical(&self) -> bool {
        self.physicality_margin() >= PHYSICALITY_TOL
    }
}

/// Standard symplectic form for three modes: blkdiag of [[0, 1], [−1, 0]].
fn symplectic_form() -> Matrix6<f64> {
    let mut omega = Matrix6::zeros();
    for k in 0..3 {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Solve AV + VAᵀ = −D for the stationary covariance matrix.
///
/// The equation is vectorized into a dense 36×36 system solved by LU with
/// partial pivoting; the result is symmetrized and validated (residual,
/// symmetry, physicality). Errors if the model is dynamically unstable,
/// since no stationary state exists there.
pub fn solve_lyapunov(model: &LinearModel) -> Result<CovarianceMatrix> {
    let report = eigen_stability(model)?;
    if report.max_real_part >= 0.0 {
        return Err(Error::Unstable {
            max_real_part: report.max_real_part,
        });
    }

    let a = &model.drift;
    let d = &model.diffusion;
    // vec(AV + VAᵀ) = (I⊗A + A⊗I) vec(V), column-major vec.
    let id = Matrix6::<f64>::identity();
    let big = id.kronecker(a) + a.kronecker(&id);
    let big = DMatrix::from_iterator(36, 36, big.iter().copied());
    let rhs = DVector::from_iterator(36, d.iter().map(|x| -x));
    let lu = big.lu();
    let sol = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular vectorized Lyapunov system".into()))?;
    let mut v = Matrix6::from_iterator(sol.iter().copied());
    v = 0.5 * (v + v.transpose());

    let residual = (a * v + v * a.transpose() + d).norm() / d.norm();
    if residual > LYAPUNOV_RESIDUAL_TOL {
        return Err(Error::Numerical(format!(
            "Lyapunov residual {residual:e} exceeds {LYAPUNOV_RESIDUAL_TOL:e}"
        )));
    }
    let cm = CovarianceMatrix { v };
    if cm.symmetry_defect() > SYMMETRY_TOL {
        return Err(Error::Numerical(format!(
            "covariance symmetry defect {:e} exceeds {SYMMETRY_TOL:e}",
            cm.symmetry_defect()
        )));
    }
    if !cm.is_physical() {
        return Err(Error::Physicality(format!(
            "min eig of V + (i/2)Ω = {:e} below {PHYSICALITY_TOL:e}",
            cm.physicality_margin()
        )));
    }
    Ok(cm)
}

/// Select the 4×4 principal submatrix of the given bipartition.
pub fn reduce_cm(cm: &CovarianceMatrix, bipartition: Bipartition) -> ReducedCM {
    let idx = bipartition.indices();
    let vp = Matrix4::from_fn(|i, j| cm.v[(idx[i], idx[j])]);
    ReducedCM { vp, bipartition }
}

/// Logarithmic negativity from the reduced CM closed forms:
/// Σ = det𝒜 + detℬ − 2det𝒞, ν⁻ = √((Σ − √(Σ² − 4detV′))/2),
/// E_N = max(0, −ln 2ν⁻).
pub fn log_negativity(reduced: &ReducedCM) -> Result<EntanglementResult> {
    let det_a = reduced.block_a().determinant();
    let det_b = reduced.block_b().determinant();
    let det_c = reduced.block_c().determinant();
    let det_v = reduced.vp.determinant();
    let sigma = det_a + det_b - 2.0 * det_c;

    let disc = sigma * sigma - 4.0 * det_v;
    let disc_floor = -1e-12 * (sigma * sigma).max(1.0);
    if disc < disc_floor {
        return Err(Error::Physicality(format!(
            "negative discriminant Σ²−4detV′ = {disc:e} signals an unphysical reduced CM"
        )));
    }
    let nu_sq = 0.5 * (sigma - disc.max(0.0).sqrt());
    if nu_sq < -1e-12 {
        return Err(Error::Physicality(format!(
            "negative ν⁻² = {nu_sq:e} signals an unphysical reduced CM"
        )));
    }
    let nu_minus = nu_sq.max(0.0).sqrt();
    let e_n = (-(2.0 * nu_minus).ln()).max(0.0);
    Ok(EntanglementResult {
        e_n,
        nu_minus,
        sigma,
    })
}

/// Marginalize the Wigner function onto a quadrature pair: extract the 2×2
/// sub-CM, diagonalize, and report the 1/e contour ellipse. Semi-axes are
/// √(2·eigenvalues); squeezed means min eigenvalue < 1/2 − 10⁻⁸.
pub fn wigner_ellipse(reduced: &ReducedCM, pair: QuadPair) -> Result<SqueezingEllipse> {
    let (i, j) = pair.indices();
    let sub_cm = Matrix2::new(
        reduced.vp[(i, i)],
        reduced.vp[(i, j)],
        reduced.vp[(j, i)],
        reduced.vp[(j, j)],
    );
    if !(sub_cm[(0, 0)] > 0.0 && sub_cm.determinant() > 0.0) {
        return Err(Error::Physicality(format!(
            "marginal covariance not positive definite: diag=({:e}, {:e}), det={:e}",
            sub_cm[(0, 0)],
            sub_cm[(1, 1)],
            sub_cm.determinant()
        )));
    }
    // Closed-form symmetric 2×2 eigenvalues.
    let half_trace = 0.5 * (sub_cm[(0, 0)] + sub_cm[(1, 1)]);
    let half_gap = 0.5 * (sub_cm[(0, 0)] - sub_cm[(1, 1)]);
    let radius = (half_gap * half_gap + sub_cm[(0, 1)] * sub_cm[(0, 1)]).sqrt();
    let (lo, hi) = (half_trace - radius, half_trace + radius);
    let angle = 0.5 * (2.0 * sub_cm[(0, 1)]).atan2(sub_cm[(0, 0)] - sub_cm[(1, 1)]);
    Ok(SqueezingEllipse {
        sub_cm,
        semi_axes: ((2.0 * hi).sqrt(), (2.0 * lo).sqrt()),
        angle,
        squeezed: lo < 0.5 - SQUEEZING_MARGIN,
    })
}
