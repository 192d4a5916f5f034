//! Brute-force verification paths for the covariance pipeline.
//!
//! Two independent routes to the stationary covariance matrix:
//!
//! 1. time integration of the moment ODE dV/dt = AV + VAᵀ + D with a
//!    classical fixed-step 4th-order Runge–Kutta scheme, and
//! 2. quadrature of V = ∫₀^∞ M(τ) D Mᵀ(τ) dτ with M(t) = exp(At) via
//!    composite Simpson on a truncated interval.
//!
//! Neither shares code with the algebraic Lyapunov solver (the matrix
//! exponential here is a self-contained Padé scaling-and-squaring
//! implementation); that independence is the point.

use nalgebra::Matrix6;

use crate::gaussian::CovarianceMatrix;
use crate::linear::LinearModel;
use crate::{Error, Result};

/// Divergence guard: abort when ‖V(t)‖_F exceeds this multiple of the
/// starting scale.
const DIVERGENCE_FACTOR: f64 = 1e6;
/// Cap on stored snapshots; intermediate steps are thinned to this many.
const MAX_SNAPSHOTS: usize = 256;

/// Time-resolved second moments V(t) from the moment ODE.
#[derive(Debug, Clone)]
pub struct MomentTrajectory {
    /// Snapshot times (s), strictly increasing, ending at t_final.
    pub times: Vec<f64>,
    /// Symmetric 6×6 moment matrices, one per snapshot time.
    pub cms: Vec<Matrix6<f64>>,
}

impl MomentTrajectory {
    /// Final moment matrix, the oracle steady state.
    pub fn final_cm(&self) -> CovarianceMatrix {
        CovarianceMatrix {
            v: *self.cms.last().expect("trajectory holds at least V0"),
        }
    }
}

/// Conservative step size for [`integrate_moments`]: 0.08/‖A‖_F, safely
/// inside the dt < 0.1/‖A‖ precondition.
pub fn default_dt(model: &LinearModel) -> f64 {
    0.08 / model.drift.norm()
}

/// Integration horizon reaching ~e⁻²⁵ transient decay: 25/|max Re η|.
pub fn default_t_final(model: &LinearModel) -> Result<f64> {
    let report = crate::linear::eigen_stability(model)?;
    if report.max_real_part >= 0.0 {
        return Err(Error::Unstable {
            max_real_part: report.max_real_part,
        });
    }
    Ok(25.0 / report.max_real_part.abs())
}

/// Quadrature horizon for [`integral_form_cm`]: 30/|max Re η|.
pub fn default_t_max(model: &LinearModel) -> Result<f64> {
    default_t_final(model).map(|t| t * (30.0 / 25.0))
}

/// Integrate dV/dt = AV + VAᵀ + D from `v0` with classical RK4.
///
/// `dt` must satisfy dt < 0.1/‖A‖ (Frobenius) and `t_final ≥ 20/|max Re η|`
/// for stable models (for unstable models the horizon precondition is
/// waived; the divergence guard is the expected exit). Snapshots are thinned
/// to at most a few hundred; the final state is always stored exactly.
pub fn integrate_moments(
    model: &LinearModel,
    v0: &CovarianceMatrix,
    t_final: f64,
    dt: f64,
) -> Result<MomentTrajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "dt",
            reason: format!("must be positive and finite, got {dt}"),
        });
    }
    let fro = model.drift.norm();
    if dt >= 0.1 / fro {
        return Err(Error::InvalidParameter {
            field: "dt",
            reason: format!("dt = {dt:e} violates dt < 0.1/||A|| = {:e}", 0.1 / fro),
        });
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "t_final",
            reason: format!("must be positive and finite, got {t_final}"),
        });
    }
    if let Ok(report) = crate::linear::eigen_stability(model) {
        if report.max_real_part < 0.0 {
            let horizon = 20.0 / report.max_real_part.abs();
            if t_final < horizon {
                return Err(Error::InvalidParameter {
                    field: "t_final",
                    reason: format!(
                        "t_final = {t_final:e} below transient horizon 20/|max Re| = {horizon:e}"
                    ),
                });
            }
        }
    }

    let a = &model.drift;
    let d = &model.diffusion;
    let rhs = |v: &Matrix6<f64>| a * v + v * a.transpose() + d;

    let n_steps = (t_final / dt).ceil() as usize;
    let stride = n_steps.div_ceil(MAX_SNAPSHOTS).max(1);
    let guard = DIVERGENCE_FACTOR * v0.v.norm().max(1.0);

    let mut v = v0.v;
    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut cms = vec![v];
    for step in 1..=n_steps {
        // Final step is shortened so the trajectory ends exactly at t_final.
        let h = dt.min(t_final - t);
        let k1 = rhs(&v);
        let k2 = rhs(&(v + 0.5 * h * k1));
        let k3 = rhs(&(v + 0.5 * h * k2));
        let k4 = rhs(&(v + h * k3));
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        v = 0.5 * (v + v.transpose());
        t += h;
        if !v.iter().all(|x| x.is_finite()) || v.norm() > guard {
            return Err(Error::Numerical(format!(
                "moment integration diverged at t = {t:e} (||V|| = {:e})",
                v.norm()
            )));
        }
        if step % stride == 0 || step == n_steps {
            times.push(t);
            cms.push(v);
        }
    }
    Ok(MomentTrajectory { times, cms })
}

/// Quadrature of V = ∫₀^{t_max} M(τ) D Mᵀ(τ) dτ by composite Simpson.
///
/// M(kh) is accumulated incrementally as powers of exp(Ah); `n_steps` is the
/// (even) number of Simpson intervals. Requires a stable model; the
/// integrand is otherwise non-integrable.
pub fn integral_form_cm(
    model: &LinearModel,
    t_max: f64,
    n_steps: usize,
) -> Result<CovarianceMatrix> {
    let report = crate::linear::eigen_stability(model)?;
    if report.max_real_part >= 0.0 {
        return Err(Error::Unstable {
            max_real_part: report.max_real_part,
        });
    }
    if n_steps < 2 || n_steps % 2 != 0 {
        return Err(Error::InvalidParameter {
            field: "n_steps",
            reason: format!("Simpson rule needs an even interval count ≥ 2, got {n_steps}"),
        });
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "t_max",
            reason: format!("must be positive and finite, got {t_max}"),
        });
    }

    let h = t_max / n_steps as f64;
    let step = expm(&(model.drift * h));
    let d = &model.diffusion;
    let integrand = |m: &Matrix6<f64>| m * d * m.transpose();

    // Simpson weights 1, 4, 2, 4, …, 4, 1 over nodes kh.
    let mut m = Matrix6::identity();
    let mut acc = integrand(&m);
    for k in 1..n_steps {
        m *= step;
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * integrand(&m);
    }
    m *= step;
    acc += integrand(&m);
    let v = acc * (h / 3.0);
    Ok(CovarianceMatrix {
        v: 0.5 * (v + v.transpose()),
    })
}

/// Matrix exponential by Padé(13) scaling and squaring.
pub fn expm(a: &Matrix6<f64>) -> Matrix6<f64> {
    const THETA_13: f64 = 5.371920351148152;
    #[rustfmt::skip]
    const B: [f64; 14] = [
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
        960960.0, 16380.0, 182.0, 1.0,
    ];

    let one_norm = (0..6)
        .map(|j| (0..6).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let squarings = if one_norm > THETA_13 {
        (one_norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let a1 = a / 2_f64.powi(squarings as i32);

    let id = Matrix6::<f64>::identity();
    let a2 = a1 * a1;
    let a4 = a2 * a2;
    let a6 = a2 * a4;
    let u = a1
        * (a6 * (B[13] * a6 + B[11] * a4 + B[9] * a2)
            + B[7] * a6
            + B[5] * a4
            + B[3] * a2
            + B[1] * id);
    let w =
        a6 * (B[12] * a6 + B[10] * a4 + B[8] * a2) + B[6] * a6 + B[4] * a4 + B[2] * a2 + B[0] * id;
    let mut r = (w - u)
        .lu()
        .solve(&(w + u))
        .expect("Padé denominator is nonsingular for scaled input");
    for _ in 0..squarings {
        r *= r;
    }
    r
}
