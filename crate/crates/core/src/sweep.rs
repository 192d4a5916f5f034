//! Parameter-grid execution: scenario presets, parallel evaluation of the
//! full pipeline, deterministic row-major results.
//!
//! Axis names are config paths (`drive.detuning_ratio`, `drive.theta`,
//! `system.coupling_j_ratio`, …); every path the config schema accepts can
//! be swept. Node evaluations are pure and run in parallel; results are
//! collected by index, so the output order never depends on scheduling.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::config::{set_path, Config, Resolved};
use crate::gaussian::{
    log_negativity, reduce_cm, solve_lyapunov, wigner_ellipse, Bipartition, CovarianceMatrix,
    EntanglementResult, QuadPair,
};
use crate::linear::{build_linear_model, eigen_stability, StabilityReport};
use crate::steady::{solve_steady_state, SteadyState};
use crate::{Error, Result};

/// Default grid-size budget.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Axis spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

impl Scale {
    /// Stable label used in provenance and CLI axis specs.
    pub fn label(self) -> &'static str {
        match self {
            Scale::Linear => "linear",
            Scale::Log => "log",
        }
    }
}

/// One swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    /// Config path of the parameter, e.g. `drive.detuning_ratio`.
    pub name: String,
    pub min: f64,
    pub max: f64,
    /// Number of grid points (≥ 2).
    pub count: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn linear(name: &str, min: f64, max: f64, count: usize) -> Self {
        Axis {
            name: name.into(),
            min,
            max,
            count,
            scale: Scale::Linear,
        }
    }

    pub fn log(name: &str, min: f64, max: f64, count: usize) -> Self {
        Axis {
            name: name.into(),
            min,
            max,
            count,
            scale: Scale::Log,
        }
    }

    /// Column name in outputs: the last path segment.
    pub fn column(&self) -> &str {
        self.name.rsplit('.').next().unwrap_or(&self.name)
    }

    /// Grid values; endpoints are exactly `min` and `max`.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|k| {
                if k == 0 {
                    self.min
                } else if k == n - 1 {
                    self.max
                } else {
                    let t = k as f64 / (n - 1) as f64;
                    match self.scale {
                        Scale::Linear => self.min + t * (self.max - self.min),
                        Scale::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                    }
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidParameter {
                field: "axis.count",
                reason: format!("axis `{}` needs ≥ 2 points, got {}", self.name, self.count),
            });
        }
        if self.min >= self.max || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::InvalidParameter {
                field: "axis.range",
                reason: format!(
                    "axis `{}` needs finite min < max, got [{}, {}]",
                    self.name, self.min, self.max
                ),
            });
        }
        if self.scale == Scale::Log && self.min <= 0.0 {
            return Err(Error::InvalidParameter {
                field: "axis.range",
                reason: format!(
                    "axis `{}` is log-scaled and needs min > 0, got {}",
                    self.name, self.min
                ),
            });
        }
        Ok(())
    }
}

/// Requested output quantity; one CSV/JSON column each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    /// Logarithmic negativity, cw–mechanics.
    EnCw,
    /// Logarithmic negativity, ccw–mechanics.
    EnCcw,
    NuMinusCw,
    NuMinusCcw,
    PhotonsCw,
    PhotonsCcw,
    /// Steady mechanical displacement q_s.
    QS,
    /// Sixth Routh–Hurwitz determinant.
    Lambda6,
    /// Largest real part of the drift eigenvalues.
    MaxRealPart,
    /// Major semi-axis of the 1/e Wigner ellipse of the given marginal.
    EllipseMajor(Bipartition, QuadPair),
    /// Minor semi-axis.
    EllipseMinor(Bipartition, QuadPair),
    /// 1.0 when the marginal is squeezed below vacuum, else 0.0.
    EllipseSqueezed(Bipartition, QuadPair),
}

impl OutputKind {
    /// Column label.
    pub fn label(&self) -> String {
        match self {
            OutputKind::EnCw => "E_N_cw".into(),
            OutputKind::EnCcw => "E_N_ccw".into(),
            OutputKind::NuMinusCw => "nu_minus_cw".into(),
            OutputKind::NuMinusCcw => "nu_minus_ccw".into(),
            OutputKind::PhotonsCw => "photons_cw".into(),
            OutputKind::PhotonsCcw => "photons_ccw".into(),
            OutputKind::QS => "q_s".into(),
            OutputKind::Lambda6 => "lambda6".into(),
            OutputKind::MaxRealPart => "max_real_part".into(),
            OutputKind::EllipseMajor(b, p) => format!("ellipse_major_{}_{}", b.label(), p.label()),
            OutputKind::EllipseMinor(b, p) => format!("ellipse_minor_{}_{}", b.label(), p.label()),
            OutputKind::EllipseSqueezed(b, p) => {
                format!("ellipse_squeezed_{}_{}", b.label(), p.label())
            }
        }
    }
}

/// Per-point pipeline outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Stable point with a full covariance matrix.
    Ok,
    /// Dynamically unstable; no stationary covariance exists.
    Unstable,
    /// Steady-state iteration or covariance solve did not converge.
    NoConverge,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Unstable => "unstable",
            Status::NoConverge => "no_converge",
        }
    }
}

/// A grid sweep: base configuration, 1–2 axes, requested outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub base: Config,
    pub axes: Vec<Axis>,
    pub outputs: Vec<OutputKind>,
    /// Maximum total grid size.
    pub budget: usize,
}

impl SweepSpec {
    pub fn new(base: Config, axes: Vec<Axis>, outputs: Vec<OutputKind>) -> Self {
        SweepSpec {
            base,
            axes,
            outputs,
            budget: DEFAULT_BUDGET,
        }
    }

    /// Total grid size.
    pub fn total_points(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    /// Validate axes, budget, and that every axis path resolves at both
    /// endpoints. Runs before any computation.
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidParameter {
                field: "axes",
                reason: format!("sweeps take 1 or 2 axes, got {}", self.axes.len()),
            });
        }
        if self.outputs.is_empty() {
            return Err(Error::InvalidParameter {
                field: "outputs",
                reason: "at least one output quantity is required".into(),
            });
        }
        for axis in &self.axes {
            axis.validate()?;
        }
        if self.axes.len() == 2 && self.axes[0].name == self.axes[1].name {
            return Err(Error::InvalidParameter {
                field: "axes",
                reason: format!("both axes sweep `{}`", self.axes[0].name),
            });
        }
        let total: usize = self.total_points();
        if total > self.budget {
            return Err(Error::InvalidParameter {
                field: "axes",
                reason: format!("grid size {total} exceeds budget {}", self.budget),
            });
        }
        // Endpoint resolution proves each axis path is recognized and its
        // range yields valid parameters.
        let base = self.base.to_value();
        for axis in &self.axes {
            for endpoint in [axis.min, axis.max] {
                let mut doc = base.clone();
                set_path(&mut doc, &axis.name, number(endpoint))?;
                Config::from_value(doc)?.resolve().map_err(|e| {
                    Error::Config(format!("axis `{}` endpoint {endpoint}: {e}", axis.name))
                })?;
            }
        }
        Ok(())
    }
}

/// Everything the pipeline produced at one parameter point. Stages after
/// the first failure are `None`.
#[derive(Debug, Clone)]
pub struct PointEval {
    pub resolved: Resolved,
    pub steady: Option<SteadyState>,
    pub report: Option<StabilityReport>,
    pub cm: Option<CovarianceMatrix>,
    pub entanglement_cw: Option<EntanglementResult>,
    pub entanglement_ccw: Option<EntanglementResult>,
    pub status: Status,
}

/// Run the full pipeline (derive → steady → linear → stability → Lyapunov →
/// measures) at a single configuration. Errors only on invalid parameters;
/// numerical outcomes are encoded in `status`.
pub fn evaluate_point(config: &Config) -> Result<PointEval> {
    let resolved = config.resolve()?;
    let mut eval = PointEval {
        resolved,
        steady: None,
        report: None,
        cm: None,
        entanglement_cw: None,
        entanglement_ccw: None,
        status: Status::NoConverge,
    };

    let steady = match solve_steady_state(&eval.resolved.derived, &eval.resolved.drive) {
        Ok(s) => s,
        Err(Error::InvalidParameter { field, reason }) => {
            return Err(Error::InvalidParameter { field, reason })
        }
        Err(_) => return Ok(eval),
    };
    let model = build_linear_model(&steady, &eval.resolved.derived);
    eval.steady = Some(steady);
    let report = match eigen_stability(&model) {
        Ok(r) => r,
        Err(_) => return Ok(eval),
    };
    let stable = report.stable_by_eigen;
    eval.report = Some(report);
    if !stable {
        eval.status = Status::Unstable;
        return Ok(eval);
    }
    let cm = match solve_lyapunov(&model) {
        Ok(cm) => cm,
        Err(Error::Unstable { .. }) => {
            eval.status = Status::Unstable;
            return Ok(eval);
        }
        Err(_) => return Ok(eval),
    };
    let cw = log_negativity(&reduce_cm(&cm, Bipartition::CwMech));
    let ccw = log_negativity(&reduce_cm(&cm, Bipartition::CcwMech));
    eval.cm = Some(cm);
    match (cw, ccw) {
        (Ok(cw), Ok(ccw)) => {
            eval.entanglement_cw = Some(cw);
            eval.entanglement_ccw = Some(ccw);
            eval.status = Status::Ok;
        }
        _ => return Ok(eval),
    }
    Ok(eval)
}

/// Extract one requested output from a point evaluation. `None` marks
/// quantities the point's status could not produce (CSV: empty cell).
pub fn extract(eval: &PointEval, kind: OutputKind) -> Option<f64> {
    match kind {
        OutputKind::EnCw => eval.entanglement_cw.map(|e| e.e_n),
        OutputKind::EnCcw => eval.entanglement_ccw.map(|e| e.e_n),
        OutputKind::NuMinusCw => eval.entanglement_cw.map(|e| e.nu_minus),
        OutputKind::NuMinusCcw => eval.entanglement_ccw.map(|e| e.nu_minus),
        OutputKind::PhotonsCw => eval.steady.as_ref().map(|s| s.photons_cw),
        OutputKind::PhotonsCcw => eval.steady.as_ref().map(|s| s.photons_ccw),
        OutputKind::QS => eval.steady.as_ref().map(|s| s.q_s),
        OutputKind::Lambda6 => eval.report.as_ref().map(|r| r.hurwitz[5]),
        OutputKind::MaxRealPart => eval.report.as_ref().map(|r| r.max_real_part),
        OutputKind::EllipseMajor(b, p) => ellipse_value(eval, b, p, |e| e.semi_axes.0),
        OutputKind::EllipseMinor(b, p) => ellipse_value(eval, b, p, |e| e.semi_axes.1),
        OutputKind::EllipseSqueezed(b, p) => {
            ellipse_value(eval, b, p, |e| if e.squeezed { 1.0 } else { 0.0 })
        }
    }
}

fn ellipse_value(
    eval: &PointEval,
    bipartition: Bipartition,
    pair: QuadPair,
    f: impl Fn(&crate::gaussian::SqueezingEllipse) -> f64,
) -> Option<f64> {
    let cm = eval.cm.as_ref()?;
    wigner_ellipse(&reduce_cm(cm, bipartition), pair)
        .ok()
        .map(|e| f(&e))
}

/// One result row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    /// Axis values, in axis order.
    pub coords: Vec<f64>,
    /// One entry per requested output; `None` where unavailable.
    pub values: Vec<Option<f64>>,
    pub status: Status,
}

/// Completed sweep: rows in row-major axis order plus provenance lines.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// Coordinate column names (last path segment of each axis).
    pub axis_columns: Vec<String>,
    /// Output column labels.
    pub output_columns: Vec<String>,
    pub rows: Vec<Row>,
    /// Deterministic provenance: resolved base parameters, axes, tool
    /// version. Timestamps are added by writers, never here.
    pub provenance: Vec<String>,
}

impl SweepResult {
    /// (ok, unstable, no_converge) row counts.
    pub fn status_counts(&self) -> (usize, usize, usize) {
        let mut counts = (0, 0, 0);
        for row in &self.rows {
            match row.status {
                Status::Ok => counts.0 += 1,
                Status::Unstable => counts.1 += 1,
                Status::NoConverge => counts.2 += 1,
            }
        }
        counts
    }
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .expect("axis values are finite")
}

/// Evaluate the spec over its full grid.
///
/// Row order is row-major over the axes (first axis outermost). Per-point
/// numerical failures land in the status column; only spec validation
/// errors abort.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let grids: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let total = spec.total_points();
    let base = spec.base.to_value();

    let rows: Vec<Row> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let coords: Vec<f64> = match grids.len() {
                1 => vec![grids[0][idx]],
                _ => {
                    let inner = grids[1].len();
                    vec![grids[0][idx / inner], grids[1][idx % inner]]
                }
            };
            let mut doc = base.clone();
            for (axis, &value) in spec.axes.iter().zip(&coords) {
                set_path(&mut doc, &axis.name, number(value)).expect("axis paths validated");
            }
            let eval = Config::from_value(doc).and_then(|c| evaluate_point(&c));
            match eval {
                Ok(eval) => Row {
                    values: spec.outputs.iter().map(|&k| extract(&eval, k)).collect(),
                    status: eval.status,
                    coords,
                },
                // Unreachable after endpoint validation for monotone-range
                // constraints; recorded rather than aborting the sweep.
                Err(_) => Row {
                    values: vec![None; spec.outputs.len()],
                    status: Status::NoConverge,
                    coords,
                },
            }
        })
        .collect();

    let mut provenance = vec![
        format!("tool: wgmsim {}", env!("CARGO_PKG_VERSION")),
        format!(
            "base: {}",
            serde_json::to_string(&spec.base).expect("config serializes infallibly")
        ),
    ];
    for axis in &spec.axes {
        provenance.push(format!(
            "axis: {} in [{:e}, {:e}], {} points, {} scale",
            axis.name,
            axis.min,
            axis.max,
            axis.count,
            axis.scale.label()
        ));
    }
    provenance.push(format!(
        "outputs: {}",
        spec.outputs
            .iter()
            .map(|o| o.label())
            .collect::<Vec<_>>()
            .join(", ")
    ));
    if spec.base.drive.power_ccw > 0.0 {
        provenance.push(format!(
            "pumping: double, per-pump powers cw {} W / ccw {} W",
            spec.base.drive.power_cw, spec.base.drive.power_ccw
        ));
    } else {
        provenance.push(format!(
            "pumping: single (cw), {} W",
            spec.base.drive.power_cw
        ));
    }

    Ok(SweepResult {
        axis_columns: spec.axes.iter().map(|a| a.column().to_string()).collect(),
        output_columns: spec.outputs.iter().map(|o| o.label()).collect(),
        rows,
        provenance,
    })
}

/// Named scenario presets for the standard figure-style data sets.
pub fn scenario(name: &str) -> Result<SweepSpec> {
    const NAMES: &str = "fig2a, fig2b, fig2c, fig2d, fig3ab, fig4a, fig4b, fig5, fig6";
    let pi = std::f64::consts::PI;

    let single = || {
        let mut c = Config::baseline();
        c.drive.power_ccw = 0.0;
        c.drive.theta = Some(0.0);
        c
    };
    let double = |theta: f64, detuning_ratio: f64| {
        let mut c = Config::baseline();
        c.drive.theta = Some(theta);
        c.drive.detuning_ratio = Some(detuning_ratio);
        c
    };
    let j_axis = Axis::linear("system.coupling_j_ratio", 0.0, 1.0, 3);
    let det_axis = |count| Axis::linear("drive.detuning_ratio", 0.0, 2.0, count);
    let theta_axis = |count| Axis::linear("drive.theta", 0.0, 2.0 * pi, count);

    let spec = match name {
        // Single pump, J/Γ ∈ {0, 0.5, 1} × Δ_c/ω_m ∈ [0, 2].
        "fig2a" => SweepSpec::new(
            single(),
            vec![j_axis, det_axis(201)],
            vec![OutputKind::EnCw],
        ),
        "fig2b" => SweepSpec::new(
            single(),
            vec![j_axis, det_axis(201)],
            vec![OutputKind::EnCcw],
        ),
        // Double pump, θ = 0, same grid.
        "fig2c" => SweepSpec::new(
            double(0.0, 0.4),
            vec![j_axis, det_axis(201)],
            vec![OutputKind::EnCw],
        ),
        "fig2d" => SweepSpec::new(
            double(0.0, 0.4),
            vec![j_axis, det_axis(201)],
            vec![OutputKind::EnCcw],
        ),
        // Phase–detuning maps of both negativities.
        "fig3ab" => SweepSpec::new(
            double(0.0, 0.4),
            vec![theta_axis(65), det_axis(101)],
            vec![OutputKind::EnCw, OutputKind::EnCcw],
        ),
        // Stability chart over the same plane.
        "fig4a" => SweepSpec::new(
            double(0.0, 0.4),
            vec![theta_axis(65), det_axis(101)],
            vec![OutputKind::Lambda6, OutputKind::MaxRealPart],
        ),
        // Detuning cuts at θ = 0 and θ = π/5.
        "fig4b" => SweepSpec::new(
            double(0.0, 0.4),
            vec![Axis::linear("drive.theta", 0.0, pi / 5.0, 2), det_axis(201)],
            vec![OutputKind::EnCw, OutputKind::EnCcw],
        ),
        // Cross-quadrature ellipses at Δ_c/ω_m = 0.4, θ ∈ {π/5, 9π/5}.
        "fig5" => SweepSpec::new(
            double(pi / 5.0, 0.4),
            vec![Axis::linear("drive.theta", pi / 5.0, 9.0 * pi / 5.0, 2)],
            vec![
                OutputKind::EllipseMajor(Bipartition::CwMech, QuadPair::QX),
                OutputKind::EllipseMinor(Bipartition::CwMech, QuadPair::QX),
                OutputKind::EllipseSqueezed(Bipartition::CwMech, QuadPair::QX),
                OutputKind::EllipseMajor(Bipartition::CcwMech, QuadPair::QX),
                OutputKind::EllipseMinor(Bipartition::CcwMech, QuadPair::QX),
                OutputKind::EllipseSqueezed(Bipartition::CcwMech, QuadPair::QX),
            ],
        ),
        // Robustness against temperature and optical loss at the θ = π/5
        // operating point. κ_ex is pinned to its baseline value so the Q_c
        // axis varies intrinsic loss only.
        "fig6" => {
            let mut base = double(pi / 5.0, 0.4);
            let omega_c = 2.0 * pi * crate::params::constants::C / base.system.wavelength;
            base.system.kappa_ex = Some(omega_c / base.system.quality_c);
            SweepSpec::new(
                base,
                vec![
                    Axis::log("system.temperature", 0.01, 10.0, 25),
                    Axis::log("system.quality_c", 1.0e6, 1.0e9, 25),
                ],
                vec![OutputKind::EnCw, OutputKind::MaxRealPart],
            )
        }
        other => {
            return Err(Error::Config(format!(
                "unknown scenario `{other}`; available: {NAMES}"
            )))
        }
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tiny_spec() -> SweepSpec {
        // Small stable neighbourhood of the reference point.
        SweepSpec::new(
            {
                let mut c = Config::baseline();
                c.drive.theta = Some(std::f64::consts::PI / 5.0);
                c
            },
            vec![
                // Grid chosen so every node is exactly representable.
                Axis::linear("drive.theta", 0.25, 0.75, 3),
                Axis::linear("drive.detuning_ratio", 0.3, 0.5, 2),
            ],
            vec![OutputKind::EnCw, OutputKind::EnCcw, OutputKind::PhotonsCw],
        )
    }

    #[test]
    fn degenerate_two_point_axis() {
        let spec = SweepSpec::new(
            Config::baseline(),
            vec![Axis::linear("drive.detuning_ratio", 0.3, 0.5, 2)],
            vec![OutputKind::EnCw],
        );
        let result = run_sweep(&spec).unwrap();
        assert_eq!(result.rows.len(), 2);
        assert_eq!(result.rows[0].coords, vec![0.3]);
        assert_eq!(result.rows[1].coords, vec![0.5]);
    }

    #[test]
    fn row_major_order_and_row_count() {
        let result = run_sweep(&tiny_spec()).unwrap();
        assert_eq!(result.rows.len(), 6);
        let coords: Vec<(f64, f64)> = result
            .rows
            .iter()
            .map(|r| (r.coords[0], r.coords[1]))
            .collect();
        assert_eq!(coords[0], (0.25, 0.3));
        assert_eq!(coords[1], (0.25, 0.5));
        assert_eq!(coords[2], (0.5, 0.3));
        assert_eq!(coords[5], (0.75, 0.5));
        let (ok, unstable, no_conv) = result.status_counts();
        assert_eq!(ok + unstable + no_conv, 6);
    }

    #[test]
    fn determinism_bitwise() {
        let a = run_sweep(&tiny_spec()).unwrap();
        let b = run_sweep(&tiny_spec()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_node_reproduces_row() {
        let spec = tiny_spec();
        let result = run_sweep(&spec).unwrap();
        let row = &result.rows[2]; // θ = 0.5, Δ_c/ω_m = 0.3
        let mut doc = spec.base.to_value();
        set_path(&mut doc, "drive.theta", number(0.5)).unwrap();
        set_path(&mut doc, "drive.detuning_ratio", number(0.3)).unwrap();
        let eval = evaluate_point(&Config::from_value(doc).unwrap()).unwrap();
        for (value, &kind) in row.values.iter().zip(&spec.outputs) {
            assert_eq!(*value, extract(&eval, kind));
        }
        assert_eq!(row.status, eval.status);
    }

    #[test]
    fn axis_values_hit_endpoints_exactly() {
        let lin = Axis::linear("drive.detuning_ratio", 0.1, 1.7, 7);
        let values = lin.values();
        assert_eq!(values[0], 0.1);
        assert_eq!(values[6], 1.7);
        // Three decades over three intervals: one decade per step.
        let log = Axis::log("system.temperature", 0.01, 10.0, 4);
        let values = log.values();
        assert_eq!(values[0], 0.01);
        assert_eq!(values[3], 10.0);
        assert_relative_eq!(values[1] / values[0], 10.0, max_relative = 1e-12);
        assert_relative_eq!(values[2] / values[1], 10.0, max_relative = 1e-12);
    }

    #[test]
    fn spec_validation_rejects_bad_axes() {
        let base = Config::baseline();
        let bad_count = SweepSpec::new(
            base.clone(),
            vec![Axis::linear("drive.theta", 0.0, 1.0, 1)],
            vec![OutputKind::EnCw],
        );
        assert!(bad_count.validate().is_err());

        let bad_range = SweepSpec::new(
            base.clone(),
            vec![Axis::linear("drive.theta", 1.0, 1.0, 3)],
            vec![OutputKind::EnCw],
        );
        assert!(bad_range.validate().is_err());

        let bad_log = SweepSpec::new(
            base.clone(),
            vec![Axis::log("system.temperature", 0.0, 1.0, 3)],
            vec![OutputKind::EnCw],
        );
        assert!(bad_log.validate().is_err());

        let bad_path = SweepSpec::new(
            base.clone(),
            vec![Axis::linear("drive.detuning_ratios", 0.0, 1.0, 3)],
            vec![OutputKind::EnCw],
        );
        assert!(bad_path.validate().is_err());

        let no_axes = SweepSpec::new(base.clone(), vec![], vec![OutputKind::EnCw]);
        assert!(no_axes.validate().is_err());

        let duplicate = SweepSpec::new(
            base.clone(),
            vec![
                Axis::linear("drive.theta", 0.0, 1.0, 3),
                Axis::linear("drive.theta", 0.0, 1.0, 3),
            ],
            vec![OutputKind::EnCw],
        );
        assert!(duplicate.validate().is_err());

        let no_outputs = SweepSpec::new(
            base.clone(),
            vec![Axis::linear("drive.theta", 0.0, 1.0, 3)],
            vec![],
        );
        assert!(no_outputs.validate().is_err());

        let mut over_budget = SweepSpec::new(
            base,
            vec![
                Axis::linear("drive.theta", 0.0, 1.0, 2000),
                Axis::linear("drive.detuning_ratio", 0.0, 1.0, 2000),
            ],
            vec![OutputKind::EnCw],
        );
        assert!(over_budget.validate().is_err());
        over_budget.budget = 4_000_000;
        assert!(over_budget.validate().is_ok());
    }

    #[test]
    fn unstable_rows_blank_entanglement_but_keep_stability_columns() {
        // θ = π at Δ_c/ω_m = 0.4 is dynamically unstable.
        let spec = SweepSpec::new(
            {
                let mut c = Config::baseline();
                c.drive.theta = Some(std::f64::consts::PI);
                c
            },
            vec![Axis::linear("drive.detuning_ratio", 0.4, 0.5, 2)],
            vec![
                OutputKind::EnCw,
                OutputKind::Lambda6,
                OutputKind::MaxRealPart,
                OutputKind::PhotonsCw,
            ],
        );
        let result = run_sweep(&spec).unwrap();
        let unstable: Vec<&Row> = result
            .rows
            .iter()
            .filter(|r| r.status == Status::Unstable)
            .collect();
        assert!(!unstable.is_empty());
        for row in unstable {
            assert_eq!(row.values[0], None);
            assert!(row.values[1].is_some());
            assert!(row.values[2].is_some_and(|x| x > 0.0));
            assert!(row.values[3].is_some());
        }
    }

    #[test]
    fn scenario_names() {
        for name in [
            "fig2a", "fig2b", "fig2c", "fig2d", "fig3ab", "fig4a", "fig4b", "fig5", "fig6",
        ] {
            let spec = scenario(name).unwrap();
            spec.validate().unwrap();
        }
        let err = scenario("fig7").unwrap_err();
        assert!(matches!(err, Error::Config(msg) if msg.contains("fig3ab")));
    }

    #[test]
    fn scenario_fig5_grid_and_verdicts() {
        let spec = scenario("fig5").unwrap();
        assert_eq!(spec.axes.len(), 1);
        let values = spec.axes[0].values();
        assert_eq!(values.len(), 2);
        assert_relative_eq!(values[0], std::f64::consts::PI / 5.0, max_relative = 1e-15);
        assert_relative_eq!(
            values[1],
            9.0 * std::f64::consts::PI / 5.0,
            max_relative = 1e-15
        );
        let result = run_sweep(&spec).unwrap();
        // Columns: cw major/minor/squeezed, ccw major/minor/squeezed.
        let row_15 = &result.rows[0];
        let row_95 = &result.rows[1];
        assert_eq!(row_15.values[2], Some(1.0));
        assert_eq!(row_15.values[5], Some(0.0));
        assert_eq!(row_95.values[2], Some(0.0));
        assert_eq!(row_95.values[5], Some(1.0));
        // The swap is exact: verdict pattern mirrors, axes exchange.
        assert_relative_eq!(
            row_15.values[0].unwrap(),
            row_95.values[3].unwrap(),
            max_relative = 1e-9
        );
        assert_relative_eq!(
            row_15.values[1].unwrap(),
            row_95.values[4].unwrap(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn scenario_fig6_pins_external_coupling() {
        let spec = scenario("fig6").unwrap();
        let kex = spec.base.system.kappa_ex.expect("fig6 pins kappa_ex");
        assert_relative_eq!(kex, 1.898842305755e7, max_relative = 1e-11);
        assert!(spec.axes.iter().all(|a| a.scale == Scale::Log));
    }

    #[test]
    fn provenance_is_deterministic_and_labeled() {
        let result = run_sweep(&tiny_spec()).unwrap();
        assert!(result
            .provenance
            .iter()
            .any(|l| l.starts_with("tool: wgmsim")));
        assert!(result.provenance.iter().any(|l| l.starts_with("base: ")));
        assert!(result
            .provenance
            .iter()
            .any(|l| l.contains("pumping: double")));
        assert_eq!(result.axis_columns, vec!["theta", "detuning_ratio"]);
        assert_eq!(
            result.output_columns,
            vec!["E_N_cw", "E_N_ccw", "photons_cw"]
        );
    }
}
