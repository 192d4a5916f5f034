//! `wgmsim` — steady-state entanglement and stability of a double-pumped
//! whispering-gallery resonator with backscattering.
//!
//! Exit codes: 0 success, 1 configuration/validation error, 2 numerical
//! failure (no convergence, instability where a stationary state is
//! required, or linear-algebra failure).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wgmsim::oracle::{default_dt, default_t_final, default_t_max};
use wgmsim::{
    build_linear_model, eigen_stability, integral_form_cm, integrate_moments, log_negativity,
    reduce_cm, run_sweep, scenario, solve_lyapunov, solve_steady_state, wigner_ellipse, Axis,
    Bipartition, Config, CovarianceMatrix, OutputKind, QuadPair, Resolved, Scale, StabilityReport,
    SteadyState, SweepSpec,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Oracle agreement tolerances enforced by `verify` (relative Frobenius).
const VERIFY_TOL_ODE: f64 = 1e-6;
const VERIFY_TOL_QUAD: f64 = 1e-5;

#[derive(Parser)]
#[command(
    name = "wgmsim",
    version,
    about = "Optomechanical entanglement in a double-pumped resonator with backscattering",
    long_about = "Computes derived rates, classical steady states, dynamical stability, \
                  stationary covariance matrices, logarithmic negativity and two-mode \
                  squeezing for two counter-propagating cavity modes coupled to one \
                  mechanical mode. All frequencies are angular (rad/s) unless the \
                  configuration selects the ordinary-frequency convention."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration file (defaults to the built-in baseline).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Dotted-path configuration override, e.g. --set drive.theta=0.6283.
    /// Repeatable. Setting one member of an either/or pair (coupling_j vs
    /// coupling_j_ratio, detuning vs detuning_ratio, theta vs explicit
    /// phases) clears its siblings.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the derived constants (cavity frequency, decay rates, coupling
    /// rates, drive amplitudes, thermal occupation).
    Derive,
    /// Solve and print the classical steady state (intracavity amplitudes,
    /// photon numbers, mechanical displacement). Multistable roots, when
    /// detected, are listed in the provenance header.
    Steady,
    /// Stability certificate: sixth Hurwitz determinant and the largest real
    /// part of the drift eigenvalues.
    Stability,
    /// Stationary entanglement: logarithmic negativity and smallest
    /// partially-transposed symplectic eigenvalue for both optical-mechanical
    /// pairs. Unstable points yield empty entanglement fields.
    Entangle,
    /// Two-mode squeezing ellipse of a quadrature-pair Wigner marginal,
    /// optionally with gridded Wigner values.
    Wigner {
        /// Optical mode paired with the mechanics.
        #[arg(long, value_enum, default_value = "cw")]
        bipartition: BipartitionArg,
        /// Quadrature pair of the marginal.
        #[arg(long, value_enum, default_value = "q_x")]
        pair: PairArg,
        /// Emit an N×N grid of Wigner values (ellipse parameters move into
        /// the provenance header).
        #[arg(long, value_name = "N")]
        grid: Option<usize>,
        /// Half-width of the grid window in units of the major semi-axis.
        #[arg(long, default_value_t = 3.0)]
        extent: f64,
    },
    /// Run a parameter sweep, either a named scenario preset or custom axes.
    Sweep {
        /// Scenario preset: fig2a, fig2b, fig2c, fig2d, fig3ab, fig4a,
        /// fig4b, fig5, fig6. --set still applies on top of the preset base.
        #[arg(long, value_name = "NAME")]
        scenario: Option<String>,
        /// Swept axis, path=min:max:count[:linear|log]. Repeatable (max 2);
        /// the first axis is the outer (slow) loop.
        #[arg(long = "axis", value_name = "SPEC")]
        axes: Vec<String>,
        /// Comma-separated output columns, e.g. E_N_cw,lambda6 or
        /// ellipse_major_cw_q_x.
        #[arg(long, value_name = "LIST", value_delimiter = ',')]
        outputs: Vec<String>,
        /// Override the grid-size budget (default 1000000 points).
        #[arg(long, value_name = "N")]
        budget: Option<usize>,
    },
    /// Cross-check the Lyapunov covariance against the moment-ODE and
    /// matrix-exponential-quadrature oracles at the current configuration.
    #[command(hide = true)]
    Verify {
        /// Simpson subintervals for the quadrature oracle.
        #[arg(long, default_value_t = 50_000)]
        steps: usize,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum BipartitionArg {
    Cw,
    Ccw,
}

impl From<BipartitionArg> for Bipartition {
    fn from(b: BipartitionArg) -> Self {
        match b {
            BipartitionArg::Cw => Bipartition::CwMech,
            BipartitionArg::Ccw => Bipartition::CcwMech,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PairArg {
    /// (δq, δX_j)
    #[value(name = "q_x")]
    QX,
    /// (δq, δY_j)
    #[value(name = "q_y")]
    QY,
    /// (δq, δp)
    #[value(name = "q_p")]
    QP,
    /// (δX_j, δY_j)
    #[value(name = "x_y")]
    XY,
}

impl From<PairArg> for QuadPair {
    fn from(p: PairArg) -> Self {
        match p {
            PairArg::QX => QuadPair::QX,
            PairArg::QY => QuadPair::QY,
            PairArg::QP => QuadPair::QP,
            PairArg::XY => QuadPair::XY,
        }
    }
}

/// CLI-level error: a message plus the process exit code it maps to.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<wgmsim::Error> for CliError {
    fn from(e: wgmsim::Error) -> Self {
        let code = match &e {
            wgmsim::Error::InvalidParameter { .. } | wgmsim::Error::Config(_) => 1,
            _ => 2,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::numerical(format!("i/o: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    init_thread_pool()?;
    let table = match &cli.command {
        Command::Derive => cmd_derive(cli)?,
        Command::Steady => cmd_steady(cli)?,
        Command::Stability => cmd_stability(cli)?,
        Command::Entangle => cmd_entangle(cli)?,
        Command::Wigner {
            bipartition,
            pair,
            grid,
            extent,
        } => cmd_wigner(cli, (*bipartition).into(), (*pair).into(), *grid, *extent)?,
        Command::Sweep {
            scenario,
            axes,
            outputs,
            budget,
        } => cmd_sweep(cli, scenario.as_deref(), axes, outputs, *budget)?,
        Command::Verify { steps } => cmd_verify(cli, *steps)?,
    };
    let rendered = match cli.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match &cli.output {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| CliError::numerical(format!("{}: {e}", path.display())))?;
            file.write_all(rendered.as_bytes())?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(rendered.as_bytes())?;
        }
    }
    // `verify` doubles as a pass/fail check: emit the residuals, then fail
    // the process if they exceed tolerance.
    if let Some(message) = &table.failure {
        return Err(CliError::numerical(message.clone()));
    }
    Ok(())
}

/// Honor WGMSIM_THREADS before any parallel work; unset means the rayon
/// default (one thread per logical CPU).
fn init_thread_pool() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("WGMSIM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::validation(format!("WGMSIM_THREADS: `{raw}` is not a count")))?;
    if n == 0 {
        return Err(CliError::validation("WGMSIM_THREADS must be ≥ 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::numerical(format!("thread pool: {e}")))
}

// ---------------------------------------------------------------------------
// Output table: one shape for every subcommand, rendered as CSV or JSON.

enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

struct Table {
    command: String,
    /// Provenance lines, emitted `#`-prefixed in CSV and as a string array
    /// in JSON. Timestamps appear only here, never in data rows.
    provenance: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
    /// When set, `run` exits with code 2 after emitting the table.
    failure: Option<String>,
}

/// 12 significant digits, scientific: the CSV number dialect.
fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(x) => sci(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl Table {
    fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.provenance {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(Cell::to_json).collect()))
            .collect();
        let doc = json!({
            "tool": "wgmsim",
            "version": VERSION,
            "command": self.command,
            "provenance": self.provenance,
            "columns": self.columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
        text.push('\n');
        text
    }
}

/// ISO-8601 UTC timestamp without external dependencies (civil-from-days).
fn utc_timestamp() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let days = (secs / 86_400) as i64;
    let (hh, mm, ss) = ((secs % 86_400) / 3_600, (secs % 3_600) / 60, secs % 60);
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1_460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = yoe + era * 400 + i64::from(m <= 2);
    format!("{y:04}-{m:02}-{d:02}T{hh:02}:{mm:02}:{ss:02}Z")
}

// ---------------------------------------------------------------------------
// Configuration loading.

/// Load --config (or the baseline), apply --set overrides, and return both
/// the parsed config and its JSON document for provenance.
fn load_config(cli: &Cli) -> Result<(Config, Value), CliError> {
    let base = match &cli.config {
        Some(path) => Config::from_file(path)?,
        None => Config::baseline(),
    };
    let mut doc = base.to_value();
    apply_sets(&mut doc, &cli.set)?;
    let config = Config::from_value(doc.clone())?;
    Ok((config, doc))
}

fn apply_sets(doc: &mut Value, sets: &[String]) -> Result<(), CliError> {
    for kv in sets {
        let (path, raw) = kv
            .split_once('=')
            .ok_or_else(|| CliError::validation(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        wgmsim::apply_override(doc, path.trim(), raw.trim())?;
    }
    Ok(())
}

/// Shared provenance preamble for the single-point subcommands.
fn preamble(command: &str, doc: &Value, resolved: &Resolved) -> Vec<String> {
    let mut lines = vec![
        format!("wgmsim {VERSION}"),
        format!("generated: {}", utc_timestamp()),
        format!("command: {command}"),
        format!("config: {doc}"),
        "quadrature order: (X_cw, Y_cw, X_ccw, Y_ccw, q, p); vacuum variance 1/2".to_string(),
    ];
    let d = &resolved.derived;
    lines.push(if d.eps_ccw == 0.0 {
        format!(
            "pumping: single (P_cw = {} W)",
            sci(resolved.drive.power_cw)
        )
    } else {
        format!(
            "pumping: double (P_cw = {} W, P_ccw = {} W)",
            sci(resolved.drive.power_cw),
            sci(resolved.drive.power_ccw)
        )
    });
    for w in &d.warnings {
        lines.push(format!("warning: {w}"));
    }
    lines
}

/// Resolve, solve the steady state, and certify stability — the common
/// front of `stability`, `entangle`, `wigner`, and `verify`.
fn pipeline(config: &Config) -> Result<(Resolved, SteadyState, StabilityReport), CliError> {
    let resolved = config.resolve()?;
    let steady = solve_steady_state(&resolved.derived, &resolved.drive)?;
    let model = build_linear_model(&steady, &resolved.derived);
    let report = eigen_stability(&model)?;
    Ok((resolved, steady, report))
}

// ---------------------------------------------------------------------------
// Subcommands.

fn cmd_derive(cli: &Cli) -> Result<Table, CliError> {
    let (config, doc) = load_config(cli)?;
    let resolved = config.resolve()?;
    let d = &resolved.derived;
    let quantities: [(&str, f64); 14] = [
        ("omega_c", d.omega_c),
        ("omega_l", d.omega_l),
        ("kappa_0", d.kappa_0),
        ("kappa_ex", d.kappa_ex),
        ("gamma", d.gamma),
        ("j", d.j),
        ("g0", d.g0),
        ("delta_c", d.delta_c),
        ("eps_cw", d.eps_cw),
        ("eps_ccw", d.eps_ccw),
        ("n_m", d.n_m),
        ("omega_m", d.omega_m),
        ("gamma_m", d.gamma_m),
        ("q_m", d.q_m),
    ];
    Ok(Table {
        command: "derive".into(),
        provenance: preamble("derive", &doc, &resolved),
        columns: vec!["quantity".into(), "value".into()],
        rows: quantities
            .iter()
            .map(|(name, value)| vec![Cell::Text((*name).into()), Cell::Num(*value)])
            .collect(),
        failure: None,
    })
}

fn cmd_steady(cli: &Cli) -> Result<Table, CliError> {
    let (config, doc) = load_config(cli)?;
    let resolved = config.resolve()?;
    let steady = solve_steady_state(&resolved.derived, &resolved.drive)?;
    let mut provenance = preamble("steady", &doc, &resolved);
    if let Some(roots) = &steady.multistable_roots {
        let listed: Vec<String> = roots.iter().map(|r| sci(*r)).collect();
        provenance.push(format!(
            "multistable_roots: {} (returned the smallest, adiabatic turn-on branch)",
            listed.join(", ")
        ));
    }
    let quantities: [(&str, Cell); 11] = [
        ("alpha_cw_re", Cell::Num(steady.alpha_cw.re)),
        ("alpha_cw_im", Cell::Num(steady.alpha_cw.im)),
        ("alpha_ccw_re", Cell::Num(steady.alpha_ccw.re)),
        ("alpha_ccw_im", Cell::Num(steady.alpha_ccw.im)),
        ("photons_cw", Cell::Num(steady.photons_cw)),
        ("photons_ccw", Cell::Num(steady.photons_ccw)),
        ("q_s", Cell::Num(steady.q_s)),
        ("delta_eff", Cell::Num(steady.delta_eff)),
        ("residual", Cell::Num(steady.residual)),
        ("iterations", Cell::Int(steady.iterations as u64)),
        (
            "multistable",
            Cell::Bool(steady.multistable_roots.is_some()),
        ),
    ];
    Ok(Table {
        command: "steady".into(),
        provenance,
        columns: vec!["quantity".into(), "value".into()],
        rows: quantities
            .into_iter()
            .map(|(name, cell)| vec![Cell::Text(name.into()), cell])
            .collect(),
        failure: None,
    })
}

fn cmd_stability(cli: &Cli) -> Result<Table, CliError> {
    let (config, doc) = load_config(cli)?;
    let (resolved, _steady, report) = pipeline(&config)?;
    let mut provenance = preamble("stability", &doc, &resolved);
    let coeffs: Vec<String> = report.char_coeffs.iter().map(|c| sci(*c)).collect();
    let minors: Vec<String> = report.hurwitz.iter().map(|l| sci(*l)).collect();
    let eigs: Vec<String> = report
        .eigenvalues
        .iter()
        .map(|e| format!("{}{:+.11e}i", sci(e.re), e.im))
        .collect();
    provenance.push(format!("char_coeffs a0..a6: {}", coeffs.join(", ")));
    provenance.push(format!("hurwitz_minors L1..L6: {}", minors.join(", ")));
    provenance.push(format!("eigenvalues: {}", eigs.join(", ")));
    provenance.push(format!(
        "verdicts: eigenvalue {}, routh_hurwitz {}",
        report.stable_by_eigen, report.stable_by_rh
    ));
    let d = &resolved.derived;
    Ok(Table {
        command: "stability".into(),
        provenance,
        columns: [
            "theta",
            "detuning_ratio",
            "lambda6",
            "max_real_part",
            "stable",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        rows: vec![vec![
            Cell::Num(resolved.drive.theta()),
            Cell::Num(d.delta_c / d.omega_m),
            Cell::Num(report.hurwitz[5]),
            Cell::Num(report.max_real_part),
            Cell::Bool(report.stable_by_eigen),
        ]],
        failure: None,
    })
}

fn cmd_entangle(cli: &Cli) -> Result<Table, CliError> {
    let (config, doc) = load_config(cli)?;
    let (resolved, steady, report) = pipeline(&config)?;
    let d = &resolved.derived;
    let mut cells = vec![
        Cell::Num(resolved.drive.theta()),
        Cell::Num(d.delta_c / d.omega_m),
        Cell::Num(d.j / d.gamma),
    ];
    if report.stable_by_eigen {
        let model = build_linear_model(&steady, d);
        let cm = solve_lyapunov(&model)?;
        let cw = log_negativity(&reduce_cm(&cm, Bipartition::CwMech))?;
        let ccw = log_negativity(&reduce_cm(&cm, Bipartition::CcwMech))?;
        cells.extend([
            Cell::Num(cw.e_n),
            Cell::Num(ccw.e_n),
            Cell::Num(cw.nu_minus),
            Cell::Num(ccw.nu_minus),
        ]);
    } else {
        // No stationary state: entanglement fields stay empty, never zero.
        cells.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
    }
    cells.push(Cell::Bool(report.stable_by_eigen));
    Ok(Table {
        command: "entangle".into(),
        provenance: preamble("entangle", &doc, &resolved),
        columns: [
            "theta",
            "detuning_ratio",
            "J_over_Gamma",
            "E_N_cw",
            "E_N_ccw",
            "nu_minus_cw",
            "nu_minus_ccw",
            "stable",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        rows: vec![cells],
        failure: None,
    })
}

fn cmd_wigner(
    cli: &Cli,
    bipartition: Bipartition,
    pair: QuadPair,
    grid: Option<usize>,
    extent: f64,
) -> Result<Table, CliError> {
    let (config, doc) = load_config(cli)?;
    let (resolved, steady, _report) = pipeline(&config)?;
    let model = build_linear_model(&steady, &resolved.derived);
    let cm = solve_lyapunov(&model)?; // unstable points fail here (exit 2)
    let ellipse = wigner_ellipse(&reduce_cm(&cm, bipartition), pair)?;
    let mut provenance = preamble("wigner", &doc, &resolved);
    let labels = (bipartition.label(), pair.label());

    let Some(n) = grid else {
        return Ok(Table {
            command: "wigner".into(),
            provenance,
            columns: [
                "bipartition",
                "pair",
                "semi_major",
                "semi_minor",
                "angle_rad",
                "squeezed",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            rows: vec![vec![
                Cell::Text(labels.0.into()),
                Cell::Text(labels.1.into()),
                Cell::Num(ellipse.semi_axes.0),
                Cell::Num(ellipse.semi_axes.1),
                Cell::Num(ellipse.angle),
                Cell::Bool(ellipse.squeezed),
            ]],
            failure: None,
        });
    };

    if n < 2 {
        return Err(CliError::validation(
            "--grid needs at least 2 points per side",
        ));
    }
    if !(extent.is_finite() && extent > 0.0) {
        return Err(CliError::validation("--extent must be positive and finite"));
    }
    provenance.push(format!("bipartition: {}, pair: {}", labels.0, labels.1));
    provenance.push(format!(
        "ellipse: semi_major = {}, semi_minor = {}, angle_rad = {}, squeezed = {}",
        sci(ellipse.semi_axes.0),
        sci(ellipse.semi_axes.1),
        sci(ellipse.angle),
        ellipse.squeezed
    ));
    provenance.push(format!(
        "grid: {n}x{n}, window ±{} (extent {extent} × semi_major)",
        sci(extent * ellipse.semi_axes.0)
    ));
    let half = extent * ellipse.semi_axes.0;
    let coord = |i: usize| -half + 2.0 * half * i as f64 / (n - 1) as f64;
    let mut rows = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            let (u, v) = (coord(i), coord(k));
            rows.push(vec![
                Cell::Num(u),
                Cell::Num(v),
                Cell::Num(ellipse.wigner_at(u, v)),
            ]);
        }
    }
    Ok(Table {
        command: "wigner".into(),
        provenance,
        columns: vec!["u".into(), "v".into(), "w".into()],
        rows,
        failure: None,
    })
}

fn parse_axis(spec: &str) -> Result<Axis, CliError> {
    let usage = || {
        CliError::validation(format!(
            "--axis expects path=min:max:count[:linear|log], got `{spec}`"
        ))
    };
    let (path, rest) = spec.split_once('=').ok_or_else(usage)?;
    let parts: Vec<&str> = rest.split(':').collect();
    if !(parts.len() == 3 || parts.len() == 4) {
        return Err(usage());
    }
    let min: f64 = parts[0].parse().map_err(|_| usage())?;
    let max: f64 = parts[1].parse().map_err(|_| usage())?;
    let count: usize = parts[2].parse().map_err(|_| usage())?;
    let scale = match parts.get(3).copied() {
        None | Some("linear") => Scale::Linear,
        Some("log") => Scale::Log,
        Some(other) => {
            return Err(CliError::validation(format!(
                "--axis scale must be linear or log, got `{other}`"
            )))
        }
    };
    Ok(Axis {
        name: path.trim().to_string(),
        min,
        max,
        count,
        scale,
    })
}

fn parse_output(name: &str) -> Result<OutputKind, CliError> {
    let plain = match name {
        "E_N_cw" => Some(OutputKind::EnCw),
        "E_N_ccw" => Some(OutputKind::EnCcw),
        "nu_minus_cw" => Some(OutputKind::NuMinusCw),
        "nu_minus_ccw" => Some(OutputKind::NuMinusCcw),
        "photons_cw" => Some(OutputKind::PhotonsCw),
        "photons_ccw" => Some(OutputKind::PhotonsCcw),
        "q_s" => Some(OutputKind::QS),
        "lambda6" => Some(OutputKind::Lambda6),
        "max_real_part" => Some(OutputKind::MaxRealPart),
        _ => None,
    };
    if let Some(kind) = plain {
        return Ok(kind);
    }
    // ellipse_{major|minor|squeezed}_{cw|ccw}_{q_x|q_y|q_p|x_y}
    let unknown = || {
        CliError::validation(format!(
            "unknown output `{name}`; valid: E_N_cw, E_N_ccw, nu_minus_cw, nu_minus_ccw, \
             photons_cw, photons_ccw, q_s, lambda6, max_real_part, \
             ellipse_{{major|minor|squeezed}}_{{cw|ccw}}_{{q_x|q_y|q_p|x_y}}"
        ))
    };
    let rest = name.strip_prefix("ellipse_").ok_or_else(unknown)?;
    let (which, rest) = rest.split_once('_').ok_or_else(unknown)?;
    let (side, pair_name) = rest.split_once('_').ok_or_else(unknown)?;
    let bipartition = match side {
        "cw" => Bipartition::CwMech,
        "ccw" => Bipartition::CcwMech,
        _ => return Err(unknown()),
    };
    let pair = match pair_name {
        "q_x" => QuadPair::QX,
        "q_y" => QuadPair::QY,
        "q_p" => QuadPair::QP,
        "x_y" => QuadPair::XY,
        _ => return Err(unknown()),
    };
    match which {
        "major" => Ok(OutputKind::EllipseMajor(bipartition, pair)),
        "minor" => Ok(OutputKind::EllipseMinor(bipartition, pair)),
        "squeezed" => Ok(OutputKind::EllipseSqueezed(bipartition, pair)),
        _ => Err(unknown()),
    }
}

fn cmd_sweep(
    cli: &Cli,
    scenario_name: Option<&str>,
    axes: &[String],
    outputs: &[String],
    budget: Option<usize>,
) -> Result<Table, CliError> {
    let mut spec = match scenario_name {
        Some(name) => {
            if !axes.is_empty() || !outputs.is_empty() {
                return Err(CliError::validation(
                    "--scenario presets fix their axes and outputs; drop --axis/--outputs \
                     or run a custom sweep without --scenario",
                ));
            }
            if cli.config.is_some() {
                return Err(CliError::validation(
                    "--scenario presets define their own base configuration; use --set to \
                     adjust it",
                ));
            }
            let mut spec = scenario(name)?;
            if !cli.set.is_empty() {
                let mut doc = spec.base.to_value();
                apply_sets(&mut doc, &cli.set)?;
                spec.base = Config::from_value(doc)?;
            }
            spec
        }
        None => {
            if axes.is_empty() {
                return Err(CliError::validation(
                    "custom sweeps need at least one --axis (or use --scenario)",
                ));
            }
            if outputs.is_empty() {
                return Err(CliError::validation(
                    "custom sweeps need --outputs (e.g. --outputs E_N_cw,E_N_ccw)",
                ));
            }
            let (base, _doc) = load_config(cli)?;
            let parsed_axes: Vec<Axis> = axes
                .iter()
                .map(|s| parse_axis(s))
                .collect::<Result<_, _>>()?;
            let parsed_outputs: Vec<OutputKind> = outputs
                .iter()
                .map(|s| parse_output(s.trim()))
                .collect::<Result<_, _>>()?;
            SweepSpec::new(base, parsed_axes, parsed_outputs)
        }
    };
    if let Some(b) = budget {
        spec.budget = b;
    }

    let result = run_sweep(&spec)?;
    let mut provenance = vec![
        format!("generated: {}", utc_timestamp()),
        match scenario_name {
            Some(name) => format!("command: sweep --scenario {name}"),
            None => "command: sweep".to_string(),
        },
    ];
    provenance.extend(result.provenance.iter().cloned());
    let (ok, unstable, no_converge) = result.status_counts();
    provenance.push(format!(
        "status: {ok} ok, {unstable} unstable, {no_converge} no_converge"
    ));

    let mut columns = result.axis_columns.clone();
    columns.extend(result.output_columns.iter().cloned());
    columns.push("status".into());
    let rows = result
        .rows
        .iter()
        .map(|row| {
            let mut cells: Vec<Cell> = row.coords.iter().map(|&c| Cell::Num(c)).collect();
            cells.extend(row.values.iter().map(|v| v.map_or(Cell::Empty, Cell::Num)));
            cells.push(Cell::Text(row.status.label().into()));
            cells
        })
        .collect();
    Ok(Table {
        command: "sweep".into(),
        provenance,
        columns,
        rows,
        failure: None,
    })
}

fn cmd_verify(cli: &Cli, steps: usize) -> Result<Table, CliError> {
    let (config, doc) = load_config(cli)?;
    let (resolved, steady, _report) = pipeline(&config)?;
    let model = build_linear_model(&steady, &resolved.derived);
    let direct = solve_lyapunov(&model)?; // requires a stable point
    let vacuum = CovarianceMatrix::vacuum();
    let traj = integrate_moments(
        &model,
        &vacuum,
        default_t_final(&model)?,
        default_dt(&model),
    )?;
    let quad = integral_form_cm(&model, default_t_max(&model)?, steps)?;
    let rel_ode = (traj.final_cm().v - direct.v).norm() / direct.v.norm();
    let rel_quad = (quad.v - direct.v).norm() / direct.v.norm();
    let residual = (model.drift * direct.v + direct.v * model.drift.transpose() + model.diffusion)
        .norm()
        / model.diffusion.norm();
    let pass = rel_ode <= VERIFY_TOL_ODE && rel_quad <= VERIFY_TOL_QUAD;
    let mut provenance = preamble("verify", &doc, &resolved);
    provenance.push(format!(
        "oracles: moment-ODE (RK4, default horizon/step), quadrature (Simpson, {steps} steps)"
    ));
    Ok(Table {
        command: "verify".into(),
        provenance,
        columns: [
            "rel_ode",
            "rel_quadrature",
            "lyapunov_residual",
            "tol_ode",
            "tol_quadrature",
            "pass",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        rows: vec![vec![
            Cell::Num(rel_ode),
            Cell::Num(rel_quad),
            Cell::Num(residual),
            Cell::Num(VERIFY_TOL_ODE),
            Cell::Num(VERIFY_TOL_QUAD),
            Cell::Bool(pass),
        ]],
        failure: (!pass).then(|| {
            format!(
                "oracle disagreement: rel_ode = {} (tol {}), rel_quadrature = {} (tol {})",
                sci(rel_ode),
                sci(VERIFY_TOL_ODE),
                sci(rel_quad),
                sci(VERIFY_TOL_QUAD)
            )
        }),
    })
}
