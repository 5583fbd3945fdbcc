//! `hierarg`: reproducible experiments on the hierarchical Coulomb gas RG flow.
//!
//! Exit codes: 0 on success, 1 on numerical failure, 2 on usage errors.

mod expr;
mod output;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use hierarg::discrete_rg::{self, ActivityKind};
use hierarg::equilibria::{self, EquilibriumOrbit, OrbitClass, OrbitQuery, Sign};
use hierarg::field_grid::fmt17;
use hierarg::rg_flow::{self, FlowConfig, Trajectory};
use hierarg::stability::{self, Background, SpectrumExport};
use hierarg::{GridFunction, NormKind, Parity};

use output::Output;

/// H1 distance below which the final state is named after an equilibrium.
const ATTRACTOR_TOL: f64 = 1e-5;
/// Largest branch index searched when naming an attractor.
const MAX_BRANCH: u32 = 8;
/// Allowed increase of V between snapshots.
const LIAPUNOV_SLACK: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "hierarg", version, about = "RG flow of the 2D hierarchical Coulomb gas")]
struct Cli {
    /// Directory for output files (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Also write gnuplot-style two-column `.dat` files.
    #[arg(long, global = true)]
    plot_data: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve initial data under the continuum flow.
    Flow(FlowArgs),
    /// Reconstruct the equilibrium psi_j^+- at given alpha.
    Equilibrium(EquilibriumArgs),
    /// Sweep w_hat_j over a range of alpha.
    Bifurcation(BifurcationArgs),
    /// Lowest eigenvalues of the linearized operator.
    Spectrum(SpectrumArgs),
    /// Shooting trace and stability verdict.
    Criterium(BranchArgs),
    /// Liapunov functional along a flow run.
    Liapunov(LiapunovArgs),
    /// Discrete RG iteration vs the continuum flow.
    Discrete(DiscreteArgs),
    /// Phase-plane orbits of the stationary system.
    PhasePortrait(PhaseArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Form {
    V,
    UTilde,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum KindArg {
    Hardcore,
    Bessel,
}

#[derive(Args, Serialize)]
struct FlowArgs {
    #[arg(long)]
    alpha: f64,
    /// Initial data in x: odd v0 for `--form v`, even u0 with u0(0) = 0 for `--form u-tilde`.
    #[arg(long, default_value = "0.1*sin(x)")]
    init: String,
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = rg_flow::DEFAULT_DT)]
    dt: f64,
    #[arg(long, default_value_t = 20.0)]
    t_end: f64,
    /// Snapshot every this many steps.
    #[arg(long, default_value_t = rg_flow::DEFAULT_STRIDE)]
    stride: usize,
    #[arg(long, value_enum, default_value_t = Form::V)]
    form: Form,
}

#[derive(Args, Serialize)]
struct EquilibriumArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    j: u32,
    #[arg(long, value_enum, default_value_t = SignArg::Plus)]
    sign: SignArg,
    /// Fixed sampling grid; by default the grid is refined until resolved.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Serialize)]
struct BifurcationArgs {
    #[arg(long, default_value_t = 1)]
    j: u32,
    #[arg(long)]
    alpha_min: f64,
    #[arg(long)]
    alpha_max: f64,
    /// Number of alpha values, endpoints included.
    #[arg(long, default_value_t = 50)]
    steps: usize,
}

#[derive(Args, Serialize)]
struct BranchArgs {
    #[arg(long)]
    alpha: f64,
    /// `trivial` or a branch index j >= 1.
    #[arg(long, default_value = "trivial")]
    branch: String,
    #[arg(long, value_enum, default_value_t = SignArg::Plus)]
    sign: SignArg,
}

#[derive(Args, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    branch: BranchArgs,
    /// Number of eigenvalues (1..=10).
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Operator grid; eigenvalues are extrapolated from n and 2n.
    #[arg(long, default_value_t = stability::DEFAULT_OPERATOR_GRID)]
    n: usize,
}

#[derive(Args, Serialize)]
struct LiapunovArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value = "0.1*sin(x)")]
    init: String,
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = rg_flow::DEFAULT_DT)]
    dt: f64,
    #[arg(long, default_value_t = 20.0)]
    t_end: f64,
    #[arg(long, default_value_t = rg_flow::DEFAULT_STRIDE)]
    stride: usize,
}

#[derive(Args, Serialize)]
struct DiscreteArgs {
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 0.1)]
    z: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Ascending list of step counts.
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    n_list: Vec<usize>,
    #[arg(long, value_enum, default_value_t = KindArg::Hardcore)]
    kind: KindArg,
    /// Size of the phi grid.
    #[arg(long, default_value_t = discrete_rg::DEFAULT_M)]
    m: usize,
}

#[derive(Args, Serialize)]
struct PhaseArgs {
    #[arg(long)]
    alpha: f64,
    /// Comma-separated slopes at the w-axis crossing.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    w0: Vec<f64>,
    #[arg(long, default_value_t = 4.0 * PI)]
    x_end: f64,
    #[arg(long, default_value_t = 400)]
    samples: usize,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Usage(String),
    Numerical(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Numerical(e)
    }
}

type Run<T = ()> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Run<T> {
    Err(Failure::Usage(msg.into()))
}

fn check_positive(name: &str, x: f64) -> Run {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        usage(format!("--{name} must be a positive number, got {x}"))
    }
}

fn check_grid(name: &str, n: usize) -> Run {
    if n >= 2 && n.is_power_of_two() {
        Ok(())
    } else {
        usage(format!("--{name} must be a power of two >= 2, got {n}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Run {
    let Ok(raw) = std::env::var("HIERARG_THREADS") else {
        return Ok(());
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return usage(format!("HIERARG_THREADS must be a positive integer, got '{raw}'")),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn run(cli: Cli) -> Run {
    let out = Output::new(&cli.out_dir, cli.plot_data)?;
    match cli.command {
        Command::Flow(a) => flow(&out, a),
        Command::Equilibrium(a) => equilibrium(&out, a),
        Command::Bifurcation(a) => bifurcation(&out, a),
        Command::Spectrum(a) => spectrum(&out, a),
        Command::Criterium(a) => criterium(&out, a),
        Command::Liapunov(a) => liapunov(&out, a),
        Command::Discrete(a) => discrete(&out, a),
        Command::PhasePortrait(a) => phase_portrait(&out, a),
    }
}

/// Parses `--init` and samples it with the requested parity.
fn initial_data(src: &str, parity: Parity, n: usize) -> Run<GridFunction> {
    let e = expr::parse(src).map_err(|err| Failure::Usage(format!("--init '{src}': {err}")))?;
    // symmetry check at generic points
    for k in 1..=16 {
        let x = 0.37 * k as f64;
        let (a, b) = (e.eval(x), e.eval(-x));
        let defect = match parity {
            Parity::Odd => a + b,
            Parity::Even => a - b,
        };
        if !a.is_finite() || defect.abs() > 1e-12 * (1.0 + a.abs()) {
            let want = if parity == Parity::Odd { "odd" } else { "even" };
            return usage(format!("--init '{src}' is not {want} in x"));
        }
    }
    if parity == Parity::Even && e.eval(0.0).abs() > 1e-14 {
        return usage(format!("--init '{src}' must vanish at x = 0 for the u-tilde form"));
    }
    GridFunction::from_fn(parity, n, |x| e.eval(x)).map_err(|err| Failure::Usage(err.to_string()))
}

fn branch_name(j: u32, sign: Sign) -> String {
    let s = match sign {
        Sign::Plus => "plus",
        Sign::Minus => "minus",
    };
    format!("psi_{j}_{s}")
}

/// Names the equilibrium closest to `v` in H1 if it lies within [`ATTRACTOR_TOL`].
fn identify_attractor(v: &GridFunction, alpha: f64) -> anyhow::Result<(String, f64)> {
    let mut best = ("zero".to_string(), v.norm(NormKind::H1));
    let mut j = 1;
    while j <= MAX_BRANCH && alpha < equilibria::branch_threshold(j) && best.1 >= ATTRACTOR_TOL {
        for sign in [Sign::Plus, Sign::Minus] {
            let orbit = equilibria::reconstruct_orbit(alpha, j, sign)
                .with_context(|| format!("reconstructing {}", branch_name(j, sign)))?;
            let d = v.sub(&orbit.psi.resample(v.grid())?)?.norm(NormKind::H1);
            if d < best.1 {
                best = (branch_name(j, sign), d);
            }
        }
        j += 1;
    }
    if best.1 < ATTRACTOR_TOL {
        Ok(best)
    } else {
        Ok(("none".to_string(), best.1))
    }
}

fn final_profile(traj: &Trajectory) -> Vec<(f64, f64)> {
    let v = &traj.last().v;
    hierarg::field_grid::grid_points(v.grid())
        .into_iter()
        .zip(v.values().iter().copied())
        .collect()
}

fn flow(out: &Output, a: FlowArgs) -> Run {
    check_positive("alpha", a.alpha)?;
    check_positive("dt", a.dt)?;
    check_grid("n", a.n)?;
    if !(a.t_end >= 0.0 && a.t_end.is_finite()) {
        return usage("--t-end must be finite and >= 0");
    }
    if a.stride == 0 {
        return usage("--stride must be >= 1");
    }
    let config = FlowConfig::default();
    let traj = match a.form {
        Form::V => {
            let v0 = initial_data(&a.init, Parity::Odd, a.n)?;
            rg_flow::evolve_with(&v0, a.alpha, a.t_end, a.dt, a.stride, &config)
        }
        Form::UTilde => {
            let u0 = initial_data(&a.init, Parity::Even, a.n)?;
            rg_flow::evolve_u_tilde_with(&u0, a.alpha, a.t_end, a.dt, a.stride, &config)
        }
    }
    .context("flow integration")?;
    let v_final = match a.form {
        Form::V => traj.last().v.clone(),
        Form::UTilde => traj.last().v.differentiate(),
    };
    let (attractor, distance) = identify_attractor(&v_final, a.alpha)?;
    let summary = traj.summary();
    let header = out.header("flow", &a);
    out.write("flow_trajectory.csv", &header.csv(&traj.to_csv()))?;
    out.write(
        "flow_summary.json",
        &header.json(json!({
            "summary": summary,
            "form": a.form,
            "final_time": traj.last().t,
            "snapshots": traj.states.len(),
            "attractor": attractor,
            "attractor_h1_distance": distance,
            "monitor_warning": traj.monitor_warning,
        })),
    )?;
    out.plot("flow.dat", &header, "x final_profile", &final_profile(&traj))?;
    println!(
        "converged = {}, attractor = {attractor} (H1 distance {distance:.3e}), final residual {:.3e}",
        summary.converged, summary.final_residual
    );
    Ok(())
}

fn check_branch(alpha: f64, j: u32) -> Run {
    check_positive("alpha", alpha)?;
    if j == 0 {
        return usage("--j must be >= 1");
    }
    Ok(())
}

fn equilibrium(out: &Output, a: EquilibriumArgs) -> Run {
    check_branch(a.alpha, a.j)?;
    let orbit = match a.n {
        Some(n) => {
            check_grid("n", n)?;
            equilibria::reconstruct_orbit_on(a.alpha, a.j, a.sign.into(), n)
        }
        None => equilibria::reconstruct_orbit(a.alpha, a.j, a.sign.into()),
    }
    .with_context(|| format!("reconstructing {}", branch_name(a.j, a.sign.into())))?;
    let header = out.header("equilibrium", &a);
    out.write("equilibrium_orbit.csv", &header.csv(&orbit.to_csv()))?;
    let report = json!({
        "branch": branch_name(orbit.j, orbit.sign),
        "w0": orbit.w0,
        "w_hat": orbit.branch.w_hat,
        "separatrix_gap": orbit.branch.gap,
        "energy": orbit.energy,
        "period": orbit.period,
        "grid": orbit.grid(),
        "h2_residual": orbit.h2_residual,
        "energy_drift": orbit.energy_drift,
        "closure": orbit.closure,
        "stationary_residual": orbit.stationary_residual(),
    });
    out.write("equilibrium_report.json", &header.json(report))?;
    let pts: Vec<(f64, f64)> = hierarg::field_grid::grid_points(orbit.grid())
        .into_iter()
        .zip(orbit.psi.values().iter().copied())
        .collect();
    out.plot("equilibrium.dat", &header, "x psi", &pts)?;
    println!(
        "{}: w_hat = {}, h2 residual {:.3e}, stationary residual {:.3e}",
        branch_name(orbit.j, orbit.sign),
        fmt17(orbit.branch.w_hat),
        orbit.h2_residual,
        orbit.stationary_residual()
    );
    Ok(())
}

fn bifurcation(out: &Output, a: BifurcationArgs) -> Run {
    check_branch(a.alpha_min, a.j)?;
    let threshold = equilibria::branch_threshold(a.j);
    if !(a.alpha_max > a.alpha_min && a.alpha_max < threshold) {
        return usage(format!(
            "need alpha-min < alpha-max < 2/j^2 = {threshold}, got [{}, {}]",
            a.alpha_min, a.alpha_max
        ));
    }
    if a.steps < 2 {
        return usage("--steps must be >= 2");
    }
    let h = (a.alpha_max - a.alpha_min) / (a.steps - 1) as f64;
    let points = (0..a.steps)
        .into_par_iter()
        .map(|i| {
            let alpha = if i + 1 == a.steps { a.alpha_max } else { a.alpha_min + h * i as f64 };
            equilibria::branch_point(alpha, a.j).with_context(|| format!("w_hat at alpha = {alpha}"))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let header = out.header("bifurcation", &a);
    out.write("bifurcation.csv", &header.csv(&equilibria::bifurcation_csv(&points)))?;
    if a.j == 1 {
        out.write("separatrix_gap.csv", &header.csv(&equilibria::separatrix_gap_csv(&points)))?;
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|b| (b.alpha, b.w_hat)).collect();
    out.plot("bifurcation.dat", &header, "alpha w_hat", &pts)?;
    println!("{} points on branch j = {}", points.len(), a.j);
    Ok(())
}

/// Resolves `--branch`: `None` for the trivial equilibrium, else the orbit.
fn background_orbit(b: &BranchArgs) -> Run<Option<EquilibriumOrbit>> {
    check_positive("alpha", b.alpha)?;
    if b.branch == "trivial" {
        return Ok(None);
    }
    let j: u32 = match b.branch.parse() {
        Ok(j) if j >= 1 => j,
        _ => return usage(format!("--branch must be 'trivial' or an integer >= 1, got '{}'", b.branch)),
    };
    let orbit = equilibria::reconstruct_orbit(b.alpha, j, b.sign.into())
        .with_context(|| format!("reconstructing {}", branch_name(j, b.sign.into())))?;
    Ok(Some(orbit))
}

fn background(orbit: &Option<EquilibriumOrbit>) -> Background<'_> {
    orbit.as_ref().map_or(Background::Zero, Background::Orbit)
}

fn spectrum(out: &Output, a: SpectrumArgs) -> Run {
    if !(1..=10).contains(&a.k) {
        return usage(format!("--k must be in 1..=10, got {}", a.k));
    }
    check_grid("n", a.n)?;
    let orbit = background_orbit(&a.branch)?;
    let bg = background(&orbit);
    let m = stability::assemble_l(bg, a.branch.alpha, a.n).context("assembling the operator")?;
    let report = stability::smallest_eigenvalues(&m, a.k).context("eigenvalue computation")?;
    let export = SpectrumExport::new(a.branch.alpha, bg, &report);
    let header = out.header("spectrum", &a);
    out.write(
        "spectrum.json",
        &header.json(json!({ "spectrum": export, "raw": report.resolution_estimate })),
    )?;
    let pts: Vec<(f64, f64)> = report
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, l)| ((i + 1) as f64, *l))
        .collect();
    out.plot("spectrum.dat", &header, "index eigenvalue", &pts)?;
    let shown: Vec<String> = report.eigenvalues.iter().map(|l| format!("{l:.6}")).collect();
    println!("eigenvalues [{}], negative count {}", shown.join(", "), report.negative_count);
    Ok(())
}

fn criterium(out: &Output, a: BranchArgs) -> Run {
    let orbit = background_orbit(&a)?;
    let result = stability::criterium_phi(background(&orbit), a.alpha).context("shooting")?;
    let header = out.header("criterium", &a);
    out.write("criterium_trace.csv", &header.csv(&result.to_csv()))?;
    out.write(
        "criterium.json",
        &header.json(json!({
            "verdict": result.verdict,
            "first_zero": result.first_zero,
            "wronskian_deviation": result.wronskian_deviation,
            "wronskian_constant": result.wronskian_constant,
        })),
    )?;
    out.plot("criterium.dat", &header, "x phi", &result.trace)?;
    println!(
        "verdict {:?}, first zero {}",
        result.verdict,
        result.first_zero.map_or("none".to_string(), fmt17)
    );
    Ok(())
}

fn liapunov(out: &Output, a: LiapunovArgs) -> Run {
    check_positive("alpha", a.alpha)?;
    check_positive("dt", a.dt)?;
    check_grid("n", a.n)?;
    if !(a.t_end >= 0.0 && a.t_end.is_finite()) {
        return usage("--t-end must be finite and >= 0");
    }
    if a.stride == 0 {
        return usage("--stride must be >= 1");
    }
    let v0 = initial_data(&a.init, Parity::Odd, a.n)?;
    let traj = rg_flow::evolve(&v0, a.alpha, a.t_end, a.dt, a.stride).context("flow integration")?;
    let mut rows = Vec::with_capacity(traj.states.len());
    for s in &traj.states {
        let v = stability::liapunov_v(&s.v, a.alpha).with_context(|| format!("V at t = {}", s.t))?;
        let vdot = stability::liapunov_vdot(s).with_context(|| format!("Vdot at t = {}", s.t))?;
        rows.push((s.t, v, vdot));
    }
    let mut csv = String::from("t,V,Vdot\n");
    for (t, v, d) in &rows {
        csv.push_str(&format!("{},{},{}\n", fmt17(*t), fmt17(*v), fmt17(*d)));
    }
    let max_increase = rows.windows(2).map(|w| w[1].1 - w[0].1).fold(f64::NEG_INFINITY, f64::max);
    let max_vdot = rows.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let monotone = max_increase <= LIAPUNOV_SLACK && max_vdot <= 0.0;
    let header = out.header("liapunov", &a);
    out.write("liapunov.csv", &header.csv(&csv))?;
    out.write(
        "liapunov.json",
        &header.json(json!({
            "monotone": monotone,
            "max_increase": if rows.len() > 1 { Some(max_increase) } else { None },
            "max_vdot": max_vdot,
            "slack": LIAPUNOV_SLACK,
        })),
    )?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.0, r.1)).collect();
    out.plot("liapunov.dat", &header, "t V", &pts)?;
    if !monotone {
        return Err(Failure::Numerical(anyhow::anyhow!(
            "V is not nonincreasing: largest increase {max_increase:e}, largest Vdot {max_vdot:e}"
        )));
    }
    println!("V nonincreasing over {} snapshots", rows.len());
    Ok(())
}

fn discrete(out: &Output, a: DiscreteArgs) -> Run {
    check_positive("beta", a.beta)?;
    check_positive("z", a.z)?;
    check_grid("m", a.m)?;
    if !(a.t >= 0.0 && a.t.is_finite()) {
        return usage("--t must be finite and >= 0");
    }
    if a.n_list.is_empty() || a.n_list.contains(&0) || a.n_list.windows(2).any(|w| w[1] <= w[0]) {
        return usage("--n-list must be a strictly ascending list of positive integers");
    }
    let kind = match a.kind {
        KindArg::Hardcore => ActivityKind::Hardcore,
        KindArg::Bessel => ActivityKind::Bessel,
    };
    let table = discrete_rg::continuum_compare_with(kind, a.beta, a.z, a.t, &a.n_list, a.m)
        .context("discrete-to-continuum comparison")?;
    let header = out.header("discrete", &a);
    out.write("discrete.csv", &header.csv(&table.to_csv()))?;
    out.write(
        "discrete.json",
        &header.json(json!({ "table": table, "gap_ratios": table.ratios() })),
    )?;
    let pts: Vec<(f64, f64)> = table.rows.iter().map(|r| (r.n as f64, r.sup_gap)).collect();
    out.plot("discrete.dat", &header, "n sup_gap", &pts)?;
    for r in &table.rows {
        println!("n = {:5}  sup gap {:.6e}", r.n, r.sup_gap);
    }
    Ok(())
}

fn phase_portrait(out: &Output, a: PhaseArgs) -> Run {
    check_positive("alpha", a.alpha)?;
    check_positive("x-end", a.x_end)?;
    if a.samples == 0 {
        return usage("--samples must be >= 1");
    }
    if let Some(w) = a.w0.iter().find(|w| !w.is_finite()) {
        return usage(format!("--w0 values must be finite, got {w}"));
    }
    let orbits: Vec<_> = a
        .w0
        .par_iter()
        .map(|&w0| {
            let query = OrbitQuery { alpha: a.alpha, w0 };
            let class = equilibria::classify_orbit(query);
            let period = match class {
                OrbitClass::Closed => equilibria::period(query).ok().map(|p| p.period),
                _ => None,
            };
            (w0, class, period, equilibria::phase_trace(a.alpha, w0, a.x_end, a.samples))
        })
        .collect();
    let header = out.header("phase-portrait", &a);
    let mut csv = String::from("w0,class,x,w,p\n");
    let mut blocks = Vec::with_capacity(orbits.len());
    for (w0, class, _, trace) in &orbits {
        let label = serde_json::to_value(class).expect("plain enum");
        let label = label.as_str().unwrap_or_default();
        for [x, w, p] in trace {
            csv.push_str(&format!("{},{label},{},{},{}\n", fmt17(*w0), fmt17(*x), fmt17(*w), fmt17(*p)));
        }
        blocks.push(trace.iter().map(|y| (y[1], y[2])).collect::<Vec<_>>());
    }
    out.write("phase_portrait.csv", &header.csv(&csv))?;
    let summary: Vec<_> = orbits
        .iter()
        .map(|(w0, class, period, trace)| {
            json!({ "w0": w0, "class": class, "period": period, "samples": trace.len() })
        })
        .collect();
    out.write("phase_portrait.json", &header.json(json!({ "orbits": summary })))?;
    out.plot_blocks("phase_portrait.dat", &header, "w p", &blocks)?;
    for (w0, class, period, _) in &orbits {
        println!("w0 = {w0}: {class:?}{}", period.map_or(String::new(), |p| format!(", period {p:.12}")));
    }
    Ok(())
}
