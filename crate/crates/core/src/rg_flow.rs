//! Time integration of the flow `v_t = α(v_xx − 2v v_x) + 2v` on odd functions
//! and of its integrated form for `ũ(t, x) = ∫₀ˣ v(t, y) dy`.
//!
//! In the sine basis the linear part is diagonal with symbol `−λ_n = 2 − αn²`,
//! stiff for large `n`. Both forms are advanced by the second-order exponential
//! Runge–Kutta scheme of Cox and Matthews: the linear factor `e^{−λ_n dt}` is
//! exact and the quadratic term `−α(v²)_x` (or `−α ũ_x²`) is evaluated
//! pseudospectrally on a 3/2-padded grid.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_grid::{differentiate_coeffs, fmt17, grid_points, Dealias, GridFunction, NormKind, Parity};

/// Tunable thresholds of an integration run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    /// Abort once `|v|` exceeds this anywhere on the grid.
    pub blowup_threshold: f64,
    /// The final state counts as converged when `‖v_t‖_{L2}` is below this.
    pub convergence_tol: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            blowup_threshold: 1e6,
            convergence_tol: 1e-10,
        }
    }
}

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_STRIDE: usize = 100;

/// `v(t, ·)` (or `ũ(t, ·)` for the integrated form) at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub t: f64,
    pub alpha: f64,
    pub v: GridFunction,
    pub dt: f64,
}

/// Maximum-principle diagnostics of one snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorRecord {
    pub t: f64,
    /// `max α v_x` over the grid; admissible when `< 1`.
    pub max_alpha_vx: f64,
    /// Smallest distance of `v` to the strip `α⁻¹(x − π) < v < α⁻¹x` over interior nodes.
    pub strip_margin: f64,
    pub slope_ok: bool,
    pub strip_ok: bool,
    pub l2: f64,
    /// `‖v_t‖_{L2}`.
    pub vt_l2: f64,
}

impl MonitorRecord {
    pub fn ok(&self) -> bool {
        self.slope_ok && self.strip_ok
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowForm {
    V,
    UTilde,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub form: FlowForm,
    pub alpha: f64,
    pub dt: f64,
    pub stride: usize,
    pub states: Vec<FlowState>,
    pub monitor_log: Vec<MonitorRecord>,
    /// `(t, ũ_xx(t, 0))` at every snapshot of a `ũ` run; empty for `v` runs.
    pub multiplier: Vec<(f64, f64)>,
    pub converged: bool,
    /// Some snapshot violated the maximum-principle bounds.
    pub monitor_warning: bool,
}

impl Trajectory {
    pub fn last(&self) -> &FlowState {
        self.states.last().expect("trajectories hold at least the initial state")
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    /// Long-format `t,x,v` rows.
    pub fn to_csv(&self) -> String {
        let name = match self.form {
            FlowForm::V => "v",
            FlowForm::UTilde => "u_tilde",
        };
        let mut out = format!("t,x,{name}\n");
        for s in &self.states {
            for (x, v) in grid_points(s.v.grid()).iter().zip(s.v.values()) {
                let _ = writeln!(out, "{},{},{}", fmt17(s.t), fmt17(*x), fmt17(*v));
            }
        }
        out
    }

    pub fn summary(&self) -> FlowSummary {
        FlowSummary {
            alpha: self.alpha,
            dt: self.dt,
            n: self.last().v.grid(),
            converged: self.converged,
            final_residual: self.monitor_log.last().map_or(f64::NAN, |m| m.vt_l2),
            decay_rate: decay_rate(self).ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSummary {
    pub alpha: f64,
    pub dt: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub converged: bool,
    pub final_residual: f64,
    pub decay_rate: Option<f64>,
}

/// `φ1(z) = (e^z − 1)/z` and `φ2(z) = (e^z − 1 − z)/z²`.
fn phi12(z: f64) -> (f64, f64) {
    if z.abs() < 1e-3 {
        let p1 = 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
        let p2 = 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0;
        (p1, p2)
    } else {
        let e = z.exp_m1();
        (e / z, (e - z) / (z * z))
    }
}

/// Precomputed ETD2RK coefficients for modes `1..N-1` with symbol `c_n = 2 − αn²`.
#[derive(Clone)]
struct Etd {
    c: Vec<f64>,
    e: Vec<f64>,
    h1: Vec<f64>,
    h2: Vec<f64>,
}

impl Etd {
    fn new(alpha: f64, n: usize, dt: f64) -> Self {
        let c: Vec<f64> = (1..n).map(|k| 2.0 - alpha * (k * k) as f64).collect();
        let mut e = Vec::with_capacity(c.len());
        let mut h1 = Vec::with_capacity(c.len());
        let mut h2 = Vec::with_capacity(c.len());
        for &ck in &c {
            let (p1, p2) = phi12(ck * dt);
            e.push((ck * dt).exp());
            h1.push(dt * p1);
            h2.push(dt * p2);
        }
        Etd { c, e, h1, h2 }
    }

    fn step(&self, a: &[f64], nonlinear: impl Fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
        let f0 = nonlinear(a);
        let pred: Vec<f64> = (0..a.len())
            .map(|i| self.e[i] * a[i] + self.h1[i] * f0[i])
            .collect();
        let f1 = nonlinear(&pred);
        (0..a.len())
            .map(|i| pred[i] + self.h2[i] * (f1[i] - f0[i]))
            .collect()
    }
}

/// One-step map of the `v`-form on a fixed grid.
#[derive(Clone)]
pub struct VStepper {
    alpha: f64,
    dt: f64,
    dealias: Dealias,
    etd: Etd,
}

impl VStepper {
    pub fn new(alpha: f64, n: usize, dt: f64) -> Result<Self> {
        crate::field_grid::check_grid(n)?;
        check_positive("alpha", alpha)?;
        check_positive("dt", dt)?;
        Ok(VStepper {
            alpha,
            dt,
            dealias: Dealias::new(n),
            etd: Etd::new(alpha, n, dt),
        })
    }

    fn n(&self) -> usize {
        self.dealias.base.n()
    }

    /// Sine coefficients of `−α(v²)_x`.
    fn nonlinear(&self, a: &[f64]) -> Vec<f64> {
        let sq = self.dealias.product_coeffs(Parity::Odd, a, Parity::Odd, a);
        (1..self.n()).map(|k| self.alpha * k as f64 * sq[k]).collect()
    }

    fn step_coeffs(&self, a: &[f64]) -> Vec<f64> {
        self.etd.step(a, |x| self.nonlinear(x))
    }

    /// Sine coefficients of `v_t`.
    fn rhs_coeffs(&self, a: &[f64]) -> Vec<f64> {
        let f = self.nonlinear(a);
        (0..a.len()).map(|i| self.etd.c[i] * a[i] + f[i]).collect()
    }

    /// Advances `v` by one step of length `dt`.
    pub fn step(&self, v: &GridFunction) -> Result<GridFunction> {
        self.check_input(v)?;
        Ok(GridFunction::from_coeffs_with(
            &self.dealias.base,
            Parity::Odd,
            self.step_coeffs(v.coeffs()),
        ))
    }

    /// `v_t = α(v_xx − 2v v_x) + 2v`.
    pub fn rhs(&self, v: &GridFunction) -> Result<GridFunction> {
        self.check_input(v)?;
        Ok(GridFunction::from_coeffs_with(
            &self.dealias.base,
            Parity::Odd,
            self.rhs_coeffs(v.coeffs()),
        ))
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn check_input(&self, v: &GridFunction) -> Result<()> {
        if v.parity() != Parity::Odd {
            return Err(Error::Parity("the v-form evolves odd functions"));
        }
        if v.grid() != self.n() {
            return Err(Error::InvalidArgument(format!(
                "stepper grid {} vs field grid {}",
                self.n(),
                v.grid()
            )));
        }
        Ok(())
    }
}

/// `v_t` from the right-hand side of the flow equation.
pub fn v_t(v: &GridFunction, alpha: f64) -> Result<GridFunction> {
    VStepper::new(alpha, v.grid(), 1.0)?.rhs(v)
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {x}")))
    }
}

/// Maximum-principle bounds: `α v_x < 1` on the grid and
/// `α⁻¹(x − π) < v < α⁻¹x` on interior nodes (both sides vanish at the ends).
pub fn check_monitors(v: &GridFunction, alpha: f64, t: f64) -> Result<MonitorRecord> {
    let vx = v.differentiate();
    let max_alpha_vx = vx.values().iter().fold(f64::NEG_INFINITY, |m, &d| m.max(alpha * d));
    let n = v.grid();
    let xs = grid_points(n);
    let mut margin = f64::INFINITY;
    for (x, val) in xs.iter().zip(v.values()).take(n).skip(1) {
        let upper = x / alpha - val;
        let lower = val - (x - std::f64::consts::PI) / alpha;
        margin = margin.min(upper).min(lower);
    }
    let rhs = v_t(v, alpha)?;
    Ok(MonitorRecord {
        t,
        max_alpha_vx,
        strip_margin: margin,
        slope_ok: max_alpha_vx < 1.0,
        strip_ok: margin > 0.0,
        l2: v.norm(NormKind::L2),
        vt_l2: rhs.norm(NormKind::L2),
    })
}

fn check_blowup(v: &GridFunction, t: f64, threshold: f64) -> Result<()> {
    let n = v.grid();
    for (k, val) in v.values().iter().enumerate() {
        if !(val.abs() <= threshold) {
            return Err(Error::BlowUp {
                t,
                x: std::f64::consts::PI * k as f64 / n as f64,
                threshold,
            });
        }
    }
    Ok(())
}

/// Advances a state by one step of its own `dt`.
pub fn step_v(s: &FlowState) -> Result<FlowState> {
    let stepper = VStepper::new(s.alpha, s.v.grid(), s.dt)?;
    let v = stepper.step(&s.v)?;
    let t = s.t + s.dt;
    check_blowup(&v, t, FlowConfig::default().blowup_threshold)?;
    Ok(FlowState {
        t,
        alpha: s.alpha,
        v,
        dt: s.dt,
    })
}

/// Number of steps and the step length that lands exactly on `t_end`.
fn step_plan(t_end: f64, dt: f64) -> Result<(usize, f64)> {
    check_positive("dt", dt)?;
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!("t_end must be >= 0, got {t_end}")));
    }
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    Ok(if steps == 0 { (0, dt) } else { (steps, t_end / steps as f64) })
}

pub fn evolve(v0: &GridFunction, alpha: f64, t_end: f64, dt: f64, stride: usize) -> Result<Trajectory> {
    evolve_with(v0, alpha, t_end, dt, stride, &FlowConfig::default())
}

/// Integrates the `v`-form from `v0` to `t_end`, recording every `stride` steps
/// (and the final step). Monitor violations are recorded, not fatal.
pub fn evolve_with(
    v0: &GridFunction,
    alpha: f64,
    t_end: f64,
    dt: f64,
    stride: usize,
    config: &FlowConfig,
) -> Result<Trajectory> {
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be >= 1".into()));
    }
    let (steps, dt) = step_plan(t_end, dt)?;
    let stepper = VStepper::new(alpha, v0.grid(), dt)?;
    stepper.check_input(v0)?;
    let mut traj = Trajectory {
        form: FlowForm::V,
        alpha,
        dt,
        stride,
        states: Vec::new(),
        monitor_log: Vec::new(),
        multiplier: Vec::new(),
        converged: false,
        monitor_warning: false,
    };
    let record = |traj: &mut Trajectory, t: f64, v: &GridFunction| -> Result<()> {
        let m = check_monitors(v, alpha, t)?;
        traj.monitor_warning |= !m.ok();
        traj.monitor_log.push(m);
        traj.states.push(FlowState {
            t,
            alpha,
            v: v.clone(),
            dt,
        });
        Ok(())
    };
    let mut v = v0.clone();
    record(&mut traj, 0.0, &v)?;
    let mut a = v0.coeffs().to_vec();
    for i in 1..=steps {
        a = stepper.step_coeffs(&a);
        if i % stride == 0 || i == steps {
            v = GridFunction::from_coeffs_with(&stepper.dealias.base, Parity::Odd, a.clone());
            let t = i as f64 * dt;
            check_blowup(&v, t, config.blowup_threshold)?;
            record(&mut traj, t, &v)?;
        } else if a.iter().any(|c| !(c.abs() <= config.blowup_threshold)) {
            let v = GridFunction::from_coeffs_with(&stepper.dealias.base, Parity::Odd, a.clone());
            check_blowup(&v, i as f64 * dt, config.blowup_threshold)?;
        }
    }
    traj.converged = traj.monitor_log.last().is_some_and(|m| m.vt_l2 < config.convergence_tol);
    Ok(traj)
}

/// One-step map of the `ũ`-form: cosine modes `1..N-1` evolve, the constant
/// term is then fixed by `ũ(t, 0) = 0` (the Lagrange multiplier `−α ũ_xx(t, 0)`
/// acts only on the constant mode).
struct UStepper {
    alpha: f64,
    dealias: Dealias,
    etd: Etd,
}

impl UStepper {
    fn n(&self) -> usize {
        self.dealias.base.n()
    }

    /// Cosine coefficients (modes `1..N-1`) of `−α ũ_x²`.
    fn nonlinear(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut full = vec![0.0; n + 1];
        full[1..n].copy_from_slice(b);
        let ux = differentiate_coeffs(Parity::Even, n, &full);
        let sq = self.dealias.product_coeffs(Parity::Odd, &ux, Parity::Odd, &ux);
        sq[1..n].iter().map(|c| -self.alpha * c).collect()
    }

    fn assemble(&self, b: &[f64]) -> GridFunction {
        let n = self.n();
        let mut full = vec![0.0; n + 1];
        full[1..n].copy_from_slice(b);
        full[0] = -b.iter().sum::<f64>();
        GridFunction::from_coeffs_with(&self.dealias.base, Parity::Even, full)
    }
}

/// `ũ_xx(0) = −Σ n² b_n`.
fn uxx_at_zero(u: &GridFunction) -> f64 {
    u.coeffs()
        .iter()
        .enumerate()
        .map(|(k, b)| -((k * k) as f64) * b)
        .sum()
}

/// Integrates the even form for `ũ` from `u0` (with `u0(0) = 0`).
pub fn evolve_u_tilde(u0: &GridFunction, alpha: f64, t_end: f64, dt: f64) -> Result<Trajectory> {
    evolve_u_tilde_with(u0, alpha, t_end, dt, 1, &FlowConfig::default())
}

pub fn evolve_u_tilde_with(
    u0: &GridFunction,
    alpha: f64,
    t_end: f64,
    dt: f64,
    stride: usize,
    config: &FlowConfig,
) -> Result<Trajectory> {
    if u0.parity() != Parity::Even {
        return Err(Error::Parity("the u-tilde form evolves even functions"));
    }
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be >= 1".into()));
    }
    let at_zero = u0.values()[0];
    if at_zero.abs() > 1e-12 * (1.0 + u0.max_abs()) {
        return Err(Error::InvalidArgument(format!(
            "u0(0) must vanish, got {at_zero:e}"
        )));
    }
    check_positive("alpha", alpha)?;
    let (steps, dt) = step_plan(t_end, dt)?;
    let n = u0.grid();
    let st = UStepper {
        alpha,
        dealias: Dealias::new(n),
        etd: Etd::new(alpha, n, dt),
    };
    let mut traj = Trajectory {
        form: FlowForm::UTilde,
        alpha,
        dt,
        stride,
        states: Vec::new(),
        monitor_log: Vec::new(),
        multiplier: Vec::new(),
        converged: false,
        monitor_warning: false,
    };
    let record = |traj: &mut Trajectory, t: f64, u: &GridFunction| -> Result<()> {
        let v = u.differentiate();
        let m = check_monitors(&v, alpha, t)?;
        traj.monitor_warning |= !m.ok();
        traj.monitor_log.push(m);
        traj.multiplier.push((t, uxx_at_zero(u)));
        traj.states.push(FlowState {
            t,
            alpha,
            v: u.clone(),
            dt,
        });
        Ok(())
    };
    let mut b = u0.coeffs()[1..n].to_vec();
    let u = st.assemble(&b);
    record(&mut traj, 0.0, &u)?;
    for i in 1..=steps {
        b = st.etd.step(&b, |x| st.nonlinear(x));
        if i % stride == 0 || i == steps {
            let u = st.assemble(&b);
            let t = i as f64 * dt;
            check_blowup(&u, t, config.blowup_threshold)?;
            record(&mut traj, t, &u)?;
        }
    }
    traj.converged = traj.monitor_log.last().is_some_and(|m| m.vt_l2 < config.convergence_tol);
    Ok(traj)
}

/// `u(t_end, ·)` reconstructed from a `ũ` trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredU {
    pub u: GridFunction,
    /// `u(t, 0) = α ∫₀ᵗ e^{2(t−s)} ũ_xx(s, 0) ds`.
    pub offset: f64,
    /// Set when the snapshot spacing exceeds `10⁻²`.
    pub warning: Option<String>,
}

/// Adds back the constant `u(t, 0) = α ∫₀ᵗ e^{2(t−s)} ũ_xx(s, 0) ds`, integrated
/// over the snapshot times (trapezoid rule with Gregory end corrections).
pub fn recover_u(traj: &Trajectory) -> Result<RecoveredU> {
    if traj.form != FlowForm::UTilde {
        return Err(Error::InvalidArgument("recover_u needs a u-tilde trajectory".into()));
    }
    let t_end = traj.last().t;
    let samples: Vec<f64> = traj
        .multiplier
        .iter()
        .map(|&(s, m)| (2.0 * (t_end - s)).exp() * m)
        .collect();
    let times: Vec<f64> = traj.multiplier.iter().map(|p| p.0).collect();
    let spacing = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let offset = traj.alpha * gregory(&times, &samples);
    let warning = (spacing > 1e-2 + 1e-12).then(|| {
        format!("snapshot spacing {spacing} exceeds 1e-2; time quadrature is inaccurate")
    });
    let last = &traj.last().v;
    let mut coeffs = last.coeffs().to_vec();
    coeffs[0] += offset;
    Ok(RecoveredU {
        u: GridFunction::from_coeffs(Parity::Even, last.grid(), coeffs)?,
        offset,
        warning,
    })
}

/// Trapezoid rule with third-order Gregory end corrections on uniform nodes;
/// plain trapezoid when the spacing is irregular or there are fewer than 6 nodes.
fn gregory(t: &[f64], f: &[f64]) -> f64 {
    let n = f.len();
    if n < 2 {
        return 0.0;
    }
    let h0 = t[1] - t[0];
    let uniform = t.windows(2).all(|w| ((w[1] - w[0]) - h0).abs() <= 1e-9 * h0);
    if n < 6 || !uniform {
        return t
            .windows(2)
            .zip(f.windows(2))
            .map(|(tw, fw)| 0.5 * (tw[1] - tw[0]) * (fw[0] + fw[1]))
            .sum();
    }
    let w = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];
    let mut s = 0.0;
    for (i, &fi) in f.iter().enumerate() {
        let j = i.min(n - 1 - i);
        s += fi * if j < 3 { w[j] } else { 1.0 };
    }
    h0 * s
}

/// Decay rate `−d ln‖v‖/dt` over the last decade of decay.
pub fn decay_rate(traj: &Trajectory) -> Result<f64> {
    let norms: Vec<f64> = traj.states.iter().map(|s| s.v.norm(NormKind::L2)).collect();
    fit_decay(&traj.times(), &norms)
}

/// Decay rate of `‖v(t) − reference‖`.
pub fn decay_rate_towards(traj: &Trajectory, reference: &GridFunction) -> Result<f64> {
    let mut norms = Vec::with_capacity(traj.states.len());
    for s in &traj.states {
        norms.push(s.v.sub(reference)?.norm(NormKind::L2));
    }
    fit_decay(&traj.times(), &norms)
}

fn fit_decay(times: &[f64], norms: &[f64]) -> Result<f64> {
    let last = *norms
        .last()
        .ok_or_else(|| Error::EstimationFailed("empty trajectory".into()))?;
    if !(last < 1e-3) {
        return Err(Error::EstimationFailed(format!(
            "final norm {last:e} is not in the linear regime (< 1e-3)"
        )));
    }
    if last == 0.0 {
        return Err(Error::EstimationFailed("final norm is exactly zero".into()));
    }
    let mut start = norms.len() - 1;
    while start > 0 && norms[start - 1] <= 10.0 * last {
        start -= 1;
    }
    start = start.saturating_sub(1);
    let (t, y): (Vec<f64>, Vec<f64>) = (start..norms.len()).map(|i| (times[i], norms[i].ln())).unzip();
    if t.len() < 3 {
        return Err(Error::EstimationFailed("fewer than three points in the last decade".into()));
    }
    if y.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::EstimationFailed("norm is not monotone over the fitted tail".into()));
    }
    let m = t.len() as f64;
    let tm = t.iter().sum::<f64>() / m;
    let ym = y.iter().sum::<f64>() / m;
    let sxy: f64 = t.iter().zip(&y).map(|(a, b)| (a - tm) * (b - ym)).sum();
    let sxx: f64 = t.iter().map(|a| (a - tm) * (a - tm)).sum();
    Ok(-sxy / sxx)
}
