//! Stationary solutions of the flow and the auxiliary Hamiltonian system.
//!
//! An equilibrium `ψ` solves `α(ψ″ − 2ψψ′) + 2ψ = 0`. With `w = ψ′`, `p = ψ`
//! the phase system is `w′ = 2p(w − α⁻¹)`, `p′ = w`. In the coordinate
//! `q = ln(1 − αw)` it becomes Hamiltonian:
//!
//! ```text
//! q′ = 2p,   p′ = −(e^q − 1)/α,   H = α p² + v(q),   v(q) = e^q − q − 1.
//! ```
//!
//! The orbit through `(w0, 0)` has energy `E = −αw0 − ln(1 − αw0) = v(q0)` and
//! period `T = √α · T̃(E)` with `T̃(E) = ∫ dq / √(E − v(q))` between the two
//! turning points. Working in `q` matters for small `α`: the branch `ŵ₁(α)`
//! approaches `α⁻¹` so closely that `1 − αŵ₁` is below the resolution of `w`
//! (about `e^{−60}` at `α = 0.15`), while `q0 = ln(1 − αŵ₁)` is an ordinary
//! number.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_grid::{check_grid, fmt17, grid_points, GridFunction, Parity, DEFAULT_GRID};
use crate::ode::{rk4_step, CompensatedRk4};
use crate::quadrature::tanh_sinh;
use crate::spectral::TrigPlan;

/// Relative tolerance handed to the period quadrature.
const QUAD_TOL: f64 = 1e-14;
/// Target for the orbit integrator's Hamiltonian drift.
const DRIFT_TARGET: f64 = 1e-11;
/// Accuracy limits for reconstructed orbits.
const H2_LIMIT: f64 = 1e-8;
const CLOSURE_LIMIT: f64 = 1e-8;
const STATIONARY_TARGET: f64 = 1e-8;
const MAX_ORBIT_GRID: usize = 8192;

/// `v(q) = e^q − q − 1`, accurate to relative rounding also near `q = 0`.
pub fn potential_v(q: f64) -> f64 {
    if q.abs() < 0.1 {
        let mut term = q * q / 2.0;
        let mut sum = term;
        for k in 3..20 {
            term *= q / k as f64;
            sum += term;
        }
        sum
    } else {
        q.exp_m1() - q
    }
}

/// `v(a) − v(a + d)` without forming `v(a)` and `v(a + d)` separately.
fn potential_drop(a: f64, d: f64) -> f64 {
    if a.abs() <= 1.0 {
        -a.exp_m1() * d.exp_m1() - potential_v(d)
    } else {
        d - a.exp() * d.exp_m1()
    }
}

/// Energy of the orbit through `(w0, 0)`: `E = −αw0 − ln(1 − αw0)`.
pub fn energy_from_w0(alpha: f64, w0: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let wb = alpha * w0;
    if !(wb < 1.0) {
        return Err(Error::OutOfDomain(format!(
            "alpha*w0 = {wb} >= 1: the orbit is not closed"
        )));
    }
    Ok(potential_v((-wb).ln_1p()))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")))
    }
}

/// Roots `q_− < 0 < q_+` of `v(q) = E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoints {
    pub q_minus: f64,
    pub q_plus: f64,
    /// `E ≤ 0`: both roots collapse to the minimum `q = 0`.
    pub degenerate: bool,
}

pub fn turning_points(energy: f64) -> TurningPoints {
    if !(energy > 0.0) {
        return TurningPoints {
            q_minus: 0.0,
            q_plus: 0.0,
            degenerate: true,
        };
    }
    let s = (2.0 * energy).sqrt();
    let q_plus = safeguarded_newton(energy, (1.0 + energy).ln().min(s), s.min((2.0 * (1.0 + energy)).ln()));
    let q_minus = safeguarded_newton(energy, -(energy + 1.0), -s);
    TurningPoints {
        q_minus,
        q_plus,
        degenerate: false,
    }
}

/// Root of `v(q) = E` in `[lo, hi]`, where `v − E` changes sign.
fn safeguarded_newton(energy: f64, mut lo: f64, mut hi: f64) -> f64 {
    let f = |q: f64| potential_v(q) - energy;
    let rising = f(hi) > f(lo);
    let mut q = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fq = f(q);
        if fq == 0.0 {
            return q;
        }
        if (fq > 0.0) == rising {
            hi = q;
        } else {
            lo = q;
        }
        let newton = q - fq / q.exp_m1();
        let next = if newton > lo && newton < hi && newton.is_finite() {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - q).abs() <= 1e-16 * q.abs() || hi - lo <= 1e-16 * q.abs() {
            return next;
        }
        q = next;
    }
    q
}

/// `T̃(E) = ∫_{q−}^{q+} dq / √(E − v(q))` and its estimated absolute error.
pub fn period_tilde(energy: f64) -> Result<(f64, f64)> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "period integral needs E > 0, got {energy}"
        )));
    }
    let tp = turning_points(energy);
    let (qm, qp) = (tp.q_minus, tp.q_plus);
    // Near each turning point the integrand is measured from the computed root,
    // i.e. against the energy v(q±) it represents exactly. Using E there would
    // leave a sliver of width |E − v(q±)|/v′ where the radicand is negative,
    // costing about its square root in accuracy.

    let left = tanh_sinh(
        |_, from_qm, from_zero| {
            let gap = if from_qm < from_zero {
                potential_drop(qm, from_qm)
            } else {
                energy - potential_v(-from_zero)
            };
            1.0 / gap.max(f64::MIN_POSITIVE).sqrt()
        },
        qm,
        0.0,
        QUAD_TOL,
    );
    let right = tanh_sinh(
        |_, from_zero, from_qp| {
            let gap = if from_qp < from_zero {
                potential_drop(qp, -from_qp)
            } else {
                energy - potential_v(from_zero)
            };
            1.0 / gap.max(f64::MIN_POSITIVE).sqrt()
        },
        0.0,
        qp,
        QUAD_TOL,
    );
    Ok((
        left.value + right.value,
        left.error_estimate + right.error_estimate,
    ))
}

/// Label of a phase-plane orbit: slope `w0` at the crossing of the `w`-axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitQuery {
    pub alpha: f64,
    pub w0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodResult {
    pub period: f64,
    pub energy: f64,
    pub q_minus: f64,
    pub q_plus: f64,
    pub quadrature_error: f64,
    /// `w0 = 0`: the linearized period `2π√(α/2)` is returned.
    pub limit: bool,
}

/// Period `T(α, w0) = √α · T̃(E)` of the closed orbit through `(w0, 0)`.
pub fn period(query: OrbitQuery) -> Result<PeriodResult> {
    let energy = energy_from_w0(query.alpha, query.w0)?;
    let sa = query.alpha.sqrt();
    if energy == 0.0 {
        return Ok(PeriodResult {
            period: 2.0 * PI * (query.alpha / 2.0).sqrt(),
            energy,
            q_minus: 0.0,
            q_plus: 0.0,
            quadrature_error: 0.0,
            limit: true,
        });
    }
    let (tt, err) = period_tilde(energy)?;
    let tp = turning_points(energy);
    Ok(PeriodResult {
        period: sa * tt,
        energy,
        q_minus: tp.q_minus,
        q_plus: tp.q_plus,
        quadrature_error: sa * err,
        limit: false,
    })
}

/// A point `(α, ŵ_j(α))` of branch `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub alpha: f64,
    pub j: u32,
    pub energy: f64,
    /// `q0 = ln(1 − αŵ_j)`, the negative turning point.
    pub q0: f64,
    pub w_hat: f64,
    /// `α⁻¹ − ŵ_j`, computed without cancellation.
    pub gap: f64,
    pub period: f64,
}

/// `2/j²`, where branch `j` bifurcates from the trivial solution.
pub fn branch_threshold(j: u32) -> f64 {
    2.0 / (j as f64 * j as f64)
}

/// The unique root `ŵ_j(α)` of `T(α, w0) = 2π/j`.
pub fn w_hat(alpha: f64, j: u32) -> Result<f64> {
    branch_point(alpha, j).map(|b| b.w_hat)
}

/// Solves `T̃(E) = 2π/(j√α)` by bisection in `E` (`T̃` is strictly increasing)
/// followed by one linear interpolation inside the final bracket.
pub fn branch_point(alpha: f64, j: u32) -> Result<BranchPoint> {
    check_alpha(alpha)?;
    if j == 0 {
        return Err(Error::InvalidArgument("branch index j must be >= 1".into()));
    }
    let threshold = branch_threshold(j);
    if alpha >= threshold {
        return Err(Error::NoBranch {
            alpha,
            j,
            threshold,
        });
    }
    let target = 2.0 * PI / (j as f64 * alpha.sqrt());
    let g = |e: f64| period_tilde(e).map(|(t, _)| t - target);

    let (mut lo, mut hi) = (0.25, 1.0);
    if g(hi)? < 0.0 {
        while g(hi)? < 0.0 {
            lo = hi;
            hi *= 4.0;
            if hi > 1e8 {
                return Err(Error::Convergence("energy bracket for w_hat".into()));
            }
        }
    } else {
        while g(lo)? >= 0.0 {
            hi = lo;
            lo *= 0.25;
            if lo < 1e-300 {
                return Err(Error::Convergence("energy bracket for w_hat".into()));
            }
        }
    }
    let (mut glo, mut ghi) = (g(lo)?, g(hi)?);
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi {
            break;
        }
        let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let gm = g(mid)?;
        if gm < 0.0 {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
            ghi = gm;
        }
    }
    let energy = if ghi > glo {
        (lo - glo * (hi - lo) / (ghi - glo)).clamp(lo, hi)
    } else {
        0.5 * (lo + hi)
    };
    let q0 = turning_points(energy).q_minus;
    Ok(BranchPoint {
        alpha,
        j,
        energy,
        q0,
        w_hat: -q0.exp_m1() / alpha,
        gap: q0.exp() / alpha,
        period: alpha.sqrt() * period_tilde(energy)?.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A reconstructed equilibrium `ψ_j^±` sampled on the grid `x_k = πk/N`.
#[derive(Debug, Clone)]
pub struct EquilibriumOrbit {
    pub alpha: f64,
    pub j: u32,
    pub sign: Sign,
    /// `ψ′(0)`.
    pub w0: f64,
    pub energy: f64,
    pub period: f64,
    pub branch: BranchPoint,
    pub psi: GridFunction,
    pub psi_prime: GridFunction,
    /// `q(x_k) = ln(1 − αψ′(x_k))`.
    pub q: Vec<f64>,
    /// Largest `|H − E|` seen along the integration.
    pub energy_drift: f64,
    /// Largest residual of the orbit equation, `|H − E|/α`.
    pub h2_residual: f64,
    /// `|ψ(2π/j)|`.
    pub closure: f64,
    /// RK4 steps per grid interval.
    substeps: usize,
}

impl EquilibriumOrbit {
    fn start(&self) -> [f64; 2] {
        [self.q[0], 0.0]
    }

    /// `q(0)`; also `ln p(x) = q(0) − q(x)` for the stability weight.
    pub fn q_start(&self) -> f64 {
        self.q[0]
    }

    pub fn grid(&self) -> usize {
        self.psi.grid()
    }

    /// `(q, p)` on the grid `πk/n`, `k = 0..=n`, integrated afresh with the
    /// same step as the reconstruction (or finer).
    pub fn sample(&self, n: usize) -> Vec<[f64; 2]> {
        let h_target = PI / (self.grid() * self.substeps) as f64;
        let m = ((PI / n as f64) / h_target).ceil().max(1.0) as usize;
        integrate_nodes(self.alpha, self.start(), PI / n as f64, n, m).0
    }

    /// Step length used by the reconstruction.
    pub fn step(&self) -> f64 {
        PI / (self.grid() * self.substeps) as f64
    }

    /// `‖α(ψ″ − 2ψψ′) + 2ψ‖_{L2}` with `ψ″` from spectral differentiation of `ψ′`.
    pub fn stationary_residual(&self) -> f64 {
        let d2 = self.psi_prime.differentiate();
        let vals: Vec<f64> = (0..=self.grid())
            .map(|k| {
                let (p, w) = (self.psi.values()[k], self.psi_prime.values()[k]);
                self.alpha * (d2.values()[k] - 2.0 * p * w) + 2.0 * p
            })
            .collect();
        let r = GridFunction::from_values_with(&TrigPlan::new(self.grid()), &vals, Parity::Odd);
        r.norm(crate::NormKind::L2)
    }

    /// `x, psi, psi_prime` rows on `[0, π]`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,psi,psi_prime\n");
        for (k, x) in grid_points(self.grid()).iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt17(*x),
                fmt17(self.psi.values()[k]),
                fmt17(self.psi_prime.values()[k])
            );
        }
        out
    }
}

fn hamilton_rhs(alpha: f64) -> impl Fn(&[f64; 2]) -> [f64; 2] {
    move |y: &[f64; 2]| [2.0 * y[1], -y[0].exp_m1() / alpha]
}

fn hamiltonian(alpha: f64, y: &[f64; 2]) -> f64 {
    alpha * y[1] * y[1] + potential_v(y[0])
}

/// Integrates `steps` node intervals of length `dx`, `m` RK4 steps each.
/// Returns the node states and the largest Hamiltonian drift.
fn integrate_nodes(
    alpha: f64,
    start: [f64; 2],
    dx: f64,
    steps: usize,
    m: usize,
) -> (Vec<[f64; 2]>, f64) {
    let f = hamilton_rhs(alpha);
    let e = hamiltonian(alpha, &start);
    let h = dx / m as f64;
    let mut rk = CompensatedRk4::new(start);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(start);
    let mut drift = 0.0_f64;
    for _ in 0..steps {
        for _ in 0..m {
            rk.step(&f, h);
        }
        drift = drift.max((hamiltonian(alpha, &rk.y) - e).abs());
        out.push(rk.y);
    }
    (out, drift)
}

/// Reconstructs `ψ_j^±` on the default grid, doubled until the stationary
/// residual is resolved. Orbits close to the separatrix have a sharp turn near
/// `x = π` (width about `α e^{−q_+}`) that 256 points do not resolve.
pub fn reconstruct_orbit(alpha: f64, j: u32, sign: Sign) -> Result<EquilibriumOrbit> {
    let mut n = DEFAULT_GRID;
    loop {
        let orbit = reconstruct_orbit_on(alpha, j, sign, n)?;
        if orbit.stationary_residual() < STATIONARY_TARGET || n >= MAX_ORBIT_GRID {
            return Ok(orbit);
        }
        n *= 2;
    }
}

/// Reconstructs `ψ_j^±` on the grid `x_k = πk/n`.
///
/// `ψ_j⁺` starts at the negative turning point `(q0, 0)`, i.e. `ψ′(0) = ŵ_j`;
/// `ψ_j⁻` starts at the positive turning point of the same closed orbit.
pub fn reconstruct_orbit_on(alpha: f64, j: u32, sign: Sign, n: usize) -> Result<EquilibriumOrbit> {
    check_grid(n)?;
    let branch = branch_point(alpha, j)?;
    let tp = turning_points(branch.energy);
    let q_start = match sign {
        Sign::Plus => tp.q_minus,
        Sign::Minus => tp.q_plus,
    };
    let start = [q_start, 0.0];
    let energy = hamiltonian(alpha, &start);
    let period = branch.period;

    let dx = PI / n as f64;
    let h_nominal = period / (4096.0 * j as f64);
    let mut m = (dx / h_nominal).ceil().max(1.0) as usize;
    // Halve the step until the drift meets its target or stops improving
    // (the rounding floor); keep the best run.
    let mut best: Option<(Vec<[f64; 2]>, f64, f64, usize)> = None;
    loop {
        let (nodes, drift_nodes) = integrate_nodes(alpha, start, dx, n, m);
        let k = ((period / dx) * m as f64).ceil() as usize;
        let (end, drift_closure) = integrate_nodes(alpha, start, period / k as f64, k, 1);
        let drift = drift_nodes.max(drift_closure);
        let closure = end[k][1].abs();
        let improved = best.as_ref().is_none_or(|b| drift < b.1);
        if improved {
            best = Some((nodes, drift, closure, m));
        }
        if drift < DRIFT_TARGET || !improved || m >= 1 << 14 {
            break;
        }
        m *= 2;
    }
    let (nodes, drift, closure, m) = best.expect("at least one integration run");
    let q: Vec<f64> = nodes.iter().map(|y| y[0]).collect();
    let mut psi_vals: Vec<f64> = nodes.iter().map(|y| y[1]).collect();
    psi_vals[0] = 0.0;
    psi_vals[n] = 0.0;
    let w_vals: Vec<f64> = q.iter().map(|q| -q.exp_m1() / alpha).collect();
    let plan = TrigPlan::new(n);
    let psi = GridFunction::from_values_with(&plan, &psi_vals, Parity::Odd);
    let psi_prime = GridFunction::from_values_with(&plan, &w_vals, Parity::Even);

    let orbit = EquilibriumOrbit {
        alpha,
        j,
        sign,
        w0: w_vals[0],
        energy,
        period,
        branch,
        psi,
        psi_prime,
        q,
        energy_drift: drift,
        h2_residual: drift / alpha,
        closure,
        substeps: m,
    };
    if orbit.h2_residual >= H2_LIMIT {
        return Err(Error::Accuracy {
            what: "orbit-equation residual",
            value: orbit.h2_residual,
            x: worst_drift_x(alpha, &nodes, energy, dx),
            limit: H2_LIMIT,
        });
    }
    if orbit.closure >= CLOSURE_LIMIT {
        return Err(Error::Accuracy {
            what: "closure |psi(2pi/j)|",
            value: orbit.closure,
            x: period,
            limit: CLOSURE_LIMIT,
        });
    }
    Ok(orbit)
}

fn worst_drift_x(alpha: f64, nodes: &[[f64; 2]], energy: f64, dx: f64) -> f64 {
    let (k, _) = nodes
        .iter()
        .map(|y| (hamiltonian(alpha, y) - energy).abs())
        .enumerate()
        .fold((0, 0.0), |best, (k, d)| if d > best.1 { (k, d) } else { best });
    k as f64 * dx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitClass {
    /// The critical point `(0, 0)`.
    Point,
    Closed,
    Separatrix,
    Unbounded,
}

pub fn classify_orbit(query: OrbitQuery) -> OrbitClass {
    let wb = query.alpha * query.w0;
    if query.w0 == 0.0 {
        OrbitClass::Point
    } else if (wb - 1.0).abs() <= 1e-14 {
        OrbitClass::Separatrix
    } else if wb < 1.0 {
        OrbitClass::Closed
    } else {
        OrbitClass::Unbounded
    }
}

/// Phase-plane trace `(x, w, p)` of the orbit through `(w0, 0)` over `[0, x_end]`.
/// Unbounded orbits stop once `αw` reaches 1.
pub fn phase_trace(alpha: f64, w0: f64, x_end: f64, samples: usize) -> Vec<[f64; 3]> {
    let f = move |y: &[f64; 2]| [2.0 * y[1] * (y[0] - 1.0 / alpha), y[0]];
    let per = 16;
    let h = x_end / (samples * per) as f64;
    let mut y = [w0, 0.0];
    let mut out = vec![[0.0, y[0], y[1]]];
    for k in 1..=samples {
        for _ in 0..per {
            y = rk4_step(&f, &y, h);
        }
        if !y[0].is_finite() || !y[1].is_finite() || y[0].abs() > 1e8 || y[1].abs() > 1e8 {
            break;
        }
        out.push([k as f64 * x_end / samples as f64, y[0], y[1]]);
    }
    out
}

/// `g(q) = e^{2q} + 4(1 − q)e^q − 2q − 5`, the sign function of the period
/// monotonicity criterion. Uses its Taylor series `Σ_{k≥4} (2^k − 4k + 4) q^k/k!`
/// near zero, where the closed form cancels.
pub fn chicone_g(q: f64) -> f64 {
    if q.abs() < 1.0 {
        let mut fact = 24.0;
        let mut pow = q.powi(4);
        let mut sum = 0.0;
        for k in 4..60 {
            if k > 4 {
                fact *= k as f64;
                pow *= q;
            }
            let c = (2.0_f64).powi(k) - 4.0 * k as f64 + 4.0;
            sum += c * pow / fact;
        }
        sum
    } else {
        (2.0 * q).exp() + 4.0 * (1.0 - q) * q.exp() - 2.0 * q - 5.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiconeReport {
    /// Smallest `g` on the q-grid away from `q = 0`.
    pub g_min: f64,
    pub g_min_at: f64,
    pub g_at_zero: f64,
    /// `(E, dT̃/dE)` pairs.
    pub derivatives: Vec<(f64, f64)>,
}

/// Checks `g ≥ 0` on `[q_lo, q_hi]` (zero only at the origin) and `dT̃/dE > 0`
/// at each sampled energy by central differences.
pub fn chicone_check_on(energies: &[f64], q_lo: f64, q_hi: f64, q_points: usize) -> Result<ChiconeReport> {
    let mut g_min = f64::INFINITY;
    let mut g_min_at = f64::NAN;
    for i in 0..=q_points {
        let q = q_lo + (q_hi - q_lo) * i as f64 / q_points as f64;
        if q == 0.0 {
            continue;
        }
        let g = chicone_g(q);
        if g < g_min {
            g_min = g;
            g_min_at = q;
        }
    }
    if !(g_min > 0.0) {
        return Err(Error::PropertyViolation(format!(
            "g({g_min_at}) = {g_min:e} is not positive"
        )));
    }
    let mut derivatives = Vec::with_capacity(energies.len());
    for &e in energies {
        let h = 1e-5_f64.min(0.1 * e);
        let d = (period_tilde(e + h)?.0 - period_tilde(e - h)?.0) / (2.0 * h);
        if !(d > 0.0) {
            return Err(Error::PropertyViolation(format!(
                "dT/dE = {d:e} at E = {e} is not positive"
            )));
        }
        derivatives.push((e, d));
    }
    Ok(ChiconeReport {
        g_min,
        g_min_at,
        g_at_zero: chicone_g(0.0),
        derivatives,
    })
}

/// [`chicone_check_on`] over `q ∈ [−10, 5]`.
pub fn chicone_check(energies: &[f64]) -> Result<ChiconeReport> {
    chicone_check_on(energies, -10.0, 5.0, 15_000)
}

/// `alpha,j,w_hat,period,energy` rows.
pub fn bifurcation_csv(points: &[BranchPoint]) -> String {
    let mut out = String::from("alpha,j,w_hat,period,energy\n");
    for b in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt17(b.alpha),
            b.j,
            fmt17(b.w_hat),
            fmt17(b.period),
            fmt17(b.energy)
        );
    }
    out
}

/// Comparison of `ŵ₁` with the separatrix slope `α⁻¹`: `alpha,w_hat_1,inverse_alpha,difference`.
pub fn separatrix_gap_csv(points: &[BranchPoint]) -> String {
    let mut out = String::from("alpha,w_hat_1,inverse_alpha,difference\n");
    for b in points.iter().filter(|b| b.j == 1) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt17(b.alpha),
            fmt17(b.w_hat),
            fmt17(1.0 / b.alpha),
            fmt17(b.gap)
        );
    }
    out
}

/// Linearized period `2π√(α/2)` of orbits near the origin.
pub fn linear_period(alpha: f64) -> f64 {
    PI * SQRT_2 * alpha.sqrt()
}
