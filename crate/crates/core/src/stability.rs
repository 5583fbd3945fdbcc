//! Linearized stability of equilibria and the Liapunov functional.
//!
//! The linearization of the flow at `ψ` is
//! `L[ψ]ζ = −αζ″ + 2αψζ′ − 2(1 − αψ′)ζ`, self-adjoint with respect to the
//! weight `p(x) = e^{−2∫₀ˣψ}`:
//!
//! ```text
//! p L[ψ]ζ = −α(p ζ′)′ − 2p(1 − αψ′)ζ,     ζ(0) = ζ(π) = 0.
//! ```
//!
//! Along an equilibrium orbit `∫₀ˣψ = (q(x) − q(0))/2` and `1 − αψ′ = e^q`
//! (see [`crate::equilibria`]), so the weight and the coefficients come from
//! the Hamiltonian coordinate without further quadrature. The weight spans
//! many orders of magnitude for small `α`; every ratio of weights is formed
//! as the exponential of a difference of `q` values.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::equilibria::{EquilibriumOrbit, Sign};
use crate::error::{Error, Result};
use crate::field_grid::{fmt17, grid_points, trapezoid_full_period, GridFunction, Parity};
use crate::ode::CompensatedRk4;
use crate::rg_flow::{v_t, FlowState};
use crate::tridiag::SymTridiag;

/// Linearization point: the trivial equilibrium or a reconstructed orbit.
#[derive(Debug, Clone, Copy)]
pub enum Background<'a> {
    Zero,
    Orbit(&'a EquilibriumOrbit),
}

impl Background<'_> {
    /// `q` at `πk/n`, `k = 0..=n`.
    fn q_samples(&self, n: usize) -> Vec<f64> {
        match self {
            Background::Zero => vec![0.0; n + 1],
            Background::Orbit(o) => o.sample(n).into_iter().map(|y| y[0]).collect(),
        }
    }

    fn alpha_or(&self, alpha: f64) -> Result<f64> {
        match self {
            Background::Zero => Ok(alpha),
            Background::Orbit(o) => {
                if (o.alpha - alpha).abs() > 1e-14 * alpha {
                    Err(Error::InvalidArgument(format!(
                        "orbit was built at alpha = {}, not {alpha}",
                        o.alpha
                    )))
                } else {
                    Ok(o.alpha)
                }
            }
        }
    }
}

/// `p(x) = e^{−2∫₀ˣψ}` via spectral antidifferentiation of the sampled `ψ`.
pub fn weight_p(psi: &GridFunction) -> Result<GridFunction> {
    let phi = psi.integrate_from_zero()?;
    let vals: Vec<f64> = phi.values().iter().map(|f| (-2.0 * f).exp()).collect();
    crate::field_grid::transform(&vals, Parity::Even)
}

/// Finite-difference form of `p L[ψ]` on the interior nodes of `(0, π)`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub n: usize,
    pub h: f64,
    pub alpha: f64,
    /// Diagonal of the stiffness matrix.
    pub stiffness_diag: Vec<f64>,
    /// Off-diagonal of the stiffness matrix.
    pub stiffness_off: Vec<f64>,
    /// Weight `p` at the interior nodes.
    pub mass: Vec<f64>,
    reduced: SymTridiag,
    /// Kept for assembling the refined matrix.
    source: Option<EquilibriumOrbit>,
}

const MIN_GRID: usize = 16;

/// Assembles the conservation-form discretization on `n` intervals.
pub fn assemble_l(bg: Background, alpha: f64, n: usize) -> Result<OperatorMatrix> {
    if n < MIN_GRID {
        return Err(Error::InvalidArgument(format!(
            "operator grid n = {n} is too coarse (need n >= {MIN_GRID})"
        )));
    }
    let alpha = bg.alpha_or(alpha)?;
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let half = bg.q_samples(2 * n);
    let source = match bg {
        Background::Zero => None,
        Background::Orbit(o) => Some(o.clone()),
    };
    Ok(assemble_from(alpha, n, &half, source))
}

/// `half` holds `q` at the nodes and half nodes, `πk/(2n)`, `k = 0..=2n`.
fn assemble_from(alpha: f64, n: usize, half: &[f64], source: Option<EquilibriumOrbit>) -> OperatorMatrix {
    let h = PI / n as f64;
    let ih2 = 1.0 / (h * h);
    let q = |k: usize| half[k];
    let q0 = half[0];
    let m = n - 1;
    let mut stiffness_diag = Vec::with_capacity(m);
    let mut stiffness_off = Vec::with_capacity(m.saturating_sub(1));
    let mut mass = Vec::with_capacity(m);
    let mut d = Vec::with_capacity(m);
    let mut e = Vec::with_capacity(m.saturating_sub(1));
    for i in 1..n {
        let (qi, ql, qr) = (q(2 * i), q(2 * i - 1), q(2 * i + 1));
        let pi = (q0 - qi).exp();
        let (pl, pr) = ((q0 - ql).exp(), (q0 - qr).exp());
        mass.push(pi);
        stiffness_diag.push(alpha * (pl + pr) * ih2 - 2.0 * pi * qi.exp());
        d.push(alpha * ((qi - ql).exp() + (qi - qr).exp()) * ih2 - 2.0 * qi.exp());
        if i + 1 < n {
            let qn = q(2 * i + 2);
            stiffness_off.push(-alpha * pr * ih2);
            e.push(-alpha * (0.5 * (qi + qn) - qr).exp() * ih2);
        }
    }
    OperatorMatrix {
        n,
        h,
        alpha,
        stiffness_diag,
        stiffness_off,
        mass,
        reduced: SymTridiag { d, e },
        source,
    }
}

impl OperatorMatrix {
    /// The same operator on `2n` intervals.
    pub fn refined(&self) -> OperatorMatrix {
        let bg = match &self.source {
            None => Background::Zero,
            Some(o) => Background::Orbit(o),
        };
        let n2 = 2 * self.n;
        assemble_from(self.alpha, n2, &bg.q_samples(2 * n2), self.source.clone())
    }

    /// Eigenvalues of this matrix alone, ascending.
    pub fn eigenvalues(&self, k: usize) -> Vec<f64> {
        self.reduced.smallest(k)
    }

    pub fn negative_count(&self) -> usize {
        self.reduced.count_below(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Richardson extrapolation `(4λ_{2n} − λ_n)/3`.
    pub eigenvalues: Vec<f64>,
    pub negative_count: usize,
    /// Raw eigenvalues at `n` and `2n`.
    pub resolution_estimate: [Vec<f64>; 2],
    pub grid_sizes: [usize; 2],
}

/// The `k` lowest eigenvalues at `n` and `2n`, Richardson-extrapolated.
pub fn smallest_eigenvalues(m: &OperatorMatrix, k: usize) -> Result<SpectrumReport> {
    if k == 0 || k > 10 {
        return Err(Error::InvalidArgument(format!("k = {k} must be in 1..=10")));
    }
    let fine = m.refined();
    let ec = m.eigenvalues(k);
    let ef = fine.eigenvalues(k);
    let (nc, nf) = (m.negative_count(), fine.negative_count());
    if nc != nf {
        return Err(Error::UnresolvedSpectrum {
            coarse: nc,
            fine: nf,
            n_coarse: m.n,
            n_fine: fine.n,
        });
    }
    let eigenvalues = ec.iter().zip(&ef).map(|(c, f)| (4.0 * f - c) / 3.0).collect();
    Ok(SpectrumReport {
        eigenvalues,
        negative_count: nf,
        resolution_estimate: [ec, ef],
        grid_sizes: [m.n, fine.n],
    })
}

/// Spectrum of `L` at the given background on the default grid (512, 1024).
pub fn spectrum(bg: Background, alpha: f64, k: usize) -> Result<SpectrumReport> {
    smallest_eigenvalues(&assemble_l(bg, alpha, DEFAULT_OPERATOR_GRID)?, k)
}

pub const DEFAULT_OPERATOR_GRID: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchLabel {
    pub j: u32,
    pub sign: Sign,
}

/// JSON export record of a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumExport {
    pub alpha: f64,
    /// `None` for the trivial equilibrium.
    pub branch: Option<BranchLabel>,
    pub eigenvalues: Vec<f64>,
    pub negative_count: usize,
    pub grid_sizes: Vec<usize>,
}

impl SpectrumExport {
    pub fn new(alpha: f64, bg: Background, report: &SpectrumReport) -> Self {
        SpectrumExport {
            alpha,
            branch: match bg {
                Background::Zero => None,
                Background::Orbit(o) => Some(BranchLabel { j: o.j, sign: o.sign }),
            },
            eigenvalues: report.eigenvalues.clone(),
            negative_count: report.negative_count,
            grid_sizes: report.grid_sizes.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

/// Shooting solution of `L[ψ]φ = 0`, `φ(0) = 0`, `φ′(0) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriumResult {
    /// `(x, φ(x))` at the shooting nodes `x = πk/8192`.
    pub trace: Vec<(f64, f64)>,
    pub first_zero: Option<f64>,
    pub verdict: Verdict,
    /// Largest `|W(x) − αψ′(0)|` of the Wronskian `W = αp(φ′ψ′ − φψ″)`.
    pub wronskian_deviation: f64,
    /// `αψ′(0)`.
    pub wronskian_constant: f64,
}

impl CriteriumResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,phi\n");
        for (x, p) in &self.trace {
            let _ = writeln!(out, "{},{}", fmt17(*x), fmt17(*p));
        }
        out
    }
}

pub const SHOOTING_STEPS: usize = 8192;
const GRAZE: f64 = 1e-9;

/// Integrates `(q, p, φ, φ′)` jointly by RK4 over `[0, π]`:
/// `φ″ = 2ψφ′ − (2/α)(1 − αψ′)φ` with `ψ = p`, `1 − αψ′ = e^q`.
pub fn criterium_phi(bg: Background, alpha: f64) -> Result<CriteriumResult> {
    let alpha = bg.alpha_or(alpha)?;
    let (q0, sub) = match bg {
        Background::Zero => (0.0, 1),
        Background::Orbit(o) => (
            o.q_start(),
            ((PI / SHOOTING_STEPS as f64) / o.step()).ceil().max(1.0) as usize,
        ),
    };
    let h = PI / (SHOOTING_STEPS * sub) as f64;
    let f = move |y: &[f64; 4]| {
        let eq = y[0].exp();
        [
            2.0 * y[1],
            -y[0].exp_m1() / alpha,
            y[3],
            2.0 * y[1] * y[3] - 2.0 / alpha * eq * y[2],
        ]
    };
    let wronskian = |y: &[f64; 4]| (q0 - y[0]).exp() * (-y[3] * y[0].exp_m1() + 2.0 * y[1] * y[2] * y[0].exp());
    let mut rk = CompensatedRk4::new([q0, 0.0, 0.0, 1.0]);
    let w_const = wronskian(&rk.y);
    let mut trace = Vec::with_capacity(SHOOTING_STEPS + 1);
    trace.push((0.0, 0.0));
    let mut states = vec![rk.y];
    let mut w_dev = 0.0_f64;
    for k in 1..=SHOOTING_STEPS {
        for _ in 0..sub {
            rk.step(&f, h);
        }
        w_dev = w_dev.max((wronskian(&rk.y) - w_const).abs());
        trace.push((PI * k as f64 / SHOOTING_STEPS as f64, rk.y[2]));
        states.push(rk.y);
    }
    let mut first_zero = None;
    for k in 1..SHOOTING_STEPS {
        let (a, b) = (states[k][2], states[k + 1][2]);
        if a > 0.0 && b <= 0.0 {
            let dx = PI / SHOOTING_STEPS as f64;
            first_zero = Some(hermite_root(trace[k].0, dx, a, states[k][3], b, states[k + 1][3]));
            break;
        }
    }
    let verdict = if first_zero.is_some() {
        Verdict::Unstable
    } else {
        let end = trace[SHOOTING_STEPS].1;
        let grazing = end < GRAZE
            || (2..SHOOTING_STEPS).any(|k| {
                let (l, c, r) = (trace[k - 1].1, trace[k].1, trace[k + 1].1);
                c <= l && c <= r && c < GRAZE
            });
        if grazing {
            Verdict::Inconclusive
        } else {
            Verdict::Stable
        }
    };
    Ok(CriteriumResult {
        trace,
        first_zero,
        verdict,
        wronskian_deviation: w_dev,
        wronskian_constant: w_const,
    })
}

/// Root in `[x0, x0 + dx]` of the cubic Hermite interpolant, by bisection.
fn hermite_root(x0: f64, dx: f64, f0: f64, d0: f64, f1: f64, d1: f64) -> f64 {
    let eval = |s: f64| {
        let h00 = 2.0 * s * s * s - 3.0 * s * s + 1.0;
        let h10 = s * s * s - 2.0 * s * s + s;
        let h01 = -2.0 * s * s * s + 3.0 * s * s;
        let h11 = s * s * s - s * s;
        h00 * f0 + h10 * dx * d0 + h01 * f1 + h11 * dx * d1
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if eval(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    x0 + dx * 0.5 * (lo + hi)
}

/// Residuals of the algebraic identities satisfied along an equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// `c` in `χ = c(−αψ″ + 4ψ)`, fixed by `χ′(0) = 1`.
    pub c: f64,
    /// `‖L[ψ]χ − 8cα²ψψ′²‖_∞` and where it is attained.
    pub chi_residual: f64,
    pub chi_worst_x: f64,
    /// `‖L[ψ]ψ′‖_∞` and where it is attained.
    pub psi_prime_residual: f64,
    pub psi_prime_worst_x: f64,
    /// Largest deviation of the Wronskian from `αψ′(0)` along the shooting trace.
    pub wronskian_deviation: f64,
    pub wronskian_constant: f64,
}

pub const IDENTITY_LIMIT: f64 = 1e-6;

/// Evaluates the identities with `ψ″, ψ‴, ψ⁗` from spectral differentiation of
/// the sampled `ψ′`. Residual breaches are reported as errors.
pub fn identity_checks(orbit: &EquilibriumOrbit) -> Result<IdentityReport> {
    let report = identity_residuals(orbit)?;
    let worst = [
        ("L[psi]chi - 8c alpha^2 psi psi'^2", report.chi_residual, report.chi_worst_x),
        ("L[psi]psi'", report.psi_prime_residual, report.psi_prime_worst_x),
        ("Wronskian deviation", report.wronskian_deviation, f64::NAN),
    ];
    for (what, value, x) in worst {
        if !(value < IDENTITY_LIMIT) {
            return Err(Error::IdentityViolation { what, value, x });
        }
    }
    Ok(report)
}

/// Same as [`identity_checks`] without enforcing the limit.
pub fn identity_residuals(orbit: &EquilibriumOrbit) -> Result<IdentityReport> {
    let alpha = orbit.alpha;
    let d1 = orbit.psi_prime.clone();
    let d2 = d1.differentiate();
    let d3 = d2.differentiate();
    let d4 = d3.differentiate();
    let psi = orbit.psi.values();
    let (w, w2, w3, w4) = (d1.values(), d2.values(), d3.values(), d4.values());
    let c = 1.0 / (-alpha * w3[0] + 4.0 * w[0]);
    let xs = grid_points(orbit.grid());
    let (mut chi_res, mut chi_x, mut pp_res, mut pp_x) = (0.0_f64, 0.0, 0.0_f64, 0.0);
    for k in 0..xs.len() {
        let (p, p1, p2, p3, p4) = (psi[k], w[k], w2[k], w3[k], w4[k]);
        let chi = c * (-alpha * p2 + 4.0 * p);
        let chi1 = c * (-alpha * p3 + 4.0 * p1);
        let chi2 = c * (-alpha * p4 + 4.0 * p2);
        let l = |z: f64, z1: f64, z2: f64| -alpha * z2 + 2.0 * alpha * p * z1 - 2.0 * (1.0 - alpha * p1) * z;
        let r1 = (l(chi, chi1, chi2) - 8.0 * c * alpha * alpha * p * p1 * p1).abs();
        let r2 = l(p1, p2, p3).abs();
        if r1 > chi_res {
            chi_res = r1;
            chi_x = xs[k];
        }
        if r2 > pp_res {
            pp_res = r2;
            pp_x = xs[k];
        }
    }
    let shoot = criterium_phi(Background::Orbit(orbit), alpha)?;
    Ok(IdentityReport {
        c,
        chi_residual: chi_res,
        chi_worst_x: chi_x,
        psi_prime_residual: pp_res,
        psi_prime_worst_x: pp_x,
        wronskian_deviation: shoot.wronskian_deviation,
        wronskian_constant: shoot.wronskian_constant,
    })
}

/// `(1 − s) ln(1 − s) + s`, accurate for small `s`.
fn entropy_like(s: f64) -> f64 {
    if s.abs() < 1e-3 {
        // Σ_{k≥2} s^k / (k(k−1))
        let mut pow = s * s;
        let mut sum = 0.0;
        for k in 2..10 {
            sum += pow / (k * (k - 1)) as f64;
            pow *= s;
        }
        sum
    } else {
        (1.0 - s) * (-s).ln_1p() + s
    }
}

fn check_slope(vx: &GridFunction, alpha: f64) -> Result<()> {
    let n = vx.grid();
    for (k, d) in vx.values().iter().enumerate() {
        if !(alpha * d < 1.0) {
            return Err(Error::OutOfDomain(format!(
                "alpha*v_x = {} >= 1 at x = {}",
                alpha * d,
                PI * k as f64 / n as f64
            )));
        }
    }
    Ok(())
}

/// `V(v) = ∫_{−π}^{π} {(α⁻¹ − v′) ln(1 − αv′) + v′ − v²} dx`.
pub fn liapunov_v(v: &GridFunction, alpha: f64) -> Result<f64> {
    if v.parity() != Parity::Odd {
        return Err(Error::Parity("the Liapunov functional takes odd v"));
    }
    let vx = v.differentiate();
    check_slope(&vx, alpha)?;
    let integrand: Vec<f64> = vx
        .values()
        .iter()
        .zip(v.values())
        .map(|(d, val)| entropy_like(alpha * d) / alpha - val * val)
        .collect();
    Ok(trapezoid_full_period(&integrand))
}

/// `V̇ = −∫_{−π}^{π} ρ(v_x) v_t² dx` with `ρ(w) = 1/(1 − αw)` and `v_t` from the
/// flow equation.
pub fn liapunov_vdot(s: &FlowState) -> Result<f64> {
    let alpha = s.alpha;
    let vx = s.v.differentiate();
    check_slope(&vx, alpha)?;
    let vt = v_t(&s.v, alpha)?;
    let integrand: Vec<f64> = vx
        .values()
        .iter()
        .zip(vt.values())
        .map(|(d, t)| t * t / (1.0 - alpha * d))
        .collect();
    Ok(-trapezoid_full_period(&integrand))
}
