//! The block-spin RG map on charge activities and its `L ↓ 1` limit.
//!
//! A charge activity `λ(q)`, `q ∈ ℤ`, is mapped to
//! `λ¹(p) = L^{−βp²/4π} (λ ⋆ ⋯ ⋆ λ)(p)` (`L²` factors). On the Fourier side
//! `λ̂(φ) = Σ λ(q) e^{iqφ}` this is a pointwise power followed by convolution
//! with the theta kernel: `λ̂ ↦ ν ∗ λ̂^{L²}`. The Fourier form makes sense for
//! any real `L > 1`, and `n` steps with `L = e^{t/n}` approximate the flow of
//! `u = −ln λ̂` up to time `t` with an `O(t/n)` splitting error.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_grid::{fmt17, transform, GridFunction, Parity};
use crate::rg_flow::evolve;

pub const DEFAULT_M: usize = 512;
pub const DEFAULT_Q: usize = 64;
const TAIL_LIMIT: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivityKind {
    /// `λ(q) = I_q(2z)`, the activity of a lattice sine-Gordon weight.
    Bessel,
    /// `λ(q) = δ_{q,0} + z(δ_{q,1} + δ_{q,−1})`.
    Hardcore,
}

/// Symmetric activity `λ(q)` for `|q| ≤ Q`, normalized to `Σλ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeActivity {
    pub beta: f64,
    #[serde(rename = "Q")]
    pub q_max: usize,
    /// `lambda[i]` is `λ(i − Q)`.
    pub lambda: Vec<f64>,
}

impl ChargeActivity {
    pub fn get(&self, q: i64) -> f64 {
        let i = q + self.q_max as i64;
        if i < 0 || i as usize >= self.lambda.len() {
            0.0
        } else {
            self.lambda[i as usize]
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.lambda.iter().map(|x| x.abs()).sum()
    }

    /// `λ̂` on the `m`-point grid `φ_k = −π + 2πk/m`.
    pub fn to_fourier(&self, m: usize) -> FourierActivity {
        let values = phi_grid(m)
            .into_iter()
            .map(|phi| {
                self.get(0)
                    + 2.0
                        * (1..=self.q_max)
                            .map(|q| self.get(q as i64) * (q as f64 * phi).cos())
                            .sum::<f64>()
            })
            .collect();
        FourierActivity { values }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("activity serializes")
    }
}

/// `I_q(2z) = Σ_k z^{2k+q} / (k! (k+q)!)` by its ascending series.
pub fn bessel_i_2z(q: usize, z: f64) -> f64 {
    // leading term z^q / q!
    let mut lead = 1.0;
    for i in 1..=q {
        lead *= z / i as f64;
    }
    let mut term = lead;
    let mut sum = term;
    let z2 = z * z;
    let mut k = 1;
    while k < 30 || term > 1e-18 * sum {
        term *= z2 / (k as f64 * (k + q) as f64);
        sum += term;
        k += 1;
        if k > 10_000 {
            break;
        }
    }
    sum
}

/// Builds a normalized activity with charges `|q| ≤ Q`.
pub fn make_activity(kind: ActivityKind, z: f64, q_max: usize, beta: f64) -> Result<ChargeActivity> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::InvalidArgument(format!("z must be positive, got {z}")));
    }
    if q_max < 8 {
        return Err(Error::InvalidArgument(format!("Q = {q_max} must be >= 8")));
    }
    let half: Vec<f64> = match kind {
        ActivityKind::Hardcore => (0..=q_max)
            .map(|q| match q {
                0 => 1.0,
                1 => z,
                _ => 0.0,
            })
            .collect(),
        ActivityKind::Bessel => {
            let vals: Vec<f64> = (0..=q_max).map(|q| bessel_i_2z(q, z)).collect();
            // mass beyond Q relative to the total e^{2z}
            let tail: f64 = (q_max + 1..q_max + 40).map(|q| 2.0 * bessel_i_2z(q, z)).sum::<f64>()
                / (2.0 * z).exp();
            if tail > TAIL_LIMIT {
                return Err(Error::Truncation { tail, q_max });
            }
            vals
        }
    };
    let total = half[0] + 2.0 * half[1..].iter().sum::<f64>();
    let mut lambda = Vec::with_capacity(2 * q_max + 1);
    lambda.extend(half[1..].iter().rev().map(|x| x / total));
    lambda.extend(half.iter().map(|x| x / total));
    Ok(ChargeActivity {
        beta,
        q_max,
        lambda,
    })
}

/// `λ̂(φ_k)` on `φ_k = −π + 2πk/M`, `k = 0..M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierActivity {
    pub values: Vec<f64>,
}

impl FourierActivity {
    pub fn vacuum(m: usize) -> Self {
        FourierActivity { values: vec![1.0; m] }
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    /// `λ̂(0)`, which equals `Σλ`.
    pub fn at_zero(&self) -> f64 {
        self.values[self.m() / 2]
    }

    pub fn grid(&self) -> Vec<f64> {
        phi_grid(self.m())
    }

    /// Charge coefficients `λ(q)`, `|q| ≤ q_max` (at most `M/2 − 1`).
    pub fn to_charges(&self, beta: f64, q_max: usize) -> ChargeActivity {
        let c = charges(&self.values);
        let m = self.m();
        let q_max = q_max.min(m / 2 - 1);
        let lambda = (-(q_max as i64)..=q_max as i64)
            .map(|q| c[q.rem_euclid(m as i64) as usize])
            .collect();
        ChargeActivity {
            beta,
            q_max,
            lambda,
        }
    }
}

fn phi_grid(m: usize) -> Vec<f64> {
    (0..m).map(|k| -PI + 2.0 * PI * k as f64 / m as f64).collect()
}

fn fft(m: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    if inverse {
        planner.plan_fft_inverse(m)
    } else {
        planner.plan_fft_forward(m)
    }
}

/// `λ(q)` (index `q mod M`) from samples on the shifted grid.
fn charges(values: &[f64]) -> Vec<f64> {
    let m = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft(m, false).process(&mut buf);
    // φ_k = −π + 2πk/M contributes the phase e^{iqπ} = (−1)^q
    buf.iter()
        .enumerate()
        .map(|(q, c)| if q % 2 == 0 { c.re } else { -c.re } / m as f64)
        .collect()
}

fn from_charges(c: &[f64]) -> Vec<f64> {
    let m = c.len();
    let mut buf: Vec<Complex64> = c
        .iter()
        .enumerate()
        .map(|(q, &v)| Complex64::new(if q % 2 == 0 { v } else { -v }, 0.0))
        .collect();
    fft(m, true).process(&mut buf);
    buf.iter().map(|z| z.re).collect()
}

/// Signed charge of FFT index `i` on an `m`-point grid.
fn signed(i: usize, m: usize) -> f64 {
    if i <= m / 2 {
        i as f64
    } else {
        i as f64 - m as f64
    }
}

/// Both representations of `ϑ(φ) = Σ_q L^{−βq²/4π} e^{iqφ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaValue {
    /// Charge-sum value.
    pub value: f64,
    /// `(2π/√(β ln L)) Σ_n e^{−π(φ + 2πn)²/(β ln L)}`.
    pub poisson: f64,
    pub discrepancy: f64,
}

/// Evaluates the theta kernel by the charge sum and by its Poisson dual.
pub fn theta_kernel(phi: f64, beta: f64, l: f64) -> Result<ThetaValue> {
    if !(l > 1.0) || !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "theta kernel needs L > 1 and beta > 0, got L = {l}, beta = {beta}"
        )));
    }
    let a = beta * l.ln() / (4.0 * PI);
    let mut value = 1.0;
    let mut q = 1.0_f64;
    loop {
        let w = (-a * q * q).exp();
        value += 2.0 * w * (q * phi).cos();
        if w < 1e-18 {
            break;
        }
        q += 1.0;
    }
    let b = beta * l.ln();
    let prefactor = 2.0 * PI / b.sqrt();
    let base = (phi + PI).rem_euclid(2.0 * PI) - PI;
    let mut poisson = (-PI * base * base / b).exp();
    let mut n = 1.0_f64;
    loop {
        let up = base + 2.0 * PI * n;
        let dn = base - 2.0 * PI * n;
        let t = (-PI * up * up / b).exp() + (-PI * dn * dn / b).exp();
        poisson += t;
        if t <= 1e-18 * poisson {
            break;
        }
        n += 1.0;
    }
    poisson *= prefactor;
    let discrepancy = (value - poisson).abs();
    if discrepancy > 1e-10 {
        return Err(Error::Resummation(discrepancy));
    }
    Ok(ThetaValue {
        value,
        poisson,
        discrepancy,
    })
}

/// Diagnostics of one [`rg_step`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    /// `Σ_{|q|>Q} |λ(q)|` of the normalized output.
    pub tail_mass: f64,
    /// `Σ |λ(q)|` of the normalized output.
    pub l1_norm: f64,
}

/// `λ̂ ↦ ν ∗ λ̂^{L²}`, normalized so that `λ̂(0) = Σλ = 1`.
pub fn rg_step(a: &FourierActivity, beta: f64, l: f64) -> Result<FourierActivity> {
    rg_step_diagnosed(a, beta, l, DEFAULT_Q).map(|(a, _)| a)
}

pub fn rg_step_diagnosed(
    a: &FourierActivity,
    beta: f64,
    l: f64,
    q_max: usize,
) -> Result<(FourierActivity, StepDiagnostics)> {
    if !(l >= 1.0) || !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rg_step needs L >= 1 and beta > 0, got L = {l}, beta = {beta}"
        )));
    }
    if let Some(k) = a.values.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::OutOfDomain(format!(
            "activity transform is not positive at phi = {}",
            a.grid()[k]
        )));
    }
    let m = a.m();
    let l2 = l * l;
    let powered: Vec<f64> = a.values.iter().map(|v| v.powf(l2)).collect();
    let mut c = charges(&powered);
    let decay = beta * l.ln() / (4.0 * PI);
    for (i, ci) in c.iter_mut().enumerate() {
        let q = signed(i, m);
        *ci *= (-decay * q * q).exp();
    }
    let total: f64 = c.iter().sum();
    for ci in c.iter_mut() {
        *ci /= total;
    }
    let l1_norm: f64 = c.iter().map(|x| x.abs()).sum();
    let tail_mass: f64 = c
        .iter()
        .enumerate()
        .filter(|(i, _)| signed(*i, m).abs() > q_max as f64)
        .map(|(_, x)| x.abs())
        .sum();
    let mut values = from_charges(&c);
    // enforce exact evenness about φ = 0 (removes rounding asymmetry)
    for k in 1..m / 2 {
        let s = 0.5 * (values[m / 2 + k] + values[m / 2 - k]);
        values[m / 2 + k] = s;
        values[m / 2 - k] = s;
    }
    Ok((FourierActivity { values }, StepDiagnostics { tail_mass, l1_norm }))
}

/// Reference map on charge sequences for integer `L`: `L²`-fold convolution,
/// then the Gaussian factor `L^{−βp²/4π}`, then normalization. The output
/// keeps every charge produced (`|p| ≤ L²Q`).
pub fn rg_step_direct(a: &ChargeActivity, l: u32) -> Result<ChargeActivity> {
    if l < 2 {
        return Err(Error::InvalidArgument(format!("integer L must be >= 2, got {l}")));
    }
    let mut conv = vec![1.0];
    for _ in 0..l * l {
        let mut next = vec![0.0; conv.len() + a.lambda.len() - 1];
        for (i, x) in conv.iter().enumerate() {
            for (j, y) in a.lambda.iter().enumerate() {
                next[i + j] += x * y;
            }
        }
        conv = next;
    }
    let q_max = (conv.len() - 1) / 2;
    let lnl = (l as f64).ln();
    for (i, c) in conv.iter_mut().enumerate() {
        let p = i as f64 - q_max as f64;
        *c *= (-a.beta * p * p * lnl / (4.0 * PI)).exp();
    }
    let total: f64 = conv.iter().sum();
    Ok(ChargeActivity {
        beta: a.beta,
        q_max,
        lambda: conv.into_iter().map(|c| c / total).collect(),
    })
}

/// `u(x) = −ln λ̂(x) + ln λ̂(0)` on the field grid `x_k = πk/(M/2)`.
pub fn effective_potential(a: &FourierActivity) -> Result<GridFunction> {
    let m = a.m();
    let n = m / 2;
    let at0 = a.at_zero().ln();
    let vals: Vec<f64> = (0..=n)
        .map(|k| at0 - a.values[(n + k) % m].ln())
        .collect();
    transform(&vals, Parity::Even)
}

/// Applies `n` steps with `L = e^{t/n}` and returns the normalized effective potential.
/// Fails if charge mass beyond `|q| = Q` exceeds `10⁻¹⁴` after any step.
pub fn iterate_to_time(a0: &FourierActivity, beta: f64, t: f64, n: usize) -> Result<GridFunction> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("t must be >= 0, got {t}")));
    }
    let mut a = a0.clone();
    if t > 0.0 {
        let l = (t / n as f64).exp();
        for _ in 0..n {
            let (next, diag) = rg_step_diagnosed(&a, beta, l, DEFAULT_Q)?;
            if diag.tail_mass > TAIL_LIMIT {
                return Err(Error::Truncation {
                    tail: diag.tail_mass,
                    q_max: DEFAULT_Q,
                });
            }
            a = next;
        }
    }
    effective_potential(&a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub sup_gap: f64,
    /// `ln(gap_prev / gap) / ln(n / n_prev)`.
    pub order_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub beta: f64,
    pub z: f64,
    pub t: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,L,sup_gap,order_estimate\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.n,
                fmt17(r.l),
                fmt17(r.sup_gap),
                r.order_estimate.map_or(String::new(), fmt17)
            );
        }
        out
    }

    /// `gap(n_{i+1}) / gap(n_i)` for consecutive rows.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| w[1].sup_gap / w[0].sup_gap).collect()
    }
}

/// Time step of the continuum reference solution.
pub const REFERENCE_DT: f64 = 1e-4;

/// Sup-norm gaps between `iterate_to_time` and the continuum `ũ(t)` started
/// from the same (hard-core) activity.
pub fn continuum_compare(beta: f64, z: f64, t: f64, n_list: &[usize]) -> Result<ConvergenceTable> {
    continuum_compare_with(ActivityKind::Hardcore, beta, z, t, n_list, DEFAULT_M)
}

pub fn continuum_compare_with(
    kind: ActivityKind,
    beta: f64,
    z: f64,
    t: f64,
    n_list: &[usize],
    m: usize,
) -> Result<ConvergenceTable> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("n_list must be strictly ascending".into()));
    }
    let a0 = make_activity(kind, z, DEFAULT_Q, beta)?.to_fourier(m);
    let reference = continuum_reference(&a0, beta, t)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let u = iterate_to_time(&a0, beta, t, n)?;
        let gap = u
            .values()
            .iter()
            .zip(reference.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let order_estimate = rows.last().and_then(|prev| {
            (gap > 0.0 && prev.sup_gap > 0.0)
                .then(|| (prev.sup_gap / gap).ln() / (n as f64 / prev.n as f64).ln())
        });
        rows.push(ConvergenceRow {
            n,
            l: (t / n as f64).exp(),
            sup_gap: gap,
            order_estimate,
        });
    }
    if t > 0.0 {
        if let Some(w) = rows.windows(2).find(|w| w[1].sup_gap >= w[0].sup_gap) {
            return Err(Error::Convergence(format!(
                "gap did not decrease from n = {} ({:e}) to n = {} ({:e})",
                w[0].n, w[0].sup_gap, w[1].n, w[1].sup_gap
            )));
        }
    }
    Ok(ConvergenceTable { beta, z, t, rows })
}

/// `ũ(t)` of the continuum flow with `u0 = −ln λ̂⁰ + ln λ̂⁰(0)`.
pub fn continuum_reference(a0: &FourierActivity, beta: f64, t: f64) -> Result<GridFunction> {
    let u0 = effective_potential(a0)?;
    if t == 0.0 {
        return Ok(u0);
    }
    let alpha = beta / (4.0 * PI);
    let v0 = u0.differentiate();
    let traj = evolve(&v0, alpha, t, REFERENCE_DT, usize::MAX)?;
    traj.last().v.integrate_from_zero()
}
