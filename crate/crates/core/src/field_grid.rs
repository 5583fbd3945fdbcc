//! Odd and even 2π-periodic functions on `(-π, π)`.
//!
//! A [`GridFunction`] is stored by its spectral coefficients together with its
//! samples on the closed collocation grid `x_k = πk/N`, `k = 0..=N`, where `N`
//! is a power of two. Odd functions live in the sine basis (modes `1..N-1`),
//! even functions in the cosine basis (modes `0..=N`). Values on `[-π, 0)`
//! follow from parity, so only the half interval is ever sampled.
//!
//! Quadratic nonlinearities are evaluated pseudospectrally on a grid padded by
//! a factor 3/2, which removes aliasing of products of two band-limited
//! functions.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::TrigPlan;

/// Default number of grid intervals on `[0, π]`.
pub const DEFAULT_GRID: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Odd => Parity::Even,
            Parity::Even => Parity::Odd,
        }
    }

    fn product(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Number of coefficients stored on a grid with `n` intervals.
    pub fn mode_count(self, n: usize) -> usize {
        match self {
            Parity::Odd => n - 1,
            Parity::Even => n + 1,
        }
    }
}

/// Norm on `(-π, π)`. `H1` is the L2 norm of the derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    L2,
    H1,
}

/// Samples and spectral coefficients of an odd or even 2π-periodic function.
///
/// For odd parity `coeffs[i]` multiplies `sin((i+1)x)`; for even parity
/// `coeffs[i]` multiplies `cos(ix)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFunctionRepr", into = "GridFunctionRepr")]
pub struct GridFunction {
    parity: Parity,
    n: usize,
    coeffs: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridFunctionRepr {
    parity: Parity,
    n_modes: usize,
    coeffs: Vec<f64>,
}

impl From<GridFunction> for GridFunctionRepr {
    fn from(f: GridFunction) -> Self {
        GridFunctionRepr {
            parity: f.parity,
            n_modes: f.coeffs.len(),
            coeffs: f.coeffs,
        }
    }
}

impl TryFrom<GridFunctionRepr> for GridFunction {
    type Error = Error;

    fn try_from(r: GridFunctionRepr) -> Result<Self> {
        if r.coeffs.len() != r.n_modes {
            return Err(Error::InvalidArgument(format!(
                "n_modes = {} but {} coefficients given",
                r.n_modes,
                r.coeffs.len()
            )));
        }
        let n = match r.parity {
            Parity::Odd => r.n_modes + 1,
            Parity::Even => r.n_modes.saturating_sub(1),
        };
        GridFunction::from_coeffs(r.parity, n, r.coeffs)
    }
}

pub(crate) fn check_grid(n: usize) -> Result<()> {
    if n >= 2 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::Sizing(n))
    }
}

/// Grid points `x_k = πk/N`, `k = 0..=N`.
pub fn grid_points(n: usize) -> Vec<f64> {
    (0..=n).map(|k| PI * k as f64 / n as f64).collect()
}

/// Spectral coefficients of samples on the uniform grid (`values.len() = N + 1`).
///
/// For odd parity the end samples are ignored; the sine basis vanishes there.
pub fn transform(values: &[f64], parity: Parity) -> Result<GridFunction> {
    let n = values.len().saturating_sub(1);
    check_grid(n)?;
    let plan = TrigPlan::new(n);
    Ok(GridFunction::from_values_with(&plan, values, parity))
}

/// Samples of `f` on the `N`-grid.
pub fn inverse_transform(f: &GridFunction) -> Vec<f64> {
    f.values.clone()
}

impl GridFunction {
    pub(crate) fn from_values_with(plan: &TrigPlan, values: &[f64], parity: Parity) -> Self {
        let n = plan.n();
        debug_assert_eq!(values.len(), n + 1);
        match parity {
            Parity::Odd => {
                let coeffs = plan.forward_sine(&values[1..n]);
                let mut vals = vec![0.0; n + 1];
                vals[1..n].copy_from_slice(&values[1..n]);
                GridFunction {
                    parity,
                    n,
                    coeffs,
                    values: vals,
                }
            }
            Parity::Even => GridFunction {
                parity,
                n,
                coeffs: plan.forward_cosine(values),
                values: values.to_vec(),
            },
        }
    }

    pub(crate) fn from_coeffs_with(plan: &TrigPlan, parity: Parity, coeffs: Vec<f64>) -> Self {
        let n = plan.n();
        debug_assert_eq!(coeffs.len(), parity.mode_count(n));
        let values = match parity {
            Parity::Odd => {
                let mut v = vec![0.0; n + 1];
                v[1..n].copy_from_slice(&plan.inverse_sine(&coeffs));
                v
            }
            Parity::Even => plan.inverse_cosine(&coeffs),
        };
        GridFunction {
            parity,
            n,
            coeffs,
            values,
        }
    }

    /// Builds a function on the `n`-grid from (possibly fewer) coefficients.
    /// Missing coefficients are zero; extra ones are dropped.
    pub fn from_coeffs(parity: Parity, n: usize, mut coeffs: Vec<f64>) -> Result<Self> {
        check_grid(n)?;
        coeffs.resize(parity.mode_count(n), 0.0);
        Ok(Self::from_coeffs_with(&TrigPlan::new(n), parity, coeffs))
    }

    pub fn zero(parity: Parity, n: usize) -> Result<Self> {
        Self::from_coeffs(parity, n, Vec::new())
    }

    /// Samples `f` on the `n`-grid and transforms.
    pub fn from_fn(parity: Parity, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_grid(n)?;
        let vals: Vec<f64> = grid_points(n).into_iter().map(f).collect();
        transform(&vals, parity)
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Number of grid intervals `N` on `[0, π]`.
    pub fn grid(&self) -> usize {
        self.n
    }

    pub fn n_modes(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Samples on `x_k = πk/N`, `k = 0..=N`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Wavenumber of `coeffs[i]`.
    pub fn wavenumber(&self, i: usize) -> usize {
        match self.parity {
            Parity::Odd => i + 1,
            Parity::Even => i,
        }
    }

    /// Evaluates the trigonometric series at an arbitrary `x` by direct summation.
    pub fn eval(&self, x: f64) -> f64 {
        match self.parity {
            Parity::Odd => self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| a * ((i + 1) as f64 * x).sin())
                .sum(),
            Parity::Even => self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, b)| b * (i as f64 * x).cos())
                .sum(),
        }
    }

    /// Same function on another grid: coefficients are zero-padded or truncated.
    pub fn resample(&self, n: usize) -> Result<Self> {
        if n == self.n {
            return Ok(self.clone());
        }
        Self::from_coeffs(self.parity, n, self.coeffs.clone())
    }

    /// Termwise derivative. Odd becomes even (`n·a_n`), even becomes odd (`-n·b_n`).
    /// The even Nyquist mode has a derivative that vanishes on the grid and is dropped.
    pub fn differentiate(&self) -> GridFunction {
        let n = self.n;
        let plan = TrigPlan::new(n);
        let coeffs = differentiate_coeffs(self.parity, n, &self.coeffs);
        Self::from_coeffs_with(&plan, self.parity.flip(), coeffs)
    }

    /// Antiderivative `ũ(x) = ∫₀ˣ v(y) dy` of an odd function; `ũ(0) = 0`.
    pub fn integrate_from_zero(&self) -> Result<GridFunction> {
        if self.parity != Parity::Odd {
            return Err(Error::Parity("integrate_from_zero needs an odd function"));
        }
        let n = self.n;
        let mut b = vec![0.0; n + 1];
        let mut constant = 0.0;
        for (i, a) in self.coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            b[i + 1] = -a / k;
            constant += a / k;
        }
        b[0] = constant;
        Ok(Self::from_coeffs_with(&TrigPlan::new(n), Parity::Even, b))
    }

    /// Norm on `(-π, π)` via Parseval.
    pub fn norm(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::L2 => self.l2_norm(),
            NormKind::H1 => self.differentiate().l2_norm(),
        }
    }

    fn l2_norm(&self) -> f64 {
        let sum: f64 = match self.parity {
            Parity::Odd => PI * self.coeffs.iter().map(|a| a * a).sum::<f64>(),
            Parity::Even => {
                2.0 * PI * self.coeffs[0] * self.coeffs[0]
                    + PI * self.coeffs[1..].iter().map(|b| b * b).sum::<f64>()
            }
        };
        sum.sqrt()
    }

    /// Trapezoid rule for `∫_{-π}^{π} g(f(x)) dx` using the grid samples of an even integrand.
    pub fn quadrature(&self, g: impl Fn(f64) -> f64) -> f64 {
        trapezoid_full_period(&self.values.iter().map(|&v| g(v)).collect::<Vec<_>>())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `a·self + b·other`; both must share parity and grid.
    pub fn lin_comb(&self, a: f64, other: &GridFunction, b: f64) -> Result<GridFunction> {
        self.check_compatible(other)?;
        Ok(GridFunction {
            parity: self.parity,
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn scale(&self, s: f64) -> GridFunction {
        GridFunction {
            parity: self.parity,
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            values: self.values.iter().map(|c| c * s).collect(),
        }
    }

    /// Product on the 3/2-padded grid, truncated back to this grid.
    pub fn product(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.n != other.n {
            return Err(Error::InvalidArgument(format!(
                "grid mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        let dealias = Dealias::new(self.n);
        let parity = self.parity.product(other.parity);
        let coeffs = dealias.product_coeffs(self.parity, &self.coeffs, other.parity, &other.coeffs);
        Ok(Self::from_coeffs_with(&dealias.base, parity, coeffs))
    }

    fn check_compatible(&self, other: &GridFunction) -> Result<()> {
        if self.parity != other.parity {
            return Err(Error::Parity("operands have different parity"));
        }
        if self.n != other.n {
            return Err(Error::InvalidArgument(format!(
                "grid mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    /// `x, f(x)` pairs on `[0, π]`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,f\n");
        for (x, v) in grid_points(self.n).iter().zip(&self.values) {
            let _ = writeln!(out, "{},{}", fmt17(*x), fmt17(*v));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grid function serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))
    }
}

/// Fixed 17-significant-digit scientific format.
pub fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}

pub(crate) fn differentiate_coeffs(parity: Parity, n: usize, coeffs: &[f64]) -> Vec<f64> {
    match parity {
        Parity::Odd => {
            let mut b = vec![0.0; n + 1];
            for (i, a) in coeffs.iter().enumerate() {
                b[i + 1] = (i + 1) as f64 * a;
            }
            b
        }
        Parity::Even => (1..n).map(|k| -(k as f64) * coeffs[k]).collect(),
    }
}

/// `∫_{-π}^{π} g dx` for an even integrand sampled on `[0, π]`.
pub(crate) fn trapezoid_full_period(samples: &[f64]) -> f64 {
    let n = samples.len() - 1;
    let h = PI / n as f64;
    let inner: f64 = samples[1..n].iter().sum();
    2.0 * h * (inner + 0.5 * (samples[0] + samples[n]))
}

/// Plans for a base grid and its 3/2-padded companion.
#[derive(Clone)]
pub(crate) struct Dealias {
    pub(crate) base: TrigPlan,
    padded: TrigPlan,
}

impl Dealias {
    pub(crate) fn new(n: usize) -> Self {
        Dealias {
            base: TrigPlan::new(n),
            padded: TrigPlan::new(3 * n / 2),
        }
    }

    pub(crate) fn padded_values(&self, parity: Parity, coeffs: &[f64]) -> Vec<f64> {
        let m = self.padded.n();
        let mut c = coeffs.to_vec();
        c.resize(parity.mode_count(m), 0.0);
        match parity {
            Parity::Odd => {
                let mut v = vec![0.0; m + 1];
                v[1..m].copy_from_slice(&self.padded.inverse_sine(&c));
                v
            }
            Parity::Even => self.padded.inverse_cosine(&c),
        }
    }

    /// Coefficients (on the base grid) of a pointwise function of padded samples.
    pub(crate) fn base_coeffs_of(&self, parity: Parity, padded: &[f64]) -> Vec<f64> {
        let m = self.padded.n();
        let mut c = match parity {
            Parity::Odd => self.padded.forward_sine(&padded[1..m]),
            Parity::Even => self.padded.forward_cosine(padded),
        };
        c.truncate(parity.mode_count(self.base.n()));
        c
    }

    pub(crate) fn product_coeffs(
        &self,
        pa: Parity,
        a: &[f64],
        pb: Parity,
        b: &[f64],
    ) -> Vec<f64> {
        let va = self.padded_values(pa, a);
        let vb = self.padded_values(pb, b);
        let prod: Vec<f64> = va.iter().zip(&vb).map(|(x, y)| x * y).collect();
        self.base_coeffs_of(pa.product(pb), &prod)
    }
}
