//! Symplectic, optical and photon-number tomograms of one-mode pure states,
//! the Husimi function, and moments read off the tomograms.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{write_csv, Field};
use crate::special_fn::{laguerre_assoc, log_factorial, oscillator_eigenfunctions, trapezoid};
use crate::states::FockAmplitudes;

/// Quadrature window and node count for moment integrals.
pub const QUADRATURE_HALF_WIDTH: f64 = 12.0;
pub const QUADRATURE_POINTS: usize = 4001;

/// Amplitudes c_n e^{-inθ} of the state evolved for time θ (global phase dropped).
fn rotated(state: &FockAmplitudes, theta: f64) -> Vec<C64> {
    state
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| c * C64::from_polar(1.0, -(n as f64) * theta))
        .collect()
}

fn wavefunction_sq(rot: &[C64], x: f64) -> f64 {
    let psi = oscillator_eigenfunctions(rot.len() - 1, x);
    rot.iter().zip(&psi).map(|(c, p)| c * p).sum::<C64>().norm_sqr()
}

/// Optical tomogram w(X, θ) = |Σ c_n e^{-inθ} ψ_n(X)|².
pub fn optical_tomogram(state: &FockAmplitudes, x: f64, theta: f64) -> f64 {
    wavefunction_sq(&rotated(state, theta), x)
}

/// Symplectic tomogram M(X, μ, ν) = w(X/r, θ)/r with r = √(μ²+ν²), θ = atan2(ν, μ).
pub fn symplectic_tomogram(state: &FockAmplitudes, x: f64, mu: f64, nu: f64) -> Result<f64> {
    let r2 = mu * mu + nu * nu;
    if !(r2 >= 1e-300) {
        return Err(Error::DegenerateDirection(r2));
    }
    let r = r2.sqrt();
    Ok(optical_tomogram(state, x / r, nu.atan2(mu)) / r)
}

/// ln λ_m(n, x) with λ_m(n, x) = n_<!/n_>! x^{|m-n|} [L_{n_<}^{(|m-n|)}(x)]², the
/// squared displacement matrix element |⟨n|D(α)|m⟩|² times e^{|α|²}.
pub fn ln_fock_lambda(m: usize, n: usize, x: f64) -> f64 {
    let (lo, hi) = if m <= n { (m, n) } else { (n, m) };
    let d = hi - lo;
    if x == 0.0 {
        return if d == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let l = laguerre_assoc(lo, d as i64, x);
    if l == 0.0 {
        return f64::NEG_INFINITY;
    }
    log_factorial(lo) - log_factorial(hi) + d as f64 * x.ln() + 2.0 * l.abs().ln()
}

/// Photon-number tomogram of the Fock state |m⟩: 𝒲_m(n, α) = e^{-|α|²} λ_m(n, |α|²).
pub fn photon_tomogram_fock(m: usize, n: usize, alpha: C64) -> f64 {
    let x = alpha.norm_sqr();
    (ln_fock_lambda(m, n, x) - x).exp()
}

/// ⟨n|D(α)|m⟩ for the displacement D(α) = exp(α a† - α* a).
fn displacement_element(n: usize, m: usize, alpha: C64) -> C64 {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        return if n == m { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
    }
    let (ln_r, phi) = (0.5 * x.ln(), alpha.arg());
    let (l, ln_mag, phase) = if m <= n {
        let d = n - m;
        let l = laguerre_assoc(m, d as i64, x);
        (l, 0.5 * (log_factorial(m) - log_factorial(n)) + d as f64 * ln_r, d as f64 * phi)
    } else {
        // (-α*)^{m-n}
        let d = m - n;
        let l = laguerre_assoc(n, d as i64, x);
        (l, 0.5 * (log_factorial(n) - log_factorial(m)) + d as f64 * ln_r, d as f64 * (PI - phi))
    };
    if l == 0.0 {
        return C64::new(0.0, 0.0);
    }
    C64::from_polar(l.signum() * (ln_mag - 0.5 * x + l.abs().ln()).exp(), phase)
}

/// Photon-number tomogram 𝒲(n, α) = |⟨n|D(α)|ψ⟩|², summed over the retained basis.
pub fn photon_tomogram(state: &FockAmplitudes, n: usize, alpha: C64) -> f64 {
    if alpha.norm_sqr() == 0.0 {
        return state.coeffs().get(n).map_or(0.0, |c| c.norm_sqr());
    }
    state
        .coeffs()
        .iter()
        .enumerate()
        .map(|(m, c)| c * displacement_element(n, m, alpha))
        .sum::<C64>()
        .norm_sqr()
}

/// Husimi function Q(α) = e^{-|α|²} |Σ c_m (α*)^m / √(m!)|².
pub fn husimi(state: &FockAmplitudes, alpha: C64) -> f64 {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        return state.coeffs()[0].norm_sqr();
    }
    let (ln_r, phi) = (0.5 * x.ln(), alpha.arg());
    state
        .coeffs()
        .iter()
        .enumerate()
        .map(|(m, c)| {
            let mf = m as f64;
            c * C64::from_polar((mf * ln_r - 0.5 * log_factorial(m) - 0.5 * x).exp(), -mf * phi)
        })
        .sum::<C64>()
        .norm_sqr()
}

/// ⟨X_θ^k⟩ = ∫ X^k w(X, θ) dX by the trapezoid rule on [-12, 12] with 4001 nodes.
///
/// Accurate for k ≤ 8 at the photon numbers reached by the states built here.
pub fn quadrature_moment(state: &FockAmplitudes, theta: f64, k: u32) -> f64 {
    let rot = rotated(state, theta);
    trapezoid(
        |x| x.powi(k as i32) * wavefunction_sq(&rot, x),
        -QUADRATURE_HALF_WIDTH,
        QUADRATURE_HALF_WIDTH,
        QUADRATURE_POINTS,
    )
}

/// ⟨n̂^k⟩ = Σ 𝒲(n, 0) n^k.
pub fn photon_moment(state: &FockAmplitudes, k: u32) -> f64 {
    state
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| c.norm_sqr() * (n as f64).powi(k as i32))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TomogramKind {
    Symplectic,
    Optical,
    PhotonNumber,
    Husimi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisValues {
    Int(Vec<usize>),
    Real(Vec<f64>),
}

impl AxisValues {
    pub fn len(&self) -> usize {
        match self {
            AxisValues::Int(v) => v.len(),
            AxisValues::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn field(&self, i: usize) -> Field {
        match self {
            AxisValues::Int(v) => Field::Int(v[i] as i64),
            AxisValues::Real(v) => Field::Real(v[i]),
        }
    }

    fn real(&self, i: usize) -> f64 {
        match self {
            AxisValues::Int(v) => v[i] as f64,
            AxisValues::Real(v) => v[i],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub values: AxisValues,
}

impl Axis {
    pub fn real(name: &str, values: Vec<f64>) -> Self {
        Axis { name: name.to_string(), values: AxisValues::Real(values) }
    }

    pub fn int(name: &str, values: Vec<usize>) -> Self {
        Axis { name: name.to_string(), values: AxisValues::Int(values) }
    }
}

/// Tomogram samples on the Cartesian product of its axes, first axis slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomogramGrid {
    pub kind: TomogramKind,
    pub axes: Vec<Axis>,
    pub values: Vec<f64>,
    pub state_digest: String,
    pub trunc_tail: f64,
}

fn grid_indices(shape: &[usize], flat: usize) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    let mut rem = flat;
    for (d, &len) in shape.iter().enumerate().rev() {
        idx[d] = rem % len;
        rem /= len;
    }
    idx
}

impl TomogramGrid {
    fn evaluate<F>(kind: TomogramKind, state: &FockAmplitudes, axes: Vec<Axis>, f: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> Result<f64> + Sync,
    {
        let shape: Vec<usize> = axes.iter().map(|a| a.values.len()).collect();
        let total: usize = shape.iter().product();
        let values = (0..total)
            .into_par_iter()
            .map(|i| f(&grid_indices(&shape, i)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(TomogramGrid { kind, axes, values, state_digest: state.digest(), trunc_tail: state.trunc_tail() })
    }

    /// w(X, θ) on `xs × thetas`, columns `theta, x, value`.
    pub fn optical(state: &FockAmplitudes, thetas: Vec<f64>, xs: Vec<f64>) -> Result<Self> {
        let rots: Vec<Vec<C64>> = thetas.iter().map(|t| rotated(state, *t)).collect();
        let axes = vec![Axis::real("theta", thetas), Axis::real("x", xs.clone())];
        Self::evaluate(TomogramKind::Optical, state, axes, |ix| Ok(wavefunction_sq(&rots[ix[0]], xs[ix[1]])))
    }

    /// M(X, μ, ν) on `mus × nus × xs`; degenerate directions are an error.
    pub fn symplectic(state: &FockAmplitudes, mus: Vec<f64>, nus: Vec<f64>, xs: Vec<f64>) -> Result<Self> {
        let axes = vec![Axis::real("mu", mus.clone()), Axis::real("nu", nus.clone()), Axis::real("x", xs.clone())];
        Self::evaluate(TomogramKind::Symplectic, state, axes, |ix| {
            symplectic_tomogram(state, xs[ix[2]], mus[ix[0]], nus[ix[1]])
        })
    }

    /// 𝒲(n, α) on `re × im × ns`.
    pub fn photon_number(state: &FockAmplitudes, re: Vec<f64>, im: Vec<f64>, ns: Vec<usize>) -> Result<Self> {
        let axes = vec![Axis::real("re_alpha", re.clone()), Axis::real("im_alpha", im.clone()), Axis::int("n", ns.clone())];
        Self::evaluate(TomogramKind::PhotonNumber, state, axes, |ix| {
            Ok(photon_tomogram(state, ns[ix[2]], C64::new(re[ix[0]], im[ix[1]])))
        })
    }

    /// Q(α) on `re × im`.
    pub fn husimi(state: &FockAmplitudes, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        let axes = vec![Axis::real("re_alpha", re.clone()), Axis::real("im_alpha", im.clone())];
        Self::evaluate(TomogramKind::Husimi, state, axes, |ix| Ok(husimi(state, C64::new(re[ix[0]], im[ix[1]]))))
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.values.len()).collect()
    }

    /// Header naming the axes then `value`, one row per grid point.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        let mut header: Vec<&str> = self.axes.iter().map(|a| a.name.as_str()).collect();
        header.push("value");
        let shape = self.shape();
        let rows: Vec<Vec<Field>> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let ix = grid_indices(&shape, i);
                let mut row: Vec<Field> = ix.iter().zip(&self.axes).map(|(&k, a)| a.values.field(k)).collect();
                row.push(Field::Real(*v));
                row
            })
            .collect();
        write_csv(out, &header, &rows)
    }

    /// Positivity and normalization over the emitted grid.
    ///
    /// Optical and symplectic grids integrate the last (X) axis per direction by
    /// the trapezoid rule, photon grids sum over n per α, Husimi grids integrate
    /// d²α/π over the whole plane sample.
    pub fn audit(&self) -> GridAudit {
        let min_value = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let shape = self.shape();
        let inner = *shape.last().unwrap_or(&1);
        let integrals: Vec<f64> = match self.kind {
            TomogramKind::Optical | TomogramKind::Symplectic => {
                let xs = &self.axes.last().expect("grid has an x axis").values;
                self.values
                    .chunks(inner)
                    .map(|chunk| {
                        (1..chunk.len()).map(|i| 0.5 * (chunk[i] + chunk[i - 1]) * (xs.real(i) - xs.real(i - 1))).sum()
                    })
                    .collect()
            }
            TomogramKind::PhotonNumber => self.values.chunks(inner).map(|c| c.iter().sum()).collect(),
            TomogramKind::Husimi => {
                let (re, im) = (&self.axes[0].values, &self.axes[1].values);
                let weights = |ax: &AxisValues, i: usize| -> f64 {
                    let n = ax.len();
                    if n < 2 {
                        return 0.0;
                    }
                    let left = if i > 0 { ax.real(i) - ax.real(i - 1) } else { 0.0 };
                    let right = if i + 1 < n { ax.real(i + 1) - ax.real(i) } else { 0.0 };
                    0.5 * (left + right)
                };
                let mut sum = 0.0;
                for i in 0..re.len() {
                    for j in 0..im.len() {
                        sum += weights(re, i) * weights(im, j) * self.values[i * im.len() + j];
                    }
                }
                vec![sum / PI]
            }
        };
        let max_deviation = integrals.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        GridAudit { min_value, min_integral: integrals.iter().cloned().fold(f64::INFINITY, f64::min), max_deviation }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAudit {
    pub min_value: f64,
    pub min_integral: f64,
    pub max_deviation: f64,
}

impl GridAudit {
    pub fn passes(&self, tol: f64) -> bool {
        self.min_value >= 0.0 && self.max_deviation <= tol
    }
}
