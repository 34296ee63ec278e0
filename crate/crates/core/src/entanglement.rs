//! Reduced density matrices and linear entropy of two-mode pure states, plus
//! the closed-form series for total-number deformed coherent states and
//! their even/odd superpositions.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::deformation::DeformationSpec;
use crate::error::{Error, Result};
use crate::special_fn::log_factorial;
use crate::states::{CatParity, TwoModeAmplitudes, TWO_MODE_CAP};

/// ρ₁ = Tr₂ |ψ⟩⟨ψ|, row-major over the mode-1 Fock basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedDensity {
    dim: usize,
    rho: Vec<C64>,
}

impl ReducedDensity {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, n: usize, p: usize) -> C64 {
        self.rho[n * self.dim + p]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|n| self.get(n, n).re).sum()
    }

    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for n in 0..self.dim {
            for p in n..self.dim {
                worst = worst.max((self.get(n, p) - self.get(p, n).conj()).norm());
            }
        }
        worst
    }

    /// True when ρ + tol·I admits a Cholesky factorization.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let d = self.dim;
        let mut l = vec![C64::new(0.0, 0.0); d * d];
        for j in 0..d {
            let mut diag = self.get(j, j).re + tol;
            for k in 0..j {
                diag -= l[j * d + k].norm_sqr();
            }
            if diag <= 0.0 {
                return false;
            }
            let ljj = diag.sqrt();
            l[j * d + j] = C64::new(ljj, 0.0);
            for i in j + 1..d {
                let mut v = self.get(i, j);
                for k in 0..j {
                    v -= l[i * d + k] * l[j * d + k].conj();
                }
                l[i * d + j] = v / ljj;
            }
        }
        true
    }
}

/// (ρ₁)_{n,p} = Σ_k C_{n,k} C*_{p,k}.
pub fn reduce_mode2(state: &TwoModeAmplitudes) -> ReducedDensity {
    let dim = state.rows();
    let mut rho = vec![C64::new(0.0, 0.0); dim * dim];
    for n in 0..dim {
        for p in n..dim {
            let v: C64 = state.row(n).iter().zip(state.row(p)).map(|(a, b)| a * b.conj()).sum();
            rho[n * dim + p] = v;
            rho[p * dim + n] = v.conj();
        }
    }
    ReducedDensity { dim, rho }
}

/// S = 1 - Tr ρ².
pub fn linear_entropy(rho: &ReducedDensity) -> f64 {
    (1.0 - rho.purity()).clamp(0.0, 1.0)
}

/// ln of D_{n,m} = √(aⁿ bᵐ / (n! m!)) / f(n+m)! on the triangle n + m ≤ N,
/// with N chosen from the shell weights (a+b)^s / (s! f(s)!²) so the dropped
/// mass is below eps of the kept mass.
fn ln_gram_factors(a: f64, b: f64, spec: &DeformationSpec, eps: f64) -> Result<Vec<Vec<f64>>> {
    let x = a + b;
    let n_max = if x == 0.0 {
        0
    } else {
        let ln_x = x.ln();
        let mut ln_w = 0.0f64;
        let mut ln_sum = 0.0f64;
        let mut s = 0usize;
        loop {
            let ln_ratio = ln_x - ((s + 1) as f64).ln() - 2.0 * spec.ln_f(s + 1)?;
            let ln_next = ln_w + ln_ratio;
            // geometric bound on the rest once the ratio is below one
            if ln_ratio < 0.0 && ln_next - (-ln_ratio.exp()).ln_1p() - ln_sum < eps.ln() {
                break;
            }
            if s + 1 > TWO_MODE_CAP {
                return Err(Error::TailNotConverged { limit: TWO_MODE_CAP, tail: (ln_next - ln_sum).exp() });
            }
            ln_w = ln_next;
            ln_sum = ln_sum.max(ln_w) + (-(ln_sum - ln_w).abs()).exp().ln_1p();
            s += 1;
        }
        s
    };
    let lff = spec.log_f_factorials(n_max)?;
    let pow = |k: usize, v: f64| if k == 0 { 0.0 } else { k as f64 * v.ln() };
    Ok((0..=n_max)
        .map(|n| {
            (0..=n_max - n)
                .map(|m| 0.5 * (pow(n, a) + pow(m, b) - log_factorial(n) - log_factorial(m)) - lff[n + m])
                .collect()
        })
        .collect())
}

/// Σ_{n,p} G²_{n,p} / (Σ E²)² with G_{n,p} = Σ_m E_{n,m} E_{p,m}, the purity of
/// the reduced state of a real coefficient matrix E given by its logs.
fn gram_purity(ln_e: &[Vec<f64>]) -> f64 {
    let peak = ln_e.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<Vec<f64>> = ln_e.iter().map(|row| row.iter().map(|v| (v - peak).exp()).collect()).collect();
    let norm: f64 = e.iter().flatten().map(|v| v * v).sum();
    let mut sum = 0.0;
    for n in 0..e.len() {
        for p in 0..e.len() {
            let g: f64 = e[n].iter().zip(&e[p]).map(|(u, v)| u * v).sum();
            sum += g * g;
        }
    }
    sum / (norm * norm)
}

/// S_f(α₁, α₂) = 1 - N_f⁴ Σ_{n,m,p,k} |α₁|^{2(n+p)} |α₂|^{2(k+m)} / (m! n! k! p! f(n+m)! f(p+m)! f(p+k)! f(n+k)!)
/// for the total-number deformed two-mode coherent state.
///
/// The quadruple sum is Σ_{n,p} (Σ_m D_{n,m} D_{p,m})², with N_f⁻² = Σ D².
pub fn linear_entropy_series(alpha1: C64, alpha2: C64, spec: &DeformationSpec, eps: f64) -> Result<f64> {
    let ln_d = ln_gram_factors(alpha1.norm_sqr(), alpha2.norm_sqr(), spec, eps)?;
    Ok((1.0 - gram_purity(&ln_d)).clamp(0.0, 1.0))
}

/// N±⁻² = 2 ± 2 N_f² Σ_{p,q} (-1)^{p+q} |α|^{2(p+q)} / (p! q! f(p+q)!²).
///
/// Since N_f² Σ D² = 1 this equals 4 N_f² Σ over the kept parity, which is
/// evaluated instead to avoid the cancellation at small |α|.
fn cat_norm_inv_sq(ln_d: &[Vec<f64>], parity: CatParity) -> f64 {
    let mut kept = 0.0;
    let mut total = 0.0;
    for (n, row) in ln_d.iter().enumerate() {
        for (m, v) in row.iter().enumerate() {
            let w = (2.0 * v).exp();
            total += w;
            if parity.keeps(n + m) {
                kept += w;
            }
        }
    }
    4.0 * kept / total
}

/// S±_f(α) of N±(|α α, f⟩ ± |-α -α, f⟩).
///
/// The sign factor (1 ± (-1)^{m+k} ± (-1)^{n+k} + (-1)^{m+n}) splits as
/// (1 ± (-1)^{m+k})(1 ± (-1)^{n+k}), so the sum is again a Gram form of D
/// masked to one parity of n + m.
pub fn cat_linear_entropy(alpha: C64, spec: &DeformationSpec, parity: CatParity, eps: f64) -> Result<f64> {
    let x = alpha.norm_sqr();
    let ln_d = ln_gram_factors(x, x, spec, eps)?;
    let norm_inv_sq = cat_norm_inv_sq(&ln_d, parity);
    if norm_inv_sq < 1e-14 {
        return Err(Error::DegenerateSuperposition { norm_sq: norm_inv_sq });
    }
    let masked: Vec<Vec<f64>> = ln_d
        .iter()
        .enumerate()
        .map(|(n, row)| {
            row.iter()
                .enumerate()
                .map(|(m, v)| if parity.keeps(n + m) { v + 2f64.ln() } else { f64::NEG_INFINITY })
                .collect()
        })
        .collect();
    Ok((1.0 - gram_purity(&masked)).clamp(0.0, 1.0))
}

/// S⁺ for the undeformed cat, 1 - ½(1 + e^{-4|α|²})⁻²(1 + 6e^{-4|α|²} + e^{-8|α|²}).
pub fn cat_entropy_identity_limit(alpha: C64) -> f64 {
    let e = (-4.0 * alpha.norm_sqr()).exp();
    1.0 - 0.5 * (1.0 + 6.0 * e + e * e) / ((1.0 + e) * (1.0 + e))
}

/// S at λ = 0 for the Kerr deformation, where only |00⟩, |10⟩, |01⟩ survive:
/// 1 - (1 + |α₁|² + |α₂|²)⁻² (1 + 2|α₁|² + 2|α₂|² + |α₁|⁴ + |α₂|⁴).
pub fn kerr_zero_limit_entropy(alpha1: C64, alpha2: C64) -> f64 {
    let (a, b) = (alpha1.norm_sqr(), alpha2.norm_sqr());
    let n = 1.0 + a + b;
    1.0 - (1.0 + 2.0 * a + 2.0 * b + a * a + b * b) / (n * n)
}

/// Cat entropies at λ = 0: the even state is |00⟩, the odd one (|01⟩+|10⟩)/√2.
pub fn kerr_zero_limit_cat_entropy(parity: CatParity) -> f64 {
    match parity {
        CatParity::Even => 0.0,
        CatParity::Odd => 0.5,
    }
}
