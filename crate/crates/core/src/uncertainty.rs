//! Schrödinger-Robertson statistics of the deformed quadratures
//! Q = (A + A†)/√2, P = (A - A†)/(i√2), the small-λ q-oscillator bound and
//! the tomographic estimate of ⟨n² + n + 1/3⟩.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};
use std::io::{self, Write};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::deformation::DeformationSpec;
use crate::error::Result;
use crate::grid::{write_csv, Field};
use crate::states::FockAmplitudes;
use crate::tomography::{photon_moment, quadrature_moment};

/// Extra Fock levels kept beyond the state when applying A†.
pub const GUARD_LEVELS: usize = 4;

/// Boundary amplitude above which a truncated state is flagged.
pub const BOUNDARY_AMPLITUDE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureStats {
    pub mean_q: f64,
    pub mean_p: f64,
    pub sigma_qq: f64,
    pub sigma_pp: f64,
    pub sigma_qp: f64,
    /// ⟨[Q, P]⟩ = i⟨[A, A†]⟩.
    pub commutator_mean: C64,
    pub sr_lhs: f64,
    pub sr_rhs: f64,
    /// Set when the state was cut from an infinite series and its last kept
    /// amplitude is still above [`BOUNDARY_AMPLITUDE`].
    pub truncation_warning: bool,
}

impl QuadratureStats {
    pub fn sr_residual(&self) -> f64 {
        self.sr_lhs - self.sr_rhs
    }
}

/// A|ψ⟩ and A†|ψ⟩ on the state's levels plus the guard band.
fn ladder_images(state: &FockAmplitudes, spec: &DeformationSpec) -> Result<(Vec<C64>, Vec<C64>)> {
    let c = state.coeffs();
    let dim = c.len() + GUARD_LEVELS;
    // √(n f²(n)), the matrix element ⟨n-1|A|n⟩
    let elem: Vec<f64> = (0..=c.len()).map(|n| spec.n_f_squared(n).map(f64::sqrt)).collect::<Result<_>>()?;
    let mut lower = vec![C64::new(0.0, 0.0); dim];
    let mut raise = vec![C64::new(0.0, 0.0); dim];
    for (n, cn) in c.iter().enumerate() {
        if n >= 1 {
            lower[n - 1] += cn * elem[n];
        }
        raise[n + 1] += cn * elem[n + 1];
    }
    Ok((lower, raise))
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Moments of the deformed quadratures for a pure state.
pub fn deformed_quadrature_stats(state: &FockAmplitudes, spec: &DeformationSpec) -> Result<QuadratureStats> {
    let (lower, raise) = ladder_images(state, spec)?;
    let mut psi = state.coeffs().to_vec();
    psi.resize(lower.len(), C64::new(0.0, 0.0));
    let mean_a = inner(&psi, &lower);
    let q: Vec<C64> = lower.iter().zip(&raise).map(|(l, r)| (l + r) / SQRT_2).collect();
    let p: Vec<C64> = lower.iter().zip(&raise).map(|(l, r)| (l - r) / C64::new(0.0, SQRT_2)).collect();
    let mean_q = SQRT_2 * mean_a.re;
    let mean_p = SQRT_2 * mean_a.im;
    let sigma_qq = (inner(&q, &q).re - mean_q * mean_q).max(0.0);
    let sigma_pp = (inner(&p, &p).re - mean_p * mean_p).max(0.0);
    let sigma_qp = inner(&q, &p).re - mean_q * mean_p;
    let comm: f64 = state
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| spec.commutator_diag(n).map(|d| c.norm_sqr() * d))
        .sum::<Result<f64>>()?;
    let boundary = state.coeffs().last().map_or(0.0, |c| c.norm());
    Ok(QuadratureStats {
        mean_q,
        mean_p,
        sigma_qq,
        sigma_pp,
        sigma_qp,
        commutator_mean: C64::new(0.0, comm),
        sr_lhs: sigma_qq * sigma_pp - sigma_qp * sigma_qp,
        sr_rhs: 0.25 * comm * comm,
        truncation_warning: state.trunc_tail() > 0.0 && boundary > BOUNDARY_AMPLITUDE,
    })
}

/// ⟨n² + n + 1/3⟩ from the amplitudes.
pub fn number_moment_combination(state: &FockAmplitudes) -> f64 {
    photon_moment(state, 2) + photon_moment(state, 1) + 1.0 / 3.0
}

/// ¼(1 + λ²⟨n² + n + 1/3⟩), the q-oscillator bound to order λ².
pub fn qosc_small_lambda_rhs(state: &FockAmplitudes, lambda: f64) -> f64 {
    0.25 * (1.0 + lambda * lambda * number_moment_combination(state))
}

/// ħ²_eff / ħ² = 1 + λ²/3.
pub fn effective_planck(lambda: f64) -> f64 {
    1.0 + lambda * lambda / 3.0
}

/// Additive constant in the tomographic moment formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentConstant {
    /// -1/6, forced by Σ_θ ⟨X_θ⁴⟩ = 6⟨n² + n⟩ + 3.
    #[default]
    Corrected,
    /// The printed +1/12.
    Printed,
}

impl MomentConstant {
    pub fn value(self) -> f64 {
        match self {
            MomentConstant::Corrected => -1.0 / 6.0,
            MomentConstant::Printed => 1.0 / 12.0,
        }
    }
}

/// S₄ = Σ ⟨X⁴⟩ over θ ∈ {0, π/4, π/2, 3π/4}.
pub fn fourth_moment_sum(state: &FockAmplitudes) -> f64 {
    [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4].iter().map(|t| quadrature_moment(state, *t, 4)).sum()
}

/// ⟨n² + n + 1/3⟩ estimated as S₄/6 plus the chosen constant.
pub fn moment_from_optical_tomogram(state: &FockAmplitudes, constant: MomentConstant) -> f64 {
    fourth_moment_sum(state) / 6.0 + constant.value()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyRow {
    pub lambda: f64,
    pub family: String,
    pub state_digest: String,
    pub stats: QuadratureStats,
    /// Only defined for the q-oscillator.
    pub sr_rhs_small_lambda: Option<f64>,
}

/// Columns `lambda, family, state_digest, sigma_qq, sigma_pp, sigma_qp, sr_lhs, sr_rhs_exact, sr_rhs_small_lambda`.
pub fn write_uncertainty_csv<W: Write>(out: &mut W, rows: &[UncertaintyRow]) -> io::Result<()> {
    let rows: Vec<Vec<Field>> = rows
        .iter()
        .map(|r| {
            vec![
                r.lambda.into(),
                Field::Text(r.family.clone()),
                Field::Text(r.state_digest.clone()),
                r.stats.sigma_qq.into(),
                r.stats.sigma_pp.into(),
                r.stats.sigma_qp.into(),
                r.stats.sr_lhs.into(),
                r.stats.sr_rhs.into(),
                r.sr_rhs_small_lambda.map_or(Field::Text(String::new()), Field::Real),
            ]
        })
        .collect();
    write_csv(
        out,
        &["lambda", "family", "state_digest", "sigma_qq", "sigma_pp", "sigma_qp", "sr_lhs", "sr_rhs_exact", "sr_rhs_small_lambda"],
        &rows,
    )
}
