//! Truncated Fock-space states: one- and two-mode f-coherent states, their
//! even/odd superpositions, and the classical f-oscillator trajectory.
//!
//! Amplitudes are built in log space, ln|c_n| and arg c_n separately, and
//! exponentiated only after normalization. The truncation point is chosen
//! adaptively from the ratio of successive series terms.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::deformation::DeformationSpec;
use crate::error::{Error, Result};
use crate::special_fn::log_factorial;

/// Default tail-mass tolerance for adaptive truncation.
pub const DEFAULT_EPS: f64 = 1e-12;
/// Largest photon number kept for one mode.
pub const ONE_MODE_CAP: usize = 512;
/// Largest photon number kept per axis for two modes.
pub const TWO_MODE_CAP: usize = 256;

const NORM_TOL: f64 = 1e-10;

/// A normalized one-mode pure state Σ c_n |n⟩ on a finite basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockAmplitudes {
    coeffs: Vec<C64>,
    trunc_tail: f64,
}

impl FockAmplitudes {
    /// Normalizes `coeffs` and wraps them with the given tail estimate.
    pub fn from_coeffs(coeffs: Vec<C64>, trunc_tail: f64) -> Result<Self> {
        let norm_sq: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if !(norm_sq > 0.0) || !norm_sq.is_finite() {
            return Err(Error::NotNormalized(norm_sq));
        }
        let scale = norm_sq.sqrt().recip();
        Ok(FockAmplitudes { coeffs: coeffs.into_iter().map(|c| c * scale).collect(), trunc_tail })
    }

    /// Checks normalization instead of rescaling.
    pub fn from_normalized(coeffs: Vec<C64>, trunc_tail: f64) -> Result<Self> {
        let norm_sq: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm_sq));
        }
        Ok(FockAmplitudes { coeffs, trunc_tail })
    }

    /// The number state |m⟩.
    pub fn fock(m: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); m + 1];
        coeffs[m] = C64::new(1.0, 0.0);
        FockAmplitudes { coeffs, trunc_tail: 0.0 }
    }

    pub fn vacuum() -> Self {
        Self::fock(0)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Highest retained photon number.
    pub fn max_n(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn trunc_tail(&self) -> f64 {
        self.trunc_tail
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Photon-number distribution |c_n|².
    pub fn probabilities(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Provenance tag derived from the amplitudes printed at full precision.
    pub fn digest(&self) -> String {
        digest_coeffs(&self.coeffs)
    }
}

/// A normalized two-mode pure state Σ C_{n1,n2} |n1 n2⟩, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoModeAmplitudes {
    rows: usize,
    cols: usize,
    coeffs: Vec<C64>,
    trunc_tail: f64,
}

impl TwoModeAmplitudes {
    /// Normalizes a row-major `rows × cols` coefficient matrix.
    pub fn from_coeffs(rows: usize, cols: usize, coeffs: Vec<C64>, trunc_tail: f64) -> Result<Self> {
        if rows * cols != coeffs.len() || rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients do not fill a {rows}x{cols} matrix",
                coeffs.len()
            )));
        }
        let norm_sq: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if !(norm_sq > 0.0) || !norm_sq.is_finite() {
            return Err(Error::NotNormalized(norm_sq));
        }
        let scale = norm_sq.sqrt().recip();
        Ok(TwoModeAmplitudes { rows, cols, coeffs: coeffs.into_iter().map(|c| c * scale).collect(), trunc_tail })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, n1: usize, n2: usize) -> C64 {
        if n1 < self.rows && n2 < self.cols {
            self.coeffs[n1 * self.cols + n2]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// Row `n1`: the amplitudes C_{n1, ·}.
    pub fn row(&self, n1: usize) -> &[C64] {
        &self.coeffs[n1 * self.cols..(n1 + 1) * self.cols]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn trunc_tail(&self) -> f64 {
        self.trunc_tail
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// The state with the two modes exchanged.
    pub fn swapped(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for n2 in 0..self.cols {
            for n1 in 0..self.rows {
                coeffs.push(self.get(n1, n2));
            }
        }
        TwoModeAmplitudes { rows: self.cols, cols: self.rows, coeffs, trunc_tail: self.trunc_tail }
    }

    pub fn digest(&self) -> String {
        digest_coeffs(&self.coeffs)
    }
}

fn digest_coeffs(coeffs: &[C64]) -> String {
    let mut hasher = Sha256::new();
    for c in coeffs {
        hasher.update(format!("{:.16e},{:.16e};", c.re, c.im).as_bytes());
    }
    let hash = hasher.finalize();
    let hex: String = hash.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1e-6 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("truncation tolerance must lie in (0, 1e-6], got {eps}")))
    }
}

/// Log weights ln t_0, …, ln t_N of a positive series with t_0 = 1, cut where
/// the estimated remaining mass drops below `eps` of the total.
///
/// `ln_ratio(n)` returns ln(t_n / t_{n-1}). The tail beyond N is bounded by
/// t_{N+1} / (1 - r) with r = t_{N+1}/t_N, valid once the ratios stop
/// increasing, which holds for every non-decreasing deformation.
fn truncate_series<R>(ln_ratio: R, eps: f64, cap: usize) -> Result<(Vec<f64>, f64)>
where
    R: Fn(usize) -> Result<f64>,
{
    let mut ln_w = vec![0.0];
    // running sum kept as exp(scale) * acc
    let mut scale = 0.0f64;
    let mut acc = 1.0f64;
    let mut next = ln_ratio(1)?;
    let mut tail = f64::INFINITY;
    loop {
        let n = ln_w.len() - 1;
        let ln_next = ln_w[n] + next;
        if next < 0.0 {
            let bound = ln_next - (-next.exp()).ln_1p();
            tail = (bound - scale).exp() / acc;
            if tail < eps {
                return Ok((ln_w, tail / (1.0 + tail)));
            }
        }
        if n == cap {
            return Err(Error::TruncationOverflow { cap, tail });
        }
        ln_w.push(ln_next);
        if ln_next > scale {
            acc = acc * (scale - ln_next).exp() + 1.0;
            scale = ln_next;
        } else {
            acc += (ln_next - scale).exp();
        }
        next = ln_ratio(n + 2)?;
    }
}

fn ln_abs(z: C64) -> f64 {
    let r = z.norm();
    if r == 0.0 {
        f64::NEG_INFINITY
    } else {
        r.ln()
    }
}

/// The f-coherent state |α, f⟩ ∝ Σ αⁿ / (√(n!) f(n)!) |n⟩, an eigenstate of Â = â f(n̂).
pub fn f_coherent(alpha: C64, spec: &DeformationSpec, eps: f64) -> Result<FockAmplitudes> {
    check_eps(eps)?;
    if alpha.norm() == 0.0 {
        return Ok(FockAmplitudes::vacuum());
    }
    let ln_x = 2.0 * alpha.norm().ln();
    let (ln_w, tail) = truncate_series(|n| Ok(ln_x - (n as f64).ln() - 2.0 * spec.ln_f(n)?), eps, ONE_MODE_CAP)?;
    let phase = alpha.arg();
    let coeffs = ln_w
        .iter()
        .enumerate()
        .map(|(n, lw)| C64::from_polar((0.5 * lw).exp(), n as f64 * phase))
        .collect();
    FockAmplitudes::from_coeffs(coeffs, tail)
}

/// The Glauber coherent state |α⟩.
pub fn glauber(alpha: C64, eps: f64) -> Result<FockAmplitudes> {
    f_coherent(alpha, &DeformationSpec::identity(), eps)
}

/// A deformation function of both photon numbers, f_i(n1, n2).
pub trait ModeDeformation {
    fn value(&self, n1: usize, n2: usize) -> Result<f64>;
}

impl<F: Fn(usize, usize) -> f64> ModeDeformation for F {
    fn value(&self, n1: usize, n2: usize) -> Result<f64> {
        Ok(self(n1, n2))
    }
}

/// f(n1 + n2) for a one-variable deformation.
#[derive(Debug, Clone, Copy)]
pub struct TotalNumber<'a>(pub &'a DeformationSpec);

impl ModeDeformation for TotalNumber<'_> {
    fn value(&self, n1: usize, n2: usize) -> Result<f64> {
        self.0.f_value(n1 + n2)
    }
}

/// f(n_i) for one of the modes, ignoring the other.
#[derive(Debug, Clone, Copy)]
pub enum SingleMode<'a> {
    First(&'a DeformationSpec),
    Second(&'a DeformationSpec),
}

impl ModeDeformation for SingleMode<'_> {
    fn value(&self, n1: usize, n2: usize) -> Result<f64> {
        match self {
            SingleMode::First(s) => s.f_value(n1),
            SingleMode::Second(s) => s.f_value(n2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompatibilityReport {
    pub compatible: bool,
    /// First (n1, n2) in row-major order where the identity fails.
    pub first_violation: Option<(usize, usize)>,
}

/// Checks f1(n1, n2-1) f2(n1, n2) = f1(n1, n2) f2(n1-1, n2) for 1 ≤ n1, n2 ≤ n_max.
pub fn check_compatibility<F1, F2>(f1: &F1, f2: &F2, n_max: usize) -> Result<CompatibilityReport>
where
    F1: ModeDeformation + ?Sized,
    F2: ModeDeformation + ?Sized,
{
    for n1 in 1..=n_max {
        for n2 in 1..=n_max {
            let lhs = f1.value(n1, n2 - 1)? * f2.value(n1, n2)?;
            let rhs = f1.value(n1, n2)? * f2.value(n1 - 1, n2)?;
            if (lhs - rhs).abs() > 1e-12 * lhs.abs().max(rhs.abs()) {
                return Ok(CompatibilityReport { compatible: false, first_violation: Some((n1, n2)) });
            }
        }
    }
    Ok(CompatibilityReport { compatible: true, first_violation: None })
}

fn positive_ln<F: ModeDeformation + ?Sized>(f: &F, n1: usize, n2: usize) -> Result<f64> {
    let v = f.value(n1, n2)?;
    if v > 0.0 && v.is_finite() {
        Ok(v.ln())
    } else {
        Err(Error::DeformationSingular { n: n1 + n2, reason: format!("f({n1}, {n2}) = {v}") })
    }
}

/// ln|C| on a (n+1)×(n+1) grid built by the coefficient recurrences, first
/// along n1 then down each column (`rows_first`) or the other way round.
fn recurrence_grid<F1, F2>(
    ln_a1: f64,
    ln_a2: f64,
    f1: &F1,
    f2: &F2,
    n: usize,
    rows_first: bool,
) -> Result<Vec<f64>>
where
    F1: ModeDeformation + ?Sized,
    F2: ModeDeformation + ?Sized,
{
    let dim = n + 1;
    let mut g = vec![f64::NEG_INFINITY; dim * dim];
    g[0] = 0.0;
    let step1 = |g: &[f64], i: usize, j: usize| -> Result<f64> {
        // C_{i,j} = α1 / (√i f1(i,j)) C_{i-1,j}
        let prev = g[(i - 1) * dim + j];
        if ln_a1 == f64::NEG_INFINITY || prev == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(prev + ln_a1 - 0.5 * (i as f64).ln() - positive_ln(f1, i, j)?)
    };
    let step2 = |g: &[f64], i: usize, j: usize| -> Result<f64> {
        let prev = g[i * dim + j - 1];
        if ln_a2 == f64::NEG_INFINITY || prev == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(prev + ln_a2 - 0.5 * (j as f64).ln() - positive_ln(f2, i, j)?)
    };
    if rows_first {
        for i in 1..dim {
            g[i * dim] = step1(&g, i, 0)?;
        }
        for i in 0..dim {
            for j in 1..dim {
                g[i * dim + j] = step2(&g, i, j)?;
            }
        }
    } else {
        for j in 1..dim {
            g[j] = step2(&g, 0, j)?;
        }
        for j in 0..dim {
            for i in 1..dim {
                g[i * dim + j] = step1(&g, i, j)?;
            }
        }
    }
    Ok(g)
}

/// Two-mode f-coherent state for a compatible pair (f1, f2), the joint
/// eigenstate of Â_i = â_i f_i(n̂1, n̂2).
///
/// The coefficient grid is built along both recurrence orders; any
/// disagreement beyond 1e-10 relative means the pair violates the
/// compatibility condition on the reached grid.
pub fn two_mode_f_coherent_general<F1, F2>(
    alpha1: C64,
    alpha2: C64,
    f1: &F1,
    f2: &F2,
    eps: f64,
) -> Result<TwoModeAmplitudes>
where
    F1: ModeDeformation + ?Sized,
    F2: ModeDeformation + ?Sized,
{
    check_eps(eps)?;
    let (ln_a1, ln_a2) = (ln_abs(alpha1), ln_abs(alpha2));
    let (ph1, ph2) = (alpha1.arg(), alpha2.arg());
    let mut n = 16usize;
    loop {
        let a = recurrence_grid(ln_a1, ln_a2, f1, f2, n, true)?;
        let b = recurrence_grid(ln_a1, ln_a2, f1, f2, n, false)?;
        let dim = n + 1;
        for i in 0..dim {
            for j in 0..dim {
                let (x, y) = (a[i * dim + j], b[i * dim + j]);
                if x == f64::NEG_INFINITY && y == f64::NEG_INFINITY {
                    continue;
                }
                if !((x - y).exp_m1().abs() <= 1e-10) {
                    return Err(Error::IncompatibleDeformation { n1: i, n2: j });
                }
            }
        }
        // shell masses by max(n1, n2), relative to the largest entry
        let top = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut shells = vec![0.0f64; dim];
        for i in 0..dim {
            for j in 0..dim {
                shells[i.max(j)] += (2.0 * (a[i * dim + j] - top)).exp();
            }
        }
        let total: f64 = shells.iter().sum();
        let outer = shells[n] / total;
        if outer < 1e-4 * eps && shells[n] <= shells[n - 1] {
            // `keep` is the highest retained index
            let mut keep = n;
            let mut tail_out = 0.0;
            while keep > 0 && tail_out + shells[keep] / total < eps {
                tail_out += shells[keep] / total;
                keep -= 1;
            }
            let kd = keep + 1;
            let mut coeffs = Vec::with_capacity(kd * kd);
            for i in 0..kd {
                for j in 0..kd {
                    let lv = a[i * dim + j];
                    let mag = if lv == f64::NEG_INFINITY { 0.0 } else { (lv - top).exp() };
                    coeffs.push(C64::from_polar(mag, i as f64 * ph1 + j as f64 * ph2));
                }
            }
            return TwoModeAmplitudes::from_coeffs(kd, kd, coeffs, tail_out);
        }
        if n >= TWO_MODE_CAP {
            return Err(Error::TruncationOverflow { cap: TWO_MODE_CAP, tail: outer });
        }
        n = (2 * n).min(TWO_MODE_CAP);
    }
}

/// Two-mode state whose deformation depends on the total photon number,
/// C ∝ α1^{n1} α2^{n2} / (√(n1! n2!) f(n1+n2)!).
///
/// Grouping terms by n = n1 + n2 gives shell weights (|α1|²+|α2|²)ⁿ / (n! f(n)!²),
/// so truncation reduces to the one-mode series; the kept region is the
/// triangle n1 + n2 ≤ N stored in an (N+1)×(N+1) matrix.
pub fn two_mode_f_coherent_total(
    alpha1: C64,
    alpha2: C64,
    spec: &DeformationSpec,
    eps: f64,
) -> Result<TwoModeAmplitudes> {
    check_eps(eps)?;
    let x = alpha1.norm_sqr() + alpha2.norm_sqr();
    let (n_max, tail) = if x == 0.0 {
        (0, 0.0)
    } else {
        let ln_x = x.ln();
        let (ln_w, tail) = truncate_series(|n| Ok(ln_x - (n as f64).ln() - 2.0 * spec.ln_f(n)?), eps, TWO_MODE_CAP)?;
        (ln_w.len() - 1, tail)
    };
    let lff = spec.log_f_factorials(n_max)?;
    let (ln_a1, ln_a2) = (ln_abs(alpha1), ln_abs(alpha2));
    let (ph1, ph2) = (alpha1.arg(), alpha2.arg());
    let dim = n_max + 1;
    let mut coeffs = vec![C64::new(0.0, 0.0); dim * dim];
    for n1 in 0..dim {
        for n2 in 0..dim - n1 {
            let p1 = if n1 == 0 { 0.0 } else { n1 as f64 * ln_a1 };
            let p2 = if n2 == 0 { 0.0 } else { n2 as f64 * ln_a2 };
            let lv = p1 + p2 - 0.5 * (log_factorial(n1) + log_factorial(n2)) - lff[n1 + n2];
            coeffs[n1 * dim + n2] = C64::from_polar(lv.exp(), n1 as f64 * ph1 + n2 as f64 * ph2);
        }
    }
    TwoModeAmplitudes::from_coeffs(dim, dim, coeffs, tail)
}

/// Parity of an even/odd superposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CatParity {
    Even,
    Odd,
}

impl CatParity {
    pub fn sign(self) -> f64 {
        match self {
            CatParity::Even => 1.0,
            CatParity::Odd => -1.0,
        }
    }

    /// True when total photon number `n` survives the superposition.
    pub fn keeps(self, n: usize) -> bool {
        n.is_multiple_of(2) == (self == CatParity::Even)
    }
}

impl TryFrom<i32> for CatParity {
    type Error = Error;

    fn try_from(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(CatParity::Even),
            -1 => Ok(CatParity::Odd),
            _ => Err(Error::InvalidArgument(format!("superposition sign must be +1 or -1, got {sign}"))),
        }
    }
}

/// N±(|α α, f⟩ ± |-α -α, f⟩) with the total-number deformation.
///
/// Flipping α multiplies C_{n1,n2} by (-1)^{n1+n2}, so the superposition
/// keeps exactly one parity class of n1 + n2.
pub fn cat_superposition(alpha: C64, spec: &DeformationSpec, parity: CatParity, eps: f64) -> Result<TwoModeAmplitudes> {
    let base = two_mode_f_coherent_total(alpha, alpha, spec, eps)?;
    let (rows, cols) = (base.rows(), base.cols());
    let mut coeffs = Vec::with_capacity(rows * cols);
    let mut norm_sq = 0.0;
    for n1 in 0..rows {
        for n2 in 0..cols {
            let c = if parity.keeps(n1 + n2) { base.get(n1, n2) * 2.0 } else { C64::new(0.0, 0.0) };
            norm_sq += c.norm_sqr();
            coeffs.push(c);
        }
    }
    if norm_sq < 1e-14 {
        return Err(Error::DegenerateSuperposition { norm_sq });
    }
    TwoModeAmplitudes::from_coeffs(rows, cols, coeffs, base.trunc_tail())
}

/// Complex amplitude of a classical oscillator, with its conserved energy |α|².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalAmplitude {
    alpha: C64,
    energy: f64,
}

impl ClassicalAmplitude {
    pub fn new(alpha: C64) -> Self {
        ClassicalAmplitude { alpha, energy: alpha.norm_sqr() }
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }
}

/// Vibration frequency ω(E) = d(E f²(E))/dE by central difference.
pub fn classical_frequency<F: Fn(f64) -> f64>(f: F, energy: f64) -> f64 {
    let h = 1e-6 * energy.max(1.0);
    let g = |e: f64| e * f(e).powi(2);
    if energy >= h {
        (g(energy + h) - g(energy - h)) / (2.0 * h)
    } else {
        // f may be undefined for E < 0
        (-3.0 * g(energy) + 4.0 * g(energy + h) - g(energy + 2.0 * h)) / (2.0 * h)
    }
}

/// α(t) = α(0) exp(-i ω(|α(0)|²) t) for a smooth classical deformation f(E).
pub fn classical_evolution<F: Fn(f64) -> f64>(a0: ClassicalAmplitude, f: F, t: f64) -> C64 {
    if t == 0.0 {
        return a0.alpha;
    }
    let omega = classical_frequency(f, a0.energy);
    a0.alpha * C64::from_polar(1.0, -omega * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::hyp0f1;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vacuum_for_zero_alpha() {
        for spec in [DeformationSpec::identity(), DeformationSpec::kerr(0.3).unwrap()] {
            let s = f_coherent(c(0.0, 0.0), &spec, DEFAULT_EPS).unwrap();
            assert_eq!(s.coeffs(), &[c(1.0, 0.0)]);
        }
    }

    #[test]
    fn glauber_amplitudes() {
        let alpha = c(0.8, -1.1);
        let s = glauber(alpha, DEFAULT_EPS).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(s.trunc_tail() < DEFAULT_EPS);
        for (n, cn) in s.coeffs().iter().enumerate() {
            let expected = (-alpha.norm_sqr() / 2.0).exp() * alpha.powu(n as u32) / log_factorial(n).mul_add(0.5, 0.0).exp();
            assert!((cn - expected).norm() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn kerr_normalization_matches_bessel() {
        let s = f_coherent(c(1.0, 0.0), &DeformationSpec::kerr(1.0).unwrap(), DEFAULT_EPS).unwrap();
        let norm = hyp0f1(1.0, 1.0).unwrap().powf(-0.5);
        assert!((s.coeffs()[0].re - norm).abs() < 1e-13);
        // I_0(2)^(-1/2) from the direct series Σ 1/(n!)²
        let direct: f64 = (0..40).map(|n| (-2.0 * log_factorial(n)).exp()).sum();
        assert!((s.coeffs()[0].re - direct.powf(-0.5)).abs() < 1e-13);
    }

    #[test]
    fn kerr_coefficients_match_closed_form() {
        for &lambda in &[0.3, 2.0] {
            let alpha = c(0.9, 0.4);
            let s = f_coherent(alpha, &DeformationSpec::kerr(lambda).unwrap(), DEFAULT_EPS).unwrap();
            let norm = hyp0f1(lambda, lambda * alpha.norm_sqr()).unwrap().powf(-0.5);
            for (n, cn) in s.coeffs().iter().enumerate() {
                let nf = n as f64;
                let mag = (0.5
                    * (nf * lambda.ln() + libm::lgamma(lambda) - log_factorial(n) - libm::lgamma(lambda + nf)))
                .exp();
                let expected = norm * alpha.powu(n as u32) * mag;
                assert!((cn - expected).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn eigenstate_of_deformed_lowering() {
        let eps = DEFAULT_EPS;
        for spec in [
            DeformationSpec::identity(),
            DeformationSpec::kerr(0.5).unwrap(),
            DeformationSpec::qosc(0.2).unwrap(),
        ] {
            let alpha = c(1.2, 0.7);
            let s = f_coherent(alpha, &spec, eps).unwrap();
            let cs = s.coeffs();
            let mut resid = 0.0;
            for n in 0..s.max_n() {
                let lowered = cs[n + 1] * spec.f_value(n + 1).unwrap() * ((n + 1) as f64).sqrt();
                resid += (lowered - alpha * cs[n]).norm_sqr();
            }
            assert!(resid.sqrt() < 10.0 * eps, "{}: {}", spec.label(), resid.sqrt());
        }
    }

    #[test]
    fn kerr_large_lambda_is_glauber() {
        for &r in &[0.5, 1.0, 2.0] {
            let alpha = C64::from_polar(r, 0.3);
            let k = f_coherent(alpha, &DeformationSpec::kerr(1e6).unwrap(), DEFAULT_EPS).unwrap();
            let g = glauber(alpha, DEFAULT_EPS).unwrap();
            let overlap: C64 = k.coeffs().iter().zip(g.coeffs()).map(|(a, b)| a.conj() * b).sum();
            assert!(overlap.norm() > 1.0 - 1e-4);
        }
    }

    #[test]
    fn truncation_errors() {
        assert!(matches!(glauber(c(1.0, 0.0), 0.1), Err(Error::InvalidArgument(_))));
        assert!(matches!(glauber(c(30.0, 0.0), DEFAULT_EPS), Err(Error::TruncationOverflow { .. })));
        let t = DeformationSpec::tabulated(vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(f_coherent(c(1.0, 0.0), &t, DEFAULT_EPS), Err(Error::DeformationSingular { n: 3, .. })));
        assert!(matches!(
            f_coherent(c(1.0, 0.0), &DeformationSpec::kerr(0.5).unwrap(), DEFAULT_EPS),
            Ok(_)
        ));
    }

    #[test]
    fn compatibility_examples() {
        let g = |n1: usize, n2: usize| 1.0 + ((n1 + n2) as f64).sqrt();
        assert!(check_compatibility(&g, &g, 12).unwrap().compatible);
        let a = |n1: usize, _: usize| (n1 as f64 + 2.0).ln();
        let b = |_: usize, n2: usize| 1.0 / (n2 as f64 + 1.0);
        assert!(check_compatibility(&a, &b, 12).unwrap().compatible);
        let bad1 = |_: usize, n2: usize| n2 as f64 + 1.0;
        let one = |_: usize, _: usize| 1.0;
        let r = check_compatibility(&bad1, &one, 5).unwrap();
        assert!(!r.compatible);
        assert_eq!(r.first_violation, Some((1, 1)));
        // LHS = f1(1,0) f2(1,1) = 1, RHS = f1(1,1) f2(0,1) = 2
        assert_eq!(bad1(1, 0) * one(1, 1), 1.0);
        assert_eq!(bad1(1, 1) * one(0, 1), 2.0);
    }

    #[test]
    fn general_pair_product_of_glauber() {
        let (a1, a2) = (c(0.7, 0.2), c(-0.4, 1.0));
        let one = |_: usize, _: usize| 1.0;
        let s = two_mode_f_coherent_general(a1, a2, &one, &one, DEFAULT_EPS).unwrap();
        let g1 = glauber(a1, 1e-15).unwrap();
        let g2 = glauber(a2, 1e-15).unwrap();
        let mut diff = 0.0;
        for n1 in 0..s.rows() {
            for n2 in 0..s.cols() {
                let e = g1.coeffs().get(n1).copied().unwrap_or_default() * g2.coeffs().get(n2).copied().unwrap_or_default();
                diff += (s.get(n1, n2) - e).norm_sqr();
            }
        }
        assert!(diff < 10.0 * DEFAULT_EPS, "{diff}");
        let z = two_mode_f_coherent_general(c(0.0, 0.0), c(0.0, 0.0), &one, &one, DEFAULT_EPS).unwrap();
        assert!((z.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((z.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn general_pair_rejects_incompatible() {
        let bad1 = |_: usize, n2: usize| n2 as f64 + 1.0;
        let one = |_: usize, _: usize| 1.0;
        let r = two_mode_f_coherent_general(c(0.5, 0.0), c(0.5, 0.0), &bad1, &one, DEFAULT_EPS);
        assert_eq!(r, Err(Error::IncompatibleDeformation { n1: 1, n2: 1 }));
    }

    /// Brute-force recurrence in plain complex arithmetic, rows then columns
    /// or columns then rows.
    fn brute_grid(a1: C64, a2: C64, f1: &dyn Fn(usize, usize) -> f64, f2: &dyn Fn(usize, usize) -> f64, rows_first: bool) -> Vec<Vec<C64>> {
        let n = 10;
        let mut g = vec![vec![c(0.0, 0.0); n]; n];
        g[0][0] = c(1.0, 0.0);
        let s1 = |g: &Vec<Vec<C64>>, i: usize, j: usize| g[i - 1][j] * a1 / ((i as f64).sqrt() * f1(i, j));
        let s2 = |g: &Vec<Vec<C64>>, i: usize, j: usize| g[i][j - 1] * a2 / ((j as f64).sqrt() * f2(i, j));
        if rows_first {
            for i in 1..n {
                g[i][0] = s1(&g, i, 0);
            }
            for i in 0..n {
                for j in 1..n {
                    g[i][j] = s2(&g, i, j);
                }
            }
        } else {
            for j in 1..n {
                g[0][j] = s2(&g, 0, j);
            }
            for j in 0..n {
                for i in 1..n {
                    g[i][j] = s1(&g, i, j);
                }
            }
        }
        g
    }

    #[test]
    fn general_pair_path_independence() {
        let (a1, a2) = (c(0.6, 0.3), c(0.9, -0.2));
        let f = |n1: usize, n2: usize| (1.0 + 0.3 * (n1 + n2) as f64).sqrt();
        let r = brute_grid(a1, a2, &f, &f, true);
        let col = brute_grid(a1, a2, &f, &f, false);
        let s = two_mode_f_coherent_general(a1, a2, &f, &f, DEFAULT_EPS).unwrap();
        let scale = s.get(0, 0);
        for i in 0..10 {
            for j in 0..10 {
                assert!((r[i][j] - col[i][j]).norm() <= 1e-12 * r[i][j].norm());
                assert!((r[i][j] * scale - s.get(i, j)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn total_matches_general_pair() {
        let spec = DeformationSpec::kerr(0.5).unwrap();
        let (a1, a2) = (c(1.0, 0.0), c(1.0, 0.0));
        let total = two_mode_f_coherent_total(a1, a2, &spec, DEFAULT_EPS).unwrap();
        let tn = TotalNumber(&spec);
        let general = two_mode_f_coherent_general(a1, a2, &tn, &tn, DEFAULT_EPS).unwrap();
        let dim = total.rows().max(general.rows());
        let mut diff = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                diff += (total.get(i, j) - general.get(i, j)).norm_sqr();
            }
        }
        assert!(diff < 10.0 * DEFAULT_EPS, "{diff}");
    }

    #[test]
    fn total_identity_is_product() {
        let (a1, a2) = (c(0.3, -0.8), c(1.1, 0.5));
        let s = two_mode_f_coherent_total(a1, a2, &DeformationSpec::identity(), DEFAULT_EPS).unwrap();
        let g1 = glauber(a1, 1e-15).unwrap();
        let g2 = glauber(a2, 1e-15).unwrap();
        let mut diff = 0.0;
        for n1 in 0..s.rows() {
            for n2 in 0..s.cols() {
                let e = g1.coeffs().get(n1).copied().unwrap_or_default() * g2.coeffs().get(n2).copied().unwrap_or_default();
                diff += (s.get(n1, n2) - e).norm_sqr();
            }
        }
        assert!(diff < 10.0 * DEFAULT_EPS, "{diff}");
    }

    #[test]
    fn total_swap_transposes() {
        let spec = DeformationSpec::kerr(0.8).unwrap();
        let (a1, a2) = (c(0.3, 0.4), c(1.2, -0.1));
        let s12 = two_mode_f_coherent_total(a1, a2, &spec, DEFAULT_EPS).unwrap();
        let s21 = two_mode_f_coherent_total(a2, a1, &spec, DEFAULT_EPS).unwrap();
        assert_eq!(s12.swapped(), s21);
    }

    #[test]
    fn separable_general_pair() {
        let k = DeformationSpec::kerr(0.7).unwrap();
        let q = DeformationSpec::qosc(0.2).unwrap();
        let (f1, f2) = (SingleMode::First(&k), SingleMode::Second(&q));
        let (a1, a2) = (c(0.8, 0.1), c(0.5, 0.5));
        let s = two_mode_f_coherent_general(a1, a2, &f1, &f2, DEFAULT_EPS).unwrap();
        let m1 = f_coherent(a1, &k, 1e-15).unwrap();
        let m2 = f_coherent(a2, &q, 1e-15).unwrap();
        let mut diff = 0.0;
        for n1 in 0..s.rows() {
            for n2 in 0..s.cols() {
                let e = m1.coeffs().get(n1).copied().unwrap_or_default() * m2.coeffs().get(n2).copied().unwrap_or_default();
                diff += (s.get(n1, n2) - e).norm_sqr();
            }
        }
        assert!(diff < 10.0 * DEFAULT_EPS, "{diff}");
    }

    #[test]
    fn cat_parity_and_limits() {
        let spec = DeformationSpec::kerr(0.6).unwrap();
        for parity in [CatParity::Even, CatParity::Odd] {
            let s = cat_superposition(c(0.9, 0.3), &spec, parity, DEFAULT_EPS).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            for n1 in 0..s.rows() {
                for n2 in 0..s.cols() {
                    if !parity.keeps(n1 + n2) {
                        assert!(s.get(n1, n2).norm() < 1e-12);
                    }
                }
            }
        }
        let even = cat_superposition(c(1e-9, 0.0), &spec, CatParity::Even, DEFAULT_EPS).unwrap();
        assert!((even.get(0, 0).norm() - 1.0).abs() < 1e-12);
        assert!(matches!(
            cat_superposition(c(0.0, 0.0), &spec, CatParity::Odd, DEFAULT_EPS),
            Err(Error::DegenerateSuperposition { .. })
        ));
        assert_eq!(CatParity::try_from(1).unwrap(), CatParity::Even);
        assert_eq!(CatParity::try_from(-1).unwrap(), CatParity::Odd);
        assert!(CatParity::try_from(0).is_err());
    }

    #[test]
    fn cat_norm_matches_series_formula() {
        // N±^{-2} = 2 ± 2 N_f² Σ (-1)^{p+q} x^{p+q} / (p! q! f(p+q)!²)
        let spec = DeformationSpec::kerr(1.5).unwrap();
        let alpha = 0.8f64;
        let x = alpha * alpha;
        let lff = spec.log_f_factorials(80).unwrap();
        let (mut plain, mut alt) = (0.0, 0.0);
        for p in 0..40usize {
            for q in 0..40usize {
                let w = ((p + q) as f64 * x.ln() - log_factorial(p) - log_factorial(q) - 2.0 * lff[p + q]).exp();
                plain += w;
                alt += if (p + q) % 2 == 0 { w } else { -w };
            }
        }
        let nf2 = 1.0 / plain;
        let base = two_mode_f_coherent_total(c(alpha, 0.0), c(alpha, 0.0), &spec, DEFAULT_EPS).unwrap();
        for parity in [CatParity::Even, CatParity::Odd] {
            let inv = 2.0 + parity.sign() * 2.0 * nf2 * alt;
            let s = cat_superposition(c(alpha, 0.0), &spec, parity, DEFAULT_EPS).unwrap();
            let n_pm = inv.powf(-0.5);
            // C± = N± (C + (-1)^{n} C) from the normalized base state
            let expected = n_pm * base.get(0, 0) * (1.0 + parity.sign());
            assert!((s.get(0, 0) - expected).norm() < 1e-12);
            let expected = n_pm * base.get(1, 0) * (1.0 - parity.sign());
            assert!((s.get(1, 0) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn classical_trajectories() {
        let a0 = ClassicalAmplitude::new(c(0.6, -0.3));
        assert!((a0.energy() - 0.45).abs() < 1e-15);
        let t = 2.7;
        let harmonic = classical_evolution(a0, |_| 1.0, t);
        assert!((harmonic - a0.alpha() * C64::from_polar(1.0, -t)).norm() < 1e-9);
        assert_eq!(classical_evolution(a0, |e| e.sqrt(), 0.0), a0.alpha());
        // f²(E) = E: E f² = E², ω = 2E
        let quad = classical_evolution(a0, |e| e.sqrt(), t);
        let expected = a0.alpha() * C64::from_polar(1.0, -2.0 * a0.energy() * t);
        assert!((quad - expected).norm() < 1e-8);
        assert!((quad.norm() - a0.alpha().norm()).abs() < 1e-15);
        // near E = 0 the one-sided stencil avoids f at negative energy
        let w = classical_frequency(|e: f64| e.sqrt(), 0.0);
        assert!(w.abs() < 1e-8);
    }

    #[test]
    fn json_layout() {
        let s = FockAmplitudes::from_coeffs(vec![c(0.6, 0.0), c(0.0, 0.8)], 0.0).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"coeffs":[[0.6,0.0],[0.0,0.8]],"trunc_tail":0.0}"#);
        let t = TwoModeAmplitudes::from_coeffs(1, 2, vec![c(0.6, 0.0), c(0.8, 0.0)], 0.0).unwrap();
        let text = serde_json::to_string(&t).unwrap();
        assert_eq!(text, r#"{"rows":1,"cols":2,"coeffs":[[0.6,0.0],[0.8,0.0]],"trunc_tail":0.0}"#);
        let back: TwoModeAmplitudes = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
    }

    proptest::proptest! {
        #[test]
        fn f_coherent_normalized(re in -2.0f64..2.0, im in -2.0f64..2.0, lambda in 0.05f64..10.0) {
            let s = f_coherent(c(re, im), &DeformationSpec::kerr(lambda).unwrap(), DEFAULT_EPS).unwrap();
            proptest::prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            proptest::prop_assert!(s.trunc_tail() < DEFAULT_EPS);
        }

        #[test]
        fn two_mode_total_normalized(r1 in 0.0f64..2.0, r2 in 0.0f64..2.0, lambda in 0.05f64..5.0) {
            let s = two_mode_f_coherent_total(c(r1, 0.0), c(0.0, r2), &DeformationSpec::kerr(lambda).unwrap(), DEFAULT_EPS).unwrap();
            proptest::prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }
}
