//! Special-function kernels shared by the state, tomogram and entropy code.
//!
//! Everything here is evaluated by recurrences or in log space so that the
//! photon-number ranges used by the tomogram sums (a few hundred quanta)
//! never touch overflowing intermediates such as raw `H_n(x)` or `n!`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Number of `ln n!` values kept in the lookup table.
const LOG_FACTORIAL_TABLE: usize = 2048;

/// Hard stop for the ₀F₁ series.
const HYP0F1_MAX_TERMS: usize = 10_000;

/// Normalized Hermite function ψ_n(x) = π^(-1/4) 2^(-n/2) (n!)^(-1/2) e^(-x²/2) H_n(x).
pub fn oscillator_eigenfunction(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// All of ψ_0(x), …, ψ_{n_max}(x) from one pass of the recurrence.
pub fn oscillator_eigenfunctions(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n_max >= 1 {
        out.push(std::f64::consts::SQRT_2 * x * out[0]);
    }
    for k in 1..n_max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Associated Laguerre polynomial L_n^{(a)}(x) via the forward three-term recurrence.
///
/// The recurrence is a polynomial identity in `a`, so negative integer upper
/// indices (a ≥ -n) are handled by the same loop.
pub fn laguerre_assoc(n: usize, a: i64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if a < 0 && (-a) as usize <= n {
        // L_n^{(-k)}(x) = (-x)^k (n-k)!/n! L_{n-k}^{(k)}(x), avoids cancellation
        let k = (-a) as usize;
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let scale = if x == 0.0 {
            0.0
        } else {
            sign * (k as f64 * x.ln() + log_factorial(n - k) - log_factorial(n)).exp()
        };
        return scale * laguerre_assoc(n - k, k as i64, x);
    }
    let a = a as f64;
    let mut prev = 1.0;
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn log_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LOG_FACTORIAL_TABLE);
        t.push(0.0);
        // exact products up to 170! then the gamma function takes over
        let mut prod = 1.0f64;
        for k in 1..LOG_FACTORIAL_TABLE {
            if k <= 170 {
                prod *= k as f64;
                t.push(prod.ln());
            } else {
                t.push(libm::lgamma(k as f64 + 1.0));
            }
        }
        t
    })
}

/// ln n!
pub fn log_factorial(n: usize) -> f64 {
    match log_factorial_table().get(n) {
        Some(v) => *v,
        None => libm::lgamma(n as f64 + 1.0),
    }
}

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires finite x > 0, got {x}")));
    }
    Ok(libm::lgamma(x))
}

/// Natural log of the confluent hypergeometric limit function ₀F₁(a; z).
///
/// Terms are generated by their ratio z / ((n+1)(a+n)) and accumulated
/// relative to the running largest term, so `z` far beyond the range where
/// the sum itself overflows is still fine.
pub fn ln_hyp0f1(a: f64, z: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("hyp0f1 requires a > 0, got {a}")));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("hyp0f1 requires finite z >= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let ln_z = z.ln();
    // sum = exp(scale) * acc
    let mut ln_term = 0.0f64;
    let mut scale = 0.0f64;
    let mut acc = 1.0f64;
    for n in 0..HYP0F1_MAX_TERMS {
        let nf = n as f64;
        ln_term += ln_z - (nf + 1.0).ln() - (a + nf).ln();
        if ln_term > scale {
            acc = acc * (scale - ln_term).exp() + 1.0;
            scale = ln_term;
        } else {
            let rel = (ln_term - scale).exp();
            acc += rel;
            // past the peak the terms decrease monotonically
            let decreasing = z < (nf + 2.0) * (a + nf + 1.0);
            if decreasing && rel < 1e-16 * acc {
                return Ok(scale + acc.ln());
            }
        }
    }
    Err(Error::NonConvergence { terms: HYP0F1_MAX_TERMS })
}

/// ₀F₁(a; z) = Σ zⁿ Γ(a) / (n! Γ(a+n)).
pub fn hyp0f1(a: f64, z: f64) -> Result<f64> {
    ln_hyp0f1(a, z).map(f64::exp)
}

/// Composite trapezoid rule with `points` equally spaced nodes on [lo, hi].
pub fn trapezoid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> f64 {
    assert!(points >= 2, "trapezoid needs at least two nodes");
    let h = (hi - lo) / (points - 1) as f64;
    let mut sum = 0.5 * (f(lo) + f(hi));
    for i in 1..points - 1 {
        sum += f(lo + i as f64 * h);
    }
    sum * h
}
