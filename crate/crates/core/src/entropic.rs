//! Shannon entropies of discrete distributions, the block regrouping
//! p_{sj+l} -> P_{jl}, the subadditivity gap and the Laguerre inequalities
//! obtained from Fock-state photon-number tomograms.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{write_csv, Field};
use crate::tomography::ln_fock_lambda;

/// Tail mass above which a truncated photon distribution is rejected.
pub const TAIL_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector {
    p: Vec<f64>,
    tail_mass: f64,
}

impl ProbabilityVector {
    pub fn new(p: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if p.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument("probabilities must be finite and nonnegative".into()));
        }
        if !(tail_mass >= 0.0) {
            return Err(Error::InvalidArgument(format!("tail mass must be nonnegative, got {tail_mass}")));
        }
        let total = p.iter().sum::<f64>() + tail_mass;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(total));
        }
        Ok(ProbabilityVector { p, tail_mass })
    }

    /// Probabilities computed by `prob(m)` for m = 0, 1, ... until the missing
    /// mass drops below `tail_limit`.
    ///
    /// Stops only past `min_len` so a slowly rising head is not mistaken for
    /// convergence.
    pub fn from_fn<F>(prob: F, min_len: usize, max_len: usize, tail_limit: f64) -> Result<Self>
    where
        F: Fn(usize) -> f64,
    {
        let mut p = Vec::with_capacity(min_len);
        let mut sum = 0.0;
        loop {
            let m = p.len();
            if m >= min_len && 1.0 - sum < tail_limit {
                let tail = (1.0 - sum).max(0.0);
                return ProbabilityVector::new(p, tail);
            }
            if m > max_len {
                return Err(Error::TailNotConverged { limit: max_len, tail: 1.0 - sum });
            }
            let v = prob(m);
            sum += v;
            p.push(v);
        }
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

fn xlnx(v: f64) -> f64 {
    if v > 0.0 {
        v * v.ln()
    } else {
        0.0
    }
}

fn entropy_of(p: &[f64]) -> f64 {
    -p.iter().map(|v| xlnx(*v)).sum::<f64>()
}

/// H = -Σ p ln p with 0 ln 0 = 0, over the stored prefix.
pub fn shannon_entropy(pv: &ProbabilityVector) -> f64 {
    entropy_of(&pv.p).max(0.0)
}

/// Table P_{jl} = p_{sj+l}, rows j, s columns, zero-padded at the end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegroupedTable {
    table: Vec<Vec<f64>>,
    s: usize,
    len: usize,
}

impl RegroupedTable {
    pub fn entries(&self) -> &[Vec<f64>] {
        &self.table
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn get(&self, j: usize, l: usize) -> f64 {
        self.table[j][l]
    }

    /// The original vector, padding removed.
    pub fn flatten(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.table.iter().flatten().copied().collect();
        v.truncate(self.len);
        v
    }

    /// Π_j = Σ_l P_{jl}.
    pub fn row_marginal(&self) -> Vec<f64> {
        self.table.iter().map(|row| row.iter().sum()).collect()
    }

    /// π_l = Σ_j P_{jl}.
    pub fn column_marginal(&self) -> Vec<f64> {
        (0..self.s).map(|l| self.table.iter().map(|row| row[l]).sum()).collect()
    }
}

pub fn regroup(pv: &ProbabilityVector, s: usize) -> Result<RegroupedTable> {
    regroup_slice(&pv.p, s)
}

fn regroup_slice(p: &[f64], s: usize) -> Result<RegroupedTable> {
    if s < 2 {
        return Err(Error::InvalidArgument(format!("block size must be at least 2, got {s}")));
    }
    let table = p
        .chunks(s)
        .map(|chunk| {
            let mut row = chunk.to_vec();
            row.resize(s, 0.0);
            row
        })
        .collect();
    Ok(RegroupedTable { table, s, len: p.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformationParts {
    pub h_rows: f64,
    pub h_cols: f64,
    pub h_joint: f64,
}

impl InformationParts {
    pub fn information(&self) -> f64 {
        self.h_rows + self.h_cols - self.h_joint
    }
}

pub fn information_parts(pv: &ProbabilityVector, s: usize) -> Result<InformationParts> {
    let t = regroup(pv, s)?;
    Ok(InformationParts {
        h_rows: entropy_of(&t.row_marginal()),
        h_cols: entropy_of(&t.column_marginal()),
        h_joint: entropy_of(&pv.p),
    })
}

/// I = H_Π + H_π - H_p for the regrouping with block size s.
pub fn shannon_information(pv: &ProbabilityVector, s: usize) -> Result<f64> {
    Ok(information_parts(pv, s)?.information())
}

/// λ_m(n, x) = n_<!/n_>! x^{|m-n|} [L_{n_<}^{(|m-n|)}(x)]².
pub fn laguerre_lambda(n: usize, m: usize, x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(ln_fock_lambda(m, n, x).exp())
}

fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x must be finite and nonnegative, got {x}")));
    }
    Ok(())
}

/// Fock photon distribution p_m = e^{-x} λ_m(n, x), truncated at `m_max`.
pub fn fock_photon_distribution(n: usize, x: f64, m_max: usize) -> Result<ProbabilityVector> {
    check_x(x)?;
    let p: Vec<f64> = (0..=m_max).map(|m| (ln_fock_lambda(m, n, x) - x).exp()).collect();
    let tail = 1.0 - p.iter().sum::<f64>();
    if tail >= TAIL_LIMIT {
        return Err(Error::TailNotConverged { limit: m_max, tail });
    }
    ProbabilityVector::new(p, tail.max(0.0))
}

/// Smallest cutoff of the form used by the sweeps that leaves a tail below
/// [`TAIL_LIMIT`]: starts past the bulk at n + x + 12√(n + x + 1) + 30 and doubles.
pub fn auto_m_max(n: usize, x: f64) -> Result<usize> {
    check_x(x)?;
    let bulk = n as f64 + x;
    let mut m = (bulk + 12.0 * (bulk + 1.0).sqrt() + 30.0).ceil() as usize;
    loop {
        let tail = 1.0 - (0..=m).map(|k| (ln_fock_lambda(k, n, x) - x).exp()).sum::<f64>();
        if tail < TAIL_LIMIT {
            return Ok(m);
        }
        if m > 1 << 16 {
            return Err(Error::TailNotConverged { limit: m, tail });
        }
        m *= 2;
    }
}

/// I(n, x) for p_m = e^{-x} λ_m(n, x) with block size s.
pub fn fock_information(n: usize, x: f64, s: usize) -> Result<f64> {
    let pv = fock_photon_distribution(n, x, auto_m_max(n, x)?)?;
    shannon_information(&pv, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaguerreInequality {
    pub n: usize,
    pub x: f64,
    pub s: usize,
    pub lhs: f64,
    pub holds: bool,
    /// e^x times the Shannon information of the same distribution.
    pub scaled_information: f64,
}

/// Evaluates the λ-form left-hand side
///
/// -Σ_j Λ_j ln Λ_j - Σ_l Λ'_l ln Λ'_l + Σ_m λ_m ln λ_m + x e^x
///
/// with Λ_j = Σ_l λ_{sj+l} and Λ'_l = Σ_j λ_{sj+l}, and checks it against
/// e^x · I. The two agree to rounding relative to the size of the terms.
pub fn verify_laguerre_inequality(n: usize, x: f64, s: usize, m_max: usize) -> Result<LaguerreInequality> {
    let pv = fock_photon_distribution(n, x, m_max)?;
    let lambdas: Vec<f64> = (0..=m_max).map(|m| ln_fock_lambda(m, n, x).exp()).collect();
    let t = regroup_slice(&lambdas, s)?;
    let ln_term = |v: f64| if v > 0.0 { v * v.ln() } else { 0.0 };
    let rows: f64 = t.row_marginal().into_iter().map(ln_term).sum();
    let cols: f64 = t.column_marginal().into_iter().map(ln_term).sum();
    let joint: f64 = lambdas.iter().map(|v| ln_term(*v)).sum();
    let lhs = -rows - cols + joint + x * x.exp();
    let scaled_information = x.exp() * shannon_information(&pv, s)?;
    let scale = x.exp() * (1.0 + x) + 1.0;
    debug_assert!(
        (lhs - scaled_information).abs() <= 1e-8 * scale,
        "lambda-form {lhs} vs e^x I {scaled_information}"
    );
    Ok(LaguerreInequality { n, x, s, lhs, holds: lhs >= -1e-12 * scale, scaled_information })
}

/// Sweep rows as CSV: `n, x, s, lhs, holds`.
pub fn write_inequality_csv<W: Write>(out: &mut W, rows: &[LaguerreInequality]) -> io::Result<()> {
    let rows: Vec<Vec<Field>> = rows
        .iter()
        .map(|r| vec![r.n.into(), r.x.into(), r.s.into(), r.lhs.into(), r.holds.into()])
        .collect();
    write_csv(out, &["n", "x", "s", "lhs", "holds"], &rows)
}
