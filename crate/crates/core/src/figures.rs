//! Curve families of the information and linear-entropy figures.

use std::io::{self, Write};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deformation::DeformationSpec;
use crate::entanglement::{
    cat_linear_entropy, kerr_zero_limit_cat_entropy, kerr_zero_limit_entropy, linear_entropy_series,
};
use crate::entropic::fock_information;
use crate::error::{Error, Result};
use crate::grid::{write_csv, Field, StepRange};
use crate::states::CatParity;

pub const FIG1_NS: [usize; 3] = [0, 1, 2];
pub const FIG2_PAIRS: [(f64, f64); 3] = [(2.0, 1.0), (1.0, 1.0), (0.5, 1.0)];
pub const FIG3_LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const FIG3_ALPHA2: f64 = 1.0;
pub const CAT_ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];

/// Sampling grids; the defaults are the published ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FigureGrids {
    /// |α|² axis of the information figure.
    pub x: StepRange,
    /// λ axis of the entropy-versus-λ figures; a λ = 0 row is prepended.
    pub lambda: StepRange,
    /// |α₁| axis of the entropy-versus-|α₁| figure.
    pub alpha1: StepRange,
    pub eps: f64,
}

impl Default for FigureGrids {
    fn default() -> Self {
        FigureGrids {
            x: StepRange { min: 0.02, max: 6.0, step: 0.02 },
            lambda: StepRange { min: 0.02, max: 5.0, step: 0.02 },
            alpha1: StepRange { min: 0.0, max: 4.0, step: 0.05 },
            eps: crate::states::DEFAULT_EPS,
        }
    }
}

impl FigureGrids {
    pub fn validate(&self) -> Result<()> {
        self.x.validate()?;
        self.lambda.validate()?;
        self.alpha1.validate()?;
        if self.x.min < 0.0 || self.alpha1.min < 0.0 {
            return Err(Error::InvalidArgument("|α| axes must be nonnegative".into()));
        }
        if self.lambda.min <= 0.0 {
            return Err(Error::InvalidArgument("λ axis must start above 0; the λ = 0 row is added from the limit".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub id: u8,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Field>>,
    /// Index of the plotted quantity within each row.
    pub value_column: usize,
}

impl FigureTable {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        write_csv(out, &self.header, &self.rows)
    }

    pub fn values(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| match r[self.value_column] {
                Field::Real(v) => v,
                _ => f64::NAN,
            })
            .collect()
    }

    /// Information is nonnegative and entropies lie in [0, 1].
    pub fn range_violations(&self) -> usize {
        let upper = if self.id == 1 { f64::INFINITY } else { 1.0 };
        self.values().iter().filter(|v| !(**v >= -1e-12 && **v <= upper + 1e-12)).count()
    }
}

fn real(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn lambda_axis(grids: &FigureGrids) -> Vec<f64> {
    let mut v = vec![0.0];
    v.extend(grids.lambda.values());
    v
}

pub fn figure(id: u8, grids: &FigureGrids) -> Result<FigureTable> {
    grids.validate()?;
    match id {
        1 => fig_information(grids),
        2 => fig_entropy_lambda(grids),
        3 => fig_entropy_alpha(grids),
        4 => fig_cat(grids, CatParity::Even),
        5 => fig_cat(grids, CatParity::Odd),
        _ => Err(Error::InvalidArgument(format!("figure id must be 1..5, got {id}"))),
    }
}

fn fig_information(grids: &FigureGrids) -> Result<FigureTable> {
    let xs = grids.x.values();
    let points: Vec<(usize, f64)> = FIG1_NS.iter().flat_map(|&n| xs.iter().map(move |&x| (n, x))).collect();
    let rows = points
        .par_iter()
        .map(|&(n, x)| Ok(vec![Field::from(n), x.into(), fock_information(n, x, 2)?.into()]))
        .collect::<Result<Vec<_>>>()?;
    Ok(FigureTable { id: 1, header: vec!["n", "x", "information"], rows, value_column: 2 })
}

/// S_λ for the total-number Kerr deformation, λ = 0 from the closed-form limit.
pub fn kerr_entropy(lambda: f64, a1: f64, a2: f64, eps: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(kerr_zero_limit_entropy(real(a1), real(a2)));
    }
    linear_entropy_series(real(a1), real(a2), &DeformationSpec::kerr(lambda)?, eps)
}

/// S±_λ for the Kerr cat, λ = 0 from the limit states.
pub fn kerr_cat_entropy(lambda: f64, a: f64, parity: CatParity, eps: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(kerr_zero_limit_cat_entropy(parity));
    }
    cat_linear_entropy(real(a), &DeformationSpec::kerr(lambda)?, parity, eps)
}

fn fig_entropy_lambda(grids: &FigureGrids) -> Result<FigureTable> {
    let lambdas = lambda_axis(grids);
    let points: Vec<(f64, f64, f64)> =
        FIG2_PAIRS.iter().flat_map(|&(a1, a2)| lambdas.iter().map(move |&l| (l, a1, a2))).collect();
    entropy_rows(2, &points, grids.eps)
}

fn fig_entropy_alpha(grids: &FigureGrids) -> Result<FigureTable> {
    let alphas = grids.alpha1.values();
    let points: Vec<(f64, f64, f64)> =
        FIG3_LAMBDAS.iter().flat_map(|&l| alphas.iter().map(move |&a| (l, a, FIG3_ALPHA2))).collect();
    entropy_rows(3, &points, grids.eps)
}

fn entropy_rows(id: u8, points: &[(f64, f64, f64)], eps: f64) -> Result<FigureTable> {
    let rows = points
        .par_iter()
        .map(|&(l, a1, a2)| Ok(vec![l.into(), a1.into(), a2.into(), kerr_entropy(l, a1, a2, eps)?.into()]))
        .collect::<Result<Vec<_>>>()?;
    Ok(FigureTable { id, header: vec!["lambda", "abs_alpha1", "abs_alpha2", "entropy"], rows, value_column: 3 })
}

fn fig_cat(grids: &FigureGrids, parity: CatParity) -> Result<FigureTable> {
    let lambdas = lambda_axis(grids);
    let points: Vec<(f64, f64)> = CAT_ALPHAS.iter().flat_map(|&a| lambdas.iter().map(move |&l| (l, a))).collect();
    let sign = parity.sign() as i64;
    let rows = points
        .par_iter()
        .map(|&(l, a)| Ok(vec![l.into(), a.into(), Field::Int(sign), kerr_cat_entropy(l, a, parity, grids.eps)?.into()]))
        .collect::<Result<Vec<_>>>()?;
    let id = if parity == CatParity::Even { 4 } else { 5 };
    Ok(FigureTable { id, header: vec!["lambda", "abs_alpha", "sign", "entropy"], rows, value_column: 3 })
}

/// Index of the largest value; ties resolve to the first.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Count of strict interior local maxima.
pub fn local_maxima(values: &[f64]) -> usize {
    values.windows(3).filter(|w| w[1] > w[0] && w[1] > w[2]).count()
}
