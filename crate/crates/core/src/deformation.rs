//! The nonlinearity function f(n̂) of an f-oscillator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Above this argument `sinh` is evaluated as `y - ln 2` in log space.
const SINH_LOG_SWITCH: f64 = 700.0;

/// A concrete family of deformation functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum DeformationFamily {
    /// f = 1, the harmonic oscillator.
    Identity,
    /// f(n) = √((n - 1 + λ) / λ).
    Kerr { lambda: f64 },
    /// q-oscillator, f(n) = √(sinh(λn) / (λn)).
    #[serde(rename = "qosc")]
    QOsc { lambda: f64 },
    /// Explicit values f(0), f(1), …; f(0) is stored but never used.
    Tabulated { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct DeformationSpec {
    pub family: DeformationFamily,
    pub description: String,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    #[serde(flatten)]
    family: DeformationFamily,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    description: String,
}

impl TryFrom<RawSpec> for DeformationSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        DeformationSpec::new(raw.family).map(|s| s.with_description(raw.description))
    }
}

impl From<DeformationSpec> for RawSpec {
    fn from(spec: DeformationSpec) -> Self {
        RawSpec { family: spec.family, description: spec.description }
    }
}

/// ln sinh(y) for y > 0 without overflow.
fn ln_sinh(y: f64) -> f64 {
    if y < 1.0 {
        y.sinh().ln()
    } else if y > SINH_LOG_SWITCH {
        y - std::f64::consts::LN_2
    } else {
        y - std::f64::consts::LN_2 + (-(-2.0 * y).exp()).ln_1p()
    }
}

impl DeformationSpec {
    /// Validates the family parameters.
    pub fn new(family: DeformationFamily) -> Result<Self> {
        match &family {
            DeformationFamily::Identity => {}
            DeformationFamily::Kerr { lambda } => {
                if !(*lambda > 0.0) || !lambda.is_finite() {
                    return Err(Error::InvalidDeformation(format!("kerr requires lambda > 0, got {lambda}")));
                }
            }
            DeformationFamily::QOsc { lambda } => {
                if !(*lambda >= 0.0) || !lambda.is_finite() {
                    return Err(Error::InvalidDeformation(format!("qosc requires lambda >= 0, got {lambda}")));
                }
            }
            DeformationFamily::Tabulated { values } => {
                if let Some((n, v)) = values.iter().enumerate().skip(1).find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
                    return Err(Error::InvalidDeformation(format!("tabulated f({n}) = {v} is not positive")));
                }
            }
        }
        Ok(DeformationSpec { family, description: String::new() })
    }

    pub fn identity() -> Self {
        DeformationSpec { family: DeformationFamily::Identity, description: String::new() }
    }

    pub fn kerr(lambda: f64) -> Result<Self> {
        Self::new(DeformationFamily::Kerr { lambda })
    }

    pub fn qosc(lambda: f64) -> Result<Self> {
        Self::new(DeformationFamily::QOsc { lambda })
    }

    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        Self::new(DeformationFamily::Tabulated { values })
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    /// Short label used in CSV output, e.g. `kerr(lambda=0.5)`.
    pub fn label(&self) -> String {
        match &self.family {
            DeformationFamily::Identity => "identity".to_string(),
            DeformationFamily::Kerr { lambda } => format!("kerr(lambda={lambda})"),
            DeformationFamily::QOsc { lambda } => format!("qosc(lambda={lambda})"),
            DeformationFamily::Tabulated { values } => format!("tabulated(len={})", values.len()),
        }
    }

    /// ln f(n), the primitive every other quantity is built from.
    pub fn ln_f(&self, n: usize) -> Result<f64> {
        let nf = n as f64;
        match &self.family {
            DeformationFamily::Identity => Ok(0.0),
            DeformationFamily::Kerr { lambda } => {
                let ratio = (nf - 1.0 + lambda) / lambda;
                if !(ratio > 0.0) {
                    return Err(Error::DeformationSingular {
                        n,
                        reason: format!("kerr f^2 = {ratio} with lambda = {lambda}"),
                    });
                }
                Ok(0.5 * ((nf - 1.0) / lambda).ln_1p())
            }
            DeformationFamily::QOsc { lambda } => {
                let y = lambda * nf;
                if y == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(0.5 * (ln_sinh(y) - y.ln()))
                }
            }
            DeformationFamily::Tabulated { values } => match values.get(n) {
                Some(v) if *v > 0.0 => Ok(v.ln()),
                Some(v) => Err(Error::DeformationSingular { n, reason: format!("tabulated value {v}") }),
                None => Err(Error::DeformationSingular {
                    n,
                    reason: format!("beyond the {} tabulated values", values.len()),
                }),
            },
        }
    }

    /// f(n).
    pub fn f_value(&self, n: usize) -> Result<f64> {
        self.ln_f(n).map(f64::exp)
    }

    /// ln of the deformed factorial f(1)f(2)…f(n); zero for n = 0.
    pub fn log_f_factorial(&self, n: usize) -> Result<f64> {
        let mut acc = 0.0;
        for k in 1..=n {
            acc += self.ln_f(k)?;
        }
        Ok(acc)
    }

    /// ln f(1)…f(k) for every k in 0..=n_max.
    pub fn log_f_factorials(&self, n_max: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n_max + 1);
        let mut acc = 0.0;
        out.push(acc);
        for k in 1..=n_max {
            acc += self.ln_f(k)?;
            out.push(acc);
        }
        Ok(out)
    }

    /// n f²(n), with the n = 0 value fixed at zero so f(0) is never evaluated.
    pub fn n_f_squared(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        match &self.family {
            DeformationFamily::QOsc { lambda } if *lambda > 0.0 => {
                // n sinh(λn)/(λn) = sinh(λn)/λ
                let y = lambda * n as f64;
                Ok((ln_sinh(y) - lambda.ln()).exp())
            }
            _ => Ok(n as f64 * (2.0 * self.ln_f(n)?).exp()),
        }
    }

    /// Diagonal element ⟨n|[Â, Â†]|n⟩ = (n+1) f²(n+1) - n f²(n).
    pub fn commutator_diag(&self, n: usize) -> Result<f64> {
        Ok(self.n_f_squared(n + 1)? - self.n_f_squared(n)?)
    }
}

impl Default for DeformationSpec {
    fn default() -> Self {
        Self::identity()
    }
}
