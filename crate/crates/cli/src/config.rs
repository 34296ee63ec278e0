//! Settings shared by all subcommands: an optional JSON file whose keys mirror
//! the long flag names (with underscores), overridden by anything given on
//! the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ftomo::grid::StepRange;
use ftomo::states::{f_coherent, FockAmplitudes};
use ftomo::{Complex64, DeformationSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub eps: Option<f64>,
    pub audit: Option<bool>,
    pub audit_tol: Option<f64>,
    pub threads: Option<usize>,

    pub state: Option<String>,
    pub alpha: Option<String>,
    pub deformation: Option<serde_json::Value>,

    pub kind: Option<String>,
    pub x: Option<String>,
    pub theta_count: Option<usize>,
    pub mu: Option<String>,
    pub nu: Option<String>,
    pub re: Option<String>,
    pub im: Option<String>,
    pub n_max: Option<usize>,

    pub id: Option<String>,
    pub lambda: Option<String>,
    pub alpha1: Option<String>,

    pub n: Option<String>,
    pub s: Option<String>,

    pub alpha2: Option<f64>,
    pub cat: Option<String>,

    pub family: Option<String>,

    pub only: Option<Vec<String>>,
    pub force_paper_moment_constant: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }
}

pub fn parse_range(label: &str, text: &str) -> Result<StepRange, CliError> {
    StepRange::from_str(text).map_err(|e| CliError::Config(format!("--{label}: {e}")))
}

pub fn parse_list<T: FromStr>(label: &str, text: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| CliError::Config(format!("--{label}: cannot parse '{t}'"))))
        .collect()
}

/// `re` or `re,im`.
pub fn parse_complex(label: &str, text: &str) -> Result<Complex64, CliError> {
    let parts: Vec<f64> = parse_list(label, text)?;
    match parts.as_slice() {
        [re] => Ok(Complex64::new(*re, 0.0)),
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(CliError::Config(format!("--{label}: expected re or re,im, got '{text}'"))),
    }
}

/// `identity`, `kerr:λ`, `qosc:λ`, or a JSON object such as `{"family":"kerr","lambda":0.5}`.
pub fn parse_deformation(text: &str) -> Result<DeformationSpec, CliError> {
    let text = text.trim();
    if text.starts_with('{') {
        return serde_json::from_str(text).map_err(|e| CliError::Config(format!("--deformation: {e}")));
    }
    let (name, arg) = match text.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (text, None),
    };
    let lambda = || -> Result<f64, CliError> {
        arg.ok_or_else(|| CliError::Config(format!("--deformation {name} needs a parameter, e.g. {name}:0.5")))?
            .parse()
            .map_err(|_| CliError::Config(format!("--deformation: bad parameter in '{text}'")))
    };
    let spec = match name {
        "identity" => Ok(DeformationSpec::identity()),
        "kerr" => DeformationSpec::kerr(lambda()?),
        "qosc" => DeformationSpec::qosc(lambda()?),
        _ => return Err(CliError::Config(format!("--deformation: unknown family '{name}'"))),
    };
    spec.map_err(CliError::from)
}

pub fn deformation_from_value(v: &serde_json::Value) -> Result<DeformationSpec, CliError> {
    match v {
        serde_json::Value::String(s) => parse_deformation(s),
        other => serde_json::from_value(other.clone()).map_err(|e| CliError::Config(format!("deformation: {e}"))),
    }
}

/// What a one-mode state was built from, recorded in sidecar files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSpec {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deformation: Option<DeformationSpec>,
}

impl StateSpec {
    /// `vacuum`, `fock:N`, or `coherent` (f-coherent with the given α and deformation).
    pub fn parse(text: &str, alpha: Complex64, deformation: DeformationSpec) -> Result<Self, CliError> {
        match text.split_once(':') {
            None if text == "vacuum" => Ok(StateSpec { kind: "vacuum".into(), n: None, alpha: None, deformation: None }),
            None if text == "coherent" => Ok(StateSpec {
                kind: "coherent".into(),
                n: None,
                alpha: Some([alpha.re, alpha.im]),
                deformation: Some(deformation),
            }),
            Some(("fock", n)) => {
                let n = n.parse().map_err(|_| CliError::Config(format!("--state: bad Fock index in '{text}'")))?;
                Ok(StateSpec { kind: "fock".into(), n: Some(n), alpha: None, deformation: None })
            }
            _ => Err(CliError::Config(format!("--state must be vacuum, fock:N or coherent, got '{text}'"))),
        }
    }

    pub fn build(&self, eps: f64) -> Result<FockAmplitudes, CliError> {
        match self.kind.as_str() {
            "vacuum" => Ok(FockAmplitudes::vacuum()),
            "fock" => Ok(FockAmplitudes::fock(self.n.unwrap_or(0))),
            _ => {
                let [re, im] = self.alpha.unwrap_or([0.0, 0.0]);
                let spec = self.deformation.clone().unwrap_or_default();
                Ok(f_coherent(Complex64::new(re, im), &spec, eps)?)
            }
        }
    }
}
