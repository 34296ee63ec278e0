//! Self-verification suite: each named check recomputes a library result
//! against an independent oracle or a stated limit and reports the worst
//! residual it saw.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::deformation::DeformationSpec;
use crate::entanglement::{
    cat_entropy_identity_limit, cat_linear_entropy, kerr_zero_limit_entropy, linear_entropy, linear_entropy_series,
    reduce_mode2,
};
use crate::entropic::{auto_m_max, fock_information, verify_laguerre_inequality};
use crate::error::{Error, Result};
use crate::figures::{argmax, figure, kerr_entropy, local_maxima, FigureGrids, FIG3_ALPHA2, FIG3_LAMBDAS};
use crate::grid::StepRange;
use crate::special_fn::{log_factorial, trapezoid};
use crate::states::{
    cat_superposition, f_coherent, glauber, two_mode_f_coherent_total, CatParity, FockAmplitudes, TwoModeAmplitudes,
    DEFAULT_EPS,
};
use crate::tomography::{husimi, optical_tomogram, photon_tomogram, symplectic_tomogram};
use crate::uncertainty::{
    deformed_quadrature_stats, moment_from_optical_tomogram, number_moment_combination, qosc_small_lambda_rhs,
    MomentConstant,
};

pub const CHECK_NAMES: [&str; 11] = [
    "tomogram-oracle",
    "normalization",
    "husimi-identity",
    "laguerre-inequality",
    "information-figure",
    "entanglement-oracle",
    "limit-values",
    "entropy-claims",
    "uncertainty",
    "moment-erratum",
    "figure-determinism",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    pub runtime_s: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
    pub total_runtime_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyOptions {
    /// Names to run; empty runs everything.
    pub only: Vec<String>,
    pub moment_constant: MomentConstant,
}

struct Outcome {
    pass: bool,
    residual: f64,
    detail: String,
}

fn outcome(pass: bool, residual: f64, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, residual, detail })
}

pub fn run_check(name: &str, opts: &VerifyOptions) -> Result<CheckResult> {
    let start = Instant::now();
    let res = match name {
        "tomogram-oracle" => tomogram_oracle(),
        "normalization" => normalization(),
        "husimi-identity" => husimi_identity(),
        "laguerre-inequality" => laguerre_inequality(),
        "information-figure" => information_figure(),
        "entanglement-oracle" => entanglement_oracle(),
        "limit-values" => limit_values(),
        "entropy-claims" => entropy_claims(),
        "uncertainty" => uncertainty(),
        "moment-erratum" => moment_erratum(opts.moment_constant),
        "figure-determinism" => figure_determinism(),
        other => return Err(Error::InvalidArgument(format!("unknown check '{other}'"))),
    };
    let out = res.unwrap_or_else(|e| Outcome { pass: false, residual: f64::NAN, detail: format!("error: {e}") });
    Ok(CheckResult {
        name: name.to_string(),
        pass: out.pass,
        residual: out.residual,
        runtime_s: start.elapsed().as_secs_f64(),
        detail: out.detail,
    })
}

pub fn run(opts: &VerifyOptions) -> Result<VerifyReport> {
    for name in &opts.only {
        if !CHECK_NAMES.contains(&name.as_str()) {
            return Err(Error::InvalidArgument(format!("unknown check '{name}'")));
        }
    }
    let start = Instant::now();
    let checks = CHECK_NAMES
        .iter()
        .filter(|n| opts.only.is_empty() || opts.only.iter().any(|o| o == *n))
        .map(|n| run_check(n, opts))
        .collect::<Result<Vec<_>>>()?;
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport { checks, all_pass, total_runtime_s: start.elapsed().as_secs_f64() })
}

/// A normalized state with `dim` complex amplitudes drawn uniformly from the unit square.
pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> FockAmplitudes {
    let v: Vec<C64> = (0..dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    FockAmplitudes::from_coeffs(v, 0.0).expect("random amplitudes are nonzero")
}

/// M(X, μ, ν) summed with physicists' Hermite polynomials:
/// e^{-y²}/√(πr²) |Σ c_n/√(n!) ((μ - iν)/(√2 r))ⁿ H_n(y)|², y = X/r.
fn symplectic_closed_form(c: &[C64], x: f64, mu: f64, nu: f64) -> f64 {
    let r = (mu * mu + nu * nu).sqrt();
    let y = x / r;
    let z = C64::new(mu, -nu) / (2f64.sqrt() * r);
    let (mut h_prev, mut h) = (0.0, 1.0);
    let mut zn = C64::new(1.0, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    for (n, cn) in c.iter().enumerate() {
        sum += cn * zn * h * (-0.5 * log_factorial(n)).exp();
        let next = 2.0 * y * h - 2.0 * n as f64 * h_prev;
        h_prev = h;
        h = next;
        zn *= z;
    }
    (-y * y).exp() / (PI * r * r).sqrt() * sum.norm_sqr()
}

fn tomogram_oracle() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7011);
    let xs = StepRange::new(-6.0, 6.0, 0.05)?.values();
    let dirs: Vec<(f64, f64)> = (0..8)
        .map(|k| {
            let (r, phi) = (0.5 + 0.25 * k as f64, 0.3 + k as f64 * PI / 4.0);
            (r * phi.cos(), r * phi.sin())
        })
        .collect();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let s = random_state(&mut rng, 12);
        for &(mu, nu) in &dirs {
            for &x in &xs {
                let lib = symplectic_tomogram(&s, x, mu, nu)?;
                worst = worst.max((lib - symplectic_closed_form(s.coeffs(), x, mu, nu)).abs());
            }
        }
    }
    outcome(worst < 1e-8, worst, "max |M - closed form| over 20 states, 8 directions, X in [-6,6]".into())
}

fn normalization() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4e0);
    let mut states: Vec<FockAmplitudes> = (0..10).map(|_| random_state(&mut rng, 12)).collect();
    states.push(f_coherent(C64::new(1.0, 0.5), &DeformationSpec::kerr(1.0)?, DEFAULT_EPS)?);
    states.push(f_coherent(C64::new(1.5, 0.0), &DeformationSpec::qosc(0.2)?, DEFAULT_EPS)?);
    let mut worst = 0.0f64;
    let mut min_value = f64::INFINITY;
    for s in &states {
        let theta = rng.gen_range(0.0..2.0 * PI);
        let w = trapezoid(|x| optical_tomogram(s, x, theta), -12.0, 12.0, 4001);
        let (mu, nu) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let r = f64::hypot(mu, nu);
        let m = trapezoid(|x| symplectic_tomogram(s, x, mu, nu).unwrap_or(f64::NAN), -12.0 * r, 12.0 * r, 4001);
        let alpha = C64::from_polar(rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0 * PI));
        let photons: Vec<f64> = (0..=128).map(|n| photon_tomogram(s, n, alpha)).collect();
        min_value = photons.iter().cloned().fold(min_value, f64::min);
        let total: f64 = photons.iter().sum();
        for v in [w, m, total] {
            worst = worst.max((v - 1.0).abs());
        }
    }
    outcome(
        worst <= 1e-8 && min_value >= 0.0,
        worst,
        format!("max deviation of the optical, symplectic and photon totals from 1; min photon value {min_value:e}"),
    )
}

fn husimi_identity() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x805);
    let axis = StepRange::new(-2.0, 2.0, 0.2)?.values();
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let s = random_state(&mut rng, 10);
        for &re in &axis {
            for &im in &axis {
                let a = C64::new(re, im);
                worst = worst.max((husimi(&s, a) - photon_tomogram(&s, 0, -a)).abs());
            }
        }
    }
    outcome(worst <= 1e-12, worst, "max |Q(α) - W(0, -α)| on a 21x21 grid, 5 states".into())
}

fn laguerre_inequality() -> Result<Outcome> {
    let mut min_lhs = f64::INFINITY;
    let mut identity = 0.0f64;
    for n in 0..=5 {
        for &x in &[0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
            let m_max = auto_m_max(n, x)?;
            for s in 2..=4 {
                let r = verify_laguerre_inequality(n, x, s, m_max)?;
                min_lhs = min_lhs.min(r.lhs);
                identity = identity.max((r.lhs - r.scaled_information).abs());
            }
        }
    }
    outcome(
        min_lhs >= -1e-10 && identity <= 1e-8,
        identity,
        format!("min lhs {min_lhs:e}; residual is max |lhs - e^x I|"),
    )
}

fn information_figure() -> Result<Outcome> {
    let xs = StepRange::new(0.02, 6.0, 0.02)?.values();
    let mut min_value = f64::INFINITY;
    let mut maxima = Vec::new();
    let mut far = Vec::new();
    for n in 0..3 {
        let curve = xs.iter().map(|&x| fock_information(n, x, 2)).collect::<Result<Vec<f64>>>()?;
        min_value = curve.iter().cloned().fold(min_value, f64::min);
        maxima.push(local_maxima(&curve));
        far.push(fock_information(n, 36.0, 2)?);
    }
    let pass = min_value >= -1e-12 && far.iter().all(|v| *v < 5e-2) && maxima[0] <= 1 && maxima[1] >= 2 && maxima[2] >= 2;
    let worst_far = far.iter().cloned().fold(0.0, f64::max);
    outcome(pass, worst_far, format!("min I {min_value:e}; I(n,36) {far:?}; local maxima per n {maxima:?}"))
}

pub const ORACLE_LAMBDAS: [f64; 5] = [0.2, 0.5, 1.0, 2.0, 5.0];
pub const ORACLE_ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];

fn entanglement_oracle() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for &l in &ORACLE_LAMBDAS {
        let spec = DeformationSpec::kerr(l)?;
        for &a1 in &ORACLE_ALPHAS {
            for &a2 in &ORACLE_ALPHAS {
                let (c1, c2) = (C64::new(a1, 0.0), C64::new(a2, 0.0));
                let st = two_mode_f_coherent_total(c1, c2, &spec, DEFAULT_EPS)?;
                let trace = linear_entropy(&reduce_mode2(&st));
                let series = linear_entropy_series(c1, c2, &spec, DEFAULT_EPS)?;
                worst = worst.max((trace - series).abs());
            }
        }
    }
    outcome(worst <= 1e-8, worst, "max |series - partial trace| over the 5x9 grid".into())
}

fn limit_values() -> Result<Outcome> {
    let mut notes = Vec::new();
    let mut pass = true;
    let mut worst = 0.0f64;
    let mut record = |label: &str, value: f64, target: f64, tol: f64| {
        let d = (value - target).abs();
        pass &= d <= tol;
        worst = worst.max(d / tol);
        notes.push(format!("{label}={value:.12}"));
    };
    let one = C64::new(1.0, 0.0);
    let small = DeformationSpec::kerr(1e-4)?;
    record("S+(λ=1e-4)", cat_linear_entropy(one, &small, CatParity::Even, DEFAULT_EPS)?, 0.0, 1e-3);
    record("S-(λ=1e-4)", cat_linear_entropy(one, &small, CatParity::Odd, DEFAULT_EPS)?, 0.5, 1e-3);
    let big = DeformationSpec::kerr(1e6)?;
    for &a in &[0.5, 1.0, 2.0] {
        let c = C64::new(a, 0.0);
        record(&format!("S-(λ=1e6,α={a})"), cat_linear_entropy(c, &big, CatParity::Odd, DEFAULT_EPS)?, 0.5, 1e-4);
        let plus = cat_linear_entropy(c, &big, CatParity::Even, DEFAULT_EPS)?;
        record(&format!("S+(λ=1e6,α={a})"), plus, cat_entropy_identity_limit(c), 1e-4);
    }
    // three-level state (|00⟩ + α₁|10⟩ + α₂|01⟩)/N
    let three = TwoModeAmplitudes::from_coeffs(2, 2, vec![one, one, one, C64::new(0.0, 0.0)], 0.0)?;
    let trace = linear_entropy(&reduce_mode2(&three));
    let closed = kerr_zero_limit_entropy(one, one);
    record("S(λ=0) closed vs trace", closed, trace, 1e-10);
    record("S(λ=0)", closed, 2.0 / 9.0, 1e-10);
    // the constructed cat at λ = 1e-4 agrees with the series
    let st = cat_superposition(one, &small, CatParity::Odd, DEFAULT_EPS)?;
    record(
        "S-(λ=1e-4) trace",
        linear_entropy(&reduce_mode2(&st)),
        cat_linear_entropy(one, &small, CatParity::Odd, DEFAULT_EPS)?,
        1e-8,
    );
    outcome(pass, worst, format!("residual is the worst |value - target| / tol; {}", notes.join(", ")))
}

fn entropy_claims() -> Result<Outcome> {
    let lambdas: Vec<f64> = (1..=50).map(|i| 0.1 * i as f64).collect();
    let curve = lambdas.iter().map(|&l| kerr_entropy(l, 1.0, 1.0, DEFAULT_EPS)).collect::<Result<Vec<f64>>>()?;
    let min_drop = curve.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    let alphas = StepRange::new(0.0, 4.0, 0.05)?.values();
    let mut peaks = Vec::new();
    let mut heights = Vec::new();
    for &l in &FIG3_LAMBDAS {
        let s = alphas.iter().map(|&a| kerr_entropy(l, a, FIG3_ALPHA2, DEFAULT_EPS)).collect::<Result<Vec<f64>>>()?;
        let i = argmax(&s);
        peaks.push(alphas[i]);
        heights.push(s[i]);
    }
    let shifts = peaks.windows(2).all(|w| w[1] > w[0]);
    outcome(
        min_drop > 0.0 && shifts,
        min_drop,
        format!("smallest decrease of S(1,1) between λ steps {min_drop:e}; argmax |α1| for λ={FIG3_LAMBDAS:?}: {peaks:?}, peak values {heights:?}"),
    )
}

fn uncertainty() -> Result<Outcome> {
    let mut states: Vec<FockAmplitudes> = (0..=10).map(FockAmplitudes::fock).collect();
    for &r in &[0.5, 1.0, 2.0] {
        states.push(glauber(C64::from_polar(r, 0.4), DEFAULT_EPS)?);
    }
    for &l in &[0.5, 1.0, 3.0] {
        states.push(f_coherent(C64::new(1.0, 0.3), &DeformationSpec::kerr(l)?, DEFAULT_EPS)?);
    }
    let specs = [
        DeformationSpec::identity(),
        DeformationSpec::qosc(0.05)?,
        DeformationSpec::qosc(0.3)?,
        DeformationSpec::kerr(0.3)?,
        DeformationSpec::kerr(1.0)?,
        DeformationSpec::kerr(5.0)?,
    ];
    let mut min_residual = f64::INFINITY;
    for s in &states {
        for spec in &specs {
            min_residual = min_residual.min(deformed_quadrature_stats(s, spec)?.sr_residual());
        }
    }
    let vac = FockAmplitudes::vacuum();
    let mut vac_dev = 0.0f64;
    for &l in &[0.01, 0.1, 0.3] {
        vac_dev = vac_dev.max((qosc_small_lambda_rhs(&vac, l) - 0.25 * (1.0 + l * l / 3.0)).abs());
    }
    // λ⁴ scaling of the expansion error, states with ⟨n⟩ ≤ 4
    let probes = [vac, glauber(C64::new(1.0, 0.0), DEFAULT_EPS)?, glauber(C64::new(2.0, 0.0), DEFAULT_EPS)?, FockAmplitudes::fock(2)];
    let mut ratios = Vec::new();
    for st in &probes {
        let err = |l: f64| -> Result<f64> {
            let exact = deformed_quadrature_stats(st, &DeformationSpec::qosc(l)?)?.sr_rhs;
            Ok((exact - qosc_small_lambda_rhs(st, l)).abs())
        };
        let c4 = err(0.1)? / 1e-4;
        for &l in &[0.05, 0.02, 0.01] {
            ratios.push(err(l)? / (c4 * l.powi(4)));
        }
    }
    let scaling = ratios.iter().all(|r| *r >= 0.5 && *r <= 2.0);
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
    outcome(
        min_residual >= -1e-10 && vac_dev <= 1e-12 && scaling,
        min_residual,
        format!("residual is min SR lhs - rhs; vacuum bound deviation {vac_dev:e}; λ⁴ ratios in [{lo:.4}, {hi:.4}]"),
    )
}

fn moment_erratum(constant: MomentConstant) -> Result<Outcome> {
    let states = [FockAmplitudes::vacuum(), FockAmplitudes::fock(1), glauber(C64::new(1.0, 0.0), DEFAULT_EPS)?];
    let targets = [Some(1.0 / 3.0), Some(7.0 / 3.0), None];
    let mut worst = 0.0f64;
    let mut gap = 0.0f64;
    for (s, t) in states.iter().zip(targets) {
        let op = number_moment_combination(s);
        if let Some(t) = t {
            worst = worst.max((op - t).abs());
        }
        let used = moment_from_optical_tomogram(s, constant);
        worst = worst.max((used - op).abs());
        let printed = moment_from_optical_tomogram(s, MomentConstant::Printed);
        let corrected = moment_from_optical_tomogram(s, MomentConstant::Corrected);
        gap = gap.max((printed - corrected - 0.25).abs());
    }
    let label = match constant {
        MomentConstant::Corrected => "corrected -1/6",
        MomentConstant::Printed => "printed +1/12",
    };
    outcome(
        worst <= 1e-6 && gap <= 1e-12,
        worst,
        format!("constant {label}; max |tomographic - operator| {worst:e}; |(printed - corrected) - 1/4| {gap:e}"),
    )
}

fn figure_determinism() -> Result<Outcome> {
    let grids = FigureGrids::default();
    let render = |id: u8| -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        figure(id, &grids)?.write_csv(&mut buf).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(buf)
    };
    let mut same = true;
    for id in [1, 4] {
        same &= render(id)? == render(id)?;
    }
    outcome(same, if same { 0.0 } else { 1.0 }, "figures 1 and 4 rendered twice compare byte-for-byte".into())
}
