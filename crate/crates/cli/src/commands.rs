use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ftomo::entropic::{auto_m_max, verify_laguerre_inequality, write_inequality_csv, LaguerreInequality};
use ftomo::figures::{figure as build_figure, kerr_cat_entropy, kerr_entropy, FigureGrids, FigureTable};
use ftomo::grid::{periodic_points, write_csv, Field};
use ftomo::states::{CatParity, DEFAULT_EPS};
use ftomo::tomography::{GridAudit, TomogramGrid, TomogramKind};
use ftomo::uncertainty::{deformed_quadrature_stats, qosc_small_lambda_rhs, write_uncertainty_csv, UncertaintyRow};
use ftomo::verify::{run as run_verify, VerifyOptions};
use ftomo::{Complex64, DeformationSpec};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{deformation_from_value, parse_complex, parse_deformation, parse_list, parse_range, FileConfig, StateSpec};
use crate::{CliError, Common, EntanglementArgs, EntropyArgs, FigureArgs, StateArgs, TomogramArgs, UncertaintyArgs, VerifyArgs};

pub const DEFAULT_AUDIT_TOL: f64 = 1e-4;

pub struct Resolved {
    pub out: Option<PathBuf>,
    pub eps: f64,
    pub audit: bool,
    pub audit_tol: f64,
}

impl Resolved {
    pub fn new(c: &Common, file: &FileConfig) -> Result<Self, CliError> {
        let eps = c.eps.or(file.eps).unwrap_or(DEFAULT_EPS);
        if !(eps > 0.0 && eps <= 1e-6) {
            return Err(CliError::Config(format!("--eps must lie in (0, 1e-6], got {eps}")));
        }
        let audit_tol = c.audit_tol.or(file.audit_tol).unwrap_or(DEFAULT_AUDIT_TOL);
        if audit_tol.is_nan() || audit_tol <= 0.0 {
            return Err(CliError::Config("--audit-tol must be positive".into()));
        }
        Ok(Resolved {
            out: c.out.clone().or_else(|| file.out.clone()),
            eps,
            audit: c.audit || file.audit.unwrap_or(false),
            audit_tol,
        })
    }

    fn out_or(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }
}

fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| file.clone())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    let f = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn resolve_state(a: &StateArgs, file: &FileConfig, default_state: &str) -> Result<StateSpec, CliError> {
    let alpha = match pick(&a.alpha, &file.alpha) {
        Some(t) => parse_complex("alpha", &t)?,
        None => Complex64::new(1.0, 0.0),
    };
    let deformation = match (&a.deformation, &file.deformation) {
        (Some(t), _) => parse_deformation(t)?,
        (None, Some(v)) => deformation_from_value(v)?,
        (None, None) => DeformationSpec::identity(),
    };
    let state = pick(&a.state, &file.state).unwrap_or_else(|| default_state.to_string());
    StateSpec::parse(&state, alpha, deformation)
}

#[derive(Serialize)]
struct AxisSummary {
    name: String,
    len: usize,
    min: f64,
    max: f64,
}

#[derive(Serialize)]
struct AuditSummary {
    min_value: f64,
    min_integral: f64,
    max_deviation: f64,
    tol: f64,
    pass: bool,
}

#[derive(Serialize)]
struct TomogramSidecar<'a> {
    kind: TomogramKind,
    state: &'a StateSpec,
    state_digest: &'a str,
    trunc_tail: f64,
    eps: f64,
    axes: Vec<AxisSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    audit: Option<AuditSummary>,
}

fn axis_summary(grid: &TomogramGrid) -> Vec<AxisSummary> {
    use ftomo::tomography::AxisValues;
    grid.axes
        .iter()
        .map(|a| {
            let v: Vec<f64> = match &a.values {
                AxisValues::Int(v) => v.iter().map(|x| *x as f64).collect(),
                AxisValues::Real(v) => v.clone(),
            };
            AxisSummary {
                name: a.name.clone(),
                len: v.len(),
                min: v.iter().cloned().fold(f64::INFINITY, f64::min),
                max: v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

fn audit_line(label: &str, a: &GridAudit, tol: f64, pass: bool) -> String {
    format!(
        "# audit kind={label} min_value={:.16e} min_integral={:.16e} max_deviation={:.16e} tol={tol:e} pass={pass}",
        a.min_value, a.min_integral, a.max_deviation
    )
}

pub fn tomogram(c: &Resolved, a: &TomogramArgs, file: &FileConfig) -> Result<(), CliError> {
    let kind = pick(&a.kind, &file.kind).unwrap_or_else(|| "optical".into());
    let spec = resolve_state(&a.state, file, "vacuum")?;
    let state = spec.build(c.eps)?;
    let range = |flag: &Option<String>, key: &Option<String>, label: &str, default: &str| -> Result<Vec<f64>, CliError> {
        Ok(parse_range(label, &pick(flag, key).unwrap_or_else(|| default.into()))?.values())
    };
    let grid = match kind.as_str() {
        "optical" => {
            let count = a.theta_count.or(file.theta_count).unwrap_or(360);
            if count == 0 {
                return Err(CliError::Config("--theta-count must be positive".into()));
            }
            let xs = range(&a.x, &file.x, "x", "-6:6:0.05")?;
            TomogramGrid::optical(&state, periodic_points(2.0 * PI, count), xs)?
        }
        "symplectic" => {
            let mus = parse_list("mu", &pick(&a.mu, &file.mu).unwrap_or_else(|| "1,0.5".into()))?;
            let nus = parse_list("nu", &pick(&a.nu, &file.nu).unwrap_or_else(|| "0,0.5".into()))?;
            let xs = range(&a.x, &file.x, "x", "-6:6:0.05")?;
            TomogramGrid::symplectic(&state, mus, nus, xs)?
        }
        "photon" => {
            let re = range(&a.re, &file.re, "re", "-2:2:0.5")?;
            let im = range(&a.im, &file.im, "im", "-2:2:0.5")?;
            let n_max = a.n_max.or(file.n_max).unwrap_or(64);
            TomogramGrid::photon_number(&state, re, im, (0..=n_max).collect())?
        }
        "husimi" => {
            let re = range(&a.re, &file.re, "re", "-5:5:0.1")?;
            let im = range(&a.im, &file.im, "im", "-5:5:0.1")?;
            TomogramGrid::husimi(&state, re, im)?
        }
        other => return Err(CliError::Config(format!("--kind must be optical, symplectic, photon or husimi, got '{other}'"))),
    };
    let out = c.out_or(&format!("tomogram_{kind}.csv"));
    let mut w = create(&out)?;
    grid.write_csv(&mut w)?;
    let audit = if c.audit {
        let report = grid.audit();
        let pass = report.passes(c.audit_tol);
        writeln!(w, "{}", audit_line(&kind, &report, c.audit_tol, pass))?;
        Some((report, pass))
    } else {
        None
    };
    w.flush()?;
    let sidecar = TomogramSidecar {
        kind: grid.kind,
        state: &spec,
        state_digest: &grid.state_digest,
        trunc_tail: grid.trunc_tail,
        eps: c.eps,
        axes: axis_summary(&grid),
        audit: audit.map(|(r, pass)| AuditSummary {
            min_value: r.min_value,
            min_integral: r.min_integral,
            max_deviation: r.max_deviation,
            tol: c.audit_tol,
            pass,
        }),
    };
    write_json(&sidecar_path(&out), &sidecar)?;
    if let Some((r, false)) = audit {
        return Err(CliError::AuditFailed(format!(
            "min value {:e}, max normalization deviation {:e} (tol {:e})",
            r.min_value, r.max_deviation, c.audit_tol
        )));
    }
    Ok(())
}

fn write_figure(path: &Path, table: &FigureTable, audit: bool) -> Result<(), CliError> {
    let mut w = create(path)?;
    table.write_csv(&mut w)?;
    if audit {
        let bad = table.range_violations();
        let min = table.values().iter().cloned().fold(f64::INFINITY, f64::min);
        writeln!(w, "# audit kind=figure{} min_value={min:.16e} range_violations={bad} pass={}", table.id, bad == 0)?;
        if bad > 0 {
            w.flush()?;
            return Err(CliError::AuditFailed(format!("figure {}: {bad} values outside their range", table.id)));
        }
    }
    w.flush()?;
    Ok(())
}

pub fn figure(c: &Resolved, a: &FigureArgs, file: &FileConfig) -> Result<(), CliError> {
    let id = pick(&a.id, &file.id).ok_or_else(|| CliError::Config("figure id (1..5 or all) is required".into()))?;
    let mut grids = FigureGrids { eps: c.eps, ..FigureGrids::default() };
    if let Some(t) = pick(&a.lambda, &file.lambda) {
        grids.lambda = parse_range("lambda", &t)?;
    }
    if let Some(t) = pick(&a.x, &file.x) {
        grids.x = parse_range("x", &t)?;
    }
    if let Some(t) = pick(&a.alpha1, &file.alpha1) {
        grids.alpha1 = parse_range("alpha1", &t)?;
    }
    if id == "all" {
        let dir = c.out_or(".");
        fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        for n in 1..=5u8 {
            let table = build_figure(n, &grids)?;
            write_figure(&dir.join(format!("fig{n}.csv")), &table, c.audit)?;
        }
        return Ok(());
    }
    let n: u8 = id.parse().ok().filter(|n| (1..=5).contains(n)).ok_or_else(|| CliError::Config(format!("figure id must be 1..5 or all, got '{id}'")))?;
    let table = build_figure(n, &grids)?;
    write_figure(&c.out_or(&format!("fig{n}.csv")), &table, c.audit)
}

pub fn entropy(c: &Resolved, a: &EntropyArgs, file: &FileConfig) -> Result<(), CliError> {
    let ns: Vec<usize> = parse_list("n", &pick(&a.n, &file.n).unwrap_or_else(|| "0,1,2,3,4,5".into()))?;
    let xs = parse_range("x", &pick(&a.x, &file.x).unwrap_or_else(|| "0.1:8:0.1".into()))?.values();
    let ss: Vec<usize> = parse_list("s", &pick(&a.s, &file.s).unwrap_or_else(|| "2,3,4".into()))?;
    if ss.iter().any(|s| *s < 2) {
        return Err(CliError::Config("--s values must be at least 2".into()));
    }
    let mut points = Vec::with_capacity(ns.len() * xs.len() * ss.len());
    for &n in &ns {
        for &x in &xs {
            points.extend(ss.iter().map(|&s| (n, x, s)));
        }
    }
    let rows = points
        .par_iter()
        .map(|&(n, x, s)| verify_laguerre_inequality(n, x, s, auto_m_max(n, x)?))
        .collect::<ftomo::Result<Vec<LaguerreInequality>>>()?;
    let out = c.out_or("laguerre_inequality.csv");
    let mut w = create(&out)?;
    write_inequality_csv(&mut w, &rows)?;
    if c.audit {
        let failing = rows.iter().filter(|r| !r.holds).count();
        let min = rows.iter().map(|r| r.lhs).fold(f64::INFINITY, f64::min);
        writeln!(w, "# audit kind=laguerre_inequality min_lhs={min:.16e} failing={failing} pass={}", failing == 0)?;
    }
    w.flush()?;
    Ok(())
}

pub fn entanglement(c: &Resolved, a: &EntanglementArgs, file: &FileConfig) -> Result<(), CliError> {
    let lambdas = parse_range("lambda", &pick(&a.lambda, &file.lambda).unwrap_or_else(|| "0:5:0.02".into()))?.values();
    if lambdas.iter().any(|l| *l < 0.0) {
        return Err(CliError::Config("--lambda must be nonnegative".into()));
    }
    let alpha1: f64 = match pick(&a.alpha1, &file.alpha1) {
        Some(t) => t.parse().map_err(|_| CliError::Config(format!("--alpha1: cannot parse '{t}'")))?,
        None => 1.0,
    };
    let alpha2 = a.alpha2.or(file.alpha2).unwrap_or(1.0);
    let cat = match pick(&a.cat, &file.cat).as_deref() {
        None => None,
        Some("even") => Some(CatParity::Even),
        Some("odd") => Some(CatParity::Odd),
        Some(other) => return Err(CliError::Config(format!("--cat must be even or odd, got '{other}'"))),
    };
    let eps = c.eps;
    let (header, rows): (Vec<&str>, Vec<Vec<Field>>) = match cat {
        None => {
            let rows = lambdas
                .par_iter()
                .map(|&l| Ok(vec![l.into(), alpha1.into(), alpha2.into(), kerr_entropy(l, alpha1, alpha2, eps)?.into()]))
                .collect::<ftomo::Result<Vec<Vec<Field>>>>()?;
            (vec!["lambda", "abs_alpha1", "abs_alpha2", "entropy"], rows)
        }
        Some(parity) => {
            let rows = lambdas
                .par_iter()
                .map(|&l| {
                    Ok(vec![l.into(), alpha1.into(), Field::Int(parity.sign() as i64), kerr_cat_entropy(l, alpha1, parity, eps)?.into()])
                })
                .collect::<ftomo::Result<Vec<Vec<Field>>>>()?;
            (vec!["lambda", "abs_alpha", "sign", "entropy"], rows)
        }
    };
    let out = c.out_or("linear_entropy.csv");
    let mut w = create(&out)?;
    write_csv(&mut w, &header, &rows)?;
    if c.audit {
        let bad = rows
            .iter()
            .filter(|r| !matches!(r[3], Field::Real(v) if (-1e-12..=1.0 + 1e-12).contains(&v)))
            .count();
        writeln!(w, "# audit kind=linear_entropy range_violations={bad} pass={}", bad == 0)?;
    }
    w.flush()?;
    Ok(())
}

pub fn uncertainty(c: &Resolved, a: &UncertaintyArgs, file: &FileConfig) -> Result<(), CliError> {
    let spec = resolve_state(&a.state, file, "coherent")?;
    let state = spec.build(c.eps)?;
    let family = pick(&a.family, &file.family).unwrap_or_else(|| "qosc".into());
    let default_range = if family == "kerr" { "0.1:5:0.1" } else { "0:0.3:0.01" };
    let lambdas: Vec<f64> = parse_range("lambda", &pick(&a.lambda, &file.lambda).unwrap_or_else(|| default_range.into()))?.values();
    let make = |l: f64| -> ftomo::Result<DeformationSpec> {
        match family.as_str() {
            "qosc" => DeformationSpec::qosc(l),
            "kerr" => DeformationSpec::kerr(l),
            "identity" => Ok(DeformationSpec::identity()),
            other => Err(ftomo::Error::InvalidArgument(format!("--family must be qosc, kerr or identity, got '{other}'"))),
        }
    };
    let digest = state.digest();
    let rows = lambdas
        .iter()
        .map(|&l| {
            let stats = deformed_quadrature_stats(&state, &make(l)?)?;
            Ok(UncertaintyRow {
                lambda: l,
                family: family.clone(),
                state_digest: digest.clone(),
                stats,
                sr_rhs_small_lambda: (family == "qosc").then(|| qosc_small_lambda_rhs(&state, l)),
            })
        })
        .collect::<ftomo::Result<Vec<_>>>()?;
    let out = c.out_or("uncertainty.csv");
    let mut w = create(&out)?;
    write_uncertainty_csv(&mut w, &rows)?;
    if c.audit {
        let min = rows.iter().map(|r| r.stats.sr_residual()).fold(f64::INFINITY, f64::min);
        let warned = rows.iter().any(|r| r.stats.truncation_warning);
        writeln!(w, "# audit kind=uncertainty min_sr_residual={min:.16e} truncation_warning={warned} pass={}", min >= -1e-10)?;
    }
    w.flush()?;
    Ok(())
}

pub fn verify(c: &Resolved, a: &VerifyArgs, file: &FileConfig) -> Result<(), CliError> {
    let only = if a.only.is_empty() { file.only.clone().unwrap_or_default() } else { a.only.clone() };
    let force = a.force_paper_moment_constant || file.force_paper_moment_constant.unwrap_or(false);
    let opts = VerifyOptions {
        only,
        moment_constant: if force {
            ftomo::uncertainty::MomentConstant::Printed
        } else {
            ftomo::uncertainty::MomentConstant::Corrected
        },
    };
    let report = run_verify(&opts)?;
    for r in &report.checks {
        eprintln!(
            "{} {} residual={:e} runtime={:.3}s {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.residual,
            r.runtime_s,
            r.detail
        );
    }
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    match &c.out {
        Some(path) => write_json(path, &report)?,
        None => println!("{text}"),
    }
    if report.all_pass {
        Ok(())
    } else {
        Err(CliError::ChecksFailed)
    }
}
