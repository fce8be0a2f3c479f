use rayon::prelude::*;

use su11::algebra::{disentangle_closed_form, exp_defining, AlgebraElement};
use su11::linalg::symmetric_eigs;
use su11::metric::{validate_params, z_domain, MetricSolution, SwansonParams};
use su11::pdm::{refinement_study, PdmConfig, REFINEMENT_POINTS};
use su11::realization::{materialize, RealizationKind, RealizationMatrices};
use su11::verify::{build_bundle, spectrum_prediction_merged, OperatorBundle, Tolerances};
use su11::C64;

use crate::config::FileConfig;
use crate::report::{complex, num, opt, snap, Report};
use crate::{BasisArgs, CliError, Command, ParamArgs, TolArgs};

const SWEEP_EIGENVALUES: usize = 5;

pub struct Outcome {
    pub report: Report,
    /// False when a tolerance check failed.
    pub ok: bool,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Self { report, ok: true }
    }
}

pub fn run(cmd: &Command, cfg: &FileConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::Validate { params } => validate(params, cfg),
        Command::Disentangle { epsilon, eta, eta_im } => disentangle(*epsilon, *eta, *eta_im, cfg),
        Command::Metric { params, z } => metric(params, *z, cfg),
        Command::Spectrum { params, z, basis, count } => spectrum(params, *z, basis, *count, cfg),
        Command::Sweep { params, z_from, z_to, steps, basis, tol } => {
            sweep(params, (*z_from, *z_to, *steps), basis, tol, cfg)
        }
        Command::Pdm { params, z, s, tau, x_min, x_max, points, count, rel_tol } => {
            let opts = PdmArgs { z: *z, s: *s, tau: *tau, x_min: *x_min, x_max: *x_max, points: points.clone() };
            pdm(params, opts, *count, *rel_tol, cfg)
        }
        Command::Verify { params, z, basis, count, tol } => verify(params, *z, basis, *count, tol, cfg),
    }
}

fn params(p: &ParamArgs, cfg: &FileConfig) -> Result<SwansonParams, CliError> {
    let p = SwansonParams {
        omega: cfg.require(p.omega, "omega")?,
        alpha: cfg.require(p.alpha, "alpha")?,
        beta: cfg.require(p.beta, "beta")?,
    };
    Ok(validate_params(p)?)
}

struct Basis {
    kind: RealizationKind,
    matrices: RealizationMatrices,
    params: SwansonParams,
    trusted: usize,
}

/// Builds the realization. One that fixes α and β itself (conformal)
/// overrides any given values, and only ω is read.
fn basis(p: &ParamArgs, b: &BasisArgs, cfg: &FileConfig) -> Result<Basis, CliError> {
    let desc = cfg.or(b.realization.clone(), "realization", "discrete:k=0.25".to_string())?;
    let kind: RealizationKind = desc.parse()?;
    let n = cfg.or(b.n, "n", 200)?;
    let t = cfg.or(b.t, "t", 50)?;
    if !(n > t && t >= 2) {
        return Err(CliError::Input(format!("constraint N > T >= 2 violated (N = {n}, T = {t})")));
    }
    let params = match kind.forced_params(cfg.require(p.omega, "omega")?) {
        Some(forced) => validate_params(forced?)?,
        None => params(p, cfg)?,
    };
    let matrices = kind.build(n, params.omega)?;
    Ok(Basis { kind, matrices, params, trusted: t })
}

fn tolerances(t: &TolArgs, cfg: &FileConfig) -> Result<(Tolerances, f64), CliError> {
    let d = Tolerances::default();
    Ok((
        Tolerances {
            herm: cfg.or(t.tol_herm, "tol_herm", d.herm)?,
            eq10: cfg.or(t.tol_eq10, "tol_eq10", d.eq10)?,
            intertwine: cfg.or(t.tol_intertwine, "tol_intertwine", d.intertwine)?,
            quasi: cfg.or(t.tol_quasi, "tol_quasi", d.quasi)?,
            commute: cfg.or(t.tol_commute, "tol_commute", d.commute)?,
            eigvec: cfg.or(t.tol_eigvec, "tol_eigvec", d.eigvec)?,
        },
        cfg.or(t.tol_spectrum, "tol_spectrum", 1e-6)?,
    ))
}

fn param_fields(p: &SwansonParams) -> Vec<(&'static str, String)> {
    vec![("omega", num(p.omega)), ("alpha", num(p.alpha)), ("beta", num(p.beta))]
}

fn validate(p: &ParamArgs, cfg: &FileConfig) -> Result<Outcome, CliError> {
    let p = params(p, cfg)?;
    let mut r = Report::default();
    let mut f = param_fields(&p);
    f.extend([
        ("status", "valid".to_string()),
        ("omega^2-4*alpha*beta", num(p.gap())),
        ("effective_frequency", num(p.effective_frequency())),
        ("z_domain", domain_text(&p)),
    ]);
    r.fields(f);
    Ok(Outcome::ok(r))
}

fn domain_text(p: &SwansonParams) -> String {
    let d = z_domain(p);
    if d.is_empty() {
        return "empty".into();
    }
    let parts: Vec<String> = d
        .intervals
        .iter()
        .map(|i| {
            let l = if i.lo_open { '(' } else { '[' };
            let r = if i.hi_open { ')' } else { ']' };
            format!("{l}{}, {}{r}", num(i.lo), num(i.hi))
        })
        .collect();
    parts.join(" ∪ ")
}

fn disentangle(eps: Option<f64>, eta: Option<f64>, eta_im: Option<f64>, cfg: &FileConfig) -> Result<Outcome, CliError> {
    let eps = cfg.require(eps, "epsilon")?;
    let eta = C64::new(cfg.require(eta, "eta")?, cfg.or(eta_im, "eta_im", 0.0)?);
    let (normal, anti) = disentangle_closed_form(eps, eta)?;
    let exact = exp_defining(&AlgebraElement::metric_exponent(eps, eta));
    let mut r = Report::default();
    r.fields(vec![
        ("epsilon", num(eps)),
        ("eta", complex(eta)),
        ("theta^2", num(eps * eps - 4.0 * eta.norm_sqr())),
        ("p", complex(normal.p)),
        ("q", complex(normal.q)),
        ("r", complex(normal.r)),
        ("p'", complex(anti.p)),
        ("q'", complex(anti.q)),
        ("r'", complex(anti.r)),
        ("normal_error", num((normal.to_defining() - exact).spectral_norm())),
        ("antinormal_error", num((anti.to_defining() - exact).spectral_norm())),
    ]);
    Ok(Outcome::ok(r))
}

fn metric(p: &ParamArgs, z: Option<f64>, cfg: &FileConfig) -> Result<Outcome, CliError> {
    let p = params(p, cfg)?;
    let z = cfg.require(z, "z")?;
    let s = MetricSolution::solve(&p, z)?;
    let [u, v, w] = s.uvw;
    let mut f = param_fields(&p);
    f.extend([
        ("z", num(z)),
        ("epsilon", num(s.epsilon)),
        ("eta", num(s.eta)),
        ("theta", num(s.theta)),
        ("mu", opt(s.mu)),
        ("nu", opt(s.nu)),
        ("mu_nu_product", opt(s.mu.zip(s.nu).map(|(m, n)| m * n))),
        ("U", complex(u)),
        ("V", complex(v)),
        ("W", complex(w)),
        ("h_K0", num(s.h.c0.re)),
        ("h_K-", num(s.h.cm.re)),
        ("h_K+", num(s.h.cp.re)),
        ("Lambda", opt(s.lambda_base)),
    ]);
    let mut r = Report::default();
    r.fields(f);
    Ok(Outcome::ok(r))
}

fn spectrum(
    p: &ParamArgs,
    z: Option<f64>,
    b: &BasisArgs,
    count: Option<usize>,
    cfg: &FileConfig,
) -> Result<Outcome, CliError> {
    let z = cfg.or(z, "z", 0.0)?;
    let b = basis(p, b, cfg)?;
    let count = cfg.or(count, "count", 5)?;
    if count > b.trusted / 2 {
        return Err(CliError::Input(format!("constraint count <= T/2 violated (count = {count}, T = {})", b.trusted)));
    }
    let s = MetricSolution::solve(&b.params, z)?;
    let eig = symmetric_eigs(&materialize(&s.h, &b.matrices)?)?;
    let pred = spectrum_prediction_merged(&b.params, &b.matrices.lowest_weights(), count)?;
    let mut r = Report::default();
    let mut f = param_fields(&b.params);
    f.extend([("realization", b.kind.to_string()), ("N", b.matrices.dim.to_string()), ("z", num(z))]);
    r.fields(f);
    r.table(spectrum_header(), spectrum_rows(&eig.values[..count], &pred));
    Ok(Outcome::ok(r))
}

fn spectrum_header() -> Vec<String> {
    ["n", "eigenvalue", "predicted", "rel_error"].map(String::from).to_vec()
}

fn spectrum_rows(vals: &[f64], pred: &[f64]) -> Vec<Vec<String>> {
    vals.iter()
        .zip(pred)
        .enumerate()
        .map(|(i, (a, e))| vec![i.to_string(), num(*a), num(*e), num(((a - e) / e).abs())])
        .collect()
}

fn spectrum_deviation(bundle: &OperatorBundle, params: &SwansonParams, ks: &[f64]) -> Result<f64, CliError> {
    let pred = spectrum_prediction_merged(params, ks, bundle.spectrum.len())?;
    Ok(bundle.spectrum.iter().zip(&pred).map(|(a, e)| ((a - e) / e).abs()).fold(0.0, f64::max))
}

fn sweep(
    p: &ParamArgs,
    range: (Option<f64>, Option<f64>, Option<usize>),
    b: &BasisArgs,
    tol: &TolArgs,
    cfg: &FileConfig,
) -> Result<Outcome, CliError> {
    let from = cfg.require(range.0, "z_from")?;
    let to = cfg.require(range.1, "z_to")?;
    let steps = cfg.require(range.2, "steps")?;
    if steps < 1 {
        return Err(CliError::Input("constraint steps >= 1 violated".into()));
    }
    if !(from <= to) {
        return Err(CliError::Input(format!("constraint z_from <= z_to violated ({from} > {to})")));
    }
    let b = basis(p, b, cfg)?;
    if SWEEP_EIGENVALUES > b.trusted / 2 {
        return Err(CliError::Input(format!("sweep reports 5 eigenvalues and needs T >= 10 (T = {})", b.trusted)));
    }
    let (tol, _) = tolerances(tol, cfg)?;
    let zs: Vec<f64> = (0..steps)
        .map(|i| if steps == 1 { from } else { snap(from + (to - from) * i as f64 / (steps - 1) as f64) })
        .collect();
    // every row is computed before anything is printed, so an error leaves no partial CSV
    let bundles = zs
        .par_iter()
        .map(|&z| build_bundle(&b.params, z, &b.matrices, b.trusted, SWEEP_EIGENVALUES))
        .collect::<Result<Vec<_>, _>>()?;

    let mut header: Vec<String> =
        ["z", "epsilon", "mu", "nu", "mu_nu_product", "U", "V", "W", "r_herm", "r_eq10", "r_intertwine", "r_quasi", "r_commute"]
            .map(String::from)
            .to_vec();
    header.extend((0..SWEEP_EIGENVALUES).map(|i| format!("e{i}")));
    let mut ok = true;
    let rows = bundles
        .iter()
        .map(|bd| {
            ok &= bd.passes(&tol);
            let s = &bd.solution;
            let r = &bd.residuals;
            let mut row = vec![
                num(s.z),
                num(s.epsilon),
                opt(s.mu),
                opt(s.nu),
                opt(s.mu.zip(s.nu).map(|(m, n)| m * n)),
                complex(s.uvw[0]),
                complex(s.uvw[1]),
                complex(s.uvw[2]),
                num(r.herm),
                num(r.eq10),
                num(r.intertwine),
                num(r.quasi),
                num(r.commute),
            ];
            row.extend(bd.spectrum.iter().map(|e| num(*e)));
            row
        })
        .collect();
    let mut report = Report::default();
    report.table(header, rows);
    Ok(Outcome { report, ok })
}

fn verify(
    p: &ParamArgs,
    z: Option<f64>,
    b: &BasisArgs,
    count: Option<usize>,
    tol: &TolArgs,
    cfg: &FileConfig,
) -> Result<Outcome, CliError> {
    let z = cfg.or(z, "z", 0.0)?;
    let b = basis(p, b, cfg)?;
    let count = cfg.or(count, "count", 5)?;
    let (tol, tol_spec) = tolerances(tol, cfg)?;
    let bd = build_bundle(&b.params, z, &b.matrices, b.trusted, count)?;
    let ks = b.matrices.lowest_weights();

    let mut report = Report::default();
    let mut f = param_fields(&b.params);
    f.extend([
        ("realization", b.kind.to_string()),
        ("N", bd.dim.to_string()),
        ("T", bd.trusted.to_string()),
        ("z", num(z)),
        ("epsilon", num(bd.solution.epsilon)),
        ("eta", num(bd.solution.eta)),
        ("mu", opt(bd.solution.mu)),
        ("nu", opt(bd.solution.nu)),
        ("zeta_plus_positive_definite", bd.zeta_positive_definite().to_string()),
        ("zeta_plus_min_pivot", opt(bd.zeta_min_pivot())),
        ("zeta_plus_min_eigenvalue", opt(bd.zeta_min_eigenvalue)),
        ("extended_precision_bits", bd.precision_bits.map_or("NA".into(), |b| b.to_string())),
    ]);
    report.fields(f);

    let limits = [tol.herm, tol.eq10, tol.intertwine, tol.quasi, tol.commute, f64::NAN, tol.eigvec];
    let rows = bd
        .residuals
        .entries()
        .iter()
        .zip(limits)
        .map(|((name, v), lim)| {
            let status = if lim.is_nan() {
                "info"
            } else if *v <= lim {
                "PASS"
            } else {
                "FAIL"
            };
            vec![name.to_string(), num(*v), if lim.is_nan() { "-".into() } else { num(lim) }, status.to_string()]
        })
        .collect();
    report.table(["residual", "value", "tolerance", "status"].map(String::from).to_vec(), rows);

    let pred = spectrum_prediction_merged(&b.params, &ks, count)?;
    report.table(spectrum_header(), spectrum_rows(&bd.spectrum, &pred));
    let dev = spectrum_deviation(&bd, &b.params, &ks)?;
    let mut failures = bd.failures(&tol);
    if !(dev <= tol_spec) {
        failures.push(format!("spectrum deviation {} exceeds {}", num(dev), num(tol_spec)));
    }
    let ok = failures.is_empty();
    if ok {
        report.note("verdict: PASS");
    } else {
        report.note(format!("verdict: FAIL ({})", failures.join("; ")));
    }
    Ok(Outcome { report, ok })
}

struct PdmArgs {
    z: Option<f64>,
    s: Option<f64>,
    tau: Option<f64>,
    x_min: Option<f64>,
    x_max: Option<f64>,
    points: Option<String>,
}

fn pdm(
    p: &ParamArgs,
    a: PdmArgs,
    count: Option<usize>,
    rel_tol: Option<f64>,
    cfg: &FileConfig,
) -> Result<Outcome, CliError> {
    let p = params(p, cfg)?;
    let z = cfg.or(a.z, "z", 0.0)?;
    let base = PdmConfig::new(p, z);
    let pc = PdmConfig {
        s: cfg.or(a.s, "s", base.s)?,
        tau: cfg.or(a.tau, "tau", base.tau)?,
        x_min: cfg.or(a.x_min, "x_min", base.x_min)?,
        x_max: cfg.or(a.x_max, "x_max", base.x_max)?,
        ..base
    };
    let points: Vec<usize> = match cfg.pick(a.points, "points")? {
        None => REFINEMENT_POINTS.to_vec(),
        Some(list) => list
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Input(format!("points must be a comma-separated list of integers: {e}")))?,
    };
    let count = cfg.or(count, "count", 3)?;
    let rel_tol = cfg.or(rel_tol, "rel_tol", 0.01)?;
    let study = refinement_study(&pc, &points, count)?;

    let mut report = Report::default();
    let mut f = param_fields(&p);
    f.extend([
        ("z", num(z)),
        ("s", num(pc.s)),
        ("tau", num(pc.tau)),
        ("x_min", num(pc.x_min)),
        ("x_max", num(pc.x_max)),
    ]);
    report.fields(f);

    let mut header = vec!["points".to_string()];
    header.extend((0..count).map(|i| format!("e{i}")));
    header.extend(["max_change".to_string(), "boundary_amplitude".to_string()]);
    let changes = study.changes();
    let mut rows: Vec<Vec<String>> = study
        .levels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let mut row = vec![l.points.to_string()];
            row.extend(l.eigenvalues.iter().map(|e| num(*e)));
            row.push(if i == 0 { "-".into() } else { num(changes[i - 1]) });
            row.push(num(l.boundary_amplitude));
            row
        })
        .collect();
    let mut pred_row = vec!["predicted".to_string()];
    pred_row.extend(study.predicted.iter().map(|e| num(*e)));
    pred_row.extend(["-".to_string(), "-".to_string()]);
    rows.push(pred_row);
    report.table(header, rows);

    let verdict = study.verdict(rel_tol);
    report.fields(vec![
        ("relative_error", num(study.relative_error())),
        ("converging", study.converging().to_string()),
        ("boundary_decayed", study.boundary_decayed().to_string()),
        ("verdict", verdict.to_string()),
    ]);
    Ok(Outcome { report, ok: verdict == su11::pdm::Verdict::Pass })
}
