//! Materialized operator bundle and residual diagnostics.
//!
//! ρ = exp(A) is unbounded, and for large ε the truncated spectral exponential
//! of A diverges from the true operator even on the leading block. The bundle
//! therefore builds ρ, ρ⁻¹ and ζ₊ = ρ² from the normal-ordered product
//! `exp(pK₊)·exp(qK₀)·exp(pK₋)`. Because K₊ is a strictly lower-triangular
//! shift, each matrix element `⟨m|·|n⟩` is a finite sum over j ≤ min(m, n) and is
//! computed exactly. Only the leading rows that the trusted-block products need
//! are formed, over all N columns.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{metric_pivots, AlgebraElement, PIVOT_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::{exp_symmetric, relative_distance, symmetric_eigs};
use crate::precise::{block_min_eigenvalue, inverse_diagnostics};
use crate::metric::{rho_exponent, validate_params, MetricSolution, SwansonParams};
use crate::realization::{materialize, RealizationMatrices};

/// Residual thresholds used by [`OperatorBundle::failures`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub herm: f64,
    pub eq10: f64,
    pub intertwine: f64,
    pub quasi: f64,
    pub commute: f64,
    pub eigvec: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { herm: 1e-6, eq10: 1e-7, intertwine: 1e-6, quasi: 1e-6, commute: 1e-12, eigvec: 1e-5 }
    }
}

/// Relative spectral-norm residuals on the trusted block. A residual that
/// needs an operator whose Fock matrix elements diverge is `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// ρHρ⁻¹ against its transpose.
    pub herm: f64,
    /// ρHρ⁻¹ against h built from μ, ν.
    pub eq10: f64,
    /// hρ against ρH.
    pub intertwine: f64,
    /// ζ₊H against Hᵀζ₊.
    pub quasi: f64,
    /// ρO against Oρ.
    pub commute: f64,
    /// ρρ⁻¹ against the identity.
    pub inverse: f64,
    /// Largest `‖(H − λ)φ‖/(|λ|‖φ‖)` over the reconstructed eigenvectors φ = ρ⁻¹ψ.
    pub eigvec: f64,
}

impl Residuals {
    pub fn entries(&self) -> [(&'static str, f64); 7] {
        [
            ("r_herm", self.herm),
            ("r_eq10", self.eq10),
            ("r_intertwine", self.intertwine),
            ("r_quasi", self.quasi),
            ("r_commute", self.commute),
            ("r_inverse", self.inverse),
            ("r_eigvec", self.eigvec),
        ]
    }
}

/// Leading rows of a metric-form group element exp(2εK₀ + 2ηK₋ + 2ηK₊).
#[derive(Debug, Clone)]
pub struct LeadingRows {
    /// Rows 0..R over all N columns.
    pub rows: DMatrix<f64>,
    /// `e^{q·k₀(j)}` for j < R; the diagonal of the exact LDLᵀ factorization.
    pub pivots: Vec<f64>,
    pub p: f64,
    pub q: f64,
}

/// Exact leading rows of `exp(2εK₀ + 2η(K₊ + K₋))` in a lowest-weight realization.
///
/// Returns `None` when the normal-ordering pivot `cosh θ − ε sinh θ/θ` is not
/// positive (the matrix elements diverge) or an entry overflows.
pub fn metric_rows(r: &RealizationMatrices, epsilon: f64, eta: f64, nrows: usize) -> Result<Option<LeadingRows>> {
    let theta_sq = epsilon * epsilon - 4.0 * eta * eta;
    if theta_sq < 0.0 {
        return Err(Error::TrigRegime { theta_sq });
    }
    let n = r.dim;
    let nrows = nrows.min(n);
    let (pivot, _, shc) = metric_pivots(epsilon, eta * eta);
    if !(pivot > PIVOT_TOLERANCE) {
        return Ok(None);
    }
    let p = 2.0 * eta * shc / pivot;
    let q = -2.0 * pivot.ln();

    // L = exp(pK₊) restricted to columns 0..R, summed term by term; K₊ is nilpotent.
    let nonzeros: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .filter_map(|(i, j)| {
            let v = r.kp[(i, j)];
            (v != 0.0).then_some((i, j, v))
        })
        .collect();
    let mut lower = DMatrix::<f64>::zeros(n, nrows);
    let mut term = DMatrix::<f64>::zeros(n, nrows);
    for j in 0..nrows {
        lower[(j, j)] = 1.0;
        term[(j, j)] = 1.0;
    }
    for d in 1..=n {
        let mut next = DMatrix::<f64>::zeros(n, nrows);
        let coef = p / d as f64;
        for &(i, j, v) in &nonzeros {
            for c in 0..nrows {
                next[(i, c)] += coef * v * term[(j, c)];
            }
        }
        if next.iter().all(|v| *v == 0.0) {
            break;
        }
        lower += &next;
        term = next;
    }

    let pivots: Vec<f64> = (0..nrows).map(|j| (q * r.k0[(j, j)]).exp()).collect();
    let mut scaled = lower.rows(0, nrows).into_owned();
    for (j, d) in pivots.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*d);
    }
    let rows = scaled * lower.transpose();
    if rows.iter().any(|v| !v.is_finite()) || pivots.iter().any(|v| !v.is_finite()) {
        return Ok(None);
    }
    Ok(Some(LeadingRows { rows, pivots, p, q }))
}

/// Truncated spectral exponential exp(A), for cross-checks at moderate ε.
pub fn rho_spectral(params: &SwansonParams, z: f64, r: &RealizationMatrices) -> Result<DMatrix<f64>> {
    let a = rho_exponent(params, z)?.exponent;
    exp_symmetric(&materialize(&a, r)?, 1.0)
}

/// `Λ^{O/(4√(1 − z²))}` through the spectral decomposition of O; |z| < 1 only.
pub fn rho_power_form(params: &SwansonParams, z: f64, r: &RealizationMatrices) -> Result<DMatrix<f64>> {
    let lambda = rho_exponent(params, z)?.lambda_base.ok_or_else(|| Error::ZOutOfDomain {
        z,
        reason: "the power form needs |z| < 1".into(),
    })?;
    let o = materialize(&AlgebraElement::real(2.0, z, z), r)?;
    exp_symmetric(&o, lambda.ln() / (4.0 * (1.0 - z * z).sqrt()))
}

/// `2√(ω² − 4αβ)·(n + k)` for n = 0..count.
pub fn spectrum_prediction(p: &SwansonParams, k: f64, count: usize) -> Result<Vec<f64>> {
    spectrum_prediction_merged(p, &[k], count)
}

/// The lowest `count` values of the union of the ladders with lowest weights `ks`.
pub fn spectrum_prediction_merged(p: &SwansonParams, ks: &[f64], count: usize) -> Result<Vec<f64>> {
    if !(p.gap() > 0.0) {
        return Err(Error::InvalidParams(format!(
            "constraint ω² − 4αβ > 0 violated (omega^2 - 4 alpha beta = {})",
            p.gap()
        )));
    }
    let f = 2.0 * p.effective_frequency();
    let mut all: Vec<f64> = ks.iter().flat_map(|&k| (0..count).map(move |n| f * (n as f64 + k))).collect();
    all.sort_by(f64::total_cmp);
    all.truncate(count);
    Ok(all)
}

/// Everything materialized for one (parameters, z, realization) point.
#[derive(Debug, Clone)]
pub struct OperatorBundle {
    pub solution: MetricSolution,
    pub dim: usize,
    pub trusted: usize,
    /// Number of leading rows materialized for ρ, ρ⁻¹ and ζ₊.
    pub rows: usize,
    pub h: DMatrix<f64>,
    pub o: DMatrix<f64>,
    /// h from its coefficients; symmetric by construction.
    pub h_direct: DMatrix<f64>,
    pub rho: Option<LeadingRows>,
    pub rho_inv: Option<LeadingRows>,
    pub zeta_plus: Option<LeadingRows>,
    /// ρHρ⁻¹ on the trusted block.
    pub h_conj: Option<DMatrix<f64>>,
    /// Smallest eigenvalue of the trusted block of ζ₊, by extended-precision inverse iteration.
    pub zeta_min_eigenvalue: Option<f64>,
    /// MPFR precision used for the ρ⁻¹ products, when they were formed.
    pub precision_bits: Option<u32>,
    /// Lowest eigenvalues of h.
    pub spectrum: Vec<f64>,
    pub residuals: Residuals,
}

impl OperatorBundle {
    /// ζ₊ restricted to the trusted block equals L·D·Lᵀ with unit lower-triangular
    /// L, so it is positive definite exactly when every pivot D_j is positive.
    pub fn zeta_positive_definite(&self) -> bool {
        self.zeta_plus
            .as_ref()
            .map(|z| z.pivots[..self.trusted.min(z.pivots.len())].iter().all(|d| *d > 0.0 && d.is_finite()))
            .unwrap_or(false)
    }

    pub fn zeta_min_pivot(&self) -> Option<f64> {
        self.zeta_plus
            .as_ref()
            .map(|z| z.pivots[..self.trusted.min(z.pivots.len())].iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Violated checks, empty when the point passes.
    pub fn failures(&self, tol: &Tolerances) -> Vec<String> {
        let r = &self.residuals;
        let checks = [
            ("r_herm", r.herm, tol.herm),
            ("r_eq10", r.eq10, tol.eq10),
            ("r_intertwine", r.intertwine, tol.intertwine),
            ("r_quasi", r.quasi, tol.quasi),
            ("r_commute", r.commute, tol.commute),
            ("r_eigvec", r.eigvec, tol.eigvec),
        ];
        let mut out: Vec<String> = checks
            .iter()
            .filter(|(_, v, t)| !(v <= t))
            .map(|(name, v, t)| format!("{name} = {v:e} exceeds {t:e}"))
            .collect();
        if !self.zeta_positive_definite() {
            out.push("zeta_plus is not positive definite on the trusted block".into());
        }
        out
    }

    pub fn passes(&self, tol: &Tolerances) -> bool {
        self.failures(tol).is_empty()
    }
}

/// Builds the bundle on a realization with `dim = N` and trusted block T.
pub fn build_bundle(
    params: &SwansonParams,
    z: f64,
    real: &RealizationMatrices,
    trusted: usize,
    spectrum_count: usize,
) -> Result<OperatorBundle> {
    let params = validate_params(*params)?;
    let n = real.dim;
    let shift = real.shift();
    if trusted < 2 || trusted + shift > n {
        return Err(Error::TruncationTooSmall { dim: n, trusted });
    }
    if !real.is_lowest_weight_form() {
        return Err(Error::InvalidParams(
            "realization must have diagonal increasing K0 and strictly lower-triangular K+".into(),
        ));
    }
    if spectrum_count > trusted / 2 {
        return Err(Error::InvalidParams(format!("spectrum count {spectrum_count} exceeds T/2 = {}", trusted / 2)));
    }
    let solution = MetricSolution::solve(&params, z)?;
    let (eps, eta) = (solution.epsilon, solution.eta);
    let t = trusted;
    let rows = t + shift;

    let h = materialize(&params.hamiltonian(), real)?;
    let o = materialize(&solution.observable(), real)?;
    let h_direct = materialize(&solution.h, real)?;

    let rho = metric_rows(real, eps, eta, rows)?;
    let rho_inv = metric_rows(real, -eps, -eta, rows)?;
    let zeta_plus = metric_rows(real, 2.0 * eps, 2.0 * eta, rows)?;

    let lead = |m: &DMatrix<f64>, a: usize, b: usize| m.view((0, 0), (a, b)).into_owned();

    // hρ = ρH, both sides exact on the trusted block since h and H are banded.
    let intertwine = rho.as_ref().map_or(f64::INFINITY, |rr| {
        let lhs = lead(&h_direct, t, rows) * lead(&rr.rows, rows, t);
        let rhs = lead(&rr.rows, t, n) * lead(&h, n, t);
        relative_distance(&lhs, &rhs)
    });
    let commute = rho.as_ref().map_or(f64::INFINITY, |rr| {
        let lhs = lead(&rr.rows, t, n) * lead(&o, n, t);
        let rhs = lead(&o, t, rows) * lead(&rr.rows, rows, t);
        relative_distance(&lhs, &rhs)
    });
    let quasi = zeta_plus.as_ref().map_or(f64::INFINITY, |zz| {
        let lhs = lead(&zz.rows, t, n) * lead(&h, n, t);
        let rhs = lead(&h.transpose(), t, rows) * lead(&zz.rows, rows, t);
        relative_distance(&lhs, &rhs)
    });

    let eig = symmetric_eigs(&h_direct)?;
    let spectrum: Vec<f64> = eig.values.iter().take(spectrum_count).copied().collect();

    // Everything involving ρ⁻¹ cancels across the full pivot range of ρ and
    // ρ⁻¹, so it is evaluated at a precision chosen from that range.
    let diagnostics = match (&rho, &rho_inv) {
        (Some(_), Some(_)) => {
            let pairs: Vec<(f64, DVector<f64>)> =
                spectrum.iter().enumerate().map(|(i, &lam)| (lam, eig.vectors.column(i).into_owned())).collect();
            inverse_diagnostics(real, eps, eta, &params.hamiltonian(), &solution.h, t, rows, &pairs)
        }
        _ => None,
    };
    let precision_bits = diagnostics.as_ref().map(|d| d.bits);
    let (h_conj, herm, eq10, inverse, eigvec) = match diagnostics {
        Some(d) => {
            let herm = relative_distance(&d.h_conj, &d.h_conj.transpose());
            let eq10 = relative_distance(&d.h_conj, &lead(&h_direct, t, t));
            let inverse = relative_distance(&d.rho_rho_inv, &DMatrix::identity(t, t));
            let eigvec = d.eigvec.iter().copied().fold(0.0, f64::max);
            (Some(d.h_conj), herm, eq10, inverse, eigvec)
        }
        None => (None, f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY),
    };

    let zeta_min_eigenvalue = zeta_plus.as_ref().and_then(|_| block_min_eigenvalue(real, 2.0 * eps, 2.0 * eta, t));

    Ok(OperatorBundle {
        solution,
        dim: n,
        trusted: t,
        rows,
        h,
        o,
        h_direct,
        rho,
        rho_inv,
        zeta_plus,
        h_conj,
        zeta_min_eigenvalue,
        precision_bits,
        spectrum,
        residuals: Residuals { herm, eq10, intertwine, quasi, commute, inverse, eigvec },
    })
}
