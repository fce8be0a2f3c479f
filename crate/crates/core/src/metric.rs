//! The z-parameterized family of metric operators for
//! `H = 2ωK₀ + 2αK₋ + 2βK₊`.
//!
//! For every admissible z ∈ [−1, 1] the Hermitian exponent
//! `A = 2εK₀ + 2ηK₋ + 2ηK₊` with `η = zε/2` makes `h = ρHρ⁻¹`, `ρ = exp(A)`,
//! Hermitian. A is proportional to `O = 2K₀ + z(K₊ + K₋)`, so ρ and O commute.

use std::fmt;

use crate::algebra::{adjoint_matrix, conjugate, AlgebraElement, C64};
use crate::error::{Error, Result};

/// Endpoint guard: μ and ν are only reported for |z| below this.
pub const MU_NU_Z_LIMIT: f64 = 1.0 - 1e-9;

/// Frequency ω and non-Hermitian couplings α (to K₋) and β (to K₊).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwansonParams {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl SwansonParams {
    /// Builds and validates.
    pub fn new(omega: f64, alpha: f64, beta: f64) -> Result<Self> {
        validate_params(Self { omega, alpha, beta })
    }

    /// `ω² − 4αβ`, the Casimir of H divided by 4.
    pub fn gap(&self) -> f64 {
        self.omega * self.omega - 4.0 * self.alpha * self.beta
    }

    /// `√(ω² − 4αβ)`, the oscillator frequency of the Hermitian counterpart.
    pub fn effective_frequency(&self) -> f64 {
        self.gap().sqrt()
    }

    pub fn hamiltonian(&self) -> AlgebraElement {
        AlgebraElement::oscillator(self.omega, self.alpha, self.beta)
    }
}

impl fmt::Display for SwansonParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "omega={}, alpha={}, beta={}", self.omega, self.alpha, self.beta)
    }
}

/// Checks `ω > 0`, `α ≠ β` and `ω² − 4αβ > 0`.
pub fn validate_params(p: SwansonParams) -> Result<SwansonParams> {
    let SwansonParams { omega, alpha, beta } = p;
    if !(omega.is_finite() && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidParams("omega, alpha and beta must be finite".into()));
    }
    if omega <= 0.0 {
        return Err(Error::InvalidParams(format!("constraint omega > 0 violated (omega = {omega})")));
    }
    if alpha == beta {
        return Err(Error::InvalidParams(format!(
            "constraint α ≠ β violated (alpha = beta = {alpha}); H would be Hermitian"
        )));
    }
    if p.gap() <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "constraint ω² − 4αβ > 0 violated (omega^2 - 4 alpha beta = {})",
            p.gap()
        )));
    }
    Ok(p)
}

/// An interval of the real line with independently open or closed ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_open { '(' } else { '[' };
        let r = if self.hi_open { ')' } else { ']' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// Admissible z values: |z| ≤ 1 and |(α − β)√(1 − z²)/(α + β − ωz)| < 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ZDomain {
    params: SwansonParams,
    pub intervals: Vec<Interval>,
}

impl ZDomain {
    pub fn contains(&self, z: f64) -> bool {
        z.abs() <= 1.0 && domain_margin(&self.params, z) > 0.0
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

impl fmt::Display for ZDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "empty");
        }
        let parts: Vec<String> = self.intervals.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

/// `(α + β − ωz)² − (α − β)²(1 − z²)`; positive exactly on the admissible set.
fn domain_margin(p: &SwansonParams, z: f64) -> f64 {
    let den = p.alpha + p.beta - p.omega * z;
    let diff = p.alpha - p.beta;
    den * den - diff * diff * (1.0 - z * z)
}

/// The margin is the quadratic `(ω² + (α−β)²)z² − 2ω(α+β)z + 4αβ`, whose
/// discriminant `4(α−β)²(ω² − 4αβ)` is positive for valid parameters, so the
/// excluded set is always a single closed interval between its roots.
pub fn z_domain(p: &SwansonParams) -> ZDomain {
    let diff = p.alpha - p.beta;
    let lead = p.omega * p.omega + diff * diff;
    let half_disc = diff.abs() * p.gap().max(0.0).sqrt();
    let mid = p.omega * (p.alpha + p.beta);
    let (z1, z2) = ((mid - half_disc) / lead, (mid + half_disc) / lead);

    let mut intervals = Vec::new();
    // left piece [−1, z1)
    if z1 > -1.0 {
        let hi_open = z1 <= 1.0;
        intervals.push(Interval { lo: -1.0, hi: z1.min(1.0), lo_open: false, hi_open });
    }
    // right piece (z2, 1]
    if z2 < 1.0 {
        let lo_open = z2 >= -1.0;
        intervals.push(Interval { lo: z2.max(-1.0), hi: 1.0, lo_open, hi_open: false });
    }
    ZDomain { params: *p, intervals }
}

fn ensure_admissible(p: &SwansonParams, z: f64) -> Result<()> {
    if !(z.abs() <= 1.0) {
        return Err(Error::ZOutOfDomain { z, reason: "|z| must not exceed 1".into() });
    }
    let den = p.alpha + p.beta - p.omega * z;
    if den == 0.0 {
        return Err(Error::ZOutOfDomain {
            z,
            reason: "alpha + beta - z omega vanishes (arctanh argument diverges)".into(),
        });
    }
    if domain_margin(p, z) <= 0.0 {
        return Err(Error::ZOutOfDomain {
            z,
            reason: format!("arctanh argument |(α − β)√(1 − z²)/(α + β − zω)| ≥ 1; admissible set is {}", z_domain(p)),
        });
    }
    Ok(())
}

/// `arctanh(x)/x`, finite and smooth through x = 0.
fn atanh_over_x(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 3.0 + x2 * x2 / 5.0
    } else {
        x.atanh() / x
    }
}

/// `ε(z) = arctanh[(α − β)√(1 − z²)/(α + β − zω)] / (2√(1 − z²))`.
///
/// Evaluated as `(arctanh x / x)·(α − β)/(2(α + β − zω))`, which is the same
/// quantity and reaches the endpoint limit `(α − β)/(2(α + β − zω))` smoothly.
pub fn solve_epsilon(p: &SwansonParams, z: f64) -> Result<f64> {
    ensure_admissible(p, z)?;
    let s = (1.0 - z * z).max(0.0).sqrt();
    let den = p.alpha + p.beta - p.omega * z;
    let x = (p.alpha - p.beta) * s / den;
    Ok(atanh_over_x(x) * (p.alpha - p.beta) / (2.0 * den))
}

/// Residual of the second Hermiticity condition
/// `tanh(2θ)/θ · ((α + β)ε − 2ωη) − (α − β)`, with θ = √(ε² − 4η²).
pub fn hermiticity_residual(p: &SwansonParams, epsilon: f64, eta: f64) -> Result<f64> {
    let theta_sq = epsilon * epsilon - 4.0 * eta * eta;
    if theta_sq < 0.0 {
        return Err(Error::TrigRegime { theta_sq });
    }
    let theta = theta_sq.sqrt();
    let ratio = if theta < 1e-4 {
        2.0 - 8.0 * theta_sq / 3.0
    } else {
        (2.0 * theta).tanh() / theta
    };
    Ok(ratio * ((p.alpha + p.beta) * epsilon - 2.0 * p.omega * eta) - (p.alpha - p.beta))
}

/// Coefficients (U, V, W) of `ρHρ⁻¹ = 2UK₀ + 2VK₋ + 2WK₊`.
pub fn transformed_coeffs(p: &SwansonParams, epsilon: f64, eta: C64) -> Result<[C64; 3]> {
    let h = AlgebraElement::real(p.omega, p.alpha, p.beta);
    Ok(adjoint_matrix(epsilon, eta)?.apply(&h).to_array())
}

/// μ and ν of the Hermitian counterpart, for admissible |z| < 1.
///
/// With `a = ω − (α + β)z` and `b = (α + β − ωz)·√(1 − (α − β)²(1 − z²)/(α + β − ωz)²)`,
/// `μ = (a − b)/((1 + z)ω)` and `ν = ω(a + b)/(1 − z)`. Since
/// `a² − b² = (ω² − 4αβ)(1 − z²)` and |a| > |b|, the cancelling one of a ± b is
/// obtained from the other through that identity.
pub fn mu_nu(p: &SwansonParams, z: f64) -> Result<(f64, f64)> {
    ensure_admissible(p, z)?;
    if z.abs() >= MU_NU_Z_LIMIT {
        return Err(Error::ZOutOfDomain {
            z,
            reason: "mu and nu have poles at |z| = 1; use conjugation for the endpoint Hamiltonian".into(),
        });
    }
    let om = p.omega;
    let sum_ab = p.alpha + p.beta;
    let den = sum_ab - om * z;
    let diff = p.alpha - p.beta;
    let a = om - sum_ab * z;
    let b = den.signum() * (den * den - diff * diff * (1.0 - z * z)).sqrt();
    let g = p.gap();
    if a * b >= 0.0 {
        let plus = a + b;
        Ok((g * (1.0 - z) / (om * plus), om * plus / (1.0 - z)))
    } else {
        let minus = a - b;
        Ok((minus / ((1.0 + z) * om), om * g * (1.0 + z) / minus))
    }
}

/// The closed forms specialised to the conformal coupling α = −β = c/4:
/// `μ = [1 + z(Ω²z² − c²/4)^{1/2}/(ω|z|)]/(1 + z)`,
/// `ν = ω²[1 − z(Ω²z² − c²/4)^{1/2}/(ω|z|)]/(1 − z)`, Ω² = ω² + c²/4.
pub fn conformal_mu_nu(omega: f64, c: f64, z: f64) -> Result<(f64, f64)> {
    let big_omega_sq = omega * omega + c * c / 4.0;
    let rad = big_omega_sq * z * z - c * c / 4.0;
    if z == 0.0 || rad < 0.0 || z.abs() >= MU_NU_Z_LIMIT {
        return Err(Error::ZOutOfDomain { z, reason: "requires c/(2Ω) ≤ |z| < 1".into() });
    }
    let t = z.signum() * rad.sqrt() / omega;
    Ok(((1.0 + t) / (1.0 + z), omega * omega * (1.0 - t) / (1.0 - z)))
}

/// `O = 2K₀ + z(K₊ + K₋)`.
pub fn observable_o(z: f64) -> Result<AlgebraElement> {
    if !(z.abs() <= 1.0) {
        return Err(Error::ZOutOfDomain { z, reason: "|z| must not exceed 1".into() });
    }
    Ok(AlgebraElement::real(2.0, z, z))
}

/// Exponent of ρ and, for |z| < 1, the base Λ with `ρ = Λ^{O/(4√(1 − z²))}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoExponent {
    pub exponent: AlgebraElement,
    pub lambda_base: Option<f64>,
}

/// `A = ε·O` together with
/// `Λ = (α + β − ωz + (α − β)√(1 − z²)) / (α + β − ωz − (α − β)√(1 − z²))`.
pub fn rho_exponent(p: &SwansonParams, z: f64) -> Result<RhoExponent> {
    let epsilon = solve_epsilon(p, z)?;
    let exponent = epsilon * observable_o(z)?;
    let s = (1.0 - z * z).max(0.0).sqrt();
    let lambda_base = (z.abs() < 1.0).then(|| {
        let den = p.alpha + p.beta - p.omega * z;
        let t = (p.alpha - p.beta) * s;
        (den + t) / (den - t)
    });
    Ok(RhoExponent { exponent, lambda_base })
}

/// Coefficients of h from μ, ν for |z| < 1; by conjugation at the endpoints.
pub fn h_element(p: &SwansonParams, z: f64) -> Result<AlgebraElement> {
    if z.abs() < MU_NU_Z_LIMIT {
        let (mu, nu) = mu_nu(p, z)?;
        let om = p.omega;
        let c0 = (nu + mu * om * om) / om;
        let c1 = (nu - mu * om * om) / (2.0 * om);
        return Ok(AlgebraElement::real(c0, c1, c1));
    }
    let a = rho_exponent(p, z)?.exponent;
    let h = conjugate(&a, &p.hamiltonian())?;
    Ok(AlgebraElement::real(h.c0.re, h.cm.re, h.cp.re))
}

/// All coefficient-level data of one member of the metric family.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSolution {
    pub params: SwansonParams,
    pub z: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub theta: f64,
    /// `None` at |z| = 1 where the closed forms have poles.
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    /// `None` at |z| = 1 where the power form is 0/0.
    pub lambda_base: Option<f64>,
    /// U, V, W as evaluated from the adjoint action.
    pub uvw: [C64; 3],
    pub h: AlgebraElement,
}

impl MetricSolution {
    pub fn solve(params: &SwansonParams, z: f64) -> Result<Self> {
        let params = validate_params(*params)?;
        let epsilon = solve_epsilon(&params, z)?;
        let eta = 0.5 * z * epsilon;
        let theta = epsilon.abs() * (1.0 - z * z).max(0.0).sqrt();
        let (mu, nu) = match mu_nu(&params, z) {
            Ok((m, n)) => (Some(m), Some(n)),
            Err(_) => (None, None),
        };
        let lambda_base = rho_exponent(&params, z)?.lambda_base;
        let uvw = transformed_coeffs(&params, epsilon, C64::new(eta, 0.0))?;
        let h = h_element(&params, z)?;
        Ok(Self { params, z, epsilon, eta, theta, mu, nu, lambda_base, uvw, h })
    }

    pub fn exponent(&self) -> AlgebraElement {
        AlgebraElement::metric_exponent(self.epsilon, C64::new(self.eta, 0.0))
    }

    pub fn observable(&self) -> AlgebraElement {
        AlgebraElement::real(2.0, self.z, self.z)
    }

    pub fn hamiltonian(&self) -> AlgebraElement {
        self.params.hamiltonian()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{conjugate, AlgebraElement};

    fn swanson() -> SwansonParams {
        SwansonParams::new(1.0, 0.2, 0.1).unwrap()
    }

    /// The closed-form μ, ν expressions evaluated as written, without rearrangement.
    fn mu_nu_verbatim(p: &SwansonParams, z: f64) -> (f64, f64) {
        let (w, a, b) = (p.omega, p.alpha, p.beta);
        let den = a + b - w * z;
        let r = (1.0 - (a - b).powi(2) * (1.0 - z * z) / den.powi(2)).sqrt();
        let mu = (w - (a + b) * z - den * r) / ((1.0 + z) * w);
        let nu = w * (w - (a + b) * z + den * r) / (1.0 - z);
        (mu, nu)
    }

    #[test]
    fn validate_examples() {
        assert!(SwansonParams::new(1.0, 0.2, 0.1).is_ok());
        let e = SwansonParams::new(1.0, 0.3, 0.3).unwrap_err();
        assert!(matches!(&e, Error::InvalidParams(m) if m.contains("α ≠ β")));
        let e = SwansonParams::new(1.0, 2.0, 2.5).unwrap_err();
        assert!(matches!(&e, Error::InvalidParams(m) if m.contains("ω² − 4αβ")));
        assert!(SwansonParams::new(-1.0, 0.2, 0.1).is_err());
    }

    #[test]
    fn z_domain_swanson_excludes_gap_around_pole() {
        let p = swanson();
        let d = z_domain(&p);
        assert!(!d.contains(0.3));
        assert!(d.contains(0.0) && d.contains(-1.0) && d.contains(1.0));
        assert_eq!(d.intervals.len(), 2);
        // dense-scan oracle on the arctanh argument
        let n = 20001;
        for i in 0..n {
            let z = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            let den = p.alpha + p.beta - p.omega * z;
            let arg = (p.alpha - p.beta) * (1.0 - z * z).sqrt() / den;
            let expect = den != 0.0 && arg.abs() < 1.0;
            if (arg.abs() - 1.0).abs() > 1e-9 {
                assert_eq!(d.contains(z), expect, "z = {z}");
            }
        }
        // roots of (ω² + (α−β)²)z² − 2ω(α+β)z + 4αβ, evaluated independently
        assert!((d.intervals[0].hi - 0.2020627421126194).abs() < 1e-12);
        assert!((d.intervals[1].lo - 0.3919966638279746).abs() < 1e-12);
    }

    #[test]
    fn z_domain_conformal() {
        let p = SwansonParams::new(1.0, 0.25, -0.25).unwrap();
        let d = z_domain(&p);
        let edge = 1.0 / (2.0 * 1.25f64.sqrt());
        assert!((d.intervals[0].hi + edge).abs() < 1e-12);
        assert!((d.intervals[1].lo - edge).abs() < 1e-12);
        assert!(d.contains(edge + 1e-6) && !d.contains(edge - 1e-6) && !d.contains(0.0));
        assert!(d.contains(1.0) && d.contains(-1.0));
    }

    #[test]
    fn endpoints_excluded_when_alpha_plus_beta_equals_omega() {
        let p = SwansonParams::new(1.0, 0.6, 0.4).unwrap();
        let d = z_domain(&p);
        assert!(!d.contains(1.0));
        assert!(d.contains(-1.0));
    }

    #[test]
    fn solve_epsilon_examples() {
        let p = swanson();
        let e0 = solve_epsilon(&p, 0.0).unwrap();
        assert!((e0 - 0.25 * 2f64.ln()).abs() < 1e-15);
        assert!(hermiticity_residual(&p, e0, 0.0).unwrap().abs() < 1e-12);

        let e1 = solve_epsilon(&p, 1.0).unwrap();
        assert!((e1 - 0.1 / (2.0 * (0.3 - 1.0))).abs() < 1e-15);
        // limit check from the interior
        let near = solve_epsilon(&p, 1.0 - 1e-8).unwrap();
        assert!((near - e1).abs() < 1e-7);

        assert!(matches!(solve_epsilon(&p, 0.3), Err(Error::ZOutOfDomain { .. })));
        assert!(matches!(solve_epsilon(&p, 1.5), Err(Error::ZOutOfDomain { .. })));
    }

    #[test]
    fn hermiticity_residual_vanishes_on_family() {
        let p = swanson();
        for z in [-0.95, -0.5, -0.1, 0.15, 0.2, 0.45, 0.7, 0.99] {
            let e = solve_epsilon(&p, z).unwrap();
            let r = hermiticity_residual(&p, e, 0.5 * z * e).unwrap();
            assert!(r.abs() < 1e-12, "z={z} r={r}");
        }
    }

    #[test]
    fn transformed_coeffs_examples() {
        let p = swanson();
        let e = 0.25 * 2f64.ln();
        let [u, v, w] = transformed_coeffs(&p, e, C64::new(0.0, 0.0)).unwrap();
        assert!((u - 1.0).norm() < 1e-15);
        assert!((v - 0.2 * (-2.0 * e).exp()).norm() < 1e-15);
        assert!((w - 0.1 * (2.0 * e).exp()).norm() < 1e-15);
        assert!((v - 0.1414213562373095).norm() < 1e-12);

        let [u0, v0, w0] = transformed_coeffs(&p, 0.0, C64::new(0.0, 0.0)).unwrap();
        assert_eq!([u0.re, v0.re, w0.re], [1.0, 0.2, 0.1]);

        // η = 0 case through the algebra layer
        let h = conjugate(&AlgebraElement::metric_exponent(e, C64::new(0.0, 0.0)), &p.hamiltonian()).unwrap();
        assert!((h.cm - 2.0 * v).norm() < 1e-15);
    }

    #[test]
    fn mu_nu_examples() {
        let p = swanson();
        let (mu, nu) = mu_nu(&p, 0.0).unwrap();
        assert!((mu - (1.0 - 0.08f64.sqrt())).abs() < 1e-15);
        assert!((nu - (1.0 + 0.08f64.sqrt())).abs() < 1e-15);
        let h = h_element(&p, 0.0).unwrap();
        assert!((h.c0.re - 2.0).abs() < 1e-15);
        assert!((h.cm.re - 0.282842712474619).abs() < 1e-15);
        assert!((h.casimir().re - 3.68).abs() < 1e-14);

        for i in 0..50 {
            let z = -0.98 + 1.96 * i as f64 / 49.0;
            let Ok((mu, nu)) = mu_nu(&p, z) else { continue };
            assert!((mu * nu - 0.92).abs() < 1e-12);
            let (vm, vn) = mu_nu_verbatim(&p, z);
            assert!((mu - vm).abs() < 1e-12 * mu.abs().max(1.0), "z={z}");
            assert!((nu - vn).abs() < 1e-12 * nu.abs().max(1.0), "z={z}");
        }
        assert!(mu_nu(&p, 1.0).is_err());
    }

    #[test]
    fn conformal_closed_form_matches_general() {
        let (omega, c) = (1.0, 1.0);
        let p = SwansonParams::new(omega, c / 4.0, -c / 4.0).unwrap();
        for z in [-0.9, -0.6, -0.46, 0.46, 0.6, 0.9] {
            let (mu, nu) = mu_nu(&p, z).unwrap();
            let (cm, cn) = conformal_mu_nu(omega, c, z).unwrap();
            assert!((mu - cm).abs() < 1e-13 && (nu - cn).abs() < 1e-13, "z={z}");
        }
        assert!(conformal_mu_nu(omega, c, 0.2).is_err());
    }

    #[test]
    fn rho_exponent_examples() {
        let p = swanson();
        let r = rho_exponent(&p, 0.0).unwrap();
        assert!((r.exponent.c0.re - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert_eq!(r.exponent.cm.re, 0.0);
        assert!((r.lambda_base.unwrap() - 2.0).abs() < 1e-15);

        let o = observable_o(0.6).unwrap();
        let a = rho_exponent(&p, 0.6).unwrap();
        assert_eq!(a.exponent.commutator(&o), AlgebraElement::ZERO);
        let eps = solve_epsilon(&p, 0.6).unwrap();
        let s = (1.0f64 - 0.36).sqrt();
        assert!((a.lambda_base.unwrap().ln() / (4.0 * s) - eps).abs() < 1e-14);

        let r1 = rho_exponent(&p, 1.0).unwrap();
        assert!(r1.lambda_base.is_none());
        let e1 = solve_epsilon(&p, 1.0).unwrap();
        assert_eq!(r1.exponent, AlgebraElement::real(2.0 * e1, e1, e1));
    }

    #[test]
    fn observable_examples() {
        assert_eq!(observable_o(0.0).unwrap(), 2.0 * AlgebraElement::k0());
        assert_eq!(observable_o(1.0).unwrap(), AlgebraElement::real(2.0, 1.0, 1.0));
        let o = observable_o(0.37).unwrap();
        assert!((o.casimir().re - 4.0 * (1.0 - 0.37 * 0.37)).abs() < 1e-15);
        assert!(observable_o(1.2).is_err());
    }

    #[test]
    fn h_matches_conjugation_including_endpoints() {
        let p = swanson();
        for z in [-1.0, -0.7, 0.0, 0.1, 0.5, 1.0] {
            let h = h_element(&p, z).unwrap();
            let a = rho_exponent(&p, z).unwrap().exponent;
            let hc = conjugate(&a, &p.hamiltonian()).unwrap();
            assert!(h.max_abs_diff(&hc) < 1e-10 * hc.max_abs(), "z={z}");
            assert!(h.is_hermitian(1e-14));
        }
    }

    #[test]
    fn metric_solution_invariants() {
        let p = swanson();
        let s = MetricSolution::solve(&p, -0.4).unwrap();
        assert!((s.eta - 0.5 * s.z * s.epsilon).abs() < 1e-16);
        assert!((s.theta - s.epsilon.abs() * (1.0f64 - 0.16).sqrt()).abs() < 1e-16);
        let [u, v, w] = s.uvw;
        assert!(u.im.abs() < 1e-15 && (w - v.conj()).norm() < 1e-12);
        let cas = u * u - 4.0 * v * w;
        assert!((cas.re - 0.92).abs() < 1e-12);
        assert!((s.mu.unwrap() * s.nu.unwrap() - 0.92).abs() < 1e-12);

        let end = MetricSolution::solve(&p, -1.0).unwrap();
        assert!(end.mu.is_none() && end.lambda_base.is_none());
    }
}
