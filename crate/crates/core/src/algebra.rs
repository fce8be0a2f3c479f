//! Representation-independent su(1,1) / sl(2) algebra.
//!
//! Elements are coefficient triples over the basis (K₀, K₋, K₊) with
//!
//! ```text
//! [K₀, K±] = ±K±      [K₊, K₋] = −2K₀      K₀† = K₀      K±† = K∓
//! ```
//!
//! Group-level questions (exponentials, ordered factorizations, adjoint
//! action) are answered in the faithful 2×2 defining representation
//!
//! ```text
//! σ(K₀) = ½ diag(1, −1)    σ(K₊) = [[0, 1], [0, 0]]    σ(K₋) = [[0, 0], [−1, 0]]
//! ```
//!
//! and carried back to any other realization through the commutation
//! relations alone.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Pivots below this magnitude make a Gauss decomposition singular.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// Below this |θ| the hyperbolic quotients are evaluated by their series.
const SERIES_THRESHOLD: f64 = 1e-4;

const fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `c0·K₀ + cm·K₋ + cp·K₊` with complex coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraElement {
    pub c0: C64,
    pub cm: C64,
    pub cp: C64,
}

impl AlgebraElement {
    pub const ZERO: Self = Self { c0: c(0.0), cm: c(0.0), cp: c(0.0) };

    pub fn new(c0: C64, cm: C64, cp: C64) -> Self {
        Self { c0, cm, cp }
    }

    pub fn real(c0: f64, cm: f64, cp: f64) -> Self {
        Self::new(c(c0), c(cm), c(cp))
    }

    pub fn k0() -> Self {
        Self::real(1.0, 0.0, 0.0)
    }

    pub fn km() -> Self {
        Self::real(0.0, 1.0, 0.0)
    }

    pub fn kp() -> Self {
        Self::real(0.0, 0.0, 1.0)
    }

    /// `2ωK₀ + 2αK₋ + 2βK₊`.
    pub fn oscillator(omega: f64, alpha: f64, beta: f64) -> Self {
        Self::real(2.0 * omega, 2.0 * alpha, 2.0 * beta)
    }

    /// Hermitian exponent `2εK₀ + 2ηK₋ + 2η*K₊`.
    pub fn metric_exponent(epsilon: f64, eta: C64) -> Self {
        Self::new(c(2.0 * epsilon), 2.0 * eta, 2.0 * eta.conj())
    }

    /// Recovers (ε, η) from an exponent of metric form, if it is one.
    pub fn as_metric_exponent(&self, tol: f64) -> Option<(f64, C64)> {
        let scale = self.max_abs().max(1.0);
        let herm = self.c0.im.abs() <= tol * scale && (self.cp - self.cm.conj()).norm() <= tol * scale;
        herm.then(|| (0.5 * self.c0.re, 0.5 * self.cm))
    }

    /// Quadratic Casimir form `c0² − 4·cp·cm`, invariant under conjugation.
    pub fn casimir(&self) -> C64 {
        self.c0 * self.c0 - 4.0 * self.cp * self.cm
    }

    /// Whether the element represents a Hermitian operator in a unitary realization.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.as_metric_exponent(tol).is_some()
    }

    /// Lie bracket computed from the structure constants.
    pub fn commutator(&self, other: &Self) -> Self {
        let (x, y) = (self, other);
        Self {
            c0: 2.0 * (x.cm * y.cp - x.cp * y.cm),
            cm: x.cm * y.c0 - x.c0 * y.cm,
            cp: x.c0 * y.cp - x.cp * y.c0,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(s * self.c0, s * self.cm, s * self.cp)
    }

    pub fn max_abs(&self) -> f64 {
        self.c0.norm().max(self.cm.norm()).max(self.cp.norm())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn to_array(&self) -> [C64; 3] {
        [self.c0, self.cm, self.cp]
    }

    pub fn from_array(a: [C64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl Add for AlgebraElement {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.c0 + o.c0, self.cm + o.cm, self.cp + o.cp)
    }
}

impl Sub for AlgebraElement {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.c0 - o.c0, self.cm - o.cm, self.cp - o.cp)
    }
}

impl Neg for AlgebraElement {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(c(-1.0))
    }
}

impl Mul<AlgebraElement> for f64 {
    type Output = AlgebraElement;
    fn mul(self, x: AlgebraElement) -> AlgebraElement {
        x.scale(c(self))
    }
}

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefiningMatrix {
    pub m: [[C64; 2]; 2],
}

impl DefiningMatrix {
    pub fn new(m11: C64, m12: C64, m21: C64, m22: C64) -> Self {
        Self { m: [[m11, m12], [m21, m22]] }
    }

    pub fn identity() -> Self {
        Self::new(c(1.0), c(0.0), c(0.0), c(1.0))
    }

    pub fn zero() -> Self {
        Self::new(c(0.0), c(0.0), c(0.0), c(0.0))
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        let [[a, b], [cc, dd]] = self.m;
        Some(Self::new(dd / d, -b / d, -cc / d, a / d))
    }

    pub fn scale(&self, s: C64) -> Self {
        let [[a, b], [cc, d]] = self.m;
        Self::new(s * a, s * b, s * cc, s * d)
    }

    /// Coefficients of a traceless matrix in the (K₀, K₋, K₊) basis.
    pub fn to_element(&self) -> AlgebraElement {
        AlgebraElement::new(self.m[0][0] - self.m[1][1], -self.m[1][0], self.m[0][1])
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        // eigenvalues of M†M from trace and determinant
        let [[a, b], [cc, d]] = self.m;
        let fro2 = a.norm_sqr() + b.norm_sqr() + cc.norm_sqr() + d.norm_sqr();
        let det2 = self.det().norm_sqr();
        let disc = (fro2 * fro2 - 4.0 * det2).max(0.0);
        (0.5 * (fro2 + disc.sqrt())).sqrt()
    }
}

impl Mul for DefiningMatrix {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = self.m;
        let b = o.m;
        let mut r = [[c(0.0); 2]; 2];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self { m: r }
    }
}

impl Add for DefiningMatrix {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (self.m, o.m);
        Self::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for DefiningMatrix {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o.scale(c(-1.0))
    }
}

/// σ(x) = c0·σ(K₀) + cm·σ(K₋) + cp·σ(K₊).
pub fn defining_rep(x: &AlgebraElement) -> DefiningMatrix {
    DefiningMatrix::new(0.5 * x.c0, x.cp, -x.cm, -0.5 * x.c0)
}

/// `(cosh θ, sinh θ / θ)` as functions of θ², valid on both sides of zero.
pub fn cosh_sinhc(theta_sq: C64) -> (C64, C64) {
    let theta = theta_sq.sqrt();
    if theta.norm() < SERIES_THRESHOLD {
        let t2 = theta_sq;
        let t4 = t2 * t2;
        (1.0 + t2 / 2.0 + t4 / 24.0, 1.0 + t2 / 6.0 + t4 / 120.0)
    } else {
        (theta.cosh(), theta.sinh() / theta)
    }
}

/// Real-θ specialisation of [`cosh_sinhc`].
pub fn cosh_sinhc_real(theta_sq: f64) -> (f64, f64) {
    debug_assert!(theta_sq >= 0.0);
    let theta = theta_sq.sqrt();
    if theta < SERIES_THRESHOLD {
        let t4 = theta_sq * theta_sq;
        (1.0 + theta_sq / 2.0 + t4 / 24.0, 1.0 + theta_sq / 6.0 + t4 / 120.0)
    } else {
        (theta.cosh(), theta.sinh() / theta)
    }
}

/// Gauss pivots `(cosh θ − εS, cosh θ + εS, S)` of exp(2εK₀ + 2ηK₋ + 2η*K₊),
/// S = sinh θ/θ, θ² = ε² − 4|η|² ≥ 0.
///
/// The pivot on the side of the sign of ε is formed as e^{−θ} − 4|η|²S/(θ + |ε|),
/// which equals cosh θ − |ε|S but avoids subtracting two numbers of size e^θ.
pub fn metric_pivots(epsilon: f64, eta_sq: f64) -> (f64, f64, f64) {
    let theta_sq = (epsilon * epsilon - 4.0 * eta_sq).max(0.0);
    let (ch, shc) = cosh_sinhc_real(theta_sq);
    let theta = theta_sq.sqrt();
    let tilt = if eta_sq == 0.0 { 0.0 } else { 4.0 * eta_sq * shc / (theta + epsilon.abs()) };
    let small = (-theta).exp() - tilt;
    let large = ch + epsilon.abs() * shc;
    if epsilon >= 0.0 {
        (small, large, shc)
    } else {
        (large, small, shc)
    }
}

/// Closed-form exponential of σ(x): `cosh θ·I + (sinh θ/θ)·σ(x)`, θ² = −det σ(x).
///
/// σ(x) is traceless, so σ(x)² = θ²·I. For θ² < 0 the quotients become
/// `cos φ` and `sin φ/φ` with θ = iφ.
pub fn exp_defining(x: &AlgebraElement) -> DefiningMatrix {
    let s = defining_rep(x);
    let theta_sq = -s.det();
    let (ch, shc) = cosh_sinhc(theta_sq);
    DefiningMatrix::identity().scale(ch) + s.scale(shc)
}

/// Operator ordering of a disentangled group element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    /// `exp(pK₊) exp(qK₀) exp(rK₋)`
    Normal,
    /// `exp(rK₋) exp(qK₀) exp(pK₊)`
    Antinormal,
}

/// Disentanglement parameters. In antinormal ordering `p`, `q`, `r` hold p′, q′, r′.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factorization {
    pub p: C64,
    pub q: C64,
    pub r: C64,
    pub ordering: Ordering,
}

impl Factorization {
    pub fn identity(ordering: Ordering) -> Self {
        Self { p: c(0.0), q: c(0.0), r: c(0.0), ordering }
    }

    /// Multiplies the three single-generator factors back together in the defining rep.
    pub fn to_defining(&self) -> DefiningMatrix {
        let one = c(1.0);
        let zero = c(0.0);
        let ep = DefiningMatrix::new(one, self.p, zero, one);
        let eq = DefiningMatrix::new((0.5 * self.q).exp(), zero, zero, (-0.5 * self.q).exp());
        let er = DefiningMatrix::new(one, zero, -self.r, one);
        match self.ordering {
            Ordering::Normal => ep * eq * er,
            Ordering::Antinormal => er * eq * ep,
        }
    }

    /// The pivot `e^{−q/2}` (normal) or `e^{q/2}` (antinormal) of the Gauss decomposition.
    pub fn pivot(&self) -> C64 {
        match self.ordering {
            Ordering::Normal => (-0.5 * self.q).exp(),
            Ordering::Antinormal => (0.5 * self.q).exp(),
        }
    }
}

/// Reads the ordered factorization off a 2×2 group matrix.
///
/// Normal ordering pivots on m22 (`e^{−q/2} = m22`, `p = m12/m22`,
/// `r = −m21/m22`); antinormal on m11 (`e^{q′/2} = m11`, `p′ = m12/m11`,
/// `r′ = −m21/m11`). The minus signs on r come from σ(K₋) = [[0,0],[−1,0]].
pub fn gauss_decompose(m: &DefiningMatrix, ordering: Ordering) -> Result<Factorization> {
    let [[m11, m12], [m21, m22]] = m.m;
    let pivot = match ordering {
        Ordering::Normal => m22,
        Ordering::Antinormal => m11,
    };
    if pivot.norm() < PIVOT_TOLERANCE {
        return Err(Error::DecompositionSingular { pivot: pivot.norm() });
    }
    let q = match ordering {
        Ordering::Normal => -2.0 * pivot.ln(),
        Ordering::Antinormal => 2.0 * pivot.ln(),
    };
    Ok(Factorization { p: m12 / pivot, q, r: -m21 / pivot, ordering })
}

fn real_theta_sq(epsilon: f64, eta: C64) -> Result<f64> {
    let theta_sq = epsilon * epsilon - 4.0 * eta.norm_sqr();
    if theta_sq < 0.0 {
        return Err(Error::TrigRegime { theta_sq });
    }
    Ok(theta_sq)
}

/// Normal and antinormal factorizations of `exp(2εK₀ + 2ηK₋ + 2η*K₊)` from the closed forms
///
/// ```text
/// e^{−q/2} = cosh θ − ε sinh θ/θ     r = p* = 2η (sinh θ/θ) / (cosh θ − ε sinh θ/θ)
/// e^{q′/2} = cosh θ + ε sinh θ/θ     r′ = p′* = 2η (sinh θ/θ) / (cosh θ + ε sinh θ/θ)
/// ```
pub fn disentangle_closed_form(epsilon: f64, eta: C64) -> Result<(Factorization, Factorization)> {
    real_theta_sq(epsilon, eta)?;
    let (lower, upper, shc) = metric_pivots(epsilon, eta.norm_sqr());
    for pivot in [lower, upper] {
        if pivot.abs() < PIVOT_TOLERANCE {
            return Err(Error::DecompositionSingular { pivot: pivot.abs() });
        }
    }
    let off = 2.0 * eta * shc;
    let normal = Factorization {
        r: off / lower,
        p: off.conj() / lower,
        q: -2.0 * c(lower).ln(),
        ordering: Ordering::Normal,
    };
    let antinormal = Factorization {
        r: off / upper,
        p: off.conj() / upper,
        q: 2.0 * c(upper).ln(),
        ordering: Ordering::Antinormal,
    };
    Ok((normal, antinormal))
}

/// Matrix of the adjoint action X ↦ ρXρ⁻¹, ρ = exp(2εK₀ + 2ηK₋ + 2η*K₊),
/// on coefficient vectors ordered (c0, cm, cp).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointMatrix {
    pub m: [[C64; 3]; 3],
}

impl AdjointMatrix {
    pub fn identity() -> Self {
        let mut m = [[c(0.0); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = c(1.0);
        }
        Self { m }
    }

    pub fn apply(&self, x: &AlgebraElement) -> AlgebraElement {
        let v = x.to_array();
        let mut out = [c(0.0); 3];
        for (o, row) in out.iter_mut().zip(&self.m) {
            *o = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        AlgebraElement::from_array(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for AdjointMatrix {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut m = [[c(0.0); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..3).map(|k| self.m[i][k] * o.m[k][j]).sum();
            }
        }
        Self { m }
    }
}

/// Closed-form adjoint action of ρ = exp(A) on the generators.
///
/// Column j holds the image of the j-th basis generator (K₀, K₋, K₊):
///
/// ```text
/// ρK₀ρ⁻¹ = (1 − 8|η|²S²) K₀ + 2ηS(C − εS) K₋ − 2η*S(C + εS) K₊
/// ρK₋ρ⁻¹ = −4η*S(C − εS) K₀ + (C − εS)² K₋ + 4η*²S² K₊
/// ρK₊ρ⁻¹ = 4ηS(C + εS) K₀ + 4η²S² K₋ + (C + εS)² K₊
/// ```
///
/// with C = cosh θ and S = sinh θ/θ.
pub fn adjoint_matrix(epsilon: f64, eta: C64) -> Result<AdjointMatrix> {
    real_theta_sq(epsilon, eta)?;
    let (lower, upper, shc) = metric_pivots(epsilon, eta.norm_sqr());
    let (lower, upper) = (c(lower), c(upper));
    let s = c(shc);
    let eta_c = eta.conj();
    let s2 = s * s;
    let m = [
        [1.0 - 8.0 * eta.norm_sqr() * s2, -4.0 * eta_c * s * lower, 4.0 * eta * s * upper],
        [2.0 * eta * s * lower, lower * lower, 4.0 * eta * eta * s2],
        [-2.0 * eta_c * s * upper, 4.0 * eta_c * eta_c * s2, upper * upper],
    ];
    Ok(AdjointMatrix { m })
}

/// Coefficients of ρXρ⁻¹ for a metric-form exponent `a` (real K₀ part, K₊ = conj K₋).
pub fn conjugate(a_exponent: &AlgebraElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    let (epsilon, eta) = a_exponent.as_metric_exponent(1e-12).ok_or_else(|| {
        Error::InvalidParams(
            "exponent must have a real K0 coefficient and K+ coefficient equal to conj(K-)".into(),
        )
    })?;
    Ok(adjoint_matrix(epsilon, eta)?.apply(x))
}
