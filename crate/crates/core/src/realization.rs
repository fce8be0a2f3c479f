//! Truncated matrix realizations of K₀, K₊, K₋.
//!
//! Every realization here is lowest-weight: K₀ is diagonal with strictly
//! increasing entries and K₊ is a strictly lower-triangular shift, so the
//! commutation relations hold exactly on a leading trusted block whose size is
//! the basis dimension minus the shift of K₊.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::algebra::{AlgebraElement, C64};
use crate::error::{Error, Result};
use crate::linalg::Tridiagonal;
use crate::metric::SwansonParams;

/// Identifies a realization and its parameters. Parses from and prints to
/// descriptors such as `discrete:k=0.25` or `multiboson:l=3,residues=0.2,0.5,0.9`.
#[derive(Debug, Clone, PartialEq)]
pub enum RealizationKind {
    /// Lowest-weight discrete series with Bargmann index k.
    DiscreteSeries { k: f64 },
    /// `K₀ = ½(a†a + ½)`, `K₊ = ½a†²`, `K₋ = ½a²` on the full Fock space.
    OscillatorFull,
    /// One parity sector of the two-boson realization.
    OscillatorSector { parity: Parity },
    /// `K₀ = α₀(N)`, `K₋ = α₋(N)aˡ` with α₀ fixed on each residue class by `residues`.
    Multiboson { l: usize, residues: Vec<f64> },
    /// Radial oscillator in the effective angular momentum L, carried by k = (2L + 3)/4.
    Radial { big_l: f64 },
    /// Conformal n-body system with lowest weight k and coupling c (α = −β = c/4).
    Conformal { k: f64, c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn offset(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

impl fmt::Display for RealizationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealizationKind::DiscreteSeries { k } => write!(f, "discrete:k={k}"),
            RealizationKind::OscillatorFull => write!(f, "oscillator"),
            RealizationKind::OscillatorSector { parity } => write!(f, "oscillator:parity={parity}"),
            RealizationKind::Multiboson { l, residues } => {
                let r: Vec<String> = residues.iter().map(|v| v.to_string()).collect();
                write!(f, "multiboson:l={l},residues={}", r.join(","))
            }
            RealizationKind::Radial { big_l } => write!(f, "radial:L={big_l}"),
            RealizationKind::Conformal { k, c } => write!(f, "conformal:k={k},c={c}"),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidParams(format!("realization parameter {key}: cannot parse '{v}' as a number")))
}

impl FromStr for RealizationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        // Split "a=1,b=2,3" into key/value pairs; bare values extend the previous list.
        let mut pairs: Vec<(String, Vec<String>)> = Vec::new();
        for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok.split_once('=') {
                Some((k, v)) => pairs.push((k.trim().to_string(), vec![v.trim().to_string()])),
                None => match pairs.last_mut() {
                    Some((_, vals)) => vals.push(tok.to_string()),
                    None => return Err(Error::InvalidParams(format!("malformed realization descriptor '{s}'"))),
                },
            }
        }
        let get = |key: &str| pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone());
        let scalar = |key: &str| -> Result<Option<f64>> {
            match get(key) {
                None => Ok(None),
                Some(v) if v.len() == 1 => parse_f64(key, &v[0]).map(Some),
                Some(_) => Err(Error::InvalidParams(format!("realization parameter {key} takes one value"))),
            }
        };
        let require = |key: &str| -> Result<f64> {
            scalar(key)?.ok_or_else(|| Error::InvalidParams(format!("realization '{name}' requires {key}=")))
        };
        let allowed = |keys: &[&str]| -> Result<()> {
            for (k, _) in &pairs {
                if !keys.contains(&k.as_str()) {
                    return Err(Error::InvalidParams(format!("unknown parameter '{k}' for realization '{name}'")));
                }
            }
            Ok(())
        };
        match name {
            "discrete" => {
                allowed(&["k"])?;
                Ok(RealizationKind::DiscreteSeries { k: require("k")? })
            }
            "oscillator" => {
                allowed(&["parity"])?;
                match get("parity").as_deref() {
                    None => Ok(RealizationKind::OscillatorFull),
                    Some([p]) if p == "full" => Ok(RealizationKind::OscillatorFull),
                    Some([p]) if p == "even" => Ok(RealizationKind::OscillatorSector { parity: Parity::Even }),
                    Some([p]) if p == "odd" => Ok(RealizationKind::OscillatorSector { parity: Parity::Odd }),
                    Some(_) => Err(Error::InvalidParams("oscillator parity must be even, odd or full".into())),
                }
            }
            "multiboson" => {
                allowed(&["l", "residues"])?;
                let l = require("l")?;
                if l < 1.0 || l.fract() != 0.0 {
                    return Err(Error::InvalidParams(format!("multiboson l must be a positive integer, got {l}")));
                }
                let l = l as usize;
                let residues = match get("residues") {
                    Some(vals) => vals.iter().map(|v| parse_f64("residues", v)).collect::<Result<Vec<_>>>()?,
                    None => default_residues(l),
                };
                Ok(RealizationKind::Multiboson { l, residues })
            }
            "radial" => {
                allowed(&["L", "l", "d"])?;
                let big_l = match (scalar("L")?, scalar("l")?, scalar("d")?) {
                    (Some(big), None, None) => big,
                    (None, Some(l), Some(d)) => radial_big_l(l, d),
                    _ => return Err(Error::InvalidParams("radial realization takes either L= or both l= and d=".into())),
                };
                Ok(RealizationKind::Radial { big_l })
            }
            "conformal" => {
                allowed(&["k", "c"])?;
                Ok(RealizationKind::Conformal { k: require("k")?, c: require("c")? })
            }
            _ => Err(Error::InvalidParams(format!(
                "unknown realization '{name}' (expected discrete, oscillator, multiboson, radial or conformal)"
            ))),
        }
    }
}

/// `L = l + (d − 3)/2`.
pub fn radial_big_l(l: f64, d: f64) -> f64 {
    l + (d - 3.0) / 2.0
}

/// Lowest K₀ eigenvalue of the radial realization, `(L + 3/2)/2`.
pub fn radial_k(big_l: f64) -> f64 {
    (2.0 * big_l + 3.0) / 4.0
}

/// Lowest weight of the conformal realization when V = 0: the ground energy
/// `ω·nd/2` of n isotropic d-dimensional oscillators divided by 2ω.
pub fn conformal_free_k(n: usize, d: usize) -> f64 {
    (n * d) as f64 / 4.0
}

/// `α₀(r) = (2r + 1)/(2l)`, which makes l = 2 the two-boson oscillator.
pub fn default_residues(l: usize) -> Vec<f64> {
    (0..l).map(|r| (2 * r + 1) as f64 / (2 * l) as f64).collect()
}

/// The residue operator as written with roots of unity:
/// `(l − 1)/2 + Σ_{m=1}^{l−1} exp(−2πimn/l)/(exp(2πim/l) − 1)`.
pub fn residue_root_of_unity(l: usize, n: usize) -> C64 {
    if l <= 1 {
        return C64::new(0.0, 0.0);
    }
    let lf = l as f64;
    let mut acc = C64::new((lf - 1.0) / 2.0, 0.0);
    for m in 1..l {
        let phase = -2.0 * PI * ((m * n) % l) as f64 / lf;
        let num = C64::from_polar(1.0, phase);
        let den = C64::from_polar(1.0, 2.0 * PI * m as f64 / lf) - 1.0;
        acc += num / den;
    }
    acc
}

/// Truncated K₀, K₊, K₋ with the size of the block where the algebra is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationMatrices {
    pub k0: DMatrix<f64>,
    pub kp: DMatrix<f64>,
    pub km: DMatrix<f64>,
    pub dim: usize,
    pub trusted: usize,
    pub kind: RealizationKind,
    /// Squared K₊ weights: `kp[(j + shift, j)]² = raising_sq[j]`, exact where
    /// the entries of `kp` are rounded square roots.
    pub raising_sq: Vec<f64>,
}

/// Relative residuals of the defining relations on the trusted block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorResiduals {
    /// `[K₀, K₊] − K₊`
    pub k0_kp: f64,
    /// `[K₀, K₋] + K₋`
    pub k0_km: f64,
    /// `[K₊, K₋] + 2K₀`
    pub kp_km: f64,
    /// `K₋ − K₊ᵀ` and `K₀ − K₀ᵀ`
    pub adjoint: f64,
}

impl CommutatorResiduals {
    pub fn max(&self) -> f64 {
        self.k0_kp.max(self.k0_km).max(self.kp_km).max(self.adjoint)
    }
}

fn block_rel(x: &DMatrix<f64>, t: usize, scale: f64) -> f64 {
    let b = x.view((0, 0), (t, t));
    b.iter().fold(0.0f64, |a, v| a.max(v.abs())) / scale.max(f64::MIN_POSITIVE)
}

fn from_shift(k0_diag: &[f64], shift: usize, weights_sq: impl Fn(usize) -> f64, kind: RealizationKind) -> RealizationMatrices {
    let n = k0_diag.len();
    let k0 = DMatrix::from_diagonal(&DVector::from_column_slice(k0_diag));
    let raising_sq: Vec<f64> = (0..n.saturating_sub(shift)).map(weights_sq).collect();
    let mut kp = DMatrix::zeros(n, n);
    for (j, w2) in raising_sq.iter().enumerate() {
        kp[(j + shift, j)] = w2.sqrt();
    }
    let km = kp.transpose();
    RealizationMatrices { k0, kp, km, dim: n, trusted: n - shift, kind, raising_sq }
}

impl RealizationMatrices {
    /// Offset between a basis vector and its image under K₊.
    pub fn shift(&self) -> usize {
        self.dim - self.trusted
    }

    /// Lowest weights of the irreducible sectors contained in the realization.
    pub fn lowest_weights(&self) -> Vec<f64> {
        match &self.kind {
            RealizationKind::DiscreteSeries { k } | RealizationKind::Conformal { k, .. } => vec![*k],
            RealizationKind::Radial { big_l } => vec![radial_k(*big_l)],
            RealizationKind::OscillatorFull => vec![0.25, 0.75],
            RealizationKind::OscillatorSector { parity } => vec![0.25 + 0.5 * parity.offset() as f64],
            RealizationKind::Multiboson { residues, .. } => residues.clone(),
        }
    }

    /// `c₀K₀ + c₋K₋ + c₊K₊`; the coefficients must be real.
    pub fn materialize(&self, x: &AlgebraElement) -> Result<DMatrix<f64>> {
        materialize(x, self)
    }

    pub fn commutator_residuals(&self) -> CommutatorResiduals {
        let t = self.trusted;
        let (k0, kp, km) = (&self.k0, &self.kp, &self.km);
        let scale = [k0, kp, km]
            .iter()
            .map(|m| m.view((0, 0), (t, t)).iter().fold(0.0f64, |a, v| a.max(v.abs())))
            .fold(1.0f64, f64::max);
        let c1 = k0 * kp - kp * k0 - kp;
        let c2 = k0 * km - km * k0 + km;
        let c3 = kp * km - km * kp + 2.0 * k0;
        let adj = (km - kp.transpose()).abs().max().max((k0 - k0.transpose()).abs().max()) / scale;
        CommutatorResiduals {
            k0_kp: block_rel(&c1, t, scale),
            k0_km: block_rel(&c2, t, scale),
            kp_km: block_rel(&c3, t, scale * scale),
            adjoint: adj,
        }
    }

    /// `K₀² − ½(K₊K₋ + K₋K₊)`.
    pub fn casimir(&self) -> DMatrix<f64> {
        &self.k0 * &self.k0 - 0.5 * (&self.kp * &self.km + &self.km * &self.kp)
    }

    /// K₀ diagonal with strictly increasing entries and K₊ a pure shift:
    /// its only nonzeros sit at `(j + shift, j)`, matching `raising_sq`.
    pub fn is_lowest_weight_form(&self) -> bool {
        let n = self.dim;
        let s = self.shift();
        if s == 0 || self.raising_sq.len() != n - s {
            return false;
        }
        let diag_ok = (0..n).all(|i| (0..n).all(|j| i == j || self.k0[(i, j)] == 0.0));
        let incr = (1..n).all(|i| self.k0[(i, i)] > self.k0[(i - 1, i - 1)]);
        let shift_ok = (0..n).all(|i| (0..n).all(|j| i == j + s || self.kp[(i, j)] == 0.0));
        diag_ok && incr && shift_ok
    }
}

/// `c₀K₀ + c₋K₋ + c₊K₊` in a realization.
pub fn materialize(x: &AlgebraElement, r: &RealizationMatrices) -> Result<DMatrix<f64>> {
    let tol = 1e-14 * x.max_abs().max(1.0);
    if x.c0.im.abs() > tol || x.cm.im.abs() > tol || x.cp.im.abs() > tol {
        return Err(Error::InvalidParams("realizations are real; element must have real coefficients".into()));
    }
    Ok(x.c0.re * &r.k0 + x.cm.re * &r.km + x.cp.re * &r.kp)
}

fn check_dim(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidParams(format!("basis dimension must be at least {min}, got {n}")));
    }
    Ok(())
}

/// `K₀|n⟩ = (n + k)|n⟩`, `K₊|n⟩ = √((n + 1)(n + 2k))|n + 1⟩`.
pub fn discrete_series(k: f64, n: usize) -> Result<RealizationMatrices> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParams(format!("Bargmann index k must be positive, got {k}")));
    }
    check_dim(n, 2)?;
    Ok(discrete_series_tagged(k, n, RealizationKind::DiscreteSeries { k }))
}

fn discrete_series_tagged(k: f64, n: usize, kind: RealizationKind) -> RealizationMatrices {
    let diag: Vec<f64> = (0..n).map(|i| i as f64 + k).collect();
    from_shift(&diag, 1, |j| (j as f64 + 1.0) * (j as f64 + 2.0 * k), kind)
}

/// Truncated a with `a|n⟩ = √n|n − 1⟩`.
pub fn annihilation(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 })
}

/// The two-boson realization on Fock states 0..n.
pub fn oscillator_full(n: usize) -> Result<RealizationMatrices> {
    check_dim(n, 4)?;
    let a = annihilation(n);
    let ad = a.transpose();
    let number = &ad * &a;
    let k0 = 0.5 * (number + 0.5 * DMatrix::identity(n, n));
    let kp = 0.5 * (&ad * &ad);
    let km = 0.5 * (&a * &a);
    let raising_sq = (0..n - 2).map(|j| (j as f64 + 1.0) * (j as f64 + 2.0) / 4.0).collect();
    Ok(RealizationMatrices { k0, kp, km, dim: n, trusted: n - 2, kind: RealizationKind::OscillatorFull, raising_sq })
}

/// Even or odd Fock states of the two-boson realization, n of them.
pub fn oscillator_sector(parity: Parity, n: usize) -> Result<RealizationMatrices> {
    check_dim(n, 2)?;
    let full = oscillator_full(2 * n + 2)?;
    let idx: Vec<usize> = (0..n).map(|j| 2 * j + parity.offset()).collect();
    let pick = |m: &DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| m[(idx[i], idx[j])]);
    Ok(RealizationMatrices {
        k0: pick(&full.k0),
        kp: pick(&full.kp),
        km: pick(&full.km),
        dim: n,
        trusted: n - 1,
        kind: RealizationKind::OscillatorSector { parity },
        raising_sq: (0..n - 1)
            .map(|j| {
                let m = (2 * j + parity.offset()) as f64;
                (m + 1.0) * (m + 2.0) / 4.0
            })
            .collect(),
    })
}

/// One-mode multiboson realization of order l on Fock states 0..n.
///
/// With x = (m − R)/l and a = α₀(R), `α₋(m)² = (x + 2a)(x + 1)/(m + 1)ₗ`, so
/// `K₋|m + l⟩ = α₋(m)·√((m + l)!/m!)|m⟩ = √((x + 2a)(x + 1))|m⟩`.
pub fn multiboson(l: usize, residues: &[f64], n: usize) -> Result<RealizationMatrices> {
    if l == 0 {
        return Err(Error::InvalidParams("multiboson order l must be positive".into()));
    }
    if residues.len() != l {
        return Err(Error::InvalidParams(format!("multiboson needs {l} residues, got {}", residues.len())));
    }
    if residues.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParams("multiboson residues must be finite".into()));
    }
    check_dim(n, l + 1)?;
    // K₀ must increase along the Fock basis: a₀ < a₁ < … < a_{l−1} < a₀ + 1.
    let increasing = residues.windows(2).all(|w| w[0] < w[1]) && residues[l - 1] < residues[0] + 1.0;
    if !increasing {
        return Err(Error::InvalidParams(
            "multiboson residues must satisfy a_0 < a_1 < ... < a_(l-1) < a_0 + 1".into(),
        ));
    }
    let diag: Vec<f64> = (0..n).map(|i| (i / l) as f64 + residues[i % l]).collect();
    let mut weights = Vec::with_capacity(n);
    for m in 0..n {
        let x = (m / l) as f64;
        let a = residues[m % l];
        let radicand = (x + 2.0 * a) * (x + 1.0);
        if radicand < 0.0 {
            return Err(Error::InvalidParams(format!(
                "multiboson radicand negative at n = {m} (residue {a}); residues must be nonnegative"
            )));
        }
        weights.push(radicand);
    }
    Ok(from_shift(&diag, l, |j| weights[j], RealizationKind::Multiboson { l, residues: residues.to_vec() }))
}

/// Radial realization through its lowest weight k = (2L + 3)/4.
pub fn radial(big_l: f64, n: usize) -> Result<RealizationMatrices> {
    let k = radial_k(big_l);
    if !(k > 0.0) {
        return Err(Error::InvalidParams(format!("radial L = {big_l} gives k = {k} <= 0")));
    }
    check_dim(n, 2)?;
    Ok(discrete_series_tagged(k, n, RealizationKind::Radial { big_l }))
}

/// Conformal realization with lowest weight k and the parameters α = −β = c/4.
pub fn conformal(k: f64, c: f64, omega: f64, n: usize) -> Result<(RealizationMatrices, SwansonParams)> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParams(format!("conformal lowest weight k must be positive, got {k}")));
    }
    check_dim(n, 2)?;
    let params = SwansonParams::new(omega, c / 4.0, -c / 4.0)?;
    Ok((discrete_series_tagged(k, n, RealizationKind::Conformal { k, c }), params))
}

/// `Ω = √(ω² + c²/4)`.
pub fn conformal_omega(omega: f64, c: f64) -> f64 {
    (omega * omega + c * c / 4.0).sqrt()
}

impl RealizationKind {
    /// Builds the n-dimensional truncation. For the conformal kind the ω is
    /// taken from `omega`; use [`conformal`] to also get its parameters.
    pub fn build(&self, n: usize, omega: f64) -> Result<RealizationMatrices> {
        match self {
            RealizationKind::DiscreteSeries { k } => discrete_series(*k, n),
            RealizationKind::OscillatorFull => oscillator_full(n),
            RealizationKind::OscillatorSector { parity } => oscillator_sector(*parity, n),
            RealizationKind::Multiboson { l, residues } => multiboson(*l, residues, n),
            RealizationKind::Radial { big_l } => radial(*big_l, n),
            RealizationKind::Conformal { k, c } => conformal(*k, *c, omega, n).map(|(r, _)| r),
        }
    }

    /// Parameters fixed by the realization itself, if any.
    pub fn forced_params(&self, omega: f64) -> Option<Result<SwansonParams>> {
        match self {
            RealizationKind::Conformal { c, .. } => Some(SwansonParams::new(omega, c / 4.0, -c / 4.0)),
            _ => None,
        }
    }
}

/// Lowest eigenvalue of the radial K₀ = (−d²/dr² + L(L + 1)/r² + ω²r²)/(4ω),
/// discretized by second-order differences on (0, r_max) with Dirichlet ends.
pub fn radial_k0_lowest_fd(big_l: f64, omega: f64, r_max: f64, points: usize) -> Result<f64> {
    if points < 10 || !(r_max > 0.0) || !(omega > 0.0) {
        return Err(Error::InvalidParams("radial grid needs points >= 10, r_max > 0, omega > 0".into()));
    }
    let h = r_max / (points + 1) as f64;
    let inv_h2 = 1.0 / (h * h);
    let cent = big_l * (big_l + 1.0);
    let diag: Vec<f64> = (1..=points)
        .map(|i| {
            let r = i as f64 * h;
            2.0 * inv_h2 + cent / (r * r) + omega * omega * r * r
        })
        .collect();
    let off = vec![-inv_h2; points - 1];
    let t = Tridiagonal::new(diag, off)?;
    Ok(t.lowest_eigenvalues(1)[0] / (4.0 * omega))
}
