//! Multiprecision evaluation of the products that involve ρ⁻¹.
//!
//! On the leading T rows the diagonal factor `e^{q·k₀(j)}` of ρ and of ρ⁻¹
//! spans many orders of magnitude, so ρHρ⁻¹ and ρρ⁻¹ are sums of huge terms
//! that cancel to O(1). The working precision is chosen from that range so
//! the cancellation is resolved, and results are rounded back to f64.

use nalgebra::{DMatrix, DVector};
use rug::{Assign, Float};

use crate::algebra::AlgebraElement;
use crate::realization::RealizationMatrices;

/// Bits kept beyond the estimated cancellation depth.
const GUARD_BITS: u32 = 192;
const MAX_BITS: u32 = 8192;

/// Row-major dense matrix of multiprecision floats.
#[derive(Debug, Clone)]
struct BigMat {
    rows: usize,
    cols: usize,
    data: Vec<Float>,
}

impl BigMat {
    fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        Self { rows, cols, data: vec![Float::new(prec); rows * cols] }
    }

    fn at(&self, i: usize, j: usize) -> &Float {
        &self.data[i * self.cols + j]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut Float {
        &mut self.data[i * self.cols + j]
    }

    fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j).to_f64())
    }
}

/// A pure-shift realization held at working precision.
struct BigRealization {
    prec: u32,
    n: usize,
    shift: usize,
    k0: Vec<Float>,
    /// `w[j] = ⟨j + shift|K₊|j⟩`.
    w: Vec<Float>,
}

impl BigRealization {
    /// Rebuilds the matrices from the lowest weights: `k₀(j) = k₀(j mod s) + ⌊j/s⌋`
    /// and `w(j)² = w(j − s)² + 2k₀(j)`. Rounded f64 entries satisfy the
    /// commutation relations only to an ulp, and the products below amplify
    /// that by the full range of e^{qk₀}.
    fn new(r: &RealizationMatrices, prec: u32) -> Self {
        let n = r.dim;
        let s = r.shift();
        let k0: Vec<Float> = (0..n).map(|j| Float::with_val(prec, r.k0[(j % s, j % s)]) + (j / s) as u32).collect();
        let mut w_sq: Vec<Float> = Vec::with_capacity(n - s);
        for j in 0..n - s {
            let below = if j >= s { w_sq[j - s].clone() } else { Float::new(prec) };
            w_sq.push(below + Float::with_val(prec, &k0[j] * 2u32));
        }
        debug_assert!(w_sq.iter().zip(&r.raising_sq).all(|(a, b)| (a.to_f64() - b).abs() <= 1e-12 * b.abs().max(1.0)));
        Self { prec, n, shift: s, k0, w: w_sq.into_iter().map(|v| v.sqrt()).collect() }
    }

    /// Banded `c₀K₀ + c₋K₋ + c₊K₊` as (diagonal, coefficient on K₊ weights, on K₋ weights).
    fn element(&self, c0: f64, cm: f64, cp: f64) -> BandedElement {
        let p = self.prec;
        BandedElement {
            shift: self.shift,
            diag: self.k0.iter().map(|k| Float::with_val(p, k * c0)).collect(),
            lower: self.w.iter().map(|w| Float::with_val(p, w * cp)).collect(),
            upper: self.w.iter().map(|w| Float::with_val(p, w * cm)).collect(),
        }
    }

    /// Normal-ordering factors of exp(2εK₀ + 2η(K₊ + K₋)) restricted to
    /// columns `0..nrows`: `lower[c][d] = ⟨c + d·s| exp(pK₊) |c⟩` and the
    /// diagonal `e^{q·k₀(j)}`. `None` when the pivot is not positive.
    fn factors(&self, epsilon: f64, eta: f64, nrows: usize) -> Option<(Vec<Vec<Float>>, Vec<Float>)> {
        let p = self.prec;
        let (n, s) = (self.n, self.shift);
        let eps = Float::with_val(p, epsilon);
        let eta = Float::with_val(p, eta);
        let theta_sq = Float::with_val(p, &eps * &eps) - Float::with_val(p, &eta * &eta) * 4u32;
        if theta_sq < 0 {
            return None;
        }
        let theta = theta_sq.sqrt();
        let (ch, shc) = if theta == 0 {
            (Float::with_val(p, 1), Float::with_val(p, 1))
        } else {
            (theta.clone().cosh(), theta.clone().sinh() / &theta)
        };
        let pivot = ch - Float::with_val(p, &eps * &shc);
        if pivot <= 0 {
            return None;
        }
        let pp = Float::with_val(p, &eta * &shc) * 2u32 / &pivot;
        let q = pivot.ln() * -2i32;

        let mut lower: Vec<Vec<Float>> = Vec::with_capacity(nrows);
        for c in 0..nrows {
            let mut col = vec![Float::with_val(p, 1)];
            let mut row = c;
            let mut d = 1u32;
            while row + s < n {
                let prev = col.last().expect("nonempty");
                let next = Float::with_val(p, prev * &pp) * &self.w[row] / d;
                col.push(next);
                row += s;
                d += 1;
            }
            lower.push(col);
        }
        let diag: Vec<Float> = (0..nrows).map(|j| Float::with_val(p, &q * &self.k0[j]).exp()).collect();
        Some((lower, diag))
    }

    /// Leading `nrows` rows of exp(2εK₀ + 2η(K₊ + K₋)), as L·D·Lᵀ.
    fn metric_rows(&self, epsilon: f64, eta: f64, nrows: usize) -> Option<BigMat> {
        let p = self.prec;
        let (n, s) = (self.n, self.shift);
        let (lower, diag) = self.factors(epsilon, eta, nrows)?;
        let mut out = BigMat::zeros(nrows, n, p);
        let mut tmp = Float::new(p);
        for m in 0..nrows {
            for col in 0..n {
                let acc = out.at_mut(m, col);
                // j ≡ m (mod s) and j ≡ col (mod s), j ≤ min(m, col)
                if m % s != col % s {
                    continue;
                }
                let top = m.min(col);
                let mut j = m % s;
                while j <= top {
                    let a = &lower[j][(m - j) / s];
                    let b = &lower[j][(col - j) / s];
                    tmp.assign(a * b);
                    tmp *= &diag[j];
                    *acc += &tmp;
                    j += s;
                }
            }
        }
        if out.data.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some(out)
    }
}


struct BandedElement {
    shift: usize,
    diag: Vec<Float>,
    /// entries at (j + shift, j)
    lower: Vec<Float>,
    /// entries at (j, j + shift)
    upper: Vec<Float>,
}

impl BandedElement {
    /// `x·M` for a row-major block x with as many columns as M has rows.
    fn right_multiply(&self, x: &BigMat, prec: u32) -> BigMat {
        let n = self.diag.len();
        assert_eq!(x.cols, n);
        let s = self.shift;
        let mut out = BigMat::zeros(x.rows, n, prec);
        let mut tmp = Float::new(prec);
        for i in 0..x.rows {
            for j in 0..n {
                let acc = out.at_mut(i, j);
                tmp.assign(x.at(i, j) * &self.diag[j]);
                *acc += &tmp;
                if j >= s {
                    // (j − s, j) is an upper entry
                    tmp.assign(x.at(i, j - s) * &self.upper[j - s]);
                    *acc += &tmp;
                }
                if j + s < n {
                    tmp.assign(x.at(i, j + s) * &self.lower[j]);
                    *acc += &tmp;
                }
            }
        }
        out
    }

    fn apply(&self, v: &[Float], prec: u32) -> Vec<Float> {
        let n = self.diag.len();
        let s = self.shift;
        (0..n)
            .map(|i| {
                let mut acc = Float::with_val(prec, &self.diag[i] * &v[i]);
                if i >= s {
                    acc += Float::with_val(prec, &self.lower[i - s] * &v[i - s]);
                }
                if i + s < n {
                    acc += Float::with_val(prec, &self.upper[i] * &v[i + s]);
                }
                acc
            })
            .collect()
    }

    /// Solves `(M − σ)x = b` by banded elimination without pivoting; the
    /// symmetric shifted band is only singular at σ equal to an eigenvalue of
    /// a leading block, which a perturbed shift avoids.
    fn solve_shifted(&self, sigma: &Float, b: &[Float], prec: u32) -> Option<Vec<Float>> {
        let n = self.diag.len();
        let s = self.shift;
        // dense band storage: row i holds columns i−s..=i+s
        let width = 2 * s + 1;
        let mut band: Vec<Float> = vec![Float::new(prec); n * width];
        let idx = |i: usize, j: usize| i * width + (j + s - i);
        for i in 0..n {
            band[idx(i, i)] = Float::with_val(prec, &self.diag[i] - sigma);
            if i + s < n {
                band[idx(i + s, i)] = self.lower[i].clone();
                band[idx(i, i + s)] = self.upper[i].clone();
            }
        }
        let mut rhs: Vec<Float> = b.to_vec();
        for k in 0..n {
            if band[idx(k, k)] == 0 {
                return None;
            }
            let last = (k + s).min(n - 1);
            for i in (k + 1)..=last {
                let f = Float::with_val(prec, &band[idx(i, k)] / &band[idx(k, k)]);
                if f == 0 {
                    continue;
                }
                for j in k..=last {
                    let t = Float::with_val(prec, &f * &band[idx(k, j)]);
                    band[idx(i, j)] -= t;
                }
                let t = Float::with_val(prec, &f * &rhs[k]);
                rhs[i] -= t;
            }
        }
        let mut x: Vec<Float> = vec![Float::new(prec); n];
        for i in (0..n).rev() {
            let mut acc = rhs[i].clone();
            for j in (i + 1)..=(i + s).min(n - 1) {
                acc -= Float::with_val(prec, &band[idx(i, j)] * &x[j]);
            }
            x[i] = acc / &band[idx(i, i)];
        }
        Some(x)
    }
}

fn dot(a: &[Float], b: &[Float], prec: u32) -> Float {
    let mut acc = Float::new(prec);
    let mut tmp = Float::new(prec);
    for (x, y) in a.iter().zip(b) {
        tmp.assign(x * y);
        acc += &tmp;
    }
    acc
}

fn norm(a: &[Float], prec: u32) -> Float {
    dot(a, a, prec).sqrt()
}

/// Results of the multiprecision pass, rounded to f64.
#[derive(Debug, Clone)]
pub(crate) struct InverseDiagnostics {
    /// ρHρ⁻¹ on the trusted block.
    pub h_conj: DMatrix<f64>,
    /// ρρ⁻¹ on the trusted block.
    pub rho_rho_inv: DMatrix<f64>,
    /// `‖(H − λ)φ‖/(|λ|‖φ‖)` on the trusted block for each requested eigenpair.
    pub eigvec: Vec<f64>,
    pub bits: u32,
}

/// Working precision from the spread of the normal-ordering diagonals of ρ and ρ⁻¹.
fn working_bits(r: &RealizationMatrices, epsilon: f64, eta: f64, nrows: usize) -> u32 {
    let spread = |eps: f64| -> f64 {
        let (pivot, _, _) = crate::algebra::metric_pivots(eps, eta * eta);
        if pivot <= 0.0 {
            return 0.0;
        }
        let q = -2.0 * pivot.ln();
        q.abs() * r.k0[(nrows - 1, nrows - 1)].abs().max(r.k0[(0, 0)].abs())
    };
    let nats = spread(epsilon) + spread(-epsilon);
    let bits = GUARD_BITS as f64 + 2.0 * nats / std::f64::consts::LN_2;
    (bits.ceil() as u32).clamp(GUARD_BITS, MAX_BITS)
}

/// Evaluates ρHρ⁻¹, ρρ⁻¹ and the eigenvector residuals of H at adaptive
/// precision. `eigenpairs` are f64 eigenvalues and eigenvectors of h, used
/// as starting points.
#[allow(clippy::too_many_arguments)]
pub(crate) fn inverse_diagnostics(
    r: &RealizationMatrices,
    epsilon: f64,
    eta: f64,
    big_h: &AlgebraElement,
    small_h: &AlgebraElement,
    trusted: usize,
    nrows: usize,
    eigenpairs: &[(f64, DVector<f64>)],
) -> Option<InverseDiagnostics> {
    let bits = working_bits(r, epsilon, eta, nrows);
    let big = BigRealization::new(r, bits);
    let rho = big.metric_rows(epsilon, eta, nrows)?;
    let rho_inv = big.metric_rows(-epsilon, -eta, nrows)?;
    let n = r.dim;
    let t = trusted;

    let take_rows = |m: &BigMat, k: usize| BigMat { rows: k, cols: m.cols, data: m.data[..k * m.cols].to_vec() };
    let rho_t = take_rows(&rho, t);
    let inv_t = take_rows(&rho_inv, t);

    let hamiltonian = big.element(big_h.c0.re, big_h.cm.re, big_h.cp.re);
    let rho_h = hamiltonian.right_multiply(&rho_t, bits);

    // (ρH)·ρ⁻¹ and ρ·ρ⁻¹, with ρ⁻¹ symmetric so its column n is row n.
    let mut h_conj = BigMat::zeros(t, t, bits);
    let mut prod = BigMat::zeros(t, t, bits);
    let mut tmp = Float::new(bits);
    for i in 0..t {
        for j in 0..t {
            let (acc_h, acc_p) = (&mut Float::new(bits), &mut Float::new(bits));
            for k in 0..n {
                let b = inv_t.at(j, k);
                tmp.assign(rho_h.at(i, k) * b);
                *acc_h += &tmp;
                tmp.assign(rho_t.at(i, k) * b);
                *acc_p += &tmp;
            }
            *h_conj.at_mut(i, j) = acc_h.clone();
            *prod.at_mut(i, j) = acc_p.clone();
        }
    }

    // Eigenvectors of h refined by Rayleigh-quotient iteration, then φ = ρ⁻¹ψ.
    let h_elem = big.element(small_h.c0.re, small_h.cm.re, small_h.cp.re);
    let target = Float::with_val(bits, Float::i_exp(1, -((bits as i32) - 64)));
    let mut eigvec = Vec::with_capacity(eigenpairs.len());
    for (lambda, psi0) in eigenpairs {
        let mut psi: Vec<Float> = psi0.iter().map(|v| Float::with_val(bits, *v)).collect();
        let nrm = norm(&psi, bits);
        psi.iter_mut().for_each(|v| *v /= &nrm);
        let mut sigma = Float::with_val(bits, *lambda);
        for _ in 0..8 {
            let hpsi = h_elem.apply(&psi, bits);
            sigma = dot(&psi, &hpsi, bits);
            let resid: Vec<Float> = hpsi.iter().zip(&psi).map(|(a, b)| Float::with_val(bits, a - Float::with_val(bits, &sigma * b))).collect();
            if norm(&resid, bits) <= target.clone() * Float::with_val(bits, sigma.clone().abs()).max(&Float::with_val(bits, 1)) {
                break;
            }
            let shifted = Float::with_val(bits, &sigma * (Float::with_val(bits, 1) + Float::with_val(bits, Float::i_exp(1, -((bits as i32) - 16)))));
            let Some(next) = h_elem.solve_shifted(&shifted, &psi, bits) else { break };
            let nrm = norm(&next, bits);
            if nrm == 0 || !nrm.is_finite() {
                break;
            }
            psi = next.into_iter().map(|v| v / &nrm).collect();
        }
        // φ on rows 0..nrows, then (Hφ − σφ) on the trusted block
        let phi: Vec<Float> = (0..nrows).map(|m| dot(&rho_inv.data[m * n..(m + 1) * n], &psi, bits)).collect();
        let mut res = Float::new(bits);
        for i in 0..t {
            let mut hphi = Float::with_val(bits, &hamiltonian.diag[i] * &phi[i]);
            let s = hamiltonian.shift;
            if i >= s {
                hphi += Float::with_val(bits, &hamiltonian.lower[i - s] * &phi[i - s]);
            }
            if i + s < nrows {
                hphi += Float::with_val(bits, &hamiltonian.upper[i] * &phi[i + s]);
            }
            let d = hphi - Float::with_val(bits, &sigma * &phi[i]);
            res += Float::with_val(bits, &d * &d);
        }
        let phi_t = norm(&phi[..t], bits);
        let denom = Float::with_val(bits, sigma.clone().abs() * &phi_t);
        let ratio = res.sqrt() / denom;
        eigvec.push(if ratio.is_finite() { ratio.to_f64() } else { f64::INFINITY });
    }

    Some(InverseDiagnostics { h_conj: h_conj.to_f64(), rho_rho_inv: prod.to_f64(), eigvec, bits })
}

/// Smallest eigenvalue of the leading T×T block of exp(2εK₀ + 2η(K₊ + K₋)).
///
/// The block equals L_T·D·L_Tᵀ with unit lower-triangular L_T, so ζ⁻¹x costs
/// two triangular solves; inverse iteration with a Rayleigh quotient then
/// resolves the smallest eigenvalue even when the block's condition number
/// is far beyond f64.
pub(crate) fn block_min_eigenvalue(r: &RealizationMatrices, epsilon: f64, eta: f64, trusted: usize) -> Option<f64> {
    let t = trusted.min(r.dim);
    let bits = working_bits(r, epsilon, eta, t);
    let big = BigRealization::new(r, bits);
    let (lower, diag) = big.factors(epsilon, eta, t)?;
    let s = big.shift;
    // entry (m, j) of L_T for m ≥ j, m ≡ j (mod s)
    let l = |m: usize, j: usize| &lower[j][(m - j) / s];

    let apply = |x: &[Float]| -> Vec<Float> {
        // L·D·Lᵀ x
        let mut y: Vec<Float> = (0..t)
            .map(|j| {
                let mut acc = Float::new(bits);
                let mut m = j;
                while m < t {
                    acc += Float::with_val(bits, l(m, j) * &x[m]);
                    m += s;
                }
                acc * &diag[j]
            })
            .collect();
        let mut out = vec![Float::new(bits); t];
        for (m, o) in out.iter_mut().enumerate() {
            let mut j = m % s;
            while j <= m {
                *o += Float::with_val(bits, l(m, j) * &y[j]);
                j += s;
            }
        }
        y.clear();
        out
    };
    let solve = |b: &[Float]| -> Vec<Float> {
        // forward L y = b, scale by D⁻¹, back Lᵀ x = y
        let mut y: Vec<Float> = b.to_vec();
        for m in 0..t {
            let mut j = m % s;
            while j < m {
                let v = Float::with_val(bits, l(m, j) * &y[j]);
                y[m] -= v;
                j += s;
            }
        }
        for (v, d) in y.iter_mut().zip(&diag) {
            *v /= d;
        }
        for j in (0..t).rev() {
            let mut m = j + s;
            while m < t {
                let v = Float::with_val(bits, l(m, j) * &y[m]);
                y[j] -= v;
                m += s;
            }
        }
        y
    };

    let mut x: Vec<Float> = (0..t).map(|i| Float::with_val(bits, 1.0 + 0.01 * ((i * 7919) % 101) as f64)).collect();
    let mut estimate = Float::with_val(bits, f64::INFINITY);
    for _ in 0..2000 {
        let y = solve(&x);
        let nrm = norm(&y, bits);
        if nrm == 0 || !nrm.is_finite() {
            return None;
        }
        x = y.into_iter().map(|v| v / &nrm).collect();
        let rq = dot(&x, &apply(&x), bits);
        let change = Float::with_val(bits, &rq - &estimate).abs();
        estimate = rq;
        if change <= Float::with_val(bits, &estimate * 1e-18).abs() {
            break;
        }
    }
    let v = estimate.to_f64();
    v.is_finite().then_some(v)
}
