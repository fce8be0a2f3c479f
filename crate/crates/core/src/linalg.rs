//! Dense symmetric eigensolver (cyclic Jacobi), spectral functions, and a
//! Sturm-sequence solver for large symmetric tridiagonal matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Symmetry tolerance relative to the largest entry.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymmetricEigen {
    /// `Q·f(Λ)·Qᵀ`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let fv = f(v);
            scaled.column_mut(j).scale_mut(fv);
        }
        let mut out = DMatrix::zeros(n, n);
        out.gemm(1.0, &scaled, &self.vectors.transpose(), 0.0);
        out
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Largest |m − mᵀ| entry divided by the largest |m| entry.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..j {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst / scale
}

/// Cyclic Jacobi diagonalization of a real symmetric matrix.
pub fn symmetric_eigs(m: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::InvalidParams(format!("matrix must be square, got {}x{}", n, m.ncols())));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParams("matrix has non-finite entries".into()));
    }
    let residual = asymmetry(m);
    if residual > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric { residual });
    }

    // Row-major working copies; symmetrize to remove rounding-level skew.
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (m[(i, j)] + m[(j, i)]);
        }
    }
    // v holds eigenvectors as rows (transposed at the end).
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += a[i * n + i] * a[i * n + i];
            for j in (i + 1)..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off == 0.0 || off <= 1e-34 * diag {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                if apq.abs() < 1e-300 || apq.abs() <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // rotate rows p, q and then columns p, q
                for k in 0..n {
                    let akp = a[p * n + k];
                    let akq = a[q * n + k];
                    a[p * n + k] = c * akp - s * akq;
                    a[q * n + k] = s * akp + c * akq;
                }
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vp = v[p * n + k];
                    let vq = v[q * n + k];
                    v[p * n + k] = c * vp - s * vq;
                    v[q * n + k] = s * vp + c * vq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = DMatrix::from_fn(n, n, |row, col| v[order[col] * n + row]);
    Ok(SymmetricEigen { values, vectors })
}

/// `exp(scale·m)` for symmetric m through its eigendecomposition.
pub fn exp_symmetric(m: &DMatrix<f64>, scale: f64) -> Result<DMatrix<f64>> {
    Ok(symmetric_eigs(m)?.apply_fn(|v| (scale * v).exp()))
}

/// Largest singular value, as the square root of the top eigenvalue of XᵀX.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    let scale = max_abs(m);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let x = m / scale;
    let gram = if x.nrows() >= x.ncols() { x.transpose() * &x } else { &x * x.transpose() };
    let gram = (&gram + gram.transpose()) * 0.5;
    let top = symmetric_eigs(&gram)
        .map(|e| e.values.last().copied().unwrap_or(0.0))
        .unwrap_or(f64::NAN);
    top.max(0.0).sqrt() * scale
}

/// `‖x − y‖₂ / (‖x‖₂ + ‖y‖₂)`, zero when both vanish.
pub fn relative_distance(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let denom = spectral_norm(x) + spectral_norm(y);
    if denom == 0.0 {
        return 0.0;
    }
    spectral_norm(&(x - y)) / denom
}

/// Symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidParams("off-diagonal must have one entry fewer than the diagonal".into()));
        }
        if diag.iter().chain(off.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("tridiagonal matrix has non-finite entries".into()));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, &e) in self.off.iter().enumerate() {
            m[(i, i + 1)] = e;
            m[(i + 1, i)] = e;
        }
        m
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        DVector::from_fn(n, |i, _| {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            acc
        })
    }

    /// Number of eigenvalues strictly below `x` (Sturm count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0f64;
        for i in 0..self.dim() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `count` smallest eigenvalues by bisection.
    pub fn lowest_eigenvalues(&self, count: usize) -> Vec<f64> {
        let (lo0, hi0) = self.gershgorin();
        let width = (hi0 - lo0).max(1e-300);
        (0..count.min(self.dim()))
            .map(|k| {
                let (mut lo, mut hi) = (lo0 - 1e-12 * width, hi0 + 1e-12 * width);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.count_below(mid) > k {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }

    /// Unit eigenvector for an accurately known eigenvalue, by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> DVector<f64> {
        let n = self.dim();
        let scale = self.gershgorin().1.abs().max(self.gershgorin().0.abs()).max(1e-300);
        let shift = lambda + 1e-13 * scale;
        let mut x = DVector::from_fn(n, |i, _| 1.0 + 0.01 * ((i * 7919) % 101) as f64 / 101.0);
        x.normalize_mut();
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x);
            let norm = x.norm();
            if norm == 0.0 || !norm.is_finite() {
                break;
            }
            x /= norm;
        }
        // fix sign so the largest component is positive
        let imax = x.iamax();
        if x[imax] < 0.0 {
            x = -x;
        }
        x
    }

    /// Solves `(T − σI)y = b` by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, sigma: f64, b: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        if n == 1 {
            let d = self.diag[0] - sigma;
            return DVector::from_element(1, b[0] / if d == 0.0 { f64::EPSILON } else { d });
        }
        // LU with row interchanges; du2 is the fill-in second superdiagonal
        let mut dl: Vec<f64> = self.off.clone();
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - sigma).collect();
        let mut du: Vec<f64> = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut rhs: Vec<f64> = b.iter().copied().collect();
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = f64::EPSILON * 1e-3;
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
                rhs[i + 1] -= f * rhs[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -f;
                }
                rhs.swap(i, i + 1);
                rhs[i + 1] -= f * rhs[i];
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = f64::EPSILON * 1e-3;
        }
        let mut y = vec![0.0; n];
        y[n - 1] = rhs[n - 1] / d[n - 1];
        y[n - 2] = (rhs[n - 2] - du[n - 2] * y[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            y[i] = (rhs[i] - du[i] * y[i + 1] - du2[i] * y[i + 2]) / d[i];
        }
        DVector::from_vec(y)
    }
}
