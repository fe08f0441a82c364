//! Dense symmetric eigenvalues.
//!
//! [`eigs_all`] reduces to tridiagonal form with Householder reflections
//! (working on the lower triangle of a private row-major copy) and then runs
//! the implicit QL iteration with Wilkinson shifts. Eigenvectors are never
//! formed. Symmetric Toeplitz matrices are first split into two half-size
//! problems using their centrosymmetry.

use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

/// A real symmetric matrix in packed lower-triangular storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    /// Row `i` holds entries `(i, 0..=i)` starting at `i(i+1)/2`.
    packed: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            packed: vec![0.0; n * (n + 1) / 2],
        }
    }

    /// Builds the matrix from `entry(i, j)` evaluated for `j ≤ i`.
    pub fn from_fn(n: usize, mut entry: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                m.packed[i * (i + 1) / 2 + j] = entry(i, j);
            }
        }
        m.check_finite()?;
        Ok(m)
    }

    /// Wraps packed lower-triangular rows.
    pub fn from_packed(n: usize, packed: Vec<f64>) -> Result<Self> {
        if packed.len() != n * (n + 1) / 2 {
            return Err(Error::InvalidArgument(format!(
                "packed storage of order {n} needs {} entries, got {}",
                n * (n + 1) / 2,
                packed.len()
            )));
        }
        let m = Self { n, packed };
        m.check_finite()?;
        Ok(m)
    }

    /// From a full row-major matrix, which must be symmetric.
    pub fn from_dense(n: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "dense matrix of order {n} needs {} entries, got {}",
                n * n,
                dense.len()
            )));
        }
        for i in 0..n {
            for j in 0..i {
                if dense[i * n + j] != dense[j * n + i] {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Self::from_fn(n, |i, j| dense[i * n + j])
    }

    fn check_finite(&self) -> Result<()> {
        match self.packed.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(_) => Err(Error::InvalidArgument("matrix has non-finite entries".into())),
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        self.packed[i * (i + 1) / 2 + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        self.packed[i * (i + 1) / 2 + j] = value;
    }

    /// Row `i` up to and including the diagonal.
    pub fn lower_row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.packed[start..start + i + 1]
    }

    pub fn packed(&self) -> &[f64] {
        &self.packed
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut dense = vec![0.0; n * n];
        for i in 0..n {
            for (j, &v) in self.lower_row(i).iter().enumerate() {
                dense[i * n + j] = v;
                dense[j * n + i] = v;
            }
        }
        dense
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let row = self.lower_row(i);
            let xi = x[i];
            let mut acc = row[i] * xi;
            for j in 0..i {
                acc += row[j] * x[j];
                y[j] += row[j] * xi;
            }
            y[i] += acc;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Maximum absolute row sum, an upper bound for the spectral norm.
    pub fn norm_estimate(&self) -> f64 {
        let mut sums = vec![0.0; self.n];
        for i in 0..self.n {
            for (j, &v) in self.lower_row(i).iter().enumerate() {
                sums[i] += v.abs();
                if j != i {
                    sums[j] += v.abs();
                }
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }
}

/// A symmetric Toeplitz matrix `T_{ij} = t_{|i-j|}` given by its first column.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricToeplitz {
    column: Vec<f64>,
}

impl SymmetricToeplitz {
    pub fn new(column: Vec<f64>) -> Result<Self> {
        if column.is_empty() {
            return Err(Error::InvalidArgument("Toeplitz matrix needs order >= 1".into()));
        }
        if column.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("Toeplitz column has non-finite entries".into()));
        }
        Ok(Self { column })
    }

    pub fn order(&self) -> usize {
        self.column.len()
    }

    pub fn first_column(&self) -> &[f64] {
        &self.column
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.column[i.abs_diff(j)]
    }

    pub fn to_matrix(&self) -> SymmetricMatrix {
        let mut m = SymmetricMatrix::zeros(self.order());
        for i in 0..self.order() {
            let start = i * (i + 1) / 2;
            for j in 0..=i {
                m.packed[start + j] = self.column[i - j];
            }
        }
        m
    }

    /// All eigenvalues, ascending.
    ///
    /// A symmetric Toeplitz matrix commutes with the exchange matrix `J`, so
    /// it is block-diagonalised by `[[I, I], [J, -J]]/√2`: for order `2m` the
    /// blocks are `A ± CJ` with `A`, `C` the upper-left and upper-right
    /// `m × m` blocks; for order `2m+1` the `+` block is bordered by the
    /// middle column scaled by `√2`.
    pub fn eigenvalues(&self, tol: f64) -> Result<Vec<f64>> {
        let n = self.order();
        if n < 4 {
            return eigs_all(&self.to_matrix(), tol);
        }
        let t = &self.column;
        let m = n / 2;
        let odd = n % 2 == 1;
        // (CJ)_{ij} = t_{n-1-i-j}
        let plus_order = if odd { m + 1 } else { m };
        let mut plus = vec![0.0; plus_order * plus_order];
        let mut minus = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..=i {
                let a = t[i - j];
                let cj = t[n - 1 - i - j];
                plus[i * plus_order + j] = a + cj;
                minus[i * m + j] = a - cj;
            }
        }
        if odd {
            let sqrt2 = std::f64::consts::SQRT_2;
            for j in 0..m {
                plus[m * plus_order + j] = sqrt2 * t[m - j];
            }
            plus[m * plus_order + m] = t[0];
        }
        let norm = self.norm_estimate();
        let mut values = eigs_lower_dense(plus, plus_order, tol, norm)?;
        values.extend(eigs_lower_dense(minus, m, tol, norm)?);
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    fn norm_estimate(&self) -> f64 {
        // the middle row has the largest absolute sum
        let n = self.order();
        let mid = n / 2;
        (0..n).map(|j| self.column[mid.abs_diff(j)].abs()).sum()
    }
}

/// All eigenvalues of `m`, ascending. `tol` is relative to the max row sum.
pub fn eigs_all(m: &SymmetricMatrix, tol: f64) -> Result<Vec<f64>> {
    let n = m.order();
    let mut work = vec![0.0; n * n];
    for i in 0..n {
        work[i * n..i * n + i + 1].copy_from_slice(m.lower_row(i));
    }
    eigs_lower_dense(work, n, tol, m.norm_estimate())
}

/// Eigenvalues from the lower triangle of a row-major `n × n` buffer.
fn eigs_lower_dense(mut a: Vec<f64>, n: usize, tol: f64, norm: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("matrix order must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let (mut d, mut e) = tridiagonalize(&mut a, n);
    drop(a);
    tridiagonal_ql(&mut d, &mut e, tol * norm)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Householder reduction of the lower triangle of `a` to tridiagonal form.
/// Returns the diagonal and the subdiagonal (with `e[i]` coupling rows
/// `i - 1` and `i`, `e[0] = 0`).
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut p = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let (head, tail) = a.split_at_mut(i * n);
        let row_i = &mut tail[..i];
        if l == 0 {
            e[i] = row_i[0];
            continue;
        }
        let scale: f64 = row_i.iter().map(|v| v.abs()).sum();
        if scale == 0.0 {
            e[i] = row_i[l];
            continue;
        }
        let mut h = 0.0;
        for v in row_i.iter_mut() {
            *v /= scale;
            h += *v * *v;
        }
        let f = row_i[l];
        let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
        e[i] = scale * g;
        h -= f * g;
        row_i[l] = f - g;
        let u = &*row_i;

        // p = A u / h using the lower triangle of the leading block
        p[..i].iter_mut().for_each(|v| *v = 0.0);
        for j in 0..i {
            let row_j = &head[j * n..j * n + j + 1];
            let uj = u[j];
            let mut acc = row_j[j] * uj;
            for k in 0..j {
                acc += row_j[k] * u[k];
                p[k] += row_j[k] * uj;
            }
            p[j] += acc;
        }
        let mut f_acc = 0.0;
        for j in 0..i {
            p[j] /= h;
            f_acc += p[j] * u[j];
        }
        let hh = f_acc / (h + h);
        for j in 0..i {
            p[j] -= hh * u[j];
        }
        // A ← A - u pᵀ - p uᵀ on the lower triangle
        for j in 0..i {
            let (uj, pj) = (u[j], p[j]);
            let row_j = &mut head[j * n..j * n + j + 1];
            for k in 0..=j {
                row_j[k] -= uj * p[k] + pj * u[k];
            }
        }
    }
    for i in 0..n {
        d[i] = a[i * n + i];
    }
    (d, e)
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// Off-diagonal entries below `abs_tol` (or negligible in floating point)
/// are deflated; `e` is consumed.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], abs_tol: f64) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= abs_tol {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(Error::EigenNoConvergence(iter));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Result of [`eig_max_rayleigh`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighEstimate {
    /// `‖Mx‖ / ‖x‖` for the final iterate.
    pub value: f64,
    /// The final Rayleigh quotient `xᵀMx / xᵀx`, never above `λ_max`.
    pub certified_lower: f64,
    pub iterations: usize,
}

/// Power iteration from the all-ones vector, for matrices with nonnegative
/// entries (whose Perron vector is positive, so the start is never
/// orthogonal to it). Stops when the Rayleigh quotient changes by less than
/// `tol` relative, or after `max_iters` steps.
pub fn eig_max_rayleigh(m: &SymmetricMatrix, max_iters: usize, tol: f64) -> Result<RayleighEstimate> {
    let n = m.order();
    if n == 0 || max_iters == 0 || !(tol > 0.0) {
        return Err(Error::InvalidArgument(
            "power iteration needs order >= 1, iters >= 1 and tol > 0".into(),
        ));
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0; n];
    let mut rayleigh = f64::NEG_INFINITY;
    let mut value = 0.0;
    for it in 1..=max_iters {
        m.matvec(&x, &mut y);
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let yy: f64 = y.iter().map(|v| v * v).sum();
        if yy == 0.0 {
            return Ok(RayleighEstimate {
                value: 0.0,
                certified_lower: 0.0,
                iterations: it,
            });
        }
        // x has unit norm
        let next = xy;
        value = yy.sqrt();
        let converged = (next - rayleigh).abs() <= tol * next.abs();
        rayleigh = next;
        if converged {
            return Ok(RayleighEstimate {
                value,
                certified_lower: rayleigh,
                iterations: it,
            });
        }
        let inv = 1.0 / value;
        x.iter_mut().zip(&y).for_each(|(a, b)| *a = b * inv);
    }
    Ok(RayleighEstimate {
        value,
        certified_lower: rayleigh,
        iterations: max_iters,
    })
}
