//! Lower bounds `λ_{n,ε}` from a cell-wise discretisation of the quadratic
//! form of the operator.
//!
//! For a cell grid `K_ε` of the domain, the matrix `V` has entries
//!
//! ```text
//! V_{pq} = -c_{d,α} ε^{-α} ‖κ(p) - κ(q)‖^{-d-α}        (p ≠ q)
//! V_{pp} =  c_{d,α} ε^{-α} (ν̄ - d^{-(d+α)/2})
//! ```
//!
//! and the n-th eigenvalue of the operator is at least the n-th eigenvalue
//! of `V`, capped at `c_{d,α} ε^{-α} ν̄` (and equal to the cap when `n`
//! exceeds the order). On the interval `V` is Toeplitz with diagonal
//! `2c_α(ζ(1+α) - 1)/ε^α`.
//!
//! `ζ` and `ν̄` are always approximated from below: a smaller diagonal gives a
//! smaller quadratic form, so the bound stays valid.

use rayon::prelude::*;

use crate::eigensolver::{SymmetricMatrix, SymmetricToeplitz};
use crate::error::{check_alpha, Error, Result};
use crate::grid::{build_grid_with_cap, norm_k, nu_bar, CellGrid, DomainShape, NuBarMode};
use crate::quadrature::{integrate_with_breakpoints, QuadSpec};
use crate::specfun::{c_alpha, c_d_alpha, gamma_fn, zeta_one_plus, ZetaDirection};

/// Numerical settings shared by the bound pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsConfig {
    pub cell_cap: usize,
    /// Eigenvalue tolerance relative to the max row sum.
    pub eig_tol: f64,
    /// Truncation radius for `ν̄` when `d ≥ 2` (the tail is bounded below
    /// by an integral and added).
    pub nu_bar_radius: u64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            cell_cap: crate::grid::DEFAULT_CELL_CAP,
            eig_tol: 1e-12,
            nu_bar_radius: 10_000,
        }
    }
}

impl BoundsConfig {
    /// The `ν̄` approximation used for dimension `d`.
    pub fn nu_bar_mode(&self, d: usize) -> NuBarMode {
        if d == 1 {
            NuBarMode::ExactOneD
        } else {
            NuBarMode::TailBounded(self.nu_bar_radius)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundResult {
    pub alpha: f64,
    pub eps: f64,
    pub shape: DomainShape,
    /// `c_{d,α} ε^{-α} ν̄`.
    pub cap: f64,
    /// `values[n - 1] = λ_{n,ε}`, ascending.
    pub values: Vec<f64>,
    pub matrix_order: usize,
    /// How many of the reported values were replaced by the cap because the
    /// matrix eigenvalue exceeded it.
    pub clipped: usize,
}

impl LowerBoundResult {
    /// `λ_{n,ε}` for `n ≥ 1`.
    pub fn lambda(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }
}

/// The interval matrix for `N` cells of width `ε = 2/N`.
pub fn assemble_v_interval(alpha: f64, n: usize) -> Result<SymmetricToeplitz> {
    assemble_v_interval_with_cap(alpha, n, crate::grid::DEFAULT_CELL_CAP)
}

pub fn assemble_v_interval_with_cap(alpha: f64, n: usize, cap: usize) -> Result<SymmetricToeplitz> {
    check_alpha(alpha)?;
    if n == 0 {
        return Err(Error::InvalidArgument("matrix order must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::CellCapExceeded { count: n, cap });
    }
    toeplitz_column(alpha, 2.0 / n as f64, n).and_then(SymmetricToeplitz::new)
}

fn toeplitz_column(alpha: f64, eps: f64, n: usize) -> Result<Vec<f64>> {
    let scale = c_alpha(alpha)? * eps.powf(-alpha);
    let zeta = zeta_one_plus(alpha, ZetaDirection::FromBelow)?;
    let mut column = Vec::with_capacity(n);
    column.push(2.0 * scale * (zeta - 1.0));
    column.extend((1..n).map(|k| -scale * ((k + 1) as f64).powf(-1.0 - alpha)));
    Ok(column)
}

/// The dense matrix over all cells of `grid`.
pub fn assemble_v_general(grid: &CellGrid, alpha: f64, nu_bar_value: f64) -> Result<SymmetricMatrix> {
    check_alpha(alpha)?;
    if !(nu_bar_value > 0.0) || !nu_bar_value.is_finite() {
        return Err(Error::InvalidArgument(format!("nu_bar must be positive, got {nu_bar_value}")));
    }
    let d = grid.dim();
    let df = d as f64;
    let scale = c_d_alpha(d, alpha)? * grid.eps().powf(-alpha);
    let diag = scale * (nu_bar_value - df.powf(-0.5 * (df + alpha)));
    let exponent = -df - alpha;
    let rows: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|p| {
            let kp = grid.cell(p);
            let mut diff = vec![0i64; d];
            let mut row = Vec::with_capacity(p + 1);
            for q in 0..p {
                for (j, (a, b)) in kp.iter().zip(grid.cell(q)).enumerate() {
                    diff[j] = a - b;
                }
                row.push(-scale * norm_k(&diff).powf(exponent));
            }
            row.push(diag);
            row
        })
        .collect();
    SymmetricMatrix::from_packed(grid.len(), rows.concat())
}

/// `λ_{n,ε}` for `n = 1..=n_max`.
pub fn lower_bound_sequence(
    alpha: f64,
    shape: DomainShape,
    eps: f64,
    n_max: usize,
) -> Result<LowerBoundResult> {
    lower_bound_sequence_with(alpha, shape, eps, n_max, &BoundsConfig::default())
}

pub fn lower_bound_sequence_with(
    alpha: f64,
    shape: DomainShape,
    eps: f64,
    n_max: usize,
    config: &BoundsConfig,
) -> Result<LowerBoundResult> {
    check_alpha(alpha)?;
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let grid = build_grid_with_cap(shape, eps, config.cell_cap)?;
    let d = grid.dim();
    let nu = nu_bar(d, alpha, config.nu_bar_mode(d))?;
    let cap = c_d_alpha(d, alpha)? * eps.powf(-alpha) * nu;
    let eigenvalues = if d == 1 {
        // consecutive cells, so V is Toeplitz in p - q
        SymmetricToeplitz::new(toeplitz_column(alpha, eps, grid.len())?)?
            .eigenvalues(config.eig_tol)?
    } else {
        crate::eigensolver::eigs_all(&assemble_v_general(&grid, alpha, nu)?, config.eig_tol)?
    };
    let mut clipped = 0;
    let values = (0..n_max)
        .map(|i| match eigenvalues.get(i) {
            Some(&v) if v <= cap => v,
            Some(_) => {
                clipped += 1;
                cap
            }
            None => cap,
        })
        .collect();
    Ok(LowerBoundResult {
        alpha,
        eps,
        shape,
        cap,
        values,
        matrix_order: grid.len(),
        clipped,
    })
}

/// The Toeplitz symbol of the interval matrix `V` at
/// frequency `x ∈ [0, π]`:
///
/// ```text
/// (2c_α/ε^α) (ζ(1+α) - (1/Γ(1+α)) ∫_0^∞ t^α (e^t - cos x)/(e^{2t} - 2e^t cos x + 1) dt).
/// ```
///
/// It vanishes at `x = 0`, increases on `[0, π]`, and at `π` equals
/// `2^{1-α} c_α ζ(1+α)/ε^α`, which bounds every eigenvalue of `V`.
pub fn toeplitz_symbol(alpha: f64, eps: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(0.0..=std::f64::consts::PI).contains(&x) {
        return Err(Error::InvalidArgument(format!("symbol frequency must lie in [0, π], got {x}")));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let s2 = (0.5 * x).sin().powi(2);
    // integrand without t^α, divided through by e^{2t}
    let kernel = move |t: f64| {
        let em = (-t).exp();
        let gap = -(-t).exp_m1();
        em * (gap + 2.0 * em * s2) / (gap * gap + 4.0 * em * s2)
    };
    let quad = QuadSpec::with_tolerance(1e-13);
    // t = v^{1/α} on [0, 1] absorbs the t^{α-1} behaviour at x = 0
    let inv = 1.0 / alpha;
    let mut v_points = vec![0.0];
    if x > 0.0 {
        for scale in [0.01, 0.1, 1.0] {
            let v = (scale * x).min(1.0).powf(alpha);
            if v > 1e-300 && v < 1.0 {
                v_points.push(v);
            }
        }
    }
    v_points.push(1.0);
    v_points.sort_by(f64::total_cmp);
    v_points.dedup();
    let head = integrate_with_breakpoints(
        |v: f64| {
            let t = v.powf(inv);
            inv * t * kernel(t)
        },
        &v_points,
        &quad,
    )?
    .require_converged()?;
    // e^{-t} decay; beyond t = 128 the remainder is below 1e-50
    let tail_points: Vec<f64> = (0..=7).map(|k| 2f64.powi(k)).collect();
    let tail = integrate_with_breakpoints(|t: f64| t.powf(alpha) * kernel(t), &tail_points, &quad)?
        .require_converged()?;
    let integral = head.value + tail.value;
    let zeta = zeta_one_plus(alpha, ZetaDirection::Nearest)?;
    let scale = 2.0 * c_alpha(alpha)? * eps.powf(-alpha);
    Ok(scale * (zeta - integral / gamma_fn(1.0 + alpha)?))
}
