//! Upper bound `λ*_{1,ε}` for the first eigenvalue on the unit ball.
//!
//! The Green function `G` of the ball is the kernel of the inverse operator,
//! so `1/λ₁` is the supremum of `∫∫ G f f` over unit `f ≥ 0`. Any minorant
//! `g ≤ G` that is constant on pairs of cells turns this into the top
//! eigenvalue of the matrix `U_{ij} = ε^d g(κ(i), κ(j))`, and
//! `λ₁ ≤ 1/λ_max(U)`.
//!
//! Writing `p = 1 - |x|²`, `q = 1 - |y|²`, `r = |x - y|` and substituting
//! `s = pq t / r²` in the Riesz formula gives
//!
//! ```text
//! G = C(d,α) (pq)^{α/2} ∫_0^1 t^{α/2-1} (r² + pq t)^{-d/2} dt,
//! ```
//!
//! which decreases in `r`; the `r^{α-d} φ(pq/r²)` form increases in `pq`.
//! Replacing `p`, `q` by their minima over the cells and `r` by its maximum
//! is therefore a rigorous minorant for every `d` and `α`.

use rayon::prelude::*;

use crate::eigensolver::{eig_max_rayleigh, SymmetricMatrix};
use crate::error::{Error, Result};
use crate::grid::{build_grid_with_cap, norm_k, DomainShape, DEFAULT_CELL_CAP};
use crate::specfun::{gamma_fn, riesz_phi, AlphaParams};

/// Power iteration limits for `λ_max(U)`.
const RAYLEIGH_MAX_ITERS: usize = 500;
const RAYLEIGH_TOL: f64 = 1e-12;

/// Relative shrink applied to every cell infimum, covering the rounding
/// error of the incomplete beta evaluation.
const MINORANT_SAFETY: f64 = 1.0 - 1e-12;

/// The Riesz Green function of the unit ball in `R^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenBallEvaluator {
    d: usize,
    params: AlphaParams,
    riesz_constant: f64,
}

impl GreenBallEvaluator {
    pub fn new(d: usize, alpha: f64) -> Result<Self> {
        let params = AlphaParams::new(alpha)?;
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        let half_d = 0.5 * d as f64;
        let riesz_constant = gamma_fn(half_d)?
            / (2f64.powf(alpha)
                * std::f64::consts::PI.powf(half_d)
                * gamma_fn(0.5 * alpha)?.powi(2));
        Ok(Self {
            d,
            params,
            riesz_constant,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    pub fn params(&self) -> &AlphaParams {
        &self.params
    }

    /// `C(d,α) = Γ(d/2) / (2^α π^{d/2} Γ(α/2)²)`.
    pub fn riesz_constant(&self) -> f64 {
        self.riesz_constant
    }

    /// `G` in the variables `p = 1 - |x|²`, `q = 1 - |y|²`, `r = |x - y|`.
    ///
    /// Zero when `p ≤ 0` or `q ≤ 0`. At `r = 0` the value is the limit
    /// `2C (pq)^{(α-d)/2} / (α - d)`, which exists only for `d < α`.
    pub fn green_pqr(&self, p: f64, q: f64, r: f64) -> Result<f64> {
        if !(p.is_finite() && q.is_finite() && r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "green_pqr needs finite p, q and r >= 0, got ({p}, {q}, {r})"
            )));
        }
        if p <= 0.0 || q <= 0.0 {
            return Ok(0.0);
        }
        let alpha = self.params.alpha;
        let df = self.d as f64;
        if r == 0.0 {
            if df >= alpha {
                return Err(Error::GreenDiagonal);
            }
            return Ok(2.0 * self.riesz_constant * (p * q).powf(0.5 * (alpha - df)) / (alpha - df));
        }
        let u = p * q / (r * r);
        Ok(self.riesz_constant * r.powf(alpha - df) * riesz_phi(u, alpha, self.d)?)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::InvalidArgument(format!(
                "expected a point in R^{}, got length {}",
                self.d,
                x.len()
            )));
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("point has non-finite coordinates".into()));
        }
        Ok(())
    }
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum()
}

/// `G(x, y)` for the unit ball; zero when either point is outside the open
/// ball.
pub fn green_ball(ev: &GreenBallEvaluator, x: &[f64], y: &[f64]) -> Result<f64> {
    ev.check_point(x)?;
    ev.check_point(y)?;
    let p = 1.0 - norm_sq(x);
    let q = 1.0 - norm_sq(y);
    let r = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    ev.green_pqr(p, q, r)
}

/// `1 - R²` for the corner of the cell `I_k` farthest from the origin; not
/// positive when the closed cell leaves the open ball.
fn cell_p_min(k: &[i64], eps: f64) -> f64 {
    let far_sq: f64 = k
        .iter()
        .map(|&c| {
            let lo = c as f64 * eps;
            let hi = lo + eps;
            lo.abs().max(hi.abs()).powi(2)
        })
        .sum();
    1.0 - far_sq
}

/// A lower bound for `G` on `I_k × I_l` built from the cell minima of `p`,
/// `q` and the maximum `ε ‖k - l‖` of `r`. Zero when either closed cell is
/// not inside the open ball.
pub fn cell_infimum_g(ev: &GreenBallEvaluator, eps: f64, k: &[i64], l: &[i64]) -> Result<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("cell size must be positive, got {eps}")));
    }
    if k.len() != ev.d || l.len() != ev.d {
        return Err(Error::InvalidArgument(format!(
            "cell indices must have length {}",
            ev.d
        )));
    }
    let p = cell_p_min(k, eps);
    let q = cell_p_min(l, eps);
    if p <= 0.0 || q <= 0.0 {
        return Ok(0.0);
    }
    let diff: Vec<i64> = k.iter().zip(l).map(|(a, b)| a - b).collect();
    let r_max = eps * norm_k(&diff);
    Ok(MINORANT_SAFETY * ev.green_pqr(p, q, r_max)?)
}

/// A pair of boxes `I × J` in `R^d`, stored flat as
/// `[x_lo, x_hi, y_lo, y_hi]` per coordinate.
fn pair_box(k: &[i64], l: &[i64], eps: f64) -> Vec<f64> {
    k.iter()
        .zip(l)
        .flat_map(|(&a, &b)| {
            [
                a as f64 * eps,
                (a + 1) as f64 * eps,
                b as f64 * eps,
                (b + 1) as f64 * eps,
            ]
        })
        .collect()
}

fn outer(lo: f64, hi: f64) -> f64 {
    if lo.abs() > hi.abs() {
        lo
    } else {
        hi
    }
}

fn farthest(from: f64, lo: f64, hi: f64) -> f64 {
    if (lo - from).abs() > (hi - from).abs() {
        lo
    } else {
        hi
    }
}

/// [`cell_infimum_g`] for a pair of boxes: `p`, `q` at the outer corners
/// and `r` at its largest value.
fn box_lower(ev: &GreenBallEvaluator, b: &[f64]) -> Result<f64> {
    let (mut far_x, mut far_y, mut r_sq) = (0.0, 0.0, 0.0);
    for c in b.chunks_exact(4) {
        far_x += c[0].abs().max(c[1].abs()).powi(2);
        far_y += c[2].abs().max(c[3].abs()).powi(2);
        r_sq += (c[1] - c[2]).abs().max((c[3] - c[0]).abs()).powi(2);
    }
    Ok(MINORANT_SAFETY * ev.green_pqr(1.0 - far_x, 1.0 - far_y, r_sq.sqrt())?)
}

/// `G` at a point pair of the boxes: the outer corner of one against the
/// corner of the other farthest from it, whichever is smaller. An upper
/// bound for the infimum.
fn box_corner(ev: &GreenBallEvaluator, b: &[f64]) -> Result<f64> {
    let mut best = f64::INFINITY;
    for swap in [false, true] {
        let (mut p_far, mut q_far, mut r_sq) = (0.0, 0.0, 0.0);
        for c in b.chunks_exact(4) {
            let (own, other) = if swap { ((c[2], c[3]), (c[0], c[1])) } else { ((c[0], c[1]), (c[2], c[3])) };
            let x = outer(own.0, own.1);
            let y = farthest(x, other.0, other.1);
            p_far += x * x;
            q_far += y * y;
            r_sq += (x - y) * (x - y);
        }
        best = best.min(ev.green_pqr(1.0 - p_far, 1.0 - q_far, r_sq.sqrt())?);
    }
    Ok(best)
}

/// Bisections per coordinate in [`cell_infimum_refined`].
const MAX_REFINE_LEVEL: usize = 6;

/// A lower bound for `G` on `I_k × I_l` within a relative `rel_tol` of the
/// true infimum.
///
/// The pair of cells is a box in `R^{2d}`; it is bisected one coordinate at
/// a time, in turn, while the bound of [`cell_infimum_g`] on a piece stays
/// below `(1 - rel_tol)` times the smallest corner value seen so far. The
/// result is the minimum of the bounds over the final cover, so it is a
/// minorant whatever the depth reached.
pub fn cell_infimum_refined(
    ev: &GreenBallEvaluator,
    eps: f64,
    k: &[i64],
    l: &[i64],
    rel_tol: f64,
) -> Result<f64> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "relative tolerance must lie in (0, 1), got {rel_tol}"
        )));
    }
    let root = cell_infimum_g(ev, eps, k, l)?;
    if root == 0.0 {
        return Ok(0.0);
    }
    let d = ev.d;
    let width = 4 * d;
    let max_depth = MAX_REFINE_LEVEL * 2 * d;
    let mut stack = pair_box(k, l, eps);
    let mut meta = vec![(0usize, root)];
    let mut feasible = box_corner(ev, &stack)?;
    let mut lower = f64::INFINITY;
    let mut child = vec![0.0; width];
    while let Some((depth, g)) = meta.pop() {
        let top = stack.len() - width;
        if g >= (1.0 - rel_tol) * feasible || depth == max_depth {
            lower = lower.min(g);
            stack.truncate(top);
            continue;
        }
        // coordinate j of x is slot 4j, of y slot 4j + 2
        let axis = depth % (2 * d);
        let slot = 4 * (axis % d) + if axis < d { 0 } else { 2 };
        child.copy_from_slice(&stack[top..]);
        stack.truncate(top);
        let mid = 0.5 * (child[slot] + child[slot + 1]);
        let (lo, hi) = (child[slot], child[slot + 1]);
        for (a, b) in [(lo, mid), (mid, hi)] {
            child[slot] = a;
            child[slot + 1] = b;
            feasible = feasible.min(box_corner(ev, &child)?);
            meta.push((depth + 1, box_lower(ev, &child)?));
            stack.extend_from_slice(&child);
        }
    }
    Ok(lower)
}

/// Result of [`lambda1_upper`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBoundResult {
    pub alpha: f64,
    pub eps: f64,
    /// Number of cells inside the ball, the order of `U`.
    pub matrix_order: usize,
    pub lambda1_upper: f64,
    /// Whether the cell kernel is a proven minorant of `G`. The monotone
    /// construction is rigorous for every `(d, α)`, so this is always set.
    pub certified: bool,
    /// Power iterations spent on `λ_max(U)`.
    pub iterations: usize,
}

/// Settings for [`lambda1_upper_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBoundConfig {
    pub cell_cap: usize,
    /// Relative tolerance of [`cell_infimum_refined`]; `None` uses the
    /// one-shot bound of [`cell_infimum_g`].
    pub refine_tol: Option<f64>,
}

impl Default for UpperBoundConfig {
    fn default() -> Self {
        Self {
            cell_cap: DEFAULT_CELL_CAP,
            refine_tol: Some(3e-3),
        }
    }
}

/// `U` over the cells of `shape` lying inside the ball.
pub fn assemble_u(
    shape: DomainShape,
    alpha: f64,
    eps: f64,
    config: &UpperBoundConfig,
) -> Result<SymmetricMatrix> {
    let d = match shape {
        DomainShape::Interval => 1,
        DomainShape::Ball { d } => d,
        other => {
            return Err(Error::InvalidArgument(format!(
                "upper bounds need the unit ball, got {other:?}"
            )))
        }
    };
    let ev = GreenBallEvaluator::new(d, alpha)?;
    let grid = build_grid_with_cap(shape, eps, config.cell_cap)?;
    let interior: Vec<&[i64]> = (0..grid.len())
        .filter(|&p| grid.fully_inside(p))
        .map(|p| grid.cell(p))
        .collect();
    if interior.is_empty() {
        return Err(Error::NoInteriorCells(eps));
    }
    let weight = eps.powi(d as i32);
    let g = |k: &[i64], l: &[i64]| match config.refine_tol {
        Some(tol) => cell_infimum_refined(&ev, eps, k, l, tol),
        None => cell_infimum_g(&ev, eps, k, l),
    };
    let rows: Vec<Vec<f64>> = (0..interior.len())
        .into_par_iter()
        .map(|i| {
            (0..=i)
                .map(|j| Ok(weight * g(interior[i], interior[j])?))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    SymmetricMatrix::from_packed(interior.len(), rows.concat())
}

/// `λ*_{1,ε}` for the interval or a ball, `1/xᵀUx` at the final power
/// iterate.
pub fn lambda1_upper(shape: DomainShape, alpha: f64, eps: f64) -> Result<UpperBoundResult> {
    lambda1_upper_with(shape, alpha, eps, &UpperBoundConfig::default())
}

pub fn lambda1_upper_with(
    shape: DomainShape,
    alpha: f64,
    eps: f64,
    config: &UpperBoundConfig,
) -> Result<UpperBoundResult> {
    let u = assemble_u(shape, alpha, eps, config)?;
    let est = eig_max_rayleigh(&u, RAYLEIGH_MAX_ITERS, RAYLEIGH_TOL)?;
    if !(est.certified_lower > 0.0) {
        return Err(Error::InvalidArgument(
            "the minorant matrix has no positive Rayleigh quotient".into(),
        ));
    }
    Ok(UpperBoundResult {
        alpha,
        eps,
        matrix_order: u.order(),
        lambda1_upper: 1.0 / est.certified_lower,
        certified: true,
        iterations: est.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lower_bounds::lower_bound_sequence;
    use crate::quadrature::{integrate_with_breakpoints, QuadSpec};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn interval_closed_form() {
        let ev = GreenBallEvaluator::new(1, 1.0).unwrap();
        assert!((ev.riesz_constant() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let want = (3f64.sqrt() + 2.0).ln() / PI;
        let got = green_ball(&ev, &[0.0], &[0.5]).unwrap();
        assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        assert!((got - 0.4192007182789827).abs() < 1e-13);
    }

    // ∫_B G(x, y) dy is the expected exit time
    // Γ(d/2) (1-|x|²)^{α/2} / (2^α Γ(1+α/2) Γ((d+α)/2)).
    #[test]
    fn interval_integrates_to_exit_time() {
        let spec = QuadSpec::with_tolerance(1e-10);
        for &alpha in &[0.5, 1.0, 1.5] {
            let ev = GreenBallEvaluator::new(1, alpha).unwrap();
            for &x in &[0.0, 0.3, -0.8] {
                let f = |y: f64| {
                    if y == x {
                        0.0
                    } else {
                        green_ball(&ev, &[x], &[y]).unwrap()
                    }
                };
                let total = integrate_with_breakpoints(f, &[-1.0, x, 1.0], &spec)
                    .unwrap()
                    .value;
                let want = gamma_fn(0.5).unwrap() * (1.0 - x * x).powf(0.5 * alpha)
                    / (2f64.powf(alpha)
                        * gamma_fn(1.0 + 0.5 * alpha).unwrap()
                        * gamma_fn(0.5 * (1.0 + alpha)).unwrap());
                assert!((total - want).abs() < 1e-7 * want, "alpha={alpha} x={x}: {total} vs {want}");
            }
        }
    }

    #[test]
    fn substituted_form_agrees() {
        // C (pq)^{α/2} ∫_0^1 t^{α/2-1} (r² + pq t)^{-d/2} dt with t = w^{2/α}
        let spec = QuadSpec::with_tolerance(1e-12);
        for &(d, alpha) in &[(2usize, 0.5), (2, 1.0), (2, 1.5), (1, 1.7)] {
            let ev = GreenBallEvaluator::new(d, alpha).unwrap();
            let (p, q, r) = (0.6, 0.35, 0.2);
            let a = 0.5 * alpha;
            let inner = integrate_with_breakpoints(
                |w: f64| (r * r + p * q * w.powf(1.0 / a)).powf(-0.5 * d as f64),
                &[0.0, 1.0],
                &spec,
            )
            .unwrap()
            .value
                / a;
            let want = ev.riesz_constant() * (p * q).powf(a) * inner;
            let got = ev.green_pqr(p, q, r).unwrap();
            assert!((got - want).abs() < 1e-10 * want, "d={d} alpha={alpha}: {got} vs {want}");
        }
    }

    #[test]
    fn exterior_and_diagonal() {
        let ev = GreenBallEvaluator::new(2, 1.0).unwrap();
        assert_eq!(green_ball(&ev, &[0.9, 0.5], &[0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(
            green_ball(&ev, &[0.1, 0.2], &[0.1, 0.2]),
            Err(Error::GreenDiagonal)
        ));
        assert!(green_ball(&ev, &[0.1], &[0.2]).is_err());
        // finite on the diagonal when d < α
        let ev = GreenBallEvaluator::new(1, 1.5).unwrap();
        let on = green_ball(&ev, &[0.2], &[0.2]).unwrap();
        // G(r) - G(0) = O(r^{α-d})
        let near = green_ball(&ev, &[0.2], &[0.2 + 1e-12]).unwrap();
        assert!((on - near).abs() < 1e-5 * on);
    }

    proptest! {
        #[test]
        fn symmetric(x0 in -0.7f64..0.7, x1 in -0.7f64..0.7, y0 in -0.7f64..0.7, y1 in -0.7f64..0.7,
                     alpha in 0.1f64..1.9) {
            prop_assume!((x0 - y0).abs() + (x1 - y1).abs() > 1e-6);
            let ev = GreenBallEvaluator::new(2, alpha).unwrap();
            let a = green_ball(&ev, &[x0, x1], &[y0, y1]).unwrap();
            let b = green_ball(&ev, &[y0, y1], &[x0, x1]).unwrap();
            prop_assert!((a - b).abs() <= 1e-14 * a);
        }

        #[test]
        fn decreasing_in_r(p in 0.01f64..1.0, q in 0.01f64..1.0, r in 1e-3f64..2.0, dr in 1e-3f64..0.5,
                           alpha in 0.1f64..1.9, d in 1usize..3) {
            let ev = GreenBallEvaluator::new(d, alpha).unwrap();
            let near = ev.green_pqr(p, q, r).unwrap();
            let far = ev.green_pqr(p, q, r + dr).unwrap();
            prop_assert!(far < near);
        }
    }

    #[test]
    fn boundary_cells_are_zero() {
        let ev = GreenBallEvaluator::new(2, 1.0).unwrap();
        // [0.8, 1.0] × [0, 0.2] touches the circle
        assert_eq!(cell_infimum_g(&ev, 0.2, &[4, 0], &[0, 0]).unwrap(), 0.0);
        assert!(cell_infimum_g(&ev, 0.2, &[4], &[0, 0]).is_err());
        assert!(cell_infimum_g(&ev, 0.0, &[0, 0], &[0, 0]).is_err());
    }

    #[test]
    fn minorant_audit_adjacent_cells() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let eps = 0.1;
        for &alpha in &[0.5, 1.0, 1.5] {
            let ev = GreenBallEvaluator::new(2, alpha).unwrap();
            for (k, l) in [([2i64, 3], [3i64, 4]), ([-1, -1], [0, 0]), ([5, -3], [6, -2])] {
                let g = cell_infimum_g(&ev, eps, &k, &l).unwrap();
                assert!(g > 0.0);
                for _ in 0..10_000 {
                    let x: Vec<f64> = k.iter().map(|&c| (c as f64 + rng.gen::<f64>()) * eps).collect();
                    let y: Vec<f64> = l.iter().map(|&c| (c as f64 + rng.gen::<f64>()) * eps).collect();
                    assert!(g <= green_ball(&ev, &x, &y).unwrap());
                }
            }
        }
    }

    #[test]
    fn infimum_shrinks_towards_boundary() {
        let ev = GreenBallEvaluator::new(2, 1.0).unwrap();
        let eps = 0.05;
        let mut prev = f64::INFINITY;
        for j in 0..19 {
            let g = cell_infimum_g(&ev, eps, &[j, 0], &[j + 1, 0]).unwrap();
            assert!(g <= prev, "step {j}: {g} > {prev}");
            prev = g;
        }
        assert_eq!(prev, 0.0);
    }

    #[test]
    fn interval_upper_bound_is_coherent() {
        for &alpha in &[0.5, 1.0, 1.5] {
            let up = lambda1_upper(DomainShape::Interval, alpha, 2.0 / 200.0).unwrap();
            let low = lower_bound_sequence(alpha, DomainShape::Interval, 2.0 / 200.0, 1).unwrap();
            assert!(up.certified);
            assert_eq!(up.matrix_order, 198);
            assert!(low.values[0] <= up.lambda1_upper);
            assert!(up.lambda1_upper >= 0.5 * (PI / 2.0).powf(alpha));
        }
    }

    #[test]
    fn disk_refinement_is_monotone() {
        for refine_tol in [None, Some(1e-2)] {
            let config = UpperBoundConfig {
                refine_tol,
                ..UpperBoundConfig::default()
            };
            let mut prev = f64::INFINITY;
            for &n in &[5.0, 10.0, 25.0] {
                if refine_tol.is_some() && n > 10.0 {
                    break;
                }
                let up = lambda1_upper_with(DomainShape::Ball { d: 2 }, 1.0, 1.0 / n, &config).unwrap();
                assert!(up.lambda1_upper <= prev, "eps=1/{n}: {} > {prev}", up.lambda1_upper);
                prev = up.lambda1_upper;
            }
        }
    }

    #[test]
    fn refined_infimum_is_tight_minorant() {
        let eps = 0.04;
        let tol = 1e-3;
        for &alpha in &[0.5, 1.0, 1.5] {
            let ev = GreenBallEvaluator::new(2, alpha).unwrap();
            for (k, l) in [([3i64, 4], [-5i64, 2]), ([10, 10], [12, 9]), ([0, 0], [0, 1]), ([7, -7], [7, -7])] {
                let plain = cell_infimum_g(&ev, eps, &k, &l).unwrap();
                let refined = cell_infimum_refined(&ev, eps, &k, &l, tol).unwrap();
                // minimum over a 17 × 17 point lattice in each cell (skipping x = y)
                let m = 16;
                let pts = |k: &[i64; 2]| -> Vec<[f64; 2]> {
                    (0..=m)
                        .flat_map(|a| (0..=m).map(move |b| (a, b)))
                        .map(|(a, b)| {
                            [
                                (k[0] as f64 + a as f64 / m as f64) * eps,
                                (k[1] as f64 + b as f64 / m as f64) * eps,
                            ]
                        })
                        .collect()
                };
                let mut sampled = f64::INFINITY;
                for x in pts(&k) {
                    for y in pts(&l) {
                        if x != y {
                            sampled = sampled.min(green_ball(&ev, &x, &y).unwrap());
                        }
                    }
                }
                assert!(plain <= refined, "alpha={alpha} {k:?} {l:?}");
                assert!(refined <= sampled, "alpha={alpha} {k:?} {l:?}: {refined} > {sampled}");
                assert!(refined >= (1.0 - 2.0 * tol) * sampled, "alpha={alpha} {k:?} {l:?}: {refined} vs {sampled}");
            }
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(lambda1_upper(DomainShape::Square, 1.0, 0.1).is_err());
        assert!(matches!(
            lambda1_upper(DomainShape::Interval, 1.0, 1.0),
            Err(Error::NoInteriorCells(_))
        ));
    }
}
