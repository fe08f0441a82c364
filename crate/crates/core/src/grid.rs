//! Cube partitions of a domain and the lattice constant `ν̄`.
//!
//! Space is tiled by closed cubes `I_k = ∏ [k_j ε, (k_j + 1) ε]`, `k ∈ Z^d`.
//! A [`CellGrid`] lists the cubes that meet the open domain, in
//! lexicographic order of `k`; the position of a cube in that list is its
//! matrix index.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use crate::error::{check_alpha, Error, Result};
use crate::quadrature::{integrate_with_breakpoints, QuadSpec};
use crate::specfun::{zeta_one_plus, ZetaDirection};

pub const DEFAULT_CELL_CAP: usize = 20_000;

/// Relative slack (in units of `ε`) for the geometric cell tests, so cells
/// that only touch the boundary are classified consistently.
const GEOM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainShape {
    /// `(-1, 1)`.
    Interval,
    /// The open unit ball in `R^d`.
    Ball { d: usize },
    /// `(-1, 1)²`.
    Square,
    /// The half-plane `{x_1 > 0}` in `R^2`; unbounded, for exercising
    /// error paths.
    HalfSpaceTest,
}

impl DomainShape {
    pub fn dim(&self) -> usize {
        match self {
            DomainShape::Interval => 1,
            DomainShape::Ball { d } => *d,
            DomainShape::Square | DomainShape::HalfSpaceTest => 2,
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, DomainShape::HalfSpaceTest)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            DomainShape::Interval | DomainShape::Square => x.iter().all(|c| c.abs() < 1.0),
            DomainShape::Ball { .. } => x.iter().map(|c| c * c).sum::<f64>() < 1.0,
            DomainShape::HalfSpaceTest => x[0] > 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            DomainShape::Ball { d } if *d == 0 => {
                Err(Error::InvalidArgument("ball dimension must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// `(meets D, contained in D)` for the closed cube `I_k`.
    fn classify(&self, k: &[i64], eps: f64) -> (bool, bool) {
        let tol = GEOM_TOL * eps;
        match self {
            DomainShape::Interval | DomainShape::Square => {
                let mut meets = true;
                let mut inside = true;
                for &kj in k {
                    let (a, b) = (kj as f64 * eps, (kj + 1) as f64 * eps);
                    meets &= a < 1.0 - tol && b > -1.0 + tol;
                    inside &= a > -1.0 + tol && b < 1.0 - tol;
                }
                (meets, inside)
            }
            DomainShape::Ball { .. } => {
                let mut near = 0.0;
                let mut far = 0.0;
                for &kj in k {
                    let (a, b) = (kj as f64 * eps, (kj + 1) as f64 * eps);
                    let n = if a > 0.0 {
                        a
                    } else if b < 0.0 {
                        -b
                    } else {
                        0.0
                    };
                    near += n * n;
                    let f = a.abs().max(b.abs());
                    far += f * f;
                }
                (near.sqrt() < 1.0 - tol, far.sqrt() < 1.0 - tol)
            }
            DomainShape::HalfSpaceTest => {
                let b = (k[0] + 1) as f64 * eps;
                let a = k[0] as f64 * eps;
                (b > tol, a > tol)
            }
        }
    }
}

/// The cells `K_ε` meeting a domain, with the enumeration `κ`.
#[derive(Debug, Clone)]
pub struct CellGrid {
    shape: DomainShape,
    d: usize,
    eps: f64,
    /// `κ(p)` stored row-major with stride `d`.
    cells: Vec<i64>,
    inside: Vec<bool>,
    index: HashMap<Vec<i64>, usize>,
}

impl CellGrid {
    pub fn shape(&self) -> DomainShape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn len(&self) -> usize {
        self.inside.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inside.is_empty()
    }

    /// `κ(p)`.
    pub fn cell(&self, p: usize) -> &[i64] {
        &self.cells[p * self.d..(p + 1) * self.d]
    }

    /// `κ^{-1}(k)`, if the cell is listed.
    pub fn index_of(&self, k: &[i64]) -> Option<usize> {
        self.index.get(k).copied()
    }

    /// Whether the closed cell `I_{κ(p)}` lies inside the open domain.
    pub fn fully_inside(&self, p: usize) -> bool {
        self.inside[p]
    }

    pub fn cells(&self) -> impl Iterator<Item = &[i64]> {
        self.cells.chunks_exact(self.d)
    }

    /// Index of the cell containing `x` (cells are closed, so on a shared
    /// face the cell with the larger index wins).
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let k: Vec<i64> = x.iter().map(|c| (c / self.eps).floor() as i64).collect();
        self.index_of(&k)
    }
}

pub fn build_grid(shape: DomainShape, eps: f64) -> Result<CellGrid> {
    build_grid_with_cap(shape, eps, DEFAULT_CELL_CAP)
}

pub fn build_grid_with_cap(shape: DomainShape, eps: f64, cap: usize) -> Result<CellGrid> {
    shape.validate()?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("cell size must be positive, got {eps}")));
    }
    if !shape.is_bounded() {
        return Err(Error::UnboundedDomain);
    }
    let d = shape.dim();
    let lo = (-1.0 / eps).floor() as i64 - 1;
    let hi = (1.0 / eps).ceil() as i64;
    let span = (hi - lo + 1) as f64;
    if span.powi(d as i32) > 1e12 {
        return Err(Error::CellCapExceeded {
            count: usize::MAX,
            cap,
        });
    }

    let mut cells = Vec::new();
    let mut inside = Vec::new();
    let mut k = vec![lo; d];
    loop {
        let (meets, full) = shape.classify(&k, eps);
        if meets {
            if inside.len() == cap {
                return Err(Error::CellCapExceeded {
                    count: cap + 1,
                    cap,
                });
            }
            cells.extend_from_slice(&k);
            inside.push(full);
        }
        // odometer, last coordinate fastest
        let mut j = d;
        loop {
            if j == 0 {
                let index = cells
                    .chunks_exact(d)
                    .enumerate()
                    .map(|(p, c)| (c.to_vec(), p))
                    .collect();
                return Ok(CellGrid {
                    shape,
                    d,
                    eps,
                    cells,
                    inside,
                    index,
                });
            }
            j -= 1;
            if k[j] < hi {
                k[j] += 1;
                break;
            }
            k[j] = lo;
        }
    }
}

/// `‖k‖ = √(Σ (|k_j| + 1)²)`.
pub fn norm_k(k: &[i64]) -> f64 {
    k.iter()
        .map(|&c| {
            let m = c.unsigned_abs() as f64 + 1.0;
            m * m
        })
        .sum::<f64>()
        .sqrt()
}

/// How [`nu_bar`] approximates `ν̄ = Σ_{k ∈ Z^d} ‖k‖^{-d-α}` from below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NuBarMode {
    /// `2ζ(1+α) - 1` with `ζ` rounded down; `d = 1` only.
    ExactOneD,
    /// Partial sum over `‖k‖_∞ ≤ R`.
    Truncated(u64),
    /// Partial sum over `‖k‖_∞ ≤ R` plus a lower bound for the rest of the
    /// lattice by comparison with integrals; `d ≤ 2`.
    TailBounded(u64),
}

pub fn nu_bar(d: usize, alpha: f64, mode: NuBarMode) -> Result<f64> {
    check_alpha(alpha)?;
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    match mode {
        NuBarMode::ExactOneD => {
            if d != 1 {
                return Err(Error::InvalidArgument(format!(
                    "exact nu_bar is only available for d = 1, got d = {d}"
                )));
            }
            Ok(2.0 * zeta_one_plus(alpha, ZetaDirection::FromBelow)? - 1.0)
        }
        NuBarMode::Truncated(r) => {
            if r == 0 {
                return Err(Error::InvalidArgument("truncation radius must be >= 1".into()));
            }
            Ok(partial_sum(d, alpha, r))
        }
        NuBarMode::TailBounded(r) => {
            if r == 0 {
                return Err(Error::InvalidArgument("truncation radius must be >= 1".into()));
            }
            let tail = match d {
                1 => {
                    // Σ_{m ≥ M} m^{-1-α} ≥ ∫_M^∞, on both sides
                    let m = r as f64 + 2.0;
                    2.0 * m.powf(-alpha) / alpha
                }
                2 => tail_lower_bound_2d(alpha, r as f64 + 2.0)?,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "tail-bounded nu_bar supports d <= 2, got d = {d}"
                    )))
                }
            };
            Ok(partial_sum(d, alpha, r) + tail)
        }
    }
}

/// `Σ_{‖k‖_∞ ≤ R} ‖k‖^{-d-α}`, summed over `m_j = |k_j| + 1` with
/// multiplicity 1 for `m_j = 1` and 2 otherwise, smallest terms first.
fn partial_sum(d: usize, alpha: f64, r: u64) -> f64 {
    let s = -0.5 * (d as f64 + alpha);
    let weight = |m: u64| if m == 1 { 1.0 } else { 2.0 };
    match d {
        1 => (1..=r + 1)
            .rev()
            .map(|m| weight(m) * ((m * m) as f64).powf(s))
            .sum(),
        2 => {
            // m1 ≤ m2 with the off-diagonal pairs counted twice
            let mut total = 0.0;
            for m2 in (1..=r + 1).rev() {
                let w2 = weight(m2);
                let sq2 = (m2 * m2) as f64;
                let mut row = 0.0;
                for m1 in (1..m2).rev() {
                    row += weight(m1) * (sq2 + (m1 * m1) as f64).powf(s);
                }
                total += w2 * (2.0 * row + w2 * (2.0 * sq2).powf(s));
            }
            total
        }
        _ => {
            let mut total = 0.0;
            let mut m = vec![1u64; d];
            loop {
                let sq: u64 = m.iter().map(|v| v * v).sum();
                let w: f64 = m.iter().map(|&v| weight(v)).product();
                total += w * (sq as f64).powf(s);
                let mut j = 0;
                loop {
                    if j == d {
                        return total;
                    }
                    if m[j] <= r {
                        m[j] += 1;
                        break;
                    }
                    m[j] = 1;
                    j += 1;
                }
            }
        }
    }
}

/// Lower bound for `Σ ‖k‖^{-2-α}` over `k ∈ Z²` with `max_j |k_j| + 1 ≥ M`.
///
/// Each term dominates the integral of `|x|^{-2-α}` over the unit square
/// above and to the right of its lattice point `m = (|k_1|+1, |k_2|+1)`.
/// Off the axes this gives `4 ∫` over `[2,∞)² \ [2,M)²`; on the axes
/// `m_1 = 1` it gives `4 ∫_M^∞ (1 + y²)^{-1-α/2} dy`.
fn tail_lower_bound_2d(alpha: f64, m: f64) -> Result<f64> {
    let s = 2.0 + alpha;
    let quad = QuadSpec::with_tolerance(1e-13);
    let (q_m2, e1) = quadrant_integral(alpha, m, 2.0, &quad)?;
    let (q_2m, e2) = quadrant_integral(alpha, 2.0, m, &quad)?;
    let (q_mm, e3) = quadrant_integral(alpha, m, m, &quad)?;
    let interior = q_m2 + q_2m - q_mm - (e1 + e2 + e3);
    let axis = (1.0 + 1.0 / (m * m)).powf(-0.5 * s) * m.powf(1.0 - s) / (s - 1.0);
    Ok((4.0 * interior + 4.0 * axis).max(0.0))
}

/// `∫_{x ≥ a, y ≥ b} |(x, y)|^{-2-α} dx dy` in polar form, with its
/// quadrature error estimate.
fn quadrant_integral(alpha: f64, a: f64, b: f64, quad: &QuadSpec) -> Result<(f64, f64)> {
    let theta_star = (b / a).atan();
    let lower = integrate_with_breakpoints(
        |t: f64| (t.sin() / b).powf(alpha),
        &[0.0, 0.5 * theta_star, theta_star],
        quad,
    )?
    .require_converged()?;
    let upper = integrate_with_breakpoints(
        |t: f64| (t.cos() / a).powf(alpha),
        &[theta_star, 0.5 * (theta_star + FRAC_PI_2), FRAC_PI_2],
        quad,
    )?
    .require_converged()?;
    Ok((
        (lower.value + upper.value) / alpha,
        (lower.error_estimate + upper.error_estimate) / alpha + 1e-15 * (lower.value + upper.value),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn small_grids() {
        let g = build_grid(DomainShape::Interval, 0.5).unwrap();
        let ks: Vec<i64> = g.cells().map(|c| c[0]).collect();
        assert_eq!(ks, vec![-2, -1, 0, 1]);
        for shape in [DomainShape::Square, DomainShape::Ball { d: 2 }] {
            let g = build_grid(shape, 1.0).unwrap();
            let ks: Vec<Vec<i64>> = g.cells().map(|c| c.to_vec()).collect();
            assert_eq!(ks, vec![vec![-1, -1], vec![-1, 0], vec![0, -1], vec![0, 0]]);
        }
    }

    #[test]
    fn kappa_is_a_bijection() {
        let g = build_grid(DomainShape::Ball { d: 2 }, 0.1).unwrap();
        for p in 0..g.len() {
            assert_eq!(g.index_of(g.cell(p)), Some(p));
            if g.fully_inside(p) {
                assert!(DomainShape::Ball { d: 2 }.classify(g.cell(p), 0.1).0);
            }
        }
        assert_eq!(g.index_of(&[100, 100]), None);
    }

    #[test]
    fn working_sizes() {
        for n in [2usize, 4, 50, 1600, 5000] {
            let g = build_grid(DomainShape::Interval, 2.0 / n as f64).unwrap();
            assert_eq!(g.len(), n);
            assert_eq!(g.cells().filter(|_| true).count(), n);
            let inner = (0..g.len()).filter(|&p| g.fully_inside(p)).count();
            assert_eq!(inner, n - 2);
        }
        let sq = build_grid(DomainShape::Square, 1.0 / 25.0).unwrap();
        assert_eq!(sq.len(), 2500);
        let disk = build_grid(DomainShape::Ball { d: 2 }, 1.0 / 25.0).unwrap();
        assert!((1900..=2100).contains(&disk.len()), "{}", disk.len());
    }

    #[test]
    fn domain_is_covered() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for shape in [DomainShape::Interval, DomainShape::Square, DomainShape::Ball { d: 2 }] {
            let g = build_grid(shape, 0.07).unwrap();
            let mut hits = 0;
            while hits < 2000 {
                let x: Vec<f64> = (0..shape.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                if shape.contains(&x) {
                    assert!(g.locate(&x).is_some(), "{x:?} not covered");
                    hits += 1;
                }
            }
        }
    }

    #[test]
    fn grid_errors() {
        assert_eq!(
            build_grid(DomainShape::HalfSpaceTest, 0.5).unwrap_err(),
            Error::UnboundedDomain
        );
        assert!(build_grid(DomainShape::Interval, 0.0).is_err());
        assert!(build_grid(DomainShape::Interval, -1.0).is_err());
        assert!(matches!(
            build_grid_with_cap(DomainShape::Square, 0.01, 1000),
            Err(Error::CellCapExceeded { cap: 1000, .. })
        ));
    }

    #[test]
    fn norm_k_values() {
        assert_eq!(norm_k(&[0]), 1.0);
        assert_eq!(norm_k(&[0, 0]), 2f64.sqrt());
        assert_eq!(norm_k(&[1, -2]), 13f64.sqrt());
        // ν_0 = d^{-(d+α)/2}
        for d in 1..=3 {
            let alpha = 0.7;
            let nu0 = norm_k(&vec![0; d]).powf(-(d as f64) - alpha);
            assert!((nu0 - (d as f64).powf(-0.5 * (d as f64 + alpha))).abs() < 1e-15);
        }
    }

    #[test]
    fn nu_bar_one_d() {
        let exact = nu_bar(1, 1.0, NuBarMode::ExactOneD).unwrap();
        assert!((exact - (PI * PI / 3.0 - 1.0)).abs() < 1e-10);
        assert!(exact <= PI * PI / 3.0 - 1.0);
        let trunc = nu_bar(1, 1.0, NuBarMode::Truncated(1_000_000)).unwrap();
        assert!(trunc < exact && exact - trunc < 1e-5);
        let tail = nu_bar(1, 1.0, NuBarMode::TailBounded(1000)).unwrap();
        assert!(tail <= exact && exact - tail < 1e-6);
        assert!(nu_bar(2, 1.0, NuBarMode::ExactOneD).is_err());
        assert!(nu_bar(3, 1.0, NuBarMode::TailBounded(5)).is_err());
        assert!(nu_bar(1, 1.0, NuBarMode::Truncated(0)).is_err());
    }

    #[test]
    fn nu_bar_two_d_increases_and_tail_closes_gap() {
        let vals: Vec<f64> = [10, 100, 1000]
            .iter()
            .map(|&r| nu_bar(2, 1.0, NuBarMode::Truncated(r)).unwrap())
            .collect();
        assert!(vals[0] < vals[1] && vals[1] < vals[2]);
        // tail-bounded values must stay below every larger partial sum's
        // limit; compare a coarse tail bound against a much finer one
        for alpha in [0.5, 1.0, 1.5] {
            let coarse = nu_bar(2, alpha, NuBarMode::TailBounded(200)).unwrap();
            let fine_partial = nu_bar(2, alpha, NuBarMode::Truncated(3000)).unwrap();
            let fine = nu_bar(2, alpha, NuBarMode::TailBounded(3000)).unwrap();
            assert!(coarse <= fine, "alpha={alpha}");
            assert!(fine - coarse < 2e-3, "alpha={alpha}: {coarse} {fine}");
            assert!(fine > fine_partial);
        }
    }

    #[test]
    fn quadrant_integral_matches_cartesian() {
        // nested Cartesian quadrature at 20 digits (mpmath)
        let (alpha, a, b) = (0.8, 3.0, 2.0);
        let want = 0.412_829_672_245_296_8;
        let (got, _) = quadrant_integral(alpha, a, b, &QuadSpec::with_tolerance(1e-13)).unwrap();
        assert!((got - want).abs() < 1e-11, "{got} vs {want}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn grid_cells_meet_the_domain(n in 2usize..40, which in 0usize..3) {
            let shape = [DomainShape::Interval, DomainShape::Square, DomainShape::Ball { d: 2 }][which];
            let eps = 2.0 / n as f64;
            let g = build_grid(shape, eps).unwrap();
            for p in 0..g.len() {
                let k = g.cell(p);
                let centre: Vec<f64> = k.iter().map(|&c| (c as f64 + 0.5) * eps).collect();
                // some point of the closed cell lies in D: take the point of the
                // cell nearest the origin, nudged inward
                let near: Vec<f64> = k.iter().map(|&c| {
                    let (a, b) = (c as f64 * eps, (c + 1) as f64 * eps);
                    (0.0f64).clamp(a, b) * (1.0 - 1e-12)
                }).collect();
                prop_assert!(shape.contains(&near), "{k:?}");
                if g.fully_inside(p) {
                    prop_assert!(shape.contains(&centre));
                }
            }
        }
    }
}
