//! Asymptotic eigenvalues and approximate eigenfunctions on `(-1, 1)`.
//!
//! The approximate eigenfunction `φ̃_n` glues two copies of the half-line
//! eigenfunction `F(μ_n ·)` anchored at the two endpoints, using the
//! piecewise-quadratic cutoff [`q_glue`]:
//!
//! ```text
//! φ̃_n(x) = q(-x) F(μ_n (1 + x)) - (-1)^n q(x) F(μ_n (1 - x)),
//! ```
//!
//! with `μ_n = nπ/2 - βπ/8` and approximate eigenvalue `λ̃_n = μ_n^α`. The
//! sign makes the two sine parts of `F` agree, so `φ̃_n` is even for odd `n`
//! and odd for even `n`.

use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{check_alpha, Error, Result};
use crate::halfline::HalfLineKernel;
use crate::quadrature::{integrate_with_breakpoints, QuadSpec};
use crate::specfun::c_alpha;

const BAND_CONSTANT: f64 = 30_000.0;
const BAND_THRESHOLD_CONSTANT: f64 = 4_000.0;

/// The `C²`-piecewise cutoff with `q(x) + q(-x) = 1`, equal to 0 left of
/// `-1/3` and 1 right of `1/3`.
pub fn q_glue(x: f64) -> f64 {
    const THIRD: f64 = 1.0 / 3.0;
    if x <= -THIRD {
        0.0
    } else if x <= 0.0 {
        4.5 * (x + THIRD) * (x + THIRD)
    } else if x < THIRD {
        1.0 - 4.5 * (x - THIRD) * (x - THIRD)
    } else {
        1.0
    }
}

/// `λ̃_n = μ_n^α` together with the a priori error band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticEigenvalue {
    pub n: usize,
    pub mu_n: f64,
    pub lambda_tilde: f64,
    /// `30000 β / (√α n)`, reported even when the band is not valid.
    pub error_band: f64,
    /// Whether `n ≥ (4000/α)^{3/(2α)}`, the range where the band is proven.
    pub band_valid: bool,
}

impl AsymptoticEigenvalue {
    pub fn new(alpha: f64, n: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if n == 0 {
            return Err(Error::InvalidArgument("eigenvalue index n starts at 1".into()));
        }
        let beta = 2.0 - alpha;
        let nf = n as f64;
        let mu_n = nf * PI / 2.0 - beta * PI / 8.0;
        // compare in log space; the threshold overflows for small α
        let log_threshold = 1.5 / alpha * (BAND_THRESHOLD_CONSTANT / alpha).ln();
        Ok(Self {
            n,
            mu_n,
            lambda_tilde: mu_n.powf(alpha),
            error_band: BAND_CONSTANT * beta / (alpha.sqrt() * nf),
            band_valid: nf.ln() >= log_threshold,
        })
    }
}

pub fn lambda_tilde(alpha: f64, n: usize) -> Result<AsymptoticEigenvalue> {
    AsymptoticEigenvalue::new(alpha, n)
}

/// The approximate eigenfunction `φ̃_n` on `(-1, 1)`, extended by zero.
#[derive(Debug, Clone, Copy)]
pub struct ApproxEigenfunction<'k> {
    kernel: &'k HalfLineKernel,
    eigenvalue: AsymptoticEigenvalue,
}

impl<'k> ApproxEigenfunction<'k> {
    /// A tabulated kernel is strongly recommended: every evaluation costs two
    /// Laplace transforms.
    pub fn new(kernel: &'k HalfLineKernel, n: usize) -> Result<Self> {
        Ok(Self {
            kernel,
            eigenvalue: AsymptoticEigenvalue::new(kernel.alpha(), n)?,
        })
    }

    pub fn n(&self) -> usize {
        self.eigenvalue.n
    }

    pub fn mu(&self) -> f64 {
        self.eigenvalue.mu_n
    }

    pub fn eigenvalue(&self) -> &AsymptoticEigenvalue {
        &self.eigenvalue
    }

    pub fn kernel(&self) -> &HalfLineKernel {
        self.kernel
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::InvalidArgument(format!("phi_tilde at non-finite x = {x}")));
        }
        if x.abs() >= 1.0 {
            return Ok(0.0);
        }
        let mu = self.mu();
        let mut value = 0.0;
        let left = q_glue(-x);
        if left != 0.0 {
            value += left * self.kernel.f_fn(mu * (1.0 + x))?;
        }
        let right = q_glue(x);
        if right != 0.0 {
            // (-1)^{n+1}: odd n give even functions
            let sign = if self.n().is_multiple_of(2) { -1.0 } else { 1.0 };
            value += sign * right * self.kernel.f_fn(mu * (1.0 - x))?;
        }
        Ok(value)
    }

    /// Points where `φ̃_n` fails to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        vec![-1.0, -1.0 / 3.0, 0.0, 1.0 / 3.0, 1.0]
    }

    /// `‖φ̃_n‖₂` over `(-1, 1)`, using the parity of `φ̃_n`.
    pub fn l2_norm(&self, quad: &QuadSpec) -> Result<f64> {
        let pieces = (self.mu() / 2.0).ceil().max(1.0) as usize;
        let mut points = Vec::new();
        for w in [0.0, 1.0 / 3.0, 1.0].windows(2) {
            for i in 0..pieces {
                points.push(w[0] + (w[1] - w[0]) * i as f64 / pieces as f64);
            }
        }
        points.push(1.0);
        let half = try_integrate(|x| self.eval(x).map(|v| v * v), &points, quad)?;
        Ok((2.0 * half).sqrt())
    }
}

pub fn phi_tilde(ef: &ApproxEigenfunction<'_>, x: f64) -> Result<f64> {
    ef.eval(x)
}

/// Integration controls for [`frac_laplacian_pointwise`].
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseOptions {
    pub quad: QuadSpec,
    /// Points where `f` or its first two derivatives may jump.
    pub breakpoints: Vec<f64>,
    /// `f` vanishes outside this interval, which makes the far tail exact.
    pub support: Option<(f64, f64)>,
    /// Truncate the far field at `|y - x| = cutoff` and keep only the
    /// `2f(x)` part of the tail. Meant for bounded oscillating `f`, where the
    /// dropped part is `O(cutoff^{-1-α})`.
    pub cutoff: Option<f64>,
}

impl Default for PointwiseOptions {
    fn default() -> Self {
        Self {
            quad: QuadSpec::with_tolerance(1e-9),
            breakpoints: Vec::new(),
            support: None,
            cutoff: None,
        }
    }
}

/// `A f(x) = c_α pv ∫ (f(x) - f(y)) / |x - y|^{1+α} dy`.
///
/// The integral is symmetrised to `∫_0^∞ (2f(x) - f(x+h) - f(x-h)) h^{-1-α} dh`.
/// Very close to `h = 0` the numerator is replaced by an even polynomial
/// fitted to second differences of `f`.
pub fn frac_laplacian_pointwise<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    alpha: f64,
    opts: &PointwiseOptions,
) -> Result<f64> {
    try_frac_laplacian_pointwise(|y| Ok(f(y)), x, alpha, opts)
}

/// Same as [`frac_laplacian_pointwise`] for fallible `f`; the first error
/// raised by `f` is returned.
pub fn try_frac_laplacian_pointwise<F: Fn(f64) -> Result<f64>>(
    f: F,
    x: f64,
    alpha: f64,
    opts: &PointwiseOptions,
) -> Result<f64> {
    check_alpha(alpha)?;
    opts.quad.validate()?;
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("evaluation point {x} is not finite")));
    }
    let c = c_alpha(alpha)?;
    let fx = f(x)?;
    if !fx.is_finite() {
        return Err(Error::NonFiniteIntegrand { x, value: fx });
    }

    // distances h at which f(x ± h) crosses a breakpoint
    let mut kinks: Vec<f64> = opts
        .breakpoints
        .iter()
        .map(|b| (b - x).abs())
        .filter(|d| *d > 1e-12)
        .collect();
    let support_reach = opts.support.map(|(a, b)| (x - a).abs().max((b - x).abs()));
    if let Some((a, b)) = opts.support {
        kinks.extend([(x - a).abs(), (b - x).abs()].iter().filter(|d| **d > 1e-12));
    }
    kinks.sort_by(f64::total_cmp);
    let delta = 0.1 * kinks.first().copied().unwrap_or(1.0).min(1.0);

    let numerator = |h: f64| -> Result<f64> { Ok(2.0 * fx - f(x + h)? - f(x - h)?) };

    // On [0, h_t] the numerator is replaced by -(a h² + b h⁴ + c h⁶), fitted
    // through the second differences at h_t, 2h_t, 4h_t. Below h_t rounding
    // noise in the numerator would dominate.
    let h_t = 1e-2 * delta;
    let mut d = [0.0; 3];
    let mut u = [0.0; 3];
    for (i, m) in [1.0, 2.0, 4.0].iter().enumerate() {
        let h = m * h_t;
        u[i] = h * h;
        d[i] = -numerator(h)? / u[i];
    }
    let d12 = (d[1] - d[0]) / (u[1] - u[0]);
    let d23 = (d[2] - d[1]) / (u[2] - u[1]);
    let c6 = (d23 - d12) / (u[2] - u[0]);
    let c4 = d12 - c6 * (u[0] + u[1]);
    let c2 = d[0] - d12 * u[0] + c6 * u[0] * u[1];
    let taylor = -(c2 * h_t.powf(2.0 - alpha) / (2.0 - alpha)
        + c4 * h_t.powf(4.0 - alpha) / (4.0 - alpha)
        + c6 * h_t.powf(6.0 - alpha) / (6.0 - alpha));

    let near_points = [h_t, 10.0 * h_t, delta];
    let integrand = |h: f64| numerator(h).map(|v| v / h.powf(1.0 + alpha));
    let near = try_integrate(integrand, &near_points, &opts.quad)?;

    // far field [delta, end] plus an analytic or semi-infinite tail
    let end = match (support_reach, opts.cutoff) {
        (Some(r), Some(cut)) => Some(r.min(cut)),
        (Some(r), None) => Some(r),
        (None, cut) => cut,
    };
    let mut far_points = vec![delta];
    let last = end.unwrap_or_else(|| kinks.last().copied().unwrap_or(1.0).max(1.0));
    let mut g = delta;
    while g * 4.0 < last {
        g *= 4.0;
        far_points.push(g);
    }
    far_points.extend(kinks.iter().copied().filter(|k| *k > delta && *k < last));
    if end.is_none() && last > delta {
        // the oscillation scale of f is unknown here, keep pieces moderate
        let pieces = last.ceil() as usize;
        far_points.extend((1..pieces).map(|i| i as f64).filter(|p| *p > delta && *p < last));
    }
    far_points.push(last);
    far_points.sort_by(f64::total_cmp);
    far_points.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    let far = if far_points.len() >= 2 {
        try_integrate(integrand, &far_points, &opts.quad)?
    } else {
        0.0
    };
    let tail = match end {
        Some(e) => 2.0 * fx * e.powf(-alpha) / alpha,
        None => {
            // h = L v^{-1/α} turns the h^{-1-α} weight into a constant
            let scale = last.powf(-alpha) / alpha;
            let v_points: Vec<f64> = std::iter::once(0.0)
                .chain((0..=12).rev().map(|k| 0.25f64.powi(k)))
                .collect();
            scale
                * try_integrate(
                    |v| numerator(last * v.powf(-1.0 / alpha)),
                    &v_points,
                    &opts.quad,
                )?
        }
    };
    Ok(c * (taylor + near + far + tail))
}

/// `sup_x |A φ̃_n(x) - μ_n^α φ̃_n(x)|` over the given points of `(-1, 1)`.
pub fn residual_sup(ef: &ApproxEigenfunction<'_>, sample_points: &[f64]) -> Result<f64> {
    residual_sup_with(ef, sample_points, &QuadSpec::with_tolerance(1e-9))
}

pub fn residual_sup_with(
    ef: &ApproxEigenfunction<'_>,
    sample_points: &[f64],
    quad: &QuadSpec,
) -> Result<f64> {
    let opts = PointwiseOptions {
        quad: *quad,
        breakpoints: ef.breakpoints(),
        support: Some((-1.0, 1.0)),
        cutoff: None,
    };
    let alpha = ef.kernel().alpha();
    let mut worst: f64 = 0.0;
    for &x in sample_points {
        if !(x.abs() <= 0.99) {
            return Err(Error::InvalidArgument(format!(
                "residual sample point {x} must lie in [-0.99, 0.99]"
            )));
        }
        let a_phi = try_frac_laplacian_pointwise(|y| ef.eval(y), x, alpha, &opts)?;
        let r = (a_phi - ef.eigenvalue().lambda_tilde * ef.eval(x)?).abs();
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Runs a fallible integrand through the infallible quadrature driver,
/// surfacing the first error raised by the integrand.
fn try_integrate<F: Fn(f64) -> Result<f64>>(f: F, points: &[f64], quad: &QuadSpec) -> Result<f64> {
    let failure = RefCell::new(None);
    let r = integrate_with_breakpoints(|t| capture(&f, t, &failure), points, quad);
    finish(r, failure)
}

fn capture<F: Fn(f64) -> Result<f64>>(f: &F, t: f64, failure: &RefCell<Option<Error>>) -> f64 {
    match f(t) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    }
}

fn finish(
    r: Result<crate::quadrature::QuadResult>,
    failure: RefCell<Option<Error>>,
) -> Result<f64> {
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(r?.require_converged()?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma_fn;
    use proptest::prelude::*;

    #[test]
    fn glue_values() {
        assert_eq!(q_glue(0.0), 0.5);
        assert_eq!(q_glue(1.0 / 3.0), 1.0);
        assert_eq!(q_glue(-1.0 / 3.0), 0.0);
        assert_eq!(q_glue(-5.0), 0.0);
        assert_eq!(q_glue(5.0), 1.0);
    }

    proptest! {
        #[test]
        fn glue_is_complementary(x in -2.0f64..2.0) {
            prop_assert!((q_glue(x) + q_glue(-x) - 1.0).abs() < 1e-15);
        }

        #[test]
        fn mu_bounds(alpha in 0.01f64..1.99, n in 1usize..10_000) {
            let e = lambda_tilde(alpha, n).unwrap();
            let nf = n as f64;
            prop_assert!(e.mu_n >= PI / 4.0);
            prop_assert!(e.mu_n >= nf * PI / 4.0 && e.mu_n <= nf * PI / 2.0);
            prop_assert!(e.lambda_tilde <= (nf * PI / 2.0).powf(alpha));
            let next = lambda_tilde(alpha, n + 1).unwrap();
            prop_assert!(next.lambda_tilde > e.lambda_tilde);
        }
    }

    #[test]
    fn eigenvalue_spot_values() {
        assert!((lambda_tilde(1.0, 1).unwrap().lambda_tilde - 3.0 * PI / 8.0).abs() < 1e-15);
        assert!((lambda_tilde(1.0, 1).unwrap().lambda_tilde - 1.178).abs() < 5e-4);
        assert!((lambda_tilde(1.5, 2).unwrap().lambda_tilde - 5.055).abs() < 5e-4);
        assert!((lambda_tilde(1.99, 1).unwrap().lambda_tilde - 2.444).abs() < 5e-4);
        assert!(lambda_tilde(2.0, 1).is_err());
        assert!(lambda_tilde(1.0, 0).is_err());
    }

    #[test]
    fn band_validity_threshold() {
        // α = 1: threshold 4000^{3/2} ≈ 252_982.2
        assert!(!lambda_tilde(1.0, 252_982).unwrap().band_valid);
        assert!(lambda_tilde(1.0, 252_983).unwrap().band_valid);
        assert!(!lambda_tilde(0.1, usize::MAX).unwrap().band_valid);
        let e = lambda_tilde(1.0, 10).unwrap();
        assert!((e.error_band - 3000.0).abs() < 1e-9);
    }

    #[test]
    fn constant_has_zero_laplacian() {
        for alpha in [0.3, 1.0, 1.7] {
            let v = frac_laplacian_pointwise(|_| 2.5, 0.3, alpha, &PointwiseOptions::default())
                .unwrap();
            assert!(v.abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn poisson_kernel_identity() {
        // α = 1 and f = 1/(1+x²): A f = (1 - x²)/(1 + x²)²
        let f = |x: f64| 1.0 / (1.0 + x * x);
        for x in [0.0f64, 0.5, 1.0, 2.0] {
            let want = (1.0 - x * x) / (1.0 + x * x).powi(2);
            let got = frac_laplacian_pointwise(f, x, 1.0, &PointwiseOptions::default()).unwrap();
            assert!((got - want).abs() < 1e-7, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn gaussian_at_origin() {
        // Fourier side: (1/√π) ∫ ξ^α e^{-ξ²/4} dξ = 2^α Γ((α+1)/2)/√π
        for alpha in [0.2, 0.8, 1.0, 1.5, 1.9] {
            let want = 2f64.powf(alpha) * gamma_fn(0.5 * (alpha + 1.0)).unwrap() / PI.sqrt();
            let got =
                frac_laplacian_pointwise(|x| (-x * x).exp(), 0.0, alpha, &Default::default())
                    .unwrap();
            assert!((got - want).abs() < 1e-6, "alpha={alpha}: {got} vs {want}");
        }
    }

    fn bump(x: f64) -> f64 {
        if x.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - x * x)).exp()
        }
    }

    /// `A f(0) = (1/π) ∫_0^∞ ξ^α f̂(ξ) dξ` with `f̂` and the ξ-integral both on
    /// dense composite Gauss–Legendre grids.
    fn bump_fourier_oracle(alpha: f64) -> f64 {
        let (gx, gw) = crate::quadrature::gauss_legendre(16);
        let x_panels = 400;
        let mut xs = Vec::new();
        for p in 0..x_panels {
            let (a, b) = (p as f64 / x_panels as f64, (p + 1) as f64 / x_panels as f64);
            for (t, w) in gx.iter().zip(&gw) {
                let x = 0.5 * (a + b) + 0.5 * (b - a) * t;
                xs.push((x, 0.5 * (b - a) * w * bump(x)));
            }
        }
        let fhat = |xi: f64| 2.0 * xs.iter().map(|(x, w)| w * (xi * x).cos()).sum::<f64>();
        let mut acc = 0.0;
        // [0, 1] with ξ = t², then unit panels
        for (t, w) in gx.iter().zip(&gw) {
            let u = 0.5 + 0.5 * t;
            let xi = u * u;
            acc += 0.5 * w * 2.0 * u * xi.powf(alpha) * fhat(xi);
        }
        for p in 1..900 {
            for (t, w) in gx.iter().zip(&gw) {
                let xi = p as f64 + 0.5 + 0.5 * t;
                acc += 0.5 * w * xi.powf(alpha) * fhat(xi);
            }
        }
        acc / PI
    }

    #[test]
    fn bump_matches_fourier_oracle() {
        for alpha in [0.5, 1.0, 1.5] {
            let want = bump_fourier_oracle(alpha);
            let opts = PointwiseOptions {
                support: Some((-1.0, 1.0)),
                ..Default::default()
            };
            let got = frac_laplacian_pointwise(bump, 0.0, alpha, &opts).unwrap();
            assert!((got - want).abs() < 1e-3, "alpha={alpha}: {got} vs {want}");
        }
    }

    #[test]
    fn half_line_eigenfunction_spot_check() {
        let k = HalfLineKernel::new(1.0).unwrap().tabulated().unwrap();
        let f = |y: f64| if y <= 0.0 { Ok(0.0) } else { k.f_fn(y) };
        let opts = PointwiseOptions {
            breakpoints: vec![0.0],
            cutoff: Some(400.0),
            ..Default::default()
        };
        for x in [0.5, 1.0, 2.0] {
            let af = try_frac_laplacian_pointwise(f, x, 1.0, &opts).unwrap();
            let r = (af - f(x).unwrap()).abs();
            assert!(r < 1e-3, "x={x}: residual {r}");
        }
    }

    #[test]
    fn phi_tilde_vanishes_at_ends_and_has_parity() {
        let k = HalfLineKernel::new(1.0).unwrap().tabulated().unwrap();
        for n in 1..=3 {
            let ef = ApproxEigenfunction::new(&k, n).unwrap();
            assert!(ef.eval(1.0).unwrap().abs() < 1e-6);
            assert!(ef.eval(-1.0).unwrap().abs() < 1e-6);
            // boundary behaviour is dist^{α/2}
            assert!(ef.eval(1.0 - 1e-14).unwrap().abs() < 1e-6);
            let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
            for x in [0.05, 0.2, 0.37, 0.6, 0.93] {
                let l = ef.eval(-x).unwrap();
                let r = ef.eval(x).unwrap();
                assert!((l - sign * r).abs() < 1e-12, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn norm_approaches_one() {
        let k = HalfLineKernel::new(1.0).unwrap().tabulated().unwrap();
        let quad = QuadSpec::with_tolerance(1e-9);
        let devs: Vec<f64> = [4, 8, 16]
            .iter()
            .map(|&n| (ApproxEigenfunction::new(&k, n).unwrap().l2_norm(&quad).unwrap() - 1.0).abs())
            .collect();
        assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");
    }

    #[test]
    fn residual_decays_like_one_over_n() {
        let k = HalfLineKernel::new(1.0).unwrap().tabulated().unwrap();
        let pts = [-0.95, -0.8, -0.6, -0.45, -0.3, -0.15, 0.0];
        let r8 = residual_sup(&ApproxEigenfunction::new(&k, 8).unwrap(), &pts).unwrap();
        let r16 = residual_sup(&ApproxEigenfunction::new(&k, 16).unwrap(), &pts).unwrap();
        assert!(r8 < 1.0);
        let ratio = r16 / r8;
        assert!((0.25..=0.75).contains(&ratio), "{r8} {r16}");
        assert!(residual_sup(&ApproxEigenfunction::new(&k, 8).unwrap(), &[0.999]).is_err());
    }
}
