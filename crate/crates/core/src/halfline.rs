//! Generalised eigenfunctions of the fractional Laplacian on the half-line.
//!
//! For `λ > 0` the function `F(λx)` with `F(s) = sin(s + βπ/8) - G(s)` solves
//! the eigenvalue equation on `(0, ∞)` with eigenvalue `λ^α`. The correction
//! `G` is the Laplace transform of the nonnegative density
//!
//! ```text
//! γ(s) = K s^α / (1 + s^{2α} - 2 s^α cos(απ/2)) · exp(E(s)),
//! K    = √(2α) sin(απ/2) / (2π),
//! E(s) = (1/π) ∫_0^∞ log((1 - (rs)^α) / (1 - (rs)^2)) / (1 + r²) dr.
//! ```
//!
//! # Evaluation scheme
//!
//! Substituting `r → 1/r` in `E` gives `E(1/s) = E(s) + (β/2) log s`, and the
//! rational prefactor is invariant under `s → 1/s`, so
//! `γ(1/s) = s^{β/2} γ(s)`. Every Laplace-type integral over `(0, ∞)` is
//! therefore folded onto `(0, 1)`:
//!
//! ```text
//! ∫_0^∞ t^k e^{-st} γ(t) dt = ∫_0^1 [v^k e^{-sv} + v^{-k-1-α/2} e^{-s/v}] γ(v) dv,
//! ```
//!
//! and the substitution `v = w^{2/α}` makes both pieces smooth in `w`
//! (`v^α = w²` cancels the endpoint behaviour). This sidesteps the slow
//! `t^{-1-α/2}` tail of `γ`, which would otherwise make `G(0)` inaccessible
//! for small `α`.
//!
//! In the exponent, `(1 - u^α)/(1 - u²)` with `u = e^t` is evaluated as a
//! ratio of `expm1` values, which stays accurate through the removable
//! singularity at `u = 1` (limit `α/2`).

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, integrate_with_breakpoints, QuadSpec};
use crate::specfun::AlphaParams;

/// Quadrature context for `γ`, `G` and `F` at a fixed `α`.
///
/// A kernel built with [`HalfLineKernel::tabulated`] carries a memo of `γ`
/// samples on a composite Gauss–Legendre grid (geometric panels in `v`), and
/// evaluates every Laplace integral from it. Those evaluations are smooth in
/// `s`, which matters for callers that take finite differences.
#[derive(Debug, Clone)]
pub struct HalfLineKernel {
    params: AlphaParams,
    quad: QuadSpec,
    inner_quad: QuadSpec,
    table: Option<LaplaceTable>,
}

#[derive(Debug, Clone)]
struct LaplaceTable {
    v: Vec<f64>,
    w: Vec<f64>,
    /// `(2/α) · weight · γ̂(v)`
    weighted: Vec<f64>,
    /// `w^{2/α + 1}`
    w_pow: Vec<f64>,
}

const TABLE_PANELS: usize = 60;
const TABLE_ORDER: usize = 24;

impl HalfLineKernel {
    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_quad(alpha, QuadSpec::with_tolerance(1e-11))
    }

    pub fn with_quad(alpha: f64, quad: QuadSpec) -> Result<Self> {
        quad.validate()?;
        Ok(Self {
            params: AlphaParams::new(alpha)?,
            quad,
            inner_quad: QuadSpec {
                abs_tol: 1e-13,
                rel_tol: 1e-12,
                max_subdivisions: 500,
            },
            table: None,
        })
    }

    /// Precomputes the memo table of `γ` samples.
    pub fn tabulated(mut self) -> Result<Self> {
        let alpha = self.params.alpha;
        let half_alpha = 0.5 * alpha;
        let (nodes, weights) = gauss_legendre(TABLE_ORDER);
        let mut table = LaplaceTable {
            v: Vec::new(),
            w: Vec::new(),
            weighted: Vec::new(),
            w_pow: Vec::new(),
        };
        // panels [2^{-j-1}, 2^{-j}] in v, plus [0, 2^{-J}], mapped to w = v^{α/2}
        let mut edges: Vec<f64> = (0..=TABLE_PANELS)
            .map(|j| 2f64.powf(-(j as f64) * half_alpha))
            .collect();
        edges.push(0.0);
        edges.reverse();
        for pair in edges.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for (x, wt) in nodes.iter().zip(&weights) {
                let w = mid + half * x;
                let v = w.powf(2.0 / alpha);
                let g_hat = self.gamma_hat(v)?;
                table.v.push(v);
                table.w.push(w);
                table.weighted.push(2.0 / alpha * wt * half * g_hat);
                table.w_pow.push(w.powf(2.0 / alpha + 1.0));
            }
        }
        self.table = Some(table);
        Ok(self)
    }

    pub fn params(&self) -> &AlphaParams {
        &self.params
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    pub fn is_tabulated(&self) -> bool {
        self.table.is_some()
    }

    /// Phase shift `βπ/8` of the half-line eigenfunction.
    pub fn phase(&self) -> f64 {
        self.params.beta * PI / 8.0
    }

    /// The density `γ(s)`.
    pub fn gamma_density(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gamma_density needs finite s > 0, got {s}"
            )));
        }
        Ok(s.powf(self.params.alpha) * self.gamma_hat(s)?)
    }

    /// `γ(v) / v^α`, finite at `v = 0`.
    fn gamma_hat(&self, v: f64) -> Result<f64> {
        let alpha = self.params.alpha;
        let half_angle = 0.5 * alpha * PI;
        let k = (2.0 * alpha).sqrt() * half_angle.sin() / (2.0 * PI);
        if v == 0.0 {
            return Ok(k);
        }
        let va = v.powf(alpha);
        let denom = 1.0 + va * va - 2.0 * va * half_angle.cos();
        Ok(k / denom * self.exponent(v)?.exp())
    }

    /// `E(v)`, computed as `(1/π) ∫_0^{π/4} [L(ln v + ln tan θ) + L(ln v - ln tan θ)] dθ`
    /// after `r = tan θ` and folding `θ → π/2 - θ`.
    fn exponent(&self, v: f64) -> Result<f64> {
        let alpha = self.params.alpha;
        let lv = v.ln();
        let integrand = |theta: f64| {
            let lt = theta.tan().ln();
            log_ratio(alpha, lv + lt) + log_ratio(alpha, lv - lt)
        };
        // one of the two arguments crosses zero at ln tan θ = -|ln v|
        let crossing = (-lv.abs()).exp().atan();
        let mut points = vec![0.0];
        if crossing > 1e-12 * FRAC_PI_4 && crossing < FRAC_PI_4 * (1.0 - 1e-12) {
            points.push(crossing);
        }
        points.push(FRAC_PI_4);
        let r = integrate_with_breakpoints(integrand, &points, &self.inner_quad)?
            .require_converged()?;
        Ok(r.value / PI)
    }

    /// `∫_0^∞ t^k e^{-st} γ(t) dt`.
    fn laplace_moment(&self, k: i32, s: f64) -> Result<f64> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Laplace transform argument must be finite and >= 0, got {s}"
            )));
        }
        if k > 0 && s == 0.0 {
            return Err(Error::InvalidArgument(
                "derivatives of G are unbounded at s = 0".into(),
            ));
        }
        let kf = k as f64;
        let folded = move |v: f64| {
            if v == 0.0 {
                if s == 0.0 && k == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (-s / v - kf * v.ln()).exp()
            }
        };
        if let Some(t) = &self.table {
            let mut acc = 0.0;
            for i in 0..t.v.len() {
                let v = t.v[i];
                let near = v.powi(k) * (-s * v).exp() * t.w_pow[i];
                acc += t.weighted[i] * (near + folded(v));
            }
            return Ok(acc);
        }
        let alpha = self.params.alpha;
        let integrand = |w: f64| {
            let v = w.powf(2.0 / alpha);
            let near = v.powi(k) * (-s * v).exp() * w.powf(2.0 / alpha + 1.0);
            let g_hat = self.gamma_hat(v).unwrap_or(f64::NAN);
            2.0 / alpha * g_hat * (near + folded(v))
        };
        let mut v_breaks = vec![1.0 / 16.0, 1.0 / 256.0, 1.0 / 4096.0];
        if s > 0.0 {
            for c in [0.25, 1.0, 4.0] {
                v_breaks.push(c / s);
                v_breaks.push(c * s / (kf + 1.0 + 0.5 * alpha));
            }
        }
        let r = integrate_with_breakpoints(integrand, &self.w_breakpoints(&v_breaks), &self.quad)?
            .require_converged()?;
        Ok(r.value)
    }

    fn w_breakpoints(&self, v_breaks: &[f64]) -> Vec<f64> {
        let half_alpha = 0.5 * self.params.alpha;
        let mut w: Vec<f64> = v_breaks
            .iter()
            .filter(|v| **v > 1e-30 && **v < 1.0)
            .map(|v| v.powf(half_alpha))
            .collect();
        w.push(0.0);
        w.push(1.0);
        w.sort_by(f64::total_cmp);
        w.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        w
    }

    /// `G(s) = ∫_0^∞ e^{-st} γ(t) dt`.
    pub fn g_fn(&self, s: f64) -> Result<f64> {
        self.laplace_moment(0, s)
    }

    /// `(G'(s), G''(s))`, by differentiating under the Laplace integral.
    pub fn g_derivatives(&self, s: f64) -> Result<(f64, f64)> {
        if !(s > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "G derivatives need s > 0, got {s}"
            )));
        }
        Ok((-self.laplace_moment(1, s)?, self.laplace_moment(2, s)?))
    }

    /// `F(s) = sin(s + βπ/8) - G(s)`.
    pub fn f_fn(&self, s: f64) -> Result<f64> {
        Ok((s + self.phase()).sin() - self.g_fn(s)?)
    }

    /// `∫_0^∞ G(s) ds = ∫_0^∞ γ(t)/t dt`.
    pub fn g_integral(&self) -> Result<f64> {
        let alpha = self.params.alpha;
        let half_beta = 0.5 * self.params.beta;
        if let Some(t) = &self.table {
            let acc = (0..t.v.len())
                .map(|i| t.weighted[i] * t.w[i] * (1.0 + t.v[i].powf(half_beta)))
                .sum();
            return Ok(acc);
        }
        let integrand = |w: f64| {
            let v = w.powf(2.0 / alpha);
            let g_hat = self.gamma_hat(v).unwrap_or(f64::NAN);
            2.0 / alpha * g_hat * w * (1.0 + v.powf(half_beta))
        };
        let points = self.w_breakpoints(&[1.0 / 16.0, 1.0 / 256.0, 1.0 / 4096.0]);
        Ok(integrate_with_breakpoints(integrand, &points, &self.quad)?
            .require_converged()?
            .value)
    }
}

/// `log((1 - e^{αt}) / (1 - e^{2t}))`, continuous through `t = 0`.
fn log_ratio(alpha: f64, t: f64) -> f64 {
    if t == 0.0 {
        (0.5 * alpha).ln()
    } else if t > 0.0 {
        (alpha - 2.0) * t + (-(-alpha * t).exp_m1()).ln() - (-(-2.0 * t).exp_m1()).ln()
    } else {
        (-(alpha * t).exp_m1()).ln() - (-(2.0 * t).exp_m1()).ln()
    }
}
