//! Adaptive Gauss–Kronrod integration.
//!
//! Every integral in the crate goes through this module: finite intervals
//! (optionally pre-split at caller-supplied breakpoints) and semi-infinite
//! intervals, which are mapped onto `(0, 1)` by `t = a + u / (1 - u)`.
//!
//! The engine is the classic globally adaptive scheme: the interval with the
//! largest error estimate is bisected until the summed estimate drops below
//! `max(abs_tol, rel_tol * |value|)` or the subdivision budget runs out. A
//! 7-point Gauss rule embedded in a 15-point Kronrod rule provides both the
//! value and the error estimate for each piece.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances and budget for one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections.
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = self.abs_tol >= 0.0 && self.rel_tol >= 0.0;
        let positive = self.abs_tol > 0.0 || self.rel_tol > 0.0;
        if !nonneg || !positive || self.max_subdivisions == 0 {
            return Err(Error::InvalidArgument(format!(
                "quadrature spec needs nonnegative tolerances with at least one positive \
                 and max_subdivisions >= 1, got {self:?}"
            )));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

impl QuadResult {
    /// Turns a non-converged result into an error.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::QuadratureFailed {
                value: self.value,
                error_estimate: self.error_estimate,
            })
        }
    }
}

// 15-point Kronrod abscissae (nonnegative half) and weights, with the weights
// of the embedded 7-point Gauss rule at the odd-indexed abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIntegrand { x, value: v })
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Piece> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = eval(f, center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Piece { a, b, value, error })
}

/// Integrates `f` over `[a, b]`.
///
/// A non-converged result is returned with `converged == false`; non-finite
/// integrand values are errors.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    integrate_with_breakpoints(f, &[a, b], spec)
}

/// Integrates `f` over `[points[0], points[last]]`, starting the adaptive
/// subdivision from the pieces delimited by `points` (which must be
/// strictly increasing).
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    spec: &QuadSpec,
) -> Result<QuadResult> {
    spec.validate()?;
    if points.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two integration endpoints".into(),
        ));
    }
    if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "integration breakpoints must be finite and strictly increasing: {points:?}"
        )));
    }

    let mut heap = BinaryHeap::with_capacity(points.len() + 32);
    for w in points.windows(2) {
        heap.push(gauss_kronrod(&f, w[0], w[1])?);
    }
    // Pieces too narrow to bisect in floating point keep their estimate here.
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut subdivisions = 0;
    let mut value: f64 = heap.iter().map(|p| p.value).sum();
    let mut error: f64 = heap.iter().map(|p| p.error).sum();

    let finish = |heap: &BinaryHeap<Piece>, fv: f64, fe: f64, converged: bool| {
        let value = fv + heap.iter().map(|p| p.value).sum::<f64>();
        let error_estimate = fe + heap.iter().map(|p| p.error).sum::<f64>();
        QuadResult {
            value,
            error_estimate,
            converged: converged && error_estimate <= spec.target(value),
        }
    };

    loop {
        if error <= spec.target(value) {
            let result = finish(&heap, frozen_value, frozen_error, true);
            if result.converged {
                return Ok(result);
            }
            // running sums drifted; resynchronise and keep going
            value = result.value;
            error = result.error_estimate;
            if error <= spec.target(value) {
                return Ok(result);
            }
        }
        let Some(worst) = heap.pop() else {
            return Ok(finish(&heap, frozen_value, frozen_error, false));
        };
        if subdivisions >= spec.max_subdivisions {
            heap.push(worst);
            return Ok(finish(&heap, frozen_value, frozen_error, false));
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        let left = gauss_kronrod(&f, worst.a, mid)?;
        let right = gauss_kronrod(&f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
}

/// Integrates `f` over `(a, ∞)` through the substitution `t = a + u/(1-u)`.
pub fn integrate_semiinfinite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    if !a.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lower limit must be finite, got {a}"
        )));
    }
    let mapped = |u: f64| {
        let one_minus = 1.0 - u;
        let t = a + u / one_minus;
        let v = f(t);
        if v == 0.0 {
            0.0
        } else {
            v / (one_minus * one_minus)
        }
    };
    integrate_with_breakpoints(mapped, &[0.0, 0.5, 1.0], spec)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec() -> QuadSpec {
        QuadSpec::default()
    }

    #[test]
    fn polynomial() {
        let r = integrate_finite(|x| x * x, 0.0, 1.0, &spec()).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_sqrt_endpoint_singularity() {
        // closed form 2 asinh(sqrt(b))
        let r = integrate_finite(
            |s: f64| 1.0 / (s.sqrt() * (1.0 + s).sqrt()),
            0.0,
            1.0,
            &spec(),
        )
        .unwrap();
        assert!(r.converged);
        assert!((r.value - 2.0 * 1f64.asinh()).abs() < 1e-9, "{r:?}");
        assert!((r.value - 1.762747174039086).abs() < 1e-9);
    }

    #[test]
    fn sine_over_half_period() {
        let r = integrate_finite(f64::sin, 0.0, PI, &spec()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
    }

    #[test]
    fn semiinfinite_examples() {
        let r = integrate_semiinfinite(|t: f64| (-t).exp(), 0.0, &spec()).unwrap();
        assert!(r.converged && (r.value - 1.0).abs() < 1e-10);
        let r = integrate_semiinfinite(|t: f64| 1.0 / (1.0 + t * t), 0.0, &spec()).unwrap();
        assert!(r.converged && (r.value - PI / 2.0).abs() < 1e-10);
        let r = integrate_semiinfinite(|t: f64| t * (-2.0 * t).exp(), 0.0, &spec()).unwrap();
        assert!(r.converged && (r.value - 0.25).abs() < 1e-10);
    }

    #[test]
    fn divergent_tail_is_not_converged() {
        let r = integrate_semiinfinite(|t: f64| 1.0 / (1.0 + t), 0.0, &spec()).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn nan_integrand_is_an_error() {
        let err = integrate_finite(|x: f64| (x - 2.0).sqrt(), 0.0, 1.0, &spec()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn rejects_bad_specs_and_intervals() {
        assert!(QuadSpec::new(0.0, 0.0, 10).is_err());
        assert!(QuadSpec::new(1e-8, 0.0, 0).is_err());
        assert!(integrate_finite(|x| x, 1.0, 0.0, &spec()).is_err());
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(12);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // degree 22 monomial: ∫ x^22 = 2/23
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(22)).sum();
        assert!((v - 2.0 / 23.0).abs() < 1e-14);
    }
}
