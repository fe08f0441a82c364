//! Special functions and the α-dependent normalising constants.

use std::f64::consts::PI;

use crate::error::{check_alpha, Error, Result};
use crate::quadrature::{integrate_finite, QuadSpec};

/// The stability index together with the constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaParams {
    pub alpha: f64,
    /// `2 - alpha`.
    pub beta: f64,
    /// Normalising constant of the one-dimensional operator.
    pub c_alpha: f64,
}

impl AlphaParams {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            alpha,
            beta: 2.0 - alpha,
            c_alpha: c_alpha(alpha)?,
        })
    }

    pub fn c_d_alpha(&self, d: usize) -> Result<f64> {
        c_d_alpha(d, self.alpha)
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// The gamma function, with reflection for arguments below one half.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("gamma of {x}")));
    }
    if x <= 0.0 && x == x.round() {
        return Err(Error::GammaPole(x));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// `B(a, b) = Γ(a) Γ(b) / Γ(a + b)` for positive arguments.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "beta function needs positive arguments, got ({a}, {b})"
        )));
    }
    Ok(gamma_unchecked(a) * gamma_unchecked(b) / gamma_unchecked(a + b))
}

/// `c_α = 2^α Γ((1+α)/2) / (√π |Γ(-α/2)|)`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    c_d_alpha(1, alpha)
}

/// `c_{d,α} = 2^α Γ((d+α)/2) / (π^{d/2} |Γ(-α/2)|)`.
pub fn c_d_alpha(d: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let d = d as f64;
    Ok(2f64.powf(alpha) * gamma_fn(0.5 * (d + alpha))?
        / (PI.powf(0.5 * d) * gamma_fn(-0.5 * alpha)?.abs()))
}

/// Which side of the true value an approximation may fall on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZetaDirection {
    /// Guaranteed not to exceed the true value.
    FromBelow,
    /// Best estimate, either side.
    Nearest,
}

// B_2, B_4, ..., B_20
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// `ζ(1 + α)` by Euler–Maclaurin summation.
///
/// The remainder after the last correction term has the sign of, and is
/// bounded by, the first omitted term; `FromBelow` subtracts that bound.
pub fn zeta_one_plus(alpha: f64, direction: ZetaDirection) -> Result<f64> {
    check_alpha(alpha)?;
    let s = 1.0 + alpha;
    const N: usize = 20;
    const TERMS: usize = 8;
    let n = N as f64;
    // smallest terms first
    let mut sum = 0.0;
    for k in (1..N).rev() {
        sum += (k as f64).powf(-s);
    }
    sum += n.powf(1.0 - s) / alpha + 0.5 * n.powf(-s);

    // T_j = B_{2j}/(2j)! · s(s+1)···(s+2j-2) · N^{-s-2j+1}
    let mut rising = s; // s(s+1)...(s+2j-2)
    let mut factorial = 2.0; // (2j)!
    let mut power = n.powf(-s - 1.0);
    let mut next_term = 0.0;
    for j in 1..=TERMS + 1 {
        let term = BERNOULLI_EVEN[j - 1] / factorial * rising * power;
        if j <= TERMS {
            sum += term;
        } else {
            next_term = term;
        }
        let jf = j as f64;
        rising *= (s + 2.0 * jf - 1.0) * (s + 2.0 * jf);
        factorial *= (2.0 * jf + 1.0) * (2.0 * jf + 2.0);
        power /= n * n;
    }
    Ok(match direction {
        ZetaDirection::Nearest => sum,
        ZetaDirection::FromBelow => sum - next_term.abs() - 4.0 * f64::EPSILON * sum,
    })
}

/// `φ(u) = ∫_0^u s^{α/2-1} (1+s)^{-d/2} ds`, the incomplete integral in the
/// Green function of the ball.
///
/// With `x = u/(1+u)` this is the incomplete beta integral `B_x(α/2, (d-α)/2)`,
/// evaluated by its continued fraction. For `d < α` the second parameter is
/// negative and is first raised by one through
/// `b B_x(a, b) = (a+b) B_x(a, b+1) - x^a (1-x)^b`; for `d = α` the integral
/// is `2 asinh(√u)` (only `d = 1` is possible).
pub fn riesz_phi(u: f64, alpha: f64, d: usize) -> Result<f64> {
    check_alpha(alpha)?;
    check_phi_args(u, d)?;
    if u == 0.0 {
        return Ok(0.0);
    }
    let a = 0.5 * alpha;
    let b = 0.5 * (d as f64 - alpha);
    if b > 0.0 {
        if u.is_infinite() {
            return beta_fn(a, b);
        }
        let x = u / (1.0 + u);
        let one_minus_x = 1.0 / (1.0 + u);
        incomplete_beta(a, b, x, one_minus_x)
    } else if u.is_infinite() {
        Ok(f64::INFINITY)
    } else if b == 0.0 {
        Ok(2.0 * u.sqrt().asinh())
    } else {
        let x = u / (1.0 + u);
        let one_minus_x = 1.0 / (1.0 + u);
        let raised = incomplete_beta(a, b + 1.0, x, one_minus_x)?;
        let front = (a * x.ln() + b * one_minus_x.ln()).exp();
        Ok(((a + b) * raised - front) / b)
    }
}

fn check_phi_args(u: f64, d: usize) -> Result<()> {
    if !(u >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "riesz_phi needs u >= 0, got {u}"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    Ok(())
}

/// The same integral as [`riesz_phi`], always by adaptive quadrature.
///
/// The piece over `[0, min(u, 1)]` uses `s = v^{2/α}`, which removes the
/// endpoint singularity; the piece over `[1, u]` is mapped to `[1/u, 1]` by
/// `s = 1/t` and straightened by the analogous power substitution.
pub fn riesz_phi_quadrature(u: f64, alpha: f64, d: usize, spec: &QuadSpec) -> Result<f64> {
    check_alpha(alpha)?;
    check_phi_args(u, d)?;
    if u == 0.0 {
        return Ok(0.0);
    }
    if u.is_infinite() {
        return Err(Error::InvalidArgument(
            "riesz_phi_quadrature needs finite u".into(),
        ));
    }
    let a = 0.5 * alpha;
    let half_d = 0.5 * d as f64;
    let b = half_d - a;
    let inner_end = u.min(1.0).powf(a);
    let head = integrate_finite(
        |v: f64| (1.0 + v.powf(1.0 / a)).powf(-half_d),
        0.0,
        inner_end,
        spec,
    )?
    .require_converged()?
    .value
        / a;
    if u <= 1.0 {
        return Ok(head);
    }
    let tail = if b > 0.0 {
        integrate_finite(
            |w: f64| (1.0 + w.powf(1.0 / b)).powf(-half_d),
            u.powf(-b),
            1.0,
            spec,
        )?
        .require_converged()?
        .value
            / b
    } else if b == 0.0 {
        integrate_finite(
            |y: f64| (1.0 + (-y).exp()).powf(-half_d),
            0.0,
            u.ln(),
            spec,
        )?
        .require_converged()?
        .value
    } else {
        integrate_finite(
            |w: f64| (1.0 + w.powf(1.0 / b)).powf(-half_d),
            1.0,
            u.powf(-b),
            spec,
        )?
        .require_converged()?
        .value
            / (-b)
    };
    Ok(head + tail)
}

/// Unregularised incomplete beta `∫_0^x t^{a-1} (1-t)^{b-1} dt`, with `1 - x`
/// passed separately to keep precision near `x = 1`.
fn incomplete_beta(a: f64, b: f64, x: f64, one_minus_x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let front = |a: f64, b: f64, x: f64, y: f64| (a * x.ln() + b * y.ln()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(front(a, b, x, one_minus_x) * beta_continued_fraction(a, b, x)? / a)
    } else {
        let complement =
            front(b, a, one_minus_x, x) * beta_continued_fraction(b, a, one_minus_x)? / b;
        Ok(beta_fn(a, b)? - complement)
    }
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=1000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            return Ok(h);
        }
    }
    Err(Error::InvalidArgument(format!(
        "incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}"
    )))
}
