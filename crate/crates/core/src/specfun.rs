//! Gamma, normalized Bessel functions and the one-sided α-stable subordinator
//! density.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quad;

// Lanczos approximation, g = 7, n = 9
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

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (Γ(x + 1))
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    acc
}

/// Γ(x) for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain("gamma", format!("argument must be positive and finite, got {x}"));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    if x == x.floor() && x <= 171.0 {
        let mut f = 1.0;
        for i in 2..(x as u64) {
            f *= i as f64;
        }
        return f;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma needs a positive argument");
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// Below this the power series is used directly.
const SERIES_LIMIT: f64 = 4.0;
/// Above this the Hankel expansion is accurate to rounding.
const HANKEL_LIMIT: f64 = 40.0;

fn check_order(order: f64) -> Result<()> {
    if !(order >= -0.5) {
        return domain("bessel_j_norm", format!("order must be >= -1/2, got {order}"));
    }
    Ok(())
}

/// Normalized Bessel function `j_a(z) = Γ(a+1) (2/z)^a J_a(z)` for real `z`.
///
/// Even in `z`, `j_a(0) = 1`.
pub fn bessel_j_norm(order: f64, z: f64) -> Result<f64> {
    check_order(order)?;
    Ok(j_norm(order, z))
}

pub(crate) fn j_norm(a: f64, z: f64) -> f64 {
    let z = z.abs();
    if z <= SERIES_LIMIT {
        j_series(a, z)
    } else if z <= HANKEL_LIMIT {
        j_miller(a, z)
    } else {
        j_asymptotic(a, z)
    }
}

/// Backward recurrence in the order, normalized with
/// `(z/2)^a = Σ_k (a+2k) Γ(a+k)/k! J_{a+2k}(z)`.
fn j_miller(a: f64, z: f64) -> f64 {
    let mut top = (1.2 * z + 40.0).ceil() as usize;
    top += top % 2;
    let mut next = 0.0;
    let mut cur = 1e-300;
    let mut norm = 0.0;
    // d_k = (a + 2k) r_k, r_k = Γ(a+k) / (Γ(a+1) k!), d_0 = 1
    let mut weights = Vec::with_capacity(top / 2 + 1);
    weights.push(1.0);
    let mut r = 1.0;
    for k in 1..=top / 2 {
        if k > 1 {
            r *= (a + (k - 1) as f64) / k as f64;
        }
        weights.push((a + 2.0 * k as f64) * r);
    }
    for n in (0..top).rev() {
        // f_n = (2(a+n+1)/z) f_{n+1} - f_{n+2}
        let f = 2.0 * (a + n as f64 + 1.0) / z * cur - next;
        next = cur;
        cur = f;
        if n % 2 == 0 {
            norm += weights[n / 2] * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
        }
    }
    cur / norm
}

fn j_series(a: f64, z: f64) -> f64 {
    {
        let q = -0.25 * z * z;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut n = 1.0;
        loop {
            term *= q / (n * (n + a));
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1e-300) && n > 2.0 {
                break;
            }
            n += 1.0;
        }
        sum
    }
}

fn j_asymptotic(a: f64, z: f64) -> f64 {
    // Γ(a+1) (2/z)^a J_a(z)
    let lg = ln_gamma(a + 1.0) + a * (2.0 / z).ln();
    lg.exp() * bessel_j_asymptotic(a, z)
}

/// Hankel asymptotic expansion of J_a(z) for large positive z.
fn bessel_j_asymptotic(a: f64, z: f64) -> f64 {
    let mu = 4.0 * a * a;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * z);
        if term.abs() > prev || term == 0.0 {
            break;
        }
        prev = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let w = z - 0.5 * a * PI - 0.25 * PI;
    (2.0 / (PI * z)).sqrt() * (p * w.cos() - q * w.sin())
}

/// `j_a(i z)` for real `z`: the normalized modified Bessel function
/// `Γ(a+1) (2/z)^a I_a(z)`; positive and even in `z`.
pub(crate) fn i_norm(a: f64, z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 1.0;
    loop {
        term *= q / (n * (n + a));
        sum += term;
        if term < 1e-17 * sum && n > q.sqrt() {
            break;
        }
        n += 1.0;
    }
    sum
}

/// `j_a(z)` for complex `z` via the power series; intended for moderate `|z|`.
pub fn bessel_j_norm_complex(order: f64, z: Complex64) -> Result<Complex64> {
    check_order(order)?;
    if z.im == 0.0 {
        return Ok(Complex64::new(j_norm(order, z.re), 0.0));
    }
    if z.re == 0.0 {
        return Ok(Complex64::new(i_norm(order, z.im), 0.0));
    }
    let q = -0.25 * z * z;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut n = 1.0;
    loop {
        term *= q / (n * (n + order));
        sum += term;
        if term.norm() < 1e-17 * sum.norm().max(1e-300) && n > q.norm().sqrt() {
            break;
        }
        n += 1.0;
    }
    Ok(sum)
}

/// How η_{1,α} is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubordinatorStrategy {
    /// Lévy density, valid only at α = 1/2.
    ClosedFormHalf,
    /// Zolotarev's integral over (0, π), with the convergent power series in
    /// `s^{-α}` for the far tail.
    ZolotarevIntegral,
}

/// One-sided α-stable subordinator at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubordinatorSpec {
    alpha: f64,
    t: f64,
    strategy: SubordinatorStrategy,
}

impl SubordinatorSpec {
    /// Picks the closed form at α = 1/2 and the integral otherwise.
    pub fn new(alpha: f64, t: f64) -> Result<Self> {
        let strategy = if alpha == 0.5 {
            SubordinatorStrategy::ClosedFormHalf
        } else {
            SubordinatorStrategy::ZolotarevIntegral
        };
        Self::with_strategy(alpha, t, strategy)
    }

    pub fn with_strategy(alpha: f64, t: f64, strategy: SubordinatorStrategy) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return domain("subordinator", format!("alpha must lie in (0, 1], got {alpha}"));
        }
        if !(t > 0.0) || !t.is_finite() {
            return domain("subordinator", format!("t must be positive, got {t}"));
        }
        if strategy == SubordinatorStrategy::ClosedFormHalf && alpha != 0.5 {
            return domain("subordinator", "closed form requires alpha = 1/2");
        }
        Ok(Self { alpha, t, strategy })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn strategy(&self) -> SubordinatorStrategy {
        self.strategy
    }

    pub fn at_time(&self, t: f64) -> Result<Self> {
        Self::with_strategy(self.alpha, t, self.strategy)
    }
}

/// Value of the subordinator law at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StableDensity {
    Density(f64),
    /// α = 1: the subordinator is deterministic, all mass sits at `s = t`.
    PointMass { at: f64 },
}

impl StableDensity {
    pub fn density(self) -> Option<f64> {
        match self {
            StableDensity::Density(v) => Some(v),
            StableDensity::PointMass { .. } => None,
        }
    }
}

/// η_{t,α}(s), evaluated as `t^{-1/α} η_{1,α}(s t^{-1/α})`.
pub fn stable_density(spec: &SubordinatorSpec, s: f64) -> Result<StableDensity> {
    if !(s > 0.0) {
        return domain("stable_density", format!("s must be positive, got {s}"));
    }
    if spec.alpha == 1.0 {
        return Ok(StableDensity::PointMass { at: spec.t });
    }
    let c = spec.t.powf(-1.0 / spec.alpha);
    let v = c * unit_density(spec.alpha, spec.strategy, s * c);
    Ok(StableDensity::Density(v))
}

/// η_{1,α}(s), clamped to be nonnegative.
fn unit_density(alpha: f64, strategy: SubordinatorStrategy, s: f64) -> f64 {
    match strategy {
        SubordinatorStrategy::ClosedFormHalf => {
            (-1.0 / (4.0 * s)).exp() / (2.0 * PI.sqrt() * s * s.sqrt())
        }
        SubordinatorStrategy::ZolotarevIntegral => {
            if s.powf(-alpha) < TAIL_SERIES_SWITCH {
                tail_series(alpha, s)
            } else {
                zolotarev(alpha, s)
            }
            .max(0.0)
        }
    }
}

const TAIL_SERIES_SWITCH: f64 = 0.1;

/// Zolotarev/Kanter representation:
/// η(s) = α/((1-α)π) s^{-1/(1-α)} ∫_0^π A(φ) exp(-s^{-α/(1-α)} A(φ)) dφ,
/// A(φ) = sin(αφ)^{α/(1-α)} sin((1-α)φ) / sin(φ)^{1/(1-α)}.
fn zolotarev(alpha: f64, s: f64) -> f64 {
    let beta = 1.0 / (1.0 - alpha);
    let x = s.powf(-alpha * beta);
    let ln_a = |phi: f64| {
        alpha * beta * (alpha * phi).sin().ln() + ((1.0 - alpha) * phi).sin().ln()
            - beta * phi.sin().ln()
    };
    let integrand = |phi: f64| {
        let la = ln_a(phi);
        let e = la - x * la.exp();
        if e < -745.0 {
            0.0
        } else {
            e.exp()
        }
    };
    // A is increasing on (0, π); most mass sits where x·A(φ) ≈ 1
    let est = quad::adaptive_from(
        integrand,
        &[0.0, 0.25 * PI, 0.5 * PI, 0.75 * PI, 0.9 * PI, PI],
        1e-300,
        1e-12,
        4000,
    );
    alpha * beta / PI * s.powf(-beta) * est.value
}

/// η(s) = (1/π) Σ_{n≥1} (-1)^{n+1} Γ(nα+1)/n! sin(nπα) s^{-nα-1}.
fn tail_series(alpha: f64, s: f64) -> f64 {
    let y = s.powf(-alpha);
    let mut sum = 0.0;
    let mut yn = 1.0;
    for n in 1..60 {
        let nf = n as f64;
        yn *= y;
        let lc = ln_gamma(nf * alpha + 1.0) - ln_gamma(nf + 1.0);
        let term = lc.exp() * (nf * PI * alpha).sin() * yn;
        sum += if n % 2 == 1 { term } else { -term };
        if lc.exp() * yn < 1e-18 * sum.abs() {
            break;
        }
    }
    sum / (PI * s)
}

/// Coefficient `a_n` of the large-s expansion η_{1,α}(s) ≈ Σ a_n s^{-nα-1}.
pub(crate) fn tail_coefficient(alpha: f64, n: usize) -> f64 {
    let nf = n as f64;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    sign * (ln_gamma(nf * alpha + 1.0) - ln_gamma(nf + 1.0)).exp() * (nf * PI * alpha).sin() / PI
}
