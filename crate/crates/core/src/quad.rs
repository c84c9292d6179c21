//! Quadrature primitives: Gauss–Legendre and Gauss–Jacobi rules built by the
//! Golub–Welsch eigenvalue method, and a globally adaptive Gauss–Kronrod
//! integrator for one-dimensional integrals.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::specfun::ln_gamma;

/// Nodes and weights of an `m`-point rule on `[-1, 1]`, nodes ascending.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss–Jacobi rule for the weight `(1 - s)^a (1 + s)^b` on `[-1, 1]`.
///
/// Requires `a, b > -1`. `a = b = 0` gives Gauss–Legendre.
pub fn gauss_jacobi(m: usize, a: f64, b: f64) -> Rule {
    assert!(m >= 1, "rule needs at least one node");
    assert!(a > -1.0 && b > -1.0, "Jacobi exponents must exceed -1");
    let ab = a + b;
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for n in 0..m {
        let nf = n as f64;
        let diag = if n == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * nf + ab) * (2.0 * nf + ab + 2.0))
        };
        jac[(n, n)] = diag;
        if n + 1 < m {
            let k = (n + 1) as f64;
            let beta = if n == 0 {
                // closed form with the (1 + a + b) factor cancelled
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * k * (k + a) * (k + b) * (k + ab)
                    / ((2.0 * k + ab).powi(2) * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0))
            };
            let off = beta.sqrt();
            jac[(n, n + 1)] = off;
            jac[(n + 1, n)] = off;
        }
    }
    let ln_mu0 = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(ab + 2.0);
    let mu0 = ln_mu0.exp();
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

pub fn gauss_legendre(m: usize) -> Rule {
    let mut rule = gauss_jacobi(m, 0.0, 0.0);
    // symmetrize to remove eigen-solver asymmetry
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        let w = 0.5 * (rule.weights[j] + rule.weights[i]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = w;
        rule.weights[j] = w;
    }
    if m % 2 == 1 {
        rule.nodes[m / 2] = 0.0;
    }
    rule
}

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

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Globally adaptive G7/K15 integration of `f` over `[a, b]`.
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate falls below `max(abs_tol, rel_tol * |value|)` or `max_intervals`
/// is reached.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Estimate {
    adaptive_from(f, &[a, b], abs_tol, rel_tol, max_intervals)
}

/// Like [`adaptive`] but starting from the given breakpoints.
pub fn adaptive_from<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Estimate {
    let mut parts: Vec<(f64, f64, f64, f64)> = breaks
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let value: f64 = parts.iter().map(|p| p.2).sum();
        let error: f64 = parts.iter().map(|p| p.3).sum();
        let tol = abs_tol.max(rel_tol * value.abs());
        if error <= tol || parts.len() >= max_intervals {
            return Estimate {
                value,
                error,
                converged: error <= tol,
            };
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval exhausted at machine resolution
            return Estimate {
                value,
                error,
                converged: false,
            };
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Composite Gauss–Legendre nodes/weights for `[a, b]` split at `breaks`.
pub fn composite(breaks: &[f64], rule: &Rule) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity((breaks.len() - 1) * rule.nodes.len());
    let mut weights = Vec::with_capacity(nodes.capacity());
    for w in breaks.windows(2) {
        let c = 0.5 * (w[0] + w[1]);
        let h = 0.5 * (w[1] - w[0]);
        for (s, wt) in rule.nodes.iter().zip(&rule.weights) {
            nodes.push(c + h * s);
            weights.push(h * wt);
        }
    }
    (nodes, weights)
}

/// Log-spaced composite Gauss–Legendre rule on `[lo, hi]`, `lo > 0`, integrating
/// in the variable `u = ln s`. Returned weights already include the `ds = s du`
/// Jacobian.
pub fn log_composite(lo: f64, hi: f64, panels: usize, rule: &Rule) -> (Vec<f64>, Vec<f64>) {
    let (ul, uh) = (lo.ln(), hi.ln());
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| ul + (uh - ul) * i as f64 / panels as f64)
        .collect();
    let (us, ws) = composite(&breaks, rule);
    us.into_iter()
        .zip(ws)
        .map(|(u, w)| {
            let s = u.exp();
            (s, w * s)
        })
        .unzip()
}
