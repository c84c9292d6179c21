//! The Dunkl kernel of Z₂^d, a product of rank-one kernels.
//!
//! In rank one `E_k(x, y)` depends only on `w = x y`:
//!
//! ```text
//! E_k(w) = j_{k-1/2}(i w) + w / (2k + 1) · j_{k+1/2}(i w)
//! ```
//!
//! with `j_a` the normalized Bessel function. At `k = 0` this is `e^w`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::ReflectionConfig;
use crate::specfun::{bessel_j_norm_complex, i_norm, j_norm};

/// Rank-one kernel as a function of the product `w = x y`.
pub fn rank_one(k: f64, w: Complex64) -> Complex64 {
    if w.im == 0.0 {
        // real product: modified Bessel functions
        let x = w.re;
        return Complex64::new(i_norm(k - 0.5, x) + x / (2.0 * k + 1.0) * i_norm(k + 0.5, x), 0.0);
    }
    if w.re == 0.0 {
        // w = iv and E(-is) with s = -v
        let (re, im) = oscillatory(k, -w.im);
        return Complex64::new(re, im);
    }
    let iw = Complex64::i() * w;
    let even = bessel_j_norm_complex(k - 0.5, iw).expect("order >= -1/2");
    let odd = bessel_j_norm_complex(k + 0.5, iw).expect("order >= -1/2");
    even + w / (2.0 * k + 1.0) * odd
}

/// `E_k(-i s)` for real `s`, split into real and imaginary parts:
/// `(j_{k-1/2}(s), -s / (2k+1) · j_{k+1/2}(s))`. This is the transform kernel
/// with `s = ξ x`.
#[inline]
pub fn oscillatory(k: f64, s: f64) -> (f64, f64) {
    if k == 0.0 {
        return (s.cos(), -s.sin());
    }
    (j_norm(k - 0.5, s), -s / (2.0 * k + 1.0) * j_norm(k + 0.5, s))
}

/// `E_k(x, y)` for points of `C^d`, evaluated as a product over axes.
///
/// Purely real or purely imaginary products use dedicated real routines; a
/// product with both parts nonzero falls back to the power series and is meant
/// for moderate `|x_j y_j|`.
pub fn dunkl_kernel(cfg: &ReflectionConfig, x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
    if x.len() != cfg.dim() || y.len() != cfg.dim() {
        return Err(Error::Shape(format!(
            "kernel arguments have lengths {} and {}, dimension is {}",
            x.len(),
            y.len(),
            cfg.dim()
        )));
    }
    Ok(x
        .iter()
        .zip(y)
        .zip(cfg.multiplicities())
        .map(|((a, b), &k)| rank_one(k, a * b))
        .product())
}

/// `E_k(x, y)` for real points.
pub fn dunkl_kernel_real(cfg: &ReflectionConfig, x: &[f64], y: &[f64]) -> Result<f64> {
    let cx: Vec<Complex64> = x.iter().map(|&v| v.into()).collect();
    let cy: Vec<Complex64> = y.iter().map(|&v| v.into()).collect();
    Ok(dunkl_kernel(cfg, &cx, &cy)?.re)
}
