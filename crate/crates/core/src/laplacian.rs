//! Pointwise Dunkl Laplacian by finite differences, for diagnostics.
//!
//! ```text
//! Δ_k f(x) = Δf(x) + Σ_{λ∈R} k(λ) [ ⟨∇f(x), λ⟩ / ⟨λ, x⟩
//!                                    - |λ|²/2 · (f(x) - f(σ_λ x)) / ⟨λ, x⟩² ]
//! ```
//!
//! The root system is {±√2 e_j}.

use crate::error::{domain, Error, Result};
use crate::grid::ReflectionConfig;

/// Δ_k f at `x`. Every coordinate of `x` must be nonzero.
pub fn dunkl_laplacian_apply(
    cfg: &ReflectionConfig,
    f: impl Fn(&[f64]) -> f64,
    x: &[f64],
) -> Result<f64> {
    if x.len() != cfg.dim() {
        return Err(Error::Shape(format!(
            "point has {} coordinates, dimension is {}",
            x.len(),
            cfg.dim()
        )));
    }
    if let Some(j) = x.iter().position(|&v| v == 0.0) {
        return domain(
            "dunkl_laplacian_apply",
            format!("x lies on the reflecting hyperplane x_{j} = 0"),
        );
    }
    let eps = f64::EPSILON;
    let fx = f(x);
    let mut y = x.to_vec();
    let mut total = 0.0;
    for j in 0..x.len() {
        let xj = x[j];
        // second derivative: step ε^{1/4}(1+|x|); first: ε^{1/3}(1+|x|)
        let h2 = eps.powf(0.25) * (1.0 + xj.abs());
        let h1 = eps.powf(1.0 / 3.0) * (1.0 + xj.abs());
        let mut at = |v: f64| {
            y[j] = v;
            let r = f(&y);
            y[j] = xj;
            r
        };
        let d2 = (at(xj + h2) - 2.0 * fx + at(xj - h2)) / (h2 * h2);
        let d1 = (at(xj + h1) - at(xj - h1)) / (2.0 * h1);
        let reflected = at(-xj);
        total += d2;
        let k = cfg.k(j);
        if k != 0.0 {
            let s2 = 2f64.sqrt();
            for lam in [s2, -s2] {
                let lx = lam * xj;
                total += k * (d1 * lam / lx - (fx - reflected) / (lx * lx));
            }
        }
    }
    Ok(total)
}
