//! Dunkl translation and convolution.
//!
//! The spectral route uses `F_k(τ_x f)(ξ) = E_k(ix, ξ) F_k f(ξ)`. In rank one
//! there is also an explicit integral, for k > 0:
//!
//! ```text
//! τ_y f(x) = ∫_{-1}^{1} [ f_e(r) + (x + y) f_o(r) / r ] Φ_k(u) du,
//! r = √(x² + y² + 2xyu),  Φ_k(u) = Γ(k+1/2) / (√π Γ(k)) · (1+u)(1-u²)^{k-1}
//! ```
//!
//! which reduces to `f(x + y)` as k → 0. Higher rank applies it one axis at a
//! time.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::lp_norm;
use crate::error::{domain, Error, Result};
use crate::grid::{Grid, GridFunction, Parity, ReflectionConfig};
use crate::kernel::rank_one;
use crate::quad::{gauss_jacobi, Rule};
use crate::specfun::ln_gamma;
use crate::transform::TransformPlan;

/// Per-axis factors of `E_k(ix, ξ)` on the spectral grid, as a tensor.
fn translation_multiplier(spectral: &Grid, x: &[f64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for (j, ax) in spectral.axes().iter().enumerate() {
        let k = ax.k();
        let factor: Vec<Complex64> = ax
            .nodes()
            .iter()
            .map(|&xi| rank_one(k, Complex64::new(0.0, x[j] * xi)))
            .collect();
        out = out
            .iter()
            .flat_map(|a| factor.iter().map(move |b| a * b))
            .collect();
    }
    out
}

/// `τ_x f` on the grid of `f` by the spectral route.
pub fn dunkl_translate(cfg: &ReflectionConfig, f: &GridFunction, x: &[f64]) -> Result<GridFunction> {
    let plan = TransformPlan::resolving(cfg, f.grid().clone())?;
    dunkl_translate_with(&plan, f, x)
}

/// `τ_x f` with a prepared plan; the output lives on the plan's physical grid.
pub fn dunkl_translate_with(plan: &TransformPlan, f: &GridFunction, x: &[f64]) -> Result<GridFunction> {
    if x.len() != plan.physical().dim() {
        return Err(Error::Shape(format!(
            "translation point has {} coordinates, dimension is {}",
            x.len(),
            plan.physical().dim()
        )));
    }
    let g = plan.forward(f)?;
    let m = translation_multiplier(plan.spectral(), x);
    let values: Vec<Complex64> = g.values().iter().zip(&m).map(|(a, b)| a * b).collect();
    let parity = if x.iter().all(|&v| v == 0.0) { f.parity() } else { Parity::None };
    let spec = GridFunction::from_parts(plan.spectral().clone(), values, parity);
    Ok(plan.inverse_unchecked(&spec))
}

/// Gauss–Jacobi rule for the rank-one translation density `Φ_k`.
#[derive(Debug, Clone)]
pub struct ExplicitTranslation {
    k: Vec<f64>,
    rules: Vec<Option<Rule>>,
}

impl ExplicitTranslation {
    /// `nodes` Gauss–Jacobi nodes per axis.
    pub fn new(cfg: &ReflectionConfig, nodes: usize) -> Self {
        let rules = cfg
            .multiplicities()
            .iter()
            .map(|&k| {
                (k > 0.0).then(|| {
                    let mut r = gauss_jacobi(nodes, k - 1.0, k);
                    // normalize Φ_k to a probability density
                    let c = (ln_gamma(k + 0.5) - 0.5 * std::f64::consts::PI.ln() - ln_gamma(k)).exp();
                    r.weights.iter_mut().for_each(|w| *w *= c);
                    r
                })
            })
            .collect();
        Self {
            k: cfg.multiplicities().to_vec(),
            rules,
        }
    }

    /// `τ_x f(y)` for a function defined everywhere.
    pub fn translate(&self, f: &dyn Fn(&[f64]) -> f64, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), self.k.len());
        assert_eq!(y.len(), self.k.len());
        let mut point = y.to_vec();
        self.axis(f, x, 0, &mut point)
    }

    fn axis(&self, f: &dyn Fn(&[f64]) -> f64, x: &[f64], j: usize, point: &mut Vec<f64>) -> f64 {
        if j == self.k.len() {
            return f(point);
        }
        let (a, b) = (x[j], point[j]);
        let eval = |v: f64, point: &mut Vec<f64>| {
            let keep = point[j];
            point[j] = v;
            let r = self.axis(f, x, j + 1, point);
            point[j] = keep;
            r
        };
        let out = match &self.rules[j] {
            None => eval(a + b, point),
            Some(rule) => {
                let mut acc = 0.0;
                for (u, w) in rule.nodes.iter().zip(&rule.weights) {
                    let r = (a * a + b * b + 2.0 * a * b * u).max(0.0).sqrt();
                    let (fp, fm) = (eval(r, point), eval(-r, point));
                    let even = 0.5 * (fp + fm);
                    let odd = if r > 0.0 { 0.5 * (fp - fm) / r } else { 0.0 };
                    acc += w * (even + (a + b) * odd);
                }
                acc
            }
        };
        point[j] = b;
        out
    }

    /// `τ_x f` sampled on `grid`.
    pub fn translate_on(&self, f: &(dyn Fn(&[f64]) -> f64 + Sync), x: &[f64], grid: &Arc<Grid>) -> GridFunction {
        let values = crate::par::map_range(grid.len(), |i| {
            Complex64::new(self.translate(f, x, &grid.point(i)), 0.0)
        });
        GridFunction::from_parts(grid.clone(), values, Parity::None)
    }
}

/// `f ∗_k g` on the grid of `f`, computed as `F_k^{-1}(F_k f · F_k g)`.
pub fn dunkl_convolve(cfg: &ReflectionConfig, f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    let plan = TransformPlan::resolving(cfg, f.grid().clone())?;
    dunkl_convolve_with(&plan, f, g)
}

pub fn dunkl_convolve_with(plan: &TransformPlan, f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    let (ff, fg) = (plan.forward(f)?, plan.forward(g)?);
    let values = ff.values().iter().zip(fg.values()).map(|(a, b)| a * b).collect();
    let parity = match (f.parity(), g.parity()) {
        (Parity::Even, p) | (p, Parity::Even) => p,
        (Parity::Odd, Parity::Odd) => Parity::Even,
        _ => Parity::None,
    };
    Ok(plan.inverse_unchecked(&GridFunction::from_parts(plan.spectral().clone(), values, parity)))
}

/// `f ∗_k g(x_i) = ∫ f(y) τ_{x_i} g(-y) dμ_k(y)` at every node, with each
/// translate computed spectrally. Quadratic in the grid size; for checks.
pub fn convolve_direct(plan: &TransformPlan, f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    let grid = plan.physical().clone();
    let w = grid.tensor_weights();
    let values = (0..grid.len())
        .map(|i| {
            let tg = dunkl_translate_with(plan, g, &grid.point(i))?;
            let tv = tg.values();
            Ok((0..grid.len())
                .map(|m| f.values()[m] * tv[grid.mirror(m)] * w[m])
                .sum())
        })
        .collect::<Result<Vec<Complex64>>>()?;
    Ok(GridFunction::from_parts(grid, values, Parity::None))
}

/// Norms entering Young's inequality ‖f ∗ g‖_r ≤ ‖f‖_p ‖g‖_q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoungReport {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub norm_f: f64,
    pub norm_g: f64,
    pub norm_conv: f64,
    pub holds: bool,
}

impl YoungReport {
    /// `‖f ∗ g‖_r / (‖f‖_p ‖g‖_q)`.
    pub fn ratio(&self) -> f64 {
        self.norm_conv / (self.norm_f * self.norm_g)
    }
}

fn inv(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

/// Evaluates both sides of Young's inequality on the grid of `f`.
pub fn young_check(
    cfg: &ReflectionConfig,
    f: &GridFunction,
    g: &GridFunction,
    p: f64,
    q: f64,
    r: f64,
) -> Result<YoungReport> {
    for (name, v) in [("p", p), ("q", q), ("r", r)] {
        if !(v >= 1.0) {
            return domain("young_check", format!("{name} must be >= 1, got {v}"));
        }
    }
    if (inv(p) + inv(q) - 1.0 - inv(r)).abs() > 1e-12 {
        return domain("young_check", format!("1/p + 1/q = 1 + 1/r fails for ({p}, {q}, {r})"));
    }
    if f.parity() != Parity::Even && g.parity() != Parity::Even {
        return domain("young_check", "at least one factor must be radial (even)");
    }
    let conv = dunkl_convolve(cfg, f, g)?;
    let norm_f = lp_norm(cfg, f, p)?;
    let norm_g = lp_norm(cfg, g, q)?;
    let norm_conv = lp_norm(cfg, &conv, r)?;
    Ok(YoungReport {
        p,
        q,
        r,
        norm_f,
        norm_g,
        norm_conv,
        holds: norm_conv <= norm_f * norm_g * (1.0 + 1e-6),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_route_multiplies_kernels() {
        // τ_y E(·, λ)(x) = E(x, λ) E(y, λ)
        for k in [0.5, 1.0, 1.5] {
            let cfg = ReflectionConfig::rank_one(k).unwrap();
            let tr = ExplicitTranslation::new(&cfg, 48);
            let lam = 0.7;
            let e = |v: f64| rank_one(k, Complex64::new(v * lam, 0.0)).re;
            for (x, y) in [(0.3, 1.2), (-0.8, 0.5), (1.5, -1.5)] {
                let got = tr.translate(&|p: &[f64]| e(p[0]), &[y], &[x]);
                assert!((got - e(x) * e(y)).abs() < 1e-12, "k={k} ({x},{y}): {got}");
            }
        }
    }

    #[test]
    fn classical_explicit_is_shift() {
        let cfg = ReflectionConfig::new(vec![0.0, 0.0]).unwrap();
        let tr = ExplicitTranslation::new(&cfg, 8);
        let f = |p: &[f64]| (p[0] - 2.0 * p[1]).sin();
        assert_eq!(tr.translate(&f, &[0.3, 0.1], &[1.0, -1.0]), (1.3f64 - 2.0 * -0.9).sin());
    }

    #[test]
    fn spectral_translation_classical_shift() {
        let cfg = ReflectionConfig::rank_one(0.0).unwrap();
        let grid = Arc::new(Grid::uniform(&cfg, 512, 12.0).unwrap());
        let f = GridFunction::sample(grid.clone(), |x| (-(x[0] - 0.2).powi(2)).exp());
        let t = dunkl_translate(&cfg, &f, &[1.1]).unwrap();
        for (y, v) in grid.axis(0).nodes().iter().zip(t.values()) {
            let want = (-(y + 1.1 - 0.2f64).powi(2)).exp();
            assert!((v.re - want).abs() < 1e-9 && v.im.abs() < 1e-9, "{y}: {v} vs {want}");
        }
    }

    #[test]
    fn young_rejects_bad_exponents() {
        let cfg = ReflectionConfig::rank_one(0.5).unwrap();
        let grid = Arc::new(Grid::uniform(&cfg, 64, 8.0).unwrap());
        let f = GridFunction::sample_radial(grid, |r2| (-r2).exp());
        assert!(young_check(&cfg, &f, &f, 2.0, 2.0, 2.0).is_err());
        assert!(young_check(&cfg, &f, &f, 1.0, 2.0, 2.0).is_ok());
    }
}
