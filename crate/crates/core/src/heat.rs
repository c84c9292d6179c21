//! Dunkl heat kernel, fractional heat kernels and the semigroup
//! `e^{-t(-Δ_k)^α}`.
//!
//! The fractional kernel has two routes: inversion of the multiplier
//! `e^{-t|ξ|^{2α}}`, and Bochner subordination
//! `h_{t,α} = ∫ h_s η_{t,α}(s) ds`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::grid::{AxisLayout, Grid, GridFunction, Parity, ReflectionConfig};
use crate::par;
use crate::quad::{gauss_legendre, log_composite};
use crate::specfun::{gamma, stable_density, tail_coefficient, StableDensity, SubordinatorSpec};
use crate::transform::TransformPlan;

/// `e^{-MULTIPLIER_CUTOFF}` is where spectral grids stop.
const MULTIPLIER_CUTOFF: f64 = 46.0;

/// How a fractional kernel is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelRoute {
    /// `(2t)^{-d_k/2} e^{-|x|²/4t}`; α = 1 only.
    ClosedForm,
    Spectral,
    Subordination,
}

/// Time, order and route of a (fractional) heat kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    t: f64,
    alpha: f64,
    route: KernelRoute,
}

impl KernelSpec {
    pub fn new(t: f64, alpha: f64, route: KernelRoute) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return domain("KernelSpec", format!("t must be positive, got {t}"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return domain("KernelSpec", format!("alpha must lie in (0, 1], got {alpha}"));
        }
        if route == KernelRoute::ClosedForm && alpha != 1.0 {
            return domain("KernelSpec", "the closed form exists only for alpha = 1");
        }
        Ok(Self { t, alpha, route })
    }

    /// The classical Dunkl heat kernel at time `t`.
    pub fn heat(t: f64) -> Result<Self> {
        Self::new(t, 1.0, KernelRoute::ClosedForm)
    }

    /// Spectral route of record.
    pub fn fractional(t: f64, alpha: f64) -> Result<Self> {
        Self::new(t, alpha, KernelRoute::Spectral)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn route(&self) -> KernelRoute {
        self.route
    }

    pub fn at_time(&self, t: f64) -> Result<Self> {
        Self::new(t, self.alpha, self.route)
    }

    pub fn with_route(&self, route: KernelRoute) -> Result<Self> {
        Self::new(self.t, self.alpha, route)
    }

    /// `e^{-t |ξ|^{2α}}` from `|ξ|²`.
    pub fn multiplier(&self, xi2: f64) -> f64 {
        (-self.t * xi2.powf(self.alpha)).exp()
    }

    pub fn subordinator(&self) -> Result<SubordinatorSpec> {
        SubordinatorSpec::new(self.alpha, self.t)
    }
}

/// `h_t(x) = (2t)^{-d_k/2} e^{-|x|²/(4t)}`.
pub fn heat_kernel(cfg: &ReflectionConfig, t: f64, x: &[f64]) -> Result<f64> {
    if !(t > 0.0) {
        return domain("heat_kernel", format!("t must be positive, got {t}"));
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    Ok(heat_radial(cfg.d_k(), t, r2))
}

pub(crate) fn heat_radial(d_k: f64, t: f64, r2: f64) -> f64 {
    (2.0 * t).powf(-0.5 * d_k) * (-r2 / (4.0 * t)).exp()
}

/// Frequency beyond which `e^{-t|ξ|^{2α}}` is negligible.
pub fn spectral_cutoff(t: f64, alpha: f64) -> f64 {
    (MULTIPLIER_CUTOFF / t).powf(0.5 / alpha)
}

/// Innermost spectral panel for the kink of `|ξ|^{2α}` at the origin: its
/// contribution `t a^{2α+2k+1}` stays below rounding.
fn kink_panel(t: f64, alpha: f64, k: f64) -> Option<f64> {
    (alpha < 1.0).then(|| (1e-16 / t.max(1e-300)).powf(1.0 / (2.0 * alpha + 2.0 * k + 1.0)))
}

/// Spectral grid for inverting `e^{-t|ξ|^{2α}}` times data resolved by
/// `physical`, out to frequency `cutoff`.
pub fn spectral_grid(
    cfg: &ReflectionConfig,
    physical: &Grid,
    t: f64,
    alpha: f64,
    cutoff: f64,
) -> Result<Grid> {
    let r = physical.reach();
    let layouts: Vec<AxisLayout> = cfg
        .multiplicities()
        .iter()
        .map(|&k| AxisLayout::resolving(cutoff, r, kink_panel(t, alpha, k)))
        .collect();
    Grid::new(cfg, &layouts)
}

/// `s`-nodes and weights `w_i η_{t,α}(s_i)` of the subordination integral.
///
/// Log-spaced panels on `[10^{-4}, 10^{12}]·t^{1/α}`. The upper end is far
/// beyond where η concentrates because the `s^{-1-α}` tail carries about
/// `10^{-2α}` of the mass per decade past the bulk.
pub fn subordination_rule(spec: &KernelSpec) -> Result<Vec<(f64, f64)>> {
    let sub = spec.subordinator()?;
    if let StableDensity::PointMass { at } = stable_density(&sub, 1.0)? {
        return Ok(vec![(at, 1.0)]);
    }
    let scale = spec.t.powf(1.0 / spec.alpha);
    let rule = gauss_legendre(16);
    let (s, w) = log_composite(1e-4 * scale, 1e12 * scale, 96, &rule);
    let eta = par::map_slice(&s, |&si| {
        stable_density(&sub, si).map(|d| d.density().unwrap_or(0.0))
    });
    s.into_iter()
        .zip(w)
        .zip(eta)
        .map(|((si, wi), e)| Ok((si, wi * e?)))
        .collect()
}

/// `∫ e^{-sλ} η_{t,α}(s) ds` by the subordination rule; equals
/// `e^{-t λ^α}`.
pub fn subordinated_multiplier(rule: &[(f64, f64)], lambda: f64) -> f64 {
    rule.iter().map(|(s, w)| w * (-s * lambda).exp()).sum()
}

/// Samples of `h_{t,α}` on `grid` by the route in `spec`.
pub fn frac_heat_kernel(
    cfg: &ReflectionConfig,
    spec: &KernelSpec,
    grid: &Arc<Grid>,
) -> Result<GridFunction> {
    let d_k = cfg.d_k();
    match spec.route {
        KernelRoute::ClosedForm => Ok(GridFunction::sample_radial(grid.clone(), |r2| {
            heat_radial(d_k, spec.t, r2)
        })),
        KernelRoute::Spectral => {
            let cutoff = spectral_cutoff(spec.t, spec.alpha);
            let spectral = Arc::new(spectral_grid(cfg, grid, spec.t, spec.alpha, cutoff)?);
            let plan = TransformPlan::new(cfg, grid.clone(), spectral.clone())?;
            let g = GridFunction::sample_radial(spectral, |xi2| spec.multiplier(xi2));
            let h = plan.inverse(&g)?;
            Ok(real_even(h))
        }
        KernelRoute::Subordination => {
            let rule = subordination_rule(spec)?;
            let r2 = grid.squared_radii();
            let values = par::map_slice(&r2, |&r| {
                let v: f64 = rule.iter().map(|(s, w)| w * heat_radial(d_k, *s, r)).sum();
                Complex64::new(v, 0.0)
            });
            Ok(GridFunction::from_parts(grid.clone(), values, Parity::Even))
        }
    }
}

fn real_even(h: GridFunction) -> GridFunction {
    let grid = h.grid().clone();
    let values = h.values().iter().map(|v| Complex64::new(v.re, 0.0)).collect();
    GridFunction::from_parts(grid, values, Parity::Even)
}

/// Mass of `h_{t,α}` on `|x| > x_max` in rank one, from the large-`|x|`
/// expansion `h_{t,α}(x) ~ Σ_n a_n t^n 2^{-d_k/2} Γ(d_k/2 + nα) (x²/4)^{-d_k/2-nα}`.
/// Zero for α = 1 up to the Gaussian tail, which is returned exactly.
pub fn rank_one_tail_mass(cfg: &ReflectionConfig, spec: &KernelSpec, x_max: f64) -> Result<f64> {
    if cfg.dim() != 1 {
        return domain("rank_one_tail_mass", "defined for rank one only");
    }
    let k = cfg.k(0);
    let d_k = cfg.d_k();
    let dens = crate::grid::axis_c(k) * 2f64.powf(k);
    if spec.alpha == 1.0 {
        // 2 ∫_X^∞ dens x^{2k} (2t)^{-d_k/2} e^{-x²/4t} dx, via the upper
        // incomplete gamma in u = x²/4t
        let a = k + 0.5;
        let u0 = x_max * x_max / (4.0 * spec.t);
        let upper = crate::quad::adaptive(
            |u: f64| u.powf(a - 1.0) * (-u).exp(),
            u0,
            u0 + 60.0 + 4.0 * a,
            0.0,
            1e-12,
            400,
        )
        .value;
        return Ok(dens * (2.0 * spec.t).powf(-0.5 * d_k) * (4.0 * spec.t).powf(a) * upper);
    }
    let alpha = spec.alpha;
    let mut total = 0.0;
    let mut prev = f64::INFINITY;
    for n in 1..40 {
        let nf = n as f64;
        let e = 0.5 * d_k + nf * alpha;
        let coeff = tail_coefficient(alpha, n) * spec.t.powf(nf) * 2f64.powf(-0.5 * d_k) * gamma(e)?;
        // 2 ∫_X^∞ dens x^{2k} (x²/4)^{-e} dx
        let term = coeff * 2.0 * dens * 4f64.powf(e) * x_max.powf(-2.0 * nf * alpha) / (2.0 * nf * alpha);
        // size without the oscillating sin(nπα) factor, for the stopping rules
        let size = (term / (nf * std::f64::consts::PI * alpha).sin()).abs();
        if size > prev && n > 2 {
            break;
        }
        prev = size;
        total += term;
        if size < 1e-17 * total.abs() {
            break;
        }
    }
    Ok(total)
}

/// Reusable spectral solver for `e^{-t(-Δ_k)^α}` on a fixed physical grid.
#[derive(Debug, Clone)]
pub struct HeatFlow {
    plan: TransformPlan,
    xi2: Vec<f64>,
}

impl HeatFlow {
    pub fn new(plan: TransformPlan) -> Self {
        let xi2 = plan.spectral().squared_radii();
        Self { plan, xi2 }
    }

    /// Spectral grid sized for times `t ≥ t_min` and the resolution of
    /// `physical`.
    pub fn for_grid(cfg: &ReflectionConfig, physical: Arc<Grid>, t_min: f64, alpha: f64) -> Result<Self> {
        let cutoff = spectral_cutoff(t_min, alpha).min(physical.resolved_frequency());
        let spectral = Arc::new(spectral_grid(cfg, &physical, t_min, alpha, cutoff)?);
        Ok(Self::new(TransformPlan::new(cfg, physical, spectral)?))
    }

    pub fn plan(&self) -> &TransformPlan {
        &self.plan
    }

    /// `F_k f` on the spectral grid.
    pub fn spectrum(&self, f: &GridFunction) -> Result<GridFunction> {
        self.plan.forward(f)
    }

    /// Multiplies a spectrum by the multiplier of `spec`.
    pub fn propagate(&self, spectrum: &GridFunction, spec: &KernelSpec) -> Result<GridFunction> {
        let m = self.multipliers(spec)?;
        let values = spectrum.values().iter().zip(&m).map(|(v, m)| v * m).collect();
        Ok(GridFunction::from_parts(spectrum.grid().clone(), values, spectrum.parity()))
    }

    /// Multiplier values on the spectral nodes, by the route of `spec`.
    pub fn multipliers(&self, spec: &KernelSpec) -> Result<Vec<f64>> {
        Ok(match spec.route {
            KernelRoute::Subordination => {
                let rule = subordination_rule(spec)?;
                par::map_slice(&self.xi2, |&x| subordinated_multiplier(&rule, x))
            }
            _ => self.xi2.iter().map(|&x| spec.multiplier(x)).collect(),
        })
    }

    /// `F_k^{-1}` of a spectrum, on the physical grid.
    pub fn synthesize(&self, spectrum: &GridFunction) -> GridFunction {
        self.plan.inverse_unchecked(spectrum)
    }

    pub fn apply(&self, f: &GridFunction, spec: &KernelSpec) -> Result<GridFunction> {
        let g = self.spectrum(f)?;
        Ok(self.synthesize(&self.propagate(&g, spec)?))
    }
}

/// `e^{-t(-Δ_k)^α} f` on the grid of `f`.
pub fn semigroup_apply(
    cfg: &ReflectionConfig,
    f: &GridFunction,
    spec: &KernelSpec,
) -> Result<GridFunction> {
    HeatFlow::for_grid(cfg, f.grid().clone(), spec.t, spec.alpha)?.apply(f, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spec_validation() {
        assert!(KernelSpec::new(1.0, 0.5, KernelRoute::ClosedForm).is_err());
        assert!(KernelSpec::new(0.0, 1.0, KernelRoute::Spectral).is_err());
        assert!(KernelSpec::new(1.0, 1.2, KernelRoute::Spectral).is_err());
        assert!(KernelSpec::heat(2.0).is_ok());
    }

    #[test]
    fn heat_kernel_values() {
        let cfg = ReflectionConfig::new(vec![0.5, 1.0]).unwrap();
        let d_k = cfg.d_k();
        assert_relative_eq!(heat_kernel(&cfg, 1.0, &[0.0, 0.0]).unwrap(), 2f64.powf(-d_k / 2.0));
        let x = [0.7, -1.9];
        for t in [0.3f64, 4.0] {
            let scaled = [x[0] / t.sqrt(), x[1] / t.sqrt()];
            let lhs = heat_kernel(&cfg, t, &x).unwrap();
            let rhs = t.powf(-d_k / 2.0) * heat_kernel(&cfg, 1.0, &scaled).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
        assert!(heat_kernel(&cfg, -1.0, &x).is_err());
    }

    #[test]
    fn subordinated_multiplier_matches_power() {
        for alpha in [0.5, 0.75] {
            let spec = KernelSpec::fractional(2.0, alpha).unwrap();
            let rule = subordination_rule(&spec).unwrap();
            for lambda in [0.01, 0.5, 3.0, 40.0] {
                let m = subordinated_multiplier(&rule, lambda);
                assert!((m - spec.multiplier(lambda)).abs() < 1e-8, "{alpha} {lambda}: {m}");
            }
        }
    }

    #[test]
    fn spectral_alpha_one_is_gaussian() {
        let cfg = ReflectionConfig::rank_one(1.0).unwrap();
        let grid = Arc::new(Grid::uniform(&cfg, 256, 12.0).unwrap());
        let spec = KernelSpec::fractional(1.5, 1.0).unwrap();
        let h = frac_heat_kernel(&cfg, &spec, &grid).unwrap();
        let exact = frac_heat_kernel(&cfg, &KernelSpec::heat(1.5).unwrap(), &grid).unwrap();
        for (a, b) in h.values().iter().zip(exact.values()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn poisson_profile_in_rank_one() {
        // k = 0, α = 1/2: √(2/π) t / (t² + x²)
        let cfg = ReflectionConfig::rank_one(0.0).unwrap();
        let grid = Arc::new(Grid::uniform(&cfg, 256, 10.0).unwrap());
        let t = 1.3;
        let h = frac_heat_kernel(&cfg, &KernelSpec::fractional(t, 0.5).unwrap(), &grid).unwrap();
        for (x, v) in grid.axis(0).nodes().iter().zip(h.values()) {
            let want = (2.0 / std::f64::consts::PI).sqrt() * t / (t * t + x * x);
            assert!((v.re - want).abs() < 1e-9, "{x}: {} vs {want}", v.re);
        }
    }

    #[test]
    fn tail_mass_completes_unit_mass() {
        for (k, alpha) in [(0.0, 0.5), (1.0, 0.5), (0.5, 0.75), (1.0, 1.0)] {
            let cfg = ReflectionConfig::rank_one(k).unwrap();
            let grid = Arc::new(Grid::uniform(&cfg, 512, 30.0).unwrap());
            let spec = KernelSpec::fractional(1.0, alpha).unwrap();
            let h = frac_heat_kernel(&cfg, &spec, &grid).unwrap();
            let tail = rank_one_tail_mass(&cfg, &spec, 30.0).unwrap();
            let mass = h.integral().re + tail;
            assert!((mass - 1.0).abs() < 1e-6, "k={k} α={alpha}: {mass} (tail {tail})");
        }
    }

    #[test]
    fn semigroup_law_on_grid() {
        let cfg = ReflectionConfig::rank_one(0.5).unwrap();
        let grid = Arc::new(Grid::uniform(&cfg, 256, 12.0).unwrap());
        let f = GridFunction::sample(grid.clone(), |x| (-(x[0] - 0.4).powi(2)).exp());
        let flow = HeatFlow::for_grid(&cfg, grid, 0.2, 0.5).unwrap();
        let s = |t| KernelSpec::fractional(t, 0.5).unwrap();
        let g = flow.spectrum(&f).unwrap();
        let two = flow.propagate(&flow.propagate(&g, &s(0.2)).unwrap(), &s(0.3)).unwrap();
        let one = flow.propagate(&g, &s(0.5)).unwrap();
        let (a, b) = (flow.synthesize(&two), flow.synthesize(&one));
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}
