//! Weighted norms, moments, error curves and rate fits for the long-time
//! behaviour of fractional heat flows.
//!
//! The linear error `h_{t,α} ∗ u₀ − M h_{t,α}` is computed directly from its
//! transform `e^{-t|ξ|^{2α}} (F_k u₀(ξ) − M)`, on physical and spectral grids
//! sized for each `t` by the kernel scale `σ = t^{1/(2α)}`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::grid::{AxisLayout, Grid, GridFunction, Parity, ReflectionConfig};
use crate::heat::{frac_heat_kernel, spectral_grid, subordination_rule, KernelRoute, KernelSpec};
use crate::par;
use crate::specfun::ln_gamma;
use crate::transform::TransformPlan;

fn check_grid(cfg: &ReflectionConfig, f: &GridFunction) -> Result<()> {
    if f.grid().matches(cfg) {
        Ok(())
    } else {
        Err(Error::Shape("function grid does not match the configuration".into()))
    }
}

/// ‖f‖_{L^p(dμ_k)}; `p = f64::INFINITY` gives the grid maximum of |f|.
pub fn lp_norm(cfg: &ReflectionConfig, f: &GridFunction, p: f64) -> Result<f64> {
    check_grid(cfg, f)?;
    if !(p >= 1.0) {
        return domain("lp_norm", format!("p must be >= 1, got {p}"));
    }
    if p.is_infinite() {
        return Ok(f.sup());
    }
    let w = f.grid().tensor_weights();
    let s: f64 = f
        .values()
        .iter()
        .zip(&w)
        .map(|(v, w)| w * v.norm().powf(p))
        .sum();
    Ok(s.powf(1.0 / p))
}

/// N₁(f) = ∫ |f(x)| |x| dμ_k(x).
pub fn first_moment(cfg: &ReflectionConfig, f: &GridFunction) -> Result<f64> {
    check_grid(cfg, f)?;
    let w = f.grid().tensor_weights();
    let r2 = f.grid().squared_radii();
    Ok(f.values()
        .iter()
        .zip(w.iter().zip(&r2))
        .map(|(v, (w, r2))| w * v.norm() * r2.sqrt())
        .sum())
}

/// Conjugate exponent p′ with 1/p + 1/p′ = 1.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Decay exponent `d_k / (2 α p′)` of ‖h_{t,α}‖_p.
pub fn decay_exponent(d_k: f64, alpha: f64, p: f64) -> f64 {
    let pc = conjugate(p);
    if pc.is_infinite() {
        0.0
    } else {
        d_k / (2.0 * alpha * pc)
    }
}

/// Least-squares line through `(log t, log y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Number of points used.
    pub points: usize,
}

/// Log-log slope of `y` against `t`, discarding the first 20% of samples.
pub fn loglog_slope(t: &[f64], y: &[f64]) -> Result<LineFit> {
    if t.len() != y.len() {
        return Err(Error::Shape("t and y differ in length".into()));
    }
    let skip = t.len() / 5;
    let pts: Vec<(f64, f64)> = t[skip..]
        .iter()
        .zip(&y[skip..])
        .filter(|(_, v)| **v > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return domain("loglog_slope", "need at least two positive samples after the transient");
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return domain("loglog_slope", "t-values are all equal");
    }
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
        points: pts.len(),
    })
}

/// Decade-over-decade summary of a scaled error curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecadeDecay {
    pub first_mean: f64,
    pub last_mean: f64,
    pub final_value: f64,
    pub passes: bool,
}

impl DecadeDecay {
    /// Required `last_mean / first_mean`.
    pub const RATIO: f64 = 0.2;
    /// Required final value.
    pub const FINAL: f64 = 0.1;

    pub fn ratio(&self) -> f64 {
        self.last_mean / self.first_mean
    }
}

/// Means over the first decade `[t₀, 10 t₀]` and last decade
/// `[t_max/10, t_max]` of the samples.
pub fn decade_decay(t: &[f64], y: &[f64]) -> Result<DecadeDecay> {
    if t.len() != y.len() || t.is_empty() {
        return Err(Error::Shape("decade_decay needs matching nonempty samples".into()));
    }
    let (t0, t1) = (t[0], t[t.len() - 1]);
    if t1 < 10.0 * t0 * (1.0 - 1e-12) {
        return domain("decade_decay", "the t-grid spans less than one decade");
    }
    let mean = |keep: &dyn Fn(f64) -> bool| {
        let v: Vec<f64> = t.iter().zip(y).filter(|(t, _)| keep(**t)).map(|(_, y)| *y).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let first_mean = mean(&|s| s <= 10.0 * t0 * (1.0 + 1e-12));
    let last_mean = mean(&|s| s >= t1 / 10.0 * (1.0 - 1e-12));
    let final_value = y[y.len() - 1];
    Ok(DecadeDecay {
        first_mean,
        last_mean,
        final_value,
        passes: last_mean <= DecadeDecay::RATIO * first_mean && final_value <= DecadeDecay::FINAL,
    })
}

/// Means of `y` over consecutive whole decades `[t₀ 10^j, t₀ 10^{j+1}]`.
pub fn decade_means(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    if t.is_empty() || t.len() != y.len() {
        return out;
    }
    let end = t[t.len() - 1] * (1.0 + 1e-9);
    let mut lo = t[0];
    while 10.0 * lo <= end {
        let (a, b) = (lo * (1.0 - 1e-9), 10.0 * lo * (1.0 + 1e-9));
        let v: Vec<f64> = t.iter().zip(y).filter(|(s, _)| **s >= a && **s <= b).map(|(_, v)| *v).collect();
        out.push(v.iter().sum::<f64>() / v.len() as f64);
        lo *= 10.0;
    }
    out
}

/// `n` log-spaced values from `a` to `b` inclusive.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    let mut out: Vec<f64> = (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect();
    // endpoints exactly, so grids can be compared against them
    out[0] = a;
    out[n - 1] = b;
    out
}

/// Scaled linear error `t^{d_k/(2αp′)} ‖h_{t,α} ∗ u₀ − M h_{t,α}‖_p` over `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub alpha: f64,
    pub p: f64,
    pub t: Vec<f64>,
    pub raw: Vec<f64>,
    pub scaled: Vec<f64>,
    pub mass: f64,
}

impl ErrorCurve {
    /// Builds the scaled column from raw errors.
    pub fn from_raw(d_k: f64, alpha: f64, p: f64, t: Vec<f64>, raw: Vec<f64>, mass: f64) -> Self {
        let e = decay_exponent(d_k, alpha, p);
        let scaled = t.iter().zip(&raw).map(|(t, r)| r * t.powf(e)).collect();
        Self {
            alpha,
            p,
            t,
            raw,
            scaled,
            mass,
        }
    }

    pub fn decade_decay(&self) -> Result<DecadeDecay> {
        decade_decay(&self.t, &self.scaled)
    }

    pub fn slope(&self) -> Result<LineFit> {
        loglog_slope(&self.t, &self.scaled)
    }
}

/// Grid sizes for error fields, in units of the kernel scale `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorGrids {
    /// Physical half-width beyond the support of `u₀`.
    pub tail: f64,
    /// Uniform panels out to this distance beyond the support; geometric
    /// growth by 1.3 after.
    pub core: f64,
    /// Physical panel width.
    pub panel: f64,
    /// The spectral grid stops where `t|ξ|^{2α} = decay`.
    pub decay: f64,
}

impl ErrorGrids {
    pub fn auto(alpha: f64) -> Self {
        if alpha == 1.0 {
            // e^{-144/4} ≈ 2e-16 at the edge
            Self {
                tail: 12.0,
                core: 12.0,
                panel: 0.75,
                decay: 36.0,
            }
        } else {
            // the algebraic tail is cut; the same fraction is lost at every t
            Self {
                tail: 24.0,
                core: 8.0,
                panel: 0.75,
                decay: 30.0,
            }
        }
    }
}

/// Largest coordinate of a node where `|f|` exceeds `1e-15 sup |f|`.
pub fn support_reach(f: &GridFunction) -> f64 {
    let floor = 1e-15 * f.sup();
    let grid = f.grid();
    (0..f.len())
        .filter(|&i| f.values()[i].norm() > floor)
        .flat_map(|i| grid.point(i))
        .fold(0.0, |m, x| m.max(x.abs()))
}

/// Physical and spectral grids for the error field at time `t`.
fn error_grids(
    cfg: &ReflectionConfig,
    reach: f64,
    alpha: f64,
    t: f64,
    sizes: &ErrorGrids,
) -> Result<(Arc<Grid>, Arc<Grid>)> {
    let sigma = t.powf(0.5 / alpha);
    let half = reach + sizes.tail * sigma;
    let core = reach + sizes.core * sigma;
    let layout = AxisLayout {
        half_width: half,
        panel_width: (sizes.panel * sigma).min(half / 4.0),
        core,
        outer_ratio: if core < half { 1.3 } else { 1.0 },
        inner_min: None,
        inner_ratio: 2.0,
        nodes_per_panel: 16,
    };
    let physical = Arc::new(Grid::isotropic(cfg, &layout)?);
    let cutoff = (sizes.decay / t).powf(0.5 / alpha);
    let spectral = Arc::new(spectral_grid(cfg, &physical, t, alpha, cutoff)?);
    Ok((physical, spectral))
}

/// `h_{t,α} ∗ u₀ − M h_{t,α}` on a grid sized for `t`.
pub fn error_field(
    cfg: &ReflectionConfig,
    u0: &GridFunction,
    mass: f64,
    alpha: f64,
    t: f64,
    sizes: &ErrorGrids,
) -> Result<GridFunction> {
    check_grid(cfg, u0)?;
    KernelSpec::fractional(t, alpha)?;
    let (physical, spectral) = error_grids(cfg, support_reach(u0), alpha, t, sizes)?;
    let fu = TransformPlan::new(cfg, u0.grid().clone(), spectral.clone())?.forward(u0)?;
    let xi2 = spectral.squared_radii();
    let values: Vec<Complex64> = fu
        .values()
        .iter()
        .zip(&xi2)
        .map(|(v, x)| (v - mass) * (-t * x.powf(alpha)).exp())
        .collect();
    let plan = TransformPlan::new(cfg, physical, spectral.clone())?;
    Ok(plan.inverse_unchecked(&GridFunction::from_parts(spectral, values, Parity::None)))
}

fn check_times(op: &'static str, t: &[f64]) -> Result<()> {
    if t.is_empty() || t.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return domain(op, "t-values must be positive and finite");
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        return domain(op, "t-values must be strictly increasing");
    }
    Ok(())
}

fn nonzero_mass(u0: &GridFunction) -> Result<f64> {
    let mass = u0.integral().re;
    if mass.abs() <= 1e-10 {
        return domain(
            "linear_error_curve",
            format!("the mass of u0 is {mass:.3e}; the profile M h_t needs M != 0"),
        );
    }
    Ok(mass)
}

/// Error curves for several exponents sharing one error field per `t`.
pub fn linear_error_curves(
    cfg: &ReflectionConfig,
    u0: &GridFunction,
    alpha: f64,
    ps: &[f64],
    t: &[f64],
    sizes: &ErrorGrids,
) -> Result<Vec<ErrorCurve>> {
    check_grid(cfg, u0)?;
    check_times("linear_error_curve", t)?;
    if let Some(p) = ps.iter().find(|p| !(**p >= 1.0)) {
        return domain("linear_error_curve", format!("p must be >= 1, got {p}"));
    }
    let mass = nonzero_mass(u0)?;
    let rows = par::map_slice(t, |&ti| -> Result<Vec<f64>> {
        let e = error_field(cfg, u0, mass, alpha, ti, sizes)?;
        ps.iter().map(|&p| lp_norm(cfg, &e, p)).collect()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let d_k = cfg.d_k();
    Ok(ps
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let raw = rows.iter().map(|r| r[j]).collect();
            ErrorCurve::from_raw(d_k, alpha, p, t.to_vec(), raw, mass)
        })
        .collect())
}

pub fn linear_error_curve(
    cfg: &ReflectionConfig,
    u0: &GridFunction,
    alpha: f64,
    p: f64,
    t: &[f64],
) -> Result<ErrorCurve> {
    let sizes = ErrorGrids::auto(alpha);
    Ok(linear_error_curves(cfg, u0, alpha, &[p], t, &sizes)?.remove(0))
}

/// Heat-flow (`α = 1`) rates against the first moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRate {
    pub t: Vec<f64>,
    /// ‖h_t ∗ f − M h_t‖₁.
    pub l1: Vec<f64>,
    /// t^{d_k/2} ‖h_t ∗ f − M h_t‖_∞.
    pub sup_scaled: Vec<f64>,
    pub n1: f64,
    pub mass: f64,
    pub slope_l1: LineFit,
    pub slope_sup: LineFit,
    /// `1.1 ×` the largest `error / (N₁ t^{-1/2})` over the fitted range,
    /// per channel.
    pub constant_l1: f64,
    pub constant_sup: f64,
    /// Whether both constants bound their channel over the whole grid.
    pub uniform: bool,
}

/// Margin on the constant fitted over the asymptotic range before it is
/// checked against the whole grid.
pub const RATE_MARGIN: f64 = 1.1;

/// Fits the decay of the heat-flow error against `N₁(f) t^{-1/2}`.
pub fn moment_rate_check(cfg: &ReflectionConfig, f: &GridFunction, t: &[f64]) -> Result<MomentRate> {
    if t.len() < 4 {
        return domain("moment_rate_check", format!("need at least 4 t-values, got {}", t.len()));
    }
    let n1 = first_moment(cfg, f)?;
    let curves = linear_error_curves(cfg, f, 1.0, &[1.0, f64::INFINITY], t, &ErrorGrids::auto(1.0))?;
    let (l1, sup_scaled) = (curves[0].scaled.clone(), curves[1].scaled.clone());
    let skip = t.len() / 5;
    let ratio = |y: &[f64]| -> Vec<f64> { t.iter().zip(y).map(|(t, e)| e * t.sqrt() / n1).collect() };
    let (r1, rs) = (ratio(&l1), ratio(&sup_scaled));
    let max = |r: &[f64]| RATE_MARGIN * r[skip..].iter().copied().fold(0.0, f64::max);
    let (constant_l1, constant_sup) = (max(&r1), max(&rs));
    let uniform = r1.iter().all(|r| *r <= constant_l1) && rs.iter().all(|r| *r <= constant_sup);
    Ok(MomentRate {
        slope_l1: loglog_slope(t, &l1)?,
        slope_sup: loglog_slope(t, &sup_scaled)?,
        t: t.to_vec(),
        l1,
        sup_scaled,
        n1,
        mass: curves[0].mass,
        constant_l1,
        constant_sup,
        uniform,
    })
}

/// The split of the subordinated error into `s < t` and `s > t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub alpha: f64,
    pub p: f64,
    pub t: f64,
    pub i_t: f64,
    pub j_t: f64,
    /// Scaled error of the fractional flow at `t`.
    pub scaled_error: f64,
    /// sup over s ≥ t of the scaled heat error.
    pub heat_sup: f64,
    /// `heat_sup · E[S^{-b}]`, the bound for `J_t`.
    pub j_bound: f64,
    /// `I_t + J_t ≥ scaled_error - 1e-4`.
    pub holds: bool,
}

/// Heat-error samples per decade of `s` in [`subordination_split_check`].
const SPLIT_SAMPLES_PER_DECADE: usize = 12;

/// Evaluates `I_t` and `J_t` by integrating the heat-flow error norm against
/// η_{t,α}. The norm is sampled on a log grid in `s` and interpolated; past
/// the last sample it is continued by the power law of the last two.
pub fn subordination_split_check(
    cfg: &ReflectionConfig,
    u0: &GridFunction,
    alpha: f64,
    p: f64,
    t: f64,
) -> Result<SplitRecord> {
    if !(t > 1.0) {
        return domain("subordination_split_check", format!("t must exceed 1, got {t}"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain("subordination_split_check", format!("alpha must lie in (0, 1), got {alpha}"));
    }
    let mass = nonzero_mass(u0)?;
    let d_k = cfg.d_k();
    let spec = KernelSpec::new(t, alpha, KernelRoute::Subordination)?;
    let rule: Vec<(f64, f64)> = subordination_rule(&spec)?
        .into_iter()
        .filter(|(_, w)| *w > 1e-18)
        .collect();
    let (s_lo, s_hi) = (rule[0].0, 1e6 * t.powf(1.0 / alpha).max(1.0));
    let decades = (s_hi / s_lo).log10();
    let n = (decades * SPLIT_SAMPLES_PER_DECADE as f64).ceil() as usize + 1;
    let s_grid = log_space(s_lo, s_hi, n);
    let heat = ErrorGrids::auto(1.0);
    let norms = par::map_slice(&s_grid, |&s| {
        error_field(cfg, u0, mass, 1.0, s, &heat).and_then(|e| lp_norm(cfg, &e, p))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let ls: Vec<f64> = s_grid.iter().map(|s| s.ln()).collect();
    let ln: Vec<f64> = norms.iter().map(|v| v.max(1e-300).ln()).collect();
    let tail_slope = (ln[n - 1] - ln[n - 2]) / (ls[n - 1] - ls[n - 2]);
    let norm_at = |s: f64| -> f64 {
        let x = s.ln();
        if x >= ls[n - 1] {
            return (ln[n - 1] + tail_slope * (x - ls[n - 1])).exp();
        }
        let i = ls.partition_point(|v| *v <= x).clamp(1, n - 1) - 1;
        cubic_log(&ls, &ln, i, x).exp()
    };
    let scale = t.powf(decay_exponent(d_k, alpha, p));
    let (mut i_t, mut j_t) = (0.0, 0.0);
    for &(s, w) in &rule {
        let v = w * norm_at(s);
        if s < t {
            i_t += v;
        } else {
            j_t += v;
        }
    }
    let (i_t, j_t) = (i_t * scale, j_t * scale);
    let b = decay_exponent(d_k, 1.0, p);
    let heat_sup = s_grid
        .iter()
        .zip(&norms)
        .filter(|(s, _)| **s >= t)
        .map(|(s, v)| v * s.powf(b))
        .fold(0.0, f64::max);
    let moment = (ln_gamma(1.0 + b / alpha) - ln_gamma(1.0 + b)).exp();
    let e = error_field(cfg, u0, mass, alpha, t, &ErrorGrids::auto(alpha))?;
    let scaled_error = scale * lp_norm(cfg, &e, p)?;
    Ok(SplitRecord {
        alpha,
        p,
        t,
        i_t,
        j_t,
        scaled_error,
        heat_sup,
        j_bound: heat_sup * moment,
        holds: i_t + j_t >= scaled_error - 1e-4,
    })
}

/// Cubic through the four samples around interval `i` (fewer at the ends).
fn cubic_log(x: &[f64], y: &[f64], i: usize, at: f64) -> f64 {
    let lo = i.saturating_sub(1);
    let hi = (i + 3).min(x.len());
    let lo = hi.saturating_sub(4).min(lo);
    let mut acc = 0.0;
    for a in lo..hi {
        let mut l = 1.0;
        for b in lo..hi {
            if a != b {
                l *= (at - x[b]) / (x[a] - x[b]);
            }
        }
        acc += l * y[a];
    }
    acc
}

/// ‖h_{t,α}‖_p over `t`, with the fitted log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormDecay {
    pub alpha: f64,
    pub p: f64,
    pub t: Vec<f64>,
    pub norms: Vec<f64>,
    pub fit: LineFit,
    /// `-d_k / (2 α p′)`.
    pub expected: f64,
}

/// Samples `h_{t,α}` pointwise (closed form for α = 1, subordination
/// otherwise) on one fixed grid covering every `t` and fits the decay.
///
/// The grid has uniform panels of width 1/2 to radius 8 and grows
/// geometrically after, out to `12 √t_max` for α = 1 and
/// `10⁴ t_max^{1/(2α)}` for the algebraic tails of α < 1.
pub fn kernel_norm_decay(cfg: &ReflectionConfig, alpha: f64, p: f64, t: &[f64]) -> Result<NormDecay> {
    check_times("kernel_norm_decay", t)?;
    let t_max = t[t.len() - 1];
    let sigma = t_max.powf(0.5 / alpha);
    let half = if alpha == 1.0 { 12.0 * sigma } else { 1e4 * sigma };
    let layout = AxisLayout {
        half_width: half,
        panel_width: 0.5,
        core: 8.0,
        outer_ratio: 1.2,
        inner_min: None,
        inner_ratio: 2.0,
        nodes_per_panel: 16,
    };
    let grid = Arc::new(Grid::isotropic(cfg, &layout)?);
    let route = if alpha == 1.0 {
        KernelRoute::ClosedForm
    } else {
        KernelRoute::Subordination
    };
    let norms = t
        .iter()
        .map(|&ti| {
            let h = frac_heat_kernel(cfg, &KernelSpec::new(ti, alpha, route)?, &grid)?;
            lp_norm(cfg, &h, p)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(NormDecay {
        alpha,
        p,
        fit: loglog_slope(t, &norms)?,
        expected: -decay_exponent(cfg.d_k(), alpha, p),
        t: t.to_vec(),
        norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat::heat_kernel;
    use crate::presets::Preset;

    fn rank_one(k: f64) -> ReflectionConfig {
        ReflectionConfig::rank_one(k).unwrap()
    }

    #[test]
    fn norms_of_heat_kernel() {
        let cfg = rank_one(1.0);
        let grid = Arc::new(Grid::uniform(&cfg, 512, 20.0).unwrap());
        let h1 = GridFunction::sample_radial(grid, |r2| crate::heat::heat_radial(cfg.d_k(), 1.0, r2));
        assert!((lp_norm(&cfg, &h1, 1.0).unwrap() - 1.0).abs() < 1e-10);
        // ‖h_1‖₂² = h_2(0)
        let l2 = lp_norm(&cfg, &h1, 2.0).unwrap();
        assert!((l2 * l2 - heat_kernel(&cfg, 2.0, &[0.0]).unwrap()).abs() < 1e-12);
        let c = lp_norm(&cfg, &h1.scale(-3.0), 3.0).unwrap();
        assert!((c - 3.0 * lp_norm(&cfg, &h1, 3.0).unwrap()).abs() < 1e-12);
        assert!(lp_norm(&cfg, &h1, 0.5).is_err());
    }

    #[test]
    fn first_moment_scales_with_sqrt_t() {
        let cfg = rank_one(0.5);
        let grid = Arc::new(Grid::uniform(&cfg, 512, 40.0).unwrap());
        let n = |t: f64| {
            let h = GridFunction::sample_radial(grid.clone(), |r2| crate::heat::heat_radial(cfg.d_k(), t, r2));
            first_moment(&cfg, &h).unwrap()
        };
        assert!((n(4.0) - 2.0 * n(1.0)).abs() < 1e-10);
        let f = Preset::Bump.sample(&cfg, 128).unwrap();
        let bound = 1.4 * lp_norm(&cfg, &f, 1.0).unwrap();
        assert!(first_moment(&cfg, &f).unwrap() <= bound + 1e-8);
        let twice = first_moment(&cfg, &f.scale(2.0)).unwrap();
        assert!((twice - 2.0 * first_moment(&cfg, &f).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let t = log_space(1.0, 100.0, 20);
        let y: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(-0.7)).collect();
        let fit = loglog_slope(&t, &y).unwrap();
        assert!((fit.slope + 0.7).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert_eq!(fit.points, 16);
    }

    #[test]
    fn whole_decade_means() {
        let t = log_space(1.0, 1000.0, 31);
        let y: Vec<f64> = t.iter().map(|t| 1.0 / t).collect();
        let m = decade_means(&t, &y);
        assert_eq!(m.len(), 3);
        assert!(m.windows(2).all(|w| (w[1] / w[0] - 0.1).abs() < 1e-12));
        assert_eq!(decade_means(&t[..5], &y[..5]).len(), 0);
    }

    #[test]
    fn decade_summary() {
        let t = log_space(1.0, 1000.0, 31);
        let y: Vec<f64> = t.iter().map(|t| 1.0 / t).collect();
        let d = decade_decay(&t, &y).unwrap();
        assert!(d.passes && d.ratio() < 0.02);
        assert!(decade_decay(&t[..5], &y[..5]).is_err());
    }

    #[test]
    fn error_field_vanishes_for_centred_kernel_data() {
        // u₀ = h_ε: h_t ∗ h_ε − h_t = h_{t+ε} − h_t
        let cfg = rank_one(0.5);
        let eps = 0.05;
        let grid = Arc::new(Grid::uniform(&cfg, 256, 2.5).unwrap());
        let u0 = GridFunction::sample_radial(grid, |r2| crate::heat::heat_radial(cfg.d_k(), eps, r2));
        let mass = u0.integral().re;
        let t = 3.0;
        let e = error_field(&cfg, &u0, mass, 1.0, t, &ErrorGrids::auto(1.0)).unwrap();
        let g = e.grid().clone();
        for (i, v) in e.values().iter().enumerate() {
            let x = g.point(i);
            let want = mass * (heat_kernel(&cfg, t + eps, &x).unwrap() - heat_kernel(&cfg, t, &x).unwrap());
            assert!((v.re - want).abs() < 1e-10 && v.im.abs() < 1e-10, "{x:?}: {v} vs {want}");
        }
    }

    #[test]
    fn raw_error_obeys_triangle_bound() {
        let cfg = rank_one(1.0);
        let u0 = Preset::DipolePlusMass.sample(&cfg, 128).unwrap();
        let l1 = lp_norm(&cfg, &u0, 1.0).unwrap();
        let m = u0.integral().re.abs();
        let t = [1.0, 4.0];
        for p in [1.0, 2.0, f64::INFINITY] {
            let c = linear_error_curve(&cfg, &u0, 1.0, p, &t).unwrap();
            for (i, &ti) in t.iter().enumerate() {
                let grid = Arc::new(Grid::uniform(&cfg, 512, 12.0 * ti.sqrt() + 2.0).unwrap());
                let h = GridFunction::sample_radial(grid, |r2| crate::heat::heat_radial(cfg.d_k(), ti, r2));
                let bound = (l1 + m) * lp_norm(&cfg, &h, p).unwrap();
                assert!(c.raw[i] <= bound + 1e-6);
                let e = decay_exponent(cfg.d_k(), 1.0, p);
                assert_eq!(c.scaled[i], c.raw[i] * ti.powf(e));
            }
        }
    }

    #[test]
    fn zero_mass_is_rejected() {
        let cfg = rank_one(0.5);
        let u0 = Preset::ZeroMass.sample(&cfg, 64).unwrap();
        let e = linear_error_curve(&cfg, &u0, 1.0, 1.0, &[1.0, 2.0]).unwrap_err();
        assert!(e.to_string().contains("M != 0"));
    }

    #[test]
    fn moment_rate_needs_four_times() {
        let cfg = rank_one(0.5);
        let u0 = Preset::Bump.sample(&cfg, 64).unwrap();
        assert!(moment_rate_check(&cfg, &u0, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn split_needs_t_above_one() {
        let cfg = rank_one(0.5);
        let u0 = Preset::Bump.sample(&cfg, 64).unwrap();
        assert!(subordination_split_check(&cfg, &u0, 0.5, 1.0, 1.0).is_err());
    }
}
