//! `∂_t u + (−Δ_k)^α u = −u^p` with nonnegative data.
//!
//! Strang splitting: half a step of the exact flow of `u′ = −u^p`, a full
//! step of the exact linear flow, another half step. The state is kept as
//! its transform, so the linear step is a multiplication and the heavy tails
//! of α < 1 are never cut off. The physical grid is only where the
//! nonlinear substeps are evaluated.
//!
//! Time is split into epochs `[0, 1], [1, 2], [2, 4], …`. Each epoch has its
//! own physical grid, spanning a fixed multiple of the kernel scale
//! `t^{1/(2α)}` at its end, and its own spectral grid, truncated where the
//! multiplier has fallen below `e^{-46}` at its start. The transform is
//! carried to the next epoch by panel-wise interpolation.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{log_space, loglog_slope, lp_norm, support_reach, ErrorCurve};
use crate::error::{domain, Error, Result};
use crate::grid::{AxisLayout, Grid, GridFunction, Parity, ReflectionConfig};
use crate::heat::spectral_grid;
use crate::transform::TransformPlan;

/// Spectral content of `u₀` is cut where it drops below this fraction of its
/// peak.
const BANDWIDTH_FLOOR: f64 = 1e-15;

/// `t|ξ|^{2α}` at which a spectral grid stops.
const SPECTRAL_DECAY: f64 = 46.0;

/// Slack of the comparison principle check.
pub const COMPARISON_SLACK: f64 = 1e-6;

/// Data, exponents and step control of one run.
#[derive(Debug, Clone)]
pub struct NonlinearProblem {
    cfg: ReflectionConfig,
    alpha: f64,
    p: f64,
    u0: GridFunction,
    t_end: f64,
    dt: f64,
    q: Vec<f64>,
    growth: f64,
    snapshots: Vec<f64>,
    tail: f64,
}

impl NonlinearProblem {
    /// Checks `p > 1 + 2α/d_k` and `u₀ ≥ 0`. Snapshots default to 31
    /// log-spaced times ending at `t_end`; the step is fixed at `dt`.
    pub fn new(
        cfg: &ReflectionConfig,
        alpha: f64,
        p: f64,
        u0: GridFunction,
        t_end: f64,
        dt: f64,
        q: Vec<f64>,
    ) -> Result<Self> {
        const OP: &str = "NonlinearProblem";
        if !(alpha > 0.0 && alpha <= 1.0) {
            return domain(OP, format!("alpha must lie in (0, 1], got {alpha}"));
        }
        let critical = 1.0 + 2.0 * alpha / cfg.d_k();
        if !(p > critical) {
            return domain(
                OP,
                format!("p = {p} violates the hypothesis p > 1 + 2 alpha / d_k = {critical}"),
            );
        }
        if !u0.grid().matches(cfg) {
            return Err(Error::Shape("u0 grid does not match the configuration".into()));
        }
        if let Some(i) = u0.values().iter().position(|v| v.re < 0.0 || v.im != 0.0) {
            return domain(
                OP,
                format!("u0 must be real and nonnegative; sample {i} is {}", u0.values()[i]),
            );
        }
        if !(t_end > 0.0 && t_end.is_finite()) || !(dt > 0.0 && dt <= t_end) {
            return domain(OP, format!("need 0 < dt <= t_end, got dt = {dt}, t_end = {t_end}"));
        }
        if let Some(v) = q.iter().find(|v| !(**v >= 1.0 && v.is_finite())) {
            return domain(OP, format!("error exponents must lie in [1, inf), got {v}"));
        }
        let snapshots = log_space((t_end * 1e-3).max(dt), t_end, 31);
        Ok(Self {
            cfg: cfg.clone(),
            alpha,
            p,
            u0,
            t_end,
            dt,
            q,
            growth: 0.0,
            snapshots,
            tail: 12.0,
        })
    }

    /// Steps of `max(dt, growth · t)`; 0 keeps `dt` fixed.
    pub fn with_step_growth(mut self, growth: f64) -> Result<Self> {
        if !(growth >= 0.0 && growth < 0.5) {
            return domain("NonlinearProblem", format!("step growth must lie in [0, 0.5), got {growth}"));
        }
        self.growth = growth;
        Ok(self)
    }

    /// Snapshot times, increasing, in `(0, t_end]`.
    pub fn with_snapshots(mut self, times: Vec<f64>) -> Result<Self> {
        let ok = times.iter().all(|t| *t > 0.0 && *t <= self.t_end) && times.windows(2).all(|w| w[0] < w[1]);
        if !ok || times.is_empty() {
            return domain("NonlinearProblem", "snapshot times must increase within (0, t_end]");
        }
        self.snapshots = times;
        Ok(self)
    }

    /// Physical half-width beyond the data, in units of `t^{1/(2α)}`.
    pub fn with_tail(mut self, tail: f64) -> Result<Self> {
        if !(tail >= 2.0) {
            return domain("NonlinearProblem", format!("tail must be at least 2, got {tail}"));
        }
        self.tail = tail;
        Ok(self)
    }

    pub fn cfg(&self) -> &ReflectionConfig {
        &self.cfg
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn u0(&self) -> &GridFunction {
        &self.u0
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn snapshots(&self) -> &[f64] {
        &self.snapshots
    }

    /// `1 + 2α/d_k`.
    pub fn critical_exponent(&self) -> f64 {
        1.0 + 2.0 * self.alpha / self.cfg.d_k()
    }
}

/// Solution, linear flow `h_{t,α} ∗ u₀` and kernel `h_{t,α}` at one time,
/// on that epoch's physical grid.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub u: GridFunction,
    pub linear: GridFunction,
    pub kernel: GridFunction,
}

/// Per-step record of a run.
#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    /// M(t) = ∫u(·,t) dμ_k.
    pub mass: Vec<f64>,
    /// ∫₀^t ∫u^p dμ_k ds by the trapezoid rule over the steps.
    pub loss: Vec<f64>,
    /// ∫u^p dμ_k at each stamp.
    pub dissipation: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    /// Smallest `u / sup u` seen on any physical grid.
    pub min_relative: f64,
}

impl EvolutionTrace {
    pub fn initial_mass(&self) -> f64 {
        self.mass[0]
    }

    /// `|∫u₀ − M(t) − loss(t)|` at every stamp.
    pub fn residuals(&self) -> Vec<f64> {
        let m0 = self.initial_mass();
        self.mass.iter().zip(&self.loss).map(|(m, l)| (m0 - m - l).abs()).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().into_iter().fold(0.0, f64::max)
    }

    /// Whether `M(t_{n+1}) ≤ M(t_n) + 1e-10` at every step.
    pub fn mass_nonincreasing(&self) -> bool {
        self.mass.windows(2).all(|w| w[1] <= w[0] + 1e-10)
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }
}

/// `u − N_τ(u)` where `N_τ` solves `u′ = −u^p` for time τ.
fn absorbed(u: f64, p: f64, tau: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    // N = u (1 + (p−1) τ u^{p−1})^{−1/(p−1)}
    let z = (p - 1.0) * tau * u.powf(p - 1.0);
    -u * (-(z.ln_1p()) / (p - 1.0)).exp_m1()
}

struct Epoch {
    start: f64,
    stop: f64,
    plan: TransformPlan,
    weights: Vec<f64>,
    xi_pow: Vec<f64>,
}

fn epoch_bounds(t_end: f64) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, t_end.min(1.0))];
    let mut a = 1.0;
    while a < t_end * (1.0 - 1e-12) {
        let b = (2.0 * a).min(t_end);
        out.push((a, b));
        a = b;
    }
    out
}

/// Largest frequency where `|F_k u₀|` exceeds `BANDWIDTH_FLOOR` of its peak.
/// The probe runs to twice the data grid's nominal resolution; a 16-node
/// panel still integrates 16 radians of phase to rounding.
fn bandwidth(cfg: &ReflectionConfig, u0: &GridFunction) -> Result<f64> {
    let grid = u0.grid();
    let layout = AxisLayout::resolving(2.0 * grid.resolved_frequency(), grid.reach(), None);
    let spectral = Arc::new(Grid::isotropic(cfg, &layout)?);
    let fu = TransformPlan::new(cfg, grid.clone(), spectral.clone())?.forward(u0)?;
    let floor = BANDWIDTH_FLOOR * fu.sup();
    let top = (0..fu.len())
        .filter(|&i| fu.values()[i].norm() > floor)
        .flat_map(|i| spectral.point(i))
        .fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(if top > 0.0 { top } else { 1.0 })
}

impl Epoch {
    fn new(problem: &NonlinearProblem, start: f64, stop: f64, xi0: f64, reach: f64) -> Result<Self> {
        let (cfg, alpha) = (&problem.cfg, problem.alpha);
        let band = if start > 0.0 {
            xi0.min((SPECTRAL_DECAY / start).powf(0.5 / alpha))
        } else {
            xi0
        };
        let sigma_end = stop.max(1.0).powf(0.5 / alpha);
        let half = reach + problem.tail * sigma_end;
        let mut panel = RESOLVED_PANEL / band;
        if start > 0.0 {
            panel = panel.min(0.75 * start.powf(0.5 / alpha));
        }
        let core = reach + 4.0 * sigma_end;
        let layout = AxisLayout {
            half_width: half,
            panel_width: panel.min(half / 4.0),
            core,
            outer_ratio: 1.3,
            inner_min: None,
            inner_ratio: 2.0,
            nodes_per_panel: 16,
        };
        let physical = Arc::new(Grid::isotropic(cfg, &layout)?);
        let spectral = Arc::new(spectral_grid(cfg, &physical, stop, alpha, band)?);
        let xi_pow = spectral.squared_radii().iter().map(|x| x.powf(alpha)).collect();
        let weights = physical.tensor_weights();
        Ok(Self {
            start,
            stop,
            plan: TransformPlan::new(cfg, physical, spectral)?,
            weights,
            xi_pow,
        })
    }

    fn multiply(&self, values: &mut [Complex64], t: f64) {
        for (v, x) in values.iter_mut().zip(&self.xi_pow) {
            *v *= (-t * x).exp();
        }
    }

    fn physical(&self, spectrum: &[Complex64]) -> Vec<f64> {
        self.plan.inverse_values(spectrum).into_iter().map(|v| v.re).collect()
    }

    fn integral(&self, v: &[f64]) -> f64 {
        v.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }
}

/// Physical panels may sweep this much phase at the top frequency.
const RESOLVED_PANEL: f64 = crate::grid::RESOLVED_PHASE;

fn boundary_threshold(alpha: f64) -> f64 {
    if alpha == 1.0 {
        1e-8
    } else {
        1e-3
    }
}

/// Runs the splitting scheme to `t_end`, recording every step.
pub fn evolve(problem: &NonlinearProblem) -> Result<EvolutionTrace> {
    let cfg = &problem.cfg;
    let (alpha, p) = (problem.alpha, problem.p);
    let u0 = &problem.u0;
    let xi0 = bandwidth(cfg, u0)?;
    let reach = support_reach(u0);
    let m0 = u0.integral().re;

    let mut trace = EvolutionTrace {
        times: vec![0.0],
        mass: vec![m0],
        loss: vec![0.0],
        dissipation: vec![],
        snapshots: vec![],
        min_relative: 0.0,
    };
    let mut mass = m0;
    let mut loss = 0.0;
    let mut snaps = problem.snapshots.iter().copied().peekable();
    let mut state: Option<(Arc<Grid>, Vec<Complex64>)> = None;

    for (start, stop) in epoch_bounds(problem.t_end) {
        let epoch = Epoch::new(problem, start, stop, xi0, reach)?;
        let spectral = epoch.plan.spectral().clone();
        let physical = epoch.plan.physical().clone();
        let u0_hat = TransformPlan::new(cfg, u0.grid().clone(), spectral.clone())?
            .forward(u0)?
            .into_values();
        let mut hat = match state.take() {
            None => u0_hat.clone(),
            Some((old, values)) => old.interpolate(&values, &spectral),
        };
        let mut u = epoch.physical(&hat);
        let mut diss = epoch.integral(&u.iter().map(|v| v.max(0.0).powf(p)).collect::<Vec<_>>());
        if trace.dissipation.is_empty() {
            trace.dissipation.push(diss);
        }
        let mut t = epoch.start;
        while t < epoch.stop * (1.0 - 1e-13) {
            let mut h = problem.dt.max(problem.growth * t).min(epoch.stop - t);
            if let Some(&s) = snaps.peek() {
                if s > t * (1.0 + 1e-13) {
                    h = h.min(s - t);
                }
            }
            // close the gap to a target instead of leaving a sliver
            if epoch.stop - t - h < 1e-9 * h {
                h = epoch.stop - t;
            }
            let d1: Vec<f64> = u.iter().map(|&v| absorbed(v, p, 0.5 * h)).collect();
            mass -= epoch.integral(&d1);
            let f1 = epoch.plan.forward_values(&real(&d1));
            for (a, b) in hat.iter_mut().zip(&f1) {
                *a -= b;
            }
            epoch.multiply(&mut hat, h);
            u = epoch.physical(&hat);
            let d2: Vec<f64> = u.iter().map(|&v| absorbed(v, p, 0.5 * h)).collect();
            mass -= epoch.integral(&d2);
            let f2 = epoch.plan.forward_values(&real(&d2));
            for (a, b) in hat.iter_mut().zip(&f2) {
                *a -= b;
            }
            for (a, b) in u.iter_mut().zip(&d2) {
                *a -= b;
            }
            t += h;

            let peak = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if peak > 0.0 {
                let low = u.iter().fold(f64::INFINITY, |m, v| m.min(*v));
                trace.min_relative = trace.min_relative.min(low / peak);
                let edge = (0..u.len())
                    .filter(|&i| physical.on_boundary(i))
                    .fold(0.0f64, |m, i| m.max(u[i].abs()));
                if edge > boundary_threshold(alpha) * peak {
                    return Err(Error::TruncationAt { time: t, boundary: edge / peak });
                }
            }
            let next = epoch.integral(&u.iter().map(|v| v.max(0.0).powf(p)).collect::<Vec<_>>());
            loss += 0.5 * h * (diss + next);
            diss = next;
            trace.times.push(t);
            trace.mass.push(mass);
            trace.loss.push(loss);
            trace.dissipation.push(diss);

            if let Some(&s) = snaps.peek() {
                if (t - s).abs() <= 1e-12 * s.max(1.0) || t > s {
                    snaps.next();
                    let mut lin = u0_hat.clone();
                    epoch.multiply(&mut lin, t);
                    let mut ker = vec![Complex64::new(1.0, 0.0); spectral.len()];
                    epoch.multiply(&mut ker, t);
                    trace.snapshots.push(Snapshot {
                        t,
                        u: GridFunction::from_parts(physical.clone(), real(&u), Parity::None),
                        linear: GridFunction::from_parts(
                            physical.clone(),
                            real(&epoch.physical(&lin)),
                            Parity::None,
                        ),
                        kernel: GridFunction::from_parts(
                            physical.clone(),
                            real(&epoch.physical(&ker)),
                            Parity::Even,
                        ),
                    });
                }
            }
        }
        state = Some((spectral, hat));
    }
    Ok(trace)
}

fn real(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// Samplewise check of `u(·,t) ≤ h_{t,α} ∗ u₀ + COMPARISON_SLACK`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub holds: bool,
    /// Largest `u − h_{t,α} ∗ u₀` over all snapshots.
    pub max_excess: f64,
    /// `(t, max excess)` per snapshot.
    pub per_snapshot: Vec<(f64, f64)>,
}

pub fn comparison_check(trace: &EvolutionTrace, _problem: &NonlinearProblem) -> ComparisonReport {
    let per_snapshot: Vec<(f64, f64)> = trace
        .snapshots
        .iter()
        .map(|s| {
            let excess = s
                .u
                .values()
                .iter()
                .zip(s.linear.values())
                .map(|(u, l)| u.re - l.re)
                .fold(f64::NEG_INFINITY, f64::max);
            (s.t, excess)
        })
        .collect();
    let max_excess = per_snapshot.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    ComparisonReport {
        holds: max_excess <= COMPARISON_SLACK,
        max_excess,
        per_snapshot,
    }
}

/// Estimate of `M_∞ = lim M(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AsymptoticMass {
    /// Zero data; nothing to estimate.
    Zero,
    /// `M(t_end)`, with the dissipation still to come extrapolated from the
    /// fitted decay `∫u^p ~ t^{-exponent}`.
    Estimate { value: f64, error_bar: f64, exponent: f64 },
    /// The run is too short or the decay too slow for an estimate.
    Inconclusive { value: f64, reason: String },
}

impl AsymptoticMass {
    pub fn value(&self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Estimate { value, .. } | Self::Inconclusive { value, .. } => *value,
        }
    }

    pub fn is_conclusive(&self) -> bool {
        !matches!(self, Self::Inconclusive { .. })
    }
}

/// Loss over `[t_end/2, t_end]` below this fraction of `M(t_end)` is required.
pub const TAIL_FRACTION: f64 = 1e-3;

pub fn asymptotic_mass(trace: &EvolutionTrace) -> AsymptoticMass {
    let n = trace.times.len() - 1;
    let (t_end, m_end) = (trace.times[n], trace.mass[n]);
    if trace.initial_mass() == 0.0 && m_end == 0.0 {
        return AsymptoticMass::Zero;
    }
    let half = trace.times.partition_point(|t| *t < 0.5 * t_end).min(n);
    let tail = trace.loss[n] - trace.loss[half];
    if tail > TAIL_FRACTION * m_end.abs() {
        return AsymptoticMass::Inconclusive {
            value: m_end,
            reason: format!(
                "loss over [t_end/2, t_end] is {tail:.3e}, above {TAIL_FRACTION} M(t_end) = {:.3e}",
                TAIL_FRACTION * m_end.abs()
            ),
        };
    }
    let from = trace.times.partition_point(|t| *t < 0.1 * t_end);
    let fit = match loglog_slope(&trace.times[from..], &trace.dissipation[from..]) {
        Ok(f) => f,
        Err(e) => {
            return AsymptoticMass::Inconclusive {
                value: m_end,
                reason: format!("dissipation fit failed: {e}"),
            }
        }
    };
    let exponent = -fit.slope;
    if exponent <= 1.0 {
        return AsymptoticMass::Inconclusive {
            value: m_end,
            reason: format!("dissipation decays like t^-{exponent:.3}, too slowly to extrapolate"),
        };
    }
    if m_end <= 0.0 {
        return AsymptoticMass::Inconclusive {
            value: m_end,
            reason: "M(t_end) is not positive".into(),
        };
    }
    AsymptoticMass::Estimate {
        value: m_end,
        error_bar: trace.dissipation[n] * t_end / (exponent - 1.0),
        exponent,
    }
}

/// Scaled error `t^{d_k/(2αq′)} ‖u(·,t) − M_∞ h_{t,α}‖_q` at the snapshots,
/// with `M_∞` from [`asymptotic_mass`].
pub fn nonlinear_error_curve(trace: &EvolutionTrace, problem: &NonlinearProblem, q: f64) -> Result<ErrorCurve> {
    match asymptotic_mass(trace) {
        AsymptoticMass::Inconclusive { reason, .. } => {
            domain("nonlinear_error_curve", format!("no estimate of M_inf: {reason}"))
        }
        m => nonlinear_error_curve_with(trace, problem, q, m.value()),
    }
}

/// As [`nonlinear_error_curve`] with a given limit mass.
pub fn nonlinear_error_curve_with(
    trace: &EvolutionTrace,
    problem: &NonlinearProblem,
    q: f64,
    m_inf: f64,
) -> Result<ErrorCurve> {
    if !(q >= 1.0 && q.is_finite()) {
        return domain("nonlinear_error_curve", format!("q must lie in [1, inf), got {q}"));
    }
    let cfg = &problem.cfg;
    let mut t = Vec::with_capacity(trace.snapshots.len());
    let mut raw = Vec::with_capacity(trace.snapshots.len());
    for s in &trace.snapshots {
        let diff = s.u.sub(&s.kernel.scale(m_inf))?;
        t.push(s.t);
        raw.push(lp_norm(cfg, &diff, q)?);
    }
    Ok(ErrorCurve::from_raw(cfg.d_k(), problem.alpha, q, t, raw, m_inf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Preset;

    fn gaussian(cfg: &ReflectionConfig, mass: f64) -> GridFunction {
        let g = Preset::Gaussian.sample(cfg, 128).unwrap();
        let m = g.integral().re;
        g.scale(mass / m)
    }

    #[test]
    fn hypothesis_and_sign_are_enforced() {
        let cfg = ReflectionConfig::rank_one(0.5).unwrap();
        let u0 = gaussian(&cfg, 1.0);
        let e = NonlinearProblem::new(&cfg, 0.5, 1.5, u0.clone(), 1.0, 0.1, vec![1.0]).unwrap_err();
        assert!(e.to_string().contains("hypothesis"));
        assert!(NonlinearProblem::new(&cfg, 0.5, 1.6, u0.clone(), 1.0, 0.1, vec![1.0]).is_ok());
        let neg = u0.scale(-1.0);
        assert!(NonlinearProblem::new(&cfg, 0.5, 2.0, neg, 1.0, 0.1, vec![1.0]).is_err());
        assert!(NonlinearProblem::new(&cfg, 0.5, 2.0, u0, 1.0, 0.1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn absorption_matches_ode() {
        for (u, p, tau) in [(2.0f64, 2.0, 0.3), (0.5, 3.0, 1.0), (1e-9, 2.0, 0.1)] {
            let exact = (u.powf(1.0 - p) + (p - 1.0) * tau).powf(-1.0 / (p - 1.0));
            assert!((u - absorbed(u, p, tau) - exact).abs() < 1e-15 * u.max(1.0));
        }
        assert_eq!(absorbed(0.0, 2.0, 1.0), 0.0);
        assert_eq!(absorbed(-1e-20, 2.0, 1.0), 0.0);
    }

    #[test]
    fn zero_data_stays_zero() {
        let cfg = ReflectionConfig::rank_one(0.5).unwrap();
        let u0 = gaussian(&cfg, 1.0).scale(0.0);
        let pr = NonlinearProblem::new(&cfg, 0.5, 2.0, u0, 2.0, 0.1, vec![1.0]).unwrap();
        let tr = evolve(&pr).unwrap();
        assert!(tr.mass.iter().all(|m| *m == 0.0));
        assert!(tr.snapshots.iter().all(|s| s.u.sup() == 0.0));
        assert_eq!(asymptotic_mass(&tr), AsymptoticMass::Zero);
        let c = comparison_check(&tr, &pr);
        assert!(c.holds && c.max_excess == 0.0);
    }

    /// Positive-term series `erf z = 2/√π e^{-z²} Σ 2ⁿ z^{2n+1} / (2n+1)!!`.
    fn erf(z: f64) -> f64 {
        if z.abs() > 6.0 {
            return z.signum();
        }
        let (mut term, mut sum) = (z, z);
        for n in 1..400 {
            term *= 2.0 * z * z / (2 * n + 1) as f64;
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        2.0 / std::f64::consts::PI.sqrt() * (-z * z).exp() * sum
    }

    #[test]
    fn interior_follows_ode_for_flat_data() {
        // k = 0, plateau of height 1 on |x| < 20: the centre sees u′ = −u⁴
        let cfg = ReflectionConfig::rank_one(0.0).unwrap();
        let grid = Arc::new(Grid::uniform(&cfg, 1024, 32.0).unwrap());
        let u0 = GridFunction::sample(grid, |x| (0.5 * (erf((x[0] + 20.0) / 2.0) - erf((x[0] - 20.0) / 2.0))).max(0.0));
        let t_end = 1.0;
        let pr = NonlinearProblem::new(&cfg, 1.0, 4.0, u0, t_end, 0.02, vec![1.0])
            .unwrap()
            .with_snapshots(vec![0.5, t_end])
            .unwrap();
        let tr = evolve(&pr).unwrap();
        for s in &tr.snapshots {
            let want = (1.0 + 3.0 * s.t).powf(-1.0 / 3.0);
            let g = s.u.grid();
            for (i, v) in s.u.values().iter().enumerate() {
                if g.point(i)[0].abs() < 5.0 {
                    assert!((v.re - want).abs() < 1e-3, "t={} x={:?}: {} vs {want}", s.t, g.point(i), v.re);
                }
            }
        }
    }

    #[test]
    fn large_p_small_data_is_nearly_linear() {
        let cfg = ReflectionConfig::rank_one(0.5).unwrap();
        let u0 = gaussian(&cfg, 1.0);
        let u0 = u0.scale(0.1 / u0.sup());
        let pr = NonlinearProblem::new(&cfg, 0.5, 8.0, u0, 4.0, 0.05, vec![1.0])
            .unwrap()
            .with_snapshots(vec![1.0, 4.0])
            .unwrap();
        let tr = evolve(&pr).unwrap();
        let c = comparison_check(&tr, &pr);
        assert!(c.holds, "{c:?}");
        for s in &tr.snapshots {
            let gap = s.u.sub(&s.linear).unwrap().sup();
            assert!(gap <= 1e-3, "t={}: {gap}", s.t);
        }
    }

    #[test]
    fn interpolation_reproduces_smooth_spectra() {
        let cfg = ReflectionConfig::rank_one(0.5).unwrap();
        let a = Grid::isotropic(&cfg, &AxisLayout::resolving(8.0, 20.0, None)).unwrap();
        let b = Grid::isotropic(&cfg, &AxisLayout::resolving(4.0, 50.0, None)).unwrap();
        let f = |x: f64| Complex64::new((-x * x / 3.0).exp(), (x / 2.0).sin());
        let va: Vec<Complex64> = a.axis(0).nodes().iter().map(|&x| f(x)).collect();
        let vb = a.interpolate(&va, &b);
        for (x, v) in b.axis(0).nodes().iter().zip(vb) {
            assert!((v - f(*x)).norm() < 1e-12, "{x}");
        }
    }
}
