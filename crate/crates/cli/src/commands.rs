//! The four subcommands. Each returns a [`Report`]; `main` persists it.

use std::sync::Arc;

use dunkl::asymptotics::{decade_means, linear_error_curves, moment_rate_check, ErrorGrids};
use dunkl::grid::{Grid, GridFunction, ReflectionConfig};
use dunkl::heat::{frac_heat_kernel, HeatFlow, KernelRoute, KernelSpec};
use dunkl::kernel::dunkl_kernel_real;
use dunkl::nonlinear::{
    asymptotic_mass, comparison_check, evolve, nonlinear_error_curve_with, AsymptoticMass, NonlinearProblem,
};
use dunkl::presets::Preset;
use dunkl::transform::TransformPlan;
use dunkl::translation::{dunkl_translate_with, young_check, ExplicitTranslation};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{exponent, Config, TimeGrid};
use crate::error::CliError;
use crate::output::Csv;

pub const VERSION: &str = concat!("dunkl-cli ", env!("CARGO_PKG_VERSION"));

/// Outcome of a command: console lines, files and the overall verdict.
#[derive(Debug)]
pub struct Report {
    pub name: &'static str,
    pub passed: bool,
    pub lines: Vec<String>,
    pub json: Value,
    pub csv: Option<Csv>,
}

fn envelope(name: &str, config: Value, passed: bool, body: Value) -> Value {
    json!({
        "version": VERSION,
        "command": name,
        "config": config,
        "passed": passed,
        "results": body,
    })
}

fn reflection(cfg: &Config) -> Result<ReflectionConfig, CliError> {
    ReflectionConfig::new(cfg.multiplicities.clone()).map_err(|e| CliError::Usage(format!("multiplicities: {e}")))
}

/// `u₀` from the preset on a uniform grid, optionally rescaled to a mass.
fn initial_data(cfg: &Config, rc: &ReflectionConfig, preset: Preset) -> Result<GridFunction, CliError> {
    let l = cfg.grid_l.unwrap_or_else(|| preset.reach());
    let grid = Grid::uniform(rc, cfg.grid_n, l).map_err(|e| CliError::Usage(format!("grid: {e}")))?;
    let f = GridFunction::sample(Arc::new(grid), |x| preset.eval(x));
    Ok(match cfg.u0_mass {
        None => f,
        Some(m) => {
            let m0 = f.integral().re;
            if m0 == 0.0 {
                return Err(CliError::Usage(format!("u0.mass: preset {preset} has zero mass and cannot be rescaled")));
            }
            f.scale(m / m0)
        }
    })
}

fn sup_diff(a: &GridFunction, b: &GridFunction) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

struct Check {
    name: String,
    value: f64,
    tolerance: f64,
    passed: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }

    fn json(&self) -> Value {
        json!({"name": self.name, "value": self.value, "tolerance": self.tolerance, "passed": self.passed})
    }
}

/// Series solution of `f' + k (f(x) − f(−x)) / x = y f`, `f(0) = 1`.
fn ode_series(k: f64, x: f64, y: f64) -> f64 {
    let (mut a, mut sum, mut pow) = (1.0, 1.0, 1.0);
    for n in 1..80 {
        let odd = if n % 2 == 1 { 2.0 * k } else { 0.0 };
        a *= y / (n as f64 + odd);
        pow *= x;
        sum += a * pow;
    }
    sum
}

const SELFTEST_BAND: f64 = 4.5;

pub fn selftest(cfg: &Config) -> Result<Report, CliError> {
    let rc = reflection(cfg)?;
    let d = rc.dim();
    let n = cfg.grid_n;
    let classical = rc.is_classical();
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for t in [0.1, 1.0, 10.0] {
        let grid = Arc::new(Grid::uniform(&rc, n, 12.0 * f64::sqrt(t))?);
        let h = frac_heat_kernel(&rc, &KernelSpec::heat(t)?, &grid)?;
        worst = worst.max((h.integral().re - 1.0).abs());
    }
    checks.push(Check::below("normalization", worst, 1e-6));

    // smooth test functions well inside [-L, L]^d
    let l = cfg.grid_l.unwrap_or(12.0);
    let grid = Arc::new(Grid::uniform(&rc, n, l)?);
    // the test spectra e^{-|ξ|²} fall below 2e-9 at |ξ| = 4.5
    if grid.resolved_frequency() < SELFTEST_BAND {
        return Err(CliError::Usage(format!(
            "config keys `grid.n`/`grid.L`: {n} nodes on [-{l}, {l}] resolve |ξ| <= {:.2}, the checks need {SELFTEST_BAND}",
            grid.resolved_frequency()
        )));
    }
    let plan = TransformPlan::resolving(&rc, grid.clone())?;
    let g = GridFunction::sample_radial(grid.clone(), |r2| (-r2 / 4.0).exp());
    let shifted = |x: &[f64]| (-x.iter().map(|v| (v - 0.5).powi(2)).sum::<f64>() / 4.0).exp();
    let f = GridFunction::sample(grid.clone(), shifted);

    let l2 = |h: &GridFunction| h.map(|v| Complex64::new(v.norm_sqr(), 0.0)).integral().re;
    let ff = plan.forward(&f)?;
    checks.push(Check::below("plancherel", (l2(&ff) / l2(&f) - 1.0).abs(), 1e-6));
    checks.push(Check::below("round_trip", sup_diff(&plan.inverse_unchecked(&ff), &f) / f.sup(), 1e-6));

    let x: Vec<f64> = (0..d).map(|j| if j % 2 == 0 { 0.8 } else { -0.5 }).collect();
    let spectral = dunkl_translate_with(&plan, &g, &x)?;
    let explicit = ExplicitTranslation::new(&rc, 64);
    let radial = |y: &[f64]| (-y.iter().map(|v| v * v).sum::<f64>() / 4.0).exp();
    let direct = explicit.translate_on(&radial, &x, &grid);
    checks.push(Check::below("translation_routes", sup_diff(&spectral, &direct), 1e-5));
    let zero = vec![0.0; d];
    checks.push(Check::below("translation_identity", sup_diff(&dunkl_translate_with(&plan, &g, &zero)?, &g), 1e-6));
    let lowest = spectral.values().iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    checks.push(Check::below("translation_positivity", (-lowest).max(0.0), 1e-8));
    let m0 = g.integral().re;
    checks.push(Check::below("translation_mass", (spectral.integral().re - m0).abs() / m0, 1e-6));
    if classical {
        let want = GridFunction::sample(grid.clone(), |y| {
            radial(&y.iter().zip(&x).map(|(a, b)| a + b).collect::<Vec<_>>())
        });
        checks.push(Check::below("classical_shift", sup_diff(&spectral, &want), 1e-8));
    }

    let cases = [
        (1.0, 1.0, 1.0),
        (1.0, 2.0, 2.0),
        (2.0, 1.0, 2.0),
        (4.0 / 3.0, 4.0 / 3.0, 2.0),
        (2.0, 2.0, f64::INFINITY),
        (1.5, 1.2, 2.0),
    ];
    let mut ratio = 0.0f64;
    for (p, q, r) in cases {
        ratio = ratio.max(young_check(&rc, &f, &g, p, q, r)?.ratio());
    }
    checks.push(Check::below("young", ratio - 1.0, 1e-6));
    if classical {
        let eq = young_check(&rc, &f, &g, 1.0, 1.0, 1.0)?.ratio();
        checks.push(Check::below("young_equality", (eq - 1.0).abs(), 1e-6));
    }

    for &alpha in &cfg.alpha {
        let flow = HeatFlow::for_grid(&rc, grid.clone(), 0.2, alpha)?;
        let s = |t| KernelSpec::fractional(t, alpha);
        let spec = flow.spectrum(&f)?;
        let two = flow.synthesize(&flow.propagate(&flow.propagate(&spec, &s(0.2)?)?, &s(0.3)?)?);
        let one = flow.synthesize(&flow.propagate(&spec, &s(0.5)?)?);
        checks.push(Check::below(format!("semigroup_law(alpha={alpha})"), sup_diff(&two, &one) / one.sup(), 1e-10));

        let mut gap = 0.0f64;
        for t in [1.0f64, 10.0] {
            let grid = Arc::new(Grid::uniform(&rc, n, 10.0 * t.powf(0.5 / alpha))?);
            let spectral = frac_heat_kernel(&rc, &KernelSpec::new(t, alpha, KernelRoute::Spectral)?, &grid)?;
            let other = if alpha == 1.0 {
                KernelSpec::heat(t)?
            } else {
                KernelSpec::new(t, alpha, KernelRoute::Subordination)?
            };
            gap = gap.max(sup_diff(&spectral, &frac_heat_kernel(&rc, &other, &grid)?));
        }
        checks.push(Check::below(format!("bochner(alpha={alpha})"), gap, 1e-4));
    }
    if classical && d == 1 {
        let t = 1.3;
        let grid = Arc::new(Grid::uniform(&rc, n, 20.0)?);
        let h = frac_heat_kernel(&rc, &KernelSpec::fractional(t, 0.5)?, &grid)?;
        let gap = grid
            .axis(0)
            .nodes()
            .iter()
            .zip(h.values())
            .map(|(x, v)| (v.re - (2.0 / std::f64::consts::PI).sqrt() * t / (t * t + x * x)).abs())
            .fold(0.0, f64::max);
        checks.push(Check::below("poisson_profile", gap, 1e-5));
    }

    let pts = [-2.0, -0.7, 0.0, 0.9, 2.5];
    let mut gap = 0.0f64;
    for &k in &cfg.multiplicities {
        let one = ReflectionConfig::rank_one(k)?;
        for &a in &pts {
            for &b in &pts {
                let want = ode_series(k, a, b);
                gap = gap.max((dunkl_kernel_real(&one, &[a], &[b])? - want).abs() / want.abs().max(1.0));
            }
        }
    }
    checks.push(Check::below("kernel_series", gap, 1e-10));

    let passed = checks.iter().all(|c| c.passed);
    let lines = checks
        .iter()
        .map(|c| {
            format!(
                "{} {:<28} {:.3e} (tol {:.0e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.tolerance
            )
        })
        .collect();
    let failures: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let body = json!({
        "checks": checks.iter().map(Check::json).collect::<Vec<_>>(),
        "failures": failures,
    });
    Ok(Report {
        name: "selftest",
        passed,
        lines,
        json: envelope("selftest", cfg.resolved(None, None), passed, body),
        csv: None,
    })
}

pub const LINEAR_TIMES: TimeGrid = TimeGrid {
    min: 1.0,
    max: 1000.0,
    points: 31,
};

pub fn linear(cfg: &Config) -> Result<Report, CliError> {
    let rc = reflection(cfg)?;
    let preset = cfg.preset_or(Preset::Bump);
    let times = cfg.time_grid(LINEAR_TIMES);
    let u0 = initial_data(cfg, &rc, preset)?;
    let t = times.values();
    let mut csv = Csv::default();
    let mut verdicts = Vec::new();
    let mut lines = Vec::new();
    let mut passed = true;
    let mut mass = 0.0;
    for &alpha in &cfg.alpha {
        let curves = linear_error_curves(&rc, &u0, alpha, &cfg.p, &t, &ErrorGrids::auto(alpha))?;
        for c in curves {
            mass = c.mass;
            for ((ti, raw), scaled) in c.t.iter().zip(&c.raw).zip(&c.scaled) {
                csv.row("linear", alpha, c.p, *ti, *raw, Some(*scaled), Some(c.mass));
            }
            let v = c.decade_decay()?;
            passed &= v.passes;
            lines.push(format!(
                "{} alpha={alpha} p={}: last/first decade {:.3}, final {:.3e}",
                if v.passes { "PASS" } else { "FAIL" },
                c.p,
                v.ratio(),
                v.final_value
            ));
            verdicts.push(json!({
                "alpha": alpha,
                "p": exponent(c.p),
                "first_decade_mean": v.first_mean,
                "last_decade_mean": v.last_mean,
                "ratio": v.ratio(),
                "final_value": v.final_value,
                "passed": v.passes,
            }));
        }
    }
    let body = json!({"mass": mass, "verdicts": verdicts});
    Ok(Report {
        name: "linear",
        passed,
        lines,
        json: envelope("linear", cfg.resolved(Some(times), Some(preset)), passed, body),
        csv: Some(csv),
    })
}

pub const MOMENT_TIMES: TimeGrid = TimeGrid {
    min: 10.0,
    max: 1000.0,
    points: 21,
};

pub fn moment_rate(cfg: &Config) -> Result<Report, CliError> {
    let rc = reflection(cfg)?;
    let preset = cfg.preset_or(Preset::Bump);
    let times = cfg.time_grid(MOMENT_TIMES);
    if times.points < 4 {
        return Err(CliError::Usage(format!(
            "config key `t.points`: the rate fit needs at least 4 times, got {}",
            times.points
        )));
    }
    let u0 = initial_data(cfg, &rc, preset)?;
    let m = moment_rate_check(&rc, &u0, &times.values())?;
    let half = 0.5 * rc.d_k();
    let mut csv = Csv::default();
    for (i, &t) in m.t.iter().enumerate() {
        csv.row("moment-l1", 1.0, 1.0, t, m.l1[i], Some(m.l1[i] * t.sqrt() / m.n1), Some(m.n1));
    }
    for (i, &t) in m.t.iter().enumerate() {
        let raw = m.sup_scaled[i] * t.powf(-half);
        csv.row("moment-sup", 1.0, f64::INFINITY, t, raw, Some(m.sup_scaled[i]), Some(m.n1));
    }
    let ok = |s: f64| (s + 0.5).abs() <= 0.1;
    let passed = ok(m.slope_l1.slope) && ok(m.slope_sup.slope) && m.uniform;
    let lines = vec![
        format!("{} L1 slope {:.4} (−0.5 ± 0.1)", if ok(m.slope_l1.slope) { "PASS" } else { "FAIL" }, m.slope_l1.slope),
        format!(
            "{} sup slope {:.4} (−0.5 ± 0.1)",
            if ok(m.slope_sup.slope) { "PASS" } else { "FAIL" },
            m.slope_sup.slope
        ),
        format!(
            "{} constants {:.4} / {:.4} bound the whole grid",
            if m.uniform { "PASS" } else { "FAIL" },
            m.constant_l1,
            m.constant_sup
        ),
    ];
    let body = json!({
        "n1": m.n1,
        "mass": m.mass,
        "slope_l1": m.slope_l1.slope,
        "slope_sup": m.slope_sup.slope,
        "constant_l1": m.constant_l1,
        "constant_sup": m.constant_sup,
        "uniform": m.uniform,
    });
    Ok(Report {
        name: "moment-rate",
        passed,
        lines,
        json: envelope("moment-rate", cfg.resolved(Some(times), Some(preset)), passed, body),
        csv: Some(csv),
    })
}

pub fn nonlinear(cfg: &Config) -> Result<Report, CliError> {
    let rc = reflection(cfg)?;
    let preset = cfg.preset_or(Preset::Gaussian);
    let u0 = initial_data(cfg, &rc, preset)?;
    let (alpha, p) = (cfg.nl_alpha, cfg.nl_p);
    let mut problem = NonlinearProblem::new(&rc, alpha, p, u0, cfg.nl_t_end, cfg.nl_dt, cfg.q.clone())
        .and_then(|pr| pr.with_step_growth(cfg.nl_growth))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let snapshots = cfg.t.unwrap_or(TimeGrid {
        min: (1e-3 * cfg.nl_t_end).max(cfg.nl_dt),
        max: cfg.nl_t_end,
        points: 31,
    });
    problem = problem
        .with_snapshots(snapshots.values())
        .map_err(|e| CliError::Usage(format!("t-grid: {e}")))?;
    let trace = evolve(&problem)?;
    let residuals = trace.residuals();
    let max_residual = trace.max_residual();
    let monotone = trace.mass_nonincreasing();
    let m_inf = asymptotic_mass(&trace);
    let comparison = comparison_check(&trace, &problem);

    let mut csv = Csv::default();
    for (i, &t) in trace.times.iter().enumerate() {
        csv.row("mass", alpha, p, t, residuals[i], None, Some(trace.mass[i]));
    }
    let mut lines = Vec::new();
    let (mass_ok, mass_line) = match &m_inf {
        AsymptoticMass::Estimate { value, error_bar, .. } => {
            let ok = *value > 0.0 && error_bar / value <= 0.05;
            (ok, format!("M_inf = {value:.6} ± {:.3}%", 100.0 * error_bar / value))
        }
        AsymptoticMass::Zero => (false, "M_inf = 0 (zero data)".to_string()),
        AsymptoticMass::Inconclusive { value, reason } => (false, format!("M_inf inconclusive at {value:.6}: {reason}")),
    };
    lines.push(format!("{} {mass_line}", if mass_ok { "PASS" } else { "FAIL" }));
    let mut q_verdicts = Vec::new();
    let mut curves_ok = true;
    for &q in &cfg.q {
        let c = nonlinear_error_curve_with(&trace, &problem, q, m_inf.value())?;
        for ((ti, raw), scaled) in c.t.iter().zip(&c.raw).zip(&c.scaled) {
            csv.row("nonlinear", alpha, q, *ti, *raw, Some(*scaled), Some(m_inf.value()));
        }
        let means = decade_means(&c.t, &c.scaled);
        let decreasing = means.len() >= 2 && means.windows(2).all(|w| w[1] < w[0]);
        curves_ok &= decreasing;
        lines.push(format!(
            "{} q={q}: decade means {}",
            if decreasing { "PASS" } else { "FAIL" },
            means.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(" > ")
        ));
        q_verdicts.push(json!({"q": exponent(q), "decade_means": means, "decreasing": decreasing}));
    }
    let residual_ok = max_residual <= 1e-4;
    lines.push(format!(
        "{} mass identity residual {max_residual:.3e} (tol 1e-4)",
        if residual_ok { "PASS" } else { "FAIL" }
    ));
    lines.push(format!("{} M(t) nonincreasing", if monotone { "PASS" } else { "FAIL" }));
    lines.push(format!(
        "{} comparison u ≤ h∗u₀: max excess {:.3e} (slack 1e-6)",
        if comparison.holds { "PASS" } else { "FAIL" },
        comparison.max_excess
    ));
    let passed = mass_ok && curves_ok && residual_ok && monotone && comparison.holds;
    let body = json!({
        "steps": trace.steps(),
        "initial_mass": trace.initial_mass(),
        "final_mass": trace.mass[trace.mass.len() - 1],
        "asymptotic_mass": serde_json::to_value(&m_inf).map_err(|e| CliError::Failure(e.to_string()))?,
        "max_residual": max_residual,
        "mass_nonincreasing": monotone,
        "comparison": {"holds": comparison.holds, "max_excess": comparison.max_excess},
        "min_relative": trace.min_relative,
        "q_verdicts": q_verdicts,
    });
    Ok(Report {
        name: "nonlinear",
        passed,
        lines,
        json: envelope("nonlinear", cfg.resolved(Some(snapshots), Some(preset)), passed, body),
        csv: Some(csv),
    })
}
