use std::sync::{Arc, OnceLock};

use dunkl::asymptotics::{conjugate, lp_norm};
use dunkl::grid::{weight_v, Grid, GridFunction, ReflectionConfig};
use dunkl::kernel::dunkl_kernel_real;
use dunkl::measure::ball_volume;
use dunkl::specfun::gamma;
use dunkl::transform::TransformPlan;
use num_complex::Complex64;
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn cfg2(k0: f64, k1: f64) -> ReflectionConfig {
    ReflectionConfig::new(vec![k0, k1]).unwrap()
}

struct Fixture {
    cfg: ReflectionConfig,
    plan: TransformPlan,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let cfg = ReflectionConfig::rank_one(0.8).unwrap();
        let grid = Arc::new(Grid::uniform(&cfg, 256, 14.0).unwrap());
        let plan = TransformPlan::resolving(&cfg, grid).unwrap();
        Fixture { cfg, plan }
    })
}

/// `a e^{-(x-c)²}` on the fixture grid.
fn bumpy(a: f64, c: f64) -> GridFunction {
    GridFunction::sample(fixture().plan.physical().clone(), |x| a * (-(x[0] - c).powi(2)).exp())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_symmetric_and_homogeneous(
        k0 in 0.0..2.0f64, k1 in 0.0..2.0f64,
        x in prop::array::uniform2(-3.0..3.0f64), y in prop::array::uniform2(-3.0..3.0f64),
        lam in 0.2..2.0f64,
    ) {
        let cfg = cfg2(k0, k1);
        let e = |a: &[f64], b: &[f64]| dunkl_kernel_real(&cfg, a, b).unwrap();
        let exy = e(&x, &y);
        prop_assert!(close(exy, e(&y, &x), 1e-12));
        let lx = [lam * x[0], lam * x[1]];
        let ly = [lam * y[0], lam * y[1]];
        prop_assert!(close(e(&lx, &y), e(&x, &ly), 1e-12));
        // invariance under the group: flip any subset of coordinates in both
        let fx = [-x[0], x[1]];
        let fy = [-y[0], y[1]];
        prop_assert!(close(exy, e(&fx, &fy), 1e-12));
        prop_assert!(close(e(&[0.0, 0.0], &y), 1.0, 1e-14));
        prop_assert!(exy > 0.0);
    }

    #[test]
    fn weight_is_invariant_and_homogeneous(
        k0 in 0.0..2.0f64, k1 in 0.0..2.0f64,
        x in prop::array::uniform2(-3.0..3.0f64), lam in 0.1..3.0f64,
    ) {
        let cfg = cfg2(k0, k1);
        let v = weight_v(&cfg, &x);
        prop_assert!(close(v, weight_v(&cfg, &[-x[0], x[1]]), 1e-14));
        prop_assert!(close(v, weight_v(&cfg, &[x[0], -x[1]]), 1e-14));
        let scaled = weight_v(&cfg, &[lam * x[0], lam * x[1]]);
        prop_assert!(close(scaled, lam.powf(cfg.gamma_k()) * v, 1e-12));
    }

    #[test]
    fn ball_measure_scales_with_d_k(
        k0 in 0.0..1.5f64, k1 in 0.0..1.5f64,
        c in prop::array::uniform2(-1.0..1.0f64), r in 0.2..1.5f64, lam in 0.5..2.0f64,
    ) {
        let cfg = cfg2(k0, k1);
        let base = ball_volume(&cfg, &c, r).unwrap();
        let scaled = ball_volume(&cfg, &[lam * c[0], lam * c[1]], lam * r).unwrap();
        prop_assert!(close(scaled, lam.powf(cfg.d_k()) * base, 1e-8));
        let reflected = ball_volume(&cfg, &[-c[0], c[1]], r).unwrap();
        prop_assert!(close(base, reflected, 1e-10));
    }

    #[test]
    fn transform_is_linear(a in -2.0..2.0f64, b in -2.0..2.0f64, c1 in -2.0..2.0f64, c2 in -2.0..2.0f64) {
        let plan = &fixture().plan;
        let (f, g) = (bumpy(1.0, c1), bumpy(1.0, c2));
        let combo = f.scale(a).add(&g.scale(b)).unwrap();
        let lhs = plan.forward(&combo).unwrap();
        let (ff, fg) = (plan.forward(&f).unwrap(), plan.forward(&g).unwrap());
        for ((l, x), y) in lhs.values().iter().zip(ff.values()).zip(fg.values()) {
            prop_assert!((l - (x * a + y * b)).norm() < 1e-12);
        }
    }

    #[test]
    fn norms_are_homogeneous_and_interpolate(a in 0.1..5.0f64, s in -5.0..5.0f64, c in -2.0..2.0f64, p in 1.0..6.0f64) {
        let cfg = &fixture().cfg;
        let f = bumpy(a, c);
        let n = lp_norm(cfg, &f, p).unwrap();
        prop_assert!(close(lp_norm(cfg, &f.scale(s), p).unwrap(), s.abs() * n, 1e-12));
        // Hölder: ‖f‖₂² ≤ ‖f‖₁ ‖f‖_∞
        let (n1, n2, ninf) = (
            lp_norm(cfg, &f, 1.0).unwrap(),
            lp_norm(cfg, &f, 2.0).unwrap(),
            lp_norm(cfg, &f, f64::INFINITY).unwrap(),
        );
        prop_assert!(n2 * n2 <= n1 * ninf * (1.0 + 1e-12));
        let unit = f.map(|v| Complex64::new(v.norm() / ninf, 0.0));
        // for |f| ≤ 1 the p-th powers decrease in p
        let q = p + 1.0;
        prop_assert!(lp_norm(cfg, &unit, q).unwrap().powf(q) <= lp_norm(cfg, &unit, p).unwrap().powf(p) * (1.0 + 1e-12));
    }

    #[test]
    fn gamma_recurrence(x in 0.05..30.0f64) {
        prop_assert!(close(gamma(x + 1.0).unwrap(), x * gamma(x).unwrap(), 1e-13));
    }

    #[test]
    fn conjugate_is_an_involution(p in 1.0001..50.0f64) {
        let q = conjugate(p);
        prop_assert!(close(1.0 / p + 1.0 / q, 1.0, 1e-14));
        prop_assert!(close(conjugate(q), p, 1e-12));
    }
}
