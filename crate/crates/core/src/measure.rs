//! Volumes of Euclidean balls under μ_k.

use crate::error::{domain, Error, Result};
use crate::grid::{axis_c, ReflectionConfig};
use crate::quad;

/// μ_k(B(center, r)).
///
/// Closed form in rank one; nested adaptive quadrature over the coordinates
/// otherwise.
pub fn ball_volume(cfg: &ReflectionConfig, center: &[f64], r: f64) -> Result<f64> {
    if center.len() != cfg.dim() {
        return Err(Error::Shape(format!(
            "center has {} coordinates, dimension is {}",
            center.len(),
            cfg.dim()
        )));
    }
    if !(r > 0.0) {
        return domain("ball_volume", format!("radius must be positive, got {r}"));
    }
    Ok(nested(cfg.multiplicities(), center, r))
}

/// ∫_a^b c_k 2^k |x|^{2k} dx.
fn axis_mass(k: f64, a: f64, b: f64) -> f64 {
    let e = 2.0 * k + 1.0;
    let prim = |x: f64| x.signum() * x.abs().powf(e) / e;
    axis_c(k) * 2f64.powf(k) * (prim(b) - prim(a))
}

fn nested(k: &[f64], c: &[f64], r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if k.len() == 1 {
        return axis_mass(k[0], c[0] - r, c[0] + r);
    }
    let (k0, c0) = (k[0], c[0]);
    let dens = axis_c(k0) * 2f64.powf(k0);
    let inner = |x: f64| {
        let rest = r * r - (x - c0) * (x - c0);
        if rest <= 0.0 {
            return 0.0;
        }
        let w = if k0 == 0.0 { dens } else { dens * x.abs().powf(2.0 * k0) };
        w * nested(&k[1..], &c[1..], rest.sqrt())
    };
    let (lo, hi) = (c0 - r, c0 + r);
    let mut breaks = vec![lo];
    if lo < 0.0 && hi > 0.0 {
        breaks.push(0.0);
    }
    breaks.push(hi);
    quad::adaptive_from(inner, &breaks, 0.0, 1e-11, 2000).value
}

/// `r^d Π_λ (|⟨center, λ⟩| + r)^{k(λ)}`, the comparison quantity for ball
/// volumes.
pub fn ball_volume_model(cfg: &ReflectionConfig, center: &[f64], r: f64) -> f64 {
    let prod: f64 = cfg
        .multiplicities()
        .iter()
        .zip(center)
        .map(|(&k, &x)| (2f64.sqrt() * x.abs() + r).powf(2.0 * k))
        .product();
    r.powi(cfg.dim() as i32) * prod
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn classical_interval() {
        let cfg = ReflectionConfig::rank_one(0.0).unwrap();
        let v = ball_volume(&cfg, &[0.0], 1.0).unwrap();
        assert_relative_eq!(v, 2.0 / (2.0 * std::f64::consts::PI).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn rank_one_agrees_with_quadrature() {
        let k = 0.8;
        let cfg = ReflectionConfig::rank_one(k).unwrap();
        let c = 0.3;
        let f = |x: f64| crate::grid::axis_density(k, x);
        let q = quad::adaptive_from(f, &[c - 1.1, 0.0, c + 1.1], 0.0, 1e-13, 500).value;
        assert_relative_eq!(ball_volume(&cfg, &[c], 1.1).unwrap(), q, max_relative = 1e-11);
    }

    #[test]
    fn planar_disc_classical() {
        // k = 0, d = 2: π r² c_0²
        let cfg = ReflectionConfig::new(vec![0.0, 0.0]).unwrap();
        let v = ball_volume(&cfg, &[0.4, -1.0], 1.5).unwrap();
        let want = std::f64::consts::PI * 2.25 / (2.0 * std::f64::consts::PI);
        assert_relative_eq!(v, want, max_relative = 1e-9);
    }

    #[test]
    fn rejects_bad_radius() {
        let cfg = ReflectionConfig::rank_one(1.0).unwrap();
        assert!(ball_volume(&cfg, &[0.0], 0.0).is_err());
        assert!(ball_volume(&cfg, &[0.0, 1.0], 1.0).is_err());
    }
}
