//! Dunkl transform and its inverse by direct quadrature.
//!
//! ```text
//! F_k f(ξ)    = ∫ f(x) E_k(-iξ, x) dμ_k(x)
//! F_k^{-1}g(x) = ∫ g(ξ) E_k(iξ, x) dμ_k(ξ)
//! ```
//!
//! On Z₂^d the kernel factorizes, so both maps are applied one axis at a time
//! to the full tensor of samples. Each axis stores the dense kernel matrix with
//! the quadrature weights folded in.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{AxisGrid, AxisLayout, Grid, GridFunction, ReflectionConfig};
use crate::kernel::oscillatory;
use crate::par;

/// Boundary decay required of transform inputs, relative to the peak.
pub const DECAY_THRESHOLD: f64 = 1e-10;

/// Kernel blocks of one axis on the positive half-lines. With
/// `C = j_{k-1/2}(ξx)` and `S = ξx/(2k+1) j_{k+1/2}(ξx)`,
/// `E(∓iξ, x) = C ∓ iS`, so even and odd parts transform separately.
#[derive(Debug)]
struct AxisKernel {
    // (n_ξ/2, n_x/2), row-major
    c: Vec<f64>,
    s: Vec<f64>,
    // transposes, (n_x/2, n_ξ/2)
    ct: Vec<f64>,
    st: Vec<f64>,
    hx: usize,
    hxi: usize,
}

impl AxisKernel {
    fn new(phys: &AxisGrid, spec: &AxisGrid) -> Self {
        let k = phys.k();
        let hx = phys.len() / 2;
        let hxi = spec.len() / 2;
        let xs = &phys.nodes()[hx..];
        let xis = &spec.nodes()[hxi..];
        let rows: Vec<Vec<(f64, f64)>> =
            par::map_range(hxi, |a| xs.iter().map(|&x| oscillatory(k, xis[a] * x)).collect());
        let mut c = vec![0.0; hxi * hx];
        let mut s = vec![0.0; hxi * hx];
        let mut ct = vec![0.0; hxi * hx];
        let mut st = vec![0.0; hxi * hx];
        for (a, row) in rows.iter().enumerate() {
            for (b, &(re, im)) in row.iter().enumerate() {
                c[a * hx + b] = re;
                s[a * hx + b] = -im;
                ct[b * hxi + a] = re;
                st[b * hxi + a] = -im;
            }
        }
        Self {
            c,
            s,
            ct,
            st,
            hx,
            hxi,
        }
    }

    /// One fiber. `src` has `2 h_in` samples, `w` the matching weights.
    /// Forward: out_e = 2 C (w f_e), out_o = -2i S (w f_o).
    /// Inverse: out_e = 2 Cᵀ (w g_e), out_o = 2i Sᵀ (w g_o).
    fn apply(&self, src: &[Complex64], w: &[f64], out: &mut [Complex64], forward: bool, split: bool) {
        let (h_in, h_out, c, s, sign) = if forward {
            (self.hx, self.hxi, &self.c, &self.s, -1.0)
        } else {
            (self.hxi, self.hx, &self.ct, &self.st, 1.0)
        };
        let mut even = Vec::with_capacity(h_in);
        let mut odd = Vec::with_capacity(h_in);
        for b in 0..h_in {
            let p = src[h_in + b];
            let m = src[h_in - 1 - b];
            let wb = w[h_in + b];
            even.push((p + m) * wb);
            odd.push((p - m) * wb);
        }
        let row = |a: usize| -> (Complex64, Complex64) {
            let cr = &c[a * h_in..(a + 1) * h_in];
            let sr = &s[a * h_in..(a + 1) * h_in];
            let (mut e, mut o) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for b in 0..h_in {
                e += even[b] * cr[b];
                o += odd[b] * sr[b];
            }
            // (p ± m) already carries the factor 2 of the parity split
            (e, Complex64::new(-o.im, o.re) * sign)
        };
        let rows: Vec<(Complex64, Complex64)> = if split {
            par::map_range(h_out, row)
        } else {
            (0..h_out).map(row).collect()
        };
        for (a, (e, o)) in rows.into_iter().enumerate() {
            out[h_out + a] = e + o;
            out[h_out - 1 - a] = e - o;
        }
    }
}

/// Precomputed forward/inverse transform between a physical and a spectral grid.
#[derive(Debug, Clone)]
pub struct TransformPlan {
    physical: Arc<Grid>,
    spectral: Arc<Grid>,
    kernels: Vec<Arc<AxisKernel>>,
}

impl TransformPlan {
    pub fn new(cfg: &ReflectionConfig, physical: Arc<Grid>, spectral: Arc<Grid>) -> Result<Self> {
        if !physical.matches(cfg) || !spectral.matches(cfg) {
            return Err(Error::Shape(
                "grid multiplicities differ from the configuration".into(),
            ));
        }
        let mut kernels: Vec<Arc<AxisKernel>> = Vec::with_capacity(cfg.dim());
        for j in 0..cfg.dim() {
            let (p, s) = (physical.axis(j), spectral.axis(j));
            let reuse = (0..j).find(|&i| physical.axis(i) == p && spectral.axis(i) == s);
            let kernel = match reuse {
                Some(i) => kernels[i].clone(),
                None => Arc::new(AxisKernel::new(p, s)),
            };
            kernels.push(kernel);
        }
        Ok(Self {
            physical,
            spectral,
            kernels,
        })
    }

    /// Spectral grid matched to what `physical` resolves: same reach in
    /// frequency as the physical grid has in space.
    pub fn resolving(cfg: &ReflectionConfig, physical: Arc<Grid>) -> Result<Self> {
        let cutoff = physical.resolved_frequency();
        let layout = AxisLayout::resolving(cutoff, physical.reach(), None);
        let spectral = Arc::new(Grid::isotropic(cfg, &layout)?);
        Self::new(cfg, physical, spectral)
    }

    pub fn physical(&self) -> &Arc<Grid> {
        &self.physical
    }

    pub fn spectral(&self) -> &Arc<Grid> {
        &self.spectral
    }

    /// The plan for physical nodes scaled by `factor` and spectral nodes by
    /// `1/factor`. The kernel depends on ξ·x only and is reused.
    pub fn rescaled(&self, factor: f64) -> Self {
        Self {
            physical: Arc::new(self.physical.scaled(factor)),
            spectral: Arc::new(self.spectral.scaled(1.0 / factor)),
            kernels: self.kernels.clone(),
        }
    }

    /// Forward transform, after checking the boundary decay of `f`.
    pub fn forward(&self, f: &GridFunction) -> Result<GridFunction> {
        self.check_grid(f, &self.physical, "physical")?;
        f.check_decay(DECAY_THRESHOLD)?;
        Ok(self.forward_unchecked(f))
    }

    /// Inverse transform, after checking the boundary decay of `g`.
    pub fn inverse(&self, g: &GridFunction) -> Result<GridFunction> {
        self.check_grid(g, &self.spectral, "spectral")?;
        g.check_decay(DECAY_THRESHOLD)?;
        Ok(self.inverse_unchecked(g))
    }

    /// Forward transform without the decay check.
    pub fn forward_unchecked(&self, f: &GridFunction) -> GridFunction {
        let v = self.forward_values(f.values());
        GridFunction::from_parts(self.spectral.clone(), v, f.parity())
    }

    pub fn inverse_unchecked(&self, g: &GridFunction) -> GridFunction {
        let v = self.inverse_values(g.values());
        GridFunction::from_parts(self.physical.clone(), v, g.parity())
    }

    /// Forward transform of raw samples on the physical grid.
    pub fn forward_values(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.physical.len(), "sample count");
        self.run(values, true)
    }

    /// Inverse transform of raw samples on the spectral grid.
    pub fn inverse_values(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.spectral.len(), "sample count");
        self.run(values, false)
    }

    fn run(&self, values: &[Complex64], forward: bool) -> Vec<Complex64> {
        let (src_grid, dst_grid) = if forward {
            (&self.physical, &self.spectral)
        } else {
            (&self.spectral, &self.physical)
        };
        let mut shape = src_grid.shape();
        let mut data = values.to_vec();
        for (j, kern) in self.kernels.iter().enumerate() {
            let m = dst_grid.axis(j).len();
            data = apply_axis(&data, &shape, j, m, |src, out, split| {
                kern.apply(src, src_grid.axis(j).weights(), out, forward, split)
            });
            shape[j] = m;
        }
        data
    }

    fn check_grid(&self, f: &GridFunction, grid: &Arc<Grid>, which: &str) -> Result<()> {
        if Arc::ptr_eq(f.grid(), grid) || **f.grid() == **grid {
            Ok(())
        } else {
            Err(Error::Shape(format!("input does not live on the plan's {which} grid")))
        }
    }
}

/// Replace axis `axis` (length `shape[axis]`) of a row-major tensor by a new
/// axis of length `m`, mapping every fiber with `op`.
fn apply_axis<F>(data: &[Complex64], shape: &[usize], axis: usize, m: usize, op: F) -> Vec<Complex64>
where
    F: Fn(&[Complex64], &mut [Complex64], bool) + Send + Sync,
{
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let fibers = outer * inner;
    let zero = Complex64::new(0.0, 0.0);
    if fibers == 1 {
        let mut out = vec![zero; m];
        op(data, &mut out, true);
        return out;
    }
    let results = par::map_range(fibers, |f| {
        let (o, q) = (f / inner, f % inner);
        let src: Vec<Complex64> = (0..n).map(|b| data[(o * n + b) * inner + q]).collect();
        let mut dst = vec![zero; m];
        op(&src, &mut dst, false);
        dst
    });
    let mut out = vec![zero; outer * m * inner];
    for (f, dst) in results.into_iter().enumerate() {
        let (o, q) = (f / inner, f % inner);
        for (a, v) in dst.into_iter().enumerate() {
            out[(o * m + a) * inner + q] = v;
        }
    }
    out
}

/// `F_k f` sampled on `spectral`.
pub fn dunkl_transform(
    cfg: &ReflectionConfig,
    f: &GridFunction,
    spectral: &Arc<Grid>,
) -> Result<GridFunction> {
    TransformPlan::new(cfg, f.grid().clone(), spectral.clone())?.forward(f)
}

/// `F_k^{-1} g` sampled on `physical`.
pub fn dunkl_inverse_transform(
    cfg: &ReflectionConfig,
    g: &GridFunction,
    physical: &Arc<Grid>,
) -> Result<GridFunction> {
    TransformPlan::new(cfg, physical.clone(), g.grid().clone())?.inverse(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Parity;

    fn setup(k: &[f64], n: usize, l: f64) -> (ReflectionConfig, Arc<Grid>) {
        let cfg = ReflectionConfig::new(k.to_vec()).unwrap();
        let g = Arc::new(Grid::uniform(&cfg, n, l).unwrap());
        (cfg, g)
    }

    #[test]
    fn classical_gaussian() {
        // k = 0: ∫ e^{-x²/2} e^{-iξx} dx / √(2π) = e^{-ξ²/2}
        let (cfg, g) = setup(&[0.0], 512, 14.0);
        let f = GridFunction::sample_radial(g.clone(), |r2| (-0.5 * r2).exp());
        let ff = dunkl_transform(&cfg, &f, &g).unwrap();
        for (xi, v) in g.axis(0).nodes().iter().zip(ff.values()) {
            assert!((v.re - (-0.5 * xi * xi).exp()).abs() < 1e-12, "{xi}: {}", v.re - (-0.5 * xi * xi).exp());
            assert!(v.im.abs() < 1e-13);
        }
    }

    #[test]
    fn classical_shifted_gaussian() {
        // e^{-(x-c)²/2} ↦ e^{-iξc} e^{-ξ²/2}
        let (cfg, g) = setup(&[0.0], 512, 14.0);
        let c = 0.8;
        let f = GridFunction::sample(g.clone(), |x| (-0.5 * (x[0] - c).powi(2)).exp());
        let ff = dunkl_transform(&cfg, &f, &g).unwrap();
        for (xi, v) in g.axis(0).nodes().iter().zip(ff.values()) {
            let want = Complex64::from_polar((-0.5 * xi * xi).exp(), -xi * c);
            assert!((v - want).norm() < 1e-11, "{xi}");
        }
        let back = dunkl_inverse_transform(&cfg, &ff, &g).unwrap();
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-11);
        }
    }

    #[test]
    fn round_trip_with_multiplicity() {
        let (cfg, g) = setup(&[1.0], 512, 16.0);
        let f = GridFunction::sample(g.clone(), |x| (-(x[0] - 0.5).powi(2)).exp() * (1.0 + 0.3 * x[0]));
        let ff = dunkl_transform(&cfg, &f, &g).unwrap();
        let back = dunkl_inverse_transform(&cfg, &ff, &g).unwrap();
        let err = back.values().iter().zip(f.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn odd_input_gives_imaginary_odd_output() {
        let (cfg, g) = setup(&[0.7], 256, 14.0);
        let f = GridFunction::from_real(
            g.clone(),
            g.axis(0).nodes().iter().map(|x| x * (-x * x).exp()).collect(),
            Parity::Odd,
        )
        .unwrap();
        let ff = dunkl_transform(&cfg, &f, &g).unwrap();
        assert_eq!(ff.parity(), Parity::Odd);
        assert!(ff.values().iter().all(|v| v.re.abs() < 1e-14));
    }

    #[test]
    fn tensor_transform_factorizes() {
        let (cfg, g) = setup(&[0.5, 1.0], 64, 10.0);
        let f = GridFunction::sample(g.clone(), |x| (-x[0] * x[0] - 0.5 * (x[1] - 0.3).powi(2)).exp());
        let ff = dunkl_transform(&cfg, &f, &g).unwrap();
        // same thing axis by axis
        let c0 = ReflectionConfig::rank_one(0.5).unwrap();
        let c1 = ReflectionConfig::rank_one(1.0).unwrap();
        let g0 = Arc::new(Grid::uniform(&c0, 64, 10.0).unwrap());
        let g1 = Arc::new(Grid::uniform(&c1, 64, 10.0).unwrap());
        let f0 = dunkl_transform(&c0, &GridFunction::sample(g0.clone(), |x| (-x[0] * x[0]).exp()), &g0).unwrap();
        let f1 = dunkl_transform(
            &c1,
            &GridFunction::sample(g1.clone(), |x| (-0.5 * (x[0] - 0.3).powi(2)).exp()),
            &g1,
        )
        .unwrap();
        for i in 0..g.len() {
            let mi = g.unravel(i);
            let want = f0.values()[mi[0]] * f1.values()[mi[1]];
            assert!((ff.values()[i] - want).norm() < 1e-13);
        }
    }

    #[test]
    fn rescaled_plan_matches_fresh_plan() {
        let (cfg, g) = setup(&[1.3], 128, 12.0);
        let plan = TransformPlan::new(&cfg, g.clone(), g.clone()).unwrap();
        let r = plan.rescaled(2.5);
        let fresh = TransformPlan::new(&cfg, r.physical().clone(), r.spectral().clone()).unwrap();
        let f = GridFunction::sample_radial(r.physical().clone(), |r2| (-r2 / 20.0).exp());
        let a = r.forward(&f).unwrap();
        let b = fresh.forward(&f).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn truncation_is_reported() {
        let (cfg, g) = setup(&[0.5], 64, 3.0);
        let f = GridFunction::sample_radial(g.clone(), |r2| (-r2 / 4.0).exp());
        match dunkl_transform(&cfg, &f, &g) {
            Err(Error::Truncation { boundary, .. }) => assert!(boundary > 0.1),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }
}
