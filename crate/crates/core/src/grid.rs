//! Reflection-group configuration, μ_k-weighted quadrature grids and sampled
//! functions.
//!
//! The group is Z₂^d with normalized roots ±√2·e_j. With |λ|² = 2 the rank-one
//! Dunkl operator on axis j is `f' + k_j (f(x) - f(-x)) / x`, and the weight is
//! `v_k(x) = Π_j (√2 |x_j|)^{2 k_j} = Π_j 2^{k_j} |x_j|^{2 k_j}`. The `2^{k_j}`
//! factors cancel against `c_k`, so the measure `c_k v_k dx` is the usual
//! rank-one Dunkl measure on each axis.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::{self, gauss_jacobi, gauss_legendre};
use crate::specfun::ln_gamma;

/// Dimension and per-axis multiplicities of a Z₂^d reflection group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionConfig {
    k: Vec<f64>,
}

impl ReflectionConfig {
    pub fn new(k: Vec<f64>) -> Result<Self> {
        if k.is_empty() {
            return domain("ReflectionConfig", "dimension must be at least 1");
        }
        if let Some((j, v)) = k.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
            return domain(
                "ReflectionConfig",
                format!("multiplicities[{j}] must be a finite nonnegative number, got {v}"),
            );
        }
        Ok(Self { k })
    }

    /// Rank one, multiplicity `k`.
    pub fn rank_one(k: f64) -> Result<Self> {
        Self::new(vec![k])
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    pub fn multiplicities(&self) -> &[f64] {
        &self.k
    }

    pub fn k(&self, axis: usize) -> f64 {
        self.k[axis]
    }

    /// γ_k = Σ_{λ∈R} k(λ) = 2 Σ_j k_j.
    pub fn gamma_k(&self) -> f64 {
        2.0 * self.k.iter().sum::<f64>()
    }

    /// Homogeneous degree d_k = d + γ_k.
    pub fn d_k(&self) -> f64 {
        self.dim() as f64 + self.gamma_k()
    }

    /// Normalization constant c_k, product over axes.
    pub fn c_k(&self) -> f64 {
        self.k.iter().map(|&k| axis_c(k)).product()
    }

    pub fn is_classical(&self) -> bool {
        self.k.iter().all(|&k| k == 0.0)
    }
}

/// Per-axis `c_k` with `c_k^{-1} = 2^{2k+1/2} Γ(k + 1/2)`.
pub(crate) fn axis_c(k: f64) -> f64 {
    (-((2.0 * k + 0.5) * std::f64::consts::LN_2 + ln_gamma(k + 0.5))).exp()
}

/// Density of μ_k on one axis with respect to dx: `c_k 2^k |x|^{2k}`.
pub(crate) fn axis_density(k: f64, x: f64) -> f64 {
    if k == 0.0 {
        axis_c(0.0)
    } else {
        axis_c(k) * 2f64.powf(k) * x.abs().powf(2.0 * k)
    }
}

/// v_k(x) = Π_λ |⟨x, λ⟩|^{k(λ)}.
pub fn weight_v(cfg: &ReflectionConfig, x: &[f64]) -> f64 {
    assert_eq!(x.len(), cfg.dim(), "point dimension");
    cfg.k
        .iter()
        .zip(x)
        .map(|(&k, &xj)| {
            if k == 0.0 {
                1.0
            } else {
                (2f64.sqrt() * xj.abs()).powf(2.0 * k)
            }
        })
        .product()
}

/// c_k from the closed form of the Gaussian moment.
pub fn normalization_c(cfg: &ReflectionConfig) -> f64 {
    cfg.c_k()
}

/// Phase swept by `e^{i s x}` across one 16-node panel that still integrates
/// to near rounding.
pub const RESOLVED_PHASE: f64 = 8.0;

/// Panel layout for one axis (positive half; mirrored to the negative side).
///
/// Breakpoints are: a geometric run from `inner_min` up to `panel_width`,
/// uniform panels of `panel_width` up to `core`, then geometric growth by
/// `outer_ratio` up to `half_width`. The panel touching the origin always
/// uses a Gauss–Jacobi rule for the `|x|^{2k}` weight, so no node sits at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisLayout {
    pub half_width: f64,
    pub panel_width: f64,
    pub core: f64,
    pub outer_ratio: f64,
    pub inner_min: Option<f64>,
    pub inner_ratio: f64,
    pub nodes_per_panel: usize,
}

impl AxisLayout {
    /// `n` nodes on `[-L, L]` in equal panels.
    pub fn uniform(n: usize, half_width: f64) -> Result<Self> {
        if n < 16 || n % 2 != 0 {
            return domain("AxisLayout::uniform", format!("n must be even and >= 16, got {n}"));
        }
        let half = n / 2;
        // pick the panel size in [8, 24] closest to 16 that divides n/2
        let m = (8..=24)
            .filter(|m| half % m == 0)
            .min_by_key(|m| (*m as i64 - 16).abs())
            .ok_or_else(|| Error::Domain {
                op: "AxisLayout::uniform",
                msg: format!("n/2 = {half} has no panel size in 8..=24"),
            })?;
        let panels = half / m;
        Ok(Self {
            half_width,
            panel_width: half_width / panels as f64,
            core: half_width,
            outer_ratio: 1.0,
            inner_min: None,
            inner_ratio: 2.0,
            nodes_per_panel: m,
        })
    }

    /// Fine near the origin and uniform beyond; suited to spectral grids
    /// carrying multipliers with a kink at ξ = 0.
    pub fn graded(half_width: f64, panel_width: f64, inner_min: f64, nodes_per_panel: usize) -> Self {
        Self {
            half_width,
            panel_width,
            core: half_width,
            outer_ratio: 1.0,
            inner_min: Some(inner_min),
            inner_ratio: 1.5,
            nodes_per_panel,
        }
    }

    /// Panels narrow enough to integrate `e^{i s x}` against smooth data for
    /// every `|x| ≤ reach`, optionally graded toward the origin.
    pub fn resolving(half_width: f64, reach: f64, inner_min: Option<f64>) -> Self {
        let panel_width = (RESOLVED_PHASE / reach.max(1e-300)).min(half_width / 4.0);
        Self {
            half_width,
            panel_width,
            core: half_width,
            outer_ratio: 1.0,
            inner_min: inner_min.filter(|&a| a < panel_width),
            inner_ratio: 3.0,
            nodes_per_panel: 16,
        }
    }

    pub fn with_outer(mut self, core: f64, ratio: f64) -> Self {
        self.core = core.min(self.half_width);
        self.outer_ratio = ratio;
        self
    }

    pub fn with_inner_ratio(mut self, ratio: f64) -> Self {
        self.inner_ratio = ratio;
        self
    }

    /// Positive breakpoints starting at 0.
    pub fn breakpoints(&self) -> Result<Vec<f64>> {
        let ok = self.half_width > 0.0
            && self.panel_width > 0.0
            && self.nodes_per_panel >= 2
            && self.inner_ratio > 1.0
            && self.outer_ratio >= 1.0;
        if !ok {
            return domain("AxisLayout", format!("invalid layout {self:?}"));
        }
        let mut b = vec![0.0];
        let h = self.panel_width.min(self.half_width);
        if let Some(a) = self.inner_min {
            let mut x = a;
            while x < h * 0.999 {
                b.push(x);
                x *= self.inner_ratio;
            }
        }
        let core = if self.outer_ratio > 1.0 {
            self.core.min(self.half_width)
        } else {
            self.half_width
        };
        let mut x = h;
        while x < core * (1.0 - 1e-12) {
            if x > *b.last().unwrap() * (1.0 + 1e-9) {
                b.push(x);
            }
            x += h;
        }
        if self.outer_ratio > 1.0 && core < self.half_width {
            let mut x = core;
            while x < self.half_width * (1.0 - 1e-12) {
                if x > *b.last().unwrap() * (1.0 + 1e-9) {
                    b.push(x);
                }
                x = (x * self.outer_ratio).max(x + h);
            }
        }
        let last = *b.last().unwrap();
        if b.len() > 2 && self.half_width - last < 0.3 * (last - b[b.len() - 2]) {
            b.pop();
        }
        b.push(self.half_width);
        Ok(b)
    }
}

/// One axis of a tensor grid: symmetric nodes with μ_{k}-weights.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisGrid {
    k: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    half_width: f64,
    // positive panel breakpoints, starting at 0
    breaks: Vec<f64>,
    per_panel: usize,
}

impl AxisGrid {
    pub fn new(k: f64, layout: &AxisLayout) -> Result<Self> {
        let breaks = layout.breakpoints()?;
        let m = layout.nodes_per_panel;
        let gl = gauss_legendre(m);
        let cdens = axis_c(k) * 2f64.powf(k);
        let mut pos_nodes = Vec::with_capacity(m * (breaks.len() - 1));
        let mut pos_weights = Vec::with_capacity(pos_nodes.capacity());
        // panel at the origin: ∫_0^b x^{2k} g dx = (b/2)^{2k+1} ∫ (1+s)^{2k} g ds
        let b1 = breaks[1];
        let gj = gauss_jacobi(m, 0.0, 2.0 * k);
        let scale = cdens * (0.5 * b1).powf(2.0 * k + 1.0);
        for (s, w) in gj.nodes.iter().zip(&gj.weights) {
            pos_nodes.push(0.5 * b1 * (1.0 + s));
            pos_weights.push(scale * w);
        }
        let (xs, ws) = quad::composite(&breaks[1..], &gl);
        for (x, w) in xs.into_iter().zip(ws) {
            pos_weights.push(w * axis_density(k, x));
            pos_nodes.push(x);
        }
        let n = pos_nodes.len();
        let mut nodes = Vec::with_capacity(2 * n);
        let mut weights = Vec::with_capacity(2 * n);
        for i in (0..n).rev() {
            nodes.push(-pos_nodes[i]);
            weights.push(pos_weights[i]);
        }
        nodes.extend_from_slice(&pos_nodes);
        weights.extend_from_slice(&pos_weights);
        Ok(Self {
            k,
            nodes,
            weights,
            half_width: layout.half_width,
            breaks,
            per_panel: m,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Same grid under x ↦ factor·x; weights scale by `factor^{1+2k}`.
    pub fn scaled(&self, factor: f64) -> Self {
        let wf = factor.powf(1.0 + 2.0 * self.k);
        Self {
            k: self.k,
            nodes: self.nodes.iter().map(|x| x * factor).collect(),
            weights: self.weights.iter().map(|w| w * wf).collect(),
            half_width: self.half_width * factor,
            breaks: self.breaks.iter().map(|b| b * factor).collect(),
            per_panel: self.per_panel,
        }
    }

    /// Values at `targets` of the piecewise polynomial through `values`,
    /// one degree `m - 1` interpolant per panel. Targets beyond the last
    /// panel use its polynomial.
    pub fn interpolate(&self, values: &[Complex64], targets: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.len(), "sample count");
        let h = self.len() / 2;
        let m = self.per_panel;
        let panels = self.breaks.len() - 1;
        targets
            .iter()
            .map(|&x| {
                let a = x.abs();
                let p = self.breaks[1..].partition_point(|b| *b < a).min(panels - 1);
                // positive-side indices of the panel, mirrored for x < 0
                let idx: Vec<usize> = (p * m..(p + 1) * m)
                    .map(|i| if x >= 0.0 { h + i } else { h - 1 - i })
                    .collect();
                let mut acc = Complex64::new(0.0, 0.0);
                for &i in &idx {
                    let mut l = 1.0;
                    for &j in &idx {
                        if i != j {
                            l *= (x - self.nodes[j]) / (self.nodes[i] - self.nodes[j]);
                        }
                    }
                    acc += values[i] * l;
                }
                acc
            })
            .collect()
    }
}

/// Tensor-product μ_k quadrature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<AxisGrid>,
}

impl Grid {
    pub fn new(cfg: &ReflectionConfig, layouts: &[AxisLayout]) -> Result<Self> {
        if layouts.len() != cfg.dim() {
            return Err(Error::Shape(format!(
                "{} layouts for dimension {}",
                layouts.len(),
                cfg.dim()
            )));
        }
        let axes = layouts
            .iter()
            .enumerate()
            .map(|(j, l)| AxisGrid::new(cfg.k(j), l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { axes })
    }

    /// Same layout on every axis.
    pub fn isotropic(cfg: &ReflectionConfig, layout: &AxisLayout) -> Result<Self> {
        Self::new(cfg, &vec![layout.clone(); cfg.dim()])
    }

    /// `n` nodes per axis on `[-L, L]^d`.
    pub fn uniform(cfg: &ReflectionConfig, n: usize, half_width: f64) -> Result<Self> {
        Self::isotropic(cfg, &AxisLayout::uniform(n, half_width)?)
    }

    pub fn from_axes(axes: Vec<AxisGrid>) -> Self {
        Self { axes }
    }

    pub fn axes(&self) -> &[AxisGrid] {
        &self.axes
    }

    pub fn axis(&self, j: usize) -> &AxisGrid {
        &self.axes[j]
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multiplicities(&self) -> Vec<f64> {
        self.axes.iter().map(|a| a.k).collect()
    }

    /// True when the grid carries the multiplicities of `cfg`.
    pub fn matches(&self, cfg: &ReflectionConfig) -> bool {
        self.multiplicities() == cfg.multiplicities()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            axes: self.axes.iter().map(|a| a.scaled(factor)).collect(),
        }
    }

    /// Samples on `target` of the per-axis panel interpolant of `values`.
    pub fn interpolate(&self, values: &[Complex64], target: &Grid) -> Vec<Complex64> {
        assert_eq!(values.len(), self.len(), "sample count");
        assert_eq!(target.dim(), self.dim(), "dimension");
        let mut shape = self.shape();
        let mut data = values.to_vec();
        for j in 0..self.dim() {
            let (n, m) = (shape[j], target.axes[j].len());
            let inner: usize = shape[j + 1..].iter().product();
            let outer: usize = shape[..j].iter().product();
            let mut out = vec![Complex64::new(0.0, 0.0); outer * m * inner];
            for o in 0..outer {
                for q in 0..inner {
                    let fiber: Vec<Complex64> = (0..n).map(|b| data[(o * n + b) * inner + q]).collect();
                    let v = self.axes[j].interpolate(&fiber, &target.axes[j].nodes);
                    for (a, x) in v.into_iter().enumerate() {
                        out[(o * m + a) * inner + q] = x;
                    }
                }
            }
            data = out;
            shape[j] = m;
        }
        data
    }

    /// Multi-index of the flat (row-major) index `idx`.
    pub fn unravel(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for j in (0..self.dim()).rev() {
            let n = self.axes[j].len();
            out[j] = idx % n;
            idx /= n;
        }
        out
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.unravel(idx)
            .iter()
            .enumerate()
            .map(|(j, &i)| self.axes[j].nodes[i])
            .collect()
    }

    pub fn weight(&self, idx: usize) -> f64 {
        self.unravel(idx)
            .iter()
            .enumerate()
            .map(|(j, &i)| self.axes[j].weights[i])
            .product()
    }

    /// All tensor weights, row-major.
    pub fn tensor_weights(&self) -> Vec<f64> {
        tensor_product(self.axes.iter().map(|a| a.weights.as_slice()))
    }

    /// |x|² at every node, row-major.
    pub fn squared_radii(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        for a in &self.axes {
            out = out
                .iter()
                .flat_map(|r| a.nodes.iter().map(move |x| r + x * x))
                .collect();
        }
        out
    }

    /// Flat index of the node −x.
    pub fn mirror(&self, idx: usize) -> usize {
        let mi = self.unravel(idx);
        let mut flat = 0;
        for (j, i) in mi.iter().enumerate() {
            let n = self.axes[j].len();
            flat = flat * n + (n - 1 - i);
        }
        flat
    }

    /// Whether the flat index lies on the outermost layer of nodes.
    pub fn on_boundary(&self, idx: usize) -> bool {
        self.unravel(idx)
            .iter()
            .enumerate()
            .any(|(j, &i)| i == 0 || i + 1 == self.axes[j].len())
    }

    /// Largest node coordinate over all axes.
    pub fn reach(&self) -> f64 {
        self.axes
            .iter()
            .map(|a| a.nodes.last().copied().unwrap_or(0.0))
            .fold(0.0, f64::max)
    }

    /// Highest frequency the grid resolves, judged by its mean panel width.
    pub fn resolved_frequency(&self) -> f64 {
        self.axes
            .iter()
            .map(|a| {
                let panels = (a.len() / 2) as f64 / 16.0;
                RESOLVED_PHASE * panels / a.half_width
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Exact μ_k([-L, L]^d) for comparison with the weight sum.
    pub fn box_measure(&self) -> f64 {
        self.axes
            .iter()
            .map(|a| {
                let k = a.k;
                axis_c(k) * 2f64.powf(k) * 2.0 * a.half_width.powf(2.0 * k + 1.0) / (2.0 * k + 1.0)
            })
            .product()
    }
}

fn tensor_product<'a>(factors: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut out = vec![1.0];
    for f in factors {
        out = out.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
    }
    out
}

/// Reflection symmetry of a sampled function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
    None,
}

/// Samples of a function on a [`Grid`].
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
    parity: Parity,
}

const PARITY_TOL: f64 = 1e-12;

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>, parity: Parity) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        let f = Self {
            grid,
            values,
            parity,
        };
        if parity != Parity::None {
            let sign = if parity == Parity::Even { 1.0 } else { -1.0 };
            let scale = f.sup().max(1.0);
            for i in 0..f.values.len() {
                let m = f.grid.mirror(i);
                if (f.values[m] - sign * f.values[i]).norm() > PARITY_TOL * scale {
                    return domain(
                        "GridFunction",
                        format!("samples violate {parity:?} parity at node {i}"),
                    );
                }
            }
        }
        Ok(f)
    }

    pub fn from_real(grid: Arc<Grid>, values: Vec<f64>, parity: Parity) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(), parity)
    }

    /// Sample a real function; parity left untagged.
    pub fn sample(grid: Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| Complex64::new(f(&grid.point(i)), 0.0))
            .collect();
        Self {
            grid,
            values,
            parity: Parity::None,
        }
    }

    /// Sample a radial function `f(|x|²)`; tagged even.
    pub fn sample_radial(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid
            .squared_radii()
            .into_iter()
            .map(|r2| Complex64::new(f(r2), 0.0))
            .collect();
        Self {
            grid,
            values,
            parity: Parity::Even,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn with_parity(self, parity: Parity) -> Result<Self> {
        Self::new(self.grid, self.values, parity)
    }

    pub(crate) fn from_parts(grid: Arc<Grid>, values: Vec<Complex64>, parity: Parity) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid,
            values,
            parity,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// ∫ f dμ_k by the grid quadrature.
    pub fn integral(&self) -> Complex64 {
        self.values
            .iter()
            .zip(self.grid.tensor_weights())
            .map(|(v, w)| v * w)
            .sum()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            parity: self.parity,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::Shape("functions live on different grids".into()))
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        let parity = if self.parity == other.parity {
            self.parity
        } else {
            Parity::None
        };
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
            parity,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.sub(&other.scale(-1.0))
    }

    /// Largest sample magnitude on the outermost node layer.
    pub fn boundary_magnitude(&self) -> f64 {
        (0..self.len())
            .filter(|&i| self.grid.on_boundary(i))
            .map(|i| self.values[i].norm())
            .fold(0.0, f64::max)
    }

    /// Errors unless the boundary layer is below `threshold` times the peak.
    pub fn check_decay(&self, threshold: f64) -> Result<()> {
        let peak = self.sup();
        let boundary = self.boundary_magnitude();
        if boundary > threshold * peak {
            return Err(Error::Truncation {
                boundary,
                peak,
                threshold,
            });
        }
        Ok(())
    }
}

/// Reference value ∫_{-∞}^{∞} e^{-x²/2} v_k dx per axis, by adaptive quadrature
/// (independent of the closed form and of the grid rules).
pub fn gaussian_moment_quadrature(k: f64) -> f64 {
    let f = |x: f64| (-0.5 * x * x).exp() * (2f64.sqrt() * x).powf(2.0 * k);
    2.0 * quad::adaptive(f, 0.0, 40.0, 1e-16, 1e-14, 4000).value
}


#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn config_validation() {
        assert!(ReflectionConfig::new(vec![]).is_err());
        let e = ReflectionConfig::new(vec![0.5, -1.0]).unwrap_err();
        assert!(e.to_string().contains("multiplicities[1]"));
        let c = ReflectionConfig::new(vec![0.5, 1.0]).unwrap();
        assert_eq!(c.gamma_k(), 3.0);
        assert_eq!(c.d_k(), 5.0);
    }

    #[test]
    fn weight_examples() {
        let c0 = ReflectionConfig::rank_one(0.0).unwrap();
        assert_eq!(weight_v(&c0, &[3.0]), 1.0);
        let c1 = ReflectionConfig::rank_one(1.0).unwrap();
        assert_relative_eq!(weight_v(&c1, &[1.0]), 2.0, max_relative = 1e-15);
        let c2 = ReflectionConfig::new(vec![0.3, 1.7]).unwrap();
        assert_eq!(weight_v(&c2, &[0.4, -1.1]), weight_v(&c2, &[-0.4, 1.1]));
        // homogeneous of degree γ_k
        let x = [0.4, -1.1];
        let s = 1.7;
        assert_relative_eq!(
            weight_v(&c2, &[s * x[0], s * x[1]]),
            s.powf(c2.gamma_k()) * weight_v(&c2, &x),
            max_relative = 1e-13
        );
    }

    #[test]
    fn normalization_matches_quadrature() {
        assert_relative_eq!(
            normalization_c(&ReflectionConfig::rank_one(0.0).unwrap()),
            1.0 / (2.0 * std::f64::consts::PI).sqrt(),
            max_relative = 1e-15
        );
        for k in [0.0, 0.25, 0.5, 1.0, 1.5, 2.3] {
            let c = normalization_c(&ReflectionConfig::rank_one(k).unwrap());
            assert_relative_eq!(c * gaussian_moment_quadrature(k), 1.0, max_relative = 1e-8);
        }
        let c1 = normalization_c(&ReflectionConfig::rank_one(1.0).unwrap());
        let closed = 1.0 / (2f64.powf(2.5) * crate::specfun::gamma(1.5).unwrap());
        assert_relative_eq!(c1, closed, max_relative = 1e-14);
    }

    #[test]
    fn grid_is_symmetric_and_weights_sum_to_box_measure() {
        for k in [0.0, 0.25, 0.5, 1.0, 1.5] {
            let cfg = ReflectionConfig::rank_one(k).unwrap();
            let g = Grid::uniform(&cfg, 128, 6.0).unwrap();
            let a = g.axis(0);
            for i in 0..a.len() {
                assert_eq!(a.nodes()[i], -a.nodes()[a.len() - 1 - i]);
                assert!(a.weights()[i] >= 0.0);
                assert!(a.nodes()[i] != 0.0);
            }
            let sum: f64 = a.weights().iter().sum();
            assert_relative_eq!(sum, g.box_measure(), max_relative = 1e-12);
        }
    }

    #[test]
    fn graded_layout_breakpoints_increase() {
        let l = AxisLayout::graded(30.0, 0.5, 1e-4, 16).with_outer(8.0, 1.3);
        let b = l.breakpoints().unwrap();
        assert_eq!(b[0], 0.0);
        assert_eq!(*b.last().unwrap(), 30.0);
        assert!(b.windows(2).all(|w| w[1] > w[0]));
        assert_relative_eq!(b[1], 1e-4);
    }

    #[test]
    fn parity_validation() {
        let cfg = ReflectionConfig::rank_one(0.5).unwrap();
        let g = Arc::new(Grid::uniform(&cfg, 32, 4.0).unwrap());
        let odd = GridFunction::sample(g.clone(), |x| x[0]);
        assert!(odd.clone().with_parity(Parity::Odd).is_ok());
        assert!(odd.with_parity(Parity::Even).is_err());
        let bad = GridFunction::new(g, vec![Complex64::new(1.0, 0.0); 3], Parity::None);
        assert!(matches!(bad, Err(Error::Shape(_))));
    }

    #[test]
    fn scaled_grid_integrates_consistently() {
        let cfg = ReflectionConfig::rank_one(0.75).unwrap();
        let g = Grid::uniform(&cfg, 96, 5.0).unwrap();
        let s = g.scaled(3.0);
        let sum: f64 = s.axis(0).weights().iter().sum();
        assert_relative_eq!(sum, s.box_measure(), max_relative = 1e-12);
    }
}
