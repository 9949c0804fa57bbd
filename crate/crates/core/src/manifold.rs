//! Built-in manifold models: the uniform box and standard Gaussian in the
//! plane, and the unit sphere with a two-cluster density. Each model
//! provides charts with an analytic embedding Jacobian (the metric is
//! J^T J), an analytic density with analytic ambient gradient, a seeded
//! sampler and the fixed interior grid used by convergence experiments.
//!
//! Chart-based differential operators are evaluated with nested central
//! differences in divergence form,
//!
//! ```text
//! lap f = (1/sqrt(det g)) d_j ( sqrt(det g) g^{ij} d_i f ),
//! ```
//!
//! which is second-order accurate in the step size.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Default finite-difference step in chart units.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

const SPHERE_NORM_TOL: f64 = 1e-9;

/// A chart point: which chart and the coordinates in it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub chart: usize,
    pub coords: Vec<f64>,
}

/// Geometry class used by the convolution oracle to pick a quadrature
/// parameterization and the curvature term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometryClass {
    /// Chart = ambient plane, identity embedding.
    Flat,
    /// Round sphere of the given radius embedded in R^{m+1}.
    Sphere { radius: f64 },
}

pub trait Manifold: Send + Sync {
    fn name(&self) -> &'static str;
    fn intrinsic_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn geometry(&self) -> GeometryClass;

    fn chart_count(&self) -> usize;
    /// Chart coordinates -> ambient point.
    fn embed(&self, chart: usize, u: &[f64]) -> Vec<f64>;
    /// Analytic d x m Jacobian of the embedding.
    fn embed_jacobian(&self, chart: usize, u: &[f64]) -> Array2<f64>;
    /// Whether u lies strictly inside the chart domain.
    fn chart_contains(&self, chart: usize, u: &[f64]) -> bool;
    /// Chart coordinates of an ambient point on the manifold.
    fn chart_of(&self, x: &[f64]) -> Result<ChartPoint>;

    /// Density w.r.t. the natural volume element, evaluated through a
    /// smooth ambient extension. Errors off the manifold.
    fn density_ambient(&self, x: &[f64]) -> Result<f64>;
    /// Analytic ambient gradient of the density extension.
    fn density_ambient_gradient(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// n i.i.d. samples, deterministic for a fixed seed.
    fn sample(&self, n: usize, seed: u64) -> Array2<f64>;

    /// Distance to the boundary, None when the manifold has none.
    fn boundary_distance(&self, x: &[f64]) -> Option<f64>;
    /// Whether x lies on the manifold with at least `margin` to the boundary.
    fn interior_test(&self, x: &[f64], margin: f64) -> bool;

    /// The second-order curvature correction S entering the small-bandwidth
    /// expansion of kernel integrals; zero for flat geometry.
    fn curvature_correction(&self) -> f64 {
        match self.geometry() {
            GeometryClass::Flat => 0.0,
            GeometryClass::Sphere { radius } => {
                crate::oracle::sphere_curvature_term(radius, self.intrinsic_dim())
            }
        }
    }

    /// Fixed deterministic interior evaluation points (ambient coordinates).
    fn eval_grid(&self) -> Vec<Vec<f64>>;

    /// Metric tensor g = J^T J at chart coordinates.
    fn metric(&self, chart: usize, u: &[f64]) -> Array2<f64> {
        let j = self.embed_jacobian(chart, u);
        let m = self.intrinsic_dim();
        let mut g = Array2::zeros((m, m));
        for a in 0..m {
            for b in 0..m {
                let mut s = 0.0;
                for r in 0..self.ambient_dim() {
                    s += j[[r, a]] * j[[r, b]];
                }
                g[[a, b]] = s;
            }
        }
        g
    }

    /// Density in chart coordinates.
    fn density_chart(&self, chart: usize, u: &[f64]) -> Result<f64> {
        self.density_ambient(&self.embed(chart, u))
    }

    /// Analytic chart partials of the density: J^T grad_ambient p.
    fn density_chart_gradient(&self, chart: usize, u: &[f64]) -> Result<Vec<f64>> {
        let x = self.embed(chart, u);
        let grad = self.density_ambient_gradient(&x)?;
        let j = self.embed_jacobian(chart, u);
        let m = self.intrinsic_dim();
        let mut out = vec![0.0; m];
        for a in 0..m {
            for r in 0..self.ambient_dim() {
                out[a] += j[[r, a]] * grad[r];
            }
        }
        Ok(out)
    }
}

pub fn manifold_by_name(name: &str) -> Result<Box<dyn Manifold>> {
    match name {
        "box2_uniform" => Ok(Box::new(Box2Uniform::new())),
        "gauss2" => Ok(Box::new(Gauss2::new())),
        "sphere_cluster" => Ok(Box::new(SphereCluster::new())),
        _ => Err(Error::UnknownModel {
            name: name.to_string(),
            known: registered_model_names().join(", "),
        }),
    }
}

pub fn registered_model_names() -> Vec<&'static str> {
    vec!["box2_uniform", "gauss2", "sphere_cluster"]
}

fn grid_2d(lo: f64, hi: f64, steps: usize) -> Vec<Vec<f64>> {
    let mut pts = Vec::with_capacity(steps * steps);
    for i in 0..steps {
        for j in 0..steps {
            let x = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
            let y = lo + (hi - lo) * j as f64 / (steps - 1) as f64;
            pts.push(vec![x, y]);
        }
    }
    pts
}

/// Uniform distribution on the square [-3, 3]^2 in the plane.
#[derive(Debug, Clone, Default)]
pub struct Box2Uniform {
    half: f64,
}

impl Box2Uniform {
    pub fn new() -> Self {
        Self { half: 3.0 }
    }
}

impl Manifold for Box2Uniform {
    fn name(&self) -> &'static str {
        "box2_uniform"
    }

    fn intrinsic_dim(&self) -> usize {
        2
    }

    fn ambient_dim(&self) -> usize {
        2
    }

    fn geometry(&self) -> GeometryClass {
        GeometryClass::Flat
    }

    fn chart_count(&self) -> usize {
        1
    }

    fn embed(&self, _chart: usize, u: &[f64]) -> Vec<f64> {
        u.to_vec()
    }

    fn embed_jacobian(&self, _chart: usize, _u: &[f64]) -> Array2<f64> {
        Array2::eye(2)
    }

    fn chart_contains(&self, _chart: usize, u: &[f64]) -> bool {
        u.iter().all(|v| v.abs() < self.half)
    }

    fn chart_of(&self, x: &[f64]) -> Result<ChartPoint> {
        if !self.chart_contains(0, x) {
            return Err(Error::OffManifold(format!(
                "point ({}, {}) outside the open box",
                x[0], x[1]
            )));
        }
        Ok(ChartPoint {
            chart: 0,
            coords: x.to_vec(),
        })
    }

    fn density_ambient(&self, x: &[f64]) -> Result<f64> {
        if !self.chart_contains(0, x) {
            return Err(Error::OffManifold(format!(
                "point ({}, {}) outside the open box",
                x[0], x[1]
            )));
        }
        Ok(1.0 / (2.0 * self.half).powi(2))
    }

    fn density_ambient_gradient(&self, _x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![0.0, 0.0])
    }

    fn sample(&self, n: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts = Array2::zeros((n, 2));
        for i in 0..n {
            pts[[i, 0]] = rng.random::<f64>() * 2.0 * self.half - self.half;
            pts[[i, 1]] = rng.random::<f64>() * 2.0 * self.half - self.half;
        }
        pts
    }

    fn boundary_distance(&self, x: &[f64]) -> Option<f64> {
        let dx = self.half - x[0].abs();
        let dy = self.half - x[1].abs();
        Some(dx.min(dy))
    }

    fn interior_test(&self, x: &[f64], margin: f64) -> bool {
        self.boundary_distance(x).is_some_and(|d| d > margin)
    }

    fn eval_grid(&self) -> Vec<Vec<f64>> {
        grid_2d(-1.5, 1.5, 5)
    }
}

/// Standard Gaussian on the plane.
#[derive(Debug, Clone, Default)]
pub struct Gauss2;

impl Gauss2 {
    pub fn new() -> Self {
        Self
    }
}

impl Manifold for Gauss2 {
    fn name(&self) -> &'static str {
        "gauss2"
    }

    fn intrinsic_dim(&self) -> usize {
        2
    }

    fn ambient_dim(&self) -> usize {
        2
    }

    fn geometry(&self) -> GeometryClass {
        GeometryClass::Flat
    }

    fn chart_count(&self) -> usize {
        1
    }

    fn embed(&self, _chart: usize, u: &[f64]) -> Vec<f64> {
        u.to_vec()
    }

    fn embed_jacobian(&self, _chart: usize, _u: &[f64]) -> Array2<f64> {
        Array2::eye(2)
    }

    fn chart_contains(&self, _chart: usize, _u: &[f64]) -> bool {
        true
    }

    fn chart_of(&self, x: &[f64]) -> Result<ChartPoint> {
        Ok(ChartPoint {
            chart: 0,
            coords: x.to_vec(),
        })
    }

    fn density_ambient(&self, x: &[f64]) -> Result<f64> {
        let r2 = x[0] * x[0] + x[1] * x[1];
        Ok((-0.5 * r2).exp() / (2.0 * std::f64::consts::PI))
    }

    fn density_ambient_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let p = self.density_ambient(x)?;
        Ok(vec![-x[0] * p, -x[1] * p])
    }

    fn sample(&self, n: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = StandardNormal;
        let mut pts = Array2::zeros((n, 2));
        for i in 0..n {
            pts[[i, 0]] = normal.sample(&mut rng);
            pts[[i, 1]] = normal.sample(&mut rng);
        }
        pts
    }

    fn boundary_distance(&self, _x: &[f64]) -> Option<f64> {
        None
    }

    fn interior_test(&self, _x: &[f64], _margin: f64) -> bool {
        true
    }

    fn eval_grid(&self) -> Vec<Vec<f64>> {
        grid_2d(-1.0, 1.0, 5)
    }
}

/// Unit sphere in R^3 with density p = (1 + 3 z^2) / (8 pi) with respect to
/// the spherical volume element: two antipodal high-density caps.
///
/// Chart 0 is polar about the z-axis, chart 1 polar about the x-axis, so
/// every point is far from the coordinate singularity of one of them.
#[derive(Debug, Clone, Default)]
pub struct SphereCluster;

impl SphereCluster {
    pub fn new() -> Self {
        Self
    }

    /// Maximum of the density, attained at the poles.
    fn density_max() -> f64 {
        1.0 / (2.0 * std::f64::consts::PI)
    }

    fn check_on_sphere(x: &[f64]) -> Result<()> {
        let norm = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if (norm - 1.0).abs() > SPHERE_NORM_TOL {
            return Err(Error::OffManifold(format!(
                "|x| = {norm} deviates from 1 by more than {SPHERE_NORM_TOL}"
            )));
        }
        Ok(())
    }
}

impl Manifold for SphereCluster {
    fn name(&self) -> &'static str {
        "sphere_cluster"
    }

    fn intrinsic_dim(&self) -> usize {
        2
    }

    fn ambient_dim(&self) -> usize {
        3
    }

    fn geometry(&self) -> GeometryClass {
        GeometryClass::Sphere { radius: 1.0 }
    }

    fn chart_count(&self) -> usize {
        2
    }

    /// u = (theta, phi). Chart 0: polar axis z; chart 1: polar axis x.
    fn embed(&self, chart: usize, u: &[f64]) -> Vec<f64> {
        let (theta, phi) = (u[0], u[1]);
        let (st, ct) = (theta.sin(), theta.cos());
        let (sp, cp) = (phi.sin(), phi.cos());
        match chart {
            0 => vec![st * cp, st * sp, ct],
            1 => vec![ct, st * cp, st * sp],
            _ => panic!("sphere has two charts"),
        }
    }

    fn embed_jacobian(&self, chart: usize, u: &[f64]) -> Array2<f64> {
        let (theta, phi) = (u[0], u[1]);
        let (st, ct) = (theta.sin(), theta.cos());
        let (sp, cp) = (phi.sin(), phi.cos());
        match chart {
            0 => ndarray::array![
                [ct * cp, -st * sp],
                [ct * sp, st * cp],
                [-st, 0.0]
            ],
            1 => ndarray::array![
                [-st, 0.0],
                [ct * cp, -st * sp],
                [ct * sp, st * cp]
            ],
            _ => panic!("sphere has two charts"),
        }
    }

    fn chart_contains(&self, _chart: usize, u: &[f64]) -> bool {
        u[0] > 0.0 && u[0] < std::f64::consts::PI
    }

    fn chart_of(&self, x: &[f64]) -> Result<ChartPoint> {
        Self::check_on_sphere(x)?;
        if x[2].abs() < 0.95 {
            Ok(ChartPoint {
                chart: 0,
                coords: vec![x[2].clamp(-1.0, 1.0).acos(), x[1].atan2(x[0])],
            })
        } else {
            Ok(ChartPoint {
                chart: 1,
                coords: vec![x[0].clamp(-1.0, 1.0).acos(), x[2].atan2(x[1])],
            })
        }
    }

    fn density_ambient(&self, x: &[f64]) -> Result<f64> {
        Self::check_on_sphere(x)?;
        Ok((1.0 + 3.0 * x[2] * x[2]) / (8.0 * std::f64::consts::PI))
    }

    fn density_ambient_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Self::check_on_sphere(x)?;
        Ok(vec![0.0, 0.0, 6.0 * x[2] / (8.0 * std::f64::consts::PI)])
    }

    /// Rejection sampling: uniform proposal on the sphere, acceptance
    /// p / p_max. The acceptance rate is 1/2.
    fn sample(&self, n: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pmax = Self::density_max();
        let mut pts = Array2::zeros((n, 3));
        let mut i = 0;
        while i < n {
            // Marsaglia's method for the uniform proposal
            let (x1, x2) = loop {
                let a = rng.random::<f64>() * 2.0 - 1.0;
                let b = rng.random::<f64>() * 2.0 - 1.0;
                if a * a + b * b < 1.0 {
                    break (a, b);
                }
            };
            let s = x1 * x1 + x2 * x2;
            let factor = 2.0 * (1.0 - s).sqrt();
            let p = [x1 * factor, x2 * factor, 1.0 - 2.0 * s];
            let dens = (1.0 + 3.0 * p[2] * p[2]) / (8.0 * std::f64::consts::PI);
            if rng.random::<f64>() < dens / pmax {
                pts[[i, 0]] = p[0];
                pts[[i, 1]] = p[1];
                pts[[i, 2]] = p[2];
                i += 1;
            }
        }
        pts
    }

    fn boundary_distance(&self, _x: &[f64]) -> Option<f64> {
        None
    }

    fn interior_test(&self, x: &[f64], _margin: f64) -> bool {
        Self::check_on_sphere(x).is_ok()
    }

    /// 24 points: theta in {pi/4, pi/2, 3pi/4} x 8 equispaced longitudes.
    fn eval_grid(&self) -> Vec<Vec<f64>> {
        let mut pts = Vec::with_capacity(24);
        for &theta in &[
            std::f64::consts::FRAC_PI_4,
            std::f64::consts::FRAC_PI_2,
            3.0 * std::f64::consts::FRAC_PI_4,
        ] {
            for k in 0..8 {
                let phi = 2.0 * std::f64::consts::PI * k as f64 / 8.0;
                pts.push(self.embed(0, &[theta, phi]));
            }
        }
        pts
    }
}

/// Inverse of a small symmetric positive-definite matrix (m <= 3).
fn invert_small(g: &Array2<f64>) -> Result<Array2<f64>> {
    let m = g.nrows();
    let singular = || Error::Domain("metric tensor is singular".to_string());
    match m {
        1 => {
            if g[[0, 0]] == 0.0 {
                return Err(singular());
            }
            Ok(ndarray::array![[1.0 / g[[0, 0]]]])
        }
        2 => {
            let det = g[[0, 0]] * g[[1, 1]] - g[[0, 1]] * g[[1, 0]];
            if det == 0.0 {
                return Err(singular());
            }
            Ok(ndarray::array![
                [g[[1, 1]] / det, -g[[0, 1]] / det],
                [-g[[1, 0]] / det, g[[0, 0]] / det]
            ])
        }
        3 => {
            let a = g[[0, 0]];
            let b = g[[0, 1]];
            let c = g[[0, 2]];
            let d = g[[1, 0]];
            let e = g[[1, 1]];
            let f = g[[1, 2]];
            let gg = g[[2, 0]];
            let h = g[[2, 1]];
            let i = g[[2, 2]];
            let det = a * (e * i - f * h) - b * (d * i - f * gg) + c * (d * h - e * gg);
            if det == 0.0 {
                return Err(singular());
            }
            Ok(ndarray::array![
                [(e * i - f * h) / det, (c * h - b * i) / det, (b * f - c * e) / det],
                [(f * gg - d * i) / det, (a * i - c * gg) / det, (c * d - a * f) / det],
                [(d * h - e * gg) / det, (b * gg - a * h) / det, (a * e - b * d) / det]
            ])
        }
        _ => Err(Error::Domain(format!(
            "small-matrix inverse supports m <= 3, got {m}"
        ))),
    }
}

fn det_small(g: &Array2<f64>) -> f64 {
    match g.nrows() {
        1 => g[[0, 0]],
        2 => g[[0, 0]] * g[[1, 1]] - g[[0, 1]] * g[[1, 0]],
        3 => {
            g[[0, 0]] * (g[[1, 1]] * g[[2, 2]] - g[[1, 2]] * g[[2, 1]])
                - g[[0, 1]] * (g[[1, 0]] * g[[2, 2]] - g[[1, 2]] * g[[2, 0]])
                + g[[0, 2]] * (g[[1, 0]] * g[[2, 1]] - g[[1, 1]] * g[[2, 0]])
        }
        _ => panic!("det_small supports m <= 3"),
    }
}

fn stencil_in_chart(model: &dyn Manifold, chart: usize, u: &[f64], step: f64) -> Result<()> {
    let m = u.len();
    let mut probe = u.to_vec();
    for a in 0..m {
        for s in [-2.0, 2.0] {
            probe.copy_from_slice(u);
            probe[a] += s * step;
            if !model.chart_contains(chart, &probe) {
                return Err(Error::ChartDomain);
            }
        }
        for b in 0..m {
            if a == b {
                continue;
            }
            for sa in [-1.0, 1.0] {
                for sb in [-1.0, 1.0] {
                    probe.copy_from_slice(u);
                    probe[a] += sa * step;
                    probe[b] += sb * step;
                    if !model.chart_contains(chart, &probe) {
                        return Err(Error::ChartDomain);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Laplace-Beltrami operator of a chart function at u, by nested central
/// differences of the divergence form. Error is O(step^2).
pub fn laplace_beltrami_with_step(
    model: &dyn Manifold,
    chart: usize,
    f: &dyn Fn(&[f64]) -> f64,
    u: &[f64],
    step: f64,
) -> Result<f64> {
    let m = model.intrinsic_dim();
    if u.len() != m {
        return Err(Error::Domain(format!(
            "expected {m} chart coordinates, got {}",
            u.len()
        )));
    }
    stencil_in_chart(model, chart, u, step)?;

    // flux_j(v) = sqrt(det g) sum_i ginv[j][i] df_i at v
    let flux = |v: &[f64], j: usize| -> Result<f64> {
        let g = model.metric(chart, v);
        let ginv = invert_small(&g)?;
        let sq = det_small(&g).sqrt();
        let mut s = 0.0;
        let mut vp = v.to_vec();
        let mut vm = v.to_vec();
        for i in 0..m {
            vp.copy_from_slice(v);
            vm.copy_from_slice(v);
            vp[i] += step;
            vm[i] -= step;
            let dfi = (f(&vp) - f(&vm)) / (2.0 * step);
            s += ginv[[j, i]] * dfi;
        }
        Ok(sq * s)
    };

    let g0 = model.metric(chart, u);
    let sq0 = det_small(&g0).sqrt();
    let mut total = 0.0;
    let mut up = u.to_vec();
    let mut um = u.to_vec();
    for j in 0..m {
        up.copy_from_slice(u);
        um.copy_from_slice(u);
        up[j] += step;
        um[j] -= step;
        total += (flux(&up, j)? - flux(&um, j)?) / (2.0 * step);
    }
    Ok(total / sq0)
}

/// [`laplace_beltrami_with_step`] at the default step.
pub fn laplace_beltrami(
    model: &dyn Manifold,
    chart: usize,
    f: &dyn Fn(&[f64]) -> f64,
    u: &[f64],
) -> Result<f64> {
    laplace_beltrami_with_step(model, chart, f, u, DEFAULT_FD_STEP)
}

/// The density-advection term (s/p) g^{ij} (d_i p)(d_j f) at chart
/// coordinates u. The density partials are analytic, the function partials
/// central differences.
pub fn weighted_gradient_term_with_step(
    model: &dyn Manifold,
    chart: usize,
    f: &dyn Fn(&[f64]) -> f64,
    u: &[f64],
    s: f64,
    step: f64,
) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let m = model.intrinsic_dim();
    let p = model.density_chart(chart, u)?;
    if p <= 0.0 {
        return Err(Error::Domain(format!("density must be positive, got {p}")));
    }
    let dp = model.density_chart_gradient(chart, u)?;
    let g = model.metric(chart, u);
    let ginv = invert_small(&g)?;
    let mut df = vec![0.0; m];
    let mut vp = u.to_vec();
    let mut vm = u.to_vec();
    for i in 0..m {
        vp.copy_from_slice(u);
        vm.copy_from_slice(u);
        vp[i] += step;
        vm[i] -= step;
        if !model.chart_contains(chart, &vp) || !model.chart_contains(chart, &vm) {
            return Err(Error::ChartDomain);
        }
        df[i] = (f(&vp) - f(&vm)) / (2.0 * step);
    }
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            acc += ginv[[i, j]] * dp[i] * df[j];
        }
    }
    Ok(s / p * acc)
}

pub fn weighted_gradient_term(
    model: &dyn Manifold,
    chart: usize,
    f: &dyn Fn(&[f64]) -> f64,
    u: &[f64],
    s: f64,
) -> Result<f64> {
    weighted_gradient_term_with_step(model, chart, f, u, s, DEFAULT_FD_STEP)
}
