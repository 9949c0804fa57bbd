//! Radius neighborhood graphs over sampled points with density-reweighted
//! kernel weights, and the extension of the three graph Laplacians to
//! arbitrary ambient points.
//!
//! Base weights carry the full scaled kernel `k_h(t) = h^{-m} k(t/h^2)`
//! including the `1/h^m` factor, so the unnormalized estimator needs the
//! true intrinsic dimension m from the caller. Reweighted weights divide by
//! `[d(X_i) d(X_j)]^lambda` where d is the base degree function.
//!
//! All degree and average accumulations run in ascending neighbor order
//! with compensated summation, so results do not depend on thread count.

use ndarray::Array2;
use rayon::prelude::*;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{LaplacianKind, WeightedGraph};
use crate::kernel::KernelProfile;
use crate::numerics::KahanSum;

/// Uniform-grid spatial index with cell edge equal to the query radius;
/// radius queries return exactly the brute-force result.
#[derive(Debug, Clone)]
pub struct RadiusIndex {
    cell: f64,
    dim: usize,
    origin: Vec<f64>,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl RadiusIndex {
    pub fn build(points: &Array2<f64>, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::Domain(format!(
                "index radius must be positive, got {radius}"
            )));
        }
        let dim = points.ncols();
        let n = points.nrows();
        // anchor the grid at the bounding-box corner to keep cell indices small
        let mut origin = vec![f64::INFINITY; dim];
        for i in 0..n {
            for d in 0..dim {
                origin[d] = origin[d].min(points[[i, d]]);
            }
        }
        if n == 0 {
            origin = vec![0.0; dim];
        }
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for i in 0..n {
            let key = Self::key(&points.row(i).to_vec(), &origin, radius);
            buckets.entry(key).or_default().push(i);
        }
        Ok(Self {
            cell: radius,
            dim,
            origin,
            buckets,
        })
    }

    fn key(x: &[f64], origin: &[f64], cell: f64) -> Vec<i64> {
        x.iter()
            .zip(origin)
            .map(|(v, o)| ((v - o) / cell).floor() as i64)
            .collect()
    }

    /// Indices of all points within `self.cell` of x (inclusive), sorted
    /// ascending.
    pub fn query(&self, points: &Array2<f64>, x: &[f64]) -> Vec<usize> {
        let r2 = self.cell * self.cell;
        let center = Self::key(x, &self.origin, self.cell);
        let mut out = Vec::new();
        let mut offsets = vec![0i64; self.dim];
        self.visit_cells(&center, 0, &mut offsets, &mut |key: &Vec<i64>| {
            if let Some(ids) = self.buckets.get(key) {
                for &i in ids {
                    let mut d2 = 0.0;
                    for d in 0..self.dim {
                        let diff = points[[i, d]] - x[d];
                        d2 += diff * diff;
                    }
                    if d2 <= r2 {
                        out.push(i);
                    }
                }
            }
        });
        out.sort_unstable();
        out
    }

    fn visit_cells(
        &self,
        center: &[i64],
        axis: usize,
        offsets: &mut Vec<i64>,
        f: &mut impl FnMut(&Vec<i64>),
    ) {
        if axis == self.dim {
            let key: Vec<i64> = center.iter().zip(offsets.iter()).map(|(c, o)| c + o).collect();
            f(&key);
            return;
        }
        for o in -1..=1 {
            offsets[axis] = o;
            self.visit_cells(center, axis + 1, offsets, f);
        }
    }
}

/// Sparse symmetric neighborhood graph with base and reweighted weights.
#[derive(Debug, Clone)]
pub struct NeighborhoodGraph {
    points: Array2<f64>,
    h: f64,
    lambda: f64,
    dim: usize,
    kernel: KernelProfile,
    index: RadiusIndex,
    /// per-row (neighbor, base weight k_h), ascending neighbor index
    base_rows: Vec<Vec<(usize, f64)>>,
    base_degrees: Vec<f64>,
    /// per-row (neighbor, reweighted weight), ascending neighbor index
    reweighted_rows: Vec<Vec<(usize, f64)>>,
    reweighted_degrees: Vec<f64>,
}

impl NeighborhoodGraph {
    /// Build the graph over `points` (one point per row) with bandwidth h,
    /// reweighting exponent lambda and intrinsic dimension m.
    pub fn build(
        points: Array2<f64>,
        kernel: KernelProfile,
        h: f64,
        lambda: f64,
        m: usize,
    ) -> Result<Self> {
        let n = points.nrows();
        if n < 2 {
            return Err(Error::Config(format!(
                "need at least 2 points to build a graph, got {n}"
            )));
        }
        if h <= 0.0 {
            return Err(Error::Domain(format!("bandwidth must be positive, got {h}")));
        }
        if m == 0 {
            return Err(Error::Domain("intrinsic dimension must be at least 1".into()));
        }
        let radius = h * kernel.support_radius();
        let index = RadiusIndex::build(&points, radius)?;

        let base_rows: Vec<Vec<(usize, f64)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let xi = points.row(i);
                let mut row = Vec::new();
                for j in index.query(&points, &xi.to_vec()) {
                    if j == i {
                        continue;
                    }
                    let mut d2 = 0.0;
                    for d in 0..points.ncols() {
                        let diff = points[[j, d]] - xi[d];
                        d2 += diff * diff;
                    }
                    let w = kernel.eval_scaled_raw(h, m, d2);
                    if w > 0.0 {
                        row.push((j, w));
                    }
                }
                row
            })
            .collect();

        let mut base_degrees = vec![0.0; n];
        for i in 0..n {
            let mut acc = KahanSum::new();
            for &(_, w) in &base_rows[i] {
                acc.add(w);
            }
            let d = acc.value() / n as f64;
            if d <= 0.0 {
                return Err(Error::IsolatedVertex { index: i });
            }
            base_degrees[i] = d;
        }

        let (reweighted_rows, reweighted_degrees) =
            Self::reweight(&base_rows, &base_degrees, lambda, n);

        Ok(Self {
            points,
            h,
            lambda,
            dim: m,
            kernel,
            index,
            base_rows,
            base_degrees,
            reweighted_rows,
            reweighted_degrees,
        })
    }

    fn reweight(
        base_rows: &[Vec<(usize, f64)>],
        base_degrees: &[f64],
        lambda: f64,
        n: usize,
    ) -> (Vec<Vec<(usize, f64)>>, Vec<f64>) {
        let reweighted_rows: Vec<Vec<(usize, f64)>> = if lambda == 0.0 {
            base_rows.to_vec()
        } else {
            base_rows
                .par_iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .map(|&(j, w)| (j, w / (base_degrees[i] * base_degrees[j]).powf(lambda)))
                        .collect()
                })
                .collect()
        };
        let reweighted_degrees: Vec<f64> = reweighted_rows
            .iter()
            .map(|row| {
                let mut acc = KahanSum::new();
                for &(_, w) in row {
                    acc.add(w);
                }
                acc.value() / n as f64
            })
            .collect();
        (reweighted_rows, reweighted_degrees)
    }

    /// Same point set and base weights, different reweighting exponent.
    pub fn with_lambda(&self, lambda: f64) -> Self {
        let n = self.n();
        let (reweighted_rows, reweighted_degrees) =
            Self::reweight(&self.base_rows, &self.base_degrees, lambda, n);
        Self {
            lambda,
            reweighted_rows,
            reweighted_degrees,
            ..self.clone()
        }
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kernel(&self) -> &KernelProfile {
        &self.kernel
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn base_degrees(&self) -> &[f64] {
        &self.base_degrees
    }

    pub fn reweighted_degrees(&self) -> &[f64] {
        &self.reweighted_degrees
    }

    pub fn base_weight(&self, i: usize, j: usize) -> f64 {
        lookup(&self.base_rows[i], j)
    }

    pub fn reweighted_weight(&self, i: usize, j: usize) -> f64 {
        lookup(&self.reweighted_rows[i], j)
    }

    /// All reweighted edges with i < j (the weights are symmetric).
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (i, row) in self.reweighted_rows.iter().enumerate() {
            for &(j, w) in row {
                if i < j {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    /// Number of undirected edges in the sparsity pattern.
    pub fn edge_count(&self) -> usize {
        self.base_rows.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// The reweighted graph as a [`WeightedGraph`] in the averaged-degree
    /// convention, for the matrix operators and export.
    pub fn to_weighted_graph(&self) -> Result<WeightedGraph> {
        let mut triplets = Vec::new();
        for (i, row) in self.reweighted_rows.iter().enumerate() {
            for &(j, w) in row {
                triplets.push((i, j, w));
            }
        }
        WeightedGraph::from_triplets(self.n(), &triplets)
    }

    /// Neighbors of an arbitrary ambient point within the kernel support,
    /// with base kernel values: (index, k_h(|x - X_j|^2)), ascending index.
    fn base_neighbors_of(&self, x: &[f64]) -> Vec<(usize, f64)> {
        let ids = self.index.query(&self.points, x);
        let mut out = Vec::with_capacity(ids.len());
        for j in ids {
            let mut d2 = 0.0;
            for d in 0..self.points.ncols() {
                let diff = self.points[[j, d]] - x[d];
                d2 += diff * diff;
            }
            let w = self.kernel.eval_scaled_raw(self.h, self.dim, d2);
            if w > 0.0 {
                out.push((j, w));
            }
        }
        out
    }

    /// Base degree function d_{h,n}(x) = (1/n) sum_j k_h(|x - X_j|^2),
    /// recomputed from the samples. Zero when no sample is in range.
    pub fn base_degree_at(&self, x: &[f64]) -> f64 {
        let mut acc = KahanSum::new();
        for &(_, w) in &self.base_neighbors_of(x) {
            acc.add(w);
        }
        acc.value() / self.n() as f64
    }

    /// Reweighted neighbor list of x together with d_{h,n}(x).
    fn reweighted_neighbors_of(&self, x: &[f64]) -> Result<(Vec<(usize, f64)>, f64)> {
        let base = self.base_neighbors_of(x);
        let mut acc = KahanSum::new();
        for &(_, w) in &base {
            acc.add(w);
        }
        let dx = acc.value() / self.n() as f64;
        if dx <= 0.0 {
            return Err(Error::EmptyNeighborhood);
        }
        let rew = if self.lambda == 0.0 {
            base
        } else {
            base.into_iter()
                .map(|(j, w)| (j, w / (dx * self.base_degrees[j]).powf(self.lambda)))
                .collect()
        };
        Ok((rew, dx))
    }

    /// Extended reweighted degree at an arbitrary ambient point.
    pub fn extended_degree(&self, x: &[f64]) -> Result<f64> {
        let (rew, _) = self.reweighted_neighbors_of(x)?;
        let mut acc = KahanSum::new();
        for &(_, w) in &rew {
            acc.add(w);
        }
        Ok(acc.value() / self.n() as f64)
    }

    /// Average operator (1/n) sum_j k~(x, X_j) f(X_j). Applied to the
    /// all-ones vector it reproduces [`NeighborhoodGraph::extended_degree`].
    pub fn average(&self, x: &[f64], f_samples: &[f64]) -> Result<f64> {
        self.check_len(f_samples)?;
        let (rew, _) = self.reweighted_neighbors_of(x)?;
        let mut acc = KahanSum::new();
        for &(j, w) in &rew {
            acc.add(w * f_samples[j]);
        }
        Ok(acc.value() / self.n() as f64)
    }

    /// Extended graph Laplacian of the given kind at an ambient point x:
    ///
    /// ```text
    /// rw:     (f(x) - Af(x)/d(x)) / h^2
    /// unnorm: (d(x) f(x) - Af(x)) / h^2
    /// norm:   (A g')(x) / (h^2 sqrt(d(x))),
    ///         g'(y) = f(x)/sqrt(d(x)) - f(y)/sqrt(d(y))
    /// ```
    ///
    /// with d the extended reweighted degree. At sample points this equals
    /// the matrix Laplacian of the reweighted graph divided by h^2.
    pub fn laplacian_at(
        &self,
        kind: LaplacianKind,
        x: &[f64],
        f_samples: &[f64],
        f_at_x: f64,
    ) -> Result<f64> {
        self.check_len(f_samples)?;
        let (rew, _) = self.reweighted_neighbors_of(x)?;
        let n = self.n() as f64;
        let mut deg = KahanSum::new();
        for &(_, w) in &rew {
            deg.add(w);
        }
        let dx = deg.value() / n;
        let h2 = self.h * self.h;
        match kind {
            LaplacianKind::RandomWalk => {
                let mut avg = KahanSum::new();
                for &(j, w) in &rew {
                    avg.add(w * f_samples[j]);
                }
                Ok((f_at_x - avg.value() / n / dx) / h2)
            }
            LaplacianKind::Unnormalized => {
                let mut avg = KahanSum::new();
                for &(j, w) in &rew {
                    avg.add(w * f_samples[j]);
                }
                Ok((dx * f_at_x - avg.value() / n) / h2)
            }
            LaplacianKind::Normalized => {
                let fx_scaled = f_at_x / dx.sqrt();
                let mut avg = KahanSum::new();
                for &(j, w) in &rew {
                    let dj = self.reweighted_degrees[j];
                    if dj <= 0.0 {
                        return Err(Error::ZeroDegree(j));
                    }
                    avg.add(w * (fx_scaled - f_samples[j] / dj.sqrt()));
                }
                Ok(avg.value() / n / (h2 * dx.sqrt()))
            }
        }
    }

    /// Discrete smoothness functional <f, Delta^u f>_V on the reweighted
    /// graph (chi identically 1), always non-negative.
    pub fn dirichlet_energy(&self, f_samples: &[f64]) -> Result<f64> {
        self.check_len(f_samples)?;
        // <f, D f - W f / n>_V with chi = 1 equals (1/2n^2) sum_ij w_ij (f_i - f_j)^2
        let n = self.n() as f64;
        let mut acc = KahanSum::new();
        for (i, row) in self.reweighted_rows.iter().enumerate() {
            let mut wf = KahanSum::new();
            for &(j, w) in row {
                wf.add(w * f_samples[j]);
            }
            acc.add(f_samples[i] * (self.reweighted_degrees[i] * f_samples[i] - wf.value() / n));
        }
        Ok(acc.value() / n)
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: f.len(),
            });
        }
        Ok(())
    }
}

fn lookup(row: &[(usize, f64)], j: usize) -> f64 {
    row.binary_search_by(|probe| probe.0.cmp(&j))
        .map(|k| row[k].1)
        .unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn three_point_graph(lambda: f64) -> NeighborhoodGraph {
        let points = array![[0.0], [0.5], [0.9]];
        NeighborhoodGraph::build(points, KernelProfile::cubic_taper(), 1.0, lambda, 1).unwrap()
    }

    #[test]
    fn three_point_weights_and_degrees() {
        let g = three_point_graph(0.0);
        assert_abs_diff_eq!(g.base_weight(0, 1), 0.421875, epsilon = 1e-15);
        assert_abs_diff_eq!(g.base_weight(0, 2), 0.006859, epsilon = 1e-15);
        assert_abs_diff_eq!(g.base_weight(1, 2), 0.592704, epsilon = 1e-15);
        assert_abs_diff_eq!(
            g.base_degrees()[0],
            (0.421875 + 0.006859) / 3.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn out_of_range_point_is_isolated() {
        let points = array![[0.0], [0.5], [2.0]];
        match NeighborhoodGraph::build(points, KernelProfile::cubic_taper(), 1.0, 0.0, 1) {
            Err(Error::IsolatedVertex { index: 2 }) => {}
            other => panic!("expected IsolatedVertex(2), got {other:?}"),
        }
    }

    #[test]
    fn lambda_zero_reweighting_is_bitwise_identity() {
        let g = three_point_graph(0.0);
        for i in 0..3 {
            for j in 0..3 {
                assert!(g.base_weight(i, j).to_bits() == g.reweighted_weight(i, j).to_bits());
            }
        }
    }

    #[test]
    fn reweighted_kernel_is_symmetric() {
        let g = three_point_graph(0.7);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(
                    g.reweighted_weight(i, j).to_bits(),
                    g.reweighted_weight(j, i).to_bits()
                );
            }
        }
    }

    #[test]
    fn extended_degree_matches_graph_degree_at_samples() {
        for lambda in [0.0, 0.5, 1.0, 2.0] {
            let g = three_point_graph(lambda);
            for i in 0..3 {
                let x = g.points().row(i).to_vec();
                let d = g.extended_degree(&x).unwrap();
                assert_abs_diff_eq!(d, g.reweighted_degrees()[i], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn extended_degree_far_away_is_an_error() {
        let g = three_point_graph(0.0);
        match g.extended_degree(&[50.0]) {
            Err(Error::EmptyNeighborhood) => {}
            other => panic!("expected EmptyNeighborhood, got {other:?}"),
        }
    }

    #[test]
    fn lambda_zero_extended_degree_equals_base_degree() {
        let g = three_point_graph(0.0);
        let x = [0.2];
        assert_eq!(
            g.extended_degree(&x).unwrap(),
            g.base_degree_at(&x)
        );
    }

    #[test]
    fn average_of_ones_is_degree_and_hand_value() {
        let g = three_point_graph(0.0);
        let x = g.points().row(0).to_vec();
        let ones = [1.0, 1.0, 1.0];
        assert_abs_diff_eq!(
            g.average(&x, &ones).unwrap(),
            g.extended_degree(&x).unwrap(),
            epsilon = 1e-15
        );
        assert_eq!(g.average(&x, &[0.0, 0.0, 0.0]).unwrap(), 0.0);
        let f = [1.0, 2.0, 3.0];
        let expect = (0.421875 * 2.0 + 0.006859 * 3.0) / 3.0;
        assert_abs_diff_eq!(g.average(&x, &f).unwrap(), expect, epsilon = 1e-15);
    }

    #[test]
    fn laplacian_on_constants() {
        let g = three_point_graph(0.3);
        let f = [4.0, 4.0, 4.0];
        let x = [0.45];
        for kind in [LaplacianKind::RandomWalk, LaplacianKind::Unnormalized] {
            let v = g.laplacian_at(kind, &x, &f, 4.0).unwrap();
            if kind == LaplacianKind::RandomWalk {
                assert_abs_diff_eq!(v, 0.0, epsilon = 1e-14);
            } else {
                // unnorm kills constants only through d(x) f - A f, same cancellation
                assert_abs_diff_eq!(v, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn single_neighbor_rw_value() {
        let points = array![[0.0], [0.5]];
        let g =
            NeighborhoodGraph::build(points, KernelProfile::cubic_taper(), 1.0, 0.0, 1).unwrap();
        let f = [7.0, 3.0];
        let x = [0.0];
        let v = g
            .laplacian_at(LaplacianKind::RandomWalk, &x, &f, 7.0)
            .unwrap();
        assert_abs_diff_eq!(v, (7.0 - 3.0) / 1.0, epsilon = 1e-14);
    }

    #[test]
    fn extension_reproduces_matrix_laplacians_at_samples() {
        let mut rng = StdRng::seed_from_u64(5);
        let n = 40;
        let mut pts = Array2::zeros((n, 2));
        for i in 0..n {
            pts[[i, 0]] = rng.random::<f64>() * 2.0;
            pts[[i, 1]] = rng.random::<f64>() * 2.0;
        }
        for lambda in [0.0, 1.0] {
            let g = NeighborhoodGraph::build(
                pts.clone(),
                KernelProfile::cubic_taper(),
                0.9,
                lambda,
                2,
            )
            .unwrap();
            let wg = g.to_weighted_graph().unwrap();
            let f: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let h2 = g.bandwidth() * g.bandwidth();
            for kind in LaplacianKind::all() {
                let matrix = wg.laplacian(kind, &f).unwrap();
                for i in 0..n {
                    let x = g.points().row(i).to_vec();
                    let ext = g.laplacian_at(kind, &x, &f, f[i]).unwrap();
                    assert_abs_diff_eq!(ext, matrix[i] / h2, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn rw_and_unnorm_are_shift_invariant() {
        let g = three_point_graph(0.4);
        let f = [1.0, -2.0, 0.5];
        let shifted: Vec<f64> = f.iter().map(|v| v + 11.0).collect();
        let x = [0.3];
        for kind in [LaplacianKind::RandomWalk, LaplacianKind::Unnormalized] {
            let a = g.laplacian_at(kind, &x, &f, 0.9).unwrap();
            let b = g.laplacian_at(kind, &x, &shifted, 0.9 + 11.0).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn dirichlet_energy_properties() {
        let g = three_point_graph(0.0);
        assert_abs_diff_eq!(
            g.dirichlet_energy(&[2.0, 2.0, 2.0]).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let f = [0.0, 1.0, -0.5];
        let e = g.dirichlet_energy(&f).unwrap();
        assert!(e >= 0.0);
        // identity <f, Delta^u f> = (1/2n^2) sum w_ij (f_i - f_j)^2
        let mut direct = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                direct += g.reweighted_weight(i, j) * (f[i] - f[j]).powi(2);
            }
        }
        direct /= 2.0 * 9.0;
        assert_abs_diff_eq!(e, direct, epsilon = 1e-14);
    }

    #[test]
    fn two_point_dirichlet_matches_edge_inner_of_difference() {
        let points = array![[0.0], [0.5]];
        let g =
            NeighborhoodGraph::build(points, KernelProfile::cubic_taper(), 1.0, 0.0, 1).unwrap();
        let f = [0.0, 1.0];
        let e = g.dirichlet_energy(&f).unwrap();
        let wg = g.to_weighted_graph().unwrap();
        let s = crate::graph::preset_structure(crate::graph::PresetKind::Unnormalized);
        let df = wg.difference(&s, &f).unwrap();
        let inner = wg.edge_inner(&s, &df, &df).unwrap();
        assert_abs_diff_eq!(e, inner, epsilon = 1e-14);
    }

    #[test]
    fn radius_index_matches_brute_force() {
        let mut rng = StdRng::seed_from_u64(9);
        for trial in 0..100 {
            let n = 5 + (trial % 40);
            let dim = 1 + (trial % 3);
            let mut pts = Array2::zeros((n, dim));
            for i in 0..n {
                for d in 0..dim {
                    pts[[i, d]] = rng.random::<f64>() * 4.0 - 2.0;
                }
            }
            let radius = 0.2 + rng.random::<f64>();
            let index = RadiusIndex::build(&pts, radius).unwrap();
            let x: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let got = index.query(&pts, &x);
            let mut expect = Vec::new();
            for i in 0..n {
                let d2: f64 = (0..dim).map(|d| (pts[[i, d]] - x[d]).powi(2)).sum();
                if d2 <= radius * radius {
                    expect.push(i);
                }
            }
            assert_eq!(got, expect, "trial {trial}");
        }
    }

    #[test]
    fn enlarging_h_keeps_all_edges() {
        let mut rng = StdRng::seed_from_u64(15);
        let n = 60;
        let mut pts = Array2::zeros((n, 2));
        for i in 0..n {
            pts[[i, 0]] = rng.random::<f64>() * 3.0;
            pts[[i, 1]] = rng.random::<f64>() * 3.0;
        }
        let small =
            NeighborhoodGraph::build(pts.clone(), KernelProfile::cubic_taper(), 0.8, 0.0, 2)
                .unwrap();
        let large =
            NeighborhoodGraph::build(pts, KernelProfile::cubic_taper(), 1.2, 0.0, 2).unwrap();
        for (i, j, _) in small.edges() {
            assert!(
                large.base_weight(i, j) > 0.0,
                "edge ({i},{j}) disappeared when h grew"
            );
        }
    }

    #[test]
    fn mean_base_degree_approaches_c1_times_density() {
        // uniform density p = 1/36 on [-3,3]^2; interior mean of d_{h,n}
        // should be close to c1 * p
        let mut rng = StdRng::seed_from_u64(21);
        let n = 20000;
        let mut pts = Array2::zeros((n, 2));
        for i in 0..n {
            pts[[i, 0]] = rng.random::<f64>() * 6.0 - 3.0;
            pts[[i, 1]] = rng.random::<f64>() * 6.0 - 3.0;
        }
        let h = 0.5;
        let g = NeighborhoodGraph::build(pts, KernelProfile::cubic_taper(), h, 0.0, 2).unwrap();
        let mut vals = Vec::new();
        for i in 0..n {
            let x = g.points().row(i);
            if x[0].abs() < 3.0 - h && x[1].abs() < 3.0 - h {
                vals.push(g.base_degrees()[i]);
            }
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let c1 = KernelProfile::cubic_taper().moments(2).unwrap().c1;
        let expect = c1 / 36.0;
        assert!(
            (mean - expect).abs() < 0.03 * expect,
            "mean degree {mean} vs {expect}"
        );
    }

    #[test]
    fn with_lambda_matches_fresh_build() {
        let base = three_point_graph(0.0);
        let derived = base.with_lambda(1.5);
        let fresh = three_point_graph(1.5);
        for i in 0..3 {
            assert_eq!(
                derived.reweighted_degrees()[i].to_bits(),
                fresh.reweighted_degrees()[i].to_bits()
            );
        }
    }
}
