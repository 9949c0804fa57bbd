//! Weighted graphs, the parameterized difference operator and the graph
//! Laplacians built from it.
//!
//! Degrees carry a 1/n averaging throughout:
//!
//! ```text
//! d_i^out = (1/n) sum_j w_ij,    d_i^in = (1/n) sum_j w_ji,
//! ```
//!
//! and the same averaging appears inside every operator below. Many graph
//! libraries omit it; here the constants of the continuum limits depend on
//! it, so it is part of the contract.
//!
//! The vertex and edge inner products are
//!
//! ```text
//! <f, g>_V = (1/n)    sum_i  f_i g_i (chi_out(d_i^out) + chi_in(d_i^in)),
//! <F, G>_E = (1/2n^2) sum_ij F_ij G_ij phi(w_ij),
//! ```
//!
//! and the difference operator is (df)(e_ij) = gamma(w_ij) (f_j - f_i).
//! The general Laplacian is the composition of the adjoint with the
//! difference operator; the random-walk, unnormalized and normalized
//! Laplacians are the usual special cases in the averaged-degree
//! convention:
//!
//! ```text
//! rw:     (I - D^{-1} W/n) f
//! unnorm: (D - W/n) f
//! norm:   (I - D^{-1/2} (W/n) D^{-1/2}) f
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::numerics::KahanSum;

/// Dense storage below this vertex count, per-row index/value lists above.
pub const DENSE_LIMIT: usize = 2048;

#[derive(Debug, Clone)]
enum Storage {
    Dense(Array2<f64>),
    Sparse {
        rows: Vec<Vec<(usize, f64)>>,
        cols: Vec<Vec<(usize, f64)>>,
    },
}

/// A directed or undirected weighted graph with 1/n-averaged degrees.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    storage: Storage,
    deg_out: Vec<f64>,
    deg_in: Vec<f64>,
    symmetric: bool,
}

/// Values attached to the edge set E = {(i, j) : w_ij > 0}.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeFunction {
    values: BTreeMap<(usize, usize), f64>,
}

impl EdgeFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Build an edge function by evaluating `f(i, j, w_ij)` on every edge.
    pub fn from_fn(graph: &WeightedGraph, mut f: impl FnMut(usize, usize, f64) -> f64) -> Self {
        let mut values = BTreeMap::new();
        graph.for_each_edge(|i, j, w| {
            values.insert((i, j), f(i, j, w));
        });
        Self { values }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values.get(&(i, j)).copied()
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.values.insert((i, j), value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.values.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn require(&self, i: usize, j: usize) -> Result<f64> {
        self.get(i, j).ok_or(Error::MissingEdgeValue(i, j))
    }
}

/// The (chi, gamma, phi) triple parameterizing the Hilbert spaces and the
/// difference operator. The vertex weight of vertex i is
/// chi_out(d_i^out) + chi_in(d_i^in).
#[derive(Clone)]
pub struct GraphStructure {
    chi_out: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    chi_in: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    gamma: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for GraphStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("GraphStructure{chi_out, chi_in, gamma, phi}")
    }
}

impl GraphStructure {
    pub fn new(
        chi_out: impl Fn(f64) -> f64 + Send + Sync + 'static,
        chi_in: impl Fn(f64) -> f64 + Send + Sync + 'static,
        gamma: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            chi_out: Arc::new(chi_out),
            chi_in: Arc::new(chi_in),
            gamma: Arc::new(gamma),
            phi: Arc::new(phi),
        }
    }

    /// Same chi for in- and outgoing degrees.
    pub fn undirected(
        chi: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static,
        gamma: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(chi.clone(), chi, gamma, phi)
    }

    /// Combined vertex weight chi_l.
    #[inline]
    pub fn chi(&self, deg_out: f64, deg_in: f64) -> f64 {
        (self.chi_out)(deg_out) + (self.chi_in)(deg_in)
    }

    #[inline]
    pub fn gamma(&self, w: f64) -> f64 {
        (self.gamma)(w)
    }

    #[inline]
    pub fn phi(&self, w: f64) -> f64 {
        (self.phi)(w)
    }
}

/// The three named graph Laplacians.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LaplacianKind {
    RandomWalk,
    Unnormalized,
    Normalized,
}

impl LaplacianKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LaplacianKind::RandomWalk => "rw",
            LaplacianKind::Unnormalized => "unnorm",
            LaplacianKind::Normalized => "norm",
        }
    }

    pub fn all() -> [LaplacianKind; 3] {
        [
            LaplacianKind::RandomWalk,
            LaplacianKind::Unnormalized,
            LaplacianKind::Normalized,
        ]
    }
}

impl std::str::FromStr for LaplacianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rw" => Ok(LaplacianKind::RandomWalk),
            "unnorm" => Ok(LaplacianKind::Unnormalized),
            "norm" => Ok(LaplacianKind::Normalized),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

/// Preset kinds for [`preset_structure`]; the normalized Laplacian comes
/// from a different difference operator and has no preset here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetKind {
    RandomWalk,
    Unnormalized,
}

/// Canonical (chi, gamma, phi) representative realizing the random-walk or
/// unnormalized Laplacian through the general construction:
/// gamma(w) = sqrt(w), phi = 1 on positive weights, and a combined vertex
/// weight of d (rw) or 1 (unnorm), split evenly between chi_out and chi_in.
pub fn preset_structure(kind: PresetKind) -> GraphStructure {
    let gamma = |w: f64| w.sqrt();
    let phi = |w: f64| if w > 0.0 { 1.0 } else { 0.0 };
    match kind {
        PresetKind::RandomWalk => GraphStructure::undirected(|d: f64| 0.5 * d, gamma, phi),
        PresetKind::Unnormalized => {
            GraphStructure::undirected(|d: f64| if d > 0.0 { 0.5 } else { 0.0 }, gamma, phi)
        }
    }
}

impl WeightedGraph {
    /// Build from a dense weight matrix.
    pub fn from_dense(weights: Array2<f64>) -> Result<Self> {
        let (r, c) = weights.dim();
        if r != c {
            return Err(Error::NotSquare(r, c));
        }
        for i in 0..r {
            for j in 0..c {
                let w = weights[[i, j]];
                if w < 0.0 || !w.is_finite() {
                    return Err(Error::NegativeWeight { i, j, value: w });
                }
            }
        }
        Self::finish(r, Storage::Dense(weights))
    }

    /// Build from (i, j, w) triplets; entries with w = 0 are dropped and
    /// duplicate entries are summed. Storage is dense up to
    /// [`DENSE_LIMIT`] vertices and sparse above.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if n <= DENSE_LIMIT {
            let mut w = Array2::zeros((n, n));
            for &(i, j, v) in triplets {
                if i >= n || j >= n {
                    return Err(Error::Domain(format!(
                        "edge ({i}, {j}) out of range for {n} vertices"
                    )));
                }
                w[[i, j]] += v;
            }
            Self::from_dense(w)
        } else {
            Self::from_triplets_sparse(n, triplets)
        }
    }

    /// Sparse-storage constructor, usable at any size (tests exercise the
    /// dense/sparse agreement on overlap sizes).
    pub fn from_triplets_sparse(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut row_maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::Domain(format!(
                    "edge ({i}, {j}) out of range for {n} vertices"
                )));
            }
            if v < 0.0 || !v.is_finite() {
                return Err(Error::NegativeWeight { i, j, value: v });
            }
            *row_maps[i].entry(j).or_insert(0.0) += v;
        }
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, m) in row_maps.into_iter().enumerate() {
            for (j, v) in m {
                if v < 0.0 {
                    return Err(Error::NegativeWeight { i, j, value: v });
                }
                if v > 0.0 {
                    rows[i].push((j, v));
                    cols[j].push((i, v));
                }
            }
        }
        Self::finish(n, Storage::Sparse { rows, cols })
    }

    fn finish(n: usize, storage: Storage) -> Result<Self> {
        let mut deg_out = vec![0.0; n];
        let mut deg_in = vec![0.0; n];
        match &storage {
            Storage::Dense(w) => {
                for i in 0..n {
                    let mut out = KahanSum::new();
                    let mut inn = KahanSum::new();
                    for j in 0..n {
                        out.add(w[[i, j]]);
                        inn.add(w[[j, i]]);
                    }
                    deg_out[i] = out.value() / n as f64;
                    deg_in[i] = inn.value() / n as f64;
                }
            }
            Storage::Sparse { rows, cols } => {
                for i in 0..n {
                    let mut out = KahanSum::new();
                    for &(_, v) in &rows[i] {
                        out.add(v);
                    }
                    deg_out[i] = out.value() / n as f64;
                    let mut inn = KahanSum::new();
                    for &(_, v) in &cols[i] {
                        inn.add(v);
                    }
                    deg_in[i] = inn.value() / n as f64;
                }
            }
        }
        for i in 0..n {
            if deg_out[i] + deg_in[i] <= 0.0 {
                return Err(Error::NoEdges(i));
            }
        }
        let mut g = Self {
            n,
            storage,
            deg_out,
            deg_in,
            symmetric: false,
        };
        g.symmetric = g.check_symmetric();
        Ok(g)
    }

    fn check_symmetric(&self) -> bool {
        match &self.storage {
            Storage::Dense(w) => {
                for i in 0..self.n {
                    for j in (i + 1)..self.n {
                        if w[[i, j]] != w[[j, i]] {
                            return false;
                        }
                    }
                }
                true
            }
            Storage::Sparse { rows, .. } => {
                for (i, row) in rows.iter().enumerate() {
                    for &(j, v) in row {
                        if self.weight(j, i) != v {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(w) => w[[i, j]],
            Storage::Sparse { rows, .. } => rows[i]
                .binary_search_by(|probe| probe.0.cmp(&j))
                .map(|k| rows[i][k].1)
                .unwrap_or(0.0),
        }
    }

    pub fn degree_out(&self, i: usize) -> f64 {
        self.deg_out[i]
    }

    pub fn degree_in(&self, i: usize) -> f64 {
        self.deg_in[i]
    }

    /// Degree of an undirected graph (out-degree; equal to the in-degree
    /// when the weights are symmetric).
    pub fn degree(&self, i: usize) -> f64 {
        self.deg_out[i]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.deg_out
    }

    /// Recompute both degree vectors from the stored weights.
    pub fn recompute_degrees(&self) -> (Vec<f64>, Vec<f64>) {
        let mut out = vec![0.0; self.n];
        let mut inn = vec![0.0; self.n];
        self.for_each_edge(|i, j, w| {
            out[i] += w / self.n as f64;
            inn[j] += w / self.n as f64;
        });
        (out, inn)
    }

    /// Visit every edge (w_ij > 0) in row-major order.
    pub fn for_each_edge(&self, mut f: impl FnMut(usize, usize, f64)) {
        match &self.storage {
            Storage::Dense(w) => {
                for i in 0..self.n {
                    for j in 0..self.n {
                        let v = w[[i, j]];
                        if v > 0.0 {
                            f(i, j, v);
                        }
                    }
                }
            }
            Storage::Sparse { rows, .. } => {
                for (i, row) in rows.iter().enumerate() {
                    for &(j, v) in row {
                        f(i, j, v);
                    }
                }
            }
        }
    }

    /// Incoming edges of vertex l: calls f(i, w_il).
    fn for_each_in_edge(&self, l: usize, mut f: impl FnMut(usize, f64)) {
        match &self.storage {
            Storage::Dense(w) => {
                for i in 0..self.n {
                    let v = w[[i, l]];
                    if v > 0.0 {
                        f(i, v);
                    }
                }
            }
            Storage::Sparse { cols, .. } => {
                for &(i, v) in &cols[l] {
                    f(i, v);
                }
            }
        }
    }

    /// Outgoing edges of vertex l: calls f(j, w_lj).
    fn for_each_out_edge(&self, l: usize, mut f: impl FnMut(usize, f64)) {
        match &self.storage {
            Storage::Dense(w) => {
                for j in 0..self.n {
                    let v = w[[l, j]];
                    if v > 0.0 {
                        f(j, v);
                    }
                }
            }
            Storage::Sparse { rows, .. } => {
                for &(j, v) in &rows[l] {
                    f(j, v);
                }
            }
        }
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: f.len(),
            });
        }
        Ok(())
    }

    fn require_symmetric(&self) -> Result<()> {
        if !self.symmetric {
            return Err(Error::SymmetryRequired);
        }
        Ok(())
    }

    fn require_positive_degrees(&self) -> Result<()> {
        for i in 0..self.n {
            if self.deg_out[i] <= 0.0 {
                return Err(Error::ZeroDegree(i));
            }
        }
        Ok(())
    }

    /// <f, g>_V = (1/n) sum_i f_i g_i chi_i.
    pub fn vertex_inner(&self, s: &GraphStructure, f: &[f64], g: &[f64]) -> Result<f64> {
        self.check_len(f)?;
        self.check_len(g)?;
        let mut acc = KahanSum::new();
        for i in 0..self.n {
            acc.add(f[i] * g[i] * s.chi(self.deg_out[i], self.deg_in[i]));
        }
        Ok(acc.value() / self.n as f64)
    }

    /// <F, G>_E = (1/2n^2) sum_{(i,j) in E} F_ij G_ij phi(w_ij).
    pub fn edge_inner(&self, s: &GraphStructure, f: &EdgeFunction, g: &EdgeFunction) -> Result<f64> {
        let mut acc = KahanSum::new();
        let mut err = None;
        self.for_each_edge(|i, j, w| {
            if err.is_some() {
                return;
            }
            match (f.require(i, j), g.require(i, j)) {
                (Ok(a), Ok(b)) => acc.add(a * b * s.phi(w)),
                (Err(e), _) | (_, Err(e)) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        Ok(acc.value() / (2.0 * (self.n * self.n) as f64))
    }

    /// (df)(e_ij) = gamma(w_ij) (f_j - f_i).
    pub fn difference(&self, s: &GraphStructure, f: &[f64]) -> Result<EdgeFunction> {
        self.check_len(f)?;
        Ok(EdgeFunction::from_fn(self, |i, j, w| {
            s.gamma(w) * (f[j] - f[i])
        }))
    }

    /// (df)(e_ij) = gamma(w_ij) (f_j / sqrt(d_j) - f_i / sqrt(d_i)),
    /// generally non-zero on constant functions.
    pub fn zhou_difference(&self, s: &GraphStructure, f: &[f64]) -> Result<EdgeFunction> {
        self.check_len(f)?;
        self.require_positive_degrees()?;
        let d = &self.deg_out;
        Ok(EdgeFunction::from_fn(self, |i, j, w| {
            s.gamma(w) * (f[j] / d[j].sqrt() - f[i] / d[i].sqrt())
        }))
    }

    /// Adjoint of the difference operator with respect to the two inner
    /// products:
    /// (d*u)(l) = 1/(2 chi_l) [ (1/n) sum_i gamma(w_il) u_il phi(w_il)
    ///                        - (1/n) sum_i gamma(w_li) u_li phi(w_li) ].
    pub fn adjoint(&self, s: &GraphStructure, u: &EdgeFunction) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n];
        for l in 0..self.n {
            let chi = s.chi(self.deg_out[l], self.deg_in[l]);
            if chi <= 0.0 {
                return Err(Error::ZeroChi(l));
            }
            let mut acc = KahanSum::new();
            let mut err = None;
            self.for_each_in_edge(l, |i, w| {
                if err.is_some() {
                    return;
                }
                match u.require(i, l) {
                    Ok(v) => acc.add(s.gamma(w) * v * s.phi(w)),
                    Err(e) => err = Some(e),
                }
            });
            self.for_each_out_edge(l, |j, w| {
                if err.is_some() {
                    return;
                }
                match u.require(l, j) {
                    Ok(v) => acc.add(-s.gamma(w) * v * s.phi(w)),
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            out[l] = acc.value() / (2.0 * chi * self.n as f64);
        }
        Ok(out)
    }

    /// General Laplacian by its explicit formula
    /// (Delta f)(l) = 1/(2 chi_l) (1/n) sum_i
    ///     (gamma^2(w_il) phi(w_il) + gamma^2(w_li) phi(w_li)) (f_l - f_i),
    /// an independent code path from `adjoint(difference(f))`.
    pub fn laplacian_general(&self, s: &GraphStructure, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        let mut out = vec![0.0; self.n];
        for l in 0..self.n {
            let chi = s.chi(self.deg_out[l], self.deg_in[l]);
            if chi <= 0.0 {
                return Err(Error::ZeroChi(l));
            }
            let mut acc = KahanSum::new();
            self.for_each_in_edge(l, |i, w| {
                let g = s.gamma(w);
                acc.add(g * g * s.phi(w) * (f[l] - f[i]));
            });
            self.for_each_out_edge(l, |j, w| {
                let g = s.gamma(w);
                acc.add(g * g * s.phi(w) * (f[l] - f[j]));
            });
            out[l] = acc.value() / (2.0 * chi * self.n as f64);
        }
        Ok(out)
    }

    /// (Delta^rw f)(i) = f_i - (1/(n d_i)) sum_j w_ij f_j.
    pub fn laplacian_rw(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        self.require_symmetric()?;
        self.require_positive_degrees()?;
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = KahanSum::new();
            self.for_each_out_edge(i, |j, w| acc.add(w * f[j]));
            out[i] = f[i] - acc.value() / (self.n as f64 * self.deg_out[i]);
        }
        Ok(out)
    }

    /// (Delta^u f)(i) = d_i f_i - (1/n) sum_j w_ij f_j.
    pub fn laplacian_unnorm(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        self.require_symmetric()?;
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = KahanSum::new();
            self.for_each_out_edge(i, |j, w| acc.add(w * f[j]));
            out[i] = self.deg_out[i] * f[i] - acc.value() / self.n as f64;
        }
        Ok(out)
    }

    /// (Delta^n f)(l) = f_l - (1/n) sum_i f_i w_il / sqrt(d_l d_i).
    pub fn laplacian_norm(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        self.require_symmetric()?;
        self.require_positive_degrees()?;
        let mut out = vec![0.0; self.n];
        for l in 0..self.n {
            let mut acc = KahanSum::new();
            self.for_each_in_edge(l, |i, w| acc.add(f[i] * w / (self.deg_out[l] * self.deg_out[i]).sqrt()));
            out[l] = f[l] - acc.value() / self.n as f64;
        }
        Ok(out)
    }

    pub fn laplacian(&self, kind: LaplacianKind, f: &[f64]) -> Result<Vec<f64>> {
        match kind {
            LaplacianKind::RandomWalk => self.laplacian_rw(f),
            LaplacianKind::Unnormalized => self.laplacian_unnorm(f),
            LaplacianKind::Normalized => self.laplacian_norm(f),
        }
    }
}
