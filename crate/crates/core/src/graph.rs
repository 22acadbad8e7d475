//! Finite weighted graphs `(V, w, m)` and their combinatorial structure.
//!
//! Vertices carry opaque string identifiers. Internally every vertex is an
//! index into the lexicographically sorted identifier list, so all vertex
//! functions are plain `&[f64]` slices in that stable order.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard upper bound on the number of vertices (a 12-dimensional cube).
pub const MAX_VERTICES: usize = 4096;

/// Environment variable that may lower [`MAX_VERTICES`].
pub const MAX_VERTICES_ENV: &str = "CUBE_RIGIDITY_MAX_VERTICES";

/// Effective vertex cap: [`MAX_VERTICES`], lowered by `CUBE_RIGIDITY_MAX_VERTICES`
/// when that variable holds a smaller positive integer.
pub fn vertex_limit() -> usize {
    std::env::var(MAX_VERTICES_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .map_or(MAX_VERTICES, |v| v.min(MAX_VERTICES))
}

/// A connected weighted graph with positive vertex measure and symmetric
/// positive edge weights. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    measure: Vec<f64>,
    /// Sorted adjacency lists `(neighbor, w)`.
    neighbors: Vec<Vec<(usize, f64)>>,
    /// Factor by which input weights and measures were multiplied.
    measure_scale: f64,
}

/// `(u, v, w)` by identifier.
pub type Edge = (String, String, f64);

/// Inner, outer and spherical edge-degree mass of a vertex relative to a base point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionalDegrees {
    pub plus: f64,
    pub minus: f64,
    pub zero: f64,
}

/// Which measure condition decides class membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureBound {
    /// `1/δ ≤ m(x) ≤ δ` for every vertex.
    #[default]
    TwoSided,
    /// `m(x)/m(y) ≤ δ` for every edge.
    EdgeRatio,
}

/// Measured quantities behind membership in the class of graphs with
/// bounded weighted degree, fixed combinatorial degree and bounded measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMembership {
    pub deg_max: usize,
    #[serde(rename = "Deg_max")]
    pub weighted_deg_max: f64,
    /// Smallest δ with `1/δ ≤ m ≤ δ`.
    pub measure_ratio_bound: f64,
    /// Largest `m(x)/m(y)` over edges.
    pub edge_measure_ratio: f64,
    pub min_edge_weight: f64,
    pub measure_bound: MeasureBound,
    pub in_class: bool,
}

impl WeightedGraph {
    /// Validates and builds a graph from `(id, m)` vertices and undirected
    /// `(u, v, w)` edges (each pair listed once).
    ///
    /// With `normalize_measure`, weights and measures are jointly rescaled so the
    /// vertex of smallest index among those with minimal `|m - 1|` gets `m = 1`;
    /// edge degrees, the Laplacian and curvature are unchanged by this.
    pub fn build(
        vertices: Vec<(String, f64)>,
        edges: Vec<Edge>,
        normalize_measure: bool,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let limit = vertex_limit();
        if vertices.len() > limit {
            return Err(Error::TooManyVertices { got: vertices.len(), limit });
        }
        let mut vertices = vertices;
        vertices.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in vertices.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateVertex(pair[0].0.clone()));
            }
        }
        for (id, m) in &vertices {
            if !(m.is_finite() && *m > 0.0) {
                return Err(Error::NonpositiveMeasure(id.clone()));
            }
        }
        let (ids, measure): (Vec<String>, Vec<f64>) = vertices.into_iter().unzip();
        let index: HashMap<String, usize> =
            ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();

        let mut neighbors = vec![Vec::new(); ids.len()];
        let mut seen = HashSet::new();
        for (u, v, w) in edges {
            let i = *index.get(&u).ok_or_else(|| Error::UnknownVertex(u.clone()))?;
            let j = *index.get(&v).ok_or_else(|| Error::UnknownVertex(v.clone()))?;
            if i == j {
                return Err(Error::SelfLoop(u));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::NegativeWeight(u, v));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::DuplicateEdge(u, v));
            }
            neighbors[i].push((j, w));
            neighbors[j].push((i, w));
        }
        let graph = Self::from_parts(ids, index, measure, neighbors, 1.0);
        if !graph.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        Ok(if normalize_measure { graph.normalized() } else { graph })
    }

    fn from_parts(
        ids: Vec<String>,
        index: HashMap<String, usize>,
        measure: Vec<f64>,
        mut neighbors: Vec<Vec<(usize, f64)>>,
        measure_scale: f64,
    ) -> Self {
        for list in &mut neighbors {
            list.sort_by_key(|&(j, _)| j);
        }
        Self { ids, index, measure, neighbors, measure_scale }
    }

    /// Builds from already index-sorted parts; `edges` use indices into `ids`.
    fn from_sorted(ids: Vec<String>, measure: Vec<f64>, edges: &[(usize, usize, f64)]) -> Self {
        let index = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let mut neighbors = vec![Vec::new(); ids.len()];
        for &(i, j, w) in edges {
            neighbors[i].push((j, w));
            neighbors[j].push((i, w));
        }
        Self::from_parts(ids, index, measure, neighbors, 1.0)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, x: usize) -> &str {
        &self.ids[x]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub(crate) fn check_vertex(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!("#{x}")))
        }
    }

    pub(crate) fn check_function(&self, f: &[f64]) -> Result<()> {
        if f.len() == self.len() {
            Ok(())
        } else {
            Err(Error::DomainMismatch { expected: self.len(), got: f.len() })
        }
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn measure_at(&self, x: usize) -> f64 {
        self.measure[x]
    }

    /// Factor applied to the input weights and measures (1 unless normalized).
    pub fn measure_scale(&self) -> f64 {
        self.measure_scale
    }

    /// Vertex of smallest index among those with minimal `|m - 1|`.
    pub fn normalization_vertex(&self) -> usize {
        let mut best = 0;
        for x in 1..self.len() {
            if (self.measure[x] - 1.0).abs() < (self.measure[best] - 1.0).abs() {
                best = x;
            }
        }
        best
    }

    /// Factor that would bring [`Self::normalization_vertex`] to unit measure.
    pub fn normalization_factor(&self) -> f64 {
        1.0 / self.measure[self.normalization_vertex()]
    }

    /// Joint rescaling `(w, m) → (w, m) / m(x*)` so that `m(x*) = 1` exactly.
    pub fn normalized(&self) -> Self {
        let pivot = self.measure[self.normalization_vertex()];
        let mut out = self.clone();
        if pivot == 1.0 {
            return out;
        }
        out.measure.iter_mut().for_each(|m| *m /= pivot);
        for list in &mut out.neighbors {
            list.iter_mut().for_each(|(_, w)| *w /= pivot);
        }
        out.measure_scale = self.measure_scale / pivot;
        out
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.neighbors[x]
    }

    /// `w(x, y)`, zero when `x` and `y` are not adjacent.
    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.neighbors[x]
            .binary_search_by_key(&y, |&(j, _)| j)
            .map_or(0.0, |k| self.neighbors[x][k].1)
    }

    /// Undirected edges `(i, j, w)` with `i < j`, in stable order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (i, list) in self.neighbors.iter().enumerate() {
            out.extend(list.iter().filter(|&&(j, _)| j > i).map(|&(j, w)| (i, j, w)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Vertices and edges by identifier, suitable for [`Self::build`].
    pub fn to_parts(&self) -> (Vec<(String, f64)>, Vec<Edge>) {
        let vertices = self.ids.iter().cloned().zip(self.measure.iter().copied()).collect();
        let edges = self
            .edges()
            .into_iter()
            .map(|(i, j, w)| (self.ids[i].clone(), self.ids[j].clone(), w))
            .collect();
        (vertices, edges)
    }

    /// Combinatorial degree.
    pub fn degree(&self, x: usize) -> usize {
        self.neighbors[x].len()
    }

    /// `Deg(x) = (1/m(x)) Σ_y w(x, y)`.
    pub fn weighted_degree(&self, x: usize) -> f64 {
        self.neighbors[x].iter().map(|&(_, w)| w).sum::<f64>() / self.measure[x]
    }

    pub fn degrees(&self, x: usize) -> (usize, f64) {
        (self.degree(x), self.weighted_degree(x))
    }

    /// Oriented edge degree `q(x, y) = w(x, y) / m(x)`.
    pub fn edge_degree(&self, x: usize, y: usize) -> Result<f64> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        let w = self.weight(x, y);
        if w > 0.0 {
            Ok(w / self.measure[x])
        } else {
            Err(Error::NotAnEdge(self.ids[x].clone(), self.ids[y].clone()))
        }
    }

    pub fn max_degree(&self) -> usize {
        (0..self.len()).map(|x| self.degree(x)).max().unwrap_or(0)
    }

    pub fn max_weighted_degree(&self) -> f64 {
        (0..self.len()).map(|x| self.weighted_degree(x)).fold(0.0, f64::max)
    }

    /// Smallest positive edge weight; `+∞` for an edgeless single vertex.
    pub fn min_edge_weight(&self) -> f64 {
        self.neighbors.iter().flatten().map(|&(_, w)| w).fold(f64::INFINITY, f64::min)
    }

    /// Row-major `n × n` matrix with `q(x, y)` on edges and zero elsewhere.
    pub fn edge_degree_matrix(&self) -> Vec<f64> {
        let n = self.len();
        let mut a = vec![0.0; n * n];
        for (x, list) in self.neighbors.iter().enumerate() {
            for &(y, w) in list {
                a[x * n + y] = w / self.measure[x];
            }
        }
        a
    }

    fn is_connected(&self) -> bool {
        self.bfs(0).iter().all(|&d| d != usize::MAX)
    }

    fn bfs(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.neighbors[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Combinatorial distance from `x0` to every vertex.
    pub fn distances_from(&self, x0: usize) -> Result<Vec<usize>> {
        self.check_vertex(x0)?;
        Ok(self.bfs(x0))
    }

    /// `S_k(x)` in stable order.
    pub fn sphere(&self, x: usize, k: usize) -> Result<Vec<usize>> {
        let dist = self.distances_from(x)?;
        Ok((0..self.len()).filter(|&y| dist[y] == k).collect())
    }

    /// `B_k(x)` in stable order.
    pub fn ball(&self, x: usize, k: usize) -> Result<Vec<usize>> {
        let dist = self.distances_from(x)?;
        Ok((0..self.len()).filter(|&y| dist[y] <= k).collect())
    }

    pub fn diameter(&self) -> usize {
        (0..self.len()).map(|x| self.bfs(x).into_iter().max().unwrap_or(0)).max().unwrap_or(0)
    }

    /// Edge-degree mass at `z` toward (`minus`), away from (`plus`) and
    /// parallel to (`zero`) the spheres about `x0`.
    pub fn directional_degrees(&self, x0: usize, z: usize) -> Result<DirectionalDegrees> {
        self.check_vertex(z)?;
        let dist = self.distances_from(x0)?;
        Ok(self.directional_degrees_from(&dist, z))
    }

    pub(crate) fn directional_degrees_from(&self, dist: &[usize], z: usize) -> DirectionalDegrees {
        let (mut plus, mut minus, mut zero) = (0.0, 0.0, 0.0);
        for &(y, w) in &self.neighbors[z] {
            match dist[y].cmp(&dist[z]) {
                std::cmp::Ordering::Greater => plus += w,
                std::cmp::Ordering::Less => minus += w,
                std::cmp::Ordering::Equal => zero += w,
            }
        }
        let m = self.measure[z];
        DirectionalDegrees { plus: plus / m, minus: minus / m, zero: zero / m }
    }

    /// Multiplicative uniform noise: every undirected edge weight is scaled by
    /// an independent factor in `[1 - sigma_w, 1 + sigma_w]`, every measure by
    /// one in `[1 - sigma_m, 1 + sigma_m]`. Edge draws come first (stable edge
    /// order), then vertex draws. When `sigma_m > 0` the result is jointly
    /// renormalized so one vertex has unit measure.
    pub fn perturb(&self, sigma_w: f64, sigma_m: f64, seed: u64) -> Result<Self> {
        for (name, s) in [("sigma_w", sigma_w), ("sigma_m", sigma_m)] {
            if !(0.0..1.0).contains(&s) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1), got {s}")));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut factor = |sigma: f64| {
            let u: f64 = rng.gen();
            1.0 + sigma * (2.0 * u - 1.0)
        };
        let edges: Vec<_> =
            self.edges().into_iter().map(|(i, j, w)| (i, j, w * factor(sigma_w))).collect();
        let measure: Vec<f64> = self.measure.iter().map(|&m| m * factor(sigma_m)).collect();
        let mut out = Self::from_sorted(self.ids.clone(), measure, &edges);
        out.measure_scale = self.measure_scale;
        Ok(if sigma_m > 0.0 { out.normalized() } else { out })
    }

    /// Reports the class quantities and whether the graph has
    /// `deg_max = d`, `Deg_max ≤ D` and the chosen measure bound `≤ δ`.
    pub fn class_membership(
        &self,
        max_weighted_degree: f64,
        d: usize,
        delta: f64,
        bound: MeasureBound,
    ) -> Result<ClassMembership> {
        if !(max_weighted_degree > 0.0) || !(delta > 1.0) || d == 0 {
            return Err(Error::InvalidParameter(format!(
                "class parameters need D > 0, delta > 1, d >= 1 (got D={max_weighted_degree}, d={d}, delta={delta})"
            )));
        }
        let deg_max = self.max_degree();
        let weighted_deg_max = self.max_weighted_degree();
        let measure_ratio_bound = self
            .measure
            .iter()
            .map(|&m| m.max(1.0 / m))
            .fold(1.0, f64::max);
        let edge_measure_ratio = self
            .edges()
            .iter()
            .map(|&(i, j, _)| {
                let r = self.measure[i] / self.measure[j];
                r.max(1.0 / r)
            })
            .fold(1.0, f64::max);
        let measure_ok = match bound {
            MeasureBound::TwoSided => measure_ratio_bound <= delta,
            MeasureBound::EdgeRatio => edge_measure_ratio <= delta,
        };
        Ok(ClassMembership {
            deg_max,
            weighted_deg_max,
            measure_ratio_bound,
            edge_measure_ratio,
            min_edge_weight: self.min_edge_weight(),
            measure_bound: bound,
            in_class: deg_max == d && weighted_deg_max <= max_weighted_degree && measure_ok,
        })
    }
}

/// Bitstring identifier of a hypercube vertex; character `i` holds bit `d-1-i`,
/// so lexicographic order agrees with numeric order of labels.
pub fn cube_label_id(label: u32, d: usize) -> String {
    (0..d).map(|i| if label >> (d - 1 - i) & 1 == 1 { '1' } else { '0' }).collect()
}

/// `H_d(c)`: the `d`-cube with unit measure and every edge degree equal to `c`.
pub fn hypercube(d: usize, c: f64) -> Result<WeightedGraph> {
    if d == 0 || d > 31 {
        return Err(Error::InvalidParameter(format!("dimension must be in 1..=31, got {d}")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(format!("edge degree must be positive, got {c}")));
    }
    let n = 1usize << d;
    let limit = vertex_limit();
    if n > limit {
        return Err(Error::TooManyVertices { got: n, limit });
    }
    let ids = (0..n as u32).map(|l| cube_label_id(l, d)).collect();
    let mut edges = Vec::with_capacity(d * n / 2);
    for x in 0..n {
        for bit in 0..d {
            let y = x ^ (1 << bit);
            if x < y {
                edges.push((x, y, c));
            }
        }
    }
    Ok(WeightedGraph::from_sorted(ids, vec![1.0; n], &edges))
}

/// Cartesian product of two unit-measure graphs. Vertex `(u, v)` gets the
/// identifier `"u,v"`.
pub fn cartesian_product(g1: &WeightedGraph, g2: &WeightedGraph) -> Result<WeightedGraph> {
    if g1.measure.iter().chain(&g2.measure).any(|&m| m != 1.0) {
        return Err(Error::NonUnitMeasure);
    }
    let (n1, n2) = (g1.len(), g2.len());
    let limit = vertex_limit();
    if n1 * n2 > limit {
        return Err(Error::TooManyVertices { got: n1 * n2, limit });
    }
    let pair = |u: usize, v: usize| u * n2 + v;
    let vertices = (0..n1)
        .flat_map(|u| (0..n2).map(move |v| (u, v)))
        .map(|(u, v)| (format!("{},{}", g1.ids[u], g2.ids[v]), 1.0))
        .collect();
    let mut edges = Vec::new();
    for (u1, u2, w) in g1.edges() {
        for v in 0..n2 {
            edges.push((pair(u1, v), pair(u2, v), w));
        }
    }
    for (v1, v2, w) in g2.edges() {
        for u in 0..n1 {
            edges.push((pair(u, v1), pair(u, v2), w));
        }
    }
    let vertices: Vec<(String, f64)> = vertices;
    let edges = edges
        .into_iter()
        .map(|(a, b, w)| (vertices[a].0.clone(), vertices[b].0.clone(), w))
        .collect();
    WeightedGraph::build(vertices, edges, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> WeightedGraph {
        WeightedGraph::build(
            vec![("u".into(), 1.0), ("v".into(), 1.0)],
            vec![("u".into(), "v".into(), 1.0)],
            false,
        )
        .unwrap()
    }

    fn path3() -> WeightedGraph {
        WeightedGraph::build(
            vec![("a".into(), 1.0), ("b".into(), 1.0), ("c".into(), 1.0)],
            vec![("a".into(), "b".into(), 1.0), ("b".into(), "c".into(), 1.0)],
            false,
        )
        .unwrap()
    }

    #[test]
    fn build_rejects_bad_input() {
        let two = || vec![("u".to_string(), 1.0), ("v".to_string(), 1.0)];
        assert_eq!(WeightedGraph::build(two(), vec![], false), Err(Error::DisconnectedGraph));
        assert_eq!(
            WeightedGraph::build(two(), vec![("u".into(), "u".into(), 1.0)], false),
            Err(Error::SelfLoop("u".into()))
        );
        assert!(matches!(
            WeightedGraph::build(two(), vec![("u".into(), "v".into(), -1.0)], false),
            Err(Error::NegativeWeight(..))
        ));
        assert!(matches!(
            WeightedGraph::build(
                two(),
                vec![("u".into(), "v".into(), 1.0), ("v".into(), "u".into(), 2.0)],
                false
            ),
            Err(Error::DuplicateEdge(..))
        ));
        assert!(matches!(
            WeightedGraph::build(
                vec![("u".into(), 0.0), ("v".into(), 1.0)],
                vec![("u".into(), "v".into(), 1.0)],
                false
            ),
            Err(Error::NonpositiveMeasure(_))
        ));
        assert!(matches!(
            WeightedGraph::build(two(), vec![("u".into(), "w".into(), 1.0)], false),
            Err(Error::UnknownVertex(_))
        ));
        assert_eq!(WeightedGraph::build(vec![], vec![], false), Err(Error::EmptyGraph));
    }

    #[test]
    fn k2_is_valid() {
        let g = k2();
        assert_eq!(g.len(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.distances_from(0).unwrap(), vec![0, 1]);
    }

    #[test]
    fn normalization_is_joint_and_recorded() {
        let vertices = vec![("a".to_string(), 2.0), ("b".to_string(), 4.0), ("c".to_string(), 0.5)];
        let edges = vec![("a".to_string(), "b".to_string(), 3.0), ("b".to_string(), "c".to_string(), 1.0)];
        let raw = WeightedGraph::build(vertices.clone(), edges.clone(), false).unwrap();
        assert_eq!(raw.measure_scale(), 1.0);
        // |m - 1| is 1, 3, 0.5: "c" is the pivot.
        assert_eq!(raw.normalization_vertex(), 2);
        assert_eq!(raw.normalization_factor(), 2.0);
        let g = WeightedGraph::build(vertices, edges, true).unwrap();
        assert_eq!(g.measure(), &[4.0, 8.0, 1.0]);
        assert_eq!(g.weight(0, 1), 6.0);
        assert_eq!(g.measure_scale(), 2.0);
        for x in 0..3 {
            assert_eq!(g.weighted_degree(x), raw.weighted_degree(x));
        }
    }

    #[test]
    fn hypercube_combinatorics() {
        let g = hypercube(1, 1.0).unwrap();
        assert_eq!(g.ids(), &["0", "1"]);
        assert_eq!(g.weight(0, 1), 1.0);

        let g = hypercube(3, 1.0).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.edge_count(), 12);
        assert!((0..8).all(|x| g.degree(x) == 3));
        for d in 1..=6 {
            let g = hypercube(d, 0.3).unwrap();
            assert_eq!(g.edge_count(), d << (d - 1));
            assert_eq!(g.diameter(), d);
            for x in 0..g.len() {
                assert_eq!(g.degree(x), d);
                assert!((g.weighted_degree(x) - d as f64 * 0.3).abs() < 1e-15);
                for &(y, _) in g.neighbors(x) {
                    assert_eq!(g.edge_degree(x, y).unwrap(), 0.3);
                }
            }
        }
        assert!(hypercube(0, 1.0).is_err());
        assert!(hypercube(2, 0.0).is_err());
        assert!(matches!(hypercube(13, 1.0), Err(Error::TooManyVertices { .. })));
    }

    #[test]
    fn spheres_balls_and_distances() {
        let g = hypercube(3, 1.0).unwrap();
        let x = g.index_of("000").unwrap();
        let s1: Vec<&str> = g.sphere(x, 1).unwrap().into_iter().map(|y| g.id(y)).collect();
        assert_eq!(s1, vec!["001", "010", "100"]);
        assert_eq!(g.ball(x, 0).unwrap(), vec![x]);
        assert_eq!(g.distances_from(x).unwrap()[g.index_of("111").unwrap()], 3);
        assert!(matches!(g.distances_from(99), Err(Error::UnknownVertex(_))));
        for a in 0..8 {
            let da = g.distances_from(a).unwrap();
            for (b, &dab) in da.iter().enumerate() {
                assert_eq!(dab, g.distances_from(b).unwrap()[a]);
                assert_eq!(dab, (a ^ b).count_ones() as usize);
            }
        }
    }

    #[test]
    fn oriented_edge_degree() {
        let g = WeightedGraph::build(
            vec![("x".into(), 2.0), ("y".into(), 1.0)],
            vec![("x".into(), "y".into(), 1.0)],
            false,
        )
        .unwrap();
        assert_eq!(g.edge_degree(0, 1).unwrap(), 0.5);
        assert_eq!(g.edge_degree(1, 0).unwrap(), 1.0);
        assert!(matches!(path3().edge_degree(0, 2), Err(Error::NotAnEdge(..))));
    }

    #[test]
    fn directional_degrees_on_cubes() {
        // d_minus(z) = c * dist(z, x0), checked against explicit back-edge counts.
        for d in 1..=4 {
            let c = 0.75;
            let g = hypercube(d, c).unwrap();
            for x0 in 0..g.len() {
                for z in 0..g.len() {
                    let dd = g.directional_degrees(x0, z).unwrap();
                    let dist = (x0 ^ z).count_ones() as usize;
                    let back = (0..d).filter(|b| ((x0 ^ z) >> b) & 1 == 1).count();
                    assert_eq!(back, dist);
                    assert_eq!(dd.zero, 0.0);
                    assert_eq!(dd.minus, c * back as f64);
                    assert_eq!(dd.plus + dd.zero + dd.minus, g.weighted_degree(z));
                }
                let at_base = g.directional_degrees(x0, x0).unwrap();
                assert_eq!((at_base.minus, at_base.zero), (0.0, 0.0));
                assert_eq!(at_base.plus, g.weighted_degree(x0));
            }
        }
    }

    #[test]
    fn product_basics() {
        let q2 = cartesian_product(&k2(), &k2()).unwrap();
        assert_eq!(q2.len(), 4);
        assert_eq!(q2.edge_count(), 4);
        assert!((0..4).all(|x| q2.degree(x) == 2));
        assert_eq!(q2.diameter(), 2);

        let single = WeightedGraph::build(vec![("o".into(), 1.0)], vec![], false).unwrap();
        let p = cartesian_product(&path3(), &single).unwrap();
        assert_eq!(p.ids(), &["a,o", "b,o", "c,o"]);
        assert_eq!(p.edges(), path3().edges());

        let heavy = WeightedGraph::build(
            vec![("u".into(), 2.0), ("v".into(), 1.0)],
            vec![("u".into(), "v".into(), 1.0)],
            false,
        )
        .unwrap();
        assert_eq!(cartesian_product(&heavy, &k2()), Err(Error::NonUnitMeasure));

        let g1 = hypercube(2, 2.0).unwrap();
        let g2 = path3();
        let p = cartesian_product(&g1, &g2).unwrap();
        for u in 0..g1.len() {
            for v in 0..g2.len() {
                let id = format!("{},{}", g1.id(u), g2.id(v));
                let x = p.index_of(&id).unwrap();
                assert_eq!(p.degree(x), g1.degree(u) + g2.degree(v));
            }
        }
    }

    #[test]
    fn perturbation_contract() {
        let g = hypercube(3, 1.0).unwrap();
        assert_eq!(g.perturb(0.0, 0.0, 7).unwrap(), g);
        assert_eq!(g.perturb(0.1, 0.1, 7).unwrap(), g.perturb(0.1, 0.1, 7).unwrap());
        assert_ne!(g.perturb(0.1, 0.0, 7).unwrap(), g.perturb(0.1, 0.0, 8).unwrap());
        let p = g.perturb(0.01, 0.0, 3).unwrap();
        assert_eq!(p.edges().len(), 12);
        for ((i, j, w), (a, b, _)) in p.edges().into_iter().zip(g.edges()) {
            assert_eq!((i, j), (a, b));
            assert!((0.99..=1.01).contains(&w));
        }
        let pm = g.perturb(0.02, 0.05, 11).unwrap();
        assert!(pm.measure().contains(&1.0));
        assert!(g.perturb(1.0, 0.0, 0).is_err());
        assert!(g.perturb(0.0, -0.1, 0).is_err());
    }

    #[test]
    fn class_membership_examples() {
        let g = hypercube(3, 1.0).unwrap();
        let c = g.class_membership(3.0, 3, 2.0, MeasureBound::TwoSided).unwrap();
        assert!(c.in_class);
        assert_eq!((c.deg_max, c.weighted_deg_max, c.min_edge_weight), (3, 3.0, 1.0));
        assert!(!g.class_membership(2.0, 3, 2.0, MeasureBound::TwoSided).unwrap().in_class);
        assert!(!g.class_membership(3.0, 2, 2.0, MeasureBound::TwoSided).unwrap().in_class);
        assert!(g.class_membership(3.0, 3, 1.0, MeasureBound::TwoSided).is_err());

        let skew = WeightedGraph::build(
            vec![("a".into(), 1.0), ("b".into(), 1.8), ("c".into(), 3.0)],
            vec![("a".into(), "b".into(), 1.0), ("b".into(), "c".into(), 1.0)],
            false,
        )
        .unwrap();
        let two = skew.class_membership(10.0, 2, 2.0, MeasureBound::TwoSided).unwrap();
        let ratio = skew.class_membership(10.0, 2, 2.0, MeasureBound::EdgeRatio).unwrap();
        assert_eq!(two.measure_ratio_bound, 3.0);
        assert!(!two.in_class);
        assert!(ratio.in_class);
    }

    #[test]
    fn vertex_limit_defaults_to_cap() {
        if std::env::var(MAX_VERTICES_ENV).is_err() {
            assert_eq!(vertex_limit(), MAX_VERTICES);
        }
    }
}
