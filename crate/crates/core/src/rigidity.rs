//! Hypercube structure detection and distances to the canonical weighted cube.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{cd_check, curvature};
use crate::graph::{cube_label_id, hypercube, WeightedGraph};
use crate::spectral::{gap_deficit, spectrum, SpectralData};

/// Largest vertex count for the brute-force Frobenius search.
pub const EXACT_FROBENIUS_LIMIT: usize = 8;

/// Deficits at or below this count as the exact-rigidity case.
pub const RIGID_DEFICIT: f64 = 1e-9;

/// A combinatorial isomorphism onto `{0,1}^d`; `labels[x]` is the bit label of vertex `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypercubeLabeling {
    pub dimension: usize,
    pub labels: Vec<u32>,
}

impl HypercubeLabeling {
    /// Identifier → bitstring, in stable identifier order.
    pub fn to_map(&self, g: &WeightedGraph) -> BTreeMap<String, String> {
        self.labels
            .iter()
            .enumerate()
            .map(|(x, &l)| (g.id(x).to_string(), cube_label_id(l, self.dimension)))
            .collect()
    }

    /// Checks bijectivity onto `{0,1}^d` and the one-bit edge predicate.
    pub fn is_valid_for(&self, g: &WeightedGraph) -> bool {
        let d = self.dimension;
        if d == 0 || d > 31 || g.len() != 1 << d || self.labels.len() != g.len() {
            return false;
        }
        let mut seen = vec![false; g.len()];
        for &l in &self.labels {
            if l as usize >= g.len() || std::mem::replace(&mut seen[l as usize], true) {
                return false;
            }
        }
        (0..g.len()).all(|x| {
            g.degree(x) == d
                && g.neighbors(x)
                    .iter()
                    .all(|&(y, _)| (self.labels[x] ^ self.labels[y]).count_ones() == 1)
        })
    }
}

/// Finds a labeling of the combinatorial structure by `{0,1}^d`, if one exists.
///
/// The first vertex gets label 0 and its neighbors the unit labels in stable
/// order; every later vertex takes the bitwise OR of the labels of two
/// neighbors one layer closer. The full edge predicate is verified at the end.
pub fn detect_hypercube(g: &WeightedGraph) -> Option<HypercubeLabeling> {
    let n = g.len();
    if n < 2 || !n.is_power_of_two() {
        return None;
    }
    let d = n.trailing_zeros() as usize;
    if (0..n).any(|x| g.degree(x) != d) {
        return None;
    }
    let dist = g.distances_from(0).ok()?;
    let mut labels: Vec<Option<u32>> = vec![None; n];
    labels[0] = Some(0);
    for (i, &(y, _)) in g.neighbors(0).iter().enumerate() {
        labels[y] = Some(1 << i);
    }
    let mut order: Vec<usize> = (0..n).filter(|&x| dist[x] >= 2).collect();
    order.sort_by_key(|&x| (dist[x], x));
    for x in order {
        let mut below = g
            .neighbors(x)
            .iter()
            .filter(|&&(y, _)| dist[y] + 1 == dist[x])
            .map(|&(y, _)| labels[y]);
        let a = below.next()??;
        let b = below.next()??;
        let label = a | b;
        if label.count_ones() as usize != dist[x] {
            return None;
        }
        labels[x] = Some(label);
    }
    let labeling =
        HypercubeLabeling { dimension: d, labels: labels.into_iter().collect::<Option<_>>()? };
    labeling.is_valid_for(g).then_some(labeling)
}

fn permute_bits(label: u32, perm: &[usize]) -> u32 {
    perm.iter()
        .enumerate()
        .fold(0, |acc, (i, &p)| acc | (((label >> i) & 1) << p))
}

/// All `2^d · d!` isomorphisms onto `{0,1}^d`, each as a vertex → label map:
/// coordinate permutations (outer, lexicographic) composed with bit
/// translations (inner, ascending).
pub fn enumerate_isomorphisms(labeling: &HypercubeLabeling) -> impl Iterator<Item = Vec<u32>> + '_ {
    let d = labeling.dimension;
    (0..d).permutations(d).flat_map(move |perm| {
        (0..1u32 << d).map(move |t| {
            labeling.labels.iter().map(|&l| permute_bits(l, &perm) ^ t).collect()
        })
    })
}

/// How a Frobenius distance was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrobeniusMethod {
    /// Minimum over every vertex permutation.
    Exact,
    /// Minimum over combinatorial isomorphisms only; an upper bound.
    IsomorphismRestricted,
}

impl FrobeniusMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            FrobeniusMethod::Exact => "exact",
            FrobeniusMethod::IsomorphismRestricted => "isomorphism-restricted",
        }
    }
}

/// Edge-degree matrix padded with isolated vertices up to `n`.
fn padded_matrix(g: &WeightedGraph, n: usize) -> Vec<f64> {
    let a = g.edge_degree_matrix();
    let k = g.len();
    let mut out = vec![0.0; n * n];
    for i in 0..k {
        out[i * n..i * n + k].copy_from_slice(&a[i * k..(i + 1) * k]);
    }
    out
}

/// `Σ_{i,j} (A_G[i][j] - A_H[π(i)][π(j)])²`.
fn permuted_cost(a_g: &[f64], a_h: &[f64], n: usize, pi: &[usize]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let diff = a_g[i * n + j] - a_h[pi[i] * n + pi[j]];
            s += diff * diff;
        }
    }
    s
}

/// Minimum over all vertex permutations, padding the smaller graph with
/// isolated vertices. Limited to [`EXACT_FROBENIUS_LIMIT`] vertices.
pub fn frobenius_distance_exact(g: &WeightedGraph, h: &WeightedGraph) -> Result<f64> {
    let n = g.len().max(h.len());
    if n > EXACT_FROBENIUS_LIMIT {
        return Err(Error::TooLargeForExact { got: n, limit: EXACT_FROBENIUS_LIMIT });
    }
    let a_g = padded_matrix(g, n);
    let a_h = padded_matrix(h, n);
    // Heap's algorithm over π.
    let mut pi: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let mut best = permuted_cost(&a_g, &a_h, n, &pi);
    let mut i = 1;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                pi.swap(0, i);
            } else {
                pi.swap(counters[i], i);
            }
            best = best.min(permuted_cost(&a_g, &a_h, n, &pi));
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(best.sqrt())
}

/// Above this many isomorphisms only the detected labeling is evaluated.
pub const ISOMORPHISM_ENUMERATION_LIMIT: usize = 50_000;

/// Minimum of `‖A_G^π - A_H‖_F` over combinatorial isomorphisms `π` onto
/// `H_d(K/2)`. Every such `π` sends edges to edges of a graph with a single
/// edge degree, so all of them give the same value; beyond
/// [`ISOMORPHISM_ENUMERATION_LIMIT`] the value at `labeling` is returned.
pub fn frobenius_distance_isomorphisms(
    g: &WeightedGraph,
    labeling: &HypercubeLabeling,
    k: f64,
) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::NonpositiveK(k));
    }
    if !labeling.is_valid_for(g) {
        return Err(Error::NotAHypercube);
    }
    let d = labeling.dimension;
    let a_g = g.edge_degree_matrix();
    let cube = hypercube(d, k / 2.0)?;
    let n = g.len();
    let cost = |labels: &[u32]| -> f64 {
        let pi: Vec<usize> = labels.iter().map(|&l| l as usize).collect();
        let mut inv = vec![0; n];
        for (x, &p) in pi.iter().enumerate() {
            inv[p] = x;
        }
        let mut s = 0.0;
        for x in 0..n {
            for &(y, _) in g.neighbors(x) {
                let diff = a_g[x * n + y] - cube.weight(pi[x], pi[y]);
                s += diff * diff;
            }
        }
        for a in 0..n {
            for &(b, w) in cube.neighbors(a) {
                if g.weight(inv[a], inv[b]) == 0.0 {
                    s += w * w;
                }
            }
        }
        s
    };
    let count = (1..=d).product::<usize>().saturating_mul(n);
    let best = if count <= ISOMORPHISM_ENUMERATION_LIMIT {
        enumerate_isomorphisms(labeling).map(|l| cost(&l)).fold(f64::INFINITY, f64::min)
    } else {
        cost(&labeling.labels)
    };
    Ok(best.sqrt())
}

/// Distance to `H_d(K/2)`: exact for at most [`EXACT_FROBENIUS_LIMIT`]
/// vertices, isomorphism-restricted above that.
pub fn frobenius_distance_to_cube(g: &WeightedGraph, k: f64) -> Result<(f64, FrobeniusMethod)> {
    if !(k > 0.0) {
        return Err(Error::NonpositiveK(k));
    }
    let labeling = detect_hypercube(g).ok_or(Error::NotAHypercube)?;
    if g.len() <= EXACT_FROBENIUS_LIMIT {
        let cube = hypercube(labeling.dimension, k / 2.0)?;
        Ok((frobenius_distance_exact(g, &cube)?, FrobeniusMethod::Exact))
    } else {
        Ok((frobenius_distance_isomorphisms(g, &labeling, k)?, FrobeniusMethod::IsomorphismRestricted))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BonnetMyersCheck {
    pub passes: bool,
    pub diameter: usize,
    pub bound: f64,
    /// Whether `CD(K, ∞)` holds, i.e. whether the diameter bound is guaranteed.
    pub cd_holds: bool,
}

/// `diam(G) ≤ 2 Deg_max / K`.
pub fn bonnet_myers_check(g: &WeightedGraph, k: f64) -> Result<BonnetMyersCheck> {
    if !(k > 0.0) {
        return Err(Error::NonpositiveK(k));
    }
    let diameter = g.diameter();
    let bound = 2.0 * g.max_weighted_degree() / k;
    Ok(BonnetMyersCheck {
        passes: diameter as f64 <= bound,
        diameter,
        bound,
        cd_holds: cd_check(g, k, f64::INFINITY)?.holds,
    })
}

/// Everything measured about closeness of `G` to `H_d(K/2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityReport {
    pub is_hypercube: bool,
    pub labeling: Option<BTreeMap<String, String>>,
    #[serde(rename = "K")]
    pub k: f64,
    pub d: usize,
    pub deg_max: usize,
    pub dimension_matches: bool,
    pub cd_holds: bool,
    /// Sharp curvature constant `min_x K*(x)`.
    pub curvature_estimate: f64,
    pub lambda_d: f64,
    pub deficit: f64,
    /// `deficit ≤ RIGID_DEFICIT`; the ratio is then not formed.
    pub exact_rigidity: bool,
    pub frobenius_distance: Option<f64>,
    pub frobenius_method: Option<FrobeniusMethod>,
    pub min_edge_weight: f64,
    pub diameter: usize,
    pub diameter_bound: f64,
    /// `frobenius_distance / √deficit`.
    pub ratio: Option<f64>,
}

pub fn almost_rigidity_report(g: &WeightedGraph, k: f64, d: usize) -> Result<RigidityReport> {
    let spec = spectrum(g);
    almost_rigidity_report_with(g, &spec, k, d)
}

pub fn almost_rigidity_report_with(
    g: &WeightedGraph,
    spec: &SpectralData,
    k: f64,
    d: usize,
) -> Result<RigidityReport> {
    spec.check_graph(g)?;
    let lambda_d = spec.eigenvalues.get(d).copied().ok_or(Error::IndexOutOfRange { index: d, len: spec.len() })?;
    let deficit = gap_deficit(spec, k, d)?;
    let labeling = detect_hypercube(g);
    let frobenius = match &labeling {
        Some(_) if k > 0.0 => Some(frobenius_distance_to_cube(g, k)?),
        _ => None,
    };
    let exact_rigidity = deficit <= RIGID_DEFICIT;
    let ratio = match frobenius {
        Some((dist, _)) if !exact_rigidity => Some(dist / deficit.sqrt()),
        _ => None,
    };
    let deg_max = g.max_degree();
    Ok(RigidityReport {
        is_hypercube: labeling.is_some(),
        labeling: labeling.as_ref().map(|l| l.to_map(g)),
        k,
        d,
        deg_max,
        dimension_matches: deg_max == d,
        cd_holds: cd_check(g, k, f64::INFINITY)?.holds,
        curvature_estimate: curvature(g, f64::INFINITY)?.0,
        lambda_d,
        deficit,
        exact_rigidity,
        frobenius_distance: frobenius.map(|f| f.0),
        frobenius_method: frobenius.map(|f| f.1),
        min_edge_weight: g.min_edge_weight(),
        diameter: g.diameter(),
        diameter_bound: if k > 0.0 { 2.0 * g.max_weighted_degree() / k } else { f64::INFINITY },
        ratio,
    })
}
