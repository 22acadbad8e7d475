//! Eigendecomposition of `-Δ`, self-adjoint in the `m`-weighted inner product.
//!
//! The solver works on the symmetric matrix `S = M^{1/2}(-Δ)M^{-1/2}` whose
//! entries are `S_xx = Deg(x)` and `S_xy = -w(x,y)/√(m(x)m(y))`. Eigenvectors
//! are mapped back by `M^{-1/2}`, which makes them `m`-orthonormal.
//!
//! Inside a cluster of eigenvalues closer than [`CLUSTER_GAP`], the solver's
//! basis is arbitrary. It is replaced by a canonical one obtained by
//! Gram-Schmidt on the projections of vertex indicators taken in stable vertex
//! order, so repeated runs give identical eigenfunctions.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{cd_check, CdCheck};
use crate::graph::WeightedGraph;
use crate::linalg;

/// Eigenvalues closer than this are treated as one eigenspace.
pub const CLUSTER_GAP: f64 = 1e-8;

/// Eigenvalues of `-Δ` in ascending order with `m`-orthonormal eigenfunctions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub vertex_ids: Vec<String>,
    pub eigenvalues: Vec<f64>,
    /// `eigenfunctions[k][x]` is `φ_k(x)`.
    pub eigenfunctions: Vec<Vec<f64>>,
    pub measure: Vec<f64>,
}

pub fn spectrum(g: &WeightedGraph) -> SpectralData {
    let n = g.len();
    let sqrt_m: Vec<f64> = g.measure().iter().map(|m| m.sqrt()).collect();
    let mut s = DMatrix::<f64>::zeros(n, n);
    for x in 0..n {
        s[(x, x)] = g.weighted_degree(x);
        for &(y, w) in g.neighbors(x) {
            s[(x, y)] = -w / (sqrt_m[x] * sqrt_m[y]);
        }
    }
    let (mut eigenvalues, vectors) = linalg::sorted_eigen(s);
    let mut eigenfunctions: Vec<Vec<f64>> = (0..n)
        .map(|k| (0..n).map(|x| vectors[(x, k)] / sqrt_m[x]).collect())
        .collect();

    // The kernel of -Δ on a connected graph is the constants.
    let total: f64 = g.measure().iter().sum();
    eigenfunctions[0] = vec![1.0 / total.sqrt(); n];
    eigenvalues[0] = 0.0;

    let measure = g.measure().to_vec();
    for range in clusters(&eigenvalues) {
        if range.len() > 1 {
            canonicalize(&mut eigenfunctions[range], &measure);
        }
    }
    for phi in eigenfunctions.iter_mut().skip(1) {
        fix_sign(phi);
    }
    SpectralData { vertex_ids: g.ids().to_vec(), eigenvalues, eigenfunctions, measure }
}

/// Maximal runs of eigenvalues with consecutive gaps below [`CLUSTER_GAP`].
pub fn clusters(eigenvalues: &[f64]) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=eigenvalues.len() {
        if k == eigenvalues.len() || eigenvalues[k] - eigenvalues[k - 1] >= CLUSTER_GAP {
            out.push(start..k);
            start = k;
        }
    }
    out
}

fn inner_m(f: &[f64], h: &[f64], m: &[f64]) -> f64 {
    f.iter().zip(h).zip(m).map(|((a, b), w)| a * b * w).sum()
}

/// Replaces a basis of one eigenspace by the Gram-Schmidt orthonormalization
/// of the projected vertex indicators, visited in stable order.
fn canonicalize(basis: &mut [Vec<f64>], m: &[f64]) {
    let k = basis.len();
    let n = m.len();
    let keeps_constant = basis[0].iter().all(|&v| v == basis[0][0]);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(k);
    if keeps_constant {
        out.push(basis[0].clone());
    }
    for threshold in [1e-3, 1e-8] {
        for v in 0..n {
            if out.len() == k {
                break;
            }
            // P e_v = Σ_j φ_j ⟨e_v, φ_j⟩ = Σ_j φ_j φ_j(v) m(v)
            let mut cand = vec![0.0; n];
            for phi in basis.iter() {
                let c = phi[v] * m[v];
                cand.iter_mut().zip(phi).for_each(|(a, p)| *a += c * p);
            }
            for _ in 0..2 {
                for q in &out {
                    let c = inner_m(&cand, q, m);
                    cand.iter_mut().zip(q).for_each(|(a, p)| *a -= c * p);
                }
            }
            let norm = inner_m(&cand, &cand, m).sqrt();
            if norm > threshold * m[v].sqrt() {
                cand.iter_mut().for_each(|a| *a /= norm);
                out.push(cand);
            }
        }
    }
    debug_assert_eq!(out.len(), k);
    if out.len() == k {
        basis.clone_from_slice(&out);
    }
}

/// Makes the first entry that is not negligible positive.
fn fix_sign(phi: &mut [f64]) {
    let scale = phi.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
    if let Some(first) = phi.iter().find(|v| v.abs() > 1e-8 * scale) {
        if *first < 0.0 {
            phi.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

impl SpectralData {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `⟨f, h⟩ = Σ_x f(x)h(x)m(x)`.
    pub fn inner(&self, f: &[f64], h: &[f64]) -> f64 {
        inner_m(f, h, &self.measure)
    }

    pub fn norm(&self, f: &[f64]) -> f64 {
        self.inner(f, f).sqrt()
    }

    pub(crate) fn check_graph(&self, g: &WeightedGraph) -> Result<()> {
        if self.vertex_ids == g.ids() && self.measure == g.measure() {
            Ok(())
        } else {
            Err(Error::SpectralMismatch)
        }
    }

    fn check_range(&self, lo: usize, hi: usize) -> Result<()> {
        if hi >= self.len() {
            return Err(Error::IndexOutOfRange { index: hi, len: self.len() });
        }
        if lo > hi {
            return Err(Error::IndexOutOfRange { index: lo, len: hi + 1 });
        }
        Ok(())
    }

    /// Number of eigenvalues within [`CLUSTER_GAP`] of `value`.
    pub fn multiplicity(&self, value: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| (l - value).abs() < CLUSTER_GAP).count()
    }

    /// `φ_lo, …, φ_hi`.
    pub fn eigenspace_basis(&self, lo: usize, hi: usize) -> Result<Vec<Vec<f64>>> {
        self.check_range(lo, hi)?;
        Ok(self.eigenfunctions[lo..=hi].to_vec())
    }

    /// Coefficients `⟨f, φ_k⟩` for `k` in `lo..=hi`.
    pub fn coefficients(&self, f: &[f64], lo: usize, hi: usize) -> Result<Vec<f64>> {
        self.check_range(lo, hi)?;
        if f.len() != self.measure.len() {
            return Err(Error::DomainMismatch { expected: self.measure.len(), got: f.len() });
        }
        Ok(self.eigenfunctions[lo..=hi].iter().map(|phi| self.inner(f, phi)).collect())
    }

    /// `Σ_k c_k φ_{lo+k}`.
    pub fn combine(&self, coeffs: &[f64], lo: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.measure.len()];
        for (c, phi) in coeffs.iter().zip(&self.eigenfunctions[lo..]) {
            out.iter_mut().zip(phi).for_each(|(a, p)| *a += c * p);
        }
        out
    }

    /// `m`-orthogonal projection of `f` onto `span(φ_lo, …, φ_hi)`.
    pub fn project(&self, f: &[f64], lo: usize, hi: usize) -> Result<Vec<f64>> {
        let c = self.coefficients(f, lo, hi)?;
        Ok(self.combine(&c, lo))
    }
}

/// `λ_d - K`.
pub fn gap_deficit(spec: &SpectralData, k: f64, d: usize) -> Result<f64> {
    spec.eigenvalues
        .get(d)
        .map(|l| l - k)
        .ok_or(Error::IndexOutOfRange { index: d, len: spec.len() })
}

/// `λ₁ ≥ K` together with whether `CD(K, ∞)` actually holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LichnerowiczCheck {
    pub passes: bool,
    pub margin: f64,
    pub cd_holds: bool,
}

pub fn lichnerowicz_check(g: &WeightedGraph, spec: &SpectralData, k: f64) -> Result<LichnerowiczCheck> {
    spec.check_graph(g)?;
    let lambda1 = *spec.eigenvalues.get(1).ok_or(Error::IndexOutOfRange { index: 1, len: spec.len() })?;
    let CdCheck { holds, .. } = cd_check(g, k, f64::INFINITY)?;
    Ok(LichnerowiczCheck { passes: lambda1 >= k - 1e-9, margin: lambda1 - k, cd_holds: holds })
}
