//! Laplacian, carré du champ `Γ`, iterated `Γ₂`, and curvature-dimension checks.
//!
//! At a vertex `x` both `Γ(f)(x)` and `Γ₂(f)(x)` are quadratic forms in the
//! values of `f` on the 2-ball `B₂(x)`. [`local_forms`] assembles those forms as
//! dense matrices; `CD(K, N)` at `x` is positive semidefiniteness of
//! `Γ₂(x) - K Γ(x) - (1/N) ℓ ℓᵀ`, with `ℓ` the Laplacian row at `x`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg;

/// Numerical thresholds for the PSD test and the curvature bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureTolerances {
    /// A matrix passes as PSD when its smallest eigenvalue is at least
    /// `-psd_relative * max|entry|`.
    pub psd_relative: f64,
    /// Bracket width at which the bisection on `K` stops.
    pub bisection: f64,
}

impl Default for CurvatureTolerances {
    fn default() -> Self {
        Self { psd_relative: 1e-10, bisection: 1e-9 }
    }
}

/// `Δf(x) = (1/m(x)) Σ_y w(x, y) (f(y) - f(x))`.
pub fn laplacian_apply(g: &WeightedGraph, f: &[f64]) -> Result<Vec<f64>> {
    g.check_function(f)?;
    Ok((0..g.len()).map(|x| laplacian_at(g, f, x)).collect())
}

fn laplacian_at(g: &WeightedGraph, f: &[f64], x: usize) -> f64 {
    g.neighbors(x).iter().map(|&(y, w)| w * (f[y] - f[x])).sum::<f64>() / g.measure_at(x)
}

/// `Γ(f, h)(x) = (1/2m(x)) Σ_y w(x, y)(f(y) - f(x))(h(y) - h(x))`.
pub fn gamma(g: &WeightedGraph, f: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    g.check_function(f)?;
    g.check_function(h)?;
    Ok((0..g.len())
        .map(|x| {
            let s: f64 =
                g.neighbors(x).iter().map(|&(y, w)| w * (f[y] - f[x]) * (h[y] - h[x])).sum();
            s / (2.0 * g.measure_at(x))
        })
        .collect())
}

/// `Γ(f, h)` through `2Γ(f, h) = Δ(fh) - fΔh - hΔf`.
pub fn gamma_by_product_rule(g: &WeightedGraph, f: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    let fh: Vec<f64> = f.iter().zip(h).map(|(a, b)| a * b).collect();
    let lap_fh = laplacian_apply(g, &fh)?;
    let lap_f = laplacian_apply(g, f)?;
    let lap_h = laplacian_apply(g, h)?;
    Ok((0..g.len()).map(|x| 0.5 * (lap_fh[x] - f[x] * lap_h[x] - h[x] * lap_f[x])).collect())
}

/// `2Γ₂(f, h) = ΔΓ(f, h) - Γ(f, Δh) - Γ(h, Δf)`, composed globally.
pub fn gamma2(g: &WeightedGraph, f: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    let gfh = gamma(g, f, h)?;
    let lap_gfh = laplacian_apply(g, &gfh)?;
    let lap_f = laplacian_apply(g, f)?;
    let lap_h = laplacian_apply(g, h)?;
    let g1 = gamma(g, f, &lap_h)?;
    let g2 = gamma(g, h, &lap_f)?;
    Ok((0..g.len()).map(|x| 0.5 * (lap_gfh[x] - g1[x] - g2[x])).collect())
}

/// The quadratic forms `Γ(x)` and `Γ₂(x)` on `B₂(x)`, and the Laplacian row at `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCurvatureForm {
    pub base_vertex: usize,
    /// `x`, then `S₁(x)`, then `S₂(x)`, each block in stable vertex order.
    pub ball_vertices: Vec<usize>,
    pub sphere1_len: usize,
    pub gamma_matrix: DMatrix<f64>,
    pub gamma2_matrix: DMatrix<f64>,
    pub laplacian_row: DVector<f64>,
}

/// Row-major serialization of a [`LocalCurvatureForm`] with identifier headers.
#[derive(Debug, Clone, Serialize)]
pub struct LocalFormRecord {
    pub base_vertex: String,
    pub ball_vertices: Vec<String>,
    pub gamma_matrix: Vec<Vec<f64>>,
    pub gamma2_matrix: Vec<Vec<f64>>,
    pub laplacian_row: Vec<f64>,
}

impl LocalCurvatureForm {
    pub fn ball_len(&self) -> usize {
        self.ball_vertices.len()
    }

    /// Index range of `S₂(x)` inside [`Self::ball_vertices`].
    pub fn sphere2_range(&self) -> std::ops::Range<usize> {
        1 + self.sphere1_len..self.ball_len()
    }

    /// The vector `φ_x` of values of `phi` on the ball.
    pub fn restrict(&self, phi: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.ball_len(), self.ball_vertices.iter().map(|&v| phi[v]))
    }

    /// `φ_xᵀ Γ₂(x) φ_x`.
    pub fn gamma2_value(&self, phi: &[f64]) -> f64 {
        let v = self.restrict(phi);
        v.dot(&(&self.gamma2_matrix * &v))
    }

    /// `Γ₂(x) - K Γ(x) - (1/N) ℓ ℓᵀ`; the rank-one term is dropped for `N = ∞`.
    pub fn cd_matrix(&self, k: f64, n: f64) -> DMatrix<f64> {
        let mut m = &self.gamma2_matrix - &self.gamma_matrix * k;
        if n.is_finite() {
            m -= (&self.laplacian_row * self.laplacian_row.transpose()) / n;
        }
        m
    }

    pub fn to_record(&self, g: &WeightedGraph) -> LocalFormRecord {
        let rows = |m: &DMatrix<f64>| {
            (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
        };
        LocalFormRecord {
            base_vertex: g.id(self.base_vertex).to_string(),
            ball_vertices: self.ball_vertices.iter().map(|&v| g.id(v).to_string()).collect(),
            gamma_matrix: rows(&self.gamma_matrix),
            gamma2_matrix: rows(&self.gamma2_matrix),
            laplacian_row: self.laplacian_row.iter().copied().collect(),
        }
    }
}

/// Assembles `Γ(x)`, `Γ₂(x)` and the Laplacian row on `B₂(x)`.
///
/// With `G_y` the matrix of `Γ(·,·)(y)` and `L` the rows of `Δ` at `B₁(x)`,
/// `2Γ₂(x) = Σ_y q(x,y)(G_y - G_x) - G_x L - Lᵀ G_x`, which is the
/// composition `ΔΓ(f,h) - Γ(f,Δh) - Γ(h,Δf)` evaluated on basis vectors.
pub fn local_forms(g: &WeightedGraph, x: usize) -> Result<LocalCurvatureForm> {
    g.check_vertex(x)?;
    let s1: Vec<usize> = g.neighbors(x).iter().map(|&(y, _)| y).collect();
    let mut s2: Vec<usize> = s1
        .iter()
        .flat_map(|&y| g.neighbors(y).iter().map(|&(z, _)| z))
        .filter(|&z| z != x && g.weight(x, z) == 0.0)
        .collect();
    s2.sort_unstable();
    s2.dedup();

    let ball: Vec<usize> = std::iter::once(x).chain(s1.iter().copied()).chain(s2).collect();
    let local: HashMap<usize, usize> = ball.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let b = ball.len();
    let b1 = 1 + s1.len();

    // Γ(·,·)(y) for y in B₁(x), and the Laplacian rows there.
    let mut grads = Vec::with_capacity(b1);
    let mut lap = DMatrix::<f64>::zeros(b1, b);
    for (a, &y) in ball[..b1].iter().enumerate() {
        let mut gy = DMatrix::<f64>::zeros(b, b);
        let my = g.measure_at(y);
        for &(z, w) in g.neighbors(y) {
            let c = local[&z];
            let coeff = w / (2.0 * my);
            gy[(a, a)] += coeff;
            gy[(c, c)] += coeff;
            gy[(a, c)] -= coeff;
            gy[(c, a)] -= coeff;
            lap[(a, c)] += w / my;
            lap[(a, a)] -= w / my;
        }
        grads.push(gy);
    }

    let gx = grads[0].clone();
    let mut two_gamma2 = DMatrix::<f64>::zeros(b, b);
    for (a, &y) in ball[1..b1].iter().enumerate() {
        let q = g.weight(x, y) / g.measure_at(x);
        two_gamma2 += (&grads[a + 1] - &gx) * q;
    }
    let cross = gx.columns(0, b1) * &lap;
    two_gamma2 -= &cross + cross.transpose();
    let mut gamma2_matrix = two_gamma2 * 0.5;
    // exact symmetry
    for i in 0..b {
        for j in i + 1..b {
            let v = 0.5 * (gamma2_matrix[(i, j)] + gamma2_matrix[(j, i)]);
            gamma2_matrix[(i, j)] = v;
            gamma2_matrix[(j, i)] = v;
        }
    }

    Ok(LocalCurvatureForm {
        base_vertex: x,
        ball_vertices: ball,
        sphere1_len: s1.len(),
        gamma_matrix: gx,
        gamma2_matrix,
        laplacian_row: lap.row(0).transpose(),
    })
}

/// Outcome of a `CD(K, N)` check over all vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdCheck {
    pub holds: bool,
    pub worst_vertex: usize,
    /// Most negative smallest eigenvalue across vertices.
    pub min_eigenvalue: f64,
}

fn validate_dimension(n: f64) -> Result<()> {
    if n > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("dimension N must lie in (0, inf], got {n}")))
    }
}

pub fn cd_check(g: &WeightedGraph, k: f64, n: f64) -> Result<CdCheck> {
    cd_check_with(g, k, n, &CurvatureTolerances::default())
}

pub fn cd_check_with(
    g: &WeightedGraph,
    k: f64,
    n: f64,
    tol: &CurvatureTolerances,
) -> Result<CdCheck> {
    validate_dimension(n)?;
    let per_vertex: Vec<(bool, f64)> = (0..g.len())
        .into_par_iter()
        .map(|x| {
            let form = local_forms(g, x).expect("vertex in range");
            linalg::is_psd(&form.cd_matrix(k, n), tol.psd_relative)
        })
        .collect();
    let mut worst = 0;
    for (x, &(_, lo)) in per_vertex.iter().enumerate() {
        if lo < per_vertex[worst].1 {
            worst = x;
        }
    }
    Ok(CdCheck {
        holds: per_vertex.iter().all(|&(ok, _)| ok),
        worst_vertex: worst,
        min_eigenvalue: per_vertex[worst].1,
    })
}

/// Largest `K` with `CD(K, N)` at `x`; `±∞` when the PSD set is unbounded or empty.
pub fn curvature_at(g: &WeightedGraph, x: usize, n: f64) -> Result<f64> {
    curvature_at_with(g, x, n, &CurvatureTolerances::default())
}

pub fn curvature_at_with(
    g: &WeightedGraph,
    x: usize,
    n: f64,
    tol: &CurvatureTolerances,
) -> Result<f64> {
    validate_dimension(n)?;
    let form = local_forms(g, x)?;
    let scale = 4.0 * g.max_weighted_degree().max(0.25);
    Ok(curvature_of_form(&form, n, scale, tol))
}

/// Bisection for the supremum of `K` with a PSD form. The admissible set is
/// an interval `(-∞, K*]` because `Γ(x)` is PSD.
pub(crate) fn curvature_of_form(
    form: &LocalCurvatureForm,
    n: f64,
    start: f64,
    tol: &CurvatureTolerances,
) -> f64 {
    const MAX_WIDENINGS: usize = 60;
    let psd = |k: f64| linalg::is_psd(&form.cd_matrix(k, n), tol.psd_relative).0;

    let mut lo = -start;
    let mut widen = 0;
    while !psd(lo) {
        widen += 1;
        if widen > MAX_WIDENINGS {
            return f64::NEG_INFINITY;
        }
        lo *= 2.0;
    }
    let mut hi = start;
    widen = 0;
    while psd(hi) {
        widen += 1;
        if widen > MAX_WIDENINGS {
            return f64::INFINITY;
        }
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > tol.bisection {
        let mid = 0.5 * (lo + hi);
        if psd(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Per-vertex curvature `K*(x)` for every vertex, in stable order.
pub fn curvature_profile(g: &WeightedGraph, n: f64) -> Result<Vec<f64>> {
    curvature_profile_with(g, n, &CurvatureTolerances::default())
}

pub fn curvature_profile_with(
    g: &WeightedGraph,
    n: f64,
    tol: &CurvatureTolerances,
) -> Result<Vec<f64>> {
    validate_dimension(n)?;
    let scale = 4.0 * g.max_weighted_degree().max(0.25);
    Ok((0..g.len())
        .into_par_iter()
        .map(|x| {
            let form = local_forms(g, x).expect("vertex in range");
            curvature_of_form(&form, n, scale, tol)
        })
        .collect())
}

/// Global curvature constant `min_x K*(x)` and the first vertex attaining it.
pub fn curvature(g: &WeightedGraph, n: f64) -> Result<(f64, usize)> {
    curvature_with(g, n, &CurvatureTolerances::default())
}

pub fn curvature_with(
    g: &WeightedGraph,
    n: f64,
    tol: &CurvatureTolerances,
) -> Result<(f64, usize)> {
    let profile = curvature_profile_with(g, n, tol)?;
    let mut best = 0;
    for (x, &k) in profile.iter().enumerate() {
        if k < profile[best] {
            best = x;
        }
    }
    Ok((profile[best], best))
}
