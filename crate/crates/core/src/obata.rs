//! Closeness of distance functions to spans of low eigenfunctions.
//!
//! `Λ₀(ℓ)` is `span(φ₀, …, φ_ℓ)` and `Λ(ℓ)` is `span(φ₁, …, φ_ℓ)`. On the
//! rigid cube `dist_{x0} - d/2` lies in `Λ(d)`; on near-rigid graphs the
//! residuals computed here measure how far it is from that span.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::{gamma, gamma2};
use crate::graph::WeightedGraph;
use crate::spectral::SpectralData;

/// Lifting is refused when the restriction map is worse conditioned than this.
pub const MAX_RESTRICTION_CONDITION: f64 = 1e8;

/// Default spread tolerance for [`is_distance_composed`].
pub const DISTANCE_COMPOSED_TOL: f64 = 1e-8;

/// Restriction of `Λ₀(ℓ)` to the 1-ball `B₁(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionMap {
    pub base_vertex: usize,
    pub level: usize,
    /// `x` followed by its neighbors in stable order.
    pub ball: Vec<usize>,
    /// Column `k` holds `φ_k` on [`Self::ball`].
    pub matrix: DMatrix<f64>,
    /// `σ_max / σ_min` in the weighted norms; `+∞` when rank deficient.
    pub condition: f64,
    /// `‖L⁻¹‖₂` when the map is square and invertible.
    pub inverse_norm: Option<f64>,
}

impl RestrictionMap {
    pub fn is_square(&self) -> bool {
        self.matrix.nrows() == self.matrix.ncols()
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse_norm.is_some()
    }

    /// Coefficients `c` with `Σ c_k φ_k = values` on the ball. Solves in the
    /// least-squares sense for rectangular maps.
    pub fn solve(&self, values: &[f64]) -> Option<Vec<f64>> {
        let rhs = DVector::from_column_slice(values);
        let svd = self.matrix.clone().svd(true, true);
        svd.solve(&rhs, 1e-14).ok().map(|c| c.iter().copied().collect())
    }
}

pub fn restriction_map(
    g: &WeightedGraph,
    spec: &SpectralData,
    x0: usize,
    level: usize,
) -> Result<RestrictionMap> {
    spec.check_graph(g)?;
    g.check_vertex(x0)?;
    if level >= spec.len() {
        return Err(Error::IndexOutOfRange { index: level, len: spec.len() });
    }
    let ball: Vec<usize> =
        std::iter::once(x0).chain(g.neighbors(x0).iter().map(|&(y, _)| y)).collect();
    let matrix = DMatrix::from_fn(ball.len(), level + 1, |i, k| spec.eigenfunctions[k][ball[i]]);

    // Coefficients carry the Euclidean norm (the φ_k are orthonormal); values
    // on the ball carry the m-weighted one.
    let weighted =
        DMatrix::from_fn(ball.len(), level + 1, |i, k| matrix[(i, k)] * g.measure_at(ball[i]).sqrt());
    let sv = weighted.singular_values();
    let rank_dim = ball.len().min(level + 1);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = if level + 1 > ball.len() {
        0.0
    } else {
        sv.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let condition = if smin > 0.0 && rank_dim > 0 { smax / smin } else { f64::INFINITY };
    let inverse_norm = (ball.len() == level + 1 && condition <= MAX_RESTRICTION_CONDITION)
        .then(|| 1.0 / smin);
    Ok(RestrictionMap { base_vertex: x0, level, ball, matrix, condition, inverse_norm })
}

/// The element of `Λ₀(d)` agreeing with `dist_{x0}` on `B₁(x0)`, with `d = deg_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedDistance {
    pub f_tilde: Vec<f64>,
    pub sup_error: f64,
    pub l2_error: f64,
    pub condition: f64,
}

pub fn lift_distance(g: &WeightedGraph, spec: &SpectralData, x0: usize) -> Result<LiftedDistance> {
    let level = g.max_degree();
    let map = restriction_map(g, spec, x0, level)?;
    if !map.is_invertible() {
        return Err(Error::SingularRestrictionMap {
            vertex: g.id(x0).to_string(),
            condition: map.condition,
        });
    }
    let dist: Vec<f64> = g.distances_from(x0)?.into_iter().map(|k| k as f64).collect();
    let on_ball: Vec<f64> = map.ball.iter().map(|&v| dist[v]).collect();
    let coeffs = map.solve(&on_ball).ok_or_else(|| Error::SingularRestrictionMap {
        vertex: g.id(x0).to_string(),
        condition: map.condition,
    })?;
    let f_tilde = spec.combine(&coeffs, 0);
    let diff: Vec<f64> = dist.iter().zip(&f_tilde).map(|(a, b)| a - b).collect();
    Ok(LiftedDistance {
        sup_error: diff.iter().fold(0.0, |a: f64, v| a.max(v.abs())),
        l2_error: spec.norm(&diff),
        f_tilde,
        condition: map.condition,
    })
}

fn distance_function(g: &WeightedGraph, x0: usize) -> Result<Vec<f64>> {
    Ok(g.distances_from(x0)?.into_iter().map(|k| k as f64).collect())
}

fn residual_norm(spec: &SpectralData, f: &[f64], lo: usize, hi: usize) -> Result<f64> {
    let p = spec.project(f, lo, hi)?;
    let r: Vec<f64> = f.iter().zip(&p).map(|(a, b)| a - b).collect();
    Ok(spec.norm(&r))
}

/// `‖dist_{x0} - d/2 - u*‖₂` with `u*` the projection of `dist_{x0} - d/2`
/// onto `Λ(d)` and `d = deg_max`.
pub fn obata_residual(g: &WeightedGraph, spec: &SpectralData, x0: usize) -> Result<f64> {
    spec.check_graph(g)?;
    let d = g.max_degree();
    let f: Vec<f64> = distance_function(g, x0)?.into_iter().map(|v| v - d as f64 / 2.0).collect();
    residual_norm(spec, &f, 1, d)
}

/// Same as [`obata_residual`] but centered at the true mean `⟨f₀,1⟩/⟨1,1⟩`.
pub fn centered_obata_residual(g: &WeightedGraph, spec: &SpectralData, x0: usize) -> Result<f64> {
    spec.check_graph(g)?;
    let d = g.max_degree();
    let f = distance_function(g, x0)?;
    // projecting onto Λ₀(d) removes exactly the mean
    residual_norm(spec, &f, 0, d)
}

/// `min_{u ∈ Λ₀(ℓ)} ‖dist_{x0} - u‖₂`, defined when `deg(x0) ≤ ℓ`.
pub fn generalized_obata(g: &WeightedGraph, spec: &SpectralData, x0: usize, level: usize) -> Result<f64> {
    spec.check_graph(g)?;
    g.check_vertex(x0)?;
    if g.degree(x0) > level {
        return Err(Error::DegreeExceedsLevel {
            vertex: g.id(x0).to_string(),
            degree: g.degree(x0),
            level,
        });
    }
    residual_norm(spec, &distance_function(g, x0)?, 0, level)
}

/// `|φ(z) + φ(x) - 2 Σ_y φ(y)a_y / Σ_y a_y|` with `a_y = w(x,y)w(y,z)/m(y)`
/// over the common neighbors `y` of `x` and `z`.
pub fn extension_residual(g: &WeightedGraph, phi: &[f64], x: usize, z: usize) -> Result<f64> {
    g.check_function(phi)?;
    if g.distances_from(x)?.get(z) != Some(&2) {
        g.check_vertex(z)?;
        return Err(Error::NotDistanceTwo(g.id(x).to_string(), g.id(z).to_string()));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for &(y, wxy) in g.neighbors(x) {
        let wyz = g.weight(y, z);
        if wyz > 0.0 {
            let a = wxy * wyz / g.measure_at(y);
            num += phi[y] * a;
            den += a;
        }
    }
    Ok((phi[z] + phi[x] - 2.0 * num / den).abs())
}

/// Largest [`extension_residual`] over all ordered pairs at distance 2.
pub fn max_extension_residual(g: &WeightedGraph, phi: &[f64]) -> Result<f64> {
    g.check_function(phi)?;
    let mut worst: f64 = 0.0;
    for x in 0..g.len() {
        let dist = g.distances_from(x)?;
        for z in (0..g.len()).filter(|&z| dist[z] == 2) {
            worst = worst.max(extension_residual(g, phi, x, z)?);
        }
    }
    Ok(worst)
}

/// `max Γφ - min Γφ`.
pub fn gradient_deviation(g: &WeightedGraph, phi: &[f64]) -> Result<f64> {
    let gp = gamma(g, phi, phi)?;
    let hi = gp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = gp.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(hi - lo)
}

/// Deviations of degrees, edge degrees and measure from the rigid values,
/// with `f₀ = dist_{x0}` and `D = Deg_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeMeasureReport {
    /// `max_x |Γf₀(x) - D/2|`
    pub gamma_distance_dev: f64,
    /// `max_x |Deg(x) - D|`
    pub degree_dev: f64,
    /// `max_{x~y} |q(x,y) - K/2|`
    pub edge_degree_dev: f64,
    /// `max_x |m(x) - 1|`
    pub measure_dev: f64,
    /// `max_x |d₋(x) - (K/2) dist(x, x0)|`
    pub inner_degree_dev: f64,
}

impl DegreeMeasureReport {
    /// Entrywise maximum.
    pub fn max(self, other: Self) -> Self {
        Self {
            gamma_distance_dev: self.gamma_distance_dev.max(other.gamma_distance_dev),
            degree_dev: self.degree_dev.max(other.degree_dev),
            edge_degree_dev: self.edge_degree_dev.max(other.edge_degree_dev),
            measure_dev: self.measure_dev.max(other.measure_dev),
            inner_degree_dev: self.inner_degree_dev.max(other.inner_degree_dev),
        }
    }
}

pub fn degree_measure_report(g: &WeightedGraph, k: f64, x0: usize) -> Result<DegreeMeasureReport> {
    let dist = g.distances_from(x0)?;
    let f0: Vec<f64> = dist.iter().map(|&v| v as f64).collect();
    let big_d = g.max_weighted_degree();
    let gf = gamma(g, &f0, &f0)?;
    let n = g.len();
    let max_over = |f: &dyn Fn(usize) -> f64| (0..n).map(f).fold(0.0, f64::max);
    let mut edge_degree_dev: f64 = 0.0;
    for x in 0..n {
        for &(y, w) in g.neighbors(x) {
            let _ = y;
            edge_degree_dev = edge_degree_dev.max((w / g.measure_at(x) - k / 2.0).abs());
        }
    }
    Ok(DegreeMeasureReport {
        gamma_distance_dev: max_over(&|x| (gf[x] - big_d / 2.0).abs()),
        degree_dev: max_over(&|x| (g.weighted_degree(x) - big_d).abs()),
        edge_degree_dev,
        measure_dev: max_over(&|x| (g.measure_at(x) - 1.0).abs()),
        inner_degree_dev: max_over(&|x| {
            (g.directional_degrees_from(&dist, x).minus - 0.5 * k * dist[x] as f64).abs()
        }),
    })
}

/// Whether `h` is constant on every sphere about `p`, up to `tol`.
pub fn is_distance_composed(g: &WeightedGraph, h: &[f64], p: usize, tol: f64) -> Result<bool> {
    g.check_function(h)?;
    let dist = g.distances_from(p)?;
    let radius = dist.iter().copied().max().unwrap_or(0);
    let mut lo = vec![f64::INFINITY; radius + 1];
    let mut hi = vec![f64::NEG_INFINITY; radius + 1];
    for (x, &k) in dist.iter().enumerate() {
        lo[k] = lo[k].min(h[x]);
        hi[k] = hi[k].max(h[x]);
    }
    Ok(lo.iter().zip(&hi).all(|(a, b)| b - a <= tol))
}

/// `max_x m(x)(Γ₂φ - KΓφ)(x)`; bounded by `(K+1)‖φ‖²ε` for `φ ∈ Λ₀(d)`.
pub fn curvature_excess(g: &WeightedGraph, phi: &[f64], k: f64) -> Result<f64> {
    let g2 = gamma2(g, phi, phi)?;
    let g1 = gamma(g, phi, phi)?;
    Ok((0..g.len())
        .map(|x| g.measure_at(x) * (g2[x] - k * g1[x]))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// All per-base-vertex diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObataReport {
    pub base_vertex: String,
    pub d: usize,
    /// `‖f₀ - f̃₀‖_∞`; absent when the restriction map is singular.
    pub lifted_sup_error: Option<f64>,
    /// `‖f₀ - f̃₀‖₂`.
    pub lifted_l2_error: Option<f64>,
    pub restriction_condition: f64,
    /// `‖dist - d/2 - u*‖₂`, `u*` the projection onto `Λ(d)`.
    pub projection_residual: f64,
    /// Residual with the true mean in place of `d/2`.
    pub centered_projection_residual: f64,
    /// `|⟨f₀,1⟩/⟨1,1⟩ - d/2|`.
    pub mean_offset: f64,
    /// Spread of `Γφ` for `φ` the projection of `dist` onto `Λ₀(d)`.
    pub gradient_deviation: f64,
    /// Worst extension residual of the same `φ`.
    pub extension_residual_max: f64,
    pub degree_measure: DegreeMeasureReport,
}

pub fn obata_report(g: &WeightedGraph, spec: &SpectralData, k: f64, x0: usize) -> Result<ObataReport> {
    spec.check_graph(g)?;
    let d = g.max_degree();
    if d >= spec.len() {
        return Err(Error::IndexOutOfRange { index: d, len: spec.len() });
    }
    let f0 = distance_function(g, x0)?;
    let lift = match lift_distance(g, spec, x0) {
        Ok(l) => Some(l),
        Err(Error::SingularRestrictionMap { .. }) => None,
        Err(e) => return Err(e),
    };
    let condition = match &lift {
        Some(l) => l.condition,
        None => restriction_map(g, spec, x0, d)?.condition,
    };
    let ones = vec![1.0; g.len()];
    let mean = spec.inner(&f0, &ones) / spec.inner(&ones, &ones);
    let phi = spec.project(&f0, 0, d)?;
    Ok(ObataReport {
        base_vertex: g.id(x0).to_string(),
        d,
        lifted_sup_error: lift.as_ref().map(|l| l.sup_error),
        lifted_l2_error: lift.as_ref().map(|l| l.l2_error),
        restriction_condition: condition,
        projection_residual: obata_residual(g, spec, x0)?,
        centered_projection_residual: centered_obata_residual(g, spec, x0)?,
        mean_offset: (mean - d as f64 / 2.0).abs(),
        gradient_deviation: gradient_deviation(g, &phi)?,
        extension_residual_max: max_extension_residual(g, &phi)?,
        degree_measure: degree_measure_report(g, k, x0)?,
    })
}

/// One report per base vertex in stable order.
pub fn obata_reports(g: &WeightedGraph, spec: &SpectralData, k: f64) -> Result<Vec<ObataReport>> {
    (0..g.len()).into_par_iter().map(|x| obata_report(g, spec, k, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::hypercube;
    use crate::spectral::spectrum;

    #[test]
    fn restriction_map_on_cube() {
        let g = hypercube(3, 1.0).unwrap();
        let s = spectrum(&g);
        let norms: Vec<f64> = (0..8)
            .map(|x| {
                let m = restriction_map(&g, &s, x, 3).unwrap();
                assert!(m.is_square() && m.is_invertible());
                let inv = m.matrix.clone().try_inverse().unwrap();
                assert!((&m.matrix * inv - DMatrix::identity(4, 4)).amax() < 1e-9);
                m.inverse_norm.unwrap()
            })
            .collect();
        for v in &norms {
            assert!((v - norms[0]).abs() < 1e-9 * norms[0]);
        }
        let constant = restriction_map(&g, &s, 0, 0).unwrap();
        assert!(!constant.is_square() && !constant.is_invertible());
    }

    #[test]
    fn lift_is_exact_on_cube() {
        let g = hypercube(3, 1.0).unwrap();
        let s = spectrum(&g);
        for x in 0..8 {
            let l = lift_distance(&g, &s, x).unwrap();
            assert!(l.sup_error < 1e-8 && l.l2_error < 1e-8);
        }
    }

    #[test]
    fn generalized_obata_cases() {
        let k2 = hypercube(1, 1.0).unwrap();
        let s = spectrum(&k2);
        assert!(generalized_obata(&k2, &s, 0, 1).unwrap() < 1e-12);
        let g = hypercube(3, 1.0).unwrap();
        let s = spectrum(&g);
        assert!(generalized_obata(&g, &s, 0, 3).unwrap() < 1e-8);
        assert!(matches!(generalized_obata(&g, &s, 0, 2), Err(Error::DegreeExceedsLevel { .. })));
    }

    #[test]
    fn extension_residual_cases() {
        let g = hypercube(3, 1.0).unwrap();
        let dist: Vec<f64> = g.distances_from(0).unwrap().into_iter().map(|k| k as f64).collect();
        // x = 000 on a geodesic from x0 = 000 to z = 011
        assert_eq!(extension_residual(&g, &dist, 0, 3).unwrap(), 0.0);
        assert!(matches!(extension_residual(&g, &dist, 0, 1), Err(Error::NotDistanceTwo(..))));
        let bump: Vec<f64> = (0..8).map(|x| if x == 3 { 1.0 } else { 0.0 }).collect();
        assert!(extension_residual(&g, &bump, 0, 3).unwrap() > 0.5);
    }

    #[test]
    fn gradient_deviation_cases() {
        let c = 0.4;
        let g = hypercube(3, c).unwrap();
        let dist: Vec<f64> = g.distances_from(5).unwrap().into_iter().map(|k| k as f64).collect();
        let gd = gamma(&g, &dist, &dist).unwrap();
        assert!(gd.iter().all(|v| (v - 3.0 * c / 2.0).abs() < 1e-15));
        assert!(gradient_deviation(&g, &dist).unwrap() < 1e-15);
        assert_eq!(gradient_deviation(&g, &[2.0; 8]).unwrap(), 0.0);
    }

    #[test]
    fn degree_measure_on_cube() {
        for k in [1.0, 2.0, 5.0] {
            let g = hypercube(3, k / 2.0).unwrap();
            for x0 in 0..8 {
                let r = degree_measure_report(&g, k, x0).unwrap();
                assert!(r.gamma_distance_dev < 1e-9);
                assert!(r.degree_dev < 1e-9);
                assert!(r.edge_degree_dev < 1e-9);
                assert_eq!(r.measure_dev, 0.0);
                assert!(r.inner_degree_dev < 1e-9);
            }
        }
    }

    #[test]
    fn distance_composed_cases() {
        let g = hypercube(3, 1.0).unwrap();
        let dist: Vec<f64> = g.distances_from(2).unwrap().into_iter().map(|k| k as f64).collect();
        assert!(is_distance_composed(&g, &dist, 2, 1e-8).unwrap());
        assert!(is_distance_composed(&g, &[4.0; 8], 6, 1e-8).unwrap());
        let coord: Vec<f64> = (0..8).map(|x| if x & 1 == 1 { 1.0 } else { -1.0 }).collect();
        assert!((0..8).all(|p| !is_distance_composed(&g, &coord, p, 1e-8).unwrap()));
    }

    #[test]
    fn report_on_rigid_cube() {
        let g = hypercube(3, 1.0).unwrap();
        let s = spectrum(&g);
        for r in obata_reports(&g, &s, 2.0).unwrap() {
            assert!(r.projection_residual < 1e-8);
            assert!(r.centered_projection_residual < 1e-8);
            assert!(r.mean_offset < 1e-12);
            assert!(r.lifted_sup_error.unwrap() < 1e-8);
            assert!(r.gradient_deviation < 1e-8);
            assert!(r.extension_residual_max < 1e-8);
        }
    }
}
