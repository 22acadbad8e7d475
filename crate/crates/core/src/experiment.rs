//! Perturbation sweeps around `H_d(c)`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::curvature;
use crate::graph::{hypercube, WeightedGraph};
use crate::obata::{obata_reports, DegreeMeasureReport};
use crate::rigidity::almost_rigidity_report_with;
use crate::spectral::spectrum;

pub const CSV_HEADER: &str = "seed,sigma_w,sigma_m,K,lambda_d,deficit,frobenius_distance,frobenius_method,\
projection_residual,lifted_sup_error,gamma_dist_dev,degree_dev,edge_degree_dev,measure_dev,inner_degree_dev";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub d: usize,
    /// Edge degree of the unperturbed cube.
    pub c: f64,
    pub sigma_w: Vec<f64>,
    /// Paired with `sigma_w` entrywise; `None` reuses `sigma_w`.
    pub sigma_m: Option<Vec<f64>>,
    pub seeds: Vec<u64>,
}

impl SweepConfig {
    fn grid(&self) -> Result<Vec<(f64, f64, u64)>> {
        let sigma_m = self.sigma_m.clone().unwrap_or_else(|| self.sigma_w.clone());
        if sigma_m.len() != self.sigma_w.len() {
            return Err(Error::InvalidParameter(format!(
                "sigma_m has {} entries, sigma_w has {}",
                sigma_m.len(),
                self.sigma_w.len()
            )));
        }
        if self.seeds.is_empty() || self.sigma_w.is_empty() {
            return Err(Error::InvalidParameter("sweep grid is empty".into()));
        }
        Ok(self
            .sigma_w
            .iter()
            .zip(&sigma_m)
            .flat_map(|(&sw, &sm)| self.seeds.iter().map(move |&s| (sw, sm, s)))
            .collect())
    }
}

/// One perturbed instance. Obata quantities are maxima over base vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub seed: u64,
    pub sigma_w: f64,
    pub sigma_m: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub lambda_d: f64,
    pub deficit: f64,
    /// `NaN` when the instance is not a combinatorial cube.
    pub frobenius_distance: f64,
    pub frobenius_method: String,
    pub projection_residual: f64,
    /// `NaN` when some restriction map was refused.
    pub lifted_sup_error: f64,
    pub degree_measure: DegreeMeasureReport,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        let f = |v: f64| format!("{v:.16e}");
        let dm = &self.degree_measure;
        [
            self.seed.to_string(),
            f(self.sigma_w),
            f(self.sigma_m),
            f(self.k),
            f(self.lambda_d),
            f(self.deficit),
            f(self.frobenius_distance),
            self.frobenius_method.clone(),
            f(self.projection_residual),
            f(self.lifted_sup_error),
            f(dm.gamma_distance_dev),
            f(dm.degree_dev),
            f(dm.edge_degree_dev),
            f(dm.measure_dev),
            f(dm.inner_degree_dev),
        ]
        .join(",")
    }
}

/// Full analysis of a single graph with `K` taken as its sharp curvature.
pub fn analyze_instance(g: &WeightedGraph, d: usize, seed: u64, sigma_w: f64, sigma_m: f64) -> Result<SweepRow> {
    let (k, _) = curvature(g, f64::INFINITY)?;
    let spec = spectrum(g);
    let report = almost_rigidity_report_with(g, &spec, k, d)?;
    let obata = obata_reports(g, &spec, k)?;
    let zero = DegreeMeasureReport {
        gamma_distance_dev: 0.0,
        degree_dev: 0.0,
        edge_degree_dev: 0.0,
        measure_dev: 0.0,
        inner_degree_dev: 0.0,
    };
    let lifted = obata
        .iter()
        .map(|r| r.lifted_sup_error)
        .try_fold(0.0, |a: f64, e| e.map(|e| a.max(e)));
    Ok(SweepRow {
        seed,
        sigma_w,
        sigma_m,
        k,
        lambda_d: report.lambda_d,
        deficit: report.deficit,
        frobenius_distance: report.frobenius_distance.unwrap_or(f64::NAN),
        frobenius_method: report.frobenius_method.map_or("none", |m| m.as_str()).to_string(),
        projection_residual: obata.iter().map(|r| r.projection_residual).fold(0.0, f64::max),
        lifted_sup_error: lifted.unwrap_or(f64::NAN),
        degree_measure: obata.iter().fold(zero, |a, r| a.max(r.degree_measure)),
    })
}

/// Runs the grid concurrently; rows come back sorted by `(sigma_w, sigma_m, seed)`.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let base = hypercube(config.d, config.c)?;
    let grid = config.grid()?;
    let mut rows = grid
        .into_par_iter()
        .map(|(sw, sm, seed)| {
            let g = base.perturb(sw, sm, seed)?;
            analyze_instance(&g, config.d, seed, sw, sm)
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        a.sigma_w
            .total_cmp(&b.sigma_w)
            .then(a.sigma_m.total_cmp(&b.sigma_m))
            .then(a.seed.cmp(&b.seed))
    });
    Ok(rows)
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(256 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.to_csv());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> SweepConfig {
        SweepConfig { d: 2, c: 1.0, sigma_w: vec![0.02, 0.01], sigma_m: None, seeds: vec![3, 1] }
    }

    #[test]
    fn rows_sorted_and_deterministic() {
        let a = sweep(&config()).unwrap();
        let keys: Vec<_> = a.iter().map(|r| (r.sigma_w, r.seed)).collect();
        assert_eq!(keys, vec![(0.01, 1), (0.01, 3), (0.02, 1), (0.02, 3)]);
        assert_eq!(to_csv(&a), to_csv(&sweep(&config()).unwrap()));
    }

    #[test]
    fn header_matches_row_width() {
        let rows = sweep(&config()).unwrap();
        let csv = to_csv(&rows);
        let widths: Vec<usize> = csv.lines().map(|l| l.split(',').count()).collect();
        assert!(widths.iter().all(|&w| w == 15));
    }

    #[test]
    fn unperturbed_instance() {
        let g = hypercube(3, 1.0).unwrap();
        let r = analyze_instance(&g, 3, 0, 0.0, 0.0).unwrap();
        assert!((r.k - 2.0).abs() < 1e-6);
        assert!(r.deficit.abs() < 1e-6);
        assert!(r.frobenius_distance < 1e-6);
        assert!(r.projection_residual < 1e-8);
    }

    #[test]
    fn mismatched_sigma_lists() {
        let mut c = config();
        c.sigma_m = Some(vec![0.1]);
        assert!(matches!(sweep(&c), Err(Error::InvalidParameter(_))));
    }
}
