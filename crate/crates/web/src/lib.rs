//! Browser bindings. Each export takes plain numbers or a graph JSON string
//! and returns a JSON string; the `*_json` functions hold the logic so they
//! can be tested natively.

use cube_rigidity::gamma::curvature_profile;
use cube_rigidity::io::{graph_to_json, parse_graph};
use cube_rigidity::obata::{obata_report, ObataReport};
use cube_rigidity::rigidity::almost_rigidity_report_with;
use cube_rigidity::{curvature, gap_deficit, hypercube, spectrum, Error, RigidityReport, WeightedGraph};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Browsers get small graphs only.
const MAX_DIMENSION: usize = 6;

#[derive(Serialize)]
struct Exploration {
    graph: serde_json::Value,
    #[serde(rename = "K")]
    k: f64,
    curvature: Vec<f64>,
    eigenvalues: Vec<f64>,
    deficit: f64,
    report: RigidityReport,
}

#[derive(Serialize)]
struct DistanceProfile {
    vertex_ids: Vec<String>,
    distance: Vec<f64>,
    /// Projection of `dist - d/2` onto the first `d` nonconstant eigenfunctions, shifted back by `d/2`.
    fit: Vec<f64>,
    report: ObataReport,
}

fn message(e: Error) -> String {
    serde_json::json!({ "error": e.code(), "message": e.to_string() }).to_string()
}

fn perturbed_cube(d: usize, c: f64, sigma_w: f64, sigma_m: f64, seed: u64) -> Result<WeightedGraph, String> {
    if d == 0 || d > MAX_DIMENSION {
        return Err(message(Error::InvalidParameter(format!("d must lie in 1..={MAX_DIMENSION}"))));
    }
    hypercube(d, c).and_then(|g| g.perturb(sigma_w, sigma_m, seed)).map_err(message)
}

fn analyze(g: &WeightedGraph, d: usize) -> Result<Exploration, Error> {
    let (k, _) = curvature(g, f64::INFINITY)?;
    let spec = spectrum(g);
    Ok(Exploration {
        graph: serde_json::from_str(&graph_to_json(g)).expect("graph JSON parses"),
        k,
        curvature: curvature_profile(g, f64::INFINITY)?,
        deficit: gap_deficit(&spec, k, d)?,
        report: almost_rigidity_report_with(g, &spec, k, d)?,
        eigenvalues: spec.eigenvalues,
    })
}

/// Perturbs `H_d(c)` and reports curvature, spectrum and rigidity with `K` its sharp curvature.
pub fn explore_cube_json(d: usize, c: f64, sigma_w: f64, sigma_m: f64, seed: u64) -> Result<String, String> {
    let g = perturbed_cube(d, c, sigma_w, sigma_m, seed)?;
    let out = analyze(&g, d).map_err(message)?;
    Ok(serde_json::to_string(&out).expect("exploration serializes"))
}

/// Same analysis for a pasted graph, with `d` its maximal degree.
pub fn analyze_graph_json(graph: &str) -> Result<String, String> {
    let g = parse_graph(graph, false).map_err(message)?;
    if g.len() > 1 << MAX_DIMENSION {
        return Err(message(Error::TooManyVertices { got: g.len(), limit: 1 << MAX_DIMENSION }));
    }
    let out = analyze(&g, g.max_degree()).map_err(message)?;
    Ok(serde_json::to_string(&out).expect("exploration serializes"))
}

/// Distance function about `base` on a perturbed cube against its best fit in the low eigenspaces.
pub fn distance_profile_json(
    d: usize,
    c: f64,
    sigma: f64,
    seed: u64,
    base: usize,
) -> Result<String, String> {
    let g = perturbed_cube(d, c, sigma, sigma, seed)?;
    if base >= g.len() {
        return Err(message(Error::IndexOutOfRange { index: base, len: g.len() }));
    }
    let spec = spectrum(&g);
    let (k, _) = curvature(&g, f64::INFINITY).map_err(message)?;
    let half = d as f64 / 2.0;
    let distance: Vec<f64> = g.distances_from(base).map_err(message)?.into_iter().map(|v| v as f64).collect();
    let centered: Vec<f64> = distance.iter().map(|v| v - half).collect();
    let fit = spec.project(&centered, 1, d).map_err(message)?.into_iter().map(|v| v + half).collect();
    let out = DistanceProfile {
        vertex_ids: g.ids().to_vec(),
        distance,
        fit,
        report: obata_report(&g, &spec, k, base).map_err(message)?,
    };
    Ok(serde_json::to_string(&out).expect("profile serializes"))
}

#[wasm_bindgen]
pub fn explore_cube(d: usize, c: f64, sigma_w: f64, sigma_m: f64, seed: u32) -> Result<String, JsValue> {
    explore_cube_json(d, c, sigma_w, sigma_m, seed.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn analyze_graph(graph: &str) -> Result<String, JsValue> {
    analyze_graph_json(graph).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn distance_profile(d: usize, c: f64, sigma: f64, seed: u32, base: usize) -> Result<String, JsValue> {
    distance_profile_json(d, c, sigma, seed.into(), base).map_err(|e| JsValue::from_str(&e))
}
