//! Graph JSON: `{"vertices":[{"id","m"}],"edges":[{"u","v","w"}]}`, each
//! undirected edge listed once.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: String,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub u: String,
    pub v: String,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
}

impl GraphFile {
    pub fn into_graph(self, normalize_measure: bool) -> Result<WeightedGraph> {
        WeightedGraph::build(
            self.vertices.into_iter().map(|r| (r.id, r.m)).collect(),
            self.edges.into_iter().map(|r| (r.u, r.v, r.w)).collect(),
            normalize_measure,
        )
    }
}

impl From<&WeightedGraph> for GraphFile {
    fn from(g: &WeightedGraph) -> Self {
        let (vertices, edges) = g.to_parts();
        GraphFile {
            vertices: vertices.into_iter().map(|(id, m)| VertexRecord { id, m }).collect(),
            edges: edges.into_iter().map(|(u, v, w)| EdgeRecord { u, v, w }).collect(),
        }
    }
}

pub fn parse_graph(json: &str, normalize_measure: bool) -> Result<WeightedGraph> {
    let file: GraphFile =
        serde_json::from_str(json).map_err(|e| Error::InvalidParameter(format!("graph JSON: {e}")))?;
    file.into_graph(normalize_measure)
}

pub fn graph_to_json(g: &WeightedGraph) -> String {
    serde_json::to_string_pretty(&GraphFile::from(g)).expect("graph records serialize")
}
