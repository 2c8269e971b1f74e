//! JSON model files.
//!
//! ```json
//! {
//!   "schema": "causal-id/model/v1",
//!   "graph": "one_tooth",
//!   "signed": false,
//!   "cardinalities": { "u_0": 2, "x": 2, "y": 2 },
//!   "cpts": {
//!     "u_0": { "parents": [], "values": [0.5, 0.5] },
//!     "x":   { "parents": ["u_0"], "values": [1.0, 0.0, 0.0, 1.0] },
//!     "y":   { "parents": ["x", "u_0"], "values": [...] }
//!   }
//! }
//! ```
//!
//! Every node of the latent-expanded graph (latents `u_<i>` in arc order)
//! needs a cardinality and a CPT. `values` is row-major over the parent
//! tuple in the listed `parents` order with the node's own value varying
//! fastest, so each consecutive run of `cardinalities[node]` entries is one
//! conditional distribution. `graph` is the name of the graph the file was
//! written against; `signed` admits entries outside `[0, 1]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{CausalGraph, NodeId, NodeSet};
use crate::inference::{DiscreteModel, InferenceError};
use crate::table::Factor;

pub const MODEL_SCHEMA: &str = "causal-id/model/v1";

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema {found:?}, expected {MODEL_SCHEMA:?}")]
    Schema { found: String },
    #[error("model was written for graph {found:?}, not {expected:?}")]
    GraphName { expected: String, found: String },
    #[error("CPT for {node} lists parents {found:?}, graph has {expected:?}")]
    Parents { node: NodeId, expected: Vec<NodeId>, found: Vec<NodeId> },
    #[error(transparent)]
    Model(#[from] InferenceError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CptEntry {
    pub parents: Vec<NodeId>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    #[serde(default)]
    pub signed: bool,
    pub cardinalities: BTreeMap<NodeId, usize>,
    pub cpts: BTreeMap<NodeId, CptEntry>,
}

impl ModelFile {
    pub fn from_model(model: &DiscreteModel, graph_name: Option<&str>) -> Self {
        let cpts = model
            .expanded()
            .ordered_nodes()
            .into_iter()
            .map(|n| {
                let entry = CptEntry { parents: model.parents(&n).to_vec(), values: model.cpt(&n).values().to_vec() };
                (n, entry)
            })
            .collect();
        ModelFile {
            schema: MODEL_SCHEMA.to_string(),
            graph: graph_name.map(str::to_string),
            signed: !model.is_stochastic(),
            cardinalities: model.cardinalities().clone(),
            cpts,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ModelFileError> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.schema != MODEL_SCHEMA {
            return Err(ModelFileError::Schema { found: file.schema });
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files serialize")
    }

    /// Builds the model over `graph`. Parent lists may be in any order but
    /// must name exactly the node's parents in the expanded graph.
    pub fn to_model(&self, graph: &CausalGraph, graph_name: Option<&str>) -> Result<DiscreteModel, ModelFileError> {
        if let (Some(found), Some(expected)) = (&self.graph, graph_name) {
            if found != expected {
                return Err(ModelFileError::GraphName { expected: expected.to_string(), found: found.clone() });
            }
        }
        let expanded = crate::graph::latent_expand(graph);
        let mut tables = BTreeMap::new();
        for (node, entry) in &self.cpts {
            if !expanded.nodes().contains(node) {
                return Err(InferenceError::InvalidModel(format!("CPT given for unknown node {node}")).into());
            }
            let canonical = expanded.parents(node);
            let as_set = |v: &[NodeId]| v.iter().collect::<NodeSet>();
            if entry.parents.len() != canonical.len() || as_set(&entry.parents) != as_set(&canonical) {
                return Err(ModelFileError::Parents {
                    node: node.clone(),
                    expected: canonical,
                    found: entry.parents.clone(),
                });
            }
            let mut scope = entry.parents.clone();
            scope.push(node.clone());
            let mut cards = Vec::with_capacity(scope.len());
            for n in &scope {
                let c = *self
                    .cardinalities
                    .get(n)
                    .ok_or_else(|| InferenceError::InvalidModel(format!("no cardinality for {n}")))?;
                cards.push(c);
            }
            let want: usize = cards.iter().product();
            if entry.values.len() != want {
                return Err(InferenceError::InvalidModel(format!(
                    "CPT for {node} has {} entries, expected {want}",
                    entry.values.len()
                ))
                .into());
            }
            let mut order = canonical;
            order.push(node.clone());
            let table = Factor::new(scope, cards, entry.values.clone()).reorder(&order);
            tables.insert(node.clone(), table.values().to_vec());
        }
        let model = if self.signed {
            DiscreteModel::new_signed(graph.clone(), self.cardinalities.clone(), tables)?
        } else {
            DiscreteModel::new(graph.clone(), self.cardinalities.clone(), tables)?
        };
        Ok(model)
    }
}
