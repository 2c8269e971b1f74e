//! Causal effect identification in semi-Markovian graphs: d-separation,
//! do-calculus driven identification with traces, discrete inference and
//! information measures, and non-identifiability certificates.

pub mod dsep;
pub mod estimand;
pub mod graph;
pub mod identify;
pub mod inference;
pub mod model_file;
pub mod table;
pub mod counterexamples;

pub use dsep::{d_separated, rule2_premise, rule3_premise, RulePremiseQuery};
pub use estimand::{parse_plain, render_estimand, Estimand, Style, Var};
pub use graph::{CausalGraph, ExpandedGraph, GraphError, NodeId, NodeSet};
pub use identify::{identify, IdentifyError, IdentifyTrace, Verdict, Witness};
pub use inference::{DiscreteModel, InferenceError, InfoReport, JointTable};
