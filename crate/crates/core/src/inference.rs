//! Exact enumeration over discrete models.
//!
//! Conventions: `0·ln 0 = 0` and `0/0 = 0` everywhere. All information
//! quantities are in nats.

use std::collections::{BTreeMap, HashMap};
use std::cell::RefCell;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::Serialize;
use thiserror::Error;

use crate::estimand::{Estimand, Var};
use crate::graph::{latent_expand, CausalGraph, ExpandedGraph, NodeId, NodeSet};
use crate::table::{Factor, States};

/// Dense table over named nodes.
pub type JointTable = Factor<NodeId>;

/// Default cap on the number of joint states enumerated.
pub const DEFAULT_STATE_CAP: u128 = 1 << 24;

const COLUMN_TOLERANCE: f64 = 1e-12;
/// Slack on the `[0,1]` range check, for entries built by floating-point
/// formulas that are exactly 0 or 1 in exact arithmetic.
const RANGE_TOLERANCE: f64 = 1e-12;

fn in_range(v: f64) -> bool {
    (-RANGE_TOLERANCE..=1.0 + RANGE_TOLERANCE).contains(&v)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("joint state space has {states} states, above the cap of {cap}")]
    StateSpaceTooLarge { states: u128, cap: u128 },
    #[error("zero denominator in {factor} at {state}")]
    ZeroDenominator { factor: String, state: String },
    #[error("relative entropy is infinite: q vanishes where p does not")]
    SupportMismatch,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("invalid estimand: {0}")]
    InvalidEstimand(String),
}

/// Cardinalities and CPTs over the latent-expanded graph.
///
/// The CPT of node `n` is a table with scope `[parents..., n]`, parents in
/// the canonical order of [`ExpandedGraph::parents`].
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteModel {
    graph: CausalGraph,
    expanded: ExpandedGraph,
    cards: BTreeMap<NodeId, usize>,
    cpts: BTreeMap<NodeId, JointTable>,
}

impl DiscreteModel {
    /// Validates shapes, column sums and the `[0,1]` range.
    ///
    /// `tables[n]` is row-major over `[parents..., n]`.
    pub fn new(
        graph: CausalGraph,
        cards: BTreeMap<NodeId, usize>,
        tables: BTreeMap<NodeId, Vec<f64>>,
    ) -> Result<Self, InferenceError> {
        Self::build(graph, cards, tables, true)
    }

    /// Like [`DiscreteModel::new`] but allows entries outside `[0,1]`.
    /// Columns must still sum to one. Used for signed constructions whose
    /// marginals are checked against closed forms.
    pub fn new_signed(
        graph: CausalGraph,
        cards: BTreeMap<NodeId, usize>,
        tables: BTreeMap<NodeId, Vec<f64>>,
    ) -> Result<Self, InferenceError> {
        Self::build(graph, cards, tables, false)
    }

    /// Builds every CPT from `f(node, state)` where `state` holds the node's
    /// value and its parents' values.
    pub fn from_fn(
        graph: CausalGraph,
        cards: BTreeMap<NodeId, usize>,
        f: impl Fn(&NodeId, &BTreeMap<NodeId, usize>) -> f64,
    ) -> Result<Self, InferenceError> {
        let tables = tables_from_fn(&graph, &cards, f)?;
        Self::new(graph, cards, tables)
    }

    /// Signed counterpart of [`DiscreteModel::from_fn`].
    pub fn from_fn_signed(
        graph: CausalGraph,
        cards: BTreeMap<NodeId, usize>,
        f: impl Fn(&NodeId, &BTreeMap<NodeId, usize>) -> f64,
    ) -> Result<Self, InferenceError> {
        let tables = tables_from_fn(&graph, &cards, f)?;
        Self::new_signed(graph, cards, tables)
    }

    fn build(
        graph: CausalGraph,
        cards: BTreeMap<NodeId, usize>,
        tables: BTreeMap<NodeId, Vec<f64>>,
        check_range: bool,
    ) -> Result<Self, InferenceError> {
        let expanded = latent_expand(&graph);
        let nodes = expanded.ordered_nodes();
        for n in &nodes {
            match cards.get(n) {
                Some(&c) if c >= 2 => {}
                Some(&c) => return Err(InferenceError::InvalidModel(format!("cardinality of {n} is {c}, need at least 2"))),
                None => return Err(InferenceError::InvalidModel(format!("no cardinality for {n}"))),
            }
        }
        if let Some(extra) = cards.keys().find(|k| !nodes.contains(k)) {
            return Err(InferenceError::InvalidModel(format!("cardinality given for unknown node {extra}")));
        }
        if let Some(extra) = tables.keys().find(|k| !nodes.contains(k)) {
            return Err(InferenceError::InvalidModel(format!("CPT given for unknown node {extra}")));
        }
        let mut cpts = BTreeMap::new();
        for n in &nodes {
            let values = tables
                .get(n)
                .ok_or_else(|| InferenceError::InvalidModel(format!("missing CPT for {n}")))?
                .clone();
            let mut scope = expanded.parents(n);
            scope.push(n.clone());
            let dims: Vec<usize> = scope.iter().map(|m| cards[m]).collect();
            let want: usize = dims.iter().product();
            if values.len() != want {
                return Err(InferenceError::InvalidModel(format!(
                    "CPT for {n} has {} entries, expected {want}",
                    values.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(InferenceError::InvalidModel(format!("CPT for {n} has a non-finite entry")));
            }
            if check_range && values.iter().any(|&v| !in_range(v)) {
                return Err(InferenceError::InvalidModel(format!("CPT for {n} has an entry outside [0,1]")));
            }
            let k = cards[n];
            for (row, column) in values.chunks(k).enumerate() {
                let s: f64 = column.iter().sum();
                if (s - 1.0).abs() > COLUMN_TOLERANCE {
                    return Err(InferenceError::InvalidModel(format!(
                        "CPT for {n}, parent row {row}, sums to {s}"
                    )));
                }
            }
            cpts.insert(n.clone(), Factor::new(scope, dims, values));
        }
        Ok(DiscreteModel { graph, expanded, cards, cpts })
    }

    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    pub fn expanded(&self) -> &ExpandedGraph {
        &self.expanded
    }

    pub fn cardinality(&self, n: &NodeId) -> usize {
        self.cards[n]
    }

    pub fn cardinalities(&self) -> &BTreeMap<NodeId, usize> {
        &self.cards
    }

    /// CPT of `n`, scope `[parents..., n]`.
    pub fn cpt(&self, n: &NodeId) -> &JointTable {
        &self.cpts[n]
    }

    pub fn parents(&self, n: &NodeId) -> &[NodeId] {
        let s = self.cpts[n].scope();
        &s[..s.len() - 1]
    }

    /// Whether every CPT entry lies in `[0,1]`.
    pub fn is_stochastic(&self) -> bool {
        self.cpts.values().all(|t| t.values().iter().all(|&v| in_range(v)))
    }

    /// Observed joint over the visible nodes (lexicographic scope).
    pub fn observed(&self) -> Result<JointTable, InferenceError> {
        let j = joint(self)?;
        Ok(j.marginal(&self.graph.visible().to_vec()))
    }

    fn check_cap(&self, cap: u128) -> Result<(), InferenceError> {
        let states: u128 = self.cards.values().map(|&c| c as u128).product();
        if states > cap {
            Err(InferenceError::StateSpaceTooLarge { states, cap })
        } else {
            Ok(())
        }
    }
}

fn tables_from_fn(
    graph: &CausalGraph,
    cards: &BTreeMap<NodeId, usize>,
    f: impl Fn(&NodeId, &BTreeMap<NodeId, usize>) -> f64,
) -> Result<BTreeMap<NodeId, Vec<f64>>, InferenceError> {
    let expanded = latent_expand(graph);
    let mut tables = BTreeMap::new();
    for n in expanded.ordered_nodes() {
        let mut scope = expanded.parents(&n);
        scope.push(n.clone());
        let dims = scope
            .iter()
            .map(|m| cards.get(m).copied().ok_or_else(|| InferenceError::InvalidModel(format!("no cardinality for {m}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let values = States::new(&dims)
            .map(|st| {
                let state: BTreeMap<NodeId, usize> = scope.iter().cloned().zip(st).collect();
                f(&n, &state)
            })
            .collect();
        tables.insert(n, values);
    }
    Ok(tables)
}

/// Full joint over every expanded node, scope in canonical node order.
pub fn joint(model: &DiscreteModel) -> Result<JointTable, InferenceError> {
    joint_with_cap(model, DEFAULT_STATE_CAP)
}

pub fn joint_with_cap(model: &DiscreteModel, cap: u128) -> Result<JointTable, InferenceError> {
    model.check_cap(cap)?;
    let order = model.expanded.ordered_nodes();
    let mut acc = Factor::scalar(1.0);
    for n in &order {
        acc = acc.product(&model.cpts[n]);
    }
    Ok(acc.reorder(&order))
}

fn check_visible(model: &DiscreteModel, set: &NodeSet, what: &str) -> Result<(), InferenceError> {
    match set.iter().find(|n| !model.graph.visible().contains(n)) {
        Some(n) => Err(InferenceError::InvalidQuery(format!("{what} node {n} is not visible"))),
        None => Ok(()),
    }
}

/// `P(s | do(t))` for every `t` state, by truncated factorization. Scope is
/// `[t..., s...]`, each block lexicographic.
pub fn do_distribution(model: &DiscreteModel, s: &NodeSet, t: &NodeSet) -> Result<JointTable, InferenceError> {
    check_visible(model, s, "outcome")?;
    check_visible(model, t, "intervention")?;
    if !s.is_disjoint(t) {
        return Err(InferenceError::InvalidQuery("outcome and intervention overlap".into()));
    }
    model.check_cap(DEFAULT_STATE_CAP)?;
    let mut acc = Factor::scalar(1.0);
    for n in model.expanded.ordered_nodes() {
        if !t.contains(&n) {
            acc = acc.product(&model.cpts[&n]);
        }
    }
    let t_cards: Vec<(NodeId, usize)> = t.iter().map(|n| (n.clone(), model.cards[n])).collect();
    let acc = acc.broadcast(&t_cards);
    let keep: Vec<NodeId> = t.iter().chain(s.iter()).cloned().collect();
    Ok(acc.marginal(&keep))
}

/// `P(s | do(t = values))`, scope `s`.
pub fn do_distribution_at(
    model: &DiscreteModel,
    s: &NodeSet,
    t_values: &BTreeMap<NodeId, usize>,
) -> Result<JointTable, InferenceError> {
    let t: NodeSet = t_values.keys().cloned().collect();
    let mut table = do_distribution(model, s, &t)?;
    for (n, v) in t_values {
        table = table.slice(n, *v);
    }
    Ok(table)
}

struct Evaluator<'a> {
    observed: &'a JointTable,
    cache: RefCell<HashMap<Vec<NodeId>, JointTable>>,
}

impl Evaluator<'_> {
    fn marginal(&self, nodes: &[NodeId]) -> JointTable {
        let mut key = nodes.to_vec();
        key.sort();
        if let Some(t) = self.cache.borrow().get(&key) {
            return t.clone();
        }
        let t = self.observed.marginal(&key);
        self.cache.borrow_mut().insert(key, t.clone());
        t
    }

    fn card(&self, v: &Var) -> Result<usize, InferenceError> {
        self.observed
            .card_of(&v.node)
            .ok_or_else(|| InferenceError::InvalidEstimand(format!("{} is not an observed variable", v.node)))
    }

    fn eval(&self, e: &Estimand) -> Result<Factor<Var>, InferenceError> {
        match e {
            Estimand::ObservedConditional { target, given } => {
                let vars: Vec<&Var> = target.iter().chain(given).collect();
                let mut by_node: BTreeMap<NodeId, Var> = BTreeMap::new();
                for v in &vars {
                    self.card(v)?;
                    if by_node.insert(v.node.clone(), (*v).clone()).is_some() {
                        return Err(InferenceError::InvalidEstimand(format!("{} appears twice in {e}", v.node)));
                    }
                }
                let all: Vec<NodeId> = vars.iter().map(|v| v.node.clone()).collect();
                let num = self.marginal(&all);
                let table = if given.is_empty() {
                    num
                } else {
                    let cond: Vec<NodeId> = given.iter().map(|v| v.node.clone()).collect();
                    num.divide(&self.marginal(&cond))
                };
                Ok(table.rename(|n| by_node[n].clone()))
            }
            Estimand::Product(fs) => {
                let mut acc = Factor::scalar(1.0);
                for f in fs {
                    acc = acc.product(&self.eval(f)?);
                }
                Ok(acc)
            }
            Estimand::Marginalize { vars, body } => {
                let mut b = self.eval(body)?;
                for v in vars {
                    if b.card_of(v).is_none() {
                        let k = self.card(v)? as f64;
                        b = b.map(|x| x * k);
                    }
                }
                Ok(b.sum_out(vars))
            }
            Estimand::Ratio { numerator, denominator } => {
                let n = self.eval(numerator)?;
                let d = self.eval(denominator)?;
                let q = n.divide(&d);
                if let Some((state, _)) = q.iter().find(|(_, v)| v.is_infinite()) {
                    let at: Vec<String> = q.scope().iter().zip(&state).map(|(v, s)| format!("{v}={s}")).collect();
                    return Err(InferenceError::ZeroDenominator { factor: e.plain(), state: at.join(",") });
                }
                Ok(q)
            }
        }
    }
}

/// Evaluates an estimand on an observed joint. The result's scope is the
/// estimand's free variables in lexicographic order.
pub fn evaluate_estimand(e: &Estimand, observed: &JointTable) -> Result<JointTable, InferenceError> {
    let ev = Evaluator { observed, cache: RefCell::new(HashMap::new()) };
    let table = ev.eval(e)?;
    if let Some(v) = table.scope().iter().find(|v| v.primes != 0) {
        return Err(InferenceError::InvalidEstimand(format!("free primed variable {v}")));
    }
    let mut order: Vec<Var> = table.scope().to_vec();
    order.sort();
    Ok(table.reorder(&order).rename(|v| v.node.clone()))
}

/// Max-norm gap between an estimand evaluated on the model's observed
/// joint and the truncated-factorization `P(s|do(t))`.
///
/// The estimand may keep the value of an uprooted node as an extra free
/// variable (the reference forms do); both tables are compared over
/// the union of their scopes, so the gap also bounds any dependence on it.
pub fn estimand_gap(model: &DiscreteModel, e: &Estimand, s: &NodeSet, t: &NodeSet) -> Result<f64, InferenceError> {
    let truth = do_distribution(model, s, t)?;
    let got = evaluate_estimand(e, &model.observed()?)?;
    let widen = |f: &JointTable, other: &JointTable| -> JointTable {
        let extra: Vec<(NodeId, usize)> = other.scope().iter().map(|n| (n.clone(), model.cards[n])).collect();
        f.broadcast(&extra)
    };
    let a = widen(&truth, &got);
    let b = widen(&got, &truth);
    Ok(a.max_abs_diff(&b))
}

/// `D(p // q) = Σ p ln(p/q)`.
pub fn relative_entropy(p: &JointTable, q: &JointTable) -> Result<f64, InferenceError> {
    let q = q.reorder(p.scope());
    let mut d = 0.0;
    for (&a, &b) in p.values().iter().zip(q.values()) {
        if a > 0.0 {
            if b <= 0.0 {
                return Err(InferenceError::SupportMismatch);
            }
            d += a * (a / b).ln();
        }
    }
    Ok(d)
}

/// The information family of one `(b, a, e)` triple, in nats.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct InfoReport {
    /// `H(b:a)`
    pub h_mi: f64,
    /// `H(b:â)`
    pub h_uprooted_mi: f64,
    /// `H(b:a|e)`
    pub h_cmi: f64,
    /// `H(b:â|e)`
    pub h_uprooted_cmi: f64,
    /// `H_loss(b:â)`
    pub loss_mi: f64,
    /// `H_loss(b:â|e)`
    pub loss_cmi: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Family {
    h: f64,
    h_hat: f64,
    loss: f64,
}

fn family(model: &DiscreteModel, obs: &JointTable, b: &NodeSet, a: &NodeSet, e: &NodeSet) -> Result<Family, InferenceError> {
    let av = a.to_vec();
    let bv = b.to_vec();
    let ev = e.to_vec();
    let abe: Vec<NodeId> = av.iter().chain(&bv).chain(&ev).cloned().collect();
    let ae: Vec<NodeId> = av.iter().chain(&ev).cloned().collect();
    let be: Vec<NodeId> = bv.iter().chain(&ev).cloned().collect();

    let p_abe = obs.marginal(&abe);
    let p_b_ae = p_abe.divide(&obs.marginal(&ae)).reorder(&abe);
    let p_b_e = obs.marginal(&be).divide(&obs.marginal(&ev));
    let p_b_e = p_b_e.broadcast(&av.iter().map(|n| (n.clone(), model.cards[n])).collect::<Vec<_>>()).reorder(&abe);

    let bu: NodeSet = b.union(e);
    let hat = do_distribution(model, &bu, a)?.reorder(&abe);
    let p_b_hat_e = hat.divide(&hat.marginal(&ae)).reorder(&abe);

    let mut h = 0.0;
    let mut h_hat = 0.0;
    for ((&p, &c), (&m, &u)) in p_abe
        .values()
        .iter()
        .zip(p_b_ae.values())
        .zip(p_b_e.values().iter().zip(p_b_hat_e.values()))
    {
        if p > 0.0 {
            h += p * (c / m).ln();
            h_hat += p * (u / m).ln();
        }
    }

    // loss as a P(a,e)-weighted relative entropy, computed slice by slice
    let p_ae = obs.marginal(&ae);
    let b_cards: Vec<usize> = bv.iter().map(|n| model.cards[n]).collect();
    let mut loss = 0.0;
    for (ae_state, w) in p_ae.iter() {
        if w <= 0.0 {
            continue;
        }
        let mut fixed: BTreeMap<NodeId, usize> = ae.iter().cloned().zip(ae_state).collect();
        let mut p_vals = Vec::new();
        let mut q_vals = Vec::new();
        for b_state in States::new(&b_cards) {
            for (n, s) in bv.iter().zip(&b_state) {
                fixed.insert(n.clone(), *s);
            }
            p_vals.push(p_b_ae.get_named(&fixed));
            q_vals.push(p_b_hat_e.get_named(&fixed));
        }
        let p = Factor::new(bv.clone(), b_cards.clone(), p_vals);
        let q = Factor::new(bv.clone(), b_cards.clone(), q_vals);
        loss += w * relative_entropy(&p, &q)?;
    }
    Ok(Family { h, h_hat, loss })
}

/// `H(b:a|e)`, `H(b:â|e)`, their unconditional versions and both losses.
/// Averages are taken under the model's observational joint.
pub fn info_measures(model: &DiscreteModel, b: &NodeSet, a: &NodeSet, e: &NodeSet) -> Result<InfoReport, InferenceError> {
    for (set, what) in [(b, "b"), (a, "a"), (e, "e")] {
        check_visible(model, set, what)?;
    }
    if !b.is_disjoint(a) || !b.is_disjoint(e) || !a.is_disjoint(e) {
        return Err(InferenceError::InvalidQuery("b, a and e must be disjoint".into()));
    }
    let obs = model.observed()?;
    let uncond = family(model, &obs, b, a, &NodeSet::new())?;
    let cond = if e.is_empty() { uncond } else { family(model, &obs, b, a, e)? };
    Ok(InfoReport {
        h_mi: uncond.h,
        h_uprooted_mi: uncond.h_hat,
        h_cmi: cond.h,
        h_uprooted_cmi: cond.h_hat,
        loss_mi: uncond.loss,
        loss_cmi: cond.loss,
    })
}

/// Conditional entropy `H(b|a)` of the observed joint.
pub fn conditional_entropy(model: &DiscreteModel, b: &NodeSet, a: &NodeSet) -> Result<f64, InferenceError> {
    let obs = model.observed()?;
    let ab: Vec<NodeId> = a.iter().chain(b.iter()).cloned().collect();
    let p_ab = obs.marginal(&ab);
    let cond = p_ab.divide(&obs.marginal(&a.to_vec()));
    Ok(-p_ab
        .values()
        .iter()
        .zip(cond.reorder(&ab).values())
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, c)| p * c.ln())
        .sum::<f64>())
}

/// Random model with flat-Dirichlet CPT columns, determined by `seed`.
/// Nodes missing from `cards` are binary.
pub fn random_model(graph: &CausalGraph, cards: &BTreeMap<NodeId, usize>, seed: u64) -> DiscreteModel {
    random_model_with_concentration(graph, cards, seed, 1.0)
}

/// Binary random model.
pub fn random_binary_model(graph: &CausalGraph, seed: u64) -> DiscreteModel {
    random_model(graph, &BTreeMap::new(), seed)
}

/// Random model with symmetric Dirichlet(`alpha`) columns. Small `alpha`
/// gives near-deterministic CPTs.
pub fn random_model_with_concentration(
    graph: &CausalGraph,
    cards: &BTreeMap<NodeId, usize>,
    seed: u64,
    alpha: f64,
) -> DiscreteModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let expanded = latent_expand(graph);
    let all_cards: BTreeMap<NodeId, usize> = expanded
        .ordered_nodes()
        .into_iter()
        .map(|n| {
            let c = cards.get(&n).copied().unwrap_or(2);
            (n, c)
        })
        .collect();
    let gamma = Gamma::new(alpha, 1.0).expect("positive concentration");
    let mut tables = BTreeMap::new();
    for n in expanded.ordered_nodes() {
        let rows: usize = expanded.parents(&n).iter().map(|p| all_cards[p]).product();
        let k = all_cards[&n];
        let mut values = Vec::with_capacity(rows * k);
        for _ in 0..rows {
            let mut col: Vec<f64> = (0..k)
                .map(|_| {
                    let x: f64 = if alpha == 1.0 { Exp1.sample(&mut rng) } else { gamma.sample(&mut rng) };
                    x.max(f64::MIN_POSITIVE)
                })
                .collect();
            let s: f64 = col.iter().sum();
            col.iter_mut().for_each(|x| *x /= s);
            values.extend(col);
        }
        tables.insert(n, values);
    }
    DiscreteModel::new(graph.clone(), all_cards, tables).expect("random model is valid by construction")
}
