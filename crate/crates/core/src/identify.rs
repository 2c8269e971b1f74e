//! Identification of `P(s | do(t))` from the observed distribution.
//!
//! The algorithms work on a current subgraph `β` together with a *base*,
//! an estimand for `Q[β] = P(β | (v−β)^)`. At the top level `β` is the
//! visible set and the base is the observed joint itself.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::dsep::{rule2_premise, rule3_premise, RulePremiseQuery};
use crate::estimand::{Estimand, Var};
use crate::graph::{
    ancestral_closure, c_components, induced_subgraph, topological_order, CausalGraph, NodeId, NodeSet,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentifyError {
    #[error("{block} is not a c-component of the subgraph on {h}")]
    InvalidBlock { block: NodeSet, h: NodeSet },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Rule2,
    Rule3,
    Prune,
    Fail,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Rule2 => "rule2",
            Action::Rule3 => "rule3",
            Action::Prune => "prune",
            Action::Fail => "fail",
        }
    }
}

/// One round of an expression subroutine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    /// recursion depth, 0 for the top-level call
    pub depth: usize,
    pub sigma: NodeSet,
    pub t: NodeSet,
    pub beta: NodeSet,
    /// `an(σ)` in `G_{β−t}`
    pub d: NodeSet,
    /// the c-component of `G_β` that contains `t` (`𝒱`)
    pub component: NodeSet,
    /// `d ∩ 𝒱` (`𝒟`)
    pub big_d: NodeSet,
    pub action: Action,
}

/// The final `(𝒟, graph)` pair of a failed expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub d: NodeSet,
    pub graph: CausalGraph,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Identifiable { estimand: Estimand },
    NotIdentifiable { witness: Witness },
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentifyTrace {
    pub s: NodeSet,
    pub t: NodeSet,
    pub steps: Vec<TraceStep>,
    pub verdict: Verdict,
}

impl IdentifyTrace {
    pub fn is_identifiable(&self) -> bool {
        matches!(self.verdict, Verdict::Identifiable { .. })
    }

    pub fn estimand(&self) -> Option<&Estimand> {
        match &self.verdict {
            Verdict::Identifiable { estimand } => Some(estimand),
            Verdict::NotIdentifiable { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.verdict {
            Verdict::NotIdentifiable { witness } => Some(witness),
            Verdict::Identifiable { .. } => None,
        }
    }
}

/// Estimand for `Q[β]`.
#[derive(Clone, Debug, PartialEq)]
enum Base {
    /// `Q[β] = P(β)`
    Observed,
    Expr(Estimand),
}

fn vars(set: &NodeSet) -> Vec<Var> {
    set.iter().cloned().map(Var::plain).collect()
}

fn vars_ordered(nodes: &[NodeId]) -> Vec<Var> {
    nodes.iter().cloned().map(Var::plain).collect()
}

/// `Σ_{β−keep} Q[β]`
fn base_marginal(base: &Base, beta: &NodeSet, keep: &NodeSet) -> Estimand {
    match base {
        Base::Observed => Estimand::marginal(vars(keep)),
        Base::Expr(e) => Estimand::marginalize(vars(&beta.difference(keep)), e.clone()),
    }
}

/// `Q[β](target | given)` with `given` listed in the order supplied.
fn base_conditional(base: &Base, beta: &NodeSet, target: &[NodeId], given: &[NodeId]) -> Estimand {
    match base {
        Base::Observed => Estimand::prob(vars_ordered(target), vars_ordered(given)),
        Base::Expr(_) => {
            let t: NodeSet = target.iter().collect();
            let g: NodeSet = given.iter().collect();
            let num = base_marginal(base, beta, &t.union(&g));
            if g.is_empty() {
                num
            } else {
                Estimand::ratio(num, base_marginal(base, beta, &g))
            }
        }
    }
}

/// Base for an ancestral subset of `β`.
fn restrict(base: Base, beta: &NodeSet, keep: &NodeSet) -> Base {
    match base {
        Base::Observed => Base::Observed,
        Base::Expr(e) => Base::Expr(Estimand::marginalize(vars(&beta.difference(keep)), e)),
    }
}

/// `Q[block]` as a chain of conditionals of `Q[β]`.
fn q_block(graph: &CausalGraph, base: &Base, beta: &NodeSet, block: &NodeSet) -> Estimand {
    let order = topological_order(graph, beta);
    let pos = |n: &NodeId| order.iter().position(|m| m == n).expect("node in β");
    let mut members: Vec<&NodeId> = block.iter().collect();
    members.sort_by_key(|n| std::cmp::Reverse(pos(n)));
    let factors = members
        .into_iter()
        .map(|v| {
            let mut given: Vec<NodeId> = if block.len() == 1 {
                graph.parents(v).intersection(beta).to_vec()
            } else {
                order[..pos(v)].to_vec()
            };
            given.sort_by_key(|n| std::cmp::Reverse(pos(n)));
            base_conditional(base, beta, std::slice::from_ref(v), &given)
        })
        .collect();
    Estimand::product(factors)
}

fn q_of_block(graph: &CausalGraph, base: &Base, beta: &NodeSet, block: &NodeSet) -> Base {
    if block == beta {
        base.clone()
    } else {
        Base::Expr(q_block(graph, base, beta, block))
    }
}

/// `Q[block]` expanded over `Q[h] = P(h)`.
///
/// The factors are conditionals of the caller's distribution over `h`;
/// with `h` the visible set they are plain observed conditionals.
pub fn q_chain_expand(graph: &CausalGraph, h: &NodeSet, block: &NodeSet) -> Result<Estimand, IdentifyError> {
    let sub = induced_subgraph(graph, h);
    if !c_components(&sub).contains(block) {
        return Err(IdentifyError::InvalidBlock { block: block.clone(), h: h.clone() });
    }
    Ok(q_block(graph, &Base::Observed, h, block))
}

/// The pieces of `P(σ|t̂) = Σ_{d−σ} P(𝒟|𝒱^{c∧},t̂) Π_γ P(d_γ|γ^{c∧})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pie {
    pub d: NodeSet,
    /// `𝒱`
    pub component: NodeSet,
    /// `𝒟 = d ∩ 𝒱`
    pub big_d: NodeSet,
    /// `(d_γ, γ)` for the other blocks meeting `d`
    pub others: Vec<(NodeSet, NodeSet)>,
}

pub fn upsilon_decompose(graph: &CausalGraph, sigma: &NodeSet, t: &NodeId, beta: &NodeSet) -> Pie {
    let d = ancestral_closure(graph, sigma, &beta.without(t));
    let mut component = NodeSet::singleton(t.clone());
    let mut others = Vec::new();
    for block in c_components(&induced_subgraph(graph, beta)) {
        if block.contains(t) {
            component = block;
        } else {
            let dg = d.intersection(&block);
            if !dg.is_empty() {
                others.push((dg, block));
            }
        }
    }
    let big_d = d.intersection(&component);
    Pie { d, component, big_d, others }
}

/// `P(d_γ | (β−γ)^)` for a block free of interventions.
fn other_term(graph: &CausalGraph, base: &Base, beta: &NodeSet, dg: &NodeSet, block: &NodeSet) -> Estimand {
    let hatted = beta.difference(block).intersection(&ancestral_closure(graph, dg, beta));
    if hatted.is_empty() {
        return base_marginal(base, beta, dg);
    }
    let q = q_block(graph, base, beta, block);
    if dg == block {
        q
    } else {
        Estimand::marginalize(vars(&block.difference(dg)), q)
    }
}

/// `Σ_outer Π factors` with leaf factors listed first.
fn assemble(outer: &NodeSet, factors: Vec<Estimand>) -> Estimand {
    let body = match Estimand::product(factors) {
        Estimand::Product(mut fs) => {
            fs.sort_by_key(|f| !matches!(f, Estimand::ObservedConditional { .. }));
            Estimand::Product(fs)
        }
        single => single,
    };
    Estimand::marginalize(vars(outer), body)
}

struct Ctx<'g> {
    graph: &'g CausalGraph,
    steps: Vec<TraceStep>,
}

impl Ctx<'_> {
    #[allow(clippy::too_many_arguments)]
    fn step(&mut self, depth: usize, sigma: &NodeSet, t: &NodeSet, beta: &NodeSet, pie: Option<&Pie>, action: Action) {
        let (d, component, big_d) = match pie {
            Some(p) => (p.d.clone(), p.component.clone(), p.big_d.clone()),
            None => (sigma.clone(), NodeSet::new(), NodeSet::new()),
        };
        self.steps.push(TraceStep {
            depth,
            sigma: sigma.clone(),
            t: t.clone(),
            beta: beta.clone(),
            d,
            component,
            big_d,
            action,
        });
    }

    fn express_one(
        &mut self,
        depth: usize,
        mut sigma: NodeSet,
        t: &NodeId,
        mut beta: NodeSet,
        mut base: Base,
    ) -> Result<Estimand, Witness> {
        let graph = self.graph;
        let ts = NodeSet::singleton(t.clone());
        let mut rounds: Vec<(NodeSet, Vec<Estimand>)> = Vec::new();
        let innermost = loop {
            let pie = upsilon_decompose(graph, &sigma, t, &beta);
            let mut factors: Vec<Estimand> = pie
                .others
                .iter()
                .map(|(dg, block)| other_term(graph, &base, &beta, dg, block))
                .collect();
            let outer = pie.d.difference(&sigma);
            if pie.big_d.is_empty() {
                self.step(depth, &sigma, &ts, &beta, Some(&pie), Action::Rule3);
                break assemble(&outer, factors);
            }
            let sub = induced_subgraph(graph, &beta);
            let v = &pie.component;
            let held = beta.difference(v);
            let q = RulePremiseQuery::new(pie.big_d.clone(), ts.clone(), held.clone());
            if rule2_premise(&sub, &q) {
                self.step(depth, &sigma, &ts, &beta, Some(&pie), Action::Rule2);
                let dt = pie.big_d.with(t);
                let hatted = held.intersection(&ancestral_closure(graph, &dt, &beta));
                let term = if hatted.is_empty() {
                    base_conditional(&base, &beta, &pie.big_d.to_vec(), std::slice::from_ref(t))
                } else {
                    let qv = q_of_block(graph, &base, &beta, v);
                    let num = base_marginal(&qv, v, &dt);
                    let den = Estimand::marginalize(vars(&pie.big_d), num.clone());
                    Estimand::ratio(num, den)
                };
                factors.insert(0, term);
                break assemble(&outer, factors);
            }
            if rule3_premise(&sub, &q) {
                self.step(depth, &sigma, &ts, &beta, Some(&pie), Action::Rule3);
                let hatted = held.intersection(&ancestral_closure(graph, &pie.big_d, &beta));
                let term = if hatted.is_empty() {
                    base_marginal(&base, &beta, &pie.big_d)
                } else {
                    let qv = q_of_block(graph, &base, &beta, v);
                    base_marginal(&qv, v, &pie.big_d)
                };
                factors.insert(0, term);
                break assemble(&outer, factors);
            }
            let pruned = ancestral_closure(graph, &sigma.with(t), &beta);
            if pruned == beta {
                self.step(depth, &sigma, &ts, &beta, Some(&pie), Action::Fail);
                return Err(Witness { d: pie.big_d.clone(), graph: sub });
            }
            self.step(depth, &sigma, &ts, &beta, Some(&pie), Action::Prune);
            rounds.push((outer, factors));
            let qv = q_of_block(graph, &base, &beta, v);
            let new_beta = v.intersection(&pruned);
            base = restrict(qv, v, &new_beta);
            sigma = pie.big_d;
            beta = new_beta;
        };
        Ok(rounds.into_iter().rev().fold(innermost, |inner, (outer, mut factors)| {
            factors.push(inner);
            assemble(&outer, factors)
        }))
    }

    fn express(
        &mut self,
        depth: usize,
        sigma: NodeSet,
        t: NodeSet,
        beta: NodeSet,
        base: Base,
    ) -> Result<Estimand, Witness> {
        let graph = self.graph;
        let pruned = ancestral_closure(graph, &sigma.union(&t), &beta);
        let base = restrict(base, &beta, &pruned);
        let beta = pruned;
        let t_eff = t.intersection(&effective_ancestors(graph, &sigma, &t, &beta));
        if t_eff.is_empty() {
            self.step(depth, &sigma, &t, &beta, None, Action::Rule3);
            return Ok(base_marginal(&base, &beta, &sigma));
        }
        let (t, beta, base) = if t_eff != t {
            let pruned = ancestral_closure(graph, &sigma.union(&t_eff), &beta);
            let base = restrict(base, &beta, &pruned);
            (t_eff, pruned, base)
        } else {
            (t, beta, base)
        };
        if t.len() == 1 {
            let only = t.first().expect("singleton").clone();
            return self.express_one(depth, sigma, &only, beta, base);
        }
        let d = ancestral_closure(graph, &sigma, &beta.difference(&t));
        let mut factors = Vec::new();
        for block in c_components(&induced_subgraph(graph, &beta)) {
            let dg = d.intersection(&block);
            if dg.is_empty() {
                continue;
            }
            let tg = t.intersection(&block);
            let term = match tg.len() {
                0 => other_term(graph, &base, &beta, &dg, &block),
                1 => {
                    let qb = q_of_block(graph, &base, &beta, &block);
                    let only = tg.first().expect("singleton").clone();
                    self.express_one(depth + 1, dg, &only, block, qb)?
                }
                _ if dg == sigma && tg == t && block == beta => {
                    // one block holding everything: recursing would not progress
                    let sub = induced_subgraph(graph, &beta);
                    let q = RulePremiseQuery::new(sigma.clone(), t.clone(), NodeSet::new());
                    if rule3_premise(&sub, &q) {
                        self.step(depth, &sigma, &t, &beta, None, Action::Rule3);
                        base_marginal(&base, &beta, &sigma)
                    } else if rule2_premise(&sub, &q) {
                        self.step(depth, &sigma, &t, &beta, None, Action::Rule2);
                        base_conditional(&base, &beta, &sigma.to_vec(), &t.to_vec())
                    } else {
                        self.step(depth, &sigma, &t, &beta, None, Action::Fail);
                        return Err(Witness { d: sigma, graph: sub });
                    }
                }
                _ => {
                    let qb = q_of_block(graph, &base, &beta, &block);
                    self.express(depth + 1, dg, tg, block, qb)?
                }
            };
            factors.push(term);
        }
        if self.steps.last().is_none_or(|s| s.action == Action::Prune) {
            self.step(depth, &sigma, &t, &beta, None, Action::Rule3);
        }
        Ok(assemble(&d.difference(&sigma), factors))
    }
}

/// Ancestors of `σ` in `G_β` once the edges into `t` are cut.
fn effective_ancestors(graph: &CausalGraph, sigma: &NodeSet, t: &NodeSet, beta: &NodeSet) -> NodeSet {
    let mut seen = sigma.clone();
    let mut stack: Vec<NodeId> = sigma.to_vec();
    while let Some(n) = stack.pop() {
        if t.contains(&n) {
            continue;
        }
        for p in graph.parents(&n).intersection(beta) {
            if seen.insert(p.clone()) {
                stack.push(p);
            }
        }
    }
    seen
}

fn finish(s: &NodeSet, t: &NodeSet, steps: Vec<TraceStep>, result: Result<Estimand, Witness>) -> IdentifyTrace {
    let verdict = match result {
        Ok(e) => {
            let reserved: BTreeSet<Var> = s.union(t).iter().cloned().map(Var::plain).collect();
            Verdict::Identifiable { estimand: e.prime_bound(&reserved) }
        }
        Err(witness) => Verdict::NotIdentifiable { witness },
    };
    IdentifyTrace { s: s.clone(), t: t.clone(), steps, verdict }
}

/// `P(σ | do(t))` for a single intervened node. Nodes outside `β` are
/// ignored; the query is answered in `G_β`.
pub fn pv_express_one(graph: &CausalGraph, sigma: &NodeSet, t: &NodeId, beta: &NodeSet) -> IdentifyTrace {
    let sub = induced_subgraph(graph, beta);
    let mut ctx = Ctx { graph: &sub, steps: Vec::new() };
    let result = ctx.express_one(0, sigma.clone(), t, beta.clone(), Base::Observed);
    finish(sigma, &NodeSet::singleton(t.clone()), ctx.steps, result)
}

/// `P(σ | do(t))` for any intervention set, answered in `G_β`.
pub fn pv_express(graph: &CausalGraph, sigma: &NodeSet, t: &NodeSet, beta: &NodeSet) -> IdentifyTrace {
    let sub = induced_subgraph(graph, beta);
    let mut ctx = Ctx { graph: &sub, steps: Vec::new() };
    let result = if t.is_empty() {
        ctx.step(0, sigma, t, beta, None, Action::Rule3);
        Ok(Estimand::marginal(vars(sigma)))
    } else {
        ctx.express(0, sigma.clone(), t.clone(), beta.clone(), Base::Observed)
    };
    finish(sigma, t, ctx.steps, result)
}

/// Checks the query and runs [`pv_express`] on the whole graph.
pub fn identify(graph: &CausalGraph, s: &NodeSet, t: &NodeSet) -> Result<IdentifyTrace, IdentifyError> {
    if s.is_empty() {
        return Err(IdentifyError::InvalidQuery("empty outcome set".into()));
    }
    if let Some(n) = s.union(t).iter().find(|n| !graph.visible().contains(n)) {
        return Err(IdentifyError::InvalidQuery(format!("unknown node {n}")));
    }
    if !s.is_disjoint(t) {
        return Err(IdentifyError::InvalidQuery("outcome and intervention overlap".into()));
    }
    Ok(pv_express(graph, s, t, graph.visible()))
}

/// True iff the sequence for `P(s | do(t))` ends in an application of
/// Rule 2 or Rule 3.
pub fn graphical_condition(graph: &CausalGraph, s: &NodeSet, t: &NodeId) -> bool {
    pv_express_one(graph, s, t, graph.visible()).is_identifiable()
}

/// `an(s ∪ t)` inside `G_β`, shrunk to `an(s)` when the single
/// intervened node is not an ancestor of `s`.
pub fn prune_query(graph: &CausalGraph, s: &NodeSet, t: &NodeSet, beta: &NodeSet) -> NodeSet {
    let an_s = ancestral_closure(graph, s, beta);
    if t.len() == 1 && !t.is_subset(&an_s) {
        return an_s;
    }
    ancestral_closure(graph, &s.union(t), beta)
}
