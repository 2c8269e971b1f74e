//! Concrete models for the example graphs, and two-model certificates of
//! non-identifiability.
//!
//! Latent `u_k` of a graph is the latent of its `k`-th bidirected arc
//! (see [`latent_expand`]). Constructors build CPTs from closed-form rules
//! over named parent states.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{latent_expand, CausalGraph, NodeId, NodeSet};
use crate::inference::{
    do_distribution, random_model, DiscreteModel, InferenceError, JointTable,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CounterexampleError {
    #[error("g0 = {g0} puts a CPT entry outside [0,1]")]
    InvalidG0 { g0: f64 },
    #[error("number of teeth must be at least {min}, got {n}")]
    InvalidSize { n: usize, min: usize },
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

pub type Mat2 = [[f64; 2]; 2];

fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// The rotation `Ω` and the averaging matrix `𝒜`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationKit {
    pub omega: Mat2,
    pub averaging: Mat2,
}

impl Default for RotationKit {
    fn default() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        RotationKit { omega: [[r, r], [-r, r]], averaging: [[0.5, 0.5], [0.5, 0.5]] }
    }
}

impl RotationKit {
    pub fn new() -> Self {
        Self::default()
    }

    /// `Ω m Ωᵀ`
    pub fn conjugate(&self, m: &Mat2) -> Mat2 {
        matmul(&matmul(&self.omega, m), &transpose(&self.omega))
    }

    pub fn multiply(a: &Mat2, b: &Mat2) -> Mat2 {
        matmul(a, b)
    }

    pub fn transpose(a: &Mat2) -> Mat2 {
        transpose(a)
    }
}

/// Two models of one graph and the query they disagree on.
#[derive(Clone, Debug, PartialEq)]
pub struct CounterexamplePair {
    pub model_a: DiscreteModel,
    pub model_b: DiscreteModel,
    pub s: NodeSet,
    pub t: NodeSet,
}

impl CounterexamplePair {
    /// Max-norm distance between the observed joints.
    pub fn observed_gap(&self) -> Result<f64, InferenceError> {
        Ok(self.model_a.observed()?.max_abs_diff(&self.model_b.observed()?))
    }

    /// Max-norm distance between `P(s|do(t))` of the two models.
    pub fn interventional_gap(&self) -> Result<f64, InferenceError> {
        let a = do_distribution(&self.model_a, &self.s, &self.t)?;
        let b = do_distribution(&self.model_b, &self.s, &self.t)?;
        Ok(a.max_abs_diff(&b))
    }

    pub fn interventional(&self) -> Result<(JointTable, JointTable), InferenceError> {
        Ok((
            do_distribution(&self.model_a, &self.s, &self.t)?,
            do_distribution(&self.model_b, &self.s, &self.t)?,
        ))
    }
}

type State = BTreeMap<NodeId, usize>;

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn latent(graph: &CausalGraph, a: &str, b: &str) -> NodeId {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    latent_expand(graph)
        .latent_of_arc()
        .iter()
        .find(|((p, q), _)| p.as_str() == a && q.as_str() == b)
        .map(|(_, u)| u.clone())
        .unwrap_or_else(|| panic!("no arc {a} <-> {b}"))
}

fn uniform_cards(graph: &CausalGraph, k: usize) -> BTreeMap<NodeId, usize> {
    latent_expand(graph).ordered_nodes().into_iter().map(|n| (n, k)).collect()
}

fn v(state: &State, n: &str) -> usize {
    state[&NodeId::from(n)]
}

fn sign(bit: usize) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn one_tooth_graph() -> CausalGraph {
    CausalGraph::from_names(&[], &[("x", "y")], &[("x", "y")]).expect("valid graph")
}

/// Builds a one-tooth model from `y(x, u)` and `x(u)` rules.
fn one_tooth_from(y_rule: impl Fn(usize, usize) -> usize, x_rule: impl Fn(usize) -> usize) -> DiscreteModel {
    let g = one_tooth_graph();
    let u = latent(&g, "x", "y");
    let cards = uniform_cards(&g, 2);
    DiscreteModel::from_fn(g, cards, |n, st| match n.as_str() {
        "y" => delta(st[n], y_rule(v(st, "x"), st[&u])),
        "x" => delta(st[n], x_rule(st[&u])),
        _ => 0.5,
    })
    .expect("one-tooth model is valid")
}

/// `P(y|x,u) = δ_y^{xu}`, `P(x|u) = δ_x^u` and its flipped partner
/// `P′(y|x,u) = P(ȳ|x̄,u)`, `P′(x|u) = P(x̄|u)`.
pub fn one_tooth_pair() -> CounterexamplePair {
    CounterexamplePair {
        model_a: one_tooth_from(|x, u| x & u, |u| u),
        model_b: one_tooth_from(|x, u| 1 - ((1 - x) & u), |u| 1 - u),
        s: NodeSet::of(&["y"]),
        t: NodeSet::of(&["x"]),
    }
}

/// `P(y|x,u) = δ_y^{x⊕u}`, `P(x|u) = δ_x^u`.
pub fn one_tooth_xor_model() -> DiscreteModel {
    one_tooth_from(|x, u| x ^ u, |u| u)
}

/// `N`-ary model of the confounded pair with `x = u` and `y = x − u mod N`,
/// so that `y` is constant and `H(y:x̂) = −ln N = −H(x|y)`.
pub fn indef_model(n: usize) -> Result<DiscreteModel, CounterexampleError> {
    if n < 2 {
        return Err(CounterexampleError::InvalidSize { n, min: 2 });
    }
    let g = one_tooth_graph();
    let u = latent(&g, "x", "y");
    let cards = uniform_cards(&g, n);
    let uu = u.clone();
    Ok(DiscreteModel::from_fn(g, cards, move |node, st| match node.as_str() {
        "y" => delta(st[node], (v(st, "x") + n - st[&uu]) % n),
        "x" => delta(st[node], st[&uu]),
        _ => 1.0 / n as f64,
    })?)
}

/// Random model of the confounded pair in which `u` is disconnected:
/// `P(x|u) = P(x)` and `P(y|x,u) = P(y|x)`.
pub fn indef_unconfounded_model(seed: u64) -> DiscreteModel {
    let g = one_tooth_graph();
    let u = latent(&g, "x", "y");
    let base = random_model(&one_tooth_graph(), &BTreeMap::new(), seed);
    let cards = base.cardinalities().clone();
    let pick = |n: &NodeId, st: &State| -> f64 {
        let t = base.cpt(n);
        let mut s = st.clone();
        s.insert(u.clone(), 0);
        t.get_named(&s)
    };
    DiscreteModel::from_fn(g, cards, |n, st| if n == &u { 0.5 } else { pick(n, st) })
        .expect("valid model")
}

/// `N` teeth: `x ↔ y1 ↔ y2 ↔ … ↔ yN` and `x → yN`.
pub fn shark_teeth_graph(n: usize) -> CausalGraph {
    let ys: Vec<String> = (1..=n).map(|j| format!("y{j}")).collect();
    let mut arcs = vec![("x".to_string(), ys[0].clone())];
    for j in 1..n {
        arcs.push((ys[j - 1].clone(), ys[j].clone()));
    }
    let arcs: Vec<(&str, &str)> = arcs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    CausalGraph::from_names(&[], &[("x", ys[n - 1].as_str())], &arcs).expect("valid graph")
}

/// Shark teeth with the chain `x1 → x2 → x3` in place of `x`; the arc of
/// `y1` attaches to `x1` and the directed edge into `yN` leaves `x3`.
pub fn modified_shark_teeth_graph(n: usize) -> CausalGraph {
    let ys: Vec<String> = (1..=n).map(|j| format!("y{j}")).collect();
    let mut arcs = vec![("x1".to_string(), ys[0].clone())];
    for j in 1..n {
        arcs.push((ys[j - 1].clone(), ys[j].clone()));
    }
    let arcs: Vec<(&str, &str)> = arcs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    CausalGraph::from_names(&[], &[("x1", "x2"), ("x2", "x3"), ("x3", ys[n - 1].as_str())], &arcs)
        .expect("valid graph")
}

/// `P(y_j | row, col) = [M_j(y_j)]_{row, col}` for tooth `j` of `n`, with
/// `M_j(y) = Ω T_j(y) Ωᵀ` and `s = (−1)^y`:
///
/// * `T_N = [[λs, 0], [s·g0, 1]]` indexed by `(x, u_N)`
/// * `T_j = diag(λs, 1)` indexed by `(u_{j+1}, u_j)` for `1 < j < N`
/// * `T_1 = [[λs, −s·g0], [0, 1]]` indexed by `(u_2, u_1)`
///
/// For `N = 1` the single tooth is `[[λs, −s·g0], [s·g0, 1]]` indexed by
/// `(x, u_1)`. With `λ = 1` the matrices are not
/// stochastic; `λ + |g0| ≤ 1` (`λ + 2|g0| ≤ 1` for one tooth) keeps every
/// entry in `[0,1]`.
pub fn tooth_matrix(j: usize, n: usize, y: usize, g0: f64, lambda: f64) -> Mat2 {
    let s = sign(y);
    let t = if n == 1 {
        [[lambda * s, -s * g0], [s * g0, 1.0]]
    } else if j == n {
        [[lambda * s, 0.0], [s * g0, 1.0]]
    } else if j == 1 {
        [[lambda * s, -s * g0], [0.0, 1.0]]
    } else {
        [[lambda * s, 0.0], [0.0, 1.0]]
    };
    RotationKit::new().conjugate(&t)
}

/// Default scale that keeps the tooth matrices stochastic.
pub fn shark_default_lambda(n: usize, g0: f64) -> f64 {
    if n == 1 {
        1.0 - 2.0 * g0.abs()
    } else {
        1.0 - g0.abs()
    }
}

fn shark_cpts(
    graph: &CausalGraph,
    x_names: &[&str],
    n: usize,
    g0: f64,
    lambda: f64,
) -> impl Fn(&NodeId, &State) -> f64 {
    // u[k] is the latent of the arc into y_{k+1}'s left neighbour
    let u: Vec<NodeId> = (0..n)
        .map(|k| {
            if k == 0 {
                latent(graph, x_names[0], "y1")
            } else {
                latent(graph, &format!("y{k}"), &format!("y{}", k + 1))
            }
        })
        .collect();
    let x_first = NodeId::from(x_names[0]);
    let x_last = NodeId::from(*x_names.last().expect("non-empty"));
    let chain: Vec<NodeId> = x_names.iter().map(|s| NodeId::from(*s)).collect();
    move |node: &NodeId, st: &State| -> f64 {
        if u.contains(node) {
            return 0.5;
        }
        if *node == x_first {
            return delta(st[node], st[&u[0]]);
        }
        if let Some(i) = chain.iter().position(|c| c == node) {
            return delta(st[node], st[&chain[i - 1]]);
        }
        let j: usize = node.as_str()[1..].parse().expect("tooth name y<j>");
        let m = tooth_matrix(j, n, st[node], g0, lambda);
        let (row, col) = if n == 1 {
            (st[&x_last], st[&u[0]])
        } else if j == n {
            (st[&x_last], st[&u[n - 1]])
        } else {
            (st[&u[j]], st[&u[j - 1]])
        };
        m[row][col]
    }
}

fn shark_build(
    graph: CausalGraph,
    x_names: &[&str],
    n: usize,
    g0: f64,
    lambda: f64,
    signed: bool,
) -> Result<DiscreteModel, CounterexampleError> {
    if n < 1 {
        return Err(CounterexampleError::InvalidSize { n, min: 1 });
    }
    let cards = uniform_cards(&graph, 2);
    let f = shark_cpts(&graph, x_names, n, g0, lambda);
    if signed {
        return Ok(DiscreteModel::from_fn_signed(graph, cards, f)?);
    }
    match DiscreteModel::from_fn(graph, cards, f) {
        Err(InferenceError::InvalidModel(_)) => Err(CounterexampleError::InvalidG0 { g0 }),
        other => Ok(other?),
    }
}

/// Stochastic shark-teeth model at the default scale
/// [`shark_default_lambda`]. `sign_flip` uses `−g0`.
pub fn shark_teeth_model(n: usize, g0: f64, sign_flip: bool) -> Result<DiscreteModel, CounterexampleError> {
    shark_teeth_model_scaled(n, g0, shark_default_lambda(n, g0), sign_flip)
}

pub fn shark_teeth_model_scaled(
    n: usize,
    g0: f64,
    lambda: f64,
    sign_flip: bool,
) -> Result<DiscreteModel, CounterexampleError> {
    let g = if sign_flip { -g0 } else { g0 };
    if n == 0 {
        return Err(CounterexampleError::InvalidSize { n, min: 1 });
    }
    shark_build(shark_teeth_graph(n), &["x"], n, g, lambda, false)
}

/// Unscaled teeth (`λ = 1`). Entries fall outside `[0,1]`,
/// so this is a signed measure whose marginals follow the closed forms.
pub fn shark_teeth_signed_model(n: usize, g0: f64, sign_flip: bool) -> Result<DiscreteModel, CounterexampleError> {
    let g = if sign_flip { -g0 } else { g0 };
    if n == 0 {
        return Err(CounterexampleError::InvalidSize { n, min: 1 });
    }
    shark_build(shark_teeth_graph(n), &["x"], n, g, 1.0, true)
}

/// `σ = (−1)^{Σ y_j}`
fn parity_sign(ys: &[usize]) -> f64 {
    sign(ys.iter().sum::<usize>() % 2)
}

/// `P(y., x)` of the scaled model.
/// Independent of `x` because `x` copies `u_1`.
pub fn shark_joint_closed_form(n: usize, g0: f64, lambda: f64, ys: &[usize]) -> f64 {
    let s = parity_sign(ys);
    let scale = 0.5f64.powi(n as i32 + 1);
    if n == 1 {
        return scale * (1.0 + s * lambda);
    }
    scale * (1.0 + s * (lambda.powi(n as i32) - lambda.powi(n as i32 - 2) * g0 * g0))
}

/// `P(y. | do(x))` of the scaled model.
pub fn shark_do_closed_form(n: usize, g0: f64, lambda: f64, ys: &[usize], x: usize) -> f64 {
    let s = parity_sign(ys);
    let scale = 0.5f64.powi(n as i32);
    if n == 1 {
        return scale * (1.0 - sign(x) * s * g0);
    }
    scale * (1.0 - lambda.powi(n as i32 - 2) * s * g0 * (sign(x) * lambda + g0))
}

/// `(g0, −g0)` pair on the `N`-teeth graph for `P(y.|do(x))`.
pub fn shark_teeth_certificate(n: usize, g0: f64) -> Result<CounterexamplePair, CounterexampleError> {
    let g = shark_teeth_graph(n);
    let s: NodeSet = g.visible().without(&"x".into());
    Ok(CounterexamplePair {
        model_a: shark_teeth_model(n, g0, false)?,
        model_b: shark_teeth_model(n, g0, true)?,
        s,
        t: NodeSet::of(&["x"]),
    })
}

/// `y_N = x ⊕ u_N`, `y_j = u_{j+1} ⊕ u_j`, `x = u_1`.
pub fn shark_teeth_xor_model(n: usize) -> Result<DiscreteModel, CounterexampleError> {
    xor_teeth(shark_teeth_graph(n), &["x"], n)
}

fn xor_teeth(graph: CausalGraph, x_names: &[&str], n: usize) -> Result<DiscreteModel, CounterexampleError> {
    if n < 1 {
        return Err(CounterexampleError::InvalidSize { n, min: 1 });
    }
    let u: Vec<NodeId> = (0..n)
        .map(|k| {
            if k == 0 {
                latent(&graph, x_names[0], "y1")
            } else {
                latent(&graph, &format!("y{k}"), &format!("y{}", k + 1))
            }
        })
        .collect();
    let chain: Vec<NodeId> = x_names.iter().map(|s| NodeId::from(*s)).collect();
    let x_last = chain.last().expect("non-empty").clone();
    let cards = uniform_cards(&graph, 2);
    Ok(DiscreteModel::from_fn(graph, cards, |node, st| {
        if u.contains(node) {
            return 0.5;
        }
        if let Some(i) = chain.iter().position(|c| c == node) {
            let parent = if i == 0 { &u[0] } else { &chain[i - 1] };
            return delta(st[node], st[parent]);
        }
        let j: usize = node.as_str()[1..].parse().expect("tooth name y<j>");
        let value = if j == n { st[&x_last] ^ st[&u[n - 1]] } else { st[&u[j]] ^ st[&u[j - 1]] };
        delta(st[node], value)
    })?)
}

/// Shark-teeth model with the deterministic chain `x1 → x2 → x3`
/// feeding the last tooth.
pub fn modified_shark_teeth_model(n: usize, g0: f64, sign_flip: bool) -> Result<DiscreteModel, CounterexampleError> {
    if n == 0 {
        return Err(CounterexampleError::InvalidSize { n, min: 1 });
    }
    let g = if sign_flip { -g0 } else { g0 };
    shark_build(modified_shark_teeth_graph(n), &["x1", "x2", "x3"], n, g, shark_default_lambda(n, g0), false)
}

/// `(g0, −g0)` pair on the modified graph for `P(y.|do(x3))`.
pub fn modified_shark_teeth_certificate(n: usize, g0: f64) -> Result<CounterexamplePair, CounterexampleError> {
    let g = modified_shark_teeth_graph(n);
    let s = g.visible().difference(&NodeSet::of(&["x1", "x2", "x3"]));
    Ok(CounterexamplePair {
        model_a: modified_shark_teeth_model(n, g0, false)?,
        model_b: modified_shark_teeth_model(n, g0, true)?,
        s,
        t: NodeSet::of(&["x3"]),
    })
}

pub fn modified_shark_teeth_xor_model(n: usize) -> Result<DiscreteModel, CounterexampleError> {
    xor_teeth(modified_shark_teeth_graph(n), &["x1", "x2", "x3"], n)
}

/// Arcs in the order `(y,w1), (x,w1), (w1,w3), (w4,w5), (w3,w5), (w2,w3)`.
pub fn tp_fig9_graph() -> CausalGraph {
    CausalGraph::from_names(
        &[],
        &[("w2", "x"), ("w4", "x"), ("x", "y"), ("w1", "w2"), ("w3", "w4")],
        &[("y", "w1"), ("x", "w1"), ("w1", "w3"), ("w4", "w5"), ("w3", "w5"), ("w2", "w3")],
    )
    .expect("valid graph")
}

/// `w1` copies (or negates) the latent shared with `y`, `w2` copies `w1`,
/// `x` copies `w2`, and `w3, w4, w5` are uniform coins. `y` follows `y_rule(x, u)`.
fn tp_fig9_from(y_rule: impl Fn(usize, usize) -> usize, flip_w1: bool) -> DiscreteModel {
    let g = tp_fig9_graph();
    let u1 = latent(&g, "y", "w1");
    let cards = uniform_cards(&g, 2);
    DiscreteModel::from_fn(g, cards, |n, st| match n.as_str() {
        "y" => delta(st[n], y_rule(v(st, "x"), st[&u1])),
        "x" => delta(st[n], v(st, "w2")),
        "w2" => delta(st[n], v(st, "w1")),
        "w1" => delta(st[n], if flip_w1 { 1 - st[&u1] } else { st[&u1] }),
        _ => 0.5,
    })
    .expect("tp_fig9 model is valid")
}

/// Reduction of the `tp_fig9` graph to the one-tooth pair.
pub fn tp_fig9_model() -> CounterexamplePair {
    CounterexamplePair {
        model_a: tp_fig9_from(|x, u| x & u, false),
        model_b: tp_fig9_from(|x, u| 1 - ((1 - x) & u), true),
        s: NodeSet::of(&["y"]),
        t: NodeSet::of(&["x"]),
    }
}

/// `tp_fig9` model with `y = x ⊕ u`.
pub fn tp_fig9_xor_model() -> DiscreteModel {
    tp_fig9_from(|x, u| x ^ u, false)
}

/// Backdoor graph `x → z → y`, `x ↔ y` with `x = u`, `z = x` and
/// `y = u ⊕ z`, each copied value flipped with probability `eps`.
///
/// `P(y|do(z))` is identifiable here, yet `H(y:ẑ) < 0` for small `eps`.
pub fn backdoor_xor_model(eps: f64) -> DiscreteModel {
    let g = CausalGraph::from_names(&[], &[("x", "z"), ("z", "y")], &[("x", "y")]).expect("valid graph");
    let u = latent(&g, "x", "y");
    let cards = uniform_cards(&g, 2);
    let noisy = |value: usize, target: usize| if value == target { 1.0 - eps } else { eps };
    DiscreteModel::from_fn(g, cards, |n, st| match n.as_str() {
        "x" => noisy(st[n], st[&u]),
        "z" => noisy(st[n], v(st, "x")),
        "y" => noisy(st[n], st[&u] ^ v(st, "z")),
        _ => 0.5,
    })
    .expect("valid model")
}

/// A model in which nothing listens to `t`: each CPT is replicated across
/// the states of its `t`-parents, and each `t` node ignores all of its own
/// parents. Then `P(s|t̂) = P(s)` and `s` is independent of `t`.
pub fn zero_info_model(graph: &CausalGraph, t: &NodeSet) -> DiscreteModel {
    zero_info_model_seeded(graph, t, 0)
}

pub fn zero_info_model_seeded(graph: &CausalGraph, t: &NodeSet, seed: u64) -> DiscreteModel {
    let base = random_model(graph, &BTreeMap::new(), seed);
    let cards = base.cardinalities().clone();
    let expanded = latent_expand(graph);
    DiscreteModel::from_fn(graph.clone(), cards, |n, st| {
        let mut s = st.clone();
        for p in expanded.parents(n) {
            if t.contains(&p) || t.contains(n) {
                s.insert(p, 0);
            }
        }
        base.cpt(n).get_named(&s)
    })
    .expect("replicated random model is valid")
}

/// Expected verdict of a catalog query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Identifiable,
    NotIdentifiable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub graph: CausalGraph,
    pub s: NodeSet,
    pub t: NodeSet,
    pub expected: Expected,
    /// Reference estimand in plain form, where one is known.
    pub expected_estimand: Option<&'static str>,
    /// Name of a shipped certificate for this query.
    pub certificate: Option<&'static str>,
}

fn entry(
    name: &'static str,
    graph: CausalGraph,
    s: &[&str],
    t: &[&str],
    expected: Expected,
    expected_estimand: Option<&'static str>,
) -> CatalogEntry {
    let certificate = match expected {
        Expected::NotIdentifiable => Some(name),
        Expected::Identifiable => None,
    };
    CatalogEntry { name, graph, s: NodeSet::of(s), t: NodeSet::of(t), expected, expected_estimand, certificate }
}

fn g(directed: &[(&str, &str)], arcs: &[(&str, &str)]) -> CausalGraph {
    CausalGraph::from_names(&[], directed, arcs).expect("valid catalog graph")
}

/// The example graphs and queries with their expected verdicts.
pub fn paper_graph_catalog() -> Vec<CatalogEntry> {
    use Expected::{Identifiable as Id, NotIdentifiable as No};
    let bd_fd = || g(&[("x", "z"), ("z", "y")], &[("x", "y")]);
    vec![
        entry("backdoor", bd_fd(), &["y"], &["z"], Id, Some("sum_x P(y|z,x) P(x)")),
        entry("frontdoor", bd_fd(), &["y"], &["x"], Id, Some("sum_z P(z|x) [ sum_x' P(y|z,x') P(x') ]")),
        entry(
            "tp_fig2",
            g(
                &[("z2", "x"), ("x", "z1"), ("z2", "z1"), ("z1", "y"), ("z3", "y"), ("z2", "z3")],
                &[("x", "y"), ("x", "z2"), ("x", "z3"), ("y", "z2")],
            ),
            &["y"],
            &["x"],
            Id,
            Some("sum_{z1,z2,z3} P(z1|x,z2) [ sum_x' P(y|z3,z1,x',z2) P(z3|z1,x',z2) P(x'|z2) P(z2) ]"),
        ),
        entry(
            "tp_fig3",
            g(&[("x", "z1"), ("z1", "z2"), ("x", "y"), ("z1", "y"), ("z2", "y")], &[("x", "z2"), ("z1", "y")]),
            &["y"],
            &["x"],
            Id,
            Some("sum_{z1,z2} P(y|z2,z1,x) P(z1|x) [ sum_x' P(z2|z1,x') P(x') ]"),
        ),
        entry(
            "tp_fig6",
            g(&[("w1", "w2"), ("w2", "x"), ("x", "z"), ("z", "y")], &[("x", "w1"), ("z", "w1")]),
            &["y"],
            &["x"],
            Id,
            Some(
                "sum_z P(y|z) [ [ sum_w1 P(z|x,w2,w1) P(x|w2,w1) P(w1) ] / \
                 [ sum_z sum_w1 P(z|x,w2,w1) P(x|w2,w1) P(w1) ] ]",
            ),
        ),
        entry("missing_tooth", shark_teeth_graph(3), &["y1", "y3"], &["x"], Id, Some("P(y1) P(y3|x)")),
        entry("one_tooth", one_tooth_graph(), &["y"], &["x"], No, None),
        entry("shark3", shark_teeth_graph(3), &["y1", "y2", "y3"], &["x"], No, None),
        entry("shark3_modified", modified_shark_teeth_graph(3), &["y1", "y2", "y3"], &["x3"], No, None),
        entry("tp_fig9", tp_fig9_graph(), &["y"], &["x"], No, None),
        entry("pos_direct", g(&[("x", "y")], &[]), &["y"], &["x"], Id, Some("P(y|x)")),
        entry("pos_parent", g(&[("w", "x"), ("x", "y")], &[]), &["y"], &["x"], Id, Some("P(y|x)")),
        entry("pos_confounded_parent", g(&[("x", "y")], &[("w", "x")]), &["y"], &["x"], Id, Some("P(y|x)")),
        entry("zero_reversed", g(&[("y", "x")], &[]), &["y"], &["x"], Id, Some("P(y)")),
        entry(
            "zero_disconnected",
            CausalGraph::from_names(&["x", "y"], &[], &[]).expect("valid graph"),
            &["y"],
            &["x"],
            Id,
            Some("P(y)"),
        ),
        entry("zero_confounded", g(&[], &[("x", "y")]), &["y"], &["x"], Id, Some("P(y)")),
        entry("indef", one_tooth_graph(), &["y"], &["x"], No, None),
    ]
}

pub fn catalog_entry(name: &str) -> Option<CatalogEntry> {
    paper_graph_catalog().into_iter().find(|e| e.name == name)
}

/// Certificate pair shipped for a non-identifiable catalog query.
pub fn certificate(name: &str) -> Option<CounterexamplePair> {
    match name {
        "one_tooth" | "indef" => Some(one_tooth_pair()),
        "shark3" => shark_teeth_certificate(3, 0.1).ok(),
        "shark3_modified" => modified_shark_teeth_certificate(3, 0.1).ok(),
        "tp_fig9" => Some(tp_fig9_model()),
        _ => None,
    }
}

/// A model of a non-identifiable catalog query with `H(s:t̂) < 0`.
pub fn negative_info_model(name: &str) -> Option<DiscreteModel> {
    match name {
        "one_tooth" => Some(one_tooth_xor_model()),
        "indef" => indef_model(2).ok(),
        "shark3" => shark_teeth_xor_model(3).ok(),
        "shark3_modified" => modified_shark_teeth_xor_model(3).ok(),
        "tp_fig9" => Some(tp_fig9_xor_model()),
        _ => None,
    }
}
