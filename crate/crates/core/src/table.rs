//! Dense tables over discrete variables.
//!
//! Values are stored row-major over `scope`, last variable fastest.

use std::collections::BTreeMap;

/// A dense real-valued function of finitely many discrete variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor<K> {
    scope: Vec<K>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

/// Row-major state counter over a list of cardinalities.
pub(crate) struct States<'a> {
    cards: &'a [usize],
    current: Vec<usize>,
    done: bool,
}

impl<'a> States<'a> {
    pub(crate) fn new(cards: &'a [usize]) -> Self {
        States {
            cards,
            current: vec![0; cards.len()],
            done: cards.contains(&0),
        }
    }
}

impl Iterator for States<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let mut i = self.cards.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.current[i] += 1;
            if self.current[i] < self.cards[i] {
                break;
            }
            self.current[i] = 0;
        }
        Some(out)
    }
}

fn strides(cards: &[usize]) -> Vec<usize> {
    let mut s = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * cards[i + 1];
    }
    s
}

impl<K: Clone + Ord> Factor<K> {
    /// Panics if `values.len()` is not the product of `cards` or a variable
    /// repeats.
    pub fn new(scope: Vec<K>, cards: Vec<usize>, values: Vec<f64>) -> Self {
        assert_eq!(scope.len(), cards.len(), "scope/cardinality length mismatch");
        assert_eq!(values.len(), cards.iter().product::<usize>(), "table size mismatch");
        let mut sorted = scope.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), scope.len(), "repeated variable in scope");
        Factor { scope, cards, values }
    }

    pub fn scalar(v: f64) -> Self {
        Factor { scope: Vec::new(), cards: Vec::new(), values: vec![v] }
    }

    pub fn filled(scope: Vec<K>, cards: Vec<usize>, v: f64) -> Self {
        let n = cards.iter().product();
        Factor::new(scope, cards, vec![v; n])
    }

    pub fn scope(&self) -> &[K] {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn card_of(&self, k: &K) -> Option<usize> {
        self.position(k).map(|i| self.cards[i])
    }

    fn position(&self, k: &K) -> Option<usize> {
        self.scope.iter().position(|s| s == k)
    }

    /// Value at a state given in scope order.
    pub fn get(&self, state: &[usize]) -> f64 {
        let st = strides(&self.cards);
        self.values[state.iter().zip(&st).map(|(a, b)| a * b).sum::<usize>()]
    }

    /// Value at a state given by name; variables outside the scope are
    /// ignored, missing scope variables panic.
    pub fn get_named(&self, state: &BTreeMap<K, usize>) -> f64 {
        let idx: Vec<usize> = self.scope.iter().map(|k| state[k]).collect();
        self.get(&idx)
    }

    /// Iterates `(state, value)` pairs in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        States::new(&self.cards).zip(self.values.iter().copied())
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Factor { scope: self.scope.clone(), cards: self.cards.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn rename<K2: Clone + Ord>(&self, f: impl Fn(&K) -> K2) -> Factor<K2> {
        Factor::new(self.scope.iter().map(f).collect(), self.cards.clone(), self.values.clone())
    }

    /// Pointwise combination over the union scope (self's variables first).
    pub fn combine(&self, other: &Factor<K>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        for (k, c) in other.scope.iter().zip(&other.cards) {
            match self.position(k) {
                Some(i) => assert_eq!(self.cards[i], *c, "cardinality mismatch"),
                None => {
                    scope.push(k.clone());
                    cards.push(*c);
                }
            }
        }
        let sa = strides(&self.cards);
        let sb = strides(&other.cards);
        // stride of each result axis inside each operand (0 if absent)
        let map_a: Vec<usize> = scope.iter().map(|k| self.position(k).map(|i| sa[i]).unwrap_or(0)).collect();
        let map_b: Vec<usize> = scope.iter().map(|k| other.position(k).map(|i| sb[i]).unwrap_or(0)).collect();
        let n: usize = cards.iter().product();
        let mut values = Vec::with_capacity(n);
        let mut state = vec![0usize; cards.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        for _ in 0..n {
            values.push(f(self.values[ia], other.values[ib]));
            let mut d = cards.len();
            while d > 0 {
                d -= 1;
                state[d] += 1;
                ia += map_a[d];
                ib += map_b[d];
                if state[d] < cards[d] {
                    break;
                }
                ia -= map_a[d] * cards[d];
                ib -= map_b[d] * cards[d];
                state[d] = 0;
            }
        }
        Factor { scope, cards, values }
    }

    pub fn product(&self, other: &Factor<K>) -> Self {
        self.combine(other, |a, b| a * b)
    }

    /// Sums out every variable in `vars` that is in scope.
    pub fn sum_out(&self, vars: &[K]) -> Self {
        let keep: Vec<K> = self.scope.iter().filter(|k| !vars.contains(k)).cloned().collect();
        self.marginal(&keep)
    }

    /// Marginal over `keep`, in the given order. Panics on unknown variables.
    pub fn marginal(&self, keep: &[K]) -> Self {
        let pos: Vec<usize> = keep
            .iter()
            .map(|k| self.position(k).expect("marginal over a variable outside the scope"))
            .collect();
        let cards: Vec<usize> = pos.iter().map(|&i| self.cards[i]).collect();
        let st = strides(&cards);
        // stride contributed by each source axis to the output index
        let mut contrib = vec![0usize; self.scope.len()];
        for (j, &i) in pos.iter().enumerate() {
            contrib[i] = st[j];
        }
        let mut values = vec![0.0; cards.iter().product()];
        let mut state = vec![0usize; self.cards.len()];
        let mut out = 0usize;
        for &v in &self.values {
            values[out] += v;
            let mut d = self.cards.len();
            while d > 0 {
                d -= 1;
                state[d] += 1;
                out += contrib[d];
                if state[d] < self.cards[d] {
                    break;
                }
                out -= contrib[d] * self.cards[d];
                state[d] = 0;
            }
        }
        Factor { scope: keep.to_vec(), cards, values }
    }

    /// Same function with variables permuted into `order`.
    pub fn reorder(&self, order: &[K]) -> Self {
        assert_eq!(order.len(), self.scope.len(), "reorder needs the same variables");
        self.marginal(order)
    }

    /// Replicates the table along extra variables (appended).
    pub fn broadcast(&self, extra: &[(K, usize)]) -> Self {
        let add: Vec<(K, usize)> = extra.iter().filter(|(k, _)| self.position(k).is_none()).cloned().collect();
        let ones = Factor::filled(add.iter().map(|(k, _)| k.clone()).collect(), add.iter().map(|(_, c)| *c).collect(), 1.0);
        self.product(&ones)
    }

    /// Fixes `var = value`, dropping it from the scope.
    pub fn slice(&self, var: &K, value: usize) -> Self {
        let i = self.position(var).expect("slice variable outside the scope");
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(i);
        cards.remove(i);
        let values = self
            .iter()
            .filter(|(s, _)| s[i] == value)
            .map(|(_, v)| v)
            .collect();
        Factor { scope, cards, values }
    }

    /// Maximum absolute pointwise difference; `other` must have the same
    /// variable set.
    pub fn max_abs_diff(&self, other: &Factor<K>) -> f64 {
        let o = other.reorder(&self.scope);
        assert_eq!(o.cards, self.cards, "cardinality mismatch");
        self.values
            .iter()
            .zip(&o.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `self / other` with `0/0 = 0`; a non-zero numerator over zero yields
    /// infinity.
    pub fn divide(&self, other: &Factor<K>) -> Self {
        self.combine(other, |a, b| if b == 0.0 { if a == 0.0 { 0.0 } else { f64::INFINITY } } else { a / b })
    }
}
