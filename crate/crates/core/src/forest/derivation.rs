use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::hull_semiring::{Provenance, Trace};
use crate::scalar::Scalar;

use super::{Hypergraph, YieldToken};

/// A complete derivation: a tree of edges whose tails are expanded in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation<T> {
    pub edge: usize,
    pub children: Vec<Derivation<T>>,
    /// Terminal yield after substituting each child's yield into its slot.
    pub tokens: Vec<String>,
    /// Dense feature vector: the sum of `H_e` over all edges in the tree.
    pub features: Vec<T>,
}

impl<T: Scalar> Derivation<T> {
    /// Dual point `(v·H, -w0·H)` of this derivation's line.
    pub fn dual_point(&self, w0: &[T], v: &[T]) -> Result<Point2<T>> {
        let dot = |w: &[T]| {
            w.iter()
                .zip(&self.features)
                .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
        };
        Point2::new(dot(v), -dot(w0))
    }

    /// Model score under weights `w`.
    pub fn score(&self, w: &[T]) -> T {
        w.iter()
            .zip(&self.features)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    /// Edge ids in pre-order.
    pub fn edges(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            out.push(d.edge);
            stack.extend(d.children.iter().rev());
        }
        out
    }

    pub fn yield_string(&self) -> String {
        self.tokens.join(" ")
    }
}

impl<T: Scalar> Hypergraph<T> {
    fn assemble(&self, edge: usize, children: Vec<Derivation<T>>) -> Derivation<T> {
        let e = &self.edges[edge];
        let mut features = vec![T::zero(); self.dim];
        for (id, v) in &e.features {
            features[*id] = features[*id].clone() + v.clone();
        }
        for child in &children {
            for (acc, v) in features.iter_mut().zip(&child.features) {
                *acc = acc.clone() + v.clone();
            }
        }
        let mut tokens = Vec::new();
        for tok in &e.yield_template {
            match tok {
                YieldToken::Word(w) => tokens.push(w.clone()),
                YieldToken::Slot(k) => tokens.extend(children[*k].tokens.iter().cloned()),
            }
        }
        Derivation {
            edge,
            children,
            tokens,
            features,
        }
    }

    /// Rebuilds the derivation recorded by a goal-hull point's provenance.
    ///
    /// Inside computes each edge value as `leaf(e) ⊗ tail_1 ⊗ … ⊗ tail_k`,
    /// so a trace for an edge application is a left spine of `Times` nodes
    /// ending in `Leaf(e)`, with the tail traces on the right.
    pub fn reconstruct(&self, provenance: &Provenance) -> Result<Derivation<T>> {
        let trace = provenance
            .as_ref()
            .ok_or_else(|| Error::ProvenanceMismatch("point has no derivation trace".into()))?;
        self.rebuild(trace, self.goal)
    }

    fn rebuild(&self, trace: &Trace, head: usize) -> Result<Derivation<T>> {
        let mut tails = Vec::new();
        let mut cur = trace;
        let edge = loop {
            match cur {
                Trace::Times(l, r) => {
                    tails.push(r.as_ref());
                    cur = l.as_ref();
                }
                Trace::Leaf(e) => break *e,
            }
        };
        tails.reverse();
        let e = self
            .edges
            .get(edge)
            .ok_or_else(|| Error::ProvenanceMismatch(format!("edge {edge} does not exist")))?;
        if e.head != head {
            return Err(Error::ProvenanceMismatch(format!(
                "edge {edge} has head {} where node {head} was expected",
                e.head
            )));
        }
        if e.tails.len() != tails.len() {
            return Err(Error::ProvenanceMismatch(format!(
                "edge {edge} has {} tails but the trace supplies {}",
                e.tails.len(),
                tails.len()
            )));
        }
        let children = tails
            .into_iter()
            .zip(&e.tails)
            .map(|(t, &node)| self.rebuild(t, node))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.assemble(edge, children))
    }

    /// All derivations of the goal, in edge-index order with the first tail
    /// varying slowest. Fails if there are more than `cap`.
    pub fn enumerate(&self, cap: usize) -> Result<Vec<Derivation<T>>> {
        let counts = self.derivation_counts();
        match counts[self.goal] {
            Some(c) if c as u128 <= cap as u128 => {}
            _ => return Err(Error::EnumerationOverflow { cap }),
        }
        let n = self.labels.len();
        let live = |e: usize| self.edges[e].tails.iter().all(|&t| counts[t] != Some(0));
        // only nodes feeding the goal through live edges are expanded; each
        // of them has at most as many derivations as the goal
        let mut needed = vec![false; n];
        needed[self.goal] = true;
        for &v in self.report.topological_order.iter().rev() {
            if needed[v] {
                for &e in &self.incoming[v] {
                    if live(e) {
                        for &t in &self.edges[e].tails {
                            needed[t] = true;
                        }
                    }
                }
            }
        }
        let mut table: Vec<Vec<Derivation<T>>> = vec![Vec::new(); n];
        for &v in &self.report.topological_order {
            if !needed[v] {
                continue;
            }
            let mut out = Vec::new();
            for &e in &self.incoming[v] {
                if !live(e) {
                    continue;
                }
                let tails = &self.edges[e].tails;
                let mut combos: Vec<Vec<Derivation<T>>> = vec![Vec::new()];
                for &t in tails {
                    combos = combos
                        .into_iter()
                        .flat_map(|prefix| {
                            table[t].iter().map(move |d| {
                                let mut next = prefix.clone();
                                next.push(d.clone());
                                next
                            })
                        })
                        .collect();
                }
                out.extend(combos.into_iter().map(|children| self.assemble(e, children)));
            }
            table[v] = out;
        }
        Ok(std::mem::take(&mut table[self.goal]))
    }
}
