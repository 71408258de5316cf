//! Restriction of the hyperlink transition structure to a node subset.
//!
//! For a subset B of nodes, this applies the substochastic block P[B,B]
//! without ever forming it: edges leaving B are dropped (that is the
//! leak), and a dangling row contributes 1/n to every column of B. Both
//! the row action x -> xB and the column action y -> By are provided; the
//! mass-curve, quasi-stationary, and absorption solvers all run on these
//! two primitives.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::WebGraph;
use crate::math::Kahan;

const OUTSIDE: u32 = u32::MAX;

pub(crate) struct RestrictedOperator<'g> {
    graph: &'g WebGraph,
    nodes: Vec<u32>,
    local_of: Vec<u32>,
}

impl<'g> RestrictedOperator<'g> {
    /// `nodes` fixes the local index order; it must not contain duplicates.
    pub(crate) fn new(graph: &'g WebGraph, nodes: &[u32]) -> Self {
        let mut local_of = vec![OUTSIDE; graph.node_count()];
        for (i, &v) in nodes.iter().enumerate() {
            debug_assert_eq!(local_of[v as usize], OUTSIDE, "duplicate node in restriction");
            local_of[v as usize] = i as u32;
        }
        RestrictedOperator { graph, nodes: nodes.to_vec(), local_of }
    }

    pub(crate) fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Row action `out = x P[B,B]`.
    pub(crate) fn apply_left(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.nodes.len());
        debug_assert_eq!(out.len(), self.nodes.len());
        let n = self.graph.node_count() as f64;
        let mut dangling_mass = Kahan::default();
        for (i, &v) in self.nodes.iter().enumerate() {
            if self.graph.is_dangling(v) {
                dangling_mass.add(x[i]);
            }
        }
        let base = dangling_mass.value() / n;
        for o in out.iter_mut() {
            *o = base;
        }
        for (i, &v) in self.nodes.iter().enumerate() {
            let row = self.graph.successors(v);
            if row.is_empty() {
                continue;
            }
            let w = x[i] / row.len() as f64;
            for &t in row {
                let loc = self.local_of[t as usize];
                if loc != OUTSIDE {
                    out[loc as usize] += w;
                }
            }
        }
    }

    /// Row action followed by a compensated total; the pair (vector, sum)
    /// is the power-iteration step the mass curve is made of. Keeping the
    /// summation here means every caller sees bitwise-identical totals.
    pub(crate) fn apply_left_sum(&self, x: &[f64], out: &mut [f64]) -> f64 {
        self.apply_left(x, out);
        let mut total = Kahan::default();
        for &v in out.iter() {
            total.add(v);
        }
        total.value()
    }

    /// Column action `out = P[B,B] y`.
    pub(crate) fn apply_right(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.nodes.len());
        debug_assert_eq!(out.len(), self.nodes.len());
        let n = self.graph.node_count() as f64;
        let mut y_total = Kahan::default();
        for &v in y.iter() {
            y_total.add(v);
        }
        let dangling_row_value = y_total.value() / n;
        for (i, &v) in self.nodes.iter().enumerate() {
            let row = self.graph.successors(v);
            if row.is_empty() {
                out[i] = dangling_row_value;
                continue;
            }
            let mut acc = 0.0;
            for &t in row {
                let loc = self.local_of[t as usize];
                if loc != OUTSIDE {
                    acc += y[loc as usize];
                }
            }
            out[i] = acc / row.len() as f64;
        }
    }

    /// One-step probability of landing in `targets` (a set disjoint from
    /// this block), per block node. This is the column `R 1` feeding the
    /// absorption solves.
    pub(crate) fn step_into(&self, targets: &[bool]) -> Vec<f64> {
        let n = self.graph.node_count() as f64;
        let target_count = targets.iter().filter(|&&b| b).count() as f64;
        let mut r = vec![0.0; self.nodes.len()];
        for (i, &v) in self.nodes.iter().enumerate() {
            let row = self.graph.successors(v);
            if row.is_empty() {
                r[i] = target_count / n;
            } else {
                let hits = row.iter().filter(|&&t| targets[t as usize]).count() as f64;
                r[i] = hits / row.len() as f64;
            }
        }
        r
    }
}
