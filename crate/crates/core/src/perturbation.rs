//! The limiting PageRank distribution as the damping factor approaches
//! one.
//!
//! At c = 1 the chain degenerates: the ergodic Pure-OUT classes become
//! absorbing and everything else is transient. The limit of the
//! vanishing-teleportation family concentrates on those classes, weighting
//! the stationary distribution of class i by
//!
//!   nu_i = (n_i + sum over transient states of phi_i) / n,
//!
//! where phi_i solves the absorption system [I - Ttilde] phi_i = R_i 1
//! over the regrouped transient block Ttilde (transient Pure OUT plus the
//! extended SCC). The same nu is the stationary vector of the aggregated
//! generator D = MCQ over the classes; tests cross-check both routes.
//!
//! Linear systems in [I - Ttilde] are solved by Neumann accumulation on
//! the sparse restricted operator; the inverse is dense and is never
//! formed.

use alloc::vec;
use alloc::vec::Vec;

use crate::block::RestrictedOperator;
use crate::error::Error;
use crate::graph::WebGraph;
use crate::math::{self, Kahan};
use crate::structure::StructureDecomposition;

const STATIONARY_TOL: f64 = 1e-12;
/// Absolute floor for the Neumann increment; entries of the accumulated
/// solutions are O(1), so this leaves the results near machine accuracy.
const NEUMANN_FLOOR: f64 = 1e-18;
const MAX_ITERATIONS: u32 = 10_000_000;

#[derive(Clone, Debug)]
pub struct AggregatedChain {
    /// Stationary distribution of each ergodic class, local order matching
    /// the class node list.
    pub class_distributions: Vec<Vec<f64>>,
    /// Absorption probabilities phi_i per class, indexed over the
    /// transient block in decomposition order (transient Pure OUT first,
    /// then the extended SCC).
    pub absorption_vectors: Vec<Vec<f64>>,
    /// nu: the limit weight of each class.
    pub aggregated_stationary: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LimitVector {
    pub values: Vec<f64>,
    /// The class weights nu_i; values on class i are nu_i * mu_i.
    pub per_class_mass: Vec<f64>,
}

fn degenerate() -> Error {
    Error::DegenerateStructure {
        reason: "no ergodic Pure-OUT classes; the c -> 1 limit is the unperturbed block problem",
    }
}

/// Stationary distribution of the walk restricted to ergodic class `i`.
///
/// Runs the damped update x <- (x + xQ)/2 unconditionally: sink classes
/// are often short cycles, where the plain iteration oscillates forever
/// while the damped one contracts.
pub fn class_stationary(
    graph: &WebGraph,
    dec: &StructureDecomposition,
    i: usize,
) -> Result<Vec<f64>, Error> {
    let class = &dec.ergodic_classes[i];
    let op = RestrictedOperator::new(graph, class);
    let m = op.len();
    let mut x = vec![1.0 / m as f64; m];
    let mut y = vec![0.0; m];
    for _ in 0..MAX_ITERATIONS {
        op.apply_left(&x, &mut y);
        let defect = math::l1_diff(&x, &y);
        if defect <= STATIONARY_TOL {
            return Ok(x);
        }
        for (xv, &yv) in x.iter_mut().zip(&y) {
            *xv = 0.5 * (*xv + yv);
        }
    }
    Err(Error::Convergence { iterations: MAX_ITERATIONS, residual: f64::NAN })
}

/// The transient block in decomposition order.
fn transient_operator<'g>(
    graph: &'g WebGraph,
    dec: &StructureDecomposition,
) -> RestrictedOperator<'g> {
    let mut nodes = Vec::with_capacity(dec.transient_out.len() + dec.escc.len());
    nodes.extend_from_slice(&dec.transient_out);
    nodes.extend_from_slice(&dec.escc);
    RestrictedOperator::new(graph, &nodes)
}

/// Neumann sum `acc = sum_k op^k r` for the column action, with a
/// geometric tail estimate to decide when the remainder is negligible.
fn neumann_column(op: &RestrictedOperator<'_>, r: &[f64]) -> Result<Vec<f64>, Error> {
    let mut acc = r.to_vec();
    let mut x = r.to_vec();
    let mut y = vec![0.0; r.len()];
    let mut prev_norm = math::l1_norm(&x);
    for _ in 0..MAX_ITERATIONS {
        if prev_norm == 0.0 {
            return Ok(acc);
        }
        op.apply_right(&x, &mut y);
        core::mem::swap(&mut x, &mut y);
        let norm = math::l1_norm(&x);
        for (a, &v) in acc.iter_mut().zip(&x) {
            *a += v;
        }
        // Once the increments decay geometrically the remaining tail is
        // bounded by norm * rho / (1 - rho).
        let rho = norm / prev_norm;
        if norm < NEUMANN_FLOOR || (rho < 0.5 && norm * rho / (1.0 - rho) < NEUMANN_FLOOR) {
            return Ok(acc);
        }
        prev_norm = norm;
    }
    Err(Error::Convergence { iterations: MAX_ITERATIONS, residual: prev_norm })
}

/// Row-vector analogue: `acc = sum_k v op^k`.
fn neumann_row(op: &RestrictedOperator<'_>, v: &[f64]) -> Result<Vec<f64>, Error> {
    let mut acc = v.to_vec();
    let mut x = v.to_vec();
    let mut y = vec![0.0; v.len()];
    let mut prev_norm = math::l1_norm(&x);
    for _ in 0..MAX_ITERATIONS {
        if prev_norm == 0.0 {
            return Ok(acc);
        }
        op.apply_left(&x, &mut y);
        core::mem::swap(&mut x, &mut y);
        let norm = math::l1_norm(&x);
        for (a, &w) in acc.iter_mut().zip(&x) {
            *a += w;
        }
        let rho = norm / prev_norm;
        if norm < NEUMANN_FLOOR || (rho < 0.5 && norm * rho / (1.0 - rho) < NEUMANN_FLOOR) {
            return Ok(acc);
        }
        prev_norm = norm;
    }
    Err(Error::Convergence { iterations: MAX_ITERATIONS, residual: prev_norm })
}

fn class_membership(graph: &WebGraph, class: &[u32]) -> Vec<bool> {
    let mut mask = vec![false; graph.node_count()];
    for &v in class {
        mask[v as usize] = true;
    }
    mask
}

/// The limit weight nu_i of class i together with its absorption vector
/// phi_i over the transient block.
pub fn absorption_mass(
    graph: &WebGraph,
    dec: &StructureDecomposition,
    i: usize,
) -> Result<(f64, Vec<f64>), Error> {
    if dec.ergodic_classes.is_empty() {
        return Err(degenerate());
    }
    let op = transient_operator(graph, dec);
    let mask = class_membership(graph, &dec.ergodic_classes[i]);
    let r = op.step_into(&mask);
    let phi = neumann_column(&op, &r)?;
    let mut phi_total = Kahan::default();
    for &p in &phi {
        phi_total.add(p);
    }
    let n = graph.node_count() as f64;
    let nu = (dec.ergodic_classes[i].len() as f64 + phi_total.value()) / n;
    Ok((nu, phi))
}

/// The limiting PageRank vector: nu_i * mu_i on each ergodic class, zero
/// everywhere else.
pub fn limit_pagerank(graph: &WebGraph, dec: &StructureDecomposition) -> Result<LimitVector, Error> {
    if dec.ergodic_classes.is_empty() {
        return Err(degenerate());
    }
    let mut values = vec![0.0; graph.node_count()];
    let mut per_class_mass = Vec::with_capacity(dec.ergodic_classes.len());
    for i in 0..dec.ergodic_classes.len() {
        let (nu_i, _) = absorption_mass(graph, dec, i)?;
        let mu = class_stationary(graph, dec, i)?;
        for (local, &v) in dec.ergodic_classes[i].iter().enumerate() {
            values[v as usize] = nu_i * mu[local];
        }
        per_class_mass.push(nu_i);
    }
    Ok(LimitVector { values, per_class_mass })
}

/// Builds the aggregated chain over the ergodic classes. nu comes from a
/// single row solve z [I - Ttilde] = u_Ttilde (nu_i = (n_i + n_Ttilde *
/// z R_i 1) / n, the identical row of D + I); the per-class column solves
/// supply the absorption vectors and double as a consistency check.
pub fn aggregated_generator(
    graph: &WebGraph,
    dec: &StructureDecomposition,
) -> Result<AggregatedChain, Error> {
    if dec.ergodic_classes.is_empty() {
        return Err(degenerate());
    }
    let op = transient_operator(graph, dec);
    let n = graph.node_count() as f64;
    let n_tilde = op.len();
    let u = vec![1.0 / n_tilde as f64; n_tilde];
    let z = neumann_row(&op, &u)?;

    let mut class_distributions = Vec::with_capacity(dec.ergodic_classes.len());
    let mut absorption_vectors = Vec::with_capacity(dec.ergodic_classes.len());
    let mut aggregated_stationary = Vec::with_capacity(dec.ergodic_classes.len());
    for (i, class) in dec.ergodic_classes.iter().enumerate() {
        let mask = class_membership(graph, class);
        let r = op.step_into(&mask);
        let mut dot = Kahan::default();
        for (zv, rv) in z.iter().zip(&r) {
            dot.add(zv * rv);
        }
        let nu_row = (class.len() as f64 + n_tilde as f64 * dot.value()) / n;

        let (nu_col, phi) = absorption_mass(graph, dec, i)?;
        debug_assert!(
            math::abs(nu_row - nu_col) < 1e-8,
            "row and column routes to nu disagree"
        );
        let _ = nu_col;

        aggregated_stationary.push(nu_row);
        absorption_vectors.push(phi);
        class_distributions.push(class_stationary(graph, dec, i)?);
    }
    Ok(AggregatedChain { class_distributions, absorption_vectors, aggregated_stationary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::decompose;

    /// 0 <-> 1 leaks through dangling 2 into sinks {3, 4} and {5}.
    fn small_split() -> WebGraph {
        WebGraph::from_edges(
            6,
            &[(0, 1), (1, 0), (1, 2), (0, 3), (3, 4), (4, 3), (1, 5), (5, 5)],
        )
        .unwrap()
    }

    #[test]
    fn two_cycle_class_is_uniform() {
        let g = small_split();
        let dec = decompose(&g);
        assert_eq!(dec.ergodic_classes, alloc::vec![alloc::vec![3, 4], alloc::vec![5]]);
        let mu = class_stationary(&g, &dec, 0).unwrap();
        assert!((mu[0] - 0.5).abs() < 1e-12);
        assert!((mu[1] - 0.5).abs() < 1e-12);
        let single = class_stationary(&g, &dec, 1).unwrap();
        assert_eq!(single.len(), 1);
        assert!((single[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn absorption_masses_sum_to_one() {
        let g = small_split();
        let dec = decompose(&g);
        let (nu0, phi0) = absorption_mass(&g, &dec, 0).unwrap();
        let (nu1, phi1) = absorption_mass(&g, &dec, 1).unwrap();
        assert!((nu0 + nu1 - 1.0).abs() < 1e-12);
        // Absorption probabilities partition: phi_0 + phi_1 = 1 pointwise.
        for (a, b) in phi0.iter().zip(&phi1) {
            assert!((a + b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_class_takes_all_mass() {
        let g = WebGraph::from_edges(4, &[(0, 1), (1, 0), (1, 2), (0, 3), (3, 3)]).unwrap();
        let dec = decompose(&g);
        assert_eq!(dec.class_count(), 1);
        let (nu, _) = absorption_mass(&g, &dec, 0).unwrap();
        assert!((nu - 1.0).abs() < 1e-12);
        let limit = limit_pagerank(&g, &dec).unwrap();
        assert!((limit.values[3] - 1.0).abs() < 1e-12);
        for v in 0..3 {
            assert_eq!(limit.values[v], 0.0);
        }
    }

    #[test]
    fn no_classes_is_a_degenerate_error() {
        let g = WebGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let dec = decompose(&g);
        assert!(matches!(
            limit_pagerank(&g, &dec),
            Err(Error::DegenerateStructure { .. })
        ));
        assert!(matches!(
            aggregated_generator(&g, &dec),
            Err(Error::DegenerateStructure { .. })
        ));
    }

    #[test]
    fn aggregated_chain_is_consistent_with_absorption() {
        let g = small_split();
        let dec = decompose(&g);
        let chain = aggregated_generator(&g, &dec).unwrap();
        let total: f64 = chain.aggregated_stationary.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for i in 0..dec.class_count() {
            let (nu, _) = absorption_mass(&g, &dec, i).unwrap();
            assert!((chain.aggregated_stationary[i] - nu).abs() < 1e-12);
        }
    }
}
