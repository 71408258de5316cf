//! PageRank computation and the extended-SCC mass as a function of the
//! damping factor.
//!
//! Two independent routes to the same vector are exposed on purpose: the
//! sparse power iteration (the production path) and a dense resolvent
//! solve (the cross-check path for small graphs). The mass curve is the
//! series (1-c) * alpha * sum_k c^k a_k with a_k the k-step retention
//! probabilities of the extended-SCC block.

use alloc::vec;
use alloc::vec::Vec;

use crate::block::RestrictedOperator;
use crate::error::Error;
use crate::graph::{TransitionOperator, WebGraph};
use crate::math::{self, Kahan};
use crate::structure::StructureDecomposition;

/// Default L1 residual target for the iterative solvers.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
/// Default cap on mass-curve terms.
pub const DEFAULT_MAX_TERMS: usize = 5000;
/// Default coefficient floor; the series is cut once a_k drops below it.
pub const DEFAULT_TAIL_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct PageRankVector {
    pub values: Vec<f64>,
    pub damping: f64,
    /// L1 change of the final iteration (0 for the direct solve).
    pub residual: f64,
    pub iterations: u32,
}

/// Iteration budget matched to the contraction modulus of the operator:
/// ten times the count a pure geometric decay would need, floored at 1000.
pub fn default_max_iterations(damping: f64, tolerance: f64) -> u32 {
    if damping <= 0.0 || damping >= 1.0 || tolerance <= 0.0 || tolerance >= 1.0 {
        return 1000;
    }
    let needed = math::ln(tolerance) / math::ln(damping);
    let capped = (needed * 10.0).min(4.0e9);
    (capped as u32).max(1000)
}

/// Power iteration from the uniform vector to the requested L1 residual.
///
/// The damping factor must lie in `[0, 1)`; `tolerance` must be positive.
pub fn pagerank(
    op: &TransitionOperator<'_>,
    tolerance: f64,
    max_iterations: u32,
) -> Result<PageRankVector, Error> {
    assert!(tolerance > 0.0, "tolerance must be positive");
    let c = op.damping();
    if !(0.0..1.0).contains(&c) {
        return Err(Error::InvalidDamping { value: c });
    }
    let n = op.graph().node_count();
    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for k in 1..=max_iterations {
        op.apply_into(&x, &mut y).expect("buffers sized to the graph");
        residual = math::l1_diff(&x, &y);
        core::mem::swap(&mut x, &mut y);
        if residual <= tolerance {
            return Ok(PageRankVector { values: x, damping: c, residual, iterations: k });
        }
    }
    Err(Error::Convergence { iterations: max_iterations, residual })
}

/// Dense route: solves pi = (1-c)/n 1^T [I - cP]^(-1) by LU with partial
/// pivoting. Builds an n*n matrix; meant for small graphs and for
/// cross-checking the power iteration, not for production runs.
pub fn pagerank_resolvent(graph: &WebGraph, damping: f64) -> Result<PageRankVector, Error> {
    if damping == 1.0 {
        return Err(Error::SingularSystem);
    }
    if !(0.0..1.0).contains(&damping) {
        return Err(Error::InvalidDamping { value: damping });
    }
    let n = graph.node_count();

    // a[i][j] = delta_ij - c * P[j][i]; solving a * pi^T = (1-c)/n * 1.
    let mut a = vec![0.0f64; n * n];
    for i in 0..n {
        a[i * n + i] = 1.0;
    }
    for j in 0..n as u32 {
        let row = graph.successors(j);
        if row.is_empty() {
            let w = damping / n as f64;
            for i in 0..n {
                a[i * n + j as usize] -= w;
            }
        } else {
            let w = damping / row.len() as f64;
            for &t in row {
                a[t as usize * n + j as usize] -= w;
            }
        }
    }
    let mut b = vec![(1.0 - damping) / n as f64; n];
    lu_solve(&mut a, &mut b, n)?;

    let op = TransitionOperator::new(graph, damping)?;
    let mut step = vec![0.0; n];
    op.apply_into(&b, &mut step).expect("buffers sized to the graph");
    let residual = math::l1_diff(&b, &step);
    Ok(PageRankVector { values: b, damping, residual, iterations: 0 })
}

/// In-place LU with partial pivoting; `a` is row-major n*n, `b` the
/// right-hand side, overwritten with the solution.
fn lu_solve(a: &mut [f64], b: &mut [f64], n: usize) -> Result<(), Error> {
    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot_mag = math::abs(a[k * n + k]);
        for r in k + 1..n {
            let mag = math::abs(a[r * n + k]);
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag < 1e-300 {
            return Err(Error::SingularSystem);
        }
        if pivot_row != k {
            for col in 0..n {
                a.swap(k * n + col, pivot_row * n + col);
            }
            b.swap(k, pivot_row);
        }
        let pivot = a[k * n + k];
        for r in k + 1..n {
            let factor = a[r * n + k] / pivot;
            if factor == 0.0 {
                continue;
            }
            a[r * n + k] = 0.0;
            for col in k + 1..n {
                a[r * n + col] -= factor * a[k * n + col];
            }
            b[r] -= factor * b[k];
        }
    }
    for k in (0..n).rev() {
        let mut acc = b[k];
        for col in k + 1..n {
            acc -= a[k * n + col] * b[col];
        }
        b[k] = acc / a[k * n + k];
    }
    Ok(())
}

/// The retention series of the extended-SCC block: alpha together with
/// a_k = u_T T^k 1 for k = 0..K.
#[derive(Clone, Debug)]
pub struct MassCurve {
    alpha: f64,
    coefficients: Vec<f64>,
}

impl MassCurve {
    /// n_T / n, the uniform share of the extended SCC.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// a_0 = 1, then one entry per computed power. Non-increasing, in
    /// (0, 1] until an exact zero cuts the sequence.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn k_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// The extended-SCC PageRank mass at damping `c`. At c = 1 the series
    /// is not evaluated; the analytic limit 0 is returned exactly.
    pub fn evaluate(&self, c: f64) -> f64 {
        assert!((0.0..=1.0).contains(&c), "damping must be in [0, 1]");
        if c >= 1.0 {
            return 0.0;
        }
        let mut sum = Kahan::default();
        let mut power = 1.0;
        for &a in &self.coefficients {
            sum.add(a * power);
            power *= c;
        }
        (1.0 - c) * self.alpha * sum.value()
    }

    /// Upper bound on the series mass dropped by truncation at K:
    /// alpha * a_K * c^(K+1). Zero at c = 1 where the limit is exact.
    pub fn truncation_bound(&self, c: f64) -> f64 {
        assert!((0.0..=1.0).contains(&c), "damping must be in [0, 1]");
        if c >= 1.0 {
            return 0.0;
        }
        let last = *self.coefficients.last().expect("curve has a_0");
        self.alpha * last * libm::pow(c, (self.k_max() + 1) as f64)
    }
}

/// Computes the retention coefficients by repeated application of the
/// restricted block to the uniform start, stopping at `max_terms` powers
/// or once a_k < `tail_tol`.
pub fn escc_mass_curve(
    graph: &WebGraph,
    dec: &StructureDecomposition,
    max_terms: usize,
    tail_tol: f64,
) -> MassCurve {
    assert!(!dec.escc.is_empty(), "decomposition always has a nonempty ESCC");
    let op = RestrictedOperator::new(graph, &dec.escc);
    let n_t = op.len();
    let alpha = n_t as f64 / graph.node_count() as f64;

    let mut coefficients = Vec::with_capacity(64);
    coefficients.push(1.0);
    let mut x = vec![1.0 / n_t as f64; n_t];
    let mut y = vec![0.0; n_t];
    for _ in 1..=max_terms {
        let a_k = op.apply_left_sum(&x, &mut y);
        core::mem::swap(&mut x, &mut y);
        coefficients.push(a_k);
        if a_k < tail_tol || a_k == 0.0 {
            break;
        }
    }
    MassCurve { alpha, coefficients }
}

/// PageRank mass of a node set, with its uniform share and the
/// mass/share fairness ratio.
#[derive(Clone, Copy, Debug)]
pub struct SetMass {
    pub mass: f64,
    pub fair_share: f64,
    pub ratio: f64,
}

pub fn mass_of(set: &[u32], pr: &PageRankVector) -> SetMass {
    let mut acc = Kahan::default();
    for &v in set {
        acc.add(pr.values[v as usize]);
    }
    let mass = acc.value();
    let fair_share = set.len() as f64 / pr.values.len() as f64;
    let ratio = if fair_share > 0.0 { mass / fair_share } else { f64::NAN };
    SetMass { mass, fair_share, ratio }
}
