//! Spectral summaries of the extended-SCC block: the dominant eigenvalue,
//! the one-step retention probability, and the quasi-stationary
//! distribution.
//!
//! The dominant eigenvalue is read off the retention series: the ratios
//! lambda1^(k) = a_k / a_(k-1) converge to it from the same power
//! iteration that builds the mass curve, so no separate eigensolver runs.

use alloc::vec;
use alloc::vec::Vec;

use crate::block::RestrictedOperator;
use crate::error::Error;
use crate::graph::WebGraph;
use crate::math::{self, Kahan};
use crate::pagerank::MassCurve;
use crate::structure::StructureDecomposition;

/// Successive ratios must sit this close for this many trailing steps for
/// the eigenvalue estimate to be flagged converged.
const RATIO_PLATEAU_TOL: f64 = 1e-12;
const RATIO_PLATEAU_RUN: usize = 5;

/// Relative slack when testing the ratio sequence for monotonicity. Once
/// the ratios reach their floating-point plateau they wobble by an ulp in
/// either direction; that wobble is not a monotonicity violation.
const MONOTONE_SLACK: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct SpectralSummary {
    /// Dominant-eigenvalue estimate: the last computed ratio.
    pub lambda1: f64,
    /// One-step retention from uniform, u_T T 1 = a_1.
    pub p1: f64,
    /// lambda1^(k) = a_k / a_(k-1), k = 1.. over the computed range.
    pub lambda_seq: Vec<f64>,
    /// sup of a_k^(1/k) over the computed k; with a monotone ratio
    /// sequence this approaches lambda1 from below as K grows.
    pub p_sup: f64,
    /// inf of a_k^(1/k) over the computed k.
    pub p_inf: f64,
    /// Whether the ratio sequence was non-decreasing over the whole
    /// computed range (up to ulp-level plateau wobble).
    pub monotone_flag: bool,
    /// Whether the trailing ratios settled to a plateau.
    pub converged: bool,
    /// Set when a coefficient hit exactly zero and the sequence was cut.
    pub degenerate: bool,
}

/// Derives the eigenvalue summary from a mass curve. Needs at least a_0
/// and a_1.
pub fn lambda_sequence(curve: &MassCurve) -> Result<SpectralSummary, Error> {
    let coeffs = curve.coefficients();
    if coeffs.len() < 2 {
        return Err(Error::TooFewCoefficients { needed: 2, got: coeffs.len() });
    }

    let mut lambda_seq = Vec::with_capacity(coeffs.len() - 1);
    let mut degenerate = false;
    for k in 1..coeffs.len() {
        if coeffs[k - 1] == 0.0 {
            degenerate = true;
            break;
        }
        lambda_seq.push(coeffs[k] / coeffs[k - 1]);
    }
    // a_0 = 1 guarantees at least one ratio even when a_1 = 0.
    let p1 = lambda_seq[0];
    let lambda1 = *lambda_seq.last().expect("at least one ratio");

    let mut monotone_flag = true;
    for w in lambda_seq.windows(2) {
        if w[1] < w[0] * (1.0 - MONOTONE_SLACK) {
            monotone_flag = false;
            break;
        }
    }

    let mut converged = false;
    if lambda_seq.len() > RATIO_PLATEAU_RUN {
        converged = lambda_seq[lambda_seq.len() - RATIO_PLATEAU_RUN - 1..]
            .windows(2)
            .all(|w| math::abs(w[1] - w[0]) < RATIO_PLATEAU_TOL);
    }

    let mut p_sup = f64::NEG_INFINITY;
    let mut p_inf = f64::INFINITY;
    for (k, &a) in coeffs.iter().enumerate().skip(1) {
        if a == 0.0 {
            break;
        }
        // k = 1 is taken verbatim so p_inf/p_sup compare exactly against
        // p1 instead of exp(ln(a_1)) one ulp away.
        let root = if k == 1 { a } else { math::exp(math::ln(a) / k as f64) };
        p_sup = p_sup.max(root);
        p_inf = p_inf.min(root);
    }

    Ok(SpectralSummary { lambda1, p1, lambda_seq, p_sup, p_inf, monotone_flag, converged, degenerate })
}

#[derive(Clone, Debug)]
pub struct QuasiStationary {
    /// Probability-normalized left dominant eigenvector over the ESCC
    /// nodes, in ascending node-id order.
    pub distribution: Vec<f64>,
    /// The eigenvalue recovered alongside it: the L1 norm of one step.
    pub eigenvalue: f64,
    /// L1 defect of x T = lambda x at the returned vector.
    pub residual: f64,
    pub iterations: u32,
}

const QS_MAX_ITERATIONS: u32 = 10_000_000;
/// Steps of non-decreasing residual before the iteration is declared
/// oscillating and switched to its damped form.
const OSCILLATION_RUN: u32 = 10;

/// Left power iteration x <- xT / |xT| on the extended-SCC block, started
/// from uniform, run until the L1 step change drops below `tolerance`.
///
/// A periodic block makes the plain iteration cycle; when the step change
/// stops improving the update switches to x <- (x + xT/|xT|)/2, which has
/// the same fixed point and always converges on an irreducible block.
pub fn quasi_stationary(
    graph: &WebGraph,
    dec: &StructureDecomposition,
    tolerance: f64,
) -> Result<QuasiStationary, Error> {
    assert!(tolerance > 0.0, "tolerance must be positive");
    let op = RestrictedOperator::new(graph, &dec.escc);
    let n_t = op.len();
    let mut x = vec![1.0 / n_t as f64; n_t];
    let mut y = vec![0.0; n_t];

    let mut damped = false;
    let mut stall_run = 0u32;
    let mut prev_change = f64::INFINITY;

    for k in 1..=QS_MAX_ITERATIONS {
        let norm = op.apply_left_sum(&x, &mut y);
        if norm <= 0.0 {
            return Err(Error::DegenerateStructure { reason: "block annihilates the uniform vector" });
        }
        for v in y.iter_mut() {
            *v /= norm;
        }
        let change = math::l1_diff(&x, &y);
        if damped {
            for (xv, yv) in x.iter_mut().zip(&y) {
                *xv = 0.5 * (*xv + *yv);
            }
        } else {
            core::mem::swap(&mut x, &mut y);
        }
        if change <= tolerance {
            let lambda = op.apply_left_sum(&x, &mut y);
            let mut defect = Kahan::default();
            for (i, &xi) in x.iter().enumerate() {
                defect.add(math::abs(y[i] - lambda * xi));
            }
            return Ok(QuasiStationary {
                distribution: x,
                eigenvalue: lambda,
                residual: defect.value(),
                iterations: k,
            });
        }
        if change >= prev_change {
            stall_run += 1;
            if stall_run >= OSCILLATION_RUN {
                damped = true;
            }
        } else {
            stall_run = 0;
        }
        prev_change = change;
    }
    Err(Error::Convergence { iterations: QS_MAX_ITERATIONS, residual: prev_change })
}

/// u_T T 1: the probability that a walk started uniformly in the extended
/// SCC is still there after one step. Shares its arithmetic with the mass
/// curve, so it equals a_1 bitwise.
pub fn one_step_retention(graph: &WebGraph, dec: &StructureDecomposition) -> f64 {
    let op = RestrictedOperator::new(graph, &dec.escc);
    let n_t = op.len();
    let x = vec![1.0 / n_t as f64; n_t];
    let mut y = vec![0.0; n_t];
    op.apply_left_sum(&x, &mut y)
}
