//! Catalog operators and integrability checks.
//!
//! Schrödinger operators `Σ ∂²/∂x_k² + R(x)` are rewritten in wall coordinates
//! `t_k = e^{⟨α_k, x⟩}`, where `∂/∂x_k = Σ_i ⟨α_i, e_k⟩ ϑ_i`. The radial SL(2)
//! and SL(3) operators come from their closed forms.

mod catalog;
mod split;
#[cfg(test)]
mod tests;

use rayon::prelude::*;
use serde::Serialize;

use crate::coeffield::Scalar;
use crate::error::{Error, Result};
use crate::opalg::OpMatrix;
use crate::poly::MultiIndex;

pub use catalog::{
    build_operator, catalog_build, catalog_entries, parse_catalog_call, resolve, BuiltOperator, CatalogEntry, Family, PotentialSpec, PotentialTerm, RootType,
};
pub use split::{
    potential_taylor, rotated_symbol, split_directions, splitting_membership, DirectionReport, EntryMembership,
    MembershipReport, Obstruction, SplitDirection, SplitPiece,
};

/// Coefficient of `t^t x^x ϑ^theta ∂_x^dx` in entry `(row, col)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualTerm {
    pub row: usize,
    pub col: usize,
    pub t: MultiIndex,
    pub x: MultiIndex,
    pub theta: MultiIndex,
    pub dx: MultiIndex,
    pub coeff: Scalar,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairResidual {
    pub i: usize,
    pub j: usize,
    pub residuals: Vec<ResidualTerm>,
    pub expression: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegrabilityReport {
    pub pass: bool,
    pub checked_to: u32,
    pub pairs: Vec<PairResidual>,
}

/// Nonzero terms of `op` with `|t-exponent| ≤ t_order`.
pub fn residual_terms(op: &OpMatrix, t_order: u32) -> Vec<ResidualTerm> {
    let m = op.m();
    let mut out = Vec::new();
    for row in 0..m {
        for col in 0..m {
            for ((theta, dx), s) in op.entry(row, col).terms() {
                for (t, x, coeff) in s.flat_terms() {
                    if t.total() <= t_order && !coeff.is_zero() {
                        out.push(ResidualTerm { row, col, t, x, theta: theta.clone(), dx: dx.clone(), coeff });
                    }
                }
            }
        }
    }
    out
}

/// Pairwise commutators of `P, Q_1, …` to t-order `t_order`, computed in parallel.
pub fn integrability_verify(p: &OpMatrix, qs: &[OpMatrix], t_order: u32) -> Result<IntegrabilityReport> {
    let mut ops = vec![p.clone()];
    ops.extend(qs.iter().cloned());
    for q in &ops[1..] {
        if q.nt() != p.nt() || q.nx() != p.nx() || q.m() != p.m() {
            return Err(Error::VarMismatch("operators do not share variables and size".into()));
        }
    }
    let t_order = ops.iter().map(|o| o.t_order()).min().unwrap_or(t_order).min(t_order);
    let pairs: Vec<(usize, usize)> = (0..ops.len()).flat_map(|i| (i + 1..ops.len()).map(move |j| (i, j))).collect();
    let pairs = pairs
        .par_iter()
        .map(|&(i, j)| {
            let c = ops[i].commutator(&ops[j])?;
            let c = c.truncated(t_order, c.x_order());
            Ok(PairResidual { i, j, residuals: residual_terms(&c, t_order), expression: c.to_expr_string() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntegrabilityReport { pass: pairs.iter().all(|p| p.residuals.is_empty()), checked_to: t_order, pairs })
}
