//! Comparison of canonical bases on tensor spaces with parabolic
//! Kazhdan-Lusztig bases.
//!
//! For the regular label `f* = (-1, -3, -5, ...)` (doubled) every step
//! `M_{f* x} H_s` with `xs > x` is up, so `h -> M_{f*} h` identifies the
//! Hecke algebra with the span of the orbit of `f*` and `H_x` with `M_{f* x}`.

use std::sync::Arc;

use serde::Serialize;

use crate::bar::{canonical_solve, psi_bar, psi_i_bar, TieBreak};
use crate::coxeter::{CoxeterGroup, CoxeterType, Generator};
use crate::error::{Error, Result};
use crate::hecke::HeckeAlgebra;
use crate::laurent::LaurentPoly;
use crate::qsp::QSPConfig;
use crate::tensor::{build_module, levi_to_shape};
use crate::transition::TransitionMatrix;
use crate::uq::Convention;

/// Outcome of one oracle comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleComparison {
    pub kind: String,
    pub s: usize,
    pub levi: Vec<Generator>,
    pub rank: usize,
    /// Doubled labels of the compared columns.
    pub labels: Vec<Vec<i32>>,
    /// Entries `(row, column)` where the two matrices differ.
    pub mismatches: Vec<(usize, usize)>,
    /// Some compared column has support outside the orbit.
    pub leaks: bool,
}

impl OracleComparison {
    pub fn equal(&self) -> bool {
        self.mismatches.is_empty() && !self.leaks
    }
}

/// `f* w` for a signed-permutation window `w`.
pub fn orbit_label(window: &[i32]) -> Vec<i32> {
    window
        .iter()
        .map(|&k| {
            let x = -(2 * k.abs() - 1);
            if k < 0 {
                -x
            } else {
                x
            }
        })
        .collect()
}

/// Compares the canonical basis of `V^{(x)s}` modulo the Levi `levi` with
/// the parabolic KL basis of `(W, W_levi)`. Type `B` uses `psi^i` (with
/// `s_0` in the Levi giving a type-B exterior power); type `A` uses `psi`.
pub fn kl_oracle(
    kind: CoxeterType,
    s: usize,
    levi: &[Generator],
    rank: usize,
) -> Result<OracleComparison> {
    if rank < 2 * s {
        return Err(Error::Config(format!(
            "rank {rank} is too small for {s} regular labels"
        )));
    }
    if kind == CoxeterType::A && levi.contains(&0) {
        return Err(Error::Config("type A has no generator 0".into()));
    }
    let cfg = QSPConfig::new(rank, Convention::Part3);
    let group = Arc::new(CoxeterGroup::new(kind, s)?);
    let alg = HeckeAlgebra::new(group.clone());
    let kl = alg.parabolic_kl_matrix(levi)?;
    let module = build_module(&levi_to_shape(&vec![0; s], levi)?, &cfg)?;
    let bar = match kind {
        CoxeterType::B => psi_i_bar(&module)?.bar,
        CoxeterType::A => psi_bar(&module)?,
    };
    let t = canonical_solve(&bar, cfg.lattice(), TieBreak::Smallest)?;
    compare(&kl, &t, kind, s, levi, rank)
}

fn compare(
    kl: &TransitionMatrix,
    t: &TransitionMatrix,
    kind: CoxeterType,
    s: usize,
    levi: &[Generator],
    rank: usize,
) -> Result<OracleComparison> {
    let labels: Vec<Vec<i32>> = kl.labels.iter().map(|w| orbit_label(w)).collect();
    let idx: Vec<usize> = labels
        .iter()
        .map(|l| {
            t.labels.binary_search(l).map_err(|_| {
                Error::Solver(format!("label {l:?} is missing from the quotient basis"))
            })
        })
        .collect::<Result<_>>()?;
    let mut mismatches = Vec::new();
    let mut leaks = false;
    for (j, &f) in idx.iter().enumerate() {
        for (i, &g) in idx.iter().enumerate() {
            if kl.matrix.get(i, j) != t.matrix.get(g, f) {
                mismatches.push((i, j));
            }
        }
        leaks |= t.matrix.col(f).keys().any(|g| !idx.contains(g));
    }
    Ok(OracleComparison {
        kind: format!("{kind:?}"),
        s,
        levi: levi.to_vec(),
        rank,
        labels,
        mismatches,
        leaks,
    })
}

/// An entry `(x, w, h_{x,w})` with both elements given by their windows.
pub type KlEntry = (Vec<i32>, Vec<i32>, LaurentPoly);

/// The KL polynomials `h_{x,w}` of a group, keyed by windows.
pub fn kl_table(kind: CoxeterType, s: usize) -> Result<Vec<KlEntry>> {
    let group = Arc::new(CoxeterGroup::new(kind, s)?);
    let alg = HeckeAlgebra::new(group.clone());
    let mut out = Vec::new();
    for w in 0..group.len() {
        for x in 0..group.len() {
            let p = alg.kl_poly(x, w);
            if !p.is_zero() {
                out.push((group.element(x).clone(), group.element(w).clone(), p));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_orbit_labels() {
        assert_eq!(orbit_label(&[1, 2, 3]), vec![-1, -3, -5]);
        assert_eq!(orbit_label(&[-2, 1]), vec![3, -1]);
    }

    #[test]
    fn small_oracle_cases() {
        for (kind, s, levi, rank) in [
            (CoxeterType::B, 1, vec![], 2),
            (CoxeterType::B, 2, vec![1], 4),
            (CoxeterType::B, 2, vec![0], 4),
            (CoxeterType::B, 2, vec![], 4),
            (CoxeterType::A, 2, vec![], 4),
            (CoxeterType::A, 3, vec![1], 6),
        ] {
            let c = kl_oracle(kind, s, &levi, rank).unwrap();
            assert!(c.equal(), "{c:?}");
        }
    }

    #[test]
    fn rank_too_small() {
        assert!(kl_oracle(CoxeterType::B, 2, &[], 2).is_err());
        assert!(kl_oracle(CoxeterType::A, 2, &[0], 4).is_err());
    }
}
