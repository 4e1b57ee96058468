//! End-to-end runs: build a module, compute its involution and canonical
//! bases, and check them.

use serde::Serialize;

use crate::bar::{
    canonical_solve, columns_fixed, dual_canonical_solve, psi_i_bar, psi_i_bar_upgraded,
    support_respects_order, verify_based_module, BarOperator, BasedModuleReport, StepReport,
    TieBreak,
};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::qsp::QSPConfig;
use crate::sparse::SparseMat;
use crate::tensor::{build_module, is_even_root, levi_to_shape, TensorModule};
use crate::transition::TransitionMatrix;
use crate::uq::Convention;

/// A module with its involution and canonical basis.
#[derive(Clone, Debug)]
pub struct Computation {
    pub module: TensorModule,
    pub bar: BarOperator,
    pub steps: Vec<StepReport>,
    pub canonical: TransitionMatrix,
}

pub fn compute(b_seq: &[u8], levi: &[usize], cfg: &QSPConfig) -> Result<Computation> {
    let module = build_module(&levi_to_shape(b_seq, levi)?, cfg)?;
    compute_module(module)
}

pub fn compute_module(module: TensorModule) -> Result<Computation> {
    let ib = psi_i_bar(&module)?;
    if !ib.bar.is_involutive() {
        return Err(Error::NotInvolutive(
            "psi^i does not square to the identity".into(),
        ));
    }
    let canonical = canonical_solve(&ib.bar, module.cfg.lattice(), TieBreak::Smallest)?;
    Ok(Computation {
        module,
        bar: ib.bar,
        steps: ib.steps,
        canonical,
    })
}

impl Computation {
    pub fn dual(&self) -> Result<TransitionMatrix> {
        dual_canonical_solve(&self.bar, self.module.cfg.lattice(), TieBreak::Smallest)
    }
}

/// All checks of a computed basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub involutive: bool,
    pub leading_term_identity: bool,
    pub theta_support_directed: bool,
    pub unitriangular: bool,
    pub lattice: bool,
    pub bar_invariant: bool,
    pub support_order: bool,
    pub order_independent: bool,
    pub based_module: BasedModuleReport,
    /// `None` for a type-B first slot, where the one-step upgrade does not apply.
    pub upgrade_consistent: Option<bool>,
    /// Coefficients in `N[q]`; only asserted in the `Part3` pack.
    pub nonneg: bool,
    pub support_sizes: Vec<usize>,
}

impl Verification {
    /// Every check that applies to the convention holds.
    pub fn passed(&self, conv: Convention) -> bool {
        self.first_failure(conv).is_none()
    }

    pub fn first_failure(&self, conv: Convention) -> Option<&'static str> {
        let checks = [
            ("involutivity", self.involutive),
            ("leading term", self.leading_term_identity),
            ("theta support", self.theta_support_directed),
            ("unitriangularity", self.unitriangular),
            ("lattice", self.lattice),
            ("bar invariance", self.bar_invariant),
            ("support order", self.support_order),
            ("order independence", self.order_independent),
            ("weight homogeneity", self.based_module.weight_homogeneous),
            ("integral form", self.based_module.integral_form_stable),
            ("bar compatibility", self.based_module.bar_compatible),
            ("residue basis", self.based_module.residue_basis),
            (
                "upgrade consistency",
                self.upgrade_consistent.unwrap_or(true),
            ),
            ("positivity", self.nonneg || conv == Convention::Part2),
        ];
        checks.into_iter().find(|(_, ok)| !ok).map(|(name, _)| name)
    }
}

/// Runs every check on a computation.
pub fn verify(comp: &Computation) -> Result<Verification> {
    let bar = &comp.bar;
    let t = &comp.canonical;
    let lattice = comp.module.cfg.lattice();
    let involutive = bar.is_involutive();
    let order_independent = match canonical_solve(bar, lattice, TieBreak::Largest) {
        Ok(other) => other.matrix == t.matrix,
        Err(_) => false,
    };
    let upgrade_consistent = if comp.module.shape.a0 == 0 {
        Some(psi_i_bar_upgraded(&comp.module)? == *bar)
    } else {
        None
    };
    Ok(Verification {
        involutive,
        leading_term_identity: comp.steps.iter().all(|s| s.leading_term_identity),
        theta_support_directed: comp.steps.iter().all(|s| s.support_directed),
        unitriangular: t.is_unitriangular(),
        lattice: t.off_diagonal_in(lattice),
        bar_invariant: columns_fixed(bar, t),
        support_order: support_respects_order(&comp.module, t),
        order_independent,
        based_module: verify_based_module(&comp.module.imodule, bar, t),
        upgrade_consistent,
        nonneg: t.is_nonneg(),
        support_sizes: t.support_sizes(),
    })
}

/// Replaces one entry of the involution (a fault-injection hook).
pub fn corrupt_bar(bar: &mut BarOperator) {
    let n = bar.dim();
    let old = bar.matrix.get(0, n - 1);
    bar.matrix.set(0, n - 1, old.add(&LaurentPoly::q()));
}

/// A point of the test grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridPoint {
    pub b_seq: Vec<u8>,
    pub levi: Vec<usize>,
    pub rank: usize,
}

/// All `b`-sequences starting with `0` of length at most `max_len`.
pub fn b_sequences(max_len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for bits in 0..(1u32 << (len - 1)) {
            let mut b = vec![0u8];
            b.extend((0..len - 1).rev().map(|k| (bits >> k & 1) as u8));
            out.push(b);
        }
    }
    out
}

/// Subsets of simple roots made of even roots only.
pub fn even_levi_subsets(b_seq: &[u8]) -> Vec<Vec<usize>> {
    let s = b_seq.len();
    (0..(1u32 << s))
        .map(|mask| (0..s).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|levi| levi.iter().all(|&i| is_even_root(b_seq, i)))
        .collect()
}

/// Grid points whose module is nonzero at the given rank.
pub fn grid(max_len: usize, ranks: &[usize]) -> Vec<GridPoint> {
    let mut out = Vec::new();
    for &rank in ranks {
        for b in b_sequences(max_len) {
            for levi in even_levi_subsets(&b) {
                let Ok(shape) = levi_to_shape(&b, &levi) else {
                    continue;
                };
                let fits = 2 * shape.a0 <= rank && shape.blocks.iter().all(|&(_, a)| a <= rank);
                if fits {
                    out.push(GridPoint {
                        b_seq: b.clone(),
                        levi,
                        rank,
                    });
                }
            }
        }
    }
    out
}

/// Comparison of the canonical basis at ranks `N` and `N + 2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankStability {
    pub shared_labels: usize,
    /// Columns with a different entry on a shared row.
    pub differing_columns: Vec<Vec<i32>>,
    /// Columns of rank `N + 2` supported outside the shared labels.
    pub leaking_columns: Vec<Vec<i32>>,
}

impl RankStability {
    pub fn stable(&self) -> bool {
        self.differing_columns.is_empty()
    }
}

pub fn rank_stability(
    b_seq: &[u8],
    levi: &[usize],
    rank: usize,
    conv: Convention,
) -> Result<RankStability> {
    let small = compute(b_seq, levi, &QSPConfig::new(rank, conv))?.canonical;
    let large = compute(b_seq, levi, &QSPConfig::new(rank + 2, conv))?.canonical;
    let index: Vec<usize> = small
        .labels
        .iter()
        .map(|l| {
            large
                .labels
                .binary_search(l)
                .map_err(|_| Error::Solver(format!("label {l:?} lost at rank {}", rank + 2)))
        })
        .collect::<Result<_>>()?;
    let restricted: SparseMat<LaurentPoly> = large.matrix.submatrix(&index, &index);
    let mut differing_columns = Vec::new();
    let mut leaking_columns = Vec::new();
    for (j, &big) in index.iter().enumerate() {
        if restricted.col(j) != small.matrix.col(j) {
            differing_columns.push(small.labels[j].clone());
        }
        if large
            .matrix
            .col(big)
            .keys()
            .any(|g| index.binary_search(g).is_err())
        {
            leaking_columns.push(small.labels[j].clone());
        }
    }
    Ok(RankStability {
        shared_labels: index.len(),
        differing_columns,
        leaking_columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        assert_eq!(b_sequences(3).len(), 7);
        assert_eq!(even_levi_subsets(&[0, 1]), vec![vec![], vec![0]]);
        assert_eq!(even_levi_subsets(&[0, 0]).len(), 4);
        let g = grid(3, &[2]);
        assert!(g.iter().all(|p| p.rank == 2));
        assert!(!g.iter().any(|p| p.b_seq == [0, 0, 0] && p.levi == [1, 2]));
    }

    #[test]
    fn compute_and_verify_small() {
        for conv in [Convention::Part2, Convention::Part3] {
            let comp = compute(&[0, 1], &[0], &QSPConfig::new(4, conv)).unwrap();
            let v = verify(&comp).unwrap();
            assert!(v.passed(conv), "{v:?}");
            assert_eq!(v.upgrade_consistent, None);
        }
    }

    #[test]
    fn corrupted_bar_fails_involutivity() {
        let mut comp = compute(&[0, 0], &[], &QSPConfig::new(2, Convention::Part3)).unwrap();
        corrupt_bar(&mut comp.bar);
        let v = verify(&comp).unwrap();
        assert_eq!(v.first_failure(Convention::Part3), Some("involutivity"));
    }

    #[test]
    fn stability_from_two_to_four() {
        let r = rank_stability(&[0, 0], &[], 2, Convention::Part3).unwrap();
        assert_eq!(r.shared_labels, 4);
        assert!(r.stable(), "{r:?}");
    }
}
