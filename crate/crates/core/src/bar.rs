//! Bar involutions on tensor modules and the triangular canonical basis solver.
//!
//! An antilinear operator `psi` is stored by its matrix `P` in the standard
//! basis: `psi(sum c_j e_j) = sum bar(c_j) P e_j`. It is an involution iff
//! `P bar(P) = 1`.
//!
//! On `M (x) N`, with `N` irreducible and generated from its extremal vector
//! `eta` by the operators `P_i` (the `F_i` in `Part2`, the `E_i` in `Part3`),
//! the involution is determined by `psi(m (x) eta) = psi(m) (x) eta` and by
//! commuting with a bar-invariant generator `X_i = R_i + 1 (x) P_i`:
//! `psi(m (x) P_i n) = X_i psi(m (x) n) - psi(R_i (m (x) n))`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laurent::{Lattice, LaurentPoly};
use crate::linalg;
use crate::qsp::{coideal_generator_matrix, IModule, QSPConfig};
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use crate::sparse::{axpy, SparseMat, SparseVec};
use crate::tensor::{exterior_quotient, order_lt, Chamber, FullTensor, Quotient, TensorModule};
use crate::transition::TransitionMatrix;
use crate::uq::{Convention, UModule};

/// An antilinear involution on a module, in the standard basis.
#[derive(Clone, Debug, PartialEq)]
pub struct BarOperator {
    pub labels: Vec<Vec<i32>>,
    pub label_scale: i32,
    pub matrix: SparseMat<LaurentPoly>,
    pub convention: Convention,
    /// A grading preserved by the operator (the `k_i` exponents); columns in
    /// different classes are solved independently.
    pub grading: Vec<Vec<i64>>,
}

impl BarOperator {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn is_involutive(&self) -> bool {
        self.matrix.mul(&self.matrix.bar()).is_identity()
    }

    /// `psi(v)` for a vector `v`.
    pub fn apply(&self, v: &SparseVec<LaurentPoly>) -> SparseVec<LaurentPoly> {
        let mut out = SparseVec::new();
        for (&j, c) in v {
            axpy(&mut out, &c.bar(), self.matrix.col(j));
        }
        out
    }

    pub fn is_fixed(&self, v: &SparseVec<LaurentPoly>) -> bool {
        &self.apply(v) == v
    }

    /// The linear operator `psi o X` where `X` is antilinear with matrix `x`.
    pub fn compose_antilinear(&self, x: &SparseMat<LaurentPoly>) -> SparseMat<LaurentPoly> {
        self.matrix.mul(&x.bar())
    }
}

fn extremal_and_raising(
    n: &UModule,
    conv: Convention,
) -> (&[SparseMat<LaurentPoly>], &[SparseMat<LaurentPoly>]) {
    match conv {
        Convention::Part2 => (&n.f, &n.e),
        Convention::Part3 => (&n.e, &n.f),
    }
}

/// Extends `psi` from `M` to `M (x) N`. `gens[i]` is the matrix of the
/// bar-invariant generator `X_i` on `M (x) N`; its part `1 (x) P_i` is
/// subtracted to obtain `R_i`.
pub fn extend_bar(
    psi_m: &SparseMat<LaurentPoly>,
    n: &UModule,
    conv: Convention,
    gens: &[SparseMat<LaurentPoly>],
) -> Result<SparseMat<LaurentPoly>> {
    let dm = psi_m.ncols();
    let dn = n.dim();
    let (p, s) = extremal_and_raising(n, conv);
    let nodes = n.nodes();
    let extremal: Vec<usize> = (0..dn)
        .filter(|&x| (0..nodes).all(|j| s[j].col(x).is_empty()))
        .collect();
    let [eta] = extremal[..] else {
        return Err(Error::Solver(format!(
            "second factor has {} extremal vectors",
            extremal.len()
        )));
    };
    // spanning tree of N from eta
    let mut steps: Vec<(usize, usize, usize, LaurentPoly)> = Vec::new();
    let mut seen = vec![false; dn];
    seen[eta] = true;
    let mut frontier = vec![eta];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &prev in &frontier {
            for (i, pi) in p.iter().enumerate() {
                for (&target, c) in pi.col(prev) {
                    if !seen[target] {
                        if pi.col(prev).len() != 1 {
                            return Err(Error::Solver("second factor is not minuscule".into()));
                        }
                        seen[target] = true;
                        steps.push((target, i, prev, c.clone()));
                        next.push(target);
                    }
                }
            }
        }
        frontier = next;
    }
    if seen.iter().any(|&x| !x) {
        return Err(Error::Solver(
            "second factor is not generated by its extremal vector".into(),
        ));
    }
    let id_m = SparseMat::identity(dm);
    let rests: Vec<SparseMat<LaurentPoly>> = gens
        .iter()
        .zip(p)
        .map(|(g, pi)| g.sub(&SparseMat::kron(&id_m, pi)))
        .collect();
    let mut cols: Vec<Option<SparseVec<LaurentPoly>>> = vec![None; dm * dn];
    for m in 0..dm {
        cols[m * dn + eta] = Some(
            psi_m
                .col(m)
                .iter()
                .map(|(&r, v)| (r * dn + eta, v.clone()))
                .collect(),
        );
    }
    for (target, i, prev, c) in steps {
        let unit = LaurentPoly::one()
            .div_exact(&c.bar())
            .ok_or_else(|| Error::NonIntegral(format!("generator scalar {c} is not a unit")))?;
        for m in 0..dm {
            let base = cols[m * dn + prev].as_ref().expect("processed");
            let mut x = gens[i].apply(base);
            for (&idx, coeff) in rests[i].col(m * dn + prev) {
                let known = cols[idx].as_ref().ok_or_else(|| {
                    Error::Solver("recursion reached an unprocessed vector".into())
                })?;
                axpy(&mut x, &coeff.bar().neg(), known);
            }
            let x = x
                .into_iter()
                .map(|(k, v)| (k, v.mul(&unit)))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            cols[m * dn + target] = Some(x);
        }
    }
    Ok(SparseMat::from_columns(
        dm * dn,
        cols.into_iter().map(Option::unwrap).collect(),
    ))
}

/// `psi` on the full tensor product of `V`s and `W`s.
pub fn psi_full(full: &FullTensor, cfg: &QSPConfig) -> Result<SparseMat<LaurentPoly>> {
    let conv = cfg.convention;
    let mut m = full.factors[0].module(full.rank);
    let mut psi = SparseMat::identity(m.dim());
    for f in &full.factors[1..] {
        let n = f.module(full.rank);
        let mn = UModule::tensor(&m, &n, conv);
        let gens = match conv {
            Convention::Part2 => &mn.f,
            Convention::Part3 => &mn.e,
        };
        psi = extend_bar(&psi, &n, conv, gens)?;
        m = mn;
    }
    Ok(psi)
}

/// `psi^i` on `M (x) N` from `psi^i` on a module `M` over the coideal subalgebra.
pub fn extend_bar_i(
    psi_m: &SparseMat<LaurentPoly>,
    m: &IModule,
    n: &UModule,
    cfg: &QSPConfig,
) -> Result<(SparseMat<LaurentPoly>, IModule)> {
    let mn = m.tensor(n, cfg, &cfg.params());
    let psi = extend_bar(psi_m, n, cfg.convention, &mn.b)?;
    Ok((psi, mn))
}

fn weight_height(w: &[i32]) -> i64 {
    w.iter()
        .enumerate()
        .map(|(a, &x)| -(a as i64) * x as i64)
        .sum()
}

/// `psi^i = Upsilon o psi` on a `U`-module, computed without `Upsilon`:
/// on vectors killed by every raising operator of `Upsilon` the two agree,
/// and `psi^i(P_i y) = B_i psi^i(y) - psi^i((B_i - P_i) y)`.
pub fn upgrade(
    t: &UModule,
    psi: &SparseMat<LaurentPoly>,
    cfg: &QSPConfig,
) -> Result<SparseMat<LaurentPoly>> {
    let conv = cfg.convention;
    let params = cfg.params();
    let nodes = cfg.nodes();
    let (p, s) = extremal_and_raising(t, conv);
    let b: Vec<SparseMat<LaurentPoly>> = (0..nodes)
        .map(|i| coideal_generator_matrix(t, i, cfg, &params))
        .collect();
    let rest: Vec<SparseMat<RatFunc>> = b
        .iter()
        .zip(p)
        .map(|(bi, pi)| bi.sub(pi).map(RatFunc::from_laurent))
        .collect();
    let b_rat: Vec<SparseMat<RatFunc>> = b.iter().map(|x| x.map(RatFunc::from_laurent)).collect();
    let psi_rat = psi.map(RatFunc::from_laurent);

    let mut groups: BTreeMap<Vec<i32>, Vec<usize>> = BTreeMap::new();
    for v in 0..t.dim() {
        groups.entry(t.weights[v].clone()).or_default().push(v);
    }
    let mut order: Vec<(Vec<i32>, Vec<usize>)> = groups.into_iter().collect();
    order.sort_by_key(|(w, _)| match conv {
        Convention::Part2 => -weight_height(w),
        Convention::Part3 => weight_height(w),
    });

    let mut out: Vec<Option<SparseVec<RatFunc>>> = vec![None; t.dim()];
    let apply_bar = |out: &Vec<Option<SparseVec<RatFunc>>>,
                     v: &SparseVec<RatFunc>|
     -> Result<SparseVec<RatFunc>> {
        let mut acc = SparseVec::new();
        for (&j, c) in v {
            let col = out[j]
                .as_ref()
                .ok_or_else(|| Error::Solver("upgrade reached an unprocessed weight".into()))?;
            axpy(&mut acc, &c.bar(), col);
        }
        Ok(acc)
    };
    for (_, xs) in &order {
        let pos: BTreeMap<usize, usize> = xs.iter().enumerate().map(|(k, &x)| (x, k)).collect();
        let mut cands: Vec<(Vec<RatFunc>, SparseVec<RatFunc>)> = Vec::new();
        // vectors killed by every raising operator
        let mut rows: Vec<Vec<RatFunc>> = Vec::new();
        for sj in s {
            let mut by_target: BTreeMap<usize, Vec<RatFunc>> = BTreeMap::new();
            for (k, &x) in xs.iter().enumerate() {
                for (&r, c) in sj.col(x) {
                    by_target
                        .entry(r)
                        .or_insert_with(|| vec![RatFunc::zero(); xs.len()])[k] =
                        RatFunc::from_laurent(c);
                }
            }
            rows.extend(by_target.into_values());
        }
        let null = if rows.is_empty() {
            (0..xs.len())
                .map(|k| {
                    (0..xs.len())
                        .map(|j| {
                            if j == k {
                                RatFunc::one()
                            } else {
                                RatFunc::zero()
                            }
                        })
                        .collect()
                })
                .collect()
        } else {
            linalg::nullspace(&rows, xs.len())
        };
        for h in null {
            let mut img = SparseVec::new();
            for (k, c) in h.iter().enumerate() {
                if !c.is_zero() {
                    axpy(&mut img, &c.bar(), psi_rat.col(xs[k]));
                }
            }
            cands.push((h, img));
        }
        for (i, pi) in p.iter().enumerate() {
            for y in 0..t.dim() {
                let col = pi.col(y);
                let Some((&first, _)) = col.iter().next() else {
                    continue;
                };
                if !pos.contains_key(&first) {
                    continue;
                }
                let Some(prev) = out[y].as_ref() else {
                    continue;
                };
                let mut vec = vec![RatFunc::zero(); xs.len()];
                for (&r, c) in col {
                    vec[pos[&r]] = RatFunc::from_laurent(c);
                }
                let unit = SparseVec::from([(y, RatFunc::one())]);
                let mut img = b_rat[i].apply(prev);
                let correction = apply_bar(&out, &rest[i].apply(&unit))?;
                axpy(&mut img, &RatFunc::one().neg(), &correction);
                cands.push((vec, img));
            }
        }
        // greedy independent subset
        let mut chosen: Vec<usize> = Vec::new();
        for k in 0..cands.len() {
            if chosen.len() == xs.len() {
                break;
            }
            let mut trial: Vec<usize> = chosen.clone();
            trial.push(k);
            let m: Vec<Vec<RatFunc>> = (0..xs.len())
                .map(|r| trial.iter().map(|&c| cands[c].0[r].clone()).collect())
                .collect();
            if linalg::rank(&m) == trial.len() {
                chosen = trial;
            }
        }
        if chosen.len() != xs.len() {
            return Err(Error::Solver(
                "weight space is not spanned by extremal vectors and lowered vectors".into(),
            ));
        }
        let c: Vec<Vec<RatFunc>> = (0..xs.len())
            .map(|r| chosen.iter().map(|&k| cands[k].0[r].clone()).collect())
            .collect();
        let cinv = linalg::inverse(&c).expect("independent candidates");
        for (j, &x) in xs.iter().enumerate() {
            let mut img = SparseVec::new();
            for (k, &cand) in chosen.iter().enumerate() {
                let a = &cinv[k][j];
                if !a.is_zero() {
                    axpy(&mut img, &a.bar(), &cands[cand].1);
                }
            }
            out[x] = Some(img);
        }
    }
    let cols: Vec<SparseVec<LaurentPoly>> = out
        .into_iter()
        .map(|c| {
            c.unwrap()
                .into_iter()
                .map(|(k, v)| {
                    v.to_laurent()
                        .map(|l| (k, l))
                        .ok_or_else(|| Error::NonIntegral(format!("psi^i entry {v:?}")))
                })
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    Ok(SparseMat::from_columns(t.dim(), cols))
}

/// `pi P s` for an antilinear operator preserving the kernel of `pi`.
pub fn descend(op: &SparseMat<LaurentPoly>, q: &Quotient) -> Result<SparseMat<LaurentPoly>> {
    let n = op.nrows();
    let kernel = SparseMat::identity(n).sub(&q.section.mul(&q.proj));
    if !q.proj.mul(&op.mul(&kernel.bar())).is_zero() {
        return Err(Error::Solver(
            "bar operator does not preserve the quotient ideal".into(),
        ));
    }
    Ok(q.proj.mul(&op.mul(&q.section)))
}

/// Bookkeeping for one tensoring step of the iterated construction.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    /// The weight-zero part of `Theta^i` is the identity.
    pub leading_term_identity: bool,
    /// Every other part moves the second factor in the direction of the convention.
    pub support_directed: bool,
}

/// The result of building `psi^i` on `T^{b,l}`.
#[derive(Clone, Debug)]
pub struct IBar {
    pub bar: BarOperator,
    pub steps: Vec<StepReport>,
}

/// `Theta^i = psi^i_{M(x)N} o (psi^i_M (x) psi_N)` for `psi_N = 1`, split by
/// the shift of the `N`-weight.
fn theta_i_report(
    psi_mn: &SparseMat<LaurentPoly>,
    psi_m: &SparseMat<LaurentPoly>,
    n: &UModule,
    conv: Convention,
) -> StepReport {
    let dn = n.dim();
    let theta = psi_mn.mul(&SparseMat::kron(&psi_m.bar(), &SparseMat::identity(dn)));
    let mut zero_part = SparseMat::zeros(theta.nrows(), theta.ncols());
    let mut directed = true;
    for (r, c, v) in theta.entries() {
        let (nr, nc) = (r % dn, c % dn);
        if nr == nc {
            zero_part.set(r, c, v.clone());
            continue;
        }
        let d = n.weight_diff(nr, nc);
        let mu = match conv {
            Convention::Part2 => d,
            Convention::Part3 => n.weight_diff(nc, nr),
        };
        directed &= mu.is_nonneg() && !mu.is_zero();
    }
    StepReport {
        leading_term_identity: zero_part.is_identity(),
        support_directed: directed,
    }
}

fn bar_operator(module: &TensorModule, matrix: SparseMat<LaurentPoly>) -> BarOperator {
    BarOperator {
        labels: module.labels.clone(),
        label_scale: 2,
        matrix,
        convention: module.cfg.convention,
        grading: module.imodule.k_exps.clone(),
    }
}

/// `psi` on `T^{b,l}` as a `U`-module (`a0 = 0`).
pub fn psi_bar(module: &TensorModule) -> Result<BarOperator> {
    if module.shape.a0 > 0 {
        return Err(Error::InvalidShape(
            "a type-B exterior power is not a U-module".into(),
        ));
    }
    let psi = psi_full(&module.full, &module.cfg)?;
    Ok(bar_operator(module, descend(&psi, &module.quotient)?))
}

/// The first tensor slot with its involution: `wedge^{a0} V_-` when
/// `a0 > 0`, else the first block, both inherited from `psi^i = Upsilon psi`
/// on the corresponding tensor power.
/// The involution, the module, its labels and the number of factors used.
type FirstSlot = (SparseMat<LaurentPoly>, IModule, Vec<Vec<i32>>, usize);

fn first_slot(module: &TensorModule) -> Result<FirstSlot> {
    let cfg = &module.cfg;
    let seg = module.shape.segments()[0].clone();
    let len = seg.end;
    let full = FullTensor::new(cfg.rank, &module.full.factors[..len], cfg);
    let gens: Vec<usize> = module
        .shape
        .levi
        .iter()
        .copied()
        .filter(|&g| g < len)
        .collect();
    let q = exterior_quotient(&full, &gens, Chamber::for_convention(cfg.convention))?;
    let psi = psi_full(&full, cfg)?;
    let psi_i = upgrade(&full.module, &psi, cfg)?;
    let psi_q = descend(&psi_i, &q)?;
    let im = IModule::restrict(&full.module, cfg, &cfg.params()).quotient(&q.proj, &q.section);
    let labels = q.lifts.iter().map(|&f| full.label(f)).collect();
    Ok((psi_q, im, labels, len))
}

/// `psi^i` on `T^{b,l}` by the iterated construction: the first slot carries
/// its own involution, and each remaining factor is tensored on.
pub fn psi_i_bar(module: &TensorModule) -> Result<IBar> {
    let cfg = &module.cfg;
    let (mut psi, mut im, mut labels, start) = first_slot(module)?;
    let mut steps = Vec::new();
    for f in &module.full.factors[start..] {
        let n = f.module(cfg.rank);
        let (next, mn) = extend_bar_i(&psi, &im, &n, cfg)?;
        steps.push(theta_i_report(&next, &psi, &n, cfg.convention));
        psi = next;
        im = mn;
    }
    let tail_len = module.full.factors.len() - start;
    let psi = if tail_len == 0 {
        psi
    } else {
        let tail = FullTensor::new(cfg.rank, &module.full.factors[start..], cfg);
        let gens: Vec<usize> = module
            .shape
            .levi
            .iter()
            .filter(|&&g| g > start)
            .map(|&g| g - start)
            .collect();
        let tq = exterior_quotient(&tail, &gens, Chamber::for_convention(cfg.convention))?;
        let dm = psi.ncols() / tail.dim();
        let tail_labels: Vec<Vec<i32>> = tq.lifts.iter().map(|&f| tail.label(f)).collect();
        labels = labels
            .iter()
            .flat_map(|a| {
                tail_labels
                    .iter()
                    .map(move |b| [a.clone(), b.clone()].concat())
            })
            .collect();
        let id = SparseMat::identity(dm);
        let q = Quotient {
            lifts: Vec::new(),
            proj: SparseMat::kron(&id, &tq.proj),
            section: SparseMat::kron(&id, &tq.section),
        };
        descend(&psi, &q)?
    };
    if labels != module.labels {
        return Err(Error::Solver(
            "iterated construction does not reproduce the standard basis".into(),
        ));
    }
    Ok(IBar {
        bar: bar_operator(module, psi),
        steps,
    })
}

/// `psi^i = Upsilon psi` on the whole module at once (`a0 = 0`).
pub fn psi_i_bar_upgraded(module: &TensorModule) -> Result<BarOperator> {
    if module.shape.a0 > 0 {
        return Err(Error::InvalidShape(
            "a type-B exterior power is not a U-module".into(),
        ));
    }
    let psi = psi_full(&module.full, &module.cfg)?;
    let psi_i = upgrade(&module.full.module, &psi, &module.cfg)?;
    Ok(bar_operator(module, descend(&psi_i, &module.quotient)?))
}

type SolvedColumns = Vec<(usize, SparseVec<LaurentPoly>)>;

/// Tie-breaking rule for the linear extension used by the solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    Smallest,
    Largest,
}

/// A linear extension of the support order of `psi`: `g` precedes `f`
/// whenever `e_g` occurs in `psi(e_f)`.
pub fn linear_extension(bar: &BarOperator, tie: TieBreak) -> Result<Vec<usize>> {
    let n = bar.dim();
    let mut indeg = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (g, f, v) in bar.matrix.entries() {
        if g == f {
            if !v.is_one() {
                return Err(Error::NotTriangular(format!(
                    "diagonal entry {v} at {}",
                    bar.labels[f].len()
                )));
            }
            continue;
        }
        succ[g].push(f);
        indeg[f] += 1;
    }
    if (0..n).any(|f| bar.matrix.get(f, f).is_zero()) {
        return Err(Error::NotTriangular("zero diagonal entry".into()));
    }
    let key = |x: usize| match tie {
        TieBreak::Smallest => x as i64,
        TieBreak::Largest => -(x as i64),
    };
    let mut heap: BinaryHeap<Reverse<(i64, usize)>> = (0..n)
        .filter(|&x| indeg[x] == 0)
        .map(|x| Reverse((key(x), x)))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, x))) = heap.pop() {
        order.push(x);
        for &y in &succ[x] {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                heap.push(Reverse((key(y), y)));
            }
        }
    }
    if order.len() != n {
        return Err(Error::NotTriangular(
            "support of the bar operator has a cycle".into(),
        ));
    }
    Ok(order)
}

/// Resolves `p - bar(p) = r` with `p` in the strict lattice.
fn resolve(r: &LaurentPoly, lattice: Lattice) -> Result<LaurentPoly> {
    let p = r.truncate_to(lattice);
    if &p.sub(&p.bar()) != r {
        return Err(Error::Solver(format!(
            "{r} is not of the form p - bar(p) in {lattice:?}"
        )));
    }
    Ok(p)
}

fn solve_block(
    bar: &BarOperator,
    block: &[usize],
    pos: &[usize],
    lattice: Lattice,
) -> Result<Vec<(usize, SparseVec<LaurentPoly>)>> {
    let mut done: BTreeMap<usize, SparseVec<LaurentPoly>> = BTreeMap::new();
    for &f in block {
        let mut rem = bar.matrix.col(f).clone();
        rem.remove(&f);
        let mut col = SparseVec::from([(f, LaurentPoly::one())]);
        while let Some(&g) = rem.keys().max_by_key(|&&g| pos[g]) {
            let rho = rem[&g].clone();
            let tg = done
                .get(&g)
                .ok_or_else(|| Error::NotTriangular("bar operator mixes grading classes".into()))?;
            axpy(&mut rem, &rho.neg(), tg);
            let p = resolve(&rho, lattice)?;
            axpy(&mut col, &p, tg);
        }
        done.insert(f, col);
    }
    Ok(done.into_iter().collect())
}

/// The unique `psi`-invariant basis `e_f + sum_g t_{gf} e_g` with `t_{gf}` in
/// the strict `lattice`, solved along a linear extension of the support order.
pub fn canonical_solve(
    bar: &BarOperator,
    lattice: Lattice,
    tie: TieBreak,
) -> Result<TransitionMatrix> {
    if !bar.is_involutive() {
        return Err(Error::NotInvolutive("P bar(P) is not the identity".into()));
    }
    let order = linear_extension(bar, tie)?;
    let mut pos = vec![0; bar.dim()];
    for (k, &f) in order.iter().enumerate() {
        pos[f] = k;
    }
    let mut classes: BTreeMap<&Vec<i64>, Vec<usize>> = BTreeMap::new();
    for &f in &order {
        classes.entry(&bar.grading[f]).or_default().push(f);
    }
    let blocks: Vec<Vec<usize>> = classes.into_values().collect();
    let solved: Vec<Result<SolvedColumns>> = blocks
        .par_iter()
        .map(|b| solve_block(bar, b, &pos, lattice))
        .collect();
    let mut cols = vec![SparseVec::new(); bar.dim()];
    for r in solved {
        for (f, c) in r? {
            cols[f] = c;
        }
    }
    Ok(TransitionMatrix {
        labels: bar.labels.clone(),
        label_scale: bar.label_scale,
        matrix: SparseMat::from_columns(bar.dim(), cols),
        order,
        lattice,
    })
}

/// The dual basis: the same construction in the complementary lattice.
pub fn dual_canonical_solve(
    bar: &BarOperator,
    lattice: Lattice,
    tie: TieBreak,
) -> Result<TransitionMatrix> {
    canonical_solve(bar, lattice.complement(), tie)
}

/// Every column is fixed by the operator.
pub fn columns_fixed(bar: &BarOperator, t: &TransitionMatrix) -> bool {
    (0..t.dim()).all(|f| bar.is_fixed(t.matrix.col(f)))
}

/// Off-diagonal entries sit only at rows allowed by the second-factor order:
/// the same last block, or a strictly smaller last-block weight.
pub fn support_respects_order(module: &TensorModule, t: &TransitionMatrix) -> bool {
    let segs = module.shape.segments();
    if segs.len() < 2 {
        return true;
    }
    let start = segs.last().unwrap().start;
    let conv = module.cfg.convention;
    t.matrix.entries().all(|(g, f, _)| {
        if g == f {
            return true;
        }
        let dg = &module.full.digits(module.quotient.lifts[g])[start..];
        let df = &module.full.digits(module.quotient.lifts[f])[start..];
        if dg == df {
            return true;
        }
        let (wg, wf) = (module.tail_weight(g, start), module.tail_weight(f, start));
        match conv {
            Convention::Part2 => order_lt(&wg, &wf),
            Convention::Part3 => order_lt(&wf, &wg),
        }
    })
}

/// Four checks of a based module over the coideal subalgebra.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct BasedModuleReport {
    pub weight_homogeneous: bool,
    pub integral_form_stable: bool,
    pub bar_compatible: bool,
    pub residue_basis: bool,
}

impl BasedModuleReport {
    pub fn all(&self) -> bool {
        self.weight_homogeneous
            && self.integral_form_stable
            && self.bar_compatible
            && self.residue_basis
    }
}

/// Inverse of a matrix that is unitriangular along `order`.
fn unitriangular_inverse(
    t: &SparseMat<LaurentPoly>,
    order: &[usize],
) -> Option<SparseMat<LaurentPoly>> {
    let n = t.ncols();
    let mut inv: Vec<SparseVec<LaurentPoly>> = vec![SparseVec::new(); n];
    let mut pos = vec![0; n];
    for (k, &f) in order.iter().enumerate() {
        pos[f] = k;
    }
    for &f in order {
        // e_f = T_f - sum_{g != f} t_gf e_g
        let mut col = SparseVec::from([(f, LaurentPoly::one())]);
        for (&g, v) in t.col(f) {
            if g == f {
                if !v.is_one() {
                    return None;
                }
                continue;
            }
            if pos[g] >= pos[f] {
                return None;
            }
            axpy(&mut col, &v.neg(), &inv[g]);
        }
        inv[f] = col;
    }
    Some(SparseMat::from_columns(n, inv))
}

/// Checks a candidate basis (columns of `basis.matrix`) of a module over the
/// coideal subalgebra against the involution `bar`.
pub fn verify_based_module(
    m: &IModule,
    bar: &BarOperator,
    basis: &TransitionMatrix,
) -> BasedModuleReport {
    let t = &basis.matrix;
    let weight_homogeneous = (0..t.ncols()).all(|f| {
        let ws: BTreeSet<&Vec<i64>> = t.col(f).keys().map(|&g| &m.k_exps[g]).collect();
        ws.len() == 1
    });
    // T and T^-1 both have Laurent entries, so the basis spans the standard
    // integral form, which every B_i preserves.
    let integral_form_stable = unitriangular_inverse(t, &basis.order).is_some();
    let psi = &bar.matrix;
    let nodes = m.b.len();
    let compat = (0..nodes).all(|i| {
        psi.mul(&m.b[i].bar()) == m.b[i].mul(psi)
            && psi.mul(&m.k_mat(i, 1).bar()) == m.k_mat(i, -1).mul(psi)
    });
    let bar_compatible = compat && columns_fixed(bar, basis);
    let closed = match basis.lattice {
        Lattice::QZq | Lattice::Zq => Lattice::Zq,
        Lattice::QinvZqinv | Lattice::Zqinv => Lattice::Zqinv,
        Lattice::A => Lattice::A,
    };
    let in_lattice = t.entries().all(|(_, _, v)| v.in_lattice(closed));
    let constants: Vec<Vec<RatFunc>> = (0..t.nrows())
        .map(|g| {
            (0..t.ncols())
                .map(|f| RatFunc::from_laurent(&LaurentPoly::constant(t.get(g, f).coeff(0))))
                .collect()
        })
        .collect();
    let residue_basis = in_lattice && linalg::rank(&constants) == t.ncols();
    BasedModuleReport {
        weight_homogeneous,
        integral_form_stable,
        bar_compatible,
        residue_basis,
    }
}
