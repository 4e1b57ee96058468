//! The quantum group `U_q(sl_N)` at the level needed here: the root lattice,
//! the algebra `f = U^+` realized as words modulo the radical of Lusztig's
//! form, quasi-R matrix components, and modules given by generator matrices.
//!
//! Dynkin nodes are numbered `0..N-1` internally (node `k` is `eps_k - eps_{k+1}`).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::linalg::{self, DenseMat, Solution};
use crate::ratfunc::RatFunc;
use crate::scalar::{Field, Scalar};
use crate::sparse::SparseMat;

/// Which comultiplication is in force.
///
/// `Part2`: `D(E) = E(x)1 + K(x)E`, `D(F) = F(x)K^-1 + 1(x)F`.
/// `Part3`: `D(E) = 1(x)E + E(x)K^-1`, `D(F) = F(x)1 + K(x)F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    Part2,
    Part3,
}

/// `(alpha_i, alpha_j)` for type `A`.
pub fn cartan(i: usize, j: usize) -> i64 {
    if i == j {
        2
    } else if i.abs_diff(j) == 1 {
        -1
    } else {
        0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootLatticeVec(pub Vec<i32>);

impl RootLatticeVec {
    pub fn zero(nodes: usize) -> Self {
        RootLatticeVec(vec![0; nodes])
    }

    pub fn simple(nodes: usize, i: usize) -> Self {
        let mut v = vec![0; nodes];
        v[i] = 1;
        RootLatticeVec(v)
    }

    /// Root coordinates of an `eps`-coordinate vector whose entries sum to zero.
    pub fn from_eps(d: &[i32]) -> Self {
        debug_assert_eq!(d.iter().sum::<i32>(), 0);
        let mut acc = 0;
        RootLatticeVec(
            d[..d.len() - 1]
                .iter()
                .map(|&x| {
                    acc += x;
                    acc
                })
                .collect(),
        )
    }

    pub fn nodes(&self) -> usize {
        self.0.len()
    }

    pub fn height(&self) -> i32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        RootLatticeVec(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        RootLatticeVec(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    /// `(alpha_i, self)`
    pub fn pair_simple(&self, i: usize) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(j, &c)| cartan(i, j) * c as i64)
            .sum()
    }

    pub fn pair(&self, o: &Self) -> i64 {
        o.0.iter()
            .enumerate()
            .map(|(i, &c)| c as i64 * self.pair_simple(i))
            .sum()
    }

    /// The order `a < b` iff `a - b` is a nonzero element of `N I`.
    pub fn order_lt(a: &Self, b: &Self) -> bool {
        let d = a.sub(b);
        d.is_nonneg() && !d.is_zero()
    }
}

pub type Word = Vec<usize>;

pub fn word_weight(nodes: usize, w: &[usize]) -> RootLatticeVec {
    let mut v = vec![0; nodes];
    for &i in w {
        v[i] += 1;
    }
    RootLatticeVec(v)
}

/// Every word whose letters have multiplicities `nu`, ordered by number of
/// runs and then lexicographically.
pub fn words_of_weight(nu: &RootLatticeVec) -> Vec<Word> {
    fn rec(counts: &mut Vec<i32>, cur: &mut Word, out: &mut Vec<Word>, len: usize) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in 0..counts.len() {
            if counts[i] > 0 {
                counts[i] -= 1;
                cur.push(i);
                rec(counts, cur, out, len);
                cur.pop();
                counts[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    let mut counts = nu.0.clone();
    rec(&mut counts, &mut Vec::new(), &mut out, nu.height() as usize);
    out.sort_by_key(|w| (runs(w).len(), w.clone()));
    out
}

/// Run-length decomposition `[(letter, multiplicity), ...]`.
pub fn runs(w: &[usize]) -> Vec<(usize, u32)> {
    let mut out: Vec<(usize, u32)> = Vec::new();
    for &i in w {
        match out.last_mut() {
            Some((j, m)) if *j == i => *m += 1,
            _ => out.push((i, 1)),
        }
    }
    out
}

/// Quantum integer `[a]`.
pub fn qint(a: u32) -> LaurentPoly {
    LaurentPoly::from_terms((0..a).map(|k| (1i64, a as i64 - 1 - 2 * k as i64)))
}

pub fn qfactorial(a: u32) -> LaurentPoly {
    (1..=a).fold(LaurentPoly::one(), |acc, k| acc.mul(&qint(k)))
}

/// `prod [a]!` over the runs of `w`, so that the plain product of the letters
/// of `w` equals this factor times the divided-power monomial of `w`.
pub fn run_factorial(w: &[usize]) -> LaurentPoly {
    runs(w)
        .iter()
        .fold(LaurentPoly::one(), |acc, &(_, m)| acc.mul(&qfactorial(m)))
}

/// Right twisted derivation `r_i` on a word: `sum_k q^{(alpha_i, |w_{>k}|)} w\w_k`.
pub fn r_word(nodes: usize, i: usize, w: &[usize]) -> Vec<(i64, Word)> {
    let mut out = Vec::new();
    for k in 0..w.len() {
        if w[k] == i {
            let e = word_weight(nodes, &w[k + 1..]).pair_simple(i);
            let mut rest = w.to_vec();
            rest.remove(k);
            out.push((e, rest));
        }
    }
    out
}

/// Left twisted derivation `ir_i` on a word: `sum_k q^{(alpha_i, |w_{<k}|)} w\w_k`.
pub fn ir_word(nodes: usize, i: usize, w: &[usize]) -> Vec<(i64, Word)> {
    let mut out = Vec::new();
    for k in 0..w.len() {
        if w[k] == i {
            let e = word_weight(nodes, &w[..k]).pair_simple(i);
            let mut rest = w.to_vec();
            rest.remove(k);
            out.push((e, rest));
        }
    }
    out
}

/// Number of ways to write `nu` as a sum of positive roots of `A_{nodes}`.
pub fn kostant_partition_count(nu: &RootLatticeVec) -> u64 {
    let n = nu.nodes();
    let roots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let mut memo: HashMap<(usize, Vec<i32>), u64> = HashMap::new();
    fn rec(
        k: usize,
        rest: Vec<i32>,
        roots: &[(usize, usize)],
        memo: &mut HashMap<(usize, Vec<i32>), u64>,
    ) -> u64 {
        if rest.iter().all(|&c| c == 0) {
            return 1;
        }
        if k == roots.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(k, rest.clone())) {
            return v;
        }
        let (i, j) = roots[k];
        let mut total = 0;
        let mut cur = rest.clone();
        loop {
            total += rec(k + 1, cur.clone(), roots, memo);
            if (i..=j).any(|t| cur[t] == 0) {
                break;
            }
            for c in cur.iter_mut().take(j + 1).skip(i) {
                *c -= 1;
            }
        }
        memo.insert((k, rest), total);
        total
    }
    rec(0, nu.0.clone(), &roots, &mut memo)
}

/// An element of `f` of a single weight, written in divided-power monomials:
/// the word `w` stands for `prod_runs E_i^{(a)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct UPlusElement {
    pub weight: RootLatticeVec,
    pub terms: BTreeMap<Word, RatFunc>,
}

impl UPlusElement {
    pub fn zero(weight: RootLatticeVec) -> Self {
        UPlusElement {
            weight,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nodes: usize) -> Self {
        Self::monomial(nodes, Vec::new())
    }

    pub fn monomial(nodes: usize, w: Word) -> Self {
        UPlusElement {
            weight: word_weight(nodes, &w),
            terms: BTreeMap::from([(w, RatFunc::one())]),
        }
    }

    /// The plain product `E_{w_1} ... E_{w_k}`.
    pub fn plain_word(nodes: usize, w: &[usize]) -> Self {
        Self::from_plain(
            word_weight(nodes, w),
            &BTreeMap::from([(w.to_vec(), RatFunc::one())]),
        )
    }

    pub fn from_plain(weight: RootLatticeVec, plain: &BTreeMap<Word, RatFunc>) -> Self {
        let terms = plain
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(w, c)| (w.clone(), c.mul(&RatFunc::from_laurent(&run_factorial(w)))))
            .collect();
        UPlusElement { weight, terms }
    }

    pub fn to_plain(&self) -> BTreeMap<Word, RatFunc> {
        self.terms
            .iter()
            .map(|(w, c)| (w.clone(), c.div(&RatFunc::from_laurent(&run_factorial(w)))))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (w, c) in &o.terms {
            let v = terms.get(w).map_or_else(|| c.clone(), |x| x.add(c));
            if v.is_zero() {
                terms.remove(w);
            } else {
                terms.insert(w.clone(), v);
            }
        }
        UPlusElement {
            weight: self.weight.clone(),
            terms,
        }
    }

    pub fn scale(&self, s: &RatFunc) -> Self {
        if s.is_zero() {
            return Self::zero(self.weight.clone());
        }
        UPlusElement {
            weight: self.weight.clone(),
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.mul(s)))
                .collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut plain = BTreeMap::new();
        for (w1, c1) in self.to_plain() {
            for (w2, c2) in o.to_plain() {
                let mut w = w1.clone();
                w.extend(&w2);
                add_plain(&mut plain, w, &c1.mul(&c2));
            }
        }
        Self::from_plain(self.weight.add(&o.weight), &plain)
    }

    /// Coefficientwise bar (the bar involution of `f` fixes every generator).
    pub fn bar(&self) -> Self {
        UPlusElement {
            weight: self.weight.clone(),
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.bar()))
                .collect(),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_laurent())
    }

    pub fn laurent_terms(&self) -> Option<BTreeMap<Word, LaurentPoly>> {
        self.terms
            .iter()
            .map(|(w, c)| c.to_laurent().map(|p| (w.clone(), p)))
            .collect()
    }
}

fn add_plain(acc: &mut BTreeMap<Word, RatFunc>, w: Word, c: &RatFunc) {
    if c.is_zero() {
        return;
    }
    let v = acc.get(&w).map_or_else(|| c.clone(), |x| x.add(c));
    if v.is_zero() {
        acc.remove(&w);
    } else {
        acc.insert(w, v);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `ir_i`, removing a letter with the twist from the letters before it.
    Left,
    /// `r_i`, removing a letter with the twist from the letters after it.
    Right,
}

pub fn derivation_r(side: Side, i: usize, x: &UPlusElement) -> UPlusElement {
    let nodes = x.weight.nodes();
    let mut weight = x.weight.clone();
    weight.0[i] -= 1;
    let mut plain = BTreeMap::new();
    for (w, c) in x.to_plain() {
        let parts = match side {
            Side::Left => ir_word(nodes, i, &w),
            Side::Right => r_word(nodes, i, &w),
        };
        for (e, rest) in parts {
            add_plain(
                &mut plain,
                rest,
                &c.mul(&RatFunc::from_laurent(&LaurentPoly::q_pow(e))),
            );
        }
    }
    UPlusElement::from_plain(weight, &plain)
}

/// `(1 - q^-2)^h`
fn form_scale(h: i32) -> RatFunc {
    let base = LaurentPoly::from_terms([(1i64, 0i64), (-1, -2)]);
    RatFunc::from_laurent(&base.pow(h.unsigned_abs()))
}

/// Weight basis of `f_nu` and its normalized Gram data.
#[derive(Clone, Debug)]
pub struct WeightBasis {
    pub words: Vec<Word>,
    /// `(1 - q^-2)^h (b_k, b_l)` on plain words.
    pub gram: DenseMat<LaurentPoly>,
    pub gram_inv: DenseMat<RatFunc>,
}

/// Quasi-R matrix component: `Theta_nu = sum_k L(word_k) (x) U(second_k)`
/// where `L` is the lowering word (plain product of `F`s) and the scalar
/// normalization is already folded into the second legs.
#[derive(Clone, Debug)]
pub struct ThetaComponent {
    pub weight: RootLatticeVec,
    pub summands: Vec<(Word, UPlusElement)>,
}

/// The algebra `f` of rank `nodes`, with memoized form values and bases.
#[derive(Debug)]
pub struct FAlgebra {
    nodes: usize,
    height_cap: i32,
    pairings: Mutex<HashMap<(Word, Word), LaurentPoly>>,
    bases: Mutex<HashMap<RootLatticeVec, Arc<WeightBasis>>>,
}

impl FAlgebra {
    pub fn new(nodes: usize, height_cap: i32) -> Self {
        FAlgebra {
            nodes,
            height_cap,
            pairings: Mutex::new(HashMap::new()),
            bases: Mutex::new(HashMap::new()),
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn height_cap(&self) -> i32 {
        self.height_cap
    }

    fn check_cap(&self, nu: &RootLatticeVec) -> Result<()> {
        if nu.height() > self.height_cap {
            return Err(Error::HeightCapExceeded {
                height: nu.height() as i64,
                cap: self.height_cap as i64,
            });
        }
        if !nu.is_nonneg() || nu.nodes() != self.nodes {
            return Err(Error::WeightMismatch(format!(
                "{:?} is not in N I for {} nodes",
                nu.0, self.nodes
            )));
        }
        Ok(())
    }

    /// `(1 - q^-2)^h (w1, w2)` for plain words, computed through
    /// `(theta_i y, x) = (theta_i, theta_i) (y, ir_i x)`.
    pub fn pair_words(&self, w1: &[usize], w2: &[usize]) -> LaurentPoly {
        if word_weight(self.nodes, w1) != word_weight(self.nodes, w2) {
            return LaurentPoly::zero();
        }
        if w1.is_empty() {
            return LaurentPoly::one();
        }
        let key = (w1.to_vec(), w2.to_vec());
        if let Some(v) = self.pairings.lock().unwrap().get(&key) {
            return v.clone();
        }
        let mut total = LaurentPoly::zero();
        for (e, rest) in ir_word(self.nodes, w1[0], w2) {
            let p = self.pair_words(&w1[1..], &rest);
            if !p.is_zero() {
                total = total.add(&p.shift(e));
            }
        }
        self.pairings.lock().unwrap().insert(key, total.clone());
        total
    }

    fn pair_plain(&self, x: &BTreeMap<Word, RatFunc>, y: &BTreeMap<Word, RatFunc>) -> RatFunc {
        let mut acc = RatFunc::zero();
        for (w1, c1) in x {
            for (w2, c2) in y {
                let p = self.pair_words(w1, w2);
                if !p.is_zero() {
                    acc = acc.add(&c1.mul(c2).mul(&RatFunc::from_laurent(&p)));
                }
            }
        }
        acc
    }

    /// Lusztig's symmetric bilinear form.
    pub fn lusztig_form(&self, x: &UPlusElement, y: &UPlusElement) -> Result<RatFunc> {
        if x.weight != y.weight {
            return Err(Error::WeightMismatch(format!(
                "{:?} vs {:?}",
                x.weight.0, y.weight.0
            )));
        }
        let raw = self.pair_plain(&x.to_plain(), &y.to_plain());
        Ok(raw.div(&form_scale(x.weight.height())))
    }

    pub fn weight_basis(&self, nu: &RootLatticeVec) -> Result<Arc<WeightBasis>> {
        self.check_cap(nu)?;
        if let Some(b) = self.bases.lock().unwrap().get(nu) {
            return Ok(b.clone());
        }
        let words = words_of_weight(nu);
        let full: Vec<Vec<LaurentPoly>> = words
            .iter()
            .map(|a| words.iter().map(|b| self.pair_words(a, b)).collect())
            .collect();
        let picked = linalg::rank_profile_mod(&full);
        let dim = kostant_partition_count(nu) as usize;
        if picked.len() != dim {
            return Err(Error::SingularGram(format!(
                "{:?}: modular rank {} but expected dimension {dim}",
                nu.0,
                picked.len()
            )));
        }
        let basis: Vec<Word> = picked.iter().map(|&k| words[k].clone()).collect();
        let gram: DenseMat<LaurentPoly> = picked
            .iter()
            .map(|&a| picked.iter().map(|&b| full[a][b].clone()).collect())
            .collect();
        let gram_q: DenseMat<RatFunc> = gram
            .iter()
            .map(|r| r.iter().map(RatFunc::from_laurent).collect())
            .collect();
        let gram_inv = linalg::inverse(&gram_q).ok_or_else(|| {
            Error::SingularGram(format!("{:?}: selected Gram block is singular", nu.0))
        })?;
        let wb = Arc::new(WeightBasis {
            words: basis,
            gram,
            gram_inv,
        });
        self.bases.lock().unwrap().insert(nu.clone(), wb.clone());
        Ok(wb)
    }

    /// A basis of `f_nu` made of divided-power monomials.
    pub fn uplus_weight_basis(&self, nu: &RootLatticeVec) -> Result<Vec<UPlusElement>> {
        Ok(self
            .weight_basis(nu)?
            .words
            .iter()
            .map(|w| UPlusElement::monomial(self.nodes, w.clone()))
            .collect())
    }

    /// Coordinates of `x` with respect to the plain basis words of its weight.
    pub fn plain_coordinates(&self, x: &UPlusElement) -> Result<Vec<RatFunc>> {
        let wb = self.weight_basis(&x.weight)?;
        let plain = x.to_plain();
        let rhs: Vec<RatFunc> = wb
            .words
            .iter()
            .map(|b| self.pair_plain(&BTreeMap::from([(b.clone(), RatFunc::one())]), &plain))
            .collect();
        Ok(wb
            .gram_inv
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&rhs)
                    .fold(RatFunc::zero(), |a, (g, r)| a.add(&g.mul(r)))
            })
            .collect())
    }

    /// Reduces `x` to the basis words of its weight (equal to `x` in `f`).
    pub fn normalize(&self, x: &UPlusElement) -> Result<UPlusElement> {
        let wb = self.weight_basis(&x.weight)?;
        let coords = self.plain_coordinates(x)?;
        let plain = wb
            .words
            .iter()
            .cloned()
            .zip(coords)
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Ok(UPlusElement::from_plain(x.weight.clone(), &plain))
    }

    /// Whether `x = y` in `f`.
    pub fn equal(&self, x: &UPlusElement, y: &UPlusElement) -> Result<bool> {
        if x.weight != y.weight {
            return Ok(x.is_zero() && y.is_zero());
        }
        let d = x.add(&y.scale(&RatFunc::one().neg()));
        if x.weight.is_zero() {
            return Ok(d.is_zero());
        }
        Ok(self.plain_coordinates(&d)?.iter().all(|c| c.is_zero()))
    }

    pub fn theta_component(&self, nu: &RootLatticeVec) -> Result<ThetaComponent> {
        if nu.is_zero() {
            return Ok(ThetaComponent {
                weight: nu.clone(),
                summands: vec![(Vec::new(), UPlusElement::one(self.nodes))],
            });
        }
        let wb = self.weight_basis(nu)?;
        let h = nu.height();
        let sign = if h % 2 == 0 { 1 } else { -1 };
        let scalar = RatFunc::from_laurent(
            &LaurentPoly::q_minus_qinv()
                .pow(h as u32)
                .scale(&sign.into()),
        );
        let summands = wb
            .words
            .iter()
            .enumerate()
            .map(|(k, bk)| {
                let plain: BTreeMap<Word, RatFunc> = wb
                    .words
                    .iter()
                    .enumerate()
                    .map(|(l, bl)| (bl.clone(), wb.gram_inv[l][k].mul(&scalar)))
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                (bk.clone(), UPlusElement::from_plain(nu.clone(), &plain))
            })
            .collect();
        Ok(ThetaComponent {
            weight: nu.clone(),
            summands,
        })
    }

    /// Solves the overdetermined system `r_i(x) = right[i]`, `ir_i(x) = left[i]`
    /// for `x` in `f_nu`. Each entry is `None` when the family is not imposed.
    pub fn solve_by_derivations(
        &self,
        nu: &RootLatticeVec,
        right: &[Option<UPlusElement>],
        left: &[Option<UPlusElement>],
    ) -> Result<Solution<RatFunc>> {
        let wb = self.weight_basis(nu)?;
        let mut rows: DenseMat<RatFunc> = Vec::new();
        let mut rhs: Vec<RatFunc> = Vec::new();
        for i in 0..self.nodes {
            if nu.0[i] == 0 {
                continue;
            }
            let mut lower = nu.clone();
            lower.0[i] -= 1;
            let test_words = self.weight_basis(&lower)?.words.clone();
            for (side, targets) in [(Side::Right, right), (Side::Left, left)] {
                let Some(target) = &targets[i] else { continue };
                let target_plain = target.to_plain();
                for t in &test_words {
                    // (D_i x, t) = (x, t theta_i) or (x, theta_i t), up to the common scale
                    let mut probe = t.clone();
                    match side {
                        Side::Right => probe.push(i),
                        Side::Left => probe.insert(0, i),
                    }
                    rows.push(
                        wb.words
                            .iter()
                            .map(|b| RatFunc::from_laurent(&self.pair_words(b, &probe)))
                            .collect(),
                    );
                    rhs.push(self.pair_plain(
                        &target_plain,
                        &BTreeMap::from([(t.clone(), RatFunc::one())]),
                    ));
                }
            }
        }
        Ok(linalg::solve(&rows, &rhs))
    }
}

/// A finite-dimensional weight module of `U_q(sl_N)` given by generator
/// matrices in a fixed basis.
#[derive(Clone, Debug, PartialEq)]
pub struct UModule {
    pub rank: usize,
    /// Weight of each basis vector in `eps` coordinates.
    pub weights: Vec<Vec<i32>>,
    pub e: Vec<SparseMat<LaurentPoly>>,
    pub f: Vec<SparseMat<LaurentPoly>>,
}

impl UModule {
    /// The natural module: `E_k v_{k+1} = v_k`, `F_k v_k = v_{k+1}`.
    pub fn natural(rank: usize) -> Self {
        let weights = (0..rank)
            .map(|a| (0..rank).map(|b| i32::from(a == b)).collect())
            .collect();
        let mut e = Vec::new();
        let mut f = Vec::new();
        for k in 0..rank - 1 {
            let mut ek = SparseMat::zeros(rank, rank);
            ek.set(k, k + 1, LaurentPoly::one());
            let mut fk = SparseMat::zeros(rank, rank);
            fk.set(k + 1, k, LaurentPoly::one());
            e.push(ek);
            f.push(fk);
        }
        UModule {
            rank,
            weights,
            e,
            f,
        }
    }

    /// The restricted dual: `E_k w_k = w_{k+1}`, `F_k w_{k+1} = w_k`.
    pub fn dual(rank: usize) -> Self {
        let weights = (0..rank)
            .map(|a| (0..rank).map(|b| -i32::from(a == b)).collect())
            .collect();
        let mut e = Vec::new();
        let mut f = Vec::new();
        for k in 0..rank - 1 {
            let mut ek = SparseMat::zeros(rank, rank);
            ek.set(k + 1, k, LaurentPoly::one());
            let mut fk = SparseMat::zeros(rank, rank);
            fk.set(k, k + 1, LaurentPoly::one());
            e.push(ek);
            f.push(fk);
        }
        UModule {
            rank,
            weights,
            e,
            f,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn nodes(&self) -> usize {
        self.rank - 1
    }

    /// Exponent of `K_i` on basis vector `v`.
    pub fn k_exp(&self, v: usize, i: usize) -> i64 {
        (self.weights[v][i] - self.weights[v][i + 1]) as i64
    }

    /// Diagonal matrix of `K_i^power`.
    pub fn k_mat(&self, i: usize, power: i64) -> SparseMat<LaurentPoly> {
        let mut m = SparseMat::zeros(self.dim(), self.dim());
        for v in 0..self.dim() {
            m.set(v, v, LaurentPoly::q_pow(power * self.k_exp(v, i)));
        }
        m
    }

    pub fn root_weight(&self, v: usize) -> RootLatticeVec {
        let total: i32 = self.weights[v].iter().sum();
        let mut d = self.weights[v].clone();
        // shift to the sum-zero hyperplane is only defined for differences
        d[0] -= total;
        RootLatticeVec::from_eps(&d)
    }

    /// Root-lattice difference `wt(a) - wt(b)`.
    pub fn weight_diff(&self, a: usize, b: usize) -> RootLatticeVec {
        let d: Vec<i32> = self.weights[a]
            .iter()
            .zip(&self.weights[b])
            .map(|(x, y)| x - y)
            .collect();
        RootLatticeVec::from_eps(&d)
    }

    /// Plain product `E_{w_1} ... E_{w_k}` (or the `F`s when `raising` is false).
    pub fn word_action(&self, w: &[usize], raising: bool) -> SparseMat<LaurentPoly> {
        let gens = if raising { &self.e } else { &self.f };
        let mut m = SparseMat::identity(self.dim());
        for &i in w.iter().rev() {
            m = gens[i].mul(&m);
        }
        m
    }

    /// Action of an element of `f` through `E`s (`raising`) or `F`s.
    pub fn uplus_action(&self, x: &UPlusElement, raising: bool) -> SparseMat<RatFunc> {
        let mut acc = SparseMat::zeros(self.dim(), self.dim());
        for (w, c) in x.to_plain() {
            acc = acc.add(
                &self
                    .word_action(&w, raising)
                    .map(RatFunc::from_laurent)
                    .scale(&c),
            );
        }
        acc
    }

    pub fn tensor(a: &UModule, b: &UModule, conv: Convention) -> UModule {
        assert_eq!(a.rank, b.rank);
        let weights = a
            .weights
            .iter()
            .flat_map(|x| {
                b.weights
                    .iter()
                    .map(move |y| x.iter().zip(y).map(|(s, t)| s + t).collect())
            })
            .collect();
        let (ia, ib) = (SparseMat::identity(a.dim()), SparseMat::identity(b.dim()));
        let mut e = Vec::new();
        let mut f = Vec::new();
        for i in 0..a.nodes() {
            match conv {
                Convention::Part2 => {
                    e.push(
                        SparseMat::kron(&a.e[i], &ib)
                            .add(&SparseMat::kron(&a.k_mat(i, 1), &b.e[i])),
                    );
                    f.push(
                        SparseMat::kron(&a.f[i], &b.k_mat(i, -1))
                            .add(&SparseMat::kron(&ia, &b.f[i])),
                    );
                }
                Convention::Part3 => {
                    e.push(
                        SparseMat::kron(&ia, &b.e[i])
                            .add(&SparseMat::kron(&a.e[i], &b.k_mat(i, -1))),
                    );
                    f.push(
                        SparseMat::kron(&a.f[i], &ib)
                            .add(&SparseMat::kron(&a.k_mat(i, 1), &b.f[i])),
                    );
                }
            }
        }
        UModule {
            rank: a.rank,
            weights,
            e,
            f,
        }
    }

    /// `D-bar(E_i)`, `D-bar(F_i)` on `a (x) b`: the comultiplication with
    /// `K` and `K^-1` exchanged.
    pub fn tensor_bar_generators(
        a: &UModule,
        b: &UModule,
        conv: Convention,
    ) -> (Vec<SparseMat<LaurentPoly>>, Vec<SparseMat<LaurentPoly>>) {
        let (ia, ib) = (SparseMat::identity(a.dim()), SparseMat::identity(b.dim()));
        let mut e = Vec::new();
        let mut f = Vec::new();
        for i in 0..a.nodes() {
            match conv {
                Convention::Part2 => {
                    e.push(
                        SparseMat::kron(&a.e[i], &ib)
                            .add(&SparseMat::kron(&a.k_mat(i, -1), &b.e[i])),
                    );
                    f.push(
                        SparseMat::kron(&a.f[i], &b.k_mat(i, 1))
                            .add(&SparseMat::kron(&ia, &b.f[i])),
                    );
                }
                Convention::Part3 => {
                    e.push(
                        SparseMat::kron(&ia, &b.e[i])
                            .add(&SparseMat::kron(&a.e[i], &b.k_mat(i, 1))),
                    );
                    f.push(
                        SparseMat::kron(&a.f[i], &ib)
                            .add(&SparseMat::kron(&a.k_mat(i, -1), &b.f[i])),
                    );
                }
            }
        }
        (e, f)
    }

    /// Weights `nu != 0` for which `Theta_nu` can act nonzero on `a (x) b`.
    pub fn theta_weights(a: &UModule, b: &UModule, conv: Convention) -> Vec<RootLatticeVec> {
        let diffs = |m: &UModule| -> BTreeSet<RootLatticeVec> {
            let mut s = BTreeSet::new();
            for x in 0..m.dim() {
                for y in 0..m.dim() {
                    let d = m.weight_diff(x, y);
                    if d.is_nonneg() && !d.is_zero() {
                        s.insert(d);
                    }
                }
            }
            s
        };
        // both factors need a pair of weights differing by nu
        let (da, db) = (diffs(a), diffs(b));
        let _ = conv;
        da.intersection(&db).cloned().collect()
    }

    /// The operator `Theta` on `a (x) b` assembled from `theta_component`.
    pub fn theta_operator(
        a: &UModule,
        b: &UModule,
        conv: Convention,
        falg: &FAlgebra,
    ) -> Result<SparseMat<RatFunc>> {
        let mut total = SparseMat::identity(a.dim() * b.dim());
        for nu in Self::theta_weights(a, b, conv) {
            let comp = falg.theta_component(&nu)?;
            total = total.add(&theta_component_operator(&comp, a, b, conv));
        }
        Ok(total)
    }

    /// Checks the module axioms `[E_i, F_j] = delta_ij (K_i - K_i^-1)/(q - q^-1)`.
    pub fn check_relations(&self) -> bool {
        let n = self.dim();
        for i in 0..self.nodes() {
            for j in 0..self.nodes() {
                let comm = self.e[i].mul(&self.f[j]).sub(&self.f[j].mul(&self.e[i]));
                let expected = if i == j {
                    let mut m = SparseMat::zeros(n, n);
                    for v in 0..n {
                        let k = self.k_exp(v, i);
                        // (q^k - q^-k)/(q - q^-1) = sign(k) [|k|]
                        let val = qint(k.unsigned_abs() as u32).scale(&k.signum().into());
                        m.set(v, v, val);
                    }
                    m
                } else {
                    SparseMat::zeros(n, n)
                };
                if comm != expected {
                    return false;
                }
            }
        }
        true
    }
}

/// Action of one `Theta_nu` on `a (x) b`. Under `Part3` the component is
/// transported by the antilinear automorphism exchanging `E` and `F`.
pub fn theta_component_operator(
    comp: &ThetaComponent,
    a: &UModule,
    b: &UModule,
    conv: Convention,
) -> SparseMat<RatFunc> {
    let mut acc = SparseMat::zeros(a.dim() * b.dim(), a.dim() * b.dim());
    for (lower, upper) in &comp.summands {
        let (first, second) = match conv {
            Convention::Part2 => (
                a.word_action(lower, false).map(RatFunc::from_laurent),
                b.uplus_action(upper, true),
            ),
            Convention::Part3 => (
                a.word_action(lower, true).map(RatFunc::from_laurent),
                b.uplus_action(&upper.bar(), false),
            ),
        };
        acc = acc.add(&SparseMat::kron(&first, &second));
    }
    acc
}

/// Independent oracle for `Theta`: the unique operator of the form
/// `1 + sum x_{ab} L_a (x) U_b` (all pairs of words of equal weight up to
/// `max_height`) with `D(u) Theta = Theta D-bar(u)` for every generator `u`.
pub fn brute_force_theta(
    a: &UModule,
    b: &UModule,
    conv: Convention,
    max_height: i32,
) -> Result<SparseMat<RatFunc>> {
    let nodes = a.nodes();
    let m = UModule::tensor(a, b, conv);
    let (ebar, fbar) = UModule::tensor_bar_generators(a, b, conv);
    let mut pieces: Vec<SparseMat<LaurentPoly>> = Vec::new();
    let mut weights = vec![RootLatticeVec::zero(nodes)];
    let mut frontier = weights.clone();
    for _ in 0..max_height {
        let mut next = BTreeSet::new();
        for w in &frontier {
            for i in 0..nodes {
                next.insert(w.add(&RootLatticeVec::simple(nodes, i)));
            }
        }
        frontier = next.into_iter().collect();
        weights.extend(frontier.iter().cloned());
    }
    for nu in weights.iter().skip(1) {
        let words = words_of_weight(nu);
        for la in &words {
            for ub in &words {
                let (first, second) = match conv {
                    Convention::Part2 => (a.word_action(la, false), b.word_action(ub, true)),
                    Convention::Part3 => (a.word_action(la, true), b.word_action(ub, false)),
                };
                let p = SparseMat::kron(&first, &second);
                if !p.is_zero() {
                    pieces.push(p);
                }
            }
        }
    }
    let identity = SparseMat::identity(m.dim());
    let gens: Vec<(&SparseMat<LaurentPoly>, &SparseMat<LaurentPoly>)> =
        m.e.iter().zip(&ebar).chain(m.f.iter().zip(&fbar)).collect();
    // equations: sum_k x_k (D(u) P_k - P_k Dbar(u)) = -(D(u) - Dbar(u))
    let mut index: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    let mut cols: Vec<BTreeMap<usize, LaurentPoly>> = vec![BTreeMap::new(); pieces.len()];
    let mut rhs: BTreeMap<usize, LaurentPoly> = BTreeMap::new();
    let row_of = |key: (usize, usize, usize),
                  index: &mut BTreeMap<(usize, usize, usize), usize>| {
        let n = index.len();
        *index.entry(key).or_insert(n)
    };
    for (g, (du, dbar)) in gens.iter().enumerate() {
        let base = du.mul(&identity).sub(&identity.mul(dbar));
        for (i, j, v) in base.entries() {
            let r = row_of((g, i, j), &mut index);
            rhs.insert(r, v.neg());
        }
        for (k, p) in pieces.iter().enumerate() {
            let c = du.mul(p).sub(&p.mul(dbar));
            for (i, j, v) in c.entries() {
                let r = row_of((g, i, j), &mut index);
                cols[k].insert(r, v.clone());
            }
        }
    }
    let nrows = index.len();
    let dense: DenseMat<RatFunc> = (0..nrows)
        .map(|r| {
            cols.iter()
                .map(|c| c.get(&r).map_or_else(RatFunc::zero, RatFunc::from_laurent))
                .collect()
        })
        .collect();
    let b_vec: Vec<RatFunc> = (0..nrows)
        .map(|r| {
            rhs.get(&r)
                .map_or_else(RatFunc::zero, RatFunc::from_laurent)
        })
        .collect();
    let x = match linalg::solve(&dense, &b_vec) {
        Solution::Unique(x) | Solution::Underdetermined(x, _) => x,
        Solution::Inconsistent => {
            return Err(Error::Solver("quasi-R relation has no solution".into()))
        }
    };
    let mut total = identity.map(RatFunc::from_laurent);
    for (xk, p) in x.iter().zip(&pieces) {
        total = total.add(&p.map(RatFunc::from_laurent).scale(xk));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rl(v: &[i32]) -> RootLatticeVec {
        RootLatticeVec(v.to_vec())
    }

    #[test]
    fn kostant_counts() {
        assert_eq!(kostant_partition_count(&rl(&[1, 1])), 2);
        assert_eq!(kostant_partition_count(&rl(&[2, 1])), 2);
        assert_eq!(kostant_partition_count(&rl(&[1, 1, 1])), 4);
        assert_eq!(kostant_partition_count(&rl(&[3])), 1);
    }

    #[test]
    fn form_base_case() {
        let f = FAlgebra::new(2, 8);
        let e1 = UPlusElement::monomial(2, vec![0]);
        let e2 = UPlusElement::monomial(2, vec![1]);
        let expected = RatFunc::one().div(&RatFunc::from_laurent(&LaurentPoly::from_terms([
            (1i64, 0i64),
            (-1, -2),
        ])));
        assert_eq!(f.lusztig_form(&e1, &e1).unwrap(), expected);
        assert!(f.lusztig_form(&e1, &e2).is_err());
    }

    #[test]
    fn weight_basis_dimensions() {
        let f = FAlgebra::new(2, 8);
        assert_eq!(f.uplus_weight_basis(&rl(&[1, 0])).unwrap().len(), 1);
        assert_eq!(f.uplus_weight_basis(&rl(&[1, 1])).unwrap().len(), 2);
        assert_eq!(f.uplus_weight_basis(&rl(&[2, 1])).unwrap().len(), 2);
        for a in 0..=3 {
            for b in 0..=3 {
                if a + b == 0 {
                    continue;
                }
                let nu = rl(&[a, b]);
                assert_eq!(
                    f.weight_basis(&nu).unwrap().words.len() as u64,
                    kostant_partition_count(&nu)
                );
            }
        }
        let g = FAlgebra::new(3, 5);
        for nu in [
            rl(&[1, 1, 1]),
            rl(&[1, 2, 1]),
            rl(&[2, 1, 2]),
            rl(&[1, 1, 3]),
        ] {
            assert_eq!(
                g.weight_basis(&nu).unwrap().words.len() as u64,
                kostant_partition_count(&nu)
            );
        }
        assert!(matches!(
            g.weight_basis(&rl(&[2, 2, 2])),
            Err(Error::HeightCapExceeded { .. })
        ));
    }

    #[test]
    fn serre_relation_vanishes() {
        let f = FAlgebra::new(2, 8);
        // E1^2 E2 - [2] E1 E2 E1 + E2 E1^2 = 0 in f
        let two = RatFunc::from_laurent(&qint(2));
        let x = UPlusElement::plain_word(2, &[0, 0, 1])
            .add(&UPlusElement::plain_word(2, &[0, 1, 0]).scale(&two.neg()))
            .add(&UPlusElement::plain_word(2, &[1, 0, 0]));
        assert!(f.equal(&x, &UPlusElement::zero(rl(&[2, 1]))).unwrap());
    }

    #[test]
    fn derivation_examples() {
        let e1 = UPlusElement::monomial(2, vec![0]);
        let e2 = UPlusElement::monomial(2, vec![1]);
        assert_eq!(derivation_r(Side::Right, 0, &e1), UPlusElement::one(2));
        assert!(derivation_r(Side::Right, 1, &e1).is_zero());
        // r_1(E1 E2) = r_1(E1) E2 q^{(alpha_1, alpha_2)} + E1 r_1(E2)
        let lhs = derivation_r(Side::Right, 0, &e1.mul(&e2));
        let rhs = derivation_r(Side::Right, 0, &e1)
            .mul(&e2)
            .scale(&RatFunc::from_laurent(&LaurentPoly::q_pow(cartan(0, 1))));
        assert_eq!(lhs, rhs);
        // r_i(E_i^(2)) = q E_i
        let div2 = UPlusElement::monomial(1, vec![0, 0]);
        assert_eq!(
            derivation_r(Side::Right, 0, &div2),
            UPlusElement::monomial(1, vec![0]).scale(&RatFunc::from_laurent(&LaurentPoly::q()))
        );
    }

    #[test]
    fn sl2_theta_on_natural_square() {
        let f = FAlgebra::new(1, 4);
        let v = UModule::natural(2);
        let theta = UModule::theta_operator(&v, &v, Convention::Part2, &f).unwrap();
        // Theta = 1 - (q - q^-1) F (x) E
        let mut expected = SparseMat::identity(4).map(RatFunc::from_laurent);
        expected.set(
            2,
            1,
            RatFunc::from_laurent(&LaurentPoly::q_minus_qinv().neg()),
        );
        assert_eq!(theta, expected);
        let brute = brute_force_theta(&v, &v, Convention::Part2, 2).unwrap();
        assert_eq!(brute, expected);
    }

    #[test]
    fn theta_matches_brute_force_rank3() {
        let f = FAlgebra::new(2, 4);
        let v = UModule::natural(3);
        let w = UModule::dual(3);
        for conv in [Convention::Part2, Convention::Part3] {
            for (a, b) in [(&v, &v), (&v, &w), (&w, &v)] {
                let theta = UModule::theta_operator(a, b, conv, &f).unwrap();
                let brute = brute_force_theta(a, b, conv, 2).unwrap();
                assert_eq!(theta, brute, "{conv:?}");
                assert!(theta.try_map(|c| c.to_laurent()).is_some());
            }
        }
    }

    #[test]
    fn module_relations() {
        let v = UModule::natural(4);
        let w = UModule::dual(4);
        assert!(v.check_relations() && w.check_relations());
        for conv in [Convention::Part2, Convention::Part3] {
            assert!(UModule::tensor(&v, &w, conv).check_relations());
            assert!(UModule::tensor(&UModule::tensor(&v, &v, conv), &w, conv).check_relations());
        }
    }
}
