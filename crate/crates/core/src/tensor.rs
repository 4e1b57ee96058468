//! Tensor modules built from the natural module `V` and its dual `W`: shapes,
//! Hecke right actions, exterior-power quotients and weight labels.
//!
//! The basis vector `v_a` (or `w_a`), `a = 0..N`, carries the label
//! `(N - 1)/2 - a`, stored doubled as `N - 1 - 2a`. A tensor basis vector is
//! labelled by the sequence of its factor labels.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coxeter::Generator;
use crate::error::{Error, Result};
use crate::hecke::{HeckeAlgebra, HeckeElement};
use crate::laurent::LaurentPoly;
use crate::linalg;
use crate::qsp::{IModule, QSPConfig};
use crate::sparse::{SparseMat, SparseVec};
use crate::uq::{Convention, RootLatticeVec, UModule};

/// A vector of a tensor module in its standard basis.
pub type TensorVector = SparseVec<LaurentPoly>;

/// Factor type: `V` for a `0` in the b-sequence, `W` for a `1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Factor {
    V,
    W,
}

impl Factor {
    pub fn from_bit(b: u8) -> Result<Self> {
        match b {
            0 => Ok(Factor::V),
            1 => Ok(Factor::W),
            _ => Err(Error::InvalidShape(format!(
                "b-sequence entry {b} is not 0 or 1"
            ))),
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Factor::V => 0,
            Factor::W => 1,
        }
    }

    pub fn module(self, rank: usize) -> UModule {
        match self {
            Factor::V => UModule::natural(rank),
            Factor::W => UModule::dual(rank),
        }
    }
}

/// `wedge^{a0} V_- (x) wedge^{a_1} V^{c_1} (x) ... (x) wedge^{a_k} V^{c_k}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TensorShape {
    pub a0: usize,
    /// `(c_i, a_i)` with `c_i` a b-sequence bit.
    pub blocks: Vec<(u8, usize)>,
    pub b_seq: Vec<u8>,
    /// Indices `i` of the simple roots `alpha_i` in the Levi subset.
    pub levi: Vec<usize>,
}

/// Parity of `alpha_i` for a b-sequence: `alpha_0 = -eps_1` and
/// `alpha_i = eps_i - eps_{i+1}` is even iff `b_i = b_{i+1}`.
pub fn is_even_root(b_seq: &[u8], i: usize) -> bool {
    i == 0 || b_seq[i - 1] == b_seq[i]
}

/// The shape of the Levi quotient of `V^{b_1} (x) ... (x) V^{b_{m+n}}`.
pub fn levi_to_shape(b_seq: &[u8], levi: &[usize]) -> Result<TensorShape> {
    if b_seq.is_empty() {
        return Err(Error::InvalidShape("empty b-sequence".into()));
    }
    for &b in b_seq {
        Factor::from_bit(b)?;
    }
    if b_seq[0] != 0 {
        return Err(Error::InvalidShape("b-sequence must start with 0".into()));
    }
    let s = b_seq.len();
    let mut levi_sorted = levi.to_vec();
    levi_sorted.sort_unstable();
    levi_sorted.dedup();
    for &i in &levi_sorted {
        if i >= s {
            return Err(Error::InvalidShape(format!(
                "alpha_{i} is not a simple root for m+n = {s}"
            )));
        }
        if !is_even_root(b_seq, i) {
            return Err(Error::InvalidShape(format!(
                "alpha_{i} is odd for b = {b_seq:?}"
            )));
        }
    }
    // j runs over {0, ..., s} minus the Levi indices
    let js: Vec<usize> = (0..=s).filter(|j| !levi_sorted.contains(j)).collect();
    let a0 = js[0];
    let blocks = js.windows(2).map(|w| (b_seq[w[0]], w[1] - w[0])).collect();
    Ok(TensorShape {
        a0,
        blocks,
        b_seq: b_seq.to_vec(),
        levi: levi_sorted,
    })
}

impl TensorShape {
    /// Shape from its block data; the b-sequence and Levi subset are recovered.
    pub fn from_blocks(a0: usize, blocks: &[(u8, usize)]) -> Result<Self> {
        let mut b_seq = vec![0u8; a0];
        let mut levi: Vec<usize> = (0..a0).collect();
        for &(c, a) in blocks {
            Factor::from_bit(c)?;
            if a == 0 {
                return Err(Error::InvalidShape("block of length zero".into()));
            }
            let start = b_seq.len();
            levi.extend(start + 1..start + a);
            b_seq.extend(std::iter::repeat_n(c, a));
        }
        let shape = levi_to_shape(&b_seq, &levi)?;
        if shape.a0 != a0 || shape.blocks != blocks {
            return Err(Error::InvalidShape(format!(
                "blocks {blocks:?} do not come from a b-sequence"
            )));
        }
        Ok(shape)
    }

    /// Total tensor length `m + n`.
    pub fn len(&self) -> usize {
        self.b_seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b_seq.is_empty()
    }

    pub fn factors(&self) -> Vec<Factor> {
        self.b_seq
            .iter()
            .map(|&b| Factor::from_bit(b).unwrap())
            .collect()
    }

    /// Position ranges of the blocks, the type-B block first when `a0 > 0`.
    pub fn segments(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        if self.a0 > 0 {
            out.push(0..self.a0);
        }
        let mut start = self.a0;
        for &(_, a) in &self.blocks {
            out.push(start..start + a);
            start += a;
        }
        out
    }

    /// Hecke generators of the Levi subgroup in type-B numbering: `0` is
    /// `s_0` on the first factor, `k >= 1` exchanges factors `k-1` and `k`.
    pub fn levi_generators(&self) -> Vec<Generator> {
        self.levi.clone()
    }

    pub fn counts(&self) -> (usize, usize) {
        let n = self.b_seq.iter().filter(|&&b| b == 1).count();
        (self.len() - n, n)
    }
}

/// Doubled label of basis index `a` at rank `N`.
pub fn label_of(rank: usize, a: usize) -> i32 {
    rank as i32 - 1 - 2 * a as i32
}

/// Basis index of a doubled label, if it belongs to the rank-`N` alphabet.
pub fn index_of_label(rank: usize, label: i32) -> Option<usize> {
    let t = rank as i32 - 1 - label;
    (t >= 0 && t % 2 == 0 && t / 2 < rank as i32).then_some((t / 2) as usize)
}

fn decode(mut idx: usize, rank: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = idx % rank;
        idx /= rank;
    }
    out
}

fn encode(digits: &[usize], rank: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * rank + d)
}

/// The full tensor product `V^{b_1} (x) ... (x) V^{b_s}` with its standard basis.
#[derive(Clone, Debug)]
pub struct FullTensor {
    pub rank: usize,
    pub factors: Vec<Factor>,
    pub module: UModule,
}

impl FullTensor {
    pub fn new(rank: usize, factors: &[Factor], cfg: &QSPConfig) -> Self {
        let mut module = factors[0].module(rank);
        for f in &factors[1..] {
            module = UModule::tensor(&module, &f.module(rank), cfg.convention);
        }
        FullTensor {
            rank,
            factors: factors.to_vec(),
            module,
        }
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    pub fn digits(&self, idx: usize) -> Vec<usize> {
        decode(idx, self.rank, self.factors.len())
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        encode(digits, self.rank)
    }

    pub fn label(&self, idx: usize) -> Vec<i32> {
        self.digits(idx)
            .into_iter()
            .map(|a| label_of(self.rank, a))
            .collect()
    }

    pub fn index_of(&self, label: &[i32]) -> Option<usize> {
        if label.len() != self.factors.len() {
            return None;
        }
        let digits: Option<Vec<usize>> = label
            .iter()
            .map(|&l| index_of_label(self.rank, l))
            .collect();
        digits.map(|d| self.index(&d))
    }

    /// Whether `M_f H_g = M_{f g}` (as opposed to the correction case).
    /// `None` when `f g = f`.
    pub fn is_up(&self, idx: usize, g: Generator) -> Option<bool> {
        let lab = self.label(idx);
        if g == 0 {
            return if lab[0] == 0 { None } else { Some(lab[0] < 0) };
        }
        let (x, y) = (lab[g - 1], lab[g]);
        if x == y {
            return None;
        }
        Some(match self.factors[g] {
            Factor::V => x > y,
            Factor::W => x < y,
        })
    }

    /// `f g` for a generator `g`, as a basis index.
    pub fn act_label(&self, idx: usize, g: Generator) -> usize {
        let mut d = self.digits(idx);
        if g == 0 {
            d[0] = self.rank - 1 - d[0];
        } else {
            d.swap(g - 1, g);
        }
        self.index(&d)
    }

    pub fn check_generator(&self, g: Generator) -> Result<()> {
        let ok = if g == 0 {
            self.factors[0] == Factor::V
        } else {
            g < self.factors.len() && self.factors[g - 1] == self.factors[g]
        };
        if ok {
            Ok(())
        } else {
            Err(Error::GroupMismatch(format!(
                "s_{g} does not act on factors {:?}",
                self.factors
            )))
        }
    }

    /// Matrix of the right action of `H_g`; column `f` is `M_f H_g`.
    pub fn hecke_generator(&self, g: Generator) -> Result<SparseMat<LaurentPoly>> {
        self.check_generator(g)?;
        let n = self.dim();
        let mut m = SparseMat::zeros(n, n);
        let corr = LaurentPoly::q_minus_qinv().neg();
        for f in 0..n {
            match self.is_up(f, g) {
                None => m.set(f, f, LaurentPoly::qinv()),
                Some(up) => {
                    m.set(self.act_label(f, g), f, LaurentPoly::one());
                    if !up {
                        m.set(f, f, corr.clone());
                    }
                }
            }
        }
        Ok(m)
    }

    /// `v . h` for `h` in the Hecke algebra of a group acting on the first
    /// `s` factors (type B numbering for type B, `1..s` for type A).
    pub fn hecke_right_action(
        &self,
        alg: &HeckeAlgebra,
        h: &HeckeElement,
        v: &TensorVector,
    ) -> Result<TensorVector> {
        let g = alg.group();
        if g.size() > self.factors.len() {
            return Err(Error::GroupMismatch(format!(
                "{g} acts on more than {} factors",
                self.factors.len()
            )));
        }
        let mut mats = BTreeMap::new();
        for &s in g.generators() {
            mats.insert(s, self.hecke_generator(s)?);
        }
        let mut out = TensorVector::new();
        for (&w, c) in &h.terms {
            let mut x = v.clone();
            for s in g.reduced_word(w) {
                x = mats[&s].apply(&x);
            }
            crate::sparse::axpy(&mut out, c, &x);
        }
        Ok(out)
    }

    /// The weight of a basis vector in `eps` coordinates.
    pub fn weight_of(&self, idx: usize) -> Vec<i32> {
        self.module.weights[idx].clone()
    }
}

/// `w1 < w2` in the literal order: `w1 - w2` is a nonzero element of `N I`.
pub fn order_lt(w1: &[i32], w2: &[i32]) -> bool {
    let d: Vec<i32> = w1.iter().zip(w2).map(|(a, b)| a - b).collect();
    let r = RootLatticeVec::from_eps(&d);
    r.is_nonneg() && !r.is_zero()
}

/// A quotient of a full tensor by the span of `T . (H_s + q)` for `s` in a
/// set of generators.
#[derive(Clone, Debug)]
pub struct Quotient {
    /// Full-tensor index of each quotient basis vector (its chamber lift).
    pub lifts: Vec<usize>,
    pub proj: SparseMat<LaurentPoly>,
    pub section: SparseMat<LaurentPoly>,
}

impl Quotient {
    pub fn dim(&self) -> usize {
        self.lifts.len()
    }
}

/// Which Weyl chamber supplies the lifts of a quotient basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chamber {
    /// Labels with `M_f H_s = M_{fs}` for every `s`.
    Up,
    /// Labels with `M_{fs} H_s = M_f` for every `s`.
    Down,
}

impl Chamber {
    /// The chamber on which the bar involution of the convention is unitriangular.
    pub fn for_convention(conv: Convention) -> Self {
        match conv {
            Convention::Part2 => Chamber::Down,
            Convention::Part3 => Chamber::Up,
        }
    }
}

/// Straightens every standard vector into a chamber of `gens`: if `g` is up
/// at `s` then `M_{gs} = -q M_g`, and `M_f = 0` when `f s = f`.
pub fn exterior_quotient(full: &FullTensor, gens: &[Generator], side: Chamber) -> Result<Quotient> {
    for &g in gens {
        full.check_generator(g)?;
    }
    let n = full.dim();
    let inside = Some(side == Chamber::Up);
    let step = match side {
        Chamber::Up => LaurentPoly::q().neg(),
        Chamber::Down => LaurentPoly::qinv().neg(),
    };
    let chamber: Vec<bool> = (0..n)
        .map(|f| gens.iter().all(|&g| full.is_up(f, g) == inside))
        .collect();
    let mut lifts: Vec<usize> = (0..n).filter(|&f| chamber[f]).collect();
    lifts.sort_by_key(|&f| full.label(f));
    let pos: BTreeMap<usize, usize> = lifts.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let mut image: Vec<Option<(usize, LaurentPoly)>> = vec![None; n];
    for f in 0..n {
        let mut cur = f;
        let mut coeff = LaurentPoly::one();
        let mut result = None;
        loop {
            if chamber[cur] {
                result = Some((pos[&cur], coeff));
                break;
            }
            let s = gens
                .iter()
                .copied()
                .find(|&g| full.is_up(cur, g) != inside)
                .unwrap();
            match full.is_up(cur, s) {
                None => break,
                _ => {
                    coeff = coeff.mul(&step);
                    cur = full.act_label(cur, s);
                }
            }
        }
        image[f] = result;
    }
    let mut proj = SparseMat::zeros(lifts.len(), n);
    for (f, im) in image.into_iter().enumerate() {
        if let Some((j, c)) = im {
            proj.set(j, f, c);
        }
    }
    let mut section = SparseMat::zeros(n, lifts.len());
    for (j, &f) in lifts.iter().enumerate() {
        section.set(f, j, LaurentPoly::one());
    }
    let q = Quotient {
        lifts,
        proj,
        section,
    };
    check_quotient(full, gens, &q)?;
    Ok(q)
}

/// `pi (H_s + q) = 0` for every generator, and the ideal has rank
/// `dim T - dim Q`.
fn check_quotient(full: &FullTensor, gens: &[Generator], q: &Quotient) -> Result<()> {
    let n = full.dim();
    let qid = SparseMat::identity(n).scale(&LaurentPoly::q());
    let mut ideal_cols: Vec<Vec<LaurentPoly>> = Vec::new();
    for &g in gens {
        let ks = full.hecke_generator(g)?.add(&qid);
        if !q.proj.mul(&ks).is_zero() {
            return Err(Error::Solver(format!(
                "projection does not kill T(H_{g} + q)"
            )));
        }
        for col in ks.columns() {
            if !col.is_empty() {
                let mut dense = vec![LaurentPoly::zero(); n];
                for (&i, v) in col {
                    dense[i] = v.clone();
                }
                ideal_cols.push(dense);
            }
        }
    }
    let rank = if ideal_cols.is_empty() {
        0
    } else {
        linalg::rank_profile_mod(&ideal_cols).len()
    };
    if rank != n - q.dim() {
        return Err(Error::Solver(format!(
            "ideal rank {rank} differs from {} - {}",
            n,
            q.dim()
        )));
    }
    Ok(())
}

/// A tensor module `T^{b,l}` with its standard basis `M^{b,l}_f`.
#[derive(Clone, Debug)]
pub struct TensorModule {
    pub shape: TensorShape,
    pub cfg: QSPConfig,
    pub full: FullTensor,
    pub quotient: Quotient,
    /// Doubled labels of the quotient basis, in lexicographic order.
    pub labels: Vec<Vec<i32>>,
    pub imodule: IModule,
    /// The quotient as a `U`-module; present when `a0 = 0`.
    pub umodule: Option<UModule>,
}

/// Builds `T^{b,l}` at the rank of `cfg`.
pub fn build_module(shape: &TensorShape, cfg: &QSPConfig) -> Result<TensorModule> {
    cfg.validate()?;
    let too_long = shape
        .blocks
        .iter()
        .map(|&(_, a)| a)
        .chain(std::iter::once(shape.a0))
        .find(|&a| a > cfg.rank);
    if let Some(a) = too_long {
        return Err(Error::InvalidShape(format!(
            "exterior power of degree {a} vanishes at N = {}",
            cfg.rank
        )));
    }
    let full = FullTensor::new(cfg.rank, &shape.factors(), cfg);
    let quotient = exterior_quotient(
        &full,
        &shape.levi_generators(),
        Chamber::for_convention(cfg.convention),
    )?;
    if quotient.dim() == 0 {
        return Err(Error::InvalidShape(format!(
            "shape {shape:?} is zero at N = {}",
            cfg.rank
        )));
    }
    let labels = quotient.lifts.iter().map(|&f| full.label(f)).collect();
    let params = cfg.params();
    let imodule =
        IModule::restrict(&full.module, cfg, &params).quotient(&quotient.proj, &quotient.section);
    let umodule = (shape.a0 == 0).then(|| quotient_umodule(&full.module, &quotient));
    Ok(TensorModule {
        shape: shape.clone(),
        cfg: cfg.clone(),
        full,
        quotient,
        labels,
        imodule,
        umodule,
    })
}

/// `pi X s` on a quotient by a `U`-stable subspace.
pub fn quotient_umodule(m: &UModule, q: &Quotient) -> UModule {
    let map = |x: &SparseMat<LaurentPoly>| q.proj.mul(&x.mul(&q.section));
    UModule {
        rank: m.rank,
        weights: q.lifts.iter().map(|&f| m.weights[f].clone()).collect(),
        e: m.e.iter().map(map).collect(),
        f: m.f.iter().map(map).collect(),
    }
}

impl TensorModule {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label_index(&self, label: &[i32]) -> Option<usize> {
        self.labels
            .binary_search_by(|l| l.as_slice().cmp(label))
            .ok()
    }

    pub fn weight_of(&self, i: usize) -> Vec<i32> {
        self.full.weight_of(self.quotient.lifts[i])
    }

    /// The weight of the factors from position `start` on.
    pub fn tail_weight(&self, i: usize, start: usize) -> Vec<i32> {
        let digits = self.full.digits(self.quotient.lifts[i]);
        let mut w = vec![0; self.cfg.rank];
        for (k, &a) in digits.iter().enumerate().skip(start) {
            w[a] += match self.full.factors[k] {
                Factor::V => 1,
                Factor::W => -1,
            };
        }
        w
    }
}

/// Parity of a root of `osp(2m+1|2n)` written as `sum c_i eps_i^{b_i}`.
fn root_is_odd(b_seq: &[u8], coeffs: &[i32]) -> bool {
    let odd: i32 = coeffs
        .iter()
        .zip(b_seq)
        .filter(|(_, &b)| b == 1)
        .map(|(c, _)| c)
        .sum();
    odd % 2 != 0
}

/// `(x | y)` with `(eps|eps) = 1` and `(delta|delta) = -1`.
fn form(b_seq: &[u8], x: &[i32], y: &[i32]) -> i32 {
    x.iter()
        .zip(y)
        .zip(b_seq)
        .map(|((a, c), &b)| if b == 0 { a * c } else { -a * c })
        .sum()
}

/// Positive roots of `osp(2m+1|2n)` for the fundamental system of `b_seq`.
fn positive_roots(b_seq: &[u8]) -> Vec<Vec<i32>> {
    let s = b_seq.len();
    let unit = |i: usize, c: i32| {
        let mut v = vec![0; s];
        v[i] = c;
        v
    };
    let mut out = Vec::new();
    for i in 0..s {
        out.push(unit(i, -1));
        if b_seq[i] == 1 {
            out.push(unit(i, -2));
        }
        for j in i + 1..s {
            let mut a = unit(i, 1);
            a[j] = -1;
            out.push(a);
            let mut b = unit(i, -1);
            b[j] = -1;
            out.push(b);
        }
    }
    out
}

/// Twice the Weyl vector `rho_b`.
pub fn rho_doubled(b_seq: &[u8]) -> Vec<i32> {
    let mut rho = vec![0; b_seq.len()];
    for r in positive_roots(b_seq) {
        let sign = if root_is_odd(b_seq, &r) { -1 } else { 1 };
        for (x, c) in rho.iter_mut().zip(&r) {
            *x += sign * c;
        }
    }
    rho
}

/// Simple root `alpha_i` in coordinates.
fn simple_root(s: usize, i: usize) -> Vec<i32> {
    let mut v = vec![0; s];
    if i == 0 {
        v[0] = -1;
    } else {
        v[i - 1] = 1;
        v[i] = -1;
    }
    v
}

/// `f_lambda(i) = (lambda + rho | eps_i^{b_i})`, returned doubled.
pub fn lambda_to_f(lambda: &[i32], b_seq: &[u8]) -> Vec<i32> {
    let rho = rho_doubled(b_seq);
    lambda
        .iter()
        .zip(&rho)
        .zip(b_seq)
        .map(|((l, r), &b)| {
            let x = 2 * l + r;
            if b == 0 {
                x
            } else {
                -x
            }
        })
        .collect()
}

/// Inverse of [`lambda_to_f`]; `None` if `f` is not a shifted integral weight.
pub fn f_to_lambda(f: &[i32], b_seq: &[u8]) -> Option<Vec<i32>> {
    let rho = rho_doubled(b_seq);
    f.iter()
        .zip(&rho)
        .zip(b_seq)
        .map(|((&x, r), &b)| {
            let y = if b == 0 { x } else { -x } - r;
            (y % 2 == 0).then_some(y / 2)
        })
        .collect()
}

/// `lambda` lies in the dominance set: `(lambda | alpha^vee) >= 0` for every
/// Levi root.
pub fn is_levi_dominant(lambda: &[i32], b_seq: &[u8], levi: &[usize]) -> bool {
    levi.iter().all(|&i| {
        let a = simple_root(b_seq.len(), i);
        form(b_seq, lambda, &a) * form(b_seq, &a, &a).signum() >= 0
    })
}

/// The chamber conditions on labels: `f_1 < 0` for `alpha_0`, decreasing
/// inside `V` blocks and increasing inside `W` blocks.
pub fn in_dominant_index_set(f: &[i32], b_seq: &[u8], levi: &[usize]) -> bool {
    levi.iter().all(|&i| {
        if i == 0 {
            f[0] < 0
        } else if b_seq[i] == 0 {
            f[i - 1] > f[i]
        } else {
            f[i - 1] < f[i]
        }
    })
}
