//! Hecke algebras with the normalization `(H_s - q^-1)(H_s + q) = 0` and their
//! Kazhdan-Lusztig bases `H_w + sum_{y<w} qZ[q] H_y`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::coxeter::{CoxeterGroup, Generator};
use crate::error::{Error, Result};
use crate::laurent::{Lattice, LaurentPoly};
use crate::sparse::SparseMat;
use crate::transition::TransitionMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct HeckeElement {
    /// Coefficient of `H_w`, keyed by the group index of `w`.
    pub terms: BTreeMap<usize, LaurentPoly>,
}

fn add_term(terms: &mut BTreeMap<usize, LaurentPoly>, w: usize, c: &LaurentPoly) {
    if c.is_zero() {
        return;
    }
    let slot = terms.entry(w).or_insert_with(LaurentPoly::zero);
    *slot = slot.add(c);
    if slot.is_zero() {
        terms.remove(&w);
    }
}

impl HeckeElement {
    pub fn zero() -> Self {
        HeckeElement {
            terms: BTreeMap::new(),
        }
    }

    /// The standard basis element `H_w`.
    pub fn standard(w: usize) -> Self {
        HeckeElement {
            terms: BTreeMap::from([(w, LaurentPoly::one())]),
        }
    }

    pub fn coeff(&self, w: usize) -> LaurentPoly {
        self.terms
            .get(&w)
            .cloned()
            .unwrap_or_else(LaurentPoly::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (&w, c) in &other.terms {
            add_term(&mut terms, w, c);
        }
        HeckeElement { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&LaurentPoly::constant(-1)))
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        HeckeElement {
            terms: self.terms.iter().map(|(&w, x)| (w, x.mul(c))).collect(),
        }
    }
}

/// The Hecke algebra of a finite Weyl group, with a lazily filled
/// Kazhdan-Lusztig table.
#[derive(Debug)]
pub struct HeckeAlgebra {
    group: Arc<CoxeterGroup>,
    kl: OnceLock<Vec<HeckeElement>>,
    bars: OnceLock<Vec<HeckeElement>>,
}

impl HeckeAlgebra {
    pub fn new(group: Arc<CoxeterGroup>) -> Self {
        HeckeAlgebra {
            group,
            kl: OnceLock::new(),
            bars: OnceLock::new(),
        }
    }

    pub fn group(&self) -> &CoxeterGroup {
        &self.group
    }

    fn check(&self, h: &HeckeElement) -> Result<()> {
        match h.terms.keys().next_back() {
            Some(&w) if w >= self.group.len() => Err(Error::GroupMismatch(format!(
                "element index {w} outside {}",
                self.group
            ))),
            _ => Ok(()),
        }
    }

    /// `h * H_s`
    pub fn mul_gen(&self, h: &HeckeElement, s: Generator) -> HeckeElement {
        let g = &self.group;
        let mut terms = BTreeMap::new();
        let correction = LaurentPoly::q_minus_qinv().neg();
        for (&w, c) in &h.terms {
            let ws = g.mul_gen(w, s);
            add_term(&mut terms, ws, c);
            if !g.is_ascent(w, s) {
                add_term(&mut terms, w, &c.mul(&correction));
            }
        }
        HeckeElement { terms }
    }

    pub fn mul(&self, a: &HeckeElement, b: &HeckeElement) -> Result<HeckeElement> {
        self.check(a)?;
        self.check(b)?;
        let mut out = HeckeElement::zero();
        for (&w, c) in &b.terms {
            let mut prod = a.clone();
            for s in self.group.reduced_word(w) {
                prod = self.mul_gen(&prod, s);
            }
            out = out.add(&prod.scale(c));
        }
        Ok(out)
    }

    fn bar_table(&self) -> &[HeckeElement] {
        self.bars.get_or_init(|| {
            let g = &self.group;
            let mut table: Vec<HeckeElement> = Vec::with_capacity(g.len());
            table.push(HeckeElement::standard(0));
            let shift = LaurentPoly::q_minus_qinv();
            for w in 1..g.len() {
                // elements are sorted by length, so ws is already present
                let s = *g.reduced_word(w).last().unwrap();
                let prev = &table[g.mul_gen(w, s)];
                let bar = self.mul_gen(prev, s).add(&prev.scale(&shift));
                table.push(bar);
            }
            table
        })
    }

    /// The bar involution: `q -> q^-1`, `H_w -> (H_{w^-1})^-1`.
    pub fn bar(&self, h: &HeckeElement) -> HeckeElement {
        let table = self.bar_table();
        let mut out = HeckeElement::zero();
        for (&w, c) in &h.terms {
            out = out.add(&table[w].scale(&c.bar()));
        }
        out
    }

    fn kl_table(&self) -> &[HeckeElement] {
        self.kl.get_or_init(|| {
            let g = &self.group;
            let mut table: Vec<HeckeElement> = Vec::with_capacity(g.len());
            table.push(HeckeElement::standard(0));
            for w in 1..g.len() {
                let s = *g.reduced_word(w).last().unwrap();
                let v = g.mul_gen(w, s);
                let cv = &table[v];
                let mut c = self.mul_gen(cv, s).add(&cv.scale(&LaurentPoly::q()));
                for (&y, h) in &cv.terms {
                    if y == v || g.is_ascent(y, s) {
                        continue;
                    }
                    let mu = h.coeff(1);
                    if mu != 0.into() {
                        c = c.sub(&table[y].scale(&LaurentPoly::constant(mu)));
                    }
                }
                table.push(c);
            }
            table
        })
    }

    /// The Kazhdan-Lusztig basis element indexed by `w`.
    pub fn kl_element(&self, w: usize) -> HeckeElement {
        self.kl_table()[w].clone()
    }

    /// The KL polynomial `h_{y,w}` (coefficient of `H_y` in the KL element of `w`).
    pub fn kl_poly(&self, y: usize, w: usize) -> LaurentPoly {
        self.kl_table()[w].coeff(y)
    }

    /// Images of the KL basis elements `w in W^J` in `H / sum_{s in J} H * C_s`,
    /// written in the images of `H_x`, `x in W^J`.
    pub fn parabolic_kl_matrix(&self, subset: &[Generator]) -> Result<TransitionMatrix> {
        let g = &self.group;
        g.check_generators(subset)?;
        let reps = g.minimal_coset_reps(subset);
        let parabolic = g.parabolic_subgroup(subset);
        let mut matrix = SparseMat::zeros(reps.len(), reps.len());
        for (j, &w) in reps.iter().enumerate() {
            let kl = &self.kl_table()[w];
            for (i, &x) in reps.iter().enumerate() {
                let mut m = LaurentPoly::zero();
                for &v in &parabolic {
                    let h = kl.coeff(g.mul(x, v));
                    if !h.is_zero() {
                        let sign = if g.length(v).is_multiple_of(2) { 1 } else { -1 };
                        m = m.add(&h.mul(&LaurentPoly::monomial(sign, g.length(v) as i64)));
                    }
                }
                matrix.set(i, j, m);
            }
        }
        Ok(TransitionMatrix {
            labels: reps.iter().map(|&x| g.element(x).clone()).collect(),
            label_scale: 1,
            matrix,
            order: (0..reps.len()).collect(),
            lattice: Lattice::QZq,
        })
    }

    pub fn display(&self, h: &HeckeElement) -> String {
        HeckeDisplay { alg: self, h }.to_string()
    }
}

struct HeckeDisplay<'a> {
    alg: &'a HeckeAlgebra,
    h: &'a HeckeElement,
}

impl fmt::Display for HeckeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.h.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .h
            .terms
            .iter()
            .map(|(&w, c)| format!("({c})H{:?}", self.alg.group.element(w)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
