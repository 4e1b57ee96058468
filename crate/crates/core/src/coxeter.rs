//! Weyl groups of types `A_{s-1}` and `B_s` as (signed) permutations.
//!
//! An element is stored in window notation `[w(1), ..., w(s)]`. Right
//! multiplication by `s_i` (i >= 1) swaps positions `i` and `i+1`; right
//! multiplication by `s_0` (type B only) negates the first entry.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoxeterType {
    A,
    B,
}

/// A simple reflection. Type B uses `0..s`, type A uses `1..s`.
pub type Generator = usize;

pub type Window = Vec<i32>;

#[derive(Clone, Debug)]
pub struct CoxeterGroup {
    kind: CoxeterType,
    /// Number of letters `s` permuted by the group.
    size: usize,
    elements: Vec<Window>,
    index: HashMap<Window, usize>,
    lengths: Vec<usize>,
    /// `right[w][k]` is the index of `w * gens[k]`.
    right: Vec<Vec<usize>>,
    gens: Vec<Generator>,
    /// `bruhat[w]` holds every `x <= w`.
    bruhat: Vec<BTreeSet<usize>>,
}

impl CoxeterGroup {
    /// `W(A_{s-1})` (`kind = A`) or `W(B_s)` (`kind = B`), acting on `s` letters.
    pub fn new(kind: CoxeterType, s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::Config("Coxeter group on zero letters".into()));
        }
        let gens: Vec<Generator> = match kind {
            CoxeterType::A => (1..s).collect(),
            CoxeterType::B => (0..s).collect(),
        };
        let identity: Window = (1..=s as i32).collect();
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::from([(identity, 0usize)]);
        let mut lengths = vec![0usize];
        let mut queue = VecDeque::from([0usize]);
        while let Some(w) = queue.pop_front() {
            for &g in &gens {
                let next = act_right(&elements[w], g);
                if !index.contains_key(&next) {
                    index.insert(next.clone(), elements.len());
                    lengths.push(lengths[w] + 1);
                    queue.push_back(elements.len());
                    elements.push(next);
                }
            }
        }
        let right: Vec<Vec<usize>> = elements
            .iter()
            .map(|w| gens.iter().map(|&g| index[&act_right(w, g)]).collect())
            .collect();
        let mut group = CoxeterGroup {
            kind,
            size: s,
            elements,
            index,
            lengths,
            right,
            gens,
            bruhat: Vec::new(),
        };
        group.bruhat = group.compute_bruhat();
        Ok(group)
    }

    fn compute_bruhat(&self) -> Vec<BTreeSet<usize>> {
        // elements are in BFS order, hence sorted by length
        let mut below: Vec<BTreeSet<usize>> = Vec::with_capacity(self.len());
        below.push(BTreeSet::from([0]));
        for w in 1..self.len() {
            let k = (0..self.gens.len())
                .find(|&k| self.lengths[self.right[w][k]] < self.lengths[w])
                .unwrap();
            let ws = self.right[w][k];
            // x <= w iff min(x, xs) <= ws
            let mut set = BTreeSet::new();
            for &y in &below[ws] {
                set.insert(y);
                set.insert(self.right[y][k]);
            }
            below.push(set);
        }
        below
    }

    pub fn kind(&self) -> CoxeterType {
        self.kind
    }

    /// Number of letters `s`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn element(&self, w: usize) -> &Window {
        &self.elements[w]
    }

    pub fn index_of(&self, w: &[i32]) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn length(&self, w: usize) -> usize {
        self.lengths[w]
    }

    fn gen_pos(&self, g: Generator) -> usize {
        self.gens
            .iter()
            .position(|&x| x == g)
            .unwrap_or_else(|| panic!("s_{g} is not a generator"))
    }

    /// `w * s_g`
    pub fn mul_gen(&self, w: usize, g: Generator) -> usize {
        self.right[w][self.gen_pos(g)]
    }

    /// `w * s_g > w`
    pub fn is_ascent(&self, w: usize, g: Generator) -> bool {
        self.lengths[self.mul_gen(w, g)] > self.lengths[w]
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.reduced_word(y)
            .into_iter()
            .fold(x, |acc, g| self.mul_gen(acc, g))
    }

    /// A reduced word `g_1 ... g_k` with `w = s_{g_1} ... s_{g_k}`.
    pub fn reduced_word(&self, w: usize) -> Vec<Generator> {
        let mut word = Vec::with_capacity(self.lengths[w]);
        let mut cur = w;
        while cur != 0 {
            let k = (0..self.gens.len())
                .find(|&k| self.lengths[self.right[cur][k]] < self.lengths[cur])
                .unwrap();
            word.push(self.gens[k]);
            cur = self.right[cur][k];
        }
        word.reverse();
        word
    }

    /// Bruhat order `x <= w`.
    pub fn bruhat_le(&self, x: usize, w: usize) -> bool {
        self.bruhat[w].contains(&x)
    }

    pub fn longest(&self) -> usize {
        (0..self.len()).max_by_key(|&w| self.lengths[w]).unwrap()
    }

    /// Elements of the parabolic subgroup generated by `subset`.
    pub fn parabolic_subgroup(&self, subset: &[Generator]) -> Vec<usize> {
        let mut seen = BTreeSet::from([0usize]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(w) = queue.pop_front() {
            for &g in subset {
                let n = self.mul_gen(w, g);
                if seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Minimal length representatives of the cosets `w W_J`.
    pub fn minimal_coset_reps(&self, subset: &[Generator]) -> Vec<usize> {
        (0..self.len())
            .filter(|&w| subset.iter().all(|&g| self.is_ascent(w, g)))
            .collect()
    }

    pub fn check_generators(&self, subset: &[Generator]) -> Result<()> {
        for g in subset {
            if !self.gens.contains(g) {
                return Err(Error::Config(format!("s_{g} is not a generator of {self}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for CoxeterGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CoxeterType::A => write!(f, "W(A_{})", self.size - 1),
            CoxeterType::B => write!(f, "W(B_{})", self.size),
        }
    }
}

/// Right action of a generator on a window.
pub fn act_right(w: &[i32], g: Generator) -> Window {
    let mut out = w.to_vec();
    if g == 0 {
        out[0] = -out[0];
    } else {
        out.swap(g - 1, g);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    #[test]
    fn group_orders() {
        for s in 1..=4 {
            assert_eq!(
                CoxeterGroup::new(CoxeterType::A, s).unwrap().len(),
                factorial(s)
            );
            assert_eq!(
                CoxeterGroup::new(CoxeterType::B, s).unwrap().len(),
                (1 << s) * factorial(s)
            );
        }
    }

    #[test]
    fn lengths_and_words() {
        let b3 = CoxeterGroup::new(CoxeterType::B, 3).unwrap();
        assert_eq!(b3.length(b3.longest()), 9);
        assert_eq!(b3.element(b3.longest()), &vec![-1, -2, -3]);
        for w in 0..b3.len() {
            let word = b3.reduced_word(w);
            assert_eq!(word.len(), b3.length(w));
            assert_eq!(word.iter().fold(0, |acc, &g| b3.mul_gen(acc, g)), w);
        }
    }

    #[test]
    fn bruhat_is_partial_order_with_minimum() {
        let b2 = CoxeterGroup::new(CoxeterType::B, 2).unwrap();
        for x in 0..b2.len() {
            assert!(b2.bruhat_le(0, x));
            assert!(b2.bruhat_le(x, x));
            for y in 0..b2.len() {
                if x != y && b2.bruhat_le(x, y) {
                    assert!(!b2.bruhat_le(y, x));
                    assert!(b2.length(x) < b2.length(y));
                }
                for z in 0..b2.len() {
                    if b2.bruhat_le(x, y) && b2.bruhat_le(y, z) {
                        assert!(b2.bruhat_le(x, z));
                    }
                }
            }
        }
        // in B_2 every element of smaller length is below the longest
        let w0 = b2.longest();
        assert!((0..b2.len()).all(|x| b2.bruhat_le(x, w0)));
        // s_0 and s_1 are incomparable
        let s0 = b2.mul_gen(0, 0);
        let s1 = b2.mul_gen(0, 1);
        assert!(!b2.bruhat_le(s0, s1) && !b2.bruhat_le(s1, s0));
    }

    #[test]
    fn coset_representatives() {
        let b2 = CoxeterGroup::new(CoxeterType::B, 2).unwrap();
        assert_eq!(b2.minimal_coset_reps(&[1]).len(), 4);
        assert_eq!(b2.minimal_coset_reps(&[0, 1]), vec![0]);
        assert_eq!(b2.parabolic_subgroup(&[0]).len(), 2);
    }
}
