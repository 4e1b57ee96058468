//! Column-sparse matrices over a [`Scalar`] ring.
//!
//! Column `j` holds the image of the `j`-th basis vector, so a matrix is the
//! operator itself and `A.mul(&B)` is the composition `A ∘ B`.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

pub type SparseVec<C> = BTreeMap<usize, C>;

/// `acc += c * v`
pub fn axpy<C: Scalar>(acc: &mut SparseVec<C>, c: &C, v: &SparseVec<C>) {
    if c.is_zero() {
        return;
    }
    for (&i, x) in v {
        let t = c.mul(x);
        match acc.get_mut(&i) {
            Some(slot) => {
                *slot = slot.add(&t);
                if slot.is_zero() {
                    acc.remove(&i);
                }
            }
            None => {
                if !t.is_zero() {
                    acc.insert(i, t);
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMat<C> {
    nrows: usize,
    cols: Vec<SparseVec<C>>,
}

impl<C: Scalar> SparseMat<C> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMat {
            nrows,
            cols: vec![BTreeMap::new(); ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.cols[i].insert(i, C::one());
        }
        m
    }

    pub fn from_columns(nrows: usize, cols: Vec<SparseVec<C>>) -> Self {
        debug_assert!(cols.iter().all(|c| c.keys().all(|&i| i < nrows)));
        let cols = cols
            .into_iter()
            .map(|c| c.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        SparseMat { nrows, cols }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &SparseVec<C> {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SparseVec<C>] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.cols[j].get(&i).cloned().unwrap_or_else(C::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        if v.is_zero() {
            self.cols[j].remove(&i);
        } else {
            self.cols[j].insert(i, v);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &C) {
        let cur = self.get(i, j);
        self.set(i, j, cur.add(v));
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &C)> {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |(&i, v)| (i, j, v)))
    }

    pub fn apply(&self, v: &SparseVec<C>) -> SparseVec<C> {
        let mut out = BTreeMap::new();
        for (&j, c) in v {
            axpy(&mut out, c, &self.cols[j]);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols(), other.nrows, "dimension mismatch in product");
        let cols = other.cols.iter().map(|c| self.apply(c)).collect();
        SparseMat {
            nrows: self.nrows,
            cols,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols()), (other.nrows, other.ncols()));
        let mut out = self.clone();
        for (j, c) in other.cols.iter().enumerate() {
            axpy(&mut out.cols[j], &C::one(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_zero() {
            return Self::zeros(self.nrows, self.ncols());
        }
        self.map(|c| s.mul(c))
    }

    /// Entrywise bar involution.
    pub fn bar(&self) -> Self {
        self.map(|c| c.bar())
    }

    pub fn map<D: Scalar>(&self, f: impl Fn(&C) -> D) -> SparseMat<D> {
        let cols = self
            .cols
            .iter()
            .map(|c| {
                c.iter()
                    .map(|(&i, v)| (i, f(v)))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        SparseMat {
            nrows: self.nrows,
            cols,
        }
    }

    pub fn try_map<D: Scalar>(&self, f: impl Fn(&C) -> Option<D>) -> Option<SparseMat<D>> {
        let mut cols = Vec::with_capacity(self.ncols());
        for c in &self.cols {
            let mut col = BTreeMap::new();
            for (&i, v) in c {
                let d = f(v)?;
                if !d.is_zero() {
                    col.insert(i, d);
                }
            }
            cols.push(col);
        }
        Some(SparseMat {
            nrows: self.nrows,
            cols,
        })
    }

    /// Kronecker product; basis index of `a ⊗ b` is `ia * b.nrows + ib`.
    pub fn kron(a: &Self, b: &Self) -> Self {
        let (rb, cb) = (b.nrows, b.ncols());
        let mut cols = vec![BTreeMap::new(); a.ncols() * cb];
        for (ja, ca) in a.cols.iter().enumerate() {
            for (jb, cbv) in b.cols.iter().enumerate() {
                let col = &mut cols[ja * cb + jb];
                for (&ia, x) in ca {
                    for (&ib, y) in cbv {
                        col.insert(ia * rb + ib, x.mul(y));
                    }
                }
            }
        }
        SparseMat {
            nrows: a.nrows * rb,
            cols,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut cols = vec![BTreeMap::new(); self.nrows];
        for (i, j, v) in self.entries() {
            cols[i].insert(j, v.clone());
        }
        SparseMat {
            nrows: self.ncols(),
            cols,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.nrows == self.ncols()
            && self
                .cols
                .iter()
                .enumerate()
                .all(|(j, c)| c.len() == 1 && c.get(&j).is_some_and(|v| *v == C::one()))
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    /// Restriction to the given rows and columns (in the given order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        let out = cols
            .iter()
            .map(|&j| {
                self.cols[j]
                    .iter()
                    .filter_map(|(i, v)| pos.get(i).map(|&k| (k, v.clone())))
                    .collect()
            })
            .collect();
        SparseMat {
            nrows: rows.len(),
            cols: out,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPoly;

    #[test]
    fn kron_and_product() {
        let mut a = SparseMat::<LaurentPoly>::zeros(2, 2);
        a.set(0, 1, LaurentPoly::q());
        let i2 = SparseMat::identity(2);
        let k = SparseMat::kron(&a, &i2);
        assert_eq!(k.get(1, 3), LaurentPoly::q());
        assert_eq!(k.get(0, 2), LaurentPoly::q());
        assert!(k.mul(&k).is_zero());
        assert!(i2.mul(&i2).is_identity());
        assert_eq!(a.transpose().get(1, 0), LaurentPoly::q());
    }
}
