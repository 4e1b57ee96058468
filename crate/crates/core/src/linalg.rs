//! Dense exact linear algebra over a field, plus a modular rank-profile
//! heuristic used to pick candidate pivots before exact verification.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::laurent::LaurentPoly;
use crate::scalar::Field;

pub type DenseMat<F> = Vec<Vec<F>>;

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum Solution<F> {
    Unique(Vec<F>),
    /// A particular solution together with the nullity of `A`.
    Underdetermined(Vec<F>, usize),
    Inconsistent,
}

struct Echelon<F> {
    rows: DenseMat<F>,
    pivots: Vec<usize>,
}

/// Reduced row echelon form of `[A | B]`; pivots are restricted to the first
/// `ncols_a` columns.
fn rref<F: Field>(mut rows: DenseMat<F>, ncols_a: usize) -> Echelon<F> {
    let nrows = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols_a {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv();
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = x.sub(&f.mul(y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { rows, pivots }
}

pub fn rank<F: Field>(a: &DenseMat<F>) -> usize {
    let ncols = a.first().map_or(0, |r| r.len());
    rref(a.clone(), ncols).pivots.len()
}

/// Solves `A x = b`.
pub fn solve<F: Field>(a: &DenseMat<F>, b: &[F]) -> Solution<F> {
    let n = a.first().map_or(0, |r| r.len());
    let aug = a.iter().zip(b).map(|(row, bi)| {
        let mut r = row.clone();
        r.push(bi.clone());
        r
    });
    let e = rref(aug.collect(), n);
    let rank = e.pivots.len();
    if e.rows.iter().skip(rank).any(|r| !r[n].is_zero()) {
        return Solution::Inconsistent;
    }
    let mut x = vec![F::zero(); n];
    for (k, &c) in e.pivots.iter().enumerate() {
        x[c] = e.rows[k][n].clone();
    }
    if rank == n {
        Solution::Unique(x)
    } else {
        Solution::Underdetermined(x, n - rank)
    }
}

pub fn inverse<F: Field>(a: &DenseMat<F>) -> Option<DenseMat<F>> {
    let n = a.len();
    let aug: DenseMat<F> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "inverse of a non-square matrix");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    let e = rref(aug, n);
    (e.pivots.len() == n).then(|| e.rows.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// A basis of `{x : A x = 0}`.
pub fn nullspace<F: Field>(a: &DenseMat<F>, ncols: usize) -> Vec<Vec<F>> {
    let e = rref(a.clone(), ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !e.pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); ncols];
            v[f] = F::one();
            for (k, &p) in e.pivots.iter().enumerate() {
                v[p] = e.rows[k][f].neg();
            }
            v
        })
        .collect()
}

const PRIME: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn powmod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b);
        }
        b = mulmod(b, b);
        e >>= 1;
    }
    r
}

/// Evaluates `p` at `q = t` modulo a fixed 61-bit prime.
pub fn eval_mod(p: &LaurentPoly, t: u64) -> u64 {
    let tinv = powmod(t, PRIME - 2);
    let mut acc = 0u64;
    for (e, c) in p.terms() {
        let cm: BigInt = ((c % BigInt::from(PRIME)) + BigInt::from(PRIME)) % BigInt::from(PRIME);
        let cm = cm.to_u64().unwrap();
        let base = if e >= 0 {
            powmod(t, e as u64)
        } else {
            powmod(tinv, (-e) as u64)
        };
        acc = (acc + mulmod(cm, base)) % PRIME;
    }
    acc
}

/// Pivot columns (greedy, left to right) of a Laurent matrix given by rows,
/// computed after evaluating at a fixed generic point modulo a prime. The
/// true rank over `Q(q)` is at least the returned count.
pub fn rank_profile_mod(rows: &[Vec<LaurentPoly>]) -> Vec<usize> {
    const POINT: u64 = 1_000_003_937;
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|p| if p.is_zero() { 0 } else { eval_mod(p, POINT) })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let inv = powmod(m[r][c], PRIME - 2);
        let pivot_row: Vec<u64> = m[r].iter().map(|&x| mulmod(x, inv)).collect();
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for (x, &y) in m[i].iter_mut().zip(&pivot_row) {
                    *x = (*x + PRIME - mulmod(f, y)) % PRIME;
                }
            }
        }
        m[r] = pivot_row;
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    pivots
}

pub fn is_zero_vec<F: Field>(v: &[F]) -> bool {
    v.iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfunc::RatFunc;
    use crate::scalar::Scalar;

    fn r(terms: &[(i64, i64)]) -> RatFunc {
        RatFunc::from_laurent(&LaurentPoly::from_terms(terms.iter().map(|&(c, e)| (c, e))))
    }

    #[test]
    fn solve_and_inverse() {
        let a = vec![
            vec![r(&[(1, 1)]), r(&[(1, 0)])],
            vec![r(&[(1, 0)]), r(&[(1, -1)])],
        ];
        // det = q*q^-1 - 1 = 0: singular
        assert_eq!(rank(&a), 1);
        assert!(inverse(&a).is_none());
        let b = vec![
            vec![r(&[(1, 1)]), r(&[(1, 0)])],
            vec![r(&[(1, 0)]), r(&[(1, 1)])],
        ];
        let inv = inverse(&b).unwrap();
        let x = solve(&b, &[r(&[(1, 0)]), r(&[(1, 0)])]);
        match x {
            Solution::Unique(x) => {
                // (q + 1)^-1 in both coordinates
                assert_eq!(x[0], x[1]);
                assert_eq!(x[0].mul(&r(&[(1, 1), (1, 0)])), RatFunc::one());
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            inv[0][0].mul(&b[0][0]).add(&inv[0][1].mul(&b[1][0])),
            RatFunc::one()
        );
        assert_eq!(nullspace(&a, 2).len(), 1);
        let lp: Vec<Vec<LaurentPoly>> = a
            .iter()
            .map(|row| row.iter().map(|x| x.to_laurent().unwrap()).collect())
            .collect();
        assert_eq!(rank_profile_mod(&lp), vec![0]);
    }
}
