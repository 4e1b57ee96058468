//! Exact Laurent polynomials in `q` with integer coefficients.
//!
//! Storage is dense between the lowest and highest nonzero exponent, so the
//! representation is canonical: equal polynomials compare equal structurally.

use std::cmp::{max, min};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An element of `Z[q, q^-1]`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    min_exp: i64,
    /// `coeffs[k]` is the coefficient of `q^(min_exp + k)`; never has a zero
    /// at either end.
    coeffs: Vec<BigInt>,
}

/// The lattices of `Z[q, q^-1]` used for normalizing canonical bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Lattice {
    /// `Z[q]`
    Zq,
    /// `Z[q^-1]`
    Zqinv,
    /// `qZ[q]`
    QZq,
    /// `q^-1 Z[q^-1]`
    QinvZqinv,
    /// all of `Z[q, q^-1]`
    A,
}

impl Lattice {
    pub fn contains_exponent(self, e: i64) -> bool {
        match self {
            Lattice::Zq => e >= 0,
            Lattice::Zqinv => e <= 0,
            Lattice::QZq => e >= 1,
            Lattice::QinvZqinv => e <= -1,
            Lattice::A => true,
        }
    }

    /// The strict lattice obtained by exchanging `q` and `q^-1`.
    pub fn complement(self) -> Lattice {
        match self {
            Lattice::Zq => Lattice::Zqinv,
            Lattice::Zqinv => Lattice::Zq,
            Lattice::QZq => Lattice::QinvZqinv,
            Lattice::QinvZqinv => Lattice::QZq,
            Lattice::A => Lattice::A,
        }
    }
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `q`
    pub fn q() -> Self {
        Self::monomial(1, 1)
    }

    /// `q^-1`
    pub fn qinv() -> Self {
        Self::monomial(1, -1)
    }

    /// `c q^e`
    pub fn monomial(c: impl Into<BigInt>, e: i64) -> Self {
        let c = c.into();
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            min_exp: e,
            coeffs: vec![c],
        }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    /// `q^e`
    pub fn q_pow(e: i64) -> Self {
        Self::monomial(1, e)
    }

    /// `q - q^-1`
    pub fn q_minus_qinv() -> Self {
        Self::from_terms([(1, 1), (-1, -1)])
    }

    /// Builds a polynomial from `(coefficient, exponent)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms<C: Into<BigInt>>(terms: impl IntoIterator<Item = (C, i64)>) -> Self {
        let terms: Vec<(BigInt, i64)> = terms.into_iter().map(|(c, e)| (c.into(), e)).collect();
        if terms.is_empty() {
            return Self::zero();
        }
        let lo = terms.iter().map(|t| t.1).min().unwrap();
        let hi = terms.iter().map(|t| t.1).max().unwrap();
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (c, e) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        Self::from_dense(lo, coeffs)
    }

    /// Builds from a dense coefficient vector starting at `min_exp`, trimming
    /// zeros at both ends.
    pub fn from_dense(min_exp: i64, mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return Self::zero();
        }
        coeffs.drain(..lead);
        LaurentPoly {
            min_exp: min_exp + lead as i64,
            coeffs,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.min_exp == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Lowest exponent with nonzero coefficient.
    pub fn min_exp(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.min_exp)
    }

    /// Highest exponent with nonzero coefficient.
    pub fn max_exp(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.min_exp + self.coeffs.len() as i64 - 1)
    }

    pub fn dense_coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        let k = e - self.min_exp;
        if k < 0 || k >= self.coeffs.len() as i64 {
            BigInt::zero()
        } else {
            self.coeffs[k as usize].clone()
        }
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.min_exp + k as i64, c))
    }

    /// The bar involution `q -> q^-1`.
    pub fn bar(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        LaurentPoly {
            min_exp: -self.max_exp().unwrap(),
            coeffs,
        }
    }

    pub fn is_bar_invariant(&self) -> bool {
        *self == self.bar()
    }

    pub fn in_lattice(&self, lattice: Lattice) -> bool {
        self.terms().all(|(e, _)| lattice.contains_exponent(e))
    }

    pub fn is_nonneg(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Keeps only the terms whose exponent lies in `lattice`.
    pub fn truncate_to(&self, lattice: Lattice) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|(e, _)| lattice.contains_exponent(*e))
                .map(|(e, c)| (c.clone(), e)),
        )
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            min_exp: self.min_exp + k,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|x| -x).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { other.neg() } else { other.clone() };
        }
        let lo = min(self.min_exp, other.min_exp);
        let hi = max(self.max_exp().unwrap(), other.max_exp().unwrap());
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.min_exp - lo) as usize + k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            let slot = &mut coeffs[(other.min_exp - lo) as usize + k];
            if negate {
                *slot -= c;
            } else {
                *slot += c;
            }
        }
        Self::from_dense(lo, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_dense(self.min_exp + other.min_exp, coeffs)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Exact division in `Z[q, q^-1]`; `None` when `divisor` does not divide
    /// `self`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        assert!(!divisor.is_zero(), "division by zero Laurent polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        let d = &divisor.coeffs;
        let dl = d.len();
        let mut rem = self.coeffs.clone();
        if rem.len() < dl {
            return None;
        }
        let ql = rem.len() - dl + 1;
        let mut quot = vec![BigInt::zero(); ql];
        let lead = &d[dl - 1];
        for k in (0..ql).rev() {
            let top = &rem[k + dl - 1];
            if top.is_zero() {
                continue;
            }
            if !(top % lead).is_zero() {
                return None;
            }
            let c = top / lead;
            for (j, dj) in d.iter().enumerate() {
                rem[k + j] -= &c * dj;
            }
            quot[k] = c;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::from_dense(self.min_exp - divisor.min_exp, quot))
    }

    /// Value of the coefficients as `i64`, if they all fit.
    pub fn to_i64_terms(&self) -> Option<Vec<(i64, i64)>> {
        self.terms()
            .map(|(e, c)| c.to_i64().map(|c| (e, c)))
            .collect()
    }
}

impl fmt::Display for LaurentPoly {
    /// Highest power first, e.g. `2q^3 - q^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        let terms: Vec<(i64, &BigInt)> = self.terms().collect();
        for (e, c) in terms.into_iter().rev() {
            let negative = c.is_negative();
            let abs = c.abs();
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !abs.is_one() || e == 0;
            if show_coeff {
                write!(f, "{abs}")?;
            }
            match e {
                0 => {}
                1 => write!(f, "q")?,
                _ => write!(f, "q^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct LaurentRepr {
    min_exp: i64,
    coeffs: Vec<serde_json::Value>,
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| match c.to_i64() {
                Some(v) => serde_json::Value::from(v),
                None => serde_json::Value::from(c.to_string()),
            })
            .collect();
        LaurentRepr {
            min_exp: if self.is_zero() { 0 } else { self.min_exp },
            coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = LaurentRepr::deserialize(deserializer)?;
        let mut coeffs = Vec::with_capacity(repr.coeffs.len());
        for v in repr.coeffs {
            let c = match v {
                serde_json::Value::Number(n) => n
                    .as_i64()
                    .map(BigInt::from)
                    .ok_or_else(|| D::Error::custom("non-integer coefficient"))?,
                serde_json::Value::String(s) => s
                    .parse::<BigInt>()
                    .map_err(|e| D::Error::custom(e.to_string()))?,
                _ => return Err(D::Error::custom("coefficient must be an integer")),
            };
            coeffs.push(c);
        }
        Ok(LaurentPoly::from_dense(repr.min_exp, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().map(|&(c, e)| (c, e)))
    }

    #[test]
    fn bar_examples() {
        assert_eq!(LaurentPoly::zero().bar(), LaurentPoly::zero());
        assert_eq!(lp(&[(2, 3), (-1, -1)]).bar(), lp(&[(2, -3), (-1, 1)]));
        let sym = lp(&[(1, 1), (1, -1)]);
        assert_eq!(sym.bar(), sym);
    }

    #[test]
    fn lattice_examples() {
        assert!(lp(&[(1, -1), (2, -3)]).in_lattice(Lattice::QinvZqinv));
        assert!(!lp(&[(1, 0), (1, -1)]).in_lattice(Lattice::QinvZqinv));
        assert!(lp(&[(1, 2)]).in_lattice(Lattice::QZq));
    }

    #[test]
    fn positivity_and_evaluation() {
        assert!(lp(&[(1, 2), (3, 0)]).is_nonneg());
        assert!(!lp(&[(1, 1), (-1, -1)]).is_nonneg());
        assert_eq!(
            lp(&[(1, 1), (1, -1), (1, 0)]).eval_at_one(),
            BigInt::from(3)
        );
    }

    #[test]
    fn display_and_serialization() {
        let p = lp(&[(2, 3), (-1, -1)]);
        assert_eq!(p.to_string(), "2q^3 - q^-1");
        assert_eq!(lp(&[(-1, 1), (1, 0)]).to_string(), "-q + 1");
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"min_exp":-1,"coeffs":[-1,0,0,0,2]}"#);
        assert_eq!(serde_json::from_str::<LaurentPoly>(&json).unwrap(), p);
        assert_eq!(
            serde_json::to_string(&LaurentPoly::zero()).unwrap(),
            r#"{"min_exp":0,"coeffs":[]}"#
        );
    }

    #[test]
    fn exact_division() {
        let a = lp(&[(1, 1), (-1, -1)]);
        let b = lp(&[(1, 2), (1, 0), (3, -4)]);
        assert_eq!(a.mul(&b).div_exact(&a), Some(b.clone()));
        assert_eq!(b.div_exact(&lp(&[(2, 0)])), None);
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-5i64..=5, -8i64..=8), 0..6).prop_map(LaurentPoly::from_terms)
    }

    proptest! {
        #[test]
        fn bar_is_ring_involution(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!(a.mul(&b).bar(), a.bar().mul(&b.bar()));
            prop_assert_eq!(a.add(&b).bar(), a.bar().add(&b.bar()));
            prop_assert_eq!(a.bar().bar(), a.clone());
            prop_assert!(a.in_lattice(Lattice::A));
            if a.in_lattice(Lattice::QinvZqinv) {
                prop_assert!(a.coeff(0).is_zero());
            }
        }

        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.sub(&a), LaurentPoly::zero());
        }
    }
}
