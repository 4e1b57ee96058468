//! Rational functions in `q` over `Q`, used only as scratch arithmetic where
//! exact inversion is unavoidable (Gram matrices, highest-weight bases).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::laurent::LaurentPoly;
use crate::scalar::{Field, Scalar};

/// `num / den` in lowest terms. `den` is a polynomial with nonzero constant
/// term and positive leading coefficient, coprime to `num`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: LaurentPoly,
    den: Vec<BigInt>,
}

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn primitive(p: &[BigInt]) -> Vec<BigInt> {
    let c = content(p);
    if c.is_zero() || c.is_one() {
        return p.to_vec();
    }
    p.iter().map(|x| x / &c).collect()
}

/// Pseudo-remainder of `a` by `b` (both nonzero, dense by degree).
fn prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (j, bj) in b.iter().enumerate() {
            r[dr - db + j] -= &lr * bj;
        }
        r = trim(r);
    }
    r
}

/// Primitive gcd of two nonzero integer polynomials.
fn poly_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let (mut a, mut b) = (primitive(a), primitive(b));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        if b.len() == 1 {
            return vec![BigInt::one()];
        }
        let r = prem(&a, &b);
        a = b;
        b = primitive(&r);
    }
    if a.last().is_some_and(|c| c.is_negative()) {
        a = a.iter().map(|c| -c).collect();
    }
    a
}

fn poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let pa = LaurentPoly::from_dense(0, a.to_vec());
    let pb = LaurentPoly::from_dense(0, b.to_vec());
    let quotient = pa.div_exact(&pb).expect("gcd divides both operands");
    to_dense_poly(&quotient)
}

fn to_dense_poly(p: &LaurentPoly) -> Vec<BigInt> {
    match p.min_exp() {
        None => Vec::new(),
        Some(m) => {
            assert!(m >= 0, "expected a polynomial");
            let mut v = vec![BigInt::zero(); m as usize];
            v.extend(p.dense_coeffs().iter().cloned());
            v
        }
    }
}

impl RatFunc {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::from_laurent_poly(LaurentPoly::zero());
        }
        let dm = den.min_exp().unwrap();
        let num = num.shift(-dm);
        let den = to_dense_poly(&den.shift(-dm));
        let nm = num.min_exp().unwrap();
        let num_poly = to_dense_poly(&num.shift(-nm));

        let g = poly_gcd(&num_poly, &den);
        let (mut n, mut d) = if g.len() > 1 {
            (poly_div_exact(&num_poly, &g), poly_div_exact(&den, &g))
        } else {
            (num_poly, den)
        };
        let cn = content(&n);
        let cd = content(&d);
        let c = cn.gcd(&cd);
        if !c.is_one() {
            n = n.iter().map(|x| x / &c).collect();
            d = d.iter().map(|x| x / &c).collect();
        }
        if d.last().unwrap().is_negative() {
            n = n.iter().map(|x| -x).collect();
            d = d.iter().map(|x| -x).collect();
        }
        RatFunc {
            num: LaurentPoly::from_dense(nm, n),
            den: d,
        }
    }

    pub fn from_laurent_poly(p: LaurentPoly) -> Self {
        RatFunc {
            num: p,
            den: vec![BigInt::one()],
        }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> LaurentPoly {
        LaurentPoly::from_dense(0, self.den.clone())
    }

    /// The value as a Laurent polynomial, when the denominator is a unit.
    pub fn to_laurent(&self) -> Option<LaurentPoly> {
        (self.den.len() == 1 && self.den[0].is_one()).then(|| self.num.clone())
    }

    pub fn is_laurent(&self) -> bool {
        self.den.len() == 1 && self.den[0].is_one()
    }
}

impl Scalar for RatFunc {
    fn zero() -> Self {
        Self::from_laurent_poly(LaurentPoly::zero())
    }
    fn one() -> Self {
        Self::from_laurent_poly(LaurentPoly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFunc::new(self.num.add(&o.num), self.denominator());
        }
        let (d1, d2) = (self.denominator(), o.denominator());
        RatFunc::new(self.num.mul(&d2).add(&o.num.mul(&d1)), d1.mul(&d2))
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.is_laurent() && o.is_laurent() {
            return Self::from_laurent_poly(self.num.mul(&o.num));
        }
        RatFunc::new(
            self.num.mul(&o.num),
            self.denominator().mul(&o.denominator()),
        )
    }
    fn neg(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
    fn bar(&self) -> Self {
        RatFunc::new(self.num.bar(), self.denominator().bar())
    }
    fn from_laurent(p: &LaurentPoly) -> Self {
        Self::from_laurent_poly(p.clone())
    }
}

impl Field for RatFunc {
    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        RatFunc::new(self.denominator(), self.num.clone())
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_laurent() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.denominator())
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().map(|&(c, e)| (c, e)))
    }

    #[test]
    fn reduces_to_lowest_terms() {
        // (q^2 - 1) / (q - 1) = q + 1
        let r = RatFunc::new(lp(&[(1, 2), (-1, 0)]), lp(&[(1, 1), (-1, 0)]));
        assert_eq!(r.to_laurent(), Some(lp(&[(1, 1), (1, 0)])));
        // (q - q^-1)^-1 stays rational
        let s = RatFunc::from_laurent(&LaurentPoly::q_minus_qinv()).inv();
        assert!(!s.is_laurent());
        assert_eq!(
            s.mul(&RatFunc::from_laurent(&LaurentPoly::q_minus_qinv())),
            RatFunc::one()
        );
    }

    #[test]
    fn field_identities() {
        let a = RatFunc::new(lp(&[(2, 1), (3, -2)]), lp(&[(1, 3), (5, 0)]));
        let b = RatFunc::new(lp(&[(1, 0), (-7, 4)]), lp(&[(1, 1), (1, -1)]));
        assert_eq!(a.add(&b).sub(&b), a);
        assert_eq!(a.mul(&b).mul(&b.inv()), a);
        assert_eq!(a.bar().bar(), a);
        assert_eq!(a.mul(&b).bar(), a.bar().mul(&b.bar()));
        assert_eq!(
            RatFunc::new(lp(&[(6, 0)]), lp(&[(4, 0)])),
            RatFunc::new(lp(&[(3, 0)]), lp(&[(2, 0)]))
        );
    }
}
