//! Coefficient rings shared by matrices and algebra elements.

use std::fmt::Debug;

use crate::laurent::LaurentPoly;

/// A commutative ring with the bar involution `q -> q^-1`.
pub trait Scalar: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn bar(&self) -> Self;
    fn from_laurent(p: &LaurentPoly) -> Self;
}

pub trait Field: Scalar {
    fn inv(&self) -> Self;
    fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }
}

impl Scalar for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn one() -> Self {
        LaurentPoly::one()
    }
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        LaurentPoly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        LaurentPoly::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        LaurentPoly::mul(self, o)
    }
    fn neg(&self) -> Self {
        LaurentPoly::neg(self)
    }
    fn bar(&self) -> Self {
        LaurentPoly::bar(self)
    }
    fn from_laurent(p: &LaurentPoly) -> Self {
        p.clone()
    }
}
