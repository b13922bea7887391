//! Exact coefficient fields and their numeric specialization.

mod constext;
mod halfint;
pub mod numeric;
mod poly;
mod qrat;
mod radical;

use std::fmt;

pub use constext::ConstExt;
pub use halfint::HalfInt;
pub use numeric::{eval_numeric, eval_qrat, Fixed};
pub use poly::Poly;
pub use qrat::{parse_rational, q_big, qnum, rational_from_f64, rational_sqrt, QRat};
pub use radical::{RadScalar, Radicand};

use crate::error::{Error, Result};

/// `κ^l_j = sqrt([l+j]_q [l-j+1]_q)`, defined for `-l <= j <= l+1`.
pub fn kappa(l: HalfInt, j: HalfInt) -> Result<RadScalar> {
    RadScalar::sqrt(&kappa_sq(l, j)?)
}

/// `(κ^l_j)^2 = [l+j]_q [l-j+1]_q`.
pub fn kappa_sq(l: HalfInt, j: HalfInt) -> Result<QRat> {
    if l.twice() < 0 || j < -l || j > l + HalfInt::ONE {
        return Err(Error::Domain(format!(
            "kappa({l}, {j}) needs -l <= j <= l+1"
        )));
    }
    Ok(&qnum(l + j) * &qnum(l - j + HalfInt::ONE))
}

/// Coefficient ring interface shared by algebra elements.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &QRat) -> Self;
    fn from_qrat(c: QRat) -> Self;
    fn to_qrat(&self) -> Option<QRat>;
    fn eval_f64(&self, q: f64) -> f64;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl Coeff for QRat {
    fn zero() -> Self {
        QRat::zero()
    }
    fn one() -> Self {
        QRat::one()
    }
    fn is_zero(&self) -> bool {
        QRat::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &QRat) -> Self {
        self * c
    }
    fn from_qrat(c: QRat) -> Self {
        c
    }
    fn to_qrat(&self) -> Option<QRat> {
        Some(self.clone())
    }
    fn eval_f64(&self, q: f64) -> f64 {
        QRat::eval_f64(self, q)
    }
}

impl Coeff for RadScalar {
    fn zero() -> Self {
        RadScalar::zero()
    }
    fn one() -> Self {
        RadScalar::one()
    }
    fn is_zero(&self) -> bool {
        RadScalar::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &QRat) -> Self {
        RadScalar::scale(self, c)
    }
    fn from_qrat(c: QRat) -> Self {
        RadScalar::from_qrat(c)
    }
    fn to_qrat(&self) -> Option<QRat> {
        RadScalar::to_qrat(self)
    }
    fn eval_f64(&self, q: f64) -> f64 {
        RadScalar::eval_f64(self, q)
    }
}

impl Coeff for ConstExt {
    fn zero() -> Self {
        ConstExt::zero()
    }
    fn one() -> Self {
        ConstExt::one()
    }
    fn is_zero(&self) -> bool {
        ConstExt::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &QRat) -> Self {
        ConstExt::scale(self, c)
    }
    fn from_qrat(c: QRat) -> Self {
        ConstExt::from_qrat(c)
    }
    fn to_qrat(&self) -> Option<QRat> {
        ConstExt::to_qrat(self)
    }
    fn eval_f64(&self, q: f64) -> f64 {
        ConstExt::eval_f64(self, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn kappa_values() {
        assert!(kappa(h(1), h(1)).unwrap().is_one());
        for n2 in 1..=6 {
            let n = h(n2);
            assert_eq!(
                kappa(n, n).unwrap().square().to_qrat().unwrap(),
                qnum(n + n)
            );
        }
        assert_eq!(
            kappa_sq(h(2), h(0)).unwrap(),
            &QRat::q_pow(-1) + &QRat::q_pow(1)
        );
        assert_eq!(
            kappa(h(2), h(0)).unwrap().square().to_qrat().unwrap(),
            kappa_sq(h(2), h(0)).unwrap()
        );
        assert!(matches!(kappa(h(2), h(6)), Err(Error::Domain(_))));
        assert!(matches!(kappa(h(2), h(-4)), Err(Error::Domain(_))));
        assert!(kappa(h(2), h(4)).unwrap().is_zero());
    }
}
