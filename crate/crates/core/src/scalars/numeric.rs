//! Numeric specialization `s = sqrt(q)`, `L = ln(1/q)`, `EG = γ`.
//!
//! Up to 53 bits the evaluation runs in `f64`. Beyond that every `QRat` coefficient is reduced
//! exactly to `A + B sqrt(q)` with rational `A`, `B`, and the irrational pieces are computed in
//! binary fixed point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::constext::ConstExt;
use super::qrat::QRat;
use crate::error::{Error, Result};

pub const EULER_GAMMA_F64: f64 = 0.577_215_664_901_532_9;

const EULER_GAMMA_DIGITS: &str =
    "57721566490153286060651209008240243104215933593992359880576723488486772677766467";

/// Largest supported precision; bounded by the stored digits of Euler's constant.
pub const MAX_PRECISION_BITS: u32 = 256;

const GUARD_BITS: u32 = 32;

/// Binary fixed-point number `mant / 2^bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed {
    mant: BigInt,
    bits: u32,
}

impl Fixed {
    pub fn from_rational(x: &BigRational, bits: u32) -> Self {
        let mant = (x.numer() << bits as usize) / x.denom();
        Fixed { mant, bits }
    }

    fn mul(&self, other: &Fixed) -> Fixed {
        Fixed {
            mant: (&self.mant * &other.mant) >> self.bits as usize,
            bits: self.bits,
        }
    }

    fn div(&self, other: &Fixed) -> Result<Fixed> {
        if other.mant.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Fixed {
            mant: (&self.mant << self.bits as usize) / &other.mant,
            bits: self.bits,
        })
    }

    fn add(&self, other: &Fixed) -> Fixed {
        Fixed {
            mant: &self.mant + &other.mant,
            bits: self.bits,
        }
    }

    fn scale(&self, c: &BigRational) -> Fixed {
        Fixed {
            mant: (&self.mant * c.numer()) / c.denom(),
            bits: self.bits,
        }
    }

    fn one(bits: u32) -> Fixed {
        Fixed {
            mant: BigInt::one() << bits as usize,
            bits,
        }
    }

    fn powi(&self, e: i32) -> Result<Fixed> {
        let mut acc = Fixed::one(self.bits);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(self);
        }
        if e < 0 {
            Fixed::one(self.bits).div(&acc)
        } else {
            Ok(acc)
        }
    }

    pub fn to_f64(&self) -> f64 {
        // keep 64 significant bits before the float conversion
        let excess = (self.mant.bits() as i64 - 64).max(0) as u32;
        let m = (&self.mant >> excess as usize).to_f64().unwrap_or(f64::NAN);
        m * 2f64.powi(excess as i32 - self.bits as i32)
    }

    /// Decimal rendering with `digits` digits after the point (truncated).
    pub fn to_decimal(&self, digits: usize) -> String {
        let neg = self.mant.is_negative();
        let scaled =
            (self.mant.abs() * num_traits::pow(BigInt::from(10), digits)) >> self.bits as usize;
        let s = scaled.to_string();
        let s = format!("{:0>width$}", s, width = digits + 1);
        let (int, frac) = s.split_at(s.len() - digits);
        format!("{}{}.{}", if neg { "-" } else { "" }, int, frac)
    }
}

/// `floor(sqrt(x) * 2^bits)` for `x >= 0`.
fn sqrt_fixed(x: &BigRational, bits: u32) -> Fixed {
    let scaled = (x.numer() << (2 * bits) as usize) / x.denom();
    Fixed {
        mant: scaled.sqrt(),
        bits,
    }
}

/// `2 atanh(z)` for a rational `0 <= z < 1/2` by its Taylor series.
fn two_atanh(z: &BigRational, bits: u32) -> Fixed {
    let zf = Fixed::from_rational(z, bits);
    let z2 = zf.mul(&zf);
    let mut power = zf.clone();
    let mut sum = Fixed {
        mant: BigInt::zero(),
        bits,
    };
    let mut k = 0u64;
    while !power.mant.is_zero() {
        let term = Fixed {
            mant: &power.mant / BigInt::from(2 * k + 1),
            bits,
        };
        sum = sum.add(&term);
        power = power.mul(&z2);
        k += 1;
    }
    Fixed {
        mant: sum.mant * 2,
        bits,
    }
}

/// Natural logarithm of a positive rational in fixed point.
pub fn ln_fixed(x: &BigRational, bits: u32) -> Result<Fixed> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("logarithm of non-positive {x}")));
    }
    // x = 2^k y with 1 <= y < 2
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = BigRational::from_integer(BigInt::from(2));
    let mut y = x * pow2(-k);
    while y >= two {
        y /= &two;
        k += 1;
    }
    while y < BigRational::one() {
        y *= &two;
        k -= 1;
    }
    let one = BigRational::one();
    let z = (&y - &one) / (&y + &one);
    let ln_y = two_atanh(&z, bits);
    let ln2 = two_atanh(&BigRational::new(1.into(), 3.into()), bits);
    Ok(Fixed {
        mant: ln_y.mant + ln2.mant * BigInt::from(k),
        bits,
    })
}

fn pow2(k: i64) -> BigRational {
    if k >= 0 {
        BigRational::from_integer(BigInt::one() << k as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-k) as usize)
    }
}

fn euler_fixed(bits: u32) -> Fixed {
    let digits: BigInt = EULER_GAMMA_DIGITS.parse().expect("digits");
    let den = num_traits::pow(BigInt::from(10), EULER_GAMMA_DIGITS.len());
    Fixed::from_rational(&BigRational::new(digits, den), bits)
}

fn check_q(q: &BigRational) -> Result<()> {
    if !q.is_positive() || *q >= BigRational::one() {
        return Err(Error::Domain(format!("q must lie in (0, 1), got {q}")));
    }
    Ok(())
}

/// Value of `x` in fixed point with at least `precision` correct bits (up to rounding).
pub fn eval_fixed(x: &ConstExt, q: &BigRational, precision: u32) -> Result<Fixed> {
    check_q(q)?;
    if precision > MAX_PRECISION_BITS {
        return Err(Error::Domain(format!(
            "precision above {MAX_PRECISION_BITS} bits"
        )));
    }
    let bits = precision + GUARD_BITS;
    let sqrt_q = sqrt_fixed(q, bits);
    let needs_log = x.terms().any(|(&(i, _), _)| i != 0);
    let needs_euler = x.terms().any(|(&(_, j), _)| j != 0);
    let log = if needs_log {
        Some(ln_fixed(&q.recip(), bits)?)
    } else {
        None
    };
    let euler = needs_euler.then(|| euler_fixed(bits));
    let mut total = Fixed {
        mant: BigInt::zero(),
        bits,
    };
    for (&(i, j), c) in x.terms() {
        let (a, b) = c.split_at(q)?;
        let mut term = Fixed::from_rational(&a, bits).add(&sqrt_q.scale(&b));
        if i != 0 {
            term = term.mul(&log.as_ref().unwrap().powi(i)?);
        }
        if j != 0 {
            term = term.mul(&euler.as_ref().unwrap().powi(j as i32)?);
        }
        total = total.add(&term);
    }
    Ok(total)
}

/// Value of `x` at the exact rational `q`, with `L = ln(1/q)` and `EG = γ`.
///
/// `precision <= 53` evaluates in double precision; larger values go through [`eval_fixed`].
/// Poles at the specialization are detected exactly.
pub fn eval_numeric(x: &ConstExt, q: &BigRational, precision: u32) -> Result<f64> {
    check_q(q)?;
    if precision > 53 {
        return Ok(eval_fixed(x, q, precision)?.to_f64());
    }
    for (_, c) in x.terms() {
        if c.has_pole_at(q) {
            return Err(Error::Pole(format!("{c} at q = {q}")));
        }
    }
    Ok(x.eval_f64(q.to_f64().unwrap_or(f64::NAN)))
}

/// Convenience wrapper for a `QRat` at a double-precision `q` (converted exactly).
pub fn eval_qrat(x: &QRat, q: f64) -> Result<f64> {
    let qr = super::qrat::rational_from_f64(q)?;
    eval_numeric(&ConstExt::from_qrat(x.clone()), &qr, 53)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::qrat::{parse_rational, q_big, qnum};
    use crate::scalars::HalfInt;

    fn q(text: &str) -> BigRational {
        parse_rational(text).unwrap()
    }

    #[test]
    fn doubles_match_hand_values() {
        let v = eval_numeric(&qnum(HalfInt::from_int(2)).into(), &q("0.5"), 53).unwrap();
        assert!((v - 2.5).abs() < 1e-15);
        assert_eq!(eval_numeric(&ConstExt::one(), &q("0.3"), 53).unwrap(), 1.0);
        let v = eval_numeric(&q_big().into(), &q("0.5"), 53).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn fixed_point_log_and_sqrt() {
        let ln2 = ln_fixed(&q("2"), 200).unwrap();
        assert!(ln2
            .to_decimal(40)
            .starts_with("0.6931471805599453094172321214581765680755"));
        let ln10 = ln_fixed(&q("10"), 200).unwrap();
        assert!(ln10
            .to_decimal(30)
            .starts_with("2.302585092994045684017991454684"));
        let r = sqrt_fixed(&q("2"), 200);
        assert!(r
            .to_decimal(30)
            .starts_with("1.414213562373095048801688724209"));
    }

    #[test]
    fn high_precision_agrees_with_double() {
        let x = &(&ConstExt::log_q_inv() * &ConstExt::euler_gamma())
            + &ConstExt::from_qrat(QRat::s_pow(3));
        let lo = eval_numeric(&x, &q("0.3"), 53).unwrap();
        let hi = eval_numeric(&x, &q("0.3"), 200).unwrap();
        assert!((lo - hi).abs() < 1e-14);
        let fx = eval_fixed(&ConstExt::euler_gamma(), &q("0.5"), 200).unwrap();
        assert!(fx
            .to_decimal(45)
            .starts_with("0.577215664901532860606512090082402431042159"));
    }

    #[test]
    fn poles_and_domain_are_reported() {
        let pole = ConstExt::from_qrat(
            QRat::one()
                .checked_div(&(&QRat::one() - &QRat::q_pow(2)))
                .unwrap(),
        );
        assert!(eval_numeric(&pole, &q("0.5"), 53).is_ok());
        let x = ConstExt::from_qrat(
            QRat::one()
                .checked_div(&(&QRat::ratio(1, 4) - &QRat::q_pow(1)))
                .unwrap(),
        );
        assert!(matches!(
            eval_numeric(&x, &q("1/4"), 53),
            Err(Error::Pole(_))
        ));
        assert!(matches!(
            eval_numeric(&x, &q("1/4"), 100),
            Err(Error::Pole(_))
        ));
        assert!(matches!(
            eval_numeric(&ConstExt::one(), &q("1.5"), 53),
            Err(Error::Domain(_))
        ));
    }
}
