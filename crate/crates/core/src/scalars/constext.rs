use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::qrat::QRat;
use crate::error::{Error, Result};

/// Polynomial in `EG` and Laurent polynomial in `L` over [`QRat`].
///
/// `L` stands for `ln(1/q)` and `EG` for Euler's constant; both are treated as independent
/// transcendentals. Division is supported by nonzero `QRat` values and by powers of `L`, which
/// covers every quantity the residue cocycle produces.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ConstExt {
    /// `(L exponent, EG exponent) -> coefficient`, zero coefficients never stored.
    terms: BTreeMap<(i32, u32), QRat>,
}

impl ConstExt {
    pub fn zero() -> Self {
        ConstExt {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        ConstExt::from_qrat(QRat::one())
    }

    pub fn from_qrat(c: QRat) -> Self {
        ConstExt::monomial(0, 0, c)
    }

    /// `c * L^i * EG^j`.
    pub fn monomial(l_exp: i32, eg_exp: u32, c: QRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((l_exp, eg_exp), c);
        }
        ConstExt { terms }
    }

    /// The symbol `L = ln(1/q)`.
    pub fn log_q_inv() -> Self {
        ConstExt::monomial(1, 0, QRat::one())
    }

    /// The symbol `EG` (Euler's constant).
    pub fn euler_gamma() -> Self {
        ConstExt::monomial(0, 1, QRat::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.to_qrat().is_some_and(|c| c.is_one())
    }

    /// The value as a plain `QRat`, if neither symbol survives.
    pub fn to_qrat(&self) -> Option<QRat> {
        match self.terms.len() {
            0 => Some(QRat::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, u32), &QRat)> {
        self.terms.iter()
    }

    /// True if `L` or `EG` occurs with a nonzero coefficient.
    pub fn has_symbols(&self) -> bool {
        self.terms.keys().any(|&k| k != (0, 0))
    }

    fn insert(terms: &mut BTreeMap<(i32, u32), QRat>, key: (i32, u32), c: QRat) {
        if c.is_zero() {
            return;
        }
        match terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &QRat) -> Self {
        if c.is_zero() {
            return ConstExt::zero();
        }
        ConstExt {
            terms: self.terms.iter().map(|(k, x)| (*k, x * c)).collect(),
        }
    }

    pub fn div_qrat(&self, c: &QRat) -> Result<Self> {
        Ok(self.scale(&c.recip()?))
    }

    /// Multiply by `L^k`.
    pub fn mul_log_pow(&self, k: i32) -> Self {
        ConstExt {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), x)| ((i + k, j), x.clone()))
                .collect(),
        }
    }

    /// Division by a single monomial `c L^i` (the only non-`QRat` divisors supported).
    pub fn checked_div(&self, rhs: &ConstExt) -> Result<Self> {
        match rhs.terms.len() {
            0 => Err(Error::DivisionByZero),
            1 => {
                let (&(i, j), c) = rhs.terms.iter().next().unwrap();
                if j != 0 {
                    return Err(Error::Unsupported(
                        "division by the Euler constant symbol".into(),
                    ));
                }
                Ok(self.div_qrat(c)?.mul_log_pow(-i))
            }
            _ => Err(Error::Unsupported(format!(
                "division by the non-monomial {rhs}"
            ))),
        }
    }

    /// Numeric value at s = sqrt(q), L = ln(1/q), EG = Euler's constant, in double precision.
    pub fn eval_f64(&self, q: f64) -> f64 {
        let l = (1.0 / q).ln();
        self.terms
            .iter()
            .map(|(&(i, j), c)| {
                c.eval_f64(q) * l.powi(i) * super::numeric::EULER_GAMMA_F64.powi(j as i32)
            })
            .sum()
    }
}

impl Add for &ConstExt {
    type Output = ConstExt;
    fn add(self, rhs: &ConstExt) -> ConstExt {
        let mut terms = self.terms.clone();
        for (k, c) in &rhs.terms {
            ConstExt::insert(&mut terms, *k, c.clone());
        }
        ConstExt { terms }
    }
}

impl Neg for &ConstExt {
    type Output = ConstExt;
    fn neg(self) -> ConstExt {
        ConstExt {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Sub for &ConstExt {
    type Output = ConstExt;
    fn sub(self, rhs: &ConstExt) -> ConstExt {
        self + &(-rhs)
    }
}

impl Mul for &ConstExt {
    type Output = ConstExt;
    fn mul(self, rhs: &ConstExt) -> ConstExt {
        let mut terms = BTreeMap::new();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &rhs.terms {
                ConstExt::insert(&mut terms, (i1 + i2, j1 + j2), c1 * c2);
            }
        }
        ConstExt { terms }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ConstExt {
            type Output = ConstExt;
            fn $m(self, rhs: ConstExt) -> ConstExt {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ConstExt {
    type Output = ConstExt;
    fn neg(self) -> ConstExt {
        -&self
    }
}

impl From<QRat> for ConstExt {
    fn from(c: QRat) -> Self {
        ConstExt::from_qrat(c)
    }
}

fn fmt_symbols(i: i32, j: u32) -> String {
    let mut parts = Vec::new();
    match i {
        0 => {}
        1 => parts.push("L".to_string()),
        _ => parts.push(format!("L^{i}")),
    }
    match j {
        0 => {}
        1 => parts.push("EG".to_string()),
        _ => parts.push(format!("EG^{j}")),
    }
    parts.join("*")
}

impl fmt::Display for ConstExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (&(i, j), c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            let sym = fmt_symbols(i, j);
            match (sym.is_empty(), self.terms.len()) {
                (true, 1) => write!(f, "{c}")?,
                (true, _) => write!(f, "({c})")?,
                (false, _) => write!(f, "({c})*{sym}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ConstExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConstExt({self})")
    }
}

impl FromStr for ConstExt {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        crate::text::parse_as::<ConstExt>(text)
    }
}

impl Serialize for ConstExt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ConstExt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbols_cancel_exactly() {
        let l = ConstExt::log_q_inv();
        let g = ConstExt::euler_gamma();
        let x = &(&l * &g) + &ConstExt::from_qrat(QRat::q_pow(1));
        let y = &x - &(&g * &l);
        assert_eq!(y.to_qrat().unwrap(), QRat::q_pow(1));
        assert!(!y.has_symbols());
        assert!(x.has_symbols());
    }

    #[test]
    fn division_by_log_monomial() {
        let l = ConstExt::log_q_inv();
        let two_l = l.scale(&QRat::from_int(2));
        let x = ConstExt::one().checked_div(&two_l).unwrap();
        assert_eq!((&x * &l).to_qrat().unwrap(), QRat::ratio(1, 2));
        assert!(ConstExt::one()
            .checked_div(&(&l + &ConstExt::one()))
            .is_err());
    }

    #[test]
    fn float_value_uses_log_and_euler() {
        let x = &ConstExt::log_q_inv() + &ConstExt::euler_gamma();
        assert!((x.eval_f64(0.5) - (2f64.ln() + 0.5772156649015329)).abs() < 1e-15);
    }
}
