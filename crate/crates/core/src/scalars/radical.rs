use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::Poly;
use super::qrat::QRat;
use crate::error::{Error, Result};

/// Canonical square-free radicand `k * s^e * P(s)` with `e ∈ {0,1}`.
///
/// `k` is a square-free nonzero integer (up to the trial-division bound used when it was
/// produced), `P` a primitive square-free integer polynomial with `P(0) > 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Radicand {
    int: BigInt,
    s_odd: bool,
    poly: Poly,
}

impl Radicand {
    pub fn one() -> Self {
        Radicand {
            int: BigInt::one(),
            s_odd: false,
            poly: Poly::one(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.int.is_one() && !self.s_odd && self.poly.is_one()
    }

    /// The radicand itself as a rational function.
    pub fn value(&self) -> QRat {
        let base =
            QRat::from_parts(i64::from(self.s_odd), self.poly.clone(), Poly::one()).expect("den 1");
        base.scale_rational(&BigRational::from_integer(self.int.clone()))
    }

    pub fn eval_f64(&self, q: f64) -> f64 {
        self.value().eval_f64(q)
    }

    /// `sqrt(self) * sqrt(other) = coeff * sqrt(product)`.
    fn mul(&self, other: &Radicand) -> (QRat, Radicand) {
        let mut coeff = QRat::one();
        let g = self.int.abs().gcd(&other.int.abs());
        let int = (&self.int / &g) * (&other.int / &g);
        let mut gc = BigRational::from_integer(g);
        if self.int.is_negative() && other.int.is_negative() {
            gc = -gc;
        }
        coeff = coeff.scale_rational(&gc);
        if self.s_odd && other.s_odd {
            coeff = coeff.mul_s_pow(1);
        }
        let s_odd = self.s_odd ^ other.s_odd;
        let poly = if self.poly.is_one() {
            other.poly.clone()
        } else if other.poly.is_one() {
            self.poly.clone()
        } else {
            let (_, gp) = self.poly.gcd(&other.poly).primitive_part();
            if gp.is_one() {
                &self.poly * &other.poly
            } else {
                coeff = &coeff * &QRat::from_parts(0, gp.clone(), Poly::one()).expect("den 1");
                &self.poly.exact_div(&gp) * &other.poly.exact_div(&gp)
            }
        };
        (coeff, Radicand { int, s_odd, poly })
    }
}

impl Ord for Radicand {
    fn cmp(&self, other: &Self) -> Ordering {
        self.poly
            .canonical_cmp(&other.poly)
            .then_with(|| self.s_odd.cmp(&other.s_odd))
            .then_with(|| self.int.abs().cmp(&other.int.abs()))
            .then_with(|| self.int.cmp(&other.int))
    }
}

impl PartialOrd for Radicand {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Radicand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.value();
        write!(f, "sqrt({v})")
    }
}

impl fmt::Debug for Radicand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

const TRIAL_BOUND: u64 = 100_000;

/// `n = m^2 * k` with `k` square-free as far as trial division up to a fixed bound can tell.
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(n.is_positive());
    let mut rest = n.clone();
    let mut m = BigInt::one();
    let mut k = BigInt::one();
    let mut p = 2u64;
    while p <= TRIAL_BOUND {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        m *= num_traits::pow(bp.clone(), (e / 2) as usize);
        if e % 2 == 1 {
            k *= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        m *= r;
    } else {
        k *= rest;
    }
    (m, k)
}

/// `sqrt(x) = coeff * sqrt(radicand)` with the radicand canonical.
pub fn canonical_sqrt(x: &QRat) -> Result<(QRat, Radicand)> {
    if x.is_zero() {
        return Ok((QRat::zero(), Radicand::one()));
    }
    // sqrt(s^e N/D) = s^{e div 2} sqrt(s^{e mod 2} N D) / D
    let half = x.shift().div_euclid(2);
    let s_odd = x.shift().rem_euclid(2) == 1;
    let nd = x.numer() * x.denom();
    let (c, parts) = nd.square_free();
    let mut outside = Poly::one();
    let mut inside = Poly::one();
    let mut content = c;
    for (f, mult) in parts {
        let (cf, pf) = f.primitive_part();
        content *= num_traits::pow(cf, mult as usize);
        for _ in 0..mult / 2 {
            outside = &outside * &pf;
        }
        if mult % 2 == 1 {
            inside = &inside * &pf;
        }
    }
    // content = ±N/D with sqrt(N/D) = sqrt(N D)/D
    let sign = if content.is_negative() { -1 } else { 1 };
    let nd_int = content.numer().abs() * content.denom();
    let (m, k) = split_square(&nd_int);
    let int_coeff = BigRational::new(m, content.denom().clone());
    let coeff = QRat::from_parts(half, outside, x.denom().clone())?.scale_rational(&int_coeff);
    Ok((
        coeff,
        Radicand {
            int: k * BigInt::from(sign),
            s_odd,
            poly: inside,
        },
    ))
}

/// Formal sum `Σ c_f sqrt(f)` over canonical radicands.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RadScalar {
    terms: BTreeMap<Radicand, QRat>,
}

impl RadScalar {
    pub fn zero() -> Self {
        RadScalar {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        RadScalar::from_qrat(QRat::one())
    }

    pub fn from_qrat(c: QRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Radicand::one(), c);
        }
        RadScalar { terms }
    }

    /// `sqrt(x)`, canonicalized.
    pub fn sqrt(x: &QRat) -> Result<Self> {
        let (c, r) = canonical_sqrt(x)?;
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(r, c);
        }
        Ok(RadScalar { terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.to_qrat().is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Radicand, &QRat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational part, if no genuine radical occurs.
    pub fn to_qrat(&self) -> Option<QRat> {
        match self.terms.len() {
            0 => Some(QRat::zero()),
            1 => {
                let (r, c) = self.terms.iter().next().unwrap();
                r.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    fn insert(terms: &mut BTreeMap<Radicand, QRat>, r: Radicand, c: QRat) {
        if c.is_zero() {
            return;
        }
        match terms.entry(r) {
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
            return RadScalar::zero();
        }
        RadScalar {
            terms: self.terms.iter().map(|(r, x)| (r.clone(), x * c)).collect(),
        }
    }

    /// Inverse of a single-term scalar `c sqrt(f) -> sqrt(f) / (c f)`.
    pub fn recip(&self) -> Result<Self> {
        match self.terms.len() {
            0 => Err(Error::DivisionByZero),
            1 => {
                let (r, c) = self.terms.iter().next().unwrap();
                let inv = (c * &r.value()).recip()?;
                let mut terms = BTreeMap::new();
                terms.insert(r.clone(), inv);
                Ok(RadScalar { terms })
            }
            _ => Err(Error::Unsupported(
                "inverse of a sum of distinct radicals".into(),
            )),
        }
    }

    pub fn eval_f64(&self, q: f64) -> f64 {
        self.terms
            .iter()
            .map(|(r, c)| c.eval_f64(q) * r.eval_f64(q).sqrt())
            .sum()
    }

    /// Square of `self`; equals a `QRat` whenever `self` is a single radical term.
    pub fn square(&self) -> RadScalar {
        self * self
    }
}

impl Add for &RadScalar {
    type Output = RadScalar;
    fn add(self, rhs: &RadScalar) -> RadScalar {
        let mut terms = self.terms.clone();
        for (r, c) in &rhs.terms {
            RadScalar::insert(&mut terms, r.clone(), c.clone());
        }
        RadScalar { terms }
    }
}

impl Neg for &RadScalar {
    type Output = RadScalar;
    fn neg(self) -> RadScalar {
        RadScalar {
            terms: self.terms.iter().map(|(r, c)| (r.clone(), -c)).collect(),
        }
    }
}

impl Sub for &RadScalar {
    type Output = RadScalar;
    fn sub(self, rhs: &RadScalar) -> RadScalar {
        self + &(-rhs)
    }
}

impl Mul for &RadScalar {
    type Output = RadScalar;
    fn mul(self, rhs: &RadScalar) -> RadScalar {
        let mut terms = BTreeMap::new();
        for (r1, c1) in &self.terms {
            for (r2, c2) in &rhs.terms {
                let c = c1 * c2;
                if r1.is_one() {
                    RadScalar::insert(&mut terms, r2.clone(), c);
                } else if r2.is_one() {
                    RadScalar::insert(&mut terms, r1.clone(), c);
                } else {
                    let (k, r) = r1.mul(r2);
                    RadScalar::insert(&mut terms, r, &c * &k);
                }
            }
        }
        RadScalar { terms }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RadScalar {
            type Output = RadScalar;
            fn $m(self, rhs: RadScalar) -> RadScalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RadScalar {
    type Output = RadScalar;
    fn neg(self) -> RadScalar {
        -&self
    }
}

impl From<QRat> for RadScalar {
    fn from(c: QRat) -> Self {
        RadScalar::from_qrat(c)
    }
}

impl fmt::Display for RadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (r, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if r.is_one() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{r}")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for RadScalar {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        crate::text::parse_as::<RadScalar>(text)
    }
}

impl fmt::Debug for RadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadScalar({self})")
    }
}
