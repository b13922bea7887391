use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use super::monomial::{haar_monomial, monomial_product, star_monomial, Monomial};
use crate::error::{Error, Result};
use crate::scalars::{Coeff, ConstExt, QRat, RadScalar};
use crate::text::{Symbol, TextRing};

/// Finite linear combination of normal-form monomials.
#[derive(Clone, PartialEq)]
pub struct Element<C: Coeff> {
    terms: BTreeMap<Monomial, C>,
}

/// Elements with exact rational-function coefficients.
pub type AlgebraElement = Element<QRat>;

impl<C: Coeff> Default for Element<C> {
    fn default() -> Self {
        Element::zero()
    }
}

impl<C: Coeff> Element<C> {
    pub fn zero() -> Self {
        Element {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Element::scalar(C::one())
    }

    pub fn scalar(c: C) -> Self {
        Element::term(Monomial::ONE, c)
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Element { terms }
    }

    pub fn monomial(m: Monomial) -> Self {
        Element::term(m, C::one())
    }

    pub fn a() -> Self {
        Element::monomial(Monomial::A)
    }

    pub fn b() -> Self {
        Element::monomial(Monomial::B)
    }

    pub fn c() -> Self {
        Element::monomial(Monomial::C)
    }

    pub fn d() -> Self {
        Element::monomial(Monomial::D)
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(items: I) -> Self {
        let mut e = Element::zero();
        for (m, c) in items {
            e.add_term(m, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Maximal monomial degree (0 for scalars and for zero).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Element<C>, factor: &C) {
        for (m, c) in &other.terms {
            self.add_term(*m, c.mul(factor));
        }
    }

    pub fn scale(&self, c: &QRat) -> Self {
        if c.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self.terms.iter().map(|(m, x)| (*m, x.scale(c))).collect(),
        }
    }

    pub fn scale_coeff(&self, c: &C) -> Self {
        if c.is_zero() {
            return Element::zero();
        }
        Element::from_terms(self.terms.iter().map(|(m, x)| (*m, x.mul(c))))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Element<D> {
        Element::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// Scale each monomial by a `QRat` depending only on the monomial.
    pub fn map_monomials(&self, f: impl Fn(Monomial) -> QRat) -> Self {
        Element::from_terms(self.terms.iter().map(|(m, c)| (*m, c.scale(&f(*m)))))
    }

    pub fn to_qrat_element(&self) -> Option<Element<QRat>> {
        let mut out = Element::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, c.to_qrat()?);
        }
        Some(out)
    }

    /// The scalar value if `self` has no monomial other than 1.
    pub fn as_scalar(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    pub fn mul_ref(&self, rhs: &Element<C>) -> Element<C> {
        let mut out = Element::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let c = c1.mul(c2);
                for (m, k) in monomial_product(*m1, *m2) {
                    out.add_term(m, c.scale(&k));
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Element<C> {
        let mut acc = Element::one();
        for _ in 0..e {
            acc = acc.mul_ref(self);
        }
        acc
    }

    /// Antimultiplicative involution with `a* = d`, `b* = -q c`; coefficients are real.
    pub fn star(&self) -> Element<C> {
        Element::from_terms(self.terms.iter().map(|(m, c)| {
            let (m2, k) = star_monomial(*m);
            (m2, c.scale(&k))
        }))
    }

    /// Counit: the coefficient sum over monomials free of `b` and `c`.
    pub fn counit(&self) -> C {
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            if m.b == 0 && m.c == 0 {
                acc = acc.add(c);
            }
        }
        acc
    }

    /// Haar state.
    pub fn haar(&self) -> C {
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let h = haar_monomial(*m);
            if !h.is_zero() {
                acc = acc.add(&c.scale(&h));
            }
        }
        acc
    }

    /// Modular automorphism: `A[m,n]` scaled by `q^{m+n}`.
    pub fn theta(&self) -> Element<C> {
        self.theta_pow(1)
    }

    pub fn theta_inv(&self) -> Element<C> {
        self.theta_pow(-1)
    }

    /// `ϑ^k`.
    pub fn theta_pow(&self, k: i64) -> Element<C> {
        self.map_monomials(|m| {
            let (p, n) = m.bigrade();
            QRat::q_pow(k * (p + n))
        })
    }

    /// Component in the bigraded block `A[m,n]`.
    pub fn component(&self, m: i64, n: i64) -> Element<C> {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(mono, _)| mono.bigrade() == (m, n))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Bigrades occurring in `self`, sorted.
    pub fn bigrades(&self) -> Vec<(i64, i64)> {
        let mut v: Vec<(i64, i64)> = self.terms.keys().map(|m| m.bigrade()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// The common bigrade if `self` is homogeneous and nonzero.
    pub fn homogeneous_bigrade(&self) -> Option<(i64, i64)> {
        let g = self.bigrades();
        (g.len() == 1).then(|| g[0])
    }

    /// True if every term lies in the Podleś subalgebra `B = ⊕_m A[m,0]`.
    pub fn in_podles(&self) -> bool {
        self.terms.keys().all(|m| m.bigrade().1 == 0)
    }

    pub fn eval_coeffs(&self, q: f64) -> Vec<(Monomial, f64)> {
        self.terms
            .iter()
            .map(|(m, c)| (*m, c.eval_f64(q)))
            .collect()
    }
}

impl Element<QRat> {
    pub fn to_rad(&self) -> Element<RadScalar> {
        self.map_coeffs(|c| RadScalar::from_qrat(c.clone()))
    }

    pub fn to_ext(&self) -> Element<ConstExt> {
        self.map_coeffs(|c| ConstExt::from_qrat(c.clone()))
    }
}

impl<C: Coeff> Add for &Element<C> {
    type Output = Element<C>;
    fn add(self, rhs: &Element<C>) -> Element<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &Element<C> {
    type Output = Element<C>;
    fn sub(self, rhs: &Element<C>) -> Element<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.neg());
        }
        out
    }
}

impl<C: Coeff> Neg for &Element<C> {
    type Output = Element<C>;
    fn neg(self) -> Element<C> {
        Element {
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }
}

impl<C: Coeff> Mul for &Element<C> {
    type Output = Element<C>;
    fn mul(self, rhs: &Element<C>) -> Element<C> {
        self.mul_ref(rhs)
    }
}

impl<C: Coeff> Add for Element<C> {
    type Output = Element<C>;
    fn add(self, rhs: Element<C>) -> Element<C> {
        &self + &rhs
    }
}

impl<C: Coeff> Sub for Element<C> {
    type Output = Element<C>;
    fn sub(self, rhs: Element<C>) -> Element<C> {
        &self - &rhs
    }
}

impl<C: Coeff> Mul for Element<C> {
    type Output = Element<C>;
    fn mul(self, rhs: Element<C>) -> Element<C> {
        &self * &rhs
    }
}

impl<C: Coeff> Neg for Element<C> {
    type Output = Element<C>;
    fn neg(self) -> Element<C> {
        -&self
    }
}

impl<C: Coeff> fmt::Display for Element<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let one = c.to_qrat().is_some_and(|x| x.is_one());
            match (m.is_one(), one) {
                (true, _) => write!(f, "({c})")?,
                (false, true) => write!(f, "{m}")?,
                (false, false) => write!(f, "({c})*{m}")?,
            }
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for Element<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({self})")
    }
}

impl<C: Coeff + TextRing> TextRing for Element<C> {
    fn from_rational(c: BigRational) -> Self {
        Element::scalar(C::from_rational(c))
    }
    fn symbol(sym: Symbol) -> Result<Self> {
        Ok(match sym {
            Symbol::A => Element::a(),
            Symbol::B => Element::b(),
            Symbol::C => Element::c(),
            Symbol::D => Element::d(),
            other => Element::scalar(C::symbol(other)?),
        })
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
    fn div(&self, other: &Self) -> Result<Self> {
        let s = other
            .as_scalar()
            .ok_or_else(|| Error::Parse("division by a non-scalar algebra element".into()))?;
        let inv = TextRing::div(&C::from_rational(BigRational::from_integer(1.into())), &s)?;
        Ok(self.scale_coeff(&inv))
    }
    fn fractional_pow(&self, e: &BigRational) -> Result<Self> {
        let s = self.as_scalar().ok_or_else(|| {
            Error::Parse("fractional power of a non-scalar algebra element".into())
        })?;
        Ok(Element::scalar(s.fractional_pow(e)?))
    }
    fn sqrt(&self) -> Result<Self> {
        let s = self
            .as_scalar()
            .ok_or_else(|| Error::Parse("square root of an algebra element".into()))?;
        Ok(Element::scalar(s.sqrt()?))
    }
}

impl<C: Coeff + TextRing> std::str::FromStr for Element<C> {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        crate::text::parse_as::<Element<C>>(text)
    }
}

impl<C: Coeff> serde::Serialize for Element<C> {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de, C: Coeff + TextRing> serde::Deserialize<'de> for Element<C> {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse an algebra element with `QRat` coefficients, panicking on malformed input.
pub fn el(text: &str) -> AlgebraElement {
    text.parse()
        .unwrap_or_else(|e| panic!("bad element {text:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::qr;

    #[test]
    fn relations_hold() {
        assert_eq!(el("a d"), el("1 + q b c"));
        assert_eq!(el("d a"), el("1 + q^-1 b c"));
        assert_eq!(el("b a"), el("q^-1 a b"));
        assert_eq!(el("c a"), el("q^-1 a c"));
        assert_eq!(el("d b"), el("q^-1 b d"));
        assert_eq!(el("d c"), el("q^-1 c d"));
        assert_eq!(el("c b"), el("b c"));
        assert_eq!(&el("1") * &el("a + b"), el("a + b"));
    }

    #[test]
    fn star_counit_haar_theta() {
        assert_eq!(el("a").star(), el("d"));
        assert_eq!(el("b").star(), el("-q c"));
        assert_eq!(el("a b").star(), el("-q c d"));
        assert_eq!(el("a b").star(), &el("b").star() * &el("a").star());
        assert_eq!(el("a").counit(), QRat::one());
        assert!(el("b c").counit().is_zero());
        assert_eq!(el("b c").haar(), qr("(-q + q^3)/(1 - q^4)"));
        assert!(el("a").haar().is_zero());
        assert_eq!(el("a").theta(), el("q^2 a"));
        assert_eq!(el("d").theta(), el("q^-2 d"));
        assert_eq!(el("b c").theta(), el("b c"));
    }

    #[test]
    fn display_round_trip() {
        let x = el("(q + 1/2) a^2 b - 3 c d^2 + q^(1/2)");
        let back: AlgebraElement = x.to_string().parse().unwrap();
        assert_eq!(x, back);
        assert_eq!(x.bigrades(), vec![(-3, -1), (0, 0), (3, 1)]);
    }
}
