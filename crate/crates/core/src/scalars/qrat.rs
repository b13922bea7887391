use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::halfint::HalfInt;
use super::poly::Poly;
use crate::error::{Error, Result};

/// Rational function in `s = q^{1/2}` with rational coefficients.
///
/// Stored as `s^shift * num(s) / den(s)` where `num(0) != 0`, `den(0) = 1` and the two
/// polynomials are coprime. Zero is `shift = 0, num = 0, den = 1`. With this normalization
/// structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QRat {
    shift: i64,
    num: Poly,
    den: Poly,
}

impl QRat {
    pub fn zero() -> Self {
        QRat {
            shift: 0,
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        QRat::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        QRat::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(c: BigRational) -> Self {
        QRat {
            shift: 0,
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        QRat::from_rational(BigRational::new(n.into(), d.into()))
    }

    /// `s^k = q^{k/2}`.
    pub fn s_pow(k: i64) -> Self {
        QRat {
            shift: k,
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    /// `q^k`.
    pub fn q_pow(k: i64) -> Self {
        QRat::s_pow(2 * k)
    }

    /// `q^h` for a half-integer `h`.
    pub fn q_pow_half(h: HalfInt) -> Self {
        QRat::s_pow(h.twice())
    }

    /// `c * s^k`.
    pub fn s_monomial(k: i64, c: BigRational) -> Self {
        if c.is_zero() {
            return QRat::zero();
        }
        QRat {
            shift: k,
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    /// `s^shift * num / den`, normalized.
    pub fn from_parts(shift: i64, num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QRat::normalize(shift, num, den))
    }

    /// Laurent polynomial `Σ c_k s^k` from `(k, c_k)` pairs.
    pub fn from_s_laurent<I: IntoIterator<Item = (i64, BigRational)>>(terms: I) -> Self {
        let terms: Vec<(i64, BigRational)> =
            terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let Some(low) = terms.iter().map(|(k, _)| *k).min() else {
            return QRat::zero();
        };
        let high = terms.iter().map(|(k, _)| *k).max().unwrap();
        let mut coeffs = vec![BigRational::zero(); (high - low + 1) as usize];
        for (k, c) in terms {
            coeffs[(k - low) as usize] += c;
        }
        QRat::normalize(low, Poly::from_coeffs(coeffs), Poly::one())
    }

    fn normalize(mut shift: i64, mut num: Poly, mut den: Poly) -> Self {
        if num.is_zero() {
            return QRat::zero();
        }
        let vn = num.valuation();
        let vd = den.valuation();
        if vn > 0 {
            num = num.shift_down(vn);
        }
        if vd > 0 {
            den = den.shift_down(vd);
        }
        shift += vn as i64 - vd as i64;
        if !den.is_constant() {
            let g = num.gcd(&den);
            if !g.is_constant() {
                num = num.exact_div(&g);
                den = den.exact_div(&g);
            }
        }
        let c0 = den.coeff(0);
        if !c0.is_one() {
            let inv = c0.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        QRat { shift, num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.num.is_one() && self.den.is_one()
    }

    /// True if the denominator is 1, i.e. the value is a Laurent polynomial in `s`.
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    /// The rational constant, if `self` is one.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        (self.shift == 0 && self.num.is_constant() && self.den.is_one()).then(|| self.num.coeff(0))
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    /// `(k, c_k)` terms of a Laurent polynomial in `s`; `None` if there is a denominator.
    pub fn s_laurent_terms(&self) -> Option<Vec<(i64, BigRational)>> {
        self.is_laurent().then(|| {
            self.num
                .terms()
                .map(|(k, c)| (self.shift + k as i64, c.clone()))
                .collect()
        })
    }

    /// True if `self` is invariant under `s -> -s`, so it is a function of `q` alone.
    pub fn is_q_rational(&self) -> bool {
        let parity_ok =
            |p: &Poly, off: i64| p.terms().all(|(k, _)| (k as i64 + off).rem_euclid(2) == 0);
        self.is_zero() || (parity_ok(&self.num, self.shift) && parity_ok(&self.den, 0))
    }

    /// Multiply by `s^k`.
    pub fn mul_s_pow(&self, k: i64) -> Self {
        if self.is_zero() {
            return QRat::zero();
        }
        QRat {
            shift: self.shift + k,
            num: self.num.clone(),
            den: self.den.clone(),
        }
    }

    pub fn scale_rational(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return QRat::zero();
        }
        QRat {
            shift: self.shift,
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QRat::normalize(
            -self.shift,
            self.den.clone(),
            self.num.clone(),
        ))
    }

    pub fn checked_div(&self, rhs: &QRat) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.recip()?.pow(-e);
        }
        let mut base = self.clone();
        let mut acc = QRat::one();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// The substitution `s -> -s`.
    pub fn reflect_s(&self) -> Self {
        let sign = if self.shift.rem_euclid(2) == 1 {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        QRat::normalize(
            self.shift,
            self.num.reflect().scale(&sign),
            self.den.reflect(),
        )
    }

    /// Value at `s = sqrt(q)` in double precision, ignoring poles.
    pub fn eval_f64(&self, q: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let s = q.sqrt();
        s.powi(self.shift as i32) * self.num.eval_f64(s) / self.den.eval_f64(s)
    }

    /// True if the denominator vanishes at `s = sqrt(q)` for the exact rational `q > 0`.
    pub fn has_pole_at(&self, q: &BigRational) -> bool {
        poly_vanishes_at_sqrt(&self.den, q)
    }

    /// Exact value at a rational `q` in the form `(A, B)` meaning `A + B*sqrt(q)`.
    pub fn split_at(&self, q: &BigRational) -> Result<(BigRational, BigRational)> {
        if self.is_zero() {
            return Ok((BigRational::zero(), BigRational::zero()));
        }
        if self.has_pole_at(q) {
            return Err(Error::Pole(format!("{self} at q = {q}")));
        }
        let (n_a, n_b) = eval_split(&self.num, q);
        let (d_a, d_b) = eval_split(&self.den, q);
        // (na + nb r)/(da + db r) with r = sqrt(q)
        let norm = &d_a * &d_a - &d_b * &d_b * q;
        let (mut a, mut b) = if norm.is_zero() {
            // sqrt(q) is rational; evaluate directly
            let r = rational_sqrt(q).expect("rational square root");
            ((&n_a + &n_b * &r) / (&d_a + &d_b * &r), BigRational::zero())
        } else {
            let a = (&n_a * &d_a - &n_b * &d_b * q) / &norm;
            let b = (&n_b * &d_a - &n_a * &d_b) / &norm;
            (a, b)
        };
        // s^shift = q^{shift div 2} * sqrt(q)^{shift mod 2}
        let half = self.shift.div_euclid(2);
        let qh = rat_pow(q, half);
        a *= &qh;
        b *= &qh;
        if self.shift.rem_euclid(2) == 1 {
            let na = &b * q;
            b = a;
            a = na;
        }
        Ok((a, b))
    }
}

fn rat_pow(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// `p(sqrt(q)) = E(q) + sqrt(q) O(q)`.
fn eval_split(p: &Poly, q: &BigRational) -> (BigRational, BigRational) {
    let (e, o) = p.even_odd();
    (e.eval_rational(q), o.eval_rational(q))
}

/// Exact square root of a non-negative rational, if it is rational.
pub fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| BigRational::new(n, d))
}

fn poly_vanishes_at_sqrt(p: &Poly, q: &BigRational) -> bool {
    if let Some(r) = rational_sqrt(q) {
        return p.eval_rational(&r).is_zero();
    }
    let (e, o) = eval_split(p, q);
    e.is_zero() && o.is_zero()
}

impl Default for QRat {
    fn default() -> Self {
        QRat::zero()
    }
}

impl From<i64> for QRat {
    fn from(n: i64) -> Self {
        QRat::from_int(n)
    }
}

impl From<BigRational> for QRat {
    fn from(c: BigRational) -> Self {
        QRat::from_rational(c)
    }
}

impl Add for &QRat {
    type Output = QRat;
    fn add(self, rhs: &QRat) -> QRat {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.shift.min(rhs.shift);
        let lhs_up = (self.shift - e) as usize;
        let rhs_up = (rhs.shift - e) as usize;
        if self.den == rhs.den {
            let num = &self.num.shift_up(lhs_up) + &rhs.num.shift_up(rhs_up);
            if self.den.is_one() {
                return QRat::normalize(e, num, Poly::one());
            }
            return QRat::normalize(e, num, self.den.clone());
        }
        let num =
            &(&self.num * &rhs.den).shift_up(lhs_up) + &(&rhs.num * &self.den).shift_up(rhs_up);
        QRat::normalize(e, num, &self.den * &rhs.den)
    }
}

impl Neg for &QRat {
    type Output = QRat;
    fn neg(self) -> QRat {
        QRat {
            shift: self.shift,
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for &QRat {
    type Output = QRat;
    fn sub(self, rhs: &QRat) -> QRat {
        self + &(-rhs)
    }
}

impl Mul for &QRat {
    type Output = QRat;
    fn mul(self, rhs: &QRat) -> QRat {
        if self.is_zero() || rhs.is_zero() {
            return QRat::zero();
        }
        let shift = self.shift + rhs.shift;
        if self.den.is_one() && rhs.den.is_one() {
            return QRat {
                shift,
                num: &self.num * &rhs.num,
                den: Poly::one(),
            };
        }
        // cross-cancel so the result is already coprime
        let g1 = if rhs.den.is_constant() {
            Poly::one()
        } else {
            self.num.gcd(&rhs.den)
        };
        let g2 = if self.den.is_constant() {
            Poly::one()
        } else {
            rhs.num.gcd(&self.den)
        };
        let n1 = if g1.is_constant() {
            self.num.clone()
        } else {
            self.num.exact_div(&g1)
        };
        let d2 = if g1.is_constant() {
            rhs.den.clone()
        } else {
            rhs.den.exact_div(&g1)
        };
        let n2 = if g2.is_constant() {
            rhs.num.clone()
        } else {
            rhs.num.exact_div(&g2)
        };
        let d1 = if g2.is_constant() {
            self.den.clone()
        } else {
            self.den.exact_div(&g2)
        };
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let c0 = den.coeff(0);
        if c0.is_one() {
            QRat { shift, num, den }
        } else {
            let inv = c0.recip();
            QRat {
                shift,
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QRat {
            type Output = QRat;
            fn $m(self, rhs: QRat) -> QRat {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QRat> for QRat {
            type Output = QRat;
            fn $m(self, rhs: &QRat) -> QRat {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QRat {
    type Output = QRat;
    fn neg(self) -> QRat {
        -&self
    }
}

impl Div for &QRat {
    type Output = QRat;
    /// Panics on division by zero; use [`QRat::checked_div`] for a fallible version.
    fn div(self, rhs: &QRat) -> QRat {
        self.checked_div(rhs).expect("QRat division by zero")
    }
}

impl Div for QRat {
    type Output = QRat;
    fn div(self, rhs: QRat) -> QRat {
        &self / &rhs
    }
}

/// `[a]_q = (q^{-a} - q^a)/(q^{-1} - q)`, reduced.
pub fn qnum(a: HalfInt) -> QRat {
    let k = a.twice();
    if k == 0 {
        return QRat::zero();
    }
    if a.is_integral() {
        // q^{-(n-1)} + q^{-(n-3)} + ... + q^{n-1}, with sign for negative n
        let n = k / 2;
        let sign = if n < 0 { -1 } else { 1 };
        let m = n.abs();
        return QRat::from_s_laurent((0..m).map(|j| {
            (
                2 * (-(m - 1) + 2 * j),
                BigRational::from_integer(sign.into()),
            )
        }));
    }
    let num = &QRat::s_pow(-k) - &QRat::s_pow(k);
    let den = &QRat::s_pow(-2) - &QRat::s_pow(2);
    num.checked_div(&den).expect("non-zero denominator")
}

/// `Q = (q^{-1} - q)^{-1}`.
pub fn q_big() -> QRat {
    (&QRat::q_pow(-1) - &QRat::q_pow(1))
        .recip()
        .expect("non-zero")
}

fn fmt_s_power(k: i64) -> String {
    if k % 2 == 0 {
        match k / 2 {
            0 => String::new(),
            1 => "q".to_string(),
            e => format!("q^{e}"),
        }
    } else {
        format!("q^({k}/2)")
    }
}

fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Terms `c * s^k` rendered as a sum in powers of `q`, ascending.
pub(crate) fn fmt_s_terms(terms: &[(i64, BigRational)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (k, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        let pw = fmt_s_power(*k);
        let body = if pw.is_empty() {
            fmt_rational(&mag)
        } else if mag.is_one() {
            pw
        } else {
            format!("{}*{}", fmt_rational(&mag), pw)
        };
        match (i, neg) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out
}

fn poly_terms(p: &Poly, shift: i64) -> Vec<(i64, BigRational)> {
    p.terms()
        .map(|(k, c)| (k as i64 + shift, c.clone()))
        .collect()
}

fn is_atomic(terms: &[(i64, BigRational)]) -> bool {
    terms.len() == 1 && {
        let (k, c) = &terms[0];
        (*k == 0 && c.is_integer() && !c.is_negative()) || (c.is_one() && k % 2 == 0)
    }
}

impl fmt::Display for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return f.write_str(&fmt_s_terms(&poly_terms(&self.num, self.shift)));
        }
        let (nt, dt) = if self.shift >= 0 {
            (poly_terms(&self.num, self.shift), poly_terms(&self.den, 0))
        } else {
            (poly_terms(&self.num, 0), poly_terms(&self.den, -self.shift))
        };
        let n = fmt_s_terms(&nt);
        let d = fmt_s_terms(&dt);
        if nt.len() > 1 {
            write!(f, "({n})")?;
        } else {
            f.write_str(&n)?;
        }
        if is_atomic(&dt) {
            write!(f, "/{d}")
        } else {
            write!(f, "/({d})")
        }
    }
}

impl fmt::Debug for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QRat({self})")
    }
}

impl FromStr for QRat {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        crate::text::parse_as::<QRat>(text)
    }
}

impl Serialize for QRat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QRat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Rational approximation helper: exact binary value of a finite double.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("not a finite number: {x}")))
}

/// Parse a decimal or fraction literal such as `"0.5"`, `"-3/7"`, `"1e-3"` exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0")
        .parse()
        .map_err(|_| bad())?;
    let scale = frac_part.len() as i64 + 1 - exp;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut value = BigRational::from_integer(digits) * rat_pow(&ten, -scale);
    if neg {
        value = -value;
    }
    Ok(value)
}

impl QRat {
    /// Double-precision value with an exact pole check at the rational `q`.
    pub fn eval_checked(&self, q: &BigRational) -> Result<f64> {
        if self.has_pole_at(q) {
            return Err(Error::Pole(format!("{self} at q = {q}")));
        }
        Ok(self.eval_f64(q.to_f64().unwrap_or(f64::NAN)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn normalization_is_canonical() {
        let x = &QRat::q_pow(1) + &QRat::one();
        assert!((&x - &x).is_zero());
        assert_eq!(&x * &x.recip().unwrap(), QRat::one());
        let y = (&QRat::one() - &QRat::q_pow(2))
            .checked_div(&(&QRat::one() - &QRat::q_pow(1)))
            .unwrap();
        assert_eq!(y, x);
        assert!(y.is_laurent());
    }

    #[test]
    fn qnum_small_values() {
        assert!(qnum(h(0)).is_zero());
        assert!(qnum(h(2)).is_one());
        assert_eq!(qnum(h(4)), &QRat::q_pow(-1) + &QRat::q_pow(1));
        assert_eq!(qnum(h(-4)), -qnum(h(4)));
        assert_eq!(
            qnum(h(1)),
            QRat::one()
                .checked_div(&(&QRat::s_pow(-1) + &QRat::s_pow(1)))
                .unwrap()
        );
    }

    #[test]
    fn display_in_q_powers() {
        assert_eq!(qnum(h(4)).to_string(), "q^-1 + q");
        let x = (&QRat::q_pow(3) - &QRat::q_pow(1))
            .checked_div(&(&QRat::one() - &QRat::q_pow(4)))
            .unwrap();
        assert_eq!(x.to_string(), "-q/(1 + q^2)");
        assert_eq!(QRat::s_pow(-1).to_string(), "q^(-1/2)");
        assert_eq!(QRat::ratio(-3, 2).to_string(), "-3/2");
    }

    #[test]
    fn exact_split_matches_float() {
        let q = BigRational::new(1.into(), 2.into());
        let x = &qnum(h(3)) + &QRat::s_pow(3);
        let (a, b) = x.split_at(&q).unwrap();
        let approx = a.to_f64().unwrap() + b.to_f64().unwrap() * 0.5f64.sqrt();
        assert!((approx - x.eval_f64(0.5)).abs() < 1e-14);
        let pole = QRat::one()
            .checked_div(&(&QRat::one() - &QRat::q_pow(1)))
            .unwrap();
        assert!(matches!(
            pole.split_at(&BigRational::one()),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(
            parse_rational("0.5").unwrap(),
            BigRational::new(1.into(), 2.into())
        );
        assert_eq!(
            parse_rational("-1.25e-1").unwrap(),
            BigRational::new((-1).into(), 8.into())
        );
        assert_eq!(
            parse_rational("3/9").unwrap(),
            BigRational::new(1.into(), 3.into())
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}
