use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense univariate polynomial with rational coefficients, lowest degree first.
///
/// The coefficient vector never has a trailing zero, so the zero polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    pub fn from_i64(c: i64) -> Self {
        Poly::constant(rat(c))
    }

    /// `c * x^k`.
    pub fn monomial(k: usize, c: BigRational) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64_coeffs(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Largest `k` with `x^k` dividing `self` (0 for the zero polynomial).
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Multiply by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut coeffs = vec![BigRational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Divide by `x^k`; the caller guarantees `k <= valuation`.
    pub fn shift_down(&self, k: usize) -> Self {
        debug_assert!(self.is_zero() || k <= self.valuation());
        Poly::from_coeffs(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = self.leading().recip();
        self.scale(&inv)
    }

    /// Substitute `x -> -x`.
    pub fn reflect(&self) -> Self {
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let lead_inv = divisor.leading().recip();
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * dc;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Exact quotient; panics in debug builds if the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Poly) -> Poly {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic_primitive();
        }
        a.monic()
    }

    /// Remainder rescaled to keep coefficient growth in check during Euclid.
    fn monic_primitive(self) -> Poly {
        if self.is_zero() {
            self
        } else {
            self.monic()
        }
    }

    /// Square-free decomposition by Yun's algorithm: `self = c * ∏ f_i^i` with each `f_i` monic
    /// and square-free. Returns `(c, [(f_i, i)])` with trivial factors dropped.
    pub fn square_free(&self) -> (BigRational, Vec<(Poly, u32)>) {
        assert!(!self.is_zero(), "square-free decomposition of zero");
        let c = self.leading();
        let f = self.monic();
        let mut out = Vec::new();
        if f.is_constant() {
            return (c, out);
        }
        let fp = f.derivative();
        let a = f.gcd(&fp);
        let mut b = f.exact_div(&a);
        let mut cc = fp.exact_div(&a);
        let mut d = cc - b.derivative();
        let mut i = 1u32;
        loop {
            let a_i = b.gcd(&d);
            if !a_i.is_constant() {
                out.push((a_i.clone(), i));
            }
            b = b.exact_div(&a_i);
            if b.is_constant() {
                break;
            }
            cc = d.exact_div(&a_i);
            d = cc - b.derivative();
            i += 1;
        }
        (c, out)
    }

    /// Scale to a primitive integer polynomial. Returns `(content, primitive)` with
    /// `self = content * primitive` and `primitive` having coprime integer coefficients and a
    /// positive value of its lowest nonzero coefficient.
    pub fn primitive_part(&self) -> (BigRational, Poly) {
        if self.is_zero() {
            return (BigRational::zero(), Poly::zero());
        }
        let mut lcm_den = BigInt::one();
        for c in &self.coeffs {
            lcm_den = lcm_den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * &lcm_den).to_integer())
            .collect();
        let mut g = BigInt::zero();
        for x in &ints {
            g = g.gcd(x);
        }
        let low = ints
            .iter()
            .find(|x| !x.is_zero())
            .expect("non-zero polynomial");
        if low.is_negative() {
            g = -g;
        }
        let prim = Poly::from_coeffs(
            ints.iter()
                .map(|x| BigRational::from_integer(x / &g))
                .collect(),
        );
        (BigRational::new(g, lcm_den), prim)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// Split into even and odd parts: `self(x) = E(x^2) + x O(x^2)`.
    pub fn even_odd(&self) -> (Poly, Poly) {
        let even = self.coeffs.iter().step_by(2).cloned().collect();
        let odd = self.coeffs.iter().skip(1).step_by(2).cloned().collect();
        (Poly::from_coeffs(even), Poly::from_coeffs(odd))
    }

    /// Substitute `x -> x^2`.
    pub fn inflate(&self) -> Poly {
        let mut coeffs = vec![BigRational::zero(); (2 * self.coeffs.len()).saturating_sub(1)];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[2 * k] = c.clone();
        }
        Poly::from_coeffs(coeffs)
    }

    /// True if only even powers occur.
    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|c| c.is_zero())
    }

    /// Nonzero terms as `(power, coefficient)`, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    /// Total order used for canonical keys: by degree, then coefficients from the top.
    pub fn canonical_cmp(&self, other: &Poly) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (k, c) in short.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        Poly::from_coeffs(coeffs)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n, BigRational::zero());
        for (k, c) in rhs.coeffs.iter().enumerate() {
            coeffs[k] -= c;
        }
        Poly::from_coeffs(coeffs)
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    coeffs[i + j] += x * y;
                }
            }
        }
        Poly::from_coeffs(coeffs)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_i64_coeffs(c)
    }

    #[test]
    fn division_and_gcd() {
        // (x - 1)(x + 2) and (x - 1)(x - 3)
        let f = p(&[-2, 1, 1]);
        let g = p(&[3, -4, 1]);
        assert_eq!(f.gcd(&g), p(&[-1, 1]));
        let (q, r) = f.div_rem(&p(&[-1, 1]));
        assert_eq!(q, p(&[2, 1]));
        assert!(r.is_zero());
        assert_eq!(p(&[1]).gcd(&p(&[0, 1])), Poly::one());
    }

    #[test]
    fn yun_recovers_multiplicities() {
        let a = p(&[1, 1]);
        let b = p(&[-2, 0, 1]);
        let f = &(&a * &a) * &(&(&b * &b) * &b).scale(&rat(3));
        let (c, parts) = f.square_free();
        assert_eq!(c, rat(3));
        assert_eq!(parts, vec![(a, 2), (b, 3)]);
    }

    #[test]
    fn primitive_part_is_integral_and_positive() {
        let f = Poly::from_coeffs(vec![BigRational::new((-3).into(), 2.into()), rat(3)]);
        let (c, g) = f.primitive_part();
        assert_eq!(g, p(&[1, -2]));
        assert_eq!(&g.scale(&c), &f);
    }

    #[test]
    fn even_odd_split() {
        let f = p(&[1, 2, 3, 4]);
        let (e, o) = f.even_odd();
        assert_eq!(e, p(&[1, 3]));
        assert_eq!(o, p(&[2, 4]));
        assert_eq!(e.inflate() + o.inflate().shift_up(1), f);
    }
}
