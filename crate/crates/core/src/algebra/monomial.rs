use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::scalars::QRat;

/// Normal-form monomial `a^a b^b c^c d^d` with `a * d = 0`.
///
/// The normal-form words are `a^i b^j c^k` and `b^j c^k d^i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        a: 0,
        b: 0,
        c: 0,
        d: 0,
    };
    pub const A: Monomial = Monomial {
        a: 1,
        b: 0,
        c: 0,
        d: 0,
    };
    pub const B: Monomial = Monomial {
        a: 0,
        b: 1,
        c: 0,
        d: 0,
    };
    pub const C: Monomial = Monomial {
        a: 0,
        b: 0,
        c: 1,
        d: 0,
    };
    pub const D: Monomial = Monomial {
        a: 0,
        b: 0,
        c: 0,
        d: 1,
    };

    /// Panics unless `a * d == 0`.
    pub fn new(a: u32, b: u32, c: u32, d: u32) -> Self {
        assert!(a == 0 || d == 0, "a^{a} d^{d} is not in normal form");
        Monomial { a, b, c, d }
    }

    /// `b^j c^k`.
    pub fn bc(j: u32, k: u32) -> Self {
        Monomial {
            a: 0,
            b: j,
            c: k,
            d: 0,
        }
    }

    pub fn degree(self) -> u32 {
        self.a + self.b + self.c + self.d
    }

    /// Bigrade `(m, n)` with `m = (a-d) + (b-c)` and `n = (a-d) - (b-c)`.
    pub fn bigrade(self) -> (i64, i64) {
        let ad = self.a as i64 - self.d as i64;
        let bc = self.b as i64 - self.c as i64;
        (ad + bc, ad - bc)
    }

    pub fn is_one(self) -> bool {
        self == Monomial::ONE
    }

    /// Signed exponent of the `a`/`d` part: `a - d`.
    fn ad_exp(self) -> i64 {
        self.a as i64 - self.d as i64
    }

    fn with_ad(e: i64, b: u32, c: u32) -> Monomial {
        if e >= 0 {
            Monomial {
                a: e as u32,
                b,
                c,
                d: 0,
            }
        } else {
            Monomial {
                a: 0,
                b,
                c,
                d: (-e) as u32,
            }
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut parts = Vec::new();
        for (name, e) in [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Coefficients of `∏_{t=1}^{i} (1 + q^{±(2t-1)} x)` as a polynomial in `x`.
fn bc_product(i: u32, positive: bool) -> Vec<QRat> {
    static CACHE: OnceLock<RwLock<[Vec<Vec<QRat>>; 2]>> = OnceLock::new();
    let cache =
        CACHE.get_or_init(|| RwLock::new([vec![vec![QRat::one()]], vec![vec![QRat::one()]]]));
    let side = usize::from(positive);
    if let Some(v) = cache.read().unwrap()[side].get(i as usize) {
        return v.clone();
    }
    let mut guard = cache.write().unwrap();
    let table = &mut guard[side];
    while table.len() <= i as usize {
        let t = table.len() as i64;
        let e = if positive { 2 * t - 1 } else { -(2 * t - 1) };
        let prev = table.last().unwrap();
        let mut next = vec![QRat::zero(); prev.len() + 1];
        for (k, c) in prev.iter().enumerate() {
            next[k] = &next[k] + c;
            next[k + 1] = &next[k + 1] + &c.mul_s_pow(2 * e);
        }
        table.push(next);
    }
    table[i as usize].clone()
}

fn s_unit(k: i64) -> QRat {
    QRat::s_pow(k)
}

/// Product of two normal-form monomials, as normal-form terms with their scalar factors.
pub fn monomial_product(x: Monomial, y: Monomial) -> Vec<(Monomial, QRat)> {
    let (j1, k1, j2, k2) = (x.b, x.c, y.b, y.c);
    let (e1, e2) = (x.ad_exp(), y.ad_exp());
    let n1 = (j1 + k1) as i64;
    let n2 = (j2 + k2) as i64;
    let (j, k) = (j1 + j2, k1 + k2);
    let nb = n1 + n2;
    // q-powers are tracked in s = q^{1/2}: q^p = s^{2p}
    if e1 >= 0 && e2 >= 0 {
        // a^{i1} B1 a^{i2} B2 = q^{-|B1| i2} a^{i1+i2} B1 B2
        return vec![(Monomial::with_ad(e1 + e2, j, k), s_unit(-2 * n1 * e2))];
    }
    if e1 <= 0 && e2 <= 0 {
        // B1 d^{i1} B2 d^{i2} = q^{-i1 |B2|} B1 B2 d^{i1+i2}
        return vec![(Monomial::with_ad(e1 + e2, j, k), s_unit(-2 * (-e1) * n2))];
    }
    if e1 > 0 {
        // a^{i1} B1 B2 d^{i2} = q^{i1|B|} B a^{i1} d^{i2}
        let (i1, i2) = (e1, -e2);
        let (m, pref, e) = if i1 >= i2 {
            (i2, i2 * nb, i1 - i2)
        } else {
            (i1, i1 * nb, -(i2 - i1))
        };
        return bc_product(m as u32, true)
            .into_iter()
            .enumerate()
            .map(|(t, c)| {
                (
                    Monomial::with_ad(e, j + t as u32, k + t as u32),
                    c.mul_s_pow(2 * pref),
                )
            })
            .collect();
    }
    // B1 d^{i1} a^{i2} B2
    let (i1, i2) = (-e1, e2);
    if i1 >= i2 {
        let e = i1 - i2;
        bc_product(i2 as u32, false)
            .into_iter()
            .enumerate()
            .map(|(t, c)| {
                let t = t as i64;
                (
                    Monomial::with_ad(-e, j + t as u32, k + t as u32),
                    c.mul_s_pow(-2 * e * (2 * t + n2)),
                )
            })
            .collect()
    } else {
        let e = i2 - i1;
        bc_product(i1 as u32, false)
            .into_iter()
            .enumerate()
            .map(|(t, c)| {
                let t = t as i64;
                (
                    Monomial::with_ad(e, j + t as u32, k + t as u32),
                    c.mul_s_pow(-2 * e * (n1 + 2 * t)),
                )
            })
            .collect()
    }
}

/// `h(m)` for a monomial: `(-q)^k (1-q^2)/(1-q^{2k+2})` on `(bc)^k`, zero elsewhere.
pub fn haar_monomial(m: Monomial) -> QRat {
    if m.a != 0 || m.d != 0 || m.b != m.c {
        return QRat::zero();
    }
    let k = m.b as i64;
    let sign = if k % 2 == 0 { 1 } else { -1 };
    // (1-q^2)/(1-q^{2k+2}) = 1/(1 + q^2 + ... + q^{2k})
    let geo =
        QRat::from_s_laurent((0..=k).map(|t| (4 * t, BigRational::from_integer(BigInt::from(1)))));
    let base = QRat::s_monomial(2 * k, BigRational::from_integer(BigInt::from(sign)));
    base.checked_div(&geo).expect("non-zero")
}

/// `star(m) = λ m'` for a monomial.
pub fn star_monomial(m: Monomial) -> (Monomial, QRat) {
    let (j, k) = (m.b as i64, m.c as i64);
    let sign = if (j + k) % 2 == 0 { 1 } else { -1 };
    let coeff = QRat::s_monomial(2 * (j - k), BigRational::from_integer(BigInt::from(sign)));
    (
        Monomial {
            a: m.d,
            b: m.c,
            c: m.b,
            d: m.a,
        },
        coeff,
    )
}
