use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An element of ½ℤ, stored as twice its value.
/// Serialized as text (`"3/2"`, `"-1"`), so values round-trip through reports unchanged.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(value: i64) -> Self {
        HalfInt { twice: 2 * value }
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub fn is_integral(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt {
            twice: self.twice.abs(),
        }
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// Integer value, if integral.
    pub fn to_int(self) -> Option<i64> {
        self.is_integral().then_some(self.twice / 2)
    }

    /// `self - other` must be an integer; returns it.
    pub fn int_distance(self, other: HalfInt) -> Option<i64> {
        (self - other).to_int()
    }

    /// Values `-self, -self + 1, ..., self` (the index set of a spin-`self` representation).
    pub fn spin_range(self) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        let l = self.twice;
        (0..=l.max(-1)).map(move |k| HalfInt::from_twice(-l + 2 * k))
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt {
            twice: self.twice + rhs.twice,
        }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt {
            twice: self.twice - rhs.twice,
        }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integral() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"p/2"`, integers, and decimals that are multiples of one half (`"0.5"`, `"-1.5"`).
    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || Error::Parse(format!("not a half-integer: {text:?}"));
        if let Some((p, q)) = t.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            return match q {
                1 => Ok(HalfInt::from_int(p)),
                2 => Ok(HalfInt::from_twice(p)),
                _ => Err(bad()),
            };
        }
        if let Ok(v) = t.parse::<i64>() {
            return Ok(HalfInt::from_int(v));
        }
        let v: f64 = t.parse().map_err(|_| bad())?;
        let twice = (2.0 * v).round();
        if (2.0 * v - twice).abs() > 1e-12 || !twice.is_finite() {
            return Err(bad());
        }
        Ok(HalfInt::from_twice(twice as i64))
    }
}
