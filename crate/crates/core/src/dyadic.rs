//! Exact dyadic rational arithmetic.
//!
//! Distances on the dyadic interval grid and between covering centers
//! `(2j+1)·2^(1-n)` are rationals with a power-of-two denominator. Keeping
//! them exact makes eigenvalue grouping and multiplicity counting
//! integer-exact; float comparison would smear distinct eigenvalues
//! together or split equal ones apart.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A rational `num / 2^log2_den` in canonical form: `num` is odd or zero,
/// and `log2_den` is 0 when `num` is zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    num: i64,
    log2_den: u32,
}

impl DyadicRational {
    pub fn new(num: i64, log2_den: u32) -> Self {
        Self::canonical(num as i128, log2_den)
    }

    fn canonical(mut num: i128, mut log2_den: u32) -> Self {
        if num == 0 {
            return Self { num: 0, log2_den: 0 };
        }
        while num % 2 == 0 && log2_den > 0 {
            num /= 2;
            log2_den -= 1;
        }
        assert!(
            num >= i64::MIN as i128 && num <= i64::MAX as i128,
            "dyadic numerator overflow"
        );
        Self {
            num: num as i64,
            log2_den,
        }
    }

    pub fn zero() -> Self {
        Self { num: 0, log2_den: 0 }
    }

    pub fn one() -> Self {
        Self { num: 1, log2_den: 0 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(n, 0)
    }

    /// 2^k for any integer k (negative k gives 1/2^|k|).
    pub fn pow2(k: i32) -> Self {
        if k >= 0 {
            Self::new(1i64 << k, 0)
        } else {
            Self { num: 1, log2_den: (-k) as u32 }
        }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn log2_den(&self) -> u32 {
        self.log2_den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn abs(&self) -> Self {
        Self {
            num: self.num.abs(),
            log2_den: self.log2_den,
        }
    }

    /// Exact when |num| < 2^53, which holds for every value this crate
    /// constructs (level depth is capped at 30).
    pub fn to_f64(&self) -> f64 {
        self.num as f64 * (-(self.log2_den as f64)).exp2()
    }
}

impl Add for DyadicRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let den = self.log2_den.max(rhs.log2_den);
        let a = (self.num as i128) << (den - self.log2_den);
        let b = (rhs.num as i128) << (den - rhs.log2_den);
        Self::canonical(a + b, den)
    }
}

impl Sub for DyadicRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for DyadicRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            num: -self.num,
            log2_den: self.log2_den,
        }
    }
}

impl Mul for DyadicRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::canonical(
            self.num as i128 * rhs.num as i128,
            self.log2_den + rhs.log2_den,
        )
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let den = self.log2_den.max(other.log2_den);
        let a = (self.num as i128) << (den - self.log2_den);
        let b = (other.num as i128) << (den - other.log2_den);
        a.cmp(&b)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2_den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.log2_den)
        }
    }
}

impl fmt::Debug for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A distance value: exact dyadic where the source space is dyadic,
/// a plain float elsewhere.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Dist {
    Dyadic(DyadicRational),
    Float(f64),
}

impl Dist {
    pub fn value(&self) -> f64 {
        match self {
            Dist::Dyadic(d) => d.to_f64(),
            Dist::Float(v) => *v,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Dist::Dyadic(d) => d.is_positive(),
            Dist::Float(v) => *v > 0.0,
        }
    }

    pub fn as_dyadic(&self) -> Option<DyadicRational> {
        match self {
            Dist::Dyadic(d) => Some(*d),
            Dist::Float(_) => None,
        }
    }

    /// `self <= other`, exact when both sides are dyadic.
    pub fn le(&self, other: &Dist) -> bool {
        match (self, other) {
            (Dist::Dyadic(a), Dist::Dyadic(b)) => a <= b,
            _ => self.value() <= other.value(),
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Dyadic(d) => write!(f, "{d}"),
            Dist::Float(v) => write!(f, "{v}"),
        }
    }
}
