//! Exact rationals that stay in machine words while they are small.
//!
//! A value whose reduced numerator and denominator are both at most
//! [`SMALL_LIMIT`] in absolute value is always stored as a `Ratio<i64>`;
//! anything else is a `BigRational`. The representation is therefore
//! canonical and derived equality is numeric equality. Under the bound every
//! intermediate product and sum inside `Ratio<i64>` arithmetic stays below
//! `2^62`, so the fast path cannot overflow.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const SMALL_LIMIT: i64 = 1 << 30;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(Ratio<i64>),
    Big(BigRational),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

fn fits(r: &Ratio<i64>) -> bool {
    r.numer().unsigned_abs() <= SMALL_LIMIT as u64 && *r.denom() <= SMALL_LIMIT
}

impl Scalar {
    fn small(r: Ratio<i64>) -> Scalar {
        if fits(&r) {
            Scalar(Repr::Small(r))
        } else {
            Scalar(Repr::Big(BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))))
        }
    }

    /// Normalises a big rational into the canonical representation.
    pub fn from_big(r: BigRational) -> Scalar {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n.unsigned_abs() <= SMALL_LIMIT as u64 && d <= SMALL_LIMIT {
                return Scalar(Repr::Small(Ratio::new_raw(n, d)));
            }
        }
        Scalar(Repr::Big(r))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn from_i64(n: i64) -> Scalar {
        Scalar::small(Ratio::from_integer(n))
    }

    /// `p/q`, reduced. Panics if `q = 0`.
    pub fn new(p: i64, q: i64) -> Scalar {
        assert!(q != 0, "zero denominator");
        Scalar::from_big(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => BigInt::from(*r.numer()),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    /// Always positive.
    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => BigInt::from(*r.denom()),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_integer(),
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_negative(),
            Repr::Big(b) => b.is_negative(),
        }
    }

    /// Panics on zero.
    pub fn recip(&self) -> Scalar {
        match &self.0 {
            Repr::Small(r) => Scalar(Repr::Small(r.recip())),
            Repr::Big(b) => Scalar::from_big(b.recip()),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_i64(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::from_big(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(r) => fmt::Display::fmt(r, f),
            Repr::Big(b) => fmt::Display::fmt(b, f),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

fn add(a: &Scalar, b: &Scalar) -> Scalar {
    match (&a.0, &b.0) {
        (Repr::Small(x), Repr::Small(y)) => Scalar::small(x + y),
        _ => Scalar::from_big(a.to_big() + b.to_big()),
    }
}

fn sub(a: &Scalar, b: &Scalar) -> Scalar {
    match (&a.0, &b.0) {
        (Repr::Small(x), Repr::Small(y)) => Scalar::small(x - y),
        _ => Scalar::from_big(a.to_big() - b.to_big()),
    }
}

fn mul(a: &Scalar, b: &Scalar) -> Scalar {
    match (&a.0, &b.0) {
        (Repr::Small(x), Repr::Small(y)) => Scalar::small(x * y),
        _ => Scalar::from_big(a.to_big() * b.to_big()),
    }
}

fn div(a: &Scalar, b: &Scalar) -> Scalar {
    mul(a, &b.recip())
}

macro_rules! binop {
    ($tr:ident, $method:ident, $f:ident, $atr:ident, $amethod:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                $f(self, rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $f(self, &rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                $f(&self, rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $f(&self, &rhs)
            }
        }
        impl $atr<&Scalar> for Scalar {
            fn $amethod(&mut self, rhs: &Scalar) {
                *self = $f(self, rhs);
            }
        }
        impl $atr<Scalar> for Scalar {
            fn $amethod(&mut self, rhs: Scalar) {
                *self = $f(self, &rhs);
            }
        }
    };
}

binop!(Add, add, add, AddAssign, add_assign);
binop!(Sub, sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, mul, MulAssign, mul_assign);
binop!(Div, div, div, DivAssign, div_assign);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Small(r) => Scalar(Repr::Small(-r)),
            Repr::Big(b) => Scalar(Repr::Big(-b)),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar(Repr::Small(Ratio::new_raw(0, 1)))
    }

    fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Small(r) if *r.numer() == 0)
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar(Repr::Small(Ratio::new_raw(1, 1)))
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}
