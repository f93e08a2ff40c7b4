//! Exact elements of a real quadratic field Q(√d).

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// `a + b·√d`.
///
/// A value with `b = 0` carries no field tag and combines with any field.
/// Combining two irrational values of different fields is a programming
/// error and panics; public entry points validate fields first.
#[derive(Clone, Debug)]
pub struct Scalar {
    a: BigRational,
    b: BigRational,
    d: u32,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn is_square(n: u32) -> bool {
    let r = (n as f64).sqrt() as u32;
    (r.saturating_sub(1)..=r + 1).any(|k| k * k == n)
}

/// Square-free check used when validating a field parameter.
pub fn is_squarefree(d: u32) -> bool {
    if d == 0 {
        return false;
    }
    let mut k = 2u32;
    while k * k <= d {
        if d % (k * k) == 0 {
            return false;
        }
        k += 1;
    }
    true
}

impl Scalar {
    pub fn new(a: BigRational, b: BigRational, d: u32) -> Self {
        if b.is_zero() || d == 0 {
            return Scalar { a, b: BigRational::zero(), d: 0 };
        }
        if is_square(d) {
            let r = rat((d as f64).sqrt().round() as i64);
            return Scalar { a: a + b * r, b: BigRational::zero(), d: 0 };
        }
        Scalar { a, b, d }
    }

    pub fn rational(a: BigRational) -> Self {
        Scalar { a, b: BigRational::zero(), d: 0 }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(rat(n))
    }

    pub fn frac(p: i64, q: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// `a + b√d` from integer parts, handy in tests and builtins.
    pub fn quad(a: i64, b: i64, d: u32) -> Self {
        Self::new(rat(a), rat(b), d)
    }

    pub fn sqrt_of(d: u32) -> Self {
        Self::quad(0, 1, d)
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    /// The field this value forces, if any.
    pub fn field(&self) -> Option<u32> {
        if self.b.is_zero() {
            None
        } else {
            Some(self.d)
        }
    }

    /// True when the value lives in Q(√d).
    pub fn in_field(&self, d: u32) -> bool {
        match self.field() {
            None => true,
            Some(e) => e == d,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn join(&self, other: &Scalar) -> u32 {
        match (self.field(), other.field()) {
            (Some(x), Some(y)) => {
                assert_eq!(x, y, "mixed quadratic fields Q(√{x}) and Q(√{y})");
                x
            }
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => 0,
        }
    }

    /// Exact sign in {-1, 0, 1}.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // opposite signs: compare a² with b²d
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * rat(self.d as i64);
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn square(&self) -> Scalar {
        self * self
    }

    /// Field conjugate `a - b√d`.
    pub fn conjugate(&self) -> Scalar {
        Scalar { a: self.a.clone(), b: -&self.b, d: self.d }
    }

    /// Field norm `a² - b²d`, always rational.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * rat(self.d as i64)
    }

    pub fn recip(&self) -> Scalar {
        assert!(!self.is_zero(), "division by zero");
        let n = self.norm();
        Scalar::new(&self.a / &n, -&self.b / &n, self.d)
    }

    /// Floating approximation, for drawing only.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        a + self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
    }

    /// Integer value if the scalar is a rational integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        if self.b.is_zero() && self.a.is_integer() {
            Some(self.a.to_integer())
        } else {
            None
        }
    }

    /// `p/q` text of a rational.
    pub fn rat_text(r: &BigRational) -> String {
        format!("{}/{}", r.numer(), r.denom())
    }

    /// Pair form `[a, b]` as strings.
    pub fn pair(&self) -> [String; 2] {
        [Self::rat_text(&self.a), Self::rat_text(&self.b)]
    }

    /// Compact form used inside identifiers: `{a}+{b}r`.
    pub fn key(&self) -> String {
        format!("{}+{}r", Self::rat_text(&self.a), Self::rat_text(&self.b))
    }

    /// Parses one rational in `p/q` or `p` form.
    pub fn parse_rational(text: &str) -> Result<BigRational, Error> {
        let t = text.trim();
        let bad = || Error::Parse(format!("bad rational {text:?}"));
        match t.split_once('/') {
            Some((p, q)) => {
                let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
                let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(BigRational::new(p, q))
            }
            None => Ok(BigRational::from_integer(BigInt::from_str(t).map_err(|_| bad())?)),
        }
    }

    /// Accepts `p/q`, `p`, or the key form `p/q+p/qr`.
    pub fn parse(text: &str, d: u32) -> Result<Scalar, Error> {
        let t = text.trim();
        if let Some(body) = t.strip_suffix('r') {
            // split at the '+' that separates the two rationals (not a leading sign)
            let idx = body
                .char_indices()
                .skip(1)
                .find(|&(_, c)| c == '+')
                .map(|(i, _)| i)
                .ok_or_else(|| Error::Parse(format!("bad scalar {text:?}")))?;
            let a = Self::parse_rational(&body[..idx])?;
            let b = Self::parse_rational(&body[idx + 1..])?;
            return Ok(Scalar::new(a, b, d));
        }
        Ok(Scalar::rational(Self::parse_rational(t)?))
    }
}

fn sign_of(r: &BigRational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Exact sign of a scalar as -1, 0 or +1.
pub fn scalar_sign(s: &Scalar) -> i32 {
    s.signum()
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.d == other.d)
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.b.is_zero() && other.b.is_zero() {
            return self.a.cmp(&other.a);
        }
        (self - other).signum().cmp(&0)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", Self::rat_text(&self.a))
        } else {
            write!(f, "{}+{}*sqrt({})", Self::rat_text(&self.a), Self::rat_text(&self.b), self.d)
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        let d = self.join(o);
        Scalar::new(&self.a + &o.a, &self.b + &o.b, d)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        let d = self.join(o);
        Scalar::new(&self.a - &o.a, &self.b - &o.b, d)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.b.is_zero() && o.b.is_zero() {
            return Scalar::rational(&self.a * &o.a);
        }
        let d = self.join(o);
        let a = &self.a * &o.a + &self.b * &o.b * rat(d as i64);
        let b = &self.a * &o.b + &self.b * &o.a;
        Scalar::new(a, b, d)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        if self.b.is_zero() && o.b.is_zero() {
            assert!(!o.a.is_zero(), "division by zero");
            return Scalar::rational(&self.a / &o.a);
        }
        self * &o.recip()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { a: -&self.a, b: -&self.b, d: self.d }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar { (&self).$m(&o) }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar { (&self).$m(o) }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar { self.$m(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        *self = &*self + o;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        *self = &*self - o;
    }
}

impl Scalar {
    /// Greatest common divisor of two rational integers, for lattice helpers.
    pub fn int_gcd(a: &BigInt, b: &BigInt) -> BigInt {
        a.gcd(b)
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signs() {
        assert_eq!(scalar_sign(&Scalar::zero()), 0);
        assert_eq!(scalar_sign(&Scalar::quad(1, -1, 2)), -1);
        assert_eq!(scalar_sign(&Scalar::quad(3, -2, 2)), 1);
        assert_eq!(scalar_sign(&Scalar::quad(-3, 2, 2)), -1);
        assert_eq!(scalar_sign(&Scalar::quad(-1, 1, 2)), 1);
    }

    #[test]
    fn square_d_folds() {
        assert_eq!(Scalar::quad(1, 2, 4), Scalar::int(5));
        assert!(Scalar::quad(1, 2, 1).is_rational());
    }

    #[test]
    fn field_arithmetic() {
        let r2 = Scalar::sqrt_of(2);
        assert_eq!(&r2 * &r2, Scalar::int(2));
        let x = Scalar::quad(1, 1, 2);
        let y = x.recip();
        assert_eq!(&x * &y, Scalar::one());
        assert_eq!(y, Scalar::quad(-1, 1, 2));
    }

    #[test]
    fn text_forms() {
        let x = Scalar::quad(1, -3, 2);
        assert_eq!(x.key(), "1/1+-3/1r");
        assert_eq!(Scalar::parse(&x.key(), 2).unwrap(), x);
        assert_eq!(Scalar::parse("-3/6", 2).unwrap(), Scalar::frac(-1, 2));
        assert!(Scalar::parse("1/0", 1).is_err());
    }

    #[test]
    #[should_panic]
    fn mixed_fields_panic() {
        let _ = Scalar::sqrt_of(2) + Scalar::sqrt_of(3);
    }
}
