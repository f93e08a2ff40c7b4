//! Exact plane geometry: vectors, 2x2 matrices and orientation predicates.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Vec2 {
    pub x: Scalar,
    pub y: Scalar,
}

impl Vec2 {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Vec2 { x, y }
    }

    pub fn ints(x: i64, y: i64) -> Self {
        Vec2::new(Scalar::int(x), Scalar::int(y))
    }

    pub fn zero() -> Self {
        Vec2::ints(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// `self ∧ o = x₁y₂ − x₂y₁`.
    pub fn cross(&self, o: &Vec2) -> Scalar {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn dot(&self, o: &Vec2) -> Scalar {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn norm2(&self) -> Scalar {
        self.dot(self)
    }

    pub fn scale(&self, k: &Scalar) -> Vec2 {
        Vec2::new(&self.x * k, &self.y * k)
    }

    /// Counterclockwise quarter turn.
    pub fn perp(&self) -> Vec2 {
        Vec2::new(-&self.y, self.x.clone())
    }

    pub fn in_field(&self, d: u32) -> bool {
        self.x.in_field(d) && self.y.in_field(d)
    }

    /// Representative of `±self` with `y > 0`, or `y = 0` and `x > 0`.
    pub fn canonical(&self) -> Vec2 {
        let s = self.y.signum();
        if s < 0 || (s == 0 && self.x.is_negative()) {
            -self
        } else {
            self.clone()
        }
    }

    /// Same direction and orientation (positive multiple).
    pub fn same_ray(&self, o: &Vec2) -> bool {
        self.cross(o).is_zero() && self.dot(o).is_positive()
    }

    pub fn parallel(&self, o: &Vec2) -> bool {
        self.cross(o).is_zero()
    }

    pub fn key(&self) -> String {
        format!("{},{}", self.x.key(), self.y.key())
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl<'a> Add<&'a Vec2> for &'a Vec2 {
    type Output = Vec2;
    fn add(self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl<'a> Sub<&'a Vec2> for &'a Vec2 {
    type Output = Vec2;
    fn sub(self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        &self + &o
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        &self - &o
    }
}

impl Neg for &Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-&self.x, -&self.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        -&self
    }
}

impl<'a> Mul<&'a Vec2> for &'a Scalar {
    type Output = Vec2;
    fn mul(self, v: &Vec2) -> Vec2 {
        v.scale(self)
    }
}

/// Row-major `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
}

impl Mat2 {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::new(Scalar::int(a), Scalar::int(b), Scalar::int(c), Scalar::int(d))
    }

    pub fn identity() -> Self {
        Mat2::ints(1, 0, 0, 1)
    }

    /// Matrix with the given columns.
    pub fn from_cols(u: &Vec2, v: &Vec2) -> Self {
        Mat2::new(u.x.clone(), v.x.clone(), u.y.clone(), v.y.clone())
    }

    pub fn det(&self) -> Scalar {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        Vec2::new(&self.a * &v.x + &self.b * &v.y, &self.c * &v.x + &self.d * &v.y)
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }

    pub fn inverse(&self) -> Result<Mat2> {
        let det = self.det();
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let k = det.recip();
        Ok(Mat2::new(&self.d * &k, -(&self.b * &k), -(&self.c * &k), &self.a * &k))
    }

    pub fn neg(&self) -> Mat2 {
        Mat2::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }

    pub fn in_field(&self, d: u32) -> bool {
        [&self.a, &self.b, &self.c, &self.d].iter().all(|s| s.in_field(d))
    }

    /// Equal up to a global sign.
    pub fn eq_up_to_sign(&self, o: &Mat2) -> bool {
        self == o || *self == o.neg()
    }

    /// Parses `"a,b;c,d"` with entries in `p/q` or key form.
    pub fn parse(text: &str, field_d: u32) -> Result<Mat2> {
        let rows: Vec<&str> = text.split(';').collect();
        if rows.len() != 2 {
            return Err(Error::Parse(format!("matrix {text:?} needs two rows")));
        }
        let mut e = Vec::new();
        for r in rows {
            let cols: Vec<&str> = r.split(',').collect();
            if cols.len() != 2 {
                return Err(Error::Parse(format!("matrix {text:?} needs two columns")));
            }
            for c in cols {
                e.push(Scalar::parse(c, field_d)?);
            }
        }
        let mut it = e.into_iter();
        let m = Mat2::new(it.next().unwrap(), it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
        Ok(m)
    }

    pub fn key(&self) -> String {
        format!("{},{};{},{}", self.a.key(), self.b.key(), self.c.key(), self.d.key())
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

pub fn mat_apply(m: &Mat2, v: &Vec2) -> Vec2 {
    m.apply(v)
}

pub fn mat_inverse(m: &Mat2) -> Result<Mat2> {
    m.inverse()
}

/// Sign of `(q − p) ∧ (r − p)`; +1 is counterclockwise.
pub fn orient(p: &Vec2, q: &Vec2, r: &Vec2) -> i32 {
    (q - p).cross(&(r - p)).signum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegRelation {
    Disjoint,
    EndpointTouch,
    InteriorCross,
    CollinearOverlap,
}

fn on_segment(p: &Vec2, a: &Vec2, b: &Vec2) -> bool {
    // p assumed collinear with a, b
    let d1 = (p - a).dot(&(b - a));
    let d2 = (p - b).dot(&(a - b));
    !d1.is_negative() && !d2.is_negative()
}

/// Exact classification of two nondegenerate closed segments.
///
/// `EndpointTouch` covers every contact that happens at an endpoint of one
/// of the segments, including a T-junction.
pub fn seg_relation(s1: (&Vec2, &Vec2), s2: (&Vec2, &Vec2)) -> SegRelation {
    let (a, b) = s1;
    let (c, d) = s2;
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 == 0 && o2 == 0 {
        // collinear supports
        let ab = b - a;
        let ta = Scalar::zero();
        let tb = ab.dot(&ab);
        let tc = (c - a).dot(&ab);
        let td = (d - a).dot(&ab);
        let (lo2, hi2) = if tc <= td { (tc, td) } else { (td, tc) };
        let lo = if ta >= lo2 { ta } else { lo2 };
        let hi = if tb <= hi2 { tb } else { hi2 };
        return match lo.cmp(&hi) {
            std::cmp::Ordering::Less => SegRelation::CollinearOverlap,
            std::cmp::Ordering::Equal => SegRelation::EndpointTouch,
            std::cmp::Ordering::Greater => SegRelation::Disjoint,
        };
    }
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return SegRelation::InteriorCross;
    }
    let touch = (o1 == 0 && on_segment(c, a, b))
        || (o2 == 0 && on_segment(d, a, b))
        || (o3 == 0 && on_segment(a, c, d))
        || (o4 == 0 && on_segment(b, c, d));
    if touch {
        SegRelation::EndpointTouch
    } else {
        SegRelation::Disjoint
    }
}

/// Twice the signed area of a polygon (shoelace).
pub fn twice_area(pts: &[Vec2]) -> Scalar {
    let n = pts.len();
    let mut s = Scalar::zero();
    for i in 0..n {
        s += &pts[i].cross(&pts[(i + 1) % n]);
    }
    s
}

pub fn is_strictly_convex_ccw(pts: &[Vec2]) -> bool {
    let n = pts.len();
    n >= 3 && (0..n).all(|i| orient(&pts[i], &pts[(i + 1) % n], &pts[(i + 2) % n]) > 0)
}

/// Frame sign of a half-translation chart change.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i32(s: i32) -> Option<Sign> {
        match s {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn to_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn times(self, o: Sign) -> Sign {
        if self == o {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn apply(self, v: &Vec2) -> Vec2 {
        match self {
            Sign::Plus => v.clone(),
            Sign::Minus => -v,
        }
    }

    pub fn apply_scalar(self, s: &Scalar) -> Scalar {
        match self {
            Sign::Plus => s.clone(),
            Sign::Minus => -s,
        }
    }
}

/// Chart change `z ↦ sign·z + offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HalfTranslation {
    pub sign: Sign,
    pub offset: Vec2,
}

impl HalfTranslation {
    pub fn identity() -> Self {
        HalfTranslation { sign: Sign::Plus, offset: Vec2::zero() }
    }

    pub fn apply(&self, z: &Vec2) -> Vec2 {
        &self.sign.apply(z) + &self.offset
    }

    pub fn apply_vec(&self, v: &Vec2) -> Vec2 {
        self.sign.apply(v)
    }

    pub fn inverse(&self) -> HalfTranslation {
        HalfTranslation { sign: self.sign, offset: -self.sign.apply(&self.offset) }
    }

    pub fn invert_point(&self, w: &Vec2) -> Vec2 {
        self.sign.apply(&(w - &self.offset))
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &HalfTranslation) -> HalfTranslation {
        HalfTranslation { sign: self.sign.times(o.sign), offset: self.apply(&o.offset) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64) -> Vec2 {
        Vec2::ints(x, y)
    }

    #[test]
    fn orient_cases() {
        assert_eq!(orient(&v(0, 0), &v(1, 0), &v(0, 1)), 1);
        assert_eq!(orient(&v(0, 0), &v(1, 1), &v(2, 2)), 0);
        let q = Vec2::new(Scalar::one(), -Scalar::sqrt_of(2));
        assert_eq!(orient(&v(0, 0), &v(1, 0), &q), -1);
    }

    #[test]
    fn segment_cases() {
        use SegRelation::*;
        assert_eq!(seg_relation((&v(0, 0), &v(1, 0)), (&v(0, 1), &v(1, 1))), Disjoint);
        assert_eq!(seg_relation((&v(0, 0), &v(1, 1)), (&v(1, 0), &v(0, 1))), InteriorCross);
        assert_eq!(seg_relation((&v(0, 0), &v(1, 0)), (&v(1, 0), &v(1, 1))), EndpointTouch);
        assert_eq!(seg_relation((&v(0, 0), &v(2, 0)), (&v(1, 0), &v(3, 0))), CollinearOverlap);
        assert_eq!(seg_relation((&v(0, 0), &v(1, 0)), (&v(2, 0), &v(3, 0))), Disjoint);
    }

    #[test]
    fn matrices() {
        let t = Mat2::ints(1, 1, 0, 1);
        assert_eq!(t.apply(&v(0, 1)), v(1, 1));
        assert_eq!(Mat2::ints(0, -1, 1, 0).inverse().unwrap(), Mat2::ints(0, 1, -1, 0));
        assert_eq!(Mat2::ints(2, 0, 0, 1).apply(&v(1, 1)), v(2, 1));
        assert_eq!(Mat2::ints(1, 2, 2, 4).inverse(), Err(Error::SingularMatrix));
        assert_eq!(Mat2::parse("1,1;0,1", 1).unwrap(), t);
    }
}
