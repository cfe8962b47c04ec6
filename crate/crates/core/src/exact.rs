//! Exact scalars and 2x2 matrices.
//!
//! Everything here is integer or rational arithmetic. Floating point only
//! appears downstream in [`crate::geometry`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact square root of a nonnegative integer, if it is a perfect square.
pub fn int_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

/// Exact square root of a rational, if it is the square of a rational.
pub fn rational_sqrt_exact(r: &Rational) -> Option<Rational> {
    let n = int_sqrt_exact(r.numer())?;
    let d = int_sqrt_exact(r.denom())?;
    Some(Rational::new(n, d))
}

/// An element `u + v*sqrt(radicand)` of the real quadratic field Q(sqrt(radicand)).
///
/// When the radicand is itself a rational square the surd part is folded into
/// the rational part, so structural equality is field equality in every case.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadExtScalar {
    u: Rational,
    v: Rational,
    radicand: Rational,
}

impl QuadExtScalar {
    pub fn new(u: Rational, v: Rational, radicand: Rational) -> Result<Self> {
        if !radicand.is_positive() {
            return Err(Error::NonPositiveRadicand(Box::new(radicand)));
        }
        Ok(Self::normalized(u, v, radicand))
    }

    fn normalized(u: Rational, v: Rational, radicand: Rational) -> Self {
        match rational_sqrt_exact(&radicand) {
            Some(root) if !v.is_zero() => Self {
                u: u + v * root,
                v: Rational::zero(),
                radicand,
            },
            _ => Self { u, v, radicand },
        }
    }

    pub fn from_rational(u: Rational, radicand: Rational) -> Result<Self> {
        Self::new(u, Rational::zero(), radicand)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.u
    }

    pub fn surd_part(&self) -> &Rational {
        &self.v
    }

    pub fn radicand(&self) -> &Rational {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    /// `u - v*sqrt(a)`.
    pub fn conjugate(&self) -> Self {
        Self::normalized(self.u.clone(), -self.v.clone(), self.radicand.clone())
    }

    /// `(u + v sqrt a)(u - v sqrt a) = u^2 - a v^2`.
    pub fn norm(&self) -> Rational {
        &self.u * &self.u - &self.radicand * &self.v * &self.v
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.radicand != other.radicand {
            return Err(Error::RadicandMismatch {
                left: Box::new(self.radicand.clone()),
                right: Box::new(other.radicand.clone()),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::normalized(
            &self.u + &other.u,
            &self.v + &other.v,
            self.radicand.clone(),
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::normalized(
            &self.u - &other.u,
            &self.v - &other.v,
            self.radicand.clone(),
        ))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let u = &self.u * &other.u + &self.radicand * &self.v * &other.v;
        let v = &self.u * &other.v + &other.u * &self.v;
        Ok(Self::normalized(u, v, self.radicand.clone()))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::normalized(&self.u * r, &self.v * r, self.radicand.clone())
    }

    pub fn to_f64(&self) -> f64 {
        let f = |r: &Rational| r.to_f64().unwrap_or(f64::NAN);
        f(&self.u) + f(&self.v) * f(&self.radicand).sqrt()
    }
}

impl fmt::Display for QuadExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_zero() {
            write!(f, "{}", self.u)
        } else {
            write!(f, "{} + {}*sqrt({})", self.u, self.v, self.radicand)
        }
    }
}

/// Integer 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl IntMat2 {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().is_one()
    }

    pub fn ensure_unimodular(&self) -> Result<()> {
        let det = self.det();
        if det.is_one() {
            Ok(())
        } else {
            Err(Error::NotUnimodular(det))
        }
    }

    /// Adjugate; the inverse whenever the determinant is 1.
    pub fn adjugate(&self) -> Self {
        Self::new(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// `g * self * g^{-1}` for unimodular `g`.
    pub fn conjugate_by(&self, g: &IntMat2) -> Self {
        &(g * self) * &g.adjugate()
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn to_i64(&self) -> Option<[i64; 4]> {
        Some([
            self.a.to_i64()?,
            self.b.to_i64()?,
            self.c.to_i64()?,
            self.d.to_i64()?,
        ])
    }

    pub fn to_f64(&self) -> [f64; 4] {
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        [f(&self.a), f(&self.b), f(&self.c), f(&self.d)]
    }
}

impl Mul for &IntMat2 {
    type Output = IntMat2;

    fn mul(self, rhs: &IntMat2) -> IntMat2 {
        IntMat2::new(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }
}

impl Mul for IntMat2 {
    type Output = IntMat2;

    fn mul(self, rhs: IntMat2) -> IntMat2 {
        &self * &rhs
    }
}

impl Add for &IntMat2 {
    type Output = IntMat2;

    fn add(self, rhs: &IntMat2) -> IntMat2 {
        IntMat2::new(
            &self.a + &rhs.a,
            &self.b + &rhs.b,
            &self.c + &rhs.c,
            &self.d + &rhs.d,
        )
    }
}

impl Sub for &IntMat2 {
    type Output = IntMat2;

    fn sub(self, rhs: &IntMat2) -> IntMat2 {
        IntMat2::new(
            &self.a - &rhs.a,
            &self.b - &rhs.b,
            &self.c - &rhs.c,
            &self.d - &rhs.d,
        )
    }
}

impl Neg for &IntMat2 {
    type Output = IntMat2;

    fn neg(self) -> IntMat2 {
        IntMat2::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }
}

impl Neg for IntMat2 {
    type Output = IntMat2;

    fn neg(self) -> IntMat2 {
        -&self
    }
}

/// JSON integer when it fits in `i64`, decimal string otherwise.
pub fn serialize_bigint<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match n.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.collect_str(n),
    }
}

pub(crate) struct BigIntSer<'a>(pub &'a BigInt);

impl Serialize for BigIntSer<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_bigint(self.0, s)
    }
}

/// Serialized as the flat array `[a, b, c, d]`.
impl Serialize for IntMat2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries().map(BigIntSer).serialize(s)
    }
}

impl fmt::Display for IntMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// 2x2 matrix over Q(sqrt(a)); all four entries share one radicand.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtMat2 {
    entries: [QuadExtScalar; 4],
}

impl ExtMat2 {
    pub fn new(
        a: QuadExtScalar,
        b: QuadExtScalar,
        c: QuadExtScalar,
        d: QuadExtScalar,
    ) -> Result<Self> {
        for other in [&b, &c, &d] {
            a.check(other)?;
        }
        Ok(Self {
            entries: [a, b, c, d],
        })
    }

    pub fn identity(radicand: Rational) -> Result<Self> {
        let one = QuadExtScalar::from_rational(Rational::one(), radicand.clone())?;
        let zero = QuadExtScalar::from_rational(Rational::zero(), radicand)?;
        Self::new(one.clone(), zero.clone(), zero, one)
    }

    pub fn radicand(&self) -> &Rational {
        self.entries[0].radicand()
    }

    pub fn entries(&self) -> &[QuadExtScalar; 4] {
        &self.entries
    }

    pub fn det(&self) -> QuadExtScalar {
        let [a, b, c, d] = &self.entries;
        // Entries share a radicand by construction.
        a.try_mul(d)
            .and_then(|ad| ad.try_sub(&b.try_mul(c)?))
            .expect("shared radicand")
    }

    pub fn trace(&self) -> QuadExtScalar {
        self.entries[0]
            .try_add(&self.entries[3])
            .expect("shared radicand")
    }

    pub fn try_mul(&self, rhs: &ExtMat2) -> Result<ExtMat2> {
        let [a, b, c, d] = &self.entries;
        let [e, f, g, h] = &rhs.entries;
        a.check(e)?;
        let dot = |x: &QuadExtScalar, y: &QuadExtScalar, z: &QuadExtScalar, w: &QuadExtScalar| {
            x.try_mul(y)?.try_add(&z.try_mul(w)?)
        };
        ExtMat2::new(dot(a, e, b, g)?, dot(a, f, b, h)?, dot(c, e, d, g)?, dot(c, f, d, h)?)
    }

    pub fn try_add(&self, rhs: &ExtMat2) -> Result<ExtMat2> {
        let [a, b, c, d] = &self.entries;
        let [e, f, g, h] = &rhs.entries;
        ExtMat2::new(a.try_add(e)?, b.try_add(f)?, c.try_add(g)?, d.try_add(h)?)
    }

    pub fn to_f64(&self) -> [f64; 4] {
        let [a, b, c, d] = &self.entries;
        [a.to_f64(), b.to_f64(), c.to_f64(), d.to_f64()]
    }
}

impl fmt::Display for ExtMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.entries;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> IntMat2 {
        IntMat2::from_i64(a, b, c, d)
    }

    fn q(u: Rational, v: Rational) -> QuadExtScalar {
        QuadExtScalar::new(u, v, rat(3)).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let x = m(2, 3, 1, 2);
        assert_eq!(&IntMat2::identity() * &x, x);
        assert_eq!(&x * &IntMat2::identity(), x);
    }

    #[test]
    fn hand_multiplication() {
        let x = m(0, -1, 1, 3);
        assert_eq!(&x * &x, m(-1, -3, 3, 8));
    }

    #[test]
    fn det_and_trace() {
        assert_eq!(IntMat2::identity().det(), BigInt::one());
        assert_eq!(m(0, -1, 1, 3).trace(), BigInt::from(3));
        assert_eq!(m(2, 3, 1, 2).det(), BigInt::one());
        assert!(m(2, 3, 1, 2).is_unimodular());
        assert!(m(2, 0, 0, 1).ensure_unimodular().is_err());
    }

    #[test]
    fn pow_matches_repeated_product() {
        let x = m(2, 1, 1, 1);
        assert_eq!(x.pow(2), m(5, 3, 3, 2));
        assert_eq!(x.pow(0), IntMat2::identity());
        assert_eq!(x.pow(3), &x.pow(2) * &x);
    }

    #[test]
    fn square_radicand_folds_surd() {
        let one = rat(1);
        let s = QuadExtScalar::new(rat(0), rat(1), one.clone()).unwrap();
        assert_eq!(s, QuadExtScalar::from_rational(rat(1), one).unwrap());
        assert_eq!(
            QuadExtScalar::new(rat(2), rat(1), ratio(9, 4)).unwrap(),
            QuadExtScalar::from_rational(ratio(7, 2), ratio(9, 4)).unwrap()
        );
    }

    #[test]
    fn radicand_mismatch_is_an_error() {
        let x = QuadExtScalar::new(rat(1), rat(1), rat(2)).unwrap();
        let y = QuadExtScalar::new(rat(1), rat(1), rat(3)).unwrap();
        assert!(matches!(x.try_mul(&y), Err(Error::RadicandMismatch { .. })));
        let ix = ExtMat2::identity(rat(2)).unwrap();
        let iy = ExtMat2::identity(rat(3)).unwrap();
        assert!(ix.try_mul(&iy).is_err());
        assert!(QuadExtScalar::new(rat(1), rat(1), rat(-2)).is_err());
    }

    #[test]
    fn ext_identity_product() {
        let i = ExtMat2::identity(rat(3)).unwrap();
        let x = ExtMat2::new(
            q(rat(1), rat(2)),
            q(rat(0), rat(1)),
            q(ratio(1, 2), rat(0)),
            q(rat(4), rat(-1)),
        )
        .unwrap();
        assert_eq!(i.try_mul(&x).unwrap(), x);
        assert_eq!(x.try_mul(&i).unwrap(), x);
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| ratio(n, d))
    }

    fn small_mat() -> impl Strategy<Value = IntMat2> {
        proptest::array::uniform4(-30i64..30).prop_map(|[a, b, c, d]| m(a, b, c, d))
    }

    fn ext_mat() -> impl Strategy<Value = ExtMat2> {
        proptest::array::uniform8(small_rat()).prop_map(|r| {
            let [a, b, c, d, e, f, g, h] = r;
            ExtMat2::new(q(a, b), q(c, d), q(e, f), q(g, h)).unwrap()
        })
    }

    proptest! {
        #[test]
        fn rational_add_sub_roundtrip(x in small_rat(), y in small_rat()) {
            prop_assert_eq!((&x + &y) - &y, x);
        }

        #[test]
        fn quad_mul_commutative_associative(
            a in small_rat(), b in small_rat(), c in small_rat(),
            d in small_rat(), e in small_rat(), f in small_rat(),
        ) {
            let (x, y, z) = (q(a, b), q(c, d), q(e, f));
            prop_assert_eq!(x.try_mul(&y).unwrap(), y.try_mul(&x).unwrap());
            prop_assert_eq!(
                x.try_mul(&y).unwrap().try_mul(&z).unwrap(),
                x.try_mul(&y.try_mul(&z).unwrap()).unwrap()
            );
        }

        #[test]
        fn quad_times_conjugate_is_rational(u in small_rat(), v in small_rat()) {
            let x = q(u.clone(), v.clone());
            let p = x.try_mul(&x.conjugate()).unwrap();
            prop_assert!(p.surd_part().is_zero());
            prop_assert_eq!(p.rational_part().clone(), &u * &u - rat(3) * &v * &v);
            prop_assert_eq!(p.rational_part().clone(), x.norm());
        }

        #[test]
        fn int_det_multiplicative(x in small_mat(), y in small_mat()) {
            prop_assert_eq!((&x * &y).det(), x.det() * y.det());
        }

        #[test]
        fn ext_det_multiplicative_and_assoc(x in ext_mat(), y in ext_mat(), z in ext_mat()) {
            let xy = x.try_mul(&y).unwrap();
            prop_assert_eq!(xy.det(), x.det().try_mul(&y.det()).unwrap());
            prop_assert_eq!(xy.try_mul(&z).unwrap(), x.try_mul(&y.try_mul(&z).unwrap()).unwrap());
        }
    }
}
