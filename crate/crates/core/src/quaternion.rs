//! Rational quaternion algebras `(a, b / Q)` with `i^2 = a`, `j^2 = b`, `ij = -ji = k`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::exact_sqrt_i128;
use crate::error::{Error, Result};
use crate::exact::{int_sqrt_exact, ExtMat2, QuadExtScalar, Rational};
use crate::hilbert::{ramified_places, square_class_integer, Place};

/// Coordinate height searched for split witnesses unless told otherwise.
pub const DEFAULT_ISOTROPY_BOUND: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuaternionAlgebra {
    a: Rational,
    b: Rational,
}

impl QuaternionAlgebra {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::ZeroAlgebraParameter);
        }
        Ok(Self { a, b })
    }

    pub fn from_ints(a: i64, b: i64) -> Result<Self> {
        Self::new(Rational::from_integer(a.into()), Rational::from_integer(b.into()))
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn element(&self, coords: [Rational; 4]) -> Quaternion {
        Quaternion {
            coords,
            algebra: self.clone(),
        }
    }

    pub fn element_from_ints(&self, coords: [i64; 4]) -> Quaternion {
        self.element(coords.map(|c| Rational::from_integer(c.into())))
    }

    pub fn one(&self) -> Quaternion {
        self.element_from_ints([1, 0, 0, 0])
    }

    pub fn i(&self) -> Quaternion {
        self.element_from_ints([0, 1, 0, 0])
    }

    pub fn j(&self) -> Quaternion {
        self.element_from_ints([0, 0, 1, 0])
    }

    pub fn k(&self) -> Quaternion {
        self.element_from_ints([0, 0, 0, 1])
    }

    /// The norm form `x0^2 - a x1^2 - b x2^2 + ab x3^2` on a coordinate vector.
    pub fn norm_form(&self, x: &[Rational; 4]) -> Rational {
        let [x0, x1, x2, x3] = x;
        x0 * x0 - &self.a * x1 * x1 - &self.b * x2 * x2 + &self.a * &self.b * x3 * x3
    }
}

impl fmt::Display for QuaternionAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}", self.a, self.b)
    }
}

/// `x0 + x1 i + x2 j + x3 k` with rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quaternion {
    coords: [Rational; 4],
    algebra: QuaternionAlgebra,
}

impl Quaternion {
    pub fn coords(&self) -> &[Rational; 4] {
        &self.coords
    }

    pub fn algebra(&self) -> &QuaternionAlgebra {
        &self.algebra
    }

    fn same_algebra(&self, other: &Quaternion) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch(
                self.algebra.to_string(),
                other.algebra.to_string(),
            ));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Quaternion) -> Result<Quaternion> {
        self.same_algebra(other)?;
        let (a, b) = (&self.algebra.a, &self.algebra.b);
        let [x0, x1, x2, x3] = &self.coords;
        let [y0, y1, y2, y3] = &other.coords;
        let ab = a * b;
        let c0 = x0 * y0 + a * x1 * y1 + b * x2 * y2 - &ab * x3 * y3;
        let c1 = x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2;
        let c2 = x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1;
        let c3 = x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1;
        Ok(self.algebra.element([c0, c1, c2, c3]))
    }

    pub fn try_add(&self, other: &Quaternion) -> Result<Quaternion> {
        self.same_algebra(other)?;
        let c = std::array::from_fn(|n| &self.coords[n] + &other.coords[n]);
        Ok(self.algebra.element(c))
    }

    pub fn scale(&self, r: &Rational) -> Quaternion {
        self.algebra.element(self.coords.clone().map(|c| c * r))
    }

    pub fn conjugate(&self) -> Quaternion {
        let [x0, x1, x2, x3] = self.coords.clone();
        self.algebra.element([x0, -x1, -x2, -x3])
    }

    pub fn reduced_norm(&self) -> Rational {
        self.algebra.norm_form(&self.coords)
    }

    pub fn reduced_trace(&self) -> Rational {
        &self.coords[0] * Rational::from_integer(2.into())
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    pub fn integer_coords(&self) -> Result<[BigInt; 4]> {
        if !self.is_integral() {
            return Err(Error::NonIntegral);
        }
        Ok(self.coords.clone().map(|c| c.to_integer()))
    }

    /// Matrix image over Q(sqrt a):
    /// `[[x0 + x1 sqrt a, x2 + x3 sqrt a], [b(x2 - x3 sqrt a), x0 - x1 sqrt a]]`.
    pub fn embed(&self) -> Result<ExtMat2> {
        let a = self.algebra.a.clone();
        if !a.is_positive() {
            return Err(Error::NonRealEmbedding(Box::new(a)));
        }
        let [x0, x1, x2, x3] = &self.coords;
        let s = |u: &Rational, v: Rational| QuadExtScalar::new(u.clone(), v, a.clone());
        ExtMat2::new(
            s(x0, x1.clone())?,
            s(x2, x3.clone())?,
            s(x2, -x3.clone())?.scale(&self.algebra.b),
            s(x0, -x1.clone())?,
        )
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x0, x1, x2, x3] = &self.coords;
        write!(f, "{x0} + {x1}i + {x2}j + {x3}k")
    }
}

/// Outcome of the splitting test, carrying independently checkable evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
#[allow(clippy::large_enum_variant)]
pub enum SplittingCertificate {
    /// The norm form is isotropic; `witness` is a nonzero zero of it.
    Split {
        #[serde(serialize_with = "ser_rationals")]
        witness: [Rational; 4],
    },
    /// The algebra is a division algebra; `ramified` lists the places where
    /// the local Hilbert symbol is -1 (always an even, nonempty set).
    Division { ramified: Vec<Place> },
}

fn ser_rationals<S: serde::Serializer>(
    v: &[Rational; 4],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

impl SplittingCertificate {
    pub fn is_division(&self) -> bool {
        matches!(self, SplittingCertificate::Division { .. })
    }

    /// Re-derives the certificate's claim from scratch.
    pub fn check(&self, alg: &QuaternionAlgebra) -> bool {
        match self {
            SplittingCertificate::Split { witness } => {
                witness.iter().any(|c| !c.is_zero()) && alg.norm_form(witness).is_zero()
            }
            SplittingCertificate::Division { ramified } => {
                !ramified.is_empty()
                    && ramified.len() % 2 == 0
                    && ramified_places(alg.a(), alg.b()).as_deref() == Ok(ramified.as_slice())
            }
        }
    }
}

/// Decides whether `(a, b / Q)` is a division algebra, with the default
/// witness search bound.
pub fn is_division(alg: &QuaternionAlgebra) -> Result<SplittingCertificate> {
    is_division_with_bound(alg, DEFAULT_ISOTROPY_BOUND)
}

/// Local symbols decide the verdict (Hasse-Minkowski). In the split case a
/// zero of `z^2 = a x^2 + b y^2` is searched by increasing height up to `bound`
/// and lifted to the norm form as `(z, x, y, 0)`.
pub fn is_division_with_bound(alg: &QuaternionAlgebra, bound: u64) -> Result<SplittingCertificate> {
    let ramified = ramified_places(alg.a(), alg.b())?;
    if !ramified.is_empty() {
        return Ok(SplittingCertificate::Division { ramified });
    }
    let witness = find_isotropic_vector(alg, bound)?;
    debug_assert!(alg.norm_form(&witness).is_zero());
    Ok(SplittingCertificate::Split { witness })
}

fn find_isotropic_vector(alg: &QuaternionAlgebra, bound: u64) -> Result<[Rational; 4]> {
    // a = A / da^2 with A = num*den, likewise for b.
    let big_a = square_class_integer(alg.a());
    let big_b = square_class_integer(alg.b());
    let (xy, z) = match (big_a.to_i64(), big_b.to_i64()) {
        (Some(sa), Some(sb)) if sa.unsigned_abs() < 1 << 40 && sb.unsigned_abs() < 1 << 40 => {
            search_conic_i128(sa as i128, sb as i128, bound)
                .map(|(x, y, z)| ((BigInt::from(x), BigInt::from(y)), BigInt::from(z)))
        }
        _ => search_conic_big(&big_a, &big_b, bound),
    }
    .ok_or(Error::SearchExhausted { bound })?;
    let (x, y) = xy;
    let int = |n: BigInt| Rational::from_integer(n);
    let da = alg.a().denom().clone();
    let db = alg.b().denom().clone();
    let witness = [
        int(z),
        int(x * da),
        int(y * db),
        Rational::zero(),
    ];
    // a (da x)^2 = A x^2 since A = a da^2.
    if !alg.norm_form(&witness).is_zero() {
        return Err(Error::SearchExhausted { bound });
    }
    Ok(witness)
}

/// Nonzero `(x, y)` with `max(|x|,|y|) <= bound` and `A x^2 + B y^2` a square,
/// smallest height first.
fn search_conic_i128(a: i128, b: i128, bound: u64) -> Option<(i128, i128, i128)> {
    let bound = bound as i128;
    for h in 1..=bound {
        for other in 0..=h {
            for (x, y) in [(h, other), (other, h)] {
                if let Some(z) = exact_sqrt_i128(a * x * x + b * y * y) {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

fn search_conic_big(a: &BigInt, b: &BigInt, bound: u64) -> Option<((BigInt, BigInt), BigInt)> {
    for h in 1..=bound {
        let h = BigInt::from(h);
        let mut other = BigInt::zero();
        while other <= h {
            for (x, y) in [(&h, &other), (&other, &h)] {
                if let Some(z) = int_sqrt_exact(&(a * x * x + b * y * y)) {
                    return Some(((x.clone(), y.clone()), z));
                }
            }
            other += BigInt::one();
        }
    }
    None
}
