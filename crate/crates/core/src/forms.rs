//! Indefinite binary quadratic forms `A x^2 + B xy + C y^2` and their cycles
//! of reduced forms.
//!
//! Reduction follows the classical rho operator: `rho(A, B, C) = (C, r, (r^2 - D) / 4C)`
//! where `r = -B mod 2C` is normalized into a window fixed by `|C|` and `sqrt(D)`.
//! `rho` is the action of `[[0, -1], [1, s]]`, so it never leaves the proper
//! equivalence class. Reduced forms of one class make up exactly one rho-cycle.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::exact::BigIntSer;

use crate::error::{Error, Result};
use crate::exact::{int_sqrt_exact, IntMat2};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryQuadraticForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl BinaryQuadraticForm {
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Self {
        Self { a, b, c }
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> Self {
        Self::new(a.into(), b.into(), c.into())
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn content(&self) -> BigInt {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    /// The form `f(p x + q y, r x + s y)` for `m = [[p, q], [r, s]]`.
    pub fn transform(&self, m: &IntMat2) -> Self {
        let (p, q, r, s) = (&m.a, &m.b, &m.c, &m.d);
        let two = BigInt::from(2);
        Self::new(
            self.eval(p, r),
            &two * &self.a * p * q + &self.b * (p * s + q * r) + &two * &self.c * r * s,
            self.eval(q, s),
        )
    }

    /// Reduced in the indefinite sense: `|sqrt(D) - 2|A|| < B < sqrt(D)`.
    pub fn is_reduced(&self) -> bool {
        let d = self.discriminant();
        if !d.is_positive() {
            return false;
        }
        let s = d.sqrt();
        is_reduced_with(&self.a, &self.b, &s)
    }

    fn rho(&self, d: &BigInt, s: &BigInt) -> Self {
        let r = normalize_residue(&-&self.b, &self.c, s);
        let next_c = (&r * &r - d) / (BigInt::from(4) * &self.c);
        Self::new(self.c.clone(), r, next_c)
    }
}

/// Serialized as `[A, B, C]`.
impl Serialize for BinaryQuadraticForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [BigIntSer(&self.a), BigIntSer(&self.b), BigIntSer(&self.c)].serialize(s)
    }
}

impl fmt::Display for BinaryQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// With `s = floor(sqrt D)` and `D` not a square, every comparison against
/// `sqrt(D)` reduces to an integer comparison against `s`.
fn is_reduced_with(a: &BigInt, b: &BigInt, s: &BigInt) -> bool {
    let two_a = BigInt::from(2) * a.abs();
    // b < sqrt D  <=>  b <= s ;  b > sqrt D - 2|a|  <=>  b > s - 2|a| ;
    // b > 2|a| - sqrt D  <=>  b + s >= 2|a|
    b.is_positive() && b <= s && *b > s - &two_a && b + s >= two_a
}

/// The unique `r = b mod 2|a|` lying in `(-|a|, |a|]` when `|a| > sqrt D`,
/// or in `(sqrt D - 2|a|, sqrt D)` otherwise.
fn normalize_residue(b: &BigInt, a: &BigInt, s: &BigInt) -> BigInt {
    let abs_a = a.abs();
    let modulus = BigInt::from(2) * &abs_a;
    let low = if abs_a > *s {
        // smallest admissible value is -|a| + 1
        -&abs_a + 1
    } else {
        s - &modulus + 1
    };
    let diff: BigInt = b - &low;
    let shift = diff.mod_floor(&modulus);
    low + shift
}

fn check_discriminant(f: &BinaryQuadraticForm) -> Result<(BigInt, BigInt)> {
    let d = f.discriminant();
    if !d.is_positive() || int_sqrt_exact(&d).is_some() {
        return Err(Error::BadDiscriminant(d));
    }
    let s = d.sqrt();
    Ok((d, s))
}

/// A reduced form properly equivalent to `f`.
pub fn reduce(f: &BinaryQuadraticForm) -> Result<BinaryQuadraticForm> {
    let (d, s) = check_discriminant(f)?;
    let mut g = f.clone();
    while !is_reduced_with(&g.a, &g.b, &s) {
        g = g.rho(&d, &s);
    }
    Ok(g)
}

/// Full cycle of reduced forms properly equivalent to `f`, rotated so the
/// lexicographically smallest `(A, B, C)` comes first. Two forms are properly
/// equivalent iff their cycles are equal.
pub fn reduce_cycle(f: &BinaryQuadraticForm) -> Result<Vec<BinaryQuadraticForm>> {
    let (d, s) = check_discriminant(f)?;
    let start = reduce(f)?;
    let mut cycle = vec![start.clone()];
    let mut g = start.rho(&d, &s);
    while g != start {
        cycle.push(g.clone());
        g = g.rho(&d, &s);
    }
    let min = cycle
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.cmp(y.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    cycle.rotate_left(min);
    Ok(cycle)
}

pub fn properly_equivalent(f: &BinaryQuadraticForm, g: &BinaryQuadraticForm) -> Result<bool> {
    Ok(f.discriminant() == g.discriminant() && reduce_cycle(f)? == reduce_cycle(g)?)
}

/// Every reduced form of discriminant `d`, sorted.
pub fn reduced_forms(d: &BigInt) -> Result<Vec<BinaryQuadraticForm>> {
    if !d.is_positive() || int_sqrt_exact(d).is_some() {
        return Err(Error::BadDiscriminant(d.clone()));
    }
    let s = d.sqrt();
    let four = BigInt::from(4);
    let mut out = Vec::new();
    let mut b = BigInt::from(1);
    while b <= s {
        let diff = d - &b * &b;
        if (&diff % &four).is_zero() {
            // a * c = -(D - b^2)/4 < 0
            let n = &diff / &four;
            for a_abs in divisors(&n) {
                for a in [a_abs.clone(), -a_abs.clone()] {
                    if is_reduced_with(&a, &b, &s) {
                        let c = -&n / &a;
                        out.push(BinaryQuadraticForm::new(a, b.clone(), c));
                    }
                }
            }
        }
        b += 1;
    }
    out.sort();
    Ok(out)
}

/// The reduced forms of discriminant `d` grouped into their rho-cycles.
pub fn reduced_cycles(d: &BigInt) -> Result<Vec<Vec<BinaryQuadraticForm>>> {
    let forms = reduced_forms(d)?;
    let mut seen = std::collections::BTreeSet::new();
    let mut cycles = Vec::new();
    for f in &forms {
        if seen.contains(f) {
            continue;
        }
        let cycle = reduce_cycle(f)?;
        seen.extend(cycle.iter().cloned());
        cycles.push(cycle);
    }
    cycles.sort();
    Ok(cycles)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = BigInt::from(1);
    while &k * &k <= n {
        if (&n % &k).is_zero() {
            let q = &n / &k;
            if q != k {
                large.push(q);
            }
            small.push(k.clone());
        }
        k += 1;
    }
    small.extend(large.into_iter().rev());
    small
}
