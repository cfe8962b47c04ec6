//! Local Hilbert symbols `(a, b)_v` over Q.
//!
//! `(a, b)_v = +1` iff `z^2 = a x^2 + b y^2` has a nonzero solution over the
//! completion Q_v. Rationals are replaced by integers in the same square class
//! (`n/d` becomes `n*d`) before the classical closed formulas are applied.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{legendre, prime_divisors};
use crate::error::{Error, Result};
use crate::exact::Rational;

/// A place of Q: a finite prime or the real place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Prime(u64),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Integer representative of the square class of a nonzero rational.
pub fn square_class_integer(r: &Rational) -> BigInt {
    r.numer() * r.denom()
}

/// Splits `n = p^e * u` with `p` not dividing `u`.
fn split_valuation(n: &BigInt, p: u64) -> (u32, BigInt) {
    let p = BigInt::from(p);
    let mut u = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = u.div_rem(&p);
        if !r.is_zero() {
            return (e, u);
        }
        u = q;
        e += 1;
    }
}

fn mod8(u: &BigInt) -> u8 {
    u.mod_floor(&BigInt::from(8)).to_u8().expect("reduced mod 8")
}

pub fn hilbert_symbol(a: &Rational, b: &Rational, place: Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroHilbertArgument);
    }
    let a = square_class_integer(a);
    let b = square_class_integer(b);
    Ok(hilbert_symbol_int(&a, &b, place))
}

fn hilbert_symbol_int(a: &BigInt, b: &BigInt, place: Place) -> i8 {
    match place {
        Place::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (alpha, u) = split_valuation(a, 2);
            let (beta, v) = split_valuation(b, 2);
            let (u8_, v8) = (mod8(&u), mod8(&v));
            let eps = |x: u8| ((x - 1) / 2) % 2;
            let omega = |x: u8| ((x as u32 * x as u32 - 1) / 8 % 2) as u8;
            let e = eps(u8_) * eps(v8) + (alpha % 2) as u8 * omega(v8) + (beta % 2) as u8 * omega(u8_);
            if e.is_multiple_of(2) {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (alpha, u) = split_valuation(a, p);
            let (beta, v) = split_valuation(b, p);
            let mut s: i8 = 1;
            if (alpha * beta) % 2 == 1 && ((p - 1) / 2) % 2 == 1 {
                s = -s;
            }
            if beta % 2 == 1 {
                s *= legendre(&u, p);
            }
            if alpha % 2 == 1 {
                s *= legendre(&v, p);
            }
            s
        }
    }
}

/// Places where `(a, b)_v` could be -1: infinity, 2, and primes dividing a or b.
pub fn candidate_places(a: &Rational, b: &Rational) -> Result<Vec<Place>> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroHilbertArgument);
    }
    let mut primes: BTreeSet<u64> = BTreeSet::from([2]);
    for r in [a, b] {
        primes.extend(prime_divisors(r.numer())?);
        primes.extend(prime_divisors(r.denom())?);
    }
    let mut places: Vec<Place> = primes.into_iter().map(Place::Prime).collect();
    places.push(Place::Infinity);
    Ok(places)
}

/// All places where the symbol is -1, in increasing order with infinity last.
pub fn ramified_places(a: &Rational, b: &Rational) -> Result<Vec<Place>> {
    let a_int = square_class_integer(a);
    let b_int = square_class_integer(b);
    Ok(candidate_places(a, b)?
        .into_iter()
        .filter(|&v| hilbert_symbol_int(&a_int, &b_int, v) == -1)
        .collect())
}
