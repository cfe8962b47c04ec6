//! Conjugacy classes in SL2(Z) / PSL2(Z): element kinds, primitivity, and
//! the count of primitive hyperbolic classes of a given trace.
//!
//! A hyperbolic `[[a, b], [c, d]]` of trace `t` corresponds to the form
//! `(c, d - a, -b)` of discriminant `t^2 - 4`. The correspondence is a
//! bijection onto all forms of that discriminant and intertwines conjugation
//! with proper equivalence, so conjugacy classes of trace `t` are exactly the
//! rho-cycles of reduced forms of discriminant `t^2 - 4`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::IntMat2;
use crate::forms::{reduce_cycle, reduced_cycles, BinaryQuadraticForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl ElementKind {
    /// Kind from the absolute value of the trace alone.
    pub fn from_abs_trace(abs_trace: &BigInt) -> Self {
        let two = BigInt::from(2);
        match abs_trace.cmp(&two) {
            std::cmp::Ordering::Less => ElementKind::Elliptic,
            std::cmp::Ordering::Equal => ElementKind::Parabolic,
            std::cmp::Ordering::Greater => ElementKind::Hyperbolic,
        }
    }

    pub fn from_trace_i64(trace: i64) -> Self {
        match trace.unsigned_abs() {
            0 | 1 => ElementKind::Elliptic,
            2 => ElementKind::Parabolic,
            _ => ElementKind::Hyperbolic,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ElementKind::Elliptic => "elliptic",
            ElementKind::Parabolic => "parabolic",
            ElementKind::Hyperbolic => "hyperbolic",
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify(m: &IntMat2) -> Result<ElementKind> {
    m.ensure_unimodular()?;
    Ok(ElementKind::from_abs_trace(&m.trace().abs()))
}

fn ensure_hyperbolic(m: &IntMat2) -> Result<()> {
    if classify(m)? != ElementKind::Hyperbolic {
        return Err(Error::NotHyperbolic(m.trace()));
    }
    Ok(())
}

/// Fixed-point form `(c, d - a, -b)` of a hyperbolic element.
pub fn matrix_to_form(m: &IntMat2) -> Result<BinaryQuadraticForm> {
    ensure_hyperbolic(m)?;
    Ok(BinaryQuadraticForm::new(
        m.c.clone(),
        &m.d - &m.a,
        -&m.b,
    ))
}

/// Inverse of [`matrix_to_form`] for a given trace `t` with `t = B mod 2`.
pub fn form_to_matrix(f: &BinaryQuadraticForm, trace: &BigInt) -> IntMat2 {
    let two = BigInt::from(2);
    IntMat2::new(
        (trace - &f.b) / &two,
        -&f.c,
        f.a.clone(),
        (trace + &f.b) / &two,
    )
}

/// `V_k(s) = tr(beta^k)` for `tr(beta) = s`, together with `U_{k-1}(s)`
/// and `U_{k-2}(s)` so that `beta^k = U_{k-1} beta - U_{k-2} I`.
fn chebyshev(s: &BigInt, k: u32) -> (BigInt, BigInt, BigInt) {
    // (U_{n-2}, U_{n-1}) starting at n = 1: (U_{-1}, U_0) = (0, 1)
    let mut u_prev = BigInt::zero();
    let mut u_cur = BigInt::one();
    for _ in 1..k {
        let next = s * &u_cur - &u_prev;
        u_prev = std::mem::replace(&mut u_cur, next);
    }
    let v = s * &u_cur - BigInt::from(2) * &u_prev;
    (v, u_cur, u_prev)
}

/// A `k`-th root (`k >= 2`) of `target`, which must have positive trace > 2.
/// Roots are taken with positive trace `s >= 3`; `odd_only` restricts `k`.
fn positive_root(target: &IntMat2, odd_only: bool) -> Option<(IntMat2, u32)> {
    let t = target.trace();
    debug_assert!(t > BigInt::from(2));
    let three = BigInt::from(3);
    let mut k = 2u32;
    loop {
        if chebyshev(&three, k).0 > t {
            return None;
        }
        if !(odd_only && k.is_multiple_of(2)) {
            let mut s = three.clone();
            loop {
                let (v, u1, u2) = chebyshev(&s, k);
                if v > t {
                    break;
                }
                if v == t {
                    // beta = (target + U_{k-2} I) / U_{k-1}
                    let shifted = IntMat2::new(
                        &target.a + &u2,
                        target.b.clone(),
                        target.c.clone(),
                        &target.d + &u2,
                    );
                    if shifted.entries().iter().all(|e| (*e % &u1).is_zero()) {
                        let beta = IntMat2::new(
                            &shifted.a / &u1,
                            &shifted.b / &u1,
                            &shifted.c / &u1,
                            &shifted.d / &u1,
                        );
                        if beta.is_unimodular() && beta.pow(k) == *target {
                            return Some((beta, k));
                        }
                    }
                }
                s += 1;
            }
        }
        k += 1;
    }
}

/// Some `beta` in SL2(Z) and `k >= 2` with `beta^k = +-m`, if one exists.
pub fn proper_root(m: &IntMat2) -> Result<Option<(IntMat2, u32)>> {
    ensure_hyperbolic(m)?;
    let target = if m.trace().is_negative() { -m } else { m.clone() };
    Ok(positive_root(&target, false))
}

/// Primitive in PSL2(Z): not `+-beta^k` for any `k >= 2`.
pub fn is_primitive(m: &IntMat2) -> Result<bool> {
    Ok(proper_root(m)?.is_none())
}

/// Primitive in SL2(Z) itself: not `beta^k` for any `k >= 2` (no sign allowed).
pub fn is_primitive_sl2(m: &IntMat2) -> Result<bool> {
    ensure_hyperbolic(m)?;
    if m.trace().is_positive() {
        Ok(positive_root(m, false).is_none())
    } else {
        // beta^k has negative trace only for odd k and tr(beta) < 0;
        // then (-beta)^k = -m.
        Ok(positive_root(&-m, true).is_none())
    }
}

/// A PSL2(Z) conjugacy class of hyperbolic elements, carried by its canonical
/// cycle of reduced forms. The representative has positive trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugacyClass {
    #[serde(serialize_with = "crate::exact::serialize_bigint")]
    pub trace: BigInt,
    pub representative: IntMat2,
    pub canonical_cycle: Vec<BinaryQuadraticForm>,
    /// Primitive in PSL2(Z).
    pub primitive: bool,
    /// How many of the two SL2(Z) lifts `+-representative` are primitive in SL2(Z).
    pub sl2_primitive_lifts: u8,
}

impl ConjugacyClass {
    fn from_cycle(trace: &BigInt, cycle: Vec<BinaryQuadraticForm>) -> Self {
        let representative = form_to_matrix(&cycle[0], trace);
        let primitive = is_primitive(&representative).expect("hyperbolic representative");
        let lifts = [representative.clone(), -&representative]
            .iter()
            .filter(|m| is_primitive_sl2(m).expect("hyperbolic"))
            .count() as u8;
        Self {
            trace: trace.clone(),
            representative,
            canonical_cycle: cycle,
            primitive,
            sl2_primitive_lifts: lifts,
        }
    }

    /// Whether `m` (either sign) lies in this PSL2 class.
    pub fn contains(&self, m: &IntMat2) -> Result<bool> {
        let other = conjugacy_class_of(m)?;
        Ok(other.canonical_cycle == self.canonical_cycle && other.trace == self.trace)
    }
}

pub fn conjugacy_class_of(m: &IntMat2) -> Result<ConjugacyClass> {
    ensure_hyperbolic(m)?;
    let m = if m.trace().is_negative() { -m } else { m.clone() };
    let cycle = reduce_cycle(&matrix_to_form(&m)?)?;
    Ok(ConjugacyClass::from_cycle(&m.trace(), cycle))
}

/// All hyperbolic PSL2(Z) classes of trace `+-t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceClasses {
    pub trace: u64,
    #[serde(serialize_with = "crate::exact::serialize_bigint")]
    pub discriminant: BigInt,
    pub classes: Vec<ConjugacyClass>,
}

impl TraceClasses {
    /// Primitive PSL2(Z) classes of trace +-t (the count used in bound reports).
    pub fn mu0(&self) -> u64 {
        self.classes.iter().filter(|c| c.primitive).count() as u64
    }

    /// Primitive SL2(Z) classes of trace t or -t.
    pub fn mu0_sl2(&self) -> u64 {
        self.classes.iter().map(|c| c.sl2_primitive_lifts as u64).sum()
    }

    /// All classes, primitive or not.
    pub fn n_cycles(&self) -> u64 {
        self.classes.len() as u64
    }

    pub fn primitive_classes(&self) -> impl Iterator<Item = &ConjugacyClass> {
        self.classes.iter().filter(|c| c.primitive)
    }
}

pub fn classes_of_trace(t: u64) -> Result<TraceClasses> {
    if t < 3 {
        return Err(Error::TraceTooSmall(t as i64));
    }
    let trace = BigInt::from(t);
    let discriminant = &trace * &trace - BigInt::from(4);
    let classes = reduced_cycles(&discriminant)?
        .into_iter()
        .map(|cycle| ConjugacyClass::from_cycle(&trace, cycle))
        .collect();
    Ok(TraceClasses {
        trace: t,
        discriminant,
        classes,
    })
}

/// Number of primitive hyperbolic PSL2(Z) classes with trace `+-t`.
pub fn mu0(t: i64) -> Result<u64> {
    if t < 3 {
        return Err(Error::TraceTooSmall(t));
    }
    Ok(classes_of_trace(t as u64)?.mu0())
}

/// Classes for every trace in `range`, computed in parallel, returned in order.
pub fn classes_in_range(range: std::ops::RangeInclusive<u64>) -> Result<Vec<TraceClasses>> {
    range.into_par_iter().map(classes_of_trace).collect()
}

/// `gcd` of a hyperbolic element's off-diagonal and diagonal-difference entries.
pub fn form_content(m: &IntMat2) -> Result<BigInt> {
    Ok(matrix_to_form(m)?.a.gcd(&(&m.d - &m.a)).gcd(&m.b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> IntMat2 {
        IntMat2::from_i64(a, b, c, d)
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&m(1, 1, 0, 1)).unwrap(), ElementKind::Parabolic);
        assert_eq!(classify(&m(0, -1, 1, 0)).unwrap(), ElementKind::Elliptic);
        assert_eq!(classify(&m(0, -1, 1, 3)).unwrap(), ElementKind::Hyperbolic);
        assert_eq!(classify(&m(-1, 0, 0, -1)).unwrap(), ElementKind::Parabolic);
        assert!(matches!(classify(&m(2, 0, 0, 2)), Err(Error::NotUnimodular(_))));
    }

    #[test]
    fn form_examples() {
        let f = matrix_to_form(&m(0, -1, 1, 3)).unwrap();
        assert_eq!(f, BinaryQuadraticForm::from_i64(1, 3, 1));
        assert_eq!(f.discriminant(), BigInt::from(5));
        let g = matrix_to_form(&m(2, 1, 1, 1)).unwrap();
        assert_eq!(g, BinaryQuadraticForm::from_i64(1, -1, -1));
        assert_eq!(g.discriminant(), BigInt::from(5));
        assert!(matrix_to_form(&m(1, 1, 0, 1)).is_err());
        assert_eq!(form_to_matrix(&f, &BigInt::from(3)), m(0, -1, 1, 3));
    }

    #[test]
    fn primitivity_examples() {
        assert!(is_primitive(&m(0, -1, 1, 3)).unwrap());
        assert!(!is_primitive(&m(5, 3, 3, 2)).unwrap());
        assert_eq!(proper_root(&m(5, 3, 3, 2)).unwrap().unwrap().1, 2);
        assert!(!is_primitive(&-m(5, 3, 3, 2)).unwrap());
        assert!(is_primitive(&m(1, 1, 0, 1)).is_err());
        // [[1,3],[3,10]] has an imprimitive form (content 3) yet is no power.
        let x = m(1, 3, 3, 10);
        assert_eq!(form_content(&x).unwrap(), BigInt::from(3));
        assert!(is_primitive(&x).unwrap());
    }

    #[test]
    fn sl2_primitivity_distinguishes_signs() {
        // -beta^2 with beta of trace 3 is primitive in SL2(Z) (no odd root)
        // but not in PSL2(Z).
        let b2 = m(2, 1, 1, 1).pow(2);
        assert!(!is_primitive_sl2(&b2).unwrap());
        assert!(is_primitive_sl2(&-&b2).unwrap());
        let b3 = m(2, 1, 1, 1).pow(3);
        assert!(!is_primitive_sl2(&-&b3).unwrap());
    }

    #[test]
    fn trace_three_has_one_class() {
        let tc = classes_of_trace(3).unwrap();
        assert_eq!(tc.mu0(), 1);
        assert_eq!(tc.mu0_sl2(), 2);
        assert_eq!(tc.n_cycles(), 1);
        assert_eq!(mu0(3).unwrap(), 1);
        assert!(tc.classes[0].contains(&m(0, -1, 1, 3)).unwrap());
        assert!(tc.classes[0].contains(&m(2, 1, 1, 1)).unwrap());
        assert!(tc.classes[0].contains(&m(0, 1, -1, -3)).unwrap());
    }

    #[test]
    fn trace_seven_contains_a_square() {
        // [[2,3],[3,5]] = [[1,1],[1,2]]^2 has trace 7.
        let tc = classes_of_trace(7).unwrap();
        let sq = m(2, 3, 3, 5);
        let class = tc.classes.iter().find(|c| c.contains(&sq).unwrap()).unwrap();
        assert!(!class.primitive);
        assert_eq!(tc.mu0(), tc.n_cycles() - 1);
    }

    #[test]
    fn small_traces_rejected() {
        assert!(matches!(mu0(2), Err(Error::TraceTooSmall(2))));
        assert!(classes_of_trace(1).is_err());
    }

    #[test]
    fn witness_exists_for_every_trace() {
        for t in 3..=50u64 {
            let tc = classes_of_trace(t).unwrap();
            assert!(tc.mu0() >= 1, "t = {t}");
            let w = m(0, -1, 1, t as i64);
            assert!(tc.primitive_classes().any(|c| c.contains(&w).unwrap()));
        }
    }

    #[test]
    fn classes_are_pairwise_distinct_with_correct_traces() {
        for tc in classes_in_range(3..=40).unwrap() {
            for (i, c) in tc.classes.iter().enumerate() {
                assert_eq!(c.representative.trace(), BigInt::from(tc.trace));
                assert!(c.representative.is_unimodular());
                for d in &tc.classes[i + 1..] {
                    assert!(!c.contains(&d.representative).unwrap());
                }
            }
        }
    }

    fn sl2_word() -> impl Strategy<Value = IntMat2> {
        proptest::collection::vec(0u8..3, 0..10).prop_map(|word| {
            let gens = [m(0, -1, 1, 0), m(1, 1, 0, 1), m(1, -1, 0, 1)];
            word.iter().fold(IntMat2::identity(), |acc, &w| &acc * &gens[w as usize])
        })
    }

    fn hyperbolic() -> impl Strategy<Value = IntMat2> {
        (3i64..40, sl2_word(), any::<bool>()).prop_map(|(t, g, neg)| {
            let x = m(0, -1, 1, t).conjugate_by(&g);
            if neg { -x } else { x }
        })
    }

    proptest! {
        #[test]
        fn conjugation_preserves_cycle(x in hyperbolic(), g in sl2_word()) {
            let y = x.conjugate_by(&g);
            let cx = conjugacy_class_of(&x).unwrap();
            let cy = conjugacy_class_of(&y).unwrap();
            prop_assert_eq!(cx.canonical_cycle, cy.canonical_cycle);
            // the form of g x g^-1 is the form of x transformed by g^-1
            let fx = matrix_to_form(&x).unwrap();
            prop_assert_eq!(matrix_to_form(&y).unwrap(), fx.transform(&g.adjugate()));
        }

        #[test]
        fn classify_is_conjugation_and_sign_invariant(x in hyperbolic(), g in sl2_word()) {
            let k = classify(&x).unwrap();
            prop_assert_eq!(classify(&x.conjugate_by(&g)).unwrap(), k);
            prop_assert_eq!(classify(&-&x).unwrap(), k);
        }

        #[test]
        fn proper_powers_are_imprimitive(x in hyperbolic(), k in 2u32..5) {
            prop_assert!(!is_primitive(&x.pow(k)).unwrap());
            let (root, e) = proper_root(&x.pow(k)).unwrap().unwrap();
            let p = root.pow(e);
            prop_assert!(p == x.pow(k) || p == -x.pow(k));
        }
    }
}
