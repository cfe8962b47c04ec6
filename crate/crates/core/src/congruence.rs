//! Principal congruence subgroups in the modular and quaternionic settings.
//!
//! Enumerations are always truncated to a height window and make no claim
//! beyond it. Internally they run on `i64` coordinates; entries are bounded
//! by the window so products cannot overflow for any practical height.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{exact_sqrt_i128, ext_gcd, factor_u64, is_prime};
use crate::error::{Error, Result};
use crate::exact::IntMat2;
use crate::modular::ElementKind;
use crate::quaternion::{Quaternion, QuaternionAlgebra};

/// Which arithmetic group the level refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    Modular,
    /// Norm-one integral units of `(p, -1 / Q)`, `p` prime and `p = 3 mod 4`.
    Quaternionic { p: u64 },
}

impl Setting {
    pub fn quaternionic(p: u64) -> Result<Self> {
        check_quaternion_prime(p)?;
        Ok(Setting::Quaternionic { p })
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Setting::Modular => f.write_str("modular"),
            Setting::Quaternionic { p } => write!(f, "quaternionic(p={p})"),
        }
    }
}

impl Serialize for Setting {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CongruenceLevel {
    n: u64,
    setting: Setting,
}

impl CongruenceLevel {
    pub fn new(n: u64, setting: Setting) -> Result<Self> {
        if n < 2 {
            return Err(Error::LevelTooSmall { got: n, min: 2 });
        }
        if let Setting::Quaternionic { p } = setting {
            check_quaternion_prime(p)?;
        }
        Ok(Self { n, setting })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn setting(&self) -> Setting {
        self.setting
    }
}

/// Height truncation: every matrix entry / quaternion coordinate has
/// absolute value at most `height`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EnumerationWindow {
    height: u64,
}

impl EnumerationWindow {
    pub fn new(height: u64) -> Result<Self> {
        if height == 0 {
            return Err(Error::Domain("height bound must be at least 1".into()));
        }
        if height > 1 << 24 {
            return Err(Error::Domain(format!("height bound {height} is too large")));
        }
        Ok(Self { height })
    }

    pub fn height(&self) -> u64 {
        self.height
    }
}

pub fn check_quaternion_prime(p: u64) -> Result<()> {
    if is_prime(p) && p % 4 == 3 {
        Ok(())
    } else {
        Err(Error::BadQuaternionPrime(p))
    }
}

fn check_level(n: u64, min: u64) -> Result<()> {
    if n < min {
        Err(Error::LevelTooSmall { got: n, min })
    } else {
        Ok(())
    }
}

/// `m = I mod N` entrywise.
pub fn in_gamma_n(m: &IntMat2, n: u64) -> Result<bool> {
    m.ensure_unimodular()?;
    check_level(n, 1)?;
    let n = BigInt::from(n);
    let one = BigInt::one();
    let is_zero = |x: &BigInt| x.mod_floor(&n).is_zero();
    Ok(is_zero(&(&m.a - &one)) && is_zero(&m.b) && is_zero(&m.c) && is_zero(&(&m.d - &one)))
}

/// `|SL2(Z/NZ)| = N^3 prod_{p | N} (1 - p^-2)`.
pub fn sl2_order_mod(n: u64) -> Result<u64> {
    check_level(n, 2)?;
    Ok(factor_u64(n)
        .into_iter()
        .map(|(p, e)| p.pow(3 * e - 2) * (p * p - 1))
        .product())
}

/// Index of the image of Gamma(N) in PSL2(Z); `-I` is not in Gamma(N) for N >= 3.
pub fn psl2_index(n: u64) -> Result<u64> {
    check_level(n, 3)?;
    Ok(sl2_order_mod(n)? / 2)
}

/// `[[0, -1], [1, N]]`: trace N, determinant 1.
pub fn trace_witness(n: u64) -> Result<IntMat2> {
    check_level(n, 3)?;
    Ok(IntMat2::new(
        BigInt::zero(),
        -BigInt::one(),
        BigInt::one(),
        BigInt::from(n),
    ))
}

/// `-beta^2` for `tr(beta) = +-N`. By Cayley-Hamilton `-beta^2 = I - tr(beta) beta`,
/// which is `I mod N` with trace `-(N^2 - 2)`.
pub fn systole_witness(beta: &IntMat2, n: u64) -> Result<IntMat2> {
    beta.ensure_unimodular()?;
    check_level(n, 2)?;
    let tr = beta.trace();
    if tr.abs() != BigInt::from(n) {
        return Err(Error::WrongWitnessTrace { trace: tr, level: n });
    }
    let w = -(beta * beta);
    let expected_trace = -(BigInt::from(n) * BigInt::from(n) - BigInt::from(2));
    assert_eq!(w.trace(), expected_trace, "Cayley-Hamilton trace identity");
    assert!(in_gamma_n(&w, n)?, "-beta^2 must reduce to I mod N");
    Ok(w)
}

/// Elements of Gamma(N) in the window whose top-left entry is `a`.
///
/// With `a = 1 mod N` and `c = 0 mod N` coprime, solutions of `ad - bc = 1`
/// form the line `(b, d) = (b0 + k a, d0 + k c)`. Every such `d` is already
/// `1 mod N`, and `b = 0 mod N` fixes `k` modulo N.
fn gamma_n_row(n: i64, h: i64, a: i64) -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    let c_max = h - h.rem_euclid(n);
    let mut c = -c_max;
    while c <= c_max {
        if c == 0 {
            if a == 1 {
                let b_max = h - h.rem_euclid(n);
                let mut b = -b_max;
                while b <= b_max {
                    out.push([1, b, 0, 1]);
                    b += n;
                }
            }
            c += n;
            continue;
        }
        let (g, x, y) = ext_gcd(a, c);
        if g != 1 {
            c += n;
            continue;
        }
        // a x + c y = 1  =>  d0 = x, b0 = -y
        let (b0, d0) = (-y, x);
        let (lo_b, hi_b) = k_interval(b0, a, h);
        let (lo_d, hi_d) = k_interval(d0, c, h);
        let lo = lo_b.max(lo_d);
        let hi = hi_b.min(hi_d);
        if lo <= hi {
            // need b0 + k a = b0 + k = 0 mod n
            let residue = (-b0).rem_euclid(n);
            let mut k = lo + (residue - lo).rem_euclid(n);
            while k <= hi {
                let b = b0 + k * a;
                let d = d0 + k * c;
                debug_assert_eq!(a * d - b * c, 1);
                debug_assert_eq!((a - 1) + (d - 1) + (a - 1) * (d - 1) - c * b, 0);
                out.push([a, b, c, d]);
                k += n;
            }
        }
        c += n;
    }
    out
}

/// Integers `k` with `|base + k * step| <= h`, as a closed interval.
fn k_interval(base: i64, step: i64, h: i64) -> (i64, i64) {
    let (lo, hi) = ((-h - base), (h - base));
    let (lo, hi, s) = if step > 0 { (lo, hi, step) } else { (-hi, -lo, -step) };
    (Integer::div_ceil(&lo, &s), Integer::div_floor(&hi, &s))
}

fn gamma_n_top_left(n: i64, h: i64) -> Vec<i64> {
    // a = 1 mod n, |a| <= h
    let first = -h + (1 - (-h)).rem_euclid(n);
    (0..)
        .map(|i| first + i * n)
        .take_while(|&a| a <= h)
        .collect()
}

/// All of Gamma(N) in the window as `[a, b, c, d]`, lexicographically sorted.
pub fn gamma_n_coords(n: u64, window: EnumerationWindow) -> Result<Vec<[i64; 4]>> {
    check_level(n, 3)?;
    let (n, h) = (n as i64, window.height() as i64);
    let mut rows: Vec<Vec<[i64; 4]>> = gamma_n_top_left(n, h)
        .into_par_iter()
        .map(|a| {
            let mut r = gamma_n_row(n, h, a);
            r.sort_unstable();
            r
        })
        .collect();
    Ok(rows.drain(..).flatten().collect())
}

pub fn enumerate_gamma_n(n: u64, window: EnumerationWindow) -> Result<Vec<IntMat2>> {
    Ok(gamma_n_coords(n, window)?
        .into_iter()
        .map(|[a, b, c, d]| IntMat2::from_i64(a, b, c, d))
        .collect())
}

/// Summary of a windowed scan for elements breaking a trace gap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceGapReport {
    pub setting: Setting,
    pub level: u64,
    pub height: u64,
    /// The gap: every non-parabolic element other than the identity is
    /// expected to have `|tr| >= bound`.
    pub bound: i64,
    pub scanned: u64,
    pub identity_like: u64,
    pub parabolic: u64,
    pub elliptic: u64,
    pub hyperbolic: u64,
    /// Smallest `|tr|` among hyperbolic elements seen, if any.
    pub min_hyperbolic_trace: Option<i64>,
    pub violations: Vec<[i64; 4]>,
}

impl TraceGapReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `|tr| >= N^2 - 2` for every element of Gamma(N) in the window
/// with `|tr| != 2`.
pub fn modular_trace_gap(n: u64, window: EnumerationWindow) -> Result<TraceGapReport> {
    check_level(n, 3)?;
    let (ni, h) = (n as i64, window.height() as i64);
    let bound = ni * ni - 2;
    let partials: Vec<TraceGapReport> = gamma_n_top_left(ni, h)
        .into_par_iter()
        .map(|a| {
            let mut r = empty_report(Setting::Modular, n, window, bound);
            for m in gamma_n_row(ni, h, a) {
                tally(&mut r, m, m[0] + m[3], m == [1, 0, 0, 1]);
            }
            r
        })
        .collect();
    Ok(merge_reports(Setting::Modular, n, window, bound, partials))
}

fn empty_report(setting: Setting, level: u64, window: EnumerationWindow, bound: i64) -> TraceGapReport {
    TraceGapReport {
        setting,
        level,
        height: window.height(),
        bound,
        scanned: 0,
        identity_like: 0,
        parabolic: 0,
        elliptic: 0,
        hyperbolic: 0,
        min_hyperbolic_trace: None,
        violations: Vec::new(),
    }
}

fn tally(r: &mut TraceGapReport, coords: [i64; 4], trace: i64, is_identity: bool) {
    r.scanned += 1;
    if is_identity {
        r.identity_like += 1;
        return;
    }
    let kind = ElementKind::from_trace_i64(trace);
    match kind {
        ElementKind::Parabolic => r.parabolic += 1,
        ElementKind::Elliptic => r.elliptic += 1,
        ElementKind::Hyperbolic => {
            r.hyperbolic += 1;
            let t = trace.abs();
            r.min_hyperbolic_trace = Some(r.min_hyperbolic_trace.map_or(t, |m| m.min(t)));
        }
    }
    if kind != ElementKind::Parabolic && trace.abs() < r.bound {
        r.violations.push(coords);
    }
}

fn merge_reports(
    setting: Setting,
    level: u64,
    window: EnumerationWindow,
    bound: i64,
    parts: Vec<TraceGapReport>,
) -> TraceGapReport {
    let mut out = empty_report(setting, level, window, bound);
    for p in parts {
        out.scanned += p.scanned;
        out.identity_like += p.identity_like;
        out.parabolic += p.parabolic;
        out.elliptic += p.elliptic;
        out.hyperbolic += p.hyperbolic;
        out.min_hyperbolic_trace = match (out.min_hyperbolic_trace, p.min_hyperbolic_trace) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        out.violations.extend(p.violations);
    }
    out.violations.sort_unstable();
    out
}

/// Integral solutions of `x0^2 - p x1^2 + x2^2 - p x3^2 = 1` with every
/// `|x_i| <= H`, lexicographically sorted. Rows are split on `x1` and run in
/// parallel.
pub fn quat_unit_coords(p: u64, window: EnumerationWindow) -> Result<Vec<[i64; 4]>> {
    check_quaternion_prime(p)?;
    let (p, h) = (p as i64, window.height() as i64);
    let rows: Vec<Vec<[i64; 4]>> = (-h..=h)
        .into_par_iter()
        .map(|x1| {
            let mut row = Vec::new();
            for x3 in -h..=h {
                // x0^2 + x2^2 = 1 + p (x1^2 + x3^2)
                let target = 1 + p as i128 * (x1 as i128 * x1 as i128 + x3 as i128 * x3 as i128);
                if target > 2 * (h as i128) * (h as i128) {
                    continue;
                }
                for x0 in -h..=h {
                    let rest = target - x0 as i128 * x0 as i128;
                    if rest < 0 {
                        continue;
                    }
                    if let Some(x2) = exact_sqrt_i128(rest) {
                        let x2 = x2 as i64;
                        if x2 <= h {
                            row.push([x0, x1, x2, x3]);
                            if x2 != 0 {
                                row.push([x0, x1, -x2, x3]);
                            }
                        }
                    }
                }
            }
            row
        })
        .collect();
    let mut all: Vec<[i64; 4]> = rows.into_iter().flatten().collect();
    all.sort_unstable();
    Ok(all)
}

/// The same enumeration as exact quaternions in `(p, -1 / Q)`, grouped by
/// reduced trace.
pub fn quat_enumerate(p: u64, window: EnumerationWindow) -> Result<BTreeMap<i64, Vec<Quaternion>>> {
    let alg = QuaternionAlgebra::from_ints(p as i64, -1)?;
    let mut out: BTreeMap<i64, Vec<Quaternion>> = BTreeMap::new();
    for c in quat_unit_coords(p, window)? {
        out.entry(2 * c[0]).or_default().push(alg.element_from_ints(c));
    }
    Ok(out)
}

/// `x0 = 1 mod N` and `x1, x2, x3 = 0 mod N`.
pub fn coords_in_congruence(c: &[i64; 4], n: u64) -> bool {
    let n = n as i64;
    (c[0] - 1).rem_euclid(n) == 0 && c[1..].iter().all(|x| x.rem_euclid(n) == 0)
}

pub fn quat_in_congruence(x: &Quaternion, n: u64) -> Result<bool> {
    check_level(n, 1)?;
    let c = x.integer_coords()?;
    let n = BigInt::from(n);
    Ok((&c[0] - BigInt::one()).mod_floor(&n).is_zero()
        && c[1..].iter().all(|x| x.mod_floor(&n).is_zero()))
}

/// Trace gap for the level-N congruence subgroup of the norm-one units of
/// `(p, -1 / Q)`. For odd N, `x0 = 1 mod N` and the norm equation force
/// `x0 = 1 mod N^2`, so `tr = 2 x0` satisfies `|tr| >= 2N^2 - 2` whenever
/// `|tr| != 2`. Level 1 is the full unit group: there is no gap (bound 0)
/// and the only check is that nothing besides `+-1` has `|tr| = 2`.
pub fn quat_trace_gap(p: u64, n: u64, window: EnumerationWindow) -> Result<TraceGapReport> {
    check_level(n, 1)?;
    let setting = Setting::quaternionic(p)?;
    let ni = n as i64;
    let bound = if n == 1 { 0 } else { 2 * ni * ni - 2 };
    let mut r = empty_report(setting, n, window, bound);
    for c in quat_unit_coords(p, window)?
        .into_iter()
        .filter(|c| coords_in_congruence(c, n))
    {
        let trace = 2 * c[0];
        let is_pm_one = c[1..].iter().all(|&x| x == 0);
        tally(&mut r, c, trace, is_pm_one);
        if !is_pm_one && trace.abs() == 2 {
            // in a division algebra only +-1 can have |tr| = 2
            r.violations.push(c);
        }
    }
    Ok(r)
}

/// Brute-force `|SL2(Z/NZ)|` by counting all `(a, b, c, d) mod N` with `ad - bc = 1`.
pub fn sl2_order_mod_brute(n: u64) -> u64 {
    let n = n as i64;
    let mut count = 0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if (a * d - b * c - 1).rem_euclid(n) == 0 {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// Converts enumeration coordinates to an exact matrix.
pub fn coords_to_matrix(c: &[i64; 4]) -> IntMat2 {
    IntMat2::from_i64(c[0], c[1], c[2], c[3])
}

pub fn matrix_to_coords(m: &IntMat2) -> Option<[i64; 4]> {
    Some([m.a.to_i64()?, m.b.to_i64()?, m.c.to_i64()?, m.d.to_i64()?])
}
