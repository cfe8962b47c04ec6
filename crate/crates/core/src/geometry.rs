//! Floating-point evaluators on the upper half-plane: Möbius action,
//! distance, translation length, areas, and the right-hand sides of the
//! classical systole and kissing-number inequalities.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::congruence::{psl2_index, Setting};
use crate::error::{Error, Result};
use crate::exact::IntMat2;

/// Area of the modular orbifold `PSL2(Z) \ H^2`.
pub const V0: f64 = PI / 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperHalfPoint {
    re: f64,
    im: f64,
}

impl UpperHalfPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() || im <= 0.0 {
            return Err(Error::Domain(format!("{re} + {im}i is not in the upper half-plane")));
        }
        Ok(Self { re, im })
    }

    pub fn i() -> Self {
        Self { re: 0.0, im: 1.0 }
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }
}

/// `z -> (az + b) / (cz + d)` for a real matrix of determinant 1.
pub fn mobius_apply_real(m: [f64; 4], z: UpperHalfPoint) -> UpperHalfPoint {
    let [a, b, c, d] = m;
    // (az + b)(c conj(z) + d) / |cz + d|^2
    let den = (c * z.re + d).powi(2) + (c * z.im).powi(2);
    let re = ((a * z.re + b) * (c * z.re + d) + a * c * z.im * z.im) / den;
    let det = a * d - b * c;
    let im = det * z.im / den;
    UpperHalfPoint { re, im }
}

pub fn mobius_apply(m: &IntMat2, z: UpperHalfPoint) -> Result<UpperHalfPoint> {
    m.ensure_unimodular()?;
    Ok(mobius_apply_real(m.to_f64(), z))
}

/// `d(z, w) = 2 asinh(|z - w| / (2 sqrt(Im z Im w)))`.
pub fn hyp_distance(z: UpperHalfPoint, w: UpperHalfPoint) -> f64 {
    let chord = (z.re - w.re).hypot(z.im - w.im);
    2.0 * (chord / (2.0 * (z.im * w.im).sqrt())).asinh()
}

/// `2 acosh(|t| / 2)`.
pub fn translation_length(t: i64) -> Result<f64> {
    if t.unsigned_abs() <= 2 {
        return Err(Error::NotHyperbolic(BigInt::from(t)));
    }
    Ok(length_from_abs_trace(t.unsigned_abs() as f64))
}

pub fn translation_length_big(t: &BigInt) -> Result<f64> {
    if t.abs() <= BigInt::from(2) {
        return Err(Error::NotHyperbolic(t.clone()));
    }
    let x = t.abs().to_f64().unwrap_or(f64::INFINITY);
    Ok(length_from_abs_trace(x))
}

fn length_from_abs_trace(x: f64) -> f64 {
    // acosh(x/2) = log((x + sqrt(x^2 - 4)) / 2), written to avoid overflow
    if x > 1e150 {
        2.0 * x.ln()
    } else {
        2.0 * (x / 2.0).acosh()
    }
}

/// `2 pi (2g - 2)`.
pub fn gauss_bonnet_area(g: u64) -> Result<f64> {
    if g < 2 {
        return Err(Error::Domain(format!("genus {g} < 2")));
    }
    Ok(2.0 * PI * (2.0 * g as f64 - 2.0))
}

/// Area of a hyperbolic disc of radius `r`: `2 pi (cosh r - 1)`.
pub fn ball_area(r: f64) -> Result<f64> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::Domain(format!("radius {r} < 0")));
    }
    Ok(2.0 * PI * (r.cosh() - 1.0))
}

/// Right-hand sides of the classical upper bounds. Unknown constants are
/// caller-supplied; `with_defaults` constructors set additive ones to 0 and
/// multiplicative ones to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhsBound {
    /// `sys(S) <= 2 log(area / pi + 2)`.
    SurfaceSystole { area: f64 },
    /// `sys(M) <= 2 / (n - 1) log vol + c`.
    ManifoldSystole { dim: u32, vol: f64, c: f64 },
    /// `sys(M) <= 2 log vol + d1`.
    ArithmeticSystole { vol: f64, d1: f64 },
    /// `sys(M) <= 4/3 log vol + d2`.
    CongruenceSystole { vol: f64, d2: f64 },
    /// `Kiss(S_g) <= U g^2 / log g`.
    ClosedKiss { genus: f64, u: f64 },
    /// `Kiss(S) <= C (g + n) g / log(g + 1)` for genus `g` with `n` cusps.
    CuspedKiss { genus: f64, cusps: f64, c: f64 },
    /// `Kiss(M) <= A_n vol^2 / log(1 + vol)`.
    ManifoldKiss { vol: f64, a_n: f64 },
}

impl RhsBound {
    pub fn manifold_systole(dim: u32, vol: f64) -> Self {
        Self::ManifoldSystole { dim, vol, c: 0.0 }
    }

    pub fn arithmetic_systole(vol: f64) -> Self {
        Self::ArithmeticSystole { vol, d1: 0.0 }
    }

    pub fn congruence_systole(vol: f64) -> Self {
        Self::CongruenceSystole { vol, d2: 0.0 }
    }

    pub fn closed_kiss(genus: f64) -> Self {
        Self::ClosedKiss { genus, u: 1.0 }
    }

    pub fn cusped_kiss(genus: f64, cusps: f64) -> Self {
        Self::CuspedKiss { genus, cusps, c: 1.0 }
    }

    pub fn manifold_kiss(vol: f64) -> Self {
        Self::ManifoldKiss { vol, a_n: 1.0 }
    }
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {x}")))
    }
}

pub fn rhs_bound(kind: RhsBound) -> Result<f64> {
    use RhsBound::*;
    Ok(match kind {
        SurfaceSystole { area } => 2.0 * (positive("area", area)? / PI + 2.0).ln(),
        ManifoldSystole { dim, vol, c } => {
            if dim < 2 {
                return Err(Error::Domain(format!("dimension {dim} < 2")));
            }
            2.0 / (dim as f64 - 1.0) * positive("volume", vol)?.ln() + c
        }
        ArithmeticSystole { vol, d1 } => 2.0 * positive("volume", vol)?.ln() + d1,
        CongruenceSystole { vol, d2 } => 4.0 / 3.0 * positive("volume", vol)?.ln() + d2,
        ClosedKiss { genus, u } => {
            let g = positive("genus", genus)?;
            if g <= 1.0 {
                return Err(Error::Domain(format!("genus {g} must exceed 1")));
            }
            u * g * g / g.ln()
        }
        CuspedKiss { genus, cusps, c } => {
            let g = positive("genus", genus)?;
            if cusps.is_nan() || cusps < 0.0 {
                return Err(Error::Domain(format!("cusp count {cusps} < 0")));
            }
            c * (g + cusps) * g / (g + 1.0).ln()
        }
        ManifoldKiss { vol, a_n } => {
            let v = positive("volume", vol)?;
            a_n * v * v / v.ln_1p()
        }
    })
}

/// `v0 * [PSL2(Z) : Gamma(N)]`, asserted to stay below `v0 N^3`.
pub fn area_s_n(n: u64, setting: Setting) -> Result<f64> {
    if let Setting::Quaternionic { p } = setting {
        return Err(Error::Domain(format!(
            "the covolume of the (p={p}, -1) unit group is not modelled; \
             quaternionic areas are only available in units of v0"
        )));
    }
    let area = V0 * psl2_index(n)? as f64;
    assert!(area < V0 * (n as f64).powi(3), "area(S_N) < v0 N^3");
    Ok(area)
}
