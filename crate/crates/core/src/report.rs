//! Bound reports for the congruence surfaces `S_N = Gamma(N) \ H^2` and
//! prime-geodesic statistics over a range of traces.
//!
//! Floats are rendered with exactly 12 significant digits; the JSON mirror
//! carries the same rounded value so both formats agree numerically.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::cache::Mu0Cache;
use crate::congruence::{psl2_index, Setting};
use crate::error::{Error, Result};
use crate::geometry::{area_s_n, translation_length, V0};

/// Relative slack applied against a verdict before it may pass.
pub const VERDICT_SLACK: f64 = 1e-9;

pub const BOUNDS_HEADER: &str =
    "N,setting,mu0,index,area,sys_lower,kiss_lower,epsilon,verdict_kiss,verdict_sys";

pub const PGT_HEADER: &str = "t,mu0,cumulative,reference,ratio,exp_len_over_len";

/// Rounds to 12 significant digits and renders without an exponent when the
/// magnitude allows. Non-finite values print as `nan` / `inf` / `-inf`.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0.00000000000".into();
    }
    let sci = format!("{x:.11e}");
    let (_, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..=14).contains(&exp) {
        let rounded: f64 = sci.parse().expect("round trip");
        format!("{:.*}", (11 - exp).max(0) as usize, rounded)
    } else {
        sci
    }
}

/// The value `fmt_float` prints, as a number.
pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().expect("round trip")
    } else {
        x
    }
}

fn json_float(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
}

/// `lhs >= rhs` with the comparison tilted against passing.
pub fn conservative_ge(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs + VERDICT_SLACK * rhs.abs()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: u64,
    pub setting: Setting,
    pub mu0: u64,
    pub index: u64,
    pub area: f64,
    pub sys_lower: f64,
    pub kiss_lower: u64,
    pub epsilon: f64,
    pub verdict_kiss: bool,
    pub verdict_sys: bool,
}

impl BoundReport {
    /// `area^(4/3 - eps) / (2 v0^2)`.
    pub fn kiss_target(&self) -> f64 {
        self.area.powf(4.0 / 3.0 - self.epsilon) / (2.0 * V0 * V0)
    }

    /// `4/3 log(area) - (2 log 2 + 4/3 log v0)`.
    pub fn sys_target(&self) -> f64 {
        4.0 / 3.0 * self.area.ln() - (2.0 * 2f64.ln() + 4.0 / 3.0 * V0.ln())
    }

    /// `mu0(N) >= N^(1 - eps)`: the count hypothesis the kissing chain needs.
    /// It is only guaranteed beyond an ineffective threshold, so it is
    /// checked per row.
    pub fn precondition(&self) -> bool {
        self.mu0 as f64 >= (self.n as f64).powf(1.0 - self.epsilon)
    }

    /// Verdicts recomputed from the stored fields.
    pub fn recompute_verdicts(&self) -> (bool, bool) {
        (
            conservative_ge(self.kiss_lower as f64, self.kiss_target()),
            conservative_ge(self.sys_lower, self.sys_target()),
        )
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.setting,
            self.mu0,
            self.index,
            fmt_float(self.area),
            fmt_float(self.sys_lower),
            self.kiss_lower,
            fmt_float(self.epsilon),
            self.verdict_kiss,
            self.verdict_sys
        )
    }

    /// JSON object with keys in CSV column order.
    pub fn json(&self) -> Value {
        let mut m = Map::new();
        m.insert("N".into(), json!(self.n));
        m.insert("setting".into(), json!(self.setting.to_string()));
        m.insert("mu0".into(), json!(self.mu0));
        m.insert("index".into(), json!(self.index));
        m.insert("area".into(), json_float(self.area));
        m.insert("sys_lower".into(), json_float(self.sys_lower));
        m.insert("kiss_lower".into(), json!(self.kiss_lower));
        m.insert("epsilon".into(), json_float(self.epsilon));
        m.insert("verdict_kiss".into(), json!(self.verdict_kiss));
        m.insert("verdict_sys".into(), json!(self.verdict_sys));
        Value::Object(m)
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("epsilon must lie in (0, 1), got {eps}")))
    }
}

/// Systole and kissing lower bounds for `S_N` in the modular setting.
pub fn level_bound_report(n: u64, eps: f64, cache: &Mu0Cache) -> Result<BoundReport> {
    if n < 5 {
        return Err(Error::LevelTooSmall { got: n, min: 5 });
    }
    check_epsilon(eps)?;
    let mu0 = cache.mu0(n)?;
    let index = psl2_index(n)?;
    let area = area_s_n(n, Setting::Modular)?;
    let nf = n as f64;
    let sys_lower = 2.0 * ((nf * nf - 2.0) / 2.0).acosh();
    // index is even for every N >= 3
    let kiss_lower = mu0 * index / 2;
    let mut r = BoundReport {
        n,
        setting: Setting::Modular,
        mu0,
        index,
        area,
        sys_lower,
        kiss_lower,
        epsilon: eps,
        verdict_kiss: false,
        verdict_sys: false,
    };
    (r.verdict_kiss, r.verdict_sys) = r.recompute_verdicts();
    Ok(r)
}

/// Reports for each level, in input order.
pub fn bound_reports(levels: &[u64], eps: f64, cache: &Mu0Cache) -> Result<Vec<BoundReport>> {
    levels
        .par_iter()
        .map(|&n| level_bound_report(n, eps, cache))
        .collect()
}

/// Fraction of reports whose count precondition holds.
pub fn precondition_rate(reports: &[BoundReport]) -> f64 {
    if reports.is_empty() {
        return 0.0;
    }
    reports.iter().filter(|r| r.precondition()).count() as f64 / reports.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PgtRow {
    pub t: u64,
    pub mu0: u64,
    /// `sum_{3 <= s <= t} mu0(s)`.
    pub cumulative: u64,
    /// `sum_{3 <= s <= t} s / log s`.
    pub reference: f64,
    pub ratio: f64,
    /// `e^l / l` for the length `l` of trace `t`.
    pub exp_len_over_len: f64,
}

impl PgtRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.t,
            self.mu0,
            self.cumulative,
            fmt_float(self.reference),
            fmt_float(self.ratio),
            fmt_float(self.exp_len_over_len)
        )
    }

    pub fn json(&self) -> Value {
        let mut m = Map::new();
        m.insert("t".into(), json!(self.t));
        m.insert("mu0".into(), json!(self.mu0));
        m.insert("cumulative".into(), json!(self.cumulative));
        m.insert("reference".into(), json_float(self.reference));
        m.insert("ratio".into(), json_float(self.ratio));
        m.insert("exp_len_over_len".into(), json_float(self.exp_len_over_len));
        Value::Object(m)
    }
}

/// One row per trace `3..=t_max`.
pub fn pgt_statistics(t_max: u64, cache: &Mu0Cache) -> Result<Vec<PgtRow>> {
    if t_max < 10 {
        return Err(Error::Domain(format!("t_max must be at least 10, got {t_max}")));
    }
    let counts = cache.counts(3..=t_max)?;
    let mut cumulative = 0u64;
    let mut reference = 0.0f64;
    counts
        .into_iter()
        .map(|c| {
            let tf = c.trace as f64;
            cumulative += c.mu0;
            reference += tf / tf.ln();
            let l = translation_length(c.trace as i64)?;
            Ok(PgtRow {
                t: c.trace,
                mu0: c.mu0,
                cumulative,
                reference,
                ratio: cumulative as f64 / reference,
                exp_len_over_len: l.exp() / l,
            })
        })
        .collect()
}

pub fn ratio_at(rows: &[PgtRow], x: u64) -> Option<f64> {
    rows.iter().find(|r| r.t == x).map(|r| r.ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(PI), "3.14159265359");
        assert_eq!(fmt_float(20.0 * PI), "62.8318530718");
        assert_eq!(fmt_float(0.5), "0.500000000000");
        assert_eq!(fmt_float(9.99999999999951), "10.0000000000");
        assert_eq!(fmt_float(1e20), "1.00000000000e20");
        assert_eq!(fmt_float(-2.5e-7), "-2.50000000000e-7");
        assert_eq!(fmt_float(0.0), "0.00000000000");
        for x in [PI, 1e-3, 123456.789, 6.2716, 4.5e11] {
            let s = fmt_float(x);
            let digits = s.trim_start_matches('-').replace('.', "");
            let digits = digits.split('e').next().unwrap().trim_start_matches('0');
            assert_eq!(digits.len(), 12, "{s}");
            assert_eq!(s.parse::<f64>().unwrap(), round12(x));
        }
    }

    #[test]
    fn report_n5() {
        let cache = Mu0Cache::in_memory();
        let r = level_bound_report(5, 0.5, &cache).unwrap();
        assert_eq!(r.index, 60);
        assert!((r.area - 20.0 * PI).abs() < 1e-12);
        assert!((r.sys_lower - 2.0 * 11.5f64.acosh()).abs() < 1e-15);
        // log form: acosh(x) = ln(x + sqrt(x^2 - 1))
        assert!((r.sys_lower - 2.0 * (11.5 + 131.25f64.sqrt()).ln()).abs() < 1e-12);
        assert!((r.sys_lower - 6.26720).abs() < 1e-5);
        assert_eq!(r.kiss_lower, r.mu0 * 30);
        let target = 4.0 / 3.0 * (20.0 * PI).ln() - (2.0 * 2f64.ln() + 4.0 / 3.0 * (PI / 3.0).ln());
        assert!((r.sys_target() - target).abs() < 1e-12);
        assert_eq!(r.verdict_sys, r.sys_lower >= target);
        assert_eq!((r.verdict_kiss, r.verdict_sys), r.recompute_verdicts());
        assert!(level_bound_report(4, 0.5, &cache).is_err());
        assert!(level_bound_report(5, 0.0, &cache).is_err());
        assert!(level_bound_report(5, 1.0, &cache).is_err());
    }

    #[test]
    fn csv_and_json_agree() {
        let cache = Mu0Cache::in_memory();
        let r = level_bound_report(7, 0.5, &cache).unwrap();
        let row = r.csv_row();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), BOUNDS_HEADER.split(',').count());
        let j = r.json();
        let keys: Vec<&String> = j.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 10);
        assert_eq!(fields[4].parse::<f64>().unwrap(), j["area"].as_f64().unwrap());
        assert_eq!(fields[5].parse::<f64>().unwrap(), j["sys_lower"].as_f64().unwrap());
    }

    #[test]
    fn sys_lower_increasing() {
        let cache = Mu0Cache::in_memory();
        let levels: Vec<u64> = (5..=40).collect();
        let reports = bound_reports(&levels, 0.5, &cache).unwrap();
        for w in reports.windows(2) {
            assert!(w[0].sys_lower < w[1].sys_lower);
        }
    }

    #[test]
    fn pgt_rows() {
        let cache = Mu0Cache::in_memory();
        let rows = pgt_statistics(20, &cache).unwrap();
        assert_eq!(rows.len(), 18);
        assert_eq!(rows[0].t, 3);
        for w in rows.windows(2) {
            assert!(w[0].cumulative <= w[1].cumulative);
        }
        for r in &rows {
            assert!(r.mu0 >= 1);
            assert!(r.ratio.is_finite() && r.ratio > 0.0);
            assert_eq!(r.mu0, cache.mu0(r.t).unwrap());
        }
        assert!(pgt_statistics(9, &cache).is_err());
        assert_eq!(ratio_at(&rows, 20), Some(rows[17].ratio));
    }
}
