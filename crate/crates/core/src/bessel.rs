//! Spherical Bessel functions `j_l` and `y_l`.
//!
//! `j_l` uses Miller's downward recurrence normalised against the closed form
//! of `j_0` or `j_1`; `y_l` uses upward recurrence, which is stable for it.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BesselKind {
    /// `j_l`
    First,
    /// `y_l`
    Second,
}

pub const MAX_DEGREE: u32 = 50;

pub fn spherical_bessel(kind: BesselKind, l: u32, x: f64) -> Result<f64> {
    if l > MAX_DEGREE {
        return Err(Error::Domain(format!("degree {l} exceeds {MAX_DEGREE}")));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("argument must be finite, got {x}")));
    }
    match kind {
        BesselKind::First => {
            let v = j_nonneg(l, x.abs());
            Ok(if x < 0.0 && l % 2 == 1 { -v } else { v })
        }
        BesselKind::Second => {
            if x <= 0.0 {
                return Err(Error::Domain(format!("y_{l} is singular at x = {x}")));
            }
            Ok(y_pos(l, x))
        }
    }
}

fn double_factorial_odd(l: u32) -> f64 {
    (1..=l).map(|n| (2 * n + 1) as f64).product()
}

fn j0(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

fn j1(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0 * (1.0 - x2 / 54.0)))
    } else {
        (x.sin() / x - x.cos()) / x
    }
}

fn j_nonneg(l: u32, x: f64) -> f64 {
    if l == 0 {
        return j0(x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x < 1e-2 {
        let a = (2 * l + 3) as f64;
        let b = (2 * l + 5) as f64;
        let x2 = x * x;
        return x.powi(l as i32) / double_factorial_odd(l) * (1.0 - x2 / (2.0 * a) + x2 * x2 / (8.0 * a * b));
    }
    let m = (l as f64).max(x.ceil());
    let start = (m + 16.0 + (40.0 * m).sqrt()) as u32;
    let mut next = 0.0;
    let mut cur = 1e-30;
    let mut at_l = 0.0;
    let mut at_1 = 0.0;
    for n in (1..=start).rev() {
        // cur = j_n, next = j_{n+1}
        let prev = (2 * n + 1) as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if n - 1 == l {
            at_l = cur;
        }
        if n == 2 {
            at_1 = cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            at_l *= 1e-250;
            at_1 *= 1e-250;
        }
    }
    let at_0 = cur;
    let (e0, e1) = (j0(x), j1(x));
    let scale = if e0.abs() >= e1.abs() { e0 / at_0 } else { e1 / at_1 };
    at_l * scale
}

fn y_pos(l: u32, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let y0 = -c / x;
    if l == 0 {
        return y0;
    }
    let mut prev = y0;
    let mut cur = -c / (x * x) - s / x;
    for n in 1..l {
        let next = (2 * n + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // 40-digit reference values, rounded
    const ORACLE: [(u32, f64, f64, f64); 11] = [
        (0, 0.5, 0.958_851_077_208_406, -1.755_165_123_780_745_4),
        (1, 0.01, 0.003_333_300_000_119_047_4, -10_000.499_987_500_07),
        (2, 1.5, 0.127_349_283_688_408_22, -1.345_712_693_620_451),
        (5, 3.7, 0.038_613_656_933_813_524, -0.892_037_265_314_262_3),
        (10, 2.0, 6.825_300_864_974_725e-8, -355_414.720_085_438_4),
        (10, 25.5, -0.022_764_539_343_447_797, -0.034_182_026_995_685_607),
        (20, 7.0, 3.416_414_225_336_439_5e-9, -1_085_322.507_578_953_5),
        (30, 99.5, 0.005_280_260_474_207_532_7, -0.008_844_904_166_433_645),
        (50, 10.0, 2.230_696_023_218_646_9e-31, -4.528_227_272_351_259e27),
        (50, 80.0, -0.010_638_570_118_081_817, -0.009_393_426_603_748_588),
        (3, 100.0, 0.008_913_997_369_612_213, -0.004_538_798_950_939_174),
    ];

    #[test]
    fn matches_reference_values() {
        for (l, x, j, y) in ORACLE {
            let gj = spherical_bessel(BesselKind::First, l, x).unwrap();
            let gy = spherical_bessel(BesselKind::Second, l, x).unwrap();
            assert!(((gj - j) / j).abs() <= 1e-12, "j_{l}({x}) = {gj}, want {j}");
            assert!(((gy - y) / y).abs() <= 1e-12, "y_{l}({x}) = {gy}, want {y}");
        }
    }

    #[test]
    fn closed_form_zeros_and_limits() {
        assert!(spherical_bessel(BesselKind::First, 0, PI).unwrap().abs() < 1e-16);
        assert!(spherical_bessel(BesselKind::Second, 0, PI / 2.0).unwrap().abs() < 1e-16);
        for x in [1e-8, 1e-5, 1e-3] {
            let v = spherical_bessel(BesselKind::First, 1, x).unwrap();
            assert!((v / (x / 3.0) - 1.0).abs() < x);
        }
        assert_eq!(spherical_bessel(BesselKind::First, 0, 0.0).unwrap(), 1.0);
        assert_eq!(spherical_bessel(BesselKind::First, 3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            spherical_bessel(BesselKind::Second, 0, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            spherical_bessel(BesselKind::Second, 2, -1.0),
            Err(Error::Domain(_))
        ));
        assert!(spherical_bessel(BesselKind::First, 51, 1.0).is_err());
        assert!(spherical_bessel(BesselKind::First, 0, f64::NAN).is_err());
    }

    #[test]
    fn parity_for_negative_argument() {
        for l in 0..5 {
            let p = spherical_bessel(BesselKind::First, l, 2.3).unwrap();
            let m = spherical_bessel(BesselKind::First, l, -2.3).unwrap();
            assert_eq!(m, if l % 2 == 0 { p } else { -p });
        }
    }

    #[test]
    fn cross_product_identity() {
        // j_{l+1} y_l − j_l y_{l+1} = 1/x²
        for l in [0u32, 1, 4, 12, 30] {
            for x in [0.7, 3.0, 17.5, 60.0] {
                let j = |n| spherical_bessel(BesselKind::First, n, x).unwrap();
                let y = |n| spherical_bessel(BesselKind::Second, n, x).unwrap();
                let w = j(l + 1) * y(l) - j(l) * y(l + 1);
                assert!((w * x * x - 1.0).abs() < 1e-11, "l={l} x={x}: {}", w * x * x);
            }
        }
    }
}
