//! Two-source cancellation on a line and Bessel-zero sizes of spherical
//! exterior solutions.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bessel::{spherical_bessel, BesselKind};
use crate::error::{Error, Result};
use crate::wave::{observed_order, pairwise_sum};

/// Periodic profiles with `u(ξ + π) = −u(ξ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Profile {
    Sin,
    Zero,
    /// Triangle wave with unit peak, in phase with `sin`.
    Triangle,
    /// `Σ c_i sin((2i+1)ξ)`.
    OddHarmonics(Vec<f64>),
}

impl Profile {
    pub fn eval(&self, xi: f64) -> f64 {
        match self {
            Profile::Sin => xi.sin(),
            Profile::Zero => 0.0,
            Profile::Triangle => {
                let s = (xi / (2.0 * PI)).rem_euclid(1.0);
                if s < 0.25 {
                    4.0 * s
                } else if s < 0.75 {
                    2.0 - 4.0 * s
                } else {
                    4.0 * s - 4.0
                }
            }
            Profile::OddHarmonics(c) => c
                .iter()
                .enumerate()
                .map(|(i, a)| a * ((2 * i + 1) as f64 * xi).sin())
                .sum(),
        }
    }

    /// Checks periodicity and half-period antisymmetry at sampled points.
    pub fn validate(&self) -> Result<()> {
        for i in 0..64 {
            let xi = -7.0 + 0.23 * i as f64;
            let u = self.eval(xi);
            let scale = 1.0f64.max(u.abs());
            if (self.eval(xi + 2.0 * PI) - u).abs() > 1e-12 * scale || (self.eval(xi + PI) + u).abs() > 1e-12 * scale {
                return Err(Error::InvalidArgument(format!(
                    "profile is not 2π-periodic and π-antisymmetric at ξ = {xi}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Signs {
    /// Two sources.
    Same,
    /// A source and a drain.
    Opposite,
}

impl Signs {
    fn factor(self) -> f64 {
        match self {
            Signs::Same => 1.0,
            Signs::Opposite => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourcePair1D {
    /// Half-separation, in phase units.
    pub a: f64,
    pub signs: Signs,
    pub profile: Profile,
    pub v: f64,
}

/// Superposition of outgoing waves from sources at `−a` and `a`.
///
/// Each source radiates `u(· − vt)` to its right and `u(· + vt)` to its left;
/// the second source is scaled by the sign of `signs`.
pub fn two_source_field(pair: &SourcePair1D, x: f64, t: f64) -> f64 {
    let u = |xi: f64| pair.profile.eval(xi);
    let s = pair.signs.factor();
    let (a, vt) = (pair.a, pair.v * t);
    if x > a {
        u(x + a - vt) + s * u(x - a - vt)
    } else if x >= -a {
        u(x + a - vt) + s * u(x - a + vt)
    } else {
        u(x + a + vt) + s * u(x - a + vt)
    }
}

/// Phase samples per period when measuring external amplitude.
pub const AMPLITUDE_SAMPLES: usize = 256;

/// Largest `|field|` over one period in both external regions.
pub fn external_amplitude(pair: &SourcePair1D) -> f64 {
    let period = 2.0 * PI / pair.v;
    let mut max = 0.0f64;
    for j in 0..AMPLITUDE_SAMPLES {
        let t = period * j as f64 / AMPLITUDE_SAMPLES as f64;
        for x in [pair.a + 1.0, -pair.a - 1.0] {
            max = max.max(two_source_field(pair, x, t).abs());
        }
    }
    max
}

/// Amplitude at or below which an external region counts as silent.
pub const CANCELLATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CancellationScan {
    pub signs: Signs,
    /// `(a, max external amplitude)` per grid point.
    pub samples: Vec<(f64, f64)>,
    /// Grid values with amplitude `≤ 1e-12`.
    pub cancelling: Vec<f64>,
}

pub fn external_cancellation_scan(profile: &Profile, signs: Signs, a_grid: &[f64]) -> Result<CancellationScan> {
    profile.validate()?;
    if let Some(a) = a_grid.iter().find(|a| !(**a > 0.0 && **a <= 4.0 * PI * (1.0 + 1e-15))) {
        return Err(Error::InvalidArgument(format!("a = {a} outside (0, 4π]")));
    }
    let mut samples = Vec::with_capacity(a_grid.len());
    let mut cancelling = Vec::new();
    for &a in a_grid {
        let amp = external_amplitude(&SourcePair1D {
            a,
            signs,
            profile: profile.clone(),
            v: 1.0,
        });
        if amp <= CANCELLATION_TOL {
            cancelling.push(a);
        }
        samples.push((a, amp));
    }
    Ok(CancellationScan {
        signs,
        samples,
        cancelling,
    })
}

/// `a_j = 4πj/n` for `j = 1..=n`.
pub fn uniform_a_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|j| 4.0 * PI * j as f64 / n as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    /// Zeros of `j_l`.
    Even,
    /// Zeros of `y_l`.
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModeSpec {
    pub l: u32,
    pub parity: Parity,
}

impl ModeSpec {
    pub fn new(l: u32, parity: Parity) -> Self {
        ModeSpec { l, parity }
    }

    pub fn kind(&self) -> BesselKind {
        match self.parity {
            Parity::Even => BesselKind::First,
            Parity::Odd => BesselKind::Second,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        spherical_bessel(self.kind(), self.l, x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeSpectrum {
    pub k: f64,
    pub mode: ModeSpec,
    pub roots: Vec<f64>,
    pub sizes: Vec<f64>,
}

/// Scan step and start for zero bracketing.
const SCAN_STEP: f64 = PI / 2.0;
const SCAN_START: f64 = 0.25;

/// First `count` positive zeros of the mode's Bessel function.
pub fn bessel_zeros(mode: ModeSpec, count: usize) -> Result<Vec<f64>> {
    bessel_zeros_below(mode, count, PI * (count + mode.l as usize + 4) as f64)
}

/// As [`bessel_zeros`], scanning no further than `x_max`.
pub fn bessel_zeros_below(mode: ModeSpec, count: usize, x_max: f64) -> Result<Vec<f64>> {
    let f = |x: f64| mode.eval(x);
    // zeros are more than π apart, so a half-π scan cannot skip any
    let max_steps = ((x_max - SCAN_START) / SCAN_STEP).floor().max(0.0) as usize;
    let mut roots = Vec::with_capacity(count);
    let mut trace = Vec::new();
    let mut x0 = SCAN_START;
    let mut f0 = f(x0)?;
    trace.push((x0, f0));
    for _ in 0..max_steps {
        if roots.len() == count {
            break;
        }
        let x1 = x0 + SCAN_STEP;
        let f1 = f(x1)?;
        trace.push((x1, f1));
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            roots.push(bisect(&f, x0, x1, f0)?);
        }
        x0 = x1;
        f0 = f1;
    }
    if roots.len() < count {
        return Err(Error::BracketExhausted { trace });
    }
    Ok(roots)
}

/// Bisection to adjacent floats.
fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, mut flo: f64) -> Result<f64> {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
}

pub fn quantified_sizes(mode: ModeSpec, k: f64, count: usize) -> Result<SizeSpectrum> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!("k must be positive, got {k}")));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let roots = bessel_zeros(mode, count)?;
    Ok(SizeSpectrum {
        k,
        mode,
        sizes: roots.iter().map(|a| a / k).collect(),
        roots,
    })
}

/// Half-width of the sign-change window in [`boundary_condition_check`].
pub const BOUNDARY_TOL: f64 = 1e-9;

/// True iff `k·R` lies within `1e-9` of a zero of the mode's function.
///
/// Zeros are simple, so this is a sign change across `[kR − 1e-9, kR + 1e-9]`.
pub fn boundary_condition_check(mode: ModeSpec, k: f64, r_sphere: f64) -> bool {
    let x = k * r_sphere;
    if !(x > BOUNDARY_TOL && x.is_finite()) {
        return false;
    }
    match (mode.eval(x - BOUNDARY_TOL), mode.eval(x + BOUNDARY_TOL)) {
        (Ok(a), Ok(b)) => a * b <= 0.0,
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialResidual {
    pub max: f64,
    pub rms: f64,
    pub h: f64,
    pub r_range: (f64, f64),
    pub order_estimate: Option<f64>,
}

/// Sample radii across `r_range` for the radial residual.
pub const RADIAL_SAMPLES: usize = 41;

fn radial_max_rms(mode: ModeSpec, k: f64, c1: f64, c2: f64, r_range: (f64, f64), h: f64) -> Result<(f64, f64)> {
    let l = mode.l as f64;
    let radial = |r: f64| -> Result<f64> {
        let mut v = 0.0;
        if c1 != 0.0 {
            v += c1 * spherical_bessel(BesselKind::First, mode.l, k * r)?;
        }
        if c2 != 0.0 {
            v += c2 * spherical_bessel(BesselKind::Second, mode.l, k * r)?;
        }
        Ok(v)
    };
    let mut res = Vec::with_capacity(RADIAL_SAMPLES);
    for i in 0..RADIAL_SAMPLES {
        let r = r_range.0 + (r_range.1 - r_range.0) * i as f64 / (RADIAL_SAMPLES - 1) as f64;
        let (m, c, p) = (radial(r - h)?, radial(r)?, radial(r + h)?);
        let d1 = (p - m) / (2.0 * h);
        let d2 = (p - 2.0 * c + m) / (h * h);
        res.push((d2 + 2.0 / r * d1 + (k * k - l * (l + 1.0) / (r * r)) * c).abs());
    }
    let max = res.iter().fold(0.0f64, |a, b| a.max(*b));
    let rms = (pairwise_sum(&res.iter().map(|v| v * v).collect::<Vec<_>>()) / res.len() as f64).sqrt();
    Ok((max, rms))
}

/// Central-difference residual of the radial Helmholtz equation for
/// `R = C₁ j_l(kr) + C₂ y_l(kr)`, with the order observed at `h/2`.
pub fn exterior_solution_residual(
    mode: ModeSpec,
    k: f64,
    c1: f64,
    c2: f64,
    r_range: (f64, f64),
    h: f64,
) -> Result<RadialResidual> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    if !(r_range.0 - h > 0.0 && r_range.1 >= r_range.0 && r_range.1.is_finite()) {
        return Err(Error::InvalidArgument(
            "radial range must exclude the origin by more than h".into(),
        ));
    }
    let (max, rms) = radial_max_rms(mode, k, c1, c2, r_range, h)?;
    let (fine, _) = radial_max_rms(mode, k, c1, c2, r_range, h / 2.0)?;
    Ok(RadialResidual {
        max,
        rms,
        h,
        r_range,
        order_estimate: observed_order(max, fine),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sin_pair(a: f64, signs: Signs) -> SourcePair1D {
        SourcePair1D {
            a,
            signs,
            profile: Profile::Sin,
            v: 1.0,
        }
    }

    #[test]
    fn profiles_are_antisymmetric() {
        for p in [
            Profile::Sin,
            Profile::Zero,
            Profile::Triangle,
            Profile::OddHarmonics(vec![1.0, 0.3, -0.1]),
        ] {
            p.validate().unwrap();
        }
    }

    #[test]
    fn field_examples() {
        assert!(external_amplitude(&sin_pair(PI / 2.0, Signs::Same)) < 1e-15);
        assert!(external_amplitude(&sin_pair(PI, Signs::Opposite)) < 1e-15);
        let amp = external_amplitude(&sin_pair(PI / 4.0, Signs::Same));
        assert!((amp - 2f64.sqrt()).abs() < 1e-3, "{amp}");
        // same signs at a = π leave −2u outside
        assert!((external_amplitude(&sin_pair(PI, Signs::Same)) - 2.0).abs() < 1e-3);
    }

    #[test]
    fn field_is_antiperiodic_in_time() {
        let pair = SourcePair1D {
            a: 1.3,
            signs: Signs::Opposite,
            profile: Profile::Triangle,
            v: 2.0,
        };
        for x in [-4.0, -0.5, 0.2, 3.0] {
            for t in [0.0, 0.37, 1.9] {
                let f = two_source_field(&pair, x, t);
                let g = two_source_field(&pair, x, t + PI / pair.v);
                assert!((f + g).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn scan_finds_both_families() {
        let grid = uniform_a_grid(400);
        let same = external_cancellation_scan(&Profile::Sin, Signs::Same, &grid).unwrap();
        let expect: Vec<f64> = (0..4).map(|m| PI / 2.0 + PI * m as f64).collect();
        assert_eq!(same.cancelling.len(), 4);
        for (a, e) in same.cancelling.iter().zip(&expect) {
            assert!((a - e).abs() < 1e-12);
        }
        let opp = external_cancellation_scan(&Profile::Sin, Signs::Opposite, &grid).unwrap();
        assert_eq!(opp.cancelling.len(), 4);
        for (m, a) in opp.cancelling.iter().enumerate() {
            assert!((a - PI * (m + 1) as f64).abs() < 1e-12);
        }
        let zero = external_cancellation_scan(&Profile::Zero, Signs::Same, &grid).unwrap();
        assert_eq!(zero.cancelling.len(), grid.len());
        assert!(external_cancellation_scan(&Profile::Sin, Signs::Same, &[0.0]).is_err());
    }

    #[test]
    fn l0_sizes_are_closed_form() {
        let s = quantified_sizes(ModeSpec::new(0, Parity::Even), 2.0, 3).unwrap();
        for (i, r) in s.sizes.iter().enumerate() {
            assert!((r - PI * (i + 1) as f64 / 2.0).abs() < 1e-12);
        }
        let s = quantified_sizes(ModeSpec::new(0, Parity::Odd), 1.0, 2).unwrap();
        assert!((s.sizes[0] - PI / 2.0).abs() < 1e-12);
        assert!((s.sizes[1] - 1.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn first_zero_of_j1() {
        let s = quantified_sizes(ModeSpec::new(1, Parity::Even), 1.0, 1).unwrap();
        assert!((s.roots[0] - 4.493_409_457_909_064).abs() < 1e-12);
        let f = |x| spherical_bessel(BesselKind::First, 1, x).unwrap();
        assert!(f(s.roots[0] - 1e-6) * f(s.roots[0] + 1e-6) < 0.0);
    }

    #[test]
    fn zeros_interlace() {
        for l in 0..=5 {
            let a = bessel_zeros(ModeSpec::new(l, Parity::Even), 5).unwrap();
            let b = bessel_zeros(ModeSpec::new(l + 1, Parity::Even), 5).unwrap();
            for i in 0..5 {
                assert!(a[i] < b[i]);
                if i + 1 < 5 {
                    assert!(b[i] < a[i + 1]);
                }
            }
        }
    }

    #[test]
    fn boundary_examples() {
        let even0 = ModeSpec::new(0, Parity::Even);
        assert!(boundary_condition_check(even0, 1.0, PI));
        assert!(!boundary_condition_check(even0, 1.0, 1.0));
        assert!(!boundary_condition_check(even0, 1.0, -1.0));
        for mode in [ModeSpec::new(3, Parity::Even), ModeSpec::new(2, Parity::Odd)] {
            let s = quantified_sizes(mode, 0.7, 6).unwrap();
            assert!(s.sizes.iter().all(|r| boundary_condition_check(mode, 0.7, *r)));
        }
    }

    #[test]
    fn radial_residuals() {
        let m0 = ModeSpec::new(0, Parity::Even);
        let r = exterior_solution_residual(m0, 1.5, 1.0, 0.0, (1.0, 6.0), 0.02).unwrap();
        assert!(r.max < 0.02 * 0.02, "{}", r.max);
        let r = exterior_solution_residual(m0, 1.5, 0.0, 0.0, (1.0, 6.0), 0.02).unwrap();
        assert_eq!(r.max, 0.0);
        let r = exterior_solution_residual(ModeSpec::new(2, Parity::Even), 1.2, 0.8, -0.5, (1.0, 8.0), 0.04).unwrap();
        assert!((r.order_estimate.unwrap() - 2.0).abs() <= 0.1);
        assert!(exterior_solution_residual(m0, 1.0, 1.0, 0.0, (0.0, 1.0), 0.01).is_err());
    }

    #[test]
    fn bracket_exhaustion_reports_trace() {
        match bessel_zeros_below(ModeSpec::new(0, Parity::Even), 3, 5.0) {
            Err(Error::BracketExhausted { trace }) => {
                assert_eq!(trace.len(), 4);
                assert!(trace.iter().all(|(x, _)| *x <= 5.0));
            }
            other => panic!("{other:?}"),
        }
    }
}
