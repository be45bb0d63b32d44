//! Intervals induced in a rotating frame, exact and time-averaged.
//!
//! Coefficients are stored as a symmetric 4×4 matrix `G` acting on
//! `(c·dt, dx, dy, dz)`, so `ds'² = Σ G_ab du_a du_b`. Asymmetric cross terms
//! such as `-2(y dx - x dy) ω dt` are split evenly between `G_0i` and `G_i0`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::rotation::{apply, CompiledRotation, RotationExpr};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacetimeEvent {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl SpacetimeEvent {
    pub fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        SpacetimeEvent { x, y, z, t }
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    fn is_finite(&self) -> bool {
        [self.x, self.y, self.z, self.t].iter().all(|v| v.is_finite())
    }
}

/// Coefficient names in export order (`g_tt`, `g_tx`, ...).
pub const COEFFICIENT_NAMES: [&str; 10] = [
    "g_tt", "g_tx", "g_ty", "g_tz", "g_xx", "g_xy", "g_xz", "g_yy", "g_yz", "g_zz",
];

const COEFFICIENT_INDEX: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 2),
    (2, 3),
    (3, 3),
];

/// Shared read access to a symmetric coefficient set.
pub trait MetricCoefficients {
    /// Symmetric matrix on `(c·dt, dx, dy, dz)`.
    fn coefficients(&self) -> &Matrix4<f64>;
    fn light_speed(&self) -> f64;

    /// Coefficient of `dt²`.
    fn dt2_coefficient(&self) -> f64 {
        let c = self.light_speed();
        c * c * self.coefficients()[(0, 0)]
    }

    /// Full coefficient of `dt·dx_i` (both symmetric halves), i ∈ {0,1,2}.
    fn dt_cross_coefficient(&self, i: usize) -> f64 {
        2.0 * self.light_speed() * self.coefficients()[(0, i + 1)]
    }

    /// Spatial block `G_ij`.
    fn spatial_block(&self) -> Matrix3<f64> {
        self.coefficients().fixed_view::<3, 3>(1, 1).into_owned()
    }

    /// `ds'²` for a displacement `(dt, dx, dy, dz)`.
    fn interval(&self, du: [f64; 4]) -> f64 {
        let c = self.light_speed();
        let v = nalgebra::Vector4::new(c * du[0], du[1], du[2], du[3]);
        (v.transpose() * self.coefficients() * v)[(0, 0)]
    }

    /// The ten independent coefficients in [`COEFFICIENT_NAMES`] order.
    fn named_coefficients(&self) -> Vec<(&'static str, f64)> {
        COEFFICIENT_NAMES
            .iter()
            .zip(COEFFICIENT_INDEX)
            .map(|(name, (i, j))| (*name, self.coefficients()[(i, j)]))
            .collect()
    }

    /// Tensor components `g_μν` on `(t, x, y, z)`, in [`COEFFICIENT_NAMES`] order.
    fn tensor_components(&self) -> Vec<(&'static str, f64)> {
        let c = self.light_speed();
        COEFFICIENT_NAMES
            .iter()
            .zip(COEFFICIENT_INDEX)
            .map(|(name, (i, j))| {
                let scale = match (i, j) {
                    (0, 0) => c * c,
                    (0, _) => c,
                    _ => 1.0,
                };
                (*name, scale * self.coefficients()[(i, j)])
            })
            .collect()
    }
}

/// Instantaneous interval at one event.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalForm {
    pub coeffs: Matrix4<f64>,
    pub c: f64,
}

impl MetricCoefficients for IntervalForm {
    fn coefficients(&self) -> &Matrix4<f64> {
        &self.coeffs
    }
    fn light_speed(&self) -> f64 {
        self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AveragingWindow {
    /// Mean over one common period of commensurate frequencies.
    ExactPeriod { period: f64, panels: usize },
    /// Bump-weighted symmetric window `[-half_width, half_width]`, grown
    /// until converged.
    LongWindow { half_width: f64, periods: usize },
    /// Integrand does not depend on time.
    Static,
}

/// Time-averaged coefficients at a fixed position.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedMetric {
    pub coeffs: Matrix4<f64>,
    pub c: f64,
    pub window: AveragingWindow,
    /// Largest coefficient change at the final refinement step.
    pub error_bound: f64,
}

impl MetricCoefficients for AveragedMetric {
    fn coefficients(&self) -> &Matrix4<f64> {
        &self.coeffs
    }
    fn light_speed(&self) -> f64 {
        self.c
    }
}

fn check_speed(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("light speed must be positive, got {c}")))
    }
}

fn check_point(x: &Vector3<f64>) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument("position must be finite".into()))
    }
}

/// Assembles G from `A`, `dA/dt` at position `x`.
///
/// `dX' = dX·A + X·Ȧ dt`, hence
/// `‖dX'‖² = dX·AAᵀ·dXᵀ + 2 dX·AȦᵀ·Xᵀ dt + X·ȦȦᵀ·Xᵀ dt²`.
fn assemble(a: &Matrix3<f64>, da: &Matrix3<f64>, x: &Vector3<f64>, c: f64, orthogonal: bool) -> Matrix4<f64> {
    let x_rate = apply(x, da); // X·Ȧ as a column
    let speed2 = x_rate.norm_squared();
    let cross = a * da.transpose() * x;
    let mut g = Matrix4::zeros();
    g[(0, 0)] = (c * c - speed2) / (c * c);
    for i in 0..3 {
        g[(0, i + 1)] = -cross[i] / c;
        g[(i + 1, 0)] = -cross[i] / c;
    }
    if orthogonal {
        for i in 0..3 {
            g[(i + 1, i + 1)] = -1.0;
        }
    } else {
        let aat = a * a.transpose();
        for i in 0..3 {
            for j in 0..3 {
                g[(i + 1, j + 1)] = -aat[(i, j)];
            }
        }
    }
    g
}

/// General interval, valid for any expression including sums.
pub fn interval_general(expr: &RotationExpr, x: &Vector3<f64>, t: f64, c: f64) -> Result<IntervalForm> {
    check_speed(c)?;
    check_point(x)?;
    let compiled = expr.compile()?;
    let (a, da) = compiled.matrix_and_derivative(t);
    Ok(IntervalForm {
        coeffs: assemble(&a, &da, x, c, false),
        c,
    })
}

/// Interval for products of rotations, using `A·Aᵀ = I`.
pub fn interval_msr(expr: &RotationExpr, x: &Vector3<f64>, t: f64, c: f64) -> Result<IntervalForm> {
    if !expr.is_sum_free() {
        return Err(Error::NotMsr);
    }
    check_speed(c)?;
    check_point(x)?;
    let compiled = expr.compile()?;
    let (a, da) = compiled.matrix_and_derivative(t);
    Ok(IntervalForm {
        coeffs: assemble(&a, &da, x, c, true),
        c,
    })
}

/// Closed form for a single z-axis rotation:
/// `(c² - ω²ρ²) dt² - 2 s (y dx - x dy) ω dt - dx² - dy² - dz²`, s = ±1.
pub fn asr_interval_closed(omega: f64, sense_sign: f64, x: &Vector3<f64>, c: f64) -> IntervalForm {
    let w = omega * sense_sign;
    let rho2 = x.x * x.x + x.y * x.y;
    let mut g = Matrix4::from_diagonal(&nalgebra::Vector4::new(
        (c * c - omega * omega * rho2) / (c * c),
        -1.0,
        -1.0,
        -1.0,
    ));
    g[(0, 1)] = -w * x.y / c;
    g[(1, 0)] = g[(0, 1)];
    g[(0, 2)] = w * x.x / c;
    g[(2, 0)] = g[(0, 2)];
    IntervalForm { coeffs: g, c }
}

fn with_cross(mut g: Matrix4<f64>, cross: [f64; 3], c: f64) -> Matrix4<f64> {
    // `cross` holds the full dt·dx_i coefficients
    for (i, k) in cross.iter().enumerate() {
        g[(0, i + 1)] = k / (2.0 * c);
        g[(i + 1, 0)] = k / (2.0 * c);
    }
    g
}

/// Averaged interval of `z(ω₁)·x(ω₂)·y(ω₃)`:
/// `{c² - [(x²+y²)ω₁² + (y²/2+z²+x²/2)ω₂² + (z²/2+3y²/4+3x²/4)ω₃²]} dt²
///  - 2(y dx - x dy)ω₁ dt - dx² - dy² - dz²`.
///
/// Valid for non-resonant positive frequencies; `ω₃ = 0` gives the two-leaf
/// product `z(ω)·x(ω)`.
pub fn msr_avg_closed(w1: f64, w2: f64, w3: f64, x: &Vector3<f64>, c: f64) -> AveragedMetric {
    let (px, py, pz) = (x.x, x.y, x.z);
    let bracket = (px * px + py * py) * w1 * w1
        + (0.5 * py * py + pz * pz + 0.5 * px * px) * w2 * w2
        + (0.5 * pz * pz + 0.75 * py * py + 0.75 * px * px) * w3 * w3;
    let g = Matrix4::from_diagonal(&nalgebra::Vector4::new((c * c - bracket) / (c * c), -1.0, -1.0, -1.0));
    let g = with_cross(g, [-2.0 * py * w1, 2.0 * px * w1, 0.0], c);
    AveragedMetric {
        coeffs: g,
        c,
        window: AveragingWindow::Static,
        error_bound: 0.0,
    }
}

/// Averaged interval of `z(ω₁) + x(ω₂) + y(ω₃)`:
/// `{c² - [(x²+y²)ω₁² + (y²+z²)ω₂² + (x²+z²)ω₃²]} dt² + cross - 3(dx²+dy²+dz²)`
/// with `cross = -2[(y dx - x dy)ω₁ + (z dy - y dz)ω₂ + (x dz - z dx)ω₃] dt`,
/// i.e. the sum of the three single-axis intervals' cross terms.
pub fn ssr_avg_closed(w1: f64, w2: f64, w3: f64, x: &Vector3<f64>, c: f64) -> Result<AveragedMetric> {
    if [w1, w2, w3].iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidArgument("frequencies must be non-negative".into()));
    }
    check_speed(c)?;
    let (px, py, pz) = (x.x, x.y, x.z);
    let bracket = (px * px + py * py) * w1 * w1 + (py * py + pz * pz) * w2 * w2 + (px * px + pz * pz) * w3 * w3;
    let g = Matrix4::from_diagonal(&nalgebra::Vector4::new((c * c - bracket) / (c * c), -3.0, -3.0, -3.0));
    let cross = [
        -2.0 * (py * w1 - pz * w3),
        -2.0 * (-px * w1 + pz * w2),
        -2.0 * (-py * w2 + px * w3),
    ];
    Ok(AveragedMetric {
        coeffs: with_cross(g, cross, c),
        c,
        window: AveragingWindow::Static,
        error_bound: 0.0,
    })
}

/// Cross-term coefficients `(dt·dx, dt·dy, dt·dz)` of the variant sum-rotation form
/// `-2[(y dx - x dy)ω₁ - (y dz + z dy)ω₂ + (z dx - x dz)ω₃] dt`.
///
/// The ω₂ and ω₃ parts disagree with direct averaging; kept for comparison
/// against [`ssr_avg_closed`].
pub fn ssr_cross_variant(w1: f64, w2: f64, w3: f64, x: &Vector3<f64>) -> [f64; 3] {
    let (px, py, pz) = (x.x, x.y, x.z);
    [
        -2.0 * (py * w1 + pz * w3),
        -2.0 * (-px * w1 - pz * w2),
        -2.0 * (-py * w2 - px * w3),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragingControl {
    /// Absolute tolerance for exact-period quadrature.
    pub period_tol: f64,
    /// Convergence threshold for the long-window estimate.
    pub window_tol: f64,
    /// Gauss–Legendre nodes per panel.
    pub nodes_per_panel: usize,
    pub max_panels: usize,
    /// Window doublings allowed for incommensurate frequencies.
    pub max_doublings: usize,
    /// Starting number of slowest-leaf periods in the long window.
    pub initial_periods: usize,
    /// Largest denominator accepted when recognizing frequency ratios.
    pub max_denominator: u64,
    /// Common periods longer than this many slowest-leaf periods are treated
    /// as incommensurate.
    pub max_period_ratio: f64,
}

impl Default for AveragingControl {
    fn default() -> Self {
        AveragingControl {
            period_tol: 1e-10,
            window_tol: 1e-6,
            nodes_per_panel: 10,
            max_panels: 1 << 18,
            max_doublings: 14,
            initial_periods: 16,
            max_denominator: 1000,
            max_period_ratio: 1000.0,
        }
    }
}

/// Best rational approximation p/q of `r` with q ≤ `max_den` within `tol`.
fn rational_approx(r: f64, max_den: u64, tol: f64) -> Option<(u64, u64)> {
    let (mut h0, mut h1) = (0_u64, 1_u64);
    let (mut k0, mut k1) = (1_u64, 0_u64);
    let mut x = r;
    for _ in 0..64 {
        let a = x.floor();
        if a > 1e12 {
            return None;
        }
        let a = a as u64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        if (h2 as f64 / k2 as f64 - r).abs() <= tol * r.abs().max(1.0) {
            return Some((h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = x - a as f64;
        if frac <= 0.0 {
            return None;
        }
        x = 1.0 / frac;
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Common period of the positive frequencies, if they are commensurate.
pub fn common_period(freqs: &[f64], control: &AveragingControl) -> Option<f64> {
    let positive: Vec<f64> = freqs.iter().copied().filter(|w| *w > 0.0).collect();
    let base = positive.iter().copied().fold(f64::INFINITY, f64::min);
    if !base.is_finite() {
        return None;
    }
    let mut ratios = Vec::with_capacity(positive.len());
    for w in &positive {
        ratios.push(rational_approx(w / base, control.max_denominator, 1e-12)?);
    }
    let lcm_den = ratios
        .iter()
        .try_fold(1_u64, |acc, (_, q)| acc.checked_mul(*q / gcd(acc, *q)))?;
    let numerators: Vec<u64> = ratios.iter().map(|(p, q)| p * (lcm_den / q)).collect();
    let g = numerators.iter().copied().fold(0, gcd);
    let period = 2.0 * PI * lcm_den as f64 / (base * g as f64);
    if period * base / (2.0 * PI) > control.max_period_ratio {
        return None;
    }
    Some(period)
}

struct Integrand<'a> {
    compiled: &'a CompiledRotation,
    x: Vector3<f64>,
    c: f64,
}

impl Integrand<'_> {
    fn at(&self, t: f64) -> Matrix4<f64> {
        let (a, da) = self.compiled.matrix_and_derivative(t);
        assemble(&a, &da, &self.x, self.c, false)
    }
}

fn max_abs4(m: &Matrix4<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Weighted mean `∫ f·w / ∫ w` over [a, b], doubling panels until the change
/// is ≤ tol. `weight` takes the normalized position s ∈ [-1, 1].
#[allow(clippy::too_many_arguments)]
fn converged_mean(
    f: &Integrand<'_>,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    weight: Option<fn(f64) -> f64>,
    start_panels: usize,
    tol: f64,
    max_panels: usize,
) -> Result<(Matrix4<f64>, usize, f64)> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mean = |panels: usize| match weight {
        None => rule.integrate(|t| f.at(t), a, b, panels, Matrix4::zeros()) / (b - a),
        Some(w) => {
            let num = rule.integrate(|t| f.at(t) * w((t - mid) / half), a, b, panels, Matrix4::zeros());
            let den = rule.integrate(|t| w((t - mid) / half), a, b, panels, 0.0);
            num / den
        }
    };
    let mut panels = start_panels.max(1);
    let mut previous = mean(panels);
    let mut windows = 1;
    loop {
        if panels * 2 > max_panels {
            return Err(Error::AveragingFailure {
                reason: format!("quadrature did not converge on [{a}, {b}] within {max_panels} panels"),
                windows,
                last_change: f64::NAN,
            });
        }
        panels *= 2;
        windows += 1;
        let next = mean(panels);
        let change = max_abs4(&(next - previous));
        if change <= tol {
            return Ok((next, panels, change));
        }
        previous = next;
    }
}

/// Smooth compactly supported window `exp(-1/(1-s²))`. Averages of
/// quasi-periodic functions against it converge faster than any power of
/// the window length.
fn bump(s: f64) -> f64 {
    let q = 1.0 - s * s;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

/// Time average `lim (1/2T)∫_{-T}^{T} G(X,t) dt` at a fixed position.
///
/// Commensurate frequencies are averaged exactly over one common period.
/// Otherwise a bump-weighted window centred on t = 0 is doubled until the
/// coefficients settle; the last change is reported as the error bound.
pub fn time_average_metric(
    expr: &RotationExpr,
    x: &Vector3<f64>,
    c: f64,
    control: &AveragingControl,
) -> Result<AveragedMetric> {
    check_speed(c)?;
    check_point(x)?;
    let compiled = expr.compile()?;
    let f = Integrand {
        compiled: &compiled,
        x: *x,
        c,
    };
    let freqs = expr.frequencies();
    let positive: Vec<f64> = freqs.iter().copied().filter(|w| *w > 0.0).collect();
    if positive.is_empty() {
        return Ok(AveragedMetric {
            coeffs: f.at(0.0),
            c,
            window: AveragingWindow::Static,
            error_bound: 0.0,
        });
    }
    let rule = GaussLegendre::new(control.nodes_per_panel);
    let fastest_sum: f64 = positive.iter().sum();
    // integrand is a trigonometric polynomial with frequencies up to 2·Σω
    let panels_for = |span: f64| ((span * 2.0 * fastest_sum / (2.0 * PI)).ceil() as usize + 1).max(4);

    if let Some(period) = common_period(&freqs, control) {
        let (coeffs, panels, change) = converged_mean(
            &f,
            &rule,
            0.0,
            period,
            None,
            panels_for(period),
            control.period_tol,
            control.max_panels,
        )?;
        return Ok(AveragedMetric {
            coeffs,
            c,
            window: AveragingWindow::ExactPeriod { period, panels },
            error_bound: change,
        });
    }

    let slowest = positive.iter().copied().fold(f64::INFINITY, f64::min);
    let mut periods = control.initial_periods.max(1);
    let half = |n: usize| n as f64 * PI / slowest;
    let window_mean = |n: usize| {
        let h = half(n);
        converged_mean(
            &f,
            &rule,
            -h,
            h,
            Some(bump),
            panels_for(2.0 * h),
            control.period_tol,
            control.max_panels,
        )
    };
    let mut previous = window_mean(periods)?.0;
    let mut last_change = f64::INFINITY;
    for _ in 0..control.max_doublings {
        periods *= 2;
        let next = window_mean(periods)?.0;
        last_change = max_abs4(&(next - previous));
        if last_change < control.window_tol {
            return Ok(AveragedMetric {
                coeffs: next,
                c,
                window: AveragingWindow::LongWindow {
                    half_width: half(periods),
                    periods,
                },
                error_bound: last_change,
            });
        }
        previous = next;
    }
    Err(Error::AveragingFailure {
        reason: "long-window average did not settle".into(),
        windows: control.max_doublings,
        last_change,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaInvarianceReport {
    pub base_omega: f64,
    pub delta_t: f64,
    /// `Δt·ω/2π`.
    pub periods: f64,
    /// Whether `Δt` is an integer number of base periods.
    pub at_invariance_time: bool,
    pub norm2_rest: f64,
    pub norm2_rotating: f64,
    /// `|‖ΔX'‖² - ‖ΔX‖²|`.
    pub discrepancy: f64,
}

/// Time `t₁ + 2πk/ω`.
pub fn invariance_time(t1: f64, k: i64, base_omega: f64) -> f64 {
    t1 + 2.0 * PI * k as f64 / base_omega
}

pub fn omega_invariance_check(
    expr: &RotationExpr,
    e1: &SpacetimeEvent,
    e2: &SpacetimeEvent,
    base_omega: f64,
) -> Result<OmegaInvarianceReport> {
    if !(base_omega.is_finite() && base_omega > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "base frequency must be positive, got {base_omega}"
        )));
    }
    if !(e1.is_finite() && e2.is_finite()) {
        return Err(Error::InvalidArgument("events must be finite".into()));
    }
    if !expr.is_sum_free() {
        return Err(Error::NotOmegaInvariant(
            "a sum rotation has a time-dependent determinant".into(),
        ));
    }
    for w in expr.frequencies() {
        let m = w / base_omega;
        if (m - m.round()).abs() > 1e-9 {
            return Err(Error::NotOmegaInvariant(format!(
                "frequency {w} is not an integer multiple of {base_omega}"
            )));
        }
    }
    let compiled = expr.compile()?;
    let moved = apply(&e2.position(), &compiled.matrix(e2.t)) - apply(&e1.position(), &compiled.matrix(e1.t));
    let rest = e2.position() - e1.position();
    let delta_t = e2.t - e1.t;
    let periods = delta_t * base_omega / (2.0 * PI);
    let norm2_rest = rest.norm_squared();
    let norm2_rotating = moved.norm_squared();
    Ok(OmegaInvarianceReport {
        base_omega,
        delta_t,
        periods,
        at_invariance_time: (periods - periods.round()).abs() <= 1e-9,
        norm2_rest,
        norm2_rotating,
        discrepancy: (norm2_rotating - norm2_rest).abs(),
    })
}

/// Determinant of the 4×4 coefficient matrix.
pub fn metric_determinant<M: MetricCoefficients + ?Sized>(form: &M) -> f64 {
    form.coefficients().determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotation::{AsrSpec, Axis, Sense};

    fn z(w: f64) -> RotationExpr {
        AsrSpec::z(w).into()
    }
    fn xr(w: f64) -> RotationExpr {
        AsrSpec::x(w).into()
    }
    fn yr(w: f64) -> RotationExpr {
        AsrSpec::y(w).into()
    }

    #[test]
    fn static_rotation_gives_minkowski() {
        let e = RotationExpr::product([z(0.0), xr(0.0)]);
        let g = interval_general(&e, &Vector3::new(1.0, 2.0, 3.0), 0.7, 2.0).unwrap();
        assert_eq!(
            g.coeffs,
            Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, -1.0, -1.0))
        );
        assert_eq!(metric_determinant(&g), -1.0);
    }

    #[test]
    fn z_leaf_matches_closed_form() {
        for sense in [Sense::Positive, Sense::Negative] {
            let w = 1.7;
            let c = 3.0;
            let x = Vector3::new(0.4, -1.1, 2.0);
            let e: RotationExpr = AsrSpec::z(w).with_sense(sense).into();
            for t in [0.0, 0.3, 2.9] {
                let g = interval_general(&e, &x, t, c).unwrap();
                let closed = asr_interval_closed(w, sense.sign(), &x, c);
                assert!(max_abs4(&(g.coeffs - closed.coeffs)) < 1e-14);
                let rho2 = x.x * x.x + x.y * x.y;
                assert!((g.dt2_coefficient() - (c * c - w * w * rho2)).abs() < 1e-12);
                assert!((g.dt_cross_coefficient(0) - (-2.0 * w * x.y * sense.sign())).abs() < 1e-13);
                assert!((g.dt_cross_coefficient(1) - (2.0 * w * x.x * sense.sign())).abs() < 1e-13);
                assert_eq!(g.dt_cross_coefficient(2), 0.0);
            }
        }
    }

    #[test]
    fn gtt_vanishes_on_light_cylinder() {
        let w = 2.0;
        let c = 1.0;
        let r = c / w;
        for phi in [0.0, 1.0, 2.5] {
            let x = Vector3::new(r * f64::cos(phi), r * f64::sin(phi), 0.7);
            let g = interval_general(&z(w), &x, 0.4, c).unwrap();
            assert!(g.dt2_coefficient().abs() < 1e-15);
        }
    }

    #[test]
    fn msr_path_rejects_sums() {
        let e = RotationExpr::sum([z(1.0), xr(1.0)]);
        assert_eq!(interval_msr(&e, &Vector3::zeros(), 0.0, 1.0), Err(Error::NotMsr));
    }

    #[test]
    fn msr_path_matches_general_for_products() {
        let e = RotationExpr::product([z(1.0), xr(1.0)]);
        let x = Vector3::new(0.3, 0.2, -0.5);
        let a = interval_msr(&e, &x, 0.0, 1.0).unwrap();
        let b = interval_general(&e, &x, 0.0, 1.0).unwrap();
        assert!(max_abs4(&(a.coeffs - b.coeffs)) < 1e-15);
        // at t = 0 Ȧ = Ȧ_z + Ȧ_x, so X·Ȧ = ω(y, -x + z, -y)
        let (px, py, pz) = (x.x, x.y, x.z);
        let expected = 1.0 - (py * py + (pz - px) * (pz - px) + py * py);
        assert!((a.dt2_coefficient() - expected).abs() < 1e-15);
    }

    #[test]
    fn static_leaf_average_equals_form() {
        let x = Vector3::new(0.2, 0.9, -0.3);
        let avg = time_average_metric(&z(1.3), &x, 1.0, &AveragingControl::default()).unwrap();
        let inst = interval_general(&z(1.3), &x, 0.0, 1.0).unwrap();
        assert!(max_abs4(&(avg.coeffs - inst.coeffs)) < 1e-12);
        assert!(matches!(avg.window, AveragingWindow::ExactPeriod { .. }));
    }

    #[test]
    fn ex_product_average() {
        let w = 1.5;
        let x = Vector3::new(0.2, -0.4, 0.3);
        let e = RotationExpr::product([z(w), xr(w)]);
        let avg = time_average_metric(&e, &x, 2.0, &AveragingControl::default()).unwrap();
        let expected = 4.0 - (1.5 * x.x * x.x + 1.5 * x.y * x.y + x.z * x.z) * w * w;
        assert!((avg.dt2_coefficient() - expected).abs() < 1e-10);
        let closed = msr_avg_closed(w, w, 0.0, &x, 2.0);
        assert!(max_abs4(&(avg.coeffs - closed.coeffs)) < 1e-10);
    }

    #[test]
    fn three_leaf_sum_has_spatial_factor_three() {
        let e = RotationExpr::sum([z(1.0), xr(3.0), yr(7.0)]);
        let x = Vector3::new(0.1, 0.2, 0.3);
        let avg = time_average_metric(&e, &x, 1.0, &AveragingControl::default()).unwrap();
        let s = avg.spatial_block();
        assert!((s - Matrix3::identity() * -3.0).amax() < 1e-10);
        let two = RotationExpr::sum([z(1.0), xr(3.0)]);
        let avg2 = time_average_metric(&two, &x, 1.0, &AveragingControl::default()).unwrap();
        assert!((avg2.spatial_block() - Matrix3::identity() * -2.0).amax() < 1e-10);
    }

    #[test]
    fn ssr_closed_examples() {
        let x = Vector3::new(0.5, -0.25, 2.0);
        let g = ssr_avg_closed(2.0, 0.0, 0.0, &x, 1.5).unwrap();
        assert!((g.dt2_coefficient() - (2.25 - (0.25 + 0.0625) * 4.0)).abs() < 1e-14);
        assert_eq!(g.spatial_block(), Matrix3::identity() * -3.0);
        let o = ssr_avg_closed(2.0, 3.0, 5.0, &Vector3::zeros(), 1.5).unwrap();
        assert_eq!(o.dt2_coefficient(), 2.25);
        assert!(ssr_avg_closed(-1.0, 0.0, 0.0, &x, 1.0).is_err());
    }

    #[test]
    fn variant_ssr_cross_terms_differ_only_in_omega2_omega3_parts() {
        let x = Vector3::new(0.3, -0.7, 0.5);
        let fixed = ssr_avg_closed(1.0, 0.0, 0.0, &x, 1.0).unwrap();
        let variant = ssr_cross_variant(1.0, 0.0, 0.0, &x);
        for i in 0..3 {
            assert!((fixed.dt_cross_coefficient(i) - variant[i]).abs() < 1e-15);
        }
        let fixed = ssr_avg_closed(1.0, 2.0, 3.0, &x, 1.0).unwrap();
        let variant = ssr_cross_variant(1.0, 2.0, 3.0, &x);
        assert!((0..3).any(|i| (fixed.dt_cross_coefficient(i) - variant[i]).abs() > 0.1));
    }

    #[test]
    fn commensurate_period_detection() {
        let ctl = AveragingControl::default();
        let p = common_period(&[2.0, 3.0], &ctl).unwrap();
        assert!((p - 2.0 * PI).abs() < 1e-14);
        let p = common_period(&[1.5, 2.5, 0.0], &ctl).unwrap();
        assert!((p - 4.0 * PI).abs() < 1e-13);
        assert!(common_period(&[1.0, 2f64.sqrt()], &ctl).is_none());
        assert!(common_period(&[0.0], &ctl).is_none());
    }

    #[test]
    fn incommensurate_average_reports_error_bound() {
        let e = RotationExpr::product([z(1.0), xr(2f64.sqrt())]);
        let x = Vector3::new(0.3, 0.1, -0.2);
        let avg = time_average_metric(&e, &x, 1.0, &AveragingControl::default()).unwrap();
        assert!(matches!(avg.window, AveragingWindow::LongWindow { .. }));
        assert!(avg.error_bound < 1e-6);
        let closed = msr_avg_closed(1.0, 2f64.sqrt(), 0.0, &x, 1.0);
        assert!((avg.dt2_coefficient() - closed.dt2_coefficient()).abs() < 1e-5);
    }

    #[test]
    fn averaging_failure_is_reported() {
        let e = RotationExpr::product([z(1.0), xr(2f64.sqrt()), yr(3f64.sqrt())]);
        let ctl = AveragingControl {
            max_doublings: 1,
            window_tol: 1e-14,
            ..Default::default()
        };
        let err = time_average_metric(&e, &Vector3::new(1.0, 1.0, 1.0), 1.0, &ctl).unwrap_err();
        assert!(matches!(err, Error::AveragingFailure { .. }));
    }

    #[test]
    fn omega_invariance_leaf() {
        let w = 1.3;
        let e: RotationExpr = AsrSpec {
            axis: Axis::direction(0.0, 0.6, 0.8).unwrap(),
            omega: w,
            sense: Sense::Positive,
        }
        .into();
        let e1 = SpacetimeEvent::new(0.3, -0.2, 1.0, 0.4);
        let t2 = invariance_time(e1.t, 3, w);
        let e2 = SpacetimeEvent::new(-1.0, 0.5, 0.2, t2);
        let r = omega_invariance_check(&e, &e1, &e2, w).unwrap();
        assert!(r.at_invariance_time);
        assert!(r.discrepancy <= 1e-12, "{r:?}");

        let e2 = SpacetimeEvent::new(-1.0, 0.5, 0.2, e1.t + PI / (2.0 * w));
        let r = omega_invariance_check(&e, &e1, &e2, w).unwrap();
        assert!(!r.at_invariance_time);
        assert!(r.discrepancy > 1e-6);

        // same spatial point: norm preserved pointwise at the rotation point only
        let p = SpacetimeEvent::new(0.0, 0.0, 0.0, 0.0);
        let q = SpacetimeEvent::new(0.0, 0.0, 0.0, 1.234);
        assert_eq!(omega_invariance_check(&e, &p, &q, w).unwrap().discrepancy, 0.0);
    }

    #[test]
    fn omega_invariance_errors() {
        let e1 = SpacetimeEvent::new(0.0, 0.0, 0.0, 0.0);
        let e = RotationExpr::product([z(1.0), xr(1.5)]);
        assert!(matches!(
            omega_invariance_check(&e, &e1, &e1, 1.0),
            Err(Error::NotOmegaInvariant(_))
        ));
        let s = RotationExpr::sum([z(1.0), xr(1.0)]);
        assert!(matches!(
            omega_invariance_check(&s, &e1, &e1, 1.0),
            Err(Error::NotOmegaInvariant(_))
        ));
        assert!(omega_invariance_check(&RotationExpr::product([z(1.0), xr(3.0)]), &e1, &e1, 1.0).is_ok());
    }

    #[test]
    fn determinant_of_single_axis_form() {
        // the cross terms exactly compensate the dt² coefficient: det = -1 on both sides of ρ = c/ω
        let w = 2.0;
        for rho in [0.1, 0.49, 0.51, 3.0] {
            let g = interval_general(&z(w), &Vector3::new(rho, 0.0, 0.0), 0.0, 1.0).unwrap();
            let direct = {
                let a = g.coeffs[(0, 0)];
                let b = g.coeffs[(0, 2)];
                // expand along the last row/column (diagonal -1 entries)
                -(a * 1.0 + b * b)
            };
            assert!((metric_determinant(&g) - direct).abs() < 1e-12);
            assert!((metric_determinant(&g) + 1.0).abs() < 1e-12);
            assert_eq!(g.dt2_coefficient() > 0.0, rho < 0.5);
        }
    }
}
