//! Boosted waves `ψ = q(x, y, ξ)·exp(iΩ(η + τ))` and finite-difference checks
//! of the Schrödinger-type and Klein–Gordon identities they satisfy.
//!
//! Time is `τ = c·t`. With `ξ = γ(z − βτ)` and `η = γ(τ − βz) − τ` the boosted
//! factor is `ψᵇ = q·exp(iΩη)` and `ψ = ψᵇ·exp(iΩτ)`.
//!
//! Derivatives of the explicit phase factors are taken analytically; only the
//! composite `Q(x, y, z, τ) = q(x, y, ξ(z, τ), τ)` is differenced. Residuals
//! are evaluated with denominators cleared, so zeros of `q` do not matter.

use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Spatial factor `q` of a wave.
pub trait SpatialProfile: Send + Sync + std::fmt::Debug {
    /// `q(p, τ)`; stationary profiles ignore `τ`.
    fn value(&self, p: &Vector3<f64>, tau: f64) -> Complex64;

    /// Exact `∇²q` in the profile's own coordinates, when known.
    fn laplacian(&self, _p: &Vector3<f64>, _tau: f64) -> Option<Complex64> {
        None
    }

    /// Exact `∂²q/∂z²`, when known.
    fn d2z(&self, _p: &Vector3<f64>, _tau: f64) -> Option<Complex64> {
        None
    }

    fn is_stationary(&self) -> bool {
        true
    }

    fn name(&self) -> String;
}

#[derive(Debug, Clone, Copy)]
pub struct Constant(pub f64);

impl SpatialProfile for Constant {
    fn value(&self, _p: &Vector3<f64>, _tau: f64) -> Complex64 {
        Complex64::new(self.0, 0.0)
    }
    fn laplacian(&self, _p: &Vector3<f64>, _tau: f64) -> Option<Complex64> {
        Some(Complex64::new(0.0, 0.0))
    }
    fn d2z(&self, _p: &Vector3<f64>, _tau: f64) -> Option<Complex64> {
        Some(Complex64::new(0.0, 0.0))
    }
    fn name(&self) -> String {
        format!("constant({})", self.0)
    }
}

/// `exp(−r²/2σ²)`.
#[derive(Debug, Clone, Copy)]
pub struct Gaussian {
    pub sigma: f64,
}

impl SpatialProfile for Gaussian {
    fn value(&self, p: &Vector3<f64>, _tau: f64) -> Complex64 {
        Complex64::new((-p.norm_squared() / (2.0 * self.sigma * self.sigma)).exp(), 0.0)
    }
    fn laplacian(&self, p: &Vector3<f64>, tau: f64) -> Option<Complex64> {
        let s2 = self.sigma * self.sigma;
        Some(self.value(p, tau) * (p.norm_squared() / (s2 * s2) - 3.0 / s2))
    }
    fn d2z(&self, p: &Vector3<f64>, tau: f64) -> Option<Complex64> {
        let s2 = self.sigma * self.sigma;
        Some(self.value(p, tau) * (p.z * p.z / (s2 * s2) - 1.0 / s2))
    }
    fn name(&self) -> String {
        format!("gaussian(sigma={})", self.sigma)
    }
}

/// `exp(i k·p)`, constant modulus.
#[derive(Debug, Clone, Copy)]
pub struct PlanePhase {
    pub k: Vector3<f64>,
}

impl SpatialProfile for PlanePhase {
    fn value(&self, p: &Vector3<f64>, _tau: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.k.dot(p))
    }
    fn laplacian(&self, p: &Vector3<f64>, tau: f64) -> Option<Complex64> {
        Some(self.value(p, tau) * -self.k.norm_squared())
    }
    fn d2z(&self, p: &Vector3<f64>, tau: f64) -> Option<Complex64> {
        Some(self.value(p, tau) * -(self.k.z * self.k.z))
    }
    fn name(&self) -> String {
        format!("plane_phase(k=[{},{},{}])", self.k.x, self.k.y, self.k.z)
    }
}

/// `exp(−r)`.
#[derive(Debug, Clone, Copy)]
pub struct ExpDecay;

impl SpatialProfile for ExpDecay {
    fn value(&self, p: &Vector3<f64>, _tau: f64) -> Complex64 {
        Complex64::new((-p.norm()).exp(), 0.0)
    }
    fn laplacian(&self, p: &Vector3<f64>, tau: f64) -> Option<Complex64> {
        let r = p.norm();
        (r > 0.0).then(|| self.value(p, tau) * (1.0 - 2.0 / r))
    }
    fn name(&self) -> String {
        "exp_decay".into()
    }
}

/// `sin(kr)/(kr)`, a Helmholtz eigenfunction with `∇²q = −k²q`.
#[derive(Debug, Clone, Copy)]
pub struct SphericalWave {
    pub k: f64,
}

impl SpatialProfile for SphericalWave {
    fn value(&self, p: &Vector3<f64>, _tau: f64) -> Complex64 {
        let x = self.k * p.norm();
        let v = if x.abs() < 1e-4 {
            1.0 - x * x / 6.0 + x.powi(4) / 120.0
        } else {
            x.sin() / x
        };
        Complex64::new(v, 0.0)
    }
    fn laplacian(&self, p: &Vector3<f64>, tau: f64) -> Option<Complex64> {
        Some(self.value(p, tau) * -(self.k * self.k))
    }
    fn name(&self) -> String {
        format!("spherical_wave(k={})", self.k)
    }
}

/// `exp(ikx)·(1.5 + sin(ντ)·cos(κy))`; deliberately not stationary.
#[derive(Debug, Clone, Copy)]
pub struct Breathing {
    pub k: f64,
    pub nu: f64,
    pub kappa: f64,
}

impl SpatialProfile for Breathing {
    fn value(&self, p: &Vector3<f64>, tau: f64) -> Complex64 {
        Complex64::from_polar(1.5 + (self.nu * tau).sin() * (self.kappa * p.y).cos(), self.k * p.x)
    }
    fn is_stationary(&self) -> bool {
        false
    }
    fn name(&self) -> String {
        format!("breathing(k={},nu={},kappa={})", self.k, self.nu, self.kappa)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoostParams {
    pub beta: f64,
    pub gamma: f64,
}

impl BoostParams {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.abs() < 1.0) {
            return Err(Error::SuperluminalBoost { beta });
        }
        Ok(BoostParams {
            beta,
            gamma: 1.0 / (1.0 - beta * beta).sqrt(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct BoostedWave {
    pub profile: Arc<dyn SpatialProfile>,
    pub omega: f64,
    /// `+1` or `−1`, the sign in `exp(±iΩτ)`.
    pub sign: f64,
    pub boost: BoostParams,
}

pub fn build_boosted_wave(profile: Arc<dyn SpatialProfile>, omega: f64, beta: f64) -> Result<BoostedWave> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!("Omega must be positive, got {omega}")));
    }
    Ok(BoostedWave {
        profile,
        omega,
        sign: 1.0,
        boost: BoostParams::new(beta)?,
    })
}

impl BoostedWave {
    pub fn with_sign(mut self, sign: f64) -> Self {
        self.sign = if sign < 0.0 { -1.0 } else { 1.0 };
        self
    }

    pub fn signed_omega(&self) -> f64 {
        self.sign * self.omega
    }

    pub fn xi(&self, z: f64, tau: f64) -> f64 {
        self.boost.gamma * (z - self.boost.beta * tau)
    }

    pub fn eta(&self, z: f64, tau: f64) -> f64 {
        let BoostParams { beta, gamma } = self.boost;
        gamma * (tau - beta * z) - tau
    }

    /// `Q(x, y, z, τ) = q(x, y, ξ, τ)`.
    pub fn q_composite(&self, x: &Vector3<f64>, tau: f64) -> Complex64 {
        self.profile.value(&Vector3::new(x.x, x.y, self.xi(x.z, tau)), tau)
    }

    pub fn psi_b(&self, x: &Vector3<f64>, tau: f64) -> Complex64 {
        self.q_composite(x, tau) * Complex64::from_polar(1.0, self.signed_omega() * self.eta(x.z, tau))
    }

    pub fn psi(&self, x: &Vector3<f64>, tau: f64) -> Complex64 {
        let phase = self.signed_omega() * (self.eta(x.z, tau) + tau);
        self.q_composite(x, tau) * Complex64::from_polar(1.0, phase)
    }

    /// Exact `∇²Q` and `∂²Q/∂z²` in grid coordinates, if the profile knows them.
    fn analytic_second_derivatives(&self, x: &Vector3<f64>, tau: f64) -> Option<(Complex64, Complex64)> {
        let p = Vector3::new(x.x, x.y, self.xi(x.z, tau));
        let lap = self.profile.laplacian(&p, tau)?;
        let dzz = self.profile.d2z(&p, tau)?;
        let g2 = self.boost.gamma * self.boost.gamma;
        Some((lap + dzz * (g2 - 1.0), dzz * g2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stencil {
    /// Second-order central differences.
    Three,
    /// Fourth-order central differences.
    Five,
}

/// Sample lattice and difference step.
///
/// Residuals are reported on a `samples³` lattice spanning the cube of
/// half-width `half_extent` about `center`; derivatives use step `h`. The
/// lattice does not move with `h`, so norms compare across refinements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub center: [f64; 3],
    pub half_extent: f64,
    pub samples: usize,
    pub h: f64,
    pub tau: f64,
    pub stencil: Stencil,
}

impl GridSpec {
    pub fn cube(half_extent: f64, samples: usize, h: f64) -> Self {
        GridSpec {
            center: [0.0; 3],
            half_extent,
            samples,
            h,
            tau: 0.0,
            stencil: Stencil::Three,
        }
    }

    pub fn with_h(self, h: f64) -> Self {
        GridSpec { h, ..self }
    }

    pub fn with_stencil(self, stencil: Stencil) -> Self {
        GridSpec { stencil, ..self }
    }

    pub fn with_tau(self, tau: f64) -> Self {
        GridSpec { tau, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {}", self.h)));
        }
        if !(self.half_extent >= 0.0 && self.half_extent.is_finite()) {
            return Err(Error::InvalidArgument("extent must be finite and non-negative".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidArgument("grid needs at least one sample".into()));
        }
        Ok(())
    }

    pub fn nodes(&self) -> Vec<Vector3<f64>> {
        let n = self.samples;
        let coord = |i: usize| {
            if n == 1 {
                0.0
            } else {
                -self.half_extent + 2.0 * self.half_extent * i as f64 / (n - 1) as f64
            }
        };
        let c = Vector3::from(self.center);
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.push(c + Vector3::new(coord(i), coord(j), coord(k)));
                }
            }
        }
        out
    }
}

/// First and second central differences of `f` at 0.
fn diff<F: Fn(f64) -> Complex64>(f: F, h: f64, stencil: Stencil) -> (Complex64, Complex64) {
    let f0 = f(0.0);
    let (p1, m1) = (f(h), f(-h));
    match stencil {
        Stencil::Three => ((p1 - m1) / (2.0 * h), (p1 - f0 * 2.0 + m1) / (h * h)),
        Stencil::Five => {
            let (p2, m2) = (f(2.0 * h), f(-2.0 * h));
            (
                (m2 - p2 + (p1 - m1) * 8.0) / (12.0 * h),
                ((p1 + m1) * 16.0 - p2 - m2 - f0 * 30.0) / (12.0 * h * h),
            )
        }
    }
}

/// Finite-difference derivatives of `Q` at one node.
#[derive(Debug, Clone, Copy)]
struct Jet {
    q: Complex64,
    q_t: Complex64,
    q_tt: Complex64,
    q_z: Complex64,
    q_zz: Complex64,
    lap: Complex64,
}

fn jet(w: &BoostedWave, x: &Vector3<f64>, tau: f64, h: f64, stencil: Stencil) -> Jet {
    let q = w.q_composite(x, tau);
    let (q_t, q_tt) = diff(|s| w.q_composite(x, tau + s), h, stencil);
    let (_, q_xx) = diff(|s| w.q_composite(&(x + Vector3::x() * s), tau), h, stencil);
    let (_, q_yy) = diff(|s| w.q_composite(&(x + Vector3::y() * s), tau), h, stencil);
    let (q_z, q_zz) = diff(|s| w.q_composite(&(x + Vector3::z() * s), tau), h, stencil);
    Jet {
        q,
        q_t,
        q_tt,
        q_z,
        q_zz,
        lap: q_xx + q_yy + q_zz,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max: f64,
    pub rms: f64,
    pub grid: GridSpec,
    /// Observed order from a rerun at `h/2`, when one was made.
    pub order_estimate: Option<f64>,
    /// Set when the `h/2` rerun does not shrink the residual at second order.
    pub resolution_warning: bool,
}

fn norms(values: &[f64]) -> (f64, f64) {
    let max = values.iter().fold(0.0f64, |m, v| m.max(*v));
    let rms = if values.is_empty() {
        0.0
    } else {
        (pairwise_sum(&values.iter().map(|v| v * v).collect::<Vec<_>>()) / values.len() as f64).sqrt()
    };
    (max, rms)
}

/// Pairwise summation in a fixed order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Log-ratio order between two residual norms at steps `h` and `h/2`.
pub fn observed_order(coarse: f64, fine: f64) -> Option<f64> {
    (coarse > 0.0 && fine > 0.0).then(|| (coarse / fine).log2())
}

/// Orders between consecutive `(h, norm)` pairs.
pub fn convergence_orders(study: &[(f64, f64)]) -> Vec<f64> {
    study
        .windows(2)
        .map(|p| (p[0].1 / p[1].1).ln() / (p[0].0 / p[1].0).ln())
        .collect()
}

/// Residual level treated as round-off when judging resolution.
pub const ROUNDOFF_FLOOR: f64 = 1e-11;

fn with_order(coarse: ResidualReport, fine: &ResidualReport, expected: f64) -> ResidualReport {
    let order = observed_order(coarse.max, fine.max);
    ResidualReport {
        order_estimate: order,
        resolution_warning: fine.max > ROUNDOFF_FLOOR && order.is_some_and(|p| p < expected - 0.5),
        ..coarse
    }
}

fn stencil_order(s: Stencil) -> f64 {
    match s {
        Stencil::Three => 2.0,
        Stencil::Five => 4.0,
    }
}

/// Cleared Schrödinger-form residual at each node, and the node list.
///
/// `−iγ ∂τψᵇ + (1/2Ω)∇²ψᵇ − [(1/2Ω)(∇²q/q) + (Ω/2)(γ−1)²]ψᵇ`, with `∇²q`
/// the Laplacian of `Q` in grid coordinates. When `keep_boost_term` is false
/// the `(γ−1)²` term is left out, so the result measures it.
pub fn schrodinger_field(
    w: &BoostedWave,
    grid: &GridSpec,
    keep_boost_term: bool,
) -> Result<Vec<(Vector3<f64>, Complex64)>> {
    grid.validate()?;
    let BoostParams { beta, gamma } = w.boost;
    let om = w.signed_omega();
    let boost_term = if keep_boost_term {
        0.5 * om * (gamma - 1.0).powi(2)
    } else {
        0.0
    };
    let i = Complex64::i();
    let mut out = Vec::new();
    for x in grid.nodes() {
        let j = jet(w, &x, grid.tau, grid.h, grid.stencil);
        // ψᵇ = Q·P with P = exp(iΩη); P is differentiated exactly
        let dt = j.q_t + i * om * (gamma - 1.0) * j.q;
        let lap = j.lap - i * 2.0 * om * gamma * beta * j.q_z - j.q * (om * om * gamma * gamma * beta * beta);
        let u_lap = match w.analytic_second_derivatives(&x, grid.tau) {
            Some((lap_q, _)) => lap_q,
            None => j.lap,
        };
        let r = -i * gamma * dt + lap / (2.0 * om) - u_lap / (2.0 * om) - j.q * boost_term;
        let phase = Complex64::from_polar(1.0, om * w.eta(x.z, grid.tau));
        out.push((x, r * phase));
    }
    Ok(out)
}

pub fn schrodinger_residual(w: &BoostedWave, grid: &GridSpec) -> Result<ResidualReport> {
    let single = |g: &GridSpec| -> Result<ResidualReport> {
        let field = schrodinger_field(w, g, true)?;
        let (max, rms) = norms(&field.iter().map(|(_, r)| r.norm()).collect::<Vec<_>>());
        Ok(ResidualReport {
            max,
            rms,
            grid: *g,
            order_estimate: None,
            resolution_warning: false,
        })
    };
    let coarse = single(grid)?;
    let fine = single(&grid.with_h(grid.h / 2.0))?;
    Ok(with_order(coarse, &fine, stencil_order(grid.stencil)))
}

/// Least-squares constant `c` in `R₀ ≈ c·ψᵇ`, where `R₀` is the Schrödinger
/// residual without the boost term.
pub fn extracted_boost_term(w: &BoostedWave, grid: &GridSpec) -> Result<f64> {
    let field = schrodinger_field(w, grid, false)?;
    let mut num = Vec::with_capacity(field.len());
    let mut den = Vec::with_capacity(field.len());
    for (x, r) in &field {
        let pb = w.psi_b(x, grid.tau);
        num.push((pb.conj() * r).re);
        den.push(pb.norm_sqr());
    }
    let d = pairwise_sum(&den);
    if d == 0.0 {
        return Err(Error::DivisionSingularity {
            nodes: field.iter().map(|(x, _)| [x.x, x.y, x.z]).collect(),
        });
    }
    Ok(pairwise_sum(&num) / d)
}

/// `(Ω/2)(γ−1)²` for a given β.
pub fn boost_term(omega: f64, beta: f64) -> Result<f64> {
    let b = BoostParams::new(beta)?;
    Ok(0.5 * omega * (b.gamma - 1.0).powi(2))
}

/// `|(γ−1)²/2 − β⁴/8|`.
pub fn boost_term_taylor_gap(beta: f64) -> Result<f64> {
    let b = BoostParams::new(beta)?;
    Ok(((b.gamma - 1.0).powi(2) / 2.0 - beta.powi(4) / 8.0).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoostSweep {
    pub betas: Vec<f64>,
    pub extracted: Vec<f64>,
    pub analytic: Vec<f64>,
    pub slope_extracted: f64,
    pub slope_analytic: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Measures the boost term over a set of β and fits its power law.
pub fn boost_term_sweep(
    profile: Arc<dyn SpatialProfile>,
    omega: f64,
    betas: &[f64],
    grid: &GridSpec,
) -> Result<BoostSweep> {
    if betas.len() < 2 || betas.iter().any(|b| *b <= 0.0) {
        return Err(Error::InvalidArgument(
            "sweep needs at least two positive beta values".into(),
        ));
    }
    let mut extracted = Vec::new();
    let mut analytic = Vec::new();
    for &beta in betas {
        let w = build_boosted_wave(profile.clone(), omega, beta)?;
        extracted.push(extracted_boost_term(&w, grid)?);
        analytic.push(boost_term(omega, beta)?);
    }
    Ok(BoostSweep {
        slope_extracted: loglog_slope(betas, &extracted),
        slope_analytic: loglog_slope(betas, &analytic),
        betas: betas.to_vec(),
        extracted,
        analytic,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KleinGordonReport {
    pub residual: ResidualReport,
    pub scalar_mean: f64,
    pub scalar_std: f64,
    /// Largest `|s_h − s_{h/2}|` over the nodes.
    pub error_estimate: f64,
    /// `scalar_std ≤ 10 × error_estimate`.
    pub scalar_uniform: bool,
    /// Largest imaginary part of the extracted scalar.
    pub scalar_max_imag: f64,
}

struct KgNode {
    x: Vector3<f64>,
    residual: Complex64,
    scalar: Complex64,
    psi: Complex64,
}

fn kg_nodes(w: &BoostedWave, grid: &GridSpec) -> Result<Vec<KgNode>> {
    grid.validate()?;
    let BoostParams { beta, gamma } = w.boost;
    let om = w.signed_omega();
    let i = Complex64::i();
    let mut out = Vec::new();
    for x in grid.nodes() {
        let j = jet(w, &x, grid.tau, grid.h, grid.stencil);
        // ψ = Q·exp(iφ), φ = Ωγ(τ − βz)
        let d_tt = j.q_tt + i * 2.0 * om * gamma * j.q_t - j.q * (om * om * gamma * gamma);
        let lap = j.lap - i * 2.0 * om * gamma * beta * j.q_z - j.q * (om * om * gamma * gamma * beta * beta);
        let box_q = d_tt - lap;
        let bracket_q = match w.analytic_second_derivatives(&x, grid.tau) {
            Some((lap_q, zz_q)) => lap_q - zz_q * (beta * beta),
            None => j.lap - j.q_zz * (beta * beta),
        } + j.q * (w.omega * w.omega);
        let phase = Complex64::from_polar(1.0, om * gamma * (grid.tau - beta * x.z));
        out.push(KgNode {
            x,
            residual: (box_q + bracket_q) * phase,
            scalar: if j.q == Complex64::new(0.0, 0.0) {
                Complex64::new(f64::NAN, 0.0)
            } else {
                -box_q / j.q
            },
            psi: j.q * phase,
        });
    }
    Ok(out)
}

/// Relative modulus below which `ψ` counts as vanishing.
pub const VANISHING_RELATIVE: f64 = 1e-10;

fn check_nonvanishing(nodes: &[(Vector3<f64>, Complex64)]) -> Result<()> {
    let peak = nodes.iter().fold(0.0f64, |m, (_, v)| m.max(v.norm()));
    let bad: Vec<[f64; 3]> = nodes
        .iter()
        .filter(|(_, v)| !(v.norm() > VANISHING_RELATIVE * peak))
        .map(|(x, _)| [x.x, x.y, x.z])
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::DivisionSingularity { nodes: bad })
    }
}

/// Klein–Gordon residual plus the extracted scalar `s = −(1/ψ)□ψ`.
pub fn klein_gordon_residual(w: &BoostedWave, grid: &GridSpec) -> Result<KleinGordonReport> {
    let coarse = kg_nodes(w, grid)?;
    let fine = kg_nodes(w, &grid.with_h(grid.h / 2.0))?;
    check_nonvanishing(&coarse.iter().map(|n| (n.x, n.psi)).collect::<Vec<_>>())?;

    let (max, rms) = norms(&coarse.iter().map(|n| n.residual.norm()).collect::<Vec<_>>());
    let (fmax, _) = norms(&fine.iter().map(|n| n.residual.norm()).collect::<Vec<_>>());
    let report = ResidualReport {
        max,
        rms,
        grid: *grid,
        order_estimate: None,
        resolution_warning: false,
    };
    let fine_report = ResidualReport {
        max: fmax,
        ..report.clone()
    };
    let residual = with_order(report, &fine_report, stencil_order(grid.stencil));

    let s: Vec<f64> = coarse.iter().map(|n| n.scalar.re).collect();
    let n = s.len() as f64;
    let mean = pairwise_sum(&s) / n;
    let var = pairwise_sum(&s.iter().map(|v| (v - mean).powi(2)).collect::<Vec<_>>()) / n;
    let error_estimate = coarse
        .iter()
        .zip(&fine)
        .fold(0.0f64, |m, (a, b)| m.max((a.scalar - b.scalar).norm()));
    let scalar_std = var.sqrt();
    Ok(KleinGordonReport {
        residual,
        scalar_mean: mean,
        scalar_std,
        error_estimate,
        scalar_uniform: scalar_std <= 10.0 * error_estimate,
        scalar_max_imag: coarse.iter().fold(0.0f64, |m, n| m.max(n.scalar.im.abs())),
    })
}

/// Largest `|□ψ|` on the grid.
pub fn wave_equation_residual(w: &BoostedWave, grid: &GridSpec) -> Result<f64> {
    let nodes = kg_nodes(w, grid)?;
    Ok(nodes.iter().fold(0.0f64, |m, n| m.max((n.scalar * n.psi).norm())))
}

/// Residual field `(x, y, z, Re, Im)` for CSV export.
pub fn residual_field(w: &BoostedWave, grid: &GridSpec, kind: ResidualKind) -> Result<Vec<[f64; 5]>> {
    let rows = match kind {
        ResidualKind::Schrodinger => schrodinger_field(w, grid, true)?,
        ResidualKind::KleinGordon => kg_nodes(w, grid)?.into_iter().map(|n| (n.x, n.residual)).collect(),
    };
    Ok(rows.into_iter().map(|(x, r)| [x.x, x.y, x.z, r.re, r.im]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ResidualKind {
    Schrodinger,
    KleinGordon,
}

/// Units of the energies in a [`PotentialDecomposition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EnergyScale {
    /// Energies in units of `ħ²/2m`.
    Raw,
    /// `ħ = c = 1`, `m = Ω`: energies are `u/(2Ω)`.
    Natural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `E < 0`.
    Capture,
    /// `E ≥ 0`.
    FreeMotion,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialDecomposition {
    pub nodes: Vec<[f64; 3]>,
    /// `∇²q/q`, by finite differences.
    pub u: Vec<f64>,
    /// `U = scale·u − E`.
    pub potential: Vec<f64>,
    pub energy: f64,
    pub scale: f64,
    pub units: EnergyScale,
    pub regime: Regime,
}

/// Splits `(ħ²/2m)∇²q/q` into `U + E` with `U` vanishing at the largest
/// radius on the grid.
pub fn potential_decomposition(
    profile: &dyn SpatialProfile,
    omega: f64,
    units: EnergyScale,
    grid: &GridSpec,
) -> Result<PotentialDecomposition> {
    grid.validate()?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!("Omega must be positive, got {omega}")));
    }
    let nodes = grid.nodes();
    let tau = grid.tau;
    let values: Vec<(Vector3<f64>, Complex64)> = nodes.iter().map(|x| (*x, profile.value(x, tau))).collect();
    check_nonvanishing(&values)?;
    let mut u = Vec::with_capacity(nodes.len());
    for (x, q) in &values {
        let mut lap = Complex64::new(0.0, 0.0);
        for axis in [Vector3::x(), Vector3::y(), Vector3::z()] {
            lap += diff(|s| profile.value(&(x + axis * s), tau), grid.h, grid.stencil).1;
        }
        u.push((lap / q).re);
    }
    let scale = match units {
        EnergyScale::Raw => 1.0,
        EnergyScale::Natural => 1.0 / (2.0 * omega),
    };
    let center = Vector3::from(grid.center);
    let radii: Vec<f64> = nodes.iter().map(|x| (x - center).norm()).collect();
    let r_far = radii.iter().fold(0.0f64, |m, r| m.max(*r));
    let far: Vec<f64> = radii
        .iter()
        .zip(&u)
        .filter(|(r, _)| **r >= r_far * (1.0 - 1e-12))
        .map(|(_, v)| scale * v)
        .collect();
    let energy = pairwise_sum(&far) / far.len() as f64;
    Ok(PotentialDecomposition {
        nodes: nodes.iter().map(|x| [x.x, x.y, x.z]).collect(),
        potential: u.iter().map(|v| scale * v - energy).collect(),
        u,
        energy,
        scale,
        units,
        regime: if energy < 0.0 {
            Regime::Capture
        } else {
            Regime::FreeMotion
        },
    })
}
