//! Axis rotations with constant angular frequency and their compositions.
//!
//! Convention throughout the crate: points are row vectors and transform as
//! `X' = X·A`. For the z axis with positive sense,
//!
//! ```text
//!        | cos ωt  -sin ωt  0 |
//! A(t) = | sin ωt   cos ωt  0 |
//!        |   0        0     1 |
//! ```
//!
//! Products compose left to right in list order; sums add entrywise.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on the Euclidean norm of an arbitrary rotation axis.
pub const AXIS_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    X,
    Y,
    Z,
    /// Arbitrary direction; must be a unit vector.
    Direction([f64; 3]),
}

impl Axis {
    /// Builds an arbitrary-direction axis, rejecting non-unit input.
    pub fn direction(dx: f64, dy: f64, dz: f64) -> Result<Self> {
        let axis = Axis::Direction([dx, dy, dz]);
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if let Axis::Direction(d) = self {
            let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            if !norm.is_finite() || (norm - 1.0).abs() > AXIS_NORM_TOL {
                return Err(Error::InvalidAxis { norm });
            }
        }
        Ok(())
    }

    pub fn unit_vector(&self) -> Vector3<f64> {
        match *self {
            Axis::X => Vector3::x(),
            Axis::Y => Vector3::y(),
            Axis::Z => Vector3::z(),
            Axis::Direction(d) => Vector3::new(d[0], d[1], d[2]),
        }
    }

    /// True if the two axes are parallel or antiparallel.
    pub fn is_parallel(&self, other: &Axis) -> bool {
        self.unit_vector().cross(&other.unit_vector()).norm() < 1e-12
    }

    /// Fixed angles (polar, azimuth) with polar in [0, π] and azimuth in (-π, π].
    pub fn fixed_angles(&self) -> (f64, f64) {
        let n = self.unit_vector();
        let polar = n.z.clamp(-1.0, 1.0).acos();
        let mut azimuth = n.y.atan2(n.x);
        if azimuth <= -PI {
            azimuth += 2.0 * PI;
        }
        (polar, azimuth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sense {
    Positive,
    Negative,
}

impl Sense {
    pub fn sign(self) -> f64 {
        match self {
            Sense::Positive => 1.0,
            Sense::Negative => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Sense::Positive => Sense::Negative,
            Sense::Negative => Sense::Positive,
        }
    }
}

/// A single axis rotation: axis, angular frequency and direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsrSpec {
    pub axis: Axis,
    pub omega: f64,
    pub sense: Sense,
}

impl AsrSpec {
    pub fn new(axis: Axis, omega: f64, sense: Sense) -> Result<Self> {
        let spec = AsrSpec { axis, omega, sense };
        spec.validate()?;
        Ok(spec)
    }

    pub fn z(omega: f64) -> Self {
        AsrSpec {
            axis: Axis::Z,
            omega,
            sense: Sense::Positive,
        }
    }

    pub fn x(omega: f64) -> Self {
        AsrSpec {
            axis: Axis::X,
            omega,
            sense: Sense::Positive,
        }
    }

    pub fn y(omega: f64) -> Self {
        AsrSpec {
            axis: Axis::Y,
            omega,
            sense: Sense::Positive,
        }
    }

    pub fn with_sense(mut self, sense: Sense) -> Self {
        self.sense = sense;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.axis.validate()?;
        if !(self.omega.is_finite() && self.omega >= 0.0) {
            return Err(Error::InvalidExpression(format!(
                "angular frequency must be finite and non-negative, got {}",
                self.omega
            )));
        }
        Ok(())
    }

    /// Signed angular velocity `sense * omega`.
    pub fn signed_omega(&self) -> f64 {
        self.sense.sign() * self.omega
    }

    /// The inverse rotation: same axis and frequency, opposite sense.
    pub fn inverse(&self) -> Self {
        AsrSpec {
            sense: self.sense.reversed(),
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RotationExpr {
    Leaf(AsrSpec),
    /// Ordered matrix product.
    Product(Vec<RotationExpr>),
    /// Entrywise matrix sum.
    Sum(Vec<RotationExpr>),
}

impl From<AsrSpec> for RotationExpr {
    fn from(spec: AsrSpec) -> Self {
        RotationExpr::Leaf(spec)
    }
}

impl RotationExpr {
    pub fn product<I: IntoIterator<Item = RotationExpr>>(factors: I) -> Self {
        RotationExpr::Product(factors.into_iter().collect())
    }

    pub fn sum<I: IntoIterator<Item = RotationExpr>>(terms: I) -> Self {
        RotationExpr::Sum(terms.into_iter().collect())
    }

    /// Checks structural well-formedness and every leaf.
    pub fn validate(&self) -> Result<()> {
        match self {
            RotationExpr::Leaf(spec) => spec.validate(),
            RotationExpr::Product(children) | RotationExpr::Sum(children) => {
                if children.is_empty() {
                    return Err(Error::InvalidExpression("empty composition list".to_string()));
                }
                children.iter().try_for_each(RotationExpr::validate)
            }
        }
    }

    pub fn leaves(&self) -> Vec<&AsrSpec> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a AsrSpec>) {
        match self {
            RotationExpr::Leaf(spec) => out.push(spec),
            RotationExpr::Product(c) | RotationExpr::Sum(c) => c.iter().for_each(|e| e.collect_leaves(out)),
        }
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.leaves().iter().map(|l| l.omega).collect()
    }

    /// True when no Sum node occurs anywhere in the tree.
    pub fn is_sum_free(&self) -> bool {
        match self {
            RotationExpr::Leaf(_) => true,
            RotationExpr::Product(c) => c.iter().all(RotationExpr::is_sum_free),
            RotationExpr::Sum(_) => false,
        }
    }

    /// Copy with every Sum's terms sorted by their serialized form.
    pub fn canonical(&self) -> RotationExpr {
        match self {
            RotationExpr::Leaf(s) => RotationExpr::Leaf(*s),
            RotationExpr::Product(c) => RotationExpr::Product(c.iter().map(RotationExpr::canonical).collect()),
            RotationExpr::Sum(c) => {
                let mut keyed: Vec<(String, RotationExpr)> = c
                    .iter()
                    .map(|e| {
                        let e = e.canonical();
                        (e.to_string(), e)
                    })
                    .collect();
                keyed.sort_by(|a, b| a.0.cmp(&b.0));
                RotationExpr::Sum(keyed.into_iter().map(|(_, e)| e).collect())
            }
        }
    }

    /// Validates, canonicalizes and precomputes the fixed leaf frames.
    pub fn compile(&self) -> Result<CompiledRotation> {
        self.validate()?;
        Ok(CompiledRotation {
            root: Node::build(&self.canonical()),
        })
    }
}

fn fmt_real(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    // `{}` on f64 is the shortest representation that round-trips.
    write!(f, "{v}")
}

impl fmt::Display for AsrSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.axis {
            Axis::X => f.write_str("x")?,
            Axis::Y => f.write_str("y")?,
            Axis::Z => f.write_str("z")?,
            Axis::Direction(d) => {
                f.write_str("u(")?;
                fmt_real(f, d[0])?;
                f.write_str(",")?;
                fmt_real(f, d[1])?;
                f.write_str(",")?;
                fmt_real(f, d[2])?;
                f.write_str(")")?;
            }
        }
        f.write_str("(")?;
        if self.sense == Sense::Negative {
            f.write_str("-")?;
        }
        fmt_real(f, self.omega)?;
        f.write_str(")")
    }
}

impl fmt::Display for RotationExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RotationExpr::Leaf(spec) => write!(f, "{spec}"),
            RotationExpr::Product(children) => {
                for (i, child) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    match child {
                        RotationExpr::Leaf(_) => write!(f, "{child}")?,
                        _ => write!(f, "({child})")?,
                    }
                }
                Ok(())
            }
            RotationExpr::Sum(children) => {
                for (i, child) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str("+")?;
                    }
                    match child {
                        RotationExpr::Sum(_) => write!(f, "({child})")?,
                        _ => write!(f, "{child}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

/// Rotation by `angle` about the unit vector `n`, as a matrix acting on row
/// vectors from the right. Test oracle for the coordinate forms.
#[cfg(test)]
fn axis_angle(n: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    let k = skew(n);
    Matrix3::identity() * c + k * s + n * n.transpose() * (1.0 - c)
}

/// d/dθ of [`axis_angle`].
#[cfg(test)]
fn axis_angle_rate(n: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    let k = skew(n);
    Matrix3::identity() * (-s) + k * c + n * n.transpose() * s
}

#[cfg(test)]
fn skew(n: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -n.z, n.y, n.z, 0.0, -n.x, -n.y, n.x, 0.0)
}

fn coordinate_matrix(axis: Axis, angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    match axis {
        Axis::Z => Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
        Axis::X => Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c),
        Axis::Y => Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c),
        Axis::Direction(_) => unreachable!("coordinate axes only"),
    }
}

fn coordinate_rate(axis: Axis, angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    match axis {
        Axis::Z => Matrix3::new(-s, -c, 0.0, c, -s, 0.0, 0.0, 0.0, 0.0),
        Axis::X => Matrix3::new(0.0, 0.0, 0.0, 0.0, -s, -c, 0.0, c, -s),
        Axis::Y => Matrix3::new(-s, 0.0, c, 0.0, 0.0, 0.0, -c, 0.0, -s),
        Axis::Direction(_) => unreachable!("coordinate axes only"),
    }
}

/// Fixed frame `R` with `R·e_z = n`, built as a rotation by the polar angle
/// about y followed by the azimuth about z.
fn axis_frame(axis: &Axis) -> Matrix3<f64> {
    let (polar, azimuth) = axis.fixed_angles();
    coordinate_matrix(Axis::Z, azimuth) * coordinate_matrix(Axis::Y, polar)
}

#[derive(Debug, Clone)]
enum LeafKernel {
    Coordinate(Axis),
    /// Arbitrary axis: `R · A_z · Rᵀ`.
    Framed(Matrix3<f64>),
}

#[derive(Debug, Clone)]
struct CompiledLeaf {
    kernel: LeafKernel,
    rate: f64,
}

impl CompiledLeaf {
    fn new(spec: &AsrSpec) -> Self {
        let kernel = match spec.axis {
            Axis::Direction(_) => LeafKernel::Framed(axis_frame(&spec.axis)),
            a => LeafKernel::Coordinate(a),
        };
        CompiledLeaf {
            kernel,
            rate: spec.signed_omega(),
        }
    }

    fn matrix(&self, t: f64) -> Matrix3<f64> {
        let angle = self.rate * t;
        match &self.kernel {
            LeafKernel::Coordinate(a) => coordinate_matrix(*a, angle),
            LeafKernel::Framed(r) => r * coordinate_matrix(Axis::Z, angle) * r.transpose(),
        }
    }

    fn derivative(&self, t: f64) -> Matrix3<f64> {
        let angle = self.rate * t;
        let rate = match &self.kernel {
            LeafKernel::Coordinate(a) => coordinate_rate(*a, angle),
            LeafKernel::Framed(r) => r * coordinate_rate(Axis::Z, angle) * r.transpose(),
        };
        rate * self.rate
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf(CompiledLeaf),
    Product(Vec<Node>),
    Sum(Vec<Node>),
}

impl Node {
    fn build(expr: &RotationExpr) -> Self {
        match expr {
            RotationExpr::Leaf(s) => Node::Leaf(CompiledLeaf::new(s)),
            RotationExpr::Product(c) => Node::Product(c.iter().map(Node::build).collect()),
            RotationExpr::Sum(c) => Node::Sum(c.iter().map(Node::build).collect()),
        }
    }

    fn matrix(&self, t: f64) -> Matrix3<f64> {
        match self {
            Node::Leaf(l) => l.matrix(t),
            Node::Product(c) => c.iter().fold(Matrix3::identity(), |acc, n| acc * n.matrix(t)),
            Node::Sum(c) => c.iter().fold(Matrix3::zeros(), |acc, n| acc + n.matrix(t)),
        }
    }

    fn matrix_and_derivative(&self, t: f64) -> (Matrix3<f64>, Matrix3<f64>) {
        match self {
            Node::Leaf(l) => (l.matrix(t), l.derivative(t)),
            Node::Product(c) => {
                let mut a = Matrix3::identity();
                let mut da = Matrix3::zeros();
                for n in c {
                    let (m, dm) = n.matrix_and_derivative(t);
                    da = da * m + a * dm;
                    a *= m;
                }
                (a, da)
            }
            Node::Sum(c) => c.iter().fold((Matrix3::zeros(), Matrix3::zeros()), |(a, da), n| {
                let (m, dm) = n.matrix_and_derivative(t);
                (a + m, da + dm)
            }),
        }
    }
}

/// Expression ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledRotation {
    root: Node,
}

impl CompiledRotation {
    pub fn matrix(&self, t: f64) -> Matrix3<f64> {
        self.root.matrix(t)
    }

    pub fn derivative(&self, t: f64) -> Matrix3<f64> {
        self.root.matrix_and_derivative(t).1
    }

    pub fn matrix_and_derivative(&self, t: f64) -> (Matrix3<f64>, Matrix3<f64>) {
        self.root.matrix_and_derivative(t)
    }
}

fn finite_time(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time must be finite, got {t}")))
    }
}

pub fn eval_asr(spec: &AsrSpec, t: f64) -> Result<Matrix3<f64>> {
    spec.validate()?;
    finite_time(t)?;
    Ok(CompiledLeaf::new(spec).matrix(t))
}

pub fn eval_expr(expr: &RotationExpr, t: f64) -> Result<Matrix3<f64>> {
    finite_time(t)?;
    Ok(expr.compile()?.matrix(t))
}

/// Analytic time derivative: Leibniz rule over products, termwise over sums.
pub fn eval_expr_derivative(expr: &RotationExpr, t: f64) -> Result<Matrix3<f64>> {
    finite_time(t)?;
    Ok(expr.compile()?.derivative(t))
}

/// Row-vector application `x·a`.
pub fn apply(x: &Vector3<f64>, a: &Matrix3<f64>) -> Vector3<f64> {
    a.tr_mul(x)
}

pub fn transform_point(expr: &RotationExpr, x: &Vector3<f64>, t: f64) -> Result<Vector3<f64>> {
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument("point must be finite".into()));
    }
    Ok(apply(x, &eval_expr(expr, t)?))
}

/// Largest absolute entry.
pub fn max_abs(m: &Matrix3<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn orthogonality_defect(a: &Matrix3<f64>) -> f64 {
    max_abs(&(a * a.transpose() - Matrix3::identity()))
}

/// Smallest positive leaf frequency, if any.
pub fn slowest_frequency(expr: &RotationExpr) -> Option<f64> {
    expr.frequencies()
        .into_iter()
        .filter(|w| *w > 0.0)
        .min_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    /// Measured quantity compared against `threshold`.
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub expr: String,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Minimum ∞-norm gap that counts as "order matters" for products.
pub const NONCOMMUTATIVITY_GAP: f64 = 1e-3;

/// Runs the composition property checks over seeded random times.
///
/// Sum-free expressions are checked for orthogonality, unit determinant and
/// (for products of non-parallel factors) order sensitivity. Sums are checked
/// for order invariance and for *failing* orthogonality and unit determinant
/// at a generic time.
pub fn property_report(expr: &RotationExpr, trials: usize, seed: u64, tol: f64) -> Result<PropertyReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let compiled = expr.compile()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = slowest_frequency(expr).map_or(1.0, |w| 2.0 * PI / w);
    let times: Vec<f64> = (0..trials).map(|_| rng.random::<f64>() * span).collect();
    let mut checks = Vec::new();

    if expr.is_sum_free() {
        let mut orth = 0.0_f64;
        let mut det = 0.0_f64;
        for &t in &times {
            let a = compiled.matrix(t);
            orth = orth.max(orthogonality_defect(&a));
            det = det.max((a.determinant() - 1.0).abs());
        }
        checks.push(PropertyCheck {
            name: "orthogonality".into(),
            passed: orth <= tol,
            value: orth,
            threshold: tol,
            detail: "max |A·Aᵀ - I| over sampled times".into(),
        });
        checks.push(PropertyCheck {
            name: "unit_determinant".into(),
            passed: det <= tol,
            value: det,
            threshold: tol,
            detail: "max |det A - 1| over sampled times".into(),
        });
        if let RotationExpr::Product(children) = expr {
            checks.extend(order_sensitivity(children, &times, tol)?);
        }
    } else {
        checks.extend(sum_checks(expr, &compiled, &times, tol)?);
    }

    Ok(PropertyReport {
        expr: expr.to_string(),
        trials,
        seed,
        checks,
    })
}

fn leaf_axis(expr: &RotationExpr) -> Option<Axis> {
    match expr {
        RotationExpr::Leaf(s) => Some(s.axis),
        _ => None,
    }
}

fn order_sensitivity(children: &[RotationExpr], times: &[f64], tol: f64) -> Result<Vec<PropertyCheck>> {
    let mut checks = Vec::new();
    for i in 0..children.len().saturating_sub(1) {
        let mut swapped = children.to_vec();
        swapped.swap(i, i + 1);
        let original = RotationExpr::Product(children.to_vec()).compile()?;
        let permuted = RotationExpr::Product(swapped).compile()?;
        // probe a few canonical phases too, the random times may all be near 0
        let gap = times
            .iter()
            .copied()
            .chain([0.5, 1.0, 2.0])
            .map(|t| max_abs(&(original.matrix(t) - permuted.matrix(t))))
            .fold(0.0_f64, f64::max);
        let parallel = matches!(
            (leaf_axis(&children[i]), leaf_axis(&children[i + 1])),
            (Some(a), Some(b)) if a.is_parallel(&b)
        );
        let trivial = children[i].frequencies().iter().all(|w| *w == 0.0)
            || children[i + 1].frequencies().iter().all(|w| *w == 0.0);
        let (passed, threshold, detail) = if parallel || trivial {
            (
                gap <= tol,
                tol,
                format!("factors {i},{} commute (parallel or static)", i + 1),
            )
        } else {
            (
                gap >= NONCOMMUTATIVITY_GAP,
                NONCOMMUTATIVITY_GAP,
                format!("swapping factors {i},{} changes the product", i + 1),
            )
        };
        checks.push(PropertyCheck {
            name: format!("product_order_{i}_{}", i + 1),
            passed,
            value: gap,
            threshold,
            detail,
        });
    }
    Ok(checks)
}

fn sum_checks(expr: &RotationExpr, compiled: &CompiledRotation, times: &[f64], tol: f64) -> Result<Vec<PropertyCheck>> {
    let mut checks = Vec::new();
    if let RotationExpr::Sum(terms) = expr {
        let mut reversed = terms.clone();
        reversed.reverse();
        let permuted = RotationExpr::Sum(reversed).compile()?;
        let identical = times.iter().all(|&t| compiled.matrix(t) == permuted.matrix(t));
        checks.push(PropertyCheck {
            name: "sum_order_invariance".into(),
            passed: identical,
            value: if identical { 0.0 } else { 1.0 },
            threshold: 0.0,
            detail: "reversed term order evaluates bit-identically".into(),
        });
    }
    let generic_t = slowest_frequency(expr).map_or(1.0, |w| 1.0 / w);
    let a = compiled.matrix(generic_t);
    let det_gap = (a.determinant() - 1.0).abs();
    let orth = orthogonality_defect(&a);
    let static_sum = expr.frequencies().iter().all(|w| *w == 0.0);
    checks.push(PropertyCheck {
        name: "sum_not_normalized".into(),
        passed: det_gap > tol,
        value: a.determinant(),
        threshold: tol,
        detail: format!("det A at t = {generic_t} differs from 1 by {det_gap:e}"),
    });
    checks.push(PropertyCheck {
        name: "sum_not_orthogonal".into(),
        passed: orth > tol || static_sum,
        value: orth,
        threshold: tol,
        detail: "inverse differs from transpose at a generic time".into(),
    });
    Ok(checks)
}

/// Uniformly distributed unit axis.
pub fn random_axis<R: Rng>(rng: &mut R) -> Axis {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(-PI..PI);
    let s = (1.0 - z * z).max(0.0).sqrt();
    let v = Vector3::new(s * phi.cos(), s * phi.sin(), z).normalize();
    Axis::Direction([v.x, v.y, v.z])
}

pub fn random_leaf<R: Rng>(rng: &mut R, omega_range: (f64, f64)) -> AsrSpec {
    let sense = if rng.random::<bool>() {
        Sense::Positive
    } else {
        Sense::Negative
    };
    AsrSpec {
        axis: random_axis(rng),
        omega: rng.random_range(omega_range.0..=omega_range.1),
        sense,
    }
}

/// Product of `1..=max_leaves` random-axis leaves.
pub fn random_product<R: Rng>(rng: &mut R, max_leaves: usize, omega_range: (f64, f64)) -> RotationExpr {
    let n = rng.random_range(1..=max_leaves.max(1));
    RotationExpr::Product(
        (0..n)
            .map(|_| RotationExpr::Leaf(random_leaf(rng, omega_range)))
            .collect(),
    )
}
