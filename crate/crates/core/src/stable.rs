//! Surfaces where the averaged `dt²` coefficient vanishes.
//!
//! For a single z rotation this is the cylinder `ρ = c/ω`; for the three-leaf
//! product `z(ω₁)·x(ω₂)·y(ω₃)` it is the axially symmetric surface
//!
//! ```text
//! r(θ)⁻² = (ω₁/c)² sin²θ + (ω₂/c)² (1 - ½ sin²θ) + ½ (ω₃/c)² (1 + ½ sin²θ)
//! ```

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{time_average_metric, AveragingControl, MetricCoefficients};
use crate::rotation::RotationExpr;

pub fn asr_radius(omega: f64, c: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::NoSurface(format!("frequency must be positive, got {omega}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("light speed must be positive, got {c}")));
    }
    Ok(c / omega)
}

pub fn msr_radius(theta: f64, w1: f64, w2: f64, w3: f64, c: f64) -> Result<f64> {
    if [w1, w2, w3].iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidArgument(
            "frequencies must be finite and non-negative".into(),
        ));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("light speed must be positive, got {c}")));
    }
    if w1 == 0.0 && w2 == 0.0 && w3 == 0.0 {
        return Err(Error::NoSurface("all frequencies are zero".into()));
    }
    let s2 = theta.sin().powi(2);
    let (a, b, d) = (w1 / c, w2 / c, w3 / c);
    let bracket = a * a * s2 + b * b * (1.0 - 0.5 * s2) + 0.5 * d * d * (1.0 + 0.5 * s2);
    if bracket <= 0.0 {
        // only ω₁ ≠ 0 on the rotation axis: the cylinder has no finite radius there
        return Err(Error::NoSurface(format!("no finite radius at theta = {theta}")));
    }
    Ok(bracket.powf(-0.5))
}

/// The averaged `dt²` coefficient of a rotation, as a function of position.
#[derive(Debug, Clone)]
pub struct GttSource {
    pub expr: RotationExpr,
    pub c: f64,
    pub control: AveragingControl,
}

impl GttSource {
    pub fn new(expr: RotationExpr, c: f64) -> Self {
        GttSource {
            expr,
            c,
            control: AveragingControl::default(),
        }
    }

    pub fn gtt(&self, x: &Vector3<f64>) -> Result<f64> {
        Ok(time_average_metric(&self.expr, x, self.c, &self.control)?.dt2_coefficient())
    }
}

/// Bracketing steps of the radial scan before bisection.
pub const SCAN_STEPS: usize = 200;

/// First root of the averaged `dt²` coefficient along a ray from the origin.
///
/// A fixed 200-step scan brackets the first sign change; bisection then
/// narrows it to `1e-12·r_max`.
pub fn locate_gtt_zero(source: &GttSource, direction: &Vector3<f64>, r_max: f64) -> Result<f64> {
    let norm = direction.norm();
    if !(norm.is_finite() && (norm - 1.0).abs() <= 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "direction must be a unit vector, got norm {norm}"
        )));
    }
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("r_max must be positive, got {r_max}")));
    }
    let at = |r: f64| source.gtt(&(direction * r));
    let g0 = at(0.0)?;
    if g0 <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "dt^2 coefficient must be positive at the rotation point, got {g0}"
        )));
    }
    let mut profile = vec![(0.0, g0)];
    let step = r_max / SCAN_STEPS as f64;
    let mut lo = 0.0;
    let mut hi = None;
    for i in 1..=SCAN_STEPS {
        let r = step * i as f64;
        let g = at(r)?;
        profile.push((r, g));
        if g == 0.0 {
            return Ok(r);
        }
        if g < 0.0 {
            hi = Some(r);
            break;
        }
        lo = r;
    }
    let Some(mut hi) = hi else {
        return Err(Error::RootNotFound { r_max, profile });
    };
    let tol = 1e-12 * r_max;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = at(mid)?;
        if g == 0.0 {
            return Ok(mid);
        }
        if g > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Unit vector at polar angle θ and azimuth φ.
pub fn direction(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SurfaceKind {
    /// Infinite cylinder about z, truncated at `|z| ≤ half_length`.
    Cylinder { radius: f64, half_length: f64 },
    /// Axially symmetric closed surface from the closed-form radius.
    Ellipsoid,
    /// Radii found by root-finding on a (θ, φ) grid, poles included:
    /// `radii[i][j]` at `θ_i = iπ/(n_theta-1)`, `φ_j = 2πj/n_phi`.
    Numeric { radii: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StableSurface {
    pub kind: SurfaceKind,
    /// ω₁, ω₂, ω₃ of the source rotation (unused entries zero).
    pub frequencies: [f64; 3],
    pub c: f64,
}

/// Default cylinder truncation in units of its radius.
pub const CYLINDER_HALF_LENGTH: f64 = 3.0;

impl StableSurface {
    pub fn cylinder(omega: f64, c: f64) -> Result<Self> {
        let radius = asr_radius(omega, c)?;
        Ok(StableSurface {
            kind: SurfaceKind::Cylinder {
                radius,
                half_length: CYLINDER_HALF_LENGTH * radius,
            },
            frequencies: [omega, 0.0, 0.0],
            c,
        })
    }

    pub fn ellipsoid(w1: f64, w2: f64, w3: f64, c: f64) -> Result<Self> {
        // both poles need a finite radius for a closed surface
        msr_radius(0.0, w1, w2, w3, c)?;
        msr_radius(PI / 2.0, w1, w2, w3, c)?;
        Ok(StableSurface {
            kind: SurfaceKind::Ellipsoid,
            frequencies: [w1, w2, w3],
            c,
        })
    }

    /// Samples the zero set by root-finding along `n_theta × n_phi` rays.
    pub fn numeric(
        source: &GttSource,
        frequencies: [f64; 3],
        n_theta: usize,
        n_phi: usize,
        r_max: f64,
    ) -> Result<Self> {
        if n_theta < 3 || n_phi < 3 {
            return Err(Error::Mesh("numeric surface needs at least 3×3 samples".into()));
        }
        let mut radii = Vec::with_capacity(n_theta);
        for i in 0..n_theta {
            let theta = PI * i as f64 / (n_theta - 1) as f64;
            let phis = if i == 0 || i == n_theta - 1 { 1 } else { n_phi };
            let mut ring = Vec::with_capacity(n_phi);
            for j in 0..phis {
                let phi = 2.0 * PI * j as f64 / n_phi as f64;
                ring.push(locate_gtt_zero(source, &direction(theta, phi), r_max)?);
            }
            if phis == 1 {
                ring.resize(n_phi, ring[0]);
            }
            radii.push(ring);
        }
        Ok(StableSurface {
            kind: SurfaceKind::Numeric { radii },
            frequencies,
            c: source.c,
        })
    }

    /// Radius along (θ, φ) for the closed kinds.
    pub fn radius(&self, theta: f64, _phi: f64) -> Result<f64> {
        match &self.kind {
            SurfaceKind::Cylinder { radius, .. } => Ok(*radius / theta.sin()),
            SurfaceKind::Ellipsoid => {
                let [a, b, d] = self.frequencies;
                msr_radius(theta, a, b, d, self.c)
            }
            SurfaceKind::Numeric { .. } => Err(Error::Mesh("numeric surfaces are sampled, not evaluated".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices, counter-clockwise seen from outside.
    pub triangles: Vec<[usize; 3]>,
}

/// Minimum sample count in each angular parameter.
pub const MIN_RESOLUTION: usize = 8;

/// Triangulates a stable surface.
///
/// `resolution` is `(n_phi, n_z)` for cylinders and `(n_theta, n_phi)`
/// otherwise; closed surfaces get `n_theta - 2` rings plus two pole vertices.
pub fn mesh_surface(surface: &StableSurface, resolution: (usize, usize)) -> Result<SurfaceMesh> {
    let (na, nb) = resolution;
    if na < MIN_RESOLUTION || nb < MIN_RESOLUTION {
        return Err(Error::Mesh(format!(
            "resolution must be at least {MIN_RESOLUTION} in each parameter, got {na}×{nb}"
        )));
    }
    match &surface.kind {
        SurfaceKind::Cylinder { radius, half_length } => {
            if !(radius.is_finite() && *radius > 0.0 && half_length.is_finite() && *half_length > 0.0) {
                return Err(Error::Mesh("degenerate cylinder".into()));
            }
            Ok(cylinder_mesh(*radius, *half_length, na, nb))
        }
        SurfaceKind::Ellipsoid => {
            let r = |theta: f64, _phi: f64| surface.radius(theta, 0.0);
            closed_mesh(na, nb, r)
        }
        SurfaceKind::Numeric { radii } => {
            let rows = radii.len();
            let cols = radii.first().map_or(0, Vec::len);
            if rows != na || cols != nb {
                return Err(Error::Mesh(format!(
                    "numeric samples are {rows}×{cols}, requested {na}×{nb}"
                )));
            }
            closed_mesh(na, nb, |theta, phi| {
                let i = (theta / PI * (rows - 1) as f64).round() as usize;
                let j = (phi / (2.0 * PI) * cols as f64).round() as usize % cols;
                Ok(radii[i][j])
            })
        }
    }
}

fn cylinder_mesh(radius: f64, half_length: f64, n_phi: usize, n_z: usize) -> SurfaceMesh {
    let mut mesh = SurfaceMesh::default();
    for k in 0..n_z {
        let z = -half_length + 2.0 * half_length * k as f64 / (n_z - 1) as f64;
        for j in 0..n_phi {
            let phi = 2.0 * PI * j as f64 / n_phi as f64;
            mesh.vertices.push([radius * phi.cos(), radius * phi.sin(), z]);
        }
    }
    let idx = |j: usize, k: usize| k * n_phi + j % n_phi;
    for k in 0..n_z - 1 {
        for j in 0..n_phi {
            mesh.triangles.push([idx(j, k), idx(j + 1, k), idx(j + 1, k + 1)]);
            mesh.triangles.push([idx(j, k), idx(j + 1, k + 1), idx(j, k + 1)]);
        }
    }
    mesh
}

fn closed_mesh<F>(n_theta: usize, n_phi: usize, radius: F) -> Result<SurfaceMesh>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let mut mesh = SurfaceMesh::default();
    let point = |theta: f64, phi: f64| -> Result<[f64; 3]> {
        let r = radius(theta, phi)?;
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Mesh(format!("non-positive radius {r} at theta = {theta}")));
        }
        let d = direction(theta, phi);
        Ok([r * d.x, r * d.y, r * d.z])
    };
    mesh.vertices.push(point(0.0, 0.0)?);
    let rings = n_theta - 2;
    for i in 1..=rings {
        let theta = PI * i as f64 / (n_theta - 1) as f64;
        for j in 0..n_phi {
            mesh.vertices.push(point(theta, 2.0 * PI * j as f64 / n_phi as f64)?);
        }
    }
    mesh.vertices.push(point(PI, 0.0)?);
    let south = mesh.vertices.len() - 1;
    let idx = |i: usize, j: usize| 1 + (i - 1) * n_phi + j % n_phi;
    for j in 0..n_phi {
        mesh.triangles.push([0, idx(1, j), idx(1, j + 1)]);
    }
    for i in 1..rings {
        for j in 0..n_phi {
            mesh.triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            mesh.triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    for j in 0..n_phi {
        mesh.triangles.push([idx(rings, j), south, idx(rings, j + 1)]);
    }
    Ok(mesh)
}

impl SurfaceMesh {
    /// ASCII OBJ with `v` and `f` records (1-based indices).
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
        }
        for t in &self.triangles {
            let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        out
    }

    /// Reads `v`/`f` records; other lines are ignored.
    pub fn from_obj(text: &str) -> Result<Self> {
        let mut mesh = SurfaceMesh::default();
        for (n, line) in text.lines().enumerate() {
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("v") => {
                    let mut v = [0.0; 3];
                    for slot in &mut v {
                        *slot = parts
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| Error::Mesh(format!("bad vertex on line {}", n + 1)))?;
                    }
                    mesh.vertices.push(v);
                }
                Some("f") => {
                    let mut t = [0usize; 3];
                    for slot in &mut t {
                        // accept `i`, `i/j` and `i//k`
                        let i: usize = parts
                            .next()
                            .and_then(|s| s.split('/').next())
                            .and_then(|s| s.parse().ok())
                            .filter(|i| *i >= 1)
                            .ok_or_else(|| Error::Mesh(format!("bad face on line {}", n + 1)))?;
                        *slot = i - 1;
                    }
                    mesh.triangles.push(t);
                }
                _ => {}
            }
        }
        if let Some(bad) = mesh.triangles.iter().flatten().find(|i| **i >= mesh.vertices.len()) {
            return Err(Error::Mesh(format!("face index {} out of range", bad + 1)));
        }
        Ok(mesh)
    }

    /// Every directed edge appears once and its reverse once.
    pub fn is_closed_and_oriented(&self) -> bool {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                *directed.entry((t[k], t[(k + 1) % 3])).or_default() += 1;
            }
        }
        directed
            .iter()
            .all(|(&(a, b), &n)| n == 1 && directed.get(&(b, a)) == Some(&1))
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = std::collections::HashSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        self.vertices.len() as i64 - edges.len() as i64 + self.triangles.len() as i64
    }

    /// Signed enclosed volume; positive for outward winding.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let a = Vector3::from(self.vertices[t[0]]);
                let b = Vector3::from(self.vertices[t[1]]);
                let c = Vector3::from(self.vertices[t[2]]);
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum()
    }
}

/// `(θ, φ, r)` samples on the mesh grid; cylinders omit the poles, where
/// their radius is unbounded.
pub fn surface_samples(surface: &StableSurface, resolution: (usize, usize)) -> Result<Vec<(f64, f64, f64)>> {
    let (na, nb) = resolution;
    if na < MIN_RESOLUTION || nb < MIN_RESOLUTION {
        return Err(Error::Mesh(format!("resolution must be at least {MIN_RESOLUTION}")));
    }
    let mut out = Vec::with_capacity(na * nb);
    let cylinder = matches!(surface.kind, SurfaceKind::Cylinder { .. });
    for i in 0..na {
        if cylinder && (i == 0 || i == na - 1) {
            continue;
        }
        let theta = PI * i as f64 / (na - 1) as f64;
        for j in 0..nb {
            let phi = 2.0 * PI * j as f64 / nb as f64;
            let r = match &surface.kind {
                SurfaceKind::Numeric { radii } => radii
                    .get(i)
                    .and_then(|row| row.get(j))
                    .copied()
                    .ok_or_else(|| Error::Mesh("sample grid mismatch".into()))?,
                _ => surface.radius(theta, phi)?,
            };
            out.push((theta, phi, r));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotation::AsrSpec;

    #[test]
    fn asr_radius_examples() {
        assert_eq!(asr_radius(2.0, 1.0).unwrap(), 0.5);
        assert_eq!(asr_radius(3e8, 3e8).unwrap(), 1.0);
        assert!(matches!(asr_radius(0.0, 1.0), Err(Error::NoSurface(_))));
        assert!(matches!(asr_radius(-1.0, 1.0), Err(Error::NoSurface(_))));
    }

    #[test]
    fn msr_radius_examples() {
        let (w, c) = (1.7, 2.0);
        assert!((msr_radius(PI / 2.0, w, 0.0, 0.0, c).unwrap() - c / w).abs() < 1e-15);
        assert!((msr_radius(0.0, w, w, w, c).unwrap() - c / (w * 1.5f64.sqrt())).abs() < 1e-15);
        assert!((msr_radius(PI / 2.0, w, w, w, c).unwrap() - c / (1.5 * w)).abs() < 1e-15);
        assert!(matches!(msr_radius(0.3, 0.0, 0.0, 0.0, 1.0), Err(Error::NoSurface(_))));
        assert!(matches!(msr_radius(0.0, 1.0, 0.0, 0.0, 1.0), Err(Error::NoSurface(_))));
    }

    #[test]
    fn msr_radius_mirror_symmetry() {
        for theta in [0.1, 0.7, 1.2, 1.5] {
            let a = msr_radius(theta, 1.0, 2.0, 0.5, 1.0).unwrap();
            let b = msr_radius(PI - theta, 1.0, 2.0, 0.5, 1.0).unwrap();
            assert!((a - b).abs() <= 1e-15 * a);
        }
    }

    #[test]
    fn locate_on_single_axis_cylinder() {
        let w = 2.5;
        let src = GttSource::new(AsrSpec::z(w).into(), 1.0);
        for phi in [0.0, 1.1, 4.0] {
            let r = locate_gtt_zero(&src, &direction(PI / 2.0, phi), 2.0).unwrap();
            assert!((r - 0.4).abs() <= 1e-9 * 0.4);
        }
    }

    #[test]
    fn locate_along_axis_of_equal_frequency_product() {
        let w = 1.0;
        let e = RotationExpr::product([AsrSpec::z(w).into(), AsrSpec::x(w).into(), AsrSpec::y(w).into()]);
        let src = GttSource::new(e, 1.0);
        let r = locate_gtt_zero(&src, &Vector3::z(), 3.0).unwrap();
        let closed = msr_radius(0.0, w, w, w, 1.0).unwrap();
        assert!((r - closed).abs() <= 1e-9 * closed);
    }

    #[test]
    fn locate_reports_missing_root() {
        let src = GttSource::new(AsrSpec::z(1.0).into(), 1.0);
        match locate_gtt_zero(&src, &Vector3::z(), 5.0) {
            Err(Error::RootNotFound { profile, .. }) => assert_eq!(profile.len(), SCAN_STEPS + 1),
            other => panic!("{other:?}"),
        }
        // rotation point outside the positive region
        let src = GttSource::new(AsrSpec::z(1.0).into(), 1.0);
        assert!(locate_gtt_zero(&src, &Vector3::new(2.0, 0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn cylinder_mesh_shape() {
        let s = StableSurface::cylinder(2.0, 1.0).unwrap();
        let m = mesh_surface(&s, (32, 8)).unwrap();
        assert_eq!(m.vertices.len(), 32 * 8);
        assert_eq!(m.triangles.len(), 2 * 32 * 7);
        for v in &m.vertices {
            let rho = (v[0] * v[0] + v[1] * v[1]).sqrt();
            assert!((rho - 0.5).abs() <= 1e-9 * 0.5);
            assert!(v[2].abs() <= 1.5 + 1e-15);
        }
        assert!(!m.is_closed_and_oriented());
        assert_eq!(m.euler_characteristic(), 0);
    }

    #[test]
    fn ellipsoid_mesh_is_closed_and_outward() {
        let w = 1.0;
        let s = StableSurface::ellipsoid(w, w, w, 1.0).unwrap();
        let m = mesh_surface(&s, (16, 24)).unwrap();
        assert!(m.is_closed_and_oriented());
        assert_eq!(m.euler_characteristic(), 2);
        assert!(m.signed_volume() > 0.0);
        let pole = 1.0 / (w * 1.5f64.sqrt());
        let north = Vector3::from(m.vertices[0]).norm();
        let south = Vector3::from(*m.vertices.last().unwrap()).norm();
        assert!((north - pole).abs() <= 1e-12);
        assert!((south - pole).abs() <= 1e-12);
        for v in &m.vertices {
            let p = Vector3::from(*v);
            let theta = (p.z / p.norm()).clamp(-1.0, 1.0).acos();
            let r = msr_radius(theta, w, w, w, 1.0).unwrap();
            assert!((p.norm() - r).abs() <= 1e-9 * r);
        }
    }

    #[test]
    fn low_resolution_and_degenerate_surfaces_rejected() {
        let s = StableSurface::cylinder(2.0, 1.0).unwrap();
        assert!(matches!(mesh_surface(&s, (7, 8)), Err(Error::Mesh(_))));
        let bad = StableSurface {
            kind: SurfaceKind::Cylinder {
                radius: f64::INFINITY,
                half_length: 1.0,
            },
            frequencies: [0.0; 3],
            c: 1.0,
        };
        assert!(matches!(mesh_surface(&bad, (8, 8)), Err(Error::Mesh(_))));
        assert!(StableSurface::ellipsoid(1.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn samples_follow_closed_forms() {
        let s = StableSurface::cylinder(2.0, 1.0).unwrap();
        let rows = surface_samples(&s, (9, 8)).unwrap();
        assert_eq!(rows.len(), 7 * 8);
        assert!(rows.iter().all(|(t, _, r)| (r * t.sin() - 0.5).abs() < 1e-15));
        let e = StableSurface::ellipsoid(1.0, 2.0, 0.5, 1.0).unwrap();
        let rows = surface_samples(&e, (9, 8)).unwrap();
        assert_eq!(rows.len(), 9 * 8);
        assert!(rows
            .iter()
            .all(|(t, _, r)| *r == msr_radius(*t, 1.0, 2.0, 0.5, 1.0).unwrap()));
    }

    #[test]
    fn obj_round_trip() {
        let s = StableSurface::ellipsoid(1.0, 2.0, 0.5, 1.0).unwrap();
        let m = mesh_surface(&s, (10, 12)).unwrap();
        let back = SurfaceMesh::from_obj(&m.to_obj()).unwrap();
        assert_eq!(back.vertices.len(), m.vertices.len());
        assert_eq!(back, m);
        assert!(SurfaceMesh::from_obj("v 0 0 0\nf 1 2 3\n").is_err());
    }
}
