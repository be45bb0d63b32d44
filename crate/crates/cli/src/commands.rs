use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rotframe::metric::{AveragingControl, COEFFICIENT_NAMES};
use rotframe::quantify::{uniform_a_grid, CANCELLATION_TOL};
use rotframe::rotation::random_product;
use rotframe::stable::{surface_samples, GttSource, StableSurface};
use rotframe::wave::{
    residual_field, Breathing, Constant, ExpDecay, Gaussian, PlanePhase, ResidualKind, SphericalWave, Stencil,
};
use rotframe::{
    boundary_condition_check, build_boosted_wave, external_cancellation_scan, interval_general, klein_gordon_residual,
    mesh_surface, metric_determinant, parse_expr, property_report, quantified_sizes, schrodinger_residual,
    time_average_metric, GridSpec, MetricCoefficients, ModeSpec, Parity, Profile, Signs, SpatialProfile, Vector3,
};
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::output::{num, to_canonical_json, to_csv};
use crate::{CliError, Outcome, RunConfig};

/// Fixed part of the `props` suite.
pub const PROPS_SUITE: [&str; 8] = [
    "z(1)",
    "x(2.5)*y(0.7)",
    "z(1)*x(1)*y(1)",
    "z(1)*z(2)",
    "u(0.6,0,0.8)(1.5)*z(-2)",
    "z(1)*x(2)*y(3)*u(0,0.6,0.8)(0.4)",
    "z(1)+x(2)",
    "z(1)*x(2)+y(0.5)",
];

/// Seeded random products appended to the suite.
pub const PROPS_RANDOM: usize = 8;

pub const DEFAULT_PROPS_TOL: f64 = 1e-12;

pub fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.format == Format::Obj && !matches!(cmd, Command::Surface(_)) {
        return Err(CliError::Usage("--format obj is only available for `surface`".into()));
    }
    match cmd {
        Command::Props(a) => props(a, cfg),
        Command::Metric(a) => metric(a, cfg),
        Command::Surface(a) => surface(a, cfg),
        Command::Residual(a) => residual(a, cfg),
        Command::Quantify(a) => quantify(a, cfg),
        Command::Twosource(a) => twosource(a, cfg),
    }
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("bad {what} component '{s}'")))
        })
        .collect()
}

fn props(a: &PropsArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tol = cfg.tol.unwrap_or(DEFAULT_PROPS_TOL);
    let mut exprs = Vec::new();
    match &a.expr {
        Some(text) => exprs.push(parse_expr(text)?),
        None => {
            for text in PROPS_SUITE {
                exprs.push(parse_expr(text)?);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            for _ in 0..PROPS_RANDOM {
                exprs.push(random_product(&mut rng, 4, (0.1, 10.0)));
            }
        }
    }
    let mut reports = Vec::with_capacity(exprs.len());
    for (i, e) in exprs.iter().enumerate() {
        reports.push(property_report(e, a.trials, cfg.seed.wrapping_add(i as u64), tol)?);
    }
    let passed = reports.iter().all(|r| r.passed());
    let bytes = match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .flat_map(|r| {
                    r.checks.iter().map(move |c| {
                        vec![
                            r.expr.clone(),
                            c.name.clone(),
                            c.passed.to_string(),
                            num(c.value),
                            num(c.threshold),
                        ]
                    })
                })
                .collect();
            to_csv(&["expr", "check", "passed", "value", "threshold"], &rows)?
        }
        _ => to_canonical_json(&json!({
            "passed": passed,
            "reports": reports,
            "seed": cfg.seed,
            "tol": tol,
            "trials": a.trials,
        }))?,
    };
    Ok(Outcome { bytes, passed })
}

fn metric(a: &MetricArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let expr = parse_expr(&a.expr)?;
    let p = parse_list(&a.point, "point")?;
    if p.len() != 3 {
        return Err(CliError::Usage(format!("--point needs 3 components, got {}", p.len())));
    }
    let x = Vector3::new(p[0], p[1], p[2]);
    let mut doc = Map::new();
    let (components, det) = if a.average {
        let mut control = AveragingControl::default();
        if let Some(t) = cfg.tol {
            control.period_tol = t;
            control.window_tol = t;
        }
        let m = time_average_metric(&expr, &x, cfg.c, &control)?;
        doc.insert("mode".into(), json!("average"));
        doc.insert("window".into(), serde_json::to_value(m.window)?);
        doc.insert("error_bound".into(), json!(m.error_bound));
        (m.tensor_components(), metric_determinant(&m))
    } else {
        let m = interval_general(&expr, &x, a.time, cfg.c)?;
        doc.insert("mode".into(), json!("instantaneous"));
        doc.insert("time".into(), json!(a.time));
        (m.tensor_components(), metric_determinant(&m))
    };
    let bytes = match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = components.iter().map(|(n, v)| vec![n.to_string(), num(*v)]).collect();
            to_csv(&["coefficient", "value"], &rows)?
        }
        _ => {
            let coeffs: Map<String, Value> = components.iter().map(|(n, v)| (n.to_string(), json!(v))).collect();
            doc.insert("expr".into(), json!(expr.to_string()));
            doc.insert("point".into(), json!([x.x, x.y, x.z]));
            doc.insert("c".into(), json!(cfg.c));
            doc.insert("coefficients".into(), Value::Object(coeffs));
            doc.insert("determinant".into(), json!(det));
            to_canonical_json(&doc)?
        }
    };
    debug_assert_eq!(components.len(), COEFFICIENT_NAMES.len());
    Ok(Outcome { bytes, passed: true })
}

fn surface(a: &SurfaceArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let res = parse_list(&a.resolution, "resolution")?;
    if res.len() != 2 || res.iter().any(|v| *v < 0.0 || v.fract() != 0.0) {
        return Err(CliError::Usage(format!(
            "--resolution needs two integers, got '{}'",
            a.resolution
        )));
    }
    let resolution = (res[0] as usize, res[1] as usize);
    let omegas = parse_list(&a.omega, "omega")?;
    let surface = match a.kind {
        SurfaceKindArg::Cylinder => StableSurface::cylinder(omegas[0], cfg.c)?,
        SurfaceKindArg::Ellipsoid => match omegas.as_slice() {
            [w] => StableSurface::ellipsoid(*w, *w, *w, cfg.c)?,
            [w1, w2, w3] => StableSurface::ellipsoid(*w1, *w2, *w3, cfg.c)?,
            _ => {
                return Err(CliError::Usage(
                    "--omega needs 1 or 3 components for an ellipsoid".into(),
                ))
            }
        },
        SurfaceKindArg::Numeric => {
            let text = a
                .expr
                .as_deref()
                .ok_or_else(|| CliError::Usage("numeric surfaces need --expr".into()))?;
            let expr = parse_expr(text)?;
            let mut freqs = [0.0; 3];
            for (slot, w) in freqs.iter_mut().zip(expr.frequencies()) {
                *slot = w;
            }
            let mut source = GttSource::new(expr, cfg.c);
            if let Some(t) = cfg.tol {
                source.control.period_tol = t;
                source.control.window_tol = t;
            }
            StableSurface::numeric(&source, freqs, resolution.0, resolution.1, a.r_max)?
        }
    };
    let mesh = mesh_surface(&surface, resolution)?;
    let closed = mesh.is_closed_and_oriented();
    let passed = closed || a.kind == SurfaceKindArg::Cylinder;
    let bytes = match cfg.format {
        Format::Obj => mesh.to_obj().into_bytes(),
        Format::Csv => {
            let rows: Vec<Vec<String>> = surface_samples(&surface, resolution)?
                .into_iter()
                .map(|(t, p, r)| vec![num(t), num(p), num(r)])
                .collect();
            to_csv(&["theta", "phi", "r"], &rows)?
        }
        Format::Json => to_canonical_json(&json!({
            "surface": surface,
            "resolution": [resolution.0, resolution.1],
            "closed": closed,
            "euler_characteristic": mesh.euler_characteristic(),
            "vertices": mesh.vertices,
            "triangles": mesh.triangles,
        }))?,
    };
    Ok(Outcome { bytes, passed })
}

fn profile(a: &ResidualArgs) -> Arc<dyn SpatialProfile> {
    match a.profile {
        ProfileArg::Constant => Arc::new(Constant(1.0)),
        ProfileArg::Gaussian => Arc::new(Gaussian { sigma: a.sigma }),
        ProfileArg::Plane => Arc::new(PlanePhase {
            k: Vector3::new(a.k, 0.0, 0.0),
        }),
        ProfileArg::Exp => Arc::new(ExpDecay),
        ProfileArg::Spherical => Arc::new(SphericalWave { k: a.k }),
        ProfileArg::Breathing => Arc::new(Breathing {
            k: a.k,
            nu: 3.0,
            kappa: 1.5,
        }),
    }
}

fn residual(a: &ResidualArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let stencil = match a.stencil {
        3 => Stencil::Three,
        5 => Stencil::Five,
        s => return Err(CliError::Usage(format!("--stencil must be 3 or 5, got {s}"))),
    };
    let grid = GridSpec {
        center: [0.0; 3],
        half_extent: a.extent,
        samples: a.samples,
        h: a.h,
        tau: a.tau,
        stencil,
    };
    let q = profile(a);
    let wave = build_boosted_wave(q.clone(), a.omega, a.beta)?.with_sign(a.sign);
    let kind = match a.equation {
        Equation::Schrodinger => ResidualKind::Schrodinger,
        Equation::Kleingordon => ResidualKind::KleinGordon,
    };
    let mut doc = Map::new();
    let (report, extra_ok) = match kind {
        ResidualKind::Schrodinger => (schrodinger_residual(&wave, &grid)?, true),
        ResidualKind::KleinGordon => {
            let kg = klein_gordon_residual(&wave, &grid)?;
            doc.insert("scalar_mean".into(), json!(kg.scalar_mean));
            doc.insert("scalar_std".into(), json!(kg.scalar_std));
            doc.insert("scalar_error_estimate".into(), json!(kg.error_estimate));
            doc.insert("scalar_uniform".into(), json!(kg.scalar_uniform));
            (kg.residual, kg.scalar_uniform)
        }
    };
    let within_tol = cfg.tol.is_none_or(|t| report.max <= t);
    let passed = extra_ok && within_tol && !report.resolution_warning;
    let bytes = match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = residual_field(&wave, &grid, kind)?
                .iter()
                .map(|r| r.iter().map(|v| num(*v)).collect())
                .collect();
            to_csv(&["x", "y", "z", "re", "im"], &rows)?
        }
        _ => {
            doc.insert(
                "equation".into(),
                json!(match kind {
                    ResidualKind::Schrodinger => "schrodinger",
                    ResidualKind::KleinGordon => "kleingordon",
                }),
            );
            doc.insert("profile".into(), json!(q.name()));
            doc.insert("omega".into(), json!(a.omega));
            doc.insert("beta".into(), json!(wave.boost.beta));
            doc.insert("gamma".into(), json!(wave.boost.gamma));
            doc.insert("max".into(), json!(report.max));
            doc.insert("rms".into(), json!(report.rms));
            doc.insert(
                "grid".into(),
                json!({
                    "h": grid.h,
                    "extent": grid.half_extent,
                    "samples": grid.samples,
                    "stencil": a.stencil,
                    "tau": grid.tau,
                }),
            );
            doc.insert("order_estimate".into(), json!(report.order_estimate));
            doc.insert("resolution_warning".into(), json!(report.resolution_warning));
            doc.insert("passed".into(), json!(passed));
            to_canonical_json(&doc)?
        }
    };
    Ok(Outcome { bytes, passed })
}

fn quantify(a: &QuantifyArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let parity = match a.parity {
        ParityArg::Even => Parity::Even,
        ParityArg::Odd => Parity::Odd,
    };
    let mode = ModeSpec::new(a.l, parity);
    let spectrum = quantified_sizes(mode, a.k, a.count)?;
    let checks: Vec<bool> = spectrum
        .sizes
        .iter()
        .map(|r| boundary_condition_check(mode, a.k, *r))
        .collect();
    let passed = checks.iter().all(|c| *c);
    let bytes = match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = spectrum
                .roots
                .iter()
                .zip(&spectrum.sizes)
                .enumerate()
                .map(|(i, (a, r))| vec![(i + 1).to_string(), num(*a), num(*r)])
                .collect();
            to_csv(&["index", "root", "size"], &rows)?
        }
        _ => to_canonical_json(&json!({
            "k": spectrum.k,
            "mode": {"l": a.l, "parity": match parity { Parity::Even => "even", Parity::Odd => "odd" }},
            "roots": spectrum.roots,
            "sizes": spectrum.sizes,
            "boundary_checks": checks,
        }))?,
    };
    Ok(Outcome { bytes, passed })
}

fn twosource(a: &TwoSourceArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    if a.points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    let (profile, pname) = match a.profile {
        WaveProfileArg::Sin => (Profile::Sin, "sin"),
        WaveProfileArg::Triangle => (Profile::Triangle, "triangle"),
        WaveProfileArg::Zero => (Profile::Zero, "zero"),
    };
    let (signs, sname) = match a.signs {
        SignsArg::Same => (Signs::Same, "same"),
        SignsArg::Opposite => (Signs::Opposite, "opposite"),
    };
    let tol = cfg.tol.unwrap_or(CANCELLATION_TOL);
    let scan = external_cancellation_scan(&profile, signs, &uniform_a_grid(a.points))?;
    let cancelling: Vec<f64> = scan
        .samples
        .iter()
        .filter(|(_, amp)| *amp <= tol)
        .map(|(a, _)| *a)
        .collect();
    let bytes = match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = scan
                .samples
                .iter()
                .map(|(a, amp)| vec![num(*a), num(*amp), (*amp <= tol).to_string()])
                .collect();
            to_csv(&["a", "amplitude", "cancels"], &rows)?
        }
        _ => to_canonical_json(&json!({
            "profile": pname,
            "signs": sname,
            "points": a.points,
            "tol": tol,
            "cancelling": cancelling,
            "samples": scan.samples,
        }))?,
    };
    Ok(Outcome { bytes, passed: true })
}
