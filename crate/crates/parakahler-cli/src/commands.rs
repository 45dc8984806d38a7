//! The six subcommands. Each builds one report document, writes it to
//! `--output` (atomically) or stdout, and returns whether it passed.

use std::path::Path;

use parakahler::frames::compatibility_residuals;
use parakahler::gaussmaps::{diagram_check, gauss_of_frame, harmonicity_certificate, GaussKind};
use parakahler::grid::{Grid2, Order};
use parakahler::integrator::{
    integrate_frame, loop_disagreement, mean_curvature_residual, reconstruct, synthesize_minlag,
    LiftField, PathMode, RoundTrip, SurfaceRow,
};
use parakahler::liealg::{decompose, table_basis};
use parakahler::surface2d::{
    build_mc_with, compat_residuals, lambda_flatness, normalize_det, to_immersion_data, Kind,
    NewtonOptions, SurfaceData, LAMBDA_SAMPLES,
};
use parakahler::{Mat3C, C64};
use serde::{Deserialize, Serialize};

use crate::format::{signature, to_json, write_atomic, GridSpec, SurfaceFile, SCHEMA};
use crate::{CliError, Command, RunConfig};

/// Tolerance of the commuting-diagram check of the Gauss maps.
const DIAGRAM_TOL: f64 = 1e-10;
/// `|Q|` below this fraction of `max |Q|` marks a node as near a zero of `Q`.
const Q_SMALL: f64 = 1e-3;

pub fn run(command: Command, cfg: &RunConfig) -> Result<bool, CliError> {
    for (name, t) in [
        ("--tol-flat", cfg.tol_flat),
        ("--tol-rt", cfg.tol_rt),
        ("--tol-cert", cfg.tol_cert),
    ] {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Input(format!(
                "{name} must be positive and finite, got {t}"
            )));
        }
    }
    match command {
        Command::Check => check(cfg),
        Command::SynthesizeMinlag => synthesize(cfg),
        Command::Integrate => integrate(cfg),
        Command::Verify => verify(cfg),
        Command::Gauss => gauss(cfg),
        Command::Eigen => eigen(cfg),
    }
}

fn numerical(e: parakahler::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

fn read_input(cfg: &RunConfig) -> Result<String, CliError> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Input("--input is required".into()))?;
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Surface data from `--input`. A document produced by another subcommand
/// is accepted too; its `data` member is used.
fn read_surface(cfg: &RunConfig) -> Result<SurfaceFile, CliError> {
    let text = read_input(cfg)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed input: {e}")))?;
    let inner = match value.get("data") {
        Some(d) if d.is_object() => d.to_string(),
        _ => text,
    };
    SurfaceFile::parse(&inner)
}

fn emit<T: Serialize>(cfg: &RunConfig, doc: &T) -> Result<(), CliError> {
    let bytes = to_json(doc)?;
    match &cfg.output {
        Some(p) => write_atomic(p, &bytes),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn order_for(g: &Grid2) -> Order {
    if g.nx.min(g.ny) >= 5 {
        Order::Fourth
    } else {
        Order::Second
    }
}

#[derive(Serialize)]
struct Entry {
    name: &'static str,
    value: f64,
    pass: bool,
}

fn entry(name: &'static str, value: f64, tol: f64) -> Entry {
    Entry {
        name,
        value,
        pass: value < tol,
    }
}

#[derive(Serialize)]
struct Header {
    schema: &'static str,
    command: &'static str,
    #[serde(rename = "H")]
    h: i8,
    kind: &'static str,
    grid: GridSpec,
}

fn header(command: &'static str, d: &SurfaceData, kind: Kind) -> Header {
    Header {
        schema: SCHEMA,
        command,
        h: d.sig.value(),
        kind: kind.name(),
        grid: d.grid.into(),
    }
}

#[derive(Serialize)]
struct CheckReport {
    #[serde(flatten)]
    header: Header,
    tolerance: f64,
    residuals: Vec<Entry>,
    frame_residuals: Vec<Entry>,
    failing: Vec<&'static str>,
    pass: bool,
}

fn check(cfg: &RunConfig) -> Result<bool, CliError> {
    let data = read_surface(cfg)?.to_data(cfg.h)?;
    let kind = cfg.kind.unwrap_or(Kind::General);
    let tol = cfg.tol_flat;
    let res = compat_residuals(&data, kind).map_err(numerical)?;
    let residuals: Vec<Entry> = res.entries.iter().map(|(n, v)| entry(n, *v, tol)).collect();
    let imm = to_immersion_data(&data.specialize(kind), Order::Second).map_err(numerical)?;
    let fr = compatibility_residuals(&imm).map_err(numerical)?;
    let frame_residuals = vec![
        entry("psi_curl", fr.r1, tol),
        entry("codazzi", fr.r2, tol),
        entry("gauss", fr.r3, tol),
    ];
    let failing: Vec<&'static str> = residuals
        .iter()
        .chain(&frame_residuals)
        .filter(|e| !e.pass)
        .map(|e| e.name)
        .collect();
    let pass = failing.is_empty();
    emit(
        cfg,
        &CheckReport {
            header: header("check", &data, kind),
            tolerance: tol,
            residuals,
            frame_residuals,
            failing,
            pass,
        },
    )?;
    Ok(pass)
}

#[derive(Serialize)]
struct RoundTripReport {
    err_u: f64,
    err_theta: f64,
    err_phi: f64,
    err_q: f64,
    err_rho: f64,
    max: f64,
}

impl From<&RoundTrip> for RoundTripReport {
    fn from(r: &RoundTrip) -> Self {
        RoundTripReport {
            err_u: r.err_u,
            err_theta: r.err_theta,
            err_phi: r.err_phi,
            err_q: r.err_q,
            err_rho: r.err_rho,
            max: r.max_error(),
        }
    }
}

#[derive(Serialize)]
struct Surface {
    x: Vec<Vec<[f64; 3]>>,
    chi: Vec<Vec<[f64; 3]>>,
}

fn surface_points(lift: &LiftField) -> Result<(Surface, Vec<SurfaceRow>), CliError> {
    let pts = lift.surface_rows().map_err(numerical)?;
    let nx = lift.grid.nx;
    let x = pts
        .chunks(nx)
        .map(|r| r.iter().map(|p| p.1).collect())
        .collect();
    let chi = pts
        .chunks(nx)
        .map(|r| r.iter().map(|p| p.2).collect())
        .collect();
    Ok((Surface { x, chi }, pts))
}

fn write_csv(path: &Path, grid: &Grid2, pts: &[SurfaceRow]) -> Result<(), CliError> {
    let err = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "i", "j", "y1", "y2", "x1", "x2", "x3", "chi1", "chi2", "chi3",
    ])
    .map_err(err)?;
    for (k, (y, x, chi)) in pts.iter().enumerate() {
        let (i, j) = grid.ij(k);
        let mut rec = vec![i.to_string(), j.to_string()];
        rec.extend(y.iter().chain(x).chain(chi).map(|v| format!("{v:.16e}")));
        w.write_record(&rec).map_err(err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    write_atomic(path, &bytes)
}

#[derive(Serialize)]
struct QZeros {
    min_abs: f64,
    min_at: [f64; 2],
    small_nodes: usize,
    /// `Q` vanishes at every node; `min_at` is then just the first node.
    identically_zero: bool,
}

fn q_zeros(d: &SurfaceData) -> QZeros {
    let g = &d.grid;
    let max = d.q.iter().map(|q| q.norm()).fold(0.0_f64, f64::max);
    let (k, min_abs) =
        d.q.iter()
            .map(|q| q.norm())
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |b, (k, v)| if v < b.1 { (k, v) } else { b },
            );
    let (i, j) = g.ij(k);
    let (y1, y2) = g.coords(i, j);
    let small_nodes = d.q.iter().filter(|q| q.norm() <= Q_SMALL * max).count();
    QZeros {
        min_abs,
        min_at: [y1, y2],
        small_nodes,
        identically_zero: max == 0.0,
    }
}

#[derive(Serialize)]
struct Newton {
    iterations: usize,
    residual: f64,
}

#[derive(Serialize)]
struct SynthesisDoc {
    #[serde(flatten)]
    header: Header,
    tolerance: f64,
    newton: Newton,
    round_trip: RoundTripReport,
    loop_disagreement: f64,
    q_zeros: QZeros,
    pass: bool,
    data: SurfaceFile,
    surface: Surface,
}

fn synthesize(cfg: &RunConfig) -> Result<bool, CliError> {
    let file = read_surface(cfg)?;
    let g = file.grid()?;
    let sig = signature(cfg.h.or(file.h))?;
    // `u` supplies the boundary values; its interior is ignored
    let input = SurfaceFile {
        h: Some(sig.value()),
        ..file
    }
    .to_data(None)?;
    let syn = synthesize_minlag(sig, &g, &input.q, &input.u, &NewtonOptions::default())
        .map_err(numerical)?;
    let rec = &syn.reconstruction;
    let (surface, pts) = surface_points(&rec.lift)?;
    let loop_d = loop_disagreement(&rec.mc, &Mat3C::IDENTITY).map_err(numerical)?;
    let rt = RoundTripReport::from(&rec.round_trip);
    let pass = rt.max < cfg.tol_rt;
    if let Some(p) = &cfg.csv {
        write_csv(p, &g, &pts)?;
    }
    emit(
        cfg,
        &SynthesisDoc {
            header: header("synthesize-minlag", &syn.data, Kind::MinLag),
            tolerance: cfg.tol_rt,
            newton: Newton {
                iterations: syn.newton.iterations,
                residual: syn.newton.residual,
            },
            round_trip: rt,
            loop_disagreement: loop_d,
            q_zeros: q_zeros(&syn.data),
            pass,
            data: SurfaceFile::from_data(&syn.data),
            surface,
        },
    )?;
    Ok(pass)
}

fn matrix_rows(ms: &[Mat3C], g: &Grid2, part: fn(C64) -> f64) -> Vec<Vec<[f64; 9]>> {
    ms.chunks(g.nx)
        .map(|r| {
            r.iter()
                .map(|m| core::array::from_fn(|k| part(m[(k / 3, k % 3)])))
                .collect()
        })
        .collect()
}

#[derive(Serialize)]
struct MatrixField {
    re: Vec<Vec<[f64; 9]>>,
    im: Vec<Vec<[f64; 9]>>,
}

fn matrix_field(ms: &[Mat3C], g: &Grid2) -> MatrixField {
    MatrixField {
        re: matrix_rows(ms, g, |z| z.re),
        im: matrix_rows(ms, g, |z| z.im),
    }
}

#[derive(Serialize)]
struct IntegrateDoc {
    #[serde(flatten)]
    header: Header,
    tolerance: f64,
    loop_disagreement: f64,
    flatness: f64,
    unimodularity: f64,
    reality: f64,
    pass: bool,
    frame: MatrixField,
}

fn integrate(cfg: &RunConfig) -> Result<bool, CliError> {
    let data = read_surface(cfg)?.to_data(cfg.h)?;
    let kind = cfg.kind.unwrap_or(Kind::General);
    let g = data.grid;
    let mc = build_mc_with(&data, kind, order_for(&g), false).map_err(numerical)?;
    let mut frame =
        integrate_frame(&mc, &Mat3C::IDENTITY, PathMode::RowMajor).map_err(numerical)?;
    frame.f = normalize_det(&frame.f).map_err(numerical)?.0;
    let loop_d = loop_disagreement(&mc, &Mat3C::IDENTITY).map_err(numerical)?;
    let flatness = parakahler::integrator::flatness_max(&mc).map_err(numerical)?;
    let pass = loop_d < cfg.tol_flat;
    emit(
        cfg,
        &IntegrateDoc {
            header: header("integrate", &data, kind),
            tolerance: cfg.tol_flat,
            loop_disagreement: loop_d,
            flatness,
            unimodularity: frame.unimodularity(),
            reality: frame.reality_residual(),
            pass,
            frame: matrix_field(&frame.f, &g),
        },
    )?;
    Ok(pass)
}

#[derive(Serialize)]
struct VerifyDoc {
    #[serde(flatten)]
    header: Header,
    tolerance: f64,
    round_trip: RoundTripReport,
    loop_disagreement: f64,
    mean_curvature: f64,
    pass: bool,
}

fn verify(cfg: &RunConfig) -> Result<bool, CliError> {
    let data = read_surface(cfg)?.to_data(cfg.h)?;
    let kind = cfg.kind.unwrap_or(Kind::General);
    let rec = reconstruct(&data, kind).map_err(numerical)?;
    let rt = RoundTripReport::from(&rec.round_trip);
    let pass = rt.max < cfg.tol_rt;
    let loop_d = loop_disagreement(&rec.mc, &Mat3C::IDENTITY).map_err(numerical)?;
    let mean_curvature = mean_curvature_residual(&rec.lift).map_err(numerical)?;
    if let Some(p) = &cfg.csv {
        write_csv(p, &data.grid, &surface_points(&rec.lift)?.1)?;
    }
    emit(
        cfg,
        &VerifyDoc {
            header: header("verify", &data, kind),
            tolerance: cfg.tol_rt,
            round_trip: rt,
            loop_disagreement: loop_d,
            mean_curvature,
            pass,
        },
    )?;
    Ok(pass)
}

#[derive(Serialize)]
struct CertReport {
    k: usize,
    map: &'static str,
    residual: f64,
    pass: bool,
    lambda_flatness: f64,
}

#[derive(Serialize)]
struct GaussMaps {
    #[serde(rename = "FL3")]
    fl3: MatrixField,
    #[serde(rename = "SLGr")]
    slgr: MatrixField,
    #[serde(rename = "Fl2")]
    fl2: MatrixField,
}

#[derive(Serialize)]
struct GaussDoc {
    #[serde(flatten)]
    header: Header,
    tolerance: f64,
    lambdas: Vec<[f64; 2]>,
    diagram: [f64; 2],
    certificates: Vec<CertReport>,
    pass: bool,
    maps: GaussMaps,
}

fn gauss(cfg: &RunConfig) -> Result<bool, CliError> {
    let data = read_surface(cfg)?.to_data(cfg.h)?;
    let kind = cfg.kind.unwrap_or(Kind::General);
    if let Some(k) = cfg.k {
        GaussKind::from_order(k).map_err(|e| CliError::Input(e.to_string()))?;
    }
    let rec = reconstruct(&data, kind).map_err(numerical)?;
    let lambdas: Vec<C64> = if cfg.lambda.is_empty() {
        LAMBDA_SAMPLES.to_vec()
    } else {
        cfg.lambda.clone()
    };
    let g = data.grid;
    let field = |gk: GaussKind| -> Result<MatrixField, CliError> {
        let pts = gauss_of_frame(&rec.frame, gk).map_err(numerical)?;
        Ok(matrix_field(
            &pts.iter().map(|p| p.m).collect::<Vec<_>>(),
            &g,
        ))
    };
    let maps = GaussMaps {
        fl3: field(GaussKind::Fl3)?,
        slgr: field(GaussKind::SlGr)?,
        fl2: field(GaussKind::Fl2)?,
    };
    let diagram = diagram_check(&rec.frame).map_err(numerical)?;
    let mut certificates = Vec::new();
    for k in [6, 3, 2] {
        let c = harmonicity_certificate(&rec.frame, &rec.mc, k, cfg.tol_cert).map_err(numerical)?;
        let lf = lambda_flatness(&rec.mc, &lambdas, k).map_err(numerical)?;
        certificates.push(CertReport {
            k,
            map: c.map.name(),
            residual: c.certificate.residual,
            pass: c.certificate.pass,
            lambda_flatness: lf,
        });
    }
    let mut pass = diagram.max() < DIAGRAM_TOL;
    if let Some(k) = cfg.k {
        pass &= certificates.iter().any(|c| c.k == k && c.pass);
    }
    emit(
        cfg,
        &GaussDoc {
            header: header("gauss", &data, kind),
            tolerance: cfg.tol_cert,
            lambdas: lambdas.iter().map(|l| [l.re, l.im]).collect(),
            diagram: [diagram.slgr, diagram.fl2],
            certificates,
            pass,
            maps,
        },
    )?;
    Ok(pass)
}

/// A single 3x3 complex matrix.
#[derive(Deserialize)]
struct MatrixFile {
    schema: Option<String>,
    #[serde(rename = "H")]
    h: Option<i8>,
    matrix_re: [[f64; 3]; 3],
    matrix_im: Option<[[f64; 3]; 3]>,
}

#[derive(Serialize)]
struct Part {
    slot: usize,
    mass: f64,
    re: [[f64; 3]; 3],
    im: [[f64; 3]; 3],
}

#[derive(Serialize)]
struct EigenDoc {
    schema: &'static str,
    command: &'static str,
    #[serde(rename = "H")]
    h: i8,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis_slot: Option<usize>,
    tolerance: f64,
    reconstruction_error: f64,
    parts: Vec<Part>,
    pass: bool,
}

fn split(m: &Mat3C) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    (
        core::array::from_fn(|i| core::array::from_fn(|j| m[(i, j)].re)),
        core::array::from_fn(|i| core::array::from_fn(|j| m[(i, j)].im)),
    )
}

fn eigen(cfg: &RunConfig) -> Result<bool, CliError> {
    let (sig, x, basis_slot) = match cfg.basis {
        Some(b) => {
            let sig = signature(cfg.h)?;
            let table = table_basis(sig);
            let (slot, x) = *table.get(b).ok_or_else(|| {
                CliError::Input(format!("--basis must be below {}, got {b}", table.len()))
            })?;
            (sig, x, Some(slot))
        }
        None => {
            let text = read_input(cfg)?;
            let f: MatrixFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("malformed input: {e}")))?;
            if f.schema.as_deref().is_some_and(|s| s != SCHEMA) {
                return Err(CliError::Input(format!(
                    "unsupported schema, expected `{SCHEMA}`"
                )));
            }
            let im = f.matrix_im.unwrap_or_default();
            let mut x = Mat3C::ZERO;
            for i in 0..3 {
                for j in 0..3 {
                    x[(i, j)] = C64::new(f.matrix_re[i][j], im[i][j]);
                }
            }
            if !x.is_finite() {
                return Err(CliError::Input("matrix entries must be finite".into()));
            }
            (signature(cfg.h.or(f.h))?, x, None)
        }
    };
    let d = decompose(&x, sig);
    let total = x.norm();
    let reconstruction_error = (d.sum() - x).max_abs();
    let parts = d
        .parts
        .iter()
        .enumerate()
        .map(|(slot, p)| {
            let (re, im) = split(p);
            Part {
                slot,
                mass: if total > 0.0 { p.norm() / total } else { 0.0 },
                re,
                im,
            }
        })
        .collect();
    let pass = reconstruction_error < cfg.tol_flat * total.max(1.0);
    emit(
        cfg,
        &EigenDoc {
            schema: SCHEMA,
            command: "eigen",
            h: sig.value(),
            basis_slot,
            tolerance: cfg.tol_flat,
            reconstruction_error,
            parts,
            pass,
        },
    )?;
    Ok(pass)
}
