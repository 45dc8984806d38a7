//! The `parakahler/1` JSON document format: surface data in, reports out.
//!
//! Fields are `ny` rows of `nx` values, row `j` holding `y2 = y0 + j hy`.
//! Floats are written with 17 significant digits so that reports are
//! byte-for-byte reproducible.

use std::io::{self, Write};
use std::path::Path;

use parakahler::grid::Grid2;
use parakahler::surface2d::SurfaceData;
use parakahler::{Signature, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA: &str = "parakahler/1";

pub type Field = Vec<Vec<f64>>;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
}

impl From<Grid2> for GridSpec {
    fn from(g: Grid2) -> Self {
        GridSpec {
            nx: g.nx,
            ny: g.ny,
            x0: g.x0,
            y0: g.y0,
            hx: g.hx,
            hy: g.hy,
        }
    }
}

/// Surface fields on a grid. Omitted fields default to `theta = pi/2`,
/// `phi = Q = rho = 0`; `u` is required.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SurfaceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<i8>,
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Field>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Field>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_re: Option<Field>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_im: Option<Field>,
    #[serde(rename = "Q_re", default, skip_serializing_if = "Option::is_none")]
    pub q_re: Option<Field>,
    #[serde(rename = "Q_im", default, skip_serializing_if = "Option::is_none")]
    pub q_im: Option<Field>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_re: Option<Field>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_im: Option<Field>,
}

fn flatten(name: &str, f: &Option<Field>, g: &Grid2, default: f64) -> Result<Vec<f64>, CliError> {
    let Some(rows) = f else {
        return Ok(vec![default; g.len()]);
    };
    if rows.len() != g.ny || rows.iter().any(|r| r.len() != g.nx) {
        return Err(CliError::Input(format!(
            "field `{name}` must be {} rows of {} values",
            g.ny, g.nx
        )));
    }
    Ok(rows.iter().flatten().copied().collect())
}

fn complex(re: Vec<f64>, im: Vec<f64>) -> Vec<C64> {
    re.into_iter()
        .zip(im)
        .map(|(a, b)| C64::new(a, b))
        .collect()
}

pub fn rows(values: &[f64], g: &Grid2) -> Field {
    values.chunks(g.nx).map(<[f64]>::to_vec).collect()
}

pub fn signature(h: Option<i8>) -> Result<Signature, CliError> {
    let h =
        h.ok_or_else(|| CliError::Input("missing `H` (give it in the file or with --H)".into()))?;
    Signature::new(i64::from(h))
        .map_err(|_| CliError::Input(format!("`H` must be 1 or -1, got {h}")))
}

impl SurfaceFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let f: SurfaceFile = serde_json::from_str(text)
            .map_err(|e| CliError::Input(format!("malformed input: {e}")))?;
        if let Some(s) = &f.schema {
            if s != SCHEMA {
                return Err(CliError::Input(format!(
                    "unsupported schema `{s}`, expected `{SCHEMA}`"
                )));
            }
        }
        Ok(f)
    }

    pub fn grid(&self) -> Result<Grid2, CliError> {
        let s = self
            .grid
            .ok_or_else(|| CliError::Input("missing `grid`".into()))?;
        Grid2::new(s.nx, s.ny, s.x0, s.y0, s.hx, s.hy)
            .map_err(|e| CliError::Input(format!("grid: {e}")))
    }

    /// Builds validated surface data; `h_override` replaces the file's `H`.
    pub fn to_data(&self, h_override: Option<i8>) -> Result<SurfaceData, CliError> {
        let g = self.grid()?;
        let sig = signature(h_override.or(self.h))?;
        if self.u.is_none() {
            return Err(CliError::Input("missing field `u`".into()));
        }
        let u = flatten("u", &self.u, &g, 0.0)?;
        let theta = flatten("theta", &self.theta, &g, std::f64::consts::FRAC_PI_2)?;
        let phi = complex(
            flatten("phi_re", &self.phi_re, &g, 0.0)?,
            flatten("phi_im", &self.phi_im, &g, 0.0)?,
        );
        let q = complex(
            flatten("Q_re", &self.q_re, &g, 0.0)?,
            flatten("Q_im", &self.q_im, &g, 0.0)?,
        );
        let rho = complex(
            flatten("rho_re", &self.rho_re, &g, 0.0)?,
            flatten("rho_im", &self.rho_im, &g, 0.0)?,
        );
        SurfaceData::new(sig, g, u, theta, phi, q, rho)
            .map_err(|e| CliError::Input(format!("surface data: {e}")))
    }

    pub fn from_data(d: &SurfaceData) -> Self {
        let g = &d.grid;
        let re = |v: &[C64]| Some(rows(&v.iter().map(|z| z.re).collect::<Vec<_>>(), g));
        let im = |v: &[C64]| Some(rows(&v.iter().map(|z| z.im).collect::<Vec<_>>(), g));
        SurfaceFile {
            schema: Some(SCHEMA.into()),
            h: Some(d.sig.value()),
            grid: Some((*g).into()),
            u: Some(rows(&d.u, g)),
            theta: Some(rows(&d.theta, g)),
            phi_re: re(&d.phi),
            phi_im: im(&d.phi),
            q_re: re(&d.q),
            q_im: im(&d.q),
            rho_re: re(&d.rho),
            rho_im: im(&d.rho),
        }
    }
}

/// Writes every float as `{:.16e}`; NaN and infinities become `null`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FixedFloats;

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Io(format!("serializing report: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so a failed run never leaves a truncated file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_err = |e: io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
