//! On-disk formats.
//!
//! A field is a pair of files sharing a stem: `<stem>.bin` holds little-endian
//! `f64` values in row-major node order (vector fields component-major, wave
//! functions interleaved real/imaginary), and `<stem>.toml` is the header
//! `{ n, halfwidth, kind, components }`.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dichotomy::ExperimentTable;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, VectorField, WaveField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    Scalar,
    Vector,
    Wave,
}

impl FieldKind {
    pub fn components(self) -> usize {
        match self {
            FieldKind::Scalar => 1,
            FieldKind::Vector | FieldKind::Wave => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub n: usize,
    pub halfwidth: f64,
    pub kind: FieldKind,
    pub components: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedField {
    Scalar(ScalarField),
    Vector(VectorField),
    Wave(WaveField),
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn write_raw(stem: &Path, grid: &GridSpec, kind: FieldKind, values: impl Iterator<Item = f64>) -> Result<()> {
    let header = FieldHeader {
        n: grid.points(),
        halfwidth: grid.halfwidth(),
        kind,
        components: kind.components(),
    };
    let bytes: Vec<u8> = values.flat_map(f64::to_le_bytes).collect();
    fs::write(with_ext(stem, "bin"), bytes)?;
    write_toml(&with_ext(stem, "toml"), &header)
}

pub fn write_scalar(stem: &Path, f: &ScalarField) -> Result<()> {
    write_raw(stem, f.grid(), FieldKind::Scalar, f.values().iter().copied())
}

pub fn write_vector(stem: &Path, f: &VectorField) -> Result<()> {
    write_raw(stem, f.grid(), FieldKind::Vector, f.x().iter().chain(f.y()).copied())
}

pub fn write_wave(stem: &Path, f: &WaveField) -> Result<()> {
    write_raw(stem, f.grid(), FieldKind::Wave, f.values().iter().flat_map(|z| [z.re, z.im]))
}

pub fn read_field(stem: &Path) -> Result<LoadedField> {
    let text = fs::read_to_string(with_ext(stem, "toml"))?;
    let header: FieldHeader =
        toml::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", with_ext(stem, "toml").display())))?;
    if header.components != header.kind.components() {
        return Err(Error::Format(format!(
            "{:?} field with {} components",
            header.kind, header.components
        )));
    }
    let grid = GridSpec::relaxed(header.halfwidth, header.n)?;
    let bytes = fs::read(with_ext(stem, "bin"))?;
    let expected = grid.len() * header.components * 8;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "{} has {} bytes, the header implies {expected}",
            with_ext(stem, "bin").display(),
            bytes.len()
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunks of eight")))
        .collect();
    let len = grid.len();
    Ok(match header.kind {
        FieldKind::Scalar => LoadedField::Scalar(ScalarField::new(grid, values)?),
        FieldKind::Vector => {
            let (x, y) = values.split_at(len);
            LoadedField::Vector(VectorField::new(grid, x.to_vec(), y.to_vec())?)
        }
        FieldKind::Wave => LoadedField::Wave(WaveField::new(
            grid,
            values.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect(),
        )?),
    })
}

pub fn read_scalar(stem: &Path) -> Result<ScalarField> {
    match read_field(stem)? {
        LoadedField::Scalar(f) => Ok(f),
        other => Err(Error::Format(format!("expected a scalar field, found {}", kind_name(&other)))),
    }
}

pub fn read_wave(stem: &Path) -> Result<WaveField> {
    match read_field(stem)? {
        LoadedField::Wave(f) => Ok(f),
        other => Err(Error::Format(format!("expected a wave function, found {}", kind_name(&other)))),
    }
}

pub fn read_vector(stem: &Path) -> Result<VectorField> {
    match read_field(stem)? {
        LoadedField::Vector(f) => Ok(f),
        other => Err(Error::Format(format!("expected a vector field, found {}", kind_name(&other)))),
    }
}

fn kind_name(f: &LoadedField) -> &'static str {
    match f {
        LoadedField::Scalar(_) => "a scalar field",
        LoadedField::Vector(_) => "a vector field",
        LoadedField::Wave(_) => "a wave function",
    }
}

pub fn write_toml<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let text = toml::to_string(value).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

/// `<name>.csv`, `<name>.meta.toml` and one two-column CSV per curve under `plot/`.
pub fn write_table(dir: &Path, name: &str, table: &ExperimentTable) -> Result<()> {
    fs::create_dir_all(dir.join("plot"))?;
    write_csv(&dir.join(format!("{name}.csv")), &table.rows)?;
    write_toml(&dir.join(format!("{name}.meta.toml")), &table.metadata)?;
    for (curve, points) in table.curves() {
        let mut w = csv::Writer::from_path(dir.join("plot").join(format!("{name}_{curve}.csv"))).map_err(csv_error)?;
        w.write_record(["radius", curve]).map_err(csv_error)?;
        for (r, v) in points {
            w.serialize((r, v)).map_err(csv_error)?;
        }
        w.flush()?;
    }
    Ok(())
}
