//! Binary state snapshots.
//!
//! A snapshot is one line of JSON describing the payload, a newline, then
//! the payload: every field as consecutive little-endian `f64` values in
//! the order and at the offsets listed in the header. Reading a snapshot
//! reproduces the state bit for bit.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use swlw_core::lagrangian::{FlowMapState, Mat2};
use swlw_core::stepper::SimState;
use swlw_core::{Complex64, ComplexField, Grid, ScalarField, VectorField};

pub const FORMAT: &str = "swlw-snapshot";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldEntry {
    pub name: String,
    /// Byte offset from the start of the payload.
    pub offset: u64,
    /// Number of `f64` values.
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub format: String,
    pub version: u32,
    pub endianness: String,
    pub n: usize,
    /// Informational; the exact time is the `t` field of the payload.
    pub time: f64,
    pub step: usize,
    pub fields: Vec<FieldEntry>,
    pub payload_bytes: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad snapshot header: {0}")]
    Header(String),
    #[error("invalid field data: {0}")]
    Field(#[from] swlw_core::Error),
}

fn header_err(msg: impl Into<String>) -> SnapshotError {
    SnapshotError::Header(msg.into())
}

fn layout(n: usize) -> Vec<(&'static str, usize)> {
    let m = n * n;
    vec![
        ("t", 1),
        ("map_time", 1),
        ("rho", m),
        ("u1", m),
        ("u2", m),
        ("h1", m),
        ("h2", m),
        ("psi_re", m),
        ("psi_im", m),
        ("rho0", m),
        ("displacement1", m),
        ("displacement2", m),
        ("particles", 2 * m),
        ("e11", m),
        ("e12", m),
        ("e21", m),
        ("e22", m),
        ("b", 4 * m),
        ("jacobian", m),
        ("liouville", m),
    ]
}

fn columns(state: &SimState) -> Vec<Vec<f64>> {
    let map = &state.map;
    let e = &map.deformation;
    vec![
        vec![state.t],
        vec![map.time],
        state.rho.values.clone(),
        state.u.0[0].values.clone(),
        state.u.0[1].values.clone(),
        state.h.0[0].values.clone(),
        state.h.0[1].values.clone(),
        state.psi.values.iter().map(|z| z.re).collect(),
        state.psi.values.iter().map(|z| z.im).collect(),
        state.rho0.values.clone(),
        map.displacement.0[0].values.clone(),
        map.displacement.0[1].values.clone(),
        map.particles.iter().flatten().copied().collect(),
        e[0][0].values.clone(),
        e[0][1].values.clone(),
        e[1][0].values.clone(),
        e[1][1].values.clone(),
        map.inverse_deformation.iter().flatten().flatten().copied().collect(),
        map.jacobian.values.clone(),
        map.liouville.clone(),
    ]
}

pub fn write<W: Write>(mut out: W, state: &SimState, step: usize) -> Result<(), SnapshotError> {
    let n = state.rho.grid().n();
    let cols = columns(state);
    let mut fields = Vec::new();
    let mut offset = 0u64;
    for ((name, count), col) in layout(n).into_iter().zip(&cols) {
        debug_assert_eq!(count, col.len());
        fields.push(FieldEntry {
            name: name.to_string(),
            offset,
            count: count as u64,
        });
        offset += 8 * count as u64;
    }
    let header = SnapshotHeader {
        format: FORMAT.to_string(),
        version: VERSION,
        endianness: "little".to_string(),
        n,
        time: state.t,
        step,
        fields,
        payload_bytes: offset,
    };
    let line = serde_json::to_string(&header).map_err(|e| header_err(e.to_string()))?;
    out.write_all(line.as_bytes())?;
    out.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(offset as usize);
    for col in &cols {
        for x in col {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

pub fn write_file(path: &Path, state: &SimState, step: usize) -> Result<(), SnapshotError> {
    let file = io::BufWriter::new(fs::File::create(path)?);
    write(file, state, step)
}

pub fn read_header<R: BufRead>(input: &mut R) -> Result<SnapshotHeader, SnapshotError> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    let header: SnapshotHeader = serde_json::from_str(line.trim_end()).map_err(|e| header_err(e.to_string()))?;
    if header.format != FORMAT {
        return Err(header_err(format!("format {:?}", header.format)));
    }
    if header.version != VERSION {
        return Err(header_err(format!("unsupported version {}", header.version)));
    }
    if header.endianness != "little" {
        return Err(header_err(format!("endianness {:?}", header.endianness)));
    }
    let expected = layout(header.n);
    if header.fields.len() != expected.len() {
        return Err(header_err("field list does not match the layout"));
    }
    let mut offset = 0u64;
    for (entry, (name, count)) in header.fields.iter().zip(&expected) {
        if entry.name != *name || entry.count != *count as u64 || entry.offset != offset {
            return Err(header_err(format!("field {:?} out of place", entry.name)));
        }
        offset += 8 * entry.count;
    }
    if offset != header.payload_bytes {
        return Err(header_err("payload size disagrees with the field list"));
    }
    Ok(header)
}

/// Reads a snapshot; returns the header and the state.
pub fn read<R: BufRead>(mut input: R) -> Result<(SnapshotHeader, SimState), SnapshotError> {
    let header = read_header(&mut input)?;
    let grid = Grid::new(header.n)?;
    let mut bytes = vec![0u8; header.payload_bytes as usize];
    input.read_exact(&mut bytes)?;
    let mut rest = Vec::new();
    input.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(header_err("trailing bytes after the payload"));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of eight")))
        .collect();
    let mut cols = Vec::new();
    let mut at = 0;
    for entry in &header.fields {
        let c = entry.count as usize;
        cols.push(values[at..at + c].to_vec());
        at += c;
    }
    let mut it = cols.into_iter();
    let mut next = || it.next().expect("layout checked");
    let scalar = |v: Vec<f64>| ScalarField::from_values(&grid, v);
    let t = next()[0];
    let map_time = next()[0];
    let rho = scalar(next())?;
    let u = VectorField::new(scalar(next())?, scalar(next())?);
    let h = VectorField::new(scalar(next())?, scalar(next())?);
    let re = next();
    let im = next();
    let psi = ComplexField::from_values(&grid, re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect())?;
    let rho0 = scalar(next())?;
    let displacement = VectorField::new(scalar(next())?, scalar(next())?);
    let particles = next().chunks_exact(2).map(|p| [p[0], p[1]]).collect();
    let deformation = [[scalar(next())?, scalar(next())?], [scalar(next())?, scalar(next())?]];
    let inverse_deformation: Vec<Mat2> = next().chunks_exact(4).map(|b| [[b[0], b[1]], [b[2], b[3]]]).collect();
    let jacobian = scalar(next())?;
    let liouville = next();
    let state = SimState {
        rho,
        u,
        h,
        psi,
        map: FlowMapState {
            displacement,
            particles,
            deformation,
            inverse_deformation,
            jacobian,
            liouville,
            time: map_time,
        },
        rho0,
        t,
    };
    Ok((header, state))
}

pub fn read_file(path: &Path) -> Result<(SnapshotHeader, SimState), SnapshotError> {
    read(io::BufReader::new(fs::File::open(path)?))
}
