//! CSV time series and binary field dumps.
//!
//! A dump is `b"CARR"`, a little-endian `u32` version, `u64` n, `f64`
//! l_box and `f64` u, followed by `ex, ey, ez, bx, by, bz`, each `n^3`
//! little-endian `f64` in x-fastest order. A `<dump>.meta` text file next to
//! it records the layout in `key = value` form.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::maxwell::fdtd::{EmGridState, SimRow, OFFSETS};

pub const MAGIC: &[u8; 4] = b"CARR";
pub const VERSION: u32 = 1;
const NAMES: [&str; 6] = ["ex", "ey", "ez", "bx", "by", "bz"];

pub fn write_csv<W: Write>(rows: &[SimRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SimRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        let f = |i: usize| -> Result<f64> {
            rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Config(format!("bad CSV field {i}")))
        };
        rows.push(SimRow {
            step: f(0)? as usize,
            u: f(1)?,
            t: f(2)?,
            energy: f(3)?,
            max_div_e: f(4)?,
            max_div_b: f(5)?,
            max_residual_faraday: f(6)?,
            max_residual_ampere: f(7)?,
        });
    }
    Ok(rows)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("CSV: {other:?}")),
    }
}

/// `<stem>_<step>.bin` inside `dir`.
pub fn dump_path(dir: &Path, stem: &str, step: usize) -> PathBuf {
    dir.join(format!("{stem}_{step:06}.bin"))
}

pub fn meta_path(dump: &Path) -> PathBuf {
    let mut s = dump.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

pub fn encode_dump(s: &EmGridState) -> Vec<u8> {
    let cells = s.n * s.n * s.n;
    let mut buf = Vec::with_capacity(32 + 48 * cells);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(s.n as u64).to_le_bytes());
    buf.extend_from_slice(&s.l_box.to_le_bytes());
    buf.extend_from_slice(&s.u.to_le_bytes());
    for a in s.components() {
        for v in a {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    buf
}

/// Inverse of [`encode_dump`]; `step` and `branch` are not stored in the
/// binary and come back as `0` and `+1`.
pub fn decode_dump(bytes: &[u8]) -> Result<EmGridState> {
    let bad = |m: &str| Error::Config(format!("field dump: {m}"));
    if bytes.len() < 32 || &bytes[..4] != MAGIC {
        return Err(bad("missing CARR header"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let f64_at = |o: usize| f64::from_bits(u64_at(o));
    if u32_at(4) != VERSION {
        return Err(bad(&format!("unsupported version {}", u32_at(4))));
    }
    let n = u64_at(8) as usize;
    let cells = n.checked_mul(n).and_then(|v| v.checked_mul(n)).ok_or_else(|| bad("absurd n"))?;
    if bytes.len() != 32 + 48 * cells {
        return Err(bad("length does not match n"));
    }
    let mut s = EmGridState::zeros(n, f64_at(16));
    s.u = f64_at(24);
    let mut off = 32;
    for c in 0..6 {
        let a = if c < 3 { &mut s.e[c] } else { &mut s.b[c - 3] };
        for v in a.iter_mut() {
            *v = f64_at(off);
            off += 8;
        }
    }
    Ok(s)
}

pub fn meta_text(s: &EmGridState, du: f64) -> String {
    let mut m = String::new();
    m.push_str("format = CARR\n");
    m.push_str(&format!("version = {VERSION}\n"));
    m.push_str(&format!("n = {}\nl_box = {}\nstep = {}\n", s.n, s.l_box, s.step));
    m.push_str(&format!("u_e = {}\nu_b = {}\nt_e = {}\nbranch = {}\n", s.u, s.u - 0.5 * du, s.carrollian_time(), s.branch));
    m.push_str("order = x-fastest\nendianness = little\n");
    for (name, off) in NAMES.iter().zip(OFFSETS) {
        m.push_str(&format!("offset.{name} = {}, {}, {}\n", off[0], off[1], off[2]));
    }
    m
}

pub fn write_dump(path: &Path, s: &EmGridState, du: f64) -> Result<()> {
    fs::write(path, encode_dump(s))?;
    fs::write(meta_path(path), meta_text(s, du))?;
    Ok(())
}

pub fn read_dump(path: &Path) -> Result<EmGridState> {
    decode_dump(&fs::read(path)?)
}
