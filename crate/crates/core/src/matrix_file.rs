//! Line-oriented `PHIPK v1` text format for sensing matrices.
//!
//! ```text
//! PHIPK v1 variant=powerresidue p=13 k=3 M=5 N=13
//! <N entries "re:im" separated by spaces>      (M lines)
//! ```
//!
//! Entries are written with 17 significant digits so a round trip restores
//! every `f64` exactly.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{kth_power_residues, PrimeField};
use crate::matrix::{SensingMatrix, Variant};

pub const MAGIC: &str = "PHIPK";
pub const VERSION: &str = "v1";

/// Column-norm tolerance applied when loading a file.
pub const LOAD_NORM_TOLERANCE: f64 = 1e-6;

fn fmt_entry(z: &Complex64) -> String {
    format!("{:.16e}:{:.16e}", z.re, z.im)
}

pub fn header_line(matrix: &SensingMatrix) -> String {
    format!(
        "{MAGIC} {VERSION} variant={} p={} k={} M={} N={}",
        matrix.variant().as_str(),
        matrix.p(),
        matrix.k(),
        matrix.rows(),
        matrix.cols()
    )
}

pub fn write_matrix<W: Write>(matrix: &SensingMatrix, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", header_line(matrix))?;
    for row in matrix.entries().row_iter() {
        let line: Vec<String> = row.iter().map(fmt_entry).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    out.flush()
}

pub fn to_string(matrix: &SensingMatrix) -> String {
    let mut buf = Vec::new();
    write_matrix(matrix, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("format is ASCII")
}

fn bad(msg: impl Into<String>) -> Error {
    Error::MatrixFormat(msg.into())
}

struct Header {
    variant: Variant,
    p: u64,
    k: u64,
    m: usize,
    n: usize,
}

fn parse_header(line: &str) -> Result<Header> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some(MAGIC) {
        return Err(bad("missing PHIPK magic"));
    }
    if tokens.next() != Some(VERSION) {
        return Err(bad("unsupported version"));
    }
    let mut field = |name: &str| -> Result<String> {
        let tok = tokens.next().ok_or_else(|| bad(format!("missing {name}=")))?;
        tok.strip_prefix(name)
            .and_then(|t| t.strip_prefix('='))
            .map(str::to_owned)
            .ok_or_else(|| bad(format!("expected {name}=..., found {tok:?}")))
    };
    let variant: Variant = field("variant")?.parse().map_err(|_| bad("unknown variant"))?;
    let int = |s: String, name: &str| s.parse::<u64>().map_err(|_| bad(format!("bad {name}")));
    let p = int(field("p")?, "p")?;
    let k = int(field("k")?, "k")?;
    let m = int(field("M")?, "M")? as usize;
    let n = int(field("N")?, "N")? as usize;
    Ok(Header { variant, p, k, m, n })
}

fn parse_entry(tok: &str) -> Result<Complex64> {
    let (re, im) = tok.split_once(':').ok_or_else(|| bad(format!("entry {tok:?} is not re:im")))?;
    let re: f64 = re.parse().map_err(|_| bad(format!("bad real part {re:?}")))?;
    let im: f64 = im.parse().map_err(|_| bad(format!("bad imaginary part {im:?}")))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad("non-finite entry"));
    }
    Ok(Complex64::new(re, im))
}

/// Reads a `PHIPK v1` file, validating the header against the construction's
/// dimensions and every column norm against 1.
pub fn read_matrix<R: BufRead>(input: R) -> Result<SensingMatrix> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| bad("empty file"))?
        .map_err(|e| bad(e.to_string()))?;
    let h = parse_header(&header)?;

    let field = PrimeField::new(h.p)?;
    let residues = match h.variant {
        Variant::PowerResidue => kth_power_residues(&field, h.k)?,
        Variant::Paley if h.k == 2 => kth_power_residues(&field, 2)?,
        Variant::Paley => return Err(bad("paley variant must have k=2")),
    };
    let expected_m = residues.len() + 1;
    let expected_n = match h.variant {
        Variant::PowerResidue => h.p as usize,
        Variant::Paley => h.p as usize + 1,
    };
    if (h.m, h.n) != (expected_m, expected_n) {
        return Err(bad(format!(
            "header claims {}x{}, construction gives {expected_m}x{expected_n}",
            h.m, h.n
        )));
    }

    let mut data = Vec::with_capacity(h.m * h.n);
    for r in 0..h.m {
        let line = lines
            .next()
            .ok_or_else(|| bad(format!("missing row {}", r + 1)))?
            .map_err(|e| bad(e.to_string()))?;
        let row: Vec<Complex64> = line.split_whitespace().map(parse_entry).collect::<Result<_>>()?;
        if row.len() != h.n {
            return Err(bad(format!("row {} has {} entries, expected {}", r + 1, row.len(), h.n)));
        }
        data.extend(row);
    }
    if let Some(extra) = lines.next() {
        let extra = extra.map_err(|e| bad(e.to_string()))?;
        if !extra.trim().is_empty() {
            return Err(bad("trailing data after last row"));
        }
    }
    let entries = DMatrix::from_row_slice(h.m, h.n, &data);
    for (i, col) in entries.column_iter().enumerate() {
        let norm = col.norm();
        if (norm - 1.0).abs() > LOAD_NORM_TOLERANCE {
            return Err(bad(format!("column {i} has norm {norm}, expected 1")));
        }
    }
    let mut row_labels = vec![0];
    row_labels.extend_from_slice(&residues.elements);
    Ok(SensingMatrix::from_parts(
        entries,
        h.p,
        h.k,
        h.variant,
        (0..h.p).collect(),
        row_labels,
    ))
}
