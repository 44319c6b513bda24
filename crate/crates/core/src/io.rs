//! Plain-text matrix files shared by every subcommand.
//!
//! ```text
//! # rows=2 cols=3 kind=euclidean
//! 0.0000000000000000e0,1.0000000000000000e0,...
//! ```
//!
//! Values are written with 17 significant digits so that `f64` data round
//! trips exactly. Additional `#` lines after the first are kept verbatim as
//! metadata.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub data: Array2<f64>,
    pub kind: String,
    /// Extra header lines with the leading `# ` stripped.
    pub meta: Vec<String>,
}

pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_matrix<T: Scalar, W: Write>(
    mut out: W,
    data: &Array2<T>,
    kind: &str,
    meta: &[String],
) -> Result<()> {
    if kind.is_empty() || kind.contains(char::is_whitespace) {
        return Err(Error::invalid_input(format!(
            "bad matrix kind tag {kind:?}"
        )));
    }
    writeln!(
        out,
        "# rows={} cols={} kind={}",
        data.nrows(),
        data.ncols(),
        kind
    )?;
    for line in meta {
        writeln!(out, "# {line}")?;
    }
    let mut buf = String::new();
    for row in data.rows() {
        buf.clear();
        for (j, x) in row.iter().enumerate() {
            if j > 0 {
                buf.push(',');
            }
            buf.push_str(&format_value(x.f64()));
        }
        writeln!(out, "{buf}")?;
    }
    Ok(())
}

pub fn save_matrix<T: Scalar>(
    path: impl AsRef<Path>,
    data: &Array2<T>,
    kind: &str,
    meta: &[String],
) -> Result<()> {
    let file = fs::File::create(path.as_ref())?;
    let mut out = BufWriter::new(file);
    write_matrix(&mut out, data, kind, meta)?;
    out.flush()?;
    Ok(())
}

pub fn read_matrix<R: BufRead>(input: R, name: &str) -> Result<MatrixFile> {
    let err = |line: usize, msg: String| Error::Parse {
        path: name.to_string(),
        line,
        msg,
    };
    let mut lines = input.lines();
    let first = match lines.next() {
        Some(l) => l?,
        None => return Err(err(1, "empty file".into())),
    };
    let (rows, cols, kind) = parse_header(&first).map_err(|m| err(1, m))?;

    let mut meta = Vec::new();
    let mut values = Vec::with_capacity(rows * cols);
    let mut seen_rows = 0usize;
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        if let Some(rest) = line.strip_prefix('#') {
            if seen_rows > 0 {
                return Err(err(lineno, "header line after data".into()));
            }
            meta.push(rest.trim_start().to_string());
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let before = values.len();
        for field in line.split(',') {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| err(lineno, format!("not a number: {:?}", field.trim())))?;
            values.push(v);
        }
        let got = values.len() - before;
        if got != cols {
            return Err(err(lineno, format!("expected {cols} columns, found {got}")));
        }
        seen_rows += 1;
        if seen_rows > rows {
            return Err(err(lineno, format!("more than the declared {rows} rows")));
        }
    }
    if seen_rows != rows {
        return Err(err(
            seen_rows + meta.len() + 1,
            format!("declared {rows} rows, found {seen_rows}"),
        ));
    }
    let data = Array2::from_shape_vec((rows, cols), values)
        .map_err(|e| err(1, format!("shape error: {e}")))?;
    Ok(MatrixFile { data, kind, meta })
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<MatrixFile> {
    let path = path.as_ref();
    let file = fs::File::open(path)?;
    read_matrix(BufReader::new(file), &path.display().to_string())
}

fn parse_header(line: &str) -> std::result::Result<(usize, usize, String), String> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| "missing '# rows=.. cols=.. kind=..' header".to_string())?;
    let mut rows = None;
    let mut cols = None;
    let mut kind = None;
    for tok in body.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| format!("malformed header token {tok:?}"))?;
        match k {
            "rows" => rows = Some(v.parse::<usize>().map_err(|_| format!("bad rows {v:?}"))?),
            "cols" => cols = Some(v.parse::<usize>().map_err(|_| format!("bad cols {v:?}"))?),
            "kind" => kind = Some(v.to_string()),
            _ => return Err(format!("unknown header key {k:?}")),
        }
    }
    match (rows, cols, kind) {
        (Some(r), Some(c), Some(k)) => Ok((r, c, k)),
        _ => Err("header needs rows, cols and kind".into()),
    }
}

/// Looks up `key=value` in the metadata lines.
pub fn meta_value<'a>(meta: &'a [String], key: &str) -> Option<&'a str> {
    meta.iter()
        .flat_map(|l| l.split_whitespace())
        .find_map(|tok| tok.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn round_trip_is_exact() {
        let a = array![[0.1, -2.5e-300, 1.0 / 3.0], [f64::MAX, -0.0, 7.0]];
        let mut buf = Vec::new();
        write_matrix(&mut buf, &a, "euclidean", &[]).unwrap();
        let back = read_matrix(&buf[..], "mem").unwrap();
        assert_eq!(back.kind, "euclidean");
        for (x, y) in a.iter().zip(back.data.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn header_and_meta() {
        let a = array![[1.0f32, 2.0]];
        let mut buf = Vec::new();
        write_matrix(&mut buf, &a, "embedding", &["eigenvalues=0.5 t=2".into()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# rows=1 cols=2 kind=embedding\n# eigenvalues=0.5 t=2\n"));
        let back = read_matrix(&buf[..], "mem").unwrap();
        assert_eq!(meta_value(&back.meta, "t"), Some("2"));
        assert_eq!(meta_value(&back.meta, "eigenvalues"), Some("0.5"));
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_value(0.1), "1.0000000000000001e-1");
        assert_eq!(format_value(5.0), "5.0000000000000000e0");
    }

    #[test]
    fn rejects_shape_mismatch() {
        let text = "# rows=2 cols=2 kind=x\n1,2\n3\n";
        let e = read_matrix(text.as_bytes(), "f").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let text = "# rows=3 cols=2 kind=x\n1,2\n3,4\n";
        assert!(read_matrix(text.as_bytes(), "f").is_err());
        let text = "# rows=1 cols=2 kind=x\n1,2\n3,4\n";
        assert!(read_matrix(text.as_bytes(), "f").is_err());
    }

    #[test]
    fn rejects_missing_header() {
        assert!(read_matrix("1,2\n".as_bytes(), "f").is_err());
        assert!(read_matrix("# rows=1 cols=2\n1,2\n".as_bytes(), "f").is_err());
    }
}
