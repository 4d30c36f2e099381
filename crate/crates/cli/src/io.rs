//! Matrix CSV and PGM image files.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::CliError;

/// Parses comma-separated decimal rows into a matrix. Blank lines are skipped.
pub fn parse_matrix_csv(text: &str) -> Result<DMatrix<f64>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::input(format!("line {line}: {}", csv_reason(&e)))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(CliError::input(format!("line {line}: expected {c} fields, found {}", record.len())))
            }
            _ => {}
        }
        for (k, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| CliError::input(format!("line {line}, field {}: not a number: {field:?}", k + 1)))?;
            values.push(v);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| CliError::input("empty matrix file"))?;
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

fn csv_reason(e: &csv::Error) -> String {
    match e.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            format!("expected {expected_len} fields, found {len}")
        }
        _ => e.to_string(),
    }
}

pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix_csv(&text).map_err(|e| e.in_file(path))
}

/// Shortest round-trip decimal form, one row per line.
pub fn format_matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = m.row(r).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<(), CliError> {
    fs::write(path, format_matrix_csv(m)).map_err(|e| CliError::io(path, e))
}

/// Grayscale image with pixels scaled to `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pgm {
    /// `height × width`.
    pub pixels: DMatrix<f64>,
    pub maxval: u16,
}

pub fn parse_pgm(bytes: &[u8]) -> Result<Pgm, CliError> {
    let mut cur = Cursor { bytes, pos: 0, line: 1 };
    let magic = cur.token()?;
    let binary = match magic.as_str() {
        "P5" => true,
        "P2" => false,
        other => return Err(cur.error(format!("unsupported magic {other:?}, expected P2 or P5"))),
    };
    let width = cur.number()?;
    let height = cur.number()?;
    let maxval = cur.number()?;
    if maxval == 0 || maxval > 65535 {
        return Err(cur.error(format!("maxval {maxval} outside 1..=65535")));
    }
    let n = width * height;
    let mut raw = Vec::with_capacity(n);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        cur.pos += 1;
        let wide = maxval > 255;
        let need = if wide { 2 * n } else { n };
        let data = bytes.get(cur.pos..cur.pos + need).ok_or_else(|| {
            cur.error(format!("raster truncated: need {need} bytes, have {}", bytes.len().saturating_sub(cur.pos)))
        })?;
        if wide {
            raw.extend(data.chunks(2).map(|c| u16::from_be_bytes([c[0], c[1]]) as usize));
        } else {
            raw.extend(data.iter().map(|&b| b as usize));
        }
    } else {
        for _ in 0..n {
            raw.push(cur.number()?);
        }
    }
    if let Some(v) = raw.iter().find(|&&v| v > maxval) {
        return Err(CliError::input(format!("pixel value {v} exceeds maxval {maxval}")));
    }
    let scale = maxval as f64;
    let pixels = DMatrix::from_fn(height, width, |r, c| raw[r * width + c] as f64 / scale);
    Ok(Pgm { pixels, maxval: maxval as u16 })
}

pub fn read_pgm(path: &Path) -> Result<Pgm, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_pgm(&bytes).map_err(|e| e.in_file(path))
}

/// Binary P5; values are clamped to `[0, 1]` and rounded to the nearest level.
pub fn encode_pgm(img: &Pgm) -> Vec<u8> {
    let (h, w) = img.pixels.shape();
    let maxval = img.maxval.max(1);
    let mut out = format!("P5\n{w} {h}\n{maxval}\n").into_bytes();
    for r in 0..h {
        for c in 0..w {
            let q = (img.pixels[(r, c)].clamp(0.0, 1.0) * maxval as f64).round() as u16;
            if maxval > 255 {
                out.extend_from_slice(&q.to_be_bytes());
            } else {
                out.push(q as u8);
            }
        }
    }
    out
}

pub fn write_pgm(path: &Path, img: &Pgm) -> Result<(), CliError> {
    fs::write(path, encode_pgm(img)).map_err(|e| CliError::io(path, e))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl Cursor<'_> {
    fn error(&self, msg: String) -> CliError {
        CliError::input(format!("line {}: {msg}", self.line))
    }

    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                if b == b'\n' {
                    self.line += 1;
                }
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<String, CliError> {
        self.skip_space();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("unexpected end of header".into()));
        }
        Ok(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<usize, CliError> {
        let t = self.token()?;
        t.parse().map_err(|_| self.error(format!("expected a nonnegative integer, found {t:?}")))
    }
}
