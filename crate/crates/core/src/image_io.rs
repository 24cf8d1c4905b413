//! Image exchange: binary 16-bit PGM and a plain CSV raster.
//!
//! PGM output is quantized: the image maximum maps to 65535 and every pixel
//! is rounded to the nearest level. The pixel pitch travels in a
//! `# pixel_pitch_um <value>` header comment. CSV output is lossless.
//!
//! CSV layout:
//!
//! ```text
//! width,height,pixel_pitch_um
//! 256,256,32
//! <height rows of width comma-separated values>
//! ```
//!
//! The name line is optional on input.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{Provenance, RingImage, DEFAULT_INGEST_PITCH};

/// Largest 16-bit PGM level.
pub const PGM_MAXVAL: u16 = 65535;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageFormat {
    Pgm16,
    Csv,
}

impl ImageFormat {
    /// Guess from the file extension (`.pgm`, `.csv`).
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "pgm" => Some(ImageFormat::Pgm16),
            "csv" => Some(ImageFormat::Csv),
            _ => None,
        }
    }
}

/// Pixel levels written to a PGM file for `image`.
pub fn quantize(image: &RingImage) -> Vec<u16> {
    quantize_values(image.pixels())
}

/// Scale so the maximum maps to 65535 and round to the nearest level.
pub fn quantize_values(values: &[f64]) -> Vec<u16> {
    let max = values.iter().cloned().fold(0.0, f64::max);
    values
        .iter()
        .map(|&p| {
            if max > 0.0 {
                (p / max * PGM_MAXVAL as f64).round() as u16
            } else {
                0
            }
        })
        .collect()
}

pub fn encode_pgm16(image: &RingImage) -> Vec<u8> {
    encode_pgm16_raster(
        image.width(),
        image.height(),
        image.pixels(),
        &format!("pixel_pitch_um {}", image.pixel_pitch() * 1e6),
    )
}

/// 16-bit PGM of any non-negative row-major raster with one header comment.
pub fn encode_pgm16_raster(width: usize, height: usize, values: &[f64], comment: &str) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + 2 * values.len());
    write!(out, "P5\n# {comment}\n{width} {height}\n{PGM_MAXVAL}\n")
        .expect("writing to a Vec cannot fail");
    for v in quantize_values(values) {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
    pitch_um: Option<f64>,
}

impl Header<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    /// Skip whitespace and comments, remembering a pitch comment.
    fn skip(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                let end = self.bytes[self.pos..]
                    .iter()
                    .position(|&c| c == b'\n')
                    .map_or(self.bytes.len(), |e| self.pos + e);
                let line = String::from_utf8_lossy(&self.bytes[self.pos + 1..end]);
                let mut words = line.split_whitespace();
                if words.next() == Some("pixel_pitch_um") {
                    self.pitch_um = words.next().and_then(|w| w.parse().ok());
                }
                self.pos = end;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            self.pos = start;
            return Err(self.err(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                offset: start,
                message: format!("{what} out of range"),
            })
    }
}

/// Decode a binary PGM (8- or 16-bit). Returns `(width, height, levels, pitch_um)`.
pub fn decode_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<f64>, Option<f64>)> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::Parse {
            offset: 0,
            message: "missing P5 magic number".into(),
        });
    }
    let mut h = Header {
        bytes,
        pos: 2,
        pitch_um: None,
    };
    let width = h.number("width")?;
    let height = h.number("height")?;
    h.skip();
    let maxval_at = h.pos;
    let maxval = h.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Parse {
            offset: maxval_at,
            message: format!("maxval {maxval} outside 1..=65535"),
        });
    }
    if h.pos >= bytes.len() || !bytes[h.pos].is_ascii_whitespace() {
        return Err(h.err("expected a single whitespace byte before the raster"));
    }
    let start = h.pos + 1;
    let depth = if maxval < 256 { 1 } else { 2 };
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(depth))
        .ok_or_else(|| Error::Parse {
            offset: maxval_at,
            message: "image dimensions overflow".into(),
        })?;
    let raster = &bytes[start..];
    if raster.len() < need {
        return Err(Error::Parse {
            offset: bytes.len(),
            message: format!("raster truncated: {} of {need} bytes", raster.len()),
        });
    }
    let levels = if depth == 1 {
        raster[..need].iter().map(|&b| b as f64).collect()
    } else {
        raster[..need]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64)
            .collect()
    };
    Ok((width, height, levels, h.pitch_um))
}

/// Full-precision CSV text (f64 `Display` round-trips exactly).
pub fn encode_csv(image: &RingImage) -> String {
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new());
    let record = |w: &mut csv::Writer<Vec<u8>>, cells: Vec<String>| {
        w.write_record(cells).expect("in-memory CSV write")
    };
    record(
        &mut w,
        ["width", "height", "pixel_pitch_um"]
            .map(String::from)
            .to_vec(),
    );
    let dims = [
        image.width() as f64,
        image.height() as f64,
        image.pixel_pitch() * 1e6,
    ];
    record(&mut w, dims.iter().map(f64::to_string).collect());
    for row in image.pixels().chunks(image.width()) {
        record(&mut w, row.iter().map(f64::to_string).collect());
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("ASCII output")
}

/// Decode CSV text. Returns `(width, height, values, pitch_um)`.
pub fn decode_csv(text: &str) -> Result<(usize, usize, Vec<f64>, f64)> {
    let parse_err = |at: u64, message: String| Error::Parse {
        offset: at as usize,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records().map(|r| {
        r.map_err(|e| {
            let at = e.position().map_or(0, |p| p.byte());
            parse_err(at, e.to_string())
        })
    });
    let offset = |r: &csv::StringRecord| r.position().map_or(0, |p| p.byte());

    let mut first = records
        .next()
        .ok_or_else(|| parse_err(0, "empty file".into()))??;
    let header = first.iter().map(str::trim).collect::<Vec<_>>().join(",");
    if header.eq_ignore_ascii_case("width,height,pixel_pitch_um") {
        first = records
            .next()
            .ok_or_else(|| parse_err(text.len() as u64, "missing dimension line".into()))??;
    }
    let at = offset(&first);
    if first.len() != 3 {
        return Err(parse_err(
            at,
            "expected `width,height,pixel_pitch_um`".into(),
        ));
    }
    let dim = |i: usize, what: &str| {
        first[i]
            .trim()
            .parse::<usize>()
            .map_err(|_| parse_err(at, format!("bad {what} `{}`", first[i].trim())))
    };
    let (width, height) = (dim(0, "width")?, dim(1, "height")?);
    let pitch: f64 = first[2]
        .trim()
        .parse()
        .map_err(|_| parse_err(at, format!("bad pixel pitch `{}`", first[2].trim())))?;

    let mut values = Vec::with_capacity(width * height);
    let mut rows = 0;
    for record in records {
        let record = record?;
        let at = offset(&record);
        if record.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        if rows == height {
            return Err(parse_err(at, format!("more than {height} rows")));
        }
        if record.len() != width {
            let n = record.len();
            return Err(parse_err(
                at,
                format!("row {rows} has {n} values, expected {width}"),
            ));
        }
        let mut col = at;
        for cell in record.iter() {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| parse_err(col, format!("bad value `{}`", cell.trim())))?;
            if v < 0.0 {
                return Err(parse_err(col, format!("negative pixel value {v}")));
            }
            values.push(v);
            col += cell.len() as u64 + 1;
        }
        rows += 1;
    }
    if rows != height {
        return Err(parse_err(
            text.len() as u64,
            format!("{rows} rows, expected {height}"),
        ));
    }
    Ok((width, height, values, pitch))
}

pub fn write_image(image: &RingImage, path: impl AsRef<Path>, format: ImageFormat) -> Result<()> {
    match format {
        ImageFormat::Pgm16 => std::fs::write(path, encode_pgm16(image))?,
        ImageFormat::Csv => std::fs::write(path, encode_csv(image))?,
    }
    Ok(())
}

/// Read an image file. `pixel_pitch` (m) overrides the file's own value;
/// with neither, 16 µm is assumed.
pub fn ingest_image(
    path: impl AsRef<Path>,
    pixel_pitch: Option<f64>,
    format: ImageFormat,
) -> Result<RingImage> {
    let bytes = std::fs::read(path)?;
    let (w, h, px, file_pitch_um) = match format {
        ImageFormat::Pgm16 => decode_pgm(&bytes)?,
        ImageFormat::Csv => {
            let text = std::str::from_utf8(&bytes).map_err(|e| Error::Parse {
                offset: e.valid_up_to(),
                message: "file is not UTF-8".into(),
            })?;
            let (w, h, px, p) = decode_csv(text)?;
            (w, h, px, Some(p))
        }
    };
    let pitch = pixel_pitch
        .or(file_pitch_um.map(|um| um * 1e-6))
        .unwrap_or(DEFAULT_INGEST_PITCH);
    RingImage::new(w, h, px, pitch, Provenance::Ingested)
}
