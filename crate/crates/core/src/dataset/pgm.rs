//! Netpbm graymap (PGM) reading and writing, plain (`P2`) and raw (`P5`).
//!
//! Samples are rescaled to `[0, 255]`; 16-bit raw samples are big-endian.

use std::path::Path;

use crate::error::{Error, Result};
use crate::image::GrayImage;

struct Header {
    binary: bool,
    width: usize,
    height: usize,
    maxval: u32,
    /// Offset of the first pixel byte (raw) or first sample token (plain).
    data_start: usize,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::format(start, format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::format(start, format!("{what} out of range")))
    }
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        Some(m) => {
            return Err(Error::format(
                0,
                format!("unsupported magic {:?}, expected P2 or P5", String::from_utf8_lossy(m)),
            ))
        }
        None => return Err(Error::format(0, "file too short for a PGM magic number")),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::format(2, format!("degenerate size {width}x{height}")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::format(maxval_at, format!("maxval {maxval} not in 1..=65535")));
    }
    match bytes.get(cur.pos) {
        Some(c) if c.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(Error::format(cur.pos, "expected whitespace after maxval")),
    }
    Ok(Header {
        binary,
        width: width as usize,
        height: height as usize,
        maxval,
        data_start: cur.pos,
    })
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let h = parse_header(bytes)?;
    let n = h.width * h.height;
    let scale = 255.0 / h.maxval as f64;
    let mut samples = Vec::with_capacity(n);
    if h.binary {
        let bpp = if h.maxval > 255 { 2 } else { 1 };
        let data = &bytes[h.data_start..];
        if data.len() < n * bpp {
            return Err(Error::format(
                h.data_start + data.len(),
                format!(
                    "pixel data truncated: expected {} bytes, found {} ({} missing)",
                    n * bpp,
                    data.len(),
                    n * bpp - data.len()
                ),
            ));
        }
        for i in 0..n {
            let v = if bpp == 2 {
                u16::from_be_bytes([data[2 * i], data[2 * i + 1]]) as u32
            } else {
                data[i] as u32
            };
            samples.push((i, v));
        }
    } else {
        let mut cur = Cursor {
            bytes,
            pos: h.data_start,
        };
        for i in 0..n {
            cur.skip_space_and_comments();
            if cur.pos >= bytes.len() {
                return Err(Error::format(
                    cur.pos,
                    format!("pixel data truncated: expected {n} samples, found {i}"),
                ));
            }
            samples.push((i, cur.number("sample")?));
        }
    }
    let mut pixels = Vec::with_capacity(n);
    for (i, v) in samples {
        if v > h.maxval {
            return Err(Error::format(h.data_start, format!("sample {i} = {v} exceeds maxval {}", h.maxval)));
        }
        pixels.push(if h.maxval == 255 { v as f64 } else { v as f64 * scale });
    }
    GrayImage::new(h.width, h.height, pixels)
}

/// Raw 8-bit PGM; intensities are rounded and clamped to `0..=255`.
pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(image.pixels().iter().map(|&p| p.round().clamp(0.0, 255.0) as u8));
    out
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(&bytes)
}

pub fn write_pgm(path: impl AsRef<Path>, image: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_pgm(image)).map_err(|e| Error::io(path, e))
}
