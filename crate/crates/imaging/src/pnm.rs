//! Binary PGM (`P5`) and PPM (`P6`) with maxval 255.
//!
//! Writers emit `P5 <w> <h> 255\n` (or `P6`) followed by the raw bytes, so a
//! write/read round trip is byte-exact. Readers accept any whitespace between
//! header tokens, `#` comments, and exactly one whitespace byte before the body.

use std::fs;
use std::path::Path;

use crate::{Image, ImagingError};

pub fn encode_pnm(img: &Image) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic} {} {} 255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self, what: &str) -> Result<&'a [u8], ImagingError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ImagingError::MalformedHeader(format!("missing {what}")));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u32, ImagingError> {
        let tok = self.token(what)?;
        std::str::from_utf8(tok)
            .ok()
            .filter(|s| s.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                ImagingError::MalformedHeader(format!("{what} is not a number: {:?}", String::from_utf8_lossy(tok)))
            })
    }
}

pub fn decode_pnm(bytes: &[u8]) -> Result<Image, ImagingError> {
    let mut cur = Cursor { bytes, pos: 0 };
    let channels = match cur.token("magic number")? {
        b"P5" => 1u8,
        b"P6" => 3u8,
        other => {
            return Err(ImagingError::MalformedHeader(format!(
                "unsupported magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(ImagingError::MalformedHeader("zero dimension".into()));
    }
    if maxval != 255 {
        return Err(ImagingError::UnsupportedMaxval(maxval));
    }
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(ImagingError::MalformedHeader("missing whitespace after maxval".into())),
    }
    let expected = width as usize * height as usize * channels as usize;
    let body = &bytes[cur.pos..];
    if body.len() < expected {
        return Err(ImagingError::TruncatedData {
            expected,
            actual: body.len(),
        });
    }
    Image::new(width, height, channels, body[..expected].to_vec())
}

pub fn read_image(path: impl AsRef<Path>) -> Result<Image, ImagingError> {
    decode_pnm(&fs::read(path)?)
}

pub fn write_image(img: &Image, path: impl AsRef<Path>) -> Result<(), ImagingError> {
    fs::write(path, encode_pnm(img))?;
    Ok(())
}
