use park_imaging::GrayImage;
use park_plate::{is_valid_plate, layout, CharKind};
use serde::{Deserialize, Serialize};

use crate::glyphs::{glyph, FontStyle, GLYPH_H, GLYPH_W};
use crate::{SplitMix64, SynthError};

/// Minimum distance between the plate edge and any glyph.
pub const MIN_MARGIN: u32 = 4;
/// Spacing used by [`PlateSpec::fitted`].
pub const DEFAULT_GAP: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlateSpec {
    pub text: String,
    pub plate_w: u32,
    pub plate_h: u32,
    pub fg: u8,
    pub bg: u8,
    pub font: FontStyle,
}

impl PlateSpec {
    /// A plate sized to its text with the default gap and minimum margins.
    pub fn fitted(text: impl Into<String>, fg: u8, bg: u8, font: FontStyle) -> Self {
        let text = text.into();
        let n = text.chars().count().max(1) as u32;
        Self {
            plate_w: 2 * MIN_MARGIN + n * GLYPH_W + (n - 1) * DEFAULT_GAP,
            plate_h: 2 * MIN_MARGIN + GLYPH_H,
            text,
            fg,
            bg,
            font,
        }
    }
}

/// Draws the plate text left to right with uniform spacing, centred on a
/// plain background. Identical specs always give identical bytes.
pub fn render_plate(spec: &PlateSpec) -> Result<GrayImage, SynthError> {
    if !is_valid_plate(&spec.text) {
        return Err(SynthError::InvalidPlateText(spec.text.clone()));
    }
    if spec.fg == spec.bg {
        return Err(SynthError::NoContrast);
    }
    let n = spec.text.chars().count() as u32;
    let inner_w = spec.plate_w.checked_sub(2 * MIN_MARGIN + n * GLYPH_W);
    let gap = inner_w.map(|room| room / (n - 1)).filter(|&g| g >= 1);
    let (Some(gap), true) = (gap, spec.plate_h >= GLYPH_H + 2 * MIN_MARGIN) else {
        return Err(SynthError::PlateTooSmall {
            width: spec.plate_w,
            height: spec.plate_h,
            chars: n,
        });
    };
    let text_w = n * GLYPH_W + (n - 1) * gap;
    let left = (spec.plate_w - text_w) / 2;
    let top = (spec.plate_h - GLYPH_H) / 2;

    let mut img = GrayImage::filled(spec.plate_w, spec.plate_h, spec.bg);
    for (i, c) in spec.text.chars().enumerate() {
        let g = glyph(c, spec.font).expect("grammar-valid text uses the glyph alphabet");
        let x0 = left + i as u32 * (GLYPH_W + gap);
        for y in 0..GLYPH_H {
            for x in 0..GLYPH_W {
                if g.get(x, y) {
                    img.set(x0 + x, top + y, spec.fg);
                }
            }
        }
    }
    Ok(img)
}

/// Draws a grammar-valid plate string: uniform letters and digits, with the
/// second letter group one or two characters long with equal probability.
pub fn random_plate_text(rng: &mut SplitMix64) -> String {
    let len = if rng.chance(0.5) { 9 } else { 10 };
    layout(len)
        .expect("9 and 10 are plate lengths")
        .iter()
        .map(|kind| match kind {
            CharKind::Letter => char::from(b'A' + rng.range_u32(0, 25) as u8),
            CharKind::Digit => char::from(b'0' + rng.range_u32(0, 9) as u8),
        })
        .collect()
}
