use park_imaging::{resize_nearest, BinaryImage, Rect};
use park_plate::ALPHABET;
use park_synth::glyphs::{glyph, FontStyle, GLYPH_H, GLYPH_W};

/// Reference templates, one per font style for every character, in
/// [`ALPHABET`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct GlyphAtlas {
    entries: Vec<(char, Vec<BinaryImage>)>,
}

impl GlyphAtlas {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn templates(&self, c: char) -> Option<&[BinaryImage]> {
        self.entries.iter().find(|(k, _)| *k == c).map(|(_, t)| t.as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (char, &[BinaryImage])> {
        self.entries.iter().map(|(c, t)| (*c, t.as_slice()))
    }
}

/// Builds the atlas from the plate font.
///
/// Templates are normalized the same way segmented characters are: the tight
/// ink box is cut out and resampled nearest-neighbour to 16x32, so narrow
/// glyphs such as `I` and `1` fill the template just as they fill a segmented
/// box.
pub fn build_atlas() -> GlyphAtlas {
    let entries = ALPHABET
        .iter()
        .map(|&c| {
            let templates = FontStyle::ALL
                .iter()
                .map(|&style| normalize_glyph(&glyph(c, style).expect("alphabet glyphs exist")))
                .collect();
            (c, templates)
        })
        .collect();
    GlyphAtlas { entries }
}

/// Tight bounding box of the set pixels, if any.
pub fn ink_bounds(bin: &BinaryImage) -> Option<Rect> {
    let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0, 0);
    for y in 0..bin.height() {
        for x in 0..bin.width() {
            if bin.get(x, y) {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
        }
    }
    (x0 != u32::MAX).then(|| Rect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1))
}

/// Crops `r` out of a binary image.
pub(crate) fn crop_binary(bin: &BinaryImage, r: Rect) -> BinaryImage {
    BinaryImage::from_fn(r.w, r.h, |x, y| bin.get(r.x + x, r.y + y))
}

/// Crops to the ink and resamples to the template size. An empty input stays
/// empty.
pub fn normalize_glyph(bin: &BinaryImage) -> BinaryImage {
    match ink_bounds(bin) {
        Some(r) => resize_nearest(&crop_binary(bin, r), GLYPH_W, GLYPH_H),
        None => BinaryImage::zeros(GLYPH_W, GLYPH_H),
    }
}
