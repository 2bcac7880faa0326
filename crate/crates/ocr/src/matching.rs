use park_imaging::BinaryImage;
use park_plate::{alphabet_index, ALPHABET};
use park_synth::glyphs::{GLYPH_H, GLYPH_W};

use crate::GlyphAtlas;

/// Normalized cross-correlation of two equal-size binaries with pixels mapped
/// to +1 (set) and -1 (clear). With every value at unit magnitude this is
/// `1 - 2 * hamming / n`.
pub fn ncc(a: &BinaryImage, b: &BinaryImage) -> f64 {
    assert_eq!((a.width(), a.height()), (b.width(), b.height()), "ncc needs equal sizes");
    let n = a.data().len();
    let differing = a.data().iter().zip(b.data()).filter(|(x, y)| x != y).count();
    1.0 - 2.0 * differing as f64 / n as f64
}

/// Best score of `glyph` against each character, indexed like [`ALPHABET`].
pub fn char_scores(glyph: &BinaryImage, atlas: &GlyphAtlas) -> [f64; 36] {
    let mut scores = [f64::NEG_INFINITY; 36];
    for (c, templates) in atlas.iter() {
        let i = alphabet_index(c).expect("atlas keys come from the alphabet");
        scores[i] = templates.iter().map(|t| ncc(glyph, t)).fold(f64::NEG_INFINITY, f64::max);
    }
    scores
}

/// Highest-scoring character; ties go to the earlier entry of `A-Z0-9`.
pub fn best_char(scores: &[f64; 36]) -> (char, f64) {
    let mut best = 0;
    for i in 1..36 {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    (ALPHABET[best], scores[best])
}

/// Matches a 16x32 glyph against every template.
///
/// # Panics
///
/// If the glyph is not 16x32.
pub fn match_char(glyph: &BinaryImage, atlas: &GlyphAtlas) -> (char, f64) {
    assert_eq!((glyph.width(), glyph.height()), (GLYPH_W, GLYPH_H), "glyphs are 16x32");
    best_char(&char_scores(glyph, atlas))
}
