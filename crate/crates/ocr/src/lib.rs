//! Plate reading by template matching.
//!
//! A [`NormalizedPlate`](park_anpr::NormalizedPlate) is binarized and cut into
//! characters ([`segment_characters`]); each 16x32 character is scored against
//! every template of the [`GlyphAtlas`] with a +/-1 normalized
//! cross-correlation ([`match_char`]), and [`recognize_plate`] repairs reads
//! that break the plate grammar using lookalike classes.

mod atlas;
mod confusion;
mod matching;
mod recognize;
mod segment;

pub use atlas::{build_atlas, ink_bounds, normalize_glyph, GlyphAtlas};
pub use confusion::{confusion_matrix, ConfusionMatrix};
pub use matching::{best_char, char_scores, match_char, ncc};
pub use recognize::{correct_grammar, recognize_plate, recognize_plate_with, PlateReading, ReadingFlags, LOW_CONFIDENCE};
pub use segment::{ink_mask, segment_characters, CharBox, MIN_BOX_WIDTH, MIN_GAP_COLUMNS, MIN_HEIGHT_FRACTION};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OcrError {
    #[error("no characters found on the plate")]
    NoCharacters,
}
