use std::fmt;
use std::time::Instant;

use park_anpr::NormalizedPlate;
use park_plate::{alphabet_index, confusion_class, is_valid_plate, layout, ALPHABET};
use serde::{Deserialize, Serialize};

use crate::matching::{best_char, char_scores};
use crate::{segment_characters, GlyphAtlas, OcrError};

/// Characters scoring below this are reported as low confidence.
pub const LOW_CONFIDENCE: f64 = 0.55;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadingFlags {
    pub low_confidence: bool,
    pub grammar_corrected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateReading {
    pub text: String,
    /// Template score of each character of `text`, in [-1, 1].
    pub char_confidences: Vec<f64>,
    pub elapsed_seconds: f64,
    pub flags: ReadingFlags,
}

impl PlateReading {
    pub fn min_confidence(&self) -> f64 {
        self.char_confidences.iter().copied().fold(1.0, f64::min)
    }
}

/// Terminal format: a `time:` line followed by the plate text.
impl fmt::Display for PlateReading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "time: {}\n{}", self.elapsed_seconds, self.text)
    }
}

/// Repairs a read that breaks the plate grammar.
///
/// Every character whose kind does not fit its position is replaced by the
/// best-scoring member of its confusion class that does fit. Characters that
/// already fit, or that have no fitting lookalike, are left alone, and the
/// length never changes. Returns the text and whether anything changed.
pub fn correct_grammar(raw: &str, scores: &[[f64; 36]]) -> (String, bool) {
    let chars: Vec<char> = raw.chars().collect();
    assert_eq!(chars.len(), scores.len(), "one score row per character");
    let Some(kinds) = layout(chars.len()) else {
        return (raw.to_owned(), false);
    };
    if is_valid_plate(raw) {
        return (raw.to_owned(), false);
    }
    let mut changed = false;
    let fixed = chars
        .iter()
        .zip(kinds)
        .zip(scores)
        .map(|((&c, kind), row)| {
            if kind.admits(c) {
                return c;
            }
            let mut candidates: Vec<char> = confusion_class(c)
                .unwrap_or(&[])
                .iter()
                .copied()
                .filter(|&k| kind.admits(k))
                .collect();
            candidates.sort_by_key(|&k| alphabet_index(k));
            let best = candidates.into_iter().fold(None::<char>, |best, k| match best {
                Some(b) if row[alphabet_index(b).unwrap()] >= row[alphabet_index(k).unwrap()] => Some(b),
                _ => Some(k),
            });
            match best {
                Some(k) => {
                    changed = true;
                    k
                }
                None => c,
            }
        })
        .collect();
    (fixed, changed)
}

pub fn recognize_plate(plate: &NormalizedPlate, atlas: &GlyphAtlas) -> Result<PlateReading, OcrError> {
    recognize_plate_with(plate, atlas, LOW_CONFIDENCE)
}

/// Segments, matches each character, and applies grammar correction.
/// `elapsed_seconds` covers the whole call.
pub fn recognize_plate_with(plate: &NormalizedPlate, atlas: &GlyphAtlas, low_confidence: f64) -> Result<PlateReading, OcrError> {
    let start = Instant::now();
    let boxes = segment_characters(plate)?;
    let scores: Vec<[f64; 36]> = boxes.iter().map(|b| char_scores(&b.glyph, atlas)).collect();
    let raw: String = scores.iter().map(|s| best_char(s).0).collect();
    let (text, grammar_corrected) = correct_grammar(&raw, &scores);
    let char_confidences: Vec<f64> = text
        .chars()
        .zip(&scores)
        .map(|(c, row)| row[alphabet_index(c).expect("matched characters are in the alphabet")])
        .collect();
    let flags = ReadingFlags {
        low_confidence: char_confidences.iter().any(|&s| s < low_confidence),
        grammar_corrected,
    };
    debug_assert!(text.chars().all(|c| ALPHABET.contains(&c)));
    Ok(PlateReading {
        text,
        char_confidences,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        flags,
    })
}
