//! Built-in plate font.
//!
//! Every character is a 5x7 cell bitmap expanded to a 16x32 glyph. The two
//! font styles share the bitmaps and differ only in how cell columns and rows
//! are apportioned across the 16x32 box, which changes stroke weights and the
//! vertical rhythm of the glyph.

use park_imaging::BinaryImage;

pub const GLYPH_W: u32 = 16;
pub const GLYPH_H: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FontStyle {
    Standard,
    Condensed,
}

impl FontStyle {
    pub const ALL: [FontStyle; 2] = [FontStyle::Standard, FontStyle::Condensed];

    fn column_widths(self) -> [u32; 5] {
        match self {
            FontStyle::Standard => [3, 3, 4, 3, 3],
            FontStyle::Condensed => [4, 2, 4, 2, 4],
        }
    }

    fn row_heights(self) -> [u32; 7] {
        match self {
            FontStyle::Standard => [5, 4, 5, 4, 5, 4, 5],
            FontStyle::Condensed => [4, 5, 4, 6, 4, 5, 4],
        }
    }
}

/// Rows of the 5x7 bitmap, most significant of the low five bits leftmost.
pub fn cell_rows(c: char) -> Option<[u8; 7]> {
    let rows = match c {
        'A' => [0b01110, 0b10001, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001],
        'B' => [0b11110, 0b10001, 0b10001, 0b11110, 0b10001, 0b10001, 0b11110],
        'C' => [0b01110, 0b10001, 0b10000, 0b10000, 0b10000, 0b10001, 0b01110],
        'D' => [0b11100, 0b10010, 0b10001, 0b10001, 0b10001, 0b10010, 0b11100],
        'E' => [0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b11111],
        'F' => [0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b10000],
        'G' => [0b01110, 0b10001, 0b10000, 0b10111, 0b10001, 0b10001, 0b01111],
        'H' => [0b10001, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001],
        'I' => [0b01110, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110],
        'J' => [0b00111, 0b00010, 0b00010, 0b00010, 0b00010, 0b10010, 0b01100],
        'K' => [0b10001, 0b10010, 0b10100, 0b11000, 0b10100, 0b10010, 0b10001],
        'L' => [0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b11111],
        'M' => [0b10001, 0b11011, 0b10101, 0b10101, 0b10001, 0b10001, 0b10001],
        'N' => [0b10001, 0b10001, 0b11001, 0b10101, 0b10011, 0b10001, 0b10001],
        'O' => [0b01110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110],
        'P' => [0b11110, 0b10001, 0b10001, 0b11110, 0b10000, 0b10000, 0b10000],
        'Q' => [0b01110, 0b10001, 0b10001, 0b10001, 0b10101, 0b10010, 0b01101],
        'R' => [0b11110, 0b10001, 0b10001, 0b11110, 0b10100, 0b10010, 0b10001],
        'S' => [0b01111, 0b10000, 0b10000, 0b01110, 0b00001, 0b00001, 0b11110],
        'T' => [0b11111, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100],
        'U' => [0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110],
        'V' => [0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01010, 0b00100],
        'W' => [0b10001, 0b10001, 0b10001, 0b10101, 0b10101, 0b10101, 0b01010],
        'X' => [0b10001, 0b10001, 0b01010, 0b00100, 0b01010, 0b10001, 0b10001],
        'Y' => [0b10001, 0b10001, 0b10001, 0b01010, 0b00100, 0b00100, 0b00100],
        'Z' => [0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b10000, 0b11111],
        '0' => [0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110],
        '1' => [0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110],
        '2' => [0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111],
        '3' => [0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110],
        '4' => [0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010],
        '5' => [0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110],
        '6' => [0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110],
        '7' => [0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000],
        '8' => [0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110],
        '9' => [0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100],
        _ => return None,
    };
    Some(rows)
}

/// The 16x32 glyph for `c` in `style`, or `None` outside `A-Z0-9`.
pub fn glyph(c: char, style: FontStyle) -> Option<BinaryImage> {
    let rows = cell_rows(c)?;
    let col_of = spans(&style.column_widths());
    let row_of = spans(&style.row_heights());
    Some(BinaryImage::from_fn(GLYPH_W, GLYPH_H, |x, y| {
        let (cx, cy) = (col_of[x as usize], row_of[y as usize]);
        rows[cy] >> (4 - cx) & 1 == 1
    }))
}

/// Maps each output pixel to the cell index covering it.
fn spans(sizes: &[u32]) -> Vec<usize> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| std::iter::repeat_n(i, n as usize))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use park_plate::ALPHABET;

    #[test]
    fn all_characters_defined_in_both_styles() {
        for c in ALPHABET {
            for style in FontStyle::ALL {
                let g = glyph(c, style).unwrap();
                assert_eq!((g.width(), g.height()), (GLYPH_W, GLYPH_H));
                assert!(g.count_ones() > 0);
            }
        }
        assert!(glyph('a', FontStyle::Standard).is_none());
    }

    #[test]
    fn bitmaps_are_pairwise_distinct() {
        let mut seen = std::collections::HashMap::new();
        for c in ALPHABET {
            if let Some(prev) = seen.insert(cell_rows(c).unwrap(), c) {
                panic!("{prev} and {c} share a bitmap");
            }
        }
    }

    #[test]
    fn styles_differ() {
        assert_ne!(glyph('A', FontStyle::Standard), glyph('A', FontStyle::Condensed));
    }

    #[test]
    fn every_glyph_column_is_inked() {
        // Segmentation splits on empty columns; a glyph must never contain one.
        for c in ALPHABET {
            let rows = cell_rows(c).unwrap();
            let used = rows.iter().fold(0u8, |acc, r| acc | r);
            let lo = used.trailing_zeros();
            let hi = 7 - used.leading_zeros();
            for bit in lo..=hi {
                assert!(used >> bit & 1 == 1, "{c} has an empty interior column");
            }
        }
    }
}
