//! Registration-plate text rules shared by the recognizer and the back end.
//!
//! Plates follow the pattern `LLDDL{1,2}DDDD`: two letters, two digits, one or
//! two letters, four digits (for example `OD02AB1234` or `TS09F4321`).

/// The 36 recognized characters in tie-break order: letters, then digits.
pub const ALPHABET: [char; 36] = [
    'A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'J', 'K', 'L', 'M', 'N', 'O', 'P', 'Q', 'R', 'S',
    'T', 'U', 'V', 'W', 'X', 'Y', 'Z', '0', '1', '2', '3', '4', '5', '6', '7', '8', '9',
];

/// Groups of characters that are easily mistaken for one another.
pub const CONFUSION_CLASSES: [&[char]; 7] = [
    &['O', '0', 'D', 'Q'],
    &['I', '1', 'L'],
    &['B', '8'],
    &['Z', '2'],
    &['S', '5'],
    &['G', '6'],
    &['A', '4'],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharKind {
    Letter,
    Digit,
}

impl CharKind {
    pub fn of(c: char) -> Option<CharKind> {
        match c {
            'A'..='Z' => Some(CharKind::Letter),
            '0'..='9' => Some(CharKind::Digit),
            _ => None,
        }
    }

    pub fn admits(self, c: char) -> bool {
        CharKind::of(c) == Some(self)
    }
}

/// Position index of `c` in [`ALPHABET`].
pub fn alphabet_index(c: char) -> Option<usize> {
    match c {
        'A'..='Z' => Some(c as usize - 'A' as usize),
        '0'..='9' => Some(26 + c as usize - '0' as usize),
        _ => None,
    }
}

/// The confusion class containing `c`, if any.
pub fn confusion_class(c: char) -> Option<&'static [char]> {
    CONFUSION_CLASSES.iter().copied().find(|class| class.contains(&c))
}

/// Distinct characters that share a confusion class.
pub fn confusable(a: char, b: char) -> bool {
    a != b && confusion_class(a).is_some_and(|class| class.contains(&b))
}

/// Expected character kinds for a plate of `len` characters, or `None` if no
/// plate has that length.
pub fn layout(len: usize) -> Option<&'static [CharKind]> {
    use CharKind::{Digit as D, Letter as L};
    const NINE: [CharKind; 9] = [L, L, D, D, L, D, D, D, D];
    const TEN: [CharKind; 10] = [L, L, D, D, L, L, D, D, D, D];
    match len {
        9 => Some(&NINE),
        10 => Some(&TEN),
        _ => None,
    }
}

/// Whether `text` matches `^[A-Z]{2}[0-9]{2}[A-Z]{1,2}[0-9]{4}$`.
pub fn is_valid_plate(text: &str) -> bool {
    let chars: Vec<char> = text.chars().collect();
    layout(chars.len()).is_some_and(|kinds| kinds.iter().zip(&chars).all(|(k, &c)| k.admits(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grammar_examples() {
        assert!(is_valid_plate("OD02AB1234"));
        assert!(is_valid_plate("TS09F4321"));
        assert!(!is_valid_plate("od02ab1234"));
        assert!(!is_valid_plate("0D02AB1234"));
        assert!(!is_valid_plate("OD02ABC1234"));
        assert!(!is_valid_plate("OD02AB123"));
        assert!(!is_valid_plate(""));
        assert!(!is_valid_plate("TS0BFM8888"));
    }

    #[test]
    fn alphabet_order_and_index_agree() {
        for (i, &c) in ALPHABET.iter().enumerate() {
            assert_eq!(alphabet_index(c), Some(i));
        }
        assert_eq!(alphabet_index('a'), None);
    }

    #[test]
    fn classes_are_disjoint() {
        let mut seen = std::collections::HashSet::new();
        for class in CONFUSION_CLASSES {
            for &c in class {
                assert!(seen.insert(c), "{c} in two classes");
            }
        }
        assert!(confusable('B', '8'));
        assert!(!confusable('B', 'B'));
        assert!(!confusable('B', 'C'));
    }

    proptest! {
        #[test]
        fn grammar_matches_regex_definition(s in "[A-Z0-9]{8,11}") {
            let b = s.as_bytes();
            let letters = |r: std::ops::Range<usize>| b[r].iter().all(u8::is_ascii_uppercase);
            let digits = |r: std::ops::Range<usize>| b[r].iter().all(u8::is_ascii_digit);
            let expect = match b.len() {
                9 => letters(0..2) && digits(2..4) && letters(4..5) && digits(5..9),
                10 => letters(0..2) && digits(2..4) && letters(4..6) && digits(6..10),
                _ => false,
            };
            prop_assert_eq!(is_valid_plate(&s), expect);
        }
    }
}
