use park_plate::confusable;
use serde::{Deserialize, Serialize};

/// Edit costs are kept in half-units so lookalike substitutions stay integral.
pub const LOOKALIKE_SUB: u32 = 1;
pub const OTHER_SUB: u32 = 2;
pub const INDEL: u32 = 2;
/// Largest accepted fuzzy cost (1.0).
pub const MAX_FUZZY: u32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum MatchResult {
    Exact { plate: String },
    Fuzzy { plate: String, cost: f64 },
    NoMatch,
    /// Several registered plates tie for the lowest acceptable cost.
    Ambiguous { candidates: Vec<String>, cost: f64 },
}

impl MatchResult {
    pub fn matched_plate(&self) -> Option<&str> {
        match self {
            MatchResult::Exact { plate } | MatchResult::Fuzzy { plate, .. } => Some(plate),
            _ => None,
        }
    }
}

pub fn substitution_cost(a: char, b: char) -> u32 {
    if a == b {
        0
    } else if confusable(a, b) {
        LOOKALIKE_SUB
    } else {
        OTHER_SUB
    }
}

/// Confusion-weighted edit distance in half-units.
pub fn edit_cost(a: &str, b: &str) -> u32 {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<u32> = (0..=b.len() as u32).map(|j| j * INDEL).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut cur = vec![(i as u32 + 1) * INDEL; b.len() + 1];
        for (j, &cb) in b.iter().enumerate() {
            cur[j + 1] = (prev[j] + substitution_cost(ca, cb))
                .min(prev[j + 1] + INDEL)
                .min(cur[j] + INDEL);
        }
        prev = cur;
    }
    prev[b.len()]
}

/// Matches a reading against the registered plates.
///
/// Exact equality wins outright. Otherwise the plate with the unique lowest
/// weighted edit distance is accepted if that distance is at most 1.0; a tie
/// at the lowest distance is ambiguous.
pub fn match_plate<'a>(reading: &str, registry: impl IntoIterator<Item = &'a str>) -> MatchResult {
    let mut best = u32::MAX;
    let mut at_best: Vec<&str> = Vec::new();
    for plate in registry {
        if plate == reading {
            return MatchResult::Exact { plate: plate.to_owned() };
        }
        let cost = edit_cost(reading, plate);
        if cost < best {
            best = cost;
            at_best.clear();
        }
        if cost == best {
            at_best.push(plate);
        }
    }
    if best > MAX_FUZZY {
        return MatchResult::NoMatch;
    }
    let cost = best as f64 / 2.0;
    if at_best.len() == 1 {
        MatchResult::Fuzzy { plate: at_best[0].to_owned(), cost }
    } else {
        at_best.sort_unstable();
        MatchResult::Ambiguous {
            candidates: at_best.into_iter().map(str::to_owned).collect(),
            cost,
        }
    }
}
