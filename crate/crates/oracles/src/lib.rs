//! Slow, obviously-correct reference implementations.
//!
//! Nothing here shares code with the crates under test; each function works
//! from the textbook definition on plain data so it can be used to freeze and
//! cross-check expected values.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exhaustive Otsu: for every `t` in 0..=255 compute
/// `w0 * w1 * (mu0 - mu1)^2` exactly from the raw pixels, with classes
/// `{<= t}` and `{> t}`. Returns the smallest maximizing `t`, or `None` when
/// no threshold separates two non-empty classes.
pub fn otsu_exhaustive(pixels: &[u8]) -> Option<u8> {
    let n = BigInt::from(pixels.len());
    let mut best: Option<(u8, BigRational)> = None;
    for t in 0..=255u8 {
        let (lower, upper): (Vec<u8>, Vec<u8>) = pixels.iter().partition(|&&p| p <= t);
        if lower.is_empty() || upper.is_empty() {
            continue;
        }
        let mean = |class: &[u8]| {
            let sum: BigInt = class.iter().map(|&p| BigInt::from(p)).sum();
            BigRational::new(sum, BigInt::from(class.len()))
        };
        let w0 = BigRational::new(BigInt::from(lower.len()), n.clone());
        let w1 = BigRational::new(BigInt::from(upper.len()), n.clone());
        let diff = mean(&lower) - mean(&upper);
        let var = w0 * w1 * diff.clone() * diff;
        if best.as_ref().is_none_or(|(_, b)| var > *b) {
            best = Some((t, var));
        }
    }
    best.map(|(t, _)| t)
}

/// Breadth-first 8-connected flood fill over a row-major 0/1 grid. Labels
/// start at 1 and are assigned when the raster scan meets an unlabelled pixel.
pub fn flood_fill_labels(width: usize, height: usize, bits: &[u8]) -> (Vec<u32>, u32) {
    let mut labels = vec![0u32; width * height];
    let mut next = 0u32;
    for start in 0..bits.len() {
        if bits[start] == 0 || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % width) as i64, (i / width) as i64);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                        continue;
                    }
                    let j = ny as usize * width + nx as usize;
                    if bits[j] == 1 && labels[j] == 0 {
                        labels[j] = next;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    (labels, next)
}

/// Parking fee by walking the stay minute by minute.
///
/// Minutes up to `grace_min` are free as long as the stay ends within grace.
/// Otherwise the first minute opens the base period (charged `base_price`), and
/// every minute that starts a new `block_min`-long block after the base period
/// adds `block_price`.
pub fn fee_per_minute(duration_min: u64, grace_min: u64, base_min: u64, base_price: u64, block_min: u64, block_price: u64) -> u64 {
    if duration_min <= grace_min {
        return 0;
    }
    let mut fee = 0;
    let mut minutes_into_block = 0;
    for minute in 1..=duration_min {
        if minute == 1 {
            fee += base_price;
        } else if minute > base_min {
            if minutes_into_block == 0 {
                fee += block_price;
            }
            minutes_into_block = (minutes_into_block + 1) % block_min;
        }
    }
    fee
}

/// Minimum alignment cost by exhaustive recursion over every alignment of
/// `a` against `b` (no memoisation). Costs are in half-units so they stay
/// integral: `sub(x, y)` for a substitution, 2 for an insertion or deletion.
pub fn edit_cost_brute_force(a: &[char], b: &[char], sub: &dyn Fn(char, char) -> u32) -> u32 {
    match (a.split_first(), b.split_first()) {
        (None, None) => 0,
        (None, Some(_)) => 2 * b.len() as u32,
        (Some(_), None) => 2 * a.len() as u32,
        (Some((&ca, ra)), Some((&cb, rb))) => {
            let replace = sub(ca, cb) + edit_cost_brute_force(ra, rb, sub);
            let delete = 2 + edit_cost_brute_force(ra, b, sub);
            let insert = 2 + edit_cost_brute_force(a, rb, sub);
            replace.min(delete).min(insert)
        }
    }
}

/// Like [`edit_cost_brute_force`] but abandons any alignment whose running
/// cost exceeds `budget`, so long strings stay tractable when only small
/// costs matter. Returns `None` when every alignment costs more than `budget`.
pub fn edit_cost_within(a: &[char], b: &[char], sub: &dyn Fn(char, char) -> u32, budget: u32) -> Option<u32> {
    let floor = 2 * a.len().abs_diff(b.len()) as u32;
    if floor > budget {
        return None;
    }
    match (a.split_first(), b.split_first()) {
        (None, None) => Some(0),
        (None, Some(_)) | (Some(_), None) => Some(floor),
        (Some((&ca, ra)), Some((&cb, rb))) => {
            let mut best: Option<u32> = None;
            let s = sub(ca, cb);
            let options = [(s, ra, rb), (2, ra, b), (2, a, rb)];
            for (step, x, y) in options {
                if step > budget {
                    continue;
                }
                if let Some(rest) = edit_cost_within(x, y, sub, budget - step) {
                    best = Some(best.map_or(step + rest, |b| b.min(step + rest)));
                }
            }
            best
        }
    }
}

/// Two labellings describe the same partition of the pixels.
pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    use std::collections::HashMap;
    if a.len() != b.len() {
        return false;
    }
    let mut fwd = HashMap::new();
    let mut back = HashMap::new();
    a.iter().zip(b).all(|(&x, &y)| {
        (x == 0) == (y == 0) && *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x
    })
}
