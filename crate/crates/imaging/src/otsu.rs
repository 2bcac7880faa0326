use crate::{BinaryImage, GrayImage, ImagingError};

/// 256-bin intensity histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram(pub [u64; 256]);

impl Histogram {
    pub fn of(img: &GrayImage) -> Self {
        let mut bins = [0u64; 256];
        for &v in img.data() {
            bins[v as usize] += 1;
        }
        Self(bins)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

/// Binarizes with the workspace convention: 1 iff intensity > `t`.
pub fn threshold(img: &GrayImage, t: u8) -> BinaryImage {
    let data = img.data().iter().map(|&v| (v > t) as u8).collect();
    BinaryImage::new(img.width(), img.height(), data).expect("values are 0 or 1")
}

/// Otsu's threshold together with the binarized image.
///
/// The threshold `t` splits pixels into `{<= t}` and `{> t}` and maximizes the
/// between-class variance; among equal maxima the smallest `t` wins.
pub fn otsu_threshold(img: &GrayImage) -> Result<(u8, BinaryImage), ImagingError> {
    let t = otsu_threshold_histogram(&Histogram::of(img))?;
    Ok((t, threshold(img, t)))
}

/// Otsu's threshold over a histogram, computed in exact integer arithmetic.
///
/// With `N` pixels of total intensity `S`, and `n0`, `s0` the count and sum of
/// the lower class, the between-class variance is proportional to
/// `(N*s0 - n0*S)^2 / (n0 * (N - n0))`. Candidates are compared by
/// cross-multiplication so that ties are detected exactly.
pub fn otsu_threshold_histogram(hist: &Histogram) -> Result<u8, ImagingError> {
    let total = hist.total();
    if total == 0 {
        return Err(ImagingError::EmptyImage);
    }
    assert!(total < 1 << 32, "histogram too large for exact comparison");
    if hist.0.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(ImagingError::DegenerateHistogram);
    }
    let n = total as u128;
    let sum: u128 = hist.0.iter().enumerate().map(|(i, &c)| i as u128 * c as u128).sum();

    let mut best: Option<(u8, Score)> = None;
    let (mut n0, mut s0) = (0u128, 0u128);
    for (t, &count) in hist.0.iter().enumerate() {
        n0 += count as u128;
        s0 += t as u128 * count as u128;
        if n0 == 0 {
            continue;
        }
        let n1 = n - n0;
        if n1 == 0 {
            break;
        }
        let score = Score {
            dev: (n * s0).abs_diff(n0 * sum),
            weight: (n0 * n1) as u64,
        };
        match &best {
            Some((_, b)) if !score.beats(b) => {}
            _ => best = Some((t as u8, score)),
        }
    }
    Ok(best.expect("two distinct intensities give a valid split").0)
}

/// Between-class variance as the exact fraction `dev^2 / weight`.
#[derive(Debug, Clone, Copy)]
struct Score {
    dev: u128,
    weight: u64,
}

impl Score {
    /// Strictly greater, so the first maximum is kept.
    fn beats(&self, other: &Score) -> bool {
        let lhs = mul_wide_u64(square(self.dev), other.weight);
        let rhs = mul_wide_u64(square(other.dev), self.weight);
        lhs.iter().rev().cmp(rhs.iter().rev()) == std::cmp::Ordering::Greater
    }
}

/// Little-endian 64-bit limbs of `v * v`.
fn square(v: u128) -> [u64; 4] {
    let limbs = [v as u64, (v >> 64) as u64];
    let mut out = [0u64; 4];
    for (i, &a) in limbs.iter().enumerate() {
        let mut carry = 0u128;
        for (j, &b) in limbs.iter().enumerate() {
            let cur = out[i + j] as u128 + a as u128 * b as u128 + carry;
            out[i + j] = cur as u64;
            carry = cur >> 64;
        }
        out[i + 2] = carry as u64;
    }
    out
}

fn mul_wide_u64(a: [u64; 4], b: u64) -> [u64; 5] {
    let mut out = [0u64; 5];
    let mut carry = 0u128;
    for (i, &limb) in a.iter().enumerate() {
        let cur = limb as u128 * b as u128 + carry;
        out[i] = cur as u64;
        carry = cur >> 64;
    }
    out[4] = carry as u64;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_black_half_white() {
        let img = GrayImage::from_fn(8, 8, |x, _| if x < 4 { 0 } else { 255 });
        let (t, bin) = otsu_threshold(&img).unwrap();
        assert_eq!(t, 0);
        assert_eq!(bin.count_ones(), 32);
        assert!(bin.get(4, 0) && !bin.get(3, 0));
    }

    #[test]
    fn uniform_image_is_degenerate() {
        let img = GrayImage::filled(5, 5, 128);
        assert!(matches!(otsu_threshold(&img), Err(ImagingError::DegenerateHistogram)));
    }

    #[test]
    fn two_clusters_split_between_them() {
        let img = GrayImage::from_fn(10, 10, |x, y| if (x + y) % 3 == 0 { 200 + (x as u8 % 5) } else { 30 + (y as u8 % 4) });
        let (t, _) = otsu_threshold(&img).unwrap();
        assert!((33..200).contains(&t), "t = {t}");
    }

    #[test]
    fn square_matches_u128_for_small_values() {
        let v: u128 = 0xdead_beef_1234;
        let sq = square(v);
        let expect = v * v;
        assert_eq!(sq[0], expect as u64);
        assert_eq!(sq[1], (expect >> 64) as u64);
        assert_eq!(sq[2], 0);
        let big = u128::MAX;
        // (2^128 - 1)^2 = 2^256 - 2^129 + 1
        assert_eq!(square(big), [1, 0, u64::MAX - 1, u64::MAX]);
    }
}
