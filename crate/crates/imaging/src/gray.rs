use crate::{GrayImage, Image};

/// Integer luma, `round(0.299 R + 0.587 G + 0.114 B)` with halves rounded up.
#[inline]
fn luma(r: u8, g: u8, b: u8) -> u8 {
    // Weights scaled by 1000 so the rounding is exact.
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

/// Converts to a single luma channel. Single-channel input is copied verbatim.
pub fn to_grayscale(img: &Image) -> GrayImage {
    let data = match img.channels() {
        1 => img.data().to_vec(),
        _ => img
            .data()
            .chunks_exact(3)
            .map(|px| luma(px[0], px[1], px[2]))
            .collect(),
    };
    GrayImage::new(img.width(), img.height(), data).expect("dimensions come from a valid image")
}

/// 3x3 Sobel gradient magnitude, `|gx| + |gy|` clamped to 255.
///
/// Out-of-range neighbours replicate the nearest edge pixel, so a constant
/// image yields an all-zero gradient.
pub fn sobel_magnitude(img: &GrayImage) -> GrayImage {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let src = img.data();
    let at = |x: i64, y: i64| -> i32 {
        let x = x.clamp(0, w - 1);
        let y = y.clamp(0, h - 1);
        src[(y * w + x) as usize] as i32
    };
    let mut out = vec![0u8; src.len()];
    for y in 0..h {
        let interior_y = y > 0 && y < h - 1;
        for x in 0..w {
            let (gx, gy) = if interior_y && x > 0 && x < w - 1 {
                let row = |dy: i64| {
                    let base = ((y + dy) * w + x) as usize;
                    (src[base - 1] as i32, src[base] as i32, src[base + 1] as i32)
                };
                let (a, b, c) = row(-1);
                let (d, _, f) = row(0);
                let (g, hh, i) = row(1);
                ((c + 2 * f + i) - (a + 2 * d + g), (g + 2 * hh + i) - (a + 2 * b + c))
            } else {
                let gx = (at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1))
                    - (at(x - 1, y - 1) + 2 * at(x - 1, y) + at(x - 1, y + 1));
                let gy = (at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1))
                    - (at(x - 1, y - 1) + 2 * at(x, y - 1) + at(x + 1, y - 1));
                (gx, gy)
            };
            out[(y * w + x) as usize] = (gx.abs() + gy.abs()).min(255) as u8;
        }
    }
    GrayImage::new(img.width(), img.height(), out).expect("same dimensions as input")
}

/// 3x3 binomial smoothing (`[1 2 1]` in each direction, divided by 16 and
/// rounded half up), with edge replication.
pub fn smooth_3x3(img: &GrayImage) -> GrayImage {
    let (w, h) = (img.width() as i64, img.height() as i64);
    // Horizontal pass keeps 4x-scaled sums so the final rounding is exact.
    let mut rows = vec![0u16; img.data().len()];
    for y in 0..h {
        for x in 0..w {
            let p = |dx: i64| img.get_clamped(x + dx, y) as u16;
            rows[(y * w + x) as usize] = p(-1) + 2 * p(0) + p(1);
        }
    }
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let (x, y) = (x as i64, y as i64);
        let r = |dy: i64| rows[((y + dy).clamp(0, h - 1) * w + x) as usize] as u32;
        ((r(-1) + 2 * r(0) + r(1) + 8) / 16) as u8
    })
}
