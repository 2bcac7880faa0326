use crate::{BinaryImage, GrayImage};

/// Bilinear sample at continuous coordinates where integer positions are
/// pixel centres. Coordinates outside the image are clamped to the border.
pub fn sample_bilinear(img: &GrayImage, fx: f64, fy: f64) -> f64 {
    let max_x = (img.width() - 1) as f64;
    let max_y = (img.height() - 1) as f64;
    let fx = fx.clamp(0.0, max_x);
    let fy = fy.clamp(0.0, max_y);
    let x0 = fx.floor();
    let y0 = fy.floor();
    let tx = fx - x0;
    let ty = fy - y0;
    let (x0, y0) = (x0 as u32, y0 as u32);
    let x1 = (x0 + 1).min(img.width() - 1);
    let y1 = (y0 + 1).min(img.height() - 1);
    let p = |x, y| img.get(x, y) as f64;
    let top = p(x0, y0) * (1.0 - tx) + p(x1, y0) * tx;
    let bottom = p(x0, y1) * (1.0 - tx) + p(x1, y1) * tx;
    top * (1.0 - ty) + bottom * ty
}

pub fn resize_bilinear(img: &GrayImage, width: u32, height: u32) -> GrayImage {
    let sx = img.width() as f64 / width as f64;
    let sy = img.height() as f64 / height as f64;
    GrayImage::from_fn(width, height, |x, y| {
        let fx = (x as f64 + 0.5) * sx - 0.5;
        let fy = (y as f64 + 0.5) * sy - 0.5;
        sample_bilinear(img, fx, fy).round() as u8
    })
}

/// Nearest-neighbour resize of a binary image; output stays strictly binary.
pub fn resize_nearest(bin: &BinaryImage, width: u32, height: u32) -> BinaryImage {
    let sx = bin.width() as f64 / width as f64;
    let sy = bin.height() as f64 / height as f64;
    BinaryImage::from_fn(width, height, |x, y| {
        let src_x = (((x as f64 + 0.5) * sx) as u32).min(bin.width() - 1);
        let src_y = (((y as f64 + 0.5) * sy) as u32).min(bin.height() - 1);
        bin.get(src_x, src_y)
    })
}

/// Linear stretch so the darkest pixel becomes 0 and the brightest 255.
/// Returns `None` for a constant image.
pub fn contrast_stretch(img: &GrayImage) -> Option<GrayImage> {
    let (lo, hi) = img.min_max();
    if lo == hi {
        return None;
    }
    let range = (hi - lo) as u32;
    let data = img
        .data()
        .iter()
        .map(|&v| (((v - lo) as u32 * 255 + range / 2) / range) as u8)
        .collect();
    Some(GrayImage::new(img.width(), img.height(), data).expect("same dimensions"))
}
