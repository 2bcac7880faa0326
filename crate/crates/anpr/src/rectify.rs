use park_imaging::{contrast_stretch, sample_bilinear, to_grayscale, GrayImage, Image, Rect};

use crate::detect::{plate_masks, Detection};
use crate::skew::{fit_skew_deg, unrotated_size};
use crate::AnprError;

pub const PLATE_W: u32 = 256;
pub const PLATE_H: u32 = 64;
pub const CROP_MARGIN: u32 = 4;

/// A deskewed plate crop resampled to exactly 256x64 and contrast-stretched.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedPlate {
    image: GrayImage,
    pub source: Detection,
}

impl NormalizedPlate {
    pub fn image(&self) -> &GrayImage {
        &self.image
    }

    /// Resizes an already-cropped plate image (no deskew) to the normalized
    /// size. Used for plate images that did not come from a scene.
    pub fn from_plate_image(plate: &GrayImage) -> Result<Self, AnprError> {
        let resized = park_imaging::resize_bilinear(plate, PLATE_W, PLATE_H);
        let image = contrast_stretch(&resized).ok_or(AnprError::DegenerateCrop)?;
        Ok(Self {
            image,
            source: Detection {
                bbox: Rect::new(0, 0, plate.width(), plate.height()),
                angle: 0.0,
                score: 1.0,
            },
        })
    }

    /// Wraps an existing 256x64 image without any processing.
    pub fn from_normalized(image: GrayImage, source: Detection) -> Result<Self, AnprError> {
        if (image.width(), image.height()) != (PLATE_W, PLATE_H) {
            return Err(AnprError::NotNormalized(image.width(), image.height()));
        }
        Ok(Self { image, source })
    }
}

fn expand(b: Rect, margin: u32, width: u32, height: u32) -> Rect {
    let x0 = b.x.saturating_sub(margin);
    let y0 = b.y.saturating_sub(margin);
    let x1 = (b.right() + margin).min(width);
    let y1 = (b.bottom() + margin).min(height);
    Rect::new(x0, y0, x1 - x0, y1 - y0)
}

/// Skew of the dominant edge blob inside `crop`, in degrees.
///
/// When the plate border has little contrast with the scene, the closed edges
/// fall apart into one blob per group of characters; blobs of similar height
/// sharing the dominant blob's rows are fitted together with it.
pub fn estimate_skew(crop: &GrayImage) -> Result<f64, AnprError> {
    let Some(masks) = plate_masks(crop, (9, 3))? else {
        return Ok(0.0);
    };
    let stats = masks.labels.stats();
    let Some(largest) = stats.iter().max_by_key(|s| (s.area, std::cmp::Reverse(s.label))) else {
        return Ok(0.0);
    };
    let lb = largest.bbox;
    let mut line = vec![false; masks.labels.component_count() as usize + 1];
    let mut bbox = lb;
    for s in &stats {
        let b = s.bbox;
        let overlap = b.bottom().min(lb.bottom()).saturating_sub(b.y.max(lb.y));
        if 2 * b.h >= lb.h && 2 * overlap >= b.h.min(lb.h) {
            line[s.label as usize] = true;
            let (x0, y0) = (bbox.x.min(b.x), bbox.y.min(b.y));
            bbox = Rect::new(x0, y0, bbox.right().max(b.right()) - x0, bbox.bottom().max(b.bottom()) - y0);
        }
    }
    Ok(fit_skew_deg(bbox, |x, y| line[masks.labels.label_at(x, y) as usize]).unwrap_or(0.0))
}

/// Crops the detection (plus a 4 px margin), undoes its skew and resamples the
/// plate to 256x64 with a linear contrast stretch.
///
/// The skew is re-estimated from the crop by a line fit through the column
/// centroids of its dominant edge blob. Rotation and resizing are done in one
/// bilinear resampling pass over the source image, and the sampling window is
/// the de-rotated plate rectangle recovered from the box, so the corners of a
/// tilted plate's bounding box do not squash the characters.
pub fn rectify_and_normalize(img: &Image, det: &Detection) -> Result<NormalizedPlate, AnprError> {
    let b = det.bbox;
    if b.w == 0 || b.h == 0 || !b.fits_within(img.width(), img.height()) {
        return Err(AnprError::BoxOutOfBounds(b));
    }
    let gray = to_grayscale(img);
    let crop = gray.crop(expand(b, CROP_MARGIN, gray.width(), gray.height()))?;
    let (lo, hi) = crop.min_max();
    if lo == hi {
        return Err(AnprError::DegenerateCrop);
    }
    let angle = estimate_skew(&crop)?;

    let (inner_w, inner_h) = unrotated_size(b.w as f64, b.h as f64, angle);
    let win_w = inner_w + 2.0 * CROP_MARGIN as f64;
    let win_h = inner_h + 2.0 * CROP_MARGIN as f64;
    let cx = b.x as f64 + b.w as f64 / 2.0;
    let cy = b.y as f64 + b.h as f64 / 2.0;
    // The plate was rotated by -angle (counter-clockwise positive); map the
    // upright window back through that rotation.
    let (sin, cos) = (-angle).to_radians().sin_cos();
    let resampled = GrayImage::from_fn(PLATE_W, PLATE_H, |px, py| {
        let u = ((px as f64 + 0.5) / PLATE_W as f64 - 0.5) * win_w;
        let v = ((py as f64 + 0.5) / PLATE_H as f64 - 0.5) * win_h;
        let x = cx + u * cos + v * sin;
        let y = cy - u * sin + v * cos;
        sample_bilinear(&gray, x - 0.5, y - 0.5).round() as u8
    });
    let image = contrast_stretch(&resampled).ok_or(AnprError::DegenerateCrop)?;
    Ok(NormalizedPlate {
        image,
        source: Detection { angle, ..*det },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_crop_is_degenerate() {
        let img = Image::from(GrayImage::filled(100, 60, 90));
        let det = Detection { bbox: Rect::new(10, 10, 60, 20), angle: 0.0, score: 1.0 };
        assert!(matches!(rectify_and_normalize(&img, &det), Err(AnprError::DegenerateCrop)));
    }

    #[test]
    fn box_outside_image_is_rejected() {
        let img = Image::from(GrayImage::filled(100, 60, 90));
        let det = Detection { bbox: Rect::new(80, 10, 60, 20), angle: 0.0, score: 1.0 };
        assert!(matches!(rectify_and_normalize(&img, &det), Err(AnprError::BoxOutOfBounds(_))));
    }

    #[test]
    fn output_is_normalized_size_and_range() {
        let img = Image::from(GrayImage::from_fn(120, 60, |x, y| ((x * 7 + y * 3) % 200 + 20) as u8));
        let det = Detection { bbox: Rect::new(20, 20, 80, 20), angle: 0.0, score: 1.0 };
        let n = rectify_and_normalize(&img, &det).unwrap();
        assert_eq!((n.image().width(), n.image().height()), (PLATE_W, PLATE_H));
        assert_eq!(n.image().min_max(), (0, 255));
    }
}
