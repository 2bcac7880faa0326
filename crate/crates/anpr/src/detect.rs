use std::time::{Duration, Instant};

use park_imaging::{
    connected_components, morph_close, otsu_threshold, smooth_3x3, sobel_magnitude, to_grayscale, BinaryImage, ComponentLabels,
    Image, ImagingError, Rect,
};
use serde::{Deserialize, Serialize};

use crate::skew::{fit_skew_deg, unrotated_size};
use crate::AnprError;

pub const MIN_IMAGE_W: u32 = 64;
pub const MIN_IMAGE_H: u32 = 32;
pub const MIN_BOX_SIDE: u32 = 8;

/// A candidate plate region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    #[serde(with = "crate::rect_serde")]
    pub bbox: Rect,
    /// Estimated skew in degrees; negative when the plate's right end is raised.
    pub angle: f64,
    pub score: f64,
}

/// Anything that can find plates in an image.
pub trait PlateDetector: Send + Sync {
    fn name(&self) -> &str;

    /// Detections sorted by descending score.
    fn detect(&self, img: &Image) -> Result<Vec<Detection>, AnprError>;

    fn detect_timed(&self, img: &Image) -> Result<(Vec<Detection>, Duration), AnprError> {
        let start = Instant::now();
        let dets = self.detect(img)?;
        Ok((dets, start.elapsed()))
    }
}

/// Tunables of the classical detector. The defaults are the documented
/// pipeline parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizerConfig {
    pub close_kernel: (u32, u32),
    pub aspect_range: (f64, f64),
    /// Component area bounds as fractions of the image area.
    pub area_fraction: (f64, f64),
    pub min_fill_ratio: f64,
    /// Aspect ratio that scores best.
    pub ideal_aspect: f64,
}

impl Default for LocalizerConfig {
    fn default() -> Self {
        Self {
            close_kernel: (9, 3),
            aspect_range: (2.0, 6.0),
            area_fraction: (0.001, 0.10),
            min_fill_ratio: 0.4,
            ideal_aspect: 4.0,
        }
    }
}

/// Gradient, Otsu, closing and connected-component plate localizer.
#[derive(Debug, Clone, Default)]
pub struct ClassicalDetector {
    pub config: LocalizerConfig,
}

impl PlateDetector for ClassicalDetector {
    fn name(&self) -> &str {
        "classical-gradient"
    }

    fn detect(&self, img: &Image) -> Result<Vec<Detection>, AnprError> {
        localize_plates_with(img, &self.config)
    }
}

/// Edge mask and its closed, labelled form for a grayscale image.
pub(crate) struct PlateMasks {
    pub edges: BinaryImage,
    pub labels: ComponentLabels,
}

pub(crate) fn plate_masks(gray: &park_imaging::GrayImage, kernel: (u32, u32)) -> Result<Option<PlateMasks>, AnprError> {
    let gradient = sobel_magnitude(&smooth_3x3(gray));
    let edges = match otsu_threshold(&gradient) {
        Ok((_, bin)) => bin,
        Err(ImagingError::DegenerateHistogram) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let closed = morph_close(&edges, kernel.0, kernel.1)?;
    let labels = connected_components(&closed);
    Ok(Some(PlateMasks { edges, labels }))
}

fn aspect_fit(aspect: f64, ideal: f64) -> f64 {
    (1.0 - (aspect / ideal).ln().abs() / 3f64.ln()).clamp(0.0, 1.0)
}

/// Finds plate-shaped regions of strong edge density.
///
/// Pipeline: luma, 3x3 smoothing, Sobel magnitude, Otsu on the gradient, 9x3 closing,
/// 8-connected components, then geometric filters (aspect 2..6, area 0.1% to
/// 10% of the image, fill ratio >= 0.4 measured in the
/// deskewed box). Score is edge density in the box
/// times how close the aspect is to 4:1.
pub fn localize_plates(img: &Image) -> Result<Vec<Detection>, AnprError> {
    localize_plates_with(img, &LocalizerConfig::default())
}

pub fn localize_plates_with(img: &Image, cfg: &LocalizerConfig) -> Result<Vec<Detection>, AnprError> {
    if img.width() < MIN_IMAGE_W || img.height() < MIN_IMAGE_H {
        return Err(AnprError::ImageTooSmall {
            width: img.width(),
            height: img.height(),
        });
    }
    let gray = to_grayscale(img);
    let Some(masks) = plate_masks(&gray, cfg.close_kernel)? else {
        return Ok(Vec::new());
    };
    let image_area = img.width() as f64 * img.height() as f64;

    let mut out = Vec::new();
    for comp in masks.labels.stats() {
        let b = comp.bbox;
        if b.w < MIN_BOX_SIDE || b.h < MIN_BOX_SIDE {
            continue;
        }
        let aspect = b.w as f64 / b.h as f64;
        let area = comp.area as f64 / image_area;
        if aspect < cfg.aspect_range.0 || aspect > cfg.aspect_range.1 || area < cfg.area_fraction.0 || area > cfg.area_fraction.1 {
            continue;
        }
        let angle = fit_skew_deg(b, |x, y| masks.labels.label_at(x, y) == comp.label).unwrap_or(0.0);
        // Fill is measured against the de-rotated box so tilted plates are not
        // penalized for the empty corners of their axis-aligned box.
        let (inner_w, inner_h) = unrotated_size(b.w as f64, b.h as f64, angle);
        let fill = (comp.area as f64 / (inner_w * inner_h)).min(1.0);
        if fill < cfg.min_fill_ratio {
            continue;
        }
        let edge_pixels = (b.y..b.bottom())
            .flat_map(|y| (b.x..b.right()).map(move |x| (x, y)))
            .filter(|&(x, y)| masks.edges.get(x, y))
            .count();
        let density = edge_pixels as f64 / b.area() as f64;
        let score = (density * aspect_fit(aspect, cfg.ideal_aspect)).clamp(0.0, 1.0);
        out.push(Detection { bbox: b, angle, score });
    }
    sort_detections(&mut out);
    Ok(out)
}

/// Descending score, then top-most, then left-most.
pub fn sort_detections(dets: &mut [Detection]) {
    dets.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.bbox.y.cmp(&b.bbox.y))
            .then(a.bbox.x.cmp(&b.bbox.x))
    });
}
