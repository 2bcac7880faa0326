use park_anpr::NormalizedPlate;
use park_imaging::{connected_components, dilate, erode, otsu_threshold, BinaryImage, Rect};

use crate::atlas::{crop_binary, normalize_glyph};
use crate::OcrError;

/// Columns of background needed to separate two characters.
pub const MIN_GAP_COLUMNS: u32 = 2;
/// Boxes shorter than this fraction of the plate height are discarded.
pub const MIN_HEIGHT_FRACTION: f64 = 0.4;
pub const MIN_BOX_WIDTH: u32 = 3;

/// One segmented character.
#[derive(Debug, Clone, PartialEq)]
pub struct CharBox {
    /// Tight ink box within the normalized plate.
    pub bbox: Rect,
    /// The ink resampled to 16x32.
    pub glyph: BinaryImage,
}

/// Character ink of a normalized plate.
///
/// Otsu splits the plate into two classes and the class with fewer pixels in
/// the central band is taken as ink, so dark-on-light and light-on-dark plates
/// read the same. The band ignores the outer eighth on every side, where
/// scene pixels from the crop margin live. Scene regions reaching the image
/// border are removed for the same reason: characters sit well inside the
/// margin, scene clutter does not. A character may touch the scene through a
/// thin bridge at a plate corner, so the scene is found on the eroded mask,
/// where such bridges vanish, and its dilation is subtracted before any
/// remaining border-touching ink is dropped.
///
/// Components at least 40% of the plate height are character bodies. Shorter
/// ones are kept only when they overlap the rows spanned by the bodies: diagonal strokes can come apart after
/// resampling, and those pieces belong to a character, while noise specks in
/// the gaps or above and below the text would bridge characters or stretch
/// their boxes.
pub fn ink_mask(plate: &NormalizedPlate) -> Option<BinaryImage> {
    let img = plate.image();
    let (_, bright) = otsu_threshold(img).ok()?;
    let (w, h) = (img.width(), img.height());
    let (bx, by) = (w / 8, h / 8);
    let mut bright_count = 0usize;
    let mut total = 0usize;
    for y in by..h - by {
        for x in bx..w - bx {
            bright_count += bright.get(x, y) as usize;
            total += 1;
        }
    }
    let ink = if 2 * bright_count <= total { bright } else { bright.inverted() };
    let ink = remove_scene(&ink).ok()?;

    let labels = connected_components(&ink);
    let min_height = MIN_HEIGHT_FRACTION * h as f64;
    let stats: Vec<_> = labels
        .stats()
        .into_iter()
        .filter(|s| !touches_border(s.bbox, w, h, 0))
        .collect();
    let (bodies, pieces): (Vec<_>, Vec<_>) = stats.into_iter().partition(|s| s.bbox.h as f64 >= min_height);
    let mut keep = vec![false; labels.component_count() as usize + 1];
    let band = bodies.iter().map(|s| (s.bbox.y, s.bbox.bottom())).reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)));
    for s in &bodies {
        keep[s.label as usize] = true;
    }
    if let Some((top, bottom)) = band {
        for s in pieces {
            keep[s.label as usize] = s.bbox.y < bottom && top < s.bbox.bottom();
        }
    }
    Some(BinaryImage::from_fn(w, h, |x, y| keep[labels.label_at(x, y) as usize]))
}

fn touches_border(b: Rect, w: u32, h: u32, slack: u32) -> bool {
    b.x <= slack || b.y <= slack || b.right() + slack >= w || b.bottom() + slack >= h
}

fn remove_scene(ink: &BinaryImage) -> Result<BinaryImage, park_imaging::ImagingError> {
    let (w, h) = (ink.width(), ink.height());
    let core = erode(ink, 3, 3)?;
    let labels = connected_components(&core);
    let mut scene = vec![false; labels.component_count() as usize + 1];
    for s in labels.stats() {
        // Erosion clears the outermost ring, so touching means within one pixel.
        scene[s.label as usize] = touches_border(s.bbox, w, h, 1);
    }
    let seeds = BinaryImage::from_fn(w, h, |x, y| scene[labels.label_at(x, y) as usize]);
    let grown = dilate(&seeds, 5, 5)?;
    Ok(BinaryImage::from_fn(w, h, |x, y| ink.get(x, y) && !grown.get(x, y)))
}

/// Splits a plate into characters, left to right.
///
/// The ink's column projection is cut wherever at least two consecutive
/// columns are empty. Each run becomes a box bounded by its ink; boxes
/// shorter than 40% of the plate or narrower than 3 px are discarded, the
/// rest are resampled nearest-neighbour to 16x32.
pub fn segment_characters(plate: &NormalizedPlate) -> Result<Vec<CharBox>, OcrError> {
    let Some(ink) = ink_mask(plate) else {
        return Err(OcrError::NoCharacters);
    };
    let (w, h) = (ink.width(), ink.height());
    let profile: Vec<u32> = (0..w).map(|x| (0..h).filter(|&y| ink.get(x, y)).count() as u32).collect();

    let mut runs = Vec::new();
    let mut x = 0;
    while x < w {
        if profile[x as usize] == 0 {
            x += 1;
            continue;
        }
        let start = x;
        let mut end = x + 1;
        let mut gap = 0;
        x += 1;
        while x < w && gap < MIN_GAP_COLUMNS {
            if profile[x as usize] == 0 {
                gap += 1;
            } else {
                gap = 0;
                end = x + 1;
            }
            x += 1;
        }
        runs.push((start, end));
    }

    let min_height = MIN_HEIGHT_FRACTION * h as f64;
    let mut boxes = Vec::new();
    for (x0, x1) in runs {
        let rows = (0..h).filter(|&y| (x0..x1).any(|x| ink.get(x, y)));
        let (Some(y0), Some(y1)) = (rows.clone().min(), rows.max()) else {
            continue;
        };
        let bbox = Rect::new(x0, y0, x1 - x0, y1 - y0 + 1);
        if (bbox.h as f64) < min_height || bbox.w < MIN_BOX_WIDTH {
            continue;
        }
        let glyph = normalize_glyph(&crop_binary(&ink, bbox));
        boxes.push(CharBox { bbox, glyph });
    }
    if boxes.is_empty() {
        return Err(OcrError::NoCharacters);
    }
    Ok(boxes)
}
