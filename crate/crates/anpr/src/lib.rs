//! Plate localization and normalization.
//!
//! [`localize_plates`] finds plate-shaped regions of dense edges in a scene;
//! [`rectify_and_normalize`] turns a detection into a deskewed 256x64 plate
//! for the character recognizer. Detectors are pluggable through
//! [`PlateDetector`], and [`evaluate_detector`] scores any of them against a
//! corpus manifest.

mod detect;
mod evaluate;
mod external;
mod iou;
mod rectify;
mod skew;

pub use detect::{
    localize_plates, localize_plates_with, sort_detections, ClassicalDetector, Detection, LocalizerConfig,
    PlateDetector, MIN_IMAGE_H, MIN_IMAGE_W,
};
pub use evaluate::{evaluate_detector, DetectionRecord, DetectorReport, TierSummary, HIT_IOU};
pub use external::ExternalDetector;
pub use iou::iou;
pub use rectify::{estimate_skew, rectify_and_normalize, NormalizedPlate, CROP_MARGIN, PLATE_H, PLATE_W};

use park_imaging::{ImagingError, Rect};

#[derive(Debug, thiserror::Error)]
pub enum AnprError {
    #[error("image {width}x{height} is smaller than 64x32")]
    ImageTooSmall { width: u32, height: u32 },
    #[error("crop has no contrast")]
    DegenerateCrop,
    #[error("box {0:?} is empty or outside the image")]
    BoxOutOfBounds(Rect),
    #[error("normalized plates are 256x64, got {0}x{1}")]
    NotNormalized(u32, u32),
    #[error("cannot read image {0}: {1}")]
    MissingImage(String, String),
    #[error("external detector: {0}")]
    External(String),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
}

/// Serializes a [`Rect`] as `[x, y, w, h]`.
pub(crate) mod rect_serde {
    use park_imaging::Rect;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Rect, s: S) -> Result<S::Ok, S::Error> {
        [r.x, r.y, r.w, r.h].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rect, D::Error> {
        let [x, y, w, h] = <[u32; 4]>::deserialize(d)?;
        Ok(Rect::new(x, y, w, h))
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Rect>, s: S) -> Result<S::Ok, S::Error> {
            r.map(|r| [r.x, r.y, r.w, r.h]).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rect>, D::Error> {
            Ok(Option::<[u32; 4]>::deserialize(d)?.map(|[x, y, w, h]| Rect::new(x, y, w, h)))
        }
    }
}
