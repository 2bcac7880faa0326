//! Raster containers and the low-level vision primitives shared by the plate
//! localizer and the character recognizer.
//!
//! Everything here is a pure function over immutable inputs. Binary images use
//! a single foreground convention across the workspace: `1` means the source
//! intensity was strictly greater than the threshold.

mod components;
mod error;
mod gray;
mod image;
mod morph;
mod otsu;
mod pnm;
mod resample;

pub use components::{connected_components, ComponentLabels, ComponentStats};
pub use error::ImagingError;
pub use gray::{smooth_3x3, sobel_magnitude, to_grayscale};
pub use image::{BinaryImage, GrayImage, Image, Rect};
pub use morph::{dilate, erode, morph_close};
pub use otsu::{otsu_threshold, otsu_threshold_histogram, threshold, Histogram};
pub use pnm::{decode_pnm, encode_pnm, read_image, write_image};
pub use resample::{contrast_stretch, resize_bilinear, resize_nearest, sample_bilinear};
