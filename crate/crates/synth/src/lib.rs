//! Deterministic synthetic licence-plate imagery.
//!
//! Plates are rendered from the built-in font ([`glyphs`]), posed onto a
//! textured canvas with distractors and noise ([`compose_scene`]), and batched
//! into a corpus with a line-delimited JSON manifest ([`generate_corpus`]).
//! Every random choice flows from [`SplitMix64`], so a seed reproduces a corpus
//! byte for byte.

mod corpus;
pub mod glyphs;
mod plate;
mod rng;
mod scene;

pub use corpus::{
    entry_image_path, generate_corpus, generate_scene, read_manifest, write_manifest, GeneratedScene, ManifestEntry,
    NoiseTier, CANVAS_H, CANVAS_W, MANIFEST_FILE,
};
pub use glyphs::FontStyle;
pub use plate::{random_plate_text, render_plate, PlateSpec, DEFAULT_GAP, MIN_MARGIN};
pub use rng::{derive_seed, SplitMix64};
pub use scene::{compose_scene, paste_plate, Placement, SceneSpec, MAX_ROTATION_DEG};

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("plate text {0:?} does not match the plate grammar")]
    InvalidPlateText(String),
    #[error("foreground and background levels are equal")]
    NoContrast,
    #[error("{width}x{height} plate cannot hold {chars} characters with margins")]
    PlateTooSmall { width: u32, height: u32, chars: u32 },
    #[error("transformed plate does not fit inside the canvas")]
    PlateOutOfBounds,
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("corpus must contain at least one scene")]
    EmptyCorpus,
    #[error(transparent)]
    Image(#[from] park_imaging::ImagingError),
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
