use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use park_imaging::{write_image, GrayImage, Image, Rect};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{compose_scene, derive_seed, random_plate_text, render_plate, FontStyle, Placement, PlateSpec, SceneSpec, SplitMix64, SynthError};

pub const CANVAS_W: u32 = 640;
pub const CANVAS_H: u32 = 480;
pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseTier {
    Clean,
    Noisy,
}

impl NoiseTier {
    pub fn sigma(self) -> f64 {
        match self {
            NoiseTier::Clean => 0.0,
            NoiseTier::Noisy => 8.0,
        }
    }

    pub fn max_rotation_deg(self) -> f64 {
        match self {
            NoiseTier::Clean => 3.0,
            NoiseTier::Noisy => 12.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NoiseTier::Clean => "clean",
            NoiseTier::Noisy => "noisy",
        }
    }
}

impl std::str::FromStr for NoiseTier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clean" => Ok(NoiseTier::Clean),
            "noisy" => Ok(NoiseTier::Noisy),
            other => Err(format!("unknown noise tier {other:?}, expected clean or noisy")),
        }
    }
}

/// One line of `manifest.jsonl`. `image` is relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub image: String,
    pub text: String,
    #[serde(with = "rect_array")]
    pub bbox: Rect,
    pub tier: NoiseTier,
}

mod rect_array {
    use park_imaging::Rect;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Rect, s: S) -> Result<S::Ok, S::Error> {
        [r.x, r.y, r.w, r.h].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rect, D::Error> {
        let [x, y, w, h] = <[u32; 4]>::deserialize(d)?;
        Ok(Rect::new(x, y, w, h))
    }
}

/// A generated scene with everything needed to reproduce it.
#[derive(Debug, Clone)]
pub struct GeneratedScene {
    pub image: GrayImage,
    pub plate: PlateSpec,
    pub scene: SceneSpec,
    pub truth: Rect,
}

/// Scene `index` of the corpus seeded with `seed`. Depends only on
/// `(seed, index, tier)`, so scenes can be produced in any order.
pub fn generate_scene(seed: u64, index: u64, tier: NoiseTier) -> Result<GeneratedScene, SynthError> {
    let mut rng = SplitMix64::new(derive_seed(seed, index));
    let text = random_plate_text(&mut rng);
    let font = if rng.chance(0.5) { FontStyle::Standard } else { FontStyle::Condensed };
    let dark = rng.range_u32(10, 60) as u8;
    let light = rng.range_u32(190, 245) as u8;
    let (fg, bg) = if rng.chance(0.75) { (dark, light) } else { (light, dark) };
    let plate = PlateSpec::fitted(text, fg, bg, font);
    let rendered = render_plate(&plate)?;

    let max_rot = tier.max_rotation_deg();
    let mut placement = Placement {
        position: (0, 0),
        scale: rng.uniform(0.8, 1.3),
        rotation_deg: rng.uniform(-max_rot, max_rot),
    };
    let (ext_w, ext_h) = placement.extent(plate.plate_w, plate.plate_h);
    const BORDER: u32 = 8;
    let max_x = CANVAS_W - BORDER - ext_w.ceil() as u32;
    let max_y = CANVAS_H - BORDER - ext_h.ceil() as u32;
    placement.position = (rng.range_u32(BORDER, max_x), rng.range_u32(BORDER, max_y));

    let scene = SceneSpec {
        canvas_w: CANVAS_W,
        canvas_h: CANVAS_H,
        placement,
        noise_sigma: tier.sigma(),
        distractor_count: rng.range_u32(0, 4),
        rng_seed: rng.next_u64(),
    };
    let (image, truth) = compose_scene(&rendered, &scene)?;
    Ok(GeneratedScene {
        image,
        plate,
        scene,
        truth,
    })
}

/// Writes `count` scenes as PGM files plus `manifest.jsonl` into `out_dir`.
///
/// Scenes are rendered in parallel; each derives its own sub-seed, and the
/// manifest is written in index order, so the output does not depend on
/// thread count.
pub fn generate_corpus(out_dir: &Path, seed: u64, count: usize, tier: NoiseTier) -> Result<Vec<ManifestEntry>, SynthError> {
    if count == 0 {
        return Err(SynthError::EmptyCorpus);
    }
    fs::create_dir_all(out_dir)?;
    let entries = (0..count)
        .into_par_iter()
        .map(|i| {
            let generated = generate_scene(seed, i as u64, tier)?;
            let id = format!("scene-{i:05}");
            let image = format!("{id}.pgm");
            write_image(&Image::from(generated.image), out_dir.join(&image))?;
            Ok(ManifestEntry {
                id,
                image,
                text: generated.plate.text,
                bbox: generated.truth,
                tier,
            })
        })
        .collect::<Result<Vec<_>, SynthError>>()?;
    write_manifest(&out_dir.join(MANIFEST_FILE), &entries)?;
    Ok(entries)
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<(), SynthError> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for e in entries {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, SynthError> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut entries = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        entries.push(serde_json::from_str(&line)?);
    }
    Ok(entries)
}

/// Resolves an entry's image path against the manifest location.
pub fn entry_image_path(manifest: &Path, entry: &ManifestEntry) -> PathBuf {
    manifest.parent().unwrap_or(Path::new(".")).join(&entry.image)
}
