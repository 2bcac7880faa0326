use std::path::Path;
use std::time::Instant;

use park_anpr::{evaluate_detector, rectify_and_normalize, Detection, DetectorReport, PlateDetector};
use park_imaging::Image;
use park_ocr::{confusion_matrix, recognize_plate, ConfusionMatrix, GlyphAtlas, PlateReading};
use park_plate::is_valid_plate;
use park_synth::{entry_image_path, ManifestEntry, NoiseTier};
use rayon::prelude::*;
use serde::Serialize;

/// Result of running detection, rectification and recognition on one scene.
#[derive(Debug, Clone, Serialize)]
pub struct SceneRead {
    pub detections: Vec<Detection>,
    /// The chosen plate and its reading, if any detection could be read.
    pub plate: Option<(Detection, PlateReading)>,
    pub elapsed_seconds: f64,
}

impl SceneRead {
    pub fn text(&self) -> Option<&str> {
        self.plate.as_ref().map(|(_, r)| r.text.as_str())
    }
}

/// Reads the most plausible plate in a scene.
///
/// Detections are tried in score order; the first reading that fits the
/// plate grammar wins, otherwise the first reading of any kind.
pub fn read_scene(img: &Image, detector: &dyn PlateDetector, atlas: &GlyphAtlas) -> anyhow::Result<SceneRead> {
    let start = Instant::now();
    let detections = detector.detect(img)?;
    let mut fallback = None;
    let mut chosen = None;
    for det in &detections {
        let Ok(plate) = rectify_and_normalize(img, det) else { continue };
        let Ok(reading) = recognize_plate(&plate, atlas) else { continue };
        if is_valid_plate(&reading.text) {
            chosen = Some((*det, reading));
            break;
        }
        fallback.get_or_insert((*det, reading));
    }
    let plate = chosen.or(fallback);
    Ok(SceneRead { detections, plate, elapsed_seconds: start.elapsed().as_secs_f64() })
}

/// Recognition of the plate at its true position, isolating OCR from detection.
pub fn read_truth_box(img: &Image, entry: &ManifestEntry, atlas: &GlyphAtlas) -> Option<PlateReading> {
    let det = Detection { bbox: entry.bbox, angle: 0.0, score: 1.0 };
    let plate = rectify_and_normalize(img, &det).ok()?;
    recognize_plate(&plate, atlas).ok()
}

#[derive(Debug, Clone, Serialize)]
pub struct OcrRecord {
    pub id: String,
    pub tier: NoiseTier,
    pub truth: String,
    /// Reading of the true plate region.
    pub read: Option<String>,
    pub correct: bool,
    /// Reading chosen by the full pipeline.
    pub pipeline_read: Option<String>,
    pub pipeline_correct: bool,
    pub pipeline_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OcrSummary {
    pub tier: NoiseTier,
    pub count: usize,
    pub ocr_accuracy: f64,
    pub pipeline_accuracy: f64,
    pub median_pipeline_ms: f64,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub detector: DetectorReport,
    pub ocr: Vec<OcrRecord>,
    pub summaries: Vec<OcrSummary>,
    /// Built from the truth-region readings.
    pub confusion: ConfusionMatrix,
}

impl Evaluation {
    pub fn summary(&self, tier: NoiseTier) -> Option<&OcrSummary> {
        self.summaries.iter().find(|s| s.tier == tier)
    }

    /// Detector lines, then one line per OCR record and per tier summary.
    pub fn to_json_lines(&self) -> String {
        let mut out = self.detector.to_json_lines();
        for r in &self.ocr {
            let mut v = serde_json::to_value(r).expect("records serialize");
            v["kind"] = "ocr_record".into();
            out.push_str(&v.to_string());
            out.push('\n');
        }
        for s in &self.summaries {
            let mut v = serde_json::to_value(s).expect("summaries serialize");
            v["kind"] = "ocr_summary".into();
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Scores the detector, the recognizer on true plate regions, and the whole
/// pipeline over a corpus. Scenes run in parallel; records keep manifest order.
pub fn evaluate(manifest: &Path, entries: &[ManifestEntry], detector: &dyn PlateDetector, atlas: &GlyphAtlas) -> anyhow::Result<Evaluation> {
    let detector_report = evaluate_detector(detector, manifest, entries)?;
    let ocr = entries
        .par_iter()
        .map(|entry| {
            let img = park_imaging::read_image(entry_image_path(manifest, entry))?;
            let read = read_truth_box(&img, entry, atlas).map(|r| r.text);
            let scene = read_scene(&img, detector, atlas)?;
            let pipeline_read = scene.text().map(str::to_owned);
            Ok(OcrRecord {
                id: entry.id.clone(),
                tier: entry.tier,
                truth: entry.text.clone(),
                correct: read.as_deref() == Some(entry.text.as_str()),
                read,
                pipeline_correct: pipeline_read.as_deref() == Some(entry.text.as_str()),
                pipeline_read,
                pipeline_ms: scene.elapsed_seconds * 1e3,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let mut tiers: Vec<NoiseTier> = ocr.iter().map(|r| r.tier).collect();
    tiers.sort();
    tiers.dedup();
    let summaries = tiers
        .into_iter()
        .map(|tier| {
            let rs: Vec<&OcrRecord> = ocr.iter().filter(|r| r.tier == tier).collect();
            let n = rs.len() as f64;
            let mut ms: Vec<f64> = rs.iter().map(|r| r.pipeline_ms).collect();
            OcrSummary {
                tier,
                count: rs.len(),
                ocr_accuracy: rs.iter().filter(|r| r.correct).count() as f64 / n,
                pipeline_accuracy: rs.iter().filter(|r| r.pipeline_correct).count() as f64 / n,
                median_pipeline_ms: median(&mut ms),
            }
        })
        .collect();
    let confusion = confusion_matrix(ocr.iter().map(|r| (r.truth.as_str(), r.read.as_deref())));
    Ok(Evaluation { detector: detector_report, ocr, summaries, confusion })
}
