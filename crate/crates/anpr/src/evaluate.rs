use std::path::Path;

use park_imaging::{read_image, Rect};
use park_synth::{entry_image_path, ManifestEntry, NoiseTier};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{iou, AnprError, PlateDetector};

/// Best-IoU at or above this counts as a hit.
pub const HIT_IOU: f64 = 0.7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub id: String,
    pub tier: NoiseTier,
    #[serde(with = "crate::rect_serde")]
    pub truth: Rect,
    #[serde(with = "crate::rect_serde::option")]
    pub top: Option<Rect>,
    pub top_iou: f64,
    pub best_iou: f64,
    pub hit: bool,
    pub detections: usize,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierSummary {
    pub tier: NoiseTier,
    pub count: usize,
    pub detection_rate: f64,
    pub mean_iou: f64,
    pub mean_elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DetectorReport {
    /// Nothing to evaluate; rates are undefined.
    EmptyManifest,
    Evaluated {
        detector: String,
        /// How a hit is defined, stated in every report.
        metric: String,
        records: Vec<DetectionRecord>,
        tiers: Vec<TierSummary>,
    },
}

impl DetectorReport {
    pub fn tier(&self, tier: NoiseTier) -> Option<&TierSummary> {
        match self {
            DetectorReport::EmptyManifest => None,
            DetectorReport::Evaluated { tiers, .. } => tiers.iter().find(|t| t.tier == tier),
        }
    }

    /// One JSON object per record followed by one summary object per tier.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        match self {
            DetectorReport::EmptyManifest => {
                out.push_str(r#"{"kind":"summary","status":"empty_manifest"}"#);
                out.push('\n');
            }
            DetectorReport::Evaluated {
                detector,
                metric,
                records,
                tiers,
            } => {
                for r in records {
                    let mut v = serde_json::to_value(r).expect("record serializes");
                    v["kind"] = "record".into();
                    out.push_str(&v.to_string());
                    out.push('\n');
                }
                for t in tiers {
                    let mut v = serde_json::to_value(t).expect("summary serializes");
                    v["kind"] = "summary".into();
                    v["detector"] = detector.as_str().into();
                    v["metric"] = metric.as_str().into();
                    out.push_str(&v.to_string());
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// Runs `detector` over every manifest entry (in parallel, results kept in
/// manifest order) and summarizes hit rate, IoU and latency per noise tier.
pub fn evaluate_detector(detector: &dyn PlateDetector, manifest: &Path, entries: &[ManifestEntry]) -> Result<DetectorReport, AnprError> {
    if entries.is_empty() {
        return Ok(DetectorReport::EmptyManifest);
    }
    let records = entries
        .par_iter()
        .map(|entry| {
            let path = entry_image_path(manifest, entry);
            let img = read_image(&path).map_err(|e| AnprError::MissingImage(path.display().to_string(), e.to_string()))?;
            let (dets, elapsed) = detector.detect_timed(&img)?;
            let top = dets.first().map(|d| d.bbox);
            let top_iou = top.map_or(0.0, |b| iou(b, entry.bbox));
            let best_iou = dets.iter().map(|d| iou(d.bbox, entry.bbox)).fold(0.0, f64::max);
            Ok(DetectionRecord {
                id: entry.id.clone(),
                tier: entry.tier,
                truth: entry.bbox,
                top,
                top_iou,
                best_iou,
                hit: best_iou >= HIT_IOU,
                detections: dets.len(),
                elapsed_ms: elapsed.as_secs_f64() * 1e3,
            })
        })
        .collect::<Result<Vec<_>, AnprError>>()?;

    let mut tiers: Vec<NoiseTier> = records.iter().map(|r| r.tier).collect();
    tiers.sort();
    tiers.dedup();
    let tiers = tiers
        .into_iter()
        .map(|tier| {
            let rs: Vec<&DetectionRecord> = records.iter().filter(|r| r.tier == tier).collect();
            let n = rs.len() as f64;
            TierSummary {
                tier,
                count: rs.len(),
                detection_rate: rs.iter().filter(|r| r.hit).count() as f64 / n,
                mean_iou: rs.iter().map(|r| r.best_iou).sum::<f64>() / n,
                mean_elapsed_ms: rs.iter().map(|r| r.elapsed_ms).sum::<f64>() / n,
            }
        })
        .collect();
    Ok(DetectorReport::Evaluated {
        detector: detector.name().to_owned(),
        metric: format!("hit = some detection with IoU >= {HIT_IOU} against the ground-truth box"),
        records,
        tiers,
    })
}
