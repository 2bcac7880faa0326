use std::collections::HashMap;

use park_anpr::*;
use park_imaging::{GrayImage, Image, Rect};
use park_synth::{
    compose_scene, generate_corpus, generate_scene, paste_plate, render_plate, FontStyle, ManifestEntry, NoiseTier,
    Placement, PlateSpec, SceneSpec, MANIFEST_FILE,
};
use proptest::prelude::*;

fn plate(text: &str) -> GrayImage {
    render_plate(&PlateSpec::fitted(text, 30, 220, FontStyle::Standard)).unwrap()
}

fn upright(x: u32, y: u32) -> Placement {
    Placement { position: (x, y), scale: 1.0, rotation_deg: 0.0 }
}

#[test]
fn clean_seed_42_scene_is_found() {
    let s = generate_scene(42, 0, NoiseTier::Clean).unwrap();
    let dets = localize_plates(&Image::from(s.image)).unwrap();
    assert!(iou(dets[0].bbox, s.truth) >= 0.7, "{:?} vs {:?}", dets[0].bbox, s.truth);
}

#[test]
fn two_plates_give_two_hits() {
    let spec = SceneSpec {
        canvas_w: 640,
        canvas_h: 480,
        placement: upright(40, 60),
        noise_sigma: 0.0,
        distractor_count: 0,
        rng_seed: 9,
    };
    let (mut canvas, first) = compose_scene(&plate("OD02AB1234"), &spec).unwrap();
    let second = paste_plate(&mut canvas, &plate("TS09F4321"), &upright(300, 330)).unwrap();
    let dets = localize_plates(&Image::from(canvas)).unwrap();
    assert!(dets.len() >= 2);
    for truth in [first, second] {
        let best = dets.iter().map(|d| iou(d.bbox, truth)).fold(0.0, f64::max);
        assert!(best >= 0.7, "{truth:?}: best {best}");
    }
}

#[test]
fn detection_translates_with_the_plate() {
    let p = plate("KA05MN7788");
    let top_at = |x, y| {
        let mut canvas = GrayImage::filled(640, 480, 120);
        paste_plate(&mut canvas, &p, &upright(x, y)).unwrap();
        localize_plates(&Image::from(canvas)).unwrap()[0]
    };
    let base = top_at(100, 100);
    for (dx, dy) in [(1, 0), (0, 1), (37, 11), (250, 300)] {
        let moved = top_at(100 + dx, 100 + dy);
        assert_eq!(moved.bbox, base.bbox.translate(dx as i64, dy as i64).unwrap(), "shift ({dx},{dy})");
        assert_eq!(moved.score, base.score);
    }
}

#[test]
fn ten_degree_plate_reports_minus_ten() {
    let p = plate("MH12DE4567");
    let mut canvas = GrayImage::filled(640, 480, 110);
    let placement = Placement { position: (150, 150), scale: 1.0, rotation_deg: 10.0 };
    let truth = paste_plate(&mut canvas, &p, &placement).unwrap();
    let img = Image::from(canvas);
    let top = localize_plates(&img).unwrap()[0];
    assert!(iou(top.bbox, truth) >= 0.7);
    assert!((top.angle + 10.0).abs() <= 2.0, "detector angle {}", top.angle);
    let normalized = rectify_and_normalize(&img, &top).unwrap();
    assert!((normalized.source.angle + 10.0).abs() <= 2.0, "rectifier angle {}", normalized.source.angle);
}

#[test]
fn detections_are_sorted_and_in_bounds() {
    for i in 0..20 {
        let s = generate_scene(7, i, NoiseTier::Noisy).unwrap();
        let img = Image::from(s.image);
        let dets = localize_plates(&img).unwrap();
        assert!(dets.windows(2).all(|w| w[0].score >= w[1].score));
        for d in &dets {
            assert!(d.bbox.fits_within(640, 480) && d.bbox.w >= 8 && d.bbox.h >= 8);
            assert!((0.0..=1.0).contains(&d.score));
        }
        assert_eq!(dets, localize_plates(&img).unwrap());
    }
}

/// Looks up the ground-truth box by image content.
struct TruthDetector(HashMap<Vec<u8>, Rect>);

impl PlateDetector for TruthDetector {
    fn name(&self) -> &str {
        "truth"
    }

    fn detect(&self, img: &Image) -> Result<Vec<Detection>, AnprError> {
        Ok(self.0.get(img.data()).map(|&bbox| Detection { bbox, angle: 0.0, score: 1.0 }).into_iter().collect())
    }
}

#[test]
fn truth_detector_scores_perfectly() {
    let dir = tempfile::tempdir().unwrap();
    let entries = generate_corpus(dir.path(), 3, 6, NoiseTier::Noisy).unwrap();
    let manifest = dir.path().join(MANIFEST_FILE);
    let truths = entries
        .iter()
        .map(|e| {
            let img = park_imaging::read_image(dir.path().join(&e.image)).unwrap();
            (img.data().to_vec(), e.bbox)
        })
        .collect();
    let report = evaluate_detector(&TruthDetector(truths), &manifest, &entries).unwrap();
    let noisy = report.tier(NoiseTier::Noisy).unwrap();
    assert_eq!((noisy.count, noisy.detection_rate, noisy.mean_iou), (6, 1.0, 1.0));
    assert!(report.tier(NoiseTier::Clean).is_none());

    let lines = report.to_json_lines();
    assert_eq!(lines.lines().count(), 7);
    let summary: serde_json::Value = serde_json::from_str(lines.lines().last().unwrap()).unwrap();
    assert_eq!(summary["kind"], "summary");
    assert_eq!(summary["detection_rate"], 1.0);
}

#[test]
fn empty_manifest_is_reported_as_such() {
    let dir = tempfile::tempdir().unwrap();
    let report = evaluate_detector(&ClassicalDetector::default(), &dir.path().join(MANIFEST_FILE), &[]).unwrap();
    assert_eq!(report, DetectorReport::EmptyManifest);
    assert!(report.to_json_lines().contains("empty_manifest"));
}

#[test]
fn missing_image_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let entry = ManifestEntry {
        id: "gone".into(),
        image: "gone.pgm".into(),
        text: "OD02AB1234".into(),
        bbox: Rect::new(0, 0, 10, 10),
        tier: NoiseTier::Clean,
    };
    let err = evaluate_detector(&ClassicalDetector::default(), &dir.path().join(MANIFEST_FILE), &[entry]).unwrap_err();
    assert!(matches!(err, AnprError::MissingImage(..)));
}

#[test]
fn external_detector_round_trip() {
    let script = r#"cat > /dev/null
echo '{"bbox":[1,2,80,20],"angle":0.0,"score":0.25}'
echo '{"bbox":[5,5,60,15],"angle":1.5,"score":0.75}'"#;
    let det = ExternalDetector { name: "sh".into(), program: "sh".into(), args: vec!["-c".into(), script.into()] };
    let img = Image::from(GrayImage::filled(100, 50, 0));
    let dets = det.detect(&img).unwrap();
    assert_eq!(dets.iter().map(|d| d.score).collect::<Vec<_>>(), vec![0.75, 0.25]);
    assert_eq!(dets[1].bbox, Rect::new(1, 2, 80, 20));

    let failing = ExternalDetector { name: "bad".into(), program: "sh".into(), args: vec!["-c".into(), "exit 3".into()] };
    assert!(matches!(failing.detect(&img), Err(AnprError::External(_))));
    let outside = ExternalDetector {
        name: "outside".into(),
        program: "sh".into(),
        args: vec!["-c".into(), r#"echo '{"bbox":[90,0,20,20],"angle":0,"score":0.5}'"#.into()],
    };
    assert!(matches!(outside.detect(&img), Err(AnprError::External(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn rectified_plates_are_256_by_64_full_range(x in 0u32..560, y in 0u32..440, w in 8u32..80, h in 8u32..40, idx in 0u64..4) {
        let s = generate_scene(11, idx, NoiseTier::Noisy).unwrap();
        let img = Image::from(s.image);
        let bbox = Rect::new(x, y, w.min(640 - x), h.min(480 - y));
        let det = Detection { bbox, angle: 0.0, score: 0.5 };
        match rectify_and_normalize(&img, &det) {
            Ok(n) => {
                prop_assert_eq!((n.image().width(), n.image().height()), (PLATE_W, PLATE_H));
                prop_assert_eq!(n.image().min_max(), (0, 255));
            }
            Err(e) => prop_assert!(matches!(e, AnprError::DegenerateCrop), "{e}"),
        }
    }
}
