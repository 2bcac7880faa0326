use park_anpr::{rectify_and_normalize, Detection, NormalizedPlate};
use park_imaging::{BinaryImage, GrayImage, Image};
use park_ocr::*;
use park_plate::{confusion_class, ALPHABET};
use park_synth::glyphs::{glyph, FontStyle, GLYPH_W};
use park_synth::{generate_scene, render_plate, NoiseTier, PlateSpec, SplitMix64, MIN_MARGIN};
use proptest::prelude::*;

fn spec(text: &str, font: FontStyle) -> PlateSpec {
    PlateSpec::fitted(text, 25, 225, font)
}

fn normalized(spec: &PlateSpec) -> NormalizedPlate {
    NormalizedPlate::from_plate_image(&render_plate(spec).unwrap()).unwrap()
}

/// Independent count of differing pixels.
fn hamming(a: &BinaryImage, b: &BinaryImage) -> usize {
    let mut n = 0;
    for y in 0..a.height() {
        for x in 0..a.width() {
            n += (a.get(x, y) != b.get(x, y)) as usize;
        }
    }
    n
}

#[test]
fn clean_plate_splits_into_ten_boxes() {
    for font in FontStyle::ALL {
        let boxes = segment_characters(&normalized(&spec("OD02AB1234", font))).unwrap();
        assert_eq!(boxes.len(), 10, "{font:?}");
        assert!(boxes.windows(2).all(|w| w[0].bbox.right() <= w[1].bbox.x));
        assert!(boxes.iter().all(|b| (b.glyph.width(), b.glyph.height()) == (16, 32)));
    }
}

#[test]
fn uniform_plate_has_no_characters() {
    let plate = NormalizedPlate::from_normalized(GrayImage::filled(256, 64, 200), Detection {
        bbox: park_imaging::Rect::new(0, 0, 256, 64),
        angle: 0.0,
        score: 1.0,
    })
    .unwrap();
    assert_eq!(segment_characters(&plate), Err(OcrError::NoCharacters));
    assert_eq!(recognize_plate(&plate, &build_atlas()).unwrap_err(), OcrError::NoCharacters);
}

#[test]
fn bolt_hole_speckle_is_discarded() {
    // Wider gaps leave room for a blob well clear of the characters.
    let mut s = spec("TS09F4321", FontStyle::Standard);
    s.plate_w = 2 * MIN_MARGIN + 9 * GLYPH_W + 8 * 16;
    let mut img = render_plate(&s).unwrap();
    let clean = segment_characters(&NormalizedPlate::from_plate_image(&img).unwrap()).unwrap();
    // Centre of the first gap, at mid height.
    let gap_x = (clean[0].bbox.right() + clean[1].bbox.x) / 2 * img.width() / 256;
    for y in 19..22 {
        for x in gap_x - 1..gap_x + 2 {
            img.set(x, y, 25);
        }
    }
    let speckled = segment_characters(&NormalizedPlate::from_plate_image(&img).unwrap()).unwrap();
    assert_eq!(speckled.len(), clean.len());
    assert_eq!(speckled, clean);
}

#[test]
fn every_template_matches_itself_exactly() {
    let atlas = build_atlas();
    for (c, templates) in atlas.iter() {
        for t in templates {
            assert_eq!(match_char(t, &atlas), (c, 1.0));
        }
    }
}

#[test]
fn inverted_template_anticorrelates() {
    let atlas = build_atlas();
    let template = &atlas.templates('A').unwrap()[0];
    let inverted = template.inverted();
    assert_eq!(ncc(&inverted, template), -1.0);
    assert_eq!(hamming(&inverted, template), 512);
    assert_ne!(match_char(&inverted, &atlas).0, 'A');
}

#[test]
fn five_percent_flips_still_read_b() {
    let atlas = build_atlas();
    let template = &atlas.templates('B').unwrap()[0];
    let mut rng = SplitMix64::new(2024);
    let mut flipped = template.clone();
    let mut flips = 0;
    while flips < 26 {
        let (x, y) = (rng.range_u32(0, 15), rng.range_u32(0, 31));
        if flipped.get(x, y) == template.get(x, y) {
            flipped.set(x, y, !flipped.get(x, y));
            flips += 1;
        }
    }
    assert_eq!(hamming(&flipped, template), 26);
    let (c, score) = match_char(&flipped, &atlas);
    assert_eq!(c, 'B');
    assert_eq!(score, 1.0 - 2.0 * 26.0 / 512.0);
    assert!(score >= 0.8);
}

#[test]
fn clean_plate_reads_back_without_flags() {
    let atlas = build_atlas();
    for font in FontStyle::ALL {
        let r = recognize_plate(&normalized(&spec("OD02AB1234", font)), &atlas).unwrap();
        assert_eq!(r.text, "OD02AB1234");
        assert_eq!(r.flags, ReadingFlags::default());
        assert_eq!(r.char_confidences.len(), 10);
        assert!(r.elapsed_seconds >= 0.0);
        let shown = r.to_string();
        let lines: Vec<&str> = shown.lines().collect();
        assert!(lines[0].starts_with("time: "));
        assert_eq!(lines[1], "OD02AB1234");
    }
}

#[test]
fn digit_zero_in_letter_slot_is_corrected() {
    // Paint a '0' over the leading 'O' of a rendered plate.
    let s = spec("OD02AB1234", FontStyle::Standard);
    let mut img = render_plate(&s).unwrap();
    let zero = glyph('0', FontStyle::Standard).unwrap();
    let left = MIN_MARGIN;
    let top = MIN_MARGIN;
    for y in 0..zero.height() {
        for x in 0..zero.width() {
            img.set(left + x, top + y, if zero.get(x, y) { s.fg } else { s.bg });
        }
    }
    let plate = NormalizedPlate::from_plate_image(&img).unwrap();
    let atlas = build_atlas();
    let boxes = segment_characters(&plate).unwrap();
    assert_eq!(match_char(&boxes[0].glyph, &atlas).0, '0', "the forced misread");

    let r = recognize_plate(&plate, &atlas).unwrap();
    assert_eq!(r.text, "OD02AB1234");
    assert!(r.flags.grammar_corrected);
}

#[test]
fn reading_is_deterministic() {
    let atlas = build_atlas();
    let s = generate_scene(42, 3, NoiseTier::Noisy).unwrap();
    let img = Image::from(s.image);
    let det = Detection { bbox: s.truth, angle: 0.0, score: 1.0 };
    let a = recognize_plate(&rectify_and_normalize(&img, &det).unwrap(), &atlas).unwrap();
    let b = recognize_plate(&rectify_and_normalize(&img, &det).unwrap(), &atlas).unwrap();
    assert_eq!((a.text, a.char_confidences, a.flags), (b.text.clone(), b.char_confidences, b.flags));
    assert_eq!(b.text, s.plate.text);
}

#[test]
fn clean_scenes_give_a_diagonal_matrix() {
    let atlas = build_atlas();
    let mut pairs = Vec::new();
    for i in 0..20 {
        let s = generate_scene(42, i, NoiseTier::Clean).unwrap();
        let img = Image::from(s.image);
        let det = Detection { bbox: s.truth, angle: 0.0, score: 1.0 };
        let read = rectify_and_normalize(&img, &det).ok().and_then(|p| recognize_plate(&p, &atlas).ok());
        pairs.push((s.plate.text, read.map(|r| r.text)));
    }
    let m = confusion_matrix(pairs.iter().map(|(t, r)| (t.as_str(), r.as_deref())));
    assert!(m.is_diagonal(), "{:?}", m.top_confusions());
    assert_eq!(m.to_csv().lines().count(), 38);
}

fn glyph_strategy() -> impl Strategy<Value = BinaryImage> {
    proptest::collection::vec(any::<bool>(), 512).prop_map(|bits| BinaryImage::from_fn(16, 32, |x, y| bits[(y * 16 + x) as usize]))
}

proptest! {
    #[test]
    fn scores_stay_in_range(g in glyph_strategy()) {
        let atlas = build_atlas();
        let (c, score) = match_char(&g, &atlas);
        prop_assert!((-1.0..=1.0).contains(&score));
        let exact = atlas.iter().any(|(_, ts)| ts.contains(&g));
        prop_assert_eq!(score == 1.0, exact);
        prop_assert!(ALPHABET.contains(&c));
    }

    #[test]
    fn correction_stays_within_classes(
        idx in proptest::collection::vec(0usize..36, 9..=10),
        seed in any::<u64>(),
    ) {
        let raw: String = idx.iter().map(|&i| ALPHABET[i]).collect();
        let mut rng = SplitMix64::new(seed);
        let scores: Vec<[f64; 36]> = idx.iter().map(|_| std::array::from_fn(|_| rng.uniform(-1.0, 1.0))).collect();
        let (fixed, changed) = correct_grammar(&raw, &scores);
        prop_assert_eq!(fixed.chars().count(), raw.chars().count());
        prop_assert_eq!(changed, fixed != raw);
        for (a, b) in raw.chars().zip(fixed.chars()) {
            if a != b {
                prop_assert!(confusion_class(a).is_some_and(|c| c.contains(&b)), "{} -> {}", a, b);
            }
        }
    }
}
