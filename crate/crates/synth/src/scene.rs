use park_imaging::{sample_bilinear, GrayImage, Rect};
use serde::{Deserialize, Serialize};

use crate::{SplitMix64, SynthError};

/// How a plate is placed: `position` is the top-left corner of the axis-aligned
/// box around the scaled and rotated plate. Positive rotation is
/// counter-clockwise as seen on screen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub position: (u32, u32),
    pub scale: f64,
    pub rotation_deg: f64,
}

impl Placement {
    /// Width and height of the transformed plate's bounding box.
    pub fn extent(&self, plate_w: u32, plate_h: u32) -> (f64, f64) {
        let (s, c) = self.rotation_deg.to_radians().sin_cos();
        let (s, c) = (s.abs(), c.abs());
        let (w, h) = (plate_w as f64 * self.scale, plate_h as f64 * self.scale);
        (w * c + h * s, w * s + h * c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub canvas_w: u32,
    pub canvas_h: u32,
    pub placement: Placement,
    pub noise_sigma: f64,
    pub distractor_count: u32,
    pub rng_seed: u64,
}

pub const MAX_ROTATION_DEG: f64 = 15.0;

/// Pastes `plate` onto `canvas` with bilinear sampling and returns the tight
/// box of the pixels it covered.
///
/// A canvas pixel is covered when its centre maps inside the plate rectangle,
/// so with scale 1 and no rotation the plate is copied verbatim.
pub fn paste_plate(canvas: &mut GrayImage, plate: &GrayImage, placement: &Placement) -> Result<Rect, SynthError> {
    if !(placement.scale > 0.0 && placement.scale.is_finite()) {
        return Err(SynthError::InvalidScene(format!("scale {} must be positive", placement.scale)));
    }
    if placement.rotation_deg.is_nan() || placement.rotation_deg.abs() > MAX_ROTATION_DEG {
        return Err(SynthError::InvalidScene(format!(
            "rotation {} outside [-15, 15]",
            placement.rotation_deg
        )));
    }
    let (ext_w, ext_h) = placement.extent(plate.width(), plate.height());
    let (px, py) = (placement.position.0 as f64, placement.position.1 as f64);
    if px + ext_w > canvas.width() as f64 || py + ext_h > canvas.height() as f64 {
        return Err(SynthError::PlateOutOfBounds);
    }

    let (cx, cy) = (px + ext_w / 2.0, py + ext_h / 2.0);
    let (sin, cos) = placement.rotation_deg.to_radians().sin_cos();
    let (half_w, half_h) = (plate.width() as f64 / 2.0, plate.height() as f64 / 2.0);
    let x_end = ((px + ext_w).ceil() as u32).min(canvas.width());
    let y_end = ((py + ext_h).ceil() as u32).min(canvas.height());

    let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0, 0);
    for y in placement.position.1..y_end {
        for x in placement.position.0..x_end {
            let dx = x as f64 + 0.5 - cx;
            let dy = y as f64 + 0.5 - cy;
            let u = (dx * cos - dy * sin) / placement.scale;
            let v = (dx * sin + dy * cos) / placement.scale;
            if u < -half_w || u >= half_w || v < -half_h || v >= half_h {
                continue;
            }
            let value = sample_bilinear(plate, u + half_w - 0.5, v + half_h - 0.5);
            canvas.set(x, y, value.round().clamp(0.0, 255.0) as u8);
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
    }
    if x0 == u32::MAX {
        return Err(SynthError::InvalidScene("plate covers no pixels".into()));
    }
    Ok(Rect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1))
}

/// Low-frequency linear gradient plus sparse speckle.
fn textured_background(w: u32, h: u32, rng: &mut SplitMix64) -> GrayImage {
    let base = rng.uniform(80.0, 160.0);
    let gx = rng.uniform(-40.0, 40.0) / w as f64;
    let gy = rng.uniform(-40.0, 40.0) / h as f64;
    GrayImage::from_fn(w, h, |x, y| {
        let mut v = base + gx * x as f64 + gy * y as f64;
        if rng.chance(0.02) {
            v += rng.uniform(-20.0, 20.0);
        }
        v.round().clamp(0.0, 255.0) as u8
    })
}

/// Solid rectangles whose aspect ratio is clearly not plate-like, kept at
/// least `keep_out` pixels from `avoid`.
fn draw_distractors(canvas: &mut GrayImage, count: u32, avoid: Rect, rng: &mut SplitMix64) {
    const KEEP_OUT: i64 = 16;
    let (cw, ch) = (canvas.width(), canvas.height());
    for _ in 0..count {
        let level = rng.range_u32(0, 255) as u8;
        for _attempt in 0..50 {
            let (w, h) = if rng.chance(0.5) {
                // squarish or tall
                let h = rng.range_u32(20, 120);
                let aspect = rng.uniform(0.3, 1.5);
                (((h as f64 * aspect).round() as u32).max(4), h)
            } else {
                // much wider than a plate
                let h = rng.range_u32(6, 16);
                let aspect = rng.uniform(9.0, 14.0);
                (((h as f64 * aspect).round() as u32).max(4), h)
            };
            if w + 2 > cw || h + 2 > ch {
                continue;
            }
            let x = rng.range_u32(1, cw - w - 1);
            let y = rng.range_u32(1, ch - h - 1);
            let separated = x as i64 + w as i64 + KEEP_OUT <= avoid.x as i64
                || avoid.right() as i64 + KEEP_OUT <= x as i64
                || y as i64 + h as i64 + KEEP_OUT <= avoid.y as i64
                || avoid.bottom() as i64 + KEEP_OUT <= y as i64;
            if !separated {
                continue;
            }
            for yy in y..y + h {
                for xx in x..x + w {
                    canvas.set(xx, yy, level);
                }
            }
            break;
        }
    }
}

fn add_noise(canvas: &mut GrayImage, sigma: f64, rng: &mut SplitMix64) {
    for v in canvas.data_mut() {
        let noisy = *v as f64 + sigma * rng.gaussian();
        *v = noisy.round().clamp(0.0, 255.0) as u8;
    }
}

/// Builds a scene: textured background, distractors, the plate, then additive
/// Gaussian noise. Returns the scene and the plate's ground-truth box.
///
/// Draw order from the scene generator is fixed (background, distractors,
/// noise), so a given spec always renders the same bytes.
pub fn compose_scene(plate: &GrayImage, scene: &SceneSpec) -> Result<(GrayImage, Rect), SynthError> {
    if scene.canvas_w == 0 || scene.canvas_h == 0 {
        return Err(SynthError::InvalidScene("empty canvas".into()));
    }
    if !(scene.noise_sigma >= 0.0 && scene.noise_sigma.is_finite()) {
        return Err(SynthError::InvalidScene(format!("noise sigma {}", scene.noise_sigma)));
    }
    let mut rng = SplitMix64::new(scene.rng_seed);
    let mut canvas = textured_background(scene.canvas_w, scene.canvas_h, &mut rng);

    // Validate placement before spending effort on distractors.
    let (ext_w, ext_h) = scene.placement.extent(plate.width(), plate.height());
    let (px, py) = scene.placement.position;
    if px as f64 + ext_w > scene.canvas_w as f64 || py as f64 + ext_h > scene.canvas_h as f64 {
        return Err(SynthError::PlateOutOfBounds);
    }
    let reserved = Rect::new(px, py, ext_w.ceil() as u32, ext_h.ceil() as u32);
    draw_distractors(&mut canvas, scene.distractor_count, reserved, &mut rng);
    let truth = paste_plate(&mut canvas, plate, &scene.placement)?;
    if scene.noise_sigma > 0.0 {
        add_noise(&mut canvas, scene.noise_sigma, &mut rng);
    }
    Ok((canvas, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{render_plate, FontStyle, PlateSpec};

    fn plate() -> GrayImage {
        render_plate(&PlateSpec::fitted("OD02AB1234", 25, 225, FontStyle::Standard)).unwrap()
    }

    fn scene(position: (u32, u32), rotation_deg: f64, noise_sigma: f64) -> SceneSpec {
        SceneSpec {
            canvas_w: 640,
            canvas_h: 480,
            placement: Placement {
                position,
                scale: 1.0,
                rotation_deg,
            },
            noise_sigma,
            distractor_count: 3,
            rng_seed: 17,
        }
    }

    #[test]
    fn identity_placement_copies_plate() {
        let p = plate();
        let (img, truth) = compose_scene(&p, &scene((100, 200), 0.0, 0.0)).unwrap();
        assert_eq!(truth, Rect::new(100, 200, p.width(), p.height()));
        assert_eq!(img.crop(truth).unwrap(), p);
    }

    #[test]
    fn same_seed_same_bytes() {
        let p = plate();
        let s = scene((50, 60), 7.0, 8.0);
        assert_eq!(compose_scene(&p, &s).unwrap(), compose_scene(&p, &s).unwrap());
        let mut other = s.clone();
        other.rng_seed += 1;
        assert_ne!(compose_scene(&p, &s).unwrap().0, compose_scene(&p, &other).unwrap().0);
    }

    #[test]
    fn rotated_box_matches_analytic_extent() {
        let p = plate();
        for deg in [-15.0, -10.0, -3.0, 5.0, 10.0, 15.0] {
            let (_, truth) = compose_scene(&p, &scene((100, 100), deg, 0.0)).unwrap();
            let t = f64::to_radians(deg).abs();
            let (w, h) = (p.width() as f64, p.height() as f64);
            let expect_w = (w * t.cos() + h * t.sin()).ceil();
            let expect_h = (w * t.sin() + h * t.cos()).ceil();
            assert!((truth.w as f64 - expect_w).abs() <= 1.0, "{deg}: {} vs {expect_w}", truth.w);
            assert!((truth.h as f64 - expect_h).abs() <= 1.0, "{deg}: {} vs {expect_h}", truth.h);
        }
    }

    #[test]
    fn out_of_bounds_is_rejected() {
        let p = plate();
        assert!(matches!(
            compose_scene(&p, &scene((500, 100), 0.0, 0.0)),
            Err(SynthError::PlateOutOfBounds)
        ));
        assert!(matches!(
            compose_scene(&p, &scene((100, 100), 20.0, 0.0)),
            Err(SynthError::InvalidScene(_))
        ));
    }

    #[test]
    fn distractors_keep_clear_of_plate() {
        let p = plate();
        let mut s = scene((200, 200), 0.0, 0.0);
        s.distractor_count = 20;
        let (img, truth) = compose_scene(&p, &s).unwrap();
        assert_eq!(img.crop(truth).unwrap(), p);
    }
}
