use park_imaging::Rect;

/// Skew angle in degrees from a least-squares line through the centre row of
/// each column of a foreground mask restricted to `bbox`.
///
/// A column's centre is the midpoint of its topmost and bottommost foreground
/// pixels. On a text line this follows the line itself, where the ink centroid
/// would drift with glyph shapes (a `7` is top-heavy, an `L` bottom-heavy).
/// After the first fit, columns more than 3 px off the line are dropped and
/// the line is refitted once.
///
/// Image rows grow downwards, so a plate whose right end is raised yields a
/// negative angle. Returns `None` with fewer than two inked columns.
pub(crate) fn fit_skew_deg(bbox: Rect, is_fg: impl Fn(u32, u32) -> bool) -> Option<f64> {
    let mut points = Vec::with_capacity(bbox.w as usize);
    for x in bbox.x..bbox.right() {
        let mut rows = (bbox.y..bbox.bottom()).filter(|&y| is_fg(x, y));
        if let Some(top) = rows.next() {
            let bottom = rows.last().unwrap_or(top);
            points.push((x as f64, (top + bottom) as f64 / 2.0));
        }
    }
    let (slope, intercept) = line_fit(&points)?;
    let inliers: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(x, y)| (y - (slope * x + intercept)).abs() <= 3.0)
        .collect();
    let (slope, _) = line_fit(&inliers).unwrap_or((slope, intercept));
    Some(slope.atan().to_degrees())
}

fn line_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in points {
        sxy += (x - mean_x) * (y - mean_y);
        sxx += (x - mean_x) * (x - mean_x);
    }
    let slope = sxy / sxx;
    Some((slope, mean_y - slope * mean_x))
}

/// Side lengths of a rectangle rotated by `angle_deg` whose axis-aligned box is
/// `w x h`, falling back to the box itself when the inversion is unstable.
pub(crate) fn unrotated_size(w: f64, h: f64, angle_deg: f64) -> (f64, f64) {
    let (s, c) = angle_deg.to_radians().abs().sin_cos();
    let det = c * c - s * s;
    if det < 0.5 {
        return (w, h);
    }
    let inner_w = (w * c - h * s) / det;
    let inner_h = (h * c - w * s) / det;
    if inner_w < 8.0 || inner_h < 8.0 {
        return (w, h);
    }
    (inner_w, inner_h)
}
