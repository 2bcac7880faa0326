use park_imaging::Rect;

/// Intersection over union of two boxes; 0 for disjoint or empty boxes.
pub fn iou(a: Rect, b: Rect) -> f64 {
    let ix = a.right().min(b.right()).saturating_sub(a.x.max(b.x)) as u64;
    let iy = a.bottom().min(b.bottom()).saturating_sub(a.y.max(b.y)) as u64;
    let inter = ix * iy;
    let union = a.area() + b.area() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}
