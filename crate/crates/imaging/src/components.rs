use crate::{BinaryImage, Rect};

/// Per-pixel component labels; 0 is background, components are numbered from 1
/// in the order a row-major scan first reaches them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabels {
    width: u32,
    height: u32,
    labels: Vec<u32>,
    count: u32,
}

/// Geometry of one labelled component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentStats {
    pub label: u32,
    pub bbox: Rect,
    pub area: u64,
}

impl ComponentStats {
    /// Foreground fraction of the bounding box.
    pub fn fill_ratio(&self) -> f64 {
        self.area as f64 / self.bbox.area() as f64
    }
}

impl ComponentLabels {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn component_count(&self) -> u32 {
        self.count
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn label_at(&self, x: u32, y: u32) -> u32 {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    /// Bounding box and area of every component, indexed by `label - 1`.
    pub fn stats(&self) -> Vec<ComponentStats> {
        let mut acc: Vec<(u32, u32, u32, u32, u64)> =
            vec![(u32::MAX, u32::MAX, 0, 0, 0); self.count as usize];
        for (i, &l) in self.labels.iter().enumerate() {
            if l == 0 {
                continue;
            }
            let x = (i % self.width as usize) as u32;
            let y = (i / self.width as usize) as u32;
            let e = &mut acc[l as usize - 1];
            e.0 = e.0.min(x);
            e.1 = e.1.min(y);
            e.2 = e.2.max(x);
            e.3 = e.3.max(y);
            e.4 += 1;
        }
        acc.into_iter()
            .enumerate()
            .map(|(i, (x0, y0, x1, y1, area))| ComponentStats {
                label: i as u32 + 1,
                bbox: Rect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1),
                area,
            })
            .collect()
    }

    /// Binary mask of a single component.
    pub fn mask(&self, label: u32) -> BinaryImage {
        let data = self.labels.iter().map(|&l| (l == label) as u8).collect();
        BinaryImage::new(self.width, self.height, data).expect("mask has label dimensions")
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let up = parent[parent[x as usize] as usize];
        parent[x as usize] = up;
        x = up;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

/// 8-connected component labelling (two-pass union-find).
///
/// Provisional labels are created in raster order and merged towards the
/// smallest provisional label, so resolving each root and renumbering on first
/// sight during a second raster scan gives first-visit order.
pub fn connected_components(bin: &BinaryImage) -> ComponentLabels {
    let (w, h) = (bin.width() as usize, bin.height() as usize);
    let src = bin.data();
    let mut provisional = vec![0u32; w * h];
    // parent[0] is unused so labels can start at 1
    let mut parent: Vec<u32> = vec![0];

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if src[i] == 0 {
                continue;
            }
            let mut current = 0u32;
            let mut neighbours = [0u32; 4];
            if x > 0 {
                neighbours[0] = provisional[i - 1];
            }
            if y > 0 {
                let up = i - w;
                if x > 0 {
                    neighbours[1] = provisional[up - 1];
                }
                neighbours[2] = provisional[up];
                if x + 1 < w {
                    neighbours[3] = provisional[up + 1];
                }
            }
            for &n in neighbours.iter().filter(|&&n| n != 0) {
                if current == 0 {
                    current = n;
                } else {
                    union(&mut parent, current, n);
                }
            }
            if current == 0 {
                current = parent.len() as u32;
                parent.push(current);
            }
            provisional[i] = current;
        }
    }

    let mut final_label = vec![0u32; parent.len()];
    let mut count = 0u32;
    let mut labels = provisional;
    for l in labels.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = find(&mut parent, *l);
        if final_label[root as usize] == 0 {
            count += 1;
            final_label[root as usize] = count;
        }
        *l = final_label[root as usize];
    }

    ComponentLabels {
        width: bin.width(),
        height: bin.height(),
        labels,
        count,
    }
}
