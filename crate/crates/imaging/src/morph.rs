use crate::{BinaryImage, ImagingError};

fn check_kernel(kw: u32, kh: u32) -> Result<(), ImagingError> {
    if kw == 0 || kh == 0 || kw.is_multiple_of(2) || kh.is_multiple_of(2) {
        return Err(ImagingError::InvalidKernel(kw, kh));
    }
    Ok(())
}

/// One separable pass over rows (`horizontal`) or columns with a window of
/// half-width `r`. Dilation keeps a pixel set if any in-window pixel is set;
/// erosion requires every window position to be inside the image and set.
fn pass(src: &[u8], w: usize, h: usize, r: usize, horizontal: bool, dilate: bool) -> Vec<u8> {
    if r == 0 {
        return src.to_vec();
    }
    let mut out = vec![0u8; src.len()];
    let (lines, len) = if horizontal { (h, w) } else { (w, h) };
    let index = |line: usize, i: usize| if horizontal { line * w + i } else { i * w + line };
    // prefix[i] = number of set pixels in line[..i]
    let mut prefix = vec![0u32; len + 1];
    for line in 0..lines {
        for i in 0..len {
            prefix[i + 1] = prefix[i] + src[index(line, i)] as u32;
        }
        for i in 0..len {
            let lo = i.saturating_sub(r);
            let hi = (i + r + 1).min(len);
            let ones = prefix[hi] - prefix[lo];
            let set = if dilate {
                ones > 0
            } else {
                // out-of-bounds positions count as background
                ones as usize == 2 * r + 1
            };
            out[index(line, i)] = set as u8;
        }
    }
    out
}

fn apply(bin: &BinaryImage, kw: u32, kh: u32, dilate: bool) -> Result<BinaryImage, ImagingError> {
    check_kernel(kw, kh)?;
    let (w, h) = (bin.width() as usize, bin.height() as usize);
    let rows = pass(bin.data(), w, h, (kw / 2) as usize, true, dilate);
    let data = pass(&rows, w, h, (kh / 2) as usize, false, dilate);
    BinaryImage::new(bin.width(), bin.height(), data)
}

/// Dilation by a `kernel_w` x `kernel_h` rectangle centred on each pixel.
pub fn dilate(bin: &BinaryImage, kernel_w: u32, kernel_h: u32) -> Result<BinaryImage, ImagingError> {
    apply(bin, kernel_w, kernel_h, true)
}

/// Erosion by a rectangle; pixels outside the image are treated as 0.
pub fn erode(bin: &BinaryImage, kernel_w: u32, kernel_h: u32) -> Result<BinaryImage, ImagingError> {
    apply(bin, kernel_w, kernel_h, false)
}

/// Morphological closing: dilation followed by erosion with the same
/// rectangular structuring element. Kernel sides must be odd.
pub fn morph_close(bin: &BinaryImage, kernel_w: u32, kernel_h: u32) -> Result<BinaryImage, ImagingError> {
    erode(&dilate(bin, kernel_w, kernel_h)?, kernel_w, kernel_h)
}
