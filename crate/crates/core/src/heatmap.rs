//! Gaussian heatmap rendering, peak extraction, and soft-argmax decoding,
//! shared by the detector and the tri-plane pose decoder.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Default Gaussian width for detection-grid targets, in cells.
pub const DEFAULT_SIGMA_CELLS: f64 = 2.5;
/// Default soft-argmax temperature.
pub const DEFAULT_TEMPERATURE: f64 = 0.05;
/// Default proposal count.
pub const DEFAULT_TOP_K: usize = 10;
/// Default non-maximum suppression radius, in cells.
pub const DEFAULT_NMS_RADIUS: usize = 3;
/// Default peak confidence threshold.
pub const DEFAULT_PEAK_THRESHOLD: f64 = 0.3;

/// A non-negative 2D heatmap.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap2D {
    pub data: Array2<f64>,
}

impl Heatmap2D {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: Array2::zeros((rows, cols)),
        }
    }

    pub fn extent(&self) -> (usize, usize) {
        self.data.dim()
    }
}

/// A non-negative 1D heatmap.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap1D {
    pub data: Array1<f64>,
}

impl Heatmap1D {
    pub fn zeros(len: usize) -> Self {
        Self {
            data: Array1::zeros(len),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// A sub-cell peak location with its confidence (the maximum cell value).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// (row, col) in sub-cell units.
    pub position: (f64, f64),
    pub confidence: f64,
}

/// Renders `exp(-|p - center|^2 / (2 sigma^2))` over the given extent. The
/// peak value is exactly 1 when the center lies on a grid node.
pub fn render_gaussian(
    extent: (usize, usize),
    center: (f64, f64),
    sigma: f64,
) -> Result<Heatmap2D> {
    if !(sigma > 0.0) {
        return Err(Error::NonPositiveSigma { sigma });
    }
    let inv = 1.0 / (2.0 * sigma * sigma);
    let mut h = Heatmap2D::zeros(extent.0, extent.1);
    for r in 0..extent.0 {
        for c in 0..extent.1 {
            let d2 = (r as f64 - center.0).powi(2) + (c as f64 - center.1).powi(2);
            h.data[[r, c]] = (-d2 * inv).exp();
        }
    }
    Ok(h)
}

/// 1D analogue of [`render_gaussian`].
pub fn render_gaussian_1d(len: usize, center: f64, sigma: f64) -> Result<Heatmap1D> {
    if !(sigma > 0.0) {
        return Err(Error::NonPositiveSigma { sigma });
    }
    let inv = 1.0 / (2.0 * sigma * sigma);
    let mut h = Heatmap1D::zeros(len);
    for i in 0..len {
        let d = i as f64 - center;
        h.data[i] = (-d * d * inv).exp();
    }
    Ok(h)
}

/// Softmax-weighted coordinate expectation over the full map:
/// `position = sum_p p * softmax(h/temperature)[p]`. The confidence is the
/// maximum cell value. Errors on a heatmap with no positive cell.
pub fn soft_argmax(h: &Heatmap2D, temperature: f64) -> Result<Peak> {
    let max = h.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return Err(Error::AllZeroHeatmap);
    }
    let t = temperature.max(1e-12);
    let mut norm = 0.0;
    let mut er = 0.0;
    let mut ec = 0.0;
    for ((r, c), &v) in h.data.indexed_iter() {
        // Subtract the max before exponentiating for numerical stability.
        let w = ((v - max) / t).exp();
        norm += w;
        er += w * r as f64;
        ec += w * c as f64;
    }
    Ok(Peak {
        position: (er / norm, ec / norm),
        confidence: max,
    })
}

/// 1D analogue of [`soft_argmax`].
pub fn soft_argmax_1d(h: &Heatmap1D, temperature: f64) -> Result<(f64, f64)> {
    let max = h.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return Err(Error::AllZeroHeatmap);
    }
    let t = temperature.max(1e-12);
    let mut norm = 0.0;
    let mut ez = 0.0;
    for (i, &v) in h.data.iter().enumerate() {
        let w = ((v - max) / t).exp();
        norm += w;
        ez += w * i as f64;
    }
    Ok((ez / norm, max))
}

/// 1D soft-argmax with the default temperature, returning `(coordinate,
/// confidence)`.
pub fn peak_1d(h: &Heatmap1D) -> Result<(f64, f64)> {
    soft_argmax_1d(h, DEFAULT_TEMPERATURE)
}

/// Greedy descending-value peak selection. Each selected peak suppresses a
/// square window of `nms_radius` cells around it; cells at or below
/// `threshold` are never selected. Peaks come back sorted by confidence.
pub fn top_k_peaks(h: &Heatmap2D, k: usize, nms_radius: usize, threshold: f64) -> Vec<Peak> {
    assert!(k >= 1, "k must be >= 1");
    let (rows, cols) = h.extent();
    let mut suppressed = vec![false; rows * cols];
    let mut peaks = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(usize, usize, f64)> = None;
        for r in 0..rows {
            for c in 0..cols {
                if suppressed[r * cols + c] {
                    continue;
                }
                let v = h.data[[r, c]];
                if v <= threshold {
                    continue;
                }
                if best.map_or(true, |(_, _, bv)| v > bv) {
                    best = Some((r, c, v));
                }
            }
        }
        let Some((r, c, v)) = best else { break };
        peaks.push(Peak {
            position: (r as f64, c as f64),
            confidence: v,
        });
        let r0 = r.saturating_sub(nms_radius);
        let c0 = c.saturating_sub(nms_radius);
        for rr in r0..=(r + nms_radius).min(rows - 1) {
            for cc in c0..=(c + nms_radius).min(cols - 1) {
                suppressed[rr * cols + cc] = true;
            }
        }
    }
    peaks
}
