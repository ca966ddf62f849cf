//! Motion prior frames: dense Lucas-Kanade flow between consecutive frames,
//! suppression of low-motion (background) pixels, and rendering of the
//! remaining motion as an image.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// 8-bit interleaved RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbFrame {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbFrame {
    pub fn new(width: usize, height: usize) -> Self {
        RgbFrame {
            width,
            height,
            data: vec![0; width * height * 3],
        }
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&rgb);
        }
        RgbFrame {
            width,
            height,
            data,
        }
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn is_black(&self) -> bool {
        self.data.iter().all(|&c| c == 0)
    }
}

/// Row-major intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayFrame {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl GrayFrame {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension);
        }
        if values.len() != width * height {
            return Err(Error::LengthMismatch {
                what: "gray frame",
                expected: width * height,
                found: values.len(),
            });
        }
        Ok(GrayFrame {
            width,
            height,
            values,
        })
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Replicates the intensity into all three channels.
    pub fn to_rgb(&self) -> RgbFrame {
        let mut out = RgbFrame::new(self.width, self.height);
        for (px, &v) in out.data.chunks_exact_mut(3).zip(&self.values) {
            let c = libm::round(v.clamp(0.0, 1.0) * 255.0) as u8;
            px.copy_from_slice(&[c, c, c]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    pub width: usize,
    pub height: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub valid: Vec<bool>,
}

impl FlowField {
    pub fn zeros(width: usize, height: usize) -> Self {
        let n = width * height;
        FlowField {
            width,
            height,
            u: vec![0.0; n],
            v: vec![0.0; n],
            valid: vec![false; n],
        }
    }

    /// Every pixel valid with the same displacement.
    pub fn uniform(width: usize, height: usize, u: f64, v: f64) -> Self {
        let n = width * height;
        FlowField {
            width,
            height,
            u: vec![u; n],
            v: vec![v; n],
            valid: vec![true; n],
        }
    }

    #[inline]
    pub fn magnitude(&self, i: usize) -> f64 {
        libm::hypot(self.u[i], self.v[i])
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    MagnitudeGray,
    AngleHue,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreprocConfig {
    /// Half-width of the square least-squares window.
    pub window_radius: usize,
    /// Flow magnitude (pixels/frame) below which a pixel is background.
    pub background_threshold: f64,
    /// Smallest accepted eigenvalue of the windowed structure tensor.
    pub min_eigen: f64,
    pub output_size: (usize, usize),
    pub render_mode: RenderMode,
}

impl Default for PreprocConfig {
    fn default() -> Self {
        PreprocConfig {
            window_radius: 2,
            background_threshold: 0.5,
            min_eigen: 1e-4,
            output_size: (180, 180),
            render_mode: RenderMode::MagnitudeGray,
        }
    }
}

impl PreprocConfig {
    pub fn check(&self) -> Result<()> {
        if self.window_radius < 1 {
            return Err(Error::InvalidConfig("window radius must be at least 1"));
        }
        if !(self.background_threshold > 0.0) || !(self.min_eigen > 0.0) {
            return Err(Error::InvalidConfig("thresholds must be positive"));
        }
        if self.output_size.0 == 0 || self.output_size.1 == 0 {
            return Err(Error::InvalidConfig("output size must be non-zero"));
        }
        Ok(())
    }
}

/// Rec. 601 luma scaled to `[0, 1]`.
pub fn to_grayscale(frame: &RgbFrame) -> Result<GrayFrame> {
    if frame.width == 0 || frame.height == 0 {
        return Err(Error::ZeroDimension);
    }
    let values = frame
        .data
        .chunks_exact(3)
        .map(|p| {
            (0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2])) / 255.0
        })
        .collect();
    GrayFrame::new(frame.width, frame.height, values)
}

/// Summed-area table with a zero row/column of padding.
struct Integral {
    stride: usize,
    sums: Vec<f64>,
}

impl Integral {
    fn new(width: usize, height: usize, values: &[f64]) -> Self {
        let stride = width + 1;
        let mut sums = vec![0.0; stride * (height + 1)];
        for y in 0..height {
            let mut row = 0.0;
            for x in 0..width {
                row += values[y * width + x];
                sums[(y + 1) * stride + x + 1] = sums[y * stride + x + 1] + row;
            }
        }
        Integral { stride, sums }
    }

    /// Sum over the inclusive rectangle `[x0, x1] x [y0, y1]`.
    fn window(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> f64 {
        let s = self.stride;
        self.sums[(y1 + 1) * s + x1 + 1] - self.sums[y0 * s + x1 + 1] - self.sums[(y1 + 1) * s + x0]
            + self.sums[y0 * s + x0]
    }
}

fn gradients(frame: &GrayFrame) -> (Vec<f64>, Vec<f64>) {
    let (w, h) = (frame.width, frame.height);
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            gx[y * w + x] = diff(x, w, |i| frame.at(i, y));
            gy[y * w + x] = diff(y, h, |j| frame.at(x, j));
        }
    }
    (gx, gy)
}

/// Central difference along one axis, one-sided at the ends.
#[inline]
fn diff(i: usize, n: usize, at: impl Fn(usize) -> f64) -> f64 {
    if n < 2 {
        0.0
    } else if i == 0 {
        at(1) - at(0)
    } else if i == n - 1 {
        at(n - 1) - at(n - 2)
    } else {
        (at(i + 1) - at(i - 1)) * 0.5
    }
}

/// Dense single-scale Lucas-Kanade flow from `prev` to `next`.
///
/// Each pixel solves the 2x2 normal equations of the brightness-constancy
/// residual over a `(2r+1)^2` window, with spatial gradients taken from the
/// mean of both frames. Pixels closer than `r` to the border or
/// whose structure tensor has smallest eigenvalue below `min_eigen` are left
/// invalid with zero flow.
pub fn lucas_kanade_flow(prev: &GrayFrame, next: &GrayFrame, cfg: &PreprocConfig) -> Result<FlowField> {
    cfg.check()?;
    if (prev.width, prev.height) != (next.width, next.height) {
        return Err(Error::DimensionMismatch {
            expected: (prev.width, prev.height),
            found: (next.width, next.height),
        });
    }
    let (w, h) = (prev.width, prev.height);
    let r = cfg.window_radius;
    let mut flow = FlowField::zeros(w, h);
    if w <= 2 * r || h <= 2 * r {
        return Ok(flow);
    }

    // Gradients of the two frames averaged: for a pure translation this
    // centers the linearization between them, which keeps the per-pixel error
    // small for shifts of a couple of pixels.
    let (px, py) = gradients(prev);
    let (nx, ny) = gradients(next);
    let mean = |a: Vec<f64>, b: Vec<f64>| -> Vec<f64> { a.iter().zip(&b).map(|(p, q)| 0.5 * (p + q)).collect() };
    let (gx, gy) = (mean(px, nx), mean(py, ny));
    let gt: Vec<f64> = next
        .values
        .iter()
        .zip(&prev.values)
        .map(|(n, p)| n - p)
        .collect();
    let prod = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x * y).collect() };
    let ixx = Integral::new(w, h, &prod(&gx, &gx));
    let ixy = Integral::new(w, h, &prod(&gx, &gy));
    let iyy = Integral::new(w, h, &prod(&gy, &gy));
    let ixt = Integral::new(w, h, &prod(&gx, &gt));
    let iyt = Integral::new(w, h, &prod(&gy, &gt));

    for y in r..h - r {
        for x in r..w - r {
            let (x0, y0, x1, y1) = (x - r, y - r, x + r, y + r);
            let a = ixx.window(x0, y0, x1, y1);
            let b = ixy.window(x0, y0, x1, y1);
            let c = iyy.window(x0, y0, x1, y1);
            let half_tr = 0.5 * (a + c);
            let min_eig = half_tr - libm::sqrt(0.25 * (a - c) * (a - c) + b * b);
            if !(min_eig >= cfg.min_eigen) {
                continue;
            }
            let det = a * c - b * b;
            let bx = -ixt.window(x0, y0, x1, y1);
            let by = -iyt.window(x0, y0, x1, y1);
            let u = (c * bx - b * by) / det;
            let v = (a * by - b * bx) / det;
            if u.is_finite() && v.is_finite() {
                let i = y * w + x;
                flow.u[i] = u;
                flow.v[i] = v;
                flow.valid[i] = true;
            }
        }
    }
    Ok(flow)
}

/// Zeroes and invalidates every pixel moving slower than the background
/// threshold.
pub fn suppress_background(flow: &FlowField, cfg: &PreprocConfig) -> FlowField {
    let mut out = flow.clone();
    for i in 0..out.u.len() {
        if !(out.magnitude(i) >= cfg.background_threshold) {
            out.u[i] = 0.0;
            out.v[i] = 0.0;
            out.valid[i] = false;
        }
    }
    out
}

/// Nearest-rank 99th percentile of the valid magnitudes, 0 when none.
fn p99_magnitude(flow: &FlowField) -> f64 {
    let mut mags: Vec<f64> = (0..flow.u.len())
        .filter(|&i| flow.valid[i])
        .map(|i| flow.magnitude(i))
        .collect();
    if mags.is_empty() {
        return 0.0;
    }
    mags.sort_by(f64::total_cmp);
    let rank = libm::ceil(0.99 * mags.len() as f64) as usize;
    mags[rank.clamp(1, mags.len()) - 1]
}

/// HSV with full saturation to 8-bit RGB. `hue` in degrees.
fn hue_to_rgb(hue: f64, value: f64) -> [f64; 3] {
    let h = libm::fmod(hue, 360.0);
    let h = if h < 0.0 { h + 360.0 } else { h } / 60.0;
    let sector = libm::floor(h);
    let f = h - sector;
    let (p, q, t) = (0.0, value * (1.0 - f), value * f);
    match sector as u32 % 6 {
        0 => [value, t, p],
        1 => [q, value, p],
        2 => [p, value, t],
        3 => [p, q, value],
        4 => [t, p, value],
        _ => [value, p, q],
    }
}

/// Renders valid pixels with brightness proportional to flow magnitude,
/// normalized by the 99th-percentile magnitude. Invalid pixels are black and
/// valid pixels never are.
pub fn render_flow(flow: &FlowField, cfg: &PreprocConfig) -> RgbFrame {
    let mut out = RgbFrame::new(flow.width, flow.height);
    let scale = p99_magnitude(flow);
    if scale <= 0.0 {
        return out;
    }
    let quantize = |c: f64| libm::round(c.clamp(0.0, 1.0) * 255.0) as u8;
    for i in 0..flow.u.len() {
        if !flow.valid[i] {
            continue;
        }
        let value = (flow.magnitude(i) / scale).clamp(0.0, 1.0);
        let mut rgb = match cfg.render_mode {
            RenderMode::MagnitudeGray => {
                let c = quantize(value);
                [c, c, c]
            }
            RenderMode::AngleHue => {
                let hue = libm::atan2(flow.v[i], flow.u[i]).to_degrees();
                hue_to_rgb(hue, value).map(quantize)
            }
        };
        // Keep weak but valid motion distinguishable from suppressed pixels.
        if rgb == [0, 0, 0] {
            rgb = match cfg.render_mode {
                RenderMode::MagnitudeGray => [1, 1, 1],
                RenderMode::AngleHue => {
                    let hue = libm::atan2(flow.v[i], flow.u[i]).to_degrees();
                    hue_to_rgb(hue, 1.0).map(|c| u8::from(c >= 0.5))
                }
            };
        }
        out.data[i * 3..i * 3 + 3].copy_from_slice(&rgb);
    }
    out
}

/// Bilinear resampling with pixel-center alignment.
pub fn resize_bilinear(src: &RgbFrame, width: usize, height: usize) -> RgbFrame {
    if (src.width, src.height) == (width, height) {
        return src.clone();
    }
    let mut out = RgbFrame::new(width, height);
    if src.width == 0 || src.height == 0 {
        return out;
    }
    let sx = src.width as f64 / width as f64;
    let sy = src.height as f64 / height as f64;
    let max_x = (src.width - 1) as f64;
    let max_y = (src.height - 1) as f64;
    for y in 0..height {
        let fy = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, max_y);
        let y0 = libm::floor(fy) as usize;
        let y1 = (y0 + 1).min(src.height - 1);
        let wy = fy - y0 as f64;
        for x in 0..width {
            let fx = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, max_x);
            let x0 = libm::floor(fx) as usize;
            let x1 = (x0 + 1).min(src.width - 1);
            let wx = fx - x0 as f64;
            let (p00, p10) = (src.pixel(x0, y0), src.pixel(x1, y0));
            let (p01, p11) = (src.pixel(x0, y1), src.pixel(x1, y1));
            let mut rgb = [0u8; 3];
            for c in 0..3 {
                let top = f64::from(p00[c]) * (1.0 - wx) + f64::from(p10[c]) * wx;
                let bottom = f64::from(p01[c]) * (1.0 - wx) + f64::from(p11[c]) * wx;
                rgb[c] = libm::round(top * (1.0 - wy) + bottom * wy) as u8;
            }
            out.set_pixel(x, y, rgb);
        }
    }
    out
}

/// One output frame of the motion prior video from a consecutive pair.
pub fn process_pair(prev: &GrayFrame, next: &GrayFrame, cfg: &PreprocConfig) -> Result<RgbFrame> {
    let flow = lucas_kanade_flow(prev, next, cfg)?;
    let rendered = render_flow(&suppress_background(&flow, cfg), cfg);
    Ok(resize_bilinear(&rendered, cfg.output_size.0, cfg.output_size.1))
}

/// `N` frames in, `N - 1` rendered motion frames out; frame `t` comes from
/// the pair `(t, t + 1)`.
pub fn process_sequence(frames: &[RgbFrame], cfg: &PreprocConfig) -> Result<Vec<RgbFrame>> {
    cfg.check()?;
    if frames.len() < 2 {
        return Err(Error::Empty("frame sequence (need at least 2 frames)"));
    }
    let gray = frames.iter().map(to_grayscale).collect::<Result<Vec<_>>>()?;
    for g in &gray[1..] {
        if (g.width, g.height) != (gray[0].width, gray[0].height) {
            return Err(Error::DimensionMismatch {
                expected: (gray[0].width, gray[0].height),
                found: (g.width, g.height),
            });
        }
    }
    gray.windows(2)
        .map(|pair| process_pair(&pair[0], &pair[1], cfg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn sinusoid(w: usize, h: usize, shift: f64) -> GrayFrame {
        let mut values = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let xs = x as f64 - shift;
                let v = 0.5
                    + 0.2 * libm::sin(2.0 * PI * xs / 24.0)
                    + 0.2 * libm::cos(2.0 * PI * (y as f64) / 20.0 + 0.3);
                values.push(v);
            }
        }
        GrayFrame::new(w, h, values).unwrap()
    }

    #[test]
    fn grayscale_formula() {
        let g = to_grayscale(&RgbFrame::new(4, 3)).unwrap();
        assert!(g.values.iter().all(|&v| v == 0.0));
        let g = to_grayscale(&RgbFrame::filled(4, 3, [255; 3])).unwrap();
        assert!(g.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        let g = to_grayscale(&RgbFrame::filled(2, 2, [255, 0, 0])).unwrap();
        assert!(g.values.iter().all(|&v| (v - 0.299).abs() < 1e-12));
        assert_eq!(to_grayscale(&RgbFrame::new(0, 5)), Err(Error::ZeroDimension));
    }

    #[test]
    fn identical_frames_give_zero_flow() {
        let f = sinusoid(40, 30, 0.0);
        let flow = lucas_kanade_flow(&f, &f, &PreprocConfig::default()).unwrap();
        assert!(flow.valid_count() > 0);
        assert!(flow.u.iter().chain(&flow.v).all(|&c| c == 0.0));
        let s = suppress_background(&flow, &PreprocConfig::default());
        assert_eq!(s.valid_count(), 0);
    }

    #[test]
    fn constant_frames_are_invalid() {
        let f = GrayFrame::new(20, 20, vec![0.4; 400]).unwrap();
        let g = GrayFrame::new(20, 20, vec![0.6; 400]).unwrap();
        let flow = lucas_kanade_flow(&f, &g, &PreprocConfig::default()).unwrap();
        assert_eq!(flow.valid_count(), 0);
        assert!(flow.u.iter().chain(&flow.v).all(|&c| c == 0.0));
    }

    #[test]
    fn translated_sinusoid_recovered() {
        let cfg = PreprocConfig::default();
        let flow = lucas_kanade_flow(&sinusoid(64, 64, 0.0), &sinusoid(64, 64, 1.0), &cfg).unwrap();
        let r = cfg.window_radius + 1;
        let (mut eu, mut ev, mut n) = (0.0, 0.0, 0.0);
        for y in r..64 - r {
            for x in r..64 - r {
                let i = y * 64 + x;
                if flow.valid[i] {
                    eu += (flow.u[i] - 1.0).abs();
                    ev += flow.v[i].abs();
                    n += 1.0;
                }
            }
        }
        assert!(n > 0.0);
        assert!(eu / n <= 0.25, "mean |u-1| = {}", eu / n);
        assert!(ev / n <= 0.25, "mean |v| = {}", ev / n);
    }

    #[test]
    fn border_pixels_invalid() {
        let cfg = PreprocConfig::default();
        let flow = lucas_kanade_flow(&sinusoid(30, 30, 0.0), &sinusoid(30, 30, 0.5), &cfg).unwrap();
        for y in 0..30 {
            for x in 0..30 {
                if x < 2 || y < 2 || x >= 28 || y >= 28 {
                    assert!(!flow.valid[y * 30 + x]);
                }
            }
        }
        assert!(matches!(
            lucas_kanade_flow(&sinusoid(30, 30, 0.0), &sinusoid(31, 30, 0.0), &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn suppression_keeps_only_fast_pixels() {
        let cfg = PreprocConfig::default();
        let mut f = FlowField::uniform(5, 5, 0.0, 0.0);
        let all = suppress_background(&f, &cfg);
        assert_eq!(all.valid_count(), 0);
        f.u[12] = 2.0 * cfg.background_threshold;
        let s = suppress_background(&f, &cfg);
        assert_eq!(s.valid_count(), 1);
        assert!(s.valid[12]);
        assert_eq!(s.u[12], 1.0);
    }

    #[test]
    fn render_examples() {
        let cfg = PreprocConfig::default();
        assert!(render_flow(&FlowField::zeros(8, 8), &cfg).is_black());
        let img = render_flow(&FlowField::uniform(8, 8, 1.0, 0.0), &cfg);
        let first = img.pixel(0, 0);
        assert_ne!(first, [0, 0, 0]);
        assert!(img.data.chunks_exact(3).all(|p| p == first));

        let hue = PreprocConfig {
            render_mode: RenderMode::AngleHue,
            ..cfg
        };
        let right = render_flow(&FlowField::uniform(2, 2, 1.0, 0.0), &hue).pixel(0, 0);
        let left = render_flow(&FlowField::uniform(2, 2, -1.0, 0.0), &hue).pixel(0, 0);
        assert_eq!(right, [255, 0, 0]);
        for c in 0..3 {
            assert_eq!(u16::from(right[c]) + u16::from(left[c]), 255);
        }
    }

    #[test]
    fn resize_to_output_size() {
        let img = RgbFrame::filled(64, 48, [10, 20, 30]);
        let out = resize_bilinear(&img, 180, 180);
        assert_eq!((out.width, out.height), (180, 180));
        assert!(out.data.chunks_exact(3).all(|p| p == [10, 20, 30]));
    }

    #[test]
    fn sequence_counts_and_black_for_static() {
        let still = sinusoid(32, 32, 0.0).to_rgb();
        let out = process_sequence(&[still.clone(), still.clone()], &PreprocConfig::default()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!((out[0].width, out[0].height), (180, 180));
        assert!(out[0].is_black());
        assert!(process_sequence(&[still], &PreprocConfig::default()).is_err());
    }

    fn arb_field() -> impl Strategy<Value = FlowField> {
        prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0, any::<bool>()), 36).prop_map(|px| {
            let mut f = FlowField::zeros(6, 6);
            for (i, (u, v, ok)) in px.into_iter().enumerate() {
                if ok {
                    f.u[i] = u;
                    f.v[i] = v;
                    f.valid[i] = true;
                }
            }
            f
        })
    }

    proptest! {
        #[test]
        fn suppression_idempotent(f in arb_field()) {
            let cfg = PreprocConfig::default();
            let once = suppress_background(&f, &cfg);
            prop_assert_eq!(suppress_background(&once, &cfg), once);
        }

        #[test]
        fn rendered_black_exactly_where_suppressed(f in arb_field(), hue in any::<bool>()) {
            let cfg = PreprocConfig {
                render_mode: if hue { RenderMode::AngleHue } else { RenderMode::MagnitudeGray },
                ..PreprocConfig::default()
            };
            let s = suppress_background(&f, &cfg);
            let img = render_flow(&s, &cfg);
            for i in 0..36 {
                let black = img.data[i * 3..i * 3 + 3] == [0, 0, 0];
                prop_assert_eq!(black, !s.valid[i]);
            }
        }
    }
}
