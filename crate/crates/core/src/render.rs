//! Stimulus and afterimage rasterization.
//!
//! Images are built as real-valued [`ColorField`]s, optionally blurred, and
//! quantized to 8-bit RGB as the very last step (`round(255·c)` per channel,
//! no transfer curve). Row loops run through [`Exec`].

use std::io::Cursor;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::Rgb;
use crate::exec::{for_each_row, Exec};
use crate::model::{self, BaselineScheme, ModelError, StimulusSpec};

pub const DEFAULT_SIZE: u32 = 512;
pub const DEFAULT_RADIUS: f64 = 100.0;
pub const DEFAULT_SIGMA: f64 = 4.0;

/// Samples per axis when estimating edge-pixel coverage.
const SUPERSAMPLE: usize = 4;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("blur sigma must be positive and finite, got {0}")]
    Sigma(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("png encoding failed: {0}")]
    Encode(#[from] png::EncodingError),
    #[error("png decoding failed: {0}")]
    Decode(#[from] png::DecodingError),
    #[error("unsupported png layout: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A circular test field inside a rectangular inducing field.
///
/// The circle must sit inside the rectangle with a margin of at least half
/// its radius on every side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    width: u32,
    height: u32,
    center_x: f64,
    center_y: f64,
    radius: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry::centered(DEFAULT_SIZE, DEFAULT_SIZE, DEFAULT_RADIUS)
            .expect("default geometry is valid")
    }
}

impl Geometry {
    pub fn new(
        width: u32,
        height: u32,
        center_x: f64,
        center_y: f64,
        radius: f64,
    ) -> Result<Self, RenderError> {
        if width == 0 || height == 0 {
            return Err(RenderError::Geometry(format!(
                "image must be non-empty, got {width}x{height}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(RenderError::Geometry(format!(
                "circle radius must be positive, got {radius}"
            )));
        }
        let margin = radius / 2.0;
        let fits = center_x - radius >= margin
            && center_x + radius <= width as f64 - margin
            && center_y - radius >= margin
            && center_y + radius <= height as f64 - margin;
        if !fits {
            return Err(RenderError::Geometry(format!(
                "circle of radius {radius} at ({center_x}, {center_y}) needs a margin of {margin} px inside {width}x{height}"
            )));
        }
        Ok(Geometry {
            width,
            height,
            center_x,
            center_y,
            radius,
        })
    }

    pub fn centered(width: u32, height: u32, radius: f64) -> Result<Self, RenderError> {
        Geometry::new(
            width,
            height,
            width as f64 / 2.0,
            height as f64 / 2.0,
            radius,
        )
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn center(&self) -> (f64, f64) {
        (self.center_x, self.center_y)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The pixel containing the circle center.
    pub fn center_pixel(&self) -> (u32, u32) {
        (self.center_x as u32, self.center_y as u32)
    }

    /// A pixel of the inducing field, as far from the circle as possible.
    pub fn surround_pixel(&self) -> (u32, u32) {
        (0, 0)
    }

    /// Fraction of pixel `(x, y)` covered by the circle.
    fn coverage(&self, x: usize, y: usize) -> f64 {
        let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
        let d = (px - self.center_x).hypot(py - self.center_y);
        let half_diag = std::f64::consts::FRAC_1_SQRT_2;
        if d + half_diag <= self.radius {
            return 1.0;
        }
        if d - half_diag >= self.radius {
            return 0.0;
        }
        let r2 = self.radius * self.radius;
        let step = 1.0 / SUPERSAMPLE as f64;
        let mut inside = 0;
        for sy in 0..SUPERSAMPLE {
            for sx in 0..SUPERSAMPLE {
                let dx = x as f64 + (sx as f64 + 0.5) * step - self.center_x;
                let dy = y as f64 + (sy as f64 + 0.5) * step - self.center_y;
                if dx * dx + dy * dy < r2 {
                    inside += 1;
                }
            }
        }
        inside as f64 / (SUPERSAMPLE * SUPERSAMPLE) as f64
    }
}

/// Real-valued RGB pixels, rows top to bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorField {
    width: usize,
    height: usize,
    pixels: Vec<[f64; 3]>,
}

impl ColorField {
    pub fn uniform(width: usize, height: usize, c: Rgb) -> Self {
        ColorField {
            width,
            height,
            pixels: vec![c.components(); width * height],
        }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<[f64; 3]>) -> Self {
        assert_eq!(pixels.len(), width * height, "pixel count mismatch");
        ColorField {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.pixels
    }

    /// Per-channel sum over all pixels.
    pub fn channel_sums(&self) -> [f64; 3] {
        self.pixels.iter().fold([0.0; 3], |mut acc, p| {
            for (a, v) in acc.iter_mut().zip(p) {
                *a += v;
            }
            acc
        })
    }

    pub fn quantize(&self) -> RasterImage {
        let mut data = Vec::with_capacity(self.pixels.len() * 3);
        for p in &self.pixels {
            data.extend(p.iter().map(|&v| quantize_channel(v)));
        }
        RasterImage {
            width: self.width as u32,
            height: self.height as u32,
            data,
        }
    }
}

/// `round(255·v)`, saturating at the ends of the byte range.
pub fn quantize_channel(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

pub fn quantize(c: Rgb) -> [u8; 3] {
    c.components().map(quantize_channel)
}

/// 8-bit RGB pixels, rows top to bottom, no padding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl RasterImage {
    pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Result<Self, RenderError> {
        if data.len() != width as usize * height as usize * 3 {
            return Err(RenderError::Geometry(format!(
                "{} bytes cannot hold a {width}x{height} RGB image",
                data.len()
            )));
        }
        Ok(RasterImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }

    pub fn to_field(&self) -> ColorField {
        let pixels = self
            .pixels()
            .map(|p| p.map(|v| v as f64 / 255.0))
            .collect();
        ColorField::from_pixels(self.width as usize, self.height as usize, pixels)
    }
}

/// Gaussian blur strength. The kernel spans `radius` pixels on either side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlurSettings {
    sigma: f64,
    radius: usize,
}

impl Default for BlurSettings {
    fn default() -> Self {
        BlurSettings::new(DEFAULT_SIGMA).expect("default sigma is valid")
    }
}

impl BlurSettings {
    /// Truncates the kernel at `ceil(3σ)`.
    pub fn new(sigma: f64) -> Result<Self, RenderError> {
        let radius = (3.0 * sigma).ceil();
        BlurSettings::with_radius(sigma, if radius.is_finite() { radius as usize } else { 0 })
    }

    pub fn with_radius(sigma: f64, radius: usize) -> Result<Self, RenderError> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(RenderError::Sigma(sigma));
        }
        Ok(BlurSettings { sigma, radius })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Normalized 1-D kernel of length `2·radius + 1`.
    pub fn kernel(&self) -> Vec<f64> {
        let r = self.radius as isize;
        let two_s2 = 2.0 * self.sigma * self.sigma;
        let raw: Vec<f64> = (-r..=r)
            .map(|i| (-((i * i) as f64) / two_s2).exp())
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }
}

/// Separable Gaussian convolution with edge-clamped borders.
pub fn blur_field(field: &ColorField, blur: &BlurSettings, exec: Exec) -> ColorField {
    let kernel = blur.kernel();
    let r = blur.radius as isize;
    let (w, h) = (field.width, field.height);
    if w == 0 || h == 0 {
        return field.clone();
    }
    let src = &field.pixels;

    let mut horizontal = vec![[0.0; 3]; w * h];
    for_each_row(&mut horizontal, w, exec, |y, row| {
        let line = &src[y * w..(y + 1) * w];
        for (x, out) in row.iter_mut().enumerate() {
            let mut acc = [0.0; 3];
            for (k, weight) in kernel.iter().enumerate() {
                let sx = (x as isize + k as isize - r).clamp(0, w as isize - 1) as usize;
                let p = line[sx];
                for c in 0..3 {
                    acc[c] += weight * p[c];
                }
            }
            *out = acc;
        }
    });

    let mut out = vec![[0.0; 3]; w * h];
    for_each_row(&mut out, w, exec, |y, row| {
        for (k, weight) in kernel.iter().enumerate() {
            let sy = (y as isize + k as isize - r).clamp(0, h as isize - 1) as usize;
            let line = &horizontal[sy * w..(sy + 1) * w];
            for (o, p) in row.iter_mut().zip(line) {
                for c in 0..3 {
                    o[c] += weight * p[c];
                }
            }
        }
    });

    ColorField::from_pixels(w, h, out)
}

/// Blurs an 8-bit image. Channels are blurred in `[0, 1]` space and
/// re-quantized once at the end.
pub fn gaussian_blur(img: &RasterImage, blur: &BlurSettings) -> RasterImage {
    blur_field(&img.to_field(), blur, Exec::default()).quantize()
}

pub fn stimulus_field(g: &Geometry, test: Rgb, inducing: Rgb, exec: Exec) -> ColorField {
    let (w, h) = (g.width as usize, g.height as usize);
    let t = test.components();
    let s = inducing.components();
    let mut pixels = vec![s; w * h];
    for_each_row(&mut pixels, w, exec, |y, row| {
        for (x, px) in row.iter_mut().enumerate() {
            let cov = g.coverage(x, y);
            if cov == 1.0 {
                *px = t;
            } else if cov > 0.0 {
                *px = std::array::from_fn(|i| cov * t[i] + (1.0 - cov) * s[i]);
            }
        }
    });
    ColorField::from_pixels(w, h, pixels)
}

/// Test-colored circle on an inducing-colored rectangle, anti-aliased edge.
pub fn render_stimulus(g: &Geometry, test: Rgb, inducing: Rgb) -> RasterImage {
    stimulus_field(g, test, inducing, Exec::default()).quantize()
}

pub fn render_uniform(g: &Geometry, c: Rgb) -> RasterImage {
    let q = quantize(c);
    let n = g.width as usize * g.height as usize;
    RasterImage {
        width: g.width,
        height: g.height,
        data: q.repeat(n),
    }
}

/// A stimulus-shaped image in afterimage colors, blurred before quantizing.
pub fn render_afterimage_panel(
    g: &Geometry,
    pred_test: Rgb,
    pred_inducing: Rgb,
    blur: &BlurSettings,
) -> RasterImage {
    render_afterimage_panel_with(g, pred_test, pred_inducing, blur, Exec::default())
}

pub fn render_afterimage_panel_with(
    g: &Geometry,
    pred_test: Rgb,
    pred_inducing: Rgb,
    blur: &BlurSettings,
    exec: Exec,
) -> RasterImage {
    let field = stimulus_field(g, pred_test, pred_inducing, exec);
    blur_field(&field, blur, exec).quantize()
}

/// The four comparison panels for one stimulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigurePanels {
    /// The adapting stimulus.
    pub a: RasterImage,
    /// The new uniform field.
    pub b: RasterImage,
    /// Complementary baseline afterimage.
    pub c: RasterImage,
    /// Model-predicted afterimage.
    pub d: RasterImage,
}

impl FigurePanels {
    pub fn iter(&self) -> impl Iterator<Item = (char, &RasterImage)> {
        [('a', &self.a), ('b', &self.b), ('c', &self.c), ('d', &self.d)].into_iter()
    }

    /// Writes `<stem>_a.png` .. `<stem>_d.png` into `dir`.
    pub fn write_pngs(&self, dir: &Path, stem: &str) -> Result<Vec<std::path::PathBuf>, RenderError> {
        self.iter()
            .map(|(suffix, img)| {
                let path = dir.join(format!("{stem}_{suffix}.png"));
                write_png(&path, img)?;
                Ok(path)
            })
            .collect()
    }
}

pub fn render_figure(
    spec: &StimulusSpec,
    scheme: BaselineScheme,
    g: &Geometry,
    blur: &BlurSettings,
) -> Result<FigurePanels, RenderError> {
    render_figure_with(spec, scheme, g, blur, Exec::default())
}

pub fn render_figure_with(
    spec: &StimulusSpec,
    scheme: BaselineScheme,
    g: &Geometry,
    blur: &BlurSettings,
    exec: Exec,
) -> Result<FigurePanels, RenderError> {
    let baseline = model::complementary_baseline(spec, scheme)?;
    let pred = model::predict(spec);
    Ok(FigurePanels {
        a: stimulus_field(g, spec.c_ot, spec.c_oi, exec).quantize(),
        b: render_uniform(g, spec.c_n),
        c: render_afterimage_panel_with(g, baseline.c_ct, baseline.c_ci, blur, exec),
        d: render_afterimage_panel_with(g, pred.c_at, pred.c_ai, blur, exec),
    })
}

/// Lossless 8-bit RGB PNG.
pub fn encode_png(img: &RasterImage) -> Result<Vec<u8>, RenderError> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, img.width, img.height);
        encoder.set_color(png::ColorType::Rgb);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder.write_header()?;
        writer.write_image_data(&img.data)?;
        writer.finish()?;
    }
    Ok(out)
}

/// Decodes an 8-bit RGB PNG such as those produced by [`encode_png`].
pub fn decode_png(bytes: &[u8]) -> Result<RasterImage, RenderError> {
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder.read_info()?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| RenderError::Unsupported("image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf)?;
    if info.color_type != png::ColorType::Rgb || info.bit_depth != png::BitDepth::Eight {
        return Err(RenderError::Unsupported(format!(
            "{:?} at {:?}",
            info.color_type, info.bit_depth
        )));
    }
    buf.truncate(info.buffer_size());
    RasterImage::from_raw(info.width, info.height, buf)
}

pub fn write_png(path: &Path, img: &RasterImage) -> Result<(), RenderError> {
    std::fs::write(path, encode_png(img)?)?;
    Ok(())
}

pub fn read_png(path: &Path) -> Result<RasterImage, RenderError> {
    decode_png(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rgb(r: f64, g: f64, b: f64) -> Rgb {
        Rgb::new(r, g, b).unwrap()
    }

    fn small() -> Geometry {
        Geometry::centered(64, 48, 12.0).unwrap()
    }

    fn max_channel_diff(a: [u8; 3], b: [u8; 3]) -> u8 {
        a.iter().zip(b).map(|(x, y)| x.abs_diff(y)).max().unwrap()
    }

    #[test]
    fn geometry_validation() {
        assert!(Geometry::centered(512, 512, 100.0).is_ok());
        assert!(Geometry::centered(512, 512, 0.0).is_err());
        assert!(Geometry::centered(512, 512, -3.0).is_err());
        assert!(Geometry::centered(0, 512, 10.0).is_err());
        // 200 + 100 > 256 - 50
        assert!(Geometry::centered(400, 400, 160.0).is_err());
        assert!(Geometry::new(512, 512, 80.0, 256.0, 100.0).is_err());
        // exactly at the margin
        assert!(Geometry::new(500, 500, 150.0, 250.0, 100.0).is_ok());
    }

    #[test]
    fn stimulus_fills() {
        let g = small();
        let img = render_stimulus(&g, Rgb::RED, Rgb::WHITE);
        let (cx, cy) = g.center_pixel();
        assert_eq!(img.pixel(cx, cy), [255, 0, 0]);
        assert_eq!(img.pixel(0, 0), [255, 255, 255]);
        assert_eq!(img.pixel(63, 47), [255, 255, 255]);
        assert_eq!(img.width(), 64);
        assert_eq!(img.as_bytes().len(), 64 * 48 * 3);
    }

    #[test]
    fn pixels_fully_inside_or_outside_are_exact() {
        let g = small();
        let img = render_stimulus(&g, Rgb::BLUE, Rgb::YELLOW);
        let (cx, cy) = g.center();
        for y in 0..g.height() {
            for x in 0..g.width() {
                let corners = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
                    .map(|(dx, dy)| (x as f64 + dx - cx).hypot(y as f64 + dy - cy));
                if corners.iter().all(|&d| d < g.radius()) {
                    assert_eq!(img.pixel(x, y), [0, 0, 255], "({x},{y})");
                } else if corners.iter().all(|&d| d > g.radius() + 1.0) {
                    assert_eq!(img.pixel(x, y), [255, 255, 0], "({x},{y})");
                }
            }
        }
    }

    #[test]
    fn edge_pixels_blend() {
        let g = small();
        let field = stimulus_field(&g, Rgb::WHITE, Rgb::BLACK, Exec::Sequential);
        let partial = field
            .pixels()
            .iter()
            .filter(|p| p[0] > 0.0 && p[0] < 1.0)
            .count();
        assert!(partial > 0);
        // total coverage approximates the circle area
        let area = field.channel_sums()[0];
        let exact = std::f64::consts::PI * 144.0;
        assert!((area - exact).abs() / exact < 0.01, "{area} vs {exact}");
    }

    #[test]
    fn degenerate_stimulus_is_uniform() {
        let g = small();
        let c = rgb(0.3, 0.6, 0.1);
        assert_eq!(render_stimulus(&g, c, c), render_uniform(&g, c));
    }

    #[test]
    fn uniform_examples() {
        let g = small();
        assert!(render_uniform(&g, Rgb::WHITE).pixels().all(|p| p == [255; 3]));
        assert!(render_uniform(&g, Rgb::BLACK).pixels().all(|p| p == [0; 3]));
        assert!(render_uniform(&g, rgb(0.76, 1.0, 1.0))
            .pixels()
            .all(|p| p == [194, 255, 255]));
    }

    #[test]
    fn quantization_rounds_to_nearest() {
        // 0.76 * 255 = 193.8
        assert_eq!(quantize_channel(0.76), 194);
        assert_eq!(quantize_channel(0.5), 128);
        assert_eq!(quantize_channel(0.0), 0);
        assert_eq!(quantize_channel(1.0), 255);
        for i in 0..=1000 {
            let v = i as f64 / 1000.0;
            let err = (quantize_channel(v) as f64 / 255.0 - v).abs();
            assert!(err <= 0.5 / 255.0 + 1e-12);
        }
    }

    #[test]
    fn kernel_is_normalized_and_symmetric() {
        for sigma in [0.3, 1.0, 4.0, 11.5] {
            let b = BlurSettings::new(sigma).unwrap();
            let k = b.kernel();
            assert_eq!(k.len(), 2 * b.radius() + 1);
            assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for i in 0..k.len() {
                assert_eq!(k[i], k[k.len() - 1 - i]);
            }
        }
        assert_eq!(BlurSettings::new(4.0).unwrap().radius(), 12);
        assert!(BlurSettings::new(0.0).is_err());
        assert!(BlurSettings::new(f64::INFINITY).is_err());
    }

    #[test]
    fn blur_of_uniform_is_uniform() {
        let g = small();
        let img = render_uniform(&g, rgb(0.2, 0.5, 0.9));
        let out = gaussian_blur(&img, &BlurSettings::new(3.0).unwrap());
        for (a, b) in img.pixels().zip(out.pixels()) {
            assert!(max_channel_diff(a, b) <= 1);
        }
    }

    #[test]
    fn blur_of_impulse_is_the_kernel() {
        let (w, h) = (41, 41);
        let mut pixels = vec![[0.0; 3]; w * h];
        pixels[20 * w + 20] = [1.0, 0.5, 0.25];
        let field = ColorField::from_pixels(w, h, pixels);
        let blur = BlurSettings::new(2.5).unwrap();
        let out = blur_field(&field, &blur, Exec::Sequential);

        // independent 2-D evaluation of the Gaussian, normalized over the window
        let r = blur.radius() as isize;
        let s2 = 2.0 * 2.5 * 2.5;
        let mut norm = 0.0;
        for dy in -r..=r {
            for dx in -r..=r {
                norm += (-((dx * dx + dy * dy) as f64) / s2).exp();
            }
        }
        for dy in -r..=r {
            for dx in -r..=r {
                let want = (-((dx * dx + dy * dy) as f64) / s2).exp() / norm;
                let got = out.pixel((20 + dx) as usize, (20 + dy) as usize);
                assert!((got[0] - want).abs() < 1e-12);
                assert!((got[1] - 0.5 * want).abs() < 1e-12);
            }
        }
        let sums = out.channel_sums();
        assert!((sums[0] - 1.0).abs() < 1e-6);
        assert!((sums[1] - 0.5).abs() < 1e-6);
        assert!((sums[2] - 0.25).abs() < 1e-6);
    }

    #[test]
    fn blur_preserves_interior_mass() {
        let g = Geometry::centered(96, 96, 20.0).unwrap();
        let field = stimulus_field(&g, Rgb::WHITE, Rgb::BLACK, Exec::Sequential);
        let out = blur_field(&field, &BlurSettings::new(3.0).unwrap(), Exec::Sequential);
        let (a, b) = (field.channel_sums(), out.channel_sums());
        // the circle is far from the border, so nothing leaks through the clamp
        assert!((a[0] - b[0]).abs() < 1e-9);
    }

    #[test]
    fn blur_keeps_circle_center() {
        let g = Geometry::default();
        let c = rgb(0.76, 1.0, 1.0);
        let img = render_stimulus(&g, c, rgb(0.9, 0.9, 0.9));
        let out = gaussian_blur(&img, &BlurSettings::new(4.0).unwrap());
        let (cx, cy) = g.center_pixel();
        assert!(max_channel_diff(out.pixel(cx, cy), quantize(c)) <= 2);
    }

    #[test]
    fn afterimage_panel_center() {
        let g = Geometry::default();
        let pred = model::predict(&StimulusSpec::new(Rgb::RED, Rgb::WHITE, Rgb::WHITE));
        let img = render_afterimage_panel(&g, pred.c_at, pred.c_ai, &BlurSettings::default());
        let (cx, cy) = g.center_pixel();
        assert!(max_channel_diff(img.pixel(cx, cy), [194, 255, 255]) <= 2);
        let same = render_afterimage_panel(&g, pred.c_ai, pred.c_ai, &BlurSettings::default());
        let first = same.pixel(0, 0);
        assert!(same.pixels().all(|p| p == first));
        assert!(max_channel_diff(first, quantize(pred.c_ai)) <= 1);
    }

    #[test]
    fn figure_panels() {
        let g = Geometry::centered(160, 160, 30.0).unwrap();
        let blur = BlurSettings::new(2.0).unwrap();
        let (cx, cy) = g.center_pixel();
        let spec = StimulusSpec::new(Rgb::RED, Rgb::WHITE, Rgb::WHITE);
        let fig = render_figure(&spec, BaselineScheme::Group2, &g, &blur).unwrap();
        assert_eq!(fig.a.pixel(cx, cy), [255, 0, 0]);
        assert!(fig.b.pixels().all(|p| p == [255; 3]));
        assert!(max_channel_diff(fig.c.pixel(cx, cy), quantize(rgb(0.0, 0.9, 0.9))) <= 2);
        assert!(max_channel_diff(fig.d.pixel(cx, cy), quantize(rgb(0.76, 1.0, 1.0))) <= 2);

        let spec = StimulusSpec::new(Rgb::BLUE, Rgb::RED, Rgb::MAGENTA);
        let fig = render_figure(&spec, BaselineScheme::Group2, &g, &blur).unwrap();
        let (sx, sy) = g.surround_pixel();
        assert!(max_channel_diff(fig.d.pixel(sx, sy), quantize(rgb(0.8, 0.2, 1.0))) <= 2);

        let spec = StimulusSpec::new(Rgb::RED, Rgb::WHITE, Rgb::BLACK);
        let fig = render_figure(&spec, BaselineScheme::Group2, &g, &blur).unwrap();
        assert!(fig.b.pixels().all(|p| p == [0; 3]));

        let spec = StimulusSpec::new(Rgb::CYAN, Rgb::WHITE, Rgb::BLACK);
        assert!(matches!(
            render_figure(&spec, BaselineScheme::Group1, &g, &blur),
            Err(RenderError::Model(ModelError::UnpairedColor(_)))
        ));
    }

    #[test]
    fn exec_modes_render_identically() {
        let g = Geometry::centered(120, 90, 20.0).unwrap();
        let blur = BlurSettings::new(3.0).unwrap();
        let spec = StimulusSpec::new(Rgb::GREEN, Rgb::RED, Rgb::YELLOW);
        let seq = render_figure_with(&spec, BaselineScheme::Group2, &g, &blur, Exec::Sequential).unwrap();
        let def = render_figure_with(&spec, BaselineScheme::Group2, &g, &blur, Exec::default()).unwrap();
        assert_eq!(seq, def);
    }

    #[test]
    fn png_round_trip() {
        let g = small();
        let img = render_stimulus(&g, rgb(0.1, 0.7, 0.3), Rgb::MAGENTA);
        let bytes = encode_png(&img).unwrap();
        assert_eq!(&bytes[..8], b"\x89PNG\r\n\x1a\n");
        assert_eq!(decode_png(&bytes).unwrap(), img);

        let one = RasterImage::from_raw(1, 1, vec![255, 255, 255]).unwrap();
        let back = decode_png(&encode_png(&one).unwrap()).unwrap();
        assert_eq!(back.pixel(0, 0), [255, 255, 255]);
        assert!(RasterImage::from_raw(2, 2, vec![0; 11]).is_err());
    }
}
