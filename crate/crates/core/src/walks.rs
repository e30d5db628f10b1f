//! Digits of constants in any base 2..=36, planar walks driven by them, and
//! PPM/SVG rendering of the walks.

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::numkernel::{exp, pi, BigReal, PrecisionContext};

/// Extra bits beyond `count·log₂(base)` the working precision must carry.
pub const DIGIT_GUARD_BITS: u32 = 64;
pub const MIN_IMAGE_SIZE: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
    /// Concatenation of 1, 2, 3, … written in the stream's base.
    Champernowne,
}

impl Constant {
    pub fn name(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::E => "e",
            Constant::Champernowne => "champernowne",
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Constant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pi" | "π" => Ok(Constant::Pi),
            "e" => Ok(Constant::E),
            s if s == "champernowne" || s.starts_with("champernowne-") => Ok(Constant::Champernowne),
            _ => Err(Error::InvalidInput(format!("unknown constant `{s}` (pi, e, champernowne)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitStream {
    pub constant: Constant,
    pub base: u32,
    pub digits: Vec<u8>,
}

fn check_base(base: u32) -> Result<()> {
    if !(2..=36).contains(&base) {
        return Err(Error::InvalidInput(format!("base must lie in 2..=36, got {base}")));
    }
    Ok(())
}

/// Bits needed for `count` digits in `base`.
pub fn required_bits(base: u32, count: usize) -> u32 {
    ((count as f64) * (base as f64).log2()).ceil() as u32 + DIGIT_GUARD_BITS
}

/// First `count` digits, integer part first. Champernowne's number has no
/// integer part, so its stream starts at the first concatenated digit.
pub fn digits(constant: Constant, base: u32, count: usize, ctx: &PrecisionContext) -> Result<DigitStream> {
    check_base(base)?;
    if constant == Constant::Champernowne {
        return Ok(DigitStream { constant, base, digits: champernowne(base, count) });
    }
    let need = required_bits(base, count);
    if ctx.bits() < need {
        return Err(Error::InsufficientPrecision(format!(
            "{count} base-{base} digits need {need} bits, context has {}",
            ctx.bits()
        )));
    }
    let x = match constant {
        Constant::Pi => pi(ctx),
        Constant::E => exp(&BigReal::one(ctx.bits()), ctx)?,
        Constant::Champernowne => unreachable!(),
    };
    Ok(DigitStream { constant, base, digits: extract(&x, base, count, ctx.bits())? })
}

/// [`digits`] at exactly the precision the request needs.
pub fn digits_auto(constant: Constant, base: u32, count: usize) -> Result<DigitStream> {
    check_base(base)?;
    digits(constant, base, count, &PrecisionContext::from_bits(required_bits(base, count) + 32))
}

/// Multiply-and-floor on a fixed-point image of `x`, done twice on a bracket
/// a few ulps wide: if the two disagree a digit sits on a boundary the
/// working precision cannot resolve.
fn extract(x: &BigReal, base: u32, count: usize, bits: u32) -> Result<Vec<u8>> {
    if x.is_negative() {
        return Err(Error::InvalidInput("negative constants have no digit stream".into()));
    }
    let w = bits;
    let fixed = x.to_fixed(w);
    let int_part: BigInt = &fixed >> w;
    let mut out: Vec<u8> = if int_part.is_zero() { vec![0] } else { int_part.to_radix_be(base).1 };
    if out.len() >= count {
        out.truncate(count);
        return Ok(out);
    }
    let frac_count = count - out.len();
    let one: BigInt = BigInt::from(1) << w;
    let frac = &fixed - (&int_part << w);
    let slack = BigInt::from(16);
    let scale = BigInt::from(base).pow(frac_count as u32);
    let lo = ((&frac - &slack).max(BigInt::zero()) * &scale) >> w;
    let hi = ((&frac + &slack).min(one) * &scale) >> w;
    if lo != hi {
        return Err(Error::InsufficientPrecision(format!(
            "digit {count} in base {base} is too close to a boundary at {bits} bits"
        )));
    }
    let body = if lo.is_zero() { Vec::new() } else { lo.abs().to_radix_be(base).1 };
    out.extend(std::iter::repeat_n(0, frac_count - body.len()));
    out.extend(body);
    Ok(out)
}

fn champernowne(base: u32, count: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(count);
    let mut k = BigInt::from(1);
    while out.len() < count {
        out.extend(k.to_radix_be(base).1);
        k += 1;
    }
    out.truncate(count);
    out
}

/// Unit steps for digits 0..3 (digits in other bases use `d mod 4`).
pub type DirectionMap = [(i64, i64); 4];
/// 0→E, 1→N, 2→W, 3→S.
pub const DEFAULT_MAPPING: DirectionMap = [(1, 0), (0, 1), (-1, 0), (0, -1)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkPath {
    pub points: Vec<(i64, i64)>,
    pub mapping: DirectionMap,
}

impl WalkPath {
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn endpoint(&self) -> (i64, i64) {
        *self.points.last().expect("paths are never empty")
    }

    /// `(min_x, min_y, max_x, max_y)`.
    pub fn bounding_box(&self) -> (i64, i64, i64, i64) {
        self.points.iter().fold((0, 0, 0, 0), |(a, b, c, d), &(x, y)| (a.min(x), b.min(y), c.max(x), d.max(y)))
    }
}

pub fn walk(stream: &DigitStream) -> Result<WalkPath> {
    walk_digits(&stream.digits, DEFAULT_MAPPING)
}

pub fn walk_with_mapping(stream: &DigitStream, mapping: DirectionMap) -> Result<WalkPath> {
    walk_digits(&stream.digits, mapping)
}

pub fn walk_digits(digits: &[u8], mapping: DirectionMap) -> Result<WalkPath> {
    if digits.is_empty() {
        return Err(Error::InvalidInput("empty digit stream".into()));
    }
    if mapping.iter().any(|&(dx, dy)| dx.abs() + dy.abs() != 1) {
        return Err(Error::InvalidInput("every direction must be a unit lattice step".into()));
    }
    let mut points = Vec::with_capacity(digits.len() + 1);
    let (mut x, mut y) = (0i64, 0i64);
    points.push((x, y));
    for &d in digits {
        let (dx, dy) = mapping[(d % 4) as usize];
        x += dx;
        y += dy;
        points.push((x, y));
    }
    Ok(WalkPath { points, mapping })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Ppm,
    Svg,
}

impl std::str::FromStr for ImageFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ppm" => Ok(ImageFormat::Ppm),
            "svg" => Ok(ImageFormat::Svg),
            _ => Err(Error::InvalidInput(format!("unknown image format `{s}` (ppm, svg)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorMode {
    Mono,
    /// Hue runs from red at the first step to violet at the last.
    Progress,
}

impl std::str::FromStr for ColorMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mono" => Ok(ColorMode::Mono),
            "progress" => Ok(ColorMode::Progress),
            _ => Err(Error::InvalidInput(format!("unknown color mode `{s}` (mono, progress)"))),
        }
    }
}

pub fn render(path: &WalkPath, format: ImageFormat, width: u32, height: u32, color: ColorMode) -> Result<Vec<u8>> {
    if path.points.is_empty() {
        return Err(Error::InvalidInput("empty path".into()));
    }
    if width < MIN_IMAGE_SIZE || height < MIN_IMAGE_SIZE {
        return Err(Error::InvalidInput(format!(
            "image must be at least {MIN_IMAGE_SIZE}×{MIN_IMAGE_SIZE}, got {width}×{height}"
        )));
    }
    Ok(match format {
        ImageFormat::Ppm => render_ppm(path, width, height, color),
        ImageFormat::Svg => render_svg(path, width, height, color).into_bytes(),
    })
}

const INK: [u8; 3] = [20, 20, 20];
const PAPER: [u8; 3] = [255, 255, 255];
/// Last hue of the progress gradient, in degrees.
const HUE_SPAN: f64 = 280.0;

fn hue_rgb(t: f64) -> [u8; 3] {
    let h = (t.clamp(0.0, 1.0) * HUE_SPAN) / 60.0;
    let x = 1.0 - ((h % 2.0) - 1.0).abs();
    let (r, g, b) = match h as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    let v = 0.85;
    [(r * v * 255.0).round() as u8, (g * v * 255.0).round() as u8, (b * v * 255.0).round() as u8]
}

fn step_color(color: ColorMode, i: usize, steps: usize) -> [u8; 3] {
    match color {
        ColorMode::Mono => INK,
        ColorMode::Progress => hue_rgb(if steps == 0 { 0.0 } else { i as f64 / steps as f64 }),
    }
}

/// Lattice-to-pixel map: uniform scale, 5% margin, y pointing up.
struct Viewport {
    min_x: i64,
    max_y: i64,
    scale: f64,
    off_x: f64,
    off_y: f64,
}

impl Viewport {
    fn new(path: &WalkPath, width: u32, height: u32) -> Self {
        let (min_x, min_y, max_x, max_y) = path.bounding_box();
        let span_x = (max_x - min_x).max(1) as f64;
        let span_y = (max_y - min_y).max(1) as f64;
        let (w, h) = ((width - 1) as f64, (height - 1) as f64);
        let scale = (w * 0.9 / span_x).min(h * 0.9 / span_y);
        let off_x = (w - scale * (max_x - min_x) as f64) / 2.0;
        let off_y = (h - scale * (max_y - min_y) as f64) / 2.0;
        Self { min_x, max_y, scale, off_x, off_y }
    }

    fn pixel(&self, (x, y): (i64, i64)) -> (i64, i64) {
        let px = self.off_x + self.scale * (x - self.min_x) as f64;
        let py = self.off_y + self.scale * (self.max_y - y) as f64;
        (px.round() as i64, py.round() as i64)
    }
}

fn render_ppm(path: &WalkPath, width: u32, height: u32, color: ColorMode) -> Vec<u8> {
    let header = format!("P6\n{width} {height}\n255\n");
    let (w, h) = (width as i64, height as i64);
    let mut px = vec![0u8; (w * h * 3) as usize];
    for chunk in px.chunks_exact_mut(3) {
        chunk.copy_from_slice(&PAPER);
    }
    let vp = Viewport::new(path, width, height);
    let steps = path.steps();
    let mut put = |x: i64, y: i64, c: [u8; 3]| {
        if (0..w).contains(&x) && (0..h).contains(&y) {
            let i = ((y * w + x) * 3) as usize;
            px[i..i + 3].copy_from_slice(&c);
        }
    };
    if steps == 0 {
        let (x, y) = vp.pixel(path.points[0]);
        put(x, y, step_color(color, 0, 0));
    }
    for (i, seg) in path.points.windows(2).enumerate() {
        let c = step_color(color, i, steps);
        let (x0, y0) = vp.pixel(seg[0]);
        let (x1, y1) = vp.pixel(seg[1]);
        // Bresenham
        let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
        let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
        let (mut x, mut y, mut err) = (x0, y0, dx + dy);
        loop {
            put(x, y, c);
            if x == x1 && y == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }
    let mut out = header.into_bytes();
    out.extend_from_slice(&px);
    out
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// One `<polyline>` in lattice coordinates with y negated, so north is up.
/// The progress gradient runs along the straight line from the first point
/// to the last, which is as close as a single stroke can get to per-step
/// colouring.
fn render_svg(path: &WalkPath, width: u32, height: u32, color: ColorMode) -> String {
    let (min_x, min_y, max_x, max_y) = path.bounding_box();
    let span_x = (max_x - min_x).max(1) as f64;
    let span_y = (max_y - min_y).max(1) as f64;
    let mx = span_x * 0.05;
    let my = span_y * 0.05;
    let vb_x = min_x as f64 - mx;
    let vb_y = -(max_y as f64) - my;
    let vb_w = (max_x - min_x) as f64 + 2.0 * mx;
    let vb_h = (max_y - min_y) as f64 + 2.0 * my;
    let stroke_w = (span_x.max(span_y) / 400.0).max(0.05);

    let mut s = String::with_capacity(path.points.len() * 12 + 512);
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"{} {} {} {}\">",
        fmt_num(vb_x),
        fmt_num(vb_y),
        fmt_num(vb_w),
        fmt_num(vb_h)
    );
    let _ = writeln!(s, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>", fmt_num(vb_x), fmt_num(vb_y), fmt_num(vb_w), fmt_num(vb_h));
    let stroke = match color {
        ColorMode::Mono => hex(INK),
        ColorMode::Progress => {
            let (x0, y0) = path.points[0];
            let (mut x1, mut y1) = path.endpoint();
            if (x0, y0) == (x1, y1) {
                x1 = x0 + 1;
                y1 = y0;
            }
            let _ = writeln!(
                s,
                "<defs><linearGradient id=\"progress\" gradientUnits=\"userSpaceOnUse\" x1=\"{x0}\" y1=\"{}\" x2=\"{x1}\" y2=\"{}\">",
                -y0, -y1
            );
            for k in 0..=6 {
                let t = k as f64 / 6.0;
                let _ = writeln!(s, "<stop offset=\"{}\" stop-color=\"{}\"/>", fmt_num(t), hex(hue_rgb(t)));
            }
            s.push_str("</linearGradient></defs>\n");
            "url(#progress)".to_string()
        }
    };
    let _ = write!(
        s,
        "<polyline fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{}\" stroke-linejoin=\"round\" stroke-linecap=\"round\" points=\"",
        fmt_num(stroke_w)
    );
    for (i, &(x, y)) in path.points.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x},{}", -y);
    }
    s.push_str("\"/>\n</svg>\n");
    s
}

/// Fixed four decimals with trailing zeros trimmed, so output is stable.
fn fmt_num(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_pi() {
        let d = digits(Constant::Pi, 10, 15, &PrecisionContext::from_bits(200)).unwrap();
        assert_eq!(d.digits, vec![3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9]);
    }

    #[test]
    fn base4_pi() {
        let d = digits(Constant::Pi, 4, 8, &PrecisionContext::from_bits(200)).unwrap();
        assert_eq!(d.digits, vec![3, 0, 2, 1, 0, 0, 3, 3]);
    }

    #[test]
    fn binary_e_has_two_integer_digits() {
        // e = 10.1011011111…₂
        let d = digits_auto(Constant::E, 2, 12).unwrap();
        assert_eq!(d.digits, vec![1, 0, 1, 0, 1, 1, 0, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn champernowne_concatenation() {
        let d = digits_auto(Constant::Champernowne, 10, 11).unwrap();
        assert_eq!(d.digits, vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 1, 0]);
        let b = digits_auto(Constant::Champernowne, 2, 9).unwrap();
        // 1 10 11 100 101…
        assert_eq!(b.digits, vec![1, 1, 0, 1, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn precision_is_checked() {
        let r = digits(Constant::Pi, 10, 1000, &PrecisionContext::from_bits(200));
        assert!(matches!(r, Err(Error::InsufficientPrecision(_))));
        assert!(digits_auto(Constant::Pi, 37, 3).is_err());
        assert!(digits_auto(Constant::Pi, 1, 3).is_err());
    }

    #[test]
    fn small_walks() {
        let p = walk_digits(&[0, 0, 1], DEFAULT_MAPPING).unwrap();
        assert_eq!(p.points, vec![(0, 0), (1, 0), (2, 0), (2, 1)]);
        let back = walk_digits(&[0, 2], DEFAULT_MAPPING).unwrap();
        assert_eq!(back.endpoint(), (0, 0));
        let pi4 = walk_digits(&[3, 0, 2, 1, 0, 0, 3, 3], DEFAULT_MAPPING).unwrap();
        assert_eq!(pi4.points, vec![(0, 0), (0, -1), (1, -1), (0, -1), (0, 0), (1, 0), (2, 0), (2, -1), (2, -2)]);
        assert!(walk_digits(&[], DEFAULT_MAPPING).is_err());
        assert!(walk_digits(&[1], [(1, 1), (0, 1), (-1, 0), (0, -1)]).is_err());
    }

    #[test]
    fn ppm_header_and_size() {
        let p = walk_digits(&[0, 1], DEFAULT_MAPPING).unwrap();
        let img = render(&p, ImageFormat::Ppm, 64, 64, ColorMode::Mono).unwrap();
        assert!(img.starts_with(b"P6\n64 64\n255\n"));
        assert_eq!(img.len(), 13 + 64 * 64 * 3);
        assert!(render(&p, ImageFormat::Ppm, 15, 64, ColorMode::Mono).is_err());
    }

    #[test]
    fn svg_single_polyline() {
        let p = walk_digits(&[0, 1, 1, 2], DEFAULT_MAPPING).unwrap();
        let svg = String::from_utf8(render(&p, ImageFormat::Svg, 100, 100, ColorMode::Progress).unwrap()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("points=\"0,0 1,0 1,-1 1,-2 0,-2\""));
    }

    #[test]
    fn hue_endpoints() {
        assert_eq!(hue_rgb(0.0), [217, 0, 0]);
        assert_eq!(fmt_num(-0.00001), "0");
        assert_eq!(fmt_num(2.5), "2.5");
    }
}
