//! Normalized RGB arithmetic.
//!
//! Every color is a triple of `f64` components in `[0, 1]`. The operations
//! here are the small algebra the afterimage model is written in: the
//! opposite color `1 - c`, scaling by a non-negative coefficient, and convex
//! mixing of two colors. Nothing is quantized here; 8-bit conversion happens
//! only when an image is rendered.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Whiteness tolerance used by [`classify_inducing`] unless told otherwise.
pub const DEFAULT_WHITE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ColorError {
    #[error("color component {value} is outside [0, 1]")]
    OutOfRange { value: f64 },
    #[error("scale factor must be non-negative and finite, got {0}")]
    NegativeScale(f64),
    #[error("mix weight must lie in [0, 1], got {0}")]
    MixWeight(f64),
    #[error("cannot parse color `{0}`: expected one of red, green, blue, cyan, magenta, yellow, white, black or an `r,g,b` triple")]
    Parse(String),
}

/// A color with normalized red, green and blue components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Rgb {
    r: f64,
    g: f64,
    b: f64,
}

impl Rgb {
    pub const RED: Rgb = Rgb::exact(1.0, 0.0, 0.0);
    pub const GREEN: Rgb = Rgb::exact(0.0, 1.0, 0.0);
    pub const BLUE: Rgb = Rgb::exact(0.0, 0.0, 1.0);
    pub const CYAN: Rgb = Rgb::exact(0.0, 1.0, 1.0);
    pub const MAGENTA: Rgb = Rgb::exact(1.0, 0.0, 1.0);
    pub const YELLOW: Rgb = Rgb::exact(1.0, 1.0, 0.0);
    pub const WHITE: Rgb = Rgb::exact(1.0, 1.0, 1.0);
    pub const BLACK: Rgb = Rgb::exact(0.0, 0.0, 0.0);
    pub const GRAY: Rgb = Rgb::exact(0.5, 0.5, 0.5);

    pub(crate) const fn exact(r: f64, g: f64, b: f64) -> Rgb {
        Rgb { r, g, b }
    }

    /// Wraps the result of a convex combination of in-range colors. Such a
    /// result can only leave the cube through rounding, which is clamped away.
    pub(crate) fn from_convex([r, g, b]: [f64; 3]) -> Rgb {
        debug_assert!(
            [r, g, b].iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)),
            "convex combination left the unit cube: ({r}, {g}, {b})"
        );
        Rgb::clamped(r, g, b)
    }

    /// Builds a color, rejecting any component outside `[0, 1]` (or NaN).
    pub fn new(r: f64, g: f64, b: f64) -> Result<Rgb, ColorError> {
        for value in [r, g, b] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ColorError::OutOfRange { value });
            }
        }
        Ok(Rgb { r, g, b })
    }

    /// Builds a color, clamping each component into `[0, 1]`. NaN maps to 0.
    pub fn clamped(r: f64, g: f64, b: f64) -> Rgb {
        let c = |v: f64| if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        Rgb {
            r: c(r),
            g: c(g),
            b: c(b),
        }
    }

    pub fn gray(level: f64) -> Result<Rgb, ColorError> {
        Rgb::new(level, level, level)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn components(&self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }

    /// `1 - c` componentwise. Involutive.
    pub fn opposite(&self) -> Rgb {
        Rgb {
            r: 1.0 - self.r,
            g: 1.0 - self.g,
            b: 1.0 - self.b,
        }
    }

    /// `k * c` componentwise, clamped back into the unit cube.
    pub fn scale(&self, k: f64) -> Result<Rgb, ColorError> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(ColorError::NegativeScale(k));
        }
        Ok(Rgb::clamped(k * self.r, k * self.g, k * self.b))
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(&self, other: &Rgb) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `w * c1 + (1 - w) * c2`. A convex combination, so no clamping is needed.
pub fn mix(c1: Rgb, c2: Rgb, w: f64) -> Result<Rgb, ColorError> {
    if !(0.0..=1.0).contains(&w) {
        return Err(ColorError::MixWeight(w));
    }
    let v = 1.0 - w;
    Ok(Rgb {
        r: w * c1.r + v * c2.r,
        g: w * c1.g + v * c2.g,
        b: w * c1.b + v * c2.b,
    })
}

impl TryFrom<[f64; 3]> for Rgb {
    type Error = ColorError;

    fn try_from([r, g, b]: [f64; 3]) -> Result<Self, Self::Error> {
        Rgb::new(r, g, b)
    }
}

impl From<Rgb> for [f64; 3] {
    fn from(c: Rgb) -> Self {
        c.components()
    }
}

impl From<NamedColor> for Rgb {
    fn from(n: NamedColor) -> Self {
        n.rgb()
    }
}

impl fmt::Display for Rgb {
    /// Shortest round-trip decimal form, e.g. `(0.76, 1, 1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "({:.p$}, {:.p$}, {:.p$})", self.r, self.g, self.b),
            None => write!(f, "({}, {}, {})", self.r, self.g, self.b),
        }
    }
}

impl FromStr for Rgb {
    type Err = ColorError;

    /// Accepts one of the eight named colors (case-insensitive) or an
    /// `r,g,b` triple of normalized components.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Ok(named) = s.parse::<NamedColor>() {
            return Ok(named.rgb());
        }
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(ColorError::Parse(s.to_owned()));
        }
        let mut values = [0.0; 3];
        for (slot, part) in values.iter_mut().zip(&parts) {
            *slot = part
                .parse::<f64>()
                .map_err(|_| ColorError::Parse(s.to_owned()))?;
        }
        Rgb::try_from(values)
    }
}

/// The eight corner colors of the RGB cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedColor {
    Red,
    Green,
    Blue,
    Cyan,
    Magenta,
    Yellow,
    White,
    Black,
}

impl NamedColor {
    pub const ALL: [NamedColor; 8] = [
        NamedColor::Red,
        NamedColor::Green,
        NamedColor::Blue,
        NamedColor::Cyan,
        NamedColor::Magenta,
        NamedColor::Yellow,
        NamedColor::White,
        NamedColor::Black,
    ];

    pub fn rgb(self) -> Rgb {
        match self {
            NamedColor::Red => Rgb::RED,
            NamedColor::Green => Rgb::GREEN,
            NamedColor::Blue => Rgb::BLUE,
            NamedColor::Cyan => Rgb::CYAN,
            NamedColor::Magenta => Rgb::MAGENTA,
            NamedColor::Yellow => Rgb::YELLOW,
            NamedColor::White => Rgb::WHITE,
            NamedColor::Black => Rgb::BLACK,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedColor::Red => "red",
            NamedColor::Green => "green",
            NamedColor::Blue => "blue",
            NamedColor::Cyan => "cyan",
            NamedColor::Magenta => "magenta",
            NamedColor::Yellow => "yellow",
            NamedColor::White => "white",
            NamedColor::Black => "black",
        }
    }

    /// Exact reverse lookup; near misses return `None`.
    pub fn from_rgb(c: Rgb) -> Option<NamedColor> {
        NamedColor::ALL.into_iter().find(|n| n.rgb() == c)
    }
}

impl fmt::Display for NamedColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedColor {
    type Err = ColorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        NamedColor::ALL
            .into_iter()
            .find(|n| n.name() == lower)
            .ok_or_else(|| ColorError::Parse(s.to_owned()))
    }
}

/// Short human label: the color name when it is a cube corner, else the triple.
pub fn label(c: Rgb) -> String {
    match NamedColor::from_rgb(c) {
        Some(n) => n.name().to_owned(),
        None => c.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InducingClass {
    White,
    Chromatic,
}

/// White iff every component is at least `1 - tol`. Black and grays count as
/// chromatic: only the white/non-white split matters to the model.
pub fn classify_inducing(c: Rgb, tol: f64) -> InducingClass {
    let floor = 1.0 - tol.max(0.0);
    if c.components().iter().all(|&v| v >= floor) {
        InducingClass::White
    } else {
        InducingClass::Chromatic
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rgb(r: f64, g: f64, b: f64) -> Rgb {
        Rgb::new(r, g, b).unwrap()
    }

    #[test]
    fn opposite_examples() {
        assert_eq!(Rgb::RED.opposite(), Rgb::CYAN);
        assert_eq!(Rgb::GREEN.opposite(), Rgb::MAGENTA);
        assert_eq!(Rgb::BLUE.opposite(), Rgb::YELLOW);
        assert_eq!(Rgb::GRAY.opposite(), Rgb::GRAY);
        assert_eq!(Rgb::WHITE.opposite(), Rgb::BLACK);
    }

    #[test]
    fn scale_examples() {
        assert_eq!(Rgb::CYAN.scale(0.9).unwrap(), rgb(0.0, 0.9, 0.9));
        let c = rgb(0.2, 0.3, 0.7);
        assert_eq!(c.scale(1.0).unwrap(), c);
        assert_eq!(Rgb::WHITE.scale(0.6).unwrap(), rgb(0.6, 0.6, 0.6));
        // clamps above the cube
        assert_eq!(Rgb::WHITE.scale(2.0).unwrap(), Rgb::WHITE);
        assert!(matches!(
            Rgb::RED.scale(-0.1),
            Err(ColorError::NegativeScale(_))
        ));
        assert!(Rgb::RED.scale(f64::NAN).is_err());
    }

    #[test]
    fn mix_examples() {
        let c = rgb(0.3, 0.6, 0.9);
        assert_eq!(mix(c, c, 0.25).unwrap(), c);
        assert_eq!(
            mix(Rgb::WHITE, Rgb::BLACK, 0.4).unwrap(),
            rgb(0.4, 0.4, 0.4)
        );
        // 0.4 * (1,0,1) + 0.6 * (1,0,0)
        let m = mix(Rgb::MAGENTA, Rgb::RED, 0.4).unwrap();
        assert!(m.max_abs_diff(&rgb(1.0, 0.0, 0.4)) < 1e-15);
        assert!(matches!(
            mix(Rgb::RED, Rgb::BLUE, 1.5),
            Err(ColorError::MixWeight(_))
        ));
        assert!(mix(Rgb::RED, Rgb::BLUE, -0.01).is_err());
    }

    #[test]
    fn classify_examples() {
        let tol = DEFAULT_WHITE_TOLERANCE;
        assert_eq!(classify_inducing(Rgb::WHITE, tol), InducingClass::White);
        assert_eq!(classify_inducing(Rgb::GREEN, tol), InducingClass::Chromatic);
        assert_eq!(
            classify_inducing(rgb(0.999999, 1.0, 1.0), tol),
            InducingClass::White
        );
        assert_eq!(
            classify_inducing(rgb(0.99999, 1.0, 1.0), tol),
            InducingClass::Chromatic
        );
        assert_eq!(classify_inducing(Rgb::BLACK, tol), InducingClass::Chromatic);
        assert_eq!(classify_inducing(Rgb::GRAY, tol), InducingClass::Chromatic);
    }

    #[test]
    fn constructor_rejects_out_of_range() {
        assert!(Rgb::new(1.01, 0.0, 0.0).is_err());
        assert!(Rgb::new(0.0, -0.0001, 0.0).is_err());
        assert!(Rgb::new(0.0, 0.0, f64::NAN).is_err());
        assert_eq!(Rgb::clamped(1.5, -2.0, f64::NAN), Rgb::RED);
    }

    #[test]
    fn parse_colors() {
        assert_eq!("Red".parse::<Rgb>().unwrap(), Rgb::RED);
        assert_eq!("MAGENTA".parse::<Rgb>().unwrap(), Rgb::MAGENTA);
        assert_eq!(
            " 0.5, 0.25 ,1 ".parse::<Rgb>().unwrap(),
            rgb(0.5, 0.25, 1.0)
        );
        assert!("orange".parse::<Rgb>().is_err());
        assert!("0.5,0.5".parse::<Rgb>().is_err());
        assert!("0.5,0.5,1.5".parse::<Rgb>().is_err());
        assert!("a,b,c".parse::<Rgb>().is_err());
    }

    #[test]
    fn named_colors_are_exact_triples() {
        let expected = [
            (1.0, 0.0, 0.0),
            (0.0, 1.0, 0.0),
            (0.0, 0.0, 1.0),
            (0.0, 1.0, 1.0),
            (1.0, 0.0, 1.0),
            (1.0, 1.0, 0.0),
            (1.0, 1.0, 1.0),
            (0.0, 0.0, 0.0),
        ];
        for (n, (r, g, b)) in NamedColor::ALL.into_iter().zip(expected) {
            assert_eq!(n.rgb().components(), [r, g, b], "{n}");
            assert_eq!(NamedColor::from_rgb(n.rgb()), Some(n));
            assert_eq!(n.name().parse::<NamedColor>().unwrap(), n);
        }
        assert_eq!(NamedColor::from_rgb(rgb(0.999, 0.0, 0.0)), None);
    }

    #[test]
    fn serde_uses_triples() {
        let json = serde_json::to_string(&rgb(0.76, 1.0, 1.0)).unwrap();
        assert_eq!(json, "[0.76,1.0,1.0]");
        assert!(serde_json::from_str::<Rgb>("[1.2,0,0]").is_err());
    }

    fn any_rgb() -> impl Strategy<Value = Rgb> {
        (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(r, g, b)| rgb(r, g, b))
    }

    proptest! {
        #[test]
        fn opposite_is_involutive(c in any_rgb()) {
            // 1 - (1 - x) can be off by one rounding step of 1.0
            prop_assert!(c.opposite().opposite().max_abs_diff(&c) <= f64::EPSILON / 2.0);
        }

        #[test]
        fn opposite_is_exactly_involutive_on_dyadic_grid(r in 0..=1u32 << 20, g in 0..=1u32 << 20, b in 0..=1u32 << 20) {
            let s = (1u32 << 20) as f64;
            let c = rgb(r as f64 / s, g as f64 / s, b as f64 / s);
            prop_assert_eq!(c.opposite().opposite(), c);
        }

        #[test]
        fn mix_is_symmetric_in_weight(c1 in any_rgb(), c2 in any_rgb(), w in 0.0..=1.0f64) {
            let a = mix(c1, c2, w).unwrap();
            let b = mix(c2, c1, 1.0 - w).unwrap();
            prop_assert!(a.max_abs_diff(&b) <= 1e-15);
        }

        #[test]
        fn outputs_stay_in_cube(c1 in any_rgb(), c2 in any_rgb(), w in 0.0..=1.0f64) {
            let m = mix(c1, c2, w).unwrap();
            prop_assert!(Rgb::new(m.r(), m.g(), m.b()).is_ok());
            let o = c1.opposite();
            prop_assert!(Rgb::new(o.r(), o.g(), o.b()).is_ok());
        }
    }
}
