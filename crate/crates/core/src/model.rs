//! Afterimage color prediction.
//!
//! A stimulus is a circular test field of color `c_ot` inside a large
//! rectangular inducing field `c_oi`. After adaptation the gaze moves to a
//! uniform field `c_n`. The prediction runs in three steps:
//!
//! 1. simultaneous contrast tints the test field with the inducing field's
//!    opposite: `c_mt = α·(1 − c_oi) + (1 − α)·c_ot`;
//! 2. successive contrast induces the opposite of that modified color in the
//!    afterimage test field: `c_at = β_T·(1 − c_mt) + (1 − β_T)·c_n`, which
//!    expands to `β_T(1 − α)(1 − c_ot) + β_T·α·c_oi + (1 − β_T)·c_n`;
//! 3. the afterimage inducing field only sees successive contrast:
//!    `c_ai = β_I·(1 − c_oi) + (1 − β_I)·c_n`.
//!
//! All three are convex combinations of colors in the unit cube, so results
//! stay in range without clamping (up to last-bit rounding).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{classify_inducing, InducingClass, Rgb, DEFAULT_WHITE_TOLERANCE};

/// Simultaneous-contrast weight used outside the special cases.
pub const DEFAULT_ALPHA: f64 = 0.4;
/// Successive-contrast weight for the test field outside the special cases.
pub const DEFAULT_BETA_T: f64 = 0.4;
/// Inducing-field weight when the inducing field is white.
pub const BETA_I_WHITE: f64 = 0.1;
/// Inducing-field weight when the inducing field is anything but white.
pub const BETA_I_CHROMATIC: f64 = 0.2;
/// Brightness factor applied to the complementary baseline panel.
pub const BASELINE_DIMMING: f64 = 0.9;

/// Group-1 "purple", only reachable as the partner of yellow.
pub const PURPLE: Rgb = Rgb::exact(0.5, 0.0, 0.5);
/// Group-1 "orange", only reachable as the partner of blue.
pub const ORANGE: Rgb = Rgb::exact(1.0, 0.5, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("model weight `{name}` must lie strictly inside (0, 1), got {value}")]
    Weight { name: &'static str, value: f64 },
    #[error("no group-1 complementary partner for {0}; defined only for red, green, yellow, purple, blue and orange")]
    UnpairedColor(Rgb),
}

/// The triple that defines one adaptation trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StimulusSpec {
    /// Original color of the circular test field.
    pub c_ot: Rgb,
    /// Original color of the surrounding inducing field.
    pub c_oi: Rgb,
    /// New uniform color viewed after adaptation.
    pub c_n: Rgb,
}

impl StimulusSpec {
    pub fn new(c_ot: Rgb, c_oi: Rgb, c_n: Rgb) -> Self {
        StimulusSpec { c_ot, c_oi, c_n }
    }
}

impl fmt::Display for StimulusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "test={} inducing={} new={}",
            crate::color::label(self.c_ot),
            crate::color::label(self.c_oi),
            crate::color::label(self.c_n)
        )
    }
}

/// How a parameter set was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Default,
    SpecialRed,
    SpecialGreen,
    SpecialBlue,
    Manual,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Default => "default",
            Provenance::SpecialRed => "special_red",
            Provenance::SpecialGreen => "special_green",
            Provenance::SpecialBlue => "special_blue",
            Provenance::Manual => "manual",
        })
    }
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    beta_t: f64,
    beta_i: f64,
    provenance: Provenance,
}

/// Model weights `(α, β_T, β_I)`, each strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    alpha: f64,
    beta_t: f64,
    beta_i: f64,
    provenance: Provenance,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = ModelError;

    fn try_from(raw: RawParams) -> Result<Self, Self::Error> {
        let p = ModelParams::checked(raw.alpha, raw.beta_t, raw.beta_i, raw.provenance)?;
        let expected = match raw.provenance {
            Provenance::Manual => None,
            Provenance::Default => Some((DEFAULT_ALPHA, DEFAULT_BETA_T)),
            Provenance::SpecialRed => Some(SPECIAL_RED),
            Provenance::SpecialGreen => Some(SPECIAL_GREEN),
            Provenance::SpecialBlue => Some(SPECIAL_BLUE),
        };
        match expected {
            Some((alpha, beta_t)) if alpha != p.alpha || beta_t != p.beta_t => {
                Err(ModelError::Weight {
                    name: "alpha/beta_t",
                    value: p.alpha,
                })
            }
            _ => Ok(p),
        }
    }
}

// (α, β_T) when the inducing field is white and the new color repeats the
// test color. Green is (0.75, 0.45): it is the only pairing that yields the
// published green/green afterimage (0.45, 0.8875, 0.45); (0.7, 0.4) belongs
// to blue.
const SPECIAL_RED: (f64, f64) = (0.6, 0.35);
const SPECIAL_GREEN: (f64, f64) = (0.75, 0.45);
const SPECIAL_BLUE: (f64, f64) = (0.7, 0.4);

impl ModelParams {
    fn checked(
        alpha: f64,
        beta_t: f64,
        beta_i: f64,
        provenance: Provenance,
    ) -> Result<Self, ModelError> {
        for (name, value) in [("alpha", alpha), ("beta_t", beta_t), ("beta_i", beta_i)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(ModelError::Weight { name, value });
            }
        }
        Ok(ModelParams {
            alpha,
            beta_t,
            beta_i,
            provenance,
        })
    }

    /// Hand-picked weights; provenance is [`Provenance::Manual`].
    pub fn manual(alpha: f64, beta_t: f64, beta_i: f64) -> Result<Self, ModelError> {
        Self::checked(alpha, beta_t, beta_i, Provenance::Manual)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta_t(&self) -> f64 {
        self.beta_t
    }

    pub fn beta_i(&self) -> f64 {
        self.beta_i
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Coefficients of `(1 − c_ot, c_oi, c_n)` in the expanded test-field
    /// formula. They always sum to one.
    pub fn test_field_weights(&self) -> [f64; 3] {
        [
            self.beta_t * (1.0 - self.alpha),
            self.beta_t * self.alpha,
            1.0 - self.beta_t,
        ]
    }
}

/// Chooses `(α, β_T, β_I)` for a stimulus.
///
/// A white inducing field with `c_n == c_ot` on an exact primary gets that
/// primary's tuned weights; everything else uses `α = β_T = 0.4`. `β_I` only
/// depends on whether the inducing field is white.
pub fn select_params(spec: &StimulusSpec) -> ModelParams {
    let class = classify_inducing(spec.c_oi, DEFAULT_WHITE_TOLERANCE);
    let beta_i = match class {
        InducingClass::White => BETA_I_WHITE,
        InducingClass::Chromatic => BETA_I_CHROMATIC,
    };
    let special = if class == InducingClass::White && spec.c_n == spec.c_ot {
        if spec.c_ot == Rgb::RED {
            Some((SPECIAL_RED, Provenance::SpecialRed))
        } else if spec.c_ot == Rgb::GREEN {
            Some((SPECIAL_GREEN, Provenance::SpecialGreen))
        } else if spec.c_ot == Rgb::BLUE {
            Some((SPECIAL_BLUE, Provenance::SpecialBlue))
        } else {
            None
        }
    } else {
        None
    };
    let ((alpha, beta_t), provenance) =
        special.unwrap_or(((DEFAULT_ALPHA, DEFAULT_BETA_T), Provenance::Default));
    ModelParams {
        alpha,
        beta_t,
        beta_i,
        provenance,
    }
}

/// Raw components of the modified test color, before they become an [`Rgb`].
pub fn modified_test_components(spec: &StimulusSpec, p: &ModelParams) -> [f64; 3] {
    let a = p.alpha;
    let oi = spec.c_oi.components();
    let ot = spec.c_ot.components();
    std::array::from_fn(|i| a * (1.0 - oi[i]) + (1.0 - a) * ot[i])
}

/// Raw components of the afterimage test-field color (expanded form).
pub fn afterimage_test_components(spec: &StimulusSpec, p: &ModelParams) -> [f64; 3] {
    let [w_ot, w_oi, w_n] = p.test_field_weights();
    let ot = spec.c_ot.components();
    let oi = spec.c_oi.components();
    let n = spec.c_n.components();
    std::array::from_fn(|i| w_ot * (1.0 - ot[i]) + w_oi * oi[i] + w_n * n[i])
}

/// Raw components of the afterimage inducing-field color.
pub fn afterimage_inducing_components(spec: &StimulusSpec, p: &ModelParams) -> [f64; 3] {
    let bi = p.beta_i;
    let oi = spec.c_oi.components();
    let n = spec.c_n.components();
    std::array::from_fn(|i| bi * (1.0 - oi[i]) + (1.0 - bi) * n[i])
}

/// Color the test field appears to have while the stimulus is viewed.
pub fn modified_test_color(spec: &StimulusSpec, p: &ModelParams) -> Rgb {
    Rgb::from_convex(modified_test_components(spec, p))
}

/// Predicted afterimage color inside the test field.
pub fn afterimage_test_color(spec: &StimulusSpec, p: &ModelParams) -> Rgb {
    Rgb::from_convex(afterimage_test_components(spec, p))
}

/// Predicted afterimage color of the inducing field.
pub fn afterimage_inducing_color(spec: &StimulusSpec, p: &ModelParams) -> Rgb {
    Rgb::from_convex(afterimage_inducing_components(spec, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AfterimagePrediction {
    pub c_mt: Rgb,
    pub c_at: Rgb,
    pub c_ai: Rgb,
    pub params: ModelParams,
}

pub fn predict(spec: &StimulusSpec) -> AfterimagePrediction {
    predict_with(spec, &select_params(spec))
}

/// Like [`predict`] with caller-supplied weights.
pub fn predict_with(spec: &StimulusSpec, params: &ModelParams) -> AfterimagePrediction {
    AfterimagePrediction {
        c_mt: modified_test_color(spec, params),
        c_at: afterimage_test_color(spec, params),
        c_ai: afterimage_inducing_color(spec, params),
        params: *params,
    }
}

/// Predicts a batch of stimuli, in parallel when the `parallel` feature is on.
pub fn predict_batch(specs: &[StimulusSpec]) -> Vec<AfterimagePrediction> {
    predict_batch_with(specs, crate::Exec::default())
}

pub fn predict_batch_with(specs: &[StimulusSpec], exec: crate::Exec) -> Vec<AfterimagePrediction> {
    crate::exec::map_slice(specs, exec, predict)
}

/// Which traditional complementary pairing a baseline uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineScheme {
    /// Red–green, yellow–purple, blue–orange.
    Group1,
    /// Opposite colors: red–cyan, green–magenta, blue–yellow.
    Group2,
}

impl BaselineScheme {
    pub const ALL: [BaselineScheme; 2] = [BaselineScheme::Group1, BaselineScheme::Group2];

    pub fn name(self) -> &'static str {
        match self {
            BaselineScheme::Group1 => "group1",
            BaselineScheme::Group2 => "group2",
        }
    }

    /// The complementary partner of `c` under this scheme.
    pub fn complement(self, c: Rgb) -> Result<Rgb, ModelError> {
        match self {
            BaselineScheme::Group2 => Ok(c.opposite()),
            BaselineScheme::Group1 => {
                const PAIRS: [(Rgb, Rgb); 3] = [
                    (Rgb::RED, Rgb::GREEN),
                    (Rgb::YELLOW, PURPLE),
                    (Rgb::BLUE, ORANGE),
                ];
                PAIRS
                    .iter()
                    .find_map(|&(a, b)| {
                        if c == a {
                            Some(b)
                        } else if c == b {
                            Some(a)
                        } else {
                            None
                        }
                    })
                    .ok_or(ModelError::UnpairedColor(c))
            }
        }
    }
}

impl fmt::Display for BaselineScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BaselineScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "group1" | "1" => Ok(BaselineScheme::Group1),
            "group2" | "2" => Ok(BaselineScheme::Group2),
            other => Err(format!("unknown baseline scheme `{other}` (group1 or group2)")),
        }
    }
}

/// Test and surround colors of the traditional complementary afterimage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub c_ct: Rgb,
    pub c_ci: Rgb,
}

/// The complement of the test color drawn over the new color, both dimmed
/// by [`BASELINE_DIMMING`].
pub fn complementary_baseline(
    spec: &StimulusSpec,
    scheme: BaselineScheme,
) -> Result<Baseline, ModelError> {
    let complement = scheme.complement(spec.c_ot)?;
    let dim = |c: Rgb| {
        c.scale(BASELINE_DIMMING)
            .expect("dimming factor is a valid scale")
    };
    Ok(Baseline {
        c_ct: dim(complement),
        c_ci: dim(spec.c_n),
    })
}
