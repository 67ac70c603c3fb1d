//! Prediction of negative-afterimage colors from simultaneous and successive
//! contrast, stimulus rendering, and the bookkeeping for forced-choice
//! verification sessions.
//!
//! ```
//! use afterimage::{predict, Rgb, StimulusSpec};
//!
//! let pred = predict(&StimulusSpec::new(Rgb::RED, Rgb::WHITE, Rgb::WHITE));
//! assert!(pred.c_at.max_abs_diff(&Rgb::new(0.76, 1.0, 1.0).unwrap()) < 1e-12);
//! ```

pub mod color;
mod exec;
pub mod experiment;
pub mod model;
pub mod reference;
pub mod render;

pub use color::{classify_inducing, mix, ColorError, InducingClass, NamedColor, Rgb};
pub use exec::Exec;
pub use model::{
    afterimage_inducing_color, afterimage_test_color, complementary_baseline,
    modified_test_color, predict, predict_with, select_params, AfterimagePrediction, Baseline,
    BaselineScheme, ModelError, ModelParams, Provenance, StimulusSpec,
};
pub use render::{BlurSettings, Geometry, RasterImage, RenderError};
