use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::session::{Placement, TrialRecord};
use crate::color::Rgb;
use crate::model;
use crate::render::{self, BlurSettings, Geometry, RasterImage, RenderError};

/// Color of the two candidate windows until the choice opens.
pub const PLACEHOLDER: Rgb = Rgb::GRAY;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PanelKind {
    Stimulus,
    New,
    Left,
    Right,
}

impl FromStr for PanelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stimulus" => Ok(PanelKind::Stimulus),
            "new" => Ok(PanelKind::New),
            "left" => Ok(PanelKind::Left),
            "right" => Ok(PanelKind::Right),
            other => Err(format!("unknown panel `{other}` (stimulus, new, left, right)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialPanels {
    pub stimulus: RasterImage,
    pub new_field: RasterImage,
    pub left: RasterImage,
    pub right: RasterImage,
}

fn candidates(
    trial: &TrialRecord,
    g: &Geometry,
    blur: &BlurSettings,
) -> Result<Option<(RasterImage, RasterImage)>, RenderError> {
    let Some(placement) = trial.state.placement() else {
        return Ok(None);
    };
    let spec = &trial.spec.stimulus;
    let baseline = model::complementary_baseline(spec, trial.spec.baseline_scheme)?;
    let pred = model::predict(spec);
    let s1 = render::render_afterimage_panel(g, baseline.c_ct, baseline.c_ci, blur);
    let s2 = render::render_afterimage_panel(g, pred.c_at, pred.c_ai, blur);
    Ok(Some(match placement {
        Placement::S1Left => (s1, s2),
        Placement::S1Right => (s2, s1),
    }))
}

/// All four images shown for a trial. The candidate windows stay gray until
/// the trial reaches the choice.
pub fn trial_panels(
    trial: &TrialRecord,
    g: &Geometry,
    blur: &BlurSettings,
) -> Result<TrialPanels, RenderError> {
    let spec = &trial.spec.stimulus;
    let (left, right) = match candidates(trial, g, blur)? {
        Some(pair) => pair,
        None => {
            let gray = render::render_uniform(g, PLACEHOLDER);
            (gray.clone(), gray)
        }
    };
    Ok(TrialPanels {
        stimulus: render::render_stimulus(g, spec.c_ot, spec.c_oi),
        new_field: render::render_uniform(g, spec.c_n),
        left,
        right,
    })
}

/// One of the four images, rendering only what it needs.
pub fn trial_panel(
    trial: &TrialRecord,
    kind: PanelKind,
    g: &Geometry,
    blur: &BlurSettings,
) -> Result<RasterImage, RenderError> {
    let spec = &trial.spec.stimulus;
    Ok(match kind {
        PanelKind::Stimulus => render::render_stimulus(g, spec.c_ot, spec.c_oi),
        PanelKind::New => render::render_uniform(g, spec.c_n),
        PanelKind::Left | PanelKind::Right => match trial.state.placement() {
            None => render::render_uniform(g, PLACEHOLDER),
            Some(placement) => {
                let s1_wanted = (kind == PanelKind::Left) == (placement == Placement::S1Left);
                let (test, surround) = if s1_wanted {
                    let b = model::complementary_baseline(spec, trial.spec.baseline_scheme)?;
                    (b.c_ct, b.c_ci)
                } else {
                    let p = model::predict(spec);
                    (p.c_at, p.c_ai)
                };
                render::render_afterimage_panel(g, test, surround, blur)
            }
        },
    })
}
