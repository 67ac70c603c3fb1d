use serde::{Deserialize, Serialize};

use crate::color::Rgb;
use crate::model::{BaselineScheme, StimulusSpec};

pub type TrialId = u32;

/// Fixation time before the new field appears.
pub const DEFAULT_ADAPT_SECONDS: f64 = 20.0;

/// Test-field colors of the battery, in row order.
pub const BATTERY_TEST_COLORS: [Rgb; 3] = [Rgb::RED, Rgb::GREEN, Rgb::BLUE];
/// New-field colors of the battery, in column order.
pub const BATTERY_NEW_COLORS: [Rgb; 5] = [Rgb::WHITE, Rgb::BLACK, Rgb::RED, Rgb::GREEN, Rgb::BLUE];

/// One trial of a session's battery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub trial_id: TrialId,
    pub stimulus: StimulusSpec,
    pub baseline_scheme: BaselineScheme,
    pub adapt_seconds: f64,
}

impl TrialSpec {
    pub fn adapt_ms(&self) -> u64 {
        (self.adapt_seconds * 1000.0).round() as u64
    }
}

/// The fifteen verification trials: a white surround throughout, every
/// primary test color against white, black and the three primaries as the
/// new field. Trial ids follow the row-major order of that grid.
pub fn build_battery(scheme: BaselineScheme) -> Vec<TrialSpec> {
    build_battery_with(scheme, DEFAULT_ADAPT_SECONDS)
}

pub fn build_battery_with(scheme: BaselineScheme, adapt_seconds: f64) -> Vec<TrialSpec> {
    BATTERY_TEST_COLORS
        .iter()
        .flat_map(|&c_ot| BATTERY_NEW_COLORS.iter().map(move |&c_n| (c_ot, c_n)))
        .enumerate()
        .map(|(i, (c_ot, c_n))| TrialSpec {
            trial_id: i as TrialId,
            stimulus: StimulusSpec::new(c_ot, Rgb::WHITE, c_n),
            baseline_scheme: scheme,
            adapt_seconds,
        })
        .collect()
}
