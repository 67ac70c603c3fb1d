//! Published reference cases and how the model compares against them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::color::Rgb;
use crate::model::{self, BaselineScheme, StimulusSpec};

/// Largest per-component deviation still counted as a match.
pub const MATCH_TOLERANCE: f64 = 1e-6;

const MANIFEST: &str = include_str!("../data/reference_figures.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCase {
    pub id: String,
    pub title: String,
    pub test: Rgb,
    pub inducing: Rgb,
    pub new: Rgb,
    pub printed_c_at: Option<Rgb>,
    pub printed_c_ai: Option<Rgb>,
    pub printed_c_ct: Option<Rgb>,
}

impl ReferenceCase {
    pub fn spec(&self) -> StimulusSpec {
        StimulusSpec::new(self.test, self.inducing, self.new)
    }
}

#[derive(Deserialize)]
struct RawCase {
    id: String,
    title: String,
    test: String,
    inducing: String,
    new: String,
    printed_c_at: Option<Rgb>,
    printed_c_ai: Option<Rgb>,
    printed_c_ct: Option<Rgb>,
}

#[derive(Deserialize)]
struct Manifest {
    case: Vec<RawCase>,
}

/// The eight cases in the bundled manifest, in figure order.
pub fn reference_cases() -> Vec<ReferenceCase> {
    let manifest: Manifest = toml::from_str(MANIFEST).expect("bundled manifest parses");
    manifest
        .case
        .into_iter()
        .map(|c| {
            let color = |s: &str| s.parse::<Rgb>().expect("bundled manifest colors parse");
            ReferenceCase {
                test: color(&c.test),
                inducing: color(&c.inducing),
                new: color(&c.new),
                id: c.id,
                title: c.title,
                printed_c_at: c.printed_c_at,
                printed_c_ai: c.printed_c_ai,
                printed_c_ct: c.printed_c_ct,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Model afterimage, test field.
    CAt,
    /// Model afterimage, surround.
    CAi,
    /// Complementary baseline, test field.
    CCt,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::CAt => "C_AT",
            Quantity::CAi => "C_AI",
            Quantity::CCt => "C_CT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub case_id: String,
    pub quantity: Quantity,
    pub printed: Rgb,
    pub computed: Rgb,
    pub deviation: f64,
    pub matches: bool,
    /// Explanation attached to mismatches when one is found.
    pub note: Option<String>,
}

/// Compares every printed color of every case with what the model computes.
///
/// When a printed test-field color disagrees with the model but agrees with
/// the model evaluated on a white inducing field, the comparison says so.
pub fn compare_reference() -> Vec<Comparison> {
    let mut out = Vec::new();
    for case in reference_cases() {
        let spec = case.spec();
        let pred = model::predict(&spec);
        let baseline = model::complementary_baseline(&spec, BaselineScheme::Group2)
            .expect("opposite-color baseline is total");
        let rows = [
            (Quantity::CAt, case.printed_c_at, pred.c_at),
            (Quantity::CAi, case.printed_c_ai, pred.c_ai),
            (Quantity::CCt, case.printed_c_ct, baseline.c_ct),
        ];
        for (quantity, printed, computed) in rows {
            let Some(printed) = printed else { continue };
            let deviation = printed.max_abs_diff(&computed);
            let matches = deviation <= MATCH_TOLERANCE;
            let note = if !matches && quantity == Quantity::CAt && spec.c_oi != Rgb::WHITE {
                let white = StimulusSpec::new(spec.c_ot, Rgb::WHITE, spec.c_n);
                let alt = model::predict(&white).c_at;
                (printed.max_abs_diff(&alt) <= MATCH_TOLERANCE).then(|| {
                    format!(
                        "printed value equals the prediction for a white inducing field {alt}; \
                         with the stated inducing field the formula gives {computed}"
                    )
                })
            } else {
                None
            };
            out.push(Comparison {
                case_id: case.id.clone(),
                quantity,
                printed,
                computed,
                deviation,
                matches,
                note,
            });
        }
    }
    out
}

/// Plain-text table of [`compare_reference`].
pub fn format_comparisons(rows: &[Comparison]) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<11} {:<5} {:<24} {:<24} {:>10}  status",
        "case", "value", "published", "computed", "max |d|"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<11} {:<5} {:<24} {:<24} {:>10.2e}  {}",
            r.case_id,
            r.quantity.to_string(),
            r.printed.to_string(),
            format!("{:.4}", r.computed),
            r.deviation,
            if r.matches { "ok" } else { "MISMATCH" }
        );
        if let Some(note) = &r.note {
            let _ = writeln!(s, "{:<11} note: {note}", "");
        }
    }
    s
}
