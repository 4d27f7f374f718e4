use serde::{Deserialize, Serialize};

/// Which saliency map backed the utility/occlusion scores of a report.
/// Absolute values are not comparable across backends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaliencySource {
    Precomputed,
    SpectralResidual,
}

/// The utility denominator is ambiguous in prose descriptions of the
/// metric; the default divides by the non-salient pixel count, the
/// alternative by the element-union pixel count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UtilityDenominator {
    #[default]
    NonSalientArea,
    ElementArea,
}

impl UtilityDenominator {
    pub fn as_str(&self) -> &'static str {
        match self {
            UtilityDenominator::NonSalientArea => "non-salient",
            UtilityDenominator::ElementArea => "element-area",
        }
    }
}

impl std::str::FromStr for UtilityDenominator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "non-salient" => Ok(UtilityDenominator::NonSalientArea),
            "element-area" => Ok(UtilityDenominator::ElementArea),
            other => Err(format!(
                "unknown utility denominator {other:?} (expected non-salient or element-area)"
            )),
        }
    }
}

/// Settings that affected the scores, carried with every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub saliency_source: Option<SaliencySource>,
    pub theta: f64,
    /// Rendered as "num/den".
    pub min_area_ratio: String,
    pub utility_denominator: UtilityDenominator,
}

/// Per-layout metric scores. Saliency- and underlay-dependent fields are
/// absent (not zero) when undefined for the layout or unavailable inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub validity: f64,
    pub overlap: f64,
    pub alignment: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub underlay_loose: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub underlay_strict: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub utility: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub occlusion: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub unreadability: Option<f64>,
    pub provenance: Provenance,
}

impl MetricReport {
    /// Values in metric column order; `None` renders as an empty cell.
    pub fn column_values(&self) -> [Option<f64>; 8] {
        [
            Some(self.validity),
            Some(self.overlap),
            Some(self.alignment),
            self.underlay_loose,
            self.underlay_strict,
            self.utility,
            self.occlusion,
            self.unreadability,
        ]
    }
}
