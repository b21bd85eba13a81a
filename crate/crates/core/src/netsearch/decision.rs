use serde::{Deserialize, Serialize};

/// Outcome of a gap decision at a distance threshold `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "SIMULATABLE")]
    Simulatable,
    #[serde(rename = "NOT-SIMULATABLE-AT-RESOLUTION")]
    NotSimulatableAtResolution,
    #[serde(rename = "INDETERMINATE")]
    Indeterminate,
}

impl Verdict {
    /// `≤ ε` is simulatable; `> 10ε` after an exhaustive search is not; anything else is open.
    pub fn classify(best: f64, epsilon: f64, truncated: bool) -> Verdict {
        if best <= epsilon {
            Verdict::Simulatable
        } else if best > 10.0 * epsilon && !truncated {
            Verdict::NotSimulatableAtResolution
        } else {
            Verdict::Indeterminate
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Simulatable => "SIMULATABLE",
            Verdict::NotSimulatableAtResolution => "NOT-SIMULATABLE-AT-RESOLUTION",
            Verdict::Indeterminate => "INDETERMINATE",
        }
    }
}

/// Result of a search, with the best witness pair and an echo of the configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision<W, C> {
    pub verdict: Verdict,
    pub best_distance: f64,
    pub witness: Option<W>,
    pub candidates_examined: u64,
    /// Whether the candidate budget cut the search short.
    pub truncated: bool,
    /// How the witness distance was recomputed.
    pub verification: String,
    pub config: C,
}
