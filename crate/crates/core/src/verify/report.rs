use serde::{Deserialize, Serialize};

/// Machine-readable outcome of one verification suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl SuiteReport {
    /// Standard gate: pass iff the residual is finite and within tolerance.
    pub fn new(name: &str, samples: usize, max_residual: f64, tolerance: f64) -> Self {
        SuiteReport {
            name: name.to_string(),
            samples,
            max_residual,
            tolerance,
            pass: max_residual.is_finite() && max_residual <= tolerance,
            notes: Vec::new(),
        }
    }

    /// Gate decided by the caller (suites combining several tolerances).
    pub fn gated(name: &str, samples: usize, max_residual: f64, tolerance: f64, pass: bool) -> Self {
        SuiteReport {
            name: name.to_string(),
            samples,
            max_residual,
            tolerance,
            pass: pass && max_residual.is_finite(),
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: String) -> Self {
        self.notes.push(note);
        self
    }
}

/// Fold a residual list into a max, treating any non-finite entry as a
/// failure rather than letting NaN slip through a comparison.
pub fn fold_max(residuals: &[f64]) -> f64 {
    let mut m = 0.0f64;
    for &r in residuals {
        if !r.is_finite() {
            return f64::INFINITY;
        }
        m = m.max(r);
    }
    m
}
