//! Shared result types for the two-sample tests.

use serde::{Deserialize, Serialize};

/// Identifies which test produced an outcome. Declaration order fixes the
/// row order of reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Gray's two-sample subdistribution-hazard test (rho = 0).
    Gray,
    /// Normal-theory test on the RMTL difference.
    Diff,
    /// Minimum of the Gray and Diff P-values, permutation-calibrated.
    PComb,
    /// Fisher combination of the Gray and Diff P-values, permutation-calibrated.
    FComb,
    /// Two-stage Gray-then-Diff procedure.
    TComb,
    /// Diff applied to the composite-event restricted mean (RC scale).
    #[serde(rename = "Diff*")]
    DiffStar,
    /// RMST difference counting only the event of interest.
    #[serde(rename = "RMSTi")]
    RmstInterest,
    /// RMST difference counting the composite of both events.
    #[serde(rename = "RMSTc")]
    RmstComposite,
}

impl Method {
    /// Display label, as used in report rows and JSON keys.
    pub fn label(self) -> &'static str {
        match self {
            Method::Gray => "Gray",
            Method::Diff => "Diff",
            Method::PComb => "PComb",
            Method::FComb => "FComb",
            Method::TComb => "TComb",
            Method::DiffStar => "Diff*",
            Method::RmstInterest => "RMSTi",
            Method::RmstComposite => "RMSTc",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// An effect estimate attached to a test outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Effect {
    pub point: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    /// What the point estimate measures, e.g. "RMTL difference (group 1 - group 2)".
    pub label: String,
}

/// Optional diagnostics carried alongside a P-value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TestMeta {
    /// Stage at which the two-stage procedure stopped (1 or 2).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<u8>,
    /// Conditional rejection estimate from the two-stage procedure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_hat: Option<f64>,
    /// Number of permutations actually used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutations: Option<u32>,
    /// Human-readable caveat (e.g. empty conditioning set at stage two).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl TestMeta {
    fn is_empty(&self) -> bool {
        self.stage.is_none()
            && self.q_hat.is_none()
            && self.permutations.is_none()
            && self.warning.is_none()
    }
}

/// Result of one two-sample test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub method: Method,
    pub statistic: f64,
    pub p_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effect: Option<Effect>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<TestMeta>,
}

impl TestOutcome {
    pub(crate) fn new(method: Method, statistic: f64, p_value: f64) -> Self {
        TestOutcome { method, statistic, p_value, effect: None, meta: None }
    }

    pub(crate) fn with_effect(mut self, effect: Effect) -> Self {
        self.effect = Some(effect);
        self
    }

    pub(crate) fn with_meta(mut self, meta: TestMeta) -> Self {
        if !meta.is_empty() {
            self.meta = Some(meta);
        }
        self
    }
}
