//! Scenario configuration, conditions (I)–(V), and end-to-end runs of the
//! exact-sequence checks on torus curves.

mod conditions;
mod local;
mod report;
mod scan;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::local_model::TwistProfile;
use crate::torus::{self, SlopeCurve, TorusError, TwistConvention};

pub use conditions::{
    check_conditions, ConditionInputs, ConditionResult, ConditionStatus, ConditionsReport,
    MarginRecord, Witness,
};
pub use local::{local_check, LocalCheckReport, NumericCheck};
pub use report::{
    run_exact_sequence, BookSummary, ExactSequenceReport, ProfileSummary, REPORT_SCHEMA,
};
pub use scan::{scan, ScanEntry, ScanReport};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

/// Direction of a curve and an optional offset written as `"k/n"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub p: i64,
    pub q: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<String>,
}

impl CurveSpec {
    pub fn new(p: i64, q: i64) -> Self {
        CurveSpec { p, q, offset: None }
    }

    pub fn from_curve(c: &SlopeCurve) -> Self {
        CurveSpec {
            p: c.p(),
            q: c.q(),
            offset: Some(c.offset().to_string()),
        }
    }

    fn offset(&self) -> Result<Option<Rational64>, ConfigError> {
        match &self.offset {
            None => Ok(None),
            Some(s) => torus::rational_str::parse(s)
                .map(Some)
                .ok_or_else(|| ConfigError::Invalid(format!("offset {s:?} is not a rational"))),
        }
    }
}

fn default_l() -> CurveSpec {
    CurveSpec::new(1, 0)
}
fn default_l0() -> CurveSpec {
    CurveSpec::new(0, 1)
}
fn default_l1() -> CurveSpec {
    CurveSpec::new(1, 1)
}
fn default_epsilon() -> f64 {
    0.0625
}
fn default_delta() -> f64 {
    0.01
}
fn default_twist_r() -> f64 {
    0.02
}
fn default_lambda() -> f64 {
    1.0
}
fn default_max_slope() -> i64 {
    4
}
fn default_true() -> bool {
    true
}
fn default_scan_dim() -> usize {
    24
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_l")]
    pub l: CurveSpec,
    #[serde(default = "default_l0")]
    pub l0: CurveSpec,
    #[serde(default = "default_l1")]
    pub l1: CurveSpec,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_twist_r")]
    pub twist_r: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_slope")]
    pub max_slope: i64,
    #[serde(default)]
    pub convention: TwistConvention,
    #[serde(default = "default_true")]
    pub higher_terms: bool,
    #[serde(default = "default_true")]
    pub cancel_pairs: bool,
    /// Scan mode builds full triples only up to this many generators in `C`.
    #[serde(default = "default_scan_dim")]
    pub scan_max_dim: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

/// The three curves with offsets fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedCurves {
    pub l: SlopeCurve,
    pub l0: SlopeCurve,
    pub l1: SlopeCurve,
}

/// Candidates tried when an offset is left open.
pub const OFFSET_CANDIDATES: usize = 24;

impl ScenarioConfig {
    pub fn from_json(s: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon = {} must be positive", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return bad(format!("delta = {} outside (0, 1/2)", self.delta));
        }
        if !(self.twist_r > 0.0 && self.twist_r < 0.5) {
            return bad(format!("twist_r = {} outside (0, 1/2)", self.twist_r));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda = {} must be positive", self.lambda));
        }
        if self.max_slope < 1 {
            return bad(format!("max_slope = {} must be at least 1", self.max_slope));
        }
        for (name, c) in [("l", &self.l), ("l0", &self.l0), ("l1", &self.l1)] {
            SlopeCurve::new(c.p, c.q, Rational64::from(0))
                .map_err(|e| ConfigError::Invalid(format!("{name}: {e}")))?;
            c.offset()?;
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<TwistProfile<f64>, ConfigError> {
        TwistProfile::new(self.twist_r, self.lambda)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Fills open offsets: `l` defaults to 0, the others are chosen by
    /// [`torus::generic_offsets`] with the config seed.
    pub fn resolve(&self) -> Result<ResolvedCurves, ConfigError> {
        self.validate()?;
        let l = SlopeCurve::new(self.l.p, self.l.q, self.l.offset()?.unwrap_or_default())?;
        let explicit = |c: &CurveSpec| -> Result<Option<SlopeCurve>, ConfigError> {
            Ok(match c.offset()? {
                Some(o) => Some(SlopeCurve::new(c.p, c.q, o)?),
                None => None,
            })
        };
        let (e0, e1) = (explicit(&self.l0)?, explicit(&self.l1)?);
        let (l0, l1) = match (e0, e1) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                let (g0, g1) = torus::generic_offsets(
                    &l,
                    (self.l0.p, self.l0.q),
                    (self.l1.p, self.l1.q),
                    self.seed,
                    OFFSET_CANDIDATES,
                )?;
                (e0.unwrap_or(g0), e1.unwrap_or(g1))
            }
        };
        Ok(ResolvedCurves { l, l0, l1 })
    }
}
