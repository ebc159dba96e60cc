//! Scenario files: what to build and which pipelines to run on it.

use std::path::{Path, PathBuf};

use lossylab_core::crypto::InverterStrategy;
use lossylab_core::problems::{builtin_problem, ProblemDoc, PromiseProblem};
use lossylab_core::rational::{self, Rational};
use lossylab_core::reductions::{parse_rational, PermInvariantF, ReductionDoc, StochasticReduction};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::HarnessError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Lossiness,
    Disguise,
    Szk,
    Efi,
    Owf,
    Params,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Lossiness => "lossiness",
            Pipeline::Disguise => "disguise",
            Pipeline::Szk => "szk",
            Pipeline::Efi => "efi",
            Pipeline::Owf => "owf",
            Pipeline::Params => "params",
        }
    }

    pub fn needs_collection(self) -> bool {
        matches!(self, Pipeline::Szk | Pipeline::Efi | Pipeline::Owf)
    }

    pub fn sampled(self, lossiness_sampled: bool) -> bool {
        match self {
            Pipeline::Lossiness => lossiness_sampled,
            Pipeline::Params => false,
            _ => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemSpec {
    Builtin { builtin: String, n: u8 },
    Explicit(ProblemDoc),
}

impl ProblemSpec {
    pub fn build(&self) -> lossylab_core::Result<PromiseProblem> {
        match self {
            ProblemSpec::Builtin { builtin, n } => builtin_problem(builtin, *n),
            ProblemSpec::Explicit(doc) => PromiseProblem::from_doc(doc),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossinessModeSpec {
    Exhaustive,
    Sampled,
}

fn default_budget() -> u64 {
    1_000_000
}

fn default_samples() -> u64 {
    4096
}

fn default_trials() -> u64 {
    1000
}

fn default_runs() -> u32 {
    1
}

fn default_polarize_k() -> u32 {
    8
}

fn inverter_default() -> InverterStrategy {
    InverterStrategy::BruteForce
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub gamma: f64,
    /// Defaults to γ/4.
    #[serde(default)]
    pub eps: Option<f64>,
    /// Defaults to ⌈(m+1)/ε⌉.
    #[serde(default)]
    pub d: Option<usize>,
    /// Claimed lossiness ℓ.
    #[serde(default)]
    pub ell: f64,
    /// Claimed error μ.
    #[serde(default = "rational::zero", with = "any_rational")]
    pub mu: Rational,
    /// Distinguisher advantage assumed by the EFI solver; defaults to the
    /// optimal distinguisher's advantage on the EFI pair.
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default)]
    pub lossiness_mode: Option<LossinessModeSpec>,
    #[serde(default = "default_budget")]
    pub lossiness_budget: u64,
    #[serde(default = "default_samples")]
    pub lossiness_samples: u64,
    #[serde(default = "default_trials")]
    pub efi_trials: u64,
    #[serde(default = "default_runs")]
    pub owf_runs: u32,
    #[serde(default = "inverter_default")]
    pub inverter: InverterStrategy,
    #[serde(default = "default_polarize_k")]
    pub polarize_k: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub problem: ProblemSpec,
    pub reduction: ReductionDoc,
    /// Name understood by the f parser, e.g. `or`, `and`, `majority`.
    pub f: String,
    pub params: Params,
    #[serde(default)]
    pub seed: Option<u64>,
    pub pipelines: Vec<Pipeline>,
    /// Persisted collection to use instead of running the disguise pipeline.
    #[serde(default)]
    pub collection: Option<PathBuf>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Everything a scenario resolves to before any pipeline runs.
pub struct Resolved {
    pub problem: PromiseProblem,
    pub reduction: StochasticReduction,
    pub f: PermInvariantF,
    pub eps: f64,
    pub d: usize,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io { path: path.to_path_buf(), msg: e.to_string() })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, HarnessError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| HarnessError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        if s.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::Usage(format!(
                "{}: schema_version {} unsupported (expected {SCHEMA_VERSION})",
                path.display(),
                s.schema_version
            )));
        }
        Ok(s)
    }

    pub fn resolve(&self) -> lossylab_core::Result<Resolved> {
        let problem = self.problem.build()?;
        let reduction = StochasticReduction::from_doc(&self.reduction, &problem)?;
        let f = PermInvariantF::parse(&self.f, reduction.arity())?;
        let gamma = self.params.gamma;
        if gamma.is_nan() || gamma <= 0.0 {
            return Err(lossylab_core::Error::Parameter(format!("γ = {gamma} must be positive")));
        }
        let eps = self.params.eps.unwrap_or(gamma / 4.0);
        let d = self.params.d.unwrap_or(((reduction.arity() + 1) as f64 / eps).ceil() as usize);
        Ok(Resolved { problem, reduction, f, eps, d })
    }

    pub fn lossiness_sampled(&self, override_mode: Option<LossinessModeSpec>) -> bool {
        override_mode.or(self.params.lossiness_mode) == Some(LossinessModeSpec::Sampled)
    }
}

mod any_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        rational::serde_q::serialize(r, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        parse_rational(&v).map_err(serde::de::Error::custom)
    }
}
