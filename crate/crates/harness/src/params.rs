//! The `params` subcommand: closed-form thresholds for a JSON parameter block.

use std::fmt::Write as _;
use std::path::Path;

use lossylab_core::params::{
    ksat_params, lossiness_bound_wcdist, regime_check, theta_report, turing_lossiness_bound, KsatParams, RegimeInputs,
    RegimeReport, ThetaReport,
};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KsatBlock {
    pub k: u32,
    pub s_star: f64,
    pub n: u32,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub s_k: Option<f64>,
    #[serde(default)]
    pub m: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WcDistBlock {
    pub m: u32,
    pub n: u32,
    pub d: f64,
    pub gamma: f64,
    /// Hint length; when present the Turing bound is reported as well.
    #[serde(default)]
    pub h: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsBlock {
    pub mu: f64,
    pub lambda: f64,
    pub gamma: f64,
    #[serde(default = "one")]
    pub m: u32,
    #[serde(default)]
    pub wcdist: Option<WcDistBlock>,
    #[serde(default)]
    pub regime: Option<RegimeInputs>,
    #[serde(default)]
    pub ksat: Option<KsatBlock>,
}

fn one() -> u32 {
    1
}

impl ParamsBlock {
    pub fn from_claims(mu: f64, lambda: f64, gamma: f64, m: u32) -> Self {
        ParamsBlock { mu, lambda, gamma, m, wcdist: None, regime: None, ksat: None }
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io { path: path.to_path_buf(), msg: e.to_string() })?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterReport {
    pub inputs: ParamsBlock,
    pub theta: ThetaReport,
    pub wcdist_lambda: Option<f64>,
    pub turing_lambda: Option<f64>,
    pub regime: Option<RegimeReport>,
    pub ksat: Option<KsatParams>,
}

pub fn parameter_report(block: &ParamsBlock) -> Result<ParameterReport, HarnessError> {
    let theta = theta_report(block.mu, block.lambda, block.gamma, block.m)?;
    let ksat = block
        .ksat
        .as_ref()
        .map(|k| ksat_params(k.k, k.s_star, k.n, k.eta, k.s_k, k.m))
        .transpose()?;
    Ok(ParameterReport {
        inputs: block.clone(),
        theta,
        wcdist_lambda: block.wcdist.as_ref().map(|w| lossiness_bound_wcdist(w.m, w.n, w.d, w.gamma)),
        turing_lambda: block.wcdist.as_ref().and_then(|w| w.h.map(|h| turing_lossiness_bound(w.n, w.d, w.gamma, h))),
        regime: block.regime.as_ref().map(regime_check),
        ksat,
    })
}

pub fn render_table(rep: &ParameterReport) -> String {
    let t = &rep.theta;
    let mut out = String::new();
    let mut row = |k: &str, v: String| {
        let _ = writeln!(out, "  {k:<14} {v}");
    };
    row("μ", format!("{:e}", t.mu));
    row("λ", format!("{}", t.lambda));
    row("γ", format!("{:e}", t.gamma));
    row("δ(λ)", format!("{:.15}", t.delta));
    row("θ_szk", t.theta_szk.map_or("degenerate (δ + γ = 0)".into(), |v| format!("{v:.12}")));
    row("θ_efi", format!("{:.12e}", t.theta_efi));
    row("θ_owf", format!("{:.12e}", t.theta_owf));
    row("θ_ows", format!("{:.12e}", t.theta_ows));
    row("τ_ows", format!("{:.12e}", t.tau_ows));
    row("k_owf", t.k_owf.map_or("-".into(), |k| k.to_string()));
    if let Some(l) = rep.wcdist_lambda {
        row("λ (wc-dist)", format!("{l}"));
    }
    if let Some(l) = rep.turing_lambda {
        row("λ (turing)", format!("{l}"));
    }
    if let Some(r) = &rep.regime {
        for g in &r.regimes {
            row(&g.theorem, format!("{} (binding: {})", g.satisfied, g.binding.as_deref().unwrap_or("-")));
        }
        if let Some(msg) = &r.runtime_refusal {
            row("refused", msg.clone());
        }
    }
    if let Some(k) = &rep.ksat {
        row("τ_kSAT", format!("{}", k.tau));
        row("log T ceiling", format!("{}", k.runtime_exponent));
        row("log d ceiling", format!("{} + 2.5 log m", k.distance_exponent));
        if let Some(ok) = k.s_bound_ok {
            row("s* ≤ 2k s_k", ok.to_string());
        }
    }
    out
}
