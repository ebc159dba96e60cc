//! Pipeline orchestration.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use lossylab_core::crypto::{efi_decide, efi_pair, owf_dichotomy, InverterStrategy};
use lossylab_core::disguise::{build_disguising_collection, DisguiseCollection, DisguiseParams};
use lossylab_core::information::LOG_TOL;
use lossylab_core::rational::{self, Rational};
use lossylab_core::reductions::{mild_lossiness_with_mode, p_of_f, LossinessMode};
use lossylab_core::rng;
use lossylab_core::szk::{polarize, szk_gap_report, SzkClaims, SzkContext};
use serde_json::{json, Value};

use crate::params::parameter_report;
use crate::report::{RunReport, Timing, Verdict};
use crate::scenario::{LossinessModeSpec, Pipeline, Resolved, Scenario, SCHEMA_VERSION};
use crate::HarnessError;

pub const SEED_ENV: &str = "LOSSYLAB_SEED";

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the scenario's seed.
    pub seed: Option<u64>,
    pub lossiness_mode: Option<LossinessModeSpec>,
    /// Run only these pipelines (plus the disguise step they depend on).
    pub only: Option<Vec<Pipeline>>,
    pub jobs: Option<usize>,
}

/// `--seed`, then the scenario, then `LOSSYLAB_SEED`.
pub fn resolve_seed(cli: Option<u64>, scenario: Option<u64>) -> Result<Option<u64>, HarnessError> {
    if let Some(s) = cli.or(scenario) {
        return Ok(Some(s));
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| HarnessError::Usage(format!("{SEED_ENV}={v:?} is not a u64"))),
        Err(_) => Ok(None),
    }
}

struct Ctx<'a> {
    scenario: &'a Scenario,
    resolved: Resolved,
    seed: u64,
    claims: SzkClaims,
    results: BTreeMap<String, Value>,
    verdicts: Vec<Verdict>,
    counters: BTreeMap<String, u64>,
    collection: Option<DisguiseCollection>,
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn q(r: &Rational) -> String {
    r.to_string()
}

/// Run a scenario and return its report; `base` resolves relative paths in it.
pub fn run_scenario(scenario: &Scenario, base: &Path, opts: &RunOptions) -> Result<RunReport, HarnessError> {
    let started = Instant::now();
    let mut pipelines: Vec<Pipeline> = opts.only.clone().unwrap_or_else(|| scenario.pipelines.clone());
    if pipelines.iter().any(|p| p.needs_collection()) && scenario.collection.is_none() {
        pipelines.push(Pipeline::Disguise);
    }
    pipelines.sort();
    pipelines.dedup();
    let sampled_loss = scenario.lossiness_sampled(opts.lossiness_mode);
    let seed = resolve_seed(opts.seed, scenario.seed)?;
    let seed = match seed {
        Some(s) => s,
        None if pipelines.iter().any(|p| p.sampled(sampled_loss)) => {
            return Err(HarnessError::Usage(format!(
                "scenario {:?} runs sampled pipelines but no seed was given (scenario, --seed or {SEED_ENV})",
                scenario.name
            )))
        }
        None => 0,
    };
    let resolved = scenario.resolve()?;
    let claims = SzkClaims { mu: scenario.params.mu.clone(), lambda: scenario.params.ell, gamma: scenario.params.gamma };
    let mut ctx = Ctx {
        scenario,
        resolved,
        seed,
        claims,
        results: BTreeMap::new(),
        verdicts: Vec::new(),
        counters: BTreeMap::new(),
        collection: None,
    };
    if let Some(path) = &scenario.collection {
        let path = base.join(path);
        let text = std::fs::read_to_string(&path).map_err(|e| HarnessError::Io { path: path.clone(), msg: e.to_string() })?;
        let v: Value = serde_json::from_str(&text).map_err(|e| HarnessError::Parse {
            path: path.clone(),
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        ctx.collection = Some(DisguiseCollection::from_json(v.get("collection").unwrap_or(&v))?);
    }
    let mut timing = Timing { jobs: opts.jobs, ..Timing::default() };
    for &p in &pipelines {
        let t = Instant::now();
        match p {
            Pipeline::Lossiness => lossiness(&mut ctx, sampled_loss)?,
            Pipeline::Disguise => disguise(&mut ctx)?,
            Pipeline::Szk => szk(&mut ctx)?,
            Pipeline::Efi => efi(&mut ctx)?,
            Pipeline::Owf => owf(&mut ctx)?,
            Pipeline::Params => {
                let block = crate::params::ParamsBlock::from_claims(
                    rational::to_f64(&ctx.claims.mu),
                    ctx.claims.lambda,
                    ctx.claims.gamma,
                    ctx.resolved.reduction.arity() as u32,
                );
                ctx.results.insert("params".into(), to_value(&parameter_report(&block)?));
            }
        }
        timing.pipelines_ms.insert(p.name().into(), t.elapsed().as_secs_f64() * 1e3);
    }
    timing.total_ms = started.elapsed().as_secs_f64() * 1e3;
    let all_passed = ctx.verdicts.iter().all(|v| v.status != crate::Status::Fail);
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        scenario: scenario.clone(),
        seed: Some(seed),
        pipelines,
        results: ctx.results,
        verdicts: ctx.verdicts,
        counters: ctx.counters,
        all_passed,
        timing,
    })
}

fn stream_seed(ctx: &Ctx, name: &str) -> u64 {
    rng::derive(ctx.seed, rng::label(name))
}

fn lossiness(ctx: &mut Ctx, sampled: bool) -> Result<(), HarnessError> {
    let p = &ctx.scenario.params;
    let mode = if sampled {
        LossinessMode::Sampled { samples: p.lossiness_samples, seed: stream_seed(ctx, "lossiness") }
    } else {
        LossinessMode::Exhaustive { limit: p.lossiness_budget }
    };
    let rep = mild_lossiness_with_mode(&ctx.resolved.reduction, &ctx.resolved.problem, p.gamma, &mode)?;
    ctx.counters.insert("lossiness.evaluated".into(), rep.evaluated);
    ctx.verdicts.push(Verdict::new(
        Pipeline::Lossiness,
        "lambda-within-claim",
        rep.lambda <= p.ell + LOG_TOL,
        format!("{:.9}", rep.lambda),
        format!("ℓ = {}", p.ell),
    ));
    ctx.results.insert("lossiness".into(), to_value(&rep));
    Ok(())
}

fn disguise(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let r = &ctx.resolved;
    let m = r.reduction.arity();
    let p = p_of_f(&r.f)?;
    let params = DisguiseParams {
        m0: m - p,
        m1: p - 1,
        d: r.d,
        eps: r.eps,
        ell: ctx.scenario.params.ell * m as f64,
        seed: stream_seed(ctx, "disguise"),
    };
    let c = build_disguising_collection(&r.reduction, r.problem.no_set(), r.problem.yes_set(), &params)?;
    let persisted = c.to_json();
    ctx.counters.insert("disguise.rows".into(), c.rows as u64);
    ctx.counters.insert("disguise.pairs".into(), c.pairs.len() as u64);
    match &c.achieved {
        Some(a) => ctx.verdicts.push(Verdict::new(
            Pipeline::Disguise,
            "achieved-within-bound",
            c.within_bound,
            format!("{} ≈ {:.6}", q(a), rational::to_f64(a)),
            format!("δ + 2(m+1)/(d+1) + 2ε = {:.6}", c.certified_bound),
        )),
        None => ctx.verdicts.push(Verdict::skipped(Pipeline::Disguise, "achieved-within-bound", "one promise side is empty")),
    }
    ctx.collection = Some(DisguiseCollection::from_json(&persisted)?);
    ctx.results.insert("disguise".into(), json!({ "collection": persisted }));
    Ok(())
}

fn context(ctx: &Ctx) -> Result<SzkContext, HarnessError> {
    let c = ctx.collection.clone().ok_or_else(|| HarnessError::Usage("no disguising collection available".into()))?;
    let r = &ctx.resolved;
    Ok(SzkContext::new(r.reduction.clone(), r.problem.clone(), r.f.clone(), c)?)
}

fn szk(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let sc = context(ctx)?;
    let rep = szk_gap_report(&sc, &ctx.claims, stream_seed(ctx, "szk"))?;
    let beta = ctx.claims.beta();
    let alpha = ctx.claims.alpha();
    match (&rep.bypass, &rep.yes_gap_min) {
        (Some(b), _) => ctx.verdicts.push(Verdict::skipped(Pipeline::Szk, "yes-gap", format!("fixed {b:?} pair"))),
        (None, Some(y)) => ctx.verdicts.push(Verdict::new(Pipeline::Szk, "yes-gap", rep.yes_ok, q(y), format!("1 − 2μ = {}", q(&beta)))),
        (None, None) => ctx.verdicts.push(Verdict::skipped(Pipeline::Szk, "yes-gap", "no YES instances")),
    }
    match (&rep.bypass, &rep.no_gap_max) {
        (Some(b), _) => ctx.verdicts.push(Verdict::skipped(Pipeline::Szk, "no-gap", format!("fixed {b:?} pair"))),
        (None, Some(n)) => ctx.verdicts.push(Verdict::new(
            Pipeline::Szk,
            "no-gap",
            rep.no_ok,
            format!("{} ≈ {:.6}", q(n), rational::to_f64(n)),
            format!("δ + γ = {alpha:.6}"),
        )),
        (None, None) => ctx.verdicts.push(Verdict::skipped(Pipeline::Szk, "no-gap", "no NO instances")),
    }
    ctx.counters.insert("szk.instances".into(), rep.instances.len() as u64);
    let beta_f = rational::to_f64(&beta);
    let mut polar = Vec::new();
    if beta_f * beta_f > alpha && rep.bypass.is_none() {
        for yes in [true, false] {
            if let Some(g) = rep.instances.iter().find(|g| g.yes == yes) {
                let pair = sc.circuits(rep.advice_index, &rep.advice_perm, g.y)?;
                let pr = polarize(&sc.law(&pair.c0)?, &sc.law(&pair.c1)?, alpha, beta_f, ctx.scenario.params.polarize_k)?;
                polar.push(json!({ "y": g.y, "yes": yes, "report": to_value(&pr) }));
            }
        }
    }
    let mut v = to_value(&rep);
    v["polarization"] = Value::Array(polar);
    ctx.results.insert("szk".into(), v);
    Ok(())
}

fn efi(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let sc = context(ctx)?;
    let pair = match efi_pair(&sc, stream_seed(ctx, "efi")) {
        Ok(p) => p,
        Err(e) => {
            ctx.verdicts.push(Verdict::skipped(Pipeline::Efi, "statistical-distance", &e));
            ctx.results.insert("efi".into(), json!({ "error": e.to_string() }));
            return Ok(());
        }
    };
    let floor = ctx.claims.beta();
    ctx.verdicts.push(Verdict::new(
        Pipeline::Efi,
        "statistical-distance",
        pair.distance >= floor,
        q(&pair.distance),
        format!("1 − 2μ = {}", q(&floor)),
    ));
    let advantage = lossylab_core::information::statistical_distance(&pair.mixture0, &pair.mixture1);
    let nu = ctx.scenario.params.nu.unwrap_or_else(|| rational::to_f64(&advantage));
    let tau = nu / 4.0 - 3.0 * ctx.claims.alpha() / 4.0;
    let mut decisions = Vec::new();
    if tau > 0.0 {
        let trials = ctx.scenario.params.efi_trials;
        let mut runs = 0u64;
        for z in ctx.resolved.problem.promise() {
            let d = efi_decide(&sc, &ctx.claims, nu, z, trials, stream_seed(ctx, "efi-decide"))?;
            runs += d.trials * d.k;
            ctx.verdicts.push(Verdict::new(
                Pipeline::Efi,
                &format!("decide-{z}"),
                d.rate >= 2.0 / 3.0,
                format!("{}/{} correct", d.correct, d.trials),
                "rate ≥ 2/3",
            ));
            decisions.push(to_value(&d));
        }
        ctx.counters.insert("efi.b_runs".into(), runs);
    } else {
        ctx.verdicts.push(Verdict::skipped(Pipeline::Efi, "decide", format!("τ = ν/4 − 3(δ+γ)/4 = {tau:.6} ≤ 0")));
    }
    ctx.results.insert(
        "efi".into(),
        json!({
            "advice_index": pair.advice.0,
            "advice_perm": pair.advice.1,
            "y": pair.y,
            "distance": rational::RationalRepr::from(&pair.distance),
            "advantage": rational::RationalRepr::from(&advantage),
            "nu": nu,
            "tau": tau,
            "decisions": decisions,
        }),
    );
    Ok(())
}

fn owf(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let sc = context(ctx)?;
    let mu = rational::to_f64(&ctx.claims.mu);
    let theta = (1.0 - 10.0 * mu) - ctx.claims.alpha();
    if theta <= 0.0 {
        ctx.verdicts.push(Verdict::skipped(Pipeline::Owf, "dichotomy", format!("θ_owf = {theta:.6} ≤ 0")));
        return Ok(());
    }
    let strategy = ctx.scenario.params.inverter;
    let mut reports = Vec::new();
    let mut queries = 0u64;
    let mut correct_runs = 0u32;
    let mut violations = 0usize;
    let runs = ctx.scenario.params.owf_runs;
    for run in 0..runs {
        let rep = owf_dichotomy(&sc, &ctx.claims, strategy, rng::derive(stream_seed(ctx, "owf"), run as u64))?;
        queries += rep.instances.iter().map(|i| i.queries).sum::<u64>();
        correct_runs += rep.all_correct as u32;
        violations += rep.premise_violations.len();
        reports.push(rep);
    }
    ctx.counters.insert("owf.queries".into(), queries);
    match strategy {
        InverterStrategy::AlwaysFail => ctx.verdicts.push(Verdict::new(
            Pipeline::Owf,
            "owf-arm",
            reports.iter().all(|r| r.owf_arm),
            format!("{}/{runs} runs", reports.iter().filter(|r| r.owf_arm).count()),
            "inversion success ≤ 1 − θ_owf/2",
        )),
        _ => ctx.verdicts.push(Verdict::new(
            Pipeline::Owf,
            "all-decided",
            correct_runs == runs,
            format!("{correct_runs}/{runs} runs"),
            "every run correct",
        )),
    }
    ctx.verdicts.push(Verdict::new(
        Pipeline::Owf,
        "premises",
        violations == 0,
        format!("{violations} violations"),
        "exact X within the derived bounds",
    ));
    ctx.results.insert("owf".into(), json!({ "theta_owf": theta, "runs": to_value(&reports) }));
    Ok(())
}
