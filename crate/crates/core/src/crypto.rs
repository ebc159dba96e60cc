//! One-way function candidates and EFI pairs built from the circuit pair, with
//! brute-force adversaries and the decision procedures that turn an adversary
//! into a solver.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::bigint::BigInt;
use num::traits::{One, Zero};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::input;
use crate::information::{statistical_distance, FiniteDistribution};
use crate::problems::Instance;
use crate::rational::{self, Rational};
use crate::rng::{self, Rng};
use crate::szk::{all_advice, draw_advice, Circuit, SzkClaims, SzkContext};
use crate::{Error, Result};

/// Constant `c` of the repetition count `⌈c/θ²⌉` used by the OWF solver.
pub const REPETITION_CONSTANT: f64 = 64.0;

/// Largest randomness space a brute-force inverter scans.
pub const INVERSION_LIMIT: u128 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OwfVariant {
    /// F(r) = Ĉ₀(r).
    SingleBranch,
    /// F(b, r) = Ĉ₀(r) or Ĉ₁[y*](r) with y* drawn from K_a.
    TwoBranch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OwfCandidate {
    pub variant: OwfVariant,
    pub advice: (usize, Vec<usize>),
    pub c0: Circuit,
    pub c1: Option<Circuit>,
    pub y_star: Option<Instance>,
}

impl OwfCandidate {
    pub fn single(ctx: &SzkContext, advice: (usize, Vec<usize>)) -> Result<Self> {
        let y = *ctx.problem().promise().first().ok_or_else(|| input("empty promise"))?;
        let pair = ctx.circuits(advice.0, &advice.1, y)?;
        Ok(OwfCandidate { variant: OwfVariant::SingleBranch, advice, c0: pair.c0, c1: None, y_star: None })
    }

    pub fn two_branch(ctx: &SzkContext, advice: (usize, Vec<usize>), seed: u64) -> Result<Self> {
        let k = &ctx
            .collection()
            .pairs
            .get(advice.0)
            .ok_or_else(|| input("two-branch candidate needs a non-degenerate collection"))?
            .k;
        let mut g = rng::stream(seed, rng::label("y-star"));
        let y_star = k[g.random_range(0..k.len())];
        let pair = ctx.circuits(advice.0, &advice.1, y_star)?;
        Ok(OwfCandidate {
            variant: OwfVariant::TwoBranch,
            advice,
            c0: pair.c0,
            c1: Some(pair.c1),
            y_star: Some(y_star),
        })
    }

    /// Size of the randomness space.
    pub fn randomness(&self) -> u128 {
        self.c0.randomness()
    }

    pub fn kappa(&self) -> f64 {
        self.c0.kappa()
    }
}

/// Evaluate F at `(b, r)`; the single-branch variant ignores `b`.
pub fn owf_eval(ctx: &SzkContext, f: &OwfCandidate, b: bool, r: u128) -> Result<usize> {
    if r >= f.randomness() {
        return Err(input(format!("randomness {r} outside [0, {})", f.randomness())));
    }
    match (&f.c1, b) {
        (Some(c1), true) => ctx.eval(c1, r),
        _ => ctx.eval(&f.c0, r),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "strategy")]
pub enum InverterStrategy {
    BruteForce,
    AlwaysFail,
    /// Brute force with probability `success`, otherwise no answer.
    Planted { success: f64 },
}

/// Adversary against F = Ĉ₀.
#[derive(Clone, Debug)]
pub struct InverterOracle {
    pub strategy: InverterStrategy,
    preimages: Option<Arc<BTreeMap<usize, u128>>>,
}

impl InverterOracle {
    pub fn new(ctx: &SzkContext, target: &Circuit, strategy: InverterStrategy) -> Result<Self> {
        if let InverterStrategy::Planted { success } = strategy {
            if !(0.0..=1.0).contains(&success) {
                return Err(Error::Parameter(format!("planted success {success} outside [0, 1]")));
            }
        }
        let preimages = match strategy {
            InverterStrategy::AlwaysFail => None,
            _ => {
                let n = target.randomness();
                if n > INVERSION_LIMIT {
                    return Err(crate::error::infeasible("brute-force inversion", n, INVERSION_LIMIT));
                }
                let mut table = BTreeMap::new();
                for r in 0..n {
                    table.entry(ctx.eval(target, r)?).or_insert(r);
                }
                Some(Arc::new(table))
            }
        };
        Ok(InverterOracle { strategy, preimages })
    }

    pub fn invert(&self, z: usize, g: &mut Rng) -> Option<u128> {
        let found = self.preimages.as_ref().and_then(|t| t.get(&z).copied());
        match self.strategy {
            InverterStrategy::AlwaysFail => None,
            InverterStrategy::BruteForce => found,
            InverterStrategy::Planted { success } => (g.random::<f64>() < success).then_some(found).flatten(),
        }
    }

    fn success_rational(&self) -> Rational {
        match self.strategy {
            InverterStrategy::AlwaysFail => Rational::zero(),
            InverterStrategy::BruteForce => Rational::one(),
            InverterStrategy::Planted { success } => rational::from_f64(success),
        }
    }
}

/// X for the given adversary, from exact laws: the adversary inverts every
/// image of Ĉ₀, so B accepts on b = 1 exactly when Ĉ₁ lands in supp Ĉ₀.
pub fn exact_x(law0: &FiniteDistribution<usize>, law1: &FiniteDistribution<usize>, inverter: &InverterOracle) -> Rational {
    let q = inverter.success_rational();
    let hit = law1.probability(|o| law0.mass(o) > Rational::zero());
    q.clone() - q * hit
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyInstance {
    pub y: Instance,
    pub yes: bool,
    /// Exact X at the run's advice.
    #[serde(with = "rational::serde_q")]
    pub exact_x: Rational,
    /// Exact X averaged over every advice value.
    #[serde(with = "rational::serde_q")]
    pub mean_x: Rational,
    pub estimate: f64,
    pub decided_yes: bool,
    pub correct: bool,
    pub queries: u64,
    pub accepted: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub inverter: InverterStrategy,
    pub mu: f64,
    pub delta: f64,
    pub gamma: f64,
    pub theta_owf: f64,
    pub k: u64,
    /// δ + γ + θ_owf/4.
    pub threshold: f64,
    pub advice_index: usize,
    pub advice_perm: Vec<usize>,
    pub seed: u64,
    pub instances: Vec<DichotomyInstance>,
    pub all_correct: bool,
    /// Exact probability that the adversary inverts F on a uniform input.
    #[serde(with = "rational::serde_q")]
    pub inversion_success: Rational,
    /// inversion_success ≤ 1 − θ_owf/2: F is a (1 − θ_owf/2)-OWF for this adversary.
    pub owf_arm: bool,
    /// Instances whose exact X breaks the bound the proof derives from the
    /// claimed parameters.
    pub premise_violations: Vec<String>,
}

/// Run the solver `C^A` on every promise instance with one seeded advice draw.
pub fn owf_dichotomy(ctx: &SzkContext, claims: &SzkClaims, strategy: InverterStrategy, seed: u64) -> Result<DichotomyReport> {
    let mu = rational::to_f64(&claims.mu);
    let delta = claims.alpha() - claims.gamma;
    let theta = (1.0 - 10.0 * mu) - claims.alpha();
    if theta <= 0.0 {
        return Err(Error::Parameter(format!("θ_owf = {theta} must be positive")));
    }
    let k = (REPETITION_CONSTANT / (theta * theta)).ceil() as u64;
    let threshold = claims.alpha() + theta / 4.0;
    let advice = draw_advice(ctx, seed);
    let f = OwfCandidate::single(ctx, advice.clone())?;
    let inverter = InverterOracle::new(ctx, &f.c0, strategy)?;
    let law0 = ctx.law(&f.c0)?;
    let every = all_advice(ctx);
    let n = f.randomness();
    let promise = ctx.problem().promise();
    let instances = promise
        .par_iter()
        .map(|&y| -> Result<DichotomyInstance> {
            let yes = ctx.problem().chi_bit(&y)?;
            let pair = ctx.circuits(advice.0, &advice.1, y)?;
            let exact = exact_x(&law0, &ctx.law(&pair.c1)?, &inverter);
            let mut total = Rational::zero();
            for (a, p) in &every {
                let pr = ctx.circuits(*a, p, y)?;
                total += exact_x(&ctx.law(&pr.c0)?, &ctx.law(&pr.c1)?, &inverter);
            }
            let mean_x = total / BigInt::from(every.len());
            let mut g = rng::stream(rng::derive(seed, rng::label("owf-b")), y.value() as u64);
            let mut runs = [0u64; 2];
            let mut ones = [0u64; 2];
            for _ in 0..k {
                let b = g.random::<bool>();
                let r = g.random_range(0..n);
                let c = if b { &pair.c1 } else { &pair.c0 };
                let z = ctx.eval(c, r)?;
                let ok = match inverter.invert(z, &mut g) {
                    Some(r2) => ctx.eval(&pair.c0, r2)? == z,
                    None => false,
                };
                runs[b as usize] += 1;
                ones[b as usize] += ok as u64;
            }
            let rate = |i: usize| if runs[i] == 0 { 0.0 } else { ones[i] as f64 / runs[i] as f64 };
            let estimate = (rate(0) - rate(1)).abs();
            let decided_yes = estimate > threshold;
            Ok(DichotomyInstance {
                y,
                yes,
                exact_x: exact,
                mean_x,
                estimate,
                decided_yes,
                correct: decided_yes == yes,
                queries: k,
                accepted: ones[0] + ones[1],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let inversion_success = exact_x(&law0, &FiniteDistribution::point(usize::MAX), &inverter);
    let yes_floor = 1.0 - theta / 2.0 - 10.0 * mu;
    let premise_violations = instances
        .iter()
        .filter_map(|i| {
            let x = rational::to_f64(&i.mean_x);
            if i.yes && x < yes_floor && !matches!(strategy, InverterStrategy::AlwaysFail) {
                Some(format!("YES {}: mean X = {x} < 1 − θ/2 − 10μ = {yes_floor}", i.y))
            } else if !i.yes && x > claims.alpha() {
                Some(format!("NO {}: mean X = {x} > δ + γ = {}", i.y, claims.alpha()))
            } else {
                None
            }
        })
        .collect();
    Ok(DichotomyReport {
        inverter: strategy,
        mu,
        delta,
        gamma: claims.gamma,
        theta_owf: theta,
        k,
        threshold,
        advice_index: advice.0,
        advice_perm: advice.1,
        seed,
        all_correct: instances.iter().all(|i| i.correct),
        owf_arm: rational::to_f64(&inversion_success) <= 1.0 - theta / 2.0,
        inversion_success,
        instances,
        premise_violations,
    })
}

/// Ĉ₀ restricted to A = {o : Ĉ₀(o) ≥ Ĉ₁(o)} and Ĉ₁ restricted to the complement.
#[derive(Clone, Debug, PartialEq)]
pub struct Restriction {
    pub a: Vec<usize>,
    pub law0: FiniteDistribution<usize>,
    pub law1: FiniteDistribution<usize>,
    pub retained0: Rational,
    pub retained1: Rational,
    pub shift0: Rational,
    pub shift1: Rational,
    pub distance: Rational,
    /// Both retained masses ≥ 1 − 2μ, one of them ≥ 1 − μ, both shifts ≤ 2μ.
    pub contract_holds: bool,
}

pub fn restricted_supports(
    law0: &FiniteDistribution<usize>,
    law1: &FiniteDistribution<usize>,
    mu: &Rational,
) -> Result<Restriction> {
    let distance = statistical_distance(law0, law1);
    let two_mu = mu * BigInt::from(2);
    let floor = Rational::one() - &two_mu;
    if distance < floor {
        return Err(Error::Domain(format!("premise violated: Δ(Ĉ₀, Ĉ₁) = {distance} < 1 − 2μ = {floor}")));
    }
    let in_a = |o: &usize| law0.mass(o) >= law1.mass(o);
    let a: Vec<usize> = law0.alphabet().chain(law1.alphabet()).copied().filter(in_a).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let retained0 = law0.probability(in_a);
    let retained1 = law1.probability(|o| !in_a(o));
    let r0 = law0.conditional(in_a)?;
    let r1 = law1.conditional(|o| !in_a(o))?;
    let shift0 = statistical_distance(law0, &r0);
    let shift1 = statistical_distance(law1, &r1);
    let one_minus_mu = Rational::one() - mu;
    let contract_holds = retained0 >= floor
        && retained1 >= floor
        && (retained0 >= one_minus_mu || retained1 >= one_minus_mu)
        && shift0 <= two_mu
        && shift1 <= two_mu;
    Ok(Restriction { a, law0: r0, law1: r1, retained0, retained1, shift0, shift1, distance, contract_holds })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EfiPair {
    pub advice: (usize, Vec<usize>),
    pub y: Instance,
    pub law0: FiniteDistribution<usize>,
    pub law1: FiniteDistribution<usize>,
    pub distance: Rational,
    /// Output laws of the EFI generator, which draws y ∼ U_{T_a} itself.
    pub mixture0: FiniteDistribution<usize>,
    pub mixture1: FiniteDistribution<usize>,
}

fn yes_pool(ctx: &SzkContext, a: usize) -> Result<Vec<Instance>> {
    if ctx.collection().b_y {
        return Err(Error::Domain("no YES instances: the EFI generator has nothing to sample".into()));
    }
    Ok(match ctx.collection().pairs.get(a) {
        Some(p) => p.t.clone(),
        None => ctx.problem().yes_set().to_vec(),
    })
}

fn mixture(laws: &[FiniteDistribution<usize>]) -> Result<FiniteDistribution<usize>> {
    let w = Rational::new(BigInt::one(), BigInt::from(laws.len()));
    FiniteDistribution::accumulate(laws.iter().flat_map(|l| l.iter().map(|(o, p)| (*o, p * &w)).collect::<Vec<_>>()))
}

pub fn efi_pair(ctx: &SzkContext, seed: u64) -> Result<EfiPair> {
    let advice = draw_advice(ctx, seed);
    let pool = yes_pool(ctx, advice.0)?;
    let mut g = rng::stream(seed, rng::label("efi-y"));
    let y = pool[g.random_range(0..pool.len())];
    let pair = ctx.circuits(advice.0, &advice.1, y)?;
    let law0 = ctx.law(&pair.c0)?;
    let law1 = ctx.law(&pair.c1)?;
    let mut ones = Vec::with_capacity(pool.len());
    for &t in &pool {
        ones.push(ctx.law(&ctx.circuits(advice.0, &advice.1, t)?.c1)?);
    }
    Ok(EfiPair {
        distance: statistical_distance(&law0, &law1),
        mixture0: law0.clone(),
        mixture1: mixture(&ones)?,
        advice,
        y,
        law0,
        law1,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfiDecision {
    pub z: Instance,
    pub yes: bool,
    pub nu: f64,
    /// τ = ν/4 − 3(δ+γ)/4.
    pub tau: f64,
    pub k: u64,
    /// Advantage of the optimal distinguisher on the EFI pair.
    #[serde(with = "rational::serde_q")]
    pub advantage: Rational,
    /// Exact probability that one run of B outputs 1.
    #[serde(with = "rational::serde_q")]
    pub b_accept: Rational,
    pub trials: u64,
    /// Trials whose decision matched χ(z).
    pub correct: u64,
    pub rate: f64,
    /// Decision of the first trial.
    pub decided_yes: bool,
}

/// Run `C` on instance `z` for `trials` independent seeded trials of `k` runs of B each.
pub fn efi_decide(ctx: &SzkContext, claims: &SzkClaims, nu: f64, z: Instance, trials: u64, seed: u64) -> Result<EfiDecision> {
    let tau = nu / 4.0 - 3.0 * claims.alpha() / 4.0;
    if tau <= 0.0 {
        return Err(Error::Parameter(format!("τ = {tau} must be positive")));
    }
    efi_decide_with_k(ctx, claims, nu, z, trials, (1.0 / (tau * tau)).ceil() as u64, seed)
}

/// As [`efi_decide`] with an explicit repetition count.
pub fn efi_decide_with_k(
    ctx: &SzkContext,
    claims: &SzkClaims,
    nu: f64,
    z: Instance,
    trials: u64,
    k: u64,
    seed: u64,
) -> Result<EfiDecision> {
    let tau = nu / 4.0 - 3.0 * claims.alpha() / 4.0;
    if tau <= 0.0 || k == 0 || trials == 0 {
        return Err(Error::Parameter(format!("τ = {tau}, k = {k} and trials = {trials} must be positive")));
    }
    let yes = ctx.problem().chi_bit(&z)?;
    let efi = efi_pair(ctx, seed)?;
    let guess = |o: &usize| efi.mixture1.mass(o) > efi.mixture0.mass(o);
    let advantage = statistical_distance(&efi.mixture0, &efi.mixture1);
    let pair = ctx.circuits(efi.advice.0, &efi.advice.1, z)?;
    let c0 = ctx.law(&pair.c0)?;
    let c1 = ctx.law(&pair.c1)?;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let b_accept = (c0.probability(|o| !guess(o)) + c1.probability(guess)) * &half;
    let s0 = c0.sampler();
    let s1 = c1.sampler();
    let base = rng::derive(seed, rng::label("efi-trials"));
    let decisions: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut g = rng::stream(base, t);
            let mut ones = 0u64;
            for _ in 0..k {
                let b = g.random::<bool>();
                let x = if b { s1.sample(&mut g) } else { s0.sample(&mut g) };
                ones += (guess(&x) == b) as u64;
            }
            (ones as f64 / k as f64 - 0.5).abs() >= tau
        })
        .collect();
    let correct = decisions.iter().filter(|&&d| d == yes).count() as u64;
    Ok(EfiDecision {
        z,
        yes,
        nu,
        tau,
        k,
        advantage,
        b_accept,
        trials,
        correct,
        rate: correct as f64 / trials as f64,
        decided_yes: decisions[0],
    })
}
