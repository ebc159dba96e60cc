//! The circuit pair of the reduction to statistical difference: a baseline
//! circuit drawing every slot from the advice multisets, and a pinned circuit
//! with one slot replaced by the input instance.

mod polarize;

use num::bigint::BigInt;
use num::traits::{One, Zero};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use polarize::{
    apply_exact, polarization_schedule, polarize, product_pair, xor_pair, Interval, PolarizeReport, Step,
    EXACT_ALPHABET_LIMIT, MAX_XOR_ROUNDS,
};

use crate::disguise::{delta_of, DisguiseCollection};
use crate::error::input;
use crate::information::{statistical_distance, FiniteDistribution};
use crate::problems::{Chi, Instance, PromiseProblem};
use crate::rational::{self, Rational};
use crate::reductions::{output_law, p_of_f, permutations, KernelTable, PermInvariantF, Slot, StochasticReduction};
use crate::rng;
use crate::{Error, Result};

/// Everything the circuits of one (reduction, problem, f, collection) share.
#[derive(Clone, Debug)]
pub struct SzkContext {
    reduction: StochasticReduction,
    problem: PromiseProblem,
    f: PermInvariantF,
    collection: DisguiseCollection,
    p: usize,
    table: Option<KernelTable>,
}

impl SzkContext {
    pub fn new(
        reduction: StochasticReduction,
        problem: PromiseProblem,
        f: PermInvariantF,
        collection: DisguiseCollection,
    ) -> Result<Self> {
        let m = reduction.arity();
        if f.arity() != m {
            return Err(input(format!("f has arity {} but the reduction takes {m} inputs", f.arity())));
        }
        let p = p_of_f(&f)?;
        let degenerate = collection.degenerate();
        if !degenerate {
            if collection.m != m || collection.m0 != m - p || collection.m1 != p - 1 {
                return Err(input(format!(
                    "collection built for (m₀, m₁) = ({}, {}) but p(f) = {p} needs ({}, {})",
                    collection.m0,
                    collection.m1,
                    m - p,
                    p - 1
                )));
            }
            if collection.pairs.is_empty() {
                return Err(input("collection has no advice pairs"));
            }
        }
        let table = if degenerate { None } else { Some(KernelTable::build(&reduction, &problem.promise())?) };
        Ok(SzkContext { reduction, problem, f, collection, p, table })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn m(&self) -> usize {
        self.reduction.arity()
    }

    pub fn collection(&self) -> &DisguiseCollection {
        &self.collection
    }

    pub fn problem(&self) -> &PromiseProblem {
        &self.problem
    }

    pub fn reduction(&self) -> &StochasticReduction {
        &self.reduction
    }

    pub fn f(&self) -> &PermInvariantF {
        &self.f
    }

    pub fn omega(&self) -> &[String] {
        self.reduction.omega()
    }

    pub fn bypass(&self) -> bool {
        self.collection.degenerate()
    }

    /// Circuit pair for advice index `a`, permutation `perm` (output position
    /// `i` receives sampled slot `perm[i]`) and input `y`.
    pub fn circuits(&self, a: usize, perm: &[usize], y: Instance) -> Result<CircuitPair> {
        if self.problem.chi(&y)? == Chi::Star {
            return Err(input(format!("instance {y} is outside the promise")));
        }
        if self.collection.b_n {
            return Ok(CircuitPair::fixed(FixedPair::Near));
        }
        if self.collection.b_y {
            return Ok(CircuitPair::fixed(FixedPair::Far));
        }
        let pair = self.collection.pairs.get(a).ok_or_else(|| input(format!("advice index {a} out of range")))?;
        let m = self.m();
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..m).collect::<Vec<_>>() {
            return Err(input("π must be a permutation of 0..m"));
        }
        let table = self.table.as_ref().expect("non-degenerate context has a table");
        let k = table.indices_of(&pair.k)?;
        let t = table.indices_of(&pair.t)?;
        let yi = table.index_of(&y).expect("promise point");
        let d = self.collection.d;
        let n_rand = (d as u128)
            .checked_pow(m as u32)
            .and_then(|v| v.checked_mul(table.den() as u128))
            .filter(|&v| v < 1u128 << 120)
            .ok_or_else(|| Error::Overflow("circuit randomness space".into()))?;
        let base = |pinned: Option<usize>| Sampling {
            k: k.clone(),
            t: t.clone(),
            m0: m - self.p,
            m1: self.p - 1,
            perm: perm.to_vec(),
            pinned,
            randomness: n_rand,
        };
        Ok(CircuitPair {
            c0: Circuit { kind: CircuitKind::Sampling(base(None)), omega_len: table.omega_len() },
            c1: Circuit { kind: CircuitKind::Sampling(base(Some(yi))), omega_len: table.omega_len() },
        })
    }

    /// Exact output law of a circuit.
    pub fn law(&self, c: &Circuit) -> Result<FiniteDistribution<usize>> {
        match &c.kind {
            CircuitKind::Fixed(_, law) => Ok(law.clone()),
            CircuitKind::Sampling(s) => {
                let table = self.table.as_ref().expect("sampling circuits need a table");
                Ok(output_law(table, &s.slots(), &s.perm)?.to_distribution())
            }
        }
    }

    /// Deterministic output of a circuit on randomness `r ∈ [0, N)`.
    pub fn eval(&self, c: &Circuit, r: u128) -> Result<usize> {
        if r >= c.randomness() {
            return Err(input(format!("randomness {r} outside [0, {})", c.randomness())));
        }
        match &c.kind {
            CircuitKind::Fixed((pair, _), _) => Ok(pair.eval(c.role(), r)),
            CircuitKind::Sampling(s) => {
                let table = self.table.as_ref().expect("sampling circuits need a table");
                let den = table.den() as u128;
                let mut u = r % den;
                let mut rest = r / den;
                let m = s.perm.len();
                let d = s.k.len() as u128;
                let mut digits = vec![0usize; m];
                for slot in (0..m).rev() {
                    digits[slot] = (rest % d) as usize;
                    rest /= d;
                }
                let drawn: Vec<usize> = (0..m)
                    .map(|slot| match s.role(slot) {
                        SlotRole::K => s.k[digits[slot]],
                        SlotRole::T => s.t[digits[slot]],
                        SlotRole::Pinned(y) => y,
                    })
                    .collect();
                let tuple: Vec<usize> = s.perm.iter().map(|&j| drawn[j]).collect();
                let row = table.row(table.tuple_index(&tuple));
                for (w, &mass) in row.iter().enumerate() {
                    if u < mass as u128 {
                        return Ok(w);
                    }
                    u -= mass as u128;
                }
                unreachable!("scaled row sums to the denominator")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SlotRole {
    K,
    Pinned(usize),
    T,
}

/// Sampling circuit: slots `0..m₀+1` draw from K (the last one replaced by the
/// pinned point when present), then `m₁` slots draw from T.
#[derive(Clone, Debug, PartialEq)]
pub struct Sampling {
    k: Vec<usize>,
    t: Vec<usize>,
    m0: usize,
    m1: usize,
    perm: Vec<usize>,
    pinned: Option<usize>,
    randomness: u128,
}

impl Sampling {
    fn role(&self, slot: usize) -> SlotRole {
        if slot < self.m0 {
            SlotRole::K
        } else if slot == self.m0 {
            self.pinned.map_or(SlotRole::K, SlotRole::Pinned)
        } else {
            SlotRole::T
        }
    }

    fn slots(&self) -> Vec<Slot> {
        (0..self.m0 + self.m1 + 1)
            .map(|j| match self.role(j) {
                SlotRole::K => Slot::multiset(&self.k),
                SlotRole::T => Slot::multiset(&self.t),
                SlotRole::Pinned(y) => Slot::point(y),
            })
            .collect()
    }
}

/// Canonical pairs returned when one side of the promise is empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedPair {
    /// Uniform bit against (¾, ¼): Δ = ¼.
    Near,
    /// Point masses on different outcomes: Δ = 1.
    Far,
}

impl FixedPair {
    fn law(self, role: usize) -> FiniteDistribution<usize> {
        match (self, role) {
            (FixedPair::Near, 0) => FiniteDistribution::from_multiset(&[0usize, 1]).expect("valid"),
            (FixedPair::Near, _) => FiniteDistribution::from_multiset(&[0usize, 0, 0, 1]).expect("valid"),
            (FixedPair::Far, r) => FiniteDistribution::point(r),
        }
    }

    fn eval(self, role: usize, r: u128) -> usize {
        match (self, role) {
            (FixedPair::Near, 0) => (r % 2) as usize,
            (FixedPair::Near, _) => usize::from(r == 3),
            (FixedPair::Far, role) => role,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CircuitKind {
    Sampling(Sampling),
    /// Fixed pair member with its exact law; the role is `0` or `1`.
    Fixed((FixedPair, usize), FiniteDistribution<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub kind: CircuitKind,
    pub omega_len: usize,
}

impl Circuit {
    /// Size `N` of the randomness space.
    pub fn randomness(&self) -> u128 {
        match &self.kind {
            CircuitKind::Sampling(s) => s.randomness,
            CircuitKind::Fixed(..) => 4,
        }
    }

    /// κ = log₂ N.
    pub fn kappa(&self) -> f64 {
        (self.randomness() as f64).log2()
    }

    pub fn pinned(&self) -> bool {
        matches!(&self.kind, CircuitKind::Sampling(s) if s.pinned.is_some())
    }

    fn role(&self) -> usize {
        match &self.kind {
            CircuitKind::Fixed((_, role), _) => *role,
            CircuitKind::Sampling(s) => usize::from(s.pinned.is_some()),
        }
    }
}

impl FixedPair {
    fn circuit(self, role: usize) -> Circuit {
        Circuit { kind: CircuitKind::Fixed((self, role), self.law(role)), omega_len: 2 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitPair {
    pub c0: Circuit,
    pub c1: Circuit,
}

impl CircuitPair {
    fn fixed(pair: FixedPair) -> Self {
        CircuitPair { c0: pair.circuit(0), c1: pair.circuit(1) }
    }

    pub fn bypass(&self) -> Option<FixedPair> {
        match &self.c0.kind {
            CircuitKind::Fixed((p, _), _) => Some(*p),
            CircuitKind::Sampling(_) => None,
        }
    }
}

/// A statistical-difference instance with its exact laws.
#[derive(Clone, Debug, PartialEq)]
pub struct SdInstance {
    pub law0: FiniteDistribution<usize>,
    pub law1: FiniteDistribution<usize>,
    pub distance: Rational,
    pub alpha: f64,
    pub beta: f64,
}

impl SdInstance {
    pub fn new(ctx: &SzkContext, pair: &CircuitPair, alpha: f64, beta: f64) -> Result<Self> {
        let law0 = ctx.law(&pair.c0)?;
        let law1 = ctx.law(&pair.c1)?;
        let distance = statistical_distance(&law0, &law1);
        Ok(SdInstance { law0, law1, distance, alpha, beta })
    }
}

/// Claimed parameters of the mildly-lossy reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct SzkClaims {
    pub mu: Rational,
    pub lambda: f64,
    pub gamma: f64,
}

impl SzkClaims {
    /// α = δ(λ) + γ.
    pub fn alpha(&self) -> f64 {
        delta_of(self.lambda, 1) + self.gamma
    }

    /// β = 1 − 2μ.
    pub fn beta(&self) -> Rational {
        Rational::one() - &self.mu * BigInt::from(2)
    }

    /// θ_szk = β²/α; `None` when α = 0.
    pub fn theta(&self) -> Option<f64> {
        let a = self.alpha();
        (a > 0.0).then(|| rational::to_f64(&self.beta()).powi(2) / a)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceGap {
    pub y: Instance,
    pub yes: bool,
    /// E_{a,π} Δ(Ĉ₀, Ĉ₁[y]).
    #[serde(with = "rational::serde_q")]
    pub expected: Rational,
    /// Δ(Ĉ₀, Ĉ₁[y]) for the one fixed advice draw.
    #[serde(with = "rational::serde_q")]
    pub fixed: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub instances: Vec<InstanceGap>,
    #[serde(with = "rational::serde_q_opt")]
    pub yes_gap_min: Option<Rational>,
    #[serde(with = "rational::serde_q_opt")]
    pub no_gap_max: Option<Rational>,
    #[serde(with = "rational::serde_q_opt")]
    pub fixed_yes_gap_min: Option<Rational>,
    #[serde(with = "rational::serde_q_opt")]
    pub fixed_no_gap_max: Option<Rational>,
    pub advice_index: usize,
    pub advice_perm: Vec<usize>,
    pub alpha: f64,
    #[serde(with = "rational::serde_q")]
    pub beta: Rational,
    pub theta_szk: Option<f64>,
    /// yes_gap_min ≥ 1 − 2μ.
    pub yes_ok: bool,
    /// no_gap_max ≤ δ(λ) + γ.
    pub no_ok: bool,
    /// One side of the promise is empty and a fixed pair was returned; the
    /// verdicts are then vacuous.
    pub bypass: Option<FixedPair>,
}

/// Seeded draw of the advice `(a, π)`: a uniform pair index and a uniform permutation.
pub fn draw_advice(ctx: &SzkContext, seed: u64) -> (usize, Vec<usize>) {
    let mut g = rng::stream(seed, rng::label("advice"));
    let a = g.random_range(0..ctx.collection.pairs.len().max(1));
    let perms = permutations(ctx.m());
    let perm = perms[g.random_range(0..perms.len())].clone();
    (a, perm)
}

/// Every `(a, π)` the advice can take.
pub fn all_advice(ctx: &SzkContext) -> Vec<(usize, Vec<usize>)> {
    let perms = permutations(ctx.m());
    (0..ctx.collection.pairs.len().max(1)).flat_map(|a| perms.iter().map(move |p| (a, p.clone()))).collect()
}

/// Exact gaps over every promise instance, both averaged over all `(a, π)` and
/// for one seeded advice draw.
pub fn szk_gap_report(ctx: &SzkContext, claims: &SzkClaims, advice_seed: u64) -> Result<GapReport> {
    let m = ctx.m();
    let perms = permutations(m);
    let (advice_index, advice_perm) = draw_advice(ctx, advice_seed);
    let promise = ctx.problem.promise();
    let instances = promise
        .par_iter()
        .map(|&y| -> Result<InstanceGap> {
            let yes = ctx.problem.chi_bit(&y)?;
            let fixed_pair = ctx.circuits(advice_index, &advice_perm, y)?;
            let fixed = SdInstance::new(ctx, &fixed_pair, 0.0, 0.0)?.distance;
            let expected = if ctx.bypass() {
                fixed.clone()
            } else {
                let mut total = Rational::zero();
                for a in 0..ctx.collection.pairs.len() {
                    for perm in &perms {
                        total += SdInstance::new(ctx, &ctx.circuits(a, perm, y)?, 0.0, 0.0)?.distance;
                    }
                }
                total / BigInt::from(ctx.collection.pairs.len() * perms.len())
            };
            Ok(InstanceGap { y, yes, expected, fixed })
        })
        .collect::<Result<Vec<_>>>()?;
    let pick = |yes: bool, fixed: bool| instances.iter().filter(move |g| g.yes == yes).map(move |g| if fixed { g.fixed.clone() } else { g.expected.clone() });
    let yes_gap_min = pick(true, false).min();
    let no_gap_max = pick(false, false).max();
    let alpha = claims.alpha();
    let beta = claims.beta();
    let bypass = if ctx.bypass() { ctx.circuits(0, &(0..m).collect::<Vec<_>>(), promise[0])?.bypass() } else { None };
    let vacuous = bypass.is_some();
    Ok(GapReport {
        yes_ok: vacuous || yes_gap_min.as_ref().is_none_or(|v| *v >= beta),
        no_ok: vacuous || no_gap_max.as_ref().is_none_or(|v| *v <= rational::from_f64(alpha)),
        fixed_yes_gap_min: pick(true, true).min(),
        fixed_no_gap_max: pick(false, true).max(),
        yes_gap_min,
        no_gap_max,
        instances,
        advice_index,
        advice_perm,
        alpha,
        beta,
        theta_szk: claims.theta(),
        bypass,
    })
}
