//! Empirical mild lossiness: the largest per-coordinate mutual information
//! between independent s-uniform split inputs and the reduction's output.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::integer::Integer;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{multisets, KernelTable};
use super::StochasticReduction;
use crate::error::input;
use crate::information::{mutual_information, FiniteDistribution, JointDistribution};
use crate::problems::{Instance, PromiseProblem};
use crate::rational::Rational;
use crate::rng;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Yes,
    No,
}

/// One coordinate's input law: uniform over a multiset drawn from one side.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SplitChoice {
    pub side: Side,
    /// `(instance, multiplicity)`, sorted, multiplicities positive.
    pub counts: Vec<(Instance, u32)>,
}

impl SplitChoice {
    pub fn size(&self) -> u32 {
        self.counts.iter().map(|(_, c)| c).sum()
    }

    pub fn distribution(&self) -> Result<FiniteDistribution<Instance>> {
        let total = BigInt::from(self.size());
        FiniteDistribution::new(self.counts.iter().map(|(x, c)| (*x, Rational::new(BigInt::from(*c), total.clone()))))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LossinessMode {
    /// Enumerate every combination; fails when there are more than `limit`.
    Exhaustive { limit: u64 },
    /// Draw `samples` random combinations.
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossinessReport {
    /// Largest observed I(X; R(X))/m, in bits.
    pub lambda: f64,
    pub exhaustive: bool,
    /// ⌈2⁹mn/γ³⌉, saturating.
    pub s_formula: u128,
    /// Largest multiset size actually used.
    pub s_used: usize,
    pub evaluated: u64,
    pub witness: Option<Vec<SplitChoice>>,
    /// log₂|Ω| / m.
    pub entropy_cap: f64,
}

/// Exhaustive when the number of combinations is at most `budget`, otherwise
/// `budget` seeded samples (a seed is then required).
pub fn mild_lossiness_estimate(
    r: &StochasticReduction,
    problem: &PromiseProblem,
    gamma: f64,
    budget: u64,
    seed: Option<u64>,
) -> Result<LossinessReport> {
    let space = Space::new(r, problem, gamma)?;
    if space.combinations() <= budget as u128 {
        return space.run_exhaustive();
    }
    let seed = seed.ok_or_else(|| input("sampled lossiness estimate needs a seed"))?;
    space.run_sampled(budget, seed)
}

pub fn mild_lossiness_with_mode(
    r: &StochasticReduction,
    problem: &PromiseProblem,
    gamma: f64,
    mode: &LossinessMode,
) -> Result<LossinessReport> {
    let space = Space::new(r, problem, gamma)?;
    match *mode {
        LossinessMode::Exhaustive { limit } => {
            let count = space.combinations();
            if count > limit as u128 {
                return Err(crate::error::infeasible("split multiset combinations", count, limit as u128));
            }
            space.run_exhaustive()
        }
        LossinessMode::Sampled { samples, seed } => space.run_sampled(samples, seed),
    }
}

/// Normalised count vector over point indices of one side.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Candidate {
    side: Side,
    weights: Vec<(usize, u32)>,
    total: u32,
}

struct Space {
    table: KernelTable,
    m: usize,
    s_formula: u128,
    cap: usize,
    sides: Vec<(Side, Vec<usize>)>,
    options: Vec<Candidate>,
    row_entropy: Vec<f64>,
    entropy_cap: f64,
}

impl Space {
    fn new(r: &StochasticReduction, problem: &PromiseProblem, gamma: f64) -> Result<Self> {
        if gamma.is_nan() || gamma <= 0.0 || !gamma.is_finite() {
            return Err(Error::Parameter(format!("γ must be positive, got {gamma}")));
        }
        let promise = problem.promise();
        if promise.is_empty() {
            return Err(input("empty promise"));
        }
        let table = KernelTable::build(r, &promise)?;
        let m = r.arity();
        let raw = (512.0 * m as f64 * problem.n() as f64 / gamma.powi(3)).ceil();
        let s_formula = if raw >= u128::MAX as f64 { u128::MAX } else { raw as u128 };
        let cap = s_formula.min(promise.len() as u128).max(1) as usize;
        let index = |xs: &[Instance]| -> Vec<usize> { xs.iter().map(|x| table.index_of(x).expect("promise point")).collect() };
        let mut sides = Vec::new();
        if !problem.yes_set().is_empty() {
            sides.push((Side::Yes, index(problem.yes_set())));
        }
        if !problem.no_set().is_empty() {
            sides.push((Side::No, index(problem.no_set())));
        }
        let mut options = Vec::new();
        for (side, pts) in &sides {
            let mut seen = BTreeSet::new();
            for size in 1..=cap {
                for ms in multisets(pts.len(), size) {
                    seen.insert(normalise(&counts_of(&ms, pts)));
                }
            }
            options.extend(seen.into_iter().map(|weights| {
                let total = weights.iter().map(|(_, c)| c).sum();
                Candidate { side: *side, weights, total }
            }));
        }
        let den = table.den() as f64;
        let row_entropy = (0..table.tuple_count()).map(|t| entropy_of(table.row(t), den)).collect();
        let entropy_cap = (r.omega().len() as f64).log2() / m as f64;
        Ok(Space { table, m, s_formula, cap, sides, options, row_entropy, entropy_cap })
    }

    fn combinations(&self) -> u128 {
        (self.options.len() as u128).checked_pow(self.m as u32).unwrap_or(u128::MAX)
    }

    /// I(X; R(X)) in bits for one option per coordinate, in floating point.
    fn information(&self, choice: &[&Candidate]) -> f64 {
        let k = self.table.omega_len();
        let mut out = vec![0.0; k];
        let mut conditional = 0.0;
        let mut idx = vec![0usize; self.m];
        loop {
            let mut p = 1.0;
            let mut pts = Vec::with_capacity(self.m);
            for (c, &i) in choice.iter().zip(&idx) {
                let (pt, w) = c.weights[i];
                p *= w as f64 / c.total as f64;
                pts.push(pt);
            }
            let t = self.table.tuple_index(&pts);
            conditional += p * self.row_entropy[t];
            let den = self.table.den() as f64;
            for (o, &v) in out.iter_mut().zip(self.table.row(t)) {
                *o += p * v as f64 / den;
            }
            let mut j = self.m;
            loop {
                if j == 0 {
                    let h: f64 = out.iter().filter(|&&q| q > 0.0).map(|&q| -q * q.log2()).sum();
                    return (h - conditional).max(0.0);
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < choice[j].weights.len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    /// The same quantity with exact masses.
    fn exact_information(&self, choice: &[SplitChoice]) -> Result<f64> {
        let laws = choice.iter().map(|c| c.distribution()).collect::<Result<Vec<_>>>()?;
        let mut input = FiniteDistribution::point(Vec::<Instance>::new());
        for law in &laws {
            input = input.product(law).map(|(v, x)| [v.as_slice(), &[*x]].concat());
        }
        let joint = JointDistribution::from_channel(&input, |tuple| {
            let pts = self.table.indices_of(tuple).expect("promise tuple");
            self.table.row_law(self.table.tuple_index(&pts)).to_distribution()
        });
        Ok(mutual_information(&joint))
    }

    fn report(&self, best: Option<(f64, Vec<usize>)>, exhaustive: bool, evaluated: u64) -> Result<LossinessReport> {
        let (lambda, witness) = match best {
            None => (0.0, None),
            Some((_, choice)) => {
                let w: Vec<SplitChoice> = choice.iter().map(|&o| self.to_choice(&self.options[o])).collect();
                let exact = self.exact_information(&w)?;
                (exact / self.m as f64, Some(w))
            }
        };
        Ok(LossinessReport {
            lambda,
            exhaustive,
            s_formula: self.s_formula,
            s_used: self.cap,
            evaluated,
            witness,
            entropy_cap: self.entropy_cap,
        })
    }

    fn to_choice(&self, o: &Candidate) -> SplitChoice {
        let pts = self.table.points();
        SplitChoice { side: o.side, counts: o.weights.iter().map(|&(i, c)| (pts[i], c)).collect() }
    }

    fn run_exhaustive(&self) -> Result<LossinessReport> {
        let total = self.combinations();
        let n = self.options.len();
        let best = (0..total as u64)
            .into_par_iter()
            .map(|mut code| {
                let mut choice = vec![0usize; self.m];
                for c in choice.iter_mut().rev() {
                    *c = (code % n as u64) as usize;
                    code /= n as u64;
                }
                let refs: Vec<&Candidate> = choice.iter().map(|&i| &self.options[i]).collect();
                (self.information(&refs), choice)
            })
            .reduce_with(better);
        self.report(best, true, total as u64)
    }

    fn run_sampled(&self, samples: u64, seed: u64) -> Result<LossinessReport> {
        let best = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut g = rng::stream(seed, i);
                let opts: Vec<Candidate> = (0..self.m)
                    .map(|_| {
                        let (side, pts) = &self.sides[g.random_range(0..self.sides.len())];
                        let size = g.random_range(1..=self.cap);
                        let ms: Vec<usize> = {
                            let mut v: Vec<usize> = (0..size).map(|_| g.random_range(0..pts.len())).collect();
                            v.sort_unstable();
                            v
                        };
                        let weights = normalise(&counts_of(&ms, pts));
                        let total = weights.iter().map(|(_, c)| c).sum();
                        Candidate { side: *side, weights, total }
                    })
                    .collect();
                let refs: Vec<&Candidate> = opts.iter().collect();
                let value = self.information(&refs);
                let ids = opts.iter().map(|o| self.options.binary_search(o).expect("enumerated option")).collect();
                (value, ids)
            })
            .reduce_with(better);
        self.report(best, false, samples)
    }
}

fn better(a: (f64, Vec<usize>), b: (f64, Vec<usize>)) -> (f64, Vec<usize>) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

fn counts_of(ms: &[usize], pts: &[usize]) -> Vec<(usize, u32)> {
    let mut out: Vec<(usize, u32)> = Vec::new();
    for &i in ms {
        match out.last_mut() {
            Some((p, c)) if *p == pts[i] => *c += 1,
            _ => out.push((pts[i], 1)),
        }
    }
    out.sort_unstable();
    out
}

fn normalise(counts: &[(usize, u32)]) -> Vec<(usize, u32)> {
    let g = counts.iter().fold(0u32, |g, (_, c)| g.gcd(c));
    counts.iter().map(|&(p, c)| (p, c / g)).collect()
}

fn entropy_of(row: &[i128], den: f64) -> f64 {
    row.iter().filter(|&&v| v > 0).map(|&v| v as f64 / den).map(|q| -q * q.log2()).sum()
}
