//! Non-adaptive Turing reductions: query tuples plus a decision circuit over
//! the answers, the simulated distinguisher built from them, and the
//! information the circuit carries about the input.

use std::collections::{BTreeMap, BTreeSet};

use num::traits::{Signed, Zero};
use rand::Rng as _;
use rayon::prelude::*;

use super::kernel::multisets;
use super::{f_of_chi, PermInvariantF, StochasticReduction};
use crate::error::input;
use crate::information::{mutual_information, statistical_distance, FiniteDistribution, JointDistribution};
use crate::problems::{BitString, Chi, Instance, PromiseProblem};
use crate::rational::Rational;
use crate::rng;
use crate::{Error, Result};

/// Truth table over `k` answer bits, first answer most significant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CircuitTable {
    k: usize,
    table: Vec<bool>,
}

impl CircuitTable {
    pub fn new(k: usize, table: Vec<bool>) -> Result<Self> {
        if k > 16 || table.len() != 1 << k {
            return Err(input(format!("circuit over {k} answers needs {} entries", 1usize << k.min(16))));
        }
        Ok(CircuitTable { k, table })
    }

    /// Outputs its single answer.
    pub fn copy() -> Self {
        CircuitTable { k: 1, table: vec![false, true] }
    }

    pub fn constant(k: usize, bit: bool) -> Result<Self> {
        CircuitTable::new(k, vec![bit; 1 << k])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn eval(&self, answers: &[bool]) -> Result<bool> {
        if answers.len() != self.k {
            return Err(input(format!("circuit takes {} answers, got {}", self.k, answers.len())));
        }
        Ok(self.table[answers.iter().fold(0, |acc, &b| acc << 1 | b as usize)])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TuringOutput {
    pub queries: Vec<Instance>,
    pub circuit: CircuitTable,
}

/// Tuples of source instances mapped to laws over [`TuringOutput`]s whose
/// queries lie in the promise of `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct TuringReduction {
    arity: usize,
    k: usize,
    target: PromiseProblem,
    kernel: BTreeMap<Vec<Instance>, FiniteDistribution<TuringOutput>>,
}

impl TuringReduction {
    pub fn new(
        arity: usize,
        target: PromiseProblem,
        kernel: BTreeMap<Vec<Instance>, FiniteDistribution<TuringOutput>>,
    ) -> Result<Self> {
        let mut k = None;
        for (tuple, law) in &kernel {
            if tuple.len() != arity {
                return Err(input(format!("tuple of length {} in an arity-{arity} reduction", tuple.len())));
            }
            for out in law.alphabet() {
                if *k.get_or_insert(out.queries.len()) != out.queries.len() || out.circuit.k() != out.queries.len() {
                    return Err(input("every output must carry the same number k of queries and a k-input circuit"));
                }
                for q in &out.queries {
                    if target.chi(q)? == Chi::Star {
                        return Err(input(format!("query {q} outside the target promise")));
                    }
                }
            }
        }
        let k = k.ok_or_else(|| input("reduction has no outputs"))?;
        Ok(TuringReduction { arity, k, target, kernel })
    }

    /// Karp reduction as a one-query reduction with the copy circuit. Ω labels
    /// are read as binary strings, i.e. instances of `target`.
    pub fn from_karp(r: &StochasticReduction, points: &[Instance], target: PromiseProblem) -> Result<Self> {
        let labels = r.omega().iter().map(|l| BitString::from_bits(l)).collect::<Result<Vec<_>>>()?;
        let mut kernel = BTreeMap::new();
        for tuple in tuples(points, r.arity()) {
            let law = r.law(&tuple)?.map(|&w| TuringOutput { queries: vec![labels[w]], circuit: CircuitTable::copy() });
            kernel.insert(tuple, law);
        }
        TuringReduction::new(r.arity(), target, kernel)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn target(&self) -> &PromiseProblem {
        &self.target
    }

    pub fn law(&self, tuple: &[Instance]) -> Result<&FiniteDistribution<TuringOutput>> {
        self.kernel.get(tuple).ok_or_else(|| input(format!("no row for tuple {}", super::show(tuple))))
    }

    /// Pr[C(χ(y₁), …, χ(y_k)) = 1] on input `tuple`.
    pub fn accept_probability(&self, tuple: &[Instance]) -> Result<Rational> {
        let mut total = Rational::zero();
        for (out, p) in self.law(tuple)?.iter() {
            let answers = out.queries.iter().map(|q| self.target.chi_bit(q)).collect::<Result<Vec<_>>>()?;
            if out.circuit.eval(&answers)? {
                total += p;
            }
        }
        Ok(total)
    }
}

fn tuples(points: &[Instance], m: usize) -> Vec<Vec<Instance>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out.into_iter().flat_map(|t| points.iter().map(move |p| [t.clone(), vec![*p]].concat())).collect();
    }
    out
}

/// μ of the distinguisher that answers the queries with χ and runs the circuit:
/// `(1 − min |q(x̄′) − q(x̄)|)/2` over promise tuples with differing f-values.
pub fn simulated_distinguisher_error(
    tr: &TuringReduction,
    problem: &PromiseProblem,
    f: &PermInvariantF,
) -> Result<super::DistinguisherReport> {
    if tr.arity() != f.arity() {
        return Err(input("reduction and f arities differ"));
    }
    let all = tuples(&problem.promise(), tr.arity());
    let mut zeros = Vec::new();
    let mut ones = Vec::new();
    for t in &all {
        let q = tr.accept_probability(t)?;
        if f_of_chi(f, problem, t)? {
            ones.push((t.clone(), q));
        } else {
            zeros.push((t.clone(), q));
        }
    }
    let pairs = zeros.len() as u64 * ones.len() as u64;
    let mut best: Option<(Rational, &Vec<Instance>, &Vec<Instance>)> = None;
    for (z, qz) in &zeros {
        for (o, qo) in &ones {
            let adv = (qo - qz).abs();
            if best.as_ref().is_none_or(|(b, _, _)| adv < *b) {
                best = Some((adv, z, o));
            }
        }
    }
    Ok(match best {
        None => super::DistinguisherReport { mu: Rational::zero(), min_distance: None, witness: None, vacuous: true, pairs },
        Some((adv, z, o)) => super::DistinguisherReport {
            mu: (Rational::from_integer(1.into()) - &adv) / Rational::from_integer(2.into()),
            min_distance: Some(adv),
            witness: Some((z.clone(), o.clone())),
            vacuous: false,
            pairs,
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HintReport {
    /// max_x Δ(query-tuple law of x, pooled center).
    pub d: Rational,
    /// Uniform mixture of the query-tuple laws over the promise.
    pub center: FiniteDistribution<Vec<Instance>>,
    /// Largest observed I((X, Y₁..Y_k); C) in bits.
    pub h: f64,
    pub exhaustive: bool,
    pub evaluated: u64,
    pub witness: Option<Vec<(Instance, u32)>>,
}

/// Query-distance and circuit-information measurements of an arity-1 Turing
/// reduction over s-uniform inputs on the promise, with s capped at its size.
pub fn turing_hint_information(
    tr: &TuringReduction,
    problem: &PromiseProblem,
    gamma: f64,
    budget: u64,
    seed: Option<u64>,
) -> Result<HintReport> {
    if tr.arity() != 1 {
        return Err(input("hint information is defined for single-input reductions"));
    }
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::Parameter(format!("γ must be positive, got {gamma}")));
    }
    let promise = problem.promise();
    if promise.is_empty() {
        return Err(input("empty promise"));
    }
    let query_laws: Vec<FiniteDistribution<Vec<Instance>>> =
        promise.iter().map(|x| Ok(tr.law(&[*x])?.map(|o| o.queries.clone()))).collect::<Result<_>>()?;
    let weight = Rational::new(1.into(), (promise.len() as i64).into());
    let center = FiniteDistribution::accumulate(
        query_laws.iter().flat_map(|l| l.iter().map(|(q, p)| (q.clone(), p * &weight)).collect::<Vec<_>>()),
    )?;
    let d = query_laws.iter().map(|l| statistical_distance(l, &center)).max().unwrap_or_else(Rational::zero);

    let raw = (512.0 * problem.n() as f64 / gamma.powi(3)).ceil();
    let cap = if raw >= promise.len() as f64 { promise.len() } else { (raw as usize).max(1) };
    let count: u128 = (1..=cap).map(|s| super::kernel::multiset_count(promise.len(), s)).sum();
    let info = |ms: &[usize]| -> Result<f64> {
        let xs: Vec<Instance> = ms.iter().map(|&i| promise[i]).collect();
        let x = FiniteDistribution::from_multiset(&xs)?;
        let mut pairs = Vec::new();
        for (xi, px) in x.iter() {
            for (out, p) in tr.law(&[*xi])?.iter() {
                pairs.push((((*xi, out.queries.clone()), out.circuit.clone()), px * p));
            }
        }
        Ok(mutual_information(&JointDistribution::new(FiniteDistribution::accumulate(pairs)?)))
    };
    let (candidates, exhaustive): (Vec<Vec<usize>>, bool) = if count <= budget as u128 {
        let mut seen = BTreeSet::new();
        for s in 1..=cap {
            for ms in multisets(promise.len(), s) {
                seen.insert(normalised(&ms));
            }
        }
        (seen.into_iter().collect(), true)
    } else {
        let seed = seed.ok_or_else(|| input("sampled hint estimate needs a seed"))?;
        let drawn = (0..budget)
            .map(|i| {
                let mut g = rng::stream(seed, i);
                let s = g.random_range(1..=cap);
                let mut v: Vec<usize> = (0..s).map(|_| g.random_range(0..promise.len())).collect();
                v.sort_unstable();
                v
            })
            .collect();
        (drawn, false)
    };
    let scored = candidates.par_iter().map(|ms| info(ms).map(|h| (h, ms.clone()))).collect::<Result<Vec<_>>>()?;
    let evaluated = scored.len() as u64;
    let best = scored.into_iter().reduce(|a, b| if b.0 > a.0 { b } else { a });
    let (h, witness) = match best {
        Some((h, ms)) => {
            let mut counts: BTreeMap<Instance, u32> = BTreeMap::new();
            for i in ms {
                *counts.entry(promise[i]).or_default() += 1;
            }
            (h, Some(counts.into_iter().collect()))
        }
        None => (0.0, None),
    };
    Ok(HintReport { d, center, h, exhaustive, evaluated, witness })
}

/// Multiset with its multiplicities divided by their gcd, as a sorted index list.
fn normalised(ms: &[usize]) -> Vec<usize> {
    use num::integer::Integer;
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &i in ms {
        *counts.entry(i).or_default() += 1;
    }
    let g = counts.values().fold(0, |g, c| g.gcd(c));
    counts.into_iter().flat_map(|(i, c)| std::iter::repeat_n(i, c / g)).collect()
}
