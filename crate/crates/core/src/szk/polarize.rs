//! Statistical-difference polarization: XOR and direct-product steps with
//! exact laws where the alphabet stays small, interval recurrences otherwise.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::traits::One;
use serde::{Deserialize, Serialize};

use crate::error::input;
use crate::information::{statistical_distance, FiniteDistribution};
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Largest alphabet for which exact laws are carried through a step.
pub const EXACT_ALPHABET_LIMIT: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", content = "j", rename_all = "lowercase")]
pub enum Step {
    /// `P_b` outputs `j` samples whose source bits XOR to `b`: Δ ↦ Δ^j.
    Xor(u32),
    /// `j` independent copies: Δ ↦ between `1 − 2e^{−jΔ²/2}` and `jΔ`.
    Product(u32),
}

/// Closed interval known to contain a distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn after(self, step: Step) -> Interval {
        match step {
            Step::Xor(j) => Interval { lo: self.lo.powi(j as i32), hi: self.hi.powi(j as i32) },
            Step::Product(j) => {
                let j = j as f64;
                Interval {
                    lo: self.lo.max(1.0 - 2.0 * (-j * self.lo * self.lo / 2.0).exp()),
                    hi: (j * self.hi).min(1.0),
                }
            }
        }
    }

    pub fn through(self, schedule: &[Step]) -> Interval {
        schedule.iter().fold(self, |acc, &s| acc.after(s))
    }
}

/// Exact XOR construction on a pair of laws, outcomes re-indexed densely.
pub fn xor_pair(
    c0: &FiniteDistribution<usize>,
    c1: &FiniteDistribution<usize>,
    j: u32,
) -> Result<(FiniteDistribution<usize>, FiniteDistribution<usize>)> {
    if j == 0 {
        return Err(input("XOR step needs j ≥ 1"));
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut a0 = c0.map(|&w| vec![w]);
    let mut a1 = c1.map(|&w| vec![w]);
    for _ in 1..j {
        guard(a0.len() * c0.len().max(c1.len()))?;
        let mix = |x: &FiniteDistribution<Vec<usize>>, y: &FiniteDistribution<Vec<usize>>| {
            let ext = |p: &FiniteDistribution<Vec<usize>>, c: &FiniteDistribution<usize>| {
                p.product(c).iter().map(|((v, w), m)| ([v.as_slice(), &[*w]].concat(), m * &half)).collect::<Vec<_>>()
            };
            FiniteDistribution::accumulate(ext(x, c0).into_iter().chain(ext(y, c1)))
        };
        let n0 = mix(&a0, &a1)?;
        let n1 = mix(&a1, &a0)?;
        a0 = n0;
        a1 = n1;
    }
    Ok(reindex(&a0, &a1))
}

/// Exact `j`-fold product of both laws, outcomes re-indexed densely.
pub fn product_pair(
    c0: &FiniteDistribution<usize>,
    c1: &FiniteDistribution<usize>,
    j: u32,
) -> Result<(FiniteDistribution<usize>, FiniteDistribution<usize>)> {
    if j == 0 {
        return Err(input("product step needs j ≥ 1"));
    }
    let power = |c: &FiniteDistribution<usize>| -> Result<FiniteDistribution<Vec<usize>>> {
        let mut acc = c.map(|&w| vec![w]);
        for _ in 1..j {
            guard(acc.len() * c.len())?;
            acc = acc.product(c).map(|(v, w)| [v.as_slice(), &[*w]].concat());
        }
        Ok(acc)
    };
    Ok(reindex(&power(c0)?, &power(c1)?))
}

fn guard(size: usize) -> Result<()> {
    if size > EXACT_ALPHABET_LIMIT {
        return Err(crate::error::infeasible("polarized alphabet", size as u128, EXACT_ALPHABET_LIMIT as u128));
    }
    Ok(())
}

fn reindex(
    a: &FiniteDistribution<Vec<usize>>,
    b: &FiniteDistribution<Vec<usize>>,
) -> (FiniteDistribution<usize>, FiniteDistribution<usize>) {
    let keys: BTreeMap<&Vec<usize>, usize> =
        a.alphabet().chain(b.alphabet()).collect::<std::collections::BTreeSet<_>>().into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    (a.map(|k| keys[k]), b.map(|k| keys[k]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarizeReport {
    pub alpha: f64,
    pub beta: f64,
    pub k: u32,
    pub schedule: Vec<Step>,
    /// Image of `[0, α]` under the schedule.
    pub close: Interval,
    /// Image of `[β, 1]` under the schedule.
    pub far: Interval,
    #[serde(with = "rational::serde_q")]
    pub input_distance: Rational,
    /// Image of the input distance under the schedule.
    pub predicted: Interval,
    /// Exact output distance when every intermediate alphabet stayed small.
    #[serde(with = "rational::serde_q_opt")]
    pub output_distance: Option<Rational>,
    /// `Δ ≤ α` maps below `2^{−k}` and `Δ ≥ β` maps above `1 − 2^{−k}`.
    pub certified: bool,
}

pub const MAX_XOR_ROUNDS: u32 = 64;

/// Schedule XOR(l), product(⌊1/(2α^l)⌋), XOR(k) with the least `l` for which
/// the interval recurrences certify both targets.
pub fn polarization_schedule(alpha: f64, beta: f64, k: u32) -> Result<Vec<Step>> {
    if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&beta) || beta * beta <= alpha {
        return Err(Error::Parameter(format!("polarization needs β² > α, got α = {alpha}, β = {beta}")));
    }
    if k == 0 {
        return Err(input("target k must be positive"));
    }
    let target = (-(k as f64)).exp2();
    if alpha == 0.0 {
        return Ok(vec![Step::Xor(1), Step::Product(1), Step::Xor(k)]);
    }
    for l in 1..=MAX_XOR_ROUNDS {
        let j = (1.0 / (2.0 * alpha.powi(l as i32))).floor();
        if j < 1.0 || j > u32::MAX as f64 {
            continue;
        }
        let schedule = vec![Step::Xor(l), Step::Product(j as u32), Step::Xor(k)];
        let close = Interval { lo: 0.0, hi: alpha }.through(&schedule);
        let far = Interval { lo: beta, hi: 1.0 }.through(&schedule);
        if close.hi <= target && far.lo >= 1.0 - target {
            return Ok(schedule);
        }
    }
    Err(Error::Certification(format!("no XOR round count up to {MAX_XOR_ROUNDS} certifies k = {k}")))
}

/// Polarizes a pair of exact laws toward distance `2^{−k}` or `1 − 2^{−k}`.
pub fn polarize(
    law0: &FiniteDistribution<usize>,
    law1: &FiniteDistribution<usize>,
    alpha: f64,
    beta: f64,
    k: u32,
) -> Result<PolarizeReport> {
    let schedule = polarization_schedule(alpha, beta, k)?;
    let input_distance = statistical_distance(law0, law1);
    let predicted = Interval::point(rational::to_f64(&input_distance)).through(&schedule);
    let close = Interval { lo: 0.0, hi: alpha }.through(&schedule);
    let far = Interval { lo: beta, hi: 1.0 }.through(&schedule);
    let target = (-(k as f64)).exp2();
    let output_distance = apply_exact(law0, law1, &schedule).ok().map(|(a, b)| statistical_distance(&a, &b));
    Ok(PolarizeReport {
        alpha,
        beta,
        k,
        certified: close.hi <= target && far.lo >= 1.0 - target,
        schedule,
        close,
        far,
        input_distance,
        predicted,
        output_distance,
    })
}

/// Runs a schedule on exact laws; fails once an alphabet outgrows the limit.
pub fn apply_exact(
    law0: &FiniteDistribution<usize>,
    law1: &FiniteDistribution<usize>,
    schedule: &[Step],
) -> Result<(FiniteDistribution<usize>, FiniteDistribution<usize>)> {
    let mut pair = (law0.clone(), law1.clone());
    for &step in schedule {
        let alphabet = pair.0.len().max(pair.1.len()) as f64;
        let j = match step {
            Step::Xor(j) | Step::Product(j) => j,
        };
        if alphabet.powi(j as i32) > EXACT_ALPHABET_LIMIT as f64 {
            return Err(crate::error::infeasible("polarized alphabet", u128::MAX, EXACT_ALPHABET_LIMIT as u128));
        }
        pair = match step {
            Step::Xor(j) => xor_pair(&pair.0, &pair.1, j)?,
            Step::Product(j) => product_pair(&pair.0, &pair.1, j)?,
        };
    }
    Ok(pair)
}
