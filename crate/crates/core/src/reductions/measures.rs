use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::traits::{One, Zero};
use rayon::prelude::*;

use super::kernel::{l1, KernelTable};
use super::{f_of_chi, PermInvariantF, StochasticReduction};
use crate::error::input;
use crate::information::{statistical_distance, FiniteDistribution};
use crate::lp::{maximize, Constraint, Relation};
use crate::problems::{Instance, PromiseProblem};
use crate::rational::Rational;
use crate::{Error, Result};

/// Outcome of [`distinguisher_error`].
#[derive(Clone, Debug, PartialEq)]
pub struct DistinguisherReport {
    /// (1 − min Δ)/2; zero when vacuous.
    pub mu: Rational,
    pub min_distance: Option<Rational>,
    /// A pair `(f = 0 tuple, f = 1 tuple)` attaining the minimum.
    pub witness: Option<(Vec<Instance>, Vec<Instance>)>,
    /// No pair of promise tuples has differing f-values.
    pub vacuous: bool,
    pub pairs: u64,
}

/// Error of the optimal (total-variation) distinguisher over all promise tuple
/// pairs with differing f-values.
pub fn distinguisher_error(r: &StochasticReduction, problem: &PromiseProblem, f: &PermInvariantF) -> Result<DistinguisherReport> {
    if r.arity() != f.arity() {
        return Err(input(format!("reduction arity {} differs from f arity {}", r.arity(), f.arity())));
    }
    let table = KernelTable::build(r, &problem.promise())?;
    let (mut zeros, mut ones) = (Vec::new(), Vec::new());
    for t in 0..table.tuple_count() {
        if f_of_chi(f, problem, &table.tuple(t))? {
            ones.push(t);
        } else {
            zeros.push(t);
        }
    }
    let scores: Vec<(i128, usize, usize)> = zeros
        .par_iter()
        .filter_map(|&z| ones.iter().map(|&o| (l1(table.row(z), table.row(o)), z, o)).min())
        .collect();
    min_report(scores.into_iter().min(), 2 * table.den(), &table, zeros.len() as u64 * ones.len() as u64)
}

pub(super) fn min_report(best: Option<(i128, usize, usize)>, den: i128, table: &KernelTable, pairs: u64) -> Result<DistinguisherReport> {
    Ok(match best {
        None => DistinguisherReport { mu: Rational::zero(), min_distance: None, witness: None, vacuous: true, pairs },
        Some((num, z, o)) => {
            let delta = Rational::new(BigInt::from(num), BigInt::from(den));
            DistinguisherReport {
                mu: (Rational::one() - &delta) / BigInt::from(2),
                min_distance: Some(delta),
                witness: Some((table.tuple(z), table.tuple(o))),
                vacuous: false,
                pairs,
            }
        }
    })
}

/// Reference distribution(s) for [`wc_dist_distance`].
#[derive(Clone, Debug, PartialEq)]
pub enum Center {
    /// Chebyshev center over all rows.
    Optimal,
    /// Separate Chebyshev centers for YES and NO inputs (arity 1 only).
    OptimalSplit,
    Fixed(FiniteDistribution<usize>),
    FixedSplit { yes: FiniteDistribution<usize>, no: FiniteDistribution<usize> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct WcDistReport {
    pub d: Rational,
    /// Single center, masses indexed like Ω.
    pub center: Option<Vec<Rational>>,
    pub yes_center: Option<Vec<Rational>>,
    pub no_center: Option<Vec<Rational>>,
    pub d_yes: Option<Rational>,
    pub d_no: Option<Rational>,
}

/// Worst-case distance of the reduction's output laws to a (possibly optimal) center.
pub fn wc_dist_distance(r: &StochasticReduction, problem: &PromiseProblem, center: &Center) -> Result<WcDistReport> {
    let table = KernelTable::build(r, &problem.promise())?;
    let k = r.omega().len();
    let to_vec = |d: &FiniteDistribution<usize>| -> Result<Vec<Rational>> {
        if let Some(w) = d.alphabet().find(|w| **w >= k) {
            return Err(input(format!("center outcome {w} outside Ω")));
        }
        Ok((0..k).map(|w| d.mass(&w)).collect())
    };
    let rows_where = |keep: &dyn Fn(&[Instance]) -> bool| -> Vec<Vec<Rational>> {
        (0..table.tuple_count()).filter(|&t| keep(&table.tuple(t))).map(|t| table.row_rational(t)).collect()
    };
    let split = matches!(center, Center::OptimalSplit | Center::FixedSplit { .. });
    if !split {
        let rows = rows_where(&|_| true);
        let (d, c) = match center {
            Center::Optimal => chebyshev_center(&rows)?,
            Center::Fixed(c) => {
                let c = to_vec(c)?;
                (max_distance(&rows, &c), c)
            }
            _ => unreachable!(),
        };
        return Ok(WcDistReport { d, center: Some(c), yes_center: None, no_center: None, d_yes: None, d_no: None });
    }
    if r.arity() != 1 {
        return Err(input("split mode is defined for arity-1 reductions"));
    }
    let yes_rows = rows_where(&|t| problem.chi_bit(&t[0]).unwrap_or(false));
    let no_rows = rows_where(&|t| !problem.chi_bit(&t[0]).unwrap_or(true));
    let side = |rows: &[Vec<Rational>], fixed: Option<&FiniteDistribution<usize>>| -> Result<(Rational, Option<Vec<Rational>>)> {
        if rows.is_empty() {
            return Ok((Rational::zero(), None));
        }
        match fixed {
            Some(c) => {
                let c = to_vec(c)?;
                Ok((max_distance(rows, &c), Some(c)))
            }
            None => chebyshev_center(rows).map(|(d, c)| (d, Some(c))),
        }
    };
    let (fy, fno) = match center {
        Center::FixedSplit { yes, no } => (Some(yes), Some(no)),
        _ => (None, None),
    };
    let (d_yes, yes_center) = side(&yes_rows, fy)?;
    let (d_no, no_center) = side(&no_rows, fno)?;
    Ok(WcDistReport {
        d: d_yes.clone().max(d_no.clone()),
        center: None,
        yes_center,
        no_center,
        d_yes: Some(d_yes),
        d_no: Some(d_no),
    })
}

fn row_distance(a: &[Rational], b: &[Rational]) -> Rational {
    let total: Rational = a.iter().zip(b).map(|(x, y)| if x > y { x - y } else { y - x }).sum();
    total / BigInt::from(2)
}

fn max_distance(rows: &[Vec<Rational>], c: &[Rational]) -> Rational {
    rows.iter().map(|r| row_distance(r, c)).max().unwrap_or_else(Rational::zero)
}

/// Distribution minimising the largest statistical distance to `rows`, by LP:
/// minimise `t` subject to `Σ_ω e_{x,ω} ≤ t`, `e_{x,ω} ≥ R_x(ω) − D(ω)`,
/// `Σ D = 1`, all variables non-negative. Returns `(t*, D*)`.
pub fn chebyshev_center(rows: &[Vec<Rational>]) -> Result<(Rational, Vec<Rational>)> {
    let mut rows: Vec<Vec<Rational>> = rows.to_vec();
    rows.sort();
    rows.dedup();
    let Some(first) = rows.first() else {
        return Err(input("Chebyshev center of an empty row set"));
    };
    let k = first.len();
    if rows.len() == 1 {
        return Ok((Rational::zero(), first.clone()));
    }
    // Variables: D (k), then one e per positive R_x(ω), then t.
    let mut e_index: Vec<Vec<Option<usize>>> = Vec::new();
    let mut next = k;
    for r in &rows {
        e_index.push(
            r.iter()
                .map(|p| {
                    if p.is_zero() {
                        None
                    } else {
                        next += 1;
                        Some(next - 1)
                    }
                })
                .collect(),
        );
    }
    let t_var = next;
    let width = next + 1;
    let mut constraints = Vec::new();
    for (x, r) in rows.iter().enumerate() {
        let mut sum_row = vec![Rational::zero(); width];
        for (w, p) in r.iter().enumerate() {
            if let Some(e) = e_index[x][w] {
                let mut c = vec![Rational::zero(); width];
                c[e] = Rational::one();
                c[w] = Rational::one();
                constraints.push(Constraint::new(c, Relation::Ge, p.clone()));
                sum_row[e] = Rational::one();
            }
        }
        sum_row[t_var] = -Rational::one();
        constraints.push(Constraint::new(sum_row, Relation::Le, Rational::zero()));
    }
    let mut simplex = vec![Rational::zero(); width];
    for v in simplex.iter_mut().take(k) {
        *v = Rational::one();
    }
    constraints.push(Constraint::new(simplex, Relation::Eq, Rational::one()));
    let mut cost = vec![Rational::zero(); width];
    cost[t_var] = -Rational::one();
    let sol = maximize(&cost, &constraints)?;
    let center: Vec<Rational> = sol.x[..k].to_vec();
    let d = max_distance(&rows, &center);
    let t = -sol.value;
    if d != t {
        return Err(Error::Lp(format!("Chebyshev center check failed: LP {t} vs direct {d}")));
    }
    Ok((d, center))
}

/// Encoder, decoder on Ω, and simulator laws `Sim(0)`, `Sim(1)` over Ω.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomizedEncoding {
    pub encoder: StochasticReduction,
    pub decoder: Vec<bool>,
    pub sim: [FiniteDistribution<usize>; 2],
}

impl RandomizedEncoding {
    pub fn new(encoder: StochasticReduction, decoder: Vec<bool>, sim: [FiniteDistribution<usize>; 2]) -> Result<Self> {
        if encoder.arity() != 1 {
            return Err(input("an encoder takes a single input"));
        }
        let k = encoder.omega().len();
        if decoder.len() != k {
            return Err(input("decoder must cover Ω"));
        }
        if sim.iter().any(|s| s.support().any(|w| *w >= k)) {
            return Err(input("simulator support leaves Ω"));
        }
        Ok(RandomizedEncoding { encoder, decoder, sim })
    }

    /// `E(x; r) = (x₁⊕r, x₂⊕r)` with optional first-bit noise, decoded by XOR;
    /// `Sim(b)` is uniform over the pairs with XOR `b`.
    pub fn xor(noise: Rational) -> Result<Self> {
        let encoder = StochasticReduction::xor_encoding(noise)?;
        let decoder = vec![false, true, true, false];
        let sim0 = FiniteDistribution::from_multiset(&[0usize, 3])?;
        let sim1 = FiniteDistribution::from_multiset(&[1usize, 2])?;
        RandomizedEncoding::new(encoder, decoder, [sim0, sim1])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncodingReport {
    pub mu: Rational,
    pub d: Rational,
    pub worst_error: Option<Instance>,
    pub worst_privacy: Option<Instance>,
}

/// Exact correctness error and privacy distance of an encoding of `f`.
pub fn encoding_check(re: &RandomizedEncoding, f: &BTreeMap<Instance, bool>) -> Result<EncodingReport> {
    let mut mu = Rational::zero();
    let mut d = Rational::zero();
    let (mut worst_error, mut worst_privacy) = (None, None);
    for (x, &fx) in f {
        let law = re.encoder.law(&[*x])?;
        let err = law.probability(|w| re.decoder[*w] != fx);
        if worst_error.is_none() || err > mu {
            mu = err;
            worst_error = Some(*x);
        }
        let dist = statistical_distance(&re.sim[fx as usize], &law);
        if worst_privacy.is_none() || dist > d {
            d = dist;
            worst_privacy = Some(*x);
        }
    }
    Ok(EncodingReport { mu, d, worst_error, worst_privacy })
}
