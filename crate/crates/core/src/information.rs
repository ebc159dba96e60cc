//! Exact finite distributions and the information quantities built on them.
//!
//! Masses are exact rationals. Logarithmic quantities (entropy, KL divergence,
//! mutual information) are returned as `f64` in bits; each logarithm is taken of
//! an exactly computed ratio, so the only error is the final float rounding
//! (well below the crate-wide tolerance [`LOG_TOL`]).

use std::collections::{BTreeMap, BTreeSet};

use num::bigint::BigInt;
use num::traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng as _;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::input;
use crate::rational::{self, lcm_denominators, IntRepr, Rational, RationalRepr};
use crate::rng::{self, Rng};
use crate::{Error, Result};

/// Absolute tolerance for comparisons of logarithmic quantities.
pub const LOG_TOL: f64 = 1e-9;

/// Probability distribution over an ordered finite alphabet. Outcomes listed in
/// the alphabet may carry zero mass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDistribution<O: Ord> {
    mass: BTreeMap<O, Rational>,
}

impl<O: Ord + Clone> FiniteDistribution<O> {
    /// Build from `(outcome, mass)` pairs; outcomes must be unique, masses
    /// non-negative and summing to exactly one.
    pub fn new(pairs: impl IntoIterator<Item = (O, Rational)>) -> Result<Self> {
        let mut mass = BTreeMap::new();
        let mut total = Rational::zero();
        for (o, p) in pairs {
            if p.is_negative() {
                return Err(input("negative probability mass"));
            }
            total += &p;
            if mass.insert(o, p).is_some() {
                return Err(input("duplicate outcome in distribution"));
            }
        }
        if !total.is_one() {
            return Err(input(format!("masses sum to {total} instead of 1")));
        }
        Ok(FiniteDistribution { mass })
    }

    /// Like [`new`](Self::new) but adds the masses of repeated outcomes.
    pub fn accumulate(pairs: impl IntoIterator<Item = (O, Rational)>) -> Result<Self> {
        let mut mass: BTreeMap<O, Rational> = BTreeMap::new();
        for (o, p) in pairs {
            *mass.entry(o).or_insert_with(Rational::zero) += p;
        }
        FiniteDistribution::new(mass)
    }

    pub fn point(o: O) -> Self {
        FiniteDistribution { mass: BTreeMap::from([(o, Rational::one())]) }
    }

    /// Uniform law over a multiset (mass k/s for multiplicity k).
    pub fn from_multiset(items: &[O]) -> Result<Self> {
        if items.is_empty() {
            return Err(input("uniform law over an empty multiset"));
        }
        let unit = Rational::new(BigInt::one(), BigInt::from(items.len()));
        FiniteDistribution::accumulate(items.iter().map(|o| (o.clone(), unit.clone())))
    }

    pub fn mass(&self, o: &O) -> Rational {
        self.mass.get(o).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn alphabet(&self) -> impl Iterator<Item = &O> {
        self.mass.keys()
    }

    pub fn support(&self) -> impl Iterator<Item = &O> {
        self.mass.iter().filter(|(_, p)| !p.is_zero()).map(|(o, _)| o)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&O, &Rational)> {
        self.mass.iter()
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Push-forward through `f`.
    pub fn map<P: Ord + Clone>(&self, f: impl Fn(&O) -> P) -> FiniteDistribution<P> {
        let mut mass: BTreeMap<P, Rational> = BTreeMap::new();
        for (o, p) in &self.mass {
            *mass.entry(f(o)).or_insert_with(Rational::zero) += p;
        }
        FiniteDistribution { mass }
    }

    /// Law of the pair `(X, Y)` for independent `X ∼ self`, `Y ∼ other`.
    pub fn product<P: Ord + Clone>(&self, other: &FiniteDistribution<P>) -> FiniteDistribution<(O, P)> {
        let mut mass = BTreeMap::new();
        for (a, p) in &self.mass {
            for (b, q) in &other.mass {
                mass.insert((a.clone(), b.clone()), p * q);
            }
        }
        FiniteDistribution { mass }
    }

    /// Law conditioned on the event `keep`; a null event is rejected.
    pub fn conditional(&self, keep: impl Fn(&O) -> bool) -> Result<Self> {
        let total: Rational = self.mass.iter().filter(|(o, _)| keep(o)).map(|(_, p)| p).sum();
        if total.is_zero() {
            return Err(Error::Domain("conditioning on a zero-probability event".into()));
        }
        Ok(FiniteDistribution {
            mass: self.mass.iter().filter(|(o, _)| keep(o)).map(|(o, p)| (o.clone(), p / &total)).collect(),
        })
    }

    pub fn probability(&self, event: impl Fn(&O) -> bool) -> Rational {
        self.mass.iter().filter(|(o, _)| event(o)).map(|(_, p)| p).sum()
    }

    pub fn sampler(&self) -> Sampler<O> {
        Sampler::new(self)
    }

    pub fn sample_with(&self, rng: &mut Rng) -> O {
        self.sampler().sample(rng)
    }

    /// One draw from the stream derived from `seed`.
    pub fn sample(&self, seed: u64) -> O {
        self.sample_with(&mut rng::from_seed(seed))
    }

    pub fn to_entries(&self) -> Vec<DistributionEntry<O>>
    where
        O: Serialize,
    {
        self.mass
            .iter()
            .map(|(o, p)| DistributionEntry {
                outcome: o.clone(),
                numerator: IntRepr::from_big(p.numer()),
                denominator: IntRepr::from_big(p.denom()),
            })
            .collect()
    }

    pub fn from_entries(entries: Vec<DistributionEntry<O>>) -> Result<Self>
    where
        O: DeserializeOwned,
    {
        let pairs = entries
            .into_iter()
            .map(|e| {
                let num = e.numerator.to_big().map_err(input)?;
                let den = e.denominator.to_big().map_err(input)?;
                if den.is_zero() {
                    return Err(input("zero denominator"));
                }
                Ok((e.outcome, Rational::new(num, den)))
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteDistribution::new(pairs)
    }
}

/// JSON entry `{outcome, numerator, denominator}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionEntry<O> {
    pub outcome: O,
    pub numerator: IntRepr,
    pub denominator: IntRepr,
}

/// Precomputed inverse-CDF sampler. Exact when the common denominator fits in
/// `u64`, otherwise it falls back to `f64` cumulative masses.
#[derive(Clone, Debug)]
pub struct Sampler<O> {
    outcomes: Vec<O>,
    cumulative: SamplerTable,
}

#[derive(Clone, Debug)]
enum SamplerTable {
    Exact { den: u64, cum: Vec<u64> },
    Float(Vec<f64>),
}

impl<O: Ord + Clone> Sampler<O> {
    fn new(d: &FiniteDistribution<O>) -> Self {
        let support: Vec<(&O, &Rational)> = d.mass.iter().filter(|(_, p)| !p.is_zero()).collect();
        let outcomes = support.iter().map(|(o, _)| (*o).clone()).collect();
        let den = lcm_denominators(support.iter().map(|(_, p)| *p));
        let cumulative = match den.to_u64() {
            Some(den_u) => {
                let mut acc = 0u64;
                let cum = support
                    .iter()
                    .map(|(_, p)| {
                        acc += rational::scaled(p, &den).to_u64().expect("mass below one");
                        acc
                    })
                    .collect();
                SamplerTable::Exact { den: den_u, cum }
            }
            None => {
                let mut acc = Rational::zero();
                SamplerTable::Float(
                    support
                        .iter()
                        .map(|(_, p)| {
                            acc += *p;
                            rational::to_f64(&acc)
                        })
                        .collect(),
                )
            }
        };
        Sampler { outcomes, cumulative }
    }

    pub fn sample(&self, rng: &mut Rng) -> O {
        let idx = match &self.cumulative {
            SamplerTable::Exact { den, cum } => {
                let u = rng.random_range(0..*den);
                cum.partition_point(|&c| c <= u)
            }
            SamplerTable::Float(cum) => {
                let u: f64 = rng.random();
                cum.partition_point(|&c| c <= u).min(cum.len() - 1)
            }
        };
        self.outcomes[idx].clone()
    }
}

/// Uniform law over a multiset of outcomes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SUniform<O> {
    pub items: Vec<O>,
}

impl<O: Ord + Clone> SUniform<O> {
    pub fn new(mut items: Vec<O>) -> Self {
        items.sort();
        SUniform { items }
    }

    pub fn size(&self) -> usize {
        self.items.len()
    }

    pub fn distribution(&self) -> Result<FiniteDistribution<O>> {
        FiniteDistribution::from_multiset(&self.items)
    }
}

/// Joint law of a pair `(X, Y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointDistribution<L: Ord, R: Ord> {
    joint: FiniteDistribution<(L, R)>,
}

impl<L: Ord + Clone, R: Ord + Clone> JointDistribution<L, R> {
    pub fn new(joint: FiniteDistribution<(L, R)>) -> Self {
        JointDistribution { joint }
    }

    /// Law of `(X, channel(X))` for `X ∼ input`.
    pub fn from_channel(input: &FiniteDistribution<L>, channel: impl Fn(&L) -> FiniteDistribution<R>) -> Self {
        let mut mass = BTreeMap::new();
        for (x, p) in input.iter() {
            if p.is_zero() {
                continue;
            }
            for (y, q) in channel(x).iter() {
                *mass.entry((x.clone(), y.clone())).or_insert_with(Rational::zero) += p * q;
            }
        }
        JointDistribution { joint: FiniteDistribution { mass } }
    }

    pub fn joint(&self) -> &FiniteDistribution<(L, R)> {
        &self.joint
    }

    pub fn left(&self) -> FiniteDistribution<L> {
        self.joint.map(|(l, _)| l.clone())
    }

    pub fn right(&self) -> FiniteDistribution<R> {
        self.joint.map(|(_, r)| r.clone())
    }
}

/// Δ(P, Q) = ½·Σ|P(x) − Q(x)|, exact.
pub fn statistical_distance<O: Ord + Clone>(p: &FiniteDistribution<O>, q: &FiniteDistribution<O>) -> Rational {
    let keys: BTreeSet<&O> = p.alphabet().chain(q.alphabet()).collect();
    let total: Rational = keys.into_iter().map(|o| (p.mass(o) - q.mass(o)).abs()).sum();
    total / Rational::from_integer(BigInt::from(2))
}

/// Shannon entropy in bits.
pub fn entropy<O: Ord + Clone>(p: &FiniteDistribution<O>) -> f64 {
    p.iter().filter(|(_, m)| !m.is_zero()).map(|(_, m)| -rational::to_f64(m) * rational::log2(m)).sum()
}

/// D_KL(P ∥ Q) in bits; `+∞` when supp(P) ⊄ supp(Q).
pub fn kl_divergence<O: Ord + Clone>(p: &FiniteDistribution<O>, q: &FiniteDistribution<O>) -> f64 {
    let mut total = 0.0;
    for (o, pm) in p.iter() {
        if pm.is_zero() {
            continue;
        }
        let qm = q.mass(o);
        if qm.is_zero() {
            return f64::INFINITY;
        }
        total += rational::to_f64(pm) * rational::log2(&(pm / &qm));
    }
    total.max(0.0)
}

/// I(X; Y) = Σ p(x,y)·log₂(p(x,y) / (p(x)p(y))) in bits.
pub fn mutual_information<L: Ord + Clone, R: Ord + Clone>(j: &JointDistribution<L, R>) -> f64 {
    let left = j.left();
    let right = j.right();
    let mut total = 0.0;
    for ((x, y), p) in j.joint.iter() {
        if p.is_zero() {
            continue;
        }
        let ratio = p / (left.mass(x) * right.mass(y));
        total += rational::to_f64(p) * rational::log2(&ratio);
    }
    total.max(0.0)
}

/// H(X) + H(Y) − H(X,Y); an independent route to [`mutual_information`].
pub fn mutual_information_by_entropies<L: Ord + Clone, R: Ord + Clone>(j: &JointDistribution<L, R>) -> f64 {
    entropy(&j.left()) + entropy(&j.right()) - entropy(&j.joint)
}

/// log₂(1 + 2Δ(P,Q)²/α) with α the smallest mass of `q` over the union of the
/// two alphabets; an upper bound on D_KL(P ∥ Q).
pub fn reverse_pinsker_bound<O: Ord + Clone>(p: &FiniteDistribution<O>, q: &FiniteDistribution<O>) -> Result<f64> {
    let alpha = p
        .alphabet()
        .chain(q.alphabet())
        .map(|o| q.mass(o))
        .min()
        .ok_or_else(|| Error::UndefinedBound("empty alphabet".into()))?;
    if alpha.is_zero() {
        return Err(Error::UndefinedBound("reference distribution lacks full support (α = 0)".into()));
    }
    let delta = statistical_distance(p, q);
    let inner = Rational::one() + Rational::from_integer(BigInt::from(2)) * &delta * &delta / alpha;
    Ok(rational::log2(&inner))
}

/// Serialize a distribution as `[{outcome, numerator, denominator}]`.
pub fn to_json<O: Ord + Clone + Serialize>(p: &FiniteDistribution<O>) -> serde_json::Value {
    serde_json::to_value(p.to_entries()).expect("serializable outcomes")
}

pub fn from_json<O: Ord + Clone + DeserializeOwned>(v: &serde_json::Value) -> Result<FiniteDistribution<O>> {
    let entries: Vec<DistributionEntry<O>> =
        serde_json::from_value(v.clone()).map_err(|e| input(format!("distribution JSON: {e}")))?;
    FiniteDistribution::from_entries(entries)
}

/// `{num, den}` form of a mass, as used in reports.
pub fn repr(r: &Rational) -> RationalRepr {
    RationalRepr::from(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn d(ms: &[(i64, i64)]) -> FiniteDistribution<usize> {
        FiniteDistribution::new(ms.iter().enumerate().map(|(i, &(n, den))| (i, rat(n, den)))).unwrap()
    }

    #[test]
    fn validation() {
        assert!(FiniteDistribution::new(vec![(0, rat(1, 2))]).is_err());
        assert!(FiniteDistribution::new(vec![(0, rat(3, 2)), (1, rat(-1, 2))]).is_err());
        assert!(FiniteDistribution::new(vec![(0, rat(1, 2)), (0, rat(1, 2))]).is_err());
    }

    #[test]
    fn distance_examples() {
        let p = d(&[(1, 2), (1, 2)]);
        assert_eq!(statistical_distance(&p, &p), rat(0, 1));
        assert_eq!(statistical_distance(&FiniteDistribution::point(0usize), &FiniteDistribution::point(1)), rat(1, 1));
        assert_eq!(statistical_distance(&p, &d(&[(1, 1), (0, 1)])), rat(1, 2));
    }

    #[test]
    fn kl_examples() {
        let p = d(&[(1, 2), (1, 2)]);
        assert_eq!(kl_divergence(&p, &p), 0.0);
        assert_eq!(kl_divergence(&FiniteDistribution::point(0usize), &FiniteDistribution::point(1)), f64::INFINITY);
        let q = d(&[(1, 4), (3, 4)]);
        assert!((kl_divergence(&p, &q) - 0.207_518_749_639_421_9).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_examples() {
        let two = |s: &str| crate::problems::BitString::from_bits(s).unwrap();
        let x = FiniteDistribution::from_multiset(&[two("00"), two("11")]).unwrap();
        let j = JointDistribution::from_channel(&x, |v| FiniteDistribution::point(v.weight() % 2));
        assert!(mutual_information(&j).abs() < 1e-15);

        let bit = FiniteDistribution::from_multiset(&[0u8, 1]).unwrap();
        let j = JointDistribution::from_channel(&bit, |v| FiniteDistribution::point(*v));
        assert!((mutual_information(&j) - 1.0).abs() < 1e-15);

        let all = FiniteDistribution::from_multiset(&[two("00"), two("01"), two("10"), two("11")]).unwrap();
        let j = JointDistribution::from_channel(&all, |v| FiniteDistribution::point(v.weight() > 0));
        assert!((mutual_information(&j) - 0.811_278_124_459_132_9).abs() < 1e-12);
        assert!((mutual_information_by_entropies(&j) - 0.811_278_124_459_132_9).abs() < 1e-12);
    }

    #[test]
    fn reverse_pinsker_examples() {
        let p = d(&[(1, 2), (1, 2)]);
        assert_eq!(reverse_pinsker_bound(&p, &p).unwrap(), 0.0);
        let point = d(&[(1, 1), (0, 1)]);
        assert!((reverse_pinsker_bound(&point, &p).unwrap() - 1.0).abs() < 1e-15);
        assert!((kl_divergence(&point, &p) - 1.0).abs() < 1e-15);
        assert!(matches!(reverse_pinsker_bound(&p, &point), Err(Error::UndefinedBound(_))));
    }

    #[test]
    fn sampling() {
        assert_eq!(FiniteDistribution::point('a').sample(99), 'a');
        let coin = d(&[(1, 2), (1, 2)]);
        let ones = (0..10_000u64).filter(|s| coin.sample(*s) == 1).count();
        assert!((ones as f64 / 10_000.0 - 0.5).abs() < 0.02);
        assert_eq!(coin.sample(5), coin.sample(5));
    }

    #[test]
    fn conditional_rejects_null_events() {
        let p = d(&[(1, 4), (3, 4)]);
        assert_eq!(p.conditional(|o| *o == 1).unwrap().mass(&1), rat(1, 1));
        assert!(p.conditional(|o| *o == 7).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = d(&[(1, 3), (2, 3)]);
        let v = to_json(&p);
        assert_eq!(v[1]["numerator"], 2);
        assert_eq!(from_json::<usize>(&v).unwrap(), p);
    }
}
