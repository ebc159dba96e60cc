//! Integer-scaled kernel tables and exact output laws of slot-wise sampling.
//!
//! A [`KernelTable`] stores every row of a reduction over a fixed point set as
//! integers over one common denominator. An output law of "draw each input slot
//! from its own multiset, permute, apply the kernel" is then an integer vector
//! over a known denominator, so distances reduce to integer sums.

use itertools::Itertools;
use num::bigint::BigInt;
use num::traits::{Signed, ToPrimitive, Zero};

use super::StochasticReduction;
use crate::error::infeasible;
use crate::information::FiniteDistribution;
use crate::problems::Instance;
use crate::rational::{self, lcm_denominators, Rational};
use crate::{Error, Result};

/// Largest number of table cells (tuples × |Ω|) materialised.
pub const TABLE_CELL_LIMIT: u128 = 1 << 24;

#[derive(Clone, Debug)]
pub struct KernelTable {
    arity: usize,
    points: Vec<Instance>,
    omega_len: usize,
    den: i128,
    rows: Vec<i128>,
}

impl KernelTable {
    pub fn build(r: &StochasticReduction, points: &[Instance]) -> Result<Self> {
        let mut points = points.to_vec();
        points.sort();
        points.dedup();
        let tuples = (points.len() as u128).checked_pow(r.arity() as u32).unwrap_or(u128::MAX);
        let cells = tuples.saturating_mul(r.omega().len() as u128);
        if cells > TABLE_CELL_LIMIT {
            return Err(infeasible("kernel table", cells, TABLE_CELL_LIMIT));
        }
        let tuples = tuples as usize;
        let mut rational_rows = Vec::with_capacity(tuples);
        let mut tuple = vec![points[0]; r.arity()];
        for t in 0..tuples {
            decode(t, points.len(), &mut tuple, &points);
            rational_rows.push(r.row(&tuple)?);
        }
        let den = lcm_denominators(rational_rows.iter().flatten());
        let den_i = rational::to_i128(&den, "kernel common denominator")?;
        if den_i > (1i128 << 62) {
            return Err(Error::Overflow("kernel common denominator".into()));
        }
        let rows = rational_rows
            .iter()
            .flatten()
            .map(|p| rational::scaled(p, &den).to_i128().expect("bounded by denominator"))
            .collect();
        Ok(KernelTable { arity: r.arity(), points, omega_len: r.omega().len(), den: den_i, rows })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn points(&self) -> &[Instance] {
        &self.points
    }

    pub fn omega_len(&self) -> usize {
        self.omega_len
    }

    /// Common denominator of all rows.
    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn tuple_count(&self) -> usize {
        self.rows.len() / self.omega_len
    }

    pub fn index_of(&self, x: &Instance) -> Option<usize> {
        self.points.binary_search(x).ok()
    }

    pub fn indices_of(&self, xs: &[Instance]) -> Result<Vec<usize>> {
        xs.iter()
            .map(|x| self.index_of(x).ok_or_else(|| Error::Input(format!("instance {x} is not a table point"))))
            .collect()
    }

    /// Mixed-radix index of a tuple of point indices (first coordinate most significant).
    pub fn tuple_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points.len() + i)
    }

    pub fn tuple(&self, t: usize) -> Vec<Instance> {
        let mut out = vec![self.points[0]; self.arity];
        decode(t, self.points.len(), &mut out, &self.points);
        out
    }

    pub fn tuple_indices(&self, mut t: usize) -> Vec<usize> {
        let k = self.points.len();
        let mut out = vec![0; self.arity];
        for slot in out.iter_mut().rev() {
            *slot = t % k;
            t /= k;
        }
        out
    }

    /// Scaled row: masses times [`den`](Self::den).
    pub fn row(&self, t: usize) -> &[i128] {
        &self.rows[t * self.omega_len..(t + 1) * self.omega_len]
    }

    pub fn row_rational(&self, t: usize) -> Vec<Rational> {
        let den = BigInt::from(self.den);
        self.row(t).iter().map(|&v| Rational::new(BigInt::from(v), den.clone())).collect()
    }

    pub fn row_law(&self, t: usize) -> ScaledLaw {
        ScaledLaw { num: self.row(t).to_vec(), den: self.den }
    }
}

fn decode(mut t: usize, k: usize, out: &mut [Instance], points: &[Instance]) {
    for slot in out.iter_mut().rev() {
        *slot = points[t % k];
        t /= k;
    }
}

/// Input distribution of one slot: integer weights over point indices with denominator `den`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub support: Vec<(usize, i128)>,
    pub den: i128,
}

impl Slot {
    pub fn point(i: usize) -> Self {
        Slot { support: vec![(i, 1)], den: 1 }
    }

    /// Uniform over a multiset of point indices.
    pub fn multiset(items: &[usize]) -> Self {
        let mut support: Vec<(usize, i128)> = Vec::new();
        for &i in items.iter().sorted() {
            match support.last_mut() {
                Some((j, c)) if *j == i => *c += 1,
                _ => support.push((i, 1)),
            }
        }
        Slot { support, den: items.len() as i128 }
    }

    pub fn from_distribution(table: &KernelTable, d: &FiniteDistribution<Instance>) -> Result<Self> {
        let den = lcm_denominators(d.iter().map(|(_, p)| p));
        let den_i = rational::to_i128(&den, "slot denominator")?;
        let mut support = Vec::new();
        for (x, p) in d.iter() {
            if p.is_zero() {
                continue;
            }
            let i = table.index_of(x).ok_or_else(|| Error::Input(format!("instance {x} is not a table point")))?;
            support.push((i, rational::scaled(p, &den).to_i128().expect("bounded")));
        }
        Ok(Slot { support, den: den_i })
    }
}

/// Integer masses over a common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledLaw {
    pub num: Vec<i128>,
    pub den: i128,
}

impl ScaledLaw {
    /// Exact statistical distance.
    pub fn distance(&self, other: &ScaledLaw) -> Rational {
        if self.den == other.den {
            return Rational::new(BigInt::from(l1(&self.num, &other.num)), BigInt::from(2 * self.den));
        }
        let total: BigInt = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| (BigInt::from(*a) * other.den - BigInt::from(*b) * self.den).abs())
            .sum::<BigInt>();
        Rational::new(total, BigInt::from(2) * self.den * other.den)
    }

    /// Rescale to denominator `den`, a multiple of the current one.
    pub fn rescaled(&self, den: i128) -> ScaledLaw {
        debug_assert_eq!(den % self.den, 0);
        let f = den / self.den;
        ScaledLaw { num: self.num.iter().map(|v| v * f).collect(), den }
    }

    pub fn to_distribution(&self) -> FiniteDistribution<usize> {
        let den = BigInt::from(self.den);
        FiniteDistribution::new(self.num.iter().enumerate().map(|(i, &v)| (i, Rational::new(BigInt::from(v), den.clone()))))
            .expect("scaled law sums to its denominator")
    }

    pub fn mass(&self, w: usize) -> Rational {
        Rational::new(BigInt::from(self.num[w]), BigInt::from(self.den))
    }
}

/// Σ|a − b| for equal-length integer vectors.
pub fn l1(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Law of `R(π(z₁,…,z_m))` where slot `j` draws `z_j` independently and output
/// position `i` receives `z_{perm[i]}`.
pub fn output_law(table: &KernelTable, slots: &[Slot], perm: &[usize]) -> Result<ScaledLaw> {
    let m = table.arity;
    if slots.len() != m || perm.len() != m {
        return Err(Error::Input(format!("expected {m} slots and a permutation of {m}")));
    }
    let mut den = table.den;
    for s in slots {
        den = den.checked_mul(s.den).ok_or_else(|| Error::Overflow("output law denominator".into()))?;
    }
    if den > (1i128 << 100) {
        return Err(Error::Overflow("output law denominator".into()));
    }
    let k = table.points.len();
    let mut out = vec![0i128; table.omega_len];
    let mut choice = vec![0usize; m];
    'outer: loop {
        let t = perm.iter().fold(0usize, |acc, &j| acc * k + slots[j].support[choice[j]].0);
        let weight: i128 = slots.iter().zip(&choice).map(|(s, &c)| s.support[c].1).product();
        if weight != 0 {
            for (o, v) in out.iter_mut().zip(table.row(t)) {
                *o += weight * v;
            }
        }
        for j in (0..m).rev() {
            choice[j] += 1;
            if choice[j] < slots[j].support.len() {
                continue 'outer;
            }
            choice[j] = 0;
        }
        break;
    }
    Ok(ScaledLaw { num: out, den })
}

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    (0..m).permutations(m).collect()
}

/// All size-`size` multisets of `0..k` as sorted index lists, in lexicographic order.
pub fn multisets(k: usize, size: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..k).combinations_with_replacement(size)
}

/// Number of size-`size` multisets over `k` items, saturating.
pub fn multiset_count(k: usize, size: usize) -> u128 {
    if k == 0 {
        return u128::from(size == 0);
    }
    let mut acc: u128 = 1;
    for i in 1..=size as u128 {
        acc = match acc.checked_mul(k as u128 - 1 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    acc
}
