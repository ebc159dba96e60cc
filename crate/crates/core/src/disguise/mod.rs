//! Distributional stability and disguising collections.
//!
//! A disguising collection is a sparse list of multiset pairs `(K_a, T_a)`,
//! `K_a` from `S₀` and `T_a` from `S₁`, such that pinning one slot of the
//! reduction's input to any single `y` barely moves the output law when the
//! other slots are drawn from `K_a` and `T_a`.

mod game;

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use game::{
    game_value, ly_sparsify, ly_support_size, GameSolution, MixedStrategy, PayoffMatrix, Player, Sparsified,
    SparsifyMethod, EXHAUSTIVE_LIMIT, SAMPLING_ATTEMPTS,
};

use crate::error::{infeasible, input};
use crate::information::FiniteDistribution;
use crate::problems::{BitString, Instance};
use crate::rational::{self, serde_q, Rational, RationalRepr};
use crate::reductions::{multiset_count, multisets, output_law, KernelTable, ScaledLaw, Slot, StochasticReduction};
use crate::rng;
use crate::{Error, Result};

/// `min{√(ℓ ln2 / 2m), 1 − 2^(−ℓ/m − 2)}`.
pub fn delta_of(ell: f64, m: u32) -> f64 {
    let m = m.max(1) as f64;
    let a = (ell * std::f64::consts::LN_2 / (2.0 * m)).sqrt();
    let b = 1.0 - (-(ell / m) - 2.0).exp2();
    a.min(b)
}

/// Largest number of `(K, T)` rows the game is built over.
pub const ROW_LIMIT: u128 = 100_000;

/// Slot role in an input arrangement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Role {
    K,
    Pinned,
    T,
}

/// Distinct orderings of `m₀` K-slots, one pinned slot and `m₁` T-slots. A
/// uniform permutation induces the uniform law over these.
fn arrangements(m0: usize, m1: usize) -> Vec<Vec<Role>> {
    fn go(left: [usize; 3], cur: &mut Vec<Role>, out: &mut Vec<Vec<Role>>) {
        if left == [0, 0, 0] {
            out.push(cur.clone());
            return;
        }
        for (k, role) in [Role::K, Role::Pinned, Role::T].into_iter().enumerate() {
            if left[k] > 0 {
                let mut next = left;
                next[k] -= 1;
                cur.push(role);
                go(next, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go([m0, 1, m1], &mut Vec::new(), &mut out);
    out
}

fn arranged_law(table: &KernelTable, roles: &[Role], k: &Slot, pinned: &Slot, t: &Slot) -> Result<ScaledLaw> {
    let slots: Vec<Slot> = roles
        .iter()
        .map(|r| match r {
            Role::K => k.clone(),
            Role::Pinned => pinned.clone(),
            Role::T => t.clone(),
        })
        .collect();
    let identity: Vec<usize> = (0..roles.len()).collect();
    output_law(table, &slots, &identity)
}

/// `E_π Δ(R(π(K^{m₀}, y, T^{m₁})), R(π(K^{m₀}, replacement, T^{m₁})))`.
fn pinned_gap(
    table: &KernelTable,
    arrangements: &[Vec<Role>],
    k: &Slot,
    t: &Slot,
    y: &Slot,
    replacement: &Slot,
) -> Result<Rational> {
    let mut total = Rational::zero();
    for roles in arrangements {
        let a = arranged_law(table, roles, k, y, t)?;
        let b = arranged_law(table, roles, k, replacement, t)?;
        total += a.distance(&b);
    }
    Ok(total / BigInt::from(arrangements.len()))
}

fn check_arity(r: &StochasticReduction, m0: usize, m1: usize) -> Result<()> {
    if m0 + m1 + 1 != r.arity() {
        return Err(input(format!("m₀ + m₁ + 1 = {} differs from the reduction arity {}", m0 + m1 + 1, r.arity())));
    }
    Ok(())
}

fn table_over(r: &StochasticReduction, sets: &[&[Instance]]) -> Result<KernelTable> {
    let points: BTreeSet<Instance> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    if points.is_empty() {
        return Err(input("no instances"));
    }
    KernelTable::build(r, &points.into_iter().collect::<Vec<_>>())
}

fn support(d: &FiniteDistribution<Instance>) -> Vec<Instance> {
    d.support().copied().collect()
}

/// `E_{y∼D₀, π} Δ(R(π(D₀^{m₀}, y, D₁^{m₁})), R(π(D₀^{m₀+1}, D₁^{m₁})))`, exactly.
/// `d1` may be omitted when `m₁ = 0`.
pub fn distributional_stability(
    r: &StochasticReduction,
    d0: &FiniteDistribution<Instance>,
    d1: Option<&FiniteDistribution<Instance>>,
    m0: usize,
    m1: usize,
) -> Result<Rational> {
    check_arity(r, m0, m1)?;
    if m1 > 0 && d1.is_none() {
        return Err(input("m₁ > 0 needs a second distribution"));
    }
    let s0 = support(d0);
    let s1 = d1.map(support).unwrap_or_default();
    let table = table_over(r, &[&s0, &s1])?;
    let k = Slot::from_distribution(&table, d0)?;
    let t = match d1 {
        Some(d) => Slot::from_distribution(&table, d)?,
        None => k.clone(),
    };
    let arr = arrangements(m0, m1);
    let mut total = Rational::zero();
    for (y, w) in d0.iter() {
        if w.is_zero() {
            continue;
        }
        let pin = Slot::point(table.index_of(y).expect("support point"));
        total += w * pinned_gap(&table, &arr, &k, &t, &pin, &k)?;
    }
    Ok(total)
}

/// One side of a [`SparsifiedCheck`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideCheck {
    /// Per held-out index `i*`: distance with the held-out sample pinned and
    /// the remaining `d` samples elsewhere.
    #[serde(with = "rational::serde_q_vec")]
    pub lhs: Vec<Rational>,
    /// The same with all `d+1` samples on the pinned side.
    #[serde(with = "rational::serde_q_vec")]
    pub mid: Vec<Rational>,
    #[serde(with = "serde_q")]
    pub slack: Rational,
    #[serde(with = "serde_q")]
    pub lhs_mean: Rational,
    #[serde(with = "serde_q")]
    pub mid_mean: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsifiedCheck {
    pub samples0: Vec<Instance>,
    pub samples1: Vec<Instance>,
    pub s0_side: SideCheck,
    pub s1_side: Option<SideCheck>,
}

/// Pointwise check, for every held-out index, that replacing the `d`-sample
/// distributions by the `d+1`-sample one on the pinned side moves the distance
/// by at most `(2m_j+1)/(d+1)`.
pub fn sparsified_check(
    r: &StochasticReduction,
    samples0: &[Instance],
    samples1: &[Instance],
    m0: usize,
    m1: usize,
) -> Result<SparsifiedCheck> {
    check_arity(r, m0, m1)?;
    let d1 = samples0.len();
    if d1 < 2 || (!samples1.is_empty() && samples1.len() != d1) || (m1 > 0 && samples1.is_empty()) {
        return Err(input("need d+1 ≥ 2 samples per side, the same count on both sides"));
    }
    let table = table_over(r, &[samples0, samples1])?;
    let idx = |xs: &[Instance]| table.indices_of(xs);
    let i0 = idx(samples0)?;
    let i1 = idx(samples1)?;
    let arr = arrangements(m0, m1);
    let without = |v: &[usize], skip: usize| -> Vec<usize> { v.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &x)| x).collect() };
    let side = |pinned_side: usize| -> Result<SideCheck> {
        let (own, mj) = if pinned_side == 0 { (&i0, m0) } else { (&i1, m1) };
        let full = Slot::multiset(own);
        let mut lhs = Vec::new();
        let mut mid = Vec::new();
        for (i_star, &own_y) in own.iter().enumerate().take(d1) {
            let y = Slot::point(own_y);
            let hat0 = Slot::multiset(&without(&i0, i_star));
            let hat1 = if i1.is_empty() { hat0.clone() } else { Slot::multiset(&without(&i1, i_star)) };
            let (l, md) = if pinned_side == 0 {
                (pinned_gap(&table, &arr, &hat0, &hat1, &y, &hat0)?, pinned_gap(&table, &arr, &full, &hat1, &y, &full)?)
            } else {
                (pinned_gap(&table, &arr, &hat0, &hat1, &y, &hat1)?, pinned_gap(&table, &arr, &hat0, &full, &y, &full)?)
            };
            lhs.push(l);
            mid.push(md);
        }
        let slack = Rational::new(BigInt::from(2 * mj + 1), BigInt::from(d1));
        let holds = lhs.iter().zip(&mid).all(|(l, md)| *l <= md + &slack);
        let n = BigInt::from(d1);
        Ok(SideCheck {
            lhs_mean: lhs.iter().sum::<Rational>() / &n,
            mid_mean: mid.iter().sum::<Rational>() / &n,
            lhs,
            mid,
            slack,
            holds,
        })
    };
    let s0_side = side(0)?;
    let s1_side = if i1.is_empty() { None } else { Some(side(1)?) };
    Ok(SparsifiedCheck { samples0: samples0.to_vec(), samples1: samples1.to_vec(), s0_side, s1_side })
}

/// [`sparsified_check`] on `d+1` seeded samples from each base distribution.
pub fn sparsified_trial(
    r: &StochasticReduction,
    d0: &FiniteDistribution<Instance>,
    d1: Option<&FiniteDistribution<Instance>>,
    m0: usize,
    m1: usize,
    d: usize,
    seed: u64,
) -> Result<SparsifiedCheck> {
    let mut g = rng::stream(seed, rng::label("sparsified"));
    let draw = |dist: &FiniteDistribution<Instance>, g: &mut rng::Rng| -> Vec<Instance> {
        let sampler = dist.sampler();
        (0..=d).map(|_| sampler.sample(g)).collect()
    };
    let samples0 = draw(d0, &mut g);
    let samples1 = d1.map(|d| draw(d, &mut g)).unwrap_or_default();
    sparsified_check(r, &samples0, &samples1, m0, m1)
}

/// Inputs of [`build_disguising_collection`] besides the reduction and sets.
#[derive(Clone, Debug, PartialEq)]
pub struct DisguiseParams {
    pub m0: usize,
    pub m1: usize,
    pub d: usize,
    pub eps: f64,
    /// Certified or assumed bound on the total I(X; R(X)) over ds-uniform
    /// split distributions, i.e. λm for a per-coordinate λ.
    pub ell: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdvicePair {
    pub k: Vec<Instance>,
    pub t: Vec<Instance>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisguiseCollection {
    pub n: u8,
    pub m: usize,
    pub m0: usize,
    pub m1: usize,
    pub d: usize,
    pub eps: f64,
    pub ell: f64,
    /// Lipton–Young support size over `S₀ ∪ S₁`.
    pub s: usize,
    /// The same with the ambient `n ln 2` in place of `ln |S₀ ∪ S₁|`.
    pub s_ambient: u128,
    pub pairs: Vec<AdvicePair>,
    pub delta: f64,
    /// δ(ℓ, m) + 2(m+1)/(d+1) + 2ε.
    pub certified_bound: f64,
    pub game_value: Option<Rational>,
    /// `max_y E_{a,π} Δ`.
    pub achieved: Option<Rational>,
    pub achieved_per_y: Vec<(Instance, Rational)>,
    pub within_bound: bool,
    /// `Π_N` (= `S₀`) is empty.
    pub b_n: bool,
    /// `Π_Y` (= `S₁`) is empty.
    pub b_y: bool,
    pub method: Option<SparsifyMethod>,
    pub rows: usize,
}

impl DisguiseCollection {
    pub fn degenerate(&self) -> bool {
        self.b_n || self.b_y
    }

    pub fn to_doc(&self) -> CollectionDoc {
        let hex = |v: &[Instance]| v.iter().map(BitString::to_hex).collect();
        CollectionDoc {
            n: self.n,
            m: self.m,
            m0: self.m0,
            m1: self.m1,
            d: self.d,
            eps: self.eps,
            ell: self.ell,
            s: self.s,
            s_ambient: self.s_ambient.to_string(),
            pairs: self.pairs.iter().map(|p| PairDoc { k: hex(&p.k), t: hex(&p.t) }).collect(),
            delta: self.delta,
            certified_bound: self.certified_bound,
            game_value: self.game_value.as_ref().map(RationalRepr::from),
            achieved: self.achieved.as_ref().map(RationalRepr::from),
            achieved_per_y: self.achieved_per_y.iter().map(|(y, v)| (y.to_hex(), RationalRepr::from(v))).collect(),
            within_bound: self.within_bound,
            b_n: self.b_n,
            b_y: self.b_y,
            method: self.method,
            rows: self.rows,
        }
    }

    pub fn from_doc(doc: &CollectionDoc) -> Result<Self> {
        let parse = |v: &[String]| v.iter().map(|h| BitString::from_hex(h, doc.n)).collect::<Result<Vec<_>>>();
        let q = |r: &RationalRepr| Rational::try_from(r.clone()).map_err(input);
        let pairs = doc
            .pairs
            .iter()
            .map(|p| Ok(AdvicePair { k: parse(&p.k)?, t: parse(&p.t)? }))
            .collect::<Result<Vec<_>>>()?;
        for p in &pairs {
            if p.k.len() != doc.d || p.t.len() != doc.d {
                return Err(input("advice multisets must have size d"));
            }
        }
        if doc.m != doc.m0 + doc.m1 + 1 {
            return Err(input("m must equal m₀ + m₁ + 1"));
        }
        Ok(DisguiseCollection {
            n: doc.n,
            m: doc.m,
            m0: doc.m0,
            m1: doc.m1,
            d: doc.d,
            eps: doc.eps,
            ell: doc.ell,
            s: doc.s,
            s_ambient: doc.s_ambient.parse().map_err(|_| input("invalid s_ambient"))?,
            pairs,
            delta: doc.delta,
            certified_bound: doc.certified_bound,
            game_value: doc.game_value.as_ref().map(q).transpose()?,
            achieved: doc.achieved.as_ref().map(q).transpose()?,
            achieved_per_y: doc
                .achieved_per_y
                .iter()
                .map(|(y, v)| Ok((BitString::from_hex(y, doc.n)?, q(v)?)))
                .collect::<Result<Vec<_>>>()?,
            within_bound: doc.within_bound,
            b_n: doc.b_n,
            b_y: doc.b_y,
            method: doc.method,
            rows: doc.rows,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_doc()).expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let doc: CollectionDoc = serde_json::from_value(v.clone()).map_err(|e| input(e.to_string()))?;
        DisguiseCollection::from_doc(&doc)
    }
}

/// JSON form of a [`DisguiseCollection`]; multisets are sorted hex lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollectionDoc {
    pub n: u8,
    pub m: usize,
    pub m0: usize,
    pub m1: usize,
    pub d: usize,
    pub eps: f64,
    pub ell: f64,
    pub s: usize,
    pub s_ambient: String,
    pub pairs: Vec<PairDoc>,
    pub delta: f64,
    pub certified_bound: f64,
    pub game_value: Option<RationalRepr>,
    pub achieved: Option<RationalRepr>,
    pub achieved_per_y: Vec<(String, RationalRepr)>,
    pub within_bound: bool,
    pub b_n: bool,
    pub b_y: bool,
    pub method: Option<SparsifyMethod>,
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDoc {
    pub k: Vec<String>,
    pub t: Vec<String>,
}

/// Payoff of the disguising game: rows are `(K, T)`, columns `y ∈ S₀ ∪ S₁`.
pub struct DisguiseGame {
    pub matrix: PayoffMatrix,
    pub rows: Vec<(Vec<usize>, Vec<usize>)>,
    pub columns: Vec<Instance>,
    pub table: KernelTable,
}

/// Builds the payoff matrix: for `y ∈ S₀` the gap against one more K-slot,
/// for `y ∈ S₁` against one more T-slot, averaged over arrangements.
pub fn disguise_game(r: &StochasticReduction, s0: &[Instance], s1: &[Instance], m0: usize, m1: usize, d: usize) -> Result<DisguiseGame> {
    check_arity(r, m0, m1)?;
    if s0.is_empty() || s1.is_empty() || d == 0 {
        return Err(input("the disguising game needs non-empty S₀, S₁ and d ≥ 1"));
    }
    if s0.iter().any(|x| s1.contains(x)) {
        return Err(input("S₀ and S₁ must be disjoint"));
    }
    let table = table_over(r, &[s0, s1])?;
    let i0 = table.indices_of(s0)?;
    let i1 = table.indices_of(s1)?;
    let count = multiset_count(i0.len(), d).saturating_mul(multiset_count(i1.len(), d));
    if count > ROW_LIMIT {
        return Err(infeasible("(K, T) strategy pairs", count, ROW_LIMIT));
    }
    let ks: Vec<Vec<usize>> = multisets(i0.len(), d).map(|m| m.iter().map(|&i| i0[i]).collect()).collect();
    let ts: Vec<Vec<usize>> = multisets(i1.len(), d).map(|m| m.iter().map(|&i| i1[i]).collect()).collect();
    let rows: Vec<(Vec<usize>, Vec<usize>)> = ks.iter().flat_map(|k| ts.iter().map(move |t| (k.clone(), t.clone()))).collect();
    let columns: Vec<(usize, bool)> = i0.iter().map(|&i| (i, false)).chain(i1.iter().map(|&i| (i, true))).collect();
    let arr = arrangements(m0, m1);
    let entries = rows
        .par_iter()
        .map(|(k, t)| {
            let (ks, ts) = (Slot::multiset(k), Slot::multiset(t));
            columns
                .iter()
                .map(|&(y, yes)| pinned_gap(&table, &arr, &ks, &ts, &Slot::point(y), if yes { &ts } else { &ks }))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let pts = table.points().to_vec();
    let show = |v: &[usize]| v.iter().map(|&i| pts[i].to_string()).collect::<Vec<_>>().join(",");
    let row_labels = rows.iter().map(|(k, t)| format!("K={{{}}} T={{{}}}", show(k), show(t))).collect();
    let col_labels = columns.iter().map(|&(i, _)| pts[i].to_string()).collect();
    let matrix = PayoffMatrix::labelled(entries, row_labels, col_labels)?;
    let columns = columns.iter().map(|&(i, _)| pts[i]).collect();
    Ok(DisguiseGame { matrix, rows, columns, table })
}

/// Solves the disguising game, sparsifies Player 1 to `s` uniform picks and
/// reports the exact achieved `max_y E_{a,π} Δ` next to the a-priori bound.
pub fn build_disguising_collection(
    r: &StochasticReduction,
    s0: &[Instance],
    s1: &[Instance],
    params: &DisguiseParams,
) -> Result<DisguiseCollection> {
    let DisguiseParams { m0, m1, d, eps, ell, seed } = *params;
    check_arity(r, m0, m1)?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Parameter(format!("ε must lie in (0, 1], got {eps}")));
    }
    if d == 0 {
        return Err(Error::Parameter("d must be positive".into()));
    }
    if ell.is_nan() || ell < 0.0 {
        return Err(Error::Parameter(format!("ℓ must be non-negative, got {ell}")));
    }
    let m = m0 + m1 + 1;
    let n = r.n();
    let delta = delta_of(ell, m as u32);
    let certified_bound = delta + 2.0 * (m as f64 + 1.0) / (d as f64 + 1.0) + 2.0 * eps;
    let s_ambient_raw = (n as f64 * std::f64::consts::LN_2 / (2.0 * eps * eps)).ceil();
    let s_ambient = if s_ambient_raw >= u128::MAX as f64 { u128::MAX } else { s_ambient_raw as u128 };
    let mut out = DisguiseCollection {
        n,
        m,
        m0,
        m1,
        d,
        eps,
        ell,
        s: ly_support_size(s0.len() + s1.len(), eps),
        s_ambient,
        pairs: Vec::new(),
        delta,
        certified_bound,
        game_value: None,
        achieved: None,
        achieved_per_y: Vec::new(),
        within_bound: true,
        b_n: s0.is_empty(),
        b_y: s1.is_empty(),
        method: None,
        rows: 0,
    };
    if out.degenerate() {
        return Ok(out);
    }
    let game = disguise_game(r, s0, s1, m0, m1, d)?;
    let sparse = ly_sparsify(&game.matrix, Player::One, eps, rng::derive(seed, rng::label("disguise")))?;
    let picks = sparse.strategy.witness.clone().expect("sparsified strategies carry a witness");
    let pts = game.table.points();
    out.pairs = picks
        .iter()
        .map(|&row| {
            let (k, t) = &game.rows[row];
            AdvicePair { k: k.iter().map(|&i| pts[i]).collect(), t: t.iter().map(|&i| pts[i]).collect() }
        })
        .collect();
    let count = BigInt::from(picks.len());
    out.achieved_per_y = game
        .columns
        .iter()
        .enumerate()
        .map(|(j, y)| (*y, picks.iter().map(|&row| game.matrix.get(row, j)).sum::<Rational>() / &count))
        .collect();
    let achieved = out.achieved_per_y.iter().map(|(_, v)| v.clone()).max().expect("non-empty columns");
    out.within_bound = achieved <= rational::from_f64(certified_bound);
    out.achieved = Some(achieved);
    out.game_value = Some(sparse.value);
    out.s = sparse.s;
    out.method = Some(sparse.method);
    out.rows = game.matrix.rows();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::builtin_problem;
    use crate::rational::{int, rat};
    use crate::reductions::PermInvariantF;

    fn b(s: &str) -> Instance {
        BitString::from_bits(s).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_of(0.0, 1), 0.0);
        assert!((delta_of(1.0, 1) - 0.5887050112577373).abs() < 1e-12);
        assert_eq!(delta_of(13.0, 1), 1.0 - 2f64.powi(-15));
    }

    #[test]
    fn arrangement_counts() {
        assert_eq!(arrangements(1, 0).len(), 2);
        assert_eq!(arrangements(1, 1).len(), 6);
        assert_eq!(arrangements(2, 1).len(), 12);
        assert_eq!(arrangements(0, 0), vec![vec![Role::Pinned]]);
    }

    #[test]
    fn stability_examples() {
        let or = PermInvariantF::or(2).unwrap();
        let r = StochasticReduction::f_of_parity(or, 2, int(0)).unwrap();
        let d0 = FiniteDistribution::from_multiset(&[b("00"), b("11")]).unwrap();
        assert_eq!(distributional_stability(&r, &d0, None, 1, 0).unwrap(), int(0));
        let c = StochasticReduction::constant(2, 2).unwrap();
        assert_eq!(distributional_stability(&c, &d0, None, 1, 0).unwrap(), int(0));
        let id = StochasticReduction::identity(2, 2).unwrap();
        assert_eq!(distributional_stability(&id, &FiniteDistribution::point(b("01")), None, 1, 0).unwrap(), int(0));
        assert_eq!(distributional_stability(&id, &d0, None, 1, 0).unwrap(), rat(1, 2));
    }

    #[test]
    fn parity_or_collection() {
        let p = builtin_problem("parity", 2).unwrap();
        let r = StochasticReduction::f_of_parity(PermInvariantF::or(2).unwrap(), 2, int(0)).unwrap();
        let params = DisguiseParams { m0: 1, m1: 0, d: 2, eps: 0.25, ell: 0.0, seed: 5 };
        let c = build_disguising_collection(&r, p.no_set(), p.yes_set(), &params).unwrap();
        assert!(!c.degenerate());
        assert!(c.within_bound);
        for (y, v) in &c.achieved_per_y {
            if p.no_set().contains(y) {
                assert_eq!(*v, int(0));
            }
        }
        let back = DisguiseCollection::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn empty_side_is_flagged() {
        let p = builtin_problem("const-yes", 2).unwrap();
        let r = StochasticReduction::constant(1, 2).unwrap();
        let params = DisguiseParams { m0: 0, m1: 0, d: 1, eps: 0.5, ell: 0.0, seed: 0 };
        let c = build_disguising_collection(&r, p.no_set(), p.yes_set(), &params).unwrap();
        assert!(c.b_n && !c.b_y && c.pairs.is_empty());
    }

    #[test]
    fn sparsified_bound_holds_pointwise() {
        let id = StochasticReduction::identity(2, 2).unwrap();
        let check = sparsified_check(&id, &[b("00"), b("11"), b("11")], &[b("01"), b("10"), b("01")], 0, 1).unwrap();
        assert!(check.s0_side.holds);
        assert!(check.s1_side.unwrap().holds);
    }
}
