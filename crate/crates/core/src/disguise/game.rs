//! Exact zero-sum games: payoff matrices, optimal mixed strategies by linear
//! programming, and Lipton–Young sparsification.

use num::bigint::BigInt;
use num::traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::reductions::{multiset_count, multisets};
use crate::error::input;
use crate::information::FiniteDistribution;
use crate::lp::{maximize, Constraint, Relation};
use crate::rational::{self, Rational};
use crate::rng;
use crate::{Error, Result};

/// Player 1 picks a row and pays `M[i][j]` to Player 2, who picks a column.
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffMatrix {
    entries: Vec<Vec<Rational>>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    max: Rational,
    min: Rational,
}

impl PayoffMatrix {
    pub fn new(entries: Vec<Vec<Rational>>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        let row_labels = (0..rows).map(|i| i.to_string()).collect();
        let col_labels = (0..cols).map(|j| j.to_string()).collect();
        PayoffMatrix::labelled(entries, row_labels, col_labels)
    }

    pub fn labelled(entries: Vec<Vec<Rational>>, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        let cols = entries.first().map_or(0, Vec::len);
        if entries.is_empty() || cols == 0 {
            return Err(input("payoff matrix must be non-empty"));
        }
        if entries.iter().any(|r| r.len() != cols) {
            return Err(input("payoff matrix rows differ in length"));
        }
        if row_labels.len() != entries.len() || col_labels.len() != cols {
            return Err(input("label count differs from the matrix shape"));
        }
        let max = entries.iter().flatten().max().expect("non-empty").clone();
        let min = entries.iter().flatten().min().expect("non-empty").clone();
        Ok(PayoffMatrix { entries, row_labels, col_labels, max, min })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        PayoffMatrix::new(rows.iter().map(|r| r.iter().map(|&v| rational::int(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries[0].len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn max(&self) -> &Rational {
        &self.max
    }

    pub fn min(&self) -> &Rational {
        &self.min
    }

    pub fn range(&self) -> Rational {
        &self.max - &self.min
    }

    /// The game with the roles swapped: `−Mᵀ`.
    pub fn swapped(&self) -> PayoffMatrix {
        let entries = (0..self.cols()).map(|j| (0..self.rows()).map(|i| -&self.entries[i][j]).collect()).collect();
        PayoffMatrix::labelled(entries, self.col_labels.clone(), self.row_labels.clone()).expect("same shape transposed")
    }

    /// Largest expected payoff over columns against a row strategy.
    pub fn best_column_response(&self, p: &FiniteDistribution<usize>) -> Rational {
        (0..self.cols())
            .map(|j| p.iter().map(|(&i, w)| w * &self.entries[i][j]).sum::<Rational>())
            .max()
            .expect("non-empty")
    }

    /// Smallest expected payoff over rows against a column strategy.
    pub fn best_row_response(&self, q: &FiniteDistribution<usize>) -> Rational {
        self.entries.iter().map(|row| q.iter().map(|(&j, w)| w * &row[j]).sum::<Rational>()).min().expect("non-empty")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedStrategy {
    pub player: Player,
    pub distribution: FiniteDistribution<usize>,
    /// Sorted multiset whose uniform law is `distribution`.
    pub witness: Option<Vec<usize>>,
}

impl MixedStrategy {
    pub fn from_multiset(player: Player, mut items: Vec<usize>) -> Result<Self> {
        items.sort_unstable();
        let distribution = FiniteDistribution::from_multiset(&items)?;
        Ok(MixedStrategy { player, distribution, witness: Some(items) })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameSolution {
    pub value: Rational,
    pub row: MixedStrategy,
    pub col: MixedStrategy,
    /// max_j (PᵀM)_j for the returned row strategy.
    pub row_guarantee: Rational,
    /// min_i (MQ)_i for the returned column strategy.
    pub col_guarantee: Rational,
    pub pivots: usize,
}

/// Exact value and optimal strategies. With `c` making every entry positive,
/// solves `max Σx s.t. (M + c)ᵀx ≤ 1, x ≥ 0`; then `ω = 1/Σx − c`,
/// `P = x/Σx`, and `Q` is the normalised dual.
pub fn game_value(m: &PayoffMatrix) -> Result<GameSolution> {
    let shift = Rational::one() - m.min();
    let (rows, cols) = (m.rows(), m.cols());
    let constraints: Vec<Constraint> = (0..cols)
        .map(|j| Constraint::new((0..rows).map(|i| m.get(i, j) + &shift).collect(), Relation::Le, Rational::one()))
        .collect();
    let sol = maximize(&vec![Rational::one(); rows], &constraints)?;
    if sol.value.is_zero() {
        return Err(Error::Lp("game LP returned a zero optimum".into()));
    }
    let dual_total: Rational = sol.duals.iter().sum();
    if dual_total != sol.value {
        return Err(Error::Lp(format!("game LP duality gap: primal {} vs dual {dual_total}", sol.value)));
    }
    let value = sol.value.recip() - &shift;
    let p = FiniteDistribution::new(sol.x.iter().enumerate().map(|(i, x)| (i, x / &sol.value)))?;
    let q = FiniteDistribution::new(sol.duals.iter().enumerate().map(|(j, y)| (j, y / &dual_total)))?;
    let row_guarantee = m.best_column_response(&p);
    let col_guarantee = m.best_row_response(&q);
    if row_guarantee != value || col_guarantee != value {
        return Err(Error::Certification(format!(
            "minimax check failed: ω = {value}, row guarantee {row_guarantee}, column guarantee {col_guarantee}"
        )));
    }
    Ok(GameSolution {
        value,
        row: MixedStrategy { player: Player::One, distribution: p, witness: None },
        col: MixedStrategy { player: Player::Two, distribution: q, witness: None },
        row_guarantee,
        col_guarantee,
        pivots: sol.pivots,
    })
}

/// How a sparse strategy was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SparsifyMethod {
    Sampled { attempt: u32 },
    Exhaustive,
    Rounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sparsified {
    pub strategy: MixedStrategy,
    pub s: usize,
    pub value: Rational,
    /// Worst-case payoff of the sparse strategy against every opponent pure strategy.
    pub guarantee: Rational,
    /// |guarantee − ω|.
    pub gap: Rational,
    /// ε·(M_max − M_min).
    pub allowed: Rational,
    pub method: SparsifyMethod,
}

pub const SAMPLING_ATTEMPTS: u32 = 64;
pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000;

/// `s = max(1, ⌈ln b / (2ε²)⌉)` with `b` the opponent's number of pure strategies.
pub fn ly_support_size(opponent_strategies: usize, eps: f64) -> usize {
    ((opponent_strategies as f64).ln() / (2.0 * eps * eps)).ceil().max(1.0) as usize
}

/// An s-uniform strategy for `player` within `ε·range` of the game value,
/// verified exactly against every opponent pure strategy. Among passing
/// sampled candidates the one with the best guarantee is kept.
pub fn ly_sparsify(m: &PayoffMatrix, player: Player, eps: f64, seed: u64) -> Result<Sparsified> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Parameter(format!("ε must lie in (0, 1], got {eps}")));
    }
    let game = match player {
        Player::One => m.clone(),
        Player::Two => m.swapped(),
    };
    let solution = game_value(&game)?;
    let s = ly_support_size(game.cols(), eps);
    let allowed = rational::from_f64(eps) * game.range();
    let check = |items: &[usize]| -> Result<Option<Rational>> {
        let d = FiniteDistribution::from_multiset(items)?;
        let g = game.best_column_response(&d);
        Ok((&g - &solution.value <= allowed).then_some(g))
    };
    let finish = |items: Vec<usize>, guarantee: Rational, method: SparsifyMethod| -> Result<Sparsified> {
        let gap = &guarantee - &solution.value;
        let (value, guarantee) = match player {
            Player::One => (solution.value.clone(), guarantee),
            Player::Two => (-&solution.value, -guarantee),
        };
        Ok(Sparsified { strategy: MixedStrategy::from_multiset(player, items)?, s, value, guarantee, gap, allowed: allowed.clone(), method })
    };

    let sampler = solution.row.distribution.sampler();
    let mut best: Option<(Rational, Vec<usize>, u32)> = None;
    for attempt in 0..SAMPLING_ATTEMPTS {
        let mut g = rng::stream(seed, attempt as u64);
        let mut items: Vec<usize> = (0..s).map(|_| sampler.sample(&mut g)).collect();
        items.sort_unstable();
        if let Some(guarantee) = check(&items)? {
            if best.as_ref().is_none_or(|(b, _, _)| guarantee < *b) {
                best = Some((guarantee, items, attempt));
            }
        }
    }
    if let Some((guarantee, items, attempt)) = best {
        return finish(items, guarantee, SparsifyMethod::Sampled { attempt });
    }
    let support: Vec<usize> = solution.row.distribution.support().copied().collect();
    if multiset_count(support.len(), s) <= EXHAUSTIVE_LIMIT {
        for ms in multisets(support.len(), s) {
            let items: Vec<usize> = ms.iter().map(|&i| support[i]).collect();
            if let Some(guarantee) = check(&items)? {
                return finish(items, guarantee, SparsifyMethod::Exhaustive);
            }
        }
    }
    let items = largest_remainder(&solution.row.distribution, s);
    if let Some(guarantee) = check(&items)? {
        return finish(items, guarantee, SparsifyMethod::Rounded);
    }
    Err(Error::Certification(format!(
        "no {s}-uniform strategy within ε·range = {allowed} of ω = {} found by sampling, exhaustive search or rounding",
        solution.value
    )))
}

/// Rounds `p·s` to integer counts summing to `s`, largest fractional parts first.
fn largest_remainder(p: &FiniteDistribution<usize>, s: usize) -> Vec<usize> {
    let total = BigInt::from(s);
    let mut counts: Vec<(usize, BigInt, Rational)> = p
        .iter()
        .map(|(&i, w)| {
            let scaled = w * &total;
            let floor = scaled.floor().to_integer();
            (i, floor.clone(), scaled - Rational::from_integer(floor))
        })
        .collect();
    let assigned: BigInt = counts.iter().map(|(_, c, _)| c.clone()).sum();
    let mut missing = total - assigned;
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| counts[b].2.cmp(&counts[a].2).then(a.cmp(&b)));
    for k in order {
        if missing <= BigInt::zero() {
            break;
        }
        counts[k].1 += 1;
        missing -= 1;
    }
    let mut items = Vec::with_capacity(s);
    for (i, c, _) in counts {
        let c: usize = c.try_into().expect("count below s");
        items.extend(std::iter::repeat_n(i, c));
    }
    items
}
