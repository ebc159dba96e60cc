//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use lossylab::RunReport;
use lossylab_core::crypto::{efi_decide, efi_pair, owf_dichotomy, restricted_supports, InverterStrategy};
use lossylab_core::disguise::{
    build_disguising_collection, game_value, ly_sparsify, ly_support_size, sparsified_trial, DisguiseCollection, DisguiseParams,
    PayoffMatrix, Player,
};
use lossylab_core::information::{
    kl_divergence, mutual_information, reverse_pinsker_bound, statistical_distance, FiniteDistribution, JointDistribution, LOG_TOL,
};
use lossylab_core::params::{delta, gap_dichotomy_theta, ksat_params, lossiness_bound_wcdist, regime_check, theta_report, RegimeInputs};
use lossylab_core::problems::{builtin_problem, BitString, Instance, PromiseProblem};
use lossylab_core::rational::{self, int, rat};
use lossylab_core::reductions::{
    encoding_check, mild_lossiness_with_mode, p_of_f, wc_dist_distance, Center, LossinessMode, PermInvariantF, RandomizedEncoding,
    StochasticReduction,
};
use lossylab_core::rng::{self, Rng};
use lossylab_core::szk::{all_advice, polarize, szk_gap_report, xor_pair, SzkClaims, SzkContext};
use lossylab_core::Rational;
use num::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng as _;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn core<T>(r: lossylab_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

const SEED: u64 = 0x5eed_2024;

fn stream(name: &str) -> Rng {
    rng::stream(SEED, rng::label(name))
}

fn delta_formula(ell: f64, m: usize) -> f64 {
    let m = m as f64;
    (ell * std::f64::consts::LN_2 / (2.0 * m)).sqrt().min(1.0 - (-ell / m - 2.0).exp2())
}

fn parity2() -> PromiseProblem {
    builtin_problem("parity", 2).unwrap()
}

struct Fixture {
    name: String,
    problem: PromiseProblem,
    reduction: StochasticReduction,
    f: PermInvariantF,
}

impl Fixture {
    fn parity(name: &str, f: PermInvariantF, flip: Rational) -> Self {
        Fixture {
            name: name.into(),
            problem: parity2(),
            reduction: StochasticReduction::f_of_parity(f.clone(), 2, flip).unwrap(),
            f,
        }
    }

    fn m(&self) -> usize {
        self.reduction.arity()
    }

    fn split(&self) -> (usize, usize) {
        let p = p_of_f(&self.f).unwrap();
        (self.m() - p, p - 1)
    }

    fn collection(&self, d: usize, eps: f64, ell: f64, seed: u64) -> Result<DisguiseCollection, String> {
        let (m0, m1) = self.split();
        let params = DisguiseParams { m0, m1, d, eps, ell, seed };
        core(build_disguising_collection(&self.reduction, self.problem.no_set(), self.problem.yes_set(), &params))
    }

    fn context(&self, d: usize, eps: f64, ell: f64, seed: u64) -> Result<SzkContext, String> {
        let c = self.collection(d, eps, ell, seed)?;
        core(SzkContext::new(self.reduction.clone(), self.problem.clone(), self.f.clone(), c))
    }
}

fn tuples(points: &[Instance], m: usize) -> Vec<Vec<Instance>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out.iter().flat_map(|t| points.iter().map(move |x| [t.as_slice(), &[*x]].concat())).collect();
    }
    out
}

fn random_row(g: &mut Rng, k: usize) -> Vec<Rational> {
    let mut w: Vec<i64> = (0..k).map(|_| g.random_range(0..=4)).collect();
    if w.iter().all(|&x| x == 0) {
        w[g.random_range(0..k)] = 1;
    }
    let total: i64 = w.iter().sum();
    w.iter().map(|&x| rat(x, total)).collect()
}

fn random_problem(g: &mut Rng, n: u8, max0: usize, max1: usize) -> PromiseProblem {
    let mut all = BitString::all(n).unwrap();
    all.shuffle(g);
    let s0 = g.random_range(1..=max0);
    let s1 = g.random_range(1..=max1.min(all.len() - s0));
    PromiseProblem::new("random", n, all[s0..s0 + s1].to_vec(), all[..s0].to_vec()).unwrap()
}

/// Dense random kernel of arity `m` on the promise, with a random permutation-invariant f.
fn random_fixture(g: &mut Rng, i: usize) -> Fixture {
    let m = g.random_range(1..=3usize);
    let max = [5, 3, 2][m - 1];
    let problem = random_problem(g, 3, max, max);
    let k = g.random_range(2..=4usize);
    let rows: BTreeMap<Vec<Instance>, Vec<Rational>> = tuples(&problem.promise(), m).into_iter().map(|t| (t, random_row(g, k))).collect();
    let omega = (0..k).map(|w| format!("w{w}")).collect();
    let reduction = StochasticReduction::dense(m, 3, omega, rows).unwrap();
    let f = PermInvariantF::threshold(m, g.random_range(1..=m)).unwrap();
    Fixture { name: format!("random-{i}"), problem, reduction, f }
}

// ---------------------------------------------------------------- criterion 1

fn random_matrix(g: &mut Rng, max: usize) -> Vec<Vec<Rational>> {
    let (r, c) = (g.random_range(1..=max), g.random_range(1..=max));
    (0..r)
        .map(|_| {
            (0..c)
                .map(|_| {
                    let den = g.random_range(1..=12i64);
                    rat(g.random_range(0..=den), den)
                })
                .collect()
        })
        .collect()
}

fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Brute-force minimax over the 10⁻³ grid of the smaller player's simplex
/// (row player minimises). `None` when that simplex has more than 3 vertices.
fn grid_value(m: &[Vec<f64>]) -> Option<f64> {
    const STEPS: usize = 1000;
    let (rows, cols) = (m.len(), m[0].len());
    let (mat, minimize) = if rows <= cols { (m.to_vec(), true) } else { (transpose(m), false) };
    let k = mat.len();
    if k > 3 {
        return None;
    }
    let width = mat[0].len();
    let mut best = if minimize { f64::INFINITY } else { f64::NEG_INFINITY };
    let mut visit = |w: &[usize]| {
        let mut agg = if minimize { f64::NEG_INFINITY } else { f64::INFINITY };
        for j in 0..width {
            let v: f64 = w.iter().zip(&mat).map(|(&wi, row)| wi as f64 * row[j]).sum::<f64>() / STEPS as f64;
            agg = if minimize { agg.max(v) } else { agg.min(v) };
        }
        best = if minimize { best.min(agg) } else { best.max(agg) };
    };
    match k {
        1 => visit(&[STEPS]),
        2 => (0..=STEPS).for_each(|a| visit(&[a, STEPS - a])),
        _ => {
            for a in 0..=STEPS {
                for c in 0..=STEPS - a {
                    visit(&[a, c, STEPS - a - c]);
                }
            }
        }
    }
    Some(best)
}

fn solve(mut a: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        let pivot_row = a[col].clone();
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = &a[r][col] / &pivot_row[col];
                for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= &factor * p;
                }
                let sub = &factor * &rhs[col];
                rhs[r] -= sub;
            }
        }
    }
    Some((0..n).map(|i| &rhs[i] / &a[i][i]).collect())
}

/// Strategy on `rows` (and value) equalising the payoff over `cols`.
fn equalizer(m: &[Vec<Rational>], rows: &[usize], cols: &[usize]) -> Option<(Vec<Rational>, Rational)> {
    let t = rows.len();
    let mut a = Vec::with_capacity(t + 1);
    for &j in cols {
        let mut eq: Vec<Rational> = rows.iter().map(|&i| m[i][j].clone()).collect();
        eq.push(-Rational::one());
        a.push(eq);
    }
    let mut sum = vec![Rational::one(); t];
    sum.push(Rational::zero());
    a.push(sum);
    let mut rhs = vec![Rational::zero(); t];
    rhs.push(Rational::one());
    let mut x = solve(a, rhs)?;
    let v = x.pop()?;
    Some((x, v))
}

fn subsets(n: usize, t: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|s| s.count_ones() as usize == t).map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect()).collect()
}

/// Exact value by enumerating square supports (Shapley–Snow).
fn support_value(m: &[Vec<Rational>]) -> Option<Rational> {
    let (r, c) = (m.len(), m[0].len());
    let mt = transpose(m);
    for t in 1..=r.min(c) {
        for rows in subsets(r, t) {
            for cols in subsets(c, t) {
                let Some((p, v)) = equalizer(m, &rows, &cols) else { continue };
                let Some((q, w)) = equalizer(&mt, &cols, &rows) else { continue };
                if v != w || p.iter().chain(&q).any(|x| x.is_negative()) {
                    continue;
                }
                let col_payoff = |j: usize| rows.iter().zip(&p).map(|(&i, pi)| pi * &m[i][j]).sum::<Rational>();
                let row_payoff = |i: usize| cols.iter().zip(&q).map(|(&j, qj)| qj * &m[i][j]).sum::<Rational>();
                if (0..c).all(|j| col_payoff(j) <= v) && (0..r).all(|i| row_payoff(i) >= v) {
                    return Some(v);
                }
            }
        }
    }
    None
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut g = stream("c1");
    let (mut gridded, mut enumerated, mut worst) = (0, 0, 0.0f64);
    for i in 0..200 {
        let entries = random_matrix(&mut g, 6);
        let m = core(PayoffMatrix::new(entries.clone()))?;
        let sol = core(game_value(&m))?;
        let p = &sol.row.distribution;
        let q = &sol.col.distribution;
        ensure!(p.iter().all(|(_, w)| !w.is_negative()) && q.iter().all(|(_, w)| !w.is_negative()), "matrix {i}: negative mass");
        ensure!(
            m.best_column_response(p) == sol.value && m.best_row_response(q) == sol.value,
            "matrix {i}: duality fails, ω = {}",
            sol.value
        );
        let floats: Vec<Vec<f64>> = entries.iter().map(|r| r.iter().map(rational::to_f64).collect()).collect();
        match grid_value(&floats) {
            Some(v) => {
                let err = (v - rational::to_f64(&sol.value)).abs();
                worst = worst.max(err);
                ensure!(err <= 1e-3, "matrix {i}: grid {v} vs ω = {}", sol.value);
                gridded += 1;
            }
            None => {
                let v = support_value(&entries).ok_or(format!("matrix {i}: no equalising support found"))?;
                ensure!(v == sol.value, "matrix {i}: support enumeration {v} vs ω = {}", sol.value);
                enumerated += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "200 matrices, exact duality on all; grid within {worst:.2e} on {gridded} (smaller side ≤ 3); exact support enumeration on {enumerated}"
    ))
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Outcome {
    let mut g = stream("c2");
    let mut runs = 0;
    let mut methods: BTreeMap<String, usize> = BTreeMap::new();
    for i in 0..100 {
        let m = core(PayoffMatrix::new(random_matrix(&mut g, 6)))?;
        let omega = core(game_value(&m))?.value;
        for eps in [0.25, 0.5] {
            let allowed = rational::from_f64(eps) * m.range();
            for player in [Player::One, Player::Two] {
                let sp = ly_sparsify(&m, player, eps, SEED + i).map_err(|e| format!("matrix {i}, ε = {eps}, {player:?}: {e}"))?;
                let b = match player {
                    Player::One => m.cols(),
                    Player::Two => m.rows(),
                };
                let s = ((b as f64).ln() / (2.0 * eps * eps)).ceil().max(1.0) as usize;
                ensure!(sp.s == s && ly_support_size(b, eps) == s, "matrix {i}: s = {} but expected {s}", sp.s);
                let witness = sp.strategy.witness.clone().ok_or("missing witness")?;
                ensure!(witness.len() == s, "matrix {i}: witness of size {}", witness.len());
                let law = core(FiniteDistribution::from_multiset(&witness))?;
                let gap = match player {
                    Player::One => m.best_column_response(&law) - &omega,
                    Player::Two => &omega - m.best_row_response(&law),
                };
                ensure!(!gap.is_negative() && gap <= allowed, "matrix {i}, ε = {eps}, {player:?}: gap {gap} > {allowed}");
                *methods.entry(format!("{:?}", sp.method).split(' ').next().unwrap_or("").to_string()).or_default() += 1;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} sparsifications certified, 0 failures; methods {methods:?}"))
}

// ---------------------------------------------------------------- criterion 3

fn disguise_check(fx: &Fixture, d: usize, gamma: f64, seed: u64) -> Result<f64, String> {
    let rep = core(mild_lossiness_with_mode(&fx.reduction, &fx.problem, gamma, &LossinessMode::Exhaustive { limit: 20_000_000 }))?;
    ensure!(rep.exhaustive, "{}: lossiness not exhaustive", fx.name);
    let m = fx.m();
    let ell = rep.lambda * m as f64;
    let eps = gamma / 4.0;
    let c = fx.collection(d, eps, ell, seed)?;
    let bound = delta_formula(ell, m) + 2.0 * (m as f64 + 1.0) / (d as f64 + 1.0) + 2.0 * eps;
    ensure!((c.certified_bound - bound).abs() < 1e-12, "{}: certified bound {} vs {bound}", fx.name, c.certified_bound);
    let sides = fx.problem.no_set().len() + fx.problem.yes_set().len();
    ensure!(c.achieved_per_y.len() == sides, "{}: {} of {sides} instances covered", fx.name, c.achieved_per_y.len());
    let limit = rational::from_f64(bound);
    let mut worst = 0.0f64;
    for (y, v) in &c.achieved_per_y {
        ensure!(*v <= limit, "{}: y = {y} achieves {v} > {bound}", fx.name);
        worst = worst.max(rational::to_f64(v));
    }
    Ok(worst)
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let parity_or = Fixture::parity("parity-or", PermInvariantF::or(2).unwrap(), int(0));
    disguise_check(&parity_or, 2, 1.0, SEED)?;
    let c = parity_or.collection(2, 0.25, 0.0, SEED)?;
    for (y, v) in &c.achieved_per_y {
        if parity_or.problem.no_set().contains(y) {
            ensure!(v.is_zero(), "parity-or: NO instance {y} achieves {v}");
        }
    }
    let mut g = stream("c3");
    let mut worst = 0.0f64;
    let mut shapes = Vec::new();
    for i in 0..20 {
        let fx = random_fixture(&mut g, i);
        let d = g.random_range(1..=3usize);
        let gamma = [0.5, 1.0][g.random_range(0..2)];
        worst = worst.max(disguise_check(&fx, d, gamma, SEED + i as u64)?);
        shapes.push(format!("m{}|{}|{}d{d}", fx.m(), fx.problem.no_set().len(), fx.problem.yes_set().len()));
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    Ok(format!("parity-or and 20 random reductions within bound; largest achieved {worst:.4}; shapes {}", shapes.join(" ")))
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4() -> Outcome {
    let mut fixtures = vec![
        Fixture::parity("parity-or", PermInvariantF::or(2).unwrap(), int(0)),
        Fixture::parity("parity-or-noisy", PermInvariantF::or(2).unwrap(), rat(1, 10)),
        Fixture::parity("parity-and", PermInvariantF::and(2).unwrap(), int(0)),
        Fixture {
            name: "identity".into(),
            problem: parity2(),
            reduction: StochasticReduction::identity(2, 2).unwrap(),
            f: PermInvariantF::or(2).unwrap(),
        },
    ];
    let mut g = stream("c4");
    fixtures.extend((0..3).map(|i| random_fixture(&mut g, i)));
    let mut trials = 0;
    for fx in &fixtures {
        let (m0, m1) = fx.split();
        let d0 = core(FiniteDistribution::from_multiset(fx.problem.no_set()))?;
        let d1 = core(FiniteDistribution::from_multiset(fx.problem.yes_set()))?;
        for t in 0..50u64 {
            let d = 1 + (t % 3) as usize;
            let check = core(sparsified_trial(&fx.reduction, &d0, Some(&d1), m0, m1, d, SEED + t))?;
            for (label, side) in [("S₀", Some(&check.s0_side)), ("S₁", check.s1_side.as_ref())] {
                let Some(side) = side else { continue };
                let expect = Rational::new(((if label == "S₀" { 2 * m0 } else { 2 * m1 }) + 1).into(), (d + 1).into());
                ensure!(side.slack == expect, "{}: slack {} vs {expect}", fx.name, side.slack);
                ensure!(side.holds, "{} trial {t}: pointwise bound fails on {label}", fx.name);
                ensure!(side.lhs_mean <= &side.mid_mean + &side.slack, "{} trial {t}: mean bound fails on {label}", fx.name);
            }
            trials += 1;
        }
    }
    Ok(format!("{trials} trials over {} fixtures, bound holds pointwise and on average", fixtures.len()))
}

// ---------------------------------------------------------------- criterion 5

fn claims(mu: Rational, lambda: f64, gamma: f64) -> SzkClaims {
    SzkClaims { mu, lambda, gamma }
}

fn criterion_5() -> Outcome {
    let gamma = 0.25;
    let eps = gamma / 4.0;
    let d = |m: usize| ((m as f64 + 1.0) / eps).ceil() as usize;
    let perfect = Fixture::parity("parity-or", PermInvariantF::or(2).unwrap(), int(0));
    let ctx = perfect.context(d(2), eps, 0.0, SEED)?;
    let rep = core(szk_gap_report(&ctx, &claims(int(0), 0.0, gamma), SEED))?;
    ensure!(rep.yes_gap_min == Some(int(1)), "perfect yes_gap_min = {:?}", rep.yes_gap_min);
    ensure!(rep.no_gap_max == Some(int(0)), "perfect no_gap_max = {:?}", rep.no_gap_max);

    let noisy = Fixture::parity("parity-or-noisy", PermInvariantF::or(2).unwrap(), rat(1, 10));
    let ctx = noisy.context(d(2), eps, 0.0, SEED)?;
    let c = claims(rat(1, 10), 0.0, gamma);
    let rep = core(szk_gap_report(&ctx, &c, SEED))?;
    let yes = rep.yes_gap_min.clone().ok_or("noisy: no YES gap")?;
    let no = rep.no_gap_max.clone().ok_or("noisy: no NO gap")?;
    ensure!(yes >= rat(4, 5) && rep.yes_ok, "noisy yes_gap_min = {yes}");
    ensure!(rational::to_f64(&no) <= delta(0.0) + gamma && rep.no_ok, "noisy no_gap_max = {no}");

    let identity = Fixture {
        name: "identity".into(),
        problem: parity2(),
        reduction: StochasticReduction::identity(1, 2).unwrap(),
        f: PermInvariantF::or(1).unwrap(),
    };
    let ctx = identity.context(d(1), eps, 0.0, SEED)?;
    let rep_id = core(szk_gap_report(&ctx, &claims(int(0), 0.0, gamma), SEED))?;
    let id_no = rep_id.no_gap_max.clone().ok_or("identity: no NO gap")?;
    ensure!(!rep_id.no_ok, "identity control not flagged: no_gap_max = {id_no}");
    Ok(format!(
        "perfect (1, 0); noisy yes {yes} ≥ 4/5, no {no} ≤ δ+γ; identity no-gap {:.4} > {gamma} flagged",
        rational::to_f64(&id_no)
    ))
}

// ---------------------------------------------------------------- criterion 6

fn random_law(g: &mut Rng, k: usize) -> FiniteDistribution<usize> {
    FiniteDistribution::new(random_row(g, k).into_iter().enumerate()).unwrap()
}

fn criterion_6() -> Outcome {
    let mut g = stream("c6");
    let mut checks = 0;
    for i in 0..20 {
        let k = g.random_range(2..=3usize);
        let (p, q) = (random_law(&mut g, k), random_law(&mut g, k));
        let d = statistical_distance(&p, &q);
        for j in 2..=4u32 {
            let (x0, x1) = core(xor_pair(&p, &q, j))?;
            let got = statistical_distance(&x0, &x1);
            ensure!(got == num::pow(d.clone(), j as usize), "pair {i}, j = {j}: {got} vs ({d})^{j}");
            checks += 1;
        }
    }
    let target = 2f64.powi(-8);
    let mut polarized = 0;
    let mut exact = 0;
    let mut pairs: Vec<(FiniteDistribution<usize>, FiniteDistribution<usize>)> = Vec::new();
    while pairs.len() < 20 {
        let (p, q) = (random_law(&mut g, 2), random_law(&mut g, 2));
        let d = rational::to_f64(&statistical_distance(&p, &q));
        if d <= 0.25 || d >= 0.75 {
            pairs.push((p, q));
        }
    }
    pairs.push((FiniteDistribution::point(0), FiniteDistribution::point(0)));
    pairs.push((FiniteDistribution::point(0), FiniteDistribution::point(1)));
    for (p, q) in &pairs {
        let rep = core(polarize(p, q, 0.25, 0.75, 8))?;
        ensure!(rep.certified, "schedule {:?} not certified: close {:?}, far {:?}", rep.schedule, rep.close, rep.far);
        let far = rational::to_f64(&rep.input_distance) >= 0.75;
        let ok = if far { rep.predicted.lo >= 1.0 - target } else { rep.predicted.hi <= target };
        ensure!(ok, "pair at Δ = {} lands in {:?}", rep.input_distance, rep.predicted);
        if let Some(out) = &rep.output_distance {
            let v = rational::to_f64(out);
            ensure!(if far { v >= 1.0 - target } else { v <= target }, "exact output Δ = {v}");
            exact += 1;
        }
        polarized += 1;
    }
    Ok(format!("{checks} XOR steps exact; {polarized} pairs polarized to 2⁻⁸ ({exact} with exact output laws)"))
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut g = stream("c7");
    let mut tightest = f64::INFINITY;
    for i in 0..10_000 {
        let k = g.random_range(1..=8usize);
        let p = random_law(&mut g, k);
        let weights: Vec<i64> = (0..k).map(|_| g.random_range(1..=6)).collect();
        let total: i64 = weights.iter().sum();
        let q = core(FiniteDistribution::new(weights.iter().enumerate().map(|(w, &x)| (w, rat(x, total)))))?;
        let kl = kl_divergence(&p, &q);
        let bound = core(reverse_pinsker_bound(&p, &q))?;
        ensure!(kl <= bound + LOG_TOL, "pair {i}: D_KL = {kl} > {bound}");
        tightest = tightest.min(bound - kl);
    }
    let mut worst_ratio = 0.0f64;
    for i in 0..20 {
        let problem = random_problem(&mut g, 3, 4, 4);
        let k = g.random_range(2..=4usize);
        let centers = [random_row(&mut g, k), random_row(&mut g, k)];
        let t = [rat(0, 1), rat(1, 64), rat(1, 8), rat(1, 2), rat(1, 1)][i % 5].clone();
        let rows: BTreeMap<Vec<Instance>, Vec<Rational>> = problem
            .promise()
            .into_iter()
            .map(|x| {
                let c = &centers[problem.chi_bit(&x).unwrap() as usize];
                let noise = random_row(&mut g, k);
                (vec![x], c.iter().zip(&noise).map(|(a, z)| (Rational::one() - &t) * a + &t * z).collect())
            })
            .collect();
        let r = core(StochasticReduction::dense(1, 3, (0..k).map(|w| format!("w{w}")).collect(), rows))?;
        let d = core(wc_dist_distance(&r, &problem, &Center::OptimalSplit))?.d;
        let gamma = 1.0;
        let bound = lossiness_bound_wcdist(1, 3, rational::to_f64(&d), gamma);
        let sup = core(mild_lossiness_with_mode(&r, &problem, gamma, &LossinessMode::Exhaustive { limit: 1_000_000 }))?.lambda;
        ensure!(sup <= bound + LOG_TOL, "reduction {i}: sup I = {sup} > {bound} at d = {d}");
        for _ in 0..10 {
            let side = if g.random::<bool>() { problem.yes_set() } else { problem.no_set() };
            let size = g.random_range(1..=6usize);
            let items: Vec<Instance> = (0..size).map(|_| side[g.random_range(0..side.len())]).collect();
            let x = core(FiniteDistribution::from_multiset(&items))?;
            let joint = JointDistribution::from_channel(&x, |y| r.law(&[*y]).unwrap());
            let info = mutual_information(&joint);
            ensure!(info <= bound + LOG_TOL, "reduction {i}: I = {info} > {bound}");
            worst_ratio = worst_ratio.max(info / bound);
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    Ok(format!("10⁴ reverse-Pinsker pairs (min slack {tightest:.2e}); 20 WC-DIST split reductions, largest I/bound {worst_ratio:.3}"))
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8() -> Outcome {
    let re = core(RandomizedEncoding::xor(int(0)))?;
    let f: BTreeMap<Instance, bool> = core(BitString::all(2))?.into_iter().map(|x| (x, x.weight() % 2 == 1)).collect();
    let rep = core(encoding_check(&re, &f))?;
    ensure!(rep.mu.is_zero() && rep.d.is_zero(), "encoding (μ, d) = ({}, {})", rep.mu, rep.d);
    let wc = core(wc_dist_distance(&re.encoder, &parity2(), &Center::OptimalSplit))?;
    ensure!(wc.d.is_zero(), "split distance {}", wc.d);
    Ok("XOR encoding (μ, d) = (0, 0); split WC-DIST distance 0".into())
}

// ---------------------------------------------------------------- criterion 9

fn criterion_9() -> Outcome {
    let fx = Fixture::parity("parity-or", PermInvariantF::or(2).unwrap(), int(0));
    let ctx = fx.context(2, 0.25, 0.0, SEED)?;
    let c = claims(int(0), 0.0, 0.0625);
    let theta = 1.0 - c.alpha();
    let k = (64.0 / (theta * theta)).ceil() as u64;
    for run in 0..100u64 {
        let rep = core(owf_dichotomy(&ctx, &c, InverterStrategy::BruteForce, SEED + run))?;
        ensure!(rep.k == k, "run {run}: k = {} vs {k}", rep.k);
        ensure!(rep.all_correct, "run {run}: a promise instance was decided wrongly");
        for i in &rep.instances {
            let want = if i.yes { int(1) } else { int(0) };
            ensure!(i.exact_x == want, "run {run}: X({}) = {}", i.y, i.exact_x);
        }
    }
    let mut restrictions = 0;
    for (mu, flip) in [(int(0), int(0)), (rat(1, 10), rat(1, 10))] {
        let fx = Fixture::parity("parity-or", PermInvariantF::or(2).unwrap(), flip);
        let ctx = fx.context(2, 0.25, 0.0, SEED)?;
        let floor = Rational::one() - &mu * int(2);
        for (a, perm) in all_advice(&ctx) {
            for &y in fx.problem.yes_set() {
                let pair = core(ctx.circuits(a, &perm, y))?;
                let r = core(restricted_supports(&core(ctx.law(&pair.c0))?, &core(ctx.law(&pair.c1))?, &mu))?;
                ensure!(r.law0.support().all(|o| r.law1.mass(o).is_zero()), "supports overlap at y = {y}");
                ensure!(r.retained0 >= floor && r.retained1 >= floor, "retained ({}, {}) < {floor}", r.retained0, r.retained1);
                restrictions += 1;
            }
        }
    }
    Ok(format!("100 brute-force runs at k = {k} all correct, X ∈ {{1, 0}}; {restrictions} restrictions disjoint"))
}

// ---------------------------------------------------------------- criterion 10

fn criterion_10() -> Outcome {
    let gamma = 0.0625;
    let fixtures = [
        (Fixture::parity("parity-or", PermInvariantF::or(2).unwrap(), int(0)), int(0)),
        (Fixture::parity("parity-or-noisy", PermInvariantF::or(2).unwrap(), rat(1, 10)), rat(1, 10)),
        (Fixture::parity("parity-and-noisy", PermInvariantF::and(2).unwrap(), rat(1, 20)), rat(1, 20)),
    ];
    let mut lowest = 1.0f64;
    let mut decisions = 0;
    for (fx, mu) in &fixtures {
        let ctx = fx.context(2, 0.25, 0.0, SEED)?;
        let pair = core(efi_pair(&ctx, SEED))?;
        let floor = Rational::one() - mu * int(2);
        ensure!(pair.distance >= floor, "{}: D = {} < {floor}", fx.name, pair.distance);
        let c = claims(mu.clone(), 0.0, gamma);
        let nu = rational::to_f64(&statistical_distance(&pair.mixture0, &pair.mixture1));
        for z in fx.problem.promise() {
            let dec = core(efi_decide(&ctx, &c, nu, z, 10_000, SEED))?;
            let tau = nu / 4.0 - 3.0 * (delta(0.0) + gamma) / 4.0;
            ensure!((dec.tau - tau).abs() < 1e-15 && dec.k == (1.0 / (tau * tau)).ceil() as u64, "{}: τ or k mismatch", fx.name);
            ensure!(dec.rate >= 2.0 / 3.0, "{}: z = {z} correct in {:.4} of trials", fx.name, dec.rate);
            lowest = lowest.min(dec.rate);
            decisions += 1;
        }
    }
    Ok(format!("D ≥ 1−2μ on {} fixtures; {decisions} instances × 10⁴ trials, lowest rate {lowest:.4}", fixtures.len()))
}

// ---------------------------------------------------------------- criterion 11

fn criterion_11() -> Outcome {
    let d13 = delta(13.0);
    ensure!(d13 == 1.0 - 2f64.powi(-15), "δ(13) = {d13}");
    let expr = 2f64.powi(-15) - 1e-4 - 1e-5;
    let got = gap_dichotomy_theta();
    ensure!(((got - expr) / expr).abs() <= 1e-12, "gap-dichotomy θ = {got} vs {expr}");
    let rep = core(theta_report(1e-5, 13.0, 1e-5, 1))?;
    ensure!(((rep.theta_owf - expr) / expr).abs() <= 1e-12, "theta_report θ_owf = {}", rep.theta_owf);
    for lambda in 1..=20 {
        let l = lambda as f64;
        let (mu, gamma) = ((-l - 8.0).exp2(), (-l - 4.0).exp2());
        let rep = core(theta_report(mu, l, gamma, 1))?;
        ensure!(rep.theta_owf >= (-l - 3.0).exp2(), "λ = {lambda}: θ_owf = {}", rep.theta_owf);
        let regimes = regime_check(&RegimeInputs {
            t_exponent: l + 4.0,
            m_exponent: l + 2.0,
            mu,
            gamma,
            lambda: l,
            n: 16,
            d: 0.0,
            eta: 0.0,
            tau: None,
        });
        ensure!(regimes.regime("generic-lossy-owf").is_some_and(|r| r.satisfied), "λ = {lambda}: generic regime not satisfied");
    }
    let ok = core(ksat_params(3, 1.0, 64, 0.5, Some(0.386), None))?;
    ensure!(ok.s_bound_ok == Some(true), "s* = 1 ≤ 6·0.386 rejected");
    let tight = core(ksat_params(3, 2.4, 64, 0.5, Some(0.386), None))?;
    ensure!(tight.s_bound_ok == Some(false), "s* = 2.4 > 6·0.386 accepted");
    ensure!(ksat_params(3, 0.0, 64, 0.5, Some(0.386), None).is_err(), "s* = 0 accepted");
    Ok(format!("δ(13) = 1−2⁻¹⁵; θ = {got:.12e}; θ_owf ≥ 2^(−λ−3) for λ = 1..20; s*_k bound checked"))
}

// ---------------------------------------------------------------- criterion 12

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn run_cli(args: &[&str], out: &Path) -> Result<String, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_lossylab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("LOSSYLAB_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    if !matches!(status.status.code(), Some(0) | Some(1)) {
        return Err(format!("{args:?} exited with {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr)));
    }
    std::fs::read_to_string(out).map_err(|e| e.to_string())
}

fn criterion_12() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut names = Vec::new();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(scenarios_dir()).map_err(|e| e.to_string())?.map(|e| e.unwrap().path()).collect();
    entries.sort();
    for path in entries {
        let file = path.file_name().unwrap().to_string_lossy().to_string();
        let is_params = file.ends_with(".params.json");
        let p = path.to_string_lossy().to_string();
        let variants: [&[&str]; 4] = [&[], &[], &["--jobs", "1"], &["--jobs", "8"]];
        let mut outputs = Vec::new();
        for (i, extra) in variants.iter().enumerate() {
            let out = dir.path().join(format!("{file}.{i}"));
            let mut args: Vec<&str> = extra.to_vec();
            args.extend([if is_params { "params" } else { "run" }, p.as_str()]);
            let text = run_cli(&args, &out)?;
            let normalized = if is_params {
                text
            } else {
                serde_json::from_str::<RunReport>(&text).map_err(|e| format!("{file}: {e}"))?.normalized()
            };
            outputs.push(normalized);
        }
        ensure!(outputs.windows(2).all(|w| w[0] == w[1]), "{file}: normalized reports differ");
        names.push(file);
    }
    ensure!(names.len() >= 4, "only {} bundled scenarios found", names.len());
    Ok(format!("{} bundled scenarios byte-identical across 2 runs and --jobs 1/8", names.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("game oracle", criterion_1),
        ("Lipton–Young sparsification", criterion_2),
        ("extended disguising bound", criterion_3),
        ("sparsified bound", criterion_4),
        ("SZK gap", criterion_5),
        ("polarization", criterion_6),
        ("reverse Pinsker and WC-DIST lossiness", criterion_7),
        ("randomized encoding bridge", criterion_8),
        ("OWF dichotomy", criterion_9),
        ("EFI", criterion_10),
        ("parameter calculus", criterion_11),
        ("replay determinism", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.1} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.1} s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 12 criteria failed");
        std::process::exit(1);
    }
    println!("all 12 criteria passed");
}
