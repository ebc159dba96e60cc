//! Stochastic reductions, permutation-invariant functions, and the measures
//! defined on them: distinguisher error, worst-case-to-distribution distance,
//! randomized-encoding checks, and empirical mild lossiness.

mod kernel;
mod lossiness;
mod measures;
mod turing;

use std::collections::BTreeMap;

use num::traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::input;
use crate::information::FiniteDistribution;
use crate::problems::{BitString, Instance, PromiseProblem};
use crate::rational::{self, Rational, RationalRepr};
use crate::{Error, Result};

pub use kernel::{multiset_count, multisets, permutations, output_law, KernelTable, ScaledLaw, Slot};
pub use lossiness::{mild_lossiness_estimate, mild_lossiness_with_mode, LossinessMode, LossinessReport, Side, SplitChoice};
pub use measures::{
    chebyshev_center, distinguisher_error, encoding_check, wc_dist_distance, Center, DistinguisherReport, EncodingReport,
    RandomizedEncoding, WcDistReport,
};
pub use turing::{
    simulated_distinguisher_error, turing_hint_information, CircuitTable, HintReport, TuringOutput, TuringReduction,
};

/// Boolean function of `m` bits that depends only on the Hamming weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermInvariantF {
    profile: Vec<bool>,
}

impl PermInvariantF {
    /// `profile[i]` is the value on inputs with `i` ones.
    pub fn new(profile: Vec<bool>) -> Result<Self> {
        if profile.len() < 2 {
            return Err(input("a permutation-invariant function needs arity ≥ 1"));
        }
        if profile.iter().all(|b| *b == profile[0]) {
            return Err(Error::Domain("constant function".into()));
        }
        Ok(PermInvariantF { profile })
    }

    fn from_weight(m: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        PermInvariantF::new((0..=m).map(f).collect())
    }

    pub fn or(m: usize) -> Result<Self> {
        Self::from_weight(m, |w| w > 0)
    }

    pub fn and(m: usize) -> Result<Self> {
        Self::from_weight(m, |w| w == m)
    }

    pub fn parity(m: usize) -> Result<Self> {
        Self::from_weight(m, |w| w % 2 == 1)
    }

    pub fn majority(m: usize) -> Result<Self> {
        Self::from_weight(m, |w| 2 * w > m)
    }

    /// 1 iff at least `k` ones.
    pub fn threshold(m: usize, k: usize) -> Result<Self> {
        Self::from_weight(m, |w| w >= k)
    }

    /// 1 iff the weight is not divisible by `k`; `mod_k(m, 2)` is parity.
    pub fn mod_k(m: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(input("MOD_0 is undefined"));
        }
        Self::from_weight(m, |w| w % k != 0)
    }

    /// Parse `or`, `and`, `parity`, `majority`, `threshold:k`, `mod:k`, or a
    /// literal profile such as `0111`.
    pub fn parse(name: &str, m: usize) -> Result<Self> {
        match name {
            "or" => Self::or(m),
            "and" => Self::and(m),
            "parity" | "xor" => Self::parity(m),
            "majority" | "maj" => Self::majority(m),
            _ => {
                if let Some(k) = name.strip_prefix("threshold:") {
                    return Self::threshold(m, k.parse().map_err(|_| input(format!("bad threshold {k:?}")))?);
                }
                if let Some(k) = name.strip_prefix("mod:") {
                    return Self::mod_k(m, k.parse().map_err(|_| input(format!("bad modulus {k:?}")))?);
                }
                if name.len() == m + 1 && name.chars().all(|c| c == '0' || c == '1') {
                    return Self::new(name.chars().map(|c| c == '1').collect());
                }
                Err(input(format!("unknown function {name:?} of arity {m}")))
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.profile.len() - 1
    }

    pub fn profile(&self) -> &[bool] {
        &self.profile
    }

    pub fn on_weight(&self, w: usize) -> bool {
        self.profile[w]
    }

    pub fn evaluate(&self, bits: &[bool]) -> Result<bool> {
        if bits.len() != self.arity() {
            return Err(input(format!("f has arity {} but got {} bits", self.arity(), bits.len())));
        }
        Ok(self.profile[bits.iter().filter(|b| **b).count()])
    }
}

pub fn evaluate_f(f: &PermInvariantF, bits: &[bool]) -> Result<bool> {
    f.evaluate(bits)
}

/// Smallest `p` with `f` equal to 0 on weight `p−1` and 1 on weight `p`.
pub fn p_of_f(f: &PermInvariantF) -> Result<usize> {
    (1..=f.arity())
        .find(|&p| !f.profile[p - 1] && f.profile[p])
        .ok_or_else(|| Error::Domain("f never switches from 0 to 1 as the weight grows".into()))
}

/// f(χ(x₁), …, χ(x_m)) on a promise tuple.
pub fn f_of_chi(f: &PermInvariantF, problem: &PromiseProblem, tuple: &[Instance]) -> Result<bool> {
    let bits = tuple.iter().map(|x| problem.chi_bit(x)).collect::<Result<Vec<_>>>()?;
    f.evaluate(&bits)
}

/// Procedurally defined kernels.
#[derive(Clone, Debug, PartialEq)]
pub enum Builtin {
    /// `f(parity(x₁), …, parity(x_m))` as one bit, flipped with probability `flip`.
    FOfParity { f: PermInvariantF, flip: Rational },
    /// `f(χ(x₁), …, χ(x_m))` for a fixed problem, flipped with probability `flip`.
    FOfChi { f: PermInvariantF, problem: PromiseProblem, flip: Rational },
    /// Outputs the input tuple itself.
    Identity,
    /// Ignores the input.
    Constant,
    /// `(x₁⊕r, x₂⊕r)` for a uniform bit `r`, first output bit flipped with probability `noise`.
    XorEncoding { noise: Rational },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Kernel {
    Dense(BTreeMap<Vec<Instance>, Vec<Rational>>),
    Builtin(Builtin),
}

/// A map from `m`-tuples of `n`-bit instances to distributions over `Ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticReduction {
    arity: usize,
    n: u8,
    omega: Vec<String>,
    kernel: Kernel,
    runtime: String,
}

const IDENTITY_OMEGA_CAP: u32 = 16;

impl StochasticReduction {
    /// Dense kernel; every row must be a distribution over `omega`.
    pub fn dense(arity: usize, n: u8, omega: Vec<String>, rows: BTreeMap<Vec<Instance>, Vec<Rational>>) -> Result<Self> {
        if arity == 0 {
            return Err(input("arity must be positive"));
        }
        for (tuple, row) in &rows {
            check_tuple(arity, n, tuple)?;
            if row.len() != omega.len() {
                return Err(input(format!("row for {} has {} masses but |Ω| = {}", show(tuple), row.len(), omega.len())));
            }
            validate_row(row).map_err(|e| input(format!("row for {}: {e}", show(tuple))))?;
        }
        Ok(StochasticReduction { arity, n, omega, kernel: Kernel::Dense(rows), runtime: "dense".into() })
    }

    pub fn builtin(arity: usize, n: u8, kernel: Builtin) -> Result<Self> {
        if arity == 0 {
            return Err(input("arity must be positive"));
        }
        let omega: Vec<String> = match &kernel {
            Builtin::FOfParity { f, flip } | Builtin::FOfChi { f, flip, .. } => {
                if f.arity() != arity {
                    return Err(input(format!("f has arity {} but the reduction has arity {arity}", f.arity())));
                }
                check_probability(flip)?;
                if let Builtin::FOfChi { problem, .. } = &kernel {
                    if problem.n() != n {
                        return Err(input("problem length differs from reduction input length"));
                    }
                }
                vec!["0".into(), "1".into()]
            }
            Builtin::Identity => {
                let bits = n as u32 * arity as u32;
                if bits > IDENTITY_OMEGA_CAP {
                    return Err(crate::error::infeasible("identity output alphabet", 1u128 << bits, 1u128 << IDENTITY_OMEGA_CAP));
                }
                (0..(1u32 << bits))
                    .map(|v| {
                        (0..arity)
                            .map(|i| {
                                let part = (v >> (n as u32 * (arity - 1 - i) as u32)) & ((1u32 << n) - 1);
                                BitString::new(part, n).expect("fits").to_string()
                            })
                            .collect::<Vec<_>>()
                            .join(",")
                    })
                    .collect()
            }
            Builtin::Constant => vec!["c".into()],
            Builtin::XorEncoding { noise } => {
                if arity != 1 || n != 2 {
                    return Err(input("the XOR encoding takes one 2-bit input"));
                }
                check_probability(noise)?;
                vec!["00".into(), "01".into(), "10".into(), "11".into()]
            }
        };
        let runtime = match &kernel {
            Builtin::FOfParity { .. } | Builtin::FOfChi { .. } => "O(mn)",
            Builtin::Identity => "O(mn)",
            Builtin::Constant => "O(1)",
            Builtin::XorEncoding { .. } => "O(n)",
        };
        Ok(StochasticReduction { arity, n, omega, kernel: Kernel::Builtin(kernel), runtime: runtime.into() })
    }

    /// `f(parity(x₁), …)` with output flip probability `flip`.
    pub fn f_of_parity(f: PermInvariantF, n: u8, flip: Rational) -> Result<Self> {
        Self::builtin(f.arity(), n, Builtin::FOfParity { f, flip })
    }

    pub fn f_of_chi(f: PermInvariantF, problem: &PromiseProblem, flip: Rational) -> Result<Self> {
        Self::builtin(f.arity(), problem.n(), Builtin::FOfChi { f, problem: problem.clone(), flip })
    }

    pub fn identity(arity: usize, n: u8) -> Result<Self> {
        Self::builtin(arity, n, Builtin::Identity)
    }

    pub fn constant(arity: usize, n: u8) -> Result<Self> {
        Self::builtin(arity, n, Builtin::Constant)
    }

    pub fn xor_encoding(noise: Rational) -> Result<Self> {
        Self::builtin(1, 2, Builtin::XorEncoding { noise })
    }

    pub fn with_runtime(mut self, label: impl Into<String>) -> Self {
        self.runtime = label.into();
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn omega(&self) -> &[String] {
        &self.omega
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn runtime(&self) -> &str {
        &self.runtime
    }

    /// Exact output law on `tuple`, as masses indexed like `omega`.
    pub fn row(&self, tuple: &[Instance]) -> Result<Vec<Rational>> {
        check_tuple(self.arity, self.n, tuple)?;
        let bit_row = |v: bool, flip: &Rational| {
            let (hit, miss) = (Rational::one() - flip, flip.clone());
            if v {
                vec![miss, hit]
            } else {
                vec![hit, miss]
            }
        };
        match &self.kernel {
            Kernel::Dense(rows) => {
                rows.get(tuple).cloned().ok_or_else(|| input(format!("dense kernel has no row for {}", show(tuple))))
            }
            Kernel::Builtin(Builtin::FOfParity { f, flip }) => {
                let bits: Vec<bool> = tuple.iter().map(|x| x.weight() % 2 == 1).collect();
                Ok(bit_row(f.evaluate(&bits)?, flip))
            }
            Kernel::Builtin(Builtin::FOfChi { f, problem, flip }) => Ok(bit_row(f_of_chi(f, problem, tuple)?, flip)),
            Kernel::Builtin(Builtin::Identity) => {
                let idx = tuple.iter().fold(0usize, |acc, x| (acc << self.n) | x.value() as usize);
                let mut row = vec![Rational::zero(); self.omega.len()];
                row[idx] = Rational::one();
                Ok(row)
            }
            Kernel::Builtin(Builtin::Constant) => Ok(vec![Rational::one()]),
            Kernel::Builtin(Builtin::XorEncoding { noise }) => {
                let x = tuple[0];
                let half = rational::rat(1, 2);
                let mut row = vec![Rational::zero(); 4];
                for r in [false, true] {
                    let b1 = x.bit(0) ^ r;
                    let b2 = x.bit(1) ^ r;
                    let clean = 2 * b1 as usize + b2 as usize;
                    let flipped = 2 * (!b1) as usize + b2 as usize;
                    row[clean] += &half * (Rational::one() - noise);
                    row[flipped] += &half * noise;
                }
                Ok(row)
            }
        }
    }

    pub fn law(&self, tuple: &[Instance]) -> Result<FiniteDistribution<usize>> {
        FiniteDistribution::new(self.row(tuple)?.into_iter().enumerate())
    }

    /// Dense copy restricted to tuples over `points`.
    pub fn to_dense(&self, points: &[Instance]) -> Result<Self> {
        let table = KernelTable::build(self, points)?;
        let mut rows = BTreeMap::new();
        for t in 0..table.tuple_count() {
            rows.insert(table.tuple(t), table.row_rational(t));
        }
        Ok(StochasticReduction {
            arity: self.arity,
            n: self.n,
            omega: self.omega.clone(),
            kernel: Kernel::Dense(rows),
            runtime: self.runtime.clone(),
        })
    }

    /// Compose with a channel `Ω → Ω'` given as row-stochastic rational rows.
    pub fn post_process(&self, points: &[Instance], omega: Vec<String>, channel: &[Vec<Rational>]) -> Result<Self> {
        if channel.len() != self.omega.len() {
            return Err(input("channel must have one row per output symbol"));
        }
        for row in channel {
            if row.len() != omega.len() {
                return Err(input("channel row width differs from the new alphabet"));
            }
            validate_row(row)?;
        }
        let table = KernelTable::build(self, points)?;
        let mut rows = BTreeMap::new();
        for t in 0..table.tuple_count() {
            let src = table.row_rational(t);
            let mut out = vec![Rational::zero(); omega.len()];
            for (w, p) in src.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                for (v, q) in channel[w].iter().enumerate() {
                    out[v] += p * q;
                }
            }
            rows.insert(table.tuple(t), out);
        }
        StochasticReduction::dense(self.arity, self.n, omega, rows)
    }

    pub fn to_doc(&self) -> Result<ReductionDoc> {
        match &self.kernel {
            Kernel::Dense(rows) => Ok(ReductionDoc::Dense {
                m: self.arity,
                n: self.n,
                omega: self.omega.clone(),
                rows: rows
                    .iter()
                    .map(|(t, r)| DenseRow { tuple: t.iter().map(BitString::to_hex).collect(), masses: r.iter().map(RationalRepr::from).collect() })
                    .collect(),
                runtime: Some(self.runtime.clone()),
            }),
            Kernel::Builtin(_) => Err(input("builtin kernels serialise through their builder spec")),
        }
    }

    /// Load from either JSON form. `problem` supplies χ for `f-of-chi`.
    pub fn from_doc(doc: &ReductionDoc, problem: &PromiseProblem) -> Result<Self> {
        match doc {
            ReductionDoc::Dense { m, n, omega, rows, runtime } => {
                let mut map = BTreeMap::new();
                for row in rows {
                    let tuple = row.tuple.iter().map(|h| BitString::from_hex(h, *n)).collect::<Result<Vec<_>>>()?;
                    let masses =
                        row.masses.iter().cloned().map(|r| Rational::try_from(r).map_err(input)).collect::<Result<Vec<_>>>()?;
                    if map.insert(tuple, masses).is_some() {
                        return Err(input("duplicate tuple in dense kernel"));
                    }
                }
                let r = StochasticReduction::dense(*m, *n, omega.clone(), map)?;
                Ok(match runtime {
                    Some(label) => r.with_runtime(label.clone()),
                    None => r,
                })
            }
            ReductionDoc::Builtin { builder, params } => build_named(builder, params, problem),
        }
    }
}

/// JSON forms of a reduction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReductionDoc {
    Builtin { builder: String, #[serde(default)] params: serde_json::Value },
    Dense {
        m: usize,
        n: u8,
        omega: Vec<String>,
        rows: Vec<DenseRow>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        runtime: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseRow {
    pub tuple: Vec<String>,
    pub masses: Vec<RationalRepr>,
}

pub const BUILDERS: &[&str] = &["parity-or", "f-of-parity", "f-of-chi", "identity", "constant", "xor-encoding"];

fn build_named(builder: &str, params: &serde_json::Value, problem: &PromiseProblem) -> Result<StochasticReduction> {
    let m = || -> Result<usize> {
        params.get("m").and_then(|v| v.as_u64()).map(|v| v as usize).ok_or_else(|| input(format!("builder {builder:?} needs integer param m")))
    };
    let flip = |key: &str| -> Result<Rational> {
        params.get(key).map(parse_rational).transpose().map(|v| v.unwrap_or_else(Rational::zero))
    };
    let f = |m: usize| -> Result<PermInvariantF> {
        let name = params.get("f").and_then(|v| v.as_str()).ok_or_else(|| input(format!("builder {builder:?} needs param f")))?;
        PermInvariantF::parse(name, m)
    };
    match builder {
        "parity-or" => StochasticReduction::f_of_parity(PermInvariantF::or(m()?)?, problem.n(), flip("flip")?),
        "f-of-parity" => {
            let m = m()?;
            StochasticReduction::f_of_parity(f(m)?, problem.n(), flip("flip")?)
        }
        "f-of-chi" => {
            let m = m()?;
            StochasticReduction::f_of_chi(f(m)?, problem, flip("flip")?)
        }
        "identity" => StochasticReduction::identity(m()?, problem.n()),
        "constant" => StochasticReduction::constant(m()?, problem.n()),
        "xor-encoding" => StochasticReduction::xor_encoding(flip("noise")?),
        _ => Err(input(format!("unknown reduction builder {builder:?} (known: {})", BUILDERS.join(", ")))),
    }
}

/// Accepts `{num, den}`, `"a/b"`, or a JSON number (taken at its exact binary value).
pub fn parse_rational(v: &serde_json::Value) -> Result<Rational> {
    if let Some(s) = v.as_str() {
        let (a, b) = s.split_once('/').unwrap_or((s, "1"));
        let num: i64 = a.trim().parse().map_err(|_| input(format!("bad rational {s:?}")))?;
        let den: i64 = b.trim().parse().map_err(|_| input(format!("bad rational {s:?}")))?;
        if den == 0 {
            return Err(input("zero denominator"));
        }
        return Ok(rational::rat(num, den));
    }
    if let Some(i) = v.as_i64() {
        return Ok(rational::int(i));
    }
    if let Some(x) = v.as_f64() {
        return Ok(rational::from_f64(x));
    }
    let repr: RationalRepr = serde_json::from_value(v.clone()).map_err(|e| input(format!("bad rational: {e}")))?;
    Rational::try_from(repr).map_err(input)
}

fn check_probability(p: &Rational) -> Result<()> {
    if *p < Rational::zero() || *p > Rational::one() {
        return Err(input(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

fn validate_row(row: &[Rational]) -> Result<()> {
    if row.iter().any(|p| *p < Rational::zero()) {
        return Err(input("negative mass"));
    }
    let total: Rational = row.iter().sum();
    if !total.is_one() {
        return Err(input(format!("masses sum to {total}")));
    }
    Ok(())
}

fn check_tuple(arity: usize, n: u8, tuple: &[Instance]) -> Result<()> {
    if tuple.len() != arity {
        return Err(input(format!("expected a {arity}-tuple, got {}", tuple.len())));
    }
    if let Some(x) = tuple.iter().find(|x| x.len() != n) {
        return Err(input(format!("instance {x} has length {} instead of {n}", x.len())));
    }
    Ok(())
}

pub(crate) fn show(tuple: &[Instance]) -> String {
    format!("({})", tuple.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}
