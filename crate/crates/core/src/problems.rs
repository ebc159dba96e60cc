//! Finite promise problems over fixed-length bit strings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::input;
use crate::{Error, Result};

/// Largest instance length any enumerating module accepts.
pub const MAX_N: u8 = 24;

/// A bit string `x₁…x_n` stored as the integer whose binary expansion (most
/// significant bit first) is `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    len: u8,
    value: u32,
}

pub type Instance = BitString;

impl BitString {
    pub fn new(value: u32, len: u8) -> Result<Self> {
        if len > 32 || (len < 32 && value >> len != 0) {
            return Err(input(format!("value {value:#x} does not fit in {len} bits")));
        }
        Ok(BitString { len, value })
    }

    /// Parse a string of `0`/`1` characters.
    pub fn from_bits(s: &str) -> Result<Self> {
        if s.len() > 32 {
            return Err(input(format!("bit string {s:?} longer than 32")));
        }
        let mut value = 0u32;
        for c in s.chars() {
            value = (value << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(input(format!("invalid bit {c:?} in {s:?}"))),
                };
        }
        BitString::new(value, s.len() as u8)
    }

    pub fn from_hex(s: &str, len: u8) -> Result<Self> {
        let digits = s.trim_start_matches("0x");
        let value = u32::from_str_radix(digits, 16).map_err(|_| input(format!("invalid hex string {s:?}")))?;
        BitString::new(value, len)
    }

    /// Lower-case hex of the value, zero-padded to `⌈len/4⌉` digits.
    pub fn to_hex(&self) -> String {
        let width = (self.len as usize).div_ceil(4).max(1);
        format!("{:0width$x}", self.value)
    }

    pub fn len(&self) -> u8 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    /// Bit `i` counting from the left, `0 ≤ i < len`.
    pub fn bit(&self, i: u8) -> bool {
        (self.value >> (self.len - 1 - i)) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.bit(i)).collect()
    }

    pub fn weight(&self) -> u32 {
        self.value.count_ones()
    }

    /// All strings of length `len` in increasing order.
    pub fn all(len: u8) -> Result<Vec<BitString>> {
        if len > MAX_N {
            return Err(crate::error::infeasible(format!("all strings of length {len}"), 1u128 << len, 1u128 << MAX_N));
        }
        Ok((0..(1u32 << len)).map(|value| BitString { len, value }).collect())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BitString::from_bits(&s).map_err(serde::de::Error::custom)
    }
}

/// Value of a characteristic function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chi {
    Yes,
    No,
    Star,
}

impl Chi {
    pub fn bit(self) -> Option<bool> {
        match self {
            Chi::Yes => Some(true),
            Chi::No => Some(false),
            Chi::Star => None,
        }
    }
}

/// A pair of disjoint instance sets at a fixed length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PromiseProblem {
    name: String,
    n: u8,
    yes: Vec<Instance>,
    no: Vec<Instance>,
}

impl PromiseProblem {
    pub fn new(name: impl Into<String>, n: u8, yes: Vec<Instance>, no: Vec<Instance>) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::Input(format!("n = {n} exceeds the enumeration cap {MAX_N}")));
        }
        let check = |set: &[Instance]| -> Result<BTreeSet<Instance>> {
            for x in set {
                if x.len() != n {
                    return Err(input(format!("instance {x} has length {} instead of {n}", x.len())));
                }
            }
            Ok(set.iter().copied().collect())
        };
        let yes = check(&yes)?;
        let no = check(&no)?;
        if let Some(x) = yes.intersection(&no).next() {
            return Err(input(format!("instance {x} is both YES and NO")));
        }
        Ok(PromiseProblem { name: name.into(), n, yes: yes.into_iter().collect(), no: no.into_iter().collect() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn yes_set(&self) -> &[Instance] {
        &self.yes
    }

    pub fn no_set(&self) -> &[Instance] {
        &self.no
    }

    /// YES ∪ NO in increasing order.
    pub fn promise(&self) -> Vec<Instance> {
        let mut all: Vec<Instance> = self.yes.iter().chain(&self.no).copied().collect();
        all.sort();
        all
    }

    pub fn chi(&self, x: &Instance) -> Result<Chi> {
        if x.len() != self.n {
            return Err(input(format!("instance {x} has length {} but the problem has n = {}", x.len(), self.n)));
        }
        Ok(self.chi_unchecked(x))
    }

    pub(crate) fn chi_unchecked(&self, x: &Instance) -> Chi {
        if self.yes.binary_search(x).is_ok() {
            Chi::Yes
        } else if self.no.binary_search(x).is_ok() {
            Chi::No
        } else {
            Chi::Star
        }
    }

    /// χ on a promise instance; errors outside the promise.
    pub fn chi_bit(&self, x: &Instance) -> Result<bool> {
        self.chi(x)?.bit().ok_or_else(|| input(format!("instance {x} lies outside the promise of {}", self.name)))
    }

    pub fn to_doc(&self) -> ProblemDoc {
        ProblemDoc {
            name: self.name.clone(),
            n: self.n,
            yes: self.yes.iter().map(BitString::to_hex).collect(),
            no: self.no.iter().map(BitString::to_hex).collect(),
        }
    }

    pub fn from_doc(doc: &ProblemDoc) -> Result<Self> {
        let parse = |v: &[String]| v.iter().map(|h| BitString::from_hex(h, doc.n)).collect::<Result<Vec<_>>>();
        PromiseProblem::new(doc.name.clone(), doc.n, parse(&doc.yes)?, parse(&doc.no)?)
    }
}

/// JSON form `{name, n, yes: [hex], no: [hex]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemDoc {
    pub name: String,
    pub n: u8,
    pub yes: Vec<String>,
    pub no: Vec<String>,
}

pub const BUILTIN_PROBLEMS: &[&str] = &["parity", "const-yes", "const-no", "majority", "2sat", "3sat"];

/// Registered problem builders.
///
/// `2sat`/`3sat` read an instance as the inclusion mask of a formula over the
/// canonical list of k-clauses on `v` variables (so `n` must equal that list's
/// length: 4 or 12 for `2sat`, 8 for `3sat`); YES means satisfiable.
pub fn builtin_problem(name: &str, n: u8) -> Result<PromiseProblem> {
    let all = BitString::all(n)?;
    let split = |pred: &dyn Fn(&BitString) -> Option<bool>| {
        let (mut yes, mut no) = (Vec::new(), Vec::new());
        for x in &all {
            match pred(x) {
                Some(true) => yes.push(*x),
                Some(false) => no.push(*x),
                None => {}
            }
        }
        (yes, no)
    };
    let (yes, no) = match name {
        "parity" => split(&|x| Some(x.weight() % 2 == 1)),
        "const-yes" => split(&|_| Some(true)),
        "const-no" => split(&|_| Some(false)),
        "majority" => split(&|x| {
            let w = 2 * x.weight();
            (w != n as u32).then_some(w > n as u32)
        }),
        "2sat" | "3sat" => {
            let k = if name == "2sat" { 2 } else { 3 };
            let clauses = clause_list(k, n)?;
            let vars = clauses.iter().flat_map(|c| c.iter().map(|l| l.0)).max().map_or(0, |v| v + 1);
            split(&|x| Some(satisfiable(x, &clauses, vars)))
        }
        _ => return Err(input(format!("unknown builtin problem {name:?} (known: {})", BUILTIN_PROBLEMS.join(", ")))),
    };
    PromiseProblem::new(format!("{name}{n}"), n, yes, no)
}

type Clause = Vec<(usize, bool)>;

fn clause_list(k: usize, n: u8) -> Result<Vec<Clause>> {
    for v in k..=8 {
        let mut clauses = Vec::new();
        for vars in itertools::Itertools::combinations(0..v, k) {
            for signs in 0..(1u32 << k) {
                clauses.push(vars.iter().enumerate().map(|(i, &var)| (var, (signs >> i) & 1 == 1)).collect());
            }
        }
        if clauses.len() == n as usize {
            return Ok(clauses);
        }
        if clauses.len() > n as usize {
            break;
        }
    }
    Err(input(format!("no {k}-clause list has exactly {n} clauses")))
}

fn satisfiable(mask: &BitString, clauses: &[Clause], vars: usize) -> bool {
    (0..(1u32 << vars)).any(|assignment| {
        clauses.iter().enumerate().filter(|(i, _)| mask.bit(*i as u8)).all(|(_, clause)| {
            clause.iter().any(|&(var, negated)| ((assignment >> var) & 1 == 1) != negated)
        })
    })
}

/// Exhaustive solver output: χ on every promise instance plus the work spent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionTable {
    pub entries: BTreeMap<Instance, bool>,
    pub work: u64,
}

pub fn brute_force_solve(problem: &PromiseProblem) -> DecisionTable {
    let mut entries = BTreeMap::new();
    let mut work = 0;
    for x in problem.promise() {
        work += 1;
        entries.insert(x, problem.chi_unchecked(&x) == Chi::Yes);
    }
    DecisionTable { entries, work }
}
