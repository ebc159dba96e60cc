//! Exact rational helpers and their JSON form `{num, den}`.

use num::bigint::BigInt;
use num::integer::Integer;
use num::traits::{One, Signed, ToPrimitive, Zero};
use num::BigRational;
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Exact value of a finite float.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// log₂ of a positive rational, accurate even when the value under- or overflows `f64`.
pub fn log2(r: &Rational) -> f64 {
    debug_assert!(r.is_positive());
    let x = to_f64(r);
    if x.is_normal() {
        return x.log2();
    }
    let shift = r.numer().bits() as i64 - r.denom().bits() as i64;
    let scaled = if shift >= 0 {
        Rational::new(r.numer().clone(), r.denom().clone() << (shift as usize))
    } else {
        Rational::new(r.numer().clone() << ((-shift) as usize), r.denom().clone())
    };
    to_f64(&scaled).log2() + shift as f64
}

pub fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scale `v` by `den` and return the integer numerator; `den` must be a multiple of `v`'s denominator.
pub fn scaled(v: &Rational, den: &BigInt) -> BigInt {
    debug_assert!((den % v.denom()).is_zero());
    v.numer() * (den / v.denom())
}

pub fn to_i128(v: &BigInt, ctx: &str) -> crate::Result<i128> {
    v.to_i128().ok_or_else(|| crate::Error::Overflow(ctx.to_string()))
}

/// Integer encoded as a JSON number when it fits in `i64`, else as a decimal string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntRepr {
    Small(i64),
    Big(String),
}

impl IntRepr {
    pub fn from_big(v: &BigInt) -> Self {
        v.to_i64().map(IntRepr::Small).unwrap_or_else(|| IntRepr::Big(v.to_string()))
    }

    pub fn to_big(&self) -> Result<BigInt, String> {
        match self {
            IntRepr::Small(v) => Ok(BigInt::from(*v)),
            IntRepr::Big(s) => s.parse().map_err(|_| format!("invalid integer {s:?}")),
        }
    }
}

/// JSON form of a rational.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalRepr {
    num: IntRepr,
    den: IntRepr,
}

impl From<&Rational> for RationalRepr {
    fn from(r: &Rational) -> Self {
        RationalRepr { num: IntRepr::from_big(r.numer()), den: IntRepr::from_big(r.denom()) }
    }
}

impl TryFrom<RationalRepr> for Rational {
    type Error = String;
    fn try_from(r: RationalRepr) -> Result<Self, String> {
        let den = r.den.to_big()?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(Rational::new(r.num.to_big()?, den))
    }
}

/// `#[serde(with = "crate::rational::serde_q")]` for `Rational` fields.
pub mod serde_q {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        RationalRepr::from(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        Rational::try_from(RationalRepr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Same as [`serde_q`] for `Vec<Rational>`.
pub mod serde_q_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(RationalRepr::from).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<RationalRepr>::deserialize(d)?
            .into_iter()
            .map(|r| Rational::try_from(r).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Same as [`serde_q`] for `Option<Rational>`.
pub mod serde_q_opt {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(RationalRepr::from).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<RationalRepr>::deserialize(d)?
            .map(|r| Rational::try_from(r).map_err(serde::de::Error::custom))
            .transpose()
    }
}
