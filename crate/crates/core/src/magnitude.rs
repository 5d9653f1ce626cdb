//! Exact non-negative integers that may be too large to materialize.
//!
//! A [`Magnitude`] is either an explicit integer or `2^e` for another
//! magnitude `e`, so towers such as `2^{2^{64}}` are stored as
//! `PowerOfTwo(PowerOfTwo(Exact(64)))`. Comparisons against explicit integers
//! and base-2 logarithms are exact.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Magnitude {
    Exact(BigUint),
    PowerOfTwo(Box<Magnitude>),
}

impl Magnitude {
    pub fn exact(v: impl Into<BigUint>) -> Self {
        Magnitude::Exact(v.into())
    }

    pub fn pow2(e: Magnitude) -> Self {
        Magnitude::PowerOfTwo(Box::new(e))
    }

    /// `2^2^...^top` with `height` twos.
    pub fn tower(height: usize, top: impl Into<BigUint>) -> Self {
        let mut m = Magnitude::Exact(top.into());
        for _ in 0..height {
            m = Magnitude::pow2(m);
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Magnitude::Exact(v) if v.is_zero())
    }

    /// `⌊log2 x⌋`; zero has no logarithm.
    pub fn floor_log2(&self) -> Result<Magnitude> {
        match self {
            Magnitude::Exact(v) if v.is_zero() => {
                Err(Error::InvalidParams("log2 of zero".into()))
            }
            Magnitude::Exact(v) => Ok(Magnitude::Exact(BigUint::from(v.bits() - 1))),
            Magnitude::PowerOfTwo(e) => Ok((**e).clone()),
        }
    }

    /// `⌈log2 x⌉`; zero has no logarithm.
    pub fn ceil_log2(&self) -> Result<Magnitude> {
        match self {
            Magnitude::Exact(v) if v.is_zero() => {
                Err(Error::InvalidParams("log2 of zero".into()))
            }
            Magnitude::Exact(v) => Ok(Magnitude::Exact(ceil_log2(v))),
            Magnitude::PowerOfTwo(e) => Ok((**e).clone()),
        }
    }

    /// Exact comparison with an explicit integer.
    pub fn cmp_exact(&self, y: &BigUint) -> Ordering {
        match self {
            Magnitude::Exact(x) => x.cmp(y),
            Magnitude::PowerOfTwo(e) => {
                if y.is_zero() {
                    return Ordering::Greater;
                }
                let f = BigUint::from(y.bits() - 1);
                match e.cmp_exact(&f) {
                    Ordering::Less => Ordering::Less,
                    Ordering::Greater => Ordering::Greater,
                    Ordering::Equal if is_power_of_two(y) => Ordering::Equal,
                    Ordering::Equal => Ordering::Less,
                }
            }
        }
    }

    /// The integer itself when it has at most `max_bits` bits.
    pub fn to_exact(&self, max_bits: u64) -> Option<BigUint> {
        match self {
            Magnitude::Exact(v) => (v.bits() <= max_bits).then(|| v.clone()),
            Magnitude::PowerOfTwo(e) => {
                let e = e.to_exact(64)?.to_u64()?;
                (e < max_bits).then(|| BigUint::one() << e)
            }
        }
    }

    /// `log2 x` as a float; infinite when the value is a tower too tall for
    /// `f64`.
    pub fn log2_f64(&self) -> f64 {
        match self {
            Magnitude::Exact(v) => biguint_log2(v),
            Magnitude::PowerOfTwo(e) => e.to_f64(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Magnitude::Exact(v) => v.to_f64().unwrap_or(f64::INFINITY),
            Magnitude::PowerOfTwo(e) => e.to_f64().exp2(),
        }
    }
}

impl From<u64> for Magnitude {
    fn from(v: u64) -> Self {
        Magnitude::Exact(BigUint::from(v))
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Magnitude::Exact(v) => write!(f, "{v}"),
            Magnitude::PowerOfTwo(e) => match **e {
                Magnitude::Exact(_) => write!(f, "2^{e}"),
                Magnitude::PowerOfTwo(_) => write!(f, "2^({e})"),
            },
        }
    }
}

/// Parses decimal integers and right-associative `2^...` towers, with
/// optional parentheses: `12`, `2^64`, `2^2^64`, `2^(2^64)`.
impl FromStr for Magnitude {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        parse_magnitude(&s)
    }
}

fn parse_magnitude(s: &str) -> Result<Magnitude> {
    let bad = || Error::InvalidParams(format!("cannot parse magnitude {s:?}"));
    let s = strip_parens(s);
    if let Some(rest) = s.strip_prefix("2^") {
        return Ok(Magnitude::pow2(parse_magnitude(rest)?));
    }
    s.parse::<BigUint>().map(Magnitude::Exact).map_err(|_| bad())
}

fn strip_parens(s: &str) -> &str {
    let mut s = s;
    while s.starts_with('(') && s.ends_with(')') {
        s = &s[1..s.len() - 1];
    }
    s
}

pub fn is_power_of_two(v: &BigUint) -> bool {
    !v.is_zero() && v.count_ones() == 1
}

/// `⌈log2 v⌉` for `v ≥ 1`; `0` for `v ≤ 1`.
pub fn ceil_log2(v: &BigUint) -> BigUint {
    if v <= &BigUint::one() {
        return BigUint::zero();
    }
    BigUint::from((v - BigUint::one()).bits())
}

pub fn biguint_log2(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    let shift = bits.saturating_sub(64);
    let top = (v >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.log2() + shift as f64
}
