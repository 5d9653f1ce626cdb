//! Exact rationals and their `"p/q"` text form.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serializer};

pub type Rational = BigRational;

pub fn ratio(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn from_uint(v: &BigUint) -> Rational {
    BigRational::from_integer(BigInt::from(v.clone()))
}

pub fn from_counts(numer: u64, denom: u64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Always `p/q`, including `2/1` for integers.
pub fn to_pq(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_pq(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    // Shift both parts into f64 range before dividing.
    let n = r.numer();
    let d = r.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = (nb.max(db) - 1000).max(0) as usize;
    let n = n >> shift;
    let d = d >> shift;
    let nf: f64 = n.to_string().parse().unwrap_or(f64::NAN);
    let df: f64 = d.to_string().parse().unwrap_or(f64::NAN);
    if df == 0.0 {
        return f64::INFINITY;
    }
    nf / df
}

pub fn sum<'a>(items: impl IntoIterator<Item = &'a Rational>) -> Rational {
    items.into_iter().fold(Rational::zero(), |acc, x| acc + x)
}

pub fn one() -> Rational {
    Rational::one()
}

/// `log2` of a positive rational when it is an exact power of two.
pub fn exact_log2(r: &Rational) -> Option<i64> {
    if r <= &Rational::zero() {
        return None;
    }
    let is_pow2 = |x: &BigInt| {
        let mag = x.magnitude();
        mag.count_ones() == 1
    };
    if !is_pow2(r.numer()) || !is_pow2(r.denom()) {
        return None;
    }
    Some(r.numer().bits() as i64 - r.denom().bits() as i64)
}

pub mod serde_pq {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_pq(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_pq(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}

pub mod serde_pq_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&to_pq(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_pq(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}"))))
            .collect()
    }
}

/// Decimal-string serde for big integers.
pub mod serde_dec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pq_form_keeps_unit_denominator() {
        assert_eq!(to_pq(&ratio(4, 2)), "2/1");
        assert_eq!(to_pq(&ratio(5, 2)), "5/2");
        assert_eq!(parse_pq("10/4"), Some(ratio(5, 2)));
        assert_eq!(parse_pq("3"), Some(ratio(3, 1)));
        assert_eq!(parse_pq("1/0"), None);
    }

    #[test]
    fn exact_log2_detects_powers() {
        assert_eq!(exact_log2(&ratio(16, 1)), Some(4));
        assert_eq!(exact_log2(&ratio(1, 8)), Some(-3));
        assert_eq!(exact_log2(&ratio(3, 1)), None);
    }

    #[test]
    fn to_f64_handles_huge_parts() {
        let big = BigInt::from(1) << 5000usize;
        let r = BigRational::new(big.clone() * 3, big);
        assert!((to_f64(&r) - 3.0).abs() < 1e-12);
    }
}
