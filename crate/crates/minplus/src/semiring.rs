//! The min-plus semirings `R = (ℝ ∪ {∞}, ⊕, ⊗)` and
//! `R⁺ = (ℝ≥0 ∪ {∞}, ⊕, ⊗)`.
//!
//! `⊕` is minimum and `⊗` is ordinary addition. `∞` is the additive
//! identity and `0` the multiplicative identity. Values are exact
//! rationals so that absorption comparisons never suffer rounding.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used for all finite semiring values.
pub type Rat = Rational64;

/// Which of the two semirings values and substitutions are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SemiringMode {
    /// `(ℝ ∪ {∞}, min, +)`: finite values may be negative.
    R,
    /// `(ℝ≥0 ∪ {∞}, min, +)`: finite values must be nonnegative.
    RPlus,
}

impl SemiringMode {
    /// Checks that `v` is admissible in this mode.
    pub fn check(&self, v: &TropValue) -> Result<()> {
        if *self == SemiringMode::RPlus {
            if let TropValue::Finite(r) = v {
                if r.is_negative() {
                    return Err(Error::NegativeInRPlus);
                }
            }
        }
        Ok(())
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SemiringMode::R => "r",
            SemiringMode::RPlus => "rplus",
        }
    }
}

impl fmt::Display for SemiringMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SemiringMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "r" => Ok(SemiringMode::R),
            "rplus" => Ok(SemiringMode::RPlus),
            other => Err(format!("unknown mode `{other}` (expected r|rplus)")),
        }
    }
}

/// An element of `R` or `R⁺`: a finite exact rational or `∞`.
///
/// `∞` is a distinct variant, not a sentinel numeric value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TropValue {
    Finite(Rat),
    Infinity,
}

impl TropValue {
    pub fn zero() -> Self {
        TropValue::Finite(Rat::zero())
    }

    pub fn int(n: i64) -> Self {
        TropValue::Finite(Rat::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        TropValue::Finite(Rat::new(num, den))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, TropValue::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            TropValue::Finite(r) => Some(r),
            TropValue::Infinity => None,
        }
    }

    /// Semiring addition: `min(a, b)` with `∞` as the maximum element.
    pub fn trop_add(&self, other: &TropValue) -> TropValue {
        match (self, other) {
            (TropValue::Infinity, b) => b.clone(),
            (a, TropValue::Infinity) => a.clone(),
            (TropValue::Finite(a), TropValue::Finite(b)) => TropValue::Finite(*a.min(b)),
        }
    }

    /// Semiring multiplication: `a + b`, with `∞` absorbing.
    pub fn trop_mul(&self, other: &TropValue) -> TropValue {
        match (self, other) {
            (TropValue::Finite(a), TropValue::Finite(b)) => TropValue::Finite(a + b),
            _ => TropValue::Infinity,
        }
    }

    /// `d`-fold semiring power, i.e. `d · a`. The empty product gives the
    /// multiplicative identity `0`, even for `a = ∞`.
    pub fn trop_pow(&self, d: u32) -> TropValue {
        if d == 0 {
            return TropValue::zero();
        }
        match self {
            TropValue::Finite(a) => TropValue::Finite(a * Rat::from_integer(d as i64)),
            TropValue::Infinity => TropValue::Infinity,
        }
    }
}

impl PartialOrd for TropValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TropValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TropValue::Infinity, TropValue::Infinity) => Ordering::Equal,
            (TropValue::Infinity, _) => Ordering::Greater,
            (_, TropValue::Infinity) => Ordering::Less,
            (TropValue::Finite(a), TropValue::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for TropValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropValue::Infinity => f.write_str("inf"),
            TropValue::Finite(r) => {
                if r.denom() == &1 {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl FromStr for TropValue {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "inf" {
            return Ok(TropValue::Infinity);
        }
        if let Some((num, den)) = s.split_once('/') {
            let n: i64 = num
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator `{num}`"))?;
            let d: i64 = den
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator `{den}`"))?;
            if d == 0 {
                return Err("zero denominator".into());
            }
            Ok(TropValue::Finite(Rat::new(n, d)))
        } else {
            let n: i64 = s.parse().map_err(|_| format!("bad value `{s}`"))?;
            Ok(TropValue::int(n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<TropValue> {
        let mut g: Vec<TropValue> = (-3..=3).map(TropValue::int).collect();
        g.push(TropValue::ratio(1, 2));
        g.push(TropValue::ratio(-5, 3));
        g.push(TropValue::Infinity);
        g
    }

    #[test]
    fn add_is_min() {
        assert_eq!(TropValue::int(3).trop_add(&TropValue::int(5)), TropValue::int(3));
        assert_eq!(TropValue::Infinity.trop_add(&TropValue::int(7)), TropValue::int(7));
        assert_eq!(
            TropValue::Infinity.trop_add(&TropValue::Infinity),
            TropValue::Infinity
        );
    }

    #[test]
    fn mul_is_plus() {
        assert_eq!(TropValue::int(3).trop_mul(&TropValue::int(5)), TropValue::int(8));
        assert_eq!(
            TropValue::Infinity.trop_mul(&TropValue::int(7)),
            TropValue::Infinity
        );
        assert_eq!(TropValue::int(0).trop_mul(&TropValue::int(7)), TropValue::int(7));
    }

    #[test]
    fn pow_is_scaling() {
        assert_eq!(TropValue::int(4).trop_pow(3), TropValue::int(12));
        assert_eq!(TropValue::Infinity.trop_pow(0), TropValue::int(0));
        assert_eq!(TropValue::Infinity.trop_pow(2), TropValue::Infinity);
    }

    #[test]
    fn semiring_laws_on_grid() {
        let g = grid();
        for a in &g {
            assert_eq!(a.trop_add(a), *a, "idempotence");
            for b in &g {
                assert_eq!(a.trop_add(b), b.trop_add(a), "commutativity");
                for c in &g {
                    assert_eq!(
                        a.trop_add(&b.trop_add(c)),
                        a.trop_add(b).trop_add(c),
                        "associativity of ⊕"
                    );
                    assert_eq!(
                        a.trop_mul(&b.trop_mul(c)),
                        a.trop_mul(b).trop_mul(c),
                        "associativity of ⊗"
                    );
                    assert_eq!(
                        a.trop_mul(&b.trop_add(c)),
                        a.trop_mul(b).trop_add(&a.trop_mul(c)),
                        "distributivity"
                    );
                }
            }
        }
    }

    #[test]
    fn rplus_closure() {
        let nonneg: Vec<TropValue> = (0..4).map(TropValue::int).collect();
        for a in &nonneg {
            for b in &nonneg {
                let p = a.trop_mul(b);
                assert!(SemiringMode::RPlus.check(&p).is_ok());
            }
        }
        assert!(SemiringMode::RPlus.check(&TropValue::int(-1)).is_err());
    }

    #[test]
    fn display_parse_round_trip() {
        for v in grid() {
            let s = v.to_string();
            let back: TropValue = s.parse().unwrap();
            assert_eq!(back, v, "round trip through `{s}`");
        }
        assert_eq!("7/2".parse::<TropValue>().unwrap(), TropValue::ratio(7, 2));
        assert_eq!("inf".parse::<TropValue>().unwrap(), TropValue::Infinity);
        assert!("1/0".parse::<TropValue>().is_err());
    }
}
