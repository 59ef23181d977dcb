//! Formal products `weight · ratio^r` with exact ordering at rational `r`.
//!
//! Stopping-time partitions and energy bands compare quantities of the shape
//! `w · c^r` against powers of a threshold of the same shape. For `r = a/b`
//! the order of two such products agrees with the order of the rational keys
//! `w^b · c^a`, so every comparison is exact. For non-rational `r` the
//! comparison falls back to compensated logarithms with a relative guard
//! band; comparisons landing inside the band are reported as boundary hits
//! so that callers can surface them.

use core::cmp::Ordering;

use num_traits::{sign::Signed, Pow, ToPrimitive, Zero};

use crate::{Error, Rational, Result};

/// Relative width of the floating-point guard band.
pub const FLOAT_GUARD: f64 = 1e-15;

/// The moment order `r`, either an exact positive rational or a float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    /// `r = num/den` in lowest terms; comparisons are exact.
    Rational { num: u32, den: u32 },
    /// Arbitrary positive order; comparisons use guarded logarithms.
    Real(f64),
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Exponent {
    pub fn rational(num: u32, den: u32) -> Result<Exponent> {
        if num == 0 || den == 0 {
            return Err(Error::BadOrder("order must be positive".into()));
        }
        let g = gcd(num, den);
        Ok(Exponent::Rational {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(r: u32) -> Result<Exponent> {
        Exponent::rational(r, 1)
    }

    pub fn real(r: f64) -> Result<Exponent> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::BadOrder("order must be positive and finite".into()));
        }
        Ok(Exponent::Real(r))
    }

    pub fn value(&self) -> f64 {
        match *self {
            Exponent::Rational { num, den } => num as f64 / den as f64,
            Exponent::Real(r) => r,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Exponent::Rational { .. })
    }

    pub fn as_integer(&self) -> Option<u32> {
        match *self {
            Exponent::Rational { num, den: 1 } => Some(num),
            _ => None,
        }
    }

    /// Builds a term `weight · ratio^r`; both factors must be positive.
    pub fn term(&self, weight: Rational, ratio: Rational) -> Result<RTerm> {
        if !weight.is_positive() || !ratio.is_positive() {
            return Err(Error::BadParameter(
                "term factors must be positive".into(),
            ));
        }
        let log = ln_rational(&weight) + self.value() * ln_rational(&ratio);
        let key = match *self {
            Exponent::Rational { num, den } => {
                Some(weight.clone().pow(den as i32) * ratio.clone().pow(num as i32))
            }
            Exponent::Real(_) => None,
        };
        Ok(RTerm {
            weight,
            ratio,
            key,
            log,
        })
    }

    /// The multiplicative unit.
    pub fn one(&self) -> RTerm {
        use num_traits::One;
        self.term(Rational::one(), Rational::one()).unwrap()
    }

    /// The exact rational value of `term`, available when `r` is an integer.
    pub fn exact_value(&self, term: &RTerm) -> Option<Rational> {
        let r = self.as_integer()?;
        Some(term.weight.clone() * term.ratio.clone().pow(r as i32))
    }
}

/// A positive quantity of the form `weight · ratio^r`.
///
/// Multiplication is componentwise; comparison is exact whenever the terms
/// were built from a rational [`Exponent`].
#[derive(Debug, Clone)]
pub struct RTerm {
    weight: Rational,
    ratio: Rational,
    key: Option<Rational>,
    log: f64,
}

impl RTerm {
    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn ratio(&self) -> &Rational {
        &self.ratio
    }

    /// Natural log of the value (always tracked, also in exact mode).
    pub fn log_value(&self) -> f64 {
        self.log
    }

    pub fn value(&self) -> f64 {
        libm::exp(self.log)
    }

    pub fn mul(&self, other: &RTerm) -> RTerm {
        RTerm {
            weight: &self.weight * &other.weight,
            ratio: &self.ratio * &other.ratio,
            key: match (&self.key, &other.key) {
                (Some(a), Some(b)) => Some(a * b),
                _ => None,
            },
            log: self.log + other.log,
        }
    }

    pub fn powi(&self, k: u32) -> RTerm {
        RTerm {
            weight: self.weight.clone().pow(k as i32),
            ratio: self.ratio.clone().pow(k as i32),
            key: self.key.as_ref().map(|key| key.clone().pow(k as i32)),
            log: self.log * k as f64,
        }
    }

    /// Compares two terms built from the same exponent.
    ///
    /// Returns the ordering and a boundary flag. In exact mode the flag is
    /// always false. In float mode, comparisons inside the guard band return
    /// `Ordering::Equal` with the flag set.
    pub fn cmp_guarded(&self, other: &RTerm) -> (Ordering, bool) {
        if let (Some(a), Some(b)) = (&self.key, &other.key) {
            return (a.cmp(b), false);
        }
        let diff = self.log - other.log;
        let scale = self.log.abs().max(other.log.abs()).max(1.0);
        if diff.abs() <= FLOAT_GUARD * scale {
            (Ordering::Equal, true)
        } else if diff < 0.0 {
            (Ordering::Less, false)
        } else {
            (Ordering::Greater, false)
        }
    }

    /// `self >= other`, with ties (and in-band float comparisons) counting
    /// as true, matching the `>=` of the exact stopping rule.
    pub fn at_least(&self, other: &RTerm) -> (bool, bool) {
        let (ord, boundary) = self.cmp_guarded(other);
        (ord != Ordering::Less, boundary)
    }
}

/// Log of a positive rational, robust for components outside f64 range.
fn ln_rational(q: &Rational) -> f64 {
    debug_assert!(q.is_positive());
    ln_big(q.numer()) - ln_big(q.denom())
}

fn ln_big(n: &num_bigint::BigInt) -> f64 {
    debug_assert!(!n.is_zero());
    if let Some(x) = n.to_f64() {
        if x.is_finite() {
            return libm::log(x.abs());
        }
    }
    // Scale down by powers of two until the mantissa fits.
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let head = (n >> shift).to_f64().unwrap().abs();
    libm::log(head) + shift as f64 * core::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    #[test]
    fn exponent_reduces() {
        let e = Exponent::rational(4, 8).unwrap();
        assert_eq!(e, Exponent::Rational { num: 1, den: 2 });
        assert!(Exponent::rational(0, 3).is_err());
        assert!(Exponent::real(-1.0).is_err());
        assert_eq!(Exponent::integer(2).unwrap().as_integer(), Some(2));
        assert_eq!(Exponent::rational(1, 2).unwrap().as_integer(), None);
    }

    #[test]
    fn exact_ordering_at_half_integer_order() {
        // r = 1/2: compare w^2 c. (1/3)·(1/4)^{1/2} = 1/6 vs (1/2)·(1/8)^{1/2} ≈ 0.1768.
        let e = Exponent::rational(1, 2).unwrap();
        let outer = e.term(ratio(1, 3), ratio(1, 4)).unwrap();
        let inner = e.term(ratio(1, 2), ratio(1, 8)).unwrap();
        assert_eq!(outer.cmp_guarded(&inner), (Ordering::Less, false));
        // Exact tie: (1/4)·(1/4)^{1/2} vs (1/8)·(1.0)... build equal values differently:
        // (1/2)·(1/16)^{1/2} = 1/8 and (1/8)·1^{1/2} = 1/8.
        let a = e.term(ratio(1, 2), ratio(1, 16)).unwrap();
        let b = e.term(ratio(1, 8), ratio(1, 1)).unwrap();
        assert_eq!(a.cmp_guarded(&b), (Ordering::Equal, false));
    }

    #[test]
    fn multiplicative_keys_and_logs() {
        let e = Exponent::integer(2).unwrap();
        let a = e.term(ratio(1, 3), ratio(1, 4)).unwrap();
        let b = e.term(ratio(1, 2), ratio(1, 8)).unwrap();
        let ab = a.mul(&b);
        assert_eq!(ab.weight(), &ratio(1, 6));
        assert_eq!(ab.ratio(), &ratio(1, 32));
        assert_eq!(e.exact_value(&ab).unwrap(), ratio(1, 6) * ratio(1, 1024));
        assert!((ab.log_value() - (a.log_value() + b.log_value())).abs() < 1e-14);
        let sq = a.powi(2);
        assert_eq!(e.exact_value(&sq).unwrap(), ratio(1, 48) * ratio(1, 48));
    }

    #[test]
    fn float_mode_guard_band() {
        let e = Exponent::real(core::f64::consts::SQRT_2).unwrap();
        let a = e.term(ratio(1, 3), ratio(1, 4)).unwrap();
        let b = a.clone();
        let (ord, boundary) = a.cmp_guarded(&b);
        assert_eq!(ord, Ordering::Equal);
        assert!(boundary);
        let c = e.term(ratio(1, 3), ratio(1, 5)).unwrap();
        assert_eq!(a.cmp_guarded(&c), (Ordering::Greater, false));
        assert!(a.at_least(&c).0);
        assert!(!c.at_least(&a).0);
    }

    #[test]
    fn value_matches_log() {
        let e = Exponent::integer(3).unwrap();
        let t = e.term(ratio(2, 5), ratio(1, 2)).unwrap();
        assert!((t.value() - 0.4 * 0.125).abs() < 1e-15);
    }
}
