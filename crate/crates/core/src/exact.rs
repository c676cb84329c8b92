//! Exact rational helpers built on `num`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn is_integer(x: &Q) -> bool {
    x.is_integer()
}

/// Integer value of `x` if it is an integer that fits in `i64`.
pub fn as_i64(x: &Q) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

/// The simplest rational (smallest denominator, at most 10^6) whose nearest
/// double is exactly `x`. Falls back to the exact binary value of `x`.
pub fn rational_from_f64(x: f64) -> Option<Q> {
    let exact = Q::from_float(x)?;
    if exact.is_integer() {
        return Some(exact);
    }
    let limit = BigInt::from(1_000_000);
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = exact.clone();
    loop {
        let a = rest.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > limit {
            return Some(exact);
        }
        let cand = Q::new(h2.clone(), k2.clone());
        if to_f64(&cand) == x {
            return Some(cand);
        }
        let frac = &rest - Q::from_integer(a);
        if frac.is_zero() {
            return Some(exact);
        }
        rest = frac.recip();
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
}

/// Binomial coefficient C(n, k) as a big integer; zero outside 0 ≤ k ≤ n.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Rising factorial (a)_n.
pub fn pochhammer(a: &Q, n: u64) -> Q {
    let mut acc = Q::one();
    let mut term = a.clone();
    for _ in 0..n {
        acc *= &term;
        term += Q::one();
    }
    acc
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplest_rationals() {
        assert_eq!(rational_from_f64(0.5).unwrap(), qf(1, 2));
        assert_eq!(rational_from_f64(-1.5).unwrap(), qf(-3, 2));
        assert_eq!(rational_from_f64(1.0 / 3.0).unwrap(), qf(1, 3));
        assert_eq!(rational_from_f64(2.5).unwrap(), qf(5, 2));
        assert_eq!(rational_from_f64(7.0).unwrap(), q(7));
        assert_eq!(rational_from_f64(0.3).unwrap(), qf(3, 10));
    }

    #[test]
    fn irrational_input_keeps_binary_value() {
        let pi = rational_from_f64(std::f64::consts::PI).unwrap();
        assert_eq!(to_f64(&pi), std::f64::consts::PI);
        assert!(rational_from_f64(f64::NAN).is_none());
    }

    #[test]
    fn binomials_and_pochhammer() {
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(pochhammer(&qf(1, 2), 3), qf(15, 8));
        assert_eq!(factorial(6), BigInt::from(720));
    }
}
