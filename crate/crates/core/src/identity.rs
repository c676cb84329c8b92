//! Exact zero test for Bessel combinations.
//!
//! The combo algebra never simplifies with the three-term recurrences, so two
//! routes to the same function can produce syntactically different combos.
//! This module reduces a combo to a normal form in which equality is decided
//! by comparing rational coefficients:
//!
//! * every shift ℓ ≥ 2 is lowered with
//!   x^m K̃_β = 4x^{m−2}((β−1)K̃_{β−1} + K̃_{β−2}) and
//!   x^m Ĩ_β = 4x^{m−2}(Ĩ_{β−2} − (β−1)Ĩ_{β−1}),
//!   leaving Laurent polynomials in front of B̃_{α₀} and B̃_{α₀+1};
//! * for half-integer α₀ the two K̃ functions are themselves e^{−x} times
//!   Laurent polynomials (up to √π), so K-kind terms collapse to a single
//!   Laurent polynomial.
//!
//! The prefactor is ignored: the test is whether the rational part vanishes.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::combo::{BesselCombo, Kind};
use crate::error::Result;
use crate::exact::{self, Q};
use crate::scalar_fn;

/// Rational normal form of a combo.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    /// (kind, shift ∈ {0, 1}, power) → coefficient.
    pub bessel: BTreeMap<(Kind, u32, i64), Q>,
    /// K-kind part as √π e^{−x} Σ c_m x^m when α₀ is a half-integer.
    pub exp_laurent: BTreeMap<i64, Q>,
    /// One-kind part.
    pub poly: BTreeMap<i64, Q>,
}

fn add(map: &mut BTreeMap<(Kind, u32, i64), Q>, key: (Kind, u32, i64), c: Q) {
    if c.is_zero() {
        return;
    }
    let e = map.entry(key).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        map.remove(&key);
    }
}

fn add1(map: &mut BTreeMap<i64, Q>, key: i64, c: Q) {
    if c.is_zero() {
        return;
    }
    let e = map.entry(key).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        map.remove(&key);
    }
}

/// K̃_{n+1/2}(x) / (√π e^{−x}) as a Laurent polynomial, for integer n of either sign.
fn k_half_laurent(n: i64) -> BTreeMap<i64, Q> {
    let mut out = BTreeMap::new();
    // order a = n + 1/2 ≥ 0 directly; negative orders through K̃_{−a} = (x/2)^{2a} K̃_a
    let (m, extra_power, extra_scale) = if n >= 0 {
        (n, 0i64, Q::one())
    } else {
        let m = -n - 1; // −(n + 1/2) = m + 1/2
        let p = 2 * m + 1;
        (m, p, Q::new(1.into(), num::BigInt::from(2).pow(p as u32)))
    };
    // K̃_{m+1/2} = √π e^{−x} 2^m x^{−m−1} Σ_k (m+k)!/(k!(m−k)!) 2^{−k} x^{−k}
    for k in 0..=m {
        let c = Q::new(
            exact::factorial((m + k) as u64),
            exact::factorial(k as u64) * exact::factorial((m - k) as u64),
        ) * Q::new(
            num::BigInt::from(2).pow(m as u32),
            num::BigInt::from(2).pow(k as u32),
        );
        add1(&mut out, -m - 1 - k + extra_power, c * &extra_scale);
    }
    out
}

pub fn normal_form(c: &BesselCombo) -> NormalForm {
    let a0 = c.base_order().clone();
    let mut bessel: BTreeMap<(Kind, u32, i64), Q> = BTreeMap::new();
    let mut poly = BTreeMap::new();
    for t in c.terms() {
        if t.kind == Kind::One {
            add1(&mut poly, t.power, t.coeff);
        } else {
            add(&mut bessel, (t.kind, t.shift, t.power), t.coeff);
        }
    }
    // lower the largest shift repeatedly
    loop {
        let Some(&key) = bessel
            .keys()
            .filter(|k| k.1 >= 2)
            .max_by_key(|k| (k.1, k.0, k.2))
        else {
            break;
        };
        let coeff = bessel.remove(&key).unwrap();
        let (kind, shift, power) = key;
        let beta_m1 = &a0 + exact::q(shift as i64 - 1);
        let four = exact::q(4);
        match kind {
            Kind::K => {
                add(
                    &mut bessel,
                    (kind, shift - 1, power - 2),
                    &four * &coeff * &beta_m1,
                );
                add(&mut bessel, (kind, shift - 2, power - 2), &four * &coeff);
            }
            Kind::I => {
                add(&mut bessel, (kind, shift - 2, power - 2), &four * &coeff);
                add(
                    &mut bessel,
                    (kind, shift - 1, power - 2),
                    -(&four * &coeff * &beta_m1),
                );
            }
            Kind::One => unreachable!(),
        }
    }
    let mut exp_laurent = BTreeMap::new();
    let twice = &a0 * exact::q(2);
    if twice.is_integer() && !a0.is_integer() {
        let n0 = exact::as_i64(&(&a0 - exact::qf(1, 2))).expect("half-integer order");
        let base = [k_half_laurent(n0), k_half_laurent(n0 + 1)];
        let ks: Vec<_> = bessel.keys().filter(|k| k.0 == Kind::K).cloned().collect();
        for key in ks {
            let coeff = bessel.remove(&key).unwrap();
            for (p, b) in &base[key.1 as usize] {
                add1(&mut exp_laurent, key.2 + p, &coeff * b);
            }
        }
    }
    NormalForm {
        bessel,
        exp_laurent,
        poly,
    }
}

impl NormalForm {
    pub fn is_zero(&self) -> bool {
        self.bessel.is_empty() && self.exp_laurent.is_empty() && self.poly.is_empty()
    }

    /// Point value of the normal form of `c` (prefactor included).
    pub fn eval_for(&self, c: &BesselCombo, x: f64) -> Result<f64> {
        let a0 = exact::to_f64(c.base_order());
        let mut sum = 0.0;
        for (&(kind, shift, power), v) in &self.bessel {
            let a = a0 + shift as f64;
            let b = match kind {
                Kind::K => scalar_fn::bessel_k_tilde(a, x)?,
                Kind::I => scalar_fn::bessel_i_tilde(a, x),
                Kind::One => 1.0,
            };
            sum += exact::to_f64(v) * x.powi(power as i32) * b;
        }
        let lau: f64 = self
            .exp_laurent
            .iter()
            .map(|(&m, v)| exact::to_f64(v) * x.powi(m as i32))
            .sum();
        sum += scalar_fn::SQRT_PI * (-x).exp() * lau;
        sum += self
            .poly
            .iter()
            .map(|(&m, v)| exact::to_f64(v) * x.powi(m as i32))
            .sum::<f64>();
        Ok(sum * c.prefactor().value())
    }
}

impl NormalForm {
    /// Like [`eval_for`](Self::eval_for), but the Laurent parts are summed in
    /// exact arithmetic at the binary value of `x` and rounded once.
    pub fn eval_for_exact(&self, c: &BesselCombo, x: f64) -> Result<f64> {
        let xq = Q::from_float(x).ok_or_else(|| crate::error::Error::Domain(format!("x = {x}")))?;
        let laurent = |m: &BTreeMap<i64, Q>| -> f64 {
            let s: Q = m.iter().map(|(&k, v)| v * xq.pow(k as i32)).sum();
            exact::to_f64(&s)
        };
        let mut rest = self.clone();
        rest.exp_laurent.clear();
        rest.poly.clear();
        let mut sum = if rest.bessel.is_empty() {
            0.0
        } else {
            rest.eval_for(c, x)? / c.prefactor().value()
        };
        sum += scalar_fn::SQRT_PI * (-x).exp() * laurent(&self.exp_laurent);
        sum += laurent(&self.poly);
        Ok(sum * c.prefactor().value())
    }
}

/// Whether the rational part of `c` is identically zero as a function.
pub fn is_identically_zero(c: &BesselCombo) -> bool {
    normal_form(c).is_zero()
}
