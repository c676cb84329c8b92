//! Finite linear combinations Σ a · x^m · B̃_{α₀+ℓ}(x) with B̃ ∈ {Ĩ, K̃, 1}
//! and exact rational coefficients.
//!
//! A combo also carries one symbolic floating prefactor (1, 1/Γ(q) or √π)
//! that multiplies every term. Linear operations require equal prefactors.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::scalar_fn;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    I,
    K,
    One,
}

impl Kind {
    pub fn label(self) -> &'static str {
        match self {
            Kind::I => "I",
            Kind::K => "K",
            Kind::One => "One",
        }
    }

    fn parse(s: &str) -> Option<Kind> {
        match s {
            "I" => Some(Kind::I),
            "K" => Some(Kind::K),
            "One" => Some(Kind::One),
            _ => None,
        }
    }

    /// Sign of the derivative rule d/dz B̃_α = ±(z/2) B̃_{α+1}.
    fn derivative_sign(self) -> i64 {
        match self {
            Kind::I => 1,
            Kind::K => -1,
            Kind::One => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Prefactor {
    Unit,
    /// 1/Γ(q)
    InvGamma(Q),
    SqrtPi,
}

impl Prefactor {
    pub fn value(&self) -> f64 {
        match self {
            Prefactor::Unit => 1.0,
            Prefactor::InvGamma(q) => scalar_fn::rgamma(exact::to_f64(q)),
            Prefactor::SqrtPi => std::f64::consts::PI.sqrt(),
        }
    }
}

impl fmt::Display for Prefactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prefactor::Unit => write!(f, "1"),
            Prefactor::InvGamma(q) => write!(f, "1/Gamma({q})"),
            Prefactor::SqrtPi => write!(f, "sqrt(pi)"),
        }
    }
}

/// One term coeff · x^power · B̃_{α₀+shift}.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub kind: Kind,
    pub power: i64,
    pub shift: u32,
    pub coeff: Q,
}

type Key = (Kind, u32, i64);

#[derive(Clone, Debug, PartialEq)]
pub struct BesselCombo {
    base_order: Q,
    prefactor: Prefactor,
    terms: BTreeMap<Key, Q>,
}

impl BesselCombo {
    pub fn zero(base_order: Q) -> Self {
        Self {
            base_order,
            prefactor: Prefactor::Unit,
            terms: BTreeMap::new(),
        }
    }

    pub fn single(base_order: Q, kind: Kind, power: i64, shift: u32, coeff: Q) -> Self {
        let mut c = Self::zero(base_order);
        c.add_term(kind, power, shift, coeff);
        c
    }

    /// coeff · x^power as a combo.
    pub fn monomial(base_order: Q, power: i64, coeff: Q) -> Self {
        Self::single(base_order, Kind::One, power, 0, coeff)
    }

    pub fn with_prefactor(mut self, prefactor: Prefactor) -> Self {
        self.prefactor = prefactor;
        self
    }

    pub fn base_order(&self) -> &Q {
        &self.base_order
    }

    pub fn prefactor(&self) -> &Prefactor {
        &self.prefactor
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order (kind, shift, power).
    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms.iter().map(|(&(kind, shift, power), c)| Term {
            kind,
            power,
            shift,
            coeff: c.clone(),
        })
    }

    pub fn coeff(&self, kind: Kind, power: i64, shift: u32) -> Q {
        let shift = if kind == Kind::One { 0 } else { shift };
        self.terms
            .get(&(kind, shift, power))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, kind: Kind, power: i64, shift: u32, coeff: Q) {
        if coeff.is_zero() {
            return;
        }
        let shift = if kind == Kind::One { 0 } else { shift };
        let key = (kind, shift, power);
        let entry = self.terms.entry(key).or_insert_with(Q::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn has_kind(&self, kind: Kind) -> bool {
        self.terms.keys().any(|k| k.0 == kind)
    }

    pub fn only_kind(&self, kind: Kind) -> bool {
        self.terms.keys().all(|k| k.0 == kind)
    }

    pub fn min_power(&self) -> Option<i64> {
        self.terms.keys().map(|k| k.2).min()
    }

    pub fn max_shift(&self) -> Option<u32> {
        self.terms
            .keys()
            .filter(|k| k.0 != Kind::One)
            .map(|k| k.1)
            .max()
    }

    fn map_terms(&self, f: impl Fn(&Key, &Q, &mut BesselCombo)) -> Self {
        let mut out = Self::zero(self.base_order.clone()).with_prefactor(self.prefactor.clone());
        for (k, c) in &self.terms {
            f(k, c, &mut out);
        }
        out
    }

    /// θ = x d/dx applied termwise.
    pub fn theta(&self) -> Self {
        self.map_terms(|&(kind, shift, power), a, out| {
            out.add_term(kind, power, shift, a * exact::q(power));
            let s = kind.derivative_sign();
            if s != 0 {
                out.add_term(kind, power + 2, shift + 1, a * exact::qf(s, 2));
            }
        })
    }

    /// d/dx applied termwise.
    pub fn ddx(&self) -> Self {
        self.map_terms(|&(kind, shift, power), a, out| {
            out.add_term(kind, power - 1, shift, a * exact::q(power));
            let s = kind.derivative_sign();
            if s != 0 {
                out.add_term(kind, power + 1, shift + 1, a * exact::qf(s, 2));
            }
        })
    }

    /// Multiplication by x^k.
    pub fn mul_x_pow(&self, k: i64) -> Self {
        self.map_terms(|&(kind, shift, power), a, out| {
            out.add_term(kind, power + k, shift, a.clone());
        })
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero(self.base_order.clone()).with_prefactor(self.prefactor.clone());
        }
        self.map_terms(|&(kind, shift, power), a, out| {
            out.add_term(kind, power, shift, a * s);
        })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.base_order != other.base_order {
            return Err(Error::BaseOrderMismatch {
                left: self.base_order.to_string(),
                right: other.base_order.to_string(),
            });
        }
        // An empty combo adopts any prefactor.
        if self.prefactor != other.prefactor && !self.is_zero() && !other.is_zero() {
            return Err(Error::PrefactorMismatch {
                left: self.prefactor.to_string(),
                right: other.prefactor.to_string(),
            });
        }
        Ok(())
    }

    /// self + s · other
    pub fn add_scaled(&mut self, s: &Q, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        if self.is_zero() {
            self.prefactor = other.prefactor.clone();
        }
        for (&(kind, shift, power), c) in &other.terms {
            self.add_term(kind, power, shift, c * s);
        }
        Ok(())
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(&Q::one(), other)?;
        Ok(out)
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(&-Q::one(), other)?;
        Ok(out)
    }

    /// Product with a combo made only of One-kind terms.
    pub fn mul_poly(&self, poly: &Self) -> Result<Self> {
        if !poly.only_kind(Kind::One) {
            return Err(Error::InvalidParams(
                "combo products need one factor of kind One only".into(),
            ));
        }
        if self.base_order != poly.base_order {
            return Err(Error::BaseOrderMismatch {
                left: self.base_order.to_string(),
                right: poly.base_order.to_string(),
            });
        }
        let prefactor = match (&self.prefactor, &poly.prefactor) {
            (p, Prefactor::Unit) => p.clone(),
            (Prefactor::Unit, p) => p.clone(),
            (a, b) => {
                return Err(Error::PrefactorMismatch {
                    left: a.to_string(),
                    right: b.to_string(),
                })
            }
        };
        let mut out = Self::zero(self.base_order.clone()).with_prefactor(prefactor);
        for (&(kind, shift, power), a) in &self.terms {
            for (&(_, _, p2), b) in &poly.terms {
                out.add_term(kind, power + p2, shift, a * b);
            }
        }
        Ok(out)
    }

    /// Point value Σ a·x^m·B̃_{α₀+ℓ}(x) times the prefactor.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.eval_parts(x).map(|(v, _)| v)
    }

    /// Σ |a·x^m·B̃_{α₀+ℓ}(x)| times |prefactor|, the cancellation scale of `eval`.
    pub fn eval_abs(&self, x: f64) -> Result<f64> {
        self.eval_parts(x).map(|(_, s)| s)
    }

    /// (value, absolute-term sum) in one pass.
    pub fn eval_parts(&self, x: f64) -> Result<(f64, f64)> {
        self.eval_parts_pow(x, 0.0)
    }

    /// x^e times the combo at x, with the power folded into each term so that
    /// large Bessel values near 0 do not overflow before the product.
    pub fn eval_times_pow(&self, x: f64, e: f64) -> Result<f64> {
        self.eval_parts_pow(x, e).map(|(v, _)| v)
    }

    fn eval_parts_pow(&self, x: f64, extra: f64) -> Result<(f64, f64)> {
        if self.is_zero() {
            return Ok((0.0, 0.0));
        }
        let has_k = self.has_kind(Kind::K);
        if has_k && !(x > 0.0) {
            return Err(Error::Domain(format!("K-Bessel term evaluated at x = {x}")));
        }
        let a0 = exact::to_f64(&self.base_order);
        let count = self.max_shift().map_or(0, |s| s as usize + 1);
        let ks = if has_k {
            scalar_fn::bessel_k_tilde_seq(a0, x, count)?
        } else {
            Vec::new()
        };
        let is = if self.has_kind(Kind::I) {
            scalar_fn::bessel_i_tilde_seq(a0, x, count)
        } else {
            Vec::new()
        };
        let mut sum = 0.0;
        let mut abs = 0.0;
        for (&(kind, shift, power), c) in &self.terms {
            let b = match kind {
                Kind::I => is[shift as usize],
                Kind::K => ks[shift as usize],
                Kind::One => 1.0,
            };
            let xp = if extra == 0.0 {
                pow_i(x, power)
            } else {
                x.powf(power as f64 + extra)
            };
            let mut t = exact::to_f64(c) * xp * b;
            if !t.is_finite() && kind == Kind::K {
                // K̃_a = (x/2)^{−2a} K̃_{−a}, combined with x^m in log form
                let a = a0 + shift as f64;
                let e = (power as f64 + extra) * x.ln() - 2.0 * a * (0.5 * x).ln();
                t = exact::to_f64(c) * e.exp() * scalar_fn::bessel_k_tilde(-a, x)?;
            }
            sum += t;
            abs += t.abs();
        }
        let p = self.prefactor.value();
        Ok((sum * p, abs * p.abs()))
    }

    /// Stable text form: `kind:m:ℓ:num/den` joined by `+`, or `0` when empty.
    pub fn dump(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(&(kind, shift, power), c)| {
                format!(
                    "{}:{}:{}:{}/{}",
                    kind.label(),
                    power,
                    shift,
                    c.numer(),
                    c.denom()
                )
            })
            .collect::<Vec<_>>()
            .join("+")
    }

    /// Inverse of [`dump`](Self::dump); the prefactor is Unit.
    pub fn parse(base_order: Q, text: &str) -> Result<Self> {
        let mut out = Self::zero(base_order);
        let text = text.trim();
        if text == "0" {
            return Ok(out);
        }
        let bad = |s: &str| Error::InvalidParams(format!("malformed combo term '{s}'"));
        for part in text.split('+') {
            let fields: Vec<&str> = part.split(':').collect();
            if fields.len() != 4 {
                return Err(bad(part));
            }
            let kind = Kind::parse(fields[0]).ok_or_else(|| bad(part))?;
            let power: i64 = fields[1].parse().map_err(|_| bad(part))?;
            let shift: u32 = fields[2].parse().map_err(|_| bad(part))?;
            let (n, d) = fields[3].split_once('/').ok_or_else(|| bad(part))?;
            let n: num::BigInt = n.parse().map_err(|_| bad(part))?;
            let d: num::BigInt = d.parse().map_err(|_| bad(part))?;
            if d.is_zero() || d.is_negative() {
                return Err(bad(part));
            }
            out.add_term(kind, power, shift, Q::new(n, d));
        }
        Ok(out)
    }
}

impl fmt::Display for BesselCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dump())
    }
}

fn pow_i(x: f64, m: i64) -> f64 {
    if m >= i32::MIN as i64 && m <= i32::MAX as i64 {
        x.powi(m as i32)
    } else {
        x.powf(m as f64)
    }
}

/// Canonicalized linear combination Σ s_k · c_k of combos sharing base order.
pub fn combo_linear(ops: &[(Q, &BesselCombo)]) -> Result<BesselCombo> {
    let Some((_, first)) = ops.first() else {
        return Err(Error::InvalidParams("empty linear combination".into()));
    };
    let mut out = BesselCombo::zero(first.base_order.clone());
    for (s, c) in ops {
        out.add_scaled(s, c)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qf};
    use std::f64::consts::PI;

    fn k0(base: Q) -> BesselCombo {
        BesselCombo::single(base, Kind::K, 0, 0, q(1))
    }

    #[test]
    fn eval_examples() {
        // μ = 2, ν = −1: (1/Γ(2)) K̃_{−1/2}(x) = (√π/2) e^{−x}
        let c = k0(qf(-1, 2)).with_prefactor(Prefactor::InvGamma(q(2)));
        for &x in &[0.2, 1.0, 4.0] {
            let v = c.eval(x).unwrap();
            assert!((v - PI.sqrt() / 2.0 * (-x).exp()).abs() < 1e-15);
        }
        assert_eq!(BesselCombo::zero(q(0)).eval(3.0).unwrap(), 0.0);
        let m = BesselCombo::monomial(q(0), 3, q(2));
        assert!((m.eval(1.5).unwrap() - 6.75).abs() < 1e-15);
        assert!(c.eval(0.0).is_err());
        assert!(m.eval(-1.0).is_ok());
    }

    #[test]
    fn theta_examples() {
        let base = qf(3, 2);
        let t = k0(base.clone()).theta();
        assert_eq!(t.dump(), "K:2:1:-1/2");
        let t = BesselCombo::single(base.clone(), Kind::I, 0, 0, q(1)).theta();
        assert_eq!(t.dump(), "I:2:1:1/2");
        let t = BesselCombo::monomial(base, 5, q(3)).theta();
        assert_eq!(t.dump(), "One:5:0:15/1");
    }

    #[test]
    fn ddx_examples() {
        let d = k0(q(0)).ddx();
        assert_eq!(d.dump(), "K:1:1:-1/2");
        assert!(BesselCombo::monomial(q(0), 0, q(4)).ddx().is_zero());
    }

    #[test]
    fn linear_examples() {
        let c = k0(q(1));
        let z = combo_linear(&[(q(1), &c), (q(-1), &c)]).unwrap();
        assert!(z.is_zero());
        assert_eq!(c.mul_x_pow(2).dump(), "K:2:0:1/1");
        let s = combo_linear(&[(q(2), &c), (q(3), &c)]).unwrap();
        assert_eq!(s.dump(), "K:0:0:5/1");
        let other = k0(q(2));
        assert!(matches!(
            combo_linear(&[(q(1), &c), (q(1), &other)]),
            Err(Error::BaseOrderMismatch { .. })
        ));
    }

    #[test]
    fn canonical_order_is_kind_shift_power() {
        let mut c = BesselCombo::zero(q(0));
        c.add_term(Kind::One, 1, 0, q(1));
        c.add_term(Kind::K, 5, 0, q(1));
        c.add_term(Kind::K, 0, 1, q(1));
        c.add_term(Kind::I, 9, 2, q(1));
        assert_eq!(c.dump(), "I:9:2:1/1+K:5:0:1/1+K:0:1:1/1+One:1:0:1/1");
    }

    #[test]
    fn parse_roundtrip_and_errors() {
        let mut c = BesselCombo::zero(qf(1, 2));
        c.add_term(Kind::K, -3, 2, qf(-7, 4));
        c.add_term(Kind::One, 2, 0, qf(1, 3));
        let back = BesselCombo::parse(qf(1, 2), &c.dump()).unwrap();
        assert_eq!(back, c);
        assert!(BesselCombo::parse(q(0), "K:1:2").is_err());
        assert!(BesselCombo::parse(q(0), "Q:1:2:1/1").is_err());
        assert!(BesselCombo::parse(q(0), "K:1:2:1/0").is_err());
        assert!(BesselCombo::parse(q(0), "0").unwrap().is_zero());
    }

    #[test]
    fn mul_poly_requires_one_kind() {
        let c = k0(q(0));
        let p = BesselCombo::monomial(q(0), 2, q(3));
        assert_eq!(c.mul_poly(&p).unwrap().dump(), "K:2:0:3/1");
        assert!(c.mul_poly(&c).is_err());
    }

    #[test]
    fn prefactor_mismatch_is_rejected() {
        let a = k0(q(0)).with_prefactor(Prefactor::SqrtPi);
        let b = k0(q(0)).with_prefactor(Prefactor::Unit);
        assert!(matches!(a.plus(&b), Err(Error::PrefactorMismatch { .. })));
        let z = BesselCombo::zero(q(0));
        assert_eq!(z.plus(&a).unwrap().prefactor(), &Prefactor::SqrtPi);
    }
}
