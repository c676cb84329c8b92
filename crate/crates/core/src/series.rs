//! Truncated power series in the generating variable t with combo
//! coefficients, and the construction of the four generating functions
//!
//! G_i(t, x) = (1−t)^{−(μ+ν+2)/2} A_i(tx/(1−t)) B_i(x/(1−t))
//!
//! with A ∈ {Ĩ_{μ/2}, K̃_{μ/2}} and B ∈ {Ĩ_{ν/2}, K̃_{ν/2}}.
//!
//! Write u = t/(1−t), so tx/(1−t) = xu and x/(1−t) = x + xu. The inner factor
//! is expanded in u: Ĩ_{μ/2} by its power series, K̃_{μ/2} (μ odd) by its
//! closed form times the exponential series, and the outer factor by Taylor's
//! formula B(x + xu) = Σ_m (xu)^m B^{(m)}(x)/m! with derivatives produced by
//! the exact derivative rule. The u-series is then re-expanded in t through
//! u^k = Σ_m C(k+m−1, m) t^{k+m} and multiplied by the binomial series.

use num::{One, Zero};

use crate::combo::{BesselCombo, Kind, Prefactor};
use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::params::ParamPair;

/// Σ_{j=v}^{N} c_j t^j.
#[derive(Clone, Debug, PartialEq)]
pub struct TSeries {
    order: i64,
    valuation: i64,
    coeffs: Vec<BesselCombo>,
}

impl TSeries {
    /// Series with all coefficients zero.
    pub fn zero(base_order: Q, valuation: i64, order: i64) -> Result<Self> {
        if order < valuation {
            return Err(Error::InvalidParams(format!(
                "series order {order} below valuation {valuation}"
            )));
        }
        let n = (order - valuation + 1) as usize;
        Ok(Self {
            order,
            valuation,
            coeffs: vec![BesselCombo::zero(base_order); n],
        })
    }

    pub fn from_coeffs(valuation: i64, coeffs: Vec<BesselCombo>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParams(
                "series needs at least one coefficient".into(),
            ));
        }
        let order = valuation + coeffs.len() as i64 - 1;
        Ok(Self {
            order,
            valuation,
            coeffs,
        })
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    /// Coefficient of t^j; `None` above the truncation order, zero below the valuation.
    pub fn coeff(&self, j: i64) -> Option<BesselCombo> {
        if j > self.order {
            return None;
        }
        if j < self.valuation {
            let base = self.coeffs[0].base_order().clone();
            return Some(
                BesselCombo::zero(base).with_prefactor(self.coeffs[0].prefactor().clone()),
            );
        }
        Some(self.coeffs[(j - self.valuation) as usize].clone())
    }

    pub fn coeffs(&self) -> &[BesselCombo] {
        &self.coeffs
    }

    /// Coefficients t^v..t^n for n ≤ order.
    pub fn truncate(&self, n: i64) -> Result<Self> {
        if n > self.order || n < self.valuation {
            return Err(Error::InvalidParams(format!(
                "cannot truncate order {} series at {n}",
                self.order
            )));
        }
        let keep = (n - self.valuation + 1) as usize;
        Self::from_coeffs(self.valuation, self.coeffs[..keep].to_vec())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let v = self.valuation.min(other.valuation);
        let n = self.order.min(other.order);
        let mut coeffs = Vec::new();
        for j in v..=n {
            let a = self.coeff(j).expect("within order");
            let b = other.coeff(j).expect("within order");
            coeffs.push(a.plus(&b)?);
        }
        Self::from_coeffs(v, coeffs)
    }

    /// Product, exact up to the combined truncation order. One factor must
    /// have only One-kind coefficients.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (series, poly) = if other.coeffs.iter().all(|c| c.only_kind(Kind::One)) {
            (self, other)
        } else if self.coeffs.iter().all(|c| c.only_kind(Kind::One)) {
            (other, self)
        } else {
            return Err(Error::InvalidParams(
                "series product needs one factor with One-kind coefficients".into(),
            ));
        };
        let v = self.valuation + other.valuation;
        let n = (self.order + other.valuation).min(other.order + self.valuation);
        let base = series.coeffs[0].base_order().clone();
        let mut coeffs = Vec::new();
        for j in v..=n {
            let mut acc = BesselCombo::zero(base.clone());
            for a in series.valuation..=series.order {
                let b = j - a;
                if b < poly.valuation || b > poly.order {
                    continue;
                }
                let term = series.coeff(a).unwrap().mul_poly(&poly.coeff(b).unwrap())?;
                acc.add_scaled(&Q::one(), &term)?;
            }
            coeffs.push(acc);
        }
        Self::from_coeffs(v, coeffs)
    }

    /// Product with a scalar power series Σ s_k t^k.
    pub fn mul_scalar_series(&self, s: &[Q]) -> Result<Self> {
        let base = self.coeffs[0].base_order().clone();
        let n = self.order.min(self.valuation + s.len() as i64 - 1);
        let mut coeffs = Vec::new();
        for j in self.valuation..=n {
            let mut acc = BesselCombo::zero(base.clone());
            for a in self.valuation..=j {
                let k = (j - a) as usize;
                acc.add_scaled(&s[k], &self.coeffs[(a - self.valuation) as usize])?;
            }
            coeffs.push(acc);
        }
        Self::from_coeffs(self.valuation, coeffs)
    }

    fn with_prefactor(mut self, p: Prefactor) -> Self {
        self.coeffs = self
            .coeffs
            .into_iter()
            .map(|c| c.with_prefactor(p.clone()))
            .collect();
        self
    }
}

/// Coefficients of (1−t)^{−a} up to t^n.
pub fn binomial_series(a: &Q, n: usize) -> Vec<Q> {
    let mut out = Vec::with_capacity(n + 1);
    let mut c = Q::one();
    for k in 0..=n {
        out.push(c.clone());
        let kq = exact::q(k as i64);
        c = c * (a + &kq) / (kq + Q::one());
    }
    out
}

/// Validates the parameters for family `i` and returns μ as an odd integer
/// when the family needs it.
fn check_family(i: u8, params: &ParamPair) -> Result<Option<u32>> {
    if !(1..=4).contains(&i) {
        return Err(Error::InvalidParams(format!(
            "family index {i} not in 1..4"
        )));
    }
    if !params.mu_not_neg_int() {
        return Err(Error::InvalidParams(format!(
            "mu = {} is a negative integer",
            params.mu()
        )));
    }
    if i >= 3 {
        return match params.odd_mu() {
            Some(m) => Ok(Some(m)),
            None => Err(Error::InvalidParams(format!(
                "families 3 and 4 need mu an odd integer >= 1, got {}",
                params.mu()
            ))),
        };
    }
    Ok(None)
}

/// The generating series of family `i` whose t^j coefficient is Λ_{i,j}, for
/// j from the valuation (0 for i = 1, 2 and −μ for i = 3, 4) up to `order`.
pub fn build_generating_series(i: u8, params: &ParamPair, order: i64) -> Result<TSeries> {
    let odd_mu = check_family(i, params)?;
    if order < 0 {
        return Err(Error::InvalidParams(format!("series order {order} < 0")));
    }
    let mu = params.mu_exact().clone();
    let nu = params.nu_exact().clone();
    let base = &nu / exact::q(2);
    let shift = odd_mu.unwrap_or(0) as i64;
    let top = (order + shift) as usize;

    // Inner factor as a u-series of One-kind monomials.
    let inner: Vec<BesselCombo> = match odd_mu {
        None => {
            // Ĩ_{μ/2}(xu) Γ(μ/2+1) = Σ_n x^{2n}u^{2n}/(4^n n! (μ/2+1)_n)
            let a = &mu / exact::q(2) + Q::one();
            let mut out = vec![BesselCombo::zero(base.clone()); top + 1];
            let mut c = Q::one();
            let mut n = 0usize;
            while 2 * n <= top {
                out[2 * n] = BesselCombo::monomial(base.clone(), 2 * n as i64, c.clone());
                let nq = exact::q(n as i64);
                c = c / (exact::q(4) * (&nq + Q::one()) * (&a + &nq));
                n += 1;
            }
            out
        }
        Some(m) => {
            // K̃_{μ/2}(xu) t^μ / √π = (1−t)^μ x^{−μ} e^{−xu} Σ_i c_i (2xu)^i
            let m = m as i64;
            let h = (m - 1) / 2;
            let ci: Vec<Q> = (0..=h)
                .map(|i| {
                    Q::new(
                        exact::factorial((m - i - 1) as u64),
                        exact::factorial((h - i) as u64) * exact::factorial(i as u64),
                    ) * Q::from_integer(num::BigInt::from(2).pow(i as u32))
                })
                .collect();
            (0..=top as i64)
                .map(|k| {
                    let mut s = Q::zero();
                    for (i, c) in ci.iter().enumerate() {
                        let i = i as i64;
                        if i > k {
                            break;
                        }
                        let e = Q::new(1.into(), exact::factorial((k - i) as u64));
                        if (k - i) % 2 == 0 {
                            s += c * e;
                        } else {
                            s -= c * e;
                        }
                    }
                    BesselCombo::monomial(base.clone(), k - m, s)
                })
                .collect()
        }
    };

    // Outer factor: x^m B^{(m)}(x)/m! as the coefficient of u^m.
    let outer_kind = if i == 1 || i == 3 { Kind::I } else { Kind::K };
    let mut outer = Vec::with_capacity(top + 1);
    let mut deriv = BesselCombo::single(base.clone(), outer_kind, 0, 0, Q::one());
    let mut fact = Q::one();
    for m in 0..=top {
        if m > 0 {
            deriv = deriv.ddx();
            fact *= exact::q(m as i64);
        }
        outer.push(deriv.mul_x_pow(m as i64).scale(&fact.recip()));
    }

    // Product in u.
    let mut in_u = Vec::with_capacity(top + 1);
    for k in 0..=top {
        let mut acc = BesselCombo::zero(base.clone());
        for a in 0..=k {
            if inner[a].is_zero() {
                continue;
            }
            acc.add_scaled(&Q::one(), &outer[k - a].mul_poly(&inner[a])?)?;
        }
        in_u.push(acc);
    }

    // u^k = Σ_m C(k+m−1, m) t^{k+m}
    let mut in_t = vec![BesselCombo::zero(base.clone()); top + 1];
    in_t[0] = in_u[0].clone();
    for (k, c) in in_u.iter().enumerate().skip(1) {
        if c.is_zero() {
            continue;
        }
        for m in 0..=(top - k) {
            let b = Q::from_integer(exact::binomial((k + m - 1) as i64, m as i64));
            in_t[k + m].add_scaled(&b, c)?;
        }
    }

    // (1−t)^{−(μ+ν+2)/2}, times (1−t)^μ for the odd-μ families.
    let mut expo = (&mu + &nu + exact::q(2)) / exact::q(2);
    if odd_mu.is_some() {
        expo -= &mu;
    }
    let series = TSeries::from_coeffs(0, in_t)?.mul_scalar_series(&binomial_series(&expo, top))?;

    let prefactor = match odd_mu {
        None => Prefactor::InvGamma(&mu / exact::q(2) + Q::one()),
        Some(_) => Prefactor::SqrtPi,
    };
    let shifted = TSeries::from_coeffs(-shift, series.coeffs)?;
    Ok(shifted.with_prefactor(prefactor))
}
