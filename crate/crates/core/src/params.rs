//! The parameter pair (μ, ν) carried by every formula.

use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::jordan;

#[derive(Clone, Debug, PartialEq)]
pub struct ParamPair {
    mu: f64,
    nu: f64,
    mu_q: Q,
    nu_q: Q,
}

/// Derived booleans of a parameter pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamFlags {
    pub mu_not_neg_int: bool,
    pub ic_oddmu: bool,
    pub xi_member: bool,
}

impl ParamPair {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        let mu_q = exact::rational_from_f64(mu)
            .ok_or_else(|| Error::InvalidParams(format!("mu = {mu} is not finite")))?;
        let nu_q = exact::rational_from_f64(nu)
            .ok_or_else(|| Error::InvalidParams(format!("nu = {nu} is not finite")))?;
        Ok(Self { mu, nu, mu_q, nu_q })
    }

    pub fn from_exact(mu: Q, nu: Q) -> Self {
        Self {
            mu: exact::to_f64(&mu),
            nu: exact::to_f64(&nu),
            mu_q: mu,
            nu_q: nu,
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn mu_exact(&self) -> &Q {
        &self.mu_q
    }

    pub fn nu_exact(&self) -> &Q {
        &self.nu_q
    }

    /// (ν, μ), the pair with roles exchanged.
    pub fn swapped(&self) -> Self {
        Self::from_exact(self.nu_q.clone(), self.mu_q.clone())
    }

    /// The pair shifted by (dμ, dν).
    pub fn shifted(&self, dmu: i64, dnu: i64) -> Self {
        Self::from_exact(&self.mu_q + exact::q(dmu), &self.nu_q + exact::q(dnu))
    }

    pub fn mu_not_neg_int(&self) -> bool {
        !(self.mu_q.is_integer() && self.mu < 0.0)
    }

    /// μ is an odd integer ≥ 1.
    pub fn ic_oddmu(&self) -> bool {
        self.odd_mu().is_some()
    }

    pub fn odd_mu(&self) -> Option<u32> {
        let m = exact::as_i64(&self.mu_q)?;
        (m >= 1 && m % 2 == 1).then_some(m as u32)
    }

    pub fn xi_member(&self) -> bool {
        jordan::xi_contains(self.mu, self.nu).member
    }

    pub fn flags(&self) -> ParamFlags {
        ParamFlags {
            mu_not_neg_int: self.mu_not_neg_int(),
            ic_oddmu: self.ic_oddmu(),
            xi_member: self.xi_member(),
        }
    }

    /// Whether family `i` can be built for these parameters.
    pub fn admits_family(&self, i: u8) -> bool {
        match i {
            1 | 2 => self.mu_not_neg_int(),
            3 | 4 => self.ic_oddmu(),
            _ => false,
        }
    }
}

impl fmt::Display for ParamPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mu={} nu={}", self.mu, self.nu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags() {
        let p = ParamPair::new(3.0, -1.0).unwrap();
        assert!(p.ic_oddmu());
        assert_eq!(p.odd_mu(), Some(3));
        assert!(p.mu_not_neg_int());
        assert!(p.xi_member());
        let p = ParamPair::new(2.5, -1.0).unwrap();
        assert!(!p.ic_oddmu());
        assert_eq!(p.mu_exact(), &exact::qf(5, 2));
        let p = ParamPair::new(-2.0, 0.0).unwrap();
        assert!(!p.mu_not_neg_int());
        assert!(!p.admits_family(1));
        assert!(ParamPair::new(f64::NAN, 0.0).is_err());
    }
}
