//! The eigenfunction families Λ_{i,j}^{μ,ν}, i = 1..4.
//!
//! Combos come from the generating-series engine. For i = 1, 2 a second,
//! independent route runs the first-order recurrence in j from the seed
//! Λ_{i,0}; the two routes are compared exactly through
//! [`identity::is_identically_zero`](crate::identity::is_identically_zero).

use std::f64::consts::PI;

use num::complex::Complex64;
use num::{One, Zero};

use crate::combo::{BesselCombo, Kind, Prefactor};
use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::identity;
use crate::params::ParamPair;
use crate::quad::{self, QuadSpec};
use crate::scalar_fn::{self, gamma, laguerre, pochhammer};
use crate::series::build_generating_series;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LambdaIndex {
    pub i: u8,
    pub j: i64,
}

impl LambdaIndex {
    pub fn new(i: u8, j: i64) -> Self {
        Self { i, j }
    }
}

/// Lowest j with Λ_{i,j} ≠ 0 in general: 0 for i = 1, 2 and −μ for i = 3, 4.
pub fn valuation(i: u8, params: &ParamPair) -> Result<i64> {
    match i {
        1 | 2 => Ok(0),
        3 | 4 => params.odd_mu().map(|m| -(m as i64)).ok_or_else(|| {
            Error::InvalidParams(format!(
                "families 3 and 4 need mu an odd integer >= 1, got {}",
                params.mu()
            ))
        }),
        _ => Err(Error::InvalidParams(format!(
            "family index {i} not in 1..4"
        ))),
    }
}

fn prefactor_of(i: u8, params: &ParamPair) -> Prefactor {
    if i <= 2 {
        Prefactor::InvGamma(params.mu_exact() / exact::q(2) + Q::one())
    } else {
        Prefactor::SqrtPi
    }
}

fn zero_combo(i: u8, params: &ParamPair) -> BesselCombo {
    BesselCombo::zero(params.nu_exact() / exact::q(2)).with_prefactor(prefactor_of(i, params))
}

/// All Λ_{i,j} for j from `j_lo` to `j_hi`, from one series build.
#[derive(Clone, Debug)]
pub struct LambdaTable {
    pub i: u8,
    pub params: ParamPair,
    valuation: i64,
    combos: Vec<BesselCombo>,
}

impl LambdaTable {
    pub fn build(i: u8, params: &ParamPair, j_max: i64) -> Result<Self> {
        let v = valuation(i, params)?;
        let order = j_max.max(0);
        let s = build_generating_series(i, params, order)?;
        let combos = (v..=order)
            .map(|j| s.coeff(j).expect("within order"))
            .collect();
        Ok(Self {
            i,
            params: params.clone(),
            valuation: v,
            combos,
        })
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn j_max(&self) -> i64 {
        self.valuation + self.combos.len() as i64 - 1
    }

    /// Λ_{i,j}; the zero combo below the valuation.
    pub fn get(&self, j: i64) -> Result<BesselCombo> {
        if j < self.valuation {
            return Ok(zero_combo(self.i, &self.params));
        }
        self.combos
            .get((j - self.valuation) as usize)
            .cloned()
            .ok_or_else(|| {
                Error::InvalidParams(format!("j = {j} beyond table order {}", self.j_max()))
            })
    }

    pub fn eval(&self, j: i64, x: f64) -> Result<f64> {
        self.get(j)?.eval(x)
    }

    /// Λ_{i,j}(x) through the normal form; for half-integer ν/2 the elementary
    /// part is summed exactly, which removes the cancellation between terms.
    pub fn eval_precise(&self, j: i64, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("lambda evaluated at x = {x}")));
        }
        let c = self.get(j)?;
        identity::normal_form(&c).eval_for_exact(&c, x)
    }
}

pub fn lambda_combo(idx: LambdaIndex, params: &ParamPair) -> Result<BesselCombo> {
    LambdaTable::build(idx.i, params, idx.j)?.get(idx.j)
}

pub fn lambda_eval(idx: LambdaIndex, params: &ParamPair, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("lambda evaluated at x = {x}")));
    }
    lambda_combo(idx, params)?.eval(x)
}

/// H = θ + (μ+ν+2)/2 on combos.
pub fn apply_h_combo(c: &BesselCombo, params: &ParamPair) -> Result<BesselCombo> {
    let s = (params.mu_exact() + params.nu_exact() + exact::q(2)) / exact::q(2);
    c.theta().plus(&c.scale(&s))
}

/// Λ_{i,0}, …, Λ_{i,j_max} for i ∈ {1, 2} from the seed Λ_{i,0} = B̃_{ν/2}/Γ((μ+2)/2)
/// and the recurrence
/// (j+1)(j+μ+1)Λ_{j+1} = (2j+μ+1)HΛ_j + (j+(μ+ν)/2)(j+(μ−ν)/2)Λ_{j−1}.
pub fn lambda_combos_by_recurrence(
    i: u8,
    params: &ParamPair,
    j_max: i64,
) -> Result<Vec<BesselCombo>> {
    let kind = match i {
        1 => Kind::I,
        2 => Kind::K,
        _ => {
            return Err(Error::InvalidParams(
                "the recurrence route covers families 1 and 2".into(),
            ))
        }
    };
    if !params.mu_not_neg_int() {
        return Err(Error::InvalidParams(format!(
            "mu = {} is a negative integer",
            params.mu()
        )));
    }
    let mu = params.mu_exact().clone();
    let nu = params.nu_exact().clone();
    let base = &nu / exact::q(2);
    let seed = BesselCombo::single(base.clone(), kind, 0, 0, Q::one())
        .with_prefactor(prefactor_of(i, params));
    let mut out = vec![seed];
    let mut prev = zero_combo(i, params);
    let two = exact::q(2);
    for j in 0..j_max.max(0) {
        let jq = exact::q(j);
        let cur = out.last().unwrap().clone();
        let denom = (&jq + Q::one()) * (&jq + &mu + Q::one());
        if denom.is_zero() {
            return Err(Error::InvalidParams(format!(
                "recurrence denominator vanishes at j = {j}"
            )));
        }
        let a = exact::q(2) * &jq + &mu + Q::one();
        let b = (&jq + (&mu + &nu) / &two) * (&jq + (&mu - &nu) / &two);
        let mut next = apply_h_combo(&cur, params)?.scale(&a);
        next.add_scaled(&b, &prev)?;
        let next = next.scale(&denom.recip());
        prev = cur;
        out.push(next);
    }
    Ok(out)
}

/// (2j+μ+1)HΛ_j − (j+1)(j+μ+1)Λ_{j+1} + (j+(μ+ν)/2)(j+(μ−ν)/2)Λ_{j−1}, exactly.
pub fn recrel_h_residual(table: &LambdaTable, j: i64) -> Result<BesselCombo> {
    let p = &table.params;
    let mu = p.mu_exact();
    let nu = p.nu_exact();
    let jq = exact::q(j);
    let two = exact::q(2);
    let a = &two * &jq + mu + Q::one();
    let c = (&jq + Q::one()) * (&jq + mu + Q::one());
    let b = (&jq + (mu + nu) / &two) * (&jq + (mu - nu) / &two);
    let mut r = apply_h_combo(&table.get(j)?, p)?.scale(&a);
    r.add_scaled(&-c, &table.get(j + 1)?)?;
    r.add_scaled(&b, &table.get(j - 1)?)?;
    Ok(r)
}

/// Both sides of the x² recurrence at a point: (lhs, rhs, scale).
pub fn recrel_xsq_sides(table: &LambdaTable, j: i64, x: f64) -> Result<(f64, f64, f64)> {
    let mu = table.params.mu();
    let nu = table.params.nu();
    let jf = j as f64;
    let a = 6.0;
    let b = 12.0 * (mu + 1.0);
    let c = 0.5 * (17.0 * mu * mu - nu * nu + 36.0 * mu + 8.0);
    let d = 0.5 * (mu + 1.0) * (5.0 * mu * mu - nu * nu + 12.0 * mu - 4.0);
    let e = 0.25 * (mu - 1.0) * (mu + 2.0) * (mu + nu + 2.0) * (mu - nu + 2.0);
    let h = |k: f64| jf + k / 2.0;
    let quartic = (((a * jf + b) * jf + c) * jf + d) * jf + e;
    let coeffs = [
        2.0 * (jf + 1.0) * (jf + 2.0) * (jf + mu + 1.0) * (jf + mu + 2.0) * h(mu - 1.0),
        -8.0 * (jf + 1.0) * (jf + mu + 1.0) * h(mu - 1.0) * h(mu + 2.0) * h(mu + 3.0),
        2.0 * h(mu + 1.0) * quartic,
        -8.0 * h(mu - 1.0) * h(mu) * h(mu + 3.0) * h(mu + nu) * h(mu - nu),
        2.0 * h(mu + 3.0) * h(mu + nu - 2.0) * h(mu - nu - 2.0) * h(mu + nu) * h(mu - nu),
    ];
    let lead = 8.0 * h(mu - 1.0) * h(mu + 1.0) * h(mu + 3.0);
    let (v, s) = table.get(j)?.eval_parts(x)?;
    let lhs = lead * x * x * v;
    let mut rhs = 0.0;
    let mut scale = (lead * x * x).abs() * s;
    for (k, c) in coeffs.iter().enumerate() {
        let (v, s) = table.get(j + 2 - k as i64)?.eval_parts(x)?;
        rhs += c * v;
        scale += c.abs() * s;
    }
    Ok((lhs, rhs, scale))
}

/// δ(i) and ε(i) of the parameter-shift recurrences.
pub fn delta_epsilon(i: u8) -> (f64, f64) {
    let delta = if i <= 2 { 1.0 } else { -1.0 };
    let eps = if i == 1 || i == 3 { 1.0 } else { -1.0 };
    (delta, eps)
}

/// Which of the three parameter-shift recurrences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftRecurrence {
    Mu,
    Nu,
    Derivative,
}

/// Both sides of a parameter-shift recurrence at a point: (lhs, rhs, scale).
pub fn formula1_sides(
    which: ShiftRecurrence,
    i: u8,
    params: &ParamPair,
    j: i64,
    x: f64,
) -> Result<(f64, f64, f64)> {
    let (delta, eps) = delta_epsilon(i);
    let here = LambdaTable::build(i, params, j)?;
    let (a, sa) = here.get(j)?.eval_parts(x)?;
    let (b, sb) = here.get(j - 1)?.eval_parts(x)?;
    let q2 = (x / 2.0) * (x / 2.0);
    match which {
        ShiftRecurrence::Mu => {
            let lo = params.shifted(-2, 0);
            let hi = params.shifted(2, 0);
            let (l, sl) = LambdaTable::build(i, &lo, j)?.get(j)?.eval_parts(x)?;
            let (u, su) = LambdaTable::build(i, &hi, j)?.get(j - 2)?.eval_parts(x)?;
            let mu = params.mu();
            Ok((
                mu * (a - b),
                2.0 * delta * (l - q2 * u),
                mu.abs() * (sa + sb) + 2.0 * (sl + q2 * su),
            ))
        }
        ShiftRecurrence::Nu => {
            let lo = params.shifted(0, -2);
            let hi = params.shifted(0, 2);
            let (l, sl) = LambdaTable::build(i, &lo, j)?.get(j)?.eval_parts(x)?;
            let (u, su) = LambdaTable::build(i, &hi, j)?.get(j)?.eval_parts(x)?;
            let nu = params.nu();
            Ok((
                nu * (a - b),
                2.0 * eps * (l - q2 * u),
                nu.abs() * (sa + sb) + 2.0 * (sl + q2 * su),
            ))
        }
        ShiftRecurrence::Derivative => {
            let diff = here.get(j)?.minus(&here.get(j - 1)?)?.ddx();
            let (d, sd) = diff.eval_parts(x)?;
            let hi_mu = params.shifted(2, 0);
            let hi_nu = params.shifted(0, 2);
            let (u, su) = LambdaTable::build(i, &hi_mu, j)?
                .get(j - 2)?
                .eval_parts(x)?;
            let (w, sw) = LambdaTable::build(i, &hi_nu, j)?.get(j)?.eval_parts(x)?;
            let h = x / 2.0;
            Ok((d, delta * h * u + eps * h * w, sd + h * (su + sw)))
        }
    }
}

fn lag_prefactor(j: u32, mu: f64) -> Result<f64> {
    Ok(2f64.powf(mu - 1.0) * gamma(j as f64 + (mu + 1.0) / 2.0)? / gamma(j as f64 + mu + 1.0)?)
}

/// L_j^μ(z) summed exactly at the binary values of μ and z.
fn laguerre_at(j: u32, mu: f64, z: f64) -> Result<f64> {
    let bad = || Error::Domain(format!("Laguerre argument ({mu}, {z}) not finite"));
    let m = Q::from_float(mu).ok_or_else(bad)?;
    let zq = Q::from_float(z).ok_or_else(bad)?;
    Ok(exact::to_f64(&scalar_fn::laguerre_exact(j, &m, &zq)?))
}

/// Λ_{1,j}^{μ,−1} from the Laguerre closed form.
pub fn closed_form_lambda1_nu_minus1(j: u32, mu: f64, x: f64) -> Result<f64> {
    let c = lag_prefactor(j, mu)? / PI;
    Ok(c * ((-x).exp() * laguerre_at(j, mu, 2.0 * x)? + x.exp() * laguerre_at(j, mu, -2.0 * x)?))
}

/// Λ_{2,j}^{μ,ν} for ν = ±1 from the Laguerre closed forms.
pub fn closed_form_lambda2(j: u32, mu: f64, nu: f64, x: f64) -> Result<f64> {
    let base = lag_prefactor(j, mu)? * (-x).exp() * laguerre_at(j, mu, 2.0 * x)?;
    if nu == -1.0 {
        Ok(base)
    } else if nu == 1.0 {
        Ok(2.0 / x * base)
    } else {
        Err(Error::InvalidParams(format!(
            "closed form needs nu = ±1, got {nu}"
        )))
    }
}

/// The polynomial M_j^{μ,ν} for odd ν ≥ 1, with exact coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MPoly {
    pub degree: u32,
    pub coeffs: Vec<Q>,
}

impl MPoly {
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + exact::to_f64(c))
    }

    pub fn eval_exact(&self, x: &Q) -> Q {
        self.coeffs
            .iter()
            .rev()
            .fold(Q::zero(), |acc, c| acc * x + c)
    }
}

fn fact(n: i64) -> Q {
    Q::from_integer(exact::factorial(n as u64))
}

pub fn m_polynomial(j: u32, params: &ParamPair) -> Result<MPoly> {
    let nu = exact::as_i64(params.nu_exact())
        .filter(|n| *n >= 1 && n % 2 == 1)
        .ok_or_else(|| {
            Error::InvalidParams(format!(
                "M polynomials need nu an odd integer >= 1, got {}",
                params.nu()
            ))
        })?;
    if !params.mu_not_neg_int() {
        return Err(Error::InvalidParams(format!(
            "mu = {} is a negative integer",
            params.mu()
        )));
    }
    let mu = params.mu_exact();
    let a = (mu + Q::one()) / exact::q(2);
    let h = (nu - 1) / 2;
    let j = j as i64;
    let degree = j + h;
    let mut coeffs = Vec::with_capacity(degree as usize + 1);
    for k in 0..=degree {
        let mut s = Q::zero();
        for m in 0..=j {
            for n in 0..=(j - m) {
                let kn = k - n;
                if kn < 0 || kn > h - m {
                    continue;
                }
                // Γ(j+μ+1)/Γ(n+μ+1) · Γ(j−m+a)/Γ(j+a)
                let g1 = exact::pochhammer(&(exact::q(n) + mu + Q::one()), (j - n) as u64);
                let g2 = exact::pochhammer(&(exact::q(j - m) + &a), m as u64);
                if g2.is_zero() {
                    return Err(Error::InvalidParams(
                        "Gamma pole in M polynomial coefficient".into(),
                    ));
                }
                let num = fact(nu + n - k - 1);
                let den = fact(m) * fact(n) * fact(k - n) * fact(j - m - n) * fact(h + n - k - m);
                let term = g1 / g2 * num / den;
                if (m + n) % 2 == 0 {
                    s += term;
                } else {
                    s -= term;
                }
            }
        }
        coeffs.push(s);
    }
    Ok(MPoly {
        degree: degree as u32,
        coeffs,
    })
}

/// 2^μ Γ(j+(μ+1)/2)/Γ(j+μ+1) · x^{−ν} e^{−x} M_j(2x).
pub fn lambda2_via_mpoly(j: u32, params: &ParamPair, x: f64) -> Result<f64> {
    let m = m_polynomial(j, params)?;
    let mu = params.mu();
    let c = 2f64.powf(mu) * gamma(j as f64 + (mu + 1.0) / 2.0)? / gamma(j as f64 + mu + 1.0)?;
    Ok(c * x.powf(-params.nu()) * (-x).exp() * m.eval(2.0 * x))
}

/// M_j(0) from the small-x asymptotics of Λ_{2,j}.
pub fn m_constant_term(j: u32, params: &ParamPair) -> Result<f64> {
    let (mu, nu) = (params.mu(), params.nu());
    let jf = j as f64;
    Ok(2f64.powf(nu - mu - 1.0)
        * gamma(nu / 2.0)?
        * gamma(jf + mu + 1.0)?
        * pochhammer((mu - nu + 2.0) / 2.0, j)
        / (gamma(jf + 1.0)? * gamma((mu + 2.0) / 2.0)? * gamma(jf + (mu + 1.0) / 2.0)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Zero,
    Infinity,
}

/// Leading behaviour coefficient · x^exponent · (ln(x/2) if log_flag)
/// (times e^{±x} at infinity).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticLead {
    pub exponent: f64,
    pub coefficient: f64,
    pub log_flag: bool,
    pub side: Side,
    /// Only an upper bound is asserted (i = 3, 4 at infinity).
    pub bound_only: bool,
}

pub fn asymptotic_lead(idx: LambdaIndex, params: &ParamPair, side: Side) -> Result<AsymptoticLead> {
    let (i, j) = (idx.i, idx.j);
    let v = valuation(i, params)?;
    if j < v {
        return Err(Error::InvalidParams(format!(
            "j = {j} below the range of family {i}"
        )));
    }
    if !params.mu_not_neg_int() {
        return Err(Error::InvalidParams(format!(
            "mu = {} is a negative integer",
            params.mu()
        )));
    }
    let (mu, nu) = (params.mu(), params.nu());
    match side {
        Side::Zero => {
            let lead = |exponent, coefficient, log_flag| AsymptoticLead {
                exponent,
                coefficient,
                log_flag,
                side,
                bound_only: false,
            };
            match i {
                1 => {
                    let c = pochhammer((mu + nu + 2.0) / 2.0, j as u32)
                        / (gamma(j as f64 + 1.0)?
                            * gamma((mu + 2.0) / 2.0)?
                            * gamma((nu + 2.0) / 2.0)?);
                    Ok(lead(0.0, c, false))
                }
                2 => {
                    let c = pochhammer((mu - nu.abs() + 2.0) / 2.0, j as u32)
                        / (gamma(j as f64 + 1.0)? * gamma((mu + 2.0) / 2.0)?);
                    if nu > 0.0 {
                        Ok(lead(-nu, c * 2f64.powf(nu - 1.0) * gamma(nu / 2.0)?, false))
                    } else if nu == 0.0 {
                        Ok(lead(0.0, -c, true))
                    } else {
                        Ok(lead(0.0, c * 0.5 * gamma(-nu / 2.0)?, false))
                    }
                }
                3 => {
                    let n = (j - v) as u32;
                    let c = 2f64.powf(mu - 1.0)
                        * gamma(mu / 2.0)?
                        * pochhammer((-mu + nu + 2.0) / 2.0, n)
                        / (gamma(n as f64 + 1.0)? * gamma((nu + 2.0) / 2.0)?);
                    Ok(lead(-mu, c, false))
                }
                _ => {
                    let n = (j - v) as u32;
                    let c = gamma(mu / 2.0)? * pochhammer((-mu - nu.abs() + 2.0) / 2.0, n)
                        / gamma(n as f64 + 1.0)?;
                    if nu > 0.0 {
                        Ok(lead(
                            -mu - nu,
                            c * 2f64.powf(mu + nu - 2.0) * gamma(nu / 2.0)?,
                            false,
                        ))
                    } else if nu == 0.0 {
                        Ok(lead(-mu, -c * 2f64.powf(mu - 1.0), true))
                    } else {
                        Ok(lead(
                            -mu,
                            c * 2f64.powf(mu - 2.0) * gamma(-nu / 2.0)?,
                            false,
                        ))
                    }
                }
            }
        }
        Side::Infinity => {
            let combo = lambda_combo(idx, params)?;
            let a0 = nu / 2.0;
            let top = combo.terms().map(|t| t.power - t.shift as i64).max();
            let Some(top) = top else {
                return Ok(AsymptoticLead {
                    exponent: j as f64 - (nu + 1.0) / 2.0,
                    coefficient: 0.0,
                    log_flag: false,
                    side,
                    bound_only: i >= 3,
                });
            };
            let mut c = 0.0;
            for t in combo.terms().filter(|t| t.power - t.shift as i64 == top) {
                let order = a0 + t.shift as f64;
                let k = match t.kind {
                    Kind::K => (PI / 2.0).sqrt(),
                    Kind::I => 1.0 / (2.0 * PI).sqrt(),
                    Kind::One => 0.0,
                };
                c += exact::to_f64(&t.coeff) * 2f64.powf(order) * k;
            }
            c *= combo.prefactor().value();
            Ok(AsymptoticLead {
                exponent: top as f64 - a0 - 0.5,
                coefficient: c,
                log_flag: false,
                side,
                bound_only: i >= 3,
            })
        }
    }
}

/// a_α = e^{−απi} and b_α = Γ(1−α/2)Γ(α/2)/2 · (e^{−απi} − 1).
pub fn monodromy_coeffs(alpha: f64) -> Result<(Complex64, Complex64)> {
    if alpha.fract() == 0.0 && (alpha as i64) % 2 != 0 {
        let n = (alpha as i64 - 1).div_euclid(2);
        let b = if (n + 1) % 2 == 0 { PI } else { -PI };
        return Ok((Complex64::new(-1.0, 0.0), Complex64::new(b, 0.0)));
    }
    if (alpha / 2.0).fract() == 0.0 {
        return Err(Error::Unsupported(format!(
            "monodromy coefficient b_alpha is resonant at alpha = {alpha}"
        )));
    }
    let a = Complex64::from_polar(1.0, -alpha * PI);
    let g = gamma(1.0 - alpha / 2.0)? * gamma(alpha / 2.0)? / 2.0;
    Ok((a, (a - 1.0) * g))
}

/// Lower-triangular matrix M with (Λ_1..Λ_4)(e^{iπ}x) = M (Λ_1..Λ_4)(x).
pub fn monodromy_matrix(params: &ParamPair) -> Result<[[Complex64; 4]; 4]> {
    let (a_nu, b_nu) = monodromy_coeffs(params.nu())?;
    let (a_mu, b_mu) = monodromy_coeffs(params.mu())?;
    let z = Complex64::zero();
    let one = Complex64::new(1.0, 0.0);
    Ok([
        [one, z, z, z],
        [b_nu, a_nu, z, z],
        [b_mu, z, a_mu, z],
        [b_mu * b_nu, a_nu * b_mu, a_mu * b_nu, a_mu * a_nu],
    ])
}

/// Λ_{i,j}(e^{iπ}x) through the monodromy row of family i. Only the
/// families with a non-zero entry in that row are evaluated.
pub fn lambda_at_minus_x(i: u8, j: i64, params: &ParamPair, x: f64) -> Result<Complex64> {
    if !(1..=4).contains(&i) {
        return Err(Error::InvalidParams(format!(
            "family index {i} not in 1..4"
        )));
    }
    let row = match i {
        1 => [
            Complex64::new(1.0, 0.0),
            Complex64::zero(),
            Complex64::zero(),
            Complex64::zero(),
        ],
        2 => {
            let (a, b) = monodromy_coeffs(params.nu())?;
            [b, a, Complex64::zero(), Complex64::zero()]
        }
        _ => monodromy_matrix(params)?[i as usize - 1],
    };
    let mut sum = Complex64::zero();
    for (k, c) in row.iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        sum += c * lambda_eval(LambdaIndex::new(k as u8 + 1, j), params, x)?;
    }
    Ok(sum)
}

fn sin_pow(t: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        t.sin().powf(p)
    }
}

/// Λ_{i,j}(x), i ∈ {1, 2}, from the Laguerre-kernel integral representations.
pub fn integral_rep_eval(i: u8, j: u32, params: &ParamPair, x: f64, tol: f64) -> Result<f64> {
    let (mu, nu) = (params.mu(), params.nu());
    if !(i == 1 || i == 2) {
        return Err(Error::InvalidParams(format!(
            "integral representations cover i = 1, 2, not {i}"
        )));
    }
    if !(mu > -1.0) || !(nu > -1.0 || nu == -1.0) {
        return Err(Error::InvalidParams(format!(
            "integral representation needs mu, nu > -1 or nu = -1, got {params}"
        )));
    }
    if !(x > 0.0) {
        return Err(Error::Domain(format!("integral representation at x = {x}")));
    }
    let refine = 12;
    if nu == -1.0 {
        let alpha = (mu - 1.0) / 2.0;
        let g = gamma((mu + 1.0) / 2.0)?;
        let inner = |sign: f64| -> Result<f64> {
            let mut err = None;
            let r = quad::integrate_finite(
                |t| match laguerre(j, alpha, x * (t.cos() + sign)) {
                    Ok(l) => (-sign * x).exp() * l * sin_pow(t, mu),
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                },
                0.0,
                PI,
                tol,
                refine,
            )?;
            err.map_or(Ok(r.value), Err)
        };
        return if i == 2 {
            Ok(inner(1.0)? / (2.0 * g))
        } else {
            Ok((inner(1.0)? + inner(-1.0)?) / (2.0 * PI * g))
        };
    }
    let alpha = (mu + nu) / 2.0;
    let c = 1.0 / (gamma((mu + 1.0) / 2.0)? * gamma((nu + 1.0) / 2.0)?);
    let outer = quad::integrate_finite(
        |t| {
            let ct = t.cos();
            let st = sin_pow(t, mu);
            let inner = if i == 1 {
                quad::integrate_finite(
                    |p| {
                        (-x * p.cos()).exp()
                            * laguerre(j, alpha, x * (ct + p.cos())).unwrap_or(f64::NAN)
                            * sin_pow(p, nu)
                    },
                    0.0,
                    PI,
                    tol,
                    refine,
                )
            } else {
                let spec = QuadSpec {
                    tol,
                    max_refine: refine,
                    split_point: 1.0,
                    tail_bound_rate: x.min(1.0),
                };
                quad::integrate_halfline(
                    |p| {
                        let ch = p.cosh();
                        let sh = if nu == 0.0 { 1.0 } else { p.sinh().powf(nu) };
                        (-x * ch).exp() * laguerre(j, alpha, x * (ct + ch)).unwrap_or(f64::NAN) * sh
                    },
                    &spec,
                )
            };
            match inner {
                Ok(r) => r.value * st,
                Err(_) => f64::NAN,
            }
        },
        0.0,
        PI,
        tol,
        refine,
    )?;
    let scale = if i == 1 { c / PI } else { c };
    Ok(scale * outer.value)
}

/// Closed-form ‖Λ_{2,j}‖² in L²(x^{μ+ν+1}dx).
pub fn norm_squared(params: &ParamPair, j: u32) -> Result<f64> {
    let (mu, nu) = (params.mu(), params.nu());
    let jf = j as f64;
    Ok(2f64.powf(mu + nu - 1.0)
        * gamma(jf + (mu + nu + 2.0) / 2.0)?
        * gamma(jf + (mu - nu + 2.0) / 2.0)?
        / (gamma(jf + 1.0)? * (2.0 * jf + mu + 1.0) * gamma(jf + mu + 1.0)?))
}

/// ∫Λ_{2,j} x^{μ+1} dx in closed form.
pub fn moment_mu(params: &ParamPair, j: u32) -> Result<f64> {
    let (mu, nu) = (params.mu(), params.nu());
    let s = if j % 2 == 0 { 1.0 } else { -1.0 };
    Ok(s * 2f64.powf(mu) * gamma((mu - nu + 2.0) / 2.0 + j as f64)? / gamma(j as f64 + 1.0)?)
}

/// ∫Λ_{2,j} x^{μ+ν+1} dx in closed form.
pub fn moment_mu_nu(params: &ParamPair, j: u32) -> Result<f64> {
    let (mu, nu) = (params.mu(), params.nu());
    let s = if j % 2 == 0 { 1.0 } else { -1.0 };
    Ok(s * 2f64.powf(mu + nu) * gamma((mu + nu + 2.0) / 2.0 + j as f64)? / gamma(j as f64 + 1.0)?)
}

/// Whether the hypotheses guaranteeing Λ_{i,j} ≢ 0 hold.
pub fn nonzero_hypothesis(i: u8, params: &ParamPair) -> bool {
    let (mu, nu) = (params.mu(), params.nu());
    match i {
        1 => mu > -2.0 && nu > -2.0 && mu + nu > -2.0,
        2 => mu + nu > -2.0 && mu - nu > -2.0,
        3 | 4 => params.ic_oddmu() && nu > -1.0 && !is_even_integer(mu - nu),
        _ => false,
    }
}

fn is_even_integer(v: f64) -> bool {
    v.fract() == 0.0 && (v as i64) % 2 == 0
}

/// Whether the four Λ_{i,j} are guaranteed linearly independent.
pub fn independence_hypothesis(params: &ParamPair) -> bool {
    params.ic_oddmu() && params.nu() > 0.0 && !is_even_integer(params.mu() - params.nu())
}

/// det(Λ_{i,j}(x_k)) / Π_i ‖row_i‖ for four sample points.
pub fn independence_measure(params: &ParamPair, j: i64, xs: [f64; 4]) -> Result<f64> {
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        let table = LambdaTable::build(i as u8 + 1, params, j)?;
        for (k, &x) in xs.iter().enumerate() {
            m[i][k] = table.eval(j, x)?;
        }
    }
    let norms: f64 = m
        .iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
        .product();
    Ok(det4(m) / norms)
}

fn det4(mut m: [[f64; 4]; 4]) -> f64 {
    let mut det = 1.0;
    for c in 0..4 {
        let p = (c..4)
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
            .unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..4 {
            let f = m[r][c] / m[c][c];
            for k in c..4 {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    det
}

/// Coefficient matrix of Λ_{2,0..j} in the basis x^{2k} K̃_{ν/2+k}, row per Λ.
/// `None` if some combo leaves that basis.
pub fn bessel_basis_matrix(combos: &[BesselCombo]) -> Option<Vec<Vec<Q>>> {
    let n = combos.len();
    let mut rows = Vec::with_capacity(n);
    for c in combos {
        let mut row = vec![Q::zero(); n.max(1)];
        for t in c.terms() {
            if t.kind != Kind::K || t.power != 2 * t.shift as i64 || t.shift as usize >= n {
                return None;
            }
            row[t.shift as usize] = t.coeff.clone();
        }
        rows.push(row);
    }
    Some(rows)
}

/// Γ-normalised Laguerre value used by several oracles.
pub fn scaled_laguerre(j: u32, mu: f64, x: f64) -> Result<f64> {
    Ok(lag_prefactor(j, mu)? * (-x).exp() * scalar_fn::laguerre(j, mu, 2.0 * x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qf};
    use crate::identity::is_identically_zero;

    fn pp(mu: f64, nu: f64) -> ParamPair {
        ParamPair::new(mu, nu).unwrap()
    }

    #[test]
    fn first_coefficients() {
        let p = pp(2.0, -1.0);
        let c = lambda_combo(LambdaIndex::new(2, 0), &p).unwrap();
        assert_eq!(c.dump(), "K:0:0:1/1");
        let c = lambda_combo(LambdaIndex::new(2, 1), &p).unwrap();
        assert_eq!(c.dump(), "K:0:0:3/2+K:2:1:-1/2");
        assert!(lambda_combo(LambdaIndex::new(1, -1), &p).unwrap().is_zero());
        let v = lambda_eval(LambdaIndex::new(2, 0), &p, 1.3).unwrap();
        assert!((v - PI.sqrt() / 2.0 * (-1.3f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn second_coefficient_matches_three_function_example() {
        // Λ_{2,2} = (1/2Γ)((μ+ν+2)(μ+ν+4)/4 K̃ + (μ+3)(μ+ν+2)/(μ+2) θK̃ + (μ+3)/(μ+2) θ²K̃)
        let p = pp(1.5, 0.5);
        let (mu, nu) = (qf(3, 2), qf(1, 2));
        let k = BesselCombo::single(qf(1, 4), Kind::K, 0, 0, q(1));
        let t1 = k.theta();
        let t2 = t1.theta();
        let c0 = (&mu + &nu + q(2)) * (&mu + &nu + q(4)) / q(8);
        let c1 = (&mu + q(3)) * (&mu + &nu + q(2)) / ((&mu + q(2)) * q(2));
        let c2 = (&mu + q(3)) / ((&mu + q(2)) * q(2));
        let expect = crate::combo::combo_linear(&[(c0, &k), (c1, &t1), (c2, &t2)]).unwrap();
        let got = lambda_combo(LambdaIndex::new(2, 2), &p).unwrap();
        let diff = got.with_prefactor(Prefactor::Unit).minus(&expect).unwrap();
        assert!(is_identically_zero(&diff), "{diff}");
    }

    #[test]
    fn laguerre_oracle_example() {
        let p = pp(2.5, -1.0);
        let v = lambda_eval(LambdaIndex::new(2, 3), &p, 0.7).unwrap();
        // independent evaluation of the closed form
        let lag = {
            let a: f64 = 2.5;
            let z: f64 = 1.4;
            let mut s = 0.0;
            for k in 0..=3u32 {
                let mut c = 1.0;
                for i in (k + 1)..=3 {
                    c *= a + i as f64;
                }
                let mut kf = 1.0;
                let mut nk = 1.0;
                for i in 1..=k {
                    kf *= i as f64;
                }
                for i in 1..=(3 - k) {
                    nk *= i as f64;
                }
                s += (-1f64).powi(k as i32) * c / (kf * nk) * z.powi(k as i32);
            }
            s
        };
        let expect = 2f64.powf(1.5) * gamma(3.0 + 1.75).unwrap() / gamma(3.0 + 3.5).unwrap()
            * (-0.7f64).exp()
            * lag;
        assert!((v - expect).abs() <= 1e-13 * expect.abs(), "{v} {expect}");
    }

    #[test]
    fn plus_one_relation() {
        for j in 0..4 {
            for x in [0.3, 1.7] {
                let a = lambda_eval(LambdaIndex::new(2, j), &pp(1.5, 1.0), x).unwrap();
                let b = lambda_eval(LambdaIndex::new(2, j), &pp(1.5, -1.0), x).unwrap();
                assert!(
                    (a - 2.0 / x * b).abs() <= 1e-12 * a.abs().max(1e-300) + 1e-14,
                    "{j} {x}"
                );
            }
        }
    }

    #[test]
    fn recurrence_route_agrees_exactly() {
        for (mu, nu) in [(2.0, -1.0), (1.5, 0.5), (3.0, 1.0), (0.5, 0.0), (2.0, 2.0)] {
            let p = pp(mu, nu);
            for i in [1u8, 2] {
                let table = LambdaTable::build(i, &p, 5).unwrap();
                let rec = lambda_combos_by_recurrence(i, &p, 5).unwrap();
                for j in 0..=5 {
                    let d = table.get(j).unwrap().minus(&rec[j as usize]).unwrap();
                    assert!(is_identically_zero(&d), "i={i} j={j} {p}: {d}");
                }
            }
        }
    }

    #[test]
    fn recrel_h_exact_for_all_families() {
        let p = pp(3.0, 1.5);
        for i in 1..=4u8 {
            let table = LambdaTable::build(i, &p, 5).unwrap();
            for j in table.valuation() - 1..5 {
                let r = recrel_h_residual(&table, j).unwrap();
                assert!(is_identically_zero(&r), "i={i} j={j}");
            }
        }
    }

    #[test]
    fn mpoly_matches_laguerre_and_top_term() {
        let p = pp(1.5, 1.0);
        for j in 0..5u32 {
            let m = m_polynomial(j, &p).unwrap();
            let l = scalar_fn::laguerre_coeffs_exact(j, &qf(3, 2)).unwrap();
            assert_eq!(m.coeffs, l);
        }
        let p = pp(2.0, 5.0);
        for j in 0..5u32 {
            let m = m_polynomial(j, &p).unwrap();
            assert_eq!(m.degree, j + 2);
            let top = m.coeffs.last().unwrap().clone();
            let sign = if j % 2 == 0 { q(1) } else { q(-1) };
            assert_eq!(top, sign / Q::from_integer(exact::factorial(j as u64)));
            let c0 = m_constant_term(j, &p).unwrap();
            let got = exact::to_f64(&m.coeffs[0]);
            assert!((got - c0).abs() <= 1e-12 * c0.abs(), "{got} {c0}");
        }
    }

    #[test]
    fn monodromy_odd_shortcut() {
        let (a, b) = monodromy_coeffs(-1.0).unwrap();
        assert_eq!(a, Complex64::new(-1.0, 0.0));
        assert_eq!(b, Complex64::new(PI, 0.0));
        let (_, b) = monodromy_coeffs(1.0).unwrap();
        assert_eq!(b.re, -PI);
        let (_, b) = monodromy_coeffs(3.0).unwrap();
        assert_eq!(b.re, PI);
        // the general formula agrees with the shortcut off the integers
        let (a, b) = monodromy_coeffs(1.0 + 1e-7).unwrap();
        assert!((a.re + 1.0).abs() < 1e-12 && (b.re + PI).abs() < 1e-5);
        assert!(monodromy_coeffs(2.0).is_err());
        let m = monodromy_matrix(&pp(0.5, -1.0)).unwrap();
        assert_eq!(m[0][0], Complex64::new(1.0, 0.0));
        assert_eq!(m[0][1], Complex64::zero());
    }

    #[test]
    fn integral_representation_examples() {
        let p = pp(2.0, -1.0);
        let v = integral_rep_eval(2, 0, &p, 1.0, 1e-12).unwrap();
        assert!((v - PI.sqrt() / 2.0 * (-1.0f64).exp()).abs() < 1e-8);
        let p = pp(1.5, 0.5);
        let v = integral_rep_eval(2, 2, &p, 2.0, 1e-10).unwrap();
        let w = lambda_eval(LambdaIndex::new(2, 2), &p, 2.0).unwrap();
        assert!((v - w).abs() <= 1e-7 * w.abs(), "{v} {w}");
        let p = pp(1.0, 0.5);
        let v = integral_rep_eval(1, 0, &p, 1e-6, 1e-10).unwrap();
        let lead = asymptotic_lead(LambdaIndex::new(1, 0), &p, Side::Zero).unwrap();
        assert!((v - lead.coefficient).abs() <= 1e-6 * lead.coefficient.abs());
    }
    #[test]
    fn recrel_xsq_pointwise() {
        for (mu, nu) in [(2.0, -1.0), (1.5, 0.5), (3.0, 1.0)] {
            let p = pp(mu, nu);
            for i in 1..=4u8 {
                if !p.admits_family(i) {
                    continue;
                }
                let table = LambdaTable::build(i, &p, 8).unwrap();
                for j in table.valuation()..=6 {
                    for x in [0.4, 1.0, 3.0] {
                        let (l, r, s) = recrel_xsq_sides(&table, j, x).unwrap();
                        assert!(
                            (l - r).abs() <= 1e-9 * s,
                            "i={i} j={j} x={x} {p}: {l} {r} {s}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn parameter_shift_recurrences() {
        for (mu, nu) in [(2.5, 0.5), (3.0, 1.5), (5.0, 2.5)] {
            let p = pp(mu, nu);
            for i in 1..=4u8 {
                for which in [
                    ShiftRecurrence::Mu,
                    ShiftRecurrence::Nu,
                    ShiftRecurrence::Derivative,
                ] {
                    if i >= 3
                        && (which == ShiftRecurrence::Mu)
                        && !p.shifted(-2, 0).admits_family(i)
                    {
                        continue;
                    }
                    if !p.admits_family(i) {
                        continue;
                    }
                    for j in 0..=4 {
                        for x in [0.5, 2.0] {
                            let (l, r, s) = formula1_sides(which, i, &p, j, x).unwrap();
                            assert!(
                                (l - r).abs() <= 1e-9 * s,
                                "{which:?} i={i} j={j} x={x} {p}: {l} {r}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn small_x_leading_terms() {
        let x = 1e-4;
        for (i, mu, nu) in [
            (1, 1.5, 0.5),
            (2, 1.5, 1.5),
            (2, 2.0, -1.5),
            (3, 3.0, 0.5),
            (4, 3.0, 1.5),
            (4, 1.0, -1.5),
        ] {
            let p = pp(mu, nu);
            let v = valuation(i, &p).unwrap();
            for j in v..v + 3 {
                let lead = asymptotic_lead(LambdaIndex::new(i, j), &p, Side::Zero).unwrap();
                let val = lambda_eval(LambdaIndex::new(i, j), &p, x).unwrap();
                let pred = lead.coefficient * x.powf(lead.exponent);
                assert!(
                    (val - pred).abs() <= 0.01 * pred.abs(),
                    "i={i} j={j}: {val} {pred}"
                );
            }
        }
    }

    #[test]
    fn large_x_leading_terms() {
        let p = pp(1.5, 0.5);
        for j in 0..4 {
            let lead = asymptotic_lead(LambdaIndex::new(2, j), &p, Side::Infinity).unwrap();
            assert_eq!(lead.exponent, j as f64 - 0.75);
            assert!(lead.coefficient != 0.0);
            let x = 400.0;
            let val = lambda_eval(LambdaIndex::new(2, j), &p, x).unwrap();
            let pred = lead.coefficient * x.powf(lead.exponent) * (-x).exp();
            assert!((val / pred - 1.0).abs() < 0.05, "{j}: {val} {pred}");
        }
    }

    #[test]
    fn monodromy_against_laguerre() {
        for mu in [0.5, 2.0] {
            let p = pp(mu, -1.0);
            for j in 0..=5 {
                for x in [0.5, 1.5] {
                    let v = lambda_at_minus_x(2, j, &p, x).unwrap();
                    let expect = lag_prefactor(j as u32, mu).unwrap()
                        * x.exp()
                        * laguerre(j as u32, mu, -2.0 * x).unwrap();
                    assert!(
                        (v.re - expect).abs() <= 1e-10 * expect.abs()
                            && v.im.abs() < 1e-10 * expect.abs()
                    );
                }
            }
        }
    }

    #[test]
    fn independence_and_triangularity() {
        let p = pp(3.0, 0.5);
        assert!(independence_hypothesis(&p));
        let d = independence_measure(&p, 1, [0.5, 1.0, 2.0, 4.0]).unwrap();
        assert!(d.abs() > 1e-8, "{d}");
        let p = pp(1.5, 0.5);
        let combos = lambda_combos_by_recurrence(2, &p, 5).unwrap();
        let m = bessel_basis_matrix(&combos).unwrap();
        for (j, row) in m.iter().enumerate() {
            assert!(!row[j].is_zero());
            assert!(row[j + 1..].iter().all(|c| c.is_zero()));
        }
    }
}
