//! The fourth-order operator D_{μ,ν}, the factors S_{μ,±1} and the first-order
//! operator H, applied pointwise to derivative stacks, plus the θ-form of D
//! acting on combos exactly.

use num::Zero;

use crate::combo::BesselCombo;
use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::params::ParamPair;

/// u, u′, u″, u‴, u⁗ at a point, with the absolute term sums that bound
/// cancellation in each value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivStack {
    pub x: f64,
    pub d: [f64; 5],
    pub mag: [f64; 5],
}

impl DerivStack {
    /// Exact derivatives of a combo, evaluated at x. A derivative whose
    /// terms overflow is re-evaluated from its normal form.
    pub fn from_combo(c: &BesselCombo, x: f64) -> Result<Self> {
        check_x(x)?;
        let mut d = [0.0; 5];
        let mut mag = [0.0; 5];
        let mut cur = c.clone();
        for k in 0..5 {
            let (mut v, mut s) = cur.eval_parts(x)?;
            if !v.is_finite() {
                v = crate::identity::normal_form(&cur).eval_for(&cur, x)?;
                s = v.abs();
            }
            d[k] = v;
            mag[k] = s;
            if k < 4 {
                cur = cur.ddx();
            }
        }
        Ok(Self { x, d, mag })
    }

    /// Central finite differences with step h.
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> Result<Self> {
        check_x(x)?;
        if !(h > 0.0) || x - 2.0 * h <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "step {h} unusable at x = {x}"
            )));
        }
        let v: Vec<f64> = (-3..=3).map(|k| f(x + k as f64 * h)).collect();
        let (m3, m2, m1, z, p1, p2, p3) = (v[0], v[1], v[2], v[3], v[4], v[5], v[6]);
        let d = [
            z,
            (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h),
            (-p2 + 16.0 * p1 - 30.0 * z + 16.0 * m1 - m2) / (12.0 * h * h),
            (-p3 + 8.0 * p2 - 13.0 * p1 + 13.0 * m1 - 8.0 * m2 + m3) / (8.0 * h.powi(3)),
            (-p3 + 12.0 * p2 - 39.0 * p1 + 56.0 * z - 39.0 * m1 + 12.0 * m2 - m3)
                / (6.0 * h.powi(4)),
        ];
        let mag = d.map(f64::abs);
        Ok(Self { x, d, mag })
    }

    fn from_values(x: f64, d: [f64; 5]) -> Self {
        Self {
            x,
            d,
            mag: d.map(f64::abs),
        }
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("operators act on x > 0, got {x}")))
    }
}

/// Coefficients c_k(x) with D u = Σ c_k u^{(k)}.
pub fn d_coefficients(params: &ParamPair, x: f64) -> [f64; 5] {
    let (mu, nu) = (params.mu(), params.nu());
    let s = mu + nu;
    let x2 = x * x;
    let c2 = mu * mu + 3.0 * mu * nu + nu * nu + 6.0 * s + 7.0 - 2.0 * x2;
    let c1 = mu * nu * s + mu * mu + 3.0 * mu * nu + nu * nu + 2.0 * s + 1.0 - 2.0 * (s + 3.0) * x2;
    [
        x2 - (mu + 2.0) * (s + 2.0),
        c1 / x,
        c2,
        2.0 * (s + 3.0) * x,
        x2,
    ]
}

pub fn apply_d(params: &ParamPair, d: &DerivStack) -> Result<f64> {
    check_x(d.x)?;
    let c = d_coefficients(params, d.x);
    Ok(c.iter().zip(d.d.iter()).map(|(c, u)| c * u).sum())
}

/// Σ|c_k||u^{(k)}|, the magnitude against which residuals of D are measured.
pub fn d_scale(params: &ParamPair, d: &DerivStack) -> f64 {
    let c = d_coefficients(params, d.x);
    c.iter().zip(d.mag.iter()).map(|(c, u)| c.abs() * u).sum()
}

/// D u − λu and its scale Σ|c_k||u^{(k)}| + |λ||u|.
pub fn eigen_residual(params: &ParamPair, d: &DerivStack, eigenvalue: f64) -> Result<(f64, f64)> {
    let r = apply_d(params, d)? - eigenvalue * d.d[0];
    Ok((r, d_scale(params, d) + eigenvalue.abs() * d.mag[0]))
}

/// 4j(j+μ+1).
pub fn eigenvalue(params: &ParamPair, j: i64) -> f64 {
    4.0 * j as f64 * (j as f64 + params.mu() + 1.0)
}

/// D_{μ,ν} on a combo through its θ-form
/// x^{−2}BA − (θ+μ+ν+2)(θ+μ+2) − A + x², A = θ(θ+ν), B = (θ+μ+ν)(θ+μ).
pub fn apply_d_combo(params: &ParamPair, c: &BesselCombo) -> Result<BesselCombo> {
    let mu = params.mu_exact();
    let nu = params.nu_exact();
    let two = exact::q(2);
    let shifted = |c: &BesselCombo, s: &Q| -> Result<BesselCombo> { c.theta().plus(&c.scale(s)) };
    let a = shifted(&shifted(c, nu)?, &Q::zero())?;
    let ba = shifted(&shifted(&a, &(mu + nu))?, mu)?.mul_x_pow(-2);
    let second = shifted(&shifted(c, &(mu + nu + &two))?, &(mu + &two))?;
    ba.minus(&second)?.minus(&a)?.plus(&c.mul_x_pow(2))
}

/// D u from θ-iterates (u, θu, …, θ⁴u) at x:
/// x^{−2}θ(θ+ν)(θ+μ)(θ+μ+ν)u − ((θ+μ+ν+2)(θ+μ+2) + θ(θ+ν))u + x²u.
pub fn apply_d_theta(params: &ParamPair, th: &[f64; 5], x: f64) -> f64 {
    let (mu, nu) = (params.mu(), params.nu());
    let s = mu + nu;
    let p = [0.0, mu * nu * s, s * s + mu * nu, 2.0 * s, 1.0];
    let a = s + 2.0;
    let b = mu + 2.0;
    let r = [a * b, a + b + nu, 2.0];
    let pu: f64 = p.iter().zip(th).map(|(c, v)| c * v).sum();
    let ru: f64 = r.iter().zip(th).map(|(c, v)| c * v).sum();
    pu / (x * x) - ru + x * x * th[0]
}

/// S_{μ,−1} u = (θ(θ+μ) − x²)u/x and S_{μ,+1} u = (θ(θ+μ+2) + μ + 1 − x²)u/x.
pub fn apply_s(params: &ParamPair, d: &DerivStack) -> Result<f64> {
    check_x(d.x)?;
    let (mu, nu, x) = (params.mu(), params.nu(), d.x);
    let th = x * d.d[1];
    let th2 = x * x * d.d[2] + x * d.d[1];
    let u = d.d[0];
    if nu == -1.0 {
        Ok((th2 + mu * th - x * x * u) / x)
    } else if nu == 1.0 {
        Ok((th2 + (mu + 2.0) * th + (mu + 1.0) * u - x * x * u) / x)
    } else {
        Err(Error::InvalidParams(format!(
            "S operator needs nu = ±1, got {nu}"
        )))
    }
}

/// S applied twice, from a stack of four derivatives.
pub fn apply_s_squared(params: &ParamPair, d: &DerivStack) -> Result<f64> {
    let (x, mu, nu) = (d.x, params.mu(), params.nu());
    let [u, u1, u2, u3, u4] = d.d;
    // S u = p u″ + q u′ + r u, with p = x, q = (μ+1) or (μ+3), r = −x or (μ+1)/x − x
    let (q, r, r1, r2) = if nu == -1.0 {
        (mu + 1.0, -x, -1.0, 0.0)
    } else if nu == 1.0 {
        (
            mu + 3.0,
            (mu + 1.0) / x - x,
            -(mu + 1.0) / (x * x) - 1.0,
            2.0 * (mu + 1.0) / x.powi(3),
        )
    } else {
        return Err(Error::InvalidParams(format!(
            "S operator needs nu = ±1, got {nu}"
        )));
    };
    let v = x * u2 + q * u1 + r * u;
    let v1 = x * u3 + (1.0 + q) * u2 + r * u1 + r1 * u;
    let v2 = x * u4 + (2.0 + q) * u3 + r * u2 + 2.0 * r1 * u1 + r2 * u;
    Ok(x * v2 + q * v1 + r * v)
}

/// H u = x u′ + ((μ+ν+2)/2) u.
pub fn apply_h(params: &ParamPair, u: f64, uprime: f64, x: f64) -> f64 {
    x * uprime + 0.5 * (params.mu() + params.nu() + 2.0) * u
}

/// {0, −μ, −ν, −μ−ν}.
pub fn indicial_exponents(params: &ParamPair) -> [f64; 4] {
    let (mu, nu) = (params.mu(), params.nu());
    [0.0, -mu, -nu, -mu - nu]
}

/// The C⁴ bump (x−a)⁵(b−x)⁵ on [a, b] with its first four derivatives.
#[derive(Clone, Copy, Debug)]
pub struct Bump {
    pub a: f64,
    pub b: f64,
}

impl Bump {
    pub fn stack(&self, x: f64) -> DerivStack {
        if x <= self.a || x >= self.b {
            return DerivStack::from_values(x, [0.0; 5]);
        }
        // product rule on p(x) = (x−a)⁵, q(x) = (b−x)⁵
        let s = x - self.a;
        let t = self.b - x;
        let falling = |k: usize| -> f64 { (0..k).map(|i| (5 - i) as f64).product() };
        let p = |k: usize| falling(k) * s.powi(5 - k as i32);
        let q = |k: usize| falling(k) * t.powi(5 - k as i32) * if k % 2 == 1 { -1.0 } else { 1.0 };
        let binom = [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 3.0, 1.0, 0.0],
            [1.0, 4.0, 6.0, 4.0, 1.0],
        ];
        let mut d = [0.0; 5];
        for (n, dn) in d.iter_mut().enumerate() {
            *dn = (0..=n).map(|k| binom[n][k] * p(k) * q(n - k)).sum();
        }
        DerivStack::from_values(x, d)
    }
}

/// ⟨Df, g⟩ − ⟨f, Dg⟩ and ‖f‖‖g‖ in L²(x^{μ+ν+1}dx) for two bumps.
pub fn symmetry_defect(params: &ParamPair, f: &Bump, g: &Bump, tol: f64) -> Result<(f64, f64)> {
    let w = params.mu() + params.nu() + 1.0;
    let a = f.a.max(g.a);
    let b = f.b.min(g.b);
    if a >= b {
        return Ok((0.0, 1.0));
    }
    let r = crate::quad::integrate_finite(
        |x| {
            let sf = f.stack(x);
            let sg = g.stack(x);
            let df = apply_d(params, &sf).unwrap_or(f64::NAN);
            let dg = apply_d(params, &sg).unwrap_or(f64::NAN);
            (df * sg.d[0] - sf.d[0] * dg) * x.powf(w)
        },
        a,
        b,
        tol,
        12,
    )?;
    let norm = |h: &Bump| -> Result<f64> {
        Ok(crate::quad::integrate_finite(
            |x| h.stack(x).d[0].powi(2) * x.powf(w),
            h.a,
            h.b,
            tol,
            12,
        )?
        .value
        .sqrt())
    };
    Ok((r.value, norm(f)? * norm(g)?))
}

/// ⟨Hf, g⟩ + ⟨f, Hg⟩ and ‖f‖‖g‖.
pub fn skew_defect(params: &ParamPair, f: &Bump, g: &Bump, tol: f64) -> Result<(f64, f64)> {
    let w = params.mu() + params.nu() + 1.0;
    let a = f.a.max(g.a);
    let b = f.b.min(g.b);
    if a >= b {
        return Ok((0.0, 1.0));
    }
    let r = crate::quad::integrate_finite(
        |x| {
            let sf = f.stack(x);
            let sg = g.stack(x);
            let hf = apply_h(params, sf.d[0], sf.d[1], x);
            let hg = apply_h(params, sg.d[0], sg.d[1], x);
            (hf * sg.d[0] + sf.d[0] * hg) * x.powf(w)
        },
        a,
        b,
        tol,
        12,
    )?;
    let norm = |h: &Bump| -> Result<f64> {
        Ok(crate::quad::integrate_finite(
            |x| h.stack(x).d[0].powi(2) * x.powf(w),
            h.a,
            h.b,
            tol,
            12,
        )?
        .value
        .sqrt())
    };
    Ok((r.value, norm(f)? * norm(g)?))
}
