//! The inversion kernel K^{μ,ν}(t) = 2^{−(μ+ν+1)} G^{20}_{04}((t/4)² | 0, −ν/2, −μ/2, −(μ+ν)/2)
//! and the transform Tf(x) = ∫₀^∞ K(xy) f(y) y^{μ+ν+1} dy.
//!
//! The kernel is evaluated as the sum of two generalized power series
//! z^{b_s} Σ_k c_{s,k} z^k (the residues at b₁ = 0 and b₂ = −ν/2), which
//! requires ν/2 ∉ ℤ. For ν = ±1 and μ ≥ 0 it is the Hankel kernel
//! t^{−(μ+ν+1)/2} J_μ(2√t). Beyond t = 80 the series form hands over to the
//! leading oscillatory asymptotic.
//!
//! θ-derivatives are exact for each form: the series is differentiated
//! termwise, the Hankel kernel through the J-Bessel ladder
//! θ_w(w^m J_{μ+ℓ}) = (m+μ+ℓ) w^m J_{μ+ℓ} − w^{m+1} J_{μ+ℓ+1} with θ_t = θ_w/2.

use std::f64::consts::PI;

use crate::diffop;
use crate::error::{Error, Result};
use crate::params::ParamPair;
use crate::quad::{self, QuadResult, QuadSpec};
use crate::scalar_fn::{self, bessel_j, gamma, rgamma};

/// Largest t at which the series form is summed.
pub const SERIES_T_MAX: f64 = 80.0;
const MAX_TERMS: usize = 500;
const DIRECT_TERMS: usize = 120;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelForm {
    HankelClosed,
    SeriesPair,
}

/// One residue series z^{b} Σ_k c_k z^k.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueSeries {
    pub b: f64,
    pub coeffs: Vec<f64>,
}

impl ResidueSeries {
    /// Σ_k c_k P(2(b+k)) z^{b+k}, returned with Σ|·| for conditioning.
    fn eval_with<P: Fn(f64) -> f64>(&self, z: f64, p: &P) -> (f64, f64) {
        let mut sum = 0.0;
        let mut abs = 0.0;
        let mut zk = 1.0;
        let settle = z.cbrt() + 4.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let term = c * zk * p(2.0 * (self.b + k as f64));
            sum += term;
            abs += term.abs();
            if (k as f64) > settle && term.abs() <= 1e-18 * abs {
                break;
            }
            zk *= z;
        }
        let zb = z.powf(self.b);
        (sum * zb, abs * zb)
    }
}

/// Coefficients of the residue series at b[h] (h ∈ {0, 1}) of G^{20}_{0q}(z | b).
fn residue_coeffs(b: &[f64], h: usize) -> Result<Vec<f64>> {
    let other = 1 - h;
    let d = b[other] - b[h];
    if d == d.round() {
        return Err(Error::Unsupported(format!(
            "resonant pole pair ({}, {}) in the G-function",
            b[h], b[other]
        )));
    }
    let lead = gamma(d)? * gamma(1.0 - d)?;
    let a: Vec<f64> = b[2..].iter().map(|bj| 1.0 + b[h] - bj).collect();
    let a1 = 1.0 - d;
    let mut out = Vec::with_capacity(MAX_TERMS);
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let c = if k < DIRECT_TERMS {
            let mut c = lead * rgamma(kf + 1.0) * rgamma(a1 + kf);
            for aj in &a {
                c *= rgamma(aj + kf);
            }
            c
        } else {
            let prev: f64 = out[k - 1];
            let mut den = kf * (a1 + kf - 1.0);
            for aj in &a {
                den *= aj + kf - 1.0;
            }
            prev / den
        };
        if k >= DIRECT_TERMS && c == 0.0 {
            break;
        }
        out.push(c);
    }
    Ok(out)
}

/// G^{20}_{0q}(z | b₁, …, b_q) for z > 0, b₁ − b₂ ∉ ℤ.
pub fn meijer_g20(z: f64, b: &[f64]) -> Result<f64> {
    if b.len() < 2 {
        return Err(Error::InvalidParams("G^{20}_{0q} needs q >= 2".into()));
    }
    if !(z > 0.0) {
        return Err(Error::Domain(format!("G-function at z = {z}")));
    }
    let mut total = 0.0;
    for h in 0..2 {
        let s = ResidueSeries {
            b: b[h],
            coeffs: residue_coeffs(b, h)?,
        };
        total += s.eval_with(z, &|_| 1.0).0;
    }
    Ok(total)
}

/// The kernel of T^{μ,ν} in a fixed representation.
#[derive(Clone, Debug)]
pub struct KernelRep {
    pub params: ParamPair,
    pub form: KernelForm,
    pub series: Option<[ResidueSeries; 2]>,
}

pub fn hankel_applies(params: &ParamPair) -> bool {
    params.nu().abs() == 1.0 && params.mu() >= 0.0
}

impl KernelRep {
    /// Hankel closed form when available, else the series pair.
    pub fn new(params: &ParamPair) -> Result<Self> {
        let form = if hankel_applies(params) {
            KernelForm::HankelClosed
        } else {
            KernelForm::SeriesPair
        };
        Self::with_form(params, form)
    }

    pub fn with_form(params: &ParamPair, form: KernelForm) -> Result<Self> {
        let series = match form {
            KernelForm::HankelClosed => {
                if !hankel_applies(params) {
                    return Err(Error::InvalidParams(format!(
                        "Hankel form needs nu = ±1 and mu >= 0, got {params}"
                    )));
                }
                None
            }
            KernelForm::SeriesPair => {
                let b = kernel_b(params);
                let scale = 2f64.powf(-(params.mu() + params.nu() + 1.0));
                let mut pair = Vec::with_capacity(2);
                for h in 0..2 {
                    let coeffs = residue_coeffs(&b, h).map_err(|_| {
                        Error::Unsupported(format!(
                            "kernel at {params} is resonant (nu/2 integer) and has no closed form"
                        ))
                    })?;
                    pair.push(ResidueSeries {
                        b: b[h],
                        coeffs: coeffs.into_iter().map(|c| c * scale).collect(),
                    });
                }
                let [s0, s1]: [ResidueSeries; 2] = pair.try_into().expect("two series");
                Some([s0, s1])
            }
        };
        Ok(Self {
            params: params.clone(),
            form,
            series,
        })
    }

    /// K(t).
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.theta_stack(t)?[0])
    }

    /// θ^n K(t), n = 0..4.
    pub fn theta_stack(&self, t: f64) -> Result<[f64; 5]> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("kernel at t = {t}")));
        }
        match (&self.series, self.form) {
            (_, KernelForm::HankelClosed) => hankel_theta_stack(&self.params, t),
            (Some(pair), KernelForm::SeriesPair) => {
                if t > SERIES_T_MAX {
                    return Ok(asymptotic_theta_stack(&self.params, t));
                }
                let z = (t / 4.0) * (t / 4.0);
                let mut out = [0.0; 5];
                for (n, o) in out.iter_mut().enumerate() {
                    *o = pair
                        .iter()
                        .map(|s| s.eval_with(z, &|e: f64| e.powi(n as i32)).0)
                        .sum();
                }
                Ok(out)
            }
            (None, KernelForm::SeriesPair) => unreachable!(),
        }
    }

    /// The series pair summed at any t ≤ SERIES_T_MAX, bypassing the hand-over.
    pub fn series_value(&self, t: f64) -> Option<f64> {
        let pair = self.series.as_ref()?;
        let z = (t / 4.0) * (t / 4.0);
        Some(pair.iter().map(|s| s.eval_with(z, &|_| 1.0).0).sum())
    }
}

/// (0, −ν/2, −μ/2, −(μ+ν)/2).
pub fn kernel_b(params: &ParamPair) -> [f64; 4] {
    let (mu, nu) = (params.mu(), params.nu());
    [0.0, -nu / 2.0, -mu / 2.0, -(mu + nu) / 2.0]
}

fn hankel_theta_stack(params: &ParamPair, t: f64) -> Result<[f64; 5]> {
    let (mu, nu) = (params.mu(), params.nu());
    // K = 2^{μ+ν+1} w^{−(μ+ν+1)} J_μ(w), w = 2√t; terms (coef, m, ℓ) for coef · w^m J_{μ+ℓ}(w)
    let w = 2.0 * t.sqrt();
    let p = mu + nu + 1.0;
    let mut terms: Vec<(f64, f64, u32)> = vec![(2f64.powf(p), -p, 0)];
    let js: Vec<f64> = (0..5)
        .map(|l| bessel_j(mu + l as f64, w))
        .collect::<Result<_>>()?;
    let mut out = [0.0; 5];
    for (n, o) in out.iter_mut().enumerate() {
        *o = terms
            .iter()
            .map(|(c, m, l)| c * w.powf(*m) * js[*l as usize])
            .sum();
        if n == 4 {
            break;
        }
        let mut next = Vec::with_capacity(terms.len() * 2);
        for (c, m, l) in &terms {
            next.push((0.5 * c * (m + mu + *l as f64), *m, *l));
            next.push((-0.5 * c, m + 1.0, l + 1));
        }
        terms = next;
    }
    Ok(out)
}

/// Leading large-t form −(1/√π) t^{−(2μ+2ν+3)/4} cos(2√t − (2μ−3)π/4).
pub fn kernel_asymptotic(params: &ParamPair, t: f64) -> f64 {
    asymptotic_theta_stack(params, t)[0]
}

fn asymptotic_theta_stack(params: &ParamPair, t: f64) -> [f64; 5] {
    let (mu, nu) = (params.mu(), params.nu());
    let psi = 2.0 * t.sqrt() - (2.0 * mu - 3.0) * PI / 4.0;
    // terms (coef, exponent, is_cos); θ(t^e cos ψ) = e t^e cos ψ − t^{e+1/2} sin ψ
    let mut terms: Vec<(f64, f64, bool)> =
        vec![(-1.0 / PI.sqrt(), -(2.0 * mu + 2.0 * nu + 3.0) / 4.0, true)];
    let mut out = [0.0; 5];
    for (n, o) in out.iter_mut().enumerate() {
        *o = terms
            .iter()
            .map(|(c, e, cos)| c * t.powf(*e) * if *cos { psi.cos() } else { psi.sin() })
            .sum();
        if n == 4 {
            break;
        }
        let mut next = Vec::with_capacity(terms.len() * 2);
        for (c, e, cos) in &terms {
            next.push((c * e, *e, *cos));
            next.push((if *cos { -c } else { *c }, e + 0.5, !cos));
        }
        terms = next;
    }
    out
}

/// K^{μ,ν}(t) in the default representation.
pub fn kernel_eval(params: &ParamPair, t: f64) -> Result<f64> {
    KernelRep::new(params)?.eval(t)
}

/// Leading small-t term of the kernel for ν > 0.
pub fn kernel_small_t_lead(params: &ParamPair) -> Result<(f64, f64)> {
    let (mu, nu) = (params.mu(), params.nu());
    if !(nu > 0.0) {
        return Err(Error::InvalidParams(format!(
            "small-t lead stated for nu > 0, got {nu}"
        )));
    }
    let c =
        2f64.powf(nu) * gamma(nu / 2.0)? * rgamma((mu - nu + 2.0) / 2.0) * rgamma((mu + 2.0) / 2.0)
            / 2f64.powf(mu + 1.0);
    Ok((c, -nu))
}

/// The transform with its kernel prepared once.
#[derive(Clone, Debug)]
pub struct GTransform {
    pub kernel: KernelRep,
}

impl GTransform {
    pub fn new(params: &ParamPair) -> Result<Self> {
        Ok(Self {
            kernel: KernelRep::new(params)?,
        })
    }

    pub fn params(&self) -> &ParamPair {
        &self.kernel.params
    }

    fn weighted<K, F>(&self, kernel_part: K, f: F, x: f64, spec: &QuadSpec) -> Result<QuadResult>
    where
        K: Fn([f64; 5], f64) -> f64,
        F: Fn(f64) -> f64,
    {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("transform evaluated at x = {x}")));
        }
        let w = self.params().mu() + self.params().nu() + 1.0;
        let mut err = None;
        let r = quad::integrate_halfline(
            |y| match self.kernel.theta_stack(x * y) {
                Ok(s) => kernel_part(s, y) * f(y) * y.powf(w),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            spec,
        )?;
        match err {
            Some(e) => Err(e),
            None => Ok(r),
        }
    }

    /// Tf(x).
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F, x: f64, spec: &QuadSpec) -> Result<QuadResult> {
        self.weighted(|s, _| s[0], f, x, spec)
    }

    /// θⁿ(Tf)(x) for n ≤ 4, differentiating the kernel under the integral.
    pub fn apply_theta<F: Fn(f64) -> f64>(
        &self,
        f: F,
        x: f64,
        n: usize,
        spec: &QuadSpec,
    ) -> Result<QuadResult> {
        if n > 4 {
            return Err(Error::InvalidParams(format!("theta order {n} > 4")));
        }
        self.weighted(|s, _| s[n], f, x, spec)
    }

    /// D_{μ,ν}(Tf)(x) with D in θ-form acting on the kernel.
    pub fn apply_then_d<F: Fn(f64) -> f64>(
        &self,
        f: F,
        x: f64,
        spec: &QuadSpec,
    ) -> Result<QuadResult> {
        let p = self.params().clone();
        self.weighted(move |s, _| diffop::apply_d_theta(&p, &s, x), f, x, spec)
    }
}

/// Tf(x) with a fresh kernel.
pub fn g_transform<F: Fn(f64) -> f64>(
    params: &ParamPair,
    f: F,
    x: f64,
    spec: &QuadSpec,
) -> Result<f64> {
    Ok(GTransform::new(params)?.apply(f, x, spec)?.value)
}

/// The input f(y) = Ĩ_{μ/2}((α−1)y) K̃_{ν/2}(αy) and the predicted image
/// (β/α)^{(μ+ν+2)/2} Ĩ_{μ/2}((β−1)x) K̃_{ν/2}(βx), β = α/(2α−1).
pub fn bessel_pair_input(params: &ParamPair, alpha: f64, y: f64) -> f64 {
    let k = scalar_fn::bessel_k_tilde(params.nu() / 2.0, alpha * y).unwrap_or(f64::NAN);
    scalar_fn::bessel_i_tilde(params.mu() / 2.0, (alpha - 1.0) * y) * k
}

pub fn bessel_pair_image(params: &ParamPair, alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.5) {
        return Err(Error::InvalidParams(format!(
            "alpha = {alpha} must exceed 1/2"
        )));
    }
    let beta = alpha / (2.0 * alpha - 1.0);
    let e = (params.mu() + params.nu() + 2.0) / 2.0;
    Ok((beta / alpha).powf(e)
        * scalar_fn::bessel_i_tilde(params.mu() / 2.0, (beta - 1.0) * x)
        * scalar_fn::bessel_k_tilde(params.nu() / 2.0, beta * x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{lambda_combo, LambdaIndex};

    fn pp(mu: f64, nu: f64) -> ParamPair {
        ParamPair::new(mu, nu).unwrap()
    }

    #[test]
    fn series_pair_matches_hankel() {
        for (mu, nu) in [(2.0, -1.0), (0.5, -1.0), (1.0, 1.0), (2.5, 1.0)] {
            let p = pp(mu, nu);
            let s = KernelRep::with_form(&p, KernelForm::SeriesPair).unwrap();
            let h = KernelRep::with_form(&p, KernelForm::HankelClosed).unwrap();
            for t in [0.01, 0.5, 3.0, 20.0, 60.0] {
                let a = s.theta_stack(t).unwrap();
                let b = h.theta_stack(t).unwrap();
                for n in 0..5 {
                    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
                    assert!(
                        (a[n] - b[n]).abs() <= 1e-9 * scale,
                        "{p} t={t} n={n}: {} {}",
                        a[n],
                        b[n]
                    );
                }
            }
        }
    }

    #[test]
    fn residue_recurrence() {
        let p = pp(2.0, 0.5);
        let b = kernel_b(&p);
        let k = KernelRep::with_form(&p, KernelForm::SeriesPair).unwrap();
        for s in k.series.as_ref().unwrap() {
            for kk in 0..10 {
                let prod: f64 = b.iter().map(|bj| s.b + kk as f64 + 1.0 - bj).product();
                let lhs = s.coeffs[kk + 1] * prod;
                assert!((lhs - s.coeffs[kk]).abs() <= 1e-13 * s.coeffs[kk].abs());
            }
        }
    }

    #[test]
    fn resonance_is_reported() {
        assert!(matches!(
            KernelRep::new(&pp(2.0, 2.0)),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            KernelRep::new(&pp(2.0, 0.0)),
            Err(Error::Unsupported(_))
        ));
        assert!(KernelRep::new(&pp(2.0, 1.0)).is_ok());
    }

    #[test]
    fn small_t_lead() {
        let p = pp(2.0, 0.5);
        let (c, e) = kernel_small_t_lead(&p).unwrap();
        let t = 1e-6;
        let v = kernel_eval(&p, t).unwrap();
        assert!((v / (c * t.powf(e)) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn ode_residual() {
        for (mu, nu) in [(2.0, 0.5), (1.5, -0.5), (2.0, -1.0)] {
            let p = pp(mu, nu);
            let k = KernelRep::new(&p).unwrap();
            for t in [0.3, 2.0, 15.0] {
                let s = k.theta_stack(t).unwrap();
                // θ(θ+μ)(θ+ν)(θ+μ+ν) = θ⁴ + e3 θ³ + e2 θ² + e1 θ
                let e3 = 2.0 * (mu + nu);
                let e2 = (mu + nu).powi(2) + mu * nu;
                let e1 = mu * nu * (mu + nu);
                let lhs = s[4] + e3 * s[3] + e2 * s[2] + e1 * s[1];
                let scale = s[4].abs()
                    + e3.abs() * s[3].abs()
                    + e2.abs() * s[2].abs()
                    + e1.abs() * s[1].abs();
                assert!(
                    (lhs - t * t * s[0]).abs() <= 1e-7 * scale.max(1.0),
                    "{p} {t}"
                );
            }
        }
    }

    #[test]
    fn reduction_to_k_bessel() {
        for (alpha, beta, z) in [(0.3, 0.7, 1.2), (1.25, 0.1, 3.0)] {
            let g = meijer_g20(z * z / 4.0, &[(beta + alpha) / 2.0, (beta - alpha) / 2.0]).unwrap();
            let k = (z / 2.0f64).powf(alpha) * scalar_fn::bessel_k_tilde(alpha, z).unwrap();
            let expect = 2.0 * (z / 2.0f64).powf(beta) * k;
            assert!((g - expect).abs() <= 1e-8 * expect.abs(), "{g} {expect}");
        }
    }

    #[test]
    fn asymptotic_overlap() {
        let p = pp(2.0, 0.5);
        let k = KernelRep::new(&p).unwrap();
        for t in [60.0, 70.0, 80.0] {
            let s = k.series_value(t).unwrap();
            let a = kernel_asymptotic(&p, t);
            let env = t.powf(-(2.0 * 2.0 + 2.0 * 0.5 + 3.0) / 4.0) / PI.sqrt();
            assert!((s - a).abs() <= 2.0 * env / t.sqrt(), "{t}: {s} {a} {env}");
        }
    }

    #[test]
    fn eigenfunction_sign() {
        let p = pp(1.0, -1.0);
        let tr = GTransform::new(&p).unwrap();
        let spec = QuadSpec::with_tol(1e-10);
        for j in 0..3 {
            let c = lambda_combo(LambdaIndex::new(2, j), &p).unwrap();
            let x = 1.0;
            let v = tr.apply(|y| c.eval(y).unwrap(), x, &spec).unwrap().value;
            let expect = if j % 2 == 0 { 1.0 } else { -1.0 } * c.eval(x).unwrap();
            assert!(
                (v - expect).abs() <= 1e-7 * expect.abs().max(1e-3),
                "{j}: {v} {expect}"
            );
        }
    }
    #[test]
    fn fixed_point_and_bessel_pair() {
        let spec = QuadSpec::with_tol(1e-10);
        for (mu, nu) in [(1.0, -1.0), (2.0, 0.5), (1.5, -0.5)] {
            let p = pp(mu, nu);
            let tr = GTransform::new(&p).unwrap();
            let f0 = |y: f64| scalar_fn::bessel_k_tilde(nu / 2.0, y).unwrap();
            for x in [0.5, 1.0, 2.0] {
                let v = tr.apply(f0, x, &spec).unwrap().value;
                assert!(
                    (v - f0(x)).abs() <= 1e-6 * f0(x).abs(),
                    "{p} {x}: {v} {}",
                    f0(x)
                );
                let v = tr
                    .apply(|y| bessel_pair_input(&p, 1.25, y), x, &spec)
                    .unwrap()
                    .value;
                let w = bessel_pair_image(&p, 1.25, x).unwrap();
                assert!((v - w).abs() <= 1e-6 * w.abs(), "{p} {x}: {v} {w}");
            }
        }
    }

    #[test]
    fn commutes_with_d() {
        let p = pp(2.0, -1.0);
        let tr = GTransform::new(&p).unwrap();
        let c = lambda_combo(LambdaIndex::new(2, 1), &p).unwrap();
        let spec = QuadSpec::with_tol(1e-10);
        let df = |y: f64| {
            let s = diffop::DerivStack::from_combo(&c, y).unwrap();
            diffop::apply_d(&p, &s).unwrap()
        };
        for x in [0.5, 1.5] {
            let a = tr.apply(df, x, &spec).unwrap().value;
            let b = tr
                .apply_then_d(|y| c.eval(y).unwrap(), x, &spec)
                .unwrap()
                .value;
            assert!((a - b).abs() <= 1e-5 * a.abs().max(1.0), "{x}: {a} {b}");
        }
    }
}
