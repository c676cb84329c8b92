//! Calculus on the isotropic cone of V = ℝ^{p,q}, p ≤ q.
//!
//! Coordinates x = (x₁, …, x_n), n = p + q, with the cone
//! x₁² + … + x_p² = x_{p+1}² + … + x_n² and the norm |x|² = 2Σx_i².
//! The compact generator attached to e_j acts by (1/i)A_j with
//! A_j ψ = −½P_jψ − 2x_jψ, where P_j = ε_j x_j □ − (2E + n − 2)∂_j,
//! □ = Σ ε_i ∂_i², E = Σ x_i ∂_i and ε_i = +1 for i ≤ p, −1 for i > p.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::{One, Zero};
use rand::Rng;

use crate::diffop::{self, DerivStack};
use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::params::ParamPair;
use crate::scalar_fn;

/// (min(p,q), max(p,q), swapped).
pub fn normalize(p: usize, q: usize) -> (usize, usize, bool) {
    if p <= q {
        (p, q, false)
    } else {
        (q, p, true)
    }
}

/// (μ, ν) = (q − 2, p − 2) for ℝ^{p,q} with p ≤ q.
pub fn params_of(p: usize, q: usize) -> Result<ParamPair> {
    let (p, q, _) = normalize(p, q);
    Ok(ParamPair::from_exact(
        exact::q(q as i64 - 2),
        exact::q(p as i64 - 2),
    ))
}

fn eps(i: usize, p: usize) -> f64 {
    if i < p {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConePoint {
    pub p: usize,
    pub q: usize,
    pub coords: Vec<f64>,
    /// |x′| with x′ = (x₁, …, x_p).
    pub norm_first: f64,
    /// |x″| with x″ = (x_{p+1}, …, x_n).
    pub norm_second: f64,
    /// |x| = √(2Σx_i²).
    pub norm: f64,
}

impl ConePoint {
    pub fn new(p: usize, q: usize, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != p + q || p == 0 || q == 0 {
            return Err(Error::InvalidParams(format!(
                "cone point needs {} coordinates, got {}",
                p + q,
                coords.len()
            )));
        }
        let a: f64 = coords[..p].iter().map(|v| v * v).sum();
        let b: f64 = coords[p..].iter().map(|v| v * v).sum();
        let norm2 = 2.0 * (a + b);
        if norm2 == 0.0 {
            return Err(Error::Domain("the cone excludes the origin".into()));
        }
        if (a - b).abs() > 1e-12 * norm2 {
            return Err(Error::Domain(format!("point off the cone: Δ = {}", a - b)));
        }
        Ok(Self {
            p,
            q,
            coords,
            norm_first: a.sqrt(),
            norm_second: b.sqrt(),
            norm: norm2.sqrt(),
        })
    }

    /// Random cone point with |x| = `norm`.
    pub fn random<R: Rng>(p: usize, q: usize, norm: f64, rng: &mut R) -> Result<Self> {
        let mut gauss = |k: usize| -> Vec<f64> {
            (0..k)
                .map(|_| {
                    // Box–Muller
                    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
                    let v: f64 = rng.gen();
                    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
                })
                .collect()
        };
        let mut a = gauss(p);
        let mut b = gauss(q);
        let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        // |x|² = 2(|a|² + |b|²) = 4 s² with both halves of length s
        let s = norm / 2.0;
        a.iter_mut().for_each(|v| *v *= s / na);
        b.iter_mut().for_each(|v| *v *= s / nb);
        a.extend(b);
        Self::new(p, q, a)
    }

    pub fn first(&self) -> &[f64] {
        &self.coords[..self.p]
    }
}

/// Sparse polynomial with rational coefficients; keys are exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, Q>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut out = Self::zero(nvars);
        out.add_term(vec![0; nvars], c);
        out
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut out = Self::zero(nvars);
        out.add_term(e, Q::one());
        out
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(exps.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common degree of all terms; `None` when zero or inhomogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn mul_var(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e[i] += 1;
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * exact::q(e[i] as i64));
        }
        out
    }

    /// Σ_i w_i ∂_i² with integer weights w.
    pub fn weighted_laplacian(&self, w: &[i64]) -> Self {
        let mut out = Self::zero(self.nvars);
        for (i, wi) in w.iter().enumerate() {
            out = out.plus(&self.partial(i).partial(i).scale(&exact::q(*wi)));
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        self.weighted_laplacian(&vec![1; self.nvars])
    }

    pub fn is_harmonic(&self) -> bool {
        self.laplacian().is_zero()
    }

    /// x₁² + … + x_nvars².
    pub fn radius_squared(nvars: usize) -> Self {
        let mut out = Self::zero(nvars);
        for i in 0..nvars {
            let mut e = vec![0; nvars];
            e[i] = 2;
            out.add_term(e, Q::one());
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                exact::to_f64(c)
                    * e.iter()
                        .zip(x)
                        .map(|(k, v)| v.powi(*k as i32))
                        .product::<f64>()
            })
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

/// φ⁺_j = x_jφ − r²∂_jφ/(p+2k−2) and φ⁻_j = ∂_jφ/(p+2k−2), r² = Σx_i²,
/// for φ harmonic of degree k in p = `phi.nvars` variables (j zero-based).
pub fn harmonic_shift(phi: &MultiPoly, j: usize, dir: Direction) -> Result<MultiPoly> {
    let p = phi.nvars;
    if j >= p {
        return Err(Error::InvalidParams(format!(
            "ladder index {j} outside 0..{p}"
        )));
    }
    let k = if phi.is_zero() {
        0
    } else {
        phi.homogeneous_degree()
            .ok_or_else(|| Error::InvalidParams("ladder needs a homogeneous polynomial".into()))?
    };
    let d = phi.partial(j);
    let denom = p as i64 + 2 * k as i64 - 2;
    let shifted = if denom == 0 {
        if !d.is_zero() {
            return Err(Error::InvalidParams(format!(
                "degenerate ladder denominator p+2k-2 = 0 at p = {p}"
            )));
        }
        MultiPoly::zero(p)
    } else {
        d.scale(&exact::qf(1, denom))
    };
    Ok(match dir {
        Direction::Minus => shifted,
        Direction::Plus => phi.mul_var(j).plus(
            &MultiPoly::radius_squared(p)
                .mul(&shifted)
                .scale(&exact::q(-1)),
        ),
    })
}

/// The degree-k harmonic projection of a homogeneous polynomial of degree k,
/// Σ_i (−1)^i r^{2i} Δ^i P / (4^i i! Π_{l=1}^{i}(p/2 + k − 1 − l)).
pub fn harmonic_projection(poly: &MultiPoly) -> Result<MultiPoly> {
    let p = poly.nvars;
    let Some(k) = poly.homogeneous_degree() else {
        return Ok(poly.clone());
    };
    let r2 = MultiPoly::radius_squared(p);
    let mut out = MultiPoly::zero(p);
    let mut lap = poly.clone();
    let mut rpow = MultiPoly::constant(p, Q::one());
    let mut c = Q::one();
    let half_p = exact::qf(p as i64, 2);
    for i in 0..=(k / 2) as i64 {
        if i > 0 {
            let den = exact::q(-4 * i) * (&half_p + exact::q(k as i64 - 1 - i));
            if den.is_zero() {
                return Err(Error::InvalidParams(
                    "harmonic projection degenerate".into(),
                ));
            }
            c /= den;
            lap = lap.laplacian();
            rpow = rpow.mul(&r2);
        }
        out = out.plus(&rpow.mul(&lap).scale(&c));
    }
    Ok(out)
}

/// Central-difference partial derivatives of ψ at x.
struct Fd<'a> {
    f: &'a dyn Fn(&[f64]) -> f64,
    x: Vec<f64>,
    h: f64,
}

impl Fd<'_> {
    fn at(&self, moves: &[(usize, f64)]) -> f64 {
        let mut y = self.x.clone();
        for (i, s) in moves {
            y[*i] += s * self.h;
        }
        (self.f)(&y)
    }

    fn d1(&self, i: usize) -> f64 {
        (-self.at(&[(i, 2.0)]) + 8.0 * self.at(&[(i, 1.0)]) - 8.0 * self.at(&[(i, -1.0)])
            + self.at(&[(i, -2.0)]))
            / (12.0 * self.h)
    }

    fn d2(&self, i: usize, k: usize) -> f64 {
        let h = self.h;
        if i == k {
            return (-self.at(&[(i, 2.0)]) + 16.0 * self.at(&[(i, 1.0)]) - 30.0 * self.at(&[])
                + 16.0 * self.at(&[(i, -1.0)])
                - self.at(&[(i, -2.0)]))
                / (12.0 * h * h);
        }
        let m = |a: f64, b: f64| self.at(&[(i, a), (k, b)]);
        (m(1.0, 1.0) - m(1.0, -1.0) - m(-1.0, 1.0) + m(-1.0, -1.0)) / (4.0 * h * h)
    }
}

/// P_jψ(x) by central differences with step h (j zero-based).
pub fn p_operator(
    j: usize,
    p: usize,
    q: usize,
    psi: &dyn Fn(&[f64]) -> f64,
    x: &[f64],
    h: f64,
) -> f64 {
    let n = p + q;
    let fd = Fd {
        f: psi,
        x: x.to_vec(),
        h,
    };
    let boxed: f64 = (0..n).map(|i| eps(i, p) * fd.d2(i, i)).sum();
    let euler_dj: f64 = (0..n).map(|i| x[i] * fd.d2(i, j)).sum();
    eps(j, p) * x[j] * boxed - 2.0 * euler_dj - (n as f64 - 2.0) * fd.d1(j)
}

/// P_j applied to a polynomial in all n variables, exactly.
pub fn p_operator_poly(j: usize, p: usize, psi: &MultiPoly) -> MultiPoly {
    let n = psi.nvars;
    let w: Vec<i64> = (0..n).map(|i| if i < p { 1 } else { -1 }).collect();
    let boxed = psi.weighted_laplacian(&w);
    let dj = psi.partial(j);
    let mut euler = MultiPoly::zero(n);
    for i in 0..n {
        euler = euler.plus(&dj.partial(i).mul_var(i));
    }
    let first = boxed.mul_var(j).scale(&exact::q(w[j]));
    first
        .plus(&euler.scale(&exact::q(-2)))
        .plus(&dj.scale(&exact::q(-(n as i64 - 2))))
}

/// A_jψ = −½P_jψ − 2x_jψ by finite differences; the action is (1/i) times this.
pub fn a_operator(
    j: usize,
    p: usize,
    q: usize,
    psi: &dyn Fn(&[f64]) -> f64,
    x: &[f64],
    h: f64,
) -> f64 {
    -0.5 * p_operator(j, p, q, psi, x, h) - 2.0 * x[j] * psi(x)
}

fn times_minus_i(v: f64) -> Complex64 {
    Complex64::new(0.0, -v)
}

/// (1/i)(f″ + m f′/|x| − f)(|x|)·(x|e_j), with (x|e_j) = 2x_j and m = q−1
/// for j < p, p−1 otherwise. `f` holds (f, f′, f″) at |x|.
pub fn radial_k_action(j: usize, x: &ConePoint, f: [f64; 3]) -> Complex64 {
    times_minus_i(radial_a(j, x.p, x.q, &x.coords, x.norm, f))
}

fn radial_a(j: usize, p: usize, q: usize, coords: &[f64], r: f64, f: [f64; 3]) -> f64 {
    let m = if j < p {
        q as f64 - 1.0
    } else {
        p as f64 - 1.0
    };
    (f[2] + m * f[1] / r - f[0]) * 2.0 * coords[j]
}

/// (1/i)[(2k+p−q)K̃_{ν/2+k+1}(|x|)φ⁺_j(x′) − (2k+p+q−4)K̃_{ν/2+k−1}(|x|)φ⁻_j(x′)].
pub fn ktype_action(j: usize, k: u32, phi: &MultiPoly, x: &ConePoint) -> Result<Complex64> {
    let (p, q) = (x.p, x.q);
    if j >= p {
        return Ok(Complex64::zero());
    }
    let nu = p as f64 - 2.0;
    let plus = harmonic_shift(phi, j, Direction::Plus)?.eval(x.first());
    let minus = harmonic_shift(phi, j, Direction::Minus)?.eval(x.first());
    let c1 = (2 * k as i64 + p as i64 - q as i64) as f64;
    let c2 = (2 * k as i64 + p as i64 + q as i64 - 4) as f64;
    let mut v = 0.0;
    if c1 != 0.0 && plus != 0.0 {
        v += c1 * scalar_fn::bessel_k_tilde(nu / 2.0 + k as f64 + 1.0, x.norm)? * plus;
    }
    if c2 != 0.0 && minus != 0.0 {
        v -= c2 * scalar_fn::bessel_k_tilde(nu / 2.0 + k as f64 - 1.0, x.norm)? * minus;
    }
    Ok(times_minus_i(v))
}

/// (f, f′, f″) of f = K̃_α at t.
pub fn k_tilde_profile(alpha: f64, t: f64) -> Result<[f64; 3]> {
    let k0 = scalar_fn::bessel_k_tilde(alpha, t)?;
    let k1 = scalar_fn::bessel_k_tilde(alpha + 1.0, t)?;
    let k2 = scalar_fn::bessel_k_tilde(alpha + 2.0, t)?;
    Ok([k0, -0.5 * t * k1, -0.5 * k1 + 0.25 * t * t * k2])
}

/// Δ(y) = y₁² + … + y_p² − y_{p+1}² − … − y_n².
pub fn cone_form(p: usize, y: &[f64]) -> f64 {
    y.iter().enumerate().map(|(i, v)| eps(i, p) * v * v).sum()
}

/// The same action through the finite-difference P_j oracle applied to the
/// extension ψ(y) = K̃_{ν/2+k}(|y|)φ(y′) + Δ(y)·g(y).
pub fn ktype_action_fd(
    j: usize,
    k: u32,
    phi: &MultiPoly,
    x: &ConePoint,
    h: f64,
    g: Option<&dyn Fn(&[f64]) -> f64>,
) -> Complex64 {
    let (p, q) = (x.p, x.q);
    let nu = p as f64 - 2.0;
    let psi = |y: &[f64]| {
        let r = (2.0 * y.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let base = scalar_fn::bessel_k_tilde(nu / 2.0 + k as f64, r).unwrap_or(f64::NAN)
            * phi.eval(&y[..p]);
        base + g.map_or(0.0, |g| cone_form(p, y) * g(y))
    };
    times_minus_i(a_operator(j, p, q, &psi, &x.coords, h))
}

/// (lhs, rhs) of −Σ_j dπ(e_j,0,−αe_j)²ψ = 2D_{μ,ν}f + (q−p)(p+q−2)f for
/// ψ = f(|x|). The first application uses the radial closed form, the second
/// central differences with step h = 1e-3·|x|. `f` returns (f, …, f⁗) at t.
pub fn casimir_sum(x: &ConePoint, f: &dyn Fn(f64) -> Result<[f64; 5]>) -> Result<(f64, f64)> {
    let (p, q) = (x.p, x.q);
    let n = p + q;
    let h = 1e-3 * x.norm;
    let mut lhs = 0.0;
    for j in 0..n {
        let g = |y: &[f64]| {
            let r = (2.0 * y.iter().map(|v| v * v).sum::<f64>()).sqrt();
            match f(r) {
                Ok(d) => radial_a(j, p, q, y, r, [d[0], d[1], d[2]]),
                Err(_) => f64::NAN,
            }
        };
        lhs += a_operator(j, p, q, &g, &x.coords, h);
    }
    let params = params_of(p, q)?;
    let d = f(x.norm)?;
    let stack = DerivStack {
        x: x.norm,
        d,
        mag: d.map(f64::abs),
    };
    let rhs = 2.0 * diffop::apply_d(&params, &stack)? + ((q - p) * (p + q - 2)) as f64 * d[0];
    if !lhs.is_finite() {
        return Err(Error::Divergent(
            "Casimir sum produced a non-finite value".into(),
        ));
    }
    Ok((lhs, rhs))
}

/// The radial form t²B_a²f + 2m t(B_af)′ + (p+q−2)m B_af summed over
/// (a, m) = ((q−2)/2, p) and ((p−2)/2, q), with B_a f = f″ + (2a+1)f′/t − f.
pub fn casimir_radial_form(p: usize, q: usize, t: f64, d: [f64; 5]) -> f64 {
    let (p, q, _) = normalize(p, q);
    let dd = (p + q - 2) as f64;
    let side = |a: f64, m: f64| {
        let c = 2.0 * a + 1.0;
        let [f0, f1, f2, f3, f4] = d;
        let g = f2 + c * f1 / t - f0;
        let g1 = f3 + c * f2 / t - c * f1 / (t * t) - f1;
        let g2 = f4 + c * f3 / t - 2.0 * c * f2 / (t * t) + 2.0 * c * f1 / t.powi(3) - f2;
        let bg = g2 + c * g1 / t - g;
        t * t * bg + 2.0 * m * t * g1 + dd * m * g
    };
    side((q as f64 - 2.0) / 2.0, p as f64) + side((p as f64 - 2.0) / 2.0, q as f64)
}

/// Jordan product on ℝ^{p,q} with unit e₁:
/// x·y = (x₁y₁ + β(x̂,ŷ), x₁ŷ + y₁x̂), β(x̂,ŷ) = −Σ_{2≤i≤p} x_iy_i + Σ_{i>p} x_iy_i.
pub fn jordan_product(p: usize, x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let beta: f64 = (1..n)
        .map(|i| if i < p { -x[i] * y[i] } else { x[i] * y[i] })
        .sum();
    let mut z = vec![0.0; n];
    z[0] = x[0] * y[0] + beta;
    for i in 1..n {
        z[i] = x[0] * y[i] + y[0] * x[i];
    }
    z
}

/// Trace form τ(x, y) = 2(x₁y₁ + β(x̂, ŷ)).
pub fn trace_form(p: usize, x: &[f64], y: &[f64]) -> f64 {
    jordan_product(p, x, y)[0] * 2.0
}

/// Cartan involution α: sign flip on coordinates 2..p.
pub fn involution(p: usize, x: &[f64]) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(i, v)| if i >= 1 && i < p { -v } else { *v })
        .collect()
}

/// P(x, y)v = x(yv) + y(xv) − (xy)v.
pub fn quadratic_rep(p: usize, x: &[f64], y: &[f64], v: &[f64]) -> Vec<f64> {
    let a = jordan_product(p, x, &jordan_product(p, y, v));
    let b = jordan_product(p, y, &jordan_product(p, x, v));
    let c = jordan_product(p, &jordan_product(p, x, y), v);
    a.iter()
        .zip(&b)
        .zip(&c)
        .map(|((a, b), c)| a + b - c)
        .collect()
}

/// τ(P(αx, αe_j)x, e_j) at a cone point.
pub fn frame_pairing(j: usize, x: &ConePoint) -> f64 {
    let n = x.coords.len();
    let mut e = vec![0.0; n];
    e[j] = 1.0;
    let ax = involution(x.p, &x.coords);
    let ae = involution(x.p, &e);
    trace_form(x.p, &quadratic_rep(x.p, &ax, &ae, &x.coords), &e)
}

/// Φ(K̃_{ν/2+k}⊗φ)(x₀, x′) = ((−2i)^k/((p−q)/2)_k) C̃^{(p−1)/2+k}_{(q−p)/2−k}(x₀) φ(x′).
pub fn gegenbauer_intertwiner(
    p: usize,
    q: usize,
    k: i64,
    phi: &MultiPoly,
    point: &[f64],
) -> Result<Complex64> {
    if p > q || (q - p) % 2 != 0 {
        return Err(Error::InvalidParams(format!(
            "intertwiner needs p <= q and q-p even, got ({p}, {q})"
        )));
    }
    let top = ((q - p) / 2) as i64;
    if k < 0 || k > top {
        return Ok(Complex64::zero());
    }
    if point.len() != p + 1 {
        return Err(Error::InvalidParams(format!(
            "sphere point needs {} coordinates",
            p + 1
        )));
    }
    let half = (p as f64 - q as f64) / 2.0;
    let coef = Complex64::new(0.0, -2.0).powi(k as i32) / scalar_fn::pochhammer(half, k as u32);
    let c = scalar_fn::gegenbauer_tilde(
        (top - k) as u32,
        (p as f64 - 1.0) / 2.0 + k as f64,
        point[0],
    )?;
    Ok(coef * c * phi.eval(&point[1..]))
}

/// Both sides of the intertwining identity for (e_j, 0, −αe_j) at a point of S^p:
/// (−2x_j∂_{x₀} + 2x₀∂_{x_j})Φ(K̃_{ν/2+k}⊗φ) against
/// (1/i)[(2k+p−q)Φ(K̃_{ν/2+k+1}⊗φ⁺_j) − (2k+p+q−4)Φ(K̃_{ν/2+k−1}⊗φ⁻_j)].
pub fn intertwiner_sides(
    p: usize,
    q: usize,
    k: i64,
    phi: &MultiPoly,
    j: usize,
    point: &[f64],
) -> Result<(Complex64, Complex64)> {
    let top = ((q - p) / 2) as i64;
    let half = (p as f64 - q as f64) / 2.0;
    let lam = (p as f64 - 1.0) / 2.0 + k as f64;
    let coef = Complex64::new(0.0, -2.0).powi(k as i32) / scalar_fn::pochhammer(half, k as u32);
    let x0 = point[0];
    let xp = &point[1..];
    // ∂_{x₀} C̃_n^λ = 2 C̃_{n−1}^{λ+1}
    let n = top - k;
    let dc = if n >= 1 {
        2.0 * scalar_fn::gegenbauer_tilde((n - 1) as u32, lam + 1.0, x0)?
    } else {
        0.0
    };
    let c = if n >= 0 {
        scalar_fn::gegenbauer_tilde(n as u32, lam, x0)?
    } else {
        0.0
    };
    let lhs = coef * (-2.0 * xp[j] * dc * phi.eval(xp) + 2.0 * x0 * c * phi.partial(j).eval(xp));
    let plus = harmonic_shift(phi, j, Direction::Plus)?;
    let minus = harmonic_shift(phi, j, Direction::Minus)?;
    let a = gegenbauer_intertwiner(p, q, k + 1, &plus, point)?;
    let b = gegenbauer_intertwiner(p, q, k - 1, &minus, point)?;
    let c1 = (2 * k + p as i64 - q as i64) as f64;
    let c2 = (2 * k + p as i64 + q as i64 - 4) as f64;
    let rhs = (a * c1 - b * c2) * Complex64::new(0.0, -1.0);
    Ok((lhs, rhs))
}
