//! Verification suites: each produces rows (check-id, params, residual, tol, pass).
//!
//! Residuals are relative unless the row id says otherwise. Suites are pure and
//! independent; [`run_many`] runs several on a bounded pool of threads and
//! returns them in request order.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diffop::{self, DerivStack};
use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::gtransform::{self, GTransform, KernelRep};
use crate::identity;
use crate::jordan::{self, FamilyParams};
use crate::lambda::{self, LambdaIndex, LambdaTable, ShiftRecurrence, Side};
use crate::params::ParamPair;
use crate::quad::{self, QuadSpec};
use crate::rank2::{self, ConePoint, MultiPoly};
use crate::scalar_fn;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub id: String,
    pub params: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(id: impl Into<String>, params: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            id: id.into(),
            params: params.into(),
            residual,
            tol,
            pass: residual <= tol,
        }
    }

    fn relative(id: &str, params: String, got: f64, expect: f64, scale: f64, tol: f64) -> Self {
        let r = if scale > 0.0 {
            (got - expect).abs() / scale
        } else {
            (got - expect).abs()
        };
        Self::new(id, params, if r.is_nan() { f64::INFINITY } else { r }, tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Eigen,
    Closed,
    Norms,
    Gram,
    Recurrences,
    Moments,
    Asymptotics,
    Transform,
    Involution,
    Registry,
    Rank2,
    Monodromy,
    Substrate,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::Eigen,
        Suite::Closed,
        Suite::Norms,
        Suite::Gram,
        Suite::Recurrences,
        Suite::Moments,
        Suite::Asymptotics,
        Suite::Transform,
        Suite::Involution,
        Suite::Registry,
        Suite::Rank2,
        Suite::Monodromy,
        Suite::Substrate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Eigen => "eigen",
            Suite::Closed => "closed",
            Suite::Norms => "norms",
            Suite::Gram => "gram",
            Suite::Recurrences => "recurrences",
            Suite::Moments => "moments",
            Suite::Asymptotics => "asymptotics",
            Suite::Transform => "transform",
            Suite::Involution => "involution",
            Suite::Registry => "registry",
            Suite::Rank2 => "rank2",
            Suite::Monodromy => "monodromy",
            Suite::Substrate => "substrate",
        }
    }

    /// Whether `--mu/--nu` replace the default parameter sample.
    pub fn takes_params(self) -> bool {
        matches!(
            self,
            Suite::Eigen
                | Suite::Norms
                | Suite::Gram
                | Suite::Recurrences
                | Suite::Moments
                | Suite::Monodromy
        )
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown suite {s}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    /// Replaces the default parameter sample of suites that take one.
    pub params: Option<ParamPair>,
    /// Upper bound on j; each suite caps it at its own default.
    pub j_max: Option<u32>,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            params: None,
            j_max: None,
            seed: 20_240_531,
        }
    }
}

impl SuiteOptions {
    fn pairs(&self, default: &[(f64, f64)]) -> Result<Vec<ParamPair>> {
        match &self.params {
            Some(p) => Ok(vec![p.clone()]),
            None => default.iter().map(|&(m, n)| ParamPair::new(m, n)).collect(),
        }
    }

    fn j(&self, default: u32) -> u32 {
        self.j_max.unwrap_or(default)
    }
}

/// The parameter sample shared by the eigen, norm and moment suites.
pub const XI_SAMPLE: [(f64, f64); 7] = [
    (2.0, -1.0),
    (0.5, -1.0),
    (1.0, 0.0),
    (2.0, 0.0),
    (3.0, 1.0),
    (2.0, 2.0),
    (5.0, 3.0),
];

fn ptag(p: &ParamPair) -> String {
    format!("mu={};nu={}", p.mu(), p.nu())
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Vec<CheckRow>> {
    match suite {
        Suite::Eigen => eigen(opts),
        Suite::Closed => closed(opts),
        Suite::Norms => norms(opts),
        Suite::Gram => gram(opts),
        Suite::Recurrences => recurrences(opts),
        Suite::Moments => moments(opts),
        Suite::Asymptotics => asymptotics(),
        Suite::Transform => transform(opts),
        Suite::Involution => involution(),
        Suite::Registry => registry(),
        Suite::Rank2 => rank2_checks(opts),
        Suite::Monodromy => monodromy(opts),
        Suite::Substrate => substrate(),
    }
}

/// Runs the suites on at most `workers` threads; results keep request order.
pub fn run_many(
    suites: &[Suite],
    opts: &SuiteOptions,
    workers: usize,
) -> Vec<(Suite, Result<Vec<CheckRow>>)> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<Vec<CheckRow>>>>> =
        Mutex::new(suites.iter().map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, suites.len().max(1)) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= suites.len() {
                    break;
                }
                let r = run_suite(suites[k], opts);
                slots.lock().expect("result slots poisoned")[k] = Some(r);
            });
        }
    });
    let slots = slots.into_inner().expect("result slots poisoned");
    suites
        .iter()
        .zip(slots)
        .map(|(s, r)| (*s, r.expect("every suite ran")))
        .collect()
}

pub const EIGEN_XS: [f64; 4] = [0.3, 1.0, 3.0, 8.0];

fn eigen(opts: &SuiteOptions) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let jm = opts.j(8) as i64;
    for p in opts.pairs(&XI_SAMPLE)? {
        for i in 1..=4u8 {
            if !p.admits_family(i) {
                continue;
            }
            let table = LambdaTable::build(i, &p, jm)?;
            for j in table.valuation().max(0)..=jm {
                let c = table.get(j)?;
                let lam = diffop::eigenvalue(&p, j);
                for x in EIGEN_XS {
                    let s = DerivStack::from_combo(&c, x)?;
                    let (r, scale) = diffop::eigen_residual(&p, &s, lam)?;
                    rows.push(CheckRow::relative(
                        "eigen",
                        format!("{};i={i};j={j};x={x}", ptag(&p)),
                        r,
                        0.0,
                        scale,
                        1e-8,
                    ));
                }
            }
        }
    }
    Ok(rows)
}

pub const CLOSED_MUS: [f64; 4] = [0.5, 1.0, 2.5, 4.0];

/// Twenty points spread geometrically over [0.05, 20].
pub fn closed_points() -> Vec<f64> {
    (0..20)
        .map(|k| 0.05 * 400f64.powf(k as f64 / 19.0))
        .collect()
}

fn closed(opts: &SuiteOptions) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let jm = opts.j(8) as i64;
    let xs = closed_points();
    for mu in CLOSED_MUS {
        for nu in [-1.0, 1.0] {
            let p = ParamPair::new(mu, nu)?;
            let t2 = LambdaTable::build(2, &p, jm)?;
            let t1 = if nu == -1.0 {
                Some(LambdaTable::build(1, &p, jm)?)
            } else {
                None
            };
            for j in 0..=jm {
                for &x in &xs {
                    let got = t2.eval_precise(j, x)?;
                    let expect = lambda::closed_form_lambda2(j as u32, mu, nu, x)?;
                    rows.push(CheckRow::relative(
                        "closed-lambda2",
                        format!("{};j={j};x={x}", ptag(&p)),
                        got,
                        expect,
                        expect.abs(),
                        1e-12,
                    ));
                    if let Some(t1) = &t1 {
                        let got = t1.eval_precise(j, x)?;
                        let expect = lambda::closed_form_lambda1_nu_minus1(j as u32, mu, x)?;
                        rows.push(CheckRow::relative(
                            "closed-lambda1",
                            format!("{};j={j};x={x}", ptag(&p)),
                            got,
                            expect,
                            expect.abs(),
                            1e-12,
                        ));
                    }
                }
            }
        }
    }
    Ok(rows)
}

fn product_spec() -> QuadSpec {
    QuadSpec::for_products(1e-11)
}

fn norms(opts: &SuiteOptions) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let jm = opts.j(6) as i64;
    for p in opts.pairs(&XI_SAMPLE)? {
        let t = LambdaTable::build(2, &p, jm)?;
        for j in 0..=jm {
            let c = t.get(j)?;
            let h = (p.mu() + p.nu() + 1.0) / 2.0;
            let got = quad::integrate_halfline(
                |x| c.eval_times_pow(x, h).unwrap_or(f64::NAN).powi(2),
                &product_spec(),
            )?;
            let expect = lambda::norm_squared(&p, j as u32)?;
            rows.push(CheckRow::relative(
                "norm",
                format!("{};j={j}", ptag(&p)),
                got.value,
                expect,
                expect.abs(),
                1e-6,
            ));
        }
    }
    Ok(rows)
}

fn gram(opts: &SuiteOptions) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let jm = opts.j(6) as i64;
    for p in opts.pairs(&XI_SAMPLE)? {
        let t = LambdaTable::build(2, &p, jm)?;
        let combos: Vec<_> = (0..=jm).map(|j| t.get(j)).collect::<Result<_>>()?;
        let diag: Vec<f64> = (0..=jm as u32)
            .map(|j| lambda::norm_squared(&p, j))
            .collect::<Result<_>>()?;
        for a in 0..combos.len() {
            for b in a + 1..combos.len() {
                let (ca, cb) = (&combos[a], &combos[b]);
                let h = (p.mu() + p.nu() + 1.0) / 2.0;
                let g = quad::integrate_halfline(
                    |x| {
                        ca.eval_times_pow(x, h).unwrap_or(f64::NAN)
                            * cb.eval_times_pow(x, h).unwrap_or(f64::NAN)
                    },
                    &product_spec(),
                )?;
                rows.push(CheckRow::relative(
                    "gram-offdiag",
                    format!("{};j={a};k={b}", ptag(&p)),
                    g.value,
                    0.0,
                    (diag[a] * diag[b]).sqrt(),
                    1e-6,
                ));
            }
        }
    }
    Ok(rows)
}

const RECREL_PAIRS: [(f64, f64); 3] = [(2.0, -1.0), (1.5, 0.5), (3.0, 1.0)];
const SHIFT_PAIRS: [(f64, f64); 3] = [(2.5, 0.5), (3.0, 1.5), (5.0, 2.5)];

fn recurrences(opts: &SuiteOptions) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let jm = opts.j(6) as i64;
    for p in opts.pairs(&RECREL_PAIRS)? {
        for i in 1..=4u8 {
            if !p.admits_family(i) {
                continue;
            }
            let table = LambdaTable::build(i, &p, jm + 2)?;
            for j in table.valuation().max(0)..=jm {
                let h = lambda::recrel_h_residual(&table, j)?;
                let exact_zero = identity::is_identically_zero(&h);
                rows.push(CheckRow::new(
                    "recrel-h-exact",
                    format!("{};i={i};j={j}", ptag(&p)),
                    if exact_zero { 0.0 } else { 1.0 },
                    0.0,
                ));
                for x in [0.4, 1.0, 3.0] {
                    let (l, r, s) = lambda::recrel_xsq_sides(&table, j, x)?;
                    rows.push(CheckRow::relative(
                        "recrel-xsq",
                        format!("{};i={i};j={j};x={x}", ptag(&p)),
                        l,
                        r,
                        s,
                        1e-9,
                    ));
                }
            }
        }
    }
    for p in opts.pairs(&SHIFT_PAIRS)? {
        for i in 1..=4u8 {
            if !p.admits_family(i) {
                continue;
            }
            for which in [
                ShiftRecurrence::Mu,
                ShiftRecurrence::Nu,
                ShiftRecurrence::Derivative,
            ] {
                if i >= 3 && which == ShiftRecurrence::Mu && !p.shifted(-2, 0).admits_family(i) {
                    continue;
                }
                let v = lambda::valuation(i, &p)?.max(0);
                for j in v..=jm.max(v) {
                    for x in [0.5, 2.0] {
                        let (l, r, s) = lambda::formula1_sides(which, i, &p, j, x)?;
                        rows.push(CheckRow::relative(
                            "formula1",
                            format!("{};i={i};j={j};x={x};shift={which:?}", ptag(&p)),
                            l,
                            r,
                            s,
                            1e-9,
                        ));
                    }
                }
            }
        }
    }
    Ok(rows)
}

fn moments(opts: &SuiteOptions) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let jm = opts.j(5) as i64;
    let spec = QuadSpec::with_tol(1e-11);
    for p in opts.pairs(&XI_SAMPLE)? {
        let t = LambdaTable::build(2, &p, jm)?;
        for j in 0..=jm {
            let c = t.get(j)?;
            let (mu, nu) = (p.mu(), p.nu());
            let a = quad::integrate_halfline(
                |x| c.eval_times_pow(x, mu + 1.0).unwrap_or(f64::NAN),
                &spec,
            )?;
            let e = lambda::moment_mu(&p, j as u32)?;
            rows.push(CheckRow::relative(
                "moment-mu",
                format!("{};j={j}", ptag(&p)),
                a.value,
                e,
                e.abs(),
                1e-7,
            ));
            let b = quad::integrate_halfline(
                |x| c.eval_times_pow(x, mu + nu + 1.0).unwrap_or(f64::NAN),
                &spec,
            )?;
            let e = lambda::moment_mu_nu(&p, j as u32)?;
            rows.push(CheckRow::relative(
                "moment-mu-nu",
                format!("{};j={j}", ptag(&p)),
                b.value,
                e,
                e.abs(),
                1e-7,
            ));
        }
    }
    Ok(rows)
}

/// (family, μ, ν) samples for the small-x leading terms.
pub const ASYMPTOTIC_CASES: [(u8, f64, f64); 8] = [
    (1, 1.5, 0.5),
    (2, 1.5, 1.5),
    (2, 2.0, -1.5),
    (3, 3.0, 0.5),
    (4, 3.0, 1.5),
    (4, 1.0, -1.5),
    (2, 2.0, 0.0),
    (4, 3.0, 0.0),
];

fn asymptotics() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let x = 1e-4;
    for (i, mu, nu) in ASYMPTOTIC_CASES {
        let p = ParamPair::new(mu, nu)?;
        let v = lambda::valuation(i, &p)?.max(0);
        for j in v..v + 3 {
            let idx = LambdaIndex::new(i, j);
            let lead = lambda::asymptotic_lead(idx, &p, Side::Zero)?;
            let tag = format!("{};i={i};j={j};x={x}", ptag(&p));
            if lead.log_flag {
                // slope of the value against ln(x/2) between x and x/10
                let x2 = x / 10.0;
                let f1 = lambda::lambda_eval(idx, &p, x)? * x.powf(-lead.exponent);
                let f2 = lambda::lambda_eval(idx, &p, x2)? * x2.powf(-lead.exponent);
                let slope = (f1 - f2) / ((x / 2.0).ln() - (x2 / 2.0).ln());
                rows.push(CheckRow::relative(
                    "asymptotic-log-slope",
                    tag,
                    slope,
                    lead.coefficient,
                    lead.coefficient.abs(),
                    0.01,
                ));
            } else {
                let val = lambda::lambda_eval(idx, &p, x)?;
                let pred = lead.coefficient * x.powf(lead.exponent);
                rows.push(CheckRow::relative(
                    "asymptotic-lead",
                    tag,
                    val,
                    pred,
                    pred.abs(),
                    0.01,
                ));
            }
        }
    }
    Ok(rows)
}

pub const TRANSFORM_MUS: [f64; 3] = [0.5, 1.0, 2.0];
pub const TRANSFORM_XS: [f64; 3] = [0.5, 1.0, 2.0];
const FIXED_POINT_PAIRS: [(f64, f64); 5] = [
    (0.5, -1.0),
    (1.0, -1.0),
    (2.0, -1.0),
    (2.0, 0.5),
    (1.5, -0.5),
];
const KERNEL_ODE_PAIRS: [(f64, f64); 4] = [(2.0, 0.5), (1.5, -0.5), (2.0, -1.0), (1.0, 1.0)];

fn transform_spec() -> QuadSpec {
    QuadSpec::with_tol(1e-10)
}

fn transform(opts: &SuiteOptions) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let jm = opts.j(5) as i64;
    let spec = transform_spec();
    for mu in TRANSFORM_MUS {
        let p = ParamPair::new(mu, -1.0)?;
        let tr = GTransform::new(&p)?;
        let t = LambdaTable::build(2, &p, jm)?;
        for j in 0..=jm {
            let c = t.get(j)?;
            for x in TRANSFORM_XS {
                let v = tr.apply(|y| c.eval(y).unwrap_or(f64::NAN), x, &spec)?.value;
                let e = if j % 2 == 0 { 1.0 } else { -1.0 } * c.eval(x)?;
                // the L² norm stands in for |e| at zeros of the Laguerre factor
                let scale = e.abs().max(lambda::norm_squared(&p, j as u32)?.sqrt());
                rows.push(CheckRow::relative(
                    "transform-eigen",
                    format!("{};j={j};x={x}", ptag(&p)),
                    v,
                    e,
                    scale,
                    1e-6,
                ));
            }
        }
    }
    for (mu, nu) in FIXED_POINT_PAIRS {
        let p = ParamPair::new(mu, nu)?;
        let tr = GTransform::new(&p)?;
        for x in TRANSFORM_XS {
            let f0 = |y: f64| scalar_fn::bessel_k_tilde(nu / 2.0, y).unwrap_or(f64::NAN);
            let v = tr.apply(f0, x, &spec)?.value;
            rows.push(CheckRow::relative(
                "transform-fixed-point",
                format!("{};x={x}", ptag(&p)),
                v,
                f0(x),
                f0(x).abs(),
                1e-6,
            ));
            let v = tr
                .apply(|y| gtransform::bessel_pair_input(&p, 1.25, y), x, &spec)?
                .value;
            let w = gtransform::bessel_pair_image(&p, 1.25, x)?;
            rows.push(CheckRow::relative(
                "transform-bessel-pair",
                format!("{};alpha=1.25;x={x}", ptag(&p)),
                v,
                w,
                w.abs(),
                1e-6,
            ));
        }
    }
    for (mu, nu) in KERNEL_ODE_PAIRS {
        let p = ParamPair::new(mu, nu)?;
        let k = KernelRep::new(&p)?;
        for t in [0.3, 2.0, 15.0, 60.0] {
            let (lhs, rhs, scale) = kernel_ode_sides(&k, mu, nu, t)?;
            rows.push(CheckRow::relative(
                "kernel-ode",
                format!("{};t={t}", ptag(&p)),
                lhs,
                rhs,
                scale,
                1e-7,
            ));
        }
    }
    Ok(rows)
}

/// θ(θ+μ)(θ+ν)(θ+μ+ν)K against t²K, with the sum of term magnitudes.
pub fn kernel_ode_sides(k: &KernelRep, mu: f64, nu: f64, t: f64) -> Result<(f64, f64, f64)> {
    let s = k.theta_stack(t)?;
    let e3 = 2.0 * (mu + nu);
    let e2 = (mu + nu).powi(2) + mu * nu;
    let e1 = mu * nu * (mu + nu);
    let lhs = s[4] + e3 * s[3] + e2 * s[2] + e1 * s[1];
    let scale = s[4].abs()
        + (e3 * s[3]).abs()
        + (e2 * s[2]).abs()
        + (e1 * s[1]).abs()
        + (t * t * s[0]).abs();
    Ok((lhs, t * t * s[0], scale))
}

fn involution() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let inner = QuadSpec::with_tol(1e-11);
    let outer = QuadSpec::with_tol(1e-8);
    for mu in [1.0, 2.0] {
        let p = ParamPair::new(mu, -1.0)?;
        let tr = GTransform::new(&p)?;
        let f = |y: f64| y * (-y).exp();
        let tf = |y: f64| tr.apply(f, y, &inner).map(|r| r.value).unwrap_or(f64::NAN);
        for x in TRANSFORM_XS {
            // f = ((μ+1)/2)e^{−y} − ½e^{−y}L_1^μ(2y) in the eigenbasis, so Tf = e^{−x}(μ+1−x)
            let first = tr.apply(f, x, &inner)?.value;
            let e = (-x).exp() * (mu + 1.0 - x);
            let scale = (-x).exp() * (mu + 1.0 + x);
            rows.push(CheckRow::relative(
                "involution-first-step",
                format!("{};x={x}", ptag(&p)),
                first,
                e,
                scale,
                1e-6,
            ));
            let v = tr.apply(tf, x, &outer)?.value;
            rows.push(CheckRow::relative(
                "involution",
                format!("{};x={x}", ptag(&p)),
                v,
                f(x),
                f(x).abs(),
                1e-5,
            ));
        }
    }
    Ok(rows)
}

/// Frozen (μ, ν) per registry row at a representative size.
pub fn parameter_table() -> Vec<(&'static str, Option<FamilyParams>, Q, Q)> {
    let s = FamilyParams::Size;
    let (q, qf) = (exact::q, exact::qf);
    vec![
        ("I.1", Some(s(5)), qf(3, 2), q(-1)),
        ("I.2", Some(s(3)), q(2), q(-1)),
        ("I.3", Some(s(3)), q(5), q(-1)),
        ("I.4", Some(s(6)), q(3), q(-1)),
        ("I.5", None, q(11), q(-1)),
        ("II.2", Some(s(4)), q(2), q(0)),
        ("II.3", Some(s(3)), q(3), q(1)),
        ("II.4", Some(FamilyParams::PQ(5, 3)), q(3), q(1)),
        ("II.5", None, q(7), q(3)),
        ("III.1", Some(s(4)), q(3), q(-1)),
        ("III.2", Some(s(3)), q(4), q(0)),
        ("III.3", Some(s(3)), q(8), q(2)),
        ("III.4", Some(s(7)), q(5), q(3)),
        ("III.5", None, q(16), q(6)),
        ("IV.1", Some(s(3)), q(5), q(-1)),
        ("IV.2", Some(s(2)), q(6), q(0)),
        ("IV.4", Some(s(5)), q(3), q(-5)),
    ]
}

fn registry() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let bit = |ok: bool| if ok { 0.0 } else { 1.0 };
    for (label, size, mu, nu) in parameter_table() {
        let e = jordan::row(label)?.instantiate(size)?;
        let tag = format!(
            "row={label};size={}",
            size.map_or("-".to_string(), |s| s.to_string())
        );
        rows.push(CheckRow::new(
            "registry-table",
            tag.clone(),
            bit(jordan::mu_nu_exact(&e) == (mu, nu)),
            0.0,
        ));
    }
    for spec in jordan::rows() {
        for size in registry_sizes(spec.size) {
            let e = spec.instantiate(size)?;
            let tag = format!(
                "row={};size={}",
                e.label,
                size.map_or("-".to_string(), |s| s.to_string())
            );
            rows.push(CheckRow::new(
                "registry-invariants",
                tag.clone(),
                bit(jordan::check_invariants(&e).is_ok()),
                0.0,
            ));
            let (mu, nu) = jordan::mu_nu_exact(&e);
            let sum = exact::qf((e.r0 * e.d) as i64, 2) - exact::q(2);
            rows.push(CheckRow::new(
                "registry-mu-plus-nu",
                tag.clone(),
                bit(&mu + &nu == sum),
                0.0,
            ));
            if let Some(by_shape) = jordan::mu_nu_by_shape(&e) {
                rows.push(CheckRow::new(
                    "registry-shape-route",
                    tag.clone(),
                    bit(by_shape == (mu, nu)),
                    0.0,
                ));
            }
            if jordan::is_euclidean(&e) {
                let ok = e.n == e.n0 && e.r == e.r0 && e.d == e.d0 && e.e == 0;
                rows.push(CheckRow::new("registry-euclidean", tag, bit(ok), 0.0));
            }
        }
    }
    Ok(rows)
}

fn registry_sizes(kind: jordan::SizeKind) -> Vec<Option<FamilyParams>> {
    match kind {
        jordan::SizeKind::Fixed => vec![None],
        jordan::SizeKind::N { min } => (min..min + 4)
            .map(|n| Some(FamilyParams::Size(n)))
            .collect(),
        jordan::SizeKind::PQ { min } => [(0, 0), (0, 2), (1, 2), (3, 1), (2, 2)]
            .iter()
            .map(|(a, b)| Some(FamilyParams::PQ(min + a, min + b)))
            .collect(),
    }
}

pub const RANK2_SHAPES: [(usize, usize); 3] = [(2, 4), (3, 5), (2, 2)];

/// The harmonic polynomial of degree k used for the K-type checks.
pub fn sample_harmonic(p: usize, k: u32) -> Result<MultiPoly> {
    let x1 = MultiPoly::var(p, 0);
    let mut poly = MultiPoly::constant(p, exact::q(1));
    for _ in 0..k {
        poly = poly.mul(&x1);
    }
    rank2::harmonic_projection(&poly)
}

fn rank2_checks(opts: &SuiteOptions) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    rows.extend(rank2_kaction(opts.seed)?);
    rows.extend(rank2_casimir(opts.seed)?);
    rows.extend(rank2_tau(opts.seed)?);
    rows.extend(rank2_intertwiner()?);
    Ok(rows)
}

fn cone_points(p: usize, q: usize, count: usize, seed: u64) -> Result<Vec<ConePoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((p as u64) << 32) ^ q as u64);
    (0..count)
        .map(|k| ConePoint::random(p, q, 0.5 + 0.25 * k as f64, &mut rng))
        .collect()
}

/// ktype_action against the finite-difference P_j oracle at ten random points.
pub fn rank2_kaction(seed: u64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for (p, q) in RANK2_SHAPES {
        rows.extend(rank2_kaction_for(p, q, seed)?);
    }
    Ok(rows)
}

pub fn rank2_kaction_for(p: usize, q: usize, seed: u64) -> Result<Vec<CheckRow>> {
    let (p, q, _) = rank2::normalize(p, q);
    let mut rows = Vec::new();
    for (n, x) in cone_points(p, q, 10, seed)?.iter().enumerate() {
        for k in 0..=2u32 {
            let phi = sample_harmonic(p, k)?;
            let exact: Vec<_> = (0..p + q)
                .map(|j| rank2::ktype_action(j, k, &phi, x))
                .collect::<Result<_>>()?;
            let scale = exact.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let h = 1e-4 * x.norm;
            let mut worst = 0.0f64;
            for (j, a) in exact.iter().enumerate() {
                let b = rank2::ktype_action_fd(j, k, &phi, x, h, None);
                worst = worst.max((a - b).norm());
            }
            let r = if scale > 0.0 { worst / scale } else { worst };
            rows.push(CheckRow::new(
                "rank2-kaction",
                format!("p={p};q={q};point={n};k={k}"),
                r,
                1e-5,
            ));
        }
    }
    Ok(rows)
}

pub fn rank2_casimir(seed: u64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for (p, q) in RANK2_SHAPES {
        rows.extend(rank2_casimir_for(p, q, seed)?);
    }
    Ok(rows)
}

pub fn rank2_casimir_for(p: usize, q: usize, seed: u64) -> Result<Vec<CheckRow>> {
    let (p, q, _) = rank2::normalize(p, q);
    let mut rows = Vec::new();
    let params = rank2::params_of(p, q)?;
    for j in 0..=1 {
        let c = lambda::lambda_combo(LambdaIndex::new(2, j), &params)?;
        let f = |t: f64| Ok(DerivStack::from_combo(&c, t)?.d);
        for (n, x) in cone_points(p, q, 3, seed.wrapping_add(1))?
            .iter()
            .enumerate()
        {
            let (l, r) = rank2::casimir_sum(x, &f)?;
            let s = DerivStack::from_combo(&c, x.norm)?;
            let scale = (2.0 * diffop::d_scale(&params, &s)
                + ((q - p) * (p + q - 2)) as f64 * s.mag[0])
                .max(r.abs());
            rows.push(CheckRow::relative(
                "rank2-casimir",
                format!("p={p};q={q};j={j};point={n}"),
                l,
                r,
                scale,
                1e-4,
            ));
            let radial = rank2::casimir_radial_form(p, q, x.norm, s.d);
            rows.push(CheckRow::relative(
                "rank2-casimir-radial",
                format!("p={p};q={q};j={j};point={n}"),
                radial,
                r,
                scale,
                1e-10,
            ));
        }
    }
    Ok(rows)
}

pub fn rank2_tau(seed: u64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for (p, q) in RANK2_SHAPES {
        for (n, x) in cone_points(p, q, 5, seed.wrapping_add(2))?
            .iter()
            .enumerate()
        {
            let worst = (0..p + q)
                .map(|j| (rank2::frame_pairing(j, x) - x.norm * x.norm).abs())
                .fold(0.0, f64::max);
            rows.push(CheckRow::new(
                "rank2-tau",
                format!("p={p};q={q};point={n}"),
                worst / (x.norm * x.norm),
                1e-13,
            ));
        }
    }
    Ok(rows)
}

pub fn rank2_intertwiner() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for (p, q) in [(2usize, 4usize), (2, 6), (3, 5), (3, 7)] {
        rows.extend(rank2_intertwiner_for(p, q)?);
    }
    Ok(rows)
}

/// The intertwining identity at fixed points of S^p, p ≤ 5.
pub fn rank2_intertwiner_for(p: usize, q: usize) -> Result<Vec<CheckRow>> {
    let (p, q, _) = rank2::normalize(p, q);
    if p > 5 || (q - p) % 2 != 0 {
        return Err(Error::InvalidParams(format!(
            "intertwiner check needs p <= 5 and q - p even, got ({p}, {q})"
        )));
    }
    let mut rows = Vec::new();
    let pts = [
        [0.3, -0.5, 0.7, 0.2, -0.1, 0.4],
        [-0.8, 0.1, 0.4, -0.3, 0.2, 0.6],
    ];
    let top = (q - p) / 2;
    for (n, raw) in pts.iter().enumerate() {
        let v = &raw[..p + 1];
        let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let pt: Vec<f64> = v.iter().map(|a| a / r).collect();
        for k in 0..=top {
            let phi = sample_harmonic(p, k as u32)?;
            for j in 0..p {
                let (l, rr) = rank2::intertwiner_sides(p, q, k as i64, &phi, j, &pt)?;
                let scale = l.norm().max(rr.norm()).max(1e-300);
                rows.push(CheckRow::new(
                    "rank2-intertwiner",
                    format!("p={p};q={q};k={k};j={j};point={n}"),
                    (l - rr).norm() / scale,
                    1e-12,
                ));
            }
        }
    }
    Ok(rows)
}

const MONODROMY_PAIRS: [(f64, f64); 4] = [(0.5, -1.0), (1.0, -1.0), (2.0, -1.0), (3.5, -1.0)];

fn monodromy(opts: &SuiteOptions) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let jm = opts.j(5) as i64;
    for p in opts.pairs(&MONODROMY_PAIRS)? {
        if p.nu() != -1.0 {
            return Err(Error::InvalidParams(format!(
                "the monodromy suite compares at nu = -1, got {}",
                p.nu()
            )));
        }
        for j in 0..=jm {
            for x in [0.5, 1.5, 4.0] {
                let v = lambda::lambda_at_minus_x(2, j, &p, x)?;
                let e = lambda::scaled_laguerre(j as u32, p.mu(), -x)?;
                let r = (v - num::complex::Complex64::new(e, 0.0)).norm() / e.abs();
                rows.push(CheckRow::new(
                    "monodromy",
                    format!("{};j={j};x={x}", ptag(&p)),
                    r,
                    1e-10,
                ));
            }
        }
    }
    Ok(rows)
}

pub const SUBSTRATE_ALPHAS: [f64; 3] = [0.5, 1.0, 2.5];
pub const SUBSTRATE_ZS: [f64; 8] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 40.0];

fn substrate() -> Result<Vec<CheckRow>> {
    use scalar_fn::{bessel_i_tilde as it, bessel_k_tilde as kt};
    let mut rows = Vec::new();
    for a in SUBSTRATE_ALPHAS {
        for z in SUBSTRATE_ZS {
            let tag = format!("alpha={a};z={z}");
            let w = z * z / 4.0;
            // recurrences
            let (i0, i1, im) = (it(a, z), it(a + 1.0, z), it(a - 1.0, z));
            rows.push(CheckRow::relative(
                "bessel-i-recurrence",
                tag.clone(),
                a * i0,
                im - w * i1,
                (a * i0).abs().max(im.abs()),
                1e-10,
            ));
            let (k0, k1, km) = (kt(a, z)?, kt(a + 1.0, z)?, kt(a - 1.0, z)?);
            rows.push(CheckRow::relative(
                "bessel-k-recurrence",
                tag.clone(),
                a * k0,
                w * k1 - km,
                (w * k1).abs().max(km.abs()),
                1e-10,
            ));
            // derivative rules against central differences
            let h = 1e-3 * z.min(1.0);
            let di = five_point(|t| it(a, t), z, h);
            rows.push(CheckRow::relative(
                "bessel-i-derivative",
                tag.clone(),
                di,
                z / 2.0 * i1,
                (z / 2.0 * i1).abs(),
                1e-7,
            ));
            let dk = five_point(|t| kt(a, t).unwrap_or(f64::NAN), z, h);
            rows.push(CheckRow::relative(
                "bessel-k-derivative",
                tag.clone(),
                dk,
                -z / 2.0 * k1,
                (z / 2.0 * k1).abs(),
                1e-7,
            ));
            // θ²u + 2αθu − z²u with θĨ_α = (z²/2)Ĩ_{α+1}, θK̃_α = −(z²/2)K̃_{α+1}
            let i2 = it(a + 2.0, z);
            let terms = [z * z * i1, w * z * z * i2, a * z * z * i1, -z * z * i0];
            let s: f64 = terms.iter().map(|t| t.abs()).sum();
            rows.push(CheckRow::relative(
                "bessel-i-ode",
                tag.clone(),
                terms.iter().sum(),
                0.0,
                s,
                1e-8,
            ));
            let k2 = kt(a + 2.0, z)?;
            let terms = [-z * z * k1, w * z * z * k2, -a * z * z * k1, -z * z * k0];
            let s: f64 = terms.iter().map(|t| t.abs()).sum();
            rows.push(CheckRow::relative(
                "bessel-k-ode",
                tag,
                terms.iter().sum(),
                0.0,
                s,
                1e-8,
            ));
        }
    }
    rows.extend(integral_formulas()?);
    Ok(rows)
}

fn five_point(f: impl Fn(f64) -> f64, z: f64, h: f64) -> f64 {
    (f(z - 2.0 * h) - 8.0 * f(z - h) + 8.0 * f(z + h) - f(z + 2.0 * h)) / (12.0 * h)
}

/// K̃_α(z)·x^e, switching to the leading small-z form in log space when K̃ overflows.
fn k_pow(alpha: f64, z: f64, x: f64, e: f64) -> f64 {
    match scalar_fn::bessel_k_tilde(alpha, z) {
        Ok(v) if v.is_finite() => v * x.powf(e),
        _ if alpha > 0.0 => {
            let lg = scalar_fn::ln_gamma(alpha).unwrap_or(f64::NAN);
            (lg - std::f64::consts::LN_2 - 2.0 * alpha * (z / 2.0).ln() + e * x.ln()).exp()
        }
        _ => f64::NAN,
    }
}

/// Mellin, IK-product and K-product integrals against their closed forms.
pub fn integral_formulas() -> Result<Vec<CheckRow>> {
    use scalar_fn::{bessel_i_tilde as it, gamma};
    let mut rows = Vec::new();
    let spec = QuadSpec::with_tol(1e-11);
    for (alpha, sigma, a) in [
        (-0.5, 1.0, 1.0),
        (0.5, 2.0, 1.0),
        (1.5, 4.5, 2.0),
        (0.0, 1.5, 0.7),
    ] {
        let got = quad::integrate_halfline(
            |x| k_pow(alpha, a * x, x, sigma - 1.0),
            &QuadSpec {
                tail_bound_rate: a,
                ..spec
            },
        )?;
        let e = 2f64.powf(sigma - 2.0)
            * a.powf(-sigma)
            * gamma(sigma / 2.0)?
            * gamma((sigma - 2.0 * alpha) / 2.0)?;
        rows.push(CheckRow::relative(
            "mellin-k",
            format!("alpha={alpha};sigma={sigma};a={a}"),
            got.value,
            e,
            e.abs(),
            1e-7,
        ));
    }
    for (alpha, beta, sigma, a, b) in [
        (0.5, 0.5, 3.0, 0.3, 1.0),
        (1.0, 0.0, 2.0, 0.3, 1.0),
        (0.0, 1.5, 4.0, 0.5, 1.2),
    ] {
        let got = quad::integrate_halfline(
            |x| it(alpha, a * x) * k_pow(beta, b * x, x, sigma - 1.0),
            &QuadSpec {
                tail_bound_rate: b - a,
                ..spec
            },
        )?;
        let e = 2f64.powf(sigma - 2.0) * gamma(sigma / 2.0)? * gamma((sigma - 2.0 * beta) / 2.0)?
            / (b.powf(sigma) * gamma(alpha + 1.0)?)
            * scalar_fn::hyp2f1(
                sigma / 2.0,
                (sigma - 2.0 * beta) / 2.0,
                alpha + 1.0,
                (a / b).powi(2),
            )?;
        rows.push(CheckRow::relative(
            "ik-product",
            format!("alpha={alpha};beta={beta};sigma={sigma};a={a};b={b}"),
            got.value,
            e,
            e.abs(),
            1e-7,
        ));
    }
    for (alpha, beta, sigma) in [(0.5, 0.5, 4.0), (0.0, 0.0, 1.0), (1.0, 0.5, 5.5)] {
        let got = quad::integrate_halfline(
            |x| k_pow(alpha, x, x, (sigma - 1.0) / 2.0) * k_pow(beta, x, x, (sigma - 1.0) / 2.0),
            &QuadSpec {
                tail_bound_rate: 2.0,
                ..spec
            },
        )?;
        let e = 2f64.powf(sigma - 3.0) / gamma(sigma - alpha - beta)?
            * gamma(sigma / 2.0)?
            * gamma((sigma - 2.0 * alpha) / 2.0)?
            * gamma((sigma - 2.0 * beta) / 2.0)?
            * gamma((sigma - 2.0 * alpha - 2.0 * beta) / 2.0)?;
        rows.push(CheckRow::relative(
            "kk-product",
            format!("alpha={alpha};beta={beta};sigma={sigma}"),
            got.value,
            e,
            e.abs(),
            1e-7,
        ));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn norms_row_count_for_single_pair() {
        let opts = SuiteOptions {
            params: Some(ParamPair::new(2.0, -1.0).unwrap()),
            j_max: Some(4),
            ..SuiteOptions::default()
        };
        let rows = run_suite(Suite::Norms, &opts).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.pass), "{rows:?}");
    }

    #[test]
    fn registry_and_substrate_pass() {
        let out = run_many(
            &[Suite::Registry, Suite::Substrate],
            &SuiteOptions::default(),
            2,
        );
        assert_eq!(out[0].0, Suite::Registry);
        for (s, r) in out {
            let rows = r.unwrap_or_else(|e| panic!("{s}: {e}"));
            let bad: Vec<_> = rows.iter().filter(|r| !r.pass).collect();
            assert!(bad.is_empty(), "{s}: {bad:?}");
        }
    }
}
