//! Registry of simple real Jordan algebras with simple euclidean part.
//!
//! Each row is a closed-form generator over its size parameter (matrix size
//! `n`, or `(p, q)` for the pseudo-euclidean spaces). Instantiation validates
//! the size and produces a [`JordanEntry`] holding the structure constants of
//! the algebra V and of its euclidean part V⁺.

use std::fmt;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::params::ParamPair;

/// Size parameter of a parametric row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyParams {
    Size(u32),
    PQ(u32, u32),
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyParams::Size(n) => write!(f, "n={n}"),
            FamilyParams::PQ(p, q) => write!(f, "p={p};q={q}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanEntry {
    pub label: &'static str,
    pub name: String,
    pub n: u32,
    pub r: u32,
    pub d: u32,
    pub e: u32,
    pub n0: u32,
    pub r0: u32,
    pub d0: u32,
    pub conformal_name: String,
    pub structure_name: String,
    pub family_params: Option<FamilyParams>,
    /// Rank 2 with odd dimension: no minimal representation.
    pub excluded_minrep: bool,
    /// Euclidean part of rank one.
    pub split_rank_one: bool,
}

/// How a row specifies its size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SizeKind {
    Fixed,
    N { min: u32 },
    PQ { min: u32 },
}

/// One row of the registry as a generator.
#[derive(Clone, Copy, Debug)]
pub struct RowSpec {
    pub label: &'static str,
    pub size: SizeKind,
    build: fn(FamilyParams) -> JordanEntry,
}

impl RowSpec {
    pub fn family(&self) -> &'static str {
        self.label.split('.').next().unwrap_or("")
    }

    /// Builds the row for the given size, validating it.
    pub fn instantiate(&self, size: Option<FamilyParams>) -> Result<JordanEntry> {
        let fp = match (self.size, size) {
            (SizeKind::Fixed, _) => FamilyParams::Size(0),
            (SizeKind::N { min }, Some(FamilyParams::Size(n))) if n >= min => FamilyParams::Size(n),
            (SizeKind::PQ { min }, Some(FamilyParams::PQ(p, q))) if p >= min && q >= min => {
                FamilyParams::PQ(p, q)
            }
            (kind, got) => {
                return Err(Error::InvalidParams(format!(
                    "row {} needs size {kind:?}, got {got:?}",
                    self.label
                )))
            }
        };
        Ok((self.build)(fp))
    }
}

fn size_of(fp: FamilyParams) -> u32 {
    match fp {
        FamilyParams::Size(n) => n,
        FamilyParams::PQ(..) => unreachable!("row expects a matrix size"),
    }
}

#[allow(clippy::too_many_arguments)]
fn entry(
    label: &'static str,
    name: String,
    [n, r, d, e]: [u32; 4],
    [n0, r0, d0]: [u32; 3],
    conformal_name: String,
    structure_name: String,
    family_params: Option<FamilyParams>,
) -> JordanEntry {
    let pq_like = r == 2 && r0 == 2;
    JordanEntry {
        label,
        name,
        n,
        r,
        d,
        e,
        n0,
        r0,
        d0,
        conformal_name,
        structure_name,
        family_params,
        excluded_minrep: pq_like && n % 2 == 1 && (label == "I.4" || label == "II.4"),
        split_rank_one: r0 < 2,
    }
}

fn row_i1(fp: FamilyParams) -> JordanEntry {
    let n = size_of(fp);
    let dim = n * (n + 1) / 2;
    entry(
        "I.1",
        format!("Sym({n},R)"),
        [dim, n, 1, 0],
        [dim, n, 1],
        format!("sp({n},R)"),
        format!("sl({n},R)+R"),
        Some(fp),
    )
}

fn row_i2(fp: FamilyParams) -> JordanEntry {
    let n = size_of(fp);
    entry(
        "I.2",
        format!("Herm({n},C)"),
        [n * n, n, 2, 0],
        [n * n, n, 2],
        format!("su({n},{n})"),
        format!("sl({n},C)+R"),
        Some(fp),
    )
}

fn row_i3(fp: FamilyParams) -> JordanEntry {
    let n = size_of(fp);
    let dim = n * (2 * n - 1);
    entry(
        "I.3",
        format!("Herm({n},H)"),
        [dim, n, 4, 0],
        [dim, n, 4],
        format!("so*({})", 4 * n),
        format!("sl({n},H)+R"),
        Some(fp),
    )
}

fn row_i4(fp: FamilyParams) -> JordanEntry {
    let n = size_of(fp);
    entry(
        "I.4",
        format!("R^(1,{})", n - 1),
        [n, 2, n - 2, 0],
        [n, 2, n - 2],
        format!("so(2,{n})"),
        format!("so(1,{})+R", n - 1),
        Some(fp),
    )
}

fn row_i5(_: FamilyParams) -> JordanEntry {
    entry(
        "I.5",
        "Herm(3,O)".into(),
        [27, 3, 8, 0],
        [27, 3, 8],
        "e7(-25)".into(),
        "e6(-26)+R".into(),
        None,
    )
}

fn row_ii2(fp: FamilyParams) -> JordanEntry {
    let n = size_of(fp);
    entry(
        "II.2",
        format!("M({n},R)"),
        [n * n, n, 2, 0],
        [n * (n + 1) / 2, n, 1],
        format!("sl({},R)", 2 * n),
        format!("sl({n},R)+sl({n},R)+R"),
        Some(fp),
    )
}

fn row_ii3(fp: FamilyParams) -> JordanEntry {
    let n = size_of(fp);
    entry(
        "II.3",
        format!("Skew({},R)", 2 * n),
        [n * (2 * n - 1), n, 4, 0],
        [n * n, n, 2],
        format!("so({},{})", 2 * n, 2 * n),
        format!("sl({},R)+R", 2 * n),
        Some(fp),
    )
}

fn row_ii4(fp: FamilyParams) -> JordanEntry {
    let FamilyParams::PQ(p, q) = fp else {
        unreachable!("row expects (p, q)")
    };
    entry(
        "II.4",
        format!("R^({p},{q})"),
        [p + q, 2, p + q - 2, 0],
        [q + 1, 2, q - 1],
        format!("so({},{})", p + 1, q + 1),
        format!("so({p},{q})+R"),
        Some(fp),
    )
}

fn row_ii5(_: FamilyParams) -> JordanEntry {
    entry(
        "II.5",
        "Herm(3,O_s)".into(),
        [27, 3, 8, 0],
        [15, 3, 4],
        "e7(7)".into(),
        "e6(6)+R".into(),
        None,
    )
}

fn row_iii1(fp: FamilyParams) -> JordanEntry {
    let n = size_of(fp);
    entry(
        "III.1",
        format!("Sym({n},C)"),
        [n * (n + 1), 2 * n, 2, 1],
        [n * (n + 1) / 2, n, 1],
        format!("sp({n},C)"),
        format!("sl({n},C)+C"),
        Some(fp),
    )
}

fn row_iii2(fp: FamilyParams) -> JordanEntry {
    let n = size_of(fp);
    entry(
        "III.2",
        format!("M({n},C)"),
        [2 * n * n, 2 * n, 4, 1],
        [n * n, n, 2],
        format!("sl({},C)", 2 * n),
        format!("sl({n},C)+sl({n},C)+C"),
        Some(fp),
    )
}

fn row_iii3(fp: FamilyParams) -> JordanEntry {
    let n = size_of(fp);
    entry(
        "III.3",
        format!("Skew({},C)", 2 * n),
        [2 * n * (2 * n - 1), 2 * n, 8, 1],
        [n * (2 * n - 1), n, 4],
        format!("so({},C)", 4 * n),
        format!("sl({},C)+C", 2 * n),
        Some(fp),
    )
}

fn row_iii4(fp: FamilyParams) -> JordanEntry {
    let n = size_of(fp);
    entry(
        "III.4",
        format!("C^{n}"),
        [2 * n, 4, 2 * (n - 2), 1],
        [n, 2, n - 2],
        format!("so({},C)", n + 2),
        format!("so({n},C)+C"),
        Some(fp),
    )
}

fn row_iii5(_: FamilyParams) -> JordanEntry {
    entry(
        "III.5",
        "Herm(3,O)_C".into(),
        [54, 6, 16, 1],
        [27, 3, 8],
        "e7(C)".into(),
        "e6(C)+C".into(),
        None,
    )
}

fn row_iv1(fp: FamilyParams) -> JordanEntry {
    let n = size_of(fp);
    entry(
        "IV.1",
        format!("Sym({},C)&M({n},H)", 2 * n),
        [n * (2 * n + 1), 2 * n, 4, 2],
        [n * n, n, 2],
        format!("sp({n},{n})"),
        format!("sl({n},H)+H"),
        Some(fp),
    )
}

fn row_iv2(fp: FamilyParams) -> JordanEntry {
    let n = size_of(fp);
    entry(
        "IV.2",
        format!("M({n},H)"),
        [4 * n * n, 2 * n, 8, 3],
        [n * (2 * n - 1), n, 4],
        format!("sl({},H)", 2 * n),
        format!("sl({n},H)+sl({n},H)+H"),
        Some(fp),
    )
}

fn row_iv4(fp: FamilyParams) -> JordanEntry {
    let n = size_of(fp);
    entry(
        "IV.4",
        format!("R^({n},0)"),
        [n, 2, 0, n - 1],
        [1, 1, 0],
        format!("so(1,{})", n + 1),
        format!("so({n})+R"),
        Some(fp),
    )
}

const ROWS: [RowSpec; 17] = [
    RowSpec {
        label: "I.1",
        size: SizeKind::N { min: 2 },
        build: row_i1,
    },
    RowSpec {
        label: "I.2",
        size: SizeKind::N { min: 2 },
        build: row_i2,
    },
    RowSpec {
        label: "I.3",
        size: SizeKind::N { min: 2 },
        build: row_i3,
    },
    RowSpec {
        label: "I.4",
        size: SizeKind::N { min: 3 },
        build: row_i4,
    },
    RowSpec {
        label: "I.5",
        size: SizeKind::Fixed,
        build: row_i5,
    },
    RowSpec {
        label: "II.2",
        size: SizeKind::N { min: 2 },
        build: row_ii2,
    },
    RowSpec {
        label: "II.3",
        size: SizeKind::N { min: 2 },
        build: row_ii3,
    },
    RowSpec {
        label: "II.4",
        size: SizeKind::PQ { min: 2 },
        build: row_ii4,
    },
    RowSpec {
        label: "II.5",
        size: SizeKind::Fixed,
        build: row_ii5,
    },
    RowSpec {
        label: "III.1",
        size: SizeKind::N { min: 2 },
        build: row_iii1,
    },
    RowSpec {
        label: "III.2",
        size: SizeKind::N { min: 2 },
        build: row_iii2,
    },
    RowSpec {
        label: "III.3",
        size: SizeKind::N { min: 2 },
        build: row_iii3,
    },
    RowSpec {
        label: "III.4",
        size: SizeKind::N { min: 3 },
        build: row_iii4,
    },
    RowSpec {
        label: "III.5",
        size: SizeKind::Fixed,
        build: row_iii5,
    },
    RowSpec {
        label: "IV.1",
        size: SizeKind::N { min: 2 },
        build: row_iv1,
    },
    RowSpec {
        label: "IV.2",
        size: SizeKind::N { min: 2 },
        build: row_iv2,
    },
    RowSpec {
        label: "IV.4",
        size: SizeKind::N { min: 2 },
        build: row_iv4,
    },
];

/// All row generators in table order.
pub fn rows() -> &'static [RowSpec] {
    &ROWS
}

pub fn row(label: &str) -> Result<&'static RowSpec> {
    ROWS.iter()
        .find(|r| r.label == label)
        .ok_or_else(|| Error::InvalidParams(format!("unknown registry row {label}")))
}

/// Instantiates every row of `family` (all rows if `None`) with matrix size
/// `n` and pseudo-euclidean signature `(p, q)`.
pub fn list(family: Option<&str>, n: u32, pq: (u32, u32)) -> Result<Vec<JordanEntry>> {
    if let Some(f) = family {
        if !["I", "II", "III", "IV"].contains(&f) {
            return Err(Error::InvalidParams(format!("unknown family {f}")));
        }
    }
    ROWS.iter()
        .filter(|r| family.map_or(true, |f| r.family() == f))
        .map(|r| {
            let size = match r.size {
                SizeKind::Fixed => None,
                SizeKind::N { .. } => Some(FamilyParams::Size(n)),
                SizeKind::PQ { .. } => Some(FamilyParams::PQ(pq.0, pq.1)),
            };
            r.instantiate(size)
        })
        .collect()
}

/// Checks the structural invariants exactly.
pub fn check_invariants(e: &JordanEntry) -> Result<()> {
    let fail = |what: &str| Err(Error::InvalidParams(format!("{} violates {what}", e.label)));
    // n/r0 = e + 1 + (r0 − 1)d/2, multiplied through by 2 r0
    if 2 * e.n != e.r0 * (2 * e.e + 2 + (e.r0 - 1) * e.d) {
        return fail("the dimension relation");
    }
    if 2 * e.n0 != e.r0 * (2 + (e.r0 - 1) * e.d0) {
        return fail("the euclidean dimension relation");
    }
    let reduced = e.e == 0;
    if reduced && e.r != e.r0 {
        return fail("r = r0 for reduced rows");
    }
    if !reduced && e.r != 2 * e.r0 {
        return fail("r = 2 r0 for non-reduced rows");
    }
    Ok(())
}

fn excess(e: &JordanEntry) -> Q {
    // |d0 − d/2|
    (exact::q(e.d0 as i64) - exact::qf(e.d as i64, 2)).abs()
}

/// (μ, ν) of an entry, exactly.
pub fn mu_nu_exact(e: &JordanEntry) -> (Q, Q) {
    let ex = excess(e);
    let mu = exact::qf(e.n as i64, e.r0 as i64) + &ex - exact::q(2);
    let nu = exact::qf(e.d as i64, 2) - ex - exact::q(e.e as i64 + 1);
    (mu, nu)
}

pub fn mu_nu_of(e: &JordanEntry) -> ParamPair {
    let (mu, nu) = mu_nu_exact(e);
    ParamPair::from_exact(mu, nu)
}

/// The three mutually exclusive shapes of an algebra of split rank ≥ 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Euclidean,
    NonEuclideanHighRank,
    PseudoEuclidean { p: u32, q: u32 },
}

pub fn is_euclidean(e: &JordanEntry) -> bool {
    e.e == 0 && e.r == e.r0 && e.d == e.d0 && e.n == e.n0
}

/// Classifies an entry; `None` for split rank one.
pub fn shape(e: &JordanEntry) -> Option<Shape> {
    if e.r0 < 2 {
        None
    } else if is_euclidean(e) {
        Some(Shape::Euclidean)
    } else if e.r >= 3 {
        Some(Shape::NonEuclideanHighRank)
    } else {
        let q = e.n0 - 1;
        Some(Shape::PseudoEuclidean { p: e.n - q, q })
    }
}

/// (μ, ν) from the shape-specific shortcut.
pub fn mu_nu_by_shape(e: &JordanEntry) -> Option<(Q, Q)> {
    let q = exact::q;
    Some(match shape(e)? {
        Shape::Euclidean => (exact::qf((e.r * e.d) as i64, 2) - q(1), q(-1)),
        Shape::NonEuclideanHighRank => (
            exact::qf(e.n as i64, e.r0 as i64) - q(2),
            exact::qf(e.d as i64, 2) - q(e.e as i64 + 1),
        ),
        Shape::PseudoEuclidean { p, q: qq } => (q(p.max(qq) as i64 - 2), q(p.min(qq) as i64 - 2)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XiBranch {
    NuMinus1HalfIntMu,
    Nu0IntMu,
    BothNonnegEvenSum,
    None,
}

impl XiBranch {
    pub fn label(&self) -> &'static str {
        match self {
            XiBranch::NuMinus1HalfIntMu => "nu_minus1_halfint_mu",
            XiBranch::Nu0IntMu => "nu0_int_mu",
            XiBranch::BothNonnegEvenSum => "both_nonneg_even_sum",
            XiBranch::None => "none",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct XiClass {
    pub member: bool,
    pub branch: XiBranch,
}

fn nonneg_int(x: f64) -> Option<i64> {
    (x >= 0.0 && x.fract() == 0.0 && x < 1e15).then_some(x as i64)
}

/// Membership of (μ, ν) in the set of parameters realised by the algebras.
pub fn xi_contains(mu: f64, nu: f64) -> XiClass {
    let none = XiClass {
        member: false,
        branch: XiBranch::None,
    };
    if !(mu.is_finite() && nu.is_finite()) || mu < nu {
        return none;
    }
    let branch = if nu == -1.0 && nonneg_int(2.0 * mu).is_some() {
        XiBranch::NuMinus1HalfIntMu
    } else if nu == 0.0 && nonneg_int(mu).is_some() {
        XiBranch::Nu0IntMu
    } else if let (Some(m), Some(n)) = (nonneg_int(mu), nonneg_int(nu)) {
        if (m + n) % 2 == 0 {
            XiBranch::BothNonnegEvenSum
        } else {
            return none;
        }
    } else {
        return none;
    };
    XiClass {
        member: true,
        branch,
    }
}

fn need_rank_two(e: &JordanEntry) -> Result<()> {
    if e.r0 < 2 {
        return Err(Error::InvalidParams(format!(
            "{} has euclidean rank {} < 2",
            e.label, e.r0
        )));
    }
    Ok(())
}

/// The scalar by which the Casimir acts on the j-th K-type, exactly.
pub fn casimir_scalar_exact(e: &JordanEntry, j: u32) -> Result<Q> {
    need_rank_two(e)?;
    let (mu, _) = mu_nu_exact(e);
    let jq = exact::q(j as i64);
    let inner = exact::q(4) * &jq * (&jq + mu + exact::q(1))
        + exact::qf((e.r0 * e.d) as i64, 2) * excess(e);
    Ok(-exact::qf(e.r0 as i64, 8 * e.n as i64) * inner)
}

pub fn casimir_scalar(e: &JordanEntry, j: u32) -> Result<f64> {
    casimir_scalar_exact(e, j).map(|v| exact::to_f64(&v))
}

/// Smallest k ≥ 1 with k (r0/2)(d0 − d/2)₊ an integer.
pub fn cover_integer(e: &JordanEntry) -> u32 {
    let t = exact::q(e.d0 as i64) - exact::qf(e.d as i64, 2);
    if !t.is_positive() {
        return 1;
    }
    let v = exact::qf(e.r0 as i64, 2) * t;
    // the denominator of a reduced fraction is the minimal multiplier
    exact::as_i64(&Q::from_integer(v.denom().clone())).unwrap_or(1) as u32
}

#[derive(Clone, Debug, PartialEq)]
pub struct WallachData {
    /// k r0 d / (2 r) for k = 0..r0−1.
    pub discrete: Vec<Q>,
    /// (r0 − 1) r0 d / (2 r).
    pub continuous_threshold: Q,
    /// ρ_i for i = 1..r0.
    pub rho: Vec<Q>,
    /// Coefficients of the weight α₀ against γ_1..γ_r0.
    pub alpha0: Vec<Q>,
}

pub fn wallach_and_weights(e: &JordanEntry) -> Result<WallachData> {
    need_rank_two(e)?;
    let step = exact::qf((e.r0 * e.d) as i64, 2 * e.r as i64);
    let discrete = (0..e.r0).map(|k| exact::q(k as i64) * &step).collect();
    let continuous_threshold = exact::q(e.r0 as i64 - 1) * &step;
    let half_rank_excess = (exact::qf(e.n as i64, e.r0 as i64) - exact::q(1)) / exact::q(2);
    let rho = (1..=e.r0)
        .map(|i| &half_rank_excess - exact::qf(e.d0 as i64, 2) * exact::q(i as i64 - 1))
        .collect();
    let alpha0 = match shape(e) {
        Some(Shape::Euclidean) => vec![exact::qf(e.d as i64, 4); e.r0 as usize],
        Some(Shape::NonEuclideanHighRank) => vec![Q::zero(); e.r0 as usize],
        Some(Shape::PseudoEuclidean { .. }) => {
            let t = exact::q(e.d0 as i64) - exact::qf(e.d as i64, 2);
            vec![t.abs() / exact::q(2), t / exact::q(2)]
        }
        None => unreachable!("rank checked above"),
    };
    Ok(WallachData {
        discrete,
        continuous_threshold,
        rho,
        alpha0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qf};

    fn get(label: &str, size: Option<FamilyParams>) -> JordanEntry {
        row(label).unwrap().instantiate(size).unwrap()
    }

    #[test]
    fn parameter_table() {
        let s = FamilyParams::Size;
        let cases: Vec<(&str, Option<FamilyParams>, Q, Q)> = vec![
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
        ];
        for (label, size, mu, nu) in cases {
            let e = get(label, size);
            check_invariants(&e).unwrap();
            assert_eq!(mu_nu_exact(&e), (mu, nu), "{label}");
        }
    }

    #[test]
    fn xi_examples() {
        let c = xi_contains(0.5, -1.0);
        assert!(c.member);
        assert_eq!(c.branch, XiBranch::NuMinus1HalfIntMu);
        assert_eq!(xi_contains(2.0, 2.0).branch, XiBranch::BothNonnegEvenSum);
        assert!(!xi_contains(0.0, 1.0).member);
        assert!(!xi_contains(1.0, 3.0).member);
        assert_eq!(xi_contains(3.0, 0.0).branch, XiBranch::Nu0IntMu);
        assert!(!xi_contains(2.5, 0.0).member);
    }

    #[test]
    fn casimir_examples() {
        let e = get("II.4", Some(FamilyParams::PQ(2, 4)));
        assert_eq!(casimir_scalar_exact(&e, 0).unwrap(), qf(-1, 6));
        let v = get("IV.4", Some(FamilyParams::Size(3)));
        assert!(casimir_scalar(&v, 0).is_err());
        assert!(wallach_and_weights(&v).is_err());
        let sym = get("I.1", Some(FamilyParams::Size(4)));
        for j in 0..4 {
            let d =
                casimir_scalar_exact(&sym, j + 1).unwrap() - casimir_scalar_exact(&sym, j).unwrap();
            let (mu, _) = mu_nu_exact(&sym);
            let expect = -qf(4, 8 * 10) * q(4) * (q(2 * j as i64 + 2) + mu);
            assert_eq!(d, expect);
        }
    }

    #[test]
    fn cover_examples() {
        for (n, k) in [(3, 4), (5, 4), (6, 2), (4, 1), (7, 4)] {
            assert_eq!(
                cover_integer(&get("I.1", Some(FamilyParams::Size(n)))),
                k,
                "n = {n}"
            );
        }
        assert_eq!(cover_integer(&get("II.4", Some(FamilyParams::PQ(3, 5)))), 1);
        assert_eq!(cover_integer(&get("III.2", Some(FamilyParams::Size(3)))), 1);
    }

    #[test]
    fn wallach_examples() {
        let w = wallach_and_weights(&get("I.1", Some(FamilyParams::Size(3)))).unwrap();
        assert_eq!(w.discrete, vec![q(0), qf(1, 2), q(1)]);
        assert_eq!(w.continuous_threshold, q(1));
        let w = wallach_and_weights(&get("II.4", Some(FamilyParams::PQ(2, 4)))).unwrap();
        assert_eq!(w.rho[0], q(1));
        assert_eq!(w.alpha0, vec![qf(1, 2), qf(1, 2)]);
        let w = wallach_and_weights(&get("II.5", None)).unwrap();
        assert_eq!(w.alpha0, vec![q(0); 3]);
    }

    #[test]
    fn listing_and_validation() {
        let rows = list(Some("II"), 4, (2, 4)).unwrap();
        let labels: Vec<_> = rows.iter().map(|e| e.label).collect();
        assert_eq!(labels, ["II.2", "II.3", "II.4", "II.5"]);
        assert!(list(Some("V"), 4, (2, 4)).is_err());
        assert!(row("I.4")
            .unwrap()
            .instantiate(Some(FamilyParams::Size(2)))
            .is_err());
        assert!(row("II.4")
            .unwrap()
            .instantiate(Some(FamilyParams::Size(4)))
            .is_err());
        assert!(get("II.4", Some(FamilyParams::PQ(2, 3))).excluded_minrep);
        assert!(!get("II.4", Some(FamilyParams::PQ(3, 3))).excluded_minrep);
    }
}
