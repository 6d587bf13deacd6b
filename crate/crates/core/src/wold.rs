//! Extending a pair of Cuntz isometries to a unitary.
//!
//! Given isometries `S0`, `S1` with `S0 S0* + S1 S1* = 1`, the operators
//! `V_n = sum_{i<=n} S0^i S1 S0* S1*^i` converge strongly to a partial
//! isometry `V`. Adding a unitary `W` between the unitary parts of the Wold
//! decompositions of `S1` and `S0` gives a unitary `U = V + W` with
//! `U S0 = S1` and `S0 U = U^2 S0`. For monomial isometries every step is
//! exact: unitary parts are at most one basis vector and `V` maps basis
//! vectors to basis vectors.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::qalgebra::{exact, ExactCoeff, ExactVector, QElement, QMonomial};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WoldError {
    #[error("S0 S0* + S1 S1* != 1")]
    CuntzRelationViolation,
    #[error("unitary parts do not match: S0 has {s0:?}, S1 has {s1:?}")]
    HypothesisViolation { s0: UnitarySupport, s1: UnitarySupport },
    #[error("unsupported isometry: {0}")]
    UnsupportedIsometry(String),
    #[error("strong limit did not stabilize within {guard} steps")]
    NonTermination { guard: u64 },
}

/// A monomial isometry `n -> 2^i n + c` defined on all of `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonomialIsometry(QMonomial);

impl MonomialIsometry {
    pub fn new(m: QMonomial) -> Result<Self, WoldError> {
        if m.dom_level() != 0 {
            return Err(WoldError::UnsupportedIsometry(format!("{m} is not defined on all of Z")));
        }
        Ok(MonomialIsometry(m))
    }

    /// Accepts an element that is a single monomial with coefficient 1.
    pub fn from_element(e: &QElement) -> Result<Self, WoldError> {
        let terms = e
            .exact_terms()
            .ok_or_else(|| WoldError::UnsupportedIsometry("numeric coefficients".into()))?;
        match terms.iter().next() {
            Some((m, c)) if terms.len() == 1 && c.is_one() => Self::new(*m),
            _ => Err(WoldError::UnsupportedIsometry(format!("{e} is not a single monomial"))),
        }
    }

    pub fn monomial(&self) -> QMonomial {
        self.0
    }

    pub fn element(&self) -> QElement {
        QElement::monomial(self.0)
    }
}

/// Support of the unitary part in the Wold decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitarySupport {
    EmptySet,
    FixedPoint(i64),
    AllOfZ,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WoldData {
    pub isometry: MonomialIsometry,
    pub unitary_part_support: UnitarySupport,
}

/// The images of `S^k` shrink to the 2-adic fixed point `c / (1 - 2^i)` of
/// `n -> 2^i n + c`; the unitary part lives on it when it is an integer.
pub fn unitary_part(s: MonomialIsometry) -> WoldData {
    let m = s.monomial();
    let i = m.range_level();
    let support = if i == 0 {
        UnitarySupport::AllOfZ
    } else {
        let c = m.base_image() as i128;
        let denom = (1i128 << i) - 1;
        if c % denom == 0 {
            UnitarySupport::FixedPoint((-c / denom) as i64)
        } else {
            UnitarySupport::EmptySet
        }
    };
    WoldData { isometry: s, unitary_part_support: support }
}

fn check_cuntz(s0: MonomialIsometry, s1: MonomialIsometry) -> Result<(), WoldError> {
    let (a, b) = (s0.element(), s1.element());
    let sum = &(&a * &a.adjoint()) + &(&b * &b.adjoint());
    if sum.equals(&QElement::one()) {
        Ok(())
    } else {
        Err(WoldError::CuntzRelationViolation)
    }
}

/// `V_n = sum_{i=0}^n S0^i S1 S0* S1*^i` in canonical form.
pub fn build_vn(s0: MonomialIsometry, s1: MonomialIsometry, n: u32) -> Result<QElement, WoldError> {
    check_cuntz(s0, s1)?;
    let (a, b) = (s0.element(), s1.element());
    let core = &(&b * &a.adjoint());
    let mut left = QElement::one();
    let mut right = QElement::one();
    let mut sum = QElement::zero();
    for _ in 0..=n {
        sum = &sum + &(&(&left * core) * &right);
        left = &left * &a;
        right = &right * &b.adjoint();
    }
    Ok(sum)
}

fn apply_monomial(m: &QMonomial, v: &ExactVector) -> ExactVector {
    v.iter().filter_map(|(&n, c)| m.apply(n).map(|y| (y, c.clone()))).collect()
}

fn add_into(acc: &mut ExactVector, v: ExactVector) {
    for (n, c) in v {
        let slot = acc.entry(n).or_insert_with(ExactCoeff::zero);
        *slot = &*slot + c;
    }
    acc.retain(|_, c| !c.is_zero());
}

/// `V v` for finitely supported `v`, summing the series until it stops.
///
/// The tail of the series is driven by `w_i = S1*^i v`. Since `S1*` pulls
/// indices toward the fixed point of `S1`, `w_i` vanishes or settles on that
/// fixed point, where `S0*` kills it; either way every later term is zero.
/// Agreement of two consecutive partial sums alone is not enough, since a
/// single term can vanish while a later one does not.
pub fn apply_v_limit(
    s0: MonomialIsometry,
    s1: MonomialIsometry,
    v: &ExactVector,
) -> Result<ExactVector, WoldError> {
    check_cuntz(s0, s1)?;
    let (m0, m1) = (s0.monomial(), s1.monomial());
    let (m0_adj, m1_adj) = (m0.adjoint(), m1.adjoint());
    let max_index = v.keys().map(|n| n.unsigned_abs()).max().unwrap_or(0);
    let guard = 64 * max_index + 64;

    let mut acc = ExactVector::new();
    let mut w = v.clone();
    for depth in 0..=guard {
        let mut term = apply_monomial(&m1, &apply_monomial(&m0_adj, &w));
        for _ in 0..depth {
            term = apply_monomial(&m0, &term);
        }
        add_into(&mut acc, term);
        let next = apply_monomial(&m1_adj, &w);
        if next.is_empty() {
            return Ok(acc);
        }
        if next == w && apply_monomial(&m0_adj, &w).is_empty() {
            return Ok(acc);
        }
        w = next;
    }
    Err(WoldError::NonTermination { guard })
}

/// The extension unitary on a window of basis vectors, with its checks.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionUnitary {
    pub window: i64,
    pub phase: ExactCoeff,
    /// `n -> U e_n` for `|n| <= window`.
    pub table: BTreeMap<i64, ExactVector>,
    /// `U S0 = S1` on the window.
    pub u1_holds: bool,
    /// `S0 U = U^2 S0` on the window.
    pub u2_holds: bool,
    /// `U` permutes basis vectors injectively on the window.
    pub isometric: bool,
}

struct Extension {
    s0: MonomialIsometry,
    s1: MonomialIsometry,
    /// `(S1 fixed point, S0 fixed point)` when the unitary parts are lines.
    fixed: Option<(i64, i64)>,
    phase: ExactCoeff,
}

impl Extension {
    fn apply(&self, v: &ExactVector) -> Result<ExactVector, WoldError> {
        let mut out = apply_v_limit(self.s0, self.s1, v)?;
        if let Some((from, to)) = self.fixed {
            if let Some(c) = v.get(&from) {
                add_into(&mut out, ExactVector::from([(to, c * &self.phase)]));
            }
        }
        Ok(out)
    }
}

fn basis(n: i64) -> ExactVector {
    ExactVector::from([(n, exact(1, 0))])
}

pub fn build_extension_unitary(
    s0: MonomialIsometry,
    s1: MonomialIsometry,
    window: i64,
) -> Result<ExtensionUnitary, WoldError> {
    build_extension_unitary_with_phase(s0, s1, window, exact(1, 0))
}

/// As [`build_extension_unitary`], identifying the unitary parts with the
/// given unimodular phase instead of `+1`.
pub fn build_extension_unitary_with_phase(
    s0: MonomialIsometry,
    s1: MonomialIsometry,
    window: i64,
    phase: ExactCoeff,
) -> Result<ExtensionUnitary, WoldError> {
    let p0 = unitary_part(s0).unitary_part_support;
    let p1 = unitary_part(s1).unitary_part_support;
    let fixed = match (p0, p1) {
        (UnitarySupport::FixedPoint(n0), UnitarySupport::FixedPoint(n1)) => Some((n1, n0)),
        (UnitarySupport::EmptySet, UnitarySupport::EmptySet) => None,
        _ => return Err(WoldError::HypothesisViolation { s0: p0, s1: p1 }),
    };
    check_cuntz(s0, s1)?;
    let ext = Extension { s0, s1, fixed, phase: phase.clone() };
    let (m0, m1) = (s0.monomial(), s1.monomial());

    let mut table = BTreeMap::new();
    let mut u1_holds = true;
    let mut u2_holds = true;
    for n in -window..=window {
        let e_n = basis(n);
        let image = ext.apply(&e_n)?;
        let s0_n = apply_monomial(&m0, &e_n);
        u1_holds &= ext.apply(&s0_n)? == apply_monomial(&m1, &e_n);
        u2_holds &= apply_monomial(&m0, &image) == ext.apply(&ext.apply(&s0_n)?)?;
        table.insert(n, image);
    }
    let mut targets = std::collections::BTreeSet::new();
    let isometric = table.values().all(|img| {
        img.len() == 1 && {
            let (t, c) = img.iter().next().unwrap();
            (c * c.conj()).is_one() && targets.insert(*t)
        }
    });
    Ok(ExtensionUnitary { window, phase, table, u1_holds, u2_holds, isometric })
}
