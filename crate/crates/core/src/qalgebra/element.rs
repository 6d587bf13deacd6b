use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::monomial::QMonomial;
use crate::numbers::DyadicRational;

/// Exact Gaussian-rational coefficient.
pub type ExactCoeff = Complex<BigRational>;

/// Finitely supported vector of `l^2(Z)`.
pub type SparseVector = BTreeMap<i64, Complex64>;

/// Finitely supported vector of `l^2(Z)` with exact coefficients.
pub type ExactVector = BTreeMap<i64, ExactCoeff>;

/// Numeric coefficients at or below this magnitude are dropped, and sibling
/// coefficients this close are merged.
pub const NUMERIC_ZERO: f64 = 1e-12;

pub fn exact(re: i64, im: i64) -> ExactCoeff {
    Complex::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
}

pub fn exact_ratio(num: i64, den: i64) -> ExactCoeff {
    Complex::new(BigRational::new(num.into(), den.into()), BigRational::zero())
}

pub fn exact_to_numeric(c: &ExactCoeff) -> Complex64 {
    Complex64::new(c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN))
}

pub(crate) trait Scalar:
    Clone + Zero + Add<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn negligible(&self) -> bool;
    fn same(&self, other: &Self) -> bool;
    fn conjugate(&self) -> Self;
}

impl Scalar for ExactCoeff {
    fn negligible(&self) -> bool {
        self.is_zero()
    }
    fn same(&self, other: &Self) -> bool {
        self == other
    }
    fn conjugate(&self) -> Self {
        self.conj()
    }
}

impl Scalar for Complex64 {
    fn negligible(&self) -> bool {
        self.norm() <= NUMERIC_ZERO
    }
    fn same(&self, other: &Self) -> bool {
        (self - other).norm() <= NUMERIC_ZERO
    }
    fn conjugate(&self) -> Self {
        self.conj()
    }
}

enum Tree<S> {
    Leaf(S),
    Split(Vec<(QMonomial, S)>),
}

fn climb_to_root(mut m: QMonomial) -> QMonomial {
    while m.dom_level() > 0 && m.range_level() > 0 {
        let j = m.dom_level() - 1;
        let half = 1i64 << j;
        let (r, m0) = if m.dom_residue() >= half {
            (m.dom_residue() - half, m.base_image() - (1i64 << (m.range_level() - 1)))
        } else {
            (m.dom_residue(), m.base_image())
        };
        m = QMonomial::new(j, r, m.range_level() - 1, m0);
    }
    m
}

fn build_tree<S: Scalar>(node: QMonomial, inherited: S, own: &BTreeMap<(u32, i64), S>) -> Tree<S> {
    let level = node.dom_level();
    let value = match own.get(&(level, node.dom_residue())) {
        Some(c) => inherited + c.clone(),
        None => inherited,
    };
    let modulus = 1i64 << level;
    let has_descendants = own
        .keys()
        .any(|&(j, r)| j > level && r.rem_euclid(modulus) == node.dom_residue());
    if !has_descendants {
        return Tree::Leaf(value);
    }
    let [a, b] = node.children();
    let ta = build_tree(a, value.clone(), own);
    let tb = build_tree(b, value, own);
    match (ta, tb) {
        (Tree::Leaf(x), Tree::Leaf(y)) if x.same(&y) => Tree::Leaf(x),
        (ta, tb) => {
            let mut leaves = Vec::new();
            for (child, t) in [(a, ta), (b, tb)] {
                match t {
                    Tree::Leaf(x) => leaves.push((child, x)),
                    Tree::Split(v) => leaves.extend(v),
                }
            }
            Tree::Split(leaves)
        }
    }
}

/// Canonical form of a linear combination of monomials.
///
/// Monomials sharing an affine map are the restrictions of one root map to
/// residue classes, so their sum is a function on the root class. It is
/// rewritten as the unique coarsest family of disjoint classes on which that
/// function is constant, dropping classes with value zero. Distinct affine
/// maps agree at no more than one point, so the result determines the
/// operator on `l^2(Z)` and vice versa.
pub(crate) fn normalize_terms<S: Scalar>(
    terms: impl IntoIterator<Item = (QMonomial, S)>,
) -> BTreeMap<QMonomial, S> {
    let mut groups: HashMap<(i64, DyadicRational), (QMonomial, BTreeMap<(u32, i64), S>)> = HashMap::new();
    for (m, c) in terms {
        if c.negligible() {
            continue;
        }
        let entry = groups
            .entry((m.slope_exp(), m.offset()))
            .or_insert_with(|| (climb_to_root(m), BTreeMap::new()));
        let slot = entry.1.entry((m.dom_level(), m.dom_residue())).or_insert_with(S::zero);
        *slot = slot.clone() + c;
    }
    let mut out = BTreeMap::new();
    for (root, own) in groups.into_values() {
        match build_tree(root, S::zero(), &own) {
            Tree::Leaf(c) => {
                if !c.negligible() {
                    out.insert(root, c);
                }
            }
            Tree::Split(leaves) => {
                out.extend(leaves.into_iter().filter(|(_, c)| !c.negligible()));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Terms {
    Exact(BTreeMap<QMonomial, ExactCoeff>),
    Numeric(BTreeMap<QMonomial, Complex64>),
}

/// A finite linear combination of monomials, always in canonical form.
///
/// Coefficients are exact Gaussian rationals unless a floating-point value
/// entered the computation, in which case the element is numeric.
#[derive(Clone, Debug, PartialEq)]
pub struct QElement {
    terms: Terms,
}

/// Coefficient in the structured JSON record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffValue {
    Exact(String),
    Numeric(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub j: u32,
    pub r: i64,
    pub i: u32,
    pub m0: i64,
    pub re: CoeffValue,
    pub im: CoeffValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub terms: Vec<TermRecord>,
}

fn mul_terms<S: Scalar>(a: &BTreeMap<QMonomial, S>, b: &BTreeMap<QMonomial, S>) -> BTreeMap<QMonomial, S> {
    let mut products = Vec::with_capacity(a.len() * b.len());
    for (m1, c1) in a {
        for (m2, c2) in b {
            if let Some(m) = m1.compose(m2) {
                products.push((m, c1.clone() * c2.clone()));
            }
        }
    }
    normalize_terms(products)
}

fn to_numeric_map(terms: &BTreeMap<QMonomial, ExactCoeff>) -> BTreeMap<QMonomial, Complex64> {
    normalize_terms(terms.iter().map(|(m, c)| (*m, exact_to_numeric(c))))
}

impl QElement {
    pub fn zero() -> Self {
        QElement { terms: Terms::Exact(BTreeMap::new()) }
    }

    pub fn one() -> Self {
        Self::monomial(QMonomial::IDENTITY)
    }

    pub fn monomial(m: QMonomial) -> Self {
        Self::from_exact_terms([(m, exact(1, 0))])
    }

    pub fn u() -> Self {
        Self::u_pow(1)
    }

    pub fn u_pow(n: i64) -> Self {
        Self::monomial(QMonomial::u_pow(n))
    }

    pub fn s() -> Self {
        Self::monomial(QMonomial::s_pow(1))
    }

    pub fn s_star() -> Self {
        Self::monomial(QMonomial::s_star_pow(1))
    }

    /// `e_{2^k} = s^k s*^k`.
    pub fn e(k: u32) -> Self {
        Self::projection(0, k)
    }

    /// `u^l e_{2^k} u^-l`.
    pub fn projection(l: i64, k: u32) -> Self {
        Self::monomial(QMonomial::projection(l, k))
    }

    pub fn from_exact_terms(terms: impl IntoIterator<Item = (QMonomial, ExactCoeff)>) -> Self {
        QElement { terms: Terms::Exact(normalize_terms(terms)) }
    }

    pub fn from_numeric_terms(terms: impl IntoIterator<Item = (QMonomial, Complex64)>) -> Self {
        QElement { terms: Terms::Numeric(normalize_terms(terms)) }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.terms, Terms::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        self.len() == 0
    }

    pub fn len(&self) -> usize {
        match &self.terms {
            Terms::Exact(t) => t.len(),
            Terms::Numeric(t) => t.len(),
        }
    }

    pub fn monomials(&self) -> Vec<QMonomial> {
        match &self.terms {
            Terms::Exact(t) => t.keys().copied().collect(),
            Terms::Numeric(t) => t.keys().copied().collect(),
        }
    }

    pub fn exact_terms(&self) -> Option<&BTreeMap<QMonomial, ExactCoeff>> {
        match &self.terms {
            Terms::Exact(t) => Some(t),
            Terms::Numeric(_) => None,
        }
    }

    /// Terms in canonical order with coefficients as complex doubles.
    pub fn numeric_terms(&self) -> Vec<(QMonomial, Complex64)> {
        match &self.terms {
            Terms::Exact(t) => t.iter().map(|(m, c)| (*m, exact_to_numeric(c))).collect(),
            Terms::Numeric(t) => t.iter().map(|(m, c)| (*m, *c)).collect(),
        }
    }

    pub fn to_numeric(&self) -> Self {
        match &self.terms {
            Terms::Exact(t) => QElement { terms: Terms::Numeric(to_numeric_map(t)) },
            Terms::Numeric(_) => self.clone(),
        }
    }

    fn numeric_map(&self) -> BTreeMap<QMonomial, Complex64> {
        match &self.terms {
            Terms::Exact(t) => to_numeric_map(t),
            Terms::Numeric(t) => t.clone(),
        }
    }

    pub fn scale_exact(&self, c: &ExactCoeff) -> Self {
        match &self.terms {
            Terms::Exact(t) => Self::from_exact_terms(t.iter().map(|(m, x)| (*m, x * c))),
            Terms::Numeric(t) => {
                let c = exact_to_numeric(c);
                Self::from_numeric_terms(t.iter().map(|(m, x)| (*m, x * c)))
            }
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_numeric_terms(self.numeric_map().into_iter().map(|(m, x)| (m, x * c)))
    }

    pub fn adjoint(&self) -> Self {
        match &self.terms {
            Terms::Exact(t) => Self::from_exact_terms(t.iter().map(|(m, c)| (m.adjoint(), c.conjugate()))),
            Terms::Numeric(t) => Self::from_numeric_terms(t.iter().map(|(m, c)| (m.adjoint(), c.conj()))),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Equality as operators on `l^2(Z)`. Numeric elements compare at the
    /// numeric zero threshold.
    pub fn equals(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }

    /// Largest coefficient of the canonical form of `self - other`.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).numeric_terms().iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    pub fn approx_equals(&self, other: &Self, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// The conditional expectation onto the diagonal subalgebra: keeps the
    /// terms that act as the identity on their domain.
    pub fn cond_expectation(&self) -> Self {
        match &self.terms {
            Terms::Exact(t) => Self::from_exact_terms(t.iter().filter(|(m, _)| m.is_diagonal()).map(|(m, c)| (*m, c.clone()))),
            Terms::Numeric(t) => Self::from_numeric_terms(t.iter().filter(|(m, _)| m.is_diagonal()).map(|(m, c)| (*m, *c))),
        }
    }

    /// `lambda_2(self) v`.
    pub fn lambda2_apply(&self, v: &SparseVector) -> SparseVector {
        let mut out = SparseVector::new();
        for (m, c) in self.numeric_terms() {
            for (&n, &x) in v {
                if let Some(y) = m.apply(n) {
                    *out.entry(y).or_insert(Complex64::zero()) += c * x;
                }
            }
        }
        out.retain(|_, x| x.norm() > NUMERIC_ZERO);
        out
    }

    /// `lambda_2(self) v` computed exactly; `None` for numeric elements.
    pub fn lambda2_apply_exact(&self, v: &ExactVector) -> Option<ExactVector> {
        let t = self.exact_terms()?;
        let mut out = ExactVector::new();
        for (m, c) in t {
            for (&n, x) in v {
                if let Some(y) = m.apply(n) {
                    let slot = out.entry(y).or_insert_with(ExactCoeff::zero);
                    *slot = &*slot + c * x;
                }
            }
        }
        out.retain(|_, x| !x.is_zero());
        Some(out)
    }

    pub fn to_record(&self) -> ElementRecord {
        let terms = match &self.terms {
            Terms::Exact(t) => t
                .iter()
                .map(|(m, c)| term_record(m, CoeffValue::Exact(c.re.to_string()), CoeffValue::Exact(c.im.to_string())))
                .collect(),
            Terms::Numeric(t) => t
                .iter()
                .map(|(m, c)| term_record(m, CoeffValue::Numeric(c.re), CoeffValue::Numeric(c.im)))
                .collect(),
        };
        ElementRecord { terms }
    }
}

fn term_record(m: &QMonomial, re: CoeffValue, im: CoeffValue) -> TermRecord {
    TermRecord { j: m.dom_level(), r: m.dom_residue(), i: m.range_level(), m0: m.base_image(), re, im }
}

fn combine(a: &QElement, b: &QElement, sign: i64) -> QElement {
    match (&a.terms, &b.terms) {
        (Terms::Exact(x), Terms::Exact(y)) => {
            let s = exact(sign, 0);
            QElement::from_exact_terms(
                x.iter().map(|(m, c)| (*m, c.clone())).chain(y.iter().map(|(m, c)| (*m, c * &s))),
            )
        }
        _ => {
            let s = sign as f64;
            QElement::from_numeric_terms(
                a.numeric_map().into_iter().chain(b.numeric_map().into_iter().map(|(m, c)| (m, c * s))),
            )
        }
    }
}

impl Add for &QElement {
    type Output = QElement;
    fn add(self, rhs: &QElement) -> QElement {
        combine(self, rhs, 1)
    }
}

impl Sub for &QElement {
    type Output = QElement;
    fn sub(self, rhs: &QElement) -> QElement {
        combine(self, rhs, -1)
    }
}

impl Mul for &QElement {
    type Output = QElement;
    fn mul(self, rhs: &QElement) -> QElement {
        match (&self.terms, &rhs.terms) {
            (Terms::Exact(x), Terms::Exact(y)) => QElement { terms: Terms::Exact(mul_terms(x, y)) },
            _ => QElement { terms: Terms::Numeric(mul_terms(&self.numeric_map(), &rhs.numeric_map())) },
        }
    }
}

impl Neg for &QElement {
    type Output = QElement;
    fn neg(self) -> QElement {
        combine(&QElement::zero(), self, -1)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for QElement {
            type Output = QElement;
            fn $f(self, rhs: QElement) -> QElement {
                (&self).$f(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QElement {
    type Output = QElement;
    fn neg(self) -> QElement {
        -&self
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn fmt_exact(c: &ExactCoeff) -> Option<String> {
    if c.re.is_one() && c.im.is_zero() {
        return None;
    }
    let im_abs = c.im.abs();
    let im_str = if im_abs.is_one() { "i".to_string() } else { format!("{} i", fmt_rational(&im_abs)) };
    Some(match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => format!("({})", fmt_rational(&c.re)),
        (true, false) if c.im.is_negative() => format!("(-{im_str})"),
        (true, false) => format!("({im_str})"),
        (false, false) => {
            let sign = if c.im.is_negative() { '-' } else { '+' };
            format!("({} {sign} {im_str})", fmt_rational(&c.re))
        }
    })
}

fn fmt_numeric(c: &Complex64) -> String {
    if c.im == 0.0 {
        format!("({:?})", c.re)
    } else {
        let sign = if c.im.is_sign_negative() { '-' } else { '+' };
        format!("({:?} {sign} {:?} i)", c.re, c.im.abs())
    }
}

impl fmt::Display for QElement {
    /// Canonical text form `(coeff) * u^a s^i s*^j u^b + ...`; a unit
    /// coefficient is omitted and the zero element prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = match &self.terms {
            Terms::Exact(t) => t
                .iter()
                .map(|(m, c)| match fmt_exact(c) {
                    Some(c) => format!("{c} * {m}"),
                    None => m.to_string(),
                })
                .collect(),
            Terms::Numeric(t) => t.iter().map(|(m, c)| format!("{} * {m}", fmt_numeric(c))).collect(),
        };
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl From<BigInt> for QElement {
    fn from(n: BigInt) -> Self {
        QElement::one().scale_exact(&Complex::new(BigRational::from_integer(n), BigRational::zero()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(n: i64) -> SparseVector {
        SparseVector::from([(n, Complex64::new(1.0, 0.0))])
    }

    #[test]
    fn relation_two_normalizes_to_one() {
        let e2 = &QElement::s() * &QElement::s_star();
        let ue2u = &(&QElement::u() * &e2) * &QElement::u_pow(-1);
        assert_eq!(&e2 + &ue2u, QElement::one());
    }

    #[test]
    fn partition_of_unity_by_eighths() {
        let sum = (0..8).fold(QElement::zero(), |acc, l| &acc + &QElement::projection(l, 3));
        assert_eq!(sum, QElement::one());
        let e2 = &QElement::projection(0, 2) + &QElement::projection(2, 2);
        assert_eq!(e2, QElement::e(1));
    }

    #[test]
    fn overlapping_parent_and_child_terms() {
        // 1 - e_2 is the single projection onto the odd class
        let x = &QElement::one() - &QElement::e(1);
        assert_eq!(x, QElement::projection(1, 1));
        assert_eq!(x.len(), 1);
    }

    #[test]
    fn unitary_and_isometry() {
        assert!((&QElement::u().adjoint() * &QElement::u()).equals(&QElement::one()));
        assert!((&QElement::s().adjoint() * &QElement::s()).equals(&QElement::one()));
        assert!(!QElement::u().equals(&QElement::u_pow(-1)));
    }

    #[test]
    fn lambda2_examples() {
        assert_eq!(QElement::u().lambda2_apply(&basis(5)), basis(6));
        assert!(QElement::s_star().lambda2_apply(&basis(3)).is_empty());
        assert_eq!(QElement::e(2).lambda2_apply(&basis(8)), basis(8));
        assert!(QElement::e(2).lambda2_apply(&basis(6)).is_empty());
    }

    #[test]
    fn expectation_examples() {
        let e2 = QElement::e(1);
        assert_eq!(e2.cond_expectation(), e2);
        assert!(QElement::u().cond_expectation().is_zero());
        let x = &e2 + &(&QElement::u() * &e2).scale_exact(&exact(3, 0));
        assert_eq!(x.cond_expectation(), e2);
    }

    #[test]
    fn numeric_mode_promotes_and_thresholds() {
        let x = QElement::u().scale(Complex64::new(1e-13, 0.0));
        assert!(x.is_zero());
        let y = &QElement::one() + &QElement::u().scale(Complex64::new(0.5, 0.0));
        assert!(!y.is_exact());
        assert_eq!(y.len(), 2);
        let e2 = QElement::e(1).to_numeric();
        let odd = QElement::projection(1, 1).scale(Complex64::new(1.0 + 1e-14, 0.0));
        assert_eq!((&e2 + &odd).len(), 1);
    }

    #[test]
    fn display_forms() {
        assert_eq!(QElement::zero().to_string(), "0");
        assert_eq!(QElement::one().to_string(), "1");
        let x = QElement::u().scale_exact(&Complex::new(BigRational::new(3.into(), 2.into()), BigRational::from_integer((-1).into())));
        assert_eq!(x.to_string(), "(3/2 - i) * u");
        assert_eq!(QElement::e(1).to_string(), "s s*");
    }
}
