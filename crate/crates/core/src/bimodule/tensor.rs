use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;

use crate::l2grid::GridFunction;
use crate::numbers::{DyadicRational, PadicInt, PowerOfTwo};
use crate::qalgebra::QElement;

/// The indicator of `l + 2^level Z_2`, with `0 <= l < 2^level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Indicator {
    level: u32,
    l: i64,
}

impl Indicator {
    pub const ALL: Indicator = Indicator { level: 0, l: 0 };

    pub fn new(l: i64, level: u32) -> Self {
        assert!(level < 62, "indicator level {level} out of range");
        Indicator { level, l: l.rem_euclid(1i64 << level) }
    }

    /// From `l` and `k = 2^level`, `k` in the semigroup `{1, 2, 4, ...}`.
    pub fn with_modulus(l: i64, k: PowerOfTwo) -> Self {
        assert!(k.is_integral(), "modulus {k} is not an integer power of two");
        Self::new(l, k.exponent() as u32)
    }

    pub fn residue(&self) -> i64 {
        self.l
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn modulus(&self) -> PowerOfTwo {
        PowerOfTwo::new(self.level as i32)
    }

    pub fn contains(&self, z: &PadicInt) -> bool {
        z.low_bits(self.level).map(|r| r as i64 == self.l).unwrap_or(false)
    }

    pub fn contains_integer(&self, n: i64) -> bool {
        n.rem_euclid(1i64 << self.level) == self.l
    }

    /// The projection `u^l e_k u^-l`, which corresponds to this indicator.
    pub fn projection(&self) -> QElement {
        QElement::projection(self.l, self.level)
    }
}

/// `1_{l + k Z_2} (x) xi (x) 1_{m}`, the function `(z, t, a) -> 1(z) xi(t) [a = m]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementaryTensor {
    pub indicator: Indicator,
    pub xi: GridFunction,
    pub m: PowerOfTwo,
}

impl ElementaryTensor {
    pub fn new(indicator: Indicator, xi: GridFunction, m: PowerOfTwo) -> Self {
        ElementaryTensor { indicator, xi, m }
    }

    pub fn eval(&self, z: &PadicInt, t: f64, a: PowerOfTwo) -> Complex64 {
        if a != self.m || !self.indicator.contains(z) {
            return Complex64::zero();
        }
        self.xi.eval(t)
    }

    fn act_u_pow(&self, n: i64) -> Option<Self> {
        let ind = Indicator::new(self.indicator.l - n, self.indicator.level);
        Some(ElementaryTensor::new(ind, self.xi.translate(DyadicRational::integer(-n as i128)), self.m))
    }

    fn act_s2(&self) -> Option<Self> {
        let Indicator { level, l } = self.indicator;
        let ind = if level == 0 {
            Indicator::ALL
        } else if l % 2 == 0 {
            Indicator::new(l / 2, level - 1)
        } else {
            return None;
        };
        Some(ElementaryTensor::new(ind, self.xi.scale_argument(PowerOfTwo::TWO), self.m * PowerOfTwo::TWO))
    }

    fn act_s2_star(&self) -> Option<Self> {
        let Indicator { level, l } = self.indicator;
        let half = PowerOfTwo::new(-1);
        Some(ElementaryTensor::new(Indicator::new(2 * l, level + 1), self.xi.scale_argument(half), self.m * half))
    }
}

/// A finite sum of elementary tensors. Tensors sharing indicator and
/// `m`-leg are merged by adding their grid functions.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct X0Element {
    terms: BTreeMap<(Indicator, PowerOfTwo), GridFunction>,
}

impl X0Element {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn elementary(indicator: Indicator, xi: GridFunction, m: PowerOfTwo) -> Self {
        Self::from_tensors([ElementaryTensor::new(indicator, xi, m)])
    }

    pub fn from_tensors(tensors: impl IntoIterator<Item = ElementaryTensor>) -> Self {
        let mut out = Self::zero();
        for t in tensors {
            out.push(t);
        }
        out
    }

    pub fn push(&mut self, t: ElementaryTensor) {
        if t.xi.is_zero() {
            return;
        }
        let key = (t.indicator, t.m);
        let merged = match self.terms.remove(&key) {
            Some(existing) => existing.add(&t.xi),
            None => t.xi,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    pub fn tensors(&self) -> impl Iterator<Item = ElementaryTensor> + '_ {
        self.terms.iter().map(|(&(indicator, m), xi)| ElementaryTensor::new(indicator, xi.clone(), m))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &X0Element) -> X0Element {
        let mut out = self.clone();
        for t in other.tensors() {
            out.push(t);
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> X0Element {
        Self::from_tensors(self.tensors().map(|t| ElementaryTensor { xi: t.xi.scale(c), ..t }))
    }

    pub fn sub(&self, other: &X0Element) -> X0Element {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn eval(&self, z: &PadicInt, t: f64, a: PowerOfTwo) -> Complex64 {
        self.tensors().map(|x| x.eval(z, t, a)).sum()
    }

    fn map(&self, f: impl Fn(&ElementaryTensor) -> Option<ElementaryTensor>) -> X0Element {
        Self::from_tensors(self.tensors().filter_map(|t| f(&t)))
    }

    /// `(phi . u^n)(z, t, a) = phi(z + n, t + n, a)`.
    pub fn act_u_pow(&self, n: i64) -> X0Element {
        self.map(|t| t.act_u_pow(n))
    }

    pub fn act_u(&self) -> X0Element {
        self.act_u_pow(1)
    }

    pub fn act_u_inv(&self) -> X0Element {
        self.act_u_pow(-1)
    }

    /// `(phi . s)(z, t, a) = phi(2 z, 2 t, a / 2)`.
    pub fn act_s2(&self) -> X0Element {
        self.map(ElementaryTensor::act_s2)
    }

    /// `(phi . s*)(z, t, a) = 1_{2 Z_2}(z) phi(z / 2, t / 2, 2 a)`.
    pub fn act_s2_star(&self) -> X0Element {
        self.map(ElementaryTensor::act_s2_star)
    }

    /// The right action of an algebra element, applied along the word
    /// `u^a s^i s*^j u^b` of each monomial.
    pub fn act_q(&self, q: &QElement) -> X0Element {
        let mut out = X0Element::zero();
        for (m, c) in q.numeric_terms() {
            let w = m.to_word();
            let mut x = self.act_u_pow(w.a);
            for _ in 0..w.i {
                x = x.act_s2();
            }
            for _ in 0..w.j {
                x = x.act_s2_star();
            }
            out = out.add(&x.act_u_pow(w.b).scale(c));
        }
        out
    }
}
