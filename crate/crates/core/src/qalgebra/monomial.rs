use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numbers::DyadicRational;

/// Largest residue level a monomial may carry. Keeps `2^level` and every
/// intermediate product inside `i128`, with results fitting `i64`.
pub const MAX_LEVEL: u32 = 60;

pub(crate) fn pow2(k: u32) -> i128 {
    assert!(k <= 120, "residue level {k} out of range");
    1i128 << k
}

fn narrow(x: i128) -> i64 {
    i64::try_from(x).expect("monomial offset overflows i64")
}

/// The partial affine map `n -> 2^(i-j) (n - r) + m0` on the class `r + 2^j Z`.
///
/// This is the operator `u^a s^i s*^j u^b` on `l^2(Z)`. The derived order is
/// the lexicographic order on `(j, r, i, m0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QMonomial {
    j: u32,
    r: i64,
    i: u32,
    m0: i64,
}

/// The word `u^a s^i s*^j u^b` attached to a monomial, with `0 <= a < 2^i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Word {
    pub a: i64,
    pub i: u32,
    pub j: u32,
    pub b: i64,
}

impl QMonomial {
    pub const IDENTITY: QMonomial = QMonomial { j: 0, r: 0, i: 0, m0: 0 };

    pub fn new(j: u32, r: i64, i: u32, m0: i64) -> Self {
        assert!(j <= MAX_LEVEL && i <= MAX_LEVEL, "residue level out of range");
        assert!(0 <= r && (r as i128) < pow2(j), "domain residue {r} not reduced mod 2^{j}");
        QMonomial { j, r, i, m0 }
    }

    pub fn dom_level(&self) -> u32 {
        self.j
    }

    pub fn dom_residue(&self) -> i64 {
        self.r
    }

    pub fn range_level(&self) -> u32 {
        self.i
    }

    pub fn base_image(&self) -> i64 {
        self.m0
    }

    pub fn u_pow(n: i64) -> Self {
        QMonomial { j: 0, r: 0, i: 0, m0: n }
    }

    pub fn s_pow(i: u32) -> Self {
        Self::new(0, 0, i, 0)
    }

    pub fn s_star_pow(j: u32) -> Self {
        Self::new(j, 0, 0, 0)
    }

    /// The projection `u^l e_{2^k} u^-l` onto the class `l + 2^k Z`.
    pub fn projection(l: i64, k: u32) -> Self {
        let r = narrow((l as i128).rem_euclid(pow2(k)));
        Self::new(k, r, k, r)
    }

    /// The monomial of the word `u^a s^i s*^j u^b`.
    pub fn from_word(a: i64, i: u32, j: u32, b: i64) -> Self {
        let r = (-(b as i128)).rem_euclid(pow2(j));
        // f(r) = 2^(i-j) (r + b) + a, and r + b is divisible by 2^j
        let m0 = ((r + b as i128) >> j) * pow2(i) + a as i128;
        Self::new(j, narrow(r), i, narrow(m0))
    }

    pub fn to_word(&self) -> Word {
        let m0 = self.m0 as i128;
        let a = m0.rem_euclid(pow2(self.i));
        let k = (m0 - a) >> self.i;
        let b = -(self.r as i128) + pow2(self.j) * k;
        Word { a: narrow(a), i: self.i, j: self.j, b: narrow(b) }
    }

    /// `i - j`, the exponent of the slope.
    pub fn slope_exp(&self) -> i64 {
        self.i as i64 - self.j as i64
    }

    /// `beta` in `f(n) = 2^(i-j) n + beta`.
    pub fn offset(&self) -> DyadicRational {
        let scaled_r = DyadicRational::integer(self.r as i128).mul_pow2(self.slope_exp());
        DyadicRational::integer(self.m0 as i128) - scaled_r
    }

    pub fn in_domain(&self, n: i64) -> bool {
        (n as i128 - self.r as i128).rem_euclid(pow2(self.j)) == 0
    }

    pub fn in_range(&self, n: i64) -> bool {
        (n as i128 - self.m0 as i128).rem_euclid(pow2(self.i)) == 0
    }

    /// `f(n)`, or `None` off the domain.
    pub fn apply(&self, n: i64) -> Option<i64> {
        let diff = n as i128 - self.r as i128;
        if diff.rem_euclid(pow2(self.j)) != 0 {
            return None;
        }
        Some(narrow((diff >> self.j) * pow2(self.i) + self.m0 as i128))
    }

    /// The operator product `self * rhs`, i.e. `self` after `rhs`.
    pub fn compose(&self, rhs: &QMonomial) -> Option<QMonomial> {
        let (m1, m2) = (self, rhs);
        // n = r2 + 2^j2 t lands in dom(m1) iff 2^i2 t = r1 - m02 mod 2^j1
        let gap = (m1.r as i128) - (m2.m0 as i128);
        let (extra, t0) = if m2.i >= m1.j {
            if gap.rem_euclid(pow2(m1.j)) != 0 {
                return None;
            }
            (0, 0)
        } else {
            if gap.rem_euclid(pow2(m2.i)) != 0 {
                return None;
            }
            let extra = m1.j - m2.i;
            (extra, (gap >> m2.i).rem_euclid(pow2(extra)))
        };
        let j = m2.j + extra;
        let r = m2.r as i128 + pow2(m2.j) * t0;
        let y0 = m2.m0 as i128 + pow2(m2.i) * t0;
        let q = (y0 - m1.r as i128) >> m1.j;
        let i = m1.i + m2.i + extra - m1.j;
        let m0 = m1.m0 as i128 + pow2(m1.i) * q;
        Some(QMonomial::new(j, narrow(r), i, narrow(m0)))
    }

    /// The inverse partial bijection.
    pub fn adjoint(&self) -> QMonomial {
        let m0 = self.m0 as i128;
        let r_new = m0.rem_euclid(pow2(self.i));
        let m0_new = self.r as i128 - pow2(self.j) * ((m0 - r_new) >> self.i);
        QMonomial::new(self.i, narrow(r_new), self.j, narrow(m0_new))
    }

    /// The two restrictions to the classes of level `j + 1`.
    pub fn children(&self) -> [QMonomial; 2] {
        let step_dom = narrow(pow2(self.j));
        let step_ran = narrow(pow2(self.i));
        [
            QMonomial::new(self.j + 1, self.r, self.i + 1, self.m0),
            QMonomial::new(self.j + 1, self.r + step_dom, self.i + 1, self.m0 + step_ran),
        ]
    }

    /// Identity on its domain, i.e. a projection in the diagonal subalgebra.
    pub fn is_diagonal(&self) -> bool {
        self.i == self.j && self.m0 == self.r
    }
}

impl fmt::Display for QMonomial {
    /// Prints the word form `u^a s^i s*^j u^b`, dropping trivial factors.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.to_word();
        let mut parts = Vec::new();
        let power = |base: &str, n: i64| if n == 1 { base.to_string() } else { format!("{base}^{n}") };
        if w.a != 0 {
            parts.push(power("u", w.a));
        }
        if w.i != 0 {
            parts.push(power("s", w.i as i64));
        }
        if w.j != 0 {
            parts.push(power("s*", w.j as i64));
        }
        if w.b != 0 {
            parts.push(power("u", w.b));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn u() -> QMonomial {
        QMonomial::u_pow(1)
    }
    fn s() -> QMonomial {
        QMonomial::s_pow(1)
    }

    #[test]
    fn generator_words() {
        assert_eq!(QMonomial::from_word(1, 0, 0, 0), QMonomial::new(0, 0, 0, 1));
        assert_eq!(QMonomial::from_word(0, 1, 0, 0), QMonomial::new(0, 0, 1, 0));
        assert_eq!(QMonomial::from_word(0, 0, 1, 0), QMonomial::new(1, 0, 0, 0));
        assert_eq!(QMonomial::new(1, 0, 0, 0).apply(6), Some(3));
        assert_eq!(QMonomial::new(1, 0, 0, 0).apply(3), None);
    }

    #[test]
    fn relation_one_as_monomials() {
        let lhs = s().compose(&u()).unwrap();
        let rhs = QMonomial::u_pow(2).compose(&s()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, QMonomial::new(0, 0, 1, 2));
    }

    #[test]
    fn orthogonal_projections_compose_to_zero() {
        let e2 = QMonomial::projection(0, 1);
        let ue2u = QMonomial::projection(1, 1);
        assert_eq!(e2.compose(&ue2u), None);
        let s_star = QMonomial::s_star_pow(1);
        assert_eq!(s_star.compose(&u().compose(&s()).unwrap()), None);
    }

    #[test]
    fn adjoint_of_word() {
        let m = QMonomial::from_word(3, 2, 1, 5);
        let expect = QMonomial::from_word(-5, 1, 2, -3);
        assert_eq!(m.adjoint(), expect);
    }

    #[test]
    fn display_words() {
        assert_eq!(QMonomial::IDENTITY.to_string(), "1");
        assert_eq!(QMonomial::from_word(3, 2, 1, 5).to_string(), "u^3 s^2 s* u^5");
        assert_eq!(QMonomial::u_pow(-1).to_string(), "u^-1");
    }

    fn arb_monomial() -> impl Strategy<Value = QMonomial> {
        (0u32..6, 0u32..6, -40i64..40, -40i64..40).prop_map(|(i, j, a, b)| QMonomial::from_word(a, i, j, b))
    }

    proptest! {
        #[test]
        fn word_round_trip(a in -100i64..100, i in 0u32..8, j in 0u32..8, b in -100i64..100) {
            let m = QMonomial::from_word(a, i, j, b);
            let w = m.to_word();
            prop_assert_eq!(QMonomial::from_word(w.a, w.i, w.j, w.b), m);
            // the word acts as u^b, then s*^j, then s^i, then u^a
            for n in -50i64..50 {
                let mut x = Some(n + b);
                x = x.and_then(|y| if y.rem_euclid(1 << j) == 0 { Some(y >> j) } else { None });
                let expect = x.map(|y| (y << i) + a);
                prop_assert_eq!(m.apply(n), expect);
            }
        }

        #[test]
        fn compose_matches_pointwise(m1 in arb_monomial(), m2 in arb_monomial()) {
            let c = m1.compose(&m2);
            for n in -200i64..200 {
                let expect = m2.apply(n).and_then(|y| m1.apply(y));
                let got = c.and_then(|c| c.apply(n));
                prop_assert_eq!(got, expect);
            }
        }

        #[test]
        fn adjoint_inverts(m in arb_monomial()) {
            let adj = m.adjoint();
            prop_assert_eq!(adj.adjoint(), m);
            for n in -100i64..100 {
                if let Some(y) = m.apply(n) {
                    prop_assert_eq!(adj.apply(y), Some(n));
                }
            }
        }

        #[test]
        fn children_partition_domain(m in arb_monomial()) {
            let [c0, c1] = m.children();
            for n in -100i64..100 {
                let split = c0.apply(n).or(c1.apply(n));
                prop_assert_eq!(split, m.apply(n));
                prop_assert!(!(c0.in_domain(n) && c1.in_domain(n)));
            }
        }
    }
}
