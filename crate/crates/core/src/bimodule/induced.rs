use num_complex::Complex64;

use super::inner::q_inner;
use super::left::left_act_r_with_precision;
use super::tensor::{Indicator, X0Element};
use super::BimoduleError;
use crate::l2grid::{conjugated_pi, GridFunction, SymbolFunction};
use crate::numbers::{DyadicRational, PowerOfTwo, DEFAULT_PRECISION};
use crate::qalgebra::SparseVector;

/// A finite sum `sum c (phi (x) eps_n)` in the interior tensor product of
/// the bimodule with `l^2(Z)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InducedVector {
    pub terms: Vec<(Complex64, X0Element, i64)>,
}

impl InducedVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn simple(phi: X0Element, n: i64) -> Self {
        InducedVector { terms: vec![(Complex64::new(1.0, 0.0), phi, n)] }
    }

    pub fn push(&mut self, c: Complex64, phi: X0Element, n: i64) {
        self.terms.push((c, phi, n));
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        InducedVector { terms: self.terms.iter().map(|(c, phi, n)| (c * s, phi.clone(), *n)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        InducedVector { terms: self.terms.iter().chain(&other.terms).cloned().collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }
}

/// `W xi = (1_{Z_2} (x) xi (x) 1_1) (x) eps_0`.
pub fn induce_w(xi: &GridFunction) -> InducedVector {
    if xi.is_zero() {
        return InducedVector::new();
    }
    InducedVector::simple(X0Element::elementary(Indicator::ALL, xi.clone(), PowerOfTwo::ONE), 0)
}

/// `<phi1 (x) eps_m, phi2 (x) eps_n> = <eps_m, lambda_2(<phi1, phi2>) eps_n>`,
/// extended sesquilinearly.
pub fn induced_inner(v1: &InducedVector, v2: &InducedVector) -> Result<Complex64, BimoduleError> {
    let mut total = Complex64::new(0.0, 0.0);
    for (c1, phi1, m) in &v1.terms {
        for (c2, phi2, n) in &v2.terms {
            let q = q_inner(phi1, phi2)?;
            let image = q.lambda2_apply(&SparseVector::from([(*n, Complex64::new(1.0, 0.0))]));
            if let Some(x) = image.get(m) {
                total += c1.conj() * c2 * x;
            }
        }
    }
    Ok(total)
}

pub fn induced_norm(v: &InducedVector) -> Result<f64, BimoduleError> {
    Ok(induced_inner(v, v)?.re.max(0.0).sqrt())
}

/// The induced representation: the left action on every bimodule leg.
pub fn induced_act(f: &SymbolFunction, d: DyadicRational, c: PowerOfTwo, v: &InducedVector) -> Result<InducedVector, BimoduleError> {
    induced_act_with_precision(f, d, c, v, DEFAULT_PRECISION)
}

pub fn induced_act_with_precision(
    f: &SymbolFunction,
    d: DyadicRational,
    c: PowerOfTwo,
    v: &InducedVector,
    precision: u32,
) -> Result<InducedVector, BimoduleError> {
    let terms = v
        .terms
        .iter()
        .map(|(k, phi, n)| Ok((*k, left_act_r_with_precision(f, d, c, phi, precision)?, *n)))
        .collect::<Result<_, BimoduleError>>()?;
    Ok(InducedVector { terms })
}

/// `|<W xi1, Ind(f u_(d,c)) W xi2> - <xi1, F pi(f u_(d,c)) F^-1 xi2>| / (||xi1|| ||xi2||)`.
///
/// The left side runs through the bimodule and the right side through the
/// Fourier pipeline; the two share no code past the grids.
pub fn verify_theorem(
    f: &SymbolFunction,
    d: DyadicRational,
    c: PowerOfTwo,
    xi1: &GridFunction,
    xi2: &GridFunction,
) -> Result<f64, BimoduleError> {
    verify_theorem_with_precision(f, d, c, xi1, xi2, DEFAULT_PRECISION)
}

pub fn verify_theorem_with_precision(
    f: &SymbolFunction,
    d: DyadicRational,
    c: PowerOfTwo,
    xi1: &GridFunction,
    xi2: &GridFunction,
    precision: u32,
) -> Result<f64, BimoduleError> {
    let image = induced_act_with_precision(f, d, c, &induce_w(xi2), precision)?;
    let lhs = induced_inner(&induce_w(xi1), &image)?;
    let rhs = xi1.inner(&conjugated_pi(f, d, c, xi2));
    Ok((lhs - rhs).norm() / (xi1.norm() * xi2.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::l2grid::SampleStyle;
    use std::f64::consts::PI;

    fn dy(n: i128, e: u32) -> DyadicRational {
        DyadicRational::new(n, e)
    }

    fn step(lo: i128, hi: i128, v: Complex64) -> GridFunction {
        GridFunction::indicator(4, dy(lo, 4), dy(hi, 4)).scale(v)
    }

    fn xi1() -> GridFunction {
        step(1, 9, Complex64::new(1.0, 0.0)).add(&step(4, 12, Complex64::new(0.0, -0.5)))
    }

    fn xi2() -> GridFunction {
        step(3, 16, Complex64::new(0.5, 0.5))
    }

    fn gaussian(g: i32, center: f64, freq: f64) -> GridFunction {
        GridFunction::sample(g, center - 6.0, center + 6.0, SampleStyle::Smooth, |x| {
            crate::numbers::e(freq * x) * (-PI * (x - center).powi(2)).exp()
        })
    }

    fn dist(a: &InducedVector, b: &InducedVector) -> f64 {
        induced_norm(&a.sub(b)).unwrap()
    }

    #[test]
    fn w_of_zero_is_empty() {
        assert!(induce_w(&GridFunction::zero(4, SampleStyle::Step)).is_empty());
    }

    #[test]
    fn w_is_isometric() {
        let (a, b) = (xi1(), xi2());
        let got = induced_inner(&induce_w(&a), &induce_w(&b)).unwrap();
        assert!((got - a.inner(&b)).norm() < 1e-6);
        let n = induced_norm(&induce_w(&a)).unwrap();
        assert!((n - a.norm()).abs() < 1e-6);
    }

    #[test]
    fn disjoint_supports_are_orthogonal() {
        let a = step(0, 8, Complex64::new(1.0, 0.0));
        let b = step(8, 16, Complex64::new(0.0, 1.0));
        assert!(induced_inner(&induce_w(&a), &induce_w(&b)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn matches_q_inner_on_simple_tensors() {
        let phi1 = X0Element::elementary(Indicator::new(1, 1), xi1(), PowerOfTwo::TWO);
        let phi2 = X0Element::elementary(Indicator::ALL, xi2(), PowerOfTwo::ONE);
        let q = q_inner(&phi1, &phi2).unwrap();
        for (m, n) in [(0, 0), (1, 0), (3, -1), (-2, 2)] {
            let got = induced_inner(&InducedVector::simple(phi1.clone(), m), &InducedVector::simple(phi2.clone(), n)).unwrap();
            let image = q.lambda2_apply(&SparseVector::from([(n, Complex64::new(1.0, 0.0))]));
            assert_eq!(got, image.get(&m).copied().unwrap_or_default());
        }
    }

    #[test]
    fn positivity() {
        let mut v = induce_w(&xi1());
        v.push(Complex64::new(0.0, 2.0), X0Element::elementary(Indicator::new(1, 2), xi2(), PowerOfTwo::TWO), 3);
        v.push(Complex64::new(-1.0, 0.0), X0Element::elementary(Indicator::ALL, xi2(), PowerOfTwo::new(-1)), -1);
        assert!(induced_inner(&v, &v).unwrap().re >= -1e-8);
    }

    #[test]
    fn indicator_on_sub_lattice_is_absorbed() {
        // (1_{k Z_2} (x) xi (x) 1_m) (x) eps_0 = (1_{Z_2} (x) xi (x) 1_m) (x) eps_0
        for level in 1..4 {
            for m in [PowerOfTwo::ONE, PowerOfTwo::TWO, PowerOfTwo::new(2)] {
                let narrow = InducedVector::simple(X0Element::elementary(Indicator::new(0, level), xi1(), m), 0);
                let wide = InducedVector::simple(X0Element::elementary(Indicator::ALL, xi1(), m), 0);
                assert!(dist(&narrow, &wide) < 1e-6, "level {level}, m = {m}");
            }
        }
    }

    #[test]
    fn m_leg_lies_in_range_of_w() {
        // W(xi(. / m)) = (1_{Z_2} (x) xi (x) 1_m) (x) eps_0 for m = 2^k, k >= 0
        for m in [PowerOfTwo::ONE, PowerOfTwo::TWO, PowerOfTwo::new(3)] {
            let via_w = induce_w(&xi1().scale_argument(m.inverse()));
            let direct = InducedVector::simple(X0Element::elementary(Indicator::ALL, xi1(), m), 0);
            assert!(dist(&via_w, &direct) < 1e-6, "m = {m}");
        }
    }

    #[test]
    fn offset_classes_vanish() {
        for (l, level) in [(1, 1), (1, 2), (3, 2), (6, 3)] {
            for m in [PowerOfTwo::ONE, PowerOfTwo::TWO, PowerOfTwo::new(-1)] {
                let v = InducedVector::simple(X0Element::elementary(Indicator::new(l, level), xi1(), m), 0);
                assert!(induced_norm(&v).unwrap() < 1e-6);
            }
        }
    }

    #[test]
    fn identity_symbol_acts_trivially() {
        let f = SymbolFunction::gaussian(0.0, 32.0, DyadicRational::ZERO);
        let v = induce_w(&gaussian(6, 0.5, 0.0));
        let out = induced_act(&f, DyadicRational::ZERO, PowerOfTwo::ONE, &v).unwrap();
        assert!(dist(&out, &v) <= 5e-3 * induced_norm(&v).unwrap());
    }

    #[test]
    fn action_is_linear() {
        let f = SymbolFunction::gaussian(0.25, 1.0, dy(1, 1));
        let (d, c) = (dy(1, 1), PowerOfTwo::TWO);
        let a = induce_w(&gaussian(5, 0.0, 0.0));
        let b = induce_w(&gaussian(5, 1.0, 0.5));
        let s = Complex64::new(0.5, -2.0);
        let lhs = induced_act(&f, d, c, &a.add(&b.scale(s))).unwrap();
        let rhs = induced_act(&f, d, c, &a).unwrap().add(&induced_act(&f, d, c, &b).unwrap().scale(s));
        assert!(dist(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn action_is_bounded_by_sup_norm() {
        let f = SymbolFunction::Gaussian { center: 0.3, width: 1.5, modulation: dy(1, 1), amplitude: Complex64::new(0.0, 2.0) };
        let v = induce_w(&gaussian(6, 0.0, 0.25));
        for (d, c) in [(dy(0, 0), PowerOfTwo::ONE), (dy(1, 1), PowerOfTwo::TWO), (dy(3, 1), PowerOfTwo::new(-1))] {
            let out = induced_act(&f, d, c, &v).unwrap();
            let bound = f.sup_norm() * induced_norm(&v).unwrap();
            assert!(induced_norm(&out).unwrap() <= (1.0 + 1e-3) * bound);
        }
    }

    #[test]
    fn theorem_examples() {
        let xi1 = gaussian(6, 0.0, 0.0);
        let xi2 = gaussian(6, 0.5, 0.25);
        let f = SymbolFunction::gaussian(0.0, 32.0, DyadicRational::ZERO);
        for (d, c, tol) in [(dy(0, 0), PowerOfTwo::ONE, 1e-3), (dy(1, 0), PowerOfTwo::ONE, 1e-3), (dy(1, 1), PowerOfTwo::TWO, 5e-3)] {
            let r = verify_theorem(&f, d, c, &xi1, &xi2).unwrap();
            assert!(r <= tol, "({d}, {c}): {r}");
        }
    }
}
