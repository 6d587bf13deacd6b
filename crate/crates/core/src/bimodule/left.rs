use num_complex::Complex64;

use super::tensor::{ElementaryTensor, Indicator, X0Element};
use super::BimoduleError;
use crate::l2grid::{eta, SymbolFunction};
use crate::numbers::{chi0, chi_eval, e, DyadicRational, PadicNumber, PowerOfTwo, SolenoidPoint, DEFAULT_PRECISION};

/// How many extra 2-adic levels one tensor may be split into.
pub const MAX_SPLIT_LEVELS: u32 = 20;

/// The left action of `f u_(d,c)` on `phi`.
///
/// The output at `a` reads the input at `a c`, so an `m`-leg moves to
/// `m / c`. The 2-adic phase `e(-p(z a d))` is constant on classes mod the
/// denominator of `a d`, so each indicator splits into those classes with
/// exact phases; the real integral is the quadrature in [`eta`].
pub fn left_act_r(f: &SymbolFunction, d: DyadicRational, c: PowerOfTwo, phi: &X0Element) -> Result<X0Element, BimoduleError> {
    left_act_r_with_precision(f, d, c, phi, DEFAULT_PRECISION)
}

pub fn left_act_r_with_precision(
    f: &SymbolFunction,
    d: DyadicRational,
    c: PowerOfTwo,
    phi: &X0Element,
    precision: u32,
) -> Result<X0Element, BimoduleError> {
    let root_c = c.to_f64().sqrt();
    let mut out = Vec::new();
    for t in phi.tensors() {
        let a = t.m * c.inverse();
        let xi = eta(f, d, a.inverse(), &t.xi)?.scale(Complex64::new(root_c, 0.0));
        let ad = d.mul_power_of_two(a);
        let level = t.indicator.level();
        let split = level.max(ad.exponent());
        if split - level > MAX_SPLIT_LEVELS {
            return Err(BimoduleError::SplitTooFine(split - level));
        }
        let stride = 1i64 << level;
        let mut l = t.indicator.residue();
        while l < 1i64 << split {
            let z = PadicNumber::from_integer(l as i128, precision)?;
            let phase = chi0(&z.mul_dyadic(ad)?)?.conj().to_complex();
            out.push(ElementaryTensor::new(Indicator::new(l, split), xi.scale(phase), a));
            l += stride;
        }
    }
    Ok(X0Element::from_tensors(out))
}

/// `Phi(f u_(d,c))` at `([r, z], t, a)`: `c^-1 e((r + t) d) e(-p(z d)) fc(t)`
/// when `a = c`, and zero otherwise.
pub fn phi_eval(
    f: &SymbolFunction,
    d: DyadicRational,
    c: PowerOfTwo,
    t: f64,
    a: PowerOfTwo,
    point: &SolenoidPoint,
) -> Result<Complex64, BimoduleError> {
    if a != c {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let fc = f.eval_check(t).ok_or(crate::l2grid::GridError::NoInverseTransform)?;
    let character = chi_eval(point, d)?;
    Ok(character * e(t * d.to_f64()) * fc / c.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::l2grid::{GridFunction, SampleStyle};
    use crate::numbers::{solenoid_canonical, PadicInt};
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn gaussian(g: i32, center: f64) -> GridFunction {
        GridFunction::sample(g, center - 6.0, center + 6.0, SampleStyle::Smooth, |x| {
            Complex64::new((-PI * (x - center).powi(2)).exp(), 0.0)
        })
    }

    fn distance(a: &X0Element, b: &X0Element) -> f64 {
        let diff = a.sub(b);
        diff.tensors().map(|t| t.xi.norm().powi(2)).sum::<f64>().sqrt()
    }

    fn mass(a: &X0Element) -> f64 {
        a.tensors().map(|t| t.xi.norm().powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn narrow_transform_acts_as_identity() {
        let f = SymbolFunction::gaussian(0.0, 32.0, DyadicRational::ZERO);
        let phi = X0Element::elementary(Indicator::ALL, gaussian(6, 0.5), PowerOfTwo::ONE)
            .add(&X0Element::elementary(Indicator::new(1, 1), gaussian(6, -1.0), PowerOfTwo::new(-1)));
        let out = left_act_r(&f, DyadicRational::ZERO, PowerOfTwo::ONE, &phi).unwrap();
        assert!(distance(&out, &phi) <= 5e-3 * mass(&phi), "{}", distance(&out, &phi));
    }

    #[test]
    fn m_leg_moves_to_m_over_c() {
        let f = SymbolFunction::gaussian(0.0, 1.0, DyadicRational::ZERO);
        let phi = X0Element::elementary(Indicator::ALL, gaussian(5, 0.0), PowerOfTwo::ONE);
        for c in [PowerOfTwo::TWO, PowerOfTwo::new(-1), PowerOfTwo::new(3)] {
            let out = left_act_r(&f, DyadicRational::ONE, c, &phi).unwrap();
            assert!(out.tensors().all(|t| t.m == c.inverse()));
        }
    }

    #[test]
    fn phase_splits_indicator_exactly() {
        // a = 1/2 and a d = 3/4: classes mod 4 with phases e(-p(3 l / 4))
        let f = SymbolFunction::gaussian(0.0, 1.0, DyadicRational::ZERO);
        let phi = X0Element::elementary(Indicator::ALL, gaussian(5, 0.0), PowerOfTwo::ONE);
        let out = left_act_r(&f, DyadicRational::new(3, 1), PowerOfTwo::TWO, &phi).unwrap();
        let tensors: Vec<_> = out.tensors().collect();
        assert_eq!(tensors.len(), 4);
        let reference = &tensors.iter().find(|t| t.indicator.residue() == 0).unwrap().xi;
        for t in &tensors {
            assert_eq!(t.indicator.level(), 2);
            let l = t.indicator.residue() as f64;
            let expect = reference.scale(e(-(0.75 * l).fract()));
            assert!(t.xi.distance(&expect) < 1e-14);
        }
    }

    #[test]
    fn composition_matches_product_element() {
        let phi = X0Element::elementary(Indicator::ALL, gaussian(6, 0.25), PowerOfTwo::ONE);
        let f1 = SymbolFunction::gaussian(0.3, 2.0, DyadicRational::new(1, 1));
        let f2 = SymbolFunction::gaussian(-0.5, 3.0, DyadicRational::ZERO);
        let cases = [
            (DyadicRational::new(1, 1), PowerOfTwo::TWO, DyadicRational::ONE, PowerOfTwo::new(-1)),
            (DyadicRational::ZERO, PowerOfTwo::ONE, DyadicRational::new(3, 2), PowerOfTwo::TWO),
            (DyadicRational::new(3, 2), PowerOfTwo::new(-1), DyadicRational::new(-1, 0), PowerOfTwo::ONE),
        ];
        for (d1, c1, d2, c2) in cases {
            let twice = left_act_r(&f1, d1, c1, &left_act_r(&f2, d2, c2, &phi).unwrap()).unwrap();
            // (f1 u_(d1,c1)) (f2 u_(d2,c2)) = f1 f2(c1^-1 (. - d1)) u_(d1 + c1 d2, c1 c2)
            let f = f1.product(&f2.transformed(d1, c1).unwrap()).unwrap();
            let once = left_act_r(&f, d1 + d2.mul_power_of_two(c1), c1 * c2, &phi).unwrap();
            let err = distance(&twice, &once) / mass(&phi);
            assert!(err < 1e-3, "({d1}, {c1}) ({d2}, {c2}): {err}");
        }
    }

    #[test]
    fn precision_is_checked() {
        let f = SymbolFunction::gaussian(0.0, 1.0, DyadicRational::ZERO);
        let phi = X0Element::elementary(Indicator::ALL, gaussian(4, 0.0), PowerOfTwo::ONE);
        let fine = DyadicRational::new(1, 12);
        let err = left_act_r_with_precision(&f, fine, PowerOfTwo::ONE, &phi, 8).unwrap_err();
        assert!(matches!(err, BimoduleError::Number(_)), "{err:?}");
        let err = left_act_r(&f, DyadicRational::new(1, 30), PowerOfTwo::ONE, &phi).unwrap_err();
        assert_eq!(err, BimoduleError::SplitTooFine(30));
    }

    #[test]
    fn phi_eval_examples() {
        let f = SymbolFunction::gaussian(0.2, 1.5, DyadicRational::new(1, 1));
        let point = SolenoidPoint { r: 0.3, z: PadicInt::new(5, 64).unwrap() };
        let other = SolenoidPoint { r: 0.9, z: PadicInt::new(-7, 64).unwrap() };
        for t in [-0.4, 0.0, 0.7] {
            let fc = f.eval_check(t).unwrap();
            let v = phi_eval(&f, DyadicRational::ZERO, PowerOfTwo::ONE, t, PowerOfTwo::ONE, &point).unwrap();
            assert!((v - fc).norm() < 1e-15);
            let w = phi_eval(&f, DyadicRational::ZERO, PowerOfTwo::ONE, t, PowerOfTwo::ONE, &other).unwrap();
            assert_eq!(v, w);
            let off = phi_eval(&f, DyadicRational::ONE, PowerOfTwo::TWO, t, PowerOfTwo::ONE, &point).unwrap();
            assert_eq!(off, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn phi_eval_is_well_defined_on_the_solenoid() {
        let f = SymbolFunction::gaussian(0.0, 1.0, DyadicRational::new(1, 2));
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let r: f64 = rng.gen_range(-3.0..3.0);
            let x = PadicNumber::from_dyadic(DyadicRational::new(rng.gen_range(-500..500), rng.gen_range(0..6)), 64).unwrap();
            let shift = DyadicRational::new(rng.gen_range(-64..64), rng.gen_range(0..5));
            let d = DyadicRational::new(rng.gen_range(-32..32), rng.gen_range(0..4));
            let c = PowerOfTwo::new(rng.gen_range(-2..3));
            let t = rng.gen_range(-1.0..1.0);
            let p = solenoid_canonical(r, &x).unwrap();
            let moved = x + PadicNumber::from_dyadic(shift, 64).unwrap();
            let q = solenoid_canonical(r + shift.to_f64(), &moved).unwrap();
            let a = phi_eval(&f, d, c, t, c, &p).unwrap();
            let b = phi_eval(&f, d, c, t, c, &q).unwrap();
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }
}
