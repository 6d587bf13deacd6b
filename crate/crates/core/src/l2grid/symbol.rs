use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fourier::fourier_with;
use super::grid::GridFunction;
use super::GridError;
use crate::numbers::{e, DyadicRational, PowerOfTwo};

/// `exp(-pi GAUSS_TAIL^2) < 1e-12`: Gaussian transforms are treated as
/// supported within `GAUSS_TAIL / width` of their center.
pub const GAUSS_TAIL: f64 = 2.966;

const BUMP_NODES: usize = 512;

fn bump_profile(y: f64) -> f64 {
    if y.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - y * y)).exp()
    }
}

fn bump_nodes() -> impl Iterator<Item = (f64, f64)> {
    // trapezoid on [-1, 1]; the profile is flat to all orders at the ends
    let step = 2.0 / BUMP_NODES as f64;
    (1..BUMP_NODES).map(move |k| {
        let y = -1.0 + k as f64 * step;
        (y, bump_profile(y) * step)
    })
}

fn bump_mass() -> f64 {
    bump_nodes().map(|(_, w)| w).sum()
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// A function `f` on `R` together with its inverse Fourier transform
/// `fc(s) = int e(-s x) f(x) dx`, so that `f(x) = int e(x s) fc(s) ds`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum SymbolFunction {
    /// `f = value`; its transform is a point mass and cannot be sampled.
    Constant { value: Complex64 },
    /// `f(x) = A e(nu x) exp(-pi ((x - mu) / w)^2)`.
    Gaussian {
        center: f64,
        width: f64,
        modulation: DyadicRational,
        #[serde(default = "one")]
        amplitude: Complex64,
    },
    /// `fc` is `A` times a smooth bump of unit mass on `[s0 - rho, s0 + rho]`.
    Bump {
        center: f64,
        radius: f64,
        #[serde(default = "one")]
        amplitude: Complex64,
    },
    /// Sampled `f` and `fc`, checked against each other on construction.
    #[serde(skip)]
    Tabulated { f: GridFunction, fcheck: GridFunction },
}

impl SymbolFunction {
    pub fn gaussian(center: f64, width: f64, modulation: DyadicRational) -> Self {
        SymbolFunction::Gaussian { center, width, modulation, amplitude: one() }
    }

    pub fn bump(center: f64, radius: f64) -> Self {
        SymbolFunction::Bump { center, radius, amplitude: one() }
    }

    /// Builds a tabulated pair after checking `F fc = f` to `1e-6` relative.
    pub fn tabulated(f: GridFunction, fcheck: GridFunction) -> Result<Self, GridError> {
        let forward = fourier_with(&fcheck, f.spacing_exp());
        let err = forward.distance(&f) / f.norm().max(f64::MIN_POSITIVE);
        if err > 1e-6 {
            return Err(GridError::TabulatedMismatch(err));
        }
        Ok(SymbolFunction::Tabulated { f, fcheck })
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            SymbolFunction::Constant { value } => *value,
            SymbolFunction::Gaussian { center, width, modulation, amplitude } => {
                let z = (x - center) / width;
                amplitude * e(modulation.to_f64() * x) * (-PI * z * z).exp()
            }
            SymbolFunction::Bump { center, radius, amplitude } => {
                let sum: Complex64 = bump_nodes().map(|(y, w)| e(x * radius * y) * w).sum();
                amplitude * e(x * center) * sum / bump_mass()
            }
            SymbolFunction::Tabulated { f, .. } => f.eval(x),
        }
    }

    /// `fc(s)`, or `None` when the transform is not a function.
    pub fn eval_check(&self, s: f64) -> Option<Complex64> {
        Some(match self {
            SymbolFunction::Constant { .. } => return None,
            SymbolFunction::Gaussian { center, width, modulation, amplitude } => {
                let ds = s - modulation.to_f64();
                amplitude * e(-ds * center) * *width * (-PI * width * width * ds * ds).exp()
            }
            SymbolFunction::Bump { center, radius, amplitude } => {
                amplitude * bump_profile((s - center) / radius) / (radius * bump_mass())
            }
            SymbolFunction::Tabulated { fcheck, .. } => fcheck.eval(s),
        })
    }

    /// An interval outside of which `fc` is negligible.
    pub fn check_support(&self) -> Option<(f64, f64)> {
        match self {
            SymbolFunction::Constant { .. } => None,
            SymbolFunction::Gaussian { width, modulation, .. } => {
                let r = GAUSS_TAIL / width;
                Some((modulation.to_f64() - r, modulation.to_f64() + r))
            }
            SymbolFunction::Bump { center, radius, .. } => Some((center - radius, center + radius)),
            SymbolFunction::Tabulated { fcheck, .. } => fcheck.support(),
        }
    }

    /// An upper bound for `sup |f|`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            SymbolFunction::Constant { value } => value.norm(),
            SymbolFunction::Gaussian { amplitude, .. } | SymbolFunction::Bump { amplitude, .. } => amplitude.norm(),
            SymbolFunction::Tabulated { f, .. } => f.samples().iter().map(|x| x.norm()).fold(0.0, f64::max),
        }
    }

    /// `x -> f(a^-1 (x - b))`, the action of the affine group on symbols.
    pub fn transformed(&self, b: DyadicRational, a: PowerOfTwo) -> Option<Self> {
        match self {
            SymbolFunction::Constant { value } => Some(SymbolFunction::Constant { value: *value }),
            SymbolFunction::Gaussian { center, width, modulation, amplitude } => {
                let modulation = modulation.mul_power_of_two(a.inverse());
                Some(SymbolFunction::Gaussian {
                    center: a.to_f64() * center + b.to_f64(),
                    width: a.to_f64() * width,
                    modulation,
                    amplitude: amplitude * e(-(modulation * b).to_f64()),
                })
            }
            _ => None,
        }
    }

    /// Pointwise product, in closed form where the family allows it.
    pub fn product(&self, other: &Self) -> Option<Self> {
        use SymbolFunction::*;
        match (self, other) {
            (Constant { value }, g) | (g, Constant { value }) => g.scaled(*value),
            (
                Gaussian { center: m1, width: w1, modulation: n1, amplitude: a1 },
                Gaussian { center: m2, width: w2, modulation: n2, amplitude: a2 },
            ) => {
                let (p1, p2) = (w1.powi(-2), w2.powi(-2));
                let width = (p1 + p2).sqrt().recip();
                let center = (m1 * p1 + m2 * p2) / (p1 + p2);
                let cross = (-PI * (m1 - m2).powi(2) / (w1 * w1 + w2 * w2)).exp();
                Some(Gaussian { center, width, modulation: *n1 + *n2, amplitude: a1 * a2 * cross })
            }
            _ => None,
        }
    }

    pub fn scaled(&self, c: Complex64) -> Option<Self> {
        use SymbolFunction::*;
        Some(match self {
            Constant { value } => Constant { value: value * c },
            Gaussian { center, width, modulation, amplitude } => {
                Gaussian { center: *center, width: *width, modulation: *modulation, amplitude: amplitude * c }
            }
            Bump { center, radius, amplitude } => Bump { center: *center, radius: *radius, amplitude: amplitude * c },
            Tabulated { f, fcheck } => Tabulated { f: f.scale(c), fcheck: fcheck.scale(c) },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::l2grid::SampleStyle;

    /// `int e(-s x) f(x) dx` by a fine Riemann sum.
    fn quad_check(f: &SymbolFunction, s: f64, lo: f64, hi: f64) -> Complex64 {
        let n = 40_000;
        let h = (hi - lo) / n as f64;
        (0..=n).map(|k| lo + k as f64 * h).map(|x| e(-s * x) * f.eval(x) * h).sum()
    }

    #[test]
    fn gaussian_transform_matches_quadrature() {
        let f = SymbolFunction::Gaussian {
            center: 0.75,
            width: 1.5,
            modulation: DyadicRational::new(1, 1),
            amplitude: Complex64::new(0.5, -1.0),
        };
        for s in [-1.0, 0.0, 0.3, 0.5, 1.7] {
            let got = f.eval_check(s).unwrap();
            let want = quad_check(&f, s, -15.0, 15.0);
            assert!((got - want).norm() < 1e-9, "s = {s}: {got} vs {want}");
        }
    }

    #[test]
    fn bump_pair_is_consistent() {
        let f = SymbolFunction::bump(0.25, 0.5);
        // f(0) is the mass of fc, which is one
        assert!((f.eval(0.0) - one()).norm() < 1e-12);
        // f(x) = int e(x s) fc(s) ds, checked by independent quadrature
        let x = 1.3;
        let n = 20_000;
        let h = 1.0 / n as f64;
        let direct: Complex64 = (0..=n)
            .map(|k| -0.25 + k as f64 * h)
            .map(|s| e(x * s) * f.eval_check(s).unwrap() * h)
            .sum();
        assert!((f.eval(x) - direct).norm() < 1e-8);
    }

    #[test]
    fn gaussian_product_closed_form() {
        let f1 = SymbolFunction::gaussian(0.5, 2.0, DyadicRational::new(1, 2));
        let f2 = SymbolFunction::gaussian(-0.25, 1.0, DyadicRational::new(-3, 1));
        let b = DyadicRational::new(3, 1);
        let a = PowerOfTwo::new(-1);
        let moved = f2.transformed(b, a).unwrap();
        let prod = f1.product(&moved).unwrap();
        for x in [-2.0, -0.3, 0.0, 0.8, 2.5] {
            let direct = f1.eval(x) * f2.eval((x - b.to_f64()) / a.to_f64());
            assert!((prod.eval(x) - direct).norm() < 1e-13);
        }
    }

    #[test]
    fn tabulated_pair_checks_round_trip() {
        let g = SymbolFunction::gaussian(0.0, 1.0, DyadicRational::ZERO);
        let f = GridFunction::sample(6, -16.0, 16.0, SampleStyle::Smooth, |x| g.eval(x));
        let fc = GridFunction::sample(6, -16.0, 16.0, SampleStyle::Smooth, |s| g.eval_check(s).unwrap());
        let t = SymbolFunction::tabulated(f.clone(), fc.clone()).unwrap();
        assert!((t.eval(0.5) - g.eval(0.5)).norm() < 1e-3);
        let wrong = fc.translate(DyadicRational::new(1, 2));
        assert!(matches!(SymbolFunction::tabulated(f, wrong), Err(GridError::TabulatedMismatch(_))));
    }
}
