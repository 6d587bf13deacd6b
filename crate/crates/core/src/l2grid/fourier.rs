use num_complex::Complex64;
use num_traits::Zero;
use rustfft::FftPlanner;

use super::grid::{spacing, GridFunction, SampleStyle};
use super::symbol::SymbolFunction;
use super::GridError;
use crate::numbers::{e, DyadicRational, PowerOfTwo};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    /// `int e(t x) xi(x) dx`
    Forward,
    /// `int e(-t x) xi(x) dx`
    Inverse,
}

/// Riemann sum of `int e(+-t x) xi(x) dx` at `t_k = k 2^-out_exp` via one
/// FFT of length `N = 2^(g + out_exp)`, so that `t_k x_j = k j / N`. The
/// output exponent is raised until `N` covers all samples; the output grid
/// spans `[-N/2, N/2)` in steps of `2^-out_exp`.
fn transform(xi: &GridFunction, out_exp: i32, dir: Direction) -> GridFunction {
    let g = xi.spacing_exp();
    let mut total = (g + out_exp).max(1);
    while (1usize << total) < xi.len() {
        total += 1;
    }
    let out_exp = total - g;
    if xi.is_zero() {
        return GridFunction::zero(out_exp, SampleStyle::Smooth);
    }
    let n = 1usize << total;
    let mut buf = vec![Complex64::zero(); n];
    buf[..xi.len()].copy_from_slice(xi.samples());
    let mut planner = FftPlanner::new();
    match dir {
        Direction::Forward => planner.plan_fft_inverse(n).process(&mut buf),
        Direction::Inverse => planner.plan_fft_forward(n).process(&mut buf),
    }
    let sign = if dir == Direction::Forward { 1.0 } else { -1.0 };
    // x_0 / h, where x_0 is the quadrature point of the first sample
    let half_cell = if xi.style() == SampleStyle::Step { 0.5 } else { 0.0 };
    let start = xi.start_index() as i128;
    let h = xi.spacing();
    let half = (n / 2) as i64;
    let samples = (-half..half)
        .map(|k| {
            let whole = (k as i128 * start).rem_euclid(n as i128) as f64;
            let phase = e(sign * (whole + half_cell * k as f64) / n as f64);
            buf[(k as i128).rem_euclid(n as i128) as usize] * phase * h
        })
        .collect();
    GridFunction::new_trimmed(out_exp, -half, samples, SampleStyle::Smooth, 1e-16)
}

/// `(F xi)(t) = int e(t x) xi(x) dx` on the grid `2^-out_exp` (or finer).
pub fn fourier_with(xi: &GridFunction, out_exp: i32) -> GridFunction {
    transform(xi, out_exp, Direction::Forward)
}

/// `(F^-1 xi)(x) = int e(-x t) xi(t) dt` on the grid `2^-out_exp`.
pub fn fourier_inv_with(xi: &GridFunction, out_exp: i32) -> GridFunction {
    transform(xi, out_exp, Direction::Inverse)
}

/// `F xi` on a grid with the same spacing as `xi`.
pub fn fourier(xi: &GridFunction) -> GridFunction {
    fourier_with(xi, xi.spacing_exp())
}

pub fn fourier_inv(xi: &GridFunction) -> GridFunction {
    fourier_inv_with(xi, xi.spacing_exp())
}

/// `M_f xi`, evaluating `f` at the quadrature points of `xi`.
pub fn multiply(f: &SymbolFunction, xi: &GridFunction) -> GridFunction {
    xi.map_points(|x, v| f.eval(x) * v)
}

/// `pi(f u_(b,a)) xi = M_f T_b D_a xi`, i.e.
/// `x -> f(x) a^(-1/2) xi(a^-1 (x - b))`.
pub fn pi_apply(f: &SymbolFunction, b: DyadicRational, a: PowerOfTwo, xi: &GridFunction) -> GridFunction {
    multiply(f, &xi.dilate(a).translate(b))
}

/// `eta(t) = e(t d / c) int e(s d) fc(s) xi(t + s c) ds` on the grid of `xi`.
///
/// After `y = t + s c` this is `c^-1 int e(y d / c) fc((y - t) / c) xi(y) dy`,
/// a correlation of `xi` with a sampled kernel. The quadrature runs over the
/// samples of `xi` and over the effective support of `fc`.
pub fn eta(f: &SymbolFunction, d: DyadicRational, c: PowerOfTwo, xi: &GridFunction) -> Result<GridFunction, GridError> {
    let (slo, shi) = f.check_support().ok_or(GridError::NoInverseTransform)?;
    let g = xi.spacing_exp();
    if xi.is_zero() {
        return Ok(GridFunction::zero(g, SampleStyle::Smooth));
    }
    let h = spacing(g);
    let cv = c.to_f64();
    let offset = xi.quadrature_point(0);
    // kernel index m = j - i, with y_j - t_i = m h + offset
    let m_lo = ((slo * cv - offset) / h).ceil() as i64;
    let m_hi = ((shi * cv - offset) / h).floor() as i64;
    let kernel: Vec<Complex64> = (m_lo..=m_hi)
        .map(|m| f.eval_check((m as f64 * h + offset) / cv).expect("support checked above"))
        .collect();
    let ratio = (d.mul_power_of_two(c.inverse())).to_f64();
    let weighted: Vec<Complex64> = (xi.start_index()..xi.end_index())
        .map(|j| e(ratio * xi.quadrature_point(j)) * xi.get(j))
        .collect();

    let out_start = xi.start_index() - m_hi;
    let out_end = xi.end_index() - 1 - m_lo;
    let scale = h / cv;
    let samples = (out_start..=out_end)
        .map(|i| {
            let j_lo = (i + m_lo).max(xi.start_index());
            let j_hi = (i + m_hi).min(xi.end_index() - 1);
            let mut acc = Complex64::zero();
            for j in j_lo..=j_hi {
                acc += kernel[(j - i - m_lo) as usize] * weighted[(j - xi.start_index()) as usize];
            }
            acc * scale
        })
        .collect();
    Ok(GridFunction::new(g, out_start, samples, SampleStyle::Smooth))
}

/// `F pi(f u_(d,c)) F^-1 xi`, returned on the grid `2^-(g + log2 c)`.
pub fn conjugated_pi(f: &SymbolFunction, d: DyadicRational, c: PowerOfTwo, xi: &GridFunction) -> GridFunction {
    let g = xi.spacing_exp();
    let inner = pi_apply(f, d, c, &fourier_inv_with(xi, g));
    fourier_with(&inner, g + c.exponent())
}

/// `||D_c* eta - F pi(f u_(d,c)) F^-1 xi|| / ||xi||`.
pub fn verify_intertwining(f: &SymbolFunction, d: DyadicRational, c: PowerOfTwo, xi: &GridFunction) -> Result<f64, GridError> {
    let lhs = eta(f, d, c, xi)?.dilate(c.inverse());
    let rhs = conjugated_pi(f, d, c, xi);
    Ok(lhs.distance(&rhs) / xi.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gauss(x: f64) -> Complex64 {
        Complex64::new((-PI * x * x).exp(), 0.0)
    }

    fn gaussian_grid(g: i32) -> GridFunction {
        GridFunction::sample(g, -16.0, 16.0, SampleStyle::Smooth, gauss)
    }

    fn sup_on(a: &GridFunction, f: impl Fn(f64) -> Complex64, lo: f64, hi: f64) -> f64 {
        (a.start_index()..a.end_index())
            .filter(|&j| (lo..=hi).contains(&a.point(j)))
            .map(|j| (a.get(j) - f(a.point(j))).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn gaussian_is_self_dual() {
        let xi = gaussian_grid(6);
        let fx = fourier(&xi);
        assert!(sup_on(&fx, gauss, -4.0, 4.0) < 1e-6);
        assert!((fx.norm() - xi.norm()).abs() < 1e-6 * xi.norm());
    }

    #[test]
    fn gaussian_transform_agrees_with_direct_quadrature() {
        // independent oracle: direct sum of e(t x) exp(-pi x^2) on a finer grid
        let fx = fourier(&gaussian_grid(6));
        for t in [0.0, 0.5, 1.25, -2.0] {
            let h = 1.0 / 512.0;
            let direct: Complex64 = (-8192..=8192).map(|k| k as f64 * h).map(|x| e(t * x) * gauss(x) * h).sum();
            let j = (t * 64.0) as i64;
            assert!((fx.get(j) - direct).norm() < 1e-10);
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let xi = gaussian_grid(6).translate(DyadicRational::new(3, 2));
        let back = fourier_with(&fourier_inv(&xi), 6);
        assert!(back.distance(&xi) < 1e-10 * xi.norm());
    }

    #[test]
    fn translation_becomes_modulation() {
        let xi = gaussian_grid(6);
        let b = DyadicRational::new(5, 2);
        let lhs = fourier(&xi.translate(b));
        let rhs = fourier(&xi).map_points(|t, v| e(b.to_f64() * t) * v);
        assert!(lhs.distance(&rhs) < 1e-10);
    }

    #[test]
    fn pi_apply_examples() {
        let one = SymbolFunction::Constant { value: Complex64::new(1.0, 0.0) };
        let ind = GridFunction::indicator(4, DyadicRational::ZERO, DyadicRational::ONE);
        assert_eq!(pi_apply(&one, DyadicRational::ZERO, PowerOfTwo::ONE, &ind), ind);
        let b = DyadicRational::new(3, 2);
        assert_eq!(pi_apply(&one, b, PowerOfTwo::ONE, &ind), ind.translate(b));
        let wide = pi_apply(&one, DyadicRational::ZERO, PowerOfTwo::TWO, &ind);
        let expect = GridFunction::indicator(4, DyadicRational::ZERO, DyadicRational::integer(2))
            .scale(Complex64::new(0.5f64.sqrt(), 0.0));
        assert!(wide.distance(&expect) < 1e-15);
    }

    #[test]
    fn multiply_contracts() {
        let f = SymbolFunction::gaussian(0.3, 0.7, DyadicRational::new(1, 1));
        let xi = gaussian_grid(5).translate(DyadicRational::new(1, 2));
        assert!(multiply(&f, &xi).norm() <= f.sup_norm() * xi.norm());
    }

    #[test]
    fn covariance_of_pi() {
        // pi(f, (b, a)) pi(1, (b', a')) = pi(f, (b + a b', a a'))
        let one = SymbolFunction::Constant { value: Complex64::new(1.0, 0.0) };
        let f = SymbolFunction::gaussian(0.0, 2.0, DyadicRational::ZERO);
        let xi = gaussian_grid(5);
        let (b, a) = (DyadicRational::new(1, 1), PowerOfTwo::new(-1));
        let (b2, a2) = (DyadicRational::new(-3, 2), PowerOfTwo::new(2));
        let lhs = pi_apply(&f, b, a, &pi_apply(&one, b2, a2, &xi));
        let rhs = pi_apply(&f, b + b2.mul_power_of_two(a), a * a2, &xi);
        assert!(lhs.distance(&rhs) < 1e-14);
    }

    #[test]
    fn eta_with_narrow_transform_is_near_identity() {
        // fc has unit mass and a width of about one grid step
        let f = SymbolFunction::gaussian(0.0, 32.0, DyadicRational::ZERO);
        let xi = gaussian_grid(6);
        let out = eta(&f, DyadicRational::ZERO, PowerOfTwo::ONE, &xi).unwrap();
        assert!(out.distance(&xi) < 1e-3 * xi.norm());
    }

    #[test]
    fn eta_is_linear() {
        let f = SymbolFunction::gaussian(0.5, 1.0, DyadicRational::new(1, 1));
        let a = gaussian_grid(5);
        let b = gaussian_grid(5).translate(DyadicRational::ONE).scale(Complex64::new(0.0, 2.0));
        let (d, c) = (DyadicRational::new(3, 1), PowerOfTwo::new(1));
        let sum = eta(&f, d, c, &a.add(&b)).unwrap();
        let parts = eta(&f, d, c, &a).unwrap().add(&eta(&f, d, c, &b).unwrap());
        assert!(sum.distance(&parts) < 1e-13);
    }

    #[test]
    fn eta_matches_conjugated_multiplication() {
        let f = SymbolFunction::gaussian(0.25, 1.0, DyadicRational::ZERO);
        let xi = gaussian_grid(6);
        let r = verify_intertwining(&f, DyadicRational::ZERO, PowerOfTwo::ONE, &xi).unwrap();
        assert!(r < 1e-5, "{r}");
    }

    #[test]
    fn intertwining_examples() {
        let f = SymbolFunction::gaussian(0.0, 1.0, DyadicRational::ZERO);
        let xi = gaussian_grid(6);
        let r = verify_intertwining(&f, DyadicRational::ONE, PowerOfTwo::new(1), &xi).unwrap();
        assert!(r < 1e-4, "{r}");
        let modulated = xi.map_points(|x, v| e(0.5 * x) * v);
        let r = verify_intertwining(&f, DyadicRational::new(1, 1), PowerOfTwo::new(-1), &modulated).unwrap();
        assert!(r < 1e-4, "{r}");
    }

    #[test]
    fn constant_symbol_has_no_eta() {
        let one = SymbolFunction::Constant { value: Complex64::new(1.0, 0.0) };
        assert_eq!(
            eta(&one, DyadicRational::ZERO, PowerOfTwo::ONE, &gaussian_grid(4)),
            Err(GridError::NoInverseTransform)
        );
    }
}
