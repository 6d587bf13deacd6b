use std::fmt::Write as _;

use num_complex::Complex64;
use num_traits::Zero;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::GridError;
use crate::numbers::{DyadicRational, PowerOfTwo};

/// How a sample is read and how the grid is refined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleStyle {
    /// Sample `j` is the constant value on the cell `[x_j, x_j + h)`.
    /// Refinement duplicates samples, which is exact.
    Step,
    /// Sample `j` is the point value at `x_j`. Refinement is band-limited
    /// interpolation.
    Smooth,
}

/// A compactly supported function on `R` sampled at `x_j = j 2^-g`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    spacing_exp: i32,
    start_index: i64,
    samples: Vec<Complex64>,
    style: SampleStyle,
}

fn trim(start: i64, mut samples: Vec<Complex64>, keep: impl Fn(&Complex64) -> bool) -> (i64, Vec<Complex64>) {
    let Some(first) = samples.iter().position(&keep) else {
        return (0, Vec::new());
    };
    let last = samples.iter().rposition(&keep).unwrap();
    samples.truncate(last + 1);
    samples.drain(..first);
    (start + first as i64, samples)
}

impl GridFunction {
    /// Leading and trailing zero samples are dropped.
    pub fn new(spacing_exp: i32, start_index: i64, samples: Vec<Complex64>, style: SampleStyle) -> Self {
        let (start_index, samples) = trim(start_index, samples, |x| !x.is_zero());
        GridFunction { spacing_exp, start_index, samples, style }
    }

    /// Like [`new`](Self::new) but also drops edge samples below `rel` times
    /// the largest magnitude, for results carrying FFT round-off.
    pub fn new_trimmed(spacing_exp: i32, start_index: i64, samples: Vec<Complex64>, style: SampleStyle, rel: f64) -> Self {
        let peak = samples.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let cut = peak * rel;
        let (start_index, samples) = trim(start_index, samples, |x| x.norm() > cut);
        GridFunction { spacing_exp, start_index, samples, style }
    }

    pub fn zero(spacing_exp: i32, style: SampleStyle) -> Self {
        GridFunction { spacing_exp, start_index: 0, samples: Vec::new(), style }
    }

    /// Samples `f` on `[lo, hi]`: at grid points for smooth functions, at
    /// cell midpoints of the cells inside `[lo, hi)` for step functions.
    pub fn sample(spacing_exp: i32, lo: f64, hi: f64, style: SampleStyle, f: impl Fn(f64) -> Complex64) -> Self {
        let h = spacing(spacing_exp);
        let (first, last) = match style {
            SampleStyle::Smooth => ((lo / h).ceil() as i64, (hi / h).floor() as i64),
            SampleStyle::Step => ((lo / h).ceil() as i64, (hi / h).floor() as i64 - 1),
        };
        let offset = if style == SampleStyle::Step { 0.5 * h } else { 0.0 };
        let samples = (first..=last).map(|j| f(j as f64 * h + offset)).collect();
        Self::new(spacing_exp, first, samples, style)
    }

    /// The indicator of `[a, b)` as a step function. The grid is refined if
    /// an endpoint is finer than `2^-spacing_exp`.
    pub fn indicator(spacing_exp: i32, a: DyadicRational, b: DyadicRational) -> Self {
        let g = spacing_exp.max(a.exponent() as i32).max(b.exponent() as i32);
        let first = a.mul_pow2(g as i64).floor() as i64;
        let end = b.mul_pow2(g as i64).floor() as i64;
        let len = (end - first).max(0) as usize;
        Self::new(g, first, vec![Complex64::new(1.0, 0.0); len], SampleStyle::Step)
    }

    pub fn spacing_exp(&self) -> i32 {
        self.spacing_exp
    }

    pub fn spacing(&self) -> f64 {
        spacing(self.spacing_exp)
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    /// One past the last sample index.
    pub fn end_index(&self) -> i64 {
        self.start_index + self.samples.len() as i64
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn style(&self) -> SampleStyle {
        self.style
    }

    pub fn with_style(mut self, style: SampleStyle) -> Self {
        self.style = style;
        self
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_zero(&self) -> bool {
        self.samples.is_empty()
    }

    /// `x_j` for the absolute sample index `j`.
    pub fn point(&self, j: i64) -> f64 {
        j as f64 * self.spacing()
    }

    /// Where sample `j` is read in quadrature: the point itself, or the cell
    /// midpoint for step functions.
    pub fn quadrature_point(&self, j: i64) -> f64 {
        match self.style {
            SampleStyle::Smooth => self.point(j),
            SampleStyle::Step => self.point(j) + 0.5 * self.spacing(),
        }
    }

    /// Closed hull of the support, or `None` for the zero function.
    pub fn support(&self) -> Option<(f64, f64)> {
        if self.is_zero() {
            return None;
        }
        let lo = self.point(self.start_index);
        let hi = match self.style {
            SampleStyle::Smooth => self.point(self.end_index() - 1),
            SampleStyle::Step => self.point(self.end_index()),
        };
        Some((lo, hi))
    }

    pub fn get(&self, j: i64) -> Complex64 {
        if j < self.start_index || j >= self.end_index() {
            Complex64::zero()
        } else {
            self.samples[(j - self.start_index) as usize]
        }
    }

    /// Pointwise value: the containing cell for step functions, linear
    /// interpolation between grid points for smooth ones.
    pub fn eval(&self, x: f64) -> Complex64 {
        let t = x / self.spacing();
        match self.style {
            SampleStyle::Step => self.get(t.floor() as i64),
            SampleStyle::Smooth => {
                let j = t.floor();
                let frac = t - j;
                let j = j as i64;
                self.get(j) * (1.0 - frac) + self.get(j + 1) * frac
            }
        }
    }

    pub fn norm(&self) -> f64 {
        (self.spacing() * self.samples.iter().map(|x| x.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `int conj(self) other`, on the finer of the two grids.
    pub fn inner(&self, other: &GridFunction) -> Complex64 {
        let g = self.spacing_exp.max(other.spacing_exp);
        let a = self.refine_to(g);
        let b = other.refine_to(g);
        let lo = a.start_index.max(b.start_index);
        let hi = a.end_index().min(b.end_index());
        let sum: Complex64 = (lo..hi).map(|j| a.get(j).conj() * b.get(j)).sum();
        sum * spacing(g)
    }

    /// The same function on the grid `2^-g`, `g >= spacing_exp`.
    pub fn refine_to(&self, g: i32) -> GridFunction {
        assert!(g >= self.spacing_exp, "refine_to cannot coarsen from {} to {g}", self.spacing_exp);
        let levels = (g - self.spacing_exp) as u32;
        if levels == 0 || self.is_zero() {
            return GridFunction { spacing_exp: g, ..self.clone() };
        }
        match self.style {
            SampleStyle::Step => {
                let factor = 1usize << levels;
                let samples = self.samples.iter().flat_map(|&x| std::iter::repeat(x).take(factor)).collect();
                GridFunction { spacing_exp: g, start_index: self.start_index * factor as i64, samples, style: self.style }
            }
            SampleStyle::Smooth => self.refine_smooth(levels),
        }
    }

    fn refine_smooth(&self, levels: u32) -> GridFunction {
        let factor = 1usize << levels;
        let len = self.samples.len();
        let pad = len / 2 + 8;
        let n = (len + 2 * pad).next_power_of_two();
        let mut buf = vec![Complex64::zero(); n];
        buf[pad..pad + len].copy_from_slice(&self.samples);
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(n).process(&mut buf);

        let big_n = n * factor;
        let mut big = vec![Complex64::zero(); big_n];
        let half = n / 2;
        big[..half].copy_from_slice(&buf[..half]);
        for k in half + 1..n {
            big[big_n - (n - k)] = buf[k];
        }
        big[half] = buf[half] * 0.5;
        big[big_n - half] = buf[half] * 0.5;
        planner.plan_fft_inverse(big_n).process(&mut big);
        let scale = 1.0 / n as f64;
        big.iter_mut().for_each(|x| *x *= scale);
        let start = (self.start_index - pad as i64) * factor as i64;
        GridFunction::new_trimmed(self.spacing_exp + levels as i32, start, big, self.style, 1e-16)
    }

    /// `(T_b xi)(x) = xi(x - b)`, an exact shift after refining to the
    /// denominator of `b` if needed.
    pub fn translate(&self, b: DyadicRational) -> GridFunction {
        let g = self.spacing_exp.max(b.exponent() as i32);
        let mut out = self.refine_to(g);
        if !out.is_zero() {
            out.start_index += b.mul_pow2(g as i64).floor() as i64;
        }
        out
    }

    /// `(D_a xi)(x) = a^(-1/2) xi(x / a)`.
    pub fn dilate(&self, a: PowerOfTwo) -> GridFunction {
        let scale = a.to_f64().sqrt().recip();
        GridFunction {
            spacing_exp: self.spacing_exp - a.exponent(),
            start_index: self.start_index,
            samples: self.samples.iter().map(|x| x * scale).collect(),
            style: self.style,
        }
    }

    /// `x -> xi(c x)`, without the unitary normalization.
    pub fn scale_argument(&self, c: PowerOfTwo) -> GridFunction {
        GridFunction { spacing_exp: self.spacing_exp + c.exponent(), ..self.clone() }
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        let samples = self.samples.iter().map(|x| x * c).collect();
        GridFunction::new(self.spacing_exp, self.start_index, samples, self.style)
    }

    /// Replaces each sample by `f(quadrature point, sample)`.
    pub fn map_points(&self, f: impl Fn(f64, Complex64) -> Complex64) -> GridFunction {
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(k, &x)| f(self.quadrature_point(self.start_index + k as i64), x))
            .collect();
        GridFunction::new(self.spacing_exp, self.start_index, samples, self.style)
    }

    /// `a self + b other` on the finer grid.
    pub fn combine(&self, a: Complex64, other: &GridFunction, b: Complex64) -> GridFunction {
        let g = self.spacing_exp.max(other.spacing_exp);
        let style = if self.style == other.style { self.style } else { SampleStyle::Smooth };
        if self.is_zero() {
            return other.refine_to(g).scale(b).with_style(style);
        }
        if other.is_zero() {
            return self.refine_to(g).scale(a).with_style(style);
        }
        let x = self.refine_to(g);
        let y = other.refine_to(g);
        let lo = x.start_index.min(y.start_index);
        let hi = x.end_index().max(y.end_index());
        let samples = (lo..hi).map(|j| a * x.get(j) + b * y.get(j)).collect();
        GridFunction::new(g, lo, samples, style)
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        let one = Complex64::new(1.0, 0.0);
        self.combine(one, other, one)
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        let one = Complex64::new(1.0, 0.0);
        self.combine(one, other, -one)
    }

    /// `||self - other||`.
    pub fn distance(&self, other: &GridFunction) -> f64 {
        self.sub(other).norm()
    }

    /// CSV rows `x,re,im` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,re,im\n");
        for (k, v) in self.samples.iter().enumerate() {
            let x = self.point(self.start_index + k as i64);
            writeln!(out, "{x:?},{:?},{:?}", v.re, v.im).unwrap();
        }
        out
    }

    /// Reads the format of [`to_csv`](Self::to_csv). The spacing is inferred
    /// from the abscissae, which must be equally spaced by a power of two.
    pub fn from_csv(text: &str, style: SampleStyle) -> Result<GridFunction, GridError> {
        let bad = |line: usize, msg: &str| GridError::Csv(format!("line {line}: {msg}"));
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (n == 0 && line.starts_with('x')) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(bad(n + 1, "expected three fields x,re,im"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| bad(n + 1, &e.to_string()));
            rows.push((num(fields[0])?, Complex64::new(num(fields[1])?, num(fields[2])?)));
        }
        if rows.len() < 2 {
            return Err(GridError::Csv("need at least two rows to infer the spacing".into()));
        }
        let h = rows[1].0 - rows[0].0;
        let g = -h.log2().round();
        if h <= 0.0 || (spacing(g as i32) - h).abs() > 1e-12 * h {
            return Err(GridError::Csv(format!("spacing {h} is not a power of two")));
        }
        let g = g as i32;
        let start = rows[0].0 / h;
        if (start - start.round()).abs() > 1e-9 {
            return Err(GridError::Csv("first abscissa is not on the grid".into()));
        }
        let start = start.round() as i64;
        for (k, (x, _)) in rows.iter().enumerate() {
            if (x / h - (start + k as i64) as f64).abs() > 1e-9 {
                return Err(bad(k + 2, "abscissae are not equally spaced"));
            }
        }
        Ok(GridFunction::new(g, start, rows.into_iter().map(|(_, v)| v).collect(), style))
    }
}

pub(crate) fn spacing(g: i32) -> f64 {
    (-(g as f64)).exp2()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dy(n: i128, e: u32) -> DyadicRational {
        DyadicRational::new(n, e)
    }

    fn gaussian(g: i32) -> GridFunction {
        GridFunction::sample(g, -16.0, 16.0, SampleStyle::Smooth, |x| Complex64::new((-std::f64::consts::PI * x * x).exp(), 0.0))
    }

    #[test]
    fn translate_examples() {
        let xi = GridFunction::indicator(3, dy(0, 0), dy(1, 0));
        assert_eq!(xi.translate(DyadicRational::ZERO), xi);
        let shifted = xi.translate(dy(1, 0));
        assert_eq!(shifted.start_index(), xi.start_index() + 8);
        let fine = xi.translate(dy(1, 4));
        assert_eq!(fine.spacing_exp(), 4);
        assert_eq!(fine.start_index(), 1);
        assert_eq!(fine.len(), 16);
        assert_eq!(fine.norm(), xi.norm());
    }

    #[test]
    fn dilation_is_unitary_and_invertible() {
        let xi = gaussian(6);
        let d = xi.dilate(PowerOfTwo::new(1));
        assert!((d.norm() - xi.norm()).abs() < 1e-14);
        assert!(d.dilate(PowerOfTwo::new(-1)).distance(&xi) < 1e-15);
        // D_a T_b = T_{ab} D_a
        let b = dy(3, 2);
        let a = PowerOfTwo::new(-1);
        let lhs = xi.translate(b).dilate(a);
        let rhs = xi.dilate(a).translate(b.mul_power_of_two(a));
        assert!(lhs.distance(&rhs) < 1e-15);
    }

    #[test]
    fn indicator_norm_is_exact() {
        let xi = GridFunction::indicator(4, dy(0, 0), dy(1, 0));
        assert!((xi.inner(&xi).re - 1.0).abs() < 1e-12);
        let other = GridFunction::indicator(4, dy(2, 0), dy(3, 0));
        assert_eq!(xi.inner(&other), Complex64::zero());
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_slot() {
        let a = gaussian(5);
        let b = gaussian(5).translate(dy(1, 1));
        let i = Complex64::new(0.0, 1.0);
        let lhs = a.scale(i).inner(&b);
        assert!((lhs - (-i) * a.inner(&b)).norm() < 1e-14);
        assert!(a.inner(&a).im.abs() < 1e-15 && a.inner(&a).re > 0.0);
    }

    #[test]
    fn step_refinement_duplicates() {
        let xi = GridFunction::indicator(2, dy(1, 2), dy(3, 2));
        let r = xi.refine_to(4);
        assert_eq!(r.start_index(), 4);
        assert_eq!(r.len(), 8);
        assert!((r.norm() - xi.norm()).abs() < 1e-15);
    }

    #[test]
    fn smooth_refinement_interpolates() {
        let coarse = gaussian(4);
        let fine = coarse.refine_to(6);
        let exact = gaussian(6);
        assert!(fine.distance(&exact) < 1e-10, "{}", fine.distance(&exact));
    }

    #[test]
    fn csv_round_trip() {
        let xi = GridFunction::indicator(3, dy(-1, 1), dy(1, 0));
        let back = GridFunction::from_csv(&xi.to_csv(), SampleStyle::Step).unwrap();
        assert_eq!(back, xi);
        assert!(GridFunction::from_csv("x,re,im\n0,1,0\n0.3,1,0\n", SampleStyle::Step).is_err());
    }
}
