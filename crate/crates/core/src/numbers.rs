//! Exact dyadic and truncated 2-adic arithmetic.
//!
//! Elements of `Z[1/2]` are carried exactly as [`DyadicRational`]. 2-adic
//! integers are truncated residues mod `2^N` ([`PadicInt`]); a 2-adic number
//! is such a residue divided by a power of two ([`PadicNumber`]). Every
//! truncated value records how many low-order bits are actually known, and
//! reading past them is an error instead of silent garbage.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_complex::Complex64;
use num_traits::{Float, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default number of known 2-adic digits.
pub const DEFAULT_PRECISION: u32 = 64;

/// Largest supported 2-adic precision. Residues live in `u128` and fractional
/// parts must fit an `i128` numerator.
pub const MAX_PRECISION: u32 = 120;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberError {
    #[error("insufficient 2-adic precision: need {needed} known bits, have {available}")]
    InsufficientPrecision { needed: u32, available: u32 },
    #[error("2-adic precision must lie in 1..={MAX_PRECISION}, got {0}")]
    InvalidPrecision(u32),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

fn shl_checked(n: i128, k: u32) -> Option<i128> {
    if n == 0 {
        return Some(0);
    }
    if k >= 127 {
        return None;
    }
    n.checked_mul(1i128 << k)
}

/// An element `numerator / 2^exponent` of `Z[1/2]`, kept canonical: the
/// numerator is odd, or the value is `0/2^0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct DyadicRational {
    numerator: i128,
    exponent: u32,
}

impl DyadicRational {
    pub const ZERO: DyadicRational = DyadicRational { numerator: 0, exponent: 0 };
    pub const ONE: DyadicRational = DyadicRational { numerator: 1, exponent: 0 };

    /// Canonical representative of `n / 2^e`.
    pub fn new(n: i128, e: u32) -> Self {
        if n == 0 {
            return Self::ZERO;
        }
        let strip = n.trailing_zeros().min(e);
        DyadicRational { numerator: n >> strip, exponent: e - strip }
    }

    pub fn integer(n: i128) -> Self {
        Self::new(n, 0)
    }

    pub fn numerator(&self) -> i128 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    pub fn is_integer(&self) -> bool {
        self.exponent == 0
    }

    pub fn checked_add(self, rhs: Self) -> Option<Self> {
        let e = self.exponent.max(rhs.exponent);
        let a = shl_checked(self.numerator, e - self.exponent)?;
        let b = shl_checked(rhs.numerator, e - rhs.exponent)?;
        Some(Self::new(a.checked_add(b)?, e))
    }

    pub fn checked_sub(self, rhs: Self) -> Option<Self> {
        self.checked_add(rhs.checked_neg()?)
    }

    pub fn checked_neg(self) -> Option<Self> {
        Some(DyadicRational { numerator: self.numerator.checked_neg()?, exponent: self.exponent })
    }

    pub fn checked_mul(self, rhs: Self) -> Option<Self> {
        let n = self.numerator.checked_mul(rhs.numerator)?;
        let e = self.exponent.checked_add(rhs.exponent)?;
        Some(Self::new(n, e))
    }

    /// Multiplication by `2^k`, `k` of either sign.
    pub fn checked_mul_pow2(self, k: i64) -> Option<Self> {
        if self.is_zero() {
            return Some(self);
        }
        if k >= 0 {
            let k = u32::try_from(k).ok()?;
            if k <= self.exponent {
                Some(Self::new(self.numerator, self.exponent - k))
            } else {
                Some(Self::new(shl_checked(self.numerator, k - self.exponent)?, 0))
            }
        } else {
            let k = u32::try_from(-k).ok()?;
            Some(Self::new(self.numerator, self.exponent.checked_add(k)?))
        }
    }

    pub fn mul_pow2(self, k: i64) -> Self {
        self.checked_mul_pow2(k).expect("dyadic overflow in mul_pow2")
    }

    pub fn mul_power_of_two(self, a: PowerOfTwo) -> Self {
        self.mul_pow2(a.exponent() as i64)
    }

    /// Greatest integer not exceeding the value.
    pub fn floor(&self) -> i128 {
        if self.exponent >= 127 {
            return if self.numerator < 0 { -1 } else { 0 };
        }
        self.numerator >> self.exponent
    }

    /// The representative of the value mod 1 in `[0, 1)`.
    pub fn fract(&self) -> Self {
        if self.exponent == 0 {
            return Self::ZERO;
        }
        if self.exponent >= 127 {
            // |numerator| < 2^127 <= 2^exponent
            return if self.numerator < 0 {
                // 1 + n/2^e, computed as (2^e + n)/2^e without overflow
                let e = self.exponent;
                Self::new(self.numerator, e)
                    .checked_add(Self::ONE)
                    .expect("fract of a tiny negative dyadic")
            } else {
                *self
            };
        }
        let modulus = 1i128 << self.exponent;
        Self::new(self.numerator.rem_euclid(modulus), self.exponent)
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 * (-(self.exponent as f64)).exp2()
    }

    pub fn to_bigint_pair(&self) -> (BigInt, u32) {
        (BigInt::from(self.numerator), self.exponent)
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        let a = BigInt::from(self.numerator) << (e - self.exponent) as usize;
        let b = BigInt::from(other.numerator) << (e - other.exponent) as usize;
        a.cmp(&b)
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for DyadicRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("dyadic overflow in add")
    }
}

impl Sub for DyadicRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs).expect("dyadic overflow in sub")
    }
}

impl Mul for DyadicRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect("dyadic overflow in mul")
    }
}

impl Neg for DyadicRational {
    type Output = Self;
    fn neg(self) -> Self {
        self.checked_neg().expect("dyadic overflow in neg")
    }
}

impl From<i64> for DyadicRational {
    fn from(n: i64) -> Self {
        Self::integer(n as i128)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/2^{}", self.numerator, self.exponent)
        }
    }
}

impl std::str::FromStr for DyadicRational {
    type Err = String;

    /// Accepts `n`, `n/2^e` and `n/d` with `d` a power of two.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let parse_int = |t: &str| t.trim().parse::<i128>().map_err(|e| format!("bad integer {t:?}: {e}"));
        match s.split_once('/') {
            None => Ok(Self::integer(parse_int(s)?)),
            Some((num, den)) => {
                let num = parse_int(num)?;
                let den = den.trim();
                let e = if let Some(exp) = den.strip_prefix("2^") {
                    exp.trim().parse::<u32>().map_err(|e| format!("bad exponent {exp:?}: {e}"))?
                } else {
                    let d = parse_int(den)?;
                    if d <= 0 || d.count_ones() != 1 {
                        return Err(format!("denominator {d} is not a power of two"));
                    }
                    d.trailing_zeros()
                };
                Ok(Self::new(num, e))
            }
        }
    }
}

impl From<DyadicRational> for String {
    fn from(d: DyadicRational) -> String {
        d.to_string()
    }
}

impl TryFrom<String> for DyadicRational {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

/// `2^exponent`, an element of the multiplicative group generated by 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct PowerOfTwo {
    exponent: i32,
}

impl PowerOfTwo {
    pub const ONE: PowerOfTwo = PowerOfTwo { exponent: 0 };
    pub const TWO: PowerOfTwo = PowerOfTwo { exponent: 1 };

    pub fn new(exponent: i32) -> Self {
        PowerOfTwo { exponent }
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    /// True for elements of the semigroup `{1, 2, 4, ...}`.
    pub fn is_integral(&self) -> bool {
        self.exponent >= 0
    }

    pub fn checked_mul(self, rhs: Self) -> Option<Self> {
        Some(PowerOfTwo { exponent: self.exponent.checked_add(rhs.exponent)? })
    }

    pub fn checked_div(self, rhs: Self) -> Option<Self> {
        Some(PowerOfTwo { exponent: self.exponent.checked_sub(rhs.exponent)? })
    }

    pub fn inverse(self) -> Self {
        PowerOfTwo { exponent: self.exponent.checked_neg().expect("power of two overflow") }
    }

    pub fn to_f64(&self) -> f64 {
        (self.exponent as f64).exp2()
    }

    pub fn to_dyadic(&self) -> DyadicRational {
        DyadicRational::ONE.mul_pow2(self.exponent as i64)
    }
}

impl Mul for PowerOfTwo {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect("power of two overflow")
    }
}

impl fmt::Display for PowerOfTwo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^{}", self.exponent)
    }
}

impl std::str::FromStr for PowerOfTwo {
    type Err = String;

    /// Accepts `2^k` or a dyadic literal such as `1/2` or `4`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(k) = s.strip_prefix("2^") {
            let k = k.trim().trim_start_matches('(').trim_end_matches(')');
            return k.parse::<i32>().map(PowerOfTwo::new).map_err(|e| format!("bad exponent {k:?}: {e}"));
        }
        let d: DyadicRational = s.parse()?;
        let n = d.numerator();
        if n <= 0 || n.count_ones() != 1 {
            return Err(format!("{s} is not a power of two"));
        }
        Ok(PowerOfTwo::new(n.trailing_zeros() as i32 - d.exponent() as i32))
    }
}

impl From<PowerOfTwo> for String {
    fn from(p: PowerOfTwo) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for PowerOfTwo {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

fn mask(precision: u32) -> u128 {
    if precision >= 128 {
        u128::MAX
    } else {
        (1u128 << precision) - 1
    }
}

fn check_precision(precision: u32) -> Result<(), NumberError> {
    if precision == 0 || precision > MAX_PRECISION {
        Err(NumberError::InvalidPrecision(precision))
    } else {
        Ok(())
    }
}

/// A 2-adic integer known modulo `2^precision`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicInt {
    precision: u32,
    residue: u128,
}

impl PadicInt {
    pub fn new(value: i128, precision: u32) -> Result<Self, NumberError> {
        check_precision(precision)?;
        Ok(PadicInt { precision, residue: (value as u128) & mask(precision) })
    }

    pub fn from_residue(residue: u128, precision: u32) -> Result<Self, NumberError> {
        check_precision(precision)?;
        Ok(PadicInt { precision, residue: residue & mask(precision) })
    }

    pub fn zero(precision: u32) -> Result<Self, NumberError> {
        Self::new(0, precision)
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> u128 {
        self.residue
    }

    /// Coercion to a lower precision.
    pub fn reduce(&self, precision: u32) -> Result<Self, NumberError> {
        if precision > self.precision {
            return Err(NumberError::InsufficientPrecision { needed: precision, available: self.precision });
        }
        Self::from_residue(self.residue, precision)
    }

    /// The residue mod `2^bits`, which must not exceed the known precision.
    pub fn low_bits(&self, bits: u32) -> Result<u128, NumberError> {
        if bits > self.precision {
            return Err(NumberError::InsufficientPrecision { needed: bits, available: self.precision });
        }
        Ok(self.residue & mask(bits))
    }

    /// True when the known digits are all zero.
    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    /// The residue read as the integer of smallest absolute value.
    pub fn to_signed(&self) -> i128 {
        let half = 1u128 << (self.precision - 1);
        if self.residue >= half {
            (self.residue as i128) - ((mask(self.precision) as i128) + 1)
        } else {
            self.residue as i128
        }
    }

    fn combine(self, rhs: Self, op: impl Fn(u128, u128) -> u128) -> Self {
        let precision = self.precision.min(rhs.precision);
        PadicInt { precision, residue: op(self.residue, rhs.residue) & mask(precision) }
    }
}

impl Add for PadicInt {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.combine(rhs, u128::wrapping_add)
    }
}

impl Sub for PadicInt {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.combine(rhs, u128::wrapping_sub)
    }
}

impl Mul for PadicInt {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.combine(rhs, u128::wrapping_mul)
    }
}

impl Neg for PadicInt {
    type Output = Self;
    fn neg(self) -> Self {
        PadicInt { precision: self.precision, residue: self.residue.wrapping_neg() & mask(self.precision) }
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod 2^{})", self.residue, self.precision)
    }
}

/// A 2-adic number `unit / 2^shift` with `unit` a truncated 2-adic integer.
///
/// The value is known modulo `2^(unit.precision - shift)`. The shift is
/// minimal: it is zero, or the low known bit of `unit` is set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicNumber {
    shift: u32,
    unit: PadicInt,
}

impl PadicNumber {
    pub fn new(shift: u32, unit: PadicInt) -> Self {
        let mut x = PadicNumber { shift, unit };
        x.normalize();
        x
    }

    pub fn from_int(z: PadicInt) -> Self {
        PadicNumber { shift: 0, unit: z }
    }

    pub fn from_integer(n: i128, precision: u32) -> Result<Self, NumberError> {
        Ok(Self::from_int(PadicInt::new(n, precision)?))
    }

    pub fn from_dyadic(d: DyadicRational, precision: u32) -> Result<Self, NumberError> {
        Ok(Self::new(d.exponent(), PadicInt::new(d.numerator(), precision)?))
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn unit(&self) -> PadicInt {
        self.unit
    }

    /// Known digits counted from `2^0`; negative when even the fractional
    /// part is only partly known.
    pub fn absolute_precision(&self) -> i64 {
        self.unit.precision as i64 - self.shift as i64
    }

    fn normalize(&mut self) {
        while self.shift > 0 && self.unit.precision > 1 && self.unit.residue & 1 == 0 {
            self.unit = PadicInt { precision: self.unit.precision - 1, residue: self.unit.residue >> 1 };
            self.shift -= 1;
        }
    }

    /// The integral part `x - p(x)` as a 2-adic integer.
    pub fn integral_part(&self) -> Result<PadicInt, NumberError> {
        let available = self.unit.precision;
        if self.shift >= available {
            return Err(NumberError::InsufficientPrecision { needed: self.shift + 1, available });
        }
        PadicInt::from_residue(self.unit.residue >> self.shift, available - self.shift)
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self, NumberError> {
        let shift = self.shift.checked_add(rhs.shift).ok_or(NumberError::Overflow("2-adic shift"))?;
        Ok(Self::new(shift, self.unit * rhs.unit))
    }

    pub fn mul_dyadic(self, b: DyadicRational) -> Result<Self, NumberError> {
        self.checked_mul(Self::from_dyadic(b, self.unit.precision)?)
    }
}

impl Add for PadicNumber {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (hi, lo) = if self.shift >= rhs.shift { (self, rhs) } else { (rhs, self) };
        let gap = hi.shift - lo.shift;
        let precision = hi.unit.precision.min(lo.unit.precision.saturating_add(gap));
        let lifted = if gap >= 128 { 0 } else { lo.unit.residue << gap };
        let residue = hi.unit.residue.wrapping_add(lifted) & mask(precision);
        Self::new(hi.shift, PadicInt { precision, residue })
    }
}

impl Neg for PadicNumber {
    type Output = Self;
    fn neg(self) -> Self {
        PadicNumber { shift: self.shift, unit: -self.unit }
    }
}

impl Sub for PadicNumber {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

/// The fractional-part map `p : Q_2 -> Z[1/2] ∩ [0, 1)`.
pub fn p_map(x: &PadicNumber) -> Result<DyadicRational, NumberError> {
    let frac = x.unit.low_bits(x.shift)?;
    Ok(DyadicRational::new(frac as i128, x.shift))
}

/// `e(t) = exp(2 pi i t)` evaluated for a real `t`.
pub fn e(t: f64) -> Complex64 {
    let phase = t - t.floor();
    let angle = std::f64::consts::TAU * phase;
    Complex64::new(angle.cos(), angle.sin())
}

/// `e(angle)` for a dyadic angle, kept exact until converted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    angle: DyadicRational,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { angle: DyadicRational::ZERO };

    pub fn new(angle: DyadicRational) -> Self {
        RootOfUnity { angle: angle.fract() }
    }

    pub fn angle(&self) -> DyadicRational {
        self.angle
    }

    pub fn conj(&self) -> Self {
        Self::new(-self.angle)
    }

    pub fn to_complex(&self) -> Complex64 {
        match (self.angle.numerator(), self.angle.exponent()) {
            (0, _) => Complex64::new(1.0, 0.0),
            (1, 1) => Complex64::new(-1.0, 0.0),
            (1, 2) => Complex64::new(0.0, 1.0),
            (3, 2) => Complex64::new(0.0, -1.0),
            _ => e(self.angle.to_f64()),
        }
    }
}

impl Mul for RootOfUnity {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.angle + rhs.angle)
    }
}

/// The character `chi_0(x) = e(p(x))` of `Q_2`.
pub fn chi0(x: &PadicNumber) -> Result<RootOfUnity, NumberError> {
    Ok(RootOfUnity::new(p_map(x)?))
}

/// A point `[r, z]` of the 2-adic solenoid in canonical form:
/// `r ∈ [0, 1)` and `z ∈ Z_2`. `r` is the only approximate field here.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolenoidPoint {
    pub r: f64,
    pub z: PadicInt,
}

/// Canonical representative of `[r, x]` in `(R × Q_2) / Δ`.
pub fn solenoid_canonical(r: f64, x: &PadicNumber) -> Result<SolenoidPoint, NumberError> {
    let b = p_map(x)?;
    let z = x.integral_part()?;
    let shifted = r - b.to_f64();
    let mut k = shifted.floor();
    let mut r = shifted - k;
    if r >= 1.0 {
        r -= 1.0;
        k += 1.0;
    }
    let z = z - PadicInt::new(k as i128, z.precision())?;
    Ok(SolenoidPoint { r, z })
}

/// `e(r b) e(-p(x b))`, the value of the character attached to `[r, x]` at `b`.
/// Works on any representative `(r, x)` of the solenoid point.
pub fn chi_eval_repr(r: f64, x: &PadicNumber, b: DyadicRational) -> Result<Complex64, NumberError> {
    let adic = chi0(&x.mul_dyadic(b)?)?.conj();
    Ok(real_character(r, b) * adic.to_complex())
}

/// The character of `Z[1/2]` attached to a canonical solenoid point, at `b`.
pub fn chi_eval(point: &SolenoidPoint, b: DyadicRational) -> Result<Complex64, NumberError> {
    chi_eval_repr(point.r, &PadicNumber::from_int(point.z), b)
}

/// `e(r b)` with `r b` reduced mod 1 exactly: a finite float is itself a
/// dyadic rational, so only the final exponential rounds.
fn real_character(r: f64, b: DyadicRational) -> Complex64 {
    if !r.is_finite() {
        return e(r * b.to_f64());
    }
    let (mantissa, exp, sign) = r.integer_decode();
    let bits = i64::from(b.exponent()) - i64::from(exp);
    if bits <= 0 {
        return Complex64::new(1.0, 0.0);
    }
    let bits = bits as usize;
    let product = BigInt::from(mantissa) * BigInt::from(sign) * BigInt::from(b.numerator());
    let frac = product.mod_floor(&(BigInt::from(1) << bits));
    // keep 64 significant bits of the fraction
    let drop = bits.saturating_sub(64);
    let top = (frac >> drop).to_f64().unwrap_or(0.0);
    e(top / 2f64.powi((bits - drop) as i32))
}
