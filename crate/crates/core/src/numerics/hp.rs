//! Binary fixed-point arithmetic on big integers, and a real number carrying
//! an absolute error bound.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The number `mant · 2^-bits`.
///
/// Multiplication, division and the transcendental functions truncate, so
/// each such operation is off by at most one unit in the last place (ulp)
/// unless stated otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixed {
    mant: BigInt,
    bits: u32,
}

impl Fixed {
    pub fn zero(bits: u32) -> Self {
        Fixed { mant: BigInt::zero(), bits }
    }

    pub fn from_mantissa(mant: BigInt, bits: u32) -> Self {
        Fixed { mant, bits }
    }

    pub fn from_int<T: Into<BigInt>>(v: T, bits: u32) -> Self {
        Fixed { mant: v.into() << bits, bits }
    }

    /// `num / den`, truncated toward zero.
    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u32) -> Self {
        assert!(!den.is_zero(), "division by zero");
        Fixed { mant: (num << bits) / den, bits }
    }

    /// Exact when `v` is representable with `bits` fractional bits.
    pub fn from_f64(v: f64, bits: u32) -> Self {
        assert!(v.is_finite());
        if v == 0.0 {
            return Fixed::zero(bits);
        }
        let raw = v.to_bits();
        let sign = if raw >> 63 == 1 { -1 } else { 1 };
        let exp = ((raw >> 52) & 0x7ff) as i64;
        let frac = raw & ((1u64 << 52) - 1);
        let (m, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let shift = e + bits as i64;
        let mut mant = BigInt::from(m);
        if shift >= 0 {
            mant <<= shift as usize;
        } else {
            mant >>= (-shift) as usize;
        }
        Fixed { mant: mant * sign, bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn abs(&self) -> Fixed {
        Fixed { mant: self.mant.abs(), bits: self.bits }
    }

    pub fn to_f64(&self) -> f64 {
        // keep ~64 significant bits before converting
        let len = self.mant.bits() as i64;
        let drop = (len - 64).max(0);
        let top = (&self.mant >> drop as usize).to_f64().unwrap_or(f64::NAN);
        let mut v = top;
        let mut k = drop - self.bits as i64;
        // scale in steps so intermediate powers stay finite
        while k != 0 {
            let step = k.clamp(-1000, 1000);
            v *= 2f64.powi(step as i32);
            k -= step;
        }
        v
    }

    /// Same value with a different number of fractional bits (truncating).
    pub fn with_bits(&self, bits: u32) -> Fixed {
        let mant = match bits.cmp(&self.bits) {
            Ordering::Equal => self.mant.clone(),
            Ordering::Greater => &self.mant << (bits - self.bits),
            Ordering::Less => &self.mant >> (self.bits - bits),
        };
        Fixed { mant, bits }
    }

    pub fn mul_int(&self, k: i64) -> Fixed {
        Fixed { mant: &self.mant * k, bits: self.bits }
    }

    pub fn div_int(&self, k: i64) -> Fixed {
        Fixed { mant: &self.mant / k, bits: self.bits }
    }

    pub fn div(&self, other: &Fixed) -> Fixed {
        assert_eq!(self.bits, other.bits);
        Fixed { mant: (&self.mant << self.bits) / &other.mant, bits: self.bits }
    }

    /// Floor of the square root; `self` must be nonnegative.
    pub fn sqrt(&self) -> Fixed {
        assert!(!self.is_negative(), "sqrt of negative value");
        let scaled = (&self.mant << self.bits).to_biguint().expect("nonnegative");
        Fixed { mant: BigInt::from(scaled.sqrt()), bits: self.bits }
    }

    /// `ln 2`, accurate to a few ulps.
    pub fn ln2(bits: u32) -> Fixed {
        let guard = bits + 16;
        let third = Fixed::from_ratio(&BigInt::one(), &BigInt::from(3), guard);
        atanh_series(&third).mul_int(2).with_bits(bits)
    }

    /// Natural logarithm of a positive value, accurate to a few ulps.
    pub fn ln(&self) -> Fixed {
        assert!(self.mant.is_positive(), "ln of nonpositive value");
        let guard = self.bits + 32;
        let x = self.with_bits(guard);
        // x = y · 2^k with y in [1, 2)
        let k = x.mant.bits() as i64 - 1 - guard as i64;
        let y = if k >= 0 {
            Fixed { mant: &x.mant >> k as usize, bits: guard }
        } else {
            Fixed { mant: &x.mant << (-k) as usize, bits: guard }
        };
        let one = Fixed::from_int(1, guard);
        let z = (&y - &one).div(&(&y + &one));
        let ln_y = atanh_series(&z).mul_int(2);
        let ln_x = &ln_y + &Fixed::ln2(guard).mul_int(k);
        ln_x.with_bits(self.bits)
    }

    /// `ln(m)` for a positive integer.
    pub fn ln_u64(m: u64, bits: u32) -> Fixed {
        Fixed::from_int(m, bits).ln()
    }
}

/// `Σ z^(2i+1)/(2i+1)` for `0 <= z <= 1/2`; error below 4 ulps.
fn atanh_series(z: &Fixed) -> Fixed {
    let bits = z.bits;
    let z2 = z * z;
    let mut power = z.clone();
    let mut sum = Fixed::zero(bits);
    let mut denom = 1i64;
    while !power.is_zero() {
        sum = &sum + &power.div_int(denom);
        power = &power * &z2;
        denom += 2;
    }
    sum
}

impl Add for &Fixed {
    type Output = Fixed;
    fn add(self, rhs: &Fixed) -> Fixed {
        assert_eq!(self.bits, rhs.bits);
        Fixed { mant: &self.mant + &rhs.mant, bits: self.bits }
    }
}

impl Sub for &Fixed {
    type Output = Fixed;
    fn sub(self, rhs: &Fixed) -> Fixed {
        assert_eq!(self.bits, rhs.bits);
        Fixed { mant: &self.mant - &rhs.mant, bits: self.bits }
    }
}

impl Mul for &Fixed {
    type Output = Fixed;
    fn mul(self, rhs: &Fixed) -> Fixed {
        assert_eq!(self.bits, rhs.bits);
        Fixed { mant: (&self.mant * &rhs.mant) >> self.bits, bits: self.bits }
    }
}

impl Neg for &Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed { mant: -&self.mant, bits: self.bits }
    }
}

impl PartialOrd for Fixed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fixed {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.bits, other.bits);
        self.mant.cmp(&other.mant)
    }
}

/// A real number known to lie in `[value - err, value + err]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HighPrecisionReal {
    value: Fixed,
    /// in ulps of `value`
    err: BigUint,
}

/// Fractional bits used when wrapping a double.
const F64_BITS: u32 = 1100;

impl HighPrecisionReal {
    pub fn new(value: Fixed, err_ulps: BigUint) -> Self {
        HighPrecisionReal { value, err: err_ulps }
    }

    /// Wraps a double with an absolute error bound (rounded up to whole ulps).
    pub fn from_f64(value: f64, err: f64) -> Self {
        let bits = 80;
        let v = Fixed::from_f64(value, F64_BITS).with_bits(bits);
        let e = Fixed::from_f64(err.abs(), F64_BITS).with_bits(bits);
        // +1 for truncating the value and the bound
        let err = e.mant.to_biguint().unwrap_or_default() + 2u32;
        HighPrecisionReal { value: v, err }
    }

    pub fn value(&self) -> &Fixed {
        &self.value
    }

    pub fn err_ulps(&self) -> &BigUint {
        &self.err
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn err_f64(&self) -> f64 {
        Fixed::from_mantissa(BigInt::from(self.err.clone()), self.value.bits).to_f64()
    }

    pub fn lower(&self) -> Fixed {
        Fixed::from_mantissa(&self.value.mant - BigInt::from(self.err.clone()), self.value.bits)
    }

    pub fn upper(&self) -> Fixed {
        Fixed::from_mantissa(&self.value.mant + BigInt::from(self.err.clone()), self.value.bits)
    }

    /// True when the interval lies strictly below `10^-digits` in width.
    pub fn err_below_decimal(&self, digits: u32) -> bool {
        // err · 2^-bits < 10^-digits  <=>  err · 10^digits < 2^bits
        let lhs = &self.err * BigUint::from(10u32).pow(digits);
        lhs < (BigUint::one() << self.value.bits)
    }

    /// The value rounded half-up to `digits` decimal places, or `None` when
    /// the error interval straddles a rounding boundary.
    pub fn round_decimal(&self, digits: u32) -> Option<String> {
        let lo = round_half_up(&self.lower(), digits);
        let hi = round_half_up(&self.upper(), digits);
        (lo == hi).then(|| format_scaled(&lo, digits))
    }
}

fn round_half_up(x: &Fixed, digits: u32) -> BigInt {
    let scaled = &x.mant * BigInt::from(10u32).pow(digits);
    let half = BigInt::one() << (x.bits - 1);
    (scaled + half).div_floor(&(BigInt::one() << x.bits))
}

fn format_scaled(v: &BigInt, digits: u32) -> String {
    let sign = if v.sign() == Sign::Minus { "-" } else { "" };
    let s = v.abs().to_string();
    let d = digits as usize;
    if d == 0 {
        return format!("{sign}{s}");
    }
    let s = format!("{s:0>width$}", width = d + 1);
    let (int, frac) = s.split_at(s.len() - d);
    format!("{sign}{int}.{frac}")
}
