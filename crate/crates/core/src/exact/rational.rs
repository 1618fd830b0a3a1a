use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact arbitrary-precision fraction, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `2^exp` for any signed exponent.
pub fn pow2(exp: i32) -> Rational {
    let p = BigInt::one() << exp.unsigned_abs();
    if exp >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Returns `q * 2^digits` if that is an integer in `[0, 2^digits]`.
pub fn dyadic_numerator(q: &Rational, digits: u32) -> Result<BigUint> {
    let scaled = q * Rational::from_integer(BigInt::one() << digits);
    if !scaled.is_integer() || scaled.is_negative() {
        return Err(Error::NonDyadic(format_fraction(q)));
    }
    let n = scaled.to_integer().to_biguint().expect("non-negative");
    if n > (BigUint::one() << digits) {
        return Err(Error::NonDyadic(format_fraction(q)));
    }
    Ok(n)
}

/// Lossy conversion for reporting and slope fitting only.
pub fn to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to a scaled conversion when numerator or denominator overflow.
    let n_bits = q.numer().bits() as i64;
    let d_bits = q.denom().bits() as i64;
    let shift = (n_bits - d_bits) - 60;
    let scaled = if shift >= 0 {
        q / Rational::from_integer(BigInt::one() << shift as u64)
    } else {
        q * Rational::from_integer(BigInt::one() << (-shift) as u64)
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// `"p/q"`, or just `"p"` for integers.
pub fn format_fraction(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.375"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse rational '{s}'"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(n, d);
        return Ok(if negative { -q } else { q });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Decimal approximation of `sqrt(x)` with `digits` decimals, as an exact
/// rational `s / 10^digits`.
///
/// The last digit is rounded to nearest with ties toward zero, which keeps
/// `|s^2 - x| < 10^-digits * max(1, x)`.
pub fn sqrt_decimal(x: &Rational, digits: u32) -> Result<Rational> {
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    Ok(Rational::new(sqrt_scaled(x, digits, &scale)?, scale))
}

fn sqrt_scaled(x: &Rational, digits: u32, scale: &BigInt) -> Result<BigInt> {
    if x.is_negative() {
        return Err(Error::NegativeInput(format_fraction(x)));
    }
    if digits == 0 {
        return Err(Error::InvalidArgument("digits must be at least 1".into()));
    }
    let y = x * Rational::from_integer(scale * scale);
    let floor = y.floor().to_integer();
    let r = floor.sqrt();
    // Round up only when sqrt(y) > r + 1/2, i.e. y > r^2 + r + 1/4.
    let half_sq = Rational::new(BigInt::from(4) * (&r * &r + &r) + 1, BigInt::from(4));
    Ok(if y > half_sq { r + 1 } else { r })
}

/// Decimal string of `sqrt(x)` with exactly `digits` digits after the point.
pub fn sqrt_to_digits(x: &Rational, digits: u32) -> Result<String> {
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    let s = sqrt_scaled(x, digits, &scale)?;
    let (whole, frac) = s.div_rem(&scale);
    let frac = frac.magnitude().to_string();
    Ok(format!(
        "{}.{}{}",
        whole,
        "0".repeat(digits as usize - frac.len()),
        frac
    ))
}

/// Decimal string of a rational with `digits` digits after the point,
/// truncated toward zero.
pub fn decimal_string(q: &Rational, digits: u32) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    let s = (q * Rational::from_integer(scale.clone())).trunc().to_integer();
    let negative = s.sign() == Sign::Minus;
    let (whole, frac) = s.magnitude().div_rem(scale.magnitude());
    let frac = frac.to_string();
    format!(
        "{}{}.{}{}",
        if negative { "-" } else { "" },
        whole,
        "0".repeat(digits as usize - frac.len()),
        frac
    )
}
