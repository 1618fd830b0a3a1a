//! Classical planar constructions: Fibonacci lattice, base-2 Halton
//! (Hammersley-type) sets, Zaremba's shifted variant and digital shifts.

use num_bigint::BigInt;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::Rational;
use crate::net::PointSet;
use crate::{Error, Result};

use crate::net::digits_api::{digit_word, from_digit_word};

/// Largest Fibonacci index accepted by [`fibonacci_lattice`] (`F_40 = 102334155`).
pub const MAX_FIBONACCI_INDEX: u32 = 40;

/// Binary digit reversal of `k` with `n` digits: `sum kappa_j 2^(-j-1)`.
pub fn van_der_corput(k: u64, n: u32) -> Result<Rational> {
    if n > 63 || k >= 1u64 << n {
        return Err(Error::OutOfRange(format!("k={k} not below 2^{n}")));
    }
    Ok(Rational::new(
        BigInt::from(reverse_digits(k, n)),
        BigInt::from(1u64 << n),
    ))
}

fn reverse_digits(k: u64, n: u32) -> u64 {
    if n == 0 {
        0
    } else {
        k.reverse_bits() >> (64 - n)
    }
}

/// `{(k / 2^n, vdc(k, n)) : k = 0..2^n}`.
pub fn halton2d(n: u32) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("halton2d needs n >= 1".into()));
    }
    if n > crate::net::MAX_POINT_DIGITS as u32 {
        return Err(Error::BudgetExceeded(format!(
            "halton2d with n = {n} exceeds 2^{} points",
            crate::net::MAX_POINT_DIGITS
        )));
    }
    let denom = BigInt::from(1u64 << n);
    let points = (0..1u64 << n)
        .map(|k| {
            vec![
                Rational::new(BigInt::from(k), denom.clone()),
                Rational::new(BigInt::from(reverse_digits(k, n)), denom.clone()),
            ]
        })
        .collect();
    PointSet::new(2, points, format!("halton(n={n})"))
}

/// Fibonacci numbers with `F_1 = F_2 = 1`.
pub fn fibonacci(m: u32) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..m {
        (a, b) = (b, a + b);
    }
    a
}

/// Fibonacci lattice `{(k / F_m, (k F_{m-1} mod F_m) / F_m) : k = 0..F_m}`.
pub fn fibonacci_lattice(m: u32) -> Result<PointSet> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("fibonacci index must be at least 3, got {m}")));
    }
    if m > MAX_FIBONACCI_INDEX {
        return Err(Error::BudgetExceeded(format!(
            "fibonacci index {m} above {MAX_FIBONACCI_INDEX}"
        )));
    }
    let (fm, fm1) = (fibonacci(m), fibonacci(m - 1));
    let denom = BigInt::from(fm);
    let points = (0..fm)
        .map(|k| {
            let y = (u128::from(k) * u128::from(fm1) % u128::from(fm)) as u64;
            vec![
                Rational::new(BigInt::from(k), denom.clone()),
                Rational::new(BigInt::from(y), denom.clone()),
            ]
        })
        .collect();
    PointSet::new(2, points, format!("fibonacci(m={m},N={fm})"))
}

/// Per-coordinate XOR masks applied to the first `digits` binary digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitalShift {
    digits: u32,
    /// `sigma[i]` holds digit `l` of coordinate `i` at bit `digits - l`.
    sigma: Vec<u128>,
}

impl DigitalShift {
    pub fn new(digits: u32, sigma: Vec<u128>) -> Result<Self> {
        if digits == 0 || digits > 128 {
            return Err(Error::InvalidArgument(format!("digit count {digits} not in 1..=128")));
        }
        if sigma.is_empty() {
            return Err(Error::InvalidArgument("shift needs at least one coordinate".into()));
        }
        if digits < 128 && sigma.iter().any(|&s| s >> digits != 0) {
            return Err(Error::InvalidArgument(format!("shift has more than {digits} digits")));
        }
        Ok(Self { digits, sigma })
    }

    pub fn zero(dim: usize, digits: u32) -> Result<Self> {
        Self::new(digits, vec![0; dim])
    }

    /// Zaremba's mask `0.1010..._2` on the second coordinate of a planar set.
    pub fn zaremba(digits: u32) -> Result<Self> {
        let alternating = (0..digits)
            .filter(|l| l % 2 == 0)
            .fold(0u128, |acc, l| acc | 1u128 << (digits - 1 - l));
        Self::new(digits, vec![0, alternating])
    }

    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn sigma(&self) -> &[u128] {
        &self.sigma
    }
}

/// XORs the binary digits of every coordinate with the shift.
pub fn apply_digital_shift(p: &PointSet, shift: &DigitalShift) -> Result<PointSet> {
    if p.dim() != shift.dim() {
        return Err(Error::DimensionMismatch {
            expected: shift.dim(),
            found: p.dim(),
        });
    }
    let n = shift.digits;
    let points = p
        .points()
        .iter()
        .map(|pt| {
            pt.iter()
                .zip(&shift.sigma)
                .map(|(q, s)| Ok(from_digit_word(digit_word(q, n)? ^ s, n)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PointSet::new(p.dim(), points, format!("shift({})", p.label()))
}

/// Zaremba point set: flips every other digit of the second coordinate,
/// starting with the first.
pub fn zaremba_shift(p: &PointSet, n: u32) -> Result<PointSet> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: p.dim() });
    }
    Ok(apply_digital_shift(p, &DigitalShift::zaremba(n)?)?
        .with_label(format!("zaremba(n={n})")))
}

/// Random shift from `ChaCha8Rng::seed_from_u64(seed)`.
///
/// Coordinate `i` consumes `ceil(digits / 64)` successive `next_u64` words;
/// its digits are the most significant `digits` bits of their concatenation
/// (first word most significant). Equal seeds give equal shifts.
pub fn random_shift(dim: usize, digits: u32, seed: u64) -> Result<DigitalShift> {
    if digits == 0 || digits > 128 {
        return Err(Error::InvalidArgument(format!("digit count {digits} not in 1..=128")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = (0..dim)
        .map(|_| {
            if digits <= 64 {
                u128::from(rng.next_u64() >> (64 - digits))
            } else {
                let hi = u128::from(rng.next_u64());
                let lo = u128::from(rng.next_u64());
                ((hi << 64) | lo) >> (128 - digits)
            }
        })
        .collect();
    DigitalShift::new(digits, sigma)
}
