use ethnum::I256;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{kernel_double_integral, KernelId};
use crate::exact::{int, to_f64, Rational};
use crate::net::PointSet;
use crate::Result;

/// Largest `N` evaluated exactly when the mode is [`Mode::Auto`].
pub const AUTO_EXACT_LIMIT: usize = 1 << 13;

/// Largest common denominator handled by the machine-integer pair loop.
const SMALL_DENOMINATOR: u64 = 1 << 28;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Exact rational result.
    Exact,
    /// 224-bit fixed-point pair sum; absolute error of the squared error
    /// below `1e-60` for `d <= 10`.
    Fixed60,
    /// Exact up to [`AUTO_EXACT_LIMIT`] points, fixed point above.
    Auto,
}

impl std::str::FromStr for Mode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(Mode::Exact),
            "fixed60" => Ok(Mode::Fixed60),
            "auto" => Ok(Mode::Auto),
            other => Err(crate::Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Fixed60 => "fixed60",
            Mode::Auto => "auto",
        })
    }
}

#[derive(Clone, Debug)]
pub struct WceOptions {
    pub mode: Mode,
    /// Worker threads for the pair sum; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Decimal digits of the reported error.
    pub digits: u32,
}

impl Default for WceOptions {
    fn default() -> Self {
        Self { mode: Mode::Auto, threads: None, digits: 30 }
    }
}

impl WceOptions {
    pub fn exact() -> Self {
        Self { mode: Mode::Exact, ..Self::default() }
    }

    pub fn fixed60() -> Self {
        Self { mode: Mode::Fixed60, ..Self::default() }
    }

    pub(crate) fn resolve(&self, n: usize) -> Mode {
        match self.mode {
            Mode::Auto if n <= AUTO_EXACT_LIMIT => Mode::Exact,
            Mode::Auto => Mode::Fixed60,
            m => m,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WceResult {
    /// Exact in [`Mode::Exact`]; a dyadic approximation in [`Mode::Fixed60`].
    pub squared_error: Rational,
    pub error_digits: String,
    pub kernel: KernelId,
    pub n: usize,
    pub d: usize,
    pub mode: Mode,
}

impl WceResult {
    pub fn error_f64(&self) -> f64 {
        to_f64(&self.squared_error).sqrt()
    }
}

/// Coordinates of a point set as integers over one common denominator.
pub(crate) struct Scaled {
    pub denom: BigInt,
    /// Row-major `N x d`.
    pub coords: Vec<BigInt>,
}

pub(crate) fn common_denominator(p: &PointSet) -> Scaled {
    let mut denom = BigInt::one();
    for x in p.points().iter().flatten() {
        if !(&denom % x.denom()).is_zero() {
            denom = denom.lcm(x.denom());
        }
    }
    let coords = p
        .points()
        .iter()
        .flatten()
        .map(|x| x.numer() * (&denom / x.denom()))
        .collect();
    Scaled { denom, coords }
}

/// Integer form of the univariate kernel: `scale(D) * K(a/D, b/D)`.
///
/// With `t = |a - b|` and `q(a) = 6a^2 - 6aD + D^2`:
/// * `720 D^4 K1 = 721 D^4 + 180 D^2 (2a - D)(2b - D) + 5 q(a) q(b) - 30 (t (D - t))^2`
/// * `6 D^4 K2 = 6 D^4 - 6 D^3 (a + b) + 12 a b D^2 + D (a - b)_+^3 - a (D - b)(a^2 - 2bD + b^2)`
/// * `6 D^3 K3 = 6 D^3 + 6 a b D + 2 m^3 - 3 (a + b) m^2 + 6 a b m` with `m = min(a, b)`
fn int_kernel_big(id: KernelId, a: &BigInt, b: &BigInt, d: &BigInt) -> BigInt {
    let d2 = d * d;
    match id {
        KernelId::K1 => {
            let t: BigInt = if a > b { a - b } else { b - a };
            let q = |x: &BigInt| -> BigInt { BigInt::from(6) * x * x - BigInt::from(6) * x * d + &d2 };
            let two = BigInt::from(2);
            let w = &t * (d - &t);
            BigInt::from(721) * &d2 * &d2
                + BigInt::from(180) * &d2 * (&two * a - d) * (&two * b - d)
                + BigInt::from(5) * q(a) * q(b)
                - BigInt::from(30) * &w * &w
        }
        KernelId::K2 => {
            let d3 = &d2 * d;
            let six = BigInt::from(6);
            let mut v = &six * &d2 * &d2 - &six * &d3 * (a + b) + BigInt::from(12) * a * b * &d2
                - a * (d - b) * (a * a - BigInt::from(2) * b * d + b * b);
            if a > b {
                let t = a - b;
                v += d * &t * &t * &t;
            }
            v
        }
        KernelId::K3 => {
            let m = if a < b { a } else { b };
            let six = BigInt::from(6);
            let ab = a * b;
            &six * &d2 * d + &six * &ab * d + BigInt::from(2) * m * m * m
                - BigInt::from(3) * (a + b) * m * m
                + &six * &ab * m
        }
    }
}


fn int_kernel_i128(id: KernelId, a: i128, b: i128, d: i128) -> i128 {
    let d2 = d * d;
    match id {
        KernelId::K1 => {
            let t = (a - b).abs();
            let q = |x: i128| 6 * x * x - 6 * x * d + d2;
            let w = t * (d - t);
            721 * d2 * d2 + 180 * d2 * (2 * a - d) * (2 * b - d) + 5 * q(a) * q(b) - 30 * w * w
        }
        KernelId::K2 => {
            let d3 = d2 * d;
            let mut v = 6 * d2 * d2 - 6 * d3 * (a + b) + 12 * a * b * d2
                - a * (d - b) * (a * a - 2 * b * d + b * b);
            if a > b {
                let t = a - b;
                v += d * t * t * t;
            }
            v
        }
        KernelId::K3 => {
            let m = a.min(b);
            6 * d2 * d + 6 * a * b * d + 2 * m * m * m - 3 * (a + b) * m * m + 6 * a * b * m
        }
    }
}

/// `(scale, log2 bound on |integer kernel|)` for denominator `D`.
fn scale_and_bits(id: KernelId, denom: &BigInt) -> (BigInt, u64) {
    let bits = denom.bits();
    match id {
        KernelId::K1 => (BigInt::from(720) * num_traits::pow(denom.clone(), 4), 10 + 4 * bits),
        KernelId::K2 => (BigInt::from(6) * num_traits::pow(denom.clone(), 4), 6 + 4 * bits),
        KernelId::K3 => (BigInt::from(6) * num_traits::pow(denom.clone(), 3), 5 + 3 * bits),
    }
}

/// Numerators of the closed-form single-sum factor over `24 D^4`.
fn mean_numerator(id: KernelId, a: &BigInt, d: &BigInt) -> BigInt {
    let a2 = a * a;
    let a3 = &a2 * a;
    let a4 = &a3 * a;
    let d2 = d * d;
    let d3 = &d2 * d;
    let d4 = &d2 * &d2;
    match id {
        KernelId::K1 => BigInt::from(24) * d4,
        KernelId::K2 => BigInt::from(12) * d4 + a * d3 - BigInt::from(2) * a3 * d + a4,
        KernelId::K3 => {
            BigInt::from(24) * d4 + BigInt::from(12) * a * d3 + BigInt::from(6) * a2 * d2
                - BigInt::from(4) * a3 * d
                + a4
        }
    }
}

/// `(2/N) sum_x prod_i mean(x_i)`, exact.
pub(crate) fn single_sum_term(id: KernelId, s: &Scaled, n: usize, dim: usize) -> Rational {
    if id == KernelId::K1 {
        return int(2);
    }
    let total: BigInt = s
        .coords
        .par_chunks(dim)
        .map(|pt| pt.iter().fold(BigInt::one(), |acc, a| acc * mean_numerator(id, a, &s.denom)))
        .sum();
    let denom = num_traits::pow(BigInt::from(24) * num_traits::pow(s.denom.clone(), 4), dim);
    Rational::new(BigInt::from(2) * total, denom * BigInt::from(n))
}

/// `C^d - (2/N) S_1 + S_2 / N^2` from the pair sum `numer / scale^d`.
pub(crate) fn assemble(
    id: KernelId,
    dim: usize,
    n: usize,
    single: Rational,
    pair: Rational,
) -> Rational {
    let c = num_traits::pow(kernel_double_integral(id), dim);
    let nn = BigInt::from(n) * BigInt::from(n);
    c - single + pair / Rational::from_integer(nn)
}

enum Accumulator {
    I128,
    I256,
    Big,
}

/// Exact squared worst-case error.
pub(crate) fn exact(id: KernelId, p: &PointSet) -> Result<Rational> {
    let n = p.len();
    let dim = p.dim();
    let s = common_denominator(p);
    let (scale, bits) = scale_and_bits(id, &s.denom);
    let single = single_sum_term(id, &s, n, dim);
    let row_bits = bits * dim as u64 + 1 + u64::from(usize::BITS - n.leading_zeros());
    let small = s.denom <= BigInt::from(SMALL_DENOMINATOR);
    let acc = if small && row_bits <= 126 {
        Accumulator::I128
    } else if small && row_bits <= 254 {
        Accumulator::I256
    } else {
        Accumulator::Big
    };
    let pair_numer = match acc {
        Accumulator::Big => pair_sum_big(id, &s, n, dim),
        _ => {
            let d = s.denom.to_i128().expect("small denominator");
            let coords: Vec<i128> = s.coords.iter().map(|c| c.to_i128().expect("a <= D")).collect();
            if matches!(acc, Accumulator::I128) {
                pair_sum_i128(id, &coords, d, n, dim)
            } else {
                pair_sum_i256(id, &coords, d, n, dim)
            }
        }
    };
    let pair = Rational::new(pair_numer, num_traits::pow(scale, dim));
    Ok(assemble(id, dim, n, single, pair))
}

/// Row `i` contributes `K(x_i, x_i) + 2 sum_{j > i} K(x_i, x_j)`.
fn pair_sum_i128(id: KernelId, c: &[i128], d: i128, n: usize, dim: usize) -> BigInt {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = &c[i * dim..(i + 1) * dim];
            let pair = |j: usize| -> i128 {
                let xj = &c[j * dim..(j + 1) * dim];
                xi.iter().zip(xj).fold(1i128, |acc, (&a, &b)| acc * int_kernel_i128(id, a, b, d))
            };
            let off: i128 = (i + 1..n).map(pair).sum();
            BigInt::from(pair(i) + 2 * off)
        })
        .sum()
}

fn pair_sum_i256(id: KernelId, c: &[i128], d: i128, n: usize, dim: usize) -> BigInt {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = &c[i * dim..(i + 1) * dim];
            let pair = |j: usize| -> I256 {
                let xj = &c[j * dim..(j + 1) * dim];
                let mut it = xi.iter().zip(xj).map(|(&a, &b)| int_kernel_i128(id, a, b, d));
                let first = I256::from(it.next().expect("dim >= 1"));
                it.fold(first, |acc, k| acc * I256::from(k))
            };
            let mut off = I256::ZERO;
            for j in i + 1..n {
                off += pair(j);
            }
            i256_to_big(pair(i) + off + off)
        })
        .sum()
}

fn pair_sum_big(id: KernelId, s: &Scaled, n: usize, dim: usize) -> BigInt {
    let c = &s.coords;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = &c[i * dim..(i + 1) * dim];
            let pair = |j: usize| -> BigInt {
                let xj = &c[j * dim..(j + 1) * dim];
                xi.iter()
                    .zip(xj)
                    .fold(BigInt::one(), |acc, (a, b)| acc * int_kernel_big(id, a, b, &s.denom))
            };
            let off: BigInt = (i + 1..n).map(pair).sum();
            pair(i) + BigInt::from(2) * off
        })
        .sum()
}

pub(crate) fn i256_to_big(v: I256) -> BigInt {
    BigInt::parse_bytes(v.to_string().as_bytes(), 10).expect("decimal")
}
