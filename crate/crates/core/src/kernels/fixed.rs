//! Fixed-point pair sums for large point sets.
//!
//! Values are `I256` integers scaled by `2^FRACTION_BITS`; every product is
//! truncated toward zero, so each univariate kernel value carries an absolute
//! error below `2^-216` and a product of `d` of them below
//! `d (7/3)^(d-1) 2^-216`. Averaging over pairs does not enlarge the bound,
//! so the squared error is accurate to better than `1e-60` for `d <= 10`.
//! Single-sum terms are computed exactly.

use ethnum::{I256, U256};
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use super::engine::{assemble, common_denominator, single_sum_term};
use super::KernelId;
use crate::exact::Rational;
use crate::net::PointSet;
use crate::{Error, Result};

pub const FRACTION_BITS: u32 = 224;

/// Largest dimension covered by the documented error bound.
pub const MAX_FIXED_DIM: usize = 10;

/// Terms added in `I256` before spilling into a `BigInt`.
const BLOCK: usize = 1024;

fn one() -> I256 {
    I256::ONE << FRACTION_BITS
}

/// `floor(p * 2^F / q)` for a fraction in `[0, 1]`.
fn from_rational(x: &Rational) -> I256 {
    big_to_i256(&((x.numer() << FRACTION_BITS) / x.denom()))
}

fn from_ratio(p: i64, q: i64) -> I256 {
    (I256::from(p) << FRACTION_BITS) / I256::from(q)
}

/// `floor(2^F / sqrt(24))`.
fn inv_sqrt24() -> I256 {
    big_to_i256(&((BigInt::from(1) << (2 * FRACTION_BITS)) / BigInt::from(24)).sqrt())
}

fn big_to_i256(v: &BigInt) -> I256 {
    let bytes = v.to_signed_bytes_le();
    let fill = if v.sign() == num_bigint::Sign::Minus { 0xff } else { 0 };
    let mut buf = [fill; 32];
    buf[..bytes.len()].copy_from_slice(&bytes);
    I256::from_le_bytes(buf)
}

fn i256_to_big(v: I256) -> BigInt {
    BigInt::from_signed_bytes_le(&v.to_le_bytes())
}

/// `(a * b) >> F`, truncated toward zero.
///
/// Partial products of limb weight below `2^128` are dropped; they shift the
/// truncated result by at most one unit in the last place.
#[inline]
fn mul(a: I256, b: I256) -> I256 {
    let negative = (a < 0) != (b < 0);
    let [x0, x1, x2, x3] = limbs(a.unsigned_abs());
    let [y0, y1, y2, y3] = limbs(b.unsigned_abs());
    let m = |p: u64, q: u64| u128::from(p) * u128::from(q);
    let lo = |v: u128| v as u64 as u128;
    let hi = |v: u128| v >> 64;
    // Column sums stay below 2^131, so u128 cannot overflow after carrying.
    let (a02, a11, a20) = (m(x0, y2), m(x1, y1), m(x2, y0));
    let c2 = hi(a02) + hi(a11) + hi(a20) + ((lo(a02) + lo(a11) + lo(a20)) >> 64);
    let (a03, a12, a21, a30) = (m(x0, y3), m(x1, y2), m(x2, y1), m(x3, y0));
    let s3 = c2 + lo(a03) + lo(a12) + lo(a21) + lo(a30);
    let r3 = s3 as u64;
    let c3 = (s3 >> 64) + hi(a03) + hi(a12) + hi(a21) + hi(a30);
    let (a13, a22, a31) = (m(x1, y3), m(x2, y2), m(x3, y1));
    let s4 = c3 + lo(a13) + lo(a22) + lo(a31);
    let r4 = s4 as u64;
    let c4 = (s4 >> 64) + hi(a13) + hi(a22) + hi(a31);
    let (a23, a32) = (m(x2, y3), m(x3, y2));
    let s5 = c4 + lo(a23) + lo(a32);
    let r5 = s5 as u64;
    let c5 = (s5 >> 64) + hi(a23) + hi(a32);
    let s6 = c5 + m(x3, y3);
    let (r6, r7) = (s6 as u64, (s6 >> 64) as u64);
    let shift = FRACTION_BITS - 192;
    let w = |p: u64, q: u64| (p >> shift) | (q << (64 - shift));
    let low = u128::from(w(r3, r4)) | (u128::from(w(r4, r5)) << 64);
    let high = u128::from(w(r5, r6)) | (u128::from(w(r6, r7)) << 64);
    let magnitude = U256::from_words(high, low).as_i256();
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

fn limbs(v: U256) -> [u64; 4] {
    let (hi, lo) = v.into_words();
    [lo as u64, (lo >> 64) as u64, hi as u64, (hi >> 64) as u64]
}

/// Per-coordinate quantities reused across all pairs.
#[derive(Clone, Copy)]
struct Coord {
    x: I256,
    /// `B1(x)` for K1, `x^2` otherwise.
    u: I256,
    /// `B2(x)` for K1.
    v: I256,
    /// `x / sqrt(24)` for K1.
    r: I256,
}

struct Constants {
    one: I256,
    half: I256,
    sixth: I256,
    k1_const: I256,
    inv_sqrt24: I256,
}

fn prepare(id: KernelId, x: &Rational, c: &Constants) -> Coord {
    let x = from_rational(x);
    let x2 = mul(x, x);
    match id {
        KernelId::K1 => Coord { x, u: x - c.half, v: x2 - x + c.sixth, r: mul(x, c.inv_sqrt24) },
        _ => Coord { x, u: x2, v: I256::ZERO, r: I256::ZERO },
    }
}

fn kernel(id: KernelId, p: &Coord, q: &Coord, c: &Constants) -> I256 {
    match id {
        KernelId::K1 => {
            // B4(t)/24 = (t (1 - t) / sqrt(24))^2 - 1/720 with t = |x - y|.
            let t = (p.x - q.x).abs();
            let w = mul((p.r - q.r).abs(), c.one - t);
            c.k1_const + mul(p.u, q.u) + (mul(p.v, q.v) >> 2u32) - mul(w, w)
        }
        KernelId::K2 => {
            let (x, y) = (p.x, q.x);
            let xy = mul(x, y);
            let mut cubic = -mul(mul(x, c.one - y), p.u - (y << 1u32) + q.u);
            if x > y {
                let t = x - y;
                cubic += mul(mul(t, t), t);
            }
            c.one - x - y + (xy << 1u32) + mul(cubic, c.sixth)
        }
        KernelId::K3 => {
            let (x, y) = (p.x, q.x);
            let m = x.min(y);
            let xy = mul(x, y);
            let m2 = mul(m, m);
            let m3 = mul(m2, m);
            let sixfold = (m3 << 1u32) - mul(x + y, m2) * I256::from(3) + mul(xy, m) * I256::from(6);
            c.one + xy + mul(sixfold, c.sixth)
        }
    }
}

pub(crate) fn squared(id: KernelId, p: &PointSet) -> Result<Rational> {
    let dim = p.dim();
    if dim > MAX_FIXED_DIM {
        return Err(Error::InvalidArgument(format!(
            "fixed-point mode supports d <= {MAX_FIXED_DIM}, got {dim}"
        )));
    }
    let n = p.len();
    let c = Constants {
        one: one(),
        half: one() >> 1u32,
        sixth: from_ratio(1, 6),
        k1_const: from_ratio(721, 720),
        inv_sqrt24: inv_sqrt24(),
    };
    let coords: Vec<Coord> =
        p.points().iter().flatten().map(|x| prepare(id, x, &c)).collect();
    let pair = |i: usize, j: usize| -> I256 {
        let xi = &coords[i * dim..(i + 1) * dim];
        let xj = &coords[j * dim..(j + 1) * dim];
        let mut acc = kernel(id, &xi[0], &xj[0], &c);
        for (a, b) in xi[1..].iter().zip(&xj[1..]) {
            acc = mul(acc, kernel(id, a, b, &c));
        }
        acc
    };
    let total: BigInt = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = BigInt::zero();
            let mut j = i + 1;
            while j < n {
                let end = (j + BLOCK).min(n);
                let mut block = I256::ZERO;
                let mut jj = j;
                // Two independent pairs per step give the CPU overlapping work.
                while jj + 1 < end {
                    block += pair(i, jj) + pair(i, jj + 1);
                    jj += 2;
                }
                if jj < end {
                    block += pair(i, jj);
                }
                row += i256_to_big(block);
                j = end;
            }
            (row << 1u32) + i256_to_big(pair(i, i))
        })
        .sum();
    let s = common_denominator(p);
    let single = single_sum_term(id, &s, n, dim);
    let pair_sum = Rational::new(total, BigInt::from(1u8) << FRACTION_BITS);
    Ok(assemble(id, dim, n, single, pair_sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, to_f64};
    use num_traits::Signed;
    use crate::kernels::kernel1d;

    #[test]
    fn multiplication_truncates() {
        let half = one() >> 1u32;
        assert_eq!(mul(half, half), one() >> 2u32);
        assert_eq!(mul(-half, half), -(one() >> 2u32));
        let third = from_ratio(1, 3);
        let err = i256_to_big(mul(third, third) - from_ratio(1, 9));
        assert!(err.magnitude().bits() <= 2);
        let big = one() << 20u32;
        assert_eq!(mul(big, big), one() << 40u32);
    }

    #[test]
    fn conversions_round_trip() {
        for v in [I256::ZERO, I256::from(-5i64), one() * I256::from(3), -(one() << 20u32)] {
            assert_eq!(big_to_i256(&i256_to_big(v)), v);
        }
        assert_eq!(from_rational(&rat(1, 2)), one() >> 1u32);
    }

    #[test]
    fn kernels_close_to_exact() {
        let c = Constants {
            one: one(),
            half: one() >> 1u32,
            sixth: from_ratio(1, 6),
            k1_const: from_ratio(721, 720),
        inv_sqrt24: inv_sqrt24(),
        };
        let tol = Rational::new(BigInt::from(1), BigInt::from(1) << 216u32);
        for (a, b) in [(0, 0), (1, 3), (5, 2), (7, 7), (9, 4)] {
            let (x, y) = (rat(a, 9), rat(b, 9));
            for id in KernelId::ALL {
                let got = kernel(id, &prepare(id, &x, &c), &prepare(id, &y, &c), &c);
                let got = Rational::new(i256_to_big(got), BigInt::from(1u8) << FRACTION_BITS);
                let exact = kernel1d(id, &x, &y).unwrap();
                let diff = &got - &exact;
                assert!(diff.abs() < tol, "{id} {a} {b}: {}", to_f64(&diff));
            }
        }
    }
}

