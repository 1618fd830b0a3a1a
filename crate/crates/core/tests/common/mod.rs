//! Independent oracles shared by the integration tests. None of these call
//! into the fast paths they are used to check.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tentqmc::exact::{rat, BitMatrix, BitVector, Rational};
use tentqmc::{GeneratorMatrixSet, PointSet};

pub fn data_file(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn sobol() -> GeneratorMatrixSet {
    GeneratorMatrixSet::load(data_file("sobol_d6_n16.txt")).unwrap()
}

/// Relative deviation |got - want| / |want|.
pub fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

/// Index of the dyadic cell of width `2^-a` that contains `q`.
fn cell(q: &Rational, a: u32) -> BigInt {
    let scaled = q * Rational::from_integer(BigInt::one() << a);
    scaled.floor().to_integer()
}

/// All `d`-tuples of nonnegative integers summing to `total`.
pub fn compositions(total: u32, d: usize) -> Vec<Vec<u32>> {
    if d == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, d - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Whether every elementary dyadic box of volume `2^(t-n)` holds exactly
/// `2^t` of the `2^n` points, by direct counting.
pub fn boxes_balanced(p: &PointSet, n: u32, t: u32) -> bool {
    assert_eq!(p.len(), 1usize << n);
    let per_box = 1usize << t;
    for shape in compositions(n - t, p.dim()) {
        let mut counts = std::collections::HashMap::<Vec<BigInt>, usize>::new();
        for pt in p.points() {
            let key = pt.iter().zip(&shape).map(|(q, &a)| cell(q, a)).collect();
            *counts.entry(key).or_default() += 1;
        }
        // 2^(n-t) boxes of this shape, each must hold 2^t points.
        if counts.len() != 1usize << (n - t) || counts.values().any(|&c| c != per_box) {
            return false;
        }
    }
    true
}

/// Smallest `t` for which [`boxes_balanced`] holds.
pub fn box_counting_t(p: &PointSet, n: u32) -> u32 {
    (0..=n).find(|&t| boxes_balanced(p, n, t)).unwrap()
}

/// Inverse of digit interlacing: splits each coordinate of `alpha * n`
/// digits back into `alpha` coordinates of `n` digits.
pub fn deinterlace(p: &PointSet, alpha: usize, n: u32) -> PointSet {
    let total = alpha as u32 * n;
    let scale = Rational::from_integer(BigInt::one() << total);
    let points = p
        .points()
        .iter()
        .map(|pt| {
            let mut out = Vec::with_capacity(pt.len() * alpha);
            for q in pt {
                let w = (q * &scale).to_integer();
                let bit = |pos: u32| -> u8 { ((&w >> (total - 1 - pos)) & BigInt::one()).is_one() as u8 };
                for s in 0..alpha as u32 {
                    let mut acc = Rational::zero();
                    for l in 0..n {
                        if bit(l * alpha as u32 + s) == 1 {
                            acc += Rational::new(BigInt::one(), BigInt::one() << (l + 1));
                        }
                    }
                    out.push(acc);
                }
            }
            out
        })
        .collect();
    PointSet::new(p.dim() * alpha, points, "deinterlaced").unwrap()
}

/// `floor(sqrt(x) * 10^digits) / 10^digits` by bisection on integers.
pub fn bisection_sqrt(x: &Rational, digits: u32) -> Rational {
    let scale = BigInt::from(10u8).pow(digits);
    let target = x * Rational::from_integer(&scale * &scale);
    let (mut lo, mut hi) = (BigInt::zero(), target.ceil().to_integer() + 1);
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1u32;
        if Rational::from_integer(&mid * &mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Rational::new(lo, scale)
}

/// Boole's rule on `[a, b]`: exact for polynomials of degree at most 5.
pub fn boole(f: impl Fn(&Rational) -> Rational, a: &Rational, b: &Rational) -> Rational {
    let h = (b - a) / Rational::from_integer(4.into());
    let w = [7, 32, 12, 32, 7];
    let mut s = Rational::zero();
    for (i, wi) in w.iter().enumerate() {
        let x = a + &h * Rational::from_integer((i as i64).into());
        s += f(&x) * Rational::from_integer((*wi).into());
    }
    s * (b - a) / Rational::from_integer(90.into())
}

/// The second kernel written out from its definition.
pub fn k2_direct(x: &Rational, y: &Rational) -> Rational {
    let one = Rational::one();
    let six = rat(6, 1);
    let pos = if x > y { (x - y) * (x - y) * (x - y) } else { Rational::zero() };
    &one - x - y + rat(2, 1) * x * y + pos / &six
        - x * (&one - y) * (x * x - rat(2, 1) * y + y * y) / &six
}

/// `int_0^1 K(x, y) dy` by Boole's rule on the two polynomial pieces.
pub fn mean_by_quadrature(k: impl Fn(&Rational, &Rational) -> Rational + Copy, x: &Rational) -> Rational {
    let zero = Rational::zero();
    let one = Rational::one();
    boole(|y| k(x, y), &zero, x) + boole(|y| k(x, y), x, &one)
}

/// Squared worst-case error in one dimension from the defining identity
/// `int int K - (2/N) sum int K(x, .) + (1/N^2) sum sum K(x, y)`, with every
/// integral evaluated by quadrature.
pub fn wce_squared_by_quadrature(
    k: impl Fn(&Rational, &Rational) -> Rational + Copy,
    points: &[Rational],
) -> Rational {
    let zero = Rational::zero();
    let one = Rational::one();
    let n = Rational::from_integer(points.len().into());
    // The mean is a polynomial of degree <= 4 in x.
    let double = boole(|x| mean_by_quadrature(k, x), &zero, &one);
    let single: Rational = points.iter().map(|x| mean_by_quadrature(k, x)).sum();
    let mut pair = Rational::zero();
    for x in points {
        for y in points {
            pair += k(x, y);
        }
    }
    double - rat(2, 1) * single / &n + pair / (&n * &n)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random rational in `[0, 1]` with denominator at most `max_den`.
pub fn random_unit(r: &mut impl Rng, max_den: i64) -> Rational {
    let den = r.random_range(1..=max_den);
    rat(r.random_range(0..=den), den)
}

pub fn random_point_set(r: &mut impl Rng, dim: usize, len: usize, max_den: i64) -> PointSet {
    let points = (0..len)
        .map(|_| (0..dim).map(|_| random_unit(r, max_den)).collect())
        .collect();
    PointSet::new(dim, points, "random").unwrap()
}

pub fn random_matrix(r: &mut impl Rng, rows: usize, cols: usize) -> BitMatrix {
    let rows: Vec<BitVector> = (0..rows)
        .map(|_| BitVector::from_bits(&(0..cols).map(|_| r.random_range(0..2u8)).collect::<Vec<_>>()))
        .collect();
    BitMatrix::from_rows(&rows).unwrap()
}

pub fn abs_diff(a: &Rational, b: &Rational) -> Rational {
    (a - b).abs()
}
