//! Bernoulli polynomials, the three reproducing kernels of `H^2([0,1])`, their
//! tensor products and the worst-case integration error of equal-weight
//! rules.

mod engine;
mod fixed;

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::exact::{int, rat, sqrt_to_digits, Poly, Rational};
use crate::net::PointSet;
use crate::{Error, Result};

pub use engine::{Mode, WceOptions, WceResult, AUTO_EXACT_LIMIT};
pub use fixed::FRACTION_BITS;

/// Selects the kernel of one of the three equivalent norms
/// `||f||_1`, `||f||_2`, `||f||_3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelId {
    K1,
    K2,
    K3,
}

impl KernelId {
    pub const ALL: [KernelId; 3] = [KernelId::K1, KernelId::K2, KernelId::K3];
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelId::K1 => "K1",
            KernelId::K2 => "K2",
            KernelId::K3 => "K3",
        })
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "K1" | "1" => Ok(KernelId::K1),
            "K2" | "2" => Ok(KernelId::K2),
            "K3" | "3" => Ok(KernelId::K3),
            other => Err(Error::InvalidArgument(format!("unknown kernel {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bernoulli {
    B1,
    B2,
    B4,
}

impl Bernoulli {
    pub fn poly(self) -> Poly {
        match self {
            Bernoulli::B1 => Poly::new(vec![rat(-1, 2), int(1)]),
            Bernoulli::B2 => Poly::new(vec![rat(1, 6), int(-1), int(1)]),
            Bernoulli::B4 => Poly::new(vec![rat(-1, 30), int(0), int(1), int(-2), int(1)]),
        }
    }
}

pub fn bernoulli(b: Bernoulli, x: &Rational) -> Rational {
    b.poly().eval(x)
}

fn check_unit(x: &Rational) -> Result<()> {
    if x.is_negative() || *x > Rational::one() {
        return Err(Error::OutOfRange(format!("{x} not in [0, 1]")));
    }
    Ok(())
}

/// Univariate kernel `K^1_id(x, y)`.
pub fn kernel1d(id: KernelId, x: &Rational, y: &Rational) -> Result<Rational> {
    check_unit(x)?;
    check_unit(y)?;
    Ok(kernel1d_unchecked(id, x, y))
}

pub(crate) fn kernel1d_unchecked(id: KernelId, x: &Rational, y: &Rational) -> Rational {
    let one = Rational::one();
    match id {
        KernelId::K1 => {
            let b1 = bernoulli(Bernoulli::B1, x) * bernoulli(Bernoulli::B1, y);
            let b2 = bernoulli(Bernoulli::B2, x) * bernoulli(Bernoulli::B2, y) / int(4);
            let b4 = bernoulli(Bernoulli::B4, &(x - y).abs()) / int(24);
            one + b1 + b2 - b4
        }
        KernelId::K2 => {
            let pos = if x > y { (x - y) * (x - y) * (x - y) } else { Rational::zero() };
            let tail = x * (&one - y) * (x * x - int(2) * y + y * y);
            &one - x - y + int(2) * x * y + (pos - tail) / int(6)
        }
        KernelId::K3 => {
            let m = if x < y { x } else { y };
            let m2 = m * m;
            &one + x * y + &m2 * m / int(3) - (x + y) * &m2 / int(2) + x * y * m
        }
    }
}

/// Product kernel `K^d_id(x, y) = prod_i K^1_id(x_i, y_i)`.
pub fn kernel_tensor(id: KernelId, x: &[Rational], y: &[Rational]) -> Result<Rational> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    x.iter().zip(y).try_fold(Rational::one(), |acc, (a, b)| Ok(acc * kernel1d(id, a, b)?))
}

/// Closed-form `int_0^1 K^1_id(x, y) dy`.
pub fn kernel_mean(id: KernelId, x: &Rational) -> Rational {
    let x2 = x * x;
    let x3 = &x2 * x;
    let x4 = &x3 * x;
    match id {
        KernelId::K1 => Rational::one(),
        KernelId::K2 => rat(1, 2) + x / int(24) - x3 / int(12) + x4 / int(24),
        KernelId::K3 => int(1) + x / int(2) + x2 / int(4) - x3 / int(6) + x4 / int(24),
    }
}

/// `int int K^1_id(x, y) dx dy`.
pub fn kernel_double_integral(id: KernelId) -> Rational {
    match id {
        KernelId::K1 => Rational::one(),
        KernelId::K2 => rat(61, 120),
        KernelId::K3 => rat(13, 10),
    }
}

/// `int_0^1 K^1_id(x, y) dy` by exact antidifferentiation of the two
/// polynomial pieces `y < x` and `y > x`.
pub fn kernel_mean_check(id: KernelId, x: &Rational) -> Result<Rational> {
    check_unit(x)?;
    let y = Poly::identity();
    let cx = |q: Rational| Poly::constant(q);
    let one = cx(Rational::one());
    // Pieces as polynomials in y; `below` is valid for y <= x, `above` for y >= x.
    let (below, above) = match id {
        KernelId::K1 => {
            let common = &(&one + &Bernoulli::B1.poly().scale(&bernoulli(Bernoulli::B1, x)))
                + &Bernoulli::B2.poly().scale(&(bernoulli(Bernoulli::B2, x) / int(4)));
            let b4 = Bernoulli::B4.poly().scale(&rat(-1, 24));
            let x_minus_y = &cx(x.clone()) - &y;
            let y_minus_x = &y - &cx(x.clone());
            (&common + &b4.compose(&x_minus_y), &common + &b4.compose(&y_minus_x))
        }
        KernelId::K2 => {
            let xs = cx(x.clone());
            let base = &(&(&one - &xs) - &y) + &y.scale(&(int(2) * x));
            let quad = &(&cx(x * x) - &y.scale(&int(2))) + &y.pow(2);
            let tail = (&(&one - &y) * &quad).scale(&(x / int(6)));
            let smooth = &base - &tail;
            let cube = (&xs - &y).pow(3).scale(&rat(1, 6));
            (&smooth + &cube, smooth)
        }
        KernelId::K3 => {
            // min{x, y} = y below the diagonal and x above it.
            let xs = cx(x.clone());
            let xy = y.scale(x);
            let piece = |m: &Poly| {
                let m2 = m.pow(2);
                &(&(&(&one + &xy) + &(&m2 * m).scale(&rat(1, 3)))
                    - &(&(&xs + &y) * &m2).scale(&rat(1, 2)))
                    + &(&xy * m)
            };
            (piece(&y), piece(&xs))
        }
    };
    Ok(below.integrate(&Rational::zero(), x) + above.integrate(x, &Rational::one()))
}

/// Squared worst-case error with default options (exact for `N <= 2^13`).
pub fn wce_squared(id: KernelId, p: &PointSet) -> Result<WceResult> {
    wce_squared_with(id, p, &WceOptions::default())
}

pub fn wce_squared_with(id: KernelId, p: &PointSet, opts: &WceOptions) -> Result<WceResult> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mode = opts.resolve(p.len());
    let run = || match mode {
        Mode::Exact => engine::exact(id, p),
        Mode::Fixed60 => fixed::squared(id, p),
        Mode::Auto => unreachable!("resolved above"),
    };
    let squared = match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let squared = if squared.is_negative() {
        if mode == Mode::Exact {
            return Err(Error::Invariant(format!("negative squared error {squared}")));
        }
        // Within the fixed-point error bound of an exact zero.
        Rational::zero()
    } else {
        squared
    };
    Ok(WceResult {
        error_digits: sqrt_to_digits(&squared, opts.digits)?,
        squared_error: squared,
        kernel: id,
        n: p.len(),
        d: p.dim(),
        mode,
    })
}

/// Direct evaluation of the worst-case error formula with generic rational
/// arithmetic and no symmetry or integer tricks.
pub fn wce_squared_reference(id: KernelId, p: &PointSet) -> Result<Rational> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let n = Rational::from_integer(p.len().into());
    let mut pair = Rational::zero();
    for x in p.points() {
        for y in p.points() {
            pair += kernel_tensor(id, x, y)?;
        }
    }
    let single: Rational = p
        .points()
        .iter()
        .map(|x| x.iter().fold(Rational::one(), |acc, xi| acc * kernel_mean(id, xi)))
        .sum();
    let d = p.dim() as i32;
    let c = num_traits::pow::pow(kernel_double_integral(id), d as usize);
    Ok(c - int(2) * single / &n + pair / (&n * &n))
}
