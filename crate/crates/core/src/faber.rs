//! Faber-Schauder hierarchical hat bases on `[0,1]^d` and on the torus,
//! coefficients from second differences, reconstruction and dyadic
//! sequence-space norms.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::exact::{int, pow2, Rational};
use crate::{Error, Result};

/// Largest level accepted by [`analyze`].
pub const MAX_ANALYSIS_LEVEL: i32 = 20;

/// Largest number of samples [`analyze`] takes.
pub const MAX_SAMPLES: usize = 1 << 24;

/// Distinguishes the index sets of the nonperiodic and periodic bases.
pub trait Domain: Copy + Default + fmt::Debug + Send + Sync + 'static {
    const PERIODIC: bool;
    const NAME: &'static str;
}

/// `[0,1]`: level `-1` has the two boundary hats `1 - x` and `x`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NonPeriodic;

/// The torus: level `-1` is the constant function only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Periodic;

impl Domain for NonPeriodic {
    const PERIODIC: bool = false;
    const NAME: &'static str = "nonperiodic";
}

impl Domain for Periodic {
    const PERIODIC: bool = true;
    const NAME: &'static str = "periodic";
}

/// Number of translations at level `j`.
pub fn level_size<D: Domain>(j: i32) -> i64 {
    match j {
        -1 if D::PERIODIC => 1,
        -1 => 2,
        j => 1 << j,
    }
}

fn check_index<D: Domain>(j: i32, k: i64) -> Result<()> {
    if !(-1..=62).contains(&j) || k < 0 || k >= level_size::<D>(j) {
        return Err(Error::InvalidIndex { j, k });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelIndex {
    pub j: Vec<i32>,
    pub k: Vec<i64>,
}

impl LevelIndex {
    pub fn new(j: Vec<i32>, k: Vec<i64>) -> Result<Self> {
        if j.len() != k.len() || j.is_empty() {
            return Err(Error::DimensionMismatch { expected: j.len(), found: k.len() });
        }
        Ok(Self { j, k })
    }

    pub fn dim(&self) -> usize {
        self.j.len()
    }

    /// `|j|_1 = sum j_i`, with level `-1` counting as `-1`.
    pub fn level_sum(&self) -> i64 {
        self.j.iter().map(|&j| i64::from(j)).sum()
    }
}

/// Sparse coefficient table, complete up to level `max_level` in every
/// coordinate. Zero coefficients are not stored.
#[derive(Clone, Debug)]
pub struct FaberCoefficients<D: Domain> {
    dim: usize,
    max_level: i32,
    entries: BTreeMap<LevelIndex, Rational>,
    kind: PhantomData<D>,
}

impl<D: Domain> PartialEq for FaberCoefficients<D> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.max_level == other.max_level && self.entries == other.entries
    }
}

impl<D: Domain> FaberCoefficients<D> {
    pub fn new(dim: usize, max_level: i32) -> Result<Self> {
        if dim == 0 || max_level < -1 {
            return Err(Error::InvalidArgument(format!(
                "need d >= 1 and level >= -1, got d={dim}, J={max_level}"
            )));
        }
        Ok(Self { dim, max_level, entries: BTreeMap::new(), kind: PhantomData })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_level(&self) -> i32 {
        self.max_level
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<LevelIndex, Rational> {
        &self.entries
    }

    fn validate(&self, idx: &LevelIndex) -> Result<()> {
        if idx.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: idx.dim() });
        }
        for (&j, &k) in idx.j.iter().zip(&idx.k) {
            check_index::<D>(j, k)?;
            if j > self.max_level {
                return Err(Error::OutOfRange(format!(
                    "level {j} above the table's level {}",
                    self.max_level
                )));
            }
        }
        Ok(())
    }

    /// Sets a coefficient; zero removes the entry.
    pub fn set(&mut self, idx: LevelIndex, value: Rational) -> Result<()> {
        self.validate(&idx)?;
        if value.is_zero() {
            self.entries.remove(&idx);
        } else {
            self.entries.insert(idx, value);
        }
        Ok(())
    }

    pub(crate) fn add(&mut self, idx: LevelIndex, value: Rational) {
        let sum = self.entries.remove(&idx).unwrap_or_else(Rational::zero) + value;
        if !sum.is_zero() {
            self.entries.insert(idx, sum);
        }
    }

    pub fn get(&self, idx: &LevelIndex) -> Rational {
        self.entries.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    /// CSV with columns `j1..jd,k1..kd,numerator,denominator`, one row per
    /// nonzero coefficient in index order.
    pub fn to_csv(&self) -> String {
        let mut header: Vec<String> = (1..=self.dim).map(|i| format!("j{i}")).collect();
        header.extend((1..=self.dim).map(|i| format!("k{i}")));
        header.push("numerator".into());
        header.push("denominator".into());
        let mut out = header.join(",");
        out.push('\n');
        for (idx, v) in &self.entries {
            let cells: Vec<String> = idx
                .j
                .iter()
                .map(i32::to_string)
                .chain(idx.k.iter().map(i64::to_string))
                .chain([v.numer().to_string(), v.denom().to_string()])
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Univariate hat `v_{j,k}(x)`; `v_{-1,k}(x) = (1 - |x - k|)_+` and for
/// `j >= 0` the hat of height 1 supported on `[2^-j k, 2^-j (k+1)]`.
/// Periodic hats reduce `x` modulo 1.
pub fn faber_hat<D: Domain>(j: i32, k: i64, x: &Rational) -> Result<Rational> {
    check_index::<D>(j, k)?;
    let x = if D::PERIODIC {
        x - x.floor()
    } else {
        if x.is_negative() || *x > Rational::one() {
            return Err(Error::OutOfRange(format!("{x} not in [0, 1]")));
        }
        x.clone()
    };
    Ok(hat_unchecked::<D>(j, k, &x))
}

fn hat_unchecked<D: Domain>(j: i32, k: i64, x: &Rational) -> Rational {
    if j == -1 {
        if D::PERIODIC {
            return Rational::one();
        }
        return (Rational::one() - (x - int(k)).abs()).max(Rational::zero());
    }
    // 1 - |2^(j+1) x - 2k - 1|, clipped at zero.
    let s = x * pow2(j + 1) - int(2 * k + 1);
    (Rational::one() - s.abs()).max(Rational::zero())
}

/// `prod_i v_{j_i,k_i}(x_i)`.
pub fn faber_tensor<D: Domain>(idx: &LevelIndex, x: &[Rational]) -> Result<Rational> {
    if idx.dim() != x.len() {
        return Err(Error::DimensionMismatch { expected: idx.dim(), found: x.len() });
    }
    idx.j
        .iter()
        .zip(&idx.k)
        .zip(x)
        .try_fold(Rational::one(), |acc, ((&j, &k), xi)| Ok(acc * faber_hat::<D>(j, k, xi)?))
}

/// Position of `(j, k)` in a transformed fiber.
fn slot<D: Domain>(j: i32, k: i64) -> usize {
    let base = if D::PERIODIC { 1 } else { 2 };
    match j {
        -1 => k as usize,
        j => base + (1usize << j) - 1 + k as usize,
    }
}

fn unslot<D: Domain>(s: usize) -> (i32, i64) {
    let base = if D::PERIODIC { 1 } else { 2 };
    if s < base {
        return (-1, s as i64);
    }
    let r = s - base + 1;
    let j = usize::BITS - 1 - r.leading_zeros();
    (j as i32, (r - (1 << j)) as i64)
}

/// Maps the samples `v[i] = f(i / 2^(J+1))` of one fiber to its coefficients.
fn transform_fiber<D: Domain>(v: &[Rational], level: i32) -> Vec<Rational> {
    let m = 1usize << (level + 1);
    let at = |i: usize| if D::PERIODIC && i == m { &v[0] } else { &v[i] };
    let mut out = vec![Rational::zero(); v.len()];
    out[0] = v[0].clone();
    if !D::PERIODIC {
        out[1] = v[m].clone();
    }
    let two = int(2);
    for j in 0..=level {
        let step = 1usize << (level - j);
        for k in 0..1usize << j {
            let i0 = 2 * k * step;
            // -1/2 of the second difference with step 2^(-j-1).
            let diff = at(i0 + 2 * step) - &two * at(i0 + step) + at(i0);
            out[slot::<D>(j, k as i64)] = -diff / &two;
        }
    }
    out
}

/// Coefficients `d_{j,k}(f)` for every `|j|_inf <= level`, from samples of
/// `f` on the grid of spacing `2^-(level+1)`. Periodic analysis wraps sample
/// points modulo 1.
pub fn analyze<D, F>(f: F, dim: usize, level: i32) -> Result<FaberCoefficients<D>>
where
    D: Domain,
    F: Fn(&[Rational]) -> Result<Rational> + Sync,
{
    let mut out = FaberCoefficients::<D>::new(dim, level)?;
    if level > MAX_ANALYSIS_LEVEL {
        return Err(Error::BudgetExceeded(format!(
            "level {level} above {MAX_ANALYSIS_LEVEL}"
        )));
    }
    let m = 1usize << (level + 1);
    let len = if D::PERIODIC { m } else { m + 1 };
    let total = (0..dim).try_fold(1usize, |acc, _| acc.checked_mul(len).filter(|&t| t <= MAX_SAMPLES));
    let Some(total) = total else {
        return Err(Error::BudgetExceeded(format!(
            "{len}^{dim} samples exceed {MAX_SAMPLES}"
        )));
    };
    let denom = BigInt::from(m);
    let point = |mut flat: usize| {
        let mut x = vec![Rational::zero(); dim];
        for xi in x.iter_mut().rev() {
            *xi = Rational::new(BigInt::from(flat % len), denom.clone());
            flat /= len;
        }
        x
    };
    let mut data = (0..total)
        .into_par_iter()
        .map(|flat| f(&point(flat)))
        .collect::<Result<Vec<_>>>()?;

    // Separable transform, one axis at a time.
    for axis in 0..dim {
        let stride = len.pow((dim - 1 - axis) as u32);
        for start in 0..total {
            if (start / stride) % len != 0 {
                continue;
            }
            let fiber: Vec<Rational> = (0..len).map(|i| data[start + i * stride].clone()).collect();
            for (i, c) in transform_fiber::<D>(&fiber, level).into_iter().enumerate() {
                data[start + i * stride] = c;
            }
        }
    }

    for (flat, value) in data.into_iter().enumerate() {
        if value.is_zero() {
            continue;
        }
        let mut rest = flat;
        let mut j = vec![0; dim];
        let mut k = vec![0; dim];
        for axis in (0..dim).rev() {
            (j[axis], k[axis]) = unslot::<D>(rest % len);
            rest /= len;
        }
        out.entries.insert(LevelIndex { j, k }, value);
    }
    Ok(out)
}

/// `sum d_{j,k} v_{j,k}(x)` over the stored coefficients.
pub fn reconstruct<D: Domain>(c: &FaberCoefficients<D>, x: &[Rational]) -> Result<Rational> {
    if x.len() != c.dim {
        return Err(Error::DimensionMismatch { expected: c.dim, found: x.len() });
    }
    c.entries
        .iter()
        .try_fold(Rational::zero(), |acc, (idx, v)| Ok(acc + v * faber_tensor::<D>(idx, x)?))
}

/// Per-level values of a truncated dyadic norm with the level of attainment
/// of the supremum.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelReport {
    /// Every level vector with entries in `-1..=max_level`.
    pub levels: BTreeMap<Vec<i32>, Rational>,
    pub sup: Rational,
    /// First level vector (in lexicographic order) attaining `sup`.
    pub argmax: Vec<i32>,
    pub max_level: i32,
}

fn level_report<D: Domain>(
    c: &FaberCoefficients<D>,
    weight: impl Fn(i64) -> Rational,
    term: impl Fn(&Rational) -> Rational,
) -> LevelReport {
    let mut sums: BTreeMap<Vec<i32>, Rational> = BTreeMap::new();
    let mut j = vec![-1; c.dim];
    loop {
        sums.insert(j.clone(), Rational::zero());
        let Some(pos) = j.iter().rposition(|&x| x < c.max_level) else { break };
        j[pos] += 1;
        for x in &mut j[pos + 1..] {
            *x = -1;
        }
    }
    for (idx, v) in &c.entries {
        *sums.get_mut(&idx.j).expect("level within table") += term(v);
    }
    let levels: BTreeMap<Vec<i32>, Rational> = sums
        .into_iter()
        .map(|(j, s)| {
            let w = weight(j.iter().map(|&x| i64::from(x)).sum());
            (j, s * w)
        })
        .collect();
    let (argmax, sup) = levels
        .iter()
        .fold(None::<(&Vec<i32>, &Rational)>, |best, (j, v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((j, v)),
        })
        .map(|(j, v)| (j.clone(), v.clone()))
        .expect("at least one level");
    LevelReport { levels, sup, argmax, max_level: c.max_level }
}

/// Squared dyadic `H^2` quantities `2^(3|j|_1) sum_k d_{j,k}^2` per level.
pub fn dyadic_h2_norm<D: Domain>(c: &FaberCoefficients<D>) -> LevelReport {
    level_report(c, |s| pow2((3 * s) as i32), |v| v * v)
}

/// `2^|j|_1 sum_k |d_{j,k}|` per level.
pub fn besov_1inf_norm<D: Domain>(c: &FaberCoefficients<D>) -> LevelReport {
    level_report(c, |s| pow2(s as i32), |v| v.abs())
}
