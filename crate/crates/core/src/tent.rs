//! The tent transform `x -> |2x - 1|` on points, on functions and on Faber
//! coefficients.

use num_traits::{One, Signed};

use crate::exact::{int, Rational};
use crate::faber::{FaberCoefficients, LevelIndex, NonPeriodic, Periodic};
use crate::net::PointSet;
use crate::{Error, Result};

fn tent(y: &Rational) -> Result<Rational> {
    if y.is_negative() || *y > Rational::one() {
        return Err(Error::OutOfRange(format!("{y} not in [0, 1]")));
    }
    Ok((int(2) * y - int(1)).abs())
}

/// Coordinatewise `|2 y_i - 1|`.
pub fn tent_point(y: &[Rational]) -> Result<Vec<Rational>> {
    y.iter().map(tent).collect()
}

/// Image of every point under the tent map, keeping order and multiplicity.
pub fn tent_pullback(p: &PointSet) -> PointSet {
    // Coordinates of a valid point set already lie in [0, 1].
    p.map_unchecked(format!("tent({})", p.label()), |y| {
        y.iter().map(|c| (int(2) * c - int(1)).abs()).collect()
    })
}

/// `f(|2x_1 - 1|, ..., |2x_d - 1|)`.
pub fn tent_compose<F>(f: F) -> impl Fn(&[Rational]) -> Result<Rational> + Sync
where
    F: Fn(&[Rational]) -> Result<Rational> + Sync,
{
    move |x| f(&tent_point(x)?)
}

/// Periodic Faber coefficients of `f o tent`, complete to level `level + 1`,
/// from the nonperiodic coefficients of `f`, complete to `level`.
///
/// Per coordinate, `R v_{-1,0} = v_{0,0}`, `R v_{-1,1} = v_{-1,0} - v_{0,0}`
/// and `R v_{j,k} = v_{j+1, 2^j + k} + v_{j+1, 2^j - k - 1}` for `j >= 0`.
pub fn tent_coefficient_map(
    c: &FaberCoefficients<NonPeriodic>,
    level: i32,
) -> Result<FaberCoefficients<Periodic>> {
    if c.max_level() < level {
        return Err(Error::IncompleteCoefficients { requested: level, available: c.max_level() });
    }
    let dim = c.dim();
    let mut out = FaberCoefficients::<Periodic>::new(dim, level + 1)?;
    for (idx, value) in c.entries() {
        if idx.j.iter().any(|&j| j > level) {
            continue;
        }
        // Tensor product of the univariate images.
        let factors: Vec<Vec<(i32, i64, i64)>> =
            idx.j.iter().zip(&idx.k).map(|(&j, &k)| image(j, k)).collect();
        let mut choice = vec![0usize; dim];
        loop {
            let mut j = Vec::with_capacity(dim);
            let mut k = Vec::with_capacity(dim);
            let mut sign = 1i64;
            for (f, &ch) in factors.iter().zip(&choice) {
                let (jj, kk, s) = f[ch];
                j.push(jj);
                k.push(kk);
                sign *= s;
            }
            out.add(LevelIndex { j, k }, value * int(sign));
            let Some(pos) = (0..dim).rev().find(|&i| choice[i] + 1 < factors[i].len()) else {
                break;
            };
            choice[pos] += 1;
            for ch in &mut choice[pos + 1..] {
                *ch = 0;
            }
        }
    }
    Ok(out)
}

fn image(j: i32, k: i64) -> Vec<(i32, i64, i64)> {
    match (j, k) {
        (-1, 0) => vec![(0, 0, 1)],
        (-1, _) => vec![(-1, 0, 1), (0, 0, -1)],
        (j, k) => {
            let half = 1i64 << j;
            vec![(j + 1, half + k, 1), (j + 1, half - k - 1, 1)]
        }
    }
}
