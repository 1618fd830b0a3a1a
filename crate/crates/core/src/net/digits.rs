use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

use super::PointSet;
use crate::exact::{dyadic_numerator, format_fraction, pow2, Rational};
use crate::{Error, Result};

/// Binary digits `eta_1..eta_n` of a coordinate in `[0,1)` with at most `n`
/// digits, as the integer `sum eta_l 2^(n-l)`.
pub(crate) fn digit_word(q: &Rational, n: u32) -> Result<u128> {
    if n > 128 {
        return Err(Error::InvalidArgument(format!("{n} digits exceed 128")));
    }
    let num = dyadic_numerator(q, n)?;
    num.to_u128()
        .filter(|&w| n == 128 || w < 1u128 << n)
        .ok_or_else(|| Error::NonDyadic(format_fraction(q)))
}

pub(crate) fn from_digit_word(word: u128, n: u32) -> Rational {
    Rational::new(
        BigInt::from(word),
        BigInt::from(BigUint::from(1u8) << n),
    )
}

/// Interlaces groups of `alpha` consecutive coordinates digit by digit.
///
/// Output coordinate `i` carries digit `l` of input `(i-1)*alpha + s` at
/// position `(l-1)*alpha + s`, giving `alpha*n` digits.
pub fn interlace(p: &PointSet, alpha: usize, n: u32) -> Result<PointSet> {
    if alpha == 0 || !p.dim().is_multiple_of(alpha) {
        return Err(Error::InvalidArgument(format!(
            "dimension {} is not divisible by alpha={alpha}",
            p.dim()
        )));
    }
    let a = alpha as u32;
    let total = a * n;
    if total > 128 {
        return Err(Error::InvalidArgument(format!(
            "interlaced coordinates would need {total} > 128 digits"
        )));
    }
    let mut points = Vec::with_capacity(p.len());
    for pt in p.points() {
        let words = pt.iter().map(|q| digit_word(q, n)).collect::<Result<Vec<_>>>()?;
        let out = words
            .chunks(alpha)
            .map(|group| {
                let mut y: u128 = 0;
                for l in 0..n {
                    for (s, w) in group.iter().enumerate() {
                        let bit = (w >> (n - 1 - l)) & 1;
                        let pos = l * a + s as u32; // zero-based digit position
                        y |= bit << (total - 1 - pos);
                    }
                }
                from_digit_word(y, total)
            })
            .collect();
        points.push(out);
    }
    PointSet::new(
        p.dim() / alpha,
        points,
        format!("interlace{alpha}({})", p.label()),
    )
}

/// Keeps the first `n` binary digits of every coordinate: `floor(2^n x) / 2^n`.
pub fn truncate_digits(p: &PointSet, n: u32) -> PointSet {
    let scale = pow2(n as i32);
    let inv = pow2(-(n as i32));
    p.map_unchecked(format!("trunc{n}({})", p.label()), |pt| {
        pt.iter().map(|q| (q * &scale).floor() * &inv).collect()
    })
}

/// Turns the first `2^n` points of a `(d-1)`-dimensional digital sequence
/// into a `d`-dimensional net by truncating to `n` digits and appending
/// `k / 2^n`.
pub fn sequence_to_net(p: &PointSet, n: u32) -> Result<PointSet> {
    let expected = 1usize << n;
    if p.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: p.len(),
        });
    }
    let truncated = truncate_digits(p, n);
    let points = truncated
        .into_points()
        .into_iter()
        .enumerate()
        .map(|(k, mut pt)| {
            pt.push(Rational::new(BigInt::from(k), BigInt::from(expected)));
            pt
        })
        .collect();
    PointSet::new(p.dim() + 1, points, format!("seq2net{n}({})", p.label()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn ps(points: Vec<Vec<Rational>>) -> PointSet {
        let d = points[0].len();
        PointSet::new(d, points, "t").unwrap()
    }

    #[test]
    fn interlace_examples() {
        let p = ps(vec![vec![rat(1, 2), rat(1, 2)]]);
        assert_eq!(interlace(&p, 2, 1).unwrap().points()[0], vec![rat(3, 4)]);
        let p = ps(vec![vec![rat(1, 2), rat(0, 1)]]);
        assert_eq!(interlace(&p, 2, 1).unwrap().points()[0], vec![rat(1, 2)]);
        let p = ps(vec![vec![rat(3, 8), rat(5, 8)]]);
        assert_eq!(interlace(&p, 1, 3).unwrap().points(), p.points());
    }

    #[test]
    fn interlace_errors() {
        let p = ps(vec![vec![rat(1, 3), rat(0, 1)]]);
        assert!(matches!(interlace(&p, 2, 4), Err(Error::NonDyadic(_))));
        let p = ps(vec![vec![rat(1, 2), rat(1, 2), rat(1, 2)]]);
        assert!(interlace(&p, 2, 1).is_err());
        // too many digits for the declared n
        let p = ps(vec![vec![rat(1, 8), rat(0, 1)]]);
        assert!(interlace(&p, 2, 2).is_err());
    }

    #[test]
    fn truncate_examples() {
        let p = ps(vec![vec![rat(7, 10)], vec![rat(3, 8)], vec![rat(1, 3)]]);
        let t2 = truncate_digits(&p, 2);
        assert_eq!(t2.points()[0][0], rat(1, 2));
        assert_eq!(truncate_digits(&p, 3).points()[1][0], rat(3, 8));
        assert_eq!(t2.points()[2][0], rat(1, 4));
    }

    #[test]
    fn sequence_to_net_examples() {
        let p = ps(vec![vec![rat(0, 1)], vec![rat(1, 2)]]);
        let net = sequence_to_net(&p, 1).unwrap();
        assert_eq!(
            net.points(),
            &[vec![rat(0, 1), rat(0, 1)], vec![rat(1, 2), rat(1, 2)]]
        );
        let p = ps(vec![vec![rat(0, 1)], vec![rat(1, 2)], vec![rat(1, 4)]]);
        assert!(sequence_to_net(&p, 2).is_err());
    }
}
