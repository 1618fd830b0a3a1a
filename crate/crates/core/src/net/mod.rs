//! Digital nets in base 2: generator matrices, point generation, digit
//! interlacing and certification of the quality parameter `t`.

mod digits;
mod points;
mod quality;

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;

use crate::exact::{BitMatrix, Rational};
use crate::{Error, Result};

pub use digits::{interlace, sequence_to_net, truncate_digits};

pub(crate) mod digits_api {
    pub(crate) use super::digits::{digit_word, from_digit_word};
}
pub use points::PointSet;
pub use quality::{interlaced_t_bound, minimal_t, minimal_t_with_budget, DEFAULT_T_BUDGET};

/// Largest digit count `n` for which [`net_points`] will materialize `2^n` points.
pub const MAX_POINT_DIGITS: usize = 26;

/// `d` generator matrices of shape `(alpha * n) x n` over GF(2).
///
/// Row `j` (zero based) of `matrices[i]` produces binary digit `j + 1` of
/// coordinate `i`; column `c` multiplies digit `c` of the point index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMatrixSet {
    n: usize,
    alpha: usize,
    matrices: Vec<BitMatrix>,
}

impl GeneratorMatrixSet {
    pub fn new(alpha: usize, matrices: Vec<BitMatrix>) -> Result<Self> {
        if alpha == 0 {
            return Err(Error::MalformedMatrix("alpha must be at least 1".into()));
        }
        let Some(first) = matrices.first() else {
            return Err(Error::MalformedMatrix("need at least one matrix".into()));
        };
        let n = first.cols();
        for (i, m) in matrices.iter().enumerate() {
            if m.cols() != n || m.rows() != alpha * n {
                return Err(Error::MalformedMatrix(format!(
                    "matrix {} has shape {}x{}, expected {}x{}",
                    i + 1,
                    m.rows(),
                    m.cols(),
                    alpha * n,
                    n
                )));
            }
        }
        Ok(Self { n, alpha, matrices })
    }

    pub fn dim(&self) -> usize {
        self.matrices.len()
    }

    pub fn digits(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn matrices(&self) -> &[BitMatrix] {
        &self.matrices
    }

    /// Net of the first `2^n` points: the leading `alpha*n` rows and `n` columns.
    ///
    /// For interlaced matrices this equals interlacing the leading blocks of
    /// the underlying order-1 matrices.
    pub fn leading(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.n {
            return Err(Error::InvalidArgument(format!(
                "leading block n={n} must lie in 1..={}",
                self.n
            )));
        }
        let matrices = self
            .matrices
            .iter()
            .map(|m| m.submatrix(self.alpha * n, n))
            .collect::<Result<_>>()?;
        Self::new(self.alpha, matrices)
    }

    /// The first `d` matrices.
    pub fn take_dims(&self, d: usize) -> Result<Self> {
        if d == 0 || d > self.dim() {
            return Err(Error::InvalidArgument(format!(
                "cannot take {d} of {} dimensions",
                self.dim()
            )));
        }
        Self::new(self.alpha, self.matrices[..d].to_vec())
    }

    /// Digit interlacing at the matrix level: dimension `alpha*d` order-1
    /// matrices become `d` matrices with `alpha*n` rows, where row
    /// `(l-1)*alpha + s` of output `i` is row `l` of input `(i-1)*alpha + s`.
    pub fn interlace(&self, alpha: usize) -> Result<Self> {
        if self.alpha != 1 {
            return Err(Error::MalformedMatrix(
                "interlacing requires order-1 input matrices".into(),
            ));
        }
        if alpha == 0 || !self.dim().is_multiple_of(alpha) {
            return Err(Error::InvalidArgument(format!(
                "dimension {} is not divisible by alpha={alpha}",
                self.dim()
            )));
        }
        let n = self.n;
        let mut out = Vec::with_capacity(self.dim() / alpha);
        for group in self.matrices.chunks(alpha) {
            let mut m = BitMatrix::zeros(alpha * n, n)?;
            for l in 0..n {
                for (s, src) in group.iter().enumerate() {
                    for c in 0..n {
                        m.set(l * alpha + s, c, src.get(l, c));
                    }
                }
            }
            out.push(m);
        }
        Self::new(alpha, out)
    }

    /// Parses the text format: a header line `d n alpha`, then for each
    /// matrix `alpha*n` lines of `n` characters from `{0,1}`. Blank lines and
    /// `#` comments may appear between matrices only.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
        let skippable = |l: &str| l.trim().is_empty() || l.trim_start().starts_with('#');
        let (hline, header) = lines
            .by_ref()
            .find(|(_, l)| !skippable(l))
            .ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let fields: Vec<usize> = header
            .split_whitespace()
            .map(|f| f.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: hline, msg: format!("bad header: {e}") })?;
        let [d, n, alpha] = fields[..] else {
            return Err(Error::Parse {
                line: hline,
                msg: "header must be 'd n alpha'".into(),
            });
        };
        if d == 0 || n == 0 || alpha == 0 {
            return Err(Error::Parse { line: hline, msg: "d, n and alpha must be positive".into() });
        }
        let rows = alpha * n;
        let mut matrices = Vec::with_capacity(d);
        for _ in 0..d {
            let mut m = BitMatrix::zeros(rows, n)?;
            let mut r = 0;
            while r < rows {
                let (ln, line) = lines.next().ok_or(Error::Parse {
                    line: hline,
                    msg: format!("file ends inside matrix {}", matrices.len() + 1),
                })?;
                if r == 0 && skippable(line) {
                    continue;
                }
                if line.len() != n || !line.bytes().all(|b| b == b'0' || b == b'1') {
                    return Err(Error::Parse {
                        line: ln,
                        msg: format!("expected exactly {n} characters from {{0,1}}"),
                    });
                }
                for (c, b) in line.bytes().enumerate() {
                    m.set(r, c, b - b'0');
                }
                r += 1;
            }
            matrices.push(m);
        }
        if let Some((ln, _)) = lines.find(|(_, l)| !skippable(l)) {
            return Err(Error::Parse { line: ln, msg: "trailing content after last matrix".into() });
        }
        Self::new(alpha, matrices)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.dim(), self.n, self.alpha);
        for (i, m) in self.matrices.iter().enumerate() {
            let _ = writeln!(s, "# matrix {}", i + 1);
            for r in 0..m.rows() {
                s.extend((0..m.cols()).map(|c| char::from(b'0' + m.get(r, c))));
                s.push('\n');
            }
        }
        s
    }
}

/// The `2^n` points of the digital net, in index order `k = 0, ..., 2^n - 1`.
///
/// Coordinate `i` of point `k` is `sum_j kappa_j 2^-j` with `kappa = C_i k`
/// over GF(2), `k` read as its little-endian digit vector.
pub fn net_points(g: &GeneratorMatrixSet) -> Result<PointSet> {
    let n = g.digits();
    if n > MAX_POINT_DIGITS {
        return Err(Error::BudgetExceeded(format!(
            "2^{n} points exceed the limit of 2^{MAX_POINT_DIGITS}"
        )));
    }
    let m = g.alpha() * n;
    let denom = BigInt::from(BigUint::from(1u8) << m);
    // Columns never exceed MAX_POINT_DIGITS, so each row is a single word.
    let rows: Vec<Vec<u64>> = g
        .matrices()
        .iter()
        .map(|c| (0..c.rows()).map(|r| c.row_words(r)[0]).collect())
        .collect();
    let points: Vec<Vec<Rational>> = (0..1u64 << n)
        .into_par_iter()
        .map(|k| {
            rows.iter()
                .map(|mat| {
                    let mut num = BigUint::default();
                    for (j, row) in mat.iter().enumerate() {
                        if (row & k).count_ones() & 1 == 1 {
                            num.set_bit((m - 1 - j) as u64, true);
                        }
                    }
                    Rational::new(BigInt::from(num), denom.clone())
                })
                .collect()
        })
        .collect();
    PointSet::new(
        g.dim(),
        points,
        format!("net(d={},n={n},alpha={})", g.dim(), g.alpha()),
    )
}
