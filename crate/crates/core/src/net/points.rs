use std::fmt::Write as _;

use num_traits::{One, Signed};

use crate::exact::{format_fraction, parse_rational, Rational};
use crate::{Error, Result};

/// Ordered multiset of points in `[0,1]^d` with exact coordinates.
///
/// Order is part of the contract: constructions emit points in generation
/// order and every transform preserves it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Vec<Rational>>,
    label: String,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Vec<Rational>>, label: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if let Some(bad) = p.iter().find(|q| q.is_negative() || **q > Rational::one()) {
                return Err(Error::OutOfRange(format!(
                    "coordinate {} outside [0,1]",
                    format_fraction(bad)
                )));
            }
        }
        Ok(Self {
            dim,
            points,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vec<Rational>> {
        self.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Coordinate-wise map that is known to stay inside `[0,1]`.
    pub(crate) fn map_unchecked(
        &self,
        label: String,
        f: impl Fn(&[Rational]) -> Vec<Rational>,
    ) -> Self {
        Self {
            dim: self.dim,
            points: self.points.iter().map(|p| f(p)).collect(),
            label,
        }
    }

    /// CSV with header `k,x1,...,xd`; coordinates are exact fractions `p/q`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k");
        for i in 1..=self.dim {
            let _ = write!(s, ",x{i}");
        }
        s.push('\n');
        for (k, p) in self.points.iter().enumerate() {
            let _ = write!(s, "{k}");
            for q in p {
                let _ = write!(s, ",{}", format_fraction(q));
            }
            s.push('\n');
        }
        s
    }

    /// Reads the format written by [`PointSet::to_csv`]. A header line is
    /// detected by its first field not being an integer.
    pub fn from_csv(text: &str, label: impl Into<String>) -> Result<Self> {
        let mut dim = None;
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if i == 0 && fields[0].parse::<u64>().is_err() {
                continue;
            }
            let coords = fields[1..]
                .iter()
                .map(|f| parse_rational(f))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                })?;
            match dim {
                None => dim = Some(coords.len()),
                Some(d) if d != coords.len() => {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: format!("expected {d} coordinates"),
                    })
                }
                _ => {}
            }
            points.push(coords);
        }
        let dim = dim.ok_or(Error::EmptyPointSet)?;
        Self::new(dim, points, label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn rejects_out_of_range_and_ragged() {
        assert!(PointSet::new(1, vec![vec![rat(3, 2)]], "").is_err());
        assert!(PointSet::new(1, vec![vec![rat(-1, 2)]], "").is_err());
        assert!(PointSet::new(2, vec![vec![rat(1, 2)]], "").is_err());
        assert!(PointSet::new(0, vec![], "").is_err());
        assert!(PointSet::new(1, vec![vec![rat(1, 1)], vec![rat(0, 1)]], "").is_ok());
    }

    #[test]
    fn csv_round_trip() {
        let p = PointSet::new(2, vec![vec![rat(1, 3), rat(0, 1)], vec![rat(1, 1), rat(5, 8)]], "t")
            .unwrap();
        let csv = p.to_csv();
        assert_eq!(csv, "k,x1,x2\n0,1/3,0\n1,1,5/8\n");
        assert_eq!(PointSet::from_csv(&csv, "t").unwrap(), p);
    }
}
