use crate::{Error, Result};

/// A vector over GF(2) packed into 64-bit words, bit `i` of the vector being
/// bit `i % 64` of word `i / 64`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b & 1);
        }
        v
    }

    /// The first `len` bits of `word`.
    pub fn from_word(word: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        Self {
            len,
            words: vec![word & mask],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> u8 {
        debug_assert!(i < self.len);
        ((self.words[i / 64] >> (i % 64)) & 1) as u8
    }

    pub fn set(&mut self, i: usize, bit: u8) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if bit & 1 == 1 {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }
}

/// GF(2) rank of a list of equal-length bit vectors.
pub fn rank_gf2(rows: &[BitVector]) -> Result<usize> {
    let Some(first) = rows.first() else {
        return Ok(0);
    };
    let n = first.len();
    if n == 0 {
        return Err(Error::InvalidArgument("bit vectors must have length >= 1".into()));
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            found: bad.len(),
        });
    }
    if n <= 64 {
        let mut words: Vec<u64> = rows.iter().map(|r| r.words[0]).collect();
        return Ok(rank_words(&mut words));
    }
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.words.clone()).collect();
    let mut rank = 0;
    for col in 0..n {
        let (w, b) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..m.len()).find(|&r| m[r][w] & b != 0) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if row[w] & b != 0 {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    Ok(rank)
}

/// Rank of single-word rows via an XOR basis keyed by leading bit.
///
/// The slice is used as scratch space and left in an unspecified state.
pub fn rank_words(rows: &mut [u64]) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for v in rows.iter_mut() {
        let mut x = *v;
        while x != 0 {
            let top = 63 - x.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = x;
                rank += 1;
                break;
            }
            x ^= basis[top];
        }
        *v = x;
    }
    rank
}

/// Dense row-major matrix over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::MalformedMatrix(format!(
                "matrix shape {rows}x{cols} must be at least 1x1"
            )));
        }
        let words_per_row = cols.div_ceil(64);
        Ok(Self {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    /// Anti-diagonal permutation: row `j` has its one in column `n - 1 - j`.
    pub fn reversal(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, n - 1 - i, 1);
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[BitVector]) -> Result<Self> {
        let cols = rows.first().map_or(0, BitVector::len);
        let mut m = Self::zeros(rows.len(), cols)?;
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            m.row_words_mut(r).copy_from_slice(row.words());
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        ((self.bits[r * self.words_per_row + c / 64] >> (c % 64)) & 1) as u8
    }

    pub fn set(&mut self, r: usize, c: usize, bit: u8) {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        let w = &mut self.bits[r * self.words_per_row + c / 64];
        let mask = 1u64 << (c % 64);
        if bit & 1 == 1 {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.bits[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    /// Leading `rows x cols` block.
    pub fn submatrix(&self, rows: usize, cols: usize) -> Result<Self> {
        if rows > self.rows || cols > self.cols {
            return Err(Error::MalformedMatrix(format!(
                "cannot take {rows}x{cols} block of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let mut m = Self::zeros(rows, cols)?;
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, self.get(r, c));
            }
        }
        Ok(m)
    }

    /// Matrix-vector product over GF(2); `v` must have `cols` bits.
    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            let parity = self
                .row_words(r)
                .iter()
                .zip(v.words())
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1;
            out.set(r, parity as u8);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_rank(rows: &[Vec<u8>]) -> usize {
        let mut m: Vec<Vec<u8>> = rows.to_vec();
        let n = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..n {
            if let Some(p) = (rank..m.len()).find(|&r| m[r][col] == 1) {
                m.swap(rank, p);
                let pivot = m[rank].clone();
                for (r, row) in m.iter_mut().enumerate() {
                    if r != rank && row[col] == 1 {
                        for (a, b) in row.iter_mut().zip(&pivot) {
                            *a ^= b;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn xor_of_two_rows_is_dependent() {
        let rows = [
            BitVector::from_bits(&[1, 0, 0]),
            BitVector::from_bits(&[0, 1, 0]),
            BitVector::from_bits(&[1, 1, 0]),
        ];
        assert_eq!(rank_gf2(&rows).unwrap(), 2);
    }

    #[test]
    fn identity_has_full_rank() {
        let m = BitMatrix::identity(3).unwrap();
        let rows: Vec<_> = (0..3).map(|r| m.row(r)).collect();
        assert_eq!(rank_gf2(&rows).unwrap(), 3);
    }

    #[test]
    fn empty_list_has_rank_zero() {
        assert_eq!(rank_gf2(&[]).unwrap(), 0);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let rows = [BitVector::zeros(3), BitVector::zeros(4)];
        assert!(matches!(
            rank_gf2(&rows),
            Err(Error::LengthMismatch { expected: 3, found: 4 })
        ));
    }

    #[test]
    fn random_rows_match_naive_elimination() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &n in &[20usize, 70, 130] {
            for _ in 0..20 {
                let rows: Vec<Vec<u8>> = (0..50)
                    .map(|_| (0..n).map(|_| u8::from(rng.random_bool(0.2))).collect())
                    .collect();
                let packed: Vec<_> = rows.iter().map(|r| BitVector::from_bits(r)).collect();
                assert_eq!(rank_gf2(&packed).unwrap(), naive_rank(&rows));
            }
        }
    }

    #[test]
    fn matrix_shapes() {
        assert!(BitMatrix::zeros(0, 3).is_err());
        let m = BitMatrix::reversal(4).unwrap();
        assert_eq!(m.get(0, 3), 1);
        assert_eq!(m.get(3, 0), 1);
        let v = BitVector::from_bits(&[1, 0, 0, 0]);
        assert_eq!(m.mul_vec(&v).unwrap(), BitVector::from_bits(&[0, 0, 0, 1]));
        assert_eq!(m.submatrix(2, 4).unwrap().rows(), 2);
        assert!(m.submatrix(5, 4).is_err());
    }
}
