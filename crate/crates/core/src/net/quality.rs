use super::GeneratorMatrixSet;
use crate::{Error, Result};

/// Default cap on search nodes visited by [`minimal_t`].
pub const DEFAULT_T_BUDGET: u64 = 50_000_000;

/// `alpha * t_tilde + d * alpha * (alpha - 1) / 2`: a valid quality parameter
/// for the order-`alpha` net obtained by interlacing a `(t_tilde, n, alpha*d)`-net.
pub fn interlaced_t_bound(t_tilde: usize, alpha: usize, d: usize) -> usize {
    alpha * t_tilde + d * alpha * alpha.saturating_sub(1) / 2
}

/// Smallest `t` for which the matrices define an order-`alpha` digital
/// `(t, n, d)`-net, found by exhaustive search.
pub fn minimal_t(g: &GeneratorMatrixSet) -> Result<usize> {
    minimal_t_with_budget(g, DEFAULT_T_BUDGET)
}

/// One admissible choice of rows from a single matrix.
struct RowChoice {
    weight: usize,
    rows: Vec<u64>,
}

/// [`minimal_t`] with an explicit limit on visited search nodes.
///
/// Only canonical selections are enumerated: when at least `alpha` rows are
/// taken from a matrix, all rows below the `alpha`-th largest index are taken
/// as well (capped by `n` rows per matrix). Any dependent selection is
/// contained in a dependent canonical selection of the same weight, so the
/// minimal weight of a dependent selection, and hence `t`, is unchanged.
pub fn minimal_t_with_budget(g: &GeneratorMatrixSet, budget: u64) -> Result<usize> {
    let (n, alpha) = (g.digits(), g.alpha());
    let max_weight = alpha * n;
    if n > 64 || max_weight > 64 {
        return Err(Error::BudgetExceeded(format!(
            "alpha*n = {max_weight} exceeds the exhaustive search limit of 64"
        )));
    }
    let choices: Vec<Vec<RowChoice>> = g
        .matrices()
        .iter()
        .map(|m| {
            let rows: Vec<u64> = (0..m.rows()).map(|r| m.row_words(r)[0]).collect();
            row_choices(&rows, n, alpha, max_weight)
        })
        .collect();
    let mut search = Search {
        choices: &choices,
        n,
        best: max_weight + 1,
        visited: 0,
        budget,
    };
    search.descend(0, 0, [0u64; 64], 0)?;
    Ok(if search.best <= max_weight {
        max_weight - search.best + 1
    } else {
        0
    })
}

struct Search<'a> {
    choices: &'a [Vec<RowChoice>],
    n: usize,
    /// Smallest weight of a dependent selection found so far.
    best: usize,
    visited: u64,
    budget: u64,
}

impl Search<'_> {
    fn descend(&mut self, coord: usize, weight: usize, basis: [u64; 64], count: usize) -> Result<()> {
        if coord == self.choices.len() {
            return Ok(());
        }
        for choice in &self.choices[coord] {
            let w = weight + choice.weight;
            if w >= self.best {
                break;
            }
            self.visited += 1;
            if self.visited > self.budget {
                return Err(Error::BudgetExceeded(format!(
                    "t search visited more than {} selections",
                    self.budget
                )));
            }
            let total = count + choice.rows.len();
            let mut b = basis;
            let independent = total <= self.n && choice.rows.iter().all(|&r| insert(&mut b, r));
            if independent {
                self.descend(coord + 1, w, b, total)?;
            } else {
                self.best = w;
            }
        }
        Ok(())
    }
}

fn insert(basis: &mut [u64; 64], mut x: u64) -> bool {
    while x != 0 {
        let top = 63 - x.leading_zeros() as usize;
        if basis[top] == 0 {
            basis[top] = x;
            return true;
        }
        x ^= basis[top];
    }
    false
}

/// Canonical row selections of one matrix with weight at most `max_weight`,
/// sorted by weight. `rows[j - 1]` is row `j`.
fn row_choices(rows: &[u64], n: usize, alpha: usize, max_weight: usize) -> Vec<RowChoice> {
    let top = rows.len();
    let mut out = vec![RowChoice { weight: 0, rows: Vec::new() }];
    for len in 1..=alpha.min(n) {
        for seq in descending(len, top, max_weight) {
            let weight: usize = seq.iter().sum();
            let pick = |idx: &[usize]| idx.iter().map(|&j| rows[j - 1]).collect::<Vec<_>>();
            if len < alpha {
                out.push(RowChoice { weight, rows: pick(&seq) });
                continue;
            }
            let last = seq[len - 1];
            if alpha - 1 + last <= n {
                let mut idx = seq.clone();
                idx.extend((1..last).rev());
                out.push(RowChoice { weight, rows: pick(&idx) });
            } else {
                // At most n rows per matrix: every (n - alpha)-subset below `last`.
                for tail in subsets(last - 1, n - alpha) {
                    let mut idx = seq.clone();
                    idx.extend(tail);
                    out.push(RowChoice { weight, rows: pick(&idx) });
                }
            }
        }
    }
    out.sort_by_key(|c| c.weight);
    out
}

/// Strictly decreasing sequences of `len` indices in `1..=max_index` with sum
/// at most `max_sum`.
fn descending(len: usize, max_index: usize, max_sum: usize) -> Vec<Vec<usize>> {
    fn go(len: usize, below: usize, budget: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if len == 0 {
            out.push(cur.clone());
            return;
        }
        // remaining entries need at least 1 + 2 + ... + (len - 1)
        let reserve = len * (len - 1) / 2;
        for j in (len..below).rev() {
            if j + reserve > budget {
                continue;
            }
            cur.push(j);
            go(len - 1, j, budget - j, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(len, max_index + 1, max_sum, &mut Vec::new(), &mut out);
    out
}

/// All `size`-subsets of `1..=universe`.
fn subsets(universe: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, universe: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for j in start..=universe {
            cur.push(j);
            go(j + 1, universe, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, universe, size, &mut Vec::new(), &mut out);
    out
}
