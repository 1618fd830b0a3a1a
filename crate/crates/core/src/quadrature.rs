//! Test integrands with exact reference integrals and equal-weight QMC
//! estimates.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{int, rat, Rational};
use crate::net::PointSet;
use crate::{Error, Result};

/// Denominator of randomly drawn breakpoints and values.
pub const RANDOM_GRID: i64 = 1 << 16;

/// Continuous piecewise-linear function on `[0, 1]` through
/// `(x_0, y_0), ..., (x_K, y_K)` with `0 = x_0 < ... < x_K = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinear {
    nodes: Vec<Rational>,
    values: Vec<Rational>,
}

impl PiecewiseLinear {
    pub fn new(nodes: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::LengthMismatch { expected: nodes.len(), found: values.len() });
        }
        if nodes.len() < 2 || !nodes[0].is_zero() || !nodes[nodes.len() - 1].is_one() {
            return Err(Error::InvalidArgument("nodes must start at 0 and end at 1".into()));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("nodes must be strictly increasing".into()));
        }
        Ok(Self { nodes, values })
    }

    pub fn nodes(&self) -> &[Rational] {
        &self.nodes
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        if x.is_negative() || *x > Rational::one() {
            return Err(Error::OutOfRange(format!("{x} not in [0, 1]")));
        }
        // First segment whose right end is >= x.
        let i = self.nodes.partition_point(|n| n < x).max(1);
        let (x0, x1) = (&self.nodes[i - 1], &self.nodes[i]);
        let (y0, y1) = (&self.values[i - 1], &self.values[i]);
        Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }

    /// Trapezoid sum, exact for piecewise-linear functions.
    pub fn integral(&self) -> Rational {
        self.nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| (&x[1] - &x[0]) * (&y[0] + &y[1]) / int(2))
            .sum()
    }
}

type Evaluator = Arc<dyn Fn(&[Rational]) -> Result<Rational> + Send + Sync>;

#[derive(Clone)]
pub enum TestFunction {
    /// `prod_i g_i(x_i)`.
    PiecewiseLinearTensor(Vec<PiecewiseLinear>),
    /// `prod_i b(x_i)` with [`bspline_cutout`] as `b`.
    BsplineCutoutTensor { dim: usize },
    Custom { dim: usize, label: String, f: Evaluator, integral: Option<Rational> },
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::PiecewiseLinearTensor(g) => {
                f.debug_tuple("PiecewiseLinearTensor").field(g).finish()
            }
            TestFunction::BsplineCutoutTensor { dim } => {
                f.debug_struct("BsplineCutoutTensor").field("dim", dim).finish()
            }
            TestFunction::Custom { dim, label, integral, .. } => f
                .debug_struct("Custom")
                .field("dim", dim)
                .field("label", label)
                .field("integral", integral)
                .finish_non_exhaustive(),
        }
    }
}

impl TestFunction {
    pub fn custom(
        dim: usize,
        label: impl Into<String>,
        f: impl Fn(&[Rational]) -> Result<Rational> + Send + Sync + 'static,
        integral: Option<Rational>,
    ) -> Self {
        TestFunction::Custom { dim, label: label.into(), f: Arc::new(f), integral }
    }

    pub fn dim(&self) -> usize {
        match self {
            TestFunction::PiecewiseLinearTensor(g) => g.len(),
            TestFunction::BsplineCutoutTensor { dim } | TestFunction::Custom { dim, .. } => *dim,
        }
    }

    pub fn label(&self) -> String {
        match self {
            TestFunction::PiecewiseLinearTensor(_) => "pwlinear".into(),
            TestFunction::BsplineCutoutTensor { .. } => "bspline".into(),
            TestFunction::Custom { label, .. } => label.clone(),
        }
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        match self {
            TestFunction::PiecewiseLinearTensor(g) => g
                .iter()
                .zip(x)
                .try_fold(Rational::one(), |acc, (gi, xi)| Ok(acc * gi.eval(xi)?)),
            TestFunction::BsplineCutoutTensor { .. } => x
                .iter()
                .try_fold(Rational::one(), |acc, xi| Ok(acc * bspline_cutout(xi)?)),
            TestFunction::Custom { f, .. } => f(x),
        }
    }
}

/// `(1/N) sum_x f(x)`.
pub fn qmc_estimate(f: &TestFunction, p: &PointSet) -> Result<Rational> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut sum = Rational::zero();
    for x in p.points() {
        sum += f.eval(x)?;
    }
    Ok(sum / Rational::from_integer(BigInt::from(p.len())))
}

pub fn exact_integral(f: &TestFunction) -> Result<Rational> {
    match f {
        TestFunction::PiecewiseLinearTensor(g) => {
            Ok(g.iter().fold(Rational::one(), |acc, gi| acc * gi.integral()))
        }
        TestFunction::BsplineCutoutTensor { dim } => {
            Ok(num_traits::pow(rat(23, 48), *dim))
        }
        TestFunction::Custom { integral, .. } => integral.clone().ok_or(Error::NoClosedFormIntegral),
    }
}

/// `|int f - (1/N) sum_x f(x)|`.
pub fn integration_error(f: &TestFunction, p: &PointSet) -> Result<Rational> {
    Ok((exact_integral(f)? - qmc_estimate(f, p)?).abs())
}

/// `3/4 - x^2` on `[0, 1/2]` and `9/8 - 3x/2 + x^2/2` on `[1/2, 1]`.
pub fn bspline_cutout(x: &Rational) -> Result<Rational> {
    if x.is_negative() || *x > Rational::one() {
        return Err(Error::OutOfRange(format!("{x} not in [0, 1]")));
    }
    let x2 = x * x;
    if *x <= rat(1, 2) {
        Ok(rat(3, 4) - x2)
    } else {
        Ok(rat(9, 8) - rat(3, 2) * x + x2 / int(2))
    }
}

/// Draws one factor: `k` distinct interior nodes `i / 2^16` with `i` uniform
/// in `1..2^16`, sorted, and `k + 2` values `v / 2^16` with `v` uniform in
/// `-2^16..=2^16`.
fn draw_factor(k: usize, rng: &mut ChaCha8Rng) -> Result<PiecewiseLinear> {
    if k >= RANDOM_GRID as usize - 1 {
        return Err(Error::InvalidArgument(format!("at most {} interior nodes", RANDOM_GRID - 2)));
    }
    let mut interior: Vec<i64> = Vec::with_capacity(k);
    while interior.len() < k {
        let i = rng.random_range(1..RANDOM_GRID);
        if !interior.contains(&i) {
            interior.push(i);
        }
    }
    interior.sort_unstable();
    let grid = |i: i64| rat(i, RANDOM_GRID);
    let nodes = std::iter::once(int(0))
        .chain(interior.into_iter().map(grid))
        .chain(std::iter::once(int(1)))
        .collect();
    let values = (0..k + 2).map(|_| grid(rng.random_range(-RANDOM_GRID..=RANDOM_GRID))).collect();
    PiecewiseLinear::new(nodes, values)
}

/// Univariate random piecewise-linear function from `ChaCha8Rng::seed_from_u64(seed)`.
pub fn random_piecewise_linear(k: usize, seed: u64) -> Result<PiecewiseLinear> {
    draw_factor(k, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `d` factors drawn in order from one generator; the first factor equals
/// `random_piecewise_linear(k, seed)`.
pub fn random_piecewise_linear_tensor(d: usize, k: usize, seed: u64) -> Result<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors = (0..d).map(|_| draw_factor(k, &mut rng)).collect::<Result<Vec<_>>>()?;
    Ok(TestFunction::PiecewiseLinearTensor(factors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity() -> PiecewiseLinear {
        PiecewiseLinear::new(vec![int(0), int(1)], vec![int(0), int(1)]).unwrap()
    }

    #[test]
    fn estimates() {
        let c = TestFunction::custom(1, "c", |_| Ok(rat(2, 3)), Some(rat(2, 3)));
        let p = PointSet::new(1, vec![vec![int(0)], vec![rat(1, 2)]], "p").unwrap();
        assert_eq!(qmc_estimate(&c, &p).unwrap(), rat(2, 3));
        let f = TestFunction::PiecewiseLinearTensor(vec![identity()]);
        assert_eq!(qmc_estimate(&f, &p).unwrap(), rat(1, 4));
        assert_eq!(integration_error(&f, &p).unwrap(), rat(1, 4));
        let empty = PointSet::new(1, vec![], "e").unwrap();
        assert!(matches!(qmc_estimate(&f, &empty), Err(Error::EmptyPointSet)));
    }

    #[test]
    fn integrals() {
        assert_eq!(identity().integral(), rat(1, 2));
        assert_eq!(exact_integral(&TestFunction::BsplineCutoutTensor { dim: 1 }).unwrap(), rat(23, 48));
        assert_eq!(
            exact_integral(&TestFunction::BsplineCutoutTensor { dim: 3 }).unwrap(),
            rat(23 * 23 * 23, 48 * 48 * 48)
        );
        let c = TestFunction::custom(1, "c", |_| Ok(int(1)), None);
        assert!(matches!(exact_integral(&c), Err(Error::NoClosedFormIntegral)));
    }

    #[test]
    fn bspline_values() {
        assert_eq!(bspline_cutout(&int(0)).unwrap(), rat(3, 4));
        assert_eq!(bspline_cutout(&rat(1, 2)).unwrap(), rat(1, 2));
        assert_eq!(bspline_cutout(&int(1)).unwrap(), rat(1, 8));
        assert!(bspline_cutout(&int(2)).is_err());
    }

    #[test]
    fn piecewise_validation() {
        assert!(PiecewiseLinear::new(vec![int(0), rat(1, 2)], vec![int(0), int(0)]).is_err());
        assert!(PiecewiseLinear::new(vec![int(0), int(0), int(1)], vec![int(0); 3]).is_err());
        assert!(PiecewiseLinear::new(vec![int(0), int(1)], vec![int(0)]).is_err());
        let g = PiecewiseLinear::new(vec![int(0), rat(1, 4), int(1)], vec![int(0), int(1), int(0)])
            .unwrap();
        assert_eq!(g.eval(&rat(1, 8)).unwrap(), rat(1, 2));
        assert_eq!(g.eval(&rat(1, 4)).unwrap(), int(1));
        assert_eq!(g.eval(&int(0)).unwrap(), int(0));
        assert_eq!(g.eval(&rat(5, 8)).unwrap(), rat(1, 2));
    }

    #[test]
    fn random_functions() {
        let g = random_piecewise_linear(0, 5).unwrap();
        assert_eq!(g.nodes().len(), 2);
        let a = random_piecewise_linear(5, 9).unwrap();
        assert_eq!(a, random_piecewise_linear(5, 9).unwrap());
        assert!(a.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(a.values().iter().all(|v| v.abs() <= int(1)));
        let TestFunction::PiecewiseLinearTensor(t) = random_piecewise_linear_tensor(2, 5, 9).unwrap()
        else {
            panic!("tensor")
        };
        assert_eq!(t[0], a);
    }
}
