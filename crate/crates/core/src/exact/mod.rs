//! Exact scalar arithmetic and GF(2) linear algebra used by every other module.

mod gf2;
mod poly;
mod rational;

pub use gf2::{rank_gf2, rank_words, BitMatrix, BitVector};
pub use poly::Poly;
pub use rational::{
    decimal_string, dyadic_numerator, format_fraction, int, parse_rational, pow2, rat, sqrt_decimal,
    sqrt_to_digits, to_f64, Rational,
};
