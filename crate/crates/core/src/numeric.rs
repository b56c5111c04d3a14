//! Exact and correctly-rounded arithmetic helpers.
//!
//! Raw institution scores are sums of unit fractions, so they are carried as
//! exact rationals and rounded to `f64` only at the edges (export, ranking).
//! Float aggregates that must not depend on input order go through [`fsum`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Arbitrary-precision rational used for raw scores.
pub type Exact = BigRational;

/// Correctly rounded conversion of an exact rational to `f64`.
pub fn exact_to_f64(value: &Exact) -> f64 {
    if value.is_zero() {
        return 0.0;
    }
    value
        .to_f64()
        .expect("ratio to f64 conversion is total for finite ratios")
}

/// Exact rational value of a finite float. Returns `None` for NaN or infinity.
pub fn f64_to_exact(value: f64) -> Option<Exact> {
    BigRational::from_float(value)
}

/// `numerator / denominator` as an exact rational.
pub fn ratio(numerator: u64, denominator: u64) -> Exact {
    BigRational::new(BigInt::from(numerator), BigInt::from(denominator))
}

/// Correctly rounded sum of finite floats.
///
/// Uses Shewchuk's non-overlapping partials with a final half-way correction,
/// so the result is the float nearest the exact sum. In particular the result
/// is independent of the order of `values`.
pub fn fsum<I>(values: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        debug_assert!(x.is_finite(), "fsum requires finite inputs");
        let mut kept = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }

    let Some(mut n) = partials.len().checked_sub(1) else {
        return 0.0;
    };
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        let y_rounded = hi - x;
        lo = y - y_rounded;
        if lo != 0.0 {
            break;
        }
    }
    // Round-half-even correction when the remaining partials push a tie.
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

/// Correctly rounded arithmetic mean of finite floats; 0 for no values.
///
/// Rounding once (rather than `fsum / len`) makes the result agree with any
/// exact-arithmetic mean, so ties between means are decided consistently.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let total = values
        .iter()
        .map(|&v| f64_to_exact(v).expect("mean of finite values"))
        .fold(Exact::zero(), |acc, v| acc + v);
    exact_to_f64(&(total / BigInt::from(values.len())))
}
