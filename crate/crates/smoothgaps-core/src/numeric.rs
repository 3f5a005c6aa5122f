//! Float helpers. Everything transcendental is routed through `libm` so the
//! crate builds without std and produces identical results everywhere.

use core::cmp::Ordering;

use num_bigint::BigUint;

pub const LN_2: f64 = core::f64::consts::LN_2;

/// Relative window inside which a float log comparison is re-derived from the
/// exact integer before deciding.
pub const TIE_EPS: f64 = 1e-9;

/// Relative window inside which a re-derived log is declared equal to the
/// boundary (the boundary itself is only an f64).
pub const EXACT_EPS: f64 = 1e-12;

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Neumaier-compensated accumulator. Sums of thousands of logs drop digits
/// under naive accumulation; this keeps the error near one ulp of the total.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        NeumaierSum { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if abs(self.sum) >= abs(v) {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator of terms.
pub fn sum_compensated(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = NeumaierSum::new();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}

/// Natural log of a big integer from its top 63 bits plus a power-of-two
/// offset. Accurate to a few units in the 14th decimal, independent of size.
pub fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 63 {
        let v = n.iter_u64_digits().next().unwrap_or(0);
        return ln(v as f64);
    }
    let shift = bits - 63;
    let top = (n >> shift).iter_u64_digits().next().unwrap_or(0);
    ln(top as f64) + shift as f64 * LN_2
}

/// `a / b` as a float, valid for operands of any size.
pub fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    let (ma, ea) = top_mantissa(a);
    let (mb, eb) = top_mantissa(b);
    let e = ea - eb;
    libm::scalbn(ma as f64 / mb as f64, e as i32)
}

/// Top 53 significant bits and the power-of-two scale they were shifted by.
fn top_mantissa(n: &BigUint) -> (u64, i64) {
    let bits = n.bits();
    if bits <= 53 {
        return (n.iter_u64_digits().next().unwrap_or(0), 0);
    }
    let shift = bits - 53;
    let m = (n >> shift).iter_u64_digits().next().unwrap_or(0);
    (m, shift as i64)
}

/// `ln(num/den)` computed so that near-total cancellation costs no accuracy:
/// the difference is formed exactly in big-integer arithmetic and only the
/// small correction passes through `ln_1p`.
pub fn ln_ratio_big(num: &BigUint, den: &BigUint) -> f64 {
    match num.cmp(den) {
        Ordering::Equal => 0.0,
        Ordering::Greater => {
            let d = num - den;
            ln_1p(big_ratio(&d, den))
        }
        Ordering::Less => {
            let d = den - num;
            -ln_1p(big_ratio(&d, num))
        }
    }
}

/// Compare a value's natural log against a boundary. When the float gap is
/// inside the tie window the log is re-derived at higher accuracy via
/// `exact`; a residual gap below `EXACT_EPS` counts as equality.
pub fn cmp_log_boundary(log_value: f64, boundary: f64, exact: impl FnOnce() -> f64) -> Ordering {
    let scale = abs(boundary).max(1.0);
    if abs(log_value - boundary) > TIE_EPS * scale {
        return log_value.partial_cmp(&boundary).expect("non-NaN log comparison");
    }
    let refined = exact();
    if abs(refined - boundary) <= EXACT_EPS * scale {
        Ordering::Equal
    } else {
        refined.partial_cmp(&boundary).expect("non-NaN log comparison")
    }
}

/// Nearest integer to `x` when `x` sits within the tie window of one,
/// otherwise `floor(x)`. Keeps dyadic bin indices stable at exact boundaries.
pub fn floor_with_tie(x: f64) -> f64 {
    let r = round(x);
    if abs(x - r) <= TIE_EPS * abs(x).max(1.0) {
        r
    } else {
        floor(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_beats_naive_on_cancelling_series() {
        // 1 + 1e16 - 1e16 in this order loses the 1 naively.
        let mut s = NeumaierSum::new();
        s.add(1.0);
        s.add(1e16);
        s.add(-1e16);
        assert_eq!(s.value(), 1.0);
    }

    #[test]
    fn ln_big_matches_f64_for_small_values() {
        for v in [1u64, 2, 3, 97, 1_000_003, u64::MAX / 7] {
            let b = BigUint::from(v);
            assert!((ln_big(&b) - ln(v as f64)).abs() < 1e-12 * ln(v as f64).max(1.0));
        }
    }

    #[test]
    fn ln_big_handles_powers_of_two() {
        let b = BigUint::from(1u64) << 400;
        let expected = 400.0 * LN_2;
        assert!((ln_big(&b) - expected).abs() < 1e-10);
    }

    #[test]
    fn ln_ratio_big_survives_cancellation() {
        // 3^306 / 2^485 is extremely close to 1; the direct f64 difference of
        // logs carries ~1e-13 absolute error, the exact route much less.
        let num = BigUint::from(3u64).pow(306);
        let den = BigUint::from(2u64).pow(485);
        let lam = ln_ratio_big(&num, &den);
        let coarse = ln_big(&num) - ln_big(&den);
        assert!((lam - coarse).abs() < 1e-10);
        // Exactness cross-check: exp(lam) must reproduce the big ratio.
        assert!((exp(lam) - big_ratio(&num, &den)).abs() < 1e-12);
    }

    #[test]
    fn boundary_comparison_resolves_ties_exactly() {
        let eight = BigUint::from(8u64);
        // 3*ln2 vs ln(8): a genuine float tie that must resolve to Equal.
        let lv = sum_compensated([LN_2, LN_2, LN_2]);
        assert_eq!(cmp_log_boundary(lv, ln(8.0), || ln_big(&eight)), Ordering::Equal);
        // Clearly inside and clearly outside stay strict.
        assert_eq!(cmp_log_boundary(1.0, 2.0, || unreachable!()), Ordering::Less);
        assert_eq!(cmp_log_boundary(3.0, 2.0, || unreachable!()), Ordering::Greater);
    }

    #[test]
    fn floor_with_tie_rounds_near_integers() {
        assert_eq!(floor_with_tie(3.0000000001), 3.0);
        assert_eq!(floor_with_tie(2.9999999999), 3.0);
        assert_eq!(floor_with_tie(2.7), 2.0);
    }
}
