//! Log-space evaluation of the gap bound envelope: the delta-exponent lower
//! bound, the pigeonhole upper bound, the explicit constructive pair bound,
//! the abc-conditional lower bound, and the Baker/Matveev linear-form floor.
//!
//! Every evaluator returns natural-log values; linear-scale companions are
//! provided only where they fit a double. The effective constants the bounds
//! depend on are user-tunable through [`BoundParams`] and default to
//! illustrative values, not proved ones.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::arith::{iterated_log, PrimeTable};
use crate::error::{Error, Result};
use crate::gaps::GapRecord;
use crate::numeric::{self, NeumaierSum};

/// Tunable effective constants.
///
/// * `c` scales the bound argument in the delta-exponent lower bound.
/// * `c1` scales y in the upper bound exp(c1 y) / (ln n)^(r-1).
/// * `c_eps` is the epsilon-dependent constant shared by the abc-conditional
///   lower bound and the abc inequality itself.
/// * `c2` bounds the log-primorial: prod_{p <= y} p < exp(c2 y).
/// * `c0` is the base of the linear-form floor.
/// * `epsilon` is the abc exponent, in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub c: f64,
    pub c1: f64,
    pub c_eps: f64,
    pub c2: f64,
    pub c0: f64,
    pub epsilon: f64,
}

impl Default for BoundParams {
    /// Illustrative defaults, not effective constants.
    fn default() -> Self {
        BoundParams { c: 2.0, c1: 2.0, c_eps: 1.0, c2: 2.0, c0: 2.0, epsilon: 0.5 }
    }
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c", self.c),
            ("c1", self.c1),
            ("c_eps", self.c_eps),
            ("c2", self.c2),
            ("c0", self.c0),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Domain(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// delta(x) = exp(x log_2 x / log x) in both log and linear form; the linear
/// value overflows to infinity near x = 3000 and beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaValue {
    pub log: f64,
    pub linear: f64,
}

/// The exponent shape exp(x log_2 x / ln x); `log_2` is the clamped iterated
/// log, so for 2 <= x <= e^e this is exactly exp(x / ln x).
pub fn delta(x: f64) -> Result<DeltaValue> {
    if !(x >= 2.0) {
        return Err(Error::Domain(format!("delta is defined for x >= 2, got {x}")));
    }
    let log = x * iterated_log(2, x) / numeric::ln(x);
    Ok(DeltaValue { log, linear: numeric::exp(log) })
}

/// Log of the unconditional gap lower bound n / (ln n)^delta(c y_next).
pub fn gap_lower_bound_log(log_n: f64, y_next: f64, params: &BoundParams) -> Result<f64> {
    if log_n < numeric::ln(3.0) {
        return Err(Error::Domain(format!("lower bound needs n >= 3, got ln n = {log_n}")));
    }
    if y_next < 3.0 {
        return Err(Error::Domain(format!("lower bound needs y >= 3, got {y_next}")));
    }
    let scaled = params.c * y_next;
    if scaled < 2.0 {
        return Err(Error::Domain(format!("c * y must be at least 2, got {scaled}")));
    }
    let d = delta(scaled)?;
    Ok(log_n - d.linear * numeric::ln(log_n))
}

/// Log of the upper bound n exp(c1 y) / (ln n)^(r-1), where r counts primes
/// up to the bound at sqrt(n).
pub fn gap_upper_bound_log(log_n: f64, y_i: f64, r: u64, params: &BoundParams) -> Result<f64> {
    if log_n < numeric::ln(3.0) {
        return Err(Error::Domain(format!("upper bound needs n >= 3, got ln n = {log_n}")));
    }
    if r < 1 {
        return Err(Error::Domain("upper bound needs r >= 1".into()));
    }
    Ok(log_n + params.c1 * y_i - (r - 1) as f64 * numeric::ln(log_n))
}

/// Log of the explicit constructive pair bound
/// 3 n (s ln y)^s / (ln n)^(r'-1), with r' primes up to y(sqrt n) and s
/// primes up to y(n).
pub fn constructive_gap_bound_log(log_n: f64, r_prime: u64, s: u64, y_i: f64) -> Result<f64> {
    if log_n < numeric::ln(3.0) {
        return Err(Error::Domain(format!("bound needs n >= 3, got ln n = {log_n}")));
    }
    if r_prime < 1 || s < 1 {
        return Err(Error::Domain(format!(
            "prime counts must be >= 1, got r' = {r_prime}, s = {s}"
        )));
    }
    if y_i < 3.0 {
        return Err(Error::Domain(format!("bound needs y >= 3, got {y_i}")));
    }
    Ok(numeric::ln(3.0) + log_n - (r_prime - 1) as f64 * numeric::ln(log_n)
        + s as f64 * (numeric::ln(s as f64) + numeric::ln(numeric::ln(y_i))))
}

/// Log of the abc-conditional lower bound c_eps n^(1-eps) / exp(c2 y_next).
pub fn abc_gap_lower_log(log_n: f64, y_next: f64, params: &BoundParams) -> Result<f64> {
    params.validate()?;
    if log_n < 0.0 {
        return Err(Error::Domain(format!("needs n >= 1, got ln n = {log_n}")));
    }
    Ok(numeric::ln(params.c_eps) + (1.0 - params.epsilon) * log_n - params.c2 * y_next)
}

/// A linear form in logarithms of the basis primes: the exponent vector of a
/// ratio m/n of smooth integers, its max coefficient, and the compensated
/// value of sum l_j ln p_j.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    pub primes: Vec<u64>,
    pub exponents: Vec<i64>,
    /// max |l_j|; zero only for the trivial form m = n.
    pub b_max: u64,
    /// ln(m/n).
    pub value: f64,
}

impl LinearForm {
    /// The nonzero terms, as (prime, exponent) pairs.
    pub fn nonzero_terms(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.primes
            .iter()
            .zip(&self.exponents)
            .filter(|(_, &l)| l != 0)
            .map(|(&p, &l)| (p, l))
    }
}

/// Relative cancellation below which the form value is recomputed through
/// exact big-integer arithmetic.
const CANCEL_EPS: f64 = 1e-13;

/// Factor the ratio m/n over `basis`: exponent vector l with
/// m/n = prod p_j^(l_j), B = max |l_j| and the form value ln(m/n).
///
/// Near-total cancellation (|value| below 1e-13 of the term mass) switches to
/// an exact big-integer ratio log, so tiny forms keep full relative accuracy.
pub fn factor_ratio(n: u64, m: u64, basis: &[u64]) -> Result<LinearForm> {
    if n < 1 || m < 1 {
        return Err(Error::Domain("factor_ratio needs positive integers".into()));
    }
    let en = factor_over(n, basis)?;
    let em = factor_over(m, basis)?;
    let exponents: Vec<i64> = em.iter().zip(&en).map(|(&a, &b)| a as i64 - b as i64).collect();
    let b_max = exponents.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0);
    let mut sum = NeumaierSum::new();
    let mut mass = 0.0f64;
    for (&p, &l) in basis.iter().zip(&exponents) {
        let term = l as f64 * numeric::ln(p as f64);
        sum.add(term);
        mass += numeric::abs(term);
    }
    let mut value = sum.value();
    if mass > 0.0 && numeric::abs(value) < CANCEL_EPS * mass {
        let mut num = BigUint::from(1u32);
        let mut den = BigUint::from(1u32);
        for (&p, &l) in basis.iter().zip(&exponents) {
            if l > 0 {
                num *= BigUint::from(p).pow(l as u32);
            } else if l < 0 {
                den *= BigUint::from(p).pow((-l) as u32);
            }
        }
        value = numeric::ln_ratio_big(&num, &den);
    }
    Ok(LinearForm { primes: basis.to_vec(), exponents, b_max, value })
}

fn factor_over(n: u64, basis: &[u64]) -> Result<Vec<u32>> {
    let mut exps = Vec::with_capacity(basis.len());
    let mut m = n;
    for &p in basis {
        let mut e = 0u32;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        exps.push(e);
    }
    if m != 1 {
        return Err(Error::NotSmooth { n, leftover: m });
    }
    Ok(exps)
}

/// The stated floor for ln |Lambda|: -c0^k (prod ln A_j) ln B over k terms,
/// valid for heights A_j >= 3 and coefficient bound B >= 3.
pub fn matveev_rhs(heights: &[f64], b: u64, params: &BoundParams) -> Result<f64> {
    if heights.is_empty() {
        return Err(Error::Domain("need at least one height".into()));
    }
    for &a in heights {
        if !(a >= 3.0) {
            return Err(Error::Domain(format!("heights must be >= 3, got {a}")));
        }
    }
    if b < 3 {
        return Err(Error::Domain(format!("coefficient bound must be >= 3, got {b}")));
    }
    let mut prod = -numeric::powf(params.c0, heights.len() as f64);
    for &a in heights {
        prod *= numeric::ln(a);
    }
    Ok(prod * numeric::ln(b as f64))
}

/// Per-record diagnostic tying a gap to the linear-form machinery:
/// t = n (m/n - 1) > n ln(m/n) = n Lambda > 0, with the Matveev floor under
/// Lambda and the configured-c lower bound beside the observed gap.
///
/// The floor's hypothesis that the prime logs are linearly independent over
/// the rationals holds automatically for distinct primes (unique
/// factorization) and is not re-verified here.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub t: u64,
    /// n_i * ln(n_next / n_i), the strict minorant of the gap.
    pub minorant: f64,
    pub lambda: f64,
    pub b_max: u64,
    /// Floor for ln |Lambda| at the configured c0, using heights max(p, 3)
    /// and coefficient bound max(B, 3) over the nonzero terms.
    pub matveev_lower: f64,
    /// t > minorant > 0 held numerically.
    pub chain_holds: bool,
    /// Lambda agrees with ln(n_next) - ln(n_i) to 1e-9 relative.
    pub lambda_consistent: bool,
    /// Log of the delta-exponent lower bound at the configured c.
    pub lower_bound_log: f64,
    /// True when the configured c makes the claimed lower bound exceed the
    /// observed gap; the data then says c is too small, never that the bound
    /// itself fails.
    pub c_too_small: bool,
}

pub fn check_gap_chain(
    record: &GapRecord,
    table: &PrimeTable,
    y_next: f64,
    params: &BoundParams,
) -> Result<ChainReport> {
    let basis = table.primes_upto(y_next)?;
    let form = factor_ratio(record.n_i, record.n_next, basis)?;
    let lambda = form.value;
    let minorant = record.n_i as f64 * lambda;
    let direct = numeric::ln(record.n_next as f64) - numeric::ln(record.n_i as f64);
    let scale = numeric::abs(lambda).max(numeric::abs(direct));
    let lambda_consistent = numeric::abs(lambda - direct) <= 1e-9 * scale;
    let heights: Vec<f64> =
        form.nonzero_terms().map(|(p, _)| (p as f64).max(3.0)).collect();
    let matveev_lower = matveev_rhs(&heights, form.b_max.max(3), params)?;
    let chain_holds = (record.t as f64) > minorant && minorant > 0.0;
    let lower_bound_log =
        gap_lower_bound_log(numeric::ln(record.n_i as f64), y_next.max(3.0), params)?;
    let c_too_small = lower_bound_log > numeric::ln(record.t as f64);
    Ok(ChainReport {
        t: record.t,
        minorant,
        lambda,
        b_max: form.b_max,
        matveev_lower,
        chain_holds,
        lambda_consistent,
        lower_bound_log,
        c_too_small,
    })
}
