//! Smoothness predicates, exact and asymptotic Psi(x, y) counting, sorted
//! enumeration of y-smooth numbers (also far beyond 64 bits, in log space),
//! and enumeration of sequences cut by an adaptive smoothness bound.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigUint;

use crate::arith::{sieve_primes, GpfSieve, PrimeTable};
use crate::error::{Error, Result};
use crate::numeric::{self, NeumaierSum};
use crate::Limits;

/// 64-bit enumeration stops here; larger heights go through the log-space
/// pipeline.
pub const NUMERIC_CAP_64: u64 = 1 << 62;

/// A non-decreasing smoothness threshold x -> y(x).
///
/// The formula-backed kinds clamp to 3 from below, the standing hypothesis
/// for adaptive bounds. The explicit kinds (`constant`, `step_table`) are
/// taken literally and may go down to 2, the smallest threshold for which
/// smoothness is non-trivial.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessBound {
    kind: BoundKind,
}

#[derive(Debug, Clone, PartialEq)]
enum BoundKind {
    Constant(f64),
    LogMultiple(f64),
    SlowRegime(f64),
    PowerLog { scale: f64, exponent: f64 },
    StepTable(Vec<StepEntry>),
}

#[derive(Debug, Clone, PartialEq)]
struct StepEntry {
    threshold: f64,
    log_threshold: f64,
    value: f64,
}

impl SmoothnessBound {
    /// Fixed threshold y(x) = y0, y0 >= 2.
    pub fn constant(y0: f64) -> Result<Self> {
        if !y0.is_finite() || y0 < 2.0 {
            return Err(Error::Domain(format!("constant bound must be >= 2, got {y0}")));
        }
        Ok(SmoothnessBound { kind: BoundKind::Constant(y0) })
    }

    /// y(x) = max(3, a ln x), a > 0.
    pub fn log_multiple(a: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::Domain(format!("log multiple must be positive, got {a}")));
        }
        Ok(SmoothnessBound { kind: BoundKind::LogMultiple(a) })
    }

    /// y(x) = max(3, a log_2(x) log_3(x) / log_4(x)) with iterated logs, a > 0.
    pub fn slow_regime(a: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::Domain(format!("slow-regime scale must be positive, got {a}")));
        }
        Ok(SmoothnessBound { kind: BoundKind::SlowRegime(a) })
    }

    /// y(x) = max(3, a (ln x)^beta), a > 0, beta > 0.
    pub fn power_log(scale: f64, exponent: f64) -> Result<Self> {
        if !scale.is_finite() || scale <= 0.0 || !exponent.is_finite() || exponent <= 0.0 {
            return Err(Error::Domain(format!(
                "power-log parameters must be positive, got ({scale}, {exponent})"
            )));
        }
        Ok(SmoothnessBound { kind: BoundKind::PowerLog { scale, exponent } })
    }

    /// Piecewise-constant bound: y(x) is the value of the last entry whose
    /// threshold is <= x, the first value below every threshold. Thresholds
    /// must be positive and strictly increasing, values >= 2 and
    /// non-decreasing.
    pub fn step_table(entries: &[(f64, f64)]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("step table must have at least one entry".into()));
        }
        let mut built: Vec<StepEntry> = Vec::with_capacity(entries.len());
        for (i, &(threshold, value)) in entries.iter().enumerate() {
            if !threshold.is_finite() || threshold <= 0.0 {
                return Err(Error::Domain(format!(
                    "step threshold must be positive, got {threshold}"
                )));
            }
            if !value.is_finite() || value < 2.0 {
                return Err(Error::Domain(format!("step value must be >= 2, got {value}")));
            }
            if i > 0 {
                let prev = &built[i - 1];
                if threshold <= prev.threshold {
                    return Err(Error::Domain(
                        "step thresholds must be strictly increasing".into(),
                    ));
                }
                if value < prev.value {
                    return Err(Error::Domain("step values must be non-decreasing".into()));
                }
            }
            built.push(StepEntry { threshold, log_threshold: numeric::ln(threshold), value });
        }
        Ok(SmoothnessBound { kind: BoundKind::StepTable(built) })
    }

    /// Evaluate at x > 0.
    pub fn eval(&self, x: f64) -> f64 {
        debug_assert!(x > 0.0);
        self.eval_log(numeric::ln(x))
    }

    /// Evaluate from ln x; the only form usable at heights like e^200.
    pub fn eval_log(&self, log_x: f64) -> f64 {
        match &self.kind {
            BoundKind::Constant(y) => *y,
            BoundKind::LogMultiple(a) => (a * log_x).max(3.0),
            BoundKind::SlowRegime(a) => {
                let l2 = numeric::ln(log_x.max(1.0)).max(1.0);
                let l3 = numeric::ln(l2).max(1.0);
                let l4 = numeric::ln(l3).max(1.0);
                (a * l2 * l3 / l4).max(3.0)
            }
            BoundKind::PowerLog { scale, exponent } => {
                (scale * numeric::powf(log_x.max(0.0), *exponent)).max(3.0)
            }
            BoundKind::StepTable(entries) => {
                let mut v = entries[0].value;
                for e in entries {
                    if e.log_threshold <= log_x {
                        v = e.value;
                    } else {
                        break;
                    }
                }
                v
            }
        }
    }
}

/// The increasing sequence of n <= limit with gpf(n) <= y(n), with each
/// term's greatest prime factor cached.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothSequence {
    bound: SmoothnessBound,
    limit: u64,
    terms: Vec<u64>,
    gpfs: Vec<u64>,
}

impl SmoothSequence {
    pub fn bound(&self) -> &SmoothnessBound {
        &self.bound
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn terms(&self) -> &[u64] {
        &self.terms
    }

    pub fn gpfs(&self) -> &[u64] {
        &self.gpfs
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// True iff every prime factor of n is <= y. Factors are stripped in
/// increasing order, so the first factor beyond y exits early.
pub fn is_smooth(n: u64, y: f64) -> bool {
    assert!(n >= 1, "smoothness is defined for positive integers");
    let mut m = n;
    if m % 2 == 0 {
        if 2.0 > y {
            return false;
        }
        while m % 2 == 0 {
            m /= 2;
        }
    }
    let mut d = 3u64;
    while d * d <= m {
        if m % d == 0 {
            if d as f64 > y {
                return false;
            }
            while m % d == 0 {
                m /= d;
            }
        }
        d += 2;
    }
    m == 1 || m as f64 <= y
}

/// True iff n is composed entirely of primes from `basis`. Complete for any
/// size of n, since each basis prime is divided out fully.
pub fn is_smooth_over(n: &BigUint, basis: &[u64]) -> bool {
    let zero = BigUint::from(0u32);
    let one = BigUint::from(1u32);
    let mut m = n.clone();
    for &p in basis {
        let pb = BigUint::from(p);
        while m > one && &m % &pb == zero {
            m = &m / &pb;
        }
    }
    m == one
}

/// Exact Psi(x, y): the number of y-smooth integers in [1, x], counted by
/// recursing over the prime basis in descending order with floored budgets.
/// Never scans the integers below x.
pub fn psi_exact(x: u64, y: f64) -> u64 {
    assert!(x >= 1, "psi_exact needs x >= 1");
    assert!(y >= 2.0, "psi_exact needs y >= 2");
    let cut = y.min(x as f64);
    if cut < 2.0 {
        return 1;
    }
    let table = sieve_primes(numeric::floor(cut) as u64).expect("cut >= 2");
    count_rec(x, table.primes())
}

fn count_rec(x: u64, primes: &[u64]) -> u64 {
    match primes.split_last() {
        None => 1,
        Some((&p, rest)) => {
            let mut total = 0u64;
            let mut m = x;
            while m >= 1 {
                total += count_rec(m, rest);
                m /= p;
            }
            total
        }
    }
}

/// Exact Psi(e^log_x, y) as a lattice count: exponent vectors over the primes
/// <= y whose log lands at or below log_x, boundary ties resolved exactly.
/// This is the only exact count available at heights like e^100.
pub fn psi_exact_log(log_x: f64, y: f64) -> u64 {
    assert!(log_x >= 0.0, "psi_exact_log needs log_x >= 0");
    assert!(y >= 2.0, "psi_exact_log needs y >= 2");
    let table = sieve_primes(numeric::floor(y) as u64).expect("y >= 2");
    let mut count = 0u64;
    walk_smooth(table.primes(), log_x, &mut |_, _| {
        count += 1;
        Ok(())
    })
    .expect("counting visitor is infallible");
    count
}

/// Depth-first walk over every exponent vector whose value lies in
/// (0, e^log_hi]; boundary ties re-derived from the exact integer. Visits in
/// basis-recursive order, not sorted order.
fn walk_smooth(
    primes: &[u64],
    log_hi: f64,
    visit: &mut dyn FnMut(&[u32], f64) -> Result<()>,
) -> Result<()> {
    assert!(!primes.is_empty());
    let logs: Vec<f64> = primes.iter().map(|&p| numeric::ln(p as f64)).collect();
    let margin = 2.0 * numeric::TIE_EPS * numeric::abs(log_hi).max(1.0);
    let mut exps = vec![0u32; primes.len()];
    descend(primes, &logs, log_hi, margin, primes.len() - 1, 0.0, &mut exps, visit)
}

#[allow(clippy::too_many_arguments)]
fn descend(
    primes: &[u64],
    logs: &[f64],
    log_hi: f64,
    margin: f64,
    level: usize,
    partial: f64,
    exps: &mut Vec<u32>,
    visit: &mut dyn FnMut(&[u32], f64) -> Result<()>,
) -> Result<()> {
    let lp = logs[level];
    let mut e = 0u32;
    loop {
        let here = partial + e as f64 * lp;
        if here > log_hi + margin {
            break;
        }
        exps[level] = e;
        if level == 0 {
            let lv = numeric::sum_compensated(
                exps.iter().zip(logs).map(|(&ex, &lg)| ex as f64 * lg),
            );
            let inside = numeric::cmp_log_boundary(lv, log_hi, || {
                numeric::ln_big(&exact_big(primes, exps))
            }) != Ordering::Greater;
            if inside {
                visit(exps, lv)?;
            }
        } else {
            descend(primes, logs, log_hi, margin, level - 1, here, exps, visit)?;
        }
        e += 1;
    }
    exps[level] = 0;
    Ok(())
}

fn exact_big(primes: &[u64], exps: &[u32]) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for (&p, &e) in primes.iter().zip(exps) {
        if e > 0 {
            acc *= BigUint::from(p).pow(e);
        }
    }
    acc
}

/// One smooth number held as its exponent vector over a prime basis plus the
/// compensated log of its value; the exact integer is materialized on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSmoothValue {
    exponents: Vec<u32>,
    log_value: f64,
}

impl LogSmoothValue {
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn log_value(&self) -> f64 {
        self.log_value
    }

    pub fn exact_value(&self, primes: &[u64]) -> BigUint {
        exact_big(primes, &self.exponents)
    }
}

/// Sorted output of [`enumerate_smooth`]: the prime basis plus every value in
/// the requested log window, ascending by exact value.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothSet {
    primes: Vec<u64>,
    values: Vec<LogSmoothValue>,
}

impl SmoothSet {
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn values(&self) -> &[LogSmoothValue] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn exact(&self, idx: usize) -> BigUint {
        self.values[idx].exact_value(&self.primes)
    }
}

/// All products over the primes <= y with log value in (log_lo, log_hi],
/// sorted ascending by exact value. Values whose float logs collide within
/// the tie window are ordered by their exact big integers, so the output
/// order is deterministic even when doubles cannot separate two candidates.
pub fn enumerate_smooth(y: f64, log_lo: f64, log_hi: f64, enum_cap: usize) -> Result<SmoothSet> {
    if !(log_lo >= 0.0 && log_lo < log_hi) {
        return Err(Error::Domain(format!(
            "log window must satisfy 0 <= log_lo < log_hi, got ({log_lo}, {log_hi}]"
        )));
    }
    if y < 2.0 {
        return Err(Error::Domain(format!("need at least one prime <= y, got y = {y}")));
    }
    let table = sieve_primes(numeric::floor(y) as u64)?;
    let primes = table.primes().to_vec();
    let mut values: Vec<LogSmoothValue> = Vec::new();
    walk_smooth(&primes, log_hi, &mut |exps, lv| {
        let above_lo = numeric::cmp_log_boundary(lv, log_lo, || {
            numeric::ln_big(&exact_big(&primes, exps))
        }) == Ordering::Greater;
        if above_lo {
            if values.len() >= enum_cap {
                return Err(Error::Capacity(format!(
                    "enumeration exceeded the configured cap of {enum_cap} values"
                )));
            }
            values.push(LogSmoothValue { exponents: exps.to_vec(), log_value: lv });
        }
        Ok(())
    })?;
    values.sort_by(|a, b| {
        let scale = numeric::abs(a.log_value).max(numeric::abs(b.log_value)).max(1.0);
        if numeric::abs(a.log_value - b.log_value) > numeric::TIE_EPS * scale {
            a.log_value.partial_cmp(&b.log_value).expect("finite logs")
        } else {
            // Distinct exponent vectors are distinct integers, so this is a
            // strict total order.
            a.exact_value(&primes).cmp(&b.exact_value(&primes))
        }
    });
    Ok(SmoothSet { primes, values })
}

/// Main term of Ennola's Psi(x, y) asymptotic, (ln x)^r / prod_i (i ln p_i),
/// with a flag marking whether y <= sqrt(ln x) (the range where the
/// asymptotic is valid) holds. Outside the range the value is still computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnnolaMain {
    pub value: f64,
    pub log_value: f64,
    pub r: u64,
    pub in_regime: bool,
}

pub fn psi_ennola_main(x: f64, y: f64, table: &PrimeTable) -> Result<EnnolaMain> {
    ennola_main_log(numeric::ln(x), y, table)
}

pub fn ennola_main_log(log_x: f64, y: f64, table: &PrimeTable) -> Result<EnnolaMain> {
    if log_x < numeric::ln(3.0) {
        return Err(Error::Domain(format!("main term needs x >= 3, got log x = {log_x}")));
    }
    let ps = table.primes_upto(y)?;
    if ps.is_empty() {
        return Err(Error::Domain(format!("need at least one prime <= y, got y = {y}")));
    }
    let r = ps.len() as u64;
    let mut denom = NeumaierSum::new();
    for (i, &p) in ps.iter().enumerate() {
        denom.add(numeric::ln((i + 1) as f64 * numeric::ln(p as f64)));
    }
    let log_value = r as f64 * numeric::ln(log_x) - denom.value();
    let root = numeric::sqrt(log_x);
    let in_regime = y >= 2.0 && y <= root + numeric::TIE_EPS * root.max(1.0);
    Ok(EnnolaMain { value: numeric::exp(log_value), log_value, r, in_regime })
}

/// Terms of the adaptive sequence inside [lo, hi], with their greatest prime
/// factors. Pure per segment, so callers may fan segments out across threads
/// as long as results are merged in ascending segment order.
pub fn adaptive_terms_in(
    bound: &SmoothnessBound,
    sieve: &GpfSieve,
    lo: u64,
    hi: u64,
) -> Result<Vec<(u64, u64)>> {
    let seg = sieve.segment(lo, hi)?;
    let mut out = Vec::new();
    let y_lo = bound.eval(lo as f64);
    let y_hi = bound.eval(hi as f64);
    if y_lo == y_hi {
        // The bound is non-decreasing, so equal endpoints pin it on the whole
        // segment and the filter reduces to one scalar threshold.
        for (n, g) in seg.iter() {
            if g as f64 <= y_lo {
                out.push((n, g));
            }
        }
    } else {
        for (n, g) in seg.iter() {
            if g as f64 <= bound.eval(n as f64) {
                out.push((n, g));
            }
        }
    }
    Ok(out)
}

/// The full adaptive sequence up to `limit`, via the segmented gpf sieve.
pub fn enumerate_adaptive(
    bound: &SmoothnessBound,
    limit: u64,
    limits: &Limits,
) -> Result<SmoothSequence> {
    if limit < 1 {
        return Err(Error::Domain("limit must be at least 1".into()));
    }
    if limit > NUMERIC_CAP_64 {
        return Err(Error::Capacity(format!(
            "limit {limit} exceeds the 64-bit pipeline cap {NUMERIC_CAP_64}"
        )));
    }
    if limits.segment_len == 0 {
        return Err(Error::Domain("segment length must be positive".into()));
    }
    let sieve = GpfSieve::new(limit, limits.segment_len)?;
    let mut terms = Vec::new();
    let mut gpfs = Vec::new();
    let mut lo = 1u64;
    while lo <= limit {
        let hi = limit.min(lo.saturating_add(limits.segment_len as u64 - 1));
        for (n, g) in adaptive_terms_in(bound, &sieve, lo, hi)? {
            terms.push(n);
            gpfs.push(g);
        }
        lo = hi + 1;
    }
    Ok(SmoothSequence { bound: bound.clone(), limit, terms, gpfs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lims() -> Limits {
        Limits::default()
    }

    #[test]
    fn bound_constructors_validate() {
        assert!(SmoothnessBound::constant(2.0).is_ok());
        assert!(SmoothnessBound::constant(1.5).is_err());
        assert!(SmoothnessBound::log_multiple(0.0).is_err());
        assert!(SmoothnessBound::power_log(1.0, -0.5).is_err());
        assert!(SmoothnessBound::step_table(&[]).is_err());
        assert!(SmoothnessBound::step_table(&[(10.0, 5.0), (5.0, 7.0)]).is_err());
        assert!(SmoothnessBound::step_table(&[(5.0, 7.0), (10.0, 5.0)]).is_err());
        assert!(SmoothnessBound::step_table(&[(5.0, 3.0), (10.0, 7.0)]).is_ok());
    }

    #[test]
    fn bound_eval_clamps_formula_kinds() {
        let lm = SmoothnessBound::log_multiple(1.0).unwrap();
        assert_eq!(lm.eval(12.0), 3.0); // ln 12 < 3 clamps up
        assert!(lm.eval(100.0) > 4.0);
        let pl = SmoothnessBound::power_log(1.0, 0.5).unwrap();
        assert_eq!(pl.eval(2.0), 3.0);
        let sr = SmoothnessBound::slow_regime(1.0).unwrap();
        assert_eq!(sr.eval(10.0), 3.0);
        // Constant is literal, no clamp.
        assert_eq!(SmoothnessBound::constant(2.0).unwrap().eval(1e9), 2.0);
    }

    #[test]
    fn bound_eval_non_decreasing_on_grid() {
        let bounds = [
            SmoothnessBound::log_multiple(1.7).unwrap(),
            SmoothnessBound::slow_regime(2.0).unwrap(),
            SmoothnessBound::power_log(0.9, 0.7).unwrap(),
            SmoothnessBound::step_table(&[(1.0, 2.0), (100.0, 5.0), (1e6, 11.0)]).unwrap(),
        ];
        for b in &bounds {
            let mut prev = f64::NEG_INFINITY;
            for i in 0..2000 {
                let x = 1.0 + i as f64 * 17.3;
                let v = b.eval(x);
                assert!(v >= prev, "bound decreased at x = {x}");
                prev = v;
            }
        }
    }

    #[test]
    fn step_table_lookup() {
        let st = SmoothnessBound::step_table(&[(10.0, 3.0), (100.0, 5.0)]).unwrap();
        assert_eq!(st.eval(2.0), 3.0); // below first threshold: first value
        assert_eq!(st.eval(10.0), 3.0);
        assert_eq!(st.eval(99.0), 3.0);
        assert_eq!(st.eval(100.0), 5.0);
        assert_eq!(st.eval(1e9), 5.0);
    }

    #[test]
    fn is_smooth_examples() {
        assert!(is_smooth(80, 5.0));
        assert!(!is_smooth(14, 5.0));
        assert!(is_smooth(1, 3.0));
        assert!(is_smooth(2_u64.pow(40), 2.0));
        assert!(!is_smooth(999_999_937, 1e6));
    }

    #[test]
    fn is_smooth_over_big() {
        let n = BigUint::from(2u64).pow(100) * BigUint::from(3u64).pow(60);
        assert!(is_smooth_over(&n, &[2, 3]));
        assert!(!is_smooth_over(&(n * BigUint::from(5u64)), &[2, 3]));
        assert!(is_smooth_over(&BigUint::from(1u64), &[2, 3]));
    }

    /// Brute-force Psi by trial division, the independent oracle.
    fn psi_oracle(x: u64, y: f64) -> u64 {
        (1..=x).filter(|&n| is_smooth_naive(n, y)).count() as u64
    }

    fn is_smooth_naive(mut n: u64, y: f64) -> bool {
        let mut d = 2u64;
        while n > 1 {
            if d as f64 > y {
                return false;
            }
            while n % d == 0 {
                n /= d;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn psi_exact_examples() {
        assert_eq!(psi_exact(100, 5.0), 34);
        assert_eq!(psi_exact(10, 2.0), 4);
        assert_eq!(psi_exact(1, 2.0), 1);
    }

    #[test]
    fn psi_exact_matches_oracle_small() {
        for &y in &[2.0, 3.0, 5.0, 7.0, 11.0] {
            for x in [1u64, 2, 17, 100, 999, 2000] {
                assert_eq!(psi_exact(x, y), psi_oracle(x, y), "x = {x}, y = {y}");
            }
        }
    }

    #[test]
    fn psi_plateau_between_primes() {
        for x in [100u64, 12345] {
            assert_eq!(psi_exact(x, 6.9), psi_exact(x, 5.0));
            assert_eq!(psi_exact(x, 10.99), psi_exact(x, 7.0));
        }
    }

    #[test]
    fn psi_log_agrees_with_integer_psi() {
        for &y in &[2.0, 3.0, 5.0, 11.0] {
            for x in 1..=400u64 {
                let via_log = psi_exact_log(numeric::ln(x as f64), y);
                assert_eq!(via_log, psi_exact(x, y), "x = {x}, y = {y}");
            }
        }
    }

    #[test]
    fn ennola_main_examples() {
        let table = sieve_primes(100).unwrap();
        // r = 2 at y = 3: (ln x)^2 / (ln 2 * 2 ln 3).
        let m = ennola_main_log(30.0, 3.0, &table).unwrap();
        let expected = 900.0 / (2.0f64.ln() * 2.0 * 3.0f64.ln());
        assert!((m.value - expected).abs() < 1e-9 * expected);
        assert_eq!(m.r, 2);
        assert!(m.in_regime);

        // Boundary of the regime: y = sqrt(log x) exactly.
        let m = ennola_main_log(9.0, 3.0, &table).unwrap();
        assert!((m.value - 81.0 / (2.0f64.ln() * 2.0 * 3.0f64.ln())).abs() < 1e-9 * m.value);
        assert!(m.in_regime);

        // r = 1 case; 2 <= sqrt(ln 100) = 2.1459... so still inside the regime.
        let m = psi_ennola_main(100.0, 2.0, &table).unwrap();
        assert!((m.value - 100.0f64.ln() / 2.0f64.ln()).abs() < 1e-9 * m.value);
        assert_eq!(m.r, 1);
        assert!(m.in_regime);

        // Clearly outside the regime.
        let m = psi_ennola_main(100.0, 5.0, &table).unwrap();
        assert!(!m.in_regime);
    }

    #[test]
    fn enumerate_smooth_examples() {
        let set = enumerate_smooth(3.0, 0.0, 13.0f64.ln(), 1 << 16).unwrap();
        let got: Vec<u64> = (0..set.len())
            .map(|i| set.exact(i).iter_u64_digits().next().unwrap())
            .collect();
        assert_eq!(got, vec![2, 3, 4, 6, 8, 9, 12]);

        let set = enumerate_smooth(2.0, 0.0, 8.0f64.ln(), 1 << 16).unwrap();
        let got: Vec<u64> = (0..set.len())
            .map(|i| set.exact(i).iter_u64_digits().next().unwrap())
            .collect();
        assert_eq!(got, vec![2, 4, 8]);
    }

    #[test]
    fn enumerate_smooth_counts_match_psi_difference() {
        // Count over (50, 100] in natural-log units must equal the psi
        // difference at the same boundaries.
        let set = enumerate_smooth(3.0, 50.0, 100.0, 1 << 20).unwrap();
        let expected = psi_exact_log(100.0, 3.0) - psi_exact_log(50.0, 3.0);
        assert_eq!(set.len() as u64, expected);
        // And for a small integer window against psi_exact.
        for x in [100u64, 1000, 65536] {
            let set = enumerate_smooth(11.0, 0.0, numeric::ln(x as f64), 1 << 20).unwrap();
            assert_eq!(set.len() as u64, psi_exact(x, 11.0) - 1, "x = {x}");
        }
    }

    #[test]
    fn enumerate_smooth_sorted_and_consistent() {
        let set = enumerate_smooth(7.0, 0.0, 60.0, 1 << 22).unwrap();
        let mut prev = BigUint::from(0u32);
        for (i, v) in set.values().iter().enumerate() {
            let exact = set.exact(i);
            assert!(exact > prev, "not strictly increasing at index {i}");
            let lv = v.log_value();
            let le = numeric::ln_big(&exact);
            assert!(
                (lv - le).abs() <= 1e-9 * le.max(1.0),
                "log mismatch at index {i}: {lv} vs {le}"
            );
            prev = exact;
        }
    }

    #[test]
    fn enumerate_smooth_includes_exact_upper_boundary_at_scale() {
        // 2^50 sits exactly on the closed upper end; the tie must resolve in.
        let set = enumerate_smooth(2.0, 0.0, 50.0 * core::f64::consts::LN_2, 1 << 16).unwrap();
        assert_eq!(set.len(), 50);
        assert_eq!(set.exact(49), BigUint::from(1u64) << 50);
    }

    #[test]
    fn enumerate_smooth_capacity_error() {
        assert!(matches!(enumerate_smooth(3.0, 0.0, 30.0, 4), Err(Error::Capacity(_))));
    }

    #[test]
    fn enumerate_smooth_rejects_bad_window() {
        assert!(enumerate_smooth(3.0, -1.0, 5.0, 100).is_err());
        assert!(enumerate_smooth(3.0, 5.0, 5.0, 100).is_err());
        assert!(enumerate_smooth(1.9, 0.0, 5.0, 100).is_err());
    }

    /// Brute-force adaptive sequence oracle.
    fn adaptive_oracle(bound: &SmoothnessBound, limit: u64) -> Vec<u64> {
        (1..=limit)
            .filter(|&n| {
                let g = crate::arith::greatest_prime_factor(n as i64);
                g as f64 <= bound.eval(n as f64)
            })
            .collect()
    }

    #[test]
    fn enumerate_adaptive_examples() {
        let b3 = SmoothnessBound::constant(3.0).unwrap();
        let seq = enumerate_adaptive(&b3, 13, &lims()).unwrap();
        assert_eq!(seq.terms(), &[1, 2, 3, 4, 6, 8, 9, 12]);

        let b5 = SmoothnessBound::constant(5.0).unwrap();
        let seq = enumerate_adaptive(&b5, 30, &lims()).unwrap();
        assert_eq!(
            seq.terms(),
            &[1, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15, 16, 18, 20, 24, 25, 27, 30]
        );

        let lm = SmoothnessBound::log_multiple(1.0).unwrap();
        let seq = enumerate_adaptive(&lm, 20, &lims()).unwrap();
        assert_eq!(seq.terms(), &[1, 2, 3, 4, 6, 8, 9, 12, 16, 18]);
    }

    #[test]
    fn enumerate_adaptive_matches_oracle() {
        let bounds = [
            SmoothnessBound::constant(3.0).unwrap(),
            SmoothnessBound::constant(5.0).unwrap(),
            SmoothnessBound::log_multiple(1.0).unwrap(),
            SmoothnessBound::step_table(&[(1.0, 2.0), (50.0, 5.0), (500.0, 7.0)]).unwrap(),
        ];
        for b in &bounds {
            let seq = enumerate_adaptive(b, 10_000, &lims()).unwrap();
            assert_eq!(seq.terms(), adaptive_oracle(b, 10_000).as_slice());
            for (i, &n) in seq.terms().iter().enumerate() {
                assert_eq!(seq.gpfs()[i], crate::arith::greatest_prime_factor(n as i64));
            }
        }
    }

    #[test]
    fn enumerate_adaptive_small_segments_agree() {
        let b = SmoothnessBound::constant(5.0).unwrap();
        let small = Limits { segment_len: 64, enum_cap: 1 << 20 };
        let a = enumerate_adaptive(&b, 5000, &small).unwrap();
        let c = enumerate_adaptive(&b, 5000, &lims()).unwrap();
        assert_eq!(a.terms(), c.terms());
    }

    #[test]
    fn doubling_closure_small() {
        for b in [
            SmoothnessBound::constant(3.0).unwrap(),
            SmoothnessBound::log_multiple(1.0).unwrap(),
        ] {
            let seq = enumerate_adaptive(&b, 100_000, &lims()).unwrap();
            for &n in seq.terms() {
                if 2 * n <= seq.limit() {
                    assert!(seq.terms().binary_search(&(2 * n)).is_ok(), "2*{n} missing");
                }
            }
        }
    }

    #[test]
    fn adaptive_capacity_guard() {
        let b = SmoothnessBound::constant(3.0).unwrap();
        assert!(matches!(
            enumerate_adaptive(&b, NUMERIC_CAP_64 + 1, &lims()),
            Err(Error::Capacity(_))
        ));
    }
}
