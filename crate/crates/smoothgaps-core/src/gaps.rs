//! Consecutive-gap extraction from an adaptive smooth sequence, the exponent
//! kappa solving t = n / (ln n)^kappa for an observed gap, and streaming scan
//! statistics over dyadic ranges.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{sieve_primes, GpfSieve, PrimeTable};
use crate::error::{Error, Result};
use crate::numeric;
use crate::smooth::{adaptive_terms_in, SmoothSequence, SmoothnessBound};
use crate::Limits;

/// Below this the double log is too small for the exponent to mean anything;
/// kappa is left undefined.
pub const KAPPA_MIN_N: u64 = 16;

/// One consecutive pair of the sequence with its gap and smoothness data.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRecord {
    /// 1-based position of the left endpoint in the sequence.
    pub index: usize,
    pub n_i: u64,
    pub n_next: u64,
    /// Gap n_next - n_i, at least 1 and (by doubling closure) at most n_i.
    pub t: u64,
    /// Greatest prime factor of n_i.
    pub p_of_n: u64,
    /// Bound evaluated at n_i.
    pub y_at_n: f64,
    /// Number of primes up to the bound evaluated at sqrt(n_i).
    pub r_at_sqrt: u64,
    /// Defined for n_i >= 16 only.
    pub kappa: Option<f64>,
}

/// The exponent c with t = n / (ln n)^c, i.e. ln(n/t) / ln ln n.
pub fn kappa(n: u64, t: u64) -> Result<f64> {
    if n < KAPPA_MIN_N {
        return Err(Error::Domain(format!(
            "kappa needs n >= {KAPPA_MIN_N} for a stable exponent, got {n}"
        )));
    }
    if t < 1 {
        return Err(Error::Domain("kappa needs a positive gap".into()));
    }
    let ln_n = numeric::ln(n as f64);
    Ok((ln_n - numeric::ln(t as f64)) / numeric::ln(ln_n))
}

fn make_record(
    index: usize,
    n_i: u64,
    n_next: u64,
    p_of_n: u64,
    bound: &SmoothnessBound,
    table: &PrimeTable,
) -> Result<GapRecord> {
    let t = n_next - n_i;
    let y_at_n = bound.eval(n_i as f64);
    let r_at_sqrt = table.prime_pi(bound.eval(numeric::sqrt(n_i as f64)))?;
    let kappa = if n_i >= KAPPA_MIN_N { Some(kappa(n_i, t)?) } else { None };
    Ok(GapRecord { index, n_i, n_next, t, p_of_n, y_at_n, r_at_sqrt, kappa })
}

/// One record per consecutive pair of the sequence, in order. `table` must
/// cover the bound values queried (up to y applied at sqrt of the last term).
pub fn consecutive_gaps(seq: &SmoothSequence, table: &PrimeTable) -> Result<Vec<GapRecord>> {
    let zipped: Vec<(u64, u64)> =
        seq.terms().iter().copied().zip(seq.gpfs().iter().copied()).collect();
    records_from_terms(seq.bound(), table, &zipped)
}

/// Gap records from an explicit run of (term, gpf) pairs, for callers that
/// stitched the sequence together segment by segment.
pub fn records_from_terms(
    bound: &SmoothnessBound,
    table: &PrimeTable,
    terms: &[(u64, u64)],
) -> Result<Vec<GapRecord>> {
    if terms.len() < 2 {
        return Err(Error::Domain("need at least two terms to form a gap".into()));
    }
    let mut out = Vec::with_capacity(terms.len() - 1);
    for (i, w) in terms.windows(2).enumerate() {
        out.push(make_record(i + 1, w[0].0, w[1].0, w[0].1, bound, table)?);
    }
    Ok(out)
}

/// Per-dyadic-range tallies: pairs with n_i in [2^k, 2^(k+1)), and how many
/// of them are tight, meaning t < n_i / ln n_i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DyadicCount {
    pub pairs: u64,
    pub tight: u64,
}

/// Statistics over every consecutive pair with n_i >= n_floor.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub limit: u64,
    pub n_floor: u64,
    pub records: u64,
    pub min_t: u64,
    pub min_t_pair: (u64, u64),
    pub max_kappa: f64,
    pub max_kappa_pair: (u64, u64),
    /// 64 buckets over floor(log2 t).
    pub hist_log2_t: Vec<u64>,
    pub dyadic: BTreeMap<u32, DyadicCount>,
}

/// Streaming fold of gap statistics. Feed terms in strictly increasing
/// order (across segment boundaries too); memory stays bounded regardless of
/// the scan size. Ties on min/max keep the first pair encountered.
#[derive(Debug, Clone)]
pub struct ScanAccumulator {
    report: ScanReport,
    prev: Option<u64>,
}

impl ScanAccumulator {
    pub fn new(limit: u64, n_floor: u64) -> Result<Self> {
        if !(limit > n_floor && n_floor >= KAPPA_MIN_N) {
            return Err(Error::Domain(format!(
                "scan needs limit > n_floor >= {KAPPA_MIN_N}, got limit {limit}, n_floor {n_floor}"
            )));
        }
        Ok(ScanAccumulator {
            report: ScanReport {
                limit,
                n_floor,
                records: 0,
                min_t: u64::MAX,
                min_t_pair: (0, 0),
                max_kappa: f64::NEG_INFINITY,
                max_kappa_pair: (0, 0),
                hist_log2_t: vec![0; 64],
                dyadic: BTreeMap::new(),
            },
            prev: None,
        })
    }

    pub fn push_term(&mut self, n: u64) -> Result<()> {
        if let Some(p) = self.prev {
            debug_assert!(n > p, "terms must arrive in increasing order");
            if p >= self.report.n_floor {
                self.fold_pair(p, n)?;
            }
        }
        self.prev = Some(n);
        Ok(())
    }

    fn fold_pair(&mut self, n_i: u64, n_next: u64) -> Result<()> {
        let report = &mut self.report;
        let t = n_next - n_i;
        report.records += 1;
        if t < report.min_t {
            report.min_t = t;
            report.min_t_pair = (n_i, n_next);
        }
        let k = kappa(n_i, t)?;
        if k > report.max_kappa {
            report.max_kappa = k;
            report.max_kappa_pair = (n_i, n_next);
        }
        let bucket = (t.ilog2() as usize).min(63);
        report.hist_log2_t[bucket] += 1;
        let range = n_i.ilog2();
        let entry = report.dyadic.entry(range).or_default();
        entry.pairs += 1;
        if (t as f64) * numeric::ln(n_i as f64) < n_i as f64 {
            entry.tight += 1;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<ScanReport> {
        if self.report.records == 0 {
            return Err(Error::Domain(format!(
                "no consecutive pairs with n_i in [{}, {})",
                self.report.n_floor, self.report.limit
            )));
        }
        Ok(self.report)
    }
}

/// Stream the adaptive sequence segment by segment and fold gap statistics.
pub fn min_gap_scan(
    bound: &SmoothnessBound,
    limit: u64,
    n_floor: u64,
    limits: &Limits,
) -> Result<ScanReport> {
    if limits.segment_len == 0 {
        return Err(Error::Domain("segment length must be positive".into()));
    }
    let mut acc = ScanAccumulator::new(limit, n_floor)?;
    let sieve = GpfSieve::new(limit, limits.segment_len)?;
    let mut lo = 1u64;
    while lo <= limit {
        let hi = limit.min(lo.saturating_add(limits.segment_len as u64 - 1));
        for (n, _) in adaptive_terms_in(bound, &sieve, lo, hi)? {
            acc.push_term(n)?;
        }
        lo = hi + 1;
    }
    acc.finish()
}

/// Convenience: a table big enough for the pi queries a scan of `bound` up to
/// `limit` will make.
pub fn table_for(bound: &SmoothnessBound, limit: u64) -> Result<PrimeTable> {
    let y_max = bound.eval(limit as f64).max(2.0);
    sieve_primes(numeric::floor(y_max) as u64 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth::enumerate_adaptive;

    fn lims() -> Limits {
        Limits::default()
    }

    fn const_bound(y: f64) -> SmoothnessBound {
        SmoothnessBound::constant(y).unwrap()
    }

    #[test]
    fn gaps_of_constant3_to_13() {
        let b = const_bound(3.0);
        let seq = enumerate_adaptive(&b, 13, &lims()).unwrap();
        let table = table_for(&b, 13).unwrap();
        let recs = consecutive_gaps(&seq, &table).unwrap();
        let ts: Vec<u64> = recs.iter().map(|r| r.t).collect();
        assert_eq!(ts, vec![1, 1, 1, 2, 2, 1, 3]);
        let last = recs.last().unwrap();
        assert_eq!((last.n_i, last.n_next, last.t), (9, 12, 3));
        assert!(last.kappa.is_none(), "kappa undefined below 16");
        // Pair (8, 9) sits at index 6 with t = 1.
        assert_eq!((recs[5].n_i, recs[5].n_next, recs[5].t), (8, 9, 1));
        // Indices are 1-based and contiguous.
        for (i, r) in recs.iter().enumerate() {
            assert_eq!(r.index, i + 1);
        }
    }

    #[test]
    fn gaps_need_two_terms() {
        let b = const_bound(3.0);
        let seq = enumerate_adaptive(&b, 1, &lims()).unwrap();
        let table = table_for(&b, 13).unwrap();
        assert!(matches!(consecutive_gaps(&seq, &table), Err(Error::Domain(_))));
    }

    #[test]
    fn kappa_examples() {
        let k = kappa(80, 1).unwrap();
        let expected = 80.0f64.ln() / 80.0f64.ln().ln();
        assert!((k - expected).abs() < 1e-12);
        assert!((k - 2.9658).abs() < 1e-4);

        assert_eq!(kappa(100, 100).unwrap(), 0.0);

        let k = kappa(1_000_000, 1000).unwrap();
        let expected = 1000.0f64.ln() / 1_000_000.0f64.ln().ln();
        assert!((k - expected).abs() < 1e-12);
        assert!((k - 2.63073).abs() < 1e-4);

        assert!(matches!(kappa(15, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn kappa_round_trip() {
        for &(n, t) in &[(16u64, 1u64), (80, 1), (1000, 37), (1_000_000, 999), (65536, 65536)] {
            let k = kappa(n, t).unwrap();
            let ln_n = (n as f64).ln();
            let t_rec = (ln_n - k * ln_n.ln()).exp();
            assert!(
                (t_rec - t as f64).abs() <= 1e-9 * t as f64,
                "round trip failed for ({n}, {t}): {t_rec}"
            );
        }
    }

    #[test]
    fn record_invariants_on_constant5() {
        let b = const_bound(5.0);
        let seq = enumerate_adaptive(&b, 50_000, &lims()).unwrap();
        let table = table_for(&b, 50_000).unwrap();
        let recs = consecutive_gaps(&seq, &table).unwrap();
        for r in &recs {
            assert!(r.t >= 1 && r.t <= r.n_i, "gap bounds violated at {:?}", r);
            assert!(r.p_of_n as f64 <= 5.0);
            assert_eq!(r.r_at_sqrt, 3); // pi(5) = 3 for a constant bound
            if let Some(k) = r.kappa {
                assert!(k.is_finite());
            } else {
                assert!(r.n_i < 16);
            }
        }
    }

    #[test]
    fn scan_powers_of_two() {
        // Constant bound 2: the sequence is exactly the powers of two, so
        // every gap equals n_i itself and the minimum is at (16, 32).
        let report = min_gap_scan(&const_bound(2.0), 1024, 16, &lims()).unwrap();
        assert_eq!(report.min_t, 16);
        assert_eq!(report.min_t_pair, (16, 32));
        assert_eq!(report.records, 6); // (16,32) ... (512,1024)
        let total: u64 = report.hist_log2_t.iter().sum();
        assert_eq!(total, report.records);
        // t = n means kappa = 0 everywhere.
        assert_eq!(report.max_kappa, 0.0);
    }

    /// Brute-force oracle over the naive sequence.
    fn scan_oracle(y: f64, limit: u64, n_floor: u64) -> (u64, (u64, u64), f64, (u64, u64)) {
        let terms: Vec<u64> = (1..=limit).filter(|&n| crate::smooth::is_smooth(n, y)).collect();
        let mut min_t = u64::MAX;
        let mut min_pair = (0, 0);
        let mut max_k = f64::NEG_INFINITY;
        let mut max_pair = (0, 0);
        for w in terms.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a < n_floor {
                continue;
            }
            let t = b - a;
            if t < min_t {
                min_t = t;
                min_pair = (a, b);
            }
            let k = ((a as f64).ln() - (t as f64).ln()) / (a as f64).ln().ln();
            if k > max_k {
                max_k = k;
                max_pair = (a, b);
            }
        }
        (min_t, min_pair, max_k, max_pair)
    }

    #[test]
    fn scan_matches_oracle_constant5() {
        let report = min_gap_scan(&const_bound(5.0), 10_000, 16, &lims()).unwrap();
        let (min_t, min_pair, max_k, max_pair) = scan_oracle(5.0, 10_000, 16);
        assert_eq!(report.min_t, min_t);
        assert_eq!(report.min_t_pair, min_pair);
        assert_eq!(report.max_kappa_pair, max_pair);
        assert!((report.max_kappa - max_k).abs() < 1e-12);
        // The reported extreme pair has t < n / ln n.
        let (a, b) = report.max_kappa_pair;
        let t = b - a;
        assert!((t as f64) < a as f64 / (a as f64).ln());
        // (80, 81) is the last twin at y = 5 and carries the largest kappa;
        // the smallest gap is already attained at (24, 25).
        assert_eq!(report.max_kappa_pair, (80, 81));
        assert_eq!(report.min_t, 1);
        assert_eq!(report.min_t_pair, (24, 25));
    }

    #[test]
    fn scan_is_segment_size_invariant() {
        let small = Limits { segment_len: 128, enum_cap: 1 << 20 };
        let a = min_gap_scan(&const_bound(5.0), 20_000, 16, &small).unwrap();
        let b = min_gap_scan(&const_bound(5.0), 20_000, 16, &lims()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scan_rejects_bad_ranges() {
        let b = const_bound(5.0);
        assert!(matches!(min_gap_scan(&b, 100, 100, &lims()), Err(Error::Domain(_))));
        assert!(matches!(min_gap_scan(&b, 100, 8, &lims()), Err(Error::Domain(_))));
    }
}
