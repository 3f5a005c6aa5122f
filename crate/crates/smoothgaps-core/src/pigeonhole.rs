//! The constructive small-gap machine: collect the smooth population of a
//! half interval (sqrt X, X], split it into dyadic bins, pick the densest
//! bin, and return the closest pair inside it together with the explicit
//! bound its gap is certified against. Heights as large as e^200 are handled
//! in log space, with exact big-integer materialization only where values
//! are compared or subtracted.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigUint;

use crate::arith::sieve_primes;
use crate::bounds::{constructive_gap_bound_log, BoundParams};
use crate::error::{Error, Result};
use crate::numeric::{self, LN_2};
use crate::smooth::{ennola_main_log, enumerate_smooth, SmoothSet, SmoothnessBound};
use crate::Limits;

/// Which branch of the argument applied at this height.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// y(sqrt X) <= (ln X)^(1/4): the dyadic pigeonhole runs and returns a
    /// certified pair.
    Constructive,
    /// y(sqrt X) > (ln X)^(1/4): gaps in (sqrt X, X] are bounded by the
    /// doubling closure alone; no pair is produced.
    Trivial,
}

/// The fallback certificate for the trivial regime, evaluated at n = X:
/// exp(c1 y(n)) / (ln n)^(r'-1) >= exp(y(n)), which makes the upper bound at
/// least 2n and therefore larger than any gap out of n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrivialCert {
    pub c1: f64,
    pub lhs_log: f64,
    pub rhs_log: f64,
    pub holds: bool,
}

/// Everything the construction produced at one height.
#[derive(Debug, Clone, PartialEq)]
pub struct PigeonholeResult {
    pub log_x: f64,
    /// Bound evaluated at sqrt X; the population is smooth to this.
    pub y_sqrt_x: f64,
    /// Primes up to y(sqrt X).
    pub r: u64,
    pub regime: Regime,
    /// Population size of (sqrt X, X]; zero in the trivial regime.
    pub members: u64,
    /// Number of dyadic bins.
    pub j: u32,
    /// (k, count) for k = 1..=j; bin k covers (X/2^k, X/2^(k-1)].
    pub bins: Vec<(u32, u64)>,
    /// Densest bin, smallest k on ties.
    pub chosen_h: Option<u32>,
    /// Adjacent members of the chosen bin with the smallest gap.
    pub pair: Option<(BigUint, BigUint)>,
    pub gap: Option<BigUint>,
    pub gap_log: Option<f64>,
    /// Log of the explicit pair bound 3 n (s ln y)^s / (ln n)^(r'-1).
    pub pair_bound_log: Option<f64>,
    pub r_prime: Option<u64>,
    pub s: Option<u64>,
    /// gap_log <= pair_bound_log.
    pub certified: Option<bool>,
    /// Population against half the main-term prediction (reported, never
    /// asserted: the prediction has an unspecified validity threshold).
    pub density_ratio: Option<f64>,
    pub trivial: Option<TrivialCert>,
}

/// Every y(sqrt X)-smooth integer in (sqrt X, X], ascending. A main-term
/// estimate guards the configured cap before any enumeration happens.
pub fn population(log_x: f64, bound: &SmoothnessBound, limits: &Limits) -> Result<SmoothSet> {
    check_height(log_x)?;
    let y = bound.eval_log(log_x / 2.0);
    let table = sieve_primes(numeric::floor(y.max(2.0)) as u64)?;
    let hi = ennola_main_log(log_x, y, &table)?.value;
    let lo = ennola_main_log(log_x / 2.0, y, &table)?.value;
    let projected = hi - lo;
    if projected > limits.enum_cap as f64 {
        return Err(Error::Capacity(format!(
            "projected population of {projected:.0} exceeds the cap of {}",
            limits.enum_cap
        )));
    }
    enumerate_smooth(y, log_x / 2.0, log_x, limits.enum_cap)
}

fn check_height(log_x: f64) -> Result<()> {
    let floor9 = numeric::ln(9.0);
    if log_x < floor9 - numeric::EXACT_EPS {
        return Err(Error::Domain(format!("construction needs X >= 9, got ln X = {log_x}")));
    }
    Ok(())
}

/// Number of dyadic bins and the per-bin counts for a population of
/// (sqrt X, X]. Bin k holds the members of (X/2^k, X/2^(k-1)]; j is the
/// unique integer with X/2^j < sqrt X <= X/2^(j-1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicBins {
    pub j: u32,
    pub counts: Vec<(u32, u64)>,
}

pub fn bin_dyadic(set: &SmoothSet, log_x: f64) -> Result<DyadicBins> {
    let (j, assign) = assign_bins(set, log_x)?;
    let mut counts = vec![0u64; j as usize];
    for &k in &assign {
        counts[(k - 1) as usize] += 1;
    }
    Ok(DyadicBins { j, counts: (1..=j).zip(counts).collect() })
}

/// j plus one bin index per member, in the member order of `set`.
fn assign_bins(set: &SmoothSet, log_x: f64) -> Result<(u32, Vec<u32>)> {
    check_height(log_x)?;
    let j = bin_count(log_x);
    let half = log_x / 2.0;
    let mut assign = Vec::with_capacity(set.len());
    for (idx, v) in set.values().iter().enumerate() {
        let exact = || numeric::ln_big(&set.exact(idx));
        if numeric::cmp_log_boundary(v.log_value(), half, exact) != Ordering::Greater
            || numeric::cmp_log_boundary(v.log_value(), log_x, exact) == Ordering::Greater
        {
            return Err(Error::Domain(format!("member at index {idx} lies outside (sqrt X, X]")));
        }
        let mut t = (log_x - v.log_value()) / LN_2;
        if numeric::abs(t - numeric::round(t)) <= numeric::TIE_EPS * numeric::abs(t).max(1.0) {
            // Near a bin boundary: re-derive the member log exactly first.
            t = (log_x - numeric::ln_big(&set.exact(idx))) / LN_2;
        }
        let k = (numeric::floor_with_tie(t) as i64 + 1).clamp(1, j as i64) as u32;
        assign.push(k);
    }
    Ok((j, assign))
}

/// The unique j with X/2^j < sqrt X <= X/2^(j-1), i.e. floor of
/// ln(sqrt X)/ln 2 plus one, with exact integer arguments kept exact.
fn bin_count(log_x: f64) -> u32 {
    let u = (log_x / 2.0) / LN_2;
    (numeric::floor_with_tie(u) as i64 + 1).max(1) as u32
}

/// Run the whole construction at height ln X.
pub fn find_small_gap(
    log_x: f64,
    bound: &SmoothnessBound,
    params: &BoundParams,
    limits: &Limits,
) -> Result<PigeonholeResult> {
    check_height(log_x)?;
    params.validate()?;
    let y_sqrt_x = bound.eval_log(log_x / 2.0);
    let y_at_x = bound.eval_log(log_x);
    let table = sieve_primes(numeric::floor(y_at_x.max(y_sqrt_x).max(2.0)) as u64 + 1)?;
    let r = table.prime_pi(y_sqrt_x)?;
    let quarter = numeric::powf(log_x, 0.25);
    let constructive = y_sqrt_x <= quarter + numeric::TIE_EPS * quarter.max(1.0);

    if !constructive {
        // Doubling-closure branch: report the certificate at n = X with the
        // configured c1 instead of a pair.
        let lhs_log = params.c1 * y_at_x - r.saturating_sub(1) as f64 * numeric::ln(log_x);
        let cert =
            TrivialCert { c1: params.c1, lhs_log, rhs_log: y_at_x, holds: lhs_log >= y_at_x };
        return Ok(PigeonholeResult {
            log_x,
            y_sqrt_x,
            r,
            regime: Regime::Trivial,
            members: 0,
            j: 0,
            bins: Vec::new(),
            chosen_h: None,
            pair: None,
            gap: None,
            gap_log: None,
            pair_bound_log: None,
            r_prime: None,
            s: None,
            certified: None,
            density_ratio: None,
            trivial: Some(cert),
        });
    }

    let set = population(log_x, bound, limits)?;
    let (j, assign) = assign_bins(&set, log_x)?;
    let mut counts = vec![0u64; j as usize];
    for &k in &assign {
        counts[(k - 1) as usize] += 1;
    }
    let (best_idx, &best_count) = counts
        .iter()
        .enumerate()
        .max_by(|(ia, ca), (ib, cb)| ca.cmp(cb).then(ib.cmp(ia)))
        .expect("at least one bin");
    let chosen_h = best_idx as u32 + 1;
    if best_count < 2 {
        return Err(Error::ConstructionFailed(format!(
            "densest bin {chosen_h} holds {best_count} member(s) at ln X = {log_x}; \
             the height is below the threshold where the pigeonhole bites"
        )));
    }

    // Materialize the chosen bin (ascending) and take the closest adjacent
    // pair, first one on ties.
    let bin_members: Vec<BigUint> = assign
        .iter()
        .enumerate()
        .filter(|(_, &k)| k == chosen_h)
        .map(|(idx, _)| set.exact(idx))
        .collect();
    let mut best_gap: Option<BigUint> = None;
    let mut best_pair: Option<(BigUint, BigUint)> = None;
    for w in bin_members.windows(2) {
        let gap = &w[1] - &w[0];
        if best_gap.as_ref().map_or(true, |g| gap < *g) {
            best_gap = Some(gap);
            best_pair = Some((w[0].clone(), w[1].clone()));
        }
    }
    let (n_i, n_next) = best_pair.expect("bin has at least two members");
    let gap = best_gap.expect("gap computed alongside pair");
    let gap_log = numeric::ln_big(&gap);
    let ln_ni = numeric::ln_big(&n_i);
    let y_sqrt_ni = bound.eval_log(ln_ni / 2.0);
    let y_ni = bound.eval_log(ln_ni);
    let r_prime = table.prime_pi(y_sqrt_ni)?;
    let s = table.prime_pi(y_ni)?;
    let pair_bound_log = constructive_gap_bound_log(ln_ni, r_prime, s, y_ni)?;
    let members = set.len() as u64;
    let main_log = ennola_main_log(log_x, y_sqrt_x, &table)?.log_value;
    let density_ratio = numeric::exp(numeric::ln(members as f64) + LN_2 - main_log);

    Ok(PigeonholeResult {
        log_x,
        y_sqrt_x,
        r,
        regime: Regime::Constructive,
        members,
        j,
        bins: (1..=j).zip(counts).collect(),
        chosen_h: Some(chosen_h),
        pair: Some((n_i, n_next)),
        gap: Some(gap),
        gap_log: Some(gap_log),
        pair_bound_log: Some(pair_bound_log),
        r_prime: Some(r_prime),
        s: Some(s),
        certified: Some(gap_log <= pair_bound_log),
        density_ratio: Some(density_ratio),
        trivial: None,
    })
}
