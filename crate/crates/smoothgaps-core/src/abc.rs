//! The gcd reduction of a consecutive pair into a coprime a + b = c triple,
//! its radical and quality, quality scans over a sequence, and the
//! primorial-based inequality diagnostics the reduction feeds.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::arith::{gcd, radical, PrimeTable};
use crate::bounds::BoundParams;
use crate::error::{Error, Result};
use crate::numeric;
use crate::smooth::SmoothSequence;

/// A consecutive pair reduced by its gcd: a = n_i/g, b = t/g, c = n_next/g
/// with a + b = c pairwise coprime, the radical of a*b*c, and the quality
/// ln c / ln radical.
#[derive(Debug, Clone, PartialEq)]
pub struct AbcTriple {
    pub n_i: u64,
    pub n_next: u64,
    pub g: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub radical: BigUint,
    /// Defined whenever the radical is at least 2, which holds for every
    /// reduced pair since c >= 2.
    pub quality: Option<f64>,
}

/// Reduce the pair (n_i, n_next) by g = gcd(n_i, n_next).
///
/// The three parts are pairwise coprime: a common prime of any two would
/// divide the third and hence g. The radical of the product is therefore the
/// exact product of the three radicals, which avoids factoring a*b*c as one
/// integer; that identity is asserted at runtime.
pub fn reduce_pair(n_i: u64, n_next: u64) -> Result<AbcTriple> {
    if !(1 <= n_i && n_i < n_next) {
        return Err(Error::Domain(format!(
            "reduce_pair needs 1 <= n_i < n_next, got ({n_i}, {n_next})"
        )));
    }
    let g = gcd(n_i, n_next)?;
    let a = n_i / g;
    let b = (n_next - n_i) / g;
    let c = n_next / g;
    assert_eq!(a + b, c, "gcd reduction must preserve the sum");
    assert!(
        gcd(a, b)? == 1 && gcd(a, c)? == 1 && gcd(b, c)? == 1,
        "reduced parts must be pairwise coprime"
    );
    let radical =
        BigUint::from(radical(a)) * BigUint::from(radical(b)) * BigUint::from(radical(c));
    let quality = if radical >= BigUint::from(2u32) {
        Some(numeric::ln(c as f64) / numeric::ln_big(&radical))
    } else {
        None
    };
    Ok(AbcTriple { n_i, n_next, g, a, b, c, radical, quality })
}

/// Log-space diagnostic of the primorial inequality behind the conditional
/// gap bound: (n_i / c_eps)^(1/(1+eps)) < t * prod_{p <= y_next} p, plus the
/// margin c2 y - theta(y) by which exp(c2 y) clears the primorial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcCheck {
    /// (ln n_i - ln c_eps) / (1 + eps).
    pub lhs_log: f64,
    /// ln t + theta(y_next), the log of t times the primorial.
    pub rhs_log: f64,
    /// lhs < rhs under the configured constants; a conditional diagnostic,
    /// not a theorem check.
    pub holds: bool,
    /// c2 y_next - theta(y_next).
    pub primorial_margin: f64,
}

pub fn check_abc_primorial(
    triple: &AbcTriple,
    y_next: f64,
    params: &BoundParams,
    table: &PrimeTable,
) -> Result<AbcCheck> {
    params.validate()?;
    let t = triple.n_next - triple.n_i;
    let theta = table.chebyshev_theta(y_next)?;
    let lhs_log =
        (numeric::ln(triple.n_i as f64) - numeric::ln(params.c_eps)) / (1.0 + params.epsilon);
    let rhs_log = numeric::ln(t as f64) + theta;
    Ok(AbcCheck {
        lhs_log,
        rhs_log,
        holds: lhs_log < rhs_log,
        primorial_margin: params.c2 * y_next - theta,
    })
}

/// The top_k triples over all consecutive pairs of the sequence, ranked by
/// quality descending with ties broken by smaller n_i. Deterministic.
pub fn scan_qualities(seq: &SmoothSequence, top_k: usize) -> Result<Vec<AbcTriple>> {
    if seq.len() < 2 {
        return Err(Error::Domain("need at least two terms to scan".into()));
    }
    let triples: Vec<AbcTriple> = seq
        .terms()
        .windows(2)
        .map(|w| reduce_pair(w[0], w[1]))
        .collect::<Result<_>>()?;
    rank_triples(triples, top_k)
}

/// Sort triples by quality descending (n_i ascending on ties) and keep the
/// first top_k.
pub fn rank_triples(mut triples: Vec<AbcTriple>, top_k: usize) -> Result<Vec<AbcTriple>> {
    if top_k < 1 {
        return Err(Error::Domain("top_k must be at least 1".into()));
    }
    triples.sort_by(|x, y| {
        let qx = x.quality.unwrap_or(f64::NEG_INFINITY);
        let qy = y.quality.unwrap_or(f64::NEG_INFINITY);
        qy.total_cmp(&qx).then(x.n_i.cmp(&y.n_i))
    });
    triples.truncate(top_k);
    Ok(triples)
}
