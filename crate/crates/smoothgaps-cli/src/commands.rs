//! The seven subcommands. Sieved scans fan segments out over the configured
//! worker threads and stitch results in ascending order, so output bytes are
//! independent of the thread count.

use std::fs::File;
use std::io::{BufWriter, Write};

use serde::Serialize;

use smoothgaps_core::abc::{check_abc_primorial, rank_triples, reduce_pair};
use smoothgaps_core::arith::{greatest_prime_factor, sieve_primes, GpfSieve, PrimeTable};
use smoothgaps_core::bounds::{
    abc_gap_lower_log, check_gap_chain, constructive_gap_bound_log, delta, gap_lower_bound_log,
    gap_upper_bound_log,
};
use smoothgaps_core::gaps::{self, records_from_terms, GapRecord, ScanAccumulator};
use smoothgaps_core::numeric;
use smoothgaps_core::pigeonhole::{find_small_gap, Regime};
use smoothgaps_core::smooth::{
    adaptive_terms_in, ennola_main_log, psi_ennola_main, psi_exact, psi_exact_log,
};

use crate::config::{resolve, Cli, Command, Resolved};
use crate::output::{opt, Emitter, Format, Row};
use crate::{par, CliError};

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    let resolved = resolve(&cli)?;
    let format = Format::parse(&resolved.config.format).expect("validated in resolve");
    let sink: Box<dyn Write> = match &cli.common.out {
        Some(path) => Box::new(File::create(path).map_err(CliError::Io)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut emitter = Emitter::new(format, BufWriter::new(sink));
    emitter.config(&resolved.config).map_err(CliError::Io)?;

    match &cli.command {
        Command::Sequence => cmd_sequence(&resolved, &mut emitter)?,
        Command::Gaps { stats, n_floor } => {
            if *stats {
                cmd_gap_stats(&resolved, *n_floor, &mut emitter)?
            } else {
                cmd_gaps(&resolved, &mut emitter)?
            }
        }
        Command::Psi { x, y } => cmd_psi(&resolved, *x, *y, &mut emitter)?,
        Command::Bounds { n, log_n, t } => cmd_bounds(&resolved, *n, *log_n, *t, &mut emitter)?,
        Command::Pigeonhole => cmd_pigeonhole(&resolved, &mut emitter)?,
        Command::Abc { top } => cmd_abc(&resolved, *top, &mut emitter)?,
        Command::Report => cmd_report(&resolved, &mut emitter)?,
    }
    emitter.finish().map_err(CliError::Io)
}

fn require_limit(r: &Resolved) -> Result<u64, CliError> {
    r.config
        .limit
        .ok_or_else(|| CliError::Usage("this command needs --limit".into()))
}

fn require_log_x(r: &Resolved) -> Result<f64, CliError> {
    r.config
        .log_x
        .ok_or_else(|| CliError::Usage("this command needs --log-x".into()))
}

/// Stitched (term, gpf) run of the adaptive sequence up to `limit`, produced
/// segment-parallel and merged in order.
fn scan_terms(r: &Resolved, limit: u64) -> Result<Vec<(u64, u64)>, CliError> {
    if limit < 1 {
        return Err(CliError::Usage("limit must be at least 1".into()));
    }
    if limit > smoothgaps_core::smooth::NUMERIC_CAP_64 {
        return Err(CliError::Core(smoothgaps_core::Error::Capacity(format!(
            "limit {limit} exceeds the 64-bit pipeline cap"
        ))));
    }
    let sieve = GpfSieve::new(limit, r.limits.segment_len).map_err(CliError::Core)?;
    let mut segments = Vec::new();
    let mut lo = 1u64;
    while lo <= limit {
        let hi = limit.min(lo.saturating_add(r.limits.segment_len as u64 - 1));
        segments.push((lo, hi));
        lo = hi + 1;
    }
    let bound = &r.bound;
    let results = par::ordered_map(&segments, r.threads, |&(lo, hi)| {
        adaptive_terms_in(bound, &sieve, lo, hi)
    });
    let mut terms = Vec::new();
    for res in results {
        terms.extend(res.map_err(CliError::Core)?);
    }
    Ok(terms)
}

fn scan_table(r: &Resolved, limit: u64) -> Result<PrimeTable, CliError> {
    gaps::table_for(&r.bound, limit).map_err(CliError::Core)
}

#[derive(Serialize)]
struct TermRow {
    i: usize,
    n: u64,
    p_of_n: u64,
}

impl Row for TermRow {
    const TYPE: &'static str = "term";
    const HEADER: &'static str = "i,n,p_of_n";
    fn csv(&self) -> String {
        format!("{},{},{}", self.i, self.n, self.p_of_n)
    }
}

fn cmd_sequence<W: Write>(r: &Resolved, em: &mut Emitter<W>) -> Result<(), CliError> {
    let limit = require_limit(r)?;
    let terms = scan_terms(r, limit)?;
    em.header::<TermRow>().map_err(CliError::Io)?;
    for (i, (n, g)) in terms.iter().enumerate() {
        em.row(&TermRow { i: i + 1, n: *n, p_of_n: *g }).map_err(CliError::Io)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct GapRow {
    i: usize,
    n_i: u64,
    n_next: u64,
    t: u64,
    p_of_n: u64,
    y_at_n: f64,
    r_at_sqrt: u64,
    kappa: Option<f64>,
}

impl Row for GapRow {
    const TYPE: &'static str = "gap";
    const HEADER: &'static str = "i,n_i,n_next,t,p_of_n,y_at_n,r_at_sqrt,kappa";
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.i,
            self.n_i,
            self.n_next,
            self.t,
            self.p_of_n,
            self.y_at_n,
            self.r_at_sqrt,
            opt(&self.kappa)
        )
    }
}

impl From<&GapRecord> for GapRow {
    fn from(rec: &GapRecord) -> Self {
        GapRow {
            i: rec.index,
            n_i: rec.n_i,
            n_next: rec.n_next,
            t: rec.t,
            p_of_n: rec.p_of_n,
            y_at_n: rec.y_at_n,
            r_at_sqrt: rec.r_at_sqrt,
            kappa: rec.kappa,
        }
    }
}

fn cmd_gaps<W: Write>(r: &Resolved, em: &mut Emitter<W>) -> Result<(), CliError> {
    let limit = require_limit(r)?;
    let terms = scan_terms(r, limit)?;
    let table = scan_table(r, limit)?;
    let records = records_from_terms(&r.bound, &table, &terms).map_err(CliError::Core)?;
    em.header::<GapRow>().map_err(CliError::Io)?;
    for rec in &records {
        em.row(&GapRow::from(rec)).map_err(CliError::Io)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct StatRow {
    metric: String,
    value: serde_json::Value,
}

impl Row for StatRow {
    const TYPE: &'static str = "stat";
    const HEADER: &'static str = "record,metric_or_k,value,extra";
    fn csv(&self) -> String {
        format!("stat,{},{},", self.metric, self.value)
    }
}

#[derive(Serialize)]
struct DyadicRow {
    k: u32,
    pairs: u64,
    tight: u64,
}

impl Row for DyadicRow {
    const TYPE: &'static str = "dyadic";
    const HEADER: &'static str = "record,metric_or_k,value,extra";
    fn csv(&self) -> String {
        format!("dyadic,{},{},{}", self.k, self.pairs, self.tight)
    }
}

#[derive(Serialize)]
struct HistRow {
    log2_t: u32,
    count: u64,
}

impl Row for HistRow {
    const TYPE: &'static str = "hist";
    const HEADER: &'static str = "record,metric_or_k,value,extra";
    fn csv(&self) -> String {
        format!("hist,{},{},", self.log2_t, self.count)
    }
}

fn cmd_gap_stats<W: Write>(r: &Resolved, n_floor: u64, em: &mut Emitter<W>) -> Result<(), CliError> {
    let limit = require_limit(r)?;
    let mut acc = ScanAccumulator::new(limit, n_floor).map_err(CliError::Core)?;
    for (n, _) in scan_terms(r, limit)? {
        acc.push_term(n).map_err(CliError::Core)?;
    }
    let report = acc.finish().map_err(CliError::Core)?;
    em.header::<StatRow>().map_err(CliError::Io)?;
    let stats: [(&str, serde_json::Value); 8] = [
        ("limit", report.limit.into()),
        ("n_floor", report.n_floor.into()),
        ("records", report.records.into()),
        ("min_t", report.min_t.into()),
        ("min_t_n_i", report.min_t_pair.0.into()),
        ("max_kappa", report.max_kappa.into()),
        ("max_kappa_n_i", report.max_kappa_pair.0.into()),
        ("max_kappa_n_next", report.max_kappa_pair.1.into()),
    ];
    for (metric, value) in stats {
        em.row(&StatRow { metric: metric.to_string(), value }).map_err(CliError::Io)?;
    }
    for (&k, d) in &report.dyadic {
        em.row(&DyadicRow { k, pairs: d.pairs, tight: d.tight }).map_err(CliError::Io)?;
    }
    for (bucket, &count) in report.hist_log2_t.iter().enumerate() {
        if count > 0 {
            em.row(&HistRow { log2_t: bucket as u32, count }).map_err(CliError::Io)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct PsiRow {
    x: Option<u64>,
    log_x: Option<f64>,
    y: f64,
    psi_exact: u64,
    ennola_main: f64,
    ennola_main_log: f64,
    in_regime: bool,
}

impl Row for PsiRow {
    const TYPE: &'static str = "psi";
    const HEADER: &'static str = "x,log_x,y,psi_exact,ennola_main,ennola_main_log,in_regime";
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            opt(&self.x),
            opt(&self.log_x),
            self.y,
            self.psi_exact,
            self.ennola_main,
            self.ennola_main_log,
            self.in_regime
        )
    }
}

fn cmd_psi<W: Write>(r: &Resolved, x: Option<u64>, y: f64, em: &mut Emitter<W>) -> Result<(), CliError> {
    if y < 2.0 {
        return Err(CliError::Usage(format!("psi needs y >= 2, got {y}")));
    }
    let table = sieve_primes(y.floor().max(2.0) as u64).map_err(CliError::Core)?;
    let row = match (x, r.config.log_x) {
        (Some(x), None) => {
            if x < 1 {
                return Err(CliError::Usage("psi needs x >= 1".into()));
            }
            let main = psi_ennola_main(x as f64, y, &table).map_err(CliError::Core)?;
            PsiRow {
                x: Some(x),
                log_x: None,
                y,
                psi_exact: psi_exact(x, y),
                ennola_main: main.value,
                ennola_main_log: main.log_value,
                in_regime: main.in_regime,
            }
        }
        (None, Some(log_x)) => {
            if log_x < 0.0 {
                return Err(CliError::Usage("psi needs log-x >= 0".into()));
            }
            let main = ennola_main_log(log_x, y, &table).map_err(CliError::Core)?;
            PsiRow {
                x: None,
                log_x: Some(log_x),
                y,
                psi_exact: psi_exact_log(log_x, y),
                ennola_main: main.value,
                ennola_main_log: main.log_value,
                in_regime: main.in_regime,
            }
        }
        (None, None) => return Err(CliError::Usage("psi needs --x or --log-x".into())),
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("pass either --x or --log-x, not both".into()))
        }
    };
    em.header::<PsiRow>().map_err(CliError::Io)?;
    em.row(&row).map_err(CliError::Io)
}

#[derive(Serialize)]
struct BoundValueRow {
    quantity: String,
    value: serde_json::Value,
}

impl Row for BoundValueRow {
    const TYPE: &'static str = "bound";
    const HEADER: &'static str = "quantity,value";
    fn csv(&self) -> String {
        format!("{},{}", self.quantity, self.value)
    }
}

fn cmd_bounds<W: Write>(
    r: &Resolved,
    n: Option<u64>,
    log_n: Option<f64>,
    t: Option<u64>,
    em: &mut Emitter<W>,
) -> Result<(), CliError> {
    let log_n_val = match (n, log_n) {
        (Some(n), None) => {
            if n < 1 {
                return Err(CliError::Usage("bounds needs n >= 1".into()));
            }
            (n as f64).ln()
        }
        (None, Some(l)) => l,
        (None, None) => return Err(CliError::Usage("bounds needs --n or --log-n".into())),
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("pass either --n or --log-n, not both".into()))
        }
    };
    if t.is_some() && n.is_none() {
        return Err(CliError::Usage("--t needs --n (a concrete 64-bit pair)".into()));
    }
    if let (Some(n), Some(t)) = (n, t) {
        if t < 1 || t > n {
            return Err(CliError::Usage(format!("gap t must satisfy 1 <= t <= n, got {t}")));
        }
    }

    let y_i = r.bound.eval_log(log_n_val);
    let y_sqrt = r.bound.eval_log(log_n_val / 2.0);
    let y_next = match (n, t) {
        (Some(n), Some(t)) => r.bound.eval((n + t) as f64),
        _ => r.bound.eval_log(log_n_val + numeric::LN_2),
    };
    let table = sieve_primes(y_i.max(y_next).max(y_sqrt).max(2.0).floor() as u64 + 1)
        .map_err(CliError::Core)?;
    let r_sqrt = table.prime_pi(y_sqrt).map_err(CliError::Core)?;
    let s = table.prime_pi(y_i).map_err(CliError::Core)?;

    em.header::<BoundValueRow>().map_err(CliError::Io)?;
    let mut put = |quantity: &str, value: serde_json::Value| {
        em.row(&BoundValueRow { quantity: quantity.to_string(), value }).map_err(CliError::Io)
    };
    put("log_n", log_n_val.into())?;
    put("y_at_n", y_i.into())?;
    put("y_at_sqrt_n", y_sqrt.into())?;
    put("y_next", y_next.into())?;
    put("r_sqrt", r_sqrt.into())?;
    put("s", s.into())?;
    put("delta_arg", (r.params.c * y_next).into())?;
    put("delta_log", delta(r.params.c * y_next).map_err(CliError::Core)?.log.into())?;
    put(
        "gap_lower_log",
        gap_lower_bound_log(log_n_val, y_next.max(3.0), &r.params)
            .map_err(CliError::Core)?
            .into(),
    )?;
    put(
        "gap_upper_log",
        gap_upper_bound_log(log_n_val, y_i, r_sqrt.max(1), &r.params)
            .map_err(CliError::Core)?
            .into(),
    )?;
    put(
        "constructive_bound_log",
        constructive_gap_bound_log(log_n_val, r_sqrt.max(1), s.max(1), y_i.max(3.0))
            .map_err(CliError::Core)?
            .into(),
    )?;
    put(
        "abc_lower_log",
        abc_gap_lower_log(log_n_val, y_next, &r.params).map_err(CliError::Core)?.into(),
    )?;

    if let (Some(n), Some(t)) = (n, t) {
        let record = GapRecord {
            index: 1,
            n_i: n,
            n_next: n + t,
            t,
            p_of_n: greatest_prime_factor(n as i64),
            y_at_n: y_i,
            r_at_sqrt: r_sqrt,
            kappa: if n >= gaps::KAPPA_MIN_N {
                Some(gaps::kappa(n, t).map_err(CliError::Core)?)
            } else {
                None
            },
        };
        let chain =
            check_gap_chain(&record, &table, y_next.max(3.0), &r.params).map_err(CliError::Core)?;
        put("t", t.into())?;
        if let Some(k) = record.kappa {
            put("kappa", k.into())?;
        }
        put("lambda", chain.lambda.into())?;
        put("b_max", chain.b_max.into())?;
        put("minorant", chain.minorant.into())?;
        put("matveev_lower", chain.matveev_lower.into())?;
        put("chain_holds", chain.chain_holds.into())?;
        put("lambda_consistent", chain.lambda_consistent.into())?;
        put("c_too_small", chain.c_too_small.into())?;

        let triple = reduce_pair(n, n + t).map_err(CliError::Core)?;
        let abc = check_abc_primorial(&triple, y_next, &r.params, &table).map_err(CliError::Core)?;
        put("abc_quality", triple.quality.into())?;
        put("abc_lhs_log", abc.lhs_log.into())?;
        put("abc_rhs_log", abc.rhs_log.into())?;
        put("abc_holds", abc.holds.into())?;
        put("primorial_margin", abc.primorial_margin.into())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PigeonholeRow {
    regime: &'static str,
    log_x: f64,
    y_sqrt_x: f64,
    r: u64,
    members: u64,
    j: u32,
    chosen_h: Option<u32>,
    pair_lo: Option<String>,
    pair_hi: Option<String>,
    gap: Option<String>,
    gap_log: Option<f64>,
    pair_bound_log: Option<f64>,
    r_prime: Option<u64>,
    s: Option<u64>,
    certified: Option<bool>,
    density_ratio: Option<f64>,
    trivial_lhs_log: Option<f64>,
    trivial_rhs_log: Option<f64>,
    trivial_holds: Option<bool>,
    bins: Vec<(u32, u64)>,
}

impl Row for PigeonholeRow {
    const TYPE: &'static str = "pigeonhole";
    const HEADER: &'static str = "regime,log_x,y_sqrt_x,r,members,j,chosen_h,pair_lo,pair_hi,\
                                  gap,gap_log,pair_bound_log,r_prime,s,certified,density_ratio,\
                                  trivial_lhs_log,trivial_rhs_log,trivial_holds";
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.regime,
            self.log_x,
            self.y_sqrt_x,
            self.r,
            self.members,
            self.j,
            opt(&self.chosen_h),
            opt(&self.pair_lo),
            opt(&self.pair_hi),
            opt(&self.gap),
            opt(&self.gap_log),
            opt(&self.pair_bound_log),
            opt(&self.r_prime),
            opt(&self.s),
            opt(&self.certified),
            opt(&self.density_ratio),
            opt(&self.trivial_lhs_log),
            opt(&self.trivial_rhs_log),
            opt(&self.trivial_holds)
        )
    }
}

#[derive(Serialize)]
struct BinRow {
    k: u32,
    count: u64,
}

impl Row for BinRow {
    const TYPE: &'static str = "bin";
    const HEADER: &'static str = "bin_k,count";
    fn csv(&self) -> String {
        format!("bin,{},{}", self.k, self.count)
    }
}

fn cmd_pigeonhole<W: Write>(r: &Resolved, em: &mut Emitter<W>) -> Result<(), CliError> {
    let log_x = require_log_x(r)?;
    let res = find_small_gap(log_x, &r.bound, &r.params, &r.limits).map_err(CliError::Core)?;
    let row = PigeonholeRow {
        regime: match res.regime {
            Regime::Constructive => "constructive",
            Regime::Trivial => "trivial",
        },
        log_x: res.log_x,
        y_sqrt_x: res.y_sqrt_x,
        r: res.r,
        members: res.members,
        j: res.j,
        chosen_h: res.chosen_h,
        pair_lo: res.pair.as_ref().map(|(a, _)| a.to_string()),
        pair_hi: res.pair.as_ref().map(|(_, b)| b.to_string()),
        gap: res.gap.as_ref().map(|g| g.to_string()),
        gap_log: res.gap_log,
        pair_bound_log: res.pair_bound_log,
        r_prime: res.r_prime,
        s: res.s,
        certified: res.certified,
        density_ratio: res.density_ratio,
        trivial_lhs_log: res.trivial.map(|c| c.lhs_log),
        trivial_rhs_log: res.trivial.map(|c| c.rhs_log),
        trivial_holds: res.trivial.map(|c| c.holds),
        bins: res.bins.clone(),
    };
    em.header::<PigeonholeRow>().map_err(CliError::Io)?;
    em.row(&row).map_err(CliError::Io)?;
    if !row.bins.is_empty() {
        for &(k, count) in &row.bins {
            em.row(&BinRow { k, count }).map_err(CliError::Io)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct AbcRow {
    n_i: u64,
    n_next: u64,
    g: u64,
    a: u64,
    b: u64,
    c: u64,
    radical: String,
    quality: Option<f64>,
}

impl Row for AbcRow {
    const TYPE: &'static str = "abc";
    const HEADER: &'static str = "n_i,n_next,g,a,b,c,radical,quality";
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n_i,
            self.n_next,
            self.g,
            self.a,
            self.b,
            self.c,
            self.radical,
            opt(&self.quality)
        )
    }
}

fn cmd_abc<W: Write>(r: &Resolved, top: usize, em: &mut Emitter<W>) -> Result<(), CliError> {
    let limit = require_limit(r)?;
    let terms = scan_terms(r, limit)?;
    if terms.len() < 2 {
        return Err(CliError::Core(smoothgaps_core::Error::Domain(
            "need at least two terms to scan".into(),
        )));
    }
    let triples = terms
        .windows(2)
        .map(|w| reduce_pair(w[0].0, w[1].0))
        .collect::<smoothgaps_core::Result<Vec<_>>>()
        .map_err(CliError::Core)?;
    let ranked = rank_triples(triples, top).map_err(CliError::Core)?;
    em.header::<AbcRow>().map_err(CliError::Io)?;
    for t in &ranked {
        em.row(&AbcRow {
            n_i: t.n_i,
            n_next: t.n_next,
            g: t.g,
            a: t.a,
            b: t.b,
            c: t.c,
            radical: t.radical.to_string(),
            quality: t.quality,
        })
        .map_err(CliError::Io)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ReportRow {
    i: usize,
    n_i: u64,
    n_next: u64,
    t: u64,
    log_t: f64,
    kappa: Option<f64>,
    gap_lower_log: Option<f64>,
    gap_upper_log: Option<f64>,
    constructive_bound_log: Option<f64>,
    abc_lower_log: Option<f64>,
    c_too_small: Option<bool>,
}

impl Row for ReportRow {
    const TYPE: &'static str = "report";
    const HEADER: &'static str = "i,n_i,n_next,t,log_t,kappa,gap_lower_log,gap_upper_log,\
                                  constructive_bound_log,abc_lower_log,c_too_small";
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.i,
            self.n_i,
            self.n_next,
            self.t,
            self.log_t,
            opt(&self.kappa),
            opt(&self.gap_lower_log),
            opt(&self.gap_upper_log),
            opt(&self.constructive_bound_log),
            opt(&self.abc_lower_log),
            opt(&self.c_too_small)
        )
    }
}

fn cmd_report<W: Write>(r: &Resolved, em: &mut Emitter<W>) -> Result<(), CliError> {
    let limit = require_limit(r)?;
    let terms = scan_terms(r, limit)?;
    let table = scan_table(r, limit)?;
    let records = records_from_terms(&r.bound, &table, &terms).map_err(CliError::Core)?;
    em.header::<ReportRow>().map_err(CliError::Io)?;
    for rec in &records {
        let log_n = (rec.n_i as f64).ln();
        let y_next = r.bound.eval(rec.n_next as f64);
        let s = table.prime_pi(rec.y_at_n).ok();
        // Bounds outside their domain (tiny n, y below 3) stay empty rather
        // than failing the whole report.
        let lower = gap_lower_bound_log(log_n, y_next.max(3.0), &r.params).ok();
        let upper = gap_upper_bound_log(log_n, rec.y_at_n, rec.r_at_sqrt.max(1), &r.params).ok();
        let constructive = s.and_then(|s| {
            constructive_gap_bound_log(log_n, rec.r_at_sqrt.max(1), s.max(1), rec.y_at_n.max(3.0))
                .ok()
        });
        let abc_lower = abc_gap_lower_log(log_n, y_next, &r.params).ok();
        em.row(&ReportRow {
            i: rec.index,
            n_i: rec.n_i,
            n_next: rec.n_next,
            t: rec.t,
            log_t: (rec.t as f64).ln(),
            kappa: rec.kappa,
            gap_lower_log: lower,
            gap_upper_log: upper,
            constructive_bound_log: constructive,
            abc_lower_log: abc_lower,
            c_too_small: lower.map(|l| l > (rec.t as f64).ln()),
        })
        .map_err(CliError::Io)?;
    }
    Ok(())
}
