//! Command-line surface and the canonical run configuration embedded in
//! every report.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use smoothgaps_core::bounds::BoundParams;
use smoothgaps_core::smooth::SmoothnessBound;
use smoothgaps_core::Limits;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "smoothgaps",
    version,
    about = "Adaptive smooth sequences, consecutive gaps, smooth counting, \
             gap-bound tables, the dyadic pigeonhole construction and \
             abc-quality scans"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Smoothness bound: const:Y | logmul:A | slow:A | powlog:A,B | step:FILE
    #[arg(long, global = true, default_value = "const:3")]
    pub bound: String,

    /// Upper end of a 64-bit scan
    #[arg(long, global = true)]
    pub limit: Option<u64>,

    /// Natural log of the height X for log-space commands
    #[arg(long = "log-x", global = true)]
    pub log_x: Option<f64>,

    /// Numeric pipeline: "64" for sieved scans, "big" for log-space heights
    /// (inferred from --limit/--log-x when omitted)
    #[arg(long, global = true)]
    pub numeric: Option<String>,

    /// Scale on y inside the delta-exponent lower bound
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Base of the linear-form floor
    #[arg(long, global = true)]
    pub c0: Option<f64>,
    /// Scale on y in the gap upper bound
    #[arg(long, global = true)]
    pub c1: Option<f64>,
    /// Primorial exponent bound
    #[arg(long, global = true)]
    pub c2: Option<f64>,
    /// abc exponent, in (0, 1)
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Epsilon-dependent constant of the abc inequality
    #[arg(long, global = true)]
    pub ceps: Option<f64>,

    /// Output format: csv or jsonl
    #[arg(long, global = true, default_value = "csv")]
    pub format: String,

    /// Output path; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Segment length for sieved scans
    #[arg(long, global = true, default_value_t = 1usize << 24)]
    pub segment: usize,

    /// Worker threads for segmented scans (env SMOOTHGAPS_THREADS is the
    /// fallback, then 1); output is identical for any value
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stream the adaptive sequence up to --limit
    Sequence,
    /// Stream consecutive-gap records, or fold scan statistics with --stats
    Gaps {
        /// Emit scan statistics instead of per-pair rows
        #[arg(long, default_value_t = false)]
        stats: bool,
        /// Smallest n_i a statistics scan includes
        #[arg(long, default_value_t = 16)]
        n_floor: u64,
    },
    /// Exact count of y-smooth integers plus the main-term estimate
    Psi {
        /// Count up to this integer (use --log-x for larger heights)
        #[arg(long)]
        x: Option<u64>,
        /// Smoothness threshold
        #[arg(long)]
        y: f64,
    },
    /// Evaluate the gap bound envelope at one point
    Bounds {
        /// Left endpoint n_i
        #[arg(long)]
        n: Option<u64>,
        /// ln(n_i) for heights beyond 64 bits
        #[arg(long = "log-n")]
        log_n: Option<f64>,
        /// Observed gap; unlocks the linear-form diagnostics (needs --n)
        #[arg(long)]
        t: Option<u64>,
    },
    /// Run the dyadic pigeonhole construction at --log-x
    Pigeonhole,
    /// Rank gcd-reduced consecutive pairs by abc quality
    Abc {
        /// How many triples to keep
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Combined gaps-versus-bounds table for plotting
    Report,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sequence => "sequence",
            Command::Gaps { .. } => "gaps",
            Command::Psi { .. } => "psi",
            Command::Bounds { .. } => "bounds",
            Command::Pigeonhole => "pigeonhole",
            Command::Abc { .. } => "abc",
            Command::Report => "report",
        }
    }
}

/// Canonical configuration: serialized (in field order) into the head of
/// every report, and stable under a parse/serialize round trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub bound: String,
    pub step_table: Option<Vec<(f64, f64)>>,
    pub limit: Option<u64>,
    pub log_x: Option<f64>,
    pub numeric: String,
    pub c: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub eps: f64,
    pub ceps: f64,
    pub format: String,
    pub out: Option<String>,
    pub segment: usize,
    pub threads: usize,
    pub x: Option<u64>,
    pub y: Option<f64>,
    pub n: Option<u64>,
    pub log_n: Option<f64>,
    pub t: Option<u64>,
    pub top: Option<usize>,
    pub n_floor: Option<u64>,
    pub stats: Option<bool>,
}

impl RunConfig {
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Everything a command needs, resolved and validated.
pub struct Resolved {
    pub bound: SmoothnessBound,
    pub params: BoundParams,
    pub limits: Limits,
    pub threads: usize,
    pub config: RunConfig,
}

pub fn resolve(cli: &Cli) -> Result<Resolved, CliError> {
    let common = &cli.common;
    let (bound, bound_canon, step_table) = parse_bound(&common.bound)?;

    let mut params = BoundParams::default();
    if let Some(v) = common.c {
        params.c = v;
    }
    if let Some(v) = common.c0 {
        params.c0 = v;
    }
    if let Some(v) = common.c1 {
        params.c1 = v;
    }
    if let Some(v) = common.c2 {
        params.c2 = v;
    }
    if let Some(v) = common.eps {
        params.epsilon = v;
    }
    if let Some(v) = common.ceps {
        params.c_eps = v;
    }
    params.validate().map_err(CliError::Core)?;

    match common.format.as_str() {
        "csv" | "jsonl" => {}
        other => return Err(CliError::Usage(format!("unknown format {other:?}"))),
    }
    if common.segment == 0 {
        return Err(CliError::Usage("segment length must be positive".into()));
    }

    let threads = match common.threads {
        Some(0) => return Err(CliError::Usage("thread count must be positive".into())),
        Some(t) => t,
        None => match std::env::var("SMOOTHGAPS_THREADS") {
            Ok(s) => s
                .parse::<usize>()
                .ok()
                .filter(|&t| t >= 1)
                .ok_or_else(|| CliError::Usage(format!("bad SMOOTHGAPS_THREADS value {s:?}")))?,
            Err(_) => 1,
        },
    };

    let numeric = resolve_numeric(cli)?;

    let (x, y, n, log_n, t, top, n_floor, stats) = match &cli.command {
        Command::Psi { x, y } => (*x, Some(*y), None, None, None, None, None, None),
        Command::Bounds { n, log_n, t } => (None, None, *n, *log_n, *t, None, None, None),
        Command::Abc { top } => (None, None, None, None, None, Some(*top), None, None),
        Command::Gaps { stats, n_floor } => {
            (None, None, None, None, None, None, Some(*n_floor), Some(*stats))
        }
        _ => (None, None, None, None, None, None, None, None),
    };

    let config = RunConfig {
        command: cli.command.name().to_string(),
        bound: bound_canon,
        step_table,
        limit: common.limit,
        log_x: common.log_x,
        numeric,
        c: params.c,
        c0: params.c0,
        c1: params.c1,
        c2: params.c2,
        eps: params.epsilon,
        ceps: params.c_eps,
        format: common.format.clone(),
        out: common.out.as_ref().map(|p| p.display().to_string()),
        segment: common.segment,
        threads,
        x,
        y,
        n,
        log_n,
        t,
        top,
        n_floor,
        stats,
    };

    Ok(Resolved {
        bound,
        params,
        // One capacity knob: --segment bounds both the sieve segment and the
        // log-space enumeration.
        limits: Limits { segment_len: common.segment, enum_cap: common.segment },
        threads,
        config,
    })
}

/// The sieved scans run on 64-bit integers; log-space heights run on the
/// big-integer pipeline. An explicit --numeric must agree with the inputs,
/// and is inferred from them when omitted.
fn resolve_numeric(cli: &Cli) -> Result<String, CliError> {
    let wants_big = match &cli.command {
        Command::Pigeonhole => true,
        Command::Psi { x, .. } => {
            if x.is_some() && cli.common.log_x.is_some() {
                return Err(CliError::Usage("pass either --x or --log-x, not both".into()));
            }
            x.is_none()
        }
        Command::Bounds { n, log_n, .. } => {
            if n.is_some() && log_n.is_some() {
                return Err(CliError::Usage("pass either --n or --log-n, not both".into()));
            }
            n.is_none()
        }
        _ => false,
    };
    match cli.common.numeric.as_deref() {
        None => Ok(if wants_big { "big" } else { "64" }.to_string()),
        Some("64") if wants_big => Err(CliError::Usage(
            "log-scale inputs need the arbitrary-precision pipeline (--numeric big)".into(),
        )),
        Some("big") if !wants_big => Err(CliError::Usage(
            "sieved scans run on the 64-bit pipeline (--numeric 64)".into(),
        )),
        Some("64") => Ok("64".to_string()),
        Some("big") => Ok("big".to_string()),
        Some(other) => Err(CliError::Usage(format!("unknown numeric kind {other:?}"))),
    }
}

type ParsedBound = (SmoothnessBound, String, Option<Vec<(f64, f64)>>);

fn parse_bound(spec: &str) -> Result<ParsedBound, CliError> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("bound spec {spec:?} is missing a ':'")))?;
    let num = |s: &str| -> Result<f64, CliError> {
        s.parse::<f64>()
            .map_err(|_| CliError::Usage(format!("bad number {s:?} in bound spec {spec:?}")))
    };
    match kind {
        "const" => {
            let y = num(arg)?;
            let b = SmoothnessBound::constant(y).map_err(CliError::Core)?;
            Ok((b, format!("const:{y}"), None))
        }
        "logmul" => {
            let a = num(arg)?;
            let b = SmoothnessBound::log_multiple(a).map_err(CliError::Core)?;
            Ok((b, format!("logmul:{a}"), None))
        }
        "slow" => {
            let a = num(arg)?;
            let b = SmoothnessBound::slow_regime(a).map_err(CliError::Core)?;
            Ok((b, format!("slow:{a}"), None))
        }
        "powlog" => {
            let (a, beta) = arg
                .split_once(',')
                .ok_or_else(|| CliError::Usage("powlog needs two parameters: A,B".into()))?;
            let (a, beta) = (num(a)?, num(beta)?);
            let b = SmoothnessBound::power_log(a, beta).map_err(CliError::Core)?;
            Ok((b, format!("powlog:{a},{beta}"), None))
        }
        "step" => {
            let text = std::fs::read_to_string(arg).map_err(|e| {
                CliError::Usage(format!("cannot read step table {arg:?}: {e}"))
            })?;
            let mut entries = Vec::new();
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (thr, val) = line.split_once(',').ok_or_else(|| {
                    CliError::Usage(format!("step table line {} is not threshold,value", lineno + 1))
                })?;
                entries.push((num(thr.trim())?, num(val.trim())?));
            }
            let b = SmoothnessBound::step_table(&entries).map_err(CliError::Core)?;
            Ok((b, "step".to_string(), Some(entries)))
        }
        other => Err(CliError::Usage(format!("unknown bound kind {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_specs_parse_and_canonicalize() {
        let (_, canon, table) = parse_bound("const:3").unwrap();
        assert_eq!(canon, "const:3");
        assert!(table.is_none());
        let (_, canon, _) = parse_bound("powlog:1.5,0.25").unwrap();
        assert_eq!(canon, "powlog:1.5,0.25");
        assert!(parse_bound("const:1").is_err());
        assert!(parse_bound("nope:3").is_err());
        assert!(parse_bound("const").is_err());
    }

    #[test]
    fn config_round_trips_canonically() {
        let cfg = RunConfig {
            command: "gaps".into(),
            bound: "const:5".into(),
            step_table: None,
            limit: Some(1000),
            log_x: None,
            numeric: "64".into(),
            c: 2.0,
            c0: 2.0,
            c1: 2.0,
            c2: 2.0,
            eps: 0.5,
            ceps: 1.0,
            format: "csv".into(),
            out: None,
            segment: 1 << 24,
            threads: 1,
            x: None,
            y: None,
            n: None,
            log_n: None,
            t: None,
            top: None,
            n_floor: Some(16),
            stats: Some(false),
        };
        let canon = cfg.canonical();
        let back: RunConfig = serde_json::from_str(&canon).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.canonical(), canon);
    }
}
