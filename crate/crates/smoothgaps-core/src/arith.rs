//! Prime tables, greatest-prime-factor sieves, radicals, Chebyshev sums and
//! iterated logarithms: the arithmetic substrate everything else builds on.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numeric::{self, NeumaierSum};

/// All primes up to `limit`, in increasing order. Immutable once built, safe
/// to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

/// Sieve of Eratosthenes up to `limit` inclusive.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::Domain(format!("sieve limit must be at least 2, got {limit}")));
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2usize;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    let primes = (2..=n).filter(|&k| !composite[k]).map(|k| k as u64).collect();
    Ok(PrimeTable { limit, primes })
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of primes `<= y`. The threshold is real-valued, so e.g.
    /// `prime_pi(2.5) == 1`.
    pub fn prime_pi(&self, y: f64) -> Result<u64> {
        Ok(self.primes_upto(y)?.len() as u64)
    }

    /// The primes `<= y` as a slice of this table.
    pub fn primes_upto(&self, y: f64) -> Result<&[u64]> {
        if y > self.limit as f64 {
            return Err(Error::OutOfRange(format!(
                "query {y} exceeds table limit {}",
                self.limit
            )));
        }
        let cut = self.primes.partition_point(|&p| p as f64 <= y);
        Ok(&self.primes[..cut])
    }

    /// Chebyshev sum of `ln p` over primes `p <= y`, compensated.
    pub fn chebyshev_theta(&self, y: f64) -> Result<f64> {
        let ps = self.primes_upto(y)?;
        let mut acc = NeumaierSum::new();
        for &p in ps {
            acc.add(numeric::ln(p as f64));
        }
        Ok(acc.value())
    }
}

/// Greatest prime factor of `n` with the convention that 0, 1 and -1 all map
/// to 1 and negation is ignored.
pub fn greatest_prime_factor(n: i64) -> u64 {
    let m = n.unsigned_abs();
    if m <= 1 {
        return 1;
    }
    gpf_u64(m)
}

fn gpf_u64(mut m: u64) -> u64 {
    let mut best = 1u64;
    while m % 2 == 0 {
        m /= 2;
        best = 2;
    }
    let mut d = 3u64;
    while d * d <= m {
        if m % d == 0 {
            best = d;
            while m % d == 0 {
                m /= d;
            }
        }
        d += 2;
    }
    if m > 1 {
        best = m;
    }
    best
}

/// Product of the distinct primes dividing `n`; `radical(1) == 1`.
pub fn radical(n: u64) -> u64 {
    assert!(n >= 1, "radical is defined for positive integers");
    let mut m = n;
    let mut rad = 1u64;
    if m % 2 == 0 {
        rad = 2;
        while m % 2 == 0 {
            m /= 2;
        }
    }
    let mut d = 3u64;
    while d * d <= m {
        if m % d == 0 {
            rad *= d;
            while m % d == 0 {
                m /= d;
            }
        }
        d += 2;
    }
    if m > 1 {
        rad *= m;
    }
    rad
}

/// Euclid's algorithm; rejects (0, 0).
pub fn gcd(a: u64, b: u64) -> Result<u64> {
    if a == 0 && b == 0 {
        return Err(Error::Domain("gcd(0, 0) is undefined".into()));
    }
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    Ok(a)
}

/// k-th iterate of `t -> max(1, ln t)`, for `k >= 1` and `x > 0`.
pub fn iterated_log(k: u32, x: f64) -> f64 {
    assert!(k >= 1, "iterated_log needs k >= 1");
    assert!(x > 0.0, "iterated_log needs x > 0");
    let mut t = x;
    for _ in 0..k {
        t = numeric::ln(t).max(1.0);
    }
    t
}

/// Greatest prime factor of every integer in `[lo, hi]`. The entry for 1 is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GpfSegment {
    lo: u64,
    hi: u64,
    gpf: Vec<u64>,
}

impl GpfSegment {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn get(&self, n: u64) -> u64 {
        debug_assert!(n >= self.lo && n <= self.hi);
        self.gpf[(n - self.lo) as usize]
    }

    /// `(n, gpf(n))` in increasing order of n.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (self.lo..=self.hi).zip(self.gpf.iter().copied())
    }
}

/// Segmented greatest-prime-factor sieve. Builds its base prime table once
/// (up to `sqrt` of the largest value it will see) and then serves arbitrary
/// segments, each bounded by the configured capacity.
#[derive(Debug, Clone)]
pub struct GpfSieve {
    base: PrimeTable,
    segment_cap: usize,
}

impl GpfSieve {
    pub fn new(max_hi: u64, segment_cap: usize) -> Result<Self> {
        if max_hi < 1 {
            return Err(Error::Domain("sieve range must start at 1 or above".into()));
        }
        let root = max_hi.isqrt().max(2);
        Ok(GpfSieve { base: sieve_primes(root)?, segment_cap })
    }

    pub fn base(&self) -> &PrimeTable {
        &self.base
    }

    /// Greatest prime factor of every n in `[lo, hi]`.
    ///
    /// Marks each value with every base prime that divides it (ascending, so
    /// the last mark is the largest) and divides the value down; whatever
    /// remains above 1 afterwards is a single prime factor beyond the base
    /// table and wins outright.
    pub fn segment(&self, lo: u64, hi: u64) -> Result<GpfSegment> {
        if lo < 1 || lo > hi {
            return Err(Error::Domain(format!("invalid gpf range [{lo}, {hi}]")));
        }
        let len = hi - lo + 1;
        if len > self.segment_cap as u64 {
            return Err(Error::Capacity(format!(
                "segment [{lo}, {hi}] has {len} entries, cap is {}",
                self.segment_cap
            )));
        }
        let bl = self.base.limit();
        if bl.saturating_mul(bl).saturating_add(2 * bl) < hi {
            // (base_limit + 1)^2 <= hi would leave composite leftovers.
            return Err(Error::Domain(format!(
                "sieve base covers sqrt of {} only, requested hi {hi}",
                bl * bl + 2 * bl + 1
            )));
        }
        let len = len as usize;
        let mut rem: Vec<u64> = (lo..=hi).collect();
        let mut gpf: Vec<u64> = vec![1; len];
        for &p in self.base.primes() {
            if p.checked_mul(p).map_or(true, |pp| pp > hi) {
                break;
            }
            let start = lo.div_ceil(p) * p;
            let mut m = start;
            while m <= hi {
                let i = (m - lo) as usize;
                gpf[i] = p;
                while rem[i] % p == 0 {
                    rem[i] /= p;
                }
                m += p;
            }
        }
        for i in 0..len {
            if rem[i] > 1 {
                gpf[i] = rem[i];
            }
        }
        Ok(GpfSegment { lo, hi, gpf })
    }
}

/// One-shot convenience wrapper: builds a sieve sized for `hi` and returns
/// the single segment `[lo, hi]`.
pub fn gpf_range(lo: u64, hi: u64, segment_cap: usize) -> Result<GpfSegment> {
    GpfSieve::new(hi, segment_cap)?.segment(lo, hi)
}
