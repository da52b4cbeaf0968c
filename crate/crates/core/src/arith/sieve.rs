use alloc::vec;
use alloc::vec::Vec;

use super::ArithError;

/// Integers sieved per segment.
pub const DEFAULT_SEGMENT: u64 = 1 << 20;
/// Exclusive upper limit accepted by [`sieve_primes`].
pub const MAX_HI: u64 = 1 << 48;
/// Largest segment span `hi - lo` held in one table (512 MiB of bits).
pub const MAX_SPAN: u64 = 1 << 32;
/// Largest span for tables that also carry smallest prime factors.
const MAX_FACTOR_SPAN: u64 = 1 << 28;

/// Primality bits (and optionally least prime factors) for `[lo, hi)`.
///
/// Bit `i` of the packed words describes `lo + i`; word `w` holds bits
/// `64w .. 64w + 63` least significant first. Bits past `hi - lo` are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveTable {
    lo: u64,
    hi: u64,
    bits: Vec<u64>,
    // 0 marks a prime entry, otherwise the least prime factor.
    smallest_factor: Option<Vec<u32>>,
}

impl SieveTable {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn span(&self) -> u64 {
        self.hi - self.lo
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    /// Rebuilds a table from packed words, e.g. after loading a cache file.
    pub fn from_words(lo: u64, hi: u64, mut bits: Vec<u64>) -> Result<Self, ArithError> {
        check_range(lo, hi)?;
        let span = hi - lo;
        if bits.len() as u64 != span.div_ceil(64) {
            return Err(ArithError::InvalidArgument(
                "bitset length does not match range",
            ));
        }
        let tail = span % 64;
        if tail != 0 {
            if let Some(last) = bits.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        Ok(SieveTable {
            lo,
            hi,
            bits,
            smallest_factor: None,
        })
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= self.lo && n < self.hi
    }

    /// # Panics
    ///
    /// If `n` lies outside `[lo, hi)`.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(
            self.contains(n),
            "{n} outside sieve range [{}, {})",
            self.lo,
            self.hi
        );
        let i = n - self.lo;
        (self.bits[(i / 64) as usize] >> (i % 64)) & 1 == 1
    }

    /// Least prime factor of `n`, available for tables built with
    /// [`sieve_primes_with_factors`].
    pub fn smallest_factor(&self, n: u64) -> Option<u64> {
        let table = self.smallest_factor.as_ref()?;
        if !self.contains(n) {
            return None;
        }
        match table[(n - self.lo) as usize] {
            0 => Some(n),
            p => Some(p as u64),
        }
    }

    pub fn has_factors(&self) -> bool {
        self.smallest_factor.is_some()
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Primes in increasing order.
    pub fn primes(&self) -> Primes<'_> {
        Primes {
            table: self,
            word: 0,
            current: self.bits.first().copied().unwrap_or(0),
        }
    }

    /// Primes in `[from, to)` clipped to the table range.
    pub fn primes_in(&self, from: u64, to: u64) -> impl Iterator<Item = u64> + '_ {
        let from = from.max(self.lo);
        let to = to.min(self.hi);
        let mut iter = Primes {
            table: self,
            word: 0,
            current: 0,
        };
        if from < to {
            let i = from - self.lo;
            iter.word = (i / 64) as usize;
            iter.current = self.bits[iter.word] & (!0u64 << (i % 64));
        } else {
            iter.word = self.bits.len();
        }
        iter.take_while(move |&p| p < to)
    }
}

pub struct Primes<'a> {
    table: &'a SieveTable,
    word: usize,
    current: u64,
}

impl Iterator for Primes<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as u64;
                self.current &= self.current - 1;
                return Some(self.table.lo + self.word as u64 * 64 + bit);
            }
            self.word += 1;
            if self.word >= self.table.bits.len() {
                return None;
            }
            self.current = self.table.bits[self.word];
        }
    }
}

/// The range preconditions shared by every sieve entry point.
pub fn check_range(lo: u64, hi: u64) -> Result<(), ArithError> {
    if lo < 2 {
        return Err(ArithError::InvalidArgument(
            "sieve range must start at 2 or above",
        ));
    }
    if lo >= hi {
        return Err(ArithError::EmptyRange { lo, hi });
    }
    if hi > MAX_HI || hi - lo > MAX_SPAN {
        return Err(ArithError::RangeTooLarge { lo, hi });
    }
    Ok(())
}

/// Primes `p <= limit` by a plain sieve. Used as the base set for segments.
pub fn base_primes(limit: u32) -> Vec<u32> {
    let n = limit as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u32);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = libm::sqrt(n as f64) as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn base_for(hi: u64) -> Vec<u32> {
    base_primes(isqrt(hi.saturating_sub(1)) as u32)
}

/// Sieves `[lo, hi)` into packed words using the given base primes, which
/// must include every prime up to `sqrt(hi - 1)`.
///
/// Segments whose `lo` values differ by multiples of 64 produce words that
/// concatenate into the table for the union, which is how the parallel driver
/// assembles large ranges.
pub fn sieve_segment_words(lo: u64, hi: u64, base: &[u32]) -> Vec<u64> {
    let span = hi - lo;
    let mut bits = vec![!0u64; span.div_ceil(64) as usize];
    let tail = span % 64;
    if tail != 0 {
        *bits.last_mut().unwrap() = (1u64 << tail) - 1;
    }
    let clear = |bits: &mut [u64], i: u64| bits[(i / 64) as usize] &= !(1u64 << (i % 64));
    if lo < 2 {
        for n in lo..2.min(hi) {
            clear(&mut bits, n - lo);
        }
    }
    for &p in base {
        let p = p as u64;
        if p * p >= hi {
            break;
        }
        let mut m = (p * p).max(lo.div_ceil(p) * p);
        while m < hi {
            clear(&mut bits, m - lo);
            m += p;
        }
    }
    bits
}

/// Enumerates the primes in `[lo, hi)` with a segmented sieve.
pub fn sieve_primes(lo: u64, hi: u64) -> Result<SieveTable, ArithError> {
    check_range(lo, hi)?;
    let base = base_for(hi);
    let mut bits = Vec::with_capacity((hi - lo).div_ceil(64) as usize);
    let mut seg_lo = lo;
    while seg_lo < hi {
        let seg_hi = (seg_lo + DEFAULT_SEGMENT).min(hi);
        bits.extend(sieve_segment_words(seg_lo, seg_hi, &base));
        seg_lo = seg_hi;
    }
    Ok(SieveTable {
        lo,
        hi,
        bits,
        smallest_factor: None,
    })
}

/// Like [`sieve_primes`] but also records the least prime factor of every
/// integer in the range.
pub fn sieve_primes_with_factors(lo: u64, hi: u64) -> Result<SieveTable, ArithError> {
    check_range(lo, hi)?;
    if hi - lo > MAX_FACTOR_SPAN {
        return Err(ArithError::RangeTooLarge { lo, hi });
    }
    let mut table = sieve_primes(lo, hi)?;
    let mut spf = vec![0u32; (hi - lo) as usize];
    for p in base_for(hi) {
        let p64 = p as u64;
        if p64 * p64 >= hi {
            break;
        }
        let mut m = (p64 * p64).max(lo.div_ceil(p64) * p64);
        while m < hi {
            let slot = &mut spf[(m - lo) as usize];
            if *slot == 0 {
                *slot = p;
            }
            m += p64;
        }
    }
    table.smallest_factor = Some(spf);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn trial_division_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_ranges() {
        let t = sieve_primes(2, 11).unwrap();
        assert_eq!(t.primes().collect::<Vec<_>>(), [2, 3, 5, 7]);
        let t = sieve_primes(10, 20).unwrap();
        assert_eq!(t.primes().collect::<Vec<_>>(), [11, 13, 17, 19]);
    }

    #[test]
    fn agrees_with_trial_division_to_ten_thousand() {
        let t = sieve_primes(2, 10_001).unwrap();
        for n in 2..10_001 {
            assert_eq!(t.is_prime(n), trial_division_is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn offset_segment_matches_full_table() {
        let full = sieve_primes(2, 50_000).unwrap();
        let part = sieve_primes(31_337, 44_444).unwrap();
        let a: Vec<_> = full.primes_in(31_337, 44_444).collect();
        let b: Vec<_> = part.primes().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn prime_count_to_a_million() {
        // Oracle: independent trial-division count, frozen.
        assert_eq!(sieve_primes(2, 1_000_001).unwrap().count(), 78_498);
    }

    #[test]
    fn smallest_factors() {
        let t = sieve_primes_with_factors(2, 5000).unwrap();
        for n in 2..5000u64 {
            let p = t.smallest_factor(n).unwrap();
            assert_eq!(n % p, 0);
            assert!(trial_division_is_prime(p));
            assert!((2..p).all(|d| n % d != 0));
        }
    }

    #[test]
    fn range_errors() {
        assert_eq!(
            sieve_primes(10, 10),
            Err(ArithError::EmptyRange { lo: 10, hi: 10 })
        );
        assert!(matches!(
            sieve_primes(0, 10),
            Err(ArithError::InvalidArgument(_))
        ));
        assert!(matches!(
            sieve_primes(2, MAX_HI + 1),
            Err(ArithError::RangeTooLarge { .. })
        ));
    }

    #[test]
    fn from_words_roundtrip_and_length_check() {
        let t = sieve_primes(100, 1000).unwrap();
        let u = SieveTable::from_words(100, 1000, t.words().to_vec()).unwrap();
        assert_eq!(t, u);
        assert!(SieveTable::from_words(100, 1000, vec![0; 3]).is_err());
    }
}
