//! Segmented sieve of Eratosthenes with bounded memory.

/// Default segment size in entries.
pub const DEFAULT_SEGMENT: usize = 1 << 20;

/// All primes ≤ `x` in ascending order, sieved in segments of
/// `segment` entries each.
pub fn prime_sieve_segmented(x: u64, segment: usize) -> Vec<u64> {
    assert!(segment >= 2);
    if x < 2 {
        return Vec::new();
    }
    // Base primes up to sqrt(x) by a plain sieve.
    let root = (x as f64).sqrt() as u64 + 1;
    let mut base = vec![true; (root + 1) as usize];
    base[0] = false;
    if root >= 1 {
        base[1] = false;
    }
    let mut i = 2u64;
    while i * i <= root {
        if base[i as usize] {
            let mut j = i * i;
            while j <= root {
                base[j as usize] = false;
                j += i;
            }
        }
        i += 1;
    }
    let base_primes: Vec<u64> = (2..=root).filter(|&i| base[i as usize]).collect();

    let mut primes: Vec<u64> = base_primes.iter().copied().filter(|&p| p <= x).collect();
    let mut low = root + 1;
    let mut flags = vec![true; segment];
    while low <= x {
        let high = (low + segment as u64 - 1).min(x);
        let len = (high - low + 1) as usize;
        flags[..len].fill(true);
        for &p in &base_primes {
            if p * p > high {
                break;
            }
            let mut start = low.div_ceil(p) * p;
            if start < p * p {
                start = p * p;
            }
            let mut j = start;
            while j <= high {
                flags[(j - low) as usize] = false;
                j += p;
            }
        }
        for (k, &f) in flags[..len].iter().enumerate() {
            if f {
                primes.push(low + k as u64);
            }
        }
        low = high + 1;
    }
    primes
}

/// All primes ≤ `x` with the default segment size.
pub fn prime_sieve(x: u64) -> Vec<u64> {
    prime_sieve_segmented(x, DEFAULT_SEGMENT)
}
