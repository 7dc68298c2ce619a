//! Tiny prime utilities sized for desk-scale inputs.

/// Deterministic primality by trial division; fine for the magnitudes used
/// here (set members, sieve primes, Kummer degrees).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime strictly greater than n.
pub fn next_prime(n: u64) -> u64 {
    let mut m = n + 1;
    while !is_prime(m) {
        m += 1;
    }
    m
}

/// Multiplicative order of a modulo m, for gcd(a, m) = 1.
pub fn mult_order(a: u64, m: u64) -> u64 {
    assert!(m > 1);
    let a = a % m;
    assert!(num::integer::gcd(a, m) == 1, "order needs a unit");
    let mut x = a;
    let mut k = 1u64;
    while x != 1 {
        x = ((x as u128 * a as u128) % m as u128) as u64;
        k += 1;
    }
    k
}
