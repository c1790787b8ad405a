//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed for randomized tests; override with `TRDEG_SEED`.
pub fn seed() -> u64 {
    std::env::var("TRDEG_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x7d3e_5eed)
}

pub fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed())
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn miller_rabin(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Least prime strictly above `n`, by Miller-Rabin.
pub fn next_prime(n: u64) -> u64 {
    (n + 1..).find(|&k| miller_rabin(k)).unwrap()
}

/// Interior lattice points of the triangle `(0,0), (d,0), (0,d)`: the genus
/// of a nondegenerate curve with that Newton polygon.
pub fn interior_points(d: u64) -> u128 {
    let mut n = 0u128;
    for i in 1..d {
        // j with 1 <= j and i + j < d
        n += (d - 1 - i) as u128;
    }
    n
}

/// All rationals `p/q` in lowest terms with `|p| <= h` and `1 <= q <= h`.
pub fn rationals_of_height(h: i64) -> Vec<BigRational> {
    let mut out = Vec::new();
    for q in 1..=h {
        for p in -h..=h {
            if p.gcd(&q) == 1 {
                out.push(BigRational::new(BigInt::from(p), BigInt::from(q)));
            }
        }
    }
    out
}
