//! Modular and multiplicative arithmetic: primality, primitive roots,
//! discrete-log tables and the classical arithmetic functions.

use crate::error::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin. The first twelve primes as witnesses are
/// enough for every n < 3.3 * 10^24, so in particular for all of u64.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut y = pow_mod(a, d, n);
        if y == 1 || y == n - 1 {
            continue;
        }
        for _ in 1..s {
            y = mul_mod(y, y, n);
            if y == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, as (prime, exponent) pairs in
/// increasing order. Adequate for the desk-scale arguments used here.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Smallest g >= 1 whose multiplicative order mod r is r - 1.
pub fn primitive_root(r: u64) -> Result<u64> {
    if !is_prime(r) {
        return Err(Error::NotPrime(r));
    }
    if r == 2 {
        return Ok(1);
    }
    let order = r - 1;
    let primes: Vec<u64> = factorize(order).into_iter().map(|(p, _)| p).collect();
    (2..r)
        .find(|&g| primes.iter().all(|&p| pow_mod(g, order / p, r) != 1))
        .ok_or(Error::NotPrime(r))
}

/// Dense discrete-log table: `table[t - 1] = ind(t)` for t = 1..r-1.
pub fn build_index_table(r: u64, g: u64) -> Result<Vec<u32>> {
    if !is_prime(r) {
        return Err(Error::NotPrime(r));
    }
    let order = (r - 1) as usize;
    let mut table = vec![u32::MAX; order];
    let mut t = 1u64;
    for i in 0..order {
        let slot = &mut table[(t - 1) as usize];
        if *slot != u32::MAX {
            return Err(Error::NotPrimitiveRoot { g, r });
        }
        *slot = i as u32;
        t = mul_mod(t, g % r, r);
    }
    if t != 1 {
        return Err(Error::NotPrimitiveRoot { g, r });
    }
    Ok(table)
}

/// A prime modulus together with its canonical primitive root and index
/// table. Immutable once built.
#[derive(Debug, Clone)]
pub struct PrimeModulus {
    r: u64,
    g: u64,
    ind: Vec<u32>,
}

impl PrimeModulus {
    pub fn new(r: u64) -> Result<Self> {
        let g = primitive_root(r)?;
        let ind = build_index_table(r, g)?;
        Ok(Self { r, g, ind })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    /// Order of the unit group, r - 1.
    pub fn order(&self) -> u64 {
        self.r - 1
    }

    /// Discrete log of n, or `None` when r | n.
    #[inline]
    pub fn ind(&self, n: i64) -> Option<u32> {
        let t = n.rem_euclid(self.r as i64) as u64;
        if t == 0 {
            None
        } else {
            Some(self.ind[(t - 1) as usize])
        }
    }

    pub fn index_table(&self) -> &[u32] {
        &self.ind
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithFn {
    Mobius,
    Divisors,
    Totient,
}

pub fn mobius(n: u64) -> Result<i64> {
    if n == 0 {
        return Err(Error::Undefined { what: "mobius", arg: 0 });
    }
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        Ok(0)
    } else if f.len().is_multiple_of(2) {
        Ok(1)
    } else {
        Ok(-1)
    }
}

pub fn tau(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Undefined { what: "tau", arg: 0 });
    }
    Ok(factorize(n).iter().map(|&(_, e)| e as u64 + 1).product())
}

pub fn phi(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Undefined { what: "phi", arg: 0 });
    }
    Ok(factorize(n)
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product())
}

pub fn gcd(a: i64, b: i64) -> Result<u64> {
    if a == 0 && b == 0 {
        return Err(Error::Undefined { what: "gcd", arg: 0 });
    }
    Ok(gcd_u64(a.unsigned_abs(), b.unsigned_abs()))
}

#[inline]
pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn arith_fn(kind: ArithFn, n: u64) -> Result<i64> {
    match kind {
        ArithFn::Mobius => mobius(n),
        ArithFn::Divisors => tau(n).map(|v| v as i64),
        ArithFn::Totient => phi(n).map(|v| v as i64),
    }
}

/// Sieve of Eratosthenes up to and including `limit`.
pub fn sieve(limit: usize) -> Vec<bool> {
    let mut is = vec![true; limit + 1];
    is[0] = false;
    if limit >= 1 {
        is[1] = false;
    }
    let mut p = 2;
    while p * p <= limit {
        if is[p] {
            let mut q = p * p;
            while q <= limit {
                is[q] = false;
                q += p;
            }
        }
        p += 1;
    }
    is
}

/// Möbius function for 1..=n by a linear sieve; index 0 is unused.
pub fn mobius_table(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    if n >= 1 {
        mu[0] = 0;
    }
    for i in 2..=n {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > n {
                break;
            }
            composite[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

/// Primes in [lo, hi] (inclusive), in increasing order.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primality() {
        assert!(is_prime(2));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(is_prime(10007));
        assert!(is_prime(100003));
        assert!(!is_prime(3215031751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime(18446744073709551557)); // largest 64-bit prime
    }

    #[test]
    fn primality_matches_sieve() {
        let s = sieve(1_000_000);
        for (n, &p) in s.iter().enumerate() {
            assert_eq!(is_prime(n as u64), p, "n = {n}");
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(7).unwrap(), 3);
        assert_eq!(primitive_root(2).unwrap(), 1);
        assert_eq!(primitive_root(101).unwrap(), 2);
        assert_eq!(pow_mod(2, 50, 101), 100);
        assert_eq!(primitive_root(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn index_table_small() {
        let t = build_index_table(7, 3).unwrap();
        assert_eq!(t[0], 0); // ind(1)
        assert_eq!(t[2], 1); // ind(3)
        assert_eq!(t[1], 2); // ind(2): 3^2 = 9 = 2 mod 7
        assert!(matches!(
            build_index_table(7, 2),
            Err(Error::NotPrimitiveRoot { .. })
        ));
        let m2 = PrimeModulus::new(2).unwrap();
        assert_eq!(m2.ind(1), Some(0));
    }

    #[test]
    fn index_is_a_homomorphism() {
        let s = sieve(10_000);
        for r in (3..=10_000u64).filter(|&r| s[r as usize]) {
            let m = PrimeModulus::new(r).unwrap();
            let ord = r - 1;
            assert_eq!(m.ind(1), Some(0));
            assert_eq!(m.ind(m.generator() as i64), Some(1 % ord as u32));
            // full pair scan only for small r; sampled pairs above
            let step = if r <= 200 { 1 } else { r / 37 + 1 };
            for u in (1..r).step_by(step as usize) {
                for v in (1..r).step_by(step as usize) {
                    let lhs = m.ind((mul_mod(u, v, r)) as i64).unwrap() as u64;
                    let rhs = (m.ind(u as i64).unwrap() as u64 + m.ind(v as i64).unwrap() as u64) % ord;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    fn brute_tau(n: u64) -> u64 {
        (1..=n).filter(|d| n.is_multiple_of(*d)).count() as u64
    }

    fn brute_phi(n: u64) -> u64 {
        (1..=n).filter(|&a| gcd_u64(a, n) == 1).count() as u64
    }

    /// μ from its defining relation sum_{d | n} μ(d) = [n = 1].
    fn brute_mobius_table(n: usize) -> Vec<i64> {
        let mut mu = vec![0i64; n + 1];
        let mut divisor_sum = vec![0i64; n + 1];
        for k in 1..=n {
            mu[k] = i64::from(k == 1) - divisor_sum[k];
            let mut m = k;
            while m <= n {
                divisor_sum[m] += mu[k];
                m += k;
            }
        }
        mu
    }

    #[test]
    fn arithmetic_functions() {
        assert_eq!(mobius(6).unwrap(), 1);
        assert_eq!(tau(12).unwrap(), 6);
        assert_eq!(phi(101).unwrap(), 100);
        assert_eq!(gcd(-12, 18).unwrap(), 6);
        assert!(gcd(0, 0).is_err());
        assert!(tau(0).is_err());
        assert!(mobius(0).is_err());
        assert_eq!(arith_fn(ArithFn::Totient, 12).unwrap(), 4);
    }

    #[test]
    fn arithmetic_functions_match_definitions() {
        for n in 1..=10_000u64 {
            assert_eq!(tau(n).unwrap(), brute_tau(n), "tau({n})");
            assert_eq!(phi(n).unwrap(), brute_phi(n), "phi({n})");
        }
        let sieved = mobius_table(10_000);
        let brute = brute_mobius_table(10_000);
        for n in 1..=10_000u64 {
            assert_eq!(mobius(n).unwrap(), brute[n as usize], "mu({n})");
            assert_eq!(sieved[n as usize] as i64, brute[n as usize], "mu({n})");
        }
    }
}
