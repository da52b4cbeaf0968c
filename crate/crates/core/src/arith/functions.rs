use super::factor::{factor, is_prime_u64};
use super::ArithError;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
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

/// `Λ(n)`: `log p` when `n = p^k`, else 0.
pub fn von_mangoldt(n: u64) -> Result<f64, ArithError> {
    let f = factor(n)?;
    Ok(match f.factors.as_slice() {
        [(p, _)] => libm::log(*p as f64),
        _ => 0.0,
    })
}

pub fn mobius(n: u64) -> Result<i8, ArithError> {
    let f = factor(n)?;
    if !f.is_squarefree() {
        return Ok(0);
    }
    Ok(if f.factors.len() % 2 == 0 { 1 } else { -1 })
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Number of ordered `k`-tuples of positive integers with product `n`.
pub fn tau_k(n: u64, k: u32) -> Result<u64, ArithError> {
    if k == 0 {
        return Err(ArithError::InvalidArgument("tau_k needs k >= 1"));
    }
    let f = factor(n)?;
    let k = k as u64;
    Ok(f.factors
        .iter()
        .map(|&(_, e)| binomial(e as u64 + k - 1, k - 1))
        .product())
}

pub fn euler_phi(n: u64) -> Result<u64, ArithError> {
    let f = factor(n)?;
    Ok(f.factors
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product())
}

/// Inverse of `a` modulo `q` in `[1, q - 1]` (0 when `q = 1`).
pub fn inv_mod(a: u64, q: u64) -> Result<u64, ArithError> {
    if q == 0 {
        return Err(ArithError::Zero);
    }
    if q == 1 {
        return Ok(0);
    }
    let (mut r0, mut r1) = (q as i128, (a % q) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    if r0 != 1 {
        return Err(ArithError::NotInvertible { a, q });
    }
    Ok(s0.rem_euclid(q as i128) as u64)
}

/// Least generator of `(Z/p^e Z)^*` for an odd prime `p`.
pub fn primitive_root(p: u64, e: u32) -> Result<u64, ArithError> {
    if p == 2 || !is_prime_u64(p) {
        return Err(ArithError::NotOddPrime(p));
    }
    if e == 0 {
        return Err(ArithError::InvalidArgument(
            "prime power exponent must be >= 1",
        ));
    }
    let modulus = p
        .checked_pow(e)
        .ok_or(ArithError::InvalidArgument("prime power exceeds 64 bits"))?;
    let order = modulus / p * (p - 1);
    let pf = factor(order)?;
    let is_generator =
        |g: u64| gcd(g, p) == 1 && pf.primes().all(|r| mod_pow(g, order / r, modulus) != 1);
    Ok((2..modulus)
        .find(|&g| is_generator(g))
        .expect("cyclic group has a generator"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        assert!((von_mangoldt(8).unwrap() - core::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(von_mangoldt(6).unwrap(), 0.0);
        assert!((von_mangoldt(97).unwrap() - 4.574_711_0).abs() < 1e-7);
        assert_eq!(von_mangoldt(1).unwrap(), 0.0);
        assert_eq!(von_mangoldt(0), Err(ArithError::Zero));

        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(30).unwrap(), -1);
        assert_eq!(mobius(12).unwrap(), 0);
        assert_eq!(mobius(0), Err(ArithError::Zero));

        assert_eq!(tau_k(6, 2).unwrap(), 4);
        assert_eq!(tau_k(1, 9).unwrap(), 1);
        assert_eq!(euler_phi(10).unwrap(), 4);
        assert_eq!(inv_mod(2, 5).unwrap(), 3);
        assert_eq!(primitive_root(7, 1).unwrap(), 3);
    }

    #[test]
    fn tau3_of_four_by_enumeration() {
        let n = 4u64;
        let count = (1..=n)
            .flat_map(|a| (1..=n).map(move |b| (a, b)))
            .filter(|&(a, b)| n % (a * b) == 0)
            .count() as u64;
        assert_eq!(count, 6);
        assert_eq!(tau_k(4, 3).unwrap(), count);
    }

    #[test]
    fn primitive_root_orders() {
        let order = |g: u64, q: u64| {
            let (mut x, mut k) = (g % q, 1);
            while x != 1 {
                x = x * g % q;
                k += 1;
            }
            k
        };
        for (p, e) in [(3, 1), (3, 3), (5, 2), (7, 2), (11, 1), (13, 1), (101, 1)] {
            let q = u64::pow(p, e);
            let phi = euler_phi(q).unwrap();
            let g = primitive_root(p, e).unwrap();
            assert_eq!(order(g, q), phi, "p^e = {q}");
            assert!((2..g).filter(|&h| h % p != 0).all(|h| order(h, q) < phi));
        }
        assert_eq!(primitive_root(2, 1), Err(ArithError::NotOddPrime(2)));
        assert_eq!(primitive_root(9, 1), Err(ArithError::NotOddPrime(9)));
    }

    #[test]
    fn inverse_errors() {
        assert_eq!(
            inv_mod(4, 10),
            Err(ArithError::NotInvertible { a: 4, q: 10 })
        );
        assert_eq!(inv_mod(7, 1).unwrap(), 0);
    }
}
