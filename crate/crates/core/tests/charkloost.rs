use fpl_core::arith::{euler_phi, gcd, is_prime_u64};
use fpl_core::charkloost::{
    character_average, check_weil, chi_eval, gauss_sum, kloosterman, orthogonality_project,
    weil_margin, CharError, CharacterTable, KloostermanKernel,
};
use fpl_core::Complex64;
use proptest::prelude::*;
use std::f64::consts::TAU;

fn e_q(k: i128, q: u64) -> Complex64 {
    let t = k.rem_euclid(q as i128) as f64 / q as f64;
    Complex64::new((TAU * t).cos(), (TAU * t).sin())
}

// S_q(u, v) by brute force: inverses found by search, std trigonometry.
fn kloosterman_naive(q: u64, u: i64, v: i64) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for l in 1..q {
        if gcd(l, q) != 1 {
            continue;
        }
        let li = (1..q).find(|&x| x * l % q == 1).unwrap();
        s += e_q(u as i128 * l as i128 + v as i128 * li as i128, q);
    }
    s
}

fn inverse(a: u64, q: u64) -> u64 {
    (1..q).find(|&x| x * a % q == 1).unwrap()
}

#[test]
fn tables_have_phi_distinct_characters() {
    for q in 3..=200u64 {
        let t = CharacterTable::new(q).unwrap();
        let phi = euler_phi(q).unwrap() as usize;
        assert_eq!(t.len(), phi);
        let units: Vec<u64> = (1..q).filter(|&n| gcd(n, q) == 1).collect();
        let mut seen = std::collections::HashSet::new();
        for i in 0..t.len() {
            let c = t.character(i);
            let key: Vec<u64> = units.iter().map(|&n| c.phase(n).unwrap()).collect();
            assert!(seen.insert(key), "q = {q}: duplicate character {i}");
            for n in 0..q {
                assert_eq!(c.eval(n).norm() == 0.0, gcd(n, q) != 1);
            }
        }
        assert!(t.character(0).is_principal());
        assert!(units
            .iter()
            .all(|&n| (t.character(0).eval(n) - 1.0).norm() < 1e-15));
    }
}

#[test]
fn row_and_column_orthogonality() {
    for q in 3..=200u64 {
        let t = CharacterTable::new(q).unwrap();
        let phi = t.len();
        let values: Vec<Vec<Complex64>> = (0..phi)
            .map(|i| (0..q).map(|n| t.character(i).eval(n)).collect())
            .collect();
        for i in 0..phi {
            for j in i..phi {
                let s: Complex64 = (0..q as usize)
                    .map(|n| values[i][n] * values[j][n].conj())
                    .sum();
                let want = if i == j { phi as f64 } else { 0.0 };
                assert!((s - want).norm() < 1e-9, "q={q} rows {i},{j}");
            }
        }
        for a in (1..q).filter(|&a| gcd(a, q) == 1).take(6) {
            for m in 0..q {
                let p = orthogonality_project(&t, a as i64, m as i64).unwrap();
                let want = if m == a { 1.0 } else { 0.0 };
                assert!((p - want).abs() < 1e-10, "q={q} a={a} m={m}");
            }
        }
    }
    let t = CharacterTable::new(12).unwrap();
    assert!(orthogonality_project(&t, 5, 7).unwrap().abs() < 1e-10);
    assert!(matches!(
        orthogonality_project(&t, 4, 7),
        Err(CharError::InvalidArgument(_))
    ));
}

#[test]
fn gauss_sum_identities() {
    for q in 3..=120u64 {
        let t = CharacterTable::new(q).unwrap();
        for i in 0..t.len() {
            let c = t.character(i);
            let tau1 = c.gauss_sum(1);
            // Direct O(q) sum as the oracle.
            let direct: Complex64 = (0..q).map(|l| c.eval(l) * e_q(l as i128, q)).sum();
            assert!((tau1 - direct).norm() < 1e-9);
            if c.is_primitive() {
                assert!(
                    (tau1.norm() - (q as f64).sqrt()).abs() < 1e-9,
                    "q={q} chi={i}"
                );
            }
            for s in (1..q as i64).filter(|&s| gcd(s as u64, q) == 1) {
                let want = chi_eval(&t, i, s).conj() * tau1;
                assert!((gauss_sum(&t, i, s) - want).norm() < 1e-9);
            }
        }
        if is_prime_u64(q) {
            for s in 1..q as i64 {
                assert!((gauss_sum(&t, 0, s) + 1.0).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn primitive_character_counts() {
    // Number of primitive characters mod q is the Dirichlet inverse
    // (μ * φ)(q).
    for q in 3..=200u64 {
        let t = CharacterTable::new(q).unwrap();
        let count = (0..t.len())
            .filter(|&i| t.character(i).is_primitive())
            .count() as i64;
        let mut want = 0i64;
        for d in (1..=q).filter(|d| q % d == 0) {
            want += fpl_core::arith::mobius(q / d).unwrap() as i64 * euler_phi(d).unwrap() as i64;
        }
        assert_eq!(count, want, "q = {q}");
    }
}

#[test]
fn kloosterman_against_naive_sums() {
    for q in 2..=60u64 {
        for u in -3..q as i64 {
            for v in [0, 1, 2, 5, -7] {
                let k = kloosterman(q, u, v).unwrap();
                let want = kloosterman_naive(q, u, v);
                assert!((k.value - want.re).abs() < 1e-9, "S_{q}({u},{v})");
                assert!(want.im.abs() < 1e-9 && k.imag_residual < 1e-9);
                assert!(check_weil(&k).unwrap() >= -1e-9);
            }
        }
    }
    assert!((kloosterman(3, 1, 1).unwrap().value + 1.0).abs() < 1e-12);
    assert!((kloosterman(5, 0, 1).unwrap().value + 1.0).abs() < 1e-12);
    assert!(weil_margin(7, 1, 1).unwrap() > 0.0);
}

#[test]
fn kloosterman_twisted_multiplicativity() {
    for (q1, q2) in [(3u64, 4u64), (5, 7), (8, 9), (7, 11), (4, 25), (9, 16)] {
        let q = q1 * q2;
        let (i1, i2) = (inverse(q2 % q1, q1), inverse(q1 % q2, q2));
        for u in 0..12i64 {
            for v in 0..12i64 {
                let lhs = kloosterman(q, u, v).unwrap().value;
                let a = kloosterman(q1, u * i1 as i64, v * i1 as i64).unwrap().value;
                let b = kloosterman(q2, u * i2 as i64, v * i2 as i64).unwrap().value;
                assert!((lhs - a * b).abs() < 1e-8, "q={q} u={u} v={v}");
            }
        }
    }
}

#[test]
fn weil_bound_on_composites_and_prime_powers() {
    for q in [
        4u64, 8, 9, 16, 25, 27, 32, 49, 64, 81, 121, 125, 128, 243, 12, 30, 60, 210, 360, 420,
    ] {
        let k = KloostermanKernel::new(q).unwrap();
        for u in 0..q as i64 {
            for v in 0..q as i64 {
                check_weil(&k.eval(u, v)).unwrap();
            }
        }
    }
    let k = kloosterman(11, 0, 0).unwrap();
    assert!((k.value - 10.0).abs() < 1e-12 && (k.weil_bound - 22.0).abs() < 1e-12);
}

#[test]
fn character_average_is_a_kloosterman_sum() {
    for q in [5u64, 7, 8, 9, 12, 13, 15] {
        let t = CharacterTable::new(q).unwrap();
        for (mu, a) in [(1u64, 1u64), (2, 3), (4, 1), (7, 2)] {
            if gcd(mu, q) != 1 || gcd(a, q) != 1 {
                continue;
            }
            let mu_inv = inverse(mu % q, q);
            for s in 0..q as i64 {
                for sigma in 0..q as i64 {
                    let avg = character_average(&t, mu, a, s, sigma).unwrap();
                    let want = kloosterman_naive(q, s, sigma * (a * mu_inv % q) as i64);
                    assert!(
                        (avg - want).norm() < 1e-9,
                        "q={q} mu={mu} a={a} s={s} sigma={sigma}"
                    );
                }
            }
        }
    }
}

#[test]
fn limits() {
    assert!(matches!(
        CharacterTable::new(2),
        Err(CharError::InvalidArgument(_))
    ));
    assert!(matches!(
        CharacterTable::new(100_001),
        Err(CharError::TooLarge { .. })
    ));
    assert!(KloostermanKernel::new(1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn characters_are_completely_multiplicative(q in 3u64..400, idx in 0usize..1000, m in -5_000i64..5_000, n in -5_000i64..5_000) {
        let t = CharacterTable::new(q).unwrap();
        let i = idx % t.len();
        let lhs = chi_eval(&t, i, m * n);
        let rhs = chi_eval(&t, i, m) * chi_eval(&t, i, n);
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn kloosterman_symmetries(q in 2u64..2_000, u in -10_000i64..10_000, v in -10_000i64..10_000, a in 1u64..2_000) {
        let k = kloosterman(q, u, v).unwrap();
        prop_assert!((k.value - kloosterman(q, v, u).unwrap().value).abs() < 1e-9);
        prop_assert!(k.imag_residual <= 1e-9);
        prop_assert!(k.margin() >= -1e-9);
        let a = a % q;
        prop_assume!(a != 0 && gcd(a, q) == 1);
        let au = kloosterman(q, u * a as i64, v).unwrap().value;
        let av = kloosterman(q, u, v * a as i64).unwrap().value;
        prop_assert!((au - av).abs() < 1e-9);
    }
}
