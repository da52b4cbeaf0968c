use fpl_core::arith::{gcd, sieve_primes, sieve_primes_with_factors, SieveTable};
use fpl_core::ddouble::DoubleDouble;
use fpl_core::expsums::{
    bilinear_sum, bv_discrepancy, count_pi_i, exp_sum_primes, phase_sum, vdc_bound, weighted_sum_w,
    BilinearInput, ExpSumError, ExpSumSpec, FracWindow, MonomialPhase, DEFAULT_BILINEAR_BUDGET,
};
use fpl_core::phase::{frac_monomial_dd, frac_monomial_u64, DEFAULT_DD_THRESHOLD};
use fpl_core::smoothing::BumpWindow;
use fpl_core::Complex64;
use proptest::prelude::*;
use std::f64::consts::TAU;
use std::sync::OnceLock;

fn table() -> &'static SieveTable {
    static T: OnceLock<SieveTable> = OnceLock::new();
    T.get_or_init(|| sieve_primes_with_factors(2, 200_001).unwrap())
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

// e(x) through std trigonometry, independent of the library's reduction.
fn e_std(x: f64) -> Complex64 {
    let f = x - x.floor();
    Complex64::new((TAU * f).cos(), (TAU * f).sin())
}

fn turn_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prime_sum_matches_naive_loop(
        x in 2u64..50_000, span in 0.05f64..1.0, h in 1i64..20, alpha in 0.01f64..0.99, q in 1u64..40, a in 0u64..40,
    ) {
        let y = x + ((x as f64 * span) as u64).max(1);
        let a = a % q;
        prop_assume!(q == 1 || gcd(a, q) == 1);
        let spec = ExpSumSpec { x, y, h, alpha, q, a };
        let got = exp_sum_primes(&spec, table()).unwrap();
        let mut want = Complex64::new(0.0, 0.0);
        let mut count = 0;
        for p in (x..y).filter(|&p| p % q == a && is_prime(p)) {
            want += e_std(h as f64 * (p as f64).powf(alpha));
            count += 1;
        }
        prop_assert_eq!(got.count, count);
        prop_assert!((got.value - want).norm() <= 1e-9 * (count as f64).max(1.0));
        prop_assert!(got.value.norm() <= count as f64 + 1e-9);

        let conj = exp_sum_primes(&ExpSumSpec { h: -h, ..spec }, table()).unwrap();
        prop_assert!((conj.value - got.value.conj()).norm() <= 1e-12 * (count as f64).max(1.0));
    }

    #[test]
    fn reduction_agrees_with_double_double(n in 2u64..1u64 << 50, h in 1.0f64..50.0, alpha in 0.01f64..0.99) {
        let fast = frac_monomial_u64(h, n, alpha, DEFAULT_DD_THRESHOLD);
        let slow = frac_monomial_dd(h, DoubleDouble::from_u64(n), alpha);
        prop_assert!(turn_distance(fast, slow) <= 1e-10);
    }

    #[test]
    fn reduction_of_perfect_squares(k in 1u64..1_000_000_000) {
        // 1.5 · (k²)^{1/2} = 1.5 k has fractional part 0 or 1/2.
        let f = frac_monomial_u64(1.5, k * k, 0.5, DEFAULT_DD_THRESHOLD);
        let want = if k % 2 == 0 { 0.0 } else { 0.5 };
        prop_assert!(turn_distance(f, want) <= 1e-10);
    }

    #[test]
    fn bilinear_matches_double_loop(
        m0 in 1u64..30, mlen in 1u64..50, n0 in 1u64..30, nlen in 1u64..50,
        q in 1u64..8, a in 0u64..8, h in 0.5f64..5.0, alpha in 0.05f64..0.5,
    ) {
        let a = a % q;
        let (m1, n1) = (m0 + mlen - 1, n0 + nlen - 1);
        let x = ((m0 + m1) * (n0 + n1)) as f64 / 5.0;
        let w = BumpWindow::new(1.8, 0.2, 1.0).unwrap();
        let gamma = |m: u64| 1.0 + (m % 3) as f64;
        let beta = |n: u64| if n % 2 == 0 { -0.5 } else { 1.0 };
        let input = BilinearInput {
            m_range: m0..=m1, n_range: n0..=n1, gamma: &gamma, beta: &beta,
            q, a, h, alpha, x, window: &w, budget: DEFAULT_BILINEAR_BUDGET,
        };
        let r = bilinear_sum(&input).unwrap();
        let mut want = Complex64::new(0.0, 0.0);
        let mut inner_sq = 0.0;
        for m in m0..=m1 {
            let mut inner = Complex64::new(0.0, 0.0);
            for n in n0..=n1 {
                if (m * n) % q != a {
                    continue;
                }
                let psi = w.eval((m * n) as f64 / x);
                inner += e_std(h * ((m * n) as f64).powf(alpha)) * beta(n) * psi;
            }
            want += inner * gamma(m);
            inner_sq += inner.norm_sqr();
        }
        let scale = (mlen * nlen) as f64 * 3.0;
        prop_assert!((r.value - want).norm() <= 1e-10 * scale);
        prop_assert!((r.inner_sq - inner_sq).abs() <= 1e-9 * scale * scale);
        prop_assert!(r.value.norm() <= r.cauchy_bound() * (1.0 + 1e-12) + 1e-12);
        prop_assert!((r.inner_sq - r.diagonal - 2.0 * r.off_diagonal.re).abs() <= 1e-9 * scale * scale);
    }
}

#[test]
fn bilinear_budget_is_enforced() {
    let w = BumpWindow::new(1.8, 0.2, 1.0).unwrap();
    let one = |_: u64| 1.0;
    let input = BilinearInput {
        m_range: 1..=2000,
        n_range: 1..=1000,
        gamma: &one,
        beta: &one,
        q: 1,
        a: 0,
        h: 1.0,
        alpha: 0.1,
        x: 1e6,
        window: &w,
        budget: DEFAULT_BILINEAR_BUDGET,
    };
    assert_eq!(
        bilinear_sum(&input).unwrap_err(),
        ExpSumError::BudgetExceeded {
            needed: 2_000_000,
            budget: DEFAULT_BILINEAR_BUDGET
        }
    );
}

#[test]
fn weighted_sum_matches_direct_lambda_loop() {
    let lambda = |n: u64| -> f64 {
        let p = (2..=n).find(|d| n % d == 0).unwrap();
        let mut m = n;
        while m % p == 0 {
            m /= p;
        }
        if m == 1 {
            (p as f64).ln()
        } else {
            0.0
        }
    };
    for (q, a) in [(1, 0), (5, 2), (7, 3)] {
        let spec = ExpSumSpec {
            x: 100,
            y: 200,
            h: 1,
            alpha: 0.1,
            q,
            a,
        };
        let w = BumpWindow::new(2.0, 0.1, 1.0).unwrap();
        let got = weighted_sum_w(&spec, &w, table()).unwrap();
        let (mut smooth, mut sharp, mut band) =
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
        for n in 2..300u64 {
            if n % q != a {
                continue;
            }
            let l = lambda(n);
            let psi = w.eval(n as f64 / 100.0);
            smooth += e_std((n as f64).powf(0.1)) * l * psi;
            if (100..200).contains(&n) {
                sharp += e_std((n as f64).powf(0.1)) * l;
            } else if psi > 0.0 {
                band += l;
            }
        }
        assert!((got.smoothed - smooth).norm() < 1e-10, "q={q}");
        assert!((got.sharp - sharp).norm() < 1e-10);
        assert!((got.band_mass - band).abs() < 1e-10);
        assert!((got.smoothed - got.sharp).norm() <= got.band_mass + 1e-10);
    }
}

#[test]
fn residue_classes_partition_the_count() {
    let win = FracWindow::new(0.3, 0.2, 0.7).unwrap();
    let x = 100_000;
    let all = count_pi_i(x, 1, 0, &win, table()).unwrap();
    for q in [3u64, 8, 12, 30] {
        let coprime: u64 = (0..q)
            .filter(|&a| gcd(a, q) == 1)
            .map(|a| count_pi_i(x, q, a, &win, table()).unwrap())
            .sum();
        let other = table()
            .primes_in(2, x + 1)
            .filter(|&p| gcd(p, q) != 1 && win.contains(p))
            .count() as u64;
        assert_eq!(coprime + other, all, "q = {q}");
    }
    let full = FracWindow::new(0.1, 0.0, 1.0).unwrap();
    let pi_7_3 = table().primes_in(2, x + 1).filter(|p| p % 7 == 3).count() as u64;
    assert_eq!(count_pi_i(x, 7, 3, &full, table()).unwrap(), pi_7_3);
    let half = FracWindow::new(0.5, 0.0, 0.5).unwrap();
    assert_eq!(count_pi_i(10, 1, 0, &half, table()).unwrap(), 2);
    assert!(count_pi_i(x, 6, 3, &half, table()).is_err());
}

#[test]
fn discrepancy_matches_naive_recount() {
    let win = FracWindow::new(0.1, 0.0, 0.5).unwrap();
    let x = 100_000;
    let r = bv_discrepancy(x, 31, &win, table()).unwrap();
    assert_eq!(r.per_q.len(), 31);
    let pi_i = count_pi_i(x, 1, 0, &win, table()).unwrap() as f64;
    let mut total = 0.0;
    for q in 1..=31u64 {
        let phi = (1..=q).filter(|&a| gcd(a, q) == 1).count() as f64;
        let mut worst = 0.0f64;
        for a in (0..q).filter(|&a| q == 1 || gcd(a, q) == 1) {
            let c = count_pi_i(x, q, a, &win, table()).unwrap() as f64;
            worst = worst.max((c - pi_i / phi).abs());
        }
        let row = r.per_q[q as usize - 1];
        assert!((row.deviation - worst).abs() < 1e-9, "q = {q}");
        assert!(q == 1 || gcd(row.worst_a, q) == 1);
        total += worst;
    }
    assert!((r.total - total).abs() < 1e-9);
    let r10 = bv_discrepancy(x, 10, &win, table()).unwrap();
    assert!(r10.total <= r.total);
    assert!(bv_discrepancy(x, x, &win, table()).is_err());
}

#[test]
fn van_der_corput_sweep() {
    // f_I and f_II shaped phases with small α, as in the Type I/II sums.
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (i, alpha) in [0.02, 0.05, 0.08, 0.1].into_iter().enumerate() {
        for (j, h) in [1.0, 3.0, 10.0, 30.0, 100.0].into_iter().enumerate() {
            for (k, lo) in [100.0, 1000.0, 5000.0, 20_000.0, 60_000.0]
                .into_iter()
                .enumerate()
            {
                let len = [0.5, 1.0][(i + j + k) % 2] * lo;
                let ph = if (i + j + k) % 2 == 0 {
                    MonomialPhase::type_one(h, 10.0, 7.0, alpha, 0.3, lo, lo + len)
                } else {
                    MonomialPhase::type_two(h, 17.0, 11.0, 5.0, alpha, 0.25, lo, lo + len)
                };
                for ph in [
                    ph,
                    MonomialPhase {
                        coeff: -ph.coeff,
                        ..ph
                    },
                ] {
                    let s = phase_sum(&ph).unwrap().norm();
                    let b = vdc_bound(&ph, 8.0).unwrap();
                    assert!(s <= b.bound, "{ph:?}: {s} > {}", b.bound);
                    worst = worst.max(s / b.bound);
                    for piece in &b.pieces {
                        assert!(piece.lambda_max <= 4.0 * piece.lambda_min);
                    }
                    cases += 1;
                }
            }
        }
    }
    assert_eq!(cases, 200);
    assert!(worst < 1.0);
}

#[test]
fn spec_validation_errors() {
    let t = sieve_primes(2, 1000).unwrap();
    let bad = [
        ExpSumSpec {
            x: 10,
            y: 10,
            h: 1,
            alpha: 0.5,
            q: 1,
            a: 0,
        },
        ExpSumSpec {
            x: 10,
            y: 30,
            h: 1,
            alpha: 0.5,
            q: 1,
            a: 0,
        },
        ExpSumSpec {
            x: 10,
            y: 20,
            h: 1,
            alpha: 1.0,
            q: 1,
            a: 0,
        },
        ExpSumSpec {
            x: 10,
            y: 20,
            h: 1,
            alpha: 0.5,
            q: 6,
            a: 2,
        },
    ];
    for s in bad {
        assert!(
            matches!(exp_sum_primes(&s, &t), Err(ExpSumError::InvalidSpec(_))),
            "{s:?}"
        );
    }
    let s = ExpSumSpec {
        x: 600,
        y: 1200,
        h: 1,
        alpha: 0.5,
        q: 1,
        a: 0,
    };
    assert!(matches!(
        exp_sum_primes(&s, &t),
        Err(ExpSumError::TableTooSmall { .. })
    ));
}

// {p^0.1} < 1/2 exactly when k^10 <= p and 1024 p < (2k + 1)^10 for
// k = floor(p^0.1); integer arithmetic, no fractional powers.
fn in_lower_half_tenth_power(p: u64) -> bool {
    let mut k = 1u64;
    while (k + 1).pow(10) <= p {
        k += 1;
    }
    1024 * p < (2 * k + 1).pow(10)
}

#[test]
fn golden_count_at_one_million() {
    let big = sieve_primes(2, 1_000_001).unwrap();
    let win = FracWindow::new(0.1, 0.0, 0.5).unwrap();
    let got = count_pi_i(1_000_000, 7, 3, &win, &big).unwrap();
    let oracle = (3..=1_000_000u64)
        .step_by(7)
        .filter(|&n| is_prime(n) && in_lower_half_tenth_power(n))
        .count() as u64;
    let pi_7_3 = (3..=1_000_000u64)
        .step_by(7)
        .filter(|&n| is_prime(n))
        .count() as u64;
    assert_eq!(got, oracle);
    assert_eq!((got, pi_7_3), (3190, 13105));
    // p^0.1 < 4 here, so the window selects whole blocks of p rather than
    // an equidistributed half: the count is about a quarter of π(X; 7, 3).
    let rel = (got as f64 - 0.5 * pi_7_3 as f64).abs() / pi_7_3 as f64;
    assert!((rel - 0.2566).abs() < 1e-3, "{rel}");
}
