//! Closed-form q-combinatorics: Pochhammer symbols, falling factorials,
//! q-binomials, inversion statistics, and the exact subspace-count formulas
//! for nondegenerate forms over finite fields.
//!
//! Division-heavy formulas are computed as one exact Laurent division of a
//! fully expanded numerator by a fully expanded denominator. A failed
//! division is a transcription bug, so it panics rather than returning a
//! value.

use crate::coeff::{Case, CaseConfig, Dyadic, Scalar, Sign};

use num_bigint::BigInt;

/// `(x;y)_n = prod_{i=1..n} (1 - x y^{i-1})`.
pub fn pochhammer(x: &Scalar, y: &Scalar, n: u32) -> Scalar {
    let one = Scalar::one();
    let mut acc = Scalar::one();
    let mut ypow = Scalar::one();
    for _ in 0..n {
        acc = acc.mul(&one.sub(&x.mul(&ypow)));
        ypow = ypow.mul(y);
    }
    acc
}

/// `(n)_lam = prod_{i=1..n} (lam^i - 1)`.
pub fn falling(n: i64, lam: &Scalar) -> Scalar {
    assert!(n >= 0, "falling factorial needs n >= 0, got {n}");
    let one = Scalar::one();
    let mut acc = Scalar::one();
    let mut p = Scalar::one();
    for _ in 0..n {
        p = p.mul(lam);
        acc = acc.mul(&p.sub(&one));
    }
    acc
}

/// The lambda-binomial `(n)_lam / ((m)_lam (n-m)_lam)`, with value 0 when
/// `m < 0`, `m > n` or `n < 0`.
pub fn qbinom(n: i64, m: i64, lam: &Scalar) -> Scalar {
    if m < 0 || m > n || n < 0 {
        return Scalar::zero();
    }
    let num = falling(n, lam);
    let den = falling(m, lam).mul(&falling(n - m, lam));
    num.exact_div(&den)
        .expect("lambda-binomial is always a polynomial")
}

/// The lambda-multinomial `(n)_lam / prod (m_i)_lam`, 0 when some part is
/// negative. Requires `sum(parts) = n` when all parts are non-negative.
pub fn qmultinom(n: i64, parts: &[i64], lam: &Scalar) -> Scalar {
    if n < 0 || parts.iter().any(|&m| m < 0) {
        return Scalar::zero();
    }
    assert_eq!(
        parts.iter().sum::<i64>(),
        n,
        "multinomial parts must sum to n"
    );
    let num = falling(n, lam);
    let mut den = Scalar::one();
    for &m in parts {
        den = den.mul(&falling(m, lam));
    }
    num.exact_div(&den)
        .expect("lambda-multinomial is always a polynomial")
}

/// Number of inversions: pairs `i < j` with `f(i) > f(j)`.
pub fn inv_stat(f: &[i64]) -> u64 {
    let mut count = 0;
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            if f[i] > f[j] {
                count += 1;
            }
        }
    }
    count
}

/// Weighted inversions: `sum_{i<j} max(0, f(i) - f(j))`.
pub fn inv_tilde(f: &[i64]) -> i64 {
    let mut acc = 0;
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            acc += (f[i] - f[j]).max(0);
        }
    }
    acc
}

/// Multiplicity of the value `m` in `e`.
pub fn lambda_m(e: &[i64], m: i64) -> usize {
    e.iter().filter(|&&x| x == m).count()
}

/// Sum of the entries.
pub fn sigma(e: &[i64]) -> i64 {
    e.iter().sum()
}

/// The correction factor `q^{r/2} + epsilon^{r/2} chi` for even `r`, 1 for
/// odd `r`, appearing in orthogonal-group orders and counts.
pub fn e_factor(r: i64, chi: Sign, cfg: &CaseConfig) -> Scalar {
    assert!(r >= 0);
    if r % 2 != 0 {
        return Scalar::one();
    }
    let qhalf = cfg.q().pow((r / 2) as u32);
    let s = cfg.epsilon().pow(r / 2) * chi;
    qhalf.add(&Scalar::from_sign(s))
}

/// The order of the automorphism group of a nondegenerate space of type
/// `(r, chi)`.
pub fn card_h(r: i64, chi: Sign, cfg: &CaseConfig) -> Scalar {
    assert!(r >= 0);
    match cfg.case() {
        Case::UH => {
            // (-q0)^{C(r,2)} (r)_{-q0}, adjusted by (-1)^r so the value is
            // the actual (positive) unitary group order at every q0.
            let mq0 = cfg.minus_q0();
            let glpart = Scalar::u_pow(r * (r - 1)).mul(&falling(r, &mq0));
            if r % 2 == 0 {
                glpart
            } else {
                glpart.neg()
            }
        }
        Case::S => {
            let q2 = cfg.q().pow(2);
            let half = r / 2;
            let num = Scalar::from_int(2)
                .mul(&cfg.q().pow((half * ((r - 1) / 2)) as u32))
                .mul(&falling(half, &q2));
            num.exact_div(&e_factor(r, chi, cfg))
                .expect("orthogonal group order is a polynomial")
        }
        Case::A => {
            let q2 = cfg.q().pow(2);
            cfg.q().pow((r * r) as u32).mul(&falling(r, &q2))
        }
    }
}

/// The number of nondegenerate subspaces of type `(a, eta)` inside a space
/// of type `(r, chi)`.
pub fn count_r(a: i64, eta: Sign, r: i64, chi: Sign, cfg: &CaseConfig) -> Scalar {
    assert!((0..=r).contains(&a), "need 0 <= a <= r");
    match cfg.case() {
        Case::UH => {
            let mq0 = cfg.minus_q0();
            Scalar::u_pow(2 * a * (r - a)).mul(&qbinom(r, a, &mq0))
        }
        Case::A => {
            let q2 = cfg.q().pow(2);
            Scalar::u_pow(4 * a * (r - a)).mul(&qbinom(r, a, &q2))
        }
        Case::S => {
            let q2 = cfg.q().pow(2);
            let num = Scalar::u_pow(2 * (a * (r - a) / 2))
                .mul(&falling(r / 2, &q2))
                .mul(&e_factor(a, eta, cfg))
                .mul(&e_factor(r - a, chi * eta, cfg));
            if num.is_zero() {
                return Scalar::zero();
            }
            let den = falling(a / 2, &q2)
                .mul(&falling((r - a) / 2, &q2))
                .mul(&e_factor(r, chi, cfg));
            num.exact_div(&den)
                .expect("nondegenerate-subspace count is a polynomial")
                .scale(&Dyadic::new(BigInt::from(1), 1))
        }
    }
}

/// The number of `b`-dimensional isotropic subspaces of a space of type
/// `(r, chi)`.
pub fn count_s(b: i64, r: i64, chi: Sign, cfg: &CaseConfig) -> Scalar {
    assert!((0..=r).contains(&b), "need 0 <= b <= r");
    match cfg.case() {
        Case::UH => {
            // (-q0; q0^2)_b with -q0 = u^2, q0^2 = u^4.
            let poch = pochhammer(&Scalar::u_pow(2), &Scalar::u_pow(4), b as u32);
            poch.mul(&qbinom(r, 2 * b, &cfg.minus_q0()))
        }
        Case::A => {
            let q = cfg.q();
            let q2 = q.pow(2);
            pochhammer(&q.neg(), &q, b as u32).mul(&qbinom(r, b, &q2))
        }
        Case::S => {
            if 2 * b > r {
                return Scalar::zero();
            }
            let q = cfg.q();
            let q2 = q.pow(2);
            let num = pochhammer(&q.neg(), &q, b as u32)
                .mul(&qbinom(r / 2, b, &q2))
                .mul(&e_factor(r - 2 * b, chi * cfg.epsilon().pow(b), cfg));
            if num.is_zero() {
                return Scalar::zero();
            }
            num.exact_div(&e_factor(r, chi, cfg))
                .expect("isotropic-subspace count is a polynomial")
        }
    }
}

/// The number of subspaces `N` with radical dimension `m` and
/// `typ(N/rad) = (n, psi1)` inside a space of type `(r, chi)`, where
/// `r = n + (2/gamma) m + l` and `chi = psi1 epsilon^m psi2`.
pub fn count_q(n: i64, psi1: Sign, m: i64, l: i64, psi2: Sign, cfg: &CaseConfig) -> Scalar {
    assert!(n >= 0 && m >= 0 && l >= 0, "need n, m, l >= 0");
    match cfg.case() {
        Case::UH => {
            let r = n + 2 * m + l;
            let mq0 = cfg.minus_q0();
            let q02 = Scalar::u_pow(4);
            let num = Scalar::u_pow(2 * n * l).mul(&falling(r, &mq0));
            let den = falling(n, &mq0)
                .mul(&falling(m, &q02))
                .mul(&falling(l, &mq0));
            let quot = num.exact_div(&den).expect("subspace count is a polynomial");
            if m % 2 == 0 {
                quot
            } else {
                quot.neg()
            }
        }
        Case::A => {
            let r = n + m + l;
            let q = cfg.q();
            let q2 = q.pow(2);
            let num = Scalar::u_pow(4 * n * l).mul(&falling(r, &q2));
            let den = falling(n, &q2).mul(&falling(m, &q)).mul(&falling(l, &q2));
            num.exact_div(&den).expect("subspace count is a polynomial")
        }
        Case::S => {
            let r = n + 2 * m + l;
            let chi = psi1 * cfg.epsilon().pow(m) * psi2;
            let q = cfg.q();
            let q2 = q.pow(2);
            let num = Scalar::u_pow(2 * (n * l / 2))
                .mul(&falling(r / 2, &q2))
                .mul(&e_factor(n, psi1, cfg))
                .mul(&e_factor(l, psi2, cfg));
            if num.is_zero() {
                return Scalar::zero();
            }
            let den = falling(n / 2, &q2)
                .mul(&falling(m, &q))
                .mul(&falling(l / 2, &q2))
                .mul(&e_factor(r, chi, cfg));
            num.exact_div(&den)
                .expect("subspace count is a polynomial")
                .scale(&Dyadic::new(BigInt::from(1), 1))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffError;
    use num_rational::BigRational;

    fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn sc(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    fn all_sign() -> [Sign; 2] {
        [Sign::Plus, Sign::Minus]
    }

    #[test]
    fn pochhammer_empty_product() {
        assert_eq!(pochhammer(&sc("u^2"), &sc("u^2"), 0), Scalar::one());
    }

    #[test]
    fn falling_expansion() {
        let lam = sc("u^2");
        assert_eq!(falling(2, &lam), sc("u^2 - 1").mul(&sc("u^4 - 1")));
    }

    #[test]
    fn falling_is_signed_pochhammer() {
        // (n)_x = (-1)^n (x;x)_n for n = 3 at a couple of sample points.
        for x in [sc("u^2"), sc("1/2*u^-2 + u^4"), sc("-3 + u^2")] {
            let lhs = falling(3, &x);
            let rhs = pochhammer(&x, &x, 3).neg();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn qbinom_examples() {
        let lam = sc("u^2");
        assert_eq!(qbinom(2, 1, &lam), sc("u^2 + 1"));
        assert!(qbinom(3, -1, &lam).is_zero());
        assert!(qbinom(2, 3, &lam).is_zero());
        assert!(qbinom(-1, 0, &lam).is_zero());
    }

    #[test]
    fn qbinom_counts_subsets_at_one() {
        // Specializing lambda -> 1 must reproduce ordinary binomials, which
        // we count by brute-force subset enumeration.
        let cfg = CaseConfig::s(Sign::Plus);
        let lam = sc("u^2");
        for n in 0..=6i64 {
            for m in 0..=n {
                let mut subsets = 0u64;
                for mask in 0u32..(1 << n) {
                    if mask.count_ones() as i64 == m {
                        subsets += 1;
                    }
                }
                let v = qbinom(n, m, &lam).eval_q(&cfg, &rat(1)).unwrap();
                assert_eq!(v, rat(subsets as i64), "binom({n},{m})");
            }
        }
    }

    #[test]
    fn qmultinom_matches_binomial_chain() {
        let lam = sc("u^2");
        let lhs = qmultinom(5, &[2, 2, 1], &lam);
        let rhs = qbinom(5, 2, &lam).mul(&qbinom(3, 2, &lam));
        assert_eq!(lhs, rhs);
        assert!(qmultinom(2, &[3, -1], &lam).is_zero());
    }

    #[test]
    fn statistics_examples() {
        assert_eq!(inv_stat(&[1, 0, 1, 0]), 3);
        assert_eq!(inv_tilde(&[2, 0, 1]), 3);
        assert_eq!(sigma(&[2, 0, 1]), 3);
        assert_eq!(lambda_m(&[2, 0, 1], 0), 1);
    }

    #[test]
    fn e_factor_examples() {
        let cfg = CaseConfig::s(Sign::Minus);
        for chi in all_sign() {
            let expect = if chi == Sign::Plus {
                sc("2")
            } else {
                Scalar::zero()
            };
            assert_eq!(e_factor(0, chi, &cfg), expect);
            assert_eq!(e_factor(1, chi, &cfg), Scalar::one());
        }
        // e(2,+) with eps = -1 is q - 1.
        assert_eq!(e_factor(2, Sign::Plus, &cfg), sc("u^2 - 1"));
    }

    #[test]
    fn card_h_symplectic_rank_one() {
        let cfg = CaseConfig::a();
        assert_eq!(card_h(1, Sign::Plus, &cfg), sc("u^2").mul(&sc("u^4 - 1")));
    }

    #[test]
    fn card_h_orthogonal_rank_one() {
        for eps in all_sign() {
            let cfg = CaseConfig::s(eps);
            for chi in all_sign() {
                assert_eq!(card_h(1, chi, &cfg), sc("2"));
            }
        }
    }

    #[test]
    fn card_h_unitary_matches_norm_one_count() {
        // Brute-force count of norm-one elements of the quadratic extension.
        let cfg = CaseConfig::uh();
        for p in [2u64, 3] {
            let fq = crate::oracle::ff::Fq::quadratic(p);
            let mut count = 0i64;
            for x in fq.all_elements() {
                if fq.mul(x, fq.frobenius(x)) == fq.one() {
                    count += 1;
                }
            }
            let v = card_h(1, Sign::Plus, &cfg)
                .eval_q(&cfg, &rat(p as i64))
                .unwrap();
            assert_eq!(v, rat(count), "norm-one count over p = {p}");
        }
    }

    #[test]
    fn card_h_unitary_rank_two() {
        // |U_2| = q0 (q0+1) (q0^2-1).
        let cfg = CaseConfig::uh();
        for q0 in [2i64, 3] {
            let v = card_h(2, Sign::Plus, &cfg).eval_q(&cfg, &rat(q0)).unwrap();
            assert_eq!(v, rat(q0 * (q0 + 1) * (q0 * q0 - 1)));
        }
    }

    #[test]
    fn count_r_full_space() {
        for eps in all_sign() {
            let cfg = CaseConfig::s(eps);
            for r in 1..=4 {
                for chi in all_sign() {
                    assert_eq!(count_r(r, chi, r, chi, &cfg), Scalar::one());
                    assert!(count_r(r, chi.flip(), r, chi, &cfg).is_zero());
                }
            }
        }
        let uh = CaseConfig::uh();
        assert_eq!(count_r(2, Sign::Plus, 2, Sign::Plus, &uh), Scalar::one());
    }

    #[test]
    fn count_r_hermitian_lines_in_dim_two() {
        // In a 2-dim Hermitian space over F_4 there are 5 lines, 3 of them
        // isotropic, so 2 nondegenerate ones.
        let cfg = CaseConfig::uh();
        let v = count_r(1, Sign::Plus, 2, Sign::Plus, &cfg)
            .eval_q(&cfg, &rat(2))
            .unwrap();
        assert_eq!(v, rat(2));
    }

    #[test]
    fn count_r_orthogonal_line_split() {
        // Lines in a 2-dim quadratic space split q+1 = (nondegenerate) +
        // (isotropic); both R-values are (q -+ 1)/2 dyadic polynomials.
        for eps in all_sign() {
            let cfg = CaseConfig::s(eps);
            for chi in all_sign() {
                let total: Scalar = count_r(1, Sign::Plus, 2, chi, &cfg)
                    .add(&count_r(1, Sign::Minus, 2, chi, &cfg))
                    .add(&count_s(1, 2, chi, &cfg));
                assert_eq!(total, sc("u^2 + 1"), "eps={eps:?} chi={chi:?}");
            }
        }
    }

    #[test]
    fn count_s_examples() {
        let a = CaseConfig::a();
        assert_eq!(count_s(1, 1, Sign::Plus, &a), sc("u^2 + 1"));

        for eps in all_sign() {
            let cfg = CaseConfig::s(eps);
            // Hyperbolic plane has 2 isotropic lines, anisotropic has none.
            assert_eq!(count_s(1, 2, eps, &cfg), sc("2"));
            assert!(count_s(1, 2, eps.flip(), &cfg).is_zero());
            assert_eq!(count_s(0, 2, eps, &cfg), Scalar::one());
        }

        let uh = CaseConfig::uh();
        assert_eq!(count_s(0, 3, Sign::Plus, &uh), Scalar::one());
        // 3 isotropic lines in the 2-dim Hermitian space over F_4.
        let v = count_s(1, 2, Sign::Plus, &uh).eval_q(&uh, &rat(2)).unwrap();
        assert_eq!(v, rat(3));
    }

    #[test]
    fn count_q_no_radical_reduces_to_count_r() {
        for cfg in [
            CaseConfig::uh(),
            CaseConfig::s(Sign::Plus),
            CaseConfig::s(Sign::Minus),
            CaseConfig::a(),
        ] {
            for n in 0..=3i64 {
                for l in 0..=3i64 {
                    let r = n + l;
                    for psi1 in all_sign() {
                        for psi2 in all_sign() {
                            if cfg.case() != Case::S && (psi1 == Sign::Minus || psi2 == Sign::Minus)
                            {
                                continue;
                            }
                            let chi = psi1 * psi2;
                            let q = count_q(n, psi1, 0, l, psi2, &cfg);
                            let rr = count_r(n, psi1, r, chi, &cfg);
                            assert_eq!(q, rr, "case {cfg} n={n} l={l}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn count_q_point_cases() {
        for cfg in [
            CaseConfig::uh(),
            CaseConfig::s(Sign::Minus),
            CaseConfig::a(),
        ] {
            for n in 1..=3 {
                assert_eq!(
                    count_q(n, Sign::Plus, 0, 0, Sign::Plus, &cfg),
                    Scalar::one()
                );
            }
            assert_eq!(
                count_q(0, Sign::Plus, 0, 0, Sign::Plus, &cfg),
                Scalar::one()
            );
        }
    }

    #[test]
    fn count_q_factors_as_s_times_r() {
        // Q(n,psi1,m,l,psi2) = S(m; r, chi) R(n, psi1; r - (2/gamma) m, eps^m chi),
        // symbolically, across the desk-scale window.
        for cfg in [
            CaseConfig::uh(),
            CaseConfig::s(Sign::Plus),
            CaseConfig::s(Sign::Minus),
            CaseConfig::a(),
        ] {
            let gamma = cfg.gamma();
            for n in 0..=3i64 {
                for m in 0..=2i64 {
                    for l in 0..=3i64 {
                        let r = n + (2 / gamma) * m + l;
                        if r > 4 {
                            continue;
                        }
                        for psi1 in all_sign() {
                            for psi2 in all_sign() {
                                if cfg.case() != Case::S
                                    && (psi1 == Sign::Minus || psi2 == Sign::Minus)
                                {
                                    continue;
                                }
                                let chi = psi1 * cfg.epsilon().pow(m) * psi2;
                                let lhs = count_q(n, psi1, m, l, psi2, &cfg);
                                let rhs = count_s(m, r, chi, &cfg).mul(&count_r(
                                    n,
                                    psi1,
                                    r - (2 / gamma) * m,
                                    cfg.epsilon().pow(m) * chi,
                                    &cfg,
                                ));
                                assert_eq!(
                                    lhs, rhs,
                                    "case {cfg} n={n} m={m} l={l} psi1={psi1} psi2={psi2}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn counts_are_nonnegative_at_prime_powers() {
        let windows: Vec<(CaseConfig, Vec<i64>)> = vec![
            (CaseConfig::uh(), vec![2, 3]),
            (CaseConfig::s(Sign::Minus), vec![3]),
            (CaseConfig::s(Sign::Plus), vec![5]),
            (CaseConfig::a(), vec![2, 3]),
        ];
        for (cfg, qs) in windows {
            for r in 0..=3i64 {
                for chi in all_sign() {
                    if cfg.case() != Case::S && chi == Sign::Minus {
                        continue;
                    }
                    if r == 0 && chi == Sign::Minus {
                        continue;
                    }
                    for q in &qs {
                        for b in 0..=r {
                            let v = count_s(b, r, chi, &cfg).eval_q(&cfg, &rat(*q)).unwrap();
                            assert!(v >= BigRational::from(BigInt::from(0)));
                            assert!(v.is_integer(), "count_s({b};{r},{chi}) at {q}");
                        }
                        for a in 0..=r {
                            for eta in all_sign() {
                                if cfg.case() != Case::S && eta == Sign::Minus {
                                    continue;
                                }
                                let v = count_r(a, eta, r, chi, &cfg)
                                    .eval_q(&cfg, &rat(*q))
                                    .unwrap();
                                assert!(v >= BigRational::from(BigInt::from(0)));
                                assert!(v.is_integer(), "count_r({a},{eta};{r},{chi}) at {q}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn eval_rejects_odd_powers() {
        let cfg = CaseConfig::s(Sign::Plus);
        assert_eq!(sc("u").eval_q(&cfg, &rat(3)), Err(CoeffError::OddExponent));
    }
}
