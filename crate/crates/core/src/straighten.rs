//! The straightening rewrite system.
//!
//! Adjacent letter pairs that are ascending (or share a value with opposite
//! characters in the symmetric case) are eligible for rewriting; each such
//! pair is the unique minimal monomial of a degree-2 relation, and solving
//! the relation for it yields a rewrite rule. Repeatedly rewriting the
//! leftmost eligible pair terminates: every rule strictly raises the value
//! of the first rewritten letter while all letters stay inside the envelope
//! of the input word. Confluence over the ambiguity overlaps is checked by
//! [`confluence_check`], which covers the finite list that settles the
//! diamond lemma for these systems.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;

use crate::coeff::{Case, CaseConfig, Dyadic, Scalar, Sign};
use crate::typmon::{delta_to_orbit, Element, Letter, Monomial, OrbitCombination, TypmonError};

use num_bigint::BigInt;

/// Rewrite budget: one unit per rule application.
pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StraightenError {
    /// The pair is already in normal order.
    NotInJ2,
    /// The termination guard tripped; indicates a bug, not an input error.
    FuelExhausted,
    /// The requested window cannot contain the ambiguity overlaps.
    WindowTooNarrow,
    /// A result left the normal-form span where one was required.
    Typmon(TypmonError),
}

impl fmt::Display for StraightenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StraightenError::NotInJ2 => write!(f, "pair is not rewritable"),
            StraightenError::FuelExhausted => write!(f, "rewrite fuel exhausted"),
            StraightenError::WindowTooNarrow => write!(f, "window too narrow (need width >= 5)"),
            StraightenError::Typmon(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for StraightenError {}

impl From<TypmonError> for StraightenError {
    fn from(e: TypmonError) -> StraightenError {
        StraightenError::Typmon(e)
    }
}

/// Is the adjacent pair `(x, y)` eligible for rewriting?
pub fn is_j2_pair(x: &Letter, y: &Letter, cfg: &CaseConfig) -> bool {
    match cfg.case() {
        Case::S => x.a < y.a || (x.a == y.a && x.s != y.s),
        _ => x.a < y.a,
    }
}

/// A degree-2 rewrite rule: the eligible pair on the left, its reduction on
/// the right. `lhs - rhs` is a relation generator (up to the factor 2 for
/// unit-gap pairs).
#[derive(Debug, Clone)]
pub struct RewriteRule {
    pub lhs: Monomial,
    pub rhs: Element,
}

fn pair_elem(terms: &[(Letter, Letter, Scalar)]) -> Element {
    let mut e = Element::zero(2);
    for (x, y, c) in terms {
        e.add_term(Monomial(vec![*x, *y]), c.clone());
    }
    e
}

/// The reduction of an eligible pair, as a list of `(letter, letter, coeff)`.
fn rewrite_rhs(x: Letter, y: Letter, cfg: &CaseConfig) -> Vec<(Letter, Letter, Scalar)> {
    let (a, b) = (x.a, y.a);
    let gap = b - a;
    match cfg.case() {
        Case::UH | Case::A => {
            // coefficient base: -q0 = u^2 (Hermitian), q^2 = u^4 (alternating)
            let step = if cfg.case() == Case::UH { 2 } else { 4 };
            if gap == 1 {
                vec![(Letter::plain(b), Letter::plain(a), Scalar::one())]
            } else {
                let c = Scalar::u_pow(step * (gap - 1));
                vec![
                    (Letter::plain(a + 1), Letter::plain(b - 1), Scalar::one()),
                    (Letter::plain(b), Letter::plain(a), c.clone()),
                    (Letter::plain(b - 1), Letter::plain(a + 1), c.neg()),
                ]
            }
        }
        Case::S => {
            let (s1, s2) = (x.s, y.s);
            let l = Letter::new;
            if gap == 0 {
                // (a,s)(a,-s) reduces to zero.
                return Vec::new();
            }
            if gap % 2 == 1 {
                if gap == 1 {
                    return vec![(l(b, s2), l(a, s1), Scalar::one())];
                }
                let c = Scalar::u_pow(gap - 1); // q^{(gap-1)/2}
                return vec![
                    (l(a + 1, s2), l(b - 1, s1), Scalar::one()),
                    (l(b, s2), l(a, s1), c.clone()),
                    (l(b - 1, s1), l(a + 1, s2), c.neg()),
                ];
            }
            if s1 != s2 {
                // (a,s)(b,-s) -> -q^{gap/2} (b,s)(a,-s)
                return vec![(l(b, s1), l(a, s2), Scalar::u_pow(gap).neg())];
            }
            let s = s1;
            let eps = cfg.epsilon_scalar();
            let mut out = vec![
                (l(a + 1, s), l(b - 1, s), Scalar::one()),
                (l(a + 1, s.flip()), l(b - 1, s.flip()), eps.clone()),
                (l(a + 2, s.flip()), l(b - 2, s.flip()), eps.neg()),
            ];
            if gap >= 4 {
                let c = Scalar::u_pow(gap - 2); // q^{(gap-2)/2}
                out.push((l(b - 1, s), l(a + 1, s), c.clone()));
                out.push((l(b - 2, s), l(a + 2, s), c.neg()));
                out.push((l(b - 1, s.flip()), l(a + 1, s.flip()), c.mul(&eps)));
                out.push((l(b, s.flip()), l(a, s.flip()), c.mul(&eps).neg()));
            }
            out
        }
    }
}

/// The rewrite rule whose left side is the eligible pair `(x, y)`.
pub fn rewrite_rule_for(
    x: Letter,
    y: Letter,
    cfg: &CaseConfig,
) -> Result<RewriteRule, StraightenError> {
    if !is_j2_pair(&x, &y, cfg) {
        return Err(StraightenError::NotInJ2);
    }
    Ok(RewriteRule {
        lhs: Monomial(vec![x, y]),
        rhs: pair_elem(&rewrite_rhs(x, y, cfg)),
    })
}

fn relhalf(a: i64, b: i64, s: Sign, cfg: &CaseConfig) -> Element {
    let l = Letter::new;
    let eps = cfg.epsilon_scalar();
    pair_elem(&[
        (l(a, s), l(b, s), Scalar::one().neg()),
        (l(a - 1, s), l(b + 1, s), Scalar::one()),
        (l(a, s.flip()), l(b, s.flip()), eps.neg()),
        (l(a + 1, s.flip()), l(b - 1, s.flip()), eps),
    ])
}

/// The degree-2 relation generator for the eligible pair `(x, y)`.
pub fn rel_generator(x: Letter, y: Letter, cfg: &CaseConfig) -> Result<Element, StraightenError> {
    if !is_j2_pair(&x, &y, cfg) {
        return Err(StraightenError::NotInJ2);
    }
    let (a, b) = (x.a, y.a);
    let gap = b - a;
    let l = Letter::new;
    Ok(match cfg.case() {
        Case::UH | Case::A => {
            let step = if cfg.case() == Case::UH { 2 } else { 4 };
            let c = Scalar::u_pow(step * (gap - 1));
            pair_elem(&[
                (l(a, Sign::Plus), l(b, Sign::Plus), Scalar::one()),
                (
                    l(a + 1, Sign::Plus),
                    l(b - 1, Sign::Plus),
                    Scalar::one().neg(),
                ),
                (l(b, Sign::Plus), l(a, Sign::Plus), c.neg()),
                (l(b - 1, Sign::Plus), l(a + 1, Sign::Plus), c),
            ])
        }
        Case::S => {
            let (s1, s2) = (x.s, y.s);
            if gap % 2 == 1 {
                let c = Scalar::u_pow(gap - 1);
                pair_elem(&[
                    (l(a, s1), l(b, s2), Scalar::one()),
                    (l(a + 1, s2), l(b - 1, s1), Scalar::one().neg()),
                    (l(b, s2), l(a, s1), c.neg()),
                    (l(b - 1, s1), l(a + 1, s2), c),
                ])
            } else if s1 != s2 {
                pair_elem(&[
                    (l(a, s1), l(b, s2), Scalar::one()),
                    (l(b, s1), l(a, s2), Scalar::u_pow(gap)),
                ])
            } else {
                relhalf(a + 1, b - 1, s1, cfg)
                    .add(&relhalf(b - 1, a + 1, s1, cfg).scale(&Scalar::u_pow(gap - 2)))
            }
        }
    })
}

/// Every relation generator whose letters lie in `[lo, hi]`. For the
/// Hermitian and alternating cases this includes the unit-gap generators
/// both on their own and as halves of the gap family.
pub fn rel_generators(cfg: &CaseConfig, lo: i64, hi: i64) -> Vec<Element> {
    assert!(lo <= hi);
    let mut out = Vec::new();
    match cfg.case() {
        Case::UH | Case::A => {
            for a in lo..hi {
                // The plain swap generator (a, a+1) - (a+1, a).
                out.push(pair_elem(&[
                    (Letter::plain(a), Letter::plain(a + 1), Scalar::one()),
                    (Letter::plain(a + 1), Letter::plain(a), Scalar::one().neg()),
                ]));
            }
            for a in lo..hi {
                for b in a + 1..=hi {
                    out.push(rel_generator(Letter::plain(a), Letter::plain(b), cfg).unwrap());
                }
            }
        }
        Case::S => {
            let signs = [Sign::Plus, Sign::Minus];
            for a in lo..=hi {
                for b in a..=hi {
                    for s1 in signs {
                        for s2 in signs {
                            let x = Letter::new(a, s1);
                            let y = Letter::new(b, s2);
                            if is_j2_pair(&x, &y, cfg) {
                                out.push(rel_generator(x, y, cfg).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn j2_positions(m: &Monomial, cfg: &CaseConfig) -> Vec<usize> {
    let letters = m.letters();
    (0..letters.len().saturating_sub(1))
        .filter(|&i| is_j2_pair(&letters[i], &letters[i + 1], cfg))
        .collect()
}

fn rewrite_at(m: &Monomial, i: usize, cfg: &CaseConfig) -> Vec<(Monomial, Scalar)> {
    let letters = m.letters();
    rewrite_rhs(letters[i], letters[i + 1], cfg)
        .into_iter()
        .map(|(x, y, c)| {
            let mut new_letters = letters.to_vec();
            new_letters[i] = x;
            new_letters[i + 1] = y;
            (Monomial(new_letters), c)
        })
        .collect()
}

enum Strategy<'a> {
    Leftmost,
    Random(&'a mut ChaCha8Rng),
}

fn normal_form_impl(
    x: &Element,
    cfg: &CaseConfig,
    mut fuel: u64,
    mut strategy: Strategy,
) -> Result<Element, StraightenError> {
    let mut done = Element::zero(x.degree());
    let mut pending: std::collections::BTreeMap<Monomial, Scalar> =
        x.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    while let Some((m, c)) = pending.pop_first() {
        if c.is_zero() {
            continue;
        }
        let positions = j2_positions(&m, cfg);
        if positions.is_empty() {
            done.add_term(m, c);
            continue;
        }
        if fuel == 0 {
            return Err(StraightenError::FuelExhausted);
        }
        fuel -= 1;
        let i = match &mut strategy {
            Strategy::Leftmost => positions[0],
            Strategy::Random(rng) => positions[rng.gen_range(0..positions.len())],
        };
        for (m2, c2) in rewrite_at(&m, i, cfg) {
            let coeff = c.mul(&c2);
            if coeff.is_zero() {
                continue;
            }
            match pending.remove(&m2) {
                None => {
                    pending.insert(m2, coeff);
                }
                Some(old) => {
                    let sum = old.add(&coeff);
                    if !sum.is_zero() {
                        pending.insert(m2, sum);
                    }
                }
            }
        }
    }
    Ok(done)
}

/// Straightened normal form: no monomial contains an adjacent eligible
/// pair. Rewrites the leftmost eligible pair until none remain.
pub fn normal_form(x: &Element, cfg: &CaseConfig) -> Result<Element, StraightenError> {
    normal_form_impl(x, cfg, DEFAULT_FUEL, Strategy::Leftmost)
}

/// Normal form computed with a randomized rule-application order; agrees
/// with [`normal_form`] by confluence.
pub fn normal_form_random(
    x: &Element,
    cfg: &CaseConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Element, StraightenError> {
    normal_form_impl(x, cfg, DEFAULT_FUEL, Strategy::Random(rng))
}

/// The quotient map onto orbit coordinates: normal form followed by the
/// orbit-coordinates relabeling. Its kernel is exactly the relation ideal.
pub fn str_map(x: &Element, cfg: &CaseConfig) -> Result<OrbitCombination, StraightenError> {
    let nf = normal_form(x, cfg)?;
    Ok(delta_to_orbit(&nf, cfg)?)
}

/// One overlap that failed to resolve, with both reductions.
#[derive(Debug, Clone, Serialize)]
pub struct OverlapWitness {
    pub monomial: String,
    pub left_first: String,
    pub right_first: String,
}

/// Outcome of sweeping all degree-3 ambiguity overlaps in a window.
#[derive(Debug, Clone, Serialize)]
pub struct ConfluenceReport {
    pub case: String,
    pub window: (i64, i64),
    pub total_overlaps: usize,
    /// Counts of the finite overlap families that settle the general case,
    /// by descriptive label.
    pub named_overlaps: Vec<(String, usize)>,
    pub failures: Vec<OverlapWitness>,
}

impl ConfluenceReport {
    pub fn is_confluent(&self) -> bool {
        self.failures.is_empty()
    }

    /// Every named overlap family was actually exercised.
    pub fn covers_named_overlaps(&self) -> bool {
        self.named_overlaps.iter().all(|(_, n)| *n > 0)
    }
}

fn named_overlap_label(
    x: &Letter,
    y: &Letter,
    z: &Letter,
    cfg: &CaseConfig,
) -> Option<&'static str> {
    let g1 = y.a - x.a;
    let g2 = z.a - y.a;
    match cfg.case() {
        Case::UH | Case::A => (g1 == 1 && g2 == 1).then_some("(a,a+1,a+2)"),
        Case::S => match (g1, g2) {
            (0, 0) => Some("(a,-s)(a,s)(a,-s)"),
            (0, 1) => Some("(a,-s1)(a,s1)(a+1,s2)"),
            (0, 2) if z.s == y.s => Some("(a,-s)(a,s)(a+2,s)"),
            (1, 1) => Some("(a,s1)(a+1,s2)(a+2,s3)"),
            (1, 2) if z.s == y.s => Some("(a,s1)(a+1,s2)(a+3,s2)"),
            (2, 2) if x.s == y.s && y.s == z.s => Some("(a,s)(a+2,s)(a+4,s)"),
            _ => None,
        },
    }
}

fn window_letters(cfg: &CaseConfig, lo: i64, hi: i64) -> Vec<Letter> {
    let mut out = Vec::new();
    for a in lo..=hi {
        match cfg.case() {
            Case::S => {
                out.push(Letter::new(a, Sign::Plus));
                out.push(Letter::new(a, Sign::Minus));
            }
            _ => out.push(Letter::plain(a)),
        }
    }
    out
}

/// Resolve every two-rule overlap on degree-3 monomials in the window:
/// reduce the left pair first and the right pair first, fully normalize
/// both, and demand equality.
pub fn confluence_check(
    cfg: &CaseConfig,
    lo: i64,
    hi: i64,
) -> Result<ConfluenceReport, StraightenError> {
    if hi - lo < 4 {
        return Err(StraightenError::WindowTooNarrow);
    }
    let letters = window_letters(cfg, lo, hi);
    let mut named: std::collections::BTreeMap<&'static str, usize> = Default::default();
    match cfg.case() {
        Case::S => {
            for label in [
                "(a,-s)(a,s)(a,-s)",
                "(a,-s1)(a,s1)(a+1,s2)",
                "(a,-s)(a,s)(a+2,s)",
                "(a,s1)(a+1,s2)(a+2,s3)",
                "(a,s1)(a+1,s2)(a+3,s2)",
                "(a,s)(a+2,s)(a+4,s)",
            ] {
                named.insert(label, 0);
            }
        }
        _ => {
            named.insert("(a,a+1,a+2)", 0);
        }
    }
    let mut total = 0;
    let mut failures = Vec::new();
    for &x in &letters {
        for &y in &letters {
            if !is_j2_pair(&x, &y, cfg) {
                continue;
            }
            for &z in &letters {
                if !is_j2_pair(&y, &z, cfg) {
                    continue;
                }
                total += 1;
                if let Some(label) = named_overlap_label(&x, &y, &z, cfg) {
                    *named.get_mut(label).unwrap() += 1;
                }
                let m = Monomial(vec![x, y, z]);
                let mut left = Element::zero(3);
                for (m2, c2) in rewrite_at(&m, 0, cfg) {
                    left.add_term(m2, c2);
                }
                let mut right = Element::zero(3);
                for (m2, c2) in rewrite_at(&m, 1, cfg) {
                    right.add_term(m2, c2);
                }
                let lnf = normal_form(&left, cfg)?;
                let rnf = normal_form(&right, cfg)?;
                if lnf != rnf {
                    failures.push(OverlapWitness {
                        monomial: m.to_string(),
                        left_first: lnf.to_string(),
                        right_first: rnf.to_string(),
                    });
                }
            }
        }
    }
    Ok(ConfluenceReport {
        case: cfg.to_string(),
        window: (lo, hi),
        total_overlaps: total,
        named_overlaps: named.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        failures,
    })
}

/// Outcome of checking the derived symmetric-case congruences.
#[derive(Debug, Clone, Serialize)]
pub struct DerivedRelationsReport {
    pub checks: usize,
    pub failures: Vec<String>,
}

/// Check the three derived congruences of the symmetric case over a window:
/// sign flips on equal values, unit-gap commutation, and the explicit
/// two-gap reduction with its split coefficients.
pub fn derived_relations_check(cfg: &CaseConfig, lo: i64, hi: i64) -> DerivedRelationsReport {
    assert_eq!(
        cfg.case(),
        Case::S,
        "derived relations are symmetric-case only"
    );
    let signs = [Sign::Plus, Sign::Minus];
    let mut checks = 0;
    let mut failures = Vec::new();
    let mut demand_zero = |label: String, x: &Element| {
        checks += 1;
        match normal_form(x, cfg) {
            Ok(nf) if nf.is_zero() => {}
            Ok(nf) => failures.push(format!("{label}: remainder {nf}")),
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    };
    let half = Scalar::term(Dyadic::new(BigInt::from(1), 1), 0);
    let q = cfg.q();
    let eps = cfg.epsilon_scalar();
    for a in lo..=hi {
        for p1 in signs {
            for p2 in signs {
                // Equal values with both signs flipped.
                let lhs = Element::from_echi(&[a, a], &[p1, p2], cfg);
                let rhs = Element::from_echi(&[a, a], &[p1.flip(), p2.flip()], cfg);
                demand_zero(format!("sign-flip a={a} {p1}{p2}"), &lhs.sub(&rhs));

                // Unit gap commutes.
                if a < hi {
                    let lhs = Element::from_echi(&[a, a + 1], &[p1, p2], cfg);
                    let rhs = Element::from_echi(&[a + 1, a], &[p2, p1], cfg);
                    demand_zero(format!("unit-gap a={a} {p1}{p2}"), &lhs.sub(&rhs));
                }

                // Two-gap reduction with split coefficients.
                if a + 2 <= hi {
                    let lhs = Element::from_echi(&[a, a + 2], &[p1, p2], cfg);
                    let e12 = eps.scale(&Dyadic::from_int((p1 * p2).as_i8() as i64));
                    let one_plus = Scalar::one().add(&e12);
                    let c_plus = Scalar::one().add(&q.mul(&eps)).mul(&half);
                    let c_minus = Scalar::one().sub(&q.mul(&eps)).mul(&half);
                    let rhs = Element::from_echi(&[a + 1, a + 1], &[p1, p2], cfg)
                        .scale(&one_plus)
                        .sub(
                            &Element::from_echi(&[a + 2, a], &[p2, p1], cfg)
                                .scale(&c_plus)
                                .add(
                                    &Element::from_echi(&[a + 2, a], &[p2.flip(), p1.flip()], cfg)
                                        .scale(&c_minus),
                                )
                                .scale(&e12),
                        );
                    demand_zero(format!("two-gap a={a} {p1}{p2}"), &lhs.sub(&rhs));
                }
            }
        }
    }
    DerivedRelationsReport { checks, failures }
}

/// Outcome of the strategy-independence fuzz.
#[derive(Debug, Clone, Serialize)]
pub struct FuzzReport {
    pub seeds: u64,
    pub discrepancies: Vec<String>,
}

/// Normalize random window elements with the leftmost strategy and with a
/// seeded random strategy; confluence says the results agree.
pub fn strategy_fuzz(cfg: &CaseConfig, lo: i64, hi: i64, seeds: u64, base_seed: u64) -> FuzzReport {
    let letters = window_letters(cfg, lo, hi);
    let coeffs: Vec<Scalar> = vec![
        Scalar::one(),
        Scalar::one().neg(),
        Scalar::from_int(2),
        Scalar::term(Dyadic::new(BigInt::from(1), 1), 0),
        Scalar::u_pow(2),
        Scalar::u_pow(2).neg(),
    ];
    let mut discrepancies = Vec::new();
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(seed));
        let degree = rng.gen_range(2..=3);
        let n_terms = rng.gen_range(1..=3);
        let mut x = Element::zero(degree);
        for _ in 0..n_terms {
            let m = Monomial(
                (0..degree)
                    .map(|_| letters[rng.gen_range(0..letters.len())])
                    .collect(),
            );
            x.add_term(m, coeffs[rng.gen_range(0..coeffs.len())].clone());
        }
        let left = normal_form(&x, cfg);
        let rand_nf = normal_form_random(&x, cfg, &mut rng);
        match (left, rand_nf) {
            (Ok(l), Ok(r)) => {
                if l != r {
                    discrepancies.push(format!("seed {seed}: {x} -> {l} vs {r}"));
                }
            }
            (l, r) => discrepancies.push(format!("seed {seed}: {l:?} vs {r:?}")),
        }
    }
    FuzzReport {
        seeds,
        discrepancies,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typmon::orbit_of_descending;
    use num_rational::BigRational;

    fn all_cfgs() -> Vec<CaseConfig> {
        vec![
            CaseConfig::uh(),
            CaseConfig::s(Sign::Plus),
            CaseConfig::s(Sign::Minus),
            CaseConfig::a(),
        ]
    }

    fn word(vals: &[i64]) -> Element {
        Element::from_monomial(Monomial::from_values(vals))
    }

    fn sc(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    #[test]
    fn unit_gap_rule_swaps() {
        let cfg = CaseConfig::uh();
        let rule = rewrite_rule_for(Letter::plain(0), Letter::plain(1), &cfg).unwrap();
        assert_eq!(
            rule.rhs,
            Element::from_monomial(Monomial::from_values(&[1, 0]))
        );

        let s = CaseConfig::s(Sign::Minus);
        let rule =
            rewrite_rule_for(Letter::new(3, Sign::Plus), Letter::new(4, Sign::Minus), &s).unwrap();
        assert_eq!(
            rule.rhs,
            Element::from_monomial(Monomial::from_pairs(&[(4, Sign::Minus), (3, Sign::Plus)]))
        );
    }

    #[test]
    fn equal_value_opposite_sign_vanishes() {
        let s = CaseConfig::s(Sign::Plus);
        let rule =
            rewrite_rule_for(Letter::new(2, Sign::Plus), Letter::new(2, Sign::Minus), &s).unwrap();
        assert!(rule.rhs.is_zero());
        assert!(
            rewrite_rule_for(Letter::new(2, Sign::Plus), Letter::new(2, Sign::Plus), &s).is_err()
        );
    }

    #[test]
    fn normal_form_gap_two_table() {
        // Hermitian: (0,2) -> (1 + q0)(1,1) - q0 (2,0) with q0 = -u^2.
        let uh = CaseConfig::uh();
        let nf = normal_form(&word(&[0, 2]), &uh).unwrap();
        let mut expect = Element::zero(2);
        expect.add_term(Monomial::from_values(&[1, 1]), sc("1 - u^2"));
        expect.add_term(Monomial::from_values(&[2, 0]), sc("u^2"));
        assert_eq!(nf, expect);

        // Alternating: (0,2) -> (1 - q^2)(1,1) + q^2 (2,0) with q = u^2.
        let a = CaseConfig::a();
        let nf = normal_form(&word(&[0, 2]), &a).unwrap();
        let mut expect = Element::zero(2);
        expect.add_term(Monomial::from_values(&[1, 1]), sc("1 - u^4"));
        expect.add_term(Monomial::from_values(&[2, 0]), sc("u^4"));
        assert_eq!(nf, expect);
    }

    #[test]
    fn descending_words_are_fixed() {
        for cfg in all_cfgs() {
            let x = word(&[3, 1, 0]);
            assert_eq!(normal_form(&x, &cfg).unwrap(), x);
        }
    }

    #[test]
    fn generator_tables() {
        // Alternating gap-2 generator: (0,2) - (1,1) - q^2((2,0) - (1,1)).
        let a = CaseConfig::a();
        let g = rel_generator(Letter::plain(0), Letter::plain(2), &a).unwrap();
        let mut expect = Element::zero(2);
        expect.add_term(Monomial::from_values(&[0, 2]), Scalar::one());
        expect.add_term(Monomial::from_values(&[1, 1]), sc("u^4 - 1"));
        expect.add_term(Monomial::from_values(&[2, 0]), sc("u^4").neg());
        assert_eq!(g, expect);

        // Symmetric equal-value opposite-sign generator is twice the word.
        for eps in [Sign::Plus, Sign::Minus] {
            let s = CaseConfig::s(eps);
            let g =
                rel_generator(Letter::new(3, Sign::Plus), Letter::new(3, Sign::Minus), &s).unwrap();
            let mut expect = Element::zero(2);
            expect.add_term(
                Monomial::from_pairs(&[(3, Sign::Plus), (3, Sign::Minus)]),
                Scalar::from_int(2),
            );
            assert_eq!(g, expect);
        }
    }

    #[test]
    fn same_sign_even_gap_rule_matches_generator() {
        // The frozen expansion of the even-gap same-sign rule differs from
        // its pair by exactly the corresponding generator.
        for eps in [Sign::Plus, Sign::Minus] {
            let cfg = CaseConfig::s(eps);
            for s in [Sign::Plus, Sign::Minus] {
                for gap in [2i64, 4, 6] {
                    let x = Letter::new(0, s);
                    let y = Letter::new(gap, s);
                    let rule = rewrite_rule_for(x, y, &cfg).unwrap();
                    let diff = Element::from_monomial(rule.lhs.clone()).sub(&rule.rhs);
                    let gen = rel_generator(x, y, &cfg).unwrap();
                    if gap == 2 {
                        // Unit-gap-style halving: the generator is twice the
                        // rule difference.
                        assert_eq!(gen, diff.scale(&Scalar::from_int(2)), "gap {gap}");
                    } else {
                        assert_eq!(gen, diff, "gap {gap}");
                    }
                }
            }
        }
    }

    #[test]
    fn fuel_guard_reports_exhaustion() {
        let cfg = CaseConfig::uh();
        let x = word(&[0, 4]);
        assert_eq!(
            normal_form_impl(&x, &cfg, 1, Strategy::Leftmost),
            Err(StraightenError::FuelExhausted)
        );
    }

    #[test]
    fn generators_normalize_to_zero() {
        for cfg in all_cfgs() {
            for g in rel_generators(&cfg, 0, 4) {
                let nf = normal_form(&g, &cfg).unwrap();
                assert!(nf.is_zero(), "case {cfg}: generator {g} -> {nf}");
            }
        }
    }

    #[test]
    fn two_sided_ideal_property() {
        // Sandwiching generators by window letters stays in the kernel.
        for cfg in all_cfgs() {
            let letters = window_letters(&cfg, 0, 3);
            for g in rel_generators(&cfg, 0, 3) {
                for &l in &letters {
                    let left = Element::from_monomial(Monomial(vec![l])).concat(&g);
                    assert!(normal_form(&left, &cfg).unwrap().is_zero());
                    let right = g.concat(&Element::from_monomial(Monomial(vec![l])));
                    assert!(normal_form(&right, &cfg).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn rule_rhs_differs_from_lhs_by_a_generator() {
        // lhs - rhs must normalize to zero (it lies in the relation ideal).
        for cfg in all_cfgs() {
            let letters = window_letters(&cfg, 0, 4);
            for &x in &letters {
                for &y in &letters {
                    if let Ok(rule) = rewrite_rule_for(x, y, &cfg) {
                        let diff = Element::from_monomial(rule.lhs.clone()).sub(&rule.rhs);
                        assert!(
                            normal_form(&diff, &cfg).unwrap().is_zero(),
                            "case {cfg}, pair {x}{y}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn normal_form_idempotent_and_enveloped() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for cfg in all_cfgs() {
            let letters = window_letters(&cfg, -1, 3);
            for _ in 0..60 {
                let degree = rng.gen_range(1..=3);
                let m = Monomial(
                    (0..degree)
                        .map(|_| letters[rng.gen_range(0..letters.len())])
                        .collect(),
                );
                let lo = m.letters().iter().map(|l| l.a).min().unwrap();
                let hi = m.letters().iter().map(|l| l.a).max().unwrap();
                let sigma = m.sigma();
                let x = Element::from_monomial(m);
                let nf = normal_form(&x, &cfg).unwrap();
                for (w, _) in nf.terms() {
                    assert!(w.is_normal_word());
                    assert_eq!(w.sigma(), sigma, "grading preserved");
                    assert!(
                        w.letters().iter().all(|l| l.a >= lo && l.a <= hi),
                        "envelope"
                    );
                }
                assert_eq!(normal_form(&nf, &cfg).unwrap(), nf, "idempotent");
            }
        }
    }

    #[test]
    fn str_map_examples() {
        // A descending determinant-sign basis word maps to its orbit with
        // coefficient one.
        let s = CaseConfig::s(Sign::Minus);
        let w = Element::from_echi(&[1, 0], &[Sign::Plus, Sign::Minus], &s);
        let orb = str_map(&w, &s).unwrap();
        let o = orbit_of_descending(&Monomial::from_pairs(&[(1, Sign::Plus), (0, Sign::Minus)]))
            .unwrap();
        assert_eq!(orb.coeff(&o), Scalar::one());
        assert_eq!(orb, crate::typmon::OrbitCombination::from_orbit(o));

        // Hermitian (0,2) at q0 = 2: 3 on the (1,1) orbit, -2 on (2,0).
        let uh = CaseConfig::uh();
        let orb = str_map(&word(&[0, 2]), &uh).unwrap();
        let q0 = BigRational::from(num_bigint::BigInt::from(2));
        let o11 = orbit_of_descending(&Monomial::from_values(&[1, 1])).unwrap();
        let o20 = orbit_of_descending(&Monomial::from_values(&[2, 0])).unwrap();
        assert_eq!(
            orb.coeff(&o11).eval_q(&uh, &q0).unwrap(),
            BigRational::from(num_bigint::BigInt::from(3))
        );
        assert_eq!(
            orb.coeff(&o20).eval_q(&uh, &q0).unwrap(),
            BigRational::from(num_bigint::BigInt::from(-2))
        );
    }

    #[test]
    fn confluent_on_window() {
        for cfg in all_cfgs() {
            let report = confluence_check(&cfg, 0, 4).unwrap();
            assert!(report.is_confluent(), "case {cfg}: {:?}", report.failures);
            assert!(
                report.covers_named_overlaps(),
                "case {cfg}: {:?}",
                report.named_overlaps
            );
        }
        assert!(matches!(
            confluence_check(&CaseConfig::uh(), 0, 3),
            Err(StraightenError::WindowTooNarrow)
        ));
    }

    #[test]
    fn derived_relations_hold() {
        for eps in [Sign::Plus, Sign::Minus] {
            let cfg = CaseConfig::s(eps);
            let report = derived_relations_check(&cfg, 0, 4);
            assert!(report.failures.is_empty(), "{:?}", report.failures);
            assert!(report.checks > 0);
        }
    }

    #[test]
    fn strategies_agree() {
        for cfg in all_cfgs() {
            let report = strategy_fuzz(&cfg, 0, 4, 50, 1);
            assert!(
                report.discrepancies.is_empty(),
                "{:?}",
                report.discrepancies
            );
        }
    }

    #[test]
    fn normal_words_survive_normalization() {
        // The irreducible monomials are exactly the weakly descending words
        // with block-constant characters.
        let cfg = CaseConfig::s(Sign::Plus);
        let m = Monomial::from_pairs(&[(2, Sign::Minus), (2, Sign::Minus), (0, Sign::Plus)]);
        assert!(m.is_normal_word());
        let x = Element::from_monomial(m);
        assert_eq!(normal_form(&x, &cfg).unwrap(), x);

        let bad = Monomial::from_pairs(&[(2, Sign::Minus), (2, Sign::Plus), (0, Sign::Plus)]);
        assert!(!bad.is_normal_word());
        assert!(normal_form(&Element::from_monomial(bad), &cfg)
            .unwrap()
            .is_zero());
    }
}
