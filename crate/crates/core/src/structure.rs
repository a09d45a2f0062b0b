//! Hecke-module structure of the spherical function space: the centered
//! lexicographic preorder, the explicit free bases, triangular expansion of
//! arbitrary normal-form elements over the operator algebra, and the rank
//! verification.
//!
//! The expansion is a greedy elimination: the leading term of the remainder
//! (in the centered preorder, total within each grading block) determines a
//! unique basis word and exponent vector; subtracting the corresponding
//! operator monomial image strictly lowers the block's leading term. The
//! output certificate re-applies to the input exactly, which is how every
//! expansion is verified.

use std::fmt;

use serde::Serialize;

use crate::coeff::{Case, CaseConfig, Scalar, Sign};
use crate::hecke::{s_adjoint_apply, s_adjoint_apply_elem, s_family_alpha, HeckeError};
use crate::typmon::{Element, Letter, Monomial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructureError {
    /// The descent left the configured budget; inconclusive, not a
    /// refutation.
    FuelExhausted,
    /// Expansion input must be in straightened normal form.
    NotNormalForm,
    Hecke(HeckeError),
}

impl fmt::Display for StructureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureError::FuelExhausted => write!(f, "expansion fuel exhausted"),
            StructureError::NotNormalForm => write!(f, "element is not in normal form"),
            StructureError::Hecke(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for StructureError {}

impl From<HeckeError> for StructureError {
    fn from(e: HeckeError) -> StructureError {
        StructureError::Hecke(e)
    }
}

/// Verdict of the total preorder on integer vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreorderVerdict {
    Less,
    /// Equivalent: the vectors differ by a constant shift.
    Equiv,
    Greater,
}

/// Compare by centered coordinates `e_j - sum(e)/r`, lexicographically.
/// Exact integer arithmetic: both sides are scaled by the common length.
pub fn precedes(e: &[i64], f: &[i64]) -> PreorderVerdict {
    assert_eq!(e.len(), f.len(), "preorder needs equal lengths");
    let r = e.len() as i64;
    let se: i64 = e.iter().sum();
    let sf: i64 = f.iter().sum();
    for (ej, fj) in e.iter().zip(f) {
        let left = ej * r - se;
        let right = fj * r - sf;
        match left.cmp(&right) {
            std::cmp::Ordering::Less => return PreorderVerdict::Less,
            std::cmp::Ordering::Greater => return PreorderVerdict::Greater,
            std::cmp::Ordering::Equal => {}
        }
    }
    PreorderVerdict::Equiv
}

/// `s_k(f) = f - alpha * (0,...,0,1,...,1)` with `k` trailing ones.
pub fn s_k_vector(f: &[i64], k: usize, alpha: i64) -> Vec<i64> {
    let r = f.len();
    let mut out = f.to_vec();
    for entry in out.iter_mut().skip(r - k) {
        *entry -= alpha;
    }
    out
}

/// The explicit free basis: normal-form words whose sign-adjusted gaps and
/// last entry lie below the step width. Size `4^r` in the symmetric case,
/// a single word otherwise.
pub fn basis_set(cfg: &CaseConfig, r: usize) -> Vec<Monomial> {
    assert!(r >= 1);
    let alpha = s_family_alpha(cfg);
    match cfg.case() {
        Case::S => {
            let mut out = Vec::new();
            for smask in 0u32..(1 << r) {
                let signs: Vec<Sign> = (0..r)
                    .map(|i| {
                        if smask >> i & 1 == 1 {
                            Sign::Minus
                        } else {
                            Sign::Plus
                        }
                    })
                    .collect();
                // Choose the last entry and each sign-adjusted gap freely in
                // [0, alpha).
                let free_slots = r; // e_r plus r-1 gaps
                let mut counters = vec![0i64; free_slots];
                loop {
                    let mut e = vec![0i64; r];
                    e[r - 1] = counters[0];
                    for i in (0..r - 1).rev() {
                        let ind = i64::from(signs[i] != signs[i + 1]);
                        e[i] = e[i + 1] + counters[r - 1 - i] + ind;
                    }
                    out.push(Monomial(
                        e.iter()
                            .zip(&signs)
                            .map(|(&a, &s)| Letter::new(a, s))
                            .collect(),
                    ));
                    let mut pos = 0;
                    loop {
                        if pos == free_slots {
                            break;
                        }
                        counters[pos] += 1;
                        if counters[pos] < alpha {
                            break;
                        }
                        counters[pos] = 0;
                        pos += 1;
                    }
                    if pos == free_slots {
                        break;
                    }
                }
            }
            out
        }
        _ => vec![Monomial::from_values(&vec![0; r])],
    }
}

/// The size of the free basis, asserted against the closed form.
pub fn rank_report(cfg: &CaseConfig, r: usize) -> usize {
    let basis = basis_set(cfg, r);
    let expected = match cfg.case() {
        Case::S => 4usize.pow(r as u32),
        _ => 1,
    };
    assert_eq!(
        basis.len(),
        expected,
        "basis size disagrees with the rank theorem"
    );
    basis.len()
}

/// Outcome of the leading-term sweep.
#[derive(Debug, Clone, Serialize)]
pub struct LeadingTermReport {
    pub checks: usize,
    pub failures: Vec<String>,
}

/// All normal-form words of length `r` with entries in `[lo, hi]`.
pub fn normal_words_in_window(cfg: &CaseConfig, r: usize, lo: i64, hi: i64) -> Vec<Monomial> {
    let mut vals: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..r {
        let mut next = Vec::new();
        for v in &vals {
            let cap = v.last().copied().unwrap_or(hi);
            for a in lo..=cap {
                let mut w = v.clone();
                w.push(a);
                next.push(w);
            }
        }
        vals = next;
    }
    let mut out = Vec::new();
    for v in vals {
        match cfg.case() {
            Case::S => {
                let mut block_starts = vec![0usize];
                for i in 1..r {
                    if v[i] != v[i - 1] {
                        block_starts.push(i);
                    }
                }
                let nb = block_starts.len();
                for mask in 0u32..(1 << nb) {
                    let mut letters = Vec::with_capacity(r);
                    let mut block = 0;
                    for (i, &val) in v.iter().enumerate() {
                        if block + 1 < nb && block_starts[block + 1] == i {
                            block += 1;
                        }
                        let s = if mask >> block & 1 == 1 {
                            Sign::Minus
                        } else {
                            Sign::Plus
                        };
                        letters.push(Letter::new(val, s));
                    }
                    out.push(Monomial(letters));
                }
            }
            _ => out.push(Monomial(v.iter().map(|&a| Letter::plain(a)).collect())),
        }
    }
    out
}

/// For every normal-form word `f` in the window and every operator index,
/// the adjoint image has the shifted word as its unique leading term with
/// coefficient one; every other term is strictly below in the preorder.
pub fn leading_term_check(
    cfg: &CaseConfig,
    r: usize,
    lo: i64,
    hi: i64,
) -> Result<LeadingTermReport, StructureError> {
    let alpha = s_family_alpha(cfg);
    let mut checks = 0;
    let mut failures = Vec::new();
    for f in normal_words_in_window(cfg, r, lo, hi) {
        for k in 1..=r {
            checks += 1;
            let image = s_adjoint_apply(&f, k as i64, cfg)?;
            let lead_vals = s_k_vector(&f.values(), k, alpha);
            let lead = Monomial(
                lead_vals
                    .iter()
                    .zip(f.letters())
                    .map(|(&a, l)| Letter::new(a, l.s))
                    .collect(),
            );
            let c = image.coeff(&lead);
            if !c.is_one() {
                failures.push(format!("S_{k} on {f}: leading coefficient {c}"));
                continue;
            }
            for (m, _) in image.terms() {
                if *m != lead && precedes(&m.values(), &lead_vals) != PreorderVerdict::Less {
                    failures.push(format!("S_{k} on {f}: term {m} not below {lead}"));
                }
            }
        }
    }
    Ok(LeadingTermReport { checks, failures })
}

/// One operator monomial applied to one basis word, with its coefficient.
#[derive(Debug, Clone, Serialize)]
pub struct CertTerm {
    /// The basis word, in text form.
    pub basis_word: String,
    /// Exponents `(a_1, ..., a_r)`: the first `r-1` are non-negative, the
    /// last may be any integer (the top operator is invertible).
    pub exponents: Vec<i64>,
    /// Coefficient, in scalar text form.
    pub coeff: String,
}

/// A certificate expressing an element over the operator algebra.
#[derive(Debug, Clone, Serialize)]
pub struct HeckeCertificate {
    pub degree: usize,
    pub terms: Vec<CertTerm>,
}

/// Internal form of a certificate term.
#[derive(Debug, Clone)]
pub struct ExpandTerm {
    pub basis_word: Monomial,
    pub exponents: Vec<i64>,
    pub coeff: Scalar,
}

impl ExpandTerm {
    pub fn to_cert(&self) -> CertTerm {
        CertTerm {
            basis_word: self.basis_word.to_string(),
            exponents: self.exponents.clone(),
            coeff: self.coeff.to_string(),
        }
    }
}

/// Apply the operator monomial `S_1^{a_1} ... S_r^{a_r}` to a normal-form
/// word.
pub fn apply_s_monomial(
    word: &Monomial,
    exponents: &[i64],
    cfg: &CaseConfig,
) -> Result<Element, StructureError> {
    let r = word.degree();
    assert_eq!(exponents.len(), r);
    let alpha = s_family_alpha(cfg);
    // Top operator first: a pure translation with integer exponent.
    let a_r = exponents[r - 1];
    let shift = vec![-alpha * a_r; r];
    let mut acc = Element::from_monomial(word.clone())
        .translate(&shift)
        .expect("degree matches");
    for k in (1..r).rev() {
        let a_k = exponents[k - 1];
        assert!(a_k >= 0, "inner exponents are non-negative");
        for _ in 0..a_k {
            acc = s_adjoint_apply_elem(&acc, k as i64, cfg)?;
        }
    }
    Ok(acc)
}

/// Re-apply a certificate: the sum of its operator monomial images.
pub fn apply_expansion(
    terms: &[ExpandTerm],
    degree: usize,
    cfg: &CaseConfig,
) -> Result<Element, StructureError> {
    let mut acc = Element::zero(degree);
    for t in terms {
        acc = acc.add(&apply_s_monomial(&t.basis_word, &t.exponents, cfg)?.scale(&t.coeff));
    }
    Ok(acc)
}

/// Solve for the unique basis word and exponents whose operator monomial
/// has the given normal word as leading term.
fn solve_elimination(word: &Monomial, cfg: &CaseConfig) -> (Monomial, Vec<i64>) {
    let r = word.degree();
    let alpha = s_family_alpha(cfg);
    let e = word.values();
    let signs: Vec<Sign> = word.letters().iter().map(|l| l.s).collect();
    let mut a = vec![0i64; r];
    // Inner exponents from the sign-adjusted gaps, read from the right.
    for i in 1..r {
        let ind = i64::from(signs[i - 1] != signs[i]);
        let d = e[i - 1] - e[i] - ind;
        debug_assert!(d >= 0);
        a[r - i - 1] = d.div_euclid(alpha);
    }
    // Top exponent from the last entry.
    let c_total = -e[r - 1].div_euclid(alpha);
    let inner_sum: i64 = a[..r - 1].iter().sum();
    a[r - 1] = c_total - inner_sum;
    // Reconstruct the basis word: f_i = e_i + alpha * (partial sums of a
    // from the top down).
    let mut f = vec![0i64; r];
    let mut partial = 0;
    for i in 0..r {
        partial += a[r - 1 - i];
        f[i] = e[i] + alpha * partial;
    }
    let word_f = Monomial(
        f.iter()
            .zip(&signs)
            .map(|(&v, &s)| Letter::new(v, s))
            .collect(),
    );
    (word_f, a)
}

/// Greedy triangular expansion of a normal-form element over the operator
/// algebra: outputs, per basis word, the operator monomials and
/// coefficients whose images sum to the input.
pub fn expand_in_basis(
    x: &Element,
    cfg: &CaseConfig,
    mut fuel: u64,
) -> Result<Vec<ExpandTerm>, StructureError> {
    for (m, _) in x.terms() {
        if !m.is_normal_word() {
            return Err(StructureError::NotNormalForm);
        }
    }
    let basis = basis_set(cfg, x.degree());
    let mut remainder = x.clone();
    let mut out: Vec<ExpandTerm> = Vec::new();
    while !remainder.is_zero() {
        if fuel == 0 {
            return Err(StructureError::FuelExhausted);
        }
        fuel -= 1;
        // Pick a term maximal in the preorder (ties are between independent
        // grading blocks, so any choice works).
        let mut best: Option<(Monomial, Scalar)> = None;
        for (m, c) in remainder.terms() {
            match &best {
                None => best = Some((m.clone(), c.clone())),
                Some((bm, _)) => {
                    if precedes(&m.values(), &bm.values()) == PreorderVerdict::Greater {
                        best = Some((m.clone(), c.clone()));
                    }
                }
            }
        }
        let (word, coeff) = best.unwrap();
        let (basis_word, exponents) = solve_elimination(&word, cfg);
        debug_assert!(
            basis.contains(&basis_word),
            "solved word must be a basis word"
        );
        debug_assert!(exponents[..exponents.len() - 1].iter().all(|&a| a >= 0));
        let image = apply_s_monomial(&basis_word, &exponents, cfg)?;
        debug_assert!(image.coeff(&word).is_one(), "unit leading term");
        remainder = remainder.sub(&image.scale(&coeff));
        debug_assert!(remainder.coeff(&word).is_zero());
        out.push(ExpandTerm {
            basis_word,
            exponents,
            coeff,
        });
    }
    Ok(out)
}

/// Wire form of an expansion.
pub fn expansion_to_certificate(degree: usize, terms: &[ExpandTerm]) -> HeckeCertificate {
    HeckeCertificate {
        degree,
        terms: terms.iter().map(|t| t.to_cert()).collect(),
    }
}
