//! End-to-end verification suites.
//!
//! Each suite packages one acceptance criterion as a pure function
//! returning a structured outcome; the CLI `verify-all` subcommand and the
//! acceptance test target both run exactly these.

use serde::Serialize;

use crate::coeff::{Case, CaseConfig, Sign};
use crate::hecke::{
    delta_half, delta_r, orbits_with_support, preserves_rel_check, t_star_direct, t_star_via_delta,
};
use crate::oracle::ff::{formula_mismatches, FormSpace};
use crate::oracle::padic::{verify_main_lemma, StandardLattice, Zq};
use crate::straighten::{confluence_check, derived_relations_check, strategy_fuzz};
use crate::structure::{
    apply_expansion, expand_in_basis, leading_term_check, normal_words_in_window, rank_report,
};
use crate::transforms::{factorization_check, recursion_check};
use crate::typmon::{Element, OrbitType};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Outcome of one suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub checks: u64,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    fn new(name: &str) -> SuiteOutcome {
        SuiteOutcome {
            name: name.to_string(),
            checks: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Outcomes of every suite.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationSummary {
    pub quick: bool,
    pub suites: Vec<SuiteOutcome>,
}

impl VerificationSummary {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed())
    }
}

fn all_cfgs() -> Vec<CaseConfig> {
    vec![
        CaseConfig::uh(),
        CaseConfig::s(Sign::Plus),
        CaseConfig::s(Sign::Minus),
        CaseConfig::a(),
    ]
}

/// Criterion 1: brute-force subspace tallies equal the closed-form counts
/// on every desk-scale form space.
pub fn suite_finite_field(quick: bool) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("finite-field formula suite");
    let mut spaces: Vec<FormSpace> = Vec::new();
    for p in [2u64, 3] {
        let max_dim = if quick && p == 3 { 3 } else { 4 };
        for dim in 1..=max_dim {
            spaces.push(FormSpace::hermitian(p, dim));
        }
    }
    for p in [3u64, 5] {
        for dim in 1..=4 {
            for chi in [Sign::Plus, Sign::Minus] {
                spaces.push(FormSpace::symmetric(p, dim, chi));
            }
        }
    }
    for p in [2u64, 3] {
        let max_dim = if quick { 4 } else { 6 };
        for dim in (2..=max_dim).step_by(2) {
            spaces.push(FormSpace::symplectic(p, dim));
        }
    }
    for fs in &spaces {
        out.checks += 1;
        match formula_mismatches(fs) {
            Ok(m) => out.failures.extend(m),
            Err(e) => out
                .failures
                .push(format!("{} dim {}: {e}", fs.cfg, fs.dim())),
        }
    }
    out
}

/// Criterion 2: the rewrite system is confluent on the window holding the
/// finite ambiguity list, and the leftmost strategy agrees with randomized
/// strategies over seeded fuzz.
pub fn suite_confluence(seeds: u64, base_seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("confluence suite");
    for cfg in all_cfgs() {
        out.checks += 1;
        match confluence_check(&cfg, 0, 4) {
            Ok(report) => {
                if !report.is_confluent() {
                    out.failures.push(format!(
                        "case {cfg}: {} unresolved overlaps",
                        report.failures.len()
                    ));
                }
                if !report.covers_named_overlaps() {
                    out.failures
                        .push(format!("case {cfg}: named overlap families missing"));
                }
            }
            Err(e) => out.failures.push(format!("case {cfg}: {e}")),
        }
        out.checks += 1;
        let fuzz = strategy_fuzz(&cfg, 0, 4, seeds, base_seed);
        if !fuzz.discrepancies.is_empty() {
            out.failures.push(format!(
                "case {cfg}: {} strategy discrepancies",
                fuzz.discrepancies.len()
            ));
        }
    }
    out
}

/// Criterion 3: every minuscule dual operator and both half families map
/// the relation ideal into itself on embedded window generators.
pub fn suite_rel_preservation() -> SuiteOutcome {
    let mut out = SuiteOutcome::new("relation-preservation suite");
    for cfg in all_cfgs() {
        for r in 2..=3usize {
            out.checks += 1;
            match preserves_rel_check(&delta_r(&cfg, r), &cfg, 0, 4) {
                Ok(report) if report.failures.is_empty() => {}
                Ok(report) => out.failures.push(format!(
                    "case {cfg} full rank {r}: {} failures",
                    report.failures.len()
                )),
                Err(e) => out.failures.push(format!("case {cfg} full rank {r}: {e}")),
            }
            if cfg.case() != Case::S {
                out.checks += 1;
                match preserves_rel_check(&delta_half(&cfg, r).unwrap(), &cfg, 0, 4) {
                    Ok(report) if report.failures.is_empty() => {}
                    Ok(report) => out.failures.push(format!(
                        "case {cfg} half rank {r}: {} failures",
                        report.failures.len()
                    )),
                    Err(e) => out.failures.push(format!("case {cfg} half rank {r}: {e}")),
                }
            }
        }
    }
    out
}

/// Criterion 4: the direct lattice count and the straightening route agree
/// on every orbit in the window, exactly.
pub fn suite_hecke_equivalence() -> SuiteOutcome {
    let mut out = SuiteOutcome::new("Hecke equivalence suite");
    for cfg in all_cfgs() {
        let gamma = cfg.gamma();
        for rank in 1..=3u32 {
            for o in orbits_with_support(&cfg, rank, 0, 3) {
                for k in 0..=(gamma * rank as i64) {
                    out.checks += 1;
                    let direct = t_star_direct(&o, k, &cfg);
                    match t_star_via_delta(&o, k, &cfg) {
                        Ok(via) => {
                            if via != direct {
                                out.failures
                                    .push(format!("case {cfg} orbit {o} k={k}: routes differ"));
                            }
                        }
                        Err(e) => {
                            out.failures
                                .push(format!("case {cfg} orbit {o} k={k}: {e}"));
                        }
                    }
                }
            }
        }
    }
    out
}

fn padic_test_typs(cfg: &CaseConfig, max_rank: u32) -> Vec<OrbitType> {
    let signs: &[Sign] = if cfg.case() == Case::S {
        &[Sign::Plus, Sign::Minus]
    } else {
        &[Sign::Plus]
    };
    let mut out = Vec::new();
    let patterns_by_rank: Vec<Vec<Vec<(i64, u32)>>> = vec![
        vec![vec![(0, 1)], vec![(1, 1)]],
        vec![
            vec![(0, 2)],
            vec![(1, 2)],
            vec![(0, 1), (1, 1)],
            vec![(0, 1), (2, 1)],
            vec![(1, 1), (2, 1)],
        ],
        vec![
            vec![(0, 3)],
            vec![(0, 2), (1, 1)],
            vec![(0, 1), (1, 2)],
            vec![(0, 1), (1, 1), (2, 1)],
        ],
    ];
    for rank in 1..=max_rank.min(3) {
        for pattern in &patterns_by_rank[rank as usize - 1] {
            // Every sign assignment on the support.
            let nsites = pattern.len();
            let count = signs.len().pow(nsites as u32);
            for mask in 0..count {
                let mut rem = mask;
                let entries: Vec<(i64, u32, Sign)> = pattern
                    .iter()
                    .map(|&(v, m)| {
                        let s = signs[rem % signs.len()];
                        rem /= signs.len();
                        (v, m, s)
                    })
                    .collect();
                out.push(OrbitType::from_entries(&entries));
            }
        }
    }
    out
}

/// Criterion 5: the p-adic oracle confirms the sublattice-type formula and
/// the fiber counts with zero mismatches, and the per-colength histograms
/// equal the Hecke action at the specialization.
pub fn suite_padic_oracle(quick: bool) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("p-adic oracle suite");
    let mut jobs: Vec<(CaseConfig, u64, u32)> = vec![
        (CaseConfig::uh(), 3, if quick { 2 } else { 3 }),
        (CaseConfig::s(Sign::Minus), 3, if quick { 2 } else { 3 }),
        (CaseConfig::a(), 3, 2),
    ];
    if !quick {
        jobs.push((CaseConfig::s(Sign::Plus), 5, 3));
    }
    for (cfg, p, max_rank) in jobs {
        let ring = Zq::for_case(&cfg, p, 8);
        let qv = BigRational::from(BigInt::from(p));
        for typ in padic_test_typs(&cfg, max_rank) {
            out.checks += 1;
            let sl = match StandardLattice::new(&cfg, ring, &typ) {
                Ok(sl) => sl,
                Err(e) => {
                    out.failures.push(format!("{cfg} {typ}: {e}"));
                    continue;
                }
            };
            let (report, histograms) = match verify_main_lemma(&sl) {
                Ok(x) => x,
                Err(e) => {
                    out.failures.push(format!("{cfg} {typ}: {e}"));
                    continue;
                }
            };
            out.failures.extend(
                report
                    .typ_mismatches
                    .iter()
                    .map(|m| format!("{cfg} {typ}: {m}")),
            );
            out.failures.extend(
                report
                    .fiber_mismatches
                    .iter()
                    .map(|m| format!("{cfg} {typ}: {m}")),
            );

            // Histogram totals against the Hecke action at q = p.
            for (k, hist) in &histograms {
                let action = t_star_direct(&typ, *k as i64, &cfg);
                for (t, count) in hist {
                    let c = action.coeff(t).eval_q(&cfg, &qv).unwrap();
                    if c != BigRational::from(BigInt::from(*count)) {
                        out.failures.push(format!(
                            "{cfg} {typ} k={k}: type {t} enumerated {count}, action {c}"
                        ));
                    }
                }
                for (t, c) in action.terms() {
                    let v = c.eval_q(&cfg, &qv).unwrap();
                    let got = hist.get(t).copied().unwrap_or(0);
                    if v != BigRational::from(BigInt::from(got)) {
                        out.failures.push(format!(
                            "{cfg} {typ} k={k}: type {t} action {v}, enumerated {got}"
                        ));
                    }
                }
            }
        }
    }
    out
}

/// Criterion 6: rank reports, the leading-term property of the adjoint
/// families, and exact expansion round trips over the free bases.
pub fn suite_freeness(quick: bool) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("freeness suite");
    for eps in [Sign::Plus, Sign::Minus] {
        let cfg = CaseConfig::s(eps);
        for r in 1..=3usize {
            out.checks += 1;
            if rank_report(&cfg, r) != 4usize.pow(r as u32) {
                out.failures
                    .push(format!("case {cfg} rank {r}: basis size off"));
            }
        }
    }
    for cfg in [CaseConfig::uh(), CaseConfig::a()] {
        for r in 1..=3usize {
            out.checks += 1;
            if rank_report(&cfg, r) != 1 {
                out.failures
                    .push(format!("case {cfg} rank {r}: basis size off"));
            }
        }
    }

    for cfg in all_cfgs() {
        for r in 1..=2usize {
            out.checks += 1;
            match leading_term_check(&cfg, r, 0, 3) {
                Ok(report) if report.failures.is_empty() => {}
                Ok(report) => out.failures.push(format!(
                    "case {cfg} rank {r}: {} leading-term failures",
                    report.failures.len()
                )),
                Err(e) => out.failures.push(format!("case {cfg} rank {r}: {e}")),
            }
        }
    }

    let hi = if quick { 3 } else { 5 };
    for eps in [Sign::Plus, Sign::Minus] {
        let cfg = CaseConfig::s(eps);
        for r in 1..=2usize {
            for w in normal_words_in_window(&cfg, r, 0, hi) {
                out.checks += 1;
                let x = Element::from_monomial(w.clone());
                match expand_in_basis(&x, &cfg, 1_000_000) {
                    Ok(terms) => match apply_expansion(&terms, r, &cfg) {
                        Ok(back) if back == x => {}
                        Ok(_) => out
                            .failures
                            .push(format!("case {cfg} word {w}: round trip differs")),
                        Err(e) => out.failures.push(format!("case {cfg} word {w}: {e}")),
                    },
                    Err(e) => out.failures.push(format!("case {cfg} word {w}: {e}")),
                }
            }
        }
    }
    out
}

/// Criterion 7: transform factorization and recursion identities.
pub fn suite_transforms() -> SuiteOutcome {
    let mut out = SuiteOutcome::new("transform suite");
    for cfg in [CaseConfig::uh(), CaseConfig::a()] {
        for r in 1..=4usize {
            out.checks += 1;
            match factorization_check(&cfg, r) {
                Ok(report) if report.passed() => {}
                Ok(report) => out.failures.push(format!(
                    "case {cfg} rank {r}: factorization {} mismatches",
                    report.failures.len()
                )),
                Err(e) => out.failures.push(format!("case {cfg} rank {r}: {e}")),
            }
            out.checks += 1;
            match recursion_check(&cfg, r) {
                Ok(report) if report.passed() => {}
                Ok(report) => out.failures.push(format!(
                    "case {cfg} rank {r}: recursion {} mismatches",
                    report.failures.len()
                )),
                Err(e) => out.failures.push(format!("case {cfg} rank {r}: {e}")),
            }
        }
    }
    out
}

/// Criterion 8: the derived symmetric-case congruences vanish under the
/// rewrite engine.
pub fn suite_derived_relations() -> SuiteOutcome {
    let mut out = SuiteOutcome::new("derived-relation suite");
    for eps in [Sign::Plus, Sign::Minus] {
        let cfg = CaseConfig::s(eps);
        let report = derived_relations_check(&cfg, 0, 4);
        out.checks += report.checks as u64;
        out.failures
            .extend(report.failures.iter().map(|f| format!("eps {eps}: {f}")));
    }
    out
}

/// Run every suite.
pub fn run_all(quick: bool, seeds: u64, base_seed: u64) -> VerificationSummary {
    VerificationSummary {
        quick,
        suites: vec![
            suite_finite_field(quick),
            suite_confluence(seeds, base_seed),
            suite_rel_preservation(),
            suite_hecke_equivalence(),
            suite_padic_oracle(quick),
            suite_freeness(quick),
            suite_transforms(),
            suite_derived_relations(),
        ],
    }
}
