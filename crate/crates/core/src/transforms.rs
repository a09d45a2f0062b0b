//! Spherical-transform factorization identities, verified exactly in the
//! commutative translation-operator algebra.
//!
//! The generating polynomials `A_r` (full operators) and `B_r` (half
//! operators) are normalized so that their images under the respective
//! transforms are elementary-symmetric generating functions; the content of
//! the transform comparison is then the operator identity `A = B * B` with
//! the appropriate argument substitutions, which this module checks
//! term-by-term, along with the one-step recursions that drive the
//! induction. Half powers of the residue cardinality appear only here, as
//! odd powers of `u`.

use serde::Serialize;

use crate::coeff::{Case, CaseConfig, Scalar};
use crate::hecke::{delta_half, delta_r, HeckeError, TranslationOperator};

/// The normalized generating polynomial of the full minuscule family:
/// `sum_k c^{-k(d-k)} D_k (-x)^k` where `c = -q0` (Hermitian) or
/// `c = sqrt(q)` (alternating) and `d` is the top index.
pub fn a_poly(cfg: &CaseConfig, r: usize) -> Result<TranslationOperator, HeckeError> {
    let d = delta_r(cfg, r);
    let (top, weight_exp): (i64, fn(i64, i64) -> i64) = match cfg.case() {
        Case::UH => (r as i64, |k, r| -2 * k * (r - k)),
        Case::A => (2 * r as i64, |k, r| -k * (2 * r - k)),
        Case::S => return Err(HeckeError::WrongCase),
    };
    let mut out = TranslationOperator::zero(r);
    for k in 0..=top {
        let sign = if k % 2 == 0 {
            Scalar::one()
        } else {
            Scalar::one().neg()
        };
        let weight = Scalar::u_pow(weight_exp(k, r as i64)).mul(&sign);
        let dk = d.x_component(k).scale(&weight).mul(&x_pow(r, k));
        out = out.add(&dk);
    }
    Ok(out)
}

/// The normalized generating polynomial of the half family:
/// `sum_k c^{-k(r-k)} D^{1/2}_k (-x)^k` with `c = sqrt(-q0)` resp. `q`.
pub fn b_poly(cfg: &CaseConfig, r: usize) -> Result<TranslationOperator, HeckeError> {
    let d = delta_half(cfg, r)?;
    let weight_exp: fn(i64, i64) -> i64 = match cfg.case() {
        Case::UH => |k, r| -k * (r - k),
        Case::A => |k, r| -2 * k * (r - k),
        Case::S => unreachable!("delta_half already rejected the symmetric case"),
    };
    let mut out = TranslationOperator::zero(r);
    for k in 0..=(r as i64) {
        let sign = if k % 2 == 0 {
            Scalar::one()
        } else {
            Scalar::one().neg()
        };
        let weight = Scalar::u_pow(weight_exp(k, r as i64)).mul(&sign);
        out = out.add(&d.x_component(k).scale(&weight).mul(&x_pow(r, k)));
    }
    Ok(out)
}

fn x_pow(degree: usize, k: i64) -> TranslationOperator {
    let mut op = TranslationOperator::zero(degree);
    op.add_term(vec![0; degree], k, Scalar::one());
    op
}

/// Outcome of an operator-identity check.
#[derive(Debug, Clone, Serialize)]
pub struct TransformReport {
    pub case: String,
    pub rank: usize,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl TransformReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The factorization of the full generating polynomial through the half
/// one: `A_r(x^2) = B_r(x) B_r(-x)` in the Hermitian case,
/// `A_r(x) = B_r(x sqrt(q)) B_r(x / sqrt(q))` in the alternating case.
pub fn factorization_check(cfg: &CaseConfig, r: usize) -> Result<TransformReport, HeckeError> {
    let a = a_poly(cfg, r)?;
    let b = b_poly(cfg, r)?;
    let (lhs, rhs) = match cfg.case() {
        Case::UH => {
            let lhs = a.substitute_x_pow(2);
            let rhs = b.mul(&b.substitute_x_scale(&Scalar::one().neg()));
            (lhs, rhs)
        }
        Case::A => {
            let rhs = b
                .substitute_x_scale(&Scalar::u_pow(1))
                .mul(&b.substitute_x_scale(&Scalar::u_pow(-1)));
            (a, rhs)
        }
        Case::S => return Err(HeckeError::WrongCase),
    };
    let mut failures = Vec::new();
    if lhs != rhs {
        let diff = lhs.sub(&rhs);
        for ((shift, xpow), c) in diff.terms() {
            failures.push(format!("term x^{xpow} t{shift:?}: difference {c}"));
        }
    }
    Ok(TransformReport {
        case: cfg.to_string(),
        rank: r,
        checks: 1,
        failures,
    })
}

/// The one-step recursions for both generating polynomials, plus the
/// degree-one factor identity that makes the factorization inductive.
pub fn recursion_check(cfg: &CaseConfig, r: usize) -> Result<TransformReport, HeckeError> {
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut demand =
        |label: &str, lhs: &TranslationOperator, rhs: &TranslationOperator, f: &mut Vec<String>| {
            checks += 1;
            if lhs != rhs {
                f.push(format!("{label}: {lhs} != {rhs}"));
            }
        };

    let a_r = a_poly(cfg, r)?;
    let a_next = a_poly(cfg, r + 1)?;
    let b_r = b_poly(cfg, r)?;
    let b_next = b_poly(cfg, r + 1)?;
    let one_coord_id = TranslationOperator::identity(1);
    let t1 = TranslationOperator::translation(vec![1]);
    let t2 = TranslationOperator::translation(vec![2]);

    match cfg.case() {
        Case::UH => {
            // A_{r+1}(x) = A_r(-x q0) ((-q0)^{-r} (-x) t(2) + t(0)).
            let mq0 = Scalar::u_pow(2); // -q0
            let factor_a = t2
                .scale(&Scalar::u_pow(-2 * r as i64).neg())
                .mul(&x_pow(1, 1))
                .add(&one_coord_id);
            let rhs = a_r.substitute_x_scale(&mq0).tensor(&factor_a);
            demand("full recursion", &a_next, &rhs, &mut failures);

            // B_{r+1}(x) = B_r(x sqrt(-q0)) (sqrt(-q0)^{-r} (-x) t(1) + t(0)).
            let factor_b = t1
                .scale(&Scalar::u_pow(-(r as i64)).neg())
                .mul(&x_pow(1, 1))
                .add(&one_coord_id);
            let rhs = b_r.substitute_x_scale(&Scalar::u_pow(1)).tensor(&factor_b);
            demand("half recursion", &b_next, &rhs, &mut failures);

            // Degree-one factor identity:
            // (c^{-r} x t(1) + t(0)) (-c^{-r} x t(1) + t(0)) =
            //     -(-q0)^{-r} x^2 t(2) + t(0), with c = sqrt(-q0).
            let plus = t1
                .scale(&Scalar::u_pow(-(r as i64)))
                .mul(&x_pow(1, 1))
                .add(&one_coord_id);
            let minus = t1
                .scale(&Scalar::u_pow(-(r as i64)).neg())
                .mul(&x_pow(1, 1))
                .add(&one_coord_id);
            let rhs = t2
                .scale(&Scalar::u_pow(-2 * r as i64).neg())
                .mul(&x_pow(1, 2))
                .add(&one_coord_id);
            demand("factor identity", &plus.mul(&minus), &rhs, &mut failures);
        }
        Case::A => {
            let q = Scalar::u_pow(2);
            // A_{r+1}(x) = A_r(xq) (x^2 q^{-2r} t(2)
            //              - x q^{-r} (q^{1/2} + q^{-1/2}) t(1) + t(0)).
            let mid_coeff = Scalar::u_pow(1).add(&Scalar::u_pow(-1));
            let factor_a = t2
                .scale(&Scalar::u_pow(-4 * r as i64))
                .mul(&x_pow(1, 2))
                .add(
                    &t1.scale(&Scalar::u_pow(-2 * r as i64).mul(&mid_coeff).neg())
                        .mul(&x_pow(1, 1)),
                )
                .add(&one_coord_id);
            let rhs = a_r.substitute_x_scale(&q).tensor(&factor_a);
            demand("full recursion", &a_next, &rhs, &mut failures);

            // B_{r+1}(x) = B_r(xq) (-x q^{-r} t(1) + t(0)).
            let factor_b = t1
                .scale(&Scalar::u_pow(-2 * r as i64).neg())
                .mul(&x_pow(1, 1))
                .add(&one_coord_id);
            let rhs = b_r.substitute_x_scale(&q).tensor(&factor_b);
            demand("half recursion", &b_next, &rhs, &mut failures);

            // (-x q^{-r+1/2} t(1) + t(0)) (-x q^{-r-1/2} t(1) + t(0)) =
            //     x^2 q^{-2r} t(2) - x q^{-r}(q^{1/2} + q^{-1/2}) t(1) + t(0).
            let plus = t1
                .scale(&Scalar::u_pow(-2 * r as i64 + 1).neg())
                .mul(&x_pow(1, 1))
                .add(&one_coord_id);
            let minus = t1
                .scale(&Scalar::u_pow(-2 * r as i64 - 1).neg())
                .mul(&x_pow(1, 1))
                .add(&one_coord_id);
            demand(
                "factor identity",
                &plus.mul(&minus),
                &factor_a,
                &mut failures,
            );
        }
        Case::S => return Err(HeckeError::WrongCase),
    }
    Ok(TransformReport {
        case: cfg.to_string(),
        rank: r,
        checks,
        failures,
    })
}
