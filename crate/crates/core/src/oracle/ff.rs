//! Finite-field linear algebra and subspace enumeration.
//!
//! Fields are F_p or F_{p^2} with a fixed quadratic modulus; elements are
//! coefficient pairs. Subspaces are enumerated through reduced row-echelon
//! representatives, so each one is visited exactly once.

use std::collections::BTreeMap;

use crate::coeff::{Case, CaseConfig, Sign};
use crate::oracle::OracleError;

/// A small finite field F_{p^d} with d in {1, 2}.
///
/// For d = 2 the modulus is `theta^2 = m1 theta + m0`: `theta^2 = theta + 1`
/// over F_2 and `theta^2 = c` with `c` the least nonsquare for odd p. The
/// conjugation needed for Hermitian forms is the Frobenius `x -> x^p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fq {
    pub p: u64,
    pub d: u8,
    m1: u64,
    m0: u64,
}

/// An element `c0 + c1 theta`; `c1 = 0` in the prime field.
pub type FqElem = (u64, u64);

impl Fq {
    pub fn prime(p: u64) -> Fq {
        Fq {
            p,
            d: 1,
            m1: 0,
            m0: 0,
        }
    }

    pub fn quadratic(p: u64) -> Fq {
        if p == 2 {
            Fq {
                p,
                d: 2,
                m1: 1,
                m0: 1,
            }
        } else {
            Fq {
                p,
                d: 2,
                m1: 0,
                m0: least_nonsquare(p),
            }
        }
    }

    pub fn q(&self) -> u64 {
        if self.d == 1 {
            self.p
        } else {
            self.p * self.p
        }
    }

    pub fn zero(&self) -> FqElem {
        (0, 0)
    }

    pub fn one(&self) -> FqElem {
        (1, 0)
    }

    pub fn from_u64(&self, v: u64) -> FqElem {
        (v % self.p, 0)
    }

    pub fn from_i64(&self, v: i64) -> FqElem {
        (v.rem_euclid(self.p as i64) as u64, 0)
    }

    pub fn is_zero(&self, x: FqElem) -> bool {
        x == (0, 0)
    }

    pub fn add(&self, x: FqElem, y: FqElem) -> FqElem {
        ((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    pub fn neg(&self, x: FqElem) -> FqElem {
        ((self.p - x.0) % self.p, (self.p - x.1) % self.p)
    }

    pub fn sub(&self, x: FqElem, y: FqElem) -> FqElem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FqElem, y: FqElem) -> FqElem {
        let p = self.p;
        let c0 = x.0 * y.0 % p;
        let cross = (x.0 * y.1 + x.1 * y.0) % p;
        let c2 = x.1 * y.1 % p;
        // theta^2 = m1 theta + m0
        ((c0 + c2 * self.m0) % p, (cross + c2 * self.m1) % p)
    }

    pub fn pow(&self, x: FqElem, mut n: u64) -> FqElem {
        let mut base = x;
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: FqElem) -> FqElem {
        assert!(!self.is_zero(x), "inverse of zero");
        self.pow(x, self.q() - 2)
    }

    /// Frobenius `x -> x^p`: the identity on the prime field, the
    /// conjugation of the quadratic extension.
    pub fn frobenius(&self, x: FqElem) -> FqElem {
        if self.d == 1 {
            x
        } else {
            self.pow(x, self.p)
        }
    }

    pub fn all_elements(&self) -> Vec<FqElem> {
        let mut out = Vec::new();
        if self.d == 1 {
            for a in 0..self.p {
                out.push((a, 0));
            }
        } else {
            for a in 0..self.p {
                for b in 0..self.p {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Euler criterion on the prime field: the square class of a nonzero
    /// element.
    pub fn sign_of(&self, x: FqElem) -> Sign {
        assert_eq!(self.d, 1, "square classes live in the prime field");
        assert!(!self.is_zero(x), "sign of zero");
        if self.pow(x, (self.p - 1) / 2) == self.one() {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// The sign of -1, which pins `epsilon` for the symmetric case.
    pub fn sign_of_minus_one(&self) -> Sign {
        self.sign_of(self.from_i64(-1))
    }

    /// The modulus coefficients `(m1, m0)` of `theta^2 = m1 theta + m0`.
    pub fn modulus(&self) -> (u64, u64) {
        (self.m1, self.m0)
    }
}

fn least_nonsquare(p: u64) -> u64 {
    let fp = Fq::prime(p);
    (2..p)
        .find(|&c| fp.sign_of((c, 0)) == Sign::Minus)
        .expect("odd prime field has a nonsquare")
}

/// A dense matrix over a fixed finite field, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<FqElem>,
}

impl FqMatrix {
    pub fn zero(rows: usize, cols: usize) -> FqMatrix {
        FqMatrix {
            rows,
            cols,
            data: vec![(0, 0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> FqMatrix {
        let mut m = FqMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = (1, 0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<FqElem>>) -> FqMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        FqMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn row(&self, i: usize) -> &[FqElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, fq: &Fq, other: &FqMatrix) -> FqMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = FqMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if fq.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = fq.add(out[(i, j)], fq.mul(a, other[(k, j)]));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> FqMatrix {
        let mut out = FqMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(FqElem) -> FqElem) -> FqMatrix {
        FqMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self, fq: &Fq) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !fq.is_zero(self[(i, c)])) else {
                continue;
            };
            for j in 0..self.cols {
                let tmp = self[(pr, j)];
                self[(pr, j)] = self[(r, j)];
                self[(r, j)] = tmp;
            }
            let inv = fq.inv(self[(r, c)]);
            for j in 0..self.cols {
                self[(r, j)] = fq.mul(self[(r, j)], inv);
            }
            for i in 0..self.rows {
                if i != r && !fq.is_zero(self[(i, c)]) {
                    let f = self[(i, c)];
                    for j in 0..self.cols {
                        let s = fq.mul(f, self[(r, j)]);
                        self[(i, j)] = fq.sub(self[(i, j)], s);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, fq: &Fq) -> usize {
        let mut m = self.clone();
        m.rref(fq).len()
    }

    /// Basis of the right kernel `{x : M x = 0}`, returned as rows.
    pub fn kernel(&self, fq: &Fq) -> FqMatrix {
        let mut m = self.clone();
        let pivots = m.rref(fq);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = FqMatrix::zero(free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            out[(k, fc)] = (1, 0);
            for (r, &pc) in pivots.iter().enumerate() {
                out[(k, pc)] = fq.neg(m[(r, fc)]);
            }
        }
        out
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self, fq: &Fq) -> FqElem {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let n = self.rows;
        let mut det = fq.one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !fq.is_zero(m[(i, c)])) else {
                return fq.zero();
            };
            if pr != c {
                for j in 0..n {
                    let tmp = m[(pr, j)];
                    m[(pr, j)] = m[(c, j)];
                    m[(c, j)] = tmp;
                }
                det = fq.neg(det);
            }
            det = fq.mul(det, m[(c, c)]);
            let inv = fq.inv(m[(c, c)]);
            for i in c + 1..n {
                if !fq.is_zero(m[(i, c)]) {
                    let f = fq.mul(m[(i, c)], inv);
                    for j in c..n {
                        let s = fq.mul(f, m[(c, j)]);
                        m[(i, j)] = fq.sub(m[(i, j)], s);
                    }
                }
            }
        }
        det
    }
}

impl std::ops::Index<(usize, usize)> for FqMatrix {
    type Output = FqElem;
    fn index(&self, (i, j): (usize, usize)) -> &FqElem {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for FqMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FqElem {
        &mut self.data[i * self.cols + j]
    }
}

/// Visit every `d`-dimensional subspace of F_q^n exactly once, presented by
/// its reduced row-echelon basis.
pub fn for_each_subspace(fq: &Fq, n: usize, d: usize, f: &mut impl FnMut(&FqMatrix)) {
    assert!(d <= n && n <= 16);
    if d == 0 {
        f(&FqMatrix::zero(0, n));
        return;
    }
    let elements = fq.all_elements();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != d {
            continue;
        }
        let pivots: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        // Free slots: to the right of the row's pivot, off the pivot columns.
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (i, &pc) in pivots.iter().enumerate() {
            for c in pc + 1..n {
                if !pivots.contains(&c) {
                    free.push((i, c));
                }
            }
        }
        let mut counters = vec![0usize; free.len()];
        loop {
            let mut m = FqMatrix::zero(d, n);
            for (i, &pc) in pivots.iter().enumerate() {
                m[(i, pc)] = (1, 0);
            }
            for (slot, &(i, c)) in free.iter().enumerate() {
                m[(i, c)] = elements[counters[slot]];
            }
            f(&m);
            // Odometer.
            let mut k = 0;
            loop {
                if k == free.len() {
                    break;
                }
                counters[k] += 1;
                if counters[k] < elements.len() {
                    break;
                }
                counters[k] = 0;
                k += 1;
            }
            if k == free.len() {
                break;
            }
        }
    }
}

/// A nondegenerate form space over a finite field.
#[derive(Debug, Clone)]
pub struct FormSpace {
    pub cfg: CaseConfig,
    pub fq: Fq,
    pub gram: FqMatrix,
}

impl FormSpace {
    pub fn new(cfg: CaseConfig, fq: Fq, gram: FqMatrix) -> Result<FormSpace, OracleError> {
        if gram.rows != gram.cols {
            return Err(OracleError::BadInput("gram must be square".into()));
        }
        let expected_d = if cfg.case() == Case::UH { 2 } else { 1 };
        if fq.d != expected_d {
            return Err(OracleError::BadInput(format!(
                "case {} needs field degree {expected_d}",
                cfg.case()
            )));
        }
        if cfg.case() == Case::S {
            if fq.p == 2 {
                return Err(OracleError::BadInput(
                    "symmetric case needs odd residue".into(),
                ));
            }
            if fq.sign_of_minus_one() != cfg.epsilon() {
                return Err(OracleError::BadInput(format!(
                    "epsilon {} inconsistent with p = {}",
                    cfg.epsilon(),
                    fq.p
                )));
            }
        }
        let star = star_matrix(&cfg, &fq, &gram);
        if star != gram {
            return Err(OracleError::BadInput("gram is not star-symmetric".into()));
        }
        if cfg.case() == Case::A {
            if !gram.rows.is_multiple_of(2) {
                return Err(OracleError::Degenerate);
            }
            for i in 0..gram.rows {
                if !fq.is_zero(gram[(i, i)]) {
                    return Err(OracleError::BadInput(
                        "alternating gram needs zero diagonal".into(),
                    ));
                }
            }
        }
        if fq.is_zero(gram.det(&fq)) {
            return Err(OracleError::Degenerate);
        }
        Ok(FormSpace { cfg, fq, gram })
    }

    pub fn dim(&self) -> usize {
        self.gram.rows
    }

    /// The identity-gram Hermitian space of the given dimension.
    pub fn hermitian(p: u64, dim: usize) -> FormSpace {
        let fq = Fq::quadratic(p);
        FormSpace::new(CaseConfig::uh(), fq, FqMatrix::identity(dim)).unwrap()
    }

    /// The diagonal quadratic space `diag(1,...,1,c)` with `c` of the given
    /// square class.
    pub fn symmetric(p: u64, dim: usize, chi: Sign) -> FormSpace {
        let fq = Fq::prime(p);
        let cfg = CaseConfig::s(fq.sign_of_minus_one());
        let mut gram = FqMatrix::identity(dim);
        if chi == Sign::Minus {
            gram[(dim - 1, dim - 1)] = (least_nonsquare(p), 0);
        }
        FormSpace::new(cfg, fq, gram).unwrap()
    }

    /// The standard symplectic space of dimension `2r`.
    pub fn symplectic(p: u64, dim: usize) -> FormSpace {
        assert!(dim.is_multiple_of(2));
        let fq = Fq::prime(p);
        let mut gram = FqMatrix::zero(dim, dim);
        for k in 0..dim / 2 {
            gram[(2 * k, 2 * k + 1)] = (1, 0);
            gram[(2 * k + 1, 2 * k)] = fq.neg((1, 0));
        }
        FormSpace::new(CaseConfig::a(), fq, gram).unwrap()
    }

    /// Gram matrix of the pairing restricted to the row space of `basis`:
    /// `B G sigma(B)^T`.
    pub fn restricted_gram(&self, basis: &FqMatrix) -> FqMatrix {
        let bg = basis.mul(&self.fq, &self.gram);
        let bs = if self.cfg.case() == Case::UH {
            basis.map(|x| self.fq.frobenius(x)).transpose()
        } else {
            basis.transpose()
        };
        bg.mul(&self.fq, &bs)
    }
}

fn star_matrix(cfg: &CaseConfig, fq: &Fq, m: &FqMatrix) -> FqMatrix {
    match cfg.case() {
        Case::UH => m.map(|x| fq.frobenius(x)).transpose(),
        Case::S => m.transpose(),
        Case::A => m.transpose().map(|x| fq.neg(x)),
    }
}

/// The isomorphism class `(d, chi)` of a nondegenerate form space.
pub fn typ_of_form(fs: &FormSpace) -> Result<(i64, Sign), OracleError> {
    typ_of_gram(&fs.cfg, &fs.fq, &fs.gram)
}

/// Classify a nondegenerate gram matrix: `d = dim / gamma`, and the square
/// class of the determinant in the symmetric case.
pub fn typ_of_gram(cfg: &CaseConfig, fq: &Fq, gram: &FqMatrix) -> Result<(i64, Sign), OracleError> {
    let dim = gram.rows as i64;
    if dim == 0 {
        return Ok((0, Sign::Plus));
    }
    let det = gram.det(fq);
    if fq.is_zero(det) {
        return Err(OracleError::Degenerate);
    }
    match cfg.case() {
        Case::UH => Ok((dim, Sign::Plus)),
        Case::A => {
            if dim % 2 != 0 {
                return Err(OracleError::Degenerate);
            }
            Ok((dim / 2, Sign::Plus))
        }
        Case::S => Ok((dim, fq.sign_of(det))),
    }
}

/// Tallies of every subspace of a form space, classified by isotropy,
/// nondegeneracy and type data.
#[derive(Debug, Clone, Default)]
pub struct BruteCounts {
    /// Isotropic subspaces by dimension.
    pub s: BTreeMap<i64, u64>,
    /// Nondegenerate subspaces by `(d, chi)`.
    pub r: BTreeMap<(i64, Sign), u64>,
    /// All subspaces by `(n, psi1, m)`: the type of `W / rad W` and the
    /// radical dimension.
    pub q: BTreeMap<(i64, Sign, i64), u64>,
}

/// Enumerate and classify every subspace.
pub fn brute_counts(fs: &FormSpace) -> Result<BruteCounts, OracleError> {
    let n = fs.dim();
    if n > 6 || fs.fq.q() > 9 {
        return Err(OracleError::BudgetExceeded(format!(
            "dim {n} over F_{}",
            fs.fq.q()
        )));
    }
    let gamma = fs.cfg.gamma();
    let fq = fs.fq;
    let mut counts = BruteCounts::default();
    for d in 0..=n {
        for_each_subspace(&fq, n, d, &mut |basis| {
            let (radical_dim, (ntyp, psi1)) = radical_profile(fs, basis);
            if radical_dim == d {
                *counts.s.entry(d as i64).or_insert(0) += 1;
            }
            debug_assert_eq!((d - radical_dim) as i64 % gamma, 0);
            if radical_dim == 0 {
                *counts.r.entry((ntyp, psi1)).or_insert(0) += 1;
            }
            *counts
                .q
                .entry((ntyp, psi1, radical_dim as i64))
                .or_insert(0) += 1;
        });
    }
    Ok(counts)
}

/// Basis (as rows of coefficients) of `{c : c M = 0}`.
pub fn left_kernel(fq: &Fq, m: &FqMatrix) -> FqMatrix {
    m.transpose().kernel(fq)
}

/// Canonical basis of the row space: echelon rows with zero rows dropped.
pub fn row_space_basis(fq: &Fq, m: &FqMatrix) -> FqMatrix {
    let mut r = m.clone();
    let pivots = r.rref(fq);
    let rank = pivots.len();
    FqMatrix {
        rows: rank,
        cols: m.cols,
        data: r.data[..rank * m.cols].to_vec(),
    }
}

/// Radical dimension and type of `W / rad W` for the row space of `basis`.
pub fn radical_profile(fs: &FormSpace, basis: &FqMatrix) -> (usize, (i64, Sign)) {
    let m = fs.restricted_gram(basis);
    let rad = left_kernel(&fs.fq, &m);
    let t = quotient_typ(fs, basis, &rad);
    (rad.rows, t)
}

/// Basis of the orthogonal complement of the row space of `basis` inside
/// the whole space.
pub fn perp_basis(fs: &FormSpace, basis: &FqMatrix) -> FqMatrix {
    let fq = fs.fq;
    // <b, x> = b G sigma(x)^T = 0 for all basis rows b: sigma(x) lies in the
    // right kernel of (B G).
    let bg = basis.mul(&fq, &fs.gram);
    let ker = bg.kernel(&fq);
    if fs.cfg.case() == Case::UH {
        ker.map(|x| fq.frobenius(x))
    } else {
        ker
    }
}

/// Type of `W / rad W` where `W` has the given ambient basis rows and `rad`
/// holds radical coefficient rows (with respect to that basis).
fn quotient_typ(fs: &FormSpace, basis: &FqMatrix, rad: &FqMatrix) -> (i64, Sign) {
    let fq = fs.fq;
    let d = basis.rows;
    let k = rad.rows;
    if d == k {
        return (0, Sign::Plus);
    }
    // Complement of the radical inside W: standard coefficient vectors on
    // the non-pivot columns of the radical's echelon form.
    let mut rad_r = rad.clone();
    let pivots = rad_r.rref(&fq);
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    let mut comp = FqMatrix::zero(free.len(), d);
    for (i, &c) in free.iter().enumerate() {
        comp[(i, c)] = (1, 0);
    }
    let comp_ambient = comp.mul(&fq, basis);
    let q_gram = fs.restricted_gram(&comp_ambient);
    typ_of_gram(&fs.cfg, &fq, &q_gram).expect("quotient by radical is nondegenerate")
}

/// Compare the brute-force tallies against the closed-form counts at the
/// matching specialization. Returns human-readable mismatch descriptions;
/// empty means everything agrees.
pub fn formula_mismatches(fs: &FormSpace) -> Result<Vec<String>, OracleError> {
    use crate::qcomb::{count_q, count_r, count_s};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    let counts = brute_counts(fs)?;
    let cfg = fs.cfg;
    let (r_amb, chi) = typ_of_form(fs)?;
    let gamma = cfg.gamma();
    let qval = BigRational::from(BigInt::from(fs.fq.p));
    let eval = |s: &crate::coeff::Scalar| -> BigRational { s.eval_q(&cfg, &qval).unwrap() };
    let signs: &[Sign] = if cfg.case() == Case::S {
        &[Sign::Plus, Sign::Minus]
    } else {
        &[Sign::Plus]
    };

    let mut mismatches = Vec::new();
    for b in 0..=r_amb {
        let expect = eval(&count_s(b, r_amb, chi, &cfg));
        let got = BigRational::from(BigInt::from(*counts.s.get(&b).unwrap_or(&0)));
        if expect != got {
            mismatches.push(format!(
                "S({b}; {r_amb},{chi}) [{cfg}]: formula {expect}, brute {got}"
            ));
        }
    }
    for a in 0..=r_amb {
        for &eta in signs {
            if a == 0 && eta == Sign::Minus {
                continue;
            }
            let expect = eval(&count_r(a, eta, r_amb, chi, &cfg));
            let got = BigRational::from(BigInt::from(*counts.r.get(&(a, eta)).unwrap_or(&0)));
            if expect != got {
                mismatches.push(format!(
                    "R({a},{eta}; {r_amb},{chi}) [{cfg}]: formula {expect}, brute {got}"
                ));
            }
        }
    }
    for n in 0..=r_amb {
        for m in 0..=r_amb {
            let l = r_amb - n - (2 / gamma) * m;
            if l < 0 {
                continue;
            }
            for &psi1 in signs {
                if n == 0 && psi1 == Sign::Minus {
                    continue;
                }
                let psi2 = chi * psi1 * cfg.epsilon().pow(m);
                let expect = eval(&count_q(n, psi1, m, l, psi2, &cfg));
                let got =
                    BigRational::from(BigInt::from(*counts.q.get(&(n, psi1, m)).unwrap_or(&0)));
                if expect != got {
                    mismatches.push(format!(
                        "Q({n},{psi1},{m},{l},{psi2}) in ({r_amb},{chi}) [{cfg}]: formula {expect}, brute {got}"
                    ));
                }
            }
        }
    }
    Ok(mismatches)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_f4_f9() {
        for p in [2u64, 3] {
            let fq = Fq::quadratic(p);
            let elems = fq.all_elements();
            assert_eq!(elems.len() as u64, fq.q());
            for &x in &elems {
                if !fq.is_zero(x) {
                    assert_eq!(fq.mul(x, fq.inv(x)), fq.one());
                    // Frobenius is an involution on the quadratic extension.
                    assert_eq!(fq.frobenius(fq.frobenius(x)), x);
                }
            }
            // Norm map surjects onto the base field: q0 + 1 elements of norm 1.
            let mut norm_one = 0;
            for &x in &elems {
                if fq.mul(x, fq.frobenius(x)) == fq.one() {
                    norm_one += 1;
                }
            }
            assert_eq!(norm_one, p + 1);
        }
    }

    #[test]
    fn subspace_counts_are_gaussian_binomials() {
        // Number of d-dim subspaces of F_q^n is the Gaussian binomial.
        let gauss = |n: u64, d: u64, q: u64| -> u64 {
            let mut num = 1u64;
            let mut den = 1u64;
            for i in 0..d {
                num *= q.pow((n - i) as u32) - 1;
                den *= q.pow((d - i) as u32) - 1;
            }
            num / den
        };
        for (p, deg, n) in [(2u64, 1u8, 4usize), (3, 1, 3), (2, 2, 3)] {
            let fq = if deg == 1 {
                Fq::prime(p)
            } else {
                Fq::quadratic(p)
            };
            for d in 0..=n {
                let mut count = 0u64;
                for_each_subspace(&fq, n, d, &mut |_| count += 1);
                assert_eq!(
                    count,
                    gauss(n as u64, d as u64, fq.q()),
                    "n={n} d={d} q={}",
                    fq.q()
                );
            }
        }
    }

    #[test]
    fn typ_examples() {
        let fs = FormSpace::symmetric(3, 2, Sign::Plus);
        assert_eq!(typ_of_form(&fs).unwrap(), (2, Sign::Plus));

        // diag(1, 2) over F_3: 2 is a nonsquare.
        let fs = FormSpace::symmetric(3, 2, Sign::Minus);
        assert_eq!(typ_of_form(&fs).unwrap(), (2, Sign::Minus));

        let fs = FormSpace::symplectic(3, 2);
        assert_eq!(typ_of_form(&fs).unwrap(), (1, Sign::Plus));

        let fs = FormSpace::hermitian(2, 2);
        assert_eq!(typ_of_form(&fs).unwrap(), (2, Sign::Plus));
    }

    #[test]
    fn isotropic_lines_of_symplectic_plane() {
        let fs = FormSpace::symplectic(3, 2);
        let counts = brute_counts(&fs).unwrap();
        assert_eq!(counts.s[&1], 4); // q + 1: every line is isotropic
    }

    #[test]
    fn isotropic_lines_of_anisotropic_plane() {
        // x^2 + y^2 = 0 has no nonzero solution over F_3.
        let fs = FormSpace::symmetric(3, 2, Sign::Plus);
        assert_eq!(typ_of_form(&fs).unwrap().1, fs.cfg.epsilon().flip());
        let counts = brute_counts(&fs).unwrap();
        assert_eq!(counts.s.get(&1), None);
    }

    #[test]
    fn isotropic_lines_of_hermitian_plane() {
        let fs = FormSpace::hermitian(2, 2);
        let counts = brute_counts(&fs).unwrap();
        assert_eq!(counts.s[&1], 3);
    }

    #[test]
    fn formulas_match_small_spaces() {
        for fs in [
            FormSpace::hermitian(2, 2),
            FormSpace::symmetric(3, 2, Sign::Plus),
            FormSpace::symmetric(3, 3, Sign::Minus),
            FormSpace::symplectic(2, 4),
        ] {
            let mismatches = formula_mismatches(&fs).unwrap();
            assert!(mismatches.is_empty(), "{mismatches:?}");
        }
    }

    /// Count matrices preserving the form by exhaustive enumeration.
    fn isometry_count(fs: &FormSpace) -> u64 {
        let fq = fs.fq;
        let n = fs.dim();
        let elements = fq.all_elements();
        let total = elements.len().pow((n * n) as u32);
        let mut count = 0;
        for idx in 0..total {
            let mut rem = idx;
            let mut m = FqMatrix::zero(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = elements[rem % elements.len()];
                    rem /= elements.len();
                }
            }
            // <Ax, Ay> = <x, y> for all basis vectors: the restricted gram
            // of the row space of A^T equals the gram itself.
            if fs.restricted_gram(&m.transpose()) == fs.gram {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn group_orders_match_isometry_enumeration() {
        use crate::qcomb::card_h;
        use num_bigint::BigInt;
        use num_rational::BigRational;
        let jobs: Vec<(FormSpace, i64, Sign)> = vec![
            (FormSpace::hermitian(2, 2), 2, Sign::Plus),
            (FormSpace::symmetric(3, 2, Sign::Plus), 2, Sign::Plus),
            (FormSpace::symmetric(3, 2, Sign::Minus), 2, Sign::Minus),
            (FormSpace::symplectic(2, 2), 1, Sign::Plus),
            (FormSpace::symplectic(3, 2), 1, Sign::Plus),
        ];
        for (fs, rank, chi) in jobs {
            let brute = isometry_count(&fs);
            let formula = card_h(rank, chi, &fs.cfg)
                .eval_q(&fs.cfg, &BigRational::from(BigInt::from(fs.fq.p)))
                .unwrap();
            assert_eq!(
                formula,
                BigRational::from(BigInt::from(brute)),
                "case {} rank {rank} chi {chi}",
                fs.cfg
            );
        }
    }
}
