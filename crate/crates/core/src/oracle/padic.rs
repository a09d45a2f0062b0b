//! Truncated p-adic lattice arithmetic: Jordan splitting by exact
//! congruence reduction, sublattice enumeration, and the independent
//! verification of the sublattice-type formula.
//!
//! Arithmetic happens in `Z/p^N` or in the Galois ring
//! `Z/p^N[theta]/(theta^2 - c)` with `c` a nonsquare unit (the unramified
//! quadratic extension at finite precision; the involution is
//! `theta -> -theta`, the lift of Frobenius). Valuations are exact as long
//! as they stay well below the precision; the guards abort with
//! `PrecisionLoss` instead of guessing.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coeff::{Case, CaseConfig, Sign};
use crate::oracle::ff::{
    for_each_subspace, perp_basis, radical_profile, row_space_basis, FormSpace, Fq, FqElem,
    FqMatrix,
};
use crate::oracle::OracleError;
use crate::qcomb::count_q;
use crate::typmon::OrbitType;

/// `Z/p^N`, optionally extended by `theta` with `theta^2 = c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Zq {
    pub p: u64,
    pub precision: u32,
    pn: u64,
    pub d: u8,
    c: u64,
}

/// An element `a + b theta`; `b = 0` in the unextended ring.
pub type ZqElem = (u64, u64);

impl Zq {
    pub fn base(p: u64, precision: u32) -> Zq {
        Zq {
            p,
            precision,
            pn: p.pow(precision),
            d: 1,
            c: 0,
        }
    }

    /// The Galois-ring quadratic extension, with the same residue modulus
    /// as [`Fq::quadratic`]. Odd `p` only.
    pub fn galois(p: u64, precision: u32) -> Zq {
        assert!(p % 2 == 1, "Galois-ring model needs odd p");
        let (m1, m0) = Fq::quadratic(p).modulus();
        assert_eq!(m1, 0);
        Zq {
            p,
            precision,
            pn: p.pow(precision),
            d: 2,
            c: m0,
        }
    }

    /// The ring demanded by the case: Galois for Hermitian, base otherwise.
    pub fn for_case(cfg: &CaseConfig, p: u64, precision: u32) -> Zq {
        match cfg.case() {
            Case::UH => Zq::galois(p, precision),
            _ => Zq::base(p, precision),
        }
    }

    pub fn residue_field(&self) -> Fq {
        if self.d == 1 {
            Fq::prime(self.p)
        } else {
            Fq::quadratic(self.p)
        }
    }

    pub fn zero(&self) -> ZqElem {
        (0, 0)
    }

    pub fn one(&self) -> ZqElem {
        (1, 0)
    }

    pub fn from_i64(&self, v: i64) -> ZqElem {
        (v.rem_euclid(self.pn as i64) as u64, 0)
    }

    pub fn is_zero(&self, x: ZqElem) -> bool {
        x == (0, 0)
    }

    pub fn add(&self, x: ZqElem, y: ZqElem) -> ZqElem {
        ((x.0 + y.0) % self.pn, (x.1 + y.1) % self.pn)
    }

    pub fn neg(&self, x: ZqElem) -> ZqElem {
        ((self.pn - x.0) % self.pn, (self.pn - x.1) % self.pn)
    }

    pub fn sub(&self, x: ZqElem, y: ZqElem) -> ZqElem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: ZqElem, y: ZqElem) -> ZqElem {
        let pn = self.pn as u128;
        let c0 =
            (x.0 as u128 * y.0 as u128 + self.c as u128 * (x.1 as u128 * y.1 as u128 % pn)) % pn;
        let c1 = (x.0 as u128 * y.1 as u128 + x.1 as u128 * y.0 as u128) % pn;
        (c0 as u64, c1 as u64)
    }

    /// The involution `theta -> -theta`: the lift of Frobenius.
    pub fn conj(&self, x: ZqElem) -> ZqElem {
        (x.0, (self.pn - x.1) % self.pn)
    }

    /// p-adic valuation, capped at the precision.
    pub fn valuation(&self, x: ZqElem) -> u32 {
        fn vp(mut a: u64, p: u64, cap: u32) -> u32 {
            if a == 0 {
                return cap;
            }
            let mut v = 0;
            while a.is_multiple_of(p) && v < cap {
                a /= p;
                v += 1;
            }
            v
        }
        vp(x.0, self.p, self.precision).min(vp(x.1, self.p, self.precision))
    }

    pub fn is_unit(&self, x: ZqElem) -> bool {
        self.valuation(x) == 0
    }

    /// Divide exactly by `p^v`.
    pub fn div_pow(&self, x: ZqElem, v: u32) -> ZqElem {
        let pv = self.p.pow(v);
        debug_assert!(
            x.0.is_multiple_of(pv) && x.1.is_multiple_of(pv),
            "inexact division by p^{v}"
        );
        (x.0 / pv, x.1 / pv)
    }

    pub fn inv_unit(&self, x: ZqElem) -> ZqElem {
        assert!(self.is_unit(x), "inverse of a non-unit");
        if self.d == 1 {
            (inv_mod(x.0, self.pn), 0)
        } else {
            // (a + b theta)^{-1} = (a - b theta) / (a^2 - c b^2).
            let norm = self.mul(x, self.conj(x)).0;
            let ninv = inv_mod(norm, self.pn);
            let cx = self.conj(x);
            (mul_mod(cx.0, ninv, self.pn), mul_mod(cx.1, ninv, self.pn))
        }
    }

    /// Exact quotient `x / y` for `y = unit * p^v` with `v <= val(x)`.
    pub fn div_exact(&self, x: ZqElem, y: ZqElem) -> ZqElem {
        let v = self.valuation(y);
        debug_assert!(self.valuation(x) >= v);
        let yu = self.div_pow(y, v);
        self.mul(self.div_pow(x, v), self.inv_unit(yu))
    }

    pub fn reduce(&self, x: ZqElem) -> FqElem {
        (x.0 % self.p, x.1 % self.p)
    }

    /// Canonical lift of a residue element.
    pub fn lift(&self, x: FqElem) -> ZqElem {
        x
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    assert_eq!(r0, 1, "not a unit");
    t0.rem_euclid(m as i128) as u64
}

/// A lattice presented by the Gram matrix of a basis over the truncated
/// ring.
#[derive(Debug, Clone)]
pub struct GramLattice {
    pub cfg: CaseConfig,
    pub ring: Zq,
    pub dim: usize,
    pub gram: Vec<ZqElem>,
}

impl GramLattice {
    pub fn new(
        cfg: CaseConfig,
        ring: Zq,
        dim: usize,
        gram: Vec<ZqElem>,
    ) -> Result<GramLattice, OracleError> {
        if gram.len() != dim * dim {
            return Err(OracleError::BadInput("gram size mismatch".into()));
        }
        let expected_d = if cfg.case() == Case::UH { 2 } else { 1 };
        if ring.d != expected_d {
            return Err(OracleError::BadInput(format!(
                "case {} needs ring degree {expected_d}",
                cfg.case()
            )));
        }
        if cfg.case() == Case::S && ring.p.is_multiple_of(2) {
            return Err(OracleError::BadInput("symmetric case needs odd p".into()));
        }
        let gl = GramLattice {
            cfg,
            ring,
            dim,
            gram,
        };
        for i in 0..dim {
            for j in 0..dim {
                let expect = match cfg.case() {
                    Case::UH => ring.conj(gl.g(j, i)),
                    Case::S => gl.g(j, i),
                    Case::A => ring.neg(gl.g(j, i)),
                };
                if gl.g(i, j) != expect {
                    return Err(OracleError::BadInput("gram is not star-symmetric".into()));
                }
            }
        }
        Ok(gl)
    }

    pub fn g(&self, i: usize, j: usize) -> ZqElem {
        self.gram[i * self.dim + j]
    }

    fn g_mut(&mut self, i: usize, j: usize) -> &mut ZqElem {
        &mut self.gram[i * self.dim + j]
    }

    /// Gram matrix of the sublattice spanned by the given basis rows.
    pub fn restricted(&self, rows: &[Vec<ZqElem>]) -> GramLattice {
        let n = rows.len();
        let ring = self.ring;
        let mut gram = vec![ring.zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = ring.zero();
                for s in 0..self.dim {
                    if ring.is_zero(rows[i][s]) {
                        continue;
                    }
                    for t in 0..self.dim {
                        let second = if self.cfg.case() == Case::UH {
                            ring.conj(rows[j][t])
                        } else {
                            rows[j][t]
                        };
                        acc = ring.add(acc, ring.mul(ring.mul(rows[i][s], self.g(s, t)), second));
                    }
                }
                gram[i * n + j] = acc;
            }
        }
        GramLattice {
            cfg: self.cfg,
            ring,
            dim: n,
            gram,
        }
    }
}

/// A lattice built in Jordan form from an orbit type, remembering which
/// ambient coordinates belong to which valuation block.
#[derive(Debug, Clone)]
pub struct StandardLattice {
    pub lattice: GramLattice,
    /// Ascending `(valuation, coordinate indices)`.
    pub blocks: Vec<(i64, Vec<usize>)>,
    pub typ: OrbitType,
}

impl StandardLattice {
    pub fn new(
        cfg: &CaseConfig,
        ring: Zq,
        typ: &OrbitType,
    ) -> Result<StandardLattice, OracleError> {
        let gamma = cfg.gamma() as usize;
        let dim: usize = typ.entries().map(|(_, m, _)| m as usize * gamma).sum();
        let mut gram = vec![ring.zero(); dim * dim];
        let mut blocks = Vec::new();
        let mut at = 0usize;
        let nonsquare = if cfg.case() == Case::S {
            Fq::quadratic(ring.p).modulus().1
        } else {
            0
        };
        for (v, mult, sign) in typ.entries() {
            if v < 0 {
                return Err(OracleError::BadInput(
                    "standard lattice needs v >= 0".into(),
                ));
            }
            if v as u32 + 4 > ring.precision {
                return Err(OracleError::PrecisionLoss(format!(
                    "valuation {v} too deep"
                )));
            }
            let pv = ring.p.pow(v as u32);
            let mut coords = Vec::new();
            match cfg.case() {
                Case::UH => {
                    for _ in 0..mult {
                        gram[at * dim + at] = (pv, 0);
                        coords.push(at);
                        at += 1;
                    }
                }
                Case::S => {
                    for j in 0..mult {
                        // The nonsquare unit sits on the first slot when the
                        // block determinant sign is minus.
                        let unit = if j == 0 && sign == Sign::Minus {
                            nonsquare
                        } else {
                            1
                        };
                        gram[at * dim + at] = (mul_mod(unit, pv, ring.p.pow(ring.precision)), 0);
                        coords.push(at);
                        at += 1;
                    }
                }
                Case::A => {
                    for _ in 0..mult {
                        gram[at * dim + at + 1] = (pv, 0);
                        gram[(at + 1) * dim + at] = ring.neg((pv, 0));
                        coords.push(at);
                        coords.push(at + 1);
                        at += 2;
                    }
                }
            }
            blocks.push((v, coords));
        }
        let lattice = GramLattice::new(*cfg, ring, dim, gram)?;
        Ok(StandardLattice {
            lattice,
            blocks,
            typ: typ.clone(),
        })
    }
}

fn swap_basis(gl: &mut GramLattice, i: usize, j: usize) {
    if i == j {
        return;
    }
    for c in 0..gl.dim {
        let (a, b) = (gl.g(i, c), gl.g(j, c));
        *gl.g_mut(i, c) = b;
        *gl.g_mut(j, c) = a;
    }
    for r in 0..gl.dim {
        let (a, b) = (gl.g(r, i), gl.g(r, j));
        *gl.g_mut(r, i) = b;
        *gl.g_mut(r, j) = a;
    }
}

/// Basis change `b_i <- b_i + c b_j`: row `i` gains `c` times row `j`, and
/// the column update uses the conjugate in the Hermitian case.
fn add_multiple(gl: &mut GramLattice, i: usize, j: usize, c: ZqElem) {
    let ring = gl.ring;
    for col in 0..gl.dim {
        let add = ring.mul(c, gl.g(j, col));
        *gl.g_mut(i, col) = ring.add(gl.g(i, col), add);
    }
    let c2 = if gl.cfg.case() == Case::UH {
        ring.conj(c)
    } else {
        c
    };
    for row in 0..gl.dim {
        let add = ring.mul(c2, gl.g(row, j));
        *gl.g_mut(row, i) = ring.add(gl.g(row, i), add);
    }
}

fn min_valuation_entry(gl: &GramLattice, from: usize) -> (usize, usize, u32) {
    let ring = gl.ring;
    let mut best = (from, from, ring.precision);
    for i in from..gl.dim {
        for j in from..gl.dim {
            let v = ring.valuation(gl.g(i, j));
            if v < best.2 {
                best = (i, j, v);
            }
        }
    }
    best
}

/// Jordan splitting of a Gram lattice: diagonalize (symmetric/Hermitian)
/// or split into hyperbolic pairs (alternating) by exact congruence
/// reduction, and read off the orbit type.
pub fn jordan_split(gl: &GramLattice) -> Result<OrbitType, OracleError> {
    let ring = gl.ring;
    let mut work = gl.clone();
    let n = gl.dim;
    let mut typ_entries: BTreeMap<i64, (u32, Sign)> = BTreeMap::new();
    let fq = ring.residue_field();
    let guard = |v: u32| -> Result<(), OracleError> {
        if v + 4 > ring.precision {
            return Err(OracleError::PrecisionLoss(format!(
                "pivot valuation {v} at precision {}",
                ring.precision
            )));
        }
        Ok(())
    };
    match gl.cfg.case() {
        Case::UH | Case::S => {
            for k in 0..n {
                let (bi, bj, v) = min_valuation_entry(&work, k);
                guard(v)?;
                if bi != bj {
                    // Move the minimum onto the diagonal: with the residue
                    // characteristic odd, one of +-1 always works for
                    // symmetric grams, and one of +-1, +-theta for Hermitian
                    // grams by nondegeneracy of the trace form.
                    let candidates: &[ZqElem] = if gl.cfg.case() == Case::S {
                        &[(1, 0), (ring.pn - 1, 0)]
                    } else {
                        &[(1, 0), (ring.pn - 1, 0), (0, 1), (0, ring.pn - 1)]
                    };
                    let mut fixed = false;
                    for &c in candidates {
                        let mut trial = work.clone();
                        add_multiple(&mut trial, bi, bj, c);
                        if ring.valuation(trial.g(bi, bi)) == v {
                            work = trial;
                            fixed = true;
                            break;
                        }
                    }
                    if !fixed {
                        return Err(OracleError::PrecisionLoss(
                            "could not move pivot to the diagonal".into(),
                        ));
                    }
                }
                swap_basis(&mut work, k, bi);
                let pivot = work.g(k, k);
                debug_assert_eq!(ring.valuation(pivot), v);
                for i in k + 1..n {
                    let num = work.g(i, k);
                    if ring.is_zero(num) {
                        continue;
                    }
                    let c = ring.neg(ring.div_exact(num, pivot));
                    add_multiple(&mut work, i, k, c);
                }
                let unit = ring.div_pow(pivot, v);
                let sign = match gl.cfg.case() {
                    Case::S => fq.sign_of(ring.reduce(unit)),
                    _ => Sign::Plus,
                };
                let entry = typ_entries.entry(v as i64).or_insert((0, Sign::Plus));
                entry.0 += 1;
                entry.1 = entry.1 * sign;
            }
        }
        Case::A => {
            assert!(n.is_multiple_of(2), "alternating gram has even dimension");
            let mut k = 0;
            while k < n {
                let (bi, bj, v) = min_valuation_entry(&work, k);
                guard(v)?;
                debug_assert_ne!(bi, bj, "alternating diagonal is zero");
                swap_basis(&mut work, k, bi);
                let j_src = if bj == k { bi } else { bj };
                swap_basis(&mut work, k + 1, j_src);
                let pivot = work.g(k, k + 1);
                debug_assert_eq!(ring.valuation(pivot), v);
                for m in k + 2..n {
                    let c1 = ring.neg(ring.div_exact(work.g(m, k + 1), pivot));
                    add_multiple(&mut work, m, k, c1);
                    let pivot_t = work.g(k + 1, k);
                    let c2 = ring.neg(ring.div_exact(work.g(m, k), pivot_t));
                    add_multiple(&mut work, m, k + 1, c2);
                }
                let entry = typ_entries.entry(v as i64).or_insert((0, Sign::Plus));
                entry.0 += 1;
                k += 2;
            }
        }
    }
    let mut typ = OrbitType::new();
    for (v, (m, s)) in typ_entries {
        typ.set(v, m, s);
    }
    Ok(typ)
}

/// Rows of a basis of the sublattice corresponding to a residue subspace:
/// canonical lifts of the echelon rows, plus `p` times the standard vectors
/// off the pivots.
fn lift_sublattice(ring: &Zq, n: usize, subspace: &FqMatrix) -> Vec<Vec<ZqElem>> {
    let fq = ring.residue_field();
    let mut sub = subspace.clone();
    let pivots = sub.rref(&fq);
    let mut rows = Vec::with_capacity(n);
    for i in 0..sub.rows {
        rows.push((0..n).map(|j| ring.lift(sub[(i, j)])).collect());
    }
    for j in 0..n {
        if !pivots.contains(&j) {
            let mut row = vec![ring.zero(); n];
            row[j] = ring.from_i64(ring.p as i64);
            rows.push(row);
        }
    }
    rows
}

/// Histogram of sublattice types: all lattices between `pL` and `L` of the
/// given colength, classified by Jordan splitting.
pub fn enumerate_sublattices(
    gl: &GramLattice,
    k: usize,
) -> Result<BTreeMap<OrbitType, u64>, OracleError> {
    let n = gl.dim;
    if k > n {
        return Err(OracleError::BadInput(format!(
            "colength {k} exceeds dimension {n}"
        )));
    }
    let fq = gl.ring.residue_field();
    if n > 6 || fq.q() > 9 {
        return Err(OracleError::BudgetExceeded(format!(
            "dim {n} over residue F_{}",
            fq.q()
        )));
    }
    let mut histogram: BTreeMap<OrbitType, u64> = BTreeMap::new();
    let mut err = None;
    for_each_subspace(&fq, n, n - k, &mut |subspace| {
        if err.is_some() {
            return;
        }
        let rows = lift_sublattice(&gl.ring, n, subspace);
        let restricted = gl.restricted(&rows);
        match jordan_split(&restricted) {
            Ok(t) => *histogram.entry(t).or_insert(0) += 1,
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(histogram),
    }
}

/// Outcome of sweeping every sublattice of a standard lattice against the
/// predicted types and fiber counts.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MainLemmaReport {
    pub lattice: String,
    pub sublattices_checked: u64,
    pub typ_mismatches: Vec<String>,
    pub fiber_mismatches: Vec<String>,
    /// Number of distinct sublattice types per colength.
    pub histogram_sizes: BTreeMap<usize, usize>,
}

impl MainLemmaReport {
    pub fn passed(&self) -> bool {
        self.typ_mismatches.is_empty() && self.fiber_mismatches.is_empty()
    }
}

/// Per-valuation data of one sublattice: `(i, n, psi1, m, l, psi2)`.
type FiberKey = Vec<(i64, i64, Sign, i64, i64, Sign)>;

/// Sublattice-type histograms keyed by colength.
pub type ColengthHistograms = BTreeMap<usize, BTreeMap<OrbitType, u64>>;

/// Enumerate every sublattice of the standard lattice and, for each: read
/// off the per-valuation subspace data in the residue spaces, check the
/// predicted type against the Jordan splitting of the actual Gram matrix,
/// and tally fibers, whose cardinalities are then compared against the
/// closed-form product count. Also returns the histograms per colength for
/// comparison against the Hecke action.
pub fn verify_main_lemma(
    std_lat: &StandardLattice,
) -> Result<(MainLemmaReport, ColengthHistograms), OracleError> {
    let gl = &std_lat.lattice;
    let cfg = gl.cfg;
    let ring = gl.ring;
    let fq = ring.residue_field();
    let n = gl.dim;
    if n > 6 || fq.q() > 9 {
        return Err(OracleError::BudgetExceeded(format!(
            "dim {n} over residue F_{}",
            fq.q()
        )));
    }
    let gamma = cfg.gamma();
    let mut report = MainLemmaReport {
        lattice: format!("{} {}", cfg, std_lat.typ),
        sublattices_checked: 0,
        typ_mismatches: Vec::new(),
        fiber_mismatches: Vec::new(),
        histogram_sizes: BTreeMap::new(),
    };
    let mut histograms: BTreeMap<usize, BTreeMap<OrbitType, u64>> = BTreeMap::new();

    // Residue form spaces per valuation block: the block Gram divided by
    // p^v, reduced mod p.
    let mut residue_spaces: Vec<(i64, Vec<usize>, FormSpace)> = Vec::new();
    for (v, coords) in &std_lat.blocks {
        let b = coords.len();
        let mut gram = FqMatrix::zero(b, b);
        for (ri, &ci) in coords.iter().enumerate() {
            for (rj, &cj) in coords.iter().enumerate() {
                gram[(ri, rj)] = ring.reduce(ring.div_pow(gl.g(ci, cj), *v as u32));
            }
        }
        let fs = FormSpace::new(cfg, fq, gram)
            .map_err(|e| OracleError::BadInput(format!("residue block at {v}: {e}")))?;
        residue_spaces.push((*v, coords.clone(), fs));
    }

    let mut err: Option<OracleError> = None;
    for k in 0..=n {
        let mut histogram: BTreeMap<OrbitType, u64> = BTreeMap::new();
        let mut fibers: BTreeMap<FiberKey, u64> = BTreeMap::new();
        for_each_subspace(&fq, n, n - k, &mut |subspace| {
            if err.is_some() {
                return;
            }
            report.sublattices_checked += 1;

            // Per-block subspace data.
            let mut key: FiberKey = Vec::new();
            let mut parts: BTreeMap<i64, (i64, Sign, i64, i64, Sign)> = BTreeMap::new();
            let mut k_data = 0i64;
            for (v, coords, fs) in &residue_spaces {
                // Rows of the subspace vanishing on all lower blocks,
                // projected into this block.
                let lower: Vec<usize> = residue_spaces
                    .iter()
                    .filter(|(w, _, _)| w < v)
                    .flat_map(|(_, cs, _)| cs.iter().copied())
                    .collect();
                let mut restr = FqMatrix::zero(subspace.rows, lower.len());
                for i in 0..subspace.rows {
                    for (jj, &c) in lower.iter().enumerate() {
                        restr[(i, jj)] = subspace[(i, c)];
                    }
                }
                let coeffs = crate::oracle::ff::left_kernel(&fq, &restr);
                let amb = coeffs.mul(&fq, subspace);
                let mut proj = FqMatrix::zero(amb.rows, coords.len());
                for i in 0..amb.rows {
                    for (jj, &c) in coords.iter().enumerate() {
                        proj[(i, jj)] = amb[(i, c)];
                    }
                }
                let in_block = row_space_basis(&fq, &proj);
                let (m_i, (n_i, psi1_i)) = radical_profile(fs, &in_block);
                let perp = perp_basis(fs, &in_block);
                let (m_perp, (l_i, psi2_i)) = radical_profile(fs, &perp);
                if m_i != m_perp {
                    err = Some(OracleError::BadInput(format!(
                        "radical dims disagree at valuation {v}"
                    )));
                    return;
                }
                let e0_i = coords.len() as i64 / gamma;
                let m_i = m_i as i64;
                if n_i + (2 / gamma) * m_i + l_i != e0_i {
                    err = Some(OracleError::BadInput(format!(
                        "dimension bookkeeping failed at valuation {v}"
                    )));
                    return;
                }
                k_data += m_i + gamma * l_i;
                key.push((*v, n_i, psi1_i, m_i, l_i, psi2_i));
                parts.insert(*v, (n_i, psi1_i, m_i, l_i, psi2_i));
            }
            if k_data != k as i64 {
                err = Some(OracleError::BadInput(format!(
                    "colength bookkeeping failed: {k_data} vs {k}"
                )));
                return;
            }

            // Predicted type from the data.
            let lo = residue_spaces.first().map(|(v, _, _)| *v).unwrap_or(0);
            let hi = residue_spaces.last().map(|(v, _, _)| *v).unwrap_or(0);
            let mut predicted = OrbitType::new();
            for t in lo..=hi + 2 {
                let (n_t, psi1_t) = parts
                    .get(&t)
                    .map(|&(n, s, _, _, _)| (n, s))
                    .unwrap_or((0, Sign::Plus));
                let m_prev = parts.get(&(t - 1)).map(|&(_, _, m, _, _)| m).unwrap_or(0);
                let (l_t, psi2_t) = parts
                    .get(&(t - 2))
                    .map(|&(_, _, _, l, s)| (l, s))
                    .unwrap_or((0, Sign::Plus));
                let f0 = n_t + (2 / gamma) * m_prev + l_t;
                if f0 > 0 {
                    predicted.set(t, f0 as u32, psi1_t * cfg.epsilon().pow(m_prev) * psi2_t);
                }
            }

            // Actual type by Jordan splitting of the restricted Gram.
            let rows = lift_sublattice(&ring, n, subspace);
            let restricted = gl.restricted(&rows);
            let actual = match jordan_split(&restricted) {
                Ok(t) => t,
                Err(e) => {
                    err = Some(e);
                    return;
                }
            };
            if actual != predicted {
                report
                    .typ_mismatches
                    .push(format!("k={k}: predicted {predicted}, split {actual}"));
            }
            *histogram.entry(actual).or_insert(0) += 1;
            *fibers.entry(key).or_insert(0) += 1;
        });
        if let Some(e) = err {
            return Err(e);
        }

        // Fiber cardinalities against the closed-form product.
        let qv = BigRational::from(BigInt::from(ring.p));
        for (key, got) in &fibers {
            let mut exponent = 0i64;
            for (a, &(_, _, _, m_i, l_i, _)) in key.iter().enumerate() {
                for &(_, n_j, _, m_j, _, _) in key.iter().take(a) {
                    exponent += (m_i + gamma * l_i) * (m_j + gamma * n_j);
                }
            }
            let mut expect = cfg.q().pow(exponent as u32);
            for &(_, n_i, psi1_i, m_i, l_i, psi2_i) in key {
                expect = expect.mul(&count_q(n_i, psi1_i, m_i, l_i, psi2_i, &cfg));
            }
            let expect_val = expect.eval_q(&cfg, &qv).expect("even scalar");
            if expect_val != BigRational::from(BigInt::from(*got)) {
                report.fiber_mismatches.push(format!(
                    "k={k} fiber {key:?}: formula {expect_val}, enumerated {got}"
                ));
            }
        }

        report.histogram_sizes.insert(k, histogram.len());
        histograms.insert(k, histogram);
    }
    Ok((report, histograms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_arithmetic() {
        let z = Zq::base(3, 8);
        let a = z.from_i64(35);
        let b = z.from_i64(-8);
        assert_eq!(z.add(a, b), z.from_i64(27));
        assert_eq!(z.valuation(z.from_i64(27)), 3);
        assert_eq!(z.valuation(z.zero()), 8);
        assert_eq!(z.mul(z.from_i64(100), z.inv_unit(z.from_i64(100))), z.one());
    }

    #[test]
    fn galois_ring_involution_and_norms() {
        let z = Zq::galois(3, 8);
        let x = (5u64, 7u64);
        let xc = z.conj(x);
        // The involution squares to the identity and fixes the base ring.
        assert_eq!(z.conj(xc), x);
        assert_eq!(z.conj((4, 0)), (4, 0));
        // Norms land in the base ring and multiply.
        let y = (11u64, 2u64);
        let nx = z.mul(x, z.conj(x));
        let nxy = z.mul(z.mul(x, y), z.conj(z.mul(x, y)));
        let ny = z.mul(y, z.conj(y));
        assert_eq!(nx.1, 0);
        assert_eq!(nxy, z.mul(nx, ny));
        // Units invert.
        assert_eq!(z.mul(x, z.inv_unit(x)), z.one());
        // The involution reduces to Frobenius on the residue field.
        let fq = z.residue_field();
        assert_eq!(z.reduce(z.conj(x)), fq.frobenius(z.reduce(x)));
    }

    #[test]
    fn jordan_split_diagonal_examples() {
        // diag(1, 3) over Z/3^8: valuations 0 and 1, both unit parts square.
        let z = Zq::base(3, 8);
        let cfg = CaseConfig::s(Sign::Minus);
        let gl = GramLattice::new(
            cfg,
            z,
            2,
            vec![z.from_i64(1), z.zero(), z.zero(), z.from_i64(3)],
        )
        .unwrap();
        let t = jordan_split(&gl).unwrap();
        assert_eq!(
            t,
            OrbitType::from_entries(&[(0, 1, Sign::Plus), (1, 1, Sign::Plus)])
        );

        // diag(2, 1): determinant 2 is a nonsquare mod 3.
        let gl = GramLattice::new(
            cfg,
            z,
            2,
            vec![z.from_i64(2), z.zero(), z.zero(), z.from_i64(1)],
        )
        .unwrap();
        let t = jordan_split(&gl).unwrap();
        assert_eq!(t, OrbitType::from_entries(&[(0, 2, Sign::Minus)]));
    }

    #[test]
    fn jordan_split_antidiagonal_alternating() {
        let z = Zq::base(3, 8);
        let cfg = CaseConfig::a();
        let gl = GramLattice::new(
            cfg,
            z,
            2,
            vec![z.zero(), z.from_i64(3), z.from_i64(-3), z.zero()],
        )
        .unwrap();
        let t = jordan_split(&gl).unwrap();
        assert_eq!(t, OrbitType::from_entries(&[(1, 1, Sign::Plus)]));
    }

    #[test]
    fn jordan_split_offdiagonal_pivot() {
        // A symmetric gram whose minimal valuation sits off-diagonal:
        // det = 8, a nonsquare unit mod 3.
        let z = Zq::base(3, 8);
        let cfg = CaseConfig::s(Sign::Minus);
        let gl = GramLattice::new(
            cfg,
            z,
            2,
            vec![z.from_i64(3), z.from_i64(1), z.from_i64(1), z.from_i64(3)],
        )
        .unwrap();
        let t = jordan_split(&gl).unwrap();
        assert_eq!(t, OrbitType::from_entries(&[(0, 2, Sign::Minus)]));
    }

    #[test]
    fn standard_lattice_round_trips_through_split() {
        let z3 = Zq::base(3, 8);
        let zg = Zq::galois(3, 8);
        let cases: Vec<(CaseConfig, Zq, OrbitType)> = vec![
            (
                CaseConfig::s(Sign::Minus),
                z3,
                OrbitType::from_entries(&[
                    (0, 1, Sign::Plus),
                    (1, 1, Sign::Minus),
                    (2, 1, Sign::Plus),
                ]),
            ),
            (
                CaseConfig::uh(),
                zg,
                OrbitType::from_entries(&[(0, 2, Sign::Plus), (1, 1, Sign::Plus)]),
            ),
            (
                CaseConfig::a(),
                z3,
                OrbitType::from_entries(&[(0, 1, Sign::Plus), (1, 1, Sign::Plus)]),
            ),
        ];
        for (cfg, ring, typ) in cases {
            let sl = StandardLattice::new(&cfg, ring, &typ).unwrap();
            assert_eq!(jordan_split(&sl.lattice).unwrap(), typ, "case {cfg}");
        }
    }

    #[test]
    fn colength_zero_gives_the_lattice_back() {
        let z = Zq::base(3, 8);
        let cfg = CaseConfig::s(Sign::Minus);
        let typ = OrbitType::from_entries(&[(0, 1, Sign::Plus), (1, 1, Sign::Plus)]);
        let sl = StandardLattice::new(&cfg, z, &typ).unwrap();
        let hist = enumerate_sublattices(&sl.lattice, 0).unwrap();
        assert_eq!(hist.len(), 1);
        assert_eq!(hist[&typ], 1);
    }

    #[test]
    fn full_colength_rescales() {
        // The unique colength-n sublattice is pL, every valuation up by 2.
        let z = Zq::base(3, 8);
        let cfg = CaseConfig::s(Sign::Minus);
        let typ = OrbitType::from_entries(&[(0, 2, Sign::Minus)]);
        let sl = StandardLattice::new(&cfg, z, &typ).unwrap();
        let hist = enumerate_sublattices(&sl.lattice, 2).unwrap();
        let shifted = OrbitType::from_entries(&[(2, 2, Sign::Minus)]);
        assert_eq!(*hist.get(&shifted).unwrap(), 1);
    }

    #[test]
    fn sublattice_totals_are_gaussian() {
        // Totals per colength are subspace counts of the residue space:
        // [3 choose k]_3 = 1, 13, 13, 1.
        let z = Zq::base(3, 8);
        let cfg = CaseConfig::s(Sign::Minus);
        let typ = OrbitType::from_entries(&[(0, 2, Sign::Plus), (1, 1, Sign::Plus)]);
        let sl = StandardLattice::new(&cfg, z, &typ).unwrap();
        let totals: Vec<u64> = (0..=3)
            .map(|k| {
                enumerate_sublattices(&sl.lattice, k)
                    .unwrap()
                    .values()
                    .sum()
            })
            .collect();
        assert_eq!(totals, vec![1, 13, 13, 1]);
    }

    #[test]
    fn rank_one_hermitian_sublattice() {
        let z = Zq::galois(3, 8);
        let cfg = CaseConfig::uh();
        let typ = OrbitType::from_entries(&[(0, 1, Sign::Plus)]);
        let sl = StandardLattice::new(&cfg, z, &typ).unwrap();
        let hist = enumerate_sublattices(&sl.lattice, 1).unwrap();
        assert_eq!(hist.len(), 1);
        assert_eq!(hist[&OrbitType::from_entries(&[(2, 1, Sign::Plus)])], 1);
    }

    #[test]
    fn main_lemma_small_sweeps() {
        let z3 = Zq::base(3, 8);
        let cfg = CaseConfig::s(Sign::Minus);
        let typ = OrbitType::from_entries(&[(0, 1, Sign::Plus), (1, 1, Sign::Minus)]);
        let sl = StandardLattice::new(&cfg, z3, &typ).unwrap();
        let (report, _) = verify_main_lemma(&sl).unwrap();
        assert!(report.passed(), "{report:?}");

        let zg = Zq::galois(3, 8);
        let cfg = CaseConfig::uh();
        let typ = OrbitType::from_entries(&[(0, 1, Sign::Plus), (1, 1, Sign::Plus)]);
        let sl = StandardLattice::new(&cfg, zg, &typ).unwrap();
        let (report, _) = verify_main_lemma(&sl).unwrap();
        assert!(report.passed(), "{report:?}");

        let cfg = CaseConfig::a();
        let typ = OrbitType::from_entries(&[(0, 1, Sign::Plus), (1, 1, Sign::Plus)]);
        let sl = StandardLattice::new(&cfg, z3, &typ).unwrap();
        let (report, _) = verify_main_lemma(&sl).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn histograms_match_hecke_action() {
        use crate::hecke::t_star_direct;
        let z3 = Zq::base(3, 8);
        let cfg = CaseConfig::s(Sign::Minus);
        let typ = OrbitType::from_entries(&[(0, 2, Sign::Plus)]);
        let sl = StandardLattice::new(&cfg, z3, &typ).unwrap();
        let (_, hists) = verify_main_lemma(&sl).unwrap();
        let qv = BigRational::from(BigInt::from(3));
        for (k, hist) in hists {
            let action = t_star_direct(&typ, k as i64, &cfg);
            for (t, count) in &hist {
                let c = action.coeff(t).eval_q(&cfg, &qv).unwrap();
                assert_eq!(c, BigRational::from(BigInt::from(*count)), "k={k} type {t}");
            }
            for (t, c) in action.terms() {
                let v = c.eval_q(&cfg, &qv).unwrap();
                let got = hist.get(t).copied().unwrap_or(0);
                assert_eq!(v, BigRational::from(BigInt::from(got)), "k={k} type {t}");
            }
        }
    }
}
