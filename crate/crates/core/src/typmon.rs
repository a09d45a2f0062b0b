//! The graded type monoid and its linear span.
//!
//! Words are built from letters `(a, s)` with `a` an integer and `s` a sign
//! character component (always `+` in the Hermitian and alternating cases).
//! Internally every element is stored in the character-summed coordinates:
//! a monomial `[(a_1,s_1),...,(a_r,s_r)]` stands for the character-indexed
//! basis word, so translations act on the `a`'s alone and normal-form
//! monomials are orthonormal under the normalized pairing. Orbit types live
//! on the boundary of the engine: they index the K-orbits on the matrix
//! space, and the two views are connected by the mutually inverse linear
//! maps [`orbit_to_delta`] / [`delta_to_orbit`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::coeff::{Case, CaseConfig, CoeffError, Dyadic, Scalar, Sign};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// Errors from type-monoid operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypmonError {
    DegreeMismatch { left: usize, right: usize },
    LengthMismatch { expected: usize, got: usize },
    NotDescending,
}

impl fmt::Display for TypmonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypmonError::DegreeMismatch { left, right } => {
                write!(f, "degree mismatch: {left} vs {right}")
            }
            TypmonError::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            TypmonError::NotDescending => write!(f, "monomial is not weakly descending"),
        }
    }
}

impl std::error::Error for TypmonError {}

/// A generator `(a, s)` of the type monoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub a: i64,
    pub s: Sign,
}

impl Letter {
    pub fn new(a: i64, s: Sign) -> Letter {
        Letter { a, s }
    }

    /// A letter with trivial character component.
    pub fn plain(a: i64) -> Letter {
        Letter { a, s: Sign::Plus }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.s)
    }
}

/// An ordered word of letters; the degree is the length.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(pub Vec<Letter>);

impl Monomial {
    pub fn empty() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn from_values(values: &[i64]) -> Monomial {
        Monomial(values.iter().map(|&a| Letter::plain(a)).collect())
    }

    pub fn from_pairs(pairs: &[(i64, Sign)]) -> Monomial {
        Monomial(pairs.iter().map(|&(a, s)| Letter::new(a, s)).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn values(&self) -> Vec<i64> {
        self.0.iter().map(|l| l.a).collect()
    }

    /// The total grading: the sum of the letter values.
    pub fn sigma(&self) -> i64 {
        self.0.iter().map(|l| l.a).sum()
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Monomial(letters)
    }

    pub fn translate(&self, eps: &[i64]) -> Result<Monomial, TypmonError> {
        if eps.len() != self.0.len() {
            return Err(TypmonError::LengthMismatch {
                expected: self.0.len(),
                got: eps.len(),
            });
        }
        Ok(Monomial(
            self.0
                .iter()
                .zip(eps)
                .map(|(l, e)| Letter::new(l.a + e, l.s))
                .collect(),
        ))
    }

    /// Weakly descending in the letter values.
    pub fn is_descending(&self) -> bool {
        self.0.windows(2).all(|w| w[0].a >= w[1].a)
    }

    /// Weakly descending with constant character on each block of equal
    /// values: exactly the normal-form words of the rewrite system.
    pub fn is_normal_word(&self) -> bool {
        self.0
            .windows(2)
            .all(|w| w[0].a > w[1].a || (w[0].a == w[1].a && w[0].s == w[1].s))
    }

    /// Blocks of equal letter values, as `(value, multiplicity, character)`.
    /// Requires block-constant characters.
    fn blocks(&self) -> Result<Vec<(i64, u32, Sign)>, TypmonError> {
        let mut out: Vec<(i64, u32, Sign)> = Vec::new();
        for l in &self.0 {
            match out.last_mut() {
                Some((a, m, s)) if *a == l.a => {
                    if *s != l.s {
                        return Err(TypmonError::NotDescending);
                    }
                    *m += 1;
                }
                _ => out.push((l.a, 1, l.s)),
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Monomial {
    type Err = CoeffError;

    /// Parses the text form `"(3,+)(1,-)"`; `"1"` is the empty word.
    fn from_str(s: &str) -> Result<Monomial, CoeffError> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(Monomial::empty());
        }
        let mut letters = Vec::new();
        for part in s.split(')') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let body = part
                .strip_prefix('(')
                .ok_or_else(|| CoeffError::Parse(format!("bad letter `{part}`")))?;
            let (a, sgn) = body
                .split_once(',')
                .ok_or_else(|| CoeffError::Parse(format!("bad letter `{body}`")))?;
            let a: i64 = a
                .trim()
                .parse()
                .map_err(|_| CoeffError::Parse(format!("bad letter value `{a}`")))?;
            let sgn: Sign = sgn.trim().parse()?;
            letters.push(Letter::new(a, sgn));
        }
        Ok(Monomial(letters))
    }
}

/// A sparse scalar-linear combination of words of a fixed degree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Element {
    degree: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Element {
    pub fn zero(degree: usize) -> Element {
        Element {
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The empty word with coefficient one: the unit for concatenation.
    pub fn unit() -> Element {
        Element::from_monomial(Monomial::empty())
    }

    pub fn from_monomial(m: Monomial) -> Element {
        let mut e = Element::zero(m.degree());
        e.add_term(m, Scalar::one());
        e
    }

    pub fn from_terms(degree: usize, terms: Vec<(Monomial, Scalar)>) -> Element {
        let mut e = Element::zero(degree);
        for (m, c) in terms {
            assert_eq!(m.degree(), degree, "monomial degree mismatch");
            e.add_term(m, c);
        }
        e
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        debug_assert_eq!(m.degree(), self.degree);
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let sum = old.add(&c);
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        assert_eq!(self.degree, other.degree, "degree mismatch in add");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Element {
        Element {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        if c.is_zero() {
            return Element::zero(self.degree);
        }
        let mut out = Element::zero(self.degree);
        for (m, t) in &self.terms {
            out.add_term(m.clone(), t.mul(c));
        }
        out
    }

    /// Bilinear extension of word concatenation; degrees add.
    pub fn concat(&self, other: &Element) -> Element {
        let mut out = Element::zero(self.degree + other.degree);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.concat(mb), ca.mul(cb));
            }
        }
        out
    }

    /// Shift every monomial by `eps`, coefficients unchanged.
    pub fn translate(&self, eps: &[i64]) -> Result<Element, TypmonError> {
        let mut out = Element::zero(self.degree);
        for (m, c) in &self.terms {
            out.add_term(m.translate(eps)?, c.clone());
        }
        Ok(out)
    }

    /// The normalized coefficient pairing. Both elements must be in normal
    /// form; normal-form words are orthonormal for it, so this is the plain
    /// dot product of coefficient vectors.
    pub fn pair(&self, other: &Element) -> Result<Scalar, TypmonError> {
        if self.degree != other.degree {
            return Err(TypmonError::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            if let Some(d) = other.terms.get(m) {
                acc = acc.add(&c.mul(d));
            }
        }
        Ok(acc)
    }

    /// The image of the basis word `(e, chi)` in the character-summed
    /// coordinates: `(#Sign)^{-r}` times the character sum in the symmetric
    /// case, the word itself otherwise.
    pub fn from_echi(e: &[i64], chi: &[Sign], cfg: &CaseConfig) -> Element {
        assert_eq!(e.len(), chi.len());
        let r = e.len();
        match cfg.case() {
            Case::S => {
                let mut out = Element::zero(r);
                let norm = Dyadic::new(BigInt::from(1), r as i64); // 2^{-r}
                for mask in 0u32..(1 << r) {
                    // mask bit i set: character component i is the sign character
                    let mut sgn = 1i64;
                    let mut letters = Vec::with_capacity(r);
                    for i in 0..r {
                        let si = if mask >> i & 1 == 1 {
                            Sign::Minus
                        } else {
                            Sign::Plus
                        };
                        if si == Sign::Minus {
                            sgn *= chi[i].as_i8() as i64;
                        }
                        letters.push(Letter::new(e[i], si));
                    }
                    let c = Scalar::term(Dyadic::from_int(sgn).mul(&norm), 0);
                    out.add_term(Monomial(letters), c);
                }
                out
            }
            _ => {
                let letters = e.iter().map(|&a| Letter::plain(a)).collect();
                Element::from_monomial(Monomial(letters))
            }
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*{m}")?;
        }
        Ok(())
    }
}

/// A K-orbit on the matrix space: multiplicities of the self-dual Jordan
/// valuations together with unit-determinant signs. Entries with zero
/// multiplicity are not stored (their sign is `+` by convention).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct OrbitType {
    entries: BTreeMap<i64, (u32, Sign)>,
}

impl OrbitType {
    pub fn new() -> OrbitType {
        OrbitType::default()
    }

    pub fn from_entries(entries: &[(i64, u32, Sign)]) -> OrbitType {
        let mut o = OrbitType::new();
        for &(i, m, s) in entries {
            o.set(i, m, s);
        }
        o
    }

    pub fn set(&mut self, i: i64, mult: u32, sign: Sign) {
        if mult == 0 {
            debug_assert_eq!(sign, Sign::Plus, "zero-multiplicity entry must carry +");
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, (mult, sign));
        }
    }

    pub fn e0(&self, i: i64) -> u32 {
        self.entries.get(&i).map_or(0, |(m, _)| *m)
    }

    pub fn chi0(&self, i: i64) -> Sign {
        self.entries.get(&i).map_or(Sign::Plus, |(_, s)| *s)
    }

    /// Support of the multiplicity function, ascending.
    pub fn support(&self) -> Vec<i64> {
        self.entries.keys().copied().collect()
    }

    pub fn entries(&self) -> impl DoubleEndedIterator<Item = (i64, u32, Sign)> + '_ {
        self.entries.iter().map(|(i, (m, s))| (*i, *m, *s))
    }

    /// Total multiplicity: the rank of any lattice in the orbit.
    pub fn rank(&self) -> u32 {
        self.entries.values().map(|(m, _)| m).sum()
    }

    /// The total grading `sum_i i * e0(i)`.
    pub fn weight(&self) -> i64 {
        self.entries.iter().map(|(i, (m, _))| i * (*m as i64)).sum()
    }

    /// The weakly descending word listing each valuation with its
    /// multiplicity, with the block sign on the first letter of each block.
    pub fn descending_word(&self) -> (Vec<i64>, Vec<Sign>) {
        let mut e = Vec::new();
        let mut chi = Vec::new();
        for (&i, &(m, s)) in self.entries.iter().rev() {
            for k in 0..m {
                e.push(i);
                chi.push(if k == 0 { s } else { Sign::Plus });
            }
        }
        (e, chi)
    }
}

impl fmt::Display for OrbitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for (i, (m, s)) in &self.entries {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{i}:{m}{s}")?;
        }
        write!(f, "}}")
    }
}

/// A finite scalar-weighted sum of orbit types: a spherical function.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OrbitCombination {
    terms: BTreeMap<OrbitType, Scalar>,
}

impl OrbitCombination {
    pub fn zero() -> OrbitCombination {
        OrbitCombination::default()
    }

    pub fn from_orbit(o: OrbitType) -> OrbitCombination {
        let mut c = OrbitCombination::zero();
        c.add_term(o, Scalar::one());
        c
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, o: OrbitType, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&o) {
            None => {
                self.terms.insert(o, c);
            }
            Some(old) => {
                let sum = old.add(&c);
                if !sum.is_zero() {
                    self.terms.insert(o, sum);
                }
            }
        }
    }

    pub fn add(&self, other: &OrbitCombination) -> OrbitCombination {
        let mut out = self.clone();
        for (o, c) in &other.terms {
            out.add_term(o.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &OrbitCombination) -> OrbitCombination {
        let mut out = self.clone();
        for (o, c) in &other.terms {
            out.add_term(o.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> OrbitCombination {
        let mut out = OrbitCombination::zero();
        for (o, t) in &self.terms {
            out.add_term(o.clone(), t.mul(c));
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OrbitType, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, o: &OrbitType) -> Scalar {
        self.terms.get(o).cloned().unwrap_or_else(Scalar::zero)
    }
}

impl fmt::Display for OrbitCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (o, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*{o}")?;
        }
        Ok(())
    }
}

/// The orbit of a weakly descending word: multiplicities of each value and
/// block-products of the character components.
pub fn orbit_of_descending(m: &Monomial) -> Result<OrbitType, TypmonError> {
    if !m.is_descending() {
        return Err(TypmonError::NotDescending);
    }
    let mut o = OrbitType::new();
    let mut iter = m.letters().iter().peekable();
    while let Some(first) = iter.next() {
        let a = first.a;
        let mut mult = 1u32;
        let mut sign = first.s;
        while iter.peek().is_some_and(|l| l.a == a) {
            let l = iter.next().unwrap();
            mult += 1;
            sign = sign * l.s;
        }
        o.set(a, mult, sign);
    }
    Ok(o)
}

/// The indicator function of a K-orbit expressed in normal-form
/// coordinates. Inverse to [`delta_to_orbit`] on the spans they connect.
pub fn orbit_to_delta(o: &OrbitType, cfg: &CaseConfig) -> Element {
    let (e, _) = o.descending_word();
    let r = e.len();
    match cfg.case() {
        Case::S => {
            let blocks: Vec<(i64, u32, Sign)> = o.entries().rev().collect();
            let nb = blocks.len();
            let mut out = Element::zero(r);
            let norm = Dyadic::new(BigInt::from(1), r as i64); // 2^{-r}
            for mask in 0u32..(1 << nb) {
                let mut sgn = 1i64;
                let mut letters = Vec::with_capacity(r);
                for (b, &(val, mult, chi)) in blocks.iter().enumerate() {
                    let sb = if mask >> b & 1 == 1 {
                        Sign::Minus
                    } else {
                        Sign::Plus
                    };
                    if sb == Sign::Minus {
                        sgn *= chi.as_i8() as i64;
                    }
                    for _ in 0..mult {
                        letters.push(Letter::new(val, sb));
                    }
                }
                out.add_term(
                    Monomial(letters),
                    Scalar::term(Dyadic::from_int(sgn).mul(&norm), 0),
                );
            }
            out
        }
        _ => Element::from_monomial(Monomial(e.iter().map(|&a| Letter::plain(a)).collect())),
    }
}

/// The orbit-coordinates view of a normal-form element: each normal word
/// maps to the character sum over the block signs of its orbit family.
pub fn delta_to_orbit(x: &Element, cfg: &CaseConfig) -> Result<OrbitCombination, TypmonError> {
    let mut out = OrbitCombination::zero();
    for (m, c) in x.terms() {
        if !m.is_normal_word() {
            return Err(TypmonError::NotDescending);
        }
        match cfg.case() {
            Case::S => {
                let blocks = m.blocks()?;
                let nb = blocks.len();
                let r = m.degree();
                // (#Sign)^{r - #blocks} copies of each compatible character
                // assignment.
                let factor = Dyadic::new(BigInt::from(1) << (r - nb) as u64, 0);
                for mask in 0u32..(1 << nb) {
                    let mut sgn = 1i64;
                    let mut entries = Vec::with_capacity(nb);
                    for (b, &(val, mult, s)) in blocks.iter().enumerate() {
                        let pi = if mask >> b & 1 == 1 {
                            Sign::Minus
                        } else {
                            Sign::Plus
                        };
                        if s == Sign::Minus {
                            sgn *= pi.as_i8() as i64;
                        }
                        entries.push((val, mult, pi));
                    }
                    let coeff = c.scale(&Dyadic::from_int(sgn).mul(&factor));
                    out.add_term(OrbitType::from_entries(&entries), coeff);
                }
            }
            _ => {
                out.add_term(orbit_of_descending(m)?, c.clone());
            }
        }
    }
    Ok(out)
}

// ---- JSON wire format ----

/// Wire form of an [`Element`] together with its case configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementJson {
    pub case: Case,
    pub epsilon: i8,
    pub r: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub monomial: Vec<(i64, Sign)>,
    pub coeff: String,
}

pub fn element_to_json(cfg: &CaseConfig, x: &Element) -> ElementJson {
    ElementJson {
        case: cfg.case(),
        epsilon: cfg.epsilon().as_i8(),
        r: x.degree(),
        terms: x
            .terms()
            .map(|(m, c)| TermJson {
                monomial: m.letters().iter().map(|l| (l.a, l.s)).collect(),
                coeff: c.to_string(),
            })
            .collect(),
    }
}

pub fn element_from_json(json: &ElementJson) -> Result<(CaseConfig, Element), CoeffError> {
    let cfg = CaseConfig::new(json.case, Sign::from_i8(json.epsilon))?;
    let mut x = Element::zero(json.r);
    for t in &json.terms {
        if t.monomial.len() != json.r {
            return Err(CoeffError::Parse(format!(
                "monomial of length {} in element of degree {}",
                t.monomial.len(),
                json.r
            )));
        }
        let m = Monomial::from_pairs(&t.monomial);
        let c: Scalar = t.coeff.parse()?;
        x.add_term(m, c);
    }
    Ok((cfg, x))
}
