//! Exact scalar arithmetic: Laurent polynomials in one formal variable `u`
//! over dyadic rationals.
//!
//! The single variable `u` houses every root the later modules need:
//! `q = u^2` in the symmetric and alternating cases, `q0 = -u^2` in the
//! unramified Hermitian case (so `sqrt(-q0) = u` and `sqrt(q) = u` are both
//! honest monomials, and `q = q0^2 = u^4` for the Hermitian residue field).
//! Coefficients are dyadic rationals: the only denominators that ever occur
//! are powers of 2, mirroring the standing hypothesis that 2 is invertible
//! in the coefficient ring.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Errors from scalar arithmetic and parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoeffError {
    /// No exact Laurent quotient exists. Anywhere this surfaces it signals a
    /// formula transcription bug, not a recoverable condition.
    NotDivisible,
    /// Division by the zero scalar.
    DivisionByZero,
    /// Evaluation requested on a scalar with an odd `u`-power. Half powers
    /// are confined to the transform identities; the core ring is even.
    OddExponent,
    /// Text-format parse failure.
    Parse(String),
}

impl fmt::Display for CoeffError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffError::NotDivisible => write!(f, "no exact Laurent quotient exists"),
            CoeffError::DivisionByZero => write!(f, "division by zero scalar"),
            CoeffError::OddExponent => write!(f, "scalar has an odd u-exponent"),
            CoeffError::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for CoeffError {}

/// An element of `Sign`, the square-class group of the residue field.
///
/// Trivial in the Hermitian and alternating cases; `{±1}` in the symmetric
/// case.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i8(v: i8) -> Sign {
        if v >= 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// `self^k` (depends only on the parity of `k`).
    pub fn pow(self, k: i64) -> Sign {
        if k % 2 == 0 {
            Sign::Plus
        } else {
            self
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}

impl FromStr for Sign {
    type Err = CoeffError;
    fn from_str(s: &str) -> Result<Sign, CoeffError> {
        match s.trim() {
            "+" | "+1" | "1" => Ok(Sign::Plus),
            "-" | "-1" => Ok(Sign::Minus),
            other => Err(CoeffError::Parse(format!("invalid sign `{other}`"))),
        }
    }
}

/// The three families of matrix spaces.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub enum Case {
    /// Unramified Hermitian.
    #[serde(rename = "uH")]
    UH,
    /// Symmetric (odd residue characteristic).
    #[serde(rename = "S")]
    S,
    /// Alternating.
    #[serde(rename = "A")]
    A,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::UH => write!(f, "uH"),
            Case::S => write!(f, "S"),
            Case::A => write!(f, "A"),
        }
    }
}

impl FromStr for Case {
    type Err = CoeffError;
    fn from_str(s: &str) -> Result<Case, CoeffError> {
        match s {
            "uH" | "uh" | "UH" => Ok(Case::UH),
            "S" | "s" => Ok(Case::S),
            "A" | "a" => Ok(Case::A),
            other => Err(CoeffError::Parse(format!("invalid case `{other}`"))),
        }
    }
}

/// A case tag together with the sign of -1.
///
/// `epsilon` is a runtime parameter, never a polynomial: it depends on
/// `q mod 4`, so symbolic symmetric-case computations run twice, once per
/// value. For the Hermitian and alternating cases `Sign` is trivial and
/// `epsilon` is forced to `+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CaseConfig {
    case: Case,
    epsilon: Sign,
}

impl CaseConfig {
    pub fn uh() -> CaseConfig {
        CaseConfig {
            case: Case::UH,
            epsilon: Sign::Plus,
        }
    }

    pub fn s(epsilon: Sign) -> CaseConfig {
        CaseConfig {
            case: Case::S,
            epsilon,
        }
    }

    pub fn a() -> CaseConfig {
        CaseConfig {
            case: Case::A,
            epsilon: Sign::Plus,
        }
    }

    pub fn new(case: Case, epsilon: Sign) -> Result<CaseConfig, CoeffError> {
        if case != Case::S && epsilon == Sign::Minus {
            return Err(CoeffError::Parse(format!(
                "epsilon must be + for case {case}"
            )));
        }
        Ok(CaseConfig { case, epsilon })
    }

    pub fn case(&self) -> Case {
        self.case
    }

    pub fn epsilon(&self) -> Sign {
        self.epsilon
    }

    /// 2 in the alternating case, 1 otherwise.
    pub fn gamma(&self) -> i64 {
        match self.case {
            Case::A => 2,
            _ => 1,
        }
    }

    /// The residue cardinality `q` of `F` as a scalar: `u^2` for the
    /// symmetric and alternating cases, `u^4 = q0^2` in the Hermitian case.
    pub fn q(&self) -> Scalar {
        match self.case {
            Case::UH => Scalar::u_pow(4),
            _ => Scalar::u_pow(2),
        }
    }

    /// `-q0 = u^2` (Hermitian case only by convention; the value is the
    /// same monomial in every case).
    pub fn minus_q0(&self) -> Scalar {
        Scalar::u_pow(2)
    }

    /// `epsilon` as the constant scalar `+1` or `-1`.
    pub fn epsilon_scalar(&self) -> Scalar {
        Scalar::from_sign(self.epsilon)
    }
}

impl fmt::Display for CaseConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.case {
            Case::S => write!(f, "S(eps={})", self.epsilon),
            c => write!(f, "{c}"),
        }
    }
}

/// A dyadic rational in canonical form: `num / 2^exp2` with `num` odd or
/// zero, and `exp2 = 0` for zero. `exp2` may be negative (even integers
/// store their 2-power in the exponent).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp2: i64,
}

impl Dyadic {
    pub fn zero() -> Dyadic {
        Dyadic {
            num: BigInt::zero(),
            exp2: 0,
        }
    }

    pub fn one() -> Dyadic {
        Dyadic {
            num: BigInt::one(),
            exp2: 0,
        }
    }

    /// `num / 2^exp2`, normalized so the stored numerator is odd or zero.
    pub fn new(num: BigInt, exp2: i64) -> Dyadic {
        if num.is_zero() {
            return Dyadic::zero();
        }
        let tz = num.trailing_zeros().expect("nonzero") as i64;
        Dyadic {
            num: num >> tz,
            exp2: exp2 - tz,
        }
    }

    pub fn from_int(n: i64) -> Dyadic {
        Dyadic::new(BigInt::from(n), 0)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exp2 == 0 && self.num.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent2(&self) -> i64 {
        self.exp2
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // Common denominator 2^max(exp2).
        let e = self.exp2.max(other.exp2);
        let a = &self.num << (e - self.exp2) as u64;
        let b = &other.num << (e - other.exp2) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            num: -&self.num,
            exp2: self.exp2,
        }
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        // Odd * odd stays odd: already canonical.
        Dyadic {
            num: &self.num * &other.num,
            exp2: self.exp2 + other.exp2,
        }
    }

    /// Exact quotient, if it exists in the dyadic ring (the divisor's odd
    /// part must divide the dividend's).
    pub fn exact_div(&self, other: &Dyadic) -> Result<Dyadic, CoeffError> {
        if other.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Dyadic::zero());
        }
        let (q, r) = num_integer::Integer::div_rem(&self.num, &other.num);
        if !r.is_zero() {
            return Err(CoeffError::NotDivisible);
        }
        Ok(Dyadic {
            num: q,
            exp2: self.exp2 - other.exp2,
        })
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp2 >= 0 {
            BigRational::new(self.num.clone(), BigInt::one() << self.exp2 as u64)
        } else {
            BigRational::from(self.num.clone() << (-self.exp2) as u64)
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp2 > 0 {
            write!(f, "{}/{}", self.num, BigInt::one() << self.exp2 as u64)
        } else {
            write!(f, "{}", &self.num << (-self.exp2) as u64)
        }
    }
}

impl FromStr for Dyadic {
    type Err = CoeffError;
    fn from_str(s: &str) -> Result<Dyadic, CoeffError> {
        let s = s.trim();
        let (num_str, den_str) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let num: BigInt = num_str
            .parse()
            .map_err(|_| CoeffError::Parse(format!("bad integer `{num_str}`")))?;
        match den_str {
            None => Ok(Dyadic::new(num, 0)),
            Some(d) => {
                let den: BigInt = d
                    .parse()
                    .map_err(|_| CoeffError::Parse(format!("bad integer `{d}`")))?;
                if den <= BigInt::zero() {
                    return Err(CoeffError::Parse(format!("denominator `{d}` not positive")));
                }
                let tz = den.trailing_zeros().unwrap_or(0);
                if (&den >> tz) != BigInt::one() {
                    return Err(CoeffError::Parse(format!(
                        "denominator `{d}` is not a power of 2"
                    )));
                }
                Ok(Dyadic::new(num, tz as i64))
            }
        }
    }
}

/// A Laurent polynomial in `u` with dyadic coefficients, stored sparsely.
/// No zero coefficients are kept, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar {
    terms: BTreeMap<i64, Dyadic>,
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Scalar {
        Scalar::from_dyadic(Dyadic::one())
    }

    pub fn from_dyadic(c: Dyadic) -> Scalar {
        Scalar::term(c, 0)
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::from_dyadic(Dyadic::from_int(n))
    }

    pub fn from_sign(s: Sign) -> Scalar {
        Scalar::from_int(s.as_i8() as i64)
    }

    /// The monomial `c * u^k`.
    pub fn term(c: Dyadic, k: i64) -> Scalar {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Scalar { terms }
    }

    /// The monomial `u^k` (`k` may be negative).
    pub fn u_pow(k: i64) -> Scalar {
        Scalar::term(Dyadic::one(), k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Dyadic)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, k: i64) -> Dyadic {
        self.terms.get(&k).cloned().unwrap_or_else(Dyadic::zero)
    }

    fn insert_add(&mut self, k: i64, c: Dyadic) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&k) {
            None => {
                self.terms.insert(k, c);
            }
            Some(old) => {
                let sum = old.add(&c);
                if !sum.is_zero() {
                    self.terms.insert(k, sum);
                }
            }
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert_add(*k, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.insert_add(ka + kb, ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &Dyadic) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(k, t)| (*k, t.mul(c))).collect(),
        }
    }

    /// Multiply by `u^k`.
    pub fn shift(&self, k: i64) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn pow(&self, mut n: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    fn leading(&self) -> Option<(i64, &Dyadic)> {
        self.terms.iter().next_back().map(|(k, c)| (*k, c))
    }

    fn trailing_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Exact division in the Laurent ring: returns `c` with `b * c = a`, or
    /// `NotDivisible` when no such Laurent polynomial exists over the
    /// dyadics. Long division from the top; over an integral domain every
    /// step of an exact quotient divides exactly, so any failed step
    /// certifies non-divisibility.
    pub fn exact_div(&self, b: &Scalar) -> Result<Scalar, CoeffError> {
        if b.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Scalar::zero());
        }
        let amin = self.trailing_exp().unwrap();
        let bmin = b.trailing_exp().unwrap();
        let cmin = amin - bmin; // trailing exponent of the quotient, if it exists
        let (blead_k, blead_c) = b.leading().unwrap();
        let mut rem = self.clone();
        let mut quot = Scalar::zero();
        while let Some((la, ca)) = rem.leading() {
            let kq = la - blead_k;
            if kq < cmin {
                return Err(CoeffError::NotDivisible);
            }
            let cq = ca.exact_div(blead_c)?;
            let t = Scalar::term(cq, kq);
            rem = rem.sub(&t.mul(b));
            quot = quot.add(&t);
        }
        Ok(quot)
    }

    /// True when every `u`-exponent is even (the image of the core modules).
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|k| k % 2 == 0)
    }

    /// Substitute `u^2 -> qval` (symmetric/alternating) or `u^2 -> -q0val`
    /// (Hermitian), returning the exact rational value. Requires the scalar
    /// to lie in the even subring.
    pub fn eval_q(&self, cfg: &CaseConfig, qval: &BigRational) -> Result<BigRational, CoeffError> {
        let base = match cfg.case() {
            Case::UH => -qval.clone(),
            _ => qval.clone(),
        };
        let mut acc = BigRational::zero();
        for (k, c) in &self.terms {
            if k % 2 != 0 {
                return Err(CoeffError::OddExponent);
            }
            let half = k / 2;
            let p = rational_pow(&base, half)?;
            acc += c.to_rational() * p;
        }
        Ok(acc)
    }
}

fn rational_pow(base: &BigRational, exp: i64) -> Result<BigRational, CoeffError> {
    if exp == 0 {
        return Ok(BigRational::one());
    }
    if base.is_zero() && exp < 0 {
        return Err(CoeffError::DivisionByZero);
    }
    let p = base.pow(exp.unsigned_abs() as i32);
    if exp < 0 {
        Ok(p.recip())
    } else {
        Ok(p)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::add(self, rhs)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::sub(self, rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::mul(self, rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            let neg = c.is_negative();
            let mag = if neg { c.neg() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = mag.is_one();
            match (*k, unit_coeff) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "u")?,
                (1, false) => write!(f, "{mag}*u")?,
                (_, true) => write!(f, "u^{k}")?,
                (_, false) => write!(f, "{mag}*u^{k}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Scalar {
    type Err = CoeffError;

    /// Parses the text format `"1/2*u^-2 + 1 - u^4"`. Round-trips exactly
    /// with `Display`.
    fn from_str(s: &str) -> Result<Scalar, CoeffError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(CoeffError::Parse("empty scalar".into()));
        }
        if s == "0" {
            return Ok(Scalar::zero());
        }
        // Split on top-level +/- signs; a sign directly after '^' is an
        // exponent sign, not a separator.
        let chars: Vec<char> = s.chars().collect();
        let mut pieces: Vec<(bool, String)> = Vec::new(); // (negated, body)
        let mut cur = String::new();
        let mut cur_neg = false;
        let mut prev_non_space: Option<char> = None;
        for &ch in &chars {
            if (ch == '+' || ch == '-') && prev_non_space != Some('^') && prev_non_space.is_some() {
                pieces.push((cur_neg, std::mem::take(&mut cur)));
                cur_neg = ch == '-';
            } else if ch == '-' && prev_non_space.is_none() {
                cur_neg = true;
            } else if !ch.is_whitespace() {
                cur.push(ch);
            }
            if !ch.is_whitespace() {
                prev_non_space = Some(ch);
            }
        }
        pieces.push((cur_neg, cur));

        let mut out = Scalar::zero();
        for (negated, body) in pieces {
            if body.is_empty() {
                return Err(CoeffError::Parse("empty term".into()));
            }
            let (coeff_str, u_str) = match body.split_once('*') {
                Some((c, u)) => (Some(c), Some(u)),
                None => {
                    if body.starts_with('u') {
                        (None, Some(body.as_str()))
                    } else {
                        (Some(body.as_str()), None)
                    }
                }
            };
            let coeff = match coeff_str {
                Some(c) => c.parse::<Dyadic>()?,
                None => Dyadic::one(),
            };
            let exp = match u_str {
                None => 0,
                Some(u) => {
                    if u == "u" {
                        1
                    } else if let Some(e) = u.strip_prefix("u^") {
                        e.parse::<i64>()
                            .map_err(|_| CoeffError::Parse(format!("bad exponent `{e}`")))?
                    } else {
                        return Err(CoeffError::Parse(format!("bad term `{u}`")));
                    }
                }
            };
            let coeff = if negated { coeff.neg() } else { coeff };
            out.insert_add(exp, coeff);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    #[test]
    fn dyadic_canonical_form() {
        let d = Dyadic::new(BigInt::from(12), 2); // 12/4 = 3
        assert_eq!(d, Dyadic::from_int(3));
        assert_eq!(
            Dyadic::from_int(6).to_rational(),
            BigRational::from(BigInt::from(6))
        );
        assert!(Dyadic::new(BigInt::zero(), 0).is_zero());
    }

    #[test]
    fn dyadic_exact_div() {
        let a = Dyadic::from_int(6);
        let b = Dyadic::from_int(3);
        assert_eq!(a.exact_div(&b).unwrap(), Dyadic::from_int(2));
        assert_eq!(
            Dyadic::from_int(2).exact_div(&Dyadic::from_int(3)),
            Err(CoeffError::NotDivisible)
        );
        // Powers of two always divide.
        let half = "1/2".parse::<Dyadic>().unwrap();
        assert_eq!(Dyadic::one().exact_div(&half).unwrap(), Dyadic::from_int(2));
    }

    #[test]
    fn difference_of_squares() {
        let a = sc("1 + u^2");
        let b = sc("1 - u^2");
        assert_eq!(a.mul(&b), sc("1 - u^4"));
    }

    #[test]
    fn additive_inverse() {
        let a = sc("1/2*u^-3 + 7");
        assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn q_squared_case_s() {
        let cfg = CaseConfig::s(Sign::Minus);
        assert_eq!(cfg.q().mul(&cfg.q()), sc("u^4"));
    }

    #[test]
    fn exact_div_examples() {
        assert_eq!(
            sc("u^4 - 1").exact_div(&sc("u^2 - 1")).unwrap(),
            sc("u^2 + 1")
        );
        assert_eq!(
            sc("u^2 + 1").exact_div(&sc("u^2 - 1")),
            Err(CoeffError::NotDivisible)
        );
        // (q+1)(q-1)/(q^2-1) = 1 with q = u^2.
        let num = sc("u^2 + 1").mul(&sc("u^2 - 1"));
        assert_eq!(num.exact_div(&sc("u^4 - 1")).unwrap(), Scalar::one());
    }

    #[test]
    fn exact_div_laurent_shift() {
        let a = sc("1/2*u^-2 + 1");
        let b = sc("u^-3");
        let q = a.exact_div(&b).unwrap();
        assert_eq!(b.mul(&q), a);
    }

    #[test]
    fn eval_examples() {
        let s = CaseConfig::s(Sign::Minus);
        let v = sc("1 + u^2")
            .eval_q(&s, &BigRational::from(BigInt::from(3)))
            .unwrap();
        assert_eq!(v, BigRational::from(BigInt::from(4)));

        assert_eq!(
            sc("u").eval_q(&s, &BigRational::from(BigInt::from(3))),
            Err(CoeffError::OddExponent)
        );

        // Case uH: u^2 -> -q0val, so 1 - u^2 evaluates to 1 + q0.
        let uh = CaseConfig::uh();
        let v = sc("1 - u^2")
            .eval_q(&uh, &BigRational::from(BigInt::from(2)))
            .unwrap();
        assert_eq!(v, BigRational::from(BigInt::from(3)));
    }

    #[test]
    fn display_roundtrip() {
        for s in ["1/2*u^-2 + 1 - u^4", "-3/4*u + 2*u^3", "0", "-1", "u"] {
            let v = sc(s);
            let printed = v.to_string();
            assert_eq!(sc(&printed), v, "roundtrip through `{printed}`");
        }
    }

    #[test]
    fn config_invariants() {
        assert!(CaseConfig::new(Case::UH, Sign::Minus).is_err());
        assert_eq!(CaseConfig::a().gamma(), 2);
        assert_eq!(CaseConfig::uh().gamma(), 1);
    }
}
