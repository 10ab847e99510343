//! Exact real surds: finite sums `Σ c_k √n_k` with rational `c_k` and
//! positive integer radicands.
//!
//! Terms are kept with pairwise distinct square classes (`n_a · n_b` is never
//! a perfect square), so by linear independence of square roots of distinct
//! square classes a value is zero iff it has no terms. That makes equality
//! exact.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::{rational_to_f64, Rational, RecipError, ScalarKind};

/// Small primes used to strip square factors from radicands. Radicands that
/// keep a large square factor are still merged correctly via the pairwise
/// perfect-square test; only the printed form is less reduced.
const TRIAL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

#[derive(Clone, Debug)]
struct Term {
    radicand: BigInt,
    coef: BigRational,
}

/// An element of the real multi-quadratic extension of ℚ.
#[derive(Clone, Debug, Default)]
pub struct Surd {
    terms: Vec<Term>,
}

fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Splits `n > 0` into `(s, m)` with `n = s² m`, stripping small square factors.
fn extract_square(n: &BigInt) -> (BigInt, BigInt) {
    if let Some(r) = is_perfect_square(n) {
        return (r, BigInt::one());
    }
    let mut s = BigInt::one();
    let mut m = n.clone();
    for &p in TRIAL_PRIMES.iter() {
        let p2 = BigInt::from(p * p);
        while (&m % &p2).is_zero() {
            m /= &p2;
            s *= p;
        }
    }
    if let Some(r) = is_perfect_square(&m) {
        return (s * r, BigInt::one());
    }
    (s, m)
}

impl Surd {
    pub fn zero() -> Self {
        Surd { terms: Vec::new() }
    }

    /// `√r` for `r ≥ 0`; `None` when `r < 0`.
    pub fn sqrt_rational(r: &Rational) -> Option<Self> {
        if r.is_negative() {
            return None;
        }
        if r.is_zero() {
            return Some(Surd::zero());
        }
        // √(p/q) = √(pq)/q
        let n = r.numer() * r.denom();
        let (s, m) = extract_square(&n);
        let coef = BigRational::new(s, r.denom().clone());
        Some(Surd::term(coef, m))
    }

    /// `coef · √radicand` with `radicand ≥ 1`.
    fn term(coef: BigRational, radicand: BigInt) -> Self {
        if coef.is_zero() {
            return Surd::zero();
        }
        Surd {
            terms: alloc::vec![Term { radicand, coef }],
        }
    }

    /// Returns the value as a rational if it has no irrational part.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [t] if t.radicand.is_one() => Some(t.coef.clone()),
            _ => None,
        }
    }

    /// Number of distinct square classes in the value.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Exact square when the value is a single term `c√n` (gives `c²n`).
    pub fn square_if_monomial(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [t] => Some(&t.coef * &t.coef * BigRational::from_integer(t.radicand.clone())),
            _ => None,
        }
    }

    /// Sign of the value. Exact for monomials and for `a + b√n`; otherwise
    /// decided by the float approximation.
    pub fn signum(&self) -> Ordering {
        match self.terms.as_slice() {
            [] => Ordering::Equal,
            [t] => sign_of(&t.coef),
            [a, b] if a.radicand.is_one() || b.radicand.is_one() => {
                let (r, s) = if a.radicand.is_one() { (a, b) } else { (b, a) };
                let sr = sign_of(&r.coef);
                let ss = sign_of(&s.coef);
                if sr == ss {
                    return sr;
                }
                // compare |r.coef| with |s.coef|·√n via squares
                let lhs = &r.coef * &r.coef;
                let rhs = &s.coef * &s.coef * BigRational::from_integer(s.radicand.clone());
                match lhs.cmp(&rhs) {
                    Ordering::Greater => sr,
                    Ordering::Less => ss,
                    Ordering::Equal => Ordering::Equal,
                }
            }
            _ => {
                let v = self.approx();
                if v > 0.0 {
                    Ordering::Greater
                } else if v < 0.0 {
                    Ordering::Less
                } else {
                    Ordering::Equal
                }
            }
        }
    }

    fn approx(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let n = t.radicand.to_f64().unwrap_or(f64::INFINITY);
                rational_to_f64(&t.coef) * num_traits::Float::sqrt(n)
            })
            .sum()
    }

    fn push_term(&mut self, t: Term) {
        if t.coef.is_zero() {
            return;
        }
        for (idx, cur) in self.terms.iter_mut().enumerate() {
            if cur.radicand == t.radicand {
                cur.coef += &t.coef;
                if cur.coef.is_zero() {
                    self.terms.remove(idx);
                }
                return;
            }
            let prod = &cur.radicand * &t.radicand;
            if let Some(root) = is_perfect_square(&prod) {
                // √t.n = (root / cur.n) √cur.n
                let factor = BigRational::new(root, cur.radicand.clone());
                cur.coef += &t.coef * factor;
                if cur.coef.is_zero() {
                    self.terms.remove(idx);
                }
                return;
            }
        }
        self.terms.push(t);
        self.terms.sort_by(|a, b| a.radicand.cmp(&b.radicand));
    }
}

fn sign_of(r: &BigRational) -> Ordering {
    if r.is_positive() {
        Ordering::Greater
    } else if r.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

impl From<Rational> for Surd {
    fn from(r: Rational) -> Self {
        Surd::term(r, BigInt::one())
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).terms.is_empty()
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(mut self, rhs: Surd) -> Surd {
        for t in rhs.terms {
            self.push_term(t);
        }
        self
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        self + (-rhs)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(mut self) -> Surd {
        for t in self.terms.iter_mut() {
            t.coef = -t.coef.clone();
        }
        self
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        let mut out = Surd::zero();
        for a in &self.terms {
            for b in &rhs.terms {
                // √a √b = g √((a/g)(b/g)), g = gcd(a, b)
                let g = a.radicand.gcd(&b.radicand);
                let rest = (&a.radicand / &g) * (&b.radicand / &g);
                let (s, m) = extract_square(&rest);
                let coef = &a.coef * &b.coef * BigRational::from_integer(g * s);
                out.push_term(Term { radicand: m, coef });
            }
        }
        out
    }
}

impl crate::scalar::Scalar for Surd {
    const KIND: ScalarKind = ScalarKind::Surd;
    type Sqrt = Surd;

    fn zero() -> Self {
        Surd::zero()
    }
    fn one() -> Self {
        Surd::from(<BigRational as One>::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_i64(v: i64) -> Self {
        Surd::from(BigRational::from_integer(BigInt::from(v)))
    }
    fn from_rational(r: &Rational) -> Self {
        Surd::from(r.clone())
    }
    fn to_f64(&self) -> f64 {
        self.approx()
    }
    fn try_recip(&self) -> Result<Self, RecipError> {
        match self.terms.as_slice() {
            [] => Err(RecipError::Zero),
            [t] => {
                // 1/(c√n) = √n / (c n)
                let denom = &t.coef * BigRational::from_integer(t.radicand.clone());
                Ok(Surd::term(denom.recip(), t.radicand.clone()))
            }
            [a, b] if a.radicand.is_one() || b.radicand.is_one() => {
                // 1/(r + s√n) = (r − s√n) / (r² − s² n)
                let (r, s) = if a.radicand.is_one() { (a, b) } else { (b, a) };
                let norm = &r.coef * &r.coef
                    - &s.coef * &s.coef * BigRational::from_integer(s.radicand.clone());
                let inv = norm.recip();
                let mut out = Surd::term(&r.coef * &inv, BigInt::one());
                out.push_term(Term {
                    radicand: s.radicand.clone(),
                    coef: -(&s.coef * &inv),
                });
                Ok(out)
            }
            _ => Err(RecipError::Unsupported),
        }
    }
    fn sqrt(&self) -> Option<Surd> {
        self.as_rational().and_then(|r| Surd::sqrt_rational(&r))
    }
}

impl fmt::Display for Surd {
    /// Terms as `p/q` or `p/q*sqrt(n)`, joined by ` + ` / ` - `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            let neg = t.coef.is_negative();
            let mag = t.coef.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if t.radicand.is_one() {
                write!(f, "{}", mag)?;
            } else {
                write!(f, "{}*sqrt({})", mag, t.radicand)?;
            }
        }
        Ok(())
    }
}

/// Parse failure for the textual surd form.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid surd literal: {0}")]
pub struct ParseSurdError(pub String);

impl FromStr for Surd {
    type Err = ParseSurdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseSurdError(String::from(s));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        // split into signed chunks at top-level +/-
        let mut chunks: Vec<(bool, &str)> = Vec::new();
        let bytes = compact.as_bytes();
        let mut start = 0;
        let mut neg = false;
        let mut depth = 0i32;
        for (i, &b) in bytes.iter().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'+' | b'-' if depth == 0 && i > 0 && bytes[i - 1] != b'*' => {
                    chunks.push((neg, &compact[start..i]));
                    neg = b == b'-';
                    start = i + 1;
                }
                b'-' if i == 0 => {
                    neg = true;
                    start = 1;
                }
                _ => {}
            }
        }
        chunks.push((neg, &compact[start..]));

        let mut out = Surd::zero();
        for (neg, chunk) in chunks {
            if chunk.is_empty() {
                return Err(bad());
            }
            let (coef_str, rad) = match chunk.find("sqrt(") {
                Some(pos) => {
                    let inner = chunk[pos + 5..].strip_suffix(')').ok_or_else(bad)?;
                    let rad = BigInt::from_str(inner).map_err(|_| bad())?;
                    if !rad.is_positive() {
                        return Err(bad());
                    }
                    let head = &chunk[..pos];
                    let head = head.strip_suffix('*').unwrap_or(head);
                    (if head.is_empty() { "1" } else { head }, rad)
                }
                None => (chunk, BigInt::one()),
            };
            let coef = BigRational::from_str(coef_str).map_err(|_| bad())?;
            let coef = if neg { -coef } else { coef };
            let (s, m) = extract_square(&rad);
            out.push_term(Term {
                radicand: m,
                coef: coef * BigRational::from_integer(s),
            });
        }
        Ok(out)
    }
}
