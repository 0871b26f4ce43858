//! Sparse polynomials in the formal variables `m` and `n`.
//!
//! [`IntPolynomial`] carries integer coefficients (the `p_i` of a recurrence
//! experiment); [`ExactPolynomial`] carries [`ExactScalar`] coefficients and
//! holds exponents and symbolic orbit coordinates.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{parse_decimal_rational, ExactScalar};
use crate::lattice;

/// Largest `k` accepted by [`binomial_poly`].
pub const MAX_BINOMIAL_K: u32 = 12;

/// The monomial `m^m · n^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub m: u32,
    pub n: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { m: 0, n: 0 };

    pub fn new(m: u32, n: u32) -> Self {
        Self { m, n }
    }

    pub fn degree(self) -> u32 {
        self.m + self.n
    }

    pub fn is_constant(self) -> bool {
        self == Self::ONE
    }

    pub fn eval(self, m: &BigInt, n: &BigInt) -> BigInt {
        num_traits::pow(m.clone(), self.m as usize) * num_traits::pow(n.clone(), self.n as usize)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |f: &mut fmt::Formatter<'_>, v: &str, e: u32| match e {
            0 => Ok(()),
            1 => write!(f, "{v}"),
            _ => write!(f, "{v}^{e}"),
        };
        if self.is_constant() {
            return write!(f, "1");
        }
        part(f, "m", self.m)?;
        if self.m > 0 && self.n > 0 {
            write!(f, "*")?;
        }
        part(f, "n", self.n)
    }
}

/// Coefficient rings usable in [`Polynomial`].
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero_coeff() -> Self;
    fn is_zero_coeff(&self) -> bool;
    fn add_coeff(&mut self, other: &Self);
    fn negate(&self) -> Self;
}

impl Coefficient for BigInt {
    fn zero_coeff() -> Self {
        Zero::zero()
    }
    fn is_zero_coeff(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_coeff(&mut self, other: &Self) {
        *self += other;
    }
    fn negate(&self) -> Self {
        -self
    }
}

impl Coefficient for ExactScalar {
    fn zero_coeff() -> Self {
        ExactScalar::zero()
    }
    fn is_zero_coeff(&self) -> bool {
        ExactScalar::is_zero(self)
    }
    fn add_coeff(&mut self, other: &Self) {
        *self += other;
    }
    fn negate(&self) -> Self {
        -self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial<C> {
    terms: BTreeMap<Monomial, C>,
}

pub type IntPolynomial = Polynomial<BigInt>;
pub type ExactPolynomial = Polynomial<ExactScalar>;

impl<C: Coefficient> Default for Polynomial<C> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<C: Coefficient> Polynomial<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(mono: Monomial, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(mono, &c);
        p
    }

    pub fn constant(c: C) -> Self {
        Self::term(Monomial::ONE, c)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero();
        for (mono, c) in terms {
            p.add_term(mono, &c);
        }
        p
    }

    pub fn add_term(&mut self, mono: Monomial, c: &C) {
        if c.is_zero_coeff() {
            return;
        }
        let remove = match self.terms.get_mut(&mono) {
            Some(v) => {
                v.add_coeff(c);
                v.is_zero_coeff()
            }
            None => {
                self.terms.insert(mono, c.clone());
                false
            }
        };
        if remove {
            self.terms.remove(&mono);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &C)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, mono: Monomial) -> C {
        self.terms.get(&mono).cloned().unwrap_or_else(C::zero_coeff)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(Monomial::ONE)
    }

    pub fn non_constant_terms(&self) -> impl Iterator<Item = (Monomial, &C)> {
        self.terms().filter(|(k, _)| !k.is_constant())
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

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k.degree()).max().unwrap_or(0)
    }

    pub fn degree_m(&self) -> u32 {
        self.terms.keys().map(|k| k.m).max().unwrap_or(0)
    }

    pub fn degree_n(&self) -> u32 {
        self.terms.keys().map(|k| k.n).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(*k, v);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, v)| (*k, v.negate())).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.is_constant())
    }
}

impl<C: Coefficient> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest degree first
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|t| std::cmp::Reverse((t.0.degree(), t.0.m)));
        for (i, (mono, c)) in terms.into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if mono.is_constant() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{mono}")?;
            }
        }
        Ok(())
    }
}

impl IntPolynomial {
    pub fn var_m() -> Self {
        Self::term(Monomial::new(1, 0), BigInt::one())
    }

    pub fn var_n() -> Self {
        Self::term(Monomial::new(0, 1), BigInt::one())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_terms(self.terms().map(|(k, v)| (k, v * c)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                out.add_term(Monomial::new(a.m + b.m, a.n + b.n), &(x * y));
            }
        }
        out
    }

    pub fn eval(&self, m: &BigInt, n: &BigInt) -> BigInt {
        self.terms().map(|(k, c)| c * k.eval(m, n)).sum()
    }

    pub fn eval_i64(&self, m: i64, n: i64) -> BigInt {
        self.eval(&BigInt::from(m), &BigInt::from(n))
    }

    pub fn to_exact(&self) -> ExactPolynomial {
        ExactPolynomial::from_terms(
            self.terms().map(|(k, c)| (k, ExactScalar::from_integer(c.clone()))),
        )
    }

    /// Parses a literal such as `n^2 + 3n` or `m + n^4`; coefficients must be integers.
    pub fn parse(text: &str) -> Result<Self> {
        let terms = parse_terms(text)?;
        let mut out = Self::zero();
        for (mono, q) in terms {
            if !q.is_integer() {
                return Err(Error::Parse(format!("non-integer coefficient {q} in `{text}`")));
            }
            out.add_term(mono, &q.to_integer());
        }
        Ok(out)
    }

    /// Parses a comma-separated list of polynomial literals.
    pub fn parse_list(text: &str) -> Result<Vec<Self>> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::Parse(format!("empty polynomial in list `{text}`")));
        }
        parts.into_iter().map(Self::parse).collect()
    }

    /// The exponent `m + p(n)` of a recurrence experiment.
    pub fn shifted_exponent(&self) -> ExactPolynomial {
        Self::var_m().add(self).to_exact()
    }
}

impl ExactPolynomial {
    pub fn var_m() -> Self {
        Self::term(Monomial::new(1, 0), ExactScalar::from_integer(1))
    }

    pub fn var_n() -> Self {
        Self::term(Monomial::new(0, 1), ExactScalar::from_integer(1))
    }

    pub fn rational_constant(q: BigRational) -> Self {
        Self::constant(ExactScalar::from_rational(q))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_terms(self.terms().map(|(k, v)| (k, v.scale(c))))
    }

    /// `self · s`, defined when `s` or every coefficient of `self` is rational.
    pub fn mul_scalar(&self, s: &ExactScalar) -> Result<Self> {
        let mut out = Self::zero();
        for (k, v) in self.terms() {
            out.add_term(k, &v.checked_mul(s)?);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                out.add_term(Monomial::new(a.m + b.m, a.n + b.n), &x.checked_mul(y)?);
            }
        }
        Ok(out)
    }

    pub fn has_rational_coefficients(&self) -> bool {
        self.terms().all(|(_, c)| c.is_rational())
    }

    /// Exact value at an integer point.
    pub fn eval(&self, m: &BigInt, n: &BigInt) -> ExactScalar {
        let mut acc = ExactScalar::zero();
        for (k, c) in self.terms() {
            acc += &c.scale_int(&k.eval(m, n));
        }
        acc
    }

    pub fn eval_i64(&self, m: i64, n: i64) -> ExactScalar {
        self.eval(&BigInt::from(m), &BigInt::from(n))
    }

    /// Rational value at an integer point; `None` if some coefficient is irrational.
    pub fn eval_rational(&self, m: &BigInt, n: &BigInt) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for (k, c) in self.terms() {
            if !c.is_rational() {
                return None;
            }
            acc += c.rational_part() * BigRational::from_integer(k.eval(m, n));
        }
        Some(acc)
    }

    /// Whether the polynomial maps `Z²` into `Z`.
    ///
    /// A polynomial of degree `a` in `m` and `b` in `n` is integer-valued iff
    /// it takes integer values on the box `[0,a] × [0,b]`.
    pub fn is_integer_valued(&self) -> bool {
        if !self.has_rational_coefficients() {
            return false;
        }
        (0..=self.degree_m() as i64).all(|a| {
            (0..=self.degree_n() as i64).all(|b| {
                self.eval_rational(&BigInt::from(a), &BigInt::from(b))
                    .is_some_and(|v| v.is_integer())
            })
        })
    }

    /// Integer coefficients throughout.
    pub fn to_int(&self) -> Option<IntPolynomial> {
        let mut out = IntPolynomial::zero();
        for (k, c) in self.terms() {
            if !c.is_rational() || !c.rational_part().is_integer() {
                return None;
            }
            out.add_term(k, &c.rational_part().to_integer());
        }
        Some(out)
    }

    /// `self(a + r·m, b + s·n)`.
    pub fn substitute_affine(&self, a: &BigInt, r: &BigInt, b: &BigInt, s: &BigInt) -> Self {
        let lin_m = IntPolynomial::from_terms([
            (Monomial::ONE, a.clone()),
            (Monomial::new(1, 0), r.clone()),
        ]);
        let lin_n = IntPolynomial::from_terms([
            (Monomial::ONE, b.clone()),
            (Monomial::new(0, 1), s.clone()),
        ]);
        let mut pow_m = vec![IntPolynomial::constant(BigInt::one())];
        let mut pow_n = vec![IntPolynomial::constant(BigInt::one())];
        for _ in 0..self.degree_m() {
            pow_m.push(pow_m.last().unwrap().mul(&lin_m));
        }
        for _ in 0..self.degree_n() {
            pow_n.push(pow_n.last().unwrap().mul(&lin_n));
        }
        let mut out = Self::zero();
        for (k, c) in self.terms() {
            let basis = pow_m[k.m as usize].mul(&pow_n[k.n as usize]);
            for (mono, w) in basis.terms() {
                out.add_term(mono, &c.scale_int(w));
            }
        }
        out
    }

    /// Parses a literal with rational coefficients, e.g. `m + n^2` or `1/2 n^2 - 1/2 n`.
    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self::from_terms(
            parse_terms(text)?.into_iter().map(|(k, q)| (k, ExactScalar::from_rational(q))),
        ))
    }
}

/// Expansion of `e·(e−1)⋯(e−k+1)/k!`.
///
/// Evaluating the result at an integer point gives the generalized binomial
/// coefficient of `e(m,n)` over `k`, negative arguments included.
pub fn binomial_poly(e: &ExactPolynomial, k: u32) -> Result<ExactPolynomial> {
    if k > MAX_BINOMIAL_K {
        return Err(Error::LimitExceeded(format!("binomial order {k} > {MAX_BINOMIAL_K}")));
    }
    let mut acc = ExactPolynomial::constant(ExactScalar::from_integer(1));
    let mut factorial = BigInt::one();
    for i in 0..k {
        let factor = e.sub(&ExactPolynomial::constant(ExactScalar::from_integer(i as i64)));
        acc = acc.checked_mul(&factor)?;
        factorial *= BigInt::from(i + 1);
    }
    Ok(acc.scale(&BigRational::new(BigInt::one(), factorial)))
}

/// Outcome of a rational-independence test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Independence {
    Independent,
    /// A coprime integer vector `c`, first nonzero entry positive, with
    /// `Σ c_i p_i` zero (or constant, when constants were allowed).
    Dependent(Vec<BigInt>),
}

impl Independence {
    pub fn is_independent(&self) -> bool {
        matches!(self, Independence::Independent)
    }
}

/// Decides whether some nontrivial rational combination of `ps` vanishes.
///
/// With `include_constants` the question becomes whether some combination is
/// a constant polynomial, i.e. independence from 1.
pub fn rational_independence(ps: &[IntPolynomial], include_constants: bool) -> Independence {
    let mut monos: Vec<Monomial> = ps.iter().flat_map(|p| p.terms().map(|(k, _)| k)).collect();
    monos.sort();
    monos.dedup();
    if include_constants {
        monos.retain(|k| !k.is_constant());
    }
    // rows: monomials; columns: polynomials
    let rows: Vec<Vec<BigRational>> = monos
        .iter()
        .map(|&k| ps.iter().map(|p| BigRational::from_integer(p.coeff(k))).collect())
        .collect();
    let kernel = lattice::integer_kernel(&rows, ps.len());
    match kernel.first() {
        None => Independence::Independent,
        Some(v) => Independence::Dependent(lattice::normalize_primitive(v)),
    }
}

// ---------------------------------------------------------------------------
// Literal parser: terms `[coef][*]m^a[*]n^b` joined by `+` / `-`.

fn parse_terms(text: &str) -> Result<Vec<(Monomial, BigRational)>> {
    let bad = |what: &str| Error::Parse(format!("{what} in polynomial `{text}`"));
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(bad("empty literal"));
    }
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let mut sign = BigRational::one();
        match chars[i] {
            '+' => i += 1,
            '-' => {
                sign = -sign;
                i += 1;
            }
            _ if !out.is_empty() => return Err(bad("expected `+` or `-`")),
            _ => {}
        }
        let mut coef = BigRational::one();
        let mut mono = Monomial::ONE;
        let mut saw = false;
        // coefficient
        if i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            coef = parse_decimal_rational(&lit).ok_or_else(|| bad("bad number"))?;
            if i < chars.len() && chars[i] == '/' {
                i += 1;
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().collect();
                let den: BigInt = lit.parse().map_err(|_| bad("bad denominator"))?;
                if den.is_zero() {
                    return Err(bad("zero denominator"));
                }
                coef /= BigRational::from_integer(den);
            }
            saw = true;
        }
        // variables
        loop {
            if i < chars.len() && chars[i] == '*' {
                i += 1;
            }
            if i >= chars.len() || !(chars[i] == 'm' || chars[i] == 'n') {
                break;
            }
            let var = chars[i];
            i += 1;
            let mut exp = 1u32;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().collect();
                exp = lit.parse().map_err(|_| bad("bad exponent"))?;
            }
            if var == 'm' {
                mono.m += exp;
            } else {
                mono.n += exp;
            }
            saw = true;
        }
        if !saw {
            return Err(bad("expected a term"));
        }
        if i < chars.len() && !matches!(chars[i], '+' | '-') {
            return Err(bad(&format!("unexpected `{}`", chars[i])));
        }
        out.push((mono, coef * sign));
    }
    Ok(out)
}

/// Integer binomial `C(x, k)` for any integer `x`, via the falling factorial.
pub fn int_binomial(x: &BigInt, k: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= x - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    debug_assert!(num.is_multiple_of(&den));
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn parse_literals() {
        let p = IntPolynomial::parse("n^2 + 3n").unwrap();
        assert_eq!(p.coeff(Monomial::new(0, 2)), BigInt::from(1));
        assert_eq!(p.coeff(Monomial::new(0, 1)), BigInt::from(3));
        let p = IntPolynomial::parse("m + n^4").unwrap();
        assert_eq!(p.len(), 2);
        let p = IntPolynomial::parse("-2mn^2 + 5 - m*n").unwrap();
        assert_eq!(p.coeff(Monomial::new(1, 2)), BigInt::from(-2));
        assert_eq!(p.coeff(Monomial::new(1, 1)), BigInt::from(-1));
        assert_eq!(p.constant_term(), BigInt::from(5));
        assert!(IntPolynomial::parse("1/2 n").is_err());
        assert!(IntPolynomial::parse("n + x").is_err());
        assert!(IntPolynomial::parse("").is_err());
        let e = ExactPolynomial::parse("1/2 n^2 - 1/2 n").unwrap();
        assert!(e.is_integer_valued());
        assert!(!ExactPolynomial::parse("1/2 n").unwrap().is_integer_valued());
    }

    #[test]
    fn binomial_examples() {
        let n = ExactPolynomial::var_n();
        let got = binomial_poly(&n, 2).unwrap();
        let want = ExactPolynomial::parse("1/2 n^2 - 1/2 n").unwrap();
        assert_eq!(got, want);

        let e = ExactPolynomial::parse("m + n^2").unwrap();
        assert_eq!(binomial_poly(&e, 1).unwrap(), e);

        // (m+n)(m+n-1)/2 expanded independently
        let e = ExactPolynomial::parse("m + n").unwrap();
        let want = ExactPolynomial::parse("1/2 m^2 + mn + 1/2 n^2 - 1/2 m - 1/2 n").unwrap();
        assert_eq!(binomial_poly(&e, 2).unwrap(), want);

        assert!(matches!(binomial_poly(&n, 13), Err(Error::LimitExceeded(_))));
    }

    #[test]
    fn independence_examples() {
        let ps = IntPolynomial::parse_list("n, n^2").unwrap();
        assert_eq!(rational_independence(&ps, true), Independence::Independent);
        let ps = IntPolynomial::parse_list("n, 2n").unwrap();
        assert_eq!(rational_independence(&ps, false), Independence::Dependent(ints(&[2, -1])));
        let ps = IntPolynomial::parse_list("n^2+n, n^2, n").unwrap();
        assert_eq!(rational_independence(&ps, false), Independence::Dependent(ints(&[1, -1, -1])));
        // n + 1 and n are dependent modulo constants but not otherwise
        let ps = IntPolynomial::parse_list("n + 1, n").unwrap();
        assert!(rational_independence(&ps, false).is_independent());
        assert_eq!(rational_independence(&ps, true), Independence::Dependent(ints(&[1, -1])));
    }

    #[test]
    fn substitution_matches_evaluation() {
        let e = ExactPolynomial::parse("m + 1/2 n^2 - 1/2 n + 3").unwrap();
        let (a, r, b, s) = (BigInt::from(2), BigInt::from(3), BigInt::from(-1), BigInt::from(4));
        let sub = e.substitute_affine(&a, &r, &b, &s);
        for (m, n) in [(0i64, 0i64), (1, 5), (-3, 2), (7, -7)] {
            let mm = &a + &r * m;
            let nn = &b + &s * n;
            assert_eq!(sub.eval_i64(m, n), e.eval(&mm, &nn));
        }
    }

    fn arb_int_poly() -> impl Strategy<Value = IntPolynomial> {
        proptest::collection::vec((0u32..3, 0u32..3, -4i64..5), 1..5).prop_map(|ts| {
            IntPolynomial::from_terms(ts.into_iter().map(|(a, b, c)| (Monomial::new(a, b), BigInt::from(c))))
        })
    }

    proptest! {
        #[test]
        fn binomial_poly_matches_integer_binomial(
            p in arb_int_poly(), k in 0u32..6,
            pts in proptest::collection::vec((-40i64..40, -40i64..40), 200)
        ) {
            let bp = binomial_poly(&p.to_exact(), k).unwrap();
            for (m, n) in pts {
                let x = p.eval_i64(m, n);
                let got = bp.eval_i64(m, n);
                prop_assert_eq!(got, ExactScalar::from_integer(int_binomial(&x, k)));
            }
        }

        #[test]
        fn independence_invariant_under_permutation_and_scaling(
            ps in proptest::collection::vec(arb_int_poly(), 1..4),
            scale in 1i64..4, neg in any::<bool>(), consts in any::<bool>()
        ) {
            let v = rational_independence(&ps, consts);
            let mut rev: Vec<_> = ps.iter().rev().cloned().collect();
            let s = BigInt::from(if neg { -scale } else { scale });
            rev[0] = rev[0].scale(&s);
            let w = rational_independence(&rev, consts);
            prop_assert_eq!(v.is_independent(), w.is_independent());
        }

        #[test]
        fn witnesses_substitute_to_zero(ps in proptest::collection::vec(arb_int_poly(), 1..5), consts in any::<bool>()) {
            if let Independence::Dependent(c) = rational_independence(&ps, consts) {
                prop_assert!(c.iter().any(|x| !x.is_zero()));
                let mut sum = IntPolynomial::zero();
                for (p, ci) in ps.iter().zip(&c) {
                    sum = sum.add(&p.scale(ci));
                }
                if consts {
                    prop_assert!(sum.is_constant());
                } else {
                    prop_assert!(sum.is_zero());
                }
                let first = c.iter().find(|x| !x.is_zero()).unwrap();
                prop_assert!(first.is_positive());
            }
        }
    }

    #[test]
    fn int_binomial_negative_argument() {
        assert_eq!(int_binomial(&BigInt::from(-2), 3), BigInt::from(-4));
        assert_eq!(int_binomial(&BigInt::from(5), 2), BigInt::from(10));
    }
}
