//! Exact arithmetic over `Q + Q·g_1 + … + Q·g_k` for a registry of formal
//! irrational generators, and the high-precision numeric path used to turn
//! exact torus coordinates into phases.
//!
//! Generators are assumed rationally independent of each other and of 1.
//! Nothing here checks that; the registry only records the recipe each value
//! was produced from.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of decimal digits carried by the numeric path.
pub const DEFAULT_PRECISION_DIGITS: u32 = 64;

/// Guard bits added on top of the requested decimal precision.
const GUARD_BITS: u32 = 64;

/// A real number `q_0 + Σ q_g·g` with rational coefficients.
///
/// Zero generator coefficients are never stored, so structural equality is
/// numeric equality under the independence assumption.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ExactScalar {
    rational: BigRational,
    generators: BTreeMap<String, BigRational>,
}

impl ExactScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self { rational: q, generators: BTreeMap::new() }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    /// The scalar `coeff · name`.
    pub fn generator(name: &str, coeff: BigRational) -> Self {
        let mut s = Self::zero();
        if !coeff.is_zero() {
            s.generators.insert(name.to_owned(), coeff);
        }
        s
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn generator_parts(&self) -> &BTreeMap<String, BigRational> {
        &self.generators
    }

    pub fn generator_part(&self, name: &str) -> BigRational {
        self.generators.get(name).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_rational(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty() && self.rational.is_zero()
    }

    /// `self` minus the floor of its rational part.
    pub fn mod_one(&self) -> Self {
        let floor = self.rational.floor();
        Self { rational: &self.rational - floor, generators: self.generators.clone() }
    }

    /// Whether `self` and `other` are the same point of the circle.
    pub fn same_mod_one(&self, other: &Self) -> bool {
        let d = self - other;
        d.is_rational() && d.rational.is_integer()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            rational: &self.rational * c,
            generators: self.generators.iter().map(|(g, q)| (g.clone(), q * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(c.clone()))
    }

    /// Product of two scalars, defined when at least one side is rational.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if other.is_rational() {
            Ok(self.scale(&other.rational))
        } else if self.is_rational() {
            Ok(other.scale(&self.rational))
        } else {
            Err(Error::IrrationalProduct)
        }
    }

    /// Least common multiple of every denominator appearing in the scalar.
    pub fn denominator_lcm(&self) -> BigInt {
        self.generators
            .values()
            .fold(self.rational.denom().clone(), |acc, q| acc.lcm(q.denom()))
    }

    fn add_generator(&mut self, name: &str, q: &BigRational) {
        if q.is_zero() {
            return;
        }
        let remove = match self.generators.get_mut(name) {
            Some(v) => {
                *v += q;
                v.is_zero()
            }
            None => {
                self.generators.insert(name.to_owned(), q.clone());
                false
            }
        };
        if remove {
            self.generators.remove(name);
        }
    }

    /// Parses expressions like `1/2 + 3*alpha - 2/3 beta`, `alpha/5`, `-0.25`.
    pub fn parse(text: &str) -> Result<Self> {
        parse_linear(text)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        if !self.rational.is_zero() || self.generators.is_empty() {
            write!(f, "{}", self.rational)?;
            wrote = true;
        }
        for (g, q) in &self.generators {
            let (sign, mag) = if q.is_negative() { ("-", -q) } else { ("+", q.clone()) };
            if wrote {
                write!(f, " {sign} ")?;
            } else if sign == "-" {
                write!(f, "-")?;
            }
            if mag.is_one() {
                write!(f, "{g}")?;
            } else {
                write!(f, "{mag}*{g}")?;
            }
            wrote = true;
        }
        Ok(())
    }
}

impl FromStr for ExactScalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl From<BigRational> for ExactScalar {
    fn from(q: BigRational) -> Self {
        Self::from_rational(q)
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        self.rational += &rhs.rational;
        for (g, q) in &rhs.generators {
            self.add_generator(g, q);
        }
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, rhs: &ExactScalar) {
        self.rational -= &rhs.rational;
        for (g, q) in &rhs.generators {
            self.add_generator(g, &-q);
        }
    }
}

impl Add<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(mut self, rhs: ExactScalar) -> ExactScalar {
        self += &rhs;
        self
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;
    fn sub(mut self, rhs: ExactScalar) -> ExactScalar {
        self -= &rhs;
        self
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            rational: -&self.rational,
            generators: self.generators.iter().map(|(g, q)| (g.clone(), -q)).collect(),
        }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

/// A signed fixed-point real `raw / 2^bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed {
    raw: BigInt,
    bits: u32,
}

impl Fixed {
    pub fn raw(&self) -> &BigInt {
        &self.raw
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn to_f64(&self) -> f64 {
        bigint_ratio_to_f64(&self.raw, self.bits)
    }

    /// Fractional part as a phase.
    pub fn phase(&self) -> Phase {
        Phase::from_raw(&self.raw, self.bits)
    }

    /// Decimal rendering truncated toward zero after `digits` fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let neg = self.raw.is_negative();
        let mag = self.raw.abs();
        let int = &mag >> self.bits;
        let frac = &mag - (&int << self.bits);
        let scaled = (frac * BigInt::from(10u32).pow(digits as u32)) >> self.bits;
        let mut s = format!("{}{}", if neg { "-" } else { "" }, int);
        if digits > 0 {
            s.push('.');
            s.push_str(&format!("{:0>width$}", scaled.to_string(), width = digits));
        }
        s
    }
}

/// A point of the circle `R/Z`, stored as `frac / 2^bits` with `0 <= frac < 2^bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phase {
    frac: BigUint,
    bits: u32,
}

impl Phase {
    pub fn zero(bits: u32) -> Self {
        Self { frac: BigUint::zero(), bits }
    }

    fn modulus(bits: u32) -> BigInt {
        BigInt::one() << bits
    }

    pub fn from_raw(raw: &BigInt, bits: u32) -> Self {
        let r = raw.mod_floor(&Self::modulus(bits));
        Self { frac: r.to_biguint().expect("mod_floor is nonnegative"), bits }
    }

    pub fn from_rational(q: &BigRational, bits: u32) -> Self {
        let raw = (q.numer() << bits).div_floor(q.denom());
        Self::from_raw(&raw, bits)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn frac(&self) -> &BigUint {
        &self.frac
    }

    pub fn to_f64(&self) -> f64 {
        if self.bits <= 64 {
            return self.frac.to_f64().unwrap_or(0.0) / 2f64.powi(self.bits as i32);
        }
        let top = (&self.frac >> (self.bits - 64)).to_u64().unwrap_or(0);
        top as f64 / 18446744073709551616.0
    }

    /// Top 128 bits of the fraction, i.e. the phase as a `u128` over `2^128`.
    pub fn top128(&self) -> u128 {
        if self.bits >= 128 {
            (&self.frac >> (self.bits - 128)).to_u128().unwrap_or(0)
        } else {
            (&self.frac << (128 - self.bits)).to_u128().unwrap_or(0)
        }
    }

    pub fn add(&self, other: &Phase) -> Phase {
        debug_assert_eq!(self.bits, other.bits);
        let sum = &self.frac + &other.frac;
        let m = BigUint::one() << self.bits;
        Phase { frac: if sum >= m { sum - m } else { sum }, bits: self.bits }
    }

    /// `k · self` on the circle.
    pub fn mul_int(&self, k: &BigInt) -> Phase {
        Phase::from_raw(&(BigInt::from(self.frac.clone()) * k), self.bits)
    }
}

/// Converts `raw / 2^bits` to `f64` without overflowing intermediate casts.
fn bigint_ratio_to_f64(raw: &BigInt, bits: u32) -> f64 {
    let len = raw.bits() as i64;
    let shift = len - 64;
    if shift > 0 {
        let top = (raw >> shift as usize).to_f64().unwrap_or(0.0);
        top * 2f64.powi((shift - bits as i64) as i32)
    } else {
        raw.to_f64().unwrap_or(0.0) * 2f64.powi(-(bits as i32))
    }
}

/// Precision in bits for `digits` decimal digits plus guard bits, never below 128.
pub fn bits_for_digits(digits: u32) -> u32 {
    let b = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS;
    b.max(128)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorEntry {
    pub name: String,
    pub recipe: String,
    value: BigInt,
}

/// Named irrational generators with their high-precision values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorRegistry {
    digits: u32,
    bits: u32,
    entries: Vec<GeneratorEntry>,
}

impl Default for GeneratorRegistry {
    fn default() -> Self {
        Self::new(DEFAULT_PRECISION_DIGITS)
    }
}

impl GeneratorRegistry {
    pub fn new(digits: u32) -> Self {
        Self { digits, bits: bits_for_digits(digits), entries: Vec::new() }
    }

    pub fn precision_digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.name.as_str())
    }

    pub fn entries(&self) -> &[GeneratorEntry] {
        &self.entries
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|e| e.name == name)
    }

    /// Registers a generator from a recipe such as `sqrt(2)-1` or `(sqrt(5)-1)/2`.
    ///
    /// When `decimal` is given it must agree with the recipe to the digits it
    /// carries. Recipes the evaluator cannot read are accepted as provenance
    /// text only, in which case `decimal` is mandatory.
    pub fn register(&mut self, name: &str, recipe: &str, decimal: Option<&str>) -> Result<()> {
        if self.contains(name) {
            return Err(Error::DuplicateGenerator(name.to_owned()));
        }
        if !is_identifier(name) {
            return Err(Error::Parse(format!("invalid generator name `{name}`")));
        }
        let from_recipe = eval_recipe(recipe, self.bits).ok();
        let value = match (from_recipe, decimal) {
            (Some(v), Some(dec)) => {
                let (d, frac_digits) = parse_decimal(dec, self.bits)?;
                let tol_digits = frac_digits.min(self.digits as usize);
                // |v - d| <= 2·10^-tol_digits
                let diff = (&v - &d).abs() * BigInt::from(10u32).pow(tol_digits as u32);
                if diff > (BigInt::from(2u32) << self.bits) {
                    return Err(Error::RecipeMismatch {
                        name: name.to_owned(),
                        recipe: recipe.to_owned(),
                    });
                }
                v
            }
            (Some(v), None) => v,
            (None, Some(dec)) => parse_decimal(dec, self.bits)?.0,
            (None, None) => {
                return Err(Error::Parse(format!(
                    "generator `{name}`: recipe `{recipe}` is not evaluable and no decimal expansion was given"
                )))
            }
        };
        self.entries.push(GeneratorEntry { name: name.to_owned(), recipe: recipe.to_owned(), value });
        Ok(())
    }

    /// Builder form of [`register`](Self::register) for recipes known to evaluate.
    pub fn with(mut self, name: &str, recipe: &str) -> Result<Self> {
        self.register(name, recipe, None)?;
        Ok(self)
    }

    pub fn value(&self, name: &str) -> Result<Fixed> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| Fixed { raw: e.value.clone(), bits: self.bits })
            .ok_or_else(|| Error::UnknownGenerator(name.to_owned()))
    }

    /// Decimal expansion of a generator at the registry precision.
    pub fn decimal(&self, name: &str) -> Result<String> {
        Ok(self.value(name)?.to_decimal(self.digits as usize))
    }

    fn raw_value(&self, name: &str) -> Result<&BigInt> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| &e.value)
            .ok_or_else(|| Error::UnknownGenerator(name.to_owned()))
    }

    /// Raw fixed-point numerator of `s`, each term floored separately.
    fn raw_of(&self, s: &ExactScalar) -> Result<BigInt> {
        let q = &s.rational;
        let mut acc = (q.numer() << self.bits).div_floor(q.denom());
        for (g, c) in &s.generators {
            let v = self.raw_value(g)?;
            acc += (c.numer() * v).div_floor(c.denom());
        }
        Ok(acc)
    }

    /// Numeric value of an exact scalar at the registry precision.
    pub fn eval(&self, s: &ExactScalar) -> Result<Fixed> {
        Ok(Fixed { raw: self.raw_of(s)?, bits: self.bits })
    }

    /// `s mod 1` at the registry precision.
    pub fn phase(&self, s: &ExactScalar) -> Result<Phase> {
        Ok(Phase::from_raw(&self.raw_of(s)?, self.bits))
    }
}

/// Numeric value of `s` as an `f64`.
pub fn eval_numeric(s: &ExactScalar, reg: &GeneratorRegistry) -> Result<f64> {
    Ok(reg.eval(s)?.to_f64())
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a decimal literal into a fixed-point numerator, returning the number
/// of fractional digits it carried.
fn parse_decimal(text: &str, bits: u32) -> Result<(BigInt, usize)> {
    let t = text.trim();
    let q = parse_decimal_rational(t).ok_or_else(|| Error::Parse(format!("bad decimal `{t}`")))?;
    let frac_digits = t.split_once('.').map(|(_, f)| f.len()).unwrap_or(0);
    Ok(((q.numer() << bits).div_floor(q.denom()), frac_digits))
}

pub(crate) fn parse_decimal_rational(t: &str) -> Option<BigRational> {
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num = BigInt::parse_bytes(if digits.is_empty() { b"0" } else { digits.as_bytes() }, 10)?;
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    let q = BigRational::new(num, den);
    Some(if neg { -q } else { q })
}

// ---------------------------------------------------------------------------
// Tokenizer shared by the recipe evaluator and the linear-expression parser.

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            let q = parse_decimal_rational(&lit)
                .ok_or_else(|| Error::Parse(format!("bad number `{lit}`")))?;
            out.push(Tok::Num(q));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{text}`")));
        }
    }
    Ok(out)
}

struct TokStream {
    toks: Vec<Tok>,
    pos: usize,
    src: String,
}

impl TokStream {
    fn new(text: &str) -> Result<Self> {
        Ok(Self { toks: tokenize(text)?, pos: 0, src: text.to_owned() })
    }
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }
    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} in `{}`", self.src))
    }
}

// Recipe evaluator: + - * / parentheses, numbers, sqrt(integer), in fixed point.

fn eval_recipe(recipe: &str, bits: u32) -> Result<BigInt> {
    let work = bits + 32;
    let mut ts = TokStream::new(recipe)?;
    let v = recipe_expr(&mut ts, work)?;
    if ts.peek().is_some() {
        return Err(ts.err("trailing input"));
    }
    Ok(v >> 32usize)
}

fn recipe_expr(ts: &mut TokStream, bits: u32) -> Result<BigInt> {
    let mut acc = recipe_term(ts, bits)?;
    loop {
        if ts.eat('+') {
            acc += recipe_term(ts, bits)?;
        } else if ts.eat('-') {
            acc -= recipe_term(ts, bits)?;
        } else {
            return Ok(acc);
        }
    }
}

fn recipe_term(ts: &mut TokStream, bits: u32) -> Result<BigInt> {
    let mut acc = recipe_factor(ts, bits)?;
    loop {
        if ts.eat('*') {
            acc = (acc * recipe_factor(ts, bits)?) >> bits;
        } else if ts.eat('/') {
            let d = recipe_factor(ts, bits)?;
            if d.is_zero() {
                return Err(ts.err("division by zero"));
            }
            acc = (acc << bits).div_floor(&d);
        } else {
            return Ok(acc);
        }
    }
}

fn recipe_factor(ts: &mut TokStream, bits: u32) -> Result<BigInt> {
    match ts.next() {
        Some(Tok::Op('-')) => Ok(-recipe_factor(ts, bits)?),
        Some(Tok::Op('(')) => {
            let v = recipe_expr(ts, bits)?;
            if !ts.eat(')') {
                return Err(ts.err("missing `)`"));
            }
            Ok(v)
        }
        Some(Tok::Num(q)) => Ok((q.numer() << bits).div_floor(q.denom())),
        Some(Tok::Ident(f)) if f == "sqrt" => {
            if !ts.eat('(') {
                return Err(ts.err("expected `(` after sqrt"));
            }
            let arg = match ts.next() {
                Some(Tok::Num(q)) if q.is_integer() && !q.is_negative() => q.to_integer(),
                _ => return Err(ts.err("sqrt takes a nonnegative integer")),
            };
            if !ts.eat(')') {
                return Err(ts.err("missing `)`"));
            }
            let radicand = (arg << (2 * bits)).to_biguint().expect("nonnegative");
            Ok(BigInt::from(radicand.sqrt()))
        }
        _ => Err(ts.err("unexpected token")),
    }
}

// Linear expressions over generators: sum of `[coef][*]ident` and `ident/int` terms.

fn parse_linear(text: &str) -> Result<ExactScalar> {
    let mut ts = TokStream::new(text)?;
    if ts.peek().is_none() {
        return Err(ts.err("empty expression"));
    }
    let mut acc = ExactScalar::zero();
    let mut first = true;
    while ts.peek().is_some() {
        let mut sign = BigRational::one();
        if ts.eat('-') {
            sign = -sign;
        } else if !ts.eat('+') && !first {
            return Err(ts.err("expected `+` or `-`"));
        }
        first = false;
        let term = linear_term(&mut ts)?;
        acc += &term.scale(&sign);
    }
    Ok(acc)
}

fn linear_term(ts: &mut TokStream) -> Result<ExactScalar> {
    let mut coef = BigRational::one();
    let mut ident: Option<String> = None;
    let mut saw_any = false;
    loop {
        match ts.peek() {
            Some(Tok::Num(_)) => {
                let Some(Tok::Num(q)) = ts.next() else { unreachable!() };
                coef *= q;
            }
            Some(Tok::Ident(_)) => {
                let Some(Tok::Ident(name)) = ts.next() else { unreachable!() };
                if ident.replace(name).is_some() {
                    return Err(ts.err("product of two generators"));
                }
            }
            _ => break,
        }
        saw_any = true;
        if ts.eat('*') {
            continue;
        }
        if ts.eat('/') {
            match ts.next() {
                Some(Tok::Num(q)) if !q.is_zero() => coef /= q,
                _ => return Err(ts.err("expected nonzero number after `/`")),
            }
            if ts.eat('*') {
                continue;
            }
        }
        if !matches!(ts.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_))) {
            break;
        }
    }
    if !saw_any {
        return Err(ts.err("expected a term"));
    }
    Ok(match ident {
        Some(g) => ExactScalar::generator(&g, coef),
        None => ExactScalar::from_rational(coef),
    })
}

pub fn rational_to_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    if let Some((a, b)) = t.split_once('/') {
        let a = parse_decimal_rational(a.trim()).ok_or_else(|| Error::Parse(format!("bad rational `{t}`")))?;
        let b = parse_decimal_rational(b.trim()).ok_or_else(|| Error::Parse(format!("bad rational `{t}`")))?;
        if b.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{t}`")));
        }
        Ok(a / b)
    } else {
        parse_decimal_rational(t).ok_or_else(|| Error::Parse(format!("bad rational `{t}`")))
    }
}
