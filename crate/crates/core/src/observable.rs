//! Functions on `Z_q × T^d`: trigonometric polynomials and box indicators.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `e(t) = exp(2πi t)`.
#[inline]
pub fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * t)
}

/// A character: integer torus frequencies `l` and finite-part indices `j`.
///
/// For a single system `j` has one entry, a residue mod `q`; for a joint
/// orbit it has one entry per factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    pub l: Vec<i64>,
    pub j: Vec<i64>,
}

impl Character {
    pub fn new(l: Vec<i64>, j: Vec<i64>) -> Self {
        Self { l, j }
    }

    pub fn torus(l: Vec<i64>) -> Self {
        Self { l, j: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.l.iter().all(|&x| x == 0) && self.j.iter().all(|&x| x == 0)
    }

    pub fn height(&self) -> i64 {
        self.l.iter().chain(&self.j).map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn conj(&self) -> Self {
        Self { l: self.l.iter().map(|x| -x).collect(), j: self.j.iter().map(|x| -x).collect() }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l={:?}", self.l)?;
        if !self.j.is_empty() {
            write!(f, " j={:?}", self.j)?;
        }
        Ok(())
    }
}

/// All nonzero torus characters of dimension `dim` with height at most `h`,
/// one from each conjugate pair.
pub fn torus_characters_up_to(dim: usize, h: i64) -> Vec<Character> {
    let side = (2 * h + 1) as usize;
    let total = side.pow(dim as u32);
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rest = idx;
        let l: Vec<i64> = (0..dim)
            .map(|_| {
                let v = (rest % side) as i64 - h;
                rest /= side;
                v
            })
            .collect();
        // keep the representative whose first nonzero entry is positive
        match l.iter().find(|&&x| x != 0) {
            Some(&x) if x > 0 => out.push(Character::torus(l)),
            _ => {}
        }
    }
    out
}

/// A finite sum `Σ c_χ χ` on `Z_q × T^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    q: u64,
    d: usize,
    terms: BTreeMap<Character, Complex64>,
}

impl TrigPoly {
    pub fn new(q: u64, d: usize) -> Self {
        assert!(q >= 1);
        Self { q, d, terms: BTreeMap::new() }
    }

    pub fn constant(q: u64, d: usize, c: Complex64) -> Self {
        let mut p = Self::new(q, d);
        p.add_term(Character::new(vec![0; d], vec![0]), c).expect("shape matches");
        p
    }

    /// The single character `e(j·c/q + l·x)`.
    pub fn character(q: u64, j: i64, l: Vec<i64>) -> Self {
        let mut p = Self::new(q, l.len());
        p.add_term(Character::new(l, vec![j]), Complex64::one()).expect("shape matches");
        p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    fn canonical(&self, mut ch: Character) -> Result<Character> {
        if ch.l.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "character {ch} on a {}-dimensional torus",
                self.d
            )));
        }
        if ch.j.is_empty() {
            ch.j.push(0);
        }
        if ch.j.len() != 1 {
            return Err(Error::DimensionMismatch("single-system character needs one j".into()));
        }
        ch.j[0] = ch.j[0].rem_euclid(self.q as i64);
        Ok(ch)
    }

    pub fn add_term(&mut self, ch: Character, c: Complex64) -> Result<()> {
        let ch = self.canonical(ch)?;
        let v = self.terms.entry(ch.clone()).or_insert(Complex64::zero());
        *v += c;
        if v.norm() == 0.0 {
            self.terms.remove(&ch);
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Character, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, ch: &Character) -> Complex64 {
        self.canonical(ch.clone())
            .ok()
            .and_then(|c| self.terms.get(&c).copied())
            .unwrap_or(Complex64::zero())
    }

    /// `∫ f dμ`: the coefficient of the trivial character.
    pub fn integral(&self) -> Complex64 {
        self.coefficient(&Character::new(vec![0; self.d], vec![0]))
    }

    /// Sum of coefficient moduli, an upper bound for the sup norm.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn eval(&self, c: u64, x: &[f64]) -> Complex64 {
        let q = self.q as f64;
        self.terms
            .iter()
            .map(|(ch, coef)| {
                let mut t = ch.j[0] as f64 * (c % self.q) as f64 / q;
                for (li, xi) in ch.l.iter().zip(x) {
                    t += *li as f64 * xi;
                }
                coef * e(t - t.floor())
            })
            .sum()
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::new(self.q, self.d);
        for (ch, c) in &self.terms {
            out.add_term(ch.conj(), c.conj()).expect("same shape");
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.q != other.q || self.d != other.d {
            return Err(Error::DimensionMismatch("product of observables on different spaces".into()));
        }
        let mut out = Self::new(self.q, self.d);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let l = a.l.iter().zip(&b.l).map(|(u, v)| u + v).collect();
                out.add_term(Character::new(l, vec![a.j[0] + b.j[0]]), x * y)?;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (ch, c) in &other.terms {
            out.add_term(ch.clone(), -c)?;
        }
        Ok(out)
    }

    /// Keeps the terms selected by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Character) -> bool) -> Self {
        Self {
            q: self.q,
            d: self.d,
            terms: self.terms.iter().filter(|(ch, _)| keep(ch)).map(|(k, v)| (k.clone(), *v)).collect(),
        }
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(ch, c)| TermRecord { l: ch.l.clone(), j: ch.j[0], re: c.re, im: c.im })
            .collect()
    }

    pub fn from_records(q: u64, d: usize, records: &[TermRecord]) -> Result<Self> {
        let mut out = Self::new(q, d);
        for r in records {
            out.add_term(Character::new(r.l.clone(), vec![r.j]), Complex64::new(r.re, r.im))?;
        }
        Ok(out)
    }
}

/// One `(character, coefficient)` term in serialized form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub l: Vec<i64>,
    pub j: i64,
    pub re: f64,
    pub im: f64,
}

/// Indicator of `S × Π [lo_i, hi_i)` with `S ⊂ Z_q`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxIndicator {
    q: u64,
    intervals: Vec<(BigRational, BigRational)>,
    residues: Vec<u64>,
    bounds: Vec<(f64, f64)>,
}

impl BoxIndicator {
    /// `residues = None` selects every component.
    pub fn new(q: u64, intervals: Vec<(BigRational, BigRational)>, residues: Option<Vec<u64>>) -> Result<Self> {
        assert!(q >= 1);
        let zero = BigRational::zero();
        let one = BigRational::one();
        for (lo, hi) in &intervals {
            if lo < &zero || hi > &one || lo > hi {
                return Err(Error::Parse(format!("interval [{lo}, {hi}) not inside [0, 1]")));
            }
        }
        let mut residues = residues.unwrap_or_else(|| (0..q).collect());
        residues.sort_unstable();
        residues.dedup();
        if residues.iter().any(|&c| c >= q) {
            return Err(Error::Parse(format!("residue outside Z_{q}")));
        }
        let bounds = intervals
            .iter()
            .map(|(lo, hi)| (lo.to_f64().unwrap_or(0.0), hi.to_f64().unwrap_or(1.0)))
            .collect();
        Ok(Self { q, intervals, residues, bounds })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(BigRational, BigRational)] {
        &self.intervals
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn contains_residue(&self, c: u64) -> bool {
        self.residues.binary_search(&(c % self.q)).is_ok()
    }

    pub fn contains(&self, c: u64, x: &[f64]) -> bool {
        self.contains_residue(c) && self.bounds.iter().zip(x).all(|((lo, hi), v)| *lo <= *v && *v < *hi)
    }

    /// Volume of the torus box alone.
    pub fn box_volume(&self) -> BigRational {
        self.intervals.iter().fold(BigRational::one(), |acc, (lo, hi)| acc * (hi - lo))
    }

    /// Exact Haar measure.
    pub fn measure(&self) -> BigRational {
        self.box_volume() * BigRational::new((self.residues.len() as i64).into(), (self.q as i64).into())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    Trig(TrigPoly),
    Box(BoxIndicator),
}

impl Observable {
    pub fn q(&self) -> u64 {
        match self {
            Observable::Trig(t) => t.q(),
            Observable::Box(b) => b.q(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Observable::Trig(t) => t.dim(),
            Observable::Box(b) => b.dim(),
        }
    }

    pub fn eval(&self, c: u64, x: &[f64]) -> Complex64 {
        match self {
            Observable::Trig(t) => t.eval(c, x),
            Observable::Box(b) => {
                if b.contains(c, x) {
                    Complex64::one()
                } else {
                    Complex64::zero()
                }
            }
        }
    }

    /// Upper bound on `sup |f|`.
    pub fn sup_bound(&self) -> f64 {
        match self {
            Observable::Trig(t) => t.l1_norm(),
            Observable::Box(_) => 1.0,
        }
    }

    pub fn as_trig(&self) -> Option<&TrigPoly> {
        match self {
            Observable::Trig(t) => Some(t),
            Observable::Box(_) => None,
        }
    }
}

impl From<TrigPoly> for Observable {
    fn from(t: TrigPoly) -> Self {
        Observable::Trig(t)
    }
}

impl From<BoxIndicator> for Observable {
    fn from(b: BoxIndicator) -> Self {
        Observable::Box(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> BigRational {
        BigRational::new(1.into(), 2.into())
    }

    #[test]
    fn trig_eval_and_integral() {
        let mut f = TrigPoly::character(2, 1, vec![1]);
        f.add_term(Character::new(vec![0], vec![0]), Complex64::new(0.5, 0.0)).unwrap();
        assert_eq!(f.integral(), Complex64::new(0.5, 0.0));
        let v = f.eval(1, &[0.25]);
        // e(1/2 + 1/4) + 1/2 = -i + 1/2
        assert!((v - Complex64::new(0.5, -1.0)).norm() < 1e-12);
        assert_eq!(f.l1_norm(), 1.5);
    }

    #[test]
    fn residues_are_canonical() {
        let mut f = TrigPoly::new(3, 1);
        f.add_term(Character::new(vec![1], vec![4]), Complex64::one()).unwrap();
        f.add_term(Character::new(vec![1], vec![1]), -Complex64::one()).unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn product_and_conjugate() {
        let f = TrigPoly::character(1, 0, vec![1, 2]);
        let g = f.mul(&f.conj()).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.integral(), Complex64::one());
    }

    #[test]
    fn box_measure() {
        let b = BoxIndicator::new(4, vec![(BigRational::zero(), half()), (BigRational::zero(), half())], Some(vec![1, 3]))
            .unwrap();
        assert_eq!(b.measure(), BigRational::new(1.into(), 8.into()));
        assert!(b.contains(5, &[0.1, 0.2]));
        assert!(!b.contains(2, &[0.1, 0.2]));
        assert!(!b.contains(1, &[0.5, 0.2]));
        assert!(BoxIndicator::new(1, vec![(half(), BigRational::from_integer(2.into()))], None).is_err());
    }

    #[test]
    fn character_enumeration() {
        // (3^2 - 1) / 2 nonzero characters of height 1 in dimension 2
        assert_eq!(torus_characters_up_to(2, 1).len(), 4);
        assert_eq!(torus_characters_up_to(4, 3).len(), (7usize.pow(4) - 1) / 2);
    }
}
