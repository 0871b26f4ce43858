//! Phases of polynomial sequences, `P(m, n) mod 1`, on integer grids.
//!
//! Each coefficient is reduced mod one at the registry precision. Along a
//! grid row the evaluation runs in wrapping `u128` arithmetic on the top 128
//! bits of every coefficient; this is exact modulo `2^128` for the truncated
//! coefficients, so the only error is the truncation times the size of the
//! monomial. Rows whose monomials exceed [`FAST_LIMIT_BITS`] bits use the full
//! precision big-integer path instead.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::Result;
use crate::exactnum::{GeneratorRegistry, Phase};
use crate::folner::Region;
use crate::observable::{e, BoxIndicator, Observable};
use crate::par::{self, Exec};
use crate::polyring::{ExactPolynomial, Monomial};
use crate::torus::OrbitPolynomial;

/// Monomials below `2^FAST_LIMIT_BITS` keep the `u128` error under `2^-48`.
pub const FAST_LIMIT_BITS: f64 = 80.0;

const TWO_POW_M128: f64 = 1.0 / 340282366920938463463374607431768211456.0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePoly {
    bits: u32,
    terms: BTreeMap<Monomial, BigUint>,
    /// `table[b][a]`: top 128 bits of the coefficient of `m^a n^b`.
    table: Vec<Vec<u128>>,
}

fn top128(frac: &BigUint, bits: u32) -> u128 {
    Phase::from_raw(&BigInt::from(frac.clone()), bits).top128()
}

impl PhasePoly {
    pub fn zero(bits: u32) -> Self {
        Self { bits, terms: BTreeMap::new(), table: Vec::new() }
    }

    pub fn new(p: &ExactPolynomial, reg: &GeneratorRegistry) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (mono, c) in p.terms() {
            let ph = reg.phase(c)?;
            if !ph.frac().is_zero() {
                terms.insert(mono, ph.frac().clone());
            }
        }
        Ok(Self::from_terms(reg.bits(), terms))
    }

    fn from_terms(bits: u32, terms: BTreeMap<Monomial, BigUint>) -> Self {
        let dm = terms.keys().map(|k| k.m).max().unwrap_or(0) as usize;
        let dn = terms.keys().map(|k| k.n).max().unwrap_or(0) as usize;
        let mut table = if terms.is_empty() { Vec::new() } else { vec![vec![0u128; dm + 1]; dn + 1] };
        for (mono, f) in &terms {
            table[mono.n as usize][mono.m as usize] = top128(f, bits);
        }
        Self { bits, terms, table }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ k_i P_i` on the circle.
    pub fn combine(bits: u32, parts: &[(i64, &PhasePoly)]) -> Self {
        let modulus = BigInt::from(1u8) << bits;
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for &(k, p) in parts {
            if k == 0 {
                continue;
            }
            debug_assert_eq!(p.bits, bits);
            for (mono, f) in &p.terms {
                *acc.entry(*mono).or_default() += BigInt::from(k) * BigInt::from(f.clone());
            }
        }
        let terms = acc
            .into_iter()
            .filter_map(|(mono, v)| {
                let r = ((v % &modulus) + &modulus) % &modulus;
                (!r.is_zero()).then(|| (mono, r.to_biguint().expect("nonnegative")))
            })
            .collect();
        Self::from_terms(bits, terms)
    }

    fn log2_size(&self, m: u64, n: u64) -> f64 {
        let (lm, ln) = ((m.max(1) as f64).log2(), (n.max(1) as f64).log2());
        self.terms.keys().map(|k| k.m as f64 * lm + k.n as f64 * ln).fold(0.0, f64::max)
    }

    /// Whether rows with `|m| <= m_max`, `|n| <= n_max` use the `u128` path.
    pub fn fast_ok(&self, m_max: u64, n_max: u64) -> bool {
        self.log2_size(m_max, n_max) < FAST_LIMIT_BITS
    }

    /// `P(m, n) mod 1` at full precision.
    pub fn eval_exact(&self, m: &BigInt, n: &BigInt) -> f64 {
        let mut acc = BigInt::zero();
        for (mono, f) in &self.terms {
            acc += BigInt::from(f.clone()) * mono.eval(m, n);
        }
        Phase::from_raw(&acc, self.bits).to_f64()
    }

    pub fn eval(&self, m: i64, n: i64) -> f64 {
        if self.fast_ok(m.unsigned_abs(), n.unsigned_abs()) {
            let mut out = Vec::with_capacity(1);
            self.row_fast(m, &[n], &mut out);
            out[0]
        } else {
            self.eval_exact(&BigInt::from(m), &BigInt::from(n))
        }
    }

    fn row_fast(&self, m: i64, ns: &[i64], out: &mut Vec<f64>) {
        out.clear();
        if self.table.is_empty() {
            out.resize(ns.len(), 0.0);
            return;
        }
        let mw = m as i128 as u128;
        let dm = self.table[0].len();
        let mut pow = Vec::with_capacity(dm);
        let mut p = 1u128;
        for _ in 0..dm {
            pow.push(p);
            p = p.wrapping_mul(mw);
        }
        let g: Vec<u128> = self
            .table
            .iter()
            .map(|row| row.iter().zip(&pow).fold(0u128, |acc, (c, p)| acc.wrapping_add(c.wrapping_mul(*p))))
            .collect();
        for &n in ns {
            let nw = n as i128 as u128;
            let v = g.iter().rev().fold(0u128, |acc, c| acc.wrapping_mul(nw).wrapping_add(*c));
            out.push(v as f64 * TWO_POW_M128);
        }
    }

    /// Phases along the row `m` at the given `n` values.
    pub fn row(&self, m: i64, ns: &[i64], out: &mut Vec<f64>) {
        let n_max = ns.iter().map(|n| n.unsigned_abs()).max().unwrap_or(0);
        if self.fast_ok(m.unsigned_abs(), n_max) {
            self.row_fast(m, ns, out);
        } else {
            let mb = BigInt::from(m);
            out.clear();
            out.extend(ns.iter().map(|&n| self.eval_exact(&mb, &BigInt::from(n))));
        }
    }
}

/// Numeric evaluator for one orbit `(m, n) ↦ T^{e(m,n)} p`.
#[derive(Clone, Debug)]
pub struct OrbitEval {
    pub coords: Vec<PhasePoly>,
    /// `(c0 + s·e(m,n)) / q`
    pub finite: PhasePoly,
    pub q: u64,
    bits: u32,
}

impl OrbitEval {
    pub fn new(orbit: &OrbitPolynomial, reg: &GeneratorRegistry) -> Result<Self> {
        let coords = orbit.coords.iter().map(|c| PhasePoly::new(c, reg)).collect::<Result<Vec<_>>>()?;
        let f = &orbit.finite;
        let q = BigRational::from_integer(f.q.into());
        let fin = f
            .exponent
            .scale(&(BigRational::from_integer(f.s.into()) / &q))
            .add(&ExactPolynomial::rational_constant(BigRational::from_integer(f.c0.into()) / &q));
        Ok(Self { coords, finite: PhasePoly::new(&fin, reg)?, q: f.q, bits: reg.bits() })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Phase polynomial of `e(j c / q + l · x)` along the orbit.
    pub fn character_phase(&self, l: &[i64], j: i64) -> PhasePoly {
        let mut parts: Vec<(i64, &PhasePoly)> = l.iter().copied().zip(&self.coords).collect();
        parts.push((j, &self.finite));
        PhasePoly::combine(self.bits, &parts)
    }

    fn residue(&self, phase: f64) -> u64 {
        ((phase * self.q as f64).round() as u64) % self.q
    }

    /// The orbit point at `(m, n)`, torus part as floats in `[0, 1)`.
    pub fn point(&self, m: i64, n: i64) -> (u64, Vec<f64>) {
        (self.residue(self.finite.eval(m, n)), self.coords.iter().map(|c| c.eval(m, n)).collect())
    }
}

/// An observable composed with an orbit, ready for grid evaluation.
#[derive(Clone, Debug)]
pub enum ObsEval {
    Trig(Vec<(Complex64, PhasePoly)>),
    Box { orbit: OrbitEval, ind: BoxIndicator },
}

impl ObsEval {
    pub fn new(orbit: &OrbitEval, obs: &Observable) -> Self {
        match obs {
            Observable::Trig(t) => ObsEval::Trig(
                t.terms().map(|(ch, c)| (*c, orbit.character_phase(&ch.l, ch.j[0]))).collect(),
            ),
            Observable::Box(b) => ObsEval::Box { orbit: orbit.clone(), ind: b.clone() },
        }
    }

    /// Multiplies `acc[i]` by the observable's value at `(m, ns[i])`.
    pub fn mul_row(&self, m: i64, ns: &[i64], acc: &mut [Complex64], scratch: &mut Vec<f64>) {
        match self {
            ObsEval::Trig(terms) => {
                let mut vals = vec![Complex64::zero(); ns.len()];
                for (c, p) in terms {
                    p.row(m, ns, scratch);
                    for (v, ph) in vals.iter_mut().zip(scratch.iter()) {
                        *v += c * e(*ph);
                    }
                }
                for (a, v) in acc.iter_mut().zip(vals) {
                    *a *= v;
                }
            }
            ObsEval::Box { orbit, ind } => {
                let mut coords: Vec<Vec<f64>> = Vec::with_capacity(orbit.dim());
                for c in &orbit.coords {
                    c.row(m, ns, scratch);
                    coords.push(scratch.clone());
                }
                orbit.finite.row(m, ns, scratch);
                let mut x = vec![0.0; orbit.dim()];
                for (i, a) in acc.iter_mut().enumerate() {
                    for (xr, col) in x.iter_mut().zip(&coords) {
                        *xr = col[i];
                    }
                    if !ind.contains(orbit.residue(scratch[i]), &x) {
                        *a = Complex64::zero();
                    }
                }
            }
        }
    }
}

/// Row sums `Σ_n f(m, n)` over a region, one entry per `m` in increasing order.
///
/// `row` receives `m` and the row's `n` values and returns the row sum.
pub fn row_sums<F>(region: &Region, exec: Exec, row: F) -> Vec<Complex64>
where
    F: Fn(i64, &[i64]) -> Complex64 + Sync + Send,
{
    let ms = region.m_values();
    let ns = region.n_values();
    par::map_ordered(exec, 0..ms.len(), |i| row(ms[i], &ns))
}

/// `E_{(m,n) ∈ region} e(P(m, n))`.
pub fn phase_average(p: &PhasePoly, region: &Region, exec: Exec) -> Complex64 {
    let count = region.len();
    if count == 0 {
        return Complex64::zero();
    }
    let rows = row_sums(region, exec, |m, ns| {
        let mut ph = Vec::with_capacity(ns.len());
        p.row(m, ns, &mut ph);
        let vals: Vec<Complex64> = ph.iter().map(|&t| e(t)).collect();
        par::tree_sum(&vals)
    });
    par::tree_sum(&rows) / count as f64
}
