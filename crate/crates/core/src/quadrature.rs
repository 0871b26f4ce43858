//! Exact grid counts for `μ(A ∩ T_1^{-k_1} A ∩ ⋯ ∩ T_ℓ^{-k_ℓ} A)`.
//!
//! The torus is sampled at the midpoints `(2j+1)/(2G)`. For a grid point `z`
//! the linear part of `T^k z` is a fraction with denominator `U = 2G`, so it
//! is computed exactly as an integer mod `U`; membership of `T^k z` in a box
//! then becomes membership of that integer in a cyclic window determined by
//! the translation part. Counts are exact for the grid; only the grid itself
//! approximates the measure.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::exactnum::{ExactScalar, GeneratorRegistry};
use crate::observable::BoxIndicator;
use crate::torus::AffineSystem;

/// Default points per torus dimension.
pub fn default_grid(d: usize) -> u64 {
    match d {
        0..=2 => 512,
        3 | 4 => 64,
        _ => 16,
    }
}

/// `⌈x⌉` for an exact scalar; irrational values go through the registry.
pub fn ceil_exact(x: &ExactScalar, reg: &GeneratorRegistry) -> Result<BigInt> {
    if x.is_rational() {
        let q = x.rational_part();
        return Ok(-((-q).floor().to_integer()));
    }
    let f = reg.eval(x)?;
    Ok((f.raw() >> f.bits() as usize) + BigInt::one())
}

/// Cyclic window `{u mod U : (u - start) mod U < len}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Window {
    start: i64,
    len: i64,
}

impl Window {
    #[inline]
    fn contains(self, u: i64, modulus: i64) -> bool {
        (u - self.start).rem_euclid(modulus) < self.len
    }
}

/// One map `T^k` prepared for counting.
struct PreparedMap {
    /// `(I+N)^k` reduced mod `U`, row-major.
    matrix: Vec<i64>,
    windows: Vec<Window>,
    shift: u64,
}

/// A box indicator together with its sampling grid.
#[derive(Clone, Debug)]
pub struct GridMeasure {
    set: BoxIndicator,
    grid: u64,
    /// Per torus coordinate, the `j` range `[lo, hi)` of midpoints in the box.
    own: Vec<(i64, i64)>,
}

impl GridMeasure {
    pub fn new(set: BoxIndicator, grid: u64) -> Result<Self> {
        if grid == 0 || grid > (1 << 30) {
            return Err(Error::LimitExceeded(format!("grid resolution {grid}")));
        }
        let u = BigRational::from_integer((2 * grid).into());
        let own = set
            .intervals()
            .iter()
            .map(|(lo, hi)| {
                // 2j+1 ∈ [U lo, U hi)
                let one = BigRational::one();
                let two = BigRational::from_integer(2.into());
                let a = ((&u * lo - &one) / &two).ceil().to_integer().to_i64().unwrap_or(0).max(0);
                let b = ((&u * hi - &one) / &two).ceil().to_integer().to_i64().unwrap_or(0).min(grid as i64);
                (a, b.max(a))
            })
            .collect();
        Ok(Self { set, grid, own })
    }

    pub fn set(&self) -> &BoxIndicator {
        &self.set
    }

    pub fn grid(&self) -> u64 {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    /// Number of sample points, `q · G^d`.
    pub fn total(&self) -> u64 {
        self.set.q() * self.grid.pow(self.dim() as u32)
    }

    /// Sample points inside the box.
    pub fn own_count(&self) -> u64 {
        self.set.residues().len() as u64 * self.own.iter().map(|(a, b)| (b - a) as u64).product::<u64>()
    }

    fn prepare(&self, sys: &AffineSystem, k: &BigInt, reg: &GeneratorRegistry) -> Result<PreparedMap> {
        let d = self.dim();
        if sys.dim() != d || sys.q() != self.set.q() {
            return Err(Error::DimensionMismatch(format!("system `{}` does not act on the set's space", sys.label())));
        }
        let modulus = BigInt::from(2 * self.grid);
        let ui = 2 * self.grid as i64;
        let matrix = sys
            .power_matrix(k)
            .into_iter()
            .flatten()
            .map(|x| x.mod_floor(&modulus).to_i64().expect("reduced"))
            .collect();
        let u = BigRational::from_integer(modulus.clone());
        let windows = sys
            .power_translation(k)
            .iter()
            .zip(self.set.intervals())
            .map(|(t, (lo, hi))| {
                let t = t.mod_one();
                let w0 = ceil_exact(&(&ExactScalar::from_rational(lo.clone()) - &t).scale(&u), reg)?;
                let w1 = ceil_exact(&(&ExactScalar::from_rational(hi.clone()) - &t).scale(&u), reg)?;
                let len = (&w1 - &w0).to_i64().unwrap_or(i64::MAX).min(ui);
                Ok(Window { start: w0.mod_floor(&modulus).to_i64().expect("reduced"), len })
            })
            .collect::<Result<Vec<_>>>()?;
        let q = BigInt::from(sys.q());
        let shift = (k * BigInt::from(sys.s())).mod_floor(&q).to_u64().expect("reduced");
        Ok(PreparedMap { matrix, windows, shift })
    }

    /// Number of sample points `z ∈ A` with `T_i^{k_i} z ∈ A` for every `i`.
    pub fn count(&self, maps: &[(&AffineSystem, BigInt)], reg: &GeneratorRegistry) -> Result<u64> {
        let prepared = maps.iter().map(|(s, k)| self.prepare(s, k, reg)).collect::<Result<Vec<_>>>()?;
        Ok(self.count_prepared(&prepared))
    }

    fn count_prepared(&self, maps: &[PreparedMap]) -> u64 {
        let q = self.set.q();
        let residues: Vec<u64> = self
            .set
            .residues()
            .iter()
            .copied()
            .filter(|&c| maps.iter().all(|m| self.set.contains_residue((c + m.shift) % q)))
            .collect();
        if residues.is_empty() {
            return 0;
        }
        let d = self.dim();
        if d == 0 {
            return residues.len() as u64;
        }
        let ui = 2 * self.grid as i64;
        let last = d - 1;
        let fast = maps.iter().all(|m| (0..d).all(|r| m.matrix[r * d + last] == if r == last { 1 } else { 0 }));
        let per_torus = if fast { self.count_fast(maps, ui) } else { self.count_full(maps, ui) };
        residues.len() as u64 * per_torus
    }

    /// Counting when the last coordinate enters every map as `x_d ↦ x_d + …`:
    /// the last index is then an interval intersection for each prefix.
    fn count_fast(&self, maps: &[PreparedMap], ui: i64) -> u64 {
        let d = self.dim();
        let last = d - 1;
        let g = self.grid as i64;
        let mut total = 0u64;
        let mut prefix: Vec<i64> = self.own[..last].iter().map(|r| r.0).collect();
        if self.own[..last].iter().any(|(a, b)| a >= b) {
            return 0;
        }
        let mut cand: Vec<(i64, i64)> = Vec::with_capacity(4);
        let mut next: Vec<(i64, i64)> = Vec::with_capacity(4);
        'outer: loop {
            // odd numerators 2j+1 of the prefix
            let odd: Vec<i64> = prefix.iter().map(|j| 2 * j + 1).collect();
            let mut ok = true;
            cand.clear();
            cand.push(self.own[last]);
            for m in maps {
                for r in 0..last {
                    let u: i64 = (0..last).map(|s| m.matrix[r * d + s] * odd[s]).sum::<i64>();
                    if !m.windows[r].contains(u.rem_euclid(ui), ui) {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    break;
                }
                let off: i64 = (0..last).map(|s| m.matrix[last * d + s] * odd[s]).sum::<i64>();
                let w = m.windows[last];
                let st = (w.start - off).rem_euclid(ui);
                // 2j+1 ∈ [st + kU, st + len + kU), k ∈ {-1, 0}
                next.clear();
                for k in -1..=0 {
                    let lo = ceil_div(st + k * ui - 1, 2).max(0);
                    let hi = ceil_div(st + w.len + k * ui - 1, 2).min(g);
                    for &(a, b) in &cand {
                        let (x, y) = (a.max(lo), b.min(hi));
                        if x < y {
                            next.push((x, y));
                        }
                    }
                }
                std::mem::swap(&mut cand, &mut next);
                if cand.is_empty() {
                    ok = false;
                    break;
                }
            }
            if ok {
                total += cand.iter().map(|(a, b)| (b - a) as u64).sum::<u64>();
            }
            // advance the prefix odometer
            for r in (0..last).rev() {
                prefix[r] += 1;
                if prefix[r] < self.own[r].1 {
                    continue 'outer;
                }
                prefix[r] = self.own[r].0;
            }
            break;
        }
        total
    }

    fn count_full(&self, maps: &[PreparedMap], ui: i64) -> u64 {
        let d = self.dim();
        if self.own.iter().any(|(a, b)| a >= b) {
            return 0;
        }
        let mut idx: Vec<i64> = self.own.iter().map(|r| r.0).collect();
        let mut total = 0u64;
        'outer: loop {
            let odd: Vec<i64> = idx.iter().map(|j| 2 * j + 1).collect();
            let inside = maps.iter().all(|m| {
                (0..d).all(|r| {
                    let u: i64 = (0..d).map(|s| m.matrix[r * d + s] * odd[s]).sum::<i64>();
                    m.windows[r].contains(u.rem_euclid(ui), ui)
                })
            });
            if inside {
                total += 1;
            }
            for r in (0..d).rev() {
                idx[r] += 1;
                if idx[r] < self.own[r].1 {
                    continue 'outer;
                }
                idx[r] = self.own[r].0;
            }
            break;
        }
        total
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}
