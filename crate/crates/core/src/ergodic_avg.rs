//! Følner-box multiple ergodic averages and uniformity seminorms.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{ExactScalar, GeneratorRegistry};
use crate::folner::{FolnerBox, Region};
use crate::numeric::{row_sums, ObsEval, OrbitEval};
use crate::observable::{e, Character, Observable, TrigPoly};
use crate::par::{self, Exec};
use crate::polyring::IntPolynomial;
use crate::quadrature::GridMeasure;
use crate::torus::{orbit_polynomial, AffineSystem, Point};

/// Largest `k` accepted by [`uniformity_seminorm_estimate`].
pub const MAX_SEMINORM_K: u32 = 3;

/// One factor `f_i(T_i^{m + p_i(n)} x_i)` of a multiple average.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AverageFactor {
    pub system: AffineSystem,
    pub point: Point,
    pub poly: IntPolynomial,
}

impl AverageFactor {
    pub fn new(system: AffineSystem, point: Point, poly: IntPolynomial) -> Self {
        Self { system, point, poly }
    }
}

/// Largest degree of the `p_i`, the `d` of the box rule.
pub fn max_degree(factors: &[AverageFactor]) -> u32 {
    factors.iter().map(|f| f.poly.degree()).max().unwrap_or(1).max(1)
}

fn check_shapes(factors: &[AverageFactor], obs: &[Observable]) -> Result<()> {
    if factors.is_empty() || factors.len() != obs.len() {
        return Err(Error::DimensionMismatch(format!("{} factors, {} observables", factors.len(), obs.len())));
    }
    for (f, o) in factors.iter().zip(obs) {
        if f.system.q() != o.q() || f.system.dim() != o.dim() {
            return Err(Error::DimensionMismatch(format!(
                "observable on Z_{} × T^{} for system `{}` on Z_{} × T^{}",
                o.q(),
                o.dim(),
                f.system.label(),
                f.system.q(),
                f.system.dim()
            )));
        }
    }
    Ok(())
}

fn prepare(factors: &[AverageFactor], obs: &[Observable], reg: &GeneratorRegistry) -> Result<Vec<ObsEval>> {
    check_shapes(factors, obs)?;
    factors
        .iter()
        .zip(obs)
        .map(|(f, o)| {
            let orbit = orbit_polynomial(&f.system, &f.point, &f.poly.shifted_exponent())?;
            Ok(ObsEval::new(&OrbitEval::new(&orbit, reg)?, o))
        })
        .collect()
}

/// Row sums `Σ_n ∏_i f_i(T_i^{m+p_i(n)} x_i)`, one per `m`.
fn product_rows(evals: &[ObsEval], region: &Region, exec: Exec) -> Vec<Complex64> {
    row_sums(region, exec, |m, ns| {
        let mut acc = vec![Complex64::new(1.0, 0.0); ns.len()];
        let mut scratch = Vec::with_capacity(ns.len());
        for ev in evals {
            ev.mul_row(m, ns, &mut acc, &mut scratch);
        }
        par::tree_sum(&acc)
    })
}

/// `E_{(m,n) ∈ region} ∏_i f_i(T_i^{m+p_i(n)} x_i)`.
pub fn multiple_average_region(
    factors: &[AverageFactor],
    obs: &[Observable],
    region: &Region,
    reg: &GeneratorRegistry,
    exec: Exec,
) -> Result<Complex64> {
    let evals = prepare(factors, obs, reg)?;
    let count = region.len();
    if count == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(par::tree_sum(&product_rows(&evals, region, exec)) / count as f64)
}

/// The multiple average over the Følner box `[1,N] × [1,b(N)]`.
pub fn multiple_average(
    factors: &[AverageFactor],
    obs: &[Observable],
    bx: &FolnerBox,
    reg: &GeneratorRegistry,
    exec: Exec,
) -> Result<Complex64> {
    multiple_average_region(factors, obs, &bx.region(), reg, exec)
}

/// `E_{m ∈ [1,N]} | E_{n ∈ [1,b(N)]} ∏_i f_i(T_i^{m+p_i(n)} x_i) |²`.
pub fn uniformity_diagnostic(
    factors: &[AverageFactor],
    obs: &[Observable],
    bx: &FolnerBox,
    reg: &GeneratorRegistry,
    exec: Exec,
) -> Result<f64> {
    let evals = prepare(factors, obs, reg)?;
    let region = bx.region();
    let b = region.n_values().len() as f64;
    let rows = product_rows(&evals, &region, exec);
    let sq: Vec<f64> = rows.iter().map(|r| (r / b).norm_sqr()).collect();
    Ok(par::tree_sum(&sq) / rows.len() as f64)
}

/// One CSV line of an averaging run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageRow {
    pub n: u64,
    pub b: u64,
    pub re: f64,
    pub im: f64,
    /// Wall time, filled only when timing is requested.
    pub runtime_ms: Option<f64>,
}

impl AverageRow {
    pub const HEADER: &'static str = "N,b,real,imag,runtime_ms";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{:.17e},{:.17e},{}",
            self.n,
            self.b,
            self.re,
            self.im,
            self.runtime_ms.map(|t| format!("{t:.3}")).unwrap_or_default()
        )
    }
}

/// Multiple averages along a schedule of `N` values.
pub fn average_schedule(
    factors: &[AverageFactor],
    obs: &[Observable],
    schedule: &[u64],
    rule: crate::folner::BoxRule,
    reg: &GeneratorRegistry,
    exec: Exec,
    timing: bool,
) -> Result<Vec<AverageRow>> {
    let d = max_degree(factors);
    schedule
        .iter()
        .map(|&n| {
            let bx = FolnerBox::new(n, rule, d);
            let start = std::time::Instant::now();
            let v = multiple_average(factors, obs, &bx, reg, exec)?;
            let runtime_ms = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
            Ok(AverageRow { n, b: bx.height(), re: v.re, im: v.im, runtime_ms })
        })
        .collect()
}

/// `f ∘ T^t` for a trigonometric polynomial.
///
/// The term `e(j c/q + l·x)` becomes `e(j (c + t s)/q + l·(A^t x + b_t))`,
/// i.e. the character `(j, l A^t)` times the constant `e(j t s/q + l·b_t)`.
pub fn compose_power(sys: &AffineSystem, f: &TrigPoly, t: i64, reg: &GeneratorRegistry) -> Result<TrigPoly> {
    let tb = BigInt::from(t);
    let a = sys.power_matrix(&tb);
    let bt = sys.power_translation(&tb);
    let d = sys.dim();
    let q = sys.q() as i64;
    let mut out = TrigPoly::new(sys.q(), d);
    for (ch, c) in f.terms() {
        let mut l2 = vec![0i64; d];
        for (col, slot) in l2.iter_mut().enumerate() {
            let mut acc = BigInt::from(0);
            for (row, li) in ch.l.iter().enumerate() {
                acc += &a[row][col] * *li;
            }
            *slot = acc.to_i64().ok_or(Error::Overflow("composed character"))?;
        }
        let mut phase = ExactScalar::ratio((ch.j[0] * (t.rem_euclid(q)) * sys.s() as i64).rem_euclid(q), q);
        for (li, b) in ch.l.iter().zip(&bt) {
            phase += &b.scale_int(&BigInt::from(*li));
        }
        let ph = reg.phase(&phase)?.to_f64();
        out.add_term(Character::new(l2, ch.j.clone()), c * e(ph))?;
    }
    Ok(out)
}

/// `∫ g h̄`.
fn inner(g: &TrigPoly, h: &TrigPoly) -> Complex64 {
    g.terms().map(|(ch, c)| c * h.coefficient(ch).conj()).sum()
}

/// `S_k(f)`, the finite-`N` truncation of `‖f‖_{U^k}^{2^k}`.
fn seminorm_power(sys: &AffineSystem, f: &TrigPoly, k: u32, n: u64, reg: &GeneratorRegistry, exec: Exec) -> Result<Complex64> {
    if k == 0 {
        return Ok(f.integral());
    }
    let fbar = f.conj();
    let vals = par::map_ordered(exec, 0..n as usize, |i| -> Result<Complex64> {
        let tf = compose_power(sys, f, i as i64 + 1, reg)?;
        if k == 1 {
            Ok(inner(&tf, f))
        } else {
            seminorm_power(sys, &tf.mul(&fbar)?, k - 1, n, reg, Exec::Sequential)
        }
    });
    let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(par::tree_mean(&vals))
}

/// Cube form for indicators: `E_{t ∈ [1,N]^k} μ(⋂_ω T^{-ω·t} A)`.
fn seminorm_power_indicator(sys: &AffineSystem, gm: &GridMeasure, k: u32, n: u64, reg: &GeneratorRegistry, exec: Exec) -> Result<f64> {
    let k = k as usize;
    let total_t = (n as usize).pow(k as u32);
    let counts = par::map_ordered(exec, 0..total_t, |flat| -> Result<u64> {
        let mut rest = flat;
        let t: Vec<i64> = (0..k)
            .map(|_| {
                let v = (rest % n as usize) as i64 + 1;
                rest /= n as usize;
                v
            })
            .collect();
        let maps: Vec<(&AffineSystem, BigInt)> = (1..(1usize << k))
            .map(|omega| {
                let s: i64 = (0..k).filter(|i| omega >> i & 1 == 1).map(|i| t[i]).sum();
                (sys, BigInt::from(s))
            })
            .collect();
        gm.count(&maps, reg)
    });
    let counts = counts.into_iter().collect::<Result<Vec<_>>>()?;
    let mean: Vec<f64> = counts.iter().map(|&c| c as f64 / gm.total() as f64).collect();
    Ok(par::tree_sum(&mean) / total_t as f64)
}

/// A truncated seminorm value at `N` and at `N/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormEstimate {
    pub k: u32,
    pub n: u64,
    pub value: f64,
    pub value_half: f64,
}

/// `|S_k(f)|^{1/2^k}` at `N` and `N/2`, where `S_0 = ∫ f` and
/// `S_{k+1}(f) = E_{n ∈ [1,N]} S_k(T^n f · f̄)`.
///
/// Trigonometric polynomials are composed exactly; indicators use the cube
/// form on a grid of `grid` points per torus coordinate.
pub fn uniformity_seminorm_estimate(
    sys: &AffineSystem,
    f: &Observable,
    k: u32,
    n: u64,
    grid: u64,
    reg: &GeneratorRegistry,
    exec: Exec,
) -> Result<SeminormEstimate> {
    if k == 0 || k > MAX_SEMINORM_K {
        return Err(Error::LimitExceeded(format!("seminorm order {k} outside 1..={MAX_SEMINORM_K}")));
    }
    if n == 0 {
        return Err(Error::LimitExceeded("N must be positive".into()));
    }
    if f.q() != sys.q() || f.dim() != sys.dim() {
        return Err(Error::DimensionMismatch(format!("observable does not live on the space of `{}`", sys.label())));
    }
    let root = |v: f64| v.abs().powf(1.0 / f64::from(1u32 << k));
    let at = |nn: u64| -> Result<f64> {
        match f {
            Observable::Trig(t) => Ok(root(seminorm_power(sys, t, k, nn, reg, exec)?.norm())),
            Observable::Box(b) => {
                let gm = GridMeasure::new(b.clone(), grid)?;
                Ok(root(seminorm_power_indicator(sys, &gm, k, nn, reg, exec)?))
            }
        }
    };
    Ok(SeminormEstimate { k, n, value: at(n)?, value_half: at((n / 2).max(1))? })
}
