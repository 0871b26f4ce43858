//! Intersection measures, recurrence scans and the two-variable
//! counterexample.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::equid::{character_sum, decide_well_distribution, max_character_sum, skew_pair, VerdictRecord};
use crate::ergodic_avg::{multiple_average, AverageFactor};
use crate::error::{Error, Result};
use crate::exactnum::{rational_to_string, ExactScalar, GeneratorRegistry};
use crate::folner::{BoxRule, FolnerBox, Region};
use crate::kronecker::kronecker_projection;
use crate::observable::{BoxIndicator, Character, Observable};
use crate::par::{self, Exec};
use crate::polyring::{rational_independence, Independence, IntPolynomial};
use crate::quadrature::{default_grid, GridMeasure};
use crate::torus::{ergodicity_period, AffineSystem, IntMatrix, Point};

/// Default lower-density floor for the final ratio.
pub const DEFAULT_FLOOR: f64 = 0.01;

/// Inputs of a recurrence experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceConfig {
    pub systems: Vec<AffineSystem>,
    pub polys: Vec<IntPolynomial>,
    pub set: BoxIndicator,
    pub epsilon: BigRational,
    pub rule: BoxRule,
    pub schedule: Vec<u64>,
    pub grid: u64,
    /// Starting point used by averaging checks; scans integrate over space.
    pub base_point: Point,
    pub floor: f64,
    /// Set when the independence hypothesis was skipped on purpose.
    pub warning: Option<String>,
}

impl RecurrenceConfig {
    /// Validates shapes and the independence hypothesis.
    pub fn new(systems: Vec<AffineSystem>, polys: Vec<IntPolynomial>, set: BoxIndicator, epsilon: BigRational) -> Result<Self> {
        let cfg = Self::unchecked(systems, polys, set, epsilon)?;
        if let Independence::Dependent(w) = rational_independence(&cfg.polys, true) {
            let w: Vec<String> = w.iter().map(|x| x.to_string()).collect();
            return Err(Error::Hypothesis(format!(
                "polynomials are rationally dependent modulo constants, witness ({})",
                w.join(", ")
            )));
        }
        Ok(cfg)
    }

    /// Same as [`RecurrenceConfig::new`] without the independence check; the
    /// config carries a warning.
    pub fn bypass_hypothesis(systems: Vec<AffineSystem>, polys: Vec<IntPolynomial>, set: BoxIndicator, epsilon: BigRational) -> Result<Self> {
        let mut cfg = Self::unchecked(systems, polys, set, epsilon)?;
        if !rational_independence(&cfg.polys, true).is_independent() {
            cfg.warning = Some("independence hypothesis bypassed: polynomials are rationally dependent; data only".into());
        }
        Ok(cfg)
    }

    fn unchecked(systems: Vec<AffineSystem>, polys: Vec<IntPolynomial>, set: BoxIndicator, epsilon: BigRational) -> Result<Self> {
        if systems.is_empty() || systems.len() != polys.len() {
            return Err(Error::DimensionMismatch(format!("{} systems, {} polynomials", systems.len(), polys.len())));
        }
        for s in &systems {
            if s.q() != set.q() || s.dim() != set.dim() {
                return Err(Error::DimensionMismatch(format!("system `{}` does not act on the set's space", s.label())));
            }
        }
        if let Some(p) = polys.iter().find(|p| !p.constant_term().is_zero()) {
            return Err(Error::Hypothesis(format!("polynomial {p} has a nonzero constant term")));
        }
        if !epsilon.is_positive() {
            return Err(Error::Hypothesis("epsilon must be positive".into()));
        }
        let d = set.dim();
        Ok(Self {
            systems,
            polys,
            set,
            epsilon,
            rule: BoxRule::Default,
            schedule: vec![500, 1000, 2000],
            grid: default_grid(d),
            base_point: Point::origin(d),
            floor: DEFAULT_FLOOR,
            warning: None,
        })
    }

    pub fn with_schedule(mut self, schedule: Vec<u64>) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_grid(mut self, grid: u64) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_rule(mut self, rule: BoxRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn ell(&self) -> usize {
        self.systems.len()
    }

    pub fn degree(&self) -> u32 {
        self.polys.iter().map(|p| p.degree()).max().unwrap_or(1).max(1)
    }

    /// `μ(A)^{ℓ+1}`.
    pub fn target(&self) -> BigRational {
        num_traits::pow(self.set.measure(), self.ell() + 1)
    }

    /// `μ(A)^{ℓ+1} − ε`.
    pub fn threshold(&self) -> BigRational {
        self.target() - &self.epsilon
    }

    pub fn folner_box(&self, n: u64) -> FolnerBox {
        FolnerBox::new(n, self.rule, self.degree())
    }
}

/// Prepared evaluator for `μ(A ∩ ⋂_i T_i^{-(m+p_i(n))} A)`.
#[derive(Clone, Debug)]
pub struct Intersections<'a> {
    cfg: &'a RecurrenceConfig,
    grid: GridMeasure,
    reg: &'a GeneratorRegistry,
}

impl<'a> Intersections<'a> {
    pub fn new(cfg: &'a RecurrenceConfig, reg: &'a GeneratorRegistry) -> Result<Self> {
        let grid = GridMeasure::new(cfg.set.clone(), cfg.grid)?;
        Ok(Self { cfg, grid, reg })
    }

    pub fn measure(&self, m: i64, n: i64) -> Result<BigRational> {
        let exps: Vec<BigInt> = self.cfg.polys.iter().map(|p| BigInt::from(m) + p.eval_i64(m, n)).collect();
        if exps.iter().all(|k| k.is_zero()) {
            return Ok(self.cfg.set.measure());
        }
        let maps: Vec<(&AffineSystem, BigInt)> = self.cfg.systems.iter().zip(exps).collect();
        let count = self.grid.count(&maps, self.reg)?;
        Ok(BigRational::new(count.into(), self.grid.total().into()))
    }
}

/// `μ(A ∩ ⋂_i T_i^{-(m+p_i(n))} A)` on the quadrature grid; exact when
/// `d = 0` or when all exponents vanish.
pub fn intersection_measure(cfg: &RecurrenceConfig, m: i64, n: i64, reg: &GeneratorRegistry) -> Result<BigRational> {
    Intersections::new(cfg, reg)?.measure(m, n)
}

/// Whether each `(m, n)` of `[1, M] × [1, B]` beats the threshold, row-major.
fn good_flags(cfg: &RecurrenceConfig, m_max: u64, b_max: u64, reg: &GeneratorRegistry, exec: Exec) -> Result<Vec<Vec<bool>>> {
    let ix = Intersections::new(cfg, reg)?;
    let thr = cfg.threshold().max(BigRational::zero());
    let rows = par::map_ordered(exec, 0..m_max as usize, |i| -> Result<Vec<bool>> {
        (1..=b_max as i64).map(|n| Ok(ix.measure(i as i64 + 1, n)? > thr)).collect()
    });
    rows.into_iter().collect()
}

/// One line of a density report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub n: u64,
    pub b: u64,
    pub good: u64,
    pub total: u64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub rows: Vec<DensityRow>,
    /// `max(μ(A)^{ℓ+1} − ε, 0)` as an exact rational.
    pub threshold: String,
    pub floor: f64,
    pub consistent: bool,
    pub verdict: String,
    pub warning: Option<String>,
}

impl DensityReport {
    pub const CSV_HEADER: &'static str = "N,b,good,total,ratio";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{:.17e}\n", r.n, r.b, r.good, r.total, r.ratio));
        }
        out
    }
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

/// Lower-density scan over the configured schedule.
///
/// The good set is computed once on the largest box; every scheduled box is
/// a sub-rectangle of it.
pub fn recurrence_scan(cfg: &RecurrenceConfig, reg: &GeneratorRegistry, exec: Exec) -> Result<DensityReport> {
    if cfg.schedule.is_empty() || cfg.schedule.contains(&0) {
        return Err(Error::LimitExceeded("schedule needs positive N values".into()));
    }
    let boxes: Vec<FolnerBox> = cfg.schedule.iter().map(|&n| cfg.folner_box(n)).collect();
    let m_max = boxes.iter().map(|b| b.n).max().unwrap_or(1);
    let b_max = boxes.iter().map(|b| b.height()).max().unwrap_or(1);
    let flags = good_flags(cfg, m_max, b_max, reg, exec)?;
    let rows: Vec<DensityRow> = boxes
        .iter()
        .map(|bx| {
            let b = bx.height();
            let good = flags[..bx.n as usize]
                .iter()
                .map(|row| row[..b as usize].iter().filter(|&&g| g).count() as u64)
                .sum();
            let total = bx.size();
            DensityRow { n: bx.n, b, good, total, ratio: good as f64 / total as f64 }
        })
        .collect();
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let last = *ratios.last().expect("nonempty schedule");
    let med = median(&ratios);
    let consistent = last >= cfg.floor && last >= med / 2.0;
    let verdict = if consistent {
        format!("consistent: final ratio {last:.6} ≥ floor {} and ≥ half the median {med:.6}", cfg.floor)
    } else if last < cfg.floor {
        format!("inconsistent: final ratio {last:.6} below floor {}", cfg.floor)
    } else {
        format!("inconsistent: final ratio {last:.6} below half the median {med:.6}")
    };
    Ok(DensityReport {
        rows,
        threshold: rational_to_string(&cfg.threshold().max(BigRational::zero())),
        floor: cfg.floor,
        consistent,
        verdict,
        warning: cfg.warning.clone(),
    })
}

/// Scan statistics restricted to one class `(a, b) + r Z²`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRow {
    pub a: i64,
    pub b: i64,
    pub good: u64,
    pub total: u64,
}

/// Good counts of the box `Φ_N` split into the `r²` classes mod `r`.
pub fn class_scan(cfg: &RecurrenceConfig, n: u64, r: i64, reg: &GeneratorRegistry, exec: Exec) -> Result<(DensityRow, Vec<ClassRow>)> {
    if r < 1 {
        return Err(Error::LimitExceeded(format!("class modulus {r}")));
    }
    let bx = cfg.folner_box(n);
    let b = bx.height();
    let flags = good_flags(cfg, n, b, reg, exec)?;
    let mut classes: Vec<ClassRow> = (0..r * r).map(|k| ClassRow { a: k / r, b: k % r, good: 0, total: 0 }).collect();
    let mut good = 0;
    for (i, row) in flags.iter().enumerate() {
        for (j, &g) in row.iter().enumerate() {
            let (m, nn) = (i as i64 + 1, j as i64 + 1);
            let c = &mut classes[(m.rem_euclid(r) * r + nn.rem_euclid(r)) as usize];
            c.total += 1;
            if g {
                c.good += 1;
                good += 1;
            }
        }
    }
    let total = bx.size();
    Ok((DensityRow { n, b, good, total, ratio: good as f64 / total as f64 }, classes))
}

/// Result of comparing a multiple average with its rational-Kronecker
/// counterpart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharFactorCheck {
    pub n: u64,
    pub b: u64,
    pub average: (f64, f64),
    /// `None` when some projection vanishes.
    pub projected_average: Option<(f64, f64)>,
    pub deviation: f64,
}

/// `|A(f) − A(E(f | K_rat))|` at the largest scheduled `N`, or `|A(f)|` when
/// some projection is zero.
pub fn characteristic_factor_check(cfg: &RecurrenceConfig, obs: &[Observable], reg: &GeneratorRegistry, exec: Exec) -> Result<CharFactorCheck> {
    if obs.len() != cfg.ell() {
        return Err(Error::DimensionMismatch(format!("{} observables for {} systems", obs.len(), cfg.ell())));
    }
    let n = cfg.schedule.iter().copied().max().unwrap_or(1);
    let bx = cfg.folner_box(n);
    let factors: Vec<AverageFactor> = cfg
        .systems
        .iter()
        .zip(&cfg.polys)
        .map(|(s, p)| AverageFactor::new(s.clone(), cfg.base_point.clone(), p.clone()))
        .collect();
    let projected = cfg
        .systems
        .iter()
        .zip(obs)
        .map(|(s, o)| Ok(Observable::from(kronecker_projection(s, o)?.0)))
        .collect::<Result<Vec<_>>>()?;
    let avg = multiple_average(&factors, obs, &bx, reg, exec)?;
    let any_zero = projected.iter().any(|p| p.as_trig().is_some_and(|t| t.is_empty()));
    let (proj, deviation) = if any_zero {
        (None, avg.norm())
    } else {
        let p = multiple_average(&factors, &projected, &bx, reg, exec)?;
        (Some((p.re, p.im)), (avg - p).norm())
    };
    Ok(CharFactorCheck { n, b: bx.height(), average: (avg.re, avg.im), projected_average: proj, deviation })
}

/// `∫ 1_A ∏_i E(1_A | K_r(T_i)) dμ` against `μ(A)^{ℓ+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrBound {
    pub r: u64,
    pub integral: String,
    pub target: String,
    pub tolerance: f64,
    pub holds: bool,
}

/// Exact evaluation of the final integral bound.
///
/// For `r` a multiple of every ergodicity period, `T_i^r` is ergodic on each
/// `T_i^r`-orbit of components, so `E(1_A | K_r(T_i))` is the average of
/// `μ_c(A)` over the residues `c' ≡ c mod gcd(r s_i, q)`.
pub fn kr_integral_bound(cfg: &RecurrenceConfig, tolerance: f64) -> Result<KrBound> {
    let q = cfg.set.q();
    let mut r = 1u64;
    for s in &cfg.systems {
        let p = if s.dim() == 0 { s.q() } else { ergodicity_period(s)? };
        r = r.lcm(&p);
    }
    let vol = cfg.set.box_volume();
    let local = |c: u64| if cfg.set.contains_residue(c) { vol.clone() } else { BigRational::zero() };
    let mut integral = BigRational::zero();
    for c in 0..q {
        if !cfg.set.contains_residue(c) {
            continue;
        }
        let mut term = vol.clone();
        for s in &cfg.systems {
            let g = ((r % q) * s.s() % q).gcd(&q);
            let g = if g == 0 { q } else { g };
            let class: Vec<u64> = (0..q).filter(|c2| c2 % g == c % g).collect();
            let mean = class.iter().fold(BigRational::zero(), |acc, &c2| acc + local(c2))
                / BigRational::from_integer((class.len() as i64).into());
            term *= mean;
        }
        integral += term;
    }
    integral /= BigRational::from_integer((q as i64).into());
    let target = cfg.target();
    let tol = BigRational::from_float(tolerance).ok_or_else(|| Error::Parse(format!("tolerance {tolerance}")))?;
    let holds = integral >= &target - tol;
    Ok(KrBound { r, integral: rational_to_string(&integral), target: rational_to_string(&target), tolerance, holds })
}

/// One numeric sample in the demo report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumSample {
    pub n: u64,
    pub b: u64,
    pub character: Character,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
}

impl SumSample {
    fn new(n: u64, b: u64, character: Character, v: Complex64) -> Self {
        Self { n, b, character, re: v.re, im: v.im, modulus: v.norm() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoSide {
    pub exponents: Vec<String>,
    pub verdicts: Vec<VerdictRecord>,
    pub sums: Vec<SumSample>,
}

/// Side-by-side comparison of the skew pair with and without `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub system: String,
    pub without_m: DemoSide,
    pub with_m: DemoSide,
    pub notes: Vec<String>,
}

/// Box heights and `N` values used by [`counterexample_demo`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemoParams {
    pub schedule: Vec<u64>,
    pub height: i64,
    pub tall: u64,
}

impl Default for DemoParams {
    fn default() -> Self {
        Self { schedule: vec![500, 1000, 2000, 4000], height: 2, tall: 400 }
    }
}

/// Runs the exact decision on the skew pair with and without `m` and the
/// matching character sums.
pub fn counterexample_demo(params: &DemoParams, reg: &GeneratorRegistry, exec: Exec) -> Result<DemoReport> {
    let without = skew_pair(false)?;
    let dec = decide_well_distribution(&without)?;
    let ch = dec
        .global()
        .and_then(|v| v.character().cloned())
        .ok_or_else(|| Error::Unsupported("expected an obstruction without m".into()))?;
    let mut sums = Vec::new();
    for &n in &params.schedule {
        let v = character_sum(&without, &ch, &Region::rect(0, 0, 1, n as i64), reg, exec)?;
        sums.push(SumSample::new(n, 1, ch.clone(), v));
    }
    let without_m = DemoSide { exponents: vec!["n".into(), "n^2".into()], verdicts: dec.records(), sums };

    let with = skew_pair(true)?;
    let dec_m = decide_well_distribution(&with)?;
    let mut sums = Vec::new();
    let n_last = params.schedule.iter().copied().max().unwrap_or(1);
    let default_b = FolnerBox::new(n_last, BoxRule::Default, 2).height();
    for b in [default_b, params.tall] {
        let region = Region::rect(1, n_last as i64, 1, b as i64);
        let (best, v) = max_character_sum(&with, params.height, &region, reg, exec)?;
        let best = best.unwrap_or_else(|| Character::new(vec![0; 4], vec![0, 0]));
        let z = character_sum(&with, &best, &region, reg, exec)?;
        debug_assert!((z.norm() - v).abs() < 1e-12);
        sums.push(SumSample::new(n_last, b, best, z));
    }
    let v = character_sum(&with, &ch, &Region::rect(1, n_last as i64, 1, default_b as i64), reg, exec)?;
    sums.push(SumSample::new(n_last, default_b, ch.clone(), v));
    let with_m = DemoSide { exponents: vec!["m+n".into(), "m+n^2".into()], verdicts: dec_m.records(), sums };
    Ok(DemoReport {
        system: "T(x,y) = (x + alpha, y + 2x + alpha) from the origin, twice".into(),
        without_m,
        with_m,
        notes: vec![
            "without m the obstruction character has unit-modulus sums at every N".into(),
            format!("with m the largest sum over nonzero characters of height <= {} is listed per box height", params.height),
        ],
    })
}

/// The rotation–skew pair on `T²` used by the desk-scale recurrence run.
pub fn rotation_skew_pair() -> Result<Vec<AffineSystem>> {
    let alpha = ExactScalar::generator("alpha", BigRational::one());
    let beta = ExactScalar::generator("beta", BigRational::one());
    let rot = AffineSystem::rotation("rotation", vec![alpha.clone(), beta.clone()])?;
    let skew = AffineSystem::torus("skew", IntMatrix::from_rows(&[vec![0, 0], vec![2, 0]])?, vec![alpha, beta])?;
    Ok(vec![rot, skew])
}

fn half_square() -> Result<BoxIndicator> {
    let half = (BigRational::zero(), BigRational::new(1.into(), 2.into()));
    BoxIndicator::new(1, vec![half.clone(), half], None)
}

/// `ℓ = 2`, `p = (n, n²)`, `A = [0,1/2)²`, `ε = 1/20`.
pub fn rotation_skew_config() -> Result<RecurrenceConfig> {
    let polys = vec![IntPolynomial::var_n(), IntPolynomial::parse("n^2")?];
    RecurrenceConfig::new(rotation_skew_pair()?, polys, half_square()?, BigRational::new(1.into(), 20.into()))
}

/// `ℓ = 3`, `p = (0, n, 2n)`: rationally dependent, run with the hypothesis
/// check bypassed.
pub fn open_problem_config() -> Result<RecurrenceConfig> {
    let mut systems = rotation_skew_pair()?;
    systems.push(systems[1].clone());
    let polys = vec![IntPolynomial::zero(), IntPolynomial::var_n(), IntPolynomial::parse("2n")?];
    RecurrenceConfig::bypass_hypothesis(systems, polys, half_square()?, BigRational::new(1.into(), 20.into()))
}

/// Exponent magnitude helper for reports.
pub fn exponent_bits(cfg: &RecurrenceConfig, m: i64, n: i64) -> u64 {
    cfg.polys.iter().map(|p| (BigInt::from(m) + p.eval_i64(m, n)).bits()).max().unwrap_or(0)
}

/// Converts an exact measure to `f64`.
pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
