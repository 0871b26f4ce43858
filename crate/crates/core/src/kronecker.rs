//! Projections onto the rational Kronecker factor.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::ergodic_avg::{multiple_average_region, AverageFactor};
use crate::error::{Error, Result};
use crate::exactnum::{eval_numeric, ExactScalar, GeneratorRegistry};
use crate::folner::Region;
use crate::observable::{e, Character, Observable, TermRecord, TrigPoly};
use crate::par::Exec;
use crate::polyring::IntPolynomial;
use crate::torus::{closed_form_iterate, ergodicity_period, AffineSystem, Point};

/// Largest `R` accepted by [`ekrat_estimate`].
pub const MAX_R: u32 = 8;

/// The sequence `a_n = g(S^{n + offset} y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineNilsequence {
    pub sys: AffineSystem,
    pub base: Point,
    pub g: TrigPoly,
    pub offset: i64,
}

impl AffineNilsequence {
    pub fn new(sys: AffineSystem, base: Point, g: TrigPoly) -> Result<Self> {
        if g.q() != sys.q() || g.dim() != sys.dim() || base.x.len() != sys.dim() {
            return Err(Error::DimensionMismatch(format!("nilsequence data does not match `{}`", sys.label())));
        }
        Ok(Self { sys, base, g, offset: 0 })
    }

    pub fn with_offset(mut self, offset: i64) -> Self {
        self.offset = offset;
        self
    }

    /// `a_k`, evaluated numerically.
    pub fn value(&self, k: i64, reg: &GeneratorRegistry) -> Result<Complex64> {
        let p = closed_form_iterate(&self.sys, &self.base, &BigInt::from(k + self.offset));
        let x = p.x.iter().map(|s| eval_numeric(s, reg)).collect::<Result<Vec<_>>>()?;
        Ok(self.g.eval(p.c, &x))
    }

    /// The part of `g` that is constant on each component `{c} × T^d`.
    pub fn component_part(&self) -> TrigPoly {
        self.g.filter(|ch| ch.l.iter().all(|&x| x == 0))
    }

    /// `a − P(a)`, again a basic nilsequence on the same system.
    pub fn minus_projection(&self) -> Self {
        Self { g: self.g.filter(|ch| ch.l.iter().any(|&x| x != 0)), ..self.clone() }
    }

    /// `P(a)` as a nilsequence.
    pub fn projection(&self) -> Self {
        Self { g: self.component_part(), ..self.clone() }
    }
}

/// `P_k(a)`: the integral of `g` over the component containing `S^k y`.
pub fn project_p(a: &AffineNilsequence, k: i64) -> Result<Complex64> {
    ergodicity_period(&a.sys)?;
    let q = a.sys.q();
    let shift = BigInt::from(k + a.offset);
    let ck = a.sys.finite_iterate(a.base.c, &shift);
    Ok(a.component_part()
        .terms()
        .map(|(ch, coef)| coef * e(((ch.j[0] as u64 * ck) % q) as f64 / q as f64))
        .sum())
}

/// Eigenvalue `l·b + j s/q` of a character with `l N = 0`, or `None` if
/// `l N ≠ 0`.
fn eigenvalue(sys: &AffineSystem, ch: &Character) -> Result<Option<ExactScalar>> {
    if sys.matrix().left_apply(&ch.l)?.iter().any(|&x| x != 0) {
        return Ok(None);
    }
    let q = sys.q() as i64;
    let mut lam = ExactScalar::ratio((ch.j[0] * sys.s() as i64).rem_euclid(q), q);
    for (li, b) in ch.l.iter().zip(sys.translation()) {
        lam += &b.scale_int(&BigInt::from(*li));
    }
    Ok(Some(lam))
}

/// `E(f | K_rat)` for a trigonometric polynomial, with a period `r` such
/// that the result is `T^r`-invariant.
pub fn kronecker_projection(sys: &AffineSystem, f: &Observable) -> Result<(TrigPoly, u64)> {
    let t = f
        .as_trig()
        .ok_or_else(|| Error::Unsupported("kronecker_projection needs a trigonometric polynomial".into()))?;
    if t.q() != sys.q() || t.dim() != sys.dim() {
        return Err(Error::DimensionMismatch(format!("observable does not live on the space of `{}`", sys.label())));
    }
    let mut out = TrigPoly::new(t.q(), t.dim());
    let mut period = BigInt::from(1);
    for (ch, c) in t.terms() {
        if let Some(lam) = eigenvalue(sys, ch)? {
            if lam.is_rational() {
                let den = lam.mod_one().rational_part().denom().clone();
                period = period.lcm(&den);
                out.add_term(ch.clone(), *c)?;
            }
        }
    }
    let period = period.to_u64().ok_or(Error::Overflow("projection period"))?;
    Ok((out, period))
}

/// Evaluates a projected polynomial at an exact point.
pub fn eval_at(f: &TrigPoly, p: &Point, reg: &GeneratorRegistry) -> Result<Complex64> {
    let x = p.x.iter().map(|s| eval_numeric(s, reg)).collect::<Result<Vec<_>>>()?;
    Ok(f.eval(p.c, &x))
}

/// `lcm(1, …, R)`.
pub fn lcm_upto(r: u32) -> u64 {
    (1..=r as u64).fold(1, |acc, k| acc.lcm(&k))
}

/// `E_{n ≤ N} f(T^{L n} x)` with `L = lcm(1, …, R)`.
pub fn ekrat_estimate(
    sys: &AffineSystem,
    f: &Observable,
    x: &Point,
    r: u32,
    n: u64,
    reg: &GeneratorRegistry,
    exec: Exec,
) -> Result<Complex64> {
    if r > MAX_R {
        return Err(Error::LimitExceeded(format!("R = {r} exceeds {MAX_R}")));
    }
    let l = lcm_upto(r.max(1));
    let factor = AverageFactor::new(sys.clone(), x.clone(), IntPolynomial::var_n().scale(&BigInt::from(l)));
    let region = Region::rect(0, 0, 1, n as i64);
    multiple_average_region(&[factor], std::slice::from_ref(f), &region, reg, exec)
}

/// Serialized form of a projection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRecord {
    pub system: String,
    pub period: u64,
    pub terms: Vec<TermRecord>,
}

impl ProjectionRecord {
    pub fn new(sys: &AffineSystem, proj: &TrigPoly, period: u64) -> Self {
        Self { system: sys.label().to_string(), period, terms: proj.to_records() }
    }
}

/// Whether `f ∘ T^r = f` holds exactly for a trigonometric polynomial:
/// each term's character is fixed by `T^r` and its eigenvalue is trivial.
pub fn is_invariant_under(sys: &AffineSystem, f: &TrigPoly, r: u64) -> Result<bool> {
    let rb = BigInt::from(r);
    let a = sys.power_matrix(&rb);
    let bt = sys.power_translation(&rb);
    let q = sys.q() as i64;
    for (ch, _) in f.terms() {
        for col in 0..sys.dim() {
            let mut acc = BigInt::zero();
            for (row, li) in ch.l.iter().enumerate() {
                acc += &a[row][col] * *li;
            }
            if acc != BigInt::from(ch.l[col]) {
                return Ok(false);
            }
        }
        let mut lam = ExactScalar::from_rational(BigRational::new(
            BigInt::from(ch.j[0]) * BigInt::from(r % q as u64) * sys.s(),
            BigInt::from(q),
        ));
        for (li, b) in ch.l.iter().zip(&bt) {
            lam += &b.scale_int(&BigInt::from(*li));
        }
        if !lam.mod_one().is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::IntMatrix;
    use proptest::prelude::*;

    fn reg() -> GeneratorRegistry {
        GeneratorRegistry::default().with("alpha", "sqrt(2)-1").unwrap()
    }

    fn alpha(c: i64) -> ExactScalar {
        ExactScalar::generator("alpha", BigRational::from_integer(c.into()))
    }

    fn c1() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn project_p_examples() {
        let rot = AffineSystem::rotation("rot", vec![alpha(1)]).unwrap();
        let a = AffineNilsequence::new(rot.clone(), Point::origin(1), TrigPoly::character(1, 0, vec![1])).unwrap();
        for k in -3..4 {
            assert_eq!(project_p(&a, k).unwrap(), Complex64::new(0.0, 0.0));
        }
        let c = Complex64::new(0.3, -2.0);
        let a = AffineNilsequence::new(rot, Point::origin(1), TrigPoly::constant(1, 1, c)).unwrap();
        assert_eq!(project_p(&a, 5).unwrap(), c);

        let z2 = AffineSystem::finite("z2", 2, 1).unwrap();
        let a = AffineNilsequence::new(z2, Point::origin(0), TrigPoly::character(2, 1, vec![])).unwrap();
        assert!((project_p(&a, 1).unwrap() + c1()).norm() < 1e-15);
        assert!((project_p(&a, 2).unwrap() - c1()).norm() < 1e-15);
    }

    #[test]
    fn project_p_rejects_non_ergodic() {
        let half = AffineSystem::rotation("half", vec![ExactScalar::ratio(1, 2)]).unwrap();
        let a = AffineNilsequence::new(half, Point::origin(1), TrigPoly::character(1, 0, vec![1])).unwrap();
        assert!(matches!(project_p(&a, 0), Err(Error::NotErgodic { .. })));
    }

    #[test]
    fn kronecker_projection_examples() {
        let rg = reg();
        let half = AffineSystem::rotation("half", vec![ExactScalar::ratio(1, 2)]).unwrap();
        let f: Observable = TrigPoly::character(1, 0, vec![1]).into();
        let (p, r) = kronecker_projection(&half, &f).unwrap();
        assert_eq!(&p, f.as_trig().unwrap());
        assert_eq!(r, 2);
        assert!(is_invariant_under(&half, &p, r).unwrap());

        let rot = AffineSystem::rotation("rot", vec![alpha(1)]).unwrap();
        let (p, r) = kronecker_projection(&rot, &f).unwrap();
        assert!(p.is_empty());
        assert_eq!(r, 1);

        let k: Observable = TrigPoly::constant(1, 1, Complex64::new(2.0, 1.0)).into();
        assert_eq!(kronecker_projection(&rot, &k).unwrap().0, *k.as_trig().unwrap());

        let boxed: Observable = crate::observable::BoxIndicator::new(1, vec![(BigRational::zero(), BigRational::new(1.into(), 2.into()))], None)
            .unwrap()
            .into();
        assert!(matches!(kronecker_projection(&rot, &boxed), Err(Error::Unsupported(_))));

        let v = ekrat_estimate(&half, &f, &Point::origin(1), 2, 100, &rg, Exec::Sequential).unwrap();
        assert!((v - c1()).norm() < 1e-12);
        let v = ekrat_estimate(&rot, &f, &Point::origin(1), 4, 4000, &rg, Exec::Parallel).unwrap();
        assert!(v.norm() < 0.02);
        let one: Observable = TrigPoly::constant(1, 1, c1()).into();
        assert!((ekrat_estimate(&rot, &one, &Point::origin(1), 6, 50, &rg, Exec::Sequential).unwrap() - c1()).norm() < 1e-12);
        assert!(matches!(ekrat_estimate(&rot, &one, &Point::origin(1), 9, 50, &rg, Exec::Sequential), Err(Error::LimitExceeded(_))));
    }

    #[test]
    fn skew_keeps_only_the_first_coordinate_characters() {
        let skew = AffineSystem::new(
            "skew",
            2,
            1,
            IntMatrix::from_rows(&[vec![0, 0], vec![1, 0]]).unwrap(),
            vec![ExactScalar::ratio(1, 3), alpha(1)],
        )
        .unwrap();
        let mut f = TrigPoly::character(2, 1, vec![3, 0]);
        f.add_term(Character::new(vec![0, 1], vec![0]), c1()).unwrap();
        f.add_term(Character::new(vec![1, 0], vec![0]), c1()).unwrap();
        let (p, r) = kronecker_projection(&skew, &f.into()).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(r, 6);
        assert!(is_invariant_under(&skew, &p, r).unwrap());
    }

    fn arb_poly(q: u64) -> impl Strategy<Value = TrigPoly> {
        prop::collection::vec((-2i64..3, -2i64..3, 0i64..6, -4i32..5, -4i32..5), 1..6).prop_map(move |ts| {
            let mut p = TrigPoly::new(q, 2);
            for (l1, l2, j, re, im) in ts {
                p.add_term(Character::new(vec![l1, l2], vec![j]), Complex64::new(re as f64 / 4.0, im as f64 / 4.0))
                    .unwrap();
            }
            p
        })
    }

    fn battery_system(q: u64, s: u64, k: i64) -> AffineSystem {
        AffineSystem::new(
            "sys",
            q,
            s,
            IntMatrix::from_rows(&[vec![0, 0], vec![k, 0]]).unwrap(),
            vec![ExactScalar::ratio(1, 3), alpha(1)],
        )
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn projection_laws(f in arb_poly(3), k in 0i64..3) {
            let sys = battery_system(3, 1, k);
            let (p, r) = kronecker_projection(&sys, &f.clone().into()).unwrap();
            let (pp, _) = kronecker_projection(&sys, &p.clone().into()).unwrap();
            prop_assert_eq!(&pp, &p);
            prop_assert!(p.l1_norm() <= f.l1_norm() + 1e-12);
            prop_assert!(is_invariant_under(&sys, &p, r).unwrap());
        }

        #[test]
        fn kernel_is_annihilated(f in arb_poly(5), off in -10i64..10, k in -10i64..10) {
            let sys = AffineSystem::new(
                "e",
                5,
                2,
                IntMatrix::from_rows(&[vec![0, 0], vec![1, 0]]).unwrap(),
                vec![alpha(1), ExactScalar::ratio(1, 4)],
            ).unwrap();
            let a = AffineNilsequence::new(sys, Point::new(1, vec![ExactScalar::ratio(1, 7), alpha(2)]), f).unwrap().with_offset(off);
            prop_assert_eq!(project_p(&a.minus_projection(), k).unwrap(), Complex64::new(0.0, 0.0));
            let pa = a.projection();
            prop_assert!((project_p(&pa, k).unwrap() - project_p(&a, k).unwrap()).norm() < 1e-12);
            let rg = reg();
            let lhs = a.value(k, &rg).unwrap() - pa.value(k, &rg).unwrap();
            prop_assert!((lhs - a.minus_projection().value(k, &rg).unwrap()).norm() < 1e-9);
        }
    }
}
