//! Well-distribution of joint polynomial orbits
//! `(m, n) ↦ (T_1^{e_1(m,n)} x_1, …, T_ℓ^{e_ℓ(m,n)} x_ℓ)`.
//!
//! By Weyl's criterion the orbit is well-distributed on the product torus iff
//! for every nonzero integer vector `l` the polynomial `l · q(m, n)` has an
//! irrational non-constant coefficient. Writing each coefficient in terms of
//! the registered generators turns this into an integer null-lattice problem.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{parse_rational, rational_to_string, ExactScalar, GeneratorRegistry};
use crate::folner::Region;
use crate::lattice;
use crate::numeric::{phase_average, OrbitEval, PhasePoly};
use crate::observable::{torus_characters_up_to, Character};
use crate::par::Exec;
use crate::polyring::{ExactPolynomial, IntPolynomial, Monomial};
use crate::torus::{orbit_polynomial, AffineSystem, OrbitPolynomial, Point};

/// One coordinate block of a joint orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitFactor {
    pub system: AffineSystem,
    pub point: Point,
    pub exponent: ExactPolynomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointOrbit {
    factors: Vec<OrbitFactor>,
    orbits: Vec<OrbitPolynomial>,
}

impl JointOrbit {
    pub fn new(factors: Vec<OrbitFactor>) -> Result<Self> {
        let orbits = factors
            .iter()
            .map(|f| orbit_polynomial(&f.system, &f.point, &f.exponent))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { factors, orbits })
    }

    /// Exponents `m + p_i(n)` (or `p_i(n)` when `with_m` is false).
    pub fn from_polys(items: &[(AffineSystem, Point)], polys: &[IntPolynomial], with_m: bool) -> Result<Self> {
        if items.len() != polys.len() {
            return Err(Error::DimensionMismatch(format!("{} factors, {} polynomials", items.len(), polys.len())));
        }
        let factors = items
            .iter()
            .zip(polys)
            .map(|((system, point), p)| OrbitFactor {
                system: system.clone(),
                point: point.clone(),
                exponent: if with_m { p.shifted_exponent() } else { p.to_exact() },
            })
            .collect();
        Self::new(factors)
    }

    pub fn factors(&self) -> &[OrbitFactor] {
        &self.factors
    }

    pub fn orbits(&self) -> &[OrbitPolynomial] {
        &self.orbits
    }

    /// Total torus dimension `D = Σ d_i`.
    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.system.dim()).sum()
    }

    /// Largest degree in `n` among the exponents.
    pub fn degree_n(&self) -> u32 {
        self.factors.iter().map(|f| f.exponent.degree_n()).max().unwrap_or(0)
    }

    fn coords(&self) -> impl Iterator<Item = &ExactPolynomial> {
        self.orbits.iter().flat_map(|o| o.coords.iter())
    }

    fn check_character(&self, ch: &Character) -> Result<()> {
        if ch.l.len() != self.total_dim() || (!ch.j.is_empty() && ch.j.len() != self.factors.len()) {
            return Err(Error::DimensionMismatch(format!(
                "character {ch} does not fit {} factors of total dimension {}",
                self.factors.len(),
                self.total_dim()
            )));
        }
        Ok(())
    }

    /// The symbolic phase `ch · q(m, n)`, finite parts included.
    pub fn phase_polynomial(&self, ch: &Character) -> Result<ExactPolynomial> {
        self.check_character(ch)?;
        let mut acc = ExactPolynomial::zero();
        for (l, coord) in ch.l.iter().zip(self.coords()) {
            if *l != 0 {
                acc = acc.add(&coord.scale(&BigRational::from_integer((*l).into())));
            }
        }
        for (j, o) in ch.j.iter().zip(&self.orbits) {
            let f = &o.finite;
            if *j == 0 || f.q == 1 {
                continue;
            }
            let w = BigRational::new(BigInt::from(*j), BigInt::from(f.q));
            let fin = f
                .exponent
                .scale(&BigRational::from_integer(f.s.into()))
                .add(&ExactPolynomial::rational_constant(BigRational::from_integer(f.c0.into())));
            acc = acc.add(&fin.scale(&w));
        }
        Ok(acc)
    }

    /// Whether every non-constant coefficient of `ch · q` is rational.
    pub fn is_obstruction(&self, ch: &Character) -> Result<bool> {
        Ok(!ch.l.iter().all(|&x| x == 0) && self.phase_polynomial(ch)?.non_constant_terms().all(|(_, c)| c.is_rational()))
    }

    /// The least `r` such that `ch · q` is constant mod one on every class
    /// `(a, b) + r Z²`, for an obstruction character.
    pub fn certificate_period(&self, ch: &Character) -> Result<u64> {
        let p = self.phase_polynomial(ch)?;
        let mut r = BigInt::one();
        for (_, c) in p.non_constant_terms() {
            if !c.is_rational() {
                return Err(Error::Hypothesis(format!("character {ch} has an irrational coefficient")));
            }
            r = r.lcm(c.rational_part().denom());
        }
        r.to_u64().ok_or(Error::Overflow("certificate period"))
    }
}

/// Exact verdict for one connected component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    WellDistributed,
    Obstruction {
        character: Character,
        /// Non-constant monomials of `l · q`, all with rational coefficients.
        certificate: Vec<(Monomial, BigRational)>,
    },
}

impl Verdict {
    pub fn is_well_distributed(&self) -> bool {
        matches!(self, Verdict::WellDistributed)
    }

    pub fn character(&self) -> Option<&Character> {
        match self {
            Verdict::WellDistributed => None,
            Verdict::Obstruction { character, .. } => Some(character),
        }
    }
}

/// The class `(a, b) + r Z²` of `(m, n)` and the finite residues it sees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub r: i64,
    pub a: i64,
    pub b: i64,
    pub residues: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentVerdict {
    pub component: Component,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    /// All finite parts trivial: one verdict for the whole product torus.
    Global(Verdict),
    /// One verdict per congruence class of `(m, n)`.
    Components(Vec<ComponentVerdict>),
}

impl Decision {
    pub fn global(&self) -> Option<&Verdict> {
        match self {
            Decision::Global(v) => Some(v),
            Decision::Components(_) => None,
        }
    }

    pub fn records(&self) -> Vec<VerdictRecord> {
        match self {
            Decision::Global(v) => vec![VerdictRecord::from_verdict(v, None)],
            Decision::Components(cs) => {
                cs.iter().map(|c| VerdictRecord::from_verdict(&c.verdict, Some(c.component.clone()))).collect()
            }
        }
    }
}

/// Torus-part decision for coordinate polynomials `coords` (finite parts ignored).
fn decide_coords(coords: &[&ExactPolynomial], factors: usize) -> Verdict {
    let dim = coords.len();
    let mut monos: Vec<Monomial> = coords.iter().flat_map(|c| c.non_constant_terms().map(|(k, _)| k)).collect();
    monos.sort();
    monos.dedup();
    let mut gens: Vec<String> = coords
        .iter()
        .flat_map(|c| c.non_constant_terms().flat_map(|(_, s)| s.generator_parts().keys().cloned()))
        .collect();
    gens.sort();
    gens.dedup();
    let mut rows = Vec::with_capacity(monos.len() * gens.len());
    for mono in &monos {
        for g in &gens {
            rows.push(coords.iter().map(|c| c.coeff(*mono).generator_part(g)).collect::<Vec<_>>());
        }
    }
    let kernel = lattice::integer_kernel(&rows, dim);
    let Some(first) = kernel.first() else { return Verdict::WellDistributed };
    let l: Vec<i64> = lattice::normalize_primitive(first).iter().map(|x| x.to_i64().expect("small lattice entry")).collect();
    let mut phase = ExactPolynomial::zero();
    for (li, c) in l.iter().zip(coords) {
        phase = phase.add(&c.scale(&BigRational::from_integer((*li).into())));
    }
    let certificate = phase
        .non_constant_terms()
        .map(|(k, c)| {
            debug_assert!(c.is_rational());
            (k, c.rational_part().clone())
        })
        .collect();
    Verdict::Obstruction { character: Character::new(l, vec![0; factors]), certificate }
}

/// Exact Weyl decision.
///
/// With all `q_i = 1` this is a single verdict on the product torus. Otherwise
/// the `(m, n)` plane is split into classes mod `r = lcm(q_i)`; on each class
/// the finite coordinates must be constant, and the torus part is decided
/// for the re-parametrized orbit `(u, v) ↦ q(a + r u, b + r v)`.
pub fn decide_well_distribution(jo: &JointOrbit) -> Result<Decision> {
    let factors = jo.factors.len();
    if jo.factors.iter().all(|f| f.system.q() == 1) {
        let coords: Vec<&ExactPolynomial> = jo.coords().collect();
        return Ok(Decision::Global(decide_coords(&coords, factors)));
    }
    let r = jo.factors.iter().fold(1u64, |acc, f| acc.lcm(&f.system.q())) as i64;
    let rb = BigInt::from(r);
    let mut out = Vec::with_capacity((r * r) as usize);
    for a in 0..r {
        for b in 0..r {
            let mut sub = Vec::with_capacity(factors);
            let mut residues = Vec::with_capacity(factors);
            for f in &jo.factors {
                let e = f.exponent.substitute_affine(&BigInt::from(a), &rb, &BigInt::from(b), &rb);
                let (q, s) = (f.system.q(), f.system.s());
                let scale = BigRational::new(BigInt::from(s), BigInt::from(q));
                if !e.non_constant_terms().all(|(_, c)| (c.rational_part() * &scale).is_integer()) {
                    return Err(Error::Unsupported(format!(
                        "finite part of `{}` is not constant on classes mod {r}",
                        f.system.label()
                    )));
                }
                let e0 = e.constant_term().rational_part().to_integer();
                residues.push(f.system.finite_iterate(f.point.c, &e0));
                sub.push(orbit_polynomial(&f.system, &f.point, &e)?);
            }
            let coords: Vec<&ExactPolynomial> = sub.iter().flat_map(|o| o.coords.iter()).collect();
            out.push(ComponentVerdict {
                component: Component { r, a, b, residues },
                verdict: decide_coords(&coords, factors),
            });
        }
    }
    Ok(Decision::Components(out))
}

/// Numeric evaluator for character sums along a joint orbit.
#[derive(Clone, Debug)]
pub struct JointEval {
    evals: Vec<OrbitEval>,
    bits: u32,
}

impl JointEval {
    pub fn new(jo: &JointOrbit, reg: &GeneratorRegistry) -> Result<Self> {
        let evals = jo.orbits.iter().map(|o| OrbitEval::new(o, reg)).collect::<Result<Vec<_>>>()?;
        Ok(Self { evals, bits: reg.bits() })
    }

    pub fn phase(&self, ch: &Character) -> PhasePoly {
        let mut parts = Vec::new();
        let mut offset = 0;
        let mut per_factor = Vec::with_capacity(self.evals.len());
        for (i, ev) in self.evals.iter().enumerate() {
            let l = &ch.l[offset..offset + ev.dim()];
            let j = ch.j.get(i).copied().unwrap_or(0);
            per_factor.push(ev.character_phase(l, j));
            offset += ev.dim();
        }
        for p in &per_factor {
            parts.push((1, p));
        }
        PhasePoly::combine(self.bits, &parts)
    }

    pub fn character_sum(&self, ch: &Character, region: &Region, exec: Exec) -> Complex64 {
        phase_average(&self.phase(ch), region, exec)
    }
}

/// `E_{(m,n) ∈ region} e(ch · q(m, n))`.
pub fn character_sum(
    jo: &JointOrbit,
    ch: &Character,
    region: &Region,
    reg: &GeneratorRegistry,
    exec: Exec,
) -> Result<Complex64> {
    jo.check_character(ch)?;
    Ok(JointEval::new(jo, reg)?.character_sum(ch, region, exec))
}

/// Largest `|character_sum|` over nonzero torus characters of height at most `h`.
pub fn max_character_sum(
    jo: &JointOrbit,
    h: i64,
    region: &Region,
    reg: &GeneratorRegistry,
    exec: Exec,
) -> Result<(Option<Character>, f64)> {
    let ev = JointEval::new(jo, reg)?;
    let mut best: (Option<Character>, f64) = (None, 0.0);
    for mut ch in torus_characters_up_to(jo.total_dim(), h) {
        ch.j = vec![0; jo.factors.len()];
        let v = ev.character_sum(&ch, region, exec).norm();
        if v > best.1 {
            best = (Some(ch), v);
        }
    }
    Ok(best)
}

/// A certificate term `c · m^m n^n` in serialized form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateTerm {
    pub m: u32,
    pub n: u32,
    pub coefficient: String,
}

/// JSON form of a verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub verdict: String,
    pub character: Option<Character>,
    pub certificate_monomials: Vec<CertificateTerm>,
    pub component: Option<Component>,
}

impl VerdictRecord {
    pub fn from_verdict(v: &Verdict, component: Option<Component>) -> Self {
        match v {
            Verdict::WellDistributed => Self {
                verdict: "well-distributed".into(),
                character: None,
                certificate_monomials: Vec::new(),
                component,
            },
            Verdict::Obstruction { character, certificate } => Self {
                verdict: "obstruction".into(),
                character: Some(character.clone()),
                certificate_monomials: certificate
                    .iter()
                    .map(|(k, c)| CertificateTerm { m: k.m, n: k.n, coefficient: rational_to_string(c) })
                    .collect(),
                component,
            },
        }
    }

    pub fn to_verdict(&self) -> Result<Verdict> {
        match self.verdict.as_str() {
            "well-distributed" => Ok(Verdict::WellDistributed),
            "obstruction" => {
                let character = self
                    .character
                    .clone()
                    .ok_or_else(|| Error::Parse("obstruction record without a character".into()))?;
                let certificate = self
                    .certificate_monomials
                    .iter()
                    .map(|t| Ok((Monomial::new(t.m, t.n), parse_rational(&t.coefficient)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Verdict::Obstruction { character, certificate })
            }
            other => Err(Error::Parse(format!("unknown verdict `{other}`"))),
        }
    }
}

/// The two-factor example `T(x, y) = (x + α, y + 2x + α)` from the origin,
/// with exponents `(n, n²)` or `(m + n, m + n²)`.
pub fn skew_pair(with_m: bool) -> Result<JointOrbit> {
    let alpha = ExactScalar::generator("alpha", BigRational::one());
    let sys = AffineSystem::torus(
        "skew",
        crate::torus::IntMatrix::from_rows(&[vec![0, 0], vec![2, 0]])?,
        vec![alpha.clone(), alpha],
    )?;
    let items = [(sys.clone(), Point::origin(2)), (sys, Point::origin(2))];
    let polys = [IntPolynomial::var_n(), IntPolynomial::parse("n^2")?];
    JointOrbit::from_polys(&items, &polys, with_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observable::e;
    use crate::torus::IntMatrix;
    use proptest::prelude::*;

    fn reg() -> GeneratorRegistry {
        GeneratorRegistry::default().with("alpha", "sqrt(2)-1").unwrap().with("beta", "sqrt(3)-1").unwrap()
    }

    fn alpha(c: i64) -> ExactScalar {
        ExactScalar::generator("alpha", BigRational::from_integer(c.into()))
    }

    fn single(sys: AffineSystem, e: &str) -> JointOrbit {
        let d = sys.dim();
        JointOrbit::new(vec![OrbitFactor { system: sys, point: Point::origin(d), exponent: ExactPolynomial::parse(e).unwrap() }])
            .unwrap()
    }

    #[test]
    fn counterexample_without_m_is_obstructed() {
        let v = decide_well_distribution(&skew_pair(false).unwrap()).unwrap();
        match v.global().unwrap() {
            Verdict::Obstruction { character, certificate } => {
                assert_eq!(character.l, vec![0, 1, -1, 0]);
                assert!(certificate.is_empty(), "l·q vanishes identically");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn counterexample_with_m_is_well_distributed() {
        let v = decide_well_distribution(&skew_pair(true).unwrap()).unwrap();
        assert_eq!(v, Decision::Global(Verdict::WellDistributed));
    }

    #[test]
    fn constant_orbit_is_obstructed() {
        let jo = single(AffineSystem::rotation("r", vec![alpha(1)]).unwrap(), "0");
        let v = decide_well_distribution(&jo).unwrap();
        assert_eq!(v.global().unwrap().character().unwrap().l, vec![1]);
    }

    #[test]
    fn zero_dimensional_is_vacuous() {
        let jo = single(AffineSystem::torus("pt", IntMatrix::zero(0), vec![]).unwrap(), "m + n");
        assert_eq!(decide_well_distribution(&jo).unwrap(), Decision::Global(Verdict::WellDistributed));
    }

    #[test]
    fn rational_rotation_certificate() {
        let jo = single(AffineSystem::rotation("half", vec![ExactScalar::ratio(1, 2)]).unwrap(), "n");
        let v = decide_well_distribution(&jo).unwrap();
        let Verdict::Obstruction { character, certificate } = v.global().unwrap().clone() else { panic!() };
        assert_eq!(certificate, vec![(Monomial::new(0, 1), BigRational::new(1.into(), 2.into()))]);
        assert_eq!(jo.certificate_period(&character).unwrap(), 2);
    }

    #[test]
    fn character_sum_examples() {
        let r = reg();
        let jo = single(AffineSystem::rotation("r", vec![alpha(1)]).unwrap(), "m");
        let zero = Character::new(vec![0], vec![0]);
        assert_eq!(character_sum(&jo, &zero, &Region::rect(1, 100, 1, 3), &r, Exec::Sequential).unwrap(), Complex64::new(1.0, 0.0));

        let half = single(AffineSystem::rotation("h", vec![ExactScalar::ratio(1, 2)]).unwrap(), "m");
        let s = character_sum(&half, &Character::new(vec![1], vec![0]), &Region::rect(1, 2000, 1, 1), &r, Exec::Sequential).unwrap();
        assert!(s.norm() < 1e-12);

        let s = character_sum(&jo, &Character::new(vec![1], vec![0]), &Region::rect(1, 2000, 1, 1), &r, Exec::Parallel).unwrap();
        let a = 2f64.sqrt() - 1.0;
        let bound = 2.0 / (2000.0 * (Complex64::new(1.0, 0.0) - e(a)).norm());
        assert!(s.norm() <= bound + 1e-12 && s.norm() < 0.01, "{} vs {bound}", s.norm());
    }

    #[test]
    fn obstruction_sums_are_unimodular_on_classes() {
        let r = reg();
        for jo in [
            skew_pair(false).unwrap(),
            single(AffineSystem::rotation("t", vec![ExactScalar::ratio(1, 3)]).unwrap(), "m + n^2"),
        ] {
            let v = decide_well_distribution(&jo).unwrap();
            let ch = v.global().unwrap().character().unwrap().clone();
            assert!(jo.is_obstruction(&ch).unwrap());
            let p = jo.certificate_period(&ch).unwrap() as i64;
            for a in 0..p {
                let reg_ab = Region::rect(1, 300, 1, 12).with_class(p, a, 1);
                assert!(character_sum(&jo, &ch, &reg_ab, &r, Exec::Sequential).unwrap().norm() >= 0.99);
            }
        }
    }

    #[test]
    fn finite_parts_split_into_components() {
        let sys = AffineSystem::new("z2", 2, 1, IntMatrix::zero(1), vec![alpha(1)]).unwrap();
        let jo = single(sys, "m + n");
        let Decision::Components(cs) = decide_well_distribution(&jo).unwrap() else { panic!() };
        assert_eq!(cs.len(), 4);
        assert!(cs.iter().all(|c| c.verdict.is_well_distributed()));
        let res: Vec<u64> = cs.iter().map(|c| c.component.residues[0]).collect();
        assert_eq!(res, vec![0, 1, 1, 0]);

        let bad = AffineSystem::new("z2", 2, 1, IntMatrix::zero(1), vec![alpha(1)]).unwrap();
        let jo = single(bad, "1/2 n^2 + 1/2 n");
        assert!(matches!(decide_well_distribution(&jo), Err(Error::Unsupported(_))));
    }

    #[test]
    fn finite_character_phase() {
        let r = reg();
        let sys = AffineSystem::new("z4", 4, 1, IntMatrix::zero(1), vec![alpha(1)]).unwrap();
        let jo = single(sys, "m");
        let ch = Character::new(vec![0], vec![2]);
        // e(2m/4) = (−1)^m
        let s = character_sum(&jo, &ch, &Region::rect(1, 1, 1, 1), &r, Exec::Sequential).unwrap();
        assert!((s - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(!jo.is_obstruction(&Character::new(vec![0], vec![2])).unwrap());
    }

    #[test]
    fn records_round_trip() {
        for jo in [skew_pair(false).unwrap(), skew_pair(true).unwrap()] {
            for rec in decide_well_distribution(&jo).unwrap().records() {
                let json = serde_json::to_string(&rec).unwrap();
                let back: VerdictRecord = serde_json::from_str(&json).unwrap();
                assert_eq!(back, rec);
                assert_eq!(VerdictRecord::from_verdict(&back.to_verdict().unwrap(), back.component.clone()), rec);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn verdict_ignores_rational_base_points(
            num in proptest::collection::vec(-9i64..10, 4),
            den in proptest::collection::vec(1i64..8, 4),
            with_m in any::<bool>(),
        ) {
            let base = skew_pair(with_m).unwrap();
            let moved: Vec<(AffineSystem, Point)> = base
                .factors()
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let p = Point::new(0, vec![ExactScalar::ratio(num[2 * i], den[2 * i]), ExactScalar::ratio(num[2 * i + 1], den[2 * i + 1])]);
                    (f.system.clone(), p)
                })
                .collect();
            let polys = [IntPolynomial::var_n(), IntPolynomial::parse("n^2").unwrap()];
            let jo = JointOrbit::from_polys(&moved, &polys, with_m).unwrap();
            let a = decide_well_distribution(&base).unwrap();
            let b = decide_well_distribution(&jo).unwrap();
            prop_assert_eq!(a.global().unwrap().is_well_distributed(), b.global().unwrap().is_well_distributed());
            if let Some(ch) = b.global().unwrap().character() {
                prop_assert!(jo.is_obstruction(ch).unwrap());
            }
        }
    }
}
