//! Unipotent affine systems on `Z_q × T^d`.
//!
//! The map is `(c, x) ↦ (c + s mod q, x + N x + b)` with `N` a nilpotent
//! integer matrix. Iterates have the closed form
//! `T^n x = x + Σ_{r<d} C(n, r+1) N^r (N x + b)`, which is a polynomial in `n`
//! and so extends to symbolic exponents.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;
use crate::lattice;
use crate::observable::Character;
use crate::polyring::{binomial_poly, int_binomial, ExactPolynomial};

/// Square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    d: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zero(d: usize) -> Self {
        Self { d, data: vec![0; d * d] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zero(d);
        for i in 0..d {
            m.data[i * d + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch("matrix must be square".into()));
        }
        Ok(Self { d, data: rows.iter().flatten().copied().collect() })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.d + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.d.max(1)).take(self.d).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let d = self.d;
        let mut out = Self::zero(d);
        for i in 0..d {
            for j in 0..d {
                let mut acc: i64 = 0;
                for k in 0..d {
                    acc = self
                        .get(i, k)
                        .checked_mul(other.get(k, j))
                        .and_then(|t| acc.checked_add(t))
                        .ok_or(Error::Overflow("matrix product"))?;
                }
                out.data[i * d + j] = acc;
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[ExactScalar]) -> Vec<ExactScalar> {
        (0..self.d)
            .map(|i| {
                let mut acc = ExactScalar::zero();
                for (j, vj) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if a != 0 {
                        acc += &vj.scale_int(&BigInt::from(a));
                    }
                }
                acc
            })
            .collect()
    }

    /// Row vector times matrix, `l · M`.
    pub fn left_apply(&self, l: &[i64]) -> Result<Vec<i64>> {
        (0..self.d)
            .map(|j| {
                l.iter().enumerate().try_fold(0i64, |acc, (i, &li)| {
                    li.checked_mul(self.get(i, j))
                        .and_then(|t| acc.checked_add(t))
                        .ok_or(Error::Overflow("character transform"))
                })
            })
            .collect()
    }
}

/// A point `(c, x)` with `x` stored mod one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub c: u64,
    pub x: Vec<ExactScalar>,
}

impl Point {
    pub fn new(c: u64, x: Vec<ExactScalar>) -> Self {
        Self { c, x: x.iter().map(ExactScalar::mod_one).collect() }
    }

    pub fn origin(d: usize) -> Self {
        Self { c: 0, x: vec![ExactScalar::zero(); d] }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; ", self.c)?;
        for (i, x) in self.x.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSystem {
    label: String,
    q: u64,
    s: u64,
    n: IntMatrix,
    b: Vec<ExactScalar>,
    /// `N^0, …, N^{d-1}`
    powers: Vec<IntMatrix>,
}

impl AffineSystem {
    pub fn new(label: &str, q: u64, s: u64, n: IntMatrix, b: Vec<ExactScalar>) -> Result<Self> {
        if q == 0 {
            return Err(Error::DimensionMismatch("q must be positive".into()));
        }
        let d = n.dim();
        if b.len() != d {
            return Err(Error::DimensionMismatch(format!("translation has {} entries, matrix is {d}×{d}", b.len())));
        }
        let mut powers = vec![IntMatrix::identity(d)];
        let mut p = IntMatrix::identity(d);
        for _ in 0..d {
            p = p.checked_mul(&n)?;
            powers.push(p.clone());
        }
        if !powers.pop().expect("d+1 powers").is_zero() {
            return Err(Error::NotNilpotent);
        }
        powers.truncate(d.max(1));
        if d == 0 {
            powers.clear();
        }
        Ok(Self { label: label.to_owned(), q, s: s % q, n, b: b.iter().map(ExactScalar::mod_one).collect(), powers })
    }

    /// A connected torus system (`q = 1`).
    pub fn torus(label: &str, n: IntMatrix, b: Vec<ExactScalar>) -> Result<Self> {
        Self::new(label, 1, 0, n, b)
    }

    /// The rotation `x ↦ x + b`.
    pub fn rotation(label: &str, b: Vec<ExactScalar>) -> Result<Self> {
        let d = b.len();
        Self::torus(label, IntMatrix::zero(d), b)
    }

    /// The cyclic rotation `c ↦ c + s` on `Z_q`.
    pub fn finite(label: &str, q: u64, s: u64) -> Result<Self> {
        Self::new(label, q, s, IntMatrix::zero(0), Vec::new())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.n.dim()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.n
    }

    pub fn translation(&self) -> &[ExactScalar] {
        &self.b
    }

    /// `N^r` for `r < d`.
    pub fn nilpotent_power(&self, r: usize) -> &IntMatrix {
        &self.powers[r]
    }

    fn check_point(&self, p: &Point) {
        debug_assert_eq!(p.x.len(), self.dim(), "point dimension");
        debug_assert!(p.c < self.q, "residue out of range");
    }

    fn shift_c(&self, c: u64, k: &BigInt) -> u64 {
        let q = BigInt::from(self.q);
        let v = (BigInt::from(c) + k * BigInt::from(self.s)).mod_floor(&q);
        v.to_u64().expect("reduced mod q")
    }

    /// One application of the map.
    pub fn step(&self, p: &Point) -> Point {
        self.check_point(p);
        let nx = self.n.apply(&p.x);
        let x = p.x.iter().zip(&nx).zip(&self.b).map(|((x, y), b)| &(x + y) + b).collect();
        Point::new((p.c + self.s) % self.q, x)
    }

    /// The inverse map `(c, x) ↦ (c − s, (I+N)^{-1}(x − b))`,
    /// with `(I+N)^{-1} = Σ_r (−N)^r`.
    pub fn step_inverse(&self, p: &Point) -> Point {
        self.check_point(p);
        let y: Vec<ExactScalar> = p.x.iter().zip(&self.b).map(|(x, b)| x - b).collect();
        let mut x = vec![ExactScalar::zero(); self.dim()];
        for (r, pow) in self.powers.iter().enumerate() {
            let t = pow.apply(&y);
            for (xi, ti) in x.iter_mut().zip(&t) {
                if r % 2 == 0 {
                    *xi += ti;
                } else {
                    *xi -= ti;
                }
            }
        }
        Point::new((p.c + self.q - self.s) % self.q, x)
    }

    /// Translation part of `T^k`: `Σ_{r<d} C(k, r+1) N^r b`.
    pub fn power_translation(&self, k: &BigInt) -> Vec<ExactScalar> {
        let mut out = vec![ExactScalar::zero(); self.dim()];
        for (r, pow) in self.powers.iter().enumerate() {
            let c = int_binomial(k, r as u32 + 1);
            if c.is_zero() {
                continue;
            }
            for (o, t) in out.iter_mut().zip(pow.apply(&self.b)) {
                *o += &t.scale_int(&c);
            }
        }
        out
    }

    /// Linear part of `T^k`: `(I+N)^k = Σ_{r<d} C(k, r) N^r`.
    pub fn power_matrix(&self, k: &BigInt) -> Vec<Vec<BigInt>> {
        let d = self.dim();
        let mut out = vec![vec![BigInt::zero(); d]; d];
        for (r, pow) in self.powers.iter().enumerate() {
            let c = int_binomial(k, r as u32);
            for i in 0..d {
                for j in 0..d {
                    let a = pow.get(i, j);
                    if a != 0 {
                        out[i][j] += &c * a;
                    }
                }
            }
        }
        out
    }

    /// Finite residue after `k` steps from `c`.
    pub fn finite_iterate(&self, c: u64, k: &BigInt) -> u64 {
        self.shift_c(c, k)
    }

    /// The invariant-character test: a nonzero `(j, l)` with `l·N = 0` and
    /// `j s/q + l·b` rational, if one exists.
    ///
    /// Such a character is an eigenfunction with a root-of-unity eigenvalue,
    /// so its existence rules out ergodicity of some power of the map.
    pub fn invariant_character(&self) -> Option<Character> {
        let g = self.s.gcd(&self.q);
        if self.q > 1 && g != 1 {
            let j = (self.q / g) as i64;
            return Some(Character::new(vec![0; self.dim()], vec![j]));
        }
        let kernel = self.rational_eigen_lattice();
        kernel.first().map(|v| {
            let l = lattice::normalize_primitive(v).iter().map(|x| x.to_i64().expect("small")).collect();
            Character::new(l, vec![0])
        })
    }

    /// HNF basis of `{l ∈ Z^d : l·N = 0, l·b ∈ Q}`.
    pub fn rational_eigen_lattice(&self) -> Vec<Vec<BigInt>> {
        let d = self.dim();
        if d == 0 {
            return Vec::new();
        }
        let mut rows: Vec<Vec<BigRational>> = (0..d)
            .map(|col| (0..d).map(|i| BigRational::from_integer(self.n.get(i, col).into())).collect())
            .collect();
        let mut gens: Vec<&String> = self.b.iter().flat_map(|s| s.generator_parts().keys()).collect();
        gens.sort();
        gens.dedup();
        for g in gens {
            rows.push(self.b.iter().map(|s| s.generator_part(g)).collect());
        }
        lattice::integer_kernel(&rows, d)
    }
}

/// `T^n p` via the closed form. `n` may be negative or huge.
pub fn closed_form_iterate(sys: &AffineSystem, p: &Point, n: &BigInt) -> Point {
    sys.check_point(p);
    let nx = sys.n.apply(&p.x);
    let v: Vec<ExactScalar> = nx.iter().zip(&sys.b).map(|(a, b)| a + b).collect();
    let mut x = p.x.clone();
    for (r, pow) in sys.powers.iter().enumerate() {
        let c = int_binomial(n, r as u32 + 1);
        if c.is_zero() {
            continue;
        }
        for (xi, t) in x.iter_mut().zip(pow.apply(&v)) {
            *xi += &t.scale_int(&c);
        }
    }
    Point::new(sys.shift_c(p.c, n), x)
}

/// The finite coordinate along a symbolic orbit: `c0 + e(m,n)·s mod q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePart {
    pub c0: u64,
    pub s: u64,
    pub q: u64,
    pub exponent: ExactPolynomial,
}

impl FinitePart {
    pub fn eval(&self, m: &BigInt, n: &BigInt) -> u64 {
        if self.q == 1 {
            return 0;
        }
        let e = self
            .exponent
            .eval_rational(m, n)
            .expect("integer-valued exponent checked at construction")
            .to_integer();
        let q = BigInt::from(self.q);
        (BigInt::from(self.c0) + e * BigInt::from(self.s)).mod_floor(&q).to_u64().expect("reduced")
    }
}

/// Symbolic orbit `(m,n) ↦ T^{e(m,n)} p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPolynomial {
    pub coords: Vec<ExactPolynomial>,
    pub finite: FinitePart,
}

impl OrbitPolynomial {
    pub fn eval(&self, m: &BigInt, n: &BigInt) -> Point {
        Point::new(self.finite.eval(m, n), self.coords.iter().map(|c| c.eval(m, n)).collect())
    }
}

/// Coordinates of `T^{e(m,n)} p` as polynomials in `m, n`.
pub fn orbit_polynomial(sys: &AffineSystem, p: &Point, e: &ExactPolynomial) -> Result<OrbitPolynomial> {
    sys.check_point(p);
    if !e.is_integer_valued() {
        return Err(Error::NotIntegerValued(e.to_string()));
    }
    let nx = sys.n.apply(&p.x);
    let v: Vec<ExactScalar> = nx.iter().zip(&sys.b).map(|(a, b)| a + b).collect();
    let mut coords: Vec<ExactPolynomial> = p.x.iter().map(|x| ExactPolynomial::constant(x.clone())).collect();
    for (r, pow) in sys.powers.iter().enumerate() {
        let w = pow.apply(&v);
        if w.iter().all(ExactScalar::is_zero) {
            continue;
        }
        let binom = binomial_poly(e, r as u32 + 1)?;
        for (coord, wi) in coords.iter_mut().zip(&w) {
            *coord = coord.add(&binom.mul_scalar(wi)?);
        }
    }
    Ok(OrbitPolynomial {
        coords,
        finite: FinitePart { c0: p.c, s: sys.s, q: sys.q, exponent: e.clone() },
    })
}

/// Least `r` such that `T^r` maps each component `{c} × T^d` to itself and
/// is totally ergodic there.
pub fn ergodicity_period(sys: &AffineSystem) -> Result<u64> {
    if let Some(witness) = sys.invariant_character() {
        return Err(Error::NotErgodic { label: sys.label.clone(), witness });
    }
    Ok(sys.q)
}

/// Rational one-step map used by tests: `(c,x) ↦ T(c,x)` as a helper for
/// iterating `k` times.
pub fn iterate_steps(sys: &AffineSystem, p: &Point, k: i64) -> Point {
    let mut cur = p.clone();
    for _ in 0..k.unsigned_abs() {
        cur = if k >= 0 { sys.step(&cur) } else { sys.step_inverse(&cur) };
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn alpha(c: i64) -> ExactScalar {
        ExactScalar::generator("alpha", BigRational::from_integer(c.into()))
    }

    /// (x, y) ↦ (x + α, y + 2x + α)
    pub(crate) fn skew() -> AffineSystem {
        AffineSystem::torus("skew", IntMatrix::from_rows(&[vec![0, 0], vec![2, 0]]).unwrap(), vec![alpha(1), alpha(1)])
            .unwrap()
    }

    #[test]
    fn rejects_non_nilpotent() {
        let n = IntMatrix::from_rows(&[vec![1, 0], vec![0, 0]]).unwrap();
        assert_eq!(AffineSystem::torus("x", n, vec![alpha(1), alpha(1)]), Err(Error::NotNilpotent));
        let n = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(AffineSystem::torus("x", n, vec![alpha(1), alpha(1)]), Err(Error::NotNilpotent));
    }

    #[test]
    fn rotation_iterate() {
        let sys = AffineSystem::rotation("rot", vec![alpha(1)]).unwrap();
        let p = Point::new(0, vec![ExactScalar::ratio(1, 3)]);
        let got = closed_form_iterate(&sys, &p, &BigInt::from(5));
        assert_eq!(got.x[0], &ExactScalar::ratio(1, 3) + &alpha(5));
    }

    #[test]
    fn skew_orbit_of_origin() {
        let sys = skew();
        for n in [-7i64, 0, 1, 2, 9, 1000] {
            let got = closed_form_iterate(&sys, &Point::origin(2), &BigInt::from(n));
            assert_eq!(got.x, vec![alpha(n), alpha(n * n)]);
        }
    }

    #[test]
    fn skew_orbit_polynomial() {
        let sys = skew();
        let e = ExactPolynomial::parse("m + n^2").unwrap();
        let orb = orbit_polynomial(&sys, &Point::origin(2), &e).unwrap();
        let e2 = e.checked_mul(&e).unwrap();
        let a = ExactScalar::generator("alpha", BigRational::one());
        assert_eq!(orb.coords[0], e.mul_scalar(&a).unwrap());
        assert_eq!(orb.coords[1], e2.mul_scalar(&a).unwrap());
    }

    #[test]
    fn orbit_polynomial_identity_and_rotation() {
        let sys = skew();
        let p = Point::new(0, vec![ExactScalar::ratio(1, 5), alpha(2)]);
        let orb = orbit_polynomial(&sys, &p, &ExactPolynomial::zero()).unwrap();
        assert!(orb.coords.iter().zip(&p.x).all(|(c, x)| c == &ExactPolynomial::constant(x.clone())));

        let rot = AffineSystem::rotation("r", vec![alpha(1), ExactScalar::ratio(1, 7)]).unwrap();
        let orb = orbit_polynomial(&rot, &Point::origin(2), &ExactPolynomial::var_n()).unwrap();
        assert_eq!(orb.coords[0], ExactPolynomial::var_n().mul_scalar(&alpha(1)).unwrap());

        let half_n = ExactPolynomial::parse("1/2 n").unwrap();
        assert!(matches!(orbit_polynomial(&rot, &Point::origin(2), &half_n), Err(Error::NotIntegerValued(_))));
    }

    #[test]
    fn ergodicity_examples() {
        let sys = AffineSystem::new("z2", 2, 1, IntMatrix::zero(1), vec![alpha(1)]).unwrap();
        assert_eq!(ergodicity_period(&sys), Ok(2));
        let rot = AffineSystem::rotation("r", vec![alpha(1)]).unwrap();
        assert_eq!(ergodicity_period(&rot), Ok(1));
        let third = AffineSystem::rotation("third", vec![ExactScalar::ratio(1, 3)]).unwrap();
        match ergodicity_period(&third) {
            Err(Error::NotErgodic { witness, .. }) => assert_eq!(witness.l, vec![1]),
            other => panic!("{other:?}"),
        }
        // s not a generator of Z_4
        let bad = AffineSystem::new("z4", 4, 2, IntMatrix::zero(1), vec![alpha(1)]).unwrap();
        match ergodicity_period(&bad) {
            Err(Error::NotErgodic { witness, .. }) => assert_eq!(witness.j, vec![2]),
            other => panic!("{other:?}"),
        }
        // skew is totally ergodic; the x-coordinate alone carries α
        assert_eq!(ergodicity_period(&skew()), Ok(1));
        // skew with rational base rotation: e(x) has eigenvalue e(1/2)
        let s2 = AffineSystem::torus(
            "s2",
            IntMatrix::from_rows(&[vec![0, 0], vec![1, 0]]).unwrap(),
            vec![ExactScalar::ratio(1, 2), alpha(1)],
        )
        .unwrap();
        match ergodicity_period(&s2) {
            Err(Error::NotErgodic { witness, .. }) => assert_eq!(witness.l, vec![1, 0]),
            other => panic!("{other:?}"),
        }
    }

    fn arb_system() -> impl Strategy<Value = AffineSystem> {
        (1usize..4, 1u64..5, 0u64..5, proptest::collection::vec(-3i64..4, 16), proptest::collection::vec((-5i64..6, 1i64..7, -3i64..4), 4))
            .prop_map(|(d, q, s, entries, bs)| {
                let rows: Vec<Vec<i64>> = (0..d)
                    .map(|i| (0..d).map(|j| if j < i { entries[i * 4 + j] } else { 0 }).collect())
                    .collect();
                let b = bs[..d]
                    .iter()
                    .map(|&(a, den, g)| &ExactScalar::ratio(a, den) + &alpha(g))
                    .collect();
                AffineSystem::new("rand", q, s, IntMatrix::from_rows(&rows).unwrap(), b).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn cocycle_identity(sys in arb_system(), a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000) {
            let p = Point::origin(sys.dim());
            let ab = closed_form_iterate(&sys, &p, &BigInt::from(a + b));
            let stepwise = closed_form_iterate(&sys, &closed_form_iterate(&sys, &p, &BigInt::from(a)), &BigInt::from(b));
            prop_assert_eq!(ab, stepwise);
        }

        #[test]
        fn inverse_round_trip(sys in arb_system(), n in -1_000_000i64..1_000_000) {
            let p = Point::new(0, vec![ExactScalar::ratio(2, 7); sys.dim()]);
            let there = closed_form_iterate(&sys, &p, &BigInt::from(n));
            let back = closed_form_iterate(&sys, &there, &BigInt::from(-n));
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(sys.step_inverse(&sys.step(&p)), p);
        }

        #[test]
        fn matches_step_iteration(sys in arb_system(), k in -40i64..40) {
            let p = Point::new(0, vec![ExactScalar::ratio(1, 3); sys.dim()]);
            prop_assert_eq!(closed_form_iterate(&sys, &p, &BigInt::from(k)), iterate_steps(&sys, &p, k));
        }

        #[test]
        fn orbit_polynomial_agrees(sys in arb_system(), pts in proptest::collection::vec((-30i64..30, -30i64..30), 100)) {
            let e = ExactPolynomial::parse("m + 1/2 n^2 + 1/2 n").unwrap();
            let p = Point::new(0, vec![ExactScalar::ratio(1, 4); sys.dim()]);
            let orb = orbit_polynomial(&sys, &p, &e).unwrap();
            for (m, n) in pts {
                let (mm, nn) = (BigInt::from(m), BigInt::from(n));
                let k = e.eval_rational(&mm, &nn).unwrap().to_integer();
                prop_assert_eq!(orb.eval(&mm, &nn), closed_form_iterate(&sys, &p, &k));
            }
        }

        #[test]
        fn power_matrix_and_translation_compose(sys in arb_system(), k in -30i64..30) {
            let p = Point::new(0, vec![ExactScalar::ratio(3, 5); sys.dim()]);
            let kk = BigInt::from(k);
            let m = sys.power_matrix(&kk);
            let t = sys.power_translation(&kk);
            let x: Vec<ExactScalar> = (0..sys.dim()).map(|i| {
                let mut acc = t[i].clone();
                for j in 0..sys.dim() { acc += &p.x[j].scale_int(&m[i][j]); }
                acc
            }).collect();
            prop_assert_eq!(Point::new(sys.finite_iterate(p.c, &kk), x), closed_form_iterate(&sys, &p, &kk));
        }
    }
}
