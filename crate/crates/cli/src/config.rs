//! TOML experiment configuration and name resolution.

use std::collections::BTreeMap;

use nilrec::equid::OrbitFactor;
use nilrec::ergodic_avg::AverageFactor;
use nilrec::exactnum::parse_rational;
use nilrec::*;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub precision: Option<u32>,
    #[serde(default, rename = "generator", skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GeneratorSpec>,
    #[serde(default, rename = "system", skip_serializing_if = "Vec::is_empty")]
    pub systems: Vec<SystemSpec>,
    #[serde(default, rename = "point", skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointSpec>,
    #[serde(default, rename = "polynomial", skip_serializing_if = "Vec::is_empty")]
    pub polynomials: Vec<PolySpec>,
    #[serde(default, rename = "observable", skip_serializing_if = "Vec::is_empty")]
    pub observables: Vec<ObservableSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub independence: Option<IndependenceSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decide: Option<DecideSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub charsum: Option<CharsumSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub average: Option<AverageSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<AverageSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seminorm: Option<SeminormSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub project: Option<ProjectSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub demo: Option<DemoSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    pub recipe: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decimal: Option<String>,
}

fn one() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub name: String,
    #[serde(default = "one")]
    pub q: u64,
    #[serde(default)]
    pub s: u64,
    /// Rows of the nilpotent matrix `N`; zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub translation: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub name: String,
    #[serde(default)]
    pub c: u64,
    #[serde(default)]
    pub x: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolySpec {
    pub name: String,
    pub expr: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub l: Vec<i64>,
    #[serde(default)]
    pub j: i64,
    #[serde(default = "unit")]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableKind {
    Trig,
    Box,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub name: String,
    pub kind: ObservableKind,
    #[serde(default = "one")]
    pub q: u64,
    /// Torus dimension of a trigonometric polynomial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermSpec>,
    /// `[lo, hi)` per torus coordinate, as rational literals.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub intervals: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residues: Option<Vec<u64>>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndependenceSpec {
    pub polynomials: Vec<String>,
    #[serde(default = "yes")]
    pub include_constants: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub system: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    pub poly: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecideSpec {
    pub factors: Vec<FactorSpec>,
    #[serde(default = "yes")]
    pub with_m: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterSpec {
    pub l: Vec<i64>,
    #[serde(default)]
    pub j: Vec<i64>,
}

fn default_rule() -> String {
    "default".into()
}

fn default_height() -> i64 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharsumSpec {
    pub factors: Vec<FactorSpec>,
    #[serde(default = "yes")]
    pub with_m: bool,
    pub schedule: Vec<u64>,
    #[serde(default = "default_rule")]
    pub rule: String,
    /// A single character; when absent the largest sum up to `height` is reported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub character: Option<CharacterSpec>,
    #[serde(default = "default_height")]
    pub height: i64,
    /// Restrict to the class `(a, b) + r Z²`, given as `[r, a, b]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<[i64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AverageSpec {
    pub factors: Vec<FactorSpec>,
    pub schedule: Vec<u64>,
    #[serde(default = "default_rule")]
    pub rule: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeminormSpec {
    pub system: String,
    pub observable: String,
    pub k: u32,
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<u64>,
}

fn default_r() -> u32 {
    6
}

fn default_project_n() -> u64 {
    4000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectSpec {
    pub system: String,
    pub observable: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    #[serde(default = "default_r")]
    pub r: u32,
    #[serde(default = "default_project_n")]
    pub n: u64,
    /// Offsets `k` at which `P_k` is reported (ergodic systems only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub offsets: Vec<i64>,
}

fn default_floor() -> f64 {
    0.01
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub systems: Vec<String>,
    pub polynomials: Vec<String>,
    pub set: String,
    pub epsilon: String,
    pub schedule: Vec<u64>,
    #[serde(default = "default_rule")]
    pub rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<u64>,
    #[serde(default = "default_floor")]
    pub floor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    #[serde(default)]
    pub bypass_hypothesis: bool,
    /// Also report per-class counts at the largest `N` for this modulus.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<i64>,
    /// Observables for the characteristic-factor comparison, one per system.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observables: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemoSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tall: Option<u64>,
}

/// Named objects of a config, built and cross-checked.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub registry: GeneratorRegistry,
    pub systems: BTreeMap<String, AffineSystem>,
    pub points: BTreeMap<String, Point>,
    pub polys: BTreeMap<String, IntPolynomial>,
    pub observables: BTreeMap<String, Observable>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn scalar(text: &str, reg: &GeneratorRegistry, what: &str) -> Result<ExactScalar, CliError> {
    let s = ExactScalar::parse(text).map_err(|e| config_err(format!("{what}: {e}")))?;
    if let Some(g) = s.generator_parts().keys().find(|g| !reg.contains(g)) {
        return Err(config_err(format!("{what}: unknown generator `{g}`")));
    }
    Ok(s)
}

fn unique<'a>(kind: &str, names: impl Iterator<Item = &'a String>) -> Result<(), CliError> {
    let mut seen = std::collections::BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(config_err(format!("duplicate {kind} `{n}`")));
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn resolve(&self, precision: u32) -> Result<Resolved, CliError> {
        let mut registry = GeneratorRegistry::new(precision);
        for g in &self.generators {
            registry.register(&g.name, &g.recipe, g.decimal.as_deref())?;
        }
        unique("system", self.systems.iter().map(|s| &s.name))?;
        unique("point", self.points.iter().map(|s| &s.name))?;
        unique("polynomial", self.polynomials.iter().map(|s| &s.name))?;
        unique("observable", self.observables.iter().map(|s| &s.name))?;
        let mut systems = BTreeMap::new();
        for s in &self.systems {
            let d = s.translation.len();
            let b = s
                .translation
                .iter()
                .map(|t| scalar(t, &registry, &format!("system `{}`", s.name)))
                .collect::<Result<Vec<_>, _>>()?;
            let n = match &s.matrix {
                Some(rows) => IntMatrix::from_rows(rows)?,
                None => IntMatrix::zero(d),
            };
            systems.insert(s.name.clone(), AffineSystem::new(&s.name, s.q, s.s, n, b)?);
        }
        let mut points = BTreeMap::new();
        for p in &self.points {
            let x = p
                .x
                .iter()
                .map(|t| scalar(t, &registry, &format!("point `{}`", p.name)))
                .collect::<Result<Vec<_>, _>>()?;
            points.insert(p.name.clone(), Point::new(p.c, x));
        }
        let mut polys = BTreeMap::new();
        for p in &self.polynomials {
            polys.insert(p.name.clone(), IntPolynomial::parse(&p.expr)?);
        }
        let mut observables = BTreeMap::new();
        for o in &self.observables {
            let obs: Observable = match o.kind {
                ObservableKind::Trig => {
                    let dim = o.dim.or_else(|| o.terms.first().map(|t| t.l.len())).unwrap_or(0);
                    let mut f = TrigPoly::new(o.q, dim);
                    for t in &o.terms {
                        f.add_term(Character::new(t.l.clone(), vec![t.j]), Complex64::new(t.re, t.im))?;
                    }
                    f.into()
                }
                ObservableKind::Box => {
                    let intervals = o
                        .intervals
                        .iter()
                        .map(|[lo, hi]| Ok((parse_rational(lo)?, parse_rational(hi)?)))
                        .collect::<nilrec::Result<Vec<_>>>()?;
                    BoxIndicator::new(o.q, intervals, o.residues.clone())?.into()
                }
            };
            observables.insert(o.name.clone(), obs);
        }
        Ok(Resolved { registry, systems, points, polys, observables })
    }
}

impl Resolved {
    pub fn system(&self, name: &str) -> Result<&AffineSystem, CliError> {
        self.systems.get(name).ok_or_else(|| config_err(format!("unknown system `{name}`")))
    }

    pub fn poly(&self, name: &str) -> Result<&IntPolynomial, CliError> {
        self.polys.get(name).ok_or_else(|| config_err(format!("unknown polynomial `{name}`")))
    }

    pub fn observable(&self, name: &str) -> Result<&Observable, CliError> {
        self.observables.get(name).ok_or_else(|| config_err(format!("unknown observable `{name}`")))
    }

    /// The named point, or the origin of `sys` when `name` is absent.
    pub fn point(&self, name: Option<&str>, sys: &AffineSystem) -> Result<Point, CliError> {
        let p = match name {
            None => return Ok(Point::origin(sys.dim())),
            Some(n) => self.points.get(n).ok_or_else(|| config_err(format!("unknown point `{n}`")))?,
        };
        if p.x.len() != sys.dim() || p.c >= sys.q() {
            return Err(config_err(format!("point does not lie in the space of `{}`", sys.label())));
        }
        Ok(p.clone())
    }

    pub fn orbit_factors(&self, specs: &[FactorSpec], with_m: bool) -> Result<Vec<OrbitFactor>, CliError> {
        specs
            .iter()
            .map(|f| {
                let system = self.system(&f.system)?.clone();
                let point = self.point(f.point.as_deref(), &system)?;
                let p = self.poly(&f.poly)?;
                let exponent = if with_m { p.shifted_exponent() } else { p.to_exact() };
                Ok(OrbitFactor { system, point, exponent })
            })
            .collect()
    }

    pub fn average_factors(&self, specs: &[FactorSpec]) -> Result<(Vec<AverageFactor>, Vec<Observable>), CliError> {
        let mut factors = Vec::with_capacity(specs.len());
        let mut obs = Vec::with_capacity(specs.len());
        for f in specs {
            let system = self.system(&f.system)?.clone();
            let point = self.point(f.point.as_deref(), &system)?;
            let name = f.observable.as_deref().ok_or_else(|| config_err(format!("factor on `{}` needs an observable", f.system)))?;
            obs.push(self.observable(name)?.clone());
            factors.push(AverageFactor::new(system, point, self.poly(&f.poly)?.clone()));
        }
        Ok((factors, obs))
    }
}

pub fn parse_rule(text: &str) -> Result<BoxRule, CliError> {
    text.parse::<BoxRule>().map_err(CliError::from)
}

pub fn parse_epsilon(text: &str) -> Result<num_rational::BigRational, CliError> {
    parse_rational(text).map_err(CliError::from)
}
