//! One function per subcommand. Each returns its output and, when a
//! mathematical check failed, the error to report after the output.

use nilrec::equid::{character_sum, max_character_sum};
use nilrec::ergodic_avg::{average_schedule, uniformity_diagnostic};
use nilrec::kronecker::{eval_at, ProjectionRecord};
use nilrec::reclab::{characteristic_factor_check, class_scan, counterexample_demo, kr_integral_bound, DemoParams};
use nilrec::*;
use serde_json::{json, Value};

use crate::config::{parse_epsilon, parse_rule, ExperimentConfig, Resolved};
use crate::error::CliError;
use crate::output::{exact, exact_int, fmt17, numeric, Output, Table};

pub struct Env<'a> {
    pub cfg: &'a ExperimentConfig,
    pub res: &'a Resolved,
    pub exec: Exec,
    pub timing: bool,
}

pub type CommandResult = Result<(Output, Option<CliError>), CliError>;

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref().ok_or_else(|| CliError::Config(format!("config has no [{name}] section")))
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn character_text(ch: &Character) -> String {
    format!("l=({}) j=({})", join(&ch.l, " "), join(&ch.j, " "))
}

pub fn check_independence(env: &Env, literal: Option<&str>) -> CommandResult {
    let (texts, include_constants) = match (literal, &env.cfg.independence) {
        (Some(l), _) => (l.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>(), true),
        (None, Some(spec)) => (spec.polynomials.clone(), spec.include_constants),
        (None, None) => return Err(CliError::Config("give a polynomial list or an [independence] section".into())),
    };
    let polys = texts.iter().map(|t| IntPolynomial::parse(t)).collect::<nilrec::Result<Vec<_>>>()?;
    let verdict = rational_independence(&polys, include_constants);
    let shown: Vec<String> = texts.iter().map(|t| t.trim().to_string()).collect();
    let (name, witness) = match &verdict {
        Independence::Independent => ("independent", Vec::new()),
        Independence::Dependent(w) => ("dependent", w.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
    };
    let mut table = Table::new(&["polynomials", "include_constants", "verdict", "witness"]);
    table.push(vec![shown.join("; "), include_constants.to_string(), name.into(), witness.join(" ")]);
    let result = json!({
        "polynomials": shown,
        "include_constants": include_constants,
        "verdict": name,
        "witness": witness.iter().map(exact_int).collect::<Vec<_>>(),
    });
    let failure = (!verdict.is_independent()).then(|| CliError::Check {
        kind: "dependent",
        message: format!("polynomials are rationally dependent, witness ({})", witness.join(", ")),
    });
    Ok((Output { result, table }, failure))
}

pub fn decide(env: &Env) -> CommandResult {
    let spec = section(&env.cfg.decide, "decide")?;
    let jo = JointOrbit::new(env.res.orbit_factors(&spec.factors, spec.with_m)?)?;
    let records = decide_well_distribution(&jo)?.records();
    let mut table = Table::new(&["r", "a", "b", "verdict", "character", "certificate"]);
    for r in &records {
        let (cr, ca, cb) = r.component.as_ref().map(|c| (c.r, c.a, c.b)).unwrap_or((1, 0, 0));
        let cert: Vec<String> = r.certificate_monomials.iter().map(|t| format!("{}*m^{}*n^{}", t.coefficient, t.m, t.n)).collect();
        table.push(vec![
            cr.to_string(),
            ca.to_string(),
            cb.to_string(),
            r.verdict.clone(),
            r.character.as_ref().map(character_text).unwrap_or_default(),
            cert.join(" + "),
        ]);
    }
    let result = json!({ "with_m": spec.with_m, "verdicts": records });
    Ok((Output { result, table }, None))
}

pub fn charsum(env: &Env) -> CommandResult {
    let spec = section(&env.cfg.charsum, "charsum")?;
    let jo = JointOrbit::new(env.res.orbit_factors(&spec.factors, spec.with_m)?)?;
    let rule = parse_rule(&spec.rule)?;
    let mut table = Table::new(&["N", "b", "character", "real", "imag", "modulus"]);
    let mut rows = Vec::new();
    for &n in &spec.schedule {
        let (mut region, b) = if spec.with_m {
            let bx = FolnerBox::new(n, rule, jo.degree_n().max(1));
            (bx.region(), bx.height())
        } else {
            (Region::rect(0, 0, 1, n as i64), 1)
        };
        if let Some([r, a, bb]) = spec.class {
            if r < 1 {
                return Err(CliError::Config(format!("class modulus {r}")));
            }
            region = region.with_class(r, a, bb);
        }
        let (ch, z) = match &spec.character {
            Some(c) => {
                let j = if c.j.is_empty() { vec![0; jo.factors().len()] } else { c.j.clone() };
                let ch = Character::new(c.l.clone(), j);
                let z = character_sum(&jo, &ch, &region, &env.res.registry, env.exec)?;
                (ch, z)
            }
            None => {
                let (best, _) = max_character_sum(&jo, spec.height, &region, &env.res.registry, env.exec)?;
                let ch = best.unwrap_or_else(|| Character::new(vec![0; jo.total_dim()], vec![0; jo.factors().len()]));
                let z = character_sum(&jo, &ch, &region, &env.res.registry, env.exec)?;
                (ch, z)
            }
        };
        table.push(vec![n.to_string(), b.to_string(), character_text(&ch), fmt17(z.re), fmt17(z.im), fmt17(z.norm())]);
        rows.push(json!({
            "N": n, "b": b, "character": ch,
            "real": numeric(z.re), "imag": numeric(z.im), "modulus": numeric(z.norm()),
        }));
    }
    let result = json!({ "with_m": spec.with_m, "rule": rule.to_string(), "maximized": spec.character.is_none(), "rows": rows });
    Ok((Output { result, table }, None))
}

pub fn average(env: &Env) -> CommandResult {
    let spec = section(&env.cfg.average, "average")?;
    let (factors, obs) = env.res.average_factors(&spec.factors)?;
    let rule = parse_rule(&spec.rule)?;
    let rows = average_schedule(&factors, &obs, &spec.schedule, rule, &env.res.registry, env.exec, env.timing)?;
    let mut table = Table::new(&["N", "b", "real", "imag", "runtime_ms"]);
    let mut out = Vec::new();
    for r in &rows {
        let t = r.runtime_ms.map(|t| format!("{t:.3}")).unwrap_or_default();
        table.push(vec![r.n.to_string(), r.b.to_string(), fmt17(r.re), fmt17(r.im), t]);
        out.push(json!({
            "N": r.n, "b": r.b, "real": numeric(r.re), "imag": numeric(r.im),
            "runtime_ms": r.runtime_ms.map(numeric),
        }));
    }
    Ok((Output { result: json!({ "rule": rule.to_string(), "rows": out }), table }, None))
}

pub fn diagnostic(env: &Env) -> CommandResult {
    let spec = section(&env.cfg.diagnostic, "diagnostic")?;
    let (factors, obs) = env.res.average_factors(&spec.factors)?;
    let rule = parse_rule(&spec.rule)?;
    let d = nilrec::ergodic_avg::max_degree(&factors);
    let mut table = Table::new(&["N", "b", "value"]);
    let mut out = Vec::new();
    for &n in &spec.schedule {
        let bx = FolnerBox::new(n, rule, d);
        let v = uniformity_diagnostic(&factors, &obs, &bx, &env.res.registry, env.exec)?;
        table.push(vec![n.to_string(), bx.height().to_string(), fmt17(v)]);
        out.push(json!({ "N": n, "b": bx.height(), "value": numeric(v) }));
    }
    Ok((Output { result: json!({ "rule": rule.to_string(), "rows": out }), table }, None))
}

pub fn seminorm(env: &Env) -> CommandResult {
    let spec = section(&env.cfg.seminorm, "seminorm")?;
    let sys = env.res.system(&spec.system)?;
    let f = env.res.observable(&spec.observable)?;
    let grid = spec.grid.unwrap_or(256);
    let est = uniformity_seminorm_estimate(sys, f, spec.k, spec.n, grid, &env.res.registry, env.exec)?;
    let mut table = Table::new(&["k", "N", "value", "value_half"]);
    table.push(vec![est.k.to_string(), est.n.to_string(), fmt17(est.value), fmt17(est.value_half)]);
    let result = json!({
        "system": spec.system, "observable": spec.observable, "k": est.k, "N": est.n,
        "grid": matches!(f, Observable::Box(_)).then_some(grid),
        "value": numeric(est.value), "value_half": numeric(est.value_half),
    });
    Ok((Output { result, table }, None))
}

pub fn project(env: &Env) -> CommandResult {
    let spec = section(&env.cfg.project, "project")?;
    let sys = env.res.system(&spec.system)?;
    let f = env.res.observable(&spec.observable)?;
    let x = env.res.point(spec.point.as_deref(), sys)?;
    let (proj, period) = kronecker_projection(sys, f)?;
    let at_x = eval_at(&proj, &x, &env.res.registry)?;
    let est = ekrat_estimate(sys, f, &x, spec.r, spec.n, &env.res.registry, env.exec)?;
    let mut pk = Vec::new();
    if !spec.offsets.is_empty() {
        let a = AffineNilsequence::new(sys.clone(), x.clone(), f.as_trig().cloned().unwrap_or_else(|| TrigPoly::new(sys.q(), sys.dim())))?;
        for &k in &spec.offsets {
            let v = project_p(&a, k)?;
            pk.push(json!({ "k": k, "real": numeric(v.re), "imag": numeric(v.im) }));
        }
    }
    let record = ProjectionRecord::new(sys, &proj, period);
    let mut table = Table::new(&["l", "j", "real", "imag"]);
    for t in &record.terms {
        table.push(vec![join(&t.l, " "), t.j.to_string(), fmt17(t.re), fmt17(t.im)]);
    }
    let terms: Vec<Value> = record
        .terms
        .iter()
        .map(|t| json!({ "l": t.l, "j": t.j, "coefficient": { "real": numeric(t.re), "imag": numeric(t.im) } }))
        .collect();
    let result = json!({
        "system": record.system,
        "period": exact_int(record.period),
        "terms": terms,
        "point": x.to_string(),
        "projection_at_point": { "real": numeric(at_x.re), "imag": numeric(at_x.im) },
        "ekrat_estimate": { "R": spec.r, "N": spec.n, "real": numeric(est.re), "imag": numeric(est.im) },
        "deviation": numeric((at_x - est).norm()),
        "p_k": pk,
    });
    Ok((Output { result, table }, None))
}

pub fn scan(env: &Env) -> CommandResult {
    let spec = section(&env.cfg.scan, "scan")?;
    let systems = spec.systems.iter().map(|s| env.res.system(s).cloned()).collect::<Result<Vec<_>, _>>()?;
    let polys = spec.polynomials.iter().map(|p| env.res.poly(p).cloned()).collect::<Result<Vec<_>, _>>()?;
    let set = match env.res.observable(&spec.set)? {
        Observable::Box(b) => b.clone(),
        Observable::Trig(_) => return Err(CliError::Config(format!("scan set `{}` must be a box observable", spec.set))),
    };
    let eps = parse_epsilon(&spec.epsilon)?;
    let mut rc = if spec.bypass_hypothesis {
        RecurrenceConfig::bypass_hypothesis(systems, polys, set, eps)?
    } else {
        RecurrenceConfig::new(systems, polys, set, eps)?
    };
    rc = rc.with_schedule(spec.schedule.clone()).with_rule(parse_rule(&spec.rule)?);
    if let Some(g) = spec.grid {
        rc = rc.with_grid(g);
    }
    rc.floor = spec.floor;
    if let Some(sys) = rc.systems.first() {
        rc.base_point = env.res.point(spec.point.as_deref(), sys)?;
    }
    let report = recurrence_scan(&rc, &env.res.registry, env.exec)?;
    let mut table = Table::new(&["N", "b", "good", "total", "ratio"]);
    let mut rows = Vec::new();
    for r in &report.rows {
        table.push(vec![r.n.to_string(), r.b.to_string(), r.good.to_string(), r.total.to_string(), fmt17(r.ratio)]);
        rows.push(json!({ "N": r.n, "b": r.b, "good": r.good, "total": r.total, "ratio": numeric(r.ratio) }));
    }
    let bound = match kr_integral_bound(&rc, 0.01) {
        Ok(kb) => json!({
            "r": kb.r, "integral": { "exact": kb.integral }, "target": { "exact": kb.target },
            "tolerance": kb.tolerance, "holds": kb.holds,
        }),
        Err(e) => json!({ "skipped": e.to_string() }),
    };
    let classes = match spec.classes {
        Some(r) => {
            let n = rc.schedule.iter().copied().max().unwrap_or(1);
            let (_, cls) = class_scan(&rc, n, r, &env.res.registry, env.exec)?;
            json!(cls)
        }
        None => Value::Null,
    };
    let char_factor = if spec.observables.is_empty() {
        Value::Null
    } else {
        let obs = spec.observables.iter().map(|o| env.res.observable(o).cloned()).collect::<Result<Vec<_>, _>>()?;
        let c = characteristic_factor_check(&rc, &obs, &env.res.registry, env.exec)?;
        json!({
            "N": c.n, "b": c.b,
            "average": { "real": numeric(c.average.0), "imag": numeric(c.average.1) },
            "projected_average": c.projected_average.map(|p| json!({ "real": numeric(p.0), "imag": numeric(p.1) })),
            "deviation": numeric(c.deviation),
        })
    };
    let result = json!({
        "threshold": exact(&nilrec::exactnum::parse_rational(&report.threshold)?),
        "measure": exact(&rc.set.measure()),
        "epsilon": exact(&rc.epsilon),
        "grid": rc.grid,
        "rule": rc.rule.to_string(),
        "floor": report.floor,
        "rows": rows,
        "consistent": report.consistent,
        "verdict": report.verdict,
        "warning": report.warning,
        "integral_bound": bound,
        "classes": classes,
        "characteristic_factor": char_factor,
    });
    let failure = (!report.consistent).then(|| CliError::Check { kind: "inconsistent", message: report.verdict.clone() });
    Ok((Output { result, table }, failure))
}

pub fn demo(env: &Env) -> CommandResult {
    let mut params = DemoParams::default();
    if let Some(d) = &env.cfg.demo {
        if let Some(s) = &d.schedule {
            params.schedule = s.clone();
        }
        if let Some(h) = d.height {
            params.height = h;
        }
        if let Some(t) = d.tall {
            params.tall = t;
        }
    }
    let mut reg = env.res.registry.clone();
    if !reg.contains("alpha") {
        reg.register("alpha", "sqrt(2)-1", None)?;
    }
    let rep = counterexample_demo(&params, &reg, env.exec)?;
    let mut table = Table::new(&["side", "N", "b", "character", "real", "imag", "modulus"]);
    for (side, s) in [("without_m", &rep.without_m), ("with_m", &rep.with_m)] {
        for x in &s.sums {
            table.push(vec![
                side.into(),
                x.n.to_string(),
                x.b.to_string(),
                character_text(&x.character),
                fmt17(x.re),
                fmt17(x.im),
                fmt17(x.modulus),
            ]);
        }
    }
    let side = |s: &nilrec::reclab::DemoSide| {
        let sums: Vec<Value> = s
            .sums
            .iter()
            .map(|x| {
                json!({
                    "N": x.n, "b": x.b, "character": x.character,
                    "real": numeric(x.re), "imag": numeric(x.im), "modulus": numeric(x.modulus),
                })
            })
            .collect();
        json!({ "exponents": s.exponents, "verdicts": s.verdicts, "sums": sums })
    };
    let result = json!({
        "system": rep.system,
        "without_m": side(&rep.without_m),
        "with_m": side(&rep.with_m),
        "notes": rep.notes,
    });
    Ok((Output { result, table }, None))
}
