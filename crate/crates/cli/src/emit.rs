//! Subcommand bodies. Every emitter returns the complete output document.

use serde_json::{json, Map, Value};
use snowflake_core::addressing::{self, digits_to_string, parse_digits, AddressWord};
use snowflake_core::boundary::{build_prefractal, side_address, vertex_census, Prefractal};
use snowflake_core::dynamics::{
    basepoint_for, compatible_basepoint, compatible_sequence, compute_orbit, is_pf_orbit,
    periodic_direction_probe, stabilization_index, BilliardState, Orbit,
};
use snowflake_core::formulas::{agreement_by_class, genus_of, length_limit, period_study, FormulaReport};
use snowflake_core::lattice::{format_rational, LatticeVector};
use snowflake_core::ternary::{self, expand, is_cantor, is_cantor_nonternary, mc_representation, omega_of, OrbitClass};
use snowflake_core::{Error, Rational};

use crate::args::{AddressArgs, Format, OrbitArgs, ProbeArgs, RenderArgs, SequenceArgs, StraightenArgs, StudyArgs};
use crate::render::{render_svg, Style};
use crate::sample::parse_sample;
use crate::CliError;

type Out = Result<String, CliError>;

fn schema(name: &str) -> Value {
    Value::String(format!("snowflake.{name}/v1"))
}

fn document(name: &str, body: Value) -> Out {
    let mut map = Map::new();
    map.insert("schema".into(), schema(name));
    if let Value::Object(fields) = body {
        map.extend(fields);
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(map))?;
    s.push('\n');
    Ok(s)
}

fn r(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

fn opt_r(x: Option<&Rational>) -> Value {
    x.map_or(Value::Null, r)
}

fn class_value(c: &OrbitClass) -> Result<Value, CliError> {
    let mut v = serde_json::to_value(c)?;
    if let Value::Object(m) = &mut v {
        m.insert("label".into(), Value::String(c.to_string()));
    }
    Ok(v)
}

fn state_value(p: &Prefractal, s: &BilliardState) -> Result<Value, CliError> {
    Ok(json!({
        "side": s.side + 1,
        "address": p.side(s.side).address.to_string(),
        "position": r(&s.position),
        "point": serde_json::to_value(s.point(p))?,
        "direction": serde_json::to_value(&s.direction)?,
    }))
}

pub fn orbit_value(p: &Prefractal, o: &Orbit) -> Result<Value, CliError> {
    let footprint: Vec<Value> = o
        .footprint
        .iter()
        .map(|e| {
            json!({
                "address": e.address.to_string(),
                "position": r(&e.position),
                "dir": e.dir,
                "direction": serde_json::to_value(&e.direction).unwrap_or(Value::Null),
            })
        })
        .collect();
    let saddle = match &o.saddle {
        Some(sc) => serde_json::to_value(&sc.points)?,
        None => Value::Null,
    };
    Ok(json!({
        "level": o.level,
        "status": serde_json::to_value(&o.status)?,
        "period": o.period(),
        "length": opt_r(o.length.as_ref()),
        "family": serde_json::to_value(o.family)?,
        "initial": state_value(p, &o.states[0])?,
        "piecewise_fagnano": is_pf_orbit(o),
        "footprint": footprint,
        "saddle_connection": saddle,
    }))
}

pub fn boundary(level: usize, format: Format) -> Out {
    let p = build_prefractal(level)?;
    if format == Format::Svg {
        return Ok(render_svg(&p, None, &Style::default()));
    }
    let sides: Vec<Value> = p
        .sides()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            json!({
                "index": s.index,
                "address": s.address.to_string(),
                "start": p.unscale_point(s.start.0, s.start.1),
                "end": p.unscale_point(s.end().0, s.end().1),
                "dir": s.dir,
                "angle_at_start": p.vertex_angle(i).map(|a| a.label()).unwrap_or("?"),
            })
        })
        .collect();
    let (acute, reflex) = vertex_census(&p)?;
    document(
        "boundary",
        json!({
            "level": level,
            "side_count": p.len(),
            "side_length": r(&(Rational::from_integer(1.into()) / p.scale_rational())),
            "perimeter": r(&p.perimeter()),
            "area": r(&p.area()),
            "census": { "pi/3": acute, "4pi/3": reflex },
            "sides": sides,
        }),
    )
}

pub fn classify(x0: &Rational, level: usize) -> Out {
    let class = classify_x(x0)?;
    let e = expand(x0)?;
    let nonternary = class != OrbitClass::SingularTernary;
    let omega: Vec<usize> = (1..=level).map(|n| omega_of(&e, n)).collect();
    let periods: Value = if nonternary {
        omega.iter().map(|&w| 3u64 << w).collect::<Vec<_>>().into()
    } else {
        Value::Null
    };
    let mc = mc_representation(x0)?.map(|(n, digits)| json!({ "N": n, "digits": digits }));
    document(
        "classify",
        json!({
            "x0": r(x0),
            "value": r(x0),
            "class": class_value(&class)?,
            "N": class.index(),
            "expansion": {
                "prefix": e.prefix_digits(),
                "cycle": e.cycle_digits(),
                "letters": format!("{}({})", e.prefix_string(), e.cycle_string()),
                "terminating": e.terminating,
            },
            "omega_table": omega,
            "period_formula": periods,
            "length_limit": if nonternary { r(&length_limit(x0)?) } else { Value::Null },
            "mc_representation": mc,
            "is_cantor": is_cantor(x0)?,
            "is_cantor_nonternary": is_cantor_nonternary(x0)?,
        }),
    )
}

fn classify_x(x0: &Rational) -> Result<OrbitClass, CliError> {
    Ok(ternary::classify(x0)?)
}

fn initial_state(p: &Prefractal, x0: &Rational, dir: Option<(i64, i64)>) -> Result<BilliardState, CliError> {
    Ok(match dir {
        None => compatible_basepoint(x0, p)?,
        Some((a, b)) => {
            let d = LatticeVector::from_ints(a, b).primitive()?;
            let small = |v: &Rational| i64::try_from(v.to_integer()).map_err(|_| Error::OutOfRange(v.to_string()));
            basepoint_for(p, x0, (small(&d.a)?, small(&d.b)?))?
        }
    })
}

fn build_orbit(level: usize, x0: &Rational, dir: Option<(i64, i64)>, budget: u64) -> Result<(Prefractal, Orbit), CliError> {
    let p = build_prefractal(level)?;
    let init = initial_state(&p, x0, dir)?;
    let o = compute_orbit(&p, &init, budget as usize)?;
    Ok((p, o))
}

pub fn orbit(a: &OrbitArgs, format: Format) -> Out {
    let class = classify_x(&a.x0)?;
    let (p, o) = build_orbit(a.level, &a.x0, a.dir, a.budget)?;
    if format == Format::Svg {
        return Ok(render_svg(&p, Some(&o), &Style::default()));
    }
    let mut body = orbit_value(&p, &o)?;
    if let Value::Object(m) = &mut body {
        m.insert("x0".into(), r(&a.x0));
        m.insert("class".into(), class_value(&class)?);
    }
    document("orbit", body)
}

pub fn footprint(a: &OrbitArgs, format: Format) -> Out {
    let (_, o) = build_orbit(a.level, &a.x0, a.dir, a.budget)?;
    if format == Format::Csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["index", "address", "position", "dir", "direction_a", "direction_b"])?;
        for (i, e) in o.footprint.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                e.address.to_string(),
                format_rational(&e.position),
                e.dir.map(|d| d.to_string()).unwrap_or_default(),
                format_rational(&e.direction.a),
                format_rational(&e.direction.b),
            ])?;
        }
        return csv_string(w);
    }
    let body = orbit_value(&build_prefractal(a.level)?, &o)?;
    document(
        "footprint",
        json!({ "x0": r(&a.x0), "level": a.level, "status": body["status"], "footprint": body["footprint"] }),
    )
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Out {
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn sequence(a: &SequenceArgs) -> Out {
    let class = classify_x(&a.x0)?;
    let seq = compatible_sequence(&a.x0, a.n_max, a.budget as usize)?;
    let orbits: Vec<Value> = seq
        .orbits
        .iter()
        .map(|o| orbit_value(&build_prefractal(o.level)?, o))
        .collect::<Result<_, _>>()?;
    document(
        "sequence",
        json!({
            "x0": r(&a.x0),
            "class": class_value(&class)?,
            "n_max": a.n_max,
            "periods": seq.periods(),
            "stabilization_index": stabilization_index(&seq),
            "length_limit": r(&length_limit(&a.x0)?),
            "truncated": seq.truncated,
            "orbits": orbits,
        }),
    )
}

pub fn straighten_cmd(word: &str) -> Result<String, CliError> {
    Ok(digits_to_string(&addressing::straighten(&parse_digits(word)?)))
}

pub fn straighten(a: &StraightenArgs) -> Out {
    let out = straighten_cmd(&a.word)?;
    match a.output.format {
        Some(Format::Json) => document("straighten", json!({ "input": a.word, "output": out })),
        _ => Ok(format!("{out}\n")),
    }
}

pub fn address(a: &AddressArgs, format: Format) -> Out {
    let p = build_prefractal(a.level)?;
    let rows: Vec<(usize, AddressWord)> = if let Some(word) = &a.word {
        let w: AddressWord = word.parse()?;
        let i = p.index_of(&w).ok_or_else(|| {
            Error::InvalidAddress(format!("{word} does not address a side of KS_{}", a.level))
        })?;
        vec![(i + 1, w)]
    } else if let Some(k) = a.side {
        if k == 0 {
            return Err(Error::OutOfRange("side indices start at 1".into()).into());
        }
        vec![(k, side_address(&p, k - 1)?)]
    } else {
        p.sides().iter().map(|s| (s.index, s.address.clone())).collect()
    };
    if format == Format::Json {
        let sides: Vec<Value> = rows.iter().map(|(i, w)| json!({ "index": i, "address": w.to_string() })).collect();
        return document("address", json!({ "level": a.level, "sides": sides }));
    }
    if a.side.is_some() {
        return Ok(format!("{}\n", rows[0].1));
    }
    if a.word.is_some() {
        return Ok(format!("{}\n", rows[0].0));
    }
    Ok(rows.iter().map(|(i, w)| format!("{i} {w}\n")).collect())
}

pub fn probe(a: &ProbeArgs) -> Out {
    let d = LatticeVector::from_ints(a.dir.0, a.dir.1);
    let report = periodic_direction_probe(&d, a.level, a.samples as usize, a.budget as usize, a.seed)?;
    let mut body = serde_json::to_value(&report)?;
    if let Value::Object(m) = &mut body {
        m.insert("seed".into(), a.seed.into());
        m.insert("budget".into(), a.budget.into());
    }
    document("probe", body)
}

pub const STUDY_COLUMNS: [&str; 10] = [
    "x0",
    "class",
    "n",
    "omega",
    "period_formula",
    "period_sim",
    "length_formula_sim_periods",
    "length_sim",
    "agree_period",
    "agree_length",
];

pub fn study_csv(reports: &[FormulaReport]) -> Out {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(STUDY_COLUMNS)?;
    let fmt = |x: &Option<Rational>| x.as_ref().map(format_rational).unwrap_or_default();
    for rep in reports {
        for rec in &rep.records {
            w.write_record([
                format_rational(&rep.x0),
                rep.class.to_string(),
                rec.n.to_string(),
                rec.omega.to_string(),
                rec.period_formula.to_string(),
                rec.period_simulated.map(|p| p.to_string()).unwrap_or_default(),
                fmt(&rec.length_formula_sim_periods),
                fmt(&rec.length_simulated),
                rec.agree_period.to_string(),
                rec.agree_length.map(|b| b.to_string()).unwrap_or_default(),
            ])?;
        }
    }
    csv_string(w)
}

pub fn study(a: &StudyArgs, format: Format) -> Out {
    let sample = parse_sample(&a.sample, a.seed)?;
    let reports = period_study(&sample, a.n_max, a.budget as usize)?;
    if format == Format::Csv {
        return study_csv(&reports);
    }
    document(
        "study",
        json!({
            "n_max": a.n_max,
            "budget": a.budget,
            "seed": a.seed,
            "reports": serde_json::to_value(&reports)?,
            "agreement": serde_json::to_value(agreement_by_class(&reports))?,
        }),
    )
}

pub fn genus(level: usize, format: Format) -> Out {
    let p = build_prefractal(level)?;
    let g = genus_of(&p)?;
    if format == Format::Json {
        let (acute, reflex) = vertex_census(&p)?;
        return document("genus", json!({ "level": level, "genus": g, "census": { "pi/3": acute, "4pi/3": reflex } }));
    }
    Ok(format!("{g}\n"))
}

pub fn render(a: &RenderArgs) -> Out {
    let p = build_prefractal(a.level)?;
    let orbit = match &a.x0 {
        Some(x0) => Some(compute_orbit(&p, &initial_state(&p, x0, a.dir)?, a.budget as usize)?),
        None => None,
    };
    let style = Style { width: a.width, cells: !a.no_cells, ghosts: !a.no_ghosts, footprint: true };
    if !(style.width.is_finite() && style.width > 0.0) {
        return Err(CliError::Usage(format!("width {} must be positive", a.width)));
    }
    Ok(render_svg(&p, orbit.as_ref(), &style))
}
