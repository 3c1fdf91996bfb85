//! Command implementations behind the `partact` binary. Each command is a
//! thin adapter: it resolves a manifest, applies precondition checks, calls
//! the library and renders the result as a deterministic JSON payload.

pub mod manifest;
pub mod report;

use std::collections::BTreeMap;

use serde_json::{json, Value};

use manifest::{GammaDoc, GlueDoc, Loaded, ManifestDoc};
use partact_core::glob::{enumerate_truncation, finite_monoid_globalization};
use partact_core::metglob::{
    check_nonexpansive, distance, distance_bruteforce, distance_group_formula, geodesic,
    homogenize_step, TOL,
};
use partact_core::paction::{triple_condition_check, triple_condition_check_quotient};
use partact_core::{fintop, metglob, NormalElement, PartialAction};
use report::*;

/// Exit discipline: 0 computed/pass, 1 check failed, 2 input error,
/// 3 precondition violated.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Outcome {
    Ok,
    CheckFailed,
    InputError,
    Precondition,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::CheckFailed => 1,
            Outcome::InputError => 2,
            Outcome::Precondition => 3,
        }
    }

    pub fn status(self) -> &'static str {
        match self {
            Outcome::Ok => "ok",
            Outcome::CheckFailed => "check_failed",
            Outcome::InputError => "input_error",
            Outcome::Precondition => "precondition_violated",
        }
    }
}

pub struct CommandOutput {
    pub payload: Value,
    pub outcome: Outcome,
}

impl CommandOutput {
    fn ok(payload: Value) -> Self {
        CommandOutput {
            payload,
            outcome: Outcome::Ok,
        }
    }

    fn fail(outcome: Outcome, msg: impl Into<String>) -> Self {
        CommandOutput {
            payload: json!({ "error": msg.into() }),
            outcome,
        }
    }
}

fn ensure_certified(l: &Loaded, forced: bool) -> Result<(), CommandOutput> {
    if forced {
        return Ok(());
    }
    let report = l.action.presentation().validate();
    if report.is_valid() {
        Ok(())
    } else {
        Err(CommandOutput {
            payload: json!({
                "error": "presentation has no valid termination certificate; pass --force-max-steps to explore anyway",
                "issues": report.issues,
            }),
            outcome: Outcome::Precondition,
        })
    }
}

fn ensure_confluent(l: &Loaded) -> Result<(), CommandOutput> {
    if l.action.is_confluent() {
        Ok(())
    } else {
        Err(CommandOutput::fail(
            Outcome::Precondition,
            "the action is not confluent",
        ))
    }
}

fn ensure_metric(l: &Loaded) -> Result<(), CommandOutput> {
    if l.action.space().metric().is_some() {
        Ok(())
    } else {
        Err(CommandOutput::fail(
            Outcome::Precondition,
            "the space carries no metric",
        ))
    }
}

fn ensure_nonexpansive(l: &Loaded) -> Result<(), CommandOutput> {
    match check_nonexpansive(&l.action) {
        Ok(true) => Ok(()),
        Ok(false) => Err(CommandOutput::fail(
            Outcome::Precondition,
            "the action is not non-expansive",
        )),
        Err(e) => Err(CommandOutput::fail(Outcome::Precondition, e.to_string())),
    }
}

pub fn cmd_validate(l: &Loaded) -> CommandOutput {
    let a = &l.action;
    let mut payload = serde_json::Map::new();
    let mut ok = true;

    let pres = a.presentation().validate();
    ok &= pres.is_valid();
    payload.insert(
        "presentation".into(),
        json!({ "valid": pres.is_valid(), "issues": pres.issues }),
    );

    if let Some(m) = a.space().metric() {
        let r = m.validate();
        ok &= r.is_valid();
        payload.insert(
            "metric".into(),
            json!({ "valid": r.is_valid(), "issues": r.issues, "separated": r.separated, "metric": r.metric }),
        );
        match check_nonexpansive(a) {
            Ok(flag) => {
                ok &= flag;
                payload.insert("nonexpansive".into(), json!(flag));
            }
            Err(e) => {
                ok = false;
                payload.insert("nonexpansive_error".into(), json!(e.to_string()));
            }
        }
    }

    if let Some(t) = a.space().topology() {
        let r = t.validate();
        ok &= r.is_valid();
        payload.insert(
            "topology".into(),
            json!({ "valid": r.is_valid(), "issues": r.issues, "t1": r.t1 }),
        );
        match fintop::is_continuous_action(a) {
            Ok(flag) => {
                ok &= flag;
                payload.insert("continuous".into(), json!(flag));
            }
            Err(e) => {
                ok = false;
                payload.insert("continuous_error".into(), json!(e.to_string()));
            }
        }
    }

    if let Some(monoid) = &l.monoid {
        match monoid {
            Ok(_) => {
                payload.insert("monoid".into(), json!({ "valid": true, "issues": [] }));
            }
            Err(msg) => {
                ok = false;
                payload.insert("monoid".into(), json!({ "valid": false, "issues": [msg] }));
            }
        }
    }

    CommandOutput {
        payload: Value::Object(payload),
        outcome: if ok {
            Outcome::Ok
        } else {
            Outcome::CheckFailed
        },
    }
}

pub fn cmd_confluence(l: &Loaded, forced: bool, triples: Option<usize>) -> CommandOutput {
    if let Err(out) = ensure_certified(l, forced) {
        return out;
    }
    let a = &l.action;
    let report = a.check_confluence();
    let mut payload = serde_json::Map::new();
    payload.insert("action".into(), action_confluence_json(a, &report));
    if let Some(bound) = triples {
        if report.is_confluent() {
            let p = a.presentation();
            let violations = triple_condition_check(a, bound);
            payload.insert(
                "triples".into(),
                json!(violations
                    .iter()
                    .map(|(u1, u2, u3)| json!([
                        p.format_word(u1),
                        p.format_word(u2),
                        p.format_word(u3)
                    ]))
                    .collect::<Vec<_>>()),
            );
        } else {
            payload.insert(
                "triples_skipped".into(),
                json!("the triple condition over normal forms needs a confluent action"),
            );
        }
    }
    if let Some(monoid) = &l.monoid {
        match monoid {
            Ok(ma) => {
                let q = finite_monoid_globalization(ma);
                let violations = triple_condition_check_quotient(&q);
                payload.insert(
                    "monoid_triples".into(),
                    json!(violations
                        .iter()
                        .map(|&(u1, u2, u3)| json!([
                            q.monoid().element_name(u1),
                            q.monoid().element_name(u2),
                            q.monoid().element_name(u3)
                        ]))
                        .collect::<Vec<_>>()),
                );
            }
            Err(msg) => {
                payload.insert("monoid_error".into(), json!(msg));
            }
        }
    }
    CommandOutput {
        payload: Value::Object(payload),
        outcome: if report.is_confluent() {
            Outcome::Ok
        } else {
            Outcome::CheckFailed
        },
    }
}

pub struct DistanceOpts {
    pub oracle: bool,
    pub max_segments: Option<usize>,
    pub group_formula: bool,
    pub geodesic: bool,
    pub cap_infinite_at: Option<f64>,
}

pub fn cmd_distance(
    l: &Loaded,
    forced: bool,
    el1: &str,
    el2: &str,
    opts: &DistanceOpts,
) -> CommandOutput {
    if let Err(out) = ensure_certified(l, forced) {
        return out;
    }
    if let Err(out) = ensure_metric(l) {
        return out;
    }
    if let Err(out) = ensure_confluent(l) {
        return out;
    }
    if let Err(out) = ensure_nonexpansive(l) {
        return out;
    }
    let a = &l.action;
    let c1 = match manifest::parse_element(a, el1) {
        Ok(c) => c,
        Err(e) => return CommandOutput::fail(Outcome::InputError, e),
    };
    let c2 = match manifest::parse_element(a, el2) {
        Ok(c) => c,
        Err(e) => return CommandOutput::fail(Outcome::InputError, e),
    };
    let e1 = a.normalize_config(&c1);
    let e2 = a.normalize_config(&c2);
    let d = match distance(a, &e1, &e2) {
        Ok(d) => d,
        Err(e) => return CommandOutput::fail(Outcome::Precondition, e.to_string()),
    };
    let mut payload = serde_json::Map::new();
    payload.insert("el1".into(), element_json(a, &e1));
    payload.insert("el2".into(), element_json(a, &e2));
    let reported = match opts.cap_infinite_at {
        Some(cap) if d.is_infinite() => {
            payload.insert("capped".into(), json!(true));
            cap
        }
        _ => d,
    };
    payload.insert("distance".into(), dist_json(reported));
    let mut agrees = true;
    if opts.oracle {
        let segments = opts.max_segments.unwrap_or(e1.lg() + e2.lg() + 2);
        match distance_bruteforce(a, &e1, &e2, segments) {
            Ok(v) => {
                let same = (v.is_infinite() && d.is_infinite()) || (v - d).abs() <= TOL;
                agrees &= same;
                payload.insert(
                    "oracle".into(),
                    json!({ "max_segments": segments, "value": dist_json(v), "agrees": same }),
                );
            }
            Err(e) => return CommandOutput::fail(Outcome::Precondition, e.to_string()),
        }
    }
    if opts.group_formula {
        match distance_group_formula(a, &e1.word, &e2.word, e1.point, e2.point) {
            Ok(v) => {
                let same = (v.is_infinite() && d.is_infinite()) || (v - d).abs() <= TOL;
                agrees &= same;
                payload.insert(
                    "group_formula".into(),
                    json!({ "value": dist_json(v), "agrees": same }),
                );
            }
            Err(e) => return CommandOutput::fail(Outcome::Precondition, e.to_string()),
        }
    }
    if opts.geodesic {
        match geodesic(a, &e1, &e2) {
            Ok(Some(w)) => {
                payload.insert("geodesic".into(), geodesic_json(a, &w));
            }
            Ok(None) => {
                payload.insert("geodesic".into(), Value::Null);
            }
            Err(e) => return CommandOutput::fail(Outcome::Precondition, e.to_string()),
        }
    }
    CommandOutput {
        payload: Value::Object(payload),
        outcome: if agrees {
            Outcome::Ok
        } else {
            Outcome::CheckFailed
        },
    }
}

/// Pairwise distances with a fixed thread count; rows are assembled in index
/// order so the output is independent of scheduling.
pub fn distance_matrix_threaded(
    a: &PartialAction,
    els: &[NormalElement],
    threads: usize,
) -> Result<Vec<Vec<f64>>, partact_core::Error> {
    if threads <= 1 || els.len() < 2 {
        return metglob::distance_matrix(a, els);
    }
    a.is_confluent();
    let n = els.len();
    let chunk = n.div_ceil(threads);
    let indices: Vec<usize> = (0..n).collect();
    let results: Vec<Result<Vec<Vec<f64>>, partact_core::Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = indices
            .chunks(chunk)
            .map(|idxs| {
                s.spawn(move || {
                    idxs.iter()
                        .map(|&i| {
                            (0..n)
                                .map(|j| distance(a, &els[i], &els[j]))
                                .collect::<Result<Vec<f64>, _>>()
                        })
                        .collect::<Result<Vec<Vec<f64>>, _>>()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut rows = Vec::with_capacity(n);
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn cmd_truncation(
    l: &Loaded,
    forced: bool,
    bound: usize,
    with_metric: bool,
    threads: usize,
    cap_infinite_at: Option<f64>,
) -> CommandOutput {
    if let Err(out) = ensure_certified(l, forced) {
        return out;
    }
    if let Err(out) = ensure_confluent(l) {
        return out;
    }
    let a = &l.action;
    let truncation = enumerate_truncation(a, bound);
    let mut payload = serde_json::Map::new();
    payload.insert("bound".into(), json!(bound));
    payload.insert("count".into(), json!(truncation.len()));
    payload.insert(
        "elements".into(),
        json!(truncation
            .elements
            .iter()
            .map(|el| element_json(a, el))
            .collect::<Vec<_>>()),
    );
    if with_metric {
        if let Err(out) = ensure_metric(l) {
            return out;
        }
        if let Err(out) = ensure_nonexpansive(l) {
            return out;
        }
        match distance_matrix_threaded(a, &truncation.elements, threads) {
            Ok(mut rows) => {
                if let Some(cap) = cap_infinite_at {
                    for row in &mut rows {
                        for v in row {
                            if v.is_infinite() {
                                *v = cap;
                            }
                        }
                    }
                }
                payload.insert("metric".into(), matrix_json(&rows));
            }
            Err(e) => return CommandOutput::fail(Outcome::Precondition, e.to_string()),
        }
    }
    CommandOutput::ok(Value::Object(payload))
}

pub fn cmd_topology(l: &Loaded, embedding: bool, t1: bool, maps: bool) -> CommandOutput {
    let Some(monoid) = &l.monoid else {
        return CommandOutput::fail(
            Outcome::Precondition,
            "topology checks need a monoid block in the manifest",
        );
    };
    let ma = match monoid {
        Ok(ma) => ma,
        Err(msg) => return CommandOutput::fail(Outcome::InputError, msg.clone()),
    };
    let Some(t) = ma.space.topology().cloned() else {
        return CommandOutput::fail(
            Outcome::Precondition,
            "topology checks need a topology on the space",
        );
    };
    let q = finite_monoid_globalization(ma);
    let y_top = match fintop::globalization_topology(&q, &t) {
        Ok(y) => y,
        Err(e) => return CommandOutput::fail(Outcome::Precondition, e.to_string()),
    };
    let axioms = y_top.validate();
    let mut ok = axioms.is_valid();
    let mut payload = serde_json::Map::new();
    payload.insert("classes".into(), json!(q.class_count()));
    payload.insert(
        "class_members".into(),
        json!((0..q.class_count())
            .map(|c| {
                q.class_members(c)
                    .iter()
                    .map(|&(u, x)| json!([q.monoid().element_name(u), q.space().point_name(x)]))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()),
    );
    payload.insert("opens_count".into(), json!(y_top.opens().len()));
    payload.insert(
        "axioms".into(),
        json!({ "valid": axioms.is_valid(), "t1": axioms.t1 }),
    );
    if embedding {
        match fintop::check_embedding(&q, &t) {
            Ok(r) => {
                ok &= r.pass();
                let witness = r.witness.map(|mask| {
                    (0..q.space().len())
                        .filter(|&x| mask & (1 << x) != 0)
                        .map(|x| q.space().point_name(x).to_string())
                        .collect::<Vec<_>>()
                });
                payload.insert(
                    "embedding".into(),
                    json!({ "pass": r.pass(), "extends": r.extends, "restricts": r.restricts, "witness": witness }),
                );
            }
            Err(e) => return CommandOutput::fail(Outcome::Precondition, e.to_string()),
        }
    }
    if t1 {
        match fintop::check_t1(&q, &t) {
            Ok(r) => {
                let pass = r.singletons_closed && r.preimage_criterion;
                ok &= pass;
                payload.insert(
                    "t1".into(),
                    json!({
                        "pass": pass,
                        "singletons_closed": r.singletons_closed,
                        "preimage_criterion": r.preimage_criterion,
                        "agree": r.agree(),
                    }),
                );
            }
            Err(e) => return CommandOutput::fail(Outcome::Precondition, e.to_string()),
        }
    }
    if maps {
        let mut rows = Vec::new();
        for u in 0..q.monoid().len() {
            let closed = fintop::is_closed_map_into_y(&q, &t, u);
            let open = fintop::is_open_map_into_y(&q, &t, u);
            match (closed, open) {
                (Ok(c), Ok(o)) => rows.push(json!({
                    "element": q.monoid().element_name(u),
                    "closed": c,
                    "open": o,
                })),
                (Err(e), _) | (_, Err(e)) => {
                    return CommandOutput::fail(Outcome::Precondition, e.to_string())
                }
            }
        }
        payload.insert("maps".into(), json!(rows));
    }
    CommandOutput {
        payload: Value::Object(payload),
        outcome: if ok {
            Outcome::Ok
        } else {
            Outcome::CheckFailed
        },
    }
}

pub fn cmd_glue(doc: &GlueDoc, cap_infinite_at: Option<f64>) -> CommandOutput {
    let s1 = match manifest::resolve_space(&doc.space1) {
        Ok(s) => s,
        Err(e) => return CommandOutput::fail(Outcome::InputError, e),
    };
    let s2 = match manifest::resolve_space(&doc.space2) {
        Ok(s) => s,
        Err(e) => return CommandOutput::fail(Outcome::InputError, e),
    };
    let (Some(m1), Some(m2)) = (s1.metric(), s2.metric()) else {
        return CommandOutput::fail(Outcome::Precondition, "both spaces need metrics");
    };
    let mut ident = Vec::new();
    for (n1, n2) in &doc.ident {
        let z1 = match s1.point_id(n1) {
            Ok(z) => z,
            Err(e) => return CommandOutput::fail(Outcome::InputError, e.to_string()),
        };
        let z2 = match s2.point_id(n2) {
            Ok(z) => z,
            Err(e) => return CommandOutput::fail(Outcome::InputError, e.to_string()),
        };
        ident.push((z1, z2));
    }
    let glued = match metglob::glue(m1, m2, &ident) {
        Ok(g) => g,
        Err(e @ partact_core::Error::NonIsometricIdent(..)) => {
            return CommandOutput::fail(Outcome::Precondition, e.to_string())
        }
        Err(e) => return CommandOutput::fail(Outcome::InputError, e.to_string()),
    };

    // glued point names: unidentified names of the first space, then the
    // second space; prefixes disambiguate collisions
    let identified: BTreeMap<usize, usize> = ident.iter().copied().collect();
    let left_names: Vec<String> = (0..s1.len())
        .filter(|x| !identified.contains_key(x))
        .map(|x| s1.point_name(x).to_string())
        .collect();
    let right_names: Vec<String> = (0..s2.len())
        .map(|y| s2.point_name(y).to_string())
        .collect();
    let mut names = Vec::new();
    for n in &left_names {
        if right_names.contains(n) {
            names.push(format!("1:{n}"));
        } else {
            names.push(n.clone());
        }
    }
    for n in &right_names {
        if left_names.contains(n) {
            names.push(format!("2:{n}"));
        } else {
            names.push(n.clone());
        }
    }
    let mut rows = glued.metric.rows();
    if let Some(cap) = cap_infinite_at {
        for row in &mut rows {
            for v in row {
                if v.is_infinite() {
                    *v = cap;
                }
            }
        }
    }
    let payload = json!({
        "points": names,
        "metric": matrix_json(&rows),
        "index_of_space1": (0..s1.len()).map(|x| json!({
            "point": s1.point_name(x),
            "glued": names[glued.left_index[x]],
        })).collect::<Vec<_>>(),
        "index_of_space2": (0..s2.len()).map(|y| json!({
            "point": s2.point_name(y),
            "glued": names[glued.right_index[y]],
        })).collect::<Vec<_>>(),
    });
    CommandOutput::ok(payload)
}

pub enum GammaSource {
    Singletons,
    File(Vec<GammaDoc>),
}

pub fn cmd_homogenize(doc: &ManifestDoc, bound: usize, gamma: &GammaSource) -> CommandOutput {
    let Some(space_doc) = &doc.space else {
        return CommandOutput::fail(Outcome::Precondition, "homogenization needs a space");
    };
    let space = match manifest::resolve_space(space_doc) {
        Ok(s) => s,
        Err(e) => return CommandOutput::fail(Outcome::InputError, e),
    };
    if space.metric().is_none() {
        return CommandOutput::fail(Outcome::Precondition, "homogenization needs a metric");
    }
    let gamma: Vec<(String, BTreeMap<usize, usize>)> = match gamma {
        GammaSource::Singletons => {
            let mut out = Vec::new();
            for x in 0..space.len() {
                for y in 0..space.len() {
                    if x != y {
                        out.push((
                            format!("{}{}", space.point_name(x), space.point_name(y)),
                            BTreeMap::from([(y, x)]),
                        ));
                    }
                }
            }
            out
        }
        GammaSource::File(docs) => {
            let mut out = Vec::new();
            for d in docs {
                let mut map = BTreeMap::new();
                for (from, to) in &d.map {
                    let x = match space.point_id(from) {
                        Ok(x) => x,
                        Err(e) => return CommandOutput::fail(Outcome::InputError, e.to_string()),
                    };
                    let y = match space.point_id(to) {
                        Ok(y) => y,
                        Err(e) => return CommandOutput::fail(Outcome::InputError, e.to_string()),
                    };
                    map.insert(x, y);
                }
                out.push((d.name.clone(), map));
            }
            out
        }
    };
    let h = match homogenize_step(space, &gamma, bound) {
        Ok(h) => h,
        Err(
            e @ (partact_core::Error::NonIsometricMap(_) | partact_core::Error::EmptyDomainMap(_)),
        ) => return CommandOutput::fail(Outcome::Precondition, e.to_string()),
        Err(e) => return CommandOutput::fail(Outcome::InputError, e.to_string()),
    };
    let a = &h.action;
    let p = a.presentation();
    let payload = json!({
        "generators": (0..p.generator_count())
            .map(|i| p.generator_name(partact_core::GeneratorId(i as u32)).to_string())
            .collect::<Vec<_>>(),
        "rules": p.rules().len(),
        "truncation": {
            "bound": h.truncation.bound,
            "count": h.truncation.len(),
            "elements": h.truncation.elements.iter().map(|el| element_json(a, el)).collect::<Vec<_>>(),
        },
        "metric": matrix_json(&h.metric.rows()),
        "gamma_extends": h.gamma_extends,
        "embedding_isometric": h.embedding_isometric,
    });
    CommandOutput {
        payload,
        outcome: if h.gamma_extends && h.embedding_isometric {
            Outcome::Ok
        } else {
            Outcome::CheckFailed
        },
    }
}
