//! JSON rendering of core values. Reports are deterministic: object keys are
//! sorted by the serializer and every sequence is emitted in canonical order.

use serde_json::{json, Map, Value};

use partact_core::glob::NormalElement;
use partact_core::metglob::GeodesicWitness;
use partact_core::paction::{ActionConfluenceReport, PartialAction};
use partact_core::words::{ConfluenceReport, ConfluenceStatus, Presentation, Word};

pub fn dist_json(v: f64) -> Value {
    if v.is_infinite() {
        json!("inf")
    } else {
        json!(v)
    }
}

pub fn matrix_json(rows: &[Vec<f64>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| Value::Array(r.iter().map(|&v| dist_json(v)).collect()))
            .collect(),
    )
}

pub fn word_json(p: &Presentation, w: &Word) -> Value {
    Value::Array(
        w.letters()
            .iter()
            .map(|g| json!(p.generator_name(*g)))
            .collect(),
    )
}

pub fn element_json(a: &PartialAction, el: &NormalElement) -> Value {
    let p = a.presentation();
    json!({
        "word": word_json(p, &el.word),
        "point": a.space().point_name(el.point),
        "display": format!("{}@{}", p.format_word(&el.word), a.space().point_name(el.point)),
        "length": el.lg(),
    })
}

pub fn status_json(status: ConfluenceStatus) -> Value {
    match status {
        ConfluenceStatus::Confluent => json!("confluent"),
        ConfluenceStatus::NotConfluent => json!("not_confluent"),
    }
}

pub fn word_confluence_json(p: &Presentation, report: &ConfluenceReport) -> Value {
    json!({
        "status": status_json(report.status()),
        "counterexamples": report.counterexamples.iter().map(|f| json!({
            "peak": word_json(p, &f.peak),
            "reduct1": word_json(p, &f.reduct1),
            "reduct2": word_json(p, &f.reduct2),
            "nf1": word_json(p, &f.nf1),
            "nf2": word_json(p, &f.nf2),
        })).collect::<Vec<_>>(),
    })
}

pub fn action_confluence_json(a: &PartialAction, report: &ActionConfluenceReport) -> Value {
    let p = a.presentation();
    json!({
        "status": status_json(report.status()),
        "word": word_confluence_json(p, &report.word),
        "mixed_counterexamples": report.mixed.iter().map(|f| json!({
            "peak": {"word": word_json(p, &f.peak.word), "point": a.space().point_name(f.peak.point)},
            "nf1": element_json(a, &f.nf1),
            "nf2": element_json(a, &f.nf2),
        })).collect::<Vec<_>>(),
    })
}

pub fn geodesic_json(a: &PartialAction, w: &GeodesicWitness) -> Value {
    let p = a.presentation();
    json!({
        "form": w.form.name(),
        "total": dist_json(w.total),
        "segments": w.segments.iter().map(|s| json!({
            "word": word_json(p, &s.word),
            "from": a.space().point_name(s.from),
            "to": a.space().point_name(s.to),
        })).collect::<Vec<_>>(),
    })
}

/// The report envelope shared by every command.
pub fn envelope(
    command: &str,
    inputs: Value,
    status: &str,
    payload: Value,
    timing_ms: Option<f64>,
) -> Value {
    let mut map = Map::new();
    map.insert("command".into(), json!(command));
    map.insert("inputs".into(), inputs);
    map.insert("status".into(), json!(status));
    map.insert("payload".into(), payload);
    if let Some(t) = timing_ms {
        map.insert("timing_ms".into(), json!(t));
    }
    Value::Object(map)
}

/// Indented key/value rendering for `--pretty`.
pub fn pretty(value: &Value) -> String {
    let mut out = String::new();
    fn walk(v: &Value, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    match v {
                        Value::Object(_) | Value::Array(_) => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            walk(v, indent + 1, out);
                        }
                        _ => out.push_str(&format!("{pad}{k}: {v}\n")),
                    }
                }
            }
            Value::Array(items) => {
                if items
                    .iter()
                    .all(|i| !matches!(i, Value::Object(_) | Value::Array(_)))
                {
                    let line: Vec<String> = items.iter().map(|i| i.to_string()).collect();
                    out.push_str(&format!("{pad}[{}]\n", line.join(", ")));
                } else {
                    for (i, item) in items.iter().enumerate() {
                        out.push_str(&format!("{pad}- {i}:\n"));
                        walk(item, indent + 1, out);
                    }
                }
            }
            _ => out.push_str(&format!("{pad}{v}\n")),
        }
    }
    walk(value, 0, &mut out);
    out
}
