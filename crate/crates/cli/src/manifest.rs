//! The JSON manifest format and its resolution into core values.
//!
//! A manifest names generators, points and rules symbolically; resolution
//! turns names into dense indices. Distances are decimal numbers with the
//! string `"inf"` for infinity.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;

use partact_core::paction::{MonoidAction, PartialGenMap};
use partact_core::words::GeneratorId;
use partact_core::{
    Config, FiniteMonoid, FiniteTopology, PartialAction, Presentation, Space, WeakPseudometric,
};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestDoc {
    #[serde(default)]
    pub presentation: Option<PresentationDoc>,
    #[serde(default)]
    pub space: Option<SpaceDoc>,
    #[serde(default)]
    pub action: Option<BTreeMap<String, GenMapDoc>>,
    #[serde(default)]
    pub monoid: Option<MonoidDoc>,
    #[serde(default)]
    pub group: Option<GroupDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationDoc {
    pub generators: Vec<String>,
    /// largest generator first
    pub precedence: Vec<String>,
    pub rules: Vec<RuleDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDoc {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub points: Vec<String>,
    #[serde(default)]
    pub metric: Option<Vec<Vec<NumOrInf>>>,
    #[serde(default)]
    pub topology: Option<TopologyDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum NumOrInf {
    Num(f64),
    Str(String),
}

impl NumOrInf {
    pub fn value(&self) -> Result<f64, String> {
        match self {
            NumOrInf::Num(v) => Ok(*v),
            NumOrInf::Str(s) if s == "inf" => Ok(f64::INFINITY),
            NumOrInf::Str(s) => Err(format!("bad distance entry {s:?}; use a number or \"inf\"")),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDoc {
    pub opens: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenMapDoc {
    pub dom: Vec<String>,
    pub map: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonoidDoc {
    pub elements: Vec<String>,
    pub unit: String,
    pub table: Vec<Vec<String>>,
    pub element_action: BTreeMap<String, GenMapDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    pub inverses: BTreeMap<String, String>,
}

/// A two-space manifest for the gluing command.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlueDoc {
    pub space1: SpaceDoc,
    pub space2: SpaceDoc,
    /// identification by point names, first space to second
    pub ident: BTreeMap<String, String>,
}

/// One partial map for the homogenization command.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaDoc {
    pub name: String,
    pub map: BTreeMap<String, String>,
}

/// A manifest resolved against the core types.
pub struct Loaded {
    pub action: PartialAction,
    /// present iff the manifest carries a monoid block; the inner result
    /// records monoid-law violations
    pub monoid: Option<Result<MonoidAction, String>>,
}

pub fn parse_manifest(text: &str) -> Result<ManifestDoc, String> {
    serde_json::from_str(text).map_err(|e| format!("manifest parse error: {e}"))
}

pub fn parse_glue_manifest(text: &str) -> Result<GlueDoc, String> {
    serde_json::from_str(text).map_err(|e| format!("manifest parse error: {e}"))
}

pub fn parse_gamma_file(text: &str) -> Result<Vec<GammaDoc>, String> {
    serde_json::from_str(text).map_err(|e| format!("gamma parse error: {e}"))
}

pub fn resolve_space(doc: &SpaceDoc) -> Result<Space, String> {
    let mut space = Space::new(doc.points.clone()).map_err(|e| e.to_string())?;
    if let Some(metric) = &doc.metric {
        let rows = metric
            .iter()
            .map(|row| {
                row.iter()
                    .map(NumOrInf::value)
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let m = WeakPseudometric::new(rows).map_err(|e| e.to_string())?;
        space = space.with_metric(m).map_err(|e| e.to_string())?;
    }
    if let Some(top) = &doc.topology {
        let resolve_open = |names: &Vec<String>| -> Result<u64, String> {
            let mut mask = 0u64;
            for n in names {
                let i = doc
                    .points
                    .iter()
                    .position(|p| p == n)
                    .ok_or_else(|| format!("unknown point {n:?} in topology"))?;
                mask |= 1 << i;
            }
            Ok(mask)
        };
        let opens = top
            .opens
            .iter()
            .map(resolve_open)
            .collect::<Result<Vec<_>, _>>()?;
        let t = FiniteTopology::new(doc.points.len(), opens).map_err(|e| e.to_string())?;
        space = space.with_topology(t).map_err(|e| e.to_string())?;
    }
    Ok(space)
}

fn resolve_partial_map(
    space: &Space,
    doc: &GenMapDoc,
    owner: &str,
) -> Result<Vec<Option<usize>>, String> {
    let dom: BTreeSet<&String> = doc.dom.iter().collect();
    let keys: BTreeSet<&String> = doc.map.keys().collect();
    if dom != keys {
        return Err(format!(
            "map for {owner:?} must be defined exactly on its listed domain"
        ));
    }
    let mut map = vec![None; space.len()];
    for (from, to) in &doc.map {
        let x = space.point_id(from).map_err(|e| e.to_string())?;
        let y = space.point_id(to).map_err(|e| e.to_string())?;
        map[x] = Some(y);
    }
    Ok(map)
}

pub fn resolve(doc: &ManifestDoc, step_budget: Option<u64>) -> Result<Loaded, String> {
    let pdoc = doc
        .presentation
        .as_ref()
        .ok_or("manifest needs a presentation block")?;
    if pdoc.generators.iter().any(|g| g == "e") {
        return Err("generator name \"e\" is reserved for the empty word".into());
    }
    let mut presentation = Presentation::new(
        pdoc.generators.clone(),
        pdoc.precedence.clone(),
        pdoc.rules
            .iter()
            .map(|r| (r.lhs.clone(), r.rhs.clone()))
            .collect(),
    )
    .map_err(|e| e.to_string())?;
    if let Some(group) = &doc.group {
        let pairs: Vec<(String, String)> = group
            .inverses
            .iter()
            .map(|(a, b)| (a.clone(), b.clone()))
            .collect();
        presentation = presentation
            .with_inverses(&pairs)
            .map_err(|e| e.to_string())?;
    }
    if let Some(budget) = step_budget {
        presentation = presentation.with_step_budget(budget);
    }

    let space = match &doc.space {
        Some(sd) => resolve_space(sd)?,
        None => Space::new(Vec::new()).map_err(|e| e.to_string())?,
    };

    let mut gens = Vec::new();
    if let Some(action) = &doc.action {
        for name in action.keys() {
            presentation.generator_id(name).map_err(|e| e.to_string())?;
        }
        for i in 0..presentation.generator_count() {
            let gid = GeneratorId(i as u32);
            let name = presentation.generator_name(gid).to_string();
            let map = match action.get(&name) {
                Some(gm) => resolve_partial_map(&space, gm, &name)?,
                None => vec![None; space.len()],
            };
            gens.push(PartialGenMap::new(gid, map));
        }
    } else {
        for i in 0..presentation.generator_count() {
            gens.push(PartialGenMap::new(
                GeneratorId(i as u32),
                vec![None; space.len()],
            ));
        }
    }

    // name resolution is a hard error; monoid-law violations are kept as a
    // soft result so the validate command can report them
    let monoid = match &doc.monoid {
        None => None,
        Some(md) => {
            let resolve_elem = |name: &String| -> Result<usize, String> {
                md.elements
                    .iter()
                    .position(|e| e == name)
                    .ok_or_else(|| format!("unknown monoid element {name:?}"))
            };
            let unit = resolve_elem(&md.unit)?;
            let table = md
                .table
                .iter()
                .map(|row| row.iter().map(resolve_elem).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            let mut maps = Vec::new();
            for name in &md.elements {
                let gm = md
                    .element_action
                    .get(name)
                    .ok_or_else(|| format!("element_action is missing an entry for {name:?}"))?;
                maps.push(resolve_partial_map(&space, gm, name)?);
            }
            for name in md.element_action.keys() {
                resolve_elem(name)?;
            }
            let soft = FiniteMonoid::new(md.elements.clone(), table, unit)
                .map_err(|e| e.to_string())
                .and_then(|fm| {
                    MonoidAction::new(fm, space.clone(), maps).map_err(|e| e.to_string())
                });
            Some(soft)
        }
    };

    let action = PartialAction::new(presentation, space, gens).map_err(|e| e.to_string())?;
    Ok(Loaded { action, monoid })
}

/// Parse `word@point` where the word is `e` or a comma-separated list of
/// generator names; the configuration is normalized by the caller.
pub fn parse_element(a: &PartialAction, s: &str) -> Result<Config, String> {
    let (word_part, point_part) = s
        .rsplit_once('@')
        .ok_or_else(|| format!("element {s:?} must have the form word@point"))?;
    let word = a
        .presentation()
        .parse_word(word_part)
        .map_err(|e| e.to_string())?;
    let point = a.space().point_id(point_part).map_err(|e| e.to_string())?;
    Ok(Config::new(word, point))
}
