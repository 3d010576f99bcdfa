//! Brute-force oracle for transform: works on flattened leaves
//! (`scope.a.0.b -> value`) and list lengths instead of walking paths.

use std::collections::BTreeMap;

use proptest::prelude::*;
use serde_json::{json, Map, Value as Json};

use screenforge_core::model::DataMapping;
use screenforge_core::transform::{transform, Record};

#[derive(Debug, Default, PartialEq)]
pub struct Flat {
    pub leaves: BTreeMap<String, Json>,
    pub lists: BTreeMap<String, usize>,
}

pub fn flatten(prefix: &str, v: &Json, flat: &mut Flat) {
    match v {
        Json::Object(map) => {
            for (k, child) in map {
                let p = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&p, child, flat);
            }
        }
        Json::Array(items) => {
            flat.lists.insert(prefix.to_string(), items.len());
            for (i, child) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), child, flat);
            }
        }
        Json::Null => {}
        scalar => {
            flat.leaves.insert(prefix.to_string(), scalar.clone());
        }
    }
}

#[derive(Debug, Clone)]
pub enum Map1 {
    Scalar {
        from: String,
        to: String,
    },
    Rows {
        list: String,
        field: String,
        table: String,
        column: String,
    },
}

pub fn oracle(source: &Flat, mappings: &[Map1]) -> Flat {
    let mut out = Flat::default();
    for m in mappings {
        match m {
            Map1::Scalar { from, to } => {
                if let Some(v) = source.leaves.get(&format!("serviceOutput.{from}")) {
                    out.leaves.insert(format!("field.{to}"), v.clone());
                }
            }
            Map1::Rows {
                list,
                field,
                table,
                column,
            } => {
                let Some(&n) = source.lists.get(&format!("serviceOutput.{list}")) else {
                    continue;
                };
                let len = out.lists.entry(format!("field.{table}")).or_insert(0);
                *len = (*len).max(n);
                for i in 0..n {
                    if let Some(v) = source.leaves.get(&format!("serviceOutput.{list}.{i}.{field}")) {
                        out.leaves.insert(format!("field.{table}.{i}.{column}"), v.clone());
                    }
                }
            }
        }
    }
    out
}

fn leaf() -> impl Strategy<Value = Json> {
    prop_oneof![
        3 => "[a-z0-9 ]{0,6}".prop_map(Json::from),
        1 => (0i64..1000).prop_map(Json::from),
        1 => Just(Json::Null),
    ]
}

fn element() -> impl Strategy<Value = Json> {
    prop::collection::vec(prop::option::of(leaf()), 3).prop_map(|fields| {
        let mut m = Map::new();
        for (i, f) in fields.into_iter().enumerate() {
            if let Some(v) = f {
                m.insert(format!("e{i}"), v);
            }
        }
        Json::Object(m)
    })
}

/// Source records of depth at most two: scalars, one nested record of
/// scalars, and lists (length 0..=5) of flat records.
pub fn source() -> impl Strategy<Value = Json> {
    (
        prop::collection::vec(prop::option::of(leaf()), 3),
        prop::collection::vec(prop::option::of(leaf()), 2),
        prop::collection::vec(prop::option::of(prop::collection::vec(element(), 0..=5)), 2),
    )
        .prop_map(|(scalars, nested, lists)| {
            let mut so = Map::new();
            for (i, v) in scalars.into_iter().enumerate() {
                if let Some(v) = v {
                    so.insert(format!("s{i}"), v);
                }
            }
            let mut r = Map::new();
            for (i, v) in nested.into_iter().enumerate() {
                if let Some(v) = v {
                    r.insert(format!("n{i}"), v);
                }
            }
            so.insert("r".into(), Json::Object(r));
            for (i, l) in lists.into_iter().enumerate() {
                if let Some(items) = l {
                    so.insert(format!("l{i}"), Json::Array(items));
                }
            }
            json!({ "serviceOutput": so })
        })
}

/// Mappings with distinct destinations; some sources are absent on purpose.
pub fn mappings() -> impl Strategy<Value = Vec<Map1>> {
    let scalar_from = prop::sample::select(vec!["s0", "s1", "s2", "s3", "r.n0", "r.n1", "r.n2"]);
    let scalar = (scalar_from, 0usize..4).prop_map(|(from, d)| (from.to_string(), d));
    let rows = (0usize..3, 0usize..4, 0usize..2, 0usize..3);
    (prop::collection::vec(scalar, 0..5), prop::collection::vec(rows, 0..5)).prop_map(|(scalars, rows)| {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for (from, d) in scalars {
            let to = format!("d{d}");
            if seen.insert(to.clone()) {
                out.push(Map1::Scalar { from, to });
            }
        }
        for (l, f, t, c) in rows {
            let (table, column) = (format!("t{t}"), format!("c{c}"));
            if seen.insert(format!("{table}.{column}")) {
                out.push(Map1::Rows {
                    list: format!("l{l}"),
                    field: format!("e{f}"),
                    table,
                    column,
                });
            }
        }
        out
    })
}

pub fn to_data_mappings(ms: &[Map1]) -> Vec<DataMapping> {
    ms.iter()
        .map(|m| match m {
            Map1::Scalar { from, to } => DataMapping::parse(&format!("serviceOutput:{from}"), &format!("field:{to}")),
            Map1::Rows {
                list,
                field,
                table,
                column,
            } => DataMapping::parse(
                &format!("serviceOutput:{list}[*].{field}"),
                &format!("field:{table}[*].{column}"),
            ),
        })
        .collect()
}

/// One generated case: transform against the oracle.
pub fn check(src: &Json, ms: &[Map1]) -> Result<(), TestCaseError> {
    let record: Record = src.as_object().unwrap().clone();
    let actual = transform(&to_data_mappings(ms), &record).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let mut got = Flat::default();
    flatten("", &Json::Object(actual), &mut got);
    let mut flat_src = Flat::default();
    flatten("", src, &mut flat_src);
    prop_assert_eq!(got, oracle(&flat_src, ms));
    Ok(())
}
