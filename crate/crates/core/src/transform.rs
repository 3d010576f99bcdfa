//! Message transformation between app-side and service-side records.
//!
//! Records are JSON objects keyed by scope name at the top level, so the
//! mapping `serviceOutput:contacts[*].contactId -> field:tickets[*].id` reads
//! `source["serviceOutput"]["contacts"][i]["contactId"]` and writes
//! `out["field"]["tickets"][i]["id"]`.

use serde_json::{Map, Value as Json};

use crate::model::DataMapping;
use crate::path::Segment;

pub type Record = Map<String, Json>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    /// A path walked through a scalar (or an unexpanded list) as if it were a
    /// record, or a wildcard landed on something that is not a list.
    #[error("PATH_TYPE_CONFLICT: `{path}` crosses a {found} where a {expected} was expected")]
    PathTypeConflict {
        path: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("mapping `{0}` pairs a repeating end with a single-valued one")]
    ArityMismatch(String),
}

impl TransformError {
    pub fn code(&self) -> &'static str {
        match self {
            TransformError::PathTypeConflict { .. } => "PATH_TYPE_CONFLICT",
            TransformError::ArityMismatch(_) => "WILDCARD_MISUSE",
        }
    }
}

fn type_name(v: &Json) -> &'static str {
    match v {
        Json::Null => "null",
        Json::Bool(_) | Json::Number(_) | Json::String(_) => "scalar",
        Json::Array(_) => "list",
        Json::Object(_) => "record",
    }
}

fn joined(segs: &[Segment]) -> String {
    segs.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join(".")
}

/// Reads a wildcard-free path. `Ok(None)` when any step is missing or null.
fn read<'a>(mut cur: &'a Json, segs: &[Segment], full: &[Segment]) -> Result<Option<&'a Json>, TransformError> {
    for seg in segs {
        match cur {
            Json::Object(map) => match map.get(&seg.name) {
                None | Some(Json::Null) => return Ok(None),
                Some(next) => cur = next,
            },
            other => {
                return Err(TransformError::PathTypeConflict {
                    path: joined(full),
                    expected: "record",
                    found: type_name(other),
                })
            }
        }
    }
    Ok(Some(cur))
}

/// Returns the slot at `segs` below `root`, creating records on the way.
fn slot<'a>(root: &'a mut Record, segs: &[Segment]) -> Result<&'a mut Json, TransformError> {
    let (first, rest) = segs.split_first().expect("non-empty path");
    let mut cur = root.entry(first.name.clone()).or_insert(Json::Null);
    for (i, seg) in rest.iter().enumerate() {
        if cur.is_null() {
            *cur = Json::Object(Map::new());
        }
        cur = match cur {
            Json::Object(map) => map.entry(seg.name.clone()).or_insert(Json::Null),
            other => {
                return Err(TransformError::PathTypeConflict {
                    path: joined(&segs[..=i]),
                    expected: "record",
                    found: type_name(other),
                })
            }
        };
    }
    Ok(cur)
}

fn write(root: &mut Record, segs: &[Segment], value: Json) -> Result<(), TransformError> {
    let target = slot(root, segs)?;
    if matches!(target, Json::Object(_) | Json::Array(_)) && !value.is_object() && !value.is_array() {
        return Err(TransformError::PathTypeConflict {
            path: joined(segs),
            expected: "scalar",
            found: type_name(target),
        });
    }
    *target = value;
    Ok(())
}

/// Applies `mappings` in order to `source`, producing a record holding exactly
/// the mapped destinations.
///
/// A wildcard mapping yields one destination row per source element, in
/// source order, even when the element lacks the mapped field. Absent sources
/// produce absent destinations.
pub fn transform(mappings: &[DataMapping], source: &Record) -> Result<Record, TransformError> {
    let mut out = Record::new();
    let root = Json::Object(source.clone());
    for m in mappings {
        let from = m.from.rooted_segments();
        let to = m.to.rooted_segments();
        let from_w = from.iter().position(|s| s.wildcard);
        let to_w = to.iter().position(|s| s.wildcard);
        match (from_w, to_w) {
            (None, None) => {
                if let Some(v) = read(&root, &from, &from)? {
                    write(&mut out, &to, v.clone())?;
                }
            }
            (Some(fw), Some(tw)) => {
                let Some(list) = read(&root, &from[..=fw], &from)? else {
                    continue;
                };
                let Json::Array(items) = list else {
                    return Err(TransformError::PathTypeConflict {
                        path: joined(&from[..=fw]),
                        expected: "list",
                        found: type_name(list),
                    });
                };
                let rows = slot(&mut out, &to[..=tw])?;
                if rows.is_null() {
                    *rows = Json::Array(Vec::new());
                }
                let Json::Array(rows) = rows else {
                    return Err(TransformError::PathTypeConflict {
                        path: joined(&to[..=tw]),
                        expected: "list",
                        found: type_name(rows),
                    });
                };
                while rows.len() < items.len() {
                    rows.push(Json::Object(Map::new()));
                }
                for (item, row) in items.iter().zip(rows.iter_mut()) {
                    let value = if fw + 1 == from.len() {
                        (!item.is_null()).then_some(item)
                    } else {
                        read(item, &from[fw + 1..], &from)?
                    };
                    let Some(value) = value else { continue };
                    if tw + 1 == to.len() {
                        *row = value.clone();
                    } else {
                        let Json::Object(row) = row else {
                            return Err(TransformError::PathTypeConflict {
                                path: joined(&to[..=tw]),
                                expected: "record",
                                found: type_name(row),
                            });
                        };
                        write(row, &to[tw + 1..], value.clone())?;
                    }
                }
            }
            _ => return Err(TransformError::ArityMismatch(format!("{} -> {}", m.from, m.to))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn rec(v: Json) -> Record {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn no_mappings_give_empty_record() {
        let src = rec(json!({"field": {"a": "1"}}));
        assert!(transform(&[], &src).unwrap().is_empty());
    }

    #[test]
    fn wildcard_fans_out_in_order() {
        let src = rec(json!({"serviceOutput": {"contacts": [
            {"contactId": "42"}, {"contactId": "7"}, {"contactId": "9"}
        ]}}));
        let m = [DataMapping::parse(
            "serviceOutput:contacts[*].contactId",
            "field:rows[*].id",
        )];
        let out = transform(&m, &src).unwrap();
        assert_eq!(
            Json::Object(out),
            json!({"field": {"rows": [{"id": "42"}, {"id": "7"}, {"id": "9"}]}})
        );
    }

    #[test]
    fn traversing_a_scalar_conflicts() {
        let src = rec(json!({"field": {"customer": "x"}}));
        let m = [DataMapping::parse("field:customer.lastName", "field:lastName")];
        let err = transform(&m, &src).unwrap_err();
        assert_eq!(err.code(), "PATH_TYPE_CONFLICT");
    }

    #[test]
    fn absent_source_is_not_fabricated() {
        let src = rec(json!({"serviceOutput": {"status": null}}));
        let m = [
            DataMapping::parse("serviceOutput:status", "field:status"),
            DataMapping::parse("serviceOutput:missing", "field:other"),
        ];
        assert!(transform(&m, &src).unwrap().is_empty());
    }

    #[test]
    fn rows_exist_even_without_the_field() {
        let src = rec(json!({"serviceOutput": {"l": [{"x": "1"}, {}]}}));
        let m = [DataMapping::parse("serviceOutput:l[*].x", "field:t[*].x")];
        let out = transform(&m, &src).unwrap();
        assert_eq!(Json::Object(out), json!({"field": {"t": [{"x": "1"}, {}]}}));
    }

    #[test]
    fn mixed_arity_is_rejected() {
        let src = rec(json!({"serviceOutput": {"l": []}}));
        let m = [DataMapping::parse("serviceOutput:l[*].x", "field:x")];
        assert!(matches!(transform(&m, &src), Err(TransformError::ArityMismatch(_))));
    }
}
