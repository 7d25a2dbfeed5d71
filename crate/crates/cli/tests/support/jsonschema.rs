//! Validator for the subset of JSON Schema (draft 7) used by the published
//! response schemas. Unsupported keywords panic rather than pass silently.

use serde_json::{Map, Value};

pub fn validate(schema: &Value, instance: &Value) -> Vec<String> {
    let mut errors = Vec::new();
    check(schema, schema, instance, "$", &mut errors);
    errors
}

fn resolve<'a>(root: &'a Value, reference: &str) -> &'a Value {
    let pointer = reference
        .strip_prefix('#')
        .unwrap_or_else(|| panic!("only local $ref: {reference}"));
    root.pointer(pointer)
        .unwrap_or_else(|| panic!("dangling $ref {reference}"))
}

fn type_matches(name: &str, v: &Value) -> bool {
    match name {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "number" => v.is_number(),
        "integer" => v.is_u64() || v.is_i64(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        other => panic!("unknown type {other}"),
    }
}

fn check(root: &Value, schema: &Value, v: &Value, at: &str, errors: &mut Vec<String>) {
    let Some(schema) = schema.as_object() else {
        if schema == &Value::Bool(false) {
            errors.push(format!("{at}: not allowed"));
        }
        return;
    };
    if let Some(r) = schema.get("$ref") {
        check(root, resolve(root, r.as_str().unwrap()), v, at, errors);
        return;
    }
    for (key, rule) in schema {
        match key.as_str() {
            "$schema" | "title" | "description" | "definitions" => {}
            "type" => {
                let ok = match rule {
                    Value::String(t) => type_matches(t, v),
                    Value::Array(ts) => ts.iter().any(|t| type_matches(t.as_str().unwrap(), v)),
                    _ => panic!("bad type rule"),
                };
                if !ok {
                    errors.push(format!("{at}: expected type {rule}, got {v}"));
                }
            }
            "enum" => {
                if !rule.as_array().unwrap().contains(v) {
                    errors.push(format!("{at}: {v} not in {rule}"));
                }
            }
            "required" => {
                if let Some(obj) = v.as_object() {
                    for name in rule.as_array().unwrap() {
                        if !obj.contains_key(name.as_str().unwrap()) {
                            errors.push(format!("{at}: missing {name}"));
                        }
                    }
                }
            }
            "properties" => {
                if let Some(obj) = v.as_object() {
                    for (name, sub) in rule.as_object().unwrap() {
                        if let Some(child) = obj.get(name) {
                            check(root, sub, child, &format!("{at}.{name}"), errors);
                        }
                    }
                }
            }
            "additionalProperties" => {
                if let Some(obj) = v.as_object() {
                    let declared = schema.get("properties").and_then(Value::as_object);
                    let empty = Map::new();
                    let declared = declared.unwrap_or(&empty);
                    for (name, child) in obj.iter().filter(|(k, _)| !declared.contains_key(*k)) {
                        check(root, rule, child, &format!("{at}.{name}"), errors);
                    }
                }
            }
            "items" => {
                if let Some(items) = v.as_array() {
                    for (i, child) in items.iter().enumerate() {
                        check(root, rule, child, &format!("{at}[{i}]"), errors);
                    }
                }
            }
            "minItems" => {
                if let Some(items) = v.as_array() {
                    if (items.len() as u64) < rule.as_u64().unwrap() {
                        errors.push(format!("{at}: fewer than {rule} items"));
                    }
                }
            }
            "minLength" => {
                if let Some(s) = v.as_str() {
                    if (s.chars().count() as u64) < rule.as_u64().unwrap() {
                        errors.push(format!("{at}: shorter than {rule}"));
                    }
                }
            }
            "pattern" => {
                let pattern = rule.as_str().unwrap();
                let prefix = pattern
                    .strip_prefix('^')
                    .unwrap_or_else(|| panic!("unsupported pattern {pattern}"));
                assert!(
                    prefix.chars().all(char::is_alphanumeric),
                    "unsupported pattern {pattern}"
                );
                if let Some(s) = v.as_str() {
                    if !s.starts_with(prefix) {
                        errors.push(format!("{at}: {s:?} does not match {pattern}"));
                    }
                }
            }
            "format" => {
                assert_eq!(rule, "date-time", "unsupported format");
                if let Some(s) = v.as_str() {
                    if !s.contains('T') || shiftscope_core::dataset::parse_timestamp(s).is_none() {
                        errors.push(format!("{at}: {s:?} is not a date-time"));
                    }
                }
            }
            "minimum" | "maximum" | "exclusiveMinimum" | "exclusiveMaximum" => {
                if let Some(x) = v.as_f64() {
                    let bound = rule.as_f64().unwrap();
                    let ok = match key.as_str() {
                        "minimum" => x >= bound,
                        "maximum" => x <= bound,
                        "exclusiveMinimum" => x > bound,
                        _ => x < bound,
                    };
                    if !ok {
                        errors.push(format!("{at}: {x} violates {key} {bound}"));
                    }
                }
            }
            other => panic!("unsupported keyword {other}"),
        }
    }
}
