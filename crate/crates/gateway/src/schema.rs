//! Lightweight response-shape descriptors.
//!
//! These are not full JSON Schema; they cover what the pipeline actually
//! needs to reject a malformed model response early: required top-level
//! fields with coarse types, closed enumerations, and an optional strict
//! mode that refuses unexpected top-level fields.

use serde_json::Value;

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    String,
    Bool,
    Number,
    Array,
    Object,
    /// A number restricted to an exact set of values.
    NumberEnum(Vec<f64>),
    /// A string restricted to an exact set of values.
    StringEnum(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    pub name: String,
    pub kind: FieldKind,
}

impl FieldSpec {
    pub fn new(name: impl Into<String>, kind: FieldKind) -> Self {
        FieldSpec {
            name: name.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemaDescriptor {
    /// Short name; becomes part of the request digest.
    pub name: String,
    pub required: Vec<FieldSpec>,
    /// Reject responses with top-level fields beyond the required ones.
    pub strict: bool,
}

impl SchemaDescriptor {
    pub fn new(name: impl Into<String>, required: Vec<FieldSpec>) -> Self {
        SchemaDescriptor {
            name: name.into(),
            required,
            strict: false,
        }
    }

    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    /// Checks a parsed response against the descriptor. Returns a plain
    /// message on failure; the gateway echoes it back to the model verbatim.
    pub fn validate(&self, value: &Value) -> Result<(), String> {
        let obj = value
            .as_object()
            .ok_or_else(|| format!("expected a JSON object for {}", self.name))?;
        for field in &self.required {
            let got = obj
                .get(&field.name)
                .ok_or_else(|| format!("missing required field {:?}", field.name))?;
            check_kind(&field.name, &field.kind, got)?;
        }
        if self.strict {
            for key in obj.keys() {
                if !self.required.iter().any(|f| f.name == *key) {
                    return Err(format!("unexpected field {key:?} (schema {})", self.name));
                }
            }
        }
        Ok(())
    }
}

fn check_kind(name: &str, kind: &FieldKind, value: &Value) -> Result<(), String> {
    let fail = |want: &str| {
        Err(format!(
            "field {name:?} must be {want}, got {}",
            type_name(value)
        ))
    };
    match kind {
        FieldKind::String => {
            if !value.is_string() {
                return fail("a string");
            }
        }
        FieldKind::Bool => {
            if !value.is_boolean() {
                return fail("a boolean");
            }
        }
        FieldKind::Number => {
            if !value.is_number() {
                return fail("a number");
            }
        }
        FieldKind::Array => {
            if !value.is_array() {
                return fail("an array");
            }
        }
        FieldKind::Object => {
            if !value.is_object() {
                return fail("an object");
            }
        }
        FieldKind::NumberEnum(allowed) => {
            let n = value.as_f64();
            if n.is_none_or(|n| !allowed.contains(&n)) {
                return Err(format!("field {name:?} must be one of {allowed:?}, got {value}"));
            }
        }
        FieldKind::StringEnum(allowed) => {
            let s = value.as_str();
            if s.is_none_or(|s| !allowed.iter().any(|a| a == s)) {
                return Err(format!("field {name:?} must be one of {allowed:?}, got {value}"));
            }
        }
    }
    Ok(())
}

fn type_name(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn schema() -> SchemaDescriptor {
        SchemaDescriptor::new(
            "judge",
            vec![
                FieldSpec::new("task_completed", FieldKind::Bool),
                FieldSpec::new("reasoning", FieldKind::String),
            ],
        )
        .strict()
    }

    #[test]
    fn test_accepts_exact_shape() {
        schema()
            .validate(&json!({"task_completed": true, "reasoning": "done"}))
            .unwrap();
    }

    #[test]
    fn test_rejects_missing_and_mistyped() {
        assert!(schema().validate(&json!({"task_completed": true})).is_err());
        assert!(schema()
            .validate(&json!({"task_completed": "yes", "reasoning": "r"}))
            .is_err());
        assert!(schema().validate(&json!(["not", "an", "object"])).is_err());
    }

    #[test]
    fn test_strict_rejects_extra_fields() {
        let err = schema()
            .validate(&json!({"task_completed": true, "reasoning": "r", "confidence": 0.9}))
            .unwrap_err();
        assert!(err.contains("confidence"));
    }

    #[test]
    fn test_number_enum_enforced() {
        let s = SchemaDescriptor::new(
            "score",
            vec![FieldSpec::new(
                "criticality",
                FieldKind::NumberEnum(vec![0.0, 0.5, 1.0]),
            )],
        );
        s.validate(&json!({"criticality": 0.5})).unwrap();
        assert!(s.validate(&json!({"criticality": 0.7})).is_err());
    }
}
