use serde_json::{Map, Value};

/// Ordered `key: value` report, printed as lines or as one JSON object.
#[derive(Default)]
pub struct Report {
    fields: Vec<(&'static str, Value)>,
}

impl Report {
    pub fn put(&mut self, key: &'static str, value: impl Into<Value>) -> &mut Self {
        self.fields.push((key, value.into()));
        self
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let map: Map<String, Value> = self
                .fields
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect();
            return serde_json::to_string_pretty(&Value::Object(map))
                .expect("report serialization cannot fail")
                + "\n";
        }
        let mut out = String::new();
        for (key, value) in &self.fields {
            match value {
                // multi-line values go on indented continuation lines
                Value::String(s) if s.contains('\n') => {
                    out.push_str(key);
                    out.push_str(":\n");
                    for line in s.lines() {
                        out.push_str("  ");
                        out.push_str(line);
                        out.push('\n');
                    }
                }
                v => {
                    out.push_str(key);
                    out.push_str(": ");
                    out.push_str(&plain(v));
                    out.push('\n');
                }
            }
        }
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(plain).collect::<Vec<_>>().join(" "),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
