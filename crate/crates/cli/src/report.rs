//! Two-format reports: `key = value unit  (engineering form)` text, or JSON.
//! Both carry the exact library values.

use memsosc_core::units::eng;
use serde_json::{Map, Number, Value};

pub const DEFAULT_OFFSETS: [f64; 3] = [1e5, 1e6, 1e7];

#[derive(Debug, Default)]
pub struct Report {
    sections: Vec<(String, Vec<(String, Value, String)>)>,
}

impl Report {
    /// New report whose first section lists the global defaults.
    pub fn new() -> Self {
        let mut r = Report::default();
        r.section("defaults");
        r.num("temperature", 300.0, "K");
        r.num("gamma", 1.0, "");
        r.push(
            "offsets",
            Value::Array(DEFAULT_OFFSETS.iter().map(|&o| json_num(o)).collect()),
            "100 kHz, 1 MHz, 10 MHz".into(),
        );
        r
    }

    pub fn section(&mut self, name: &str) -> &mut Self {
        self.sections.push((name.to_string(), Vec::new()));
        self
    }

    fn push(&mut self, key: &str, value: Value, text: String) {
        if self.sections.is_empty() {
            self.section("report");
        }
        self.sections.last_mut().expect("section").1.push((key.to_string(), value, text));
    }

    pub fn num(&mut self, key: &str, value: f64, unit: &str) -> &mut Self {
        let exact = exact(value);
        let text = if unit.is_empty() || !value.is_finite() {
            exact
        } else {
            let pretty = eng(value, unit);
            let plain = format!("{exact} {unit}");
            if pretty == plain { plain } else { format!("{plain}  ({pretty})") }
        };
        self.push(key, json_num(value), text);
        self
    }

    /// Plain number without an engineering annotation (dB values, ratios).
    pub fn plain(&mut self, key: &str, value: f64, unit: &str) -> &mut Self {
        let text = if unit.is_empty() { exact(value) } else { format!("{} {unit}", exact(value)) };
        self.push(key, json_num(value), text);
        self
    }

    pub fn int(&mut self, key: &str, value: u64) -> &mut Self {
        self.push(key, Value::from(value), value.to_string());
        self
    }

    pub fn text(&mut self, key: &str, value: &str) -> &mut Self {
        self.push(key, Value::from(value), value.to_string());
        self
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.push(key, Value::from(value), value.to_string());
        self
    }

    pub fn list(&mut self, key: &str, items: &[String]) -> &mut Self {
        let text = if items.is_empty() { "none".to_string() } else { items.join("; ") };
        self.push(key, Value::Array(items.iter().map(|s| Value::from(s.as_str())).collect()), text);
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, entries) in &self.sections {
            out.push_str(&format!("[{name}]\n"));
            for (k, _, t) in entries {
                out.push_str(&format!("{k} = {t}\n"));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut root = Map::new();
        for (name, entries) in &self.sections {
            let mut m = Map::new();
            for (k, v, _) in entries {
                m.insert(k.clone(), v.clone());
            }
            root.insert(name.clone(), Value::Object(m));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("json");
        s.push('\n');
        s
    }
}

/// Shortest round-trip form, in exponent notation outside [1e-3, 1e7).
fn exact(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-3..1e7).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn json_num(v: f64) -> Value {
    Number::from_f64(v).map_or(Value::Null, Value::Number)
}
