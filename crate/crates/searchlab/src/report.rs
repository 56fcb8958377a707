//! JSON-lines report emission: one self-describing object per check, with a
//! stable (alphabetical) field order, rationals rendered as "num/denom"
//! strings, and the run configuration, seed, and tool version embedded so a
//! report is reproducible from its own bytes.

use crate::bigraph::Q64;
use crate::ratio::{q_to_string, Q};
use crate::{Error, Result};
use serde::Serialize;
use serde_json::{Map, Value};
use std::io::Write;

/// Tool version embedded in every report line.
pub fn tool_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Renders an exact rational as a "num/denom" JSON string.
pub fn q_value(x: &Q) -> Value {
    Value::String(q_to_string(x))
}

/// Renders a parameter rational as a "num/denom" JSON string.
pub fn q64_value(x: Q64) -> Value {
    Value::String(format!("{}/{}", x.numer(), x.denom()))
}

/// Builds one report object. serde_json's default map is ordered by key, so
/// the serialized field order is stable across runs regardless of insertion
/// order.
pub fn report_object(
    check: &str,
    config: Value,
    seed: Option<u64>,
    body: Value,
) -> Result<Value> {
    let mut map = Map::new();
    map.insert("check".into(), Value::String(check.into()));
    map.insert("config".into(), config);
    if let Some(s) = seed {
        map.insert("seed".into(), Value::from(s));
    }
    map.insert("version".into(), Value::String(tool_version().into()));
    match body {
        Value::Object(extra) => {
            for (k, v) in extra {
                if map.contains_key(&k) {
                    return Err(Error::InvalidConfig(format!(
                        "report body reuses reserved field {k}"
                    )));
                }
                map.insert(k, v);
            }
        }
        Value::Null => {}
        other => {
            map.insert("result".into(), other);
        }
    }
    Ok(Value::Object(map))
}

/// Serializes any value through `serde_json::Value` so objects pick up the
/// sorted stable field order.
pub fn to_stable_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

/// Writes report objects as JSON lines.
pub struct Emitter<W: Write> {
    out: W,
    pub lines: u64,
}

impl<W: Write> Emitter<W> {
    pub fn new(out: W) -> Self {
        Emitter { out, lines: 0 }
    }

    pub fn emit(&mut self, report: &Value) -> Result<()> {
        serde_json::to_writer(&mut self.out, report)?;
        self.out.write_all(b"\n")?;
        self.lines += 1;
        Ok(())
    }

    pub fn emit_check(
        &mut self,
        check: &str,
        config: Value,
        seed: Option<u64>,
        body: Value,
    ) -> Result<()> {
        let obj = report_object(check, config, seed, body)?;
        self.emit(&obj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn field_order_is_sorted_and_stable() {
        let mut buf = Vec::new();
        let mut e = Emitter::new(&mut buf);
        e.emit_check(
            "tail_bound",
            json!({"n": 4}),
            Some(7),
            json!({"pass": true, "bound": "1/8"}),
        )
        .unwrap();
        let line = String::from_utf8(buf).unwrap();
        // keys in alphabetical order regardless of insertion order
        let order = ["bound", "check", "config", "pass", "seed", "version"];
        let mut last = 0;
        for k in order {
            let pos = line.find(&format!("\"{k}\"")).unwrap();
            assert!(pos >= last, "{k} out of order in {line}");
            last = pos;
        }
        assert!(line.ends_with('\n'));
    }

    #[test]
    fn identical_inputs_give_identical_bytes() {
        let mk = || {
            let mut buf = Vec::new();
            let mut e = Emitter::new(&mut buf);
            e.emit_check("x", json!({"a": 1, "b": 2}), Some(1), json!({"z": 0, "m": 3}))
                .unwrap();
            buf
        };
        assert_eq!(mk(), mk());
    }

    #[test]
    fn rationals_render_as_fraction_strings() {
        assert_eq!(q_value(&Q::new(3, 8)), json!("3/8"));
        assert_eq!(q64_value(Q64::new(1, 2)), json!("1/2"));
        // reserved-field collision is refused
        assert!(report_object("c", json!({}), None, json!({"check": "x"})).is_err());
    }
}
