//! Hyperparameter values and the per-method schemas that validate them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Number(x) => write!(f, "{x}"),
            ParamValue::Text(s) => write!(f, "\"{s}\""),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamKind {
    /// Integer in `min..=max`.
    Int {
        min: i64,
        max: i64,
    },
    /// Real strictly greater than `gt`.
    Float {
        gt: f64,
    },
    /// Real strictly greater than `gt`, or the text `"auto"`.
    FloatOrAuto {
        gt: f64,
    },
    Choice(&'static [&'static str]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DefaultValue {
    Number(f64),
    Text(&'static str),
}

impl DefaultValue {
    fn value(self) -> ParamValue {
        match self {
            DefaultValue::Number(x) => ParamValue::Number(x),
            DefaultValue::Text(s) => ParamValue::Text(s.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: DefaultValue,
}

impl ParamSpec {
    pub const fn int(name: &'static str, min: i64, max: i64, default: i64) -> Self {
        Self {
            name,
            kind: ParamKind::Int { min, max },
            default: DefaultValue::Number(default as f64),
        }
    }

    pub const fn float(name: &'static str, gt: f64, default: f64) -> Self {
        Self {
            name,
            kind: ParamKind::Float { gt },
            default: DefaultValue::Number(default),
        }
    }

    pub const fn float_or_auto(name: &'static str, gt: f64) -> Self {
        Self {
            name,
            kind: ParamKind::FloatOrAuto { gt },
            default: DefaultValue::Text("auto"),
        }
    }

    pub const fn choice(name: &'static str, options: &'static [&'static str], default: &'static str) -> Self {
        Self {
            name,
            kind: ParamKind::Choice(options),
            default: DefaultValue::Text(default),
        }
    }

    pub fn check(&self, value: &ParamValue) -> Result<(), String> {
        let name = self.name;
        match (self.kind, value) {
            (ParamKind::Int { min, max }, ParamValue::Number(x)) => {
                if x.fract() != 0.0 || *x < min as f64 || *x > max as f64 {
                    Err(format!("`{name}` must be an integer in {min}..={max}, got {x}"))
                } else {
                    Ok(())
                }
            }
            (ParamKind::Float { gt } | ParamKind::FloatOrAuto { gt }, ParamValue::Number(x)) => {
                if x.is_finite() && *x > gt {
                    Ok(())
                } else {
                    Err(format!("`{name}` must be a finite number greater than {gt}, got {x}"))
                }
            }
            (ParamKind::FloatOrAuto { .. }, ParamValue::Text(s)) if s == "auto" => Ok(()),
            (ParamKind::Choice(options), ParamValue::Text(s)) if options.contains(&s.as_str()) => Ok(()),
            (ParamKind::Choice(options), v) => Err(format!("`{name}` must be one of {options:?}, got {v}")),
            (_, v) => Err(format!("`{name}` has the wrong type: {v}")),
        }
    }
}

/// Resolved hyperparameters of one method: every schema key is present.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hyperparameters(BTreeMap<&'static str, ParamValue>);

impl Hyperparameters {
    /// Defaults overlaid with `overrides`, validated against `schema`.
    pub fn resolve(schema: &[ParamSpec], overrides: Option<&BTreeMap<String, ParamValue>>) -> Result<Self, String> {
        let mut values: BTreeMap<&'static str, ParamValue> =
            schema.iter().map(|p| (p.name, p.default.value())).collect();
        for (key, value) in overrides.into_iter().flatten() {
            let spec = schema
                .iter()
                .find(|p| p.name == key)
                .ok_or_else(|| format!("unknown hyperparameter `{key}`"))?;
            spec.check(value)?;
            values.insert(spec.name, value.clone());
        }
        Ok(Self(values))
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.0.get(name)
    }

    /// Numeric value, or `None` for `"auto"`.
    pub fn number(&self, name: &str) -> Option<f64> {
        match self.0.get(name) {
            Some(ParamValue::Number(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn float(&self, name: &str) -> f64 {
        self.number(name)
            .unwrap_or_else(|| panic!("hyperparameter `{name}` is not numeric"))
    }

    pub fn usize(&self, name: &str) -> usize {
        self.float(name) as usize
    }

    pub fn text(&self, name: &str) -> &str {
        match self.0.get(name) {
            Some(ParamValue::Text(s)) => s,
            _ => panic!("hyperparameter `{name}` is not text"),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &ParamValue)> {
        self.0.iter().map(|(k, v)| (*k, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMA: &[ParamSpec] = &[
        ParamSpec::int("n_trees", 2, 10_000, 100),
        ParamSpec::float_or_auto("eps", 0.0),
        ParamSpec::choice("kernel", &["linear", "rbf"], "rbf"),
    ];

    fn overrides(json: &str) -> BTreeMap<String, ParamValue> {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn defaults_fill_missing_keys() {
        let h = Hyperparameters::resolve(SCHEMA, None).unwrap();
        assert_eq!(h.usize("n_trees"), 100);
        assert_eq!(h.number("eps"), None);
        assert_eq!(h.text("kernel"), "rbf");
    }

    #[test]
    fn overrides_are_checked() {
        let ok = Hyperparameters::resolve(SCHEMA, Some(&overrides(r#"{"eps": 0.3, "kernel": "linear"}"#)));
        assert_eq!(ok.unwrap().number("eps"), Some(0.3));
        for bad in [
            r#"{"n_trees": 1}"#,
            r#"{"n_trees": 2.5}"#,
            r#"{"eps": -1}"#,
            r#"{"eps": "big"}"#,
            r#"{"kernel": "sigmoid"}"#,
            r#"{"depth": 3}"#,
        ] {
            assert!(
                Hyperparameters::resolve(SCHEMA, Some(&overrides(bad))).is_err(),
                "{bad}"
            );
        }
    }
}
