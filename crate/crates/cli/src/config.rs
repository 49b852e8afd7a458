use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use difs_core::construction::ConstructionParams;
use difs_core::ifs::AffineMap;
use difs_core::verification::ScanConfig;
use difs_core::{Ifs, Rational};

/// A fraction as it appears in the config: `{"num": .., "den": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Frac {
    pub num: i64,
    pub den: i64,
}

impl Frac {
    pub fn to_rational(self) -> Result<Rational, String> {
        if self.den <= 0 {
            return Err(format!("denominator must be positive, got {}", self.den));
        }
        Ok(Rational::new(BigInt::from(self.num), BigInt::from(self.den)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub rate: Frac,
    pub shift: Frac,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_doublings: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enum_cap: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub f: MapConfig,
    pub g: MapConfig,
    pub m: usize,
    pub c: Frac,
    #[serde(rename = "M")]
    pub big_m: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Frac>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub overrides: Overrides,
}

fn is_default(o: &Overrides) -> bool {
    *o == Overrides::default()
}

/// A config error with the JSON path of the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn join_path(base: &str, field: &str) -> String {
    if base == "." || base.is_empty() {
        format!(".{field}")
    } else {
        format!("{base}.{field}")
    }
}

fn err(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        path: path.to_string(),
        message: message.into(),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let raw = e.path().to_string();
            let base = if raw.starts_with('.') || raw.is_empty() { raw } else { format!(".{raw}") };
            let message = e.inner().to_string();
            let path = match message.strip_prefix("missing field `").and_then(|r| r.split('`').next()) {
                Some(field) => join_path(&base, field),
                None => base,
            };
            ConfigError { path, message }
        })
    }

    /// Pretty JSON with a trailing newline; parsing it back yields `self`.
    pub fn canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// Hex SHA-256 of the canonical JSON.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    fn map(&self, which: &str) -> Result<AffineMap<Rational>, ConfigError> {
        let mc = if which == "f" { &self.f } else { &self.g };
        let rate = mc.rate.to_rational().map_err(|m| err(&format!(".{which}.rate"), m))?;
        let shift = mc.shift.to_rational().map_err(|m| err(&format!(".{which}.shift"), m))?;
        let (num, den) = (rate.numer(), rate.denom());
        let num = u64::try_from(num.clone()).map_err(|_| err(&format!(".{which}.rate"), "rate must be positive"))?;
        let den = u64::try_from(den.clone()).expect("positive denominator");
        AffineMap::new(num, den, shift).map_err(|e| err(&format!(".{which}.rate"), e.to_string()))
    }

    pub fn ifs(&self) -> Result<Ifs, ConfigError> {
        Ok(Ifs::new(self.map("f")?, self.map("g")?))
    }

    pub fn params(&self) -> Result<ConstructionParams, ConfigError> {
        let c = self.c.to_rational().map_err(|m| err(".c", m))?;
        let mut p = ConstructionParams::new(self.ifs()?, self.m, c, self.big_m.clone());
        if let Some(o) = self.omega {
            p.omega = Some(o.to_rational().map_err(|m| err(".omega", m))?);
        }
        p.n_override = self.overrides.n;
        p.ell_override = self.overrides.ell;
        Ok(p)
    }

    /// Depth of the construction: the override, else every term of `M`.
    pub fn kmax(&self) -> usize {
        self.overrides.kmax.unwrap_or(self.big_m.len())
    }

    pub fn scan_config(&self) -> ScanConfig {
        let mut cfg = ScanConfig::default();
        if let Some(v) = self.overrides.scan_cap {
            cfg.scan_cap = v;
        }
        if let Some(v) = self.overrides.refine_doublings {
            cfg.refine_doublings = v;
        }
        if let Some(v) = self.overrides.enum_cap {
            cfg.enum_cap = v;
        }
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANTOR: &str = r#"{
        "f": {"rate": {"num": 1, "den": 3}, "shift": {"num": 0, "den": 1}},
        "g": {"rate": {"num": 1, "den": 3}, "shift": {"num": 2, "den": 3}},
        "m": 3, "c": {"num": 1, "den": 4}, "M": [3, 9, 31]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = RunConfig::from_json(CANTOR).unwrap();
        assert_eq!(cfg.m, 3);
        let again = RunConfig::from_json(&cfg.canonical_json()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.digest(), again.digest());
    }

    #[test]
    fn missing_field_path() {
        let text = CANTOR.replace("\"m\": 3,", "");
        let e = RunConfig::from_json(&text).unwrap_err();
        assert_eq!(e.path, ".m");
        let text = CANTOR.replace("\"shift\": {\"num\": 2, \"den\": 3}", "\"shift\": {\"num\": 2}");
        let e = RunConfig::from_json(&text).unwrap_err();
        assert_eq!(e.path, ".g.shift.den");
    }

    #[test]
    fn bad_values_name_field() {
        let text = CANTOR.replace("\"c\": {\"num\": 1, \"den\": 4}", "\"c\": {\"num\": 1, \"den\": 0}");
        let cfg = RunConfig::from_json(&text).unwrap();
        assert_eq!(cfg.params().unwrap_err().path, ".c");
        let text = CANTOR.replace("\"rate\": {\"num\": 1, \"den\": 3}, \"shift\": {\"num\": 0", "\"rate\": {\"num\": 3, \"den\": 2}, \"shift\": {\"num\": 0");
        let cfg = RunConfig::from_json(&text).unwrap();
        assert_eq!(cfg.ifs().unwrap_err().path, ".f.rate");
    }
}
