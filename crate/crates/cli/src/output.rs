use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::Value;

use difs_core::Rational;

use crate::CliError;

/// `"n"` for integers, `"n/d"` otherwise.
pub fn frac(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_frac(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n.parse().ok()?, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Where reports go: files under a directory, or stdout.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Result<Self, CliError> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).map_err(|e| CliError::Io(format!("{}: {e}", d.display())))?;
        }
        Ok(Sink { dir })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn emit(&self, name: &str, contents: &str) -> Result<(), CliError> {
        match &self.dir {
            Some(d) => {
                let p = d.join(name);
                fs::write(&p, contents).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(contents.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::Io(e.to_string()))
            }
        }
    }

    pub fn json(&self, name: &str, value: &Value) -> Result<(), CliError> {
        self.emit(name, &json_text(value))
    }

    pub fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        self.emit(name, &csv_text(header, rows)?)
    }
}

pub fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json serializes");
    s.push('\n');
    s
}

pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 csv"))
}

/// Instance constants kept per config digest. Exact entries must reproduce
/// verbatim; band entries within a factor of 2.
pub struct Golden {
    path: Option<PathBuf>,
    values: BTreeMap<String, String>,
    dirty: bool,
}

impl Golden {
    pub fn open(dir: Option<&Path>, digest: &str) -> Result<Self, CliError> {
        let Some(dir) = dir else {
            return Ok(Golden {
                path: None,
                values: BTreeMap::new(),
                dirty: false,
            });
        };
        let path = dir.join(format!("golden-{}.json", &digest[..16]));
        let values = if path.exists() {
            let text = fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
        } else {
            BTreeMap::new()
        };
        Ok(Golden {
            path: Some(path),
            values,
            dirty: false,
        })
    }

    pub fn exact(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match self.values.get(key) {
            Some(old) if old != value => Err(CliError::Check(format!(
                "golden {key}: recorded {old}, got {value}"
            ))),
            Some(_) => Ok(()),
            None => {
                self.values.insert(key.to_string(), value.to_string());
                self.dirty = true;
                Ok(())
            }
        }
    }

    pub fn band(&mut self, key: &str, value: &Rational) -> Result<(), CliError> {
        match self.values.get(key).and_then(|s| parse_frac(s)) {
            Some(old) => {
                let two = Rational::from_integer(BigInt::from(2));
                if old.is_zero() || value.is_zero() {
                    return if old == *value { Ok(()) } else { Err(band_err(key, &old, value)) };
                }
                let r = value / &old;
                if r > two || r * &two < Rational::one() {
                    return Err(band_err(key, &old, value));
                }
                Ok(())
            }
            None => {
                self.values.insert(key.to_string(), frac(value));
                self.dirty = true;
                Ok(())
            }
        }
    }

    pub fn save(&self) -> Result<(), CliError> {
        if let (Some(p), true) = (&self.path, self.dirty) {
            let text = json_text(&serde_json::to_value(&self.values).expect("map serializes"));
            fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        }
        Ok(())
    }
}

fn band_err(key: &str, old: &Rational, new: &Rational) -> CliError {
    CliError::Check(format!(
        "golden {key}: {} is outside the factor-2 band around {}",
        frac(new),
        frac(old)
    ))
}
