//! Tolerances, check records and report serialization.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};
use serde::Serialize;

use vertexkit::export::{sci17, write_atomic};

pub const SCHEMA_VERSION: u32 = 1;

/// Named thresholds, overridable with `--tolerance KEY=VAL`.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

const DEFAULTS: &[(&str, f64)] = &[
    ("closed_form", 1e-10),
    ("constraints", 5e-2),
    ("f00", 1e-14),
    ("hermiticity", 1e-12),
    ("inverse", 5e-2),
    ("involution", 1e-2),
    ("log_series", 1e-5),
    ("m_identities", 5e-2),
    ("midpoint", 1e-3),
    ("neumann", 1e-12),
    ("oracle_diff", 5e-2),
    ("oracle_f00", 2e-2),
    ("parity_reality", 1e-12),
    ("primed_involution", 1e-2),
    ("sum", 1e-5),
    ("w_recursion", 1e-12),
];

impl Tolerances {
    pub fn parse(overrides: &[String]) -> anyhow::Result<Tolerances> {
        let mut map: BTreeMap<String, f64> = DEFAULTS.iter().map(|&(k, v)| (k.to_string(), v)).collect();
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .with_context(|| format!("tolerance override {o:?} is not KEY=VAL"))?;
            let slot = match map.get_mut(k) {
                Some(s) => s,
                None => bail!(
                    "unknown tolerance key {k:?}; known keys: {}",
                    DEFAULTS.iter().map(|d| d.0).collect::<Vec<_>>().join(", ")
                ),
            };
            let v: f64 = v.parse().with_context(|| format!("tolerance {k}: {v:?} is not a number"))?;
            if !(v.is_finite() && v > 0.0) {
                bail!("tolerance {k} must be positive and finite");
            }
            *slot = v;
        }
        Ok(Tolerances(map))
    }

    pub fn get(&self, key: &str) -> f64 {
        self.0[key]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Default)]
pub struct Checks(pub Vec<Check>);

impl Checks {
    /// Records `value ≤ tolerance`; NaN fails.
    pub fn push(&mut self, suite: &str, name: impl Into<String>, value: f64, tolerance: f64) {
        self.0.push(Check {
            suite: suite.into(),
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.0.iter().all(|c| c.pass)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("suite,name,value,tolerance,pass\n");
        for c in &self.0 {
            let _ = writeln!(out, "{},{},{},{},{}", c.suite, c.name, sci17(c.value), sci17(c.tolerance), c.pass);
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.0 {
            let _ = writeln!(
                out,
                "{} {:<16} {:<40} {:>12.4e} <= {:.1e}",
                if c.pass { "ok  " } else { "FAIL" },
                c.suite,
                c.name,
                c.value,
                c.tolerance
            );
        }
        out
    }
}

/// Writes `text` atomically to `out`, or to stdout when absent.
pub fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let t = Tolerances::parse(&["sum=1e-7".into()]).unwrap();
        assert_eq!(t.get("sum"), 1e-7);
        assert_eq!(t.get("hermiticity"), 1e-12);
        assert!(Tolerances::parse(&["nope=1".into()]).is_err());
        assert!(Tolerances::parse(&["sum".into()]).is_err());
        assert!(Tolerances::parse(&["sum=-1".into()]).is_err());
    }

    #[test]
    fn nan_fails() {
        let mut c = Checks::default();
        c.push("s", "x", f64::NAN, 1.0);
        c.push("s", "y", 0.5, 1.0);
        assert!(!c.0[0].pass && c.0[1].pass);
        assert!(!c.all_pass());
    }
}
