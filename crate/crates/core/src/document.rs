//! Structured text documents for resonators, networks, design specs and
//! operating points.
//!
//! ```text
//! # comment
//! [resonator]
//! r_m = 332
//! l_m = 17.59u
//! c_m = 1.6e-18
//! c_0 = 16f
//! ```
//!
//! Numbers take the same engineering suffixes as netlists. A `[resonator]`
//! section may instead say `fixture = rft30g`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::compensation::{self, CompensationNetwork, Topology};
use crate::design::{self, DesignSpec};
use crate::error::{Error, Result};
use crate::resonator::{self, Resonator};
use crate::units::parse_value;

/// Directory searched for `<name>.ini` before the built-in fixtures.
pub const FIXTURE_ENV: &str = "MEMSOSC_FIXTURES";

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Clone, PartialEq)]
struct Section {
    line: usize,
    entries: BTreeMap<String, Entry>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    sections: BTreeMap<String, Section>,
}

const SECTION_KEYS: &[(&str, &[&str])] = &[
    ("resonator", &["fixture", "label", "r_m", "l_m", "c_m", "c_0", "q"]),
    (
        "network",
        &["fixture", "l_0", "q_l0", "f_ref", "c_fix", "c_parasitic", "bank_unit", "bank_size", "bank_code", "topology"],
    ),
    (
        "design",
        &[
            "fixture", "target_f0", "v_osc", "parasitic_c", "q_l0", "bank_unit", "bank_size", "mu_cox", "gamma",
            "temperature", "supply", "c_fix", "l0_grid", "offset", "startup_margin", "g_mbias",
        ],
    ),
    ("operating_point", &["v_osc", "i_bias", "p_dc", "supply", "f_0", "delta_f", "temperature", "gamma", "g_mbias"]),
];

impl Document {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = Document::default();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Document { line, msg: "section header needs a closing `]`".into() })?
                    .trim()
                    .to_string();
                let Some((_, _)) = SECTION_KEYS.iter().find(|(s, _)| *s == name) else {
                    return Err(Error::Document { line, msg: format!("unknown section `[{name}]`") });
                };
                if doc.sections.contains_key(&name) {
                    return Err(Error::Document { line, msg: format!("section `[{name}]` appears twice") });
                }
                doc.sections.insert(name.clone(), Section { line, entries: BTreeMap::new() });
                current = Some(name);
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(Error::Document { line, msg: format!("expected `key = value`, got `{body}`") });
            };
            let Some(section) = current.as_ref() else {
                return Err(Error::Document { line, msg: "key outside of any section".into() });
            };
            let key = key.trim().to_string();
            let allowed = SECTION_KEYS.iter().find(|(s, _)| s == section).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Document {
                    line,
                    msg: format!("unknown key `{key}` in [{section}] (allowed: {})", allowed.join(", ")),
                });
            }
            let entries = &mut doc.sections.get_mut(section).expect("section exists").entries;
            if entries.contains_key(&key) {
                return Err(Error::Document { line, msg: format!("key `{key}` repeated") });
            }
            entries.insert(key, Entry { value: value.trim().to_string(), line });
        }
        Ok(doc)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Document { line: 0, msg: format!("cannot read {}: {e}", path.display()) })?;
        Document::parse(&text)
    }

    pub fn has_section(&self, name: &str) -> bool {
        self.sections.contains_key(name)
    }

    fn section(&self, name: &str) -> Result<&Section> {
        self.sections.get(name).ok_or_else(|| Error::Document { line: 0, msg: format!("missing section `[{name}]`") })
    }

    pub fn text(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.entries.get(key).map(|e| e.value.as_str())
    }

    /// Numeric value if the key is present.
    pub fn number(&self, section: &str, key: &str) -> Result<Option<f64>> {
        let Some(e) = self.sections.get(section).and_then(|s| s.entries.get(key)) else {
            return Ok(None);
        };
        parse_value(&e.value)
            .map(Some)
            .map_err(|err| Error::Document { line: e.line, msg: format!("`{key}`: {err}") })
    }

    pub fn required(&self, section: &str, key: &str) -> Result<f64> {
        let s = self.section(section)?;
        self.number(section, key)?
            .ok_or_else(|| Error::Document { line: s.line, msg: format!("[{section}] is missing `{key}`") })
    }

    pub fn count(&self, section: &str, key: &str) -> Result<Option<u32>> {
        let Some(e) = self.sections.get(section).and_then(|s| s.entries.get(key)) else {
            return Ok(None);
        };
        e.value
            .parse::<u32>()
            .map(Some)
            .map_err(|_| Error::Document { line: e.line, msg: format!("`{key}` must be a non-negative integer, got `{}`", e.value) })
    }

    pub fn resonator(&self) -> Result<Resonator> {
        let s = self.section("resonator")?;
        let mut res = if let Some(name) = self.text("resonator", "fixture") {
            resolve_resonator(name)?
        } else {
            Resonator {
                r_m: self.required("resonator", "r_m")?,
                l_m: self.required("resonator", "l_m")?,
                c_m: self.required("resonator", "c_m")?,
                c_0: self.required("resonator", "c_0")?,
                label: self.text("resonator", "label").unwrap_or("resonator").to_string(),
            }
        };
        if let Some(label) = self.text("resonator", "label") {
            res.label = label.to_string();
        }
        if let Some(q) = self.number("resonator", "q")? {
            res = res.with_quality_factor(q)?;
        }
        res.validate().map_err(|e| Error::Document { line: s.line, msg: e.to_string() })?;
        Ok(res)
    }

    /// Network section; `f_ref` defaults to the resonator's f_s.
    pub fn network(&self, res: &Resonator) -> Result<CompensationNetwork> {
        let s = self.section("network")?;
        let base = match self.text("network", "fixture") {
            Some(name) => Some(resolve_network(name)?),
            None => None,
        };
        let num = |key: &str, fallback: Option<f64>| -> Result<f64> {
            match (self.number("network", key)?, fallback) {
                (Some(v), _) => Ok(v),
                (None, Some(v)) => Ok(v),
                (None, None) => Err(Error::Document { line: s.line, msg: format!("[network] is missing `{key}`") }),
            }
        };
        let b = base.as_ref();
        let topology = match self.text("network", "topology") {
            None => b.map_or(Topology::Shunt, |n| n.topology),
            Some("shunt") => Topology::Shunt,
            Some("series") => Topology::Series,
            Some(other) => {
                return Err(Error::Document {
                    line: s.entries["topology"].line,
                    msg: format!("topology must be `shunt` or `series`, got `{other}`"),
                })
            }
        };
        let comp = CompensationNetwork {
            l_0: num("l_0", b.map(|n| n.l_0))?,
            q_l0: num("q_l0", b.map(|n| n.q_l0))?,
            f_ref: num("f_ref", Some(b.map_or(res.series_resonance(), |n| n.f_ref)))?,
            c_fix: num("c_fix", Some(b.map_or(0.0, |n| n.c_fix)))?,
            c_parasitic: num("c_parasitic", Some(b.map_or(0.0, |n| n.c_parasitic)))?,
            bank_unit: num("bank_unit", Some(b.map_or(0.0, |n| n.bank_unit)))?,
            bank_size: self.count("network", "bank_size")?.unwrap_or(b.map_or(0, |n| n.bank_size)),
            bank_code: self.count("network", "bank_code")?.unwrap_or(b.map_or(0, |n| n.bank_code)),
            topology,
        };
        comp.validate().map_err(|e| Error::Document { line: s.line, msg: e.to_string() })?;
        Ok(comp)
    }

    /// Design spec: `[design]` plus `[resonator]` (or a design fixture).
    pub fn design(&self) -> Result<DesignSpec> {
        let s = self.section("design")?;
        let mut spec = match self.text("design", "fixture") {
            Some(name) => resolve_design(name)?,
            None => DesignSpec::new(
                self.resonator()?,
                self.required("design", "target_f0")?,
                self.required("design", "v_osc")?,
                self.required("design", "supply")?,
            ),
        };
        if self.text("design", "fixture").is_some() && self.has_section("resonator") {
            spec.resonator = self.resonator()?;
        }
        let set = |key: &str, slot: &mut f64| -> Result<()> {
            if let Some(v) = self.number("design", key)? {
                *slot = v;
            }
            Ok(())
        };
        set("target_f0", &mut spec.target_f0)?;
        set("v_osc", &mut spec.v_osc_target)?;
        set("supply", &mut spec.supply)?;
        set("parasitic_c", &mut spec.parasitic_c)?;
        set("q_l0", &mut spec.q_l0_available)?;
        set("bank_unit", &mut spec.bank_unit)?;
        set("mu_cox", &mut spec.mu_cox)?;
        set("gamma", &mut spec.gamma)?;
        set("temperature", &mut spec.temperature)?;
        set("c_fix", &mut spec.c_fix)?;
        set("l0_grid", &mut spec.l0_grid)?;
        set("offset", &mut spec.offset)?;
        set("startup_margin", &mut spec.startup_margin)?;
        if let Some(n) = self.count("design", "bank_size")? {
            spec.bank_size = n;
        }
        if let Some(g) = self.number("design", "g_mbias")? {
            spec.g_mbias = Some(g);
        }
        spec.validate().map_err(|e| Error::Document { line: s.line, msg: e.to_string() })?;
        Ok(spec)
    }
}

fn fixture_file(name: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(FIXTURE_ENV)?;
    let path = Path::new(&dir).join(format!("{name}.ini"));
    path.is_file().then_some(path)
}

/// Fixture directory file if present, otherwise the built-in of that name.
pub fn resolve_resonator(name: &str) -> Result<Resonator> {
    if let Some(path) = fixture_file(name) {
        return Document::read(&path)?.resonator();
    }
    resonator::fixtures::builtin(name).ok_or_else(|| Error::UnknownFixture(name.into()))
}

pub fn resolve_network(name: &str) -> Result<CompensationNetwork> {
    if let Some(path) = fixture_file(name) {
        let doc = Document::read(&path)?;
        let res = if doc.has_section("resonator") { doc.resonator()? } else { resonator::fixtures::rft30g() };
        return doc.network(&res);
    }
    compensation::fixtures::builtin(name).ok_or_else(|| Error::UnknownFixture(name.into()))
}

pub fn resolve_design(name: &str) -> Result<DesignSpec> {
    if let Some(path) = fixture_file(name) {
        return Document::read(&path)?.design();
    }
    design::fixtures::builtin(name).ok_or_else(|| Error::UnknownFixture(name.into()))
}
