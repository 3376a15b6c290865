//! Domain types shared by the solver, the arrangement generators and the
//! design routines.
//!
//! Units: spans in m, line loads in kN/m, material constants in Pa. Section
//! properties are stored in SI (m, m², m⁴) and converted on catalog ingestion.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::{SectionCatalog, SteelSection};
use crate::error::{Error, Result};

/// Gravitational acceleration used to turn mass per length into a line load.
pub const GRAVITY: f64 = 9.81;

/// Linear-elastic isotropic material with a yield strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// Young's modulus E, Pa.
    pub elastic_modulus: f64,
    /// Shear modulus G, Pa.
    pub shear_modulus: f64,
    /// Yield strength f_y, Pa.
    pub yield_strength: f64,
    /// Unit weight, N/m³.
    pub unit_weight: f64,
}

impl Material {
    pub fn new(
        elastic_modulus: f64,
        shear_modulus: f64,
        yield_strength: f64,
        unit_weight: f64,
    ) -> Result<Self> {
        let material = Self {
            elastic_modulus,
            shear_modulus,
            yield_strength,
            unit_weight,
        };
        let problems = material.violations();
        if problems.is_empty() {
            Ok(material)
        } else {
            Err(Error::Invalid(problems.join("; ")))
        }
    }

    /// S355 structural steel with E/G = 2.6.
    pub fn s355() -> Self {
        let e = 210.0e9;
        Self {
            elastic_modulus: e,
            shear_modulus: e / 2.6,
            yield_strength: 355.0e6,
            unit_weight: 7850.0 * GRAVITY,
        }
    }

    pub fn modulus_ratio(&self) -> f64 {
        self.elastic_modulus / self.shear_modulus
    }

    fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, value) in [
            ("elastic_modulus", self.elastic_modulus),
            ("shear_modulus", self.shear_modulus),
            ("yield_strength", self.yield_strength),
            ("unit_weight", self.unit_weight),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                out.push(format!("material {name} must be positive, got {value}"));
            }
        }
        if out.is_empty() {
            let ratio = self.modulus_ratio();
            if !(2.0..=3.0).contains(&ratio) {
                out.push(format!("material E/G = {ratio:.3} outside [2, 3]"));
            }
        }
        out
    }
}

impl Default for Material {
    fn default() -> Self {
        Self::s355()
    }
}

/// Partial factors applied to permanent and variable actions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadCombination {
    pub gamma_permanent: f64,
    pub gamma_variable: f64,
}

impl LoadCombination {
    pub fn new(gamma_permanent: f64, gamma_variable: f64) -> Result<Self> {
        if !(gamma_permanent >= 1.0 && gamma_variable >= 1.0) {
            return Err(Error::Invalid(format!(
                "load factors must be >= 1, got ({gamma_permanent}, {gamma_variable})"
            )));
        }
        Ok(Self {
            gamma_permanent,
            gamma_variable,
        })
    }

    /// Fundamental combination with γ_G = 1.35 and γ_Q = 1.5.
    pub fn eq_6_10() -> Self {
        Self {
            gamma_permanent: 1.35,
            gamma_variable: 1.5,
        }
    }

    /// Unfactored loads; handy for analysis checks.
    pub fn unit() -> Self {
        Self {
            gamma_permanent: 1.0,
            gamma_variable: 1.0,
        }
    }
}

impl Default for LoadCombination {
    fn default() -> Self {
        Self::eq_6_10()
    }
}

/// On/off pattern of the variable load over the members.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LoadArrangement(Vec<bool>);

impl LoadArrangement {
    pub fn new(activation: Vec<bool>) -> Self {
        Self(activation)
    }

    /// Variable load on every member.
    pub fn all_on(m: usize) -> Self {
        Self(vec![true; m])
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        bits.iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::Invalid(format!("activation factor {other} not in {{0,1}}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    /// Parses a `0`/`1` string such as `"10110"`.
    pub fn parse(bits: &str) -> Result<Self> {
        bits.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Invalid(format!("activation character {other:?} not in {{0,1}}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    /// Arrangement whose bit `i` is bit `i` of `code` (member 0 is the least significant bit).
    pub fn from_code(code: u64, m: usize) -> Self {
        Self((0..m).map(|i| (code >> i) & 1 == 1).collect())
    }

    pub fn code(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &on)| acc | ((on as u64) << i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_active(&self, member: usize) -> bool {
        self.0[member]
    }

    pub fn factor(&self, member: usize) -> f64 {
        if self.0[member] {
            1.0
        } else {
            0.0
        }
    }

    pub fn activation(&self) -> &[bool] {
        &self.0
    }

    pub fn set(&mut self, member: usize, on: bool) {
        self.0[member] = on;
    }

    /// Elementwise complement (the polar opposite pattern).
    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|b| !b).collect())
    }

    pub fn active_count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for LoadArrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A continuous beam on simple supports at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSystem {
    pub spans: Vec<f64>,
    /// Characteristic permanent load G_k per member, kN/m, excluding self-weight.
    pub permanent_udl: Vec<f64>,
    /// Characteristic variable load Q_k per member, kN/m.
    pub variable_udl: Vec<f64>,
    /// Assigned sections; empty when the system has not been designed yet.
    pub sections: Vec<Option<SteelSection>>,
}

impl BeamSystem {
    pub fn new(spans: Vec<f64>, permanent_udl: Vec<f64>, variable_udl: Vec<f64>) -> Self {
        Self {
            spans,
            permanent_udl,
            variable_udl,
            sections: Vec::new(),
        }
    }

    /// `m` equal members.
    pub fn uniform(m: usize, span: f64, permanent: f64, variable: f64) -> Self {
        Self::new(vec![span; m], vec![permanent; m], vec![variable; m])
    }

    pub fn with_sections(mut self, sections: Vec<SteelSection>) -> Self {
        self.sections = sections.into_iter().map(Some).collect();
        self
    }

    pub fn with_section_everywhere(self, section: &SteelSection) -> Self {
        let m = self.member_count();
        self.with_sections(vec![section.clone(); m])
    }

    pub fn member_count(&self) -> usize {
        self.spans.len()
    }

    /// Total length of the beam line.
    pub fn length(&self) -> f64 {
        self.spans.iter().sum()
    }

    pub fn section(&self, member: usize) -> Result<&SteelSection> {
        self.sections
            .get(member)
            .and_then(|s| s.as_ref())
            .ok_or(Error::MissingSection { member })
    }

    /// All sections, or an error naming the first unassigned member.
    pub fn assigned_sections(&self) -> Result<Vec<&SteelSection>> {
        (0..self.member_count()).map(|i| self.section(i)).collect()
    }

    /// Self-weight of the assigned section, kN/m (zero when unassigned).
    pub fn self_weight(&self, member: usize) -> f64 {
        self.section(member).map(|s| s.self_weight()).unwrap_or(0.0)
    }

    /// Factored line load on `member` under `arrangement`, with self-weight
    /// taken from the assigned section.
    pub fn design_udl(
        &self,
        member: usize,
        arrangement: &LoadArrangement,
        combo: &LoadCombination,
    ) -> Result<f64> {
        factored_udl(self, member, arrangement, combo, self.self_weight(member))
    }

    /// Mirror image (member order reversed).
    pub fn reversed(&self) -> Self {
        let rev = |v: &Vec<f64>| v.iter().rev().copied().collect::<Vec<_>>();
        Self {
            spans: rev(&self.spans),
            permanent_udl: rev(&self.permanent_udl),
            variable_udl: rev(&self.variable_udl),
            sections: self.sections.iter().rev().cloned().collect(),
        }
    }

    pub fn to_document(&self) -> SystemDocument {
        SystemDocument {
            spans: self.spans.clone(),
            permanent_udl: self.permanent_udl.clone(),
            variable_udl: self.variable_udl.clone(),
            sections: self
                .sections
                .iter()
                .map(|s| s.as_ref().map(|s| s.designation.clone()))
                .collect(),
        }
    }

    /// Builds a system from its JSON document, resolving designations in `catalog`.
    pub fn from_document(doc: &SystemDocument, catalog: &SectionCatalog) -> Result<Self> {
        let sections = doc
            .sections
            .iter()
            .map(|d| match d {
                None => Ok(None),
                Some(name) => catalog
                    .get(name)
                    .cloned()
                    .map(Some)
                    .ok_or_else(|| Error::Invalid(format!("section {name:?} not in catalog"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            spans: doc.spans.clone(),
            permanent_udl: doc.permanent_udl.clone(),
            variable_udl: doc.variable_udl.clone(),
            sections,
        })
    }

    pub fn from_json(text: &str, catalog: &SectionCatalog) -> Result<Self> {
        let doc: SystemDocument = serde_json::from_str(text)?;
        Self::from_document(&doc, catalog)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }
}

/// Serialized form of a [`BeamSystem`]; sections are referenced by designation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDocument {
    pub spans: Vec<f64>,
    pub permanent_udl: Vec<f64>,
    pub variable_udl: Vec<f64>,
    #[serde(default)]
    pub sections: Vec<Option<String>>,
}

/// A single failed invariant found by [`validate_system`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub member: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.member {
            Some(i) => write!(f, "member {i}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Checks a system against its invariants. Returns every violation found;
/// an empty list means the system is well formed.
pub fn validate_system(system: &BeamSystem, catalog: &SectionCatalog) -> Vec<Violation> {
    let mut out = Vec::new();
    let m = system.member_count();
    let global = |message: String| Violation {
        member: None,
        message,
    };
    if m == 0 {
        out.push(global("system has no members".into()));
    }
    for (name, len) in [
        ("permanent_udl", system.permanent_udl.len()),
        ("variable_udl", system.variable_udl.len()),
    ] {
        if len != m {
            out.push(global(format!("{name} has {len} entries for {m} spans")));
        }
    }
    if !system.sections.is_empty() && system.sections.len() != m {
        out.push(global(format!(
            "sections has {} entries for {m} spans",
            system.sections.len()
        )));
    }
    for (i, &span) in system.spans.iter().enumerate() {
        if !(span > 0.0 && span.is_finite()) {
            out.push(Violation {
                member: Some(i),
                message: format!("span must be positive, got {span}"),
            });
        }
    }
    for (name, loads) in [
        ("permanent_udl", &system.permanent_udl),
        ("variable_udl", &system.variable_udl),
    ] {
        for (i, &w) in loads.iter().enumerate() {
            if !(w >= 0.0 && w.is_finite()) {
                out.push(Violation {
                    member: Some(i),
                    message: format!("{name} must be non-negative, got {w}"),
                });
            }
        }
    }
    for (i, section) in system.sections.iter().enumerate() {
        if let Some(section) = section {
            match catalog.get(&section.designation) {
                Some(known) if known == section => {}
                Some(_) => out.push(Violation {
                    member: Some(i),
                    message: format!("section {} differs from catalog entry", section.designation),
                }),
                None => out.push(Violation {
                    member: Some(i),
                    message: format!("section {} not in catalog", section.designation),
                }),
            }
        }
    }
    out
}

/// Factored design load on `member`, kN/m. Permanent load and self-weight are
/// always present; the variable load follows the arrangement.
pub fn factored_udl(
    system: &BeamSystem,
    member: usize,
    arrangement: &LoadArrangement,
    combo: &LoadCombination,
    self_weight: f64,
) -> Result<f64> {
    let m = system.member_count();
    if member >= m || member >= arrangement.len() {
        return Err(Error::IndexOutOfRange {
            index: member,
            len: m.min(arrangement.len()),
        });
    }
    Ok(combo.gamma_permanent * (system.permanent_udl[member] + self_weight)
        + combo.gamma_variable * system.variable_udl[member] * arrangement.factor(member))
}
