//! Steel section catalog.
//!
//! Catalog files are CSV with the header
//! `designation,mass_kg_m,depth_mm,Iyy_cm4,Wply_cm3,Avz_cm2,A_cm2`; values are
//! converted to SI on ingestion. The bundled catalog covers the UKB range from
//! 127x76x13 up to 1016x305x584 (see `data/README.md`).

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::GRAVITY;

const BUNDLED_UKB: &str = include_str!("../data/ukb.csv");

/// Prismatic I-section, SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteelSection {
    pub designation: String,
    /// Overall depth h, m.
    pub depth: f64,
    /// kg/m.
    pub mass_per_length: f64,
    /// I_yy, m⁴.
    pub second_moment_major: f64,
    /// W_pl,y, m³.
    pub plastic_modulus_major: f64,
    /// A_vz, m².
    pub shear_area_major: f64,
    /// A, m².
    pub cross_area: f64,
}

impl SteelSection {
    pub fn new(
        designation: impl Into<String>,
        depth: f64,
        mass_per_length: f64,
        second_moment_major: f64,
        plastic_modulus_major: f64,
        shear_area_major: f64,
        cross_area: f64,
    ) -> Result<Self> {
        let section = Self {
            designation: designation.into(),
            depth,
            mass_per_length,
            second_moment_major,
            plastic_modulus_major,
            shear_area_major,
            cross_area,
        };
        section.check()?;
        Ok(section)
    }

    fn check(&self) -> Result<()> {
        let fields = [
            ("depth", self.depth),
            ("mass_per_length", self.mass_per_length),
            ("second_moment_major", self.second_moment_major),
            ("plastic_modulus_major", self.plastic_modulus_major),
            ("shear_area_major", self.shear_area_major),
            ("cross_area", self.cross_area),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Invalid(format!(
                    "section {}: {name} must be positive, got {value}",
                    self.designation
                )));
            }
        }
        if self.shear_area_major >= self.cross_area {
            return Err(Error::Invalid(format!(
                "section {}: shear area must be smaller than the cross area",
                self.designation
            )));
        }
        Ok(())
    }

    /// Self-weight as a line load, kN/m.
    pub fn self_weight(&self) -> f64 {
        self.mass_per_length * GRAVITY / 1000.0
    }

    /// I_yy / A_z, m².
    pub fn inertia_shear_ratio(&self) -> f64 {
        self.second_moment_major / self.shear_area_major
    }

    fn ordering_key(&self) -> (f64, f64) {
        (self.depth, self.plastic_modulus_major)
    }
}

/// How catalog entries are ranked for minimum-depth selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum OrderingKey {
    /// Ascending depth, then ascending plastic modulus.
    #[default]
    ByDepthThenCapacity,
}

#[derive(Debug, Deserialize, Serialize)]
struct CatalogRow {
    designation: String,
    mass_kg_m: f64,
    depth_mm: f64,
    #[serde(rename = "Iyy_cm4")]
    iyy_cm4: f64,
    #[serde(rename = "Wply_cm3")]
    wply_cm3: f64,
    #[serde(rename = "Avz_cm2")]
    avz_cm2: f64,
    #[serde(rename = "A_cm2")]
    a_cm2: f64,
}

/// Candidate sections ordered by ascending depth, then capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionCatalog {
    sections: Vec<SteelSection>,
    ordering_key: OrderingKey,
    index: HashMap<String, usize>,
}

impl SectionCatalog {
    /// Sorts and validates a set of sections.
    pub fn new(mut sections: Vec<SteelSection>) -> Result<Self> {
        if sections.is_empty() {
            return Err(Error::Invalid("catalog is empty".into()));
        }
        for s in &sections {
            s.check()?;
        }
        sections.sort_by(|a, b| {
            a.ordering_key()
                .partial_cmp(&b.ordering_key())
                .expect("finite keys")
                .then(a.mass_per_length.total_cmp(&b.mass_per_length))
                .then_with(|| a.designation.cmp(&b.designation))
        });
        let mut index = HashMap::with_capacity(sections.len());
        for (i, s) in sections.iter().enumerate() {
            if index.insert(s.designation.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate designation {:?}", s.designation)));
            }
        }
        for pair in sections.windows(2) {
            if pair[0].ordering_key() >= pair[1].ordering_key() {
                return Err(Error::Invalid(format!(
                    "sections {} and {} share the same depth and capacity",
                    pair[0].designation, pair[1].designation
                )));
            }
        }
        Ok(Self {
            sections,
            ordering_key: OrderingKey::ByDepthThenCapacity,
            index,
        })
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut sections = Vec::new();
        for row in rdr.deserialize() {
            let row: CatalogRow = row?;
            sections.push(SteelSection::new(
                row.designation,
                row.depth_mm * 1e-3,
                row.mass_kg_m,
                row.iyy_cm4 * 1e-8,
                row.wply_cm3 * 1e-6,
                row.avz_cm2 * 1e-4,
                row.a_cm2 * 1e-4,
            )?);
        }
        Self::new(sections)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    /// The UKB catalog shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_csv_reader(BUNDLED_UKB.as_bytes()).expect("bundled catalog is valid")
    }

    pub fn sections(&self) -> &[SteelSection] {
        &self.sections
    }

    pub fn len(&self) -> usize {
        self.sections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    pub fn ordering_key(&self) -> OrderingKey {
        self.ordering_key
    }

    pub fn get(&self, designation: &str) -> Option<&SteelSection> {
        self.index_of(designation).map(|i| &self.sections[i])
    }

    pub fn index_of(&self, designation: &str) -> Option<usize> {
        self.index.get(designation).copied()
    }

    /// Largest I_yy / A_z over the catalog, m².
    pub fn max_inertia_shear_ratio(&self) -> f64 {
        self.sections
            .iter()
            .map(SteelSection::inertia_shear_ratio)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Catalog in its file format, in catalog order.
    pub fn to_csv_string(&self) -> Result<String> {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        for s in &self.sections {
            wtr.serialize(CatalogRow {
                designation: s.designation.clone(),
                mass_kg_m: tidy(s.mass_per_length),
                depth_mm: tidy(s.depth * 1e3),
                iyy_cm4: tidy(s.second_moment_major * 1e8),
                wply_cm3: tidy(s.plastic_modulus_major * 1e6),
                avz_cm2: tidy(s.shear_area_major * 1e4),
                a_cm2: tidy(s.cross_area * 1e4),
            })?;
        }
        let bytes = wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// SHA-256 of the canonical CSV form, hex encoded.
    pub fn content_hash(&self) -> String {
        let text = self.to_csv_string().expect("in-memory csv");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Rounds away unit-conversion noise (catalog values carry at most 6 decimals).
fn tidy(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}
