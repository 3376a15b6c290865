//! File formats: run manifests, result and statistics CSVs, dataset
//! directories.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arrangements::ArrangementSet;
use crate::catalog::SectionCatalog;
use crate::dataset::{write_atomic, ContainmentReport, DesignSetConfig, GeneratedSystem, RNG_NAME};
use crate::design::{factored_components, station_forces};
use crate::error::{Error, Result};
use crate::model::{BeamSystem, LoadArrangement, LoadCombination, SystemDocument};
use crate::solver::ResponseTable;
use crate::zone::{ZoneResult, ZoneStatRow, ZoneSummary};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Provenance record written next to the outputs of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub rng: String,
    pub catalog_hash: String,
    pub tool_version: String,
    pub started_unix: u64,
    pub finished_unix: Option<u64>,
    /// Output files, relative to the manifest's directory.
    pub outputs: Vec<String>,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    /// `config` is any canonical text of the command's inputs.
    pub fn start(command: &str, config: &str, seed: Option<u64>, catalog: &SectionCatalog) -> Self {
        Self {
            command: command.to_string(),
            config_hash: sha256_hex(config.as_bytes()),
            seed,
            rng: RNG_NAME.to_string(),
            catalog_hash: catalog.content_hash(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix: unix_now(),
            finished_unix: None,
            outputs: Vec::new(),
        }
    }

    pub fn record(&mut self, output: impl Into<String>) {
        self.outputs.push(output.into());
    }

    /// Stamps the finish time and writes `manifest.json` into `dir`.
    pub fn finish(mut self, dir: &Path) -> Result<PathBuf> {
        self.finished_unix = Some(unix_now());
        let path = dir.join(MANIFEST_FILE);
        write_atomic(&path, serde_json::to_string_pretty(&self)?.as_bytes())?;
        Ok(path)
    }
}

/// `system_id,beam_index,eps,k_max,u_true`, one row per beam and threshold.
pub fn write_results_csv<W: Write>(results: &[ZoneResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["system_id", "beam_index", "eps", "k_max", "u_true"])?;
    for r in results {
        for (eps, k) in r.eps.iter().zip(&r.k_max) {
            w.write_record([
                r.system_id.to_string(),
                r.beam_index.to_string(),
                eps.to_string(),
                k.to_string(),
                r.u_true.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct ResultRow {
    system_id: usize,
    beam_index: usize,
    eps: f64,
    k_max: usize,
    u_true: f64,
}

/// Reads a results CSV back into one [`ZoneResult`] per beam, in file order.
/// Captured curves are not part of the format, so `ratios` stays empty.
pub fn read_results_csv<R: Read>(input: R) -> Result<Vec<ZoneResult>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut out: Vec<ZoneResult> = Vec::new();
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for row in rdr.deserialize() {
        let row: ResultRow = row?;
        let key = (row.system_id, row.beam_index);
        let slot = *index.entry(key).or_insert_with(|| {
            out.push(ZoneResult {
                system_id: row.system_id,
                beam_index: row.beam_index,
                u_true: row.u_true,
                eps: Vec::new(),
                k_max: Vec::new(),
                ratios: Vec::new(),
            });
            out.len() - 1
        });
        out[slot].eps.push(row.eps);
        out[slot].k_max.push(row.k_max);
    }
    Ok(out)
}

/// Table-3 layout: one row per threshold, a mean and max column per summary.
pub fn write_stats_csv<W: Write>(summaries: &[(String, ZoneSummary)], out: W) -> Result<()> {
    let Some((_, first)) = summaries.first() else {
        return Err(Error::Invalid("no summaries to write".into()));
    };
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["eps".to_string()];
    for (label, _) in summaries {
        header.push(format!("{label}_mean"));
        header.push(format!("{label}_max"));
    }
    w.write_record(&header)?;
    for (i, row) in first.rows.iter().enumerate() {
        let mut record = vec![row.eps.to_string()];
        for (label, s) in summaries {
            let r = s
                .rows
                .get(i)
                .filter(|r| r.eps == row.eps)
                .ok_or_else(|| Error::Invalid(format!("{label} lacks eps {}", row.eps)))?;
            record.push(format!("{:.4}", r.mean));
            record.push(r.max.to_string());
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// `k_max,count,fraction` for one threshold.
pub fn write_histogram_csv<W: Write>(row: &ZoneStatRow, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k_max", "count", "fraction"])?;
    for (k, &c) in row.histogram.iter().enumerate() {
        w.write_record([
            k.to_string(),
            c.to_string(),
            format!("{:.6}", c as f64 / row.count as f64),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// File name of the histogram for `eps`, e.g. `histogram_set1_eps0.005.csv`.
pub fn histogram_file_name(label: &str, eps: f64) -> String {
    format!("histogram_{label}_eps{eps}.csv")
}

/// Brute-force winners ordered by shear-beam count, then arrangement index.
pub fn write_containment_csv<W: Write>(report: &ContainmentReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "example_rank",
        "arrangement_index",
        "shear_count",
        "system_id",
        "beam_index",
        "bits",
        "critical_size",
        "contained",
        "feasible",
        "u_naive",
        "u_flexural",
    ])?;
    for (rank, r) in report.ranked().into_iter().enumerate() {
        w.write_record([
            rank.to_string(),
            r.winner_index.to_string(),
            r.shear_count.to_string(),
            r.system_id.to_string(),
            r.beam_index.to_string(),
            r.winner_bits.clone(),
            r.critical_size.to_string(),
            r.contained.to_string(),
            r.feasible.to_string(),
            r.u_naive.to_string(),
            r.u_flexural.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `index,kind,bits` for a critical set, labelling rows by origin.
pub fn write_critical_csv<W: Write>(critical: &ArrangementSet, flexural_size: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "kind", "bits"])?;
    for (i, a) in critical.iter().enumerate() {
        let kind = if i < flexural_size { "flexural" } else { "shear" };
        w.write_record([i.to_string(), kind.to_string(), a.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Factored M and V at every station of every member for one arrangement:
/// `member,station,x,moment,shear` (m, kN·m, kN).
pub fn write_forces_csv<W: Write>(
    system: &BeamSystem,
    tables: &[ResponseTable],
    combo: &LoadCombination,
    arrangement: &LoadArrangement,
    station: Option<usize>,
    out: W,
) -> Result<()> {
    let m = system.member_count();
    if arrangement.len() != m {
        return Err(Error::Invalid(format!(
            "arrangement {arrangement} does not have {m} members"
        )));
    }
    let (permanent, variable) = factored_components(system, combo);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["member", "station", "x", "moment", "shear"])?;
    for (d, table) in tables.iter().enumerate() {
        let forces = station_forces(table, &permanent, &variable, arrangement, 0..m);
        for (s, (moment, shear)) in forces.into_iter().enumerate() {
            if station.is_some_and(|want| want != s) {
                continue;
            }
            let x = table.stations[s] * system.spans[d];
            w.write_record([
                d.to_string(),
                s.to_string(),
                x.to_string(),
                moment.to_string(),
                shear.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub const DATASET_MANIFEST: &str = "systems.csv";
pub const DATASET_CONFIG: &str = "config.json";
const SYSTEMS_DIR: &str = "systems";

fn system_file(system_id: usize) -> String {
    format!("{SYSTEMS_DIR}/system_{system_id:06}.json")
}

/// Writes `config.json`, `systems.csv` (`system_id,set_id,seed,L0..,Q0..`)
/// and one JSON document per system. Returns the files written.
pub fn write_dataset(dir: &Path, config: &DesignSetConfig, systems: &[GeneratedSystem]) -> Result<Vec<String>> {
    fs::create_dir_all(dir.join(SYSTEMS_DIR))?;
    let mut written = vec![DATASET_CONFIG.to_string(), DATASET_MANIFEST.to_string()];
    write_atomic(
        &dir.join(DATASET_CONFIG),
        serde_json::to_string_pretty(config)?.as_bytes(),
    )?;
    let m = config.members;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["system_id".to_string(), "set_id".into(), "seed".into()];
    header.extend((0..m).map(|i| format!("L{i}")));
    header.extend((0..m).map(|i| format!("Q{i}")));
    w.write_record(&header)?;
    for g in systems {
        let mut record = vec![g.system_id.to_string(), config.set_id.to_string(), config.seed.to_string()];
        record.extend(g.system.spans.iter().map(f64::to_string));
        record.extend(g.system.variable_udl.iter().map(f64::to_string));
        w.write_record(&record)?;
        let name = system_file(g.system_id);
        write_atomic(
            &dir.join(&name),
            serde_json::to_string_pretty(&g.system.to_document())?.as_bytes(),
        )?;
        written.push(name);
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    write_atomic(&dir.join(DATASET_MANIFEST), &bytes)?;
    Ok(written)
}

/// Loads a directory written by [`write_dataset`].
pub fn read_dataset(dir: &Path, catalog: &SectionCatalog) -> Result<(DesignSetConfig, Vec<GeneratedSystem>)> {
    let config: DesignSetConfig = serde_json::from_slice(&fs::read(dir.join(DATASET_CONFIG))?)?;
    let mut rdr = csv::Reader::from_path(dir.join(DATASET_MANIFEST))?;
    let mut systems = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let system_id: usize = record
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Invalid("bad system_id in dataset manifest".into()))?;
        let doc: SystemDocument = serde_json::from_slice(&fs::read(dir.join(system_file(system_id)))?)?;
        systems.push(GeneratedSystem {
            system_id,
            system: BeamSystem::from_document(&doc, catalog)?,
        });
    }
    Ok((config, systems))
}
