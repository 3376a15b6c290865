//! The `iz` command line. Every subcommand writes its primary output to
//! `--out DIR` (with a `manifest.json`) or, without `--out`, to stdout.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::arrangements::{critical_set, flexural_set, shear_set, shear_set_bound, shear_susceptible};
use crate::catalog::SectionCatalog;
use crate::dataset::{generate, run_study, validate_containment, DesignSetConfig, GeneratedSystem, StudyContext};
use crate::design::design_system;
use crate::error::{Error, Result};
use crate::model::{validate_system, BeamSystem, LoadArrangement, LoadCombination, Material};
use crate::report::{
    histogram_file_name, read_dataset, read_results_csv, write_containment_csv, write_critical_csv, write_dataset,
    write_forces_csv, write_histogram_csv, write_results_csv, write_stats_csv, RunManifest,
};
use crate::solver::{response_tables, STATION_COUNT};
use crate::zone::{zone_statistics, DEFAULT_EPS};

#[derive(Debug, Parser)]
#[command(name = "iz", version, about = "Influence zones of continuous steel beams")]
pub struct Cli {
    /// Section catalog CSV; the bundled UKB catalog when absent.
    #[arg(long, global = true, env = "IZ_CATALOG")]
    pub catalog: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factored M and V at every station for one load arrangement.
    Analyze {
        /// Beam system JSON.
        system: PathBuf,
        /// Variable-load activation, e.g. 10110; all loaded when absent.
        #[arg(long)]
        arrangement: Option<String>,
        /// Only this station (0-10).
        #[arg(long)]
        station: Option<usize>,
    },
    /// Flexural, shear and critical load arrangement sets.
    Arrangements {
        #[arg(required_unless_present = "members", conflicts_with = "members")]
        /// Beam system JSON; enables shear-susceptibility screening.
        system: Option<PathBuf>,
        /// Member count for the flexural set alone.
        #[arg(long)]
        members: Option<usize>,
    },
    /// Minimum-depth section design against the critical set.
    Design {
        /// Beam system JSON.
        system: PathBuf,
    },
    /// Influence zones of a system file or a dataset directory.
    Zone {
        /// System JSON, or a directory written by `dataset`.
        input: PathBuf,
        /// Thresholds, e.g. 0.005,0.05 or 0.5%,5%; the standard seven when absent.
        #[arg(long, value_parser = parse_eps)]
        eps: Option<EpsList>,
        /// Per-system checkpoint directory; finished systems are reused.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Generate a seeded design data set.
    Dataset(DatasetArgs),
    /// Brute-force containment check on the stress-test set.
    Validate {
        /// Sampling seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Load and span draws, as LOADSxSPANS.
        #[arg(long, value_parser = parse_samples, default_value = "8x8")]
        samples: (usize, usize),
        /// Members per system.
        #[arg(long, default_value_t = 10)]
        members: usize,
    },
    /// Table of mean and max k_max per threshold, plus histograms.
    Stats {
        /// One or more results.csv files written by `zone`.
        #[arg(required = true)]
        results: Vec<PathBuf>,
        /// Thresholds to tabulate; the standard seven when absent.
        #[arg(long, value_parser = parse_eps)]
        eps: Option<EpsList>,
    },
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// 1-4, or `stress` for the high-load set.
    #[arg(long)]
    pub set: String,
    /// Sampling seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Load and span draws, as LOADSxSPANS; the set's own size when absent.
    #[arg(long, value_parser = parse_samples)]
    pub samples: Option<(usize, usize)>,
    /// Members per system; the set's own count when absent.
    #[arg(long)]
    pub members: Option<usize>,
}

/// Error thresholds as fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsList(pub Vec<f64>);

/// Comma-separated thresholds; a trailing `%` marks a percentage.
pub fn parse_eps(text: &str) -> std::result::Result<EpsList, String> {
    let values = text
        .split(',')
        .map(|part| {
            let part = part.trim();
            let (number, scale) = match part.strip_suffix('%') {
                Some(p) => (p, 0.01),
                None => (part, 1.0),
            };
            let v: f64 = number.parse().map_err(|_| format!("bad threshold {part:?}"))?;
            let v = v * scale;
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(format!("threshold must be positive: {part:?}"))
            }
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(EpsList(values))
}

/// `NxM`: load draws by span draws.
pub fn parse_samples(text: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got {text:?}"))?;
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("bad sample count {s:?}"));
    let (a, b) = (parse(a)?, parse(b)?);
    if a == 0 || b == 0 {
        return Err("sample counts must be positive".into());
    }
    Ok((a, b))
}

pub fn load_catalog(path: Option<&Path>) -> Result<SectionCatalog> {
    match path {
        Some(p) => SectionCatalog::from_path(p),
        None => Ok(SectionCatalog::bundled()),
    }
}

fn read_system(path: &Path, catalog: &SectionCatalog) -> Result<BeamSystem> {
    let system = BeamSystem::from_json(&fs::read_to_string(path)?, catalog)?;
    let violations = validate_system(&system, catalog);
    if !violations.is_empty() {
        let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Error::Invalid(text.join("; ")));
    }
    Ok(system)
}

/// Collects named outputs and writes them to `--out` or stdout.
struct Sink {
    dir: Option<PathBuf>,
    manifest: RunManifest,
}

impl Sink {
    fn new(dir: Option<&Path>, manifest: RunManifest) -> Result<Self> {
        if let Some(d) = dir {
            fs::create_dir_all(d)?;
        }
        Ok(Self {
            dir: dir.map(Path::to_path_buf),
            manifest,
        })
    }

    /// Primary outputs go to stdout when there is no output directory.
    fn emit(&mut self, name: &str, bytes: &[u8], primary: bool) -> Result<()> {
        match &self.dir {
            Some(d) => {
                crate::dataset::write_atomic(&d.join(name), bytes)?;
                self.manifest.record(name);
            }
            None if primary => std::io::stdout().write_all(bytes)?,
            None => {}
        }
        Ok(())
    }

    fn finish(self) -> Result<()> {
        if let Some(d) = &self.dir {
            self.manifest.finish(d)?;
        }
        Ok(())
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| Error::Invalid(e.to_string()))?;
    }
    let catalog = load_catalog(cli.catalog.as_deref())?;
    let material = Material::s355();
    let combo = LoadCombination::default();
    let out = cli.out.as_deref();
    let config_text = format!("{:?}", cli.command);
    let manifest = |name: &str, seed: Option<u64>| RunManifest::start(name, &config_text, seed, &catalog);

    match &cli.command {
        Command::Analyze {
            system,
            arrangement,
            station,
        } => {
            let system = read_system(system, &catalog)?;
            system.assigned_sections()?;
            let m = system.member_count();
            let arrangement = match arrangement {
                Some(bits) => LoadArrangement::parse(bits)?,
                None => LoadArrangement::all_on(m),
            };
            if let Some(s) = station.filter(|&s| s >= STATION_COUNT) {
                return Err(Error::IndexOutOfRange {
                    index: s,
                    len: STATION_COUNT,
                });
            }
            let tables = response_tables(&system, &material)?;
            let bytes = csv_bytes(|b| write_forces_csv(&system, &tables, &combo, &arrangement, *station, b))?;
            let mut sink = Sink::new(out, manifest("analyze", None))?;
            sink.emit("forces.csv", &bytes, true)?;
            sink.finish()
        }
        Command::Arrangements { system, members } => {
            let (m, beams) = match (system, members) {
                (Some(path), _) => {
                    let system = read_system(path, &catalog)?;
                    (system.member_count(), shear_susceptible(&system, &material, &catalog))
                }
                (None, Some(m)) => (*m, Vec::new()),
                (None, None) => return Err(Error::Invalid("give a system file or --members".into())),
            };
            let flex = flexural_set(m)?;
            let shear = shear_set(m, &flex, &beams)?;
            let crit = critical_set(&flex, &shear);
            let summary = format!(
                "members {m}\nshear beams {beams:?}\nflexural {} (predicted {})\nshear {} (bound {})\ncritical {} (bound {})\n",
                flex.len(),
                2 * m,
                shear.len(),
                shear_set_bound(m, beams.len()),
                crit.len(),
                2 * m + shear_set_bound(m, beams.len()),
            );
            eprint!("{summary}");
            let bytes = csv_bytes(|b| write_critical_csv(&crit, flex.len(), b))?;
            let mut sink = Sink::new(out, manifest("arrangements", None))?;
            sink.emit("arrangements.csv", &bytes, true)?;
            sink.emit("summary.txt", summary.as_bytes(), false)?;
            sink.finish()
        }
        Command::Design { system } => {
            let system = read_system(system, &catalog)?;
            let set = crate::arrangements::critical_set_for(&system, &material, &catalog)?;
            let result = design_system(&system, &catalog, &material, &combo, &set)?;
            let mut json = serde_json::to_string_pretty(&result.to_document())?;
            json.push('\n');
            let mut sink = Sink::new(out, manifest("design", None))?;
            sink.emit("design.json", json.as_bytes(), true)?;
            sink.finish()
        }
        Command::Zone { input, eps, checkpoint } => {
            let eps = eps.as_ref().map_or_else(|| DEFAULT_EPS.to_vec(), |e| e.0.clone());
            let (seed, systems) = if input.is_dir() {
                let (config, systems) = read_dataset(input, &catalog)?;
                (Some(config.seed), systems)
            } else {
                let system = read_system(input, &catalog)?;
                (None, vec![GeneratedSystem { system_id: 0, system }])
            };
            let ctx = StudyContext {
                catalog: &catalog,
                material,
                combo,
                eps,
                checkpoint: checkpoint.clone(),
            };
            let study = run_study(&systems, &ctx)?;
            let zones = study.zones();
            let failures = study.failures();
            eprintln!(
                "{} systems, {} design beams, {} skipped ({:.2}%)",
                systems.len(),
                zones.len(),
                failures.len(),
                100.0 * study.skip_rate()
            );
            let results = csv_bytes(|b| write_results_csv(&zones, b))?;
            let skipped = csv_bytes(|b| {
                let mut w = csv::Writer::from_writer(b);
                w.write_record(["system_id", "error"])?;
                for (id, e) in &failures {
                    w.write_record([id.to_string(), e.to_string()])?;
                }
                w.flush()?;
                Ok(())
            })?;
            let designs: Vec<_> = study.outcomes.iter().map(|o| (o.system_id, &o.design)).collect();
            let mut sink = Sink::new(out, manifest("zone", seed))?;
            sink.emit("results.csv", &results, true)?;
            sink.emit("skipped.csv", &skipped, false)?;
            sink.emit("designs.json", serde_json::to_string(&designs)?.as_bytes(), false)?;
            sink.finish()
        }
        Command::Dataset(args) => {
            let config = dataset_config(args)?;
            let systems = generate(&config)?;
            let dir = out.ok_or_else(|| Error::Invalid("dataset needs --out DIR".into()))?;
            let mut manifest = manifest("dataset", Some(config.seed));
            manifest.config_hash = config.hash();
            for name in write_dataset(dir, &config, &systems)? {
                manifest.record(name);
            }
            eprintln!("{} systems of {} members", systems.len(), config.members);
            manifest.finish(dir)?;
            Ok(())
        }
        Command::Validate { seed, samples, members } => {
            let config = DesignSetConfig::stress_test(*seed)
                .with_samples(samples.0, samples.1)
                .with_members(*members);
            let report = validate_containment(&config, &catalog, &material, &combo)?;
            let line = format!(
                "containment {:.0}% ({} of {} beams, {} violations, {} outside flexural set, {} beams over u = 1, {} systems skipped)\n",
                100.0 * report.containment_rate(),
                report.beams() - report.violations(),
                report.beams(),
                report.violations(),
                report.outside_flexural(),
                report.infeasible(),
                report.skipped.len(),
            );
            let bytes = csv_bytes(|b| write_containment_csv(&report, b))?;
            let mut sink = Sink::new(out, manifest("validate", Some(*seed)))?;
            sink.emit("containment.csv", &bytes, false)?;
            sink.emit("summary.txt", line.as_bytes(), false)?;
            print!("{line}");
            sink.finish()
        }
        Command::Stats { results, eps } => {
            let eps = eps.as_ref().map_or_else(|| DEFAULT_EPS.to_vec(), |e| e.0.clone());
            let mut summaries = Vec::new();
            for path in results {
                let zones = read_results_csv(fs::File::open(path)?)?;
                summaries.push((results_label(path), zone_statistics(&zones, &eps)?));
            }
            let mut sink = Sink::new(out, manifest("stats", None))?;
            sink.emit("table.csv", &csv_bytes(|b| write_stats_csv(&summaries, b))?, true)?;
            for (label, summary) in &summaries {
                for row in &summary.rows {
                    let bytes = csv_bytes(|b| write_histogram_csv(row, b))?;
                    sink.emit(&histogram_file_name(label, row.eps), &bytes, false)?;
                }
            }
            sink.finish()
        }
    }
}

fn dataset_config(args: &DatasetArgs) -> Result<DesignSetConfig> {
    let mut config = match args.set.as_str() {
        "stress" => DesignSetConfig::stress_test(args.seed),
        other => {
            let id: u32 = other
                .parse()
                .map_err(|_| Error::Invalid(format!("unknown set {other:?}")))?;
            DesignSetConfig::standard(id, args.seed)?
        }
    };
    if let Some((a, b)) = args.samples {
        config = config.with_samples(a, b);
    }
    if let Some(m) = args.members {
        config = config.with_members(m);
    }
    config.validate()?;
    Ok(config)
}

/// `set1/results.csv` → `set1`; `other.csv` → `other`.
fn results_label(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    if stem == "results" {
        if let Some(parent) = path.parent().and_then(Path::file_name).and_then(|s| s.to_str()) {
            return parent.to_string();
        }
    }
    stem.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_parse() {
        assert_eq!(parse_eps("0.5%,5%").unwrap(), EpsList(vec![0.005, 0.05]));
        assert_eq!(parse_eps("0.1").unwrap(), EpsList(vec![0.1]));
        assert!(parse_eps("0").is_err());
        assert!(parse_eps("x").is_err());
    }

    #[test]
    fn samples_parse() {
        assert_eq!(parse_samples("8x8").unwrap(), (8, 8));
        assert_eq!(parse_samples("32X16").unwrap(), (32, 16));
        assert!(parse_samples("8").is_err());
        assert!(parse_samples("0x3").is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(results_label(Path::new("out/set1/results.csv")), "set1");
        assert_eq!(results_label(Path::new("set4.csv")), "set4");
    }

    #[test]
    fn command_line_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["iz", "dataset", "--set", "2", "--seed", "9", "--samples", "2x3", "--out", "d"]).unwrap();
        let Command::Dataset(args) = cli.command else { panic!() };
        let config = dataset_config(&args).unwrap();
        assert_eq!((config.set_id, config.seed, config.udl_draws, config.span_draws), (2, 9, 2, 3));
        assert!(Cli::try_parse_from(["iz", "arrangements"]).is_err());
    }
}
