//! Seeded design scenarios and the batch study that designs every system and
//! extracts influence zones.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangements::{critical_set_for, flexural_set, naive_set_after, shear_susceptible};
use crate::catalog::SectionCatalog;
use crate::design::{
    brute_force_with_tables, design_system, design_system_with, DesignDocument, InfeasiblePolicy,
    BRUTE_FORCE_LIMIT,
};
use crate::error::{Error, Result};
use crate::model::{BeamSystem, LoadCombination, Material};
use crate::zone::{captured_curve, ZoneResult};

/// Name of the portable generator used for all sampling.
pub const RNG_NAME: &str = "ChaCha8";

/// Member count of the zone studies.
pub const STUDY_MEMBERS: usize = 15;

/// Parameters of one design data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSetConfig {
    /// 1–4 for the standard sets; anything else is a custom set.
    pub set_id: u32,
    pub members: usize,
    /// Inclusive Q_k range, kN/m.
    pub q_range: (f64, f64),
    /// Inclusive span range, m.
    pub span_range: (f64, f64),
    pub q_step: f64,
    pub span_step: f64,
    /// G_k excluding self-weight, kN/m.
    pub g_base: f64,
    pub udl_draws: usize,
    pub span_draws: usize,
    pub seed: u64,
    /// One span and one Q_k shared by all members; the lattice is enumerated.
    pub uniform_per_system: bool,
}

impl DesignSetConfig {
    /// Standard sets 1–4 at full size (32 × 32 draws for sets 2–4).
    pub fn standard(set_id: u32, seed: u64) -> Result<Self> {
        let (q_range, span_range) = match set_id {
            1 => ((0.0, 60.0), (1.0, 12.0)),
            2 => ((20.0, 40.0), (4.0, 8.0)),
            3 => ((10.0, 50.0), (2.0, 10.0)),
            4 => ((0.0, 60.0), (1.0, 12.0)),
            other => return Err(Error::Invalid(format!("unknown design set {other}"))),
        };
        Ok(Self {
            set_id,
            members: STUDY_MEMBERS,
            q_range,
            span_range,
            q_step: 5.0,
            span_step: 0.5,
            g_base: 3.0,
            udl_draws: 32,
            span_draws: 32,
            seed,
            uniform_per_system: set_id == 1,
        })
    }

    /// High-load set used to exercise the shear arrangements: m = 10,
    /// Q_k ∈ [200, 400] kN/m, spans as set 4.
    pub fn stress_test(seed: u64) -> Self {
        Self {
            set_id: 0,
            members: 10,
            q_range: (200.0, 400.0),
            span_range: (1.0, 12.0),
            q_step: 5.0,
            span_step: 0.5,
            g_base: 3.0,
            udl_draws: 32,
            span_draws: 32,
            seed,
            uniform_per_system: false,
        }
    }

    pub fn with_samples(mut self, udl_draws: usize, span_draws: usize) -> Self {
        self.udl_draws = udl_draws;
        self.span_draws = span_draws;
        self
    }

    pub fn with_members(mut self, members: usize) -> Self {
        self.members = members;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Invalid(msg));
        if self.members == 0 {
            return bad("member count must be at least 1".into());
        }
        if !(self.q_step > 0.0 && self.span_step > 0.0) {
            return bad("steps must be positive".into());
        }
        if !(self.q_range.0 >= 0.0 && self.q_range.0 <= self.q_range.1) {
            return bad(format!("invalid Q range {:?}", self.q_range));
        }
        if !(self.span_range.0 > 0.0 && self.span_range.0 <= self.span_range.1) {
            return bad(format!("invalid span range {:?}", self.span_range));
        }
        if self.g_base < 0.0 {
            return bad("g_base must be non-negative".into());
        }
        if self.set_id == 1 && !self.uniform_per_system {
            return bad("set 1 uses one span and load per system".into());
        }
        if !self.uniform_per_system && (self.udl_draws == 0 || self.span_draws == 0) {
            return bad("draw counts must be positive".into());
        }
        Ok(())
    }

    pub fn q_values(&self) -> Vec<f64> {
        lattice(self.q_range, self.q_step)
    }

    pub fn span_values(&self) -> Vec<f64> {
        lattice(self.span_range, self.span_step)
    }

    /// Number of systems [`generate`] produces.
    pub fn system_count(&self) -> usize {
        if self.uniform_per_system {
            self.q_values().len() * self.span_values().len()
        } else {
            self.udl_draws * self.span_draws
        }
    }

    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// `lo, lo + step, …` up to `hi` inclusive.
fn lattice((lo, hi): (f64, f64), step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| lo + k as f64 * step).collect()
}

/// A generated system and its position in the data set.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSystem {
    pub system_id: usize,
    pub system: BeamSystem,
}

/// Builds the data set. Uniform sets enumerate every (span, Q_k) lattice
/// pair; other sets draw `udl_draws` load vectors and `span_draws` span
/// vectors and combine every pair, load-major.
pub fn generate(config: &DesignSetConfig) -> Result<Vec<GeneratedSystem>> {
    config.validate()?;
    let m = config.members;
    let qs = config.q_values();
    let spans = config.span_values();
    let mut out = Vec::with_capacity(config.system_count());
    if config.uniform_per_system {
        for &l in &spans {
            for &q in &qs {
                out.push(BeamSystem::uniform(m, l, config.g_base, q));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut draw = |values: &[f64]| -> Vec<f64> {
            (0..m).map(|_| values[rng.random_range(0..values.len())]).collect()
        };
        let q_draws: Vec<Vec<f64>> = (0..config.udl_draws).map(|_| draw(&qs)).collect();
        let span_draws: Vec<Vec<f64>> = (0..config.span_draws).map(|_| draw(&spans)).collect();
        for q in &q_draws {
            for l in &span_draws {
                out.push(BeamSystem::new(l.clone(), vec![config.g_base; m], q.clone()));
            }
        }
    }
    Ok(out
        .into_iter()
        .enumerate()
        .map(|(system_id, system)| GeneratedSystem { system_id, system })
        .collect())
}

/// Shared inputs of a study run.
#[derive(Debug, Clone)]
pub struct StudyContext<'a> {
    pub catalog: &'a SectionCatalog,
    pub material: Material,
    pub combo: LoadCombination,
    pub eps: Vec<f64>,
    /// Directory for per-system checkpoint files; finished systems found
    /// there are loaded instead of recomputed.
    pub checkpoint: Option<PathBuf>,
}

/// Design and zone results of one system, or the reason it was skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemOutcome {
    pub system_id: usize,
    pub shear_beams: Vec<usize>,
    pub critical_size: usize,
    pub design: Option<DesignDocument>,
    pub zones: Vec<ZoneResult>,
    pub error: Option<String>,
}

/// All outcomes of a study, in system order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StudyOutput {
    pub outcomes: Vec<SystemOutcome>,
}

impl StudyOutput {
    pub fn zones(&self) -> Vec<ZoneResult> {
        self.outcomes.iter().flat_map(|o| o.zones.iter().cloned()).collect()
    }

    pub fn failures(&self) -> Vec<(usize, &str)> {
        self.outcomes
            .iter()
            .filter_map(|o| o.error.as_deref().map(|e| (o.system_id, e)))
            .collect()
    }

    pub fn skip_rate(&self) -> f64 {
        if self.outcomes.is_empty() {
            0.0
        } else {
            self.failures().len() as f64 / self.outcomes.len() as f64
        }
    }
}

/// Designs one system against its critical set and extracts k_max of every member.
pub fn study_system(generated: &GeneratedSystem, ctx: &StudyContext<'_>) -> SystemOutcome {
    let system = &generated.system;
    let shear_beams = shear_susceptible(system, &ctx.material, ctx.catalog);
    let mut outcome = SystemOutcome {
        system_id: generated.system_id,
        shear_beams,
        critical_size: 0,
        design: None,
        zones: Vec::new(),
        error: None,
    };
    let run = |outcome: &mut SystemOutcome| -> Result<()> {
        let set = critical_set_for(system, &ctx.material, ctx.catalog)?;
        outcome.critical_size = set.len();
        let design = design_system(system, ctx.catalog, &ctx.material, &ctx.combo, &set)?;
        for (d, table) in design.tables.iter().enumerate() {
            let curve = captured_curve(&design.system, d, table, &set, &ctx.combo, &ctx.material)?;
            outcome
                .zones
                .push(ZoneResult::from_curve(generated.system_id, &curve, &ctx.eps));
        }
        outcome.design = Some(design.to_document());
        Ok(())
    };
    if let Err(e) = run(&mut outcome) {
        outcome.zones.clear();
        outcome.error = Some(e.to_string());
    }
    outcome
}

fn checkpoint_path(dir: &Path, system_id: usize) -> PathBuf {
    dir.join(format!("system_{system_id:06}.json"))
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs [`study_system`] over every system in parallel; results keep system order.
pub fn run_study(systems: &[GeneratedSystem], ctx: &StudyContext<'_>) -> Result<StudyOutput> {
    if let Some(dir) = &ctx.checkpoint {
        fs::create_dir_all(dir)?;
    }
    let outcomes = systems
        .par_iter()
        .map(|g| -> Result<SystemOutcome> {
            if let Some(dir) = &ctx.checkpoint {
                let path = checkpoint_path(dir, g.system_id);
                if path.exists() {
                    let cached: SystemOutcome = serde_json::from_slice(&fs::read(&path)?)?;
                    return Ok(cached);
                }
                let outcome = study_system(g, ctx);
                write_atomic(&path, &serde_json::to_vec(&outcome)?)?;
                return Ok(outcome);
            }
            Ok(study_system(g, ctx))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StudyOutput { outcomes })
}

/// Brute-force check of one design beam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentRow {
    pub system_id: usize,
    pub beam_index: usize,
    /// Number of shear-susceptible members in the system.
    pub shear_count: usize,
    /// Index of the worst arrangement in the naive set ordered flexural,
    /// shear, rest.
    pub winner_index: usize,
    pub winner_bits: String,
    pub flexural_size: usize,
    pub critical_size: usize,
    pub contained: bool,
    /// Whether the designed section satisfies u_true ≤ 1.
    pub feasible: bool,
    /// Worst utilisation over all 2^m arrangements.
    pub u_naive: f64,
    /// Worst utilisation over the flexural set only.
    pub u_flexural: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContainmentReport {
    pub rows: Vec<ContainmentRow>,
    /// `(system_id, message)` for systems whose design failed.
    pub skipped: Vec<(usize, String)>,
}

impl ContainmentReport {
    pub fn beams(&self) -> usize {
        self.rows.len()
    }

    pub fn infeasible(&self) -> usize {
        self.rows.iter().filter(|r| !r.feasible).count()
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.contained).count()
    }

    pub fn containment_rate(&self) -> f64 {
        if self.rows.is_empty() {
            1.0
        } else {
            1.0 - self.violations() as f64 / self.rows.len() as f64
        }
    }

    /// Rows where the worst arrangement lies outside the flexural set.
    pub fn outside_flexural(&self) -> usize {
        self.rows.iter().filter(|r| r.winner_index >= r.flexural_size).count()
    }

    /// Relative utilisation increase of shear-governed beams over their best
    /// flexural arrangement.
    pub fn shear_increases(&self) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.winner_index >= r.flexural_size && r.u_flexural > 0.0)
            .map(|r| r.u_naive / r.u_flexural - 1.0)
            .collect()
    }

    /// Rows sorted by shear-beam count, then winner index.
    pub fn ranked(&self) -> Vec<&ContainmentRow> {
        let mut rows: Vec<&ContainmentRow> = self.rows.iter().collect();
        rows.sort_by_key(|r| (r.shear_count, r.winner_index, r.system_id, r.beam_index));
        rows
    }
}

/// Brute-force containment check of one system: design against the critical
/// set, then evaluate all 2^m arrangements on the designed system. Members no
/// catalog section satisfies keep their least utilised section so that the
/// arrangement check still covers every beam.
pub fn containment_for_system(
    generated: &GeneratedSystem,
    catalog: &SectionCatalog,
    material: &Material,
    combo: &LoadCombination,
) -> Result<Vec<ContainmentRow>> {
    let system = &generated.system;
    let m = system.member_count();
    if m > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            what: "member count for brute force",
            value: m,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let shear_beams = shear_susceptible(system, material, catalog);
    let flex = flexural_set(m)?;
    let critical = critical_set_for(system, material, catalog)?;
    let design = design_system_with(
        system,
        catalog,
        material,
        combo,
        &critical,
        InfeasiblePolicy::BestEffort,
    )?;
    let naive = naive_set_after(m, &critical)?;
    let bf = brute_force_with_tables(&design.system, material, combo, &naive, &design.tables)?;
    let flex_only = brute_force_with_tables(&design.system, material, combo, &flex, &design.tables)?;
    Ok((0..m)
        .map(|d| ContainmentRow {
            system_id: generated.system_id,
            beam_index: d,
            shear_count: shear_beams.len(),
            winner_index: bf.winners[d],
            winner_bits: naive.arrangements()[bf.winners[d]].to_string(),
            flexural_size: flex.len(),
            critical_size: critical.len(),
            contained: bf.winners[d] < critical.len(),
            feasible: design.utilisation[d] <= 1.0,
            u_naive: bf.utilisation[d],
            u_flexural: flex_only.utilisation[d],
        })
        .collect())
}

/// Runs the containment check over a generated data set.
pub fn validate_containment(
    config: &DesignSetConfig,
    catalog: &SectionCatalog,
    material: &Material,
    combo: &LoadCombination,
) -> Result<ContainmentReport> {
    if config.members > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            what: "member count for brute force",
            value: config.members,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let systems = generate(config)?;
    let results: Vec<(usize, Result<Vec<ContainmentRow>>)> = systems
        .par_iter()
        .map(|g| (g.system_id, containment_for_system(g, catalog, material, combo)))
        .collect();
    let mut report = ContainmentReport::default();
    for (id, r) in results {
        match r {
            Ok(rows) => report.rows.extend(rows),
            Err(e) => report.skipped.push((id, e.to_string())),
        }
    }
    Ok(report)
}
