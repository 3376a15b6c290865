//! ULS cross-section checks and minimum-depth sizing.
//!
//! The check combines plastic bending, plastic shear and the high-shear
//! reduction of the moment resistance: for |V| > V_Rd/2 the moment resistance
//! is scaled by (1 − ρ) with ρ = (2|V|/V_Rd − 1)².

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::arrangements::ArrangementSet;
use crate::catalog::{SectionCatalog, SteelSection};
use crate::error::{Error, Result};
use crate::model::{BeamSystem, LoadArrangement, LoadCombination, Material};
use crate::solver::{response_tables, ResponseTable};

/// Partial factor on cross-section resistance.
pub const GAMMA_M0: f64 = 1.0;

/// Iteration cap of the analyse/select loop.
pub const MAX_DESIGN_ITERATIONS: usize = 20;

/// Largest member count accepted by [`brute_force_critical`].
pub const BRUTE_FORCE_LIMIT: usize = 12;

/// Relative margin a later arrangement must exceed to replace the current maximum.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resistances {
    /// M_c,Rd, kN·m.
    pub moment_resistance: f64,
    /// V_pl,Rd, kN.
    pub shear_resistance: f64,
}

pub fn resistances(section: &SteelSection, material: &Material, gamma_m0: f64) -> Resistances {
    let fy = material.yield_strength;
    Resistances {
        moment_resistance: section.plastic_modulus_major * fy / gamma_m0 / 1000.0,
        shear_resistance: section.shear_area_major * fy / (3f64.sqrt() * gamma_m0) / 1000.0,
    }
}

/// Utilisation of a section carrying moment `moment` (kN·m) and shear `shear` (kN).
pub fn utilisation(moment: f64, shear: f64, r: &Resistances) -> f64 {
    let v = shear.abs() / r.shear_resistance;
    let m = moment.abs();
    let reduction = if v > 0.5 {
        let rho = (2.0 * v - 1.0).powi(2);
        (1.0 - rho).max(0.0)
    } else {
        1.0
    };
    let bending = if m == 0.0 {
        0.0
    } else {
        m / (r.moment_resistance * reduction)
    };
    bending.max(v)
}

/// Factored permanent (always on) and variable (patterned) line loads per
/// member, kN/m, with self-weight from the assigned sections.
pub fn factored_components(system: &BeamSystem, combo: &LoadCombination) -> (Vec<f64>, Vec<f64>) {
    let permanent = (0..system.member_count())
        .map(|i| combo.gamma_permanent * (system.permanent_udl[i] + system.self_weight(i)))
        .collect();
    let variable = system
        .variable_udl
        .iter()
        .map(|q| combo.gamma_variable * q)
        .collect();
    (permanent, variable)
}

/// Moment and shear at every station of the table's design beam, summing the
/// contributions of members in `window` only.
pub fn station_forces(
    table: &ResponseTable,
    permanent: &[f64],
    variable: &[f64],
    arrangement: &LoadArrangement,
    window: Range<usize>,
) -> Vec<(f64, f64)> {
    let loads: Vec<(usize, f64)> = window
        .map(|i| (i, permanent[i] + variable[i] * arrangement.factor(i)))
        .collect();
    (0..table.station_count())
        .map(|s| {
            let (mrow, vrow) = (&table.moment_unit[s], &table.shear_unit[s]);
            loads.iter().fold((0.0, 0.0), |(m, v), &(i, w)| {
                (m + w * mrow[i], v + w * vrow[i])
            })
        })
        .collect()
}

/// Worst case over arrangements and stations for one design beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Governing {
    pub utilisation: f64,
    pub arrangement: usize,
    pub station: usize,
    pub moment: f64,
    pub shear: f64,
}

/// Maximum utilisation of the table's design beam over `arrangements` and all
/// stations. Ties keep the lowest arrangement index, then the lowest station.
pub fn governing(
    table: &ResponseTable,
    permanent: &[f64],
    variable: &[f64],
    arrangements: &ArrangementSet,
    window: Range<usize>,
    r: &Resistances,
) -> Governing {
    let mut best = Governing {
        utilisation: f64::NEG_INFINITY,
        arrangement: 0,
        station: 0,
        moment: 0.0,
        shear: 0.0,
    };
    for (j, arrangement) in arrangements.iter().enumerate() {
        for (s, (m, v)) in station_forces(table, permanent, variable, arrangement, window.clone())
            .into_iter()
            .enumerate()
        {
            let u = utilisation(m, v, r);
            if u > best.utilisation + TIE_TOLERANCE * best.utilisation.abs() || best.utilisation == f64::NEG_INFINITY {
                best = Governing {
                    utilisation: u,
                    arrangement: j,
                    station: s,
                    moment: m,
                    shear: v,
                };
            }
        }
    }
    best
}

/// Outcome of [`design_system`].
#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    /// The input system with the selected sections assigned.
    pub system: BeamSystem,
    /// Catalog index of each member's section.
    pub section_indices: Vec<usize>,
    /// Governing utilisation u_true per member.
    pub utilisation: Vec<f64>,
    /// Index into the design arrangement set.
    pub governing_arrangement: Vec<usize>,
    pub governing_bits: Vec<LoadArrangement>,
    pub governing_station: Vec<usize>,
    pub iterations: usize,
    /// Unit-load response tables of the final pass, one per member.
    pub tables: Vec<ResponseTable>,
}

impl DesignResult {
    pub fn sections(&self) -> Vec<&SteelSection> {
        self.system
            .assigned_sections()
            .expect("designed systems have sections")
    }

    pub fn to_document(&self) -> DesignDocument {
        DesignDocument {
            iterations: self.iterations,
            members: (0..self.utilisation.len())
                .map(|i| DesignedMember {
                    member: i,
                    designation: self.sections()[i].designation.clone(),
                    u_true: self.utilisation[i],
                    governing_arrangement: self.governing_bits[i].to_string(),
                    governing_station: self.governing_station[i],
                })
                .collect(),
        }
    }
}

/// Serialized design outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignDocument {
    pub iterations: usize,
    pub members: Vec<DesignedMember>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignedMember {
    pub member: usize,
    pub designation: String,
    pub u_true: f64,
    pub governing_arrangement: String,
    pub governing_station: usize,
}

fn with_assignment(system: &BeamSystem, catalog: &SectionCatalog, indices: &[usize]) -> BeamSystem {
    let mut out = system.clone();
    out.sections = indices
        .iter()
        .map(|&c| Some(catalog.sections()[c].clone()))
        .collect();
    out
}

/// What [`design_system_with`] does when no catalog section satisfies a member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InfeasiblePolicy {
    /// Stop with [`Error::NoFeasibleSection`] if the converged assignment
    /// leaves any member above u = 1.
    #[default]
    Fail,
    /// Return the converged assignment anyway; such members keep their least
    /// utilised section (the later one on ties) and report u_true > 1.
    BestEffort,
}

/// Catalog index of the first section, at or after `from`, whose utilisation
/// under `pairs` does not exceed 1; failing that, the least utilised one.
fn first_feasible(
    pairs: &[(f64, f64)],
    catalog: &SectionCatalog,
    material: &Material,
    from: usize,
) -> usize {
    let mut best = (f64::INFINITY, from);
    for (c, section) in catalog.sections().iter().enumerate().skip(from) {
        let r = resistances(section, material, GAMMA_M0);
        let u = pairs
            .iter()
            .map(|&(m, v)| utilisation(m, v, &r))
            .fold(0.0, f64::max);
        if u <= 1.0 {
            return c;
        }
        if u <= best.0 {
            best = (u, c);
        }
    }
    best.1
}

/// Sizes every member for minimum depth against `arrangements`.
///
/// Starting from the shallowest section everywhere, the whole system is
/// analysed, each member takes the first catalog section whose utilisation
/// under the resulting forces is at most 1, and the loop repeats with updated
/// stiffness and self-weight until the assignment repeats. If the assignment
/// cycles, each member takes its furthest section seen in the cycle and
/// subsequent passes may only move members up the catalog. From the converged
/// state, members are then stepped down one catalog entry at a time while the
/// re-analysed system stays feasible, so that no single member can move down
/// without pushing some member above u = 1.
pub fn design_system(
    system: &BeamSystem,
    catalog: &SectionCatalog,
    material: &Material,
    combo: &LoadCombination,
    arrangements: &ArrangementSet,
) -> Result<DesignResult> {
    design_system_with(system, catalog, material, combo, arrangements, InfeasiblePolicy::Fail)
}

/// [`design_system`] with an explicit policy for members no section satisfies.
pub fn design_system_with(
    system: &BeamSystem,
    catalog: &SectionCatalog,
    material: &Material,
    combo: &LoadCombination,
    arrangements: &ArrangementSet,
    policy: InfeasiblePolicy,
) -> Result<DesignResult> {
    let m = system.member_count();
    if arrangements.is_empty() {
        return Err(Error::Invalid("arrangement set is empty".into()));
    }
    if catalog.is_empty() {
        return Err(Error::Invalid("catalog is empty".into()));
    }
    if m == 0 {
        return Err(Error::Invalid("system has no members".into()));
    }
    if let Some(a) = arrangements.iter().find(|a| a.len() != m) {
        return Err(Error::Invalid(format!("arrangement {a} does not have {m} members")));
    }

    let mut assignment = vec![0usize; m];
    let mut history: Vec<Vec<usize>> = Vec::new();
    let mut upward_only = false;
    for iteration in 1..=MAX_DESIGN_ITERATIONS {
        let designed = with_assignment(system, catalog, &assignment);
        let tables = response_tables(&designed, material)?;
        let (permanent, variable) = factored_components(&designed, combo);
        let mut next = Vec::with_capacity(m);
        for (d, table) in tables.iter().enumerate() {
            let pairs: Vec<(f64, f64)> = arrangements
                .iter()
                .flat_map(|a| station_forces(table, &permanent, &variable, a, 0..m))
                .collect();
            let from = if upward_only { assignment[d] } else { 0 };
            next.push(first_feasible(&pairs, catalog, material, from));
        }

        if next == assignment {
            let mut result = finish(designed, assignment, tables, arrangements, material, combo, iteration)?;
            if let Some((member, &u)) = result.utilisation.iter().enumerate().find(|(_, &u)| u > 1.0) {
                if policy == InfeasiblePolicy::Fail {
                    return Err(Error::NoFeasibleSection {
                        member,
                        utilisation: u,
                    });
                }
                return Ok(result);
            }
            if let Some(lighter) = step_down(system, catalog, material, combo, arrangements, &result.section_indices)? {
                let (designed, assignment, tables) = lighter;
                result = finish(designed, assignment, tables, arrangements, material, combo, iteration)?;
            }
            return Ok(result);
        }
        if upward_only {
            assignment = next;
            continue;
        }
        if let Some(start) = history.iter().position(|h| *h == next) {
            // Cycle: take each member's furthest section along the catalog
            // order, then only allow moves up from there.
            let mut top = next.clone();
            for state in history[start..].iter().chain(std::iter::once(&assignment)) {
                for (t, &c) in top.iter_mut().zip(state) {
                    *t = (*t).max(c);
                }
            }
            upward_only = true;
            assignment = top;
            continue;
        }
        history.push(assignment);
        assignment = next;
    }
    Err(Error::NonConvergence {
        iterations: MAX_DESIGN_ITERATIONS,
    })
}

/// Moves members one catalog entry down, one at a time with a full
/// re-analysis, as long as every member stays at u ≤ 1. Returns the final
/// state if any step was taken.
#[allow(clippy::type_complexity)]
fn step_down(
    system: &BeamSystem,
    catalog: &SectionCatalog,
    material: &Material,
    combo: &LoadCombination,
    arrangements: &ArrangementSet,
    start: &[usize],
) -> Result<Option<(BeamSystem, Vec<usize>, Vec<ResponseTable>)>> {
    let m = start.len();
    let mut assignment = start.to_vec();
    let mut accepted = None;
    loop {
        let mut moved = false;
        for d in 0..m {
            if assignment[d] == 0 {
                continue;
            }
            let mut trial = assignment.clone();
            trial[d] -= 1;
            let designed = with_assignment(system, catalog, &trial);
            let tables = response_tables(&designed, material)?;
            let (permanent, variable) = factored_components(&designed, combo);
            // Nearest members first: they are the likeliest to fail.
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by_key(|&i| (i.abs_diff(d), i));
            let feasible = order.into_iter().all(|i| {
                let r = resistances(&catalog.sections()[trial[i]], material, GAMMA_M0);
                governing(&tables[i], &permanent, &variable, arrangements, 0..m, &r).utilisation <= 1.0
            });
            if feasible {
                assignment = trial.clone();
                accepted = Some((designed, trial, tables));
                moved = true;
            }
        }
        if !moved {
            return Ok(accepted);
        }
    }
}

fn finish(
    system: BeamSystem,
    section_indices: Vec<usize>,
    tables: Vec<ResponseTable>,
    arrangements: &ArrangementSet,
    material: &Material,
    combo: &LoadCombination,
    iterations: usize,
) -> Result<DesignResult> {
    let m = system.member_count();
    let (permanent, variable) = factored_components(&system, combo);
    let mut utilisation = Vec::with_capacity(m);
    let mut governing_arrangement = Vec::with_capacity(m);
    let mut governing_station = Vec::with_capacity(m);
    for (d, table) in tables.iter().enumerate() {
        let r = resistances(system.section(d)?, material, GAMMA_M0);
        let g = governing(table, &permanent, &variable, arrangements, 0..m, &r);
        if g.utilisation.is_nan() || g.utilisation <= 0.0 {
            return Err(Error::Degenerate { member: d });
        }
        utilisation.push(g.utilisation);
        governing_arrangement.push(g.arrangement);
        governing_station.push(g.station);
    }
    let governing_bits = governing_arrangement
        .iter()
        .map(|&j| arrangements.arrangements()[j].clone())
        .collect();
    Ok(DesignResult {
        system,
        section_indices,
        utilisation,
        governing_arrangement,
        governing_bits,
        governing_station,
        iterations,
        tables,
    })
}

/// Per-member maximum utilisation over an explicit arrangement set.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    /// Index into the searched set of each member's worst arrangement.
    pub winners: Vec<usize>,
    pub utilisation: Vec<f64>,
}

/// Evaluates every arrangement of `candidates` (normally the naive set) on
/// a designed system and returns each member's worst one. Ties keep the
/// lowest index.
pub fn brute_force_critical(
    system: &BeamSystem,
    material: &Material,
    combo: &LoadCombination,
    candidates: &ArrangementSet,
) -> Result<BruteForceResult> {
    let m = system.member_count();
    if m > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            what: "member count for brute force",
            value: m,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let tables = response_tables(system, material)?;
    brute_force_with_tables(system, material, combo, candidates, &tables)
}

/// As [`brute_force_critical`], reusing already computed response tables.
pub fn brute_force_with_tables(
    system: &BeamSystem,
    material: &Material,
    combo: &LoadCombination,
    candidates: &ArrangementSet,
    tables: &[ResponseTable],
) -> Result<BruteForceResult> {
    let m = system.member_count();
    let (permanent, variable) = factored_components(system, combo);
    let mut winners = Vec::with_capacity(m);
    let mut utilisation = Vec::with_capacity(m);
    for (d, table) in tables.iter().enumerate() {
        let r = resistances(system.section(d)?, material, GAMMA_M0);
        let g = governing(table, &permanent, &variable, candidates, 0..m, &r);
        winners.push(g.arrangement);
        utilisation.push(g.utilisation);
    }
    Ok(BruteForceResult { winners, utilisation })
}
