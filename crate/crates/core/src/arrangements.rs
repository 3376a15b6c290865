//! Critical load arrangement sets.
//!
//! * flexural: the 2m alternating and adjacent patterns plus their complements;
//! * shear: adjacent patterns transformed outward from the loaded pair wherever
//!   members short enough to reverse the moment carry-over occur;
//! * critical: flexural ∪ shear;
//! * naive: all 2^m patterns, ordered critical-first for plotting.

use std::collections::HashMap;
use std::fmt;

use crate::catalog::SectionCatalog;
use crate::error::{Error, Result};
use crate::model::{BeamSystem, LoadArrangement, Material};

/// Largest member count accepted by [`naive_set`].
pub const NAIVE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetKind {
    Flexural,
    Shear,
    Critical,
    Naive,
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetKind::Flexural => "flexural",
            SetKind::Shear => "shear",
            SetKind::Critical => "critical",
            SetKind::Naive => "naive",
        })
    }
}

/// Ordered, duplicate-free list of arrangements.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrangementSet {
    kind: SetKind,
    arrangements: Vec<LoadArrangement>,
    positions: HashMap<LoadArrangement, usize>,
}

impl ArrangementSet {
    /// Builds a set keeping the first occurrence of every pattern.
    pub fn new(kind: SetKind, items: impl IntoIterator<Item = LoadArrangement>) -> Self {
        let mut set = Self {
            kind,
            arrangements: Vec::new(),
            positions: HashMap::new(),
        };
        for a in items {
            set.push(a);
        }
        set
    }

    fn push(&mut self, a: LoadArrangement) -> bool {
        if self.positions.contains_key(&a) {
            return false;
        }
        self.positions.insert(a.clone(), self.arrangements.len());
        self.arrangements.push(a);
        true
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.arrangements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrangements.is_empty()
    }

    pub fn arrangements(&self) -> &[LoadArrangement] {
        &self.arrangements
    }

    pub fn get(&self, index: usize) -> Option<&LoadArrangement> {
        self.arrangements.get(index)
    }

    pub fn contains(&self, a: &LoadArrangement) -> bool {
        self.positions.contains_key(a)
    }

    pub fn position(&self, a: &LoadArrangement) -> Option<usize> {
        self.positions.get(a).copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LoadArrangement> {
        self.arrangements.iter()
    }

    /// `index,kind,bits` rows.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["index", "kind", "bits"])?;
        for (i, a) in self.arrangements.iter().enumerate() {
            wtr.write_record([i.to_string(), self.kind.to_string(), a.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

impl<'a> IntoIterator for &'a ArrangementSet {
    type Item = &'a LoadArrangement;
    type IntoIter = std::slice::Iter<'a, LoadArrangement>;

    fn into_iter(self) -> Self::IntoIter {
        self.arrangements.iter()
    }
}

/// Alternating pattern starting loaded at member 0.
fn alternating(m: usize) -> LoadArrangement {
    LoadArrangement::new((0..m).map(|i| i % 2 == 0).collect())
}

/// Members `pair` and `pair + 1` loaded, alternating outward with unloaded
/// members next to the pair.
fn adjacent(m: usize, pair: usize) -> LoadArrangement {
    LoadArrangement::new(
        (0..m)
            .map(|j| {
                if j <= pair {
                    (pair - j).is_multiple_of(2)
                } else {
                    (j - pair - 1).is_multiple_of(2)
                }
            })
            .collect(),
    )
}

/// The 2m flexural arrangements: alternating and adjacent patterns followed
/// by their complements.
pub fn flexural_set(m: usize) -> Result<ArrangementSet> {
    if m == 0 {
        return Err(Error::Invalid("member count must be at least 1".into()));
    }
    let mut positive = vec![alternating(m)];
    positive.extend((0..m.saturating_sub(1)).map(|pair| adjacent(m, pair)));
    let negative: Vec<_> = positive.iter().map(LoadArrangement::complement).collect();
    Ok(ArrangementSet::new(SetKind::Flexural, positive.into_iter().chain(negative)))
}

/// Index `i` of the single pair `a[i] == a[i+1]`, if `a` is an adjacent-type pattern.
pub fn adjacent_pair(a: &LoadArrangement) -> Option<usize> {
    let bits = a.activation();
    let mut pairs = bits.windows(2).enumerate().filter(|(_, w)| w[0] == w[1]).map(|(i, _)| i);
    match (pairs.next(), pairs.next()) {
        (Some(i), None) => Some(i),
        _ => None,
    }
}

/// Span limit below which a member may reverse the polarity of its outward
/// neighbours: √(6·(E/G)·(I/A_z)).
pub fn shear_span_limit(modulus_ratio: f64, inertia_shear_ratio: f64) -> f64 {
    (6.0 * modulus_ratio * inertia_shear_ratio).sqrt()
}

/// Members shorter than the catalog-wide shear span limit.
pub fn shear_susceptible(system: &BeamSystem, material: &Material, catalog: &SectionCatalog) -> Vec<usize> {
    let limit = shear_span_limit(material.modulus_ratio(), catalog.max_inertia_shear_ratio());
    susceptible_below(system, limit)
}

/// Members with span strictly below `limit`.
pub fn susceptible_below(system: &BeamSystem, limit: f64) -> Vec<usize> {
    system
        .spans
        .iter()
        .enumerate()
        .filter(|(_, &l)| l < limit)
        .map(|(i, _)| i)
        .collect()
}

/// Walks outward from `start` in both directions. After the first shear beam
/// is met its activation is copied through any run of shear beams; beyond the
/// run the pattern alternates from the last copied member, re-arming whenever
/// another shear beam is met.
pub fn shear_transform(arrangement: &LoadArrangement, shear_beams: &[usize], start: usize) -> Result<LoadArrangement> {
    let m = arrangement.len();
    if start >= m {
        return Err(Error::IndexOutOfRange { index: start, len: m });
    }
    let mut is_shear = vec![false; m];
    for &s in shear_beams {
        if s >= m {
            return Err(Error::IndexOutOfRange { index: s, len: m });
        }
        is_shear[s] = true;
    }
    let mut out = arrangement.clone();
    for direction in [-1isize, 1] {
        let mut updating = false;
        let mut finishing = false;
        let mut carried = false;
        let mut i = start as isize;
        loop {
            i += direction;
            if i < 0 || i >= m as isize {
                break;
            }
            let idx = i as usize;
            if !updating && !finishing {
                if is_shear[idx] {
                    updating = true;
                    carried = out.is_active(idx);
                }
            } else if updating {
                out.set(idx, carried);
                if !is_shear[idx] {
                    updating = false;
                    finishing = true;
                }
            } else {
                let previous = (i - direction) as usize;
                let value = !out.is_active(previous);
                out.set(idx, value);
                if is_shear[idx] {
                    carried = value;
                    updating = true;
                    finishing = false;
                }
            }
        }
    }
    Ok(out)
}

/// Which (arrangement, start) pairs are fed to [`shear_transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShearSweep {
    /// Adjacent patterns only, starting at the left member of the equal pair.
    #[default]
    AdjacentLeftStart,
    /// Every flexural pattern with every start index.
    AllStarts,
}

/// Shear set together with how many raw transforms produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearSetReport {
    pub set: ArrangementSet,
    pub raw_outputs: usize,
}

impl ShearSetReport {
    /// Unique new arrangements per raw transform output.
    pub fn efficiency(&self) -> Option<f64> {
        (self.raw_outputs > 0).then(|| self.set.len() as f64 / self.raw_outputs as f64)
    }
}

/// Upper bound 2(m−1)(2ⁿ−1) on the shear set size.
pub fn shear_set_bound(m: usize, n: usize) -> usize {
    2 * m.saturating_sub(1) * ((1usize << n) - 1)
}

pub fn shear_set(m: usize, flexural: &ArrangementSet, shear_beams: &[usize]) -> Result<ArrangementSet> {
    Ok(shear_set_with(m, flexural, shear_beams, ShearSweep::AdjacentLeftStart)?.set)
}

pub fn shear_set_with(
    m: usize,
    flexural: &ArrangementSet,
    shear_beams: &[usize],
    sweep: ShearSweep,
) -> Result<ShearSetReport> {
    if shear_beams.len() > 30 {
        return Err(Error::TooLarge {
            what: "shear beam count",
            value: shear_beams.len(),
            limit: 30,
        });
    }
    let mut set = ArrangementSet::new(SetKind::Shear, []);
    let mut raw_outputs = 0;
    if shear_beams.is_empty() {
        return Ok(ShearSetReport { set, raw_outputs });
    }
    let inputs: Vec<(&LoadArrangement, usize)> = match sweep {
        ShearSweep::AdjacentLeftStart => flexural
            .iter()
            .filter_map(|a| adjacent_pair(a).map(|pair| (a, pair)))
            .collect(),
        ShearSweep::AllStarts => flexural
            .iter()
            .flat_map(|a| (0..m).map(move |start| (a, start)))
            .collect(),
    };
    let n = shear_beams.len();
    for (arrangement, start) in inputs {
        if arrangement.len() != m {
            return Err(Error::Invalid(format!(
                "arrangement {arrangement} does not have {m} members"
            )));
        }
        for mask in 1u64..(1u64 << n) {
            let subset: Vec<usize> = (0..n)
                .filter(|&b| mask >> b & 1 == 1)
                .map(|b| shear_beams[b])
                .collect();
            let out = shear_transform(arrangement, &subset, start)?;
            raw_outputs += 1;
            if !flexural.contains(&out) {
                set.push(out);
            }
        }
    }
    Ok(ShearSetReport { set, raw_outputs })
}

/// Flexural arrangements first, then shear arrangements not already present.
pub fn critical_set(flexural: &ArrangementSet, shear: &ArrangementSet) -> ArrangementSet {
    ArrangementSet::new(
        SetKind::Critical,
        flexural.iter().chain(shear.iter()).cloned(),
    )
}

/// Critical set of `system`, with shear-susceptible members taken from the
/// catalog-wide span limit.
pub fn critical_set_for(system: &BeamSystem, material: &Material, catalog: &SectionCatalog) -> Result<ArrangementSet> {
    let m = system.member_count();
    let flex = flexural_set(m)?;
    let shear = shear_set(m, &flex, &shear_susceptible(system, material, catalog))?;
    Ok(critical_set(&flex, &shear))
}

/// All 2^m arrangements, flexural ones first.
pub fn naive_set(m: usize) -> Result<ArrangementSet> {
    naive_set_after(m, &flexural_set(m)?)
}

/// All 2^m arrangements with `leading` first (in its order), then the rest in
/// ascending binary code.
pub fn naive_set_after(m: usize, leading: &ArrangementSet) -> Result<ArrangementSet> {
    if m > NAIVE_LIMIT {
        return Err(Error::TooLarge {
            what: "member count for the naive set",
            value: m,
            limit: NAIVE_LIMIT,
        });
    }
    if m == 0 {
        return Err(Error::Invalid("member count must be at least 1".into()));
    }
    let rest = (0..1u64 << m).map(|code| LoadArrangement::from_code(code, m));
    Ok(ArrangementSet::new(
        SetKind::Naive,
        leading.iter().cloned().chain(rest),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> LoadArrangement {
        LoadArrangement::parse(s).unwrap()
    }

    fn strings(set: &ArrangementSet) -> Vec<String> {
        set.iter().map(|a| a.to_string()).collect()
    }

    #[test]
    fn flexural_single_member() {
        assert_eq!(strings(&flexural_set(1).unwrap()), ["1", "0"]);
    }

    #[test]
    fn flexural_three_members_matches_trace() {
        assert_eq!(
            strings(&flexural_set(3).unwrap()),
            ["101", "110", "011", "010", "001", "100"]
        );
    }

    #[test]
    fn flexural_five_members_groups() {
        let set = flexural_set(5).unwrap();
        assert_eq!(set.len(), 10);
        assert_eq!(
            strings(&set)[..5],
            ["10101", "11010", "01101", "10110", "01011"]
        );
        assert!(flexural_set(0).is_err());
    }

    #[test]
    fn even_member_alternating() {
        let set = flexural_set(4).unwrap();
        assert_eq!(strings(&set), ["1010", "1101", "0110", "1011", "0101", "0010", "1001", "0100"]);
    }

    #[test]
    fn shear_transform_traces() {
        let out = shear_transform(&bits("01101"), &[3], 1).unwrap();
        assert_eq!(out.to_string(), "01100");
        let out = shear_transform(&bits("01011"), &[1], 3).unwrap();
        assert_eq!(out.to_string(), "11011");
    }

    #[test]
    fn shear_transform_without_shear_beams_is_identity() {
        let a = bits("0110101");
        assert_eq!(shear_transform(&a, &[], 2).unwrap(), a);
        assert!(shear_transform(&a, &[], 7).is_err());
        assert!(shear_transform(&a, &[9], 0).is_err());
    }

    #[test]
    fn shear_transform_runs_of_shear_beams() {
        // copy through 3 and 4, then alternate from 4 onward; 6 re-arms.
        let out = shear_transform(&bits("1101010101"), &[3, 4, 6], 0).unwrap();
        // left: nothing. right: 2 plain, 3 shear -> carried = a[3] = 1,
        // 4 <- 1 (shear, keep updating), 5 <- 1 (plain, finish),
        // 6 <- !a[5] = 0 (shear, re-arm carried 0), 7 <- 0, 8 <- !0 = 1, 9 <- 0
        assert_eq!(out.to_string(), "1101110010");
    }

    #[test]
    fn adjacent_pairs_are_detected() {
        assert_eq!(adjacent_pair(&bits("01101")), Some(1));
        assert_eq!(adjacent_pair(&bits("10010")), Some(1));
        assert_eq!(adjacent_pair(&bits("10101")), None);
        assert_eq!(adjacent_pair(&bits("11011")), None);
    }

    #[test]
    fn shear_set_is_bounded_and_excludes_flexural() {
        let m = 10;
        let flex = flexural_set(m).unwrap();
        for n in 0..=4 {
            let beams: Vec<usize> = [2, 5, 7, 8][..n].to_vec();
            let shear = shear_set(m, &flex, &beams).unwrap();
            assert!(shear.len() <= shear_set_bound(m, n));
            assert!(shear.iter().all(|a| !flex.contains(a)));
            let crit = critical_set(&flex, &shear);
            assert_eq!(crit.len(), flex.len() + shear.len());
        }
        assert!(shear_set(m, &flex, &[]).unwrap().is_empty());
    }

    #[test]
    fn single_shear_beam_bound_is_eighteen_for_ten_members() {
        let flex = flexural_set(10).unwrap();
        let shear = shear_set(10, &flex, &[4]).unwrap();
        assert!(shear.len() <= 18);
        assert!(!shear.is_empty());
    }

    #[test]
    fn full_sweep_contains_reduced_sweep() {
        let m = 7;
        let flex = flexural_set(m).unwrap();
        let reduced = shear_set_with(m, &flex, &[2, 4], ShearSweep::AdjacentLeftStart).unwrap();
        let full = shear_set_with(m, &flex, &[2, 4], ShearSweep::AllStarts).unwrap();
        assert!(reduced.set.iter().all(|a| full.set.contains(a)));
        assert!(full.raw_outputs > reduced.raw_outputs);
        let eff = reduced.efficiency().unwrap();
        assert!(eff > 0.0 && eff <= 1.0);
    }

    #[test]
    fn naive_sets() {
        assert_eq!(naive_set(3).unwrap().len(), 8);
        assert_eq!(naive_set(10).unwrap().len(), 1024);
        let one = naive_set(1).unwrap();
        assert_eq!(strings(&one), ["1", "0"]);
        assert!(naive_set(21).is_err());
        let flex = flexural_set(6).unwrap();
        let naive = naive_set(6).unwrap();
        for (i, a) in flex.iter().enumerate() {
            assert_eq!(naive.position(a), Some(i));
        }
    }

    #[test]
    fn shear_span_limit_value() {
        let l = shear_span_limit(2.6, 0.397);
        assert!((l - 2.49).abs() < 0.01);
        let sys = BeamSystem::new(vec![2.0, 3.0, 6.0], vec![0.0; 3], vec![0.0; 3]);
        assert_eq!(susceptible_below(&sys, l), vec![0]);
        let long = BeamSystem::uniform(4, 3.0, 0.0, 0.0);
        assert!(susceptible_below(&long, l).is_empty());
    }

    #[test]
    fn csv_export() {
        let mut buf = Vec::new();
        flexural_set(2).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "index,kind,bits\n0,flexural,10\n1,flexural,11\n2,flexural,01\n3,flexural,00\n");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn flexural_size_and_complement_closure(m in 1usize..=12) {
                let set = flexural_set(m).unwrap();
                prop_assert_eq!(set.len(), 2 * m);
                for a in &set {
                    prop_assert!(set.contains(&a.complement()));
                }
            }

            #[test]
            fn shear_transform_is_pure(
                code in 0u64..1024, start in 0usize..10,
                beams in proptest::collection::btree_set(0usize..10, 0..4),
            ) {
                let a = LoadArrangement::from_code(code, 10);
                let before = a.clone();
                let beams: Vec<usize> = beams.into_iter().collect();
                let first = shear_transform(&a, &beams, start).unwrap();
                let second = shear_transform(&a, &beams, start).unwrap();
                prop_assert_eq!(&a, &before);
                prop_assert_eq!(first, second);
            }
        }
    }
}
