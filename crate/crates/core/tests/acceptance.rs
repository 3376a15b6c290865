//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use influence_zone::arrangements::{
    critical_set, flexural_set, naive_set, shear_set, shear_set_bound, shear_span_limit, shear_susceptible,
};
use influence_zone::dataset::{
    generate, run_study, validate_containment, DesignSetConfig, StudyContext, StudyOutput,
};
use influence_zone::design::brute_force_critical;
use influence_zone::solver::{fixed_end_forces, BeamModel, LoadCase};
use influence_zone::zone::{extract_k_max, first_crossing_k, CapturedCurve, ZoneResult, DEFAULT_EPS};
use influence_zone::{solve, zone_statistics, BeamSystem, LoadCombination, Material, SectionCatalog};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn context(catalog: &SectionCatalog) -> StudyContext<'_> {
    StudyContext {
        catalog,
        material: Material::s355(),
        combo: LoadCombination::default(),
        eps: DEFAULT_EPS.to_vec(),
        checkpoint: None,
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

fn set_sizes() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();
    for m in 1..=12 {
        let flex = flexural_set(m).unwrap();
        if flex.len() != 2 * m {
            problems.push(format!("|J_flex({m})| = {}", flex.len()));
        }
        let naive = naive_set(m).unwrap();
        if naive.len() != 1 << m {
            problems.push(format!("|J_naive({m})| = {}", naive.len()));
        }
    }
    let m = 10;
    let flex = flexural_set(m).unwrap();
    let bounds = [20, 38, 74, 146, 290];
    let mut largest = [0usize; 5];
    for n in 0..=4 {
        for beams in combinations(m, n) {
            let shear = shear_set(m, &flex, &beams).unwrap();
            let crit = critical_set(&flex, &shear);
            if shear.len() > shear_set_bound(m, n) || shear_set_bound(m, n) != 2 * (m - 1) * ((1 << n) - 1) {
                problems.push(format!("|J_shear| = {} for {beams:?}", shear.len()));
            }
            if crit.len() > bounds[n] {
                problems.push(format!("|J_crit| = {} for {beams:?}", crit.len()));
            }
            largest[n] = largest[n].max(crit.len());
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(1) {
        problems.push(format!("took {elapsed:?}"));
    }
    outcome(
        problems.is_empty(),
        format!(
            "|J_flex| = 2m, |J_naive| = 2^m for m = 1..12; m = 10 largest |J_crit| by n = {largest:?} within {bounds:?}; {elapsed:.2?} {}",
            problems.join(", ")
        ),
    )
}

fn containment(catalog: &SectionCatalog) -> Outcome {
    let start = Instant::now();
    let config = DesignSetConfig::stress_test(0).with_samples(8, 8);
    let report = validate_containment(&config, catalog, &Material::s355(), &LoadCombination::default()).unwrap();
    let elapsed = start.elapsed();
    let increases = report.shear_increases();
    let mean_increase = increases.iter().sum::<f64>() / increases.len().max(1) as f64;
    outcome(
        report.beams() == 640 && report.violations() == 0 && elapsed < Duration::from_secs(600),
        format!(
            "{} beams, {} violations, {} winners outside J_flex (mean increase {:.1}%), {} beams above u = 1; {elapsed:.2?}",
            report.beams(),
            report.violations(),
            report.outside_flexural(),
            100.0 * mean_increase,
            report.infeasible(),
        ),
    )
}

fn winners_outside_flexural(system: &BeamSystem) -> usize {
    let naive = naive_set(system.member_count()).unwrap();
    let bf = brute_force_critical(system, &Material::s355(), &LoadCombination::default(), &naive).unwrap();
    bf.winners.iter().filter(|&&w| w >= 2 * system.member_count()).count()
}

fn shear_threshold(catalog: &SectionCatalog) -> Outcome {
    let limit = shear_span_limit(2.600, 0.397);
    let material = Material::s355();
    let from_catalog = shear_span_limit(material.modulus_ratio(), catalog.max_inertia_shear_ratio());
    let deep = catalog.get("UKB 914x419x388").unwrap();
    let short = BeamSystem::new(vec![6.0, 6.0, 2.0, 6.0, 6.0], vec![3.0; 5], vec![40.0; 5]).with_section_everywhere(deep);
    let regular = BeamSystem::uniform(5, 3.0, 3.0, 40.0).with_section_everywhere(deep);
    let short_out = winners_outside_flexural(&short);
    let regular_out = winners_outside_flexural(&regular);
    let susceptible = shear_susceptible(&short, &material, catalog);
    outcome(
        (limit - 2.49).abs() <= 0.01 && short_out > 0 && regular_out == 0,
        format!(
            "L_shear = {limit:.3} m (bundled catalog {from_catalog:.3} m); 2.0 m span system: {short_out} winners outside J_flex, shear beams {susceptible:?}; all-3.0 m system: {regular_out}"
        ),
    )
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn solver_properties(catalog: &SectionCatalog) -> Outcome {
    let material = Material::s355();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut betti: f64 = 0.0;
    for _ in 0..100 {
        let m = rng.random_range(1..=6);
        let spans: Vec<f64> = (0..m).map(|_| rng.random_range(1.0..12.0)).collect();
        let sections = (0..m)
            .map(|_| catalog.sections()[rng.random_range(0..catalog.len())].clone())
            .collect();
        let system = BeamSystem::new(spans, vec![0.0; m], vec![0.0; m]).with_sections(sections);
        let (ei, gaz) = influence_zone::solver::member_rigidities(&system, &material).unwrap();
        let model = BeamModel::subdivided(&system.spans, &ei, &gaz, 3);
        let free: Vec<usize> = (0..2 * model.positions.len())
            .filter(|&dof| dof % 2 == 1 || !model.supported[dof / 2])
            .collect();
        let columns: Vec<Vec<f64>> = free
            .iter()
            .map(|&dof| {
                let mut case = LoadCase::zeros(&model);
                if dof.is_multiple_of(2) {
                    case.nodal[dof / 2].0 = 1.0;
                } else {
                    case.nodal[dof / 2].1 = 1.0;
                }
                model.solve(&case).unwrap().displacements
            })
            .collect();
        for (ia, &a) in free.iter().enumerate() {
            for (ib, &b) in free.iter().enumerate() {
                let scale = (columns[ia][a] * columns[ib][b]).sqrt();
                betti = betti.max((columns[ib][a] - columns[ia][b]).abs() / scale);
            }
        }
    }

    let mut euler: f64 = 0.0;
    for _ in 0..50 {
        let m = rng.random_range(2..=8);
        let spans: Vec<f64> = (0..m).map(|_| rng.random_range(1.0..12.0)).collect();
        let ei: Vec<f64> = (0..m).map(|_| rng.random_range(1e4..1e6)).collect();
        let w: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..50.0)).collect();
        let model = BeamModel::continuous(&spans, &ei, &vec![1e14; m]);
        let mut case = LoadCase::zeros(&model);
        case.element_udl.clone_from(&w);
        let sol = model.solve(&case).unwrap();
        let oracle = common::three_moment(&spans, &ei, &w);
        let scale = oracle.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        for k in 1..m {
            euler = euler.max((sol.moment(k - 1, 1.0) - oracle[k]).abs() / scale);
        }
    }

    let mut determinate: f64 = 0.0;
    for section in catalog.sections() {
        for &(l, w) in &[(6.0, 1.0), (1.0, 37.5), (11.5, 0.3)] {
            let system = BeamSystem::uniform(1, l, 0.0, 0.0).with_section_everywhere(section);
            let m = solve(&system, &material, &[w]).unwrap().moment(0, 0.5);
            determinate = determinate.max(relative(m, w * l * l / 8.0));
        }
    }

    let mut fixed_end: f64 = 0.0;
    for &phi in &[0.0, 0.1, 1.0, 2.0, 5.0, 12.0] {
        let (l, ei, w) = (4.0, 1e4, 3.0);
        let expected = w * l * l / 12.0;
        let f = fixed_end_forces(w, l, phi).unwrap();
        fixed_end = fixed_end.max(relative(f[1], expected)).max(relative(-f[3], expected));
        // Independent check: the central span of a long uniform beam is clamped by symmetry.
        let gaz = if phi == 0.0 { f64::INFINITY } else { 12.0 * ei / (phi * l * l) };
        let model = BeamModel::continuous(&[l; 61], &[ei; 61], &[gaz; 61]);
        let mut case = LoadCase::zeros(&model);
        case.element_udl = vec![w; 61];
        let sol = model.solve(&case).unwrap();
        fixed_end = fixed_end.max(relative(-sol.moment(30, 0.0), expected));
    }

    outcome(
        betti <= 1e-9 && euler <= 1e-6 && determinate <= 1e-12 && fixed_end <= 1e-12,
        format!(
            "Betti {betti:.1e} (100 systems), Euler limit {euler:.1e}, wL²/8 {determinate:.1e}, wL²/12 over Φ ∈ [0, 12] {fixed_end:.1e}"
        ),
    )
}

fn suffix_rule(set4: &[ZoneResult]) -> Outcome {
    // k = 0 ratio first; the oscillating values belong to k = 1, 2, 3.
    let mut ratios = vec![0.55, 1.89, 0.942, 0.998];
    ratios.extend([1.0; 12]);
    let k = extract_k_max(&CapturedCurve::from_ratios(0, ratios), 0.005);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ordered = true;
    for _ in 0..1000 {
        let n = rng.random_range(1..=16);
        let mut r: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.5)).collect();
        r.push(1.0);
        let curve = CapturedCurve::from_ratios(0, r);
        let eps = rng.random_range(0.0005..0.6);
        ordered &= first_crossing_k(&curve, eps) <= extract_k_max(&curve, eps);
    }

    let mut witnesses = 0;
    for z in set4 {
        let curve = CapturedCurve::from_ratios(z.beam_index, z.ratios.clone());
        for &eps in &z.eps {
            if first_crossing_k(&curve, eps) < extract_k_max(&curve, eps) {
                witnesses += 1;
            }
        }
    }
    outcome(
        k == 3 && ordered && witnesses > 0,
        format!(
            "oscillating curve k_max = {k}; first crossing ≤ suffix on 1000 random curves: {ordered}; strict on {witnesses} (beam, ε) pairs of scaled set 4"
        ),
    )
}

fn set_one(summary_rows: &influence_zone::zone::ZoneSummary, skipped: usize, elapsed: Duration) -> Outcome {
    let targets = [(0.005, 2.89, 4usize), (0.05, 1.52, 2), (0.10, 0.98, 2)];
    let mut pass = elapsed < Duration::from_secs(1800);
    let mut parts = Vec::new();
    for (eps, mean, max) in targets {
        let row = summary_rows.row(eps).unwrap();
        pass &= (row.mean - mean).abs() <= 0.5 && row.max.abs_diff(max) <= 1;
        parts.push(format!("ε {}%: mean {:.2} max {}", eps * 100.0, row.mean, row.max));
    }
    let last = summary_rows.row(0.5).unwrap();
    pass &= last.mean == 0.0 && last.max == 0;
    parts.push(format!("ε 50%: mean {:.2} max {}", last.mean, last.max));
    outcome(
        pass,
        format!("{}; {} beams, {skipped} systems skipped; {elapsed:.0?}", parts.join(", "), last.count),
    )
}

fn distribution(set2: &[ZoneResult]) -> Outcome {
    let s = zone_statistics(set2, &DEFAULT_EPS).unwrap();
    let row = s.row(0.005).unwrap();
    let at_most_3 = row.fraction_at_most(3);
    outcome(
        row.count == 960 && row.mode() == 3 && at_most_3 >= 0.5,
        format!(
            "{} beams, mode {}, {:.1}% with k_max ≤ 3, histogram {:?}",
            row.count,
            row.mode(),
            100.0 * at_most_3,
            row.histogram
        ),
    )
}

fn monotonicity(all: &[&StudyOutput]) -> Outcome {
    let mut beams = 0;
    let mut worst_end: f64 = 0.0;
    let mut increasing = 0;
    for out in all {
        for o in &out.outcomes {
            for z in &o.zones {
                beams += 1;
                worst_end = worst_end.max((z.ratios.last().unwrap() - 1.0).abs());
                let mut pairs: Vec<(f64, usize)> = z.eps.iter().copied().zip(z.k_max.iter().copied()).collect();
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                increasing += pairs.windows(2).filter(|w| w[1].1 > w[0].1).count();
            }
        }
    }
    outcome(
        increasing == 0 && worst_end <= 1e-12,
        format!("{beams} beams: {increasing} k_max increases with ε, max |ratio(m) − 1| = {worst_end:.1e}"),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_iz"))
        .args(args)
        .current_dir(dir)
        .env_remove("IZ_CATALOG")
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn cli_session(dir: &Path) -> bool {
    std::fs::write(
        dir.join("system.json"),
        r#"{"spans":[5.0,2.0,6.5,4.0],"permanent_udl":[3.0,3.0,3.0,3.0],"variable_udl":[20.0,35.0,10.0,40.0],
            "sections":["UKB 356x171x67","UKB 356x171x67","UKB 406x178x74","UKB 305x165x54"]}"#,
    )
    .unwrap();
    let steps: [&[&str]; 9] = [
        &["analyze", "system.json", "--arrangement", "1011", "--out", "analyze"],
        &["arrangements", "system.json", "--out", "arrangements"],
        &["design", "system.json", "--out", "design"],
        &["dataset", "--set", "4", "--seed", "21", "--samples", "2x2", "--out", "data"],
        &["zone", "data", "--out", "zone", "--checkpoint", "ckpt"],
        &["zone", "system.json", "--out", "zone_single", "--eps", "0.5%,5%"],
        &["stats", "zone/results.csv", "--out", "stats"],
        &["validate", "--seed", "3", "--samples", "2x2", "--out", "validate"],
        &["dataset", "--set", "1", "--out", "set1"],
    ];
    steps.iter().all(|args| run_cli(dir, args))
}

fn collect_outputs(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().unwrap() != "manifest.json" {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ok = cli_session(a.path()) && cli_session(b.path());
    let (fa, fb) = (collect_outputs(a.path()), collect_outputs(b.path()));
    let csvs = fa.iter().filter(|(n, _)| n.ends_with(".csv")).count();
    outcome(
        ok && fa == fb && csvs > 0,
        format!(
            "all 7 commands ran twice: {ok}; {} files ({csvs} CSV) compared, identical: {}",
            fa.len(),
            fa == fb
        ),
    )
}

fn main() {
    let catalog = SectionCatalog::bundled();
    let ctx = context(&catalog);
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |n: u32, name: &'static str, o: Outcome| {
        println!("{} criterion {n} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, name, o));
    };

    report(1, "set sizes", set_sizes());
    report(2, "containment", containment(&catalog));
    report(3, "shear span threshold", shear_threshold(&catalog));
    report(4, "solver properties", solver_properties(&catalog));

    let set4 = run_study(
        &generate(&DesignSetConfig::standard(4, 0).unwrap().with_samples(8, 8)).unwrap(),
        &ctx,
    )
    .unwrap();
    report(5, "suffix rule", suffix_rule(&set4.zones()));

    let start = Instant::now();
    let set1 = run_study(&generate(&DesignSetConfig::standard(1, 0).unwrap()).unwrap(), &ctx).unwrap();
    let elapsed = start.elapsed();
    let summary = zone_statistics(&set1.zones(), &DEFAULT_EPS).unwrap();
    report(6, "set 1 table", set_one(&summary, set1.failures().len(), elapsed));

    let set2 = run_study(
        &generate(&DesignSetConfig::standard(2, 0).unwrap().with_samples(8, 8)).unwrap(),
        &ctx,
    )
    .unwrap();
    report(7, "distribution shape", distribution(&set2.zones()));
    report(8, "monotonicity", monotonicity(&[&set1, &set2, &set4]));
    report(9, "determinism", determinism());

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria pass{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failing {failed:?}")
        }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
