//! Brute-force check that the worst of all 2^m arrangements is always in the
//! critical set, on heavily loaded 10-span beams.
//!
//! cargo run --release --example containment -- [DRAWS] [SEED]

use influence_zone::dataset::{validate_containment, DesignSetConfig};
use influence_zone::{LoadCombination, Material, SectionCatalog};

fn main() -> influence_zone::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let draws = args.first().copied().unwrap_or(4) as usize;
    let seed = args.get(1).copied().unwrap_or(0);
    let config = DesignSetConfig::stress_test(seed).with_samples(draws, draws);
    let report = validate_containment(&config, &SectionCatalog::bundled(), &Material::s355(), &LoadCombination::default())?;

    println!(
        "{} beams: {} violations, {} governed by a shear arrangement",
        report.beams(),
        report.violations(),
        report.outside_flexural()
    );
    let mut by_count = std::collections::BTreeMap::new();
    for row in &report.rows {
        let e = by_count.entry(row.shear_count).or_insert((0usize, 0usize, 0usize));
        e.0 += 1;
        e.1 = e.1.max(row.winner_index);
        e.2 = e.2.max(row.critical_size);
    }
    println!("shear beams  beams  highest winner index  largest critical set");
    for (n, (beams, winner, crit)) in by_count {
        println!("{n:11}  {beams:5}  {winner:20}  {crit:20}");
    }
    let inc = report.shear_increases();
    if !inc.is_empty() {
        let mean = inc.iter().sum::<f64>() / inc.len() as f64;
        println!("mean utilisation increase over the best flexural arrangement: {:.2}%", 100.0 * mean);
    }
    Ok(())
}
