//! Generate a design data set, run the zone study and print the k_max
//! statistics table.
//!
//! cargo run --release --example dataset_study -- [SET] [DRAWS] [SEED]
//! (defaults: set 2, 8 x 8 draws, seed 0; set 1 always uses its full grid)

use influence_zone::dataset::{generate, run_study, DesignSetConfig, StudyContext};
use influence_zone::zone::DEFAULT_EPS;
use influence_zone::{zone_statistics, LoadCombination, Material, SectionCatalog};

fn main() -> influence_zone::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: u64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default);
    let (set, draws, seed) = (arg(0, 2) as u32, arg(1, 8) as usize, arg(2, 0));

    let config = DesignSetConfig::standard(set, seed)?.with_samples(draws, draws);
    let systems = generate(&config)?;
    let catalog = SectionCatalog::bundled();
    let ctx = StudyContext {
        catalog: &catalog,
        material: Material::s355(),
        combo: LoadCombination::default(),
        eps: DEFAULT_EPS.to_vec(),
        checkpoint: None,
    };
    let study = run_study(&systems, &ctx)?;
    let summary = zone_statistics(&study.zones(), &DEFAULT_EPS)?;
    println!(
        "set {set}: {} systems, {} skipped",
        systems.len(),
        study.failures().len()
    );
    println!("{:>8} {:>6} {:>4} {:>5}  histogram", "eps", "mean", "max", "mode");
    for row in &summary.rows {
        println!(
            "{:>7}% {:>6.2} {:>4} {:>5}  {:?}",
            row.eps * 100.0,
            row.mean,
            row.max,
            row.mode(),
            row.histogram
        );
    }
    Ok(())
}
