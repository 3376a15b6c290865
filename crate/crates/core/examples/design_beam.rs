//! Size every span of a continuous beam for minimum depth against its
//! critical load arrangements.
//!
//! cargo run --example design_beam

use influence_zone::arrangements::critical_set_for;
use influence_zone::{design_system, BeamSystem, LoadCombination, Material, SectionCatalog};

fn main() -> influence_zone::Result<()> {
    let catalog = SectionCatalog::bundled();
    let material = Material::s355();
    let combo = LoadCombination::default();
    let system = BeamSystem::new(
        vec![4.0, 8.0, 2.0, 9.5, 5.0, 6.0],
        vec![3.0; 6],
        vec![15.0, 40.0, 60.0, 25.0, 50.0, 10.0],
    );
    let set = critical_set_for(&system, &material, &catalog)?;
    let design = design_system(&system, &catalog, &material, &combo, &set)?;
    println!("{} arrangements, {} analysis passes", set.len(), design.iterations);
    for (i, section) in design.sections().iter().enumerate() {
        println!(
            "span {i}: {:>5.1} m  {:<18} u = {:.3}  governed by {} at station {}",
            system.spans[i],
            section.designation,
            design.utilisation[i],
            design.governing_bits[i],
            design.governing_station[i]
        );
    }
    println!("\n{}", serde_json::to_string_pretty(&design.to_document())?);
    Ok(())
}
