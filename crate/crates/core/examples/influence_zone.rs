//! Captured-utilisation curves and influence zone sizes of every span of a
//! designed 15-span beam.
//!
//! cargo run --example influence_zone

use influence_zone::arrangements::critical_set_for;
use influence_zone::zone::{first_crossing_k, DEFAULT_EPS};
use influence_zone::{captured_curve, design_system, extract_k_max, BeamSystem, LoadCombination, Material, SectionCatalog};

fn main() -> influence_zone::Result<()> {
    let catalog = SectionCatalog::bundled();
    let material = Material::s355();
    let combo = LoadCombination::default();
    let spans = vec![7.0, 2.5, 11.0, 4.5, 9.0, 1.5, 6.0, 12.0, 3.0, 8.5, 5.0, 10.0, 2.0, 7.5, 6.0];
    let q = vec![55.0, 10.0, 30.0, 0.0, 45.0, 60.0, 20.0, 5.0, 35.0, 50.0, 15.0, 40.0, 25.0, 60.0, 10.0];
    let system = BeamSystem::new(spans, vec![3.0; 15], q);
    let set = critical_set_for(&system, &material, &catalog)?;
    let design = design_system(&system, &catalog, &material, &combo, &set)?;

    println!("beam  u_true  k_max at ε = {:?}", DEFAULT_EPS);
    for d in 0..system.member_count() {
        let curve = captured_curve(&design.system, d, &design.tables[d], &set, &combo, &material)?;
        let ks: Vec<usize> = DEFAULT_EPS.iter().map(|&e| extract_k_max(&curve, e)).collect();
        println!("{d:4}  {:.3}   {ks:?}", curve.u_true);
    }

    let curve = captured_curve(&design.system, 7, &design.tables[7], &set, &combo, &material)?;
    let shown: Vec<String> = curve.ratios.iter().take(8).map(|r| format!("{r:.3}")).collect();
    println!("\nbeam 7 ratio u_cap/u_true for k = 0..7: {}", shown.join(" "));
    println!(
        "at ε = 0.5%: suffix rule k_max = {}, first crossing k = {}",
        extract_k_max(&curve, 0.005),
        first_crossing_k(&curve, 0.005)
    );
    Ok(())
}
