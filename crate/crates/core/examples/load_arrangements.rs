//! Flexural, shear and critical load arrangements for a beam with two short
//! spans, compared with the naive 2^m enumeration.
//!
//! cargo run --example load_arrangements

use influence_zone::arrangements::{
    shear_set_bound, shear_set_with, shear_span_limit, shear_susceptible, ShearSweep,
};
use influence_zone::{critical_set, flexural_set, naive_set, shear_transform, BeamSystem, LoadArrangement, Material, SectionCatalog};

fn main() -> influence_zone::Result<()> {
    let catalog = SectionCatalog::bundled();
    let material = Material::s355();
    let limit = shear_span_limit(material.modulus_ratio(), catalog.max_inertia_shear_ratio());
    println!("shear span limit for the bundled catalog: {limit:.3} m");

    let system = BeamSystem::new(
        vec![6.0, 5.0, 1.5, 7.0, 6.0, 2.0, 6.5, 6.0, 5.5, 6.0],
        vec![3.0; 10],
        vec![30.0; 10],
    );
    let m = system.member_count();
    let beams = shear_susceptible(&system, &material, &catalog);
    println!("shear beams: {beams:?}");

    let flex = flexural_set(m)?;
    println!("\nflexural set ({}):", flex.len());
    for a in &flex {
        println!("  {a}");
    }

    let report = shear_set_with(m, &flex, &beams, ShearSweep::AdjacentLeftStart)?;
    let crit = critical_set(&flex, &report.set);
    println!(
        "\nshear set {} (bound {}), {:.1}% of raw transforms new; critical set {} vs naive {}",
        report.set.len(),
        shear_set_bound(m, beams.len()),
        100.0 * report.efficiency().unwrap_or(0.0),
        crit.len(),
        naive_set(m)?.len()
    );

    let input = LoadArrangement::parse("1101010101")?;
    let out = shear_transform(&input, &[2, 5], 0)?;
    println!("\nshear transform of {input} around beams [2, 5] from member 0: {out}");
    Ok(())
}
