//! Analyse a four-span beam: forces under full load, the unit-load response
//! table of one span and its polarity sequences.
//!
//! cargo run --example analyze_beam

use influence_zone::solver::{polarity_sequence, Quantity};
use influence_zone::{response_table, solve, BeamSystem, Material, SectionCatalog, StationGrid};

fn main() -> influence_zone::Result<()> {
    let catalog = SectionCatalog::bundled();
    let section = catalog.get("UKB 406x178x74").expect("bundled section");
    let system = BeamSystem::new(vec![6.0, 7.5, 2.0, 6.0], vec![3.0; 4], vec![20.0; 4]).with_section_everywhere(section);
    let material = Material::s355();

    let sol = solve(&system, &material, &[10.0; 4])?;
    println!("10 kN/m on every span:");
    for i in 0..system.member_count() {
        println!(
            "  span {i}: M(0) = {:8.2}  M(L/2) = {:8.2}  M(L) = {:8.2}  V(0) = {:7.2} kN",
            sol.moment(i, 0.0),
            sol.moment(i, 0.5),
            sol.moment(i, 1.0),
            sol.shear(i, 0.0)
        );
    }

    let table = response_table(&system, &material, &StationGrid::new(1))?;
    println!("\nmoment at midspan of span 1 per unit UDL on each span: {:?}", table.moment_unit[5]);
    for s in [0, 5, 10] {
        let m = polarity_sequence(&table, s, Quantity::Moment);
        let v = polarity_sequence(&table, s, Quantity::Shear);
        println!("station {s:2}: moment polarity {:?}, shear polarity {:?}", m.signs, v.signs);
    }
    println!("\nresponse table as CSV:");
    table.write_csv(std::io::stdout())?;
    Ok(())
}
