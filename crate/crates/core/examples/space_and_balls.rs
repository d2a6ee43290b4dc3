//! Builds a few finite metric measure spaces and prints their ball families,
//! doubling and reverse doubling constants.
//!
//! cargo run --release --example space_and_balls

use gmlab::space::{doubling_constant, reverse_doubling_infimum, volume_symmetry_defect};
use gmlab::{build_space, Error, FiniteSpace, MeasureSpec, MetricSpec, SpaceFile};

fn describe(name: &str, space: &FiniteSpace) {
    let c0 = doubling_constant(space);
    let defect = volume_symmetry_defect(space);
    println!(
        "{name}: n={} diam={} mass={} distinct balls={}",
        space.len(),
        space.diam(),
        space.total_mass(),
        space.balls().len()
    );
    println!(
        "  C0 = {:.4} at B({}, {}) of {} points; V(x,y)/V(y,x) ≤ {:.4}",
        c0.value, c0.witness.center, c0.witness.radius, c0.witness.size, defect.max_ratio
    );
    match reverse_doubling_infimum(space, 2.0) {
        Ok(rd) => println!("  reverse doubling at a=2: b = {:.4} (certified: {})", rd.b, rd.certified),
        Err(Error::NoAdmissibleScale(m)) => println!("  reverse doubling at a=2: {m}"),
        Err(e) => println!("  reverse doubling failed: {e}"),
    }
}

fn main() -> gmlab::Result<()> {
    describe("lattice 64", &SpaceFile::lattice1d(64, 1.0).build()?);

    let grid = build_space(None, &MetricSpec::Lattice2d { nx: 6, ny: 6, spacing: 1.0 }, &MeasureSpec::Uniform)?;
    describe("grid 6x6", &grid);

    let masses: Vec<f64> = (0..24).map(|i| 1.0 + (i % 5) as f64).collect();
    let cloud = build_space(None, &MetricSpec::Random2d { n: 24, seed: 11 }, &MeasureSpec::Explicit(masses))?;
    describe("random cloud of 24", &cloud);

    let fam = grid.balls();
    println!("balls around the corner of the grid:");
    for slot in 0..fam.chain(0).set_ids().len() {
        let b = fam.witness(&grid, 0, slot);
        println!("  radius {:>6.4}: {} points", b.radius, b.size);
    }

    let bad = build_space(
        Some(vec!["a".into(), "b".into(), "c".into()]),
        &MetricSpec::Matrix {
            values: vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]],
        },
        &MeasureSpec::Uniform,
    );
    if let Err(e) = bad {
        println!("rejected: {e}");
    }
    Ok(())
}
