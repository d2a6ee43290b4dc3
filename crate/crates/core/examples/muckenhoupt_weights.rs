//! A_p characteristics, the measure comparison bounds and weight doubling
//! for power weights on a lattice.
//!
//! cargo run --release --example muckenhoupt_weights

use gmlab::weight::{a1_constant, ap_characteristic, lemma21_bounds, weight_doubling_constants, SubsetSampler};
use gmlab::{SpaceFile, Weight};

fn main() -> gmlab::Result<()> {
    for n in [32, 64, 128] {
        let space = SpaceFile::lattice1d(n, 1.0).build()?;
        println!("lattice {n}");
        for a in [0.0, 0.3, 0.9, 2.0] {
            let w = Weight::power_of_position(&space, a)?;
            let a2 = ap_characteristic(&space, &w, 2.0)?;
            let a3 = ap_characteristic(&space, &w, 3.0)?;
            let a1 = a1_constant(&space, &w)?;
            println!(
                "  (1+x)^{a:<3}: A_1 {:>9.4}  A_2 {:>8.4} (ball at {} of {} points)  A_3 {:>8.4}",
                a1.value, a2.value, a2.witness.center, a2.witness.size, a3.value
            );
        }
    }

    let space = SpaceFile::lattice1d(12, 1.0).build()?;
    let w = Weight::power_of_position(&space, 0.3)?;
    let cmp = lemma21_bounds(&space, &w, 2.0, SubsetSampler::default())?;
    println!(
        "subset comparison on 12 points: {} pairs, c1 = {:.4}, c2 = {:.4}, violations = {}",
        cmp.pairs_checked,
        cmp.c1,
        cmp.c2,
        cmp.violations.len()
    );
    let d = weight_doubling_constants(&space, &w)?;
    println!("ω(2B)/ω(B): min {:?}, max {:.4}", d.c3, d.c4);
    Ok(())
}
