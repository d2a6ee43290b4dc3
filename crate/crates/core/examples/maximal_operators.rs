//! Centered, non-centered and vector-valued maximal functions of a spike.
//!
//! cargo run --release --example maximal_operators

use gmlab::maximal::{maximal, noncentered_maximal, vector_maximal, VectorFunction};
use gmlab::{PointFunction, SpaceFile};

fn main() -> gmlab::Result<()> {
    let space = SpaceFile::lattice1d(16, 1.0).build()?;
    let spike = PointFunction::new((0..16).map(|i| if i == 5 { 1.0 } else { 0.0 }).collect())?;
    let ramp = PointFunction::new((0..16).map(|i| i as f64 / 15.0).collect())?;

    let m = maximal(&space, &spike)?;
    let m1 = noncentered_maximal(&space, &spike, 1.0)?;
    let m2 = noncentered_maximal(&space, &spike, 2.0)?;
    let vf = VectorFunction::new(vec![spike.clone(), ramp.clone()])?;
    let mv = vector_maximal(&space, &vf, 1.5)?;

    println!("  x      f     Mf  M~_1 f  M~_2 f  vector r=1.5");
    for x in 0..16 {
        println!(
            "{x:>3} {:>6.3} {:>6.3} {:>7.3} {:>7.3} {:>13.3}",
            spike.values()[x],
            m.values()[x],
            m1.values()[x],
            m2.values()[x],
            mv.values()[x]
        );
    }
    Ok(())
}
