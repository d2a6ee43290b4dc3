//! The six norms on one space, the two grand conventions, and how the
//! ε-supremum moves with φ_g.
//!
//! cargo run --release --example grand_morrey_norms

use gmlab::norms::{
    bmo_norm, convention_consistency, generalized_morrey_norm, grand_generalized_morrey_norm, grand_lebesgue_norm,
    grand_weighted_morrey_norm, lp_norm,
};
use gmlab::{GrandParams, GrandWeight, MorreyGrowth, SpaceFile, Weight};

fn main() -> gmlab::Result<()> {
    let file = SpaceFile::lattice1d(64, 1.0);
    let space = file.build()?;
    let w = Weight::power_of_position(&space, 0.3)?;
    let f = file.function(&space, "log1p_pos", "f")?;
    let mg = MorreyGrowth::Power(0.5);
    let gp = GrandParams::new(2.0, GrandWeight::Power(1.0), 0)?;

    println!("f = log(1 + x) on 64 points, ω = (1+x)^0.3, p = 2");
    println!("  L^2(ω)                {:.6}", lp_norm(&space, &f, &w, 2.0)?);
    let gl = grand_lebesgue_norm(&space, &f, &w, &gp)?;
    println!("  grand Lebesgue        {:.6} at ε = {:.4} ({} nodes)", gl.value, gl.eps, gl.eps_nodes);
    let m = generalized_morrey_norm(&space, &f, &w, 2.0, &mg)?;
    let ball = m.ball.expect("witness");
    println!("  Morrey, φ = t^1/2     {:.6} on B({}, {})", m.value, ball.center, ball.radius);
    let g = grand_generalized_morrey_norm(&space, &f, &w, &gp, &mg)?;
    println!("  grand Morrey          {:.6} at ε = {:.4}", g.value, g.eps.unwrap_or(0.0));
    let q = grand_weighted_morrey_norm(&space, &f, &w, &gp, 3.0)?;
    println!("  grand weighted, q = 3 {:.6}", q.value);
    println!("  BMO                   {:.6}", bmo_norm(&space, &f)?.value);

    println!("grand Morrey against φ_g:");
    for phi in ["power:0.25", "power:1", "power:4", "constant:1"] {
        let phi: GrandWeight = phi.parse()?;
        let gp = GrandParams::new(2.0, phi.clone(), 0)?;
        let v = grand_generalized_morrey_norm(&space, &f, &w, &gp, &mg)?;
        let member = if phi.membership(2.0).holds { "" } else { "  (not in Φ_p)" };
        println!("  {phi:<11} {:.6} at ε = {:.4}{member}", v.value, v.eps.unwrap_or(0.0));
    }

    let c = convention_consistency(&space, &f, &w, &gp)?;
    println!(
        "φ_m ≡ 1: literal {:.6}, exponentiated {:.6}, grand Lebesgue {:.6}",
        c.literal, c.exponentiated, c.grand_lebesgue
    );
    Ok(())
}
