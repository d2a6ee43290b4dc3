//! Validates built-in θ-kernels and applies the singular integral and its
//! commutator with b(x) = log(1 + x).
//!
//! cargo run --release --example cz_kernels

use gmlab::kernel::{apply_cz, builtin_kernel, commutator, l2_operator_norm, validate_kernel, DiniModulus, KernelShape, TripleSampler};
use gmlab::norms::bmo_norm;
use gmlab::SpaceFile;

fn main() -> gmlab::Result<()> {
    let file = SpaceFile::lattice1d(32, 1.0);
    let space = file.build()?;
    let f = file.function(&space, "point:16", "f")?;
    let b = file.function(&space, "log1p_pos", "b")?;

    let candidates = [
        ("riesz1d, fitted modulus", KernelShape::Riesz1d, None),
        ("signed inverse volume", KernelShape::InverseVolumeSigned, None),
        ("riesz1d, θ ≡ 1", KernelShape::Riesz1d, Some(DiniModulus::Constant { value: 1.0 })),
    ];
    for (name, shape, modulus) in candidates {
        let mut k = builtin_kernel(&space, &shape, None, modulus)?;
        let v = validate_kernel(&space, &mut k, TripleSampler::default())?;
        let dini = match &v.dini {
            Ok(d) => format!("{:.4}", d.value),
            Err(e) => e.clone(),
        };
        println!(
            "{name}: C_size {:.4}, C_smooth {:?}, Dini {dini}, validated {}",
            v.size.c_size, v.smoothness.c_smooth, v.validated
        );
        println!("  ‖T‖ on L^2 = {:.4}", l2_operator_norm(&space, &k)?);
    }

    let k = builtin_kernel(&space, &KernelShape::Riesz1d, None, None)?;
    let tf = apply_cz(&space, &k, &f)?;
    let cf = commutator(&space, &k, &b, &f)?;
    println!("‖b‖_* = {:.4}", bmo_norm(&space, &b)?.value);
    println!("  x     T δ_16   [b,T] δ_16");
    for x in (0..32).step_by(4) {
        println!("{x:>3} {:>10.4} {:>12.4}", tf.values()[x], cf.values()[x]);
    }
    Ok(())
}
