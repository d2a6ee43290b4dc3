//! Hardy–Littlewood maximal operators: centered, non-centered with a power,
//! and the vector-valued ℓ^r version.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::norms::PointFunction;
use crate::space::FiniteSpace;

/// Finitely many functions on one space.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFunction {
    components: Vec<PointFunction>,
}

impl VectorFunction {
    pub fn new(components: Vec<PointFunction>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::input("vector function needs at least one component"));
        };
        let n = first.len();
        for c in &components {
            Error::check_len(n, c.len())?;
        }
        Ok(VectorFunction { components })
    }

    pub fn components(&self) -> &[PointFunction] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn points(&self) -> usize {
        self.components[0].len()
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        VectorFunction {
            components: self.components.iter().map(|c| c.scaled(lambda)).collect(),
        }
    }

    /// x ↦ (Σ_j |f_j(x)|^r)^{1/r}.
    pub fn pointwise_lr(&self, r: f64) -> PointFunction {
        let rows: Vec<&[f64]> = self.components.iter().map(|c| c.values()).collect();
        PointFunction::from_raw(lr_combine(&rows, self.points(), r))
    }
}

fn lr_combine(rows: &[&[f64]], n: usize, r: f64) -> Vec<f64> {
    (0..n)
        .map(|x| {
            let scale = rows.iter().fold(0.0, |m: f64, row| m.max(row[x].abs()));
            if scale == 0.0 {
                return 0.0;
            }
            let s: f64 = rows.iter().map(|row| (row[x].abs() / scale).powf(r)).sum();
            scale * s.powf(1.0 / r)
        })
        .collect()
}

/// [(1/μ(B)) Σ_{y∈B} |f(y)|^r mass(y)]^{1/r} for every distinct set;
/// singletons give |f(x)| exactly.
fn set_averages(space: &FiniteSpace, f: &[f64], r: f64) -> Vec<f64> {
    let fam = space.balls();
    let mass = space.mass();
    if r == 1.0 {
        let g: Vec<f64> = f.iter().zip(mass).map(|(v, m)| v.abs() * m).collect();
        let sums = fam.set_sums(&g);
        return (0..fam.len())
            .map(|s| match fam.members(s) {
                [i] => f[*i as usize].abs(),
                _ => sums[s] / fam.set_mass(s),
            })
            .collect();
    }
    let scale = f.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    if scale == 0.0 {
        return vec![0.0; fam.len()];
    }
    let g: Vec<f64> = f.iter().zip(mass).map(|(v, m)| (v.abs() / scale).powf(r) * m).collect();
    let sums = fam.set_sums(&g);
    (0..fam.len())
        .map(|s| match fam.members(s) {
            [i] => f[*i as usize].abs(),
            _ => scale * (sums[s] / fam.set_mass(s)).powf(1.0 / r),
        })
        .collect()
}

fn centered(space: &FiniteSpace, f: &[f64]) -> Vec<f64> {
    let avg = set_averages(space, f, 1.0);
    let fam = space.balls();
    (0..space.len())
        .into_par_iter()
        .map(|x| {
            fam.chain(x)
                .set_ids()
                .iter()
                .fold(f64::NEG_INFINITY, |m, &s| m.max(avg[s as usize]))
        })
        .collect()
}

/// Mf(x) = max over canonical radii at x of the ball average of |f|.
pub fn maximal(space: &FiniteSpace, f: &PointFunction) -> Result<PointFunction> {
    Error::check_len(space.len(), f.len())?;
    Ok(PointFunction::from_raw(centered(space, f.values())))
}

/// M̃_r f(x) = max over canonical balls B ∋ x of the L^r average of |f| on B.
pub fn noncentered_maximal(space: &FiniteSpace, f: &PointFunction, r_pow: f64) -> Result<PointFunction> {
    if !(r_pow >= 1.0 && r_pow.is_finite()) {
        return Err(Error::input(format!("power r must satisfy 1 ≤ r < ∞, got {r_pow}")));
    }
    Error::check_len(space.len(), f.len())?;
    let avg = set_averages(space, f.values(), r_pow);
    let fam = space.balls();
    let n = space.len();
    // per center: suffix max along its chain, then each point picks up the
    // suffix from the first slot that contains it
    let per_center: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|c| {
            let chain = fam.chain(c);
            let ids = chain.set_ids();
            let mut suffix = vec![f64::NEG_INFINITY; ids.len()];
            let mut m = f64::NEG_INFINITY;
            for k in (0..ids.len()).rev() {
                m = m.max(avg[ids[k] as usize]);
                suffix[k] = m;
            }
            let mut out = vec![f64::NEG_INFINITY; n];
            let mut slot = 0;
            for (pos, &y) in chain.order().iter().enumerate() {
                while chain.lens()[slot] as usize <= pos {
                    slot += 1;
                }
                out[y as usize] = suffix[slot];
            }
            out
        })
        .collect();
    let values = (0..n)
        .map(|x| per_center.iter().fold(f64::NEG_INFINITY, |m, row| m.max(row[x])))
        .collect();
    Ok(PointFunction::from_raw(values))
}

/// x ↦ (Σ_j [M f_j(x)]^r)^{1/r}.
pub fn vector_maximal(space: &FiniteSpace, vf: &VectorFunction, r_pow: f64) -> Result<PointFunction> {
    if !(r_pow > 1.0 && r_pow.is_finite()) {
        return Err(Error::input(format!("power r must satisfy 1 < r < ∞, got {r_pow}")));
    }
    Error::check_len(space.len(), vf.points())?;
    let maxes: Vec<Vec<f64>> = vf.components().iter().map(|c| centered(space, c.values())).collect();
    let rows: Vec<&[f64]> = maxes.iter().map(|m| m.as_slice()).collect();
    Ok(PointFunction::from_raw(lr_combine(&rows, space.len(), r_pow)))
}
