//! Seeded test-function families.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::maximal::VectorFunction;
use crate::norms::PointFunction;
use crate::space::{FiniteSpace, Layout};
use crate::weight::Weight;

/// Named, nonzero, pairwise distinct scalar test functions.
#[derive(Debug, Clone)]
pub struct TestFamily {
    names: Vec<String>,
    functions: Vec<PointFunction>,
}

/// Number of seeded ±1 functions in the standard family.
pub const RANDOM_SIGNS: usize = 32;
const BUMP_WIDTHS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

impl TestFamily {
    /// Ball indicators, A_p extremizers ω^{1−p′}χ_B, seeded ±1 functions,
    /// point masses and (on lattices) Gaussian bumps. Exact duplicates keep
    /// their first name.
    pub fn standard(space: &FiniteSpace, weight: &Weight, p: f64, seed: u64) -> Self {
        let n = space.len();
        let fam = space.balls();
        let mut out = Builder::default();
        for set in 0..fam.len() {
            let w = fam.set_witness(space, set);
            out.push(
                format!("ball:{}@{}", w.center, w.radius),
                PointFunction::indicator(n, fam.members(set).iter().map(|&i| i as usize)),
            );
        }
        let dual = 1.0 - p / (p - 1.0);
        let sigma: Vec<f64> = weight.values().iter().map(|w| w.powf(dual)).collect();
        for set in 0..fam.len() {
            let w = fam.set_witness(space, set);
            let mut v = vec![0.0; n];
            for &i in fam.members(set) {
                v[i as usize] = sigma[i as usize];
            }
            out.push(format!("extremizer:{}@{}", w.center, w.radius), PointFunction::from_raw(v));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in 0..RANDOM_SIGNS {
            let v = (0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
            out.push(format!("signs:{k}"), PointFunction::from_raw(v));
        }
        for i in 0..n {
            out.push(format!("point:{}", space.id(i)), PointFunction::indicator(n, [i]));
        }
        let bump = match space.layout() {
            Layout::Lattice1d { spacing, .. } => Some((spacing, vec![0, n / 2, n - 1])),
            Layout::Lattice2d { nx, ny, spacing } => Some((spacing, vec![0, (ny / 2) * nx + nx / 2, n - 1])),
            _ => None,
        };
        if let Some((spacing, centers)) = bump {
            for &c in &centers {
                for w in BUMP_WIDTHS {
                    let width = w * spacing;
                    let v = (0..n).map(|y| (-(space.dist(c, y) / width).powi(2)).exp()).collect();
                    out.push(format!("bump:{}:{}", space.id(c), w), PointFunction::from_raw(v));
                }
            }
        }
        TestFamily {
            names: out.names,
            functions: out.functions,
        }
    }

    /// A user-supplied family; rejects zero functions and repeated names.
    pub fn from_functions(entries: Vec<(String, PointFunction)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut names = Vec::new();
        let mut functions = Vec::new();
        for (name, f) in entries {
            if f.is_zero() {
                return Err(Error::input(format!("test function `{name}` is identically zero")));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::input(format!("test function name `{name}` is repeated")));
            }
            names.push(name);
            functions.push(f);
        }
        if functions.is_empty() {
            return Err(Error::input("test family is empty"));
        }
        Ok(TestFamily { names, functions })
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn functions(&self) -> &[PointFunction] {
        &self.functions
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &PointFunction)> {
        self.names.iter().map(String::as_str).zip(&self.functions)
    }
}

#[derive(Default)]
struct Builder {
    seen: HashSet<Vec<u64>>,
    names: Vec<String>,
    functions: Vec<PointFunction>,
}

impl Builder {
    fn push(&mut self, name: String, f: PointFunction) {
        if f.is_zero() {
            return;
        }
        let key: Vec<u64> = f.values().iter().map(|v| v.to_bits()).collect();
        if self.seen.insert(key) {
            self.names.push(name);
            self.functions.push(f);
        }
    }
}

/// Named vector-valued test functions.
#[derive(Debug, Clone)]
pub struct VectorFamily {
    names: Vec<String>,
    vectors: Vec<VectorFunction>,
}

/// Components per standard vector function.
pub const VECTOR_COMPONENTS: usize = 8;
/// Seeds per kind in the standard vector family.
pub const VECTOR_SEEDS: u64 = 16;

impl VectorFamily {
    /// For each of 16 seeds: random amplitudes on random balls, random point
    /// masses and random ball indicators, 8 components each.
    pub fn standard(space: &FiniteSpace, seed: u64) -> Self {
        let n = space.len();
        let fam = space.balls();
        let mut names = Vec::new();
        let mut vectors = Vec::new();
        for s in 0..VECTOR_SEEDS {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(s));
            let ball = |rng: &mut ChaCha8Rng| fam.members(rng.gen_range(0..fam.len())).to_vec();
            let rand_ball: Vec<PointFunction> = (0..VECTOR_COMPONENTS)
                .map(|_| {
                    let mut v = vec![0.0; n];
                    for i in ball(&mut rng) {
                        v[i as usize] = rng.gen::<f64>();
                    }
                    PointFunction::from_raw(v)
                })
                .collect();
            let points: Vec<PointFunction> = (0..n)
                .collect::<Vec<_>>()
                .choose_multiple(&mut rng, VECTOR_COMPONENTS.min(n))
                .map(|&i| PointFunction::indicator(n, [i]))
                .collect();
            let indicators: Vec<PointFunction> = (0..VECTOR_COMPONENTS)
                .map(|_| PointFunction::indicator(n, ball(&mut rng).into_iter().map(|i| i as usize)))
                .collect();
            for (kind, comps) in [("rand_ball", rand_ball), ("points", points), ("indicators", indicators)] {
                let v = VectorFunction::new(comps).expect("components share the space");
                if v.components().iter().any(|c| !c.is_zero()) {
                    names.push(format!("{kind}:{s}"));
                    vectors.push(v);
                }
            }
        }
        VectorFamily { names, vectors }
    }

    pub fn from_vectors(entries: Vec<(String, VectorFunction)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::input("vector test family is empty"));
        }
        let mut seen = HashSet::new();
        let mut names = Vec::new();
        let mut vectors = Vec::new();
        for (name, v) in entries {
            if v.components().iter().all(PointFunction::is_zero) {
                return Err(Error::input(format!("vector test function `{name}` is identically zero")));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::input(format!("vector test function name `{name}` is repeated")));
            }
            names.push(name);
            vectors.push(v);
        }
        Ok(VectorFamily { names, vectors })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vectors(&self) -> &[VectorFunction] {
        &self.vectors
    }
}
