//! Weights and Muckenhoupt constants.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{BallWitness, FiniteSpace};

/// Default seed for every seeded sampler in the crate.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// A strictly positive density ω against μ; ω(E) = Σ_{x∈E} ω(x)·mass(x).
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    values: Vec<f64>,
}

impl Weight {
    pub fn new(space: &FiniteSpace, values: Vec<f64>) -> Result<Self> {
        Error::check_len(space.len(), values.len())?;
        if let Some(i) = values.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::input(format!(
                "weight must be positive and finite, got {} at point `{}`",
                values[i],
                space.id(i)
            )));
        }
        Ok(Weight { values })
    }

    pub fn unit(space: &FiniteSpace) -> Self {
        Weight {
            values: vec![1.0; space.len()],
        }
    }

    /// (1 + pos(x))^a.
    pub fn power_of_position(space: &FiniteSpace, a: f64) -> Result<Self> {
        Weight::new(space, (0..space.len()).map(|i| (1.0 + space.pos(i)).powf(a)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::input("weight scale must be positive"));
        }
        Ok(Weight {
            values: self.values.iter().map(|v| v * lambda).collect(),
        })
    }

    /// ω(x)·mass(x) per point.
    pub fn density(&self, space: &FiniteSpace) -> Vec<f64> {
        self.values.iter().zip(space.mass()).map(|(w, m)| w * m).collect()
    }

    /// ω(E) for an arbitrary index set.
    pub fn measure_of(&self, space: &FiniteSpace, set: impl IntoIterator<Item = usize>) -> f64 {
        set.into_iter().map(|i| self.values[i] * space.mass()[i]).sum()
    }

    /// ω(B) for every distinct ball.
    pub fn ball_measures(&self, space: &FiniteSpace) -> Vec<f64> {
        space.balls().set_sums(&self.density(space))
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantReport {
    pub value: f64,
    pub witness: BallWitness,
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::input(format!("exponent p must satisfy 1 < p < ∞, got {p}")))
    }
}

/// ‖ω‖_{A_p} = max over balls of ⟨ω⟩_B · ⟨ω^{1−p′}⟩_B^{p−1}.
pub fn ap_characteristic(space: &FiniteSpace, weight: &Weight, p: f64) -> Result<ConstantReport> {
    check_p(p)?;
    Error::check_len(space.len(), weight.values.len())?;
    let fam = space.balls();
    let dual = 1.0 - p / (p - 1.0);
    let sigma: Vec<f64> = weight
        .values
        .iter()
        .zip(space.mass())
        .map(|(w, m)| w.powf(dual) * m)
        .collect();
    let w_sums = fam.set_sums(&weight.density(space));
    let s_sums = fam.set_sums(&sigma);
    let mut best = (f64::NEG_INFINITY, 0);
    for set in 0..fam.len() {
        let mu = fam.set_mass(set);
        let v = (w_sums[set] / mu) * (s_sums[set] / mu).powf(p - 1.0);
        if v > best.0 {
            best = (v, set);
        }
    }
    Ok(ConstantReport {
        value: best.0,
        witness: fam.set_witness(space, best.1),
    })
}

/// max over balls of ⟨ω⟩_B / min_B ω.
pub fn a1_constant(space: &FiniteSpace, weight: &Weight) -> Result<ConstantReport> {
    Error::check_len(space.len(), weight.values.len())?;
    let fam = space.balls();
    let sums = fam.set_sums(&weight.density(space));
    let mut best = (f64::NEG_INFINITY, 0);
    for set in 0..fam.len() {
        let min = fam
            .members(set)
            .iter()
            .map(|&i| weight.values[i as usize])
            .fold(f64::INFINITY, f64::min);
        let v = sums[set] / fam.set_mass(set) / min;
        if v > best.0 {
            best = (v, set);
        }
    }
    Ok(ConstantReport {
        value: best.0,
        witness: fam.set_witness(space, best.1),
    })
}

/// Which subsets E ⊆ B the weight/measure comparison visits.
#[derive(Debug, Clone, Copy)]
pub struct SubsetSampler {
    /// Balls up to this size are enumerated exhaustively.
    pub exhaustive_max: usize,
    /// Random subsets drawn per larger ball.
    pub random_per_ball: usize,
    pub seed: u64,
}

impl Default for SubsetSampler {
    fn default() -> Self {
        SubsetSampler {
            exhaustive_max: 12,
            random_per_ball: 64,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma21Report {
    pub p: f64,
    pub ap: f64,
    /// max (ω(E)/ω(B))·(μ(E)/μ(B))^{−1/p}
    pub c1: f64,
    /// min (ω(E)/ω(B))·(μ(E)/μ(B))^{−p}
    pub c2: f64,
    pub pairs_checked: usize,
    /// Pairs violating (μ(E)/μ(B))^p ≤ ‖ω‖_{A_p}·ω(E)/ω(B).
    pub violations: Vec<(BallWitness, Vec<String>)>,
}

const SUBSET_RTOL: f64 = 1e-12;

/// Empirical constants of the weight/measure comparison over sampled E ⊆ B,
/// plus the exact lower bound (μ(E)/μ(B))^p ≤ ‖ω‖_{A_p}·ω(E)/ω(B).
pub fn lemma21_bounds(
    space: &FiniteSpace,
    weight: &Weight,
    p: f64,
    sampler: SubsetSampler,
) -> Result<Lemma21Report> {
    let ap = ap_characteristic(space, weight, p)?.value;
    let fam = space.balls();
    let mass = space.mass();
    let w = weight.values();
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let mut report = Lemma21Report {
        p,
        ap,
        c1: f64::NEG_INFINITY,
        c2: f64::INFINITY,
        pairs_checked: 0,
        violations: Vec::new(),
    };

    for set in 0..fam.len() {
        let members: Vec<usize> = fam.members(set).iter().map(|&i| i as usize).collect();
        let mu_b: f64 = members.iter().map(|&i| mass[i]).sum();
        let w_b: f64 = members.iter().map(|&i| w[i] * mass[i]).sum();
        let visit = |subset: &[usize], report: &mut Lemma21Report| {
            let mu_e: f64 = subset.iter().map(|&i| mass[i]).sum();
            let w_e: f64 = subset.iter().map(|&i| w[i] * mass[i]).sum();
            let (rw, rm) = (w_e / w_b, mu_e / mu_b);
            report.c1 = report.c1.max(rw * rm.powf(-1.0 / p));
            report.c2 = report.c2.min(rw * rm.powf(-p));
            report.pairs_checked += 1;
            if rm.powf(p) > ap * rw * (1.0 + SUBSET_RTOL) {
                report.violations.push((
                    fam.set_witness(space, set),
                    subset.iter().map(|&i| space.id(i).to_string()).collect(),
                ));
            }
        };
        let k = members.len();
        if k <= sampler.exhaustive_max {
            for mask in 1u32..(1u32 << k) {
                let subset: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| members[b]).collect();
                visit(&subset, &mut report);
            }
        } else {
            for i in 0..k {
                visit(&[members[i]], &mut report);
                let complement: Vec<usize> = members.iter().copied().filter(|&m| m != members[i]).collect();
                visit(&complement, &mut report);
            }
            visit(&members, &mut report);
            for _ in 0..sampler.random_per_ball {
                let size = rng.gen_range(1..=k);
                let subset: Vec<usize> = members.choose_multiple(&mut rng, size).copied().collect();
                visit(&subset, &mut report);
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightDoublingReport {
    /// min ω(2B)/ω(B) over balls with r ≤ diam/2 (None if no such ball).
    pub c3: Option<f64>,
    pub c3_witness: Option<BallWitness>,
    /// max ω(2B)/ω(B) over all canonical balls.
    pub c4: f64,
    pub c4_witness: BallWitness,
}

pub fn weight_doubling_constants(space: &FiniteSpace, weight: &Weight) -> Result<WeightDoublingReport> {
    Error::check_len(space.len(), weight.values.len())?;
    let fam = space.balls();
    let wb = weight.ball_measures(space);
    let half = space.diam() / 2.0;
    let mut c4 = (f64::NEG_INFINITY, 0, 0);
    let mut c3: Option<(f64, usize, usize)> = None;
    for x in 0..space.len() {
        let chain = fam.chain(x);
        for (slot, &r) in chain.radii().iter().enumerate() {
            let ratio = wb[fam.set_at(x, 2.0 * r)] / wb[chain.set_id(slot)];
            if ratio > c4.0 {
                c4 = (ratio, x, slot);
            }
            if r <= half && c3.map_or(true, |c| ratio < c.0) {
                c3 = Some((ratio, x, slot));
            }
        }
    }
    Ok(WeightDoublingReport {
        c3: c3.map(|c| c.0),
        c3_witness: c3.map(|c| fam.witness(space, c.1, c.2)),
        c4: c4.0,
        c4_witness: fam.witness(space, c4.1, c4.2),
    })
}
