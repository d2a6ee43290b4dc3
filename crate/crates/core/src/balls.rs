//! Canonical enumeration of open balls.
//!
//! For a center x with distinct distances 0 = d_0 < d_1 < ... < d_m, the open
//! ball B(x, r) only changes when r crosses some d_k. The canonical radii are
//! d_1, ..., d_m (the ball of radius d_{k+1} holds every point at distance at
//! most d_k) plus 2·diam for the whole space. Each center therefore carries a
//! nested chain of at most n balls, all prefixes of the points sorted by
//! distance. Member sets are deduplicated across centers for quantities that
//! depend on the set alone.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::space::{BallWitness, FiniteSpace};

/// An open ball with its member set.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
    pub members: Vec<usize>,
}

/// The nested canonical balls around one center.
#[derive(Debug, Clone)]
pub struct CenterChain {
    order: Vec<u32>,
    radii: Vec<f64>,
    lens: Vec<u32>,
    set_ids: Vec<u32>,
}

impl CenterChain {
    /// Points sorted by (distance to the center, index).
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn lens(&self) -> &[u32] {
        &self.lens
    }

    pub fn set_id(&self, slot: usize) -> usize {
        self.set_ids[slot] as usize
    }

    pub fn set_ids(&self) -> &[u32] {
        &self.set_ids
    }

    pub fn slots(&self) -> usize {
        self.radii.len()
    }

    /// Slot whose member set equals B(center, r), r > 0.
    pub fn slot_for_radius(&self, r: f64) -> usize {
        self.radii.partition_point(|&x| x < r).min(self.radii.len() - 1)
    }
}

#[derive(Debug, Clone, Copy)]
enum SetShape {
    Single(u32),
    /// Contiguous index range [lo, hi).
    Span(u32, u32),
    /// Prefix of the representative center's order.
    Prefix,
}

#[derive(Debug, Clone)]
struct MemberSet {
    members: Vec<u32>,
    rep_center: u32,
    rep_slot: u32,
    shape: SetShape,
}

/// Every distinct open ball of a finite space.
#[derive(Debug, Clone)]
pub struct BallFamily {
    n: usize,
    chains: Vec<CenterChain>,
    sets: Vec<MemberSet>,
    set_mass: Vec<f64>,
    full_set: usize,
    any_span: bool,
    /// (center, [(len, set)]) for sets summed along a center's order.
    prefix_plan: Vec<(u32, Vec<(u32, u32)>)>,
}

/// Scratch buffers for repeated ball sums.
#[derive(Debug, Default, Clone)]
pub struct SumScratch {
    hi: Vec<f64>,
    lo: Vec<f64>,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

impl BallFamily {
    pub fn enumerate(space: &FiniteSpace) -> BallFamily {
        let n = space.len();
        let mut rng = ChaCha8Rng::seed_from_u64(0x0BA1_1F00D);
        let keys: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
        let top = 2.0 * space.diam();

        let mut sets: Vec<MemberSet> = Vec::new();
        let mut index: HashMap<(u64, u32), Vec<u32>> = HashMap::new();
        let mut chains = Vec::with_capacity(n);

        for x in 0..n {
            let row = space.dist_row(x);
            let mut order: Vec<u32> = (0..n as u32).collect();
            order.sort_by(|&a, &b| row[a as usize].total_cmp(&row[b as usize]).then(a.cmp(&b)));

            let mut radii = Vec::new();
            let mut lens = Vec::new();
            let mut k = 0;
            while k < n {
                let d = row[order[k] as usize];
                let mut end = k;
                while end < n && row[order[end] as usize] == d {
                    end += 1;
                }
                if end < n {
                    radii.push(row[order[end] as usize]);
                } else {
                    radii.push(top);
                }
                lens.push(end as u32);
                k = end;
            }

            let mut set_ids = Vec::with_capacity(lens.len());
            let mut hash = 0u64;
            let mut hashed = 0usize;
            for (slot, &len) in lens.iter().enumerate() {
                while hashed < len as usize {
                    hash ^= keys[order[hashed] as usize];
                    hashed += 1;
                }
                let mut members: Vec<u32> = order[..len as usize].to_vec();
                members.sort_unstable();
                let bucket = index.entry((hash, len)).or_default();
                let found = bucket.iter().copied().find(|&s| sets[s as usize].members == members);
                let id = match found {
                    Some(id) => id,
                    None => {
                        let id = sets.len() as u32;
                        let shape = if len == 1 {
                            SetShape::Single(members[0])
                        } else if members[members.len() - 1] - members[0] + 1 == len {
                            SetShape::Span(members[0], members[0] + len)
                        } else {
                            SetShape::Prefix
                        };
                        sets.push(MemberSet {
                            members,
                            rep_center: x as u32,
                            rep_slot: slot as u32,
                            shape,
                        });
                        bucket.push(id);
                        id
                    }
                };
                set_ids.push(id);
            }
            chains.push(CenterChain {
                order,
                radii,
                lens,
                set_ids,
            });
        }

        let full_set = chains[0].set_ids[chains[0].set_ids.len() - 1] as usize;
        let any_span = sets.iter().any(|s| matches!(s.shape, SetShape::Span(..)));
        let mut plan: Vec<(u32, Vec<(u32, u32)>)> = Vec::new();
        for (id, s) in sets.iter().enumerate() {
            if let SetShape::Prefix = s.shape {
                let len = chains[s.rep_center as usize].lens[s.rep_slot as usize];
                match plan.iter_mut().find(|(c, _)| *c == s.rep_center) {
                    Some((_, v)) => v.push((len, id as u32)),
                    None => plan.push((s.rep_center, vec![(len, id as u32)])),
                }
            }
        }
        for (_, v) in plan.iter_mut() {
            v.sort_unstable();
        }
        plan.sort_unstable_by_key(|(c, _)| *c);

        let mut fam = BallFamily {
            n,
            chains,
            sets,
            set_mass: Vec::new(),
            full_set,
            any_span,
            prefix_plan: plan,
        };
        fam.set_mass = fam.set_sums(space.mass());
        fam
    }

    /// Number of points of the host space.
    pub fn points(&self) -> usize {
        self.n
    }

    /// Number of distinct member sets.
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Number of (center, canonical radius) pairs.
    pub fn pair_count(&self) -> usize {
        self.chains.iter().map(|c| c.slots()).sum()
    }

    pub fn chain(&self, x: usize) -> &CenterChain {
        &self.chains[x]
    }

    pub fn chains(&self) -> &[CenterChain] {
        &self.chains
    }

    pub fn members(&self, set: usize) -> &[u32] {
        &self.sets[set].members
    }

    pub fn set_mass(&self, set: usize) -> f64 {
        self.set_mass[set]
    }

    pub fn set_masses(&self) -> &[f64] {
        &self.set_mass
    }

    /// Id of the member set X.
    pub fn full_set(&self) -> usize {
        self.full_set
    }

    /// Set id of B(x, r).
    pub fn set_at(&self, x: usize, r: f64) -> usize {
        let chain = &self.chains[x];
        chain.set_id(chain.slot_for_radius(r))
    }

    /// Representative (center, slot) of a member set.
    pub fn representative(&self, set: usize) -> (usize, usize) {
        let s = &self.sets[set];
        (s.rep_center as usize, s.rep_slot as usize)
    }

    pub fn ball(&self, x: usize, slot: usize) -> Ball {
        let chain = &self.chains[x];
        let mut members: Vec<usize> = chain.order[..chain.lens[slot] as usize]
            .iter()
            .map(|&i| i as usize)
            .collect();
        members.sort_unstable();
        Ball {
            center: x,
            radius: chain.radii[slot],
            members,
        }
    }

    /// Every canonical (center, radius) ball, center-major.
    pub fn iter_balls(&self) -> impl Iterator<Item = Ball> + '_ {
        (0..self.n).flat_map(move |x| (0..self.chains[x].slots()).map(move |k| self.ball(x, k)))
    }

    pub fn witness(&self, space: &FiniteSpace, x: usize, slot: usize) -> BallWitness {
        let chain = &self.chains[x];
        BallWitness {
            center: space.id(x).to_string(),
            radius: chain.radii[slot],
            size: chain.lens[slot] as usize,
        }
    }

    pub fn set_witness(&self, space: &FiniteSpace, set: usize) -> BallWitness {
        let (x, slot) = self.representative(set);
        self.witness(space, x, slot)
    }

    /// True when no set needs a chain prefix, so [`span_sum`](Self::span_sum)
    /// covers every set.
    pub fn spans_only(&self) -> bool {
        self.prefix_plan.is_empty()
    }

    /// Compensated prefix sums of g for [`span_sum`](Self::span_sum).
    pub fn prepare_spans(&self, g: &[f64], scratch: &mut SumScratch) {
        scratch.hi.clear();
        scratch.lo.clear();
        scratch.hi.push(0.0);
        scratch.lo.push(0.0);
        let (mut s, mut c) = (0.0, 0.0);
        for &v in g {
            let (t, e) = two_sum(s, v);
            s = t;
            c += e;
            scratch.hi.push(s);
            scratch.lo.push(c);
        }
    }

    /// Σ g over one single-point or span set, bit-identical to the entry of
    /// [`set_sums`](Self::set_sums). Span sets need [`prepare_spans`](Self::prepare_spans) first.
    #[inline]
    pub fn span_sum(&self, set: usize, g: &[f64], scratch: &SumScratch) -> f64 {
        match self.sets[set].shape {
            SetShape::Single(i) => g[i as usize],
            SetShape::Span(a, b) => {
                let (a, b) = (a as usize, b as usize);
                let (d, e) = two_sum(scratch.hi[b], -scratch.hi[a]);
                d + (e + (scratch.lo[b] - scratch.lo[a]))
            }
            SetShape::Prefix => panic!("set {set} is not a span"),
        }
    }

    /// Σ_{y∈B} g(y) for every distinct member set B.
    pub fn set_sums(&self, g: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.sets.len()];
        self.set_sums_into(g, &mut out, &mut SumScratch::default());
        out
    }

    /// Allocation-free variant of [`set_sums`](Self::set_sums).
    pub fn set_sums_into(&self, g: &[f64], out: &mut [f64], scratch: &mut SumScratch) {
        debug_assert_eq!(g.len(), self.n);
        debug_assert_eq!(out.len(), self.sets.len());
        if self.any_span {
            self.prepare_spans(g, scratch);
        }
        for (id, o) in out.iter_mut().enumerate() {
            if !matches!(self.sets[id].shape, SetShape::Prefix) {
                *o = self.span_sum(id, g, scratch);
            }
        }
        for (center, wanted) in &self.prefix_plan {
            let order = &self.chains[*center as usize].order;
            let mut acc = 0.0;
            let mut k = 0usize;
            for &(len, id) in wanted {
                while k < len as usize {
                    acc += g[order[k] as usize];
                    k += 1;
                }
                out[id as usize] = acc;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_space, MeasureSpec, MetricSpec, SpaceFile};
    use std::collections::BTreeSet;

    fn member_sets(space: &FiniteSpace) -> BTreeSet<Vec<usize>> {
        let fam = space.balls();
        (0..fam.len())
            .map(|s| fam.members(s).iter().map(|&i| i as usize).collect())
            .collect()
    }

    #[test]
    fn two_point_family() {
        let s = build_space(
            None,
            &MetricSpec::Matrix {
                values: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            },
            &MeasureSpec::Uniform,
        )
        .unwrap();
        let expected: BTreeSet<Vec<usize>> = [vec![0], vec![1], vec![0, 1]].into_iter().collect();
        assert_eq!(member_sets(&s), expected);
        assert_eq!(s.balls().pair_count(), 4);
    }

    #[test]
    fn three_point_lattice_family() {
        let s = SpaceFile::lattice1d(3, 1.0).build().unwrap();
        let expected: BTreeSet<Vec<usize>> = [
            vec![0],
            vec![1],
            vec![2],
            vec![0, 1],
            vec![1, 2],
            vec![0, 1, 2],
        ]
        .into_iter()
        .collect();
        assert_eq!(member_sets(&s), expected);
        // the middle point reaches the whole space at radius 1.5
        let fam = s.balls();
        assert_eq!(fam.set_at(1, 1.5), fam.full_set());
    }

    #[test]
    fn full_space_present_and_counts_bounded() {
        let s = SpaceFile::lattice1d(10, 0.5).build().unwrap();
        let fam = s.balls();
        assert_eq!(fam.members(fam.full_set()).len(), 10);
        assert!(fam.pair_count() <= 100);
        for x in 0..10 {
            let c = fam.chain(x);
            assert_eq!(c.set_id(c.slots() - 1), fam.full_set());
        }
    }

    #[test]
    fn chains_are_nested_and_match_open_balls() {
        let s = build_space(
            None,
            &MetricSpec::Random2d { n: 20, seed: 3 },
            &MeasureSpec::Uniform,
        )
        .unwrap();
        let fam = s.balls();
        for x in 0..s.len() {
            let c = fam.chain(x);
            let mut prev: Vec<usize> = Vec::new();
            for k in 0..c.slots() {
                let b = fam.ball(x, k);
                assert_eq!(b.members, s.ball_members(x, b.radius));
                assert!(prev.iter().all(|p| b.members.contains(p)));
                prev = b.members;
            }
        }
    }

    #[test]
    fn arbitrary_radii_map_to_canonical_sets() {
        let s = SpaceFile::lattice1d(12, 1.0).build().unwrap();
        let fam = s.balls();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for x in 0..s.len() {
            for _ in 0..100 {
                let r: f64 = rng.gen_range(1e-9..(2.5 * s.diam()));
                let direct = s.ball_members(x, r);
                let set = fam.set_at(x, r);
                let canon: Vec<usize> = fam.members(set).iter().map(|&i| i as usize).collect();
                assert_eq!(direct, canon);
            }
        }
    }

    #[test]
    fn set_sums_match_direct_sums() {
        for spec in [
            MetricSpec::Lattice1d { n: 17, spacing: 1.0 },
            MetricSpec::Lattice2d { nx: 4, ny: 3, spacing: 1.0 },
            MetricSpec::Random2d { n: 15, seed: 9 },
        ] {
            let s = build_space(None, &spec, &MeasureSpec::Uniform).unwrap();
            let fam = s.balls();
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let g: Vec<f64> = (0..s.len()).map(|_| rng.gen_range(0.0..10.0)).collect();
            let sums = fam.set_sums(&g);
            for (id, &v) in sums.iter().enumerate() {
                let direct: f64 = fam.members(id).iter().map(|&i| g[i as usize]).sum();
                assert!((v - direct).abs() <= 1e-13 * direct.max(1.0), "{v} vs {direct}");
            }
        }
    }
}
