//! Fixtures, brute-force oracles and property checks shared by the
//! integration tests and the acceptance runner.
#![allow(dead_code)]

use gmlab::growth::{EpsGrid, GrandParams, GrandWeight, MorreyGrowth};
use gmlab::kernel::{apply_cz, builtin_kernel, commutator, KernelShape, ThetaKernel};
use gmlab::maximal::{maximal, noncentered_maximal};
use gmlab::norms::{
    bmo_norm, generalized_morrey_norm, grand_generalized_morrey_norm, grand_lebesgue_norm, grand_lebesgue_on_grid,
    grand_weighted_morrey_norm, lp_norm, PointFunction,
};
use gmlab::space::{build_space, doubling_constant, FiniteSpace, MeasureSpec, MetricSpec, SpaceFile};
use gmlab::weight::{ap_characteristic, lemma21_bounds, SubsetSampler, Weight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

pub fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs every check and collects the failures.
pub fn collect(checks: Vec<(String, Check)>) -> Vec<String> {
    checks
        .into_iter()
        .filter_map(|(name, r)| r.err().map(|e| format!("{name}: {e}")))
        .collect()
}

fn matrix(values: Vec<Vec<f64>>, measure: MeasureSpec) -> FiniteSpace {
    build_space(None, &MetricSpec::Matrix { values }, &measure).unwrap()
}

pub fn two_point() -> FiniteSpace {
    matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], MeasureSpec::Uniform)
}

pub fn three_point() -> FiniteSpace {
    matrix(
        vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.5], vec![2.0, 1.5, 0.0]],
        MeasureSpec::Explicit(vec![1.0, 2.0, 0.5]),
    )
}

pub fn lattice(n: usize) -> FiniteSpace {
    SpaceFile::lattice1d(n, 1.0).build().unwrap()
}

/// The three fixtures of the algebraic suite.
pub fn algebraic_spaces() -> Vec<(&'static str, FiniteSpace)> {
    vec![("2-point", two_point()), ("3-point", three_point()), ("lattice64", lattice(64))]
}

/// Assorted spaces with at most 16 points.
pub fn small_spaces() -> Vec<(&'static str, FiniteSpace)> {
    let discrete: Vec<Vec<f64>> = (0..6)
        .map(|i| (0..6).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
        .collect();
    vec![
        ("2-point", two_point()),
        ("3-point", three_point()),
        ("lattice8", lattice(8)),
        ("lattice16", lattice(16)),
        (
            "lattice2d-4x4",
            build_space(None, &MetricSpec::Lattice2d { nx: 4, ny: 4, spacing: 1.0 }, &MeasureSpec::Uniform).unwrap(),
        ),
        (
            "random2d-12",
            build_space(None, &MetricSpec::Random2d { n: 12, seed: 3 }, &MeasureSpec::Uniform).unwrap(),
        ),
        (
            "random2d-16-masses",
            build_space(
                None,
                &MetricSpec::Random2d { n: 16, seed: 9 },
                &MeasureSpec::Explicit((0..16).map(|i| 0.5 + (i % 5) as f64 * 0.75).collect()),
            )
            .unwrap(),
        ),
        ("discrete-6", matrix(discrete, MeasureSpec::Explicit(vec![1.0, 2.0, 3.0, 1.0, 2.0, 3.0]))),
    ]
}

pub fn weights(space: &FiniteSpace, seed: u64) -> Vec<(&'static str, Weight)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = (0..space.len()).map(|_| rng.gen_range(0.2..5.0)).collect();
    vec![
        ("unit", Weight::unit(space)),
        ("pow1p:0.3", Weight::power_of_position(space, 0.3).unwrap()),
        ("random", Weight::new(space, random).unwrap()),
    ]
}

/// Seeded values in [−2, 2] with about one in five set to zero.
pub fn random_function(n: usize, seed: u64) -> PointFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..n)
        .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(-2.0..2.0) })
        .collect();
    PointFunction::new(v).unwrap()
}

// ---------------------------------------------------------------------------
// brute-force oracles, computed straight from the distance table

/// Open balls {y : d(x,y) < r} for every center over a dense radius sweep:
/// every distance, the midpoints between consecutive distances, a uniform
/// grid of 257 radii up to 2·diam, and 2·diam itself.
pub fn sweep_balls(space: &FiniteSpace) -> Vec<(usize, f64, Vec<usize>)> {
    let n = space.len();
    let diam = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .fold(0.0f64, |m, (i, j)| m.max(space.dist(i, j)));
    let mut out = Vec::new();
    for x in 0..n {
        let mut d: Vec<f64> = (0..n).map(|y| space.dist(x, y)).filter(|&v| v > 0.0).collect();
        d.sort_by(f64::total_cmp);
        d.dedup();
        let mut radii = d.clone();
        radii.extend(d.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        radii.extend(d.iter().map(|&v| 0.5 * v));
        radii.extend((1..=257).map(|k| 2.0 * diam * k as f64 / 257.0));
        radii.push(2.0 * diam);
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        for r in radii {
            let members: Vec<usize> = (0..n).filter(|&y| space.dist(x, y) < r).collect();
            out.push((x, r, members));
        }
    }
    out
}

/// The distinct member sets of the sweep.
pub fn sweep_sets(space: &FiniteSpace) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = sweep_balls(space).into_iter().map(|b| b.2).collect();
    sets.sort();
    sets.dedup();
    sets
}

fn mass_of(space: &FiniteSpace, set: &[usize]) -> f64 {
    set.iter().map(|&i| space.mass()[i]).sum()
}

fn weight_of(space: &FiniteSpace, w: &Weight, set: &[usize]) -> f64 {
    set.iter().map(|&i| w.values()[i] * space.mass()[i]).sum()
}

pub fn oracle_doubling(space: &FiniteSpace) -> f64 {
    let n = space.len();
    let mut best = f64::NEG_INFINITY;
    for (x, r, members) in sweep_balls(space) {
        let outer: Vec<usize> = (0..n).filter(|&y| space.dist(x, y) < 2.0 * r).collect();
        best = best.max(mass_of(space, &outer) / mass_of(space, &members));
    }
    best
}

pub fn oracle_ap(space: &FiniteSpace, w: &Weight, p: f64) -> f64 {
    let dual = 1.0 - p / (p - 1.0);
    let mut best = f64::NEG_INFINITY;
    for b in sweep_sets(space) {
        let mu = mass_of(space, &b);
        let avg_w = weight_of(space, w, &b) / mu;
        let avg_s: f64 = b.iter().map(|&i| w.values()[i].powf(dual) * space.mass()[i]).sum::<f64>() / mu;
        best = best.max(avg_w * avg_s.powf(p - 1.0));
    }
    best
}

fn local_lq(space: &FiniteSpace, f: &PointFunction, w: &Weight, set: &[usize], q: f64) -> f64 {
    set.iter()
        .map(|&i| f.values()[i].abs().powf(q) * w.values()[i] * space.mass()[i])
        .sum::<f64>()
}

pub fn oracle_gen_morrey(space: &FiniteSpace, f: &PointFunction, w: &Weight, q: f64, mg: &MorreyGrowth) -> f64 {
    gen_morrey_on(&sweep_sets(space), space, f, w, q, mg)
}

fn gen_morrey_on(sets: &[Vec<usize>], space: &FiniteSpace, f: &PointFunction, w: &Weight, q: f64, mg: &MorreyGrowth) -> f64 {
    sets.iter()
        .map(|b| (local_lq(space, f, w, b, q) / mg.eval(weight_of(space, w, b))).powf(1.0 / q))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn oracle_grand_lebesgue(space: &FiniteSpace, f: &PointFunction, w: &Weight, p: f64, phi: &GrandWeight, nodes: &[f64]) -> f64 {
    let all: Vec<usize> = (0..space.len()).collect();
    nodes
        .iter()
        .map(|&e| phi.eval(e).powf(1.0 / (p - e)) * local_lq(space, f, w, &all, p - e).powf(1.0 / (p - e)))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn oracle_grand_gen_morrey(
    space: &FiniteSpace,
    f: &PointFunction,
    w: &Weight,
    p: f64,
    phi: &GrandWeight,
    mg: &MorreyGrowth,
    nodes: &[f64],
) -> f64 {
    let sets = sweep_sets(space);
    nodes
        .iter()
        .map(|&e| phi.eval(e) * gen_morrey_on(&sets, space, f, w, p - e, mg))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn oracle_grand_weighted_morrey(
    space: &FiniteSpace,
    f: &PointFunction,
    w: &Weight,
    p: f64,
    q: f64,
    phi: &GrandWeight,
    nodes: &[f64],
) -> f64 {
    let sets = sweep_sets(space);
    nodes
        .iter()
        .map(|&e| {
            let s = p - e;
            let inner = sets
                .iter()
                .map(|b| weight_of(space, w, b).powf(1.0 / q - 1.0 / s) * local_lq(space, f, w, b, s).powf(1.0 / s))
                .fold(f64::NEG_INFINITY, f64::max);
            phi.eval(e) * inner
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// (c1, c2, violations) of the weight/measure comparison, enumerating every
/// subset of every ball.
pub fn oracle_measure_comparison(space: &FiniteSpace, w: &Weight, p: f64) -> (f64, f64, usize) {
    let ap = oracle_ap(space, w, p);
    let balls = sweep_sets(space);
    let (mut c1, mut c2, mut bad) = (f64::NEG_INFINITY, f64::INFINITY, 0);
    for b in balls {
        assert!(b.len() <= 12, "exhaustive enumeration is limited to 12 points");
        let (mu_b, w_b) = (mass_of(space, &b), weight_of(space, w, &b));
        for mask in 1u32..(1 << b.len()) {
            let e: Vec<usize> = (0..b.len()).filter(|k| mask >> k & 1 == 1).map(|k| b[k]).collect();
            let rw = weight_of(space, w, &e) / w_b;
            let rm = mass_of(space, &e) / mu_b;
            c1 = c1.max(rw * rm.powf(-1.0 / p));
            c2 = c2.min(rw * rm.powf(-p));
            if rm.powf(p) > ap * rw * (1.0 + 1e-12) {
                bad += 1;
            }
        }
    }
    (c1, c2, bad)
}

/// 512 equally spaced interior ε nodes.
pub fn dense_eps(p: f64) -> Vec<f64> {
    (0..512).map(|k| (p - 1.0) * (k as f64 + 0.5) / 512.0).collect()
}

pub const ORACLE_RTOL: f64 = 1e-9;

/// Every oracle comparison on the small spaces; returns the failures.
pub fn oracle_suite() -> Vec<String> {
    let mut checks = Vec::new();
    let phi_g = GrandWeight::Power(1.0);
    let growths = [MorreyGrowth::Power(0.5), MorreyGrowth::Constant(1.0), MorreyGrowth::Power(0.8)];
    for (sname, space) in small_spaces() {
        let got = doubling_constant(&space).value;
        let want = oracle_doubling(&space);
        checks.push((
            format!("{sname} doubling"),
            ensure(rel_diff(got, want) <= ORACLE_RTOL, || format!("{got} vs oracle {want}")),
        ));
        for (wname, w) in weights(&space, 11) {
            for p in [1.5, 2.0, 3.0] {
                let got = ap_characteristic(&space, &w, p).unwrap().value;
                let want = oracle_ap(&space, &w, p);
                checks.push((
                    format!("{sname}/{wname} A_{p}"),
                    ensure(rel_diff(got, want) <= ORACLE_RTOL, || format!("{got} vs oracle {want}")),
                ));
            }
            if space.len() <= 12 {
                let got = lemma21_bounds(&space, &w, 2.0, SubsetSampler::default()).unwrap();
                let (c1, c2, bad) = oracle_measure_comparison(&space, &w, 2.0);
                checks.push((
                    format!("{sname}/{wname} measure comparison"),
                    ensure(
                        rel_diff(got.c1, c1) <= ORACLE_RTOL && rel_diff(got.c2, c2) <= ORACLE_RTOL && got.violations.len() == bad,
                        || format!("(c1, c2, violations) = ({}, {}, {}) vs oracle ({c1}, {c2}, {bad})", got.c1, got.c2, got.violations.len()),
                    ),
                ));
            }
            for seed in 0..3 {
                let f = random_function(space.len(), 100 + seed);
                let p = 2.0;
                for mg in &growths {
                    for q in [1.0, 1.5, 2.0] {
                        let got = generalized_morrey_norm(&space, &f, &w, q, mg).unwrap().value;
                        let want = oracle_gen_morrey(&space, &f, &w, q, mg);
                        checks.push((
                            format!("{sname}/{wname}/f{seed} gen_morrey q={q} {mg:?}"),
                            ensure(rel_diff(got, want) <= ORACLE_RTOL, || format!("{got} vs oracle {want}")),
                        ));
                    }
                }
                let nodes = dense_eps(p);
                let gp = GrandParams::with_grid(phi_g.clone(), EpsGrid::from_nodes(p, nodes.clone()).unwrap()).unwrap();
                let got = grand_lebesgue_on_grid(&space, &f, &w, &gp).unwrap().value;
                let want = oracle_grand_lebesgue(&space, &f, &w, p, &phi_g, &nodes);
                checks.push((
                    format!("{sname}/{wname}/f{seed} grand_lebesgue"),
                    ensure(rel_diff(got, want) <= ORACLE_RTOL, || format!("{got} vs oracle {want}")),
                ));
                let mg = &growths[0];
                let got = grand_generalized_morrey_norm(&space, &f, &w, &gp, mg).unwrap().value;
                let want = oracle_grand_gen_morrey(&space, &f, &w, p, &phi_g, mg, &nodes);
                checks.push((
                    format!("{sname}/{wname}/f{seed} grand_gen_morrey"),
                    ensure(rel_diff(got, want) <= ORACLE_RTOL, || format!("{got} vs oracle {want}")),
                ));
                let got = grand_weighted_morrey_norm(&space, &f, &w, &gp, 3.0).unwrap().value;
                let want = oracle_grand_weighted_morrey(&space, &f, &w, p, 3.0, &phi_g, &nodes);
                checks.push((
                    format!("{sname}/{wname}/f{seed} grand_weighted_morrey"),
                    ensure(rel_diff(got, want) <= ORACLE_RTOL, || format!("{got} vs oracle {want}")),
                ));
            }
        }
    }
    collect(checks)
}

// ---------------------------------------------------------------------------
// exact algebraic properties

pub const HOMOGENEITY_RTOL: f64 = 1e-12;
pub const MONOTONICITY_RTOL: f64 = 1e-12;
pub const TRIANGLE_RTOL: f64 = 1e-9;
pub const LINEARITY_RTOL: f64 = 1e-12;

type NormFn = Box<dyn Fn(&PointFunction) -> f64>;

/// The six norms (two exponents for the plain Lebesgue norm), as closures
/// over one space and weight. The flag marks the BMO seminorm.
pub fn norms<'a>(space: &'a FiniteSpace, w: &'a Weight) -> Vec<(&'static str, bool, Box<dyn Fn(&PointFunction) -> f64 + 'a>)> {
    let gp = GrandParams::new(2.0, GrandWeight::Power(1.0), 0).unwrap();
    let gp2 = gp.clone();
    let gp3 = gp.clone();
    let mg = MorreyGrowth::Power(0.5);
    let mg2 = mg.clone();
    vec![
        ("lp r=2", false, Box::new(move |f| lp_norm(space, f, w, 2.0).unwrap())),
        ("lp r=1.5", false, Box::new(move |f| lp_norm(space, f, w, 1.5).unwrap())),
        ("grand_lebesgue", false, Box::new(move |f| grand_lebesgue_on_grid(space, f, w, &gp).unwrap().value)),
        ("gen_morrey", false, Box::new(move |f| generalized_morrey_norm(space, f, w, 2.0, &mg).unwrap().value)),
        (
            "grand_gen_morrey",
            false,
            Box::new(move |f| grand_generalized_morrey_norm(space, f, w, &gp2, &mg2).unwrap().value),
        ),
        (
            "grand_weighted_morrey",
            false,
            Box::new(move |f| grand_weighted_morrey_norm(space, f, w, &gp3, 3.0).unwrap().value),
        ),
        ("bmo", true, Box::new(move |f| bmo_norm(space, f).unwrap().value)),
    ]
}

pub fn kernels(space: &FiniteSpace) -> Vec<ThetaKernel> {
    let mut out = vec![builtin_kernel(space, &KernelShape::InverseVolumeSigned, None, None).unwrap()];
    if let Ok(k) = builtin_kernel(space, &KernelShape::Riesz1d, None, None) {
        out.push(k);
    }
    out
}

fn pointwise(name: &str, got: &[f64], want: &[f64], scale: &[f64], rtol: f64) -> Check {
    for (x, ((g, w), s)) in got.iter().zip(want).zip(scale).enumerate() {
        if (g - w).abs() > rtol * s {
            return Err(format!("{name} at point {x}: {g} vs {w} (scale {s})"));
        }
    }
    Ok(())
}

/// Σ_y |K(x,y)| |f(y)| mass(y): the size of the terms summed into T f(x).
fn abs_sum(space: &FiniteSpace, k: &ThetaKernel, f: &[f64]) -> Vec<f64> {
    let n = space.len();
    (0..n)
        .map(|x| {
            (0..n)
                .filter(|&y| y != x)
                .map(|y| (k.entry(x, y) * f[y] * space.mass()[y]).abs())
                .sum()
        })
        .collect()
}

/// Every algebraic property on one space; returns (name, result) pairs.
pub fn algebraic_checks(sname: &str, space: &FiniteSpace) -> Vec<(String, Check)> {
    let n = space.len();
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pairs: Vec<(PointFunction, PointFunction)> =
        (0..8).map(|s| (random_function(n, 2 * s), random_function(n, 2 * s + 1))).collect();

    for (wname, w) in weights(space, 5) {
        for (name, seminorm, norm) in norms(space, &w) {
            let tag = format!("{sname}/{wname}/{name}");
            let mut homog = Ok(());
            let mut mono = Ok(());
            let mut tri = Ok(());
            for (f, g) in &pairs {
                let nf = norm(f);
                for lambda in [-3.7, 2.0, 1e-3, 1e6] {
                    let got = norm(&f.scaled(lambda));
                    let want = lambda.abs() * nf;
                    if homog.is_ok() && rel_diff(got, want) > HOMOGENEITY_RTOL {
                        homog = Err(format!("N({lambda}f) = {got}, |λ|N(f) = {want}"));
                    }
                }
                if !seminorm {
                    let bigger = PointFunction::new(
                        f.values()
                            .iter()
                            .map(|&v| {
                                let u: f64 = rng.gen_range(0.0..1.0);
                                if v < 0.0 { v - u } else { v + u }
                            })
                            .collect(),
                    )
                    .unwrap();
                    let nb = norm(&bigger);
                    if mono.is_ok() && nf > nb * (1.0 + MONOTONICITY_RTOL) {
                        mono = Err(format!("N(f) = {nf} > N(g) = {nb} with |f| ≤ |g|"));
                    }
                }
                let ng = norm(g);
                let ns = norm(&f.add(g));
                if tri.is_ok() && ns > (nf + ng) * (1.0 + TRIANGLE_RTOL) {
                    tri = Err(format!("N(f+g) = {ns} > N(f) + N(g) = {}", nf + ng));
                }
            }
            checks.push((format!("{tag} homogeneity"), homog));
            if !seminorm {
                checks.push((format!("{tag} monotonicity"), mono));
            }
            checks.push((format!("{tag} triangle"), tri));
        }
    }

    let mut sub = Ok(());
    let mut above = Ok(());
    for (f, g) in &pairs {
        let mf = maximal(space, f).unwrap();
        let mg = maximal(space, g).unwrap();
        let ms = maximal(space, &f.add(g)).unwrap();
        for x in 0..n {
            let bound = mf.values()[x] + mg.values()[x];
            if sub.is_ok() && ms.values()[x] > bound * (1.0 + 1e-12) {
                sub = Err(format!("M(f+g)({x}) = {} > Mf + Mg = {bound}", ms.values()[x]));
            }
            if above.is_ok() && !(mf.values()[x] >= f.values()[x].abs()) {
                above = Err(format!("Mf({x}) = {} < |f({x})| = {}", mf.values()[x], f.values()[x].abs()));
            }
        }
        let nc = noncentered_maximal(space, f, 1.0).unwrap();
        if above.is_ok() && nc.values().iter().zip(mf.values()).any(|(a, b)| a < b) {
            above = Err("non-centered maximal function below the centered one".into());
        }
    }
    checks.push((format!("{sname} M sublinearity"), sub));
    checks.push((format!("{sname} Mf ≥ |f|"), above));

    let b = random_function(n, 99);
    for k in kernels(space) {
        let tag = format!("{sname}/{}", k.name());
        let mut lin = Ok(());
        let mut two_form = Ok(());
        let mut constant = Ok(());
        for (f, g) in &pairs {
            let (a, c) = (1.75, -0.3);
            let combo = f.scaled(a).add(&g.scaled(c));
            let lhs = apply_cz(space, &k, &combo).unwrap();
            let rhs = apply_cz(space, &k, f).unwrap().scaled(a).add(&apply_cz(space, &k, g).unwrap().scaled(c));
            let scale: Vec<f64> = abs_sum(space, &k, f.scaled(a).values())
                .iter()
                .zip(abs_sum(space, &k, g.scaled(c).values()))
                .map(|(u, v)| u + v)
                .collect();
            if lin.is_ok() {
                lin = pointwise("T linearity", lhs.values(), rhs.values(), &scale, LINEARITY_RTOL);
            }

            let kernel_form = commutator(space, &k, &b, f).unwrap();
            let tf = apply_cz(space, &k, f).unwrap();
            let tbf = apply_cz(space, &k, &b.mul(f)).unwrap();
            let op_form = b.mul(&tf).add(&tbf.scaled(-1.0));
            let scale: Vec<f64> = abs_sum(space, &k, f.values())
                .iter()
                .zip(abs_sum(space, &k, b.mul(f).values()))
                .zip(b.values())
                .map(|((s1, s2), bx)| bx.abs() * s1 + s2)
                .collect();
            if two_form.is_ok() {
                two_form = pointwise("commutator forms", kernel_form.values(), op_form.values(), &scale, LINEARITY_RTOL);
            }
            for cst in [0.0, 2.5, -1e3] {
                let z = commutator(space, &k, &PointFunction::constant(n, cst), f).unwrap();
                if constant.is_ok() && !z.is_zero() {
                    constant = Err(format!("[{cst}, T]f = {:?}", z.values()));
                }
            }
        }
        checks.push((format!("{tag} T linearity"), lin));
        checks.push((format!("{tag} commutator two-form identity"), two_form));
        checks.push((format!("{tag} commutator with constant"), constant));
    }

    // dyadic values, so b + c is exact
    let mut shift = Ok(());
    for s in 0..8 {
        let b = random_function(n, 300 + s).map(|v| (v * 1024.0).round() / 1024.0);
        let base = bmo_norm(space, &b).unwrap().value;
        for c in [1.0, -7.25, 1e3] {
            let moved = bmo_norm(space, &b.map(|v| v + c)).unwrap().value;
            if shift.is_ok() && moved != base {
                shift = Err(format!("‖b + {c}‖_* = {moved} vs ‖b‖_* = {base}"));
            }
        }
    }
    checks.push((format!("{sname} BMO translation invariance"), shift));

    let f = random_function(n, 500);
    let w = Weight::unit(space);
    let gp = GrandParams::new(2.0, GrandWeight::Power(1.0), 0).unwrap();
    let nf = grand_lebesgue_norm(space, &f, &w, &gp).unwrap().value;
    let n3 = grand_lebesgue_norm(space, &f.scaled(-3.0), &w, &gp).unwrap().value;
    checks.push((
        format!("{sname} refined grand_lebesgue homogeneity"),
        ensure(rel_diff(n3, 3.0 * nf) <= HOMOGENEITY_RTOL, || format!("{n3} vs {}", 3.0 * nf)),
    ));
    checks
}

pub fn algebraic_suite() -> Vec<String> {
    let mut all = Vec::new();
    for (name, space) in algebraic_spaces() {
        all.extend(collect(algebraic_checks(name, &space)));
    }
    all
}
