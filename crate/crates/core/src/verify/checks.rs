//! The individual inequality checks and the shared evaluation setup.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{
    check_condition_24, check_condition_25, default_growth_grid, ConditionReport, GrandConvention, GrandParams,
    GrandWeight, MorreyGrowth, PhiMembership,
};
use crate::kernel::{apply_cz, commutator, validate_dini, validate_kernel, KernelFile, KernelValidation, ThetaKernel, TripleSampler};
use crate::maximal::{maximal, noncentered_maximal, vector_maximal};
use crate::norms::{bmo_norm, lemma24_series_check, lp_norm, relative_change, MorreyEvaluator, PointFunction};
use crate::space::{FiniteSpace, SpaceFile};
use crate::verify::family::{TestFamily, VectorFamily};
use crate::verify::report::{FunctionRecord, Hypothesis, InequalityReport, RefinementRun, Status, Witness, STABILITY_THRESHOLD};
use crate::weight::{ap_characteristic, Weight, DEFAULT_SEED};

/// Identifiers of the available checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckId {
    Thm21,
    Cor22,
    Thm23,
    Lem24,
    Lem25,
    Lem31,
    Lem32,
    Thm31,
    Thm32,
    Cond24,
    Cond25,
    Dini31,
}

impl CheckId {
    pub const ALL: [CheckId; 12] = [
        CheckId::Thm21,
        CheckId::Cor22,
        CheckId::Thm23,
        CheckId::Lem24,
        CheckId::Lem25,
        CheckId::Lem31,
        CheckId::Lem32,
        CheckId::Thm31,
        CheckId::Thm32,
        CheckId::Cond24,
        CheckId::Cond25,
        CheckId::Dini31,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::Thm21 => "thm2.1",
            CheckId::Cor22 => "cor2.2",
            CheckId::Thm23 => "thm2.3",
            CheckId::Lem24 => "lem2.4",
            CheckId::Lem25 => "lem2.5",
            CheckId::Lem31 => "lem3.1",
            CheckId::Lem32 => "lem3.2",
            CheckId::Thm31 => "thm3.1",
            CheckId::Thm32 => "thm3.2",
            CheckId::Cond24 => "cond2.4",
            CheckId::Cond25 => "cond2.5",
            CheckId::Dini31 => "dini3.1",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            CheckId::Thm21 => "maximal operator M on the grand generalized Morrey norm",
            CheckId::Cor22 => "non-centered power maximal operator on the grand generalized Morrey norm",
            CheckId::Thm23 => "vector-valued maximal inequality on the grand generalized Morrey norm",
            CheckId::Lem24 => "dyadic series of the growth function over concentric doublings",
            CheckId::Lem25 => "vector-valued maximal inequality on the weighted Lebesgue norm",
            CheckId::Lem31 => "CZ operator on the generalized Morrey norm at fixed exponent",
            CheckId::Lem32 => "BMO commutator on the generalized Morrey norm at fixed exponent",
            CheckId::Thm31 => "CZ operator on the grand generalized Morrey norm",
            CheckId::Thm32 => "BMO commutator on the grand generalized Morrey norm",
            CheckId::Cond24 => "almost-decreasing growth quotient",
            CheckId::Cond25 => "tail integral of the growth function",
            CheckId::Dini31 => "Dini integral of the kernel modulus",
        }
    }

    /// Whether the check needs a kernel.
    pub fn needs_kernel(self) -> bool {
        matches!(self, CheckId::Lem31 | CheckId::Lem32 | CheckId::Thm31 | CheckId::Thm32 | CheckId::Dini31)
    }

    /// Whether the check needs the multiplier b.
    pub fn needs_b(self) -> bool {
        matches!(self, CheckId::Lem32 | CheckId::Thm32)
    }

    /// (depends on the ε-grid or sample grid, depends on the space).
    fn resolution(self) -> (bool, bool) {
        match self {
            CheckId::Thm21 | CheckId::Cor22 | CheckId::Thm23 | CheckId::Thm31 | CheckId::Thm32 => (true, true),
            CheckId::Lem24 | CheckId::Lem25 | CheckId::Lem31 | CheckId::Lem32 | CheckId::Dini31 => (false, true),
            CheckId::Cond24 | CheckId::Cond25 => (true, false),
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| {
            let known: Vec<&str> = CheckId::ALL.iter().map(|c| c.as_str()).collect();
            Error::config("checks", format!("unknown check id `{s}` (known: {})", known.join(", ")))
        })
    }
}

impl Serialize for CheckId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for CheckId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Everything needed to build a [`Setup`], and to rebuild it refined.
#[derive(Debug, Clone)]
pub struct SetupSpec {
    pub space_file: SpaceFile,
    pub weight: String,
    pub p: f64,
    /// Outer Morrey exponent; when set, the Morrey-norm ratios use the grand
    /// weighted Morrey norm with ω(B)^{1/q − 1/(p−ε)} instead of φ_m.
    pub q: Option<f64>,
    pub phi_g: GrandWeight,
    pub phi_m: MorreyGrowth,
    pub eps_level: u32,
    pub convention: GrandConvention,
    pub kernel: Option<KernelFile>,
    pub b: Option<String>,
    pub r_pow: f64,
    pub seed: u64,
    pub triple_sampler: TripleSampler,
    pub refine_space: bool,
    pub refine_eps: bool,
    pub record_functions: bool,
}

impl SetupSpec {
    /// Defaults: unit weight, p = 2, φ_g(ε) = ε, φ_m(t) = t^{1/2}, r = 1.5.
    pub fn new(space_file: SpaceFile) -> Self {
        SetupSpec {
            space_file,
            weight: "unit".into(),
            p: 2.0,
            q: None,
            phi_g: GrandWeight::Power(1.0),
            phi_m: MorreyGrowth::Power(0.5),
            eps_level: 0,
            convention: GrandConvention::Literal,
            kernel: None,
            b: None,
            r_pow: 1.5,
            seed: DEFAULT_SEED,
            triple_sampler: TripleSampler::default(),
            refine_space: true,
            refine_eps: true,
            record_functions: false,
        }
    }
}

struct Gates {
    ap: f64,
    phi_p: PhiMembership,
    cond24: ConditionReport,
    cond25: ConditionReport,
}

/// A resolved configuration with lazily built families, cached denominators
/// and lazily built refinements.
pub struct Setup {
    spec: SetupSpec,
    space: FiniteSpace,
    weight: Weight,
    gp: GrandParams,
    kernel: Option<ThetaKernel>,
    kernel_validation: Option<KernelValidation>,
    b: Option<PointFunction>,
    family: OnceLock<TestFamily>,
    vfamily: OnceLock<VectorFamily>,
    grand_rhs: OnceLock<Vec<(f64, f64, usize)>>,
    slice_rhs: OnceLock<Vec<f64>>,
    vec_grand_rhs: OnceLock<Vec<f64>>,
    vec_lp_rhs: OnceLock<Vec<f64>>,
    gates: OnceLock<Gates>,
    eps_refined: OnceLock<std::result::Result<Box<Setup>, String>>,
    space_refined: OnceLock<std::result::Result<Box<Setup>, String>>,
}

impl Setup {
    pub fn new(spec: SetupSpec) -> Result<Self> {
        if !(spec.r_pow >= 1.0 && spec.r_pow.is_finite()) {
            return Err(Error::config("r_pow", format!("must satisfy 1 ≤ r < ∞, got {}", spec.r_pow)));
        }
        if let Some(q) = spec.q {
            if !(q >= spec.p && q.is_finite()) {
                return Err(Error::config("q", format!("must satisfy p ≤ q < ∞, got q = {q}, p = {}", spec.p)));
            }
        }
        let space = spec.space_file.build()?;
        let weight = spec.space_file.weight(&space, &spec.weight)?;
        let gp = GrandParams::new(spec.p, spec.phi_g.clone(), spec.eps_level)
            .map_err(|e| Error::config("p", e.to_string()))?
            .with_convention(spec.convention);
        let (kernel, kernel_validation) = match &spec.kernel {
            Some(k) => {
                let mut kernel = k.build(&space)?;
                let v = validate_kernel(&space, &mut kernel, spec.triple_sampler)?;
                (Some(kernel), Some(v))
            }
            None => (None, None),
        };
        let b = match &spec.b {
            Some(name) => Some(spec.space_file.function(&space, name, "b")?),
            None => None,
        };
        Ok(Setup {
            spec,
            space,
            weight,
            gp,
            kernel,
            kernel_validation,
            b,
            family: OnceLock::new(),
            vfamily: OnceLock::new(),
            grand_rhs: OnceLock::new(),
            slice_rhs: OnceLock::new(),
            vec_grand_rhs: OnceLock::new(),
            vec_lp_rhs: OnceLock::new(),
            gates: OnceLock::new(),
            eps_refined: OnceLock::new(),
            space_refined: OnceLock::new(),
        })
    }

    pub fn spec(&self) -> &SetupSpec {
        &self.spec
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn grand_params(&self) -> &GrandParams {
        &self.gp
    }

    pub fn kernel(&self) -> Option<&ThetaKernel> {
        self.kernel.as_ref()
    }

    pub fn kernel_validation(&self) -> Option<&KernelValidation> {
        self.kernel_validation.as_ref()
    }

    pub fn b(&self) -> Option<&PointFunction> {
        self.b.as_ref()
    }

    pub fn family(&self) -> &TestFamily {
        self.family
            .get_or_init(|| TestFamily::standard(&self.space, &self.weight, self.spec.p, self.spec.seed))
    }

    pub fn vector_family(&self) -> &VectorFamily {
        self.vfamily.get_or_init(|| VectorFamily::standard(&self.space, self.spec.seed))
    }

    fn gates(&self) -> &Gates {
        self.gates.get_or_init(|| Gates {
            ap: ap_characteristic(&self.space, &self.weight, self.spec.p)
                .map(|r| r.value)
                .unwrap_or(f64::NAN),
            phi_p: self.spec.phi_g.membership(self.spec.p),
            cond24: check_condition_24(&self.spec.phi_m, &default_growth_grid(0)).expect("default grid is valid"),
            cond25: check_condition_25(&self.spec.phi_m, &default_growth_grid(0)).expect("default grid is valid"),
        })
    }

    fn evaluator(&self) -> MorreyEvaluator<'_> {
        match self.spec.q {
            Some(q) => MorreyEvaluator::mass_power(&self.space, &self.weight, q),
            None => MorreyEvaluator::generalized(&self.space, &self.weight, &self.spec.phi_m),
        }
        .expect("weight matches space")
    }

    /// Grand generalized Morrey norms of the scalar family.
    fn grand_rhs(&self) -> &[(f64, f64, usize)] {
        self.grand_rhs.get_or_init(|| {
            let ev = self.evaluator();
            self.family()
                .functions()
                .par_iter()
                .map(|f| ev.grand(f.values(), &self.gp))
                .collect()
        })
    }

    /// Generalized Morrey norms of the scalar family at exponent p.
    fn slice_rhs(&self) -> &[f64] {
        self.slice_rhs.get_or_init(|| {
            let ev = self.evaluator();
            self.family()
                .functions()
                .par_iter()
                .map(|f| ev.slice(f.values(), self.spec.p).value)
                .collect()
        })
    }

    fn vec_grand_rhs(&self) -> &[f64] {
        self.vec_grand_rhs.get_or_init(|| {
            let ev = self.evaluator();
            self.vector_family()
                .vectors()
                .par_iter()
                .map(|v| ev.grand(v.pointwise_lr(self.spec.r_pow).values(), &self.gp).0)
                .collect()
        })
    }

    fn vec_lp_rhs(&self) -> &[f64] {
        self.vec_lp_rhs.get_or_init(|| {
            self.vector_family()
                .vectors()
                .par_iter()
                .map(|v| lp_norm(&self.space, &v.pointwise_lr(self.spec.r_pow), &self.weight, self.spec.p).expect("lengths match"))
                .collect()
        })
    }

    /// The same setup with the ε-grid refined once.
    pub fn eps_refined(&self) -> std::result::Result<&Setup, String> {
        self.eps_refined
            .get_or_init(|| {
                let mut spec = self.spec.clone();
                spec.eps_level += 1;
                spec.refine_eps = false;
                spec.refine_space = false;
                Setup::new(spec).map(Box::new).map_err(|e| e.to_string())
            })
            .as_deref()
            .map_err(Clone::clone)
    }

    /// The same setup on the point-doubled space.
    pub fn space_refined(&self) -> std::result::Result<&Setup, String> {
        self.space_refined
            .get_or_init(|| {
                let Some(file) = self.spec.space_file.refined() else {
                    return Err("the space has no refinement (explicit table, ids or masses)".to_string());
                };
                let mut spec = self.spec.clone();
                spec.space_file = file;
                spec.refine_eps = false;
                spec.refine_space = false;
                Setup::new(spec)
                    .map(Box::new)
                    .map_err(|e| format!("refined setup unavailable: {e}"))
            })
            .as_deref()
            .map_err(Clone::clone)
    }
}

/// Result of one check at one resolution.
#[derive(Debug, Clone, Default)]
struct Measurement {
    empirical_c: Option<f64>,
    witness: Witness,
    records: Vec<FunctionRecord>,
    exact_failures: Vec<String>,
    notes: Vec<String>,
    vacuous: bool,
}

/// Per-function numerator with the ε and set attaining it.
struct Lhs {
    value: f64,
    eps: Option<f64>,
    set: Option<usize>,
}

/// Relative slack for assertions that hold exactly in real arithmetic.
const EXACT_RTOL: f64 = 1e-12;
const MAX_LISTED_FAILURES: usize = 10;

fn ratio_scan(setup: &Setup, names: &[String], lhs: &[Lhs], rhs: &[f64], min_ratio: Option<f64>) -> Measurement {
    let mut m = Measurement::default();
    let mut best: Option<(f64, usize)> = None;
    for (i, (l, &r)) in lhs.iter().zip(rhs).enumerate() {
        let ratio = l.value / r;
        if setup.spec.record_functions {
            m.records.push(FunctionRecord {
                name: names[i].clone(),
                lhs: l.value,
                rhs: r,
                ratio,
            });
        }
        if let Some(floor) = min_ratio {
            if !(ratio >= floor * (1.0 - EXACT_RTOL)) && m.exact_failures.len() < MAX_LISTED_FAILURES {
                m.exact_failures
                    .push(format!("{}: ratio {ratio} below the exact lower bound {floor}", names[i]));
            }
        }
        if best.is_none_or(|(b, _)| ratio > b) {
            best = Some((ratio, i));
        }
    }
    if let Some((c, i)) = best {
        m.empirical_c = Some(c);
        m.witness = Witness {
            function: Some(names[i].clone()),
            eps: lhs[i].eps,
            ball: lhs[i].set.map(|s| setup.space.balls().set_witness(&setup.space, s)),
            detail: None,
        };
    }
    m
}

fn grand_lhs(setup: &Setup, ev: &MorreyEvaluator<'_>, op: impl Fn(&PointFunction) -> PointFunction + Sync) -> Vec<Lhs> {
    setup
        .family()
        .functions()
        .par_iter()
        .map(|f| {
            let (value, eps, set) = ev.grand(op(f).values(), &setup.gp);
            Lhs {
                value,
                eps: Some(eps),
                set: Some(set),
            }
        })
        .collect()
}

fn slice_lhs(setup: &Setup, ev: &MorreyEvaluator<'_>, op: impl Fn(&PointFunction) -> PointFunction + Sync) -> Vec<Lhs> {
    setup
        .family()
        .functions()
        .par_iter()
        .map(|f| {
            let s = ev.slice(op(f).values(), setup.spec.p);
            Lhs {
                value: s.value,
                eps: None,
                set: Some(s.set),
            }
        })
        .collect()
}

fn require<'a, T>(value: Option<&'a T>, what: &str) -> Result<&'a T> {
    value.ok_or_else(|| Error::config(what, "required by the requested check"))
}

fn measure(setup: &Setup, id: CheckId) -> Result<Measurement> {
    let space = &setup.space;
    let names = setup.family().names();
    match id {
        CheckId::Thm21 => {
            let ev = setup.evaluator();
            let lhs = grand_lhs(setup, &ev, |f| maximal(space, f).expect("lengths match"));
            let rhs: Vec<f64> = setup.grand_rhs().iter().map(|r| r.0).collect();
            Ok(ratio_scan(setup, names, &lhs, &rhs, Some(1.0)))
        }
        CheckId::Cor22 => {
            let ev = setup.evaluator();
            let r = setup.spec.r_pow;
            let lhs = grand_lhs(setup, &ev, |f| noncentered_maximal(space, f, r).expect("valid r"));
            let rhs: Vec<f64> = setup.grand_rhs().iter().map(|r| r.0).collect();
            Ok(ratio_scan(setup, names, &lhs, &rhs, Some(1.0)))
        }
        CheckId::Thm23 => {
            let r = setup.spec.r_pow;
            if r <= 1.0 {
                return Ok(Measurement {
                    notes: vec![format!("r = {r} is outside the range 1 < r < ∞; inequality not evaluated")],
                    ..Measurement::default()
                });
            }
            let ev = setup.evaluator();
            let vf = setup.vector_family();
            let lhs: Vec<Lhs> = vf
                .vectors()
                .par_iter()
                .map(|v| {
                    let (value, eps, set) = ev.grand(vector_maximal(space, v, r).expect("valid r").values(), &setup.gp);
                    Lhs {
                        value,
                        eps: Some(eps),
                        set: Some(set),
                    }
                })
                .collect();
            Ok(ratio_scan(setup, vf.names(), &lhs, setup.vec_grand_rhs(), Some(1.0)))
        }
        CheckId::Lem25 => {
            let r = setup.spec.r_pow;
            if r <= 1.0 {
                return Ok(Measurement {
                    notes: vec![format!("r = {r} is outside the range 1 < r < ∞; inequality not evaluated")],
                    ..Measurement::default()
                });
            }
            let vf = setup.vector_family();
            let lhs: Vec<Lhs> = vf
                .vectors()
                .par_iter()
                .map(|v| Lhs {
                    value: lp_norm(space, &vector_maximal(space, v, r).expect("valid r"), &setup.weight, setup.spec.p)
                        .expect("lengths match"),
                    eps: None,
                    set: None,
                })
                .collect();
            Ok(ratio_scan(setup, vf.names(), &lhs, setup.vec_lp_rhs(), Some(1.0)))
        }
        CheckId::Lem31 | CheckId::Thm31 => {
            let kernel = require(setup.kernel.as_ref(), "kernel_file")?;
            let ev = setup.evaluator();
            let op = |f: &PointFunction| apply_cz(space, kernel, f).expect("lengths match");
            if id == CheckId::Lem31 {
                let lhs = slice_lhs(setup, &ev, op);
                Ok(ratio_scan(setup, names, &lhs, setup.slice_rhs(), None))
            } else {
                let lhs = grand_lhs(setup, &ev, op);
                let rhs: Vec<f64> = setup.grand_rhs().iter().map(|r| r.0).collect();
                Ok(ratio_scan(setup, names, &lhs, &rhs, None))
            }
        }
        CheckId::Lem32 | CheckId::Thm32 => {
            let kernel = require(setup.kernel.as_ref(), "kernel_file")?;
            let b = require(setup.b.as_ref(), "b")?;
            let bmo = bmo_norm(space, b)?;
            let ev = setup.evaluator();
            let op = |f: &PointFunction| commutator(space, kernel, b, f).expect("lengths match");
            let lhs = if id == CheckId::Lem32 {
                slice_lhs(setup, &ev, op)
            } else {
                grand_lhs(setup, &ev, op)
            };
            if bmo.value == 0.0 {
                let mut m = Measurement {
                    vacuous: true,
                    ..Measurement::default()
                };
                for (name, l) in names.iter().zip(&lhs) {
                    if l.value != 0.0 && m.exact_failures.len() < MAX_LISTED_FAILURES {
                        m.exact_failures
                            .push(format!("{name}: commutator with constant b has norm {}", l.value));
                    }
                }
                m.notes.push("b is constant (‖b‖_* = 0); asserted that the commutator vanishes".into());
                return Ok(m);
            }
            let rhs: Vec<f64> = if id == CheckId::Lem32 {
                setup.slice_rhs().iter().map(|r| bmo.value * r).collect()
            } else {
                setup.grand_rhs().iter().map(|r| bmo.value * r.0).collect()
            };
            let mut m = ratio_scan(setup, names, &lhs, &rhs, None);
            m.notes.push(format!("‖b‖_* = {} attained on ball at {} radius {}", bmo.value, bmo.ball.center, bmo.ball.radius));
            Ok(m)
        }
        CheckId::Lem24 => {
            let r = lemma24_series_check(space, &setup.weight, &setup.spec.phi_m, setup.spec.p)?;
            Ok(Measurement {
                empirical_c: Some(r.best_c),
                witness: Witness {
                    ball: Some(r.witness.clone()),
                    ..Witness::default()
                },
                notes: vec![format!(
                    "{} balls, at most {} doublings; series truncated at the first doubling equal to the whole space",
                    r.balls_checked, r.max_terms
                )],
                ..Measurement::default()
            })
        }
        CheckId::Cond24 | CheckId::Cond25 => {
            let grid = default_growth_grid(setup.spec.eps_level);
            let r = if id == CheckId::Cond24 {
                check_condition_24(&setup.spec.phi_m, &grid)?
            } else {
                check_condition_25(&setup.spec.phi_m, &grid)?
            };
            let mut m = Measurement {
                empirical_c: r.best_c,
                witness: Witness {
                    detail: Some(format!("at t = {:?}", r.witness)),
                    ..Witness::default()
                },
                notes: vec![format!("{} ({} sample points)", r.detail, r.grid_size)],
                ..Measurement::default()
            };
            if r.exact_assertion == Some(false) {
                m.exact_failures
                    .push(format!("power growth with exponent ≤ 1 must give constant 1, got {:?}", r.best_c));
            }
            Ok(m)
        }
        CheckId::Dini31 => {
            let kernel = require(setup.kernel.as_ref(), "kernel_file")?;
            Ok(match validate_dini(kernel.modulus()) {
                Ok(r) => Measurement {
                    empirical_c: Some(r.value),
                    witness: Witness {
                        detail: Some(format!("{} (error ≤ {:e})", r.method, r.error_estimate)),
                        ..Witness::default()
                    },
                    ..Measurement::default()
                },
                Err(e) => Measurement {
                    notes: vec![e.to_string()],
                    ..Measurement::default()
                },
            })
        }
    }
}

fn hypotheses(setup: &Setup, id: CheckId) -> Vec<Hypothesis> {
    let g = setup.gates();
    let ap = || Hypothesis {
        name: "A_p".into(),
        holds: g.ap.is_finite(),
        value: Some(g.ap),
        detail: format!("A_p characteristic at p = {}", setup.spec.p),
    };
    let phi_p = || Hypothesis {
        name: "Phi_p".into(),
        holds: g.phi_p.holds,
        value: Some(g.phi_p.value_at_smallest_probe),
        detail: format!(
            "φ_g positive: {}, bounded: {}, tends to 0: {}",
            g.phi_p.positive, g.phi_p.bounded, g.phi_p.tends_to_zero
        ),
    };
    let cond = |name: &str, r: &ConditionReport| Hypothesis {
        name: name.into(),
        holds: r.holds,
        value: r.best_c,
        detail: r.detail.clone(),
    };
    let cond24 = || cond("cond2.4", &g.cond24);
    let cond25 = || cond("cond2.5", &g.cond25);
    let r_gate = || Hypothesis {
        name: "r > 1".into(),
        holds: setup.spec.r_pow > 1.0,
        value: Some(setup.spec.r_pow),
        detail: "vector-valued exponent".into(),
    };
    let kernel = || -> Vec<Hypothesis> {
        let Some(v) = setup.kernel_validation.as_ref() else {
            return vec![Hypothesis {
                name: "kernel".into(),
                holds: false,
                value: None,
                detail: "no kernel configured".into(),
            }];
        };
        vec![
            Hypothesis {
                name: "kernel size".into(),
                holds: v.size.c_size.is_finite(),
                value: Some(v.size.c_size),
                detail: "max |K(x,y)|·V(x,y)".into(),
            },
            Hypothesis {
                name: "kernel smoothness".into(),
                holds: v.smoothness.status != crate::kernel::SmoothnessStatus::Failed,
                value: v.smoothness.c_smooth,
                detail: format!(
                    "{:?} over {} triples{}",
                    v.smoothness.status,
                    v.smoothness.triples_checked,
                    if v.smoothness.exhaustive { " (exhaustive)" } else { " (sampled)" }
                ),
            },
            Hypothesis {
                name: "dini".into(),
                holds: v.dini.is_ok(),
                value: v.dini.as_ref().ok().map(|d| d.value),
                detail: match &v.dini {
                    Ok(d) => d.method.clone(),
                    Err(e) => e.clone(),
                },
            },
        ]
    };
    let mut h = Vec::new();
    match id {
        CheckId::Thm21 => h.extend([ap(), phi_p(), cond24()]),
        CheckId::Cor22 => h.extend([ap(), cond24()]),
        CheckId::Thm23 => h.extend([ap(), phi_p(), cond24(), cond25(), r_gate()]),
        CheckId::Lem24 => h.push(cond25()),
        CheckId::Lem25 => h.extend([ap(), r_gate()]),
        CheckId::Lem31 | CheckId::Lem32 => {
            h.extend(kernel());
            h.extend([ap(), cond24(), cond25()]);
        }
        CheckId::Thm31 | CheckId::Thm32 => {
            h.extend(kernel());
            h.extend([ap(), phi_p(), cond24(), cond25()]);
        }
        CheckId::Cond24 => h.push(cond24()),
        CheckId::Cond25 => h.push(cond25()),
        CheckId::Dini31 => {
            if let Some(v) = setup.kernel_validation.as_ref() {
                h.push(Hypothesis {
                    name: "dini".into(),
                    holds: v.dini.is_ok(),
                    value: v.dini.as_ref().ok().map(|d| d.value),
                    detail: match &v.dini {
                        Ok(d) => d.method.clone(),
                        Err(e) => e.clone(),
                    },
                });
            }
        }
    }
    h
}

fn refinement_run(
    kind: &str,
    base: &Measurement,
    refined: std::result::Result<&Setup, String>,
    id: CheckId,
) -> Result<(RefinementRun, Vec<String>)> {
    match refined {
        Ok(s) => {
            let m = measure(s, id)?;
            let change = match (base.empirical_c, m.empirical_c) {
                (Some(a), Some(b)) => Some(relative_change(a, b)),
                (None, None) => Some(0.0),
                _ => None,
            };
            Ok((
                RefinementRun {
                    kind: kind.into(),
                    points: Some(s.space.len()),
                    eps_nodes: Some(s.gp.grid.len()),
                    empirical_c: m.empirical_c,
                    relative_change: change,
                    note: None,
                },
                m.exact_failures.into_iter().map(|f| format!("[{kind}-refined] {f}")).collect(),
            ))
        }
        Err(note) => Ok((
            RefinementRun {
                kind: kind.into(),
                points: None,
                eps_nodes: None,
                empirical_c: None,
                relative_change: None,
                note: Some(note),
            },
            Vec::new(),
        )),
    }
}

/// Runs one check at the base resolution and at each applicable refinement.
pub fn run_check(setup: &Setup, id: CheckId) -> Result<InequalityReport> {
    let base = measure(setup, id)?;
    let hyps = hypotheses(setup, id);
    let (uses_grid, uses_space) = id.resolution();
    let mut runs = Vec::new();
    let mut exact_failures = base.exact_failures.clone();
    let mut notes = base.notes.clone();
    if uses_grid && setup.spec.refine_eps {
        let (run, fails) = refinement_run("eps", &base, setup.eps_refined(), id)?;
        runs.push(run);
        exact_failures.extend(fails);
    }
    if uses_space && setup.spec.refine_space {
        let (run, fails) = refinement_run("space", &base, setup.space_refined(), id)?;
        runs.push(run);
        exact_failures.extend(fails);
    }
    if !setup.spec.refine_eps && !setup.spec.refine_space {
        notes.push("refinement disabled".into());
    }
    let delta = if runs.is_empty() {
        None
    } else {
        runs.iter()
            .map(|r| r.relative_change)
            .try_fold(0.0f64, |m, c| c.map(|c| m.max(c)))
    };
    let status = if hyps.iter().any(|h| !h.holds) {
        Status::FailedHypothesis
    } else if base.vacuous {
        Status::Vacuous
    } else {
        match delta {
            Some(d) if d < STABILITY_THRESHOLD => Status::Stable,
            _ => Status::Unstable,
        }
    };
    if status == Status::Unstable && delta.is_none() {
        notes.push("no refinement available, so stability could not be established".into());
    }
    Ok(InequalityReport {
        check_id: id.as_str().into(),
        description: id.description().into(),
        points: setup.space.len(),
        eps_nodes: uses_grid.then(|| {
            if matches!(id, CheckId::Cond24 | CheckId::Cond25) {
                default_growth_grid(setup.spec.eps_level).len()
            } else {
                setup.gp.grid.len()
            }
        }),
        empirical_c: base.empirical_c,
        witness: base.witness,
        refinement_delta: delta,
        refinement: runs,
        status,
        hypotheses: hyps,
        exact_failures,
        notes,
        functions: base.records,
    })
}

pub fn check_theorem_2_1(setup: &Setup) -> Result<InequalityReport> {
    run_check(setup, CheckId::Thm21)
}

pub fn check_corollary_2_2(setup: &Setup) -> Result<InequalityReport> {
    run_check(setup, CheckId::Cor22)
}

pub fn check_theorem_2_3(setup: &Setup) -> Result<InequalityReport> {
    run_check(setup, CheckId::Thm23)
}

pub fn check_lemma_2_4(setup: &Setup) -> Result<InequalityReport> {
    run_check(setup, CheckId::Lem24)
}

pub fn check_lemma_2_5(setup: &Setup) -> Result<InequalityReport> {
    run_check(setup, CheckId::Lem25)
}

pub fn check_lemma_3_1(setup: &Setup) -> Result<InequalityReport> {
    run_check(setup, CheckId::Lem31)
}

pub fn check_lemma_3_2(setup: &Setup) -> Result<InequalityReport> {
    run_check(setup, CheckId::Lem32)
}

pub fn check_theorem_3_1(setup: &Setup) -> Result<InequalityReport> {
    run_check(setup, CheckId::Thm31)
}

pub fn check_theorem_3_2(setup: &Setup) -> Result<InequalityReport> {
    run_check(setup, CheckId::Thm32)
}
