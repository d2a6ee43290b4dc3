//! θ-type Calderón–Zygmund kernels: Dini moduli, size and smoothness
//! validation, operator application and BMO commutators.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::Table;
use crate::norms::PointFunction;
use crate::quad;
use crate::space::{volume_table, FiniteSpace, Layout};
use crate::weight::DEFAULT_SEED;

/// Non-negative, non-decreasing modulus θ on [0, ∞).
#[derive(Clone)]
pub enum DiniModulus {
    /// scale·t^δ, δ ∈ (0, 1].
    Power { delta: f64, scale: f64 },
    /// scale·t.
    Linear { scale: f64 },
    /// θ ≡ value; only Dini when value = 0.
    Constant { value: f64 },
    Table(Table),
    Custom { name: String, theta: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl fmt::Debug for DiniModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiniModulus::Power { delta, scale } => write!(f, "Power {{ delta: {delta}, scale: {scale} }}"),
            DiniModulus::Linear { scale } => write!(f, "Linear {{ scale: {scale} }}"),
            DiniModulus::Constant { value } => write!(f, "Constant {{ value: {value} }}"),
            DiniModulus::Table(t) => write!(f, "Table({} nodes)", t.t.len()),
            DiniModulus::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl PartialEq for DiniModulus {
    fn eq(&self, other: &Self) -> bool {
        use DiniModulus::*;
        match (self, other) {
            (Power { delta: a, scale: b }, Power { delta: c, scale: d }) => a == c && b == d,
            (Linear { scale: a }, Linear { scale: b }) => a == b,
            (Constant { value: a }, Constant { value: b }) => a == b,
            (Table(a), Table(b)) => a == b,
            (Custom { name: a, theta: f }, Custom { name: b, theta: g }) => a == b && Arc::ptr_eq(f, g),
            _ => false,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
enum ModulusShape {
    Power {
        delta: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Linear {
        #[serde(default = "one")]
        scale: f64,
    },
    Constant {
        value: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ModulusRepr {
    Shape(ModulusShape),
    Table(Table),
}

impl DiniModulus {
    pub fn power(delta: f64, scale: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::input(format!("Dini power δ must lie in (0, 1], got {delta}")));
        }
        check_scale(scale)?;
        Ok(DiniModulus::Power { delta, scale })
    }

    pub fn linear(scale: f64) -> Result<Self> {
        check_scale(scale)?;
        Ok(DiniModulus::Linear { scale })
    }

    pub fn constant(value: f64) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::input(format!("constant modulus must be non-negative, got {value}")));
        }
        Ok(DiniModulus::Constant { value })
    }

    pub fn table(t: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if t.len() != theta.len() || t.is_empty() {
            return Err(Error::input("modulus table needs equally many (≥1) `t` and `theta` entries"));
        }
        if t[0] < 0.0 || t.windows(2).any(|w| !(w[0] < w[1])) || t.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("modulus table `t` must be non-negative, finite and strictly increasing"));
        }
        if theta.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || theta.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::input("modulus table `theta` must be non-negative and non-decreasing"));
        }
        Ok(DiniModulus::Table(Table { t, phi: theta }))
    }

    pub fn custom(name: impl Into<String>, theta: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        DiniModulus::Custom {
            name: name.into(),
            theta: Arc::new(theta),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            DiniModulus::Power { delta, scale } => scale * t.powf(*delta),
            DiniModulus::Linear { scale } => scale * t,
            DiniModulus::Constant { value } => *value,
            DiniModulus::Table(tab) => tab.eval(t),
            DiniModulus::Custom { theta, .. } => theta(t),
        }
    }

    /// The same modulus multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            DiniModulus::Power { delta, scale } => DiniModulus::Power {
                delta: *delta,
                scale: scale * c,
            },
            DiniModulus::Linear { scale } => DiniModulus::Linear { scale: scale * c },
            DiniModulus::Constant { value } => DiniModulus::Constant { value: value * c },
            DiniModulus::Table(t) => DiniModulus::Table(Table {
                t: t.t.clone(),
                phi: t.phi.iter().map(|v| v * c).collect(),
            }),
            DiniModulus::Custom { name, theta } => {
                let theta = theta.clone();
                DiniModulus::custom(format!("{c}·{name}"), move |t| c * theta(t))
            }
        }
    }

    fn from_repr(r: ModulusRepr) -> Result<Self> {
        match r {
            ModulusRepr::Shape(ModulusShape::Power { delta, scale }) => Self::power(delta, scale),
            ModulusRepr::Shape(ModulusShape::Linear { scale }) => Self::linear(scale),
            ModulusRepr::Shape(ModulusShape::Constant { value }) => Self::constant(value),
            ModulusRepr::Table(t) => Self::table(t.t, t.phi),
        }
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if scale > 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::input(format!("modulus scale must be positive, got {scale}")))
    }
}

impl Serialize for DiniModulus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DiniModulus::Power { delta, scale } => ModulusShape::Power {
                delta: *delta,
                scale: *scale,
            }
            .serialize(s),
            DiniModulus::Linear { scale } => ModulusShape::Linear { scale: *scale }.serialize(s),
            DiniModulus::Constant { value } => ModulusShape::Constant { value: *value }.serialize(s),
            DiniModulus::Table(t) => {
                #[derive(Serialize)]
                struct Out<'a> {
                    t: &'a [f64],
                    theta: &'a [f64],
                }
                Out { t: &t.t, theta: &t.phi }.serialize(s)
            }
            DiniModulus::Custom { name, .. } => s.serialize_str(name),
        }
    }
}

impl<'de> Deserialize<'de> for DiniModulus {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Self::from_repr(ModulusRepr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiniReport {
    /// ∫₀¹ θ(t)/t dt.
    pub value: f64,
    pub method: String,
    pub error_estimate: f64,
}

/// Dyadic shells probed toward 0.
const DINI_SHELLS: i32 = 60;

/// ∫₀¹ θ(t)/t dt, in closed form for the built-in shapes and by dyadic-shell
/// quadrature otherwise; a non-decaying shell sequence is reported as divergence.
pub fn validate_dini(modulus: &DiniModulus) -> Result<DiniReport> {
    let closed = |value: f64| DiniReport {
        value,
        method: "closed form".into(),
        error_estimate: 0.0,
    };
    match modulus {
        DiniModulus::Power { delta, scale } => return Ok(closed(scale / delta)),
        DiniModulus::Linear { scale } => return Ok(closed(*scale)),
        DiniModulus::Constant { value } if *value == 0.0 => return Ok(closed(0.0)),
        DiniModulus::Constant { value } => {
            return Err(Error::DiniDivergence(format!(
                "θ ≡ {value} does not vanish at 0, so ∫₀¹ θ(t)/t dt diverges"
            )))
        }
        _ => {}
    }
    // shell k covers [2^{−k−1}, 2^{−k}]; in u = ln t the integrand is θ(e^u)
    let mut shells = Vec::with_capacity(DINI_SHELLS as usize);
    let mut err = 0.0;
    for k in 0..DINI_SHELLS {
        let hi = -(k as f64) * std::f64::consts::LN_2;
        let lo = hi - std::f64::consts::LN_2;
        let q = quad::integrate(|u: f64| modulus.eval(u.exp()), lo, hi, 1e-300, 1e-12, 200);
        if !q.value.is_finite() || q.value < 0.0 {
            return Err(Error::DiniDivergence(format!(
                "θ(t)/t is not integrable on [2^-{}, 2^-{k}]",
                k + 1
            )));
        }
        err += q.error;
        shells.push(q.value);
    }
    let body: f64 = shells.iter().sum();
    let (a, b) = (shells[shells.len() - 2], shells[shells.len() - 1]);
    if b == 0.0 {
        return Ok(DiniReport {
            value: body,
            method: "dyadic shells".into(),
            error_estimate: err,
        });
    }
    let rho = b / a;
    if !(rho < 1.0 - 1e-3) {
        return Err(Error::DiniDivergence(format!(
            "dyadic shells of ∫ θ(t)/t dt do not decay near 0 (ratio {rho:.6} at t = 2^-{DINI_SHELLS})"
        )));
    }
    // geometric decay keeps the shell ratio fixed; power-like decay k^{−α}
    // drifts toward 1 and is summable only for α > 1
    let k = DINI_SHELLS as f64;
    let mid = (DINI_SHELLS / 2) as usize;
    let rho_mid = shells[mid] / shells[mid - 1];
    let (tail, method) = if shells[mid - 1] > 0.0 && (rho - rho_mid).abs() <= 1e-2 {
        (b * rho / (1.0 - rho), "dyadic shells with geometric tail")
    } else {
        let alpha = (a / b).ln() / (k / (k - 1.0)).ln();
        if alpha <= 1.05 {
            return Err(Error::DiniDivergence(format!(
                "dyadic shells of ∫ θ(t)/t dt decay like k^-{alpha:.3}, which is not summable"
            )));
        }
        (b * k / (alpha - 1.0), "dyadic shells with power-law tail")
    };
    Ok(DiniReport {
        value: body + tail,
        method: method.into(),
        error_estimate: err + tail,
    })
}

/// Off-diagonal kernel K(x, y) with its Dini modulus and validation results.
#[derive(Debug, Clone)]
pub struct ThetaKernel {
    name: String,
    n: usize,
    entries: Vec<f64>,
    modulus: DiniModulus,
    size_constant: Option<f64>,
    smooth_constant: Option<f64>,
    smoothness_failed: bool,
    dini_value: Option<f64>,
}

impl ThetaKernel {
    /// Row-major n×n table; the diagonal is ignored and stored as 0.
    pub fn from_matrix(name: impl Into<String>, rows: &[Vec<f64>], modulus: DiniModulus) -> Result<Self> {
        let n = rows.len();
        let mut entries = vec![0.0; n * n];
        for (x, row) in rows.iter().enumerate() {
            Error::check_len(n, row.len())?;
            for (y, &v) in row.iter().enumerate() {
                if x == y {
                    continue;
                }
                if !v.is_finite() {
                    return Err(Error::input(format!("kernel entry ({x}, {y}) is not finite")));
                }
                entries[x * n + y] = v;
            }
        }
        Ok(ThetaKernel {
            name: name.into(),
            n,
            entries,
            modulus,
            size_constant: None,
            smooth_constant: None,
            smoothness_failed: false,
            dini_value: None,
        })
    }

    fn from_fn(name: &str, n: usize, modulus: DiniModulus, k: impl Fn(usize, usize) -> f64) -> Self {
        let mut entries = vec![0.0; n * n];
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    entries[x * n + y] = k(x, y);
                }
            }
        }
        ThetaKernel {
            name: name.into(),
            n,
            entries,
            modulus,
            size_constant: None,
            smooth_constant: None,
            smoothness_failed: false,
            dini_value: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.entries[x * self.n + y]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn modulus(&self) -> &DiniModulus {
        &self.modulus
    }

    /// Replaces the modulus and clears smoothness/Dini results.
    pub fn with_modulus(mut self, modulus: DiniModulus) -> Self {
        self.modulus = modulus;
        self.smooth_constant = None;
        self.smoothness_failed = false;
        self.dini_value = None;
        self
    }

    pub fn size_constant(&self) -> Option<f64> {
        self.size_constant
    }

    pub fn smooth_constant(&self) -> Option<f64> {
        self.smooth_constant
    }

    pub fn dini_value(&self) -> Option<f64> {
        self.dini_value
    }

    /// Size, smoothness (or vacuous) and Dini all passed.
    pub fn is_validated(&self) -> bool {
        self.size_constant.is_some_and(f64::is_finite) && !self.smoothness_failed && self.dini_value.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeReport {
    pub c_size: f64,
    pub witness: Option<(String, String)>,
}

/// C_size = max over x ≠ y of |K(x,y)|·V(x,y); stored on the kernel.
pub fn validate_kernel_size(space: &FiniteSpace, kernel: &mut ThetaKernel) -> Result<SizeReport> {
    Error::check_len(space.len(), kernel.n)?;
    let n = kernel.n;
    let v = volume_table(space);
    let mut best = (0.0, None);
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let c = kernel.entry(x, y).abs() * v[x * n + y];
            if c > best.0 || best.1.is_none() {
                best = (c, Some((x, y)));
            }
        }
    }
    kernel.size_constant = Some(best.0);
    Ok(SizeReport {
        c_size: best.0,
        witness: best.1.map(|(x, y)| (space.id(x).to_string(), space.id(y).to_string())),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothnessStatus {
    Ok,
    /// No triple with d(x,z) < d(x,y)/2.
    Vacuous,
    /// θ vanishes where the kernel difference does not.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothnessReport {
    pub status: SmoothnessStatus,
    pub c_smooth: Option<f64>,
    /// (x, y, z) attaining c_smooth, or the failing triple.
    pub witness: Option<(String, String, String)>,
    pub triples_checked: usize,
    pub exhaustive: bool,
}

/// How smoothness triples are visited.
#[derive(Debug, Clone, Copy)]
pub struct TripleSampler {
    /// Spaces up to this size are scanned exhaustively.
    pub exhaustive_max: usize,
    /// Pairs (x, y) drawn above that; every z is scanned for each pair.
    pub sampled_pairs: usize,
    pub seed: u64,
}

impl Default for TripleSampler {
    fn default() -> Self {
        TripleSampler {
            exhaustive_max: 64,
            sampled_pairs: 4096,
            seed: DEFAULT_SEED,
        }
    }
}

fn triple_pairs(n: usize, sampler: TripleSampler) -> (Vec<(usize, usize)>, bool) {
    if n <= sampler.exhaustive_max {
        let pairs = (0..n).flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y))).collect();
        return (pairs, true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let pairs = (0..sampler.sampled_pairs)
        .map(|_| {
            let x = rng.gen_range(0..n);
            let mut y = rng.gen_range(0..n - 1);
            if y >= x {
                y += 1;
            }
            (x, y)
        })
        .collect();
    (pairs, false)
}

#[derive(Debug, Clone, Copy)]
struct TripleStat {
    best: f64,
    best_at: Option<(usize, usize, usize)>,
    failure: Option<(usize, usize, usize)>,
    count: usize,
}

impl TripleStat {
    fn empty() -> Self {
        TripleStat {
            best: f64::NEG_INFINITY,
            best_at: None,
            failure: None,
            count: 0,
        }
    }

    fn merge(self, o: TripleStat) -> TripleStat {
        let (best, best_at) = if o.best > self.best { (o.best, o.best_at) } else { (self.best, self.best_at) };
        TripleStat {
            best,
            best_at,
            failure: self.failure.or(o.failure),
            count: self.count + o.count,
        }
    }
}

/// Scans admissible triples, mapping (numerator·V, t = d(x,z)/d(x,y)) to a ratio.
fn scan_triples(
    space: &FiniteSpace,
    kernel: &ThetaKernel,
    sampler: TripleSampler,
    ratio: impl Fn(f64, f64) -> Option<f64> + Sync,
) -> (TripleStat, bool) {
    let n = kernel.n;
    let vol = volume_table(space);
    let (pairs, exhaustive) = triple_pairs(n, sampler);
    let fam = space.balls();
    let stat = pairs
        .par_iter()
        .map(|&(x, y)| {
            let mut st = TripleStat::empty();
            let dxy = space.dist(x, y);
            let v = vol[x * n + y];
            let (kxy, kyx) = (kernel.entry(x, y), kernel.entry(y, x));
            for &z in fam.chain(x).order() {
                let z = z as usize;
                let dxz = space.dist(x, z);
                if !(dxz < dxy / 2.0) {
                    break;
                }
                if z == x {
                    continue;
                }
                st.count += 1;
                let num = ((kxy - kernel.entry(z, y)).abs() + (kyx - kernel.entry(y, z)).abs()) * v;
                match ratio(num, dxz / dxy) {
                    Some(r) => {
                        if r > st.best {
                            st.best = r;
                            st.best_at = Some((x, y, z));
                        }
                    }
                    None => {
                        if st.failure.is_none() {
                            st.failure = Some((x, y, z));
                        }
                    }
                }
            }
            st
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(TripleStat::empty(), TripleStat::merge);
    (stat, exhaustive)
}

fn ids3(space: &FiniteSpace, t: (usize, usize, usize)) -> (String, String, String) {
    (space.id(t.0).into(), space.id(t.1).into(), space.id(t.2).into())
}

/// C_smooth = max over d(x,z) < d(x,y)/2 of
/// [|K(x,y)−K(z,y)| + |K(y,x)−K(y,z)|]·V(x,y)/θ(d(x,z)/d(x,y)); stored on the kernel.
pub fn validate_kernel_smoothness(space: &FiniteSpace, kernel: &mut ThetaKernel, sampler: TripleSampler) -> Result<SmoothnessReport> {
    Error::check_len(space.len(), kernel.n)?;
    let modulus = kernel.modulus.clone();
    let (st, exhaustive) = scan_triples(space, kernel, sampler, |num, t| {
        let th = modulus.eval(t);
        if th > 0.0 {
            Some(num / th)
        } else if num == 0.0 {
            Some(1.0)
        } else {
            None
        }
    });
    let report = if let Some(fail) = st.failure {
        kernel.smooth_constant = None;
        kernel.smoothness_failed = true;
        SmoothnessReport {
            status: SmoothnessStatus::Failed,
            c_smooth: None,
            witness: Some(ids3(space, fail)),
            triples_checked: st.count,
            exhaustive,
        }
    } else if st.count == 0 {
        kernel.smooth_constant = None;
        kernel.smoothness_failed = false;
        SmoothnessReport {
            status: SmoothnessStatus::Vacuous,
            c_smooth: None,
            witness: None,
            triples_checked: 0,
            exhaustive,
        }
    } else {
        kernel.smooth_constant = Some(st.best);
        kernel.smoothness_failed = false;
        SmoothnessReport {
            status: SmoothnessStatus::Ok,
            c_smooth: Some(st.best),
            witness: st.best_at.map(|t| ids3(space, t)),
            triples_checked: st.count,
            exhaustive,
        }
    };
    Ok(report)
}

/// Smallest c with numerator·V ≤ c·t over the scanned triples, so that the
/// modulus c·t gives C_smooth = 1. Zero when no triple is admissible.
pub fn fit_linear_modulus(space: &FiniteSpace, kernel: &ThetaKernel, sampler: TripleSampler) -> f64 {
    let (st, _) = scan_triples(space, kernel, sampler, |num, t| Some(num / t));
    if st.count == 0 {
        0.0
    } else {
        st.best
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelValidation {
    pub size: SizeReport,
    pub smoothness: SmoothnessReport,
    pub dini: std::result::Result<DiniReport, String>,
    pub validated: bool,
}

/// Runs the size, smoothness and Dini validators.
pub fn validate_kernel(space: &FiniteSpace, kernel: &mut ThetaKernel, sampler: TripleSampler) -> Result<KernelValidation> {
    let size = validate_kernel_size(space, kernel)?;
    let smoothness = validate_kernel_smoothness(space, kernel, sampler)?;
    let dini = match validate_dini(&kernel.modulus) {
        Ok(r) => {
            kernel.dini_value = Some(r.value);
            Ok(r)
        }
        Err(Error::DiniDivergence(m)) => {
            kernel.dini_value = None;
            Err(format!("Dini condition fails: {m}"))
        }
        Err(e) => return Err(e),
    };
    Ok(KernelValidation {
        size,
        smoothness,
        dini,
        validated: kernel.is_validated(),
    })
}

/// T f(x) = Σ_{y≠x} K(x,y) f(y) mass(y).
pub fn apply_cz(space: &FiniteSpace, kernel: &ThetaKernel, f: &PointFunction) -> Result<PointFunction> {
    Error::check_len(space.len(), kernel.n)?;
    Error::check_len(space.len(), f.len())?;
    let n = kernel.n;
    let fm: Vec<f64> = f.values().iter().zip(space.mass()).map(|(v, m)| v * m).collect();
    let out = (0..n)
        .into_par_iter()
        .map(|x| {
            let row = &kernel.entries[x * n..(x + 1) * n];
            let mut s = 0.0;
            for y in 0..n {
                if y != x {
                    s += row[y] * fm[y];
                }
            }
            s
        })
        .collect();
    Ok(PointFunction::from_raw(out))
}

/// [b, T] f(x) = Σ_{y≠x} (b(x) − b(y)) K(x,y) f(y) mass(y).
pub fn commutator(space: &FiniteSpace, kernel: &ThetaKernel, b: &PointFunction, f: &PointFunction) -> Result<PointFunction> {
    Error::check_len(space.len(), kernel.n)?;
    Error::check_len(space.len(), f.len())?;
    Error::check_len(space.len(), b.len())?;
    let n = kernel.n;
    let bv = b.values();
    let fm: Vec<f64> = f.values().iter().zip(space.mass()).map(|(v, m)| v * m).collect();
    let out = (0..n)
        .into_par_iter()
        .map(|x| {
            let row = &kernel.entries[x * n..(x + 1) * n];
            let mut s = 0.0;
            for y in 0..n {
                if y != x {
                    s += (bv[x] - bv[y]) * row[y] * fm[y];
                }
            }
            s
        })
        .collect();
    Ok(PointFunction::from_raw(out))
}

/// ‖T‖ on L²(μ), the largest singular value of D^{1/2} K D^{1/2}.
pub fn l2_operator_norm(space: &FiniteSpace, kernel: &ThetaKernel) -> Result<f64> {
    Error::check_len(space.len(), kernel.n)?;
    let n = kernel.n;
    let sq: Vec<f64> = space.mass().iter().map(|m| m.sqrt()).collect();
    let a = DMatrix::from_fn(n, n, |x, y| if x == y { 0.0 } else { sq[x] * kernel.entries[x * n + y] * sq[y] });
    Ok(a.singular_values().max())
}

/// Built-in kernel families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelShape {
    /// 1/(pos(x) − pos(y)) on a 1-D lattice.
    Riesz1d,
    /// sign(pos(x) − pos(y))/V(x, y), ties in position broken by index.
    InverseVolumeSigned,
    UserMatrix,
}

/// Builds a built-in kernel. Without an explicit modulus the kernel gets the
/// linear modulus c·t fitted to it, so that its smoothness constant is 1.
pub fn builtin_kernel(
    space: &FiniteSpace,
    shape: &KernelShape,
    matrix: Option<&[Vec<f64>]>,
    modulus: Option<DiniModulus>,
) -> Result<ThetaKernel> {
    let n = space.len();
    let placeholder = DiniModulus::Linear { scale: 1.0 };
    let kernel = match shape {
        KernelShape::Riesz1d => {
            if !matches!(space.layout(), Layout::Lattice1d { .. }) {
                return Err(Error::input("riesz1d kernel requires a 1-D lattice space"));
            }
            ThetaKernel::from_fn("riesz1d", n, placeholder, |x, y| 1.0 / (space.pos(x) - space.pos(y)))
        }
        KernelShape::InverseVolumeSigned => {
            let v = volume_table(space);
            ThetaKernel::from_fn("inverse_volume_signed", n, placeholder, |x, y| {
                let above = match space.pos(x).total_cmp(&space.pos(y)) {
                    std::cmp::Ordering::Equal => x > y,
                    o => o == std::cmp::Ordering::Greater,
                };
                let s = if above { 1.0 } else { -1.0 };
                s / v[x * n + y]
            })
        }
        KernelShape::UserMatrix => {
            let m = matrix.ok_or_else(|| Error::config("matrix", "user_matrix kernels need a `matrix`"))?;
            Error::check_len(n, m.len())?;
            ThetaKernel::from_matrix("user_matrix", m, placeholder)?
        }
    };
    let modulus = match modulus {
        Some(m) => m,
        None => {
            let c = fit_linear_modulus(space, &kernel, TripleSampler::default());
            DiniModulus::Linear {
                scale: if c > 0.0 { c } else { 1.0 },
            }
        }
    };
    Ok(kernel.with_modulus(modulus))
}

/// Kernel description file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelFile {
    pub shape: KernelShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<DiniModulus>,
}

impl KernelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self, space: &FiniteSpace) -> Result<ThetaKernel> {
        builtin_kernel(space, &self.shape, self.matrix.as_deref(), self.theta.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_space, MeasureSpec, MetricSpec, SpaceFile};

    fn two_point() -> FiniteSpace {
        build_space(
            None,
            &MetricSpec::Matrix {
                values: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            },
            &MeasureSpec::Uniform,
        )
        .unwrap()
    }

    #[test]
    fn dini_closed_forms() {
        assert_eq!(validate_dini(&DiniModulus::linear(1.0).unwrap()).unwrap().value, 1.0);
        assert_eq!(validate_dini(&DiniModulus::power(0.5, 1.0).unwrap()).unwrap().value, 2.0);
        let e = validate_dini(&DiniModulus::constant(1.0).unwrap()).unwrap_err();
        assert!(e.to_string().contains("Dini condition fails"));
    }

    #[test]
    fn dini_quadrature_paths() {
        let sqrt = DiniModulus::custom("sqrt", f64::sqrt);
        let r = validate_dini(&sqrt).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
        let lin = DiniModulus::table(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0]).unwrap();
        assert!((validate_dini(&lin).unwrap().value - 1.0).abs() < 1e-9);
        let flat = DiniModulus::table(vec![0.5, 1.0], vec![1.0, 1.0]).unwrap();
        assert!(validate_dini(&flat).is_err());
        let log = DiniModulus::custom("1/log", |t: f64| if t <= 0.0 { 0.0 } else { 1.0 / (1.0 + (1.0 / t).ln()) });
        assert!(validate_dini(&log).is_err());
        let log2 = DiniModulus::custom("1/log²", |t: f64| if t <= 0.0 { 0.0 } else { (1.0 + (1.0 / t).ln()).powi(-2) });
        // ∫₀¹ dt/(t(1 − ln t)²) = 1
        let r = validate_dini(&log2).unwrap();
        assert!((r.value - 1.0).abs() < 0.05, "{}", r.value);
    }

    #[test]
    fn modulus_json_forms() {
        let m: DiniModulus = serde_json::from_str(r#"{"shape":"power","delta":0.5}"#).unwrap();
        assert_eq!(m, DiniModulus::Power { delta: 0.5, scale: 1.0 });
        let m: DiniModulus = serde_json::from_str(r#"{"shape":"linear","scale":4.0}"#).unwrap();
        assert_eq!(m.eval(0.5), 2.0);
        let m: DiniModulus = serde_json::from_str(r#"{"t":[0,1],"theta":[0,3]}"#).unwrap();
        assert_eq!(m.eval(0.5), 1.5);
        assert!(serde_json::from_str::<DiniModulus>(r#"{"shape":"power","delta":1.5}"#).is_err());
    }

    #[test]
    fn riesz_table_on_small_lattice() {
        let s = SpaceFile::lattice1d(4, 0.5).build().unwrap();
        let k = builtin_kernel(&s, &KernelShape::Riesz1d, None, None).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    let expected = 1.0 / (i as f64 - j as f64) / 0.5;
                    assert!((k.entry(i, j) - expected).abs() < 1e-15);
                    assert_eq!(k.entry(i, j), -k.entry(j, i));
                }
            }
        }
        let two = two_point();
        assert!(builtin_kernel(&two, &KernelShape::Riesz1d, None, None).is_err());
    }

    #[test]
    fn size_constants() {
        let s = SpaceFile::lattice1d(12, 1.0).build().unwrap();
        let mut k = builtin_kernel(&s, &KernelShape::InverseVolumeSigned, None, None).unwrap();
        assert_eq!(validate_kernel_size(&s, &mut k).unwrap().c_size, 1.0);
        let mut z = ThetaKernel::from_matrix("zero", &vec![vec![0.0; 12]; 12], DiniModulus::Linear { scale: 1.0 }).unwrap();
        assert_eq!(validate_kernel_size(&s, &mut z).unwrap().c_size, 0.0);
        let sm = validate_kernel_smoothness(&s, &mut z, TripleSampler::default()).unwrap();
        assert_eq!(sm.c_smooth, Some(0.0));
    }

    #[test]
    fn two_point_examples() {
        let s = two_point();
        let mut k = ThetaKernel::from_matrix(
            "anti",
            &[vec![0.0, 1.0], vec![-1.0, 0.0]],
            DiniModulus::Linear { scale: 1.0 },
        )
        .unwrap();
        let sm = validate_kernel_smoothness(&s, &mut k, TripleSampler::default()).unwrap();
        assert_eq!(sm.status, SmoothnessStatus::Vacuous);
        let one = PointFunction::constant(2, 1.0);
        assert_eq!(apply_cz(&s, &k, &one).unwrap().values(), &[1.0, -1.0]);
        let b = PointFunction::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(commutator(&s, &k, &b, &one).unwrap().values(), &[-1.0, -1.0]);
        assert!((l2_operator_norm(&s, &k).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_of_signed_inverse_volume() {
        // top two singular values 2.06566167 and 2.06514127 from an independent SVD
        let s = SpaceFile::lattice1d(32, 1.0).build().unwrap();
        let k = builtin_kernel(&s, &KernelShape::InverseVolumeSigned, None, None).unwrap();
        assert!((l2_operator_norm(&s, &k).unwrap() - 2.065_661_67).abs() < 1e-8);
    }

    #[test]
    fn fitted_modulus_gives_unit_smoothness() {
        let s = SpaceFile::lattice1d(16, 1.0).build().unwrap();
        let mut k = builtin_kernel(&s, &KernelShape::Riesz1d, None, None).unwrap();
        let v = validate_kernel(&s, &mut k, TripleSampler::default()).unwrap();
        assert!(v.validated);
        assert!((v.smoothness.c_smooth.unwrap() - 1.0).abs() < 1e-12);
        let mut k4 = k.clone().with_modulus(DiniModulus::Linear { scale: 4.0 });
        let mut k8 = k.clone().with_modulus(DiniModulus::Linear { scale: 8.0 });
        let c4 = validate_kernel_smoothness(&s, &mut k4, TripleSampler::default()).unwrap().c_smooth.unwrap();
        let c8 = validate_kernel_smoothness(&s, &mut k8, TripleSampler::default()).unwrap().c_smooth.unwrap();
        assert!(c8 <= c4);
    }

    #[test]
    fn zero_theta_with_difference_fails() {
        let s = SpaceFile::lattice1d(6, 1.0).build().unwrap();
        let mut k = builtin_kernel(&s, &KernelShape::Riesz1d, None, Some(DiniModulus::Constant { value: 0.0 })).unwrap();
        let r = validate_kernel_smoothness(&s, &mut k, TripleSampler::default()).unwrap();
        assert_eq!(r.status, SmoothnessStatus::Failed);
        assert!(r.witness.is_some());
        assert!(!k.is_validated());
    }
}
