//! Finite metric measure spaces.
//!
//! A [`FiniteSpace`] is a finite set of points with a distance table and a
//! strictly positive point mass. Everything downstream (balls, weights, norms,
//! operators) is evaluated exactly on this atomic structure.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::balls::BallFamily;
use crate::error::{Error, Result};
use crate::norms::PointFunction;
use crate::weight::Weight;

/// Relative slack allowed in the triangle inequality (rounding in generated
/// Euclidean tables).
const TRIANGLE_RTOL: f64 = 1e-12;

/// How the distance table was produced. Generated layouts can be refined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MetricSpec {
    Matrix { values: Vec<Vec<f64>> },
    Lattice1d { n: usize, spacing: f64 },
    Lattice2d { nx: usize, ny: usize, spacing: f64 },
    Random2d { n: usize, seed: u64 },
}

impl MetricSpec {
    pub fn len(&self) -> usize {
        match self {
            MetricSpec::Matrix { values } => values.len(),
            MetricSpec::Lattice1d { n, .. } => *n,
            MetricSpec::Lattice2d { nx, ny, .. } => nx * ny,
            MetricSpec::Random2d { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The same generator with twice the points per axis, or `None` for
    /// explicit tables.
    pub fn doubled(&self) -> Option<MetricSpec> {
        match *self {
            MetricSpec::Matrix { .. } => None,
            MetricSpec::Lattice1d { n, spacing } => Some(MetricSpec::Lattice1d { n: 2 * n, spacing }),
            MetricSpec::Lattice2d { nx, ny, spacing } => Some(MetricSpec::Lattice2d {
                nx: 2 * nx,
                ny: 2 * ny,
                spacing,
            }),
            MetricSpec::Random2d { n, seed } => Some(MetricSpec::Random2d { n: 2 * n, seed }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    /// Unit mass on every point.
    Uniform,
    Explicit(Vec<f64>),
}

impl Serialize for MeasureSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MeasureSpec::Uniform => s.serialize_str("uniform"),
            MeasureSpec::Explicit(v) => v.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for MeasureSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Name(String),
            Values(Vec<f64>),
        }
        match Raw::deserialize(d)? {
            Raw::Name(s) if s == "uniform" => Ok(MeasureSpec::Uniform),
            Raw::Name(s) => Err(serde::de::Error::custom(format!(
                "unknown measure `{s}` (expected \"uniform\" or an array of masses)"
            ))),
            Raw::Values(v) => Ok(MeasureSpec::Explicit(v)),
        }
    }
}

impl Default for MeasureSpec {
    fn default() -> Self {
        MeasureSpec::Uniform
    }
}

/// Point identifiers may be written as strings or integers in space files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointId {
    Int(i64),
    Str(String),
}

impl std::fmt::Display for PointId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PointId::Int(i) => write!(f, "{i}"),
            PointId::Str(s) => f.write_str(s),
        }
    }
}

/// On-disk space description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<PointId>>,
    pub metric: MetricSpec,
    #[serde(default)]
    pub measure: MeasureSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub weights: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functions: BTreeMap<String, Vec<f64>>,
}

impl SpaceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn lattice1d(n: usize, spacing: f64) -> Self {
        SpaceFile {
            points: None,
            metric: MetricSpec::Lattice1d { n, spacing },
            measure: MeasureSpec::Uniform,
            weights: BTreeMap::new(),
            functions: BTreeMap::new(),
        }
    }

    pub fn build(&self) -> Result<FiniteSpace> {
        let ids = self
            .points
            .as_ref()
            .map(|p| p.iter().map(ToString::to_string).collect());
        build_space(ids, &self.metric, &self.measure)
    }

    /// Point-doubled version of a generated space, without the stored
    /// per-point arrays. Explicit tables and explicit masses cannot be refined.
    pub fn refined(&self) -> Option<SpaceFile> {
        if self.points.is_some() || matches!(self.measure, MeasureSpec::Explicit(_)) {
            return None;
        }
        Some(SpaceFile {
            points: None,
            metric: self.metric.doubled()?,
            measure: MeasureSpec::Uniform,
            weights: BTreeMap::new(),
            functions: BTreeMap::new(),
        })
    }

    /// Resolves a weight name: `unit`, `pow1p:<a>` for (1 + pos)^a, or a
    /// weight stored in the file.
    pub fn weight(&self, space: &FiniteSpace, name: &str) -> Result<Weight> {
        if name == "unit" {
            return Ok(Weight::unit(space));
        }
        if let Some(a) = name.strip_prefix("pow1p:") {
            let a: f64 = a
                .parse()
                .map_err(|_| Error::config("weight", format!("cannot parse exponent in `{name}`")))?;
            return Weight::power_of_position(space, a);
        }
        match self.weights.get(name) {
            Some(v) => Weight::new(space, v.clone()),
            None => Err(Error::config(
                "weight",
                format!("undefined weight `{name}` (use unit, pow1p:<a> or a name from the space file)"),
            )),
        }
    }

    /// Resolves a function name: `one`, `pos`, `log1p_pos`, `point:<i>`, or a
    /// function stored in the file. `field` names the config field in errors.
    pub fn function(&self, space: &FiniteSpace, name: &str, field: &str) -> Result<PointFunction> {
        let n = space.len();
        let values: Vec<f64> = match name {
            "one" => vec![1.0; n],
            "pos" => (0..n).map(|i| space.pos(i)).collect(),
            "log1p_pos" => (0..n).map(|i| space.pos(i).ln_1p()).collect(),
            _ => {
                if let Some(i) = name.strip_prefix("point:") {
                    let i = i
                        .parse::<usize>()
                        .ok()
                        .or_else(|| space.index_of(i))
                        .filter(|&i| i < n)
                        .ok_or_else(|| Error::config(field, format!("no point `{i}` in the space")))?;
                    return Ok(PointFunction::indicator(n, [i]));
                }
                match self.functions.get(name) {
                    Some(v) => v.clone(),
                    None => {
                        return Err(Error::config(
                            field,
                            format!("undefined function `{name}` (use one, pos, log1p_pos, point:<i> or a name from the space file)"),
                        ))
                    }
                }
            }
        };
        PointFunction::on(space, values)
    }
}

/// Generator layout retained after construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Layout {
    Explicit,
    Lattice1d { n: usize, spacing: f64 },
    Lattice2d { nx: usize, ny: usize, spacing: f64 },
    Random2d { n: usize, seed: u64 },
}

/// A validated finite metric measure space.
#[derive(Debug)]
pub struct FiniteSpace {
    ids: Vec<String>,
    dist: Vec<f64>,
    mass: Vec<f64>,
    total_mass: f64,
    diam: f64,
    layout: Layout,
    balls: OnceLock<BallFamily>,
}

impl Clone for FiniteSpace {
    fn clone(&self) -> Self {
        FiniteSpace {
            ids: self.ids.clone(),
            dist: self.dist.clone(),
            mass: self.mass.clone(),
            total_mass: self.total_mass,
            diam: self.diam,
            layout: self.layout,
            balls: OnceLock::new(),
        }
    }
}

/// Builds and validates a space; every invariant is checked eagerly.
pub fn build_space(
    points: Option<Vec<String>>,
    metric: &MetricSpec,
    measure: &MeasureSpec,
) -> Result<FiniteSpace> {
    let (dist, n, layout) = match metric {
        MetricSpec::Matrix { values } => {
            let n = values.len();
            for (i, row) in values.iter().enumerate() {
                if row.len() != n {
                    return Err(invalid(format!(
                        "distance row {i} has {} entries, expected {n}",
                        row.len()
                    )));
                }
            }
            (values.iter().flatten().copied().collect::<Vec<_>>(), n, Layout::Explicit)
        }
        &MetricSpec::Lattice1d { n, spacing } => {
            check_spacing(spacing)?;
            let mut d = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    d[i * n + j] = (i as f64 - j as f64).abs() * spacing;
                }
            }
            (d, n, Layout::Lattice1d { n, spacing })
        }
        &MetricSpec::Lattice2d { nx, ny, spacing } => {
            check_spacing(spacing)?;
            let coords: Vec<(f64, f64)> = (0..ny)
                .flat_map(|iy| (0..nx).map(move |ix| (ix as f64 * spacing, iy as f64 * spacing)))
                .collect();
            let n = coords.len();
            (euclidean(&coords), n, Layout::Lattice2d { nx, ny, spacing })
        }
        &MetricSpec::Random2d { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let coords: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
            (euclidean(&coords), n, Layout::Random2d { n, seed })
        }
    };

    if n < 2 {
        return Err(invalid(format!("a space needs at least 2 points, got {n}")));
    }

    let ids = match points {
        Some(ids) => {
            if ids.len() != n {
                return Err(invalid(format!(
                    "{} point ids given for a metric on {n} points",
                    ids.len()
                )));
            }
            let mut seen = std::collections::HashSet::new();
            for id in &ids {
                if !seen.insert(id.as_str()) {
                    return Err(invalid(format!("duplicate point id `{id}`")));
                }
            }
            ids
        }
        None => (0..n).map(|i| i.to_string()).collect(),
    };

    let mass = match measure {
        MeasureSpec::Uniform => vec![1.0; n],
        MeasureSpec::Explicit(m) => {
            if m.len() != n {
                return Err(invalid(format!("{} masses given for {n} points", m.len())));
            }
            if let Some(i) = m.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
                return Err(Error::InvalidSpace {
                    reason: format!("mass of point `{}` must be positive and finite, got {}", ids[i], m[i]),
                    witness: Some(vec![ids[i].clone()]),
                });
            }
            m.clone()
        }
    };

    validate_metric(&dist, n, &ids)?;

    let total_mass = mass.iter().sum();
    let diam = dist.iter().copied().fold(0.0, f64::max);
    Ok(FiniteSpace {
        ids,
        dist,
        mass,
        total_mass,
        diam,
        layout,
        balls: OnceLock::new(),
    })
}

fn invalid(reason: String) -> Error {
    Error::InvalidSpace { reason, witness: None }
}

fn check_spacing(spacing: f64) -> Result<()> {
    if spacing > 0.0 && spacing.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("lattice spacing must be positive, got {spacing}")))
    }
}

fn euclidean(coords: &[(f64, f64)]) -> Vec<f64> {
    let n = coords.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (dx, dy) = (coords[i].0 - coords[j].0, coords[i].1 - coords[j].1);
            d[i * n + j] = dx.hypot(dy);
        }
    }
    d
}

fn validate_metric(d: &[f64], n: usize, ids: &[String]) -> Result<()> {
    let at = |i: usize, j: usize| d[i * n + j];
    for i in 0..n {
        if at(i, i) != 0.0 {
            return Err(Error::InvalidSpace {
                reason: format!("dist({0},{0}) = {1}, expected 0", ids[i], at(i, i)),
                witness: Some(vec![ids[i].clone()]),
            });
        }
        for j in 0..n {
            let v = at(i, j);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidSpace {
                    reason: format!("dist({},{}) = {v} is not a finite nonnegative number", ids[i], ids[j]),
                    witness: Some(vec![ids[i].clone(), ids[j].clone()]),
                });
            }
            if v != at(j, i) {
                return Err(Error::InvalidSpace {
                    reason: format!(
                        "asymmetric distance: dist({0},{1}) = {2} but dist({1},{0}) = {3}",
                        ids[i],
                        ids[j],
                        v,
                        at(j, i)
                    ),
                    witness: Some(vec![ids[i].clone(), ids[j].clone()]),
                });
            }
            if i != j && v == 0.0 {
                return Err(Error::InvalidSpace {
                    reason: format!("distinct points `{}` and `{}` at distance 0", ids[i], ids[j]),
                    witness: Some(vec![ids[i].clone(), ids[j].clone()]),
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let direct = at(i, k);
                let via = at(i, j) + at(j, k);
                if direct > via * (1.0 + TRIANGLE_RTOL) {
                    return Err(Error::InvalidSpace {
                        reason: format!(
                            "triangle inequality violated: dist({0},{2}) = {3} > dist({0},{1}) + dist({1},{2}) = {4}",
                            ids[i], ids[j], ids[k], direct, via
                        ),
                        witness: Some(vec![ids[i].clone(), ids[j].clone(), ids[k].clone()]),
                    });
                }
            }
        }
    }
    Ok(())
}

impl FiniteSpace {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn dist_row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Distance from the first point; on a 1-D lattice this is the coordinate.
    pub fn pos(&self, i: usize) -> f64 {
        self.dist(0, i)
    }

    /// The canonical ball family, enumerated on first use.
    pub fn balls(&self) -> &BallFamily {
        self.balls.get_or_init(|| BallFamily::enumerate(self))
    }

    /// μ of the open ball B(x, r).
    pub fn ball_mass(&self, x: usize, r: f64) -> f64 {
        self.dist_row(x)
            .iter()
            .zip(&self.mass)
            .filter(|(&d, _)| d < r)
            .map(|(_, &m)| m)
            .sum()
    }

    /// Member indices of the open ball B(x, r), ascending.
    pub fn ball_members(&self, x: usize, r: f64) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.dist(x, y) < r).collect()
    }
}

/// V(x,y) = μ(B(x, d(x,y))); contains x and excludes y.
pub fn volume_between(space: &FiniteSpace, x: usize, y: usize) -> Result<f64> {
    if x == y {
        return Err(Error::input("volume_between requires distinct points"));
    }
    if x >= space.len() || y >= space.len() {
        return Err(Error::input("point index out of range"));
    }
    Ok(space.ball_mass(x, space.dist(x, y)))
}

/// Dense table of V(x,y) (diagonal set to zero).
pub fn volume_table(space: &FiniteSpace) -> Vec<f64> {
    let n = space.len();
    let fam = space.balls();
    let mut v = vec![0.0; n * n];
    for x in 0..n {
        let chain = fam.chain(x);
        // order is sorted by distance; the ball of radius d(x,y) is the prefix
        // of points strictly closer than y.
        let mut prefix = 0.0;
        let mut k = 0;
        let order = chain.order();
        while k < n {
            let d = space.dist(x, order[k] as usize);
            let mut end = k;
            while end < n && space.dist(x, order[end] as usize) == d {
                end += 1;
            }
            for &y in &order[k..end] {
                v[x * n + y as usize] = prefix;
            }
            for &y in &order[k..end] {
                prefix += space.mass()[y as usize];
            }
            k = end;
        }
        v[x * n + x] = 0.0;
    }
    v
}

/// Largest ratio V(x,y)/V(y,x) over pairs.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryDefect {
    pub max_ratio: f64,
    pub witness: (String, String),
}

pub fn volume_symmetry_defect(space: &FiniteSpace) -> SymmetryDefect {
    let n = space.len();
    let v = volume_table(space);
    let mut best = (1.0, 0, 1);
    for x in 0..n {
        for y in 0..n {
            if x != y {
                let r = v[x * n + y] / v[y * n + x];
                if r > best.0 {
                    best = (r, x, y);
                }
            }
        }
    }
    SymmetryDefect {
        max_ratio: best.0,
        witness: (space.id(best.1).to_string(), space.id(best.2).to_string()),
    }
}

/// A ball quoted in reports: center id, radius and size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallWitness {
    pub center: String,
    pub radius: f64,
    pub size: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DoublingReport {
    pub value: f64,
    pub witness: BallWitness,
}

/// C₀ = max over (x, r) of μ(B(x,2r))/μ(B(x,r)).
///
/// On a finite space B(x,r) is constant for r in (d_k, d_{k+1}] while
/// B(x,2r) grows with r, so the supremum over all r > 0 is attained at the
/// canonical radii r = d_{k+1}.
pub fn doubling_constant(space: &FiniteSpace) -> DoublingReport {
    let fam = space.balls();
    let mut best: Option<(f64, usize, usize)> = None;
    for x in 0..space.len() {
        let chain = fam.chain(x);
        for (slot, &r) in chain.radii().iter().enumerate() {
            let inner = fam.set_mass(chain.set_id(slot));
            let outer = fam.set_mass(fam.set_at(x, 2.0 * r));
            let ratio = outer / inner;
            if best.map_or(true, |b| ratio > b.0) {
                best = Some((ratio, x, slot));
            }
        }
    }
    let (value, x, slot) = best.expect("spaces have at least two points");
    DoublingReport {
        value,
        witness: fam.witness(space, x, slot),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReverseDoublingReport {
    pub a: f64,
    pub b: f64,
    pub witness: BallWitness,
    /// `b > 1` certifies the reverse doubling inequality at scale `a`.
    pub certified: bool,
}

/// b = min over centers and canonical radii r < diam/a of μ(B(x,ar))/μ(B(x,r)).
pub fn reverse_doubling_infimum(space: &FiniteSpace, a: f64) -> Result<ReverseDoublingReport> {
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::input(format!("reverse doubling scale must exceed 1, got {a}")));
    }
    let limit = space.diam() / a;
    let fam = space.balls();
    let mut best: Option<(f64, usize, usize)> = None;
    for x in 0..space.len() {
        let chain = fam.chain(x);
        for (slot, &r) in chain.radii().iter().enumerate() {
            if !(r > 0.0 && r < limit) {
                continue;
            }
            let ratio = fam.set_mass(fam.set_at(x, a * r)) / fam.set_mass(chain.set_id(slot));
            if best.map_or(true, |b| ratio < b.0) {
                best = Some((ratio, x, slot));
            }
        }
    }
    match best {
        Some((b, x, slot)) => Ok(ReverseDoublingReport {
            a,
            b,
            witness: fam.witness(space, x, slot),
            certified: b > 1.0,
        }),
        None => Err(Error::NoAdmissibleScale(format!(
            "no admissible scale: no canonical radius lies in (0, diam/a) = (0, {limit})"
        ))),
    }
}
