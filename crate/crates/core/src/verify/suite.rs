//! Suite configuration files and the suite runner.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::growth::{GrandConvention, GrandWeight, MorreyGrowth};
use crate::kernel::{KernelFile, TripleSampler};
use crate::space::SpaceFile;
use crate::verify::checks::{run_check, CheckId, Setup, SetupSpec};
use crate::verify::report::InequalityReport;
use crate::weight::DEFAULT_SEED;

/// Environment variable that replaces the default seed.
pub const SEED_ENV: &str = "GMLAB_SEED";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    space_file: Option<PathBuf>,
    space: Option<Value>,
    #[serde(default = "unit")]
    weight: String,
    p: f64,
    q: Option<f64>,
    phi_g: Option<Value>,
    phi_m: Option<Value>,
    kernel_file: Option<PathBuf>,
    kernel: Option<Value>,
    b: Option<String>,
    r_pow: Option<f64>,
    checks: Option<Vec<String>>,
    #[serde(default)]
    seeds: Seeds,
    #[serde(default)]
    refinement: Refinement,
    #[serde(default)]
    convention: GrandConvention,
    #[serde(default)]
    eps_level: u32,
    #[serde(default)]
    record_functions: bool,
}

fn unit() -> String {
    "unit".into()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Seeds {
    family: Option<u64>,
    kernel: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Refinement {
    #[serde(default = "double_n")]
    space: SpaceRefinement,
    #[serde(default = "double_grid")]
    eps: EpsRefinement,
}

impl Default for Refinement {
    fn default() -> Self {
        Refinement {
            space: SpaceRefinement::DoubleN,
            eps: EpsRefinement::DoubleGrid,
        }
    }
}

fn double_n() -> SpaceRefinement {
    SpaceRefinement::DoubleN
}

fn double_grid() -> EpsRefinement {
    EpsRefinement::DoubleGrid
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SpaceRefinement {
    DoubleN,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum EpsRefinement {
    DoubleGrid,
    None,
}

/// A parsed and validated suite configuration.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub spec: SetupSpec,
    pub checks: Vec<CheckId>,
}

fn field<T: serde::de::DeserializeOwned>(name: &str, v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::config(name, e.to_string()))
}

/// The seed used when the config gives none: `GMLAB_SEED` if set, else the
/// library default.
pub fn default_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::config(SEED_ENV, format!("not an unsigned integer: `{s}`"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

impl SuiteConfig {
    /// Parses a config; relative file paths resolve against `base_dir`.
    pub fn from_json(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let name = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.starts_with("unknown field") || msg.starts_with("missing field"))
                .unwrap_or("config")
                .to_string();
            Error::config(name, msg)
        })?;
        let resolve = |p: &Path| match base_dir {
            Some(d) if p.is_relative() => d.join(p),
            _ => p.to_path_buf(),
        };
        let space_file = match (raw.space_file, raw.space) {
            (Some(path), None) => SpaceFile::load(resolve(&path)).map_err(|e| Error::config("space_file", e.to_string()))?,
            (None, Some(v)) => field("space", v)?,
            (Some(_), Some(_)) => return Err(Error::config("space", "give either space_file or space, not both")),
            (None, None) => return Err(Error::config("space_file", "missing; give space_file or an inline space")),
        };
        let kernel: Option<KernelFile> = match (raw.kernel_file, raw.kernel) {
            (Some(path), None) => Some(KernelFile::load(resolve(&path)).map_err(|e| Error::config("kernel_file", e.to_string()))?),
            (None, Some(v)) => Some(field("kernel", v)?),
            (Some(_), Some(_)) => return Err(Error::config("kernel", "give either kernel_file or kernel, not both")),
            (None, None) => None,
        };
        let checks = match raw.checks {
            None => CheckId::ALL.to_vec(),
            Some(list) => list.iter().map(|s| s.parse()).collect::<Result<Vec<CheckId>>>()?,
        };
        if !(raw.p > 1.0 && raw.p.is_finite()) {
            return Err(Error::config("p", format!("must satisfy 1 < p < ∞, got {}", raw.p)));
        }
        let default = default_seed()?;
        let mut spec = SetupSpec::new(space_file);
        spec.weight = raw.weight;
        spec.p = raw.p;
        spec.q = raw.q;
        if let Some(v) = raw.phi_g {
            spec.phi_g = field::<GrandWeight>("phi_g", v)?;
        }
        if let Some(v) = raw.phi_m {
            spec.phi_m = field::<MorreyGrowth>("phi_m", v)?;
        }
        spec.kernel = kernel;
        spec.b = raw.b;
        if let Some(r) = raw.r_pow {
            spec.r_pow = r;
        }
        spec.seed = raw.seeds.family.unwrap_or(default);
        spec.triple_sampler = TripleSampler {
            seed: raw.seeds.kernel.unwrap_or(default),
            ..TripleSampler::default()
        };
        spec.refine_space = raw.refinement.space == SpaceRefinement::DoubleN;
        spec.refine_eps = raw.refinement.eps == EpsRefinement::DoubleGrid;
        spec.convention = raw.convention;
        spec.eps_level = raw.eps_level;
        spec.record_functions = raw.record_functions;

        for id in &checks {
            if id.needs_kernel() && spec.kernel.is_none() {
                return Err(Error::config("kernel_file", format!("required by check {id}")));
            }
            if id.needs_b() && spec.b.is_none() {
                return Err(Error::config("b", format!("required by check {id}")));
            }
        }
        let config = SuiteConfig { spec, checks };
        config.validate_names()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text, path.parent())
    }

    /// Resolves the weight and b names without building the ball family.
    fn validate_names(&self) -> Result<()> {
        let n = self.spec.space_file.metric.len();
        let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let known_fn = |name: &str| {
            matches!(name, "one" | "pos" | "log1p_pos")
                || name.strip_prefix("point:").is_some_and(|i| {
                    ids.iter().any(|x| x == i)
                        || self
                            .spec
                            .space_file
                            .points
                            .as_ref()
                            .is_some_and(|p| p.iter().any(|x| x.to_string() == i))
                })
                || self.spec.space_file.functions.contains_key(name)
        };
        let w = &self.spec.weight;
        if !(w == "unit" || w.starts_with("pow1p:") || self.spec.space_file.weights.contains_key(w)) {
            return Err(Error::config(
                "weight",
                format!("undefined weight `{w}` (use unit, pow1p:<a> or a name from the space file)"),
            ));
        }
        if let Some(b) = &self.spec.b {
            if !known_fn(b) {
                return Err(Error::config(
                    "b",
                    format!("undefined function `{b}` (use one, pos, log1p_pos, point:<i> or a name from the space file)"),
                ));
            }
        }
        Ok(())
    }

    /// Builds the shared setup for these checks.
    pub fn setup(&self) -> Result<Setup> {
        Setup::new(self.spec.clone())
    }
}

/// Runs every configured check, concurrently, and returns the reports in
/// configuration order. An empty check list does no work.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<InequalityReport>> {
    if config.checks.is_empty() {
        return Ok(Vec::new());
    }
    let setup = config.setup()?;
    run_checks(&setup, &config.checks)
}

/// Runs the given checks on an existing setup, in order.
pub fn run_checks(setup: &Setup, checks: &[CheckId]) -> Result<Vec<InequalityReport>> {
    checks.par_iter().map(|&id| run_check(setup, id)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{"space": {"metric": {"type": "lattice1d", "n": 8, "spacing": 1.0}}, "p": 2"#;

    fn cfg(extra: &str) -> Result<SuiteConfig> {
        SuiteConfig::from_json(&format!("{BASE}{extra}}}"), None)
    }

    #[test]
    fn empty_checks_give_empty_report() {
        let c = cfg(r#", "checks": []"#).unwrap();
        assert!(run_suite(&c).unwrap().is_empty());
    }

    #[test]
    fn errors_name_the_field() {
        let e = cfg(r#", "weight": "w9", "checks": []"#).unwrap_err().to_string();
        assert!(e.contains("`weight`"), "{e}");
        let e = cfg(r#", "checks": ["thm2.1", "nope"]"#).unwrap_err().to_string();
        assert!(e.contains("`checks`"), "{e}");
        let e = cfg(r#", "checks": ["lem3.1"]"#).unwrap_err().to_string();
        assert!(e.contains("`kernel_file`"), "{e}");
        let e = cfg(r#", "colour": 1"#).unwrap_err().to_string();
        assert!(e.contains("`colour`"), "{e}");
        let e = cfg(r#", "phi_m": "cubic", "checks": []"#).unwrap_err().to_string();
        assert!(e.contains("`phi_m`"), "{e}");
        let e = cfg(r#", "b": "nothing", "checks": []"#).unwrap_err().to_string();
        assert!(e.contains("`b`"), "{e}");
    }

    #[test]
    fn reports_follow_config_order() {
        let c = cfg(r#", "checks": ["cond2.5", "thm2.1", "cond2.4"], "refinement": {"space": "none"}"#).unwrap();
        let ids: Vec<String> = run_suite(&c).unwrap().into_iter().map(|r| r.check_id).collect();
        assert_eq!(ids, ["cond2.5", "thm2.1", "cond2.4"]);
    }
}
