//! The `gmlab` command-line front end.
//!
//! Exit codes: 0 success, 1 failed assertion or non-passing check, 2 input
//! error, 3 failed hypothesis under `--strict`.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::growth::{
    check_condition_24, default_growth_grid, GrandConvention, GrandParams, GrandWeight, MorreyGrowth,
};
use crate::kernel::{apply_cz, commutator, validate_kernel, KernelFile, TripleSampler};
use crate::maximal::{maximal, noncentered_maximal, vector_maximal, VectorFunction};
use crate::norms::{
    bmo_norm, generalized_morrey_norm, grand_generalized_morrey_norm, grand_lebesgue_norm, grand_weighted_morrey_norm,
    lp_norm, relative_change, PointFunction,
};
use crate::space::{doubling_constant, reverse_doubling_infimum, FiniteSpace, SpaceFile};
use crate::verify::report::{exit_code, to_csv, to_json, Hypothesis};
use crate::verify::suite::{default_seed, run_suite, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gmlab", version, about = "Grand Morrey norms and operators on finite metric measure spaces")]
pub struct Cli {
    /// Print progress and timings to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Summarize a space file: size, diameter, mass, balls, doubling constants.
    Space(SpaceArgs),
    /// Evaluate one norm of a function.
    Norm(NormArgs),
    /// Apply an operator and write the resulting function.
    Op(OpArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceCheck {
    Doubling,
    Rd,
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub check: Option<SpaceCheck>,
    /// Scale for the reverse doubling check.
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum NormId {
    Lp,
    GrandLebesgue,
    GenMorrey,
    GrandGenMorrey,
    GrandWeightedMorrey,
    Bmo,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[arg(long, value_enum)]
    pub id: NormId,
    #[arg(long)]
    pub space: PathBuf,
    /// `unit`, `pow1p:<a>` or a weight stored in the space file.
    #[arg(long, default_value = "unit")]
    pub weight: String,
    /// A JSON file of values, or `one`, `pos`, `log1p_pos`, `point:<i>` or a stored function.
    #[arg(long)]
    pub f: String,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Exponent of the plain Lebesgue norm (defaults to p).
    #[arg(long)]
    pub r: Option<f64>,
    /// Outer exponent of the grand weighted Morrey norm.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, default_value = "power:1")]
    pub phi_g: GrandWeight,
    #[arg(long, default_value = "power:0.5")]
    pub phi_m: MorreyGrowth,
    #[arg(long, default_value_t = 0)]
    pub eps_level: u32,
    #[arg(long, value_enum, default_value = "literal")]
    pub convention: ConventionArg,
    /// Exit 3 when a hypothesis on the parameters fails.
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Literal,
    Exponentiated,
}

impl From<ConventionArg> for GrandConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Literal => GrandConvention::Literal,
            ConventionArg::Exponentiated => GrandConvention::Exponentiated,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OpKind {
    Maximal,
    Noncentered,
    Vecmax,
    Cz,
    Commutator,
}

#[derive(Debug, Args)]
pub struct OpArgs {
    #[arg(long, value_enum)]
    pub kind: OpKind,
    #[arg(long)]
    pub space: PathBuf,
    /// Input function; repeat for the components of `vecmax`.
    #[arg(long, required = true)]
    pub f: Vec<String>,
    /// Power of `noncentered` (default 1) or `vecmax` (default 2).
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub kernel: Option<PathBuf>,
    /// Multiplier of `commutator`.
    #[arg(long)]
    pub b: Option<String>,
    /// Apply a kernel that failed validation.
    #[arg(long)]
    pub skip_validate: bool,
    /// Seed for sampled smoothness triples.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the CSV summary here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Exit 3 when a hypothesis gate fails.
    #[arg(long)]
    pub strict: bool,
    /// Replace every seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Stdout format when neither --out nor --csv is given.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", render_error(&e));
            EXIT_INPUT
        }
    }
}

/// Error text including the witness of an invalid space.
pub fn render_error(e: &Error) -> String {
    match e {
        Error::InvalidSpace {
            witness: Some(w), ..
        } => format!("{e} (witness: {})", w.join(", ")),
        _ => e.to_string(),
    }
}

pub fn execute(cli: &Cli) -> Result<i32> {
    let start = Instant::now();
    let code = match &cli.command {
        Command::Space(a) => cmd_space(a)?,
        Command::Norm(a) => cmd_norm(a)?,
        Command::Op(a) => cmd_op(a)?,
        Command::Verify(a) => cmd_verify(a, cli.verbose)?,
    };
    if cli.verbose > 0 {
        eprintln!("done in {:.2} s, exit code {code}", start.elapsed().as_secs_f64());
    }
    Ok(code)
}

fn require_file(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::config(what, format!("no such file: {}", path.display())))
    }
}

fn emit(out: &Output, value: &Value, csv: impl FnOnce() -> String) -> Result<()> {
    let text = match out.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value)?;
            s.push('\n');
            s
        }
        Format::Csv => csv(),
    };
    write_text(out.out.as_deref(), &text)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn csv_pairs(value: &Value) -> String {
    let mut s = String::from("key,value\n");
    if let Value::Object(map) = value {
        for (k, v) in map {
            if !v.is_object() && !v.is_array() {
                s.push_str(&format!("{k},{}\n", v.to_string().trim_matches('"')));
            }
        }
    }
    s
}

/// `gmlab space`: summary of a space file.
pub fn cmd_space(a: &SpaceArgs) -> Result<i32> {
    require_file(&a.input, "input")?;
    let space = SpaceFile::load(&a.input)?.build()?;
    let value = space_summary(&space, a.check, a.a)?;
    emit(&a.output, &value, || csv_pairs(&value))?;
    Ok(EXIT_OK)
}

/// {n, diam, total_mass, ball_count, C0} plus the requested check.
pub fn space_summary(space: &FiniteSpace, check: Option<SpaceCheck>, a: f64) -> Result<Value> {
    let c0 = doubling_constant(space);
    let mut v = json!({
        "n": space.len(),
        "diam": space.diam(),
        "total_mass": space.total_mass(),
        "ball_count": space.balls().len(),
        "C0": c0.value,
    });
    match check {
        Some(SpaceCheck::Doubling) => {
            v["doubling"] = serde_json::to_value(&c0)?;
        }
        Some(SpaceCheck::Rd) => {
            v["rd"] = match reverse_doubling_infimum(space, a) {
                Ok(r) => serde_json::to_value(&r)?,
                Err(Error::NoAdmissibleScale(m)) => json!({ "a": a, "error": m }),
                Err(e) => return Err(e),
            };
        }
        None => {}
    }
    Ok(v)
}

/// Loads a function from a JSON file (an array or `{"values": [...]}`) or
/// resolves it as a named function of the space file.
pub fn load_function(file: &SpaceFile, space: &FiniteSpace, spec: &str, field: &str) -> Result<PointFunction> {
    let path = Path::new(spec);
    if path.is_file() {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let values = v.get("values").cloned().unwrap_or(v);
        let values: Vec<f64> =
            serde_json::from_value(values).map_err(|e| Error::config(field, format!("{}: {e}", path.display())))?;
        return PointFunction::on(space, values);
    }
    if spec.ends_with(".json") {
        return Err(Error::config(field, format!("no such file: {spec}")));
    }
    file.function(space, spec, field)
}

#[derive(Debug, Serialize)]
struct NormReport {
    id: &'static str,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ball: Option<crate::space::BallWitness>,
    eps_nodes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    refinement_delta: Option<f64>,
    hypotheses: Vec<Hypothesis>,
}

fn phi_g_gate(phi_g: &GrandWeight, p: f64) -> Hypothesis {
    let m = phi_g.membership(p);
    Hypothesis {
        name: "Phi_p".into(),
        holds: m.holds,
        value: Some(m.value_at_smallest_probe),
        detail: format!("φ_g positive: {}, bounded: {}, tends to 0: {}", m.positive, m.bounded, m.tends_to_zero),
    }
}

fn phi_m_gate(phi_m: &MorreyGrowth) -> Result<Hypothesis> {
    let r = check_condition_24(phi_m, &default_growth_grid(0))?;
    Ok(Hypothesis {
        name: "cond2.4".into(),
        holds: r.holds,
        value: r.best_c,
        detail: r.detail,
    })
}

/// `gmlab norm`: one norm value with its witnesses.
pub fn cmd_norm(a: &NormArgs) -> Result<i32> {
    require_file(&a.space, "space")?;
    let file = SpaceFile::load(&a.space)?;
    let space = file.build()?;
    let weight = file.weight(&space, &a.weight)?;
    let f = load_function(&file, &space, &a.f, "f")?;
    let gp = || -> Result<GrandParams> {
        Ok(GrandParams::new(a.p, a.phi_g.clone(), a.eps_level)?.with_convention(a.convention.into()))
    };
    let mut hyps = Vec::new();
    let report = match a.id {
        NormId::Lp => {
            let r = a.r.unwrap_or(a.p);
            NormReport {
                id: "lp",
                value: lp_norm(&space, &f, &weight, r)?,
                eps: None,
                ball: None,
                eps_nodes: 0,
                refinement_delta: None,
                hypotheses: hyps,
            }
        }
        NormId::GrandLebesgue => {
            let gp = gp()?;
            hyps.push(phi_g_gate(&gp.phi_g, a.p));
            let v = grand_lebesgue_norm(&space, &f, &weight, &gp)?;
            NormReport {
                id: "grand_lebesgue",
                value: v.value,
                eps: Some(v.eps),
                ball: None,
                eps_nodes: v.eps_nodes,
                refinement_delta: Some(v.relative_change),
                hypotheses: hyps,
            }
        }
        NormId::GenMorrey => {
            hyps.push(phi_m_gate(&a.phi_m)?);
            let v = generalized_morrey_norm(&space, &f, &weight, a.p, &a.phi_m)?;
            NormReport {
                id: "gen_morrey",
                value: v.value,
                eps: None,
                ball: v.ball,
                eps_nodes: 0,
                refinement_delta: None,
                hypotheses: hyps,
            }
        }
        NormId::GrandGenMorrey | NormId::GrandWeightedMorrey => {
            let gp = gp()?;
            hyps.push(phi_g_gate(&gp.phi_g, a.p));
            let eval = |gp: &GrandParams| match a.id {
                NormId::GrandGenMorrey => grand_generalized_morrey_norm(&space, &f, &weight, gp, &a.phi_m),
                _ => {
                    let q = a.q.ok_or_else(|| Error::config("q", "grand_weighted_morrey needs --q"))?;
                    grand_weighted_morrey_norm(&space, &f, &weight, gp, q)
                }
            };
            let id = if a.id == NormId::GrandGenMorrey {
                hyps.push(phi_m_gate(&a.phi_m)?);
                "grand_gen_morrey"
            } else {
                "grand_weighted_morrey"
            };
            let v = eval(&gp)?;
            let finer = eval(&gp.refined())?;
            NormReport {
                id,
                value: v.value,
                eps: v.eps,
                ball: v.ball,
                eps_nodes: v.eps_nodes,
                refinement_delta: Some(relative_change(v.value, finer.value)),
                hypotheses: hyps,
            }
        }
        NormId::Bmo => {
            let v = bmo_norm(&space, &f)?;
            NormReport {
                id: "bmo",
                value: v.value,
                eps: None,
                ball: Some(v.ball),
                eps_nodes: 0,
                refinement_delta: None,
                hypotheses: hyps,
            }
        }
    };
    let failed = report.hypotheses.iter().any(|h| !h.holds);
    let value = serde_json::to_value(&report)?;
    emit(&a.output, &value, || csv_pairs(&value))?;
    Ok(if failed && a.strict { EXIT_HYPOTHESIS } else { EXIT_OK })
}

/// `gmlab op`: applies an operator and writes the resulting values.
pub fn cmd_op(a: &OpArgs) -> Result<i32> {
    require_file(&a.space, "space")?;
    if let Some(k) = &a.kernel {
        require_file(k, "kernel")?;
    }
    if a.kind != OpKind::Vecmax && a.f.len() != 1 {
        return Err(Error::config("f", "give exactly one --f for this operator"));
    }
    let file = SpaceFile::load(&a.space)?;
    let space = file.build()?;
    let fs = a
        .f
        .iter()
        .map(|s| load_function(&file, &space, s, "f"))
        .collect::<Result<Vec<_>>>()?;
    let f = &fs[0];
    let mut meta = serde_json::Map::new();
    let values = match a.kind {
        OpKind::Maximal => maximal(&space, f)?,
        OpKind::Noncentered => noncentered_maximal(&space, f, a.r.unwrap_or(1.0))?,
        OpKind::Vecmax => vector_maximal(&space, &VectorFunction::new(fs.clone())?, a.r.unwrap_or(2.0))?,
        OpKind::Cz | OpKind::Commutator => {
            let path = a.kernel.as_ref().ok_or_else(|| Error::config("kernel", "cz and commutator need --kernel"))?;
            let mut kernel = KernelFile::load(path)?.build(&space)?;
            let sampler = TripleSampler {
                seed: match a.seed {
                    Some(s) => s,
                    None => default_seed()?,
                },
                ..TripleSampler::default()
            };
            let validation = validate_kernel(&space, &mut kernel, sampler)?;
            if !validation.validated && !a.skip_validate {
                let why = match &validation.dini {
                    Err(m) => m.clone(),
                    Ok(_) => format!("smoothness status {:?}", validation.smoothness.status),
                };
                return Err(Error::input(format!("kernel failed validation ({why}); pass --skip-validate to apply it anyway")));
            }
            meta.insert("kernel_validated".into(), Value::Bool(validation.validated));
            if a.kind == OpKind::Cz {
                apply_cz(&space, &kernel, f)?
            } else {
                let name = a.b.as_deref().ok_or_else(|| Error::config("b", "commutator needs --b"))?;
                let b = load_function(&file, &space, name, "b")?;
                commutator(&space, &kernel, &b, f)?
            }
        }
    };
    let kind = match a.kind {
        OpKind::Maximal => "maximal",
        OpKind::Noncentered => "noncentered",
        OpKind::Vecmax => "vecmax",
        OpKind::Cz => "cz",
        OpKind::Commutator => "commutator",
    };
    let mut obj = serde_json::Map::new();
    obj.insert("kind".into(), json!(kind));
    obj.extend(meta);
    obj.insert("values".into(), json!(values.values()));
    let value = Value::Object(obj);
    emit(&a.output, &value, || {
        let mut s = String::from("id,value\n");
        for (i, v) in values.values().iter().enumerate() {
            s.push_str(&format!("{},{v:.11e}\n", space.id(i)));
        }
        s
    })?;
    Ok(EXIT_OK)
}

/// `gmlab verify`: runs a suite and writes its report.
pub fn cmd_verify(a: &VerifyArgs, verbose: u8) -> Result<i32> {
    require_file(&a.config, "config")?;
    let mut config = SuiteConfig::load(&a.config)?;
    if let Some(s) = a.seed {
        config.spec.seed = s;
        config.spec.triple_sampler.seed = s;
    }
    if verbose > 0 {
        let ids: Vec<&str> = config.checks.iter().map(|c| c.as_str()).collect();
        eprintln!("running {} checks: {}", ids.len(), ids.join(" "));
    }
    let reports = run_suite(&config)?;
    if verbose > 0 {
        for r in &reports {
            eprintln!("{:8} {:>18} {}", r.check_id, format!("{:?}", r.empirical_c), r.status.as_str());
        }
    }
    if let Some(p) = &a.out {
        std::fs::write(p, to_json(&reports))?;
    }
    if let Some(p) = &a.csv {
        std::fs::write(p, to_csv(&reports))?;
    }
    if a.out.is_none() && a.csv.is_none() {
        let text = match a.format {
            Format::Json => to_json(&reports),
            Format::Csv => to_csv(&reports),
        };
        write_text(None, &text)?;
    }
    Ok(exit_code(&reports, a.strict))
}
