//! Command-line front end. [`run`] parses arguments and returns the exit
//! code together with everything that would be printed, so the binary is a
//! thin wrapper.
//!
//! Exit codes: 0 success, 1 internal sentinel tripped, 2 invalid input,
//! 3 Cayley–Hamilton method refused, 4 field-extension cap reached.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::cayley_hamilton::{ch_newton_polygon, diagram_render, MainPart};
use crate::deformation::{
    chain_strata, sample_generic, stratum_spec, StratumSpec, UniversalDisplay,
};
use crate::dieudonne::{DieudonneModule, ModuleFile};
use crate::error::{Error, Result};
use crate::newton::{compare, enumerate_admissible, is_above_or_equal, AdmissibleParams, NewtonPolygon};
use crate::normal_form::normalize;
use crate::witt::{make_context, WittContext};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SENTINEL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;
pub const EXIT_FIELD_CAP: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "dieudonne", version, about = "Newton polygons, normal forms and Newton strata of quasi-polarized Dieudonné modules")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Residue characteristic.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Degree of the unramified O-structure.
    #[arg(long, global = true)]
    pub f: Option<usize>,
    /// Rank over O of each half of the module (g = f r).
    #[arg(long, global = true)]
    pub r: Option<usize>,
    /// Residue field degree; a multiple of f (default f).
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Working precision (default 2 m g + 4).
    #[arg(long = "N", global = true)]
    pub n: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// JSON output (the default).
    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,
    /// Human-readable output.
    #[arg(long, global = true)]
    pub text: bool,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the admissible polygons and their pairwise order.
    Admissible {
        /// Keep only polygons below SLOPES in the specialization order,
        /// i.e. lying on or above it.
        #[arg(long, value_name = "SLOPES")]
        below: Option<String>,
    },
    /// Newton polygon of a module file.
    Np {
        module: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Surviving deformation variables of a Newton stratum.
    Strata {
        /// Slopes, e.g. "0,1/3,2/3,1" (multiplicity f); supersingular by default.
        #[arg(long)]
        beta: Option<String>,
    },
    /// Symplectic normal form of a module file.
    NormalForm {
        module: PathBuf,
        /// Omit the change of basis from the output.
        #[arg(long)]
        no_basis: bool,
    },
    /// Random points of a stratum, or the strata of a chain.
    Deform {
        #[arg(long)]
        beta: Option<String>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// JSON file with a decreasing chain of polygons.
        #[arg(long, conflicts_with = "beta")]
        chain: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Ch,
    Oracle,
    Both,
}

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, msg: String) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: msg,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ChValidity { .. } => EXIT_REFUSED,
        Error::FieldTooSmall { .. } => EXIT_FIELD_CAP,
        _ => EXIT_INVALID,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome::fail(code, text)
            };
        }
    };
    let mut out = match execute(&cli) {
        Ok(out) => out,
        Err(e) => Outcome::fail(exit_code(&e), format!("error: {e}\n")),
    };
    if let Some(path) = &cli.global.output {
        if out.code == EXIT_OK || out.code == EXIT_SENTINEL {
            if let Err(e) = std::fs::write(path, &out.stdout) {
                return Outcome::fail(EXIT_INVALID, format!("error: writing {}: {e}\n", path.display()));
            }
            out.stdout.clear();
        }
    }
    out
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Admissible { below } => cmd_admissible(g, below.as_deref()),
        Command::Np { module, method } => cmd_np(g, module, *method),
        Command::Strata { beta } => cmd_strata(g, beta.as_deref()),
        Command::NormalForm { module, no_basis } => cmd_normal_form(g, module, !no_basis),
        Command::Deform { beta, trials, chain } => match chain {
            Some(path) => cmd_chain(g, path),
            None => cmd_deform(g, beta.as_deref(), *trials),
        },
    }
}

fn fr(g: &GlobalArgs) -> Result<(usize, usize)> {
    match (g.f, g.r) {
        (Some(f), Some(r)) if f > 0 && r > 0 => Ok((f, r)),
        (Some(_), Some(_)) => Err(Error::InvalidParams("--f and --r must be positive".into())),
        _ => Err(Error::InvalidParams("--f and --r are required".into())),
    }
}

fn context(g: &GlobalArgs, f: usize, r: usize) -> Result<std::sync::Arc<WittContext>> {
    let p = g.p.unwrap_or(2);
    let m = g.m.unwrap_or(f);
    if m == 0 || m % f != 0 {
        return Err(Error::InvalidParams(format!("--m {m} must be a positive multiple of f = {f}")));
    }
    let n = g.n.unwrap_or((2 * m * f * r + 4) as u32);
    make_context(p, m, n)
}

fn parse_beta(s: Option<&str>, f: usize, r: usize) -> Result<NewtonPolygon> {
    match s {
        Some(s) => NewtonPolygon::parse(s, f as u32),
        None => Ok(NewtonPolygon::supersingular((f * r) as u32)),
    }
}

fn render(g: &GlobalArgs, value: &Value, text: impl FnOnce() -> String) -> String {
    if g.text {
        text()
    } else {
        let mut s = serde_json::to_string_pretty(value).expect("serializable");
        s.push('\n');
        s
    }
}

fn cmd_admissible(g: &GlobalArgs, below: Option<&str>) -> Result<Outcome> {
    let (f, r) = fr(g)?;
    let params = AdmissibleParams::new(f as u32, r as u32)?;
    let mut polys = enumerate_admissible(params)?;
    if let Some(s) = below {
        let beta = NewtonPolygon::parse(s, f as u32)?;
        if beta.height() != 2 * params.g() {
            return Err(Error::HeightMismatch(beta.height(), 2 * params.g()));
        }
        let mut kept = Vec::new();
        for p in polys {
            if is_above_or_equal(&p, &beta)? {
                kept.push(p);
            }
        }
        polys = kept;
    }
    let mut relations = Vec::new();
    for (k, a) in polys.iter().enumerate() {
        for b in &polys[k + 1..] {
            relations.push((a, b, compare(a, b)?));
        }
    }
    let fu = f as u32;
    let value = json!({
        "f": f,
        "r": r,
        "count": polys.len(),
        "polygons": polys.iter().map(|p| json!({"slopes": p.to_slope_string(fu), "polygon": p})).collect::<Vec<_>>(),
        "relations": relations.iter().map(|(a, b, o)| json!({
            "a": a.to_slope_string(fu),
            "b": b.to_slope_string(fu),
            "order": format!("{o:?}").to_lowercase(),
        })).collect::<Vec<_>>(),
    });
    Ok(Outcome::ok(render(g, &value, || {
        let mut s = String::new();
        for p in &polys {
            let _ = writeln!(s, "{}", p.to_slope_string(fu));
        }
        for (a, b, o) in &relations {
            let sym = match o {
                crate::newton::PolygonOrder::Above => ">",
                crate::newton::PolygonOrder::Below => "<",
                crate::newton::PolygonOrder::Equal => "=",
                crate::newton::PolygonOrder::Incomparable => "||",
            };
            let _ = writeln!(s, "({}) {sym} ({})", a.to_slope_string(fu), b.to_slope_string(fu));
        }
        s
    })))
}

fn load_module(path: &Path) -> Result<(ModuleFile, DieudonneModule)> {
    let text = std::fs::read_to_string(path)?;
    let file: ModuleFile = serde_json::from_str(&text)?;
    let module = file.to_module()?;
    Ok((file, module))
}

fn cmd_np(g: &GlobalArgs, path: &Path, method: Method) -> Result<Outcome> {
    let (file, module) = load_module(path)?;
    let f = file.f as u32;
    let ch = || -> Result<NewtonPolygon> {
        let mp = MainPart::from_frobenius(module.frob_matrix()).map_err(|e| {
            Error::InvalidModule(format!("{e}; the Cayley-Hamilton method needs the normal shape, try --method oracle"))
        })?;
        ch_newton_polygon(&mp)
    };
    let (ch_np, oracle_np) = match method {
        Method::Ch => (Some(ch()?), None),
        Method::Oracle => (None, Some(module.slopes_oracle()?)),
        Method::Both => (Some(ch()?), Some(module.slopes_oracle()?)),
    };
    let agree = match (&ch_np, &oracle_np) {
        (Some(a), Some(b)) => Some(a == b),
        _ => None,
    };
    let mut value = json!({});
    for (key, np) in [("ch", &ch_np), ("oracle", &oracle_np)] {
        if let Some(np) = np {
            value[key] = json!({"slopes": np.to_slope_string(f), "polygon": np});
        }
    }
    if let Some(a) = agree {
        value["agree"] = json!(a);
    }
    let stdout = render(g, &value, || {
        let mut s = String::new();
        for (key, np) in [("ch", &ch_np), ("oracle", &oracle_np)] {
            if let Some(np) = np {
                let _ = writeln!(s, "{key:<7}{}", np.to_slope_string(f));
            }
        }
        if agree == Some(false) {
            s.push_str("methods disagree\n");
        }
        s
    });
    let mut out = Outcome::ok(stdout);
    if agree == Some(false) {
        out.code = EXIT_SENTINEL;
        out.stderr = "error: the two methods disagree\n".into();
    }
    Ok(out)
}

fn stratum_json(spec: &StratumSpec) -> Value {
    let mut v = serde_json::to_value(spec).expect("serializable");
    v["slopes"] = json!(spec.beta.to_slope_string(spec.f as u32));
    v
}

fn cmd_strata(g: &GlobalArgs, beta: Option<&str>) -> Result<Outcome> {
    let (f, r) = fr(g)?;
    let beta = parse_beta(beta, f, r)?;
    let spec = stratum_spec(&beta, f, r)?;
    let ctx = make_context(g.p.unwrap_or(2), 1, 2)?;
    let diagram = diagram_render(&MainPart::zero(&ctx, f * r), f, Some(&beta));
    let mut value = stratum_json(&spec);
    value["diagram"] = json!(diagram);
    Ok(Outcome::ok(render(g, &value, || {
        let names: Vec<String> = spec.s.iter().map(ToString::to_string).collect();
        format!(
            "beta {}\ndim  {}\nS    {}\n\n{diagram}",
            beta.to_slope_string(f as u32),
            spec.dim,
            names.join(" ")
        )
    })))
}

fn cmd_normal_form(g: &GlobalArgs, path: &Path, with_basis: bool) -> Result<Outcome> {
    let (_, module) = load_module(path)?;
    let target = g.n.unwrap_or(module.ctx().precision());
    let res = normalize(&module, target)?;
    let value = res.to_json(with_basis);
    Ok(Outcome::ok(render(g, &value, || {
        let mut s = format!(
            "field degree {} (ladder {:?})\n",
            res.field_extension_used, res.ladder
        );
        for (i, j, v) in res.coeffs.upper_entries() {
            let _ = writeln!(s, "a[{i},{j}] = {v}");
        }
        s
    })))
}

fn cmd_deform(g: &GlobalArgs, beta: Option<&str>, trials: usize) -> Result<Outcome> {
    let (f, r) = fr(g)?;
    let beta = parse_beta(beta, f, r)?;
    let spec = stratum_spec(&beta, f, r)?;
    let ctx = context(g, f, r)?;
    let ud = UniversalDisplay::supersingular(&ctx, f, r);
    let report = sample_generic(&spec, &ud, g.seed, trials)?;
    let fu = f as u32;
    let mut value = serde_json::to_value(&report)?;
    value["hit_rate"] = json!(report.hit_rate());
    let stdout = render(g, &value, || {
        let mut s = format!(
            "beta {}\ndim {}  trials {}  exact {}  below {}  seed {} ({})\n",
            beta.to_slope_string(fu),
            report.dim,
            report.trials,
            report.hits,
            report.below_beta,
            report.seed,
            report.generator
        );
        for o in &report.polygons_observed {
            let _ = writeln!(s, "{:>6}  {}", o.count, o.polygon.to_slope_string(fu));
        }
        s
    });
    let mut out = Outcome::ok(stdout);
    if report.below_beta > 0 {
        out.code = EXIT_SENTINEL;
        out.stderr = format!("error: {} trials produced a polygon not on or above beta\n", report.below_beta);
    }
    Ok(out)
}

/// `{"f": 3, "r": 2, "chain": [...]}` or a bare list (with `--f`, `--r`);
/// entries are slope strings or polygon objects.
#[derive(Deserialize)]
#[serde(untagged)]
enum ChainFile {
    Full { f: usize, r: usize, chain: Vec<ChainEntry> },
    Bare(Vec<ChainEntry>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ChainEntry {
    Slopes(String),
    Polygon(NewtonPolygon),
}

fn cmd_chain(g: &GlobalArgs, path: &Path) -> Result<Outcome> {
    let text = std::fs::read_to_string(path)?;
    let file: ChainFile = serde_json::from_str(&text)?;
    let ((f, r), entries) = match file {
        ChainFile::Full { f, r, chain } => ((f, r), chain),
        ChainFile::Bare(chain) => (fr(g)?, chain),
    };
    let betas = entries
        .into_iter()
        .map(|e| match e {
            ChainEntry::Slopes(s) => NewtonPolygon::parse(&s, f as u32),
            ChainEntry::Polygon(p) => Ok(p),
        })
        .collect::<Result<Vec<_>>>()?;
    let specs = chain_strata(&betas, f, r)?;
    let value = json!({
        "f": f,
        "r": r,
        "strata": specs.iter().map(stratum_json).collect::<Vec<_>>(),
    });
    Ok(Outcome::ok(render(g, &value, || {
        let mut s = String::new();
        for spec in &specs {
            let names: Vec<String> = spec.s.iter().map(ToString::to_string).collect();
            let _ = writeln!(
                s,
                "{:<22} dim {:>2}  {}",
                spec.beta.to_slope_string(f as u32),
                spec.dim,
                names.join(" ")
            );
        }
        s
    })))
}
