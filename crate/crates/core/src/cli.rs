//! Command-line front end. Results go to stdout (or `--out`) as JSON or CSV; domain
//! errors go to stderr as `{"error": {"code", "message"}}` with exit status 1, usage
//! errors exit with status 2.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::accept;
use crate::error::Error;
use crate::fixtures;
use crate::grassmannian::{self as gm, GrData, PlueckerIndex, Side};
use crate::io;
use crate::lattice::{self, fmt_rat, Int, Rat, RatVec};
use crate::laurent::{self, Flavor};
use crate::polytope::{self, AffineSubspace, Halfspace, Polytope};
use crate::scattering::{self as sc, ScatteringDiagram};
use crate::seed::{build_principal, ensemble_map, zero_frozen_block, Seed};
use crate::tropical::{Convention, PLMap};

#[derive(Parser, Debug)]
#[command(
    name = "clusterbody",
    version,
    about = "Exact cluster-variety computations"
)]
pub struct Cli {
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Render rationals as decimals (for reading only).
    #[arg(long, global = true)]
    float: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Seeds and mutation.
    #[command(subcommand)]
    Seed(SeedCmd),
    /// Laurent polynomials.
    #[command(subcommand)]
    Laurent(LaurentCmd),
    /// Tropical points and PL maps.
    #[command(subcommand)]
    Trop(TropCmd),
    /// Polytopes.
    #[command(subcommand)]
    Poly(PolyCmd),
    /// Rank-2 scattering diagrams, theta functions and structure constants.
    #[command(subcommand)]
    Scatter(ScatterCmd),
    /// Grassmannian tableaux, g-vectors and bodies.
    #[command(subcommand)]
    Gr(GrCmd),
    /// Acceptance suite.
    #[command(subcommand)]
    Accept(AcceptCmd),
}

#[derive(Args, Debug)]
struct SeedSource {
    /// Seed JSON file.
    #[arg(long, conflicts_with = "fixture")]
    file: Option<PathBuf>,
    /// Bundled seed fixture (running-example, a2, kronecker).
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Subcommand, Debug)]
enum SeedCmd {
    /// Mutate at an unfrozen index (0-based).
    Mutate {
        #[command(flatten)]
        src: SeedSource,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FlavorArg {
    A,
    X,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Self {
        match f {
            FlavorArg::A => Flavor::A,
            FlavorArg::X => Flavor::X,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConvArg {
    #[value(name = "T")]
    Upper,
    #[value(name = "t")]
    Lower,
}

impl From<ConvArg> for Convention {
    fn from(c: ConvArg) -> Self {
        match c {
            ConvArg::Upper => Convention::Upper,
            ConvArg::Lower => Convention::Lower,
        }
    }
}

#[derive(Subcommand, Debug)]
enum LaurentCmd {
    /// Re-express a Laurent polynomial from the chart of one seed in the chart of another.
    Transport {
        #[command(flatten)]
        src: SeedSource,
        /// Laurent polynomial JSON file.
        #[arg(long)]
        poly: PathBuf,
        /// Mutation word of the source seed, e.g. "0,1".
        #[arg(long, default_value = "")]
        from: String,
        #[arg(long, default_value = "")]
        to: String,
        #[arg(long, value_enum, default_value = "a")]
        flavor: FlavorArg,
    },
}

#[derive(Subcommand, Debug)]
enum TropCmd {
    /// Apply the tropicalized mutations along a word to a point.
    Map {
        #[command(flatten)]
        src: SeedSource,
        #[arg(long, default_value = "")]
        word: String,
        #[arg(long, value_enum, default_value = "a")]
        flavor: FlavorArg,
        #[arg(long, value_enum, default_value = "T")]
        conv: ConvArg,
        /// Comma-separated rational coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Apply the inverse map instead.
        #[arg(long)]
        inverse: bool,
    },
}

#[derive(Subcommand, Debug)]
enum PolyCmd {
    /// Convex hull of a JSON list of points.
    Hull {
        #[arg(long)]
        points: PathBuf,
    },
    /// Slice of a superpotential cone: {"pl": [PL], "offsets": [rat], "fiber": [{"normal", "offset"}]}.
    Slice {
        #[arg(long)]
        file: PathBuf,
    },
    /// Lattice points of a polytope JSON.
    Points {
        #[arg(long)]
        file: PathBuf,
        /// Enumerate the bounding box instead.
        #[arg(long)]
        brute: bool,
    },
}

#[derive(Subcommand, Debug)]
enum ScatterCmd {
    /// Consistent completion to a given order.
    Complete {
        #[command(flatten)]
        src: SeedSource,
        #[arg(long, default_value_t = 8)]
        order: usize,
        /// Complete the principal-coefficient data instead.
        #[arg(long)]
        prin: bool,
    },
    /// Theta function. A label "c(n1,...)" gives the X-side function for n, computed on
    /// principal coefficients; a plain label "m1,..." gives the function on the diagram itself.
    Theta {
        #[command(flatten)]
        src: SeedSource,
        #[arg(long, allow_hyphen_values = true)]
        label: String,
        #[arg(long, default_value_t = 8)]
        bound: usize,
        /// Endpoint (defaults to a generic point of the positive chamber).
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Structure constant alpha(p, q, r).
    Alpha {
        #[command(flatten)]
        src: SeedSource,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long, default_value_t = 8)]
        bound: usize,
    },
}

#[derive(Args, Debug)]
struct GrArgs {
    /// Number of grid columns.
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// Restrict to one index set, e.g. "2,4".
    #[arg(long = "J")]
    j: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum GrCmd {
    /// Gelfand-Tsetlin tableaux.
    Val(GrArgs),
    /// Hook g-vectors and their homogenizations.
    Gvec(GrArgs),
    /// Check -psi(val) = homogenized g for every index.
    Verify(GrArgs),
    /// Newton-Okounkov body on the flow or g-vector side.
    Nobody {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "gvec")]
        side: String,
    },
}

#[derive(Subcommand, Debug)]
enum AcceptCmd {
    /// Run one criterion, or all of them.
    Run {
        #[arg(long)]
        id: Option<u32>,
    },
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Out = std::result::Result<Output, Failure>;

enum Output {
    Json(Value),
    Text(String),
}

pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    run(cli)
}

pub fn run(cli: Cli) -> ExitCode {
    let result = dispatch(&cli.command);
    let (out, status) = match result {
        Ok(o) => (o, 0u8),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Domain(e)) => {
            let v = json!({"error": {"code": e.code(), "message": e.to_string()}});
            eprintln!("{}", serde_json::to_string(&v).expect("serializable"));
            return ExitCode::from(1);
        }
    };
    let (text, status) = match out {
        Output::Json(v) => {
            let failed = v.get("pass").and_then(Value::as_bool) == Some(false)
                || v.get("all_pass").and_then(Value::as_bool) == Some(false);
            let v = if cli.float { floats(v) } else { v };
            (io::to_pretty(&v) + "\n", if failed { 1 } else { status })
        }
        Output::Text(t) => (t, status),
    };
    if let Err(e) = emit(cli.out.as_deref(), &text) {
        let v = json!({"error": {"code": "IoError", "message": e.to_string()}});
        eprintln!("{v}");
        return ExitCode::from(1);
    }
    ExitCode::from(status)
}

/// Writes atomically when a path is given.
fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        None => std::io::stdout().lock().write_all(text.as_bytes()),
        Some(p) => {
            let tmp = p.with_extension("tmp");
            std::fs::write(&tmp, text)?;
            std::fs::rename(tmp, p)
        }
    }
}

fn floats(v: Value) -> Value {
    match v {
        Value::String(s) if s.contains('/') => match lattice::parse_rat(&s) {
            Ok(r) => json!(r.to_f64().unwrap_or(f64::NAN)),
            Err(_) => Value::String(s),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(floats).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, floats(v))).collect()),
        other => other,
    }
}

fn read_json(path: &Path) -> std::result::Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Domain(Error::Invalid(format!("{}: {e}", path.display()))))?;
    Ok(io::parse_json(&text)?)
}

fn load_seed(src: &SeedSource) -> std::result::Result<Seed, Failure> {
    match (&src.file, &src.fixture) {
        (Some(f), _) => Ok(io::seed_from_json(&read_json(f)?)?),
        (None, Some(name)) => Ok(fixtures::seed(name)?),
        (None, None) => Err(Failure::Usage(
            "one of --file or --fixture is required".into(),
        )),
    }
}

fn dispatch(cmd: &Command) -> Out {
    match cmd {
        Command::Seed(SeedCmd::Mutate { src, k }) => {
            let s = load_seed(src)?.mutate(*k)?;
            Ok(Output::Json(io::seed_to_json(&s)))
        }
        Command::Laurent(LaurentCmd::Transport {
            src,
            poly,
            from,
            to,
            flavor,
        }) => {
            let s = load_seed(src)?;
            let fd = s.fixed_arc().clone();
            let a = s.mutate_word(&io::parse_word(from)?)?;
            let b = s.mutate_word(&io::parse_word(to)?)?;
            let f = io::laurent_from_json(&read_json(poly)?, fd.n())?;
            let g = laurent::transport(&f, &a, &b, (*flavor).into())?;
            Ok(Output::Json(io::laurent_to_json(&g)))
        }
        Command::Trop(TropCmd::Map {
            src,
            word,
            flavor,
            conv,
            point,
            inverse,
        }) => {
            let s = load_seed(src)?;
            let x = io::parse_rat_list(point)?;
            if x.len() != s.n() {
                return Err(Error::Invalid(format!(
                    "point has {} coordinates, expected {}",
                    x.len(),
                    s.n()
                ))
                .into());
            }
            let mut map =
                PLMap::mutations(&s, &io::parse_word(word)?, (*flavor).into(), (*conv).into())?;
            if *inverse {
                map = map.inverse()?;
            }
            Ok(Output::Json(
                json!({"point": io::rat_strings(&map.apply(&x))}),
            ))
        }
        Command::Poly(p) => poly(p),
        Command::Scatter(s) => scatter(s),
        Command::Gr(g) => gr(g),
        Command::Accept(AcceptCmd::Run { id }) => {
            let reports = match id {
                Some(id) => vec![accept::run(*id)?],
                None => accept::run_all(),
            };
            let all = reports.iter().all(|r| r.pass());
            Ok(Output::Json(json!({
                "pass": all,
                "criteria": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            })))
        }
    }
}

fn poly(cmd: &PolyCmd) -> Out {
    match cmd {
        PolyCmd::Hull { points } => {
            let pts = io::points_from_json(&read_json(points)?)?;
            Ok(Output::Json(io::polytope_to_json(&Polytope::hull(&pts)?)))
        }
        PolyCmd::Slice { file } => {
            let v = read_json(file)?;
            let pl = v
                .get("pl")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Invalid("missing \"pl\" list".into()))?
                .iter()
                .map(io::pl_from_json)
                .collect::<crate::Result<Vec<_>>>()?;
            let offsets: RatVec = match v.get("offsets") {
                Some(o) => io::parse_rats(
                    &serde_json::from_value::<Vec<String>>(o.clone())
                        .map_err(|e| Error::Invalid(e.to_string()))?,
                )?,
                None => vec![Rat::zero(); pl.len()],
            };
            let cone = polytope::superpotential_cone(&pl, &offsets)?;
            let eqs = match v.get("fiber") {
                Some(f) => parse_halfspaces(f)?,
                None => Vec::new(),
            };
            let body = polytope::slice(
                &cone,
                &AffineSubspace {
                    dim: cone.dim,
                    equations: eqs,
                },
            )?;
            Ok(Output::Json(io::polytope_to_json(&body)))
        }
        PolyCmd::Points { file, brute } => {
            let p = io::polytope_from_json(&read_json(file)?)?;
            let pts = if *brute {
                polytope::lattice_points_brute(&p)
            } else {
                polytope::lattice_points(&p)
            };
            Ok(Output::Json(
                json!({"count": pts.len(), "points": io::int_points_to_json(&pts)}),
            ))
        }
    }
}

fn parse_halfspaces(v: &Value) -> crate::Result<Vec<Halfspace>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Invalid("fiber must be a list".into()))?;
    arr.iter()
        .map(|h| {
            let normal: Vec<String> = serde_json::from_value(h["normal"].clone())
                .map_err(|e| Error::Invalid(e.to_string()))?;
            let offset = h["offset"]
                .as_str()
                .map(str::to_string)
                .unwrap_or_else(|| h["offset"].to_string());
            Ok(Halfspace::new(
                io::parse_rats(&normal)?,
                lattice::parse_rat(&offset)?,
            ))
        })
        .collect()
}

fn scatter(cmd: &ScatterCmd) -> Out {
    match cmd {
        ScatterCmd::Complete { src, order, prin } => {
            let s = load_seed(src)?;
            let fd = if *prin {
                build_principal(s.fixed())
            } else {
                s.fixed().clone()
            };
            let d = sc::complete_rank2(&ScatteringDiagram::initial(&fd)?, *order)?;
            let consistent = sc::is_consistent(&d, *order)?;
            let mut v = io::diagram_to_json(&d);
            v["consistent"] = json!(consistent);
            Ok(Output::Json(v))
        }
        ScatterCmd::Theta {
            src,
            label,
            bound,
            at,
        } => {
            let s = load_seed(src)?;
            let fd = s.fixed_arc().clone();
            if label.contains('(') {
                let (mult, n) = io::parse_label(label)?;
                let l = fd.d().iter().fold(1i64, |a, &b| num::integer::lcm(a, b));
                if mult != Int::from(l) && !label.trim_start().starts_with('(') {
                    return Err(Error::Invalid(format!("label multiplier must be {l}")).into());
                }
                let dg = sc::complete_rank2(
                    &ScatteringDiagram::initial(&build_principal(&fd))?,
                    *bound,
                )?;
                let p = ensemble_map(&fd, &zero_frozen_block(&fd))?;
                let (x, t) = sc::theta_on_x(&dg, &p, &n, *bound)?;
                Ok(Output::Json(json!({
                    "label": label,
                    "n": lattice::fmt_vec(&n),
                    "poly": io::laurent_to_json(&x),
                    "display": x.to_string(),
                    "prin_label": lattice::fmt_vec(&sc::prin_label(&p, &n)),
                    "prin_poly": io::laurent_to_json(&t.poly),
                    "exact": t.exact,
                    "lines": t.lines,
                })))
            } else {
                let m = io::parse_int_list(label)?;
                let dg = sc::complete_rank2(&ScatteringDiagram::initial(&fd)?, *bound)?;
                if m.len() != dg.dim {
                    return Err(
                        Error::Invalid(format!("label needs {} coordinates", dg.dim)).into(),
                    );
                }
                let base = match at {
                    Some(a) => io::parse_rat_list(a)?,
                    None => sc::default_basepoint(&dg),
                };
                let t = sc::theta_function(&dg, &m, &base, *bound)?;
                Ok(Output::Json(json!({
                    "label": lattice::fmt_vec(&m),
                    "poly": io::laurent_to_json(&t.poly),
                    "display": t.poly.to_string(),
                    "endpoint": io::rat_strings(&t.endpoint),
                    "exact": t.exact,
                    "lines": t.lines,
                })))
            }
        }
        ScatterCmd::Alpha {
            src,
            p,
            q,
            r,
            bound,
        } => {
            let s = load_seed(src)?;
            let dg = sc::complete_rank2(&ScatteringDiagram::initial(s.fixed())?, *bound)?;
            let (p, q, r) = (
                io::parse_int_list(p)?,
                io::parse_int_list(q)?,
                io::parse_int_list(r)?,
            );
            if [&p, &q, &r].iter().any(|v| v.len() != dg.dim) {
                return Err(Error::Invalid(format!("labels need {} coordinates", dg.dim)).into());
            }
            let a = sc::structure_constant(&dg, &p, &q, &r, *bound)?;
            Ok(Output::Json(
                json!({"p": lattice::fmt_vec(&p), "q": lattice::fmt_vec(&q), "r": lattice::fmt_vec(&r), "alpha": fmt_rat(&a)}),
            ))
        }
    }
}

fn indices(gr: &GrData, j: &Option<String>) -> crate::Result<Vec<PlueckerIndex>> {
    match j {
        Some(s) => Ok(vec![PlueckerIndex::parse(gr, s)?]),
        None => Ok(gr.all_indices()),
    }
}

fn csv(header: &[String], rows: Vec<Vec<String>>) -> Output {
    let mut out = header.join(",") + "\n";
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    Output::Text(out)
}

fn quoted(s: String) -> String {
    format!("\"{s}\"")
}

fn gr(cmd: &GrCmd) -> Out {
    match cmd {
        GrCmd::Val(a) => {
            let gr = GrData::new(a.k, a.n)?;
            let rows: Vec<(PlueckerIndex, gm::GTTableau)> = indices(&gr, &a.j)?
                .into_iter()
                .map(|j| (j.clone(), gm::gt_valuation(&j, &gr)))
                .collect();
            if a.format == Format::Csv {
                let header: Vec<String> = std::iter::once("J".to_string())
                    .chain((1..gr.dim()).map(|v| gr.vertex_name(v)))
                    .collect();
                let body = rows
                    .iter()
                    .map(|(j, t)| {
                        std::iter::once(quoted(j.to_string()))
                            .chain(t.to_vec().iter().map(Int::to_string))
                            .collect()
                    })
                    .collect();
                return Ok(csv(&header, body));
            }
            Ok(Output::Json(json!({
                "k": gr.k, "n": gr.n,
                "tableaux": rows.iter().map(|(j, t)| json!({"J": j.to_string(), "entries": t.entries})).collect::<Vec<_>>(),
            })))
        }
        GrCmd::Gvec(a) => {
            let gr = GrData::new(a.k, a.n)?;
            let js = indices(&gr, &a.j)?;
            let names: Vec<String> = (0..gr.dim()).map(|v| gr.vertex_name(v)).collect();
            if a.format == Format::Csv {
                let header: Vec<String> = std::iter::once("J".to_string())
                    .chain(names.iter().cloned())
                    .collect();
                let body = js
                    .iter()
                    .map(|j| {
                        std::iter::once(quoted(j.to_string()))
                            .chain(gm::hook_g_vector(j, &gr).iter().map(Int::to_string))
                            .collect()
                    })
                    .collect();
                return Ok(csv(&header, body));
            }
            Ok(Output::Json(json!({
                "k": gr.k, "n": gr.n,
                "coordinates": names,
                "g_vectors": js.iter().map(|j| json!({
                    "J": j.to_string(),
                    "hook": lattice::fmt_vec(&gm::hook_g_vector(j, &gr)),
                    "homogenized": lattice::fmt_vec(&gm::homogenized_g(j, &gr)),
                })).collect::<Vec<_>>(),
            })))
        }
        GrCmd::Verify(a) => {
            let gr = GrData::new(a.k, a.n)?;
            let rep = gm::check_val_gv(&gr, &indices(&gr, &a.j)?);
            if a.format == Format::Csv {
                let header = ["J", "minus_psi_val", "homogenized_g", "pass"]
                    .map(String::from)
                    .to_vec();
                let body = rep
                    .entries
                    .iter()
                    .map(|e| {
                        vec![
                            quoted(e.index.to_string()),
                            quoted(lattice::fmt_vec(&e.lhs)),
                            quoted(lattice::fmt_vec(&e.rhs)),
                            e.pass.to_string(),
                        ]
                    })
                    .collect();
                return Ok(csv(&header, body));
            }
            Ok(Output::Json(json!({
                "k": gr.k, "n": gr.n,
                "passed": rep.passed(),
                "total": rep.entries.len(),
                "all_pass": rep.all_pass(),
                "entries": rep.entries.iter().map(|e| json!({
                    "J": e.index.to_string(),
                    "minus_psi_val": lattice::fmt_vec(&e.lhs),
                    "homogenized_g": lattice::fmt_vec(&e.rhs),
                    "pass": e.pass,
                })).collect::<Vec<_>>(),
            })))
        }
        GrCmd::Nobody { k, n, side } => {
            let gr = GrData::new(*k, *n)?;
            let side: Side = side.parse()?;
            let body = gm::no_body(&gr, side)?;
            let mut v = io::polytope_to_json(&body);
            v["lattice_points"] = json!(polytope::lattice_points(&body).len());
            Ok(Output::Json(v))
        }
    }
}
