//! JSON interchange. Rationals travel as strings (`"p/q"`, or `"p"` when integral).

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{self, fmt_rat, parse_rat, Int, IntMat, IntVec, Rat, RatMat, RatVec};
use crate::laurent::LaurentPolynomial;
use crate::polytope::{Halfspace, Polytope};
use crate::scattering::{Plane, ScatteringDiagram, Wall};
use crate::seed::{FixedData, Seed};
use crate::tropical::{Convention, PLFunction};

fn bad(e: impl std::fmt::Display) -> Error {
    Error::Invalid(e.to_string())
}

pub fn rat_strings(v: &[Rat]) -> Vec<String> {
    v.iter().map(fmt_rat).collect()
}

pub fn parse_rats(v: &[String]) -> Result<RatVec> {
    v.iter().map(|s| parse_rat(s)).collect()
}

fn ints(v: &[Int]) -> Vec<Value> {
    // Big integers are emitted as JSON numbers when they fit, strings otherwise.
    v.iter()
        .map(|x| match i64::try_from(x) {
            Ok(i) => json!(i),
            Err(_) => json!(x.to_string()),
        })
        .collect()
}

fn int_of(v: &Value) -> Result<Int> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(Int::from)
            .ok_or_else(|| bad(format!("not an integer: {n}"))),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| bad(format!("not an integer: {s:?}"))),
        _ => Err(bad("expected an integer")),
    }
}

fn int_vec_of(v: &Value) -> Result<IntVec> {
    v.as_array()
        .ok_or_else(|| bad("expected an integer array"))?
        .iter()
        .map(int_of)
        .collect()
}

fn rat_of_value(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(_) => Ok(lattice::rat_of(&int_of(v)?)),
        _ => Err(bad("expected a rational string")),
    }
}

fn rat_vec_of(v: &Value) -> Result<RatVec> {
    v.as_array()
        .ok_or_else(|| bad("expected a rational array"))?
        .iter()
        .map(rat_of_value)
        .collect()
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| bad(format!("missing field {key:?}")))
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(bad)
}

pub fn to_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values always serialize")
}

// ---------------------------------------------------------------------------
// Seeds

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SeedFile {
    n: usize,
    unfrozen: Vec<usize>,
    #[serde(default)]
    lambda: Option<Vec<Value>>,
    /// Accepted as an alternative to `lambda`.
    #[serde(default)]
    eps: Option<Vec<Value>>,
    d: Vec<i64>,
    #[serde(default)]
    word: Vec<usize>,
}

fn rat_matrix(rows: &[Value]) -> Result<RatMat> {
    let rows = rows.iter().map(rat_vec_of).collect::<Result<Vec<_>>>()?;
    RatMat::from_rows(rows)
}

pub fn seed_from_json(v: &Value) -> Result<Seed> {
    let f: SeedFile = serde_json::from_value(v.clone()).map_err(bad)?;
    let fd = match (&f.lambda, &f.eps) {
        (Some(l), _) => {
            let lam = rat_matrix(l)?;
            FixedData::new(f.n, f.unfrozen.clone(), lam, f.d.clone())?
        }
        (None, Some(e)) => {
            let eps = rat_matrix(e)?;
            if eps.rows() != f.n || eps.cols() != f.n {
                return Err(bad("exchange matrix has the wrong size"));
            }
            FixedData::from_exchange_rat(&eps, &f.d, &f.unfrozen)?
        }
        (None, None) => return Err(bad("seed needs \"lambda\" or \"eps\"")),
    };
    Seed::from_word(Arc::new(fd), &f.word)
}

fn mat_strings(m: &RatMat) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| rat_strings(r)).collect()
}

/// Seed file plus the current exchange matrix (`eps`, informational) and `basis`.
pub fn seed_to_json(s: &Seed) -> Value {
    let fd = s.fixed();
    json!({
        "n": fd.n(),
        "unfrozen": fd.unfrozen(),
        "lambda": mat_strings(fd.lambda()),
        "d": fd.d(),
        "word": s.word(),
        "eps": mat_strings(s.eps()),
        "basis": s.basis().to_rows().iter().map(|r| ints(r)).collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------------------
// Laurent polynomials

pub fn laurent_to_json(f: &LaurentPolynomial) -> Value {
    Value::Array(
        f.terms()
            .map(|(e, c)| json!({"exp": ints(e), "coef": fmt_rat(c)}))
            .collect(),
    )
}

pub fn laurent_from_json(v: &Value, nvars: usize) -> Result<LaurentPolynomial> {
    let terms = v
        .as_array()
        .ok_or_else(|| bad("Laurent polynomial must be a list of terms"))?;
    let mut out = LaurentPolynomial::zero(nvars);
    for t in terms {
        let e = int_vec_of(field(t, "exp")?)?;
        if e.len() != nvars {
            return Err(bad(format!(
                "exponent has length {}, expected {nvars}",
                e.len()
            )));
        }
        out.add_term(e, rat_of_value(field(t, "coef")?)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// PL functions

pub fn pl_to_json(f: &PLFunction) -> Value {
    let kind = match f.kind {
        Convention::Upper => "T",
        Convention::Lower => "t",
    };
    json!({"kind": kind, "support": f.support.iter().map(|s| ints(s)).collect::<Vec<_>>()})
}

pub fn pl_from_json(v: &Value) -> Result<PLFunction> {
    let kind = match field(v, "kind")?.as_str() {
        Some("T") => Convention::Upper,
        Some("t") => Convention::Lower,
        _ => return Err(bad("PL kind must be \"T\" or \"t\"")),
    };
    let support = field(v, "support")?
        .as_array()
        .ok_or_else(|| bad("support must be a list"))?
        .iter()
        .map(int_vec_of)
        .collect::<Result<Vec<_>>>()?;
    if support.is_empty() || support.iter().any(|s| s.len() != support[0].len()) {
        return Err(bad(
            "support must be a nonempty list of equal-length vectors",
        ));
    }
    Ok(PLFunction { kind, support })
}

// ---------------------------------------------------------------------------
// Polytopes

fn halfspace_json(h: &Halfspace) -> Value {
    json!({"normal": rat_strings(&h.normal), "offset": fmt_rat(&h.offset)})
}

fn halfspace_of(v: &Value) -> Result<Halfspace> {
    Ok(Halfspace::new(
        rat_vec_of(field(v, "normal")?)?,
        rat_of_value(field(v, "offset")?)?,
    ))
}

pub fn polytope_to_json(p: &Polytope) -> Value {
    json!({
        "dim": p.dim(),
        "vertices": p.vertices().iter().map(|v| rat_strings(v)).collect::<Vec<_>>(),
        "facets": p.facets().iter().map(halfspace_json).collect::<Vec<_>>(),
        "equalities": p.equalities().iter().map(halfspace_json).collect::<Vec<_>>(),
    })
}

/// Reads a polytope from its vertices, or from facets (and equalities) when no vertices are given.
pub fn polytope_from_json(v: &Value) -> Result<Polytope> {
    if let Some(verts) = v
        .get("vertices")
        .and_then(Value::as_array)
        .filter(|a| !a.is_empty())
    {
        let pts = verts.iter().map(rat_vec_of).collect::<Result<Vec<_>>>()?;
        return Polytope::hull(&pts);
    }
    let hs = |key: &str| -> Result<Vec<Halfspace>> {
        match v.get(key) {
            Some(Value::Array(a)) => a.iter().map(halfspace_of).collect(),
            Some(_) => Err(bad(format!("{key:?} must be a list"))),
            None => Ok(Vec::new()),
        }
    };
    let facets = hs("facets")?;
    let eqs = hs("equalities")?;
    let dim = match v.get("dim") {
        Some(d) => d
            .as_u64()
            .ok_or_else(|| bad("dim must be a nonnegative integer"))? as usize,
        None => facets
            .iter()
            .chain(&eqs)
            .map(|h| h.normal.len())
            .next()
            .ok_or(Error::EmptyInput)?,
    };
    Polytope::from_h(dim, &facets, &eqs)
}

pub fn points_from_json(v: &Value) -> Result<Vec<RatVec>> {
    v.as_array()
        .ok_or_else(|| bad("expected a list of points"))?
        .iter()
        .map(rat_vec_of)
        .collect()
}

pub fn int_points_to_json(pts: &[IntVec]) -> Value {
    Value::Array(pts.iter().map(|p| Value::Array(ints(p))).collect())
}

// ---------------------------------------------------------------------------
// Scattering diagrams

fn wall_json(w: &Wall) -> Value {
    json!({
        "n0": ints(&w.n0),
        "direction": ints(&w.direction),
        "series": rat_strings(&w.series),
        "normal": ints(&w.normal),
        "support": w.support.iter().map(|s| ints(s)).collect::<Vec<_>>(),
        "initial": w.initial,
    })
}

pub fn diagram_to_json(d: &ScatteringDiagram) -> Value {
    let plane = d.plane.as_ref().map(|p| {
        json!({
            "uf": p.uf,
            "y": p.y.iter().map(|r| ints(r)).collect::<Vec<_>>(),
            "d": p.d,
        })
    });
    json!({
        "dim": d.dim,
        "order": d.order,
        "pstar_uf": d.pstar_uf.to_rows().iter().map(|r| ints(r)).collect::<Vec<_>>(),
        "plane": plane,
        "walls": d.walls.iter().map(wall_json).collect::<Vec<_>>(),
    })
}

fn wall_of(v: &Value) -> Result<Wall> {
    let support = match v.get("support") {
        Some(Value::Array(a)) => a.iter().map(int_vec_of).collect::<Result<Vec<_>>>()?,
        _ => Vec::new(),
    };
    Ok(Wall {
        n0: int_vec_of(field(v, "n0")?)?,
        normal: int_vec_of(field(v, "normal")?)?,
        support,
        direction: int_vec_of(field(v, "direction")?)?,
        series: rat_vec_of(field(v, "series")?)?,
        initial: v.get("initial").and_then(Value::as_bool).unwrap_or(false),
    })
}

pub fn diagram_from_json(v: &Value) -> Result<ScatteringDiagram> {
    let dim = field(v, "dim")?
        .as_u64()
        .ok_or_else(|| bad("dim must be an integer"))? as usize;
    let order = field(v, "order")?
        .as_u64()
        .ok_or_else(|| bad("order must be an integer"))? as usize;
    let rows = field(v, "pstar_uf")?
        .as_array()
        .ok_or_else(|| bad("pstar_uf must be a matrix"))?
        .iter()
        .map(int_vec_of)
        .collect::<Result<Vec<_>>>()?;
    if rows.len() != dim {
        return Err(bad("pstar_uf must have one row per coordinate"));
    }
    let pstar = IntMat::from_rows(rows)?;
    let walls = field(v, "walls")?
        .as_array()
        .ok_or_else(|| bad("walls must be a list"))?
        .iter()
        .map(wall_of)
        .collect::<Result<Vec<_>>>()?;
    let mut d = ScatteringDiagram::from_walls(dim, pstar, walls, order)?;
    if let Some(p) = v.get("plane").filter(|p| !p.is_null()) {
        let uf: Vec<usize> = serde_json::from_value(field(p, "uf")?.clone()).map_err(bad)?;
        let dd: Vec<i64> = serde_json::from_value(field(p, "d")?.clone()).map_err(bad)?;
        let y = field(p, "y")?
            .as_array()
            .ok_or_else(|| bad("plane.y must be a matrix"))?
            .iter()
            .map(int_vec_of)
            .collect::<Result<Vec<_>>>()?;
        if uf.len() != 2 || dd.len() != 2 || y.len() != 2 || y.iter().any(|r| r.len() != 2) {
            return Err(bad("plane data must be two-dimensional"));
        }
        d.plane = Some(Plane { uf, y, d: dd });
    }
    Ok(d)
}

/// Parses `"2(-1,-2)"`, `"(-1,0)"` or `"-1,0"` into a multiplier and an integer vector.
pub fn parse_label(s: &str) -> Result<(Int, IntVec)> {
    let s = s.trim();
    let (mult, body) = match s.find('(') {
        Some(i) => {
            let inner = s[i + 1..]
                .strip_suffix(')')
                .ok_or_else(|| bad(format!("unbalanced label {s:?}")))?;
            let head = s[..i].trim();
            let m: Int = if head.is_empty() {
                Int::from(1)
            } else {
                head.parse()
                    .map_err(|_| bad(format!("bad multiplier in {s:?}")))?
            };
            (m, inner)
        }
        None => (Int::from(1), s),
    };
    let v = parse_int_list(body)?;
    Ok((mult, v))
}

pub fn parse_int_list(s: &str) -> Result<IntVec> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<Int>()
                .map_err(|_| bad(format!("not an integer: {x:?}")))
        })
        .collect()
}

pub fn parse_rat_list(s: &str) -> Result<RatVec> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_rat).collect()
}

pub fn parse_word(s: &str) -> Result<Vec<usize>> {
    parse_int_list(s)?
        .iter()
        .map(|x| usize::try_from(x).map_err(|_| bad(format!("bad mutation index {x}"))))
        .collect()
}
