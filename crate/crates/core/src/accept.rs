//! The acceptance suite, runnable from the CLI (`accept run`) and from tests.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fixtures;
use crate::grassmannian::{self as gm, GrData, PlueckerIndex, Side};
use crate::io;
use crate::lattice::{self, int, ivec, rat, IntMat, IntVec, Rat, TotalOrder};
use crate::laurent::{g_valuation, theta_expand, LaurentPolynomial};
use crate::polytope::{lattice_points, lattice_points_brute, Polytope};
use crate::scattering::{self as sc, ScatteringDiagram, Wall};
use crate::seed::{build_principal, ensemble_map, zero_frozen_block, FixedData};
use crate::tropical::apply_pl_to_polytope;

pub const IDS: [u32; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u32,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub error: Option<Error>,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionReport {
    pub fn pass(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn within_budget(&self) -> bool {
        self.elapsed <= self.budget
    }

    pub fn summary_line(&self) -> String {
        let status = if self.pass() { "PASS" } else { "FAIL" };
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let mut line = format!(
            "{status} criterion {}: {} ({passed}/{} checks, {:.2}s, budget {}s)",
            self.id,
            self.title,
            self.checks.len(),
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        );
        if let Some(e) = &self.error {
            line.push_str(&format!(" error: {e}"));
        }
        line
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "title": self.title,
            "pass": self.pass(),
            "elapsed_ms": self.elapsed.as_millis() as u64,
            "budget_ms": self.budget.as_millis() as u64,
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "pass": c.pass})).collect::<Vec<_>>(),
            "error": self.error.as_ref().map(|e| json!({"code": e.code(), "message": e.to_string()})),
        })
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, pass: bool) {
        self.0.push(Check {
            name: name.into(),
            pass,
        });
    }
}

pub fn title(id: u32) -> &'static str {
    match id {
        1 => "running-example X-theta function and its principal lift",
        2 => "Gr(3,6) valuations and the bent segment",
        3 => "valuation/g-vector identity for Grassmannians",
        4 => "rank-2 scattering completion and consistency",
        5 => "valuation laws on theta products",
        6 => "NO-body images under tropical mutation",
        7 => "superpotential cone slices",
        8 => "oracle cross-checks",
        _ => "unknown",
    }
}

fn budget(id: u32) -> Duration {
    Duration::from_secs(match id {
        1 | 2 => 1,
        3 => 10,
        4 | 6 | 7 => 30,
        _ => 60,
    })
}

pub fn run(id: u32) -> Result<CriterionReport> {
    let start = Instant::now();
    let mut checks = Checks::default();
    let outcome = match id {
        1 => criterion_1(&mut checks),
        2 => criterion_2(&mut checks),
        3 => criterion_3(&mut checks),
        4 => criterion_4(&mut checks),
        5 => criterion_5(&mut checks),
        6 => criterion_6(&mut checks),
        7 => criterion_7(&mut checks),
        8 => criterion_8(&mut checks),
        _ => return Err(Error::BadParams(format!("no acceptance criterion {id}"))),
    };
    Ok(CriterionReport {
        id,
        title: title(id),
        checks: checks.0,
        error: outcome.err(),
        elapsed: start.elapsed(),
        budget: budget(id),
    })
}

pub fn run_all() -> Vec<CriterionReport> {
    IDS.iter().map(|&id| run(id).expect("known id")).collect()
}

// ---------------------------------------------------------------------------

fn prin_diagram(fd: &FixedData, order: usize) -> Result<ScatteringDiagram> {
    sc::complete_rank2(&ScatteringDiagram::initial(&build_principal(fd))?, order)
}

fn criterion_1(c: &mut Checks) -> Result<()> {
    let fx = fixtures::get("running-example")?;
    let fd = fixtures::fixed_data("running-example")?;
    let xt = &fx["x_theta"];
    let n = io::parse_int_list(&xt["n"].to_string())?;
    let expected = io::laurent_from_json(&xt["poly"], 2)?;
    let dg = prin_diagram(&fd, 8)?;
    let p = ensemble_map(&fd, &zero_frozen_block(&fd))?;
    let (x, t) = sc::theta_on_x(&dg, &p, &n, 8)?;
    c.add("X-theta equals the three-term polynomial", x == expected);
    c.add("broken-line sum is exact at the bound", t.exact);
    let label = io::parse_int_list(&xt["prin_label"].to_string())?;
    c.add(
        "principal label is (p*(n), n)",
        sc::prin_label(&p, &n) == label,
    );

    // ((A1 + t2)/A2)^2 t1^-1 t2^-2 in coordinates (A1, A2, t1, t2).
    let a1_t2 = LaurentPolynomial::from_i64(4, &[(&[1, 0, 0, 0], 1), (&[0, 0, 0, 1], 1)]);
    let lift = a1_t2.pow(2).shift(&ivec(&[0, -2, -1, -2]));
    c.add(
        "principal lift equals ((A1+t2)/A2)^2 t1^-1 t2^-2",
        t.poly == lift,
    );

    // The same lift as a product of two theta functions.
    let base = sc::default_basepoint(&dg);
    let th1 = sc::theta_function(&dg, &ivec(&[1, -1, 0, 0]), &base, 8)?;
    let th2 = sc::theta_function(&dg, &ivec(&[0, 0, -1, -2]), &base, 8)?;
    c.add(
        "lift factors as theta_(1,-1,0,0)^2 theta_(0,0,-1,-2)",
        th1.poly.pow(2).mul(&th2.poly) == lift,
    );
    Ok(())
}

fn criterion_2(c: &mut Checks) -> Result<()> {
    let fx = fixtures::get("gr36-valuations")?;
    let val = |k: &str| io::parse_int_list(&fx["valuations"][k].to_string());
    let (p124, p356, p123, p456) = (val("124")?, val("356")?, val("123")?, val("456")?);
    c.add(
        "val(p124) + val(p356) = val(p123) + val(p456)",
        lattice::add(&p124, &p356) == lattice::add(&p123, &p456),
    );
    let wall = &fx["wall"];
    let normal = io::parse_int_list(&wall["normal"].to_string())?;
    let direction = io::parse_int_list(&wall["direction"].to_string())?;
    let half: Vec<Rat> = io::parse_rats(
        &serde_json::from_value::<Vec<String>>(fx["half_val_f"].clone())
            .map_err(|e| Error::Invalid(e.to_string()))?,
    )?;
    // f = p124·p356 has the extra term carrying the wall direction.
    let val_f = lattice::add(&lattice::add(&p124, &p356), &direction);
    let half_computed: Vec<Rat> = val_f.iter().map(|x| Rat::new(x.clone(), int(2))).collect();
    c.add(
        "half of val(f) matches the stored vector",
        half_computed == half,
    );
    c.add(
        "half of val(f) lies on the wall",
        lattice::dot_ri(&half, &normal).is_zero(),
    );

    let seg = &fx["segment"];
    let v1 = io::parse_int_list(&seg["v1"].to_string())?;
    let v2 = io::parse_int_list(&seg["v2"].to_string())?;
    let bend = seg["bend"].as_i64().unwrap_or(0);
    let time = lattice::parse_rat(seg["time"].as_str().unwrap_or(""))?;
    c.add(
        "v2 - v1 is the stated multiple of the wall direction",
        lattice::sub(&v2, &v1) == lattice::scale(&direction, &int(bend)),
    );

    let d = gr36_model(&fx)?;
    let lines = sc::enumerate_broken_lines(&d, &v1, &lattice::to_rat(&p124), 4)?;
    let coefs: BTreeMap<IntVec, Rat> = lines
        .iter()
        .map(|l| (l.final_exponent().clone(), l.final_coef().clone()))
        .collect();
    let expect: BTreeMap<IntVec, Rat> = (0..=2)
        .map(|j| {
            (
                lattice::add(&v1, &lattice::scale(&direction, &int(j))),
                rat([1, 2, 1][j as usize], 1),
            )
        })
        .collect();
    c.add(
        "broken lines for v1 ending at val(p124) have coefficients 1, 2, 1",
        coefs == expect,
    );
    let line = lines
        .iter()
        .find(|l| *l.final_exponent() == v2 && l.segments.len() == 2);
    match line {
        Some(l) => {
            c.add(
                "the bend happens at half of val(f)",
                l.bends.len() == 1 && l.bends[0].point == half,
            );
            c.add(
                "the bend is by the stated multiple",
                l.bends.len() == 1 && l.bends[0].power == bend as usize,
            );
            // The line runs from val(p356) at time -1 to val(p124) at time 0.
            let legs_equal = l.bends.len() == 1
                && l.bends[0].time == -time.clone()
                && l.segments[1].duration.as_ref() == Some(&time);
            c.add("both legs take the same time", legs_equal);
            c.add(
                "the line starts at val(p356)",
                l.position(&rat(-1, 1)) == lattice::to_rat(&p356),
            );
        }
        None => c.add("a two-leg line with final exponent v2 exists", false),
    }

    // The four valuations span a pair of products related by the single bend.
    let alphas: Vec<(i64, Rat)> = (0..=3)
        .map(|j| {
            let r = lattice::add(
                &lattice::add(&p124, &p356),
                &lattice::scale(&direction, &int(j)),
            );
            sc::structure_constant(&d, &p124, &p356, &r, 4).map(|a| (j, a))
        })
        .collect::<Result<_>>()?;
    let nonzero: Vec<i64> = alphas
        .iter()
        .filter(|(_, a)| !a.is_zero())
        .map(|(j, _)| *j)
        .collect();
    c.add(
        "theta_val(p124) theta_val(p356) has exactly two terms",
        nonzero == vec![0, 1],
    );
    Ok(())
}

/// Single-wall model around val(p124 p356) in the Gr(3,6) fixture.
pub fn gr36_model(fx: &Value) -> Result<ScatteringDiagram> {
    let wall = &fx["wall"];
    let get = |k: &str| io::parse_int_list(&wall[k].to_string());
    let direction = get("direction")?;
    let dim = direction.len();
    let w = Wall {
        n0: get("n0")?,
        normal: get("normal")?,
        support: Vec::new(),
        direction: direction.clone(),
        series: io::parse_rats(
            &serde_json::from_value::<Vec<String>>(wall["series"].clone())
                .map_err(|e| Error::Invalid(e.to_string()))?,
        )?,
        initial: true,
    };
    ScatteringDiagram::from_walls(dim, IntMat::from_cols(dim, &[direction])?, vec![w], 4)
}

/// `(k, n)` pairs for the Grassmannians named in the suite; `Gr(a, n)` has `k = n - a` columns.
pub const GRASSMANNIANS: [(usize, usize); 4] = [(2, 4), (3, 5), (3, 6), (5, 9)];

fn criterion_3(c: &mut Checks) -> Result<()> {
    let expected_counts = [6, 10, 20, 126];
    for (&(k, n), &count) in GRASSMANNIANS.iter().zip(&expected_counts) {
        let gr = GrData::new(k, n)?;
        let rep = gm::verify_val_gv(&gr);
        c.add(
            format!("k={k} n={n}: {}/{} indices", rep.passed(), count),
            rep.entries.len() == count && rep.all_pass(),
        );
    }
    // The transposed readings of the non-self-dual cases.
    for (k, n) in [(2, 5), (4, 9)] {
        let gr = GrData::new(k, n)?;
        let rep = gm::verify_val_gv(&gr);
        c.add(
            format!(
                "k={k} n={n}: {}/{} indices",
                rep.passed(),
                rep.entries.len()
            ),
            rep.all_pass(),
        );
    }
    let fx = fixtures::get("gt-tableau-n13")?;
    let k = fx["k"].as_u64().unwrap_or(0) as usize;
    let n = fx["n"].as_u64().unwrap_or(0) as usize;
    let gr = GrData::new(k, n)?;
    let j: Vec<usize> =
        serde_json::from_value(fx["J"].clone()).map_err(|e| Error::Invalid(e.to_string()))?;
    let col: Vec<i64> = serde_json::from_value(fx["rightmost_column"].clone())
        .map_err(|e| Error::Invalid(e.to_string()))?;
    let j = PlueckerIndex::new(&gr, j)?;
    let t = gm::gt_valuation(&j, &gr);
    c.add("n=13 tableau: rightmost column", t.column(k) == col);
    c.add(
        "n=13 tableau: identity holds",
        gm::check_val_gv(&gr, &[j]).all_pass(),
    );
    Ok(())
}

fn criterion_4(c: &mut Checks) -> Result<()> {
    let a2 = fixtures::fixed_data("a2")?;
    let init = ScatteringDiagram::initial(&a2)?;
    c.add(
        "A2 initial diagram alone is inconsistent",
        !sc::is_consistent(&init, 4)?,
    );
    let dg = sc::complete_rank2(&init, 10)?;
    let added: Vec<&Wall> = dg.added_walls().collect();
    let one_ray = added.len() == 1 && {
        let w = added[0];
        let mut s = w.series.clone();
        while s.len() > 2 && s.last().is_some_and(Zero::is_zero) {
            s.pop();
        }
        w.n0 == ivec(&[1, 1])
            && w.direction == dg.pstar(&ivec(&[1, 1]))
            && s == vec![Rat::one(), Rat::one()]
    };
    c.add(
        "A2 completion adds exactly the ray 1 + z^{p*(e1+e2)}",
        one_ray,
    );
    c.add(
        "A2 loop product is the identity to order 10",
        sc::loop_product(&dg, 10)?.is_identity(),
    );

    let re = fixtures::fixed_data("running-example")?;
    let dg = sc::complete_rank2(&ScatteringDiagram::initial(&re)?, 12)?;
    c.add(
        "running example is consistent at order 12",
        sc::is_consistent(&dg, 12)?,
    );

    let kr = fixtures::fixed_data("kronecker")?;
    let kinit = ScatteringDiagram::initial(&kr)?;
    for order in 1..=8 {
        let dg = sc::complete_rank2(&kinit, order)?;
        c.add(
            format!("Kronecker consistent at order {order}"),
            sc::is_consistent(&dg, order)?,
        );
    }

    // Random rank-2 data: every completion must pass the loop test.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut ok = true;
    for _ in 0..12 {
        let b: i64 = rng.gen_range(1..=3);
        let cc: i64 = rng.gen_range(1..=3);
        let fd = symmetrizable(b, cc)?;
        let order = 6;
        let dg = sc::complete_rank2(&ScatteringDiagram::initial(&fd)?, order)?;
        ok &= sc::is_consistent(&dg, order)?;
    }
    c.add("12 random rank-2 completions are consistent at order 6", ok);
    Ok(())
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Rank-2 fixed data with exchange matrix `[[0, b], [-c, 0]]`.
pub fn symmetrizable(b: i64, c: i64) -> Result<FixedData> {
    // eps_ij = lambda_ij d_j: take d = (b, c)/g, lambda_01 = g.
    let g = gcd(b, c);
    let d = [c / g, b / g];
    let lam = lattice::RatMat::from_rows(vec![
        vec![Rat::zero(), rat(b, d[1])],
        vec![rat(-c, d[0]), Rat::zero()],
    ])?;
    FixedData::new(2, vec![0, 1], lam, d.to_vec())
}

fn criterion_5(c: &mut Checks) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, skew) in [("a2", true), ("running-example", false)] {
        let fd = fixtures::fixed_data(name)?;
        let dg = sc::complete_rank2(&ScatteringDiagram::initial(&fd)?, 12)?;
        let labels: Vec<IntVec> = (-2..=2)
            .flat_map(|a| (-2..=2).map(move |b| ivec(&[a, b])))
            .collect();
        let mut table = ThetaCache::new(&dg, 12);
        let order = TotalOrder::refining(&dg.pstar_uf)?;
        let (mut additive, mut leading, mut positive, mut dual) = (true, true, true, true);
        for i in 0..100 {
            let p = labels[rng.gen_range(0..labels.len())].clone();
            let q = labels[rng.gen_range(0..labels.len())].clone();
            let f = table.get(&p)?;
            let g = table.get(&q)?;
            let prod = f.mul(&g);
            let dec = theta_expand(&prod, &order, |m| table.get(m).map(Some), 200)?;
            let vf = g_valuation(
                &theta_expand(&f, &order, |m| table.get(m).map(Some), 200)?,
                &order,
            )?;
            let vg = g_valuation(
                &theta_expand(&g, &order, |m| table.get(m).map(Some), 200)?,
                &order,
            )?;
            let sum = lattice::add(&p, &q);
            additive &= g_valuation(&dec, &order)? == lattice::add(&vf, &vg) && vf == p && vg == q;
            leading &= dec.coeff(&sum).is_one();
            if skew {
                positive &= dec
                    .terms
                    .iter()
                    .all(|(a, _)| a.is_integer() && !a.is_negative());
            }
            if i < 15 {
                for (a, r) in &dec.terms {
                    dual &= sc::structure_constant(&dg, &p, &q, r, 12)? == *a;
                }
            }
        }
        c.add(
            format!("{name}: g-valuation is additive on 100 products"),
            additive,
        );
        c.add(
            format!("{name}: leading coefficient 1 at the label sum"),
            leading,
        );
        if skew {
            c.add(
                format!("{name}: structure constants are nonnegative integers"),
                positive,
            );
        }
        c.add(
            format!("{name}: broken-line structure constants match the expansions"),
            dual,
        );
    }
    Ok(())
}

/// Theta functions computed on demand and cached.
pub struct ThetaCache<'a> {
    d: &'a ScatteringDiagram,
    bound: usize,
    base: Vec<Rat>,
    entries: BTreeMap<IntVec, LaurentPolynomial>,
}

impl<'a> ThetaCache<'a> {
    pub fn new(d: &'a ScatteringDiagram, bound: usize) -> Self {
        ThetaCache {
            d,
            bound,
            base: sc::default_basepoint(d),
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&mut self, m: &IntVec) -> Result<LaurentPolynomial> {
        if let Some(t) = self.entries.get(m) {
            return Ok(t.clone());
        }
        let t = sc::theta_function(self.d, m, &self.base, self.bound)?;
        if !t.exact {
            return Err(Error::Truncated(self.bound));
        }
        self.entries.insert(m.clone(), t.poly.clone());
        Ok(t.poly)
    }
}

/// Grassmannians of criteria 6–8 with their slice expectations.
const SMALL: [(usize, usize); 3] = [(2, 4), (3, 5), (3, 6)];

fn criterion_6(c: &mut Checks) -> Result<()> {
    for (k, n) in SMALL {
        let gr = GrData::new(k, n)?;
        let body = gm::no_body(&gr, Side::GVec)?;
        for v in gr.unfrozen() {
            let map = gm::g_mutation_map(&gr, v)?;
            let (img, rep) = apply_pl_to_polytope(&map, &body)?;
            let (back, _) = apply_pl_to_polytope(&map.inverse()?, &img)?;
            c.add(
                format!(
                    "k={k} n={n} vertex {}: convex image, inverse restores",
                    gr.vertex_name(v)
                ),
                rep.convex && back.same_set(&body),
            );
        }
    }
    Ok(())
}

pub const SLICE_BOUND: usize = 8;

fn criterion_7(c: &mut Checks) -> Result<()> {
    for ((k, n), (d1, d2)) in [(2, 4), (3, 5)].into_iter().zip([(6, 20), (10, 50)]) {
        let gr = GrData::new(k, n)?;
        let s1 = gm::superpotential_slice(&gr, 1, SLICE_BOUND)?;
        let hooks = gm::hook_polytope(&gr)?;
        c.add(
            format!("k={k} n={n}: degree-1 slice equals the hook hull"),
            s1.same_set(&hooks),
        );
        let mut pts = lattice_points(&s1);
        let mut gs: Vec<IntVec> = gr
            .all_indices()
            .iter()
            .map(|j| gm::hook_g_vector(j, &gr))
            .collect();
        pts.sort();
        gs.sort();
        c.add(
            format!("k={k} n={n}: {d1} lattice points, one per Pluecker index"),
            pts.len() == d1 && pts == gs,
        );
        let s2 = gm::superpotential_slice(&gr, 2, SLICE_BOUND)?;
        let count = lattice_points(&s2).len();
        c.add(
            format!("k={k} n={n}: degree-2 slice has {count} points, expected {d2}"),
            count == d2 && int(count as i64) == gm::plucker_degree_dimension(&gr, 2),
        );
    }
    Ok(())
}

fn criterion_8(c: &mut Checks) -> Result<()> {
    for ((k, n), depth) in [(2, 4), (3, 5)].into_iter().zip([2, 5]) {
        let gr = GrData::new(k, n)?;
        let m = gm::match_bfs_with_hooks(&gr, depth)?;
        c.add(
            format!(
                "k={k} n={n} depth {depth}: {} g-vectors, all hooks",
                m.distinct
            ),
            m.unmatched.is_empty() && !m.matched.is_empty() && m.matched.len() == m.distinct,
        );
    }
    let mut bodies: Vec<(String, Polytope)> = Vec::new();
    for (k, n) in SMALL {
        let gr = GrData::new(k, n)?;
        bodies.push((
            format!("k={k} n={n} flow body"),
            gm::no_body(&gr, Side::Flow)?,
        ));
        let g = gm::no_body(&gr, Side::GVec)?;
        for v in gr.unfrozen() {
            let (img, _) = apply_pl_to_polytope(&gm::g_mutation_map(&gr, v)?, &g)?;
            bodies.push((
                format!("k={k} n={n} g body mutated at {}", gr.vertex_name(v)),
                img,
            ));
        }
        bodies.push((format!("k={k} n={n} g body"), g));
    }
    for (k, n) in [(2, 4), (3, 5)] {
        let gr = GrData::new(k, n)?;
        for deg in [1, 2] {
            bodies.push((
                format!("k={k} n={n} slice {deg}"),
                gm::superpotential_slice(&gr, deg, SLICE_BOUND)?,
            ));
        }
    }
    for (name, p) in &bodies {
        let mut a = lattice_points(p);
        let mut b = lattice_points_brute(p);
        a.sort();
        b.sort();
        c.add(
            format!(
                "{name}: {} lattice points agree with box enumeration",
                a.len()
            ),
            a == b,
        );
    }
    Ok(())
}
