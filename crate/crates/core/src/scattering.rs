//! Cluster scattering diagrams with at most two mutable directions: wall crossing on
//! truncated series, order-by-order completion, broken lines, theta functions and
//! structure constants.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use num::{Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{self, dot, dot_ri, rat, rat_of, Dominance, Int, IntMat, IntVec, Rat, RatVec};
use crate::laurent::LaurentPolynomial;
use crate::seed::{EnsembleMap, FixedData};

/// Truncated univariate series helpers (coefficient 0 is the constant term).
pub mod series {
    use super::*;

    pub fn mul(a: &[Rat], b: &[Rat], deg: usize) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); deg + 1];
        for (i, x) in a.iter().enumerate().take(deg + 1) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(deg + 1 - i) {
                out[i + j] += x * y;
            }
        }
        out
    }

    /// Inverse of a series with constant term 1.
    pub fn inverse(f: &[Rat], deg: usize) -> Vec<Rat> {
        let mut g = vec![Rat::zero(); deg + 1];
        g[0] = Rat::one();
        for j in 1..=deg {
            let mut s = Rat::zero();
            for i in 1..=j.min(f.len() - 1) {
                s += &f[i] * &g[j - i];
            }
            g[j] = -s;
        }
        g
    }

    /// `f^e` for any integer `e`, truncated at `deg`.
    pub fn pow(f: &[Rat], e: i64, deg: usize) -> Vec<Rat> {
        let base = if e < 0 {
            inverse(f, deg)
        } else {
            f.iter().take(deg + 1).cloned().collect()
        };
        let mut out = vec![Rat::zero(); deg + 1];
        out[0] = Rat::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                out = mul(&out, &b, deg);
            }
            k >>= 1;
            if k > 0 {
                b = mul(&b, &b, deg);
            }
        }
        out
    }
}

/// A wall: the part of the hyperplane `normal^⊥` cut out by `support`
/// (`<a, x> >= 0` for each `a`), with function `sum_j series[j] z^{j·direction}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    /// Grading vector in `N_uf` coordinates, primitive with nonnegative entries.
    pub n0: IntVec,
    /// Primitive normal, as a functional on exponent/position space.
    pub normal: IntVec,
    pub support: Vec<IntVec>,
    /// `p*(n0)`.
    pub direction: IntVec,
    /// `series[0] = 1`.
    pub series: Vec<Rat>,
    pub initial: bool,
}

impl Wall {
    pub fn contains(&self, x: &[Rat]) -> bool {
        dot_ri(x, &self.normal).is_zero()
            && self.support.iter().all(|a| !dot_ri(x, a).is_negative())
    }

    fn degree(&self) -> usize {
        self.n0
            .iter()
            .map(|x| x.to_usize().unwrap_or(0))
            .sum::<usize>()
            .max(1)
    }
}

/// Data of the plane spanned by the two mutable coordinates, needed for completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plane {
    /// Position indices of the mutable coordinates.
    pub uf: Vec<usize>,
    /// `y[i][j]` = `j`-th plane coordinate of `p*(e_{uf_i})`.
    pub y: Vec<Vec<Int>>,
    pub d: Vec<i64>,
}

impl Plane {
    fn normal_b(&self, n0: &[Int]) -> IntVec {
        let v: RatVec = n0
            .iter()
            .zip(&self.d)
            .map(|(a, &d)| rat_of(a) / rat(d, 1))
            .collect();
        lattice::primitive_of_rat(&v)
    }

    fn y_of(&self, n: &[Int]) -> IntVec {
        let r = self.uf.len();
        (0..r)
            .map(|j| (0..r).fold(Int::zero(), |s, i| s + &n[i] * &self.y[i][j]))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScatteringDiagram {
    pub dim: usize,
    /// Columns `p*(e_k)` for the grading basis (mutable directions).
    pub pstar_uf: IntMat,
    pub walls: Vec<Wall>,
    /// Truncation degree in the `N_uf^+` grading.
    pub order: usize,
    pub plane: Option<Plane>,
}

impl ScatteringDiagram {
    /// Initial diagram `{(e_k^⊥, 1 + z^{p*(e_k)}) : k unfrozen}` on `M°_R` with `f`-coordinates.
    pub fn initial(fd: &FixedData) -> Result<Self> {
        let eps = fd.eps();
        let n = fd.n();
        let uf = fd.unfrozen();
        let r = uf.len();
        let cols: Vec<IntVec> = uf
            .iter()
            .map(|&k| {
                lattice::to_int(&eps.row(k))
                    .ok_or_else(|| Error::Invalid("non-integral exchange row".into()))
            })
            .collect::<Result<_>>()?;
        let pstar_uf = IntMat::from_cols(n, &cols)?;
        let walls = uf
            .iter()
            .enumerate()
            .map(|(i, &k)| Wall {
                n0: lattice::unit(r, i),
                normal: lattice::unit(n, k),
                support: Vec::new(),
                direction: cols[i].clone(),
                series: vec![Rat::one(), Rat::one()],
                initial: true,
            })
            .collect();
        let plane = (r == 2).then(|| Plane {
            uf: uf.to_vec(),
            y: (0..2)
                .map(|i| (0..2).map(|j| cols[i][uf[j]].clone()).collect())
                .collect(),
            d: uf.iter().map(|&k| fd.d()[k]).collect(),
        });
        Ok(ScatteringDiagram {
            dim: n,
            pstar_uf,
            walls,
            order: 1,
            plane,
        })
    }

    pub fn from_walls(
        dim: usize,
        pstar_uf: IntMat,
        walls: Vec<Wall>,
        order: usize,
    ) -> Result<Self> {
        for w in &walls {
            if w.normal.len() != dim || w.direction.len() != dim || w.n0.len() != pstar_uf.cols() {
                return Err(Error::Invalid(
                    "wall dimensions do not match the diagram".into(),
                ));
            }
            if w.series.first() != Some(&Rat::one()) {
                return Err(Error::Invalid(
                    "wall series must have constant term 1".into(),
                ));
            }
            if w.n0.iter().any(|x| x.is_negative()) || lattice::is_zero(&w.n0) {
                return Err(Error::Invalid(
                    "wall grading must be nonzero and nonnegative".into(),
                ));
            }
        }
        Ok(ScatteringDiagram {
            dim,
            pstar_uf,
            walls,
            order,
            plane: None,
        })
    }

    pub fn rank(&self) -> usize {
        self.pstar_uf.cols()
    }

    pub fn wall_count(&self) -> usize {
        self.walls.len()
    }

    /// Walls that were not in the initial diagram.
    pub fn added_walls(&self) -> impl Iterator<Item = &Wall> {
        self.walls.iter().filter(|w| !w.initial)
    }

    pub fn pstar(&self, n: &[Int]) -> IntVec {
        self.pstar_uf.mul_vec(n)
    }
}

/// `c z^m · f^{sign·<normal, m>}`, truncated at `order` in the grading.
pub fn wall_cross(
    coef: &Rat,
    m: &[Int],
    wall: &Wall,
    sign: i64,
    order: usize,
) -> LaurentPolynomial {
    let e = dot(&wall.normal, m).to_i64().expect("small pairing") * sign;
    let jmax = order / wall.degree();
    let f = series::pow(&wall.series, e, jmax);
    let mut out = LaurentPolynomial::zero(m.len());
    for (j, c) in f.iter().enumerate() {
        let exp: IntVec = m
            .iter()
            .zip(&wall.direction)
            .map(|(x, d)| x + d * Int::from(j))
            .collect();
        out.add_term(exp, coef * c);
    }
    out
}

// ---------------------------------------------------------------------------
// Rank-2 automorphisms as pairs of bivariate truncated series.

/// Bivariate series in `u^n`, `n ∈ N^2`, truncated at total degree `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiSeries {
    k: usize,
    c: Vec<Rat>,
}

impl BiSeries {
    fn idx(a: usize, b: usize) -> usize {
        let t = a + b;
        t * (t + 1) / 2 + b
    }

    pub fn one(k: usize) -> Self {
        let mut c = vec![Rat::zero(); Self::idx(0, k) + 1];
        c[0] = Rat::one();
        BiSeries { k, c }
    }

    pub fn get(&self, a: usize, b: usize) -> &Rat {
        &self.c[Self::idx(a, b)]
    }

    fn add_at(&mut self, a: usize, b: usize, v: &Rat) {
        self.c[Self::idx(a, b)] += v;
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(|x| x.is_zero())
    }

    /// Nonzero terms other than the constant, as `((a, b), coef)`.
    pub fn nonconstant_terms(&self) -> Vec<((usize, usize), Rat)> {
        let mut out = Vec::new();
        for t in 1..=self.k {
            for b in 0..=t {
                let v = self.get(t - b, b);
                if !v.is_zero() {
                    out.push(((t - b, b), v.clone()));
                }
            }
        }
        out
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = BiSeries {
            k: self.k,
            c: vec![Rat::zero(); self.c.len()],
        };
        for t1 in 0..=self.k {
            for b1 in 0..=t1 {
                let x = self.get(t1 - b1, b1);
                if x.is_zero() {
                    continue;
                }
                for t2 in 0..=self.k - t1 {
                    for b2 in 0..=t2 {
                        let y = other.get(t2 - b2, b2);
                        if !y.is_zero() {
                            out.add_at(t1 - b1 + t2 - b2, b1 + b2, &(x * y));
                        }
                    }
                }
            }
        }
        out
    }

    /// Embed a univariate series in `w = u^{n0}`.
    fn from_univariate(f: &[Rat], n0: (usize, usize), k: usize) -> Self {
        let mut out = BiSeries {
            k,
            c: vec![Rat::zero(); Self::idx(0, k) + 1],
        };
        for (j, c) in f.iter().enumerate() {
            let (a, b) = (j * n0.0, j * n0.1);
            if a + b > k {
                break;
            }
            out.add_at(a, b, c);
        }
        out
    }
}

/// The pair `(H_1, H_2)` describing an automorphism `z^m -> z^m H_1^{y_1(m)} H_2^{y_2(m)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    pub h: [BiSeries; 2],
}

impl Automorphism {
    pub fn identity(k: usize) -> Self {
        Automorphism {
            h: [BiSeries::one(k), BiSeries::one(k)],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.h.iter().all(|x| x.is_one())
    }
}

fn n0_pair(w: &Wall) -> (usize, usize) {
    (w.n0[0].to_usize().unwrap(), w.n0[1].to_usize().unwrap())
}

/// Compose the wall-crossing automorphism of `w` (with sign) after `state`.
fn apply_wall(state: &mut Automorphism, plane: &Plane, w: &Wall, b: &[Int], sign: i64, k: usize) {
    let n0 = n0_pair(w);
    let jmax = k / (n0.0 + n0.1);
    let y0 = plane.y_of(&lattice::ivec(&[1, 0]));
    let y1 = plane.y_of(&lattice::ivec(&[0, 1]));
    let bp0 = dot(b, &y0).to_i64().unwrap();
    let bp1 = dot(b, &y1).to_i64().unwrap();
    let mut cache: HashMap<i64, Vec<Rat>> = HashMap::new();
    let mut pow = |e: i64| {
        cache
            .entry(e)
            .or_insert_with(|| series::pow(&w.series, e, jmax))
            .clone()
    };
    for (i, h) in state.h.iter_mut().enumerate() {
        let mut sub = BiSeries {
            k,
            c: vec![Rat::zero(); h.c.len()],
        };
        for t in 0..=k {
            for bb in 0..=t {
                let a = t - bb;
                let c = h.get(a, bb).clone();
                if c.is_zero() {
                    continue;
                }
                let e = sign * (a as i64 * bp0 + bb as i64 * bp1);
                let f = pow(e);
                for (j, fj) in f.iter().enumerate() {
                    let (na, nb) = (a + j * n0.0, bb + j * n0.1);
                    if na + nb > k {
                        break;
                    }
                    if !fj.is_zero() {
                        sub.add_at(na, nb, &(&c * fj));
                    }
                }
            }
        }
        let pre = BiSeries::from_univariate(&pow(sign * b[i].to_i64().unwrap()), n0, k);
        *h = pre.mul(&sub);
    }
}

/// Exact angular order of nonzero plane vectors starting at the positive first axis.
fn angle_cmp(a: &[Int], b: &[Int]) -> Ordering {
    let half = |v: &[Int]| -> u8 {
        if v[1].is_positive() || (v[1].is_zero() && v[0].is_positive()) {
            0
        } else {
            1
        }
    };
    half(a).cmp(&half(b)).then_with(|| {
        let cross = &a[0] * &b[1] - &a[1] * &b[0];
        if cross.is_positive() {
            Ordering::Less
        } else if cross.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

struct Crossing {
    wall: usize,
    point: IntVec,
}

fn plane_of(d: &ScatteringDiagram) -> Result<&Plane> {
    d.plane.as_ref().ok_or(Error::RankUnsupported(d.rank()))
}

fn wall_plane_data(plane: &Plane, w: &Wall) -> (IntVec, Option<IntVec>) {
    let b = plane.normal_b(&w.n0);
    let ray = (!w.support.is_empty()).then(|| {
        let y = plane.y_of(&w.n0);
        lattice::primitive(&lattice::neg(&y))
    });
    (b, ray)
}

/// Counterclockwise loop around the origin of the mutable plane.
pub fn loop_product(d: &ScatteringDiagram, k: usize) -> Result<Automorphism> {
    let plane = plane_of(d)?;
    let mut crossings = Vec::new();
    for (i, w) in d.walls.iter().enumerate() {
        let (b, ray) = wall_plane_data(plane, w);
        match ray {
            Some(r) => crossings.push(Crossing { wall: i, point: r }),
            None => {
                let l = vec![-b[1].clone(), b[0].clone()];
                crossings.push(Crossing {
                    wall: i,
                    point: lattice::neg(&l),
                });
                crossings.push(Crossing { wall: i, point: l });
            }
        }
    }
    crossings.sort_by(|a, b| angle_cmp(&a.point, &b.point).then(a.wall.cmp(&b.wall)));
    let mut state = Automorphism::identity(k);
    for c in &crossings {
        let w = &d.walls[c.wall];
        let (b, _) = wall_plane_data(plane, w);
        // velocity of a counterclockwise loop at y is J y = (−y_2, y_1)
        let jr = [-c.point[1].clone(), c.point[0].clone()];
        let sign = if dot(&b, &jr).is_negative() { 1 } else { -1 };
        apply_wall(&mut state, plane, w, &b, sign, k);
    }
    Ok(state)
}

/// Path-ordered product along a polygonal path in the mutable plane.
pub fn path_ordered_product(
    d: &ScatteringDiagram,
    path: &[RatVec],
    k: usize,
) -> Result<Automorphism> {
    let plane = plane_of(d)?;
    let mut state = Automorphism::identity(k);
    for seg in path.windows(2) {
        let (p, q) = (&seg[0], &seg[1]);
        let mut hits: Vec<(Rat, usize, i64)> = Vec::new();
        for (i, w) in d.walls.iter().enumerate() {
            let (b, ray) = wall_plane_data(plane, w);
            let bp = dot_ri(p, &b);
            let bq = dot_ri(q, &b);
            if bp.is_zero() || bq.is_zero() {
                let on_wall = |x: &RatVec| match &ray {
                    None => true,
                    Some(r) => !dot_ri(x, r).is_negative(),
                };
                if (bp.is_zero() && on_wall(p)) || (bq.is_zero() && on_wall(q)) {
                    return Err(Error::SingularPath);
                }
                continue;
            }
            if bp.is_positive() == bq.is_positive() {
                continue;
            }
            let t = &bp / (&bp - &bq);
            let x: RatVec = p.iter().zip(q).map(|(a, c)| a + (c - a) * &t).collect();
            if lattice::is_zero(&x) {
                return Err(Error::SingularPath);
            }
            if let Some(r) = &ray {
                let s = dot_ri(&x, r);
                if s.is_zero() {
                    return Err(Error::SingularPath);
                }
                if s.is_negative() {
                    continue;
                }
            }
            let sign = if bq < bp { 1 } else { -1 };
            hits.push((t, i, sign));
        }
        hits.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, i, sign) in hits {
            let w = &d.walls[i];
            let (b, _) = wall_plane_data(plane, w);
            apply_wall(&mut state, plane, w, &b, sign, k);
        }
    }
    Ok(state)
}

pub fn is_consistent(d: &ScatteringDiagram, k: usize) -> Result<bool> {
    Ok(loop_product(d, k)?.is_identity())
}

/// Order-by-order completion of a diagram with two mutable directions.
pub fn complete_rank2(initial: &ScatteringDiagram, order: usize) -> Result<ScatteringDiagram> {
    let r = initial.rank();
    if r > 2 {
        return Err(Error::RankUnsupported(r));
    }
    let mut d = initial.clone();
    d.order = order;
    if r < 2 {
        return Ok(d);
    }
    let plane = plane_of(&d)?.clone();
    for k in 1..=order {
        let state = loop_product(&d, k)?;
        for h in &state.h {
            if h.nonconstant_terms().iter().any(|((a, b), _)| a + b < k) {
                return Err(Error::Inconsistent(format!("defect below degree {k}")));
            }
        }
        for b_ in 0..=k {
            let n = (k - b_, b_);
            let g = [
                state.h[0].get(n.0, n.1).clone(),
                state.h[1].get(n.0, n.1).clone(),
            ];
            if g.iter().all(|x| x.is_zero()) {
                continue;
            }
            let j = n.0.gcd(&n.1);
            let n0 = lattice::ivec(&[(n.0 / j) as i64, (n.1 / j) as i64]);
            let bnorm = plane.normal_b(&n0);
            if &g[0] * rat_of(&bnorm[1]) != &g[1] * rat_of(&bnorm[0]) {
                return Err(Error::Inconsistent(format!(
                    "defect at {n:?} is not normal to its ray"
                )));
            }
            let y = plane.y_of(&n0);
            let ray = lattice::primitive(&lattice::neg(&y));
            let jr = [-ray[1].clone(), ray[0].clone()];
            let sign = if dot(&bnorm, &jr).is_negative() {
                1
            } else {
                -1
            };
            let i = if bnorm[0].is_zero() { 1 } else { 0 };
            let c = -&g[i] / (rat(sign, 1) * rat_of(&bnorm[i]));
            let pos = d.walls.iter().position(|w| !w.initial && w.n0 == n0);
            let idx = match pos {
                Some(p) => p,
                None => {
                    let mut normal = vec![Int::zero(); d.dim];
                    let mut support = vec![Int::zero(); d.dim];
                    for (t, &u) in plane.uf.iter().enumerate() {
                        normal[u] = bnorm[t].clone();
                        support[u] = ray[t].clone();
                    }
                    d.walls.push(Wall {
                        direction: d.pstar(&n0),
                        n0: n0.clone(),
                        normal,
                        support: vec![support],
                        series: vec![Rat::one()],
                        initial: false,
                    });
                    d.walls.len() - 1
                }
            };
            let w = &mut d.walls[idx];
            let mut term = vec![Rat::zero(); j + 1];
            term[0] = Rat::one();
            term[j] = c;
            let deg = order / (n0[0].to_usize().unwrap() + n0[1].to_usize().unwrap());
            let mut s = series::mul(&w.series, &term, deg);
            while s.len() > 1 && s.last().is_some_and(|x| x.is_zero()) {
                s.pop();
            }
            w.series = s;
        }
    }
    // canonical order: initial walls, then rays by angle
    let (mut init, mut rays): (Vec<Wall>, Vec<Wall>) = d.walls.drain(..).partition(|w| w.initial);
    init.sort_by(|a, b| b.n0.cmp(&a.n0));
    rays.sort_by(|a, b| {
        angle_cmp(
            &wall_plane_data(&plane, a).1.unwrap(),
            &wall_plane_data(&plane, b).1.unwrap(),
        )
    });
    d.walls = init.into_iter().chain(rays).collect();
    Ok(d)
}

// ---------------------------------------------------------------------------
// Broken lines.

/// One bend, recorded going forward in time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bend {
    pub wall: usize,
    /// Power `j` of the bending monomial `z^{j·direction}`.
    pub power: usize,
    pub point: RatVec,
    /// Time of the bend (the endpoint is reached at time 0).
    pub time: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub exponent: IntVec,
    pub coef: Rat,
    /// Wall at which this segment ends by bending, if any.
    pub bend_wall: Option<usize>,
    /// Parameter length; `None` for the unbounded first segment.
    pub duration: Option<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrokenLine {
    pub initial: IntVec,
    pub endpoint: RatVec,
    pub segments: Vec<Segment>,
    pub bends: Vec<Bend>,
    /// Total bending degree in `N_uf`.
    pub degree: IntVec,
}

impl BrokenLine {
    pub fn final_exponent(&self) -> &IntVec {
        &self.segments.last().unwrap().exponent
    }

    pub fn final_coef(&self) -> &Rat {
        &self.segments.last().unwrap().coef
    }

    /// Position at time `t <= 0`.
    pub fn position(&self, t: &Rat) -> RatVec {
        // walk backwards from the endpoint through the bends
        let mut p = self.endpoint.clone();
        let mut cur_t = Rat::zero();
        for (seg, bend) in self
            .segments
            .iter()
            .rev()
            .zip(self.bends.iter().rev().map(Some).chain([None]))
        {
            let stop = bend.map(|b| b.time.clone());
            let target = match &stop {
                Some(s) if s > t => s.clone(),
                _ => t.clone(),
            };
            let dt = &cur_t - &target;
            p = lattice::add(&p, &lattice::scale(&lattice::to_rat(&seg.exponent), &dt));
            cur_t = target;
            if &cur_t == t {
                break;
            }
        }
        p
    }
}

struct Tracer<'a> {
    d: &'a ScatteringDiagram,
    cache: RefCell<HashMap<(usize, i64), Vec<Rat>>>,
    jcap: usize,
}

struct Frame {
    bends: Vec<(usize, usize, RatVec, Rat, Rat)>, // wall, j, point, backward time, coefficient factor
}

impl<'a> Tracer<'a> {
    fn coef(&self, wall: usize, a: i64, j: usize) -> Rat {
        let w = &self.d.walls[wall];
        let mut cache = self.cache.borrow_mut();
        let f = cache
            .entry((wall, a))
            .or_insert_with(|| series::pow(&w.series, a, self.jcap));
        f.get(j).cloned().unwrap_or_else(Rat::zero)
    }

    /// First wall hit going from `p` in direction `m`: time and the walls hit then.
    fn next_hit(&self, p: &RatVec, m: &IntVec) -> Result<Option<(Rat, Vec<usize>)>> {
        let mut best: Option<(Rat, Vec<usize>, bool)> = None;
        for (i, w) in self.d.walls.iter().enumerate() {
            let nm = dot(&w.normal, m);
            if nm.is_zero() {
                continue;
            }
            let s = -dot_ri(p, &w.normal) / rat_of(&nm);
            if !s.is_positive() {
                continue;
            }
            if let Some((bs, _, _)) = &best {
                if &s > bs {
                    continue;
                }
            }
            let q: RatVec = p.iter().zip(m).map(|(x, y)| x + &s * rat_of(y)).collect();
            let vals: Vec<Rat> = w.support.iter().map(|a| dot_ri(&q, a)).collect();
            if vals.iter().any(|v| v.is_negative()) {
                continue;
            }
            let boundary = vals.iter().any(|v| v.is_zero());
            match &mut best {
                Some((bs, walls, bd)) if *bs == s => {
                    walls.push(i);
                    *bd |= boundary;
                }
                _ => best = Some((s, vec![i], boundary)),
            }
        }
        let Some((s, walls, boundary)) = best else {
            return Ok(None);
        };
        if boundary {
            return Err(Error::NonGenericEndpoint(
                "path meets the boundary of a wall".into(),
            ));
        }
        let n0 = &self.d.walls[walls[0]].normal;
        for &i in &walls[1..] {
            let n1 = &self.d.walls[i].normal;
            let parallel =
                (0..n0.len()).all(|a| (0..n0.len()).all(|b| &n0[a] * &n1[b] == &n0[b] * &n1[a]));
            if !parallel {
                return Err(Error::NonGenericEndpoint("path meets a joint".into()));
            }
        }
        Ok(Some((s, walls)))
    }

    #[allow(clippy::too_many_arguments)]
    fn trace(
        &self,
        p: RatVec,
        t: Rat,
        m: IntVec,
        res: IntVec,
        frame: &mut Frame,
        out: &mut Vec<(IntVec, Vec<(usize, usize, RatVec, Rat, Rat)>)>,
    ) -> Result<()> {
        if lattice::is_zero(&res) {
            out.push((m, frame.bends.clone()));
            return Ok(());
        }
        let Some((s, walls)) = self.next_hit(&p, &m)? else {
            return Ok(());
        };
        let q: RatVec = p.iter().zip(&m).map(|(x, y)| x + &s * rat_of(y)).collect();
        let t2 = &t + &s;
        self.bend_at(&q, &t2, &walls, 0, m, res, frame, out)
    }

    #[allow(clippy::too_many_arguments)]
    fn bend_at(
        &self,
        q: &RatVec,
        t: &Rat,
        walls: &[usize],
        idx: usize,
        m: IntVec,
        res: IntVec,
        frame: &mut Frame,
        out: &mut Vec<(IntVec, Vec<(usize, usize, RatVec, Rat, Rat)>)>,
    ) -> Result<()> {
        if idx == walls.len() {
            return self.trace(q.clone(), t.clone(), m, res, frame, out);
        }
        let wi = walls[idx];
        let w = &self.d.walls[wi];
        let a = dot(&w.normal, &m).abs().to_i64().expect("small pairing");
        let mut j = 0usize;
        loop {
            let shift: IntVec = w.n0.iter().map(|x| x * Int::from(j)).collect();
            let r2 = lattice::sub(&res, &shift);
            if r2.iter().any(|x| x.is_negative()) {
                break;
            }
            let c = if j == 0 {
                Rat::one()
            } else {
                self.coef(wi, a, j)
            };
            if !c.is_zero() {
                let dir: IntVec = w.direction.iter().map(|x| x * Int::from(j)).collect();
                let mprev = lattice::sub(&m, &dir);
                if j > 0 {
                    frame.bends.push((wi, j, q.clone(), t.clone(), c));
                }
                let r = self.bend_at(q, t, walls, idx + 1, mprev, r2, frame, out);
                if j > 0 {
                    frame.bends.pop();
                }
                r?;
            }
            j += 1;
            if j > self.jcap {
                break;
            }
        }
        Ok(())
    }
}

/// All nonnegative integer vectors of length `r` with entry sum `<= bound`, graded-lex.
fn candidates(r: usize, bound: usize) -> Vec<IntVec> {
    let mut out = Vec::new();
    fn rec(r: usize, left: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur.push(v as i64);
            rec(r, left - v, cur, out);
            cur.pop();
        }
    }
    for total in 0..=bound {
        let mut all = Vec::new();
        rec(r, total, &mut Vec::new(), &mut all);
        for v in all
            .into_iter()
            .filter(|v| v.iter().sum::<i64>() as usize == total)
        {
            out.push(lattice::ivec(&v));
        }
    }
    out
}

/// Endpoint lies on some wall.
pub fn on_some_wall(d: &ScatteringDiagram, x: &[Rat]) -> bool {
    d.walls.iter().any(|w| w.contains(x))
}

/// All broken lines with initial exponent `m` ending at `endpoint` whose total
/// bending degree is at most `degree_bound`.
pub fn enumerate_broken_lines(
    d: &ScatteringDiagram,
    m: &[Int],
    endpoint: &[Rat],
    degree_bound: usize,
) -> Result<Vec<BrokenLine>> {
    if m.len() != d.dim || endpoint.len() != d.dim {
        return Err(Error::Invalid("dimension mismatch".into()));
    }
    if lattice::is_zero(m) {
        return Err(Error::Invalid("initial exponent must be nonzero".into()));
    }
    if on_some_wall(d, endpoint) {
        return Err(Error::NonGenericEndpoint("endpoint lies on a wall".into()));
    }
    let tracer = Tracer {
        d,
        cache: RefCell::new(HashMap::new()),
        jcap: degree_bound.max(1),
    };
    let mut lines = Vec::new();
    for n in candidates(d.rank(), degree_bound) {
        let mfinal = lattice::add(m, &d.pstar(&n));
        if lattice::is_zero(&mfinal) && !lattice::is_zero(&n) {
            continue;
        }
        let mut raw = Vec::new();
        let mut frame = Frame { bends: Vec::new() };
        tracer.trace(
            endpoint.to_vec(),
            Rat::zero(),
            mfinal.clone(),
            n.clone(),
            &mut frame,
            &mut raw,
        )?;
        for (minit, bends_back) in raw {
            debug_assert_eq!(minit, m);
            lines.push(assemble(m, endpoint, &n, &bends_back, d));
        }
    }
    Ok(lines)
}

fn assemble(
    m: &[Int],
    endpoint: &[Rat],
    n: &IntVec,
    bends_back: &[(usize, usize, RatVec, Rat, Rat)],
    d: &ScatteringDiagram,
) -> BrokenLine {
    // bends_back is ordered from the endpoint backwards
    let mut segments = Vec::new();
    let mut bends = Vec::new();
    let mut exp = m.to_vec();
    let mut coef = Rat::one();
    let mut prev_time: Option<Rat> = None;
    for (wall, j, point, back_t, c) in bends_back.iter().rev() {
        let time = -back_t.clone();
        segments.push(Segment {
            exponent: exp.clone(),
            coef: coef.clone(),
            bend_wall: Some(*wall),
            duration: prev_time.as_ref().map(|p| &time - p),
        });
        bends.push(Bend {
            wall: *wall,
            power: *j,
            point: point.clone(),
            time: time.clone(),
        });
        let dir: IntVec = d.walls[*wall]
            .direction
            .iter()
            .map(|x| x * Int::from(*j as i64))
            .collect();
        exp = lattice::add(&exp, &dir);
        coef *= c;
        prev_time = Some(time);
    }
    segments.push(Segment {
        exponent: exp,
        coef,
        bend_wall: None,
        duration: prev_time.map(|p| -p),
    });
    BrokenLine {
        initial: m.to_vec(),
        endpoint: endpoint.to_vec(),
        segments,
        bends,
        degree: n.clone(),
    }
}

const PRIMES: [i64; 40] = [
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307,
    311, 313,
];

/// A generic point in the interior of the positive chamber (mutable coordinates positive).
pub fn default_basepoint(d: &ScatteringDiagram) -> RatVec {
    let uf: Vec<usize> = match &d.plane {
        Some(p) => p.uf.clone(),
        None => d
            .walls
            .iter()
            .filter(|w| w.initial)
            .flat_map(|w| w.normal.iter().position(|x| !x.is_zero()))
            .collect(),
    };
    (0..d.dim)
        .map(|i| {
            let p = PRIMES[i % PRIMES.len()];
            if uf.contains(&i) {
                rat(1, 1) + rat(1, p)
            } else {
                rat(1, p)
            }
        })
        .collect()
}

fn perturb(x: &[Rat], attempt: usize, scale: &Rat) -> RatVec {
    x.iter()
        .enumerate()
        .map(|(i, v)| {
            let p = PRIMES[(attempt * 7 + i * 3) % PRIMES.len()];
            v + scale * rat(1, p * (attempt as i64 + 2))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaResult {
    pub poly: LaurentPolynomial,
    /// Every contributing line has bending degree strictly below the bound.
    pub exact: bool,
    pub endpoint: RatVec,
    pub lines: usize,
    pub bound: usize,
}

/// Theta function `θ_m` at a generic point near `basepoint`, summing final monomials
/// of broken lines of degree at most `degree_bound`.
pub fn theta_function(
    d: &ScatteringDiagram,
    m: &[Int],
    basepoint: &[Rat],
    degree_bound: usize,
) -> Result<ThetaResult> {
    if lattice::is_zero(m) {
        return Ok(ThetaResult {
            poly: LaurentPolynomial::one(d.dim),
            exact: true,
            endpoint: basepoint.to_vec(),
            lines: 0,
            bound: degree_bound,
        });
    }
    let mut endpoint = basepoint.to_vec();
    let mut last = None;
    for attempt in 0..=32 {
        match enumerate_broken_lines(d, m, &endpoint, degree_bound) {
            Ok(lines) => {
                let mut poly = LaurentPolynomial::zero(d.dim);
                let mut exact = true;
                for l in &lines {
                    poly.add_term(l.final_exponent().clone(), l.final_coef().clone());
                    let deg: Int = l.degree.iter().sum();
                    if deg >= Int::from(degree_bound) {
                        exact = false;
                    }
                }
                return Ok(ThetaResult {
                    poly,
                    exact,
                    endpoint,
                    lines: lines.len(),
                    bound: degree_bound,
                });
            }
            Err(e @ Error::NonGenericEndpoint(_)) => {
                last = Some(e);
                endpoint = perturb(basepoint, attempt, &rat(1, 1000));
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

/// Coefficient `α(p, q, r)` of `θ_r` in `θ_p θ_q`, from pairs of broken lines ending
/// near `r`.
pub fn structure_constant(
    d: &ScatteringDiagram,
    p: &[Int],
    q: &[Int],
    r: &[Int],
    degree_bound: usize,
) -> Result<Rat> {
    let diff = lattice::sub(&lattice::sub(r, p), q);
    let dom = Dominance::new(&d.pstar_uf)?;
    let n = match dom.solve(&diff) {
        Some(n) if n.iter().all(|x| x.is_integer() && !x.is_negative()) => {
            lattice::to_int(&n).unwrap()
        }
        _ => return Ok(Rat::zero()),
    };
    let total = n.iter().sum::<Int>().to_usize().unwrap();
    if total > degree_bound {
        return Err(Error::Truncated(degree_bound));
    }
    let rr = lattice::to_rat(r);
    let mut last = None;
    for attempt in 0..32 {
        let z = near_point(d, &rr, attempt);
        match pair_sum(d, p, q, r, &z, total) {
            Ok(v) => return Ok(v),
            Err(e @ Error::NonGenericEndpoint(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

fn pair_sum(
    d: &ScatteringDiagram,
    p: &[Int],
    q: &[Int],
    r: &[Int],
    z: &[Rat],
    bound: usize,
) -> Result<Rat> {
    let l1 = if lattice::is_zero(p) {
        Vec::new()
    } else {
        enumerate_broken_lines(d, p, z, bound)?
    };
    let l2 = if lattice::is_zero(q) {
        Vec::new()
    } else {
        enumerate_broken_lines(d, q, z, bound)?
    };
    let zero_line = |m: &[Int]| vec![(m.to_vec(), Rat::one())];
    let f1: Vec<(IntVec, Rat)> = if lattice::is_zero(p) {
        zero_line(p)
    } else {
        l1.iter()
            .map(|l| (l.final_exponent().clone(), l.final_coef().clone()))
            .collect()
    };
    let f2: Vec<(IntVec, Rat)> = if lattice::is_zero(q) {
        zero_line(q)
    } else {
        l2.iter()
            .map(|l| (l.final_exponent().clone(), l.final_coef().clone()))
            .collect()
    };
    let mut total = Rat::zero();
    for (e1, c1) in &f1 {
        for (e2, c2) in &f2 {
            if lattice::add(e1, e2) == r {
                total += c1 * c2;
            }
        }
    }
    Ok(total)
}

/// A generic point close to `r` that no wall separates from `r` except walls through `r`.
fn near_point(d: &ScatteringDiagram, r: &[Rat], attempt: usize) -> RatVec {
    let mut scale = rat(1, 1000);
    loop {
        let z = perturb(r, attempt, &scale);
        let separated = d.walls.iter().any(|w| {
            let a = dot_ri(r, &w.normal);
            let b = dot_ri(&z, &w.normal);
            if a.is_zero() {
                return false;
            }
            if a.is_positive() != b.is_positive() || b.is_zero() {
                return true;
            }
            false
        });
        let support_flip = d.walls.iter().any(|w| {
            w.support.iter().any(|s| {
                let a = dot_ri(r, s);
                let b = dot_ri(&z, s);
                !a.is_zero() && (a.is_positive() != b.is_positive() || b.is_zero())
            })
        });
        if !separated && !support_flip {
            return z;
        }
        scale /= rat(16, 1);
    }
}

/// Theta functions indexed by label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ThetaTable {
    pub entries: BTreeMap<IntVec, LaurentPolynomial>,
}

impl ThetaTable {
    pub fn compute(
        d: &ScatteringDiagram,
        labels: &[IntVec],
        basepoint: &[Rat],
        bound: usize,
    ) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for l in labels {
            let t = theta_function(d, l, basepoint, bound)?;
            if !t.exact {
                return Err(Error::Truncated(bound));
            }
            entries.insert(l.clone(), t.poly);
        }
        Ok(ThetaTable { entries })
    }
}

/// Label `(p*(n), n)` of the principal-coefficient theta function lifting `θ^X_{dn}`.
pub fn prin_label(p: &EnsembleMap, n: &[Int]) -> IntVec {
    let mut l = p.apply(n);
    l.extend(n.iter().cloned());
    l
}

/// `θ^X_{dn}` computed on the principal-coefficient diagram and rewritten through
/// `(a, b) -> X^b`, checking `a = p*(b)` for every exponent.
pub fn theta_on_x(
    diagram_prin: &ScatteringDiagram,
    p: &EnsembleMap,
    n: &[Int],
    degree_bound: usize,
) -> Result<(LaurentPolynomial, ThetaResult)> {
    let dim = p.b.rows();
    if diagram_prin.dim != 2 * dim || n.len() != dim {
        return Err(Error::Invalid(
            "principal diagram has the wrong dimension".into(),
        ));
    }
    let label = prin_label(p, n);
    let base = default_basepoint(diagram_prin);
    let t = theta_function(diagram_prin, &label, &base, degree_bound)?;
    let mut out = LaurentPolynomial::zero(dim);
    for (e, c) in t.poly.terms() {
        let (a, b) = e.split_at(dim);
        if p.apply(b) != a {
            return Err(Error::NotInImage);
        }
        out.add_term(b.to_vec(), c.clone());
    }
    Ok((out, t))
}
