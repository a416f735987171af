//! Exact rational polytopes and polyhedral cones via double description.

use std::collections::BTreeSet;

use num::{Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{
    self, dot, dot_ri, primitive, primitive_of_rat, rat_of, to_int, to_rat, Int, IntMat, IntVec,
    Rat, RatMat, RatVec,
};
use crate::tropical::PLFunction;

/// `<normal, x> >= offset` (or `=` when used as an equation).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Halfspace {
    pub normal: RatVec,
    pub offset: Rat,
}

impl Halfspace {
    pub fn new(normal: RatVec, offset: Rat) -> Self {
        Halfspace { normal, offset }
    }

    pub fn value(&self, x: &[Rat]) -> Rat {
        dot(&self.normal, x) - &self.offset
    }

    pub fn holds(&self, x: &[Rat]) -> bool {
        !self.value(x).is_negative()
    }

    /// Integer homogenized row `(−offset, normal)` scaled to be primitive.
    fn homogenized(&self) -> IntVec {
        let mut v = vec![-self.offset.clone()];
        v.extend(self.normal.iter().cloned());
        primitive_of_rat(&v)
    }
}

/// Affine subspace `{x : <a_i, x> = b_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSubspace {
    pub dim: usize,
    pub equations: Vec<Halfspace>,
}

impl AffineSubspace {
    pub fn whole(dim: usize) -> Self {
        AffineSubspace {
            dim,
            equations: Vec::new(),
        }
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.equations.iter().all(|h| h.value(x).is_zero())
    }
}

/// Polyhedron given by inequalities only. Offsets are zero for genuine cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    pub dim: usize,
    pub halfspaces: Vec<Halfspace>,
}

impl Cone {
    pub fn contains(&self, x: &[Rat]) -> bool {
        self.halfspaces.iter().all(|h| h.holds(x))
    }

    pub fn is_homogeneous(&self) -> bool {
        self.halfspaces.iter().all(|h| h.offset.is_zero())
    }
}

/// Bounded polytope with matching V- and H-representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<RatVec>,
    facets: Vec<Halfspace>,
    equalities: Vec<Halfspace>,
}

// ---------------------------------------------------------------------------
// Double description on homogeneous integer cones.

fn bit_set(z: &mut [u64], i: usize) {
    z[i / 64] |= 1 << (i % 64);
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn combine(alpha: &Int, u: &[Int], beta: &Int, w: &[Int]) -> IntVec {
    let v: IntVec = u.iter().zip(w).map(|(x, y)| alpha * x - beta * y).collect();
    primitive(&v)
}

/// Cone `{y : <a, y> >= 0 for a in ineqs}` as (lineality basis, extreme rays).
pub(crate) fn double_description(dim: usize, ineqs: &[IntVec]) -> (Vec<IntVec>, Vec<IntVec>) {
    let words = ineqs.len().div_ceil(64).max(1);
    let mut lin: Vec<IntVec> = (0..dim).map(|i| lattice::unit(dim, i)).collect();
    let mut rays: Vec<(IntVec, Vec<u64>)> = Vec::new();
    for (ci, a) in ineqs.iter().enumerate() {
        if a.iter().all(|x| x.is_zero()) {
            for (_, z) in rays.iter_mut() {
                bit_set(z, ci);
            }
            continue;
        }
        if let Some(pi) = lin.iter().position(|l| !dot(a, l).is_zero()) {
            let mut lstar = lin.remove(pi);
            let mut al = dot(a, &lstar);
            if al.is_negative() {
                lstar = lattice::neg(&lstar);
                al = -al;
            }
            for l in lin.iter_mut() {
                let x = dot(a, l);
                if !x.is_zero() {
                    *l = combine(&al, l, &x, &lstar);
                }
            }
            for (r, z) in rays.iter_mut() {
                let x = dot(a, r);
                if !x.is_zero() {
                    *r = combine(&al, r, &x, &lstar);
                }
                bit_set(z, ci);
            }
            let mut z = vec![0u64; words];
            for j in 0..ci {
                bit_set(&mut z, j);
            }
            rays.push((lstar, z));
            continue;
        }
        let vals: Vec<Int> = rays.iter().map(|(r, _)| dot(a, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut next: Vec<(IntVec, Vec<u64>)> = Vec::new();
        for (i, (r, z)) in rays.iter().enumerate() {
            if vals[i].is_zero() {
                let mut z = z.clone();
                bit_set(&mut z, ci);
                next.push((r.clone(), z));
            } else if vals[i].is_positive() {
                next.push((r.clone(), z.clone()));
            }
        }
        for &p in &pos {
            for &q in &neg {
                let common: Vec<u64> = rays[p]
                    .1
                    .iter()
                    .zip(&rays[q].1)
                    .map(|(x, y)| x & y)
                    .collect();
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(i, (_, z))| i == p || i == q || !subset(&common, z));
                if !adjacent {
                    continue;
                }
                // vals[p] > 0 > vals[q]: vals[p]*r_q - vals[q]*r_p lies on the hyperplane.
                let r = combine(&vals[p], &rays[q].0, &vals[q], &rays[p].0);
                let mut z = common;
                bit_set(&mut z, ci);
                next.push((r, z));
            }
        }
        rays = next;
    }
    (lin, rays.into_iter().map(|(r, _)| r).collect())
}

// ---------------------------------------------------------------------------

fn canonical_equalities(lin: &[IntVec]) -> Vec<IntVec> {
    if lin.is_empty() {
        return Vec::new();
    }
    let m = RatMat::from_rows(lin.iter().map(|v| to_rat(v)).collect()).unwrap();
    let (r, piv) = m.rref();
    (0..piv.len())
        .map(|i| primitive_of_rat(&r.row(i)))
        .collect()
}

/// Orthogonal projection of `v` away from the row space of `basis`.
fn project_away(v: &[Int], basis: &[IntVec]) -> IntVec {
    if basis.is_empty() {
        return v.to_vec();
    }
    let b = RatMat::from_rows(basis.iter().map(|x| to_rat(x)).collect()).unwrap();
    let gram = b.mul(&b.transpose()).inverse().expect("independent basis");
    let coeffs = gram.mul_vec(&b.mul_vec(&to_rat(v)));
    let corr = b.vec_mul(&coeffs);
    let out: RatVec = to_rat(v).iter().zip(&corr).map(|(x, y)| x - y).collect();
    primitive_of_rat(&out)
}

fn dehomogenize(row: &[Int]) -> Halfspace {
    Halfspace {
        normal: to_rat(&row[1..]),
        offset: -rat_of(&row[0]),
    }
}

fn sort_dedup(mut v: Vec<RatVec>) -> Vec<RatVec> {
    v.sort();
    v.dedup();
    v
}

impl Polytope {
    pub fn empty(dim: usize) -> Self {
        Polytope {
            dim,
            vertices: Vec::new(),
            facets: Vec::new(),
            equalities: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[RatVec] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn equalities(&self) -> &[Halfspace] {
        &self.equalities
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Dimension of the affine hull (−1 for the empty set).
    pub fn affine_dim(&self) -> i64 {
        if self.is_empty() {
            return -1;
        }
        let rows: Vec<RatVec> = self.equalities.iter().map(|h| h.normal.clone()).collect();
        let rank = if rows.is_empty() {
            0
        } else {
            RatMat::from_rows(rows).unwrap().rank()
        };
        self.dim as i64 - rank as i64
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        !self.is_empty()
            && self.equalities.iter().all(|h| h.value(x).is_zero())
            && self.facets.iter().all(|h| h.holds(x))
    }

    pub fn contains_int(&self, x: &[Int]) -> bool {
        self.contains(&to_rat(x))
    }

    /// Convex hull of a nonempty point set.
    pub fn hull(points: &[RatVec]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput)?;
        let d = first.len();
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::Invalid("points of different dimensions".into()));
        }
        let pts = sort_dedup(points.to_vec());
        let gens: Vec<IntVec> = pts
            .iter()
            .map(|p| {
                let mut h = vec![Rat::one()];
                h.extend(p.iter().cloned());
                primitive_of_rat(&h)
            })
            .collect();
        let (lin, rays) = double_description(d + 1, &gens);
        let eq_rows = canonical_equalities(&lin);
        let mut facet_rows: BTreeSet<IntVec> = BTreeSet::new();
        for r in &rays {
            let p = project_away(r, &eq_rows);
            // Skip the trivial constraint and the face at infinity of a point.
            if p[1..].iter().all(|x| x.is_zero()) || !gens.iter().any(|g| dot(&p, g).is_zero()) {
                continue;
            }
            facet_rows.insert(p);
        }
        let mut vertices = Vec::new();
        for (p, g) in pts.iter().zip(&gens) {
            let mut tight: Vec<RatVec> = eq_rows.iter().map(|e| to_rat(e)).collect();
            tight.extend(
                facet_rows
                    .iter()
                    .filter(|f| dot(f, g).is_zero())
                    .map(|f| to_rat(f)),
            );
            let rank = if tight.is_empty() {
                0
            } else {
                RatMat::from_rows(tight).unwrap().rank()
            };
            if rank == d {
                vertices.push(p.clone());
            }
        }
        Ok(Polytope {
            dim: d,
            vertices,
            facets: facet_rows.iter().map(|r| dehomogenize(r)).collect(),
            equalities: eq_rows.iter().map(|r| dehomogenize(r)).collect(),
        })
    }

    /// Polytope `{x : facets hold, equalities hold}`; errors if unbounded.
    pub fn from_h(dim: usize, facets: &[Halfspace], equalities: &[Halfspace]) -> Result<Self> {
        let verts = h_to_v(dim, facets, equalities)?;
        if verts.is_empty() {
            return Ok(Self::empty(dim));
        }
        Self::hull(&verts)
    }

    pub fn intersect(&self, extra: &[Halfspace], extra_eq: &[Halfspace]) -> Result<Self> {
        if self.is_empty() {
            return Ok(self.clone());
        }
        let mut f = self.facets.clone();
        f.extend(extra.iter().cloned());
        let mut e = self.equalities.clone();
        e.extend(extra_eq.iter().cloned());
        Self::from_h(self.dim, &f, &e)
    }

    /// `{U x + shift : x in P}`.
    pub fn affine_image(&self, u: &RatMat, shift: &[Rat]) -> Result<Self> {
        if self.is_empty() {
            return Ok(Self::empty(u.rows()));
        }
        let pts: Vec<RatVec> = self
            .vertices
            .iter()
            .map(|v| lattice::add(&u.mul_vec(v), shift))
            .collect();
        Self::hull(&pts)
    }

    pub fn translate(&self, shift: &[Rat]) -> Result<Self> {
        self.affine_image(&RatMat::identity(self.dim), shift)
    }

    pub fn scale(&self, k: &Rat) -> Result<Self> {
        if self.is_empty() {
            return Ok(self.clone());
        }
        Self::hull(
            &self
                .vertices
                .iter()
                .map(|v| lattice::scale(v, k))
                .collect::<Vec<_>>(),
        )
    }

    /// Same point set (compared through the canonical vertex lists).
    pub fn same_set(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices
    }

    /// Every point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.vertices.iter().all(|v| other.contains(v))
    }

    /// Integer bounding box `[lo, hi]` from the vertices.
    pub fn bounding_box(&self) -> Option<(Vec<Int>, Vec<Int>)> {
        if self.is_empty() {
            return None;
        }
        let lo = (0..self.dim)
            .map(|j| {
                self.vertices
                    .iter()
                    .map(|v| v[j].clone())
                    .min()
                    .unwrap()
                    .ceil()
                    .to_integer()
            })
            .collect();
        let hi = (0..self.dim)
            .map(|j| {
                self.vertices
                    .iter()
                    .map(|v| v[j].clone())
                    .max()
                    .unwrap()
                    .floor()
                    .to_integer()
            })
            .collect();
        Some((lo, hi))
    }

    /// Number of points in the integer bounding box.
    pub fn box_size(&self) -> Int {
        match self.bounding_box() {
            None => Int::zero(),
            Some((lo, hi)) => lo
                .iter()
                .zip(&hi)
                .map(|(a, b)| if b < a { Int::zero() } else { b - a + 1 })
                .product(),
        }
    }
}

/// Vertices of a bounded H-polyhedron (empty list if infeasible).
pub fn h_to_v(dim: usize, facets: &[Halfspace], equalities: &[Halfspace]) -> Result<Vec<RatVec>> {
    let mut rows: Vec<IntVec> = Vec::new();
    for e in equalities {
        let h = e.homogenized();
        rows.push(lattice::neg(&h));
        rows.push(h);
    }
    rows.extend(facets.iter().map(|f| f.homogenized()));
    rows.push(lattice::unit(dim + 1, 0));
    let (lin, rays) = double_description(dim + 1, &rows);
    let mut verts = Vec::new();
    let mut recession = !lin.is_empty();
    for r in &rays {
        if r[0].is_zero() {
            recession = true;
        } else {
            let t = rat_of(&r[0]);
            verts.push(r[1..].iter().map(|x| rat_of(x) / &t).collect::<RatVec>());
        }
    }
    if verts.is_empty() {
        return Ok(Vec::new());
    }
    if recession {
        return Err(Error::Unbounded);
    }
    Ok(sort_dedup(verts))
}

pub fn convex_hull(points: &[RatVec]) -> Result<Polytope> {
    Polytope::hull(points)
}

/// `{b : Trop(theta_j)(b) >= offsets[j]}` with every min of linear forms split into
/// its linear pieces.
pub fn superpotential_cone(summands: &[PLFunction], offsets: &[Rat]) -> Result<Cone> {
    if summands.len() != offsets.len() {
        return Err(Error::Invalid("one offset per summand".into()));
    }
    let dim = summands.first().map(|f| f.dim()).ok_or(Error::EmptyInput)?;
    let mut halfspaces = Vec::new();
    for (f, c) in summands.iter().zip(offsets) {
        for normal in f.linear_pieces() {
            halfspaces.push(Halfspace {
                normal: to_rat(&normal),
                offset: c.clone(),
            });
        }
    }
    halfspaces.sort();
    halfspaces.dedup();
    Ok(Cone { dim, halfspaces })
}

/// Intersection of a cone with an affine subspace; must be bounded.
pub fn slice(cone: &Cone, fiber: &AffineSubspace) -> Result<Polytope> {
    if cone.dim != fiber.dim {
        return Err(Error::Invalid("dimension mismatch".into()));
    }
    Polytope::from_h(cone.dim, &cone.halfspaces, &fiber.equations)
}

// ---------------------------------------------------------------------------
// Lattice points.

trait EnumInt:
    Clone + Ord + Integer + Signed + From<i64> + for<'a> std::ops::AddAssign<&'a Self> + ToPrimitive
{
}
impl EnumInt for i128 {}
impl EnumInt for Int {}

fn ceil_div<T: EnumInt>(a: &T, b: &T) -> T {
    a.div_ceil(b)
}

fn enumerate<T: EnumInt>(cons: &[(Vec<T>, T)], lo: &[T], hi: &[T]) -> Vec<Vec<T>> {
    let d = lo.len();
    // suffix[c][j] = max of sum_{l >= j} a_l x_l over the box
    let suffix: Vec<Vec<T>> = cons
        .iter()
        .map(|(a, _)| {
            let mut s = vec![T::zero(); d + 1];
            for j in (0..d).rev() {
                let m = std::cmp::max(a[j].clone() * lo[j].clone(), a[j].clone() * hi[j].clone());
                s[j] = s[j + 1].clone() + m;
            }
            s
        })
        .collect();
    let mut out = Vec::new();
    let mut x: Vec<T> = vec![T::zero(); d];
    let mut partial: Vec<T> = vec![T::zero(); cons.len()];
    fn rec<T: EnumInt>(
        j: usize,
        cons: &[(Vec<T>, T)],
        suffix: &[Vec<T>],
        lo: &[T],
        hi: &[T],
        x: &mut Vec<T>,
        partial: &mut Vec<T>,
        out: &mut Vec<Vec<T>>,
    ) {
        let d = lo.len();
        if j == d {
            if cons.iter().zip(partial.iter()).all(|((_, b), s)| s >= b) {
                out.push(x.clone());
            }
            return;
        }
        let mut l = lo[j].clone();
        let mut h = hi[j].clone();
        for (c, (a, b)) in cons.iter().enumerate() {
            // need a_j x_j >= b - partial - suffix[j+1]
            let need = b.clone() - partial[c].clone() - suffix[c][j + 1].clone();
            let aj = &a[j];
            if aj.is_zero() {
                if need.is_positive() {
                    return;
                }
            } else if aj.is_positive() {
                l = std::cmp::max(l, ceil_div(&need, aj));
            } else {
                h = std::cmp::min(h, need.div_floor(aj));
            }
        }
        let mut v = l;
        while v <= h {
            x[j] = v.clone();
            for (c, (a, _)) in cons.iter().enumerate() {
                let t = a[j].clone() * v.clone();
                partial[c] += &t;
            }
            rec(j + 1, cons, suffix, lo, hi, x, partial, out);
            for (c, (a, _)) in cons.iter().enumerate() {
                partial[c] = partial[c].clone() - a[j].clone() * v.clone();
            }
            v = v + T::one();
        }
    }
    rec(0, cons, &suffix, lo, hi, &mut x, &mut partial, &mut out);
    out
}

fn integer_constraints(p: &Polytope) -> Vec<(IntVec, Int)> {
    let mut cons = Vec::new();
    let mut push = |h: &Halfspace, sign: i64| {
        let row = h.homogenized();
        let s = Int::from(sign);
        let a: IntVec = row[1..].iter().map(|x| x * &s).collect();
        cons.push((a, -&row[0] * &s));
    };
    for h in &p.facets {
        push(h, 1);
    }
    for h in &p.equalities {
        push(h, 1);
        push(h, -1);
    }
    cons
}

/// All integer points of a polytope in lexicographic order.
pub fn lattice_points(p: &Polytope) -> Vec<IntVec> {
    let Some((lo, hi)) = p.bounding_box() else {
        return Vec::new();
    };
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return Vec::new();
    }
    let cons = integer_constraints(p);
    let small = |x: &Int| x.bits() < 60;
    let fits = cons.iter().all(|(a, b)| a.iter().all(small) && small(b))
        && lo.iter().chain(&hi).all(|x| x.bits() < 30)
        && p.dim < 64;
    if fits {
        let c128: Vec<(Vec<i128>, i128)> = cons
            .iter()
            .map(|(a, b)| {
                (
                    a.iter().map(|x| x.to_i128().unwrap()).collect(),
                    b.to_i128().unwrap(),
                )
            })
            .collect();
        let l: Vec<i128> = lo.iter().map(|x| x.to_i128().unwrap()).collect();
        let h: Vec<i128> = hi.iter().map(|x| x.to_i128().unwrap()).collect();
        enumerate(&c128, &l, &h)
            .into_iter()
            .map(|v| v.into_iter().map(Int::from).collect())
            .collect()
    } else {
        enumerate(&cons, &lo, &hi)
    }
}

/// Lattice points by testing every point of the bounding box.
pub fn lattice_points_brute(p: &Polytope) -> Vec<IntVec> {
    let Some((lo, hi)) = p.bounding_box() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut x = lo.clone();
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return out;
    }
    loop {
        if p.contains_int(&x) {
            out.push(x.clone());
        }
        let mut j = p.dim;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if x[j] < hi[j] {
                x[j] += 1;
                for t in j + 1..p.dim {
                    x[t] = lo[t].clone();
                }
                break;
            }
        }
        if p.dim == 0 {
            return out;
        }
    }
}

/// `|det U| = 1` and `U P + shift = Q`.
pub fn verify_unimodular(p: &Polytope, q: &Polytope, u: &IntMat, shift: &[Int]) -> bool {
    if u.rows() != u.cols() || u.cols() != p.dim() || u.rows() != q.dim() {
        return false;
    }
    if !u.det().abs().is_one() {
        return false;
    }
    let ur = u.to_rat();
    let sh = to_rat(shift);
    let mut mapped: Vec<RatVec> = p
        .vertices()
        .iter()
        .map(|v| lattice::add(&ur.mul_vec(v), &sh))
        .collect();
    mapped.sort();
    mapped == q.vertices()
}

/// Evaluate `<normal, x>` for an integer point.
pub fn eval_int(h: &Halfspace, x: &[Int]) -> Rat {
    dot_ri(&h.normal, x) - &h.offset
}

/// Integer point list as rational vectors.
pub fn as_rat_points(pts: &[IntVec]) -> Vec<RatVec> {
    pts.iter().map(|p| to_rat(p)).collect()
}

/// Rational points that are integral, as integer vectors.
pub fn integral_vertices(p: &Polytope) -> Option<Vec<IntVec>> {
    p.vertices().iter().map(|v| to_int(v)).collect()
}
