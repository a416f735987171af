//! Tropical points, tropicalized mutations and positive functions, weight fibers,
//! and piecewise-linear images of polytopes.

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, dot, rat, rat_of, to_rat, Int, IntMat, IntVec, Rat, RatMat, RatVec};
use crate::laurent::{Flavor, LaurentPolynomial};
use crate::polytope::{AffineSubspace, Halfspace, Polytope};
use crate::seed::Seed;

/// Semifield convention: `T` tropicalizes with `−max`, `t` with `min`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    #[serde(rename = "T")]
    Upper,
    #[serde(rename = "t")]
    Lower,
}

impl Convention {
    pub fn flip(self) -> Self {
        match self {
            Convention::Upper => Convention::Lower,
            Convention::Lower => Convention::Upper,
        }
    }
}

/// A point of the tropical space, tagged with the seed whose chart identifies it with a lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalPoint {
    pub seed: Vec<usize>,
    pub coords: RatVec,
    pub convention: Convention,
}

impl TropicalPoint {
    pub fn new(seed: &Seed, coords: RatVec, convention: Convention) -> Self {
        TropicalPoint {
            seed: seed.word().to_vec(),
            coords,
            convention,
        }
    }
}

/// `x -> x + max(0, <ell, x>) * w`, with `<ell, w> = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryPL {
    pub ell: RatVec,
    pub w: RatVec,
}

impl ElementaryPL {
    pub fn apply(&self, x: &[Rat]) -> RatVec {
        let l = dot(&self.ell, x);
        if l.is_positive() {
            lattice::add(x, &lattice::scale(&self.w, &l))
        } else {
            x.to_vec()
        }
    }

    pub fn inverse(&self) -> Self {
        ElementaryPL {
            ell: self.ell.clone(),
            w: lattice::neg(&self.w),
        }
    }

    /// The linear map used on the half-space `<ell, x> >= 0`.
    pub fn positive_part(&self) -> RatMat {
        let n = self.ell.len();
        let mut m = RatMat::identity(n);
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j) + &self.w[i] * &self.ell[j];
                m.set(i, j, v);
            }
        }
        m
    }

    /// Tropicalized mutation at `k` from seed `s`, acting on points in initial
    /// coordinates. Stepping back along the last letter of the word uses the inverse
    /// of the parent's map.
    pub fn mutation(s: &Seed, k: usize, flavor: Flavor, conv: Convention) -> Result<Self> {
        if k >= s.n() {
            return Err(Error::Invalid(format!("index {k} out of range")));
        }
        if !s.fixed().is_unfrozen(k) {
            return Err(Error::FrozenIndex(k));
        }
        if s.word().last() == Some(&k) {
            let parent = s.mutate(k)?;
            return Ok(Self::forward(&parent, k, flavor, conv).inverse());
        }
        Ok(Self::forward(s, k, flavor, conv))
    }

    fn forward(s: &Seed, k: usize, flavor: Flavor, conv: Convention) -> Self {
        let d = s.fixed().d();
        let (ell, w) = match flavor {
            // <v_k, n> for n in e-coordinates; step −d_k e_k
            Flavor::A => {
                let v = s.v(k);
                let ell: RatVec = (0..s.n()).map(|i| rat_of(&v[i]) / rat(d[i], 1)).collect();
                let w: RatVec = s.e(k).iter().map(|x| -rat_of(x) * rat(d[k], 1)).collect();
                (ell, w)
            }
            // <d_k e_k, m> for m in f-coordinates; step v_k
            Flavor::X => {
                let e = s.e(k);
                let ell: RatVec = (0..s.n())
                    .map(|a| rat_of(&e[a]) * rat(d[k], d[a]))
                    .collect();
                (ell, to_rat(&s.v(k)))
            }
        };
        match conv {
            Convention::Upper => ElementaryPL { ell, w },
            Convention::Lower => ElementaryPL {
                ell: lattice::neg(&ell),
                w: lattice::neg(&w),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PLStep {
    Elementary(ElementaryPL),
    Linear(RatMat),
}

/// Composite of piecewise-linear steps, applied first to last.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PLMap {
    pub steps: Vec<PLStep>,
}

impl PLMap {
    pub fn elementary(e: ElementaryPL) -> Self {
        PLMap {
            steps: vec![PLStep::Elementary(e)],
        }
    }

    pub fn then(mut self, other: PLMap) -> Self {
        self.steps.extend(other.steps);
        self
    }

    /// Tropicalized mutations along `word` starting at seed `s`.
    pub fn mutations(s: &Seed, word: &[usize], flavor: Flavor, conv: Convention) -> Result<Self> {
        let mut cur = s.clone();
        let mut steps = Vec::new();
        for &k in word {
            steps.push(PLStep::Elementary(ElementaryPL::mutation(
                &cur, k, flavor, conv,
            )?));
            cur = cur.mutate(k)?;
        }
        Ok(PLMap { steps })
    }

    pub fn apply(&self, x: &[Rat]) -> RatVec {
        self.steps.iter().fold(x.to_vec(), |acc, s| match s {
            PLStep::Elementary(e) => e.apply(&acc),
            PLStep::Linear(m) => m.mul_vec(&acc),
        })
    }

    /// Inverse map; fails if a linear step is singular.
    pub fn inverse(&self) -> Result<Self> {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| match s {
                PLStep::Elementary(e) => Ok(PLStep::Elementary(e.inverse())),
                PLStep::Linear(m) => m.inverse().map(PLStep::Linear).ok_or(Error::Rank),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PLMap { steps })
    }
}

/// Tropicalized mutation of an `A`-side point, retagged with `mu_k(s)`.
pub fn trop_mutate_a(pt: &TropicalPoint, k: usize, s: &Seed) -> Result<TropicalPoint> {
    trop_mutate(pt, k, s, Flavor::A)
}

/// Tropicalized mutation of an `X`-side point, retagged with `mu_k(s)`.
pub fn trop_mutate_x(pt: &TropicalPoint, k: usize, s: &Seed) -> Result<TropicalPoint> {
    trop_mutate(pt, k, s, Flavor::X)
}

fn trop_mutate(pt: &TropicalPoint, k: usize, s: &Seed, flavor: Flavor) -> Result<TropicalPoint> {
    if pt.seed != s.word() {
        return Err(Error::Invalid(
            "point is tagged with a different seed".into(),
        ));
    }
    if pt.coords.len() != s.n() {
        return Err(Error::Invalid("coordinate length mismatch".into()));
    }
    let e = ElementaryPL::mutation(s, k, flavor, pt.convention)?;
    let next = s.mutate(k)?;
    Ok(TropicalPoint {
        seed: next.word().to_vec(),
        coords: e.apply(&pt.coords),
        convention: pt.convention,
    })
}

pub fn i_involution(pt: &TropicalPoint) -> TropicalPoint {
    TropicalPoint {
        seed: pt.seed.clone(),
        coords: lattice::neg(&pt.coords),
        convention: pt.convention.flip(),
    }
}

/// Tropicalization of a positive Laurent polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLFunction {
    pub kind: Convention,
    pub support: Vec<IntVec>,
}

impl PLFunction {
    pub fn dim(&self) -> usize {
        self.support.first().map_or(0, |s| s.len())
    }

    pub fn evaluate(&self, x: &[Rat]) -> Rat {
        let vals = self.support.iter().map(|l| lattice::dot_ri(x, l));
        match self.kind {
            Convention::Upper => -vals.max().unwrap_or_else(Rat::zero),
            Convention::Lower => vals.min().unwrap_or_else(Rat::zero),
        }
    }

    /// Linear forms `a` with `f(x) >= c  <=>  <a, x> >= c` for all `a`.
    pub fn linear_pieces(&self) -> Vec<IntVec> {
        match self.kind {
            Convention::Lower => self.support.clone(),
            Convention::Upper => self.support.iter().map(|l| lattice::neg(l)).collect(),
        }
    }
}

pub fn tropicalize(f: &LaurentPolynomial, conv: Convention) -> Result<PLFunction> {
    if f.terms().any(|(_, c)| !c.is_positive()) || f.is_zero() {
        return Err(Error::NotPositive);
    }
    Ok(PLFunction {
        kind: conv,
        support: f.exponents(),
    })
}

/// `{m : <m, h_j> = q_j}` for the rows `h_j` of `h_basis`.
pub fn weight_fiber(q: &[Int], h_basis: &IntMat, dim: usize) -> Result<AffineSubspace> {
    if h_basis.rows() == 0 {
        return Ok(AffineSubspace::whole(dim));
    }
    if h_basis.cols() != dim || q.len() != h_basis.rows() {
        return Err(Error::Invalid("dimension mismatch".into()));
    }
    if h_basis.rank() < h_basis.rows() {
        return Err(Error::Rank);
    }
    let equations = (0..h_basis.rows())
        .map(|j| Halfspace::new(to_rat(&h_basis.row(j)), rat_of(&q[j])))
        .collect();
    Ok(AffineSubspace { dim, equations })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvexityReport {
    /// Union of the mapped pieces equals its convex hull, after every step.
    pub convex: bool,
    pub per_step: Vec<bool>,
}

/// Image of a polytope under a PL map, computed by splitting along each bending
/// hyperplane. Returns the hull of the image and whether the image is convex.
pub fn apply_pl_to_polytope(map: &PLMap, p: &Polytope) -> Result<(Polytope, ConvexityReport)> {
    let mut pieces = vec![p.clone()];
    let mut per_step = Vec::new();
    for step in &map.steps {
        match step {
            PLStep::Linear(m) => {
                pieces = pieces
                    .iter()
                    .map(|q| q.affine_image(m, &vec![Rat::zero(); m.rows()]))
                    .collect::<Result<_>>()?;
                per_step.push(pieces.len() == 1);
            }
            PLStep::Elementary(e) => {
                let up = Halfspace::new(e.ell.clone(), Rat::zero());
                let down = Halfspace::new(lattice::neg(&e.ell), Rat::zero());
                let lin = e.positive_part();
                let zero = vec![Rat::zero(); p.dim()];
                let single = pieces.len() == 1;
                let mut next = Vec::new();
                let mut halves = Vec::new();
                for q in &pieces {
                    let plus = q.intersect(std::slice::from_ref(&up), &[])?;
                    let minus = q.intersect(std::slice::from_ref(&down), &[])?;
                    let plus_img = plus.affine_image(&lin, &zero)?;
                    halves.push((plus_img.clone(), minus.clone()));
                    next.extend([plus_img, minus].into_iter().filter(|x| !x.is_empty()));
                }
                let all: Vec<RatVec> = next.iter().flat_map(|x| x.vertices().to_vec()).collect();
                let hull = Polytope::hull(&all)?;
                let convex = if single {
                    let (a, b) = &halves[0];
                    if a.is_empty() || b.is_empty() {
                        true
                    } else {
                        hull.intersect(std::slice::from_ref(&up), &[])?
                            .is_subset_of(a)
                            && hull
                                .intersect(std::slice::from_ref(&down), &[])?
                                .is_subset_of(b)
                    }
                } else {
                    false
                };
                per_step.push(convex);
                pieces = if convex { vec![hull] } else { next };
            }
        }
    }
    let all: Vec<RatVec> = pieces.iter().flat_map(|x| x.vertices().to_vec()).collect();
    let hull = if all.is_empty() {
        Polytope::empty(p.dim())
    } else {
        Polytope::hull(&all)?
    };
    let convex = per_step.iter().all(|&b| b);
    Ok((hull, ConvexityReport { convex, per_step }))
}

/// Evaluate a PL function at an integer point.
pub fn evaluate_int(f: &PLFunction, x: &[Int]) -> Rat {
    f.evaluate(&to_rat(x))
}
