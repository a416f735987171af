//! Grassmannian combinatorics on the rectangles seed: Young diagrams of Plücker
//! indices, GT tableaux, hook g-vectors, the map `psi`, and Newton–Okounkov bodies.
//!
//! The grid has `n-k` rows and `k` columns. Vertex 0 is `∅`; the box in row `i`,
//! column `j` (both 1-based) is vertex `1 + (i-1)k + (j-1)`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use itertools::Itertools;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{self, Int, IntMat, IntVec, Rat, RatVec};
use crate::laurent::{is_pointed, transport, Flavor, LaurentPolynomial};
use crate::polytope::{lattice_points, verify_unimodular, AffineSubspace, Halfspace, Polytope};
use crate::scattering::{complete_rank2, theta_on_x, ScatteringDiagram};
use crate::seed::{build_principal, ensemble_map, EnsembleMap, FixedData, Seed};
use crate::tropical::{tropicalize, Convention, ElementaryPL, PLFunction, PLMap};

pub const EMPTY: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrData {
    pub k: usize,
    pub n: usize,
}

impl GrData {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::BadParams(format!(
                "need 0 < k < n, got k={k}, n={n}"
            )));
        }
        Ok(GrData { k, n })
    }

    pub fn rows(&self) -> usize {
        self.n - self.k
    }

    pub fn cols(&self) -> usize {
        self.k
    }

    /// Number of vertices including `∅`.
    pub fn dim(&self) -> usize {
        self.rows() * self.cols() + 1
    }

    pub fn vertex(&self, i: usize, j: usize) -> usize {
        1 + (i - 1) * self.k + (j - 1)
    }

    /// `(i, j)` of a box vertex, `None` for `∅`.
    pub fn box_of(&self, v: usize) -> Option<(usize, usize)> {
        (v != EMPTY).then(|| ((v - 1) / self.k + 1, (v - 1) % self.k + 1))
    }

    /// Basis index of `f_{i×j}` with `f_{0×0} = f_∅` and `f_{0×j} = f_{i×0} = 0`
    /// otherwise; `None` also for boxes outside the grid.
    fn f(&self, i: isize, j: isize) -> Option<usize> {
        if i == 0 && j == 0 {
            return Some(EMPTY);
        }
        if i < 1 || j < 1 || i as usize > self.rows() || j as usize > self.k {
            return None;
        }
        Some(self.vertex(i as usize, j as usize))
    }

    pub fn is_frozen(&self, v: usize) -> bool {
        match self.box_of(v) {
            None => true,
            Some((i, j)) => i == self.rows() || j == self.k,
        }
    }

    pub fn unfrozen(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&v| !self.is_frozen(v)).collect()
    }

    pub fn frozen(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&v| self.is_frozen(v)).collect()
    }

    pub fn vertex_name(&self, v: usize) -> String {
        match self.box_of(v) {
            None => "0".into(),
            Some((i, j)) => format!("{i}x{j}"),
        }
    }

    pub fn all_indices(&self) -> Vec<PlueckerIndex> {
        (1..=self.n)
            .combinations(self.rows())
            .map(PlueckerIndex)
            .collect()
    }
}

/// Exchange matrix of the rectangles quiver: east, south and north-west diagonal
/// arrows among boxes, plus `∅ -> 1×1`. Arrows between two frozen vertices are
/// carried by the frozen block of `psi` instead.
pub fn exchange_matrix(gr: &GrData) -> IntMat {
    let dim = gr.dim();
    let mut eps = IntMat::zeros(dim, dim);
    let mut arrow = |a: usize, b: usize| {
        if gr.is_frozen(a) && gr.is_frozen(b) {
            return;
        }
        let x = eps.get(a, b) + Int::one();
        eps.set(a, b, x.clone());
        eps.set(b, a, -x);
    };
    for i in 1..=gr.rows() {
        for j in 1..=gr.k {
            let v = gr.vertex(i, j);
            if j < gr.k {
                arrow(v, gr.vertex(i, j + 1));
            }
            if i < gr.rows() {
                arrow(v, gr.vertex(i + 1, j));
            }
            if i < gr.rows() && j < gr.k {
                arrow(gr.vertex(i + 1, j + 1), v);
            }
        }
    }
    arrow(EMPTY, gr.vertex(1, 1));
    eps
}

/// Columns are `psi(e_v)` in the `f`-basis.
pub fn psi_matrix(gr: &GrData) -> IntMat {
    let dim = gr.dim();
    let mut m = IntMat::zeros(dim, dim);
    let mut put = |col: usize, terms: &[((isize, isize), i64)]| {
        for &((i, j), c) in terms {
            if let Some(r) = gr.f(i, j) {
                let x = m.get(r, col) + Int::from(c);
                m.set(r, col, x);
            }
        }
    };
    for v in 1..dim {
        let (i, j) = gr.box_of(v).unwrap();
        let (i, j) = (i as isize, j as isize);
        // the arrow ∅ -> 1×1 fixes the sign of the f_∅ term, also when 1×1 is frozen
        let nw = if i == 1 && j == 1 { -1 } else { 1 };
        if gr.is_frozen(v) {
            put(
                v,
                &[
                    ((i, j), 1),
                    ((i - 1, j), -1),
                    ((i - 1, j - 1), nw),
                    ((i, j - 1), -1),
                ],
            );
        } else {
            put(
                v,
                &[
                    ((i - 1, j - 1), nw),
                    ((i - 1, j), -1),
                    ((i, j + 1), 1),
                    ((i + 1, j + 1), -1),
                    ((i + 1, j), 1),
                    ((i, j - 1), -1),
                ],
            );
        }
    }
    let (r, k) = (gr.rows() as isize, gr.k as isize);
    put(
        EMPTY,
        &[((0, 0), 1), ((1, k), -1), ((1, 1), 1), ((r, 1), -1)],
    );
    m
}

fn frozen_block(gr: &GrData, m: &IntMat) -> IntMat {
    let fr = gr.frozen();
    m.select(&fr, &fr)
}

/// Fixed data, initial seed and ensemble map `psi` of the rectangles seed. With
/// `opposite`, the quiver is reversed and the map is `-psi`.
pub fn rectangles_seed(gr: &GrData, opposite: bool) -> Result<(Arc<FixedData>, Seed, EnsembleMap)> {
    let mut eps = exchange_matrix(gr);
    let mut psi = psi_matrix(gr);
    if opposite {
        eps = eps.map(|x| -x);
        psi = psi.map(|x| -x);
    }
    let fd = FixedData::from_exchange(&eps, &vec![1; gr.dim()], &gr.unfrozen())?;
    let p = ensemble_map(&fd, &frozen_block(gr, &psi))?;
    debug_assert_eq!(p.b, psi);
    let fd = Arc::new(fd);
    let s = Seed::initial_shared(fd.clone());
    Ok((fd, s, p))
}

/// Sorted `(n-k)`-subset of `{1..n}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlueckerIndex(pub Vec<usize>);

impl PlueckerIndex {
    pub fn new(gr: &GrData, mut j: Vec<usize>) -> Result<Self> {
        j.sort_unstable();
        let distinct = j.windows(2).all(|w| w[0] < w[1]);
        if j.len() != gr.rows() || !distinct || j.iter().any(|&x| x < 1 || x > gr.n) {
            return Err(Error::BadParams(format!(
                "{j:?} is not a {}-subset of [1, {}]",
                gr.rows(),
                gr.n
            )));
        }
        Ok(PlueckerIndex(j))
    }

    pub fn parse(gr: &GrData, s: &str) -> Result<Self> {
        let parts: std::result::Result<Vec<usize>, _> = s
            .trim_matches(|c| c == '{' || c == '}' || c == '[' || c == ']')
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect();
        let parts = parts.map_err(|_| Error::BadParams(format!("cannot parse index set {s:?}")))?;
        Self::new(gr, parts)
    }
}

impl std::fmt::Display for PlueckerIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(","))
    }
}

/// Row lengths of a diagram inside the `(n-k)×k` rectangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YoungDiagram(pub Vec<usize>);

impl YoungDiagram {
    pub fn contains(&self, i: isize, j: isize) -> bool {
        // everything north or west of the rectangle counts as inside
        i < 1 || j < 1 || self.0.get(i as usize - 1).is_some_and(|&l| j as usize <= l)
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&l| l == 0)
    }
}

/// Path from the north-east corner with south steps at `J`; the diagram lies
/// north-west of it.
pub fn young_from_index(j: &PlueckerIndex, gr: &GrData) -> YoungDiagram {
    let mut col = gr.k;
    let mut rows = Vec::with_capacity(gr.rows());
    for t in 1..=gr.n {
        if j.0.contains(&t) {
            rows.push(col);
        } else {
            col -= 1;
        }
    }
    YoungDiagram(rows)
}

pub fn index_from_young(y: &YoungDiagram, gr: &GrData) -> Result<PlueckerIndex> {
    if y.0.len() != gr.rows()
        || y.0.iter().any(|&l| l > gr.k)
        || y.0.windows(2).any(|w| w[0] < w[1])
    {
        return Err(Error::BadParams(format!(
            "{:?} is not a diagram in the {}x{} rectangle",
            y.0,
            gr.rows(),
            gr.k
        )));
    }
    PlueckerIndex::new(
        gr,
        y.0.iter()
            .enumerate()
            .map(|(r, &l)| gr.k - l + r + 1)
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GTTableau {
    pub entries: Vec<Vec<i64>>,
}

impl GTTableau {
    /// Row-major entries.
    pub fn to_vec(&self) -> IntVec {
        self.entries
            .iter()
            .flatten()
            .map(|&x| Int::from(x))
            .collect()
    }

    /// As an element of `N` in the vertex basis, with zero `∅`-coordinate.
    pub fn to_n_vector(&self) -> IntVec {
        let mut v = vec![Int::zero()];
        v.extend(self.to_vec());
        v
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.entries.iter().map(|r| r[j - 1]).collect()
    }
}

/// Box `(r, c)` gets the least `i >= 0` such that `(r-i, c-i)` lies in the diagram,
/// i.e. the index of the strip between consecutive south-east shifts of the path.
pub fn gt_valuation(j: &PlueckerIndex, gr: &GrData) -> GTTableau {
    let y = young_from_index(j, gr);
    let entries = (1..=gr.rows() as isize)
        .map(|r| {
            (1..=gr.k as isize)
                .map(|c| (0..).find(|&i| y.contains(r - i, c - i)).unwrap() as i64)
                .collect()
        })
        .collect();
    GTTableau { entries }
}

/// `sum_p f_{i_p×j_p} - f_{i_p×j_{p+1}}` over the corners of the diagram; `f_∅` for
/// the empty diagram.
pub fn hook_g_vector(j: &PlueckerIndex, gr: &GrData) -> IntVec {
    let y = young_from_index(j, gr);
    let mut g = vec![Int::zero(); gr.dim()];
    if y.is_empty() {
        g[EMPTY] = Int::one();
        return g;
    }
    let lam = &y.0;
    for i in 1..=gr.rows() {
        let here = lam[i - 1];
        let next = lam.get(i).copied().unwrap_or(0);
        if here > next {
            g[gr.vertex(i, here)] += 1;
            if next > 0 {
                g[gr.vertex(i, next)] -= 1;
            }
        }
    }
    g
}

/// `hook_g_vector(J) - f_{(n-k)×k}`.
pub fn homogenized_g(j: &PlueckerIndex, gr: &GrData) -> IntVec {
    let mut g = hook_g_vector(j, gr);
    g[gr.vertex(gr.rows(), gr.k)] -= 1;
    g
}

/// `-psi` applied to a tableau viewed in `N` with zero `∅`-coordinate.
pub fn minus_psi_of(gr: &GrData, t: &GTTableau) -> IntVec {
    lattice::neg(&psi_matrix(gr).mul_vec(&t.to_n_vector()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValGvEntry {
    pub index: PlueckerIndex,
    pub lhs: IntVec,
    pub rhs: IntVec,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValGvReport {
    pub gr: GrData,
    pub entries: Vec<ValGvEntry>,
}

impl ValGvReport {
    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.pass).count()
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.entries.len()
    }
}

pub fn check_val_gv(gr: &GrData, indices: &[PlueckerIndex]) -> ValGvReport {
    let psi = psi_matrix(gr);
    let entries = indices
        .iter()
        .map(|j| {
            let lhs = lattice::neg(&psi.mul_vec(&gt_valuation(j, gr).to_n_vector()));
            let rhs = homogenized_g(j, gr);
            ValGvEntry {
                index: j.clone(),
                pass: lhs == rhs,
                lhs,
                rhs,
            }
        })
        .collect();
    ValGvReport { gr: *gr, entries }
}

/// `-psi(gt_valuation(J)) = homogenized_g(J)` for every `J`.
pub fn verify_val_gv(gr: &GrData) -> ValGvReport {
    check_val_gv(gr, &gr.all_indices())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Flow,
    GVec,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flow" => Ok(Side::Flow),
            "gvec" => Ok(Side::GVec),
            _ => Err(Error::BadParams(format!(
                "side must be flow or gvec, got {s:?}"
            ))),
        }
    }
}

/// Hull of the tableaux (flow side, in `Z^{(n-k)k}`) or of the homogenized
/// g-vectors (g side, in the full vertex lattice).
pub fn no_body(gr: &GrData, side: Side) -> Result<Polytope> {
    let pts: Vec<RatVec> = gr
        .all_indices()
        .iter()
        .map(|j| match side {
            Side::Flow => lattice::to_rat(&gt_valuation(j, gr).to_vec()),
            Side::GVec => lattice::to_rat(&homogenized_g(j, gr)),
        })
        .collect();
    Polytope::hull(&pts)
}

/// `-psi` restricted to representatives with zero `∅`-coordinate and composed with
/// dropping the `∅`-coordinate of `K^⊥`; a square matrix on `Z^{(n-k)k}`.
pub fn reduced_minus_psi(gr: &GrData) -> IntMat {
    let boxes: Vec<usize> = (1..gr.dim()).collect();
    psi_matrix(gr).select(&boxes, &boxes).map(|x| -x)
}

/// The two bodies are unimodularly equivalent through the reduced `-psi`, and the
/// `∅`-coordinate of the g side is determined by the degree-zero condition.
pub fn bodies_equivalent(gr: &GrData) -> Result<bool> {
    let flow = no_body(gr, Side::Flow)?;
    let gvec = no_body(gr, Side::GVec)?;
    let boxes: Vec<RatVec> = gvec.vertices().iter().map(|v| v[1..].to_vec()).collect();
    let projected = Polytope::hull(&boxes)?;
    let degree_zero = gvec
        .vertices()
        .iter()
        .all(|v| v.iter().sum::<Rat>().is_zero());
    let u = reduced_minus_psi(gr);
    Ok(degree_zero && verify_unimodular(&flow, &projected, &u, &vec![Int::zero(); u.rows()]))
}

/// Cluster variables reached by mutation words of length at most `depth` from the
/// rectangles seed of the opposite quiver, with g-vectors read off their Laurent
/// expansions in the initial chart.
pub fn cluster_bfs_g_vectors(
    gr: &GrData,
    depth: usize,
) -> Result<BTreeMap<Vec<usize>, Vec<(usize, IntVec)>>> {
    let (fd, s0, _) = rectangles_seed(gr, true)?;
    let uf = fd.unfrozen().to_vec();
    let mut out = BTreeMap::new();
    let mut frontier = vec![s0.clone()];
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for level in 0..=depth {
        let mut next = Vec::new();
        for s in frontier {
            if !seen.insert(s.word().to_vec()) {
                continue;
            }
            let mut vars = Vec::with_capacity(gr.dim());
            for v in 0..gr.dim() {
                let mono = LaurentPolynomial::monomial(lattice::unit(gr.dim(), v), Rat::one());
                let f = transport(&mono, &s, &s0, Flavor::A)?;
                let g = is_pointed(&f, &s0)?.ok_or_else(|| {
                    Error::Inconsistent(format!(
                        "cluster variable {v} at {:?} is not pointed",
                        s.word()
                    ))
                })?;
                vars.push((v, g));
            }
            out.insert(s.word().to_vec(), vars);
            if level < depth {
                for &k in &uf {
                    if s.word().last() != Some(&k) {
                        next.push(s.mutate(k)?);
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsMatch {
    /// Plücker indices whose hook g-vector was found among the cluster variables.
    pub matched: Vec<PlueckerIndex>,
    /// Distinct g-vectors found.
    pub distinct: usize,
    pub unmatched: Vec<IntVec>,
}

/// Match the cluster variables found by mutation against the hook table by g-vector.
pub fn match_bfs_with_hooks(gr: &GrData, depth: usize) -> Result<BfsMatch> {
    let table: BTreeMap<IntVec, PlueckerIndex> = gr
        .all_indices()
        .into_iter()
        .map(|j| (hook_g_vector(&j, gr), j))
        .collect();
    let found: BTreeSet<IntVec> = cluster_bfs_g_vectors(gr, depth)?
        .into_values()
        .flatten()
        .map(|(_, g)| g)
        .collect();
    let mut matched = Vec::new();
    let mut unmatched = Vec::new();
    for g in &found {
        match table.get(g) {
            Some(j) => matched.push(j.clone()),
            None => unmatched.push(g.clone()),
        }
    }
    matched.sort();
    Ok(BfsMatch {
        matched,
        distinct: found.len(),
        unmatched,
    })
}

/// Tropical mutation at `k` of g-vectors for the opposite quiver:
/// `m -> m + [m_k]_+ v_k` with `v_k = -psi(e_k)`.
pub fn g_mutation_map(gr: &GrData, k: usize) -> Result<PLMap> {
    if gr.is_frozen(k) {
        return Err(Error::FrozenIndex(k));
    }
    let v = lattice::neg(&psi_matrix(gr).col(k));
    Ok(PLMap::elementary(ElementaryPL {
        ell: lattice::to_rat(&lattice::unit(gr.dim(), k)),
        w: lattice::to_rat(&v),
    }))
}

/// Boundary data for the opposite quiver: `θ^X_{e_i}` for each frozen `i` on its
/// dual side, which carries the original orientation and `psi`; computed on the
/// principal-coefficient diagram.
pub fn frozen_thetas(gr: &GrData, degree_bound: usize) -> Result<Vec<(usize, LaurentPolynomial)>> {
    let (fd, _, p) = rectangles_seed(gr, false)?;
    let prin = build_principal(&fd);
    let diagram = complete_rank2(&ScatteringDiagram::initial(&prin)?, degree_bound)?;
    gr.frozen()
        .into_iter()
        .map(|i| {
            let (x, t) = theta_on_x(&diagram, &p, &lattice::unit(gr.dim(), i), degree_bound)?;
            if !t.exact {
                return Err(Error::Truncated(degree_bound));
            }
            Ok((i, x))
        })
        .collect()
}

/// Tropicalized boundary functions, minimum convention.
pub fn superpotential_pieces(gr: &GrData, degree_bound: usize) -> Result<Vec<PLFunction>> {
    frozen_thetas(gr, degree_bound)?
        .iter()
        .map(|(_, f)| tropicalize(f, Convention::Lower))
        .collect()
}

/// `{m : Trop(W)(m) >= 0, sum(m) = degree}`.
pub fn superpotential_slice(gr: &GrData, degree: i64, degree_bound: usize) -> Result<Polytope> {
    let pieces = superpotential_pieces(gr, degree_bound)?;
    let cone = crate::polytope::superpotential_cone(&pieces, &vec![Rat::zero(); pieces.len()])?;
    let ones = vec![Rat::one(); gr.dim()];
    let fiber = AffineSubspace {
        dim: gr.dim(),
        equations: vec![Halfspace::new(ones, Rat::from_integer(degree.into()))],
    };
    crate::polytope::slice(&cone, &fiber)
}

/// Hull of the (unhomogenized) hook g-vectors.
pub fn hook_polytope(gr: &GrData) -> Result<Polytope> {
    let pts: Vec<RatVec> = gr
        .all_indices()
        .iter()
        .map(|j| lattice::to_rat(&hook_g_vector(j, gr)))
        .collect();
    Polytope::hull(&pts)
}

/// Number of lattice points of a slice, as a convenience for reports.
pub fn slice_point_count(gr: &GrData, degree: i64, degree_bound: usize) -> Result<usize> {
    Ok(lattice_points(&superpotential_slice(gr, degree, degree_bound)?).len())
}

/// `dim H^0(Gr, O(d))`: semistandard tableaux of rectangular shape `d^{n-k}` with
/// entries at most `n`, by the hook-content formula.
pub fn plucker_degree_dimension(gr: &GrData, d: usize) -> Int {
    let rows = gr.rows();
    let mut num = Int::one();
    let mut den = Int::one();
    for i in 0..rows {
        for j in 0..d {
            let content = j as i64 - i as i64;
            let hook = (d - j - 1) + (rows - i - 1) + 1;
            num *= Int::from(gr.n as i64 + content);
            den *= Int::from(hook);
        }
    }
    let q = &num / &den;
    debug_assert!((&q * &den - &num).is_zero());
    debug_assert!(!q.is_negative());
    q
}
