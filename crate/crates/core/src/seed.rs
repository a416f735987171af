//! Fixed data, seeds and mutation, principal coefficients, Langlands duals and
//! cluster ensemble lattice maps.

use std::sync::Arc;

use num::{Integer, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{rat, rat_of, to_int, Int, IntMat, IntVec, Matrix, Rat, RatMat};

/// Index set with frozen/unfrozen split, skew form `{.,.}` on the initial basis of
/// `N` (entries `lambda[i][j] = {e_i, e_j}`), and multipliers `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedData {
    n: usize,
    unfrozen: Vec<usize>,
    lambda: RatMat,
    d: Vec<i64>,
}

impl FixedData {
    pub fn new(n: usize, mut unfrozen: Vec<usize>, lambda: RatMat, d: Vec<i64>) -> Result<Self> {
        if lambda.rows() != n || lambda.cols() != n || d.len() != n {
            return Err(Error::Invalid("dimension mismatch in fixed data".into()));
        }
        unfrozen.sort_unstable();
        unfrozen.dedup();
        if unfrozen.iter().any(|&i| i >= n) {
            return Err(Error::Invalid("unfrozen index out of range".into()));
        }
        if d.iter().any(|&x| x <= 0) {
            return Err(Error::Invalid("multipliers must be positive".into()));
        }
        if n > 0 && d.iter().fold(0i64, |g, &x| g.gcd(&x)) != 1 {
            return Err(Error::Invalid("multipliers must have gcd 1".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if *lambda.get(i, j) != -lambda.get(j, i).clone() {
                    return Err(Error::Invalid("skew form is not skew-symmetric".into()));
                }
            }
        }
        let fd = FixedData {
            n,
            unfrozen,
            lambda,
            d,
        };
        let eps = fd.eps();
        for i in 0..n {
            for j in 0..n {
                if (fd.is_unfrozen(i) || fd.is_unfrozen(j)) && !eps.get(i, j).is_integer() {
                    return Err(Error::Invalid(format!(
                        "exchange entry ({i},{j}) is not integral"
                    )));
                }
            }
        }
        Ok(fd)
    }

    /// Fixed data from an exchange matrix `eps[i][j] = {e_i, d_j e_j}`.
    pub fn from_exchange(eps: &IntMat, d: &[i64], unfrozen: &[usize]) -> Result<Self> {
        Self::from_exchange_rat(&eps.to_rat(), d, unfrozen)
    }

    pub fn from_exchange_rat(eps: &RatMat, d: &[i64], unfrozen: &[usize]) -> Result<Self> {
        let n = eps.rows();
        if d.len() != n {
            return Err(Error::Invalid("dimension mismatch in fixed data".into()));
        }
        let mut lambda = RatMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                lambda.set(i, j, eps.get(i, j) / rat(d[j], 1));
            }
        }
        Self::new(n, unfrozen.to_vec(), lambda, d.to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn unfrozen(&self) -> &[usize] {
        &self.unfrozen
    }

    pub fn frozen(&self) -> Vec<usize> {
        (0..self.n).filter(|i| !self.is_unfrozen(*i)).collect()
    }

    pub fn is_unfrozen(&self, i: usize) -> bool {
        self.unfrozen.binary_search(&i).is_ok()
    }

    pub fn lambda(&self) -> &RatMat {
        &self.lambda
    }

    pub fn d(&self) -> &[i64] {
        &self.d
    }

    /// `eps[i][j] = {e_i, d_j e_j}`.
    pub fn eps(&self) -> RatMat {
        let mut e = self.lambda.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                e.set(i, j, self.lambda.get(i, j) * rat(self.d[j], 1));
            }
        }
        e
    }

    /// The exchange matrix when all of it is integral.
    pub fn eps_int(&self) -> Option<IntMat> {
        self.eps().to_int()
    }

    /// `<n, m>` for `n` in initial `e`-coordinates and `m` in initial `f`-coordinates.
    pub fn pairing(&self, n: &[Int], m: &[Int]) -> Rat {
        let mut s = Rat::zero();
        for i in 0..self.n {
            if !n[i].is_zero() && !m[i].is_zero() {
                s += Rat::new(&n[i] * &m[i], Int::from(self.d[i]));
            }
        }
        s
    }

    /// `{n1, n2}` in initial `e`-coordinates.
    pub fn skew(&self, n1: &[Int], n2: &[Int]) -> Rat {
        let mut s = Rat::zero();
        for i in 0..self.n {
            if n1[i].is_zero() {
                continue;
            }
            for j in 0..self.n {
                if !n2[j].is_zero() {
                    s += self.lambda.get(i, j) * rat_of(&(&n1[i] * &n2[j]));
                }
            }
        }
        s
    }
}

/// A seed addressed by a reduced mutation word from the initial seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    fixed: Arc<FixedData>,
    word: Vec<usize>,
    basis: IntMat,
    eps: RatMat,
}

fn eps_from_basis(fd: &FixedData, basis: &IntMat) -> RatMat {
    let e = basis.to_rat();
    let mut m = e.mul(fd.lambda()).mul(&e.transpose());
    for i in 0..fd.n() {
        for j in 0..fd.n() {
            let v = m.get(i, j) * rat(fd.d()[j], 1);
            m.set(i, j, v);
        }
    }
    m
}

fn pos(x: &Rat) -> Rat {
    if x.is_positive() {
        x.clone()
    } else {
        Rat::zero()
    }
}

impl Seed {
    pub fn initial(fd: FixedData) -> Self {
        Self::initial_shared(Arc::new(fd))
    }

    pub fn initial_shared(fd: Arc<FixedData>) -> Self {
        let basis = IntMat::identity(fd.n());
        let eps = fd.eps();
        Seed {
            fixed: fd,
            word: Vec::new(),
            basis,
            eps,
        }
    }

    /// The seed reached from the initial seed of `fd` by mutating along `word`.
    pub fn from_word(fd: Arc<FixedData>, word: &[usize]) -> Result<Self> {
        word.iter()
            .try_fold(Self::initial_shared(fd), |s, &k| s.mutate(k))
    }

    pub fn fixed(&self) -> &FixedData {
        &self.fixed
    }

    pub fn fixed_arc(&self) -> &Arc<FixedData> {
        &self.fixed
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    /// Rows are `e_{i;s}` in initial coordinates.
    pub fn basis(&self) -> &IntMat {
        &self.basis
    }

    pub fn eps(&self) -> &RatMat {
        &self.eps
    }

    pub fn n(&self) -> usize {
        self.fixed.n()
    }

    /// Mutation at `k`. If the word already ends in `k` this steps back to the parent
    /// seed, so the word stays reduced and mutating twice is the identity.
    pub fn mutate(&self, k: usize) -> Result<Seed> {
        if k >= self.n() {
            return Err(Error::Invalid(format!("index {k} out of range")));
        }
        if !self.fixed.is_unfrozen(k) {
            return Err(Error::FrozenIndex(k));
        }
        let n = self.n();
        let backtrack = self.word.last() == Some(&k);
        let mut basis = self.basis.clone();
        let ek = self.basis.row(k);
        for i in 0..n {
            if i == k {
                continue;
            }
            let c = if backtrack {
                pos(&-self.eps.get(i, k).clone())
            } else {
                pos(self.eps.get(i, k))
            };
            let c = c.to_integer();
            if c.is_zero() {
                continue;
            }
            for j in 0..n {
                let v = basis.get(i, j) + &c * &ek[j];
                basis.set(i, j, v);
            }
        }
        for j in 0..n {
            basis.set(k, j, -ek[j].clone());
        }
        let mut word = self.word.clone();
        if backtrack {
            word.pop();
        } else {
            word.push(k);
        }
        let eps = eps_from_basis(&self.fixed, &basis);
        Ok(Seed {
            fixed: self.fixed.clone(),
            word,
            basis,
            eps,
        })
    }

    pub fn mutate_word(&self, word: &[usize]) -> Result<Seed> {
        word.iter().try_fold(self.clone(), |s, &k| s.mutate(k))
    }

    /// `e_{i;s}` in initial `e`-coordinates.
    pub fn e(&self, i: usize) -> IntVec {
        self.basis.row(i)
    }

    /// Rows are `f_{i;s}` in initial `f`-coordinates (the basis of `M°` dual to `d_i e_{i;s}`).
    pub fn f_basis(&self) -> IntMat {
        let n = self.n();
        let d = self.fixed.d();
        let mut e0 = RatMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                e0.set(i, j, rat_of(self.basis.get(i, j)) * rat(d[i], d[j]));
            }
        }
        e0.inverse()
            .expect("seed basis is unimodular")
            .transpose()
            .to_int()
            .expect("dual basis is integral")
    }

    /// `v_{k;s} = {e_{k;s}, .}` in initial `f`-coordinates.
    pub fn v(&self, k: usize) -> IntVec {
        let d = self.fixed.d();
        let row = self
            .fixed
            .lambda()
            .vec_mul(&crate::lattice::to_rat(&self.e(k)));
        let out: Vec<Rat> = row
            .iter()
            .enumerate()
            .map(|(j, x)| x * rat(d[j], 1))
            .collect();
        to_int(&out).expect("v_k is integral for unfrozen k")
    }

    /// `<d_k e_{k;s}, m>` for `m` in initial `f`-coordinates.
    pub fn pair_dk_ek(&self, k: usize, m: &[Int]) -> Int {
        let val = self.fixed.pairing(&self.e(k), m) * rat(self.fixed.d()[k], 1);
        debug_assert!(val.is_integer());
        val.to_integer()
    }

    /// Seed `f`-coordinates to initial `f`-coordinates.
    pub fn m_to_initial(&self, a: &[Int]) -> IntVec {
        self.f_basis().vec_mul(a)
    }

    /// Initial `f`-coordinates to seed `f`-coordinates.
    pub fn m_from_initial(&self, m: &[Int]) -> IntVec {
        (0..self.n()).map(|i| self.pair_dk_ek(i, m)).collect()
    }

    /// Seed `e`-coordinates to initial `e`-coordinates.
    pub fn n_to_initial(&self, b: &[Int]) -> IntVec {
        self.basis.vec_mul(b)
    }

    /// Initial `e`-coordinates to seed `e`-coordinates.
    pub fn n_from_initial(&self, n: &[Int]) -> IntVec {
        self.n_from_initial_matrix().vec_mul(n)
    }

    /// Matrix `C` with `b = n^T C` converting initial `e`-coordinates to seed ones.
    pub fn n_from_initial_matrix(&self) -> IntMat {
        self.basis
            .to_rat()
            .inverse()
            .expect("seed basis is unimodular")
            .to_int()
            .expect("unimodular inverse")
    }

    /// Columns `p*_1(e_{k;s})` for unfrozen `k`, in this seed's `f`-coordinates.
    pub fn pstar_uf(&self) -> IntMat {
        let cols: Vec<IntVec> = self
            .fixed
            .unfrozen()
            .iter()
            .map(|&k| to_int(&self.eps.row(k)).expect("unfrozen rows are integral"))
            .collect();
        IntMat::from_cols(self.n(), &cols).expect("consistent columns")
    }
}

/// The standard matrix-mutation rule.
pub fn matrix_mutation(eps: &RatMat, k: usize) -> RatMat {
    let n = eps.rows();
    let mut out = eps.clone();
    for i in 0..n {
        for j in 0..n {
            let e = eps.get(i, j);
            let v = if i == k || j == k {
                -e.clone()
            } else {
                let a = eps.get(i, k);
                let b = eps.get(k, j);
                if (a * b).is_positive() {
                    e + a.abs() * b
                } else {
                    e.clone()
                }
            };
            out.set(i, j, v);
        }
    }
    out
}

/// `true` iff `{e_k, n} >= 0` for all unfrozen `k`, with `point` in the `N°`
/// coordinates of `s` (coefficients on `d_i e_{i;s}`).
pub fn optimized_check(s: &Seed, point: &[Int]) -> bool {
    s.fixed().unfrozen().iter().all(|&k| {
        let v = (0..s.n()).fold(Rat::zero(), |acc, i| {
            acc + s.eps().get(k, i) * rat_of(&point[i])
        });
        !v.is_negative()
    })
}

/// Principal-coefficient fixed data on `N ⊕ M°`.
pub fn build_principal(fd: &FixedData) -> FixedData {
    let n = fd.n();
    let mut lam = RatMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            lam.set(i, j, fd.lambda().get(i, j).clone());
        }
        lam.set(i, n + i, rat(1, fd.d()[i]));
        lam.set(n + i, i, rat(-1, fd.d()[i]));
    }
    let mut d = fd.d().to_vec();
    d.extend_from_slice(fd.d());
    FixedData::new(2 * n, fd.unfrozen().to_vec(), lam, d).expect("principal data is valid")
}

/// Langlands dual fixed data.
pub fn langlands_dual(fd: &FixedData) -> FixedData {
    let n = fd.n();
    let l = fd.d().iter().fold(1i64, |a, &b| a.lcm(&b));
    let mut lam = RatMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            lam.set(i, j, fd.lambda().get(i, j) * rat(fd.d()[i] * fd.d()[j], l));
        }
    }
    let d = fd.d().iter().map(|&x| l / x).collect();
    FixedData::new(n, fd.unfrozen().to_vec(), lam, d).expect("dual data is valid")
}

/// Matrix of `p*: N -> M°` in the initial bases, with kernel data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleMap {
    /// Column `j` is `p*(e_j)` in `f`-coordinates.
    pub b: IntMat,
    /// Basis of `K = ker(p*_2)`, each vector primitive.
    pub kernel: Vec<IntVec>,
    pub unfrozen: Vec<usize>,
}

impl EnsembleMap {
    pub fn apply(&self, n: &[Int]) -> IntVec {
        self.b.mul_vec(n)
    }

    pub fn pstar_uf(&self) -> IntMat {
        let rows: Vec<usize> = (0..self.b.rows()).collect();
        self.b.select(&rows, &self.unfrozen)
    }

    /// `B - eps^T` vanishes outside the frozen×frozen block.
    pub fn block_identity_holds(&self, fd: &FixedData) -> bool {
        let eps = fd.eps();
        (0..fd.n()).all(|i| {
            (0..fd.n()).all(|j| {
                (!fd.is_unfrozen(i) && !fd.is_unfrozen(j))
                    || rat_of(self.b.get(i, j)) == *eps.get(j, i)
            })
        })
    }
}

/// Assemble `p*` with the given frozen×frozen block (rows and columns ordered by frozen index).
pub fn ensemble_map(fd: &FixedData, frozen_block: &IntMat) -> Result<EnsembleMap> {
    let frozen = fd.frozen();
    if frozen_block.rows() != frozen.len() || frozen_block.cols() != frozen.len() {
        return Err(Error::Invalid("frozen block has wrong dimensions".into()));
    }
    let n = fd.n();
    let eps = fd.eps();
    let mut b = IntMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if fd.is_unfrozen(i) || fd.is_unfrozen(j) {
                b.set(i, j, eps.get(j, i).to_integer());
            }
        }
    }
    for (a, &i) in frozen.iter().enumerate() {
        for (c, &j) in frozen.iter().enumerate() {
            b.set(i, j, frozen_block.get(a, c).clone());
        }
    }
    Ok(EnsembleMap {
        b,
        kernel: pairing_kernel(fd),
        unfrozen: fd.unfrozen().to_vec(),
    })
}

/// Basis of `{k in N : {k, n} = 0 for all n in N_uf°}`.
pub fn pairing_kernel(fd: &FixedData) -> Vec<IntVec> {
    let eps = fd.eps();
    let rows: Vec<usize> = (0..fd.n()).collect();
    let block = eps.select(&rows, fd.unfrozen());
    block
        .transpose()
        .kernel()
        .iter()
        .map(|v| crate::lattice::primitive_of_rat(v))
        .collect()
}

/// The default (zero) frozen×frozen block.
pub fn zero_frozen_block(fd: &FixedData) -> IntMat {
    let k = fd.frozen().len();
    Matrix::zeros(k, k)
}
