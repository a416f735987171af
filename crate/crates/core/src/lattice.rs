//! Exact integer/rational vectors and matrices, and the orders used by valuations.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;
pub type IntVec = Vec<Int>;
pub type RatVec = Vec<Rat>;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(n.into(), d.into())
}

pub fn rat_of(v: &Int) -> Rat {
    BigRational::from_integer(v.clone())
}

pub fn ivec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| int(x)).collect()
}

pub fn rvec(v: &[i64]) -> RatVec {
    v.iter().map(|&x| rat(x, 1)).collect()
}

pub fn to_rat(v: &[Int]) -> RatVec {
    v.iter().map(rat_of).collect()
}

/// `Some` iff every entry is integral.
pub fn to_int(v: &[Rat]) -> Option<IntVec> {
    v.iter()
        .map(|x| {
            if x.is_integer() {
                Some(x.to_integer())
            } else {
                None
            }
        })
        .collect()
}

pub fn to_i64(v: &[Int]) -> Option<Vec<i64>> {
    v.iter().map(|x| x.to_i64()).collect()
}

pub fn dot<T>(a: &[T], b: &[T]) -> T
where
    T: Clone + Zero + for<'a> std::ops::Mul<&'a T, Output = T>,
{
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y)
}

pub fn dot_ri(a: &[Rat], b: &[Int]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut s = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !y.is_zero() {
            s += x * rat_of(y);
        }
    }
    s
}

pub fn add<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Clone + for<'a> std::ops::Add<&'a T, Output = T>,
{
    a.iter().zip(b).map(|(x, y)| x.clone() + y).collect()
}

pub fn sub<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Clone + for<'a> std::ops::Sub<&'a T, Output = T>,
{
    a.iter().zip(b).map(|(x, y)| x.clone() - y).collect()
}

pub fn scale<T>(a: &[T], c: &T) -> Vec<T>
where
    T: Clone + for<'a> std::ops::Mul<&'a T, Output = T>,
{
    a.iter().map(|x| x.clone() * c).collect()
}

pub fn neg<T>(a: &[T]) -> Vec<T>
where
    T: Clone + std::ops::Neg<Output = T>,
{
    a.iter().map(|x| -x.clone()).collect()
}

pub fn is_zero<T: Zero>(a: &[T]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn unit(n: usize, i: usize) -> IntVec {
    let mut v = vec![Int::zero(); n];
    v[i] = Int::one();
    v
}

pub fn gcd_all(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |g, x| g.gcd(x))
}

/// Divide by the gcd of the entries (zero stays zero).
pub fn primitive(v: &[Int]) -> IntVec {
    let g = gcd_all(v);
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// The primitive integer vector positively proportional to a rational vector.
pub fn primitive_of_rat(v: &[Rat]) -> IntVec {
    let l = v.iter().fold(Int::one(), |l, x| l.lcm(x.denom()));
    let scaled: IntVec = v.iter().map(|x| (x * rat_of(&l)).to_integer()).collect();
    primitive(&scaled)
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: Int = p.trim().parse().map_err(|_| bad())?;
            let q: Int = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(rat_of(&s.parse::<Int>().map_err(|_| bad())?)),
    }
}

/// `p/q`, or `p` for integers.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn fmt_vec<T: fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMat = Matrix<Int>;
pub type RatMat = Matrix<Rat>;

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Invalid("ragged matrix".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Build from columns; all columns must have length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<T>]) -> Result<Self> {
        if cols.iter().any(|c| c.len() != rows) {
            return Err(Error::Invalid("ragged matrix".into()));
        }
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn row_slice(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn map<U: Clone + Zero>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + One + for<'a> std::ops::Mul<&'a T, Output = T>,
{
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = m.get(i, j).clone() + a.clone() * other.get(k, j);
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    /// `M v`.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows).map(|i| dot(self.row_slice(i), v)).collect()
    }

    /// `v^T M`.
    pub fn vec_mul(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.rows, v.len(), "dimension mismatch");
        let mut out = vec![T::zero(); self.cols];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = o.clone() + x.clone() * self.get(i, j);
            }
        }
        out
    }
}

impl IntMat {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| ivec(r)).collect()).expect("consistent rows")
    }

    pub fn to_rat(&self) -> RatMat {
        self.map(rat_of)
    }

    pub fn rank(&self) -> usize {
        self.to_rat().rank()
    }

    pub fn det(&self) -> Int {
        self.to_rat().det().to_integer()
    }

    /// Basis of the rational right kernel, each scaled to a primitive integer vector.
    pub fn kernel(&self) -> Vec<IntVec> {
        self.to_rat()
            .kernel()
            .iter()
            .map(|v| primitive_of_rat(v))
            .collect()
    }

    /// Basis of `{x : x^T M = 0}`.
    pub fn left_kernel(&self) -> Vec<IntVec> {
        self.transpose().kernel()
    }
}

impl RatMat {
    pub fn to_int(&self) -> Option<IntMat> {
        let data = to_int(&self.data)?;
        Some(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (RatMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).recip();
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn kernel(&self) -> Vec<RatVec> {
        let (m, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.cols];
                v[f] = Rat::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m.get(r, f).clone();
                }
                v
            })
            .collect()
    }

    /// Some solution of `M x = b`, if one exists.
    pub fn solve(&self, b: &[Rat]) -> Option<RatVec> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (m, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = m.get(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<RatMat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rat::one());
        }
        let (m, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(m.select(&(0..n).collect::<Vec<_>>(), &(n..2 * n).collect::<Vec<_>>()))
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c) / &piv;
                for j in c..n {
                    let v = m.get(i, j) - &f * m.get(c, j);
                    m.set(i, j, v);
                }
            }
        }
        det
    }
}

/// Outcome of comparing two elements under a partial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum PartialCmp {
    Less,
    Equal,
    Greater,
    Incomparable,
}

/// Exact solver for `P n = m` with `P` of full column rank.
#[derive(Debug, Clone)]
pub struct Dominance {
    p: IntMat,
    left_inv: RatMat,
}

impl Dominance {
    pub fn new(pstar_cols: &IntMat) -> Result<Self> {
        let p = pstar_cols.to_rat();
        if p.rank() < p.cols() {
            return Err(Error::Rank);
        }
        let pt = p.transpose();
        let gram = pt.mul(&p).inverse().ok_or(Error::Rank)?;
        Ok(Dominance {
            p: pstar_cols.clone(),
            left_inv: gram.mul(&pt),
        })
    }

    pub fn generators(&self) -> &IntMat {
        &self.p
    }

    /// The unique `n` with `P n = diff`, if `diff` lies in the rational span.
    pub fn solve(&self, diff: &[Int]) -> Option<RatVec> {
        let n = self.left_inv.mul_vec(&to_rat(diff));
        (self.p.to_rat().mul_vec(&n) == to_rat(diff)).then_some(n)
    }

    /// `diff = P n` with `n` integral, nonnegative and nonzero.
    pub fn is_positive_combination(&self, diff: &[Int]) -> bool {
        if is_zero(diff) {
            return false;
        }
        match self.solve(diff) {
            Some(n) => n.iter().all(|x| x.is_integer() && !x.is_negative()),
            None => false,
        }
    }

    pub fn compare(&self, m1: &[Int], m2: &[Int]) -> PartialCmp {
        if m1 == m2 {
            PartialCmp::Equal
        } else if self.is_positive_combination(&sub(m2, m1)) {
            PartialCmp::Less
        } else if self.is_positive_combination(&sub(m1, m2)) {
            PartialCmp::Greater
        } else {
            PartialCmp::Incomparable
        }
    }
}

/// `m1` vs `m2` in the dominance order generated by the columns of `pstar_cols_unfrozen`.
pub fn dominance_compare(
    m1: &[Int],
    m2: &[Int],
    pstar_cols_unfrozen: &IntMat,
) -> Result<PartialCmp> {
    Ok(Dominance::new(pstar_cols_unfrozen)?.compare(m1, m2))
}

/// `n1` vs `n2` in the divisibility order: differences are nonnegative and supported on `unfrozen`.
pub fn divisibility_compare(n1: &[Int], n2: &[Int], unfrozen: &[usize]) -> PartialCmp {
    if n1 == n2 {
        return PartialCmp::Equal;
    }
    let d = sub(n2, n1);
    let supported = d
        .iter()
        .enumerate()
        .all(|(i, x)| x.is_zero() || unfrozen.contains(&i));
    if !supported {
        return PartialCmp::Incomparable;
    }
    if d.iter().all(|x| !x.is_negative()) {
        PartialCmp::Less
    } else if d.iter().all(|x| !x.is_positive()) {
        PartialCmp::Greater
    } else {
        PartialCmp::Incomparable
    }
}

/// A linear total order: compare by a weight functional, then lexicographically in
/// the order of `tiebreak`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalOrder {
    pub weights: RatVec,
    pub tiebreak: Vec<usize>,
}

impl TotalOrder {
    pub fn graded_lex(n: usize) -> Self {
        TotalOrder {
            weights: vec![Rat::one(); n],
            tiebreak: (0..n).collect(),
        }
    }

    pub fn new(weights: RatVec, tiebreak: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; weights.len()];
        if tiebreak.len() != weights.len() {
            return Err(Error::Invalid("tiebreak must be a permutation".into()));
        }
        for &i in &tiebreak {
            if i >= seen.len() || seen[i] {
                return Err(Error::Invalid("tiebreak must be a permutation".into()));
            }
            seen[i] = true;
        }
        Ok(TotalOrder { weights, tiebreak })
    }

    /// Graded order whose weight functional takes the value 1 on every dominance
    /// generator, so that dominance-smaller means strictly lower weight.
    pub fn refining(pstar_cols_unfrozen: &IntMat) -> Result<Self> {
        let dom = Dominance::new(pstar_cols_unfrozen)?;
        let l = &dom.left_inv;
        let weights = (0..l.cols())
            .map(|j| (0..l.rows()).fold(Rat::zero(), |s, i| s + l.get(i, j)))
            .collect::<Vec<_>>();
        Ok(TotalOrder {
            tiebreak: (0..weights.len()).collect(),
            weights,
        })
    }

    pub fn compare(&self, a: &[Int], b: &[Int]) -> Ordering {
        let wa = dot_ri(&self.weights, a);
        let wb = dot_ri(&self.weights, b);
        wa.cmp(&wb).then_with(|| {
            for &i in &self.tiebreak {
                match a[i].cmp(&b[i]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }

    pub fn descriptor(&self) -> String {
        let w: Vec<String> = self.weights.iter().map(fmt_rat).collect();
        let t: Vec<String> = self.tiebreak.iter().map(|i| i.to_string()).collect();
        format!(
            "graded-lex(weights=[{}], tiebreak=[{}])",
            w.join(","),
            t.join(",")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinResult {
    pub min: IntVec,
    /// The minimum is strictly below every other listed point in the partial order.
    pub pointed: bool,
}

pub fn min_under_order(
    points: &[IntVec],
    order: &TotalOrder,
    partial: impl Fn(&[Int], &[Int]) -> PartialCmp,
) -> Result<MinResult> {
    let min = points
        .iter()
        .min_by(|a, b| order.compare(a, b))
        .ok_or(Error::EmptyInput)?
        .clone();
    let pointed = points
        .iter()
        .all(|p| *p == min || partial(&min, p) == PartialCmp::Less);
    Ok(MinResult { min, pointed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_kernel_solve() {
        let m = IntMat::from_i64(&[&[1, 2, 3], &[2, 4, 6]]).to_rat();
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(is_zero(&m.mul_vec(v)));
        }
        assert!(m.solve(&rvec(&[1, 3])).is_none());
        assert!(m.solve(&rvec(&[1, 2])).is_some());
    }

    #[test]
    fn det_and_inverse() {
        let m = IntMat::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.det(), int(1));
        let inv = m.to_rat().inverse().unwrap();
        assert_eq!(
            inv.to_int().unwrap(),
            IntMat::from_i64(&[&[1, -1], &[-1, 2]])
        );
    }

    #[test]
    fn rational_strings() {
        assert_eq!(parse_rat("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(fmt_rat(&rat(4, 2)), "2");
        assert!(parse_rat("1/0").is_err());
    }
}
