//! Laurent polynomials, mutation pullbacks, pointedness and valuations.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{
    self, add, divisibility_compare, fmt_rat, min_under_order, Dominance, Int, IntVec, PartialCmp,
    Rat, TotalOrder,
};
use crate::seed::Seed;

/// Exponent vector ordered graded-lexicographically (coordinate sum, then lex).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exp(pub IntVec);

impl Ord for Exp {
    fn cmp(&self, other: &Self) -> Ordering {
        let s1: Int = self.0.iter().sum();
        let s2: Int = other.0.iter().sum();
        s1.cmp(&s2).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse Laurent polynomial with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPolynomial {
    nvars: usize,
    terms: BTreeMap<Exp, Rat>,
}

impl LaurentPolynomial {
    pub fn zero(nvars: usize) -> Self {
        LaurentPolynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(vec![Int::zero(); nvars], Rat::one())
    }

    pub fn monomial(exp: IntVec, coef: Rat) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, coef);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (IntVec, Rat)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Convenience constructor from small integer data.
    pub fn from_i64(nvars: usize, terms: &[(&[i64], i64)]) -> Self {
        Self::from_terms(
            nvars,
            terms
                .iter()
                .map(|(e, c)| (lattice::ivec(e), lattice::rat(*c, 1))),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (graded-lex ascending) order.
    pub fn terms(&self) -> impl Iterator<Item = (&IntVec, &Rat)> {
        self.terms.iter().map(|(e, c)| (&e.0, c))
    }

    pub fn exponents(&self) -> Vec<IntVec> {
        self.terms.keys().map(|e| e.0.clone()).collect()
    }

    pub fn coeff(&self, exp: &[Int]) -> Rat {
        self.terms
            .get(&Exp(exp.to_vec()))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, exp: IntVec, coef: Rat) {
        assert_eq!(exp.len(), self.nvars, "exponent length mismatch");
        if coef.is_zero() {
            return;
        }
        let key = Exp(exp);
        let v = self.terms.remove(&key).map_or(coef.clone(), |c| c + coef);
        if !v.is_zero() {
            self.terms.insert(key, v);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                out.add_term(add(e1, e2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Multiply by the monomial `z^e`.
    pub fn shift(&self, e: &[Int]) -> Self {
        LaurentPolynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(x, c)| (Exp(add(&x.0, e)), c.clone()))
                .collect(),
        }
    }

    /// Apply a map to every exponent, combining collisions.
    pub fn map_exponents(&self, nvars: usize, f: impl Fn(&IntVec) -> IntVec) -> Self {
        Self::from_terms(nvars, self.terms().map(|(e, c)| (f(e), c.clone())))
    }

    /// `(1 + z^v)^k` for `k >= 0`.
    pub fn binomial_power(v: &[Int], k: u32) -> Self {
        let n = v.len();
        let mut out = Self::zero(n);
        let mut coef = Int::one();
        for j in 0..=k {
            let e: IntVec = v.iter().map(|x| x * Int::from(j)).collect();
            out.add_term(e, Rat::from_integer(coef.clone()));
            coef = coef * Int::from(k - j) / Int::from(j + 1);
        }
        out
    }

    /// Exact division by `(1 + z^v)^k`; `None` if it leaves a remainder.
    pub fn div_binomial_power(&self, v: &[Int], k: u32) -> Option<Self> {
        let mut cur = self.clone();
        for _ in 0..k {
            cur = cur.div_binomial(v)?;
        }
        Some(cur)
    }

    fn div_binomial(&self, v: &[Int]) -> Option<Self> {
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return Some(self.scale(&lattice::rat(1, 2)));
        };
        // Group exponents into classes modulo Z·v; inside a class the polynomial is
        // univariate in w = z^v.
        let mut classes: BTreeMap<IntVec, BTreeMap<Int, Rat>> = BTreeMap::new();
        for (e, c) in self.terms() {
            let t = num::Integer::div_floor(&e[p], &v[p]);
            let base: IntVec = e.iter().zip(v).map(|(x, y)| x - &t * y).collect();
            classes.entry(base).or_default().insert(t, c.clone());
        }
        let mut out = Self::zero(self.nvars);
        for (base, poly) in classes {
            let lo = poly.keys().next().unwrap().clone();
            let hi = poly.keys().next_back().unwrap().clone();
            let mut prev = Rat::zero();
            let mut t = lo.clone();
            while t < hi {
                let c = poly.get(&t).cloned().unwrap_or_else(Rat::zero);
                let q = c - &prev;
                if !q.is_zero() {
                    let e: IntVec = base.iter().zip(v).map(|(x, y)| x + &t * y).collect();
                    out.add_term(e, q.clone());
                }
                prev = q;
                t += 1;
            }
            if poly.get(&hi).cloned().unwrap_or_else(Rat::zero) != prev {
                return None;
            }
        }
        Some(out)
    }

    /// Substitute `z^m -> z^m (1 + z^v)^{sign * pair(m)}` and divide out the common
    /// denominator exactly.
    pub fn binomial_substitution(
        &self,
        v: &[Int],
        pair: impl Fn(&IntVec) -> Int,
        negate: bool,
    ) -> Result<Self> {
        let powers: Vec<(IntVec, Rat, Int)> = self
            .terms()
            .map(|(e, c)| {
                let p = pair(e);
                (e.clone(), c.clone(), if negate { -p } else { p })
            })
            .collect();
        let denom = powers
            .iter()
            .map(|(_, _, p)| -p.clone())
            .max()
            .unwrap_or_else(Int::zero);
        let denom = if denom.is_negative() {
            Int::zero()
        } else {
            denom
        };
        let mut num = Self::zero(self.nvars);
        let mut cache: BTreeMap<Int, Self> = BTreeMap::new();
        for (e, c, p) in powers {
            let k = &p + &denom;
            let b = cache.entry(k.clone()).or_insert_with(|| {
                Self::binomial_power(v, k.to_u32().expect("binomial exponent fits"))
            });
            num = num.add(&b.shift(&e).scale(&c));
        }
        let d = denom
            .to_u32()
            .ok_or_else(|| Error::Invalid("exponent too large".into()))?;
        num.div_binomial_power(v, d).ok_or(Error::NotLaurent)
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms() {
            let mut mono = Vec::new();
            for (i, x) in e.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let name = names
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| format!("z{}", i + 1));
                if x.is_one() {
                    mono.push(name);
                } else {
                    mono.push(format!("{name}^{x}"));
                }
            }
            let m = mono.join("*");
            let term = match (m.is_empty(), c.is_one()) {
                (true, _) => fmt_rat(c),
                (false, true) => m,
                (false, false) if *c == -Rat::one() => format!("-{m}"),
                (false, false) => format!("{}*{m}", fmt_rat(c)),
            };
            parts.push(term);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&[]))
    }
}

/// Flavor of a chart transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Flavor {
    A,
    X,
}

/// `mu_k^*` for the `A` variety: `z^m -> z^m (1+z^{v_{k;s}})^{-<d_k e_{k;s}, m>}`.
/// Exponents are in initial `f`-coordinates on both sides.
pub fn a_pullback(s: &Seed, k: usize, f: &LaurentPolynomial) -> Result<LaurentPolynomial> {
    check_unfrozen(s, k)?;
    f.binomial_substitution(&s.v(k), |m| s.pair_dk_ek(k, m), true)
}

/// `mu_k^*` for the `X` variety: `z^n -> z^n (1+z^{e_{k;s}})^{-[n, e_{k;s}]}`.
/// Exponents are in initial `e`-coordinates on both sides.
pub fn x_pullback(s: &Seed, k: usize, f: &LaurentPolynomial) -> Result<LaurentPolynomial> {
    check_unfrozen(s, k)?;
    f.binomial_substitution(&s.e(k), |n| x_pairing(s, k, n), true)
}

fn x_pairing(s: &Seed, k: usize, n: &IntVec) -> Int {
    let d = s.fixed().d()[k];
    let v = s.fixed().skew(n, &s.e(k)) * lattice::rat(d, 1);
    debug_assert!(v.is_integer());
    v.to_integer()
}

fn inverse_pullback(
    s: &Seed,
    k: usize,
    f: &LaurentPolynomial,
    flavor: Flavor,
) -> Result<LaurentPolynomial> {
    match flavor {
        Flavor::A => f.binomial_substitution(&s.v(k), |m| s.pair_dk_ek(k, m), false),
        Flavor::X => f.binomial_substitution(&s.e(k), |n| x_pairing(s, k, n), false),
    }
}

fn check_unfrozen(s: &Seed, k: usize) -> Result<()> {
    if k >= s.n() {
        return Err(Error::Invalid(format!("index {k} out of range")));
    }
    if !s.fixed().is_unfrozen(k) {
        return Err(Error::FrozenIndex(k));
    }
    Ok(())
}

/// Rewrite `f`, given in the chart of `from` (seed coordinates), in the chart of `to`.
pub fn transport(
    f: &LaurentPolynomial,
    from: &Seed,
    to: &Seed,
    flavor: Flavor,
) -> Result<LaurentPolynomial> {
    if from.fixed() != to.fixed() {
        return Err(Error::Invalid(
            "seeds belong to different fixed data".into(),
        ));
    }
    let n = from.n();
    let mut cur = match flavor {
        Flavor::A => {
            let fb = from.f_basis();
            f.map_exponents(n, |a| fb.vec_mul(a))
        }
        Flavor::X => f.map_exponents(n, |b| from.n_to_initial(b)),
    };
    let (wf, wt) = (from.word(), to.word());
    let common = wf.iter().zip(wt).take_while(|(a, b)| a == b).count();
    let fd = from.fixed_arc().clone();
    for i in (common..wf.len()).rev() {
        let parent = Seed::from_word(fd.clone(), &wf[..i])?;
        cur = match flavor {
            Flavor::A => a_pullback(&parent, wf[i], &cur)?,
            Flavor::X => x_pullback(&parent, wf[i], &cur)?,
        };
    }
    for i in common..wt.len() {
        let parent = Seed::from_word(fd.clone(), &wt[..i])?;
        cur = inverse_pullback(&parent, wt[i], &cur, flavor)?;
    }
    Ok(match flavor {
        Flavor::A => cur.map_exponents(n, |m| to.m_from_initial(m)),
        Flavor::X => {
            let conv = to.n_from_initial_matrix();
            cur.map_exponents(n, |m| conv.vec_mul(m))
        }
    })
}

/// Leading exponent `m0` if `f` (in `s`-coordinates) is pointed: unique
/// dominance-minimal exponent with coefficient 1 below every other exponent.
pub fn is_pointed(f: &LaurentPolynomial, s: &Seed) -> Result<Option<IntVec>> {
    let pstar = s.pstar_uf();
    let dom = Dominance::new(&pstar)?;
    let order = TotalOrder::refining(&pstar)?;
    if f.is_zero() {
        return Ok(None);
    }
    let exps = f.exponents();
    let res = min_under_order(&exps, &order, |a, b| dom.compare(a, b))?;
    if !res.pointed || !f.coeff(&res.min).is_one() {
        return Ok(None);
    }
    Ok(Some(res.min))
}

/// Linear combination of theta functions, by label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PointedDecomposition {
    pub terms: Vec<(Rat, IntVec)>,
}

impl PointedDecomposition {
    pub fn labels(&self) -> Vec<IntVec> {
        self.terms.iter().map(|(_, l)| l.clone()).collect()
    }

    pub fn coeff(&self, label: &[Int]) -> Rat {
        self.terms
            .iter()
            .filter(|(_, l)| l == label)
            .map(|(c, _)| c.clone())
            .sum()
    }

    /// Sum of `c * theta_label` through the supplied lookup.
    pub fn reconstruct(
        &self,
        nvars: usize,
        lookup: impl Fn(&IntVec) -> Option<LaurentPolynomial>,
    ) -> Result<LaurentPolynomial> {
        let mut out = LaurentPolynomial::zero(nvars);
        for (c, l) in &self.terms {
            let t = lookup(l).ok_or_else(|| Error::NotInSpan(lattice::fmt_vec(l)))?;
            out = out.add(&t.scale(c));
        }
        Ok(out)
    }
}

/// g-vector valuation: the smallest label under `order`.
pub fn g_valuation(decomp: &PointedDecomposition, order: &TotalOrder) -> Result<IntVec> {
    decomp
        .terms
        .iter()
        .filter(|(c, _)| !c.is_zero())
        .map(|(_, l)| l)
        .min_by(|a, b| order.compare(a, b))
        .cloned()
        .ok_or(Error::EmptyInput)
}

/// Valuation of an explicit fraction `num / den`.
pub fn g_valuation_fraction(
    num: &PointedDecomposition,
    den: &PointedDecomposition,
    order: &TotalOrder,
) -> Result<IntVec> {
    Ok(lattice::sub(
        &g_valuation(num, order)?,
        &g_valuation(den, order)?,
    ))
}

/// c-vector valuation over `X` labels. `order` must refine divisibility on `unfrozen`.
pub fn c_valuation(
    decomp: &PointedDecomposition,
    unfrozen: &[usize],
    order: &TotalOrder,
) -> Result<IntVec> {
    let labels: Vec<IntVec> = decomp
        .terms
        .iter()
        .filter(|(c, _)| !c.is_zero())
        .map(|(_, l)| l.clone())
        .collect();
    let res = min_under_order(&labels, order, |a, b| divisibility_compare(a, b, unfrozen))?;
    Ok(res.min)
}

/// Greedy expansion of `f` in a theta basis: repeatedly strip the minimal exponent
/// of the residual. `max_iter` bounds the number of subtractions.
pub fn theta_expand(
    f: &LaurentPolynomial,
    order: &TotalOrder,
    mut lookup: impl FnMut(&IntVec) -> Result<Option<LaurentPolynomial>>,
    max_iter: usize,
) -> Result<PointedDecomposition> {
    let mut residual = f.clone();
    let mut out: Vec<(Rat, IntVec)> = Vec::new();
    let mut iters = 0;
    while !residual.is_zero() {
        iters += 1;
        if iters > max_iter {
            return Err(Error::NotInSpan(format!(
                "no convergence after {max_iter} steps"
            )));
        }
        let exps = residual.exponents();
        let m0 = exps
            .iter()
            .min_by(|a, b| order.compare(a, b))
            .unwrap()
            .clone();
        let c = residual.coeff(&m0);
        let theta = lookup(&m0)?.ok_or_else(|| Error::NotInSpan(lattice::fmt_vec(&m0)))?;
        residual = residual.sub(&theta.scale(&c));
        match out.iter_mut().find(|(_, l)| *l == m0) {
            Some(entry) => entry.0 += c,
            None => out.push((c, m0)),
        }
    }
    out.retain(|(c, _)| !c.is_zero());
    Ok(PointedDecomposition { terms: out })
}

/// `theta_expand` against a finite table, with the iteration bound 10·|table|.
pub fn theta_expand_table(
    f: &LaurentPolynomial,
    order: &TotalOrder,
    table: &BTreeMap<IntVec, LaurentPolynomial>,
) -> Result<PointedDecomposition> {
    theta_expand(
        f,
        order,
        |m| Ok(table.get(m).cloned()),
        10 * table.len().max(1),
    )
}

/// Compare two labels by dominance in seed `s`.
pub fn dominance_in_seed(s: &Seed, a: &[Int], b: &[Int]) -> Result<PartialCmp> {
    lattice::dominance_compare(a, b, &s.pstar_uf())
}
