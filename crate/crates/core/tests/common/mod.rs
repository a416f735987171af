#![allow(dead_code)]

use clusterbody::lattice::{Int, Rat};
use clusterbody::laurent::LaurentPolynomial;
use num::{One, Signed, ToPrimitive, Zero};

/// Evaluate a Laurent polynomial at a point with nonzero coordinates.
pub fn eval(f: &LaurentPolynomial, x: &[Rat]) -> Rat {
    f.terms().fold(Rat::zero(), |acc, (e, c)| {
        let mono = e
            .iter()
            .zip(x)
            .fold(Rat::one(), |m, (k, xi)| m * rpow(xi, k));
        acc + c * mono
    })
}

pub fn rpow(x: &Rat, k: &Int) -> Rat {
    let n = k.abs().to_u32().expect("small exponent");
    let p = num::pow(x.clone(), n as usize);
    if k.is_negative() {
        p.recip()
    } else {
        p
    }
}

/// Fomin–Zelevinsky matrix mutation.
pub fn fz_mutate(b: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
    let n = b.len();
    let mut out = b.to_vec();
    for i in 0..n {
        for j in 0..n {
            out[i][j] = if i == k || j == k {
                -b[i][j]
            } else {
                b[i][j] + (b[i][k].abs() * b[k][j] + b[i][k] * b[k][j].abs()) / 2
            };
        }
    }
    out
}

/// Values of the cluster variables after mutating along `word`, starting from the
/// values `x` and exchange matrix `b`: `A_k A'_k = prod A_j^[b_kj]+ + prod A_j^[-b_kj]+`.
pub fn exchange_values(b: &[Vec<i64>], word: &[usize], x: &[Rat]) -> Vec<Rat> {
    let mut b = b.to_vec();
    let mut x = x.to_vec();
    for &k in word {
        let (mut plus, mut minus) = (Rat::one(), Rat::one());
        for j in 0..x.len() {
            let e = b[k][j];
            if e > 0 {
                plus *= num::pow(x[j].clone(), e as usize);
            } else if e < 0 {
                minus *= num::pow(x[j].clone(), (-e) as usize);
            }
        }
        x[k] = (plus + minus) / &x[k];
        b = fz_mutate(&b, k);
    }
    x
}

/// Semistandard tableaux of rectangular shape `rows × cols` with entries in `1..=n`,
/// counted by brute force (row by row, strictly increasing down columns).
pub fn ssyt_count(rows: usize, cols: usize, n: usize) -> u64 {
    fn weakly_increasing(len: usize, n: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(
            len: usize,
            n: usize,
            start: usize,
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if cur.len() == len {
                out.push(cur.clone());
                return;
            }
            for v in start..=n {
                cur.push(v);
                rec(len, n, v, cur, out);
                cur.pop();
            }
        }
        rec(len, n, 1, &mut cur, &mut out);
        out
    }
    let all = weakly_increasing(cols, n);
    // count[r] = number of columns-strict stacks ending with row r
    let mut count: Vec<u64> = vec![1; all.len()];
    for _ in 1..rows {
        count = all
            .iter()
            .map(|below| {
                all.iter()
                    .zip(&count)
                    .filter(|(above, _)| above.iter().zip(below).all(|(a, b)| a < b))
                    .map(|(_, c)| *c)
                    .sum()
            })
            .collect();
    }
    count.iter().sum()
}
