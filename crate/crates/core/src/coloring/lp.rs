//! Exact dual simplex for the covering LP
//!
//! ```text
//! min  sum_j x_j   s.t.  A x >= 1,  x >= 0
//! ```
//!
//! where column `j` of `A` is the indicator of an independent set. Starting
//! from the all-surplus basis (`B = -I`) every reduced cost is non-negative,
//! so the dual simplex needs no phase one. The simplex multipliers at the
//! optimum are an optimal solution of the packing dual.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;
use crate::{Error, Result};

/// Optimal primal weights per column and optimal dual prices per row.
pub struct CoverSolution {
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
    pub value: Rational,
    pub pivots: usize,
}

/// Consecutive non-improving pivots before switching to the smallest-index
/// rule for good.
const DEGENERATE_STREAK: usize = 50;

/// The basis inverse is kept fraction-free as `adj(B) / det(B)`, so every
/// update is an exact integer division and no gcd is ever taken.
pub fn solve_cover(rows: usize, columns: &[Vec<usize>]) -> Result<CoverSolution> {
    let n = rows;
    let ncols = columns.len();
    let total = ncols + n;
    let sign = if n % 2 == 0 { -BigInt::one() } else { BigInt::one() };
    // B = -I: det = (-1)^n, adj = (-1)^(n+1) I.
    let mut det = -sign.clone();
    let mut adj: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row = vec![BigInt::zero(); n];
            row[i] = sign.clone();
            row
        })
        .collect();
    let mut xb: Vec<BigInt> = vec![sign; n];
    let mut basis: Vec<usize> = (0..n).map(|i| ncols + i).collect();
    let mut in_basis = vec![false; total];
    for &b in &basis {
        in_basis[b] = true;
    }

    let mut pivots = 0;
    let mut streak = 0;
    let mut bland = false;
    let mut objective = Rational::zero();
    loop {
        let positive = det.is_positive();
        let scaled = |v: &BigInt| if positive { v.clone() } else { -v };
        let candidates = (0..n).filter(|&i| scaled(&xb[i]).is_negative());
        let leave = if bland {
            candidates.min_by_key(|&i| basis[i])
        } else {
            candidates.min_by(|&a, &b| scaled(&xb[a]).cmp(&scaled(&xb[b])).then(basis[a].cmp(&basis[b])))
        };
        let Some(r) = leave else { break };

        let y = prices(&basis, &adj, ncols);
        let row_r = &adj[r];

        // Entering column: min ratio d_j / -alpha_rj over alpha_rj < 0, all
        // as integer pairs over the common denominator det.
        let mut best: Option<(BigInt, BigInt, usize)> = None;
        for j in 0..total {
            if in_basis[j] {
                continue;
            }
            let (alpha, reduced) = if j < ncols {
                let a: BigInt = columns[j].iter().map(|&v| &row_r[v]).sum();
                let dy: BigInt = columns[j].iter().map(|&v| &y[v]).sum();
                (a, &det - dy)
            } else {
                let i = j - ncols;
                (-&row_r[i], y[i].clone())
            };
            if !scaled(&alpha).is_negative() {
                continue;
            }
            let (mut num, mut den) = (reduced, -alpha);
            if den.is_negative() {
                num = -num;
                den = -den;
            }
            let better = match &best {
                None => true,
                Some((bn, bd, _)) => &num * bd < bn * &den,
            };
            if better {
                best = Some((num, den, j));
            }
        }
        let Some((_, _, q)) = best else {
            return Err(Error::Internal(
                "covering LP reported infeasible; every vertex should lie in some column".into(),
            ));
        };

        let col: Vec<BigInt> = (0..n)
            .map(|i| {
                if q < ncols {
                    columns[q].iter().map(|&v| &adj[i][v]).sum()
                } else {
                    -&adj[i][q - ncols]
                }
            })
            .collect();
        let p = col[r].clone();
        let pivot_row = adj[r].clone();
        let pivot_x = xb[r].clone();
        for i in 0..n {
            if i == r {
                continue;
            }
            let f = &col[i];
            for (cell, pr) in adj[i].iter_mut().zip(&pivot_row) {
                *cell = (&*cell * &p - f * pr) / &det;
            }
            xb[i] = (&xb[i] * &p - f * &pivot_x) / &det;
        }
        det = p;
        in_basis[basis[r]] = false;
        in_basis[q] = true;
        basis[r] = q;
        pivots += 1;

        let numer: BigInt = basis
            .iter()
            .zip(&xb)
            .filter(|(&b, _)| b < ncols)
            .map(|(_, x)| x)
            .sum();
        let new_objective = Rational::new(numer, det.clone());
        if new_objective == objective {
            streak += 1;
            if streak >= DEGENERATE_STREAK {
                bland = true;
            }
        } else {
            streak = 0;
        }
        objective = new_objective;
    }

    let y: Vec<Rational> = prices(&basis, &adj, ncols)
        .into_iter()
        .map(|v| Rational::new(v, det.clone()))
        .collect();
    let mut x = vec![Rational::zero(); ncols];
    for (i, &b) in basis.iter().enumerate() {
        if b < ncols {
            x[b] = Rational::new(xb[i].clone(), det.clone());
        }
    }
    let value: Rational = x.iter().sum();
    Ok(CoverSolution { x, y, value, pivots })
}

/// Numerators of `y = c_B B^{-1}` over `det`; columns below `ncols` cost 1.
fn prices(basis: &[usize], adj: &[Vec<BigInt>], ncols: usize) -> Vec<BigInt> {
    let n = basis.len();
    let mut y = vec![BigInt::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b >= ncols {
            continue;
        }
        for (k, v) in adj[i].iter().enumerate() {
            if !v.is_zero() {
                y[k] += v;
            }
        }
    }
    y
}
