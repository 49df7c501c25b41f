//! Exact two-phase simplex over the rationals with Bland's rule.
//!
//! Problems have the form `A x = b, x ≥ 0`, optionally maximizing `c·x`.
//! Infeasibility is reported with Farkas multipliers `y` satisfying
//! `yᵀA ≤ 0` and `yᵀb > 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// A sparse row `Σ coeffs[j]·x_j = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpResult {
    Feasible { x: Vec<Rational>, objective: Rational },
    Infeasible { y: Vec<Rational> },
    Unbounded,
}

struct Tableau {
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = &*v - &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost·x` over the current basis, entering only columns in
    /// `allowed`. Returns false if unbounded.
    fn minimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        let rhs = self.cols;
        loop {
            let m = self.t.len();
            // reduced costs d_j = c_j - c_B B^{-1} A_j, scanned in index order
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j].clone();
                for i in 0..m {
                    let cb = &cost[self.basis[i]];
                    if !cb.is_zero() && !self.t[i][j].is_zero() {
                        d -= cb * &self.t[i][j];
                    }
                }
                if d.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..m {
                if self.t[i][c].is_positive() {
                    let ratio = &self.t[i][rhs] / &self.t[i][c];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Solves `A x = b, x ≥ 0` over `n` variables, maximizing `objective` if
/// given (otherwise any feasible vertex is returned).
pub fn solve(n: usize, rows: &[Row], objective: Option<&[(usize, Rational)]>) -> LpResult {
    let m = rows.len();
    let cols = n + m;
    let mut t = Vec::with_capacity(m);
    let mut signs = Vec::with_capacity(m);
    for (i, row) in rows.iter().enumerate() {
        let s = if row.rhs.is_negative() { -rat(1) } else { rat(1) };
        let mut dense = vec![Rational::zero(); cols + 1];
        for (j, v) in &row.coeffs {
            dense[*j] += &s * v;
        }
        dense[n + i] = Rational::one();
        dense[cols] = &s * &row.rhs;
        t.push(dense);
        signs.push(s);
    }
    let mut tab = Tableau { t, basis: (n..n + m).collect(), cols };
    let phase1: Vec<Rational> = (0..cols).map(|j| if j < n { Rational::zero() } else { rat(1) }).collect();
    tab.minimize(&phase1, cols);
    let infeas: Rational = (0..m).filter(|&i| tab.basis[i] >= n).map(|i| tab.t[i][cols].clone()).sum();
    if infeas.is_positive() {
        // y'_i = 1 - reduced cost of artificial i = c_B B^{-1} e_i
        let y = (0..m)
            .map(|a| {
                let mut yi = Rational::zero();
                for i in 0..m {
                    if tab.basis[i] >= n && !tab.t[i][n + a].is_zero() {
                        yi += &tab.t[i][n + a];
                    }
                }
                yi * &signs[a]
            })
            .collect();
        return LpResult::Infeasible { y };
    }
    // drive zero-level artificials out, dropping redundant rows
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                Some(j) => {
                    tab.pivot(i, j);
                    i += 1;
                }
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }
    if let Some(obj) = objective {
        let mut cost = vec![Rational::zero(); cols];
        for (j, v) in obj {
            cost[*j] -= v;
        }
        if !tab.minimize(&cost, n) {
            return LpResult::Unbounded;
        }
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        x[b] = tab.t[i][cols].clone();
    }
    let objective = objective
        .map(|o| o.iter().map(|(j, v)| v * &x[*j]).sum())
        .unwrap_or_else(Rational::zero);
    LpResult::Feasible { x, objective }
}

/// Exact check of `A x = b, x ≥ 0`.
pub fn check_solution(rows: &[Row], x: &[Rational]) -> Result<(), String> {
    if let Some(j) = x.iter().position(|v| v.is_negative()) {
        return Err(format!("variable {j} is negative"));
    }
    for (i, row) in rows.iter().enumerate() {
        let lhs: Rational = row.coeffs.iter().map(|(j, v)| v * &x[*j]).sum();
        if lhs != row.rhs {
            return Err(format!("row {i}: {lhs} != {}", row.rhs));
        }
    }
    Ok(())
}

/// Exact check of `yᵀA ≤ 0` and `yᵀb > 0`.
pub fn check_farkas(n: usize, rows: &[Row], y: &[Rational]) -> Result<(), String> {
    if y.len() != rows.len() {
        return Err(format!("{} multipliers for {} rows", y.len(), rows.len()));
    }
    let mut combo = vec![Rational::zero(); n];
    let mut rhs = Rational::zero();
    for (row, yi) in rows.iter().zip(y) {
        for (j, v) in &row.coeffs {
            combo[*j] += yi * v;
        }
        rhs += yi * &row.rhs;
    }
    if let Some(j) = combo.iter().position(|v| v.is_positive()) {
        return Err(format!("combined coefficient of variable {j} is positive"));
    }
    if !rhs.is_positive() {
        return Err(format!("combined right-hand side {rhs} is not positive"));
    }
    Ok(())
}
