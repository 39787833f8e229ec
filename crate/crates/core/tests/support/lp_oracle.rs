//! Brute-force LP oracle: enumerate every basic solution of a small
//! bounded program and keep the best feasible one.
#![allow(dead_code)]

use cfa_core::lp::{LinearProgram, Sense};
use cfa_core::seed::rng_from_seed;
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Oracle {
    Infeasible,
    Optimal(f64),
}

const FEAS_TOL: f64 = 1e-7;

struct Plane {
    a: Vec<f64>,
    b: f64,
}

fn solve_square(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    for c in col..n {
                        m[r][c] -= f * m[col][c];
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

fn feasible(lp: &LinearProgram, x: &[f64]) -> bool {
    let scale = |v: f64| FEAS_TOL * v.abs().max(1.0);
    for (j, v) in lp.variables.iter().enumerate() {
        if x[j] < v.lower - scale(v.lower) || x[j] > v.upper + scale(v.upper) {
            return false;
        }
    }
    for (i, c) in lp.constraints.iter().enumerate() {
        let act = lp.activity(i, x);
        let tol = scale(c.rhs);
        let ok = match c.sense {
            Sense::Le => act <= c.rhs + tol,
            Sense::Ge => act >= c.rhs - tol,
            Sense::Eq => (act - c.rhs).abs() <= tol,
        };
        if !ok {
            return false;
        }
    }
    true
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Requires finite bounds on every variable.
pub fn vertex_enumeration(lp: &LinearProgram) -> Oracle {
    let n = lp.num_variables();
    let mut planes = Vec::new();
    for c in &lp.constraints {
        let mut a = vec![0.0; n];
        for &(j, v) in &c.coeffs {
            a[j] += v;
        }
        planes.push(Plane { a, b: c.rhs });
    }
    for (j, v) in lp.variables.iter().enumerate() {
        assert!(v.lower.is_finite() && v.upper.is_finite(), "oracle needs finite bounds");
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push(Plane { a: e.clone(), b: v.lower });
        planes.push(Plane { a: e, b: v.upper });
    }
    if n == 0 {
        let x: Vec<f64> = Vec::new();
        return if feasible(lp, &x) { Oracle::Optimal(0.0) } else { Oracle::Infeasible };
    }
    let mut best: Option<f64> = None;
    combinations(planes.len(), n, &mut |idx| {
        let m = idx.iter().map(|&i| planes[i].a.clone()).collect();
        let rhs = idx.iter().map(|&i| planes[i].b).collect();
        if let Some(x) = solve_square(m, rhs) {
            if feasible(lp, &x) {
                let obj = lp.objective(&x);
                if best.is_none_or(|b| obj < b) {
                    best = Some(obj);
                }
            }
        }
    });
    match best {
        Some(v) => Oracle::Optimal(v),
        None => Oracle::Infeasible,
    }
}

fn half_steps<R: Rng>(rng: &mut R, lo: i32, hi: i32) -> f64 {
    rng.random_range(2 * lo..=2 * hi) as f64 / 2.0
}

/// A program with 1..=6 variables, 0..=6 rows, finite bounds and
/// coefficients on a half-integer grid (so degenerate vertices are common).
pub fn random_bounded_lp(seed: u64) -> LinearProgram {
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(1..=6);
    let m = rng.random_range(0..=6);
    let mut lp = LinearProgram::new();
    for _ in 0..n {
        let lo = rng.random_range(-3..=1) as f64;
        let width = rng.random_range(0..=6) as f64;
        lp.add_variable(lo, lo + width, half_steps(&mut rng, -4, 4));
    }
    for _ in 0..m {
        let mut coeffs = Vec::new();
        for j in 0..n {
            if rng.random_bool(0.7) {
                coeffs.push((j, half_steps(&mut rng, -4, 4)));
            }
        }
        let sense = match rng.random_range(0..6) {
            0 => Sense::Eq,
            1 | 2 => Sense::Ge,
            _ => Sense::Le,
        };
        lp.add_constraint(coeffs, sense, half_steps(&mut rng, -6, 6));
    }
    lp
}
