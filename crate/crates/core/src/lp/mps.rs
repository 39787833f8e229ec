//! Free-format MPS export, for replaying a program in an external solver.
//!
//! Layout, one record per line, fields separated by single spaces:
//!
//! ```text
//! NAME <name>
//! ROWS
//!  N OBJ
//!  <L|E|G> R<i>                  one per constraint, i = 0..m
//! COLUMNS
//!  X<j> OBJ <cost>               emitted when cost != 0
//!  X<j> R<i> <coefficient>       one per nonzero, rows ascending
//! RHS
//!  RHS R<i> <rhs>                emitted when rhs != 0
//! BOUNDS
//!  FR BND X<j>                   free
//!  MI BND X<j>                   lower = -inf (followed by UP if finite)
//!  FX BND X<j> <value>           lower == upper
//!  LO BND X<j> <value>           lower != 0
//!  UP BND X<j> <value>           finite upper
//! ENDATA
//! ```
//!
//! Variables default to `[0, +inf)` as in the MPS convention, so variables
//! with exactly those bounds get no BOUNDS record. Numbers are written in the
//! shortest form that round-trips to the same `f64`. A column that appears
//! in neither the objective nor any row is still listed with a zero
//! objective entry so every variable is declared.

use std::fmt::Write as _;

use super::{LinearProgram, Sense};

pub fn write_mps(lp: &LinearProgram, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME {name}");
    out.push_str("ROWS\n N OBJ\n");
    for (i, c) in lp.constraints.iter().enumerate() {
        let tag = match c.sense {
            Sense::Le => 'L',
            Sense::Eq => 'E',
            Sense::Ge => 'G',
        };
        let _ = writeln!(out, " {tag} R{i}");
    }
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lp.num_variables()];
    for (i, c) in lp.constraints.iter().enumerate() {
        for &(j, a) in &c.coeffs {
            by_col[j].push((i, a));
        }
    }
    out.push_str("COLUMNS\n");
    for (j, entries) in by_col.iter().enumerate() {
        let cost = lp.variables[j].cost;
        if cost != 0.0 || entries.is_empty() {
            let _ = writeln!(out, " X{j} OBJ {cost:?}");
        }
        for &(i, a) in entries {
            let _ = writeln!(out, " X{j} R{i} {a:?}");
        }
    }
    out.push_str("RHS\n");
    for (i, c) in lp.constraints.iter().enumerate() {
        if c.rhs != 0.0 {
            let _ = writeln!(out, " RHS R{i} {:?}", c.rhs);
        }
    }
    out.push_str("BOUNDS\n");
    for (j, v) in lp.variables.iter().enumerate() {
        let (lo, hi) = (v.lower, v.upper);
        if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            let _ = writeln!(out, " FR BND X{j}");
            continue;
        }
        if lo == hi {
            let _ = writeln!(out, " FX BND X{j} {lo:?}");
            continue;
        }
        if lo == f64::NEG_INFINITY {
            let _ = writeln!(out, " MI BND X{j}");
        } else if lo != 0.0 {
            let _ = writeln!(out, " LO BND X{j} {lo:?}");
        }
        if hi.is_finite() {
            let _ = writeln!(out, " UP BND X{j} {hi:?}");
        }
    }
    out.push_str("ENDATA\n");
    out
}
