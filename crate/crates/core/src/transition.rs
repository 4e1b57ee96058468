//! Unitriangular change-of-basis matrices with labelled rows and columns.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{Lattice, LaurentPoly};
use crate::sparse::SparseMat;

/// Column `f` expresses the basis element indexed by `f` in the standard
/// basis: `B_f = e_f + sum_g t_{gf} e_g`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    /// Integer label entries; the actual label is `entry / label_scale`.
    pub labels: Vec<Vec<i32>>,
    pub label_scale: i32,
    pub matrix: SparseMat<LaurentPoly>,
    /// Linear extension used by the solver (label positions, processed first to last).
    pub order: Vec<usize>,
    pub lattice: Lattice,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    row: usize,
    col: usize,
    value: LaurentPoly,
}

#[derive(Serialize, Deserialize)]
struct Repr {
    labels: Vec<Vec<String>>,
    lattice: Lattice,
    order: Vec<usize>,
    entries: Vec<Entry>,
}

fn format_entry(x: i32, scale: i32) -> String {
    if x % scale == 0 {
        (x / scale).to_string()
    } else {
        format!("{x}/{scale}")
    }
}

fn parse_entry(s: &str) -> Result<(i32, i32)> {
    let bad = || Error::Config(format!("bad label entry {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => Ok((
            n.trim().parse().map_err(|_| bad())?,
            d.trim().parse().map_err(|_| bad())?,
        )),
        None => Ok((s.trim().parse().map_err(|_| bad())?, 1)),
    }
}

impl TransitionMatrix {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn entry(&self, g: usize, f: usize) -> LaurentPoly {
        self.matrix.get(g, f)
    }

    pub fn label_string(&self, i: usize) -> String {
        let parts: Vec<String> = self.labels[i]
            .iter()
            .map(|&x| format_entry(x, self.label_scale))
            .collect();
        format!("({})", parts.join(","))
    }

    pub fn is_unitriangular(&self) -> bool {
        let pos: Vec<usize> = {
            let mut p = vec![0; self.dim()];
            for (k, &i) in self.order.iter().enumerate() {
                p[i] = k;
            }
            p
        };
        self.matrix
            .entries()
            .all(|(g, f, v)| if g == f { v.is_one() } else { pos[g] < pos[f] })
            && (0..self.dim()).all(|f| self.matrix.get(f, f).is_one())
    }

    pub fn off_diagonal_in(&self, lattice: Lattice) -> bool {
        self.matrix
            .entries()
            .all(|(g, f, v)| g == f || v.in_lattice(lattice))
    }

    pub fn is_nonneg(&self) -> bool {
        self.matrix.entries().all(|(_, _, v)| v.is_nonneg())
    }

    /// Number of nonzero entries in each column.
    pub fn support_sizes(&self) -> Vec<usize> {
        self.matrix.columns().iter().map(|c| c.len()).collect()
    }

    /// The matrix specialized at `q = 1`.
    pub fn at_one(&self) -> Vec<Vec<BigInt>> {
        let n = self.dim();
        let mut out = vec![vec![BigInt::from(0); n]; n];
        for (g, f, v) in self.matrix.entries() {
            out[g][f] = v.eval_at_one();
        }
        out
    }

    /// Same matrix with labels sorted lexicographically.
    pub fn sorted(&self) -> Self {
        let mut perm: Vec<usize> = (0..self.dim()).collect();
        perm.sort_by(|&a, &b| self.labels[a].cmp(&self.labels[b]));
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let cols = perm
            .iter()
            .map(|&old| {
                self.matrix
                    .col(old)
                    .iter()
                    .map(|(&g, v)| (inv[g], v.clone()))
                    .collect()
            })
            .collect();
        TransitionMatrix {
            labels: perm.iter().map(|&i| self.labels[i].clone()).collect(),
            label_scale: self.label_scale,
            matrix: SparseMat::from_columns(self.dim(), cols),
            order: self.order.iter().map(|&i| inv[i]).collect(),
            lattice: self.lattice,
        }
    }

    pub fn to_json(&self) -> String {
        let repr = Repr {
            labels: self
                .labels
                .iter()
                .map(|l| {
                    l.iter()
                        .map(|&x| format_entry(x, self.label_scale))
                        .collect()
                })
                .collect(),
            lattice: self.lattice,
            order: self.order.clone(),
            entries: self
                .matrix
                .entries()
                .map(|(row, col, v)| Entry {
                    row,
                    col,
                    value: v.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&repr).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: Repr = serde_json::from_str(s)?;
        let mut scale = 1;
        let mut parsed = Vec::with_capacity(repr.labels.len());
        for l in &repr.labels {
            let mut row = Vec::with_capacity(l.len());
            for e in l {
                let (n, d) = parse_entry(e)?;
                if d != 1 {
                    scale = d;
                }
                row.push((n, d));
            }
            parsed.push(row);
        }
        let labels = parsed
            .into_iter()
            .map(|row| row.into_iter().map(|(n, d)| n * (scale / d)).collect())
            .collect::<Vec<Vec<i32>>>();
        let n = labels.len();
        let mut matrix = SparseMat::zeros(n, n);
        for e in repr.entries {
            if e.row >= n || e.col >= n {
                return Err(Error::Config("entry outside the matrix".into()));
            }
            matrix.set(e.row, e.col, e.value);
        }
        Ok(TransitionMatrix {
            labels,
            label_scale: scale,
            matrix,
            order: repr.order,
            lattice: repr.lattice,
        })
    }

    /// One line per nonzero entry: `row_label;col_label;polynomial`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row;col;value\n");
        let mut rows: BTreeMap<(usize, usize), &LaurentPoly> = BTreeMap::new();
        for (g, f, v) in self.matrix.entries() {
            rows.insert((f, g), v);
        }
        for ((f, g), v) in rows {
            let _ = writeln!(
                out,
                "{};{};{}",
                self.label_string(g),
                self.label_string(f),
                v
            );
        }
        out
    }

    /// The `q = 1` table as CSV, columns in label order.
    pub fn at_one_csv(&self) -> String {
        let m = self.at_one();
        let mut out = String::from("label");
        for f in 0..self.dim() {
            let _ = write!(out, ";{}", self.label_string(f));
        }
        out.push('\n');
        for (g, row) in m.iter().enumerate() {
            out.push_str(&self.label_string(g));
            for x in row {
                let _ = write!(out, ";{x}");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TransitionMatrix {
        let mut m = SparseMat::identity(2);
        m.set(0, 1, LaurentPoly::q());
        TransitionMatrix {
            labels: vec![vec![3, -1], vec![-1, 3]],
            label_scale: 2,
            matrix: m,
            order: vec![0, 1],
            lattice: Lattice::QZq,
        }
    }

    #[test]
    fn json_round_trip() {
        let t = sample();
        let back = TransitionMatrix::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert!(t.to_json().contains("\"3/2\""));
    }

    #[test]
    fn checks_and_sorting() {
        let t = sample();
        assert!(t.is_unitriangular());
        assert!(t.off_diagonal_in(Lattice::QZq));
        assert!(!t.off_diagonal_in(Lattice::QinvZqinv));
        let s = t.sorted();
        assert_eq!(s.labels[0], vec![-1, 3]);
        assert_eq!(s.entry(1, 0), LaurentPoly::q());
        assert!(s.is_unitriangular());
        assert_eq!(t.at_one()[0][1], BigInt::from(1));
        assert!(t.to_csv().contains("(3/2,-1/2);(-1/2,3/2);q"));
    }
}
