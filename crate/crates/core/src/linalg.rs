//! Small dense helpers on top of nalgebra.

use crate::pauli::C64;
use nalgebra::{DMatrix, DVector};

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn vec_max_abs(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn diff_norm(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Columns of `vs` stacked into a matrix.
pub fn stack_columns(vs: &[DVector<C64>], dim: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(dim, vs.len());
    for (c, v) in vs.iter().enumerate() {
        m.set_column(c, v);
    }
    m
}

/// Connected components of the off-diagonal sparsity graph of a square matrix.
pub fn components(m: &DMatrix<C64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for c in 0..n {
        let col = m.column(c);
        for r in 0..c {
            let z = col[r];
            if z.re != 0.0 || z.im != 0.0 {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    if n == 1 {
        return (
            vec![m[(0, 0)].re],
            DMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
        );
    }
    let e = m.symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (c, &i) in idx.iter().enumerate() {
        vecs.set_column(c, &e.eigenvectors.column(i));
    }
    (vals, vecs)
}
