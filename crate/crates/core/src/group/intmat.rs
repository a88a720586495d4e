//! Small dense integer matrices for the semidirect-product oracle.

pub(crate) type Mat = Vec<Vec<i64>>;

pub(crate) fn identity(d: usize) -> Mat {
    (0..d)
        .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub(crate) fn mul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    let mut out = vec![vec![0i64; d]; d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i][k];
            if aik == 0 {
                continue;
            }
            for j in 0..d {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub(crate) fn transpose(a: &Mat) -> Mat {
    let d = a.len();
    (0..d).map(|i| (0..d).map(|j| a[j][i]).collect()).collect()
}

fn minor(a: &Mat, row: usize, col: usize) -> Mat {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, v)| *v)
                .collect()
        })
        .collect()
}

/// Fraction-free (Bareiss) determinant.
pub(crate) fn det(a: &Mat) -> i128 {
    let d = a.len();
    if d == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..d - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..d).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..d {
            for j in k + 1..d {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[d - 1][d - 1]
}

/// Integer inverse of a unimodular matrix, `None` when `|det| != 1`.
pub(crate) fn unimodular_inverse(a: &Mat) -> Option<Mat> {
    let (adj, d) = adjugate(a);
    if d != 1 && d != -1 {
        return None;
    }
    Some(
        adj.into_iter()
            .map(|row| row.into_iter().map(|v| v * d as i64).collect())
            .collect(),
    )
}

/// Adjugate and determinant, for testing lattice membership `B^{-1} v ∈ ℤ^d`.
pub(crate) fn adjugate(a: &Mat) -> (Mat, i128) {
    let d = a.len();
    let mut adj = vec![vec![0i64; d]; d];
    for i in 0..d {
        for j in 0..d {
            let cof = if d == 1 { 1 } else { det(&minor(a, j, i)) };
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[i][j] = (sign * cof) as i64;
        }
    }
    (adj, det(a))
}

pub(crate) fn apply(a: &Mat, v: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}
