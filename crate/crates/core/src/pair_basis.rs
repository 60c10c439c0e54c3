//! Antisymmetric and symmetric pair bases in `vec` coordinates.
//!
//! For an `m × m` matrix, `Q_s` has one column per off-diagonal pair
//! `(i, j)`, `i > j`, holding `+1` at `vec` position of entry `(i, j)` and
//! `−1` at that of `(j, i)`. `Q_a` has a column `e_jj` for every diagonal
//! entry followed by `e_ij + e_ji` for the pairs below it. Normalizing their
//! columns and concatenating gives the orthogonal change of basis `Q₁`.
//!
//! Pair ordering is `j`-major: for `j = 1..m`, then `i = j+1..m`. This only
//! fixes internal coordinates; decomposition outputs do not depend on it.

use crate::dense::RealMatrix;

/// Number of antisymmetric directions, `m(m−1)/2`.
pub fn antisym_count(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// Number of symmetric directions, `m(m+1)/2`.
pub fn sym_count(m: usize) -> usize {
    m * (m + 1) / 2
}

/// `vec` index (0-based) of entry `(i, j)` of an `m × m` matrix.
fn vec_index(m: usize, i: usize, j: usize) -> usize {
    j * m + i
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairBasis {
    pub dim: usize,
    pub qs: RealMatrix,
    pub qa: RealMatrix,
    pub qs_bar: RealMatrix,
    pub qa_bar: RealMatrix,
}

impl PairBasis {
    pub fn new(m: usize) -> Self {
        let qs = build_qs(m);
        let qa = build_qa(m);
        Self {
            dim: m,
            qs_bar: normalize_columns(&qs),
            qa_bar: normalize_columns(&qa),
            qs,
            qa,
        }
    }
}

pub fn build_qs(m: usize) -> RealMatrix {
    let mut q = RealMatrix::zeros(m * m, antisym_count(m));
    let mut col = 0;
    for j in 0..m {
        for i in j + 1..m {
            q[(vec_index(m, i, j), col)] = 1.0;
            q[(vec_index(m, j, i), col)] = -1.0;
            col += 1;
        }
    }
    q
}

pub fn build_qa(m: usize) -> RealMatrix {
    let mut q = RealMatrix::zeros(m * m, sym_count(m));
    let mut col = 0;
    for j in 0..m {
        q[(vec_index(m, j, j), col)] = 1.0;
        col += 1;
        for i in j + 1..m {
            q[(vec_index(m, i, j), col)] = 1.0;
            q[(vec_index(m, j, i), col)] = 1.0;
            col += 1;
        }
    }
    q
}

fn normalize_columns(q: &RealMatrix) -> RealMatrix {
    let mut out = q.clone();
    for j in 0..q.cols() {
        let norm = q.column(j).iter().map(|x| x * x).sum::<f64>().sqrt();
        for i in 0..q.rows() {
            out[(i, j)] = q[(i, j)] / norm;
        }
    }
    out
}

/// `Q₁ = [Q̄_s | Q̄_a]`, orthogonal `m² × m²`.
pub fn build_q1_sym(m: usize) -> RealMatrix {
    let (x, y) = build_xy(m);
    x.add(&y).expect("same shape")
}

/// `X` carries `Q̄_s` in its first `m(m−1)/2` columns and `Y` carries `Q̄_a`
/// in its last `m(m+1)/2` columns; all other entries are zero.
pub fn build_xy(m: usize) -> (RealMatrix, RealMatrix) {
    let basis = PairBasis::new(m);
    let k = antisym_count(m);
    let n2 = m * m;
    let mut x = RealMatrix::zeros(n2, n2);
    let mut y = RealMatrix::zeros(n2, n2);
    for i in 0..n2 {
        for j in 0..k {
            x[(i, j)] = basis.qs_bar[(i, j)];
        }
        for j in 0..sym_count(m) {
            y[(i, k + j)] = basis.qa_bar[(i, j)];
        }
    }
    (x, y)
}

/// The `2m² × 2m²` block matrix `[[X, Y], [Y, X]]`.
pub fn build_q_herm(m: usize) -> RealMatrix {
    let (x, y) = build_xy(m);
    let n2 = m * m;
    RealMatrix::from_fn(2 * n2, 2 * n2, |i, j| {
        let (a, b) = (i % n2, j % n2);
        if (i < n2) == (j < n2) {
            x[(a, b)]
        } else {
            y[(a, b)]
        }
    })
}

/// Diagonal `±1` matrix: `+1` on the antisymmetric coordinates, `−1` on the
/// symmetric ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureMatrix {
    pub dim: usize,
    pub diagonal: Vec<i8>,
}

impl SignatureMatrix {
    pub fn to_matrix(&self) -> RealMatrix {
        RealMatrix::diag(&self.diagonal.iter().map(|&d| f64::from(d)).collect::<Vec<_>>())
    }

    /// `diag · x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.diagonal).map(|(v, &d)| v * f64::from(d)).collect()
    }

    /// `I_L · M · I_R` for signatures on both sides.
    pub fn sandwich(left: &Self, m: &RealMatrix, right: &Self) -> RealMatrix {
        RealMatrix::from_fn(m.rows(), m.cols(), |i, j| {
            f64::from(left.diagonal[i]) * m[(i, j)] * f64::from(right.diagonal[j])
        })
    }
}

pub fn signature(m: usize) -> SignatureMatrix {
    let mut diagonal = vec![1i8; antisym_count(m)];
    diagonal.extend(std::iter::repeat_n(-1i8, sym_count(m)));
    SignatureMatrix { dim: m, diagonal }
}
