//! Reference implementations used only as test oracles. None of them share
//! code with the library's numerical paths.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use schmidt_herm::dense::{BipartiteDims, ComplexMatrix, RealMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_real(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> RealMatrix {
    RealMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_complex(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| (rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

pub fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    gaussian_complex(d, d, rng).hermitian_part()
}

/// Non-Hermitian matrix with a substantial anti-Hermitian part.
pub fn random_non_hermitian(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = gaussian_complex(d, d, rng);
    let h = g.hermitian_part();
    let k = g.sub(&h).unwrap();
    h.add(&k.scale(0.5 + rng.random::<f64>())).unwrap()
}

pub fn dims(m: usize, n: usize) -> BipartiteDims {
    BipartiteDims::new(m, n).unwrap()
}

/// Cyclic Jacobi eigenvalues of a real symmetric matrix, ascending.
pub fn jacobi_eigenvalues(a: &RealMatrix) -> Vec<f64> {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in m.iter_mut() {
                    let (mkp, mkq) = (row[p], row[q]);
                    row[p] = c * mkp - s * mkq;
                    row[q] = s * mkp + c * mkq;
                }
                let (row_p, row_q) = (m[p].clone(), m[q].clone());
                for (k, (mpk, mqk)) in row_p.into_iter().zip(row_q).enumerate() {
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Eigenvalues of a Hermitian matrix through its real `2n` embedding, whose
/// spectrum is that of `H` with every value doubled.
pub fn jacobi_hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.rows();
    let embed = RealMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (re, im) = h.get(i % n, j % n);
        match (i < n, j < n) {
            (true, true) | (false, false) => re,
            (true, false) => -im,
            (false, true) => im,
        }
    });
    jacobi_eigenvalues(&embed).into_iter().step_by(2).collect()
}

/// Singular values, descending, as square roots of the eigenvalues of `MᵗM`.
pub fn oracle_singular_values(m: &RealMatrix) -> Vec<f64> {
    let gram = m.transpose().matmul(m).unwrap();
    let mut s: Vec<f64> = jacobi_eigenvalues(&gram).into_iter().map(|x| x.max(0.0).sqrt()).collect();
    s.reverse();
    s
}

/// Singular values of a complex matrix, descending.
pub fn oracle_singular_values_complex(m: &ComplexMatrix) -> Vec<f64> {
    let gram = m.conj_transpose().matmul(m).unwrap().hermitian_part();
    let mut s: Vec<f64> = jacobi_hermitian_eigenvalues(&gram)
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    s.reverse();
    s
}

/// Realignment written directly from the index definition
/// `R[(j·m + i), (l·n + k)] = Z[i·n + k, j·n + l]`.
pub fn oracle_realign(z: &ComplexMatrix, m: usize, n: usize) -> ComplexMatrix {
    let mut r = ComplexMatrix::zeros(m * m, n * n);
    for i in 0..m {
        for j in 0..m {
            for k in 0..n {
                for l in 0..n {
                    r.set(j * m + i, l * n + k, z.get(i * n + k, j * n + l));
                }
            }
        }
    }
    r
}

/// Partial transpose of a real matrix on `R^m ⊗ R^n`, on the first or
/// second factor.
pub fn partial_transpose_real(a: &RealMatrix, m: usize, n: usize, first: bool) -> RealMatrix {
    RealMatrix::from_fn(m * n, m * n, |r, c| {
        let (i, k, j, l) = (r / n, r % n, c / n, c % n);
        if first {
            a[(j * n + k, i * n + l)]
        } else {
            a[(i * n + l, j * n + k)]
        }
    })
}

/// Orthogonal projection onto `Sym(m) ⊗ Sym(n)`: averaging over the partial
/// transposes symmetrizes each factor of every product term.
pub fn sym_sym_projection(a: &RealMatrix, m: usize, n: usize) -> RealMatrix {
    let t1 = partial_transpose_real(a, m, n, true);
    let t2 = partial_transpose_real(a, m, n, false);
    let t12 = partial_transpose_real(&t1, m, n, false);
    a.add(&t1).unwrap().add(&t2).unwrap().add(&t12).unwrap().scale(0.25)
}

fn block(a: &RealMatrix, n: usize, i: usize, j: usize) -> RealMatrix {
    a.submatrix(i * n, (i + 1) * n, j * n, (j + 1) * n)
}

fn dot(a: &RealMatrix, b: &RealMatrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()
}

/// Best single symmetric pair `B ⊗ C` by alternating least squares from
/// several random starts; returns the smallest residual found.
pub fn als_rank_one_residual(a: &RealMatrix, m: usize, n: usize, starts: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut best = f64::INFINITY;
    for _ in 0..starts {
        let mut c = gaussian_real(n, n, &mut rng).symmetrized();
        let mut b = RealMatrix::zeros(m, m);
        for _ in 0..2000 {
            let cc = dot(&c, &c);
            b = RealMatrix::from_fn(m, m, |i, j| dot(&block(a, n, i, j), &c) / cc).symmetrized();
            let bb = dot(&b, &b);
            let mut next = RealMatrix::zeros(n, n);
            for i in 0..m {
                for j in 0..m {
                    next.add_scaled(b[(i, j)] / bb, &block(a, n, i, j)).unwrap();
                }
            }
            let next = next.symmetrized();
            let delta = next.sub(&c).unwrap().frobenius();
            c = next;
            if delta < 1e-15 * c.frobenius().max(1.0) {
                break;
            }
        }
        let approx = RealMatrix::from_fn(m * n, m * n, |r, col| b[(r / n, col / n)] * c[(r % n, col % n)]);
        best = best.min(a.sub(&approx).unwrap().frobenius());
    }
    best
}

pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual:e}, expected {expected:e} (tol {tol:e})"
    );
}
