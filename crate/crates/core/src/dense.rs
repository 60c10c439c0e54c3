//! Dense real and complex matrices, the column-stacking `vec` reshape, the
//! realignment map and the two factorizations everything else builds on:
//! a real SVD with a fixed sign convention and the extreme eigenvalues of a
//! Hermitian matrix.
//!
//! Storage is row-major. Complex matrices keep independent real and
//! imaginary parts.

use std::ops::{Index, IndexMut};

use faer::{c64, Mat, Side};

use crate::error::{dim_mismatch, Error, Result};

/// Default relative threshold below which singular values count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Absolute tolerance of the Hermiticity check in [`eig_extremes`], scaled by
/// `max(1, max |h_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    /// Builds a matrix from row-major data, rejecting non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(dim_mismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows. Panics on ragged input; meant for
    /// literals in tests and fixtures.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[f64]) {
        assert_eq!(values.len(), self.rows);
        for (i, v) in values.iter().enumerate() {
            self[(i, j)] = *v;
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(dim_mismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(dim_mismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn zip_with(&self, other: &Self, op: &str, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(dim_mismatch(format!(
                "cannot {op} {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "subtract", |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// In-place `self += factor * other`.
    pub fn add_scaled(&mut self, factor: f64, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(dim_mismatch("add_scaled shape mismatch"));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
        Ok(())
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    /// `(A + Aᵗ) / 2`.
    pub fn symmetrized(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    /// `(A − Aᵗ) / 2`.
    pub fn antisymmetrized(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] - self[(j, i)]))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub(crate) fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub(crate) fn from_faer(m: &Mat<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Complex matrix stored as a pair of real matrices of equal shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    re: RealMatrix,
    im: RealMatrix,
}

impl ComplexMatrix {
    pub fn new(re: RealMatrix, im: RealMatrix) -> Result<Self> {
        if re.shape() != im.shape() {
            return Err(dim_mismatch(format!(
                "real part {:?} and imaginary part {:?}",
                re.shape(),
                im.shape()
            )));
        }
        Ok(Self { re, im })
    }

    pub fn from_real(re: RealMatrix) -> Self {
        let im = RealMatrix::zeros(re.rows, re.cols);
        Self { re, im }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_real(RealMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_real(RealMatrix::identity(n))
    }

    /// Builds from a closure returning `(re, im)` per entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> (f64, f64)) -> Self {
        let mut re = RealMatrix::zeros(rows, cols);
        let mut im = RealMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let (a, b) = f(i, j);
                re[(i, j)] = a;
                im[(i, j)] = b;
            }
        }
        Self { re, im }
    }

    pub fn re(&self) -> &RealMatrix {
        &self.re
    }

    pub fn im(&self) -> &RealMatrix {
        &self.im
    }

    pub fn into_parts(self) -> (RealMatrix, RealMatrix) {
        (self.re, self.im)
    }

    pub fn rows(&self) -> usize {
        self.re.rows
    }

    pub fn cols(&self) -> usize {
        self.re.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        self.re.shape()
    }

    pub fn is_square(&self) -> bool {
        self.re.is_square()
    }

    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        (self.re[(i, j)], self.im[(i, j)])
    }

    pub fn set(&mut self, i: usize, j: usize, value: (f64, f64)) {
        self.re[(i, j)] = value.0;
        self.im[(i, j)] = value.1;
    }

    pub fn is_real(&self) -> bool {
        self.im.data.iter().all(|x| *x == 0.0)
    }

    pub fn conj_transpose(&self) -> Self {
        Self {
            re: self.re.transpose(),
            im: self.im.transpose().scale(-1.0),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        let rr = self.re.matmul(&other.re)?;
        let ii = self.im.matmul(&other.im)?;
        let ri = self.re.matmul(&other.im)?;
        let ir = self.im.matmul(&other.re)?;
        Ok(Self {
            re: rr.sub(&ii)?,
            im: ri.add(&ir)?,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            re: self.re.add(&other.re)?,
            im: self.im.add(&other.im)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            re: self.re.sub(&other.re)?,
            im: self.im.sub(&other.im)?,
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            re: self.re.scale(factor),
            im: self.im.scale(factor),
        }
    }

    pub fn add_scaled(&mut self, factor: f64, other: &Self) -> Result<()> {
        self.re.add_scaled(factor, &other.re)?;
        self.im.add_scaled(factor, &other.im)
    }

    /// `self + shift·I`.
    pub fn shifted(&self, shift: f64) -> Self {
        assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows() {
            out.re[(i, i)] += shift;
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        self.re
            .data
            .iter()
            .chain(&self.im.data)
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.re
            .data
            .iter()
            .zip(&self.im.data)
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    pub fn trace(&self) -> (f64, f64) {
        (0..self.rows().min(self.cols()))
            .map(|i| self.get(i, i))
            .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y))
    }

    /// Largest entry magnitude of `A − Aᴴ`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let dr = self.re[(i, j)] - self.re[(j, i)];
                let di = self.im[(i, j)] + self.im[(j, i)];
                dev = dev.max(dr.hypot(di));
            }
        }
        dev
    }

    /// `(A + Aᴴ) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            re: self.re.symmetrized(),
            im: self.im.antisymmetrized(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        for part in [&self.re, &self.im] {
            if let Some(k) = part.data.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    row: k / part.cols.max(1),
                    col: k % part.cols.max(1),
                });
            }
        }
        Ok(())
    }
}

impl From<RealMatrix> for ComplexMatrix {
    fn from(re: RealMatrix) -> Self {
        Self::from_real(re)
    }
}

/// Dimensions of the two factors of `H₁ ⊗ H₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BipartiteDims {
    pub m: usize,
    pub n: usize,
}

impl BipartiteDims {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(crate::error::invalid("dims", "subsystem dimensions must be positive"));
        }
        Ok(Self { m, n })
    }

    pub fn total(&self) -> usize {
        self.m * self.n
    }

    pub(crate) fn check_square(&self, rows: usize, cols: usize) -> Result<()> {
        let t = self.total();
        if rows != t || cols != t {
            return Err(dim_mismatch(format!(
                "expected a {t}x{t} matrix for dims ({}, {}), got {rows}x{cols}",
                self.m, self.n
            )));
        }
        Ok(())
    }
}

/// Column stacking: component `j·rows + i` holds `T[i, j]`.
pub fn vec(t: &RealMatrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.rows * t.cols);
    for j in 0..t.cols {
        for i in 0..t.rows {
            out.push(t[(i, j)]);
        }
    }
    out
}

/// Inverse of [`vec`].
pub fn unvec(v: &[f64], rows: usize, cols: usize) -> Result<RealMatrix> {
    if v.len() != rows * cols {
        return Err(dim_mismatch(format!(
            "vector of length {} cannot be reshaped to {rows}x{cols}",
            v.len()
        )));
    }
    Ok(RealMatrix::from_fn(rows, cols, |i, j| v[j * rows + i]))
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &RealMatrix, b: &RealMatrix) -> RealMatrix {
    let (r, s) = b.shape();
    RealMatrix::from_fn(a.rows * r, a.cols * s, |row, col| {
        a[(row / r, col / s)] * b[(row % r, col % s)]
    })
}

pub fn kron_complex(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (r, s) = b.shape();
    ComplexMatrix::from_fn(a.rows() * r, a.cols() * s, |row, col| {
        let (ar, ai) = a.get(row / r, col / s);
        let (br, bi) = b.get(row % r, col % s);
        (ar * br - ai * bi, ar * bi + ai * br)
    })
}

/// Realignment of an `mn × mn` matrix viewed as an `m × m` grid of `n × n`
/// blocks. Row `j·m + i` of the result is `vec(Z_ij)ᵗ`, so blocks are listed
/// in column-stacking order; the result is `m² × n²`.
pub fn realign(z: &RealMatrix, dims: BipartiteDims) -> Result<RealMatrix> {
    dims.check_square(z.rows, z.cols)?;
    let BipartiteDims { m, n } = dims;
    let mut out = RealMatrix::zeros(m * m, n * n);
    for j in 0..m {
        for i in 0..m {
            let row = j * m + i;
            for l in 0..n {
                for k in 0..n {
                    out[(row, l * n + k)] = z[(i * n + k, j * n + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Realignment applied to the real and imaginary parts separately.
pub fn realign_complex(z: &ComplexMatrix, dims: BipartiteDims) -> Result<ComplexMatrix> {
    ComplexMatrix::new(realign(z.re(), dims)?, realign(z.im(), dims)?)
}

pub fn frobenius(a: &RealMatrix) -> f64 {
    a.frobenius()
}

/// Full singular value decomposition `M = U·diag(s)·Vᵗ`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `p × p` orthogonal.
    pub u: RealMatrix,
    /// `min(p, q)` values, descending.
    pub s: Vec<f64>,
    /// `q × q` orthogonal.
    pub v: RealMatrix,
    /// Number of singular values above `rank_tol · s₁`.
    pub rank: usize,
}

impl Svd {
    pub fn u_col(&self, i: usize) -> Vec<f64> {
        self.u.column(i)
    }

    pub fn v_col(&self, i: usize) -> Vec<f64> {
        self.v.column(i)
    }
}

/// Real SVD with descending singular values and a deterministic sign
/// convention: the first entry of each left singular vector whose magnitude
/// exceeds the threshold is positive, and the matching right vector is
/// flipped along with it. `rank_tol` is relative to the largest singular
/// value.
pub fn svd_real(m: &RealMatrix, rank_tol: f64) -> Result<Svd> {
    if !m.is_finite() {
        let k = m.data.iter().position(|x| !x.is_finite()).unwrap_or(0);
        return Err(Error::NonFinite {
            row: k / m.cols.max(1),
            col: k % m.cols.max(1),
        });
    }
    if rank_tol.is_nan() || rank_tol < 0.0 {
        return Err(crate::error::invalid("rank_tol", "must be nonnegative"));
    }
    let (p, q) = m.shape();
    let k = p.min(q);
    if k == 0 {
        return Ok(Svd {
            u: RealMatrix::identity(p),
            s: Vec::new(),
            v: RealMatrix::identity(q),
            rank: 0,
        });
    }

    let decomposition = m
        .to_faer()
        .svd()
        .map_err(|_| crate::error::invalid("svd", "did not converge"))?;
    let (full_u, values, full_v) = (decomposition.U(), decomposition.S(), decomposition.V());

    let sign_threshold = rank_tol.max(1e-12);
    let mut u = RealMatrix::from_fn(p, p, |i, j| full_u[(i, j)]);
    let mut v = RealMatrix::from_fn(q, q, |i, j| full_v[(i, j)]);
    let mut s = Vec::with_capacity(k);
    for j in 0..k {
        let lead = (0..p).map(|i| u[(i, j)]).find(|x| x.abs() > sign_threshold).unwrap_or(1.0);
        if lead < 0.0 {
            (0..p).for_each(|i| u[(i, j)] = -u[(i, j)]);
            (0..q).for_each(|i| v[(i, j)] = -v[(i, j)]);
        }
        s.push(values[j].max(0.0));
    }

    let rank = if s[0] == 0.0 {
        0
    } else {
        s.iter().filter(|&&x| x > rank_tol * s[0]).count()
    };

    Ok(Svd { u, s, v, rank })
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(dim_mismatch(format!(
            "Hermitian input must be square, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    h.check_finite()?;
    let deviation = h.hermitian_deviation();
    if deviation > HERMITIAN_TOL * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    let n = h.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let sym = h.hermitian_part();
    let evd = if sym.is_real() {
        sym.re().to_faer().self_adjoint_eigenvalues(Side::Lower)
    } else {
        Mat::<c64>::from_fn(n, n, |i, j| {
            let (re, im) = sym.get(i, j);
            c64::new(re, im)
        })
        .self_adjoint_eigenvalues(Side::Lower)
    };
    let mut values = evd.map_err(|_| crate::error::invalid("eigensolver", "did not converge"))?;
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(values)
}

/// Smallest and largest eigenvalue of a Hermitian matrix.
pub fn eig_extremes(h: &ComplexMatrix) -> Result<(f64, f64)> {
    let values = hermitian_eigenvalues(h)?;
    match (values.first(), values.last()) {
        (Some(lo), Some(hi)) => Ok((*lo, *hi)),
        _ => Err(dim_mismatch("empty matrix has no eigenvalues")),
    }
}

pub fn min_eig(h: &ComplexMatrix) -> Result<f64> {
    eig_extremes(h).map(|(lo, _)| lo)
}

pub fn max_eig(h: &ComplexMatrix) -> Result<f64> {
    eig_extremes(h).map(|(_, hi)| hi)
}

/// Pauli matrices σ₁, σ₂, σ₃.
pub fn pauli(k: usize) -> ComplexMatrix {
    match k {
        1 => ComplexMatrix::from_real(RealMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]])),
        2 => ComplexMatrix::new(
            RealMatrix::zeros(2, 2),
            RealMatrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]),
        )
        .unwrap(),
        3 => ComplexMatrix::from_real(RealMatrix::from_rows(&[&[1.0, 0.0], &[0.0, -1.0]])),
        _ => panic!("Pauli index must be 1, 2 or 3"),
    }
}
