//! Decomposition of a complex `mn × mn` matrix into `Σ Bᵢ ⊗ Cᵢ` with
//! Hermitian factors.
//!
//! The complex problem is embedded in a real one of twice the size,
//! `[[ã, 𝒜̃], [−𝒜̃, ã]]` with `ã`, `𝒜̃` the realigned real and imaginary
//! parts, and rotated by the block bases `[[X, Y], [Y, X]]` of both factors.
//! For Hermitian input the off-diagonal blocks vanish and the SVD of `Â₂₂`
//! yields an exact decomposition with the minimal number of terms.

use crate::dense::{kron_complex, realign, svd_real, unvec, BipartiteDims, ComplexMatrix, RealMatrix};
use crate::error::{dim_mismatch, Result};
use crate::pair_basis::{build_q_herm, build_xy, signature, SignatureMatrix};
use crate::sym_decomp::DecomposeOptions;

/// Relative tolerance under which [`lemma2_check`] residuals are treated as
/// zero when deciding whether the input was Hermitian.
pub const LEMMA2_TOL: f64 = 1e-11;

pub type HermTerm = (ComplexMatrix, ComplexMatrix);

#[derive(Debug, Clone, PartialEq)]
pub struct HermBlocks {
    pub a11: RealMatrix,
    pub a12: RealMatrix,
    pub a21: RealMatrix,
    pub a22: RealMatrix,
}

impl HermBlocks {
    pub fn norms(&self) -> [f64; 4] {
        [
            self.a11.frobenius(),
            self.a12.frobenius(),
            self.a21.frobenius(),
            self.a22.frobenius(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermDecomposition {
    pub dims: BipartiteDims,
    /// Hermitian `(B, C)` pairs with the singular value folded into `B`.
    pub terms: Vec<HermTerm>,
    /// All singular values of `Â₂₂`, descending.
    pub singular_values: Vec<f64>,
    /// `(‖Â₁₁‖, ‖Â₁₂‖, ‖Â₂₁‖, ‖Â₂₂‖)`.
    pub block_norms: [f64; 4],
    /// `(‖Â₁₂‖, ‖Â₂₁‖, ‖Â₁₁ − I_{s,a}Â₂₂I_{s,a}‖)`.
    pub lemma2_residuals: [f64; 3],
    /// `‖A − Σ Bᵢ ⊗ Cᵢ‖_F`, measured directly.
    pub residual: f64,
    /// False when the input failed the block test; the terms then only
    /// minimize the `Â₂₂` part of the objective.
    pub exact_mode: bool,
}

impl HermDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        reconstruct(&self.terms, self.dims).expect("terms built for these dims")
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }
}

pub fn transform_blocks_herm(a: &ComplexMatrix, dims: BipartiteDims) -> Result<HermBlocks> {
    dims.check_square(a.rows(), a.cols())?;
    let re = realign(a.re(), dims)?;
    let im = realign(a.im(), dims)?;
    let (p, q) = re.shape();
    let embedded = RealMatrix::from_fn(2 * p, 2 * q, |i, j| {
        let (r, c) = (i % p, j % q);
        match (i < p, j < q) {
            (true, true) | (false, false) => re[(r, c)],
            (true, false) => im[(r, c)],
            (false, true) => -im[(r, c)],
        }
    });
    let q1 = build_q_herm(dims.m);
    let q2 = build_q_herm(dims.n);
    let hat = q1.transpose().matmul(&embedded)?.matmul(&q2)?;
    Ok(HermBlocks {
        a11: hat.submatrix(0, p, 0, q),
        a12: hat.submatrix(0, p, q, 2 * q),
        a21: hat.submatrix(p, 2 * p, 0, q),
        a22: hat.submatrix(p, 2 * p, q, 2 * q),
    })
}

/// Residuals of the Hermitian block identities: `Â₁₂ = Â₂₁ = 0` and
/// `Â₁₁ = I^m_{s,a}·Â₂₂·I^n_{s,a}`.
pub fn lemma2_check(blocks: &HermBlocks, dims: BipartiteDims) -> Result<[f64; 3]> {
    let (m2, n2) = (dims.m * dims.m, dims.n * dims.n);
    for b in [&blocks.a11, &blocks.a12, &blocks.a21, &blocks.a22] {
        if b.shape() != (m2, n2) {
            return Err(dim_mismatch(format!("block {:?} for dims ({}, {})", b.shape(), dims.m, dims.n)));
        }
    }
    let flipped = SignatureMatrix::sandwich(&signature(dims.m), &blocks.a22, &signature(dims.n));
    Ok([
        blocks.a12.frobenius(),
        blocks.a21.frobenius(),
        blocks.a11.sub(&flipped)?.frobenius(),
    ])
}

pub fn decompose_herm(a: &ComplexMatrix, dims: BipartiteDims, opts: &DecomposeOptions) -> Result<HermDecomposition> {
    a.check_finite()?;
    let blocks = transform_blocks_herm(a, dims)?;
    let lemma2_residuals = lemma2_check(&blocks, dims)?;
    let scale = a.frobenius().max(f64::MIN_POSITIVE);
    let exact_mode = lemma2_residuals.iter().all(|r| *r <= LEMMA2_TOL * scale);

    let svd = svd_real(&blocks.a22, opts.rank_tol)?;
    let r = opts.term_count(svd.rank);
    let (x1, y1) = build_xy(dims.m);
    let (x2, y2) = build_xy(dims.n);

    let mut terms = Vec::with_capacity(r);
    for i in 0..r {
        let b_hat: Vec<f64> = svd.u_col(i).iter().map(|x| x * svd.s[i]).collect();
        let c_check: Vec<f64> = svd.v_col(i).iter().map(|x| -x).collect();
        let b_re: Vec<f64> = y1.matvec(&b_hat)?.into_iter().map(|x| -x).collect();
        let b_im = x1.matvec(&b_hat)?;
        let c_re = y2.matvec(&c_check)?;
        let c_im = x2.matvec(&c_check)?;
        let b = ComplexMatrix::new(unvec(&b_re, dims.m, dims.m)?, unvec(&b_im, dims.m, dims.m)?)?;
        let c = ComplexMatrix::new(unvec(&c_re, dims.n, dims.n)?, unvec(&c_im, dims.n, dims.n)?)?;
        terms.push((b.hermitian_part(), c.hermitian_part()));
    }

    let residual = a.sub(&reconstruct(&terms, dims)?)?.frobenius();
    Ok(HermDecomposition {
        dims,
        terms,
        singular_values: svd.s,
        block_norms: blocks.norms(),
        lemma2_residuals,
        residual,
        exact_mode,
    })
}

/// `Σ Bᵢ ⊗ Cᵢ`; an empty list gives the zero matrix.
pub fn reconstruct(terms: &[HermTerm], dims: BipartiteDims) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(dims.total(), dims.total());
    for (i, (b, c)) in terms.iter().enumerate() {
        if b.shape() != (dims.m, dims.m) || c.shape() != (dims.n, dims.n) {
            return Err(dim_mismatch(format!(
                "term {i} has factors {:?} and {:?} for dims ({}, {})",
                b.shape(),
                c.shape(),
                dims.m,
                dims.n
            )));
        }
        out.add_scaled(1.0, &kron_complex(b, c))?;
    }
    Ok(out)
}
