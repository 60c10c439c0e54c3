//! Best approximation of a real `mn × mn` matrix by `Σ Bᵢ ⊗ Cᵢ` with real
//! symmetric factors.
//!
//! The realigned matrix is rotated into the pair bases of both factors,
//! `Â = Q₁ᵗ·realign(A)·Q₂`. Only the symmetric-symmetric block `Â₂₂` can be
//! matched by symmetric factors; its SVD gives the optimal terms and the other
//! three blocks are an irreducible error floor.

use crate::dense::{kron, realign, svd_real, BipartiteDims, RealMatrix, DEFAULT_RANK_TOL};
use crate::error::Result;
use crate::pair_basis::{antisym_count, build_q1_sym, PairBasis};

/// Rank threshold and optional cap on the number of returned terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposeOptions {
    pub rank_tol: f64,
    pub max_terms: Option<usize>,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            rank_tol: DEFAULT_RANK_TOL,
            max_terms: None,
        }
    }
}

impl DecomposeOptions {
    pub fn with_rank_tol(rank_tol: f64) -> Self {
        Self {
            rank_tol,
            ..Self::default()
        }
    }

    pub(crate) fn term_count(&self, rank: usize) -> usize {
        self.max_terms.map_or(rank, |cap| cap.min(rank))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymBlocks {
    pub a11: RealMatrix,
    pub a12: RealMatrix,
    pub a21: RealMatrix,
    pub a22: RealMatrix,
}

impl SymBlocks {
    /// `(‖Â₁₁‖, ‖Â₁₂‖, ‖Â₂₁‖)`.
    pub fn off_block_norms(&self) -> [f64; 3] {
        [self.a11.frobenius(), self.a12.frobenius(), self.a21.frobenius()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymDecomposition {
    pub dims: BipartiteDims,
    /// `(B, C)` pairs; the singular value is folded into `B`.
    pub terms: Vec<(RealMatrix, RealMatrix)>,
    /// All singular values of `Â₂₂`, descending, including discarded ones.
    pub singular_values: Vec<f64>,
    pub block_norms: [f64; 3],
    /// `‖A − Σ Bᵢ ⊗ Cᵢ‖_F`, measured directly.
    pub residual: f64,
}

impl SymDecomposition {
    pub fn reconstruct(&self) -> RealMatrix {
        reconstruct_real(&self.terms, self.dims)
    }

    /// Residual implied by the block structure:
    /// `sqrt(‖Â₁₁‖² + ‖Â₁₂‖² + ‖Â₂₁‖² + Σ_{i>r} λᵢ)`.
    pub fn predicted_residual(&self) -> f64 {
        let floor: f64 = self.block_norms.iter().map(|x| x * x).sum();
        let tail: f64 = self.singular_values[self.terms.len()..].iter().map(|s| s * s).sum();
        (floor + tail).sqrt()
    }
}

pub fn reconstruct_real(terms: &[(RealMatrix, RealMatrix)], dims: BipartiteDims) -> RealMatrix {
    let mut out = RealMatrix::zeros(dims.total(), dims.total());
    for (b, c) in terms {
        out.add_scaled(1.0, &kron(b, c)).expect("factor shapes match dims");
    }
    out
}

pub fn transform_blocks_sym(a: &RealMatrix, dims: BipartiteDims) -> Result<SymBlocks> {
    let realigned = realign(a, dims)?;
    let q1 = build_q1_sym(dims.m);
    let q2 = build_q1_sym(dims.n);
    let hat = q1.transpose().matmul(&realigned)?.matmul(&q2)?;
    let (r, c) = (antisym_count(dims.m), antisym_count(dims.n));
    let (rows, cols) = hat.shape();
    Ok(SymBlocks {
        a11: hat.submatrix(0, r, 0, c),
        a12: hat.submatrix(0, r, c, cols),
        a21: hat.submatrix(r, rows, 0, c),
        a22: hat.submatrix(r, rows, c, cols),
    })
}

pub fn decompose_sym(a: &RealMatrix, dims: BipartiteDims, opts: &DecomposeOptions) -> Result<SymDecomposition> {
    let blocks = transform_blocks_sym(a, dims)?;
    let svd = svd_real(&blocks.a22, opts.rank_tol)?;
    let r = opts.term_count(svd.rank);

    let left = PairBasis::new(dims.m);
    let right = PairBasis::new(dims.n);
    let mut terms = Vec::with_capacity(r);
    for i in 0..r {
        let b_hat: Vec<f64> = svd.u_col(i).iter().map(|x| x * svd.s[i]).collect();
        let c_hat = svd.v_col(i);
        let b = crate::dense::unvec(&left.qa_bar.matvec(&b_hat)?, dims.m, dims.m)?;
        let c = crate::dense::unvec(&right.qa_bar.matvec(&c_hat)?, dims.n, dims.n)?;
        terms.push((b.symmetrized(), c.symmetrized()));
    }

    let residual = a.sub(&reconstruct_real(&terms, dims))?.frobenius();
    Ok(SymDecomposition {
        dims,
        terms,
        singular_values: svd.s,
        block_norms: blocks.off_block_norms(),
        residual,
    })
}
