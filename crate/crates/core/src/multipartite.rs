//! Hermitian tensor decompositions of `l`-partite matrices.
//!
//! The matrix is split as `H₁ | H₂ ⊗ … ⊗ H_l`, decomposed with
//! [`decompose_herm`], and every (Hermitian) tail factor is split again
//! until single-site factors remain.

use crate::dense::{eig_extremes, kron_complex, BipartiteDims, ComplexMatrix, HERMITIAN_TOL};
use crate::error::{dim_mismatch, invalid, Error, Result};
use crate::herm_decomp::decompose_herm;
use crate::separability::q_value;
use crate::states::check_dims;
use crate::sym_decomp::DecomposeOptions;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiDims(Vec<usize>);

impl MultiDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(invalid("dims", format!("need at least two subsystems, got {}", dims.len())));
        }
        if dims.contains(&0) {
            return Err(invalid("dims", "subsystem dimensions must be positive"));
        }
        Ok(Self(dims))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }
}

/// One factor per subsystem.
pub type MultiTerm = Vec<ComplexMatrix>;

#[derive(Debug, Clone, PartialEq)]
pub struct MultiDecomposition {
    pub dims: MultiDims,
    pub terms: Vec<MultiTerm>,
    /// Largest bipartite rank met at each recursion level.
    pub level_ranks: Vec<usize>,
    pub q_multi: Option<f64>,
    /// Subsystem order used for the recursion.
    pub order: Vec<usize>,
    /// False when a non-default recursion order was requested.
    pub canonical: bool,
    /// `‖A − Σ ⊗ₖ Bᵢᵏ‖_F`.
    pub residual: f64,
}

impl MultiDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        reconstruct_multi(&self.terms, &self.dims).expect("terms built for these dims")
    }
}

pub fn reconstruct_multi(terms: &[MultiTerm], dims: &MultiDims) -> Result<ComplexMatrix> {
    let total = dims.total();
    let mut out = ComplexMatrix::zeros(total, total);
    for (i, term) in terms.iter().enumerate() {
        if term.len() != dims.len() || term.iter().zip(dims.as_slice()).any(|(f, &d)| f.shape() != (d, d)) {
            return Err(dim_mismatch(format!("term {i} does not match dims {:?}", dims.as_slice())));
        }
        out.add_scaled(1.0, &kron_chain(term))?;
    }
    Ok(out)
}

fn kron_chain(factors: &[ComplexMatrix]) -> ComplexMatrix {
    let mut iter = factors.iter();
    let first = iter.next().cloned().unwrap_or_else(|| ComplexMatrix::identity(1));
    iter.fold(first, |acc, f| kron_complex(&acc, f))
}

fn decompose_level(
    a: &ComplexMatrix,
    dims: &[usize],
    opts: &DecomposeOptions,
    level: usize,
    ranks: &mut [usize],
) -> Result<Vec<MultiTerm>> {
    if dims.len() == 1 {
        return Ok(vec![vec![a.clone()]]);
    }
    let split = BipartiteDims::new(dims[0], dims[1..].iter().product())?;
    let d = decompose_herm(a, split, opts)?;
    ranks[level] = ranks[level].max(d.rank());
    let mut out = Vec::new();
    for (head, tail) in d.terms {
        for mut rest in decompose_level(&tail, &dims[1..], opts, level + 1, ranks)? {
            rest.insert(0, head.clone());
            out.push(rest);
        }
    }
    Ok(out)
}

/// Reorders the tensor factors of `a`: subsystem `k` of the result is
/// subsystem `order[k]` of the input.
pub fn permute_subsystems(a: &ComplexMatrix, dims: &[usize], order: &[usize]) -> Result<ComplexMatrix> {
    check_dims(a, dims)?;
    let l = dims.len();
    let mut seen = vec![false; l];
    if order.len() != l || order.iter().any(|&k| k >= l || std::mem::replace(&mut seen[k], true)) {
        return Err(invalid("order", format!("{order:?} is not a permutation of 0..{l}")));
    }
    let new_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    // index of a permuted basis vector in the original ordering
    let map: Vec<usize> = (0..a.rows())
        .map(|idx| {
            let mut digits = vec![0; l];
            let mut rem = idx;
            for k in (0..l).rev() {
                digits[k] = rem % new_dims[k];
                rem /= new_dims[k];
            }
            let mut original = vec![0; l];
            for (k, &src) in order.iter().enumerate() {
                original[src] = digits[k];
            }
            original.iter().zip(dims).fold(0, |acc, (d, n)| acc * n + d)
        })
        .collect();
    Ok(ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(map[i], map[j])))
}

/// Left-to-right recursive decomposition (`order = 0, 1, …, l−1`).
pub fn decompose_multi(a: &ComplexMatrix, dims: &MultiDims, opts: &DecomposeOptions) -> Result<MultiDecomposition> {
    let order: Vec<usize> = (0..dims.len()).collect();
    decompose_multi_ordered(a, dims, &order, opts)
}

/// Decomposition with the recursion run over a permuted subsystem order.
/// Factors are returned in the original subsystem order.
pub fn decompose_multi_ordered(
    a: &ComplexMatrix,
    dims: &MultiDims,
    order: &[usize],
    opts: &DecomposeOptions,
) -> Result<MultiDecomposition> {
    check_dims(a, dims.as_slice())?;
    a.check_finite()?;
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_TOL * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let permuted = permute_subsystems(a, dims.as_slice(), order)?;
    let permuted_dims: Vec<usize> = order.iter().map(|&k| dims.as_slice()[k]).collect();
    let mut level_ranks = vec![0; dims.len() - 1];
    let raw = decompose_level(&permuted, &permuted_dims, opts, 0, &mut level_ranks)?;

    let terms: Vec<MultiTerm> = raw
        .into_iter()
        .map(|factors| {
            let mut restored = vec![ComplexMatrix::zeros(0, 0); factors.len()];
            for (k, f) in order.iter().zip(factors) {
                restored[*k] = f;
            }
            restored
        })
        .collect();
    let residual = a.sub(&reconstruct_multi(&terms, dims)?)?.frobenius();
    let q_multi = if terms.is_empty() { None } else { Some(q_value_multi(&terms)?) };
    Ok(MultiDecomposition {
        dims: dims.clone(),
        terms,
        level_ranks,
        q_multi,
        order: order.to_vec(),
        canonical: order.iter().enumerate().all(|(i, &k)| i == k),
        residual,
    })
}

/// Identity weight after shifting every factor to smallest eigenvalue zero.
///
/// Writing `Bᵢᵏ = B̄ᵢᵏ + μᵢᵏ I` and expanding each product groups the terms
/// by the set `S` of sites that carry a shifted factor. Every proper group
/// `Σᵢ (Π_{k∉S} μᵢᵏ) ⊗_{k∈S} B̄ᵢᵏ` is shifted by its own smallest eigenvalue
/// into the identity coefficient, so the result is
/// `Σᵢ Πₖ μᵢᵏ + Σ_S m(group_S)`. Two-site input is delegated to [`q_value`].
pub fn q_value_multi(terms: &[MultiTerm]) -> Result<f64> {
    let l = terms.first().map(|t| t.len()).ok_or_else(|| invalid("terms", "decomposition has no terms"))?;
    if terms.iter().any(|t| t.len() != l) {
        return Err(dim_mismatch("terms have different numbers of factors"));
    }
    if l == 2 {
        let pairs: Vec<_> = terms.iter().map(|t| (t[0].clone(), t[1].clone())).collect();
        return q_value(&pairs);
    }
    expanded_q(terms)
}

pub(crate) fn expanded_q(terms: &[MultiTerm]) -> Result<f64> {
    let l = terms[0].len();
    let dims: Vec<usize> = terms[0].iter().map(|f| f.rows()).collect();
    let mut mins = Vec::with_capacity(terms.len());
    let mut shifted = Vec::with_capacity(terms.len());
    for term in terms {
        let mut mu = Vec::with_capacity(l);
        let mut bars = Vec::with_capacity(l);
        for f in term {
            let lo = eig_extremes(f)?.0;
            mu.push(lo);
            bars.push(f.shifted(-lo));
        }
        mins.push(mu);
        shifted.push(bars);
    }

    let mut q: f64 = mins.iter().map(|mu| mu.iter().product::<f64>()).sum();
    for mask in 1..(1usize << l) - 1 {
        let sites: Vec<usize> = (0..l).filter(|k| mask >> k & 1 == 1).collect();
        let size: usize = sites.iter().map(|&k| dims[k]).product();
        let mut group = ComplexMatrix::zeros(size, size);
        for (mu, bars) in mins.iter().zip(&shifted) {
            let weight: f64 = (0..l).filter(|k| mask >> k & 1 == 0).map(|k| mu[k]).product();
            let factors: Vec<ComplexMatrix> = sites.iter().map(|&k| bars[k].clone()).collect();
            group.add_scaled(weight, &kron_chain(&factors))?;
        }
        q += eig_extremes(&group.hermitian_part())?.0;
    }
    Ok(q)
}
