//! Benchmark and random test states.
//!
//! Random generators draw from ChaCha8 streams: the generator is seeded with
//! `seed_from_u64(seed)` and `set_stream(k)` selects sub-stream `k`, so the
//! same `(seed, stream)` produces the same numbers on every platform.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::dense::{hermitian_eigenvalues, kron_complex, BipartiteDims, ComplexMatrix, RealMatrix};
use crate::error::{dim_mismatch, invalid, Result};
use crate::herm_decomp::HermTerm;

/// Deterministic random stream `stream` under `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Two-qubit Werner state with singlet fidelity `F`. PSD exactly for
/// `0 ≤ F ≤ 1`; other values still give a trace-one Hermitian matrix.
pub fn werner(f: f64) -> ComplexMatrix {
    let a = (1.0 - f) / 3.0;
    let b = (2.0 * f + 1.0) / 6.0;
    let c = (1.0 - 4.0 * f) / 6.0;
    ComplexMatrix::from_real(RealMatrix::from_rows(&[
        &[a, 0.0, 0.0, 0.0],
        &[0.0, b, c, 0.0],
        &[0.0, c, b, 0.0],
        &[0.0, 0.0, 0.0, a],
    ]))
}

/// Horodecki's `2 × 4` bound entangled state, `0 < b < 1`.
pub fn horodecki_2x4(b: f64) -> Result<ComplexMatrix> {
    if !(b > 0.0 && b < 1.0) {
        return Err(invalid("b", format!("must lie in (0, 1), got {b}")));
    }
    let mut r = RealMatrix::zeros(8, 8);
    for k in 0..4 {
        r[(k, k)] = b;
    }
    for k in 0..3 {
        r[(k, 5 + k)] = b;
        r[(5 + k, k)] = b;
        r[(5 + k, 5 + k)] = b;
    }
    let diag = 0.5 * (1.0 + b);
    let corner = 0.5 * (1.0 - b * b).sqrt();
    r[(4, 4)] = diag;
    r[(7, 7)] = diag;
    r[(4, 7)] = corner;
    r[(7, 4)] = corner;
    Ok(ComplexMatrix::from_real(r.scale(1.0 / (7.0 * b + 1.0))))
}

fn gaussian_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| (rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// `G·Gᴴ / tr(G·Gᴴ)` for a seeded `d × rank` complex Gaussian `G`.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<ComplexMatrix> {
    if d == 0 || rank == 0 || rank > d {
        return Err(invalid("rank", format!("need 1 <= rank <= d, got rank {rank} for d {d}")));
    }
    let g = gaussian_complex(&mut rng_stream(seed, 0), d, rank);
    let rho = g.matmul(&g.conj_transpose())?.hermitian_part();
    Ok(rho.scale(1.0 / rho.trace().0))
}

/// Projector `|ψ⟩⟨ψ|` onto a normalized vector given as a `d × 1` matrix.
fn projector(psi: &ComplexMatrix) -> ComplexMatrix {
    let norm = psi.frobenius();
    let unit = psi.scale(1.0 / norm);
    unit.matmul(&unit.conj_transpose()).expect("column vector").hermitian_part()
}

/// A separable mixture together with the product terms it was built from.
#[derive(Debug, Clone)]
pub struct SeparableMixture {
    pub state: ComplexMatrix,
    /// `(pᵢ·ρᵢ¹, ρᵢ²)`, every factor PSD.
    pub terms: Vec<HermTerm>,
    pub weights: Vec<f64>,
}

/// Convex mixture of `k` random pure product states with Dirichlet(1, …, 1)
/// weights.
pub fn random_separable_mixture(m: usize, n: usize, k: usize, seed: u64) -> Result<SeparableMixture> {
    if k == 0 {
        return Err(invalid("k", "need at least one product term"));
    }
    let dims = BipartiteDims::new(m, n)?;
    let mut rng = rng_stream(seed, 0);
    let raw: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let mut state = ComplexMatrix::zeros(dims.total(), dims.total());
    let mut terms = Vec::with_capacity(k);
    for &p in &weights {
        let left = projector(&gaussian_complex(&mut rng, m, 1)).scale(p);
        let right = projector(&gaussian_complex(&mut rng, n, 1));
        state.add_scaled(1.0, &kron_complex(&left, &right))?;
        terms.push((left, right));
    }
    Ok(SeparableMixture {
        state: state.hermitian_part(),
        terms,
        weights,
    })
}

pub fn random_separable(m: usize, n: usize, k: usize, seed: u64) -> Result<ComplexMatrix> {
    random_separable_mixture(m, n, k, seed).map(|mix| mix.state)
}

/// Partial transpose over the second factor.
pub fn partial_transpose(a: &ComplexMatrix, dims: BipartiteDims) -> Result<ComplexMatrix> {
    dims.check_square(a.rows(), a.cols())?;
    let n = dims.n;
    Ok(ComplexMatrix::from_fn(a.rows(), a.cols(), |row, col| {
        let (i, k) = (row / n, row % n);
        let (j, l) = (col / n, col % n);
        a.get(i * n + l, j * n + k)
    }))
}

pub fn partial_transpose_min_eig(a: &ComplexMatrix, dims: BipartiteDims) -> Result<f64> {
    let pt = partial_transpose(a, dims)?;
    Ok(hermitian_eigenvalues(&pt)?[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Werner,
    Horodecki2x4,
    RandomDensity,
    RandomSeparable,
}

impl std::str::FromStr for Family {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "werner" => Ok(Self::Werner),
            "horodecki2x4" => Ok(Self::Horodecki2x4),
            "random_density" => Ok(Self::RandomDensity),
            "random_separable" => Ok(Self::RandomSeparable),
            other => Err(invalid("family", format!("unknown family `{other}`"))),
        }
    }
}

/// A named state family with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpec {
    pub family: Family,
    pub params: BTreeMap<String, f64>,
    /// Subsystem dimensions; required by the random families.
    pub dims: Option<Vec<usize>>,
    pub seed: Option<u64>,
}

impl StateSpec {
    fn param(&self, name: &str) -> Result<f64> {
        self.params
            .get(name)
            .copied()
            .ok_or_else(|| invalid(name, "missing parameter"))
    }

    fn integer_param(&self, name: &str) -> Result<usize> {
        let v = self.param(name)?;
        if v < 1.0 || v.fract() != 0.0 {
            return Err(invalid(name, format!("must be a positive integer, got {v}")));
        }
        Ok(v as usize)
    }

    fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.dims.as_deref() {
            Some([m, n]) if *m > 0 && *n > 0 => Ok((*m, *n)),
            Some(other) => Err(invalid("dims", format!("need two positive dimensions, got {other:?}"))),
            None => Err(invalid("dims", "required for this family")),
        }
    }

    /// Generates the matrix and the subsystem dimensions it lives on.
    pub fn generate(&self) -> Result<(ComplexMatrix, Vec<usize>)> {
        let seed = self.seed.unwrap_or(0);
        match self.family {
            Family::Werner => {
                let f = self.param("F")?;
                if !f.is_finite() {
                    return Err(invalid("F", "must be finite"));
                }
                Ok((werner(f), vec![2, 2]))
            }
            Family::Horodecki2x4 => Ok((horodecki_2x4(self.param("b")?)?, vec![2, 4])),
            Family::RandomDensity => {
                let dims = match self.dims.as_deref() {
                    Some(d) if !d.is_empty() && !d.contains(&0) => d.to_vec(),
                    Some(other) => return Err(invalid("dims", format!("need positive dimensions, got {other:?}"))),
                    None => return Err(invalid("dims", "required for this family")),
                };
                let total = dims.iter().product();
                let rank = if self.params.contains_key("rank") {
                    self.integer_param("rank")?
                } else {
                    total
                };
                Ok((random_density(total, rank, seed)?, dims))
            }
            Family::RandomSeparable => {
                let (m, n) = self.bipartite_dims()?;
                let k = self.integer_param("k")?;
                Ok((random_separable(m, n, k, seed)?, vec![m, n]))
            }
        }
    }
}

/// Checks that `a` is square with side `Π dims`.
pub fn check_dims(a: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().product();
    if a.rows() != total || a.cols() != total {
        return Err(dim_mismatch(format!(
            "matrix is {}x{} but dims {dims:?} need {total}x{total}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}
